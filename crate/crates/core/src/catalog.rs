//! Built-in models. Parameterized entries are addressed as `name:param`,
//! for example `bazaikin:2` or `sphere:4`.

use std::fmt::Write as _;

use crate::dsl::{parse_model, ModelFile};
use crate::{Error, Result};

/// One catalog entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Entry {
    pub name: &'static str,
    /// Placeholder for the parameter, if any.
    pub param: Option<&'static str>,
    pub kind: &'static str,
    pub description: &'static str,
}

impl Entry {
    /// `name` or `name:PARAM`.
    pub fn usage(&self) -> String {
        match self.param {
            Some(p) => format!("{}:{p}", self.name),
            None => self.name.to_string(),
        }
    }
}

const ENTRIES: &[Entry] = &[
    Entry {
        name: "bazaikin",
        param: Some("L"),
        kind: "model",
        description: "Λ(x2, y5, y9), d y5 = x2^3, d y9 = L x2^5",
    },
    Entry {
        name: "cpn",
        param: Some("N"),
        kind: "model",
        description: "minimal model of CP^N",
    },
    Entry {
        name: "cpn_ring",
        param: Some("N"),
        kind: "fd",
        description: "Q[x]/(x^(N+1)) with |x| = 2",
    },
    Entry {
        name: "eschenburg",
        param: None,
        kind: "model",
        description: "Λ(x2, y3, y5), d y3 = x2^2; the rational type of S^2 x S^5",
    },
    Entry {
        name: "sphere",
        param: Some("N"),
        kind: "model",
        description: "minimal model of S^N",
    },
    Entry {
        name: "su2_u1",
        param: None,
        kind: "biquotient",
        description: "SU(2)/U(1), dbar q3 = u^2",
    },
    Entry {
        name: "su3_su2",
        param: None,
        kind: "biquotient",
        description: "SU(3)/SU(2), dbar q3 = c2, dbar q5 = 0",
    },
    Entry {
        name: "su3_t2",
        param: None,
        kind: "biquotient",
        description: "SU(3)/T^2, the full flag manifold",
    },
    Entry {
        name: "su6_su3su3",
        param: None,
        kind: "model",
        description: "SU(6)/(SU(3) x SU(3)), d x7 = y4^2, d x9 = 2 y4 y6, d x11 = y6^2",
    },
    Entry {
        name: "yamaguchi14",
        param: None,
        kind: "model",
        description: "elliptic 14-dimensional model on x2, y3, z3, a4, b5, c7",
    },
];

/// All entries, sorted by name.
pub fn entries() -> &'static [Entry] {
    ENTRIES
}

/// Names of all entries in `name` or `name:PARAM` form.
pub fn available() -> Vec<String> {
    ENTRIES.iter().map(Entry::usage).collect()
}

fn unknown(name: &str) -> Error {
    Error::UnknownCatalogEntry {
        name: name.to_string(),
        available: available(),
    }
}

fn coef_term(c: i64, mono: &str) -> String {
    match c {
        1 => mono.to_string(),
        -1 => format!("-{mono}"),
        _ => format!("{c} {mono}"),
    }
}

/// The source text of an entry in the model language.
pub fn source(name: &str) -> Result<String> {
    let (base, param) = match name.split_once(':') {
        Some((b, p)) => (b, Some(p)),
        None => (name, None),
    };
    let entry = ENTRIES.iter().find(|e| e.name == base).ok_or_else(|| unknown(name))?;
    let value: Option<i64> = match (entry.param, param) {
        (Some(_), Some(p)) => Some(p.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("catalog parameter `{p}` is not an integer"))
        })?),
        (Some(p), None) => {
            return Err(Error::InvalidArgument(format!(
                "catalog entry `{base}` needs a parameter: {base}:{p}"
            )))
        }
        (None, Some(_)) => {
            return Err(Error::InvalidArgument(format!(
                "catalog entry `{base}` takes no parameter"
            )))
        }
        (None, None) => None,
    };
    let positive = |v: i64| -> Result<u32> {
        u32::try_from(v)
            .ok()
            .filter(|&n| (1..=64).contains(&n))
            .ok_or_else(|| Error::InvalidArgument(format!("parameter of `{base}` must be in 1..=64")))
    };
    let mut s = String::new();
    match base {
        "bazaikin" => {
            let l = value.unwrap();
            let tag = if l < 0 { format!("m{}", -l) } else { l.to_string() };
            let _ = writeln!(s, "model bazaikin_{tag} {{");
            s.push_str("  gen x2 : 2\n  gen y5 : 5  d = x2^3\n");
            if l == 0 {
                s.push_str("  gen y9 : 9\n");
            } else {
                let _ = writeln!(s, "  gen y9 : 9  d = {}", coef_term(l, "x2^5"));
            }
            s.push_str("  top 13\n}\n");
        }
        "cpn" => {
            let n = positive(value.unwrap())?;
            let _ = writeln!(s, "model cp{n} {{");
            let _ = writeln!(s, "  gen x : 2\n  gen y : {}  d = x^{}", 2 * n + 1, n + 1);
            let _ = writeln!(s, "  top {}\n}}", 2 * n);
        }
        "cpn_ring" => {
            let n = positive(value.unwrap())?;
            let name = |k: u32| if k == 1 { "x".to_string() } else { format!("x{k}") };
            let _ = writeln!(s, "fd cp{n}_ring {{");
            for k in 1..=n {
                let _ = writeln!(s, "  basis {} : {}", name(k), 2 * k);
            }
            for i in 1..=n {
                for j in i..=n - i {
                    let _ = writeln!(s, "  mul {} {} = {}", name(i), name(j), name(i + j));
                }
            }
            let _ = writeln!(s, "  top {}\n}}", 2 * n);
        }
        "eschenburg" => {
            s.push_str("model eschenburg {\n  gen x2 : 2\n  gen y3 : 3  d = x2^2\n  gen y5 : 5\n  top 7\n}\n");
        }
        "sphere" => {
            let n = positive(value.unwrap())?;
            let _ = writeln!(s, "model s{n} {{");
            let _ = writeln!(s, "  gen x{n} : {n}");
            if n % 2 == 0 {
                let _ = writeln!(s, "  gen y{} : {}  d = x{n}^2", 2 * n - 1, 2 * n - 1);
            }
            let _ = writeln!(s, "  top {n}\n}}");
        }
        "su2_u1" => {
            s.push_str("biquotient su2_u1 {\n  bh u : 2\n  q q3 : 3  dbar = u^2\n  top 2\n}\n");
        }
        "su3_su2" => {
            s.push_str("biquotient su3_su2 {\n  bh c2 : 4\n  q q3 : 3  dbar = c2\n  q q5 : 5\n  top 5\n}\n");
        }
        "su3_t2" => {
            s.push_str(
                "biquotient su3_t2 {\n  bh u1 : 2\n  bh u2 : 2\n  q q3 : 3  dbar = u1^2 + u1 u2 + u2^2\n  q q5 : 5  dbar = u1^2 u2 + u1 u2^2\n  top 6\n}\n",
            );
        }
        "su6_su3su3" => {
            s.push_str(
                "model su6_su3su3 {\n  gen y4 : 4\n  gen y6 : 6\n  gen x7 : 7  d = y4^2\n  gen x9 : 9  d = 2 y4 y6\n  gen x11 : 11  d = y6^2\n  top 19\n}\n",
            );
        }
        "yamaguchi14" => {
            s.push_str(
                "model yamaguchi14 {\n  gen x : 2\n  gen y : 3\n  gen z : 3  d = x^2\n  gen a : 4  d = x y\n  gen b : 5  d = x a + y z\n  gen c : 7  d = a^2 + 2 y b\n  top 14\n}\n",
            );
        }
        _ => return Err(unknown(name)),
    }
    Ok(s)
}

/// Parses the named entry.
pub fn catalog(name: &str) -> Result<ModelFile> {
    parse_model(&source(name)?)
}

/// Instances used when every entry must be exercised: each parameterized
/// entry with a few small parameters.
pub fn sample_names() -> Vec<String> {
    let mut out = Vec::new();
    for e in ENTRIES {
        match e.name {
            "bazaikin" => out.extend(["bazaikin:0", "bazaikin:1", "bazaikin:2", "bazaikin:-3"].map(String::from)),
            "cpn" | "cpn_ring" => out.extend((1..=4).map(|n| format!("{}:{n}", e.name))),
            "sphere" => out.extend((2..=7).map(|n| format!("sphere:{n}"))),
            _ => out.push(e.name.to_string()),
        }
    }
    out
}
