//! A small line-oriented language for models, finite-dimensional algebras
//! and biquotient data.
//!
//! ```text
//! # comments run to the end of the line
//! model su6 {
//!   gen y4 : 4
//!   gen y6 : 6
//!   gen x7 : 7  d = y4^2
//!   gen x9 : 9  d = 2 y4 y6
//!   gen x11 : 11
//!   d x11 = y6^2
//!   top 19
//! }
//!
//! fd cp2 {
//!   basis x : 2
//!   basis x2 : 4
//!   mul x x = x2
//!   top 4
//! }
//!
//! biquotient s2 {
//!   bh u : 2
//!   q q3 : 3  dbar = u^2
//!   top 2
//! }
//! ```
//!
//! Polynomials are sums of terms `[RATIONAL] MONO`, where factors
//! `IDENT[^INT]` are separated by `*` or whitespace. In `fd` blocks the
//! unit is named `1` and is not declared.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::dga::{BiquotientData, Dga};
use crate::fd::{FdAlgebra, Product};
use crate::gca::{Element, FreeGca, Generator};
use crate::linalg::SparseVec;
use crate::{Error, Result, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("{line}:{col}: duplicate generator `{name}`")]
    DuplicateGenerator { line: usize, col: usize, name: String },
    #[error("{line}:{col}: unknown symbol `{name}`")]
    UnknownSymbol { line: usize, col: usize, name: String },
    #[error("{line}:{col}: {message}")]
    Invalid {
        line: usize,
        col: usize,
        message: String,
    },
}

/// A parsed and validated input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelFile {
    pub name: String,
    pub kind: ModelKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Dga { dga: Dga, top: Option<u32> },
    Fd { algebra: FdAlgebra },
    Biquotient { data: BiquotientData, top: Option<u32> },
}

impl ModelFile {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ModelKind::Dga { .. } => "model",
            ModelKind::Fd { .. } => "fd",
            ModelKind::Biquotient { .. } => "biquotient",
        }
    }

    /// Declared or intrinsic formal dimension.
    pub fn top(&self) -> Option<u32> {
        match &self.kind {
            ModelKind::Dga { top, .. } | ModelKind::Biquotient { top, .. } => *top,
            ModelKind::Fd { algebra } => Some(algebra.top_degree()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Newline => write!(f, "end of line"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> std::result::Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let src = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Ident(s), line, col });
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n: BigInt = s.parse().expect("digits");
                out.push(Spanned { tok: Tok::Int(n), line, col });
            } else if "{}:=+-*/^>".contains(c) {
                out.push(Spanned { tok: Tok::Sym(c), line, col });
                i += 1;
            } else {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    expected: vec!["a token".into()],
                    found: format!("`{c}`"),
                });
            }
        }
        out.push(Spanned {
            tok: Tok::Newline,
            line,
            col: chars.len() + 1,
        });
    }
    let line = out.last().map_or(1, |s| s.line + 1);
    out.push(Spanned { tok: Tok::Eof, line, col: 1 });
    Ok(out)
}

/// A polynomial before symbols are resolved.
#[derive(Clone, Debug)]
struct RawPoly {
    terms: Vec<(Q, Vec<(String, u32, usize, usize)>)>,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = self.peek();
        Err(ParseError::Syntax {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        })
    }

    fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.bump();
        }
    }

    fn sym(&mut self, c: char) -> PResult<()> {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(&[&format!("`{c}`")])
        }
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<(String, usize, usize)> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, t.line, t.col))
            }
            _ => self.err(&["identifier"]),
        }
    }

    fn int(&mut self) -> PResult<(BigInt, usize, usize)> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok((n, t.line, t.col))
            }
            _ => self.err(&["integer"]),
        }
    }

    fn small(&mut self, what: &str) -> PResult<(u32, usize, usize)> {
        let (n, line, col) = self.int()?;
        let v: u32 = n.try_into().map_err(|_| ParseError::Invalid {
            line,
            col,
            message: format!("{what} is too large"),
        })?;
        Ok((v, line, col))
    }

    fn end_of_statement(&mut self) -> PResult<()> {
        match self.peek().tok {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::Sym('}') | Tok::Eof => Ok(()),
            _ => self.err(&["end of line"]),
        }
    }

    fn rational(&mut self) -> PResult<Q> {
        let (p, _, _) = self.int()?;
        if self.at_sym('/') {
            self.bump();
            let (q, line, col) = self.int()?;
            if q.is_zero() {
                return Err(ParseError::Invalid {
                    line,
                    col,
                    message: "zero denominator".into(),
                });
            }
            Ok(Q::new(p, q))
        } else {
            Ok(Q::from_integer(p))
        }
    }

    fn factor(&mut self) -> PResult<(String, u32, usize, usize)> {
        let (name, line, col) = self.ident()?;
        let exp = if self.at_sym('^') {
            self.bump();
            self.small("exponent")?.0
        } else {
            1
        };
        Ok((name, exp, line, col))
    }

    fn term(&mut self) -> PResult<(Q, Vec<(String, u32, usize, usize)>)> {
        let mut coef = Q::one();
        let mut factors = Vec::new();
        match self.peek().tok {
            Tok::Int(_) => {
                coef = self.rational()?;
                if self.at_sym('*') {
                    self.bump();
                    factors.push(self.factor()?);
                }
            }
            Tok::Ident(_) => factors.push(self.factor()?),
            _ => return self.err(&["coefficient", "identifier"]),
        }
        loop {
            if self.at_sym('*') {
                self.bump();
                factors.push(self.factor()?);
            } else if matches!(self.peek().tok, Tok::Ident(_)) {
                factors.push(self.factor()?);
            } else {
                break;
            }
        }
        Ok((coef, factors))
    }

    fn poly(&mut self) -> PResult<RawPoly> {
        let mut terms = Vec::new();
        let mut neg = false;
        if self.at_sym('-') {
            self.bump();
            neg = true;
        }
        loop {
            let (c, f) = self.term()?;
            terms.push((if neg { -c } else { c }, f));
            if self.at_sym('+') {
                self.bump();
                neg = false;
            } else if self.at_sym('-') {
                self.bump();
                neg = true;
            } else {
                break;
            }
        }
        Ok(RawPoly { terms })
    }
}

fn resolve(alg: &FreeGca, p: &RawPoly) -> PResult<Element> {
    let mut out = alg.zero();
    for (c, factors) in &p.terms {
        let mut t = alg.constant(c.clone());
        for (name, e, line, col) in factors {
            let g = alg.var(name).map_err(|_| ParseError::UnknownSymbol {
                line: *line,
                col: *col,
                name: name.clone(),
            })?;
            t = &t * &g.pow(*e);
        }
        out = &out + &t;
    }
    Ok(out)
}

fn resolve_fd(names: &HashMap<String, usize>, unit: usize, p: &RawPoly) -> PResult<Vec<(usize, Q)>> {
    let mut out = Vec::new();
    for (c, factors) in &p.terms {
        match factors.as_slice() {
            [] => out.push((unit, c.clone())),
            [(name, 1, line, col)] => {
                let i = *names.get(name).ok_or_else(|| ParseError::UnknownSymbol {
                    line: *line,
                    col: *col,
                    name: name.clone(),
                })?;
                out.push((i, c.clone()));
            }
            [(_, _, line, col), ..] => {
                return Err(ParseError::Invalid {
                    line: *line,
                    col: *col,
                    message: "structure constants must be linear in basis elements".into(),
                })
            }
        }
    }
    Ok(out)
}

fn located(e: Error, line: usize, col: usize) -> Error {
    match e {
        Error::Parse(_) => e,
        other => Error::Parse(ParseError::Invalid {
            line,
            col,
            message: other.to_string(),
        }),
    }
}

/// Parses one `model`, `fd` or `biquotient` block.
pub fn parse_model(text: &str) -> Result<ModelFile> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    p.skip_newlines();
    let start = p.peek().clone();
    let kind = match &start.tok {
        Tok::Ident(s) if s == "model" || s == "fd" || s == "biquotient" => s.clone(),
        _ => return Err(p.err::<()>(&["`model`", "`fd`", "`biquotient`"]).unwrap_err().into()),
    };
    p.bump();
    let (name, _, _) = p.ident()?;
    p.sym('{')?;
    p.skip_newlines();
    let file = match kind.as_str() {
        "model" => parse_dga_body(&mut p, name)?,
        "fd" => parse_fd_body(&mut p, name)?,
        _ => parse_biquotient_body(&mut p, name)?,
    };
    p.sym('}')?;
    p.skip_newlines();
    if p.peek().tok != Tok::Eof {
        return Err(p.err::<()>(&["end of input"]).unwrap_err().into());
    }
    Ok(file)
}

struct Decl {
    name: String,
    degree: u32,
    line: usize,
    col: usize,
}

fn declare(seen: &mut HashMap<String, usize>, d: &Decl, idx: usize) -> PResult<()> {
    if seen.insert(d.name.clone(), idx).is_some() || d.name == "1" {
        return Err(ParseError::DuplicateGenerator {
            line: d.line,
            col: d.col,
            name: d.name.clone(),
        });
    }
    if d.degree == 0 {
        return Err(ParseError::Invalid {
            line: d.line,
            col: d.col,
            message: format!("degree of `{}` must be at least 1", d.name),
        });
    }
    Ok(())
}

fn decl(p: &mut Parser) -> PResult<Decl> {
    let (name, line, col) = p.ident()?;
    p.sym(':')?;
    let (degree, _, _) = p.small("degree")?;
    Ok(Decl {
        name,
        degree,
        line,
        col,
    })
}

fn parse_top(p: &mut Parser, top: &mut Option<u32>) -> PResult<()> {
    let (n, line, col) = p.small("top")?;
    if top.replace(n).is_some() {
        return Err(ParseError::Invalid {
            line,
            col,
            message: "`top` given twice".into(),
        });
    }
    p.end_of_statement()
}

fn parse_dga_body(p: &mut Parser, name: String) -> Result<ModelFile> {
    let mut decls: Vec<Decl> = Vec::new();
    let mut seen = HashMap::new();
    let mut diffs: Vec<(String, usize, usize, RawPoly)> = Vec::new();
    let mut top = None;
    while !p.at_sym('}') {
        if p.keyword("gen") {
            let d = decl(p)?;
            declare(&mut seen, &d, decls.len())?;
            if p.keyword("d") {
                p.sym('=')?;
                diffs.push((d.name.clone(), d.line, d.col, p.poly()?));
            }
            decls.push(d);
            p.end_of_statement()?;
        } else if p.keyword("d") {
            let (g, line, col) = p.ident()?;
            p.sym('=')?;
            diffs.push((g, line, col, p.poly()?));
            p.end_of_statement()?;
        } else if p.keyword("top") {
            parse_top(p, &mut top)?;
        } else {
            return Err(p.err::<()>(&["`gen`", "`d`", "`top`", "`}`"]).unwrap_err().into());
        }
        p.skip_newlines();
    }
    let alg = FreeGca::new(decls.iter().map(|d| Generator::new(d.name.clone(), d.degree)).collect())?;
    let mut values = vec![None; alg.ngens()];
    for (g, line, col, poly) in &diffs {
        let i = alg.index_of(g).ok_or_else(|| ParseError::UnknownSymbol {
            line: *line,
            col: *col,
            name: g.clone(),
        })?;
        if values[i].is_some() {
            return Err(ParseError::Invalid {
                line: *line,
                col: *col,
                message: format!("differential of `{g}` given twice"),
            }
            .into());
        }
        values[i] = Some((resolve(&alg, poly)?, *line, *col));
    }
    let d = values
        .iter()
        .map(|v| v.as_ref().map_or_else(|| alg.zero(), |(e, _, _)| e.clone()))
        .collect();
    let dga = Dga::new(alg.clone(), d).map_err(|e| {
        let at = match &e {
            Error::D2NotZero { generator, .. } | Error::NotChainDerivation(generator) => {
                alg.index_of(generator).and_then(|i| values[i].as_ref())
            }
            _ => None,
        };
        match at {
            Some((_, line, col)) => located(e, *line, *col),
            None => e,
        }
    })?;
    Ok(ModelFile {
        name,
        kind: ModelKind::Dga { dga, top },
    })
}

fn parse_fd_body(p: &mut Parser, name: String) -> Result<ModelFile> {
    let mut decls: Vec<Decl> = Vec::new();
    let mut seen = HashMap::new();
    seen.insert("1".to_string(), 0);
    let mut muls: Vec<(String, usize, usize, String, usize, usize, RawPoly)> = Vec::new();
    let mut top = None;
    while !p.at_sym('}') {
        if p.keyword("basis") {
            let d = decl(p)?;
            declare(&mut seen, &d, decls.len() + 1)?;
            decls.push(d);
            p.end_of_statement()?;
        } else if p.keyword("mul") {
            let (a, la, ca) = p.ident()?;
            let (b, lb, cb) = p.ident()?;
            p.sym('=')?;
            muls.push((a, la, ca, b, lb, cb, p.poly()?));
            p.end_of_statement()?;
        } else if p.keyword("top") {
            parse_top(p, &mut top)?;
        } else {
            return Err(p.err::<()>(&["`basis`", "`mul`", "`top`", "`}`"]).unwrap_err().into());
        }
        p.skip_newlines();
    }
    let mut basis = vec![("1".to_string(), 0u32)];
    basis.extend(decls.iter().map(|d| (d.name.clone(), d.degree)));
    let lookup = |n: &str, line: usize, col: usize| {
        seen.get(n).copied().ok_or_else(|| ParseError::UnknownSymbol {
            line,
            col,
            name: n.to_string(),
        })
    };
    let mut products = Vec::new();
    let mut first_line = (1, 1);
    for (i, (a, la, ca, b, lb, cb, poly)) in muls.iter().enumerate() {
        if i == 0 {
            first_line = (*la, *ca);
        }
        let left = lookup(a, *la, *ca)?;
        let right = lookup(b, *lb, *cb)?;
        let value = SparseVec::from_entries(resolve_fd(&seen, 0, poly)?);
        products.push(Product { left, right, value });
    }
    let algebra = FdAlgebra::new(basis, products).map_err(|e| located(e, first_line.0, first_line.1))?;
    if let Some(t) = top {
        if t != algebra.top_degree() {
            return Err(Error::InvalidArgument(format!(
                "declared top {t} but the algebra ends in degree {}",
                algebra.top_degree()
            )));
        }
    }
    Ok(ModelFile {
        name,
        kind: ModelKind::Fd { algebra },
    })
}

fn parse_biquotient_body(p: &mut Parser, name: String) -> Result<ModelFile> {
    let mut bh: Vec<Decl> = Vec::new();
    let mut qs: Vec<(Decl, RawPoly)> = Vec::new();
    let mut seen = HashMap::new();
    let mut top = None;
    while !p.at_sym('}') {
        if p.keyword("bh") {
            let d = decl(p)?;
            declare(&mut seen, &d, bh.len())?;
            if d.degree % 2 == 1 {
                return Err(ParseError::Invalid {
                    line: d.line,
                    col: d.col,
                    message: format!("`{}` must have even degree", d.name),
                }
                .into());
            }
            bh.push(d);
            p.end_of_statement()?;
        } else if p.keyword("q") {
            let d = decl(p)?;
            declare(&mut seen, &d, usize::MAX)?;
            if d.degree % 2 == 0 {
                return Err(ParseError::Invalid {
                    line: d.line,
                    col: d.col,
                    message: format!("`{}` must have odd degree", d.name),
                }
                .into());
            }
            let poly = if p.keyword("dbar") {
                p.sym('=')?;
                p.poly()?
            } else {
                RawPoly { terms: Vec::new() }
            };
            qs.push((d, poly));
            p.end_of_statement()?;
        } else if p.keyword("top") {
            parse_top(p, &mut top)?;
        } else {
            return Err(p.err::<()>(&["`bh`", "`q`", "`top`", "`}`"]).unwrap_err().into());
        }
        p.skip_newlines();
    }
    let bh_alg = FreeGca::new(bh.iter().map(|d| Generator::new(d.name.clone(), d.degree)).collect())?;
    let mut dbar = Vec::new();
    for (_, poly) in &qs {
        dbar.push(resolve(&bh_alg, poly)?);
    }
    let q = qs.iter().map(|(d, _)| (d.name.clone(), d.degree)).collect();
    let data = BiquotientData::new(bh_alg, q, dbar).map_err(|e| match &e {
        Error::DegreeMismatch { what, .. } => {
            let hit = qs.iter().find(|(d, _)| what.contains(&format!("({})", d.name)));
            match hit {
                Some((d, _)) => located(e, d.line, d.col),
                None => e,
            }
        }
        _ => e,
    })?;
    Ok(ModelFile {
        name,
        kind: ModelKind::Biquotient { data, top },
    })
}

fn write_top(out: &mut String, top: Option<u32>) {
    if let Some(t) = top {
        let _ = writeln!(out, "  top {t}");
    }
}

/// Renders a model in the input language; [`parse_model`] reads it back.
pub fn print_model(m: &ModelFile) -> String {
    let mut out = String::new();
    match &m.kind {
        ModelKind::Dga { dga, top } => {
            let _ = writeln!(out, "model {} {{", m.name);
            for (g, d) in dga.generators().iter().zip(dga.d_values()) {
                if d.is_zero() {
                    let _ = writeln!(out, "  gen {} : {}", g.name, g.degree);
                } else {
                    let _ = writeln!(out, "  gen {} : {}  d = {}", g.name, g.degree, d);
                }
            }
            write_top(&mut out, *top);
        }
        ModelKind::Fd { algebra } => {
            let _ = writeln!(out, "fd {} {{", m.name);
            for i in 0..algebra.dim() {
                if i != algebra.unit() {
                    let _ = writeln!(out, "  basis {} : {}", algebra.name(i), algebra.degree(i));
                }
            }
            for (i, j, v) in algebra.nonzero_products() {
                let _ = writeln!(
                    out,
                    "  mul {} {} = {}",
                    algebra.name(i),
                    algebra.name(j),
                    algebra.format_vec(&v)
                );
            }
            write_top(&mut out, Some(algebra.top_degree()));
        }
        ModelKind::Biquotient { data, top } => {
            let _ = writeln!(out, "biquotient {} {{", m.name);
            for g in data.bh.generators() {
                let _ = writeln!(out, "  bh {} : {}", g.name, g.degree);
            }
            for ((n, d), v) in data.q.iter().zip(&data.dbar) {
                if v.is_zero() {
                    let _ = writeln!(out, "  q {n} : {d}");
                } else {
                    let _ = writeln!(out, "  q {n} : {d}  dbar = {v}");
                }
            }
            write_top(&mut out, *top);
        }
    }
    out.push_str("}\n");
    out
}

/// Parses a polynomial in the given algebra.
pub fn parse_element(alg: &FreeGca, text: &str) -> Result<Element> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let poly = p.poly()?;
    p.skip_newlines();
    if p.peek().tok != Tok::Eof {
        return Err(p.err::<()>(&["end of input"]).unwrap_err().into());
    }
    Ok(resolve(alg, &poly)?)
}

/// Parses a linear combination of basis names of an [`FdAlgebra`].
pub fn parse_fd_vector(alg: &FdAlgebra, text: &str) -> Result<SparseVec> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let poly = p.poly()?;
    p.skip_newlines();
    if p.peek().tok != Tok::Eof {
        return Err(p.err::<()>(&["end of input"]).unwrap_err().into());
    }
    let names: HashMap<String, usize> = alg
        .names()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i))
        .collect();
    Ok(SparseVec::from_entries(resolve_fd(&names, alg.unit(), &poly)?))
}

/// Image lines `NAME -> POLY` of an automorphism of `H ⊗ H^*(T^d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismFile {
    pub torus_dim: u32,
    /// `(basis name, image)` in the tensor coordinates of `H ⊗ H^*(T^d)`.
    pub images: Vec<(String, SparseVec)>,
}

/// Parses
///
/// ```text
/// torus 2
/// h6 -> h6 + h4 x1 x2
/// ```
///
/// Each image mixes one basis name of `h` with torus variables `x1..xd`;
/// unlisted basis elements are fixed.
pub fn parse_automorphism(h: &FdAlgebra, text: &str) -> Result<AutomorphismFile> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    p.skip_newlines();
    if !p.keyword("torus") {
        return Err(p.err::<()>(&["`torus`"]).unwrap_err().into());
    }
    let (d, line, col) = p.small("torus dimension")?;
    if !(1..=16).contains(&d) {
        return Err(ParseError::Invalid {
            line,
            col,
            message: "torus dimension must be between 1 and 16".into(),
        }
        .into());
    }
    p.end_of_statement()?;
    p.skip_newlines();
    let torus = crate::taylor::torus_basis(d);
    let nt = torus.len();
    let names: HashMap<&str, usize> = h.names().iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut seen = BTreeSet::new();
    let mut images = Vec::new();
    while p.peek().tok != Tok::Eof {
        let (src, sl, sc) = p.ident()?;
        if !names.contains_key(src.as_str()) {
            return Err(ParseError::UnknownSymbol {
                line: sl,
                col: sc,
                name: src,
            }
            .into());
        }
        if !seen.insert(src.clone()) {
            return Err(ParseError::DuplicateGenerator {
                line: sl,
                col: sc,
                name: src,
            }
            .into());
        }
        p.sym('-')?;
        p.sym('>')?;
        let poly = p.poly()?;
        let mut entries = Vec::new();
        for (c, factors) in &poly.terms {
            let mut base = None;
            let mut mask = 0u32;
            let mut vars: Vec<u32> = Vec::new();
            // moving the basis element left past earlier torus variables
            let mut flips = 0u32;
            for (name, e, line, col) in factors {
                let var = name
                    .strip_prefix('x')
                    .and_then(|s| s.parse::<u32>().ok())
                    .filter(|j| (1..=d).contains(j) && !names.contains_key(name.as_str()));
                if let Some(j) = var {
                    if *e != 1 || mask & (1 << (j - 1)) != 0 {
                        mask = u32::MAX;
                        break;
                    }
                    mask |= 1 << (j - 1);
                    vars.push(j);
                } else if let Some(&b) = names.get(name.as_str()) {
                    if base.is_some() || *e != 1 {
                        return Err(ParseError::Invalid {
                            line: *line,
                            col: *col,
                            message: "each term needs at most one basis element".into(),
                        }
                        .into());
                    }
                    flips += vars.len() as u32 * h.degree(b);
                    base = Some(b);
                } else {
                    return Err(ParseError::UnknownSymbol {
                        line: *line,
                        col: *col,
                        name: name.clone(),
                    }
                    .into());
                }
            }
            if mask == u32::MAX {
                continue;
            }
            let mut inversions = 0;
            for a in 0..vars.len() {
                for b in a + 1..vars.len() {
                    if vars[a] > vars[b] {
                        inversions += 1;
                    }
                }
            }
            let b = base.unwrap_or(h.unit());
            let t = torus.index_of_mask(mask).expect("mask in range");
            let neg = (inversions + flips) % 2 == 1;
            entries.push((b * nt + t, if neg { -c.clone() } else { c.clone() }));
        }
        images.push((src, SparseVec::from_entries(entries)));
        p.end_of_statement()?;
        p.skip_newlines();
    }
    Ok(AutomorphismFile {
        torus_dim: d,
        images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SU6: &str = "\
model su6_su3su3 {
  gen y4 : 4
  gen y6 : 6
  gen x7 : 7  d = y4^2
  gen x9 : 9  d = 2 y4 y6
  gen x11 : 11  d = y6^2
  top 19
}
";

    #[test]
    fn parses_su6() {
        let m = parse_model(SU6).unwrap();
        let ModelKind::Dga { dga, top } = &m.kind else { panic!() };
        assert_eq!(dga.generators().len(), 5);
        assert_eq!(*top, Some(19));
        assert_eq!(print_model(&m), SU6);
    }

    #[test]
    fn separate_differential_statement() {
        let src = "model m {\n gen y4 : 4\n gen x7 : 7\n d x7 = y4 * y4\n}";
        let m = parse_model(src).unwrap();
        let ModelKind::Dga { dga, .. } = &m.kind else { panic!() };
        assert_eq!(dga.d_gen(1).to_string(), "y4^2");
    }

    #[test]
    fn zero_degree_rejected() {
        let err = parse_model("model m {\n  gen x : 0\n}").unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError::Invalid { line: 2, col: 7, .. })), "{err:?}");
    }

    #[test]
    fn unknown_symbol_located() {
        let err = parse_model("model m {\n  gen x7 : 7\n  d x7 = y4^2\n}").unwrap_err();
        assert_eq!(
            err,
            Error::Parse(ParseError::UnknownSymbol {
                line: 3,
                col: 10,
                name: "y4".into()
            })
        );
    }

    #[test]
    fn duplicate_generator() {
        let err = parse_model("model m {\n gen a : 3\n gen a : 5\n}").unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError::DuplicateGenerator { line: 3, .. })));
    }

    #[test]
    fn syntax_error_lists_expectations() {
        let err = parse_model("model m {\n gen a 3\n}").unwrap_err();
        match err {
            Error::Parse(ParseError::Syntax { line, col, expected, .. }) => {
                assert_eq!((line, col), (2, 8));
                assert_eq!(expected, vec!["`:`"]);
            }
            other => panic!("{other:?}"),
        }
        let err = parse_model("model m {\n blah\n}").unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError::Syntax { line: 2, col: 2, .. })));
    }

    #[test]
    fn d_squared_error_is_located() {
        let src = "model m {\n gen x:2\n gen y:3\n gen z:3 d = x^2\n gen a:4 d = x y\n gen b:5 d = x a\n}";
        let err = parse_model(src).unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError::Invalid { line: 6, .. })), "{err:?}");
    }

    #[test]
    fn rationals_and_signs() {
        let a = FreeGca::from_pairs(&[("x", 2), ("y", 3)]).unwrap();
        let e = parse_element(&a, "-1/2 x^2 - 3 x + 2/4").unwrap();
        assert_eq!(e.to_string(), "1/2 - 3 x - 1/2 x^2");
        assert_eq!(parse_element(&a, &e.to_string()).unwrap(), e);
        assert!(parse_element(&a, "1/0 x").is_err());
    }

    #[test]
    fn fd_round_trip() {
        let src = "fd cp2 {\n  basis x : 2\n  basis x2 : 4\n  mul x x = x2\n  top 4\n}\n";
        let m = parse_model(src).unwrap();
        assert_eq!(print_model(&m), src);
        let err = parse_model("fd bad {\n basis x : 2\n mul x x = x\n}").unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError::Invalid { line: 3, .. })), "{err:?}");
    }

    #[test]
    fn biquotient_round_trip() {
        let src = "biquotient s2 {\n  bh u : 2\n  q q3 : 3  dbar = u^2\n  top 2\n}\n";
        let m = parse_model(src).unwrap();
        assert_eq!(print_model(&m), src);
        let err = parse_model("biquotient b {\n bh u : 2\n q q3 : 3 dbar = q3\n}").unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError::UnknownSymbol { .. })));
    }

    #[test]
    fn automorphism_file() {
        let h = crate::fd::exterior(&[3, 5]);
        let f = parse_automorphism(&h, "torus 2\n e2 -> e2 + x2 x1 e1\n").unwrap();
        assert_eq!(f.torus_dim, 2);
        // x1x2 has index 3 in the torus basis and x2 x1 = -x1 x2
        let e1 = h.index_of("e1").unwrap();
        let e2 = h.index_of("e2").unwrap();
        assert_eq!(
            f.images[0].1,
            SparseVec::from_entries([(e1 * 4 + 3, -Q::one()), (e2 * 4, Q::one())])
        );
        let err = parse_automorphism(&h, "torus 2\n e2 -> e2 + x3 e1\n").unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError::UnknownSymbol { .. })));
    }
}
