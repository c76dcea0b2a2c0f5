//! The `rho` command line. [`run_cli`] does all the work and returns the
//! text to print, so the binary is a thin wrapper and tests can call it
//! in-process.
//!
//! Exit codes: 0 on success, 1 when the computation reports an error,
//! 2 when the arguments are malformed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use rho_core::catalog;
use rho_core::dga::{
    cartan_model, check_dga_morphism, cohomology, lower_grading, CohomologyRing, Dga,
};
use rho_core::derivation::{
    chain_derivation_space, derivation_space, induced_on_cohomology, rigidity_report, Derivation,
    Mode, RigidityQuery,
};
use rho_core::dsl::{parse_automorphism, parse_element, parse_model, print_model, ModelFile, ModelKind};
use rho_core::fd::FdAlgebra;
use rho_core::gca::AlgebraMorphism;
use rho_core::linalg::{Echelon, SparseVec};
use rho_core::report::{self, Report};
use rho_core::taylor::{peel, torus_basis, ProductAutomorphism};
use rho_core::{Error, Result};

/// What the process should print and return.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "rho", version, about = "Exact rational homotopy computations")]
struct Cli {
    /// Emit a JSON report instead of tables
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Betti numbers and cocycle representatives
    Cohomology {
        /// Catalog entry or model file
        model: String,
        /// Defaults to the declared `top`
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// Structure constants of the cohomology ring
    Ring { model: String },
    /// Derivations of the cohomology ring
    Derivations {
        model: String,
        #[arg(long, allow_negative_numbers = true, required_unless_present = "all_negative")]
        degree: Option<i64>,
        /// Every degree from minus the formal dimension to -1
        #[arg(long, conflicts_with = "degree")]
        all_negative: bool,
    },
    /// Derivations of the model commuting with the differential
    ChainDerivations {
        model: String,
        #[arg(long, allow_negative_numbers = true)]
        degree: i64,
        /// Also report the induced derivations of cohomology
        #[arg(long)]
        induced: bool,
    },
    /// Whether negative derivations kill the characteristic subspace
    Rigidity {
        model: String,
        #[arg(long)]
        torus_dim: u32,
        /// Bundle rank k
        #[arg(long, required_unless_present = "class_h")]
        rank: Option<u32>,
        #[arg(long, value_enum, default_value_t = ModeArg::Cohomology)]
        mode: ModeArg,
        /// Check all negative degrees against all of H^even
        #[arg(long = "class-H")]
        class_h: bool,
    },
    /// The Cartan model of a biquotient
    Cartan { model: String },
    /// Betti numbers split by word length in the q generators
    LowerGrading {
        model: String,
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// Factor an automorphism of H ⊗ H*(T^d) into derivation automorphisms
    Peel {
        model: String,
        /// File with a `torus d` header and `NAME -> POLY` lines
        automorphism: PathBuf,
        /// Strip a nontrivial constant term first
        #[arg(long)]
        normalize: bool,
    },
    /// Whether generator images define a map of differential algebras
    MorphismCheck {
        source: String,
        target: String,
        /// Image of one source generator; unlisted generators map to the
        /// target generator of the same name
        #[arg(long = "image", value_name = "GEN=POLY")]
        images: Vec<String>,
    },
    /// Built-in models
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    Show { name: String },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Model,
    Cohomology,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Model => Mode::Model,
            ModeArg::Cohomology => Mode::Cohomology,
        }
    }
}

struct Output {
    results: Value,
    text: String,
    inputs: String,
}

/// Runs one command. `args` includes the program name.
pub fn run_cli<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: rendered }
            } else {
                Outcome { code: 0, stdout: rendered, stderr: String::new() }
            };
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli.command) {
        Ok(out) => {
            let stdout = if cli.json {
                Report::new(echo, &out.inputs, out.results).to_json() + "\n"
            } else {
                out.text
            };
            Outcome { code: 0, stdout, stderr: String::new() }
        }
        Err(e) => {
            let stdout = if cli.json {
                let results = json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } });
                Report::new(echo, "", results).to_json() + "\n"
            } else {
                String::new()
            };
            Outcome { code: 1, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = match e {
        Error::Parse(p) => format!("{p:?}"),
        other => format!("{other:?}"),
    };
    dbg.chars().take_while(|c| c.is_alphanumeric()).collect()
}

fn execute(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Cohomology { model, max_degree } => cmd_cohomology(model, *max_degree),
        Command::Ring { model } => cmd_ring(model),
        Command::Derivations { model, degree, all_negative } => cmd_derivations(model, *degree, *all_negative),
        Command::ChainDerivations { model, degree, induced } => cmd_chain(model, *degree, *induced),
        Command::Rigidity { model, torus_dim, rank, mode, class_h } => {
            let q = RigidityQuery {
                torus_dim: *torus_dim,
                rank: rank.unwrap_or(0),
                mode: (*mode).into(),
                class_h: *class_h,
            };
            cmd_rigidity(model, &q)
        }
        Command::Cartan { model } => cmd_cartan(model),
        Command::LowerGrading { model, max_degree } => cmd_lower_grading(model, *max_degree),
        Command::Peel { model, automorphism, normalize } => cmd_peel(model, automorphism, *normalize),
        Command::MorphismCheck { source, target, images } => cmd_morphism(source, target, images),
        Command::Catalog { action } => cmd_catalog(action),
    }
}

/// A catalog name or a path to a model file. Existing files win.
fn load(arg: &str) -> Result<ModelFile> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {arg}: {e}")))?;
        parse_model(&text)
    } else {
        catalog::catalog(arg)
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn dga_of(m: &ModelFile) -> Result<Option<Dga>> {
    match &m.kind {
        ModelKind::Dga { dga, .. } => Ok(Some(dga.clone())),
        ModelKind::Biquotient { data, .. } => Ok(Some(cartan_model(data)?)),
        ModelKind::Fd { .. } => Ok(None),
    }
}

fn require_dga(m: &ModelFile) -> Result<Dga> {
    dga_of(m)?.ok_or_else(|| {
        Error::InvalidArgument(format!("`{}` is a finite-dimensional algebra, not a model", m.name))
    })
}

fn require_top(m: &ModelFile) -> Result<u32> {
    m.top()
        .ok_or_else(|| Error::InvalidArgument(format!("`{}` declares no `top`", m.name)))
}

/// The cohomology ring, with the model computation when there is one.
fn ring_of(m: &ModelFile) -> Result<(FdAlgebra, Option<CohomologyRing>)> {
    match &m.kind {
        ModelKind::Fd { algebra } => Ok((algebra.clone(), None)),
        _ => {
            let dga = require_dga(m)?;
            let ring = CohomologyRing::of_model(&dga, require_top(m)?)?;
            Ok((ring.ring().clone(), Some(ring)))
        }
    }
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_derivation(text: &mut String, indent: &str, d: &Derivation) {
    let parts: Vec<String> = d.describe().into_iter().map(|(b, v)| format!("{b} ↦ {v}")).collect();
    if parts.is_empty() {
        let _ = writeln!(text, "{indent}0");
    } else {
        let _ = writeln!(text, "{indent}{}", parts.join(", "));
    }
}

fn cmd_cohomology(arg: &str, max_degree: Option<u32>) -> Result<Output> {
    let m = load(arg)?;
    let inputs = print_model(&m);
    let mut text = String::new();
    let results = match &m.kind {
        ModelKind::Fd { algebra } => {
            let mut reps = Map::new();
            for n in algebra.nonzero_degrees() {
                let names: Vec<Value> = algebra
                    .basis_in_degree(n as i64)
                    .iter()
                    .map(|&i| Value::String(algebra.name(i).to_string()))
                    .collect();
                reps.insert(n.to_string(), Value::Array(names));
            }
            let _ = writeln!(text, "{} (finite-dimensional, d = 0)", m.name);
            let _ = writeln!(text, "betti: {}", join(algebra.betti()));
            json!({
                "max_degree": algebra.top_degree(),
                "betti": algebra.betti(),
                "nonzero": algebra.nonzero_degrees().collect::<Vec<_>>(),
                "representatives": reps,
                "generators": [],
            })
        }
        _ => {
            let dga = require_dga(&m)?;
            let n = match max_degree.or(m.top()) {
                Some(n) => n,
                None => {
                    return Err(Error::InvalidArgument(
                        "--max-degree is required when the model declares no `top`".into(),
                    ))
                }
            };
            let res = cohomology(&dga, n);
            let _ = writeln!(text, "{}, degrees 0..={n}", m.name);
            let _ = writeln!(text, "{:>4}  {:>4}  representatives", "n", "b_n");
            for k in res.nonzero_degrees() {
                let reps: Vec<String> = res.representatives(k).iter().map(|z| z.to_string()).collect();
                let _ = writeln!(text, "{k:>4}  {:>4}  {}", res.betti(k), reps.join("; "));
            }
            let _ = writeln!(text, "nonzero degrees: {}", join(res.nonzero_degrees()));
            report::cohomology_json(&res)
        }
    };
    Ok(Output { results, text, inputs })
}

fn cmd_ring(arg: &str) -> Result<Output> {
    let m = load(arg)?;
    let (h, _) = ring_of(&m)?;
    let mut text = String::new();
    let _ = writeln!(text, "{}: betti {}", m.name, join(h.betti()));
    let basis: Vec<String> = (0..h.dim()).map(|i| format!("{}({})", h.name(i), h.degree(i))).collect();
    let _ = writeln!(text, "basis: {}", basis.join(" "));
    for (i, j, v) in h.nonzero_products() {
        if h.degree(i) == 0 {
            continue;
        }
        let _ = writeln!(text, "  {} · {} = {}", h.name(i), h.name(j), h.format_vec(&v));
    }
    Ok(Output { results: report::ring_json(&h), text, inputs: print_model(&m) })
}

fn cmd_derivations(arg: &str, degree: Option<i64>, all_negative: bool) -> Result<Output> {
    let m = load(arg)?;
    let (h, _) = ring_of(&m)?;
    let degrees: Vec<i64> = if all_negative {
        (-(h.top_degree().max(1) as i64)..=-1).collect()
    } else {
        degree.into_iter().collect()
    };
    let spaces: BTreeMap<i64, Vec<Derivation>> =
        degrees.iter().map(|&n| (n, derivation_space(&h, n))).collect();
    let mut text = String::new();
    for (n, space) in &spaces {
        let _ = writeln!(text, "degree {n}: dim {}", space.len());
        for d in space {
            write_derivation(&mut text, "  ", d);
        }
    }
    let mut results = report::derivation_space_json(&spaces);
    results["betti"] = json!(h.betti());
    Ok(Output { results, text, inputs: print_model(&m) })
}

fn cmd_chain(arg: &str, degree: i64, induced: bool) -> Result<Output> {
    let m = load(arg)?;
    let dga = require_dga(&m)?;
    let space = chain_derivation_space(&dga, degree);
    let mut text = String::new();
    let _ = writeln!(text, "chain derivations of degree {degree}: dim {}", space.len());
    for d in &space {
        let parts: Vec<String> = dga
            .generators()
            .iter()
            .zip(d.images())
            .filter(|(_, v)| !v.is_zero())
            .map(|(g, v)| format!("{} ↦ {v}", g.name))
            .collect();
        let _ = writeln!(text, "  {}", if parts.is_empty() { "0".into() } else { parts.join(", ") });
    }
    let mut results = json!({
        "degree": degree,
        "dims": { degree.to_string(): space.len() },
        "derivations": space.iter().map(report::chain_derivation_json).collect::<Vec<_>>(),
        "generators": report::generators_json(&dga),
    });
    if induced {
        let ring = CohomologyRing::of_model(&dga, require_top(&m)?)?;
        let images: Vec<Derivation> = space
            .iter()
            .map(|d| induced_on_cohomology(&ring, d))
            .collect::<Result<_>>()?;
        let rank = Echelon::from_vectors(images.iter().map(Derivation::flatten)).rank();
        let _ = writeln!(text, "induced on cohomology: rank {rank}");
        for d in images.iter().filter(|d| !d.is_zero()) {
            write_derivation(&mut text, "  ", d);
        }
        results["induced"] = Value::Array(images.iter().map(report::derivation_json).collect());
        results["induced_rank"] = json!(rank);
        results["betti"] = json!(ring.ring().betti());
    }
    Ok(Output { results, text, inputs: print_model(&m) })
}

fn cmd_rigidity(arg: &str, q: &RigidityQuery) -> Result<Output> {
    let m = load(arg)?;
    let (h, ring) = ring_of(&m)?;
    let model = match q.mode {
        Mode::Model => ring.as_ref().map(CohomologyRing::result),
        Mode::Cohomology => None,
    };
    let r = rigidity_report(&h, q, model)?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "verdict: {} (mode {}, degrees {}..={})",
        r.verdict.as_str(),
        r.mode.as_str(),
        r.degrees.0,
        r.degrees.1
    );
    let target = if q.class_h {
        "H^even".to_string()
    } else {
        format!("Char(H, {})", q.rank)
    };
    let _ = writeln!(text, "target: {target}, dim {}", r.target.dim());
    for (n, d) in &r.dims {
        let _ = writeln!(text, "  degree {n}: {d} derivation(s)");
    }
    for w in &r.witnesses {
        let _ = writeln!(
            text,
            "witness in degree {}: {} ↦ {}",
            w.derivation.degree(),
            h.format_vec(&w.element),
            h.format_vec(&w.image)
        );
        write_derivation(&mut text, "  D: ", &w.derivation);
    }
    if let Some(note) = &r.note {
        let _ = writeln!(text, "note: {note}");
    }
    let mut results = report::rigidity_json(&h, &r);
    results["betti"] = json!(h.betti());
    Ok(Output { results, text, inputs: print_model(&m) })
}

fn biquotient(m: &ModelFile) -> Result<&rho_core::dga::BiquotientData> {
    match &m.kind {
        ModelKind::Biquotient { data, .. } => Ok(data),
        _ => Err(Error::InvalidArgument(format!("`{}` is not a biquotient", m.name))),
    }
}

fn cmd_cartan(arg: &str) -> Result<Output> {
    let m = load(arg)?;
    let dga = cartan_model(biquotient(&m)?)?;
    let printed = print_model(&ModelFile {
        name: format!("{}_cartan", m.name),
        kind: ModelKind::Dga { dga: dga.clone(), top: m.top() },
    });
    let results = json!({ "generators": report::generators_json(&dga), "source": printed });
    Ok(Output { results, text: printed, inputs: print_model(&m) })
}

fn cmd_lower_grading(arg: &str, max_degree: Option<u32>) -> Result<Output> {
    let m = load(arg)?;
    let data = biquotient(&m)?;
    let n = match max_degree.or(m.top()) {
        Some(n) => n,
        None => return Err(Error::InvalidArgument("--max-degree is required".into())),
    };
    let res = cohomology(&cartan_model(data)?, n);
    let g = lower_grading(data, &res)?;
    let mut text = String::new();
    let _ = writeln!(text, "{:>4}  {:>10}  {:>4}", "n", "wordlength", "dim");
    for ((deg, k), d) in &g.dims {
        let _ = writeln!(text, "{deg:>4}  {k:>10}  {d:>4}");
    }
    let mut results = report::lower_grading_json(&g);
    results["betti"] = json!(res.betti_vector());
    Ok(Output { results, text, inputs: print_model(&m) })
}

fn cmd_peel(arg: &str, path: &Path, normalize: bool) -> Result<Output> {
    let m = load(arg)?;
    let (h, _) = ring_of(&m)?;
    let source = read_file(path)?;
    let file = parse_automorphism(&h, &source)?;
    let torus = torus_basis(file.torus_dim);
    let nt = torus.len();
    let mut images: Vec<SparseVec> = (0..h.dim()).map(|b| SparseVec::unit(b * nt)).collect();
    for (name, v) in file.images {
        let b = h.index_of(&name).ok_or(Error::UnknownSymbol(name))?;
        images[b] = v;
    }
    let auto = ProductAutomorphism::from_tensor_images(&h, &torus, &images)?;
    let p = peel(&auto, normalize)?;
    let mut text = String::new();
    if p.normalization.is_some() {
        let _ = writeln!(text, "normalized by the inverse of the constant term");
    }
    if p.steps.is_empty() {
        let _ = writeln!(text, "no corrections: the automorphism is constant");
    }
    for (i, d) in &p.steps {
        let _ = writeln!(text, "{} (degree {}):", torus.name(*i), d.degree());
        write_derivation(&mut text, "  ", d);
    }
    Ok(Output {
        results: report::peel_json(&h, &torus, &p),
        text,
        inputs: print_model(&m) + &source,
    })
}

fn cmd_morphism(source: &str, target: &str, assignments: &[String]) -> Result<Output> {
    let sm = load(source)?;
    let tm = load(target)?;
    let s = require_dga(&sm)?;
    let t = require_dga(&tm)?;
    let mut given = BTreeMap::new();
    for arg in assignments {
        let (name, poly) = arg
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("`{arg}` is not GEN=POLY")))?;
        let name = name.trim();
        if s.algebra().index_of(name).is_none() {
            return Err(Error::UnknownSymbol(name.to_string()));
        }
        given.insert(name.to_string(), parse_element(t.algebra(), poly)?);
    }
    let images = s
        .generators()
        .iter()
        .map(|g| match given.remove(&g.name) {
            Some(e) => Ok(e),
            None => t
                .algebra()
                .var(&g.name)
                .map_err(|_| Error::InvalidArgument(format!("no image for generator `{}`", g.name))),
        })
        .collect::<Result<Vec<_>>>()?;
    let phi = AlgebraMorphism::new(s.algebra().clone(), t.algebra().clone(), images)?;
    let commutes = check_dga_morphism(&s, &t, &phi)?;
    let mut shown = Map::new();
    let mut text = String::new();
    for (g, e) in s.generators().iter().zip(phi.images()) {
        shown.insert(g.name.clone(), Value::String(e.to_string()));
        let _ = writeln!(text, "  {} ↦ {e}", g.name);
    }
    let _ = writeln!(text, "commutes with d: {}", if commutes { "yes" } else { "no" });
    Ok(Output {
        results: json!({ "commutes": commutes, "images": shown }),
        text,
        inputs: print_model(&sm) + &print_model(&tm),
    })
}

fn cmd_catalog(action: &CatalogAction) -> Result<Output> {
    match action {
        CatalogAction::List => {
            let mut text = String::new();
            let width = catalog::entries().iter().map(|e| e.usage().len()).max().unwrap_or(0);
            let entries: Vec<Value> = catalog::entries()
                .iter()
                .map(|e| {
                    let _ = writeln!(text, "{:<width$}  {:<10}  {}", e.usage(), e.kind, e.description);
                    json!({ "name": e.usage(), "kind": e.kind, "description": e.description })
                })
                .collect();
            Ok(Output { results: json!({ "entries": entries }), text, inputs: String::new() })
        }
        CatalogAction::Show { name } => {
            let src = catalog::source(name)?;
            Ok(Output {
                results: json!({ "name": name, "source": src }),
                text: src.clone(),
                inputs: src,
            })
        }
    }
}
