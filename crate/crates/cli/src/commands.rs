use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use rayon::prelude::*;
use serde_json::{json, Value};

use subsys_core::angles::{classify_two_system, halmos_decompose};
use subsys_core::catalog::CatalogKey;
use subsys_core::coxeter::{check_duality, phi_minus, phi_perp, phi_plus, phi_zero, Clause, CoxeterResult};
use subsys_core::decompose::{are_isomorphic, decompose, Isomorphism, LeafStatus};
use subsys_core::subspace::ANGLE_THRESHOLD;
use subsys_core::system::{DefectReport, IntersectionDiagram};
use subsys_core::toeplitz::{
    exotic_hom_decay, Certification, exotic_report, fredholm_index, operator_index, region_classify, single_operator_defect,
    LaurentSymbol, MIN_GRID,
};
use subsys_core::verify::{self, identify_leaf, ClassificationSweep, LeafMatch};
use subsys_core::{Error, Field, GaussRat, QSystem, SubspaceSystem};

use crate::file::{matrix_rows, Loaded, SystemFile};
use crate::report::{CliError, Report, Status};

/// Overrides the default numeric tolerance (`1e-6`) when no `--tol` is given.
pub const TOL_ENV: &str = "SUBSYS_TOL";

#[derive(Parser, Debug)]
#[command(name = "subsys", version, about = "Systems of subspaces: defect, decomposition, Coxeter functors, Toeplitz indices")]
pub struct Cli {
    /// Emit the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Canonical catalog systems.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
    /// Defect of a four-subspace system by both formulas.
    Defect {
        /// System file, or `-` for stdin.
        file: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Decomposition into indecomposable summands with an exact witness.
    Decompose {
        file: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decides whether two systems are isomorphic.
    Isom {
        a: String,
        b: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Coxeter functors and the duality check.
    Coxeter {
        op: CoxeterOp,
        file: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Intersection diagram: edge i–j when Ei ∩ Ej = 0.
    Diagram {
        file: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Halmos decomposition and principal angles of every pair.
    Angles { file: String },
    /// Toeplitz symbols and the shift-operator laboratory.
    Toeplitz {
        #[command(subcommand)]
        action: ToeplitzCmd,
    },
    /// Batch verification sweeps.
    Verify {
        #[command(subcommand)]
        action: VerifyCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogCmd {
    /// Writes the system named by a catalog key as a system file.
    Build { key: String },
    /// Lists catalog keys (four-subspace entries up to `k`).
    List {
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CoxeterOp {
    Plus,
    Minus,
    Perp,
    Zero,
    Duality,
}

#[derive(Subcommand, Debug)]
pub enum ToeplitzCmd {
    /// Fredholm index of the Toeplitz operator with the given symbol.
    Index {
        symbol: String,
        #[arg(long, default_value_t = MIN_GRID)]
        grid: usize,
    },
    /// Defect of the single-operator system of the symbol's operator.
    Defect { symbol: String },
    /// Defect of the system of S + αI for each α.
    Regions {
        #[arg(long, required = true, num_args = 1.., allow_hyphen_values = true)]
        alpha: Vec<String>,
    },
    /// Truncated exotic system S_γ, optionally with Hom(S_γ, S_β) dimensions.
    Exotic {
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "4,8")]
        sizes: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Defect of every four-subspace catalog entry against its label.
    GpRange {
        #[arg(long, default_value_t = 4)]
        k_even: usize,
        #[arg(long, default_value_t = 4)]
        k_odd: usize,
    },
    /// Every catalog entry decomposes as a single certified summand.
    GpComplete {
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random three-subspace systems split into catalog summands.
    ThreeTypes {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_dim: usize,
        #[arg(long, default_value_t = 1000)]
        seed: u64,
    },
    /// Random two-subspace systems split into the four catalog types.
    TwoTypes {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_dim: usize,
        #[arg(long, default_value_t = 1000)]
        seed: u64,
    },
}

/// Result of [`run`]: exit status and what goes to stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (without the program name) and executes the command.
pub fn run<S: AsRef<str>>(args: &[S], stdin: &mut dyn Read) -> Outcome {
    let argv = std::iter::once("subsys").chain(args.iter().map(|a| a.as_ref()));
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { crate::report::EXIT_PARSE } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let echo: Vec<&str> = args.iter().map(|a| a.as_ref()).collect();
    let mut ctx = Ctx { stdin, stdin_used: false, echo: echo.join(" ") };
    match execute(&cli.command, &mut ctx) {
        Ok(report) => Outcome { code: report.status.code(), stdout: report.render(cli.json), stderr: String::new() },
        Err(e) => Outcome { code: e.code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
    echo: String,
}

impl Ctx<'_> {
    fn read(&mut self, path: &str) -> Result<String, CliError> {
        if path == "-" {
            if std::mem::replace(&mut self.stdin_used, true) {
                return Err(CliError::Usage("stdin can be read only once".into()));
            }
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
        }
    }

    fn load(&mut self, path: &str) -> Result<SystemFile, CliError> {
        Ok(self.read(path)?.parse()?)
    }

    fn load_exact(&mut self, path: &str) -> Result<(SystemFile, QSystem), CliError> {
        let f = self.load(path)?;
        match f.load() {
            Loaded::Exact(s) => Ok((f, s)),
            Loaded::Float(_) => Err(Error::ExactOnly.into()),
        }
    }

    fn report(&self, result: Value, text: String) -> Report {
        Report::new(&self.echo, result, text)
    }
}

/// `--tol`, then the environment override, then the library default.
pub fn tolerance(flag: Option<f64>) -> Result<f64, CliError> {
    let t = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{TOL_ENV}={v} is not a number")))?,
            Err(_) => ANGLE_THRESHOLD,
        },
    };
    if !(t > 0.0 && t.is_finite()) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {t}")));
    }
    Ok(t)
}

fn execute(cmd: &Command, ctx: &mut Ctx) -> Result<Report, CliError> {
    match cmd {
        Command::Catalog { action: CatalogCmd::Build { key } } => {
            let key: CatalogKey = key.parse()?;
            let file = SystemFile::from_exact(&key.build()?).with_meta("source", key.to_string());
            Ok(ctx.report(file.to_json(), file.to_text()))
        }
        Command::Catalog { action: CatalogCmd::List { k } } => {
            let keys: Vec<String> = verify::full_catalog(*k).iter().map(|k| k.to_string()).collect();
            let text = keys.join("\n");
            Ok(ctx.report(json!(keys), text))
        }
        Command::Defect { file, tol } => defect_cmd(ctx, file, *tol),
        Command::Decompose { file, seed } => decompose_cmd(ctx, file, *seed),
        Command::Isom { a, b, seed } => isom_cmd(ctx, a, b, *seed),
        Command::Coxeter { op, file, seed } => coxeter_cmd(ctx, *op, file, *seed),
        Command::Diagram { file, tol } => diagram_cmd(ctx, file, *tol),
        Command::Angles { file } => angles_cmd(ctx, file),
        Command::Toeplitz { action } => toeplitz_cmd(ctx, action),
        Command::Verify { action } => verify_cmd(ctx, action),
    }
}

fn source_of(f: &SystemFile) -> Value {
    f.metadata.get("source").map_or(Value::Null, |s| json!(s))
}

fn source_line(f: &SystemFile) -> String {
    f.metadata.get("source").map_or(String::new(), |s| format!("source {s}\n"))
}

fn rat(r: Rational64) -> String {
    r.to_string()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn defect_json(r: &DefectReport) -> Value {
    json!({
        "dims": r.dims,
        "intersections": r.m,
        "sum_codims": r.nperp,
        "defect": rat(r.defect),
        "quasi": rat(r.quasi),
        "consistent": r.consistent,
    })
}

fn defect_cmd(ctx: &mut Ctx, path: &str, tol: Option<f64>) -> Result<Report, CliError> {
    let f = ctx.load(path)?;
    let (r, used) = match f.load() {
        Loaded::Exact(s) => (s.defect()?, None),
        Loaded::Float(s) => {
            let t = tolerance(tol)?;
            (s.defect_with_threshold(t)?, Some(t))
        }
    };
    let mut result = defect_json(&r);
    result["source"] = source_of(&f);
    let text = format!(
        "{}dims {}\ndefect {}\nquasi {}\nconsistent {}\n",
        source_line(&f),
        join(&r.dims),
        r.defect,
        r.quasi,
        r.consistent
    );
    let status = if r.consistent { Status::Ok } else { Status::Invariant };
    Ok(ctx.report(result, text).tolerance(used).status(status))
}

fn match_json(m: &LeafMatch) -> (Value, String) {
    match m {
        LeafMatch::Catalog { key, .. } => (json!({"catalog": key.to_string()}), format!("≅ {key}")),
        LeafMatch::OverC { eigenvalues, residual, note } => {
            let ev: Vec<String> = eigenvalues.iter().map(|z| format!("{z}")).collect();
            (json!({"over_c": {"eigenvalues": ev, "residual": residual, "note": note}}), format!("splits over C ({note})"))
        }
        LeafMatch::Unmatched(why) => (json!({"unmatched": why}), format!("unmatched ({why})")),
    }
}

fn decompose_cmd(ctx: &mut Ctx, path: &str, seed: u64) -> Result<Report, CliError> {
    let (f, s) = ctx.load_exact(path)?;
    let tree = decompose(&s, seed)?;
    // The witness must carry the input onto the direct sum of the leaves.
    if s.transform(&tree.witness)? != tree.direct_sum(s.n()) {
        return Err(Error::Invariant("decomposition witness does not verify".into()).into());
    }
    let mut status = Status::Ok;
    let mut comps = Vec::new();
    let mut text = format!("{}components {}\n", source_line(&f), tree.components.len());
    for (idx, leaf) in tree.components.iter().enumerate() {
        let (state, state_text) = match &leaf.status {
            LeafStatus::Indecomposable => (json!("indecomposable"), "indecomposable".to_string()),
            LeafStatus::SplitsOnlyOverC(w) => {
                status = status.and(Status::Uncertified);
                let ev: Vec<String> = w.eigenvalues.iter().map(|z| format!("{z}")).collect();
                (
                    json!({"splits_only_over_c": {"polynomial": w.polynomial.to_string(), "eigenvalues": ev,
                        "idempotent_residual": w.idempotent_residual, "commutator_residual": w.commutator_residual}}),
                    format!("splits only over C (minimal polynomial {})", w.polynomial),
                )
            }
            LeafStatus::Uncertified(why) => {
                status = status.and(Status::Uncertified);
                (json!({"uncertified": why}), format!("uncertified ({why})"))
            }
        };
        let (id, id_text) = match_json(&identify_leaf(leaf, seed)?);
        let sys = &leaf.system;
        text += &format!(
            "component {}: ambient {}, dims {}, {}, {}\n",
            idx + 1,
            sys.ambient_dim(),
            join(&sys.dims()),
            state_text,
            id_text
        );
        comps.push(json!({
            "ambient_dim": sys.ambient_dim(),
            "dims": sys.dims(),
            "status": state,
            "identified": id,
            "system": SystemFile::from_exact(sys).to_json(),
        }));
    }
    let w = matrix_rows(&tree.witness);
    text += "witness\n";
    for r in &w {
        text += &format!("  {r}\n");
    }
    let result = json!({"source": source_of(&f), "components": comps, "witness": w});
    Ok(ctx.report(result, text).seed(seed).status(status))
}

fn isom_cmd(ctx: &mut Ctx, a: &str, b: &str, seed: u64) -> Result<Report, CliError> {
    let (_, s) = ctx.load_exact(a)?;
    let (_, t) = ctx.load_exact(b)?;
    let (result, text, status) = match are_isomorphic(&s, &t, seed)? {
        Isomorphism::Witness(w) => {
            if !s.is_isomorphism(&t, &w) {
                return Err(Error::Invariant("isomorphism witness does not verify".into()).into());
            }
            let rows = matrix_rows(&w);
            let text = format!("isomorphic\nwitness\n{}", rows.iter().map(|r| format!("  {r}\n")).collect::<String>());
            (json!({"verdict": "isomorphic", "witness": rows}), text, Status::Ok)
        }
        Isomorphism::NotIsomorphic(why) => {
            (json!({"verdict": "not-isomorphic", "reason": why}), format!("not isomorphic: {why}\n"), Status::Ok)
        }
        Isomorphism::Undecided(why) => {
            (json!({"verdict": "undecided", "reason": why}), format!("undecided: {why}\n"), Status::Uncertified)
        }
    };
    Ok(ctx.report(result, text).seed(seed).status(status))
}

fn functor<F: Field>(op: CoxeterOp, s: &SubspaceSystem<F>) -> Result<SubspaceSystem<F>, CliError> {
    let take = |r: subsys_core::Result<CoxeterResult<F>>| r.map(|r| r.system);
    Ok(match op {
        CoxeterOp::Plus => take(phi_plus(s))?,
        CoxeterOp::Minus => take(phi_minus(s))?,
        CoxeterOp::Zero => take(phi_zero(s))?,
        CoxeterOp::Perp => phi_perp(s),
        CoxeterOp::Duality => unreachable!("handled separately"),
    })
}

fn clause_json(c: &Clause) -> Value {
    match c {
        Clause::Skipped => json!("skipped"),
        Clause::Passed => json!("passed"),
        Clause::Failed(why) => json!({"failed": why}),
    }
}

fn coxeter_cmd(ctx: &mut Ctx, op: CoxeterOp, path: &str, seed: u64) -> Result<Report, CliError> {
    if let CoxeterOp::Duality = op {
        let (f, s) = ctx.load_exact(path)?;
        let r = check_duality(&s, seed)?;
        let clauses = [
            ("minus_plus", &r.minus_plus),
            ("plus_minus", &r.plus_minus),
            ("defect_plus", &r.defect_plus),
            ("defect_minus", &r.defect_minus),
            ("plus_indecomposable", &r.plus_indecomposable),
            ("minus_indecomposable", &r.minus_indecomposable),
        ];
        let mut text = format!("{}reduced_above {}\nreduced_below {}\n", source_line(&f), r.reduced_above, r.reduced_below);
        let mut obj = serde_json::Map::new();
        for (name, c) in clauses {
            text += &format!("{name} {}\n", match c {
                Clause::Skipped => "skipped".to_string(),
                Clause::Passed => "passed".to_string(),
                Clause::Failed(why) => format!("FAILED: {why}"),
            });
            obj.insert(name.to_string(), clause_json(c));
        }
        let result = json!({
            "source": source_of(&f),
            "reduced_above": r.reduced_above,
            "reduced_below": r.reduced_below,
            "clauses": obj,
            "witness": r.witness.as_ref().map(matrix_rows),
            "passed": r.passed(),
        });
        let status = if r.passed() { Status::Ok } else { Status::Invariant };
        return Ok(ctx.report(result, text).seed(seed).status(status));
    }
    let f = ctx.load(path)?;
    let name = format!("{op:?}").to_lowercase();
    let out = match f.load() {
        Loaded::Exact(s) => SystemFile::from_exact(&functor(op, &s)?),
        Loaded::Float(s) => SystemFile::from_float(&functor(op, &s)?),
    };
    let mut out = out.with_meta("functor", name);
    if let Some(src) = f.metadata.get("source") {
        out = out.with_meta("source", src.clone());
    }
    Ok(ctx.report(out.to_json(), out.to_text()))
}

fn diagram_json(d: &IntersectionDiagram) -> (Value, String) {
    let edges: Vec<[usize; 2]> = d.edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect();
    let degrees: Vec<usize> = (0..d.n).map(|v| d.degree(v)).collect();
    let text = format!(
        "vertices {}\nedges {}\ndegrees {}\nconnected {}\n",
        d.n,
        edges.iter().map(|[a, b]| format!("{a}-{b}")).collect::<Vec<_>>().join(" "),
        join(&degrees),
        d.connected
    );
    (json!({"vertices": d.n, "edges": edges, "degrees": degrees, "connected": d.connected}), text)
}

fn diagram_cmd(ctx: &mut Ctx, path: &str, tol: Option<f64>) -> Result<Report, CliError> {
    let f = ctx.load(path)?;
    let (d, used) = match f.load() {
        Loaded::Exact(s) => (s.intersection_diagram(), None),
        Loaded::Float(s) => {
            let t = tolerance(tol)?;
            (s.intersection_diagram_with_threshold(t), Some(t))
        }
    };
    let (mut result, text) = diagram_json(&d);
    result["source"] = source_of(&f);
    Ok(ctx.report(result, source_line(&f) + &text).tolerance(used))
}

fn angles_of<F: Field>(s: &SubspaceSystem<F>, names: &[String]) -> Result<(Value, String), CliError> {
    let mut pairs = Vec::new();
    let mut text = String::new();
    for i in 0..s.n() {
        for j in i + 1..s.n() {
            let h = halmos_decompose(s.subspace(i), s.subspace(j))?;
            let dims = h.part_dims();
            text += &format!(
                "{} {}: parts {} angles [{}] residual {:.1e}\n",
                names[i],
                names[j],
                join(&dims),
                h.angles.iter().map(|a| format!("{a:.12}")).collect::<Vec<_>>().join(", "),
                h.residual
            );
            pairs.push(json!({
                "pair": [names[i], names[j]],
                "intersection": dims[0],
                "generic": dims[1],
                "first_and_second_perp": dims[2],
                "first_perp_and_second": dims[3],
                "both_perp": dims[4],
                "angles": h.angles,
                "residual": h.residual,
            }));
        }
    }
    let mut result = json!({"pairs": pairs});
    if s.n() == 2 {
        let c = classify_two_system(s)?;
        let m = c.type_multiplicities();
        text += &format!("two-subspace types (C;C,0) (C;0,C) (C;C,C) (C;0,0): {}\n", join(&m));
        result["two_subspace_types"] = json!(m);
    }
    Ok((result, text))
}

fn angles_cmd(ctx: &mut Ctx, path: &str) -> Result<Report, CliError> {
    let f = ctx.load(path)?;
    let names = f.names();
    let (result, text) = match f.load() {
        Loaded::Exact(s) => angles_of(&s, &names)?,
        Loaded::Float(s) => angles_of(&s, &names)?,
    };
    Ok(ctx.report(result, text).tolerance(Some(subsys_core::angles::CORNER_THRESHOLD)))
}

/// Symbol text: the full `block=…; k:…=[[…]]` syntax, `shift:<α>` for
/// `S + αI`, or `v:<n>` for the block operator `V`.
pub fn parse_symbol(text: &str) -> Result<LaurentSymbol, CliError> {
    if let Some(a) = text.strip_prefix("shift:") {
        return Ok(LaurentSymbol::shift_plus(&a.parse::<GaussRat>()?));
    }
    if let Some(n) = text.strip_prefix("v:") {
        let n: usize = n.parse().map_err(|_| CliError::Usage(format!("bad block size in `{text}`")))?;
        return Ok(LaurentSymbol::block_v(n)?);
    }
    Ok(text.parse()?)
}

fn cert_text(c: &Certification) -> String {
    match c {
        Certification::Winding { grid, min_modulus } => {
            format!("winding number on a {grid}-point grid, min |det a| = {min_modulus:.3e}")
        }
        Certification::Truncation { n } => format!("kernel counts confirmed by the {n}x{n} truncation"),
        Certification::Triangular => "block-triangular rule".into(),
        Certification::NumericOnly(why) => format!("numeric only: {why}"),
    }
}

fn toeplitz_cmd(ctx: &mut Ctx, action: &ToeplitzCmd) -> Result<Report, CliError> {
    match action {
        ToeplitzCmd::Index { symbol, grid } => {
            let sym = parse_symbol(symbol)?;
            let rep = fredholm_index(&sym, *grid)?;
            let (index, status, how) = match operator_index(&sym) {
                Ok((i, c)) => (Some(i), Status::Ok, cert_text(&c)),
                Err(Error::Uncertified(why)) => (None, Status::Uncertified, why),
                Err(e) => return Err(e.into()),
            };
            let text = format!(
                "symbol {sym}\nfredholm {}\nwinding {}\nindex {}\ncertification {how}\n",
                rep.fredholm,
                rep.winding.map_or("-".into(), |w| w.to_string()),
                index.map_or("-".into(), |i| i.to_string()),
            );
            let result = json!({
                "symbol": sym.to_string(),
                "grid": grid,
                "fredholm": rep.fredholm,
                "winding": rep.winding,
                "ker_dim": rep.ker_dim,
                "coker_dim": rep.coker_dim,
                "index": index,
                "certification": how,
            });
            Ok(ctx.report(result, text).status(status))
        }
        ToeplitzCmd::Defect { symbol } => {
            let sym = parse_symbol(symbol)?;
            match single_operator_defect(&sym) {
                Ok(d) => {
                    let text = format!(
                        "symbol {sym}\nindex T {}\nindex T-I {}\ndefect {}\n",
                        d.index_t, d.index_t_minus_i, d.defect
                    );
                    let result = json!({
                        "symbol": sym.to_string(),
                        "index_t": d.index_t,
                        "index_t_minus_i": d.index_t_minus_i,
                        "defect": rat(d.defect),
                        "certification": [cert_text(&d.certification.0), cert_text(&d.certification.1)],
                    });
                    Ok(ctx.report(result, text))
                }
                Err(Error::Uncertified(why)) => {
                    let text = format!("symbol {sym}\ndefect uncertified: {why}\n");
                    let result = json!({"symbol": sym.to_string(), "defect": null, "reason": why});
                    Ok(ctx.report(result, text).status(Status::Uncertified))
                }
                Err(e) => Err(e.into()),
            }
        }
        ToeplitzCmd::Regions { alpha } => {
            let alphas = alpha.iter().map(|a| a.parse::<GaussRat>()).collect::<Result<Vec<_>, _>>()?;
            let defects = alphas.par_iter().map(region_classify).collect::<subsys_core::Result<Vec<_>>>()?;
            let mut text = String::new();
            let mut items = Vec::new();
            for (a, d) in alphas.iter().zip(&defects) {
                text += &format!("alpha {a} defect {d}\n");
                items.push(json!({"alpha": a.to_string(), "defect": rat(*d)}));
            }
            Ok(ctx.report(json!(items), text))
        }
        ToeplitzCmd::Exotic { gamma, n, tol, beta, sizes } => {
            let g: GaussRat = gamma.parse()?;
            let t = tolerance(*tol)?;
            let r = exotic_report(&g, *n, t)?;
            let mut text = format!("gamma {g}\nN {n}\n");
            let mut pairs = Vec::new();
            for p in &r.pairs {
                text += &format!(
                    "E{} E{}: intersection {} codim-sum {} min-angle {:.3e} near {}\n",
                    p.i,
                    p.j,
                    p.exact_intersection,
                    p.codim_sum,
                    p.min_angle,
                    p.near_intersection
                );
                pairs.push(json!({
                    "pair": [p.i, p.j],
                    "exact_intersection": p.exact_intersection,
                    "codim_sum": p.codim_sum,
                    "min_angle": p.min_angle,
                    "near_intersection": p.near_intersection,
                }));
            }
            let (diagram, dtext) = diagram_json(&r.diagram);
            text += &dtext;
            text += &format!(
                "not_operator_system {}\ndefect_estimate {}\nother_terms_ok {}\n",
                r.not_operator_system, r.defect_estimate, r.other_terms_ok
            );
            let mut result = json!({
                "gamma": g.to_string(),
                "n": n,
                "pairs": pairs,
                "diagram": diagram,
                "not_operator_system": r.not_operator_system,
                "defect_estimate": rat(r.defect_estimate),
                "other_terms_ok": r.other_terms_ok,
            });
            if let Some(b) = beta {
                let b: GaussRat = b.parse()?;
                let decay = exotic_hom_decay(&g, &b, sizes)?;
                let dims: Vec<Value> = decay
                    .dims
                    .iter()
                    .map(|h| json!({"n": h.n, "dim_upper_bound": h.dim, "generator_rank": h.generator_rank}))
                    .collect();
                text += &format!(
                    "hom dims (beta {b}) {} monotone {}\n",
                    decay.dims.iter().map(|h| format!("N={}:{}", h.n, h.dim)).collect::<Vec<_>>().join(" "),
                    decay.monotone
                );
                result["hom"] = json!({"beta": b.to_string(), "dims": dims, "monotone": decay.monotone});
            }
            Ok(ctx.report(result, text).tolerance(Some(t)))
        }
    }
}

fn sweep_json(s: &ClassificationSweep) -> (Value, String, Status) {
    let unmatched = s.unmatched();
    let hist = s.histogram();
    let mut text = format!(
        "systems {}\nsummands {}\nmatched {}\nover_c {}\nunmatched {}\n",
        s.systems.len(),
        s.leaf_count(),
        s.matched(),
        s.over_c(),
        unmatched.len()
    );
    for (k, v) in &hist {
        text += &format!("  {k}: {v}\n");
    }
    for u in &unmatched {
        text += &format!("unmatched: {u}\n");
    }
    let status = if unmatched.is_empty() { Status::Ok } else { Status::Invariant };
    let result = json!({
        "arity": s.n,
        "max_dim": s.max_dim,
        "systems": s.systems.len(),
        "summands": s.leaf_count(),
        "matched": s.matched(),
        "over_c": s.over_c(),
        "unmatched": unmatched,
        "histogram": hist,
    });
    (result, text, status)
}

fn verify_cmd(ctx: &mut Ctx, action: &VerifyCmd) -> Result<Report, CliError> {
    match action {
        VerifyCmd::GpRange { k_even, k_odd } => {
            let items = verify::gp_range(*k_even, *k_odd, &verify::sweep_lambdas())?;
            let ok = items.iter().filter(|i| i.ok()).count();
            let mut text = format!("agree {ok}/{}\n", items.len());
            let mut rows = Vec::new();
            for i in &items {
                text += &format!(
                    "{} {} dim {} expected {} computed {}\n",
                    if i.ok() { "ok  " } else { "FAIL" },
                    i.key,
                    i.ambient_dim,
                    i.expected,
                    i.computed
                );
                rows.push(json!({"key": i.key.to_string(), "ambient_dim": i.ambient_dim,
                    "expected": i.expected, "computed": rat(i.computed), "ok": i.ok()}));
            }
            let status = if ok == items.len() { Status::Ok } else { Status::Invariant };
            Ok(ctx.report(json!({"agree": ok, "items": rows}), text).status(status))
        }
        VerifyCmd::GpComplete { k, seed } => {
            let keys = verify::full_catalog(*k);
            let items = verify::catalog_indecomposable(&keys, *seed)?;
            let ok = items.iter().filter(|i| i.ok()).count();
            let mut text = format!("indecomposable {ok}/{}\n", items.len());
            let mut rows = Vec::new();
            for i in &items {
                if !i.ok() {
                    text += &format!("FAIL {} summands {} certified {}\n", i.key, i.leaves, i.certified);
                }
                rows.push(json!({"key": i.key.to_string(), "summands": i.leaves, "certified": i.certified}));
            }
            let status = if ok == items.len() { Status::Ok } else { Status::Invariant };
            Ok(ctx.report(json!({"indecomposable": ok, "items": rows}), text).seed(*seed).status(status))
        }
        VerifyCmd::ThreeTypes { count, max_dim, seed } => {
            let (r, t, st) = sweep_json(&verify::classification_sweep(3, *count, *max_dim, *seed)?);
            Ok(ctx.report(r, t).seed(*seed).status(st))
        }
        VerifyCmd::TwoTypes { count, max_dim, seed } => {
            let (r, t, st) = sweep_json(&verify::classification_sweep(2, *count, *max_dim, *seed)?);
            Ok(ctx.report(r, t).seed(*seed).status(st))
        }
    }
}
