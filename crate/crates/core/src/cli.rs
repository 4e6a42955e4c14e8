//! Command-line front end.
//!
//! Exit codes: 0 success or passing check, 1 domain failure (invalid input
//! matrix, failed check, inconsistent windows), 2 usage or parse error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::analysis::{self, AnalysisReport};
use crate::catalog::CatalogSpec;
use crate::error::Error;
use crate::gram_factor::{self, VectorSequence, VectorSequenceFile};
use crate::io::MatrixFile;
use crate::observable::{self, StateFile, StateVector};
use crate::phase_matrix::{self, IndexWindow, PhaseMatrix, Tolerances};
use crate::torus_kernel::ArcSet;

#[derive(Debug, Parser)]
#[command(name = "phasecov", version, about = "Covariant phase and localization observables on an index window")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Restrict input matrices (or override a catalog window) to LO:HI.
    #[arg(long, global = true, value_parser = parse_window)]
    pub window: Option<IndexWindow>,

    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_psd: f64,

    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol_herm: f64,

    /// Modulus below which entries count as structural zeros.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_zero: f64,

    /// Tolerance for pass/fail checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Density/sampler grid size, a power of two ≥ 1024.
    #[arg(long, global = true, default_value_t = observable::DEFAULT_GRID)]
    pub grid: usize,

    /// Central-block margin; defaults to a quarter of the window dimension.
    #[arg(long, global = true)]
    pub margin: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Method::Spectral)]
    pub method: Method,

    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Spectral,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a phase matrix file.
    Validate {
        matrix: PathBuf,
        /// Largest principal-minor order to enumerate.
        #[arg(long, default_value_t = 3)]
        max_order: usize,
    },
    /// Factorize a phase matrix into unit vectors.
    Factorize { matrix: PathBuf },
    /// Gram matrix of a vector-sequence file.
    Gram { vectors: PathBuf },
    /// Effect matrix E(X).
    Effect {
        matrix: PathBuf,
        /// Arc set: JSON file or inline `[[start, end], ...]`.
        #[arg(long)]
        arcs: String,
    },
    /// Probability ⟨ψ|E(X)ψ⟩.
    Prob {
        matrix: PathBuf,
        /// State: JSON file, `basis:N` or `uniform`.
        #[arg(long)]
        state: String,
        #[arg(long)]
        arcs: String,
    },
    /// Outcome density on a grid, as CSV `theta,density`.
    Density {
        matrix: PathBuf,
        #[arg(long)]
        state: String,
    },
    /// Sample outcome angles.
    Sample {
        matrix: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
    /// Classification checks.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Build a matrix from a catalog spec file.
    Catalog { spec: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Commutativity criterion over all in-window triples; optionally the
    /// commutator norm of E(X), E(Y).
    Commute {
        matrix: PathBuf,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
    },
    /// Projection-valuedness (unimodular entries).
    Pv { matrix: PathBuf },
    /// Gauge equivalence of two matrices.
    Equiv { matrix: PathBuf, other: PathBuf },
    /// Cyclic and phase moment operators.
    Moments {
        matrix: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_k: i64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

fn parse_window(s: &str) -> std::result::Result<IndexWindow, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    IndexWindow::new(lo, hi).map_err(|e| e.to_string())
}

impl RunConfig {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            psd: self.tol_psd,
            herm: self.tol_herm,
            zero: self.tol_zero,
            ..Tolerances::default()
        }
    }

    fn check(&self) -> CliResult<()> {
        for (name, v) in [
            ("--tol-psd", self.tol_psd),
            ("--tol-herm", self.tol_herm),
            ("--tol-zero", self.tol_zero),
            ("--tol", self.tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive")));
            }
        }
        if !self.grid.is_power_of_two() || self.grid < 1 << 10 {
            return Err(CliError::Usage("--grid must be a power of two ≥ 1024".into()));
        }
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let cfg = &cli.config;
    cfg.check()?;
    let tol = cfg.tolerances();
    match &cli.command {
        Command::Validate { matrix, max_order } => cmd_validate(cfg, matrix, *max_order),
        Command::Factorize { matrix } => {
            let c = load_phase_matrix(cfg, matrix)?;
            let seq = match cfg.method {
                Method::Spectral => gram_factor::factorize_spectral(&c, &tol)?,
                Method::Weighted => gram_factor::factorize_weighted(c.window(), c.entries(), &tol)?,
            };
            let deviation = seq.inner_products().sub(c.entries()).max_abs();
            emit_json(cfg, &VectorSequenceFile::from(&seq))?;
            let method = match cfg.method {
                Method::Spectral => "spectral",
                Method::Weighted => "weighted",
            };
            eprintln!("{}", json!({ "method": method, "max_deviation": deviation }));
            Ok(Outcome::Pass)
        }
        Command::Gram { vectors } => {
            let file: VectorSequenceFile = read_json(vectors)?;
            let seq = VectorSequence::try_from(file).map_err(|e| CliError::Usage(e.to_string()))?;
            let c = gram_factor::gram(&seq)?;
            emit_json(cfg, &MatrixFile::from(&c))?;
            Ok(Outcome::Pass)
        }
        Command::Effect { matrix, arcs } => {
            let c = load_phase_matrix(cfg, matrix)?;
            let x = load_arcs(arcs)?;
            let e = observable::effect_matrix(&c, &x);
            emit_json(cfg, &MatrixFile::new(e.window(), e.entries()))?;
            Ok(Outcome::Pass)
        }
        Command::Prob { matrix, state, arcs } => {
            let c = load_phase_matrix(cfg, matrix)?;
            let psi = load_state(state, c.window())?;
            let x = load_arcs(arcs)?;
            let p = observable::probability(&c, &psi, &x)?;
            emit_text(cfg, &format!("{}\n", fmt17(observable::clamp_probability(p))))?;
            Ok(Outcome::Pass)
        }
        Command::Density { matrix, state } => {
            let c = load_phase_matrix(cfg, matrix)?;
            let psi = load_state(state, c.window())?;
            let grid = observable::density_grid(&c, &psi, cfg.grid)?;
            match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut s = String::from("theta,density\n");
                    for (t, p) in grid {
                        s.push_str(&format!("{},{}\n", fmt17(t), fmt17(p)));
                    }
                    emit_text(cfg, &s)?;
                }
                Format::Json => emit_json(cfg, &grid)?,
            }
            Ok(Outcome::Pass)
        }
        Command::Sample { matrix, state, count } => {
            if *count == 0 {
                return Err(CliError::Usage("--count must be at least 1".into()));
            }
            let c = load_phase_matrix(cfg, matrix)?;
            let psi = load_state(state, c.window())?;
            let angles = observable::sample(&c, &psi, *count, cfg.seed, cfg.grid)?;
            match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let s: String = angles.iter().map(|t| format!("{}\n", fmt17(*t))).collect();
                    emit_text(cfg, &s)?;
                }
                Format::Json => emit_json(cfg, &angles)?,
            }
            Ok(Outcome::Pass)
        }
        Command::Check(check) => cmd_check(cfg, check),
        Command::Catalog { spec } => {
            let spec: CatalogSpec = read_json(spec)?;
            let spec = match cfg.window {
                Some(w) => spec.with_window(w),
                None => spec,
            };
            let c = spec.build().map_err(|e| CliError::Usage(format!("bad catalog spec: {e}")))?;
            emit_json(cfg, &MatrixFile::from(&c))?;
            Ok(Outcome::Pass)
        }
    }
}

fn cmd_validate(cfg: &RunConfig, path: &Path, max_order: usize) -> CliResult<Outcome> {
    let tol = cfg.tolerances();
    let (window, m) = load_raw_matrix(cfg, path)?;
    let report = phase_matrix::validate(&window, &m, &tol).map_err(|e| CliError::Usage(e.to_string()))?;
    let minors = if report.hermitian_deviation <= tol.herm {
        Some(phase_matrix::principal_minor_check(&window, &m, max_order, tol.psd))
    } else {
        None
    };
    let valid = report.is_valid && minors.as_ref().is_none_or(|mc| mc.passed);
    let mut out = serde_json::to_value(&report).expect("report serializes");
    out["window"] = json!(window);
    out["principal_minors"] = serde_json::to_value(&minors).expect("minor check serializes");
    emit_json(cfg, &out)?;
    Ok(if valid { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_check(cfg: &RunConfig, check: &CheckCommand) -> CliResult<Outcome> {
    let tol = cfg.tolerances();
    let report = match check {
        CheckCommand::Commute { matrix, x, y } => {
            let c = load_phase_matrix(cfg, matrix)?;
            let r = analysis::check_commutative_criterion(&c, cfg.tol);
            let mut extra = Map::new();
            extra.insert("triples_checked".into(), json!(r.triples_checked));
            extra.insert("violation_count".into(), json!(r.violation_count));
            match (x, y) {
                (Some(x), Some(y)) => {
                    let margin = cfg.margin.unwrap_or_else(|| analysis::default_margin(c.window()));
                    let norm = analysis::commutator_norm(&c, &load_arcs(x)?, &load_arcs(y)?, margin)?;
                    extra.insert("margin".into(), json!(margin));
                    extra.insert("commutator_norm".into(), json!(norm));
                }
                (None, None) => {}
                _ => return Err(CliError::Usage("--x and --y must be given together".into())),
            }
            Report {
                base: AnalysisReport {
                    test: "commute".into(),
                    pass: r.holds,
                    max_violation: r.max_violation,
                    witnesses: r.violations.iter().map(|v| serde_json::to_value(v).unwrap()).collect(),
                },
                extra,
            }
        }
        CheckCommand::Pv { matrix } => {
            let c = load_phase_matrix(cfg, matrix)?;
            let deviation = analysis::unimodular_deviation(&c);
            let first = analysis::pv_from_first_moment(&c, cfg.tol)?;
            let mut witnesses = Vec::new();
            if let Some((n, m, z)) = worst_entry(&c) {
                witnesses.push(json!({ "n": n, "m": m, "modulus": z.norm() }));
            }
            let mut extra = Map::new();
            extra.insert("first_moment".into(), serde_json::to_value(first).unwrap());
            Report {
                base: AnalysisReport {
                    test: "pv".into(),
                    pass: analysis::check_projection_valued(&c, cfg.tol),
                    max_violation: deviation,
                    witnesses,
                },
                extra,
            }
        }
        CheckCommand::Equiv { matrix, other } => {
            let a = load_phase_matrix(cfg, matrix)?;
            let b = load_phase_matrix(cfg, other)?;
            let found = analysis::check_equivalent(&a, &b, cfg.tol, tol.zero)?;
            let (pass, max_violation, witnesses) = match &found {
                Some(g) => (
                    true,
                    g.transform(a.entries()).sub(b.entries()).max_abs(),
                    g.phases().iter().map(|z| json!([z.re, z.im])).collect(),
                ),
                None => {
                    let dev = a
                        .entries()
                        .iter()
                        .zip(b.entries().iter())
                        .map(|(x, y)| (x.norm() - y.norm()).abs())
                        .fold(0.0, f64::max);
                    (false, dev, Vec::new())
                }
            };
            Report {
                base: AnalysisReport {
                    test: "equiv".into(),
                    pass,
                    max_violation,
                    witnesses,
                },
                extra: Map::new(),
            }
        }
        CheckCommand::Moments { matrix, max_k } => {
            let c = load_phase_matrix(cfg, matrix)?;
            let w = c.window();
            let kmax = (*max_k).min(w.dim() as i64 - 1).max(0);
            let cyclic: Vec<Value> = (-kmax..=kmax)
                .map(|k| {
                    let v = analysis::cyclic_moment(&c, k)?;
                    Ok(json!({ "k": k, "matrix": MatrixFile::new(w, &v) }))
                })
                .collect::<crate::Result<_>>()?;
            let e1 = analysis::first_phase_moment(&c);
            let e2 = analysis::second_phase_moment(&c);
            let recon = analysis::reconstruct_from_first_moment(&e1).sub(c.entries()).max_abs();
            let margin = cfg.margin.unwrap_or_else(|| analysis::default_margin(w));
            let defect = analysis::moment_defect_norm(&c, margin)?;
            let mut extra = Map::new();
            extra.insert("cyclic".into(), Value::Array(cyclic));
            extra.insert("first".into(), serde_json::to_value(MatrixFile::new(w, &e1)).unwrap());
            extra.insert("second".into(), serde_json::to_value(MatrixFile::new(w, &e2)).unwrap());
            extra.insert("margin".into(), json!(margin));
            extra.insert("second_moment_defect".into(), json!(defect));
            Report {
                base: AnalysisReport {
                    test: "moments".into(),
                    pass: recon <= cfg.tol,
                    max_violation: recon,
                    witnesses: Vec::new(),
                },
                extra,
            }
        }
    };
    let pass = report.base.pass;
    emit_json(cfg, &report)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Serialize)]
struct Report {
    #[serde(flatten)]
    base: AnalysisReport,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

fn worst_entry(c: &PhaseMatrix) -> Option<(i64, i64, Complex64)> {
    let w = c.window();
    let mut best: Option<(f64, i64, i64, Complex64)> = None;
    for n in w.indices() {
        for m in w.indices() {
            let z = c.get(n, m);
            let dev = (1.0 - z.norm()).abs();
            if best.is_none_or(|b| dev > b.0) {
                best = Some((dev, n, m, z));
            }
        }
    }
    best.map(|(_, n, m, z)| (n, m, z))
}

/// 17 significant digits.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_raw_matrix(cfg: &RunConfig, path: &Path) -> CliResult<(IndexWindow, crate::CMatrix)> {
    let file: MatrixFile = read_json(path)?;
    let m = file.to_matrix().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if m.rows() != file.window.dim() || m.cols() != file.window.dim() {
        return Err(CliError::Usage(format!(
            "{}: window {} needs a {}x{} matrix, found {}x{}",
            path.display(),
            file.window,
            file.window.dim(),
            file.window.dim(),
            m.rows(),
            m.cols()
        )));
    }
    match cfg.window {
        Some(sub) if sub != file.window => {
            if !file.window.contains_window(&sub) {
                return Err(Error::NotContained {
                    inner: sub.as_pair(),
                    outer: file.window.as_pair(),
                }
                .into());
            }
            let off = file.window.pos(sub.lo());
            Ok((sub, m.block(off, off, sub.dim(), sub.dim())))
        }
        _ => Ok((file.window, m)),
    }
}

fn load_phase_matrix(cfg: &RunConfig, path: &Path) -> CliResult<PhaseMatrix> {
    let (window, m) = load_raw_matrix(cfg, path)?;
    Ok(PhaseMatrix::new(window, m, &cfg.tolerances())?)
}

fn load_arcs(spec: &str) -> CliResult<ArcSet> {
    let text = if spec.trim_start().starts_with('[') {
        spec.to_string()
    } else {
        fs::read_to_string(spec).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("arc set {spec}: {e}")))
}

fn load_state(spec: &str, window: IndexWindow) -> CliResult<StateVector> {
    if spec == "uniform" {
        return Ok(StateVector::uniform(window));
    }
    if let Some(n) = spec.strip_prefix("basis:") {
        let n: i64 = n.parse().map_err(|e| CliError::Usage(format!("bad basis index: {e}")))?;
        return Ok(StateVector::basis(window, n)?);
    }
    let file: StateFile = read_json(Path::new(spec))?;
    let psi = StateVector::try_from(file)?;
    psi.window().ensure_same(&window)?;
    Ok(psi)
}

fn emit_text(cfg: &RunConfig, text: &str) -> CliResult<()> {
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Usage(format!("stdout: {e}")))
        }
    }
}

fn emit_json<T: Serialize>(cfg: &RunConfig, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Domain(e.to_string()))?;
    text.push('\n');
    emit_text(cfg, &text)
}
