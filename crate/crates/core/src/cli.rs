//! Command-line front end. Data goes to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success, 1 input error, 2 numerical failure, 3 no DFS found,
//! 4 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::Tolerances;
use crate::engine::{find_all_dfs, AnalysisReport};
use crate::error::DfsError;
use crate::gallery::{self, ParamValue, Params};
use crate::io::{read_file, write_file, FileError, MatrixRepr, ModelFile, Pair, ReportFile};
use crate::linalg::{basis_vector, c64, outer, ComplexMatrix, ComplexVector};
use crate::model::MasterEquationModel;
use crate::oracle::{self, default_t_final, initial_steps, verify_dfs_record, PropagationOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_NO_DFS: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Environment variable naming the default tolerance profile.
pub const PROFILE_ENV: &str = "DFS_TOLERANCE_PROFILE";

#[derive(Parser, Debug)]
#[command(name = "dfs", version, about = "Find and verify decoherence-free subspaces of Lindblad master equations")]
struct Cli {
    /// Tolerance profile: default, strict or loose. Overrides $DFS_TOLERANCE_PROFILE.
    #[arg(long, global = true)]
    profile: Option<String>,
    /// Tolerance override, e.g. --tol membership=1e-7 (repeatable).
    #[arg(long = "tol", global = true, value_name = "KEY=VALUE")]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate and classify every DFS of a model file.
    Analyze {
        model: PathBuf,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check each record of a report by propagating random states inside it.
    Verify {
        model: PathBuf,
        report: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Horizon; defaults to 10 / max rate.
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report with verification results attached.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List gallery models or emit one as a model file.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
    /// Integrate the master equation and print time, purity and fidelity columns.
    Propagate {
        model: PathBuf,
        /// dfs:K (first basis vector of record K), basis:I, or a JSON file
        /// with a "psi" vector or a "rho" matrix.
        #[arg(long)]
        state: String,
        #[arg(long)]
        t_final: Option<f64>,
        /// Initial step count (doubled until converged).
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum GalleryAction {
    List,
    Emit {
        name: String,
        /// Builder parameter, e.g. --param N=3 (repeatable).
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Numeric(String),
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Model(inner) => inner.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<DfsError> for Failure {
    fn from(e: DfsError) -> Self {
        match e {
            DfsError::StepCapExceeded { .. } | DfsError::NoConvergence(_) | DfsError::Inconsistent(_) | DfsError::NonFinite(_) => {
                Failure::Numeric(e.to_string())
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

/// Run the CLI with explicit arguments and output streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Numeric(msg)) => {
            let _ = writeln!(err, "numerical failure: {msg}");
            EXIT_NUMERIC
        }
    }
}

fn base_tolerances(cli: &Cli) -> Result<Tolerances, Failure> {
    let name = match &cli.profile {
        Some(p) => Some(p.clone()),
        None => std::env::var(PROFILE_ENV).ok().filter(|s| !s.is_empty()),
    };
    match name {
        None => Ok(Tolerances::default()),
        Some(n) => Tolerances::profile(&n).ok_or_else(|| Failure::Input(format!("unknown tolerance profile '{n}'"))),
    }
}

fn apply_overrides(mut tol: Tolerances, overrides: &[String]) -> Result<Tolerances, Failure> {
    for o in overrides {
        let (k, v) = split_kv(o)?;
        let value: f64 = v.parse().map_err(|_| Failure::Input(format!("--tol {o}: not a number")))?;
        tol.set(k, value).map_err(Failure::Input)?;
    }
    Ok(tol)
}

fn split_kv(s: &str) -> Result<(&str, &str), Failure> {
    s.split_once('=').ok_or_else(|| Failure::Input(format!("expected KEY=VALUE, got '{s}'")))
}

fn load_model(path: &Path, cli: &Cli) -> Result<(MasterEquationModel, Tolerances), Failure> {
    let file = ModelFile::parse(&read_file(path)?)?;
    let tol = file.tolerances(base_tolerances(cli)?)?;
    let tol = apply_overrides(tol, &cli.tol)?;
    let model = file.to_model(&tol)?;
    Ok((model, tol))
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => Ok(write_file(p, text)?),
        None => writeln!(out, "{text}").map_err(|e| Failure::Input(e.to_string())),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Analyze { model, out: path } => {
            let (m, tol) = load_model(model, &cli)?;
            let report = find_all_dfs(&m, &tol)?;
            print_table(&report, out);
            for note in &report.notes {
                let _ = writeln!(err, "note: {note}");
            }
            if let Some(p) = path {
                write_file(p, &ReportFile::from_report(&report).to_json())?;
            }
            Ok(if report.records.is_empty() { EXIT_NO_DFS } else { EXIT_OK })
        }
        Command::Verify {
            model,
            report,
            trials,
            t_final,
            seed,
            out: path,
        } => {
            let (m, _) = load_model(model, &cli)?;
            let file = ReportFile::parse(&read_file(report)?)?;
            if file.model_label != m.label() {
                return Err(Failure::Input(format!(
                    "report is for model '{}', model file is '{}'",
                    file.model_label,
                    m.label()
                )));
            }
            if file.dim != m.dim() {
                return Err(Failure::Input(format!("report dimension {} differs from model dimension {}", file.dim, m.dim())));
            }
            let rep = file.to_report()?;
            let mut results = Vec::with_capacity(rep.records.len());
            for (i, rec) in rep.records.iter().enumerate() {
                let v = verify_dfs_record(&m, rec, *trials, *t_final, *seed)?;
                let _ = writeln!(
                    out,
                    "record {i}: {} dim {} tuple {}  purity drift {:.3e}  min fidelity {:.12}  {}",
                    rec.classification,
                    rec.dim(),
                    rec.tuple,
                    v.max_purity_drift,
                    v.min_unitary_fidelity,
                    if v.passed { "PASS" } else { "FAIL" }
                );
                results.push(v);
            }
            if let Some(p) = path {
                write_file(p, &file.clone().with_verification(&results).to_json())?;
            }
            let failed = results.iter().filter(|v| !v.passed).count();
            if failed > 0 {
                let _ = writeln!(err, "{failed} of {} records failed verification", results.len());
                Ok(EXIT_VERIFY)
            } else {
                Ok(EXIT_OK)
            }
        }
        Command::Gallery { action } => match action {
            GalleryAction::List => {
                for e in gallery::entries() {
                    let params: Vec<String> = e.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
                    let _ = writeln!(out, "{:<32} {}", e.name, e.summary);
                    if !params.is_empty() {
                        let _ = writeln!(out, "{:<32} params: {}", "", params.join(" "));
                    }
                }
                Ok(EXIT_OK)
            }
            GalleryAction::Emit { name, params, out: path } => {
                let mut p = Params::new();
                for kv in params {
                    let (k, v) = split_kv(kv)?;
                    p.insert(k.to_string(), ParamValue::parse(v));
                }
                let m = gallery::build(name, &p)?;
                emit(&ModelFile::from_model(&m).to_json(), path.as_deref(), out)?;
                Ok(EXIT_OK)
            }
        },
        Command::Propagate {
            model,
            state,
            t_final,
            steps,
            out: path,
        } => {
            let (m, tol) = load_model(model, &cli)?;
            let rho0 = initial_state(&m, &tol, state)?;
            let t_final = t_final.unwrap_or_else(|| default_t_final(&m));
            let opts = PropagationOptions {
                steps: steps.unwrap_or_else(|| initial_steps(&m, t_final)),
                ..Default::default()
            };
            let traj = oracle::propagate_with(&m, &rho0, t_final, &opts)?;
            let mut text = String::from("time\tpurity\tfidelity\n");
            for ((t, p), f) in traj.times.iter().zip(&traj.purities).zip(&traj.fidelity_to_unitary) {
                text.push_str(&format!("{t:.10e}\t{p:.15}\t{f:.15}\n"));
            }
            match path {
                Some(p) => write_file(p, &text)?,
                None => {
                    let _ = write!(out, "{text}");
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn initial_state(m: &MasterEquationModel, tol: &Tolerances, spec: &str) -> Result<ComplexMatrix, Failure> {
    let n = m.dim();
    if let Some(k) = spec.strip_prefix("dfs:") {
        let k: usize = k.parse().map_err(|_| Failure::Input(format!("bad record index in '{spec}'")))?;
        let report = find_all_dfs(m, tol)?;
        let rec = report
            .records
            .get(k)
            .ok_or_else(|| Failure::Input(format!("record {k} requested, model has {} DFS", report.records.len())))?;
        let v = rec.subspace.vector(0);
        return Ok(outer(&v, &v));
    }
    if let Some(i) = spec.strip_prefix("basis:") {
        let i: usize = i.parse().map_err(|_| Failure::Input(format!("bad basis index in '{spec}'")))?;
        if i >= n {
            return Err(Failure::Input(format!("basis index {i} out of range for dimension {n}")));
        }
        let v = basis_vector(n, i);
        return Ok(outer(&v, &v));
    }
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct StateFile {
        psi: Option<Vec<Pair>>,
        rho: Option<MatrixRepr>,
    }
    let text = read_file(Path::new(spec))?;
    let f: StateFile = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{spec}: {e}")))?;
    match (f.psi, f.rho) {
        (Some(psi), None) => {
            if psi.len() != n {
                return Err(Failure::Input(format!("psi: expected {n} entries, found {}", psi.len())));
            }
            let v = ComplexVector::from_iterator(n, psi.iter().map(|p| c64(p[0], p[1])));
            let norm = v.norm();
            if (norm - 1.0).abs() > 1e-8 {
                return Err(Failure::Input(format!("psi: not normalized (norm {norm})")));
            }
            Ok(outer(&v, &v))
        }
        (None, Some(rho)) => Ok(rho.to_matrix(n, n, "rho")?),
        _ => Err(Failure::Input(format!("{spec}: give exactly one of \"psi\" or \"rho\""))),
    }
}

fn print_table(r: &AnalysisReport, out: &mut dyn Write) {
    let _ = writeln!(out, "model {} (dim {}), {} eigenvalue tuples examined", r.model_label, r.dim, r.tuples_examined);
    if r.records.is_empty() {
        let _ = writeln!(out, "no DFS found");
        return;
    }
    let _ = writeln!(out, "{:>3}  {:>4}  {:<10}  {:>12}  {:>10}  tuple", "#", "dim", "class", "g", "witness");
    for (i, rec) in r.records.iter().enumerate() {
        let g = rec.gamma_eigenvalue.map_or("-".to_string(), |g| format!("{g:.6}"));
        let _ = writeln!(
            out,
            "{i:>3}  {:>4}  {:<10}  {g:>12}  {:>10.3e}  {}",
            rec.dim(),
            rec.classification.to_string(),
            rec.witness,
            rec.tuple
        );
    }
}
