//! `ges` command line.
//!
//! Exit codes: 0 success, 1 selftest failure, 2 parameter violation,
//! 3 I/O or parse error, 4 invariant violation, 5 certification failure,
//! 6 recovery guarantee violated.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ges_core::ges::{verify_ges_with, AxiomReport, VerifyMode};
use ges_core::recovery::{Experiment, ExperimentConfig, RecoveryError};
use ges_core::{build_matrix, construct_es, construct_ges, GesError, MatrixError};
use serde_json::{json, Value};

use crate::config::{Params, RunConfig};
use crate::error::CliError;
use crate::formats::{self, ges_json, MatrixFormat};
use crate::report::AnalysisReport;
use crate::{doc, parallel, selftest};

#[derive(Debug, Parser)]
#[command(name = "ges", version, about = "Binary sensing matrices from generalized Euler squares")]
pub struct Cli {
    /// More diagnostics on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and verify GES(n, k, t); writes a .ges.json file.
    Construct(ConstructArgs),
    /// Re-check the GES axioms of a .ges.json file.
    Verify(VerifyArgs),
    /// Build the sensing matrix of a GES; writes .mtx (+ .meta.json) or .phi.json.
    Matrix(MatrixArgs),
    /// Coherence, RIP, column-count and block reports for a matrix.
    Analyze(AnalyzeArgs),
    /// Seeded OMP / Block-OMP recovery experiment.
    Recover(RecoverArgs),
    /// Golden examples and a small property grid.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct Sampling {
    /// Check this many random tuple pairs instead of all of them.
    #[arg(long, value_name = "PAIRS")]
    pub sample: Option<u64>,
    /// Seed for --sample.
    #[arg(long, default_value_t = 0)]
    pub sample_seed: u64,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub t: u32,
    /// Euler-square layout (t = 1, prime-power n): rows indexed by slope.
    #[arg(long)]
    pub euler: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub sampling: Sampling,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub sampling: Sampling,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// mtx or phi; inferred from --out when omitted.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// A .mtx or .phi.json matrix.
    #[arg(long)]
    pub input: PathBuf,
    /// Block length for block orthogonality and block coherence.
    #[arg(long)]
    pub d: Option<usize>,
    /// Report path; the JSON goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub t: Option<u32>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Block sparsities, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// random or exhaustive.
    #[arg(long)]
    pub supports: Option<String>,
    /// Report path; the JSON goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Directory for the artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replace the composition rule with an off-by-one variant.
    #[arg(long)]
    pub inject_fault: bool,
}

fn shown(p: &Path) -> String {
    p.display().to_string()
}

fn ges_err(e: GesError) -> CliError {
    match e {
        GesError::InvalidShape(_) | GesError::LengthMismatch { .. } => {
            CliError::Invariant(e.to_string())
        }
        GesError::ParameterViolation(msg) => CliError::Param(msg),
        _ => CliError::Param(e.to_string()),
    }
}

fn matrix_err(e: MatrixError) -> CliError {
    match e {
        MatrixError::Ges(g) => ges_err(g),
        other => CliError::Invariant(other.to_string()),
    }
}

fn recovery_err(e: RecoveryError) -> CliError {
    match e {
        RecoveryError::GuaranteeViolated { .. } => CliError::Guarantee(e.to_string()),
        RecoveryError::Ges(g) => ges_err(g),
        RecoveryError::Matrix(m) => matrix_err(m),
        RecoveryError::SingularSubproblem { .. } => CliError::Invariant(e.to_string()),
        RecoveryError::ParameterViolation(msg) => CliError::Param(msg),
        _ => CliError::Param(e.to_string()),
    }
}

fn warn(verbose: u8, warnings: &[String], path: &Path) {
    for w in warnings {
        eprintln!("warning: {}: {w}", shown(path));
    }
    if verbose > 0 {
        eprintln!("loaded {}", shown(path));
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => formats::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn verify_mode(s: &Sampling) -> VerifyMode {
    match s.sample {
        Some(pairs) => VerifyMode::Sampled {
            pairs,
            seed: s.sample_seed,
        },
        None => VerifyMode::Projection,
    }
}

fn axiom_summary(r: &AxiomReport) -> String {
    let scope = if r.complete { "all" } else { "sampled" };
    format!(
        "GES({}, {}, {}): {} {} pairs checked, max same-row {}, same-column {}, overall {}",
        r.n, r.k, r.t, r.pairs_checked, scope, r.max_same_row, r.max_same_column, r.max_overall
    )
}

fn check_axioms(r: &AxiomReport) -> Result<(), CliError> {
    if r.passed() {
        return Ok(());
    }
    let witness = [&r.ges1, &r.ges2, &r.ges3, &r.ges4]
        .iter()
        .find_map(|c| c.witness.clone());
    Err(CliError::Invariant(format!(
        "{} violated; witness {witness:?}",
        r.failed_axioms().join(", ")
    )))
}

fn construct(a: &ConstructArgs, verbose: u8) -> Result<(), CliError> {
    let g = if a.euler {
        if a.t != 1 {
            return Err(CliError::Param(format!("--euler requires t = 1, got t={}", a.t)));
        }
        construct_es(a.n, a.k)
    } else {
        construct_ges(a.n, a.k, a.t)
    }
    .map_err(ges_err)?;
    let report = verify_ges_with(&g, verify_mode(&a.sampling));
    eprintln!("{}", axiom_summary(&report));
    check_axioms(&report)?;
    let rc = RunConfig {
        params: Params {
            n: Some(a.n),
            k: Some(a.k),
            t: Some(a.t),
            ..Params::default()
        },
        outputs: a.out.iter().map(|p| shown(p)).collect(),
        format: a.euler.then(|| "euler".to_string()),
        verbosity: verbose,
        ..RunConfig::new("construct")
    };
    emit(a.out.as_deref(), &ges_json::render(&g, Some(&rc)))
}

fn verify(a: &VerifyArgs, verbose: u8) -> Result<(), CliError> {
    let loaded = formats::load_ges(&a.input)?;
    warn(verbose, &loaded.warnings, &a.input);
    let report = verify_ges_with(&loaded.value, verify_mode(&a.sampling));
    eprintln!("{}", axiom_summary(&report));
    emit(None, &doc::render(&json!(report)))?;
    check_axioms(&report)
}

fn matrix(a: &MatrixArgs, verbose: u8) -> Result<(), CliError> {
    let format = match &a.format {
        Some(name) => MatrixFormat::from_name(name)
            .ok_or_else(|| CliError::Param(format!("unknown format {name:?} (mtx or phi)")))?,
        None => MatrixFormat::from_path(&a.out).ok_or_else(|| {
            CliError::Param(format!(
                "cannot infer the format of {}; pass --format mtx|phi",
                shown(&a.out)
            ))
        })?,
    };
    let loaded = formats::load_ges(&a.input)?;
    warn(verbose, &loaded.warnings, &a.input);
    let g = loaded.value;
    let m = build_matrix(&g).map_err(matrix_err)?;
    let mut rc = RunConfig {
        params: Params {
            n: Some(u64::from(g.n())),
            k: Some(g.k()),
            t: Some(g.t()),
            ..Params::default()
        },
        inputs: vec![shown(&a.input)],
        outputs: vec![shown(&a.out)],
        format: Some(format.name().to_string()),
        verbosity: verbose,
        ..RunConfig::new("matrix")
    };
    if format == MatrixFormat::Mtx {
        rc.outputs.push(shown(&formats::meta_path(&a.out)));
    }
    formats::save_matrix(&a.out, format, &m, &rc)?;
    println!(
        "Phi({}, {}, {}): {} x {}, {} nonzeros, density 1/{}",
        m.n(),
        m.k(),
        m.t(),
        m.rows(),
        m.cols(),
        m.nnz(),
        m.n()
    );
    Ok(())
}

fn analyze(a: &AnalyzeArgs, verbose: u8) -> Result<(), CliError> {
    let loaded = formats::load_matrix(&a.input)?;
    warn(verbose, &loaded.warnings, &a.input);
    let m = loaded.value;
    let pool = parallel::pool()?;
    let overlap = parallel::max_overlap(&pool, &m);
    let report = AnalysisReport::build(&m, overlap, a.d)
        .map_err(|e| CliError::Param(e.to_string()))?;
    let rc = RunConfig {
        params: Params {
            n: Some(u64::from(m.n())),
            k: Some(m.k()),
            t: Some(m.t()),
            d: a.d,
            ..Params::default()
        },
        inputs: vec![shown(&a.input)],
        outputs: a.out.iter().map(|p| shown(p)).collect(),
        verbosity: verbose,
        ..RunConfig::new("analyze")
    };
    let text = doc::render(&selftest::analysis_doc(&report, &rc));
    emit(a.out.as_deref(), &text)?;
    if a.out.is_some() {
        print!("{}", report.to_text());
    }
    if report.certified {
        Ok(())
    } else {
        Err(CliError::Certification(report.failures.join("; ")))
    }
}

fn experiment_config(a: &RecoverArgs) -> Result<ExperimentConfig, CliError> {
    let mut v: Value = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(shown(p), e))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::format(shown(p), formats::FormatError::from(e)))?
        }
        None => json!({}),
    };
    let obj = v
        .as_object_mut()
        .ok_or_else(|| CliError::Param("experiment config must be a JSON object".into()))?;
    let overrides = [
        ("n", a.n.map(|x| json!(x))),
        ("k", a.k.map(|x| json!(x))),
        ("t", a.t.map(|x| json!(x))),
        ("d", a.d.map(|x| json!(x))),
        ("s", a.s.as_ref().map(|x| json!(x))),
        ("trials", a.trials.map(|x| json!(x))),
        ("seed", a.seed.map(|x| json!(x))),
        ("supports", a.supports.as_ref().map(|x| json!(x))),
    ];
    for (key, val) in overrides {
        if let Some(val) = val {
            obj.insert(key.into(), val);
        }
    }
    if !obj.contains_key("solver") {
        let d = obj.get("d").and_then(Value::as_u64).unwrap_or(1);
        obj.insert("solver".into(), json!(if d == 1 { "omp" } else { "bomp" }));
    }
    serde_json::from_value(v).map_err(|e| {
        let name = a.config.as_deref().map(shown).unwrap_or_else(|| "<flags>".into());
        match a.config {
            Some(_) => CliError::format(name, formats::FormatError::from(e)),
            None => CliError::Param(e.to_string()),
        }
    })
}

fn recover(a: &RecoverArgs, verbose: u8) -> Result<(), CliError> {
    let cfg = experiment_config(a)?;
    let exp = Experiment::new(cfg.clone()).map_err(recovery_err)?;
    let pool = parallel::pool()?;
    let stats = parallel::run_experiment(&pool, &exp).map_err(recovery_err)?;
    let rc = RunConfig {
        params: Params {
            n: Some(cfg.n),
            k: Some(cfg.k),
            t: Some(cfg.t),
            d: Some(cfg.d),
            s: Some(cfg.s.clone()),
            trials: Some(cfg.trials),
            seed: Some(cfg.seed),
        },
        inputs: a.config.iter().map(|p| shown(p)).collect(),
        outputs: a.out.iter().map(|p| shown(p)).collect(),
        verbosity: verbose,
        ..RunConfig::new("recover")
    };
    emit(
        a.out.as_deref(),
        &doc::render(&selftest::recovery_doc(&stats, &rc)),
    )?;
    let mut table = String::from("   s  trials   exact  guaranteed  max |x^-x|\n");
    for st in &stats.per_s {
        table.push_str(&format!(
            "{:>4}  {:>6}  {:>6}  {:>10}  {:.3e}\n",
            st.s,
            st.trials,
            st.exact,
            if st.guaranteed { "yes" } else { "no" },
            st.max_error
        ));
    }
    if let Some(g) = &stats.guarantee {
        table.push_str(&format!("guarantee: s < {} (s* = {})\n", g.bound, g.s_star));
    }
    if a.out.is_some() {
        print!("{table}");
    } else {
        eprint!("{table}");
    }
    stats.check_guarantee().map_err(recovery_err)
}

fn run_selftest(a: &SelftestArgs) -> Result<(), CliError> {
    let pool = parallel::pool()?;
    let outcome = selftest::run(&pool, a.inject_fault)?;
    if let Some(dir) = &a.out {
        selftest::write_artifacts(&outcome, dir)?;
    }
    print!("{}", outcome.to_text());
    if outcome.passed() {
        Ok(())
    } else {
        let failed: Vec<String> = outcome
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect();
        Err(CliError::Selftest(failed.join("; ")))
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let v = cli.verbose;
    match &cli.command {
        Command::Construct(a) => construct(a, v),
        Command::Verify(a) => verify(a, v),
        Command::Matrix(a) => matrix(a, v),
        Command::Analyze(a) => analyze(a, v),
        Command::Recover(a) => recover(a, v),
        Command::Selftest(a) => run_selftest(a),
    }
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            e.exit_code()
        }
    }
}
