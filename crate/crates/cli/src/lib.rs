//! The `lscheme` command-line tool.
//!
//! Every command reads JSON and writes JSON, with CSV series on request.
//! Exit codes: `0` success, `1` an exact check failed, `2` bad input or
//! configuration.

pub mod any;
pub mod build;
pub mod config;
pub mod ops;
pub mod pipeline;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use lscheme::nilpotent::{big_det, big_mat_mul, check_heisenberg_direction, find_heisenberg_direction, smith_normal_form, to_big, IMat};
use lscheme::scheme::{Rearranged, SchemeWindow, VerifyReport};
use lscheme::group::Group;
use serde::Serialize;
use serde_json::{json, Value};

use crate::any::AnyWindow;
use crate::config::{parse_q, GroupConfig, LiftConfig, Nil2Preset, ProfileName, RepChoice, RunConfig};
use crate::ops::Stage;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Lib(#[from] lscheme::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use lscheme::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Lib(E::Domain(_) | E::Validation(_) | E::NoScheme(_) | E::Json(_) | E::Abelian) => 2,
            CliError::Lib(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lscheme", version, about = "Build and verify left schemes, asymmetric l2-cocycles and Bernoulli schemes")]
pub struct Cli {
    /// Worker threads (ignored without the `parallel` feature).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Construct a scheme window and write it as JSON.
    Build(BuildArgs),
    /// Check the scheme conditions exactly; exit 1 on any failure.
    Verify(VerifyArgs),
    /// Translate the sets of a window apart along ⟨s_o⟩.
    Rearrange(RearrangeArgs),
    /// Truncated Φ for the generators and for s_o^k.
    Phi(PhiArgs),
    /// Exact norms of the asymmetric cocycle of a rearranged window.
    Cocycle(CocycleArgs),
    /// Product-measure checks and divergence diagnostics.
    Bernoulli(BernoulliArgs),
    /// Lift a window through Q × N → Q.
    Lift(LiftArgs),
    /// Smith normal form of an integer matrix, or the Heisenberg direction of
    /// a Malcev presentation.
    Snf(SnfArgs),
    /// Run every stage for one group and write a single report.
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GroupKind {
    Heisenberg,
    Nil2,
    Wreath,
    Bs,
    Dihedral,
    Zd,
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// JSON run configuration; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub group: Option<GroupKind>,
    #[arg(long, value_enum)]
    pub profile: Option<ProfileName>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// BS(1, d) parameter, or the rank of ℤ^d.
    #[arg(long)]
    pub d: Option<u32>,
    /// Lamp moduli for the wreath product, `0` for ℤ.
    #[arg(long, value_delimiter = ',')]
    pub lamp: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    pub preset: Option<Nil2Preset>,
    /// Malcev presentation JSON file.
    #[arg(long)]
    pub presentation: Option<PathBuf>,
    #[arg(long)]
    pub shift_bound: Option<i64>,
}

impl GroupArgs {
    pub fn to_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(kind) = self.group {
            let raw = self.presentation.as_deref().map(read_json).transpose()?;
            cfg.group = match kind {
                GroupKind::Heisenberg => GroupConfig::Heisenberg,
                GroupKind::Nil2 => GroupConfig::Nil2 { preset: self.preset, presentation: raw },
                GroupKind::Wreath => GroupConfig::Wreath { lamp: self.lamp.clone().unwrap_or_else(|| vec![2]) },
                GroupKind::Bs => GroupConfig::Bs { d: self.d.unwrap_or(2) },
                GroupKind::Dihedral => GroupConfig::Dihedral,
                GroupKind::Zd => GroupConfig::Zd { d: self.d.unwrap_or(2) as usize },
            };
        }
        if let Some(p) = self.profile {
            cfg.scheme.profile = p;
        }
        if let Some(n) = self.n_max {
            cfg.scheme.n_max = Some(n);
        }
        if let Some(k) = self.shift_bound {
            cfg.verify.shift_bound = k;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Scheme JSON path; stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Where to write the construction's hypothesis checks.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub scheme: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub shift_bound: i64,
    #[arg(long, default_value_t = 4096)]
    pub series_max: i64,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// CSV of the recurrence series: k, Φ_partial(s_o^k), exp-sum, delta.
    #[arg(long)]
    pub emit_csv: Option<PathBuf>,
    /// CSV of every check row.
    #[arg(long)]
    pub rows_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RearrangeArgs {
    pub scheme: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub shift_bound: i64,
    /// Rearranged scheme JSON; stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    pub scheme: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub k_max: i64,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// CSV: k, Φ_partial(s_o^k), float value.
    #[arg(long)]
    pub emit_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CocycleArgs {
    pub scheme: PathBuf,
    /// Rearrange first instead of requiring a rearranged window.
    #[arg(long)]
    pub rearrange: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BernoulliArgs {
    pub scheme: PathBuf,
    #[arg(long)]
    pub rearrange: bool,
    #[arg(long, default_value = "1/10")]
    pub eps: String,
    /// Rational κ; defaults to the window's.
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 6)]
    pub doublings: usize,
    #[arg(long, default_value_t = 1)]
    pub k0: i64,
    #[arg(long, default_value_t = 16)]
    pub exact_limit: i64,
    #[arg(long, default_value_t = 20)]
    pub cylinders: usize,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// CSV of the conservativity series: K, exp-sum, delta.
    #[arg(long)]
    pub emit_csv: Option<PathBuf>,
    /// CSV of the Kakutani sums: N, left, right.
    #[arg(long)]
    pub kakutani_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    pub scheme: PathBuf,
    /// Kernel moduli, `0` for ℤ.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub kernel: Vec<u64>,
    #[arg(long)]
    pub twist: Option<u64>,
    #[arg(long, value_enum, default_value_t = RepChoice::Least)]
    pub rep: RepChoice,
    #[arg(long, default_value_t = 16)]
    pub shift_bound: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Lifted scheme JSON.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Report JSON; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SnfArgs {
    /// Integer matrix as JSON, e.g. `[[2,4],[6,8]]`.
    #[arg(long)]
    pub matrix: Option<String>,
    #[arg(long, value_enum)]
    pub preset: Option<Nil2Preset>,
    #[arg(long)]
    pub presentation: Option<PathBuf>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Add a lift stage through Q × ℤ/2 → Q.
    #[arg(long)]
    pub lift: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn write_csvs(dir: &Path, stages: &[Stage]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for st in stages {
        for (stem, content) in &st.csv {
            std::fs::write(dir.join(format!("{stem}.csv")), content)?;
        }
    }
    Ok(())
}

fn rearranged<G: Group>(w: &SchemeWindow<G>, rebuild: bool) -> Result<Rearranged<G>, CliError> {
    let r = if rebuild { Rearranged::build(w) } else { Rearranged::certify(w.clone()) };
    r.map_err(|e| lscheme::Error::Unverified(format!("{e}; pass --rearrange or run `lscheme rearrange` first")).into())
}

fn exit_for(pass: bool) -> i32 {
    if pass {
        0
    } else {
        1
    }
}

fn cmd_build(a: &BuildArgs) -> Result<i32, CliError> {
    let cfg = a.group.to_config()?;
    let built = build::build(&cfg)?;
    write_text(a.out.as_deref(), &pretty(&built.window.to_json()))?;
    let rep = built.tower.unwrap_or_default();
    if let Some(p) = &a.report {
        std::fs::write(p, pretty(&json!({ "report": rep, "construction": built.data })))?;
    }
    Ok(exit_for(rep.all_pass()))
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32, CliError> {
    let any = AnyWindow::load(&a.scheme)?;
    let cfg = config::VerifyConfig { shift_bound: a.shift_bound, series_max: a.series_max };
    let stage = with_window!(&any, w => ops::verify_stage(w, &cfg));
    write_text(a.out.as_deref(), &pretty(&stage.report))?;
    if let Some(p) = &a.emit_csv {
        std::fs::write(p, stage.report.series_csv())?;
    }
    if let Some(p) = &a.rows_csv {
        std::fs::write(p, stage.report.rows_csv())?;
    }
    Ok(exit_for(stage.pass))
}

fn cmd_rearrange(a: &RearrangeArgs) -> Result<i32, CliError> {
    let any = AnyWindow::load(&a.scheme)?;
    let (stage, scheme) = with_window!(&any, w => {
        let (stage, f) = ops::rearrange_stage(w, a.shift_bound)?;
        (stage, f.window().to_json())
    });
    write_text(a.out.as_deref(), &pretty(&scheme))?;
    if let Some(p) = &a.report {
        std::fs::write(p, pretty(&stage))?;
    }
    Ok(exit_for(stage.pass))
}

fn cmd_phi(a: &PhiArgs) -> Result<i32, CliError> {
    if a.k_max < 0 {
        return Err(CliError::Config("--k-max must be nonnegative".into()));
    }
    let any = AnyWindow::load(&a.scheme)?;
    let stage = with_window!(&any, w => ops::phi_stage(w, a.k_max));
    write_text(a.out.as_deref(), &pretty(&stage.data))?;
    if let Some(p) = &a.emit_csv {
        std::fs::write(p, &stage.csv[0].1)?;
    }
    Ok(0)
}

fn cmd_cocycle(a: &CocycleArgs) -> Result<i32, CliError> {
    let any = AnyWindow::load(&a.scheme)?;
    let stage = with_window!(&any, w => ops::cocycle_stage(&rearranged(w, a.rearrange)?)?);
    write_text(a.out.as_deref(), &pretty(&stage))?;
    Ok(exit_for(stage.pass))
}

fn cmd_bernoulli(a: &BernoulliArgs) -> Result<i32, CliError> {
    let any = AnyWindow::load(&a.scheme)?;
    parse_q("--eps", &a.eps)?;
    let cfg = config::BernoulliConfig {
        eps: a.eps.clone(),
        kappa: a.kappa.clone(),
        k0: a.k0,
        doublings: a.doublings,
        exact_limit: a.exact_limit,
        cylinders: a.cylinders,
        ..Default::default()
    };
    let stage = with_window!(&any, w => ops::bernoulli_stage(&rearranged(w, a.rearrange)?, &cfg, a.seed)?);
    write_text(a.out.as_deref(), &pretty(&stage))?;
    for (path, stem) in [(&a.emit_csv, "conservativity"), (&a.kakutani_csv, "kakutani")] {
        if let Some(p) = path {
            let content = stage.csv.iter().find(|(s, _)| s == stem).map(|(_, c)| c.as_str()).unwrap_or_default();
            std::fs::write(p, content)?;
        }
    }
    Ok(exit_for(stage.pass))
}

fn cmd_lift(a: &LiftArgs) -> Result<i32, CliError> {
    let any = AnyWindow::load(&a.scheme)?;
    let cfg = LiftConfig { kernel: a.kernel.clone(), twist: a.twist, rep: a.rep };
    let (stage, lifted) = with_window!(&any, w => {
        let (s, lw) = ops::lift_stage(w, &cfg, a.shift_bound, a.seed)?;
        (s, lw.to_json())
    });
    if let Some(p) = &a.out {
        std::fs::write(p, pretty(&lifted))?;
    }
    write_text(a.report.as_deref(), &pretty(&stage))?;
    Ok(exit_for(stage.pass))
}

fn cmd_snf(a: &SnfArgs) -> Result<i32, CliError> {
    let mut out = serde_json::Map::new();
    let mut pass = true;
    if let Some(m) = &a.matrix {
        let m: IMat = serde_json::from_str(m).map_err(|e| CliError::Config(format!("--matrix: {e}")))?;
        let snf = smith_normal_form(&m)?;
        let ok = big_mat_mul(&big_mat_mul(&snf.u, &to_big(&m)), &snf.v) == to_big(&snf.d)
            && big_det(&snf.u).magnitude() == &1u32.into()
            && big_det(&snf.v).magnitude() == &1u32.into();
        pass &= ok;
        let mut v = serde_json::to_value(&snf).map_err(|e| CliError::Config(e.to_string()))?;
        v["diag"] = json!(snf.diag());
        v["umv_equals_d"] = json!(ok);
        out.insert("snf".into(), v);
    }
    if a.preset.is_some() || a.presentation.is_some() {
        let raw = a.presentation.as_deref().map(read_json).transpose()?;
        let pres = build::presentation(a.preset, raw.as_ref())?;
        let data = find_heisenberg_direction(&pres)?;
        let rep: VerifyReport = check_heisenberg_direction(&pres, &data);
        pass &= rep.all_pass();
        out.insert("direction".into(), json!({ "mu": data.mu, "p": data.p, "u": data.u, "adapted": data.presentation, "report": rep }));
    }
    if out.is_empty() {
        return Err(CliError::Config("give --matrix, --preset or --presentation".into()));
    }
    write_text(a.out.as_deref(), &pretty(&Value::Object(out)))?;
    Ok(exit_for(pass))
}

fn cmd_pipeline(a: &PipelineArgs) -> Result<i32, CliError> {
    let mut cfg = a.group.to_config()?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.lift && cfg.lift.is_none() {
        cfg.lift = Some(LiftConfig::default());
    }
    // flag paths stay out of the echoed config so reports depend only on the run
    let csv_dir = a.csv_dir.clone().or_else(|| cfg.output.csv_dir.clone());
    let out = a.out.clone().or_else(|| cfg.output.report.clone());
    let report = pipeline::run_pipeline(&cfg)?;
    if let Some(d) = &csv_dir {
        write_csvs(d, &report.stages)?;
    }
    write_text(out.as_deref(), &pretty(&report))?;
    if let Some(stage) = &report.failed_stage {
        eprintln!("stage {stage} failed");
    }
    Ok(exit_for(report.pass))
}

fn set_jobs(jobs: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}

/// Parse arguments, run the command and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    set_jobs(cli.jobs);
    let result = match &cli.cmd {
        Cmd::Build(a) => cmd_build(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Rearrange(a) => cmd_rearrange(a),
        Cmd::Phi(a) => cmd_phi(a),
        Cmd::Cocycle(a) => cmd_cocycle(a),
        Cmd::Bernoulli(a) => cmd_bernoulli(a),
        Cmd::Lift(a) => cmd_lift(a),
        Cmd::Snf(a) => cmd_snf(a),
        Cmd::Pipeline(a) => cmd_pipeline(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
