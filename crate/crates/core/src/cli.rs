//! The `daspec` command line: data synthesis, clustering, spectra, theory
//! checks and baseline clusterers.
//!
//! Every command is deterministic given its flags. Failures print a JSON
//! object `{"error": {"kind": .., "message": ..}}` on stderr and exit with
//! status 1; malformed flags are usage errors with status 2.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytic::{analytic_eigenfunction, analytic_eigenvalue, GaussianOperatorSpec};
use crate::baselines::{kmeans, njw_spectral_with_restarts, DEFAULT_RESTARTS};
use crate::daspec::{cluster, select_bandwidth, Bandwidth, DaSpecParams, EpsilonRule};
use crate::datagen::{gauss6_spec, gen_gaussian_mixture, gen_ring_suite, Component, MixtureSpec};
use crate::error::{Error, Result};
use crate::io::{format_float, read_dataset_file, write_dataset};
use crate::kernels::{extend_eigenfunction, kernel_matrix, DataSet, KernelFamily, KernelSpec};
use crate::linalg::{eigendecompose, norm, EigenSystem};
use crate::metrics::label_agreement;
use crate::quadrature::GaussHermite;
use crate::theory::{
    check_compact_bound_all, check_eigenfunction_perturbation, check_interleaving, check_tail_bound,
    check_top_eigenvalue_bound, probe_points, CheckStatus,
};

#[derive(Debug, Parser)]
#[command(name = "daspec", version, about = "Data spectroscopic clustering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded synthetic data set as CSV.
    Synth(SynthArgs),
    /// Cluster a CSV data set and report the result as JSON.
    Cluster(ClusterArgs),
    /// Write the kernel-matrix spectrum and leading eigenvectors as CSV.
    Spectrum(SpectrumArgs),
    /// Run numerical checks of the spectral theory.
    Verify(VerifyArgs),
    /// Cluster with k-means or normalized spectral clustering.
    Baseline(BaselineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Design {
    /// Six planar Gaussians with random means and scales.
    Gauss6,
    /// Ring, blob, small cluster and outlier.
    Ring,
    /// 0.5 N(2, 1) + 0.5 N(-2, 1) on the line.
    TwoGaussians,
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub design: Design,
    /// Extra isotropic noise (ring design).
    #[arg(long, default_value_t = 0.0, value_parser = nonnegative)]
    pub noise: f64,
    /// Sample size (ignored by the ring design, which has 306 points).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `auto` or a positive number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AutoOr {
    Auto,
    Value(f64),
}

fn auto_or_positive(s: &str) -> std::result::Result<AutoOr, String> {
    if s == "auto" {
        return Ok(AutoOr::Auto);
    }
    positive(s).map(AutoOr::Value)
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(_) => Err(format!("not a number: {s:?}")),
    }
}

fn nonnegative(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        Ok(v) => Err(format!("must be nonnegative and finite, got {v}")),
        Err(_) => Err(format!("not a number: {s:?}")),
    }
}

#[derive(Debug, clap::Args)]
pub struct ClusterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "auto", value_parser = auto_or_positive, allow_hyphen_values = true)]
    pub bandwidth: AutoOr,
    #[arg(long, default_value = "auto", value_parser = auto_or_positive, allow_hyphen_values = true)]
    pub epsilon: AutoOr,
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    pub kernel: KernelArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave the wall-clock time out of the report so output is reproducible
    /// byte for byte.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Gaussian,
    Exponential,
}

impl From<KernelArg> for KernelFamily {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Gaussian => KernelFamily::Gaussian,
            KernelArg::Exponential => KernelFamily::Exponential,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct SpectrumArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = auto_or_positive, allow_hyphen_values = true)]
    pub bandwidth: AutoOr,
    #[arg(long)]
    pub top: usize,
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    pub kernel: KernelArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Tail,
    Bound,
    Perturb,
    Interleave,
    Analytic,
    All,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Kmeans,
    Njw,
}

#[derive(Debug, clap::Args)]
pub struct BaselineArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Affinity bandwidth for njw; the DaSpec heuristic when `auto`.
    #[arg(long, default_value = "auto", value_parser = auto_or_positive, allow_hyphen_values = true)]
    pub bandwidth: AutoOr,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedReport {
    /// Zero-based position in the descending spectrum.
    pub index: usize,
    pub eigenvalue: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub n: usize,
    pub g_hat: usize,
    pub selected: Vec<SelectedReport>,
    pub labels: Vec<usize>,
    pub kernel: KernelFamily,
    pub bandwidth: f64,
    pub bandwidth_mode: String,
    pub epsilon_mode: String,
    pub eigenvalue_floor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub algo: String,
    pub k: usize,
    pub seed: u64,
    pub labels: Vec<usize>,
    /// Within-cluster sum of squares of the final k-means step.
    pub criterion: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<f64>,
}

/// One line of a verify report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyLine {
    pub name: String,
    pub margin: f64,
    pub status: CheckStatus,
}

impl VerifyLine {
    fn new(name: impl Into<String>, margin: f64, status: CheckStatus) -> Self {
        Self { name: name.into(), margin, status }
    }

    fn from_margin(name: impl Into<String>, margin: f64) -> Self {
        Self::new(name, margin, CheckStatus::from_bool(margin >= 0.0))
    }
}

impl std::fmt::Display for VerifyLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}\t{:+.6e}\t{}", self.name, self.margin, self.status.as_str())
    }
}

pub fn run() -> ExitCode {
    run_cli(Cli::parse())
}

pub fn run_cli(cli: Cli) -> ExitCode {
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            let obj = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{obj}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Synth(a) => cmd_synth(&a).map(|_| true),
        Command::Cluster(a) => cmd_cluster(&a).map(|_| true),
        Command::Spectrum(a) => cmd_spectrum(&a).map(|_| true),
        Command::Verify(a) => cmd_verify(&a),
        Command::Baseline(a) => cmd_baseline(&a).map(|_| true),
    }
}

fn emit(out: Option<&Path>, content: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Input(e.to_string()))?;
    s.push('\n');
    emit(out, s.as_bytes())
}

/// The line mixture 0.5 N(2, 1) + 0.5 N(-2, 1).
pub fn two_gaussians_spec() -> MixtureSpec {
    MixtureSpec::new(vec![
        (0.5, Component::gaussian_1d(2.0, 1.0)),
        (0.5, Component::gaussian_1d(-2.0, 1.0)),
    ])
    .expect("valid weights")
}

pub fn synthesize(design: Design, noise: f64, n: Option<usize>, seed: u64) -> Result<DataSet> {
    match design {
        Design::Gauss6 => gen_gaussian_mixture(&gauss6_spec(seed)?, n.unwrap_or(400), seed),
        Design::Ring => gen_ring_suite(noise, seed),
        Design::TwoGaussians => gen_gaussian_mixture(&two_gaussians_spec(), n.unwrap_or(1000), seed),
    }
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let data = synthesize(args.design, args.noise, args.n, args.seed)?;
    let mut buf = Vec::new();
    write_dataset(&data, &mut buf)?;
    emit(args.out.as_deref(), &buf)
}

pub fn cluster_report(data: &DataSet, params: &DaSpecParams, timing: bool) -> Result<ClusterReport> {
    let start = Instant::now();
    let fit = cluster(data, params)?;
    let elapsed = start.elapsed().as_secs_f64();
    let agreement = data.labels().map(|t| label_agreement(&fit.labels, t)).transpose()?;
    Ok(ClusterReport {
        n: data.len(),
        g_hat: fit.g_hat,
        selected: fit
            .selected
            .iter()
            .map(|s| SelectedReport { index: s.index, eigenvalue: s.eigenvalue, epsilon: s.epsilon })
            .collect(),
        labels: fit.labels.clone(),
        kernel: fit.kernel().family,
        bandwidth: fit.kernel().bandwidth,
        bandwidth_mode: match params.bandwidth {
            Bandwidth::Auto => "auto".into(),
            Bandwidth::Fixed(_) => "fixed".into(),
        },
        epsilon_mode: match params.epsilon {
            EpsilonRule::MaxOverN => "auto".into(),
            EpsilonRule::Fixed(_) => "fixed".into(),
        },
        eigenvalue_floor: params.eigenvalue_floor,
        agreement,
        wall_time_seconds: timing.then_some(elapsed),
    })
}

pub fn cmd_cluster(args: &ClusterArgs) -> Result<ClusterReport> {
    let data = read_dataset_file(&args.input)?;
    let mut params = DaSpecParams { family: args.kernel.into(), ..DaSpecParams::default() };
    if let AutoOr::Value(w) = args.bandwidth {
        params = params.with_bandwidth(w);
    }
    if let AutoOr::Value(e) = args.epsilon {
        params = params.with_epsilon(e);
    }
    let report = cluster_report(&data, &params, !args.no_timing)?;
    emit_json(args.out.as_deref(), &report)?;
    Ok(report)
}

fn resolve_bandwidth(bw: AutoOr, data: &DataSet) -> Result<f64> {
    match bw {
        AutoOr::Value(w) => Ok(w),
        AutoOr::Auto => select_bandwidth(data),
    }
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> Result<()> {
    let data = read_dataset_file(&args.input)?;
    let n = data.len();
    if args.top == 0 || args.top > n {
        return Err(Error::Input(format!("--top must lie in 1..={n}, got {}", args.top)));
    }
    let spec = KernelSpec::new(args.kernel.into(), resolve_bandwidth(args.bandwidth, &data)?)?;
    let eig = eigendecompose(&kernel_matrix(&spec, &data)?)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["index".to_string(), "eigenvalue".to_string()];
    header.extend((1..=args.top).map(|j| format!("v{j}")));
    w.write_record(&header)?;
    for i in 0..n {
        let mut row = vec![i.to_string(), format_float(eig.value(i))];
        row.extend((0..args.top).map(|j| format_float(eig.vector(j)[i])));
        w.write_record(&row)?;
    }
    let buf = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    emit(args.out.as_deref(), &buf)
}

pub fn cmd_baseline(args: &BaselineArgs) -> Result<BaselineReport> {
    let data = read_dataset_file(&args.input)?;
    let (labels, criterion, bandwidth) = match args.algo {
        Algo::Kmeans => {
            let fit = kmeans(&data, args.k, args.restarts, args.seed)?;
            (fit.labels, fit.criterion, None)
        }
        Algo::Njw => {
            let w = resolve_bandwidth(args.bandwidth, &data)?;
            let fit = njw_spectral_with_restarts(&data, args.k, w, args.restarts, args.seed)?;
            (fit.labels, fit.kmeans.criterion, Some(w))
        }
    };
    let agreement = data.labels().map(|t| label_agreement(&labels, t)).transpose()?;
    let report = BaselineReport {
        algo: match args.algo {
            Algo::Kmeans => "kmeans".into(),
            Algo::Njw => "njw".into(),
        },
        k: args.k,
        seed: args.seed,
        labels,
        criterion,
        bandwidth,
        agreement,
    };
    emit_json(args.out.as_deref(), &report)?;
    Ok(report)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let lines = verify_suite(args.suite, args.seed)?;
    let mut stdout = std::io::stdout().lock();
    for line in &lines {
        writeln!(stdout, "{line}")?;
    }
    Ok(lines.iter().all(|l| l.status != CheckStatus::Fail))
}

pub fn verify_suite(suite: Suite, seed: u64) -> Result<Vec<VerifyLine>> {
    let mut lines = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Tail {
        lines.extend(verify_tail(seed)?);
    }
    if all || suite == Suite::Bound {
        lines.extend(verify_bound(seed)?);
    }
    if all || suite == Suite::Perturb {
        lines.extend(verify_perturb(seed)?);
    }
    if all || suite == Suite::Interleave {
        lines.extend(verify_interleave(seed)?);
    }
    if all || suite == Suite::Analytic {
        lines.extend(verify_analytic(seed)?);
    }
    Ok(lines)
}

const VERIFY_DATASETS: u64 = 4;

fn verify_tail(seed: u64) -> Result<Vec<VerifyLine>> {
    let mut lines = Vec::new();
    for k in 0..VERIFY_DATASETS {
        let s = seed.wrapping_add(k);
        let data = gen_gaussian_mixture(&gauss6_spec(s)?, 150, s)?;
        let spec = KernelSpec::gaussian(select_bandwidth(&data)?)?;
        let eig = eigendecompose(&kernel_matrix(&spec, &data)?)?;
        let probes = probe_points(&data, 60, 3.0 * spec.bandwidth, s);
        let tail = check_tail_bound(&spec, &data, &eig, &probes)?;
        lines.push(VerifyLine::new(
            format!("tail.gauss6.seed{s}"),
            tail.worst_margin,
            CheckStatus::from_bool(tail.passed()),
        ));
        let compact = check_compact_bound_all(&spec, &data, &eig, &probes)?;
        lines.push(VerifyLine::new(
            format!("compact.gauss6.seed{s}"),
            compact.worst_margin,
            CheckStatus::from_bool(compact.passed()),
        ));
    }
    Ok(lines)
}

fn separated_pair(separation: f64) -> MixtureSpec {
    MixtureSpec::new(vec![
        (0.5, Component::gaussian_1d(0.0, 1.0)),
        (0.5, Component::gaussian_1d(separation, 1.0)),
    ])
    .expect("valid weights")
}

fn verify_bound(seed: u64) -> Result<Vec<VerifyLine>> {
    let spec = KernelSpec::gaussian(0.3)?;
    [2.0, 4.0, 6.0, 8.0]
        .iter()
        .map(|&sep| {
            let rep = check_top_eigenvalue_bound(&spec, &separated_pair(sep), 400, seed)?;
            Ok(VerifyLine::new(format!("top-eigenvalue.sep{sep}"), rep.margin, rep.status))
        })
        .collect()
}

fn verify_perturb(seed: u64) -> Result<Vec<VerifyLine>> {
    let spec = KernelSpec::gaussian(0.3)?;
    let cases = [
        ("two-gaussians", two_gaussians_spec()),
        (
            "unbalanced",
            MixtureSpec::new(vec![
                (0.8, Component::gaussian_1d(0.0, 1.0)),
                (0.2, Component::gaussian_1d(6.0, 1.0)),
            ])?,
        ),
    ];
    cases
        .into_iter()
        .map(|(name, mix)| {
            let rep = check_eigenfunction_perturbation(&spec, &mix, 400, seed)?;
            Ok(VerifyLine::new(format!("perturbation.{name}"), rep.margin, rep.status))
        })
        .collect()
}

fn verify_interleave(seed: u64) -> Result<Vec<VerifyLine>> {
    let spec = KernelSpec::gaussian(0.3)?;
    let mix = MixtureSpec::new(vec![
        (0.95, Component::gaussian_1d(0.0, 0.5)),
        (0.05, Component::gaussian_1d(6.0, 0.5)),
    ])?;
    let rep = check_interleaving(&spec, &mix, 400, 3, seed)?;
    Ok(rep
        .rows
        .iter()
        .enumerate()
        .map(|(j, row)| {
            let value_margin = 0.1 * row.merged_value + rep.slack - (row.mixture_value - row.merged_value).abs();
            let mass_margin = row.concentration - crate::theory::CONCENTRATION_MIN;
            VerifyLine::from_margin(format!("interleave.eigen{j}"), value_margin.min(mass_margin))
        })
        .collect())
}

/// Empirical versus closed-form spectrum for N(0, 1) data under a Gaussian
/// kernel with beta = 4.
fn verify_analytic(seed: u64) -> Result<Vec<VerifyLine>> {
    let mut lines = Vec::new();
    let gh = GaussHermite::new(80)?;
    let op = GaussianOperatorSpec::new(0.0, 1.0, std::f64::consts::FRAC_1_SQRT_2)?;
    let mut worst = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            let ip = gh.expectation(0.0, 1.0, |x| analytic_eigenfunction(&op, i, x) * analytic_eigenfunction(&op, j, x));
            worst = worst.max((ip - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    lines.push(VerifyLine::from_margin("analytic.orthonormality", 1e-6 - worst));

    let mix = MixtureSpec::new(vec![(1.0, Component::gaussian_1d(0.0, 1.0))])?;
    let data = gen_gaussian_mixture(&mix, 1000, seed)?;
    let spec = KernelSpec::gaussian(op.bandwidth)?;
    let eig = eigendecompose(&kernel_matrix(&spec, &data)?)?;
    for i in 0..5 {
        let exact = analytic_eigenvalue(&op, i);
        let rel = (eig.value(i) - exact).abs() / exact;
        lines.push(VerifyLine::from_margin(format!("analytic.eigenvalue{i}"), 0.1 - rel));
    }
    let sup = top_eigenfunction_sup_error(&spec, &data, &eig, &op, 241)?;
    lines.push(VerifyLine::from_margin("analytic.top-eigenfunction", 0.1 - sup));
    Ok(lines)
}

/// Sup over a grid on [-3, 3] of |phi_0 - phi_0 analytic| after extending the
/// top eigenvector, normalizing it in L2(P_n) and aligning its sign.
pub fn top_eigenfunction_sup_error(
    spec: &KernelSpec,
    data: &DataSet,
    eig: &EigenSystem,
    op: &GaussianOperatorSpec,
    grid: usize,
) -> Result<f64> {
    let scale = (data.len() as f64).sqrt() / norm(eig.vector(0));
    let mut values = Vec::with_capacity(grid);
    for g in 0..grid {
        let x = -3.0 + 6.0 * g as f64 / (grid - 1) as f64;
        let phi = scale * extend_eigenfunction(spec, data, eig.value(0), eig.vector(0), &[x])?;
        values.push((phi, analytic_eigenfunction(op, 0, x)));
    }
    let err = |sign: f64| values.iter().map(|(e, a)| (sign * e - a).abs()).fold(0.0, f64::max);
    Ok(err(1.0).min(err(-1.0)))
}
