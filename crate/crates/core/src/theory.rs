//! Numerical checks of the spectral theory behind DaSpec, run on empirical
//! operators.
//!
//! Every check works with the empirical measure P_n of a sample, so the
//! eigenfunction of an eigenpair (lambda, v) of K_n is the extension
//! phi(x) = (1/(n lambda)) sum_i K(x, x_i) v_i, rescaled to unit norm in
//! L2(P_n). Mixture checks pool fixed per-component counts into one sample,
//! which makes the pooled empirical measure exactly the mixture of the
//! component empirical measures with weights n_g / n.

use serde::Serialize;

use crate::datagen::{normal, stream, Component, MixtureSpec};
use crate::error::{Error, Result};
use crate::kernels::{kernel_matrix, kernel_row, sq_dist, DataSet, KernelFamily, KernelSpec};
use crate::linalg::{eigendecompose, eigenvalues, norm, EigenSystem};

/// Eigenpairs at or below this eigenvalue are not checked.
pub const EIGENVALUE_FLOOR: f64 = 1e-10;
/// Absolute tolerance of the exact tail inequalities.
pub const BOUND_TOL: f64 = 1e-10;
/// Relative tolerance of eigenvalue interleaving.
pub const INTERLEAVE_REL_TOL: f64 = 0.10;
/// Minimum share of squared eigenvector mass on a single component.
pub const CONCENTRATION_MIN: f64 = 0.80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl CheckStatus {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::NotApplicable => "not-applicable",
        }
    }
}

/// One evaluated inequality |phi(x)| <= bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub eigen_index: usize,
    pub point_index: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundCheck {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub checks: usize,
    pub violations: usize,
    /// Smallest rhs - lhs seen (negative means a violation).
    pub worst_margin: f64,
    pub worst: Option<BoundCheck>,
}

impl BoundReport {
    fn new() -> Self {
        Self { checks: 0, violations: 0, worst_margin: f64::INFINITY, worst: None }
    }

    fn record(&mut self, c: BoundCheck) {
        self.checks += 1;
        if c.lhs > c.rhs + BOUND_TOL {
            self.violations += 1;
        }
        if c.margin() < self.worst_margin {
            self.worst_margin = c.margin();
            self.worst = Some(c);
        }
    }

    fn merge(&mut self, other: BoundReport) {
        self.checks += other.checks;
        self.violations += other.violations;
        if other.worst_margin < self.worst_margin {
            self.worst_margin = other.worst_margin;
            self.worst = other.worst;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn check_dims(data: &DataSet, eig: &EigenSystem) -> Result<()> {
    if eig.dim() != data.len() {
        return Err(Error::Input(format!(
            "spectrum of dimension {} does not belong to {} points",
            eig.dim(),
            data.len()
        )));
    }
    Ok(())
}

// |phi(x)| in L2(P_n) normalization, for every eigenpair above the floor.
fn normalized_abs_eigenfunctions<'a>(
    eig: &'a EigenSystem,
    row: &'a [f64],
) -> impl Iterator<Item = (usize, f64, f64)> + 'a {
    let n = row.len() as f64;
    eig.values()
        .iter()
        .enumerate()
        .take_while(|(_, &l)| l > EIGENVALUE_FLOOR)
        .map(move |(j, &lambda)| {
            let v = eig.vector(j);
            let s: f64 = row.iter().zip(v).map(|(k, x)| k * x).sum();
            // phi = s / (n lambda), unit-normalized by sqrt(n) / |v|
            (j, lambda, s.abs() / (n.sqrt() * lambda * norm(v)))
        })
}

/// Tail decay: |phi(x)| <= (1/lambda) sqrt((1/n) sum_i K(x, x_i)^2) at every
/// test point, for every eigenpair with lambda above the floor. For the
/// empirical measure this is an exact Cauchy-Schwarz inequality.
pub fn check_tail_bound(
    spec: &KernelSpec,
    data: &DataSet,
    eig: &EigenSystem,
    test_points: &[Vec<f64>],
) -> Result<BoundReport> {
    check_dims(data, eig)?;
    let n = data.len() as f64;
    let mut report = BoundReport::new();
    for (p, x) in test_points.iter().enumerate() {
        let row = kernel_row(spec, data, x)?;
        let root_mean_sq = (row.iter().map(|k| k * k).sum::<f64>() / n).sqrt();
        for (j, lambda, lhs) in normalized_abs_eigenfunctions(eig, &row) {
            report.record(BoundCheck { eigen_index: j, point_index: p, lhs, rhs: root_mean_sq / lambda });
        }
    }
    Ok(report)
}

/// Compact-support bound: |phi(x)| <= k(dist(x, D)) / lambda with D the
/// sample set.
pub fn check_compact_bound(spec: &KernelSpec, data: &DataSet, eig: &EigenSystem, x: &[f64]) -> Result<BoundReport> {
    check_dims(data, eig)?;
    let row = kernel_row(spec, data, x)?;
    let dist = data
        .points()
        .map(|p| sq_dist(x, p))
        .fold(f64::INFINITY, f64::min)
        .sqrt();
    let k = spec.profile(dist);
    let mut report = BoundReport::new();
    for (j, lambda, lhs) in normalized_abs_eigenfunctions(eig, &row) {
        report.record(BoundCheck { eigen_index: j, point_index: 0, lhs, rhs: k / lambda });
    }
    Ok(report)
}

/// [`check_compact_bound`] over many points, merged.
pub fn check_compact_bound_all(
    spec: &KernelSpec,
    data: &DataSet,
    eig: &EigenSystem,
    points: &[Vec<f64>],
) -> Result<BoundReport> {
    let mut report = BoundReport::new();
    for (p, x) in points.iter().enumerate() {
        let mut r = check_compact_bound(spec, data, eig, x)?;
        if let Some(w) = r.worst.as_mut() {
            w.point_index = p;
        }
        report.merge(r);
    }
    Ok(report)
}

/// Overlap constant r = sqrt(w1 w2 E[K(X, Y)^2]), X ~ P1, Y ~ P2 independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// Monte Carlo mean of K^2 and its standard error.
    pub mean_sq_kernel: f64,
    pub mean_std_error: f64,
    /// Exact value when both components are Gaussian or point masses and the
    /// kernel is Gaussian.
    pub closed_form: Option<f64>,
}

pub const MIN_MC_SAMPLES: usize = 1000;

pub fn compute_r(
    spec: &KernelSpec,
    p1: &Component,
    p2: &Component,
    weights: (f64, f64),
    mc_samples: usize,
    seed: u64,
) -> Result<OverlapEstimate> {
    if mc_samples < MIN_MC_SAMPLES {
        return Err(Error::Input(format!(
            "compute_r needs at least {MIN_MC_SAMPLES} Monte Carlo samples, got {mc_samples}"
        )));
    }
    if p1.dim() != p2.dim() {
        return Err(Error::Input("components have differing dimensions".into()));
    }
    let (w1, w2) = weights;
    if !(w1 >= 0.0 && w2 >= 0.0) {
        return Err(Error::Input("weights must be nonnegative".into()));
    }
    let d = p1.dim();
    let mut xs = Vec::with_capacity(mc_samples * d);
    let mut ys = Vec::with_capacity(mc_samples * d);
    p1.sample_into(mc_samples, &mut stream(seed, 1), &mut xs)?;
    p2.sample_into(mc_samples, &mut stream(seed, 2), &mut ys)?;
    let vals: Vec<f64> = xs
        .chunks_exact(d)
        .zip(ys.chunks_exact(d))
        .map(|(x, y)| spec.from_sq_dist(sq_dist(x, y)).powi(2))
        .collect();
    let m = mc_samples as f64;
    let mean = vals.iter().sum::<f64>() / m;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let mean_se = (var / m).sqrt();
    let w = w1 * w2;
    let estimate = (w * mean).sqrt();
    let std_error = if estimate > 0.0 { w * mean_se / (2.0 * estimate) } else { 0.0 };
    let closed_form = gaussian_overlap_sq(spec, p1, p2).map(|e| (w * e).sqrt());
    Ok(OverlapEstimate { estimate, std_error, mean_sq_kernel: mean, mean_std_error: mean_se, closed_form })
}

/// E[K(X, Y)^2] in closed form for Gaussian / point-mass components under a
/// Gaussian kernel. With D = X - Y ~ N(delta, v I_d), v = s1^2 + s2^2:
/// E exp(-|D|^2 / w^2) = (1 + 2v/w^2)^(-d/2) exp(-|delta|^2 / (w^2 + 2v)).
pub fn gaussian_overlap_sq(spec: &KernelSpec, p1: &Component, p2: &Component) -> Option<f64> {
    if spec.family != KernelFamily::Gaussian {
        return None;
    }
    let moments = |c: &Component| match c {
        Component::Gaussian { mean, std_dev } => Some((mean.clone(), *std_dev)),
        Component::PointMass { location } => Some((location.clone(), 0.0)),
        Component::Ring { .. } => None,
    };
    let (m1, s1) = moments(p1)?;
    let (m2, s2) = moments(p2)?;
    let w2 = spec.bandwidth * spec.bandwidth;
    let v = s1 * s1 + s2 * s2;
    let d = m1.len() as f64;
    let delta2 = sq_dist(&m1, &m2);
    Some((1.0 + 2.0 * v / w2).powf(-d / 2.0) * (-delta2 / (w2 + 2.0 * v)).exp())
}

/// r computed from two samples: sqrt(w1 w2 mean_{i,j} K(x_i, y_j)^2).
pub fn empirical_r(spec: &KernelSpec, a: &DataSet, b: &DataSet, weights: (f64, f64)) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut s = 0.0;
    for x in a.points() {
        for y in b.points() {
            s += spec.from_sq_dist(sq_dist(x, y)).powi(2);
        }
    }
    (weights.0 * weights.1 * s / (a.len() * b.len()) as f64).sqrt()
}

/// A seeded sample pooled from a mixture with fixed per-component counts.
#[derive(Debug, Clone)]
pub struct PooledSample {
    pub data: DataSet,
    pub counts: Vec<usize>,
}

impl PooledSample {
    pub fn draw(mixture: &MixtureSpec, n: usize, seed: u64) -> Result<Self> {
        let counts = mixture.fixed_counts(n);
        let data = mixture.sample_with_counts(&counts, seed)?;
        let first = data.point(0);
        if data.points().all(|p| p == first) && data.len() > 1 {
            return Err(Error::Input("all sampled points coincide".into()));
        }
        Ok(Self { data, counts })
    }

    pub fn n(&self) -> usize {
        self.data.len()
    }

    /// Index range of component g inside the pooled data.
    pub fn range(&self, g: usize) -> std::ops::Range<usize> {
        let start: usize = self.counts[..g].iter().sum();
        start..start + self.counts[g]
    }

    pub fn component(&self, g: usize) -> DataSet {
        self.data.select(&self.range(g).collect::<Vec<_>>())
    }

    /// Empirical weight n_g / n.
    pub fn weight(&self, g: usize) -> f64 {
        self.counts[g] as f64 / self.n() as f64
    }

    /// 3 / sqrt(smallest nonempty component count).
    pub fn slack(&self) -> f64 {
        let m = self.counts.iter().copied().filter(|&c| c > 0).min().unwrap_or(1);
        3.0 / (m as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    /// Top eigenvalue of the pooled mixture kernel matrix.
    pub lambda0: f64,
    /// Per component: n_g / n times the top eigenvalue of its own kernel matrix.
    pub lambda0_parts: Vec<f64>,
    pub r: f64,
    /// Eigen-gap lambda_0 - lambda_1 of the mixture.
    pub t: f64,
    /// Cross-term norm of the dominant component's top eigenfunction, when
    /// computed.
    pub epsilon: Option<f64>,
    /// Gap from the mixture eigenvalue nearest w1 lambda_0^1 to the rest of
    /// the spectrum.
    pub s: Option<f64>,
    /// Aligned L2(P_n) distance between the two top eigenfunctions.
    pub distance: Option<f64>,
    pub slack: f64,
    /// Smallest slack-adjusted margin of the asserted inequalities.
    pub margin: f64,
    pub bound_satisfied: bool,
    pub status: CheckStatus,
}

fn top_parts(sample: &PooledSample, spec: &KernelSpec) -> Result<Vec<f64>> {
    (0..sample.counts.len())
        .map(|g| {
            if sample.counts[g] == 0 {
                return Ok(0.0);
            }
            let m = kernel_matrix(spec, &sample.component(g))?;
            Ok(sample.weight(g) * eigenvalues(&m)?[0])
        })
        .collect()
}

fn two_components(mixture: &MixtureSpec) -> Result<()> {
    if mixture.len() != 2 {
        return Err(Error::Input(format!(
            "check needs a two-component mixture, got {} components",
            mixture.len()
        )));
    }
    Ok(())
}

/// Top-eigenvalue sandwich
/// max(w1 l1, w2 l2) <= lambda_0 <= max(w1 l1, w2 l2) + r, each side with
/// sampling slack. `n` is the pooled sample size.
pub fn check_top_eigenvalue_bound(
    spec: &KernelSpec,
    mixture: &MixtureSpec,
    n: usize,
    seed: u64,
) -> Result<PerturbationReport> {
    two_components(mixture)?;
    let sample = PooledSample::draw(mixture, n, seed)?;
    let mixed = eigenvalues(&kernel_matrix(spec, &sample.data)?)?;
    let parts = top_parts(&sample, spec)?;
    let r = empirical_r(spec, &sample.component(0), &sample.component(1), (sample.weight(0), sample.weight(1)));
    let best = parts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = sample.slack();
    let lower = mixed[0] - (best - slack);
    let upper = best + r + slack - mixed[0];
    let ok = lower >= 0.0 && upper >= 0.0;
    Ok(PerturbationReport {
        lambda0: mixed[0],
        lambda0_parts: parts,
        r,
        t: mixed[0] - mixed.get(1).copied().unwrap_or(0.0),
        epsilon: None,
        s: None,
        distance: None,
        slack,
        margin: lower.min(upper),
        bound_satisfied: ok,
        status: CheckStatus::from_bool(ok),
    })
}

/// Top-eigenfunction perturbation. With component 1 the one with the larger
/// w_g lambda_0^g and f its top eigenfunction, unit in L2(P_n):
/// epsilon = |w2 K_{P2} f|, and if epsilon + r < t then
/// (i) |w1 lambda_0^1 - lambda_0| <= epsilon and
/// (ii) |f - phi_0| <= epsilon / (t - epsilon) after sign alignment,
/// each with sampling slack. When epsilon + r >= t the report is
/// not-applicable.
pub fn check_eigenfunction_perturbation(
    spec: &KernelSpec,
    mixture: &MixtureSpec,
    n: usize,
    seed: u64,
) -> Result<PerturbationReport> {
    two_components(mixture)?;
    let sample = PooledSample::draw(mixture, n, seed)?;
    let total = sample.n();
    let mixed = eigendecompose(&kernel_matrix(spec, &sample.data)?)?;
    let parts = top_parts(&sample, spec)?;
    let dom = if parts[0] >= parts[1] { 0 } else { 1 };
    let other = 1 - dom;
    let r = empirical_r(spec, &sample.component(0), &sample.component(1), (sample.weight(0), sample.weight(1)));

    // Top eigenpair of the dominant component, extended to the pooled sample.
    let dom_data = sample.component(dom);
    let dom_eig = eigendecompose(&kernel_matrix(spec, &dom_data)?)?;
    let (l1, v1) = (dom_eig.value(0), dom_eig.vector(0));
    let nd = dom_data.len() as f64;
    let mut f: Vec<f64> = sample
        .data
        .points()
        .map(|x| {
            let s: f64 = dom_data.points().zip(v1).map(|(p, v)| spec.from_sq_dist(sq_dist(x, p)) * v).sum();
            s / (nd * l1)
        })
        .collect();
    let f_norm = (f.iter().map(|v| v * v).sum::<f64>() / total as f64).sqrt();
    f.iter_mut().for_each(|v| *v /= f_norm);

    // Cross term (1/n) sum_{j in other} K(x, x_j) f(x_j), whose L2(P_n) norm is epsilon.
    let other_range = sample.range(other);
    let cross: Vec<f64> = sample
        .data
        .points()
        .map(|x| {
            other_range
                .clone()
                .map(|j| spec.from_sq_dist(sq_dist(x, sample.data.point(j))) * f[j])
                .sum::<f64>()
                / total as f64
        })
        .collect();
    let epsilon = (cross.iter().map(|v| v * v).sum::<f64>() / total as f64).sqrt();

    let lambda0 = mixed.value(0);
    let t = lambda0 - if total > 1 { mixed.value(1) } else { 0.0 };
    let target = parts[dom];

    // Gap between the mixture eigenvalue nearest the target and the rest.
    let k = (0..total)
        .min_by(|&a, &b| (mixed.value(a) - target).abs().total_cmp(&(mixed.value(b) - target).abs()))
        .expect("nonempty");
    let s = mixed
        .values()
        .iter()
        .filter(|&&l| l != mixed.value(k))
        .map(|l| (l - mixed.value(k)).abs())
        .fold(f64::INFINITY, f64::min);

    let phi0: Vec<f64> = mixed.vector(0).iter().map(|v| v * (total as f64).sqrt()).collect();
    let dist_with = |sign: f64| {
        (f.iter().zip(&phi0).map(|(a, b)| (a - sign * b).powi(2)).sum::<f64>() / total as f64).sqrt()
    };
    let distance = dist_with(1.0).min(dist_with(-1.0));

    let slack = sample.slack();
    let applicable = epsilon + r < t;
    let eig_margin = epsilon + slack - (target - lambda0).abs();
    let fn_margin = if t > epsilon {
        epsilon / (t - epsilon) + slack - distance
    } else {
        f64::NEG_INFINITY
    };
    let ok = eig_margin >= 0.0 && fn_margin >= 0.0;
    Ok(PerturbationReport {
        lambda0,
        lambda0_parts: parts,
        r,
        t,
        epsilon: Some(epsilon),
        s: Some(s),
        distance: Some(distance),
        slack,
        margin: eig_margin.min(fn_margin),
        bound_satisfied: ok,
        status: if applicable { CheckStatus::from_bool(ok) } else { CheckStatus::NotApplicable },
    })
}

/// Mixture eigenvalue paired with the merged component list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterleaveRow {
    pub mixture_value: f64,
    /// j-th largest of { w_g lambda_i^g } over all components.
    pub merged_value: f64,
    /// Component (1-based) that contributed `merged_value`.
    pub merged_component: usize,
    /// Component (1-based) carrying most of the eigenvector's squared mass.
    pub dominant_component: usize,
    pub concentration: f64,
    pub value_ok: bool,
    pub concentrated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterleaveReport {
    pub rows: Vec<InterleaveRow>,
    pub slack: f64,
    pub passed: bool,
}

impl InterleaveReport {
    /// Number of leading eigenvectors concentrated on `component` before the
    /// first one concentrated elsewhere.
    pub fn leading_run(&self, component: usize) -> usize {
        self.rows
            .iter()
            .take_while(|r| r.concentrated && r.dominant_component == component)
            .count()
    }
}

/// Mixture-spectrum interleaving: the top-k mixture eigenvalues match the
/// top k of the merged list { w_g lambda_i^g } and each top-k eigenvector
/// puts most of its squared mass on one component.
pub fn check_interleaving(
    spec: &KernelSpec,
    mixture: &MixtureSpec,
    n: usize,
    k: usize,
    seed: u64,
) -> Result<InterleaveReport> {
    let sample = PooledSample::draw(mixture, n, seed)?;
    interleaving_on_sample(spec, &sample, k)
}

pub fn interleaving_on_sample(spec: &KernelSpec, sample: &PooledSample, k: usize) -> Result<InterleaveReport> {
    if k == 0 || k > sample.n() {
        return Err(Error::Input(format!("k must lie in 1..={}, got {k}", sample.n())));
    }
    let mixed = eigendecompose(&kernel_matrix(spec, &sample.data)?)?;
    let mut merged: Vec<(f64, usize)> = Vec::new();
    for g in 0..sample.counts.len() {
        if sample.counts[g] == 0 {
            continue;
        }
        let w = sample.weight(g);
        let vals = eigenvalues(&kernel_matrix(spec, &sample.component(g))?)?;
        merged.extend(vals.into_iter().map(|v| (w * v, g + 1)));
    }
    merged.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let slack = sample.slack();
    let mut rows = Vec::with_capacity(k);
    for j in 0..k {
        let v = mixed.vector(j);
        let masses: Vec<f64> = (0..sample.counts.len())
            .map(|g| sample.range(g).map(|i| v[i] * v[i]).sum())
            .collect();
        let total: f64 = masses.iter().sum();
        let (dom, mass) = masses
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (g, &m)| if m > acc.1 { (g, m) } else { acc });
        let (mv, mg) = merged.get(j).copied().unwrap_or((0.0, 0));
        let lambda = mixed.value(j);
        rows.push(InterleaveRow {
            mixture_value: lambda,
            merged_value: mv,
            merged_component: mg,
            dominant_component: dom + 1,
            concentration: mass / total,
            value_ok: (lambda - mv).abs() <= INTERLEAVE_REL_TOL * mv.abs() + slack,
            concentrated: mass / total >= CONCENTRATION_MIN,
        });
    }
    let passed = rows.iter().all(|r| r.value_ok && r.concentrated);
    Ok(InterleaveReport { rows, slack, passed })
}

/// Random test points around a data set: half drawn near sample points,
/// half uniform on the bounding box widened by `margin`.
pub fn probe_points(data: &DataSet, count: usize, margin: f64, seed: u64) -> Vec<Vec<f64>> {
    use rand::Rng;
    let d = data.dim();
    let (mut lo, mut hi) = (vec![f64::INFINITY; d], vec![f64::NEG_INFINITY; d]);
    for p in data.points() {
        for a in 0..d {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let mut rng = stream(seed, 7);
    (0..count)
        .map(|c| {
            if c % 2 == 0 {
                let base = data.point(rng.random_range(0..data.len()));
                base.iter().map(|b| b + 0.1 * margin * normal(&mut rng)).collect()
            } else {
                (0..d).map(|a| rng.random_range((lo[a] - margin)..=(hi[a] + margin))).collect()
            }
        })
        .collect()
}
