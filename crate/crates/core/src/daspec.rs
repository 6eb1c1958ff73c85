//! Data spectroscopic clustering.
//!
//! The number of groups is the number of kernel-matrix eigenvectors that do
//! not change sign (up to a small threshold); each point then goes to the
//! selected eigenvector with the largest magnitude at that point. New points
//! are classified the same way through the eigenfunction extension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{
    extend_eigenfunction, kernel_matrix_from_distances, DataSet, KernelFamily, KernelSpec,
    PairwiseDistances,
};
use crate::linalg::{eigendecompose, EigenSystem};
use crate::stats::{chi_square_quantile, nearest_rank_quantile};

/// Eigenpairs at or below this eigenvalue are treated as the null space.
pub const DEFAULT_EIGENVALUE_FLOOR: f64 = 1e-10;

/// Quantile level for each point's neighbor distance.
pub const NEIGHBOR_QUANTILE: f64 = 0.05;
/// Quantile level across points, and of the chi-square kernel range.
pub const COVERAGE_QUANTILE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "value")]
pub enum Bandwidth {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum EpsilonRule {
    /// eps_j = max_i |v_j(i)| / n
    MaxOverN,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DaSpecParams {
    pub bandwidth: Bandwidth,
    pub epsilon: EpsilonRule,
    pub eigenvalue_floor: f64,
    pub family: KernelFamily,
}

impl Default for DaSpecParams {
    fn default() -> Self {
        Self {
            bandwidth: Bandwidth::Auto,
            epsilon: EpsilonRule::MaxOverN,
            eigenvalue_floor: DEFAULT_EIGENVALUE_FLOOR,
            family: KernelFamily::Gaussian,
        }
    }
}

impl DaSpecParams {
    pub fn with_bandwidth(mut self, bandwidth: f64) -> Self {
        self.bandwidth = Bandwidth::Fixed(bandwidth);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = EpsilonRule::Fixed(epsilon);
        self
    }

    fn validate(&self) -> Result<()> {
        if let Bandwidth::Fixed(w) = self.bandwidth {
            KernelSpec::new(self.family, w)?;
        }
        if let EpsilonRule::Fixed(e) = self.epsilon {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::Input(format!("epsilon must be positive, got {e}")));
            }
        }
        if !(self.eigenvalue_floor.is_finite() && self.eigenvalue_floor > 0.0) {
            return Err(Error::Input("eigenvalue floor must be positive".into()));
        }
        Ok(())
    }
}

/// Parameters after resolution against the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub kernel: KernelSpec,
    pub bandwidth_mode: Bandwidth,
    pub epsilon_rule: EpsilonRule,
    pub eigenvalue_floor: f64,
}

/// One eigenvector that passed the no-sign-change test.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedEigenvector {
    /// Position in the descending spectrum, zero-based.
    pub index: usize,
    pub eigenvalue: f64,
    pub epsilon: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub g_hat: usize,
    /// Selected eigenvectors, in descending eigenvalue order.
    pub selected: Vec<SelectedEigenvector>,
    /// Labels in 1..=g_hat; label g refers to `selected[g - 1]`.
    pub labels: Vec<usize>,
    pub params_used: ResolvedParams,
}

impl ClusterResult {
    pub fn kernel(&self) -> &KernelSpec {
        &self.params_used.kernel
    }
}

/// Bandwidth heuristic: the 95% quantile over points of each point's 5%
/// neighbor-distance quantile, divided by the square root of the 95%
/// chi-square(d) quantile. Self-distances are excluded.
pub fn select_bandwidth(data: &DataSet) -> Result<f64> {
    select_bandwidth_from_distances(&PairwiseDistances::new(data), data.dim())
}

pub fn select_bandwidth_from_distances(dist: &PairwiseDistances, dim: usize) -> Result<f64> {
    let n = dist.len();
    if n < 2 {
        return Err(Error::Input(format!(
            "bandwidth selection needs at least two points, got {n}"
        )));
    }
    let mut neighbor = Vec::with_capacity(n - 1);
    let mut q = Vec::with_capacity(n);
    for i in 0..n {
        neighbor.clear();
        neighbor.extend(
            dist.sq_row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, s)| s.sqrt()),
        );
        q.push(nearest_rank_quantile(&mut neighbor, NEIGHBOR_QUANTILE)?);
    }
    let spread = nearest_rank_quantile(&mut q, COVERAGE_QUANTILE)?;
    if spread <= 0.0 {
        return Err(Error::DegenerateData(
            "neighbor-distance quantile is zero (points coincide), bandwidth would be 0".into(),
        ));
    }
    Ok(spread / chi_square_quantile(COVERAGE_QUANTILE, dim)?.sqrt())
}

/// eps = max_i |v_i| / n
pub fn select_epsilon(v: &[f64], n: usize) -> Result<f64> {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 || n == 0 {
        return Err(Error::Input("epsilon rule needs a nonzero vector".into()));
    }
    Ok(max / n as f64)
}

/// True iff every entry exceeds -eps, or every entry is below eps.
pub fn has_no_sign_change(v: &[f64], eps: f64) -> bool {
    v.iter().all(|&x| x > -eps) || v.iter().all(|&x| x < eps)
}

fn resolve_epsilon(rule: EpsilonRule, v: &[f64]) -> Result<f64> {
    match rule {
        EpsilonRule::MaxOverN => select_epsilon(v, v.len()),
        EpsilonRule::Fixed(e) => Ok(e),
    }
}

/// Runs the full pipeline: kernel matrix, eigendecomposition, eigenvector
/// selection and labeling.
pub fn cluster(data: &DataSet, params: &DaSpecParams) -> Result<ClusterResult> {
    Ok(cluster_with_spectrum(data, params)?.0)
}

/// Like [`cluster`], also returning the full kernel-matrix spectrum.
pub fn cluster_with_spectrum(data: &DataSet, params: &DaSpecParams) -> Result<(ClusterResult, EigenSystem)> {
    params.validate()?;
    let dist = PairwiseDistances::new(data);
    let bandwidth = match params.bandwidth {
        Bandwidth::Fixed(w) => w,
        // A single point gives K_n = [[1]] whatever the bandwidth.
        Bandwidth::Auto if data.len() == 1 => 1.0,
        Bandwidth::Auto => select_bandwidth_from_distances(&dist, data.dim())?,
    };
    let kernel = KernelSpec::new(params.family, bandwidth)?;
    let eig = eigendecompose(&kernel_matrix_from_distances(&kernel, &dist)?)?;
    let resolved = ResolvedParams {
        kernel,
        bandwidth_mode: params.bandwidth,
        epsilon_rule: params.epsilon,
        eigenvalue_floor: params.eigenvalue_floor,
    };
    let result = select_and_label(&eig, resolved)?;
    Ok((result, eig))
}

/// Eigenvector selection and labeling on a precomputed spectrum.
pub fn select_and_label(eig: &EigenSystem, params: ResolvedParams) -> Result<ClusterResult> {
    let mut selected = Vec::new();
    for (j, &lambda) in eig.values().iter().enumerate() {
        if lambda <= params.eigenvalue_floor {
            break;
        }
        let v = eig.vector(j);
        let eps = resolve_epsilon(params.epsilon_rule, v)?;
        if has_no_sign_change(v, eps) {
            selected.push(SelectedEigenvector {
                index: j,
                eigenvalue: lambda,
                epsilon: eps,
                vector: v.to_vec(),
            });
        }
    }
    if selected.is_empty() {
        return Err(Error::AlgorithmDegenerate(
            "no eigenvector above the eigenvalue floor passed the sign test".into(),
        ));
    }
    let labels = (0..eig.dim())
        .map(|i| argmax_label(selected.iter().map(|s| s.vector[i])))
        .collect();
    Ok(ClusterResult {
        g_hat: selected.len(),
        selected,
        labels,
        params_used: params,
    })
}

// One-based argmax of |value|; the first (larger-eigenvalue) wins ties.
fn argmax_label(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (g, v) in values.enumerate() {
        if v.abs() > best.1 {
            best = (g, v.abs());
        }
    }
    best.0 + 1
}

/// Labels a new point by the largest |phi_g(x)| over the selected
/// eigenfunctions. A point identical to a training point gets that point's
/// stored label, which is what the extension yields in exact arithmetic.
pub fn classify(result: &ClusterResult, data: &DataSet, spec: &KernelSpec, x: &[f64]) -> Result<usize> {
    data.check_point(x)?;
    if result.labels.len() != data.len() {
        return Err(Error::Input(format!(
            "result has {} labels but data has {} points",
            result.labels.len(),
            data.len()
        )));
    }
    if let Some(i) = data.points().position(|p| p == x) {
        return Ok(result.labels[i]);
    }
    let mut phis = Vec::with_capacity(result.selected.len());
    for s in &result.selected {
        phis.push(extend_eigenfunction(spec, data, s.eigenvalue, &s.vector, x)?);
    }
    Ok(argmax_label(phis.into_iter()))
}
