//! Radial kernels, kernel-matrix assembly and the out-of-sample extension of
//! kernel-matrix eigenvectors to eigenfunctions defined everywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    /// exp(-|x - y|^2 / (2 w^2))
    Gaussian,
    /// exp(-|x - y| / w)
    Exponential,
}

/// A radial kernel with its bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub bandwidth: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, bandwidth: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::Input(format!(
                "kernel bandwidth must be positive and finite, got {bandwidth}"
            )));
        }
        Ok(Self { family, bandwidth })
    }

    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, bandwidth)
    }

    pub fn exponential(bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::Exponential, bandwidth)
    }

    /// Kernel profile k(t) as a function of the distance t >= 0.
    #[inline]
    pub fn profile(&self, dist: f64) -> f64 {
        match self.family {
            KernelFamily::Gaussian => (-dist * dist / (2.0 * self.bandwidth * self.bandwidth)).exp(),
            KernelFamily::Exponential => (-dist / self.bandwidth).exp(),
        }
    }

    /// Kernel value from a squared distance; avoids a square root for the
    /// Gaussian family.
    #[inline]
    pub fn from_sq_dist(&self, sq: f64) -> f64 {
        match self.family {
            KernelFamily::Gaussian => (-sq / (2.0 * self.bandwidth * self.bandwidth)).exp(),
            KernelFamily::Exponential => (-sq.sqrt() / self.bandwidth).exp(),
        }
    }
}

/// n points in R^d, row-major, with optional ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    n: usize,
    d: usize,
    points: Vec<f64>,
    labels: Option<Vec<usize>>,
}

impl DataSet {
    pub fn new(d: usize, points: Vec<f64>, labels: Option<Vec<usize>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        if points.is_empty() || !points.len().is_multiple_of(d) {
            return Err(Error::Input(format!(
                "{} coordinates do not form a nonempty set of {d}-dimensional points",
                points.len()
            )));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("all coordinates must be finite".into()));
        }
        let n = points.len() / d;
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::Input(format!("{} labels for {n} points", l.len())));
            }
        }
        Ok(Self { n, d, points, labels })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Input("rows have differing dimensions".into()));
        }
        Self::new(d, rows.concat(), None)
    }

    /// One-dimensional data set from scalar samples.
    pub fn from_scalars(xs: &[f64]) -> Result<Self> {
        Self::new(1, xs.to_vec(), None)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Input(format!("{} labels for {} points", labels.len(), self.n)));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.d)
    }

    pub fn coords(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// New data set holding the points at `idx`, in that order.
    pub fn select(&self, idx: &[usize]) -> Self {
        let points = idx.iter().flat_map(|&i| self.point(i).iter().copied()).collect();
        let labels = self.labels.as_ref().map(|l| idx.iter().map(|&i| l[i]).collect());
        Self { n: idx.len(), d: self.d, points, labels }
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::Input(format!(
                "point has dimension {}, data has dimension {}",
                x.len(),
                self.d
            )));
        }
        Ok(())
    }
}

#[inline]
pub fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// All pairwise squared Euclidean distances, computed once and shared by the
/// bandwidth heuristic and kernel assembly.
#[derive(Debug, Clone)]
pub struct PairwiseDistances {
    n: usize,
    sq: Vec<f64>,
}

impl PairwiseDistances {
    pub fn new(data: &DataSet) -> Self {
        let n = data.len();
        let mut sq = vec![0.0; n * n];
        for i in 0..n {
            let xi = data.point(i);
            for j in (i + 1)..n {
                let v = sq_dist(xi, data.point(j));
                sq[i * n + j] = v;
                sq[j * n + i] = v;
            }
        }
        Self { n, sq }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn sq(&self, i: usize, j: usize) -> f64 {
        self.sq[i * self.n + j]
    }

    pub fn sq_row(&self, i: usize) -> &[f64] {
        &self.sq[i * self.n..(i + 1) * self.n]
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Input(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(spec.from_sq_dist(sq_dist(x, y)))
}

/// K_n with entries K(x_i, x_j) / n. The diagonal is exactly 1/n.
pub fn kernel_matrix(spec: &KernelSpec, data: &DataSet) -> Result<SymMatrix> {
    kernel_matrix_from_distances(spec, &PairwiseDistances::new(data))
}

pub fn kernel_matrix_from_distances(spec: &KernelSpec, dist: &PairwiseDistances) -> Result<SymMatrix> {
    let n = dist.len();
    let inv_n = 1.0 / n as f64;
    SymMatrix::from_upper_fn(n, |i, j| {
        if i == j {
            inv_n
        } else {
            spec.from_sq_dist(dist.sq(i, j)) * inv_n
        }
    })
}

/// Kernel values K(x, x_i) against every sample point.
pub fn kernel_row(spec: &KernelSpec, data: &DataSet, x: &[f64]) -> Result<Vec<f64>> {
    data.check_point(x)?;
    Ok(data.points().map(|p| spec.from_sq_dist(sq_dist(x, p))).collect())
}

/// Evaluates phi(x) = (1 / (n lambda)) sum_i K(x, x_i) v_i, the eigenfunction
/// of the empirical operator attached to the eigenpair (lambda, v). At a
/// sample point x_j this reproduces v_j.
pub fn extend_eigenfunction(
    spec: &KernelSpec,
    data: &DataSet,
    eigenvalue: f64,
    eigenvector: &[f64],
    x: &[f64],
) -> Result<f64> {
    if !(eigenvalue.is_finite() && eigenvalue > 0.0) {
        return Err(Error::Input(format!(
            "eigenfunction extension needs a positive eigenvalue, got {eigenvalue}"
        )));
    }
    if eigenvector.len() != data.len() {
        return Err(Error::Input(format!(
            "eigenvector has length {}, data has {} points",
            eigenvector.len(),
            data.len()
        )));
    }
    data.check_point(x)?;
    let s: f64 = data
        .points()
        .zip(eigenvector)
        .map(|(p, v)| spec.from_sq_dist(sq_dist(x, p)) * v)
        .sum();
    Ok(s / (data.len() as f64 * eigenvalue))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigendecompose;

    #[test]
    fn kernel_values() {
        let g = KernelSpec::gaussian(1.0).unwrap();
        assert_eq!(kernel_eval(&g, &[0.3, -1.0], &[0.3, -1.0]).unwrap(), 1.0);
        let v = kernel_eval(&g, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        let e = KernelSpec::exponential(0.5).unwrap();
        let v = kernel_eval(&e, &[0.0], &[1.0]).unwrap();
        assert!((v - 0.135_335_283_236_612_7).abs() < 1e-15);
        assert!(kernel_eval(&g, &[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn bad_bandwidth() {
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::gaussian(-1.0).is_err());
        assert!(KernelSpec::exponential(f64::INFINITY).is_err());
    }

    #[test]
    fn small_kernel_matrices() {
        let g = KernelSpec::gaussian(1.0).unwrap();
        let one = kernel_matrix(&g, &DataSet::from_scalars(&[4.2]).unwrap()).unwrap();
        assert_eq!(one.as_slice(), &[1.0]);

        let dup = kernel_matrix(&g, &DataSet::from_scalars(&[1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(dup.as_slice(), &[0.5, 0.5, 0.5, 0.5]);
        let es = eigendecompose(&dup).unwrap();
        assert!((es.value(0) - 1.0).abs() < 1e-15 && es.value(1).abs() < 1e-15);

        let k = kernel_matrix(&g, &DataSet::from_scalars(&[0.0, 1.0]).unwrap()).unwrap();
        assert!((k.get(0, 1) - 0.303_265_329_856_316_7).abs() < 1e-15);
    }

    #[test]
    fn extension_reproduces_eigenvector() {
        let data = DataSet::from_scalars(&[-1.3, -0.2, 0.0, 0.45, 1.1, 2.5, 2.6]).unwrap();
        let spec = KernelSpec::gaussian(0.7).unwrap();
        let es = eigendecompose(&kernel_matrix(&spec, &data).unwrap()).unwrap();
        for j in 0..data.len() {
            if es.value(j) <= 1e-10 {
                continue;
            }
            for i in 0..data.len() {
                let phi = extend_eigenfunction(&spec, &data, es.value(j), es.vector(j), data.point(i))
                    .unwrap();
                assert!((phi - es.vector(j)[i]).abs() <= 1e-8, "pair {j}, point {i}");
            }
        }
    }

    #[test]
    fn extension_two_point_midpoint() {
        let data = DataSet::from_scalars(&[0.0, 1.0]).unwrap();
        let spec = KernelSpec::gaussian(1.0).unwrap();
        let es = eigendecompose(&kernel_matrix(&spec, &data).unwrap()).unwrap();
        // Top pair of [[1, a], [a, 1]] / 2 is ((1 + a) / 2, (1, 1) / sqrt 2).
        let a = (-0.5f64).exp();
        let lambda = (1.0 + a) / 2.0;
        assert!((es.value(0) - lambda).abs() < 1e-15);
        let k_mid = (-0.125f64).exp();
        let expected = (2.0 * k_mid / 2f64.sqrt()) / (2.0 * lambda);
        let phi = extend_eigenfunction(&spec, &data, es.value(0), es.vector(0), &[0.5]).unwrap();
        assert!((phi - expected).abs() < 1e-14);
    }

    #[test]
    fn extension_far_away_is_tiny() {
        let data = DataSet::from_scalars(&[0.0, 0.3, 0.5, 0.9]).unwrap();
        let spec = KernelSpec::gaussian(0.2).unwrap();
        let es = eigendecompose(&kernel_matrix(&spec, &data).unwrap()).unwrap();
        let v = es.vector(0);
        let lambda = es.value(0);
        // every sample is at least 10 bandwidths from x
        let x = [0.9 + 10.0 * 0.2];
        let bound = (-50.0f64).exp() / lambda * v.iter().map(|x| x.abs()).sum::<f64>() / 4.0;
        let phi = extend_eigenfunction(&spec, &data, lambda, v, &x).unwrap();
        assert!(phi.abs() <= bound);
    }

    #[test]
    fn extension_rejects_nonpositive_eigenvalue() {
        let data = DataSet::from_scalars(&[0.0, 1.0]).unwrap();
        let spec = KernelSpec::gaussian(1.0).unwrap();
        assert!(extend_eigenfunction(&spec, &data, 0.0, &[1.0, 0.0], &[0.0]).is_err());
        assert!(extend_eigenfunction(&spec, &data, 0.5, &[1.0], &[0.0]).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(DataSet::new(2, vec![1.0, 2.0, 3.0], None).is_err());
        assert!(DataSet::new(1, vec![f64::NAN], None).is_err());
        assert!(DataSet::new(1, vec![], None).is_err());
        assert!(DataSet::new(1, vec![1.0, 2.0], Some(vec![1])).is_err());
        let d = DataSet::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(d.point(1), &[3.0, 4.0]);
        assert_eq!(d.select(&[1, 0]).point(0), &[3.0, 4.0]);
    }
}
