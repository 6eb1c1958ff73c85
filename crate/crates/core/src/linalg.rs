//! Dense symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! iteration with Wilkinson-style shifts. The working matrix is kept
//! transposed so that every O(n^3) inner loop walks contiguous memory, and
//! all loops run in a fixed order, so identical input gives bit-identical
//! output.

use crate::error::{Error, Result};

/// Symmetry tolerance accepted by [`SymMatrix`] constructors.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Maximum QL iterations spent on any single eigenvalue.
pub const MAX_ITERATIONS_PER_EIGENVALUE: usize = 100;

/// A dense real symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from row-major entries, validating size, finiteness
    /// and symmetry.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("matrix dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::Input(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "non-finite entry at ({}, {})",
                pos / n,
                pos % n
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(Error::Input(format!(
                        "matrix not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("rows must form a square matrix".into()));
        }
        Self::from_row_major(n, rows.concat())
    }

    /// Builds a matrix by evaluating `f(i, j)` on the upper triangle and
    /// mirroring, so the result is exactly symmetric.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("matrix dimension must be positive".into()));
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(Error::Input(format!("non-finite entry at ({i}, {j})")));
                }
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// y = M x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "vector length must match matrix dimension");
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }
}

/// Eigenvalues in descending order with their unit eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    n: usize,
    values: Vec<f64>,
    /// Eigenvector `j` occupies `vectors[j * n..(j + 1) * n]`.
    vectors: Vec<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    /// The unit eigenvector belonging to `values()[j]`.
    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.n)
    }

    /// Max-abs entry of V diag(values) V^T - m.
    pub fn reconstruction_error(&self, m: &SymMatrix) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n)
                    .map(|k| self.values[k] * self.vector(k)[i] * self.vector(k)[j])
                    .sum();
                worst = worst.max((s - m.get(i, j)).abs());
            }
        }
        worst
    }

    /// Max-abs entry of V^T V - I.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.n {
            for b in a..self.n {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot(self.vector(a), self.vector(b)) - target).abs());
            }
        }
        worst
    }

    /// Largest Euclidean residual ||M v_j - lambda_j v_j|| over all columns.
    pub fn max_residual(&self, m: &SymMatrix) -> f64 {
        (0..self.n)
            .map(|j| {
                let v = self.vector(j);
                let mv = m.mul_vec(v);
                mv.iter()
                    .zip(v)
                    .map(|(a, b)| (a - self.values[j] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Values are sorted descending (stable with respect to the solver's
/// ascending order on exact ties). Every eigenvector has its entry of
/// largest magnitude positive, ties going to the lowest index.
pub fn eigendecompose(m: &SymMatrix) -> Result<EigenSystem> {
    let n = m.n;
    let mut w = m.data.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut w, &mut d, &mut e, true);
    tridiagonal_ql(n, &mut d, &mut e, Some(&mut w))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for &j in &order {
        values.push(d[j]);
        let col = &w[j * n..(j + 1) * n];
        let mut best = 0usize;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() {
                best = i;
            }
        }
        let sign = if col[best] < 0.0 { -1.0 } else { 1.0 };
        vectors.extend(col.iter().map(|v| sign * v));
    }
    Ok(EigenSystem { n, values, vectors })
}

/// Eigenvalues only, descending. Skips eigenvector accumulation, which is
/// roughly two thirds of the work of [`eigendecompose`].
pub fn eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    let n = m.n;
    let mut w = m.data.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut w, &mut d, &mut e, false);
    tridiagonal_ql(n, &mut d, &mut e, None)?;
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

/// Eigenvalues and eigenvectors of a symmetric tridiagonal matrix given by
/// its diagonal and off-diagonal (`off.len() == diag.len() - 1`).
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<EigenSystem> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::Input(
            "tridiagonal input needs n diagonal and n-1 off-diagonal entries".into(),
        ));
    }
    let mut rows = vec![0.0; n * n];
    for i in 0..n {
        rows[i * n + i] = diag[i];
        if i + 1 < n {
            rows[i * n + i + 1] = off[i];
            rows[(i + 1) * n + i] = off[i];
        }
    }
    eigendecompose(&SymMatrix::from_row_major(n, rows)?)
}

// Householder reduction (EISPACK tred2 lineage). `w` holds the transpose of
// the classic working matrix V: w[j * n + k] == V[k][j]. On return with
// `accumulate`, row j of `w` holds the j-th column of the orthogonal
// transform; d is the diagonal and e[1..] the subdiagonal.
fn tridiagonalize(n: usize, w: &mut [f64], d: &mut [f64], e: &mut [f64], accumulate: bool) {
    for j in 0..n {
        d[j] = w[j * n + (n - 1)];
    }

    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = w[j * n + (i - 1)];
                w[j * n + i] = 0.0;
                w[i * n + j] = 0.0;
            }
        } else {
            for x in &mut d[..i] {
                *x /= scale;
                h += *x * *x;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].iter_mut().for_each(|x| *x = 0.0);

            for j in 0..i {
                f = d[j];
                w[i * n + j] = f;
                let col = &w[j * n..j * n + i];
                g = e[j] + col[j] * f;
                for k in (j + 1)..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = &mut w[j * n..j * n + i];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = col[i - 1];
                w[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }

    if accumulate {
        for i in 0..n.saturating_sub(1) {
            w[i * n + (n - 1)] = w[i * n + i];
            w[i * n + i] = 1.0;
            let h = d[i + 1];
            if h != 0.0 {
                for k in 0..=i {
                    d[k] = w[(i + 1) * n + k] / h;
                }
                for j in 0..=i {
                    let (head, tail) = w.split_at_mut((i + 1) * n);
                    let u = &tail[..=i];
                    let col = &mut head[j * n..j * n + i + 1];
                    let g = dot(u, col);
                    for k in 0..=i {
                        col[k] -= g * d[k];
                    }
                }
            }
            for k in 0..=i {
                w[(i + 1) * n + k] = 0.0;
            }
        }
        for j in 0..n {
            d[j] = w[j * n + (n - 1)];
            w[j * n + (n - 1)] = 0.0;
        }
        w[(n - 1) * n + (n - 1)] = 1.0;
    } else {
        for j in 0..n {
            d[j] = w[j * n + j];
        }
    }
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e[1..]). Applies the rotations to the
// rows of `w` when given. Values are left unsorted.
fn tridiagonal_ql(n: usize, d: &mut [f64], e: &mut [f64], mut w: Option<&mut [f64]>) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n - 1] is zero, so the scan always stops inside the matrix.
        let m = m.min(n - 1);

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_ITERATIONS_PER_EIGENVALUE {
                    let residual = e[l..m].iter().fold(0.0f64, |a, b| a.max(b.abs()));
                    return Err(Error::Numerical {
                        message: format!(
                            "QL iteration did not converge for eigenvalue {l} within {MAX_ITERATIONS_PER_EIGENVALUE} iterations"
                        ),
                        residual,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    if let Some(w) = w.as_deref_mut() {
                        let (head, tail) = w.split_at_mut((i + 1) * n);
                        let row_i = &mut head[i * n..];
                        let row_next = &mut tail[..n];
                        for (a, b) in row_i.iter_mut().zip(row_next.iter_mut()) {
                            let hv = *b;
                            *b = s * *a + c * hv;
                            *a = c * *a - s * hv;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_symmetric(n: usize, seed: u64) -> SymMatrix {
        // splitmix64, enough for test fixtures
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let mut vals = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = next();
                vals[i * n + j] = v;
                vals[j * n + i] = v;
            }
        }
        SymMatrix::from_row_major(n, vals).unwrap()
    }

    #[test]
    fn one_by_one() {
        let m = SymMatrix::from_rows(&[vec![3.5]]).unwrap();
        let es = eigendecompose(&m).unwrap();
        assert_eq!(es.values(), &[3.5]);
        assert_eq!(es.vector(0), &[1.0]);
    }

    #[test]
    fn rank_one_two_by_two() {
        let m = SymMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let es = eigendecompose(&m).unwrap();
        assert!((es.value(0) - 1.0).abs() < 1e-14);
        assert!(es.value(1).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((es.vector(0)[0] - s).abs() < 1e-14);
        assert!((es.vector(0)[1] - s).abs() < 1e-14);
    }

    #[test]
    fn random_20_reconstruction() {
        let m = random_symmetric(20, 42);
        let es = eigendecompose(&m).unwrap();
        assert!(es.reconstruction_error(&m) <= 1e-8);
        assert!(es.orthonormality_error() <= 1e-8);
        assert!(es.max_residual(&m) <= 1e-8);
        assert!(es.values().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn values_only_matches_full() {
        let m = random_symmetric(37, 7);
        let full = eigendecompose(&m).unwrap();
        let vals = eigenvalues(&m).unwrap();
        for (a, b) in full.values().iter().zip(&vals) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sign_convention() {
        let m = random_symmetric(15, 3);
        let es = eigendecompose(&m).unwrap();
        for v in es.vectors() {
            let (mut best, mut at) = (0.0f64, 0);
            for (i, x) in v.iter().enumerate() {
                if x.abs() > best {
                    best = x.abs();
                    at = i;
                }
            }
            assert!(v[at] > 0.0);
        }
    }

    #[test]
    fn diagonal_and_zero_matrices() {
        let m = SymMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 3.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        let es = eigendecompose(&m).unwrap();
        assert_eq!(es.values(), &[3.0, 2.0, 1.0]);
        assert_eq!(es.vector(0), &[0.0, 1.0, 0.0]);

        let z = SymMatrix::from_row_major(4, vec![0.0; 16]).unwrap();
        let es = eigendecompose(&z).unwrap();
        assert!(es.values().iter().all(|v| *v == 0.0));
        assert!(es.orthonormality_error() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            SymMatrix::from_rows(&[vec![f64::NAN]]),
            Err(Error::Input(_))
        ));
        assert!(SymMatrix::from_row_major(0, vec![]).is_err());
    }

    #[test]
    fn tridiagonal_laplacian_spectrum() {
        // Path-graph tridiagonal(-1, 2, -1): eigenvalues 2 - 2cos(k pi/(n+1)).
        let n = 12;
        let es = tridiagonal_eigen(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        let mut expected: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        expected.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in es.values().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
