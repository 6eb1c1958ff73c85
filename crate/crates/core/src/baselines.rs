//! Comparison clusterers: k-means with random restarts, and normalized
//! spectral clustering (Ng, Jordan and Weiss).

use rand::seq::index::sample;

use crate::datagen::stream;
use crate::error::{Error, Result};
use crate::kernels::{sq_dist, DataSet, KernelSpec, PairwiseDistances};
use crate::linalg::{eigendecompose, SymMatrix};

pub const DEFAULT_RESTARTS: usize = 50;
pub const MAX_LLOYD_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    /// Labels in 1..=k.
    pub labels: Vec<usize>,
    /// k centroids, row-major k x d.
    pub centroids: Vec<f64>,
    /// Within-cluster sum of squared distances.
    pub criterion: f64,
    /// Restart that produced this fit.
    pub restart: usize,
    pub iterations: usize,
}

/// Lloyd run from one initialization, recording the criterion after each
/// assignment step.
#[derive(Debug, Clone)]
pub struct LloydTrace {
    pub fit: KMeansFit,
    pub criteria: Vec<f64>,
}

fn nearest(centroids: &[f64], d: usize, x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.chunks_exact(d).enumerate() {
        let s = sq_dist(x, centroid);
        if s < best.1 {
            best = (c, s);
        }
    }
    best
}

/// One Lloyd run from the given initial centroids.
pub fn lloyd(data: &DataSet, initial: Vec<f64>, k: usize) -> LloydTrace {
    let (n, d) = (data.len(), data.dim());
    let mut centroids = initial;
    let mut assign = vec![usize::MAX; n];
    let mut dist = vec![0.0; n];
    let mut criteria = Vec::new();
    let mut iterations = 0;

    loop {
        let mut changed = false;
        for (i, x) in data.points().enumerate() {
            let (c, s) = nearest(&centroids, d, x);
            if assign[i] != c {
                assign[i] = c;
                changed = true;
            }
            dist[i] = s;
        }
        criteria.push(dist.iter().sum());
        if !changed || iterations >= MAX_LLOYD_ITERATIONS {
            break;
        }
        iterations += 1;

        let mut sums = vec![0.0; k * d];
        let mut counts = vec![0usize; k];
        for (i, x) in data.points().enumerate() {
            counts[assign[i]] += 1;
            for (s, v) in sums[assign[i] * d..(assign[i] + 1) * d].iter_mut().zip(x) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for a in 0..d {
                    centroids[c * d + a] = sums[c * d + a] / counts[c] as f64;
                }
            }
        }
        // Empty clusters restart at the point farthest from its centroid.
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)))
                    .expect("nonempty data");
                centroids[c * d..(c + 1) * d].copy_from_slice(data.point(far));
                dist[far] = 0.0;
                assign[far] = c;
            }
        }
    }

    let criterion = *criteria.last().expect("at least one assignment");
    LloydTrace {
        fit: KMeansFit {
            labels: assign.iter().map(|a| a + 1).collect(),
            centroids,
            criterion,
            restart: 0,
            iterations,
        },
        criteria,
    }
}

/// Initial centroids for one restart: k distinct data points chosen
/// uniformly.
pub fn random_init(data: &DataSet, k: usize, seed: u64, restart: usize) -> Vec<f64> {
    let mut rng = stream(seed, restart as u64);
    sample(&mut rng, data.len(), k)
        .into_iter()
        .flat_map(|i| data.point(i).iter().copied())
        .collect()
}

/// k-means: the best of `restarts` Lloyd runs by within-cluster sum of
/// squares. Ties go to the lowest restart index.
pub fn kmeans(data: &DataSet, k: usize, restarts: usize, seed: u64) -> Result<KMeansFit> {
    if k == 0 || k > data.len() {
        return Err(Error::Input(format!(
            "k must lie in 1..={}, got {k}",
            data.len()
        )));
    }
    if restarts == 0 {
        return Err(Error::Input("at least one restart required".into()));
    }
    let mut best: Option<KMeansFit> = None;
    for r in 0..restarts {
        let mut fit = lloyd(data, random_init(data, k, seed, r), k).fit;
        fit.restart = r;
        if best.as_ref().is_none_or(|b| fit.criterion < b.criterion) {
            best = Some(fit);
        }
    }
    Ok(best.expect("restarts > 0"))
}

/// Normalized spectral clustering: zero-diagonal Gaussian affinity A,
/// M = D^-1/2 A D^-1/2, embedding by the k eigenvectors of M with the
/// largest eigenvalues, row normalization, then k-means.
#[derive(Debug, Clone)]
pub struct SpectralFit {
    pub labels: Vec<usize>,
    /// n x k row-normalized embedding, row-major.
    pub embedding: Vec<f64>,
    pub kmeans: KMeansFit,
}

pub fn njw_spectral(data: &DataSet, k: usize, bandwidth: f64, seed: u64) -> Result<SpectralFit> {
    njw_spectral_with_restarts(data, k, bandwidth, DEFAULT_RESTARTS, seed)
}

pub fn njw_spectral_with_restarts(
    data: &DataSet,
    k: usize,
    bandwidth: f64,
    restarts: usize,
    seed: u64,
) -> Result<SpectralFit> {
    let n = data.len();
    if k < 2 || k > n {
        return Err(Error::Input(format!("k must lie in 2..={n}, got {k}")));
    }
    let kernel = KernelSpec::gaussian(bandwidth)?;
    let dist = PairwiseDistances::new(data);
    let mut degree = vec![0.0; n];
    for (i, deg) in degree.iter_mut().enumerate() {
        *deg = (0..n).filter(|&j| j != i).map(|j| kernel.from_sq_dist(dist.sq(i, j))).sum();
        if *deg <= 0.0 {
            return Err(Error::DegenerateAffinity(format!(
                "point {i} has zero affinity to all other points at bandwidth {bandwidth}"
            )));
        }
    }
    let scale: Vec<f64> = degree.iter().map(|d| 1.0 / d.sqrt()).collect();
    let m = SymMatrix::from_upper_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            kernel.from_sq_dist(dist.sq(i, j)) * scale[i] * scale[j]
        }
    })?;
    let eig = eigendecompose(&m)?;

    let mut embedding = vec![0.0; n * k];
    for i in 0..n {
        let row = &mut embedding[i * k..(i + 1) * k];
        for (c, r) in row.iter_mut().enumerate() {
            *r = eig.vector(c)[i];
        }
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateAffinity(format!(
                "point {i} has a zero spectral embedding"
            )));
        }
        row.iter_mut().for_each(|v| *v /= norm);
    }
    let embedded = DataSet::new(k, embedding.clone(), None)?;
    let fit = kmeans(&embedded, k, restarts, seed)?;
    Ok(SpectralFit { labels: fit.labels.clone(), embedding, kmeans: fit })
}
