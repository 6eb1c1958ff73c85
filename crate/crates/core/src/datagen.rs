//! Seeded synthetic data sets.
//!
//! Every generator draws from ChaCha20 streams derived from one `u64` seed:
//! stream 0 for allocation decisions, stream `g + 1` for component `g`, and
//! dedicated high-numbered streams for design parameters and added noise.
//! Output is therefore identical across platforms for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernels::DataSet;

const DESIGN_STREAM: u64 = 1 << 32;
const NOISE_STREAM: u64 = (1 << 32) + 1;

pub(crate) fn stream(seed: u64, id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub(crate) fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// A uniform arc of a circle centered at the origin, with isotropic Gaussian
/// noise added to each point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSpec {
    pub radius: f64,
    /// Fraction of the full circle covered, in (0, 1].
    pub arc_fraction: f64,
    pub noise_sigma: f64,
    pub count: usize,
}

impl RingSpec {
    fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::Input("ring radius must be positive".into()));
        }
        if !(self.arc_fraction > 0.0 && self.arc_fraction <= 1.0) {
            return Err(Error::Input("arc fraction must lie in (0, 1]".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Input("ring noise must be nonnegative".into()));
        }
        Ok(())
    }

    /// Arc angles are uniform on [0, 2 pi arc_fraction).
    pub fn sample(&self, rng: &mut impl Rng) -> Result<Vec<[f64; 2]>> {
        self.validate()?;
        let span = std::f64::consts::TAU * self.arc_fraction;
        Ok((0..self.count)
            .map(|_| {
                let theta = rng.random::<f64>() * span;
                let nx = self.noise_sigma * normal(rng);
                let ny = self.noise_sigma * normal(rng);
                [self.radius * theta.cos() + nx, self.radius * theta.sin() + ny]
            })
            .collect())
    }
}

/// A mixture component's sampling distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    /// Isotropic Gaussian N(mean, std_dev^2 I).
    Gaussian { mean: Vec<f64>, std_dev: f64 },
    /// Noisy circular arc in the plane (see [`RingSpec`]).
    Ring { radius: f64, arc_fraction: f64, noise_sigma: f64 },
    PointMass { location: Vec<f64> },
}

impl Component {
    pub fn gaussian(mean: Vec<f64>, std_dev: f64) -> Self {
        Component::Gaussian { mean, std_dev }
    }

    pub fn gaussian_1d(mean: f64, std_dev: f64) -> Self {
        Component::Gaussian { mean: vec![mean], std_dev }
    }

    pub fn dim(&self) -> usize {
        match self {
            Component::Gaussian { mean, .. } => mean.len(),
            Component::Ring { .. } => 2,
            Component::PointMass { location } => location.len(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Component::Gaussian { mean, std_dev } => {
                if mean.is_empty() || mean.iter().any(|m| !m.is_finite()) {
                    return Err(Error::Input("gaussian mean must be a finite nonempty vector".into()));
                }
                if !(std_dev.is_finite() && *std_dev >= 0.0) {
                    return Err(Error::Input("gaussian std_dev must be nonnegative".into()));
                }
            }
            Component::Ring { radius, arc_fraction, noise_sigma } => RingSpec {
                radius: *radius,
                arc_fraction: *arc_fraction,
                noise_sigma: *noise_sigma,
                count: 0,
            }
            .validate()?,
            Component::PointMass { location } => {
                if location.is_empty() || location.iter().any(|m| !m.is_finite()) {
                    return Err(Error::Input("point mass location must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Draws `count` points, appending coordinates row-major to `out`.
    pub fn sample_into(&self, count: usize, rng: &mut impl Rng, out: &mut Vec<f64>) -> Result<()> {
        match self {
            Component::Gaussian { mean, std_dev } => {
                for _ in 0..count {
                    out.extend(mean.iter().map(|m| m + std_dev * normal(rng)));
                }
            }
            Component::Ring { radius, arc_fraction, noise_sigma } => {
                let ring = RingSpec {
                    radius: *radius,
                    arc_fraction: *arc_fraction,
                    noise_sigma: *noise_sigma,
                    count,
                };
                out.extend(ring.sample(rng)?.into_iter().flatten());
            }
            Component::PointMass { location } => {
                for _ in 0..count {
                    out.extend_from_slice(location);
                }
            }
        }
        Ok(())
    }
}

/// Weighted mixture of components; weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    components: Vec<(f64, Component)>,
}

pub const WEIGHT_SUM_TOL: f64 = 1e-12;

impl MixtureSpec {
    pub fn new(components: Vec<(f64, Component)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Input("mixture needs at least one component".into()));
        }
        let d = components[0].1.dim();
        for (w, c) in &components {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::Input(format!("mixture weight {w} must be nonnegative")));
            }
            c.validate()?;
            if c.dim() != d {
                return Err(Error::Input("mixture components have differing dimensions".into()));
            }
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Input(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, Component)] {
        &self.components
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|(w, _)| *w).collect()
    }

    pub fn dim(&self) -> usize {
        self.components[0].1.dim()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Component counts round(w_g n) by the largest-remainder method, so they
    /// sum to exactly `n`. Ties go to the lower component index.
    pub fn fixed_counts(&self, n: usize) -> Vec<usize> {
        let raw: Vec<f64> = self.components.iter().map(|(w, _)| w * n as f64).collect();
        let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| {
            let (fa, fb) = (raw[a] - raw[a].floor(), raw[b] - raw[b].floor());
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &g in order.iter().take(n.saturating_sub(assigned)) {
            counts[g] += 1;
        }
        counts
    }

    /// Samples exactly `counts[g]` points from each component, concatenated
    /// in component order and labeled g + 1.
    pub fn sample_with_counts(&self, counts: &[usize], seed: u64) -> Result<DataSet> {
        if counts.len() != self.components.len() {
            return Err(Error::Input("one count per component required".into()));
        }
        let total: usize = counts.iter().sum();
        if total == 0 {
            return Err(Error::Input("at least one point must be drawn".into()));
        }
        let mut coords = Vec::with_capacity(total * self.dim());
        let mut labels = Vec::with_capacity(total);
        for (g, ((_, comp), &count)) in self.components.iter().zip(counts).enumerate() {
            let mut rng = stream(seed, g as u64 + 1);
            comp.sample_into(count, &mut rng, &mut coords)?;
            labels.extend(std::iter::repeat_n(g + 1, count));
        }
        DataSet::new(self.dim(), coords, Some(labels))
    }
}

/// Draws n points: multinomial component sizes, then per-component samples.
/// Labels are component indices starting at 1; points are grouped by
/// component.
pub fn gen_gaussian_mixture(spec: &MixtureSpec, n: usize, seed: u64) -> Result<DataSet> {
    if n == 0 {
        return Err(Error::Input("n must be at least 1".into()));
    }
    let weights = spec.weights();
    let mut alloc = stream(seed, 0);
    let mut counts = vec![0usize; weights.len()];
    for _ in 0..n {
        let u: f64 = alloc.random();
        let mut acc = 0.0;
        let mut pick = weights.len() - 1;
        for (g, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                pick = g;
                break;
            }
        }
        counts[pick] += 1;
    }
    spec.sample_with_counts(&counts, seed)
}

/// Six equally weighted planar Gaussians with means uniform on (-5, 5)^2 and
/// standard deviations uniform on (0, 0.8), drawn from the seed.
pub fn gauss6_spec(seed: u64) -> Result<MixtureSpec> {
    let mut rng = stream(seed, DESIGN_STREAM);
    let components = (0..6)
        .map(|_| {
            let mean = vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
            let sd = rng.random_range(0.0..0.8);
            (1.0 / 6.0, Component::gaussian(mean, sd))
        })
        .collect();
    MixtureSpec::new(components)
}

/// Group labels of the ring suite.
pub const RING_LABEL: usize = 1;
pub const BLOB_LABEL: usize = 2;
pub const SMALL_LABEL: usize = 3;
pub const OUTLIER_LABEL: usize = 4;

/// The noise levels that turn the base ring suite into its three noisier
/// variants.
pub const RING_SUITE_NOISE: [f64; 4] = [0.0, 0.3, 0.6, 0.9];

/// The ring-plus-blobs design: 200 points on three quarters of a radius-3
/// ring with N(0, 0.15^2 I) noise, 100 points from N((3, -3), 0.5^2 I), 5
/// points from N((0, 0), 0.3^2 I) and one outlier at (5, 5). With
/// `noise_add > 0`, fresh N(0, noise_add^2 I) noise is added to every point
/// of that same base set.
pub fn gen_ring_suite(noise_add: f64, seed: u64) -> Result<DataSet> {
    if !(noise_add.is_finite() && noise_add >= 0.0) {
        return Err(Error::Input(format!("added noise must be nonnegative, got {noise_add}")));
    }
    let groups: [(usize, Component); 4] = [
        (200, Component::Ring { radius: 3.0, arc_fraction: 0.75, noise_sigma: 0.15 }),
        (100, Component::gaussian(vec![3.0, -3.0], 0.5)),
        (5, Component::gaussian(vec![0.0, 0.0], 0.3)),
        (1, Component::PointMass { location: vec![5.0, 5.0] }),
    ];
    let mut coords = Vec::with_capacity(306 * 2);
    let mut labels = Vec::with_capacity(306);
    for (g, (count, comp)) in groups.iter().enumerate() {
        let mut rng = stream(seed, g as u64 + 1);
        comp.sample_into(*count, &mut rng, &mut coords)?;
        labels.extend(std::iter::repeat_n(g + 1, *count));
    }
    if noise_add > 0.0 {
        let mut rng = stream(seed, NOISE_STREAM);
        for c in coords.iter_mut() {
            *c += noise_add * normal(&mut rng);
        }
    }
    DataSet::new(2, coords, Some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_component_is_reproducible() {
        let spec = MixtureSpec::new(vec![(1.0, Component::gaussian(vec![0.0, 0.0], 1.0))]).unwrap();
        let a = gen_gaussian_mixture(&spec, 3, 11).unwrap();
        let b = gen_gaussian_mixture(&spec, 3, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        assert_eq!(a.labels().unwrap(), &[1, 1, 1]);
        let c = gen_gaussian_mixture(&spec, 3, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gauss6_counts() {
        let spec = gauss6_spec(7).unwrap();
        assert_eq!(spec.len(), 6);
        for (_, c) in spec.components() {
            let Component::Gaussian { mean, std_dev } = c else { panic!() };
            assert!(mean.iter().all(|m| (-5.0..5.0).contains(m)));
            assert!((0.0..0.8).contains(std_dev));
        }
        let data = gen_gaussian_mixture(&spec, 400, 7).unwrap();
        assert_eq!(data.len(), 400);
        assert_eq!(data.dim(), 2);
    }

    #[test]
    fn ring_suite_counts() {
        for noise in RING_SUITE_NOISE {
            let d = gen_ring_suite(noise, 1).unwrap();
            assert_eq!(d.len(), 306);
            let l = d.labels().unwrap();
            for (label, count) in [(1, 200), (2, 100), (3, 5), (4, 1)] {
                assert_eq!(l.iter().filter(|&&x| x == label).count(), count);
            }
        }
        let d = gen_ring_suite(0.0, 1).unwrap();
        assert_eq!(d.point(305), &[5.0, 5.0]);
    }

    #[test]
    fn ring_arc_span() {
        let ring = RingSpec { radius: 3.0, arc_fraction: 0.75, noise_sigma: 0.0, count: 2000 };
        let pts = ring.sample(&mut stream(5, 1)).unwrap();
        let mut max_angle = 0.0f64;
        for p in &pts {
            assert!(((p[0].hypot(p[1])) - 3.0).abs() < 1e-12);
            let mut a = p[1].atan2(p[0]);
            if a < 0.0 {
                a += std::f64::consts::TAU;
            }
            max_angle = max_angle.max(a);
        }
        let span = 0.75 * std::f64::consts::TAU;
        assert!(max_angle < span && max_angle > span - 0.02);
    }

    #[test]
    fn added_noise_spreads_groups() {
        let spread = |noise: f64| {
            let d = gen_ring_suite(noise, 3).unwrap();
            let blob: Vec<&[f64]> = d
                .points()
                .zip(d.labels().unwrap())
                .filter(|(_, &l)| l == BLOB_LABEL)
                .map(|(p, _)| p)
                .collect();
            let m = blob.len() as f64;
            let cx = blob.iter().map(|p| p[0]).sum::<f64>() / m;
            let cy = blob.iter().map(|p| p[1]).sum::<f64>() / m;
            blob.iter().map(|p| (p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sum::<f64>() / m
        };
        assert!(spread(0.9) > spread(0.3));
        assert!(spread(0.3) > spread(0.0));
    }

    #[test]
    fn component_means_converge() {
        let spec = MixtureSpec::new(vec![(1.0, Component::gaussian(vec![1.5, -2.0], 0.7))]).unwrap();
        let count = 10_000;
        let d = gen_gaussian_mixture(&spec, count, 99).unwrap();
        for (axis, target) in [(0, 1.5), (1, -2.0)] {
            let mean = d.points().map(|p| p[axis]).sum::<f64>() / count as f64;
            assert!((mean - target).abs() < 5.0 * 0.7 / (count as f64).sqrt());
        }
    }

    #[test]
    fn mixture_validation() {
        assert!(MixtureSpec::new(vec![(0.5, Component::gaussian_1d(0.0, 1.0))]).is_err());
        assert!(MixtureSpec::new(vec![
            (0.5, Component::gaussian_1d(0.0, 1.0)),
            (0.5, Component::gaussian(vec![0.0, 0.0], 1.0)),
        ])
        .is_err());
        assert!(MixtureSpec::new(vec![(1.0, Component::gaussian_1d(0.0, -1.0))]).is_err());
    }

    #[test]
    fn largest_remainder_counts() {
        let spec = MixtureSpec::new(vec![
            (0.95, Component::gaussian_1d(0.0, 0.5)),
            (0.05, Component::gaussian_1d(6.0, 0.5)),
        ])
        .unwrap();
        assert_eq!(spec.fixed_counts(1000), vec![950, 50]);
        let thirds = MixtureSpec::new(vec![
            (1.0 / 3.0, Component::gaussian_1d(0.0, 1.0)),
            (1.0 / 3.0, Component::gaussian_1d(1.0, 1.0)),
            (1.0 / 3.0, Component::gaussian_1d(2.0, 1.0)),
        ])
        .unwrap();
        assert_eq!(thirds.fixed_counts(10).iter().sum::<usize>(), 10);
    }
}
