//! Closed-form spectra used as independent oracles for the empirical
//! kernel-matrix spectrum.
//!
//! For P = N(mu, sigma^2) and the Gaussian kernel of bandwidth w, with
//! beta = 2 sigma^2 / w^2 and s = sqrt(1 + 2 beta), the convolution operator
//! has eigenvalues
//!
//! ```text
//! lambda_i = sqrt(2 / (1 + beta + s)) * (beta / (1 + beta + s))^i
//! ```
//!
//! and L2(P)-orthonormal eigenfunctions
//!
//! ```text
//! phi_i(x) = (1 + 2 beta)^(1/8) / sqrt(2^i i!)
//!            * exp(-(x - mu)^2 (s - 1) / (4 sigma^2))
//!            * H_i((1/4 + beta/2)^(1/4) (x - mu) / sigma)
//! ```
//!
//! with H_i the physicists' Hermite polynomials.

use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// A one-dimensional Gaussian distribution paired with a Gaussian kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianOperatorSpec {
    pub mean: f64,
    pub std_dev: f64,
    pub bandwidth: f64,
}

impl GaussianOperatorSpec {
    pub fn new(mean: f64, std_dev: f64, bandwidth: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::Input("mean must be finite".into()));
        }
        if !(std_dev.is_finite() && std_dev > 0.0) {
            return Err(Error::Input(format!("std_dev must be positive, got {std_dev}")));
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::Input(format!("bandwidth must be positive, got {bandwidth}")));
        }
        Ok(Self { mean, std_dev, bandwidth })
    }

    /// beta = 2 sigma^2 / w^2
    pub fn beta(&self) -> f64 {
        2.0 * self.std_dev * self.std_dev / (self.bandwidth * self.bandwidth)
    }

    /// Common ratio lambda_{i+1} / lambda_i.
    pub fn eigenvalue_ratio(&self) -> f64 {
        let beta = self.beta();
        beta / (1.0 + beta + (1.0 + 2.0 * beta).sqrt())
    }
}

/// Physicists' Hermite polynomial H_i(x) by the three-term recurrence.
pub fn hermite(i: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if i == 0 {
        return prev;
    }
    for k in 1..i {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// H_i(x) / sqrt(2^i i!), computed with the rescaled recurrence so large
/// orders neither overflow nor lose precision.
pub fn normalized_hermite(i: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, std::f64::consts::SQRT_2 * x);
    if i == 0 {
        return prev;
    }
    for k in 1..i {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn analytic_eigenvalue(spec: &GaussianOperatorSpec, i: usize) -> f64 {
    let beta = spec.beta();
    let denom = 1.0 + beta + (1.0 + 2.0 * beta).sqrt();
    (2.0 / denom).sqrt() * (beta / denom).powi(i as i32)
}

pub fn analytic_eigenfunction(spec: &GaussianOperatorSpec, i: usize, x: f64) -> f64 {
    let beta = spec.beta();
    let s = (1.0 + 2.0 * beta).sqrt();
    let z = (x - spec.mean) / spec.std_dev;
    let envelope = (-(z * z) * (s - 1.0) / 4.0).exp();
    let scale = (0.25 + 0.5 * beta).powf(0.25);
    (1.0 + 2.0 * beta).powf(0.125) * envelope * normalized_hermite(i, scale * z)
}

/// Absolute tolerance for [`exponential_top_eigenfunction`].
pub const EXPONENTIAL_QUAD_TOL: f64 = 1e-8;

/// phi(x) = (1/lambda) * integral over [-1, 1] of exp(-|x - y| / w) cos(b y) dy,
/// the top eigenfunction shape of the exponential kernel on the uniform
/// distribution over [-1, 1]. The frequency `b` and eigenvalue `lambda` are
/// supplied by the caller.
pub fn exponential_top_eigenfunction(bandwidth: f64, b: f64, lambda: f64, x: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Input(format!("eigenvalue must be positive, got {lambda}")));
    }
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::Input(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let f = |y: f64| (-(x - y).abs() / bandwidth).exp() * (b * y).cos();
    // The integrand has a kink at y = x.
    let split = x.clamp(-1.0, 1.0);
    let tol = 0.5 * EXPONENTIAL_QUAD_TOL * lambda.min(1.0);
    let left = integrate(f, -1.0, split, tol)?;
    let right = integrate(f, split, 1.0, tol)?;
    Ok((left + right) / lambda)
}

/// Frequency b for which cos(b x) solves the eigen-equation of the
/// exponential kernel on [-1, 1] with Lebesgue-measure eigenvalue
/// `lambda`: (d^2/dx^2 - 1/w^2) applied to the kernel integral gives
/// b^2 = 2 / (w lambda) - 1 / w^2.
pub fn exponential_frequency(bandwidth: f64, lambda: f64) -> Result<f64> {
    let b2 = 2.0 / (bandwidth * lambda) - 1.0 / (bandwidth * bandwidth);
    if !(b2.is_finite() && b2 >= 0.0) {
        return Err(Error::Input(format!(
            "eigenvalue {lambda} exceeds the kernel's maximal eigenvalue 2w = {}",
            2.0 * bandwidth
        )));
    }
    Ok(b2.sqrt())
}
