//! Spectral clustering by the eigenvectors of a data-dependent kernel
//! operator.
//!
//! DaSpec builds the kernel matrix K(x_i, x_j)/n, scans its eigenvectors in
//! descending eigenvalue order and keeps those without a sign change. The
//! number of kept vectors is the estimated number of groups and each point is
//! labelled by the kept vector largest in magnitude at that point.
//!
//! ```
//! use daspec::{cluster, DaSpecParams, DataSet};
//!
//! let data = DataSet::from_scalars(&[0.0, 0.1, 0.2, 5.0, 5.1, 5.2]).unwrap();
//! let fit = cluster(&data, &DaSpecParams::default().with_bandwidth(0.5)).unwrap();
//! assert_eq!(fit.g_hat, 2);
//! assert_ne!(fit.labels[0], fit.labels[5]);
//! ```

pub mod analytic;
pub mod baselines;
pub mod cli;
pub mod daspec;
pub mod datagen;
pub mod error;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod metrics;
pub mod quadrature;
pub mod stats;
pub mod theory;

pub use crate::daspec::{classify, cluster, Bandwidth, ClusterResult, DaSpecParams, EpsilonRule};
pub use crate::datagen::{Component, MixtureSpec};
pub use crate::error::{Error, Result};
pub use crate::kernels::{kernel_matrix, DataSet, KernelFamily, KernelSpec};
pub use crate::linalg::{eigendecompose, EigenSystem, SymMatrix};
pub use crate::metrics::label_agreement;
