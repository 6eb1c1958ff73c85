// Kernel-matrix spectrum of a Gaussian sample against the closed-form
// spectrum of the Gaussian convolution operator.

use daspec::analytic::{analytic_eigenfunction, analytic_eigenvalue, GaussianOperatorSpec};
use daspec::datagen::gen_gaussian_mixture;
use daspec::kernels::extend_eigenfunction;
use daspec::linalg::norm;
use daspec::{eigendecompose, kernel_matrix, Component, KernelSpec, MixtureSpec};

pub fn run_example() -> daspec::Result<()> {
    let (mean, sd, w) = (1.0, 1.5, 1.0);
    let op = GaussianOperatorSpec::new(mean, sd, w)?;
    let mix = MixtureSpec::new(vec![(1.0, Component::gaussian_1d(mean, sd))])?;
    let data = gen_gaussian_mixture(&mix, 600, 3)?;
    let spec = KernelSpec::gaussian(w)?;
    let eig = eigendecompose(&kernel_matrix(&spec, &data)?)?;

    println!("beta = {:.3}, ratio = {:.4}", op.beta(), op.eigenvalue_ratio());
    println!("  i   empirical    analytic");
    for i in 0..6 {
        println!("{i:>3}  {:.6}   {:.6}", eig.value(i), analytic_eigenvalue(&op, i));
    }

    // eigenfunctions, unit norm in L2(P_n), signs matched at one point
    let n = data.len() as f64;
    println!("     x   phi_1 empirical  phi_1 analytic");
    for i in 0..7 {
        let x = mean - 3.0 * sd + i as f64 * sd;
        let scale = n.sqrt() / norm(eig.vector(1));
        let probe = extend_eigenfunction(&spec, &data, eig.value(1), eig.vector(1), &[mean + sd])?;
        let sign = probe.signum() * analytic_eigenfunction(&op, 1, mean + sd).signum();
        let emp = sign * scale * extend_eigenfunction(&spec, &data, eig.value(1), eig.vector(1), &[x])?;
        println!("{x:>6.2}   {emp:>12.4}   {:>12.4}", analytic_eigenfunction(&op, 1, x));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> daspec::Result<()> {
    run_example()
}
