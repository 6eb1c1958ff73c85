// Numerical checks of the spectral theory on finite samples: tail decay of
// eigenfunctions, the top-eigenvalue sandwich for a two-component mixture
// and the eigenfunction perturbation bound.

use daspec::datagen::gen_gaussian_mixture;
use daspec::theory::{
    check_eigenfunction_perturbation, check_tail_bound, check_top_eigenvalue_bound, compute_r, probe_points,
};
use daspec::{eigendecompose, kernel_matrix, Component, KernelSpec, MixtureSpec};

pub fn run_example() -> daspec::Result<()> {
    let spec = KernelSpec::gaussian(0.3)?;

    let mix = MixtureSpec::new(vec![(1.0, Component::gaussian(vec![0.0, 0.0], 1.0))])?;
    let data = gen_gaussian_mixture(&mix, 200, 5)?;
    let eig = eigendecompose(&kernel_matrix(&spec, &data)?)?;
    let tail = check_tail_bound(&spec, &data, &eig, &probe_points(&data, 50, 1.0, 5))?;
    println!("tail bound: {} checks, {} violations, worst margin {:.2e}", tail.checks, tail.violations, tail.worst_margin);

    for sep in [2.0, 4.0, 6.0] {
        let (a, b) = (Component::gaussian_1d(0.0, 1.0), Component::gaussian_1d(sep, 1.0));
        let r = compute_r(&spec, &a, &b, (0.5, 0.5), 20_000, 1)?;
        let mix = MixtureSpec::new(vec![(0.5, a), (0.5, b)])?;
        let rep = check_top_eigenvalue_bound(&spec, &mix, 600, 1)?;
        println!(
            "separation {sep}: lambda_0 = {:.4}, parts = {:.4?}, r = {:.4} (Monte Carlo {:.4} +- {:.4}, exact {:.4}), {:?}",
            rep.lambda0,
            rep.lambda0_parts,
            rep.r,
            r.estimate,
            r.std_error,
            r.closed_form.unwrap_or(f64::NAN),
            rep.status
        );
    }

    // An unbalanced, well separated pair has a real eigen-gap.
    let mix = MixtureSpec::new(vec![
        (0.7, Component::gaussian_1d(0.0, 0.6)),
        (0.3, Component::gaussian_1d(3.5, 0.6)),
    ])?;
    let rep = check_eigenfunction_perturbation(&spec, &mix, 500, 2)?;
    println!(
        "perturbation: eps = {:.2e}, r = {:.2e}, t = {:.4}, distance = {:.2e}, {:?}",
        rep.epsilon.unwrap_or(f64::NAN),
        rep.r,
        rep.t,
        rep.distance.unwrap_or(f64::NAN),
        rep.status
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> daspec::Result<()> {
    run_example()
}
