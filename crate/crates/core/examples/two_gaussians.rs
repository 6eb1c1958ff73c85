// Two well-separated Gaussians on the line, clustered with a fixed
// bandwidth. Prints the leading spectrum and how the labels line up with the
// sign of x.

use daspec::cli::two_gaussians_spec;
use daspec::datagen::gen_gaussian_mixture;
use daspec::{cluster, label_agreement, DaSpecParams};

pub fn run_example() -> daspec::Result<()> {
    let data = gen_gaussian_mixture(&two_gaussians_spec(), 1000, 2024)?;
    let fit = cluster(&data, &DaSpecParams::default().with_bandwidth(0.3))?;

    println!("estimated groups: {}", fit.g_hat);
    for s in &fit.selected {
        println!("  eigenvector {:>3}  lambda = {:.5}  eps = {:.2e}", s.index, s.eigenvalue, s.epsilon);
    }
    let side: Vec<usize> = data.points().map(|p| if p[0] > 0.0 { 1 } else { 2 }).collect();
    let agree = label_agreement(&fit.labels, &side)?;
    println!("agreement with sign(x): {agree:.3}");
    assert_eq!(fit.g_hat, 2);
    assert!(agree >= 0.9);
    Ok(())
}

#[allow(dead_code)]
fn main() -> daspec::Result<()> {
    run_example()
}
