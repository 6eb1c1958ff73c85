// Exponential kernel on evenly spread points of [-1, 1]. The top
// eigenfunction is cos(b x) on the interval, with b tan b = 1/w, and decays
// like exp(-|x|/w) outside it.

use daspec::analytic::{exponential_frequency, exponential_top_eigenfunction};
use daspec::kernels::extend_eigenfunction;
use daspec::{eigendecompose, kernel_matrix, DataSet, KernelSpec};

pub fn run_example() -> daspec::Result<()> {
    let (n, w) = (400, 0.5);
    let xs: Vec<f64> = (0..n).map(|i| -1.0 + (2 * i + 1) as f64 / n as f64).collect();
    let data = DataSet::from_scalars(&xs)?;
    let spec = KernelSpec::exponential(w)?;
    let eig = eigendecompose(&kernel_matrix(&spec, &data)?)?;

    // The empirical measure has density 1/2 on [-1, 1]; the Lebesgue
    // eigenvalue is twice the kernel-matrix eigenvalue.
    let lambda = 2.0 * eig.value(0);
    let b = exponential_frequency(w, lambda)?;
    println!("lambda = {lambda:.5}, b = {b:.5}, b tan b = {:.5} (1/w = {})", b * b.tan(), 1.0 / w);

    let at = |x: f64| extend_eigenfunction(&spec, &data, eig.value(0), eig.vector(0), &[x]);
    let (e0, a0) = (at(0.0)?, exponential_top_eigenfunction(w, b, lambda, 0.0)?);
    println!("     x   empirical   integral    cos(bx)");
    for i in 0..=10 {
        let x = -2.0 + 0.3 * i as f64;
        let emp = at(x)? / e0;
        let exact = exponential_top_eigenfunction(w, b, lambda, x)? / a0;
        let cos = if x.abs() <= 1.0 { format!("{:.4}", (b * x).cos()) } else { "-".into() };
        println!("{x:>6.2}  {emp:>9.4}  {exact:>9.4}  {cos:>9}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> daspec::Result<()> {
    run_example()
}
