// A heavy and a light component: the top eigenvectors all describe the
// heavy one, and the light one only shows up further down the spectrum.
// DaSpec still finds both because it scans for sign-stable vectors rather
// than taking a fixed number from the top.

use daspec::theory::{interleaving_on_sample, PooledSample};
use daspec::{cluster, Component, DaSpecParams, KernelSpec, MixtureSpec};

pub fn run_example() -> daspec::Result<()> {
    let spec = KernelSpec::gaussian(0.3)?;
    let mix = MixtureSpec::new(vec![
        (0.95, Component::gaussian_1d(0.0, 0.5)),
        (0.05, Component::gaussian_1d(6.0, 0.5)),
    ])?;
    let sample = PooledSample::draw(&mix, 600, 4)?;
    let rep = interleaving_on_sample(&spec, &sample, 8)?;
    println!("  j   mixture    merged  from  mass-on  share");
    for (j, row) in rep.rows.iter().enumerate() {
        println!(
            "{j:>3}  {:.5}  {:.5}  {:>4}  {:>7}  {:.3}",
            row.mixture_value, row.merged_value, row.merged_component, row.dominant_component, row.concentration
        );
    }
    let fit = cluster(&sample.data, &DaSpecParams::default().with_bandwidth(spec.bandwidth))?;
    let picked: Vec<usize> = fit.selected.iter().map(|s| s.index).collect();
    println!("groups = {}, selected eigenvectors {picked:?}", fit.g_hat);
    Ok(())
}

#[allow(dead_code)]
fn main() -> daspec::Result<()> {
    run_example()
}
