// Six planar Gaussians with random centers and spreads. Compares DaSpec
// (automatic bandwidth) with k-means and normalized spectral clustering
// given the true number of groups.

use daspec::baselines::{kmeans, njw_spectral};
use daspec::datagen::{gauss6_spec, gen_gaussian_mixture};
use daspec::{cluster, label_agreement, DaSpecParams};

pub fn run_example() -> daspec::Result<()> {
    for seed in 1..=3 {
        let spec = gauss6_spec(seed)?;
        let data = gen_gaussian_mixture(&spec, 400, seed)?;
        let truth = data.labels().expect("generator labels");
        let fit = cluster(&data, &DaSpecParams::default())?;
        let w = fit.kernel().bandwidth;
        let km = kmeans(&data, 6, 50, seed)?;
        let sc = njw_spectral(&data, 6, w, seed)?;
        println!(
            "seed {seed}: w = {w:.3}, groups = {}, agreement daspec {:.3} kmeans {:.3} njw {:.3}",
            fit.g_hat,
            label_agreement(&fit.labels, truth)?,
            label_agreement(&km.labels, truth)?,
            label_agreement(&sc.labels, truth)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> daspec::Result<()> {
    run_example()
}
