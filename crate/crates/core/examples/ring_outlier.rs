// The ring suite: an incomplete ring, a blob, a five-point cluster and an
// outlier, with more noise added step by step. DaSpec picks its own
// bandwidth and group count; k-means and normalized spectral clustering get
// G - 1 and G groups for comparison.

use daspec::baselines::{kmeans, njw_spectral};
use daspec::datagen::{gen_ring_suite, RING_SUITE_NOISE};
use daspec::{cluster, label_agreement, DaSpecParams};

pub fn run_example() -> daspec::Result<()> {
    for (level, &noise) in RING_SUITE_NOISE.iter().enumerate() {
        let data = gen_ring_suite(noise, 1)?;
        let truth = data.labels().expect("generator labels");
        let fit = cluster(&data, &DaSpecParams::default())?;
        let w = fit.kernel().bandwidth;
        let g = fit.g_hat;
        println!("D{} (noise {noise}): w = {w:.3}, groups = {g}", level + 1);

        // rows: true group; columns: DaSpec label
        let mut table = vec![vec![0usize; g]; 4];
        for (t, l) in truth.iter().zip(&fit.labels) {
            table[t - 1][l - 1] += 1;
        }
        for (name, row) in ["ring", "blob", "small", "outlier"].iter().zip(&table) {
            println!("  {name:>8} {row:?}");
        }
        println!("  daspec agreement {:.3}", label_agreement(&fit.labels, truth)?);
        for k in [g.saturating_sub(1).max(2), g.max(2)] {
            let km = kmeans(&data, k, 50, 3)?;
            let sc = njw_spectral(&data, k, w, 3)?;
            println!(
                "  k = {k}: kmeans {:.3}  njw {:.3}",
                label_agreement(&km.labels, truth)?,
                label_agreement(&sc.labels, truth)?
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> daspec::Result<()> {
    run_example()
}
