// Classifying new points with the eigenfunction extension of a fitted
// clustering.

use daspec::datagen::gen_gaussian_mixture;
use daspec::{classify, cluster, label_agreement, Component, DaSpecParams, MixtureSpec};

pub fn run_example() -> daspec::Result<()> {
    let mix = MixtureSpec::new(vec![
        (0.4, Component::gaussian(vec![0.0, 0.0], 0.5)),
        (0.35, Component::gaussian(vec![4.0, 0.0], 0.5)),
        (0.25, Component::gaussian(vec![2.0, 3.5], 0.5)),
    ])?;
    let train = gen_gaussian_mixture(&mix, 300, 8)?;
    let fit = cluster(&train, &DaSpecParams::default())?;
    println!("bandwidth {:.3}, groups {}", fit.kernel().bandwidth, fit.g_hat);

    let test = gen_gaussian_mixture(&mix, 200, 9)?;
    let predicted = test
        .points()
        .map(|x| classify(&fit, &train, fit.kernel(), x))
        .collect::<daspec::Result<Vec<_>>>()?;
    let agree = label_agreement(&predicted, test.labels().expect("generator labels"))?;
    println!("agreement on 200 new points: {agree:.3}");

    for x in [[0.0, 0.0], [4.0, 0.0], [2.0, 3.5], [2.0, 0.0]] {
        println!("  {x:?} -> group {}", classify(&fit, &train, fit.kernel(), &x)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> daspec::Result<()> {
    run_example()
}
