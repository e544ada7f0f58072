//! Exact properties of η_q and of its noisy version.

use alloc_hardness::distributions::TupleDistribution;
use alloc_hardness::gadgets::soundness_constant;
use alloc_hardness::rational::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for q in [1, 2, 4] {
        let eta = TupleDistribution::eta(q)?;
        let report = eta.analyze();
        println!(
            "q={q}: balanced={} pairwise={} P[some zero]={} soundness constant={}",
            report.balanced,
            report.pairwise_independent,
            report.prob_some_zero,
            soundness_constant(q)
        );
        assert!(report.balanced && report.pairwise_independent && report.prob_some_zero.is_one());
    }
    let eps = Rational::new(1, 10);
    let noisy = TupleDistribution::eta(2)?.add_noise(&eps)?.analyze();
    println!(
        "noisy q=2, eps={eps}: min={} P[some zero]={}",
        noisy.min_probability, noisy.prob_some_zero
    );
    assert_eq!(noisy.min_probability, Rational::new(1, 810));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
