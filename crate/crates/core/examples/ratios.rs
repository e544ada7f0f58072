//! Ratio lower bounds for the three objectives.

use alloc_hardness::rational::Rational;
use alloc_hardness::reduction::theorem_ratios;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for den in [100, 1_000_000] {
        let report = theorem_ratios(&Rational::new(1, den))?;
        println!(
            "eps=1/{den}: nash {:.4} budget {:.4} gap {:.4}, chains hold: {}",
            report.nash_ratio(),
            report.budget_ratio(),
            report.gap_ratio(),
            report.checks_pass()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
