//! The GAP variant: welfare constants and an explicit R = 1 instance.

use alloc_hardness::constants::gap_c;
use alloc_hardness::limits::Caps;
use alloc_hardness::rational::Rational;
use alloc_hardness::reduction::{gap_no_formula, polynomial_grid_min, stationary_point, GapInstance};
use alloc_hardness::unique_games::UgInstance;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let eps = Rational::new(1, 100);
    let (x, v) = polynomial_grid_min(&gap_c(), 3000);
    println!("grid minimum of x^4 - cx: {v} at x = {x}");
    println!("stationary point: {:?}", stationary_point(&gap_c()));
    let no = gap_no_formula(&eps);
    println!("NO side: {} <= {} is {}", no.lhs, no.rhs, no.holds);

    let (ug, labeling) = UgInstance::planted(2, 2, 2, 1, 1)?;
    let gap = GapInstance::new(ug, eps, 2, Rational::new(1, 10))?;
    let caps = Caps::default();
    println!("certified YES welfare {}", gap.yes_usw());
    println!("realized YES welfare {}", gap.realized_yes_usw(&labeling, &[true, true], &caps)?);
    let inst = gap.materialize(&caps)?;
    println!("explicit instance: {} agents, {} goods", inst.n_agents(), inst.n_goods());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
