//! Exhaustive optima under the three objectives on one small instance.

use alloc_hardness::allocation::{AllocationInstance, Good, Objective};
use alloc_hardness::limits::Caps;
use alloc_hardness::rational::Rational;
use alloc_hardness::solvers::{check_single_large_good_property, solve_exact};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let r = Rational::new;
    let inst = AllocationInstance::new(
        2,
        vec![
            Good::new(0, vec![(0, r(3, 1)), (1, r(1, 1))]).with_size(r(1, 2)),
            Good::new(1, vec![(0, r(2, 1)), (1, r(2, 1))]).with_size(r(1, 2)),
            Good::new(2, vec![(1, r(1, 1))]).with_size(r(1, 1)),
        ],
    )?
    .with_budgets(vec![r(4, 1), r(2, 1)])?
    .with_capacities(vec![r(1, 1), r(1, 1)])?;
    let caps = Caps::default();
    for obj in [Objective::Nash, Objective::Budgeted, Objective::UswGap] {
        let res = solve_exact(&inst, obj, &caps)?;
        println!("{obj}: {} via {:?}", res.best_value, res.best_allocation.assignment);
    }

    let eps = r(1, 10);
    let all = |v: Rational| (0..3).map(|a| (a, v.clone())).collect::<Vec<_>>();
    let family = AllocationInstance::new(
        3,
        vec![
            Good::new(0, all(eps.recip())).large(),
            Good::new(1, all(eps.recip())).large(),
            Good::new(2, all(r(1, 2))),
            Good::new(3, all(r(1, 2))),
        ],
    )?
    .with_groups(vec![vec![0, 1, 2]])?;
    println!(
        "optimal Nash allocations give one large good per agent: {}",
        check_single_large_good_property(&family, &eps, &caps)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
