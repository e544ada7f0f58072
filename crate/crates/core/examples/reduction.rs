//! Builds the allocation instance from a planted unique-games instance and
//! evaluates its YES allocation and the NO-case ceiling.

use alloc_hardness::boolean_functions::FunctionTable;
use alloc_hardness::limits::Caps;
use alloc_hardness::rational::Rational;
use alloc_hardness::reduction::MetaInstance;
use alloc_hardness::unique_games::UgInstance;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let caps = Caps::default();
    let (ug, labeling) = UgInstance::planted(2, 2, 2, 2, 4)?;
    let meta = MetaInstance::new(ug, Rational::new(1, 10), 2, Rational::new(1, 10))?;
    println!(
        "{} agents, {} large goods per node, {} dummy goods, δ = {}",
        meta.n_agents(),
        meta.large_per_group(),
        meta.dummy_count(),
        meta.delta()
    );
    println!("family check: {:?}", meta.validate(&caps)?);

    let yes = meta.yes_allocation(&labeling, &[true, true], &caps)?;
    println!("YES: min non-large utility {} >= {}", yes.min_non_large, yes.bound);

    let dictators = (0..2)
        .map(|a| FunctionTable::dictator(2, labeling.a_label(a) + 1, 2))
        .collect::<Result<Vec<_>, _>>()?;
    println!("ceiling for the dictator allocation: {}", meta.no_case_bound(&dictators, &caps)?);
    let random = (0..2)
        .map(|s| FunctionTable::random_with_mean(2, 2, &Rational::new(2, 3), s))
        .collect::<Result<Vec<_>, _>>()?;
    println!("ceiling for random functions: {}", meta.no_case_bound(&random, &caps)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
