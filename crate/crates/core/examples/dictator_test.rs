//! Completeness and soundness of the dictator test.

use alloc_hardness::boolean_functions::FunctionTable;
use alloc_hardness::gadgets::DictatorTestInstance;
use alloc_hardness::limits::Caps;
use alloc_hardness::rational::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let caps = Caps::default();
    let test = DictatorTestInstance::new(2, 2, Rational::new(1, 10))?;
    for i in 1..=2 {
        let rep = test.completeness_utilities(i, &caps)?;
        println!("coordinate {i}: min utility {} vs bound {}", rep.min_non_large, rep.bound);
        assert!(rep.holds);
    }

    let dictator = FunctionTable::dictator(2, 1, 2)?;
    let random = FunctionTable::random_with_mean(2, 2, &Rational::new(2, 3), 3)?;
    println!("soundness of a dictator: {}", test.soundness_value(&dictator, &caps)?);
    println!("soundness of a random function: {}", test.soundness_value(&random, &caps)?);

    let noiseless = DictatorTestInstance::new(2, 2, Rational::zero())?;
    let landscape = noiseless.soundness_landscape(1, &caps)?;
    let best = landscape.iter().map(|e| e.value.clone()).max().unwrap();
    let at_best: Vec<_> = landscape.iter().filter(|e| e.value == best).collect();
    println!("{} functions, maximum {best} attained by {}", landscape.len(), at_best.len());
    for e in at_best {
        println!("  ones={:?} dictator={:?}", e.ones, e.dictator);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
