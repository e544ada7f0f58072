//! Decomposes a random function and lists its low-degree influences.

use alloc_hardness::boolean_functions::{EfronSteinDecomposition, FunctionTable};
use alloc_hardness::limits::Caps;
use alloc_hardness::rational::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let caps = Caps::default();
    let f = FunctionTable::random_with_mean(3, 2, &Rational::new(2, 3), 17)?;
    let es = EfronSteinDecomposition::new(&f, &caps)?;
    assert_eq!(es.reconstruct(), f.values());
    println!("nonzero components: {}", es.support().len());
    for d in 1..=3 {
        let profile = es.influence_profile(d)?;
        let shown: Vec<String> = profile.low_degree_influence.iter().map(|v| v.to_string()).collect();
        println!("d={d}: {}", shown.join(", "));
    }
    let dictator = FunctionTable::dictator(3, 2, 2)?;
    let profile = EfronSteinDecomposition::new(&dictator, &caps)?.influence_profile(1)?;
    println!("dictator on coordinate 2: {:?}", profile.low_degree_influence);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
