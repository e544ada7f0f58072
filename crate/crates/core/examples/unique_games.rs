//! Plants a labeling, then decodes it back from dictator functions.

use alloc_hardness::boolean_functions::FunctionTable;
use alloc_hardness::limits::Caps;
use alloc_hardness::rational::Rational;
use alloc_hardness::unique_games::{decode_labeling, UgInstance};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (ug, planted) = UgInstance::planted(4, 4, 2, 3, 9)?;
    println!("{} edges, planted satisfaction {}", ug.edges().len(), ug.satisfaction(&planted)?);
    let fs = (0..ug.a_count())
        .map(|a| FunctionTable::dictator(ug.r(), planted.a_label(a) + 1, 2))
        .collect::<Result<Vec<_>, _>>()?;
    let report = decode_labeling(&ug, &fs, 2, &Rational::new(1, 10), 0, &Caps::default())?;
    let sat = ug.satisfaction(&report.labeling)?;
    println!("decoded labels {:?}, satisfaction {sat}", report.labeling.labels);
    assert!(sat.is_one());
    println!("{}", serde_json::to_string(&ug)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
