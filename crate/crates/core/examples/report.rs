//! Runs a CLI experiment in-process and prints the CSV it writes.

use alloc_hardness::cli::run_from;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("alloc-hardness-example-{}", std::process::id()));
    let out = dir.to_string_lossy().to_string();
    let code = run_from(
        ["alloc-hardness", "--out", &out, "ratios", "--eps", "1/1000"],
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    print!("{}", std::fs::read_to_string(dir.join("report.csv"))?);
    std::fs::remove_dir_all(&dir)?;
    if code != 0 {
        return Err(format!("exit status {code}").into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
