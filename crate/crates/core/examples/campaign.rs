// Drive the command-line front end in-process: a JSON Lines optimization
// campaign from a config file, then the regression table.

use ltbounds::cli;
use serde_json::Value;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/optimize_seeds.json");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(["ltbounds", "optimize", config], &mut out, &mut err);
    if code != cli::EXIT_OK {
        return Err(String::from_utf8_lossy(&err).into_owned().into());
    }
    for line in String::from_utf8(out)?.lines() {
        let record: Value = serde_json::from_str(line)?;
        if let Some(summary) = record.get("summary") {
            println!("summary: {summary}");
        } else {
            println!(
                "run {} (d = {}, sigma = {}): C <= {}  L/L^cl <= {}",
                record["run"],
                record["d"],
                record["sigma"],
                record["result"]["best_value"],
                record["l_ratio"]
            );
        }
    }

    let mut out = Vec::new();
    let code = cli::run(
        ["ltbounds", "table", "--paper", "--format", "text"],
        &mut out,
        &mut err,
    );
    print!("\n{}", String::from_utf8(out)?);
    if code != cli::EXIT_OK {
        return Err("paper table regression".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("campaign example");
}
