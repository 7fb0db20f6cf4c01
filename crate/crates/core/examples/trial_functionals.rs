// Evaluate the low-momentum objective 𝒞 at several trial pairs and
// turn each value into a bound.

use ltbounds::constants::bound_from_c;
use ltbounds::functionals::{c_objective, g_profile, phi_l2, ProblemSpec};
use ltbounds::quad::QuadSpec;
use ltbounds::trial::{FFamily, PhiFamily};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let quad = QuadSpec::default();
    let one = ProblemSpec::new(1, 1.0)?;
    let frac = ProblemSpec::new(3, 0.5)?;

    let trials = [
        (
            "indicator, uniform",
            one,
            FFamily::indicator(),
            PhiFamily::uniform(),
        ),
        (
            "simple",
            one,
            FFamily::rational_power(1.5, 1.0)?,
            PhiFamily::bump_simple(),
        ),
        (
            "rich",
            one,
            FFamily::rational_power(4.5, 0.25)?,
            PhiFamily::bump_rich(0.36, 2.1)?,
        ),
        (
            "d = 3, sigma = 1/2",
            frac,
            FFamily::rational_power(10.0, 0.25)?,
            PhiFamily::bump_power(2.0, 4.0)?,
        ),
    ];

    for (name, spec, f, phi) in trials {
        let c = c_objective(&f, &phi, spec, &quad)?;
        let bound = bound_from_c(spec, c)?;
        println!(
            "{name:>20}: C = {c:.9}  |phi|^2 = {:.6}  K/K^cl >= {:.6}  L/L^cl <= {:.6}",
            phi_l2(&phi, &quad)?,
            bound.k_ratio,
            bound.l_ratio
        );
    }

    let f = FFamily::rational_power(4.5, 0.25)?;
    let phi = PhiFamily::bump_rich(0.36, 2.1)?;
    println!("\naveraged profile g for the rich pair:");
    for t in [0.01, 0.1, 0.5, 1.0, 2.0, 10.0] {
        println!("  g({t:>5}) = {:.8}", g_profile(&f, &phi, t, &quad)?);
    }
    println!("\nserialized: {}", serde_json::to_string(&(f, phi))?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("trial example");
}
