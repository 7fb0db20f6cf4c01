// Closed-form bounds on `K/K^cl` and `L/L^cl` across dimensions, with the
// dual round trip and the large-d approach to `e`.

use ltbounds::constants::{self, Method};
use ltbounds::functionals::ProblemSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>6} {:>6} {:>18} {:>12} {:>12}",
        "d", "sigma", "method", "K/K^cl", "L/L^cl"
    );
    for (d, sigma) in [(1, 1.0), (2, 1.0), (3, 1.0), (3, 0.5), (2, 0.5), (1, 0.5)] {
        let spec = ProblemSpec::new(d, sigma)?;
        for report in constants::candidate_bounds(spec, None)? {
            println!(
                "{:>6} {:>6} {:>18} {:>12.6} {:>12.6}",
                d,
                sigma,
                report.method.as_str(),
                report.k_ratio,
                report.l_ratio
            );
            let back = constants::dual_convert(spec, report.k_ratio)?;
            assert!((back - report.l_ratio).abs() <= 1e-13 * report.l_ratio);
        }
    }

    let spec = ProblemSpec::new(3, 0.5)?;
    println!("\nK^cl_(3,1/2) = {:.6}", constants::k_cl(spec));

    println!("\nlarge-d limit (momentum-optimal vs Rumin original, sigma = 1):");
    for d in [10, 100, 1000, 10_000] {
        let spec = ProblemSpec::new(d, 1.0)?;
        let probe = constants::large_d_limit_probe(d, 1.0)?;
        let rumin = constants::bound_rumin_original(spec)?;
        assert_eq!(rumin.method, Method::RuminOriginal);
        println!("  d = {d:>6}: {probe:.9}  <=  {:.6}", rumin.l_ratio);
    }
    println!("  e       = {:.9}", std::f64::consts::E);

    for (d1, d) in [(1, 2), (1, 3), (2, 5), (1, 6)] {
        println!(
            "product identity ({d1},{d}) residual {:.2e}",
            constants::product_identity_check(d1, d)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("constants example");
}
