// Nelder–Mead search over the rational-power trial family, started from the
// rich d = 1 seed and from a seed perturbed by 20%.

use std::time::Instant;

use ltbounds::constants::bound_from_c;
use ltbounds::functionals::ProblemSpec;
use ltbounds::optimize::{minimize_c, OptConfig, TrialParams};
use ltbounds::quad::QuadSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ProblemSpec::new(1, 1.0)?;
    let quad = QuadSpec::default();
    let s = TrialParams::RICH_D1;
    let seeds = [
        ("rich seed", s),
        (
            "perturbed seed",
            TrialParams {
                a: s.a * 1.2,
                p: s.p * 0.8,
                q: s.q * 1.2,
                r: s.r * 0.8,
            },
        ),
    ];
    for (label, seed) in seeds {
        let cfg = OptConfig {
            seed_params: seed,
            ..OptConfig::default()
        };
        let start = Instant::now();
        let result = minimize_c(spec, &cfg, &quad)?;
        let bound = bound_from_c(spec, result.best_value)?;
        println!(
            "{label:>15}: C_1 <= {:.9}  (a, p, q, r) = {:.4?}  iters {}  converged {}  {:.1?}",
            result.best_value,
            result.best_params,
            result.iterations,
            result.converged,
            start.elapsed()
        );
        println!(
            "{:>15}  K_1/K^cl >= {:.6}, L_1,1/L^cl <= {:.6}",
            "", bound.k_ratio, bound.l_ratio
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("optimize example");
}
