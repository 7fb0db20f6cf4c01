// The weighted-deficit minimizer `1/(1 + μ t^β)`: closed form, quadrature,
// and a Nelder–Mead search over `(1 + μ t^a)^{-p}` that finds it again.

use ltbounds::constants::lemma_min;
use ltbounds::functionals::{a_functional, weighted_deficit, ProblemSpec};
use ltbounds::optimize::{minimize_lemma, OptConfig, TrialParams};
use ltbounds::quad::QuadSpec;
use ltbounds::trial::FFamily;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let quad = QuadSpec::default();
    for beta in [1.5, 2.0, 3.0, 4.0] {
        let (min_value, mu) = lemma_min(beta)?;
        let f = FFamily::lemma_optimal(beta)?;
        let by_quadrature = weighted_deficit(&f, beta, &quad)?;
        println!(
            "beta = {beta}: min = {min_value:.12}  quadrature = {by_quadrature:.12}  mu* = {mu:.10}"
        );
    }

    // A_f for d = 3, sigma = 1 uses beta = 1 + 3/2
    let spec = ProblemSpec::new(3, 1.0)?;
    let beta = 1.0 + spec.exponent();
    let a = a_functional(&FFamily::lemma_optimal(beta)?, spec, &quad)?;
    println!("A_f at d = 3: {a:.12} = (3/2) * {:.12}", lemma_min(beta)?.0);

    let cfg = OptConfig {
        seed_params: TrialParams {
            a: 2.5,
            p: 0.6,
            q: 0.36,
            r: 2.1,
        },
        ..OptConfig::default()
    };
    let result = minimize_lemma(1.5, &cfg, &quad)?;
    println!(
        "Nelder-Mead from (2.5, 0.6): value {:.12} at (a, p) = ({:.6}, {:.6}) after {} iterations",
        result.best_value, result.best_params[0], result.best_params[1], result.iterations
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("lemma example");
}
