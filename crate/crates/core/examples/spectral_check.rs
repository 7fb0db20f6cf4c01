// Finite-difference spectra of model potentials checked against the 1-D
// inequality with the proven constant and with the classical one.

use ltbounds::quad::QuadSpec;
use ltbounds::verify::{
    check_inequality, default_suite, discretize_and_solve, solve_checked, GridSpec, PotentialSpec,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let quad = QuadSpec::default();
    println!(
        "{:>24} {:>4} {:>12} {:>12} {:>12} {:>6}",
        "potential", "N", "sum|λ|", "rhs(1.456)", "margin", "holds"
    );
    for case in default_suite() {
        let (spectrum, advisory) = solve_checked(&case.potential, &case.grid, &quad)?;
        let check = check_inequality(&spectrum, 1.456);
        println!(
            "{:>24} {:>4} {:>12.6} {:>12.6} {:>12.6} {:>6}",
            case.name,
            spectrum.negative_eigenvalues.len(),
            check.lhs,
            check.rhs,
            check.margin,
            check.holds
        );
        if let Some(a) = advisory {
            println!(
                "    grid too coarse: relative change {:.2e}",
                a.relative_change
            );
        }
    }

    // the classical constant alone is not enough
    let pt = discretize_and_solve(
        &PotentialSpec::poschl_teller(2.0, 1.0),
        &GridSpec::default(),
    )?;
    let weyl = check_inequality(&pt, 1.0);
    println!(
        "\nPoschl-Teller nu = 2 with l = 1: lhs {:.6} > rhs {:.6} (holds = {})",
        weyl.lhs, weyl.rhs, weyl.holds
    );

    println!("\nconvergence in the grid size (exact sum 5):");
    for n in [1001, 2003, 4007, 8015] {
        let grid = GridSpec {
            half_width: 20.0,
            n_points: n,
        };
        let r = discretize_and_solve(&PotentialSpec::poschl_teller(2.0, 1.0), &grid)?;
        println!("  n = {n:>5}: error {:.3e}", (r.sum_negative - 5.0).abs());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("spectral example");
}
