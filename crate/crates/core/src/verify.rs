//! Numerical check of the one-dimensional Lieb–Thirring inequality
//! `Σ|λ_j| ≤ l · L^cl_{1,1} · ∫ V_-^{3/2}` for model potentials.
//!
//! `-d²/dx²` is discretized on `[-L, L]` with Dirichlet ends and `n` interior
//! points. Negative eigenvalues of the resulting tridiagonal matrix are found
//! by Sturm-sequence bisection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::l_cl;
use crate::functionals::ProblemSpec;
use crate::quad::{integrate, QuadError, QuadSpec};

/// Bisection stops once the bracket is narrower than this.
pub const EIGEN_TOL: f64 = 1e-12;

/// Potentials larger than this in magnitude at the box edge are rejected.
pub const EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("|V| = {value:e} at the box edge x = {half_width}; enlarge the box")]
    Truncated { half_width: f64, value: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `-ν(ν+1)/w² · sech²(x/w)`
    PoschlTeller,
    /// `-depth · exp(-(x/w)²)`
    GaussianWell,
    /// `-depth` on `|x| < w`
    SquareWell,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    #[serde(default = "unit_width")]
    pub width: f64,
}

fn unit_width() -> f64 {
    1.0
}

impl PotentialSpec {
    pub fn poschl_teller(nu: f64, width: f64) -> Self {
        Self {
            kind: PotentialKind::PoschlTeller,
            nu: Some(nu),
            depth: None,
            width,
        }
    }

    pub fn gaussian_well(depth: f64, width: f64) -> Self {
        Self {
            kind: PotentialKind::GaussianWell,
            nu: None,
            depth: Some(depth),
            width,
        }
    }

    pub fn square_well(depth: f64, width: f64) -> Self {
        Self {
            kind: PotentialKind::SquareWell,
            nu: None,
            depth: Some(depth),
            width,
        }
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: String| Err(VerifyError::InvalidPotential(m));
        if !(self.width > 0.0) || !self.width.is_finite() {
            return bad(format!("width must be positive, got {}", self.width));
        }
        match self.kind {
            PotentialKind::PoschlTeller => match (self.nu, self.depth) {
                (Some(nu), None) if nu > 0.0 && nu.is_finite() => Ok(()),
                (Some(nu), None) => bad(format!("nu must be positive, got {nu}")),
                _ => bad("poschl_teller takes `nu` and no `depth`".into()),
            },
            PotentialKind::GaussianWell | PotentialKind::SquareWell => {
                match (self.nu, self.depth) {
                    (None, Some(d)) if d >= 0.0 && d.is_finite() => Ok(()),
                    (None, Some(d)) => bad(format!("depth must be non-negative, got {d}")),
                    _ => bad("wells take `depth` and no `nu`".into()),
                }
            }
        }
    }

    /// Well depth `max(-V)`.
    fn amplitude(&self) -> f64 {
        match self.kind {
            PotentialKind::PoschlTeller => {
                let nu = self.nu.unwrap_or(0.0);
                nu * (nu + 1.0) / (self.width * self.width)
            }
            _ => self.depth.unwrap_or(0.0),
        }
    }

    /// `V(x)`, always `<= 0`.
    pub fn eval(&self, x: f64) -> f64 {
        let u = x / self.width;
        let shape = match self.kind {
            PotentialKind::PoschlTeller => {
                let s = 1.0 / u.cosh();
                s * s
            }
            PotentialKind::GaussianWell => (-u * u).exp(),
            PotentialKind::SquareWell => {
                if u.abs() < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        -self.amplitude() * shape
    }

    /// `∫ V_-^{3/2} dx` over the real line.
    pub fn integral_three_halves(&self, quad: &QuadSpec) -> Result<f64, VerifyError> {
        let amp = self.amplitude();
        if amp == 0.0 {
            return Ok(0.0);
        }
        let w = self.width;
        let scale = amp.powf(1.5) * w;
        // even potentials: 2 ∫_0^∞ in the rescaled variable u = x / w
        let half = match self.kind {
            PotentialKind::SquareWell => 1.0,
            PotentialKind::PoschlTeller => {
                integrate(|u| (1.0 / u.cosh()).powi(3), 0.0, f64::INFINITY, quad)?.value
            }
            PotentialKind::GaussianWell => {
                integrate(|u| (-1.5 * u * u).exp(), 0.0, f64::INFINITY, quad)?.value
            }
        };
        Ok(2.0 * scale * half)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub half_width: f64,
    pub n_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            half_width: 20.0,
            n_points: 8001,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), VerifyError> {
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(VerifyError::InvalidGrid(format!(
                "half_width must be positive, got {}",
                self.half_width
            )));
        }
        if self.n_points < 3 {
            return Err(VerifyError::InvalidGrid(format!(
                "need at least 3 grid points, got {}",
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n_points as f64 + 1.0)
    }

    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * self.n_points + 1,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Negative eigenvalues, largest (closest to zero) first.
    pub negative_eigenvalues: Vec<f64>,
    /// `Σ |λ_j|`
    pub sum_negative: f64,
    /// `∫ V_-^{3/2}`
    pub potential_integral: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `rhs - lhs`
    pub margin: f64,
}

/// Raised when refining the grid changes `Σ|λ_j|` by more than 1%.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridTooCoarse {
    pub sum_negative: f64,
    pub refined_sum_negative: f64,
    pub relative_change: f64,
}

struct Tridiagonal {
    diag: Vec<f64>,
    off_sq: f64,
}

impl Tridiagonal {
    fn new(pot: &PotentialSpec, grid: &GridSpec) -> Self {
        let h = grid.spacing();
        let inv_h2 = 1.0 / (h * h);
        let diag = (1..=grid.n_points)
            .map(|i| 2.0 * inv_h2 + pot.eval(-grid.half_width + i as f64 * h))
            .collect();
        Self {
            diag,
            off_sq: inv_h2 * inv_h2,
        }
    }

    /// Number of eigenvalues strictly below `lambda`.
    fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 {
                d - lambda
            } else {
                d - lambda - self.off_sq / q
            };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + lambda.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin lower bound; the off-diagonal row sums cancel `2/h²`.
    fn lower_bound(&self) -> f64 {
        let two_inv_h2 = 2.0 * self.off_sq.sqrt();
        self.diag.iter().map(|d| d - two_inv_h2).fold(0.0, f64::min) - 1.0
    }

    /// The `k`-th smallest eigenvalue (0-based) inside `[lo, hi]`.
    fn eigenvalue(&self, k: usize, mut lo: f64, mut hi: f64) -> f64 {
        while hi - lo > EIGEN_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

pub fn discretize_and_solve(
    pot: &PotentialSpec,
    grid: &GridSpec,
) -> Result<SpectrumResult, VerifyError> {
    solve_with(pot, grid, &QuadSpec::default())
}

pub fn solve_with(
    pot: &PotentialSpec,
    grid: &GridSpec,
    quad: &QuadSpec,
) -> Result<SpectrumResult, VerifyError> {
    pot.validate()?;
    grid.validate()?;
    let edge = pot.eval(grid.half_width).abs();
    if edge > EDGE_TOL {
        return Err(VerifyError::Truncated {
            half_width: grid.half_width,
            value: edge,
        });
    }
    let matrix = Tridiagonal::new(pot, grid);
    let count = matrix.count_below(0.0);
    let lo = matrix.lower_bound();
    let mut negative_eigenvalues: Vec<f64> = (0..count)
        .map(|k| matrix.eigenvalue(k, lo, 0.0).min(0.0))
        .collect();
    negative_eigenvalues.reverse();
    let sum_negative = -negative_eigenvalues.iter().sum::<f64>();
    Ok(SpectrumResult {
        negative_eigenvalues,
        sum_negative,
        potential_integral: pot.integral_three_halves(quad)?,
    })
}

/// Solve on `grid`, then on a grid with twice the points, and flag the pair
/// if `Σ|λ_j|` moved by more than 1%.
pub fn solve_checked(
    pot: &PotentialSpec,
    grid: &GridSpec,
    quad: &QuadSpec,
) -> Result<(SpectrumResult, Option<GridTooCoarse>), VerifyError> {
    let coarse = solve_with(pot, grid, quad)?;
    let fine = solve_with(pot, &grid.refined(), quad)?;
    let reference = fine.sum_negative.abs().max(f64::MIN_POSITIVE);
    let relative_change = (fine.sum_negative - coarse.sum_negative).abs() / reference;
    let advisory = (relative_change > 1e-2).then_some(GridTooCoarse {
        sum_negative: coarse.sum_negative,
        refined_sum_negative: fine.sum_negative,
        relative_change,
    });
    Ok((coarse, advisory))
}

/// Compare `Σ|λ_j|` with `l_ratio · L^cl_{1,1} · ∫ V_-^{3/2}`.
pub fn check_inequality(result: &SpectrumResult, l_ratio: f64) -> InequalityCheck {
    let l_classical = l_cl(ProblemSpec { d: 1, sigma: 1.0 });
    let lhs = result.sum_negative;
    let rhs = l_ratio * l_classical * result.potential_integral;
    InequalityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs,
        margin: rhs - lhs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyCase {
    pub name: String,
    pub potential: PotentialSpec,
    #[serde(default)]
    pub grid: GridSpec,
}

/// Model potentials used when no suite is supplied.
pub fn default_suite() -> Vec<VerifyCase> {
    let case = |name: &str, potential| VerifyCase {
        name: name.to_string(),
        potential,
        grid: GridSpec::default(),
    };
    vec![
        case("poschl_teller_nu1", PotentialSpec::poschl_teller(1.0, 1.0)),
        case(
            "poschl_teller_nu1.5",
            PotentialSpec::poschl_teller(1.5, 1.0),
        ),
        case("poschl_teller_nu2", PotentialSpec::poschl_teller(2.0, 1.0)),
        case("poschl_teller_nu3", PotentialSpec::poschl_teller(3.0, 1.0)),
        VerifyCase {
            name: "poschl_teller_nu2_wide".to_string(),
            potential: PotentialSpec::poschl_teller(2.0, 2.0),
            grid: GridSpec {
                half_width: 40.0,
                n_points: 8001,
            },
        },
        case("gaussian_depth1", PotentialSpec::gaussian_well(1.0, 1.0)),
        case("gaussian_depth5", PotentialSpec::gaussian_well(5.0, 1.0)),
        case("gaussian_depth20", PotentialSpec::gaussian_well(20.0, 1.0)),
        case("square_depth1", PotentialSpec::square_well(1.0, 1.0)),
        case("square_depth10", PotentialSpec::square_well(10.0, 1.0)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(pot: PotentialSpec, n: usize) -> SpectrumResult {
        discretize_and_solve(
            &pot,
            &GridSpec {
                half_width: 20.0,
                n_points: n,
            },
        )
        .unwrap()
    }

    #[test]
    fn poschl_teller_spectrum() {
        // bound states -(ν - j)², j = 0..⌈ν⌉-1
        let r = solve(PotentialSpec::poschl_teller(2.0, 1.0), 8001);
        assert_eq!(r.negative_eigenvalues.len(), 2);
        assert!((r.negative_eigenvalues[0] + 1.0).abs() < 1e-3);
        assert!((r.negative_eigenvalues[1] + 4.0).abs() < 1e-3);
        assert!((r.sum_negative - 5.0).abs() < 1e-3);
        // ∫ 6^{3/2} sech³ = 6^{3/2} π / 2
        let exact = 6f64.powf(1.5) * std::f64::consts::PI / 2.0;
        assert!((r.potential_integral - exact).abs() < 1e-9 * exact);

        let r = solve(PotentialSpec::poschl_teller(1.0, 1.0), 8001);
        assert_eq!(r.negative_eigenvalues.len(), 1);
        assert!((r.sum_negative - 1.0).abs() < 1e-3);
    }

    #[test]
    fn second_order_convergence() {
        let pot = PotentialSpec::poschl_teller(2.0, 1.0);
        let errs: Vec<f64> = [1001, 2003, 4007]
            .iter()
            .map(|&n| (solve(pot, n).sum_negative - 5.0).abs())
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "{errs:?}");
        }
    }

    #[test]
    fn sturm_count_matches_eigenvalues() {
        let pot = PotentialSpec::gaussian_well(20.0, 1.0);
        let grid = GridSpec {
            half_width: 20.0,
            n_points: 2001,
        };
        let matrix = Tridiagonal::new(&pot, &grid);
        let r = discretize_and_solve(&pot, &grid).unwrap();
        for &lambda in &r.negative_eigenvalues {
            let below = matrix.count_below(lambda - 1e-9);
            let above = matrix.count_below(lambda + 1e-9);
            assert_eq!(above, below + 1);
        }
        assert_eq!(matrix.count_below(0.0), r.negative_eigenvalues.len());
        for w in r.negative_eigenvalues.windows(2) {
            assert!(w[0] > w[1]);
        }
    }

    #[test]
    fn scaling_leaves_ratio_unchanged() {
        let base = PotentialSpec::poschl_teller(2.0, 1.0);
        let r0 = solve(base, 4001);
        for lambda in [0.5, 2.0] {
            let pot = PotentialSpec::poschl_teller(2.0, 1.0 / lambda);
            let grid = GridSpec {
                half_width: 20.0 / lambda,
                n_points: 4001,
            };
            let r = discretize_and_solve(&pot, &grid).unwrap();
            let ratio0 = r0.sum_negative / r0.potential_integral;
            let ratio = r.sum_negative / r.potential_integral;
            assert!((ratio - ratio0).abs() < 1e-3 * ratio0);
        }
    }

    #[test]
    fn classical_constant_too_small_fails() {
        let r = solve(PotentialSpec::poschl_teller(2.0, 1.0), 8001);
        let check = check_inequality(&r, 1.0);
        assert!(!check.holds);
        assert!((check.rhs - 6f64.powf(1.5) / 3.0).abs() < 1e-6);
        assert!(check_inequality(&r, 1.456).holds);
    }

    #[test]
    fn default_suite_holds() {
        for case in default_suite() {
            let (r, advisory) =
                solve_checked(&case.potential, &case.grid, &QuadSpec::default()).unwrap();
            assert!(check_inequality(&r, 1.456).holds, "{}", case.name);
            assert!(advisory.is_none(), "{}", case.name);
        }
    }

    #[test]
    fn zero_depth_has_no_bound_states() {
        let r = solve(PotentialSpec::square_well(0.0, 1.0), 1001);
        assert!(r.negative_eigenvalues.is_empty());
        assert_eq!(r.sum_negative, 0.0);
        let c = check_inequality(&r, 1.456);
        assert!(c.holds && c.margin == 0.0);
    }

    #[test]
    fn rejections() {
        let grid = GridSpec::default();
        assert!(discretize_and_solve(&PotentialSpec::poschl_teller(-1.0, 1.0), &grid).is_err());
        assert!(discretize_and_solve(&PotentialSpec::gaussian_well(1.0, 0.0), &grid).is_err());
        let bad_grid = GridSpec {
            half_width: 20.0,
            n_points: 1,
        };
        assert!(discretize_and_solve(&PotentialSpec::gaussian_well(1.0, 1.0), &bad_grid).is_err());
        let tight = GridSpec {
            half_width: 2.0,
            n_points: 101,
        };
        assert!(matches!(
            discretize_and_solve(&PotentialSpec::gaussian_well(1.0, 1.0), &tight),
            Err(VerifyError::Truncated { .. })
        ));
        let json = r#"{"kind": "poschl_teller", "nu": 2, "extra": 1}"#;
        assert!(serde_json::from_str::<PotentialSpec>(json).is_err());
        let json = r#"{"kind": "poschl_teller", "nu": 2}"#;
        let p: PotentialSpec = serde_json::from_str(json).unwrap();
        assert_eq!(p.width, 1.0);
    }
}
