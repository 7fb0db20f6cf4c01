//! Variational functionals over trial pairs `(f, φ)`.
//!
//! With `γ = d/(2σ)`:
//!
//! * `A_f = γ ∫₀^∞ (1 - f(t))² t^{-1-γ} dt`
//! * `g(t) = ∫₀¹ φ(s) f(s t) ds`
//! * `𝒞(f, φ) = (∫ φ²)^γ · γ ∫₀^∞ (1 - g(t))² t^{-1-γ} dt`
//!
//! Any admissible pair gives an upper bound on 𝒞_{d,σ}. Outer integrals are
//! split at `t = 1`; the tail uses the semi-infinite transform with a power
//! that makes `t^{-1-γ}` smooth at infinity. The deficit `1 - g` is
//! integrated directly as `∫ φ(s) (1 - f(st)) ds`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::{self, QuadError, QuadResult, QuadSpec};
use crate::trial::{FFamily, PhiFamily};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionalError {
    #[error("integral diverges or failed to converge: {0}")]
    Divergent(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub d: u32,
    pub sigma: f64,
}

impl ProblemSpec {
    pub fn new(d: u32, sigma: f64) -> Result<Self, FunctionalError> {
        let spec = Self { d, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), FunctionalError> {
        if self.d < 1 || !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(FunctionalError::InvalidProblem(format!(
                "need d >= 1 and sigma > 0 (d = {}, sigma = {})",
                self.d, self.sigma
            )));
        }
        Ok(())
    }

    /// `γ = d / (2σ)`.
    pub fn exponent(&self) -> f64 {
        f64::from(self.d) / (2.0 * self.sigma)
    }
}

/// Tail power `m` for a `t^{-β}` tail: `m (β - 1) >= 1`, at least 2.
fn tail_power(beta: f64) -> u32 {
    ((1.0 / (beta - 1.0)).ceil() as u32).max(2)
}

fn require_converged(r: QuadResult, what: &str) -> Result<f64, FunctionalError> {
    if r.converged {
        Ok(r.value)
    } else {
        Err(FunctionalError::Divergent(format!(
            "{what}: value {} with error estimate {} after {} subdivisions",
            r.value, r.error_estimate, r.subdivisions_used
        )))
    }
}

fn divergent_on_overflow(e: QuadError, what: &str) -> FunctionalError {
    match e {
        QuadError::NonFinite { .. } => FunctionalError::Divergent(format!("{what}: {e}")),
        other => FunctionalError::Quad(other),
    }
}

/// `∫₀^∞ h(t)² t^{-β} dt` split at `t = 1`.
fn weighted_square<H>(h: H, beta: f64, q: &QuadSpec) -> Result<f64, FunctionalError>
where
    H: Fn(f64) -> Result<f64, FunctionalError>,
{
    // errors raised inside the integrand are stashed and re-raised
    let failure = std::cell::RefCell::new(None);
    let integrand = |t: f64| match h(t) {
        Ok(v) => v * v * t.powf(-beta),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let half = q.tightened(2.0);
    let near = quad::integrate(integrand, 0.0, 1.0, &half)
        .map_err(|e| divergent_on_overflow(e, "small-t panel"));
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let near = require_converged(near?, "small-t panel")?;
    let far = quad::integrate(
        integrand,
        1.0,
        f64::INFINITY,
        &half.with_tail_power(tail_power(beta)),
    )
    .map_err(|e| divergent_on_overflow(e, "tail"));
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let far = require_converged(far?, "tail")?;
    Ok(near + far)
}

/// `∫₀^∞ (1 - f(t))² t^{-β} dt`, the objective minimized in closed form by
/// [`crate::constants::lemma_min`].
pub fn weighted_deficit(f: &FFamily, beta: f64, q: &QuadSpec) -> Result<f64, FunctionalError> {
    if !(beta > 1.0) {
        return Err(FunctionalError::InvalidProblem(format!(
            "weight exponent must exceed 1, got {beta}"
        )));
    }
    weighted_square(|t| Ok(f.deficit(t)), beta, q)
}

/// `A_f^{(σ)} = γ ∫₀^∞ (1 - f(t))² t^{-1-γ} dt`.
pub fn a_functional(f: &FFamily, spec: ProblemSpec, q: &QuadSpec) -> Result<f64, FunctionalError> {
    spec.validate()?;
    let gamma = spec.exponent();
    Ok(gamma * weighted_deficit(f, 1.0 + gamma, q)?)
}

/// `1 - g(t) = ∫₀¹ φ(s) (1 - f(s t)) ds`.
pub fn profile_deficit(
    f: &FFamily,
    phi: &PhiFamily,
    t: f64,
    q: &QuadSpec,
) -> Result<f64, FunctionalError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(FunctionalError::InvalidProblem(format!(
            "profile argument must be positive and finite, got {t}"
        )));
    }
    let integrand = |s: f64| phi.eval(s) * f.deficit(s * t);
    // f turns over at s = transition / t
    let knee = (f.transition() / t).min(1.0);
    let half = q.tightened(2.0);
    let mut total = 0.0;
    for (lo, hi) in [(0.0, knee), (knee, 1.0)] {
        if hi > lo {
            let r = quad::integrate(integrand, lo, hi, &half)?;
            total += require_converged(r, "averaged profile")?;
        }
    }
    Ok(total)
}

/// `g(t) = ∫₀¹ φ(s) f(s t) ds`.
pub fn g_profile(
    f: &FFamily,
    phi: &PhiFamily,
    t: f64,
    q: &QuadSpec,
) -> Result<f64, FunctionalError> {
    Ok((1.0 - profile_deficit(f, phi, t, q)?).clamp(0.0, 1.0))
}

/// `∫₀¹ φ²`.
pub fn phi_l2(phi: &PhiFamily, q: &QuadSpec) -> Result<f64, FunctionalError> {
    let r = quad::integrate(|s| phi.eval(s).powi(2), 0.0, 1.0, q)?;
    require_converged(r, "phi L2 norm")
}

/// The low-momentum objective; an upper bound on 𝒞_{d,σ}.
///
/// The inner profile integrals run 100× tighter than the outer integral.
pub fn c_objective(
    f: &FFamily,
    phi: &PhiFamily,
    spec: ProblemSpec,
    q: &QuadSpec,
) -> Result<f64, FunctionalError> {
    spec.validate()?;
    let gamma = spec.exponent();
    let inner = q.tightened(100.0);
    let outer = weighted_square(|t| profile_deficit(f, phi, t, &inner), 1.0 + gamma, q)?;
    Ok(phi_l2(phi, &inner)?.powf(gamma) * gamma * outer)
}
