//! Nelder–Mead minimization of the low-momentum objective and of the
//! weighted-deficit objective over rational-power trial parameters.
//!
//! The simplex is deterministic: axis-aligned steps of
//! `initial_simplex_scale · |x_i|` around the seed, standard coefficients
//! (reflection 1, expansion 2, contraction 1/2, shrink 1/2). Trial points are
//! clipped to the parameter box; inadmissible or failed evaluations cost
//! [`PENALTY`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functionals::{self, ProblemSpec};
use crate::quad::QuadSpec;
use crate::trial::{FFamily, PhiFamily, PhiKind, TrialError};

pub const PENALTY: f64 = 1e6;

pub const A_RANGE: (f64, f64) = (1.1, 20.0);
pub const P_RANGE: (f64, f64) = (0.05, 3.0);
pub const Q_RANGE: (f64, f64) = (0.05, 3.0);
pub const R_RANGE: (f64, f64) = (0.5, 10.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),
    #[error("{failed} of {total} initial simplex evaluations failed; the seed box is unusable")]
    ObjectiveFailure { failed: usize, total: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialParams {
    pub a: f64,
    pub p: f64,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_r")]
    pub r: f64,
}

fn default_q() -> f64 {
    0.36
}

fn default_r() -> f64 {
    2.1
}

impl TrialParams {
    /// The rich d = 1 trial: `(1 + μ t^{4.5})^{-1/4}` with
    /// `(1 - t^{0.36})^{2.1} / (1 + t)`.
    pub const RICH_D1: TrialParams = TrialParams {
        a: 4.5,
        p: 0.25,
        q: 0.36,
        r: 2.1,
    };

    /// The σ = 1/2, d = 3 trial: `(1 + μ t^{10})^{-1/4}` with `(1 - t²)⁴`.
    pub const FRACTIONAL_D3: TrialParams = TrialParams {
        a: 10.0,
        p: 0.25,
        q: 2.0,
        r: 4.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptConfig {
    pub max_iters: usize,
    pub x_tol: f64,
    pub f_tol: f64,
    pub initial_simplex_scale: f64,
    pub seed_params: TrialParams,
    /// Weight family; `q` and `r` are free only for the two bump kinds
    /// with exponents.
    pub phi_kind: PhiKind,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            x_tol: 1e-6,
            f_tol: 1e-9,
            initial_simplex_scale: 0.1,
            seed_params: TrialParams::RICH_D1,
            phi_kind: PhiKind::BumpRich,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |msg: String| Err(OptimizeError::InvalidConfig(msg));
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.x_tol > 0.0) || !(self.f_tol > 0.0) || !(self.initial_simplex_scale > 0.0) {
            return bad(format!(
                "tolerances and simplex scale must be positive (x_tol {}, f_tol {}, scale {})",
                self.x_tol, self.f_tol, self.initial_simplex_scale
            ));
        }
        let s = self.seed_params;
        for (name, v, (lo, hi)) in [
            ("a", s.a, A_RANGE),
            ("p", s.p, P_RANGE),
            ("q", s.q, Q_RANGE),
            ("r", s.r, R_RANGE),
        ] {
            if !(lo..=hi).contains(&v) {
                return bad(format!("seed {name} = {v} outside [{lo}, {hi}]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best value after each iteration.
    pub trace: Vec<(usize, f64)>,
}

/// Trial pair for a parameter vector `(a, p[, q, r])`.
pub fn build_pair(params: &[f64], phi_kind: PhiKind) -> Result<(FFamily, PhiFamily), TrialError> {
    let f = FFamily::rational_power(params[0], params[1])?;
    let phi = match phi_kind {
        PhiKind::BumpRich => PhiFamily::bump_rich(params[2], params[3])?,
        PhiKind::BumpPower => PhiFamily::bump_power(params[2], params[3])?,
        PhiKind::BumpSimple => PhiFamily::bump_simple(),
        PhiKind::Uniform => PhiFamily::uniform(),
    };
    Ok((f, phi))
}

fn has_shape_params(kind: PhiKind) -> bool {
    matches!(kind, PhiKind::BumpRich | PhiKind::BumpPower)
}

/// Minimize the low-momentum objective over `(a, p, q, r)`.
///
/// The returned value is an upper bound on 𝒞_{d,σ} whether or not the
/// simplex converged.
pub fn minimize_c(
    spec: ProblemSpec,
    cfg: &OptConfig,
    quad: &QuadSpec,
) -> Result<OptResult, OptimizeError> {
    cfg.validate()?;
    spec.validate()
        .map_err(|e| OptimizeError::InvalidConfig(e.to_string()))?;
    let s = cfg.seed_params;
    let (seed, bounds) = if has_shape_params(cfg.phi_kind) {
        (
            vec![s.a, s.p, s.q, s.r],
            vec![A_RANGE, P_RANGE, Q_RANGE, R_RANGE],
        )
    } else {
        (vec![s.a, s.p], vec![A_RANGE, P_RANGE])
    };
    let kind = cfg.phi_kind;
    let objective = |x: &[f64]| -> Option<f64> {
        if 2.0 * x[0] * x[1] <= 1.0 {
            return None;
        }
        let (f, phi) = build_pair(x, kind).ok()?;
        functionals::c_objective(&f, &phi, spec, quad).ok()
    };
    run(objective, &seed, &bounds, cfg)
}

/// Minimize `∫ (1 - f)² t^{-β}` over normalized `(1 + μ t^a)^{-p}`; the
/// optimum sits at `a = β`, `p = 1`.
pub fn minimize_lemma(
    beta: f64,
    cfg: &OptConfig,
    quad: &QuadSpec,
) -> Result<OptResult, OptimizeError> {
    cfg.validate()?;
    if !(beta > 1.0) {
        return Err(OptimizeError::InvalidConfig(format!(
            "beta must exceed 1, got {beta}"
        )));
    }
    let objective = |x: &[f64]| -> Option<f64> {
        if 2.0 * x[0] * x[1] <= 1.0 {
            return None;
        }
        let f = FFamily::rational_power(x[0], x[1]).ok()?;
        functionals::weighted_deficit(&f, beta, quad).ok()
    };
    let s = cfg.seed_params;
    run(objective, &[s.a, s.p], &[A_RANGE, P_RANGE], cfg)
}

fn run<F>(
    objective: F,
    seed: &[f64],
    bounds: &[(f64, f64)],
    cfg: &OptConfig,
) -> Result<OptResult, OptimizeError>
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let settings = Settings {
        max_iters: cfg.max_iters,
        x_tol: cfg.x_tol,
        f_tol: cfg.f_tol,
        scale: cfg.initial_simplex_scale,
    };
    let mut first = nelder_mead(&objective, seed, bounds, &settings, 0)?;
    if first.converged {
        return Ok(first);
    }
    // one restart from the best vertex
    let restart_seed = first.best_params.clone();
    let second = nelder_mead(
        &objective,
        &restart_seed,
        bounds,
        &settings,
        first.iterations,
    )?;
    first.trace.extend(second.trace);
    Ok(OptResult {
        best_params: second.best_params,
        best_value: second.best_value.min(first.best_value),
        iterations: second.iterations,
        converged: second.converged,
        trace: first.trace,
    })
}

struct Settings {
    max_iters: usize,
    x_tol: f64,
    f_tol: f64,
    scale: f64,
}

struct Vertex {
    x: Vec<f64>,
    value: f64,
}

fn clip(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

fn nelder_mead<F>(
    objective: &F,
    seed: &[f64],
    bounds: &[(f64, f64)],
    settings: &Settings,
    start_iter: usize,
) -> Result<OptResult, OptimizeError>
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let eval = |x: &[f64]| objective(x).unwrap_or(PENALTY);
    let n = seed.len();
    let make = |mut x: Vec<f64>| {
        clip(&mut x, bounds);
        let value = eval(&x);
        Vertex { x, value }
    };

    let mut simplex = Vec::with_capacity(n + 1);
    simplex.push(make(seed.to_vec()));
    for i in 0..n {
        let mut x = seed.to_vec();
        let step = settings.scale * if x[i] != 0.0 { x[i].abs() } else { 1.0 };
        // step inward when the seed sits on the upper bound
        x[i] = if x[i] + step > bounds[i].1 {
            x[i] - step
        } else {
            x[i] + step
        };
        simplex.push(make(x));
    }
    let failed = simplex.iter().filter(|v| v.value >= PENALTY).count();
    if 2 * failed > simplex.len() {
        return Err(OptimizeError::ObjectiveFailure {
            failed,
            total: simplex.len(),
        });
    }

    let mut trace = Vec::new();
    let mut iter = start_iter;
    let mut converged = false;
    let limit = start_iter + settings.max_iters;
    while iter < limit {
        simplex.sort_by(|u, v| u.value.total_cmp(&v.value));
        let best = &simplex[0];
        let spread = simplex[n].value - best.value;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|v| v.x.iter().zip(&best.x).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if diameter < settings.x_tol && spread < settings.f_tol {
            converged = true;
            break;
        }
        iter += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(&v.x) {
                *c += x / n as f64;
            }
        }
        let along = |coef: f64, from: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, x)| c + coef * (x - c))
                .collect()
        };

        let worst_value = simplex[n].value;
        let second_worst = simplex[n - 1].value;
        let reflected = make(along(-1.0, &simplex[n].x));
        if reflected.value < simplex[0].value {
            let expanded = make(along(-2.0, &simplex[n].x));
            simplex[n] = if expanded.value < reflected.value {
                expanded
            } else {
                reflected
            };
        } else if reflected.value < second_worst {
            simplex[n] = reflected;
        } else {
            let contracted = if reflected.value < worst_value {
                make(along(0.5, &reflected.x))
            } else {
                make(along(0.5, &simplex[n].x))
            };
            if contracted.value < reflected.value.min(worst_value) {
                simplex[n] = contracted;
            } else {
                let anchor = simplex[0].x.clone();
                for v in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = anchor
                        .iter()
                        .zip(&v.x)
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    *v = make(x);
                }
            }
        }
        let best_now = simplex
            .iter()
            .map(|v| v.value)
            .fold(f64::INFINITY, f64::min);
        trace.push((iter, best_now));
    }

    simplex.sort_by(|u, v| u.value.total_cmp(&v.value));
    let best = simplex.swap_remove(0);
    Ok(OptResult {
        best_params: best.x,
        best_value: best.value,
        iterations: iter,
        converged,
        trace,
    })
}
