//! Closed-form Lieb–Thirring bound formulas and the semiclassical constants
//! they are measured against.
//!
//! Ratios are `K/K^cl` (a lower bound, at most 1) and `L/L^cl` (an upper
//! bound, at least 1); they are related by `L/L^cl = (K/K^cl)^{-d/(2σ)}`.
//! Every ratio is assembled in log space and exponentiated once, so the
//! formulas stay finite at very large dimension.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functionals::ProblemSpec;
use crate::specfun;
use crate::trial::{FFamily, PhiFamily};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantsError {
    #[error("domain error: {0}")]
    Domain(String),
}

/// The d = 1 value of `L_{1,1}/L^cl` conjectured to be sharp, `2/√3`.
/// A reference line only; nothing here proves it.
pub const CONJECTURED_L11_RATIO: f64 = 1.154_700_538_379_251_5;

/// Upper bound on 𝒞₁ from the rich trial pair, rounded up to six digits.
pub const C1_UPPER: f64 = 0.373_556;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RuminOriginal,
    MomentumOptimal,
    LowMomentumAvg,
    FractionalFirst,
    FractionalSecond,
    /// The d = 1 low-momentum constant transferred to dimension d by
    /// induction over dimensions with operator-valued potentials. That
    /// induction is a proof; only its numerical consequence is used here.
    #[serde(rename = "lifted_1d")]
    Lifted1d,
    BestOf,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::RuminOriginal => "rumin_original",
            Method::MomentumOptimal => "momentum_optimal",
            Method::LowMomentumAvg => "low_momentum_avg",
            Method::FractionalFirst => "fractional_first",
            Method::FractionalSecond => "fractional_second",
            Method::Lifted1d => "lifted_1d",
            Method::BestOf => "best_of",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialPair {
    pub f: FFamily,
    pub phi: PhiFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(flatten)]
    pub spec: ProblemSpec,
    pub method: Method,
    pub k_ratio: f64,
    pub l_ratio: f64,
    pub c_value: Option<f64>,
    pub trial: Option<TrialPair>,
}

impl BoundReport {
    fn from_ln_k(spec: ProblemSpec, method: Method, ln_k: f64) -> Self {
        Self {
            spec,
            method,
            k_ratio: ln_k.exp(),
            l_ratio: (-spec.exponent() * ln_k).exp(),
            c_value: None,
            trial: None,
        }
    }

    pub fn with_trial(mut self, f: FFamily, phi: PhiFamily) -> Self {
        self.trial = Some(TrialPair { f, phi });
        self
    }
}

/// Kinetic semiclassical constant `K^cl_{d,σ} = d/(d+2σ) · ((2π)^d/|B₁|)^{2σ/d}`.
pub fn k_cl(spec: ProblemSpec) -> f64 {
    let d = f64::from(spec.d);
    let s = spec.sigma;
    let ln_phase = d * (2.0 * PI).ln() - specfun::ln_unit_ball_volume(spec.d);
    (d / (d + 2.0 * s)) * (2.0 * s / d * ln_phase).exp()
}

/// Weyl constant `L^cl_{1,d,σ} = 2σ/(d+2σ) · |B₁|/(2π)^d`.
pub fn l_cl(spec: ProblemSpec) -> f64 {
    let d = f64::from(spec.d);
    let s = spec.sigma;
    let ln_phase = specfun::ln_unit_ball_volume(spec.d) - d * (2.0 * PI).ln();
    (2.0 * s / (d + 2.0 * s)) * ln_phase.exp()
}

/// `L^cl_{α,d} = Γ(α+1) / ((4π)^{d/2} Γ(α + d/2 + 1))`.
pub fn l_cl_general(alpha: f64, d: u32) -> Result<f64, ConstantsError> {
    if !(alpha >= 1.0) || d < 1 {
        return Err(ConstantsError::Domain(format!(
            "l_cl_general needs alpha >= 1 and d >= 1 (alpha = {alpha}, d = {d})"
        )));
    }
    let half_d = 0.5 * f64::from(d);
    let ln = specfun::ln_gamma(alpha + 1.0).expect("alpha + 1 > 0")
        - half_d * (4.0 * PI).ln()
        - specfun::ln_gamma(alpha + half_d + 1.0).expect("positive argument");
    Ok(ln.exp())
}

/// Minimum of `∫₀^∞ (1-f)² t^{-β} dt` over `∫ f² = 1`, and the scale μ* of
/// the minimizer `1/(1 + μ* t^β)`.
pub fn lemma_min(beta: f64) -> Result<(f64, f64), ConstantsError> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(ConstantsError::Domain(format!(
            "lemma_min needs beta > 1, got {beta}"
        )));
    }
    let x = PI / beta;
    let ln_ratio = (x / x.sin()).ln();
    let ln_min = (beta - 1.0) * (beta - 1.0).ln() - beta * beta.ln() + beta * ln_ratio;
    let ln_mu = beta * (((beta - 1.0) / beta).ln() + ln_ratio);
    Ok((ln_min.exp(), ln_mu.exp()))
}

fn ln_k_momentum(spec: ProblemSpec) -> f64 {
    let d = f64::from(spec.d);
    let s = spec.sigma;
    let angle = 2.0 * PI * s / (d + 2.0 * s);
    (d / (d + 4.0 * s)).ln()
        + (1.0 + 2.0 * s / d)
            * (2.0 * (d + 2.0 * s).ln() + angle.sin().ln() - (2.0 * PI * s * d).ln())
}

/// Optimal momentum decomposition bound,
/// `K/K^cl ≥ d/(d+4σ) · [(d+2σ)² sin(2πσ/(d+2σ)) / (2πσd)]^{1+2σ/d}`.
pub fn bound_momentum_optimal(spec: ProblemSpec) -> BoundReport {
    let method = if spec.sigma == 1.0 {
        Method::MomentumOptimal
    } else {
        Method::FractionalFirst
    };
    BoundReport::from_ln_k(spec, method, ln_k_momentum(spec))
}

/// The original momentum-decomposition bound `L/L^cl ≤ ((d+4)/d)^{d/2}`, σ = 1 only.
pub fn bound_rumin_original(spec: ProblemSpec) -> Result<BoundReport, ConstantsError> {
    if spec.sigma != 1.0 {
        return Err(ConstantsError::Domain(format!(
            "rumin_original is defined for sigma = 1, got {}",
            spec.sigma
        )));
    }
    let d = f64::from(spec.d);
    Ok(BoundReport::from_ln_k(
        spec,
        Method::RuminOriginal,
        (d / (d + 4.0)).ln(),
    ))
}

/// Low-momentum averaging bound from an upper bound `c_upper` on 𝒞_{d,σ},
/// `K/K^cl ≥ d/(d+2σ) · (2σ/(d+2σ))^{4σ/d} · c^{-2σ/d}`.
pub fn bound_from_c(spec: ProblemSpec, c_upper: f64) -> Result<BoundReport, ConstantsError> {
    if !(c_upper > 0.0) || !c_upper.is_finite() {
        return Err(ConstantsError::Domain(format!(
            "c_upper must be positive, got {c_upper}"
        )));
    }
    let d = f64::from(spec.d);
    let s = spec.sigma;
    let ln_k = (d / (d + 2.0 * s)).ln() + 4.0 * s / d * (2.0 * s / (d + 2.0 * s)).ln()
        - 2.0 * s / d * c_upper.ln();
    let method = if s == 1.0 {
        Method::LowMomentumAvg
    } else {
        Method::FractionalSecond
    };
    let mut report = BoundReport::from_ln_k(spec, method, ln_k);
    report.c_value = Some(c_upper);
    Ok(report)
}

/// `L/L^cl = (K/K^cl)^{-d/(2σ)}`.
pub fn dual_convert(spec: ProblemSpec, k_ratio: f64) -> Result<f64, ConstantsError> {
    if !(k_ratio > 0.0) {
        return Err(ConstantsError::Domain(format!(
            "k_ratio must be positive, got {k_ratio}"
        )));
    }
    let l = (-spec.exponent() * k_ratio.ln()).exp();
    if !l.is_finite() {
        return Err(ConstantsError::Domain(format!(
            "L/L^cl overflows for k_ratio {k_ratio} at exponent {}",
            spec.exponent()
        )));
    }
    Ok(l)
}

/// Inverse of [`dual_convert`].
pub fn dual_convert_inverse(spec: ProblemSpec, l_ratio: f64) -> Result<f64, ConstantsError> {
    if !(l_ratio > 0.0) {
        return Err(ConstantsError::Domain(format!(
            "l_ratio must be positive, got {l_ratio}"
        )));
    }
    Ok((-l_ratio.ln() / spec.exponent()).exp())
}

/// Relative residual of `L^cl_{1,d₁} · L^cl_{1+d₁/2, d-d₁} = L^cl_{1,d}`.
pub fn product_identity_check(d1: u32, d: u32) -> Result<f64, ConstantsError> {
    if d1 < 1 || d <= d1 {
        return Err(ConstantsError::Domain(format!(
            "product identity needs 1 <= d1 < d (d1 = {d1}, d = {d})"
        )));
    }
    let lhs = l_cl_general(1.0, d1)? * l_cl_general(1.0 + 0.5 * f64::from(d1), d - d1)?;
    let rhs = l_cl_general(1.0, d)?;
    Ok((lhs - rhs).abs() / rhs)
}

/// `L/L^cl` of the momentum-optimal bound at `(d, σ)`; tends to `e` as
/// `d → ∞`.
pub fn large_d_limit_probe(d: u32, sigma: f64) -> Result<f64, ConstantsError> {
    let spec = ProblemSpec::new(d, sigma).map_err(|e| ConstantsError::Domain(e.to_string()))?;
    Ok(bound_momentum_optimal(spec).l_ratio)
}

/// The lifted one-dimensional low-momentum bound, valid for σ = 1 and any d.
pub fn bound_lifted_1d(spec: ProblemSpec, c1_upper: f64) -> Result<BoundReport, ConstantsError> {
    if spec.sigma != 1.0 {
        return Err(ConstantsError::Domain(
            "the lifted bound is only available for sigma = 1".into(),
        ));
    }
    let one_d = bound_from_c(ProblemSpec { d: 1, sigma: 1.0 }, c1_upper)?;
    let k = dual_convert_inverse(spec, one_d.l_ratio)?;
    let mut report = BoundReport::from_ln_k(spec, Method::Lifted1d, k.ln());
    report.c_value = Some(c1_upper);
    Ok(report)
}

/// Every bound available at `spec`. `c_upper` is an upper bound on 𝒞_{d,σ};
/// at σ = 1 the lifted d = 1 bound uses [`C1_UPPER`].
pub fn candidate_bounds(
    spec: ProblemSpec,
    c_upper: Option<f64>,
) -> Result<Vec<BoundReport>, ConstantsError> {
    let mut out = vec![bound_momentum_optimal(spec)];
    if let Some(c) = c_upper {
        out.push(bound_from_c(spec, c)?);
    }
    if spec.sigma == 1.0 {
        out.push(bound_rumin_original(spec)?);
        if spec.d > 1 {
            out.push(bound_lifted_1d(spec, C1_UPPER)?);
        }
    }
    Ok(out)
}

/// Largest `K/K^cl` (equivalently smallest `L/L^cl`) over
/// [`candidate_bounds`].
pub fn best_of(spec: ProblemSpec, c_upper: Option<f64>) -> Result<BoundReport, ConstantsError> {
    let candidates = candidate_bounds(spec, c_upper)?;
    let best = candidates
        .iter()
        .max_by(|x, y| x.k_ratio.total_cmp(&y.k_ratio))
        .expect("at least one candidate");
    Ok(BoundReport {
        method: Method::BestOf,
        c_value: c_upper,
        ..*best
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(d: u32, sigma: f64) -> ProblemSpec {
        ProblemSpec::new(d, sigma).unwrap()
    }

    #[test]
    fn kinetic_semiclassical_examples() {
        assert_relative_eq!(
            k_cl(spec(3, 0.5)),
            0.75 * (6.0 * PI * PI).cbrt(),
            max_relative = 1e-13
        );
        assert!((k_cl(spec(3, 0.5)) - 2.9233).abs() < 1e-4);
        assert_relative_eq!(k_cl(spec(1, 1.0)), PI * PI / 3.0, max_relative = 1e-13);
        assert_relative_eq!(k_cl(spec(2, 1.0)), 2.0 * PI, max_relative = 1e-13);
    }

    #[test]
    fn weyl_examples() {
        assert_relative_eq!(l_cl(spec(1, 1.0)), 2.0 / (3.0 * PI), max_relative = 1e-13);
        assert_relative_eq!(
            l_cl(spec(3, 1.0)),
            0.4 * (4.0 * PI / 3.0) / (2.0 * PI).powi(3),
            max_relative = 1e-13
        );
        assert!((l_cl(spec(3, 1.0)) - 0.006755).abs() < 1e-6);
        assert_relative_eq!(l_cl(spec(1, 0.5)), 1.0 / (2.0 * PI), max_relative = 1e-13);
    }

    #[test]
    fn general_weyl_examples() {
        assert_relative_eq!(
            l_cl_general(1.0, 1).unwrap(),
            2.0 / (3.0 * PI),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            l_cl_general(1.5, 2).unwrap(),
            1.0 / (10.0 * PI),
            max_relative = 1e-12
        );
        for d in 1..=8 {
            assert_relative_eq!(
                l_cl_general(1.0, d).unwrap(),
                l_cl(spec(d, 1.0)),
                max_relative = 1e-12
            );
        }
        assert!(l_cl_general(0.5, 1).is_err());
    }

    #[test]
    fn lemma_examples() {
        let (m, mu) = lemma_min(1.5).unwrap();
        assert_relative_eq!(m, 1.447_571_708_094_028_5, max_relative = 1e-13);
        assert_relative_eq!(mu, 0.723_785_854_047_014_3, max_relative = 1e-13);
        assert_relative_eq!(mu, m / 2.0, max_relative = 1e-13);

        let (m, mu) = lemma_min(2.0).unwrap();
        assert_relative_eq!(m, PI * PI / 16.0, max_relative = 1e-13);
        assert_relative_eq!(mu, PI * PI / 16.0, max_relative = 1e-13);

        assert!(lemma_min(1.0).is_err());
        assert!(lemma_min(0.5).is_err());
    }

    #[test]
    fn lemma_near_one() {
        // μ* → 1 while the minimum itself blows up like 1/(β-1)
        let (m, mu) = lemma_min(1.0 + 1e-6).unwrap();
        assert!((mu - 1.0).abs() < 1e-3, "mu = {mu}");
        assert!(m > 1e5, "min = {m}");
    }

    #[test]
    fn momentum_optimal_examples() {
        let r = bound_momentum_optimal(spec(1, 1.0));
        assert_eq!(r.method, Method::MomentumOptimal);
        assert_relative_eq!(
            r.k_ratio,
            2187.0 * 3f64.sqrt() / (320.0 * PI.powi(3)),
            max_relative = 1e-13
        );
        assert!((r.k_ratio - 0.381_777).abs() < 1e-5);
        assert!((r.l_ratio - 1.618_435).abs() < 1e-5);
        assert!((bound_momentum_optimal(spec(3, 1.0)).l_ratio - 1.994_584).abs() < 1e-5);
        assert_eq!(
            bound_momentum_optimal(spec(3, 0.5)).method,
            Method::FractionalFirst
        );
    }

    #[test]
    fn momentum_optimal_agrees_with_lemma() {
        for d in 1..=6 {
            for sigma in [0.5, 1.0, 2.0] {
                let s = spec(d, sigma);
                let beta = 1.0 + s.exponent();
                let inf_a = s.exponent() * lemma_min(beta).unwrap().0;
                let df = f64::from(d);
                let k = df / (df + 4.0 * sigma) * inf_a.powf(-1.0 / s.exponent());
                assert_relative_eq!(bound_momentum_optimal(s).k_ratio, k, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn momentum_optimal_beats_original() {
        for d in 1..=6 {
            let s = spec(d, 1.0);
            assert!(bound_momentum_optimal(s).l_ratio < bound_rumin_original(s).unwrap().l_ratio);
        }
    }

    #[test]
    fn original_bound_examples() {
        assert_relative_eq!(
            bound_rumin_original(spec(1, 1.0)).unwrap().l_ratio,
            5f64.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bound_rumin_original(spec(2, 1.0)).unwrap().l_ratio,
            3.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bound_rumin_original(spec(4, 1.0)).unwrap().l_ratio,
            4.0,
            max_relative = 1e-14
        );
        assert!(bound_rumin_original(spec(3, 0.5)).is_err());
    }

    #[test]
    fn from_c_examples() {
        let r = bound_from_c(spec(1, 1.0), 0.373_556).unwrap();
        assert!((r.k_ratio - 0.471_851).abs() < 1e-5);
        assert!((r.l_ratio - 1.455_786).abs() < 1e-5);
        assert_eq!(r.method, Method::LowMomentumAvg);
        assert_eq!(r.c_value, Some(0.373_556));

        let r = bound_from_c(spec(3, 0.5), 0.046_736).unwrap();
        assert!((r.k_ratio - 0.826_297).abs() < 1e-5);
        assert_eq!(r.method, Method::FractionalSecond);

        // the Cauchy–Schwarz floor 𝒞₁ ≥ 1/3 caps this route at 16/27
        let r = bound_from_c(spec(1, 1.0), 1.0 / 3.0).unwrap();
        assert_relative_eq!(r.k_ratio, 16.0 / 27.0, max_relative = 1e-13);

        assert!(bound_from_c(spec(1, 1.0), 0.0).is_err());
    }

    #[test]
    fn from_c_matches_sigma_one_form() {
        for d in 1..=6 {
            let c: f64 = 0.37;
            let df = f64::from(d);
            let direct =
                df * 2f64.powf(4.0 / df) / ((df + 2.0).powf(1.0 + 4.0 / df) * c.powf(2.0 / df));
            assert_relative_eq!(
                bound_from_c(spec(d, 1.0), c).unwrap().k_ratio,
                direct,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn duality_examples() {
        let s = spec(1, 1.0);
        assert!((dual_convert(s, 0.471_851).unwrap() - 1.455_786).abs() < 1e-5);
        assert_eq!(dual_convert(s, 1.0).unwrap(), 1.0);
        assert!((dual_convert(s, 0.381_777).unwrap() - 1.618_435).abs() < 1e-5);
        assert!(dual_convert(s, 0.0).is_err());
    }

    #[test]
    fn duality_round_trip() {
        for d in 1..=3 {
            for sigma in [0.5, 1.0, 2.0] {
                let s = spec(d, sigma);
                for k in [0.1, 0.5, 0.9] {
                    let l = dual_convert(s, k).unwrap();
                    let back = dual_convert_inverse(s, l).unwrap();
                    assert!((back - k).abs() <= 1e-13 * k, "{d} {sigma} {k}");
                }
            }
        }
    }

    #[test]
    fn reports_are_self_dual() {
        for d in [1, 2, 3, 7, 50] {
            for sigma in [0.5, 1.0, 2.0] {
                let s = spec(d, sigma);
                for r in candidate_bounds(s, None).unwrap() {
                    let l = dual_convert(s, r.k_ratio).unwrap();
                    assert_relative_eq!(r.l_ratio, l, max_relative = 1e-12);
                    assert!(r.k_ratio > 0.0 && r.k_ratio <= 1.0);
                    assert!(r.l_ratio >= 1.0);
                }
            }
        }
    }

    #[test]
    fn product_identity() {
        for (d1, d) in [(1, 2), (1, 3), (2, 5), (1, 6), (3, 10)] {
            assert!(product_identity_check(d1, d).unwrap() <= 1e-12);
        }
        assert!(product_identity_check(2, 2).is_err());
        assert!(product_identity_check(0, 2).is_err());
    }

    #[test]
    fn large_dimension_limit() {
        let e = std::f64::consts::E;
        let l1000 = large_d_limit_probe(1000, 1.0).unwrap();
        assert!(l1000 >= e - 0.01 && l1000 <= e, "{l1000}");
        let l10000 = large_d_limit_probe(10_000, 1.0).unwrap();
        assert!((e - l10000) < (e - l1000));
        assert!(l10000 <= e);
        assert!((large_d_limit_probe(1, 1.0).unwrap() - 1.618_435).abs() < 1e-5);
        // 30-digit reference at d = 1000
        assert_relative_eq!(l1000, 2.713_650_039_213_191, max_relative = 1e-11);
    }

    #[test]
    fn best_of_picks_extreme() {
        let s = spec(1, 1.0);
        let best = best_of(s, Some(C1_UPPER)).unwrap();
        assert_eq!(best.method, Method::BestOf);
        let cands = candidate_bounds(s, Some(C1_UPPER)).unwrap();
        let kmax = cands.iter().map(|r| r.k_ratio).fold(0.0, f64::max);
        let lmin = cands
            .iter()
            .map(|r| r.l_ratio)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best.k_ratio, kmax);
        assert_eq!(best.l_ratio, lmin);
        assert!((best.l_ratio - 1.455_786).abs() < 1e-5);

        // d = 3: the lifted 1-d constant wins over anything computed in 3-d
        let best = best_of(spec(3, 1.0), None).unwrap();
        assert!((best.l_ratio - 1.455_786).abs() < 1e-5);

        let best = best_of(spec(3, 0.5), Some(0.046_736)).unwrap();
        assert!((best.k_ratio - 0.826_297).abs() < 1e-5);
    }

    #[test]
    fn report_json_shape() {
        let r = bound_momentum_optimal(spec(1, 1.0));
        let v = serde_json::to_value(r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in [
            "d", "sigma", "method", "k_ratio", "l_ratio", "c_value", "trial",
        ] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(v["method"], "momentum_optimal");
        assert!(v["c_value"].is_null());
        let back: BoundReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_value(Method::Lifted1d).unwrap(), "lifted_1d");
    }
}
