//! Normalized trial functions: momentum profiles `f` with `∫₀^∞ f² = 1` and
//! averaging weights `φ` on `(0, 1]` with `∫₀¹ φ = 1`.
//!
//! Families are immutable once built. Every constructor normalizes, and the
//! JSON form is re-checked on load, so a `FFamily` or `PhiFamily` value is
//! always normalized.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants;
use crate::quad::{self, QuadError, QuadSpec};
use crate::specfun::{self, SpecfunError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrialError {
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("unknown family kind {0:?}")]
    UnknownKind(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FKind {
    /// `(1 + μ t^a)^{-p}`
    RationalPower,
    /// `1` on `(0, 1]`, `0` beyond
    Indicator,
    /// `1 / (1 + μ* t^β)`, the exact minimizer of the weighted deficit
    LemmaOptimal,
}

impl FKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FKind::RationalPower => "rational_power",
            FKind::Indicator => "indicator",
            FKind::LemmaOptimal => "lemma_optimal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiKind {
    /// `5 (1 - t^{1/4})`
    BumpSimple,
    /// `c (1 - t^q)^r / (1 + t)`
    BumpRich,
    /// `c (1 - t^q)^r`
    BumpPower,
    /// `1`
    Uniform,
}

impl PhiKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PhiKind::BumpSimple => "bump_simple",
            PhiKind::BumpRich => "bump_rich",
            PhiKind::BumpPower => "bump_power",
            PhiKind::Uniform => "uniform",
        }
    }
}

/// Relative tolerance when a serialized normalization constant is checked
/// against the recomputed one.
const STORED_CONSTANT_RTOL: f64 = 1e-9;

fn normalization_quad() -> QuadSpec {
    QuadSpec::with_tolerances(1e-15, 1e-14)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRecord", into = "FamilyRecord")]
pub struct FFamily {
    kind: FKind,
    a: f64,
    p: f64,
    mu: f64,
}

impl FFamily {
    pub fn rational_power(a: f64, p: f64) -> Result<Self, TrialError> {
        let mu = rational_power_mu(a, p)?;
        Ok(Self {
            kind: FKind::RationalPower,
            a,
            p,
            mu,
        })
    }

    pub fn indicator() -> Self {
        Self {
            kind: FKind::Indicator,
            a: 1.0,
            p: 1.0,
            mu: 1.0,
        }
    }

    pub fn lemma_optimal(beta: f64) -> Result<Self, TrialError> {
        let (_, mu) = constants::lemma_min(beta).map_err(|_| {
            TrialError::ConstraintViolation(format!("lemma_optimal needs beta > 1, got {beta}"))
        })?;
        Ok(Self {
            kind: FKind::LemmaOptimal,
            a: beta,
            p: 1.0,
            mu,
        })
    }

    pub fn kind(&self) -> FKind {
        self.kind
    }

    /// Inner exponent (β for `lemma_optimal`).
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self.kind {
            FKind::Indicator => {
                if t <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            FKind::RationalPower | FKind::LemmaOptimal => {
                (-self.p * (self.mu * t.powf(self.a)).ln_1p()).exp()
            }
        }
    }

    /// `1 - f(t)` without cancellation at small `t`.
    #[inline]
    pub fn deficit(&self, t: f64) -> f64 {
        match self.kind {
            FKind::Indicator => 1.0 - self.eval(t),
            FKind::RationalPower | FKind::LemmaOptimal => {
                -(-self.p * (self.mu * t.powf(self.a)).ln_1p()).exp_m1()
            }
        }
    }

    /// End of the support when it is bounded.
    pub fn support_end(&self) -> Option<f64> {
        match self.kind {
            FKind::Indicator => Some(1.0),
            _ => None,
        }
    }

    /// Scale where the profile turns over: `μ t^a = 1`.
    pub fn transition(&self) -> f64 {
        match self.kind {
            FKind::Indicator => 1.0,
            _ => self.mu.powf(-1.0 / self.a),
        }
    }
}

/// `μ = (B(1/a, 2p - 1/a) / a)^a`, the scale making `∫ (1 + μ t^a)^{-2p} = 1`.
fn rational_power_mu(a: f64, p: f64) -> Result<f64, TrialError> {
    if !(a > 0.0) || !(p > 0.0) || !(2.0 * p * a > 1.0) || !a.is_finite() || !p.is_finite() {
        return Err(TrialError::ConstraintViolation(format!(
            "rational_power needs a, p > 0 and 2pa > 1 (a = {a}, p = {p})"
        )));
    }
    let ln_b = specfun::ln_beta(1.0 / a, 2.0 * p - 1.0 / a)?;
    Ok((a * (ln_b - a.ln())).exp())
}

/// Build a normalized profile of the given kind. `a` doubles as β for
/// `lemma_optimal`; both exponents are ignored for `indicator`.
pub fn normalize_f(kind: FKind, a: f64, p: f64) -> Result<FFamily, TrialError> {
    match kind {
        FKind::RationalPower => FFamily::rational_power(a, p),
        FKind::Indicator => Ok(FFamily::indicator()),
        FKind::LemmaOptimal => FFamily::lemma_optimal(a),
    }
}

/// Find μ with `∫₀^∞ (1 + μ t^a)^{-2p} dt = 1` by bracketing and bisection
/// on `ln μ`, integrating numerically at each step.
///
/// Independent of the Beta closed form used by [`normalize_f`].
pub fn solve_mu_by_quadrature(a: f64, p: f64, spec: &QuadSpec) -> Result<f64, TrialError> {
    if !(a > 0.0) || !(p > 0.0) || !(2.0 * p * a > 1.0) {
        return Err(TrialError::ConstraintViolation(format!(
            "rational_power needs 2pa > 1 (a = {a}, p = {p})"
        )));
    }
    let tail = ((2.0 * p * a - 1.0).recip().ceil() as u32).max(2);
    let spec = spec.with_tail_power(tail);
    let excess = |ln_mu: f64| -> Result<f64, TrialError> {
        let mu = ln_mu.exp();
        let r = quad::integrate(
            |t: f64| (-2.0 * p * (mu * t.powf(a)).ln_1p()).exp(),
            0.0,
            f64::INFINITY,
            &spec,
        )?;
        Ok(r.value - 1.0)
    };
    // ∫ f² decreases in μ
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    while excess(lo)? < 0.0 {
        lo *= 2.0;
        if lo < -700.0 {
            return Err(TrialError::ConstraintViolation("no bracket for mu".into()));
        }
    }
    while excess(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 700.0 {
            return Err(TrialError::ConstraintViolation("no bracket for mu".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRecord", into = "FamilyRecord")]
pub struct PhiFamily {
    kind: PhiKind,
    q: f64,
    r: f64,
    c: f64,
}

impl PhiFamily {
    pub fn uniform() -> Self {
        Self {
            kind: PhiKind::Uniform,
            q: 1.0,
            r: 0.0,
            c: 1.0,
        }
    }

    /// `5 (1 - t^{1/4})`; `∫₀¹ (1 - t^{1/4}) = 1/5`.
    pub fn bump_simple() -> Self {
        Self {
            kind: PhiKind::BumpSimple,
            q: 0.25,
            r: 1.0,
            c: 5.0,
        }
    }

    pub fn bump_rich(q: f64, r: f64) -> Result<Self, TrialError> {
        check_bump_exponents(q, r)?;
        let raw = quad::integrate(
            |t: f64| rich_shape(q, r, t),
            0.0,
            1.0,
            &normalization_quad(),
        )?;
        let c = checked_reciprocal(raw.value)?;
        Ok(Self {
            kind: PhiKind::BumpRich,
            q,
            r,
            c,
        })
    }

    /// `c = q / B(1/q, r + 1)`.
    pub fn bump_power(q: f64, r: f64) -> Result<Self, TrialError> {
        check_bump_exponents(q, r)?;
        let c = checked_reciprocal(specfun::beta(1.0 / q, r + 1.0)? / q)?;
        Ok(Self {
            kind: PhiKind::BumpPower,
            q,
            r,
            c,
        })
    }

    pub fn kind(&self) -> PhiKind {
        self.kind
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Normalization constant.
    pub fn c(&self) -> f64 {
        self.c
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        match self.kind {
            PhiKind::Uniform => 1.0,
            PhiKind::BumpSimple | PhiKind::BumpPower => self.c * power_shape(self.q, self.r, t),
            PhiKind::BumpRich => self.c * rich_shape(self.q, self.r, t),
        }
    }
}

fn power_shape(q: f64, r: f64, t: f64) -> f64 {
    (1.0 - t.powf(q)).max(0.0).powf(r)
}

fn rich_shape(q: f64, r: f64, t: f64) -> f64 {
    power_shape(q, r, t) / (1.0 + t)
}

fn check_bump_exponents(q: f64, r: f64) -> Result<(), TrialError> {
    if q > 0.0 && r > 0.0 && q.is_finite() && r.is_finite() {
        Ok(())
    } else {
        Err(TrialError::ConstraintViolation(format!(
            "bump exponents must be positive (q = {q}, r = {r})"
        )))
    }
}

fn checked_reciprocal(integral: f64) -> Result<f64, TrialError> {
    if integral > 0.0 && integral.is_finite() {
        Ok(1.0 / integral)
    } else {
        Err(TrialError::ConstraintViolation(format!(
            "unnormalized weight integrates to {integral}"
        )))
    }
}

/// Build a normalized weight. `q` and `r` are ignored for `uniform` and
/// `bump_simple`.
pub fn normalize_phi(kind: PhiKind, q: f64, r: f64) -> Result<PhiFamily, TrialError> {
    match kind {
        PhiKind::Uniform => Ok(PhiFamily::uniform()),
        PhiKind::BumpSimple => Ok(PhiFamily::bump_simple()),
        PhiKind::BumpRich => PhiFamily::bump_rich(q, r),
        PhiKind::BumpPower => PhiFamily::bump_power(q, r),
    }
}

/// Shared JSON shape for both family types; absent fields are omitted.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRecord {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

fn required(field: Option<f64>, name: &str, kind: &str) -> Result<f64, TrialError> {
    field.ok_or_else(|| TrialError::ConstraintViolation(format!("{kind} needs field {name:?}")))
}

fn check_stored(stored: Option<f64>, computed: f64, name: &str) -> Result<(), TrialError> {
    match stored {
        Some(v) if (v - computed).abs() > STORED_CONSTANT_RTOL * computed.abs() => {
            Err(TrialError::ConstraintViolation(format!(
                "stored {name} = {v} does not normalize the family (expected {computed})"
            )))
        }
        _ => Ok(()),
    }
}

impl TryFrom<FamilyRecord> for FFamily {
    type Error = TrialError;

    fn try_from(rec: FamilyRecord) -> Result<Self, Self::Error> {
        let family = match rec.kind.as_str() {
            "rational_power" => FFamily::rational_power(
                required(rec.a, "a", &rec.kind)?,
                required(rec.p, "p", &rec.kind)?,
            )?,
            "lemma_optimal" => FFamily::lemma_optimal(required(rec.a, "a", &rec.kind)?)?,
            "indicator" => FFamily::indicator(),
            other => return Err(TrialError::UnknownKind(other.to_string())),
        };
        check_stored(rec.mu, family.mu, "mu")?;
        Ok(family)
    }
}

impl From<FFamily> for FamilyRecord {
    fn from(f: FFamily) -> Self {
        let mut rec = FamilyRecord {
            kind: f.kind.as_str().to_string(),
            ..Default::default()
        };
        match f.kind {
            FKind::Indicator => {}
            FKind::LemmaOptimal => {
                rec.a = Some(f.a);
                rec.mu = Some(f.mu);
            }
            FKind::RationalPower => {
                rec.a = Some(f.a);
                rec.p = Some(f.p);
                rec.mu = Some(f.mu);
            }
        }
        rec
    }
}

impl TryFrom<FamilyRecord> for PhiFamily {
    type Error = TrialError;

    fn try_from(rec: FamilyRecord) -> Result<Self, Self::Error> {
        let family = match rec.kind.as_str() {
            "uniform" => PhiFamily::uniform(),
            "bump_simple" => PhiFamily::bump_simple(),
            "bump_rich" => PhiFamily::bump_rich(
                required(rec.q, "q", &rec.kind)?,
                required(rec.r, "r", &rec.kind)?,
            )?,
            "bump_power" => PhiFamily::bump_power(
                required(rec.q, "q", &rec.kind)?,
                required(rec.r, "r", &rec.kind)?,
            )?,
            other => return Err(TrialError::UnknownKind(other.to_string())),
        };
        check_stored(rec.c, family.c, "c")?;
        Ok(family)
    }
}

impl From<PhiFamily> for FamilyRecord {
    fn from(phi: PhiFamily) -> Self {
        let mut rec = FamilyRecord {
            kind: phi.kind.as_str().to_string(),
            ..Default::default()
        };
        match phi.kind {
            PhiKind::Uniform => {}
            PhiKind::BumpSimple => rec.c = Some(phi.c),
            PhiKind::BumpRich | PhiKind::BumpPower => {
                rec.q = Some(phi.q);
                rec.r = Some(phi.r);
                rec.c = Some(phi.c);
            }
        }
        rec
    }
}
