//! Single-line and two-line model parameters, Laplace exponents, drifts, the
//! net profit condition and the inverse exponent `Phi`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distributions::{ClaimDistribution, JointClaimDistribution};
use crate::error::{Error, Result};

const ROOT_TOL: f64 = 1e-13;
const MAX_NEWTON: usize = 200;

/// One Cramér–Lundberg line: premium income at rate `premium` minus a
/// compound Poisson stream of claims.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProcess", into = "RawProcess")]
pub struct RiskProcess {
    premium: f64,
    claim_rate: f64,
    claims: Option<ClaimDistribution>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProcess {
    premium: f64,
    #[serde(default)]
    claim_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claims: Option<ClaimDistribution>,
}

impl TryFrom<RawProcess> for RiskProcess {
    type Error = Error;
    fn try_from(raw: RawProcess) -> Result<Self> {
        Self::new(raw.premium, raw.claim_rate, raw.claims)
    }
}

impl From<RiskProcess> for RawProcess {
    fn from(p: RiskProcess) -> Self {
        RawProcess {
            premium: p.premium,
            claim_rate: p.claim_rate,
            claims: p.claims,
        }
    }
}

fn finite_real(what: &'static str, z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() && z.re >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            arg: format!("{z}"),
        })
    }
}

impl RiskProcess {
    /// `claims` must be present exactly when `claim_rate > 0`.
    pub fn new(premium: f64, claim_rate: f64, claims: Option<ClaimDistribution>) -> Result<Self> {
        if !(premium.is_finite() && premium > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "premium rate must be > 0, got {premium}"
            )));
        }
        if !(claim_rate.is_finite() && claim_rate >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "claim rate must be >= 0, got {claim_rate}"
            )));
        }
        match (&claims, claim_rate > 0.0) {
            (Some(d), true) => d.validate()?,
            (None, false) => {}
            (Some(_), false) => {
                return Err(Error::InvalidParameter(
                    "claim law given for a line with zero claim rate".into(),
                ))
            }
            (None, true) => {
                return Err(Error::InvalidParameter(
                    "positive claim rate needs a claim law".into(),
                ))
            }
        }
        Ok(Self {
            premium,
            claim_rate,
            claims,
        })
    }

    pub fn pure_drift(premium: f64) -> Result<Self> {
        Self::new(premium, 0.0, None)
    }

    pub fn compound_poisson(
        premium: f64,
        claim_rate: f64,
        claims: ClaimDistribution,
    ) -> Result<Self> {
        Self::new(premium, claim_rate, Some(claims))
    }

    pub fn premium(&self) -> f64 {
        self.premium
    }

    pub fn claim_rate(&self) -> f64 {
        self.claim_rate
    }

    pub fn claims(&self) -> Option<&ClaimDistribution> {
        self.claims.as_ref()
    }

    pub fn has_claims(&self) -> bool {
        self.claims.is_some()
    }

    pub fn mean_claim(&self) -> f64 {
        self.claims.as_ref().map_or(0.0, ClaimDistribution::mean)
    }

    /// `mu = c - lambda E[C]`.
    pub fn drift(&self) -> f64 {
        self.premium - self.claim_rate * self.mean_claim()
    }

    /// Laplace exponent `psi(s) = s c - lambda (1 - E exp(-s C))` on `Re(s) >= 0`.
    pub fn psi(&self, s: Complex64) -> Result<Complex64> {
        finite_real("line Laplace exponent", s)?;
        Ok(self.psi_unchecked(s))
    }

    pub fn psi_real(&self, s: f64) -> Result<f64> {
        Ok(self.psi(Complex64::new(s, 0.0))?.re)
    }

    pub(crate) fn psi_unchecked(&self, s: Complex64) -> Complex64 {
        match &self.claims {
            None => s * self.premium,
            Some(d) => s * self.premium - self.claim_rate * d.one_minus_lt_unchecked(s),
        }
    }

    pub(crate) fn psi_prime_unchecked(&self, s: Complex64) -> Complex64 {
        match &self.claims {
            None => Complex64::new(self.premium, 0.0),
            Some(d) => self.premium + self.claim_rate * d.lt_derivative_unchecked(s),
        }
    }

    pub fn psi_prime(&self, s: Complex64) -> Result<Complex64> {
        finite_real("line Laplace exponent derivative", s)?;
        Ok(self.psi_prime_unchecked(s))
    }

    fn psi_r(&self, s: f64) -> f64 {
        self.psi_unchecked(Complex64::new(s, 0.0)).re
    }

    fn psi_prime_r(&self, s: f64) -> f64 {
        self.psi_prime_unchecked(Complex64::new(s, 0.0)).re
    }

    /// `Phi(0)`: zero for nonnegative drift, otherwise the positive root of `psi`.
    pub fn phi_zero(&self) -> Result<f64> {
        if self.drift() >= 0.0 || self.claims.is_none() {
            return Ok(0.0);
        }
        // psi is convex with psi'(0) = mu < 0; the positive root lies right of the minimiser.
        let mut hi = 1.0;
        while self.psi_prime_r(hi) <= 0.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::Convergence {
                    what: "Phi(0) bracket",
                    iterations: 0,
                    residual: self.psi_prime_r(hi),
                });
            }
        }
        let (mut a, mut b) = (0.0, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.psi_prime_r(m) <= 0.0 {
                a = m;
            } else {
                b = m;
            }
            if b - a <= 1e-15 * b {
                break;
            }
        }
        let minimiser = a;
        let upper = self.claim_rate / self.premium;
        self.solve_real(0.0, minimiser, upper.max(minimiser))
    }

    /// Root of `psi(s) = q` on a bracket `[lo, hi]` with `psi(lo) <= q <= psi(hi)`,
    /// by Newton from the right end with bisection fallback.
    fn solve_real(&self, q: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
        while self.psi_r(hi) < q {
            hi = 2.0 * hi.max(1.0);
            if !hi.is_finite() {
                return Err(Error::Convergence {
                    what: "Phi bracket",
                    iterations: 0,
                    residual: f64::INFINITY,
                });
            }
        }
        let mut x = hi;
        for it in 0..MAX_NEWTON {
            let f = self.psi_r(x) - q;
            // psi itself is only accurate to a few ulps of its largest term
            let noise = 8.0 * f64::EPSILON * (self.premium * x + self.claim_rate);
            if f.abs() <= ROOT_TOL * q.abs() + noise {
                return Ok(x);
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(x);
            }
            let d = self.psi_prime_r(x);
            let newton = x - f / d;
            x = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if it + 1 == MAX_NEWTON {
                return Err(Error::Convergence {
                    what: "Phi (real)",
                    iterations: MAX_NEWTON,
                    residual: f,
                });
            }
        }
        unreachable!()
    }

    /// Inverse exponent for real `q >= 0`.
    pub fn phi_inv_real(&self, q: f64) -> Result<f64> {
        if !(q.is_finite() && q >= 0.0) {
            return Err(Error::Domain {
                what: "Phi",
                arg: format!("{q}"),
            });
        }
        if q == 0.0 {
            return self.phi_zero();
        }
        if self.claims.is_none() {
            return Ok(q / self.premium);
        }
        // c s - lambda <= psi(s) <= c s brackets the root.
        let lo = self.phi_zero()?.max(q / self.premium);
        let hi = (q + self.claim_rate) / self.premium;
        self.solve_real(q, lo, hi.max(lo))
    }

    /// Inverse exponent on `Re(q) >= 0`, continued analytically from the real
    /// axis. The returned value has nonnegative real part.
    pub fn phi_inv(&self, q: Complex64) -> Result<Complex64> {
        if !(q.re.is_finite() && q.im.is_finite() && q.re >= 0.0) {
            return Err(Error::Domain {
                what: "Phi",
                arg: format!("{q}"),
            });
        }
        if q.im == 0.0 {
            return Ok(Complex64::new(self.phi_inv_real(q.re)?, 0.0));
        }
        if self.claims.is_none() {
            return Ok(q / self.premium);
        }
        // Path: real axis up to an anchor, across in Im(q), then back down to Re(q).
        // The anchor keeps Newton away from the flat point psi'(Phi(0)) = 0.
        let anchor = q.re.max(1e-2 * q.norm().max(1.0));
        let mut z = Complex64::new(self.phi_inv_real(anchor)?, 0.0);
        let mut cur = Complex64::new(anchor, 0.0);
        let corner = Complex64::new(anchor, q.im);
        z = self.continue_along(z, cur, corner)?;
        cur = corner;
        if cur != q {
            z = self.continue_along(z, cur, q)?;
        }
        let tiny = 1e-9 * z.norm().max(1.0);
        if z.re < 0.0 {
            if z.re < -tiny {
                return Err(Error::Convergence {
                    what: "Phi continuation left the right half-plane",
                    iterations: 0,
                    residual: z.re,
                });
            }
            z.re = 0.0;
        }
        Ok(z)
    }

    fn newton_complex(&self, mut z: Complex64, q: Complex64) -> Option<Complex64> {
        let scale = q.norm().max(1.0);
        for _ in 0..40 {
            let f = self.psi_unchecked(z) - q;
            if f.norm() <= ROOT_TOL * scale {
                return Some(z);
            }
            let d = self.psi_prime_unchecked(z);
            if d.norm() == 0.0 || !d.is_finite() {
                return None;
            }
            let step = f / d;
            z -= step;
            if !z.is_finite() {
                return None;
            }
            if step.norm() <= 1e-15 * z.norm().max(1e-300) {
                let f = self.psi_unchecked(z) - q;
                return (f.norm() <= 1e-11 * scale).then_some(z);
            }
        }
        None
    }

    fn continue_along(
        &self,
        mut z: Complex64,
        from: Complex64,
        to: Complex64,
    ) -> Result<Complex64> {
        let mut t = 0.0;
        let mut h: f64 = 0.125;
        let mut iterations = 0;
        while t < 1.0 {
            iterations += 1;
            let t_next = (t + h).min(1.0);
            let target = from + (to - from) * t_next;
            match self.newton_complex(z, target) {
                Some(next) if next.re >= -1e-9 * next.norm().max(1.0) => {
                    z = next;
                    t = t_next;
                    h = (h * 1.5).min(0.25);
                }
                _ => {
                    h *= 0.5;
                    if h < 1e-10 || iterations > 10_000 {
                        return Err(Error::Convergence {
                            what: "Phi continuation",
                            iterations,
                            residual: (self.psi_unchecked(z) - target).norm(),
                        });
                    }
                }
            }
        }
        Ok(z)
    }
}

/// Transfer-cost ratio for one direction; `Disabled` is the `r = inf` case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransferCost {
    Finite(f64),
    Disabled,
}

impl TransferCost {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Self::Finite(r) => Some(*r),
            Self::Disabled => None,
        }
    }

    pub fn is_disabled(&self) -> bool {
        matches!(self, Self::Disabled)
    }
}

impl fmt::Display for TransferCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(r) => write!(f, "{r}"),
            Self::Disabled => f.write_str("inf"),
        }
    }
}

impl Serialize for TransferCost {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(r) => s.serialize_f64(*r),
            Self::Disabled => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for TransferCost {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(r) => Ok(Self::Finite(r)),
            Repr::Int(r) => Ok(Self::Finite(r as f64)),
            Repr::Text(t) if t.eq_ignore_ascii_case("inf") => Ok(Self::Disabled),
            Repr::Text(t) => Err(serde::de::Error::custom(format!(
                "transfer cost must be a number or \"inf\", got {t:?}"
            ))),
        }
    }
}

/// Claims that hit both lines at once, arriving at `rate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommonShock {
    pub rate: f64,
    #[serde(flatten)]
    pub law: JointClaimDistribution,
}

/// Two lines coupled by mutual deficit coverage.
///
/// `r1` is the capital line 2 pays per unit received by line 1, `r2` the
/// reverse. Each line's own claim stream is independent of the other's; an
/// optional common-shock stream adds simultaneous bivariate claims.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct CoverageModel {
    line1: RiskProcess,
    line2: RiskProcess,
    r1: TransferCost,
    r2: TransferCost,
    common_shock: Option<CommonShock>,
    relaxed_costs: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    line1: RiskProcess,
    line2: RiskProcess,
    r1: TransferCost,
    r2: TransferCost,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    common_shock: Option<CommonShock>,
    #[serde(default)]
    relaxed_costs: bool,
}

impl TryFrom<RawModel> for CoverageModel {
    type Error = Error;
    fn try_from(raw: RawModel) -> Result<Self> {
        let mut model = Self::new(raw.line1, raw.line2, raw.r1, raw.r2)?;
        model.relaxed_costs = raw.relaxed_costs;
        model.validate_costs()?;
        if let Some(shock) = raw.common_shock {
            model = model.with_common_shock(shock.rate, shock.law)?;
        }
        Ok(model)
    }
}

impl From<CoverageModel> for RawModel {
    fn from(m: CoverageModel) -> Self {
        RawModel {
            line1: m.line1,
            line2: m.line2,
            r1: m.r1,
            r2: m.r2,
            common_shock: m.common_shock,
            relaxed_costs: m.relaxed_costs,
        }
    }
}

/// Which of the two net-profit inequalities fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetProfit {
    Holds,
    Violated { first: bool, second: bool },
}

impl NetProfit {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Holds)
    }
}

impl CoverageModel {
    pub fn new(
        line1: RiskProcess,
        line2: RiskProcess,
        r1: TransferCost,
        r2: TransferCost,
    ) -> Result<Self> {
        let model = Self {
            line1,
            line2,
            r1,
            r2,
            common_shock: None,
            relaxed_costs: false,
        };
        model.validate_costs()?;
        Ok(model)
    }

    /// Allows `r1 r2 < 1`; results that rely on the survival dichotomy are then unchecked.
    pub fn with_relaxed_costs(mut self) -> Self {
        self.relaxed_costs = true;
        self
    }

    pub fn with_common_shock(mut self, rate: f64, law: JointClaimDistribution) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "common-shock rate must be > 0, got {rate}"
            )));
        }
        self.common_shock = Some(CommonShock { rate, law });
        Ok(self)
    }

    fn validate_costs(&self) -> Result<()> {
        for (name, r) in [("r1", self.r1), ("r2", self.r2)] {
            if let TransferCost::Finite(v) = r {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "{name} must be >= 0, got {v}"
                    )));
                }
            }
        }
        if let (Some(a), Some(b)) = (self.r1.finite(), self.r2.finite()) {
            if a * b < 1.0 - 1e-12 && !self.relaxed_costs {
                return Err(Error::InvalidParameter(format!(
                    "r1 * r2 = {} < 1; set relaxed_costs to allow it",
                    a * b
                )));
            }
        }
        if self.r1.finite() == Some(0.0) || self.r2.finite() == Some(0.0) {
            return Err(Error::InvalidParameter(
                "transfer cost ratios must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn line1(&self) -> &RiskProcess {
        &self.line1
    }

    pub fn line2(&self) -> &RiskProcess {
        &self.line2
    }

    pub fn r1(&self) -> TransferCost {
        self.r1
    }

    pub fn r2(&self) -> TransferCost {
        self.r2
    }

    pub fn common_shock(&self) -> Option<&CommonShock> {
        self.common_shock.as_ref()
    }

    pub fn relaxed_costs(&self) -> bool {
        self.relaxed_costs
    }

    pub fn is_independent(&self) -> bool {
        self.common_shock.is_none()
    }

    /// Marginal drifts `(mu1, mu2)`, including any common-shock stream.
    pub fn drifts(&self) -> (f64, f64) {
        let (mut m1, mut m2) = (self.line1.drift(), self.line2.drift());
        if let Some(shock) = &self.common_shock {
            m1 -= shock.rate * shock.law.mean_first();
            m2 -= shock.rate * shock.law.mean_second();
        }
        (m1, m2)
    }

    /// Bivariate Laplace exponent on the closed right half-plane in each argument.
    pub fn psi_biv(&self, s1: Complex64, s2: Complex64) -> Result<Complex64> {
        finite_real("bivariate Laplace exponent", s1)?;
        finite_real("bivariate Laplace exponent", s2)?;
        Ok(self.psi_biv_unchecked(s1, s2))
    }

    pub(crate) fn psi_biv_unchecked(&self, s1: Complex64, s2: Complex64) -> Complex64 {
        let mut value = self.line1.psi_unchecked(s1) + self.line2.psi_unchecked(s2);
        if let Some(shock) = &self.common_shock {
            value -= shock.rate * shock.law.one_minus_joint_lt_unchecked(s1, s2);
        }
        value
    }

    /// Partial derivatives of the bivariate exponent.
    pub(crate) fn psi_biv_gradient_unchecked(
        &self,
        s1: Complex64,
        s2: Complex64,
    ) -> (Complex64, Complex64) {
        let mut d1 = self.line1.psi_prime_unchecked(s1);
        let mut d2 = self.line2.psi_prime_unchecked(s2);
        if let Some(shock) = &self.common_shock {
            let (g1, g2) = shock.law.joint_lt_gradient_unchecked(s1, s2);
            d1 += shock.rate * g1;
            d2 += shock.rate * g2;
        }
        (d1, d2)
    }

    /// Evaluates both net-profit inequalities; a disabled transfer direction
    /// replaces its inequality by strict positivity of the other line's drift.
    pub fn net_profit(&self) -> NetProfit {
        let (m1, m2) = self.drifts();
        let first = match self.r2 {
            TransferCost::Finite(r2) => m1 + r2 * m2 > 0.0,
            TransferCost::Disabled => m2 > 0.0,
        };
        let second = match self.r1 {
            TransferCost::Finite(r1) => m2 + r1 * m1 > 0.0,
            TransferCost::Disabled => m1 > 0.0,
        };
        if first && second {
            NetProfit::Holds
        } else {
            NetProfit::Violated {
                first: !first,
                second: !second,
            }
        }
    }

    pub fn require_net_profit(&self) -> Result<()> {
        match self.net_profit() {
            NetProfit::Holds => Ok(()),
            NetProfit::Violated { first, second } => {
                let (m1, m2) = self.drifts();
                Err(Error::NetProfit(format!(
                    "mu1 = {m1}, mu2 = {m2}, r1 = {}, r2 = {}; failing: {}{}",
                    self.r1,
                    self.r2,
                    if first { "[line-1 side] " } else { "" },
                    if second { "[line-2 side]" } else { "" },
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn det1() -> ClaimDistribution {
        ClaimDistribution::deterministic(1.0).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn sample_processes() -> Vec<RiskProcess> {
        vec![
            RiskProcess::compound_poisson(1.0, 0.5, det1()).unwrap(),
            RiskProcess::compound_poisson(1.0, 0.9, det1()).unwrap(),
            RiskProcess::compound_poisson(1.0, 0.5, ClaimDistribution::exponential(1.0).unwrap())
                .unwrap(),
            RiskProcess::compound_poisson(2.0, 3.0, ClaimDistribution::erlang(2, 2.0).unwrap())
                .unwrap(),
            // negative drift
            RiskProcess::compound_poisson(1.0, 1.5, ClaimDistribution::exponential(1.0).unwrap())
                .unwrap(),
            // zero drift
            RiskProcess::compound_poisson(1.0, 1.0, det1()).unwrap(),
        ]
    }

    #[test]
    fn exponent_examples() {
        let p = RiskProcess::compound_poisson(1.0, 0.5, det1()).unwrap();
        assert_eq!(p.psi(c(0.0)).unwrap(), c(0.0));
        let expected = 1.0 - 0.5 * (1.0 - (-1.0f64).exp());
        assert_relative_eq!(p.psi_real(1.0).unwrap(), expected, max_relative = 1e-15);
        assert_relative_eq!(expected, 0.683940, epsilon = 1e-6);
        let drift_only = RiskProcess::pure_drift(0.3).unwrap();
        assert_relative_eq!(drift_only.psi_real(2.0).unwrap(), 0.6);
        assert!(p.psi(Complex64::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn drift_examples() {
        assert_relative_eq!(
            RiskProcess::compound_poisson(1.0, 0.5, det1())
                .unwrap()
                .drift(),
            0.5
        );
        assert_relative_eq!(
            RiskProcess::compound_poisson(1.0, 0.9, det1())
                .unwrap()
                .drift(),
            0.1,
            epsilon = 1e-15
        );
        assert_eq!(
            RiskProcess::compound_poisson(2.0, 1.0, ClaimDistribution::deterministic(2.0).unwrap())
                .unwrap()
                .drift(),
            0.0
        );
    }

    #[test]
    fn process_validation() {
        assert!(RiskProcess::new(0.0, 0.0, None).is_err());
        assert!(RiskProcess::new(1.0, 1.0, None).is_err());
        assert!(RiskProcess::new(1.0, 0.0, Some(det1())).is_err());
    }

    #[test]
    fn phi_pure_drift_and_zero() {
        let d = RiskProcess::pure_drift(0.4).unwrap();
        assert_relative_eq!(d.phi_inv_real(2.0).unwrap(), 5.0);
        assert_relative_eq!(d.phi_inv(Complex64::new(0.0, 2.0)).unwrap().im, 5.0);
        let p = RiskProcess::compound_poisson(1.0, 0.5, det1()).unwrap();
        assert_eq!(p.phi_inv_real(0.0).unwrap(), 0.0);
    }

    #[test]
    fn phi_quadratic_oracle() {
        // c=1, lambda=0.5, Exp(1): s - 0.5 s/(1+s) = q  <=>  s^2 + (0.5 - q) s - q = 0
        let p =
            RiskProcess::compound_poisson(1.0, 0.5, ClaimDistribution::exponential(1.0).unwrap())
                .unwrap();
        let q: f64 = 0.25;
        let b = 0.5 - q;
        let root = (-b + (b * b + 4.0 * q).sqrt()) / 2.0;
        assert_relative_eq!(p.phi_inv_real(q).unwrap(), root, max_relative = 1e-13);
        assert_relative_eq!(root, 0.390388, epsilon = 1e-6);
    }

    #[test]
    fn phi_zero_for_negative_drift() {
        // c=1, lambda=1.5, Exp(1): psi(s) = s - 1.5 s/(1+s) = 0  <=>  s = 0.5
        let p =
            RiskProcess::compound_poisson(1.0, 1.5, ClaimDistribution::exponential(1.0).unwrap())
                .unwrap();
        assert_relative_eq!(p.phi_zero().unwrap(), 0.5, max_relative = 1e-13);
        assert!(p.phi_inv_real(1e-9).unwrap() > 0.5);
    }

    #[test]
    fn phi_domain_errors() {
        let p = RiskProcess::compound_poisson(1.0, 0.5, det1()).unwrap();
        assert!(p.phi_inv_real(-1.0).is_err());
        assert!(p.phi_inv(Complex64::new(-0.5, 1.0)).is_err());
    }

    #[test]
    fn phi_inverts_on_real_and_complex_grids() {
        for p in sample_processes() {
            for k in 1..=40 {
                let q = 0.25 * k as f64;
                let s = p.phi_inv_real(q).unwrap();
                assert!(
                    (p.psi_real(s).unwrap() - q).abs() <= 1e-10 * q,
                    "{p:?} q={q}"
                );
            }
            for re in [0.0, 0.5, 1.0, 2.5, 5.0] {
                for im in [-10.0, -3.0, -0.7, -0.01, 0.01, 0.4, 1.0, 4.5, 10.0] {
                    let q = Complex64::new(re, im);
                    let s = p.phi_inv(q).unwrap();
                    assert!(s.re >= 0.0, "{p:?} q={q} s={s}");
                    let r = p.psi(s).unwrap() - q;
                    assert!(r.norm() <= 1e-10 * q.norm(), "{p:?} q={q} residual {r}");
                }
            }
        }
    }

    #[test]
    fn phi_increasing_convex_and_asymptotically_linear() {
        for p in sample_processes() {
            let grid: Vec<f64> = (1..=60).map(|k| 0.2 * k as f64).collect();
            let v: Vec<f64> = grid.iter().map(|&q| p.phi_inv_real(q).unwrap()).collect();
            for w in v.windows(3) {
                assert!(w[1] > w[0]);
                // Phi is concave: psi is convex increasing past Phi(0)
                assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-12);
            }
            let q = 1e6 * p.premium();
            let ratio = q / p.phi_inv_real(q).unwrap();
            assert!((ratio / p.premium() - 1.0).abs() < 0.01);
        }
    }

    fn six_three_model(r1: TransferCost, r2: TransferCost) -> CoverageModel {
        CoverageModel::new(
            RiskProcess::compound_poisson(1.0, 0.5, det1()).unwrap(),
            RiskProcess::compound_poisson(1.0, 0.9, det1()).unwrap(),
            r1,
            r2,
        )
        .unwrap()
    }

    #[test]
    fn bivariate_exponent() {
        let m = six_three_model(TransferCost::Finite(1.1), TransferCost::Finite(1.1));
        assert_eq!(m.psi_biv(c(0.0), c(0.0)).unwrap(), c(0.0));
        for (a, b) in [(0.1, 0.2), (1.0, 3.0), (2.5, 0.7)] {
            let s1 = Complex64::new(a, b);
            let s2 = Complex64::new(b, -a);
            let lhs = m.psi_biv(s1, s2).unwrap();
            let rhs = m.line1().psi(s1).unwrap() + m.line2().psi(s2).unwrap();
            assert!((lhs - rhs).norm() < 1e-14);
        }
        let shock = CoverageModel::new(
            RiskProcess::pure_drift(1.0).unwrap(),
            RiskProcess::pure_drift(1.0).unwrap(),
            TransferCost::Finite(1.0),
            TransferCost::Finite(1.0),
        )
        .unwrap()
        .with_common_shock(
            1.0,
            JointClaimDistribution::common_shock(det1(), det1()).unwrap(),
        )
        .unwrap();
        let v = shock.psi_biv(c(1.0), c(1.0)).unwrap().re;
        assert_relative_eq!(v, 2.0 - (1.0 - (-2.0f64).exp()), max_relative = 1e-15);
        assert_relative_eq!(v, 1.135335, epsilon = 1e-6);
    }

    #[test]
    fn net_profit_examples() {
        assert!(
            six_three_model(TransferCost::Finite(1.1), TransferCost::Finite(1.1))
                .net_profit()
                .holds()
        );
        let bad = CoverageModel::new(
            RiskProcess::compound_poisson(1.0, 2.0, det1()).unwrap(),
            RiskProcess::compound_poisson(1.0, 1.0, det1()).unwrap(),
            TransferCost::Finite(1.0),
            TransferCost::Finite(1.0),
        )
        .unwrap();
        assert!(!bad.net_profit().holds());
        let restricted = CoverageModel::new(
            RiskProcess::compound_poisson(1.0, 1.05, det1()).unwrap(),
            RiskProcess::compound_poisson(1.0, 0.9, det1()).unwrap(),
            TransferCost::Finite(1.0),
            TransferCost::Disabled,
        )
        .unwrap();
        assert!(restricted.net_profit().holds());
    }

    #[test]
    fn cost_validation() {
        let l = || RiskProcess::pure_drift(1.0).unwrap();
        assert!(CoverageModel::new(
            l(),
            l(),
            TransferCost::Finite(0.5),
            TransferCost::Finite(1.0)
        )
        .is_err());
        assert!(CoverageModel::new(
            l(),
            l(),
            TransferCost::Finite(0.5),
            TransferCost::Finite(2.0)
        )
        .is_ok());
        assert!(
            CoverageModel::new(l(), l(), TransferCost::Finite(-1.0), TransferCost::Disabled)
                .is_err()
        );
    }

    #[test]
    fn model_from_toml() {
        let text = r#"
            r1 = 1.1
            r2 = "inf"
            [line1]
            premium = 1.0
            claim_rate = 0.5
            claims = { type = "deterministic", value = 1.0 }
            [line2]
            premium = 0.3
        "#;
        let m: CoverageModel = toml::from_str(text).unwrap();
        assert_eq!(m.r2(), TransferCost::Disabled);
        assert!(!m.line2().has_claims());
        assert!(
            toml::from_str::<CoverageModel>(&text.replace("r2 = \"inf\"", "r2 = \"huge\""))
                .is_err()
        );
        assert!(toml::from_str::<CoverageModel>(&format!("{text}\nextra = 1")).is_err());
    }

    proptest! {
        #[test]
        fn net_profit_matches_drift_arithmetic(
            c1 in 0.1f64..3.0, c2 in 0.1f64..3.0, l1 in 0.0f64..3.0, l2 in 0.0f64..3.0,
            r1 in 1.0f64..4.0, r2 in 1.0f64..4.0, dis1 in any::<bool>(), dis2 in any::<bool>(),
        ) {
            let line = |c, l| if l == 0.0 { RiskProcess::pure_drift(c).unwrap() } else { RiskProcess::compound_poisson(c, l, det1()).unwrap() };
            let t1 = if dis1 { TransferCost::Disabled } else { TransferCost::Finite(r1) };
            let t2 = if dis2 { TransferCost::Disabled } else { TransferCost::Finite(r2) };
            let m = CoverageModel::new(line(c1, l1), line(c2, l2), t1, t2).unwrap();
            let (m1, m2) = (c1 - l1, c2 - l2);
            let expect = match (dis1, dis2) {
                (false, false) => m1 + r2 * m2 > 0.0 && m2 + r1 * m1 > 0.0,
                (false, true) => m2 > 0.0 && m2 + r1 * m1 > 0.0,
                (true, false) => m1 > 0.0 && m1 + r2 * m2 > 0.0,
                (true, true) => m1 > 0.0 && m2 > 0.0,
            };
            prop_assert_eq!(m.net_profit().holds(), expect);
        }

        #[test]
        fn phi_inverse_random(idx in 0usize..6, re in 0.0f64..5.0, im in -10.0f64..10.0) {
            let p = &sample_processes()[idx];
            let q = Complex64::new(re, im);
            prop_assume!(q.norm() > 1e-6);
            let s = p.phi_inv(q).unwrap();
            prop_assert!(s.re >= 0.0);
            prop_assert!((p.psi(s).unwrap() - q).norm() <= 1e-10 * q.norm());
        }
    }
}
