//! Analytic side: the kernel equation, the Wiener–Hopf solution for the
//! survival transform, its boundary transforms and limits, and closed-form
//! oracles for special cases.
//!
//! `F(s1, s2)` is the double Laplace transform of the survival probability
//! `phi(u, v)`; `F^ = s1 s2 F` is `E phi(e_s1, e_s2)` for independent
//! exponential capitals. All difference quotients that become 0/0 on the
//! diagonals `s2 = r2 s1` and `s1 = r1 s2` are replaced by derivatives.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder_wh::{FactorSource, Side, SideSamples};
use crate::mc::McEstimate;
use crate::risk_model::{CoverageModel, RiskProcess, TransferCost};
use crate::simulator::TransformEstimates;

const DIAGONAL_TOL: f64 = 1e-6;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(f(x) - f(y)) / (x - y)`, or `f'` at the midpoint when `x` and `y` are
/// within `DIAGONAL_TOL * max(1, |x|)`. The flag reports the limiting branch.
fn diff_quotient(
    x: Complex64,
    y: Complex64,
    f: impl Fn(Complex64) -> Result<Complex64>,
    fp: impl Fn(Complex64) -> Result<Complex64>,
) -> Result<(Complex64, bool)> {
    if (x - y).norm() < DIAGONAL_TOL * x.norm().max(1.0) {
        Ok((fp((x + y) / 2.0)?, true))
    } else {
        Ok(((f(x)? - f(y)?) / (x - y), false))
    }
}

fn drift_parts(mu: f64) -> (f64, f64) {
    (mu.max(0.0), (-mu).max(0.0))
}

/// `p_L' = r1 mu1 + mu2+ - r1 r2 mu2-` and `p_R' = r2 mu2 + mu1+ - r1 r2 mu1-`,
/// together with the kill rates `p_L`, `p_R` and the constant `C = p_L p_R' = p_R p_L'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimeConstants {
    pub p_l_prime: f64,
    pub p_r_prime: f64,
    pub p_l: f64,
    pub p_r: f64,
    pub c: f64,
}

fn finite_costs(model: &CoverageModel) -> Result<(f64, f64)> {
    match (model.r1(), model.r2()) {
        (TransferCost::Finite(r1), TransferCost::Finite(r2)) => Ok((r1, r2)),
        _ => Err(Error::Precondition(
            "a disabled transfer direction needs restricted_f".into(),
        )),
    }
}

pub fn prime_constants(model: &CoverageModel) -> Result<PrimeConstants> {
    let (r1, r2) = finite_costs(model)?;
    let (m1, m2) = model.drifts();
    let (m1p, m1n) = drift_parts(m1);
    let (m2p, m2n) = drift_parts(m2);
    let p_l_prime = r1 * m1 + m2p - r1 * r2 * m2n;
    let p_r_prime = r2 * m2 + m1p - r1 * r2 * m1n;
    let p_l = m2p + r1 * m1p;
    let p_r = m1p + r2 * m2p;
    // C from whichever drift is nonnegative; both routes must agree
    let via1 = (m1 >= 0.0).then(|| p_l * (m1 + r2 * m2));
    let via2 = (m2 >= 0.0).then(|| p_r * (m2 + r1 * m1));
    let c = match (via1, via2) {
        (Some(a), Some(b)) => {
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1e-300) {
                return Err(Error::Precondition(format!("inconsistent C: {a} vs {b}")));
            }
            a
        }
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => {
            return Err(Error::Precondition(
                "both drifts negative; C is undefined".into(),
            ));
        }
    };
    for (lhs, rhs, what) in [
        (c / p_l, p_r_prime, "C/p_L = p_R'"),
        (c / p_r, p_l_prime, "C/p_R = p_L'"),
    ] {
        if (lhs - rhs).abs() > 1e-10 * rhs.abs().max(1e-12) {
            return Err(Error::Precondition(format!("{what} fails: {lhs} vs {rhs}")));
        }
    }
    Ok(PrimeConstants {
        p_l_prime,
        p_r_prime,
        p_l,
        p_r,
        c,
    })
}

/// Right side of the kernel equation and its two coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelTerms {
    pub psi: Complex64,
    pub coef1: Complex64,
    pub coef2: Complex64,
    pub rhs: Complex64,
}

impl KernelTerms {
    /// `F` implied by the kernel equation, `rhs / psi(s1, s2)`.
    pub fn implied_f(&self) -> Result<Complex64> {
        if self.psi.norm() < 1e-14 * self.rhs.norm().max(1.0) {
            return Err(Error::Singular(self.psi.norm()));
        }
        Ok(self.rhs / self.psi)
    }
}

/// Kernel coefficients at `(s1, s2)`; a disabled direction contributes the
/// limit `c2` (resp. `c1`).
pub fn kernel_coefficients(
    model: &CoverageModel,
    s1: Complex64,
    s2: Complex64,
) -> Result<(Complex64, Complex64)> {
    if s1.re <= 0.0 || s2.re <= 0.0 {
        return Err(Error::Domain {
            what: "kernel equation (needs Re s1, Re s2 > 0)",
            arg: format!("({s1}, {s2})"),
        });
    }
    let coef1 = match model.r2() {
        TransferCost::Disabled => re(model.line2().premium()),
        TransferCost::Finite(r2) => {
            let f = |y: Complex64| Ok(model.psi_biv_unchecked(s1, y));
            let fp = |y: Complex64| Ok(model.psi_biv_gradient_unchecked(s1, y).1);
            diff_quotient(s2, r2 * s1, f, fp)?.0
        }
    };
    let coef2 = match model.r1() {
        TransferCost::Disabled => re(model.line1().premium()),
        TransferCost::Finite(r1) => {
            let f = |x: Complex64| Ok(model.psi_biv_unchecked(x, s2));
            let fp = |x: Complex64| Ok(model.psi_biv_gradient_unchecked(x, s2).0);
            diff_quotient(s1, r1 * s2, f, fp)?.0
        }
    };
    Ok((coef1, coef2))
}

pub fn kernel_rhs(
    model: &CoverageModel,
    f1: Complex64,
    f2: Complex64,
    s1: Complex64,
    s2: Complex64,
) -> Result<KernelTerms> {
    let (coef1, coef2) = kernel_coefficients(model, s1, s2)?;
    Ok(KernelTerms {
        psi: model.psi_biv_unchecked(s1, s2),
        coef1,
        coef2,
        rhs: coef1 * f1 + coef2 * f2,
    })
}

/// Kernel residual `psi F - coef1 F1 - coef2 F2` from simulated transforms,
/// with its standard error (the three estimates are independent).
pub fn kernel_residual_mc(
    model: &CoverageModel,
    est: &TransformEstimates,
    s1: f64,
    s2: f64,
) -> Result<McEstimate> {
    let (coef1, coef2) = kernel_coefficients(model, re(s1), re(s2))?;
    let psi = model.psi_biv_unchecked(re(s1), re(s2)).re;
    let (k1, k2) = (coef1.re, coef2.re);
    let (g, g1, g2) = (psi / (s1 * s2), k1 / s1, k2 / s2);
    let value = g * est.joint.value - g1 * est.boundary1.value - g2 * est.boundary2.value;
    let var = (g * est.joint.std_error).powi(2)
        + (g1 * est.boundary1.std_error).powi(2)
        + (g2 * est.boundary2.std_error).powi(2);
    Ok(McEstimate {
        value,
        std_error: var.sqrt(),
        n: est.joint.n.min(est.boundary1.n).min(est.boundary2.n),
    })
}

/// One evaluation of the survival transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformValue {
    pub s1: Complex64,
    pub s2: Complex64,
    pub f: Complex64,
    /// `s1 s2 F`.
    pub f_hat: Complex64,
    /// The two summands of `F`.
    pub components: [Complex64; 2],
    /// Delta-method standard error of `f_hat` when the factors are Monte-Carlo samples.
    pub std_error: Option<f64>,
    /// Whether the `s2 = r2 s1` (first) or `s1 = r1 s2` (second) limit was used.
    pub diagonal: [bool; 2],
}

fn require_above_phi0(proc: &RiskProcess, s: Complex64, name: &'static str) -> Result<()> {
    let phi0 = proc.phi_zero()?;
    if !(s.is_finite() && s.re > phi0) {
        return Err(Error::Domain {
            what: name,
            arg: format!("{s} (needs Re > Phi(0) = {phi0})"),
        });
    }
    Ok(())
}

fn require_theorem_model(model: &CoverageModel) -> Result<()> {
    if !model.is_independent() {
        return Err(Error::Precondition(
            "the Wiener-Hopf solution needs independent claim streams".into(),
        ));
    }
    model.require_net_profit()
}

/// Pieces shared by the theorem, its boundary transforms and error propagation.
struct Parts {
    a: Complex64,
    b: Complex64,
    /// `p_R' q2 / P` and `p_L' q1 / Q`.
    t1: Complex64,
    t2: Complex64,
    /// `p_R' / P` and `p_L' / Q`.
    u1: Complex64,
    u2: Complex64,
    lp: Complex64,
    rp: Complex64,
    lm: Complex64,
    rm: Complex64,
    diagonal: [bool; 2],
}

fn parts(
    model: &CoverageModel,
    factors: &dyn FactorSource,
    s1: Complex64,
    s2: Complex64,
    primes: &PrimeConstants,
) -> Result<Parts> {
    require_theorem_model(model)?;
    let (r1, r2) = finite_costs(model)?;
    let (l1, l2) = (model.line1(), model.line2());
    require_above_phi0(l1, s1, "Wiener-Hopf solution (s1)")?;
    require_above_phi0(l2, s2, "Wiener-Hopf solution (s2)")?;
    let psi1 = |s: Complex64| l1.psi(s);
    let psi2 = |s: Complex64| l2.psi(s);
    let a = psi1(s1)?;
    let b = psi2(s2)?;
    let big_p = a + psi2(r2 * s1)?;
    let big_q = b + psi1(r1 * s2)?;
    for d in [big_p, big_q] {
        if d.norm() < 1e-14 {
            return Err(Error::Singular(d.norm()));
        }
    }
    let (q2, diag2) = diff_quotient(s2, r2 * s1, psi2, |s| l2.psi_prime(s))?;
    let (q1, diag1) = diff_quotient(s1, r1 * s2, psi1, |s| l1.psi_prime(s))?;
    let u1 = primes.p_r_prime / big_p;
    let u2 = primes.p_l_prime / big_q;
    Ok(Parts {
        a,
        b,
        t1: u1 * q2,
        t2: u2 * q1,
        u1,
        u2,
        lp: factors.plus(Side::L, a)?,
        rp: factors.plus(Side::R, a)?,
        lm: factors.minus(Side::L, -b)?,
        rm: factors.minus(Side::R, -b)?,
        diagonal: [diag2, diag1],
    })
}

/// Survival transform from the Wiener–Hopf factors, for `s_i > Phi_i(0)`.
pub fn theorem_main(
    model: &CoverageModel,
    factors: &dyn FactorSource,
    s1: f64,
    s2: f64,
) -> Result<TransformValue> {
    theorem_main_complex(model, factors, re(s1), re(s2))
}

pub fn theorem_main_complex(
    model: &CoverageModel,
    factors: &dyn FactorSource,
    s1: Complex64,
    s2: Complex64,
) -> Result<TransformValue> {
    let primes = prime_constants(model)?;
    theorem_main_with(model, factors, s1, s2, &primes)
}

/// As [`theorem_main_complex`] with caller-supplied constants `p_L'`, `p_R'`.
pub fn theorem_main_with(
    model: &CoverageModel,
    factors: &dyn FactorSource,
    s1: Complex64,
    s2: Complex64,
    primes: &PrimeConstants,
) -> Result<TransformValue> {
    let p = parts(model, factors, s1, s2, primes)?;
    let denom = p.a + p.b;
    let first = p.t1 * p.lp / p.rp / denom;
    let second = p.t2 * p.rm / p.lm / denom;
    let f = first + second;
    let std_error = match (factors.samples(Side::L), factors.samples(Side::R)) {
        (Some(l), Some(r)) => Some((s1 * s2).norm() * delta_se(&p, l, r)),
        _ => None,
    };
    Ok(TransformValue {
        s1,
        s2,
        f,
        f_hat: s1 * s2 * f,
        components: [first, second],
        std_error,
        diagonal: p.diagonal,
    })
}

/// First-order error of `F` from sampling noise in the four factors.
///
/// `F (a + b) = t1 A / B + t2 C / D` with `A = Psi_L+(a)`, `D = Psi_L-(-b)`
/// from the left samples and `B = Psi_R+(a)`, `C = Psi_R-(-b)` from the right.
fn delta_se(p: &Parts, left: &SideSamples, right: &SideSamples) -> f64 {
    let denom = p.a + p.b;
    let g_a = p.t1 / p.rp / denom;
    let g_d = -p.t2 * p.rm / (p.lm * p.lm) / denom;
    let g_b = -p.t1 * p.lp / (p.rp * p.rp) / denom;
    let g_c = p.t2 / p.lm / denom;
    let side_var = |s: &SideSamples,
                    plus_mean: Complex64,
                    g_plus: Complex64,
                    minus_mean: Complex64,
                    g_minus: Complex64| {
        let n = s.len() as f64;
        let ss: f64 = s
            .sup
            .iter()
            .zip(&s.inf)
            .map(|(&x, &y)| {
                let dp = (-p.a * x).exp() - plus_mean;
                let dm = (p.b * y).exp() - minus_mean;
                (g_plus * dp + g_minus * dm).norm_sqr()
            })
            .sum();
        ss / (n * (n - 1.0).max(1.0))
    };
    (side_var(left, p.lp, g_a, p.lm, g_d) + side_var(right, p.rp, g_b, p.rm, g_c)).sqrt()
}

/// Boundary transforms `F1(s1) = int e^{-s1 u} phi(u, 0) du` and
/// `F2(s2) = int e^{-s2 v} phi(0, v) dv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTransforms {
    pub f1: Complex64,
    pub f2: Complex64,
}

pub fn boundary_transforms(
    model: &CoverageModel,
    factors: &dyn FactorSource,
    s1: f64,
    s2: f64,
) -> Result<BoundaryTransforms> {
    boundary_transforms_complex(model, factors, re(s1), re(s2))
}

pub fn boundary_transforms_complex(
    model: &CoverageModel,
    factors: &dyn FactorSource,
    s1: Complex64,
    s2: Complex64,
) -> Result<BoundaryTransforms> {
    let primes = prime_constants(model)?;
    let p = parts(model, factors, s1, s2, &primes)?;
    // u1 = C / (p_L P) and u2 = C / (p_R Q)
    Ok(BoundaryTransforms {
        f1: p.u1 * p.lp / p.rp,
        f2: p.u2 * p.rm / p.lm,
    })
}

/// `phi(0, 0)` two ways, from the tails of the plus and of the minus factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phi00 {
    pub via_plus: f64,
    pub via_minus: f64,
    /// Standard errors when the tails come from Monte-Carlo samples.
    pub via_plus_se: Option<f64>,
    pub via_minus_se: Option<f64>,
}

/// `p_R'/(c1 + r2 c2) Psi_L+(inf)/Psi_R+(inf)` and
/// `p_L'/(r1 c1 + c2) Psi_R-(-inf)/Psi_L-(-inf)`.
pub fn phi00(model: &CoverageModel, factors: &dyn FactorSource) -> Result<Phi00> {
    let primes = prime_constants(model)?;
    phi00_with(model, factors, &primes)
}

pub fn phi00_with(
    model: &CoverageModel,
    factors: &dyn FactorSource,
    primes: &PrimeConstants,
) -> Result<Phi00> {
    require_theorem_model(model)?;
    let (r1, r2) = finite_costs(model)?;
    let (c1, c2) = (model.line1().premium(), model.line2().premium());
    let (lp, rp) = (factors.plus_tail(Side::L)?, factors.plus_tail(Side::R)?);
    let (lm, rm) = (factors.minus_tail(Side::L)?, factors.minus_tail(Side::R)?);
    if rp == 0.0 || lm == 0.0 {
        return Err(Error::Singular(0.0));
    }
    let via_plus = primes.p_r_prime / (c1 + r2 * c2) * lp / rp;
    let via_minus = primes.p_l_prime / (r1 * c1 + c2) * rm / lm;
    let ratio_se = |value: f64, num: Option<McEstimate>, den: Option<McEstimate>| {
        let (num, den) = (num?, den?);
        let rel = |e: McEstimate| {
            if e.value > 0.0 {
                (e.std_error / e.value).powi(2)
            } else {
                0.0
            }
        };
        Some(value.abs() * (rel(num) + rel(den)).sqrt())
    };
    let (sl, sr) = (factors.samples(Side::L), factors.samples(Side::R));
    Ok(Phi00 {
        via_plus,
        via_minus,
        via_plus_se: ratio_se(
            via_plus,
            sl.map(|s| s.plus_tail()),
            sr.map(|s| s.plus_tail()),
        ),
        via_minus_se: ratio_se(
            via_minus,
            sr.map(|s| s.minus_tail()),
            sl.map(|s| s.minus_tail()),
        ),
    })
}

/// Survival transform when the transfer to line 2 is disabled (`r2 = inf`).
///
/// Only the left factors are used; the right ones are replaced by their
/// limits `Psi_R+ = 1` and `Psi_R-(w) = -mu2 Phi2(-w)/w`. With `r1 = inf` as
/// well the lines decouple and `F = mu1 mu2 / (psi1(s1) psi2(s2))`.
pub fn restricted_f(
    model: &CoverageModel,
    factors: &dyn FactorSource,
    s1: f64,
    s2: f64,
) -> Result<TransformValue> {
    restricted_f_complex(model, factors, re(s1), re(s2))
}

pub fn restricted_f_complex(
    model: &CoverageModel,
    factors: &dyn FactorSource,
    s1: Complex64,
    s2: Complex64,
) -> Result<TransformValue> {
    if !model.is_independent() {
        return Err(Error::Precondition(
            "restricted transfers need independent claim streams".into(),
        ));
    }
    if !model.r2().is_disabled() {
        return Err(Error::Precondition("restricted_f needs r2 = inf".into()));
    }
    model.require_net_profit()?;
    let (l1, l2) = (model.line1(), model.line2());
    require_above_phi0(l1, s1, "restricted solution (s1)")?;
    require_above_phi0(l2, s2, "restricted solution (s2)")?;
    let (m1, m2) = (l1.drift(), l2.drift());
    let a = l1.psi(s1)?;
    let b = l2.psi(s2)?;
    let Some(r1) = model.r1().finite() else {
        let first = re(m1) / a;
        let second = re(m2) / b;
        let f = first * second;
        return Ok(TransformValue {
            s1,
            s2,
            f,
            f_hat: s1 * s2 * f,
            components: [f, re(0.0)],
            std_error: None,
            diagonal: [false, false],
        });
    };
    let big_q = b + l1.psi(r1 * s2)?;
    if big_q.norm() < 1e-14 {
        return Err(Error::Singular(big_q.norm()));
    }
    let (q1, diag1) = diff_quotient(s1, r1 * s2, |s| l1.psi(s), |s| l1.psi_prime(s))?;
    let denom = a + b;
    let lp = factors.plus(Side::L, a)?;
    let lm = factors.minus(Side::L, -b)?;
    let first = (m2 - r1 * (-m1).max(0.0)) * lp / s1 / denom;
    let second = m2 * (m2 + r1 * m1) * s2 * q1 / big_q / (b * lm) / denom;
    let f = first + second;
    let std_error = factors.samples(Side::L).map(|l| {
        let g_a = first / lp;
        let g_d = -second / lm;
        let n = l.len() as f64;
        let ss: f64 = l
            .sup
            .iter()
            .zip(&l.inf)
            .map(|(&x, &y)| (g_a * ((-a * x).exp() - lp) + g_d * ((b * y).exp() - lm)).norm_sqr())
            .sum();
        (s1 * s2).norm() * (ss / (n * (n - 1.0).max(1.0))).sqrt()
    });
    Ok(TransformValue {
        s1,
        s2,
        f,
        f_hat: s1 * s2 * f,
        components: [first, second],
        std_error,
        diagonal: [false, diag1],
    })
}

/// Closed form when line 2 is a pure drift (surplus note):
/// `F = (mu2 + mu1 r1)/(s1 - r1 s2) (1/(psi1(r1 s2) + mu2 s2) - r1/(r1 psi1(s1) + mu2 s1))`.
pub fn oracle_surplus_note(
    model: &CoverageModel,
    s1: Complex64,
    s2: Complex64,
) -> Result<Complex64> {
    if model.line2().has_claims() || !model.is_independent() {
        return Err(Error::Precondition(
            "surplus-note oracle needs line 2 to be a pure drift".into(),
        ));
    }
    let r1 = model
        .r1()
        .finite()
        .ok_or_else(|| Error::Precondition("surplus-note oracle needs a finite r1".into()))?;
    model.require_net_profit()?;
    let l1 = model.line1();
    let (m1, m2) = (l1.drift(), model.line2().premium());
    // with k(x) = 1/(r1 psi1(x) + mu2 x), F = -(mu2 + mu1 r1) r1 (k(s1) - k(r1 s2)) / (s1 - r1 s2)
    let k = |x: Complex64| Ok(1.0 / (r1 * l1.psi(x)? + m2 * x));
    let kp = |x: Complex64| {
        let d = r1 * l1.psi(x)? + m2 * x;
        Ok(-(r1 * l1.psi_prime(x)? + m2) / (d * d))
    };
    let (q, diag) = diff_quotient(s1, r1 * s2, k, kp)?;
    if diag {
        return Ok(-(m2 + m1 * r1) * r1 * q);
    }
    Ok((m2 + m1 * r1) / (s1 - r1 * s2)
        * (1.0 / (l1.psi(r1 * s2)? + m2 * s2) - r1 / (r1 * l1.psi(s1)? + m2 * s1)))
}

/// Closed form for `r1 r2 = 1`:
/// `F = (mu1 + r2 mu2)/(s2 - s1 r2) (1/(psi1(s1) + psi2(r2 s1)) - 1/(psi1(r1 s2) + psi2(s2)))`.
pub fn oracle_unit_cost(model: &CoverageModel, s1: Complex64, s2: Complex64) -> Result<Complex64> {
    let (r1, r2) = finite_costs(model)?;
    if (r1 * r2 - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "unit-cost oracle needs r1 r2 = 1, got {}",
            r1 * r2
        )));
    }
    if !model.is_independent() {
        return Err(Error::Precondition(
            "unit-cost oracle needs independent claim streams".into(),
        ));
    }
    model.require_net_profit()?;
    let (l1, l2) = (model.line1(), model.line2());
    let (m1, m2) = (l1.drift(), l2.drift());
    let scale = m1 + r2 * m2;
    if (s2 - r2 * s1).norm() < DIAGONAL_TOL * s2.norm().max(1.0) {
        // h(x) = 1/(psi1(r1 x) + psi2(x)); F = -(mu1 + r2 mu2) h'(x)
        let x = (s2 + r2 * s1) / 2.0;
        let d = l1.psi(r1 * x)? + l2.psi(x)?;
        let hp = -(r1 * l1.psi_prime(r1 * x)? + l2.psi_prime(x)?) / (d * d);
        return Ok(-scale * hp);
    }
    Ok(scale / (s2 - s1 * r2)
        * (1.0 / (l1.psi(s1)? + l2.psi(r2 * s1)?) - 1.0 / (l1.psi(r1 * s2)? + l2.psi(s2)?)))
}

/// One-line survival transform `int e^{-s u} phi(u) du = mu / psi(s)`; zero when `mu <= 0`.
pub fn oracle_1d_survival(proc: &RiskProcess, s: Complex64) -> Result<Complex64> {
    let mu = proc.drift();
    if mu <= 0.0 {
        return Ok(re(0.0));
    }
    if s.re <= 0.0 {
        return Err(Error::Domain {
            what: "one-line survival transform",
            arg: format!("{s}"),
        });
    }
    Ok(mu / proc.psi(s)?)
}

/// `phi(u) = 1 - (lambda/(c theta)) exp(-(theta - lambda/c) u)` for exponential claims of rate `theta`.
pub fn oracle_1d_pointwise(proc: &RiskProcess, u: f64) -> Result<f64> {
    let theta = match proc.claims() {
        Some(crate::ClaimDistribution::Exponential { rate }) => *rate,
        _ => {
            return Err(Error::Precondition(
                "pointwise oracle needs exponential claims".into(),
            ))
        }
    };
    if !(u >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "capital must be >= 0, got {u}"
        )));
    }
    if proc.drift() <= 0.0 {
        return Ok(0.0);
    }
    let (c, lambda) = (proc.premium(), proc.claim_rate());
    Ok(1.0 - lambda / (c * theta) * (-(theta - lambda / c) * u).exp())
}
