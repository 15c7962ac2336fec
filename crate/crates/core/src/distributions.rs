//! Nonnegative claim-size laws with closed-form Laplace transforms.
//!
//! Every law here has an analytic transform `E exp(-s C)` valid on the closed
//! right half-plane, which is what the exponent and inverse-exponent code in
//! [`crate::risk_model`] needs. Bivariate (common-shock) laws are mixtures of
//! product atoms; an absent coordinate is the point mass at zero.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawClaim", into = "RawClaim")]
pub enum ClaimDistribution {
    Deterministic { value: f64 },
    Exponential { rate: f64 },
    Erlang { shape: u32, rate: f64 },
    Mixture(Vec<(f64, ClaimDistribution)>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawClaim {
    Deterministic { value: f64 },
    Exponential { rate: f64 },
    Erlang { shape: u32, rate: f64 },
    Mixture { components: Vec<RawComponent> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    weight: f64,
    law: RawClaim,
}

impl TryFrom<RawClaim> for ClaimDistribution {
    type Error = Error;

    fn try_from(raw: RawClaim) -> Result<Self> {
        let dist = match raw {
            RawClaim::Deterministic { value } => Self::Deterministic { value },
            RawClaim::Exponential { rate } => Self::Exponential { rate },
            RawClaim::Erlang { shape, rate } => Self::Erlang { shape, rate },
            RawClaim::Mixture { components } => Self::Mixture(
                components
                    .into_iter()
                    .map(|c| Ok((c.weight, Self::try_from(c.law)?)))
                    .collect::<Result<_>>()?,
            ),
        };
        dist.validate()?;
        Ok(dist)
    }
}

impl From<ClaimDistribution> for RawClaim {
    fn from(dist: ClaimDistribution) -> Self {
        match dist {
            ClaimDistribution::Deterministic { value } => RawClaim::Deterministic { value },
            ClaimDistribution::Exponential { rate } => RawClaim::Exponential { rate },
            ClaimDistribution::Erlang { shape, rate } => RawClaim::Erlang { shape, rate },
            ClaimDistribution::Mixture(parts) => RawClaim::Mixture {
                components: parts
                    .into_iter()
                    .map(|(weight, law)| RawComponent {
                        weight,
                        law: law.into(),
                    })
                    .collect(),
            },
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {x}"
        )))
    }
}

fn check_weights<'a>(weights: impl Iterator<Item = &'a f64>) -> Result<()> {
    let mut total = 0.0;
    for &w in weights {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mixture weight {w} is not a probability"
            )));
        }
        total += w;
    }
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidParameter(format!(
            "mixture weights sum to {total}, expected 1"
        )));
    }
    Ok(())
}

fn ensure_right_half_plane(what: &'static str, s: Complex64) -> Result<()> {
    if s.re >= 0.0 && s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            arg: format!("{s}"),
        })
    }
}

impl ClaimDistribution {
    pub fn deterministic(value: f64) -> Result<Self> {
        positive("deterministic claim size", value)?;
        Ok(Self::Deterministic { value })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive("exponential rate", rate)?;
        Ok(Self::Exponential { rate })
    }

    pub fn erlang(shape: u32, rate: f64) -> Result<Self> {
        if shape == 0 {
            return Err(Error::InvalidParameter("Erlang shape must be >= 1".into()));
        }
        positive("Erlang rate", rate)?;
        Ok(Self::Erlang { shape, rate })
    }

    pub fn mixture(parts: Vec<(f64, ClaimDistribution)>) -> Result<Self> {
        let dist = Self::Mixture(parts);
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Deterministic { value } => positive("deterministic claim size", *value),
            Self::Exponential { rate } => positive("exponential rate", *rate),
            Self::Erlang { shape, rate } => {
                if *shape == 0 {
                    return Err(Error::InvalidParameter("Erlang shape must be >= 1".into()));
                }
                positive("Erlang rate", *rate)
            }
            Self::Mixture(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidParameter("empty mixture".into()));
                }
                check_weights(parts.iter().map(|(w, _)| w))?;
                parts.iter().try_for_each(|(_, d)| d.validate())
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Deterministic { value } => *value,
            Self::Exponential { rate } => 1.0 / rate,
            Self::Erlang { shape, rate } => f64::from(*shape) / rate,
            Self::Mixture(parts) => parts.iter().map(|(w, d)| w * d.mean()).sum(),
        }
    }

    pub fn second_moment(&self) -> f64 {
        match self {
            Self::Deterministic { value } => value * value,
            Self::Exponential { rate } => 2.0 / (rate * rate),
            Self::Erlang { shape, rate } => {
                let k = f64::from(*shape);
                k * (k + 1.0) / (rate * rate)
            }
            Self::Mixture(parts) => parts.iter().map(|(w, d)| w * d.second_moment()).sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.second_moment() - m * m
    }

    /// `E exp(-s C)` for `Re(s) >= 0`.
    pub fn lt(&self, s: Complex64) -> Result<Complex64> {
        ensure_right_half_plane("claim Laplace transform", s)?;
        Ok(self.lt_unchecked(s))
    }

    pub fn lt_real(&self, s: f64) -> Result<f64> {
        Ok(self.lt(Complex64::new(s, 0.0))?.re)
    }

    /// Analytic continuation of the transform; callers guarantee the argument
    /// stays away from poles (only relevant for `Re(s) < 0`).
    pub(crate) fn lt_unchecked(&self, s: Complex64) -> Complex64 {
        match self {
            Self::Deterministic { value } => (-s * value).exp(),
            Self::Exponential { rate } => *rate / (*rate + s),
            Self::Erlang { shape, rate } => (*rate / (*rate + s)).powu(*shape),
            Self::Mixture(parts) => parts.iter().map(|(w, d)| *w * d.lt_unchecked(s)).sum(),
        }
    }

    /// `1 - E exp(-s C)` without cancellation for small `|s|`.
    pub(crate) fn one_minus_lt_unchecked(&self, s: Complex64) -> Complex64 {
        match self {
            Self::Deterministic { value } => -expm1(-s * value),
            Self::Exponential { rate } => s / (*rate + s),
            Self::Erlang { shape, rate } => -expm1(-f64::from(*shape) * ln1p(s / rate)),
            Self::Mixture(parts) => parts
                .iter()
                .map(|(w, d)| *w * d.one_minus_lt_unchecked(s))
                .sum(),
        }
    }

    /// Derivative of the transform, `-E[C exp(-s C)]`.
    pub(crate) fn lt_derivative_unchecked(&self, s: Complex64) -> Complex64 {
        match self {
            Self::Deterministic { value } => -*value * (-s * value).exp(),
            Self::Exponential { rate } => -*rate / ((*rate + s) * (*rate + s)),
            Self::Erlang { shape, rate } => {
                let k = f64::from(*shape);
                -k * rate.powf(k) / (*rate + s).powu(shape + 1)
            }
            Self::Mixture(parts) => parts
                .iter()
                .map(|(w, d)| *w * d.lt_derivative_unchecked(s))
                .sum(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Deterministic { value } => *value,
            Self::Exponential { rate } => {
                let e: f64 = rng.sample(Exp1);
                e / rate
            }
            Self::Erlang { shape, rate } => {
                let total: f64 = (0..*shape).map(|_| rng.sample::<f64, _>(Exp1)).sum();
                total / rate
            }
            Self::Mixture(parts) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (w, d) in parts {
                    acc += w;
                    if u < acc {
                        return d.sample(rng);
                    }
                }
                // rounding in the weights can leave u just above the final sum
                parts
                    .last()
                    .expect("validated mixture is non-empty")
                    .1
                    .sample(rng)
            }
        }
    }
}

/// One product atom of a bivariate claim law. `None` is the point mass at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointAtom {
    pub weight: f64,
    #[serde(default)]
    pub first: Option<ClaimDistribution>,
    #[serde(default)]
    pub second: Option<ClaimDistribution>,
}

/// A bivariate claim law `mu(dx, dy)` written as a mixture of product atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint", into = "RawJoint")]
pub struct JointClaimDistribution {
    atoms: Vec<JointAtom>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJoint {
    atoms: Vec<JointAtom>,
}

impl TryFrom<RawJoint> for JointClaimDistribution {
    type Error = Error;
    fn try_from(raw: RawJoint) -> Result<Self> {
        Self::new(raw.atoms)
    }
}

impl From<JointClaimDistribution> for RawJoint {
    fn from(j: JointClaimDistribution) -> Self {
        RawJoint { atoms: j.atoms }
    }
}

fn expm1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        z * (1.0 + z / 2.0 * (1.0 + z / 3.0 * (1.0 + z / 4.0 * (1.0 + z / 5.0))))
    } else {
        z.exp() - 1.0
    }
}

fn ln1p(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        z * (1.0 - z * (0.5 - z * (1.0 / 3.0 - z * (0.25 - z / 5.0))))
    } else {
        (1.0 + z).ln()
    }
}

fn lt_or_one(d: &Option<ClaimDistribution>, s: Complex64) -> Complex64 {
    d.as_ref()
        .map_or(Complex64::new(1.0, 0.0), |d| d.lt_unchecked(s))
}

impl JointClaimDistribution {
    pub fn new(atoms: Vec<JointAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter(
                "joint claim law has no atoms".into(),
            ));
        }
        check_weights(atoms.iter().map(|a| &a.weight))?;
        for atom in &atoms {
            if atom.first.is_none() && atom.second.is_none() && atom.weight > 0.0 {
                return Err(Error::InvalidParameter(
                    "joint claim law puts mass at (0, 0)".into(),
                ));
            }
            if let Some(d) = &atom.first {
                d.validate()?;
            }
            if let Some(d) = &atom.second {
                d.validate()?;
            }
        }
        Ok(Self { atoms })
    }

    /// Single atom hitting both lines at once.
    pub fn common_shock(first: ClaimDistribution, second: ClaimDistribution) -> Result<Self> {
        Self::new(vec![JointAtom {
            weight: 1.0,
            first: Some(first),
            second: Some(second),
        }])
    }

    /// Two independent claim streams written as one stream of rate
    /// `rate1 + rate2` whose jumps touch a single coordinate.
    pub fn independent_streams(
        rate1: f64,
        claims1: ClaimDistribution,
        rate2: f64,
        claims2: ClaimDistribution,
    ) -> Result<Self> {
        let total = rate1 + rate2;
        if !(rate1 >= 0.0 && rate2 >= 0.0 && total > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stream rates must be >= 0 with a positive sum, got {rate1}, {rate2}"
            )));
        }
        Self::new(vec![
            JointAtom {
                weight: rate1 / total,
                first: Some(claims1),
                second: None,
            },
            JointAtom {
                weight: rate2 / total,
                first: None,
                second: Some(claims2),
            },
        ])
    }

    pub fn atoms(&self) -> &[JointAtom] {
        &self.atoms
    }

    pub fn mean_first(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * a.first.as_ref().map_or(0.0, ClaimDistribution::mean))
            .sum()
    }

    pub fn mean_second(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * a.second.as_ref().map_or(0.0, ClaimDistribution::mean))
            .sum()
    }

    /// `int exp(-s1 x - s2 y) mu(dx, dy)`.
    pub fn joint_lt(&self, s1: Complex64, s2: Complex64) -> Result<Complex64> {
        ensure_right_half_plane("joint claim Laplace transform", s1)?;
        ensure_right_half_plane("joint claim Laplace transform", s2)?;
        Ok(self.joint_lt_unchecked(s1, s2))
    }

    pub(crate) fn joint_lt_unchecked(&self, s1: Complex64, s2: Complex64) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| a.weight * lt_or_one(&a.first, s1) * lt_or_one(&a.second, s2))
            .sum()
    }

    /// `1 - joint_lt(s1, s2)` without cancellation near the origin.
    pub(crate) fn one_minus_joint_lt_unchecked(&self, s1: Complex64, s2: Complex64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        self.atoms
            .iter()
            .map(|a| {
                let m1 = a
                    .first
                    .as_ref()
                    .map_or(zero, |d| d.one_minus_lt_unchecked(s1));
                let m2 = a
                    .second
                    .as_ref()
                    .map_or(zero, |d| d.one_minus_lt_unchecked(s2));
                // 1 - l1 l2 = (1 - l1) + l1 (1 - l2)
                a.weight * (m1 + (1.0 - m1) * m2)
            })
            .sum()
    }

    /// Partial derivatives of the joint transform in `s1` and `s2`.
    pub(crate) fn joint_lt_gradient_unchecked(
        &self,
        s1: Complex64,
        s2: Complex64,
    ) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        self.atoms.iter().fold((zero, zero), |(d1, d2), a| {
            let l1 = lt_or_one(&a.first, s1);
            let l2 = lt_or_one(&a.second, s2);
            let g1 = a
                .first
                .as_ref()
                .map_or(zero, |d| d.lt_derivative_unchecked(s1));
            let g2 = a
                .second
                .as_ref()
                .map_or(zero, |d| d.lt_derivative_unchecked(s2));
            (d1 + a.weight * g1 * l2, d2 + a.weight * l1 * g2)
        })
    }

    /// Draws one bivariate jump.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = self.atoms.last().expect("validated joint law is non-empty");
        for atom in &self.atoms {
            acc += atom.weight;
            if u < acc {
                chosen = atom;
                break;
            }
        }
        let x = chosen.first.as_ref().map_or(0.0, |d| d.sample(rng));
        let y = chosen.second.as_ref().map_or(0.0, |d| d.sample(rng));
        (x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn all_variants() -> Vec<ClaimDistribution> {
        vec![
            ClaimDistribution::deterministic(1.0).unwrap(),
            ClaimDistribution::exponential(2.0).unwrap(),
            ClaimDistribution::erlang(3, 1.5).unwrap(),
            ClaimDistribution::mixture(vec![
                (0.3, ClaimDistribution::deterministic(0.5).unwrap()),
                (0.7, ClaimDistribution::erlang(2, 1.0).unwrap()),
            ])
            .unwrap(),
        ]
    }

    #[test]
    fn one_minus_transform_is_stable() {
        let laws = [
            ClaimDistribution::deterministic(1.5).unwrap(),
            ClaimDistribution::exponential(2.0).unwrap(),
            ClaimDistribution::erlang(3, 1.5).unwrap(),
            ClaimDistribution::mixture(vec![
                (0.3, ClaimDistribution::exponential(1.0).unwrap()),
                (0.7, ClaimDistribution::deterministic(0.5).unwrap()),
            ])
            .unwrap(),
        ];
        for d in &laws {
            for s in [
                Complex64::new(0.7, 0.0),
                Complex64::new(0.2, 3.0),
                Complex64::new(2.0, -1.0),
            ] {
                let a = d.one_minus_lt_unchecked(s);
                assert!((a - (1.0 - d.lt_unchecked(s))).norm() < 1e-14);
            }
            let tiny = Complex64::new(1e-12, 1e-12);
            let rel = (d.one_minus_lt_unchecked(tiny) / (tiny * d.mean()) - 1.0).norm();
            assert!(rel < 1e-10, "{d:?}: {rel}");
        }
    }

    #[test]
    fn means() {
        assert_eq!(ClaimDistribution::deterministic(1.0).unwrap().mean(), 1.0);
        assert_eq!(ClaimDistribution::exponential(2.0).unwrap().mean(), 0.5);
        let mix = ClaimDistribution::mixture(vec![
            (0.5, ClaimDistribution::deterministic(1.0).unwrap()),
            (0.5, ClaimDistribution::exponential(1.0).unwrap()),
        ])
        .unwrap();
        // weighted average of 1 and 1
        assert_relative_eq!(mix.mean(), 0.5 * 1.0 + 0.5 * 1.0);
    }

    #[test]
    fn transforms_at_known_points() {
        let det = ClaimDistribution::deterministic(1.0).unwrap();
        assert_eq!(det.lt(c(0.0)).unwrap(), c(1.0));
        assert_relative_eq!(
            det.lt_real(1.0).unwrap(),
            (-1.0f64).exp(),
            max_relative = 1e-15
        );
        let exp = ClaimDistribution::exponential(1.0).unwrap();
        assert_relative_eq!(exp.lt_real(1.0).unwrap(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn negative_real_part_is_rejected() {
        let exp = ClaimDistribution::exponential(1.0).unwrap();
        assert!(matches!(
            exp.lt(Complex64::new(-0.1, 2.0)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn invalid_parameters() {
        assert!(ClaimDistribution::deterministic(0.0).is_err());
        assert!(ClaimDistribution::exponential(-1.0).is_err());
        assert!(ClaimDistribution::erlang(0, 1.0).is_err());
        assert!(ClaimDistribution::mixture(vec![(
            0.4,
            ClaimDistribution::Deterministic { value: 1.0 }
        )])
        .is_err());
        assert!(JointClaimDistribution::new(vec![JointAtom {
            weight: 1.0,
            first: None,
            second: None
        }])
        .is_err());
    }

    #[test]
    fn derivative_matches_central_difference() {
        for d in all_variants() {
            for s in [0.3, 1.0, 2.5] {
                let h = 1e-5;
                let fd = (d.lt_unchecked(c(s + h)) - d.lt_unchecked(c(s - h))) / (2.0 * h);
                let an = d.lt_derivative_unchecked(c(s));
                assert_relative_eq!(an.re, fd.re, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn joint_transform_examples() {
        let e1 = ClaimDistribution::exponential(1.0).unwrap();
        let j =
            JointClaimDistribution::independent_streams(1.0, e1.clone(), 1.0, e1.clone()).unwrap();
        assert_relative_eq!(
            j.joint_lt(c(0.0), c(0.0)).unwrap().re,
            1.0,
            max_relative = 1e-15
        );

        let (l1, l2) = (0.7, 1.9);
        let j =
            JointClaimDistribution::independent_streams(l1, e1.clone(), l2, e1.clone()).unwrap();
        let s1 = 0.8;
        let expected = (l1 * e1.lt_real(s1).unwrap() + l2) / (l1 + l2);
        assert_relative_eq!(
            j.joint_lt(c(s1), c(0.0)).unwrap().re,
            expected,
            max_relative = 1e-14
        );

        let d1 = ClaimDistribution::deterministic(1.0).unwrap();
        let shock = JointClaimDistribution::common_shock(d1.clone(), d1).unwrap();
        assert_relative_eq!(
            shock.joint_lt(c(1.0), c(1.0)).unwrap().re,
            (-2.0f64).exp(),
            max_relative = 1e-15
        );
        assert!(shock.joint_lt(c(-1.0), c(0.0)).is_err());
    }

    #[test]
    fn deterministic_sampling_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = ClaimDistribution::deterministic(1.0).unwrap();
        assert!((0..100).all(|_| d.sample(&mut rng) == 1.0));
    }

    #[test]
    fn exponential_sample_mean() {
        let theta = 2.0;
        let d = ClaimDistribution::exponential(theta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mean = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
        let se = d.variance().sqrt() / (n as f64).sqrt();
        assert!((mean - 1.0 / theta).abs() < 4.0 * se, "mean {mean}");
    }

    #[test]
    fn erlang_sample_variance() {
        let d = ClaimDistribution::erlang(2, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let sq: Vec<f64> = xs.iter().map(|x| (x - m).powi(2)).collect();
        let var = sq.iter().sum::<f64>() / (n - 1) as f64;
        // SE of the sample variance from the empirical fourth central moment
        let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n as f64;
        let se = ((m4 - var * var) / n as f64).sqrt();
        assert!((var - 2.0).abs() < 4.0 * se, "variance {var} se {se}");
    }

    #[test]
    fn empirical_transform_matches_closed_form() {
        let n = 100_000;
        for (k, d) in all_variants().into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + k as u64);
            let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
            for s in [0.5, 1.0, 2.0] {
                let vals: Vec<f64> = xs.iter().map(|x| (-s * x).exp()).collect();
                let m = vals.iter().sum::<f64>() / n as f64;
                let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
                let se = (var / n as f64).sqrt();
                let exact = d.lt_real(s).unwrap();
                // deterministic laws have zero sampling error, only summation rounding
                assert!(
                    (m - exact).abs() <= 4.0 * se + 1e-9 * exact,
                    "{d:?} s={s}: {m} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn joint_sampling_respects_atoms() {
        let d1 = ClaimDistribution::deterministic(1.0).unwrap();
        let d2 = ClaimDistribution::deterministic(2.0).unwrap();
        let j = JointClaimDistribution::independent_streams(1.0, d1, 3.0, d2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40_000;
        let mut first = 0;
        for _ in 0..n {
            match j.sample(&mut rng) {
                (x, 0.0) if x == 1.0 => first += 1,
                (0.0, y) if y == 2.0 => {}
                other => panic!("unexpected jump {other:?}"),
            }
        }
        let p = first as f64 / n as f64;
        let se = (0.25f64 * 0.75 / n as f64).sqrt();
        assert!((p - 0.25).abs() < 4.0 * se);
    }

    #[test]
    fn config_round_trip() {
        let text = r#"
            type = "mixture"
            components = [
                { weight = 0.5, law = { type = "deterministic", value = 1.0 } },
                { weight = 0.5, law = { type = "erlang", shape = 2, rate = 3.0 } },
            ]
        "#;
        let d: ClaimDistribution = toml::from_str(text).unwrap();
        assert_relative_eq!(d.mean(), 0.5 + 0.5 * 2.0 / 3.0);
        let back = toml::to_string(&d).unwrap();
        assert_eq!(toml::from_str::<ClaimDistribution>(&back).unwrap(), d);
        assert!(
            toml::from_str::<ClaimDistribution>("type = \"exponential\"\nrate = -2.0").is_err()
        );
        assert!(toml::from_str::<ClaimDistribution>(
            "type = \"exponential\"\nrate = 2.0\nshape = 1"
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn transform_is_completely_monotone_on_grid(idx in 0usize..4, s0 in 0.0f64..5.0, h in 0.01f64..1.0) {
            let d = &all_variants()[idx];
            let f = |s: f64| d.lt_real(s).unwrap();
            let (a, b, cc) = (f(s0), f(s0 + h), f(s0 + 2.0 * h));
            prop_assert!(a <= 1.0 && cc > 0.0);
            prop_assert!(b <= a);
            prop_assert!(a - 2.0 * b + cc >= -1e-14);
        }

        #[test]
        fn transform_bounded_on_imaginary_axis(idx in 0usize..4, t in -50.0f64..50.0, re in 0.0f64..3.0) {
            let d = &all_variants()[idx];
            prop_assert!(d.lt(Complex64::new(0.0, t)).unwrap().norm() <= 1.0 + 1e-14);
            prop_assert!(d.lt(Complex64::new(re, t)).unwrap().norm() <= 1.0 + 1e-14);
        }
    }
}
