//! Descending ladder time processes, the auxiliary processes `X_L`, `X_R`
//! and Monte-Carlo Wiener–Hopf factors.
//!
//! For a line with positive drift `mu`, the ladder time process `Y` is a
//! compound Poisson subordinator with rate `c - mu` whose jumps are
//! distributed as the first-passage time below zero, conditioned on that
//! passage happening. The auxiliary processes are
//! `X_L(t) = Y1(r1 t) - Y2(t)` and `X_R(t) = Y1(t) - Y2(r2 t)`, killed at
//! rates `p_L = mu2+ + r1 mu1+` and `p_R = mu1+ + r2 mu2+`.
//!
//! Factors are kept as raw samples of the supremum and infimum at the
//! exponential horizon, so they can be evaluated at any later argument.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{self, ComplexEstimate, McEstimate};
use crate::risk_model::{CoverageModel, RiskProcess, TransferCost};

/// Parent paths alive after this many mean inter-claim times count as never ruined.
pub const DEFAULT_REJECTION_CUTOFF: f64 = 1e4;

#[derive(Debug, Clone, PartialEq)]
pub struct LadderProcess {
    parent: RiskProcess,
    rate: f64,
    cutoff_time: f64,
}

pub fn ladder(proc: &RiskProcess) -> Result<LadderProcess> {
    LadderProcess::new(proc, DEFAULT_REJECTION_CUTOFF)
}

impl LadderProcess {
    /// `cutoff` is measured in mean inter-claim times of the parent.
    pub fn new(proc: &RiskProcess, cutoff: f64) -> Result<Self> {
        let mu = proc.drift();
        if !(mu > 0.0) {
            return Err(Error::UnsupportedDrift { drift: mu });
        }
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rejection cutoff must be > 0, got {cutoff}"
            )));
        }
        let cutoff_time = if proc.has_claims() {
            cutoff / proc.claim_rate()
        } else {
            0.0
        };
        Ok(Self {
            parent: proc.clone(),
            rate: proc.premium() - mu,
            cutoff_time,
        })
    }

    pub fn parent(&self) -> &RiskProcess {
        &self.parent
    }

    /// `lambda_Y = c - mu`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn is_zero(&self) -> bool {
        !self.parent.has_claims()
    }

    pub fn cutoff_time(&self) -> f64 {
        self.cutoff_time
    }

    /// Probability that the parent started at 0 ever goes below 0.
    pub fn ruin_probability(&self) -> f64 {
        1.0 - self.parent.drift() / self.parent.premium()
    }

    /// One attempt: the first-passage time below zero, or `None` if the
    /// parent survives past the cutoff.
    pub fn try_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        let claims = self.parent.claims()?;
        let (c, lambda) = (self.parent.premium(), self.parent.claim_rate());
        let (mut t, mut x) = (0.0, 0.0);
        loop {
            let e: f64 = rng.sample(Exp1);
            let dt = e / lambda;
            t += dt;
            if t > self.cutoff_time {
                return None;
            }
            x += c * dt - claims.sample(rng);
            if x < 0.0 {
                return Some(t);
            }
        }
    }

    /// A jump drawn by rejection; the second value is the number of attempts.
    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, u64) {
        assert!(!self.is_zero(), "zero ladder process has no jumps");
        let mut attempts = 0;
        loop {
            attempts += 1;
            if let Some(t) = self.try_jump(rng) {
                return (t, attempts);
            }
        }
    }

    /// `Y(t)`.
    pub fn sample_at<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut clock = 0.0;
        let mut y = 0.0;
        loop {
            let e: f64 = rng.sample(Exp1);
            clock += e / self.rate;
            if clock > t {
                return y;
            }
            y += self.sample_jump(rng).0;
        }
    }

    pub fn psi(&self, q: Complex64) -> Result<Complex64> {
        psi_ladder(&self.parent, q)
    }
}

/// `log E exp(-q Y(1)) = mu+ - q / Phi(q)`, with value 0 at `q = 0`.
pub fn psi_ladder(proc: &RiskProcess, q: Complex64) -> Result<Complex64> {
    let mu_plus = proc.drift().max(0.0);
    if q == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let phi = proc.phi_inv(q)?;
    Ok(mu_plus - q / phi)
}

/// Acceptance rate of the ladder-jump sampler against its exact value `1 - mu/c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub estimate: McEstimate,
    pub expected: f64,
}

impl AcceptanceReport {
    pub fn z_score(&self) -> f64 {
        let se = (self.expected * (1.0 - self.expected) / self.estimate.n as f64).sqrt();
        (self.estimate.value - self.expected).abs() / se
    }
}

pub fn acceptance_rate(
    ladder: &LadderProcess,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<AcceptanceReport> {
    if ladder.is_zero() {
        return Err(Error::Precondition(
            "zero ladder process has no jumps to sample".into(),
        ));
    }
    let accepted = mc::count_paths(n, seed, workers, |rng, _| ladder.try_jump(rng).is_some());
    Ok(AcceptanceReport {
        estimate: McEstimate::from_bernoulli(accepted, n),
        expected: ladder.ruin_probability(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::L => "L",
            Side::R => "R",
        }
    }
}

/// `X_L` and `X_R` for an independent-streams model with `mu1, mu2 > 0`.
///
/// A disabled `r2` is allowed; the right process then does not exist and
/// only the left side is available.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryPair {
    y1: LadderProcess,
    y2: LadderProcess,
    r1: f64,
    r2: TransferCost,
    p_l: f64,
    p_r: Option<f64>,
}

impl AuxiliaryPair {
    pub fn new(model: &CoverageModel) -> Result<Self> {
        Self::with_cutoff(model, DEFAULT_REJECTION_CUTOFF)
    }

    pub fn with_cutoff(model: &CoverageModel, cutoff: f64) -> Result<Self> {
        if !model.is_independent() {
            return Err(Error::Precondition(
                "Wiener-Hopf factors need independent claim streams".into(),
            ));
        }
        let r1 = model.r1().finite().ok_or_else(|| {
            Error::Precondition("r1 = inf is not supported; swap the lines so that r2 = inf".into())
        })?;
        model.require_net_profit()?;
        let y1 = LadderProcess::new(model.line1(), cutoff)?;
        let y2 = LadderProcess::new(model.line2(), cutoff)?;
        let (m1, m2) = (model.line1().drift(), model.line2().drift());
        Ok(Self {
            y1,
            y2,
            r1,
            r2: model.r2(),
            p_l: m2.max(0.0) + r1 * m1.max(0.0),
            p_r: model.r2().finite().map(|r2| m1.max(0.0) + r2 * m2.max(0.0)),
        })
    }

    pub fn ladders(&self) -> (&LadderProcess, &LadderProcess) {
        (&self.y1, &self.y2)
    }

    pub fn has_side(&self, side: Side) -> bool {
        side == Side::L || self.p_r.is_some()
    }

    fn require(&self, side: Side) -> Result<()> {
        if self.has_side(side) {
            Ok(())
        } else {
            Err(Error::Precondition(
                "X_R does not exist when r2 = inf".into(),
            ))
        }
    }

    pub fn kill_rate(&self, side: Side) -> Result<f64> {
        self.require(side)?;
        Ok(match side {
            Side::L => self.p_l,
            Side::R => self.p_r.unwrap_or(f64::INFINITY),
        })
    }

    /// Time scalings `(a1, a2)` with `X(t) = Y1(a1 t) - Y2(a2 t)`.
    pub fn scalings(&self, side: Side) -> Result<(f64, f64)> {
        self.require(side)?;
        Ok(match side {
            Side::L => (self.r1, 1.0),
            Side::R => (1.0, self.r2.finite().unwrap_or(f64::INFINITY)),
        })
    }

    /// `psi_X(-w) = log E exp(-w X(1))` for purely imaginary `w`.
    pub fn psi_lr(&self, side: Side, w: Complex64) -> Result<Complex64> {
        if !w.is_finite() || w.re.abs() > 1e-12 * w.norm() {
            return Err(Error::Domain {
                what: "auxiliary Laplace exponent (imaginary axis only)",
                arg: format!("{w}"),
            });
        }
        let w = Complex64::new(0.0, w.im);
        let (a1, a2) = self.scalings(side)?;
        Ok(a1 * self.y1.psi(w)? + a2 * self.y2.psi(-w)?)
    }

    /// `X(1)` sampled directly, for checking [`Self::psi_lr`].
    pub fn sample_unit_increment<R: Rng + ?Sized>(&self, side: Side, rng: &mut R) -> Result<f64> {
        let (a1, a2) = self.scalings(side)?;
        Ok(self.y1.sample_at(a1, rng) - self.y2.sample_at(a2, rng))
    }

    /// Extremes of `X` on `[0, e_p]`.
    fn sample_extremes<R: Rng + ?Sized>(&self, side: Side, rng: &mut R) -> Extremes {
        let (a1, a2) = self.scalings(side).expect("side checked by caller");
        let p = self.kill_rate(side).expect("side checked by caller");
        let up = if self.y1.is_zero() {
            0.0
        } else {
            a1 * self.y1.rate()
        };
        let down = if self.y2.is_zero() {
            0.0
        } else {
            a2 * self.y2.rate()
        };
        let total = up + down;
        let mut out = Extremes::default();
        let e: f64 = rng.sample(Exp1);
        let horizon = e / p;
        if total == 0.0 {
            return out;
        }
        let (mut x, mut t) = (0.0, 0.0);
        loop {
            let e: f64 = rng.sample(Exp1);
            t += e / total;
            if t > horizon {
                return out;
            }
            if rng.random::<f64>() * total < up {
                let (j, k) = self.y1.sample_jump(rng);
                out.counts[0].0 += 1;
                out.counts[0].1 += k;
                x += j;
                out.sup = out.sup.max(x);
            } else {
                let (j, k) = self.y2.sample_jump(rng);
                out.counts[1].0 += 1;
                out.counts[1].1 += k;
                x -= j;
                out.inf = out.inf.min(x);
            }
        }
    }
}

#[derive(Debug, Default)]
struct Extremes {
    sup: f64,
    inf: f64,
    /// `(jumps, attempts)` per ladder process.
    counts: [(u64, u64); 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub rejection_cutoff: f64,
}

impl Default for WhConfig {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            seed: 42,
            workers: mc::default_workers(),
            rejection_cutoff: DEFAULT_REJECTION_CUTOFF,
        }
    }
}

/// Supremum and infimum samples of one auxiliary process at `e_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideSamples {
    pub kill_rate: f64,
    pub sup: Vec<f64>,
    pub inf: Vec<f64>,
}

impl SideSamples {
    pub fn len(&self) -> usize {
        self.sup.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sup.is_empty()
    }

    /// `Psi+(w) = E exp(-w sup)`, `Re(w) >= 0`.
    pub fn plus(&self, w: Complex64) -> Result<ComplexEstimate> {
        if w.re < 0.0 {
            return Err(Error::Domain {
                what: "Psi+ (needs Re w >= 0)",
                arg: format!("{w}"),
            });
        }
        Ok(ComplexEstimate::from_samples(
            self.sup.iter().map(|&x| (-w * x).exp()),
        ))
    }

    /// `Psi-(w) = E exp(-w inf)`, `Re(w) <= 0`.
    pub fn minus(&self, w: Complex64) -> Result<ComplexEstimate> {
        if w.re > 0.0 {
            return Err(Error::Domain {
                what: "Psi- (needs Re w <= 0)",
                arg: format!("{w}"),
            });
        }
        Ok(ComplexEstimate::from_samples(
            self.inf.iter().map(|&x| (-w * x).exp()),
        ))
    }

    /// `Psi+(inf) = P(sup = 0)`.
    pub fn plus_tail(&self) -> McEstimate {
        McEstimate::from_bernoulli(
            self.sup.iter().filter(|&&x| x == 0.0).count() as u64,
            self.len() as u64,
        )
    }

    /// `Psi-(-inf) = P(inf = 0)`.
    pub fn minus_tail(&self) -> McEstimate {
        McEstimate::from_bernoulli(
            self.inf.iter().filter(|&&x| x == 0.0).count() as u64,
            self.len() as u64,
        )
    }

    /// `Psi+(w) Psi-(w)` with a standard error that accounts for the
    /// correlation of `sup` and `inf` on the same path.
    pub fn product(&self, w: Complex64) -> ComplexEstimate {
        let a: Vec<Complex64> = self.sup.iter().map(|&x| (-w * x).exp()).collect();
        let b: Vec<Complex64> = self.inf.iter().map(|&x| (-w * x).exp()).collect();
        let n = a.len() as f64;
        let ma = a.iter().sum::<Complex64>() / n;
        let mb = b.iter().sum::<Complex64>() / n;
        let ss: f64 = a
            .iter()
            .zip(&b)
            .map(|(ai, bi)| ((ai - ma) * mb + ma * (bi - mb)).norm_sqr())
            .sum();
        ComplexEstimate {
            value: ma * mb,
            std_error: (ss / (n * (n - 1.0).max(1.0))).sqrt(),
            n: a.len() as u64,
        }
    }
}

/// Rejection counts of the ladder-jump sampler for one line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderDiagnostics {
    pub jumps: u64,
    pub attempts: u64,
    pub expected_acceptance: f64,
}

impl LadderDiagnostics {
    pub fn acceptance(&self) -> Option<McEstimate> {
        (self.attempts > 0).then(|| McEstimate::from_bernoulli(self.jumps, self.attempts))
    }

    /// Deviation of the acceptance rate from `1 - mu/c` in standard errors.
    pub fn z_score(&self) -> Option<f64> {
        let est = self.acceptance()?;
        let p = self.expected_acceptance;
        let se = (p * (1.0 - p) / self.attempts as f64).sqrt();
        Some(if se == 0.0 {
            0.0
        } else {
            (est.value - p).abs() / se
        })
    }
}

/// Monte-Carlo Wiener–Hopf factors of `X_L` and (if it exists) `X_R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerHopfFactors {
    pub left: SideSamples,
    pub right: Option<SideSamples>,
    pub ladder1: LadderDiagnostics,
    pub ladder2: LadderDiagnostics,
}

impl WienerHopfFactors {
    pub fn side(&self, side: Side) -> Result<&SideSamples> {
        match side {
            Side::L => Ok(&self.left),
            Side::R => self
                .right
                .as_ref()
                .ok_or_else(|| Error::Precondition("X_R does not exist when r2 = inf".into())),
        }
    }

    /// Lines whose acceptance rate is more than 3 SE from `1 - mu/c`.
    pub fn acceptance_warnings(&self) -> Vec<String> {
        [("line 1", &self.ladder1), ("line 2", &self.ladder2)]
            .into_iter()
            .filter_map(|(name, d)| {
                let z = d.z_score()?;
                (z > 3.0).then(|| {
                    format!(
                        "{name}: ladder acceptance {:.4} vs expected {:.4} ({z:.1} SE); raise the rejection cutoff",
                        d.acceptance().map_or(f64::NAN, |e| e.value),
                        d.expected_acceptance
                    )
                })
            })
            .collect()
    }
}

pub fn estimate_wh(pair: &AuxiliaryPair, cfg: &WhConfig) -> Result<WienerHopfFactors> {
    if cfg.n_samples < 2 {
        return Err(Error::InvalidParameter("n_samples must be >= 2".into()));
    }
    let (y1, y2) = pair.ladders();
    let diag = |ladder: &LadderProcess| LadderDiagnostics {
        jumps: 0,
        attempts: 0,
        expected_acceptance: if ladder.is_zero() {
            1.0
        } else {
            ladder.ruin_probability()
        },
    };
    let mut ladder1 = diag(y1);
    let mut ladder2 = diag(y2);
    let mut run = |side: Side, label: &str| -> Result<SideSamples> {
        let kill_rate = pair.kill_rate(side)?;
        let seed = mc::derive_seed(cfg.seed, label);
        let draws = mc::map_paths(cfg.n_samples, seed, cfg.workers, |rng, _| {
            pair.sample_extremes(side, rng)
        });
        for d in &draws {
            ladder1.jumps += d.counts[0].0;
            ladder1.attempts += d.counts[0].1;
            ladder2.jumps += d.counts[1].0;
            ladder2.attempts += d.counts[1].1;
        }
        Ok(SideSamples {
            kill_rate,
            sup: draws.iter().map(|d| d.sup).collect(),
            inf: draws.iter().map(|d| d.inf).collect(),
        })
    };
    let left = run(Side::L, "wh-left")?;
    let right = if pair.has_side(Side::R) {
        Some(run(Side::R, "wh-right")?)
    } else {
        None
    };
    Ok(WienerHopfFactors {
        left,
        right,
        ladder1,
        ladder2,
    })
}

/// Anything that can supply the four Wiener–Hopf factors and their tails.
///
/// `plus` takes `Re(w) >= 0` and `minus` takes `Re(w) <= 0`.
pub trait FactorSource {
    fn plus(&self, side: Side, w: Complex64) -> Result<Complex64>;
    fn minus(&self, side: Side, w: Complex64) -> Result<Complex64>;
    fn plus_tail(&self, side: Side) -> Result<f64>;
    fn minus_tail(&self, side: Side) -> Result<f64>;

    /// Raw samples behind a Monte-Carlo source, used for error propagation.
    fn samples(&self, _side: Side) -> Option<&SideSamples> {
        None
    }
}

impl FactorSource for WienerHopfFactors {
    fn plus(&self, side: Side, w: Complex64) -> Result<Complex64> {
        Ok(self.side(side)?.plus(w)?.value)
    }

    fn minus(&self, side: Side, w: Complex64) -> Result<Complex64> {
        Ok(self.side(side)?.minus(w)?.value)
    }

    fn plus_tail(&self, side: Side) -> Result<f64> {
        Ok(self.side(side)?.plus_tail().value)
    }

    fn minus_tail(&self, side: Side) -> Result<f64> {
        Ok(self.side(side)?.minus_tail().value)
    }

    fn samples(&self, side: Side) -> Option<&SideSamples> {
        self.side(side).ok()
    }
}

/// Exact factors when line 2 is a pure premium drift (a surplus note).
///
/// Then `Y2` vanishes, `X_L`, `X_R` have no negative jumps, both `Psi-` are 1,
/// `Psi_L+(w) = p_L / (mu2 + r1 w/Phi1(w))` and
/// `Psi_R+(w) = p_R / (r2 mu2 + w/Phi1(w))`. With `r2 = inf` the right
/// factors are identically 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SurplusNoteFactors {
    line1: RiskProcess,
    mu1: f64,
    mu2: f64,
    r1: f64,
    r2: Option<f64>,
}

impl SurplusNoteFactors {
    pub fn new(model: &CoverageModel) -> Result<Self> {
        if model.line2().has_claims() || !model.is_independent() {
            return Err(Error::Precondition(
                "closed-form factors need line 2 to be a pure drift".into(),
            ));
        }
        let r1 = model
            .r1()
            .finite()
            .ok_or_else(|| Error::Precondition("closed-form factors need a finite r1".into()))?;
        model.require_net_profit()?;
        Ok(Self {
            line1: model.line1().clone(),
            mu1: model.line1().drift(),
            mu2: model.line2().premium(),
            r1,
            r2: model.r2().finite(),
        })
    }

    pub fn p_l(&self) -> f64 {
        self.mu2 + self.r1 * self.mu1.max(0.0)
    }

    pub fn p_r(&self) -> Option<f64> {
        self.r2.map(|r2| self.mu1.max(0.0) + r2 * self.mu2)
    }

    /// `w / Phi1(w)`, continuous at 0.
    fn ratio(&self, w: Complex64) -> Result<Complex64> {
        if w == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(self.mu1.max(0.0), 0.0));
        }
        Ok(w / self.line1.phi_inv(w)?)
    }
}

impl FactorSource for SurplusNoteFactors {
    fn plus(&self, side: Side, w: Complex64) -> Result<Complex64> {
        let g = self.ratio(w)?;
        Ok(match (side, self.r2) {
            (Side::L, _) => self.p_l() / (self.mu2 + self.r1 * g),
            (Side::R, Some(r2)) => self.p_r().unwrap_or(1.0) / (r2 * self.mu2 + g),
            (Side::R, None) => Complex64::new(1.0, 0.0),
        })
    }

    fn minus(&self, _side: Side, w: Complex64) -> Result<Complex64> {
        if w.re > 0.0 || !w.is_finite() {
            return Err(Error::Domain {
                what: "Psi- (needs Re w <= 0)",
                arg: format!("{w}"),
            });
        }
        Ok(Complex64::new(1.0, 0.0))
    }

    fn plus_tail(&self, side: Side) -> Result<f64> {
        let c1 = self.line1.premium();
        Ok(match (side, self.r2) {
            (Side::L, _) => self.p_l() / (self.mu2 + self.r1 * c1),
            (Side::R, Some(r2)) => self.p_r().unwrap_or(1.0) / (r2 * self.mu2 + c1),
            (Side::R, None) => 1.0,
        })
    }

    fn minus_tail(&self, _side: Side) -> Result<f64> {
        Ok(1.0)
    }
}

/// Exact factors when line 1 is a pure premium drift and line 2 carries the claims.
///
/// Now `Y1` vanishes, so `X_L = -Y2(t)` and `X_R = -Y2(r2 t)` never rise:
/// both `Psi+` are 1, `Psi_L-(-v) = p_L / (r1 c1 + v/Phi2(v))` and
/// `Psi_R-(-v) = p_R / (c1 + r2 v/Phi2(v))`. With `r2 = inf` the right
/// factors are identically 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftFirstLineFactors {
    line2: RiskProcess,
    c1: f64,
    mu2: f64,
    r1: f64,
    r2: Option<f64>,
}

impl DriftFirstLineFactors {
    pub fn new(model: &CoverageModel) -> Result<Self> {
        if model.line1().has_claims() || !model.is_independent() {
            return Err(Error::Precondition(
                "closed-form factors need line 1 to be a pure drift".into(),
            ));
        }
        let r1 = model
            .r1()
            .finite()
            .ok_or_else(|| Error::Precondition("closed-form factors need a finite r1".into()))?;
        model.require_net_profit()?;
        Ok(Self {
            line2: model.line2().clone(),
            c1: model.line1().premium(),
            mu2: model.line2().drift(),
            r1,
            r2: model.r2().finite(),
        })
    }

    pub fn p_l(&self) -> f64 {
        self.mu2.max(0.0) + self.r1 * self.c1
    }

    pub fn p_r(&self) -> Option<f64> {
        self.r2.map(|r2| self.c1 + r2 * self.mu2.max(0.0))
    }

    /// `v / Phi2(v)`, continuous at 0.
    fn ratio(&self, v: Complex64) -> Result<Complex64> {
        if v == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(self.mu2.max(0.0), 0.0));
        }
        Ok(v / self.line2.phi_inv(v)?)
    }

    fn from_ratio(&self, side: Side, g: Complex64) -> Complex64 {
        match (side, self.r2) {
            (Side::L, _) => self.p_l() / (self.r1 * self.c1 + g),
            (Side::R, Some(r2)) => self.p_r().unwrap_or(1.0) / (self.c1 + r2 * g),
            (Side::R, None) => Complex64::new(1.0, 0.0),
        }
    }
}

impl FactorSource for DriftFirstLineFactors {
    fn plus(&self, _side: Side, w: Complex64) -> Result<Complex64> {
        if w.re < 0.0 || !w.is_finite() {
            return Err(Error::Domain {
                what: "Psi+ (needs Re w >= 0)",
                arg: format!("{w}"),
            });
        }
        Ok(Complex64::new(1.0, 0.0))
    }

    fn minus(&self, side: Side, w: Complex64) -> Result<Complex64> {
        if w.re > 0.0 || !w.is_finite() {
            return Err(Error::Domain {
                what: "Psi- (needs Re w <= 0)",
                arg: format!("{w}"),
            });
        }
        Ok(self.from_ratio(side, self.ratio(-w)?))
    }

    fn plus_tail(&self, _side: Side) -> Result<f64> {
        Ok(1.0)
    }

    fn minus_tail(&self, side: Side) -> Result<f64> {
        Ok(self
            .from_ratio(side, Complex64::new(self.line2.premium(), 0.0))
            .re)
    }
}

/// Uses the left factors for both sides. Exact when `r1 r2 = 1`, since then
/// `X_R(e_{p_R})` and `X_L(e_{p_L})` have the same law.
#[derive(Debug, Clone, Copy)]
pub struct Mirrored<'a, S: FactorSource + ?Sized>(pub &'a S);

impl<S: FactorSource + ?Sized> FactorSource for Mirrored<'_, S> {
    fn plus(&self, _side: Side, w: Complex64) -> Result<Complex64> {
        self.0.plus(Side::L, w)
    }

    fn minus(&self, _side: Side, w: Complex64) -> Result<Complex64> {
        self.0.minus(Side::L, w)
    }

    fn plus_tail(&self, _side: Side) -> Result<f64> {
        self.0.plus_tail(Side::L)
    }

    fn minus_tail(&self, _side: Side) -> Result<f64> {
        self.0.minus_tail(Side::L)
    }
}

/// Writes the raw samples as CSV rows `process,bound,value`.
pub fn write_factor_samples<W: Write>(
    out: &mut W,
    factors: &WienerHopfFactors,
) -> std::io::Result<()> {
    writeln!(out, "process,bound,value")?;
    for (name, samples) in [("L", Some(&factors.left)), ("R", factors.right.as_ref())] {
        let Some(samples) = samples else { continue };
        for x in &samples.sup {
            writeln!(out, "{name},sup,{x}")?;
        }
        for x in &samples.inf {
            writeln!(out, "{name},inf,{x}")?;
        }
    }
    Ok(())
}
