//! Exact event-driven simulation of the coupled surplus process.
//!
//! Between claims both surpluses grow linearly, so transfers and ruin can only
//! happen at claim epochs. Each claim is resolved by [`apply_claim`], which
//! implements the six-case recursion for the cumulative transfer processes
//! `L1, L2` and external-capital processes `E1, E2`. Ruin is the first epoch
//! at which `E1 + E2` becomes positive.

use std::io::Write;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::distributions::{JointAtom, JointClaimDistribution};
use crate::error::{Error, Result};
use crate::mc::{self, McEstimate};
use crate::risk_model::{CoverageModel, TransferCost};

pub const DEFAULT_HORIZON: f64 = 2000.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SurplusState {
    pub t: f64,
    pub s1: f64,
    pub s2: f64,
    pub l1: f64,
    pub l2: f64,
    pub e1: f64,
    pub e2: f64,
    pub ruined: bool,
}

impl SurplusState {
    pub fn start(u: f64, v: f64) -> Self {
        Self {
            s1: u,
            s2: v,
            ..Self::default()
        }
    }
}

/// Resolves one claim of sizes `(jump1, jump2)` against the pre-claim state.
///
/// A line pushed below zero is restored to zero by the other line at cost
/// `r` per unit if it can afford it; whatever it cannot cover comes from
/// outside (`E`) and marks ruin. A disabled direction never transfers, so
/// the whole deficit goes to `E` and the would-be rescuer keeps its capital.
pub fn apply_claim(
    state: &SurplusState,
    jump1: f64,
    jump2: f64,
    r1: TransferCost,
    r2: TransferCost,
) -> SurplusState {
    let mut next = *state;
    let x1 = state.s1 - jump1;
    let x2 = state.s2 - jump2;
    match (x1 >= 0.0, x2 >= 0.0) {
        (true, true) => {
            next.s1 = x1;
            next.s2 = x2;
        }
        (false, true) => rescue(
            x1,
            x2,
            r1,
            &mut next.l1,
            &mut next.e1,
            &mut next.s1,
            &mut next.s2,
        ),
        (true, false) => rescue(
            x2,
            x1,
            r2,
            &mut next.l2,
            &mut next.e2,
            &mut next.s2,
            &mut next.s1,
        ),
        (false, false) => {
            next.e1 += -x1;
            next.e2 += -x2;
            next.s1 = 0.0;
            next.s2 = 0.0;
        }
    }
    next.ruined = state.ruined || next.e1 + next.e2 > 0.0;
    next
}

/// `short < 0 <= other`: the short line is rescued by the other one.
fn rescue(
    short: f64,
    other: f64,
    cost: TransferCost,
    received: &mut f64,
    external: &mut f64,
    s_short: &mut f64,
    s_other: &mut f64,
) {
    *s_short = 0.0;
    match cost {
        TransferCost::Finite(r) if other + r * short >= 0.0 => {
            *received += -short;
            *s_other = other + r * short;
        }
        TransferCost::Finite(r) => {
            let covered = other / r;
            *received += covered;
            *external += -short - covered;
            *s_other = 0.0;
        }
        TransferCost::Disabled => {
            *external += -short;
            *s_other = other;
        }
    }
}

/// First reflection condition broken by a transition, if any.
pub fn transition_violation(
    prev: &SurplusState,
    next: &SurplusState,
    r1: TransferCost,
    r2: TransferCost,
) -> Option<&'static str> {
    let dl1 = next.l1 > prev.l1;
    let dl2 = next.l2 > prev.l2;
    let de1 = next.e1 > prev.e1;
    let de2 = next.e2 > prev.e2;
    // with the rescue direction closed, E_i only requires S_i = 0
    let e1_ok = next.s1 == 0.0 && (next.s2 == 0.0 || r1.is_disabled());
    let e2_ok = next.s2 == 0.0 && (next.s1 == 0.0 || r2.is_disabled());
    if !(next.s1 >= 0.0 && next.s2 >= 0.0) {
        Some("negative surplus")
    } else if !(next.l1 >= prev.l1
        && next.l2 >= prev.l2
        && next.e1 >= prev.e1
        && next.e2 >= prev.e2)
    {
        Some("cumulative transfer decreased")
    } else if dl1 && next.s1 != 0.0 {
        Some("L1 increased while S1 > 0")
    } else if dl2 && next.s2 != 0.0 {
        Some("L2 increased while S2 > 0")
    } else if de1 && !e1_ok {
        Some("E1 increased outside the corner")
    } else if de2 && !e2_ok {
        Some("E2 increased outside the corner")
    } else if (dl1 && dl2) || (dl1 && de2) || (dl2 && de1) {
        Some("forbidden simultaneous increase")
    } else if (dl1 && r1.is_disabled()) || (dl2 && r2.is_disabled()) {
        Some("transfer through a disabled direction")
    } else {
        None
    }
}

/// Panics on a broken reflection condition; a failure is a bug.
pub fn check_transition(
    prev: &SurplusState,
    next: &SurplusState,
    r1: TransferCost,
    r2: TransferCost,
) {
    if let Some(what) = transition_violation(prev, next, r1, r2) {
        panic!("{what}: {prev:?} -> {next:?}");
    }
}

/// All claim streams of a model merged into one Poisson stream with
/// bivariate jumps.
#[derive(Debug, Clone)]
pub struct ClaimStream {
    rate: f64,
    law: Option<JointClaimDistribution>,
}

impl ClaimStream {
    pub fn compile(model: &CoverageModel) -> Result<Self> {
        let mut parts: Vec<(f64, JointAtom)> = Vec::new();
        for (idx, line) in [model.line1(), model.line2()].into_iter().enumerate() {
            if let Some(d) = line.claims() {
                let (first, second) = if idx == 0 {
                    (Some(d.clone()), None)
                } else {
                    (None, Some(d.clone()))
                };
                parts.push((
                    line.claim_rate(),
                    JointAtom {
                        weight: 0.0,
                        first,
                        second,
                    },
                ));
            }
        }
        if let Some(shock) = model.common_shock() {
            for atom in shock.law.atoms() {
                parts.push((shock.rate * atom.weight, atom.clone()));
            }
        }
        let rate: f64 = parts.iter().map(|(r, _)| r).sum();
        if rate == 0.0 {
            return Ok(Self { rate, law: None });
        }
        let atoms = parts
            .into_iter()
            .map(|(r, mut atom)| {
                atom.weight = r / rate;
                atom
            })
            .collect();
        let law = JointClaimDistribution::new(atoms).map_err(|e| match e {
            Error::InvalidParameter(m) => Error::InvalidParameter(format!("claim stream: {m}")),
            other => other,
        })?;
        Ok(Self {
            rate,
            law: Some(law),
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn law(&self) -> Option<&JointClaimDistribution> {
        self.law.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub horizon: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub workers: usize,
    pub record_transfers: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            horizon: DEFAULT_HORIZON,
            n_paths: 10_000,
            seed: 42,
            workers: mc::default_workers(),
            record_transfers: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::InvalidParameter("n_paths must be >= 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Start,
    Claim,
    Cover1,
    Cover2,
    Ruin,
    Horizon,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Start => "start",
            Self::Claim => "claim",
            Self::Cover1 => "cover1",
            Self::Cover2 => "cover2",
            Self::Ruin => "ruin",
            Self::Horizon => "horizon",
        }
    }
}

/// One logged epoch. `x1`, `x2` are the free processes `c t - claims`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathEvent {
    pub kind: EventKind,
    pub jump1: f64,
    pub jump2: f64,
    pub x1: f64,
    pub x2: f64,
    pub state: SurplusState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    /// `None` when the path survives to the horizon.
    pub ruin_time: Option<f64>,
    pub final_state: SurplusState,
    pub claims: u64,
}

impl PathOutcome {
    pub fn survived(&self) -> bool {
        self.ruin_time.is_none()
    }
}

/// Simulates one path from `(u, v)` until ruin or `horizon`.
pub fn simulate_path<R: Rng + ?Sized>(
    model: &CoverageModel,
    stream: &ClaimStream,
    u: f64,
    v: f64,
    horizon: f64,
    rng: &mut R,
) -> PathOutcome {
    simulate_path_observed(model, stream, u, v, horizon, rng, |_| {})
}

/// Same as [`simulate_path`], reporting every epoch to `observe`.
pub fn simulate_path_observed<R, F>(
    model: &CoverageModel,
    stream: &ClaimStream,
    u: f64,
    v: f64,
    horizon: f64,
    rng: &mut R,
    mut observe: F,
) -> PathOutcome
where
    R: Rng + ?Sized,
    F: FnMut(&PathEvent),
{
    assert!(u >= 0.0 && v >= 0.0, "initial capitals must be nonnegative");
    let (c1, c2) = (model.line1().premium(), model.line2().premium());
    let (r1, r2) = (model.r1(), model.r2());
    let mut state = SurplusState::start(u, v);
    let (mut x1, mut x2) = (0.0, 0.0);
    let mut claims = 0;
    observe(&PathEvent {
        kind: EventKind::Start,
        jump1: 0.0,
        jump2: 0.0,
        x1,
        x2,
        state,
    });
    let law = match stream.law() {
        Some(law) => law,
        None => {
            state.t = horizon;
            state.s1 += c1 * horizon;
            state.s2 += c2 * horizon;
            observe(&PathEvent {
                kind: EventKind::Horizon,
                jump1: 0.0,
                jump2: 0.0,
                x1: c1 * horizon,
                x2: c2 * horizon,
                state,
            });
            return PathOutcome {
                ruin_time: None,
                final_state: state,
                claims,
            };
        }
    };
    let rate = stream.rate();
    loop {
        let e: f64 = rng.sample(Exp1);
        let dt = e / rate;
        if state.t + dt > horizon {
            let rest = horizon - state.t;
            state.s1 += c1 * rest;
            state.s2 += c2 * rest;
            x1 += c1 * rest;
            x2 += c2 * rest;
            state.t = horizon;
            observe(&PathEvent {
                kind: EventKind::Horizon,
                jump1: 0.0,
                jump2: 0.0,
                x1,
                x2,
                state,
            });
            return PathOutcome {
                ruin_time: None,
                final_state: state,
                claims,
            };
        }
        state.t += dt;
        state.s1 += c1 * dt;
        state.s2 += c2 * dt;
        x1 += c1 * dt;
        x2 += c2 * dt;
        let (j1, j2) = law.sample(rng);
        x1 -= j1;
        x2 -= j2;
        claims += 1;
        let next = apply_claim(&state, j1, j2, r1, r2);
        check_transition(&state, &next, r1, r2);
        let kind = if next.ruined {
            EventKind::Ruin
        } else if next.l1 > state.l1 {
            EventKind::Cover1
        } else if next.l2 > state.l2 {
            EventKind::Cover2
        } else {
            EventKind::Claim
        };
        state = next;
        observe(&PathEvent {
            kind,
            jump1: j1,
            jump2: j2,
            x1,
            x2,
            state,
        });
        if state.ruined {
            return PathOutcome {
                ruin_time: Some(state.t),
                final_state: state,
                claims,
            };
        }
    }
}

/// Mean cumulative transfers per path, recorded when `SimConfig::record_transfers` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferSummary {
    pub mean_l1: f64,
    pub mean_l2: f64,
    pub mean_claims: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalReport {
    pub estimate: McEstimate,
    pub transfers: Option<TransferSummary>,
}

/// Probability of no ruin before the horizon, started from `(u, v)`.
pub fn estimate_survival(
    model: &CoverageModel,
    u: f64,
    v: f64,
    cfg: &SimConfig,
) -> Result<McEstimate> {
    Ok(survival_report(model, u, v, cfg)?.estimate)
}

pub fn survival_report(
    model: &CoverageModel,
    u: f64,
    v: f64,
    cfg: &SimConfig,
) -> Result<SurvivalReport> {
    cfg.validate()?;
    check_capital(u, v)?;
    let stream = ClaimStream::compile(model)?;
    if !cfg.record_transfers {
        let survived = mc::count_paths(cfg.n_paths, cfg.seed, cfg.workers, |rng, _| {
            simulate_path(model, &stream, u, v, cfg.horizon, rng).survived()
        });
        return Ok(SurvivalReport {
            estimate: McEstimate::from_bernoulli(survived, cfg.n_paths),
            transfers: None,
        });
    }
    let outcomes = mc::map_paths(cfg.n_paths, cfg.seed, cfg.workers, |rng, _| {
        simulate_path(model, &stream, u, v, cfg.horizon, rng)
    });
    let n = outcomes.len() as f64;
    let survived = outcomes.iter().filter(|o| o.survived()).count() as u64;
    Ok(SurvivalReport {
        estimate: McEstimate::from_bernoulli(survived, cfg.n_paths),
        transfers: Some(TransferSummary {
            mean_l1: outcomes.iter().map(|o| o.final_state.l1).sum::<f64>() / n,
            mean_l2: outcomes.iter().map(|o| o.final_state.l2).sum::<f64>() / n,
            mean_claims: outcomes.iter().map(|o| o.claims as f64).sum::<f64>() / n,
        }),
    })
}

fn check_capital(u: f64, v: f64) -> Result<()> {
    if u.is_finite() && v.is_finite() && u >= 0.0 && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "initial capitals must be >= 0, got ({u}, {v})"
        )))
    }
}

/// Survival at the horizon and at twice the horizon on the same paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonCheck {
    pub at_horizon: McEstimate,
    pub at_double: McEstimate,
    /// Fraction of paths ruined in `(T, 2T]`; the truncation bias at `T` is at least this.
    pub ruined_between: McEstimate,
}

pub fn horizon_check(
    model: &CoverageModel,
    u: f64,
    v: f64,
    cfg: &SimConfig,
) -> Result<HorizonCheck> {
    cfg.validate()?;
    check_capital(u, v)?;
    let stream = ClaimStream::compile(model)?;
    let horizon = cfg.horizon;
    let times = mc::map_paths(cfg.n_paths, cfg.seed, cfg.workers, |rng, _| {
        simulate_path(model, &stream, u, v, 2.0 * horizon, rng).ruin_time
    });
    let alive_t = times
        .iter()
        .filter(|t| t.is_none_or(|t| t > horizon))
        .count() as u64;
    let alive_2t = times.iter().filter(|t| t.is_none()).count() as u64;
    Ok(HorizonCheck {
        at_horizon: McEstimate::from_bernoulli(alive_t, cfg.n_paths),
        at_double: McEstimate::from_bernoulli(alive_2t, cfg.n_paths),
        ruined_between: McEstimate::from_bernoulli(alive_t - alive_2t, cfg.n_paths),
    })
}

/// Monte-Carlo estimates of the measure transforms
/// `F^(s1,s2) = E phi(e_s1, e_s2)`, `F^_1(s1) = E phi(e_s1, 0)` and
/// `F^_2(s2) = E phi(0, e_s2)`, with exponential initial capitals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformEstimates {
    pub joint: McEstimate,
    pub boundary1: McEstimate,
    pub boundary2: McEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapitalDraw {
    Both,
    FirstOnly,
    SecondOnly,
}

/// Survival with initial capitals drawn per path: exponential of rate `s_i`
/// in the coordinates selected by `draw`, zero in the others.
pub fn estimate_exponential_capital(
    model: &CoverageModel,
    s1: f64,
    s2: f64,
    draw: CapitalDraw,
    cfg: &SimConfig,
) -> Result<McEstimate> {
    cfg.validate()?;
    let uses1 = draw != CapitalDraw::SecondOnly;
    let uses2 = draw != CapitalDraw::FirstOnly;
    for (used, s) in [(uses1, s1), (uses2, s2)] {
        if used && !(s.is_finite() && s > 0.0) {
            return Err(Error::Domain {
                what: "exponential initial capital rate",
                arg: format!("{s}"),
            });
        }
    }
    let stream = ClaimStream::compile(model)?;
    let survived = mc::count_paths(cfg.n_paths, cfg.seed, cfg.workers, |rng, _| {
        let e1: f64 = rng.sample(Exp1);
        let e2: f64 = rng.sample(Exp1);
        let u = if uses1 { e1 / s1 } else { 0.0 };
        let v = if uses2 { e2 / s2 } else { 0.0 };
        simulate_path(model, &stream, u, v, cfg.horizon, rng).survived()
    });
    Ok(McEstimate::from_bernoulli(survived, cfg.n_paths))
}

/// The three transforms from independent path sets.
pub fn estimate_transforms(
    model: &CoverageModel,
    s1: f64,
    s2: f64,
    cfg: &SimConfig,
) -> Result<TransformEstimates> {
    let sub = |label| cfg.with_seed(mc::derive_seed(cfg.seed, label));
    Ok(TransformEstimates {
        joint: estimate_exponential_capital(
            model,
            s1,
            s2,
            CapitalDraw::Both,
            &sub("transform-joint"),
        )?,
        boundary1: estimate_exponential_capital(
            model,
            s1,
            s2,
            CapitalDraw::FirstOnly,
            &sub("transform-first"),
        )?,
        boundary2: estimate_exponential_capital(
            model,
            s1,
            s2,
            CapitalDraw::SecondOnly,
            &sub("transform-second"),
        )?,
    })
}

/// Writes a path log as CSV (`t,event,S1,S2,L1,L2,E1,E2`).
pub fn write_path_log<W: Write>(out: &mut W, events: &[PathEvent]) -> std::io::Result<()> {
    writeln!(out, "t,event,S1,S2,L1,L2,E1,E2")?;
    for ev in events {
        let s = &ev.state;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.t,
            ev.kind.as_str(),
            s.s1,
            s.s2,
            s.l1,
            s.l2,
            s.e1,
            s.e2
        )?;
    }
    Ok(())
}

/// Largest violation of `S = start + X - r_other L_other + L_own + E_own` over a logged path.
pub fn accounting_residual(
    r1: TransferCost,
    r2: TransferCost,
    u: f64,
    v: f64,
    events: &[PathEvent],
) -> f64 {
    let cost = |r: TransferCost| r.finite().unwrap_or(0.0);
    let (r1, r2) = (cost(r1), cost(r2));
    events
        .iter()
        .map(|ev| {
            let s = &ev.state;
            let d1 = u + ev.x1 - r2 * s.l2 + s.l1 + s.e1 - s.s1;
            let d2 = v + ev.x2 - r1 * s.l1 + s.l2 + s.e2 - s.s2;
            d1.abs().max(d2.abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ClaimDistribution;
    use crate::mc::path_rng;
    use crate::risk_model::RiskProcess;
    use proptest::prelude::*;

    const F: fn(f64) -> TransferCost = TransferCost::Finite;

    fn st(s1: f64, s2: f64) -> SurplusState {
        SurplusState::start(s1, s2)
    }

    fn det(x: f64) -> ClaimDistribution {
        ClaimDistribution::deterministic(x).unwrap()
    }

    fn model(l1: f64, l2: f64, r1: TransferCost, r2: TransferCost) -> CoverageModel {
        let line = |l: f64| {
            if l == 0.0 {
                RiskProcess::pure_drift(1.0).unwrap()
            } else {
                RiskProcess::compound_poisson(1.0, l, det(1.0)).unwrap()
            }
        };
        CoverageModel::new(line(l1), line(l2), r1, r2).unwrap()
    }

    #[test]
    fn no_transfer_when_both_stay_nonnegative() {
        let s = apply_claim(&st(3.0, 2.0), 1.0, 2.0, F(1.5), F(1.5));
        assert_eq!(
            (s.s1, s.s2, s.l1, s.l2, s.e1, s.e2, s.ruined),
            (2.0, 0.0, 0.0, 0.0, 0.0, 0.0, false)
        );
    }

    #[test]
    fn full_cover_by_the_other_line() {
        // x1 = -1, x2 + r1 x1 = 5 - 2 = 3
        let s = apply_claim(&st(1.0, 5.0), 2.0, 0.0, F(2.0), F(1.0));
        assert_eq!(
            (s.s1, s.s2, s.l1, s.e1, s.ruined),
            (0.0, 3.0, 1.0, 0.0, false)
        );
        let s = apply_claim(&st(5.0, 1.0), 0.0, 2.0, F(1.0), F(2.0));
        assert_eq!(
            (s.s1, s.s2, s.l2, s.e2, s.ruined),
            (3.0, 0.0, 1.0, 0.0, false)
        );
    }

    #[test]
    fn partial_cover_then_external_capital() {
        // x1 = -2, x2 = 1: L1 gets x2/r1 = 1, E1 gets -x1 - x2/r1 = 1
        let s = apply_claim(&st(1.0, 1.0), 3.0, 0.0, F(1.0), F(1.0));
        assert_eq!(
            (s.s1, s.s2, s.l1, s.e1, s.ruined),
            (0.0, 0.0, 1.0, 1.0, true)
        );
        let s = apply_claim(&st(1.0, 1.0), 0.0, 3.0, F(1.0), F(2.0));
        assert_eq!(
            (s.s1, s.s2, s.l2, s.e2, s.ruined),
            (0.0, 0.0, 0.5, 1.5, true)
        );
    }

    #[test]
    fn both_short_is_ruin() {
        let s = apply_claim(&st(1.0, 1.0), 2.0, 4.0, F(1.0), F(1.0));
        assert_eq!(
            (s.e1, s.e2, s.l1, s.l2, s.ruined),
            (1.0, 3.0, 0.0, 0.0, true)
        );
    }

    #[test]
    fn exact_zero_counts_as_covered() {
        let s = apply_claim(&st(1.0, 2.0), 2.0, 0.0, F(2.0), F(1.0));
        assert_eq!((s.s1, s.s2, s.l1, s.ruined), (0.0, 0.0, 1.0, false));
        let s = apply_claim(&st(1.0, 1.0), 1.0, 0.0, F(2.0), F(1.0));
        assert_eq!((s.s1, s.l1), (0.0, 0.0));
    }

    #[test]
    fn disabled_direction_uses_external_capital() {
        let s = apply_claim(&st(1.0, 5.0), 2.0, 0.0, TransferCost::Disabled, F(1.0));
        assert_eq!(
            (s.s1, s.s2, s.l1, s.e1, s.ruined),
            (0.0, 5.0, 0.0, 1.0, true)
        );
        let s = apply_claim(&st(5.0, 1.0), 0.0, 2.0, F(1.0), TransferCost::Disabled);
        assert_eq!(
            (s.s1, s.s2, s.l2, s.e2, s.ruined),
            (5.0, 0.0, 0.0, 1.0, true)
        );
    }

    #[test]
    fn pure_drift_always_survives() {
        let m = model(0.0, 0.0, F(1.0), F(1.0));
        let cfg = SimConfig {
            n_paths: 50,
            workers: 1,
            ..SimConfig::default()
        };
        assert_eq!(estimate_survival(&m, 0.0, 0.0, &cfg).unwrap().value, 1.0);
    }

    #[test]
    fn forced_ruin_at_first_arrival() {
        let pd = || RiskProcess::pure_drift(1.0).unwrap();
        let m = CoverageModel::new(pd(), pd(), F(1.0), F(1.0))
            .unwrap()
            .with_common_shock(
                2.0,
                JointClaimDistribution::common_shock(det(1e6), det(1e6)).unwrap(),
            )
            .unwrap();
        let stream = ClaimStream::compile(&m).unwrap();
        for i in 0..100 {
            let out = simulate_path(&m, &stream, 0.5, 0.5, 1e9, &mut path_rng(3, i));
            assert!(out.ruin_time.is_some());
            assert_eq!(out.claims, 1);
        }
    }

    #[test]
    fn violating_model_is_ruined_eventually() {
        let m = model(1.2, 1.3, F(1.0), F(1.0));
        assert!(!m.net_profit().holds());
        let cfg = SimConfig {
            n_paths: 500,
            horizon: 1e4,
            workers: 1,
            seed: 5,
            record_transfers: false,
        };
        assert!(estimate_survival(&m, 0.0, 0.0, &cfg).unwrap().value <= 0.01);
    }

    #[test]
    fn deterministic_for_seed_and_workers() {
        let m = model(0.5, 0.9, F(1.1), F(1.1));
        let cfg = SimConfig {
            n_paths: 2000,
            horizon: 200.0,
            workers: 1,
            seed: 17,
            record_transfers: false,
        };
        let a = estimate_survival(&m, 0.5, 0.5, &cfg).unwrap();
        let b = estimate_survival(&m, 0.5, 0.5, &SimConfig { workers: 3, ..cfg }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn record_transfers_reports_means() {
        let m = model(0.5, 0.9, F(1.1), F(1.1));
        let cfg = SimConfig {
            n_paths: 500,
            horizon: 50.0,
            workers: 1,
            seed: 2,
            record_transfers: true,
        };
        let rep = survival_report(&m, 0.0, 0.0, &cfg).unwrap();
        let t = rep.transfers.unwrap();
        assert!(t.mean_l1 > 0.0 && t.mean_l2 > 0.0 && t.mean_claims > 0.0);
        assert_eq!(
            rep.estimate,
            estimate_survival(
                &m,
                0.0,
                0.0,
                &SimConfig {
                    record_transfers: false,
                    ..cfg
                }
            )
            .unwrap()
        );
    }

    #[test]
    fn horizon_check_is_coupled() {
        let m = model(0.5, 0.9, F(1.1), F(1.1));
        let cfg = SimConfig {
            n_paths: 2000,
            horizon: 20.0,
            workers: 1,
            seed: 8,
            record_transfers: false,
        };
        let h = horizon_check(&m, 0.0, 0.0, &cfg).unwrap();
        assert!(h.at_double.value <= h.at_horizon.value);
        assert!((h.at_horizon.value - h.at_double.value - h.ruined_between.value).abs() < 1e-12);
        assert_eq!(h.at_horizon, estimate_survival(&m, 0.0, 0.0, &cfg).unwrap());
    }

    #[test]
    fn invalid_inputs() {
        let m = model(0.5, 0.9, F(1.1), F(1.1));
        let cfg = SimConfig {
            n_paths: 0,
            ..SimConfig::default()
        };
        assert!(estimate_survival(&m, 0.0, 0.0, &cfg).is_err());
        let cfg = SimConfig {
            horizon: -1.0,
            ..SimConfig::default()
        };
        assert!(estimate_survival(&m, 0.0, 0.0, &cfg).is_err());
        assert!(estimate_survival(&m, -1.0, 0.0, &SimConfig::default()).is_err());
        assert!(estimate_transforms(&m, 0.0, 1.0, &SimConfig::default()).is_err());
    }

    #[test]
    fn path_log_csv() {
        let m = model(0.5, 0.9, F(1.1), F(1.1));
        let stream = ClaimStream::compile(&m).unwrap();
        let mut events = Vec::new();
        simulate_path_observed(&m, &stream, 0.0, 0.0, 10.0, &mut path_rng(1, 0), |e| {
            events.push(*e)
        });
        let mut buf = Vec::new();
        write_path_log(&mut buf, &events).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,event,S1,S2,L1,L2,E1,E2\n0,start,"));
        assert_eq!(text.lines().count(), events.len() + 1);
    }

    fn arb_model() -> impl Strategy<Value = CoverageModel> {
        (
            0.1f64..2.0,
            0.1f64..2.0,
            0.0f64..2.0,
            0.0f64..2.0,
            1.0f64..3.0,
            0.34f64..1.0,
            any::<bool>(),
            0u8..3,
        )
            .prop_map(|(c1, c2, l1, l2, r1, frac, exp_claims, disable)| {
                let law = if exp_claims {
                    ClaimDistribution::exponential(1.3).unwrap()
                } else {
                    det(0.8)
                };
                let line = |c, l| {
                    if l < 0.05 {
                        RiskProcess::pure_drift(c).unwrap()
                    } else {
                        RiskProcess::compound_poisson(c, l, law.clone()).unwrap()
                    }
                };
                let r2 = (1.0 / r1).max(frac * 3.0);
                let (t1, t2) = match disable {
                    0 => (F(r1), F(r2)),
                    1 => (F(r1), TransferCost::Disabled),
                    _ => (TransferCost::Disabled, F(r2)),
                };
                let m = CoverageModel::new(line(c1, l1), line(c2, l2), t1, t2).unwrap();
                if l1 + l2 < 0.3 {
                    m.with_common_shock(
                        0.7,
                        JointClaimDistribution::common_shock(det(0.5), law.clone()).unwrap(),
                    )
                    .unwrap()
                } else {
                    m
                }
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn apply_claim_invariants(s1 in 0.0f64..5.0, s2 in 0.0f64..5.0, j1 in 0.0f64..8.0, j2 in 0.0f64..8.0,
                                  r1 in 0.5f64..3.0, r2 in 0.5f64..3.0, d1 in any::<bool>(), d2 in any::<bool>()) {
            let t1 = if d1 { TransferCost::Disabled } else { F(r1) };
            let t2 = if d2 { TransferCost::Disabled } else { F(r2) };
            let prev = st(s1, s2);
            let next = apply_claim(&prev, j1, j2, t1, t2);
            check_transition(&prev, &next, t1, t2);
            let d = accounting_residual(
                t1, t2, s1, s2,
                &[PathEvent { kind: EventKind::Claim, jump1: j1, jump2: j2, x1: -j1, x2: -j2, state: next }],
            );
            prop_assert!(d < 1e-12);
        }

        #[test]
        fn logged_paths_satisfy_accounting(m in arb_model(), u in 0.0f64..3.0, v in 0.0f64..3.0, seed in 0u64..1000) {
            let stream = ClaimStream::compile(&m).unwrap();
            let mut events = Vec::new();
            simulate_path_observed(&m, &stream, u, v, 300.0, &mut path_rng(seed, 0), |e| events.push(*e));
            prop_assert!(accounting_residual(m.r1(), m.r2(), u, v, &events) < 1e-9);
        }

        #[test]
        fn survival_is_monotone_in_capital(m in arb_model(), u in 0.0f64..3.0, v in 0.0f64..3.0,
                                           du in 0.0f64..2.0, dv in 0.0f64..2.0, seed in 0u64..1000) {
            let stream = ClaimStream::compile(&m).unwrap();
            for i in 0..20 {
                let low = simulate_path(&m, &stream, u, v, 100.0, &mut path_rng(seed, i));
                let high = simulate_path(&m, &stream, u + du, v + dv, 100.0, &mut path_rng(seed, i));
                prop_assert!(!low.survived() || high.survived());
            }
        }

        #[test]
        fn unit_cost_reduces_to_one_dimension(c1 in 0.3f64..2.0, c2 in 0.3f64..2.0, l1 in 0.1f64..2.0, l2 in 0.1f64..2.0,
                                              r2 in 0.25f64..4.0, u in 0.0f64..3.0, v in 0.0f64..3.0, seed in 0u64..1000) {
            let law = ClaimDistribution::exponential(1.0).unwrap();
            let m = CoverageModel::new(
                RiskProcess::compound_poisson(c1, l1, law.clone()).unwrap(),
                RiskProcess::compound_poisson(c2, l2, law).unwrap(),
                F(1.0 / r2), F(r2),
            ).unwrap().with_relaxed_costs();
            let stream = ClaimStream::compile(&m).unwrap();
            let mut events = Vec::new();
            let out = simulate_path_observed(&m, &stream, u, v, 200.0, &mut path_rng(seed, 0), |e| events.push(*e));
            // Z = X1 + r2 X2 started at u + r2 v: first passage below 0 is the ruin time
            let z = |e: &PathEvent| u + r2 * v + e.x1 + r2 * e.x2;
            let scale = 1e-9 * (1.0 + u + r2 * v + 200.0 * (c1 + r2 * c2));
            let first_negative = events.iter().find(|e| z(e) < -scale).map(|e| e.state.t);
            match out.ruin_time {
                Some(t) => {
                    let last = events.last().unwrap();
                    prop_assert!(z(last) < scale);
                    for e in &events[..events.len() - 1] {
                        prop_assert!(z(e) > -scale);
                    }
                    if let Some(tz) = first_negative { prop_assert_eq!(tz, t); }
                }
                None => prop_assert!(first_negative.is_none()),
            }
        }
    }
}
