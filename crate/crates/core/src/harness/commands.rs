//! The experiment commands behind the CLI. Each returns the files it wrote.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ladder_wh::{
    estimate_wh, write_factor_samples, AuxiliaryPair, DriftFirstLineFactors, FactorSource, Side,
    SurplusNoteFactors, WienerHopfFactors,
};
use crate::mc;
use crate::risk_model::CoverageModel;
use crate::simulator::{
    estimate_exponential_capital, estimate_survival, simulate_path_observed, write_path_log,
    CapitalDraw, ClaimStream, PathEvent,
};
use crate::transforms::{phi00, restricted_f, theorem_main, TransformValue};

use super::config::ExperimentConfig;
use super::output::{num, Metadata, Table};
use super::validation::{run_all, ValidationOptions, ValidationReport};

fn meta(cfg: &ExperimentConfig, command: &str) -> Metadata {
    Metadata::new(command, &cfg.hash(), cfg.sim.seed)
}

/// Survival at the configured `(u, v)` points, the simulated transform grid
/// when one is configured, and optional event-level path logs.
pub fn simulate(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let model = &cfg.model;
    let sim = cfg.sim_config();
    let mut written = Vec::new();

    let mut table = Table::new(&["u", "v", "estimate", "se", "n", "horizon"]);
    for &[u, v] in &cfg.sweep.points {
        let est = estimate_survival(model, u, v, &sim)?;
        table.push_numbers(&[u, v, est.value, est.std_error, est.n as f64, sim.horizon]);
    }
    let m = meta(cfg, "simulate").with("n_paths", sim.n_paths);
    written.push(table.save(out, "survival.csv", &m)?);

    let grid = cfg.sweep.transform_grid();
    if !grid.is_empty() {
        let mut table = Table::new(&["s1", "s2", "estimate", "se", "n", "horizon"]);
        for (s1, s2, est) in overlay(cfg, &grid)? {
            table.push_numbers(&[s1, s2, est.value, est.std_error, est.n as f64, sim.horizon]);
        }
        written.push(table.save(out, "transform_sim.csv", &m)?);
    }

    if cfg.output.path_logs > 0 {
        let [u, v] = cfg.sweep.points.first().copied().unwrap_or([0.0, 0.0]);
        let stream = ClaimStream::compile(model)?;
        let seed = mc::derive_seed(cfg.sim.seed, "path-log");
        let dir = out.join("paths");
        fs::create_dir_all(&dir)?;
        for k in 0..cfg.output.path_logs {
            let mut events: Vec<PathEvent> = Vec::new();
            let mut rng = mc::path_rng(seed, k);
            simulate_path_observed(model, &stream, u, v, sim.horizon, &mut rng, |e| {
                events.push(*e)
            });
            let path = dir.join(format!("path_{k}.csv"));
            let mut w = BufWriter::new(fs::File::create(&path)?);
            m.clone()
                .with("path", k)
                .with("u", u)
                .with("v", v)
                .write_to(&mut w)?;
            write_path_log(&mut w, &events)?;
            w.flush()?;
            written.push(path);
        }
    }
    Ok(written)
}

fn overlay(cfg: &ExperimentConfig, grid: &[(f64, f64)]) -> Result<Vec<(f64, f64, mc::McEstimate)>> {
    let sim = cfg
        .sim_config()
        .with_seed(mc::derive_seed(cfg.sim.seed, "overlay"));
    grid.iter()
        .map(|&(s1, s2)| {
            Ok((
                s1,
                s2,
                estimate_exponential_capital(&cfg.model, s1, s2, CapitalDraw::Both, &sim)?,
            ))
        })
        .collect()
}

pub fn estimate_factors(cfg: &ExperimentConfig) -> Result<WienerHopfFactors> {
    let pair = AuxiliaryPair::with_cutoff(&cfg.model, cfg.wh.rejection_cutoff)?;
    let wh = estimate_wh(&pair, &cfg.wh_config())?;
    for w in wh.acceptance_warnings() {
        eprintln!("warning: {w}");
    }
    Ok(wh)
}

/// Raw factor samples and the four factor curves over the configured real grid.
pub fn wh(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let wh = estimate_factors(cfg)?;
    let pair = AuxiliaryPair::with_cutoff(&cfg.model, cfg.wh.rejection_cutoff)?;
    let m = meta(cfg, "wh").with("n_samples", cfg.wh.n_samples);
    fs::create_dir_all(out)?;
    let path = out.join("wh_samples.csv");
    let mut w = BufWriter::new(fs::File::create(&path)?);
    m.write_to(&mut w)?;
    write_factor_samples(&mut w, &wh)?;
    w.flush()?;
    let curves = factor_curves(&pair, &wh, &cfg.wh.w_grid)?;
    Ok(vec![path, curves.save(out, "wh_curves.csv", &m)?])
}

/// One row per `w`: `Psi_L+(w)`, `Psi_R+(w)`, `Psi_L-(-w)`, `Psi_R-(-w)` with
/// standard errors, and the Wiener–Hopf identity residual at `i w` in SE units.
/// Columns of a missing right side are `nan`.
pub fn factor_curves(pair: &AuxiliaryPair, wh: &WienerHopfFactors, grid: &[f64]) -> Result<Table> {
    let mut table = Table::new(&[
        "w",
        "L_plus",
        "L_plus_se",
        "R_plus",
        "R_plus_se",
        "L_minus",
        "L_minus_se",
        "R_minus",
        "R_minus_se",
        "L_wh_z",
        "R_wh_z",
    ]);
    for &w in grid {
        let mut row = vec![w];
        let mut z = Vec::new();
        for side in [Side::L, Side::R] {
            let Ok(s) = wh.side(side) else {
                row.extend([f64::NAN; 2]);
                z.push(f64::NAN);
                continue;
            };
            let p = s.plus(Complex64::new(w, 0.0))?;
            row.extend([p.value.re, p.std_error]);
            let iw = Complex64::new(0.0, w);
            let prod = s.product(iw);
            let rate = pair.kill_rate(side)?;
            let exact = rate / (rate - pair.psi_lr(side, iw)?);
            let dev = (prod.value - exact).norm();
            z.push(if prod.std_error > 0.0 {
                dev / prod.std_error
            } else {
                dev
            });
        }
        for side in [Side::L, Side::R] {
            match wh.side(side) {
                Ok(s) => {
                    let m = s.minus(Complex64::new(-w, 0.0))?;
                    row.extend([m.value.re, m.std_error]);
                }
                Err(_) => row.extend([f64::NAN; 2]),
            }
        }
        row.extend(z);
        table.push_numbers(&row);
    }
    Ok(table)
}

/// Factors of value 1, for the uncoupled case where the solution needs none.
struct Unit;

impl FactorSource for Unit {
    fn plus(&self, _: Side, _: Complex64) -> Result<Complex64> {
        Ok(Complex64::new(1.0, 0.0))
    }
    fn minus(&self, _: Side, _: Complex64) -> Result<Complex64> {
        Ok(Complex64::new(1.0, 0.0))
    }
    fn plus_tail(&self, _: Side) -> Result<f64> {
        Ok(1.0)
    }
    fn minus_tail(&self, _: Side) -> Result<f64> {
        Ok(1.0)
    }
}

/// Exact factors when either line is riskless, Monte-Carlo ones otherwise.
pub fn factors_for(cfg: &ExperimentConfig) -> Result<Box<dyn FactorSource>> {
    let model = &cfg.model;
    if model.r1().is_disabled() {
        if !model.r2().is_disabled() {
            return Err(Error::Precondition(
                "r1 = inf with finite r2 is not covered; swap the two lines so the disabled direction is r2".into(),
            ));
        }
        return Ok(Box::new(Unit));
    }
    if model.is_independent() && !model.line2().has_claims() {
        return Ok(Box::new(SurplusNoteFactors::new(model)?));
    }
    if model.is_independent() && !model.line1().has_claims() {
        return Ok(Box::new(DriftFirstLineFactors::new(model)?));
    }
    Ok(Box::new(estimate_factors(cfg)?))
}

pub fn evaluate(
    model: &CoverageModel,
    factors: &dyn FactorSource,
    s1: f64,
    s2: f64,
) -> Result<TransformValue> {
    if model.r2().is_disabled() {
        restricted_f(model, factors, s1, s2)
    } else {
        theorem_main(model, factors, s1, s2)
    }
}

/// Analytic `s1 s2 F(s1, s2)` over the sweep grid, with simulated overlay columns when enabled.
pub fn transform(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let factors = factors_for(cfg)?;
    let grid = cfg.sweep.transform_grid();
    let mut header = vec!["s1", "s2", "f_hat", "se", "component1", "component2"];
    if cfg.sweep.overlay {
        header.extend(["sim", "sim_se", "z"]);
    }
    let mut table = Table::new(&header);
    let sims = if cfg.sweep.overlay {
        Some(overlay(cfg, &grid)?)
    } else {
        None
    };
    for (k, &(s1, s2)) in grid.iter().enumerate() {
        let t = evaluate(&cfg.model, factors.as_ref(), s1, s2)?;
        let se = t.std_error.unwrap_or(0.0);
        let scale = s1 * s2;
        let mut row = vec![
            s1,
            s2,
            t.f_hat.re,
            se,
            scale * t.components[0].re,
            scale * t.components[1].re,
        ];
        if let Some(sims) = &sims {
            let e = sims[k].2;
            let comb = se.hypot(e.std_error);
            let z = if comb > 0.0 {
                (t.f_hat.re - e.value) / comb
            } else {
                f64::NAN
            };
            row.extend([e.value, e.std_error, z]);
        }
        table.push_numbers(&row);
    }
    let m = meta(cfg, "transform");
    let mut written = vec![table.save(out, "transform.csv", &m)?];
    if !cfg.model.r2().is_disabled() && cfg.model.is_independent() {
        let p = phi00(&cfg.model, factors.as_ref())?;
        let mut t = Table::new(&["via_plus", "via_plus_se", "via_minus", "via_minus_se"]);
        t.push_numbers(&[
            p.via_plus,
            p.via_plus_se.unwrap_or(f64::NAN),
            p.via_minus,
            p.via_minus_se.unwrap_or(f64::NAN),
        ]);
        written.push(t.save(out, "phi00.csv", &m)?);
    }
    Ok(written)
}

/// Runs every acceptance check and writes `validation.json` and `validation.txt`.
pub fn validate(opts: &ValidationOptions, out: &Path) -> Result<(ValidationReport, Vec<PathBuf>)> {
    let report = run_all(opts);
    fs::create_dir_all(out)?;
    let json = out.join("validation.json");
    fs::write(&json, report.to_json())?;
    let txt = out.join("validation.txt");
    fs::write(&txt, report.to_text())?;
    Ok((report, vec![json, txt]))
}

const PLOT_SCRIPT: &str = r#"# gnuplot script; run from this directory with `gnuplot figures.gp`.
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set terminal pngcairo size 1200,480
set output 'figures.png'
set multiplot layout 1,2

set title 'Wiener-Hopf factors'
set xlabel 'w'
plot 'wh_curves.csv' using 1:4 with lines title 'Psi_R+(w)', \
     '' using 1:2 with lines title 'Psi_L+(w)', \
     '' using 1:6 with lines title 'Psi_L-(-w)', \
     '' using 1:8 with lines title 'Psi_R-(-w)'

set title 'E phi(e_{s1}, e_{s2}), s2 = 1'
set xlabel 's1'
plot 'transform.csv' using 1:3 with lines title 'analytic', \
     '' using 1:7:8 with yerrorbars title 'simulation'

unset multiplot
"#;

/// Headline survival from the origin, factor curves, the transform sweep with
/// its simulation overlay, and a gnuplot script for the two figures.
pub fn reproduce_paper(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let mut cfg = cfg.clone();
    cfg.sweep.overlay = true;
    let m = meta(&cfg, "reproduce-paper");
    let wh_est = estimate_factors(&cfg)?;
    let pair = AuxiliaryPair::with_cutoff(&cfg.model, cfg.wh.rejection_cutoff)?;
    let mut written = Vec::new();

    let p = phi00(&cfg.model, &wh_est)?;
    let direct = estimate_survival(&cfg.model, 0.0, 0.0, &cfg.sim_config())?;
    let mut head = Table::new(&["quantity", "value", "se", "reference"]);
    head.push(vec![
        "phi00_via_plus".into(),
        num(p.via_plus),
        num(p.via_plus_se.unwrap_or(f64::NAN)),
        "0.281".into(),
    ]);
    head.push(vec![
        "phi00_via_minus".into(),
        num(p.via_minus),
        num(p.via_minus_se.unwrap_or(f64::NAN)),
        "0.277".into(),
    ]);
    head.push(vec![
        "phi00_direct".into(),
        num(direct.value),
        num(direct.std_error),
        "0.279".into(),
    ]);
    written.push(head.save(out, "headline.csv", &m)?);

    written.push(factor_curves(&pair, &wh_est, &cfg.wh.w_grid)?.save(out, "wh_curves.csv", &m)?);

    let grid = cfg.sweep.transform_grid();
    let sims = overlay(&cfg, &grid)?;
    let mut table = Table::new(&[
        "s1",
        "s2",
        "f_hat",
        "se",
        "component1",
        "component2",
        "sim",
        "sim_se",
        "z",
    ]);
    for (&(s1, s2), (_, _, e)) in grid.iter().zip(&sims) {
        let t = evaluate(&cfg.model, &wh_est, s1, s2)?;
        let se = t.std_error.unwrap_or(0.0);
        let scale = s1 * s2;
        let comb = se.hypot(e.std_error);
        table.push_numbers(&[
            s1,
            s2,
            t.f_hat.re,
            se,
            scale * t.components[0].re,
            scale * t.components[1].re,
            e.value,
            e.std_error,
            if comb > 0.0 {
                (t.f_hat.re - e.value) / comb
            } else {
                f64::NAN
            },
        ]);
    }
    written.push(table.save(out, "transform.csv", &m)?);

    let script = out.join("figures.gp");
    fs::write(&script, PLOT_SCRIPT)?;
    written.push(script);
    Ok(written)
}
