//! Python bindings for the two-line deficit-coverage model.

use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use deficit_coverage::harness::commands;
use deficit_coverage::harness::config::ExperimentConfig;
use deficit_coverage::harness::validation::{run_selected, ValidationOptions, CRITERIA};
use deficit_coverage::ladder_wh::{
    estimate_wh, AuxiliaryPair, DriftFirstLineFactors, FactorSource, Side, SurplusNoteFactors,
    WhConfig, WienerHopfFactors, DEFAULT_REJECTION_CUTOFF,
};
use deficit_coverage::simulator::{
    estimate_exponential_capital, estimate_survival, CapitalDraw, SimConfig,
};
use deficit_coverage::transforms::phi00 as phi00_core;
use deficit_coverage::{
    mc, ClaimDistribution, CoverageModel, Error, JointClaimDistribution, RiskProcess, TransferCost,
};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Convergence { .. } | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn cost(r: f64) -> TransferCost {
    if r.is_infinite() && r > 0.0 {
        TransferCost::Disabled
    } else {
        TransferCost::Finite(r)
    }
}

fn side(name: &str) -> PyResult<Side> {
    match name {
        "L" | "l" => Ok(Side::L),
        "R" | "r" => Ok(Side::R),
        _ => Err(PyValueError::new_err(format!(
            "side must be 'L' or 'R', got {name:?}"
        ))),
    }
}

fn workers(w: Option<usize>) -> usize {
    w.unwrap_or_else(mc::default_workers).max(1)
}

/// Claim-size law.
#[pyclass(frozen, from_py_object, name = "Claims", module = "deficit_coverage")]
#[derive(Clone)]
struct PyClaims(ClaimDistribution);

#[pymethods]
impl PyClaims {
    #[staticmethod]
    fn deterministic(value: f64) -> PyResult<Self> {
        ClaimDistribution::deterministic(value)
            .map(Self)
            .map_err(py_err)
    }

    #[staticmethod]
    fn exponential(rate: f64) -> PyResult<Self> {
        ClaimDistribution::exponential(rate)
            .map(Self)
            .map_err(py_err)
    }

    #[staticmethod]
    fn erlang(shape: u32, rate: f64) -> PyResult<Self> {
        ClaimDistribution::erlang(shape, rate)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn mean(&self) -> f64 {
        self.0.mean()
    }

    /// `E exp(-s C)`.
    fn laplace(&self, s: Complex64) -> PyResult<Complex64> {
        self.0.lt(s).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Claims({:?})", self.0)
    }
}

/// One compound-Poisson line: premium rate, claim rate and claim law.
#[pyclass(frozen, from_py_object, name = "Line", module = "deficit_coverage")]
#[derive(Clone)]
struct PyLine(RiskProcess);

#[pymethods]
impl PyLine {
    #[new]
    #[pyo3(signature = (premium, claim_rate = 0.0, claims = None))]
    fn new(premium: f64, claim_rate: f64, claims: Option<PyClaims>) -> PyResult<Self> {
        RiskProcess::new(premium, claim_rate, claims.map(|c| c.0))
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn drift(&self) -> f64 {
        self.0.drift()
    }

    /// Laplace exponent at `s`.
    fn psi(&self, s: Complex64) -> PyResult<Complex64> {
        self.0.psi(s).map_err(py_err)
    }

    /// Right inverse of the exponent at `q >= 0`.
    fn phi(&self, q: f64) -> PyResult<f64> {
        self.0.phi_inv_real(q).map_err(py_err)
    }
}

/// Two lines with transfer costs `r1`, `r2` (`inf` disables a direction).
#[pyclass(frozen, from_py_object, name = "Model", module = "deficit_coverage")]
#[derive(Clone)]
struct PyModel(CoverageModel);

#[pymethods]
impl PyModel {
    #[new]
    fn new(line1: PyLine, line2: PyLine, r1: f64, r2: f64) -> PyResult<Self> {
        CoverageModel::new(line1.0, line2.0, cost(r1), cost(r2))
            .map(Self)
            .map_err(py_err)
    }

    /// The `[model]` table of an experiment config file.
    #[staticmethod]
    fn from_config(path: PathBuf) -> PyResult<Self> {
        ExperimentConfig::load(&path)
            .map(|c| Self(c.model))
            .map_err(py_err)
    }

    /// Adds simultaneous claims at `rate`, sizes drawn independently from `first` and `second`.
    fn with_common_shock(&self, rate: f64, first: PyClaims, second: PyClaims) -> PyResult<Self> {
        let law = JointClaimDistribution::common_shock(first.0, second.0).map_err(py_err)?;
        self.0
            .clone()
            .with_common_shock(rate, law)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn drifts(&self) -> (f64, f64) {
        self.0.drifts()
    }

    #[getter]
    fn net_profit(&self) -> bool {
        self.0.net_profit().holds()
    }

    fn psi(&self, s1: Complex64, s2: Complex64) -> PyResult<Complex64> {
        self.0.psi_biv(s1, s2).map_err(py_err)
    }

    /// Simulated survival from `(u, v)`; returns `(estimate, standard_error)`.
    #[pyo3(signature = (u, v, n_paths = 10_000, horizon = 2000.0, seed = 42, workers = None))]
    fn survival(
        &self,
        py: Python<'_>,
        u: f64,
        v: f64,
        n_paths: u64,
        horizon: f64,
        seed: u64,
        workers: Option<usize>,
    ) -> PyResult<(f64, f64)> {
        let cfg = sim_config(n_paths, horizon, seed, workers);
        let est = py
            .detach(|| estimate_survival(&self.0, u, v, &cfg))
            .map_err(py_err)?;
        Ok((est.value, est.std_error))
    }

    /// Simulated `E phi(e_s1, e_s2)` with exponential initial capitals.
    #[pyo3(signature = (s1, s2, n_paths = 10_000, horizon = 2000.0, seed = 42, workers = None))]
    fn transform_sim(
        &self,
        py: Python<'_>,
        s1: f64,
        s2: f64,
        n_paths: u64,
        horizon: f64,
        seed: u64,
        workers: Option<usize>,
    ) -> PyResult<(f64, f64)> {
        let cfg = sim_config(n_paths, horizon, seed, workers);
        let est = py
            .detach(|| estimate_exponential_capital(&self.0, s1, s2, CapitalDraw::Both, &cfg))
            .map_err(py_err)?;
        Ok((est.value, est.std_error))
    }
}

fn sim_config(n_paths: u64, horizon: f64, seed: u64, w: Option<usize>) -> SimConfig {
    SimConfig {
        horizon,
        n_paths,
        seed,
        workers: workers(w),
        record_transfers: false,
    }
}

enum Inner {
    Sampled(WienerHopfFactors),
    Note(SurplusNoteFactors),
    DriftFirst(DriftFirstLineFactors),
}

/// Wiener–Hopf factors of the two auxiliary processes.
#[pyclass(frozen, name = "Factors", module = "deficit_coverage")]
struct PyFactors(Inner);

impl PyFactors {
    fn source(&self) -> &dyn FactorSource {
        match &self.0 {
            Inner::Sampled(f) => f,
            Inner::Note(f) => f,
            Inner::DriftFirst(f) => f,
        }
    }
}

#[pymethods]
impl PyFactors {
    /// Monte-Carlo factors from `n_samples` extrema per side.
    #[staticmethod]
    #[pyo3(signature = (model, n_samples = 10_000, seed = 42, workers = None))]
    fn estimate(
        py: Python<'_>,
        model: &PyModel,
        n_samples: u64,
        seed: u64,
        workers: Option<usize>,
    ) -> PyResult<Self> {
        let cfg = WhConfig {
            n_samples,
            seed,
            workers: self::workers(workers),
            rejection_cutoff: DEFAULT_REJECTION_CUTOFF,
        };
        let f = py
            .detach(|| AuxiliaryPair::new(&model.0).and_then(|p| estimate_wh(&p, &cfg)))
            .map_err(py_err)?;
        Ok(Self(Inner::Sampled(f)))
    }

    /// Closed-form factors when one of the lines has no claims.
    #[staticmethod]
    fn exact(model: &PyModel) -> PyResult<Self> {
        let m = &model.0;
        let inner = if m.line1().has_claims() {
            SurplusNoteFactors::new(m).map(Inner::Note)
        } else {
            DriftFirstLineFactors::new(m).map(Inner::DriftFirst)
        };
        inner.map(Self).map_err(py_err)
    }

    #[getter]
    fn is_sampled(&self) -> bool {
        matches!(self.0, Inner::Sampled(_))
    }

    fn plus(&self, side: &str, w: Complex64) -> PyResult<Complex64> {
        self.source().plus(self::side(side)?, w).map_err(py_err)
    }

    fn minus(&self, side: &str, w: Complex64) -> PyResult<Complex64> {
        self.source().minus(self::side(side)?, w).map_err(py_err)
    }

    fn plus_tail(&self, side: &str) -> PyResult<f64> {
        self.source().plus_tail(self::side(side)?).map_err(py_err)
    }

    fn minus_tail(&self, side: &str) -> PyResult<f64> {
        self.source().minus_tail(self::side(side)?).map_err(py_err)
    }
}

/// Survival from the origin by both tail routes: `(via_plus, via_minus)`.
#[pyfunction]
fn phi00(model: &PyModel, factors: &PyFactors) -> PyResult<(f64, f64)> {
    let p = phi00_core(&model.0, factors.source()).map_err(py_err)?;
    Ok((p.via_plus, p.via_minus))
}

/// `s1 s2 F(s1, s2)` and its standard error (`None` for exact factors).
#[pyfunction]
fn transform(
    model: &PyModel,
    factors: &PyFactors,
    s1: f64,
    s2: f64,
) -> PyResult<(f64, Option<f64>)> {
    let t = commands::evaluate(&model.0, factors.source(), s1, s2).map_err(py_err)?;
    Ok((t.f_hat.re, t.std_error))
}

/// Runs acceptance checks (all by default); returns `(id, name, passed, detail)` per check.
#[pyfunction]
#[pyo3(signature = (seed = 42, workers = None, checks = None))]
fn validate(
    py: Python<'_>,
    seed: u64,
    workers: Option<usize>,
    checks: Option<Vec<u8>>,
) -> Vec<(u8, String, bool, String)> {
    let opts = ValidationOptions {
        seed,
        workers: self::workers(workers),
        mutate_prime_sign: false,
    };
    let ids = checks.unwrap_or_else(|| CRITERIA.iter().map(|(id, _)| *id).collect());
    let report = py.detach(|| run_selected(&opts, &ids));
    report
        .checks
        .into_iter()
        .map(|c| (c.id, c.name, c.passed, c.detail))
        .collect()
}

#[pymodule]
#[pyo3(name = "deficit_coverage")]
fn deficit_coverage_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyClaims>()?;
    m.add_class::<PyLine>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyFactors>()?;
    m.add_function(wrap_pyfunction!(phi00, m)?)?;
    m.add_function(wrap_pyfunction!(transform, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
