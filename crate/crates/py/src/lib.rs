//! Python bindings: packet specifications, the model spectrum, the
//! autocorrelation approximants and the Gauss-sum coefficients.

use std::f64::consts::TAU;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use revivalkit::direct_spectrum::{discretize, resolution_bound, spectrum_between, Parity, Stencil, WindowOptions};
use revivalkit::dynamics::{self, Approximants, ClosedForm, PhaseData, TimeLimits};
use revivalkit::gauss;
use revivalkit::model_spectrum::{Family, ModelOptions, SpectrumWindow};
use revivalkit::potential::{canonical_double_well, flow_period as classical_period, FlowOptions};
use revivalkit::wavepacket::{self, CoefficientSequence, Packet};
use revivalkit::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parameter(_) | Error::TimeScale { .. } | Error::NotCoprime { .. } | Error::Profile(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn family(name: &str) -> PyResult<Family> {
    match name {
        "alpha" => Ok(Family::Alpha),
        "beta" => Ok(Family::Beta),
        _ => Err(PyValueError::new_err(format!("unknown family {name:?}; use 'alpha' or 'beta'"))),
    }
}

/// Exactly one of `h` and `log_h` must be given; returns `|ln h|`.
fn scale(h: Option<f64>, log_h: Option<f64>) -> PyResult<(Option<f64>, f64)> {
    match (h, log_h) {
        (Some(h), None) if h > 0.0 && h < 1.0 => Ok((Some(h), -h.ln())),
        (Some(h), None) => Err(PyValueError::new_err(format!("h = {h} must lie in (0, 1)"))),
        (None, Some(l)) => Ok((None, l)),
        _ => Err(PyValueError::new_err("give exactly one of h and log_h")),
    }
}

#[pyclass(name = "PacketSpec", module = "revivalkit", frozen)]
struct PyPacketSpec {
    inner: wavepacket::PacketSpec,
}

#[pymethods]
impl PyPacketSpec {
    #[new]
    #[pyo3(signature = (h=None, *, log_h=None, energy=0.0, gamma_prime=0.8, gamma=0.3, revival=true, profile="gaussian"))]
    fn new(
        h: Option<f64>,
        log_h: Option<f64>,
        energy: f64,
        gamma_prime: f64,
        gamma: f64,
        revival: bool,
        profile: &str,
    ) -> PyResult<Self> {
        let (h, log_h) = scale(h, log_h)?;
        let spec = match h {
            Some(h) => wavepacket::PacketSpec::new(h, energy, gamma_prime, gamma, revival),
            None => wavepacket::PacketSpec::from_log_h(log_h, energy, gamma_prime, gamma, revival),
        }
        .and_then(|s| s.with_profile(wavepacket::Profile::from_name(profile)?))
        .map_err(py_err)?;
        Ok(Self { inner: spec })
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h
    }
    #[getter]
    fn log_h(&self) -> f64 {
        self.inner.log_h
    }
    #[getter]
    fn energy(&self) -> f64 {
        self.inner.energy
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[getter]
    fn gamma_prime(&self) -> f64 {
        self.inner.gamma_prime
    }
    #[getter]
    fn profile(&self) -> &'static str {
        self.inner.profile.name()
    }
    /// `L = |ln h|^(1 - gamma')`.
    #[getter]
    fn width(&self) -> f64 {
        self.inner.width()
    }
    #[getter]
    fn radius(&self) -> i64 {
        self.inner.radius()
    }
    fn closed_form_norm(&self) -> PyResult<f64> {
        self.inner.closed_form_norm().map_err(py_err)
    }
    fn default_alpha(&self) -> f64 {
        self.inner.default_alpha()
    }
    fn default_beta(&self) -> f64 {
        self.inner.default_beta()
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "PacketSpec(log_h={}, energy={}, gamma_prime={}, gamma={}, profile={:?})",
            s.log_h,
            s.energy,
            s.gamma_prime,
            s.gamma,
            s.profile.name()
        )
    }
}

#[pyclass(name = "SpectralModel", module = "revivalkit", frozen)]
struct PySpectralModel {
    inner: revivalkit::model_spectrum::SpectralModel,
    window: SpectrumWindow,
}

#[pymethods]
impl PySpectralModel {
    /// Model of the canonical double well `x^4 - x^2` on `|lambda| <= lambda_bound`.
    #[new]
    #[pyo3(signature = (h=None, *, log_h=None, lambda_bound=1.0, delta=0.1))]
    fn new(h: Option<f64>, log_h: Option<f64>, lambda_bound: f64, delta: f64) -> PyResult<Self> {
        let (h, log_h) = scale(h, log_h)?;
        let v = canonical_double_well();
        let opts = ModelOptions {
            delta,
            lambda_bound,
            ..ModelOptions::default()
        };
        let inner = match h {
            Some(h) => revivalkit::model_spectrum::SpectralModel::new(&v, h, opts),
            None => revivalkit::model_spectrum::SpectralModel::from_log_h(&v, log_h, opts),
        }
        .map_err(py_err)?;
        let window = inner.solve_families().map_err(py_err)?;
        Ok(Self { inner, window })
    }

    #[getter]
    fn log_h(&self) -> f64 {
        self.inner.log_h()
    }

    fn y_h(&self, lam: f64) -> PyResult<f64> {
        self.inner.y_h(lam).map_err(py_err)
    }

    fn z_h(&self, lam: f64) -> PyResult<f64> {
        self.inner.z_h(lam).map_err(py_err)
    }

    /// `(index, lambda, eigenvalue)` for one family, ascending index.
    fn levels(&self, family_name: &str) -> PyResult<Vec<(i64, f64, f64)>> {
        let f = family(family_name)?;
        Ok(self.window.family(f).iter().map(|l| (l.index, l.lambda, l.eigenvalue)).collect())
    }

    /// Rescaled levels of both families, ascending.
    fn merged(&self) -> Vec<f64> {
        self.window.merged()
    }

    /// Number of levels with `|lambda| <= 1`.
    fn count(&self) -> usize {
        self.window.restricted(1.0).count()
    }
}

/// The alpha-family packet on the model spectrum with its phase data and
/// approximants.
#[pyclass(name = "RevivalRun", module = "revivalkit", frozen)]
struct PyRevivalRun {
    window: SpectrumWindow,
    packet: Packet,
    seq: CoefficientSequence,
    approx: Approximants,
}

impl PyRevivalRun {
    fn check<T>(&self, r: revivalkit::Result<T>) -> PyResult<T> {
        r.map_err(py_err)
    }
}

#[pymethods]
impl PyRevivalRun {
    /// `alpha` and `beta` are the time-scale exponents; they default to the
    /// values derived from `gamma`.
    #[new]
    #[pyo3(signature = (spec, *, alpha=None, beta=None))]
    fn new(spec: &PyPacketSpec, alpha: Option<f64>, beta: Option<f64>) -> PyResult<Self> {
        let spec = &spec.inner;
        let v = canonical_double_well();
        let gap = TAU * v.omega() / spec.log_h;
        let bound = (spec.energy.abs() + 1.2 * gap * spec.radius() as f64 + 1.0).max(1.0);
        let opts = ModelOptions {
            lambda_bound: bound,
            ..ModelOptions::default()
        };
        let model = if spec.h > 0.0 {
            revivalkit::model_spectrum::SpectralModel::new(&v, spec.h, opts)
        } else {
            revivalkit::model_spectrum::SpectralModel::from_log_h(&v, spec.log_h, opts)
        }
        .map_err(py_err)?;
        let window = model.solve_families().map_err(py_err)?;
        let packet = Packet::from_window(spec, &window, 1.0).map_err(py_err)?;
        let seq = packet
            .alpha
            .clone()
            .ok_or_else(|| PyRuntimeError::new_err("empty packet"))?;
        let phase = PhaseData::from_model(&model, &window, Family::Alpha, seq.center).map_err(py_err)?;
        let limits = TimeLimits::new(
            spec,
            alpha.unwrap_or_else(|| spec.default_alpha()),
            beta.unwrap_or_else(|| spec.default_beta()),
        )
        .map_err(py_err)?;
        let approx = Approximants::new(spec, &seq, phase, Some(limits));
        Ok(Self {
            window,
            packet,
            seq,
            approx,
        })
    }

    #[getter]
    fn center(&self) -> i64 {
        self.seq.center
    }
    #[getter]
    fn t_hyp(&self) -> f64 {
        self.approx.phase.t_hyp()
    }
    #[getter]
    fn t_rev(&self) -> f64 {
        self.approx.phase.t_rev()
    }
    #[getter]
    fn n_h(&self) -> i64 {
        self.approx.phase.n_h()
    }
    #[getter]
    fn theta_hat(&self) -> f64 {
        self.approx.phase.theta_hat()
    }
    #[getter]
    fn order1_limit(&self) -> Option<f64> {
        self.approx.limits.map(|l| l.order1_limit())
    }
    #[getter]
    fn order2_limit(&self) -> Option<f64> {
        self.approx.limits.map(|l| l.order2_limit())
    }

    /// `(n, a_n)` over the truncated packet.
    fn coefficients(&self) -> Vec<(i64, f64)> {
        self.seq.indices().zip(self.seq.values.iter().copied()).collect()
    }

    fn norm_squared(&self) -> f64 {
        self.seq.norm_squared()
    }

    fn hyperbolic_grid(&self, t_max: f64) -> Vec<f64> {
        dynamics::hyperbolic_grid(&self.approx.phase, t_max)
    }

    fn revival_grid(&self) -> Vec<f64> {
        dynamics::revival_grid(&self.approx.phase)
    }

    /// `r(t)` summed over the model levels.
    fn exact_return(&self, grid: Vec<f64>) -> PyResult<Vec<Complex64>> {
        self.check(dynamics::exact_return(&self.window, &self.packet, &grid))
    }

    fn order1(&self, grid: Vec<f64>) -> PyResult<Vec<Complex64>> {
        self.check(self.approx.order1(&grid))
    }

    fn order2(&self, grid: Vec<f64>) -> PyResult<Vec<Complex64>> {
        self.check(self.approx.order2(&grid))
    }

    /// `|a1~(t)|` from the Poisson sum over all images.
    fn closed_form(&self, grid: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check(self.approx.closed_form(&grid, ClosedForm::Poisson))
    }

    /// `(lhs, rhs, sup |lhs - rhs|)` of the fractional revival identity at `p/q`.
    fn fractional(&self, grid: Vec<f64>, p: i64, q: i64) -> PyResult<(Vec<Complex64>, Vec<Complex64>, f64)> {
        let c = self.check(self.approx.fractional_prediction(&grid, p, q))?;
        Ok((c.lhs, c.rhs, c.sup_difference))
    }

    fn revival_defect(&self, grid: Vec<f64>) -> PyResult<f64> {
        self.check(self.approx.revival_defect(&grid))
    }
}

/// Minimal period `ell` of `n -> exp(-2 pi i p (n - n0)^2 / q)`.
#[pyfunction]
fn minimal_period(p: i64, q: i64) -> PyResult<i64> {
    gauss::periodicity_set(p, q).map(|s| s.ell).map_err(py_err)
}

/// `(ell, b, b_tilde)` for the quadratic phase sequence.
#[pyfunction]
#[pyo3(signature = (p, q, n0=0))]
fn gauss_coefficients(p: i64, q: i64, n0: i64) -> PyResult<(i64, Vec<Complex64>, Vec<Complex64>)> {
    let c = gauss::coefficients(p, q, n0).map_err(py_err)?;
    Ok((c.ell, c.b, c.b_tilde))
}

/// Closed-form `|b_k|^2` over one period.
#[pyfunction]
fn modulus_law(p: i64, q: i64) -> PyResult<Vec<f64>> {
    gauss::modulus_law(p, q).map_err(py_err)
}

/// Period of the classical orbit at energy `h`.
#[pyfunction]
fn flow_period(h: f64) -> PyResult<f64> {
    classical_period(&canonical_double_well(), h, &FlowOptions::default())
        .map(|r| r.period)
        .map_err(py_err)
}

/// Rescaled finite-difference levels in `[-bound h, bound h]` as
/// `(lambda, parity)` pairs, parity being "even" or "odd".
#[pyfunction]
#[pyo3(signature = (h, bound=1.0, half_width=1.6))]
fn direct_levels(h: f64, bound: f64, half_width: f64) -> PyResult<Vec<(f64, &'static str)>> {
    let v = canonical_double_well();
    let top = bound * h;
    let vmin = v.grid_minimum(20_001);
    let dx = resolution_bound(&v, h) * ((h - vmin) / (top - vmin)).sqrt();
    let op = discretize(&v, h, half_width, dx, Stencil::Fourth).map_err(py_err)?;
    let ws = spectrum_between(&op, -top, top, true, WindowOptions { samples: 0 }).map_err(py_err)?;
    Ok(ws
        .eigenvalues
        .iter()
        .zip(&ws.parities)
        .map(|(e, p)| {
            let label = match p {
                Parity::Even => "even",
                Parity::Odd => "odd",
                Parity::NotApplicable => "none",
            };
            (e / h, label)
        })
        .collect())
}

#[pymodule]
#[pyo3(name = "revivalkit")]
fn revivalkit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPacketSpec>()?;
    m.add_class::<PySpectralModel>()?;
    m.add_class::<PyRevivalRun>()?;
    m.add_function(wrap_pyfunction!(minimal_period, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(modulus_law, m)?)?;
    m.add_function(wrap_pyfunction!(flow_period, m)?)?;
    m.add_function(wrap_pyfunction!(direct_levels, m)?)?;
    Ok(())
}
