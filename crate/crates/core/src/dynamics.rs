//! Return amplitudes of a packet and their first- and second-order
//! approximants.
//!
//! Times are in the rescaled units where level `n` evolves as
//! `exp(-i t lambda_n)`. Shifts by rational multiples of `T_hyp` are carried
//! separately from the floating part of the time so that phases like
//! `(p/q) N_h T_hyp` are reduced exactly, however large `N_h` is.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::gauss::{self, unit_phase};
use crate::model_spectrum::{Family, SpectralModel, SpectrumWindow};
use crate::wavepacket::{CoefficientSequence, Packet, PacketSpec, Profile};
use crate::{Error, Result};

/// Taylor data of the inverse spectral function at the packet centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseData {
    /// `A(2 pi n0)`.
    pub a0: f64,
    /// `A'(2 pi n0)`.
    pub a1: f64,
    /// `A''(2 pi n0)`.
    pub a2: f64,
    /// Largest `|A'''|` seen over the window.
    pub a3_bound: f64,
    pub center: i64,
    /// `T_rev / T_hyp` when it is known to be this integer exactly.
    pub commensurate: Option<i64>,
    /// `Y''` at the centre, the quantity whose limit controls `T_rev`.
    pub curvature: Option<f64>,
}

impl PhaseData {
    /// Reads the derivatives of the inverse of `Y_h` (or `Z_h`) at the level
    /// `center`; the `A'''` bound runs over all levels of the family in the
    /// window.
    pub fn from_model(model: &SpectralModel, window: &SpectrumWindow, family: Family, center: i64) -> Result<Self> {
        let level = window.level(family, center).ok_or_else(|| {
            let (lo, hi) = window.index_range(family).unwrap_or((0, -1));
            Error::Support { index: center, lo, hi }
        })?;
        let [a0, a1, a2, _] = model.inverse_derivatives_at(family, level)?;
        let a3_bound = window
            .family(family)
            .iter()
            .map(|l| model.inverse_derivatives_at(family, l).map(|d| d[3].abs()))
            .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))?;
        let curvature = match family {
            Family::Alpha => model.y_jet(level.lambda)?.0[2],
            Family::Beta => model.z_jet(level.lambda)?.0[2],
        };
        Ok(Self {
            a0,
            a1,
            a2,
            a3_bound,
            center,
            commensurate: None,
            curvature: Some(curvature),
        })
    }

    /// Directly supplied Taylor coefficients.
    pub fn synthetic(a0: f64, a1: f64, a2: f64, center: i64) -> Self {
        Self {
            a0,
            a1,
            a2,
            a3_bound: 0.0,
            center,
            commensurate: None,
            curvature: None,
        }
    }

    /// Synthetic data with `T_rev = ratio * T_hyp` exactly, i.e.
    /// `A'' = A' / (pi ratio)`.
    pub fn commensurate(a0: f64, a1: f64, ratio: i64, center: i64) -> Result<Self> {
        if ratio == 0 {
            return Err(Error::Parameter("revival ratio must be nonzero".into()));
        }
        Ok(Self {
            commensurate: Some(ratio),
            ..Self::synthetic(a0, a1, a1 / (PI * ratio as f64), center)
        })
    }

    /// `1 / A'`, signed.
    pub fn t_hyp(&self) -> f64 {
        1.0 / self.a1
    }

    /// `1 / (pi A'')`, signed.
    pub fn t_rev(&self) -> f64 {
        1.0 / (PI * self.a2)
    }

    pub fn revival_ratio(&self) -> f64 {
        match self.commensurate {
            Some(n) => n as f64,
            None => self.a1 / (PI * self.a2),
        }
    }

    /// `N_h = floor(T_rev / T_hyp)`.
    pub fn n_h(&self) -> i64 {
        match self.commensurate {
            Some(n) => n,
            None => self.revival_ratio().floor() as i64,
        }
    }

    /// Fractional part of `T_rev / T_hyp`.
    pub fn theta_hat(&self) -> f64 {
        match self.commensurate {
            Some(_) => 0.0,
            None => {
                let r = self.revival_ratio();
                r - r.floor()
            }
        }
    }

    pub fn quadratic_phase(&self) -> QuadraticPhase {
        QuadraticPhase {
            a0: self.a0,
            a1: self.a1,
            a2: self.a2,
            center: self.center,
        }
    }
}

/// `Q2(X) = A0 + 2 pi A1 (X - n0) + 2 pi^2 A2 (X - n0)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticPhase {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub center: i64,
}

impl QuadraticPhase {
    pub fn eval(&self, n: i64) -> f64 {
        let m = (n - self.center) as f64;
        self.a0 + TAU * self.a1 * m + 2.0 * PI * PI * self.a2 * m * m
    }
}

/// The time `num / den * T_hyp`, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PeriodShift {
    pub num: i64,
    pub den: i64,
}

impl PeriodShift {
    pub const ZERO: PeriodShift = PeriodShift { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den <= 0 {
            return Err(Error::Parameter(format!("shift denominator {den} must be positive")));
        }
        Ok(Self { num, den })
    }

    pub fn periods(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Largest times for which the approximants are meaningful at a given `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeLimits {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub log_h: f64,
    pub revival: bool,
}

impl TimeLimits {
    pub fn new(spec: &PacketSpec, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 3.0 - 2.0 * spec.gamma) {
            return Err(Error::Parameter(format!(
                "alpha = {alpha} must lie in (0, 3 - 2 gamma) = (0, {})",
                3.0 - 2.0 * spec.gamma
            )));
        }
        if !(beta >= alpha && beta < 4.0 - 3.0 * spec.gamma) {
            return Err(Error::Parameter(format!(
                "beta = {beta} must lie in [alpha, 4 - 3 gamma) = [{alpha}, {})",
                4.0 - 3.0 * spec.gamma
            )));
        }
        Ok(Self {
            alpha,
            beta,
            gamma: spec.gamma,
            log_h: spec.log_h(),
            revival: spec.revival,
        })
    }

    pub fn from_defaults(spec: &PacketSpec) -> Result<Self> {
        Self::new(spec, spec.default_alpha(), spec.default_beta())
    }

    pub fn order1_limit(&self) -> f64 {
        self.log_h.powf(self.alpha)
    }

    pub fn order2_limit(&self) -> f64 {
        self.log_h.powf(self.beta)
    }

    fn check(&self, t_max: f64, order: usize) -> Result<()> {
        let (limit, exponent) = match order {
            1 => (self.order1_limit(), self.alpha),
            _ => (self.order2_limit(), self.beta),
        };
        if t_max > limit {
            return Err(Error::TimeScale {
                t_max,
                limit,
                exponent,
            });
        }
        if order == 2 && t_max > self.order1_limit() && !(self.gamma < 1.0 / 3.0) {
            return Err(Error::Parameter(format!(
                "gamma < 1/3 required for revival-scale times (got {})",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Which form of the Poisson-summed first-order curve to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClosedForm {
    /// All images `sum_j F(chi^2)(L (x - j))`, normalised at `x = 0`.
    Poisson,
    /// The nearest image only, `F(chi^2)(L d(x, Z)) / F(chi^2)(0)`.
    NearestImage,
}

/// `sum_m w_m exp(-i t omega_m) z_m` over a grid, in parallel.
///
/// Uniform grids are swept in blocks: each block starts from exact phasors
/// and advances them by a fixed rotation per step.
fn phase_sum(modes: &[(f64, f64, Complex64)], grid: &[f64]) -> Vec<Complex64> {
    const BLOCK: usize = 512;
    let direct = |t: f64| -> Complex64 {
        modes
            .iter()
            .map(|&(w, omega, z)| z * Complex64::from_polar(w, -t * omega))
            .sum()
    };
    let Some(step) = uniform_step(grid) else {
        return grid.par_iter().map(|&t| direct(t)).collect();
    };
    let rotations: Vec<Complex64> = modes
        .iter()
        .map(|&(_, omega, _)| Complex64::from_polar(1.0, -step * omega))
        .collect();
    let t0 = grid[0];
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    out.par_chunks_mut(BLOCK).enumerate().for_each(|(b, chunk)| {
        let start = b * BLOCK;
        let t_start = t0 + start as f64 * step;
        let mut phasors: Vec<Complex64> = modes
            .iter()
            .map(|&(w, omega, z)| z * Complex64::from_polar(w, -t_start * omega))
            .collect();
        for slot in chunk.iter_mut() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (p, r) in phasors.iter_mut().zip(&rotations) {
                acc += *p;
                *p *= r;
            }
            *slot = acc;
        }
    });
    out
}

/// Spacing of a grid that is uniform to within rounding of its largest time.
fn uniform_step(grid: &[f64]) -> Option<f64> {
    let n = grid.len();
    if n < 3 {
        return None;
    }
    let step = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let tol = 8.0 * f64::EPSILON * grid_max(grid);
    grid.iter()
        .enumerate()
        .all(|(i, &t)| (t - (grid[0] + i as f64 * step)).abs() <= tol)
        .then_some(step)
}

fn grid_max(grid: &[f64]) -> f64 {
    grid.iter().fold(0.0f64, |m, t| m.max(t.abs()))
}

/// First- and second-order approximants of one family's partial
/// autocorrelation.
#[derive(Debug, Clone, PartialEq)]
pub struct Approximants {
    /// `(n - n0, |a_n|^2)`.
    pub weights: Vec<(i64, f64)>,
    pub center: i64,
    pub phase: PhaseData,
    pub profile: Profile,
    pub width: f64,
    /// `None` skips the time-scale guards, as for synthetic phase data.
    pub limits: Option<TimeLimits>,
}

impl Approximants {
    pub fn new(spec: &PacketSpec, seq: &CoefficientSequence, phase: PhaseData, limits: Option<TimeLimits>) -> Self {
        Self {
            weights: seq.weights().collect(),
            center: seq.center,
            phase,
            profile: spec.profile.clone(),
            width: spec.width(),
            limits,
        }
    }

    fn modes(&self, order: usize, shift: PeriodShift) -> Vec<(f64, f64, Complex64)> {
        let p = &self.phase;
        let den_q = shift.den as i128 * p.commensurate.unwrap_or(1) as i128;
        self.weights
            .iter()
            .map(|&(m, w)| {
                let mf = m as f64;
                let mut omega = TAU * p.a1 * mf;
                let mut z = unit_phase(shift.num as i128 * m as i128, shift.den as i128);
                if order == 2 {
                    omega += 2.0 * PI * PI * p.a2 * mf * mf;
                    let m2 = m as i128 * m as i128;
                    z *= match p.commensurate {
                        Some(_) => unit_phase(shift.num as i128 * m2, den_q),
                        None => {
                            let turns = shift.periods() * mf * mf / p.revival_ratio();
                            Complex64::from_polar(1.0, -TAU * turns.fract())
                        }
                    };
                }
                (w, omega, z)
            })
            .collect()
    }

    fn checked(&self, grid: &[f64], shift: PeriodShift, order: usize) -> Result<()> {
        if let Some(limits) = &self.limits {
            let t_max = grid_max(grid) + (shift.periods() * self.phase.t_hyp()).abs();
            limits.check(t_max, order)?;
        }
        Ok(())
    }

    /// `a1~(t) = sum |a_n|^2 exp(-i t 2 pi A1 (n - n0))`.
    pub fn order1(&self, grid: &[f64]) -> Result<Vec<Complex64>> {
        self.order1_shifted(grid, PeriodShift::ZERO)
    }

    /// `a1~(t + shift)`. Only the unshifted grid is checked against the
    /// first-order window since `|a1~|` is `T_hyp`-periodic.
    pub fn order1_shifted(&self, grid: &[f64], shift: PeriodShift) -> Result<Vec<Complex64>> {
        self.checked(grid, PeriodShift::ZERO, 1)?;
        Ok(phase_sum(&self.modes(1, shift), grid))
    }

    /// `a2~(t) = sum |a_n|^2 exp(-i t (2 pi A1 m + 2 pi^2 A2 m^2))`.
    pub fn order2(&self, grid: &[f64]) -> Result<Vec<Complex64>> {
        self.order2_shifted(grid, PeriodShift::ZERO)
    }

    pub fn order2_shifted(&self, grid: &[f64], shift: PeriodShift) -> Result<Vec<Complex64>> {
        self.checked(grid, shift, 2)?;
        Ok(phase_sum(&self.modes(2, shift), grid))
    }

    /// `sum |a_n|^2 exp(-i t Q2(n))`, the second-order phase with its carrier.
    pub fn order2_with_carrier(&self, grid: &[f64]) -> Result<Vec<Complex64>> {
        self.checked(grid, PeriodShift::ZERO, 2)?;
        let q = self.phase.quadratic_phase();
        let modes: Vec<_> = self
            .weights
            .iter()
            .map(|&(m, w)| (w, q.eval(self.center + m), Complex64::new(1.0, 0.0)))
            .collect();
        Ok(phase_sum(&modes, grid))
    }

    /// `exp(-i t A0)`.
    pub fn carrier(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, -t * self.phase.a0)
    }

    /// Poisson-summed form of `|a1~(t)|`, from the Fourier data of `chi^2`.
    pub fn closed_form(&self, grid: &[f64], kind: ClosedForm) -> Result<Vec<f64>> {
        let l = self.width;
        let f = |xi: f64| self.profile.fourier_square(xi);
        let t_hyp = self.phase.t_hyp().abs();
        let images = (8.0 / l).ceil() as i64 + 2;
        let norm = match kind {
            ClosedForm::Poisson => {
                let mut s = f(0.0)?;
                for j in 1..=images {
                    s += 2.0 * f(l * j as f64)?;
                }
                s
            }
            ClosedForm::NearestImage => f(0.0)?,
        };
        grid.iter()
            .map(|&t| {
                let x = t / t_hyp;
                let nearest = x.round();
                match kind {
                    ClosedForm::Poisson => {
                        let mut s = 0.0;
                        for j in -images..=images {
                            s += f(l * (x - nearest - j as f64))?;
                        }
                        Ok(s / norm)
                    }
                    ClosedForm::NearestImage => Ok(f(l * (x - nearest).abs())? / norm),
                }
            })
            .collect()
    }

    /// `sum_k b~_k a1~(t + T_hyp (k / ell + p N_h / q))` against
    /// `a2~(t + (p/q) N_h T_hyp)`.
    pub fn fractional_prediction(&self, grid: &[f64], p: i64, q: i64) -> Result<FractionalComparison> {
        let coeffs = gauss::coefficients(p, q, self.center)?;
        let ell = coeffs.ell;
        let n_h = self.phase.n_h();
        let lhs_shift = PeriodShift::new(p * n_h, q)?;
        let lhs = self.order2_shifted(grid, lhs_shift)?;
        let mut rhs = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (k, bk) in coeffs.b_tilde.iter().enumerate() {
            if bk.norm() < 1e-15 {
                continue;
            }
            let shift = PeriodShift::new(k as i64 * q + p * n_h * ell, ell * q)?;
            let term = self.order1_shifted(grid, shift)?;
            for (r, v) in rhs.iter_mut().zip(term) {
                *r += bk * v;
            }
        }
        let sup_difference = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok(FractionalComparison {
            p,
            q,
            ell,
            n_h,
            b_tilde: coeffs.b_tilde,
            lhs,
            rhs,
            sup_difference,
        })
    }

    /// `sup_t | |a2~(t + N_h T_hyp)| - |a2~(t)| |`.
    pub fn revival_defect(&self, grid: &[f64]) -> Result<f64> {
        let shifted = self.order2_shifted(grid, PeriodShift::new(self.phase.n_h(), 1)?)?;
        let base = self.order2(grid)?;
        Ok(shifted
            .iter()
            .zip(&base)
            .map(|(a, b)| (a.norm() - b.norm()).abs())
            .fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalComparison {
    pub p: i64,
    pub q: i64,
    pub ell: i64,
    pub n_h: i64,
    pub b_tilde: Vec<Complex64>,
    /// `a2~(t + (p/q) N_h T_hyp)`.
    pub lhs: Vec<Complex64>,
    /// The clone superposition built from `a1~`.
    pub rhs: Vec<Complex64>,
    pub sup_difference: f64,
}

/// `sum_n |a_n|^2 exp(-i t lambda_n)` over one family's levels, scaled by the
/// family's squared weight in the packet.
pub fn partial_autocorrelation(
    window: &SpectrumWindow,
    packet: &Packet,
    family: Family,
    grid: &[f64],
) -> Result<Vec<Complex64>> {
    let (seq, weight) = match family {
        Family::Alpha => (packet.alpha.as_ref(), packet.alpha_weight),
        Family::Beta => (packet.beta.as_ref(), packet.beta_weight()),
    };
    let Some(seq) = seq else {
        return Ok(vec![Complex64::new(0.0, 0.0); grid.len()]);
    };
    let (lo, hi) = window.index_range(family).unwrap_or((0, -1));
    let modes: Vec<(f64, f64, Complex64)> = seq
        .indices()
        .zip(&seq.values)
        .map(|(n, a)| {
            window
                .level(family, n)
                .map(|l| (weight * weight * a * a, l.lambda, Complex64::new(1.0, 0.0)))
                .ok_or(Error::Support { index: n, lo, hi })
        })
        .collect::<Result<_>>()?;
    Ok(phase_sum(&modes, grid))
}

/// `r(t) = sum |c_n|^2 exp(-i t lambda_n)` over both families.
pub fn exact_return(window: &SpectrumWindow, packet: &Packet, grid: &[f64]) -> Result<Vec<Complex64>> {
    let a = partial_autocorrelation(window, packet, Family::Alpha, grid)?;
    let b = partial_autocorrelation(window, packet, Family::Beta, grid)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

/// Return amplitude of a packet laid on an ascending list of rescaled levels,
/// e.g. one parity class of the direct spectrum. The packet is centred on
/// the level nearest `E` and indexed by position in the list.
pub fn level_return(lambdas: &[f64], spec: &PacketSpec, grid: &[f64]) -> Result<Vec<Complex64>> {
    let center = lambdas
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - spec.energy).abs().total_cmp(&(b.1 - spec.energy).abs()))
        .map(|(i, _)| i as i64)
        .ok_or(Error::EmptyWindow)?;
    let seq = crate::wavepacket::build_coefficients(spec, Family::Alpha, center)?;
    let hi = lambdas.len() as i64 - 1;
    let modes: Vec<(f64, f64, Complex64)> = seq
        .indices()
        .zip(&seq.values)
        .map(|(n, a)| {
            usize::try_from(n)
                .ok()
                .and_then(|i| lambdas.get(i))
                .map(|&l| (a * a, l, Complex64::new(1.0, 0.0)))
                .ok_or(Error::Support { index: n, lo: 0, hi })
        })
        .collect::<Result<_>>()?;
    Ok(phase_sum(&modes, grid))
}

/// `n` samples per `|T_hyp|` on `[0, t_max]`.
pub fn uniform_grid(t_hyp: f64, t_max: f64, per_period: usize) -> Vec<f64> {
    let dt = t_hyp.abs() / per_period as f64;
    let n = (t_max / dt).floor() as usize;
    (0..=n).map(|i| i as f64 * dt).collect()
}

/// 64 samples per `|T_hyp|` on `[0, t_max]`.
pub fn hyperbolic_grid(phase: &PhaseData, t_max: f64) -> Vec<f64> {
    uniform_grid(phase.t_hyp(), t_max, 64)
}

/// 16 samples per `|T_hyp|` on `[0, 1.2 |T_rev|]`, at most `2e6` points.
pub fn revival_grid(phase: &PhaseData) -> Vec<f64> {
    let t_max = 1.2 * phase.t_rev().abs();
    let per = (16.0 * t_max / phase.t_hyp().abs()).ceil();
    let n = per.min(2e6) as usize;
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Peaks {
    pub times: Vec<f64>,
    pub heights: Vec<f64>,
    /// Median spacing of consecutive peaks, when there are at least two.
    pub period: Option<f64>,
}

/// Interior local maxima above `threshold`, located by a parabola through
/// the three samples around each maximum.
pub fn detect_peaks(times: &[f64], values: &[f64], threshold: f64) -> Result<Peaks> {
    let mut peak_times = Vec::new();
    let mut heights = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if b > threshold && b > a && b >= c {
            let denom = a - 2.0 * b + c;
            let offset = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let dt = 0.5 * (times[i + 1] - times[i - 1]);
            peak_times.push(times[i] + offset * dt);
            heights.push(b - 0.25 * (a - c) * offset);
        }
    }
    if peak_times.is_empty() {
        return Err(Error::NoPeaks { threshold });
    }
    let spacings: Vec<f64> = peak_times.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(Peaks {
        period: crate::fit::median(&spacings),
        times: peak_times,
        heights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_spectrum::{Level, ModelOptions};
    use crate::potential::canonical_double_well;
    use crate::wavepacket::build_coefficients;
    use proptest::prelude::*;

    fn synthetic(radius_width: f64, phase: PhaseData) -> Approximants {
        // a packet with the requested width and no time guards
        let h = (-(radius_width.powf(1.0 / 0.8))).exp();
        let spec = PacketSpec::hyperbolic_defaults(h, 0.0).unwrap();
        let seq = build_coefficients(&spec, Family::Alpha, phase.center).unwrap();
        Approximants::new(&spec, &seq, phase, None)
    }

    /// Model at `h` with a window wide enough for the packet, and the packet.
    fn model_setup(h: f64, spec: &PacketSpec) -> (SpectralModel, SpectrumWindow, Packet) {
        let gap = 2.0 * TAU * 2f64.sqrt() / h.ln().abs();
        let bound = (spec.energy.abs() + 1.5 * gap * spec.radius() as f64 + 1.0).max(1.0);
        let opts = ModelOptions {
            lambda_bound: bound,
            ..ModelOptions::default()
        };
        let model = SpectralModel::new(&canonical_double_well(), h, opts).unwrap();
        let window = model.solve_families().unwrap();
        let packet = Packet::from_window(spec, &window, 1.0).unwrap();
        (model, window, packet)
    }

    #[test]
    fn blocked_sum_matches_direct_exponentials() {
        let modes: Vec<_> = (-20..=20)
            .map(|m| (1.0 / 41.0, 0.37 * m as f64 + 0.01 * (m * m) as f64, unit_phase(m as i128, 7)))
            .collect();
        let grid = uniform_grid(1.0, 5e4, 3);
        let fast = phase_sum(&modes, &grid);
        let mut jittered = grid.clone();
        jittered[1] += 1e-3;
        assert!(uniform_step(&jittered).is_none());
        let slow = phase_sum(&modes, &jittered);
        for (i, (a, b)) in fast.iter().zip(&slow).enumerate() {
            if i != 1 {
                assert!((a - b).norm() < 1e-9, "{i}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn quadratic_phase_at_center() {
        let q = PhaseData::synthetic(0.37, -0.1, 0.003, 17).quadratic_phase();
        assert_eq!(q.eval(17), 0.37);
    }

    #[test]
    fn period_bookkeeping() {
        let p = PhaseData::synthetic(0.0, -0.1, -0.0005, 0);
        assert!((p.t_hyp() + 10.0).abs() < 1e-12);
        let ratio = p.t_rev() / p.t_hyp();
        assert_eq!(p.n_h(), ratio.floor() as i64);
        assert!((0.0..1.0).contains(&p.theta_hat()));
        let c = PhaseData::commensurate(0.0, -0.1, 40, 0).unwrap();
        assert_eq!(c.n_h(), 40);
        assert!((c.t_rev() / c.t_hyp() - 40.0).abs() < 1e-12);
    }

    #[test]
    fn order1_is_periodic_and_starts_at_one() {
        let ap = synthetic(3.0, PhaseData::synthetic(0.2, -0.07, -1e-4, 5));
        let t_hyp = ap.phase.t_hyp().abs();
        let grid = uniform_grid(t_hyp, 3.0 * t_hyp, 64);
        let shifted: Vec<f64> = grid.iter().map(|t| t + t_hyp).collect();
        let a = ap.order1(&grid).unwrap();
        let b = ap.order1(&shifted).unwrap();
        assert!((a[0] - 1.0).norm() < 1e-12);
        for (x, y) in a.iter().zip(&b) {
            assert!((x.norm() - y.norm()).abs() < 1e-10);
        }
        let c = ap.order1_shifted(&grid, PeriodShift::new(1, 1).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&c) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn full_revival_when_commensurate() {
        let phase = PhaseData::commensurate(0.5, -0.08, 37, 11).unwrap();
        let ap = synthetic(4.0, phase);
        let grid = uniform_grid(phase.t_hyp(), 5.0 * phase.t_hyp().abs(), 64);
        let later: Vec<f64> = grid.iter().map(|t| t + phase.t_rev().abs()).collect();
        let a = ap.order2(&grid).unwrap();
        let b = ap.order2(&later).unwrap();
        let c = ap.order2_shifted(&grid, PeriodShift::new(37, 1).unwrap()).unwrap();
        for i in 0..grid.len() {
            assert!((a[i] - c[i]).norm() < 1e-10);
            assert!((a[i] - b[i]).norm() < 1e-9, "{}", (a[i] - b[i]).norm());
        }
    }

    #[test]
    fn carrier_identity() {
        let ap = synthetic(3.0, PhaseData::synthetic(0.61, -0.07, -2e-4, -4));
        let grid = uniform_grid(ap.phase.t_hyp(), 40.0, 16);
        let with = ap.order2_with_carrier(&grid).unwrap();
        let without = ap.order2(&grid).unwrap();
        for (t, (a, b)) in grid.iter().zip(with.iter().zip(&without)) {
            assert!((a - ap.carrier(*t) * b).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_direct_sum() {
        let ap = synthetic(1.7, PhaseData::synthetic(0.0, -0.07, -1e-4, 0));
        let t_hyp = ap.phase.t_hyp().abs();
        let grid = uniform_grid(t_hyp, 2.0 * t_hyp, 200);
        let direct = ap.order1(&grid).unwrap();
        let closed = ap.closed_form(&grid, ClosedForm::Poisson).unwrap();
        for (d, c) in direct.iter().zip(&closed) {
            assert!((d.norm() - c).abs() < 1e-12);
        }
        let nearest = ap.closed_form(&grid, ClosedForm::NearestImage).unwrap();
        assert_eq!(nearest[0], 1.0);
        assert!(nearest.iter().zip(&closed).all(|(a, b)| (a - b).abs() < 1e-2));
    }

    #[test]
    fn closed_form_needs_fourier_data() {
        let mut ap = synthetic(2.0, PhaseData::synthetic(0.0, -0.1, -1e-4, 0));
        ap.profile = Profile::Bump;
        assert!(matches!(ap.closed_form(&[0.0], ClosedForm::Poisson), Err(Error::Profile(_))));
    }

    #[test]
    fn half_revival_uses_a_single_clone() {
        // (p, q) = (1, 2): b~_0 = 0 and b~_1 = 1
        let phase = PhaseData::commensurate(0.0, -0.09, 1_000_000_000_000_001, 3).unwrap();
        let ap = synthetic(2.0, phase);
        let grid = uniform_grid(phase.t_hyp(), 2.0 * phase.t_hyp().abs(), 50);
        let cmp = ap.fractional_prediction(&grid, 1, 2).unwrap();
        assert!(cmp.b_tilde[0].norm() < 1e-15 && (cmp.b_tilde[1] - 1.0).norm() < 1e-14);
        let direct = ap
            .order1_shifted(&grid, PeriodShift::new(phase.n_h() + 1, 2).unwrap())
            .unwrap();
        for (a, b) in cmp.rhs.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(cmp.sup_difference < 1e-10, "{}", cmp.sup_difference);
        let trivial = ap.fractional_prediction(&grid, 1, 1).unwrap();
        let a1 = ap.order1(&grid).unwrap();
        for (a, b) in trivial.rhs.iter().zip(&a1) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn time_scale_guard() {
        let spec = PacketSpec::hyperbolic_defaults(1e-4, 0.0).unwrap();
        let seq = build_coefficients(&spec, Family::Alpha, 0).unwrap();
        let limits = TimeLimits::from_defaults(&spec).unwrap();
        let ap = Approximants::new(&spec, &seq, PhaseData::synthetic(0.0, -0.1, -1e-3, 0), Some(limits));
        let too_long = [0.0, 1.01 * limits.order1_limit()];
        assert!(matches!(ap.order1(&too_long), Err(Error::TimeScale { .. })));
        assert!(ap.order1(&[0.0, limits.order1_limit()]).is_ok());
        assert!(matches!(ap.order2(&too_long), Err(Error::Parameter(_))));
    }

    #[test]
    fn peaks_of_order1_track_t_hyp() {
        let ap = synthetic(2.5, PhaseData::synthetic(0.0, -0.07, -1e-4, 0));
        let t_hyp = ap.phase.t_hyp().abs();
        let grid = uniform_grid(t_hyp, 6.0 * t_hyp, 64);
        let c: Vec<f64> = ap.order1(&grid).unwrap().iter().map(|z| z.norm()).collect();
        let peaks = detect_peaks(&grid, &c, 0.5).unwrap();
        assert!((peaks.period.unwrap() - t_hyp).abs() < 0.02 * t_hyp);
        let mono: Vec<f64> = grid.iter().map(|t| -t).collect();
        assert!(matches!(detect_peaks(&grid, &mono, 0.0), Err(Error::NoPeaks { .. })));
    }

    #[test]
    fn exact_return_is_unitary_and_splits_by_family() {
        let h = 1e-4;
        let spec = PacketSpec::revival_defaults(h, -0.5).unwrap();
        let (_, window, _) = model_setup(h, &spec);
        let (n0, m0) = crate::wavepacket::select_centers(&window, spec.energy).unwrap();
        let a = build_coefficients(&spec, Family::Alpha, n0).unwrap();
        let b = build_coefficients(&spec, Family::Beta, m0).unwrap();
        let packet = Packet::mixed(a, b, 0.6).unwrap();
        let grid = uniform_grid(10.0, 200.0, 64);
        let r = exact_return(&window, &packet, &grid).unwrap();
        let pa = partial_autocorrelation(&window, &packet, Family::Alpha, &grid).unwrap();
        let pb = partial_autocorrelation(&window, &packet, Family::Beta, &grid).unwrap();
        assert!((r[0] - 1.0).norm() < 1e-12);
        for i in 0..grid.len() {
            assert!(r[i].norm() <= 1.0 + 1e-12);
            assert!((r[i] - pa[i] - pb[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn support_must_lie_in_window() {
        let h = 1e-3;
        let spec = PacketSpec::hyperbolic_defaults(h, 0.0).unwrap();
        let model = SpectralModel::new(&canonical_double_well(), h, ModelOptions::default()).unwrap();
        let window = model.solve_families().unwrap();
        let packet = Packet::from_window(&spec, &window, 1.0).unwrap();
        assert!(matches!(
            exact_return(&window, &packet, &[0.0]),
            Err(Error::Support { .. })
        ));
    }

    #[test]
    fn model_phase_data_and_order1_error() {
        let h = 1e-5;
        let spec = PacketSpec::revival_defaults(h, -0.5).unwrap();
        let (model, window, packet) = model_setup(h, &spec);
        let seq = packet.alpha.as_ref().unwrap();
        let phase = PhaseData::from_model(&model, &window, Family::Alpha, seq.center).unwrap();
        assert!(phase.t_hyp() < 0.0 && phase.n_h() >= 1);
        assert!(phase.curvature.unwrap() < 0.0);
        let limits = TimeLimits::from_defaults(&spec).unwrap();
        let ap = Approximants::new(&spec, seq, phase, Some(limits));
        let grid = uniform_grid(phase.t_hyp(), 2.0 * phase.t_hyp().abs(), 64);
        let exact = partial_autocorrelation(&window, &packet, Family::Alpha, &grid).unwrap();
        let err = |approx: Vec<Complex64>| {
            grid.iter()
                .zip(exact.iter().zip(&approx))
                .map(|(t, (a, b))| (a - ap.carrier(*t) * b).norm())
                .fold(0.0, f64::max)
        };
        let e1 = err(ap.order1(&grid).unwrap());
        let e2 = err(ap.order2(&grid).unwrap());
        assert!(e2 < e1 && e2 < 0.3, "{e1} {e2}");
        let peaks = detect_peaks(
            &grid,
            &exact.iter().map(|z| z.norm()).collect::<Vec<_>>(),
            0.5,
        )
        .unwrap();
        assert!((peaks.times[0] - phase.t_hyp().abs()).abs() < 0.05 * phase.t_hyp().abs());
    }

    #[test]
    fn window_level_lookup_error_names_range() {
        let w = SpectrumWindow {
            h: 1e-3,
            lambda_bound: 1.0,
            alphas: vec![Level {
                index: 4,
                lambda: 0.0,
                eigenvalue: 0.0,
            }],
            betas: vec![],
        };
        let model = SpectralModel::new(&canonical_double_well(), 1e-3, ModelOptions::default()).unwrap();
        assert_eq!(
            PhaseData::from_model(&model, &w, Family::Alpha, 9),
            Err(Error::Support { index: 9, lo: 4, hi: 4 })
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn approximants_bounded_by_one(
            a1 in -0.3f64..-0.01,
            a2 in -1e-3f64..1e-3,
            t in 0.0f64..500.0,
        ) {
            let ap = synthetic(2.0, PhaseData::synthetic(0.0, a1, a2, 0));
            let v1 = ap.order1(&[t]).unwrap()[0].norm();
            let v2 = ap.order2(&[t]).unwrap()[0].norm();
            prop_assert!(v1 <= 1.0 + 1e-12 && v2 <= 1.0 + 1e-12);
        }
    }
}
