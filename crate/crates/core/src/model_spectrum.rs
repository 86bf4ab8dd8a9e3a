//! Singular Bohr–Sommerfeld model of the spectrum near the saddle energy.
//!
//! The eigenvalues come in two interleaved families, `alpha_k = h A_h(2 pi k)`
//! and `beta_l = h B_h(2 pi l)`, where `A_h` and `B_h` invert
//!
//! ```text
//! Y_h = f_h - arccos(cos(g_h) / sqrt(1 + exp(2 pi eps/h)))
//! Z_h = f_h + arccos(cos(g_h) / sqrt(1 + exp(2 pi eps/h)))
//! ```
//!
//! on the rescaled energy `lambda = E / h`. The term `-(S+(0) + S-(0)) / 2h`
//! of `f_h` is huge for small `h`; it is split once into `2 pi K0 + phi0`
//! with integer `K0`, and every evaluation works with the reduced value.
//! The energy dependence of the actions is carried by a Chebyshev series of
//! `dS/dE` around the saddle, integrated from zero so that no cancellation
//! against `S(0) / h` ever happens.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::potential::{singular_action, singular_action_derivative, Lobe, Potential};
use crate::special::arg_gamma_half_line;
use crate::{Error, Result};

/// Value and first three derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3(pub [f64; 4]);

impl Jet3 {
    pub fn constant(c: f64) -> Self {
        Jet3([c, 0.0, 0.0, 0.0])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `phi(self)` given `phi` and its first three derivatives at the value.
    pub fn compose(&self, phi: [f64; 4]) -> Self {
        let [_, u1, u2, u3] = self.0;
        Jet3([
            phi[0],
            phi[1] * u1,
            phi[2] * u1 * u1 + phi[1] * u2,
            phi[3] * u1 * u1 * u1 + 3.0 * phi[2] * u1 * u2 + phi[1] * u3,
        ])
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet3(self.0.map(|v| v * s))
    }
}

impl std::ops::Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl std::ops::Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl std::ops::Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, o: Jet3) -> Jet3 {
        let (u, v) = (self.0, o.0);
        Jet3([
            u[0] * v[0],
            u[1] * v[0] + u[0] * v[1],
            u[2] * v[0] + 2.0 * u[1] * v[1] + u[0] * v[2],
            u[3] * v[0] + 3.0 * u[2] * v[1] + 3.0 * u[1] * v[2] + u[0] * v[3],
        ])
    }
}

/// Chebyshev series `sum a_k T_k(t)` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
struct Chebyshev {
    coeffs: Vec<f64>,
}

impl Chebyshev {
    fn interpolate(n: usize, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Self> {
        let values: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|j| f((PI * (j as f64 + 0.5) / n as f64).cos()))
            .collect::<Result<_>>()?;
        let coeffs = (0..n)
            .map(|k| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                    .sum();
                if k == 0 {
                    s / n as f64
                } else {
                    2.0 * s / n as f64
                }
            })
            .collect();
        Ok(Self { coeffs })
    }

    fn eval(&self, t: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &a in self.coeffs.iter().skip(1).rev() {
            (b1, b2) = (2.0 * t * b1 - b2 + a, b1);
        }
        t * b1 - b2 + self.coeffs[0]
    }

    fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n < 2 {
            return Self { coeffs: vec![0.0] };
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        Self { coeffs: d }
    }

    /// Antiderivative coefficients, constant term left at zero.
    fn integral(&self) -> Self {
        let n = self.coeffs.len();
        let a = |k: usize| self.coeffs.get(k).copied().unwrap_or(0.0);
        let mut c = vec![0.0; n + 1];
        c[1] = a(0) - 0.5 * a(2);
        for (k, ck) in c.iter_mut().enumerate().skip(2) {
            *ck = (a(k - 1) - a(k + 1)) / (2.0 * k as f64);
        }
        Self { coeffs: c }
    }

    /// `sum a_k (T_k(t) - T_k(0)) / t`, finite at `t = 0`.
    fn eval_from_zero_over_t(&self, t: f64) -> f64 {
        let t0 = |k: usize| match k % 4 {
            0 => 1.0,
            2 => -1.0,
            _ => 0.0,
        };
        let mut total = 0.0;
        let (mut e_prev, mut e) = (0.0, 1.0);
        for (k, &a) in self.coeffs.iter().enumerate().skip(1) {
            total += a * e;
            let next = 2.0 * (t * e + t0(k)) - e_prev;
            (e_prev, e) = (e, next);
        }
        total
    }

    /// `sum a_k (T_k(t) - T_k(0))`, free of cancellation for small `t`.
    #[cfg(test)]
    fn eval_from_zero(&self, t: f64) -> f64 {
        let t0 = |k: usize| match k % 4 {
            0 => 1.0,
            2 => -1.0,
            _ => 0.0,
        };
        let mut total = 0.0;
        let (mut d_prev, mut d) = (0.0, t);
        for (k, &a) in self.coeffs.iter().enumerate().skip(1) {
            total += a * d;
            let next = 2.0 * t * (d + t0(k)) - d_prev;
            (d_prev, d) = (d, next);
        }
        total
    }
}

/// `P(lambda) = (S(lambda h) - S(0)) / h` and its derivatives for one lobe.
#[derive(Debug, Clone, PartialEq)]
struct ActionSeries {
    slope: Chebyshev,
    antiderivative: Chebyshev,
    slope_d1: Chebyshev,
    slope_d2: Chebyshev,
    half_width: f64,
}

impl ActionSeries {
    fn build(v: &Potential, lobe: Lobe, half_width: f64, nodes: usize) -> Result<Self> {
        let slope = Chebyshev::interpolate(nodes, |t| {
            singular_action_derivative(v, half_width * t, lobe)
        })?;
        let antiderivative = slope.integral();
        let slope_d1 = slope.derivative();
        let slope_d2 = slope_d1.derivative();
        Ok(Self {
            slope,
            antiderivative,
            slope_d1,
            slope_d2,
            half_width,
        })
    }

    /// Stays finite when `h` underflows to zero, where `P(lambda)` tends to
    /// `S'(0) lambda`.
    fn jet(&self, lambda: f64, h: f64) -> Jet3 {
        let w = self.half_width;
        let t = lambda * h / w;
        let r = h / w;
        Jet3([
            lambda * self.antiderivative.eval_from_zero_over_t(t),
            self.slope.eval(t),
            r * self.slope_d1.eval(t),
            r * r * self.slope_d2.eval(t),
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    Alpha,
    Beta,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Alpha => "alpha",
            Family::Beta => "beta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOptions {
    pub delta: f64,
    /// Half-width of the rescaled energy interval; `1` is the window `[-h, h]`.
    pub lambda_bound: f64,
    /// Relative padding of the interpolation interval beyond `lambda_bound`.
    pub margin: f64,
    pub chebyshev_nodes: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            delta: 0.1,
            lambda_bound: 1.0,
            margin: 0.05,
            chebyshev_nodes: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    potential: Potential,
    h: f64,
    ln_h: f64,
    omega: f64,
    opts: ModelOptions,
    plus: ActionSeries,
    minus: ActionSeries,
    action_plus_0: f64,
    action_minus_0: f64,
    /// `-(S+(0) + S-(0)) / 2h = 2 pi k0 + phi0`.
    k0: i64,
    phi0: f64,
    /// `(S+(0) - S-(0)) / 2h` reduced modulo `2 pi`.
    g0: f64,
    phase_resolved: bool,
}

/// Smallest half-width of the interpolation interval for `S'`.
const SERIES_FLOOR: f64 = 1e-9;

/// Beyond this size `S(0) / h` is not known to better than about a hundredth
/// of a turn, so its residue modulo `2 pi` carries no information.
const PHASE_LIMIT: f64 = 1e13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Level {
    pub index: i64,
    pub lambda: f64,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumWindow {
    pub h: f64,
    pub lambda_bound: f64,
    /// Ascending index, hence descending eigenvalue.
    pub alphas: Vec<Level>,
    pub betas: Vec<Level>,
}

impl SpectrumWindow {
    pub fn family(&self, family: Family) -> &[Level] {
        match family {
            Family::Alpha => &self.alphas,
            Family::Beta => &self.betas,
        }
    }

    /// Inclusive index range of a family, `None` when it is empty.
    pub fn index_range(&self, family: Family) -> Option<(i64, i64)> {
        let f = self.family(family);
        Some((f.first()?.index, f.last()?.index))
    }

    pub fn level(&self, family: Family, index: i64) -> Option<&Level> {
        let f = self.family(family);
        let first = f.first()?.index;
        let pos = usize::try_from(index - first).ok()?;
        f.get(pos)
    }

    /// The part of the window with `|lambda| <= bound`.
    pub fn restricted(&self, bound: f64) -> SpectrumWindow {
        let keep = |v: &Vec<Level>| v.iter().copied().filter(|l| l.lambda.abs() <= bound).collect();
        SpectrumWindow {
            h: self.h,
            lambda_bound: bound.min(self.lambda_bound),
            alphas: keep(&self.alphas),
            betas: keep(&self.betas),
        }
    }

    /// Consecutive gaps `|e_k - e_{k+1}|` within one family.
    pub fn gaps(&self, family: Family) -> Vec<f64> {
        self.family(family)
            .windows(2)
            .map(|w| (w[0].eigenvalue - w[1].eigenvalue).abs())
            .collect()
    }

    pub fn count(&self) -> usize {
        self.alphas.len() + self.betas.len()
    }

    /// All eigenvalues of both families, ascending.
    pub fn merged(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .alphas
            .iter()
            .chain(&self.betas)
            .map(|l| l.eigenvalue)
            .collect();
        all.sort_by(|a, b| a.total_cmp(b));
        all
    }

    /// `beta_{k+1} < alpha_k < beta_k` for every `k` where the neighbours exist.
    pub fn interleaving_violations(&self) -> Vec<i64> {
        self.alphas
            .iter()
            .filter(|a| {
                let below = self.level(Family::Beta, a.index + 1);
                let above = self.level(Family::Beta, a.index);
                below.is_some_and(|b| b.lambda >= a.lambda)
                    || above.is_some_and(|b| b.lambda <= a.lambda)
            })
            .map(|a| a.index)
            .collect()
    }
}

/// `A(x0)`, `A'(x0)`, `A''(x0)`, `A'''(x0)` of the inverse `A` of a function
/// whose jet at `preimage = A(x0)` is given.
pub fn inverse_derivatives(preimage: f64, jet: Jet3) -> [f64; 4] {
    let [_, d1, d2, d3] = jet.0;
    [
        preimage,
        1.0 / d1,
        -d2 / d1.powi(3),
        -d3 / d1.powi(4) + 3.0 * d2 * d2 / d1.powi(5),
    ]
}

impl SpectralModel {
    pub fn new(potential: &Potential, h: f64, opts: ModelOptions) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::Domain {
                name: "h",
                value: h,
                domain: "(0, 1)".into(),
            });
        }
        Self::build(potential, h, h.ln(), opts)
    }

    /// Model at `h = exp(-log_h)`, usable far below the smallest positive
    /// double. Terms of order `h` are dropped once `h` underflows.
    pub fn from_log_h(potential: &Potential, log_h: f64, opts: ModelOptions) -> Result<Self> {
        if !(log_h > 0.0 && log_h.is_finite()) {
            return Err(Error::Domain {
                name: "|ln h|",
                value: log_h,
                domain: "(0, inf)".into(),
            });
        }
        Self::build(potential, (-log_h).exp(), -log_h, opts)
    }

    fn build(potential: &Potential, h: f64, ln_h: f64, opts: ModelOptions) -> Result<Self> {
        if !(opts.lambda_bound >= 1.0) {
            return Err(Error::Parameter("lambda_bound must be at least 1".into()));
        }
        let half_width = opts.lambda_bound * h * (1.0 + opts.margin);
        if half_width > opts.delta {
            return Err(Error::Domain {
                name: "lambda_bound * h",
                value: half_width,
                domain: format!("[0, delta = {}]", opts.delta),
            });
        }
        for e in [-opts.delta, opts.delta] {
            potential.turning_points(e, Lobe::Plus)?;
            potential.turning_points(e, Lobe::Minus)?;
        }
        let series_width = half_width.max(SERIES_FLOOR);
        let plus = ActionSeries::build(potential, Lobe::Plus, series_width, opts.chebyshev_nodes)?;
        let minus = if potential.is_even() {
            plus.clone()
        } else {
            ActionSeries::build(potential, Lobe::Minus, series_width, opts.chebyshev_nodes)?
        };
        let action_plus_0 = singular_action(potential, 0.0, Lobe::Plus)?;
        let action_minus_0 = singular_action(potential, 0.0, Lobe::Minus)?;
        let c = -(action_plus_0 + action_minus_0) / (2.0 * h);
        let phase_resolved = c.abs() <= PHASE_LIMIT;
        let (k0, phi0, g0) = if phase_resolved {
            let phi0 = c.rem_euclid(TAU);
            let k0 = ((c - phi0) / TAU).round() as i64;
            let g0 = ((action_plus_0 - action_minus_0) / (2.0 * h)).rem_euclid(TAU);
            (k0, phi0, g0)
        } else {
            (0, 0.0, 0.0)
        };
        Ok(Self {
            potential: potential.clone(),
            h,
            ln_h,
            omega: potential.omega(),
            opts,
            plus,
            minus,
            action_plus_0,
            action_minus_0,
            k0,
            phi0,
            g0,
            phase_resolved,
        })
    }

    /// Zero once `h` underflows; see [`SpectralModel::log_h`].
    pub fn h(&self) -> f64 {
        self.h
    }

    /// `|ln h|`.
    pub fn log_h(&self) -> f64 {
        -self.ln_h
    }

    /// Whether `-(S+(0) + S-(0)) / 2h` is resolved modulo `2 pi`. When it is
    /// not, `K0`, its residue and the residue of `g_h(0)` are all set to zero,
    /// which fixes one member of a family of models that differ only by a
    /// constant phase.
    pub fn phase_resolved(&self) -> bool {
        self.phase_resolved
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn lambda_bound(&self) -> f64 {
        self.opts.lambda_bound
    }

    pub fn options(&self) -> ModelOptions {
        self.opts
    }

    /// Integer part `K0` of `-(S+(0) + S-(0)) / (4 pi h)`.
    pub fn branch_offset(&self) -> i64 {
        self.k0
    }

    /// Leading normal-form energy `eps(E) = E / omega`.
    pub fn epsilon(&self, energy: f64) -> f64 {
        energy / self.omega
    }

    fn check(&self, lambda: f64) -> Result<()> {
        if lambda.abs() <= self.opts.lambda_bound {
            Ok(())
        } else {
            Err(Error::Domain {
                name: "lambda",
                value: lambda,
                domain: format!("[-{0}, {0}]", self.opts.lambda_bound),
            })
        }
    }

    /// `theta_+(lambda h)` and `theta_-(lambda h)` without the constants
    /// `S_+-(0) / h`.
    fn theta_jets(&self, lambda: f64) -> (Jet3, Jet3) {
        (self.plus.jet(lambda, self.h), self.minus.jet(lambda, self.h))
    }

    /// `f_h - 2 pi K0` as a jet in `lambda`.
    fn f_reduced_jet(&self, lambda: f64) -> Jet3 {
        let (tp, tm) = self.theta_jets(lambda);
        let y = lambda / self.omega;
        let ag = arg_gamma_half_line(y);
        let iw = 1.0 / self.omega;
        let log_term = Jet3([y * self.ln_h, iw * self.ln_h, 0.0, 0.0]);
        let gamma_term = Jet3([ag[0], ag[1] * iw, ag[2] * iw * iw, ag[3] * iw * iw * iw]);
        Jet3::constant(self.phi0 + FRAC_PI_2) - (tp + tm).scale(0.5) + log_term + gamma_term
    }

    fn g_jet(&self, lambda: f64) -> Jet3 {
        let (tp, tm) = self.theta_jets(lambda);
        Jet3::constant(self.g0) + (tp - tm).scale(0.5)
    }

    /// `arccos(cos g / sqrt(1 + exp(2 pi y)))` with `y = eps(lambda h)/h`.
    fn arccos_jet(&self, lambda: f64) -> Jet3 {
        let y = lambda / self.omega;
        let iw = 1.0 / self.omega;
        // sigma = e/(1+e), w = (1+e)^(-1/2) with e = exp(2 pi y)
        let r = (-TAU * y.abs()).exp();
        let (sigma, w) = if y >= 0.0 {
            (1.0 / (1.0 + r), (r / (1.0 + r)).sqrt())
        } else {
            (r / (1.0 + r), 1.0 / (1.0 + r).sqrt())
        };
        let wy = [
            w,
            -PI * sigma * w,
            -PI * PI * sigma * w * (2.0 - 3.0 * sigma),
            -PI.powi(3) * sigma * w * (4.0 - 18.0 * sigma + 15.0 * sigma * sigma),
        ];
        let w_jet = Jet3([wy[0], wy[1] * iw, wy[2] * iw * iw, wy[3] * iw.powi(3)]);
        let g = self.g_jet(lambda);
        let (s, c) = g.value().sin_cos();
        let cos_g = g.compose([c, -s, -c, s]);
        let u = cos_g * w_jet;
        let uv = u.value();
        let one_minus_u2 = s * s + c * c * sigma;
        let root = one_minus_u2.sqrt();
        u.compose([
            root.atan2(uv),
            -1.0 / root,
            -uv / (one_minus_u2 * root),
            -(1.0 + 2.0 * uv * uv) / (one_minus_u2 * one_minus_u2 * root),
        ])
    }

    /// `Y_h - 2 pi K0` as a jet; the reduced form keeps the root residual
    /// meaningful at any `h`.
    pub fn y_jet(&self, lambda: f64) -> Result<Jet3> {
        self.check(lambda)?;
        Ok(self.f_reduced_jet(lambda) - self.arccos_jet(lambda))
    }

    /// `Z_h - 2 pi K0` as a jet.
    pub fn z_jet(&self, lambda: f64) -> Result<Jet3> {
        self.check(lambda)?;
        Ok(self.f_reduced_jet(lambda) + self.arccos_jet(lambda))
    }

    fn family_jet(&self, family: Family, lambda: f64) -> Result<Jet3> {
        match family {
            Family::Alpha => self.y_jet(lambda),
            Family::Beta => self.z_jet(lambda),
        }
    }

    pub fn f_h(&self, lambda: f64) -> Result<f64> {
        self.check(lambda)?;
        Ok(TAU * self.k0 as f64 + self.f_reduced_jet(lambda).value())
    }

    pub fn g_h(&self, lambda: f64) -> Result<f64> {
        self.check(lambda)?;
        let (tp, tm) = self.theta_jets(lambda);
        let constant = if self.phase_resolved {
            (self.action_plus_0 - self.action_minus_0) / (2.0 * self.h)
        } else {
            self.g0
        };
        Ok(constant + 0.5 * (tp.value() - tm.value()))
    }

    pub fn y_h(&self, lambda: f64) -> Result<f64> {
        Ok(TAU * self.k0 as f64 + self.y_jet(lambda)?.value())
    }

    pub fn z_h(&self, lambda: f64) -> Result<f64> {
        Ok(TAU * self.k0 as f64 + self.z_jet(lambda)?.value())
    }

    /// `Y_h^(order)(lambda)` for `order` in 1..=3.
    pub fn derivatives_y(&self, lambda: f64, order: usize) -> Result<f64> {
        if !(1..=3).contains(&order) {
            return Err(Error::Parameter(format!("derivative order {order} not in 1..=3")));
        }
        Ok(self.y_jet(lambda)?.0[order])
    }

    /// `exp(2 pi eps(lambda h) / h)`.
    pub fn tunnelling_factor(&self, lambda: f64) -> f64 {
        (TAU * lambda / self.omega).exp()
    }

    /// Solves both families on `[-lambda_bound, lambda_bound]`.
    pub fn solve_families(&self) -> Result<SpectrumWindow> {
        let alphas = self.solve_family(Family::Alpha)?;
        let betas = self.solve_family(Family::Beta)?;
        Ok(SpectrumWindow {
            h: self.h,
            lambda_bound: self.opts.lambda_bound,
            alphas,
            betas,
        })
    }

    fn solve_family(&self, family: Family) -> Result<Vec<Level>> {
        let name = match family {
            Family::Alpha => "Y_h",
            Family::Beta => "Z_h",
        };
        let bound = self.opts.lambda_bound;
        let n = (400.0 * bound).ceil() as usize;
        let grid: Vec<f64> = (0..=n).map(|i| -bound + 2.0 * bound * i as f64 / n as f64).map(|l: f64| l.clamp(-bound, bound)).collect();
        let jets: Vec<Jet3> = grid
            .iter()
            .map(|&l| self.family_jet(family, l))
            .collect::<Result<_>>()?;
        let sign = jets[0].0[1].signum();
        if let Some(bad) = jets.iter().zip(&grid).find(|(j, _)| !(j.0[1] * sign > 0.0)) {
            return Err(Error::Monotonicity {
                function: name,
                lambda: *bad.1,
            });
        }
        let values: Vec<f64> = jets.iter().map(|j| j.value()).collect();
        let (lo, hi) = (values[0].min(values[n]), values[0].max(values[n]));
        let k_lo = (lo / TAU).ceil() as i64;
        let k_hi = (hi / TAU).floor() as i64;
        let mut levels: Vec<Level> = (k_lo..=k_hi)
            .into_par_iter()
            .map(|k| {
                let target = TAU * k as f64;
                let cell = values
                    .windows(2)
                    .position(|w| (w[0] - target) * (w[1] - target) <= 0.0)
                    .ok_or(Error::RootBracket {
                        function: name,
                        target,
                    })?;
                let f = |l: f64| self.family_jet(family, l).map(|j| j.value() - target).unwrap_or(f64::NAN);
                let lambda = crate::potential::bisect(f, grid[cell], grid[cell + 1]);
                let residual = f(lambda).abs();
                if !(residual <= 1e-12) {
                    return Err(Error::RootBracket {
                        function: name,
                        target,
                    });
                }
                Ok(Level {
                    index: self.k0 + k,
                    lambda,
                    eigenvalue: self.h * lambda,
                })
            })
            .collect::<Result<_>>()?;
        levels.sort_by_key(|l| l.index);
        Ok(levels)
    }

    /// Reduced residual `Y_h(lambda) - 2 pi k` (or `Z_h`) of a solved level.
    pub fn residual(&self, family: Family, level: &Level) -> Result<f64> {
        let jet = self.family_jet(family, level.lambda)?;
        Ok(jet.value() - TAU * (level.index - self.k0) as f64)
    }

    /// `[A(2 pi k), A'(2 pi k), A''(2 pi k), A'''(2 pi k)]` at a solved level
    /// of the family, with `A` the inverse of `Y_h` (or `Z_h`).
    pub fn inverse_derivatives_at(&self, family: Family, level: &Level) -> Result<[f64; 4]> {
        Ok(inverse_derivatives(level.lambda, self.family_jet(family, level.lambda)?))
    }
}
