//! Energy-localised initial states built from one or both eigenvalue families.
//!
//! A packet centred at the level `n0` has coefficients
//! `a_n = K chi((n - n0) / L)` with `L = |ln h|^(1 - gamma')`; `K` is fixed by
//! exact summation over the truncated support so the stored sequence has unit
//! norm.

use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::Serialize;

use crate::model_spectrum::{Family, SpectrumWindow};
use crate::{Error, Result};

/// Even, non-negative localisation profile.
#[derive(Clone)]
pub enum Profile {
    /// `exp(-x^2 / 2)`.
    Gaussian,
    /// `exp(1 - 1 / (1 - x^2))` on `|x| < 1`, zero outside.
    Bump,
    Custom(&'static str, Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialEq for Profile {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Gaussian => "gaussian",
            Profile::Bump => "bump",
            Profile::Custom(name, _) => name,
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "gaussian" => Ok(Profile::Gaussian),
            "bump" => Ok(Profile::Bump),
            other => Err(Error::Profile(format!("unknown profile '{other}'"))),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Gaussian => (-0.5 * x * x).exp(),
            Profile::Bump => {
                if x.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }
            Profile::Custom(_, f) => f(x),
        }
    }

    /// `F(chi^2)(xi) = int chi(x)^2 exp(-2 pi i x xi) dx` where it is known in
    /// closed form.
    pub fn fourier_square(&self, xi: f64) -> Result<f64> {
        match self {
            Profile::Gaussian => Ok(PI.sqrt() * (-PI * PI * xi * xi).exp()),
            _ => Err(Error::Profile(format!(
                "no closed-form Fourier data for profile '{}'",
                self.name()
            ))),
        }
    }

    /// Checks positivity at zero, evenness and non-negativity on a grid
    /// covering `[-radius, radius]`.
    pub fn validate(&self, radius: f64) -> Result<()> {
        if !(self.eval(0.0) > 0.0) {
            return Err(Error::Profile(format!("{}: chi(0) must be positive", self.name())));
        }
        let n = 2000;
        for i in 1..=n {
            let x = radius * i as f64 / n as f64;
            let (a, b) = (self.eval(x), self.eval(-x));
            if !(a >= 0.0 && b >= 0.0) {
                return Err(Error::Profile(format!("{}: negative at x = {x}", self.name())));
            }
            if (a - b).abs() > 1e-14 * a.abs().max(1.0) {
                return Err(Error::Profile(format!("{}: not even at x = {x}", self.name())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketSpec {
    /// Rescaled energy; the physical energy is `h E`.
    pub energy: f64,
    pub gamma_prime: f64,
    pub gamma: f64,
    pub profile: Profile,
    /// Zero when `h` underflows; `log_h` is authoritative.
    pub h: f64,
    /// `|ln h|`.
    pub log_h: f64,
    /// Set for runs that reach revival times, which need `gamma < 1/3`.
    pub revival: bool,
    /// Truncation radius in units of `L`.
    pub radius_factor: f64,
}

impl PacketSpec {
    pub fn new(h: f64, energy: f64, gamma_prime: f64, gamma: f64, revival: bool) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::Parameter(format!("h = {h} must lie in (0, 1)")));
        }
        Self::from_log_h(-h.ln(), energy, gamma_prime, gamma, revival).map(|s| Self { h, ..s })
    }

    /// Spec at `h = exp(-log_h)`, for `h` below the double range.
    pub fn from_log_h(log_h: f64, energy: f64, gamma_prime: f64, gamma: f64, revival: bool) -> Result<Self> {
        let spec = Self {
            energy,
            gamma_prime,
            gamma,
            profile: Profile::Gaussian,
            h: (-log_h).exp(),
            log_h,
            revival,
            radius_factor: 10.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Revival-scale defaults `gamma' = 0.8`, `gamma = 0.3`.
    pub fn revival_defaults(h: f64, energy: f64) -> Result<Self> {
        Self::new(h, energy, 0.8, 0.3, true)
    }

    /// Hyperbolic-scale defaults `gamma' = 0.2`, `gamma = 0.9`.
    pub fn hyperbolic_defaults(h: f64, energy: f64) -> Result<Self> {
        Self::new(h, energy, 0.2, 0.9, false)
    }

    pub fn with_profile(mut self, profile: Profile) -> Result<Self> {
        self.profile = profile;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.log_h > 0.0 && self.log_h.is_finite()) {
            return Err(Error::Parameter(format!("|ln h| = {} must be positive", self.log_h)));
        }
        if !(-1.0..=1.0).contains(&self.energy) {
            return Err(Error::Parameter(format!("E = {} must lie in [-1, 1]", self.energy)));
        }
        if !(0.0..1.0).contains(&self.gamma_prime) {
            return Err(Error::Parameter(format!(
                "gamma' = {} must lie in [0, 1)",
                self.gamma_prime
            )));
        }
        if !(self.gamma < 1.0) {
            return Err(Error::Parameter(format!("gamma = {} must be < 1", self.gamma)));
        }
        if !(self.gamma + self.gamma_prime > 1.0) {
            return Err(Error::Parameter(format!(
                "gamma + gamma' > 1 required for the tail sets (got {} + {})",
                self.gamma, self.gamma_prime
            )));
        }
        if self.revival && !(self.gamma < 1.0 / 3.0) {
            return Err(Error::Parameter(format!(
                "gamma < 1/3 required for revival-scale runs (got {})",
                self.gamma
            )));
        }
        if !(self.radius_factor > 0.0) {
            return Err(Error::Parameter("radius factor must be positive".into()));
        }
        self.profile.validate(self.radius_factor)
    }

    pub fn log_h(&self) -> f64 {
        self.log_h
    }

    /// Localisation width `L = |ln h|^(1 - gamma')`.
    pub fn width(&self) -> f64 {
        self.log_h().powf(1.0 - self.gamma_prime)
    }

    /// Truncation radius `R = ceil(radius_factor * L)`.
    pub fn radius(&self) -> i64 {
        (self.radius_factor * self.width()).ceil() as i64
    }

    /// Half-width `|ln h|^gamma` of the set Delta.
    pub fn delta_half_width(&self) -> f64 {
        self.log_h().powf(self.gamma)
    }

    /// `K_h ~ 1 / (sqrt(F(chi^2)(0)) L^(1/2))`.
    pub fn closed_form_norm(&self) -> Result<f64> {
        Ok(1.0 / (self.profile.fourier_square(0.0)?.sqrt() * self.width().sqrt()))
    }

    /// Default exponent `alpha = min(2, 3 - 2 gamma - 0.1)`.
    pub fn default_alpha(&self) -> f64 {
        2.0f64.min(2.9 - 2.0 * self.gamma)
    }

    /// Default exponent `beta = min(3.5, 4 - 3 gamma - 0.1)`.
    pub fn default_beta(&self) -> f64 {
        3.5f64.min(3.9 - 3.0 * self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSequence {
    pub family: Family,
    pub center: i64,
    pub radius: i64,
    /// `a_n` for `n = center - radius ..= center + radius`.
    pub values: Vec<f64>,
    /// Normalisation from exact summation over the support.
    pub norm_constant: f64,
    /// Closed-form normalisation, when the profile has known Fourier data.
    pub closed_form_norm: Option<f64>,
}

impl CoefficientSequence {
    pub fn indices(&self) -> RangeInclusive<i64> {
        self.center - self.radius..=self.center + self.radius
    }

    pub fn get(&self, n: i64) -> f64 {
        usize::try_from(n - self.center + self.radius)
            .ok()
            .and_then(|i| self.values.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    /// `(n - n0, |a_n|^2)` pairs over the support.
    pub fn weights(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, a)| (i as i64 - self.radius, a * a))
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|a| a * a).sum()
    }

    /// `sum_{|n - n0| > r} |a_n|^2`.
    pub fn tail_mass(&self, r: i64) -> f64 {
        self.weights()
            .filter(|(m, _)| m.abs() > r)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn norm_relative_error(&self) -> Option<f64> {
        self.closed_form_norm
            .map(|k| (self.norm_constant - k).abs() / k)
    }
}

/// Level indices whose eigenvalue is closest to `h E` in each family, the
/// smaller index winning ties. Distances are compared in rescaled units.
pub fn select_centers(window: &SpectrumWindow, energy: f64) -> Result<(i64, i64)> {
    let pick = |family: Family| {
        window
            .family(family)
            .iter()
            .min_by(|a, b| {
                (a.lambda - energy)
                    .abs()
                    .total_cmp(&(b.lambda - energy).abs())
                    .then(a.index.cmp(&b.index))
            })
            .map(|l| l.index)
            .ok_or(Error::EmptyWindow)
    };
    Ok((pick(Family::Alpha)?, pick(Family::Beta)?))
}

pub fn build_coefficients(spec: &PacketSpec, family: Family, center: i64) -> Result<CoefficientSequence> {
    spec.validate()?;
    let width = spec.width();
    let radius = spec.radius();
    let raw: Vec<f64> = (-radius..=radius)
        .map(|m| spec.profile.eval(m as f64 / width))
        .collect();
    let sum: f64 = raw.iter().map(|c| c * c).sum();
    if !(sum > 0.0) {
        return Err(Error::Profile("profile vanishes on the support".into()));
    }
    let norm_constant = 1.0 / sum.sqrt();
    Ok(CoefficientSequence {
        family,
        center,
        radius,
        values: raw.iter().map(|c| c * norm_constant).collect(),
        norm_constant,
        closed_form_norm: spec.closed_form_norm().ok(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitSets {
    /// `Delta = { n : |n - n0| <= |ln h|^gamma }`.
    pub delta: RangeInclusive<i64>,
    /// `1 - sum_Delta |a_n|^2`.
    pub gamma_mass: f64,
}

impl SplitSets {
    pub fn delta_len(&self) -> usize {
        (self.delta.end() - self.delta.start() + 1) as usize
    }
}

pub fn split_sets(spec: &PacketSpec, coefficients: &CoefficientSequence) -> SplitSets {
    let r = spec.delta_half_width().floor() as i64;
    let n0 = coefficients.center;
    let inside: f64 = coefficients
        .weights()
        .filter(|(m, _)| m.abs() <= r)
        .map(|(_, w)| w)
        .sum();
    SplitSets {
        delta: n0 - r..=n0 + r,
        gamma_mass: (1.0 - inside).max(0.0),
    }
}

/// Coefficients of one or both families with their relative weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Packet {
    pub alpha: Option<CoefficientSequence>,
    pub beta: Option<CoefficientSequence>,
    /// Weight of the alpha part; the beta part gets `sqrt(1 - w^2)`.
    pub alpha_weight: f64,
}

impl Packet {
    pub fn single(seq: CoefficientSequence) -> Self {
        match seq.family {
            Family::Alpha => Self {
                alpha: Some(seq),
                beta: None,
                alpha_weight: 1.0,
            },
            Family::Beta => Self {
                alpha: None,
                beta: Some(seq),
                alpha_weight: 0.0,
            },
        }
    }

    pub fn mixed(alpha: CoefficientSequence, beta: CoefficientSequence, alpha_weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_weight) {
            return Err(Error::Parameter(format!("alpha weight {alpha_weight} not in [0, 1]")));
        }
        Ok(Self {
            alpha: Some(alpha),
            beta: Some(beta),
            alpha_weight,
        })
    }

    pub fn beta_weight(&self) -> f64 {
        (1.0 - self.alpha_weight * self.alpha_weight).max(0.0).sqrt()
    }

    /// Builds centred coefficients for both families from a window.
    pub fn from_window(spec: &PacketSpec, window: &SpectrumWindow, alpha_weight: f64) -> Result<Self> {
        let (n0, m0) = select_centers(window, spec.energy)?;
        let a = build_coefficients(spec, Family::Alpha, n0)?;
        let b = build_coefficients(spec, Family::Beta, m0)?;
        if alpha_weight == 1.0 {
            return Ok(Self::single(a));
        }
        if alpha_weight == 0.0 {
            return Ok(Self::single(b));
        }
        Self::mixed(a, b, alpha_weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_spectrum::Level;
    use proptest::prelude::*;

    fn window(alphas: &[(i64, f64)], h: f64) -> SpectrumWindow {
        let lv = |&(index, lambda): &(i64, f64)| Level {
            index,
            lambda,
            eigenvalue: h * lambda,
        };
        SpectrumWindow {
            h,
            lambda_bound: 1.0,
            alphas: alphas.iter().map(lv).collect(),
            betas: alphas.iter().map(|&(i, l)| lv(&(i, l - 0.1))).collect(),
        }
    }

    #[test]
    fn spec_constraints_are_enforced() {
        assert!(PacketSpec::new(1e-3, 0.0, 0.2, 0.7, false).is_err());
        assert!(PacketSpec::new(1e-3, 0.0, 1.0, 0.3, false).is_err());
        assert!(PacketSpec::new(1e-3, 0.0, 0.2, 0.9, true).is_err());
        assert!(PacketSpec::new(1e-3, 1.5, 0.8, 0.3, true).is_err());
        assert!(PacketSpec::revival_defaults(1e-3, 0.0).is_ok());
        assert!(PacketSpec::hyperbolic_defaults(1e-3, 0.0).is_ok());
    }

    #[test]
    fn profile_invariants() {
        let odd = Profile::Custom("odd", Arc::new(|x: f64| (1.0 + x) * (-x * x).exp()));
        assert!(matches!(odd.validate(5.0), Err(Error::Profile(_))));
        let negative = Profile::Custom("neg", Arc::new(|x: f64| (-x * x).exp() - 0.5));
        assert!(matches!(negative.validate(5.0), Err(Error::Profile(_))));
        assert!(Profile::Bump.validate(5.0).is_ok());
        assert!(Profile::Bump.fourier_square(0.0).is_err());
        assert!((Profile::Gaussian.fourier_square(0.0).unwrap() - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn centers_pick_closest_with_ties_to_smaller_index() {
        let h = 1e-3;
        let w = window(&[(5, 0.6), (6, 0.2), (7, -0.2), (8, -0.6)], h);
        assert_eq!(select_centers(&w, 0.2).unwrap().0, 6);
        assert_eq!(select_centers(&w, 0.0).unwrap().0, 6);
        assert_eq!(select_centers(&w, -0.5).unwrap().0, 8);
        let empty = SpectrumWindow {
            h,
            lambda_bound: 1.0,
            alphas: vec![],
            betas: vec![],
        };
        assert_eq!(select_centers(&empty, 0.0), Err(Error::EmptyWindow));
    }

    #[test]
    fn gaussian_coefficients() {
        let spec = PacketSpec::hyperbolic_defaults(1e-6, 0.0).unwrap();
        let c = build_coefficients(&spec, Family::Alpha, 42).unwrap();
        assert!((c.norm_squared() - 1.0).abs() < 1e-14);
        assert_eq!(c.values.len() as i64, 2 * c.radius + 1);
        let max = c.values.iter().cloned().fold(0.0, f64::max);
        assert_eq!(c.get(42), max);
        assert!(c.norm_relative_error().unwrap() < 1e-6);
        // dropped mass beyond R is far below rounding
        let l = spec.width();
        let dropped: f64 = (c.radius + 1..c.radius + 200)
            .map(|m| 2.0 * (c.norm_constant * (-0.5 * (m as f64 / l).powi(2)).exp()).powi(2))
            .sum();
        assert!(dropped < 1e-14);
    }

    #[test]
    fn delta_cardinality_and_gamma_mass_trend() {
        let mut prev = f64::INFINITY;
        for h in [1e-2, 1e-4, 1e-6, 1e-8] {
            let spec = PacketSpec::hyperbolic_defaults(h, 0.0).unwrap();
            let c = build_coefficients(&spec, Family::Alpha, 0).unwrap();
            let s = split_sets(&spec, &c);
            assert_eq!(s.delta_len() as i64, 2 * spec.delta_half_width().floor() as i64 + 1);
            assert!(s.gamma_mass < prev, "h={h}: {}", s.gamma_mass);
            prev = s.gamma_mass;
        }
    }

    #[test]
    fn width_sits_between_gap_and_delta() {
        for h in [1e-3, 1e-6, 1e-9] {
            for spec in [
                PacketSpec::hyperbolic_defaults(h, 0.0).unwrap(),
                PacketSpec::revival_defaults(h, 0.0).unwrap(),
            ] {
                let l = spec.width();
                assert!(l > 1.0 && l < 2.0 * spec.delta_half_width() + 1.0);
            }
        }
    }

    #[test]
    fn tail_decays_faster_than_powers_of_log() {
        // tail beyond |ln h|^gamma, which outgrows the width L
        let tails: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
            .iter()
            .map(|&h| {
                let spec = PacketSpec::new(h, 0.0, 0.8, 0.9, false).unwrap();
                let c = build_coefficients(&spec, Family::Alpha, 0).unwrap();
                let cut = spec.delta_half_width().floor() as i64;
                (spec.log_h(), c.tail_mass(cut))
            })
            .collect();
        for w in tails.windows(2) {
            let ((l0, t0), (l1, t1)) = (w[0], w[1]);
            assert!(t1 < t0 * (l0 / l1).powi(6), "{t0:e} -> {t1:e}");
        }
    }

    proptest! {
        #[test]
        fn norm_is_one_for_admissible_specs(
            h in 1e-10f64..1e-2,
            gp in 0.1f64..0.95,
            center in -1000i64..1000,
        ) {
            let gamma = 1.05 - gp;
            let spec = PacketSpec::new(h, 0.0, gp, gamma, false).unwrap();
            for profile in [Profile::Gaussian, Profile::Bump] {
                let spec = spec.clone().with_profile(profile).unwrap();
                let c = build_coefficients(&spec, Family::Beta, center).unwrap();
                prop_assert!((c.norm_squared() - 1.0).abs() < 1e-12);
                prop_assert_eq!(c.get(center + 1), c.get(center - 1));
            }
        }
    }
}
