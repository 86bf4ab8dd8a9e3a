//! Double-well potentials, their Hamiltonian flow and the lobe actions.
//!
//! Potentials are polynomials `V(x) = sum c_k x^k`. That covers the canonical
//! `x^4 - x^2` and its asymmetric deformations, and it gives exact divided
//! differences, which keep `E - V(x)` accurate next to a turning point.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Potential {
    coeffs: Vec<f64>,
    descriptor: String,
    half_width: f64,
}

/// Which lobe of the figure-eight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Lobe {
    Plus,
    Minus,
}

impl Lobe {
    fn sign(self) -> f64 {
        match self {
            Lobe::Plus => 1.0,
            Lobe::Minus => -1.0,
        }
    }
}

/// `V(x) = x^4 - x^2` on `[-3, 3]`.
pub fn canonical_double_well() -> Potential {
    Potential::double_well(vec![0.0, 0.0, -1.0, 0.0, 1.0], "x^4 - x^2", 3.0)
        .expect("canonical well is admissible")
}

impl Potential {
    /// A confining polynomial with a non-degenerate maximum at the origin and
    /// one well on each side.
    pub fn double_well(coeffs: Vec<f64>, descriptor: &str, half_width: f64) -> Result<Self> {
        let v = Self::confining(coeffs, descriptor, half_width)?;
        let bad = |what: &str| Err(Error::Parameter(format!("{descriptor}: {what}")));
        if v.evaluate(0.0).abs() > 1e-12 {
            return bad("V(0) must vanish");
        }
        if v.first_derivative(0.0).abs() > 1e-12 {
            return bad("V'(0) must vanish");
        }
        if v.second_derivative(0.0) >= 0.0 {
            return bad("V''(0) must be negative");
        }
        for lobe in [Lobe::Plus, Lobe::Minus] {
            let side = v.mirrored(lobe);
            let n = 4096;
            let changes = (1..n)
                .filter(|&i| {
                    let x0 = half_width * i as f64 / n as f64;
                    let x1 = half_width * (i + 1) as f64 / n as f64;
                    side.first_derivative(x0).signum() != side.first_derivative(x1).signum()
                })
                .count();
            if changes != 1 {
                return bad("each side of the saddle must hold exactly one well");
            }
        }
        Ok(v)
    }

    /// Any polynomial with `V(+-L) > 1`; used for oracle potentials without a
    /// saddle, such as the harmonic oscillator.
    pub fn confining(coeffs: Vec<f64>, descriptor: &str, half_width: f64) -> Result<Self> {
        if coeffs.is_empty() || !(half_width > 0.0) {
            return Err(Error::Parameter("empty polynomial or non-positive L".into()));
        }
        let deg = coeffs.len() - 1;
        if deg % 2 == 1 || coeffs[deg] <= 0.0 {
            return Err(Error::Parameter(format!(
                "{descriptor}: leading term must have even degree and positive coefficient"
            )));
        }
        let v = Self {
            coeffs,
            descriptor: descriptor.to_string(),
            half_width,
        };
        for x in [-half_width, half_width] {
            let value = v.evaluate(x);
            if value <= 1.0 {
                return Err(Error::Truncation {
                    half_width,
                    value,
                    required: 1.0,
                });
            }
        }
        Ok(v)
    }

    pub fn harmonic(half_width: f64) -> Result<Self> {
        Self::confining(vec![0.0, 0.0, 0.5], "x^2/2", half_width)
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn with_half_width(&self, half_width: f64) -> Result<Self> {
        Self::confining(self.coeffs.clone(), &self.descriptor, half_width)
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|c| *c == 0.0)
    }

    /// `x -> V(-x)` for the minus lobe, identity for the plus lobe.
    pub fn mirrored(&self, lobe: Lobe) -> Self {
        let s = lobe.sign();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { s * c } else { *c })
            .collect();
        Self {
            coeffs,
            descriptor: self.descriptor.clone(),
            half_width: self.half_width,
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    fn derivative_coeffs(coeffs: &[f64]) -> Vec<f64> {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect()
    }

    fn horner(coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn first_derivative(&self, x: f64) -> f64 {
        Self::horner(&Self::derivative_coeffs(&self.coeffs), x)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let d1 = Self::derivative_coeffs(&self.coeffs);
        Self::horner(&Self::derivative_coeffs(&d1), x)
    }

    /// `(V(x) - V(y)) / (x - y)` expanded as a polynomial, so it stays
    /// accurate when `x` and `y` are close.
    pub fn divided_difference(&self, x: f64, y: f64) -> f64 {
        // (x^k - y^k) / (x - y) = s_k with s_1 = 1, s_{k+1} = x s_k + y^k
        let mut total = 0.0;
        let mut s = 1.0;
        let mut yk = 1.0;
        for c in self.coeffs.iter().skip(1) {
            total += c * s;
            yk *= y;
            s = x * s + yk;
        }
        total
    }

    /// `sqrt(-V''(0))`, the Lyapunov exponent of the saddle.
    pub fn omega(&self) -> f64 {
        (-self.second_derivative(0.0)).sqrt()
    }

    /// Smallest value of V on a uniform grid of `n` points over `[-L, L]`.
    pub fn grid_minimum(&self, n: usize) -> f64 {
        (0..n)
            .map(|i| self.evaluate(-self.half_width + 2.0 * self.half_width * i as f64 / (n - 1) as f64))
            .fold(f64::INFINITY, f64::min)
    }

    /// Position of the well bottom on the given side.
    pub fn well_position(&self, lobe: Lobe) -> f64 {
        let side = self.mirrored(lobe);
        let n = 4096;
        let step = self.half_width / n as f64;
        let mut lo = step;
        for i in 1..n {
            let x = step * (i + 1) as f64;
            if side.first_derivative(x) > 0.0 {
                lo = x - step;
                break;
            }
        }
        let x = bisect(|x| side.first_derivative(x), lo, lo + step);
        lobe.sign() * x
    }

    /// Turning points `(a, b)` of the lobe at energy `E`, measured as distances
    /// from the saddle. For `E >= 0` the inner end is the saddle itself.
    pub fn turning_points(&self, energy: f64, lobe: Lobe) -> Result<(f64, f64)> {
        let side = self.mirrored(lobe);
        let xm = self.well_position(lobe).abs();
        let topo = |reason: &str| Error::Topology {
            energy,
            reason: reason.to_string(),
        };
        if energy <= side.evaluate(xm) {
            return Err(topo("energy below the well bottom"));
        }
        if energy >= side.evaluate(self.half_width) {
            return Err(topo("energy above the confinement edge"));
        }
        let a = if energy < 0.0 {
            bisect(|x| energy - side.evaluate(x), 0.0, xm)
        } else {
            0.0
        };
        let b = bisect(|x| energy - side.evaluate(x), xm, self.half_width);
        Ok((a, b))
    }
}

/// Bisection to adjacent floats; `f(lo)` and `f(hi)` must differ in sign.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Tanh-sinh quadrature on `[a, b]`, refined level by level until two
/// successive estimates agree to rounding.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    const S_MAX: f64 = 4.0;
    let c = 0.5 * (b - a);
    let d = 0.5 * (a + b);
    let term = |s: f64| {
        let u = FRAC_PI_2 * s.sinh();
        let ch = u.cosh();
        let w = FRAC_PI_2 * s.cosh() / (ch * ch);
        let t = u.tanh();
        let left = f(d - c * t);
        let right = f(d + c * t);
        let mut acc = 0.0;
        if left.is_finite() {
            acc += w * left;
        }
        if right.is_finite() {
            acc += w * right;
        }
        acc
    };
    let mut step = 0.5;
    let mut sum = FRAC_PI_2 * f(d);
    let mut j = 1;
    while j as f64 * step <= S_MAX {
        sum += term(j as f64 * step);
        j += 1;
    }
    let mut estimate = c * step * sum;
    for level in 1..=10 {
        step *= 0.5;
        let mut j = 1;
        while j as f64 * step <= S_MAX {
            sum += term(j as f64 * step);
            j += 2;
        }
        let next = c * step * sum;
        let diff = (next - estimate).abs();
        estimate = next;
        if level >= 3 && diff <= 1e-16 * estimate.abs().max(1e-300) {
            break;
        }
    }
    estimate
}

/// Splits `[0, end]` geometrically from `scale` so that each piece is wide
/// relative to its distance from a nearby complex singularity at the origin.
fn geometric_breaks(scale: f64, end: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    if scale > 0.0 {
        let mut x = scale;
        while x < end {
            pts.push(x);
            x *= 2.0;
        }
    }
    pts.push(end);
    pts
}

/// Lobe action `2 int_a^b sqrt(2(E-V))` and its energy derivative
/// `2 int_a^b dx / sqrt(2(E-V))`. The derivative is `None` at `E = 0`
/// where it diverges logarithmically.
pub fn lobe_integrals(v: &Potential, energy: f64, lobe: Lobe) -> Result<(f64, Option<f64>)> {
    let side = v.mirrored(lobe);
    let (a, b) = v.turning_points(energy, lobe)?;
    let omega = v.omega();
    let c = 0.5 * (a + b);
    let scale = (2.0 * energy.abs()).sqrt() / omega;
    let want_period = energy != 0.0;

    let mut action = 0.0;
    let mut period = 0.0;

    if energy < 0.0 {
        // x = a + u^2, E - V = u^2 q(u) with q = -V[a, x]
        let q = |u: f64| -side.divided_difference(a, a + u * u);
        let umax = (c - a).sqrt();
        let breaks = geometric_breaks((2.0 * a).sqrt() * 0.5, umax);
        for w in breaks.windows(2) {
            action += integrate(|u| 2.0 * 2f64.sqrt() * u * u * q(u).max(0.0).sqrt(), w[0], w[1]);
            period += integrate(|u| 2f64.sqrt() / q(u).sqrt(), w[0], w[1]);
        }
    } else {
        let g = |x: f64| energy - side.evaluate(x);
        let breaks = geometric_breaks(scale, c);
        for w in breaks.windows(2) {
            action += integrate(|x| (2.0 * g(x).max(0.0)).sqrt(), w[0], w[1]);
            if want_period {
                period += integrate(|x| 1.0 / (2.0 * g(x)).sqrt(), w[0], w[1]);
            }
        }
    }
    // x = b - u^2, E - V = u^2 r(u) with r = V[x, b]
    let r = |u: f64| side.divided_difference(b - u * u, b);
    let umax = (b - c).sqrt();
    action += integrate(|u| 2.0 * 2f64.sqrt() * u * u * r(u).max(0.0).sqrt(), 0.0, umax);
    period += integrate(|u| 2f64.sqrt() / r(u).sqrt(), 0.0, umax);

    Ok((2.0 * action, want_period.then_some(2.0 * period)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionData {
    pub energy: f64,
    pub leading_action_plus: f64,
    pub leading_action_minus: f64,
    pub leading_epsilon: f64,
}

/// Regularized lobe action `S(E) = A(E) + eps (ln|eps| - 1)` with
/// `eps = E / omega`; the added term cancels the `E ln|E|` singularity of
/// the bare lobe action at the saddle.
pub fn singular_action(v: &Potential, energy: f64, lobe: Lobe) -> Result<f64> {
    let (a, _) = lobe_integrals(v, energy, lobe)?;
    let eps = energy / v.omega();
    let reg = if eps == 0.0 { 0.0 } else { eps * (eps.abs().ln() - 1.0) };
    Ok(a + reg)
}

/// `dS/dE = T(E) + ln|eps| / omega` where `T` is the lobe period integral.
pub fn singular_action_derivative(v: &Potential, energy: f64, lobe: Lobe) -> Result<f64> {
    if energy == 0.0 {
        return Err(Error::Domain {
            name: "E",
            value: 0.0,
            domain: "E != 0 (evaluate the derivative off the saddle energy)".into(),
        });
    }
    let (_, t) = lobe_integrals(v, energy, lobe)?;
    let omega = v.omega();
    Ok(t.expect("period exists off the saddle") + (energy / omega).abs().ln() / omega)
}

/// Leading actions and the leading normal-form energy at `E`.
pub fn leading_actions(v: &Potential, energy: f64, delta: f64) -> Result<ActionData> {
    if energy.abs() > delta {
        return Err(Error::Domain {
            name: "E",
            value: energy,
            domain: format!("[-{delta}, {delta}]"),
        });
    }
    Ok(ActionData {
        energy,
        leading_action_plus: singular_action(v, energy, Lobe::Plus)?,
        leading_action_minus: singular_action(v, energy, Lobe::Minus)?,
        leading_epsilon: energy / v.omega(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalOrbitResult {
    pub energy: f64,
    pub initial_point: (f64, f64),
    pub period: f64,
    /// Decimated `(t, x, xi)` samples over one period.
    pub trajectory_samples: Vec<(f64, f64, f64)>,
    pub energy_drift: f64,
    pub closure_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub step: f64,
    pub max_time: f64,
    pub energy_tolerance: f64,
    pub max_samples: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            max_time: 1e3,
            energy_tolerance: 1e-9,
            max_samples: 2000,
        }
    }
}

// Fourth-order Forest-Ruth / Yoshida composition.
const CBRT2: f64 = 1.259_921_049_894_873_2;
const W1: f64 = 1.0 / (2.0 - CBRT2);
const W0: f64 = -CBRT2 / (2.0 - CBRT2);
const DRIFT: [f64; 4] = [W1 / 2.0, (W0 + W1) / 2.0, (W0 + W1) / 2.0, W1 / 2.0];
const KICK: [f64; 3] = [W1, W0, W1];

fn symplectic_step(v: &Potential, x: f64, xi: f64, dt: f64) -> (f64, f64) {
    let (mut x, mut xi) = (x, xi);
    for i in 0..3 {
        x += DRIFT[i] * dt * xi;
        xi -= KICK[i] * dt * v.first_derivative(x);
    }
    x += DRIFT[3] * dt * xi;
    (x, xi)
}

/// Hamiltonian flow of `xi^2/2 + V(x)` from `(sqrt h, 0)` until the first
/// return to the inner turning point.
pub fn flow_period(v: &Potential, h: f64, opts: &FlowOptions) -> Result<ClassicalOrbitResult> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain {
            name: "h",
            value: h,
            domain: "(0, 1)".into(),
        });
    }
    let x0 = h.sqrt();
    let energy = v.evaluate(x0);
    let ham = |x: f64, xi: f64| 0.5 * xi * xi + v.evaluate(x);
    let xm = v.well_position(Lobe::Plus);
    let dt = opts.step;
    let max_steps = (opts.max_time / dt).ceil() as usize;
    let stride = (max_steps / opts.max_samples).max(1);

    let (mut x, mut xi, mut t) = (x0, 0.0, 0.0);
    let mut samples = vec![(0.0, x0, 0.0)];
    let mut drift = 0.0f64;
    let mut left = false;
    for step in 0..max_steps {
        let (nx, nxi) = symplectic_step(v, x, xi, dt);
        drift = drift.max((ham(nx, nxi) - energy).abs());
        if nx > xm {
            left = true;
        }
        if left && xi < 0.0 && nxi >= 0.0 && nx < xm {
            let s = bisect(|s| symplectic_step(v, x, xi, s).1, 0.0, dt);
            let (fx, fxi) = symplectic_step(v, x, xi, s);
            let period = t + s;
            samples.push((period, fx, fxi));
            if drift > opts.energy_tolerance {
                return Err(Error::ToleranceFailure {
                    drift,
                    tolerance: opts.energy_tolerance,
                });
            }
            let stride_out = (samples.len() / opts.max_samples).max(1);
            let trajectory_samples = samples.into_iter().step_by(stride_out).collect();
            return Ok(ClassicalOrbitResult {
                energy,
                initial_point: (x0, 0.0),
                period,
                trajectory_samples,
                energy_drift: drift,
                closure_distance: ((fx - x0).powi(2) + fxi.powi(2)).sqrt(),
            });
        }
        x = nx;
        xi = nxi;
        t += dt;
        if step % stride == 0 {
            samples.push((t, x, xi));
        }
    }
    Err(Error::NonClosingOrbit {
        max_time: opts.max_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_saddle_data() {
        let v = canonical_double_well();
        assert_eq!(v.evaluate(0.0), 0.0);
        assert_eq!(v.first_derivative(0.0), 0.0);
        assert_eq!(v.second_derivative(0.0), -2.0);
        let w = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v.evaluate(w) + 0.25).abs() < 1e-15);
        assert!((v.evaluate(-w) + 0.25).abs() < 1e-15);
        assert!((v.well_position(Lobe::Plus) - w).abs() < 1e-14);
        assert!((v.well_position(Lobe::Minus) + w).abs() < 1e-14);
        assert!(v.grid_minimum(10_001) >= -0.25);
        assert!(v.evaluate(3.0) > 1.0 && v.evaluate(-3.0) > 1.0);
    }

    #[test]
    fn rejects_inadmissible_polynomials() {
        assert!(Potential::double_well(vec![0.0, 0.0, 1.0, 0.0, 1.0], "x^4+x^2", 3.0).is_err());
        assert!(Potential::double_well(vec![0.0, 0.0, -1.0, 0.0, 1.0], "short", 0.5).is_err());
        assert!(Potential::confining(vec![0.0, 0.0, -1.0, 1.0], "cubic", 3.0).is_err());
    }

    #[test]
    fn divided_difference_matches_quotient() {
        let v = Potential::double_well(vec![0.0, 0.0, -1.0, 0.3, 1.0], "asym", 3.0).unwrap();
        for (x, y) in [(0.3, 0.9), (-1.2, 0.4), (0.5, 0.0), (0.0, 0.7)] {
            let q = (v.evaluate(x) - v.evaluate(y)) / (x - y);
            assert!((v.divided_difference(x, y) - q).abs() < 1e-13);
        }
        assert!((v.divided_difference(0.4, 0.4) - v.first_derivative(0.4)).abs() < 1e-14);
    }

    #[test]
    fn saddle_action_closed_form() {
        // A(0) = 2 int_0^1 sqrt(2) x sqrt(1 - x^2) dx = 2 sqrt(2) / 3
        let v = canonical_double_well();
        let (a, t) = lobe_integrals(&v, 0.0, Lobe::Plus).unwrap();
        assert!((a - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-14, "{a}");
        assert!(t.is_none());
    }

    #[test]
    fn harmonic_lobe_integrals_near_well_bottom() {
        // near the well bottom at -1/4 the motion is harmonic with V'' = 4:
        // period 2 pi / 2 = pi, action 2 pi (E - Vmin) / 2
        let v = canonical_double_well();
        let e = -0.25 + 1e-8;
        let (a, t) = lobe_integrals(&v, e, Lobe::Plus).unwrap();
        assert!((t.unwrap() - std::f64::consts::PI).abs() < 1e-6);
        assert!((a - std::f64::consts::PI * 1e-8).abs() < 1e-13);
    }

    #[test]
    fn period_integral_is_action_derivative() {
        let v = canonical_double_well();
        for e in [-0.05f64, -1e-4, 3e-5, 0.02] {
            let de = 1e-6 * e.abs();
            let ap = lobe_integrals(&v, e + de, Lobe::Plus).unwrap().0;
            let am = lobe_integrals(&v, e - de, Lobe::Plus).unwrap().0;
            let t = lobe_integrals(&v, e, Lobe::Plus).unwrap().1.unwrap();
            assert!(((ap - am) / (2.0 * de) - t).abs() < 1e-5 * t, "E={e}");
        }
    }

    #[test]
    fn period_integral_matches_flow() {
        let v = canonical_double_well();
        let h = 1e-3;
        let orbit = flow_period(&v, h, &FlowOptions::default()).unwrap();
        let (_, t) = lobe_integrals(&v, orbit.energy, Lobe::Plus).unwrap();
        assert!((orbit.period - t.unwrap()).abs() < 1e-8, "{} vs {:?}", orbit.period, t);
    }

    #[test]
    fn regularized_action_is_smooth_across_the_saddle() {
        let v = canonical_double_well();
        let s = |e: f64| singular_action(&v, e, Lobe::Plus).unwrap();
        let d = 1e-3;
        let second: Vec<f64> = (-20..=20)
            .map(|i| {
                let e = i as f64 * 2.5e-3;
                (s(e + d) - 2.0 * s(e) + s(e - d)) / (d * d)
            })
            .collect();
        let max = second.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(max < 50.0, "second divided differences up to {max}");
    }

    #[test]
    fn action_derivative_is_finite_at_the_saddle() {
        let v = canonical_double_well();
        let above = singular_action_derivative(&v, 1e-9, Lobe::Plus).unwrap();
        let below = singular_action_derivative(&v, -1e-9, Lobe::Plus).unwrap();
        assert!((above - below).abs() < 1e-6, "{above} vs {below}");
    }

    #[test]
    fn leading_epsilon() {
        let v = canonical_double_well();
        let d = leading_actions(&v, 0.01, 0.1).unwrap();
        assert!((d.leading_epsilon - 0.007_071_067_811_865_475).abs() < 1e-15);
        assert_eq!(leading_actions(&v, 0.0, 0.1).unwrap().leading_epsilon, 0.0);
        let eta = 1e-6;
        let slope = (leading_actions(&v, eta, 0.1).unwrap().leading_epsilon
            - leading_actions(&v, -eta, 0.1).unwrap().leading_epsilon)
            / (2.0 * eta);
        assert!((slope - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(leading_actions(&v, 0.2, 0.1).is_err());
    }

    #[test]
    fn saddle_action_is_quadrature_stable() {
        // x = sin(th) turns the saddle action into a smooth integrand; the
        // composite midpoint rule at n and 2n panels must agree with it.
        let v = canonical_double_well();
        let s0 = singular_action(&v, 0.0, Lobe::Plus).unwrap();
        let midpoint = |n: usize| {
            let w = FRAC_PI_2 / n as f64;
            (0..n)
                .map(|i| {
                    let th = (i as f64 + 0.5) * w;
                    2.0 * 2f64.sqrt() * th.sin() * th.cos().powi(2) * w
                })
                .sum::<f64>()
        };
        assert!((s0 - midpoint(2000)).abs() < 1e-6);
        assert!((s0 - midpoint(4000)).abs() < 1e-6);
    }

    #[test]
    fn turning_points_fail_outside_the_figure_eight() {
        let v = canonical_double_well();
        assert!(matches!(
            v.turning_points(-0.3, Lobe::Plus),
            Err(Error::Topology { .. })
        ));
    }

    #[test]
    fn flow_conserves_energy_and_closes() {
        let v = canonical_double_well();
        let r = flow_period(&v, 1e-3, &FlowOptions::default()).unwrap();
        assert!(r.energy_drift <= 1e-9);
        assert!(r.closure_distance < 1e-9);
        assert!(r.trajectory_samples.len() > 10);
    }

    #[test]
    fn flow_period_self_consistent_under_step_halving() {
        let v = canonical_double_well();
        let o = FlowOptions::default();
        let a = flow_period(&v, 1e-3, &o).unwrap().period;
        let b = flow_period(&v, 1e-3, &FlowOptions { step: o.step / 2.0, ..o }).unwrap().period;
        assert!((a - b).abs() < 1e-3 * a);
    }

    #[test]
    fn flow_period_grows_as_h_shrinks() {
        let v = canonical_double_well();
        let o = FlowOptions::default();
        let periods: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
            .iter()
            .map(|&h| flow_period(&v, h, &o).unwrap().period)
            .collect();
        assert!(periods.windows(2).all(|w| w[1] > w[0]), "{periods:?}");
    }

    #[test]
    fn flow_reports_non_closing_orbit() {
        let v = canonical_double_well();
        let o = FlowOptions {
            max_time: 1.0,
            ..FlowOptions::default()
        };
        assert!(matches!(flow_period(&v, 1e-3, &o), Err(Error::NonClosingOrbit { .. })));
    }

    proptest! {
        #[test]
        fn even_wells_have_equal_lobe_actions(e in -0.1f64..0.1) {
            let v = canonical_double_well();
            let d = leading_actions(&v, e, 0.1).unwrap();
            prop_assert_eq!(d.leading_action_plus, d.leading_action_minus);
        }

        #[test]
        fn lobe_action_increases_with_energy(e in -0.2f64..0.09) {
            let v = canonical_double_well();
            let a0 = lobe_integrals(&v, e, Lobe::Plus).unwrap().0;
            let a1 = lobe_integrals(&v, e + 0.01, Lobe::Plus).unwrap().0;
            prop_assert!(a1 > a0);
        }
    }
}
