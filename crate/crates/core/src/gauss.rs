//! Quadratic phase sequences and the coefficients of fractional revivals.
//!
//! Everything that depends on `p / q` is reduced as an integer numerator
//! before a single complex exponential is taken, so periodicity checks are
//! exact and moduli are reproducible to rounding.

use std::f64::consts::TAU;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

fn check_coprime(p: i64, q: i64) -> Result<()> {
    if q < 1 {
        return Err(Error::Parameter(format!("q must be positive, got {q}")));
    }
    if gcd(p, q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    Ok(())
}

/// `exp(-2 pi i num / den)` with `num` reduced exactly modulo `den`.
pub(crate) fn unit_phase(num: i128, den: i128) -> Complex64 {
    let mut r = num.rem_euclid(den);
    if 2 * r > den {
        r -= den;
    }
    let angle = -TAU * (r as f64) / (den as f64);
    Complex64::from_polar(1.0, angle)
}

/// Solution set `ell * Z` of the periodicity congruence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PeriodicitySet {
    pub p: i64,
    pub q: i64,
    /// Minimal positive period; the set is all integer multiples of it.
    pub ell: i64,
}

impl PeriodicitySet {
    pub fn contains(&self, m: i64) -> bool {
        m % self.ell == 0
    }
}

/// Periods of `n -> exp(-2 pi i p (n - n0)^2 / q)`: `qZ` when `q` is odd or
/// `q/2` is odd, `(q/2)Z` when `4 | q`.
pub fn periodicity_set(p: i64, q: i64) -> Result<PeriodicitySet> {
    check_coprime(p, q)?;
    let ell = if q % 4 == 0 { q / 2 } else { q };
    Ok(PeriodicitySet { p, q, ell })
}

/// True iff `q | (2 p ell m + p ell^2)` for every `m` in the range, i.e. the
/// sequence is `ell`-periodic on the shifted window.
pub fn verify_periodicity(p: i64, q: i64, ell: i64, m_range: RangeInclusive<i64>) -> bool {
    let (p, q, ell) = (p as i128, q as i128, ell as i128);
    m_range.into_iter().all(|m| {
        let m = m as i128;
        (2 * p * ell * m + p * ell * ell).rem_euclid(q) == 0
    })
}

/// Smallest positive `ell` passing [`verify_periodicity`] on the range, found
/// by brute force. Used to cross-check [`periodicity_set`].
pub fn minimal_period_brute_force(p: i64, q: i64, m_range: RangeInclusive<i64>) -> i64 {
    (1..=q)
        .find(|&ell| verify_periodicity(p, q, ell, m_range.clone()))
        .unwrap_or(q)
}

/// A sequence known through one period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSequence {
    values: Vec<Complex64>,
}

impl PeriodicSequence {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("a periodic sequence needs ell >= 1".into()));
        }
        Ok(Self { values })
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, n: i64) -> Complex64 {
        self.values[n.rem_euclid(self.values.len() as i64) as usize]
    }

    /// `phi^k_n = exp(-2 pi i k n / ell)`.
    pub fn fourier_mode(ell: usize, k: i64) -> Self {
        let ell_i = ell as i128;
        let values = (0..ell as i128)
            .map(|n| unit_phase(k as i128 * n, ell_i))
            .collect();
        Self { values }
    }
}

/// `(1/ell) sum_{k<ell} u_k conj(v_k)`.
pub fn inner_product(u: &PeriodicSequence, v: &PeriodicSequence) -> Result<Complex64> {
    if u.period() != v.period() {
        return Err(Error::PeriodMismatch {
            left: u.period(),
            right: v.period(),
        });
    }
    let s: Complex64 = u
        .values
        .iter()
        .zip(&v.values)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(s / u.period() as f64)
}

/// `n -> exp(-2 pi i (p/q) (n - n0)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadraticPhaseSequence {
    pub p: i64,
    pub q: i64,
    pub n0: i64,
    pub ell: i64,
}

impl QuadraticPhaseSequence {
    pub fn new(p: i64, q: i64, n0: i64) -> Result<Self> {
        let set = periodicity_set(p, q)?;
        Ok(Self {
            p,
            q,
            n0,
            ell: set.ell,
        })
    }

    /// Exponent numerator `p (n - n0)^2 mod q`.
    pub fn numerator(&self, n: i64) -> i64 {
        let d = (n as i128 - self.n0 as i128).rem_euclid(self.q as i128 * 2);
        ((self.p as i128 * d * d).rem_euclid(self.q as i128)) as i64
    }

    pub fn value(&self, n: i64) -> Complex64 {
        unit_phase(self.numerator(n) as i128, self.q as i128)
    }

    pub fn one_period(&self) -> PeriodicSequence {
        PeriodicSequence {
            values: (0..self.ell).map(|n| self.value(n)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevivalCoefficients {
    pub p: i64,
    pub q: i64,
    pub n0: i64,
    pub ell: i64,
    /// `b_k(ell)` for `k = 0..ell`.
    pub b: Vec<Complex64>,
    /// `exp(-2 pi i k n0 / ell) b_k(ell)`.
    pub b_tilde: Vec<Complex64>,
}

impl RevivalCoefficients {
    pub fn parseval_sum(&self) -> f64 {
        self.b.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `sum_k b_k phi^k_n`, which reproduces the phase sequence.
    pub fn reconstruct(&self, n: i64) -> Complex64 {
        let ell = self.ell as i128;
        self.b
            .iter()
            .enumerate()
            .map(|(k, bk)| bk * unit_phase(k as i128 * n as i128, ell))
            .sum()
    }
}

/// `b_k(ell) = <sigma, phi^k> = (1/ell) sum_{n<ell} exp(-2 pi i (p/q)(n-n0)^2) exp(2 pi i k n / ell)`,
/// so that `sigma_n = sum_k b_k phi^k_n` with `phi^k_n = exp(-2 pi i k n / ell)`.
///
/// The two phases are combined over the common denominator `q ell` and
/// reduced as an integer before exponentiation.
pub fn coefficients(p: i64, q: i64, n0: i64) -> Result<RevivalCoefficients> {
    let seq = QuadraticPhaseSequence::new(p, q, n0)?;
    let ell = seq.ell as i128;
    let den = q as i128 * ell;
    let b: Vec<Complex64> = (0..ell)
        .map(|k| {
            let s: Complex64 = (0..ell)
                .map(|n| {
                    let num = seq.numerator(n as i64) as i128 * ell - k * n * q as i128;
                    unit_phase(num, den)
                })
                .sum();
            s / ell as f64
        })
        .collect();
    let b_tilde = b
        .iter()
        .enumerate()
        .map(|(k, bk)| unit_phase(k as i128 * n0 as i128, ell) * bk)
        .collect();
    Ok(RevivalCoefficients {
        p,
        q,
        n0,
        ell: seq.ell,
        b,
        b_tilde,
    })
}

/// Closed-form `|b_k|^2` over the minimal period: `1/q` for odd `q`; for
/// `q = 2 (mod 4)` zero on even `k` and `2/q` on odd `k`; `2/q` throughout
/// when `4 | q`.
pub fn modulus_law(p: i64, q: i64) -> Result<Vec<f64>> {
    let set = periodicity_set(p, q)?;
    let qf = q as f64;
    let table = (0..set.ell)
        .map(|k| {
            if q % 2 == 1 {
                1.0 / qf
            } else if q % 4 == 2 {
                if k % 2 == 0 {
                    0.0
                } else {
                    2.0 / qf
                }
            } else {
                2.0 / qf
            }
        })
        .collect();
    Ok(table)
}
