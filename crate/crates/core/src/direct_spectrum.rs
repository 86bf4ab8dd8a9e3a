//! Finite-difference diagonalisation of `-(h^2/2) d^2/dx^2 + V` with
//! Dirichlet walls at `+-L`.
//!
//! Eigenvalues in the window are isolated by bisection on the inertia of
//! `H - sigma` (Sturm counts from a banded LDL^T factorisation), so cost is
//! linear in the grid size and no dense matrix is ever formed. Eigenvectors
//! come from inverse iteration with a pivoted band solver.

use rayon::prelude::*;
use serde::Serialize;

use crate::potential::Potential;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stencil {
    /// Three-point central difference.
    Second,
    /// Five-point central difference.
    Fourth,
}

impl Stencil {
    fn bandwidth(self) -> usize {
        match self {
            Stencil::Second => 1,
            Stencil::Fourth => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedOperator {
    pub h: f64,
    pub half_width: f64,
    pub dx: f64,
    pub stencil: Stencil,
    /// Interior grid points `x_i = -L + (i + 1) dx`.
    pub grid: Vec<f64>,
    diag: Vec<f64>,
    /// Constant off-diagonals, `bands[d-1]` sits at distance `d`.
    bands: Vec<f64>,
}

/// Largest grid spacing allowed at `h`: a tenth of the local wavelength at
/// the top of the window.
pub fn resolution_bound(v: &Potential, h: f64) -> f64 {
    let vmin = v.grid_minimum(20_001);
    h / (10.0 * (2.0 * (h - vmin)).sqrt())
}

pub fn discretize(
    v: &Potential,
    h: f64,
    half_width: f64,
    dx: f64,
    stencil: Stencil,
) -> Result<DiscretizedOperator> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain {
            name: "h",
            value: h,
            domain: "(0, 1)".into(),
        });
    }
    let bound = resolution_bound(v, h);
    if !(dx > 0.0) || dx > bound {
        return Err(Error::Resolution { dx, bound });
    }
    let required = h + 1.0;
    for x in [-half_width, half_width] {
        let value = v.evaluate(x);
        if value <= required {
            return Err(Error::Truncation {
                half_width,
                value,
                required,
            });
        }
    }
    let cells = (2.0 * half_width / dx).ceil() as usize;
    let dx = 2.0 * half_width / cells as f64;
    let n = cells - 1;
    let grid: Vec<f64> = (0..n).map(|i| -half_width + (i + 1) as f64 * dx).collect();
    let k = h * h / (dx * dx);
    let (c0, bands) = match stencil {
        Stencil::Second => (k, vec![-0.5 * k]),
        Stencil::Fourth => (1.25 * k, vec![-2.0 / 3.0 * k, k / 24.0]),
    };
    let diag = grid.iter().map(|&x| v.evaluate(x) + c0).collect();
    Ok(DiscretizedOperator {
        h,
        half_width,
        dx,
        stencil,
        grid,
        diag,
        bands,
    })
}

impl DiscretizedOperator {
    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let d = i.abs_diff(j);
        if d == 0 {
            self.diag[i]
        } else {
            self.bands.get(d - 1).copied().unwrap_or(0.0)
        }
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let m1 = self.bands[0];
        let m2 = self.bands.get(1).copied().unwrap_or(0.0);
        banded_inertia(self.dim(), sigma, |i| (self.diag[i], m1, m2))
    }

    /// Entry of the operator restricted to one reflection sector, in the
    /// basis `(e_i +- e_{n-1-i}) / sqrt 2` plus `e_c` for an even sector of
    /// odd size.
    fn sector_entry(&self, parity: Parity, i: usize, j: usize) -> f64 {
        let n = self.dim();
        let sign = if parity == Parity::Odd { -1.0 } else { 1.0 };
        let c = n / 2;
        if n % 2 == 1 && parity == Parity::Even && (i == c || j == c) {
            return if i == j { self.entry(c, c) } else { std::f64::consts::SQRT_2 * self.entry(i, j) };
        }
        self.entry(i, j) + sign * self.entry(i, n - 1 - j)
    }

    fn sector_dim(&self, parity: Parity) -> usize {
        let n = self.dim();
        match parity {
            Parity::Even => n.div_ceil(2),
            _ => n / 2,
        }
    }

    /// Eigenvalues below `sigma` within one sector of a symmetric operator.
    pub fn sector_count_below(&self, parity: Parity, sigma: f64) -> usize {
        SectorMatrix::new(self, parity).count_below(sigma)
    }

    /// Eigenvalue number `j` (0-based, ascending) by bisection in `[lo, hi]`.
    fn eigenvalue(&self, j: usize, lo: f64, hi: f64) -> f64 {
        bisect_level(|x| self.count_below(x), j, lo, hi, BISECTION_TOLERANCE * self.h)
    }

    /// Solves `(H - sigma) y = rhs` with partial pivoting.
    fn shifted_solve(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let bw = self.stencil.bandwidth();
        let width = 3 * bw + 1;
        // row r holds columns r-bw ..= r+2bw
        let mut rows: Vec<Vec<f64>> = (0..n)
            .map(|r| {
                (0..width)
                    .map(|c| {
                        let col = r as isize - bw as isize + c as isize;
                        if col < 0 || col >= n as isize || (col - r as isize).unsigned_abs() > bw {
                            0.0
                        } else {
                            let e = self.entry(r, col as usize);
                            if col as usize == r { e - sigma } else { e }
                        }
                    })
                    .collect()
            })
            .collect();
        let mut b = rhs.to_vec();
        let at = |rows: &Vec<Vec<f64>>, r: usize, col: usize| -> f64 {
            let c = col as isize - r as isize + bw as isize;
            if c < 0 || c >= width as isize {
                0.0
            } else {
                rows[r][c as usize]
            }
        };
        let tiny = 1e-300;
        for k in 0..n {
            let last = (k + bw).min(n - 1);
            let p = (k..=last)
                .max_by(|&x, &y| at(&rows, x, k).abs().total_cmp(&at(&rows, y, k).abs()))
                .unwrap();
            if p != k {
                let hi_col = (k + 2 * bw).min(n - 1);
                let rk: Vec<f64> = (k..=hi_col).map(|c| at(&rows, k, c)).collect();
                let rp: Vec<f64> = (k..=hi_col).map(|c| at(&rows, p, c)).collect();
                for (i, c) in (k..=hi_col).enumerate() {
                    let ck = c - k + bw;
                    rows[k][ck] = rp[i];
                    let cp = c as isize - p as isize + bw as isize;
                    if cp >= 0 && (cp as usize) < width {
                        rows[p][cp as usize] = rk[i];
                    }
                }
                b.swap(k, p);
            }
            let mut piv = at(&rows, k, k);
            if piv.abs() < tiny {
                piv = tiny;
                rows[k][bw] = piv;
            }
            for r in k + 1..=last {
                let f = at(&rows, r, k) / piv;
                if f == 0.0 {
                    continue;
                }
                let hi_col = (k + 2 * bw).min(n - 1);
                for c in k..=hi_col {
                    let v = at(&rows, k, c);
                    let cr = c as isize - r as isize + bw as isize;
                    if cr >= 0 && (cr as usize) < width {
                        rows[r][cr as usize] -= f * v;
                    }
                }
                b[r] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let hi_col = (k + 2 * bw).min(n - 1);
            let mut s = b[k];
            for c in k + 1..=hi_col {
                s -= at(&rows, k, c) * x[c];
            }
            x[k] = s / at(&rows, k, k);
        }
        x
    }

    /// Normalised eigenvector (`sum psi^2 dx = 1`) for an accurate eigenvalue.
    pub fn eigenvector(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.dim();
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i % 7) as f64)).collect();
        let shift = eigenvalue + 1e-14 * eigenvalue.abs().max(self.h);
        for _ in 0..3 {
            v = self.shifted_solve(shift, &v);
            let norm = (v.iter().map(|x| x * x).sum::<f64>() * self.dx).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        // fix the overall sign by the largest component
        let big = v.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
        if big < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    }
}

/// Bisection stops once the bracket is this many multiples of `h` wide.
const BISECTION_TOLERANCE: f64 = 1e-16;

/// Level number `j` (0-based, ascending) in `[lo, hi]` by bisection on the
/// counting function.
fn bisect_level(count_below: impl Fn(f64) -> usize, j: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol {
            break;
        }
        if count_below(mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Inertia of a symmetric matrix with bandwidth at most two; `row(i)` gives
/// `(A_ii, A_{i,i-1}, A_{i,i-2})`. Zero pivots are nudged negative.
fn banded_inertia(n: usize, sigma: f64, row: impl Fn(usize) -> (f64, f64, f64)) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    // previous pivots and the multiplier l_{i-1,i-2}
    let (mut d1, mut d2, mut l_prev) = (1.0, 1.0, 0.0);
    let mut count = 0;
    for i in 0..n {
        let (a, b1, b2) = row(i);
        let (l2, l1) = match i {
            0 => (0.0, 0.0),
            1 => (0.0, b1 / d1),
            _ => {
                let l2 = b2 / d2;
                (l2, (b1 - l2 * d2 * l_prev) / d1)
            }
        };
        let mut d = a - sigma - l2 * l2 * d2 - l1 * l1 * d1;
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
        d2 = d1;
        d1 = d;
        l_prev = l1;
    }
    count
}

/// One reflection sector of a symmetric operator, folded into explicit bands.
struct SectorMatrix {
    /// `(A_ii, A_{i,i-1}, A_{i,i-2})` per row.
    rows: Vec<(f64, f64, f64)>,
}

impl SectorMatrix {
    fn new(op: &DiscretizedOperator, parity: Parity) -> Self {
        let rows = (0..op.sector_dim(parity))
            .map(|i| {
                let at = |j: Option<usize>| j.map_or(0.0, |j| op.sector_entry(parity, i, j));
                (at(Some(i)), at(i.checked_sub(1)), at(i.checked_sub(2)))
            })
            .collect();
        Self { rows }
    }

    fn count_below(&self, sigma: f64) -> usize {
        banded_inertia(self.rows.len(), sigma, |i| self.rows[i])
    }

    fn eigenvalue(&self, j: usize, lo: f64, hi: f64, tol: f64) -> f64 {
        bisect_level(|x| self.count_below(x), j, lo, hi, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowedSpectrum {
    pub h: f64,
    /// Ascending eigenvalues inside `[-h, h]`.
    pub eigenvalues: Vec<f64>,
    /// Position of each eigenvalue in the full discrete spectrum.
    pub indices: Vec<usize>,
    pub parities: Vec<Parity>,
    /// Decimated `(x, psi(x))` samples of each eigenvector.
    pub eigenvector_samples: Vec<Vec<(f64, f64)>>,
}

impl WindowedSpectrum {
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn parity_class(&self, parity: Parity) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.parities)
            .filter(|(_, p)| **p == parity)
            .map(|(e, _)| *e)
            .collect()
    }

    pub fn parities_alternate(&self) -> bool {
        self.parities.windows(2).all(|w| {
            w[0] != Parity::NotApplicable && w[1] != Parity::NotApplicable && w[0] != w[1]
        })
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowOptions {
    /// Eigenvector samples kept per level; zero skips inverse iteration.
    pub samples: usize,
}

impl Default for WindowOptions {
    fn default() -> Self {
        Self { samples: 400 }
    }
}

/// Eigenvalues of `op` inside `[-h, h]` with parity labels.
pub fn window_spectrum(op: &DiscretizedOperator, symmetric: bool, opts: WindowOptions) -> Result<WindowedSpectrum> {
    spectrum_between(op, -op.h, op.h, symmetric, opts)
}

/// Eigenvalues of `op` inside `[lower, upper]`. With `symmetric` set the
/// reflection sectors are solved separately and each level carries its
/// parity. The grid should resolve `upper`, not just `h`.
pub fn spectrum_between(
    op: &DiscretizedOperator,
    lower: f64,
    upper: f64,
    symmetric: bool,
    opts: WindowOptions,
) -> Result<WindowedSpectrum> {
    if !(lower < upper) {
        return Err(Error::Parameter(format!("empty energy range [{lower}, {upper}]")));
    }
    let h = op.h;
    let lo = op.count_below(lower);
    let hi = op.count_below(upper);
    let indices: Vec<usize> = (lo..hi).collect();
    let (eigenvalues, parities): (Vec<f64>, Vec<Parity>) = if symmetric {
        // each sector separately, so near-degenerate doublets keep exact labels
        let mut labelled: Vec<(f64, Parity)> = [Parity::Even, Parity::Odd]
            .iter()
            .flat_map(|&parity| {
                let sector = SectorMatrix::new(op, parity);
                let (a, b) = (sector.count_below(lower), sector.count_below(upper));
                (a..b)
                    .into_par_iter()
                    .map(|j| (sector.eigenvalue(j, lower, upper, BISECTION_TOLERANCE * h), parity))
                    .collect::<Vec<_>>()
            })
            .collect();
        labelled.sort_by(|x, y| x.0.total_cmp(&y.0));
        labelled.into_iter().unzip()
    } else {
        let values = indices
            .par_iter()
            .map(|&j| op.eigenvalue(j, lower, upper))
            .collect();
        (values, vec![Parity::NotApplicable; indices.len()])
    };
    if eigenvalues.len() != indices.len() {
        return Err(Error::SolverFailure(format!(
            "sector counts give {} levels, the full operator {}",
            eigenvalues.len(),
            indices.len()
        )));
    }
    if eigenvalues.iter().any(|e| !(lower..=upper).contains(e)) {
        return Err(Error::SolverFailure("eigenvalue escaped the window".into()));
    }
    let vectors: Vec<Option<Vec<f64>>> = eigenvalues
        .par_iter()
        .map(|&e| (opts.samples > 0).then(|| op.eigenvector(e)))
        .collect();
    let n = op.dim();
    let stride = (n / opts.samples.max(1)).max(1);
    let eigenvector_samples = vectors
        .iter()
        .map(|v| match v {
            Some(v) if opts.samples > 0 => (0..n).step_by(stride).map(|i| (op.grid[i], v[i])).collect(),
            _ => Vec::new(),
        })
        .collect();
    Ok(WindowedSpectrum {
        h,
        eigenvalues,
        indices,
        parities,
        eigenvector_samples,
    })
}
