//! Local polynomial regression with 0/1 weights.
//!
//! For a pixel `i` and active set `A`, the fit minimizes
//! `sum_{j in A} (y_j - sum_s a_s (x_j - x_i)^s)^2` over polynomials of total
//! degree `<= r` and returns the intercept `a_0`. The normal equations are
//! ridged, `(X^T X + ridge I) a = X^T y`, and solved by Cholesky.
//!
//! Offsets are rescaled by their largest active magnitude before the design
//! is built. This leaves the intercept of the unridged problem unchanged and
//! keeps the ridge small relative to `X^T X` at every grid size.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::MAX_DIM;
use crate::{Error, Result};

/// Monomial exponents `s` with `|s| <= r`, graded, lexicographic within each
/// degree, constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    d: usize,
    r: usize,
    exponents: Vec<[u8; MAX_DIM]>,
}

impl MonomialBasis {
    pub fn new(d: usize, r: usize) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::domain("dimension out of range"));
        }
        if r > u8::MAX as usize {
            return Err(Error::domain("degree too large"));
        }
        let mut exponents = Vec::new();
        for deg in 0..=r {
            let mut cur = [0u8; MAX_DIM];
            push_degree(&mut exponents, &mut cur, 0, d, deg);
        }
        Ok(MonomialBasis { d, r, exponents })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[[u8; MAX_DIM]] {
        &self.exponents
    }
}

// Exponents summing to `left` over axes `axis..d`, largest first on earlier axes.
fn push_degree(out: &mut Vec<[u8; MAX_DIM]>, cur: &mut [u8; MAX_DIM], axis: usize, d: usize, left: usize) {
    if axis == d - 1 {
        cur[axis] = left as u8;
        out.push(*cur);
        cur[axis] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[axis] = e as u8;
        push_degree(out, cur, axis + 1, d, left - e);
    }
    cur[axis] = 0;
}

/// Convenience for `MonomialBasis::new`.
pub fn basis(d: usize, r: usize) -> Result<MonomialBasis> {
    MonomialBasis::new(d, r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LprConfig {
    /// Polynomial degree.
    pub r: usize,
    /// Diagonal regularizer added to the normal matrix.
    pub ridge: f64,
}

impl Default for LprConfig {
    fn default() -> Self {
        LprConfig { r: 0, ridge: 1e-8 }
    }
}

impl LprConfig {
    pub fn with_degree(r: usize) -> Self {
        LprConfig {
            r,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ridge > 0.0) || !self.ridge.is_finite() {
            return Err(Error::domain("ridge must be positive and finite"));
        }
        if self.r > 8 {
            return Err(Error::domain("polynomial degree above 8 is not supported"));
        }
        Ok(())
    }
}

/// Outcome of a single local fit (unclipped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LprFit {
    pub value: f64,
    /// The active set was too small (or the system not positive definite)
    /// and the center observation was returned instead.
    pub fallback: bool,
}

/// Reusable solver holding the active rows of one local regression.
///
/// Buffers are kept between calls so a per-pixel loop does not allocate.
#[derive(Debug, Clone)]
pub struct LprSolver {
    basis: MonomialBasis,
    ridge: f64,
    offsets: Vec<[f64; MAX_DIM]>,
    values: Vec<f64>,
    ata: Vec<f64>,
    atb: Vec<f64>,
    phi: Vec<f64>,
}

impl LprSolver {
    pub fn new(d: usize, cfg: LprConfig) -> Result<Self> {
        cfg.validate()?;
        let basis = MonomialBasis::new(d, cfg.r)?;
        let q = basis.len();
        Ok(LprSolver {
            basis,
            ridge: cfg.ridge,
            offsets: Vec::new(),
            values: Vec::new(),
            ata: vec![0.0; q * q],
            atb: vec![0.0; q],
            phi: vec![0.0; q],
        })
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn clear(&mut self) {
        self.offsets.clear();
        self.values.clear();
    }

    /// Adds an active row. `offset` is `x_j - x_i` in continuous units.
    #[inline]
    pub fn push(&mut self, offset: &[f64], value: f64) {
        let mut o = [0.0; MAX_DIM];
        o[..offset.len()].copy_from_slice(offset);
        self.offsets.push(o);
        self.values.push(value);
    }

    pub fn active(&self) -> usize {
        self.values.len()
    }

    /// Solves the ridged normal equations over the pushed rows and returns
    /// the intercept, or `y_center` when fewer than `q` rows are active.
    ///
    /// Responses are taken relative to the first active value, so the ridge
    /// shrinks toward the data rather than toward zero and constant data are
    /// reproduced exactly.
    pub fn solve(&mut self, y_center: f64) -> LprFit {
        let q = self.basis.len();
        if self.values.len() < q {
            return LprFit {
                value: y_center,
                fallback: true,
            };
        }
        let d = self.basis.d;

        let mut scale = 0.0f64;
        for o in &self.offsets {
            for &v in &o[..d] {
                scale = scale.max(libm::fabs(v));
            }
        }
        let inv_scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };

        let shift = self.values[0];
        self.ata.iter_mut().for_each(|v| *v = 0.0);
        self.atb.iter_mut().for_each(|v| *v = 0.0);
        let r = self.basis.r;
        for (o, &y) in self.offsets.iter().zip(&self.values) {
            // powers[a][e] = z_a^e
            let mut powers = [[1.0f64; 9]; MAX_DIM];
            for a in 0..d {
                let z = o[a] * inv_scale;
                for e in 1..=r {
                    powers[a][e] = powers[a][e - 1] * z;
                }
            }
            for (p, s) in self.phi.iter_mut().zip(&self.basis.exponents) {
                let mut m = 1.0;
                for a in 0..d {
                    m *= powers[a][s[a] as usize];
                }
                *p = m;
            }
            for row in 0..q {
                let pr = self.phi[row];
                self.atb[row] += pr * (y - shift);
                for col in 0..=row {
                    self.ata[row * q + col] += pr * self.phi[col];
                }
            }
        }
        for k in 0..q {
            self.ata[k * q + k] += self.ridge;
        }

        match cholesky_solve_intercept(&mut self.ata, &mut self.atb, q) {
            Some(a0) => LprFit {
                value: a0 + shift,
                fallback: false,
            },
            None => LprFit {
                value: y_center,
                fallback: true,
            },
        }
    }
}

/// In-place Cholesky of the lower triangle of `a` (q x q, row-major) followed
/// by forward and back substitution. Returns the first solution component.
fn cholesky_solve_intercept(a: &mut [f64], b: &mut [f64], q: usize) -> Option<f64> {
    for j in 0..q {
        let mut diag = a[j * q + j];
        for k in 0..j {
            diag -= a[j * q + k] * a[j * q + k];
        }
        if !(diag > 0.0) {
            return None;
        }
        let ljj = libm::sqrt(diag);
        a[j * q + j] = ljj;
        for i in (j + 1)..q {
            let mut s = a[i * q + j];
            for k in 0..j {
                s -= a[i * q + k] * a[j * q + k];
            }
            a[i * q + j] = s / ljj;
        }
    }
    for i in 0..q {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * q + k] * b[k];
        }
        b[i] = s / a[i * q + i];
    }
    for i in (0..q).rev() {
        let mut s = b[i];
        for k in (i + 1)..q {
            s -= a[k * q + i] * b[k];
        }
        b[i] = s / a[i * q + i];
    }
    Some(b[0])
}

/// Weighted local polynomial fit at the origin of `offsets`.
///
/// Only rows with weight `true` participate. Returns `y_center` when the
/// active rows cannot determine the fit. The result is not clipped.
pub fn lpr_fit<O: AsRef<[f64]>>(
    offsets: &[O],
    weights: &[bool],
    values: &[f64],
    cfg: LprConfig,
    y_center: f64,
) -> Result<f64> {
    if offsets.len() != weights.len() || offsets.len() != values.len() {
        return Err(Error::domain("offsets, weights and values must have equal length"));
    }
    let d = match offsets.first() {
        Some(o) => o.as_ref().len(),
        None => return Ok(y_center),
    };
    if offsets.iter().any(|o| o.as_ref().len() != d) {
        return Err(Error::domain("offsets must share one dimension"));
    }
    let mut solver = LprSolver::new(d, cfg)?;
    for ((o, &w), &v) in offsets.iter().zip(weights).zip(values) {
        if w {
            solver.push(o.as_ref(), v);
        }
    }
    Ok(solver.solve(y_center).value)
}

#[inline]
pub fn clip01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}
