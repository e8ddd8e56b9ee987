//! Regular lattice geometry and the scalar field stored on it.
//!
//! A grid of side `n` in dimension `d` holds `n^d` samples in row-major order
//! (the last axis varies fastest). Sample `i` sits at the pixel center
//! `x_i = ((i_1 - 1/2)/n, ..., (i_d - 1/2)/n)` of the unit cube.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Largest dimension supported by the fixed-size index helpers.
pub const MAX_DIM: usize = 4;

/// Zero-based multi-index; only the first `d` entries are meaningful.
pub type Coords = [usize; MAX_DIM];

/// A d-dimensional scalar field on the regular lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    d: usize,
    n: usize,
    values: Vec<f64>,
}

impl ImageGrid {
    pub fn new(d: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        let len = checked_len(d, n)?;
        if values.len() != len {
            return Err(Error::Shape {
                expected: len,
                found: values.len(),
            });
        }
        Ok(ImageGrid { d, n, values })
    }

    pub fn filled(d: usize, n: usize, value: f64) -> Result<Self> {
        let len = checked_len(d, n)?;
        Ok(ImageGrid {
            d,
            n,
            values: vec![value; len],
        })
    }

    /// Samples `f` at every lattice point. `f` receives the continuous
    /// coordinates of the pixel center.
    pub fn from_fn(d: usize, n: usize, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let len = checked_len(d, n)?;
        let mut values = Vec::with_capacity(len);
        let mut x = [0.0; MAX_DIM];
        for k in 0..len {
            let c = unravel(k, d, n);
            for a in 0..d {
                x[a] = (c[a] as f64 + 0.5) / n as f64;
            }
            values.push(f(&x[..d]));
        }
        Ok(ImageGrid { d, n, values })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_shape(&self, other: &ImageGrid) -> bool {
        self.d == other.d && self.n == other.n
    }

    /// True when every sample lies in `[0, 1]`.
    pub fn in_unit_range(&self) -> bool {
        self.values.iter().all(|v| (0.0..=1.0).contains(v))
    }

    /// Continuous coordinate of the sample at linear index `k`.
    pub fn point(&self, k: usize) -> [f64; MAX_DIM] {
        let c = unravel(k, self.d, self.n);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.d {
            x[a] = (c[a] as f64 + 0.5) / self.n as f64;
        }
        x
    }
}

fn checked_len(d: usize, n: usize) -> Result<usize> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::domain(alloc::format!(
            "dimension {d} not in 1..={MAX_DIM}"
        )));
    }
    if n == 0 {
        return Err(Error::domain("side length must be positive"));
    }
    n.checked_pow(d as u32)
        .ok_or_else(|| Error::domain("grid size overflows usize"))
}

/// Continuous coordinate of the one-based multi-index `index` on a grid of
/// side `n`.
pub fn lattice_point(index: &[usize], n: usize) -> Result<Vec<f64>> {
    if index.is_empty() || index.len() > MAX_DIM {
        return Err(Error::domain("multi-index dimension out of range"));
    }
    index
        .iter()
        .map(|&i| {
            if i == 0 || i > n {
                Err(Error::domain(alloc::format!(
                    "index component {i} outside 1..={n}"
                )))
            } else {
                Ok((i as f64 - 0.5) / n as f64)
            }
        })
        .collect()
}

/// Zero-based multi-index of linear index `k`.
#[inline]
pub fn unravel(mut k: usize, d: usize, n: usize) -> Coords {
    let mut c = [0usize; MAX_DIM];
    for a in (0..d).rev() {
        c[a] = k % n;
        k /= n;
    }
    c
}

/// Linear index of the zero-based multi-index `c`.
#[inline]
pub fn ravel(c: &Coords, d: usize, n: usize) -> usize {
    let mut k = 0;
    for &ca in c.iter().take(d) {
        k = k * n + ca;
    }
    k
}

/// Sup-norm distance between two zero-based multi-indices.
#[inline]
pub fn chebyshev(a: &Coords, b: &Coords, d: usize) -> usize {
    let mut m = 0;
    for ax in 0..d {
        m = m.max(a[ax].abs_diff(b[ax]));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_point_examples() {
        assert_eq!(lattice_point(&[1], 2).unwrap(), vec![0.25]);
        assert_eq!(lattice_point(&[2, 2], 2).unwrap(), vec![0.75, 0.75]);
        assert_eq!(lattice_point(&[3], 4).unwrap(), vec![0.625]);
    }

    #[test]
    fn lattice_point_rejects_out_of_range() {
        assert!(lattice_point(&[0], 4).is_err());
        assert!(lattice_point(&[5], 4).is_err());
        assert!(lattice_point(&[1, 9], 8).is_err());
    }

    #[test]
    fn ravel_unravel_agree() {
        for d in 1..=3 {
            let n: usize = 5;
            for k in 0..n.pow(d as u32) {
                assert_eq!(ravel(&unravel(k, d, n), d, n), k);
            }
        }
    }

    #[test]
    fn new_checks_length() {
        assert!(ImageGrid::new(2, 3, vec![0.0; 9]).is_ok());
        assert_eq!(
            ImageGrid::new(2, 3, vec![0.0; 8]),
            Err(Error::Shape {
                expected: 9,
                found: 8
            })
        );
        assert!(ImageGrid::new(0, 3, vec![]).is_err());
    }

    #[test]
    fn from_fn_uses_pixel_centers() {
        let g = ImageGrid::from_fn(1, 8, |x| x[0]).unwrap();
        assert_eq!(g.values()[0], 0.0625);
        assert_eq!(g.values()[1], 0.1875);
        assert_eq!(g.point(7)[0], 0.9375);
    }
}
