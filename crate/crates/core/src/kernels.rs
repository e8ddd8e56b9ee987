//! 0/1 weight schemes: the spatial box window and the photometric and oracle
//! gates applied inside it.
//!
//! Pixels are addressed by zero-based linear index into a row-major grid.
//! All gates use closed inequalities except [`bo_gate`], which is strict.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{chebyshev, ravel, unravel, Coords, ImageGrid, MAX_DIM};
use crate::{Error, Result};

/// Marks pixels with no opposite-membership pixel anywhere on the grid.
pub const DIST_INF: u32 = u32::MAX;

/// Box window `{j : ||i - j||_inf <= radius_px}`, clipped at the border.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub radius_px: usize,
}

impl WindowSpec {
    pub fn from_radius(radius_px: usize) -> Self {
        WindowSpec { radius_px }
    }

    /// Window with the given (odd) side length in pixels.
    pub fn from_side(side: usize) -> Result<Self> {
        if side % 2 == 0 {
            return Err(Error::domain(alloc::format!(
                "window side must be odd, got {side}"
            )));
        }
        Ok(WindowSpec {
            radius_px: side / 2,
        })
    }

    pub fn side(&self) -> usize {
        2 * self.radius_px + 1
    }

    /// Bandwidth in continuous units, `radius_px / n`.
    pub fn bandwidth(&self, n: usize) -> f64 {
        self.radius_px as f64 / n as f64
    }
}

/// Square patch of odd pixel width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchSpec {
    pub width_px: usize,
}

impl PatchSpec {
    pub fn new(width_px: usize) -> Result<Self> {
        if width_px == 0 || width_px % 2 == 0 {
            return Err(Error::domain(alloc::format!(
                "patch width must be odd and positive, got {width_px}"
            )));
        }
        Ok(PatchSpec { width_px })
    }

    pub fn half(&self) -> usize {
        self.width_px / 2
    }

    pub fn len(&self, d: usize) -> usize {
        self.width_px.pow(d as u32)
    }

    /// Continuous patch bandwidth `h_P` corresponding to this pixel width.
    pub fn bandwidth(&self, n: usize) -> f64 {
        (self.width_px - 1) as f64 / n as f64
    }
}

/// Photometric bandwidth on the `[0, 1]` intensity scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotometricSpec {
    pub h_y: f64,
}

impl PhotometricSpec {
    pub fn new(h_y: f64) -> Result<Self> {
        if !(h_y >= 0.0) {
            return Err(Error::domain("photometric bandwidth must be >= 0"));
        }
        Ok(PhotometricSpec { h_y })
    }
}

/// Linear indices of the in-bounds pixels within the box window around `k`,
/// in raster order.
pub fn spatial_window(k: usize, spec: WindowSpec, d: usize, n: usize) -> Vec<usize> {
    let center = unravel(k, d, n);
    let r = spec.radius_px;
    let mut lo = [0usize; MAX_DIM];
    let mut hi = [0usize; MAX_DIM];
    for a in 0..d {
        lo[a] = center[a].saturating_sub(r);
        hi[a] = (center[a] + r).min(n - 1);
    }
    let mut out = Vec::new();
    let mut c = lo;
    loop {
        out.push(ravel(&c, d, n));
        // odometer increment over the clipped box
        let mut a = d;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            if c[a] < hi[a] {
                c[a] += 1;
                break;
            }
            c[a] = lo[a];
        }
    }
}

/// Reflects an index into `0..n` without repeating the edge sample
/// (`-1 -> 1`, `n -> n - 2`). Valid for offsets up to `n - 1` past either end.
#[inline]
pub(crate) fn mirror(p: isize, n: usize) -> usize {
    let last = n as isize - 1;
    let q = if p < 0 {
        -p
    } else if p > last {
        2 * last - p
    } else {
        p
    };
    q as usize
}

pub(crate) fn check_patch_fits(spec: PatchSpec, n: usize) -> Result<()> {
    if spec.width_px > 2 * n - 1 {
        return Err(Error::domain(alloc::format!(
            "patch width {} exceeds 2n-1 = {}",
            spec.width_px,
            2 * n - 1
        )));
    }
    Ok(())
}

/// Writes the mirror-padded patch around pixel `k` into `out` in raster
/// order. `out.len()` must equal `spec.len(d)`.
pub(crate) fn patch_into(values: &[f64], d: usize, n: usize, k: usize, spec: PatchSpec, out: &mut [f64]) {
    let center = unravel(k, d, n);
    let h = spec.half() as isize;
    let w = spec.width_px;
    let mut off = [0usize; MAX_DIM];
    for slot in out.iter_mut() {
        let mut c: Coords = [0; MAX_DIM];
        for a in 0..d {
            c[a] = mirror(center[a] as isize + off[a] as isize - h, n);
        }
        *slot = values[ravel(&c, d, n)];
        let mut a = d;
        while a > 0 {
            a -= 1;
            off[a] += 1;
            if off[a] < w {
                break;
            }
            off[a] = 0;
        }
    }
}

/// Patch of `y` around pixel `k` with reflective padding at the border.
pub fn extract_patch(y: &ImageGrid, k: usize, spec: PatchSpec) -> Result<Vec<f64>> {
    if k >= y.len() {
        return Err(Error::domain("pixel index out of range"));
    }
    check_patch_fits(spec, y.n())?;
    let mut out = vec![0.0; spec.len(y.d())];
    patch_into(y.values(), y.d(), y.n(), k, spec, &mut out);
    Ok(out)
}

/// Mean of a patch vector, accumulated in raster order.
pub fn patch_mean(patch: &[f64]) -> f64 {
    patch.iter().sum::<f64>() / patch.len() as f64
}

#[inline]
pub fn yf_gate(y_i: f64, y_j: f64, h_y: f64) -> bool {
    libm::fabs(y_i - y_j) <= h_y
}

/// Squared Euclidean distance between two patches, accumulated in order.
#[inline]
pub(crate) fn patch_dist_sq(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let t = x - y;
        s += t * t;
    }
    s
}

/// `||patch_i - patch_j||_2 <= h_y` (unnormalized norm).
pub fn nlm_euclid_gate(patch_i: &[f64], patch_j: &[f64], h_y: f64) -> Result<bool> {
    if patch_i.len() != patch_j.len() {
        return Err(Error::Shape {
            expected: patch_i.len(),
            found: patch_j.len(),
        });
    }
    Ok(libm::sqrt(patch_dist_sq(patch_i, patch_j)) <= h_y)
}

#[inline]
pub fn nlm_avg_gate(mean_i: f64, mean_j: f64, h_y: f64) -> bool {
    libm::fabs(mean_i - mean_j) <= h_y
}

/// Membership oracle: both pixels on the same side of the discontinuity.
#[inline]
pub fn mo_gate(mask: &[bool], i: usize, j: usize) -> bool {
    mask[i] == mask[j]
}

/// Chessboard distance from every pixel to the nearest pixel of opposite
/// membership, in pixels. Pixels with no opposite pixel get [`DIST_INF`].
pub fn boundary_distance(mask: &[bool], d: usize, n: usize) -> Result<Vec<u32>> {
    let len = n
        .checked_pow(d as u32)
        .ok_or_else(|| Error::domain("grid size overflows usize"))?;
    if mask.len() != len {
        return Err(Error::Shape {
            expected: len,
            found: mask.len(),
        });
    }
    let to_fg = bfs_distance(mask, d, n, true);
    let to_bg = bfs_distance(mask, d, n, false);
    Ok(mask
        .iter()
        .enumerate()
        .map(|(k, &m)| if m { to_bg[k] } else { to_fg[k] })
        .collect())
}

/// Multi-source BFS over the 3^d - 1 chessboard neighbours, seeded at every
/// pixel whose membership equals `source`.
fn bfs_distance(mask: &[bool], d: usize, n: usize, source: bool) -> Vec<u32> {
    let mut dist = vec![DIST_INF; mask.len()];
    let mut queue = VecDeque::new();
    for (k, &m) in mask.iter().enumerate() {
        if m == source {
            dist[k] = 0;
            queue.push_back(k);
        }
    }
    let neighbours = neighbour_offsets(d);
    while let Some(k) = queue.pop_front() {
        let c = unravel(k, d, n);
        let next = dist[k] + 1;
        'nb: for off in &neighbours {
            let mut nc = c;
            for a in 0..d {
                let p = c[a] as isize + off[a];
                if p < 0 || p >= n as isize {
                    continue 'nb;
                }
                nc[a] = p as usize;
            }
            let j = ravel(&nc, d, n);
            if dist[j] == DIST_INF {
                dist[j] = next;
                queue.push_back(j);
            }
        }
    }
    dist
}

fn neighbour_offsets(d: usize) -> Vec<[isize; MAX_DIM]> {
    let total = 3usize.pow(d as u32);
    let mut out = Vec::with_capacity(total - 1);
    for t in 0..total {
        let mut off = [0isize; MAX_DIM];
        let mut rest = t;
        for a in 0..d {
            off[a] = (rest % 3) as isize - 1;
            rest /= 3;
        }
        if off.iter().any(|&o| o != 0) {
            out.push(off);
        }
    }
    out
}

/// Bandwidth oracle: `||i - j||_inf < dist(i)`. Not symmetric in `(i, j)`.
pub fn bo_gate(dist_field: &[u32], i: usize, j: usize, d: usize, n: usize) -> bool {
    let di = dist_field[i];
    di == DIST_INF || (chebyshev(&unravel(i, d, n), &unravel(j, d, n), d) as u64) < di as u64
}
