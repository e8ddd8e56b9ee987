//! Ground-truth scenes: piecewise-smooth images with an exact foreground mask.
//!
//! Membership is decided at pixel centers, with no anti-aliasing. In 2-D the
//! first axis is vertical (rows) and the second horizontal (columns).

use alloc::vec::Vec;

use crate::grid::{chebyshev, unravel, ImageGrid, MAX_DIM};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassTag {
    Cartoon,
    Thin,
    Pattern,
    Smooth,
}

impl ClassTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassTag::Cartoon => "cartoon",
            ClassTag::Thin => "thin",
            ClassTag::Pattern => "pattern",
            ClassTag::Smooth => "smooth",
        }
    }
}

/// Ground truth plus the geometry needed by the oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub truth: ImageGrid,
    /// `true` where the pixel center lies in the foreground set.
    pub omega_mask: Vec<bool>,
    /// Hölder smoothness of the pieces; `f64::INFINITY` for piecewise-constant.
    pub alpha: f64,
    /// Lower bound on the jump across the discontinuity (0 when there is none).
    pub mu: f64,
    pub class_tag: ClassTag,
}

impl Scene {
    pub fn jnr(&self, sigma: f64) -> JnrSpec {
        JnrSpec::new(self.mu, sigma)
    }
}

/// Jump-to-noise ratio `mu / sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JnrSpec {
    pub mu: f64,
    pub sigma: f64,
    pub jnr: f64,
}

impl JnrSpec {
    pub fn new(mu: f64, sigma: f64) -> Self {
        JnrSpec {
            mu,
            sigma,
            jnr: mu / sigma,
        }
    }
}

fn check_level(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::domain(alloc::format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

fn check_range(g: &ImageGrid) -> Result<()> {
    if let Some(v) = g.values().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::domain(alloc::format!(
            "scene value {v} outside [0, 1]; adjust levels"
        )));
    }
    Ok(())
}

fn dist2(x: &[f64], c: &[f64; 2]) -> f64 {
    (x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1])
}

fn check_disk(center: [f64; 2], radius: f64) -> Result<()> {
    if !(radius > 0.0) {
        return Err(Error::domain("radius must be positive"));
    }
    for &c in &center {
        if c - radius <= 0.0 || c + radius >= 1.0 {
            return Err(Error::domain(
                "disk must lie strictly inside the unit square",
            ));
        }
    }
    Ok(())
}

/// Piecewise-constant disk on a constant background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlobParams {
    pub n: usize,
    pub mu: f64,
    pub fg: f64,
    pub bg: f64,
    pub center: [f64; 2],
    pub radius: f64,
}

impl BlobParams {
    pub fn new(n: usize, mu: f64) -> Self {
        BlobParams {
            n,
            mu,
            fg: 0.2 + mu,
            bg: 0.2,
            center: [0.5, 0.5],
            radius: 0.3,
        }
    }
}

pub fn make_blob(p: &BlobParams) -> Result<Scene> {
    check_level("fg_level", p.fg)?;
    check_level("bg_level", p.bg)?;
    if (p.fg - p.bg).abs() + 1e-12 < p.mu {
        return Err(Error::domain("|fg - bg| must be at least mu"));
    }
    check_disk(p.center, p.radius)?;
    let r2 = p.radius * p.radius;
    let mask = mask_from_fn(2, p.n, |x| dist2(x, &p.center) <= r2)?;
    let truth = ImageGrid::from_fn(2, p.n, |x| {
        if dist2(x, &p.center) <= r2 {
            p.fg
        } else {
            p.bg
        }
    })?;
    Ok(Scene {
        truth,
        omega_mask: mask,
        alpha: f64::INFINITY,
        mu: p.mu,
        class_tag: ClassTag::Cartoon,
    })
}

/// Disk holding a quadratic dish on top of an affine background ramp.
///
/// Background: `bg_base + bg_slope . (x - center)`.
/// Foreground: background + `mu` + `depth * |x - center|^2 / radius^2`, so the
/// gap on the circle is `mu + depth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BowlParams {
    pub n: usize,
    pub mu: f64,
    pub center: [f64; 2],
    pub radius: f64,
    pub depth: f64,
    pub bg_base: f64,
    pub bg_slope: [f64; 2],
}

impl BowlParams {
    pub fn new(n: usize, mu: f64) -> Self {
        BowlParams {
            n,
            mu,
            center: [0.5, 0.5],
            radius: 0.3,
            depth: 0.25,
            bg_base: 0.25,
            bg_slope: [0.3, 0.2],
        }
    }

    pub fn background(&self, x: &[f64]) -> f64 {
        self.bg_base
            + self.bg_slope[0] * (x[0] - self.center[0])
            + self.bg_slope[1] * (x[1] - self.center[1])
    }

    pub fn foreground(&self, x: &[f64]) -> f64 {
        self.background(x) + self.mu + self.depth * dist2(x, &self.center) / (self.radius * self.radius)
    }
}

pub fn make_bowl(p: &BowlParams) -> Result<Scene> {
    check_disk(p.center, p.radius)?;
    if p.mu < 0.0 || p.depth < 0.0 {
        return Err(Error::domain("mu and depth must be non-negative"));
    }
    let r2 = p.radius * p.radius;
    let mask = mask_from_fn(2, p.n, |x| dist2(x, &p.center) <= r2)?;
    let truth = ImageGrid::from_fn(2, p.n, |x| {
        if dist2(x, &p.center) <= r2 {
            p.foreground(x)
        } else {
            p.background(x)
        }
    })?;
    check_range(&truth)?;
    Ok(Scene {
        truth,
        omega_mask: mask,
        alpha: 2.0,
        mu: p.mu,
        class_tag: ClassTag::Cartoon,
    })
}

/// Band of half-thickness `a` around the graph `z = phi(x')`, where `x'` is
/// the horizontal coordinate and `z` the vertical one.
///
/// The foreground level is `bg + gap(x')` with the gap interpolated linearly
/// from `mu_left` at `x' = 0` to `mu_right` at `x' = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwooshParams {
    pub n: usize,
    pub a: f64,
    pub mu_left: f64,
    pub mu_right: f64,
    pub bg: f64,
}

impl SwooshParams {
    pub fn new(n: usize, mu: f64) -> Self {
        SwooshParams {
            n,
            a: 0.04,
            mu_left: mu,
            mu_right: mu,
            bg: 0.2,
        }
    }
}

/// Default 0.75-Lipschitz sinusoidal curve for [`make_swoosh`].
pub fn swoosh_curve(t: f64) -> f64 {
    0.5 + 0.15 * libm::sin(core::f64::consts::TAU * 0.8 * t)
}

pub fn make_swoosh(p: &SwooshParams, phi: impl Fn(f64) -> f64) -> Result<Scene> {
    if p.a < 4.0 / p.n as f64 {
        return Err(Error::domain("band half-thickness a must be at least 4/n"));
    }
    if p.mu_left < 0.0 || p.mu_right < 0.0 {
        return Err(Error::domain("jumps must be non-negative"));
    }
    check_level("bg_level", p.bg)?;
    for col in 0..p.n {
        let t = (col as f64 + 0.5) / p.n as f64;
        let z = phi(t);
        if z - p.a <= 0.0 || z + p.a >= 1.0 {
            return Err(Error::domain("swoosh band leaves the unit square"));
        }
    }
    let gap = |t: f64| p.mu_left + (p.mu_right - p.mu_left) * t;
    let inside = |x: &[f64]| libm::fabs(x[0] - phi(x[1])) < p.a;
    let mask = mask_from_fn(2, p.n, inside)?;
    let truth = ImageGrid::from_fn(2, p.n, |x| if inside(x) { p.bg + gap(x[1]) } else { p.bg })?;
    check_range(&truth)?;
    Ok(Scene {
        truth,
        omega_mask: mask,
        alpha: f64::INFINITY,
        mu: p.mu_left.min(p.mu_right),
        class_tag: ClassTag::Thin,
    })
}

/// Periodic slabs along the first axis: pixel `i` is foreground when
/// `(i + 1/2) mod period_px < duty * period_px` (zero-based `i`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripesParams {
    pub d: usize,
    pub n: usize,
    pub mu: f64,
    pub period_px: usize,
    pub duty: f64,
    pub fg: f64,
    pub bg: f64,
}

impl StripesParams {
    pub fn new(n: usize, mu: f64, period_px: usize, duty: f64) -> Self {
        StripesParams {
            d: 2,
            n,
            mu,
            period_px,
            duty,
            fg: 0.5 + mu / 2.0,
            bg: 0.5 - mu / 2.0,
        }
    }
}

pub fn make_stripes(p: &StripesParams) -> Result<Scene> {
    if p.period_px < 2 {
        return Err(Error::domain("stripe period must be at least 2 pixels"));
    }
    if !(p.duty > 0.0 && p.duty < 1.0) {
        return Err(Error::domain(alloc::format!(
            "duty = {} must lie strictly between 0 and 1",
            p.duty
        )));
    }
    check_level("fg_level", p.fg)?;
    check_level("bg_level", p.bg)?;
    if (p.fg - p.bg).abs() + 1e-12 < p.mu {
        return Err(Error::domain("|fg - bg| must be at least mu"));
    }
    let period = p.period_px as f64;
    let width = p.duty * period;
    let len = ImageGrid::filled(p.d, p.n, 0.0)?.len();
    let mask: Vec<bool> = (0..len)
        .map(|k| {
            let i = unravel(k, p.d, p.n)[0] as f64 + 0.5;
            i % period < width
        })
        .collect();
    let truth = ImageGrid::new(
        p.d,
        p.n,
        mask.iter().map(|&m| if m { p.fg } else { p.bg }).collect(),
    )?;
    Ok(Scene {
        truth,
        omega_mask: mask,
        alpha: f64::INFINITY,
        mu: p.mu,
        class_tag: ClassTag::Pattern,
    })
}

/// One polynomial piece of a 1-D scene, valid from `start` up to the next
/// piece's start. `coeffs[k]` multiplies `x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPiece {
    pub start: f64,
    pub coeffs: Vec<f64>,
    pub in_omega: bool,
}

impl PolyPiece {
    pub fn new(start: f64, coeffs: &[f64], in_omega: bool) -> Self {
        PolyPiece {
            start,
            coeffs: coeffs.to_vec(),
            in_omega,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// Piecewise-polynomial 1-D scene. With every piece in Ω the scene has no
/// discontinuity; otherwise `mu` is the smallest gap at a membership change.
pub fn make_smooth_1d(n: usize, alpha: f64, pieces: &[PolyPiece]) -> Result<Scene> {
    if pieces.is_empty() {
        return Err(Error::domain("at least one piece is required"));
    }
    if pieces[0].start > 0.0 {
        return Err(Error::domain("first piece must start at or before 0"));
    }
    if pieces.windows(2).any(|w| !(w[1].start > w[0].start)) {
        return Err(Error::domain("piece starts must be increasing"));
    }
    let piece_at = |x: f64| pieces.iter().rposition(|p| p.start <= x).unwrap_or(0);
    let truth = ImageGrid::from_fn(1, n, |x| pieces[piece_at(x[0])].eval(x[0]))?;
    check_range(&truth)?;
    let mask = mask_from_fn(1, n, |x| pieces[piece_at(x[0])].in_omega)?;
    let mut mu = f64::INFINITY;
    for w in pieces.windows(2) {
        if w[0].in_omega != w[1].in_omega {
            let b = w[1].start;
            mu = mu.min(libm::fabs(w[0].eval(b) - w[1].eval(b)));
        }
    }
    let has_jump = mu.is_finite();
    let class_tag = if has_jump { ClassTag::Cartoon } else { ClassTag::Smooth };
    Ok(Scene {
        truth,
        omega_mask: mask,
        alpha,
        mu: if has_jump { mu } else { 0.0 },
        class_tag,
    })
}

fn mask_from_fn(d: usize, n: usize, mut f: impl FnMut(&[f64]) -> bool) -> Result<Vec<bool>> {
    let g = ImageGrid::from_fn(d, n, |x| if f(x) { 1.0 } else { 0.0 })?;
    Ok(g.values().iter().map(|&v| v == 1.0).collect())
}

/// Smallest `|f_i - f_j|` over chessboard-adjacent pixel pairs on opposite
/// sides of the mask, or `None` when the mask is uniform.
pub fn min_cross_boundary_gap(scene: &Scene) -> Option<f64> {
    let g = &scene.truth;
    let (d, n) = (g.d(), g.n());
    let mut best: Option<f64> = None;
    let mut offsets: Vec<[isize; MAX_DIM]> = Vec::new();
    for t in 0..3usize.pow(d as u32) {
        let mut o = [0isize; MAX_DIM];
        let mut rest = t;
        for oa in o.iter_mut().take(d) {
            *oa = (rest % 3) as isize - 1;
            rest /= 3;
        }
        if o.iter().any(|&v| v != 0) {
            offsets.push(o);
        }
    }
    for i in 0..g.len() {
        let ci = unravel(i, d, n);
        'nb: for o in &offsets {
            let mut cj = ci;
            for a in 0..d {
                let p = ci[a] as isize + o[a];
                if p < 0 || p >= n as isize {
                    continue 'nb;
                }
                cj[a] = p as usize;
            }
            let j = crate::grid::ravel(&cj, d, n);
            debug_assert_eq!(chebyshev(&ci, &cj, d), 1);
            if scene.omega_mask[i] != scene.omega_mask[j] {
                let gap = libm::fabs(g.values()[i] - g.values()[j]);
                best = Some(best.map_or(gap, |b| b.min(gap)));
            }
        }
    }
    best
}
