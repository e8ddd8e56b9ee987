//! The six estimator families, each a local polynomial regression over a
//! gated box window.
//!
//! For every pixel `i` the active set is
//! `A_i = { j : ||i - j||_inf <= radius, gate(i, j) }` and the estimate is
//! `clip01(lpr_fit(A_i))`. The families differ only in the gate:
//!
//! | family   | gate                                              |
//! |----------|---------------------------------------------------|
//! | `Lf`     | always open                                       |
//! | `Yf`     | `|y_i - y_j| <= h_y`                              |
//! | `Nlm`    | `||P_i - P_j||_2 <= h_y` on patches of noisy `y`  |
//! | `NlmAvg` | `|mean(P_i) - mean(P_j)| <= h_y`                  |
//! | `Mo`     | same side of the true mask (or `|f_i - f_j| <= h_y` with a truth oracle) |
//! | `Bo`     | `||i - j||_inf < dist(i, boundary)`               |

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::grid::{unravel, ImageGrid, MAX_DIM};
use crate::kernels::{
    boundary_distance, check_patch_fits, mirror, patch_dist_sq, patch_into, patch_mean, PatchSpec,
    PhotometricSpec, WindowSpec, DIST_INF,
};
use crate::lpr::{clip01, LprConfig, LprSolver};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Linear filtering.
    Lf,
    /// Yaroslavsky's filter.
    Yf,
    /// Euclidean non-local means.
    Nlm,
    /// Non-local means comparing patch means.
    NlmAvg,
    /// Membership oracle.
    Mo,
    /// Bandwidth oracle.
    Bo,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Lf,
        Family::Yf,
        Family::Nlm,
        Family::NlmAvg,
        Family::Mo,
        Family::Bo,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Lf => "lf",
            Family::Yf => "yf",
            Family::Nlm => "nlm",
            Family::NlmAvg => "nlm-avg",
            Family::Mo => "mo",
            Family::Bo => "bo",
        }
    }

    pub fn uses_patches(&self) -> bool {
        matches!(self, Family::Nlm | Family::NlmAvg)
    }

    pub fn needs_photometric(&self) -> bool {
        matches!(self, Family::Yf | Family::Nlm | Family::NlmAvg)
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self, Family::Mo | Family::Bo)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lf" => Ok(Family::Lf),
            "yf" => Ok(Family::Yf),
            "nlm" => Ok(Family::Nlm),
            "nlm-avg" | "nlm_avg" | "nlmavg" => Ok(Family::NlmAvg),
            "mo" => Ok(Family::Mo),
            "bo" => Ok(Family::Bo),
            other => Err(Error::domain(alloc::format!("unknown method family '{other}'"))),
        }
    }
}

/// Full description of one estimator.
///
/// For `Bo`, `window.radius_px` is the maximal radius; the radius used at
/// pixel `i` is `min(radius_px, dist(i) - 1)`. `Mo` may carry a photometric
/// threshold, which is only read when the oracle is a truth image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodConfig {
    pub family: Family,
    pub window: WindowSpec,
    pub patch: Option<PatchSpec>,
    pub photometric: Option<PhotometricSpec>,
    pub lpr: LprConfig,
}

impl MethodConfig {
    pub fn new(family: Family, window: WindowSpec, lpr: LprConfig) -> Self {
        MethodConfig {
            family,
            window,
            patch: None,
            photometric: None,
            lpr,
        }
    }

    pub fn with_patch(mut self, patch: PatchSpec) -> Self {
        self.patch = Some(patch);
        self
    }

    pub fn with_h_y(mut self, h_y: f64) -> Self {
        self.photometric = Some(PhotometricSpec { h_y });
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.lpr.validate()?;
        let fam = self.family;
        if fam.needs_photometric() && self.photometric.is_none() {
            return Err(Error::domain(alloc::format!(
                "{fam} requires a photometric bandwidth"
            )));
        }
        if matches!(fam, Family::Lf | Family::Bo) && self.photometric.is_some() {
            return Err(Error::domain(alloc::format!(
                "{fam} takes no photometric bandwidth"
            )));
        }
        if let Some(p) = self.photometric {
            PhotometricSpec::new(p.h_y)?;
        }
        match (fam.uses_patches(), self.patch) {
            (true, None) => {
                return Err(Error::domain(alloc::format!("{fam} requires a patch size")))
            }
            (true, Some(p)) => {
                PatchSpec::new(p.width_px)?;
            }
            (false, Some(_)) => {
                return Err(Error::domain(alloc::format!("{fam} takes no patch size")))
            }
            (false, None) => {}
        }
        Ok(())
    }
}

/// Window sides minimizing the membership-oracle MSE on the Bowl image,
/// indexed `[r][sigma in {5, 20, 50, 100}]`.
const TABLE_SIDES: [[usize; 4]; 3] = [[7, 13, 23, 35], [9, 17, 25, 33], [23, 41, 59, 61]];
const TABLE_SIGMAS: [f64; 4] = [5.0, 20.0, 50.0, 100.0];

/// Patch width used for every patch-based method.
pub const DEFAULT_PATCH_WIDTH: usize = 7;

/// Photometric bandwidth multipliers on the 0-255 scale.
pub const YF_HY_FACTOR: f64 = 3.162_277_660_168_379_5; // sqrt(10)
pub const NLM_AVG_HY_FACTOR: f64 = 0.29;
pub const NLM_HY_FACTOR: f64 = 13.1;
pub const MO_TRUTH_HY_255: f64 = 30.0;

/// Window side for `(sigma255, r)` from the reference table, using the
/// nearest tabulated noise level (ties go to the lower level).
pub fn table_window_side(sigma255: f64, r: usize) -> Result<usize> {
    if r > 2 {
        return Err(Error::domain("tabulated bandwidths exist for r in 0..=2 only"));
    }
    if !(sigma255 >= 0.0) {
        return Err(Error::domain("sigma must be non-negative"));
    }
    let mut best = 0;
    for (k, s) in TABLE_SIGMAS.iter().enumerate() {
        if libm::fabs(s - sigma255) < libm::fabs(TABLE_SIGMAS[best] - sigma255) {
            best = k;
        }
    }
    Ok(TABLE_SIDES[r][best])
}

/// Reference configuration for `family` at noise level `sigma255` (0-255
/// scale) and degree `r`. Photometric bandwidths are returned on `[0, 1]`.
pub fn default_bandwidths(family: Family, sigma255: f64, r: usize) -> Result<MethodConfig> {
    let side = table_window_side(sigma255, r)?;
    let mut cfg = MethodConfig::new(family, WindowSpec::from_side(side)?, LprConfig::with_degree(r));
    let scale = 1.0 / 255.0;
    match family {
        Family::Lf | Family::Bo => {}
        Family::Yf => cfg = cfg.with_h_y(YF_HY_FACTOR * sigma255 * scale),
        Family::NlmAvg => {
            cfg = cfg
                .with_patch(PatchSpec::new(DEFAULT_PATCH_WIDTH)?)
                .with_h_y(NLM_AVG_HY_FACTOR * sigma255 * scale)
        }
        Family::Nlm => {
            cfg = cfg
                .with_patch(PatchSpec::new(DEFAULT_PATCH_WIDTH)?)
                .with_h_y(NLM_HY_FACTOR * sigma255 * scale)
        }
        Family::Mo => cfg = cfg.with_h_y(MO_TRUTH_HY_255 * scale),
    }
    Ok(cfg)
}

/// Ground-truth information for the oracle families.
#[derive(Debug, Clone, Copy)]
pub enum Oracle<'a> {
    None,
    /// Foreground mask; gates on membership.
    Mask(&'a [bool]),
    /// Noise-free image; `Mo` gates on `|f_i - f_j| <= h_y`.
    Truth(&'a ImageGrid),
}

/// Summary of active-set sizes over the processed pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveStats {
    pub min: usize,
    pub mean: f64,
    pub max: usize,
}

/// Per-range bookkeeping; merge partial results with [`RangeStats::merge`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeStats {
    pub pixels: usize,
    pub fallback_count: usize,
    pub active_min: usize,
    pub active_max: usize,
    pub active_sum: u64,
}

impl Default for RangeStats {
    fn default() -> Self {
        RangeStats {
            pixels: 0,
            fallback_count: 0,
            active_min: usize::MAX,
            active_max: 0,
            active_sum: 0,
        }
    }
}

impl RangeStats {
    pub fn merge(self, o: RangeStats) -> RangeStats {
        RangeStats {
            pixels: self.pixels + o.pixels,
            fallback_count: self.fallback_count + o.fallback_count,
            active_min: self.active_min.min(o.active_min),
            active_max: self.active_max.max(o.active_max),
            active_sum: self.active_sum + o.active_sum,
        }
    }

    pub fn active_stats(&self) -> ActiveStats {
        ActiveStats {
            min: if self.pixels == 0 { 0 } else { self.active_min },
            mean: if self.pixels == 0 {
                0.0
            } else {
                self.active_sum as f64 / self.pixels as f64
            },
            max: self.active_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseResult {
    /// Clipped estimate.
    pub estimate: ImageGrid,
    /// Pixels where the fit fell back to the noisy observation.
    pub fallback_count: usize,
    pub active_size_stats: ActiveStats,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenoiserOptions {
    /// Above this many bytes, NLM patch vectors are recomputed on the fly
    /// instead of being cached for the whole image.
    pub patch_memory_cap: usize,
}

impl Default for DenoiserOptions {
    fn default() -> Self {
        DenoiserOptions {
            patch_memory_cap: 1 << 30,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct WindowOffset {
    delta: [isize; MAX_DIM],
    linear: isize,
    cheb: usize,
    cont: [f64; MAX_DIM],
}

#[derive(Debug, Clone)]
enum Gate {
    Open,
    Pixel { h: f64 },
    Patch { cache: Option<Vec<f64>>, spec: PatchSpec, len: usize, h: f64, early: f64 },
    Mean { means: Vec<f64>, h: f64 },
    Mask(Vec<bool>),
    Truth { values: Vec<f64>, h: f64 },
    Radius(Vec<u32>),
}

/// Scratch buffers for one worker.
#[derive(Debug, Clone)]
pub struct Workspace {
    solver: LprSolver,
    patch_i: Vec<f64>,
}

/// A prepared estimator for one noisy image.
///
/// Construction runs the sequential precompute (patches, patch means,
/// distance transform). Afterwards [`Denoiser::denoise_range`] may be called
/// on disjoint pixel ranges from any number of workers; each output pixel
/// depends only on immutable inputs, so results do not depend on the
/// partitioning.
#[derive(Debug, Clone)]
pub struct Denoiser<'a> {
    y: &'a ImageGrid,
    cfg: MethodConfig,
    gate: Gate,
    offsets: Vec<WindowOffset>,
}

impl<'a> Denoiser<'a> {
    pub fn new(y: &'a ImageGrid, cfg: MethodConfig, oracle: Oracle<'_>) -> Result<Self> {
        Self::with_options(y, cfg, oracle, DenoiserOptions::default())
    }

    pub fn with_options(
        y: &'a ImageGrid,
        cfg: MethodConfig,
        oracle: Oracle<'_>,
        opts: DenoiserOptions,
    ) -> Result<Self> {
        cfg.validate()?;
        let (d, n) = (y.d(), y.n());
        let check_mask = |m: &[bool]| {
            if m.len() != y.len() {
                Err(Error::Shape {
                    expected: y.len(),
                    found: m.len(),
                })
            } else {
                Ok(())
            }
        };
        let gate = match cfg.family {
            Family::Lf => Gate::Open,
            Family::Yf => Gate::Pixel {
                h: cfg.photometric.map(|p| p.h_y).unwrap_or(f64::INFINITY),
            },
            Family::Nlm => {
                let spec = cfg.patch.expect("validated");
                check_patch_fits(spec, n)?;
                let h = cfg.photometric.expect("validated").h_y;
                let len = spec.len(d);
                let bytes = y.len().saturating_mul(len).saturating_mul(8);
                let cache = if bytes <= opts.patch_memory_cap {
                    let mut all = vec![0.0; y.len() * len];
                    for (k, chunk) in all.chunks_exact_mut(len).enumerate() {
                        patch_into(y.values(), d, n, k, spec, chunk);
                    }
                    Some(all)
                } else {
                    None
                };
                // Partial sums above this bound certainly fail sqrt(s) <= h.
                let early = h * h * (1.0 + 1e-9);
                Gate::Patch { cache, spec, len, h, early }
            }
            Family::NlmAvg => {
                let spec = cfg.patch.expect("validated");
                check_patch_fits(spec, n)?;
                let mut buf = vec![0.0; spec.len(d)];
                let means = (0..y.len())
                    .map(|k| {
                        patch_into(y.values(), d, n, k, spec, &mut buf);
                        patch_mean(&buf)
                    })
                    .collect();
                Gate::Mean {
                    means,
                    h: cfg.photometric.expect("validated").h_y,
                }
            }
            Family::Mo => match oracle {
                Oracle::Mask(m) => {
                    check_mask(m)?;
                    Gate::Mask(m.to_vec())
                }
                Oracle::Truth(t) => {
                    if !t.same_shape(y) {
                        return Err(Error::Shape {
                            expected: y.len(),
                            found: t.len(),
                        });
                    }
                    let h = cfg
                        .photometric
                        .ok_or_else(|| Error::domain("truth-gated MO needs a threshold h_y"))?
                        .h_y;
                    Gate::Truth {
                        values: t.values().to_vec(),
                        h,
                    }
                }
                Oracle::None => return Err(Error::domain("mo requires an oracle mask or truth image")),
            },
            Family::Bo => match oracle {
                Oracle::Mask(m) => {
                    check_mask(m)?;
                    Gate::Radius(boundary_distance(m, d, n)?)
                }
                _ => return Err(Error::domain("bo requires an oracle mask")),
            },
        };

        let offsets = window_offsets(cfg.window.radius_px.min(n.saturating_sub(1)), d, n);
        Ok(Denoiser { y, cfg, gate, offsets })
    }

    pub fn config(&self) -> &MethodConfig {
        &self.cfg
    }

    /// The noisy image being denoised.
    pub fn input(&self) -> &ImageGrid {
        self.y
    }

    pub fn workspace(&self) -> Workspace {
        let len = match &self.gate {
            Gate::Patch { len, .. } => *len,
            _ => 0,
        };
        Workspace {
            solver: LprSolver::new(self.y.d(), self.cfg.lpr).expect("validated"),
            patch_i: vec![0.0; len],
        }
    }

    /// Estimates pixels `start..start + out.len()` into `out`.
    pub fn denoise_range(&self, start: usize, out: &mut [f64], ws: &mut Workspace) -> RangeStats {
        let mut stats = RangeStats::default();
        for (slot, k) in out.iter_mut().zip(start..) {
            ws.solver.clear();
            self.visit_active(k, &mut ws.patch_i, |off, j| {
                ws.solver.push(&off.cont[..self.y.d()], self.y.values()[j]);
            });
            let active = ws.solver.active();
            let fit = ws.solver.solve(self.y.values()[k]);
            *slot = clip01(fit.value);
            stats.pixels += 1;
            stats.fallback_count += fit.fallback as usize;
            stats.active_min = stats.active_min.min(active);
            stats.active_max = stats.active_max.max(active);
            stats.active_sum += active as u64;
        }
        stats
    }

    /// Sequential denoise of the whole image.
    pub fn run(&self) -> DenoiseResult {
        let mut out = vec![0.0; self.y.len()];
        let mut ws = self.workspace();
        let stats = self.denoise_range(0, &mut out, &mut ws);
        self.finish(out, stats)
    }

    /// Packs a full output buffer and merged statistics into a result.
    pub fn finish(&self, out: Vec<f64>, stats: RangeStats) -> DenoiseResult {
        DenoiseResult {
            estimate: ImageGrid::new(self.y.d(), self.y.n(), out).expect("shape preserved"),
            fallback_count: stats.fallback_count,
            active_size_stats: stats.active_stats(),
        }
    }

    /// Linear indices of the active set at pixel `k`, in window raster order.
    pub fn active_set(&self, k: usize) -> Vec<usize> {
        let mut buf = vec![
            0.0;
            match &self.gate {
                Gate::Patch { len, .. } => *len,
                _ => 0,
            }
        ];
        let mut out = Vec::new();
        self.visit_active(k, &mut buf, |_, j| out.push(j));
        out
    }

    #[inline]
    fn visit_active(&self, k: usize, patch_i: &mut [f64], mut f: impl FnMut(&WindowOffset, usize)) {
        let (d, n) = (self.y.d(), self.y.n());
        let c = unravel(k, d, n);
        let radius = match &self.gate {
            Gate::Radius(dist) => {
                let di = dist[k];
                if di == DIST_INF {
                    self.cfg.window.radius_px
                } else {
                    self.cfg.window.radius_px.min(di as usize - 1)
                }
            }
            _ => self.cfg.window.radius_px,
        };
        if let Gate::Patch { cache: None, spec, .. } = &self.gate {
            patch_into(self.y.values(), d, n, k, *spec, patch_i);
        }
        let yv = self.y.values();
        'off: for off in &self.offsets {
            if off.cheb > radius {
                continue;
            }
            for a in 0..d {
                let p = c[a] as isize + off.delta[a];
                if p < 0 || p >= n as isize {
                    continue 'off;
                }
            }
            let j = (k as isize + off.linear) as usize;
            let open = match &self.gate {
                Gate::Open | Gate::Radius(_) => true,
                Gate::Pixel { h } => libm::fabs(yv[k] - yv[j]) <= *h,
                Gate::Patch { cache: Some(all), len, h, early, .. } => {
                    let a = &all[k * len..(k + 1) * len];
                    let b = &all[j * len..(j + 1) * len];
                    patch_within(a, b, *h, *early)
                }
                Gate::Patch { cache: None, spec, h, early, .. } => {
                    lazy_patch_within(yv, d, n, patch_i, j, *spec, *h, *early)
                }
                Gate::Mean { means, h } => libm::fabs(means[k] - means[j]) <= *h,
                Gate::Mask(m) => m[k] == m[j],
                Gate::Truth { values, h } => libm::fabs(values[k] - values[j]) <= *h,
            };
            if open {
                f(off, j);
            }
        }
    }
}

#[inline]
fn patch_within(a: &[f64], b: &[f64], h: f64, early: f64) -> bool {
    // Same accumulation order as `patch_dist_sq`, so the decision matches
    // `nlm_euclid_gate` bit for bit.
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let t = x - y;
        s += t * t;
        if s > early {
            return false;
        }
    }
    debug_assert!(s == patch_dist_sq(a, b) || s > early);
    libm::sqrt(s) <= h
}

#[allow(clippy::too_many_arguments)]
fn lazy_patch_within(
    values: &[f64],
    d: usize,
    n: usize,
    patch_i: &[f64],
    j: usize,
    spec: PatchSpec,
    h: f64,
    early: f64,
) -> bool {
    let center = unravel(j, d, n);
    let half = spec.half() as isize;
    let w = spec.width_px;
    let mut off = [0usize; MAX_DIM];
    let mut s = 0.0;
    for &pi in patch_i {
        let mut idx = 0usize;
        for a in 0..d {
            idx = idx * n + mirror(center[a] as isize + off[a] as isize - half, n);
        }
        let t = pi - values[idx];
        s += t * t;
        if s > early {
            return false;
        }
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
    libm::sqrt(s) <= h
}

fn window_offsets(radius: usize, d: usize, n: usize) -> Vec<WindowOffset> {
    let side = 2 * radius + 1;
    let total = side.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    for t in 0..total {
        let mut delta = [0isize; MAX_DIM];
        let mut rest = t;
        for a in (0..d).rev() {
            delta[a] = (rest % side) as isize - radius as isize;
            rest /= side;
        }
        let mut linear = 0isize;
        let mut cheb = 0usize;
        let mut cont = [0.0; MAX_DIM];
        for a in 0..d {
            linear = linear * n as isize + delta[a];
            cheb = cheb.max(delta[a].unsigned_abs());
            cont[a] = delta[a] as f64 / n as f64;
        }
        out.push(WindowOffset { delta, linear, cheb, cont });
    }
    out
}

/// Denoises `y` with `cfg`, sequentially.
pub fn denoise(y: &ImageGrid, cfg: &MethodConfig, oracle: Oracle<'_>) -> Result<DenoiseResult> {
    Ok(Denoiser::new(y, *cfg, oracle)?.run())
}
