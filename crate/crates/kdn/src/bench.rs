//! Monte-Carlo experiment harness: bandwidth sweeps, method tables,
//! convergence-rate fits and the noise-level probe.
//!
//! Every noisy replica is a pure function of `(seed, replica index)`, and all
//! methods in one cell see the same replicas. Reported MSEs are on the 0-255²
//! scale.

use std::io::Write;
use std::time::Instant;

use kdn_core::estimators::table_window_side;
use kdn_core::scenes::{
    make_blob, make_bowl, make_smooth_1d, make_stripes, make_swoosh, swoosh_curve, BlobParams,
    BowlParams, PolyPiece, StripesParams, SwooshParams,
};
use kdn_core::{
    add_noise, bias_variance, default_bandwidths, mse, Denoiser, Family, ImageGrid, LprConfig,
    MethodConfig, NoiseSpec, Oracle, PatchSpec, Scene, WindowSpec,
};

use crate::par::run_par;
use crate::{KdnError, Result};

/// Factor from `[0, 1]`-scale squared error to 0-255² units.
pub const SCALE255_SQ: f64 = 255.0 * 255.0;

/// A method with optional overrides of the reference bandwidths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    pub family: Family,
    pub r: usize,
    pub window_side: Option<usize>,
    pub patch_side: Option<usize>,
    pub h_y255: Option<f64>,
}

impl MethodSpec {
    pub fn new(family: Family, r: usize) -> Self {
        MethodSpec {
            family,
            r,
            window_side: None,
            patch_side: None,
            h_y255: None,
        }
    }

    pub fn with_window_side(mut self, side: usize) -> Self {
        self.window_side = Some(side);
        self
    }

    pub fn with_patch_side(mut self, side: usize) -> Self {
        self.patch_side = Some(side);
        self
    }

    pub fn with_h_y255(mut self, h: f64) -> Self {
        self.h_y255 = Some(h);
        self
    }

    /// Short label such as `yf0` or `nlm-avg1`.
    pub fn label(&self) -> String {
        format!("{}{}", self.family.as_str(), self.r)
    }

    /// Reference configuration at `sigma255`, with any overrides applied.
    pub fn resolve(&self, sigma255: f64) -> Result<MethodConfig> {
        let mut cfg = if self.r <= 2 {
            default_bandwidths(self.family, sigma255, self.r)?
        } else {
            let side = self.window_side.ok_or_else(|| {
                KdnError::invalid("degrees above 2 have no reference window; pass a window side")
            })?;
            let mut c = MethodConfig::new(
                self.family,
                WindowSpec::from_side(side)?,
                LprConfig::with_degree(self.r),
            );
            if self.family.uses_patches() {
                c = c.with_patch(PatchSpec::new(kdn_core::estimators::DEFAULT_PATCH_WIDTH)?);
            }
            if self.family.needs_photometric() {
                let h = self.h_y255.ok_or_else(|| {
                    KdnError::invalid("degrees above 2 need an explicit photometric bandwidth")
                })?;
                c = c.with_h_y(h / 255.0);
            }
            c
        };
        if let Some(side) = self.window_side {
            cfg.window = WindowSpec::from_side(side)?;
        }
        if let Some(p) = self.patch_side {
            if !self.family.uses_patches() {
                return Err(KdnError::invalid(format!(
                    "{} takes no patch size",
                    self.family
                )));
            }
            cfg.patch = Some(PatchSpec::new(p)?);
        }
        if let Some(h) = self.h_y255 {
            if matches!(self.family, Family::Lf | Family::Bo) {
                return Err(KdnError::invalid(format!(
                    "{} takes no photometric bandwidth",
                    self.family
                )));
            }
            cfg = cfg.with_h_y(h / 255.0);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Oracle handed to `family` for `scene`: the membership mask for MO and BO.
pub fn oracle_for(scene: &Scene, family: Family) -> Oracle<'_> {
    if family.is_oracle() {
        Oracle::Mask(&scene.omega_mask)
    } else {
        Oracle::None
    }
}

/// A scene with a display name.
#[derive(Debug, Clone)]
pub struct NamedScene {
    pub name: String,
    pub scene: Scene,
}

impl NamedScene {
    pub fn new(name: impl Into<String>, scene: Scene) -> Self {
        NamedScene {
            name: name.into(),
            scene,
        }
    }
}

pub fn noisy_replica(truth: &ImageGrid, sigma: f64, seed: u64, replica: u64) -> ImageGrid {
    add_noise(truth, &NoiseSpec::new(sigma, seed, replica))
}

fn check_replicas(replicas: usize) -> Result<()> {
    if replicas == 0 {
        return Err(KdnError::invalid("at least one replica is required"));
    }
    Ok(())
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn estimate(y: &ImageGrid, cfg: &MethodConfig, oracle: Oracle<'_>) -> Result<ImageGrid> {
    Ok(run_par(&Denoiser::new(y, *cfg, oracle)?).estimate)
}

// ---------------------------------------------------------------------------
// Scene presets

/// Blob: disk of radius 0.3 at level `0.2 + mu` on a background at 0.2.
pub fn blob_scene(n: usize, mu: f64) -> Result<Scene> {
    Ok(make_blob(&BlobParams::new(n, mu))?)
}

/// Bowl with the default dish and ramp.
pub fn bowl_scene(n: usize, mu: f64) -> Result<Scene> {
    Ok(make_bowl(&BowlParams::new(n, mu))?)
}

pub fn swoosh_scene(n: usize, mu: f64) -> Result<Scene> {
    Ok(make_swoosh(&SwooshParams::new(n, mu), swoosh_curve)?)
}

/// Horizontal stripes with levels `0.5 +- mu/2`.
pub fn stripes_scene(n: usize, mu: f64, period_px: usize, duty: f64) -> Result<Scene> {
    Ok(make_stripes(&StripesParams::new(n, mu, period_px, duty))?)
}

/// 1-D two-level step: 0.25 left of 1/2, 0.75 right of it.
pub fn jump_1d(n: usize) -> Result<Scene> {
    Ok(make_smooth_1d(
        n,
        f64::INFINITY,
        &[PolyPiece::new(0.0, &[0.25], false), PolyPiece::new(0.5, &[0.75], true)],
    )?)
}

/// Zigzag with slopes `+-1` and turning points at 1/4 and 3/4.
fn zigzag_pieces(jump: f64) -> Vec<PolyPiece> {
    let c = 1.0;
    vec![
        PolyPiece::new(0.0, &[0.1, c], false),
        // peak 0.35 at x = 1/4
        PolyPiece::new(0.25, &[0.35 + 0.25 * c, -c], false),
        // jump at 1/2 from 0.1 up to 0.1 + jump, then zigzag on top
        PolyPiece::new(0.5, &[0.1 + jump - 0.5 * c, c], true),
        PolyPiece::new(0.75, &[0.35 + jump + 0.75 * c, -c], true),
    ]
}

/// Piecewise-linear 1-D cartoon (Lipschitz pieces) with a jump of 0.4 at 1/2.
pub fn zigzag_1d(n: usize) -> Result<Scene> {
    Ok(make_smooth_1d(n, 1.0, &zigzag_pieces(0.4))?)
}

/// The same zigzag without its jump: a Lipschitz scene with no discontinuity.
pub fn ramp_1d(n: usize) -> Result<Scene> {
    let mut pieces = zigzag_pieces(0.0);
    for p in &mut pieces {
        p.in_omega = true;
    }
    Ok(make_smooth_1d(n, 1.0, &pieces)?)
}

// ---------------------------------------------------------------------------
// Bandwidth sweep

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub side: usize,
    pub mse_mean: f64,
    pub mse_stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub method: MethodSpec,
    pub sigma255: f64,
    pub replicas: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Row with the smallest mean MSE (first one on ties).
    pub fn argmin(&self) -> &SweepRow {
        self.rows
            .iter()
            .reduce(|a, b| if b.mse_mean < a.mse_mean { b } else { a })
            .expect("sweep has rows")
    }

    /// CSV columns: `side,mse,mse_stderr,argmin` (argmin is 1 on the best row).
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let best = self.argmin().side;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["side", "mse", "mse_stderr", "argmin"])?;
        for row in &self.rows {
            out.write_record([
                row.side.to_string(),
                row.mse_mean.to_string(),
                row.mse_stderr.to_string(),
                ((row.side == best) as u8).to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Mean MSE over `replicas` noisy copies of `scene` for every window side.
pub fn bandwidth_sweep(
    scene: &Scene,
    method: &MethodSpec,
    sigma255: f64,
    sides: &[usize],
    replicas: usize,
    seed: u64,
) -> Result<SweepResult> {
    check_replicas(replicas)?;
    if sides.is_empty() {
        return Err(KdnError::invalid("empty window-side grid"));
    }
    if sides.windows(2).any(|w| w[1] <= w[0]) {
        return Err(KdnError::invalid("window sides must be strictly increasing"));
    }
    let configs = sides
        .iter()
        .map(|&s| Ok(method.with_window_side(s).resolve(sigma255)?))
        .collect::<Result<Vec<_>>>()?;
    let sigma = sigma255 / 255.0;
    let oracle = oracle_for(scene, method.family);
    let mut mses = vec![Vec::with_capacity(replicas); sides.len()];
    for rep in 0..replicas {
        let y = noisy_replica(&scene.truth, sigma, seed, rep as u64);
        for (cfg, acc) in configs.iter().zip(mses.iter_mut()) {
            let est = estimate(&y, cfg, oracle)?;
            acc.push(mse(&est, &scene.truth)? * SCALE255_SQ);
        }
    }
    let rows = sides
        .iter()
        .zip(&mses)
        .map(|(&side, xs)| {
            let (mse_mean, mse_stderr) = mean_and_stderr(xs);
            SweepRow {
                side,
                mse_mean,
                mse_stderr,
            }
        })
        .collect();
    Ok(SweepResult {
        method: *method,
        sigma255,
        replicas,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Method table

/// Summary of one (scene, method, sigma) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MseReport {
    pub scene: String,
    pub method: String,
    pub family: Family,
    pub r: usize,
    pub sigma255: f64,
    pub window_side: usize,
    pub replicas: usize,
    pub mse: f64,
    pub mse_stderr: f64,
    /// Present with two or more replicas.
    pub sq_bias: Option<f64>,
    pub variance: Option<f64>,
    /// Wall-clock seconds per replica; recorded only on request.
    pub runtime_s: Option<f64>,
}

pub const TABLE_COLUMNS: [&str; 11] = [
    "scene",
    "method",
    "r",
    "sigma255",
    "window_side",
    "replicas",
    "mse",
    "mse_stderr",
    "sq_bias",
    "variance",
    "runtime_s",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_table_csv(reports: &[MseReport], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TABLE_COLUMNS)?;
    for rep in reports {
        out.write_record([
            rep.scene.clone(),
            rep.family.as_str().to_string(),
            rep.r.to_string(),
            rep.sigma255.to_string(),
            rep.window_side.to_string(),
            rep.replicas.to_string(),
            rep.mse.to_string(),
            rep.mse_stderr.to_string(),
            opt(rep.sq_bias),
            opt(rep.variance),
            opt(rep.runtime_s),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Every combination of scene, noise level and method, `replicas` each.
pub fn method_table(
    scenes: &[NamedScene],
    methods: &[MethodSpec],
    sigmas255: &[f64],
    replicas: usize,
    seed: u64,
    timing: bool,
) -> Result<Vec<MseReport>> {
    check_replicas(replicas)?;
    let mut out = Vec::new();
    for ns in scenes {
        let truth = &ns.scene.truth;
        for &s255 in sigmas255 {
            let noisy: Vec<ImageGrid> = (0..replicas)
                .map(|rep| noisy_replica(truth, s255 / 255.0, seed, rep as u64))
                .collect();
            for m in methods {
                let cfg = m.resolve(s255)?;
                let oracle = oracle_for(&ns.scene, m.family);
                let start = Instant::now();
                let estimates = noisy
                    .iter()
                    .map(|y| estimate(y, &cfg, oracle))
                    .collect::<Result<Vec<_>>>()?;
                let elapsed = start.elapsed().as_secs_f64() / replicas as f64;
                let mses = estimates
                    .iter()
                    .map(|e| Ok(mse(e, truth)? * SCALE255_SQ))
                    .collect::<Result<Vec<_>>>()?;
                let (mse_mean, mse_stderr) = mean_and_stderr(&mses);
                let (sq_bias, variance) = if replicas >= 2 {
                    let r = bias_variance(truth, &estimates)?;
                    (Some(r.sq_bias * SCALE255_SQ), Some(r.variance * SCALE255_SQ))
                } else {
                    (None, None)
                };
                out.push(MseReport {
                    scene: ns.name.clone(),
                    method: m.label(),
                    family: m.family,
                    r: m.r,
                    sigma255: s255,
                    window_side: cfg.window.side(),
                    replicas,
                    mse: mse_mean,
                    mse_stderr,
                    sq_bias,
                    variance,
                    runtime_s: timing.then_some(elapsed),
                });
            }
        }
    }
    Ok(out)
}

/// Scenes, methods and noise levels of the quick reference table.
pub fn lite_table_preset(n: usize) -> Result<(Vec<NamedScene>, Vec<MethodSpec>, Vec<f64>)> {
    let scenes = vec![
        NamedScene::new("blob", blob_scene(n, 0.6)?),
        NamedScene::new("bowl", bowl_scene(n, BOWL_MU)?),
        NamedScene::new("swoosh", swoosh_scene(n, 0.6)?),
        NamedScene::new("stripes", stripes_scene(n, STRIPES_MU, STRIPES_PERIOD_PX, 0.5)?),
    ];
    let methods = [Family::Lf, Family::Yf, Family::Nlm, Family::NlmAvg, Family::Mo]
        .into_iter()
        .map(|f| MethodSpec::new(f, 0))
        .collect();
    Ok((scenes, methods, vec![5.0, 20.0, 50.0, 100.0]))
}

/// Jump used for the Bowl preset.
pub const BOWL_MU: f64 = 0.3;
/// Stripe preset: full-range levels, period and duty.
pub const STRIPES_MU: f64 = 1.0;
pub const STRIPES_PERIOD_PX: usize = 4;

// ---------------------------------------------------------------------------
// Rate fits

/// Which theoretical bandwidth and MSE rate a fit targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateLaw {
    /// Linear filter on a cartoon: `h ~ (sigma² / n^d)^(1/(d+1))`.
    Lf,
    /// Oracle rate for pieces of smoothness `alpha`:
    /// `h ~ (sigma² / n^d)^(1/(d+2 alpha))`.
    Mo { alpha: f64 },
}

impl RateLaw {
    /// Exponent `e` in `radius_px ~ n^e`.
    pub fn radius_exponent(&self, d: usize) -> f64 {
        let d = d as f64;
        match *self {
            RateLaw::Lf => 1.0 / (d + 1.0),
            RateLaw::Mo { alpha } if alpha.is_infinite() => 1.0,
            RateLaw::Mo { alpha } => 2.0 * alpha / (d + 2.0 * alpha),
        }
    }

    /// Predicted slope of `log MSE` against `log n`.
    pub fn theory_slope(&self, d: usize) -> f64 {
        let d = d as f64;
        match *self {
            RateLaw::Lf => -d / (d + 1.0),
            RateLaw::Mo { alpha } if alpha.is_infinite() => -d,
            RateLaw::Mo { alpha } => -2.0 * alpha * d / (d + 2.0 * alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSetup {
    pub family: Family,
    pub r: usize,
    pub law: RateLaw,
    pub sigma255: f64,
    pub n_values: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    /// Radii tried at the smallest `n`; a geometric ladder when `None`.
    pub calibration_radii: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub n_values: Vec<usize>,
    pub radii: Vec<usize>,
    /// Mean MSE per `n`, 0-255² units.
    pub mse_values: Vec<f64>,
    pub mse_stderr: Vec<f64>,
    pub fitted_slope: f64,
    pub stderr: f64,
    pub theory_slope: f64,
}

impl RateFit {
    /// CSV columns `n,radius,mse,mse_stderr`, then a final row
    /// `slope,<fitted>,<stderr>,<theory>`.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "radius", "mse", "mse_stderr"])?;
        for k in 0..self.n_values.len() {
            out.write_record([
                self.n_values[k].to_string(),
                self.radii[k].to_string(),
                self.mse_values[k].to_string(),
                self.mse_stderr[k].to_string(),
            ])?;
        }
        out.write_record([
            "slope".to_string(),
            self.fitted_slope.to_string(),
            self.stderr.to_string(),
            self.theory_slope.to_string(),
        ])?;
        out.flush()?;
        Ok(())
    }
}

/// Least-squares slope of `ys` against `xs` and its standard error.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum();
    let se = if xs.len() > 2 {
        (rss / (k - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, se)
}

fn ladder(max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut r = 1.0f64;
    while (r.round() as usize) <= max.max(1) {
        let v = r.round() as usize;
        if out.last() != Some(&v) {
            out.push(v);
        }
        r *= 1.25;
    }
    out
}

fn mse_at(
    scene: &Scene,
    cfg: &MethodConfig,
    sigma: f64,
    seed: u64,
    replicas: usize,
) -> Result<Vec<f64>> {
    let oracle = oracle_for(scene, cfg.family);
    (0..replicas)
        .map(|rep| {
            let y = noisy_replica(&scene.truth, sigma, seed, rep as u64);
            Ok(mse(&estimate(&y, cfg, oracle)?, &scene.truth)? * SCALE255_SQ)
        })
        .collect()
}

fn seed_for_n(seed: u64, n: usize) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Fits the log-log slope of MSE against `n`.
///
/// The window radius follows `round(r0 * (n / n0)^e)` with `e` from the rate
/// law; `r0` minimizes the mean MSE at the smallest `n` over the calibration
/// radii.
pub fn rate_fit(gen: &dyn Fn(usize) -> Result<Scene>, setup: &RateSetup) -> Result<RateFit> {
    check_replicas(setup.replicas)?;
    let mut ns = setup.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 4 {
        return Err(KdnError::invalid(format!(
            "a rate fit needs at least 4 distinct n values, got {}",
            ns.len()
        )));
    }
    let sigma = setup.sigma255 / 255.0;
    let base = MethodSpec::new(setup.family, setup.r).resolve(setup.sigma255.max(0.0))?;
    let config_for = |radius: usize| {
        let mut c = base;
        c.window = WindowSpec::from_radius(radius);
        c
    };

    let n0 = ns[0];
    let scene0 = gen(n0)?;
    let d = scene0.truth.d();
    let radii0 = match &setup.calibration_radii {
        Some(r) if !r.is_empty() => r.clone(),
        Some(_) => return Err(KdnError::invalid("empty calibration radius list")),
        None => ladder(n0 / 4),
    };
    let mut r0 = radii0[0];
    let mut best = f64::INFINITY;
    for &rad in &radii0 {
        let xs = mse_at(&scene0, &config_for(rad), sigma, seed_for_n(setup.seed, n0), setup.replicas)?;
        let m = mean_and_stderr(&xs).0;
        if m < best {
            best = m;
            r0 = rad;
        }
    }

    let e = setup.law.radius_exponent(d);
    let mut radii = Vec::new();
    let mut mse_values = Vec::new();
    let mut mse_stderr = Vec::new();
    for &n in &ns {
        let scene = if n == n0 { scene0.clone() } else { gen(n)? };
        let rad = (r0 as f64 * (n as f64 / n0 as f64).powf(e)).round() as usize;
        let xs = mse_at(&scene, &config_for(rad), sigma, seed_for_n(setup.seed, n), setup.replicas)?;
        let (m, se) = mean_and_stderr(&xs);
        if !(m > 0.0) {
            return Err(KdnError::invalid(format!(
                "MSE is zero at n = {n}; a log-log fit is undefined (noise-free or exactly reproduced input)"
            )));
        }
        radii.push(rad);
        mse_values.push(m);
        mse_stderr.push(se);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = mse_values.iter().map(|m| m.ln()).collect();
    let (fitted_slope, stderr) = ols_slope(&xs, &ys);
    Ok(RateFit {
        n_values: ns,
        radii,
        mse_values,
        mse_stderr,
        fitted_slope,
        stderr,
        theory_slope: setup.law.theory_slope(d),
    })
}

// ---------------------------------------------------------------------------
// Noise-level probe

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElbowRow {
    pub sigma255: f64,
    pub jnr: f64,
    pub yf: f64,
    pub nlm: f64,
    pub nlm_avg: f64,
    pub mo: f64,
}

/// Mean MSE of YF, NLM, NLM-average and MO at each noise level, with the
/// reference bandwidths for degree `r`.
pub fn elbow_probe(
    scene: &Scene,
    sigmas255: &[f64],
    r: usize,
    replicas: usize,
    seed: u64,
) -> Result<Vec<ElbowRow>> {
    let methods = [Family::Yf, Family::Nlm, Family::NlmAvg, Family::Mo].map(|f| MethodSpec::new(f, r));
    let named = [NamedScene::new("probe", scene.clone())];
    let reports = method_table(&named, &methods, sigmas255, replicas, seed, false)?;
    Ok(sigmas255
        .iter()
        .enumerate()
        .map(|(k, &s255)| {
            let cell = &reports[k * 4..k * 4 + 4];
            ElbowRow {
                sigma255: s255,
                jnr: scene.mu * 255.0 / s255,
                yf: cell[0].mse,
                nlm: cell[1].mse,
                nlm_avg: cell[2].mse,
                mo: cell[3].mse,
            }
        })
        .collect())
}

pub fn write_elbow_csv(rows: &[ElbowRow], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["sigma255", "jnr", "yf", "nlm", "nlm_avg", "mo"])?;
    for r in rows {
        out.write_record([r.sigma255, r.jnr, r.yf, r.nlm, r.nlm_avg, r.mo].map(|v| v.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

/// Window sides of the reference table around `sigma255`, for sweep grids.
pub fn default_sweep_sides(sigma255: f64, r: usize) -> Result<Vec<usize>> {
    let center = table_window_side(sigma255, r)?;
    let mut sides: Vec<usize> = (1..=(4 * center).max(9)).step_by(2).collect();
    sides.retain(|&s| s >= 3);
    Ok(sides)
}
