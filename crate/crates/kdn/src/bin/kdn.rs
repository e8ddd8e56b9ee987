use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kdn::bench::{self, MethodSpec, RateLaw, RateSetup};
use kdn::io;
use kdn::kdn_core::{self, Family, NoiseSpec, Oracle, Scene};
use kdn::{KdnError, Result};

#[derive(Parser)]
#[command(name = "kdn", version, about = "Kernel denoising library front end")]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true, env = "KDN_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a synthetic scene, its mask and a metadata sidecar.
    Generate(GenerateArgs),
    /// Add Gaussian noise to a grid.
    Noise(NoiseArgs),
    /// Run one estimator on a grid.
    Denoise(DenoiseArgs),
    /// Export a 2-D grid as 8-bit binary PGM.
    ExportPgm(InOut),
    /// Import an 8-bit binary PGM as a grid.
    ImportPgm(InOut),
    /// MSE against window side; CSV columns side,mse,mse_stderr,argmin.
    Sweep(SweepArgs),
    /// Log-log slope of MSE against n; CSV columns n,radius,mse,mse_stderr plus a slope row.
    Rates(RatesArgs),
    /// Method x scene x noise MSE table (0-255² units).
    Table(TableArgs),
    /// YF / NLM / NLM-average / MO MSE across noise levels.
    Elbow(ElbowArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SceneKind {
    Blob,
    Bowl,
    Swoosh,
    Stripes,
    Jump1d,
    Zigzag1d,
    Ramp1d,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: SceneKind,
    #[arg(long)]
    n: usize,
    /// Jump across the discontinuity, on [0, 1].
    #[arg(long, default_value_t = 0.6)]
    mu: f64,
    /// Stripe period in pixels.
    #[arg(long, default_value_t = bench::STRIPES_PERIOD_PX)]
    period_px: usize,
    /// Fraction of each stripe period in the foreground.
    #[arg(long, default_value_t = 0.5)]
    duty: f64,
    /// Disk radius (blob and bowl).
    #[arg(long)]
    radius: Option<f64>,
    /// Band half-thickness (swoosh).
    #[arg(long)]
    a: Option<f64>,
    /// Output grid; the mask goes to <stem>.mask.kdn and metadata to <stem>.meta.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    sigma255: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    replica: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MethodArgs {
    /// lf, yf, nlm, nlm-avg, mo or bo.
    #[arg(long)]
    method: Family,
    /// Noise level on the 0-255 scale; selects the reference bandwidths.
    #[arg(long)]
    sigma255: Option<f64>,
    #[arg(long, default_value_t = 0)]
    r: usize,
    #[arg(long)]
    window_side: Option<usize>,
    #[arg(long)]
    patch_side: Option<usize>,
    #[arg(long)]
    hy255: Option<f64>,
}

impl MethodArgs {
    fn spec(&self) -> MethodSpec {
        MethodSpec {
            family: self.method,
            r: self.r,
            window_side: self.window_side,
            patch_side: self.patch_side,
            h_y255: self.hy255,
        }
    }

    /// Noise level used for the reference lookup. It may be omitted only when
    /// every bandwidth it would select is given explicitly.
    fn lookup_sigma(&self) -> Result<f64> {
        if let Some(s) = self.sigma255 {
            return Ok(s);
        }
        let f = self.method;
        let complete = self.window_side.is_some()
            && (!f.uses_patches() || self.patch_side.is_some())
            && (!f.needs_photometric() || self.hy255.is_some());
        if complete {
            Ok(0.0)
        } else {
            Err(KdnError::invalid(
                "--sigma255 is required unless --window-side, --patch-side and --hy255 cover the method",
            ))
        }
    }
}

#[derive(Args)]
struct DenoiseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    method: MethodArgs,
    /// Oracle mask (KDN1 of 0/1), required by mo and bo.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Ground truth; prints the MSE in 0-255² units.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Gate mo on true pixel values (needs --truth) instead of the mask.
    #[arg(long)]
    truth_gate: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InOut {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "bowl")]
    scene: SceneKind,
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long)]
    mu: Option<f64>,
    #[command(flatten)]
    method: MethodArgs,
    /// Comma-separated odd window sides.
    #[arg(long, value_delimiter = ',')]
    sides: Option<Vec<usize>>,
    #[arg(long, default_value_t = 5)]
    replicas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Lf,
    Mo,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    method: Family,
    #[arg(long, default_value_t = 0)]
    r: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    sigma255: f64,
    /// Comma-separated side lengths (at least four).
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Scene; defaults to jump1d for lf and zigzag1d otherwise (blob/bowl for d = 2).
    #[arg(long, value_enum)]
    scene: Option<SceneKind>,
    /// Bandwidth law; defaults to lf for lf and mo otherwise.
    #[arg(long, value_enum)]
    law: Option<LawArg>,
    #[arg(long, default_value_t = 20)]
    replicas: usize,
    #[arg(long, value_delimiter = ',')]
    calib_radii: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    #[value(name = "paper-table2-lite")]
    LiteTable,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    replicas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record wall-clock time per replica.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ElbowArgs {
    #[arg(long, value_enum, default_value = "blob")]
    scene: SceneKind,
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "5,20,50,100,150")]
    sigmas255: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    r: usize,
    #[arg(long, default_value_t = 5)]
    replicas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_scene(kind: SceneKind, d: usize, n: usize, mu: Option<f64>) -> Result<Scene> {
    let need_d = match kind {
        SceneKind::Jump1d | SceneKind::Zigzag1d | SceneKind::Ramp1d => 1,
        _ => 2,
    };
    if d != need_d {
        return Err(KdnError::invalid(format!("this scene exists only for d = {need_d}")));
    }
    match kind {
        SceneKind::Blob => bench::blob_scene(n, mu.unwrap_or(0.6)),
        SceneKind::Bowl => bench::bowl_scene(n, mu.unwrap_or(bench::BOWL_MU)),
        SceneKind::Swoosh => bench::swoosh_scene(n, mu.unwrap_or(0.6)),
        SceneKind::Stripes => bench::stripes_scene(
            n,
            mu.unwrap_or(bench::STRIPES_MU),
            bench::STRIPES_PERIOD_PX,
            0.5,
        ),
        SceneKind::Jump1d => bench::jump_1d(n),
        SceneKind::Zigzag1d => bench::zigzag_1d(n),
        SceneKind::Ramp1d => bench::ramp_1d(n),
    }
}

fn kind_name(kind: SceneKind) -> &'static str {
    match kind {
        SceneKind::Blob => "blob",
        SceneKind::Bowl => "bowl",
        SceneKind::Swoosh => "swoosh",
        SceneKind::Stripes => "stripes",
        SceneKind::Jump1d => "jump1d",
        SceneKind::Zigzag1d => "zigzag1d",
        SceneKind::Ramp1d => "ramp1d",
    }
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let stem = match out.extension() {
        Some(e) if e == "kdn" => out.with_extension(""),
        _ => out.to_path_buf(),
    };
    let mut s = stem.into_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn generate(a: &GenerateArgs) -> Result<()> {
    use kdn_core::scenes::*;
    let n = a.n;
    let mut extra = vec![("kind", kind_name(a.kind).to_string())];
    let scene = match a.kind {
        SceneKind::Blob => {
            let mut p = BlobParams::new(n, a.mu);
            if let Some(r) = a.radius {
                p.radius = r;
            }
            extra.push(("radius", p.radius.to_string()));
            make_blob(&p)?
        }
        SceneKind::Bowl => {
            let mut p = BowlParams::new(n, a.mu);
            if let Some(r) = a.radius {
                p.radius = r;
            }
            extra.push(("radius", p.radius.to_string()));
            extra.push(("depth", p.depth.to_string()));
            make_bowl(&p)?
        }
        SceneKind::Swoosh => {
            let mut p = SwooshParams::new(n, a.mu);
            if let Some(t) = a.a {
                p.a = t;
            }
            extra.push(("a", p.a.to_string()));
            make_swoosh(&p, swoosh_curve)?
        }
        SceneKind::Stripes => {
            extra.push(("period_px", a.period_px.to_string()));
            extra.push(("duty", a.duty.to_string()));
            make_stripes(&StripesParams::new(n, a.mu, a.period_px, a.duty))?
        }
        SceneKind::Jump1d | SceneKind::Zigzag1d | SceneKind::Ramp1d => build_scene(a.kind, 1, n, None)?,
    };
    let g = &scene.truth;
    io::save_kdn(&a.out, g)?;
    io::save_mask(sidecar(&a.out, ".mask.kdn"), &scene.omega_mask, g.d(), g.n())?;
    let meta = File::create(sidecar(&a.out, ".meta.txt"))?;
    io::write_meta(BufWriter::new(meta), &scene, &extra)?;
    Ok(())
}

fn noise(a: &NoiseArgs) -> Result<()> {
    if !(a.sigma255 >= 0.0) {
        return Err(KdnError::invalid("--sigma255 must be non-negative"));
    }
    let g = io::load_kdn(&a.input)?;
    let y = kdn_core::add_noise(&g, &NoiseSpec::new(a.sigma255 / 255.0, a.seed, a.replica));
    io::save_kdn(&a.out, &y)
}

fn denoise(a: &DenoiseArgs) -> Result<()> {
    let y = io::load_kdn(&a.input)?;
    let cfg = a.method.spec().resolve(a.method.lookup_sigma()?)?;
    let truth = a.truth.as_ref().map(io::load_kdn).transpose()?;
    if let Some(t) = &truth {
        if !t.same_shape(&y) {
            return Err(KdnError::invalid("--truth shape differs from --in"));
        }
    }
    let mask = match &a.mask {
        Some(p) => {
            let (m, d, n) = io::load_mask(p)?;
            if d != y.d() || n != y.n() {
                return Err(KdnError::invalid("--mask shape differs from --in"));
            }
            Some(m)
        }
        None => None,
    };
    let oracle = match (cfg.family, a.truth_gate) {
        (Family::Mo, true) => Oracle::Truth(
            truth
                .as_ref()
                .ok_or_else(|| KdnError::invalid("--truth-gate needs --truth"))?,
        ),
        (f, _) if f.is_oracle() => Oracle::Mask(
            mask.as_deref()
                .ok_or_else(|| KdnError::invalid(format!("method {f} requires --mask")))?,
        ),
        _ => Oracle::None,
    };
    let res = kdn::par::denoise_par(&y, &cfg, oracle)?;
    io::save_kdn(&a.out, &res.estimate)?;
    let s = res.active_size_stats;
    eprintln!(
        "window_side={} fallback_pixels={} active_min={} active_mean={:.2} active_max={}",
        cfg.window.side(),
        res.fallback_count,
        s.min,
        s.mean,
        s.max
    );
    if let Some(t) = &truth {
        println!("mse255={}", kdn_core::mse(&res.estimate, t)? * bench::SCALE255_SQ);
    }
    Ok(())
}

fn export_pgm(a: &InOut) -> Result<()> {
    let g = io::load_kdn(&a.input)?;
    io::write_pgm(BufWriter::new(File::create(&a.out)?), &g)
}

fn import_pgm(a: &InOut) -> Result<()> {
    let g = io::read_pgm(BufReader::new(File::open(&a.input)?))?;
    io::save_kdn(&a.out, &g)
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let sigma = a
        .method
        .sigma255
        .ok_or_else(|| KdnError::invalid("sweep needs --sigma255"))?;
    let d = match a.scene {
        SceneKind::Jump1d | SceneKind::Zigzag1d | SceneKind::Ramp1d => 1,
        _ => 2,
    };
    let scene = build_scene(a.scene, d, a.n, a.mu)?;
    let spec = a.method.spec();
    let sides = match &a.sides {
        Some(s) => s.clone(),
        None => bench::default_sweep_sides(sigma, a.method.r.min(2))?,
    };
    let res = bench::bandwidth_sweep(&scene, &spec, sigma, &sides, a.replicas, a.seed)?;
    res.write_csv(sink(&a.out)?)
}

fn rates(a: &RatesArgs) -> Result<()> {
    let kind = a.scene.unwrap_or(match (a.d, a.method) {
        (1, Family::Lf) => SceneKind::Jump1d,
        (1, _) => SceneKind::Zigzag1d,
        (_, Family::Lf) => SceneKind::Blob,
        _ => SceneKind::Bowl,
    });
    let probe = build_scene(kind, a.d, *a.n.iter().min().unwrap_or(&16), None)?;
    let law = match a.law.unwrap_or(if a.method == Family::Lf { LawArg::Lf } else { LawArg::Mo }) {
        LawArg::Lf => RateLaw::Lf,
        LawArg::Mo => RateLaw::Mo { alpha: probe.alpha },
    };
    let setup = RateSetup {
        family: a.method,
        r: a.r,
        law,
        sigma255: a.sigma255,
        n_values: a.n.clone(),
        replicas: a.replicas,
        seed: a.seed,
        calibration_radii: a.calib_radii.clone(),
    };
    let d = a.d;
    let fit = bench::rate_fit(&|n| build_scene(kind, d, n, None), &setup)?;
    fit.write_csv(sink(&a.out)?)
}

fn table(a: &TableArgs) -> Result<()> {
    let (scenes, methods, sigmas) = match a.preset {
        Preset::LiteTable => bench::lite_table_preset(a.n)?,
    };
    let reports = bench::method_table(&scenes, &methods, &sigmas, a.replicas, a.seed, a.timing)?;
    bench::write_table_csv(&reports, sink(&a.out)?)
}

fn elbow(a: &ElbowArgs) -> Result<()> {
    let scene = build_scene(a.scene, 2, a.n, a.mu)?;
    let rows = bench::elbow_probe(&scene, &a.sigmas255, a.r, a.replicas, a.seed)?;
    bench::write_elbow_csv(&rows, sink(&a.out)?)
}

fn run(cli: &Cli) -> Result<()> {
    kdn::par::with_threads(cli.threads, || match &cli.cmd {
        Cmd::Generate(a) => generate(a),
        Cmd::Noise(a) => noise(a),
        Cmd::Denoise(a) => denoise(a),
        Cmd::ExportPgm(a) => export_pgm(a),
        Cmd::ImportPgm(a) => import_pgm(a),
        Cmd::Sweep(a) => sweep(a),
        Cmd::Rates(a) => rates(a),
        Cmd::Table(a) => table(a),
        Cmd::Elbow(a) => elbow(a),
    })?
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
