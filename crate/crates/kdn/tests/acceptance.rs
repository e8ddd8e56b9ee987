//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails.

#[path = "../../core/tests/support/reference.rs"]
mod reference;

use std::time::{Duration, Instant};

use kdn::bench::{self, MethodSpec, NamedScene, RateLaw, RateSetup};
use kdn::kdn_core::lpr::{lpr_fit, LprConfig};
use kdn::kdn_core::{
    add_noise, bias_variance, denoise, mse, Denoiser, Family, ImageGrid, MethodConfig, NoiseSpec,
    Oracle, PatchSpec, WindowSpec,
};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn below(rng: &mut ChaCha8Rng, k: usize) -> usize {
    (rng.next_u64() % k as u64) as usize
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Rank test on the rescaled design: Gaussian elimination on the Gram matrix
/// with a relative pivot threshold.
fn full_rank(offsets: &[Vec<f64>], r: usize) -> bool {
    let ex = reference::exponents(offsets[0].len(), r);
    let q = ex.len();
    if offsets.len() < q {
        return false;
    }
    let scale = offsets.iter().flat_map(|o| o.iter().map(|v| v.abs())).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut g = vec![vec![0.0; q]; q];
    for o in offsets {
        let row: Vec<f64> = ex
            .iter()
            .map(|e| e.iter().zip(o).map(|(&p, &x)| (x / scale).powi(p as i32)).product())
            .collect();
        for s in 0..q {
            for t in 0..q {
                g[s][t] += row[s] * row[t];
            }
        }
    }
    let tol = 1e-9 * offsets.len() as f64;
    for col in 0..q {
        let piv = (col..q).max_by(|&a, &b| g[a][col].abs().total_cmp(&g[b][col].abs())).unwrap();
        g.swap(col, piv);
        if g[col][col].abs() <= tol {
            return false;
        }
        for row in (col + 1)..q {
            let f = g[row][col] / g[col][col];
            for k in col..q {
                g[row][k] -= f * g[col][k];
            }
        }
    }
    true
}

fn polynomial_reproduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut fits = 0;
    for r in 0..=2usize {
        let ex = reference::exponents(2, r);
        let mut done = 0;
        while done < 100 {
            let half = 1 + below(&mut rng, 4);
            let side = 2 * half + 1;
            let n = 16 + below(&mut rng, 4080);
            let p_on = 0.3 + 0.7 * uniform(&mut rng);
            let mut offsets = Vec::new();
            let mut weights = Vec::new();
            for a in 0..side {
                for b in 0..side {
                    offsets.push(vec![
                        (a as f64 - half as f64) / n as f64,
                        (b as f64 - half as f64) / n as f64,
                    ]);
                    weights.push(uniform(&mut rng) < p_on);
                }
            }
            let active: Vec<Vec<f64>> = offsets
                .iter()
                .zip(&weights)
                .filter(|(_, &w)| w)
                .map(|(o, _)| o.clone())
                .collect();
            if !full_rank(&active, r) {
                continue;
            }
            let coeffs: Vec<f64> = ex.iter().map(|_| 2.0 * uniform(&mut rng) - 1.0).collect();
            let c = (uniform(&mut rng), uniform(&mut rng));
            let p = |x: f64, y: f64| -> f64 {
                ex.iter()
                    .zip(&coeffs)
                    .map(|(e, k)| k * x.powi(e[0] as i32) * y.powi(e[1] as i32))
                    .sum()
            };
            let values: Vec<f64> = offsets.iter().map(|o| p(c.0 + o[0], c.1 + o[1])).collect();
            let got =
                lpr_fit(&offsets, &weights, &values, LprConfig::with_degree(r), f64::NAN).unwrap();
            worst = worst.max((got - p(c.0, c.1)).abs());
            done += 1;
            fits += 1;
        }
    }
    outcome(worst <= 1e-6, format!("{fits} fits, max |error| = {worst:.3e} (limit 1e-6)"))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 8;
    let mut worst = 0.0f64;
    let mut fallbacks = 0usize;
    for case in 0..50 {
        let y = ImageGrid::new(2, n, (0..n * n).map(|_| uniform(&mut rng)).collect()).unwrap();
        let (a, b, c) = (uniform(&mut rng) - 0.5, uniform(&mut rng) - 0.5, 0.3 + 0.4 * uniform(&mut rng));
        let mask: Vec<bool> = (0..n * n)
            .map(|k| a * ((k / n) as f64 / n as f64 - 0.5) + b * ((k % n) as f64 / n as f64 - 0.5) + 0.5 < c)
            .collect();
        let w = WindowSpec::from_radius(1 + case % 3);
        let patch = PatchSpec::new(3).unwrap();
        for r in 0..=1 {
            let lpr = LprConfig::with_degree(r);
            let cfgs = [
                MethodConfig::new(Family::Lf, w, lpr),
                MethodConfig::new(Family::Yf, w, lpr).with_h_y(0.3),
                MethodConfig::new(Family::Nlm, w, lpr).with_patch(patch).with_h_y(1.0),
                MethodConfig::new(Family::NlmAvg, w, lpr).with_patch(patch).with_h_y(0.08),
                MethodConfig::new(Family::Mo, w, lpr),
                MethodConfig::new(Family::Bo, w, lpr),
            ];
            for cfg in cfgs {
                let oracle = if cfg.family.is_oracle() { Oracle::Mask(&mask) } else { Oracle::None };
                let got = denoise(&y, &cfg, oracle).unwrap();
                fallbacks += got.fallback_count;
                let want = reference::reference_denoise(&y, &cfg, oracle);
                for (u, v) in got.estimate.values().iter().zip(&want) {
                    worst = worst.max((u - v).abs());
                }
            }
        }
    }
    outcome(
        worst <= 1e-9,
        format!("50 images x 6 families x r in {{0,1}}, max |diff| = {worst:.3e} (limit 1e-9), {fallbacks} fallback pixels exercised"),
    )
}

fn rate_outcome(fit: &bench::RateFit, target: f64) -> Outcome {
    let pass = (fit.fitted_slope - target).abs() <= 0.1;
    outcome(
        pass,
        format!(
            "slope {:.3} +- {:.3} (target {:.3} +- 0.1), radii {:?}",
            fit.fitted_slope, fit.stderr, target, fit.radii
        ),
    )
}

const RATE_NS: [usize; 6] = [512, 1024, 2048, 4096, 8192, 16384];

fn lf_rate() -> Outcome {
    let setup = RateSetup {
        family: Family::Lf,
        r: 0,
        law: RateLaw::Lf,
        sigma255: 50.0,
        n_values: RATE_NS.to_vec(),
        replicas: 20,
        seed: 3,
        calibration_radii: None,
    };
    let fit = bench::rate_fit(&bench::jump_1d, &setup).unwrap();
    rate_outcome(&fit, -0.5)
}

fn mo_rate() -> Outcome {
    let setup = RateSetup {
        family: Family::Mo,
        r: 0,
        law: RateLaw::Mo { alpha: 1.0 },
        sigma255: 50.0,
        n_values: RATE_NS.to_vec(),
        replicas: 20,
        seed: 4,
        calibration_radii: None,
    };
    let fit = bench::rate_fit(&bench::zigzag_1d, &setup).unwrap();
    rate_outcome(&fit, -2.0 / 3.0)
}

fn low_noise_mimicry() -> Outcome {
    let n = 128;
    let scene = bench::blob_scene(n, 153.0 / 255.0).unwrap();
    let side = kdn::kdn_core::estimators::table_window_side(2.55, 0).unwrap();
    let w = WindowSpec::from_side(side).unwrap();
    let yf = MethodConfig::new(Family::Yf, w, LprConfig::default()).with_h_y(51.0 / 255.0);
    let mo = MethodConfig::new(Family::Mo, w, LprConfig::default());
    let mut same = 0usize;
    let mut total = 0usize;
    for rep in 0..20 {
        let y = add_noise(&scene.truth, &NoiseSpec::new(2.55 / 255.0, 5, rep));
        let a = Denoiser::new(&y, yf, Oracle::None).unwrap();
        let b = Denoiser::new(&y, mo, Oracle::Mask(&scene.omega_mask)).unwrap();
        for k in 0..y.len() {
            same += (a.active_set(k) == b.active_set(k)) as usize;
            total += 1;
        }
    }
    let frac = same as f64 / total as f64;
    outcome(frac >= 0.99, format!("identical active sets at {:.4}% of pixels (need >= 99%)", 100.0 * frac))
}

fn table_orderings() -> Outcome {
    let n = 256;
    let replicas = 5;
    let seed = 6;
    let blob = [NamedScene::new("blob", bench::blob_scene(n, 0.6).unwrap())];
    let stripes = [NamedScene::new(
        "stripes",
        bench::stripes_scene(n, bench::STRIPES_MU, bench::STRIPES_PERIOD_PX, 0.5).unwrap(),
    )];
    let m = |f| MethodSpec::new(f, 0);
    let get = |rows: &[bench::MseReport], f: Family| rows.iter().find(|r| r.family == f).unwrap().mse;

    let a = bench::method_table(&blob, &[m(Family::Lf), m(Family::Yf)], &[5.0], replicas, seed, false).unwrap();
    let (lf, yf) = (get(&a, Family::Lf), get(&a, Family::Yf));
    let b = bench::method_table(&stripes, &[m(Family::Nlm), m(Family::NlmAvg)], &[100.0], replicas, seed, false)
        .unwrap();
    let (nlm, avg) = (get(&b, Family::Nlm), get(&b, Family::NlmAvg));
    let c = bench::method_table(&blob, &[m(Family::NlmAvg), m(Family::Yf)], &[100.0], replicas, seed, false)
        .unwrap();
    let (avg_c, yf_c) = (get(&c, Family::NlmAvg), get(&c, Family::Yf));
    let pa = yf < lf / 10.0;
    let pb = nlm < avg / 10.0;
    let pc = avg_c < yf_c;
    outcome(
        pa && pb && pc,
        format!(
            "(a) YF0 {yf:.2} vs LF0/10 {:.2} [{}]; (b) NLM0 {nlm:.2} vs NLM-avg0/10 {:.2} [{}]; (c) NLM-avg0 {avg_c:.2} vs YF0 {yf_c:.2} [{}]",
            lf / 10.0,
            if pa { "ok" } else { "fail" },
            avg / 10.0,
            if pb { "ok" } else { "fail" },
            if pc { "ok" } else { "fail" },
        ),
    )
}

fn nlm_reductions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0usize;
    for case in 0..20 {
        let d = 1 + case % 2;
        let n = if d == 1 { 32 + below(&mut rng, 64) } else { 8 + below(&mut rng, 17) };
        let truth = ImageGrid::new(d, n, (0..n.pow(d as u32)).map(|_| uniform(&mut rng)).collect()).unwrap();
        let y = add_noise(&truth, &NoiseSpec::new(0.1, 7, case as u64));
        let w = WindowSpec::from_radius(1 + below(&mut rng, 4));
        let lpr = LprConfig::with_degree(below(&mut rng, 3));
        let h = 0.05 + 0.3 * uniform(&mut rng);
        let yf = MethodConfig::new(Family::Yf, w, lpr).with_h_y(h);
        let nlm = MethodConfig::new(Family::Nlm, w, lpr).with_patch(PatchSpec::new(1).unwrap()).with_h_y(h);
        let avg = MethodConfig::new(Family::NlmAvg, w, lpr).with_patch(PatchSpec::new(1).unwrap()).with_h_y(h);
        let yf_inf = MethodConfig::new(Family::Yf, w, lpr).with_h_y(f64::INFINITY);
        let lf = MethodConfig::new(Family::Lf, w, lpr);
        let run = |c: &MethodConfig| denoise(&y, c, Oracle::None).unwrap().estimate;
        let bits = |g: ImageGrid| g.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        let base = bits(run(&yf));
        mismatches += (bits(run(&nlm)) != base) as usize;
        mismatches += (bits(run(&avg)) != base) as usize;
        mismatches += (bits(run(&yf_inf)) != bits(run(&lf))) as usize;
    }
    outcome(mismatches == 0, format!("20 inputs, {mismatches} non-identical outputs"))
}

fn bowl_sweep() -> Outcome {
    let scene = bench::bowl_scene(256, bench::BOWL_MU).unwrap();
    let sides: Vec<usize> = (3..=25).step_by(2).collect();
    let res = bench::bandwidth_sweep(&scene, &MethodSpec::new(Family::Mo, 0), 5.0, &sides, 5, 8).unwrap();
    let best = res.argmin().side;
    let pass = (3.5..=14.0).contains(&(best as f64));
    let curve: Vec<String> = res.rows.iter().map(|r| format!("{}:{:.3}", r.side, r.mse_mean)).collect();
    outcome(pass, format!("argmin side {best} (need 7/2..=14); {}", curve.join(" ")))
}

fn bias_variance_identity() -> Outcome {
    let n = 64;
    let truth = ImageGrid::from_fn(2, n, |x| {
        0.5 + 0.25 * (std::f64::consts::TAU * x[0]).sin() * (std::f64::consts::PI * x[1]).cos()
    })
    .unwrap();
    let cfg = MethodConfig::new(Family::Lf, WindowSpec::from_radius(3), LprConfig::default());
    let m = 100;
    let estimates: Vec<ImageGrid> = (0..m)
        .map(|rep| {
            let y = add_noise(&truth, &NoiseSpec::new(0.1, 9, rep));
            denoise(&y, &cfg, Oracle::None).unwrap().estimate
        })
        .collect();
    let report = bias_variance(&truth, &estimates).unwrap();
    let per: Vec<f64> = estimates.iter().map(|e| mse(e, &truth).unwrap()).collect();
    let mean = per.iter().sum::<f64>() / m as f64;
    let sd = (per.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt();
    let se = sd / (m as f64).sqrt();
    let gap = (report.mse - (report.sq_bias + report.variance_term())).abs();
    outcome(
        gap <= 3.0 * se,
        format!(
            "mse {:.4e}, sq_bias {:.4e}, variance term {:.4e}, gap {gap:.2e} vs 3 SE {:.2e}",
            report.mse,
            report.sq_bias,
            report.variance_term(),
            3.0 * se
        ),
    )
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("1 polynomial reproduction", Duration::from_secs(1), polynomial_reproduction),
        ("2 oracle equivalence", Duration::from_secs(30), oracle_equivalence),
        ("3 LF rate", Duration::from_secs(120), lf_rate),
        ("4 MO rate", Duration::from_secs(120), mo_rate),
        ("5 low-noise YF = MO", Duration::from_secs(60), low_noise_mimicry),
        ("6 table orderings", Duration::from_secs(600), table_orderings),
        ("7 NLM reductions", Duration::from_secs(10), nlm_reductions),
        ("8 bandwidth sweep", Duration::from_secs(300), bowl_sweep),
        ("9 bias-variance identity", Duration::from_secs(120), bias_variance_identity),
    ];
    let mut failed = Vec::new();
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= budget;
        println!(
            "[{}] {name}: {} | {:.2}s (budget {}s)",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
