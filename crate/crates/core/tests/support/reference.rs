//! Brute-force estimator reference.
//!
//! Materializes the full weight matrix, then solves each weighted least-squares
//! problem from scratch with Gaussian elimination. Shares nothing with the
//! library beyond the public gate functions and types.

#![allow(dead_code)]

use kdn_core::kernels::{extract_patch, nlm_avg_gate, nlm_euclid_gate, patch_mean, yf_gate};
use kdn_core::{Family, ImageGrid, MethodConfig, Oracle};

pub fn coords(k: usize, d: usize, n: usize) -> Vec<usize> {
    let mut c = vec![0; d];
    let mut rest = k;
    for a in (0..d).rev() {
        c[a] = rest % n;
        rest /= n;
    }
    c
}

pub fn sup_dist(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0)
}

/// Distance to the nearest opposite-membership pixel by exhaustive search.
pub fn brute_boundary_distance(mask: &[bool], d: usize, n: usize) -> Vec<Option<usize>> {
    (0..mask.len())
        .map(|i| {
            let ci = coords(i, d, n);
            (0..mask.len())
                .filter(|&j| mask[j] != mask[i])
                .map(|j| sup_dist(&ci, &coords(j, d, n)))
                .min()
        })
        .collect()
}

/// Full `N x N` 0/1 weight matrix, row `i` listing the weights used at pixel `i`.
pub fn weight_matrix(y: &ImageGrid, cfg: &MethodConfig, oracle: Oracle<'_>) -> Vec<Vec<bool>> {
    let (d, n, len) = (y.d(), y.n(), y.len());
    let v = y.values();
    let h_y = cfg.photometric.map(|p| p.h_y);
    let patches: Vec<Vec<f64>> = match cfg.patch {
        Some(p) => (0..len).map(|k| extract_patch(y, k, p).unwrap()).collect(),
        None => Vec::new(),
    };
    let dist = match (cfg.family, oracle) {
        (Family::Bo, Oracle::Mask(m)) => brute_boundary_distance(m, d, n),
        _ => Vec::new(),
    };
    let mut w = vec![vec![false; len]; len];
    for i in 0..len {
        let ci = coords(i, d, n);
        for j in 0..len {
            let sd = sup_dist(&ci, &coords(j, d, n));
            if sd > cfg.window.radius_px {
                continue;
            }
            w[i][j] = match cfg.family {
                Family::Lf => true,
                Family::Yf => yf_gate(v[i], v[j], h_y.unwrap()),
                Family::Nlm => nlm_euclid_gate(&patches[i], &patches[j], h_y.unwrap()).unwrap(),
                Family::NlmAvg => {
                    nlm_avg_gate(patch_mean(&patches[i]), patch_mean(&patches[j]), h_y.unwrap())
                }
                Family::Mo => match oracle {
                    Oracle::Mask(m) => m[i] == m[j],
                    Oracle::Truth(t) => (t.values()[i] - t.values()[j]).abs() <= h_y.unwrap(),
                    Oracle::None => panic!("mo needs an oracle"),
                },
                Family::Bo => match dist[i] {
                    None => true,
                    Some(di) => sd < di,
                },
            };
        }
    }
    w
}

/// All exponent vectors of total degree at most `r`, highest degree first.
pub fn exponents(d: usize, r: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    let total = (r + 1).pow(d as u32);
    for t in 0..total {
        let mut e = vec![0; d];
        let mut rest = t;
        for ea in e.iter_mut() {
            *ea = rest % (r + 1);
            rest /= r + 1;
        }
        if e.iter().sum::<usize>() <= r {
            all.push(e);
        }
    }
    all.sort_by_key(|e| std::cmp::Reverse(e.iter().sum::<usize>()));
    all
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let q = b.len();
    for col in 0..q {
        let piv = (col..q)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..q {
            let f = a[row][col] / a[col][col];
            for k in col..q {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; q];
    for row in (0..q).rev() {
        let mut s = b[row];
        for k in (row + 1)..q {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x
}

/// Ridged local polynomial fit with offsets rescaled by their largest
/// magnitude and responses taken relative to the first row's value.
/// Returns `None` when fewer than `q` rows are given.
pub fn reference_fit(offsets: &[Vec<f64>], values: &[f64], r: usize, ridge: f64) -> Option<f64> {
    let d = offsets.first().map_or(1, |o| o.len());
    let ex = exponents(d, r);
    let q = ex.len();
    if values.len() < q {
        return None;
    }
    let scale = offsets
        .iter()
        .flat_map(|o| o.iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let rows: Vec<Vec<f64>> = offsets
        .iter()
        .map(|o| {
            ex.iter()
                .map(|e| e.iter().zip(o).map(|(&p, &x)| (x / scale).powi(p as i32)).product())
                .collect()
        })
        .collect();
    let shift = values[0];
    let mut a = vec![vec![0.0; q]; q];
    let mut b = vec![0.0; q];
    for (row, &yv) in rows.iter().zip(values) {
        for s in 0..q {
            b[s] += row[s] * (yv - shift);
            for t in 0..q {
                a[s][t] += row[s] * row[t];
            }
        }
    }
    for (s, a_s) in a.iter_mut().enumerate() {
        a_s[s] += ridge;
    }
    let sol = gauss_solve(a, b);
    let intercept = ex.iter().position(|e| e.iter().all(|&p| p == 0)).unwrap();
    Some(sol[intercept] + shift)
}

/// Estimate at every pixel computed from the materialized weights.
pub fn reference_denoise(y: &ImageGrid, cfg: &MethodConfig, oracle: Oracle<'_>) -> Vec<f64> {
    let (d, n) = (y.d(), y.n());
    let w = weight_matrix(y, cfg, oracle);
    (0..y.len())
        .map(|i| {
            let ci = coords(i, d, n);
            let mut offsets = Vec::new();
            let mut values = Vec::new();
            for (j, &wij) in w[i].iter().enumerate() {
                if wij {
                    let cj = coords(j, d, n);
                    offsets.push(
                        (0..d)
                            .map(|a| (cj[a] as f64 - ci[a] as f64) / n as f64)
                            .collect::<Vec<_>>(),
                    );
                    values.push(y.values()[j]);
                }
            }
            let est = reference_fit(&offsets, &values, cfg.lpr.r, cfg.lpr.ridge)
                .unwrap_or(y.values()[i]);
            est.clamp(0.0, 1.0)
        })
        .collect()
}
