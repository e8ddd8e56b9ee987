//! Error metrics: mean squared error and its Monte-Carlo bias/variance split.

use alloc::vec;

use crate::grid::ImageGrid;
use crate::{Error, Result};

/// Mean squared error `(1/n^d) sum_i (estimate_i - truth_i)^2`.
pub fn mse(estimate: &ImageGrid, truth: &ImageGrid) -> Result<f64> {
    if !estimate.same_shape(truth) {
        return Err(Error::Shape {
            expected: truth.len(),
            found: estimate.len(),
        });
    }
    let sum: f64 = estimate
        .values()
        .iter()
        .zip(truth.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / truth.len() as f64)
}

/// Replica-averaged error decomposition.
///
/// `variance` is the pixel-averaged *unbiased* sample variance across
/// replicas. For `m` replicas the three fields satisfy the exact identity
///
/// `mse = sq_bias + (m - 1) / m * variance`
///
/// while in expectation `E[sq_bias] = bias^2 + Var / m`, so
/// `sq_bias + variance` converges to the population MSE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub mse: f64,
    pub sq_bias: f64,
    pub variance: f64,
    pub n_replicas: usize,
}

impl ErrorReport {
    /// The variance contribution that makes the finite-replica identity
    /// `mse == sq_bias + variance_term()` exact.
    pub fn variance_term(&self) -> f64 {
        let m = self.n_replicas as f64;
        self.variance * (m - 1.0) / m
    }

    /// Bias estimate with the `Var / m` inflation of the replica mean removed.
    /// Can be slightly negative.
    pub fn debiased_sq_bias(&self) -> f64 {
        self.sq_bias - self.variance / self.n_replicas as f64
    }
}

pub fn bias_variance(truth: &ImageGrid, estimates: &[ImageGrid]) -> Result<ErrorReport> {
    let m = estimates.len();
    if m < 2 {
        return Err(Error::domain("bias/variance needs at least 2 replicas"));
    }
    if let Some(bad) = estimates.iter().find(|e| !e.same_shape(truth)) {
        return Err(Error::Shape {
            expected: truth.len(),
            found: bad.len(),
        });
    }
    let len = truth.len();
    let mut mean = vec![0.0; len];
    for e in estimates {
        for (acc, v) in mean.iter_mut().zip(e.values()) {
            *acc += v;
        }
    }
    for acc in mean.iter_mut() {
        *acc /= m as f64;
    }

    let mut sq_bias = 0.0;
    let mut var_sum = 0.0;
    for (i, (&mbar, &t)) in mean.iter().zip(truth.values()).enumerate() {
        sq_bias += (mbar - t) * (mbar - t);
        let mut s = 0.0;
        for e in estimates {
            let dv = e.values()[i] - mbar;
            s += dv * dv;
        }
        var_sum += s / (m - 1) as f64;
    }

    let mut mse_sum = 0.0;
    for e in estimates {
        mse_sum += mse(e, truth)?;
    }

    Ok(ErrorReport {
        mse: mse_sum / m as f64,
        sq_bias: sq_bias / len as f64,
        variance: var_sum / len as f64,
        n_replicas: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g1(v: &[f64]) -> ImageGrid {
        ImageGrid::new(1, v.len(), v.to_vec()).unwrap()
    }

    #[test]
    fn mse_examples() {
        let t = g1(&[0.0, 0.5, 1.0]);
        assert_eq!(mse(&t, &t).unwrap(), 0.0);
        let e = g1(&[0.1, 0.5, 0.8]);
        assert!((mse(&e, &t).unwrap() - 0.05 / 3.0).abs() < 1e-15);
        let z = g1(&[0.0; 4]);
        let c = g1(&[0.3; 4]);
        assert!((mse(&c, &z).unwrap() - 0.09).abs() < 1e-15);
    }

    #[test]
    fn mse_shape_mismatch() {
        assert!(mse(&g1(&[0.0; 3]), &g1(&[0.0; 4])).is_err());
        let square = ImageGrid::filled(2, 2, 0.0).unwrap();
        assert!(mse(&g1(&[0.0; 4]), &square).is_err());
    }

    #[test]
    fn bias_variance_examples() {
        let t = g1(&[0.2, 0.4, 0.6]);
        let r = bias_variance(&t, &[t.clone(), t.clone()]).unwrap();
        assert_eq!((r.mse, r.sq_bias, r.variance), (0.0, 0.0, 0.0));

        let c = 0.1;
        let plus = g1(&[0.2 + c, 0.4 + c, 0.6 + c]);
        let minus = g1(&[0.2 - c, 0.4 - c, 0.6 - c]);
        let r = bias_variance(&t, &[plus, minus]).unwrap();
        assert!(r.sq_bias < 1e-30);
        assert!((r.variance - 2.0 * c * c).abs() < 1e-15);
        assert!((r.mse - c * c).abs() < 1e-15);
    }

    #[test]
    fn bias_variance_needs_two_replicas() {
        let t = g1(&[0.5]);
        assert!(bias_variance(&t, &[t.clone()]).is_err());
        assert!(bias_variance(&t, &[]).is_err());
    }

    proptest! {
        #[test]
        fn mse_symmetric_and_quadratic(
            a in prop::collection::vec(0.0f64..1.0, 1..40),
            shift in prop::collection::vec(-1.0f64..1.0, 40),
            lambda in -3.0f64..3.0,
        ) {
            let b: Vec<f64> = a.iter().zip(&shift).map(|(x, s)| x + s).collect();
            let ga = g1(&a);
            let gb = g1(&b);
            let m = mse(&ga, &gb).unwrap();
            prop_assert_eq!(m, mse(&gb, &ga).unwrap());
            prop_assert_eq!(mse(&ga, &ga).unwrap(), 0.0);
            let scaled: Vec<f64> = a.iter().zip(&b).map(|(x, y)| y + lambda * (x - y)).collect();
            let ms = mse(&g1(&scaled), &gb).unwrap();
            prop_assert!((ms - lambda * lambda * m).abs() <= 1e-12 * (1.0 + m));
        }

        #[test]
        fn finite_replica_identity_is_exact(
            reps in prop::collection::vec(prop::collection::vec(-1.0f64..2.0, 6), 2..8),
            truth in prop::collection::vec(0.0f64..1.0, 6),
        ) {
            let t = g1(&truth);
            let est: Vec<ImageGrid> = reps.iter().map(|r| g1(r)).collect();
            let r = bias_variance(&t, &est).unwrap();
            prop_assert!(r.mse >= 0.0 && r.sq_bias >= 0.0 && r.variance >= 0.0);
            prop_assert!((r.mse - (r.sq_bias + r.variance_term())).abs() <= 1e-12 * (1.0 + r.mse));
        }
    }
}
