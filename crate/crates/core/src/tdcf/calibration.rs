//! Affine calibration of ASV scores by prior-weighted logistic regression.
//!
//! The fitted map `r' = a·r + b` turns raw scores into log posterior odds
//! under the ASV effective prior, so accepting `r' > 0` is the minimum-risk
//! decision for the cost model. Only target and nontarget trials enter the
//! fit; spoof trials are transformed along with them.

use crate::cost_model::CostModel;
use crate::error::{Error, Result};
use crate::trial_data::{ScoreSet, TrialLabel};

const MAX_ITERATIONS: usize = 100;
const GRADIENT_TOLERANCE: f64 = 1e-10;
/// Weak ridge on the slope (standardized units); keeps separable data finite.
const SLOPE_RIDGE: f64 = 1e-6;
/// Smallest admissible slope (standardized units).
const MIN_SLOPE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineCalibration {
    pub slope: f64,
    pub offset: f64,
    /// Effective target prior the fit was weighted with.
    pub effective_prior: f64,
    pub iterations: usize,
    /// Targets scored below nontargets; the slope was held at its floor.
    pub inverted_polarity: bool,
}

impl AffineCalibration {
    pub fn apply(&self, score: f64) -> f64 {
        self.slope * score + self.offset
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Weighted log-loss objective over standardized scores.
struct Objective<'a> {
    tar: &'a [f64],
    non: &'a [f64],
    w_tar: f64,
    w_non: f64,
}

impl Objective<'_> {
    fn loss(&self, a: f64, b: f64) -> f64 {
        let lt: f64 = self.tar.iter().map(|&z| softplus(-(a * z + b))).sum();
        let ln: f64 = self.non.iter().map(|&z| softplus(a * z + b)).sum();
        self.w_tar * lt + self.w_non * ln + 0.5 * SLOPE_RIDGE * a * a
    }

    /// Gradient and Hessian in `(a, b)`.
    fn derivatives(&self, a: f64, b: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let mut g = [SLOPE_RIDGE * a, 0.0];
        let mut h = [[SLOPE_RIDGE, 0.0], [0.0, 0.0]];
        let mut acc = |z: f64, w: f64, positive: bool| {
            let eta = a * z + b;
            let p = sigmoid(eta);
            // d/d(eta) of softplus(-eta) is p - 1, of softplus(eta) is p.
            let d1 = if positive { p - 1.0 } else { p };
            let d2 = p * (1.0 - p);
            g[0] += w * d1 * z;
            g[1] += w * d1;
            h[0][0] += w * d2 * z * z;
            h[0][1] += w * d2 * z;
            h[1][1] += w * d2;
        };
        for &z in self.tar {
            acc(z, self.w_tar, true);
        }
        for &z in self.non {
            acc(z, self.w_non, false);
        }
        h[1][0] = h[0][1];
        (g, h)
    }

    /// Damped Newton iterations. With `fixed_slope` only the offset moves.
    fn minimize(&self, mut a: f64, mut b: f64, fixed_slope: bool) -> Result<(f64, f64, usize)> {
        for iter in 1..=MAX_ITERATIONS {
            let (g, h) = self.derivatives(a, b);
            let grad_norm = if fixed_slope {
                g[1].abs()
            } else {
                g[0].abs().max(g[1].abs())
            };
            if grad_norm < GRADIENT_TOLERANCE {
                return Ok((a, b, iter));
            }
            let (da, db) = if fixed_slope {
                (0.0, -g[1] / h[1][1].max(f64::MIN_POSITIVE))
            } else {
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                if det.abs() < f64::MIN_POSITIVE {
                    (-g[0], -g[1])
                } else {
                    (
                        -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
                        -(h[0][0] * g[1] - h[1][0] * g[0]) / det,
                    )
                }
            };
            let current = self.loss(a, b);
            let mut step = 1.0;
            let mut moved = false;
            while step >= 1e-12 {
                let (na, nb) = (a + step * da, b + step * db);
                if self.loss(na, nb) <= current {
                    a = na;
                    b = nb;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                // No descent left at machine precision.
                return Ok((a, b, iter));
            }
        }
        Err(Error::NonConvergence {
            iterations: MAX_ITERATIONS,
        })
    }
}

/// Fits `r' = a·r + b` (with `a > 0`) on the target and nontarget trials of
/// `asv` and returns the transform together with the transformed set.
pub fn calibrate_affine(
    asv: &ScoreSet,
    model: &CostModel,
) -> Result<(AffineCalibration, ScoreSet)> {
    let tar = asv.subset_by_label(TrialLabel::Target);
    let non = asv.subset_by_label(TrialLabel::Nontarget);
    if tar.len() < 2 || non.len() < 2 {
        return Err(Error::Calibration(
            "need at least two target and two nontarget trials".into(),
        ));
    }
    let n = (tar.len() + non.len()) as f64;
    let mean = tar.iter().chain(&non).sum::<f64>() / n;
    let var = tar
        .iter()
        .chain(&non)
        .map(|x| (x - mean).powi(2))
        .sum::<f64>()
        / n;
    let sd = var.sqrt();
    if !sd.is_finite() || sd <= 0.0 {
        return Err(Error::Calibration(
            "all target and nontarget scores are equal".into(),
        ));
    }
    let standardize = |v: &[f64]| v.iter().map(|x| (x - mean) / sd).collect::<Vec<_>>();
    let (zt, zn) = (standardize(&tar), standardize(&non));

    let pi_eff = model.asv_effective_prior()?;
    if !(pi_eff > 0.0 && pi_eff < 1.0) {
        return Err(Error::Calibration(format!(
            "effective prior {pi_eff} leaves one class without weight"
        )));
    }
    let obj = Objective {
        tar: &zt,
        non: &zn,
        w_tar: pi_eff / zt.len() as f64,
        w_non: (1.0 - pi_eff) / zn.len() as f64,
    };
    let logit = (pi_eff / (1.0 - pi_eff)).ln();

    let (mut a, mut b, mut iterations) = obj.minimize(1.0, logit, false)?;
    let mut inverted_polarity = false;
    if a < MIN_SLOPE {
        inverted_polarity = true;
        let (fa, fb, it) = obj.minimize(MIN_SLOPE, b, true)?;
        a = fa;
        b = fb;
        iterations += it;
    }

    // Back to raw units: a·(r - mean)/sd + b.
    let slope = a / sd;
    let offset = b - slope * mean;
    let cal = AffineCalibration {
        slope,
        offset,
        effective_prior: pi_eff,
        iterations,
        inverted_polarity,
    };
    let calibrated = asv.map_scores(|r| cal.apply(r))?;
    Ok((cal, calibrated))
}
