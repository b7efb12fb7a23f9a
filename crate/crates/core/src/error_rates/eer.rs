//! Equal error rate estimators.
//!
//! An empirical error profile is a staircase, so the miss and false-alarm
//! rates rarely meet exactly. Each estimator interpolates the crossing in its
//! own way and is registered by name in an [`EerRegistry`].

use std::fmt;

use crate::registry::{Named, Registry};

use super::ErrorProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EerMethod {
    RocchInterp,
    LinearMidpoint,
}

impl EerMethod {
    pub fn name(self) -> &'static str {
        match self {
            EerMethod::RocchInterp => "rocch",
            EerMethod::LinearMidpoint => "linear",
        }
    }
}

impl fmt::Display for EerMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EerEstimate {
    pub value: f64,
    pub method: EerMethod,
    /// A threshold at or near the crossing.
    pub threshold_hint: f64,
}

pub trait EerEstimator: Named + Send + Sync {
    fn method(&self) -> EerMethod;

    fn estimate(&self, profile: &ErrorProfile) -> EerEstimate;
}

/// EER where the ROC convex hull crosses the `p_miss = p_fa` diagonal.
#[derive(Clone, Copy, Debug, Default)]
pub struct RocchInterp;

/// EER by linear interpolation between the two profile points where
/// `p_miss - p_fa` changes sign.
#[derive(Clone, Copy, Debug, Default)]
pub struct LinearMidpoint;

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Interpolates the point where `d = y - x` reaches zero on the segment `a -> b`.
fn diagonal_crossing(a: (f64, f64), b: (f64, f64)) -> f64 {
    let da = a.1 - a.0;
    let db = b.1 - b.0;
    let lambda = da / (da - db);
    a.0 + lambda * (b.0 - a.0)
}

fn finite_hint(a: f64, b: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a,
        (false, true) => b,
        (false, false) => 0.0,
    }
}

impl Named for RocchInterp {
    fn name(&self) -> &'static str {
        "rocch"
    }
}

impl EerEstimator for RocchInterp {
    fn method(&self) -> EerMethod {
        EerMethod::RocchInterp
    }

    fn estimate(&self, profile: &ErrorProfile) -> EerEstimate {
        // Points as (p_fa, p_miss) with their threshold, ascending in p_fa.
        let mut pts: Vec<(f64, f64, f64)> = profile.rows().map(|(t, m, f)| (f, m, t)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

        // Lower hull (monotone chain).
        let mut hull: Vec<(f64, f64, f64)> = Vec::with_capacity(pts.len());
        for p in pts {
            while hull.len() >= 2 {
                let n = hull.len();
                let (o, a) = (hull[n - 2], hull[n - 1]);
                if cross((o.0, o.1), (a.0, a.1), (p.0, p.1)) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }

        // Walk from p_fa = 0 until the hull reaches or passes the diagonal.
        // The (1, 0) vertex guarantees termination.
        for k in 0..hull.len() {
            let (x, y, t) = hull[k];
            if y - x <= 0.0 {
                if y == x || k == 0 {
                    return EerEstimate {
                        value: x.max(y).clamp(0.0, 1.0),
                        method: EerMethod::RocchInterp,
                        threshold_hint: finite_hint(t, t),
                    };
                }
                let prev = hull[k - 1];
                let value = diagonal_crossing((prev.0, prev.1), (x, y));
                return EerEstimate {
                    value: value.clamp(0.0, 1.0),
                    method: EerMethod::RocchInterp,
                    threshold_hint: finite_hint(prev.2, t),
                };
            }
        }
        unreachable!("error profile lacks the (p_fa=1, p_miss=0) sentinel")
    }
}

impl Named for LinearMidpoint {
    fn name(&self) -> &'static str {
        "linear"
    }
}

impl EerEstimator for LinearMidpoint {
    fn method(&self) -> EerMethod {
        EerMethod::LinearMidpoint
    }

    fn estimate(&self, profile: &ErrorProfile) -> EerEstimate {
        let (th, pm, pf) = (profile.thresholds(), profile.p_miss(), profile.p_fa());
        // Sentinels give d = -1 at the first entry and d = +1 at the last.
        let k = (0..th.len())
            .find(|&k| pm[k] - pf[k] >= 0.0)
            .expect("error profile lacks the +inf sentinel");
        if pm[k] == pf[k] || k == 0 {
            return EerEstimate {
                value: pm[k],
                method: EerMethod::LinearMidpoint,
                threshold_hint: finite_hint(th[k], th[k]),
            };
        }
        // Parametrize as (x, y) = (p_fa, p_miss) so the crossing is y = x.
        let value = diagonal_crossing((pf[k - 1], pm[k - 1]), (pf[k], pm[k]));
        EerEstimate {
            value: value.clamp(0.0, 1.0),
            method: EerMethod::LinearMidpoint,
            threshold_hint: finite_hint(th[k - 1], th[k]),
        }
    }
}

/// Named EER estimators, looked up at runtime.
pub type EerRegistry = Registry<dyn EerEstimator>;

impl Default for EerRegistry {
    fn default() -> Self {
        let mut r: Self = Registry::new("EER method");
        r.register(Box::new(RocchInterp));
        r.register(Box::new(LinearMidpoint));
        r
    }
}

/// Estimates the EER of `profile` with the given method.
pub fn estimate_eer(profile: &ErrorProfile, method: EerMethod) -> EerEstimate {
    match method {
        EerMethod::RocchInterp => RocchInterp.estimate(profile),
        EerMethod::LinearMidpoint => LinearMidpoint.estimate(profile),
    }
}
