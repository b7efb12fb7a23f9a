//! Tandem detection cost of a countermeasure combined with a speaker verifier.
//!
//! The cost charges four error events, weighted by the cost model:
//!
//! ```text
//! t-DCF(s, t) = C_miss_asv·pi_tar·P_a(s,t) + C_fa_asv·pi_non·P_b(s,t)
//!             + C_fa_cm·pi_spoof·P_c(s,t)  + C_miss_cm·pi_tar·P_d(s)
//! ```
//!
//! where `s` is the CM threshold and `t` the ASV threshold. With `t` fixed the
//! cost is piecewise constant in `s`, changing only at observed CM scores, so
//! the minimum over `s` is found exactly by evaluating those scores plus the
//! two infinite sentinels.

mod architecture;
mod calibration;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use architecture::{
    Action, ArchitectureRegistry, AsvThenCm, CmThenAsv, DetectorRates, ErrorTerms, JointActionRow,
    Parallel, TandemArchitecture,
};
pub use calibration::{calibrate_affine, AffineCalibration};

use crate::cost_model::{CostConfig, CostModel};
use crate::error::{Error, Result};
use crate::error_rates::{ClassScores, ErrorProfile};
use crate::trial_data::{ScoreKind, ScoreSet, TrialLabel};

/// How the ASV spoof-miss rate is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpoofMode {
    /// Spoofs are assumed to score like targets under the ASV.
    WorstCase,
    /// Measured on the spoof trials of the ASV score set.
    Empirical,
}

impl fmt::Display for SpoofMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpoofMode::WorstCase => "worst",
            SpoofMode::Empirical => "empirical",
        })
    }
}

impl FromStr for SpoofMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "worst" | "worst-case" => Ok(SpoofMode::WorstCase),
            "empirical" => Ok(SpoofMode::Empirical),
            _ => Err(Error::UnknownStrategy {
                registry: "spoof mode",
                name: s.to_owned(),
                available: "worst, empirical".into(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TandemOperatingPoint {
    /// CM threshold.
    pub s: f64,
    /// ASV threshold.
    pub t: f64,
    pub spoof_mode: SpoofMode,
}

/// The four error probabilities, their weighted terms and the total cost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TdcfBreakdown {
    pub p_a: f64,
    pub p_b: f64,
    pub p_c: f64,
    pub p_d: f64,
    pub term_a: f64,
    pub term_b: f64,
    pub term_c: f64,
    pub term_d: f64,
    pub total: f64,
}

impl TdcfBreakdown {
    pub fn new(model: &CostModel, e: ErrorTerms) -> Self {
        let pr = &model.priors;
        let term_a = model.c_miss_asv * pr.pi_tar() * e.p_a;
        let term_b = model.c_fa_asv * pr.pi_non() * e.p_b;
        let term_c = model.c_fa_cm * pr.pi_spoof() * e.p_c;
        let term_d = model.c_miss_cm * pr.pi_tar() * e.p_d;
        Self {
            p_a: e.p_a,
            p_b: e.p_b,
            p_c: e.p_c,
            p_d: e.p_d,
            term_a,
            term_b,
            term_c,
            term_d,
            total: term_a + term_b + term_c + term_d,
        }
    }
}

/// Cost of the combination with a perfect CM (no CM errors) at the given ASV rates.
pub fn perfect_cm_tdcf(model: &CostModel, asv_miss: f64, asv_fa: f64) -> f64 {
    TdcfBreakdown::new(
        model,
        CmThenAsv.error_terms(&DetectorRates {
            asv_miss,
            asv_fa,
            asv_spoof_miss: 0.0,
            cm_miss: 0.0,
            cm_fa: 0.0,
        }),
    )
    .total
}

/// Error terms for `arch` at the rates of the given profiles.
///
/// `asv` is a target/nontarget profile and `cm` a bona fide/spoof profile.
/// `asv_spoof` holds the ASV spoof scores and is only consulted in
/// [`SpoofMode::Empirical`].
pub fn tandem_error_terms(
    asv: &ErrorProfile,
    asv_spoof: Option<&ClassScores>,
    cm: &ErrorProfile,
    op: TandemOperatingPoint,
    arch: &dyn TandemArchitecture,
) -> Result<ErrorTerms> {
    let (asv_miss, asv_fa) = asv.rates_at(op.t)?;
    let (cm_miss, cm_fa) = cm.rates_at(op.s)?;
    let asv_spoof_miss = match op.spoof_mode {
        SpoofMode::WorstCase => asv_miss,
        SpoofMode::Empirical => match asv_spoof {
            Some(sp) if !sp.is_empty() => sp.fraction_at_or_below(op.t),
            _ => return Err(Error::MissingSpoofTrials),
        },
    };
    Ok(arch.error_terms(&DetectorRates {
        asv_miss,
        asv_fa,
        asv_spoof_miss,
        cm_miss,
        cm_fa,
    }))
}

/// Sorted per-class scores of an ASV set and a CM set, ready for repeated
/// tandem cost evaluation.
#[derive(Clone, Debug)]
pub struct TandemScores {
    asv_target: ClassScores,
    asv_nontarget: ClassScores,
    asv_spoof: ClassScores,
    cm_human: ClassScores,
    cm_spoof: ClassScores,
    /// Distinct CM scores with `-inf` and `+inf` sentinels.
    cm_candidates: Vec<f64>,
}

impl TandemScores {
    pub fn new(asv: &ScoreSet, cm: &ScoreSet) -> Result<Self> {
        for (set, kind) in [(asv, ScoreKind::Asv), (cm, ScoreKind::Cm)] {
            if set.kind() != kind {
                return Err(Error::WrongKind {
                    expected: kind,
                    found: set.kind(),
                });
            }
        }
        let cm_human = ClassScores::new(cm.human_scores());
        let cm_spoof = ClassScores::new(cm.subset_by_label(TrialLabel::Spoof));
        let mut cm_candidates: Vec<f64> = cm.records().iter().map(|r| r.score).collect();
        cm_candidates.sort_by(f64::total_cmp);
        cm_candidates.dedup_by(|a, b| a == b);
        cm_candidates.insert(0, f64::NEG_INFINITY);
        cm_candidates.push(f64::INFINITY);
        Ok(Self {
            asv_target: ClassScores::new(asv.subset_by_label(TrialLabel::Target)),
            asv_nontarget: ClassScores::new(asv.subset_by_label(TrialLabel::Nontarget)),
            asv_spoof: ClassScores::new(asv.subset_by_label(TrialLabel::Spoof)),
            cm_human,
            cm_spoof,
            cm_candidates,
        })
    }

    /// Empirical spoof mode when the ASV set has spoof trials, worst case otherwise.
    pub fn default_spoof_mode(&self) -> SpoofMode {
        if self.asv_spoof.is_empty() {
            SpoofMode::WorstCase
        } else {
            SpoofMode::Empirical
        }
    }

    pub fn cm_candidates(&self) -> &[f64] {
        &self.cm_candidates
    }

    /// `(asv_miss, asv_fa, asv_spoof_miss)` at ASV threshold `t`.
    pub fn asv_rates(&self, t: f64, mode: SpoofMode) -> Result<(f64, f64, f64)> {
        if t.is_nan() {
            return Err(Error::NanThreshold);
        }
        let miss = self.asv_target.fraction_at_or_below(t);
        let fa = self.asv_nontarget.fraction_above(t);
        let spoof_miss = match mode {
            SpoofMode::WorstCase => miss,
            SpoofMode::Empirical if self.asv_spoof.is_empty() => {
                return Err(Error::MissingSpoofTrials)
            }
            SpoofMode::Empirical => self.asv_spoof.fraction_at_or_below(t),
        };
        Ok((miss, fa, spoof_miss))
    }

    /// `(cm_miss, cm_fa)` at CM threshold `s`.
    pub fn cm_rates(&self, s: f64) -> Result<(f64, f64)> {
        if s.is_nan() {
            return Err(Error::NanThreshold);
        }
        Ok((
            self.cm_human.fraction_at_or_below(s),
            self.cm_spoof.fraction_above(s),
        ))
    }

    pub fn rates(&self, op: TandemOperatingPoint) -> Result<DetectorRates> {
        let (asv_miss, asv_fa, asv_spoof_miss) = self.asv_rates(op.t, op.spoof_mode)?;
        let (cm_miss, cm_fa) = self.cm_rates(op.s)?;
        Ok(DetectorRates {
            asv_miss,
            asv_fa,
            asv_spoof_miss,
            cm_miss,
            cm_fa,
        })
    }

    pub fn breakdown(
        &self,
        model: &CostModel,
        op: TandemOperatingPoint,
        arch: &dyn TandemArchitecture,
    ) -> Result<TdcfBreakdown> {
        Ok(TdcfBreakdown::new(
            model,
            arch.error_terms(&self.rates(op)?),
        ))
    }

    /// Minimum cost over the CM threshold with the ASV threshold fixed at `t`.
    /// Ties resolve to the smallest threshold.
    pub fn min_over_cm(
        &self,
        model: &CostModel,
        t: f64,
        arch: &dyn TandemArchitecture,
        mode: SpoofMode,
    ) -> Result<MinTdcf> {
        let (asv_miss, asv_fa, asv_spoof_miss) = self.asv_rates(t, mode)?;
        let eval = |s: f64| {
            let rates = DetectorRates {
                asv_miss,
                asv_fa,
                asv_spoof_miss,
                cm_miss: self.cm_human.fraction_at_or_below(s),
                cm_fa: self.cm_spoof.fraction_above(s),
            };
            (s, TdcfBreakdown::new(model, arch.error_terms(&rates)))
        };
        let (s_star, breakdown) = self
            .cm_candidates
            .par_iter()
            .map(|&s| eval(s))
            .reduce_with(
                |a, b| match a.1.total.total_cmp(&b.1.total).then(a.0.total_cmp(&b.0)) {
                    std::cmp::Ordering::Greater => b,
                    _ => a,
                },
            )
            .expect("candidate list always holds the sentinels");
        Ok(MinTdcf {
            value: breakdown.total,
            s_star,
            t,
            breakdown,
        })
    }
}

/// Result of minimizing the tandem cost over the CM threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinTdcf {
    pub value: f64,
    /// Smallest CM threshold achieving `value`.
    pub s_star: f64,
    pub t: f64,
    pub breakdown: TdcfBreakdown,
}

/// Tandem cost at one operating point.
pub fn tdcf_at(
    asv: &ScoreSet,
    cm: &ScoreSet,
    model: &CostModel,
    op: TandemOperatingPoint,
    arch: &dyn TandemArchitecture,
) -> Result<TdcfBreakdown> {
    TandemScores::new(asv, cm)?.breakdown(model, op, arch)
}

/// Minimum tandem cost over the CM threshold, `t_fixed` held constant.
pub fn min_tdcf_over_cm(
    asv: &ScoreSet,
    cm: &ScoreSet,
    model: &CostModel,
    t_fixed: f64,
    arch: &dyn TandemArchitecture,
    spoof_mode: SpoofMode,
) -> Result<MinTdcf> {
    TandemScores::new(asv, cm)?.min_over_cm(model, t_fixed, arch, spoof_mode)
}

/// ASV operating threshold policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AsvThreshold {
    /// Threshold the raw ASV scores.
    Fixed(f64),
    /// Calibrate the ASV scores for the cost model, then threshold at 0.
    AutoCalibrate,
}

impl FromStr for AsvThreshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto-calibrate") {
            return Ok(AsvThreshold::AutoCalibrate);
        }
        match s.parse::<f64>() {
            Ok(t) if !t.is_nan() => Ok(AsvThreshold::Fixed(t)),
            _ => Err(Error::Domain {
                name: "asv-threshold".into(),
                value: f64::NAN,
                range: "a number or `auto-calibrate`",
            }),
        }
    }
}

/// CM operating threshold policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CmThreshold {
    Fixed(f64),
    Minimize,
}

/// Settings for a tandem cost evaluation across spoof priors.
#[derive(Clone, Copy, Debug)]
pub struct TdcfRequest<'a> {
    pub arch: &'a dyn TandemArchitecture,
    /// `None` picks [`TandemScores::default_spoof_mode`].
    pub spoof_mode: Option<SpoofMode>,
    pub asv_threshold: AsvThreshold,
    pub cm_threshold: CmThreshold,
}

/// One row of a [`TdcfReport`].
#[derive(Clone, Debug, PartialEq)]
pub struct TdcfRow {
    pub pi_spoof: f64,
    pub arch: &'static str,
    pub spoof_mode: SpoofMode,
    /// ASV threshold in the (possibly calibrated) score domain.
    pub t: f64,
    /// CM threshold used, or the minimizing one.
    pub s: f64,
    pub breakdown: TdcfBreakdown,
    pub calibration: Option<AffineCalibration>,
}

/// Tandem cost of one CM against one ASV across spoof priors.
#[derive(Clone, Debug, PartialEq)]
pub struct TdcfReport {
    pub rows: Vec<TdcfRow>,
}

/// Evaluates the tandem cost for each spoof prior in `pi_spoofs` (banking
/// priors, costs from `config`). With an empty list the priors in `config`
/// are used as-is and the row's `pi_spoof` is taken from them.
pub fn evaluate_tdcf(
    asv: &ScoreSet,
    cm: &ScoreSet,
    config: &CostConfig,
    pi_spoofs: &[f64],
    request: &TdcfRequest<'_>,
) -> Result<TdcfReport> {
    let models: Vec<CostModel> = if pi_spoofs.is_empty() {
        vec![config.cost_model()?]
    } else {
        pi_spoofs
            .iter()
            .map(|&p| config.cost_model_for_pi_spoof(p))
            .collect::<Result<_>>()?
    };
    let raw = TandemScores::new(asv, cm)?;
    let spoof_mode = request
        .spoof_mode
        .unwrap_or_else(|| raw.default_spoof_mode());

    let rows = models
        .par_iter()
        .map(|model| {
            let (scores, t, calibration) = match request.asv_threshold {
                AsvThreshold::Fixed(t) => (None, t, None),
                AsvThreshold::AutoCalibrate => {
                    let (cal, calibrated) = calibrate_affine(asv, model)?;
                    (Some(TandemScores::new(&calibrated, cm)?), 0.0, Some(cal))
                }
            };
            let scores = scores.as_ref().unwrap_or(&raw);
            let (s, breakdown) = match request.cm_threshold {
                CmThreshold::Fixed(s) => {
                    let op = TandemOperatingPoint { s, t, spoof_mode };
                    (s, scores.breakdown(model, op, request.arch)?)
                }
                CmThreshold::Minimize => {
                    let m = scores.min_over_cm(model, t, request.arch, spoof_mode)?;
                    (m.s_star, m.breakdown)
                }
            };
            Ok(TdcfRow {
                pi_spoof: model.priors.pi_spoof(),
                arch: request.arch.name(),
                spoof_mode,
                t,
                s,
                breakdown,
                calibration,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TdcfReport { rows })
}
