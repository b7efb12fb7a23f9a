//! Gaussian class-conditional score generator with closed-form oracles.
//!
//! Each class draws from its own ChaCha8 stream (stream id 0 for targets,
//! 1 for nontargets, 2 for spoofs) seeded by the model seed, so changing the
//! count of one class leaves the draws of the others untouched. Uniforms are
//! mapped to the open interval as `(k + 0.5) / 2^53` and transformed to normal
//! deviates through the inverse normal CDF.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::cost_model::CostModel;
use crate::error::{Error, Result};
use crate::tdcf::{CmThenAsv, DetectorRates, TandemArchitecture, TdcfBreakdown};
use crate::trial_data::{ScoreKind, ScoreSet, TrialLabel, TrialRecord};

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    standard().cdf(x)
}

fn standard() -> Normal {
    Normal::standard()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianScoreModel {
    pub mu_tar: f64,
    pub mu_non: f64,
    pub mu_spoof: f64,
    pub sigma_tar: f64,
    pub sigma_non: f64,
    pub sigma_spoof: f64,
    pub n_tar: usize,
    pub n_non: usize,
    pub n_spoof: usize,
    pub seed: u64,
}

impl GaussianScoreModel {
    pub fn validate(&self) -> Result<()> {
        for (name, s) in [
            ("sigma_tar", self.sigma_tar),
            ("sigma_non", self.sigma_non),
            ("sigma_spoof", self.sigma_spoof),
        ] {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Domain {
                    name: name.into(),
                    value: s,
                    range: "(0, inf)",
                });
            }
        }
        for (name, m) in [
            ("mu_tar", self.mu_tar),
            ("mu_non", self.mu_non),
            ("mu_spoof", self.mu_spoof),
        ] {
            if !m.is_finite() {
                return Err(Error::Domain {
                    name: name.into(),
                    value: m,
                    range: "finite reals",
                });
            }
        }
        for (name, n) in [
            ("n_tar", self.n_tar),
            ("n_non", self.n_non),
            ("n_spoof", self.n_spoof),
        ] {
            if n == 0 {
                return Err(Error::Domain {
                    name: name.into(),
                    value: 0.0,
                    range: "[1, inf)",
                });
            }
        }
        Ok(())
    }

    fn class_params(&self, label: TrialLabel) -> (f64, f64, usize, u64) {
        match label {
            TrialLabel::Target => (self.mu_tar, self.sigma_tar, self.n_tar, 0),
            TrialLabel::Nontarget => (self.mu_non, self.sigma_non, self.n_non, 1),
            TrialLabel::Spoof => (self.mu_spoof, self.sigma_spoof, self.n_spoof, 2),
        }
    }

    /// Draws the scores of one class.
    pub fn class_scores(&self, label: TrialLabel) -> Vec<f64> {
        let (mu, sigma, n, stream) = self.class_params(label);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        let normal = standard();
        (0..n)
            .map(|_| {
                let u = ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
                mu + sigma * normal.inverse_cdf(u)
            })
            .collect()
    }

    fn human_miss(&self, s: f64) -> f64 {
        let (nt, nn) = (self.n_tar as f64, self.n_non as f64);
        let pt = std_normal_cdf((s - self.mu_tar) / self.sigma_tar);
        let pn = std_normal_cdf((s - self.mu_non) / self.sigma_non);
        (nt * pt + nn * pn) / (nt + nn)
    }
}

/// Samples a score set; ids are `<label><index>`.
pub fn sample_scores(model: &GaussianScoreModel, kind: ScoreKind) -> Result<ScoreSet> {
    model.validate()?;
    let classes: Vec<(TrialLabel, Vec<f64>)> = TrialLabel::ALL
        .iter()
        .map(|&l| (l, model.class_scores(l)))
        .collect();
    let records = classes
        .into_iter()
        .flat_map(|(label, scores)| {
            scores
                .into_iter()
                .enumerate()
                .map(move |(i, s)| TrialRecord::new(format!("{label}{i}"), s, label))
        })
        .collect();
    ScoreSet::new(kind, records)
}

/// Closed-form rates of an ASV model at threshold `t`:
/// `(target miss, nontarget false alarm, spoof miss)`.
pub fn analytic_rates(model: &GaussianScoreModel, t: f64) -> (f64, f64, f64) {
    (
        std_normal_cdf((t - model.mu_tar) / model.sigma_tar),
        1.0 - std_normal_cdf((t - model.mu_non) / model.sigma_non),
        std_normal_cdf((t - model.mu_spoof) / model.sigma_spoof),
    )
}

/// Closed-form CM rates at threshold `s`: `(bona fide miss, spoof false alarm)`.
/// The bona fide density is the count-weighted mixture of the target and
/// nontarget components.
pub fn analytic_cm_rates(model: &GaussianScoreModel, s: f64) -> (f64, f64) {
    (
        model.human_miss(s),
        1.0 - std_normal_cdf((s - model.mu_spoof) / model.sigma_spoof),
    )
}

/// Equal error rate of two equal-variance Gaussian classes.
pub fn analytic_eer(mu_pos: f64, mu_neg: f64, sigma: f64) -> f64 {
    std_normal_cdf(-(mu_pos - mu_neg) / (2.0 * sigma))
}

/// Detector rates of the tandem at `(s, t)` with closed-form Gaussian rates,
/// the ASV spoof miss taken from the ASV model's spoof component.
pub fn analytic_detector_rates(
    asv_model: &GaussianScoreModel,
    cm_model: &GaussianScoreModel,
    s: f64,
    t: f64,
) -> DetectorRates {
    let (asv_miss, asv_fa, asv_spoof_miss) = analytic_rates(asv_model, t);
    let (cm_miss, cm_fa) = analytic_cm_rates(cm_model, s);
    DetectorRates {
        asv_miss,
        asv_fa,
        asv_spoof_miss,
        cm_miss,
        cm_fa,
    }
}

/// Tandem cost (CM followed by ASV) with closed-form Gaussian rates.
pub fn analytic_tdcf(
    asv_model: &GaussianScoreModel,
    cm_model: &GaussianScoreModel,
    cost: &CostModel,
    s: f64,
    t: f64,
) -> f64 {
    let rates = analytic_detector_rates(asv_model, cm_model, s, t);
    TdcfBreakdown::new(cost, CmThenAsv.error_terms(&rates)).total
}
