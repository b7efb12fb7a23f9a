//! Empirical miss and false-alarm rates as step functions of a threshold.
//!
//! A trial is accepted when its score is strictly above the threshold, so a
//! score equal to the threshold counts as a rejection (miss for the positive
//! class, correct rejection for the negative class).

mod eer;

pub use eer::{
    estimate_eer, EerEstimate, EerEstimator, EerMethod, EerRegistry, LinearMidpoint, RocchInterp,
};

use crate::error::{Error, Result};
use crate::trial_data::{ScoreKind, ScoreSet, TrialLabel};

/// Scores of one class, sorted ascending, for O(log n) rate lookups.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassScores {
    sorted: Vec<f64>,
}

impl ClassScores {
    pub fn new(mut scores: Vec<f64>) -> Self {
        scores.sort_by(f64::total_cmp);
        Self { sorted: scores }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Number of scores `<= t`.
    pub fn count_at_or_below(&self, t: f64) -> usize {
        self.sorted.partition_point(|&x| x <= t)
    }

    /// Fraction of scores `<= t` (rejected).
    pub fn fraction_at_or_below(&self, t: f64) -> f64 {
        self.count_at_or_below(t) as f64 / self.sorted.len() as f64
    }

    /// Fraction of scores `> t` (accepted).
    pub fn fraction_above(&self, t: f64) -> f64 {
        (self.sorted.len() - self.count_at_or_below(t)) as f64 / self.sorted.len() as f64
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t.is_nan() {
        Err(Error::NanThreshold)
    } else {
        Ok(())
    }
}

fn expect_kind(set: &ScoreSet, expected: ScoreKind) -> Result<()> {
    if set.kind() == expected {
        Ok(())
    } else {
        Err(Error::WrongKind {
            expected,
            found: set.kind(),
        })
    }
}

fn non_empty(scores: Vec<f64>, class: &'static str) -> Result<ClassScores> {
    if scores.is_empty() {
        Err(Error::EmptyClass(class))
    } else {
        Ok(ClassScores::new(scores))
    }
}

/// ASV miss and false-alarm rates at threshold `t`.
pub fn asv_rates_at(asv: &ScoreSet, t: f64) -> Result<(f64, f64)> {
    expect_kind(asv, ScoreKind::Asv)?;
    check_threshold(t)?;
    let tar = non_empty(asv.subset_by_label(TrialLabel::Target), "target")?;
    let non = non_empty(asv.subset_by_label(TrialLabel::Nontarget), "nontarget")?;
    Ok((tar.fraction_at_or_below(t), non.fraction_above(t)))
}

/// Fraction of spoof trials the ASV rejects at threshold `t`. One minus this is
/// the rate at which the ASV accepts spoofs.
pub fn asv_spoof_miss_at(asv: &ScoreSet, t: f64) -> Result<f64> {
    expect_kind(asv, ScoreKind::Asv)?;
    check_threshold(t)?;
    let spoof = asv.subset_by_label(TrialLabel::Spoof);
    if spoof.is_empty() {
        return Err(Error::MissingSpoofTrials);
    }
    Ok(ClassScores::new(spoof).fraction_at_or_below(t))
}

/// CM miss (bona fide rejected) and false-alarm (spoof accepted) rates at threshold `s`.
pub fn cm_rates_at(cm: &ScoreSet, s: f64) -> Result<(f64, f64)> {
    expect_kind(cm, ScoreKind::Cm)?;
    check_threshold(s)?;
    let hum = non_empty(cm.human_scores(), "bona fide")?;
    let spoof = non_empty(cm.subset_by_label(TrialLabel::Spoof), "spoof")?;
    Ok((hum.fraction_at_or_below(s), spoof.fraction_above(s)))
}

/// Which pair of classes a profile separates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileRole {
    /// Positives are targets, negatives are nontargets.
    AsvTargetNontarget,
    /// Positives are bona fide trials, negatives are spoofs.
    CmHumanSpoof,
}

impl ProfileRole {
    pub fn for_kind(kind: ScoreKind) -> Self {
        match kind {
            ScoreKind::Asv => ProfileRole::AsvTargetNontarget,
            ScoreKind::Cm => ProfileRole::CmHumanSpoof,
        }
    }

    /// Positive and negative class scores of `set` for this role.
    pub fn split(self, set: &ScoreSet) -> Result<(Vec<f64>, Vec<f64>)> {
        let (pos, neg, pos_name, neg_name) = match self {
            ProfileRole::AsvTargetNontarget => (
                set.subset_by_label(TrialLabel::Target),
                set.subset_by_label(TrialLabel::Nontarget),
                "target",
                "nontarget",
            ),
            ProfileRole::CmHumanSpoof => (
                set.human_scores(),
                set.subset_by_label(TrialLabel::Spoof),
                "bona fide",
                "spoof",
            ),
        };
        if pos.is_empty() {
            return Err(Error::EmptyClass(pos_name));
        }
        if neg.is_empty() {
            return Err(Error::EmptyClass(neg_name));
        }
        Ok((pos, neg))
    }
}

/// Miss and false-alarm rates of one detector at every distinct observed
/// score, bracketed by `-inf` and `+inf` sentinels.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorProfile {
    thresholds: Vec<f64>,
    p_miss: Vec<f64>,
    p_fa: Vec<f64>,
    positive_count: usize,
    negative_count: usize,
}

impl ErrorProfile {
    /// Builds the profile from raw positive and negative scores.
    pub fn from_scores(positives: &[f64], negatives: &[f64]) -> Result<Self> {
        if positives.is_empty() {
            return Err(Error::EmptyClass("positive"));
        }
        if negatives.is_empty() {
            return Err(Error::EmptyClass("negative"));
        }
        if positives.iter().chain(negatives).any(|s| !s.is_finite()) {
            return Err(Error::Domain {
                name: "score".into(),
                value: f64::NAN,
                range: "finite reals",
            });
        }
        let pos = ClassScores::new(positives.to_vec());
        let neg = ClassScores::new(negatives.to_vec());
        let (np, nn) = (pos.len(), neg.len());

        let mut thresholds = Vec::with_capacity(np + nn + 2);
        let mut p_miss = Vec::with_capacity(np + nn + 2);
        let mut p_fa = Vec::with_capacity(np + nn + 2);
        thresholds.push(f64::NEG_INFINITY);
        p_miss.push(0.0);
        p_fa.push(1.0);

        // Merge the two sorted lists; counts are of scores <= current value.
        let (ps, ns) = (pos.sorted(), neg.sorted());
        let (mut i, mut j) = (0, 0);
        while i < np || j < nn {
            let next = match (ps.get(i), ns.get(j)) {
                (Some(&a), Some(&b)) => a.min(b),
                (Some(&a), None) => a,
                (None, Some(&b)) => b,
                (None, None) => unreachable!(),
            };
            while i < np && ps[i] <= next {
                i += 1;
            }
            while j < nn && ns[j] <= next {
                j += 1;
            }
            thresholds.push(next);
            p_miss.push(i as f64 / np as f64);
            p_fa.push((nn - j) as f64 / nn as f64);
        }

        thresholds.push(f64::INFINITY);
        p_miss.push(1.0);
        p_fa.push(0.0);

        Ok(Self {
            thresholds,
            p_miss,
            p_fa,
            positive_count: np,
            negative_count: nn,
        })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn p_miss(&self) -> &[f64] {
        &self.p_miss
    }

    pub fn p_fa(&self) -> &[f64] {
        &self.p_fa
    }

    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    pub fn negative_count(&self) -> usize {
        self.negative_count
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// Index of the profile entry governing threshold `t`: the largest
    /// profile threshold `<= t`.
    pub fn index_at(&self, t: f64) -> Result<usize> {
        check_threshold(t)?;
        Ok(self.thresholds.partition_point(|&x| x <= t) - 1)
    }

    /// Step-function lookup of `(p_miss, p_fa)` at any threshold.
    pub fn rates_at(&self, t: f64) -> Result<(f64, f64)> {
        let k = self.index_at(t)?;
        Ok((self.p_miss[k], self.p_fa[k]))
    }

    /// Iterates `(threshold, p_miss, p_fa)` rows in ascending threshold order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.thresholds
            .iter()
            .zip(&self.p_miss)
            .zip(&self.p_fa)
            .map(|((&t, &m), &f)| (t, m, f))
    }
}

/// Builds the error profile of `set` for the given role.
pub fn build_profile(set: &ScoreSet, role: ProfileRole) -> Result<ErrorProfile> {
    let (pos, neg) = role.split(set)?;
    ErrorProfile::from_scores(&pos, &neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn asv(tar: &[f64], non: &[f64], spoof: &[f64]) -> ScoreSet {
        ScoreSet::from_class_scores(ScoreKind::Asv, tar, non, spoof).unwrap()
    }

    fn cm(hum: &[f64], spoof: &[f64]) -> ScoreSet {
        ScoreSet::from_class_scores(ScoreKind::Cm, hum, &[], spoof).unwrap()
    }

    #[test]
    fn asv_rates_hand_counts() {
        let set = asv(&[1.0, 2.0, 3.0], &[-1.0, 0.5], &[]);
        assert_eq!(asv_rates_at(&set, 0.0).unwrap(), (0.0, 0.5));
        assert_eq!(asv_rates_at(&set, f64::INFINITY).unwrap(), (1.0, 0.0));
        assert_eq!(asv_rates_at(&set, f64::NEG_INFINITY).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn ties_are_rejected() {
        let set = asv(&[1.0], &[1.0], &[]);
        assert_eq!(asv_rates_at(&set, 1.0).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn spoof_miss() {
        let set = asv(&[1.0], &[0.0], &[-2.0, 0.1, 5.0]);
        assert_eq!(asv_spoof_miss_at(&set, 0.0).unwrap(), 1.0 / 3.0);
        assert_eq!(asv_spoof_miss_at(&set, f64::NEG_INFINITY).unwrap(), 0.0);
        let tied = asv(&[1.0], &[0.0], &[0.7, 0.7]);
        assert_eq!(asv_spoof_miss_at(&tied, 0.7).unwrap(), 1.0);
        assert!(matches!(
            asv_spoof_miss_at(&asv(&[1.0], &[0.0], &[]), 0.0),
            Err(Error::MissingSpoofTrials)
        ));
    }

    #[test]
    fn cm_rates() {
        let set = cm(&[0.9, 1.1], &[-0.5, 0.2]);
        assert_eq!(cm_rates_at(&set, 0.5).unwrap(), (0.0, 0.0));
        assert_eq!(cm_rates_at(&set, f64::NEG_INFINITY).unwrap(), (0.0, 1.0));
        assert_eq!(cm_rates_at(&set, f64::INFINITY).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn wrong_kind_and_nan() {
        let set = cm(&[1.0], &[0.0]);
        assert!(matches!(
            asv_rates_at(&set, 0.0),
            Err(Error::WrongKind { .. })
        ));
        let a = asv(&[1.0], &[0.0], &[]);
        assert!(matches!(
            asv_rates_at(&a, f64::NAN),
            Err(Error::NanThreshold)
        ));
    }

    #[test]
    fn profile_enumerates_operating_points() {
        let p = build_profile(&asv(&[1.0], &[0.0], &[]), ProfileRole::AsvTargetNontarget).unwrap();
        assert_eq!(
            p.thresholds(),
            &[f64::NEG_INFINITY, 0.0, 1.0, f64::INFINITY]
        );
        assert_eq!(p.p_miss(), &[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(p.p_fa(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn degenerate_single_score_profile() {
        let p = build_profile(&asv(&[0.0], &[0.0], &[]), ProfileRole::AsvTargetNontarget).unwrap();
        assert_eq!(p.thresholds(), &[f64::NEG_INFINITY, 0.0, f64::INFINITY]);
        assert_eq!(p.p_miss(), &[0.0, 1.0, 1.0]);
        assert_eq!(p.p_fa(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn cm_profile_pools_targets_and_nontargets() {
        let set = ScoreSet::from_class_scores(ScoreKind::Cm, &[2.0], &[1.0], &[0.0]).unwrap();
        let p = build_profile(&set, ProfileRole::CmHumanSpoof).unwrap();
        assert_eq!(p.positive_count(), 2);
        assert_eq!(p.rates_at(1.5).unwrap(), (0.5, 0.0));
    }

    fn arb_set() -> impl Strategy<Value = ScoreSet> {
        // Small integer grid forces plenty of ties.
        let score = (-8i32..8).prop_map(|k| k as f64 * 0.5);
        (
            prop::collection::vec(score.clone(), 1..25),
            prop::collection::vec(score.clone(), 1..25),
            prop::collection::vec(score, 0..10),
        )
            .prop_map(|(t, n, s)| ScoreSet::from_class_scores(ScoreKind::Asv, &t, &n, &s).unwrap())
    }

    proptest! {
        #[test]
        fn profile_is_monotone_and_granular(set in arb_set()) {
            let p = build_profile(&set, ProfileRole::AsvTargetNontarget).unwrap();
            prop_assert_eq!((p.p_miss()[0], p.p_fa()[0]), (0.0, 1.0));
            let last = p.len() - 1;
            prop_assert_eq!((p.p_miss()[last], p.p_fa()[last]), (1.0, 0.0));
            for w in p.p_miss().windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for w in p.p_fa().windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            for w in p.thresholds().windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for (_, m, f) in p.rows() {
                let km = m * p.positive_count() as f64;
                let kf = f * p.negative_count() as f64;
                prop_assert!((km - km.round()).abs() < 1e-9);
                prop_assert!((kf - kf.round()).abs() < 1e-9);
            }
        }

        #[test]
        fn profile_agrees_with_direct_rates(set in arb_set(), frac in 0.0f64..1.0) {
            let p = build_profile(&set, ProfileRole::AsvTargetNontarget).unwrap();
            let th = p.thresholds();
            for k in 0..th.len() {
                prop_assert_eq!(p.rates_at(th[k]).unwrap(), asv_rates_at(&set, th[k]).unwrap());
                if k + 1 < th.len() && th[k].is_finite() && th[k + 1].is_finite() {
                    let mid = th[k] + frac * (th[k + 1] - th[k]);
                    prop_assert_eq!(p.rates_at(mid).unwrap(), asv_rates_at(&set, mid).unwrap());
                    prop_assert_eq!(p.rates_at(mid).unwrap(), (p.p_miss()[k], p.p_fa()[k]));
                }
            }
        }

        #[test]
        fn permutation_does_not_change_profile(set in arb_set(), seed in any::<u64>()) {
            let mut recs = set.records().to_vec();
            // Deterministic shuffle driven by the seed.
            let mut state = seed | 1;
            for i in (1..recs.len()).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                recs.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let shuffled = ScoreSet::new(ScoreKind::Asv, recs).unwrap();
            let a = build_profile(&set, ProfileRole::AsvTargetNontarget).unwrap();
            let b = build_profile(&shuffled, ProfileRole::AsvTargetNontarget).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(
                estimate_eer(&a, EerMethod::RocchInterp).value,
                estimate_eer(&b, EerMethod::RocchInterp).value
            );
        }
    }
}
