//! Ways of combining a countermeasure with a speaker verifier.
//!
//! Every architecture accepts a trial only when both detectors accept it, so
//! they differ only in which detector acts first and which one sleeps. The
//! detectors are treated as statistically independent, which lets joint
//! action probabilities be written as products of the per-detector rates.

use std::fmt;

use crate::registry::{Named, Registry};

/// Per-detector error rates at one operating point `(s, t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorRates {
    /// ASV rejects a target.
    pub asv_miss: f64,
    /// ASV accepts a nontarget.
    pub asv_fa: f64,
    /// ASV rejects a spoof.
    pub asv_spoof_miss: f64,
    /// CM rejects bona fide speech.
    pub cm_miss: f64,
    /// CM accepts a spoof.
    pub cm_fa: f64,
}

/// Probabilities of the four error events of the tandem cost.
///
/// * `p_a`: the CM passes a target and the ASV rejects it.
/// * `p_b`: the CM passes a nontarget and the ASV accepts it.
/// * `p_c`: the CM passes a spoof and the ASV accepts it.
/// * `p_d`: the CM rejects a target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorTerms {
    pub p_a: f64,
    pub p_b: f64,
    pub p_c: f64,
    pub p_d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Accept,
    Reject,
    /// The detector never saw the trial because the other one rejected it first.
    Sleep,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Accept => "ACCEPT",
            Action::Reject => "REJECT",
            Action::Sleep => "SLEEP",
        })
    }
}

/// One `(CM action, ASV action)` pair with its probability under each trial class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointActionRow {
    pub cm: Action,
    pub asv: Action,
    pub target: f64,
    pub nontarget: f64,
    pub spoof: f64,
}

impl JointActionRow {
    pub fn accepts(&self) -> bool {
        self.cm == Action::Accept && self.asv == Action::Accept
    }
}

pub trait TandemArchitecture: Named + Send + Sync {
    /// Human-readable description, e.g. `CM -> ASV`.
    fn describe(&self) -> &'static str;

    /// The joint actions this combination can take; under each class the
    /// probabilities sum to one.
    fn joint_actions(&self, rates: &DetectorRates) -> Vec<JointActionRow>;

    fn error_terms(&self, rates: &DetectorRates) -> ErrorTerms;
}

/// CM gate followed by ASV.
#[derive(Clone, Copy, Debug, Default)]
pub struct CmThenAsv;

/// ASV gate followed by CM.
#[derive(Clone, Copy, Debug, Default)]
pub struct AsvThenCm;

/// Both detectors run on every trial; accept iff both accept.
#[derive(Clone, Copy, Debug, Default)]
pub struct Parallel;

impl Named for CmThenAsv {
    fn name(&self) -> &'static str {
        "cm-asv"
    }
}

impl TandemArchitecture for CmThenAsv {
    fn describe(&self) -> &'static str {
        "CM -> ASV"
    }

    fn joint_actions(&self, r: &DetectorRates) -> Vec<JointActionRow> {
        let pass = 1.0 - r.cm_miss;
        vec![
            JointActionRow {
                cm: Action::Accept,
                asv: Action::Reject,
                target: pass * r.asv_miss,
                nontarget: pass * (1.0 - r.asv_fa),
                spoof: r.cm_fa * r.asv_spoof_miss,
            },
            JointActionRow {
                cm: Action::Accept,
                asv: Action::Accept,
                target: pass * (1.0 - r.asv_miss),
                nontarget: pass * r.asv_fa,
                spoof: r.cm_fa * (1.0 - r.asv_spoof_miss),
            },
            JointActionRow {
                cm: Action::Reject,
                asv: Action::Sleep,
                target: r.cm_miss,
                nontarget: r.cm_miss,
                spoof: 1.0 - r.cm_fa,
            },
        ]
    }

    fn error_terms(&self, r: &DetectorRates) -> ErrorTerms {
        ErrorTerms {
            p_a: (1.0 - r.cm_miss) * r.asv_miss,
            p_b: (1.0 - r.cm_miss) * r.asv_fa,
            p_c: r.cm_fa * (1.0 - r.asv_spoof_miss),
            p_d: r.cm_miss,
        }
    }
}

impl Named for AsvThenCm {
    fn name(&self) -> &'static str {
        "asv-cm"
    }
}

impl TandemArchitecture for AsvThenCm {
    fn describe(&self) -> &'static str {
        "ASV -> CM"
    }

    fn joint_actions(&self, r: &DetectorRates) -> Vec<JointActionRow> {
        vec![
            JointActionRow {
                cm: Action::Sleep,
                asv: Action::Reject,
                target: r.asv_miss,
                nontarget: 1.0 - r.asv_fa,
                spoof: r.asv_spoof_miss,
            },
            JointActionRow {
                cm: Action::Accept,
                asv: Action::Accept,
                target: (1.0 - r.asv_miss) * (1.0 - r.cm_miss),
                nontarget: r.asv_fa * (1.0 - r.cm_miss),
                spoof: (1.0 - r.asv_spoof_miss) * r.cm_fa,
            },
            JointActionRow {
                cm: Action::Reject,
                asv: Action::Accept,
                target: (1.0 - r.asv_miss) * r.cm_miss,
                nontarget: r.asv_fa * r.cm_miss,
                spoof: (1.0 - r.asv_spoof_miss) * (1.0 - r.cm_fa),
            },
        ]
    }

    /// A target the CM would reject is charged to the CM miss cost even when
    /// the ASV rejected it first: the `(SLEEP, REJECT)` mass is split by
    /// independence into the parts the CM would have passed and rejected.
    fn error_terms(&self, r: &DetectorRates) -> ErrorTerms {
        let asv_first_reject = r.asv_miss;
        let would_pass = asv_first_reject * (1.0 - r.cm_miss);
        let would_reject = asv_first_reject * r.cm_miss;
        ErrorTerms {
            p_a: would_pass,
            p_b: r.asv_fa * (1.0 - r.cm_miss),
            p_c: (1.0 - r.asv_spoof_miss) * r.cm_fa,
            p_d: (would_reject + (1.0 - r.asv_miss) * r.cm_miss).min(1.0),
        }
    }
}

impl Named for Parallel {
    fn name(&self) -> &'static str {
        "parallel"
    }
}

impl TandemArchitecture for Parallel {
    fn describe(&self) -> &'static str {
        "CM || ASV"
    }

    fn joint_actions(&self, r: &DetectorRates) -> Vec<JointActionRow> {
        let row = |cm: Action, asv: Action| {
            let c = |p_accept: f64| {
                if cm == Action::Accept {
                    p_accept
                } else {
                    1.0 - p_accept
                }
            };
            let a = |p_accept: f64| {
                if asv == Action::Accept {
                    p_accept
                } else {
                    1.0 - p_accept
                }
            };
            JointActionRow {
                cm,
                asv,
                target: c(1.0 - r.cm_miss) * a(1.0 - r.asv_miss),
                nontarget: c(1.0 - r.cm_miss) * a(r.asv_fa),
                spoof: c(r.cm_fa) * a(1.0 - r.asv_spoof_miss),
            }
        };
        vec![
            row(Action::Accept, Action::Reject),
            row(Action::Accept, Action::Accept),
            row(Action::Reject, Action::Reject),
            row(Action::Reject, Action::Accept),
        ]
    }

    /// `(REJECT, REJECT)` and `(REJECT, ACCEPT)` on a target both count as CM misses.
    fn error_terms(&self, r: &DetectorRates) -> ErrorTerms {
        let both_reject = r.cm_miss * r.asv_miss;
        let cm_only_reject = r.cm_miss * (1.0 - r.asv_miss);
        ErrorTerms {
            p_a: (1.0 - r.cm_miss) * r.asv_miss,
            p_b: (1.0 - r.cm_miss) * r.asv_fa,
            p_c: r.cm_fa * (1.0 - r.asv_spoof_miss),
            p_d: (both_reject + cm_only_reject).min(1.0),
        }
    }
}

impl std::fmt::Debug for dyn TandemArchitecture + '_ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub type ArchitectureRegistry = Registry<dyn TandemArchitecture>;

impl Default for ArchitectureRegistry {
    fn default() -> Self {
        let mut r: Self = Registry::new("architecture");
        r.register(Box::new(CmThenAsv));
        r.register(Box::new(AsvThenCm));
        r.register(Box::new(Parallel));
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rates(
        asv_miss: f64,
        asv_fa: f64,
        asv_spoof_miss: f64,
        cm_miss: f64,
        cm_fa: f64,
    ) -> DetectorRates {
        DetectorRates {
            asv_miss,
            asv_fa,
            asv_spoof_miss,
            cm_miss,
            cm_fa,
        }
    }

    #[test]
    fn accept_all_cm() {
        let t = CmThenAsv.error_terms(&rates(0.05, 0.01, 0.05, 0.0, 1.0));
        assert_eq!((t.p_a, t.p_b, t.p_c, t.p_d), (0.05, 0.01, 0.95, 0.0));
    }

    #[test]
    fn reject_all_cm() {
        let t = CmThenAsv.error_terms(&rates(0.3, 0.2, 0.4, 1.0, 0.0));
        assert_eq!((t.p_a, t.p_b, t.p_c, t.p_d), (0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn target_miss_total_is_shared() {
        let r = rates(0.2, 0.1, 0.3, 0.1, 0.2);
        for arch in ArchitectureRegistry::default().iter() {
            let t = arch.error_terms(&r);
            assert!((t.p_a + t.p_d - 0.28).abs() < 1e-15, "{}", arch.name());
        }
    }

    #[test]
    fn sleep_only_in_cascades() {
        let r = rates(0.2, 0.1, 0.3, 0.1, 0.2);
        let has_sleep = |a: &dyn TandemArchitecture| {
            a.joint_actions(&r)
                .iter()
                .any(|row| row.cm == Action::Sleep || row.asv == Action::Sleep)
        };
        assert!(has_sleep(&CmThenAsv));
        assert!(has_sleep(&AsvThenCm));
        assert!(!has_sleep(&Parallel));
        assert_eq!(Parallel.joint_actions(&r).len(), 4);
    }

    #[test]
    fn registry_names() {
        let reg = ArchitectureRegistry::default();
        assert_eq!(reg.names(), vec!["cm-asv", "asv-cm", "parallel"]);
        assert_eq!(reg.get("Parallel").unwrap().describe(), "CM || ASV");
        assert!(reg.get("serial").is_err());
    }

    fn arb_rates() -> impl Strategy<Value = DetectorRates> {
        (
            0.0f64..=1.0,
            0.0f64..=1.0,
            0.0f64..=1.0,
            0.0f64..=1.0,
            0.0f64..=1.0,
        )
            .prop_map(|(a, b, c, d, e)| rates(a, b, c, d, e))
    }

    proptest! {
        #[test]
        fn joint_actions_partition_each_class(r in arb_rates()) {
            for arch in ArchitectureRegistry::default().iter() {
                let rows = arch.joint_actions(&r);
                let sum = |f: fn(&JointActionRow) -> f64| rows.iter().map(f).sum::<f64>();
                prop_assert!((sum(|x| x.target) - 1.0).abs() < 1e-12);
                prop_assert!((sum(|x| x.nontarget) - 1.0).abs() < 1e-12);
                prop_assert!((sum(|x| x.spoof) - 1.0).abs() < 1e-12);
                prop_assert_eq!(rows.iter().filter(|x| x.accepts()).count(), 1);
            }
        }

        #[test]
        fn error_terms_match_joint_action_table(r in arb_rates()) {
            for arch in ArchitectureRegistry::default().iter() {
                let rows = arch.joint_actions(&r);
                let accept = rows.iter().find(|x| x.accepts()).unwrap();
                let t = arch.error_terms(&r);
                prop_assert!((t.p_a + t.p_d - (1.0 - accept.target)).abs() < 1e-12);
                prop_assert!((t.p_b - accept.nontarget).abs() < 1e-12);
                prop_assert!((t.p_c - accept.spoof).abs() < 1e-12);
                for p in [t.p_a, t.p_b, t.p_c, t.p_d] {
                    prop_assert!((0.0..=1.0).contains(&p));
                }
            }
        }
    }
}
