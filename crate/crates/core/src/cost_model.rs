//! Costs, priors and the classical detection cost functions.

use std::path::Path;

use crate::error::{Error, Result};

/// Tolerance on the prior simplex constraint.
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-12;

/// Target share of bona fide trials in the banking scenario.
const BANKING_TARGET_SHARE: f64 = 0.99;
const BANKING_NONTARGET_SHARE: f64 = 0.01;

pub const DEFAULT_C_MISS_ASV: f64 = 1.0;
pub const DEFAULT_C_FA_ASV: f64 = 10.0;
pub const DEFAULT_C_MISS_CM: f64 = 1.0;
pub const DEFAULT_C_FA_CM: f64 = 10.0;

fn check_probability(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: name.to_owned(),
            value,
            range: "[0, 1]",
        })
    }
}

fn check_cost(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: name.to_owned(),
            value,
            range: "[0, inf)",
        })
    }
}

/// Prior over target, nontarget and spoof trials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PriorTriple {
    pi_tar: f64,
    pi_non: f64,
    pi_spoof: f64,
}

impl PriorTriple {
    /// Validates the triple. Sums within [`PRIOR_SUM_TOLERANCE`] of one are
    /// renormalized; anything further off is rejected.
    pub fn new(pi_tar: f64, pi_non: f64, pi_spoof: f64) -> Result<Self> {
        check_probability("pi_tar", pi_tar)?;
        check_probability("pi_non", pi_non)?;
        check_probability("pi_spoof", pi_spoof)?;
        let sum = pi_tar + pi_non + pi_spoof;
        if (sum - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return Err(Error::PriorSum { sum });
        }
        if sum == 1.0 {
            return Ok(Self {
                pi_tar,
                pi_non,
                pi_spoof,
            });
        }
        Ok(Self {
            pi_tar: pi_tar / sum,
            pi_non: pi_non / sum,
            pi_spoof: pi_spoof / sum,
        })
    }

    pub fn pi_tar(&self) -> f64 {
        self.pi_tar
    }

    pub fn pi_non(&self) -> f64 {
        self.pi_non
    }

    pub fn pi_spoof(&self) -> f64 {
        self.pi_spoof
    }

    /// Target prior conditioned on a bona fide trial, `pi_tar / (pi_tar + pi_non)`.
    pub fn bona_fide_target_prior(&self) -> f64 {
        self.pi_tar / (self.pi_tar + self.pi_non)
    }
}

/// Banking-scenario priors: the non-spoof mass is split 99:1 between targets
/// and nontargets.
pub fn banking_priors(pi_spoof: f64) -> Result<PriorTriple> {
    if !(0.0..1.0).contains(&pi_spoof) {
        return Err(Error::Domain {
            name: "pi_spoof".into(),
            value: pi_spoof,
            range: "[0, 1)",
        });
    }
    Ok(PriorTriple {
        pi_tar: (1.0 - pi_spoof) * BANKING_TARGET_SHARE,
        pi_non: (1.0 - pi_spoof) * BANKING_NONTARGET_SHARE,
        pi_spoof,
    })
}

/// The four tandem costs and the prior. Correct decisions always cost zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostModel {
    pub c_miss_asv: f64,
    pub c_fa_asv: f64,
    pub c_miss_cm: f64,
    pub c_fa_cm: f64,
    pub priors: PriorTriple,
}

impl CostModel {
    pub fn new(
        c_miss_asv: f64,
        c_fa_asv: f64,
        c_miss_cm: f64,
        c_fa_cm: f64,
        priors: PriorTriple,
    ) -> Result<Self> {
        check_cost("c_miss_asv", c_miss_asv)?;
        check_cost("c_fa_asv", c_fa_asv)?;
        check_cost("c_miss_cm", c_miss_cm)?;
        check_cost("c_fa_cm", c_fa_cm)?;
        if [c_miss_asv, c_fa_asv, c_miss_cm, c_fa_cm]
            .iter()
            .all(|&c| c == 0.0)
        {
            return Err(Error::ZeroCosts);
        }
        Ok(Self {
            c_miss_asv,
            c_fa_asv,
            c_miss_cm,
            c_fa_cm,
            priors,
        })
    }

    /// Default banking costs (false alarms ten times as costly as misses)
    /// with banking priors for `pi_spoof`.
    pub fn banking(pi_spoof: f64) -> Result<Self> {
        Self::new(
            DEFAULT_C_MISS_ASV,
            DEFAULT_C_FA_ASV,
            DEFAULT_C_MISS_CM,
            DEFAULT_C_FA_CM,
            banking_priors(pi_spoof)?,
        )
    }

    pub fn with_priors(self, priors: PriorTriple) -> Self {
        Self { priors, ..self }
    }

    /// Effective target prior of the ASV sub-problem (bona fide trials only).
    pub fn asv_effective_prior(&self) -> Result<f64> {
        effective_prior(
            self.c_miss_asv,
            self.c_fa_asv,
            self.priors.bona_fide_target_prior(),
        )
    }
}

/// Arbitrary Bayes-risk specification: `L` actions by `M` propositions.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericCostSpec {
    priors: Vec<f64>,
    cost: Vec<Vec<f64>>,
    err: Vec<Vec<f64>>,
}

impl GenericCostSpec {
    /// `cost[j][i]` is the cost of action `j` when proposition `i` is true,
    /// `err[j][i]` the probability of taking action `j` in error under `i`.
    pub fn new(priors: Vec<f64>, cost: Vec<Vec<f64>>, err: Vec<Vec<f64>>) -> Result<Self> {
        let m = priors.len();
        if m == 0 {
            return Err(Error::Dimension("no propositions".into()));
        }
        if cost.len() != err.len() {
            return Err(Error::Dimension(format!(
                "{} cost rows vs {} error rows",
                cost.len(),
                err.len()
            )));
        }
        for (j, (c, e)) in cost.iter().zip(&err).enumerate() {
            if c.len() != m || e.len() != m {
                return Err(Error::Dimension(format!(
                    "action {j}: expected {m} columns, got cost {} / err {}",
                    c.len(),
                    e.len()
                )));
            }
            for (&cv, &ev) in c.iter().zip(e) {
                check_cost("cost", cv)?;
                check_probability("err", ev)?;
            }
        }
        for &p in &priors {
            check_probability("prior", p)?;
        }
        let sum: f64 = priors.iter().sum();
        if (sum - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return Err(Error::PriorSum { sum });
        }
        let priors = if sum == 1.0 {
            priors
        } else {
            priors.into_iter().map(|p| p / sum).collect()
        };
        Ok(Self { priors, cost, err })
    }

    /// Two-class ASV arrangement: actions `[ACCEPT, REJECT]`, propositions
    /// `[target, nontarget]`.
    pub fn nist(c_miss: f64, c_fa: f64, pi_tar: f64, p_miss: f64, p_fa: f64) -> Result<Self> {
        Self::new(
            vec![pi_tar, 1.0 - pi_tar],
            vec![vec![0.0, c_fa], vec![c_miss, 0.0]],
            vec![vec![0.0, p_fa], vec![p_miss, 0.0]],
        )
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }
}

/// Total expected cost summed over actions and propositions.
pub fn generic_dcf(spec: &GenericCostSpec) -> f64 {
    let mut total = 0.0;
    for (cost_row, err_row) in spec.cost.iter().zip(&spec.err) {
        let mut action_cost = 0.0;
        for ((&pi, &c), &e) in spec.priors.iter().zip(cost_row).zip(err_row) {
            action_cost += pi * c * e;
        }
        total += action_cost;
    }
    total
}

/// The NIST detection cost `C_miss·pi_tar·P_miss + C_fa·(1-pi_tar)·P_fa`.
pub fn nist_dcf(c_miss: f64, c_fa: f64, pi_tar: f64, p_miss: f64, p_fa: f64) -> Result<f64> {
    check_cost("c_miss", c_miss)?;
    check_cost("c_fa", c_fa)?;
    check_probability("pi_tar", pi_tar)?;
    check_probability("p_miss", p_miss)?;
    check_probability("p_fa", p_fa)?;
    Ok(c_miss * pi_tar * p_miss + c_fa * (1.0 - pi_tar) * p_fa)
}

/// Collapses `(C_miss, C_fa, pi_tar)` into a single effective target prior.
pub fn effective_prior(c_miss: f64, c_fa: f64, pi_tar: f64) -> Result<f64> {
    check_cost("c_miss", c_miss)?;
    check_cost("c_fa", c_fa)?;
    check_probability("pi_tar", pi_tar)?;
    let num = pi_tar * c_miss;
    let den = num + (1.0 - pi_tar) * c_fa;
    if den <= 0.0 {
        return Err(Error::DegenerateWeighting);
    }
    Ok(num / den)
}

/// Cost-model settings read from a config file and/or command-line flags.
///
/// The file is a flat TOML table with any of the keys `c_miss_asv`,
/// `c_fa_asv`, `c_miss_cm`, `c_fa_cm`, `pi_tar`, `pi_non`, `pi_spoof`.
/// If neither `pi_tar` nor `pi_non` is given, the banking recipe is applied
/// to `pi_spoof` (default 0).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CostConfig {
    pub c_miss_asv: Option<f64>,
    pub c_fa_asv: Option<f64>,
    pub c_miss_cm: Option<f64>,
    pub c_fa_cm: Option<f64>,
    pub pi_tar: Option<f64>,
    pub pi_non: Option<f64>,
    pub pi_spoof: Option<f64>,
}

impl CostConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_owned()))?;
        let mut cfg = Self::default();
        for (key, value) in &table {
            let number = match value {
                toml::Value::Float(f) => *f,
                toml::Value::Integer(i) => *i as f64,
                other => {
                    return Err(Error::ConfigKey {
                        key: key.clone(),
                        message: format!("expected a number, found {}", other.type_str()),
                    })
                }
            };
            let slot = cfg.slot_mut(key).ok_or_else(|| Error::ConfigKey {
                key: key.clone(),
                message: "unknown key".into(),
            })?;
            *slot = Some(number);
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    fn slot_mut(&mut self, key: &str) -> Option<&mut Option<f64>> {
        Some(match key {
            "c_miss_asv" => &mut self.c_miss_asv,
            "c_fa_asv" => &mut self.c_fa_asv,
            "c_miss_cm" => &mut self.c_miss_cm,
            "c_fa_cm" => &mut self.c_fa_cm,
            "pi_tar" => &mut self.pi_tar,
            "pi_non" => &mut self.pi_non,
            "pi_spoof" => &mut self.pi_spoof,
            _ => return None,
        })
    }

    /// Values set in `overrides` take precedence.
    pub fn merged_with(self, overrides: &CostConfig) -> Self {
        Self {
            c_miss_asv: overrides.c_miss_asv.or(self.c_miss_asv),
            c_fa_asv: overrides.c_fa_asv.or(self.c_fa_asv),
            c_miss_cm: overrides.c_miss_cm.or(self.c_miss_cm),
            c_fa_cm: overrides.c_fa_cm.or(self.c_fa_cm),
            pi_tar: overrides.pi_tar.or(self.pi_tar),
            pi_non: overrides.pi_non.or(self.pi_non),
            pi_spoof: overrides.pi_spoof.or(self.pi_spoof),
        }
    }

    fn keyed<T>(key: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Domain { value, range, .. } => Error::ConfigKey {
                key: key.to_owned(),
                message: format!("{value} is outside {range}"),
            },
            other => other,
        })
    }

    pub fn priors(&self) -> Result<PriorTriple> {
        if self.pi_tar.is_none() && self.pi_non.is_none() {
            let pi_spoof = self.pi_spoof.unwrap_or(0.0);
            return Self::keyed("pi_spoof", banking_priors(pi_spoof));
        }
        let pi_spoof = self.pi_spoof.unwrap_or(0.0);
        for (key, v) in [
            ("pi_tar", self.pi_tar),
            ("pi_non", self.pi_non),
            ("pi_spoof", Some(pi_spoof)),
        ] {
            if let Some(v) = v {
                Self::keyed(key, check_probability(key, v))?;
            }
        }
        let (pi_tar, pi_non) = match (self.pi_tar, self.pi_non) {
            (Some(t), Some(n)) => (t, n),
            (Some(t), None) => (t, 1.0 - t - pi_spoof),
            (None, Some(n)) => (1.0 - n - pi_spoof, n),
            (None, None) => unreachable!(),
        };
        PriorTriple::new(pi_tar, pi_non, pi_spoof).map_err(|e| match e {
            Error::Domain { name, value, range } => Error::ConfigKey {
                key: name,
                message: format!("{value} is outside {range} after completing the prior"),
            },
            other => other,
        })
    }

    /// Builds the cost model; costs default to the banking values.
    pub fn cost_model(&self) -> Result<CostModel> {
        let priors = self.priors()?;
        let costs = [
            ("c_miss_asv", self.c_miss_asv.unwrap_or(DEFAULT_C_MISS_ASV)),
            ("c_fa_asv", self.c_fa_asv.unwrap_or(DEFAULT_C_FA_ASV)),
            ("c_miss_cm", self.c_miss_cm.unwrap_or(DEFAULT_C_MISS_CM)),
            ("c_fa_cm", self.c_fa_cm.unwrap_or(DEFAULT_C_FA_CM)),
        ];
        for (key, v) in costs {
            Self::keyed(key, check_cost(key, v))?;
        }
        CostModel::new(costs[0].1, costs[1].1, costs[2].1, costs[3].1, priors)
    }

    /// Cost model with banking priors for `pi_spoof`, ignoring any explicit
    /// priors in the config.
    pub fn cost_model_for_pi_spoof(&self, pi_spoof: f64) -> Result<CostModel> {
        Self {
            pi_tar: None,
            pi_non: None,
            pi_spoof: Some(pi_spoof),
            ..*self
        }
        .cost_model()
    }
}
