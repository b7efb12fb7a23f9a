use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tdcf_core::cost_model::CostConfig;
use tdcf_core::tdcf::{AsvThreshold, SpoofMode};
use tdcf_core::trial_data::ScoreKind;

#[derive(Debug, Parser)]
#[command(
    name = "tdcf",
    version,
    about = "Detection metrics for spoofing countermeasures and speaker verification"
)]
pub struct Cli {
    /// Cost-model file (flat TOML: c_miss_asv, c_fa_asv, c_miss_cm, c_fa_cm, pi_tar, pi_non, pi_spoof).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Decimal places for rates and costs.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(0..=17))]
    pub precision: u8,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(flatten)]
    pub costs: CostFlags,

    #[command(subcommand)]
    pub command: Command,
}

/// Cost overrides; take precedence over the config file.
#[derive(Debug, Args)]
pub struct CostFlags {
    #[arg(long, global = true, value_name = "COST")]
    pub c_miss_asv: Option<f64>,
    #[arg(long, global = true, value_name = "COST")]
    pub c_fa_asv: Option<f64>,
    #[arg(long, global = true, value_name = "COST")]
    pub c_miss_cm: Option<f64>,
    #[arg(long, global = true, value_name = "COST")]
    pub c_fa_cm: Option<f64>,
}

impl CostFlags {
    pub fn as_config(&self) -> CostConfig {
        CostConfig {
            c_miss_asv: self.c_miss_asv,
            c_fa_asv: self.c_fa_asv,
            c_miss_cm: self.c_miss_cm,
            c_fa_cm: self.c_fa_cm,
            ..CostConfig::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equal error rate of a score file.
    Eer(EerArgs),
    /// NIST detection cost of an ASV score file.
    Dcf(DcfArgs),
    /// Tandem detection cost of a CM and an ASV score file.
    Tdcf(TdcfArgs),
    /// Min tandem cost of every CM score file in a directory.
    Rank(RankArgs),
    /// Miss and false-alarm rates at every threshold.
    Det(DetArgs),
    /// Sample a Gaussian score file.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct EerArgs {
    #[arg(long, value_name = "PATH")]
    pub scores: PathBuf,
    #[arg(long, default_value_t = ScoreKind::Cm)]
    pub kind: ScoreKind,
    /// EER estimator name.
    #[arg(long, default_value = "rocch")]
    pub method: String,
}

#[derive(Debug, Args)]
pub struct DetArgs {
    #[arg(long, value_name = "PATH")]
    pub scores: PathBuf,
    #[arg(long, default_value_t = ScoreKind::Cm)]
    pub kind: ScoreKind,
}

#[derive(Debug, Args)]
pub struct DcfArgs {
    /// ASV score file.
    #[arg(long, value_name = "PATH")]
    pub scores: PathBuf,
    /// Decision threshold (accept when score > threshold).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub threshold: f64,
    /// Target prior among bona fide trials; defaults to the config priors.
    #[arg(long)]
    pub pi_tar: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TandemFlags {
    #[arg(long, value_name = "PATH")]
    pub asv_scores: PathBuf,
    /// Spoof priors, comma separated; banking priors are built from each.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub pi_spoof: Vec<f64>,
    /// Tandem architecture name.
    #[arg(long, default_value = "cm-asv")]
    pub arch: String,
    /// worst or empirical; default empirical when the ASV file has spoof trials.
    #[arg(long)]
    pub spoof_mode: Option<SpoofMode>,
    /// ASV threshold, or `auto-calibrate`.
    #[arg(long, default_value = "0", allow_negative_numbers = true)]
    pub asv_threshold: AsvThreshold,
}

#[derive(Debug, Args)]
pub struct TdcfArgs {
    #[command(flatten)]
    pub tandem: TandemFlags,
    #[arg(long, value_name = "PATH")]
    pub cm_scores: PathBuf,
    /// CM threshold when not minimizing.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub cm_threshold: f64,
    /// Minimize over the CM threshold.
    #[arg(long)]
    pub min: bool,
    /// Emit the four weighted cost terms.
    #[arg(long)]
    pub breakdown: bool,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub tandem: TandemFlags,
    /// Directory holding one CM score file per system.
    #[arg(long, value_name = "DIR")]
    pub cm_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu_tar: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu_non: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu_spoof: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_tar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_non: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_spoof: f64,
    #[arg(long)]
    pub n_tar: usize,
    #[arg(long)]
    pub n_non: usize,
    #[arg(long)]
    pub n_spoof: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, default_value_t = ScoreKind::Asv)]
    pub kind: ScoreKind,
    /// Thresholds for the analytic sidecar report `<out>.oracle.tsv`.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        value_name = "LIST"
    )]
    pub thresholds: Vec<f64>,
}
