use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use tdcf_core::cost_model::{nist_dcf, CostConfig};
use tdcf_core::error::Error;
use tdcf_core::error_rates::{build_profile, EerRegistry, ProfileRole};
use tdcf_core::synthetic::{analytic_cm_rates, analytic_rates, sample_scores, GaussianScoreModel};
use tdcf_core::tdcf::{evaluate_tdcf, ArchitectureRegistry, CmThreshold, TdcfReport, TdcfRequest};
use tdcf_core::trial_data::{parse_score_file, ScoreKind, ScoreSet};

use crate::args::{
    Cli, Command, DcfArgs, DetArgs, EerArgs, RankArgs, SimulateArgs, TandemFlags, TdcfArgs,
};
use crate::table::{threshold, Table};

#[derive(Debug)]
pub enum CliError {
    /// Bad flag value; exit 1.
    Usage(String),
    /// Unreadable or invalid data; exit 2.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownStrategy { .. } => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read_scores(path: &Path, kind: ScoreKind) -> Result<ScoreSet> {
    parse_score_file(path, kind).map_err(|e| match e {
        Error::Io { .. } => CliError::from(e),
        other => CliError::Data(format!("{}: {other}", path.display())),
    })
}

struct Context {
    precision: u8,
    config: CostConfig,
}

/// Runs the parsed command and returns everything destined for stdout.
pub fn run(cli: &Cli) -> Result<String> {
    let file = match &cli.config {
        Some(p) => CostConfig::from_file(p)?,
        None => CostConfig::default(),
    };
    let ctx = Context {
        precision: cli.precision,
        config: file.merged_with(&cli.costs.as_config()),
    };
    match &cli.command {
        Command::Eer(a) => eer(&ctx, a),
        Command::Det(a) => det(&ctx, a),
        Command::Dcf(a) => dcf(&ctx, a),
        Command::Tdcf(a) => tdcf(&ctx, a),
        Command::Rank(a) => rank(&ctx, a),
        Command::Simulate(a) => simulate(&ctx, a),
    }
}

fn eer(ctx: &Context, a: &EerArgs) -> Result<String> {
    let registry = EerRegistry::default();
    let estimator = registry.get(&a.method)?;
    let set = read_scores(&a.scores, a.kind)?;
    let profile = build_profile(&set, ProfileRole::for_kind(a.kind))?;
    let est = estimator.estimate(&profile);
    let mut t = Table::new(ctx.precision, &["metric", "value"]);
    let cell = t.rate(est.value);
    t.row(&["eer".into(), cell]);
    Ok(t.finish())
}

fn det(ctx: &Context, a: &DetArgs) -> Result<String> {
    let set = read_scores(&a.scores, a.kind)?;
    let profile = build_profile(&set, ProfileRole::for_kind(a.kind))?;
    let mut t = Table::new(ctx.precision, &["threshold", "p_miss", "p_fa"]);
    for (th, pm, pf) in profile.rows() {
        let cells = vec![threshold(th), t.rate(pm), t.rate(pf)];
        t.row(&cells);
    }
    Ok(t.finish())
}

fn dcf(ctx: &Context, a: &DcfArgs) -> Result<String> {
    let model = ctx.config.cost_model()?;
    let pi_tar = a
        .pi_tar
        .unwrap_or_else(|| model.priors.bona_fide_target_prior());
    let set = read_scores(&a.scores, ScoreKind::Asv)?;
    let profile = build_profile(&set, ProfileRole::AsvTargetNontarget)?;
    let cost = |pm, pf| nist_dcf(model.c_miss_asv, model.c_fa_asv, pi_tar, pm, pf);

    let (pm, pf) = profile.rates_at(a.threshold)?;
    let fixed = (a.threshold, pm, pf, cost(pm, pf)?);
    let mut best = None::<(f64, f64, f64, f64)>;
    for (th, pm, pf) in profile.rows() {
        let c = cost(pm, pf)?;
        if best.is_none_or(|b| c < b.3) {
            best = Some((th, pm, pf, c));
        }
    }
    let best = best.expect("profiles hold at least the sentinels");

    let mut t = Table::new(
        ctx.precision,
        &["point", "threshold", "p_miss", "p_fa", "dcf"],
    );
    for (name, (th, pm, pf, c)) in [("fixed", fixed), ("min", best)] {
        let cells = vec![
            name.into(),
            threshold(th),
            t.rate(pm),
            t.rate(pf),
            t.rate(c),
        ];
        t.row(&cells);
    }
    Ok(t.finish())
}

fn tandem_report(
    ctx: &Context,
    flags: &TandemFlags,
    asv: &ScoreSet,
    cm: &ScoreSet,
    cm_threshold: CmThreshold,
) -> Result<TdcfReport> {
    let registry = ArchitectureRegistry::default();
    let request = TdcfRequest {
        arch: registry.get(&flags.arch)?,
        spoof_mode: flags.spoof_mode,
        asv_threshold: flags.asv_threshold,
        cm_threshold,
    };
    Ok(evaluate_tdcf(
        asv,
        cm,
        &ctx.config,
        &flags.pi_spoof,
        &request,
    )?)
}

fn tdcf(ctx: &Context, a: &TdcfArgs) -> Result<String> {
    ArchitectureRegistry::default().get(&a.tandem.arch)?;
    let asv = read_scores(&a.tandem.asv_scores, ScoreKind::Asv)?;
    let cm = read_scores(&a.cm_scores, ScoreKind::Cm)?;
    let policy = if a.min {
        CmThreshold::Minimize
    } else {
        CmThreshold::Fixed(a.cm_threshold)
    };
    let report = tandem_report(ctx, &a.tandem, &asv, &cm, policy)?;

    let mut header = vec!["pi_spoof", "arch", "t", "s_star", "tdcf"];
    if a.breakdown {
        header.extend(["term_a", "term_b", "term_c", "term_d"]);
    }
    let mut t = Table::new(ctx.precision, &header);
    for row in &report.rows {
        let b = &row.breakdown;
        let mut cells = vec![
            format!("{}", row.pi_spoof),
            row.arch.to_owned(),
            threshold(row.t),
            threshold(row.s),
            t.rate(b.total),
        ];
        if a.breakdown {
            cells.extend([b.term_a, b.term_b, b.term_c, b.term_d].map(|x| t.rate(x)));
        }
        t.row(&cells);
    }
    Ok(t.finish())
}

/// Default spoof priors of the rank report.
const RANK_PRIORS: [f64; 3] = [0.001, 0.01, 0.05];

fn list_cm_files(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", dir.display())))?;
    let mut files = BTreeMap::new();
    for entry in entries {
        let entry =
            entry.map_err(|e| CliError::Data(format!("cannot read {}: {e}", dir.display())))?;
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') || !path.is_file() {
            continue;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or(name);
        if let Some(prev) = files.insert(stem.clone(), path.clone()) {
            return Err(CliError::Data(format!(
                "{} and {} share the system name `{stem}`",
                prev.display(),
                path.display()
            )));
        }
    }
    if files.is_empty() {
        return Err(CliError::Data(format!(
            "no CM score files in {}",
            dir.display()
        )));
    }
    Ok(files.into_iter().collect())
}

fn rank(ctx: &Context, a: &RankArgs) -> Result<String> {
    let mut flags = TandemFlags {
        asv_scores: a.tandem.asv_scores.clone(),
        pi_spoof: a.tandem.pi_spoof.clone(),
        arch: a.tandem.arch.clone(),
        spoof_mode: a.tandem.spoof_mode,
        asv_threshold: a.tandem.asv_threshold,
    };
    if flags.pi_spoof.is_empty() {
        flags.pi_spoof = RANK_PRIORS.to_vec();
    }
    ArchitectureRegistry::default().get(&flags.arch)?;
    let asv = read_scores(&flags.asv_scores, ScoreKind::Asv)?;
    let files = list_cm_files(&a.cm_dir)?;

    let min_values = |cm: &ScoreSet, policy| -> Result<Vec<f64>> {
        let report = tandem_report(ctx, &flags, &asv, cm, policy)?;
        Ok(report.rows.iter().map(|r| r.breakdown.total).collect())
    };

    // Reference CM: one bona fide trial above one spoof trial. Accepting
    // everything gives the unprotected ASV, the minimum gives a perfect CM.
    let reference = ScoreSet::from_class_scores(ScoreKind::Cm, &[1.0], &[], &[0.0])?;
    let no_cm = min_values(&reference, CmThreshold::Fixed(f64::NEG_INFINITY))?;
    let perfect = min_values(&reference, CmThreshold::Minimize)?;

    let mut systems = files
        .par_iter()
        .map(|(name, path)| {
            let cm = read_scores(path, ScoreKind::Cm)?;
            let profile = build_profile(&cm, ProfileRole::CmHumanSpoof)?;
            let eer = EerRegistry::default()
                .get("rocch")?
                .estimate(&profile)
                .value;
            Ok((name.clone(), eer, min_values(&cm, CmThreshold::Minimize)?))
        })
        .collect::<Result<Vec<_>>>()?;
    systems.sort_by(|x, y| x.1.total_cmp(&y.1).then_with(|| x.0.cmp(&y.0)));

    let columns: Vec<String> = flags
        .pi_spoof
        .iter()
        .map(|p| format!("min_tdcf@{p}"))
        .collect();
    let mut header = vec!["system", "eer"];
    header.extend(columns.iter().map(String::as_str));
    let mut t = Table::new(ctx.precision, &header)
        .with_note("eer is pooled over all spoof trials of each CM file");
    let emit = |t: &mut Table, name: &str, eer: String, values: &[f64]| {
        let mut cells = vec![name.to_owned(), eer];
        cells.extend(values.iter().map(|&v| t.rate(v)));
        t.row(&cells);
    };
    emit(&mut t, "no_cm", "-".into(), &no_cm);
    let zero = t.rate(0.0);
    emit(&mut t, "perfect_cm", zero, &perfect);
    for (name, eer, values) in &systems {
        let e = t.rate(*eer);
        emit(&mut t, name, e, values);
    }
    Ok(t.finish())
}

fn persist(path: &Path, contents: &str) -> Result<tempfile::NamedTempFile> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err =
        |e: std::io::Error| CliError::Data(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    Ok(tmp)
}

fn simulate(ctx: &Context, a: &SimulateArgs) -> Result<String> {
    let model = GaussianScoreModel {
        mu_tar: a.mu_tar,
        mu_non: a.mu_non,
        mu_spoof: a.mu_spoof,
        sigma_tar: a.sigma_tar,
        sigma_non: a.sigma_non,
        sigma_spoof: a.sigma_spoof,
        n_tar: a.n_tar,
        n_non: a.n_non,
        n_spoof: a.n_spoof,
        seed: a.seed,
    };
    let set = sample_scores(&model, a.kind)?;

    let mut outputs = vec![(a.out.clone(), set.to_text())];
    if !a.thresholds.is_empty() {
        let header: &[&str] = match a.kind {
            ScoreKind::Asv => &["threshold", "p_miss", "p_fa", "p_miss_spoof"],
            ScoreKind::Cm => &["threshold", "p_miss", "p_fa"],
        };
        let mut t = Table::new(ctx.precision, header);
        for &th in &a.thresholds {
            let mut cells = vec![threshold(th)];
            match a.kind {
                ScoreKind::Asv => {
                    let (pm, pf, ps) = analytic_rates(&model, th);
                    cells.extend([pm, pf, ps].map(|x| t.rate(x)));
                }
                ScoreKind::Cm => {
                    let (pm, pf) = analytic_cm_rates(&model, th);
                    cells.extend([pm, pf].map(|x| t.rate(x)));
                }
            }
            t.row(&cells);
        }
        let mut sidecar = a.out.clone().into_os_string();
        sidecar.push(".oracle.tsv");
        outputs.push((PathBuf::from(sidecar), t.finish()));
    }

    // Stage everything first so a failure leaves no partial outputs.
    let staged = outputs
        .iter()
        .map(|(path, text)| persist(path, text))
        .collect::<Result<Vec<_>>>()?;
    for (tmp, (path, _)) in staged.into_iter().zip(&outputs) {
        tmp.persist(path)
            .map_err(|e| CliError::Data(format!("cannot write {}: {}", path.display(), e.error)))?;
    }

    let counts = set.counts();
    let mut t = Table::new(
        ctx.precision,
        &["path", "kind", "target", "nontarget", "spoof"],
    );
    t.row(&[
        a.out.display().to_string(),
        a.kind.to_string(),
        counts.target.to_string(),
        counts.nontarget.to_string(),
        counts.spoof.to_string(),
    ]);
    Ok(t.finish())
}
