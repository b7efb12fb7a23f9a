//! Trial labels, score records and the whitespace-separated score file format.
//!
//! A score file holds one trial per line, `<trial_id> <score> <label>`. Lines
//! starting with `#` and blank lines are skipped. Labels are case-insensitive;
//! CM files additionally accept `bonafide` and `human`, which are stored as
//! [`TrialLabel::Target`] because the CM never distinguishes target from
//! nontarget speech.

use std::collections::HashSet;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrialLabel {
    Target,
    Nontarget,
    Spoof,
}

impl TrialLabel {
    pub const ALL: [TrialLabel; 3] = [TrialLabel::Target, TrialLabel::Nontarget, TrialLabel::Spoof];

    /// Bona fide speech, i.e. target or nontarget.
    pub fn is_human(self) -> bool {
        !matches!(self, TrialLabel::Spoof)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrialLabel::Target => "target",
            TrialLabel::Nontarget => "nontarget",
            TrialLabel::Spoof => "spoof",
        }
    }

    /// Parses a label token as it may appear in a file of the given kind.
    pub fn parse_for(token: &str, kind: ScoreKind) -> Option<TrialLabel> {
        let lower = token.to_ascii_lowercase();
        match lower.as_str() {
            "target" => Some(TrialLabel::Target),
            "nontarget" => Some(TrialLabel::Nontarget),
            "spoof" => Some(TrialLabel::Spoof),
            "bonafide" | "human" if kind == ScoreKind::Cm => Some(TrialLabel::Target),
            _ => None,
        }
    }
}

impl fmt::Display for TrialLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which detector produced the scores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScoreKind {
    Asv,
    Cm,
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreKind::Asv => "asv",
            ScoreKind::Cm => "cm",
        })
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "asv" => Ok(ScoreKind::Asv),
            "cm" => Ok(ScoreKind::Cm),
            _ => Err(Error::UnknownStrategy {
                registry: "score kind",
                name: s.to_owned(),
                available: "asv, cm".to_owned(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial_id: String,
    pub score: f64,
    pub label: TrialLabel,
}

impl TrialRecord {
    pub fn new(trial_id: impl Into<String>, score: f64, label: TrialLabel) -> Self {
        Self {
            trial_id: trial_id.into(),
            score,
            label,
        }
    }
}

/// Per-label trial counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LabelCounts {
    pub target: usize,
    pub nontarget: usize,
    pub spoof: usize,
}

impl LabelCounts {
    pub fn human(&self) -> usize {
        self.target + self.nontarget
    }

    pub fn total(&self) -> usize {
        self.target + self.nontarget + self.spoof
    }

    pub fn get(&self, label: TrialLabel) -> usize {
        match label {
            TrialLabel::Target => self.target,
            TrialLabel::Nontarget => self.nontarget,
            TrialLabel::Spoof => self.spoof,
        }
    }

    fn bump(&mut self, label: TrialLabel) {
        match label {
            TrialLabel::Target => self.target += 1,
            TrialLabel::Nontarget => self.nontarget += 1,
            TrialLabel::Spoof => self.spoof += 1,
        }
    }
}

/// Validated, immutable collection of scored trials from one detector.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreSet {
    records: Vec<TrialRecord>,
    kind: ScoreKind,
    counts: LabelCounts,
}

impl ScoreSet {
    /// Validates `records` and builds the set. Record order is kept.
    pub fn new(kind: ScoreKind, records: Vec<TrialRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyFile);
        }
        let mut seen = HashSet::with_capacity(records.len());
        let mut counts = LabelCounts::default();
        for (i, rec) in records.iter().enumerate() {
            if rec.trial_id.is_empty() {
                return Err(Error::EmptyTrialId);
            }
            if !rec.score.is_finite() {
                return Err(Error::NonFiniteScore {
                    line: i + 1,
                    token: rec.score.to_string(),
                });
            }
            if !seen.insert(rec.trial_id.as_str()) {
                return Err(Error::DuplicateTrialId {
                    line: i + 1,
                    id: rec.trial_id.clone(),
                });
            }
            counts.bump(rec.label);
        }
        check_cardinality(kind, &counts)?;
        Ok(Self {
            records,
            kind,
            counts,
        })
    }

    /// Builds a set from per-class score lists, synthesizing ids as `<label><index>`.
    pub fn from_class_scores(
        kind: ScoreKind,
        target: &[f64],
        nontarget: &[f64],
        spoof: &[f64],
    ) -> Result<Self> {
        let mut records = Vec::with_capacity(target.len() + nontarget.len() + spoof.len());
        for (label, scores) in [
            (TrialLabel::Target, target),
            (TrialLabel::Nontarget, nontarget),
            (TrialLabel::Spoof, spoof),
        ] {
            records.extend(
                scores
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| TrialRecord::new(format!("{label}{i}"), s, label)),
            );
        }
        Self::new(kind, records)
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }

    pub fn counts(&self) -> LabelCounts {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Scores carrying `label`, in record order.
    pub fn subset_by_label(&self, label: TrialLabel) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.label == label)
            .map(|r| r.score)
            .collect()
    }

    /// Scores of bona fide (target or nontarget) trials, in record order.
    pub fn human_scores(&self) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.label.is_human())
            .map(|r| r.score)
            .collect()
    }

    /// Returns a copy with every score passed through `f`. Ids, labels and order are kept.
    pub fn map_scores(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let records = self
            .records
            .iter()
            .map(|r| TrialRecord::new(r.trial_id.clone(), f(r.score), r.label))
            .collect();
        Self::new(self.kind, records)
    }

    /// Serializes in the score file format. Scores use the shortest decimal
    /// representation that parses back to the same `f64`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for rec in &self.records {
            let _ = writeln!(out, "{}\t{}\t{}", rec.trial_id, rec.score, rec.label);
        }
        out
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn check_cardinality(kind: ScoreKind, counts: &LabelCounts) -> Result<()> {
    match kind {
        ScoreKind::Asv if counts.target == 0 || counts.nontarget == 0 => Err(Error::Cardinality {
            kind,
            requirement: "at least one target and one nontarget trial",
        }),
        ScoreKind::Cm if counts.human() == 0 || counts.spoof == 0 => Err(Error::Cardinality {
            kind,
            requirement: "at least one bona fide and one spoof trial",
        }),
        _ => Ok(()),
    }
}

/// Parses score file contents.
pub fn parse_scores(text: &str, kind: ScoreKind) -> Result<ScoreSet> {
    let mut records = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let [id, score_tok, label_tok] = fields[..] else {
            return Err(Error::MalformedLine {
                line,
                found: fields.len(),
            });
        };
        let score: f64 = score_tok.parse().map_err(|_| Error::InvalidScore {
            line,
            token: score_tok.to_owned(),
        })?;
        if !score.is_finite() {
            return Err(Error::NonFiniteScore {
                line,
                token: score_tok.to_owned(),
            });
        }
        let label = TrialLabel::parse_for(label_tok, kind).ok_or_else(|| Error::UnknownLabel {
            line,
            token: label_tok.to_owned(),
            kind,
        })?;
        if !seen.insert(id.to_owned()) {
            return Err(Error::DuplicateTrialId {
                line,
                id: id.to_owned(),
            });
        }
        records.push(TrialRecord::new(id, score, label));
    }
    ScoreSet::new(kind, records)
}

/// Reads and parses a score file.
pub fn parse_score_file(path: impl AsRef<Path>, kind: ScoreKind) -> Result<ScoreSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scores(&text, kind)
}
