//! Scoring, two-sided threshold classification, metrics, threshold search,
//! and loss-distribution histograms.
//!
//! A record is flagged anomalous when its reconstruction-error score falls
//! strictly below the lower threshold or strictly above the upper one;
//! scores exactly equal to either threshold count as normal. The band
//! between the thresholds is where normal data is expected to live.

use std::fmt;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::loss::anomaly_score;
use crate::model::reconstruct;
use crate::nn::Network;

/// A validated `lower <= upper` threshold pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPair {
    lower: f64,
    upper: f64,
}

impl ThresholdPair {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() {
            return Err(Error::NonFinite("threshold"));
        }
        if lower > upper {
            return Err(Error::Precondition(format!(
                "threshold lower ({lower}) must not exceed upper ({upper})"
            )));
        }
        Ok(ThresholdPair { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Band width `upper - lower`.
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Score every record: `score_i = ||x_i - reconstruct(x_i)||_2`, in dataset
/// order. The dataset must already be normalized with the same scaling the
/// network was trained on.
pub fn score_dataset(net: &Network, dataset: &Dataset) -> Result<Vec<f64>> {
    dataset
        .records()
        .iter()
        .map(|r| anomaly_score(&r.features, &reconstruct(net, r)?))
        .collect()
}

/// Apply the two-sided rule: `flag_i = score_i < lower || score_i > upper`.
///
/// Boundary scores (exactly equal to a threshold) are not flagged, and
/// non-finite scores never satisfy either strict inequality.
pub fn classify(scores: &[f64], thresholds: &ThresholdPair) -> Vec<bool> {
    scores
        .iter()
        .map(|&s| s < thresholds.lower || s > thresholds.upper)
        .collect()
}

/// Confusion counts for one flagged dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    /// Rows flagged anomalous.
    pub detected: usize,
    /// Flagged rows that are labeled anomalous.
    pub true_positives: usize,
    /// Flagged rows that are labeled normal.
    pub false_positives: usize,
    /// Labeled anomalies that were not flagged.
    pub missed: usize,
}

impl Metrics {
    /// Total labeled anomalies (`true_positives + missed`).
    pub fn total_anomalies(&self) -> usize {
        self.true_positives + self.missed
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Detected:        {}", self.detected)?;
        writeln!(f, "True Positives:  {}", self.true_positives)?;
        writeln!(f, "False Positives: {}", self.false_positives)?;
        write!(f, "Missed:          {}", self.missed)
    }
}

/// Count detection outcomes. `flags` and `labels` must have equal length;
/// `labels[i] = true` marks a labeled anomaly.
///
/// The output always satisfies `detected = true_positives + false_positives`
/// and `true_positives + missed = total labeled anomalies`.
pub fn evaluate(flags: &[bool], labels: &[bool]) -> Result<Metrics> {
    if flags.len() != labels.len() {
        return Err(Error::Shape {
            context: "evaluate flags vs labels",
            expected: labels.len(),
            actual: flags.len(),
        });
    }
    let mut metrics = Metrics {
        detected: 0,
        true_positives: 0,
        false_positives: 0,
        missed: 0,
    };
    for (&flag, &label) in flags.iter().zip(labels) {
        match (flag, label) {
            (true, true) => {
                metrics.detected += 1;
                metrics.true_positives += 1;
            }
            (true, false) => {
                metrics.detected += 1;
                metrics.false_positives += 1;
            }
            (false, true) => metrics.missed += 1,
            (false, false) => {}
        }
    }
    debug_assert_eq!(
        metrics.detected,
        metrics.true_positives + metrics.false_positives
    );
    Ok(metrics)
}

/// What [`sweep_thresholds`] maximizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepObjective {
    /// Harmonic mean of precision and recall.
    F1,
    /// `F_beta`: recall weighted `beta` times as heavily as precision
    /// (`beta > 1` tolerates false positives to catch more anomalies).
    FBeta(f64),
    /// Maximize true positives subject to `false_positives <= cap`.
    MaxTpWithFpCap(usize),
}

impl SweepObjective {
    fn validate(&self) -> Result<()> {
        if let SweepObjective::FBeta(beta) = self {
            if !(*beta > 0.0 && beta.is_finite()) {
                return Err(Error::Config(format!(
                    "F_beta requires a positive finite beta, got {beta}"
                )));
            }
        }
        Ok(())
    }

    /// Larger is better; inadmissible points return -1 (worse than any
    /// admissible value, all of which are >= 0).
    fn value(&self, tp: usize, fp: usize, missed: usize) -> f64 {
        let (tp_f, fp_f, fn_f) = (tp as f64, fp as f64, missed as f64);
        match self {
            SweepObjective::F1 => {
                let denom = 2.0 * tp_f + fp_f + fn_f;
                if denom == 0.0 {
                    0.0
                } else {
                    2.0 * tp_f / denom
                }
            }
            SweepObjective::FBeta(beta) => {
                let b2 = beta * beta;
                let denom = (1.0 + b2) * tp_f + fp_f + b2 * fn_f;
                if denom == 0.0 {
                    0.0
                } else {
                    (1.0 + b2) * tp_f / denom
                }
            }
            SweepObjective::MaxTpWithFpCap(cap) => {
                if fp <= *cap {
                    tp_f
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Exhaustively search threshold pairs and return the objective-maximizing
/// one with its metrics.
///
/// Candidate thresholds are the midpoints between consecutive distinct
/// sorted scores plus one sentinel below the minimum and one above the
/// maximum, so no candidate ever coincides with a score and the result is
/// robust to the boundary-equality rule. Every pair `lower <= upper` over
/// the candidates is evaluated. Ties are broken by (1) fewer false
/// positives, then (2) smaller band width.
///
/// Requires at least one labeled anomaly and finite scores.
pub fn sweep_thresholds(
    scores: &[f64],
    labels: &[bool],
    objective: SweepObjective,
) -> Result<(ThresholdPair, Metrics)> {
    objective.validate()?;
    if scores.len() != labels.len() {
        return Err(Error::Shape {
            context: "sweep scores vs labels",
            expected: labels.len(),
            actual: scores.len(),
        });
    }
    if scores.is_empty() {
        return Err(Error::Precondition(
            "sweep needs at least one score".to_string(),
        ));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("sweep scores"));
    }
    let total_anomalies = labels.iter().filter(|&&l| l).count();
    if total_anomalies == 0 {
        return Err(Error::Precondition(
            "sweep needs at least one labeled anomaly".to_string(),
        ));
    }

    // Sorted (score, label) pairs drive the candidate walk.
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));

    let mut distinct: Vec<f64> = Vec::with_capacity(scores.len());
    for &i in &order {
        if distinct.last() != Some(&scores[i]) {
            distinct.push(scores[i]);
        }
    }

    // Candidates: sentinel below, midpoints, sentinel above.
    let mut candidates = Vec::with_capacity(distinct.len() + 1);
    candidates.push(distinct[0] - 1.0);
    for pair in distinct.windows(2) {
        candidates.push(0.5 * (pair[0] + pair[1]));
    }
    candidates.push(distinct[distinct.len() - 1] + 1.0);

    // Prefix counts: scores (and anomalous scores) strictly below each
    // candidate. Candidates never equal scores, so "strictly below" is the
    // whole story.
    let n = scores.len();
    let mut count_below = Vec::with_capacity(candidates.len());
    let mut anom_below = Vec::with_capacity(candidates.len());
    let mut walk = 0usize;
    let mut anom_walk = 0usize;
    for &c in &candidates {
        while walk < n && scores[order[walk]] < c {
            if labels[order[walk]] {
                anom_walk += 1;
            }
            walk += 1;
        }
        count_below.push(walk);
        anom_below.push(anom_walk);
    }

    struct Best {
        objective: f64,
        fp: usize,
        width: f64,
        lower: f64,
        upper: f64,
        tp: usize,
        detected: usize,
    }
    let mut best: Option<Best> = None;
    for i in 0..candidates.len() {
        for j in i..candidates.len() {
            let detected = count_below[i] + (n - count_below[j]);
            let tp = anom_below[i] + (total_anomalies - anom_below[j]);
            let fp = detected - tp;
            let missed = total_anomalies - tp;
            let value = objective.value(tp, fp, missed);
            let width = candidates[j] - candidates[i];
            let better = match &best {
                None => true,
                Some(b) => {
                    value > b.objective
                        || (value == b.objective && (fp < b.fp || (fp == b.fp && width < b.width)))
                }
            };
            if better {
                best = Some(Best {
                    objective: value,
                    fp,
                    width,
                    lower: candidates[i],
                    upper: candidates[j],
                    tp,
                    detected,
                });
            }
        }
    }

    let best = best.expect("candidate set is non-empty");
    let thresholds = ThresholdPair::new(best.lower, best.upper)?;
    let metrics = evaluate(&classify(scores, &thresholds), labels)?;
    debug_assert_eq!(metrics.detected, best.detected);
    debug_assert_eq!(metrics.true_positives, best.tp);
    debug_assert_eq!(metrics.false_positives, best.fp);
    Ok((thresholds, metrics))
}

/// Per-record scores with optional labels, thresholds, and flags.
///
/// Flags are only ever produced by [`ScoreReport::with_thresholds`], so they
/// are always consistent with the classification rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    scores: Vec<f64>,
    labels: Option<Vec<bool>>,
    thresholds: Option<ThresholdPair>,
    flags: Option<Vec<bool>>,
}

impl ScoreReport {
    /// A report with no thresholds applied yet.
    pub fn new(scores: Vec<f64>, labels: Option<Vec<bool>>) -> Result<Self> {
        if let Some(labels) = &labels {
            if labels.len() != scores.len() {
                return Err(Error::Shape {
                    context: "score report labels",
                    expected: scores.len(),
                    actual: labels.len(),
                });
            }
        }
        Ok(ScoreReport {
            scores,
            labels,
            thresholds: None,
            flags: None,
        })
    }

    /// Attach thresholds, computing flags with [`classify`].
    pub fn with_thresholds(mut self, thresholds: ThresholdPair) -> Self {
        self.flags = Some(classify(&self.scores, &thresholds));
        self.thresholds = Some(thresholds);
        self
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> Option<&[bool]> {
        self.labels.as_deref()
    }

    pub fn thresholds(&self) -> Option<&ThresholdPair> {
        self.thresholds.as_ref()
    }

    pub fn flags(&self) -> Option<&[bool]> {
        self.flags.as_deref()
    }

    /// CSV with columns `row_index,score,flagged[,label]`. `row_index` is
    /// 0-based dataset order; `flagged` is blank when no thresholds have
    /// been applied; the `label` column appears only for labeled reports.
    pub fn to_csv_string(&self) -> String {
        let labeled = self.labels.is_some();
        let mut out = String::from(if labeled {
            "row_index,score,flagged,label\n"
        } else {
            "row_index,score,flagged\n"
        });
        for (i, &score) in self.scores.iter().enumerate() {
            let flagged = self.flags.as_ref().map_or(String::new(), |f| {
                if f[i] {
                    "1".into()
                } else {
                    "0".into()
                }
            });
            out.push_str(&format!("{i},{score},{flagged}"));
            if let Some(labels) = &self.labels {
                out.push_str(if labels[i] { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }

    /// Parse a CSV written by [`ScoreReport::to_csv_string`]. Thresholds and
    /// flags are not reconstructed (flags are derived data); scores and
    /// labels are.
    pub fn from_csv_str(text: &str, source: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::Schema {
                file: source.to_string(),
                message: e.to_string(),
            })?
            .clone();
        let score_col =
            headers
                .iter()
                .position(|h| h == "score")
                .ok_or_else(|| Error::MissingColumn {
                    file: source.to_string(),
                    column: "score".to_string(),
                })?;
        let label_col = headers.iter().position(|h| h == "label");

        let mut scores = Vec::new();
        let mut labels = label_col.map(|_| Vec::new());
        for (idx, row) in reader.records().enumerate() {
            let row_no = idx + 1;
            let row = row.map_err(|e| Error::InvalidRow {
                row: row_no,
                message: e.to_string(),
            })?;
            let raw = row.get(score_col).unwrap_or("").trim();
            let score: f64 = raw.parse().map_err(|_| Error::InvalidRow {
                row: row_no,
                message: format!("cannot parse score `{raw}`"),
            })?;
            scores.push(score);
            if let (Some(col), Some(labels)) = (label_col, labels.as_mut()) {
                match row.get(col).unwrap_or("").trim() {
                    "0" => labels.push(false),
                    "1" => labels.push(true),
                    other => {
                        return Err(Error::InvalidRow {
                            row: row_no,
                            message: format!("label must be 0 or 1, got `{other}`"),
                        })
                    }
                }
            }
        }
        ScoreReport::new(scores, labels)
    }
}

/// One equal-width histogram bin with label-split counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    /// Rows labeled normal, plus all rows when the input is unlabeled.
    pub count_normal: usize,
    pub count_anomalous: usize,
}

/// Bin scores into `bin_count` equal-width bins spanning `[min, max]`.
///
/// Every bin is half-open `[lo, hi)` except the last, which includes its
/// right edge so the maximum score lands in it. All identical scores (zero
/// range) collapse to a single bin regardless of `bin_count`. Unlabeled
/// inputs count everything under `count_normal`.
pub fn export_histogram(
    scores: &[f64],
    labels: Option<&[bool]>,
    bin_count: usize,
) -> Result<Vec<HistogramBin>> {
    if scores.is_empty() {
        return Err(Error::Precondition(
            "histogram needs at least one score".to_string(),
        ));
    }
    if bin_count < 1 {
        return Err(Error::Precondition(
            "histogram needs at least one bin".to_string(),
        ));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("histogram scores"));
    }
    if let Some(labels) = labels {
        if labels.len() != scores.len() {
            return Err(Error::Shape {
                context: "histogram labels",
                expected: scores.len(),
                actual: labels.len(),
            });
        }
    }

    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bin_count = if max > min { bin_count } else { 1 };
    let width = (max - min) / bin_count as f64;

    let mut bins: Vec<HistogramBin> = (0..bin_count)
        .map(|k| HistogramBin {
            lo: min + k as f64 * width,
            hi: if k + 1 == bin_count {
                max
            } else {
                min + (k + 1) as f64 * width
            },
            count_normal: 0,
            count_anomalous: 0,
        })
        .collect();

    for (i, &s) in scores.iter().enumerate() {
        let idx = if width > 0.0 {
            (((s - min) / width) as usize).min(bin_count - 1)
        } else {
            0
        };
        let anomalous = labels.is_some_and(|l| l[i]);
        if anomalous {
            bins[idx].count_anomalous += 1;
        } else {
            bins[idx].count_normal += 1;
        }
    }
    Ok(bins)
}

/// Render histogram bins as CSV: `bin_lo,bin_hi,count_normal,count_anomalous`.
pub fn histogram_to_csv_string(bins: &[HistogramBin]) -> String {
    let mut out = String::from("bin_lo,bin_hi,count_normal,count_anomalous\n");
    for b in bins {
        out.push_str(&format!(
            "{},{},{},{}\n",
            b.lo, b.hi, b.count_normal, b.count_anomalous
        ));
    }
    out
}
