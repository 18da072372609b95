//! Dataset ingestion, normalization, and synthetic data generation.
//!
//! The on-disk inputs are building-energy CSVs: a meter-reading file, a
//! building metadata file, and a weather file. [`join_sources`] inner-joins
//! them into the 13-feature record layout of [`FEATURE_NAMES`], and
//! [`load_labeled`] reads an already-joined file that carries an `anomaly`
//! label column.
//! [`gen_synthetic`] produces small labeled datasets that genuinely lie near
//! a 2-dimensional manifold, so a latent-2 autoencoder can model the normal
//! rows and anomalous rows stand off the manifold.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of model features in the canonical building-energy schema.
pub const FEATURE_COUNT: usize = 13;

/// Canonical feature order for joined building-energy records.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "building_id",
    "square_feet",
    "year_built",
    "floor_count",
    "air_temperature",
    "cloud_coverage",
    "dew_temperature",
    "precip_depth_1_hr",
    "sea_level_pressure",
    "wind_direction",
    "wind_speed",
    "meter",
    "meter_reading",
];

/// Name of the label column in labeled CSV files.
pub const LABEL_COLUMN: &str = "anomaly";

/// One data row: a feature vector plus an optional anomaly label.
///
/// `label = Some(true)` marks an anomalous row, `Some(false)` a normal row,
/// and `None` an unlabeled row.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub features: Vec<f64>,
    pub label: Option<bool>,
}

impl Record {
    /// An unlabeled record.
    pub fn unlabeled(features: Vec<f64>) -> Self {
        Record {
            features,
            label: None,
        }
    }

    /// A labeled record; `anomalous = true` marks an anomaly.
    pub fn labeled(features: Vec<f64>, anomalous: bool) -> Self {
        Record {
            features,
            label: Some(anomalous),
        }
    }
}

/// An ordered collection of records with homogeneous labeling.
///
/// Every record has the same feature width, and either every record carries
/// a label or none does. `provenance` is a human-readable note on where the
/// data came from (source files or generator seed).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<Record>,
    provenance: String,
}

impl Dataset {
    /// Build a dataset, validating uniform feature width and homogeneous
    /// labeling.
    pub fn new(records: Vec<Record>, provenance: impl Into<String>) -> Result<Self> {
        if let Some(first) = records.first() {
            let width = first.features.len();
            let labeled = first.label.is_some();
            for (i, r) in records.iter().enumerate() {
                if r.features.len() != width {
                    return Err(Error::Shape {
                        context: "dataset record width",
                        expected: width,
                        actual: r.features.len(),
                    });
                }
                if r.label.is_some() != labeled {
                    return Err(Error::Precondition(format!(
                        "dataset mixes labeled and unlabeled records (record {i})"
                    )));
                }
            }
        }
        Ok(Dataset {
            records,
            provenance: provenance.into(),
        })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Feature width; 0 for an empty dataset.
    pub fn feature_dim(&self) -> usize {
        self.records.first().map_or(0, |r| r.features.len())
    }

    /// True when the dataset carries labels (empty datasets are unlabeled).
    pub fn is_labeled(&self) -> bool {
        self.records.first().is_some_and(|r| r.label.is_some())
    }

    /// Per-record labels, or `None` when the dataset is unlabeled or empty.
    pub fn labels(&self) -> Option<Vec<bool>> {
        if !self.is_labeled() {
            return None;
        }
        Some(self.records.iter().map(|r| r.label.unwrap()).collect())
    }

    /// Number of records labeled anomalous.
    pub fn anomaly_count(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.label == Some(true))
            .count()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Serialize to CSV. The header lists the canonical feature names when
    /// the width is 13, else `f0..f{n-1}`; labeled datasets append the
    /// `anomaly` column with values 1 (anomalous) / 0 (normal). Output is
    /// byte-deterministic for a given dataset.
    pub fn to_csv_string(&self) -> String {
        let dim = self.feature_dim();
        let mut header: Vec<String> = if dim == FEATURE_COUNT {
            FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
        } else {
            (0..dim).map(|i| format!("f{i}")).collect()
        };
        if self.is_labeled() {
            header.push(LABEL_COLUMN.to_string());
        }
        let mut out = header.join(",");
        out.push('\n');
        for r in &self.records {
            let mut fields: Vec<String> = r.features.iter().map(|v| v.to_string()).collect();
            if let Some(label) = r.label {
                fields.push(if label {
                    "1".to_string()
                } else {
                    "0".to_string()
                });
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse a CSV produced by [`Dataset::to_csv_string`] or any CSV whose
    /// final column named `anomaly` (if present) holds 0/1 labels and whose
    /// remaining columns are numeric features. Column names other than
    /// `anomaly` are informational; the column count defines the width.
    ///
    /// `source` names the input in error messages and the provenance note.
    /// Row numbers in errors are 1-based data rows (the header is row 0).
    pub fn from_csv_str(text: &str, source: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::Schema {
                file: source.to_string(),
                message: e.to_string(),
            })?
            .clone();
        if headers.is_empty() {
            return Err(Error::Schema {
                file: source.to_string(),
                message: "empty header row".to_string(),
            });
        }
        let labeled = headers.iter().next_back() == Some(LABEL_COLUMN);
        let n_features = if labeled {
            headers.len() - 1
        } else {
            headers.len()
        };
        if n_features == 0 {
            return Err(Error::Schema {
                file: source.to_string(),
                message: "no feature columns before the label column".to_string(),
            });
        }

        let mut records = Vec::new();
        for (idx, row) in reader.records().enumerate() {
            let row_no = idx + 1;
            let row = row.map_err(|e| Error::InvalidRow {
                row: row_no,
                message: e.to_string(),
            })?;
            if row.len() != headers.len() {
                return Err(Error::InvalidRow {
                    row: row_no,
                    message: format!("expected {} fields, got {}", headers.len(), row.len()),
                });
            }
            let mut features = Vec::with_capacity(n_features);
            for (col, field) in row.iter().take(n_features).enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| Error::InvalidRow {
                    row: row_no,
                    message: format!(
                        "column `{}`: cannot parse `{}` as a number",
                        headers.get(col).unwrap_or("?"),
                        field
                    ),
                })?;
                features.push(v);
            }
            let label = if labeled {
                let field = row.get(headers.len() - 1).unwrap_or("").trim();
                match field {
                    "0" => Some(false),
                    "1" => Some(true),
                    other => {
                        return Err(Error::InvalidRow {
                            row: row_no,
                            message: format!("label must be 0 or 1, got `{other}`"),
                        })
                    }
                }
            } else {
                None
            };
            records.push(Record { features, label });
        }
        Dataset::new(records, source)
    }

    /// Read a CSV file via [`Dataset::from_csv_str`].
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = crate::fsio::read_to_string(path)?;
        Dataset::from_csv_str(&text, &path.display().to_string())
    }
}

/// Load a labeled building-energy CSV: exactly the 13 canonical features
/// plus a final `anomaly` column of 0/1 values. Unlike [`join_sources`],
/// this reader is strict — blanks and non-numeric fields are row errors,
/// not imputation candidates.
pub fn load_labeled(path: &Path) -> Result<Dataset> {
    let dataset = Dataset::from_csv_path(path)?;
    if !dataset.is_labeled() {
        return Err(Error::Schema {
            file: path.display().to_string(),
            message: format!("missing final `{LABEL_COLUMN}` column"),
        });
    }
    if dataset.feature_dim() != FEATURE_COUNT && !dataset.is_empty() {
        return Err(Error::Schema {
            file: path.display().to_string(),
            message: format!(
                "expected {} columns ({} features + `{}`), got {}",
                FEATURE_COUNT + 1,
                FEATURE_COUNT,
                LABEL_COLUMN,
                dataset.feature_dim() + 1
            ),
        });
    }
    Ok(dataset)
}

/// Counters describing one [`join_sources`] run.
///
/// The meter-row accounting is exact:
/// `joined + dropped_no_building + dropped_no_weather + skipped_unparseable
/// = meter_rows`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinReport {
    /// Data rows in the meter file.
    pub meter_rows: usize,
    /// Rows that matched both joins and were emitted.
    pub joined: usize,
    /// Meter rows whose building_id has no metadata row.
    pub dropped_no_building: usize,
    /// Meter rows whose (site_id, timestamp) has no weather row.
    pub dropped_no_weather: usize,
    /// Meter rows whose join keys failed to parse.
    pub skipped_unparseable: usize,
    /// Per-feature count of blank/unparseable values filled with the
    /// joined-set median, in [`FEATURE_NAMES`] order.
    pub imputed: [usize; FEATURE_COUNT],
}

impl JoinReport {
    /// Total imputed values across all features.
    pub fn imputed_total(&self) -> usize {
        self.imputed.iter().sum()
    }
}

impl fmt::Display for JoinReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "meter rows read:        {}", self.meter_rows)?;
        writeln!(f, "joined:                 {}", self.joined)?;
        writeln!(f, "dropped (no building):  {}", self.dropped_no_building)?;
        writeln!(f, "dropped (no weather):   {}", self.dropped_no_weather)?;
        writeln!(f, "skipped (unparseable):  {}", self.skipped_unparseable)?;
        writeln!(f, "imputed values:         {}", self.imputed_total())?;
        for (name, count) in FEATURE_NAMES.iter().zip(self.imputed.iter()) {
            if *count > 0 {
                writeln!(f, "  {name}: {count}")?;
            }
        }
        Ok(())
    }
}

/// Column positions resolved by header name; extra columns are ignored.
fn resolve_columns(
    headers: &csv::StringRecord,
    file: &str,
    required: &[&str],
) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        map.entry(h.trim().to_string()).or_insert(i);
    }
    for col in required {
        if !map.contains_key(*col) {
            return Err(Error::MissingColumn {
                file: file.to_string(),
                column: (*col).to_string(),
            });
        }
    }
    Ok(map)
}

fn field<'a>(row: &'a csv::StringRecord, cols: &HashMap<String, usize>, name: &str) -> &'a str {
    cols.get(name)
        .and_then(|&i| row.get(i))
        .unwrap_or("")
        .trim()
}

/// Blank or malformed numeric fields become NaN placeholders for later
/// median imputation.
fn numeric_or_nan(raw: &str) -> f64 {
    if raw.is_empty() {
        f64::NAN
    } else {
        raw.parse().unwrap_or(f64::NAN)
    }
}

/// Median of the finite values in `values`; 0.0 when none are finite.
fn finite_median(values: &mut Vec<f64>) -> f64 {
    values.retain(|v| v.is_finite());
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Inner-join meter readings with building metadata (on `building_id`) and
/// weather (on `site_id` + `timestamp`), producing unlabeled records in
/// [`FEATURE_NAMES`] order plus a [`JoinReport`].
///
/// Required columns are located by header name; extra columns are ignored.
/// Join keys must parse (rows with bad keys are skipped and counted), while
/// numeric feature fields may be blank — blanks are filled with the
/// joined-set per-feature median and counted per feature. Duplicate keys in
/// the metadata or weather files resolve to the last occurrence.
pub fn join_sources(
    meter_csv: &Path,
    building_csv: &Path,
    weather_csv: &Path,
) -> Result<(Dataset, JoinReport)> {
    // Building metadata: building_id -> (site_id, square_feet, year_built, floor_count).
    let building_file = building_csv.display().to_string();
    let btext = crate::fsio::read_to_string(building_csv)?;
    let mut breader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(btext.as_bytes());
    let bheaders = breader
        .headers()
        .map_err(|e| Error::Schema {
            file: building_file.clone(),
            message: e.to_string(),
        })?
        .clone();
    let bcols = resolve_columns(
        &bheaders,
        &building_file,
        &[
            "building_id",
            "site_id",
            "square_feet",
            "year_built",
            "floor_count",
        ],
    )?;
    let mut buildings: HashMap<i64, (i64, f64, f64, f64)> = HashMap::new();
    for row in breader.records() {
        let Ok(row) = row else { continue };
        let (Ok(bid), Ok(site)) = (
            field(&row, &bcols, "building_id").parse::<i64>(),
            field(&row, &bcols, "site_id").parse::<i64>(),
        ) else {
            continue;
        };
        buildings.insert(
            bid,
            (
                site,
                numeric_or_nan(field(&row, &bcols, "square_feet")),
                numeric_or_nan(field(&row, &bcols, "year_built")),
                numeric_or_nan(field(&row, &bcols, "floor_count")),
            ),
        );
    }

    // Weather: (site_id, timestamp) -> 7 weather features.
    const WEATHER_FEATURES: [&str; 7] = [
        "air_temperature",
        "cloud_coverage",
        "dew_temperature",
        "precip_depth_1_hr",
        "sea_level_pressure",
        "wind_direction",
        "wind_speed",
    ];
    let weather_file = weather_csv.display().to_string();
    let wtext = crate::fsio::read_to_string(weather_csv)?;
    let mut wreader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(wtext.as_bytes());
    let wheaders = wreader
        .headers()
        .map_err(|e| Error::Schema {
            file: weather_file.clone(),
            message: e.to_string(),
        })?
        .clone();
    let mut wrequired = vec!["site_id", "timestamp"];
    wrequired.extend(WEATHER_FEATURES);
    let wcols = resolve_columns(&wheaders, &weather_file, &wrequired)?;
    let mut weather: HashMap<(i64, String), [f64; 7]> = HashMap::new();
    for row in wreader.records() {
        let Ok(row) = row else { continue };
        let Ok(site) = field(&row, &wcols, "site_id").parse::<i64>() else {
            continue;
        };
        let timestamp = field(&row, &wcols, "timestamp").to_string();
        if timestamp.is_empty() {
            continue;
        }
        let mut values = [0.0; 7];
        for (slot, name) in values.iter_mut().zip(WEATHER_FEATURES) {
            *slot = numeric_or_nan(field(&row, &wcols, name));
        }
        weather.insert((site, timestamp), values);
    }

    // Meter rows drive the join.
    let meter_file = meter_csv.display().to_string();
    let mtext = crate::fsio::read_to_string(meter_csv)?;
    let mut mreader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(mtext.as_bytes());
    let mheaders = mreader
        .headers()
        .map_err(|e| Error::Schema {
            file: meter_file.clone(),
            message: e.to_string(),
        })?
        .clone();
    let mcols = resolve_columns(
        &mheaders,
        &meter_file,
        &["building_id", "meter", "timestamp", "meter_reading"],
    )?;

    let mut report = JoinReport {
        meter_rows: 0,
        joined: 0,
        dropped_no_building: 0,
        dropped_no_weather: 0,
        skipped_unparseable: 0,
        imputed: [0; FEATURE_COUNT],
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for row in mreader.records() {
        report.meter_rows += 1;
        let Ok(row) = row else {
            report.skipped_unparseable += 1;
            continue;
        };
        let Ok(bid) = field(&row, &mcols, "building_id").parse::<i64>() else {
            report.skipped_unparseable += 1;
            continue;
        };
        let timestamp = field(&row, &mcols, "timestamp");
        if timestamp.is_empty() {
            report.skipped_unparseable += 1;
            continue;
        }
        let Some(&(site, square_feet, year_built, floor_count)) = buildings.get(&bid) else {
            report.dropped_no_building += 1;
            continue;
        };
        let Some(w) = weather.get(&(site, timestamp.to_string())) else {
            report.dropped_no_weather += 1;
            continue;
        };
        let mut features = Vec::with_capacity(FEATURE_COUNT);
        features.push(bid as f64);
        features.push(square_feet);
        features.push(year_built);
        features.push(floor_count);
        features.extend_from_slice(w);
        features.push(numeric_or_nan(field(&row, &mcols, "meter")));
        features.push(numeric_or_nan(field(&row, &mcols, "meter_reading")));
        rows.push(features);
        report.joined += 1;
    }

    // Median imputation over the joined set, counted per feature.
    for j in 0..FEATURE_COUNT {
        let mut column: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let median = finite_median(&mut column);
        for row in rows.iter_mut() {
            if !row[j].is_finite() {
                row[j] = median;
                report.imputed[j] += 1;
            }
        }
    }

    let provenance = format!(
        "joined:{}+{}+{}",
        meter_csv.display(),
        building_csv.display(),
        weather_csv.display()
    );
    let dataset = Dataset::new(
        rows.into_iter().map(Record::unlabeled).collect(),
        provenance,
    )?;
    Ok((dataset, report))
}

/// Per-feature min-max scaler.
///
/// A `Normalizer` only exists in a fitted state: it is constructed by
/// [`Normalizer::fit`] or deserialized from a checkpoint, so applying an
/// unfitted normalizer is unrepresentable. Values are mapped to
/// `(v - min) / (max - min)`; constant features map to 0; out-of-range
/// values are NOT clipped, so drift relative to the fitting set stays
/// visible in downstream scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl Normalizer {
    /// Fit per-feature min/max on a non-empty dataset of finite values.
    pub fn fit(dataset: &Dataset) -> Result<Self> {
        if dataset.is_empty() {
            return Err(Error::Precondition(
                "normalizer fit set is empty".to_string(),
            ));
        }
        let dim = dataset.feature_dim();
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for r in dataset.records() {
            for (j, &v) in r.features.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite("normalizer fit input"));
                }
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Normalizer { min, max })
    }

    pub fn feature_dim(&self) -> usize {
        self.min.len()
    }

    /// Check internal consistency (used when loading from a checkpoint).
    pub fn validate(&self) -> Result<()> {
        if self.min.len() != self.max.len() {
            return Err(Error::Shape {
                context: "normalizer min/max widths",
                expected: self.min.len(),
                actual: self.max.len(),
            });
        }
        for (lo, hi) in self.min.iter().zip(&self.max) {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::NonFinite("normalizer bounds"));
            }
            if lo > hi {
                return Err(Error::Precondition(format!(
                    "normalizer has min {lo} > max {hi}"
                )));
            }
        }
        Ok(())
    }

    /// Scale one feature vector.
    pub fn apply_features(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.min.len() {
            return Err(Error::Shape {
                context: "normalizer input width",
                expected: self.min.len(),
                actual: features.len(),
            });
        }
        Ok(features
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect())
    }

    /// Scale one record, preserving its label.
    pub fn apply_record(&self, record: &Record) -> Result<Record> {
        Ok(Record {
            features: self.apply_features(&record.features)?,
            label: record.label,
        })
    }

    /// Scale every record in a dataset, preserving labels and provenance.
    pub fn apply(&self, dataset: &Dataset) -> Result<Dataset> {
        let records = dataset
            .records()
            .iter()
            .map(|r| self.apply_record(r))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(records, dataset.provenance().to_string())
    }
}

/// Generate a labeled synthetic dataset near a 2-D manifold.
///
/// Normal rows are `A·z + noise` with `A` a fixed seeded `input_dim x 2`
/// matrix (entries uniform in (-1, 1)), `z` uniform in [0, 1]^2, and noise
/// uniform in (-0.01, 0.01) per coordinate. Anomalous rows start from the
/// same construction and add an off-manifold displacement `m·d` with `m`
/// uniform in (0.3, 0.8) — at least 30x the noise amplitude — and `d` a
/// uniformly random unit direction. Rows are shuffled; the output is
/// byte-deterministic per `(seed, n_normal, n_anomalies, input_dim)`.
pub fn gen_synthetic(
    seed: u64,
    n_normal: usize,
    n_anomalies: usize,
    input_dim: usize,
) -> Result<Dataset> {
    if input_dim < 3 {
        return Err(Error::Precondition(format!(
            "synthetic input_dim must be at least 3, got {input_dim}"
        )));
    }
    let mut rng = crate::rng::seeded(seed);

    let basis: Vec<[f64; 2]> = (0..input_dim)
        .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
        .collect();

    let manifold_point = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        let z = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        basis
            .iter()
            .map(|a| a[0] * z[0] + a[1] * z[1] + rng.random_range(-0.01..0.01))
            .collect()
    };

    let mut records = Vec::with_capacity(n_normal + n_anomalies);
    for _ in 0..n_normal {
        records.push(Record::labeled(manifold_point(&mut rng), false));
    }
    for _ in 0..n_anomalies {
        let mut features = manifold_point(&mut rng);
        let magnitude = rng.random_range(0.3..0.8);
        let direction: Vec<f64> = (0..input_dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let norm = direction
            .iter()
            .map(|d| d * d)
            .sum::<f64>()
            .sqrt()
            .max(1e-12);
        for (x, d) in features.iter_mut().zip(&direction) {
            *x += magnitude * d / norm;
        }
        records.push(Record::labeled(features, true));
    }
    records.shuffle(&mut rng);

    let provenance = format!(
        "synthetic(seed={seed}, normal={n_normal}, anomalies={n_anomalies}, dim={input_dim})"
    );
    Dataset::new(records, provenance)
}

/// A deterministic probe row for gradient checking and smoke tests:
/// `input_dim` features drawn uniformly from [0, 1) by a generator seeded
/// with `seed`, with an optional label.
pub fn probe_record(input_dim: usize, seed: u64, label: Option<bool>) -> Record {
    let mut rng = crate::rng::seeded(seed);
    let features = (0..input_dim).map(|_| rng.random_range(0.0..1.0)).collect();
    Record { features, label }
}

/// Split a dataset into `(holdout, train)` partitions after a seeded
/// shuffle. The holdout gets `floor(fraction * len)` rows; the split is
/// fully determined by `(dataset, fraction, seed)`.
///
/// `fraction` must lie in [0, 1) and the training side must keep at least
/// one row.
pub fn split_holdout(dataset: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Config(format!(
            "holdout fraction must be in [0, 1), got {fraction}"
        )));
    }
    let mut records = dataset.records().to_vec();
    let n_holdout = (fraction * records.len() as f64).floor() as usize;
    if n_holdout > 0 {
        let mut rng = crate::rng::seeded(seed);
        records.shuffle(&mut rng);
    }
    if records.len() == n_holdout {
        return Err(Error::Precondition(
            "holdout fraction leaves no training rows".to_string(),
        ));
    }
    let train = records.split_off(n_holdout);
    Ok((
        Dataset::new(records, dataset.provenance().to_string())?,
        Dataset::new(train, dataset.provenance().to_string())?,
    ))
}
