//! Synthetic benchmark grid: datasets x schemes -> quantiles of the minimal
//! p-value over repeated runs, scored against the theoretical mask.
//!
//! Every run of a dataset draws one profile and one stream, and every scheme
//! is run on that same stream. Seeds are derived from the experiment seed and
//! the (dataset, scheme, run) coordinates, so results do not depend on the
//! evaluation order or on whether runs execute in parallel.
//!
//! Cells are classified as *undetected* when the 10% quantile of the minimal
//! p-value is at least 0.05 and *detected* when the 90% quantile is at most
//! 0.01; anything in between is inconclusive and never matches the mask.
//!
//! The detector's evaluation grid is configurable through `stride`. The
//! desk-scale preset tests every tenth time step to keep a full grid within
//! minutes on one core.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{gen_periodic, gen_rand_const, gen_rand_periodic, verify_profile, AdversarialProfile};
use crate::data::{sample_stream, two_squares};
use crate::detector::{run_detector, KernelSpec};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, derived_rng};
use crate::scalar::Scalar;
use crate::windowing::WindowScheme;
use crate::{Rational, DEFAULT_SEED};

/// Upper bound on the 90% quantile for a cell to count as detected.
pub const DETECTED_BELOW: f64 = 0.01;
/// Lower bound on the 10% quantile for a cell to count as undetected.
pub const UNDETECTED_ABOVE: f64 = 0.05;

const PROFILE_KEY: u64 = 1;
const STREAM_KEY: u64 = 2;
const DETECTOR_KEY: u64 = 3;
const MASK_KEY: u64 = 4;

/// Profile family of one table row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    /// Square wave with period `l` and `duty` ones per period.
    Periodic { l: usize, duty: usize },
    /// Random balanced head of length `a`, then constant one half.
    RandConst { a: usize },
    /// Random head of length `a`, then an `l`-periodic tail of the same mean.
    RandPer { a: usize, l: usize },
}

impl DatasetSpec {
    pub fn label(&self) -> String {
        match self {
            DatasetSpec::Periodic { .. } => "Periodic".into(),
            DatasetSpec::RandConst { a } => format!("Rand.Const ({a})"),
            DatasetSpec::RandPer { a, .. } => format!("Rand.Per. ({a})"),
        }
    }

    /// Draw a family member of length `n`.
    pub fn generate<S: Scalar>(&self, n: usize, seed: u64) -> Result<AdversarialProfile<S>> {
        let mut rng = derived_rng(seed, &[]);
        match *self {
            DatasetSpec::Periodic { l, duty } => gen_periodic(l, duty, n),
            DatasetSpec::RandConst { a } => gen_rand_const(a, n, &mut rng),
            DatasetSpec::RandPer { a, l } => gen_rand_periodic(a, l, n, &mut rng),
        }
    }
}

/// Detector column of the table; all share the test window length `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeSpec {
    Fixed { a: usize },
    Grow { a: usize },
    Sliding,
}

impl SchemeSpec {
    pub fn label(&self) -> String {
        match self {
            SchemeSpec::Fixed { a } => format!("fixed ({a})"),
            SchemeSpec::Grow { a } => format!("grow ({a})"),
            SchemeSpec::Sliding => "sliding".into(),
        }
    }

    pub fn scheme(&self, l: usize, stride: usize) -> WindowScheme {
        match *self {
            SchemeSpec::Fixed { a } => WindowScheme::fixed(a, l),
            SchemeSpec::Grow { a } => WindowScheme::growing(a, l),
            SchemeSpec::Sliding => WindowScheme::sliding(l),
        }
        .with_stride(stride)
    }

    fn seed_key(&self) -> u64 {
        match *self {
            SchemeSpec::Fixed { a } => (1 << 32) | a as u64,
            SchemeSpec::Grow { a } => (2 << 32) | a as u64,
            SchemeSpec::Sliding => 3 << 32,
        }
    }
}

fn default_parallel() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub runs: usize,
    pub permutations: usize,
    pub stride: usize,
    pub theta: f64,
    #[serde(default)]
    pub kernel: KernelSpec,
    /// Two-squares drift intensity (shift `intensity / 10`).
    pub intensity: f64,
    /// Test window length shared by all schemes.
    pub l: usize,
    pub datasets: Vec<DatasetSpec>,
    pub schemes: Vec<SchemeSpec>,
    pub seed: u64,
    /// Least number of cells whose classification must match the mask.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_matches: Option<usize>,
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

impl ExperimentConfig {
    /// The full benchmark: 500 runs with 2500 permutations at every time step.
    pub fn paper() -> Self {
        ExperimentConfig {
            n: 1000,
            runs: 500,
            permutations: 2500,
            stride: 1,
            theta: 0.05,
            kernel: KernelSpec::default(),
            intensity: 5.0,
            l: 100,
            datasets: vec![
                DatasetSpec::Periodic { l: 100, duty: 50 },
                DatasetSpec::RandConst { a: 100 },
                DatasetSpec::RandConst { a: 150 },
                DatasetSpec::RandPer { a: 100, l: 100 },
                DatasetSpec::RandPer { a: 150, l: 100 },
            ],
            schemes: vec![
                SchemeSpec::Fixed { a: 100 },
                SchemeSpec::Fixed { a: 150 },
                SchemeSpec::Grow { a: 100 },
                SchemeSpec::Grow { a: 150 },
                SchemeSpec::Sliding,
            ],
            seed: DEFAULT_SEED,
            min_matches: None,
            parallel: true,
        }
    }

    /// The desk-scale grid: one dataset per family (periodic, random
    /// constant and random periodic, all with head length 100) against the
    /// five schemes, with 50 runs, 500 permutations, every tenth time step,
    /// and a floor of 13 matching cells out of 15.
    pub fn desk() -> Self {
        let paper = Self::paper();
        ExperimentConfig {
            runs: 50,
            permutations: 500,
            stride: 10,
            datasets: vec![paper.datasets[0], paper.datasets[1], paper.datasets[3]],
            min_matches: Some(13),
            ..paper
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.runs == 0 || self.permutations == 0 || self.stride == 0 || self.l == 0 {
            return bad("runs, permutations, stride and l must be positive".into());
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return bad(format!("theta must lie in (0, 1], got {}", self.theta));
        }
        two_squares(self.intensity)?;
        self.kernel.validate()?;
        for d in &self.datasets {
            let ok = match *d {
                DatasetSpec::Periodic { l, duty } => 1 <= duty && duty < l && l <= self.n,
                DatasetSpec::RandConst { a } => a > 0 && a % 2 == 0 && a < self.n,
                DatasetSpec::RandPer { a, l } => a > 0 && l > 0 && a < self.n && l <= self.n - a,
            };
            if !ok {
                return bad(format!("dataset {} does not fit n = {}", d.label(), self.n));
            }
        }
        for s in &self.schemes {
            s.scheme(self.l, self.stride).validate()?;
            let a = match *s {
                SchemeSpec::Fixed { a } | SchemeSpec::Grow { a } => a,
                SchemeSpec::Sliding => self.l,
            };
            if a + self.l > self.n {
                return bad(format!("scheme {} does not fit n = {}", s.label(), self.n));
            }
        }
        if let Some(m) = self.min_matches {
            let cells = self.datasets.len() * self.schemes.len();
            if m > cells {
                return bad(format!("min_matches {m} exceeds the {cells} cells"));
            }
        }
        Ok(())
    }

    pub fn columns(&self) -> Vec<SchemeSpec> {
        let mut s = self.schemes.clone();
        s.sort();
        s.dedup();
        s
    }
}

/// What theory says a detector column sees on a dataset row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskEntry {
    Adversarial,
    Detected,
}

/// Empirical verdict of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Undetected,
    Detected,
    Inconclusive,
}

impl Classification {
    pub fn of(q90: f64, q10: f64) -> Self {
        if q10 >= UNDETECTED_ABOVE {
            Classification::Undetected
        } else if q90 <= DETECTED_BELOW {
            Classification::Detected
        } else {
            Classification::Inconclusive
        }
    }

    pub fn matches(self, mask: MaskEntry) -> bool {
        matches!(
            (self, mask),
            (Classification::Undetected, MaskEntry::Adversarial) | (Classification::Detected, MaskEntry::Detected)
        )
    }
}

/// Theoretical verdict: adversarial iff a representative family member has
/// exactly zero residual against the scheme (with its stride).
pub fn expected_mask(dataset: &DatasetSpec, scheme: &WindowScheme, n: usize, seed: u64) -> Result<MaskEntry> {
    let profile = dataset.generate::<Rational>(n, seed)?;
    let report = verify_profile(&profile, scheme, n)?;
    Ok(if report.is_adversarial {
        MaskEntry::Adversarial
    } else {
        MaskEntry::Detected
    })
}

/// Empirical quantile with linear interpolation between order statistics
/// (position `q (N - 1)` in the sorted sample).
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub q90: f64,
    pub q10: f64,
    pub mask: MaskEntry,
    pub classification: Classification,
    /// Minimal p-value of every run, in run order.
    pub min_p: Vec<f64>,
}

impl Cell {
    fn new(min_p: Vec<f64>, mask: MaskEntry) -> Self {
        let q90 = quantile(&min_p, 0.9).expect("runs >= 1");
        let q10 = quantile(&min_p, 0.1).expect("runs >= 1");
        Cell {
            q90,
            q10,
            mask,
            classification: Classification::of(q90, q10),
            min_p,
        }
    }

    pub fn matches(&self) -> bool {
        self.classification.matches(self.mask)
    }

    pub fn median(&self) -> f64 {
        quantile(&self.min_p, 0.5).expect("runs >= 1")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileTable {
    pub datasets: Vec<String>,
    pub schemes: Vec<String>,
    /// `cells[dataset][scheme]`.
    pub cells: Vec<Vec<Cell>>,
    pub config: ExperimentConfig,
}

/// Cell coordinates whose classification disagrees with the mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub dataset: String,
    pub scheme: String,
    pub mask: MaskEntry,
    pub classification: Classification,
}

impl QuantileTable {
    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn matches(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.matches()).count()
    }

    pub fn mismatches(&self) -> Vec<Mismatch> {
        let mut out = Vec::new();
        for (d, row) in self.cells.iter().enumerate() {
            for (s, cell) in row.iter().enumerate() {
                if !cell.matches() {
                    out.push(Mismatch {
                        dataset: self.datasets[d].clone(),
                        scheme: self.schemes[s].clone(),
                        mask: cell.mask,
                        classification: cell.classification,
                    });
                }
            }
        }
        out
    }

    /// Whether the configured match floor (if any) is met.
    pub fn meets_floor(&self) -> bool {
        self.config.min_matches.is_none_or(|m| self.matches() >= m)
    }

    /// Median over adversarial cells of their median min-p, minus the same
    /// over detected cells. `None` unless both kinds of cell exist.
    pub fn separation_gap(&self) -> Option<f64> {
        let medians = |mask: MaskEntry| -> Vec<f64> {
            self.cells
                .iter()
                .flatten()
                .filter(|c| c.mask == mask)
                .map(Cell::median)
                .collect()
        };
        let adv = quantile(&medians(MaskEntry::Adversarial), 0.5)?;
        let det = quantile(&medians(MaskEntry::Detected), 0.5)?;
        Some(adv - det)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables always serialize")
    }
}

/// Run every (dataset, run) job and assemble the quantile table.
pub fn run_experiment(config: &ExperimentConfig) -> Result<QuantileTable> {
    config.validate()?;
    let source = two_squares(config.intensity)?;
    let columns = config.columns();
    let schemes: Vec<WindowScheme> = columns.iter().map(|s| s.scheme(config.l, config.stride)).collect();

    let mut masks = Vec::with_capacity(config.datasets.len());
    for (d, dataset) in config.datasets.iter().enumerate() {
        let seed = derive_seed(config.seed, &[MASK_KEY, d as u64]);
        let row = columns
            .iter()
            .zip(&schemes)
            .map(|(spec, scheme)| {
                expected_mask(dataset, scheme, config.n, seed).map_err(|e| cell_error(e, dataset, spec, None))
            })
            .collect::<Result<Vec<_>>>()?;
        masks.push(row);
    }

    let jobs: Vec<(usize, usize)> = (0..config.datasets.len())
        .flat_map(|d| (0..config.runs).map(move |r| (d, r)))
        .collect();
    let job = |&(d, run): &(usize, usize)| -> Result<Vec<f64>> {
        let dataset = &config.datasets[d];
        let keys = [d as u64, run as u64];
        let profile = dataset
            .generate::<f64>(config.n, derive_seed(config.seed, &[PROFILE_KEY, keys[0], keys[1]]))
            .map_err(|e| cell_error(e, dataset, &columns[0], Some(run)))?;
        let stream = sample_stream(
            &profile,
            &source,
            derive_seed(config.seed, &[STREAM_KEY, keys[0], keys[1]]),
        )?;
        let points = stream.points();
        columns
            .iter()
            .zip(&schemes)
            .map(|(spec, scheme)| {
                let seed = derive_seed(config.seed, &[DETECTOR_KEY, keys[0], spec.seed_key(), keys[1]]);
                run_detector::<f64, _>(&points, scheme, config.theta, &config.kernel, config.permutations, seed)
                    .map(|report| report.min_p)
                    .map_err(|e| cell_error(e, dataset, spec, Some(run)))
            })
            .collect()
    };
    let results: Vec<Vec<f64>> = if config.parallel {
        jobs.par_iter().map(job).collect::<Result<_>>()?
    } else {
        jobs.iter().map(job).collect::<Result<_>>()?
    };

    let cells = masks
        .into_iter()
        .enumerate()
        .map(|(d, mask_row)| {
            let runs = &results[d * config.runs..(d + 1) * config.runs];
            mask_row
                .into_iter()
                .enumerate()
                .map(|(s, mask)| Cell::new(runs.iter().map(|r| r[s]).collect(), mask))
                .collect()
        })
        .collect();

    Ok(QuantileTable {
        datasets: config.datasets.iter().map(DatasetSpec::label).collect(),
        schemes: columns.iter().map(SchemeSpec::label).collect(),
        cells,
        config: config.clone(),
    })
}

fn cell_error(e: Error, dataset: &DatasetSpec, scheme: &SchemeSpec, run: Option<usize>) -> Error {
    let mut context = format!("{} / {}", dataset.label(), scheme.label());
    if let Some(run) = run {
        let _ = write!(context, ", run {run}");
    }
    Error::Cell {
        context,
        source: Box::new(e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Markdown,
}

fn cell_text(cell: &Cell) -> String {
    format!("{:.3}/{:.3}", cell.q90, cell.q10)
}

fn mask_text(table: &QuantileTable, d: usize) -> String {
    table.cells[d]
        .iter()
        .zip(&table.schemes)
        .filter(|(c, _)| c.mask == MaskEntry::Adversarial)
        .map(|(_, s)| s.as_str())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Render `q90/q10` per cell; the mask column lists the schemes that theory
/// says the row's profile is hidden from (underlined in markdown).
pub fn render_table(table: &QuantileTable, format: TableFormat) -> String {
    let mut header = vec!["dataset".to_string()];
    header.extend(table.schemes.iter().cloned());
    header.push("mask".into());
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            let quote = |s: &str| {
                if s.contains([',', '"']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.to_string()
                }
            };
            let _ = writeln!(out, "{}", header.iter().map(|h| quote(h)).collect::<Vec<_>>().join(","));
            for (d, row) in table.cells.iter().enumerate() {
                let mut fields = vec![quote(&table.datasets[d])];
                fields.extend(row.iter().map(cell_text));
                fields.push(quote(&mask_text(table, d)));
                let _ = writeln!(out, "{}", fields.join(","));
            }
        }
        TableFormat::Markdown => {
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for (d, row) in table.cells.iter().enumerate() {
                let mut fields = vec![table.datasets[d].clone()];
                fields.extend(row.iter().map(|c| match c.mask {
                    MaskEntry::Adversarial => format!("<u>{}</u>", cell_text(c)),
                    MaskEntry::Detected => cell_text(c),
                }));
                fields.push(mask_text(table, d));
                let _ = writeln!(out, "| {} |", fields.join(" | "));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(d: DatasetSpec, s: SchemeSpec) -> MaskEntry {
        expected_mask(&d, &s.scheme(100, 1), 1000, 5).unwrap()
    }

    #[test]
    fn mask_examples() {
        let periodic = DatasetSpec::Periodic { l: 100, duty: 50 };
        assert_eq!(mask(periodic, SchemeSpec::Fixed { a: 100 }), MaskEntry::Adversarial);
        assert_eq!(mask(periodic, SchemeSpec::Grow { a: 100 }), MaskEntry::Detected);
        assert_eq!(
            mask(DatasetSpec::RandConst { a: 150 }, SchemeSpec::Fixed { a: 100 }),
            MaskEntry::Detected
        );
    }

    #[test]
    fn paper_grid_mask_has_ten_hidden_cells() {
        let config = ExperimentConfig::paper();
        let hidden: Vec<(String, String)> = config
            .datasets
            .iter()
            .flat_map(|d| config.schemes.iter().map(move |s| (d, s)))
            .filter(|(d, s)| mask(**d, **s) == MaskEntry::Adversarial)
            .map(|(d, s)| (d.label(), s.label()))
            .collect();
        let expect = [
            ("Periodic", "fixed (100)"),
            ("Periodic", "sliding"),
            ("Rand.Const (100)", "fixed (100)"),
            ("Rand.Const (100)", "fixed (150)"),
            ("Rand.Const (100)", "grow (100)"),
            ("Rand.Const (100)", "grow (150)"),
            ("Rand.Const (150)", "fixed (150)"),
            ("Rand.Const (150)", "grow (150)"),
            ("Rand.Per. (100)", "fixed (100)"),
            ("Rand.Per. (150)", "fixed (150)"),
        ];
        let expect: Vec<(String, String)> = expect.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        assert_eq!(hidden, expect);
    }

    #[test]
    fn linear_quantiles() {
        let v = [4.0, 1.0, 3.0, 2.0, 5.0];
        assert_eq!(quantile(&v, 0.5), Some(3.0));
        assert_eq!(quantile(&v, 0.0), Some(1.0));
        assert_eq!(quantile(&v, 1.0), Some(5.0));
        assert!((quantile(&v, 0.9).unwrap() - 4.6).abs() < 1e-12);
        assert!((quantile(&v, 0.1).unwrap() - 1.4).abs() < 1e-12);
        assert_eq!(quantile(&[], 0.5), None);
        assert_eq!(quantile(&[0.7], 0.1), Some(0.7));
    }

    #[test]
    fn classification_thresholds() {
        assert_eq!(Classification::of(0.6, 0.05), Classification::Undetected);
        assert_eq!(Classification::of(0.01, 0.0), Classification::Detected);
        assert_eq!(Classification::of(0.02, 0.0), Classification::Inconclusive);
        assert!(Classification::Undetected.matches(MaskEntry::Adversarial));
        assert!(!Classification::Inconclusive.matches(MaskEntry::Detected));
    }

    fn tiny() -> ExperimentConfig {
        ExperimentConfig {
            n: 120,
            runs: 3,
            permutations: 19,
            stride: 20,
            l: 20,
            datasets: vec![
                DatasetSpec::Periodic { l: 20, duty: 10 },
                DatasetSpec::RandConst { a: 20 },
            ],
            schemes: vec![SchemeSpec::Sliding, SchemeSpec::Fixed { a: 20 }],
            min_matches: None,
            ..ExperimentConfig::paper()
        }
    }

    #[test]
    fn columns_follow_table_order() {
        let t = run_experiment(&tiny()).unwrap();
        assert_eq!(t.schemes, vec!["fixed (20)", "sliding"]);
        assert_eq!(t.datasets, vec!["Periodic", "Rand.Const (20)"]);
        assert!(t.cells.iter().flatten().all(|c| c.q90 >= c.q10 && c.min_p.len() == 3));
    }

    #[test]
    fn reproducible_and_order_independent() {
        let a = run_experiment(&tiny()).unwrap();
        let b = run_experiment(&ExperimentConfig {
            parallel: false,
            ..tiny()
        })
        .unwrap();
        assert_eq!(a.cells, b.cells);
        let c = run_experiment(&ExperimentConfig { seed: 99, ..tiny() }).unwrap();
        assert_ne!(a.cells, c.cells);
    }

    #[test]
    fn empty_dataset_list_renders_header_only() {
        let t = run_experiment(&ExperimentConfig {
            datasets: vec![],
            ..tiny()
        })
        .unwrap();
        assert_eq!(render_table(&t, TableFormat::Csv), "dataset,fixed (20),sliding,mask\n");
        assert_eq!(render_table(&t, TableFormat::Markdown).lines().count(), 2);
    }

    #[test]
    fn csv_and_markdown_carry_the_same_numbers() {
        let t = run_experiment(&tiny()).unwrap();
        let numbers = |s: &str| -> Vec<String> {
            s.split(|c: char| !(c.is_ascii_digit() || c == '.'))
                .filter(|x| x.contains('.'))
                .map(String::from)
                .collect()
        };
        let csv = render_table(&t, TableFormat::Csv);
        let md = render_table(&t, TableFormat::Markdown);
        assert_eq!(numbers(&csv), numbers(&md));
        assert!(md.contains("<u>"));
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::desk().validate().is_ok());
        assert!(ExperimentConfig { runs: 0, ..tiny() }.validate().is_err());
        assert!(ExperimentConfig { l: 200, ..tiny() }.validate().is_err());
        assert!(ExperimentConfig {
            datasets: vec![DatasetSpec::RandConst { a: 21 }],
            ..tiny()
        }
        .validate()
        .is_err());
        let json = serde_json::to_string(&ExperimentConfig::desk()).unwrap();
        assert_eq!(ExperimentConfig::from_json(&json).unwrap(), ExperimentConfig::desk());
    }
}
