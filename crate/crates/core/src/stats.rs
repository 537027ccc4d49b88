//! Trace statistics: splitting filters, mergeable accumulators, reports and CSV output.

use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::curve::{CurveFamily, Rational};
use crate::modp::{kth_power_residue, PrimeField};

/// Largest moment tracked.
pub const MAX_MOMENT: usize = 10;
/// Default number of histogram bins over `[-6, 6]`.
pub const DEFAULT_BINS: usize = 120;
/// Histogram support: `|a1| <= 6` in genus 3.
pub const HIST_RANGE: f64 = 6.0;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("unknown filter {0:?} (expected q, qi-sqrt2-c4, qi-sqrt3-c3 or qi-m3-4)")]
    BadFilter(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

/// "`p` splits completely" expressed as congruence and power-residue conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitFilter {
    modulus: u64,
    allowed: Vec<u64>,
    powers: Vec<(Rational, u64)>,
    description: String,
}

impl SplitFilter {
    /// Panics if an allowed class is not a unit mod `modulus` or some `k` is 0.
    pub fn new(modulus: u64, allowed: Vec<u64>, powers: Vec<(Rational, u64)>, description: impl Into<String>) -> Self {
        assert!(modulus > 0);
        assert!(
            allowed.iter().all(|&a| a < modulus && num_integer::gcd(a, modulus) == 1),
            "allowed classes must be units mod {modulus}"
        );
        assert!(powers.iter().all(|&(_, k)| k > 0));
        Self { modulus, allowed, powers, description: description.into() }
    }

    pub fn trivial() -> Self {
        Self::new(1, vec![0], Vec::new(), "Q")
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn allowed_classes(&self) -> &[u64] {
        &self.allowed
    }

    pub fn power_conditions(&self) -> &[(Rational, u64)] {
        &self.powers
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Whether `p` passes. A base that is not a unit at `p` fails its condition.
    pub fn passes(&self, field: &PrimeField) -> bool {
        if !self.allowed.contains(&(field.p() % self.modulus)) {
            return false;
        }
        self.powers
            .iter()
            .all(|&(base, k)| base.reduce(field).and_then(|a| kth_power_residue(a, k, field).ok()).unwrap_or(false))
    }
}

/// The splitting fields used to pick out the identity component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitField {
    Q,
    /// `Q(i, sqrt 2, c^(1/4))`
    QiSqrt2C4,
    /// `Q(i, sqrt 3, c^(1/3))`
    QiSqrt3C3,
    /// `Q(i, (-3)^(1/4))`
    QiM3Quartic,
}

impl SplitField {
    pub const ALL: [SplitField; 4] = [Self::Q, Self::QiSqrt2C4, Self::QiSqrt3C3, Self::QiM3Quartic];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Q => "q",
            Self::QiSqrt2C4 => "qi-sqrt2-c4",
            Self::QiSqrt3C3 => "qi-sqrt3-c3",
            Self::QiM3Quartic => "qi-m3-4",
        }
    }
}

impl fmt::Display for SplitField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SplitField {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| StatsError::BadFilter(s.to_string()))
    }
}

pub fn split_filter_for(field: SplitField, curve: &CurveFamily) -> SplitFilter {
    let c = curve.c;
    match field {
        SplitField::Q => SplitFilter::trivial(),
        SplitField::QiSqrt2C4 => SplitFilter::new(8, vec![1], vec![(c, 4)], format!("Q(i,sqrt2,({c})^(1/4))")),
        SplitField::QiSqrt3C3 => SplitFilter::new(12, vec![1], vec![(c, 3)], format!("Q(i,sqrt3,({c})^(1/3))")),
        SplitField::QiM3Quartic => SplitFilter::new(4, vec![1], vec![(Rational::integer(-3), 4)], "Q(i,(-3)^(1/4))"),
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Running power sums of `a1`, a zero-trace counter and a histogram over `[-6, 6]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    power_sums: [CompensatedSum; MAX_MOMENT + 1],
    zero_count: u64,
    histogram: Vec<u64>,
}

impl MomentAccumulator {
    pub fn new(bins: usize) -> Self {
        assert!(bins > 0, "need at least one histogram bin");
        Self {
            count: 0,
            power_sums: [CompensatedSum::default(); MAX_MOMENT + 1],
            zero_count: 0,
            histogram: vec![0; bins],
        }
    }

    /// Records the trace `t` at `p`, i.e. `a1 = -t / sqrt(p)`.
    pub fn push_trace(&mut self, t: i64, p: u64) {
        self.push(-(t as f64) / (p as f64).sqrt());
        if t == 0 {
            self.zero_count += 1;
        }
    }

    /// Records a normalized value without touching the zero counter.
    pub fn push(&mut self, a1: f64) {
        self.count += 1;
        let mut x = 1.0;
        for s in &mut self.power_sums {
            s.add(x);
            x *= a1;
        }
        let bins = self.histogram.len();
        let pos = ((a1 + HIST_RANGE) / (2.0 * HIST_RANGE) * bins as f64).floor();
        self.histogram[(pos.max(0.0) as usize).min(bins - 1)] += 1;
    }

    /// Componentwise sum. Panics if the bin counts differ.
    pub fn merge(&mut self, other: &Self) {
        assert_eq!(self.histogram.len(), other.histogram.len(), "bin counts differ");
        self.count += other.count;
        self.zero_count += other.zero_count;
        for (a, b) in self.power_sums.iter_mut().zip(&other.power_sums) {
            a.merge(b);
        }
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn zero_count(&self) -> u64 {
        self.zero_count
    }

    pub fn histogram(&self) -> &[u64] {
        &self.histogram
    }

    pub fn bins(&self) -> usize {
        self.histogram.len()
    }

    /// `sum a1^n` for `n <= 10`.
    pub fn power_sum(&self, n: usize) -> f64 {
        self.power_sums[n].value()
    }

    /// `M_n`, or `None` when nothing was recorded.
    pub fn moment(&self, n: usize) -> Option<f64> {
        (self.count > 0).then(|| self.power_sum(n) / self.count as f64)
    }

    pub fn zero_fraction(&self) -> Option<f64> {
        (self.count > 0).then(|| self.zero_count as f64 / self.count as f64)
    }

    /// `(lo, hi)` edges of bin `i`.
    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let w = 2.0 * HIST_RANGE / self.bins() as f64;
        (-HIST_RANGE + i as f64 * w, -HIST_RANGE + (i + 1) as f64 * w)
    }
}

/// Result of a scan over the good primes up to `limit`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub curve: CurveFamily,
    pub limit: u64,
    pub filter: String,
    pub stats: MomentAccumulator,
}

impl ScanReport {
    /// `M_1..M_10`; empty when no prime passed.
    pub fn moments(&self) -> Vec<Option<f64>> {
        (1..=MAX_MOMENT).map(|n| self.stats.moment(n)).collect()
    }

    pub fn moment(&self, n: usize) -> Option<f64> {
        self.stats.moment(n)
    }

    pub fn zero_fraction(&self) -> Option<f64> {
        self.stats.zero_fraction()
    }

    pub fn count(&self) -> u64 {
        self.stats.count()
    }
}

fn stem_with(stem: &Path, suffix: &str) -> PathBuf {
    let mut name = stem.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// Writes `n,Mn` rows for `n = 1..=values.len()`, blank where a value is missing.
pub fn write_moments_csv(path: &Path, values: &[Option<f64>], warning: Option<&str>) -> Result<(), StatsError> {
    let csv_err = |source| StatsError::Csv { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(|source| StatsError::Io { path: path.to_path_buf(), source })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["n", "Mn"]).map_err(csv_err)?;
    for (i, v) in values.iter().enumerate() {
        let cell = v.map(format_moment).unwrap_or_default();
        w.write_record([(i + 1).to_string(), cell]).map_err(csv_err)?;
    }
    if let Some(msg) = warning {
        w.write_record(["warning", msg]).map_err(csv_err)?;
    }
    w.flush().map_err(|source| StatsError::Io { path: path.to_path_buf(), source })
}

/// Integers (within `1e-6`) print without a fractional part.
pub fn format_moment(v: f64) -> String {
    let r = v.round();
    if (v - r).abs() < 1e-6 && r.abs() < 1e15 {
        format!("{}", r as i64)
    } else {
        format!("{v:.6}")
    }
}

/// Writes `<stem>.moments.csv` and `<stem>.hist.csv`, returning both paths.
pub fn emit_csv(report: &ScanReport, stem: &Path) -> Result<(PathBuf, PathBuf), StatsError> {
    let moments_path = stem_with(stem, ".moments.csv");
    let hist_path = stem_with(stem, ".hist.csv");
    let warning = (report.count() == 0).then_some("no primes passed the filter; moments undefined");
    write_moments_csv(&moments_path, &report.moments(), warning)?;

    let csv_err = |source| StatsError::Csv { path: hist_path.clone(), source };
    let file = File::create(&hist_path).map_err(|source| StatsError::Io { path: hist_path.clone(), source })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["bin_lo", "bin_hi", "count", "density"]).map_err(csv_err)?;
    let stats = &report.stats;
    let total = stats.count() as f64;
    for (i, &count) in stats.histogram().iter().enumerate() {
        let (lo, hi) = stats.bin_edges(i);
        let density = if total > 0.0 { count as f64 / (total * (hi - lo)) } else { 0.0 };
        w.write_record([lo.to_string(), hi.to_string(), count.to_string(), density.to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(|source| StatsError::Io { path: hist_path.clone(), source })?;
    Ok((moments_path, hist_path))
}
