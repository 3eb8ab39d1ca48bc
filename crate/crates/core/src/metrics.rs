//! Efficiency indicators over mission results, the configured operator
//! baseline, and table renderings.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mission::MissionResult;
use crate::sensor::DefectKind;
use crate::structure::StructurePart;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("at least one mission result is required")]
    NoResults,
}

/// Closed interval `[low, high]`, written as a two-element array in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Band {
    pub low: f64,
    pub high: f64,
}

impl Band {
    pub const fn new(low: f64, high: f64) -> Self {
        Self { low, high }
    }

    pub fn point(v: f64) -> Self {
        Self { low: v, high: v }
    }

    pub fn midpoint(&self) -> f64 {
        (self.low + self.high) / 2.0
    }

    pub fn is_ordered(&self) -> bool {
        self.low.is_finite() && self.high.is_finite() && self.low <= self.high
    }
}

impl From<[f64; 2]> for Band {
    fn from(v: [f64; 2]) -> Self {
        Self { low: v[0], high: v[1] }
    }
}

impl From<Band> for [f64; 2] {
    fn from(b: Band) -> Self {
        [b.low, b.high]
    }
}

/// One row of the manual criticality table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManualCriticality {
    pub kind: DefectKind,
    pub component: StructurePart,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_cm: Option<Band>,
    pub score: Band,
    pub time_h: Band,
}

/// The traditional operator method, as configured constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineModel {
    pub inspection_time_per_weu_h: Band,
    /// Fractions, not percent.
    pub detection_rate: Band,
    pub coverage: Band,
    pub criticality_time_h: Band,
    pub update_frequency_months: f64,
    pub manual_criticality: Vec<ManualCriticality>,
    /// Passed through to the system row.
    pub system_update_frequency_months: f64,
}

impl Default for BaselineModel {
    fn default() -> Self {
        let time = Band::new(1.0, 1.5);
        let score = Band::new(7.0, 9.0);
        Self {
            inspection_time_per_weu_h: Band::new(5.5, 6.0),
            detection_rate: Band::new(0.75, 0.85),
            coverage: Band::new(0.70, 0.80),
            criticality_time_h: time,
            update_frequency_months: 3.0,
            manual_criticality: alloc::vec![
                ManualCriticality {
                    kind: DefectKind::Crack,
                    component: StructurePart::Blade,
                    size_cm: Some(Band::new(5.0, 7.0)),
                    score,
                    time_h: time,
                },
                ManualCriticality {
                    kind: DefectKind::Corrosion,
                    component: StructurePart::Tower,
                    size_cm: Some(Band::new(10.0, 15.0)),
                    score,
                    time_h: time,
                },
                ManualCriticality {
                    kind: DefectKind::Overheating,
                    component: StructurePart::Generator,
                    size_cm: None,
                    score,
                    time_h: time,
                },
            ],
            system_update_frequency_months: 1.0,
        }
    }
}

impl BaselineModel {
    /// `(field, message)` for every unordered or out-of-range band.
    pub fn problems(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut band = |name: &str, b: &Band, lo: f64, hi: f64| {
            if !b.is_ordered() || b.low < lo || b.high > hi {
                out.push((name.to_string(), format!("expected {lo} <= low <= high <= {hi} (got [{}, {}])", b.low, b.high)));
            }
        };
        band("inspection_time_per_weu_h", &self.inspection_time_per_weu_h, 0.0, f64::MAX);
        band("detection_rate", &self.detection_rate, 0.0, 1.0);
        band("coverage", &self.coverage, 0.0, 1.0);
        band("criticality_time_h", &self.criticality_time_h, 0.0, f64::MAX);
        for (i, row) in self.manual_criticality.iter().enumerate() {
            band(&format!("manual_criticality[{i}].score"), &row.score, 1.0, 10.0);
            band(&format!("manual_criticality[{i}].time_h"), &row.time_h, 0.0, f64::MAX);
            if let Some(s) = &row.size_cm {
                band(&format!("manual_criticality[{i}].size_cm"), s, 0.0, f64::MAX);
            }
        }
        for (name, v) in [
            ("update_frequency_months", self.update_frequency_months),
            ("system_update_frequency_months", self.system_update_frequency_months),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                out.push((name.into(), format!("must be positive (got {v})")));
            }
        }
        out
    }
}

/// A central value with its reporting band. For the system row the band is
/// the 5th to 95th percentile of the Monte-Carlo samples; for the baseline
/// it is the configured range and the value is its midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub value: f64,
    pub band: Band,
}

impl Stat {
    pub fn configured(b: Band) -> Self {
        Self { value: b.midpoint(), band: b }
    }

    pub fn point(v: f64) -> Self {
        Self { value: v, band: Band::point(v) }
    }

    fn scaled(self, k: f64) -> Self {
        Self { value: self.value * k, band: Band::new(self.band.low * k, self.band.high * k) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub method: String,
    pub n_simultaneous: u32,
    pub time_per_weu_h: Option<Stat>,
    /// `None` when no defect was injected.
    pub detection_pct: Option<Stat>,
    pub coverage_pct: Option<Stat>,
    pub criticality_time_h: Option<Stat>,
    pub update_freq_months: f64,
    pub runs: u32,
}

/// Linear-interpolated percentile of sorted data, `q` in [0, 1].
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q * (n - 1) as f64;
            let i = crate::math::floor(pos) as usize;
            if i + 1 >= n {
                return sorted[n - 1];
            }
            let frac = pos - i as f64;
            sorted[i] + (sorted[i + 1] - sorted[i]) * frac
        }
    }
}

fn stat_of(mut samples: Vec<f64>) -> Option<Stat> {
    if samples.is_empty() {
        return None;
    }
    samples.sort_by(f64::total_cmp);
    // fixed-order summation keeps the mean bit-stable
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    Some(Stat { value: mean, band: Band::new(percentile(&samples, 0.05), percentile(&samples, 0.95)) })
}

/// Distinct true defects reported and defects injected, per run.
pub fn detection_counts(result: &MissionResult) -> (u32, u32) {
    let mut ids: Vec<u32> = result.reports.iter().map(|r| r.defect_id).collect();
    ids.sort_unstable();
    ids.dedup();
    (ids.len() as u32, result.injected_defects)
}

/// The system row. Detection pools every run: reported over injected.
pub fn compute_metrics(results: &[MissionResult], baseline: &BaselineModel) -> Result<EfficiencyRow, MetricsError> {
    if results.is_empty() {
        return Err(MetricsError::NoResults);
    }
    let mut reported = 0u64;
    let mut injected = 0u64;
    let mut per_run = Vec::new();
    for r in results {
        let (d, n) = detection_counts(r);
        reported += d as u64;
        injected += n as u64;
        if n > 0 {
            per_run.push(100.0 * d as f64 / n as f64);
        }
    }
    let detection_pct = if injected == 0 {
        None
    } else {
        stat_of(per_run).map(|s| Stat { value: 100.0 * reported as f64 / injected as f64, ..s })
    };
    let durations = results.iter().flat_map(|r| r.zones.iter().filter_map(|z| z.duration_h)).collect();
    let coverage = results.iter().flat_map(|r| r.zones.iter().map(|z| z.coverage)).collect();
    let latency = results.iter().flat_map(|r| r.reports.iter().map(|d| d.assessment_latency_h)).collect();
    Ok(EfficiencyRow {
        method: "System M_s".into(),
        n_simultaneous: results[0].uavs,
        time_per_weu_h: stat_of(durations),
        detection_pct,
        coverage_pct: stat_of(coverage).map(|s| s.scaled(100.0)),
        criticality_time_h: stat_of(latency),
        update_freq_months: baseline.system_update_frequency_months,
        runs: results.len() as u32,
    })
}

pub fn baseline_row(b: &BaselineModel) -> EfficiencyRow {
    EfficiencyRow {
        method: "Traditional (operator)".into(),
        n_simultaneous: 1,
        time_per_weu_h: Some(Stat::configured(b.inspection_time_per_weu_h)),
        detection_pct: Some(Stat::configured(b.detection_rate).scaled(100.0)),
        coverage_pct: Some(Stat::configured(b.coverage).scaled(100.0)),
        criticality_time_h: Some(Stat::configured(b.criticality_time_h)),
        update_freq_months: b.update_frequency_months,
        runs: 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline: EfficiencyRow,
    pub system: EfficiencyRow,
    /// Baseline midpoint time over system time.
    pub speedup: Option<f64>,
    /// Band tops compared, in percentage points.
    pub detection_delta_pts: Option<f64>,
    pub coverage_delta_pts: Option<f64>,
    pub checks: Vec<Check>,
}

fn top_delta(system: Option<Stat>, baseline: Option<Stat>) -> Option<f64> {
    Some(system?.band.high - baseline?.band.high)
}

pub fn compare(baseline: &EfficiencyRow, system: &EfficiencyRow) -> Comparison {
    let speedup = match (baseline.time_per_weu_h, system.time_per_weu_h) {
        (Some(b), Some(s)) if s.value > 0.0 => Some(b.band.midpoint() / s.value),
        _ => None,
    };
    let mut checks = Vec::new();
    let mut check = |name: &str, pass: Option<bool>| checks.push(Check { name: name.into(), pass: pass.unwrap_or(false) });
    check(
        "system time below baseline low",
        baseline.time_per_weu_h.zip(system.time_per_weu_h).map(|(b, s)| s.value < b.band.low),
    );
    check(
        "system detection above baseline high",
        baseline.detection_pct.zip(system.detection_pct).map(|(b, s)| s.value > b.band.high),
    );
    check(
        "system coverage above baseline high",
        baseline.coverage_pct.zip(system.coverage_pct).map(|(b, s)| s.value > b.band.high),
    );
    Comparison {
        baseline: baseline.clone(),
        system: system.clone(),
        speedup,
        detection_delta_pts: top_delta(system.detection_pct, baseline.detection_pct),
        coverage_delta_pts: top_delta(system.coverage_pct, baseline.coverage_pct),
        checks,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityRow {
    pub kind: DefectKind,
    pub method: String,
    pub component: StructurePart,
    pub size_cm: Option<Band>,
    pub score: Band,
    pub time_h: Band,
    pub count: u32,
}

/// Observed score, size and latency ranges per defect kind, next to the manual rows.
pub fn criticality_table(results: &[MissionResult], baseline: &BaselineModel) -> Vec<CriticalityRow> {
    struct Acc {
        component: StructurePart,
        size: Option<Band>,
        score: Band,
        time: Band,
        count: u32,
    }
    fn widen(b: &mut Band, v: f64) {
        b.low = b.low.min(v);
        b.high = b.high.max(v);
    }
    let mut acc: BTreeMap<DefectKind, Acc> = BTreeMap::new();
    for r in results.iter().flat_map(|r| r.reports.iter()) {
        let score = r.criticality as f64;
        let e = acc.entry(r.kind).or_insert(Acc {
            component: r.component,
            size: r.estimated_size_cm.map(Band::point),
            score: Band::point(score),
            time: Band::point(r.assessment_latency_h),
            count: 0,
        });
        e.count += 1;
        widen(&mut e.score, score);
        widen(&mut e.time, r.assessment_latency_h);
        if let (Some(b), Some(s)) = (e.size.as_mut(), r.estimated_size_cm) {
            widen(b, s);
        }
    }
    let mut rows = Vec::new();
    for kind in DefectKind::ALL {
        for m in baseline.manual_criticality.iter().filter(|m| m.kind == kind) {
            rows.push(CriticalityRow {
                kind,
                method: "Traditional (manual)".into(),
                component: m.component,
                size_cm: m.size_cm,
                score: m.score,
                time_h: m.time_h,
                count: 0,
            });
        }
        if let Some(a) = acc.get(&kind) {
            rows.push(CriticalityRow {
                kind,
                method: "System M_s".into(),
                component: a.component,
                size_cm: a.size,
                score: a.score,
                time_h: a.time,
                count: a.count,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Text,
    PlotData,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "text" => Some(Format::Text),
            "plot-data" => Some(Format::PlotData),
            _ => None,
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:.6}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "undefined".into())
}

fn stat_cols(s: Option<Stat>) -> [String; 3] {
    match s {
        Some(s) => [num(s.value), num(s.band.low), num(s.band.high)],
        None => ["undefined".into(), "undefined".into(), "undefined".into()],
    }
}

const STAT_FIELDS: [&str; 4] = ["time_per_weu_h", "detection_pct", "coverage_pct", "criticality_time_h"];

fn row_stats(r: &EfficiencyRow) -> [Option<Stat>; 4] {
    [r.time_per_weu_h, r.detection_pct, r.coverage_pct, r.criticality_time_h]
}

/// Rendered report files as `(file name, contents)`, in a fixed order.
pub fn emit(cmp: &Comparison, criticality: &[CriticalityRow], format: Format) -> Vec<(String, String)> {
    match format {
        Format::Csv => alloc::vec![
            ("efficiency.csv".into(), efficiency_table(cmp, ',')),
            ("criticality.csv".into(), criticality_csv(criticality, ',')),
        ],
        Format::PlotData => alloc::vec![
            ("efficiency.dat".into(), efficiency_table(cmp, '\t')),
            ("criticality.dat".into(), criticality_csv(criticality, '\t')),
        ],
        Format::Text => alloc::vec![("report.txt".into(), text_report(cmp, criticality))],
    }
}

fn efficiency_table(cmp: &Comparison, sep: char) -> String {
    let mut header: Vec<String> = alloc::vec!["method".into(), "n_simultaneous".into()];
    for f in STAT_FIELDS {
        header.push(format!("{f}_mean"));
        header.push(format!("{f}_low"));
        header.push(format!("{f}_high"));
    }
    header.push("update_freq_months".into());
    header.push("runs".into());
    let mut out = String::new();
    if sep == '\t' {
        out.push_str("# ");
    }
    out.push_str(&join(&header, sep));
    out.push('\n');
    for r in [&cmp.baseline, &cmp.system] {
        let mut cols: Vec<String> = alloc::vec![quote(&r.method, sep), format!("{}", r.n_simultaneous)];
        for s in row_stats(r) {
            cols.extend(stat_cols(s));
        }
        cols.push(num(r.update_freq_months));
        cols.push(format!("{}", r.runs));
        out.push_str(&join(&cols, sep));
        out.push('\n');
    }
    out
}

fn criticality_csv(rows: &[CriticalityRow], sep: char) -> String {
    let header = ["kind", "method", "component", "size_low_cm", "size_high_cm", "score_low", "score_high", "time_low_h", "time_high_h", "count"];
    let mut out = String::new();
    if sep == '\t' {
        out.push_str("# ");
    }
    out.push_str(&header.join(&sep.to_string()));
    out.push('\n');
    for r in rows {
        let cols = [
            r.kind.as_str().into(),
            quote(&r.method, sep),
            r.component.as_str().into(),
            opt(r.size_cm.map(|b| b.low)),
            opt(r.size_cm.map(|b| b.high)),
            num(r.score.low),
            num(r.score.high),
            num(r.time_h.low),
            num(r.time_h.high),
            format!("{}", r.count),
        ];
        out.push_str(&join(&cols, sep));
        out.push('\n');
    }
    out
}

fn quote(s: &str, sep: char) -> String {
    if sep == '\t' {
        s.replace(' ', "_")
    } else {
        s.into()
    }
}

fn join(cols: &[String], sep: char) -> String {
    let mut out = String::new();
    for (i, c) in cols.iter().enumerate() {
        if i > 0 {
            out.push(sep);
        }
        out.push_str(c);
    }
    out
}

fn text_report(cmp: &Comparison, criticality: &[CriticalityRow]) -> String {
    let mut out = String::new();
    for r in [&cmp.baseline, &cmp.system] {
        let _ = writeln!(out, "[{}]", r.method);
        let _ = writeln!(out, "n_simultaneous = {}", r.n_simultaneous);
        for (f, s) in STAT_FIELDS.iter().zip(row_stats(r)) {
            let [v, lo, hi] = stat_cols(s);
            let _ = writeln!(out, "{f} = {v} [{lo}, {hi}]");
        }
        let _ = writeln!(out, "update_freq_months = {}", num(r.update_freq_months));
        let _ = writeln!(out, "runs = {}", r.runs);
        out.push('\n');
    }
    let _ = writeln!(out, "[comparison]");
    let _ = writeln!(out, "speedup = {}", opt(cmp.speedup));
    let _ = writeln!(out, "detection_delta_pts = {}", opt(cmp.detection_delta_pts));
    let _ = writeln!(out, "coverage_delta_pts = {}", opt(cmp.coverage_delta_pts));
    for c in &cmp.checks {
        let _ = writeln!(out, "check \"{}\" = {}", c.name, if c.pass { "pass" } else { "fail" });
    }
    out.push('\n');
    let _ = writeln!(out, "[criticality]");
    for r in criticality {
        let _ = writeln!(
            out,
            "{} / {} / {}: score {}-{}, time {}-{} h, n = {}",
            r.kind.as_str(),
            r.method,
            r.component.as_str(),
            r.score.low,
            r.score.high,
            num(r.time_h.low),
            num(r.time_h.high),
            r.count
        );
    }
    out
}
