//! CSV renderings of planner, sensor and mission outputs.
//!
//! Floats use Rust's shortest round-trip formatting, so equal values always
//! render to equal bytes and parse back exactly.

use farm_sentinel_core::metrics::detection_counts;
use farm_sentinel_core::mission::HealthCount;
use farm_sentinel_core::sensor::SensorMatrix;
use farm_sentinel_core::spatial::{FarmLayout, VectorMatrix, VECTOR_SLOTS};
use farm_sentinel_core::{DefectReport, InspectionPath, MissionResult};
use thiserror::Error;

pub const PATH_HEADER: [&str; 8] = ["seq", "x", "y", "z", "dwell_s", "look_x", "look_y", "look_z"];
pub const SENSOR_HEADER: [&str; 7] = ["zone_id", "cell_i", "cell_j", "defect_id", "modality", "confidence", "t"];
pub const DEFECT_HEADER: [&str; 6] = ["defect_id", "kind", "component", "size_cm", "criticality", "latency_h"];
pub const MONITOR_HEADER: [&str; 3] = ["kind", "health", "count"];
pub const SUMMARY_HEADER: [&str; 16] = [
    "run",
    "seed",
    "uavs",
    "makespan_h",
    "completion_h",
    "injected",
    "reported",
    "detection_pct",
    "coverage_pct",
    "time_per_weu_h",
    "aggregate",
    "sent",
    "delivered",
    "retransmitted",
    "dropped",
    "failures",
];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Bad { line: usize, message: String },
}

fn render<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r.into_iter().collect::<Vec<_>>()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn path_csv(path: &InspectionPath) -> String {
    render(
        &PATH_HEADER,
        path.waypoints.iter().enumerate().map(|(i, w)| {
            [i.to_string(), w.position.x.to_string(), w.position.y.to_string(), w.position.z.to_string(), w.dwell.to_string(), w.look_at.x.to_string(), w.look_at.y.to_string(), w.look_at.z.to_string()]
        }),
    )
}

/// Reads waypoints back from [`path_csv`] output.
pub fn parse_path_csv(zone_id: u32, text: &str, cruise_speed: f64) -> Result<InspectionPath, CsvError> {
    use farm_sentinel_core::{Point3, Waypoint};
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut waypoints = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let f = |k: usize| -> Result<f64, CsvError> {
            rec.get(k)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| CsvError::Bad { line, message: format!("bad `{}`", PATH_HEADER[k]) })
        };
        waypoints.push(Waypoint {
            position: Point3::new(f(1)?, f(2)?, f(3)?),
            dwell: f(4)?,
            look_at: Point3::new(f(5)?, f(6)?, f(7)?),
        });
    }
    Ok(InspectionPath::from_waypoints(zone_id, waypoints, cruise_speed))
}

pub fn vector_matrix_csv(layout: &FarmLayout, matrix: &VectorMatrix) -> String {
    let mut header = vec!["zone_id".to_string()];
    header.extend((1..=VECTOR_SLOTS).map(|k| format!("slot_{k}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    render(
        &header,
        layout.zones().iter().zip(matrix.columns()).map(|(z, col)| {
            let mut row = vec![z.id.to_string()];
            row.extend(col.iter().map(|v| v.to_string()));
            row
        }),
    )
}

/// Columns in file order; zone ids are returned alongside.
pub fn parse_vector_matrix_csv(text: &str) -> Result<(Vec<u32>, VectorMatrix), CsvError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut ids = Vec::new();
    let mut columns = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |m: &str| CsvError::Bad { line, message: m.into() };
        if rec.len() != VECTOR_SLOTS + 1 {
            return Err(bad("expected zone_id and 12 slots"));
        }
        ids.push(rec[0].parse().map_err(|_| bad("bad zone_id"))?);
        let mut col = [0.0; VECTOR_SLOTS];
        for (k, v) in col.iter_mut().enumerate() {
            *v = rec[k + 1].parse().map_err(|_| bad("bad slot value"))?;
        }
        columns.push(col);
    }
    Ok((ids, VectorMatrix::from_columns(columns)))
}

/// Cells are 1-based in the file.
pub fn sensor_matrix_csv(matrices: &[SensorMatrix]) -> String {
    let mut rows = Vec::new();
    for m in matrices {
        for ((i, j), obs) in m.iter_cells() {
            for o in obs {
                rows.push([
                    m.zone_id.to_string(),
                    (i + 1).to_string(),
                    (j + 1).to_string(),
                    o.defect_id.map(|d| d.to_string()).unwrap_or_default(),
                    o.modality.as_str().to_string(),
                    o.confidence.to_string(),
                    o.capture_time.to_string(),
                ]);
            }
        }
    }
    render(&SENSOR_HEADER, rows)
}

pub fn defects_csv(reports: &[DefectReport]) -> String {
    render(
        &DEFECT_HEADER,
        reports.iter().map(|r| {
            [
                r.defect_id.to_string(),
                r.kind.as_str().to_string(),
                r.component.as_str().to_string(),
                opt(r.estimated_size_cm),
                r.criticality.to_string(),
                r.assessment_latency_h.to_string(),
            ]
        }),
    )
}

pub fn monitor_csv(health: &[HealthCount]) -> String {
    render(
        &MONITOR_HEADER,
        health.iter().map(|h| [h.kind.as_str().to_string(), h.health.as_str().to_string(), h.count.to_string()]),
    )
}

/// One row per run, in run order.
pub fn summary_csv(results: &[MissionResult]) -> String {
    render(
        &SUMMARY_HEADER,
        results.iter().enumerate().map(|(i, r)| {
            let (reported, injected) = detection_counts(r);
            let detection = (injected > 0).then(|| 100.0 * reported as f64 / injected as f64);
            let n = r.zones.len().max(1) as f64;
            let coverage = 100.0 * r.zones.iter().map(|z| z.coverage).sum::<f64>() / n;
            let durations: Vec<f64> = r.zones.iter().filter_map(|z| z.duration_h).collect();
            let time = (!durations.is_empty()).then(|| durations.iter().sum::<f64>() / durations.len() as f64);
            [
                i.to_string(),
                r.seed.to_string(),
                r.uavs.to_string(),
                r.makespan_h.to_string(),
                r.completion_h.to_string(),
                injected.to_string(),
                reported.to_string(),
                opt(detection),
                coverage.to_string(),
                opt(time),
                r.aggregate.to_string(),
                r.messages.sent.to_string(),
                r.messages.delivered.to_string(),
                r.messages.retransmitted.to_string(),
                r.messages.dropped.to_string(),
                r.failures.len().to_string(),
            ]
        }),
    )
}
