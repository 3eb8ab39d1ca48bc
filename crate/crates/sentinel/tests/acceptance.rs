//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use farm_sentinel::load_scenario;
use farm_sentinel::sweep::run_sweep;
use farm_sentinel_core::fusion::{aggregate, assess_criticality, assessment_latency, criticality_anchor, or_fuse};
use farm_sentinel_core::metrics::compute_metrics;
use farm_sentinel_core::mission::{inject_failure, run_mission, MissionResult};
use farm_sentinel_core::rng::seeded;
use farm_sentinel_core::scenario::LinkSpec;
use farm_sentinel_core::sensor::{capture, detection_probability, DefectKind, GridDims, Modality, ObservationRecord};
use farm_sentinel_core::spatial::union_coverage_volume;
use farm_sentinel_core::structure::StructurePart;
use farm_sentinel_core::{FarmLayout, GroundTruthDefect, Point3, Scenario, SensorMatrix, SensorSpec, TurbineDims, TurbineZone, Waypoint};
use rand::Rng;

type Check<'a> = Box<dyn FnOnce() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"))
}

fn default_scenario() -> Scenario {
    load_scenario(&scenario_path("default-v112")).expect("bundled default loads")
}

/// Volume of the union of two unit spheres whose centers are `d` apart.
fn two_sphere_union(d: f64) -> f64 {
    let lens = PI * (4.0 + d) * (2.0 - d).powi(2) / 12.0;
    2.0 * 4.0 * PI / 3.0 - lens
}

fn unit_layout(centers: &[Point3]) -> FarmLayout {
    let zones = centers
        .iter()
        .enumerate()
        .map(|(i, c)| TurbineZone::new(i as u32 + 1, *c, 1.0, TurbineDims::V112).unwrap())
        .collect();
    FarmLayout::new(zones, "unit spheres").unwrap()
}

fn geometry() -> Outcome {
    let cases = [
        ("one sphere", unit_layout(&[Point3::new(0.0, 0.0, 0.0)]), 4.0 * PI / 3.0),
        ("two spheres at d = 1", unit_layout(&[Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0)]), two_sphere_union(1.0)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, layout, exact) in cases {
        let t = Instant::now();
        let est = union_coverage_volume(&layout, 1_000_000, 2024).unwrap();
        let dt = t.elapsed();
        let ok = (est.volume - exact).abs() <= 3.0 * est.stderr && dt < Duration::from_secs(5);
        pass &= ok;
        parts.push(format!("{name}: {:.5} vs {:.5} ± {:.5} in {:.2?}", est.volume, exact, est.stderr, dt));
    }
    outcome(pass, parts.join("; "))
}

fn random_matrix(rng: &mut impl Rng) -> SensorMatrix {
    let zone = TurbineZone::around_turbine(1, Point3::new(0.0, 0.0, 0.0), TurbineDims::V112, 10.0).unwrap();
    let dims = GridDims { azimuth_bands: rng.random_range(1..16), height_bands: rng.random_range(1..8) };
    let mut m = SensorMatrix::new(&zone, dims).unwrap();
    for _ in 0..rng.random_range(0..300) {
        let obs = ObservationRecord {
            defect_id: if rng.random::<f64>() < 0.05 { None } else { Some(rng.random_range(1..40)) },
            zone_id: 1,
            modality: if rng.random() { Modality::Visual } else { Modality::Thermal },
            confidence: rng.random(),
            capture_time: rng.random_range(0.0..7000.0),
            surface_point: Point3::new(0.0, 0.0, 0.0),
        };
        m.push_to_cell(rng.random_range(0..dims.azimuth_bands), rng.random_range(0..dims.height_bands), obs);
    }
    m
}

fn additivity() -> Outcome {
    let t = Instant::now();
    let mut rng = seeded(11);
    let mut exact = 0;
    for _ in 0..100 {
        let whole = random_matrix(&mut rng);
        let threshold = rng.random_range(0.05..0.95);
        // random row partition into up to five blocks
        let mut parts = Vec::new();
        let mut rest = whole.clone();
        while rest.dims.azimuth_bands > 1 && parts.len() < 4 && rng.random::<f64>() < 0.8 {
            let at = rng.random_range(1..rest.dims.azimuth_bands);
            let (head, tail) = rest.split_rows(at);
            parts.push(head);
            rest = tail;
        }
        parts.push(rest);
        let sum: f64 = parts.iter().map(|p| aggregate(p, threshold).value).sum();
        if sum == aggregate(&whole, threshold).value {
            exact += 1;
        }
    }
    let dt = t.elapsed();
    outcome(exact == 100 && dt < Duration::from_secs(1), format!("{exact}/100 exact in {dt:.2?}"))
}

fn fusion() -> Outcome {
    let pair = or_fuse([0.8, 0.6]);
    let mut rng = seeded(3);
    let mut violations = 0;
    for _ in 0..10_000 {
        let n = rng.random_range(1..8);
        let mut c: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let fused = or_fuse(c.iter().copied());
        let max = c.iter().copied().fold(0.0, f64::max);
        c.reverse();
        let reversed = or_fuse(c.iter().copied());
        c.rotate_left(rng.random_range(0..n));
        let rotated = or_fuse(c.iter().copied());
        if fused < max || fused != reversed || fused != rotated {
            violations += 1;
        }
    }
    outcome(pair == 0.92 && violations == 0, format!("or(0.8, 0.6) = {pair}; {violations} violations over 10^4 sets"))
}

fn sensor_rates() -> Outcome {
    let t = Instant::now();
    let mut cfg_rng = seeded(77);
    let waypoint = Waypoint { position: Point3::new(0.0, 0.0, 0.0), dwell: 0.0, look_at: Point3::new(1.0, 0.0, 0.0) };
    let mut worst: f64 = 0.0;
    let mut fails = 0;
    for k in 0..20 {
        let kind = [DefectKind::Crack, DefectKind::Corrosion, DefectKind::Overheating][cfg_rng.random_range(0..3)];
        let sensor = if cfg_rng.random() { SensorSpec::visual() } else { SensorSpec::thermal() };
        let truth = GroundTruthDefect {
            id: 1,
            zone_id: 1,
            component: kind.usual_part(),
            kind,
            size_cm: kind.is_sized().then(|| cfg_rng.random_range(0.5..12.0)),
            thermal_excess: (!kind.is_sized()).then(|| cfg_rng.random_range(10.0..30.0)),
            surface_point: Point3::new(10.0, 0.0, 0.0),
            extension: false,
        };
        let p = detection_probability(&sensor, &truth);
        let mut rng = seeded(1000 + k);
        let n = 10_000;
        let hits = (0..n).filter(|_| !capture(&waypoint, &sensor, &[truth], 0.0, &mut rng).is_empty()).count();
        let freq = hits as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        let z = if sigma > 0.0 { (freq - p).abs() / sigma } else if freq == p { 0.0 } else { f64::INFINITY };
        worst = worst.max(z);
        if z > 3.0 {
            fails += 1;
        }
    }
    let dt = t.elapsed();
    outcome(fails == 0 && dt < Duration::from_secs(30), format!("20 configurations, worst deviation {worst:.2} sigma, {dt:.2?}"))
}

fn coverage(r: &MissionResult) -> Outcome {
    let min = r.zones.iter().map(|z| z.coverage).fold(f64::INFINITY, f64::min);
    let all: Vec<String> = r.zones.iter().map(|z| format!("{:.4}", z.coverage)).collect();
    outcome(min >= 0.90, format!("per-zone coverage [{}], floor 0.90", all.join(", ")))
}

fn inspection_time(r: &MissionResult) -> Outcome {
    let durations: Vec<f64> = r.zones.iter().filter_map(|z| z.duration_h).collect();
    let in_band = durations.len() == r.zones.len() && durations.iter().all(|d| (1.5..=2.1).contains(d));

    let mut one = default_scenario();
    one.farm.zones.truncate(1);
    one.network.uplink = LinkSpec { latency_mean: 0.05, latency_jitter: 0.0, drop_prob: 0.0 };
    one.network.backhaul = LinkSpec { latency_mean: 0.02, latency_jitter: 0.0, drop_prob: 0.0 };
    let prepared = one.prepare().unwrap();
    let oracle_h = (prepared.paths[0].est_duration + 0.05 + 0.02) / 3600.0;
    let got = run_mission(&one).unwrap();
    let err = (got.completion_h - oracle_h).abs();
    outcome(
        in_band && err <= 1e-6,
        format!("per-WEU {:.4} h in [1.5, 2.1]; closed-form schedule error {err:.2e} h", durations.first().copied().unwrap_or(f64::NAN)),
    )
}

fn detection_band() -> Outcome {
    let t = Instant::now();
    let mut s = default_scenario();
    s.defects.count = 1000;
    let runs = run_sweep(&s, s.seeds.master, 1).unwrap();
    let results: Vec<MissionResult> = runs.into_iter().map(|r| r.result).collect();
    let row = compute_metrics(&results, &s.baseline).unwrap();
    let pct = row.detection_pct.map(|d| d.value).unwrap_or(f64::NAN);
    let dt = t.elapsed();
    outcome((88.0..=96.0).contains(&pct) && dt < Duration::from_secs(120), format!("detection {pct:.1}% of 1000 injected in {dt:.2?}"))
}

fn scores(kind: DefectKind, lo: f64, hi: f64) -> Vec<u8> {
    let steps = ((hi - lo) * 10.0).round() as usize;
    let mut out: Vec<u8> = (0..=steps)
        .map(|i| {
            let x = lo + i as f64 / 10.0;
            let (size, excess) = if kind.is_sized() { (Some(x), None) } else { (None, Some(x)) };
            assess_criticality(kind, kind.usual_part(), size, excess).unwrap()
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

fn criticality() -> Outcome {
    let corrosion = scores(DefectKind::Corrosion, 9.0, 14.0);
    let crack = scores(DefectKind::Crack, 4.5, 7.5);
    let (lo, _, hi, _) = criticality_anchor(DefectKind::Overheating);
    let mut overheating = scores(DefectKind::Overheating, lo, hi);
    overheating.push(assess_criticality(DefectKind::Overheating, StructurePart::Generator, None, None).unwrap());
    overheating.sort();
    overheating.dedup();
    let mut rng = seeded(8);
    let latencies_ok = (0..100_000).all(|_| (0.1..=0.2).contains(&assessment_latency(&mut rng)));
    let subset = |got: &[u8], allowed: &[u8]| got.iter().all(|g| allowed.contains(g));
    let pass = subset(&corrosion, &[8, 9]) && subset(&crack, &[6, 7]) && subset(&overheating, &[6, 7]) && latencies_ok;
    outcome(pass, format!("corrosion {corrosion:?}, crack {crack:?}, overheating {overheating:?}, latencies in [0.1, 0.2] h: {latencies_ok}"))
}

fn parallelism() -> Outcome {
    let free = load_scenario(&scenario_path("four-zone-parallel")).unwrap();
    let mut one = free.clone();
    one.fleet.uavs = 1;
    let (a, b) = (run_mission(&one).unwrap(), run_mission(&free).unwrap());
    let ratio = b.makespan_h / a.makespan_h;

    let mut t1 = one.clone();
    t1.fleet.transit_speed = 10.0;
    let mut t2 = free.clone();
    t2.fleet.transit_speed = 10.0;
    let with_transit = run_mission(&t2).unwrap().makespan_h / run_mission(&t1).unwrap().makespan_h;

    let same_weu = a.zones.iter().zip(&b.zones).all(|(x, y)| x.duration_h == y.duration_h);
    outcome(
        ratio == 0.5 && with_transit <= 0.55 && same_weu,
        format!("zero transit ratio {ratio}; with transit {with_transit:.4}; per-WEU identical: {same_weu}"),
    )
}

fn failover() -> Outcome {
    let mut s = load_scenario(&scenario_path("failover")).unwrap();
    s.failures.clear();
    s.network.central_modules = 2;
    s.network.uplink = LinkSpec { latency_jitter: 0.0, drop_prob: 0.0, ..s.network.uplink };
    s.network.backhaul = LinkSpec { latency_jitter: 0.0, drop_prob: 0.0, ..s.network.backhaul };
    let clean = run_mission(&s).unwrap();
    let horizon = clean.makespan_h * 3600.0;
    let mut rng = seeded(10);
    let mut same = 0;
    for _ in 0..20 {
        let at = rng.random_range(0.0..horizon);
        let r = run_mission(&inject_failure(&s, "central-1", at, None).unwrap()).unwrap();
        let ids = |r: &MissionResult| r.reports.iter().map(|d| d.defect_id).collect::<Vec<_>>();
        if r.reports.len() == clean.reports.len() && ids(&r) == ids(&clean) && r.aggregate == clean.aggregate {
            same += 1;
        }
    }
    outcome(same == 20, format!("{same}/20 failure times give the failure-free {} detections", clean.reports.len()))
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn cli(args: &[&str], out: &Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_farm-sentinel"))
        .env_remove("FARM_SENTINEL_OUT")
        .args(args)
        .arg("--out")
        .arg(out)
        .stdout(Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let names = ["default-v112", "single-zone", "four-zone-parallel", "failover", "lossy-network"];
    let mut identical = 0;
    let mut files = 0;
    for name in names {
        let scenario = scenario_path(name);
        let scenario = scenario.to_str().unwrap();
        let mut trees = Vec::new();
        for copy in ["a", "b"] {
            let out = tmp.path().join(name).join(copy);
            let ok = cli(&["simulate", "--scenario", scenario, "--runs", "3", "--seed", "17"], &out)
                && ["csv", "text", "plot-data"]
                    .iter()
                    .all(|f| cli(&["report", "--scenario", scenario, "--format", f], &out));
            let plan_out = tmp.path().join(name).join(format!("plan-{copy}"));
            let planned = cli(&["plan", "--scenario", scenario], &plan_out);
            trees.push((ok && planned, tree(&out), tree(&plan_out)));
        }
        let (a, b) = (&trees[0], &trees[1]);
        if a.0 && b.0 && a.1 == b.1 && a.2 == b.2 && !a.1.is_empty() {
            identical += 1;
            files += a.1.len() + a.2.len();
        }
    }
    outcome(identical == names.len(), format!("{identical}/{} scenarios byte-identical ({files} files compared)", names.len()))
}

fn main() {
    let started = Instant::now();
    let default_run = run_mission(&default_scenario()).expect("default mission runs");
    let criteria: Vec<(&str, Check)> = vec![
        ("geometry oracle equivalence", Box::new(geometry)),
        ("aggregate additivity", Box::new(additivity)),
        ("fusion identities", Box::new(fusion)),
        ("sensor-rate calibration", Box::new(sensor_rates)),
        ("coverage completeness", Box::new(|| coverage(&default_run))),
        ("inspection time band", Box::new(|| inspection_time(&default_run))),
        ("end-to-end detection band", Box::new(detection_band)),
        ("criticality mapping", Box::new(criticality)),
        ("parallelism", Box::new(parallelism)),
        ("failover", Box::new(failover)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {:<30} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of 11 passed in {:.1?}", 11 - failed, started.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
