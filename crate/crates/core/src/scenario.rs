//! Experiment description: farm, fleet, planner, network, defects, failures
//! and baseline constants, with whole-document validation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fusion::{criticality_anchor, DEFAULT_THRESHOLD};
use crate::metrics::BaselineModel;
use crate::planner::{assign_zones, plan_zone_path, FleetAssignment, InspectionPath, PlannerParams};
use crate::rng::stream_rng;
use crate::sensor::{DefectKind, GridDims, GroundTruthDefect, Modality, SensorSpec};
use crate::spatial::{enclosing_radius, FarmLayout, Point3, TurbineDims, TurbineZone};
use crate::structure::{StructurePart, TurbineStructure};

/// One problem found by [`Scenario::validate`], located by its field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl Issue {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub seeds: Seeds,
    pub farm: FarmSection,
    #[serde(default)]
    pub fleet: FleetSection,
    #[serde(default)]
    pub planner: PlannerParams,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub defects: DefectsSection,
    #[serde(default)]
    pub assessment: AssessmentSection,
    #[serde(default)]
    pub failures: Vec<FailureSpec>,
    #[serde(default)]
    pub baseline: BaselineModel,
    #[serde(default)]
    pub outputs: OutputsSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub master: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FarmSection {
    #[serde(default = "v112")]
    pub turbine: TurbineDims,
    /// Meters added around the turbine when a zone's radius is derived.
    #[serde(default = "default_clearance")]
    pub clearance: f64,
    #[serde(default = "default_frame_note")]
    pub frame_note: String,
    pub zones: Vec<ZoneSpec>,
}

fn v112() -> TurbineDims {
    TurbineDims::V112
}

fn default_clearance() -> f64 {
    10.0
}

fn default_frame_note() -> String {
    "local Cartesian frame; meters; x east, y north, z up; ground at z = 0".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneSpec {
    pub id: u32,
    /// Tower base position.
    pub base: [f64; 3],
    /// Overrides the radius derived from the turbine and clearance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FleetSection {
    pub uavs: u32,
    /// m/s between zones; `inf` makes transit free.
    pub transit_speed: f64,
    /// Carried by every UAV.
    pub sensors: Vec<SensorSpec>,
}

impl Default for FleetSection {
    fn default() -> Self {
        Self { uavs: 1, transit_speed: 10.0, sensors: vec![SensorSpec::visual(), SensorSpec::thermal()] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSpec {
    /// Seconds.
    pub latency_mean: f64,
    /// Half-width of the uniform latency jitter, seconds.
    pub latency_jitter: f64,
    pub drop_prob: f64,
}

impl Default for LinkSpec {
    fn default() -> Self {
        Self { latency_mean: 0.05, latency_jitter: 0.0, drop_prob: 0.0 }
    }
}

impl LinkSpec {
    pub const LOSSLESS: LinkSpec = LinkSpec { latency_mean: 0.0, latency_jitter: 0.0, drop_prob: 0.0 };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    /// UAV to mobile control.
    pub uplink: LinkSpec,
    /// Mobile control to each central module.
    pub backhaul: LinkSpec,
    pub central_modules: u32,
    pub max_retries: u32,
    /// Seconds between a detected drop and the resend.
    pub retry_backoff: f64,
    pub heartbeat_interval: f64,
    /// Seconds from a detected central failure to the switch.
    pub failover_delay: f64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            uplink: LinkSpec { latency_mean: 0.05, latency_jitter: 0.02, drop_prob: 0.0 },
            backhaul: LinkSpec { latency_mean: 0.02, latency_jitter: 0.01, drop_prob: 0.0 },
            central_modules: 2,
            max_retries: 3,
            retry_backoff: 2.0,
            heartbeat_interval: 10.0,
            failover_delay: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KindMix {
    #[serde(default)]
    pub crack: f64,
    #[serde(default)]
    pub corrosion: f64,
    #[serde(default)]
    pub overheating: f64,
}

impl KindMix {
    fn weight(&self, kind: DefectKind) -> f64 {
        match kind {
            DefectKind::Crack => self.crack,
            DefectKind::Corrosion => self.corrosion,
            DefectKind::Overheating => self.overheating,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefectsSection {
    /// Defects drawn by the generator, in addition to `list`.
    pub count: u32,
    /// Kind weights. Without a mix, defects are spread uniformly over the
    /// structure surface and the part they land on fixes their kind.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mix: Option<KindMix>,
    pub list: Vec<DefectSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectSpec {
    pub id: u32,
    pub zone: u32,
    pub kind: DefectKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<StructurePart>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_cm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermal_excess: Option<f64>,
    pub position: [f64; 3],
    #[serde(default)]
    pub extension: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssessmentSection {
    pub threshold: f64,
    pub azimuth_bands: usize,
    pub height_bands: usize,
    pub coverage_samples: u32,
}

impl Default for AssessmentSection {
    fn default() -> Self {
        let grid = GridDims::default();
        Self {
            threshold: DEFAULT_THRESHOLD,
            azimuth_bands: grid.azimuth_bands,
            height_bands: grid.height_bands,
            coverage_samples: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureSpec {
    /// `uav-<i>`, `uav-<i>/<modality>`, `mobile-control` or `central-<j>`.
    pub component: String,
    /// Seconds from mission start.
    pub at: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recover_at: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputsSection {
    pub paths: bool,
    pub events: bool,
    pub matrices: bool,
}

impl Default for OutputsSection {
    fn default() -> Self {
        Self { paths: true, events: true, matrices: false }
    }
}

/// Failure-injectable component, resolved from its name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    /// Zero-based UAV index.
    Uav(usize),
    UavSensor(usize, usize),
    MobileControl,
    /// Zero-based central module index.
    Central(usize),
}

pub fn uav_name(index: usize) -> String {
    format!("uav-{}", index + 1)
}

pub fn central_name(index: usize) -> String {
    format!("central-{}", index + 1)
}

pub const MOBILE_CONTROL: &str = "mobile-control";

/// Everything the mission engine needs, resolved from a valid scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub master_seed: u64,
    pub layout: FarmLayout,
    /// Indexed by zone id − 1.
    pub paths: Vec<InspectionPath>,
    pub assignment: FleetAssignment,
    pub truths: Vec<GroundTruthDefect>,
    pub sensors: Vec<SensorSpec>,
    pub network: NetworkSection,
    pub grid: GridDims,
    pub threshold: f64,
    pub coverage_samples: u32,
    pub transit_speed: f64,
    pub failures: Vec<(Target, f64, Option<f64>)>,
}

impl Scenario {
    /// Minimal valid scenario: one V112 turbine at the origin, one UAV, no defects.
    pub fn single_turbine(seed: u64) -> Self {
        Scenario {
            name: "single".into(),
            seeds: Seeds { master: seed },
            farm: FarmSection {
                turbine: TurbineDims::V112,
                clearance: default_clearance(),
                frame_note: default_frame_note(),
                zones: vec![ZoneSpec { id: 1, base: [0.0; 3], radius: None }],
            },
            fleet: FleetSection::default(),
            planner: PlannerParams::default(),
            network: NetworkSection::default(),
            defects: DefectsSection::default(),
            assessment: AssessmentSection::default(),
            failures: Vec::new(),
            baseline: BaselineModel::default(),
            outputs: OutputsSection::default(),
        }
    }

    /// `count` V112 turbines along +x, `spacing` meters apart.
    pub fn line_farm(seed: u64, count: u32, spacing: f64) -> Self {
        let mut s = Self::single_turbine(seed);
        s.farm.zones = (0..count)
            .map(|i| ZoneSpec { id: i + 1, base: [spacing * i as f64, 0.0, 0.0], radius: None })
            .collect();
        s
    }

    pub fn with_seed(&self, master: u64) -> Self {
        let mut s = self.clone();
        s.seeds.master = master;
        s
    }

    pub fn resolve_target(&self, name: &str) -> Option<Target> {
        if name == MOBILE_CONTROL {
            return Some(Target::MobileControl);
        }
        if let Some(rest) = name.strip_prefix("central-") {
            let j: usize = rest.parse().ok()?;
            return (j >= 1 && j <= self.network.central_modules as usize).then(|| Target::Central(j - 1));
        }
        let rest = name.strip_prefix("uav-")?;
        let (idx, sensor) = match rest.split_once('/') {
            Some((i, s)) => (i, Some(s)),
            None => (rest, None),
        };
        let i: usize = idx.parse().ok()?;
        if i == 0 || i > self.fleet.uavs as usize {
            return None;
        }
        match sensor {
            None => Some(Target::Uav(i - 1)),
            Some(m) => {
                let modality = Modality::parse(m)?;
                let k = self.fleet.sensors.iter().position(|s| s.modality == modality)?;
                Some(Target::UavSensor(i - 1, k))
            }
        }
    }

    /// Every problem in the document, or nothing.
    pub fn validate(&self) -> Result<(), Vec<Issue>> {
        self.prepare().map(|_| ())
    }

    /// Validates and resolves layout, paths, assignment and ground truth.
    pub fn prepare(&self) -> Result<Prepared, Vec<Issue>> {
        let mut issues = Vec::new();
        let layout = self.check_farm(&mut issues);
        self.check_fleet(&mut issues);
        self.check_network(&mut issues);
        self.check_assessment(&mut issues);
        self.check_failures(&mut issues);
        for (path, message) in self.baseline.problems() {
            issues.push(Issue::new(format!("baseline.{path}"), message));
        }
        let planner_ok = self.check_planner(&mut issues);
        self.check_defect_section(layout.as_ref(), &mut issues);

        let mut paths = Vec::new();
        if let (Some(layout), true) = (&layout, planner_ok) {
            for (i, zone) in layout.zones().iter().enumerate() {
                match plan_zone_path(zone, &self.planner) {
                    Ok(p) => paths.push(p),
                    Err(e) => issues.push(Issue::new(format!("farm.zones[{i}]"), format!("zone {}: {e}", zone.id))),
                }
            }
        }
        if !issues.is_empty() {
            return Err(issues);
        }
        let layout = layout.expect("no issues implies a layout");
        let durations: Vec<f64> = paths.iter().map(|p| p.est_duration).collect();
        let assignment = assign_zones(&layout, self.fleet.uavs as usize, &durations, self.fleet.transit_speed)
            .map_err(|e| vec![Issue::new("fleet", e.to_string())])?;
        let truths = self.ground_truth(&layout);
        let failures = self
            .failures
            .iter()
            .map(|f| (self.resolve_target(&f.component).expect("checked"), f.at, f.recover_at))
            .collect();
        Ok(Prepared {
            master_seed: self.seeds.master,
            layout,
            paths,
            assignment,
            truths,
            sensors: self.fleet.sensors.clone(),
            network: self.network,
            grid: GridDims { azimuth_bands: self.assessment.azimuth_bands, height_bands: self.assessment.height_bands },
            threshold: self.assessment.threshold,
            coverage_samples: self.assessment.coverage_samples,
            transit_speed: self.fleet.transit_speed,
            failures,
        })
    }

    fn check_farm(&self, issues: &mut Vec<Issue>) -> Option<FarmLayout> {
        let before = issues.len();
        let farm = &self.farm;
        if let Err(e) = farm.turbine.validate() {
            issues.push(Issue::new("farm.turbine", e.to_string()));
        }
        if !(farm.clearance >= 0.0) || !farm.clearance.is_finite() {
            issues.push(Issue::new("farm.clearance", format!("must be a finite non-negative length (got {})", farm.clearance)));
        }
        if farm.zones.is_empty() {
            issues.push(Issue::new("farm.zones", "at least one zone is required"));
        }
        for (i, z) in farm.zones.iter().enumerate() {
            let path = format!("farm.zones[{i}]");
            if z.id as usize != i + 1 {
                issues.push(Issue::new(format!("{path}.id"), format!("zone ids must run 1, 2, ... in order; expected {} (got {})", i + 1, z.id)));
            }
            if z.base.iter().any(|v| !v.is_finite()) {
                issues.push(Issue::new(format!("{path}.base"), format!("zone {}: coordinates must be finite", z.id)));
            }
            if let Some(r) = z.radius {
                if !(r > 0.0) || !r.is_finite() {
                    issues.push(Issue::new(format!("{path}.radius"), format!("zone {}: radius must be positive (got {r})", z.id)));
                }
            }
        }
        if issues.len() > before {
            return None;
        }
        let derived = enclosing_radius(&farm.turbine, farm.clearance).ok()?;
        let zones = farm
            .zones
            .iter()
            .map(|z| {
                let base = Point3::new(z.base[0], z.base[1], z.base[2]);
                let center = base + Point3::new(0.0, 0.0, farm.turbine.tower_height);
                TurbineZone { id: z.id, center, radius: z.radius.unwrap_or(derived), dims: farm.turbine }
            })
            .collect();
        match FarmLayout::new(zones, farm.frame_note.clone()) {
            Ok(l) => Some(l),
            Err(e) => {
                issues.push(Issue::new("farm", e.to_string()));
                None
            }
        }
    }

    fn check_fleet(&self, issues: &mut Vec<Issue>) {
        let fleet = &self.fleet;
        if fleet.uavs == 0 {
            issues.push(Issue::new("fleet.uavs", "at least one UAV is required"));
        }
        if !(fleet.transit_speed > 0.0) {
            issues.push(Issue::new("fleet.transit_speed", format!("must be positive (got {})", fleet.transit_speed)));
        }
        if fleet.sensors.is_empty() {
            issues.push(Issue::new("fleet.sensors", "at least one sensor is required"));
        }
        for (i, s) in fleet.sensors.iter().enumerate() {
            if let Err(e) = s.validate() {
                issues.push(Issue::new(format!("fleet.sensors[{i}]"), e.to_string()));
            }
            if fleet.sensors[..i].iter().any(|o| o.modality == s.modality) {
                issues.push(Issue::new(format!("fleet.sensors[{i}].modality"), format!("{} listed twice", s.modality.as_str())));
            }
        }
    }

    fn check_planner(&self, issues: &mut Vec<Issue>) -> bool {
        // geometry-independent checks; the rest surface when paths are planned
        let p = &self.planner;
        let before = issues.len();
        if p.ring_count < 2 {
            issues.push(Issue::new("planner.ring_count", format!("must be at least 2 (got {})", p.ring_count)));
        }
        if p.points_per_ring < 4 {
            issues.push(Issue::new("planner.points_per_ring", format!("must be at least 4 (got {})", p.points_per_ring)));
        }
        if !(p.cruise_speed > 0.0) || !p.cruise_speed.is_finite() {
            issues.push(Issue::new("planner.cruise_speed", format!("must be positive and finite (got {})", p.cruise_speed)));
        }
        if !(p.dwell >= 0.0) || !p.dwell.is_finite() {
            issues.push(Issue::new("planner.dwell", format!("must be non-negative (got {})", p.dwell)));
        }
        if !(p.standoff > 0.0) || !p.standoff.is_finite() {
            issues.push(Issue::new("planner.standoff", format!("must be positive (got {})", p.standoff)));
        }
        if !(p.rotor_ring_fraction > 0.0 && p.rotor_ring_fraction <= 1.0) {
            issues.push(Issue::new("planner.rotor_ring_fraction", format!("must lie in (0, 1] (got {})", p.rotor_ring_fraction)));
        }
        issues.len() == before
    }

    fn check_network(&self, issues: &mut Vec<Issue>) {
        let n = &self.network;
        for (name, link) in [("uplink", n.uplink), ("backhaul", n.backhaul)] {
            if !(link.latency_mean >= 0.0) || !link.latency_mean.is_finite() {
                issues.push(Issue::new(format!("network.{name}.latency_mean"), format!("must be non-negative (got {})", link.latency_mean)));
            }
            if !(link.latency_jitter >= 0.0) || !(link.latency_jitter <= link.latency_mean) {
                issues.push(Issue::new(
                    format!("network.{name}.latency_jitter"),
                    format!("must lie in [0, latency_mean] (got {})", link.latency_jitter),
                ));
            }
            if !(link.drop_prob >= 0.0 && link.drop_prob < 1.0) {
                issues.push(Issue::new(format!("network.{name}.drop_prob"), format!("must lie in [0, 1) (got {})", link.drop_prob)));
            }
        }
        if n.central_modules == 0 {
            issues.push(Issue::new("network.central_modules", "at least one central module is required"));
        }
        if n.max_retries > 16 {
            issues.push(Issue::new("network.max_retries", format!("at most 16 (got {})", n.max_retries)));
        }
        for (name, v) in [("retry_backoff", n.retry_backoff), ("failover_delay", n.failover_delay)] {
            if !(v >= 0.0) || !v.is_finite() {
                issues.push(Issue::new(format!("network.{name}"), format!("must be non-negative (got {v})")));
            }
        }
        if !(n.heartbeat_interval > 0.0) || !n.heartbeat_interval.is_finite() {
            issues.push(Issue::new("network.heartbeat_interval", format!("must be positive (got {})", n.heartbeat_interval)));
        }
    }

    fn check_assessment(&self, issues: &mut Vec<Issue>) {
        let a = &self.assessment;
        if !(0.0..=1.0).contains(&a.threshold) {
            issues.push(Issue::new("assessment.threshold", format!("must lie in [0, 1] (got {})", a.threshold)));
        }
        if a.azimuth_bands == 0 || a.azimuth_bands > 3600 {
            issues.push(Issue::new("assessment.azimuth_bands", format!("must lie in [1, 3600] (got {})", a.azimuth_bands)));
        }
        if a.height_bands == 0 || a.height_bands > 1000 {
            issues.push(Issue::new("assessment.height_bands", format!("must lie in [1, 1000] (got {})", a.height_bands)));
        }
        if a.coverage_samples < 100 {
            issues.push(Issue::new("assessment.coverage_samples", format!("must be at least 100 (got {})", a.coverage_samples)));
        }
    }

    fn check_failures(&self, issues: &mut Vec<Issue>) {
        for (i, f) in self.failures.iter().enumerate() {
            let path = format!("failures[{i}]");
            if self.resolve_target(&f.component).is_none() {
                issues.push(Issue::new(format!("{path}.component"), format!("unknown component `{}`", f.component)));
            }
            if !(f.at >= 0.0) || !f.at.is_finite() {
                issues.push(Issue::new(format!("{path}.at"), format!("must be a non-negative time (got {})", f.at)));
            }
            if let Some(r) = f.recover_at {
                if !(r > f.at) || !r.is_finite() {
                    issues.push(Issue::new(format!("{path}.recover_at"), format!("must come after `at` (got {r})")));
                }
            }
        }
    }

    fn check_defect_section(&self, layout: Option<&FarmLayout>, issues: &mut Vec<Issue>) {
        let d = &self.defects;
        if d.count > 1_000_000 {
            issues.push(Issue::new("defects.count", format!("at most 1000000 (got {})", d.count)));
        }
        if let Some(mix) = d.mix {
            let weights = DefectKind::ALL.map(|k| mix.weight(k));
            if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) || !(weights.iter().sum::<f64>() > 0.0) {
                issues.push(Issue::new("defects.mix", "weights must be non-negative with a positive sum"));
            }
        }
        for (i, spec) in d.list.iter().enumerate() {
            let path = format!("defects.list[{i}]");
            if spec.id == 0 {
                issues.push(Issue::new(format!("{path}.id"), "ids start at 1"));
            }
            if d.list[..i].iter().any(|o| o.id == spec.id) {
                issues.push(Issue::new(format!("{path}.id"), format!("duplicate defect id {}", spec.id)));
            }
            let zone_ok = match layout {
                Some(l) => l.zone(spec.zone).is_some(),
                None => spec.zone >= 1 && spec.zone as usize <= self.farm.zones.len(),
            };
            if !zone_ok {
                issues.push(Issue::new(format!("{path}.zone"), format!("defect {} references unknown zone {}", spec.id, spec.zone)));
            }
            if spec.position.iter().any(|v| !v.is_finite()) {
                issues.push(Issue::new(format!("{path}.position"), "coordinates must be finite"));
            }
            if let Some(t) = spec.thermal_excess {
                if !(t > 0.0) || !t.is_finite() {
                    issues.push(Issue::new(format!("{path}.thermal_excess"), format!("must be positive (got {t})")));
                }
            }
            if let Err(e) = spec.to_truth().validate() {
                issues.push(Issue::new(path, e.to_string()));
            }
        }
    }

    /// Explicit defects first, then `count` generated ones numbered after the largest explicit id.
    pub fn ground_truth(&self, layout: &FarmLayout) -> Vec<GroundTruthDefect> {
        let mut out: Vec<GroundTruthDefect> = self.defects.list.iter().map(DefectSpec::to_truth).collect();
        let first = out.iter().map(|d| d.id).max().unwrap_or(0) + 1;
        let mut rng = stream_rng(self.seeds.master, "defects");
        for id in first..first + self.defects.count {
            let zone = &layout.zones()[rng.random_range(0..layout.len())];
            out.push(generate_defect(id, zone, self.defects.mix.as_ref(), &mut rng));
        }
        out
    }
}

impl DefectSpec {
    pub fn to_truth(&self) -> GroundTruthDefect {
        GroundTruthDefect {
            id: self.id,
            zone_id: self.zone,
            component: self.component.unwrap_or_else(|| self.kind.usual_part()),
            kind: self.kind,
            size_cm: self.size_cm,
            thermal_excess: self.thermal_excess,
            surface_point: Point3::new(self.position[0], self.position[1], self.position[2]),
            extension: self.extension,
        }
    }
}

fn kind_on(part: StructurePart) -> DefectKind {
    match part {
        StructurePart::Blade => DefectKind::Crack,
        StructurePart::Tower => DefectKind::Corrosion,
        StructurePart::Generator => DefectKind::Overheating,
    }
}

/// One generated defect: a surface point on the kind's part, and a size (or
/// thermal excess) uniform over the kind's criticality band.
pub fn generate_defect<R: Rng + ?Sized>(id: u32, zone: &TurbineZone, mix: Option<&KindMix>, rng: &mut R) -> GroundTruthDefect {
    let structure = TurbineStructure::of(zone);
    let (kind, point) = match mix {
        None => {
            let p = structure.sample_surface(rng);
            (kind_on(p.part), p)
        }
        Some(mix) => {
            let total: f64 = DefectKind::ALL.iter().map(|k| mix.weight(*k)).sum();
            let mut u = rng.random::<f64>() * total;
            let mut kind = DefectKind::Overheating;
            for k in DefectKind::ALL {
                if u < mix.weight(k) {
                    kind = k;
                    break;
                }
                u -= mix.weight(k);
            }
            (kind, structure.sample_part(kind.usual_part(), rng))
        }
    };
    let (lo, _, hi, _) = criticality_anchor(kind);
    let magnitude = lo + (hi - lo) * rng.random::<f64>();
    let (size_cm, thermal_excess) = if kind.is_sized() { (Some(magnitude), None) } else { (None, Some(magnitude)) };
    GroundTruthDefect {
        id,
        zone_id: zone.id,
        component: point.part,
        kind,
        size_cm,
        thermal_excess,
        surface_point: point.position,
        extension: false,
    }
}
