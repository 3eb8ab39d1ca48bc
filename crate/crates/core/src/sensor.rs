//! Parametric visual/thermal sensor model and the per-zone sensor matrix.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;
use crate::planner::{InspectionPath, Waypoint};
use crate::rng::seeded;
use crate::spatial::{Point3, TurbineZone};
use crate::structure::StructurePart;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensorError {
    #[error("defect {id}: size is required for {kind:?}")]
    MissingSize { id: u32, kind: DefectKind },
    #[error("defect {id}: overheating defects carry no size")]
    UnexpectedSize { id: u32 },
    #[error("defect {id}: {kind:?} on {component:?} is not a tabulated pairing (set `extension` to allow)")]
    UnsupportedPairing { id: u32, kind: DefectKind, component: StructurePart },
    #[error("defect {id}: size must be positive and finite (got {size})")]
    BadSize { id: u32, size: f64 },
    #[error("sensor fov must be in (0, 180] degrees (got {0})")]
    BadFov(f64),
    #[error("sensor range must be positive (got {0})")]
    BadRange(f64),
    #[error("detection probability must be in [0, 1] (got {0})")]
    BadProbability(f64),
    #[error("grid needs at least one band in each dimension")]
    EmptyGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectKind {
    Crack,
    Corrosion,
    Overheating,
}

impl DefectKind {
    pub const ALL: [DefectKind; 3] = [DefectKind::Crack, DefectKind::Corrosion, DefectKind::Overheating];

    pub fn as_str(&self) -> &'static str {
        match self {
            DefectKind::Crack => "crack",
            DefectKind::Corrosion => "corrosion",
            DefectKind::Overheating => "overheating",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn is_sized(&self) -> bool {
        !matches!(self, DefectKind::Overheating)
    }

    /// Structure part this kind is tabulated against.
    pub fn usual_part(&self) -> StructurePart {
        match self {
            DefectKind::Crack => StructurePart::Blade,
            DefectKind::Corrosion => StructurePart::Tower,
            DefectKind::Overheating => StructurePart::Generator,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthDefect {
    pub id: u32,
    pub zone_id: u32,
    pub component: StructurePart,
    pub kind: DefectKind,
    /// Centimeters; absent for overheating.
    #[serde(default)]
    pub size_cm: Option<f64>,
    /// Kelvin above ambient; only meaningful for overheating.
    #[serde(default)]
    pub thermal_excess: Option<f64>,
    pub surface_point: Point3,
    /// Allows kind/component pairings outside the tabulated three.
    #[serde(default)]
    pub extension: bool,
}

impl GroundTruthDefect {
    pub fn validate(&self) -> Result<(), SensorError> {
        match (self.kind.is_sized(), self.size_cm) {
            (true, None) => return Err(SensorError::MissingSize { id: self.id, kind: self.kind }),
            (false, Some(_)) => return Err(SensorError::UnexpectedSize { id: self.id }),
            (true, Some(s)) if !(s > 0.0) || !s.is_finite() => {
                return Err(SensorError::BadSize { id: self.id, size: s })
            }
            _ => {}
        }
        if !self.extension && self.kind.usual_part() != self.component {
            return Err(SensorError::UnsupportedPairing { id: self.id, kind: self.kind, component: self.component });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Visual,
    Thermal,
}

impl Modality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Modality::Visual => "visual",
            Modality::Thermal => "thermal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "visual" => Some(Modality::Visual),
            "thermal" => Some(Modality::Thermal),
            _ => None,
        }
    }

    /// 1 for the modality suited to the defect kind, 0.25 otherwise.
    pub fn match_factor(&self, kind: DefectKind) -> f64 {
        match (self, kind) {
            (Modality::Thermal, DefectKind::Overheating) => 1.0,
            (Modality::Visual, DefectKind::Crack | DefectKind::Corrosion) => 1.0,
            _ => 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub modality: Modality,
    /// Full cone angle, degrees.
    pub fov: f64,
    pub range: f64,
    pub base_detect_prob: f64,
    #[serde(default)]
    pub noise_seed: u64,
}

impl SensorSpec {
    pub fn visual() -> Self {
        Self { modality: Modality::Visual, fov: 60.0, range: 30.0, base_detect_prob: 0.8, noise_seed: 1 }
    }

    pub fn thermal() -> Self {
        Self { modality: Modality::Thermal, fov: 60.0, range: 30.0, base_detect_prob: 0.9, noise_seed: 2 }
    }

    pub fn validate(&self) -> Result<(), SensorError> {
        if !(self.fov > 0.0 && self.fov <= 180.0) {
            return Err(SensorError::BadFov(self.fov));
        }
        if !(self.range > 0.0) || !self.range.is_finite() {
            return Err(SensorError::BadRange(self.range));
        }
        if !(0.0..=1.0).contains(&self.base_detect_prob) {
            return Err(SensorError::BadProbability(self.base_detect_prob));
        }
        Ok(())
    }

    /// Whether `point` lies within range and inside the view cone aimed from `position` at `look_at`.
    pub fn in_view(&self, position: Point3, look_at: Point3, point: Point3) -> bool {
        let to_point = point - position;
        let dist = to_point.norm();
        if dist > self.range {
            return false;
        }
        let look = look_at - position;
        let look_len = look.norm();
        if dist == 0.0 {
            return true;
        }
        if look_len == 0.0 {
            return false;
        }
        let cos_half = math::cos(math::to_radians(self.fov / 2.0));
        to_point.dot(look) >= cos_half * look_len * dist
    }
}

/// Per-capture detection probability: base × size factor × modality match.
pub fn detection_probability(sensor: &SensorSpec, defect: &GroundTruthDefect) -> f64 {
    let size_factor = match defect.size_cm {
        Some(size) if defect.kind.is_sized() => (size / 5.0).min(1.0),
        _ => 1.0,
    };
    sensor.base_detect_prob * size_factor * sensor.modality.match_factor(defect.kind)
}

pub const CONFIDENCE_NOISE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationRecord {
    pub defect_id: Option<u32>,
    pub zone_id: u32,
    pub modality: Modality,
    pub confidence: f64,
    /// Seconds of simulation time.
    pub capture_time: f64,
    /// Observed structure point; decides the sensor-matrix cell.
    pub surface_point: Point3,
}

/// One sensor frame at a waypoint.
///
/// Every defect inside the view cone consumes exactly two draws (detection,
/// then confidence noise) in input order, so streams stay aligned whether or
/// not a detection fires.
pub fn capture<R: Rng + ?Sized>(
    waypoint: &Waypoint,
    sensor: &SensorSpec,
    truths: &[GroundTruthDefect],
    time: f64,
    rng: &mut R,
) -> Vec<ObservationRecord> {
    let mut out = Vec::new();
    for truth in truths {
        if !sensor.in_view(waypoint.position, waypoint.look_at, truth.surface_point) {
            continue;
        }
        let p = detection_probability(sensor, truth);
        let u = rng.random::<f64>();
        let noise = (2.0 * rng.random::<f64>() - 1.0) * CONFIDENCE_NOISE;
        if u < p {
            out.push(ObservationRecord {
                defect_id: Some(truth.id),
                zone_id: truth.zone_id,
                modality: sensor.modality,
                confidence: (p + noise).clamp(0.0, 1.0),
                capture_time: time,
                surface_point: truth.surface_point,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDims {
    pub azimuth_bands: usize,
    pub height_bands: usize,
}

impl Default for GridDims {
    fn default() -> Self {
        Self { azimuth_bands: 12, height_bands: 6 }
    }
}

/// Target-area grid for one zone: azimuth bands around the tower axis
/// (counter-clockwise from +x) by height bands from the ground to blade-tip
/// height. Cells are stored azimuth-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorMatrix {
    pub zone_id: u32,
    pub dims: GridDims,
    /// Zone hub, used for azimuth.
    pub axis: Point3,
    pub ground_z: f64,
    pub structure_height: f64,
    cells: Vec<Vec<ObservationRecord>>,
}

impl SensorMatrix {
    pub fn new(zone: &TurbineZone, dims: GridDims) -> Result<Self, SensorError> {
        if dims.azimuth_bands == 0 || dims.height_bands == 0 {
            return Err(SensorError::EmptyGrid);
        }
        Ok(Self {
            zone_id: zone.id,
            dims,
            axis: zone.center,
            ground_z: zone.tower_base().z,
            structure_height: zone.dims.structure_height(),
            cells: vec![Vec::new(); dims.azimuth_bands * dims.height_bands],
        })
    }

    /// Zero-based (azimuth band, height band) holding `p`; heights outside the structure clamp to the end bands.
    pub fn cell_of(&self, p: Point3) -> (usize, usize) {
        let mut az = math::to_degrees(math::atan2(p.y - self.axis.y, p.x - self.axis.x));
        if az < 0.0 {
            az += 360.0;
        }
        let az_width = 360.0 / self.dims.azimuth_bands as f64;
        let i = (math::floor(az / az_width) as usize).min(self.dims.azimuth_bands - 1);
        let h_width = self.structure_height / self.dims.height_bands as f64;
        let h = math::floor((p.z - self.ground_z) / h_width);
        let j = if h < 0.0 { 0 } else { (h as usize).min(self.dims.height_bands - 1) };
        (i, j)
    }

    pub fn route(&mut self, obs: ObservationRecord) -> (usize, usize) {
        let (i, j) = self.cell_of(obs.surface_point);
        self.cells[i * self.dims.height_bands + j].push(obs);
        (i, j)
    }

    pub fn cell(&self, i: usize, j: usize) -> &[ObservationRecord] {
        &self.cells[i * self.dims.height_bands + j]
    }

    pub fn push_to_cell(&mut self, i: usize, j: usize, obs: ObservationRecord) {
        self.cells[i * self.dims.height_bands + j].push(obs);
    }

    /// Cells in azimuth-major order with their indices.
    pub fn iter_cells(&self) -> impl Iterator<Item = ((usize, usize), &[ObservationRecord])> + '_ {
        let h = self.dims.height_bands;
        self.cells.iter().enumerate().map(move |(k, c)| ((k / h, k % h), c.as_slice()))
    }

    pub fn observation_count(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// Splits at azimuth band `at`: rows `[0, at)` and `[at, N_d)`. Either side may be empty.
    pub fn split_rows(&self, at: usize) -> (SensorMatrix, SensorMatrix) {
        let at = at.min(self.dims.azimuth_bands);
        let h = self.dims.height_bands;
        let mk = |rows: usize, cells: Vec<Vec<ObservationRecord>>| SensorMatrix {
            dims: GridDims { azimuth_bands: rows, height_bands: h },
            cells,
            ..self.clone_header()
        };
        let head = self.cells[..at * h].to_vec();
        let tail = self.cells[at * h..].to_vec();
        (mk(at, head), mk(self.dims.azimuth_bands - at, tail))
    }

    fn clone_header(&self) -> SensorMatrix {
        SensorMatrix {
            zone_id: self.zone_id,
            dims: self.dims,
            axis: self.axis,
            ground_z: self.ground_z,
            structure_height: self.structure_height,
            cells: Vec::new(),
        }
    }
}

/// Times (seconds from path start) at which each waypoint's dwell ends and the frame is taken.
pub fn capture_times(path: &InspectionPath) -> Vec<f64> {
    let mut t = 0.0;
    let mut out = Vec::with_capacity(path.waypoints.len());
    for (i, w) in path.waypoints.iter().enumerate() {
        if i > 0 {
            t += path.segment_length(i - 1) / path.cruise_speed;
        }
        t += w.dwell;
        out.push(t);
    }
    out
}

/// Flies `path` with every sensor, capturing once per waypoint, and routes
/// each observation to its cell. Each sensor draws from its own generator
/// seeded with its `noise_seed`.
pub fn fill_matrix(
    zone: &TurbineZone,
    path: &InspectionPath,
    sensors: &[SensorSpec],
    truths: &[GroundTruthDefect],
    grid: GridDims,
) -> Result<SensorMatrix, SensorError> {
    let mut matrix = SensorMatrix::new(zone, grid)?;
    let mut rngs: Vec<_> = sensors.iter().map(|s| seeded(s.noise_seed)).collect();
    let zone_truths: Vec<GroundTruthDefect> = truths.iter().filter(|t| t.zone_id == zone.id).copied().collect();
    for (w, t) in path.waypoints.iter().zip(capture_times(path)) {
        for (sensor, rng) in sensors.iter().zip(rngs.iter_mut()) {
            for obs in capture(w, sensor, &zone_truths, t, rng) {
                matrix.route(obs);
            }
        }
    }
    Ok(matrix)
}
