//! Inspection path planning, position prediction, surface coverage scoring
//! and zone-to-UAV assignment.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;
use crate::rng::seeded;
use crate::spatial::{zone_contains, FarmLayout, Point3, TurbineZone};
use crate::structure::{sees, TurbineStructure, TOWER_RADIUS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("standoff {standoff} m must lie in (0, zone radius {radius} m)")]
    BadStandoff { standoff: f64, radius: f64 },
    #[error("ring_count must be at least 2 (got {0})")]
    TooFewRings(u32),
    #[error("points_per_ring must be at least 4 (got {0})")]
    TooFewPointsPerRing(u32),
    #[error("rotor ring fraction must lie in (0, 1] (got {0})")]
    BadRotorRing(f64),
    #[error("cruise speed must be positive (got {0})")]
    BadSpeed(f64),
    #[error("dwell must be non-negative (got {0})")]
    BadDwell(f64),
    #[error("waypoint {index} at distance {distance:.3} m leaves zone {zone} (radius {radius} m)")]
    WaypointOutsideZone { zone: u32, index: usize, distance: f64, radius: f64 },
    #[error("time {t} s outside the path schedule [0, {duration}] s")]
    TimeOutOfRange { t: f64, duration: f64 },
    #[error("expected {expected} per-zone durations, got {got}")]
    DurationCount { expected: usize, got: usize },
    #[error("at least one UAV is required")]
    NoUavs,
    #[error("transit speed must be positive (got {0})")]
    BadTransitSpeed(f64),
}


#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerParams {
    /// Horizontal distance from the tower surface (and from the rotor plane), meters.
    pub standoff: f64,
    pub ring_count: u32,
    pub points_per_ring: u32,
    /// m/s
    pub cruise_speed: f64,
    /// Seconds spent at every waypoint.
    pub dwell: f64,
    /// Radius of the rotor-face ring as a share of the blade tip radius.
    pub rotor_ring_fraction: f64,
}

impl Default for PlannerParams {
    /// Calibrated on a V112 zone: about 1.85 h of flight and 0.92 surface coverage.
    /// The rotor ring at 0.6 of the tip radius leaves the outer blade span
    /// partly out of sensor range.
    fn default() -> Self {
        Self { standoff: 15.0, ring_count: 30, points_per_ring: 24, cruise_speed: 5.0, dwell: 8.0, rotor_ring_fraction: 0.6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub position: Point3,
    pub dwell: f64,
    pub look_at: Point3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InspectionPath {
    pub zone_id: u32,
    pub waypoints: Vec<Waypoint>,
    /// `legs[i]` is the flown distance from waypoint `i` to `i + 1`.
    pub legs: Vec<f64>,
    pub total_length: f64,
    pub est_duration: f64,
    pub cruise_speed: f64,
}

impl InspectionPath {
    pub fn from_waypoints(zone_id: u32, waypoints: Vec<Waypoint>, cruise_speed: f64) -> Self {
        let legs = waypoints.windows(2).map(|w| w[0].position.distance(w[1].position)).collect();
        Self::with_legs(zone_id, waypoints, legs, cruise_speed)
    }

    fn with_legs(zone_id: u32, waypoints: Vec<Waypoint>, legs: Vec<f64>, cruise_speed: f64) -> Self {
        let total_length = legs.iter().sum::<f64>();
        let dwell: f64 = waypoints.iter().map(|w| w.dwell).sum();
        let est_duration = if waypoints.is_empty() { 0.0 } else { total_length / cruise_speed + dwell };
        Self { zone_id, waypoints, legs, total_length, est_duration, cruise_speed }
    }

    pub fn segment_length(&self, i: usize) -> f64 {
        self.legs[i]
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }
}

/// Stacked horizontal rings around the tower axis from the ground to blade-tip
/// height, followed by one ring in front of the rotor face.
///
/// Ring `k` of `n` flies at the middle of the `k`-th of `n` equal height bands,
/// so the rings line up with the sensor matrix height bands.
pub fn plan_zone_path(zone: &TurbineZone, params: &PlannerParams) -> Result<InspectionPath, PlanError> {
    if !(params.standoff > 0.0 && params.standoff < zone.radius) {
        return Err(PlanError::BadStandoff { standoff: params.standoff, radius: zone.radius });
    }
    if params.ring_count < 2 {
        return Err(PlanError::TooFewRings(params.ring_count));
    }
    if params.points_per_ring < 4 {
        return Err(PlanError::TooFewPointsPerRing(params.points_per_ring));
    }
    if !(params.cruise_speed > 0.0) || !params.cruise_speed.is_finite() {
        return Err(PlanError::BadSpeed(params.cruise_speed));
    }
    if !(params.dwell >= 0.0) || !params.dwell.is_finite() {
        return Err(PlanError::BadDwell(params.dwell));
    }
    if !(params.rotor_ring_fraction > 0.0 && params.rotor_ring_fraction <= 1.0) {
        return Err(PlanError::BadRotorRing(params.rotor_ring_fraction));
    }

    let structure = TurbineStructure::of(zone);
    let height = zone.dims.structure_height();
    let ring_radius = TOWER_RADIUS + params.standoff;
    let ppr = params.points_per_ring as usize;
    let rings = params.ring_count as usize;
    // offsets from the hub; leg lengths come from these so that congruent
    // zones get bit-identical schedules wherever they stand
    let mut offsets = Vec::with_capacity(rings * ppr + ppr);
    for k in 0..rings {
        let dz = (k as f64 + 0.5) * height / rings as f64 - zone.dims.tower_height;
        for m in 0..ppr {
            let theta = 2.0 * math::PI * m as f64 / ppr as f64;
            offsets.push(Point3::new(ring_radius * math::cos(theta), ring_radius * math::sin(theta), dz));
        }
    }
    let rotor_radius = params.rotor_ring_fraction * structure.tip_radius;
    for m in 0..ppr {
        let phi = 2.0 * math::PI * m as f64 / ppr as f64;
        offsets.push(Point3::new(params.standoff, rotor_radius * math::sin(phi), rotor_radius * math::cos(phi)));
    }
    let legs = offsets.windows(2).map(|w| w[0].distance(w[1])).collect();
    let waypoints: Vec<Waypoint> = offsets
        .iter()
        .map(|&o| {
            let position = zone.center + o;
            Waypoint { position, dwell: params.dwell, look_at: structure.nearest_axis_point(position) }
        })
        .collect();

    for (index, w) in waypoints.iter().enumerate() {
        if !zone_contains(zone, w.position) {
            return Err(PlanError::WaypointOutsideZone {
                zone: zone.id,
                index,
                distance: w.position.distance(zone.center),
                radius: zone.radius,
            });
        }
    }
    Ok(InspectionPath::with_legs(zone.id, waypoints, legs, params.cruise_speed))
}

/// Position at time `t` along the path: dwell at each waypoint, then fly the
/// next segment at cruise speed.
pub fn predict_position(path: &InspectionPath, t: f64) -> Result<Point3, PlanError> {
    if path.waypoints.is_empty() || !(t >= 0.0 && t <= path.est_duration) {
        return Err(PlanError::TimeOutOfRange { t, duration: path.est_duration });
    }
    let mut remaining = t;
    let last = path.waypoints.len() - 1;
    for i in 0..last {
        let w = &path.waypoints[i];
        if remaining <= w.dwell {
            return Ok(w.position);
        }
        remaining -= w.dwell;
        let len = path.segment_length(i);
        let travel = len / path.cruise_speed;
        if remaining < travel {
            let frac = remaining / travel;
            let next = path.waypoints[i + 1].position;
            return Ok(w.position + (next - w.position) * frac);
        }
        remaining -= travel;
    }
    Ok(path.waypoints[last].position)
}

/// Fraction of sampled structure-surface points seen by at least one waypoint
/// within `sensor_range` and the `sensor_fov` cone. The surface samples depend
/// only on the zone and `seed`, never on the path.
pub fn surface_coverage_score(
    path: &InspectionPath,
    zone: &TurbineZone,
    sensor_fov: f64,
    sensor_range: f64,
    surface_samples: u32,
    seed: u64,
) -> f64 {
    surface_coverage_of(&path.waypoints, zone, sensor_fov, sensor_range, surface_samples, seed)
}

pub fn surface_coverage_of(
    waypoints: &[Waypoint],
    zone: &TurbineZone,
    sensor_fov: f64,
    sensor_range: f64,
    surface_samples: u32,
    seed: u64,
) -> f64 {
    if surface_samples == 0 {
        return 0.0;
    }
    let structure = TurbineStructure::of(zone);
    let cos_half = math::cos(math::to_radians(sensor_fov / 2.0));
    let mut rng = seeded(seed);
    let mut seen = 0u32;
    for _ in 0..surface_samples {
        let sample = structure.sample_surface(&mut rng);
        if waypoints
            .iter()
            .any(|w| sees(&structure, w.position, w.look_at, cos_half, sensor_range, &sample))
        {
            seen += 1;
        }
    }
    seen as f64 / surface_samples as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetAssignment {
    /// `routes[u]` lists the zone ids flown by UAV `u + 1`, in flight order.
    pub routes: Vec<Vec<u32>>,
    /// Seconds of inspection plus inter-zone transit per UAV.
    pub loads: Vec<f64>,
    pub makespan: f64,
}

impl FleetAssignment {
    pub fn uav_of(&self, zone_id: u32) -> Option<usize> {
        self.routes.iter().position(|r| r.contains(&zone_id))
    }
}

/// Seconds to fly between two zone centers; zero when `transit_speed` is infinite.
pub fn transit_time(a: &TurbineZone, b: &TurbineZone, transit_speed: f64) -> f64 {
    if transit_speed.is_infinite() {
        0.0
    } else {
        a.center.distance(b.center) / transit_speed
    }
}

fn route_load(layout: &FarmLayout, route: &[u32], durations: &[f64], transit_speed: f64) -> f64 {
    let work: f64 = route.iter().map(|&z| durations[z as usize - 1]).sum();
    let transit: f64 = route
        .windows(2)
        .map(|w| transit_time(layout.zone(w[0]).unwrap(), layout.zone(w[1]).unwrap(), transit_speed))
        .sum();
    work + transit
}

fn lpt(layout: &FarmLayout, machines: usize, durations: &[f64], transit_speed: f64) -> FleetAssignment {
    let mut order: Vec<u32> = (1..=layout.len() as u32).collect();
    // longest first; ties by lowest zone id
    order.sort_by(|&a, &b| durations[b as usize - 1].total_cmp(&durations[a as usize - 1]).then(a.cmp(&b)));
    let mut work = vec![0.0f64; machines];
    let mut routes = vec![Vec::new(); machines];
    for z in order {
        let mut best = 0;
        for u in 1..machines {
            if work[u] < work[best] {
                best = u;
            }
        }
        work[best] += durations[z as usize - 1];
        routes[best].push(z);
    }
    for r in &mut routes {
        r.sort_unstable();
    }
    let loads: Vec<f64> = routes.iter().map(|r| route_load(layout, r, durations, transit_speed)).collect();
    let makespan = loads.iter().copied().fold(0.0, f64::max);
    FleetAssignment { routes, loads, makespan }
}

/// Longest-processing-time assignment of zones to `n_uavs` UAVs.
///
/// Each UAV flies its zones in id order. LPT alone can get worse when a UAV
/// is added, so the best LPT schedule over `1..=n_uavs` active UAVs is kept
/// (fewest UAVs on ties); the makespan is then non-increasing in `n_uavs`.
pub fn assign_zones(
    layout: &FarmLayout,
    n_uavs: usize,
    per_zone_durations: &[f64],
    transit_speed: f64,
) -> Result<FleetAssignment, PlanError> {
    if n_uavs == 0 {
        return Err(PlanError::NoUavs);
    }
    if per_zone_durations.len() != layout.len() {
        return Err(PlanError::DurationCount { expected: layout.len(), got: per_zone_durations.len() });
    }
    if !(transit_speed > 0.0) {
        return Err(PlanError::BadTransitSpeed(transit_speed));
    }
    let mut best = lpt(layout, 1, per_zone_durations, transit_speed);
    for k in 2..=n_uavs.min(layout.len()) {
        let candidate = lpt(layout, k, per_zone_durations, transit_speed);
        if candidate.makespan < best.makespan {
            best = candidate;
        }
    }
    best.routes.resize(n_uavs, Vec::new());
    best.loads.resize(n_uavs, 0.0);
    Ok(best)
}
