//! Wind farm geometry: spherical inspection zones, their union and the
//! 12-slot vector-matrix encoding of a layout.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;
use crate::rng::SimRng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpatialError {
    #[error("turbine dimension `{field}` must be positive (got {value})")]
    NonPositiveDimension { field: &'static str, value: f64 },
    #[error("clearance must be non-negative and finite (got {0})")]
    BadClearance(f64),
    #[error("layout has no zones")]
    EmptyLayout,
    #[error("zone ids must be contiguous from 1: position {position} holds id {id}")]
    NonContiguousIds { position: usize, id: u32 },
    #[error("zone {zone}: radius must be positive (got {radius})")]
    BadRadius { zone: u32, radius: f64 },
    #[error("zone {zone}: non-finite value in `{field}`")]
    NonFinite { zone: u32, field: &'static str },
    #[error("vector matrix must have 12 rows (got {0})")]
    WrongRowCount(usize),
    #[error("vector matrix rows have unequal lengths")]
    RaggedMatrix,
    #[error("at least {min} samples required (got {got})")]
    TooFewSamples { min: u64, got: u64 },
}

/// A point in the farm frame, meters. `z` is altitude above the ground plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(&self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(*self)
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.norm_sq())
    }

    pub fn distance(&self, other: Point3) -> f64 {
        (*self - other).norm()
    }

    pub fn distance_sq(&self, other: Point3) -> f64 {
        (*self - other).norm_sq()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Point3> {
        let n = self.norm();
        (n > 0.0).then(|| *self * (1.0 / n))
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, k: f64) -> Point3 {
        Point3::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Published turbine dimensions. Meters, except `rated_power` (megawatts).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurbineDims {
    pub tower_height: f64,
    pub rotor_diameter: f64,
    pub blade_length: f64,
    pub rated_power: f64,
}

impl TurbineDims {
    /// Vestas V112: 3 MW, 112 m rotor, 84 m tower, 56 m blades.
    pub const V112: TurbineDims = TurbineDims {
        tower_height: 84.0,
        rotor_diameter: 112.0,
        blade_length: 56.0,
        rated_power: 3.0,
    };

    pub fn validate(&self) -> Result<(), SpatialError> {
        for (field, value) in [
            ("tower_height", self.tower_height),
            ("rotor_diameter", self.rotor_diameter),
            ("blade_length", self.blade_length),
            ("rated_power", self.rated_power),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(SpatialError::NonPositiveDimension { field, value });
            }
        }
        Ok(())
    }

    /// Height of the highest blade tip above the tower base.
    pub fn structure_height(&self) -> f64 {
        self.tower_height + self.tip_radius()
    }

    /// Distance from the hub to a blade tip.
    pub fn tip_radius(&self) -> f64 {
        self.blade_length.max(self.rotor_diameter / 2.0)
    }
}

/// Radius of the smallest hub-centered sphere enclosing the turbine, plus `clearance`.
///
/// The hub sits at `(0, 0, tower_height)` in the turbine-local frame. The
/// extremities are the tower base, the tower top and the blade tips swept
/// through every azimuth of the rotor disc.
pub fn enclosing_radius(dims: &TurbineDims, clearance: f64) -> Result<f64, SpatialError> {
    dims.validate()?;
    if !(clearance >= 0.0) || !clearance.is_finite() {
        return Err(SpatialError::BadClearance(clearance));
    }
    let hub = Point3::new(0.0, 0.0, dims.tower_height);
    let tip = dims.tip_radius();
    let mut extent: f64 = hub.distance(Point3::ORIGIN);
    // rotor plane is y-z; every azimuth puts the tip exactly `tip` from the hub
    const AZIMUTH_STEPS: usize = 72;
    for k in 0..AZIMUTH_STEPS {
        let a = 2.0 * math::PI * k as f64 / AZIMUTH_STEPS as f64;
        let p = hub + Point3::new(0.0, tip * math::sin(a), tip * math::cos(a));
        extent = extent.max(hub.distance(p));
    }
    Ok(extent + clearance)
}

/// One inspection zone: a closed ball around a turbine hub.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurbineZone {
    pub id: u32,
    pub center: Point3,
    pub radius: f64,
    pub dims: TurbineDims,
}

impl TurbineZone {
    pub fn new(id: u32, center: Point3, radius: f64, dims: TurbineDims) -> Result<Self, SpatialError> {
        let zone = Self { id, center, radius, dims };
        zone.validate()?;
        Ok(zone)
    }

    /// Zone around a turbine whose tower base stands at `base`, sized by [`enclosing_radius`].
    pub fn around_turbine(
        id: u32,
        base: Point3,
        dims: TurbineDims,
        clearance: f64,
    ) -> Result<Self, SpatialError> {
        let radius = enclosing_radius(&dims, clearance)?;
        Self::new(id, base + Point3::new(0.0, 0.0, dims.tower_height), radius, dims)
    }

    pub fn validate(&self) -> Result<(), SpatialError> {
        if !self.center.is_finite() {
            return Err(SpatialError::NonFinite { zone: self.id, field: "center" });
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(SpatialError::BadRadius { zone: self.id, radius: self.radius });
        }
        self.dims.validate()
    }

    /// Ground point directly below the hub.
    pub fn tower_base(&self) -> Point3 {
        self.center - Point3::new(0.0, 0.0, self.dims.tower_height)
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * math::PI * self.radius * self.radius * self.radius
    }
}

/// Closed-ball membership; boundary points are inside.
pub fn zone_contains(zone: &TurbineZone, p: Point3) -> bool {
    p.distance_sq(zone.center) <= zone.radius * zone.radius
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarmLayout {
    zones: Vec<TurbineZone>,
    pub frame_note: String,
}

impl FarmLayout {
    pub fn new(zones: Vec<TurbineZone>, frame_note: impl Into<String>) -> Result<Self, SpatialError> {
        if zones.is_empty() {
            return Err(SpatialError::EmptyLayout);
        }
        for (position, zone) in zones.iter().enumerate() {
            if zone.id as usize != position + 1 {
                return Err(SpatialError::NonContiguousIds { position, id: zone.id });
            }
            zone.validate()?;
        }
        Ok(Self { zones, frame_note: frame_note.into() })
    }

    /// `count` identical turbines in a line along +x, `spacing` meters apart.
    pub fn line(count: u32, spacing: f64, dims: TurbineDims, clearance: f64) -> Result<Self, SpatialError> {
        let zones = (0..count)
            .map(|i| TurbineZone::around_turbine(i + 1, Point3::new(spacing * i as f64, 0.0, 0.0), dims, clearance))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(zones, "local Cartesian frame; x east, y north, z up; origin at the first tower base")
    }

    pub fn zones(&self) -> &[TurbineZone] {
        &self.zones
    }

    pub fn zone(&self, id: u32) -> Option<&TurbineZone> {
        (id as usize).checked_sub(1).and_then(|i| self.zones.get(i))
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    /// Axis-aligned box of all centers inflated by the largest radius.
    pub fn bounding_box(&self) -> (Point3, Point3) {
        let max_r = self.zones.iter().map(|z| z.radius).fold(0.0, f64::max);
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for z in &self.zones {
            lo = Point3::new(lo.x.min(z.center.x), lo.y.min(z.center.y), lo.z.min(z.center.z));
            hi = Point3::new(hi.x.max(z.center.x), hi.y.max(z.center.y), hi.z.max(z.center.z));
        }
        let pad = Point3::new(max_r, max_r, max_r);
        (lo - pad, hi + pad)
    }

    pub fn union_contains(&self, p: Point3) -> bool {
        self.zones.iter().any(|z| zone_contains(z, p))
    }
}

/// Monte-Carlo hit fraction with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub fraction: f64,
    pub stderr: f64,
    pub sample_count: u64,
    pub seed: u64,
}

impl CoverageEstimate {
    pub fn from_hits(hits: u64, sample_count: u64, seed: u64) -> Self {
        let n = sample_count as f64;
        let fraction = hits as f64 / n;
        let stderr = math::sqrt(fraction * (1.0 - fraction) / n);
        Self { fraction, stderr, sample_count, seed }
    }
}

/// Estimated volume of the zone union, cubic meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub volume: f64,
    pub stderr: f64,
    pub box_volume: f64,
    pub estimate: CoverageEstimate,
}

pub const MIN_VOLUME_SAMPLES: u64 = 1000;

/// Splits the sample index space into fixed chunks, each with its own
/// generator stream, so chunks can be counted in any order or in parallel
/// and still give the same total.
#[derive(Debug, Clone)]
pub struct VolumeSampler<'a> {
    layout: &'a FarmLayout,
    lo: Point3,
    span: Point3,
    samples: u64,
    seed: u64,
}

impl<'a> VolumeSampler<'a> {
    pub const CHUNK: u64 = 1 << 16;

    pub fn new(layout: &'a FarmLayout, samples: u64, seed: u64) -> Result<Self, SpatialError> {
        if layout.is_empty() {
            return Err(SpatialError::EmptyLayout);
        }
        if samples < MIN_VOLUME_SAMPLES {
            return Err(SpatialError::TooFewSamples { min: MIN_VOLUME_SAMPLES, got: samples });
        }
        let (lo, hi) = layout.bounding_box();
        Ok(Self { layout, lo, span: hi - lo, samples, seed })
    }

    pub fn chunk_count(&self) -> u64 {
        self.samples.div_ceil(Self::CHUNK)
    }

    /// Number of samples in chunk `chunk` that fall inside the union.
    pub fn chunk_hits(&self, chunk: u64) -> u64 {
        let start = chunk * Self::CHUNK;
        let end = (start + Self::CHUNK).min(self.samples);
        let mut rng = SimRng::seed_from_u64(self.seed);
        rng.set_stream(chunk);
        let mut hits = 0;
        for _ in start..end {
            let p = Point3::new(
                self.lo.x + self.span.x * rng.random::<f64>(),
                self.lo.y + self.span.y * rng.random::<f64>(),
                self.lo.z + self.span.z * rng.random::<f64>(),
            );
            if self.layout.union_contains(p) {
                hits += 1;
            }
        }
        hits
    }

    pub fn finish(&self, hits: u64) -> VolumeEstimate {
        let box_volume = self.span.x * self.span.y * self.span.z;
        let estimate = CoverageEstimate::from_hits(hits, self.samples, self.seed);
        VolumeEstimate {
            volume: estimate.fraction * box_volume,
            stderr: estimate.stderr * box_volume,
            box_volume,
            estimate,
        }
    }
}

/// Monte-Carlo volume of the union of all zones; deterministic for a fixed seed.
pub fn union_coverage_volume(layout: &FarmLayout, samples: u64, seed: u64) -> Result<VolumeEstimate, SpatialError> {
    let sampler = VolumeSampler::new(layout, samples, seed)?;
    let hits = (0..sampler.chunk_count()).map(|c| sampler.chunk_hits(c)).sum();
    Ok(sampler.finish(hits))
}

pub const VECTOR_SLOTS: usize = 12;

/// Layout as a 12 × N matrix, one column per zone:
/// `x, y, z, R, tower_height, rotor_diameter, blade_length, rated_power` then four reserved zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorMatrix {
    columns: Vec<[f64; VECTOR_SLOTS]>,
}

impl VectorMatrix {
    pub fn columns(&self) -> &[[f64; VECTOR_SLOTS]] {
        &self.columns
    }

    pub fn rows(&self) -> usize {
        VECTOR_SLOTS
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    /// Builds from row-major data; every row must have one entry per zone.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SpatialError> {
        if rows.len() != VECTOR_SLOTS {
            return Err(SpatialError::WrongRowCount(rows.len()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(SpatialError::RaggedMatrix);
        }
        let columns = (0..n)
            .map(|c| core::array::from_fn(|r| rows[r][c]))
            .collect();
        Ok(Self { columns })
    }

    pub fn from_columns(columns: Vec<[f64; VECTOR_SLOTS]>) -> Self {
        Self { columns }
    }
}

pub fn to_vector_matrix(layout: &FarmLayout) -> VectorMatrix {
    let columns = layout
        .zones
        .iter()
        .map(|z| {
            [
                z.center.x,
                z.center.y,
                z.center.z,
                z.radius,
                z.dims.tower_height,
                z.dims.rotor_diameter,
                z.dims.blade_length,
                z.dims.rated_power,
                0.0,
                0.0,
                0.0,
                0.0,
            ]
        })
        .collect();
    VectorMatrix { columns }
}

/// Inverse of [`to_vector_matrix`]. Zone ids follow column order from 1; reserved slots are ignored.
pub fn from_vector_matrix(matrix: &VectorMatrix, frame_note: impl Into<String>) -> Result<FarmLayout, SpatialError> {
    let mut zones = Vec::with_capacity(matrix.cols());
    for (i, col) in matrix.columns.iter().enumerate() {
        let id = i as u32 + 1;
        if col[..8].iter().any(|v| !v.is_finite()) {
            return Err(SpatialError::NonFinite { zone: id, field: "vector slot" });
        }
        if !(col[3] > 0.0) {
            return Err(SpatialError::BadRadius { zone: id, radius: col[3] });
        }
        let dims = TurbineDims {
            tower_height: col[4],
            rotor_diameter: col[5],
            blade_length: col[6],
            rated_power: col[7],
        };
        zones.push(TurbineZone::new(id, Point3::new(col[0], col[1], col[2]), col[3], dims)?);
    }
    FarmLayout::new(zones, frame_note)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn unit_zone(id: u32, center: Point3, radius: f64) -> TurbineZone {
        TurbineZone::new(id, center, radius, TurbineDims::V112).unwrap()
    }

    #[test]
    fn containment_is_closed_ball() {
        let z = unit_zone(1, Point3::ORIGIN, 100.0);
        assert!(zone_contains(&z, Point3::new(0.0, 0.0, 50.0)));
        assert!(zone_contains(&z, Point3::new(0.0, 0.0, 100.0)));
        assert!(!zone_contains(&z, Point3::new(0.0, 0.0, 100.001)));
    }

    /// Independent oracle: explicit list of extremity points.
    fn extremity_oracle(dims: &TurbineDims, clearance: f64) -> f64 {
        let hub = Point3::new(0.0, 0.0, dims.tower_height);
        let tip = dims.blade_length.max(dims.rotor_diameter / 2.0);
        let mut pts = vec![Point3::ORIGIN, hub];
        for deg in (0..360).step_by(15) {
            let a = deg as f64 * core::f64::consts::PI / 180.0;
            pts.push(hub + Point3::new(0.0, tip * libm::sin(a), tip * libm::cos(a)));
        }
        pts.iter().map(|p| p.distance(hub)).fold(0.0, f64::max) + clearance
    }

    #[test]
    fn v112_enclosing_radius() {
        let r0 = enclosing_radius(&TurbineDims::V112, 0.0).unwrap();
        assert!((r0 - 84.0).abs() < 1e-12);
        assert!((r0 - extremity_oracle(&TurbineDims::V112, 0.0)).abs() < 1e-9);
        let r10 = enclosing_radius(&TurbineDims::V112, 10.0).unwrap();
        assert!((r10 - 94.0).abs() < 1e-12);
    }

    #[test]
    fn unit_turbine_radius() {
        let dims = TurbineDims { tower_height: 1.0, rotor_diameter: 2.0, blade_length: 1.0, rated_power: 1.0 };
        assert!((enclosing_radius(&dims, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enclosing_radius_rejects_bad_dims() {
        let mut dims = TurbineDims::V112;
        dims.blade_length = 0.0;
        assert!(matches!(
            enclosing_radius(&dims, 0.0),
            Err(SpatialError::NonPositiveDimension { field: "blade_length", .. })
        ));
        assert!(enclosing_radius(&TurbineDims::V112, -1.0).is_err());
    }

    #[test]
    fn layout_ids_must_be_contiguous() {
        let z1 = unit_zone(1, Point3::ORIGIN, 1.0);
        let z3 = unit_zone(3, Point3::ORIGIN, 1.0);
        assert!(FarmLayout::new(vec![z1, z3], "").is_err());
        assert_eq!(FarmLayout::new(vec![], ""), Err(SpatialError::EmptyLayout));
    }

    #[test]
    fn vector_matrix_layout() {
        let layout = FarmLayout::line(3, 400.0, TurbineDims::V112, 10.0).unwrap();
        let m = to_vector_matrix(&layout);
        assert_eq!((m.rows(), m.cols()), (12, 3));
        for (i, z) in layout.zones().iter().enumerate() {
            assert_eq!(m.get(0, i), z.center.x);
            assert_eq!(m.get(3, i), z.radius);
            assert_eq!(m.get(7, i), 3.0);
            assert!((8..12).all(|r| m.get(r, i) == 0.0));
        }
        assert_eq!(from_vector_matrix(&m, layout.frame_note.clone()).unwrap(), layout);
    }

    #[test]
    fn vector_matrix_errors() {
        let rows: Vec<Vec<f64>> = (0..11).map(|_| vec![1.0]).collect();
        assert_eq!(VectorMatrix::from_rows(&rows), Err(SpatialError::WrongRowCount(11)));
        let mut col = [1.0; 12];
        col[3] = 0.0;
        assert!(matches!(
            from_vector_matrix(&VectorMatrix::from_columns(vec![col]), ""),
            Err(SpatialError::BadRadius { .. })
        ));
        col[3] = 1.0;
        col[1] = f64::NAN;
        assert!(from_vector_matrix(&VectorMatrix::from_columns(vec![col]), "").is_err());
    }

    #[test]
    fn reserved_slots_ignored_on_read() {
        let layout = FarmLayout::line(1, 0.0, TurbineDims::V112, 0.0).unwrap();
        let mut col = to_vector_matrix(&layout).columns()[0];
        col[10] = 99.0;
        assert_eq!(from_vector_matrix(&VectorMatrix::from_columns(vec![col]), layout.frame_note.clone()).unwrap(), layout);
    }

    #[test]
    fn volume_rejects_bad_input() {
        let layout = FarmLayout::new(vec![unit_zone(1, Point3::ORIGIN, 1.0)], "").unwrap();
        assert!(matches!(union_coverage_volume(&layout, 999, 1), Err(SpatialError::TooFewSamples { .. })));
    }

    #[test]
    fn disjoint_spheres_add() {
        let layout = FarmLayout::new(
            vec![unit_zone(1, Point3::ORIGIN, 1.0), unit_zone(2, Point3::new(10.0, 0.0, 0.0), 1.0)],
            "",
        )
        .unwrap();
        let est = union_coverage_volume(&layout, 200_000, 3).unwrap();
        let exact = 8.0 * core::f64::consts::PI / 3.0;
        assert!((est.volume - exact).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn stderr_scales_inverse_sqrt() {
        let layout = FarmLayout::new(vec![unit_zone(1, Point3::ORIGIN, 1.0)], "").unwrap();
        let small = union_coverage_volume(&layout, 10_000, 5).unwrap();
        let large = union_coverage_volume(&layout, 1_000_000, 5).unwrap();
        let ratio = small.stderr / large.stderr;
        assert!((ratio - 10.0).abs() <= 2.0, "ratio {ratio}");
    }

    #[test]
    fn chunk_order_does_not_matter() {
        let layout = FarmLayout::line(2, 50.0, TurbineDims::V112, 0.0).unwrap();
        let s = VolumeSampler::new(&layout, 200_000, 11).unwrap();
        let fwd: u64 = (0..s.chunk_count()).map(|c| s.chunk_hits(c)).sum();
        let rev: u64 = (0..s.chunk_count()).rev().map(|c| s.chunk_hits(c)).sum();
        assert_eq!(fwd, rev);
        assert_eq!(s.finish(fwd), union_coverage_volume(&layout, 200_000, 11).unwrap());
    }

    proptest! {
        #[test]
        fn containment_invariant_under_rotation(
            px in -200.0..200.0f64, py in -200.0..200.0f64, pz in -200.0..200.0f64,
            cx in -50.0..50.0f64, cy in -50.0..50.0f64, cz in -50.0..50.0f64,
            r in 1.0..150.0f64, yaw in 0.0..core::f64::consts::TAU, pitch in 0.0..core::f64::consts::TAU,
        ) {
            let rot = |p: Point3| {
                let (sy, cyw) = (libm::sin(yaw), libm::cos(yaw));
                let (sp, cp) = (libm::sin(pitch), libm::cos(pitch));
                let q = Point3::new(cyw * p.x - sy * p.y, sy * p.x + cyw * p.y, p.z);
                Point3::new(q.x, cp * q.y - sp * q.z, sp * q.y + cp * q.z)
            };
            let c = Point3::new(cx, cy, cz);
            let p = Point3::new(px, py, pz);
            let d = p.distance(c);
            // rotation is exact up to rounding; skip points within rounding of the boundary
            prop_assume!((d - r).abs() > 1e-9 * (1.0 + r));
            let z = unit_zone(1, c, r);
            let zr = unit_zone(1, rot(c), r);
            prop_assert_eq!(zone_contains(&z, p), zone_contains(&zr, rot(p)));
        }

        #[test]
        fn containment_monotone_in_radius(
            px in -100.0..100.0f64, py in -100.0..100.0f64, pz in -100.0..100.0f64,
            r1 in 1.0..100.0f64, extra in 0.0..100.0f64,
        ) {
            let p = Point3::new(px, py, pz);
            let small = unit_zone(1, Point3::ORIGIN, r1);
            let big = unit_zone(1, Point3::ORIGIN, r1 + extra);
            prop_assert!(!zone_contains(&small, p) || zone_contains(&big, p));
        }

        #[test]
        fn vector_matrix_round_trip_is_exact(
            coords in proptest::collection::vec((-1e4..1e4f64, -1e4..1e4f64, 0.0..300.0f64, 0.1..500.0f64), 1..6),
        ) {
            let zones: Vec<_> = coords.iter().enumerate()
                .map(|(i, &(x, y, z, r))| unit_zone(i as u32 + 1, Point3::new(x, y, z), r))
                .collect();
            let layout = FarmLayout::new(zones, "frame").unwrap();
            let back = from_vector_matrix(&to_vector_matrix(&layout), "frame").unwrap();
            prop_assert_eq!(back, layout);
        }
    }
}
