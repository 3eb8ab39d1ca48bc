//! Simplified turbine geometry used for coverage scoring, aiming and defect placement.
//!
//! In the zone frame the hub is the zone center. The tower is a vertical
//! cylinder from the ground to just below the nacelle, the nacelle is a small
//! sphere around the hub, and the three blades are line segments in the rotor
//! plane (perpendicular to +x) parked in a "Y" with one blade pointing up.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math;
use crate::spatial::{Point3, TurbineZone};

pub const TOWER_DIAMETER: f64 = 4.0;
pub const TOWER_RADIUS: f64 = TOWER_DIAMETER / 2.0;
pub const NACELLE_RADIUS: f64 = 2.5;
/// Mean chord, used only to weight blade area against the tower and nacelle.
pub const BLADE_CHORD: f64 = 3.0;
pub const BLADE_COUNT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructurePart {
    Blade,
    Tower,
    Generator,
}

impl StructurePart {
    pub fn as_str(&self) -> &'static str {
        match self {
            StructurePart::Blade => "blade",
            StructurePart::Tower => "tower",
            StructurePart::Generator => "generator",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "blade" => Some(StructurePart::Blade),
            "tower" => Some(StructurePart::Tower),
            "generator" => Some(StructurePart::Generator),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub position: Point3,
    /// Outward normal; `None` for blade points, which are visible from either side.
    pub normal: Option<Point3>,
    pub part: StructurePart,
}

#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub a: Point3,
    pub b: Point3,
}

impl Segment {
    pub fn closest_point(&self, p: Point3) -> Point3 {
        let ab = self.b - self.a;
        let len_sq = ab.norm_sq();
        if len_sq == 0.0 {
            return self.a;
        }
        let t = ((p - self.a).dot(ab) / len_sq).clamp(0.0, 1.0);
        self.a + ab * t
    }
}

/// Turbine geometry placed in the farm frame.
#[derive(Debug, Clone, Copy)]
pub struct TurbineStructure {
    pub hub: Point3,
    pub base: Point3,
    pub tower_top: f64,
    pub blade_root: f64,
    pub tip_radius: f64,
}

impl TurbineStructure {
    pub fn of(zone: &TurbineZone) -> Self {
        let hub = zone.center;
        let base = zone.tower_base();
        Self {
            hub,
            base,
            tower_top: hub.z - NACELLE_RADIUS,
            blade_root: NACELLE_RADIUS,
            tip_radius: zone.dims.tip_radius(),
        }
    }

    /// Unit direction of blade `k` in the rotor plane; blade 0 points straight up.
    pub fn blade_direction(k: usize) -> Point3 {
        let a = 2.0 * math::PI * k as f64 / BLADE_COUNT as f64;
        Point3::new(0.0, math::sin(a), math::cos(a))
    }

    pub fn tower_axis(&self) -> Segment {
        Segment { a: self.base, b: Point3::new(self.hub.x, self.hub.y, self.tower_top) }
    }

    pub fn blade(&self, k: usize) -> Segment {
        let dir = Self::blade_direction(k);
        Segment { a: self.hub + dir * self.blade_root, b: self.hub + dir * self.tip_radius }
    }

    /// Closest point on the tower axis or any blade; this is where sensors aim.
    pub fn nearest_axis_point(&self, p: Point3) -> Point3 {
        let mut best = self.tower_axis().closest_point(p);
        let mut best_d = best.distance_sq(p);
        // hub itself counts as structure (nacelle)
        let hub_d = self.hub.distance_sq(p);
        if hub_d < best_d {
            best = self.hub;
            best_d = hub_d;
        }
        for k in 0..BLADE_COUNT {
            let c = self.blade(k).closest_point(p);
            let d = c.distance_sq(p);
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        best
    }

    pub fn tower_area(&self) -> f64 {
        math::PI * TOWER_DIAMETER * (self.tower_top - self.base.z)
    }

    pub fn blade_area(&self) -> f64 {
        BLADE_COUNT as f64 * 2.0 * BLADE_CHORD * (self.tip_radius - self.blade_root)
    }

    pub fn nacelle_area(&self) -> f64 {
        4.0 * math::PI * NACELLE_RADIUS * NACELLE_RADIUS
    }

    pub fn sample_part<R: Rng + ?Sized>(&self, part: StructurePart, rng: &mut R) -> SurfacePoint {
        match part {
            StructurePart::Tower => {
                let theta = 2.0 * math::PI * rng.random::<f64>();
                let z = self.base.z + (self.tower_top - self.base.z) * rng.random::<f64>();
                let n = Point3::new(math::cos(theta), math::sin(theta), 0.0);
                SurfacePoint {
                    position: Point3::new(self.hub.x, self.hub.y, z) + n * TOWER_RADIUS,
                    normal: Some(n),
                    part,
                }
            }
            StructurePart::Blade => {
                let k = rng.random_range(0..BLADE_COUNT);
                let s = self.blade(k);
                let t = rng.random::<f64>();
                SurfacePoint { position: s.a + (s.b - s.a) * t, normal: None, part }
            }
            StructurePart::Generator => {
                // uniform on the sphere via z-slab sampling
                let u = 2.0 * rng.random::<f64>() - 1.0;
                let phi = 2.0 * math::PI * rng.random::<f64>();
                let r = math::sqrt((1.0 - u * u).max(0.0));
                let n = Point3::new(r * math::cos(phi), r * math::sin(phi), u);
                SurfacePoint { position: self.hub + n * NACELLE_RADIUS, normal: Some(n), part }
            }
        }
    }

    /// Area-weighted sample over the whole structure surface.
    pub fn sample_surface<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint {
        let (t, b, n) = (self.tower_area(), self.blade_area(), self.nacelle_area());
        let u = rng.random::<f64>() * (t + b + n);
        let part = if u < t {
            StructurePart::Tower
        } else if u < t + b {
            StructurePart::Blade
        } else {
            StructurePart::Generator
        };
        self.sample_part(part, rng)
    }

    /// True if the open segment `from → to` passes through the tower cylinder.
    pub fn tower_occludes(&self, from: Point3, to: Point3) -> bool {
        let d = to - from;
        let ox = from.x - self.hub.x;
        let oy = from.y - self.hub.y;
        let a = d.x * d.x + d.y * d.y;
        let b = 2.0 * (ox * d.x + oy * d.y);
        let c = ox * ox + oy * oy - TOWER_RADIUS * TOWER_RADIUS;
        let (mut t0, mut t1) = if a == 0.0 {
            if c >= 0.0 {
                return false;
            }
            (0.0, 1.0)
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc <= 0.0 {
                return false;
            }
            let sq = math::sqrt(disc);
            ((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a))
        };
        // clip by the tower's height span
        let (zb, zt) = (self.base.z, self.tower_top);
        if d.z == 0.0 {
            if from.z < zb || from.z > zt {
                return false;
            }
        } else {
            let ta = (zb - from.z) / d.z;
            let tb = (zt - from.z) / d.z;
            let (lo, hi) = if ta < tb { (ta, tb) } else { (tb, ta) };
            t0 = t0.max(lo);
            t1 = t1.min(hi);
        }
        const EPS: f64 = 1e-9;
        t0 = t0.max(EPS);
        t1 = t1.min(1.0 - EPS);
        t1 > t0
    }
}

/// Whether a sensor at `position` aimed at `look_at` sees `point`.
pub fn sees(
    structure: &TurbineStructure,
    position: Point3,
    look_at: Point3,
    cos_half_fov: f64,
    range: f64,
    point: &SurfacePoint,
) -> bool {
    let to_point = point.position - position;
    let dist_sq = to_point.norm_sq();
    if dist_sq > range * range {
        return false;
    }
    if let Some(n) = point.normal {
        if to_point.dot(n) >= 0.0 {
            return false;
        }
    }
    let look = look_at - position;
    let look_len = look.norm();
    let dist = math::sqrt(dist_sq);
    if look_len == 0.0 || dist == 0.0 {
        return dist == 0.0;
    }
    if to_point.dot(look) < cos_half_fov * look_len * dist {
        return false;
    }
    // a tower point seen from its outer side cannot be hidden by the (convex) tower
    point.part == StructurePart::Tower || !structure.tower_occludes(position, point.position)
}
