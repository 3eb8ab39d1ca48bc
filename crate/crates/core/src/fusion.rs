//! Multi-modal composition, the per-cell processing function, the matrix
//! aggregate and defect criticality scoring.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;
use crate::sensor::{DefectKind, Modality, ObservationRecord, SensorMatrix};
use crate::structure::StructurePart;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssessError {
    #[error("{0:?} requires an estimated size")]
    MissingSize(DefectKind),
    #[error("estimated size must be finite (got {0})")]
    BadSize(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComposedObservation {
    pub cell: (usize, usize),
    pub defect_id: u32,
    pub fused_confidence: f64,
    pub visual: bool,
    pub thermal: bool,
}

/// Independent-OR fusion: `1 − Π(1 − c)`.
///
/// Miss factors are multiplied in sorted order, so the result is bit-identical
/// for any permutation of the input.
pub fn or_fuse(confidences: impl IntoIterator<Item = f64>) -> f64 {
    let mut miss: Vec<f64> = confidences.into_iter().map(|c| 1.0 - c).collect();
    miss.sort_by(f64::total_cmp);
    1.0 - miss.into_iter().fold(1.0, |acc, m| acc * m)
}

/// Fuses one cell's observations per defect.
///
/// Frames of the same modality are strongly correlated, so each modality
/// contributes its best confidence once; modalities are then combined with
/// the independent-OR rule. Observations without a defect id are ignored.
/// Output is ordered by defect id.
pub fn compose(cell: (usize, usize), observations: &[ObservationRecord]) -> Vec<ComposedObservation> {
    let mut best: BTreeMap<u32, [Option<f64>; 2]> = BTreeMap::new();
    for o in observations {
        let Some(id) = o.defect_id else { continue };
        let slot = match o.modality {
            Modality::Visual => 0,
            Modality::Thermal => 1,
        };
        let entry = best.entry(id).or_default();
        entry[slot] = Some(entry[slot].map_or(o.confidence, |c: f64| c.max(o.confidence)));
    }
    best.into_iter()
        .map(|(defect_id, per)| ComposedObservation {
            cell,
            defect_id,
            fused_confidence: or_fuse(per.iter().flatten().copied()),
            visual: per[0].is_some(),
            thermal: per[1].is_some(),
        })
        .collect()
}

/// Number of distinct defects in the cell whose fused confidence reaches `threshold`.
pub fn process_cell(observations: &[ObservationRecord], threshold: f64) -> f64 {
    compose((0, 0), observations)
        .iter()
        .filter(|c| c.fused_confidence >= threshold)
        .count() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub value: f64,
    pub azimuth_bands: usize,
    pub height_bands: usize,
    /// Azimuth-major per-cell contributions.
    pub per_cell: Vec<f64>,
}

impl AggregateResult {
    pub fn contribution(&self, i: usize, j: usize) -> f64 {
        self.per_cell[i * self.height_bands + j]
    }
}

/// Double sum of [`process_cell`] over the matrix, reduced in azimuth-major order.
pub fn aggregate(matrix: &SensorMatrix, threshold: f64) -> AggregateResult {
    let per_cell: Vec<f64> = matrix.iter_cells().map(|(_, c)| process_cell(c, threshold)).collect();
    let value = per_cell.iter().sum();
    AggregateResult {
        value,
        azimuth_bands: matrix.dims.azimuth_bands,
        height_bands: matrix.dims.height_bands,
        per_cell,
    }
}

/// Detections above threshold across the whole matrix, ordered by defect id.
pub fn detections(matrix: &SensorMatrix, threshold: f64) -> Vec<ComposedObservation> {
    let mut out: Vec<_> = matrix
        .iter_cells()
        .flat_map(|(ij, c)| compose(ij, c))
        .filter(|c| c.fused_confidence >= threshold)
        .collect();
    out.sort_by_key(|c| (c.defect_id, c.cell));
    out
}

/// Criticality anchors: (low input, low score, high input, high score).
/// Input is size in cm for sized kinds and thermal excess in K for overheating.
pub fn criticality_anchor(kind: DefectKind) -> (f64, f64, f64, f64) {
    match kind {
        DefectKind::Crack => (4.5, 6.0, 7.5, 7.0),
        DefectKind::Corrosion => (9.0, 8.0, 14.0, 9.0),
        DefectKind::Overheating => (10.0, 6.0, 30.0, 7.0),
    }
}

pub const DEFAULT_THERMAL_EXCESS: f64 = 20.0;

/// Integer criticality 1–10: linear through the kind's anchors, rounded, then clamped.
pub fn assess_criticality(
    kind: DefectKind,
    _component: StructurePart,
    estimated_size: Option<f64>,
    thermal_excess: Option<f64>,
) -> Result<u8, AssessError> {
    let input = if kind.is_sized() {
        estimated_size.ok_or(AssessError::MissingSize(kind))?
    } else {
        thermal_excess.unwrap_or(DEFAULT_THERMAL_EXCESS)
    };
    if !input.is_finite() {
        return Err(AssessError::BadSize(input));
    }
    let (x0, y0, x1, y1) = criticality_anchor(kind);
    let score = y0 + (input - x0) * (y1 - y0) / (x1 - x0);
    Ok(math::round(score).clamp(1.0, 10.0) as u8)
}

pub const LATENCY_RANGE_H: (f64, f64) = (0.1, 0.2);
pub const SIZE_ESTIMATE_NOISE_CM: f64 = 0.5;

/// Pipeline compute time for one assessment, hours, uniform in [0.1, 0.2].
pub fn assessment_latency<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let (lo, hi) = LATENCY_RANGE_H;
    lo + (hi - lo) * rng.random::<f64>()
}

/// Size as measured by the pipeline: truth plus uniform noise of ±0.5 cm, never below 0.1 cm.
pub fn estimate_size<R: Rng + ?Sized>(truth: f64, rng: &mut R) -> f64 {
    (truth + (2.0 * rng.random::<f64>() - 1.0) * SIZE_ESTIMATE_NOISE_CM).max(0.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub defect_id: u32,
    pub zone_id: u32,
    pub kind: DefectKind,
    pub component: StructurePart,
    pub estimated_size_cm: Option<f64>,
    pub fused_confidence: f64,
    pub criticality: u8,
    pub assessment_latency_h: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::{Point3, TurbineDims, TurbineZone};
    use crate::sensor::GridDims;
    use alloc::vec;
    use proptest::prelude::*;

    fn obs(id: u32, modality: Modality, c: f64) -> ObservationRecord {
        ObservationRecord {
            defect_id: Some(id),
            zone_id: 1,
            modality,
            confidence: c,
            capture_time: 0.0,
            surface_point: Point3::ORIGIN,
        }
    }

    #[test]
    fn visual_plus_thermal() {
        let c = compose((0, 0), &[obs(1, Modality::Visual, 0.8), obs(1, Modality::Thermal, 0.6)]);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].fused_confidence, 0.92);
        assert!(c[0].visual && c[0].thermal);
    }

    #[test]
    fn singleton_and_absorbing() {
        let c = compose((0, 0), &[obs(1, Modality::Visual, 0.7)]);
        assert_eq!(c[0].fused_confidence, 0.7);
        for x in [0.0, 0.3, 0.99] {
            let c = compose((0, 0), &[obs(1, Modality::Visual, 1.0), obs(1, Modality::Thermal, x)]);
            assert_eq!(c[0].fused_confidence, 1.0);
        }
    }

    #[test]
    fn process_cell_thresholds() {
        assert_eq!(process_cell(&[], 0.5), 0.0);
        let one = [obs(1, Modality::Visual, 0.8), obs(1, Modality::Thermal, 0.6)];
        assert_eq!(process_cell(&one, 0.5), 1.0);
        let two = [obs(1, Modality::Visual, 0.6), obs(2, Modality::Visual, 0.4)];
        assert_eq!(process_cell(&two, 0.5), 1.0);
    }

    fn zone() -> TurbineZone {
        TurbineZone::around_turbine(1, Point3::ORIGIN, TurbineDims::V112, 10.0).unwrap()
    }

    #[test]
    fn aggregate_constant_field_and_empty() {
        let mut m = SensorMatrix::new(&zone(), GridDims { azimuth_bands: 2, height_bands: 2 }).unwrap();
        assert_eq!(aggregate(&m, 0.5).value, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                m.push_to_cell(i, j, obs((i * 2 + j) as u32, Modality::Visual, 0.9));
            }
        }
        let r = aggregate(&m, 0.5);
        assert_eq!(r.value, 4.0);
        assert_eq!(r.contribution(1, 0), 1.0);
    }

    #[test]
    fn criticality_anchors() {
        let crit = |k, s| assess_criticality(k, k.usual_part(), s, None).unwrap();
        assert!(matches!(crit(DefectKind::Corrosion, Some(12.0)), 8 | 9));
        assert_eq!(crit(DefectKind::Crack, Some(4.5)), 6);
        assert_eq!(crit(DefectKind::Crack, Some(7.5)), 7);
        assert_eq!(crit(DefectKind::Corrosion, Some(9.0)), 8);
        assert_eq!(crit(DefectKind::Corrosion, Some(14.0)), 9);
        assert_eq!(crit(DefectKind::Crack, Some(100.0)), 10);
        assert_eq!(crit(DefectKind::Crack, Some(-100.0)), 1);
        assert_eq!(
            assess_criticality(DefectKind::Crack, StructurePart::Blade, None, None),
            Err(AssessError::MissingSize(DefectKind::Crack))
        );
        assert_eq!(assess_criticality(DefectKind::Overheating, StructurePart::Generator, None, Some(10.0)).unwrap(), 6);
        assert_eq!(assess_criticality(DefectKind::Overheating, StructurePart::Generator, None, Some(30.0)).unwrap(), 7);
    }

    #[test]
    fn latency_bounds() {
        let mut rng = crate::rng::seeded(1);
        for _ in 0..10_000 {
            let l = assessment_latency(&mut rng);
            assert!((0.1..=0.2).contains(&l));
        }
    }

    proptest! {
        #[test]
        fn fusion_dominates_and_commutes(
            mut set in proptest::collection::vec((0u8..2, 0.0..=1.0f64), 1..8),
        ) {
            let mk = |s: &[(u8, f64)]| -> Vec<ObservationRecord> {
                s.iter().map(|&(m, c)| obs(1, if m == 0 { Modality::Visual } else { Modality::Thermal }, c)).collect()
            };
            let fused = compose((0, 0), &mk(&set))[0].fused_confidence;
            let max = set.iter().map(|s| s.1).fold(0.0, f64::max);
            prop_assert!(fused >= max - 1e-15);
            set.reverse();
            prop_assert_eq!(compose((0, 0), &mk(&set))[0].fused_confidence, fused);
        }

        #[test]
        fn criticality_monotone_within_band(a in 4.5..7.5f64, b in 4.5..7.5f64, c in 9.0..14.0f64, d in 9.0..14.0f64) {
            let s = |k: DefectKind, x: f64| assess_criticality(k, k.usual_part(), Some(x), None).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(s(DefectKind::Crack, lo) <= s(DefectKind::Crack, hi));
            let (lo, hi) = if c < d { (c, d) } else { (d, c) };
            prop_assert!(s(DefectKind::Corrosion, lo) <= s(DefectKind::Corrosion, hi));
        }
    }

    #[test]
    fn detections_sorted() {
        let mut m = SensorMatrix::new(&zone(), GridDims::default()).unwrap();
        m.push_to_cell(3, 1, obs(9, Modality::Visual, 0.9));
        m.push_to_cell(0, 0, obs(2, Modality::Visual, 0.9));
        m.push_to_cell(0, 0, obs(5, Modality::Visual, 0.1));
        let d = detections(&m, 0.5);
        assert_eq!(d.iter().map(|c| c.defect_id).collect::<Vec<_>>(), vec![2, 9]);
    }
}
