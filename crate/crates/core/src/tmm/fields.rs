use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::precise::PreciseVector;
use super::{accurate_propagation, mirror_unchecked, precise_product, CavityStack, Incidence, TransferMatrix};
use crate::error::{ensure_positive, Result};

/// Region of the axis, numbered in lab (left-to-right) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    LeftOuter,
    Gap(usize),
    RightOuter,
}

/// Forward/backward plane-wave amplitudes in one region, for a unit incident
/// wave. `c_plus` travels to the right in the lab frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSegment {
    pub region: Region,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    pub mean_intensity: f64,
}

impl FieldSegment {
    fn new(region: Region, c_plus: Complex64, c_minus: Complex64) -> Self {
        Self {
            region,
            c_plus,
            c_minus,
            mean_intensity: c_plus.norm_sqr() + c_minus.norm_sqr(),
        }
    }

    /// Interior gap index, if this is not an outer region.
    pub fn gap_index(&self) -> Option<usize> {
        match self.region {
            Region::Gap(i) => Some(i),
            _ => None,
        }
    }
}

/// Field amplitudes in every region, ordered left outer, gaps, right outer.
///
/// The probe wave has unit amplitude on the incidence side. Interior
/// amplitudes are referenced to the gap boundary facing the source.
pub fn field_segments(stack: &CavityStack, k: f64) -> Result<Vec<FieldSegment>> {
    ensure_positive("k", k)?;
    let mut frame: Vec<(f64, f64)> = stack.elements().iter().map(|e| (e.zeta, e.position)).collect();
    match stack.incidence() {
        Incidence::FromLeft => Ok(probe_frame_fields(&frame, k)),
        Incidence::FromRight => {
            // Solve in the probe's frame, then map back to lab order.
            frame.reverse();
            let mut segments = probe_frame_fields(&frame, k);
            segments.reverse();
            let n_gaps = frame.len() - 1;
            for s in &mut segments {
                s.region = match s.region {
                    Region::LeftOuter => Region::RightOuter,
                    Region::RightOuter => Region::LeftOuter,
                    Region::Gap(i) => Region::Gap(n_gaps - 1 - i),
                };
                std::mem::swap(&mut s.c_plus, &mut s.c_minus);
            }
            Ok(segments)
        }
    }
}

fn gap_propagation(k: f64, a: f64, b: f64) -> TransferMatrix {
    accurate_propagation(k, a.min(b), a.max(b))
}

/// Fields for a unit wave arriving at `frame[0]`, elements given as
/// `(zeta, lab position)` in the order the probe meets them.
fn probe_frame_fields(frame: &[(f64, f64)], k: f64) -> Vec<FieldSegment> {
    let n = frame.len();
    let layers = frame.windows(2).map(|w| (w[0].1.min(w[1].1), w[0].1.max(w[1].1), w[1].0));
    let t = precise_product(frame[0].0, layers, k).m22.inv();
    let zero = Complex64::new(0.0, 0.0);

    let mut segments = Vec::with_capacity(n + 1);
    segments.push(FieldSegment::new(Region::RightOuter, t, zero));

    // Walk back towards the source: (backward, forward) behind element j.
    let mut walk = PreciseVector::new([zero, t]);
    for j in (1..n).rev() {
        walk.apply(&mirror_unchecked(frame[j].0));
        walk.apply(&gap_propagation(k, frame[j - 1].1, frame[j].1));
        let v = walk.value();
        segments.push(FieldSegment::new(Region::Gap(j - 1), v[1], v[0]));
    }
    walk.apply(&mirror_unchecked(frame[0].0));
    let v = walk.value();
    segments.push(FieldSegment::new(Region::LeftOuter, v[1], v[0]));
    segments.reverse();
    segments
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tmm::{mirror_matrix, propagation_matrix, reflection};

    #[test]
    fn free_space_has_unit_intensity_everywhere() {
        let s = CavityStack::from_gaps(&[0.0, 0.0, 0.0], &[1.0, 2.0]).unwrap();
        for seg in field_segments(&s, 2.3).unwrap() {
            assert!((seg.mean_intensity - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn outer_regions_carry_incident_reflected_transmitted() {
        let s = CavityStack::from_gaps(&[3.0, 1.0, 2.0], &[0.7, 1.9]).unwrap();
        let k = 1.3;
        let segs = field_segments(&s, k).unwrap();
        assert_eq!(segs.len(), 4);
        let left = segs[0];
        assert_eq!(left.region, Region::LeftOuter);
        assert!((left.c_plus - 1.0).norm() < 1e-12);
        assert!((left.c_minus.norm_sqr() - reflection(&s, k).unwrap()).abs() < 1e-12);
        let right = segs[3];
        assert_eq!(right.c_minus, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn interface_relations_hold() {
        let s = CavityStack::from_gaps(&[3.0, 1.0, 2.0], &[0.7, 1.9]).unwrap();
        let k = 0.8;
        let segs = field_segments(&s, k).unwrap();
        // Gap 0 amplitudes (left boundary) = M(ζ₀)^{-1} applied to the left outer pair.
        let m0 = mirror_matrix(3.0).unwrap();
        let inside = [segs[1].c_minus, segs[1].c_plus];
        let outside = m0.apply(inside);
        assert!((outside[0] - segs[0].c_minus).norm() < 1e-12);
        assert!((outside[1] - segs[0].c_plus).norm() < 1e-12);
        // Across gap 0 and mirror 1 into gap 1.
        let next = [segs[2].c_minus, segs[2].c_plus];
        let back = (propagation_matrix(k * 0.7).unwrap() * mirror_matrix(1.0).unwrap()).apply(next);
        assert!((back[0] - inside[0]).norm() < 1e-12);
        assert!((back[1] - inside[1]).norm() < 1e-12);
    }

    #[test]
    fn right_incidence_maps_back_to_lab_frame() {
        let s = CavityStack::from_gaps(&[3.0, 1.0, 2.0], &[0.7, 1.9]).unwrap();
        let r = s.clone().with_incidence(Incidence::FromRight);
        let segs = field_segments(&r, 1.1).unwrap();
        assert_eq!(segs[0].region, Region::LeftOuter);
        assert_eq!(segs[1].region, Region::Gap(0));
        assert_eq!(segs[3].region, Region::RightOuter);
        // Incoming wave from the right travels leftwards with unit amplitude.
        assert!((segs[3].c_minus - 1.0).norm() < 1e-12);
        assert_eq!(segs[0].c_plus, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn intensity_is_sum_of_squares() {
        let s = CavityStack::two_mirror(4.0, 9.0, 1.0).unwrap();
        for seg in field_segments(&s, 0.4).unwrap() {
            assert_eq!(seg.mean_intensity, seg.c_plus.norm_sqr() + seg.c_minus.norm_sqr());
        }
    }
}
