use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// 2×2 complex matrix relating (backward, forward) amplitudes on the left of
/// an element to those on its right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub const fn identity() -> Self {
        Self::diagonal(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub const fn zero() -> Self {
        Self::diagonal(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub const fn diagonal(a: Complex64, d: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(a, z, z, d)
    }

    pub fn determinant(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// `|det − 1|` scaled by the size of the products that cancel in the
    /// determinant. This is the quantity that floating point can keep small
    /// for ill-conditioned (high-finesse) stacks.
    pub fn unimodularity_defect(&self) -> f64 {
        let scale = (self.m11 * self.m22).norm().max(1.0);
        (self.determinant() - 1.0).norm() / scale
    }

    /// Applies the matrix to a (backward, forward) amplitude pair.
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m11 * v[0] + self.m12 * v[1],
            self.m21 * v[0] + self.m22 * v[1],
        ]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.m11 - other.m11,
            self.m12 - other.m12,
            self.m21 - other.m21,
            self.m22 - other.m22,
        ]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
    }
}

impl Mul for TransferMatrix {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Self {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }
}

impl Add for TransferMatrix {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            m11: self.m11 + o.m11,
            m12: self.m12 + o.m12,
            m21: self.m21 + o.m21,
            m22: self.m22 + o.m22,
        }
    }
}

impl Mul<f64> for TransferMatrix {
    type Output = Self;

    fn mul(self, s: f64) -> Self {
        Self {
            m11: self.m11 * s,
            m12: self.m12 * s,
            m21: self.m21 * s,
            m22: self.m22 * s,
        }
    }
}

/// Thin lossless dielectric slab of polarizability `zeta`:
/// `[[1+iζ, iζ], [−iζ, 1−iζ]]`.
pub fn mirror_matrix(zeta: f64) -> Result<TransferMatrix> {
    ensure_finite("zeta", zeta)?;
    Ok(mirror_unchecked(zeta))
}

pub(crate) fn mirror_unchecked(zeta: f64) -> TransferMatrix {
    let iz = I * zeta;
    TransferMatrix::new(1.0 + iz, iz, -iz, 1.0 - iz)
}

/// Free propagation over phase `theta = k·gap`: `diag(e^{iθ}, e^{−iθ})`.
pub fn propagation_matrix(theta: f64) -> Result<TransferMatrix> {
    ensure_finite("theta", theta)?;
    Ok(propagation_unchecked(theta))
}

pub(crate) fn propagation_unchecked(theta: f64) -> TransferMatrix {
    let e = Complex64::from_polar(1.0, theta);
    TransferMatrix::diagonal(e, e.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transparent_mirror_is_identity() {
        assert_eq!(mirror_matrix(0.0).unwrap(), TransferMatrix::identity());
    }

    #[test]
    fn unit_polarizability_entries() {
        let m = mirror_matrix(1.0).unwrap();
        assert_eq!(m.m11, c(1.0, 1.0));
        assert_eq!(m.m22, c(1.0, -1.0));
        assert_eq!(m.determinant(), c(1.0, 0.0));
    }

    #[test]
    fn strong_mirror_m22() {
        let m = mirror_matrix(20.0).unwrap();
        assert_eq!(m.m22.norm_sqr(), 401.0);
        assert_eq!(m.determinant(), c(1.0, 0.0));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(mirror_matrix(f64::NAN).is_err());
        assert!(mirror_matrix(f64::INFINITY).is_err());
        assert!(propagation_matrix(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn propagation_special_phases() {
        assert_eq!(propagation_matrix(0.0).unwrap(), TransferMatrix::identity());
        let half = propagation_matrix(PI).unwrap();
        assert!(half.max_abs_diff(&TransferMatrix::diagonal(c(-1.0, 0.0), c(-1.0, 0.0))) < 1e-15);
        let quarter = propagation_matrix(PI / 2.0).unwrap();
        assert!(quarter.max_abs_diff(&TransferMatrix::diagonal(c(0.0, 1.0), c(0.0, -1.0))) < 1e-15);
    }

    #[test]
    fn propagation_is_unitary() {
        let p = propagation_matrix(0.7).unwrap();
        assert!((p.m11.norm() - 1.0).abs() < 1e-15);
        assert!((p.determinant() - 1.0).norm() < 1e-15);
    }
}
