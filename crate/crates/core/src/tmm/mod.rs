//! Transfer-matrix algebra for stacks of thin lossless mirrors.
//!
//! Amplitude vectors are ordered (backward, forward), the matrix of an element
//! maps the amplitudes on its right to those on its left, and a stack is the
//! left-to-right product `M(ζ₀) M_fs(k g₀) M(ζ₁) … M(ζₙ)`. For unit incidence
//! from the left the transmitted amplitude is `1/m22`.

mod fields;
mod matrix;
mod precise;
mod stack;

pub use fields::{field_segments, FieldSegment, Region};
pub use matrix::{mirror_matrix, propagation_matrix, TransferMatrix};
pub use stack::{CavityStack, Incidence, OpticalElement};

pub(crate) use matrix::{mirror_unchecked, propagation_unchecked};
pub(crate) use precise::accurate_propagation;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Result};

/// Ordered product of element and propagation matrices at wavenumber `k`.
///
/// The product is accumulated in double-double precision and rounded once;
/// the resonance search uses a plain f64 product instead.
pub fn compose(stack: &CavityStack, k: f64) -> Result<TransferMatrix> {
    ensure_positive("k", k)?;
    let elements = stack.elements();
    let layers = elements.windows(2).map(|w| (w[0].position, w[1].position, w[1].zeta));
    Ok(precise_product(elements[0].zeta, layers, k))
}

pub(crate) fn compose_unchecked(stack: &CavityStack, k: f64) -> TransferMatrix {
    let elements = stack.elements();
    let layers = elements.windows(2).map(|w| (w[1].position - w[0].position, w[1].zeta));
    product(elements[0].zeta, layers, k)
}

/// Product seen by the probe wave: for right incidence the same gaps and
/// mirrors are traversed in reverse order.
fn compose_incidence(stack: &CavityStack, k: f64) -> Result<TransferMatrix> {
    ensure_positive("k", k)?;
    let elements = stack.elements();
    Ok(match stack.incidence() {
        Incidence::FromLeft => compose(stack, k)?,
        Incidence::FromRight => {
            let layers = elements.windows(2).rev().map(|w| (w[0].position, w[1].position, w[0].zeta));
            precise_product(elements[elements.len() - 1].zeta, layers, k)
        }
    })
}

/// Double-double product over `(gap start, gap end, next mirror)` layers.
pub(crate) fn precise_product(first: f64, layers: impl Iterator<Item = (f64, f64, f64)>, k: f64) -> TransferMatrix {
    let mut m = precise::PreciseProduct::new(&mirror_unchecked(first));
    for (a, b, zeta) in layers {
        m.mul_assign(&precise::accurate_propagation(k, a, b));
        m.mul_assign(&mirror_unchecked(zeta));
    }
    m.value()
}

fn product(first: f64, layers: impl Iterator<Item = (f64, f64)>, k: f64) -> TransferMatrix {
    let mut m = mirror_unchecked(first);
    for (gap, zeta) in layers {
        m = m * propagation_unchecked(k * gap) * mirror_unchecked(zeta);
    }
    m
}

/// Power transmission `1/|m22|²` for the stack's incidence convention.
pub fn transmission(stack: &CavityStack, k: f64) -> Result<f64> {
    let m = compose_incidence(stack, k)?;
    Ok(1.0 / m.m22.norm_sqr())
}

/// Power reflection `|m12/m22|²` on the incidence side.
pub fn reflection(stack: &CavityStack, k: f64) -> Result<f64> {
    let m = compose_incidence(stack, k)?;
    Ok((m.m12 / m.m22).norm_sqr())
}

/// `D(k) = |m22|²` together with its first two derivatives in `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenominatorJet {
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
}

/// Transmission denominator `D(k) = |m22|² = 1/T`.
pub fn denominator(stack: &CavityStack, k: f64) -> Result<f64> {
    Ok(compose(stack, k)?.m22.norm_sqr())
}

/// Exact `D`, `dD/dk`, `d²D/dk²` by forward-mode differentiation of the
/// matrix product. Element matrices do not depend on `k`; each propagation
/// factor `diag(e^{ikg}, e^{-ikg})` contributes `ig`, `-g²` factors.
pub fn denominator_jet(stack: &CavityStack, k: f64) -> Result<DenominatorJet> {
    ensure_positive("k", k)?;
    Ok(denominator_jet_unchecked(stack, k))
}

pub(crate) fn denominator_jet_unchecked(stack: &CavityStack, k: f64) -> DenominatorJet {
    let elements = stack.elements();
    let mut m = mirror_unchecked(elements[0].zeta);
    let mut dm = TransferMatrix::zero();
    let mut d2m = TransferMatrix::zero();
    for w in elements.windows(2) {
        let gap = w[1].position - w[0].position;
        let mirror = mirror_unchecked(w[1].zeta);
        let e = Complex64::from_polar(1.0, k * gap);
        let p = TransferMatrix::diagonal(e, e.conj()) * mirror;
        let dp = TransferMatrix::diagonal(Complex64::i() * gap * e, -Complex64::i() * gap * e.conj()) * mirror;
        let d2p = p * (-gap * gap);
        d2m = d2m * p + (dm * dp) * 2.0 + m * d2p;
        dm = dm * p + m * dp;
        m = m * p;
    }
    let (a, b, c) = (m.m22, dm.m22, d2m.m22);
    DenominatorJet {
        value: a.norm_sqr(),
        slope: 2.0 * (a.conj() * b).re,
        curvature: 2.0 * (b.norm_sqr() + (a.conj() * c).re),
    }
}
