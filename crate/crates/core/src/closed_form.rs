//! Analytic results for two-, three- and symmetric four-mirror cavities.
//!
//! Nothing here calls the transfer-matrix engine; these functions are the
//! independent side of every numerical cross-check. Rates carry the factor
//! `c`; `k` is the resonance wavenumber.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// `r = ζ/√(1+ζ²)`, the amplitude reflectivity of a thin mirror.
pub fn reflectivity(zeta: f64) -> f64 {
    zeta / (1.0 + zeta * zeta).sqrt()
}

/// `(√(1+ζ′²) − ζ′)²`, the intensity ratio between the long and short gaps
/// at a common resonance in the high-reflectivity limit.
pub fn intensity_ratio(zeta_prime: f64) -> f64 {
    let s = (1.0 + zeta_prime * zeta_prime).sqrt() - zeta_prime;
    s * s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectiveLengthFamily {
    ThreeMirror,
    FourMirrorSymmetric,
    FourMirrorAsymmetric,
}

/// Length entering `κ = c/(2ζ²L_eff)` and `G = ck/L_eff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveLength {
    pub value: f64,
    pub family: EffectiveLengthFamily,
}

impl EffectiveLength {
    /// `L(1−r′) + l(1+r′)` for `[ζ, ζ′, ζ]` with gaps `[L, l]`.
    pub fn three_mirror(zeta_prime: f64, long: f64, short: f64) -> Result<Self> {
        ensure_positive("L", long)?;
        ensure_positive("l", short)?;
        let r = reflectivity(zeta_prime);
        Ok(Self {
            value: long * (1.0 - r) + short * (1.0 + r),
            family: EffectiveLengthFamily::ThreeMirror,
        })
    }

    /// `l₁ + l₂ + L(√(1+ζ′²)−ζ′)²` for `[ζ, ζ′, ζ′, ζ]` with gaps `[l₁, L, l₂]`.
    pub fn four_mirror(zeta_prime: f64, left: f64, middle: f64, right: f64) -> Result<Self> {
        ensure_positive("l1", left)?;
        ensure_positive("L", middle)?;
        ensure_positive("l2", right)?;
        let family = if left == right {
            EffectiveLengthFamily::FourMirrorSymmetric
        } else {
            EffectiveLengthFamily::FourMirrorAsymmetric
        };
        Ok(Self { value: left + right + middle * intensity_ratio(zeta_prime), family })
    }
}

/// Two-mirror cavity `[ζ, ζ′]` of length `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoMirror {
    pub theta0: f64,
    pub k0: f64,
    pub kappa_exact: f64,
    pub kappa_high_r: f64,
    /// Mean intracavity intensity on resonance for unit incidence from the ζ side.
    pub intensity: f64,
    pub om_coupling: f64,
    pub g_over_beta: f64,
}

/// Resonance phase on the minimum branch: `2θ₀ = atan2(ζ+ζ′, ζζ′−1)`, so
/// `tan 2θ₀ = −(ζ+ζ′)/(1−ζζ′)`.
pub fn two_mirror_theta0(zeta: f64, zeta_prime: f64) -> f64 {
    0.5 * (zeta + zeta_prime).atan2(zeta * zeta_prime - 1.0)
}

/// `κ = (c/2L)(√((1+ζ²)(1+ζ′²)) − ζζ′) / (√(ζζ′)((1+ζ²)(1+ζ′²))^{1/4})`.
pub fn two_mirror_kappa_exact(zeta: f64, zeta_prime: f64, length: f64, c: f64) -> Result<f64> {
    ensure_positive("L", length)?;
    let zz = zeta * zeta_prime;
    if !(zz > 0.0) {
        return Err(Error::Domain(format!("exact two-mirror linewidth needs ζζ′ > 0, got {zz}")));
    }
    let p = (1.0 + zeta * zeta) * (1.0 + zeta_prime * zeta_prime);
    Ok(c / (2.0 * length) * (p.sqrt() - zz) / (zz.sqrt() * p.powf(0.25)))
}

/// Closed-form two-mirror quantities for resonance number `mode_index`
/// (`k₀L = θ₀ + mode_index·π`).
pub fn two_mirror(zeta: f64, zeta_prime: f64, length: f64, mode_index: i64, c: f64) -> Result<TwoMirror> {
    ensure_finite("zeta", zeta)?;
    ensure_finite("zeta_prime", zeta_prime)?;
    ensure_positive("L", length)?;
    let theta0 = two_mirror_theta0(zeta, zeta_prime) + mode_index as f64 * PI;
    let k0 = theta0 / length;
    if k0 <= 0.0 {
        return Err(Error::InvalidInput(format!("mode index {mode_index} gives k0 = {k0} <= 0")));
    }
    let p = (1.0 + zeta * zeta) * (1.0 + zeta_prime * zeta_prime);
    let dmin = p.sqrt() - zeta * zeta_prime;
    Ok(TwoMirror {
        theta0,
        k0,
        kappa_exact: two_mirror_kappa_exact(zeta, zeta_prime, length, c)?,
        kappa_high_r: c / (4.0 * length) * (1.0 / (zeta * zeta) + 1.0 / (zeta_prime * zeta_prime)),
        intensity: (1.0 + 2.0 * zeta_prime * zeta_prime) / (dmin * dmin),
        om_coupling: c * k0 / length,
        g_over_beta: 1.0 / length.sqrt(),
    })
}

/// Common resonance of `[ζ, ζ′, ζ]` with long gap `L` and short gap `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeMirrorCommon {
    pub theta0: f64,
    pub phi0: f64,
    pub kappa_exact: f64,
    pub kappa_high_r: f64,
    pub l_eff: f64,
    pub e_long_sq: f64,
    pub e_short_sq: f64,
    pub ratio: f64,
    /// `(√(2l/L), ζ′/ζ²)`; single-mode when the first exceeds the second.
    pub nonoverlap_lhs_rhs: (f64, f64),
    pub om_coupling_high_r: f64,
    /// Membrane-in-the-middle reference `(2ck/L_tot)·r′`.
    pub om_coupling_mim: f64,
}

/// Exact three-mirror common-resonance HWHM.
pub fn three_mirror_kappa_exact(zeta: f64, zeta_prime: f64, long: f64, short: f64, c: f64) -> f64 {
    let (z, zp, big, small) = (zeta, zeta_prime, long, short);
    let a = (1.0 + z * z) * (1.0 + zp * zp);
    let bracket = (small * small + big * big) * z * (1.0 + z * z) * (1.0 + 2.0 * zp * zp)
        + 2.0 * big * small * z * (1.0 + z * z)
        + (small * small - big * big) * zp * (1.0 + 2.0 * z * z) * a.sqrt();
    c / 2.0 * ((1.0 + zp * zp) / (z * bracket)).sqrt()
}

pub fn three_mirror_common(
    zeta: f64,
    zeta_prime: f64,
    long: f64,
    short: f64,
    k: f64,
    c: f64,
) -> Result<ThreeMirrorCommon> {
    ensure_finite("zeta", zeta)?;
    ensure_finite("zeta_prime", zeta_prime)?;
    ensure_positive("k", k)?;
    let l_eff = EffectiveLength::three_mirror(zeta_prime, long, short)?.value;
    let phi0 = -0.5 * ((zeta + zeta_prime) / (1.0 - zeta * zeta_prime)).atan();
    let theta0 = phi0 + PI / 2.0;
    let ratio = intensity_ratio(zeta_prime);
    let zp2 = 1.0 + zeta_prime * zeta_prime;
    let r = reflectivity(zeta_prime);
    Ok(ThreeMirrorCommon {
        theta0,
        phi0,
        kappa_exact: three_mirror_kappa_exact(zeta, zeta_prime, long, short, c),
        kappa_high_r: c / (2.0 * zeta * zeta * l_eff),
        l_eff,
        e_long_sq: 2.0 * zeta * zeta * ratio / zp2,
        e_short_sq: 2.0 * zeta * zeta / zp2,
        ratio,
        nonoverlap_lhs_rhs: ((2.0 * short / long).sqrt(), zeta_prime / (zeta * zeta)),
        om_coupling_high_r: 2.0 * c * k * r / l_eff,
        om_coupling_mim: 2.0 * c * k * r / (long + short),
    })
}

/// Common resonance of `[ζ, ζ′, ζ′, ζ]` with outer gaps `l` and middle gap `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourMirrorCommon {
    pub theta0: f64,
    pub phi0: f64,
    /// HWHM from the exact radicand, with `+2l(1+2ζ²)` inside the square.
    pub kappa_exact: f64,
    /// The same radicand with `−2l(1+2ζ²)`; `None` when negative. About three
    /// times the numerical linewidth, kept for comparison.
    pub kappa_alt_sign: Option<f64>,
    pub kappa_high_r: f64,
    pub l_eff: f64,
    pub e_short_sq: f64,
    pub e_long_sq: f64,
    /// `(1/(4ζ′²) + 2l/L, 1/ζ²)`; single-mode when the first exceeds the second.
    pub single_mode_lhs_rhs: (f64, f64),
    /// End-mirror coupling `ckζ²/(2lζ² + L(ζ√(1+ζ′²) − ζ′√(1+ζ²))²)`.
    pub om_coupling_zeta_form: f64,
    /// End-mirror coupling `ck/(2l + ρL)` from the second-order expansion of `D`.
    pub om_coupling_end: f64,
    pub g_short_over_beta: f64,
    pub g_long_over_beta: f64,
}

fn four_mirror_radicand(zeta: f64, zeta_prime: f64, middle: f64, outer: f64, sign: f64) -> f64 {
    let (z, zp, big, l) = (zeta, zeta_prime, middle, outer);
    let a = (1.0 + z * z) * (1.0 + zp * zp);
    let inner = big * ((1.0 + 2.0 * z * z) * (1.0 + 2.0 * zp * zp) - 4.0 * z * zp * a.sqrt())
        + sign * 2.0 * l * (1.0 + 2.0 * z * z);
    inner * inner - (2.0 * l + big).powi(2) - 8.0 * l * big * zp * zp
}

/// Exact symmetric four-mirror HWHM.
pub fn four_mirror_kappa_exact(zeta: f64, zeta_prime: f64, middle: f64, outer: f64, c: f64) -> Result<f64> {
    let rad = four_mirror_radicand(zeta, zeta_prime, middle, outer, 1.0);
    if !(rad > 0.0) {
        return Err(Error::OutsideValidity(format!("four-mirror linewidth radicand is {rad}")));
    }
    Ok(c / rad.sqrt())
}

/// The four-mirror HWHM with `−2l(1+2ζ²)` inside the square. Kept for
/// comparison with [`four_mirror_kappa_exact`].
pub fn four_mirror_kappa_alt_sign(zeta: f64, zeta_prime: f64, middle: f64, outer: f64, c: f64) -> Result<f64> {
    let rad = four_mirror_radicand(zeta, zeta_prime, middle, outer, -1.0);
    if !(rad > 0.0) {
        return Err(Error::OutsideValidity(format!("four-mirror linewidth radicand with −2l(1+2ζ²) is {rad}")));
    }
    Ok(c / rad.sqrt())
}

/// Weight `ρ` of the middle gap in the exact end-mirror coupling and HWHM,
/// `κ = c/(2ζ√(1+ζ²)(2l+ρL))`. Tends to `(√(1+ζ′²)−ζ′)²` for ζ ≫ 1.
pub fn four_mirror_middle_weight(zeta: f64, zeta_prime: f64) -> f64 {
    let (z2, zp2) = (zeta * zeta, zeta_prime * zeta_prime);
    let u = zeta * (1.0 + zp2).sqrt() - zeta_prime * (1.0 + z2).sqrt();
    ((1.0 + 2.0 * z2) * (1.0 + 2.0 * u * u) - (1.0 + 2.0 * zp2)) / (4.0 * z2 * (1.0 + z2))
}

pub fn four_mirror_symmetric_common(
    zeta: f64,
    zeta_prime: f64,
    middle: f64,
    outer: f64,
    k: f64,
    c: f64,
) -> Result<FourMirrorCommon> {
    ensure_finite("zeta", zeta)?;
    ensure_finite("zeta_prime", zeta_prime)?;
    ensure_positive("k", k)?;
    let l_eff = EffectiveLength::four_mirror(zeta_prime, outer, middle, outer)?.value;
    let ratio = intensity_ratio(zeta_prime);
    let z2 = zeta * zeta;
    let u = zeta * (1.0 + zeta_prime * zeta_prime).sqrt() - zeta_prime * (1.0 + z2).sqrt();
    let rho = four_mirror_middle_weight(zeta, zeta_prime);
    Ok(FourMirrorCommon {
        theta0: -0.5 * (2.0 * zeta_prime / (1.0 - zeta_prime * zeta_prime)).atan(),
        phi0: -0.5 * ((zeta + zeta_prime) / (1.0 - zeta * zeta_prime)).atan(),
        kappa_exact: four_mirror_kappa_exact(zeta, zeta_prime, middle, outer, c)?,
        kappa_alt_sign: four_mirror_kappa_alt_sign(zeta, zeta_prime, middle, outer, c).ok(),
        kappa_high_r: c / (2.0 * z2 * l_eff),
        l_eff,
        e_short_sq: 2.0 * z2,
        e_long_sq: 2.0 * z2 * ratio,
        single_mode_lhs_rhs: (
            1.0 / (4.0 * zeta_prime * zeta_prime) + 2.0 * outer / middle,
            1.0 / z2,
        ),
        om_coupling_zeta_form: c * k * z2 / (2.0 * outer * z2 + middle * u * u),
        om_coupling_end: c * k / (2.0 * outer + rho * middle),
        g_short_over_beta: 1.0 / (2.0 * outer + middle * ratio).sqrt(),
        g_long_over_beta: 1.0 / (middle + 2.0 * outer / ratio).sqrt(),
    })
}
