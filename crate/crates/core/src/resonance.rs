//! Resonance search, linewidths and single-mode validity.
//!
//! Resonances are the local minima of the transmission denominator
//! `D(k) = |m22|²`. The search scans `D` on a uniform grid fine enough to
//! resolve the compound-cavity free spectral range, brackets every sampled
//! minimum, narrows it by golden-section search and polishes the position
//! with a safeguarded Newton iteration on the exact `D′`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::scalar::{bisect, bracketed_newton, golden_section, second_derivative_richardson};
use crate::tmm::{denominator_jet_unchecked, compose_unchecked, CavityStack};

/// Relative tolerance on the refined resonance wavenumber.
pub const REFINE_REL_TOL: f64 = 1e-12;

/// Smallest accepted sampling density.
pub const MIN_SAMPLES_PER_FSR: usize = 16;

/// Grid cap for a single scan.
const MAX_SCAN_SAMPLES: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub k: f64,
    pub transmission: f64,
    pub denominator: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapFlag {
    WellResolved,
    Overlapping,
}

/// A refined transmission resonance. Linewidths carry the factor `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub k0: f64,
    pub transmission_peak: f64,
    pub kappa_curvature: f64,
    pub kappa_halfmax: Option<f64>,
    pub overlap_flag: OverlapFlag,
    /// Distance in `k` to the nearest neighbouring resonance.
    pub neighbor_spacing: f64,
}

impl Resonance {
    pub fn is_well_resolved(&self) -> bool {
        self.overlap_flag == OverlapFlag::WellResolved
    }
}

/// Options shared by the resonance search and downstream analyses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Speed of light; only scales reported rates.
    pub c: f64,
    pub samples_per_fsr: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { c: 1.0, samples_per_fsr: 64 }
    }
}

impl SearchOptions {
    pub fn with_c(c: f64) -> Self {
        Self { c, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        ensure_positive("c", self.c)?;
        if self.samples_per_fsr < MIN_SAMPLES_PER_FSR {
            return Err(Error::InvalidInput(format!(
                "samples_per_fsr must be >= {MIN_SAMPLES_PER_FSR}, got {}",
                self.samples_per_fsr
            )));
        }
        Ok(())
    }
}

fn validate_range(k_min: f64, k_max: f64) -> Result<()> {
    ensure_positive("k_min", k_min)?;
    ensure_finite("k_max", k_max)?;
    if k_max <= k_min {
        return Err(Error::InvalidInput(format!(
            "degenerate k range: k_min = {k_min} must be below k_max = {k_max}"
        )));
    }
    Ok(())
}

fn grid(stack: &CavityStack, k_min: f64, k_max: f64, samples_per_fsr: usize) -> Result<Vec<f64>> {
    let width = k_max - k_min;
    let fsr = stack.fsr_estimate().unwrap_or(width).min(width);
    let target = fsr / samples_per_fsr as f64;
    let intervals = (width / target).ceil().max(2.0);
    if intervals > MAX_SCAN_SAMPLES as f64 {
        return Err(Error::InvalidInput(format!(
            "scan would need {intervals:.0} samples; narrow the k range"
        )));
    }
    let n = intervals as usize;
    let step = width / n as f64;
    Ok((0..=n).map(|i| if i == n { k_max } else { k_min + step * i as f64 }).collect())
}

/// Uniform transmission scan with spacing at most `(π/total length)/samples_per_fsr`.
pub fn scan_spectrum(
    stack: &CavityStack,
    k_min: f64,
    k_max: f64,
    samples_per_fsr: usize,
) -> Result<Vec<SpectrumSample>> {
    validate_range(k_min, k_max)?;
    SearchOptions { c: 1.0, samples_per_fsr }.validate()?;
    let ks = grid(stack, k_min, k_max, samples_per_fsr)?;
    Ok(ks
        .into_iter()
        .map(|k| {
            let d = compose_unchecked(stack, k).m22.norm_sqr();
            SpectrumSample { k, transmission: 1.0 / d, denominator: d }
        })
        .collect())
}

/// Refines a sampled minimum of `D` bracketed by `[lo, hi]`.
fn refine_bracket(stack: &CavityStack, lo: f64, mid: f64, hi: f64) -> Option<f64> {
    let d = |k: f64| compose_unchecked(stack, k).m22.norm_sqr();
    let (a, best, b) = golden_section(d, lo, hi, 1e-10, 200);
    let slope = |k: f64| {
        let j = denominator_jet_unchecked(stack, k);
        (j.slope, j.curvature)
    };
    let polished = bracketed_newton(slope, a, b, best, 1e-15, 100)
        .or_else(|| bracketed_newton(slope, lo, hi, mid, 1e-15, 100))?;
    let jet = denominator_jet_unchecked(stack, polished);
    (jet.curvature > 0.0 && polished > lo && polished < hi).then_some(polished)
}

/// Positions of all local minima of `D` on the sampled grid, refined.
fn minima_on_grid(stack: &CavityStack, ks: &[f64]) -> Vec<f64> {
    let ds: Vec<f64> = ks.iter().map(|&k| compose_unchecked(stack, k).m22.norm_sqr()).collect();
    let mut found: Vec<f64> = Vec::new();
    for i in 1..ks.len() - 1 {
        if ds[i] < ds[i - 1] && ds[i] <= ds[i + 1] {
            if let Some(k0) = refine_bracket(stack, ks[i - 1], ks[i], ks[i + 1]) {
                if found.last().is_none_or(|&prev| (k0 - prev).abs() > 1e-9 * k0) {
                    found.push(k0);
                }
            }
        }
    }
    found
}

/// Every local minimum of `D(k)` in `[k_min, k_max]`, refined, sorted, with
/// linewidths and overlap classification filled in.
///
/// The grid extends one free spectral range beyond each end so resonances
/// at the edges still see their true neighbours.
pub fn find_resonances(
    stack: &CavityStack,
    k_min: f64,
    k_max: f64,
    options: &SearchOptions,
) -> Result<Vec<Resonance>> {
    validate_range(k_min, k_max)?;
    options.validate()?;
    let pad = stack.fsr_estimate().unwrap_or(k_max - k_min);
    let lo = (k_min - pad).max(0.5 * k_min);
    let ks = grid(stack, lo, k_max + pad, options.samples_per_fsr)?;
    let all = minima_on_grid(stack, &ks);

    let fallback_spacing = stack.fsr_estimate().unwrap_or(f64::INFINITY);
    let mut out = Vec::new();
    for (i, &k0) in all.iter().enumerate() {
        if k0 < k_min || k0 > k_max {
            continue;
        }
        let left = i.checked_sub(1).map(|j| k0 - all[j]);
        let right = all.get(i + 1).map(|&kr| kr - k0);
        let spacing = match (left, right) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => fallback_spacing,
        };
        let kappa = linewidth_curvature(stack, k0, options.c)?;
        out.push(Resonance {
            k0,
            transmission_peak: 1.0 / compose_unchecked(stack, k0).m22.norm_sqr(),
            kappa_curvature: kappa,
            kappa_halfmax: None,
            overlap_flag: OverlapFlag::WellResolved,
            neighbor_spacing: spacing,
        });
    }
    classify_overlap(stack, &mut out, options.c);
    let neighbours: Vec<(Option<f64>, Option<f64>)> = out
        .iter()
        .map(|r| {
            let idx = all.iter().position(|&k| k == r.k0).unwrap();
            (idx.checked_sub(1).map(|j| all[j]), all.get(idx + 1).copied())
        })
        .collect();
    for (r, (left, right)) in out.iter_mut().zip(neighbours) {
        if r.is_well_resolved() {
            r.kappa_halfmax = halfmax_between(stack, r, left, right, options.c).ok();
        }
    }
    Ok(out)
}

/// Refined resonance nearest to `k_guess` within `±half_window`.
pub fn resonance_near(stack: &CavityStack, k_guess: f64, half_window: f64) -> Result<f64> {
    ensure_positive("k_guess", k_guess)?;
    ensure_positive("half_window", half_window)?;
    let lo = (k_guess - half_window).max(0.5 * k_guess);
    let hi = k_guess + half_window;
    let n = 256;
    let ks: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    minima_on_grid(stack, &ks)
        .into_iter()
        .min_by(|a, b| (a - k_guess).abs().total_cmp(&(b - k_guess).abs()))
        .ok_or(Error::ResonanceLost { k: k_guess })
}

/// HWHM from the curvature of `D` at the minimum: `κ = c·√(2D/D″)`.
///
/// `D″` comes from exact differentiation of the matrix product.
pub fn linewidth_curvature(stack: &CavityStack, k0: f64, c: f64) -> Result<f64> {
    ensure_positive("k0", k0)?;
    let jet = denominator_jet_unchecked(stack, k0);
    if jet.curvature <= 0.0 || !jet.curvature.is_finite() {
        return Err(Error::DegenerateResonance { k0, curvature: jet.curvature });
    }
    Ok(c * (2.0 * jet.value / jet.curvature).sqrt())
}

/// `D″(k0)` by central differences with one Richardson step.
///
/// The default step `max(1e-7·k0, 1e-9)` is only meaningful when it is small
/// against the linewidth.
pub fn curvature_finite_difference(stack: &CavityStack, k0: f64, step: Option<f64>) -> Result<f64> {
    ensure_positive("k0", k0)?;
    let h = step.unwrap_or((1e-7 * k0).max(1e-9));
    ensure_positive("step", h)?;
    Ok(second_derivative_richardson(|k| compose_unchecked(stack, k).m22.norm_sqr(), k0, h))
}

/// HWHM from the two half-transmission points, each found by bisection.
///
/// Fails with [`Error::OverlappingResonance`] if the resonance is flagged as
/// overlapping or if a half-maximum point is not reached before the
/// neighbouring mode.
pub fn linewidth_halfmax(stack: &CavityStack, resonance: &Resonance, c: f64) -> Result<f64> {
    let left = Some(resonance.k0 - resonance.neighbor_spacing).filter(|k| *k > 0.0);
    let right = Some(resonance.k0 + resonance.neighbor_spacing);
    halfmax_between(stack, resonance, left, right, c)
}

fn halfmax_between(
    stack: &CavityStack,
    resonance: &Resonance,
    left: Option<f64>,
    right: Option<f64>,
    c: f64,
) -> Result<f64> {
    let k0 = resonance.k0;
    if !resonance.is_well_resolved() {
        return Err(Error::OverlappingResonance { k0 });
    }
    let d0 = compose_unchecked(stack, k0).m22.norm_sqr();
    let level = 2.0 * d0;
    let kappa_k = resonance.kappa_curvature / c;
    let fallback = stack.fsr_estimate().unwrap_or(10.0 * kappa_k);

    let mut edges = [0.0; 2];
    for (slot, (dir, limit)) in [(-1.0, left), (1.0, right)].into_iter().enumerate() {
        let reach = limit.map_or(fallback, |l| (l - k0).abs());
        let mut step = 0.25 * kappa_k;
        let mut inner = k0;
        loop {
            let offset = (inner - k0).abs() + step;
            if offset >= reach {
                return Err(Error::OverlappingResonance { k0 });
            }
            let x = k0 + dir * offset;
            if x <= 0.0 {
                return Err(Error::OverlappingResonance { k0 });
            }
            let jet = denominator_jet_unchecked(stack, x);
            if jet.value >= level {
                let d = |k: f64| compose_unchecked(stack, k).m22.norm_sqr();
                edges[slot] = bisect(d, level, inner, x, REFINE_REL_TOL).ok_or(Error::OverlappingResonance { k0 })?;
                break;
            }
            if dir * jet.slope <= 0.0 {
                // D turned over: the next mode starts before half maximum.
                return Err(Error::OverlappingResonance { k0 });
            }
            inner = x;
            step *= 1.6;
        }
    }
    Ok(c * 0.5 * (edges[1] - edges[0]))
}

/// Analytic single-mode condition for the three- and symmetric four-mirror
/// shapes, as `lhs > rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCriterion {
    pub shape: Family,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// `√(2l/L) > ζ′/ζ²` for `[ζ, ζ′, ζ]`, `1/(4ζ′²) + 2l/L > 1/ζ²` for
/// `[ζ, ζ′, ζ′, ζ]` with equal outer gaps. `None` for other shapes.
pub fn analytic_overlap_criterion(stack: &CavityStack) -> Option<AnalyticCriterion> {
    let z = stack.zetas();
    let g = stack.gaps();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
    match z.len() {
        3 if close(z[0], z[2]) => {
            let (long, short) = (g[0].max(g[1]), g[0].min(g[1]));
            let lhs = (2.0 * short / long).sqrt();
            let rhs = z[1] / (z[0] * z[0]);
            Some(AnalyticCriterion { shape: Family::ThreeMirror, lhs, rhs, satisfied: lhs > rhs })
        }
        4 if close(z[0], z[3]) && close(z[1], z[2]) && close(g[0], g[2]) => {
            let lhs = 1.0 / (4.0 * z[1] * z[1]) + 2.0 * g[0] / g[1];
            let rhs = 1.0 / (z[0] * z[0]);
            Some(AnalyticCriterion { shape: Family::FourMirrorSymmetric, lhs, rhs, satisfied: lhs > rhs })
        }
        _ => None,
    }
}

/// Sets `overlap_flag`: a mode is well resolved when its HWHM is below
/// `c·spacing/(2π)`, the wavenumber spacing converted to a frequency
/// spacing `c/(2·length)`. Also reports the analytic criterion when the
/// stack has a recognised shape.
pub fn classify_overlap(stack: &CavityStack, resonances: &mut [Resonance], c: f64) -> Option<AnalyticCriterion> {
    for r in resonances.iter_mut() {
        r.overlap_flag = if r.kappa_curvature < c * r.neighbor_spacing / (2.0 * PI) {
            OverlapFlag::WellResolved
        } else {
            OverlapFlag::Overlapping
        };
    }
    analytic_overlap_criterion(stack)
}

/// Stack families with closed-form common-resonance conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ThreeMirror,
    FourMirrorSymmetric,
}

/// Phases (θ₀ for the long gap, φ₀ for the short gap) at which both
/// subcavity resonance conditions hold, principal arctan branch.
pub fn common_resonance_phases(family: Family, zeta: f64, zeta_prime: f64) -> (f64, f64) {
    let short = -0.5 * ((zeta + zeta_prime) / (1.0 - zeta * zeta_prime)).atan();
    let long = match family {
        Family::ThreeMirror => short + PI / 2.0,
        Family::FourMirrorSymmetric => {
            -0.5 * (2.0 * zeta_prime / (1.0 - zeta_prime * zeta_prime)).atan()
        }
    };
    (long, short)
}

/// Gap lengths placing a common resonance at `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommonResonanceDesign {
    pub family: Family,
    pub zeta: f64,
    pub zeta_prime: f64,
    pub k: f64,
    pub theta0: f64,
    pub phi0: f64,
    /// Long gap L (the middle gap for the four-mirror family).
    pub long: f64,
    /// Short gap l (each outer gap for the four-mirror family).
    pub short: f64,
    pub mode_indices: (i64, i64),
}

impl CommonResonanceDesign {
    pub fn stack(&self) -> Result<CavityStack> {
        match self.family {
            Family::ThreeMirror => CavityStack::three_mirror(self.zeta, self.zeta_prime, self.long, self.short),
            Family::FourMirrorSymmetric => {
                CavityStack::four_mirror(self.zeta, self.zeta_prime, self.short, self.long, self.short)
            }
        }
    }

    pub fn total_length(&self) -> f64 {
        match self.family {
            Family::ThreeMirror => self.long + self.short,
            Family::FourMirrorSymmetric => self.long + 2.0 * self.short,
        }
    }

    /// Design with the short gap exactly `short`, mode indices chosen so the
    /// long gap and wavenumber land as close as possible to the requests.
    pub fn near(
        family: Family,
        zeta: f64,
        zeta_prime: f64,
        k_approx: f64,
        long_approx: f64,
        short: f64,
    ) -> Result<Self> {
        ensure_positive("k_approx", k_approx)?;
        ensure_positive("short", short)?;
        ensure_positive("long", long_approx)?;
        let (theta0, phi0) = common_resonance_phases(family, zeta, zeta_prime);
        let m = ((k_approx * short - phi0) / PI).round() as i64;
        let k = (phi0 + m as f64 * PI) / short;
        let n = ((k * long_approx - theta0) / PI).round() as i64;
        design_common_resonance(family, zeta, zeta_prime, k, (n, m))
    }

    /// Design at fixed total length with total phase index `total_mode`;
    /// the short gap is the allowed value closest to `short_approx`.
    pub fn with_total_length(
        family: Family,
        zeta: f64,
        zeta_prime: f64,
        total_length: f64,
        total_mode: i64,
        short_approx: f64,
    ) -> Result<Self> {
        ensure_positive("total_length", total_length)?;
        let (theta0, phi0) = common_resonance_phases(family, zeta, zeta_prime);
        let shorts = match family {
            Family::ThreeMirror => 1.0,
            Family::FourMirrorSymmetric => 2.0,
        };
        let k = (theta0 + shorts * phi0 + total_mode as f64 * PI) / total_length;
        let m = ((k * short_approx - phi0) / PI).round() as i64;
        let n = total_mode - (shorts as i64) * m;
        design_common_resonance(family, zeta, zeta_prime, k, (n, m))
    }
}

/// Gap lengths `L = (θ₀ + nπ)/k`, `l = (φ₀ + mπ)/k` for mode indices
/// `(n, m)`, checked a posteriori against the numerical resonance search.
pub fn design_common_resonance(
    family: Family,
    zeta: f64,
    zeta_prime: f64,
    target_k: f64,
    mode_indices: (i64, i64),
) -> Result<CommonResonanceDesign> {
    ensure_finite("zeta", zeta)?;
    ensure_finite("zeta_prime", zeta_prime)?;
    ensure_positive("target_k", target_k)?;
    let (theta0, phi0) = common_resonance_phases(family, zeta, zeta_prime);
    let (n, m) = mode_indices;
    let long = (theta0 + n as f64 * PI) / target_k;
    let short = (phi0 + m as f64 * PI) / target_k;
    if long <= 0.0 || short <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "mode indices ({n}, {m}) give non-positive gaps L = {long}, l = {short}"
        )));
    }
    let design = CommonResonanceDesign {
        family,
        zeta,
        zeta_prime,
        k: target_k,
        theta0,
        phi0,
        long,
        short,
        mode_indices,
    };
    let stack = design.stack()?;
    let half = 0.5 * stack.fsr_estimate().unwrap();
    let nearest = resonance_near(&stack, target_k, half).ok();
    match nearest {
        Some(k0) if (k0 - target_k).abs() <= 1e-6 * target_k => Ok(design),
        _ => Err(Error::DesignNotResonant { target_k, nearest }),
    }
}
