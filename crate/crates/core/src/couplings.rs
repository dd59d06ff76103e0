//! Optomechanical coupling `G`, Jaynes–Cummings coupling `g` and
//! cooperativities of a single resonance.

use serde::{Deserialize, Serialize};

use crate::closed_form::two_mirror_kappa_exact;
use crate::error::{ensure_positive, Error, Result};
use crate::resonance::{resonance_near, Resonance};
use crate::tmm::{field_segments, CavityStack};

/// Relative disagreement between `G(δx)` and `G(δx/2)` above which the
/// coupling is flagged as nonlinear.
pub const LINEARITY_TOL: f64 = 0.01;

/// Emitter strength `β` (frequency·√length) and decay rate `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    pub beta: f64,
    pub gamma: f64,
}

impl EmitterParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        ensure_positive("beta", beta)?;
        ensure_positive("gamma", gamma)?;
        Ok(Self { beta, gamma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmCoupling {
    pub element: usize,
    /// `c·|δk/δx|` from the central difference at `delta_x`.
    pub value: f64,
    pub delta_x: f64,
    /// The same estimate at `delta_x/2`.
    pub half_step_value: f64,
    /// `|G(δx/2) − G(δx)| / max(|G(δx)|, |G(δx/2)|)`, zero when both vanish.
    pub linearity_deviation: f64,
    pub nonlinear: bool,
}

fn smallest_adjacent_gap(stack: &CavityStack, index: usize) -> Option<f64> {
    let gaps = stack.gaps();
    let left = index.checked_sub(1).and_then(|i| gaps.get(i)).copied();
    let right = gaps.get(index).copied();
    match (left, right) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Dispersive coupling of `resonance` to displacements of element `index`.
///
/// The element is moved by `±delta_x`, the resonance is re-refined near the
/// undisplaced `k0` and the central difference is taken. The default step
/// is `1e-6` of the smallest adjacent gap, reduced when needed so that the
/// resonance moves by no more than about a tenth of its linewidth (taking
/// `ck/gap` as the scale of `G`); larger shifts bias the difference. When
/// the measured `G` is far below that scale the step is enlarged once, up
/// to the same two limits, so the shift stays well above the resolution of
/// the refined `k0`.
pub fn om_coupling(
    stack: &CavityStack,
    resonance: &Resonance,
    index: usize,
    delta_x: Option<f64>,
    c: f64,
) -> Result<OmCoupling> {
    ensure_positive("c", c)?;
    if !resonance.is_well_resolved() {
        return Err(Error::OverlappingResonance { k0: resonance.k0 });
    }
    if index >= stack.len() {
        return Err(Error::InvalidInput(format!(
            "movable element {index} out of range for a stack of {}",
            stack.len()
        )));
    }
    let gap = smallest_adjacent_gap(stack, index)
        .ok_or_else(|| Error::InvalidInput("a single element has no coupling".into()))?;
    let max_step = 1e-6 * gap;
    let dx = delta_x.unwrap_or_else(|| max_step.min(0.1 * resonance.kappa_curvature / c * gap / resonance.k0));
    ensure_positive("delta_x", dx)?;
    if dx > 1e-4 * gap {
        return Err(Error::InvalidInput(format!(
            "delta_x = {dx} exceeds 1e-4 of the smallest adjacent gap ({gap})"
        )));
    }

    let k0 = resonance.k0;
    let spacing = if resonance.neighbor_spacing.is_finite() {
        resonance.neighbor_spacing
    } else {
        stack.fsr_estimate().unwrap()
    };
    let limit = 0.25 * spacing;
    let shifted = |d: f64| -> Result<f64> {
        let moved = stack.displaced(index, d)?;
        let k = resonance_near(&moved, k0, 0.5 * spacing)?;
        if (k - k0).abs() > limit {
            return Err(Error::BranchJump { k0, shift: k - k0, limit });
        }
        Ok(k)
    };
    let central = |d: f64| -> Result<f64> { Ok(c * (shifted(d)? - shifted(-d)?).abs() / (2.0 * d)) };

    let mut dx = dx;
    let mut value = central(dx)?;
    if delta_x.is_none() {
        let wider = if value > 0.0 { 0.1 * resonance.kappa_curvature / value } else { max_step };
        let wider = wider.min(max_step);
        if wider > 2.0 * dx {
            dx = wider;
            value = central(dx)?;
        }
    }
    let half_step_value = central(0.5 * dx)?;
    let scale = value.abs().max(half_step_value.abs());
    let linearity_deviation = if scale > 0.0 { (half_step_value - value).abs() / scale } else { 0.0 };
    Ok(OmCoupling {
        element: index,
        value,
        delta_x: dx,
        half_step_value,
        linearity_deviation,
        nonlinear: !(linearity_deviation <= LINEARITY_TOL),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JcCoupling {
    pub gap: usize,
    pub g: f64,
    pub mean_intensity: f64,
    /// Set when the gap carries no field; `g` is then 0.
    pub zero_field: bool,
}

/// `g_i = β/√(Σ_j l_j |E_j/E_i|²)` for every gap, from gap-mean intensities.
pub fn jc_coupling(stack: &CavityStack, resonance: &Resonance, emitter: &EmitterParams) -> Result<Vec<JcCoupling>> {
    if !resonance.is_well_resolved() {
        return Err(Error::OverlappingResonance { k0: resonance.k0 });
    }
    let gaps = stack.gaps();
    let intensities: Vec<f64> = field_segments(stack, resonance.k0)?
        .iter()
        .filter_map(|s| s.gap_index().map(|_| s.mean_intensity))
        .collect();
    let energy: f64 = gaps.iter().zip(&intensities).map(|(l, i)| l * i).sum();
    let max = intensities.iter().copied().fold(0.0, f64::max);
    Ok(intensities
        .iter()
        .enumerate()
        .map(|(gap, &i)| {
            let zero_field = !(i > 1e-300 && i > f64::EPSILON * max);
            let g = if zero_field { 0.0 } else { emitter.beta / (energy / i).sqrt() };
            JcCoupling { gap, g, mean_intensity: i, zero_field }
        })
        .collect())
}

/// Closed-form two-mirror cavity used to normalize cooperativities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCavity {
    pub label: String,
    pub zeta_left: f64,
    pub zeta_right: f64,
    pub length: f64,
    pub kappa: f64,
    /// End-mirror coupling `ck/length`.
    pub om_coupling: f64,
    pub c_om: f64,
    pub g: Option<f64>,
    pub c_jc: Option<f64>,
}

impl ReferenceCavity {
    pub fn new(
        label: impl Into<String>,
        zeta_left: f64,
        zeta_right: f64,
        length: f64,
        k: f64,
        c: f64,
        emitter: Option<&EmitterParams>,
    ) -> Result<Self> {
        let kappa = two_mirror_kappa_exact(zeta_left, zeta_right, length, c)?;
        let om_coupling = c * k / length;
        let g = emitter.map(|e| e.beta / length.sqrt());
        Ok(Self {
            label: label.into(),
            zeta_left,
            zeta_right,
            length,
            kappa,
            om_coupling,
            c_om: om_coupling * om_coupling / kappa,
            g,
            c_jc: g.zip(emitter).map(|(g, e)| g * g / (kappa * e.gamma)),
        })
    }
}

/// Reference cavities at wavenumber `k`: every gap as an isolated
/// two-mirror cavity (`gap_<i>`), the outer mirrors closing the shortest
/// gap (`symmetric_short`) and the outer mirrors spanning the whole stack
/// (`bare`). References whose closed form is undefined are skipped.
pub fn standard_references(
    stack: &CavityStack,
    k: f64,
    c: f64,
    emitter: Option<&EmitterParams>,
) -> Vec<ReferenceCavity> {
    let z = stack.zetas();
    let gaps = stack.gaps();
    let mut refs = Vec::new();
    for (i, &l) in gaps.iter().enumerate() {
        refs.extend(ReferenceCavity::new(format!("gap_{i}"), z[i], z[i + 1], l, k, c, emitter).ok());
    }
    if let Some(short) = gaps.iter().copied().reduce(f64::min) {
        let outer = z[0];
        refs.extend(ReferenceCavity::new("symmetric_short", outer, outer, short, k, c, emitter).ok());
        refs.extend(ReferenceCavity::new("bare", z[0], z[z.len() - 1], stack.total_length(), k, c, emitter).ok());
    }
    refs
}

/// Couplings and cooperativities of one resonance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub resonance: Resonance,
    pub om: Option<OmCoupling>,
    pub jc: Vec<JcCoupling>,
    pub emitter: Option<EmitterParams>,
    /// `G²/κ`.
    pub c_om: Option<f64>,
    /// `g_i²/(κγ)` per gap.
    pub c_jc_per_gap: Vec<f64>,
    pub references: Vec<ReferenceCavity>,
    pub warnings: Vec<String>,
}

impl CouplingReport {
    pub fn reference(&self, label: &str) -> Option<&ReferenceCavity> {
        self.references.iter().find(|r| r.label == label)
    }

    pub fn om_coupling(&self) -> Option<f64> {
        self.om.map(|o| o.value)
    }

    pub fn g_per_gap(&self) -> Vec<f64> {
        self.jc.iter().map(|j| j.g).collect()
    }
}

/// Fills `C_om = G²/κ` and `C_jc,i = g_i²/(κγ)` using the curvature HWHM.
pub fn cooperativities(
    resonance: Resonance,
    om: Option<OmCoupling>,
    jc: Vec<JcCoupling>,
    emitter: Option<EmitterParams>,
) -> Result<CouplingReport> {
    let kappa = resonance.kappa_curvature;
    if !(kappa > 0.0) {
        return Err(Error::InvalidInput(format!("linewidth must be > 0, got {kappa}")));
    }
    let mut warnings = Vec::new();
    if let Some(o) = om.filter(|o| o.nonlinear) {
        warnings.push(format!(
            "nonlinear displacement response: G(dx) and G(dx/2) differ by {:.3e}",
            o.linearity_deviation
        ));
    }
    for j in jc.iter().filter(|j| j.zero_field) {
        warnings.push(format!("gap {} carries no field; g set to 0", j.gap));
    }
    let c_jc_per_gap = match emitter {
        Some(e) => jc.iter().map(|j| j.g * j.g / (kappa * e.gamma)).collect(),
        None => Vec::new(),
    };
    Ok(CouplingReport {
        resonance,
        c_om: om.map(|o| o.value * o.value / kappa),
        om,
        jc,
        emitter,
        c_jc_per_gap,
        references: Vec::new(),
        warnings,
    })
}

/// What to compute for a resonance.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CouplingRequest {
    pub movable_element: Option<usize>,
    pub delta_x: Option<f64>,
    pub emitter: Option<EmitterParams>,
}

/// Full report: `G` for the movable element, `g` per gap, cooperativities
/// and the standard reference cavities.
pub fn coupling_report(
    stack: &CavityStack,
    resonance: &Resonance,
    request: &CouplingRequest,
    c: f64,
) -> Result<CouplingReport> {
    let om = request
        .movable_element
        .map(|i| om_coupling(stack, resonance, i, request.delta_x, c))
        .transpose()?;
    let jc = match &request.emitter {
        Some(e) => jc_coupling(stack, resonance, e)?,
        None => Vec::new(),
    };
    let mut report = cooperativities(*resonance, om, jc, request.emitter)?;
    report.references = standard_references(stack, resonance.k0, c, request.emitter.as_ref());
    Ok(report)
}
