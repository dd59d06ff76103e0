//! Runs a [`JobConfig`] and collects every requested table.

use serde::{Deserialize, Serialize};

use crate::closed_form::three_mirror_common;
use crate::config::{JobConfig, OutputKind, SweepSpec};
use crate::couplings::{coupling_report, om_coupling, CouplingReport, CouplingRequest};
use crate::error::{Error, Result};
use crate::resonance::{
    analytic_overlap_criterion, find_resonances, resonance_near, scan_spectrum, AnalyticCriterion,
    CommonResonanceDesign, Family, OverlapFlag, Resonance, SearchOptions, SpectrumSample,
};
use crate::tmm::{field_segments, CavityStack, FieldSegment, Incidence, OpticalElement};

pub const TOOL_NAME: &str = "cavity-tmm";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance carried by every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub config: JobConfig,
    /// Element positions after resolving symbolic lengths and designs.
    pub elements: Vec<OpticalElement>,
}

/// Field amplitudes at one wavenumber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMap {
    pub k: f64,
    pub incidence: Incidence,
    pub segments: Vec<FieldSegment>,
}

/// Coupling report for one resonance, or the reason it could not be built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingEntry {
    pub k0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<CouplingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One common-resonance design of a fixed-total-length sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub zeta_prime: f64,
    /// Requested short gap; the design uses the nearest allowed value.
    pub short_request: f64,
    pub short: Option<f64>,
    pub long: Option<f64>,
    pub k0: Option<f64>,
    pub transmission_peak: Option<f64>,
    pub kappa: Option<f64>,
    pub overlap_flag: Option<OverlapFlag>,
    pub om_coupling: Option<f64>,
    /// Closed-form `G` of the reference geometry: the mirror-in-the-middle
    /// cavity for three mirrors, the bare outer cavity for four.
    pub om_reference: Option<f64>,
    pub c_om: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepPoint {
    pub fn om_ratio(&self) -> Option<f64> {
        self.om_coupling.zip(self.om_reference).map(|(g, r)| g / r)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct JobResults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<SpectrumSample>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonances: Option<Vec<Resonance>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap_criterion: Option<AnalyticCriterion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<FieldMap>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<CouplingEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepPoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobOutput {
    pub meta: Meta,
    pub results: JobResults,
}

/// Computes the configured outputs and sweep.
pub fn run(config: &JobConfig) -> Result<JobOutput> {
    let stack = config.build_stack()?;
    let opts = SearchOptions { c: config.c, samples_per_fsr: config.samples_per_fsr };
    let wants = |o: OutputKind| config.outputs.contains(&o);
    let mut results = JobResults::default();

    let range = config.k_range.map(|r| (r.min, r.max));
    if wants(OutputKind::Spectrum) {
        let (lo, hi) = range.ok_or_else(|| missing("k_range"))?;
        results.spectrum = Some(scan_spectrum(&stack, lo, hi, config.samples_per_fsr)?);
    }

    let need_resonances = wants(OutputKind::Resonances)
        || wants(OutputKind::Couplings)
        || (wants(OutputKind::Fields) && config.fields_at.is_none());
    let resonances = match (need_resonances, range) {
        (true, Some((lo, hi))) => Some(find_resonances(&stack, lo, hi, &opts)?),
        (true, None) => return Err(missing("k_range")),
        (false, _) => None,
    };
    if wants(OutputKind::Resonances) {
        results.resonances = resonances.clone();
        results.overlap_criterion = analytic_overlap_criterion(&stack);
    }

    if wants(OutputKind::Fields) {
        let ks: Vec<f64> = match &config.fields_at {
            Some(ks) => ks.clone(),
            None => resonances.iter().flatten().map(|r| r.k0).collect(),
        };
        let maps = ks
            .into_iter()
            .map(|k| {
                Ok(FieldMap { k, incidence: stack.incidence(), segments: field_segments(&stack, k)? })
            })
            .collect::<Result<Vec<_>>>()?;
        results.fields = Some(maps);
    }

    if wants(OutputKind::Couplings) {
        let request = CouplingRequest {
            movable_element: config.movable_element,
            delta_x: config.delta_x,
            emitter: config.emitter,
        };
        let entries = resonances
            .iter()
            .flatten()
            .map(|r| match coupling_report(&stack, r, &request, config.c) {
                Ok(report) => CouplingEntry { k0: r.k0, report: Some(report), error: None },
                Err(e) => CouplingEntry { k0: r.k0, report: None, error: Some(format!("{}: {e}", e.name())) },
            })
            .collect();
        results.couplings = Some(entries);
    }

    if let Some(sweep) = &config.sweep {
        results.sweep = Some(run_sweep(sweep, config.c, config.samples_per_fsr));
    }

    Ok(JobOutput {
        meta: Meta {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            config: config.clone(),
            elements: stack.elements().to_vec(),
        },
        results,
    })
}

fn missing(field: &str) -> Error {
    Error::InvalidInput(format!("{field} is required for the requested outputs"))
}

/// Every `(ζ′, l)` pair of the sweep; failures are recorded per point.
pub fn run_sweep(spec: &SweepSpec, c: f64, samples_per_fsr: usize) -> Vec<SweepPoint> {
    let mut points = Vec::new();
    for &zeta_prime in &spec.zeta_primes {
        for short in &spec.shorts {
            let short_request = short.value();
            let blank = SweepPoint {
                zeta_prime,
                short_request,
                short: None,
                long: None,
                k0: None,
                transmission_peak: None,
                kappa: None,
                overlap_flag: None,
                om_coupling: None,
                om_reference: None,
                c_om: None,
                error: None,
            };
            let point = sweep_point(spec, zeta_prime, short_request, c, samples_per_fsr, blank.clone())
                .unwrap_or_else(|e| SweepPoint { error: Some(format!("{}: {e}", e.name())), ..blank });
            points.push(point);
        }
    }
    points
}

fn sweep_point(
    spec: &SweepSpec,
    zeta_prime: f64,
    short_request: f64,
    c: f64,
    samples_per_fsr: usize,
    mut point: SweepPoint,
) -> Result<SweepPoint> {
    let total = spec.total_length.value();
    let design =
        CommonResonanceDesign::with_total_length(spec.shape, spec.zeta, zeta_prime, total, spec.total_mode, short_request)?;
    let stack: CavityStack = design.stack()?;
    point.short = Some(design.short);
    point.long = Some(design.long);
    point.om_reference = Some(match spec.shape {
        Family::ThreeMirror => three_mirror_common(spec.zeta, zeta_prime, design.long, design.short, design.k, c)?.om_coupling_mim,
        Family::FourMirrorSymmetric => c * design.k / design.total_length(),
    });
    let fsr = stack.fsr_estimate().unwrap_or(1.0);
    let k0 = resonance_near(&stack, design.k, 0.25 * fsr)?;
    let window = 1e-9 * k0;
    let res = find_resonances(&stack, k0 - window, k0 + window, &SearchOptions { c, samples_per_fsr })?
        .into_iter()
        .min_by(|a, b| (a.k0 - k0).abs().total_cmp(&(b.k0 - k0).abs()))
        .ok_or(Error::ResonanceLost { k: k0 })?;
    point.k0 = Some(res.k0);
    point.transmission_peak = Some(res.transmission_peak);
    point.kappa = Some(res.kappa_curvature);
    point.overlap_flag = Some(res.overlap_flag);
    let om = om_coupling(&stack, &res, spec.movable_element, None, c)?;
    point.om_coupling = Some(om.value);
    point.c_om = Some(om.value * om.value / res.kappa_curvature);
    Ok(point)
}
