//! JSON job description and the built-in presets.
//!
//! Validation runs during deserialization, so every error reported by
//! `serde_json` carries the line and column of the offending value.

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::couplings::EmitterParams;
use crate::error::{Error, Result};
use crate::resonance::{CommonResonanceDesign, Family, MIN_SAMPLES_PER_FSR};
use crate::tmm::{CavityStack, Incidence, OpticalElement};

/// A length (or wavenumber) given either as a number or as a multiple of π,
/// written `{"pi": x}`. The symbolic form is kept for serialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Value(f64),
    PiMultiple(f64),
}

impl Length {
    pub fn pi(x: f64) -> Self {
        Length::PiMultiple(x)
    }

    pub fn value(self) -> f64 {
        match self {
            Length::Value(v) => v,
            Length::PiMultiple(x) => x * PI,
        }
    }
}

impl From<f64> for Length {
    fn from(v: f64) -> Self {
        Length::Value(v)
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match *self {
            Length::Value(v) => s.serialize_f64(v),
            Length::PiMultiple(x) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("pi", &x)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct LengthVisitor;

        impl<'de> Visitor<'de> for LengthVisitor {
            type Value = Length;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a finite number or {\"pi\": <number>}")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Length, E> {
                if v.is_finite() {
                    Ok(Length::Value(v))
                } else {
                    Err(E::custom("length must be finite"))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Length, E> {
                Ok(Length::Value(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Length, E> {
                Ok(Length::Value(v as f64))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Length, A::Error> {
                let mut x = None;
                while let Some(key) = map.next_key::<String>()? {
                    if key != "pi" || x.is_some() {
                        return Err(de::Error::custom(format!(
                            "unexpected key `{key}`; a symbolic length is written {{\"pi\": <number>}}"
                        )));
                    }
                    let v: f64 = map.next_value()?;
                    if !v.is_finite() {
                        return Err(de::Error::custom("pi multiple must be finite"));
                    }
                    x = Some(v);
                }
                x.map(Length::PiMultiple).ok_or_else(|| de::Error::custom("missing key `pi`"))
            }
        }

        d.deserialize_any(LengthVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub zeta: f64,
    pub position: Length,
}

/// Stack definition: explicit elements or one of the named families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum StackSpec {
    Elements {
        elements: Vec<ElementSpec>,
    },
    Two {
        zeta: f64,
        zeta_prime: f64,
        length: Length,
    },
    /// `[ζ, ζ′, ζ]` with gaps `[long, short]`.
    Three {
        zeta: f64,
        zeta_prime: f64,
        long: Length,
        short: Length,
    },
    /// `[ζ, ζ′, ζ′, ζ]` with gaps `[left, middle, right]`.
    Four {
        zeta: f64,
        zeta_prime: f64,
        left: Length,
        middle: Length,
        right: Length,
    },
    /// Gaps adjusted so a common resonance sits near `k`, keeping `short`
    /// exact and `long` as close as the mode numbers allow.
    CommonResonance {
        shape: Family,
        zeta: f64,
        zeta_prime: f64,
        k: f64,
        long: Length,
        short: Length,
    },
}

impl StackSpec {
    pub fn build(&self, incidence: Incidence) -> Result<CavityStack> {
        let stack = match self {
            StackSpec::Elements { elements } => CavityStack::new(
                elements.iter().map(|e| OpticalElement::new(e.zeta, e.position.value())).collect(),
                incidence,
            )?,
            StackSpec::Two { zeta, zeta_prime, length } => CavityStack::two_mirror(*zeta, *zeta_prime, length.value())?,
            StackSpec::Three { zeta, zeta_prime, long, short } => {
                CavityStack::three_mirror(*zeta, *zeta_prime, long.value(), short.value())?
            }
            StackSpec::Four { zeta, zeta_prime, left, middle, right } => {
                CavityStack::four_mirror(*zeta, *zeta_prime, left.value(), middle.value(), right.value())?
            }
            StackSpec::CommonResonance { shape, zeta, zeta_prime, k, long, short } => {
                CommonResonanceDesign::near(*shape, *zeta, *zeta_prime, *k, long.value(), short.value())?.stack()?
            }
        };
        Ok(stack.with_incidence(incidence))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Spectrum,
    Resonances,
    Fields,
    Couplings,
}

impl OutputKind {
    pub fn name(self) -> &'static str {
        match self {
            OutputKind::Spectrum => "spectrum",
            OutputKind::Resonances => "resonances",
            OutputKind::Fields => "fields",
            OutputKind::Couplings => "couplings",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterSpec {
    pub beta: f64,
    pub gamma: f64,
}

/// Common-resonance designs at fixed total length, one per
/// `(zeta_prime, short)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub shape: Family,
    pub zeta: f64,
    pub zeta_primes: Vec<f64>,
    pub total_length: Length,
    /// Total phase index fixing the resonance wavenumber.
    pub total_mode: i64,
    pub shorts: Vec<Length>,
    pub movable_element: usize,
}

/// Unvalidated document layout; [`JobConfig`] is built from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJobConfig {
    stack: StackSpec,
    #[serde(default)]
    incidence: Incidence,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k_range: Option<KRange>,
    #[serde(default = "default_samples_per_fsr")]
    samples_per_fsr: usize,
    #[serde(default)]
    outputs: Vec<OutputKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    emitter: Option<EmitterSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    movable_element: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fields_at: Option<Vec<f64>>,
    #[serde(default = "default_c")]
    c: f64,
    #[serde(default)]
    format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepSpec>,
}

fn default_samples_per_fsr() -> usize {
    64
}

fn default_c() -> f64 {
    1.0
}

/// A validated job. Serializes back to the same document layout with all
/// defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJobConfig", into = "RawJobConfig")]
pub struct JobConfig {
    pub stack: StackSpec,
    pub incidence: Incidence,
    pub k_range: Option<KRange>,
    pub samples_per_fsr: usize,
    pub outputs: Vec<OutputKind>,
    pub emitter: Option<EmitterParams>,
    pub movable_element: Option<usize>,
    pub delta_x: Option<f64>,
    pub fields_at: Option<Vec<f64>>,
    pub c: f64,
    pub format: Format,
    pub out: Option<String>,
    pub sweep: Option<SweepSpec>,
}

impl TryFrom<RawJobConfig> for JobConfig {
    type Error = String;

    fn try_from(raw: RawJobConfig) -> std::result::Result<Self, String> {
        let stack = raw.stack.build(raw.incidence).map_err(|e| format!("stack: {e}"))?;
        if let Some(r) = raw.k_range {
            if !(r.min > 0.0 && r.max.is_finite() && r.min < r.max) {
                return Err(format!("k_range: need 0 < min < max, got min = {}, max = {}", r.min, r.max));
            }
        }
        if raw.samples_per_fsr < MIN_SAMPLES_PER_FSR {
            return Err(format!(
                "samples_per_fsr: must be >= {MIN_SAMPLES_PER_FSR}, got {}",
                raw.samples_per_fsr
            ));
        }
        let emitter = raw
            .emitter
            .map(|e| EmitterParams::new(e.beta, e.gamma))
            .transpose()
            .map_err(|e| format!("emitter: {e}"))?;
        if let Some(i) = raw.movable_element {
            if i >= stack.len() {
                return Err(format!(
                    "movable_element: index {i} out of range for a stack of {} elements",
                    stack.len()
                ));
            }
        }
        if let Some(dx) = raw.delta_x {
            if !(dx > 0.0 && dx.is_finite()) {
                return Err(format!("delta_x: must be a positive finite number, got {dx}"));
            }
        }
        if let Some(ks) = &raw.fields_at {
            if let Some(k) = ks.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
                return Err(format!("fields_at: wavenumbers must be positive and finite, got {k}"));
            }
        }
        if !(raw.c > 0.0 && raw.c.is_finite()) {
            return Err(format!("c: must be a positive finite number, got {}", raw.c));
        }
        let needs_range = raw.outputs.iter().any(|o| *o != OutputKind::Fields) || raw.fields_at.is_none();
        if !raw.outputs.is_empty() && needs_range && raw.k_range.is_none() {
            return Err("outputs: the requested outputs need a k_range".into());
        }
        if raw.outputs.contains(&OutputKind::Couplings) && raw.movable_element.is_none() && emitter.is_none() {
            return Err("outputs: couplings need movable_element and/or emitter".into());
        }
        if let Some(s) = &raw.sweep {
            if s.zeta_primes.is_empty() || s.shorts.is_empty() {
                return Err("sweep: zeta_primes and shorts must be non-empty".into());
            }
            if s.movable_element >= 4 || (s.shape == Family::ThreeMirror && s.movable_element >= 3) {
                return Err(format!("sweep.movable_element: index {} out of range", s.movable_element));
            }
            if !(s.total_length.value() > 0.0) {
                return Err("sweep.total_length: must be > 0".into());
            }
        }
        let mut outputs = raw.outputs;
        outputs.sort();
        outputs.dedup();
        Ok(JobConfig {
            stack: raw.stack,
            incidence: raw.incidence,
            k_range: raw.k_range,
            samples_per_fsr: raw.samples_per_fsr,
            outputs,
            emitter,
            movable_element: raw.movable_element,
            delta_x: raw.delta_x,
            fields_at: raw.fields_at,
            c: raw.c,
            format: raw.format,
            out: raw.out,
            sweep: raw.sweep,
        })
    }
}

impl From<JobConfig> for RawJobConfig {
    fn from(c: JobConfig) -> Self {
        RawJobConfig {
            stack: c.stack,
            incidence: c.incidence,
            k_range: c.k_range,
            samples_per_fsr: c.samples_per_fsr,
            outputs: c.outputs,
            emitter: c.emitter.map(|e| EmitterSpec { beta: e.beta, gamma: e.gamma }),
            movable_element: c.movable_element,
            delta_x: c.delta_x,
            fields_at: c.fields_at,
            c: c.c,
            format: c.format,
            out: c.out,
            sweep: c.sweep,
        }
    }
}

impl JobConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> std::result::Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::locate(e, text))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn build_stack(&self) -> Result<CavityStack> {
        self.stack.build(self.incidence)
    }

    /// A minimal job for `stack` over `[k_min, k_max]`.
    pub fn new(stack: StackSpec, k_min: f64, k_max: f64) -> Result<Self> {
        let raw = RawJobConfig {
            stack,
            incidence: Incidence::FromLeft,
            k_range: Some(KRange { min: k_min, max: k_max }),
            samples_per_fsr: default_samples_per_fsr(),
            outputs: vec![OutputKind::Spectrum],
            emitter: None,
            movable_element: None,
            delta_x: None,
            fields_at: None,
            c: default_c(),
            format: Format::Csv,
            out: None,
            sweep: None,
        };
        JobConfig::try_from(raw).map_err(Error::InvalidInput)
    }

    /// Re-validates after programmatic edits.
    pub fn validated(self) -> Result<Self> {
        JobConfig::try_from(RawJobConfig::from(self)).map_err(Error::InvalidInput)
    }
}

/// A rejected configuration with the source position when one is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl ConfigError {
    /// Cross-field checks run after the document is read, so `serde_json`
    /// has no position for them; those point at the first occurrence of the
    /// field named at the start of the message.
    fn locate(err: serde_json::Error, text: &str) -> Self {
        let message = err.to_string();
        if err.line() > 0 {
            return ConfigError { message, line: Some(err.line()), column: Some(err.column()) };
        }
        let field = message.split([':', '.']).next().unwrap_or_default();
        let found = text.find(&format!("\"{field}\"")).map(|at| {
            let before = &text[..at];
            let line = before.matches('\n').count() + 1;
            let column = at - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            (line, column)
        });
        ConfigError { message, line: found.map(|f| f.0), column: found.map(|f| f.1) }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) if !self.message.contains(" at line ") => {
                write!(f, "{} at line {l} column {c}", self.message)
            }
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Fig3,
    FigTunnel,
    Fig4,
    Fig6,
    Fig7,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Fig3, Preset::FigTunnel, Preset::Fig4, Preset::Fig6, Preset::Fig7];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::FigTunnel => "fig_tunnel",
            Preset::Fig4 => "fig4",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|p| p.name()).collect();
            Error::InvalidInput(format!("unknown preset `{name}`; available: {}", names.join(", ")))
        })
    }

    /// The preset's parameter set as a job.
    pub fn config(self) -> JobConfig {
        use OutputKind::*;
        let emitter = Some(EmitterSpec { beta: 1.0, gamma: 1.0 });
        let raw = match self {
            // Three-mirror, one short-gap free spectral range around k ≈ 590π/l.
            Preset::Fig3 => RawJobConfig {
                stack: StackSpec::Three { zeta: 20.0, zeta_prime: 5.0, long: Length::pi(100.0), short: Length::pi(1.0) },
                k_range: Some(KRange { min: 589.5, max: 590.5 }),
                outputs: vec![Spectrum, Resonances, Couplings],
                movable_element: Some(1),
                ..preset_base()
            },
            Preset::FigTunnel => RawJobConfig {
                stack: StackSpec::Three {
                    zeta: 10.0,
                    zeta_prime: 10.0,
                    long: Length::pi(1000.0),
                    short: Length::pi(1.0),
                },
                k_range: Some(KRange { min: 589.9, max: 590.2 }),
                outputs: vec![Spectrum, Resonances],
                ..preset_base()
            },
            Preset::Fig4 => RawJobConfig {
                stack: StackSpec::Three {
                    zeta: 20.0,
                    zeta_prime: 10.0,
                    long: Length::pi(100.0),
                    short: Length::pi(1.0),
                },
                sweep: Some(SweepSpec {
                    shape: Family::ThreeMirror,
                    zeta: 20.0,
                    zeta_primes: vec![0.5, 2.0, 10.0],
                    total_length: Length::pi(101.0),
                    total_mode: 59590,
                    shorts: [0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.5]
                        .into_iter()
                        .map(Length::pi)
                        .collect(),
                    movable_element: 1,
                }),
                ..preset_base()
            },
            Preset::Fig6 => RawJobConfig {
                stack: StackSpec::Four {
                    zeta: 20.0,
                    zeta_prime: 5.0,
                    left: Length::pi(1.0),
                    middle: Length::pi(100.0),
                    right: Length::pi(1.0),
                },
                k_range: Some(KRange { min: 589.5, max: 590.5 }),
                outputs: vec![Spectrum, Resonances, Fields, Couplings],
                movable_element: Some(3),
                emitter,
                ..preset_base()
            },
            // Window around the right-subcavity mode 593, where a unity peak
            // sits next to strongly hybridized neighbours.
            Preset::Fig7 => RawJobConfig {
                stack: StackSpec::Four {
                    zeta: 20.0,
                    zeta_prime: 5.0,
                    left: Length::pi(9.91),
                    middle: Length::pi(100.0),
                    right: Length::pi(1.0),
                },
                k_range: Some(KRange { min: 592.8, max: 593.3 }),
                outputs: vec![Spectrum, Resonances, Fields, Couplings],
                movable_element: Some(3),
                emitter,
                ..preset_base()
            },
        };
        JobConfig::try_from(raw).expect("presets are valid")
    }
}

fn preset_base() -> RawJobConfig {
    RawJobConfig {
        stack: StackSpec::Two { zeta: 1.0, zeta_prime: 1.0, length: Length::Value(1.0) },
        incidence: Incidence::FromLeft,
        k_range: None,
        samples_per_fsr: default_samples_per_fsr(),
        outputs: Vec::new(),
        emitter: None,
        movable_element: None,
        delta_x: None,
        fields_at: None,
        c: default_c(),
        format: Format::Csv,
        out: None,
        sweep: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_forms() {
        let a: Length = serde_json::from_str("2.5").unwrap();
        assert_eq!(a.value(), 2.5);
        let b: Length = serde_json::from_str(r#"{"pi": 100}"#).unwrap();
        assert_eq!(b.value(), 100.0 * PI);
        assert_eq!(serde_json::to_string(&b).unwrap(), r#"{"pi":100.0}"#);
        assert!(serde_json::from_str::<Length>(r#"{"tau": 1}"#).is_err());
        assert!(serde_json::from_str::<Length>(r#""3""#).is_err());
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = JobConfig::from_json(
            r#"{"stack": {"family": "two", "zeta": 20, "zeta_prime": 20, "length": {"pi": 1}},
                "k_range": {"min": 1, "max": 3}, "outputs": ["spectrum"]}"#,
        )
        .unwrap();
        assert_eq!(c.samples_per_fsr, 64);
        assert_eq!(c.c, 1.0);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.build_stack().unwrap().total_length(), PI);
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let err = JobConfig::from_json(
            "{\n  \"stack\": {\"family\": \"two\", \"zeta\": 1, \"zeta_prime\": 1, \"length\": 1},\n  \"colour\": 3\n}",
        )
        .unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
        assert_eq!(err.line, Some(3));
        let nested = JobConfig::from_json(
            r#"{"stack": {"family": "two", "zeta": 1, "zeta_prime": 1, "length": 1, "extra": 0}}"#,
        );
        assert!(nested.is_err());
    }

    #[test]
    fn semantic_errors_are_reported() {
        let bad = [
            r#"{"stack": {"family": "two", "zeta": 1, "zeta_prime": 1, "length": -1}}"#,
            r#"{"stack": {"family": "two", "zeta": 1, "zeta_prime": 1, "length": 1}, "k_range": {"min": 3, "max": 1}}"#,
            r#"{"stack": {"family": "two", "zeta": 1, "zeta_prime": 1, "length": 1}, "samples_per_fsr": 4}"#,
            r#"{"stack": {"family": "two", "zeta": 1, "zeta_prime": 1, "length": 1}, "movable_element": 2}"#,
            r#"{"stack": {"family": "two", "zeta": 1, "zeta_prime": 1, "length": 1}, "emitter": {"beta": 0, "gamma": 1}}"#,
            r#"{"stack": {"family": "two", "zeta": 1, "zeta_prime": 1, "length": 1}, "outputs": ["spectrum"]}"#,
            r#"{"stack": {"family": "elements", "elements": [{"zeta": 1, "position": 1}, {"zeta": 1, "position": 0.5}]}}"#,
        ];
        for text in bad {
            let err = JobConfig::from_json(text).unwrap_err();
            assert!(err.line.is_some(), "{text}: {err}");
        }
    }

    #[test]
    fn config_round_trips() {
        for p in Preset::ALL {
            let c = p.config();
            let back = JobConfig::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn preset_parameters() {
        let t = Preset::FigTunnel.config();
        assert_eq!(
            t.stack,
            StackSpec::Three { zeta: 10.0, zeta_prime: 10.0, long: Length::pi(1000.0), short: Length::pi(1.0) }
        );
        let f4 = Preset::Fig4.config().sweep.unwrap();
        assert_eq!(f4.zeta_primes, vec![0.5, 2.0, 10.0]);
        assert_eq!(f4.total_length, Length::pi(101.0));
        assert!(Preset::from_name("fig5").unwrap_err().to_string().contains("fig_tunnel"));
        assert_eq!(Preset::from_name("fig7").unwrap(), Preset::Fig7);
    }
}
