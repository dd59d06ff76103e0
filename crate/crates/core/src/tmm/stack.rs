use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// Infinitely thin lossless mirror with real polarizability `zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalElement {
    pub zeta: f64,
    pub position: f64,
}

impl OpticalElement {
    pub fn new(zeta: f64, position: f64) -> Self {
        Self { zeta, position }
    }

    /// |amplitude reflectivity| = ζ/√(1+ζ²).
    pub fn reflectivity(&self) -> f64 {
        self.zeta.abs() / (1.0 + self.zeta * self.zeta).sqrt()
    }
}

/// Side from which the unit-amplitude probe wave arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Incidence {
    #[default]
    FromLeft,
    FromRight,
}

/// Ordered set of thin mirrors along the optical axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityStack {
    elements: Vec<OpticalElement>,
    incidence: Incidence,
}

impl CavityStack {
    pub fn new(elements: Vec<OpticalElement>, incidence: Incidence) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidInput("stack must contain at least one element".into()));
        }
        for (i, e) in elements.iter().enumerate() {
            ensure_finite(&format!("elements[{i}].zeta"), e.zeta)?;
            ensure_finite(&format!("elements[{i}].position"), e.position)?;
            if e.position < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "elements[{i}].position must be >= 0, got {}",
                    e.position
                )));
            }
        }
        for (i, w) in elements.windows(2).enumerate() {
            if w[1].position <= w[0].position {
                return Err(Error::InvalidInput(format!(
                    "positions must be strictly increasing (elements[{}] at {} follows {})",
                    i + 1,
                    w[1].position,
                    w[0].position
                )));
            }
        }
        Ok(Self { elements, incidence })
    }

    /// Builds a stack whose first element sits at the origin.
    pub fn from_gaps(zetas: &[f64], gaps: &[f64]) -> Result<Self> {
        if zetas.len() != gaps.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} polarizabilities need {} gaps, got {}",
                zetas.len(),
                zetas.len().saturating_sub(1),
                gaps.len()
            )));
        }
        for (i, &g) in gaps.iter().enumerate() {
            ensure_positive(&format!("gaps[{i}]"), g)?;
        }
        let mut position = 0.0;
        let mut elements = Vec::with_capacity(zetas.len());
        for (i, &zeta) in zetas.iter().enumerate() {
            if i > 0 {
                position += gaps[i - 1];
            }
            elements.push(OpticalElement::new(zeta, position));
        }
        Self::new(elements, Incidence::FromLeft)
    }

    pub fn two_mirror(zeta: f64, zeta_prime: f64, length: f64) -> Result<Self> {
        Self::from_gaps(&[zeta, zeta_prime], &[length])
    }

    /// Outer mirrors `zeta` at 0 and L+l, middle mirror `zeta_prime` at L.
    pub fn three_mirror(zeta: f64, zeta_prime: f64, long: f64, short: f64) -> Result<Self> {
        Self::from_gaps(&[zeta, zeta_prime, zeta], &[long, short])
    }

    /// Mirrors ζ, ζ′, ζ′, ζ at 0, l₁, l₁+L, l₁+L+l₂.
    pub fn four_mirror(zeta: f64, zeta_prime: f64, left: f64, middle: f64, right: f64) -> Result<Self> {
        Self::from_gaps(&[zeta, zeta_prime, zeta_prime, zeta], &[left, middle, right])
    }

    pub fn with_incidence(mut self, incidence: Incidence) -> Self {
        self.incidence = incidence;
        self
    }

    pub fn elements(&self) -> &[OpticalElement] {
        &self.elements
    }

    pub fn incidence(&self) -> Incidence {
        self.incidence
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn zetas(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.zeta).collect()
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.elements
            .windows(2)
            .map(|w| w[1].position - w[0].position)
            .collect()
    }

    pub fn total_length(&self) -> f64 {
        self.elements.last().unwrap().position - self.elements[0].position
    }

    /// Wavenumber spacing of a simple cavity spanning the whole stack, π/length.
    /// `None` for a single element.
    pub fn fsr_estimate(&self) -> Option<f64> {
        let len = self.total_length();
        (len > 0.0).then(|| std::f64::consts::PI / len)
    }

    /// The same stack seen from the other side (x → x_first + x_last − x).
    pub fn mirrored(&self) -> Self {
        let first = self.elements[0].position;
        let last = self.elements.last().unwrap().position;
        let elements = self
            .elements
            .iter()
            .rev()
            .map(|e| OpticalElement::new(e.zeta, first + last - e.position))
            .collect();
        let incidence = match self.incidence {
            Incidence::FromLeft => Incidence::FromRight,
            Incidence::FromRight => Incidence::FromLeft,
        };
        Self { elements, incidence }
    }

    /// Moves element `index` by `dx` (positive to the right). Adjacent gaps
    /// change oppositely; moving an end mirror changes the total length.
    pub fn displaced(&self, index: usize, dx: f64) -> Result<Self> {
        if index >= self.elements.len() {
            return Err(Error::InvalidInput(format!(
                "element index {index} out of range for a stack of {}",
                self.elements.len()
            )));
        }
        ensure_finite("dx", dx)?;
        let mut elements = self.elements.clone();
        elements[index].position += dx;
        // Keep the origin at the first element so positions stay >= 0.
        if index == 0 && elements[0].position < 0.0 {
            let shift = -elements[0].position;
            for e in &mut elements {
                e.position += shift;
            }
        }
        Self::new(elements, self.incidence)
    }

    /// Multiplies every position by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        ensure_positive("scale", s)?;
        let elements = self
            .elements
            .iter()
            .map(|e| OpticalElement::new(e.zeta, e.position * s))
            .collect();
        Self::new(elements, self.incidence)
    }

    /// Inserts an element, keeping the position order.
    pub fn with_inserted(&self, element: OpticalElement) -> Result<Self> {
        let mut elements = self.elements.clone();
        let at = elements.partition_point(|e| e.position < element.position);
        elements.insert(at, element);
        Self::new(elements, self.incidence)
    }

    /// Two-mirror stack formed by the elements bounding gap `gap`.
    pub fn subcavity(&self, gap: usize) -> Result<Self> {
        if gap + 1 >= self.elements.len() {
            return Err(Error::InvalidInput(format!("stack has no gap {gap}")));
        }
        let (a, b) = (self.elements[gap], self.elements[gap + 1]);
        Self::two_mirror(a.zeta, b.zeta, b.position - a.position)
    }
}
