//! Transfer-matrix products carried in double-double arithmetic.
//!
//! Near a high-finesse transmission peak the entries of the product are far
//! larger than `m22`, so an f64 product loses `log10(|m|²/|m22|)` digits to
//! cancellation. Carrying the running product as unevaluated sums of two
//! f64 keeps the result accurate to the rounding of the element matrices
//! themselves, which is what makes observables independent of the order of
//! evaluation (left versus right incidence, split gaps).

use num_complex::Complex64;

use super::TransferMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    const ZERO: Cdd = Cdd { re: Dd::ZERO, im: Dd::ZERO };

    fn from(z: Complex64) -> Self {
        Cdd { re: Dd::from(z.re), im: Dd::from(z.im) }
    }

    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).add(self.im.mul(o.im).neg()),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn value(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `diag(e^{iθ}, e^{−iθ})` for `θ = k·(right − left)`, with the gap and the
/// phase formed without rounding error and the sub-ulp part of `θ` applied
/// as a first-order rotation. Splitting a gap in two then reproduces the
/// unsplit phase to within the rounding of `sin` and `cos`.
pub(crate) fn accurate_propagation(k: f64, left: f64, right: f64) -> TransferMatrix {
    let (g_hi, g_lo) = two_sum(right, -left);
    let p = k * g_hi;
    let p_err = k.mul_add(g_hi, -p) + k * g_lo;
    let (s, c) = p.sin_cos();
    let e = Complex64::new(c - s * p_err, s + c * p_err);
    TransferMatrix::diagonal(e, e.conj())
}

/// Running 2×2 product in double-double precision.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PreciseProduct {
    m: [[Cdd; 2]; 2],
}

impl PreciseProduct {
    pub(crate) fn new(first: &TransferMatrix) -> Self {
        let mut p = Self { m: [[Cdd::ZERO; 2]; 2] };
        p.m = [
            [Cdd::from(first.m11), Cdd::from(first.m12)],
            [Cdd::from(first.m21), Cdd::from(first.m22)],
        ];
        p
    }

    /// `self ← self · rhs`.
    pub(crate) fn mul_assign(&mut self, rhs: &TransferMatrix) {
        let r = [
            [Cdd::from(rhs.m11), Cdd::from(rhs.m12)],
            [Cdd::from(rhs.m21), Cdd::from(rhs.m22)],
        ];
        let a = self.m;
        for (row, a_row) in self.m.iter_mut().zip(a) {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a_row[0].mul(r[0][j]).add(a_row[1].mul(r[1][j]));
            }
        }
    }

    pub(crate) fn value(&self) -> TransferMatrix {
        TransferMatrix::new(
            self.m[0][0].value(),
            self.m[0][1].value(),
            self.m[1][0].value(),
            self.m[1][1].value(),
        )
    }
}

/// Amplitude pair in double-double precision.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PreciseVector {
    v: [Cdd; 2],
}

impl PreciseVector {
    pub(crate) fn new(v: [Complex64; 2]) -> Self {
        Self { v: [Cdd::from(v[0]), Cdd::from(v[1])] }
    }

    /// `v ← m · v`.
    pub(crate) fn apply(&mut self, m: &TransferMatrix) {
        let [a, b] = self.v;
        self.v = [
            Cdd::from(m.m11).mul(a).add(Cdd::from(m.m12).mul(b)),
            Cdd::from(m.m21).mul(a).add(Cdd::from(m.m22).mul(b)),
        ];
    }

    pub(crate) fn value(&self) -> [Complex64; 2] {
        [self.v[0].value(), self.v[1].value()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_keeps_cancelled_digits() {
        let a = Dd::from(1.0).add(Dd::from(1e-20));
        let b = a.add(Dd::from(-1.0));
        assert_eq!(b.value(), 1e-20);
        let third = Dd::from(1.0 / 3.0);
        let p = third.mul(Dd::from(3.0)).add(Dd::from(-1.0));
        assert_eq!(p.value(), (1.0f64 / 3.0).mul_add(3.0, -1.0));
    }

    #[test]
    fn split_gap_phases_add_up() {
        let (k, a, x, b) = (17.3, 0.7, 2.9000000000000004, 11.1);
        let whole = accurate_propagation(k, a, b);
        let split = accurate_propagation(k, a, x) * accurate_propagation(k, x, b);
        assert!(whole.max_abs_diff(&split) < 4e-16);
    }

    #[test]
    fn product_matches_f64_for_benign_matrices() {
        let a = TransferMatrix::new(
            Complex64::new(1.0, 2.0),
            Complex64::new(0.5, -1.0),
            Complex64::new(-0.25, 0.0),
            Complex64::new(3.0, 1.0),
        );
        let mut p = PreciseProduct::new(&a);
        p.mul_assign(&a);
        assert!(p.value().max_abs_diff(&(a * a)) < 1e-14);
    }
}
