//! One-dimensional minimization and root refinement.

/// (3 − √5)/2
const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Golden-section search for a minimum of `f` inside `[a, b]`.
///
/// Returns the final bracket `(lo, best, hi)`. Stops when the bracket is
/// narrower than `rel_tol·|best|` or after `max_iter` reductions; function
/// values stop resolving the minimum near `sqrt(eps)` relative width, so a
/// derivative-based polish is expected afterwards when more is needed.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
    max_iter: usize,
) -> (f64, f64, f64) {
    let mut c = a + GOLDEN * (b - a);
    let mut d = b - GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a) <= rel_tol * c.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = a + GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = b - GOLDEN * (b - a);
            fd = f(d);
        }
    }
    let best = if fc <= fd { c } else { d };
    (a, best, b)
}

/// Safeguarded Newton iteration for a sign change of `g` inside `[a, b]`.
///
/// `g` returns `(value, derivative)`. Requires `g(a) < 0 < g(b)` or the
/// reverse; returns `None` when the endpoints do not bracket a root. Newton
/// steps that leave the bracket fall back to bisection.
pub fn bracketed_newton<G: FnMut(f64) -> (f64, f64)>(
    mut g: G,
    mut a: f64,
    mut b: f64,
    start: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Option<f64> {
    let (ga, _) = g(a);
    let (gb, _) = g(b);
    if ga == 0.0 {
        return Some(a);
    }
    if gb == 0.0 {
        return Some(b);
    }
    if ga.signum() == gb.signum() {
        return None;
    }
    // Orient so that g(lo) < 0.
    if ga > 0.0 {
        std::mem::swap(&mut a, &mut b);
    }
    let mut x = if start > a.min(b) && start < a.max(b) { start } else { 0.5 * (a + b) };
    for _ in 0..max_iter {
        let (gx, dgx) = g(x);
        if gx == 0.0 {
            return Some(x);
        }
        if gx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let newton = x - gx / dgx;
        let (lo, hi) = (a.min(b), a.max(b));
        let next = if dgx != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (a + b) };
        let tol = rel_tol * x.abs().max(f64::MIN_POSITIVE);
        if (next - x).abs() <= tol || (hi - lo) <= tol {
            return Some(next);
        }
        x = next;
    }
    Some(x)
}

/// Bisection for `f(x) = target` on a bracket where `f - target` changes sign.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, target: f64, mut a: f64, mut b: f64, rel_tol: f64) -> Option<f64> {
    let mut fa = f(a) - target;
    let fb = f(b) - target;
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= rel_tol * m.abs().max(f64::MIN_POSITIVE) || m == a || m == b {
            return Some(m);
        }
        let fm = f(m) - target;
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Central second difference with one Richardson extrapolation
/// (`(4·D_{h/2} − D_h)/3`), accurate to O(h⁴).
pub fn second_derivative_richardson<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    let f0 = f(x);
    let mut central = |step: f64| (f(x + step) - 2.0 * f0 + f(x - step)) / (step * step);
    let coarse = central(h);
    let fine = central(0.5 * h);
    (4.0 * fine - coarse) / 3.0
}
