//! Bisection on monotone predicates and sign changes.

/// Locate the switch point of a predicate that holds at `lo` and fails at `hi`
/// (either ordering). Returns the midpoint of the final bracket.
pub fn bisect_predicate<P: FnMut(f64) -> bool>(mut lo: f64, mut hi: f64, steps: usize, mut p: P) -> f64 {
    for _ in 0..steps {
        let m = 0.5 * (lo + hi);
        if m == lo || m == hi {
            break;
        }
        if p(m) {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Root of `f` on [a, b] given f(a) and f(b) of opposite sign.
pub fn bisect_sign<F: FnMut(f64) -> f64>(a: f64, b: f64, steps: usize, mut f: F) -> Option<f64> {
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.is_nan() || fb.is_nan() || (fa > 0.0) == (fb > 0.0) {
        return None;
    }
    let sa = fa > 0.0;
    Some(bisect_predicate(a, b, steps, |x| (f(x) > 0.0) == sa))
}

/// Minimum of a convex function on [a, b] by golden-section search.
pub fn golden_min<F: FnMut(f64) -> f64>(mut a: f64, mut b: f64, steps: usize, mut f: F) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..steps {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
