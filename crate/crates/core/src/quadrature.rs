//! Adaptive Gauss-Kronrod (7/15) integration of complex-valued integrands.
//!
//! The integration range is given as a list of breakpoints. Each initial
//! panel is refined globally: the panel with the largest error estimate is
//! bisected until the summed estimate meets the tolerance.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

/// Values that can be integrated: a complex scalar or a fixed-size vector of them.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Vector of complex values integrated together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cv<const N: usize>(pub [C64; N]);

impl<const N: usize> Add for Cv<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for i in 0..N {
            self.0[i] += o.0[i];
        }
        self
    }
}
impl<const N: usize> Sub for Cv<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for i in 0..N {
            self.0[i] -= o.0[i];
        }
        self
    }
}
impl<const N: usize> Mul<f64> for Cv<N> {
    type Output = Self;
    fn mul(mut self, k: f64) -> Self {
        for i in 0..N {
            self.0[i] *= k;
        }
        self
    }
}
impl<const N: usize> QuadValue for Cv<N> {
    fn zero() -> Self {
        Cv([C64::new(0.0, 0.0); N])
    }
    fn magnitude(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-10, rel: 1e-8, max_panels: 4000 }
    }
}

/// One G7/K15 panel: returns (Kronrod estimate, |K - G|).
pub fn gk15<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).magnitude())
}

struct Panel<T> {
    a: f64,
    b: f64,
    val: T,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Integrate `f` over [points[0], points[last]] with the interior points as
/// initial panel boundaries. Points must be nondecreasing; empty panels are skipped.
pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(f: F, points: &[f64], tol: Tolerance) -> Result<T> {
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut err = 0.0;
    for w in points.windows(2) {
        if !(w[1] > w[0]) {
            continue;
        }
        let (v, e) = gk15(&f, w[0], w[1]);
        total = total + v;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], val: v, err: e });
    }
    let mut panels = heap.len();
    while err > tol.abs.max(tol.rel * total.magnitude()) {
        let p = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let m = 0.5 * (p.a + p.b);
        if panels >= tol.max_panels || !(m > p.a && m < p.b) {
            return Err(Error::Quadrature { estimate: err });
        }
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        total = total + v1 + v2 - p.val;
        err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, val: v2, err: e2 });
        panels += 1;
    }
    // Recompute the sum in a fixed order so results do not depend on refinement history.
    let mut ps: Vec<Panel<T>> = heap.into_vec();
    ps.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(ps.iter().fold(T::zero(), |s, p| s + p.val))
}

/// Insert `x` into a sorted breakpoint list if it lies strictly inside.
pub fn with_breakpoint(points: &[f64], x: f64) -> Vec<f64> {
    let mut v = points.to_vec();
    if x.is_finite() && x > v[0] && x < v[v.len() - 1] {
        let i = v.partition_point(|&p| p < x);
        if v[i] != x {
            v.insert(i, x);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| C64::new(x.powi(5), 0.0), &[0.0, 2.0], Tolerance::default()).unwrap();
        assert!((v.re - 64.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn near_pole() {
        // Imaginary part of 1/(x - ie) integrates to 2 arctan(1/e).
        let e = 1e-6;
        let f = |x: f64| C64::new(1.0, 0.0) / C64::new(x, -e);
        let v = integrate(f, &[-1.0, 0.0, 1.0], Tolerance::default()).unwrap();
        let exact = C64::new(0.0, 2.0 * (1.0 / e).atan());
        assert!((v - exact).norm() < 1e-8, "{v}");
    }

    #[test]
    fn sqrt_endpoint() {
        let v = integrate(|x| C64::new(x.sqrt(), 0.0), &[0.0, 1.0], Tolerance::default()).unwrap();
        assert!((v.re - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn breakpoint_insert() {
        assert_eq!(with_breakpoint(&[0.0, 1.0], 0.5), vec![0.0, 0.5, 1.0]);
        assert_eq!(with_breakpoint(&[0.0, 1.0], 2.0), vec![0.0, 1.0]);
    }
}
