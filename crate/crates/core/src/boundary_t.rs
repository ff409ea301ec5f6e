//! Boundary of the subordination domain for measures on the circle.
//!
//! Along the ray of angle theta the boundary sits at radius R_t(theta), where
//! K(r, theta) = int T(r, theta - phi) d rho(phi) reaches 1/(t-1). V_t+ is the
//! set of angles with R_t < 1, equivalently g(theta) > 1/(t-1).

use crate::error::{Error, Result};
use crate::herglotz::{HerglotzRepT, CIRCLE_ZERO_TOL};
use crate::roots::bisect_predicate;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

/// T(r, theta) = (r^2 - 1)/log r / (1 - 2 r cos theta + r^2), with its limits at r = 0 and r = 1.
pub fn t_kernel(r: f64, theta: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let c = theta.cos();
    if r >= 1.0 {
        return if c >= 1.0 { f64::INFINITY } else { 1.0 / (1.0 - c) };
    }
    // (r^2 - 1)/log r, evaluated stably near r = 1.
    let lr = r.ln();
    let f = if lr.abs() < 1e-4 { 2.0 + 2.0 * lr + 4.0 * lr * lr / 3.0 } else { (r * r - 1.0) / lr };
    f / (1.0 - 2.0 * r * c + r * r)
}

/// Residual density of the interpolant at an angle classified as a zero of rho.
/// Its Poisson extension is the constant 2 pi f(theta), which is removed so that
/// K(r, theta) tends to the finite part of g as r -> 1.
fn zero_floor(rep: &HerglotzRepT, theta: f64) -> f64 {
    if g_is_infinite(rep, theta) {
        0.0
    } else {
        2.0 * PI * rep.density_at(theta)
    }
}

/// K(r, theta) = Re u(r e^{i theta})/(-log r).
pub fn kernel_integral(rep: &HerglotzRepT, r: f64, theta: f64) -> f64 {
    kernel_with_floor(rep, r, theta, zero_floor(rep, theta))
}

fn kernel_with_floor(rep: &HerglotzRepT, r: f64, theta: f64, floor: f64) -> f64 {
    (rep.u_rho(C64::from_polar(r, theta)).re - floor) / (-r.ln())
}

/// Whether g(theta) is infinite: rho has density or an atom at theta.
pub fn g_is_infinite(rep: &HerglotzRepT, theta: f64) -> bool {
    rep.density_at(theta) > CIRCLE_ZERO_TOL || rep.atoms.iter().any(|a| (1.0 - (theta - a.pos).cos()) < 1e-14)
}

/// g(theta) = int d rho(phi)/(1 - cos(theta - phi)).
pub fn g_circle(rep: &HerglotzRepT, theta: f64) -> f64 {
    if g_is_infinite(rep, theta) {
        f64::INFINITY
    } else {
        rep.g_finite_part(theta)
    }
}

/// R_t(theta) in (0, 1] and the root residual |K(R, theta) - 1/(t-1)| (zero when R = 1).
pub fn radius_with_residual(rep: &HerglotzRepT, t: f64, theta: f64) -> Result<(f64, f64)> {
    let thr = 1.0 / (t - 1.0);
    if g_circle(rep, theta) <= thr {
        return Ok((1.0, 0.0));
    }
    let floor = zero_floor(rep, theta);
    let k = |r: f64| kernel_with_floor(rep, r, theta, floor);
    // Rounding in K grows like 1/(1 - r), so the upper bracket is searched no closer
    // to the circle than 1 - 1e-10; a root beyond that is reported at that radius.
    let Some(top) = (2..=10).map(|j| 1.0 - 10f64.powi(-j)).find(|&r| k(r) > thr) else {
        let r = 1.0 - 1e-10;
        return Ok((r, (k(r) - thr).abs()));
    };
    let r = bisect_predicate(top, 0.0, 200, |r| k(r) > thr);
    if !(r > 0.0) {
        return Err(Error::Bracket(format!("kernel integral exceeds 1/(t-1) near r = 0 at theta = {theta}")));
    }
    Ok((r, (k(r) - thr).abs()))
}

pub fn radius_r_t(rep: &HerglotzRepT, t: f64, theta: f64) -> Result<f64> {
    radius_with_residual(rep, t, theta).map(|v| v.0)
}

/// An arc of angles (start, end) with start <= end; end may exceed pi.
pub type Arc = (f64, f64);

fn in_vt(rep: &HerglotzRepT, thr: f64, theta: f64) -> bool {
    g_circle(rep, theta) > thr
}

/// V_t+ as arcs: nodes are classified on `thetas` (uniform, increasing, one period)
/// and the transitions refined by bisection.
pub fn vt_plus_t(rep: &HerglotzRepT, t: f64, thetas: &[f64]) -> Vec<Arc> {
    let thr = 1.0 / (t - 1.0);
    let n = thetas.len();
    let flags: Vec<bool> = thetas.par_iter().map(|&th| in_vt(rep, thr, th)).collect();
    if flags.iter().all(|&f| f) {
        return vec![(-PI, PI)];
    }
    if flags.iter().all(|&f| !f) {
        return vec![];
    }
    let next = |j: usize| if j + 1 < n { thetas[j + 1] } else { thetas[0] + 2.0 * PI };
    // Start scanning right after a node outside V_t+ so no arc is split.
    let s = flags.iter().position(|&f| !f).expect("some node outside");
    let mut arcs = vec![];
    let mut start: Option<f64> = None;
    for k in 1..=n {
        let j = (s + k) % n;
        let prev = (s + k - 1) % n;
        let base = if (s + k - 1) >= n { 2.0 * PI } else { 0.0 };
        let lift = |x: f64| x + base;
        if flags[j] && !flags[prev] {
            let a = lift(thetas[prev]);
            let b = lift(next(prev));
            start = Some(bisect_predicate(b, a, 60, |x| in_vt(rep, thr, x)));
        } else if !flags[j] && flags[prev] {
            let a = lift(thetas[prev]);
            let b = lift(next(prev));
            let end = bisect_predicate(a, b, 60, |x| in_vt(rep, thr, x));
            let st = start.take().expect("arc opened before closing");
            arcs.push((st, end));
        }
    }
    // Normalise so each arc starts in [-pi, pi).
    let mut arcs: Vec<Arc> = arcs
        .into_iter()
        .map(|(a, b)| {
            let k = ((a + PI) / (2.0 * PI)).floor();
            (a - 2.0 * PI * k, b - 2.0 * PI * k)
        })
        .collect();
    arcs.sort_by(|x, y| x.0.total_cmp(&y.0));
    arcs
}

/// Whether theta (any real) lies in one of the arcs.
pub fn arc_contains(arcs: &[Arc], theta: f64) -> bool {
    arcs.iter().any(|&(a, b)| {
        if b - a >= 2.0 * PI {
            return true;
        }
        let x = a + (theta - a).rem_euclid(2.0 * PI);
        x > a && x < b
    })
}

/// h_t(e^{i theta}) = Phi_t(R_t(theta) e^{i theta}), of unit modulus.
pub fn h_t_t(rep: &HerglotzRepT, t: f64, theta: f64) -> Result<C64> {
    let r = radius_r_t(rep, t, theta)?;
    h_from_radius(rep, t, theta, r)
}

/// Phi_t(r e^{i theta}) computed from the representation, checked to be unimodular.
pub fn h_from_radius(rep: &HerglotzRepT, t: f64, theta: f64, r: f64) -> Result<C64> {
    let z = C64::from_polar(r, theta);
    let mut u = rep.eval_u(z)?;
    if r >= 1.0 {
        u.re = 0.0;
    } else {
        u.re -= zero_floor(rep, theta);
    }
    let h = z * ((t - 1.0) * u).exp();
    if (h.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::Modulus(format!("|h_t| = {} at theta = {theta}", h.norm())));
    }
    Ok(h)
}

/// Sampled boundary for the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurveT {
    pub t: f64,
    pub thetas: Vec<f64>,
    pub radii: Vec<f64>,
    pub g: Vec<f64>,
    pub vt_plus: Vec<Arc>,
    pub h: Vec<C64>,
    pub residuals: Vec<f64>,
}

impl BoundaryCurveT {
    pub fn compute(rep: &HerglotzRepT, t: f64, thetas: Vec<f64>) -> Result<Self> {
        let rows: Result<Vec<(f64, f64, C64, f64)>> = thetas
            .par_iter()
            .map(|&th| {
                let (r, res) = radius_with_residual(rep, t, th)?;
                Ok((r, g_circle(rep, th), h_from_radius(rep, t, th, r)?, res))
            })
            .collect();
        let rows = rows.map_err(|e| e.at("boundary curve"))?;
        Ok(BoundaryCurveT {
            t,
            vt_plus: vt_plus_t(rep, t, &thetas),
            radii: rows.iter().map(|v| v.0).collect(),
            g: rows.iter().map(|v| v.1).collect(),
            h: rows.iter().map(|v| v.2).collect(),
            residuals: rows.iter().map(|v| v.3).collect(),
            thetas,
        })
    }

    /// Net winding of theta -> h_t(e^{i theta}) over the grid, in turns.
    pub fn h_winding(&self) -> f64 {
        let n = self.h.len();
        let mut total = 0.0;
        for j in 0..n {
            total += (self.h[(j + 1) % n] / self.h[j]).arg();
        }
        total / (2.0 * PI)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        use crate::fmt_f64 as f;
        writeln!(w, "theta,R_t,g_finite,g_value_or_inf,arg_h_t,in_vt_plus")?;
        for j in 0..self.thetas.len() {
            let th = self.thetas[j];
            writeln!(
                w,
                "{},{},{},{},{},{}",
                f(th),
                f(self.radii[j]),
                u8::from(self.g[j].is_finite()),
                f(self.g[j]),
                f(self.h[j].arg()),
                u8::from(arc_contains(&self.vt_plus, th))
            )?;
        }
        Ok(())
    }
}

/// `n` uniform angles -pi + 2 pi j / n.
pub fn uniform_thetas(n: usize) -> Vec<f64> {
    (0..n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect()
}
