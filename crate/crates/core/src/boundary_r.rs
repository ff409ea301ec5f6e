//! Boundary of the subordination domain for measures on the half-line.
//!
//! For r > 0 the boundary point above r is r e^{i A_t(r)}, where A_t(r) is where
//! theta -> -Im u(r e^{i theta})/theta drops to 1/(t-1). The set V_t+ of r with
//! A_t(r) > 0 is where g(r) exceeds the same threshold, and h_t(r) is the
//! (real) image of the boundary point under Phi_t.

use crate::error::{Error, Result};
use crate::herglotz::{log_kappa_r, NevanlinnaRepR};
use crate::measures::MeasureR;
use crate::quadrature::{integrate, Tolerance};
use crate::roots::{bisect_predicate, golden_min};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

/// Upper end of the angle bracket; A_t never reaches pi.
pub const ANGLE_CAP: f64 = PI - 1e-9;

/// g(r) = int r (s^2 + 1)/(r - s)^2 d rho(s), infinite on the support of rho.
pub fn g_radial(rep: &NevanlinnaRepR, r: f64) -> f64 {
    if rep.bands.iter().any(|&(a, b)| r >= a && r <= b) || rep.atoms.iter().any(|a| a.pos == r) {
        return f64::INFINITY;
    }
    if let Some(d) = &rep.density {
        if r >= d.lo() && r <= d.hi() {
            return f64::INFINITY;
        }
    }
    let mut g = 0.0;
    for &(a, b) in &rep.bands {
        g += if b.is_infinite() { r / (a - r) } else { r * (b - a) / ((r - a) * (r - b)) };
    }
    for a in &rep.atoms {
        g += a.mass * r * (a.pos * a.pos + 1.0) / ((r - a.pos) * (r - a.pos));
    }
    if let Some(d) = &rep.density {
        let v = integrate(
            |s| C64::new(r * (s * s + 1.0) / ((r - s) * (r - s)) * d.eval(s), 0.0),
            &d.grid,
            Tolerance::default(),
        );
        g += match v {
            Ok(v) => v.re,
            Err(_) => f64::INFINITY,
        };
    }
    g
}

/// -Im u(r e^{i theta})/theta.
pub fn g_polar(mu: &MeasureR, r: f64, theta: f64) -> Result<f64> {
    Ok(-log_kappa_r(mu, C64::from_polar(r, theta))?.im / theta)
}

/// Smallest height r sin(theta) at which g_polar is evaluated.
const MIN_HEIGHT: f64 = 1e-10;

/// A_t(r) together with the residual |g_polar(r, A) - 1/(t-1)| (zero when A = 0).
pub fn angle_a_t_with_residual(mu: &MeasureR, rep: &NevanlinnaRepR, t: f64, r: f64) -> Result<(f64, f64)> {
    let thr = 1.0 / (t - 1.0);
    if g_radial(rep, r) <= thr {
        return Ok((0.0, 0.0));
    }
    let above = |th: f64| g_polar(mu, r, th).map(|g| g > thr);
    if above(ANGLE_CAP)? {
        return Err(Error::Bracket(format!("g(r, theta) stays above 1/(t-1) up to pi at r = {r}")));
    }
    let (mut lo, mut hi) = (0.0, ANGLE_CAP);
    while hi - lo > 1e-13 {
        let m = 0.5 * (lo + hi);
        // Too close to the axis to evaluate: the crossing is below the resolution.
        if r * m < MIN_HEIGHT {
            return Ok((0.0, 0.0));
        }
        if above(m)? {
            lo = m;
        } else {
            hi = m;
        }
    }
    let a = 0.5 * (lo + hi);
    let res = (g_polar(mu, r, a)? - thr).abs();
    Ok((a, res))
}

/// A_t(r): zero off V_t+, otherwise the crossing angle found by bisection.
pub fn angle_a_t(mu: &MeasureR, rep: &NevanlinnaRepR, t: f64, r: f64) -> Result<f64> {
    angle_a_t_with_residual(mu, rep, t, r).map(|v| v.0)
}

/// Endpoints of the set where g is infinite, in increasing order. The boundary
/// curve changes character at these radii.
pub fn singular_radii(rep: &NevanlinnaRepR) -> Vec<f64> {
    let mut v: Vec<f64> = infinite_set(rep).into_iter().flat_map(|(a, b)| [a, b]).collect();
    v.dedup();
    v
}

/// Closed intervals where g is infinite, merged, in increasing order.
fn infinite_set(rep: &NevanlinnaRepR) -> Vec<(f64, f64)> {
    let mut sets: Vec<(f64, f64)> = rep.bands.clone();
    sets.extend(rep.atoms.iter().map(|a| (a.pos, a.pos)));
    if let Some(d) = &rep.density {
        sets.push((d.lo(), d.hi()));
    }
    merge(sets)
}

fn merge(mut sets: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    sets.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = vec![];
    for s in sets {
        match out.last_mut() {
            Some(last) if s.0 <= last.1 => last.1 = last.1.max(s.1),
            _ => out.push(s),
        }
    }
    out
}

/// Where g crosses `thr` between `a` (g > thr side) and `b` (g <= thr side).
fn crossing(rep: &NevanlinnaRepR, thr: f64, a: f64, b: f64) -> f64 {
    bisect_predicate(a, b, 200, |x| g_radial(rep, x) > thr)
}

/// V_t+ as disjoint open intervals (the last may extend to infinity).
///
/// g is infinite on the support of rho and strictly convex on each gap, so each
/// gap contributes at most the two pieces next to its ends.
pub fn vt_plus_r(rep: &NevanlinnaRepR, t: f64) -> Vec<(f64, f64)> {
    let thr = 1.0 / (t - 1.0);
    let inf = infinite_set(rep);
    if inf.is_empty() {
        return vec![];
    }
    let mut pieces = inf.clone();
    let mut edges = vec![0.0];
    for &(a, b) in &inf {
        edges.push(a);
        edges.push(b);
    }
    edges.push(f64::INFINITY);
    for gap in edges.chunks(2) {
        let (p, q) = (gap[0], gap[1]);
        if !(q > p) {
            continue;
        }
        if p == 0.0 && q.is_infinite() {
            continue;
        }
        if p == 0.0 {
            // g increases from 0 toward q.
            let x = crossing(rep, thr, q, 0.0);
            pieces.push((x, q));
        } else if q.is_infinite() {
            // g decreases from p toward 0 at infinity.
            let mut far = 2.0 * p + 1.0;
            while g_radial(rep, far) > thr && far < 1e300 {
                far *= 2.0;
            }
            let x = crossing(rep, thr, p, far);
            pieces.push((p, x));
        } else {
            let (m, gm) = golden_min(p, q, 200, |x| g_radial(rep, x));
            if gm > thr {
                pieces.push((p, q));
            } else {
                pieces.push((p, crossing(rep, thr, p, m)));
                pieces.push((crossing(rep, thr, q, m), q));
            }
        }
    }
    merge(pieces)
}

/// h_t(r) = Phi_t(r e^{i A_t(r)}), which is real and positive.
pub fn h_t_r(mu: &MeasureR, rep: &NevanlinnaRepR, t: f64, r: f64) -> Result<f64> {
    let a = angle_a_t(mu, rep, t, r)?;
    h_from_angle(mu, t, r, a)
}

/// Phi_t at r e^{i a}, checked to lie on the positive axis.
pub fn h_from_angle(mu: &MeasureR, t: f64, r: f64, a: f64) -> Result<f64> {
    let u = if a == 0.0 { real_log_kappa(mu, r)? } else { log_kappa_r(mu, C64::from_polar(r, a))? };
    let phi = C64::from_polar(r, a) * ((t - 1.0) * u).exp();
    if phi.im.abs() > 1e-8 * phi.norm() || phi.re <= 0.0 {
        return Err(Error::Phase(format!("Phi_t = {phi} is off the positive axis at r = {r}")));
    }
    Ok(phi.norm())
}

/// log kappa at a real point off the support of rho, where kappa > 0.
pub fn real_log_kappa(mu: &MeasureR, x: f64) -> Result<C64> {
    let k = mu.kappa_real(x)?;
    if !(k > 0.0) {
        return Err(Error::Phase(format!("kappa({x}) = {k} is not positive")));
    }
    Ok(C64::new(k.ln(), 0.0))
}

/// Default r-grid: `n` log-spaced nodes covering the support of mu and its reciprocal, padded by 10.
pub fn default_r_grid(mu: &MeasureR, n: usize) -> Vec<f64> {
    let (lo, hi) = mu.support_hull();
    let a = lo.min(1.0 / hi) / 10.0;
    let b = hi.max(1.0 / lo) * 10.0;
    log_grid(a, b, n)
}

pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|j| (la + (lb - la) * j as f64 / (n - 1) as f64).exp()).collect()
}

/// Sampled boundary for the half-line.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurveR {
    pub t: f64,
    pub r_grid: Vec<f64>,
    pub angles: Vec<f64>,
    pub g: Vec<f64>,
    pub vt_plus: Vec<(f64, f64)>,
    pub h_values: Vec<f64>,
    /// |g_polar(r, A_t(r)) - 1/(t-1)| per node (zero off V_t+).
    pub residuals: Vec<f64>,
}

impl BoundaryCurveR {
    pub fn compute(mu: &MeasureR, rep: &NevanlinnaRepR, t: f64, r_grid: Vec<f64>) -> Result<Self> {
        let rows: Result<Vec<(f64, f64, f64, f64)>> = r_grid
            .par_iter()
            .map(|&r| {
                let (a, res) = angle_a_t_with_residual(mu, rep, t, r)?;
                let h = h_from_angle(mu, t, r, a)?;
                Ok((a, g_radial(rep, r), h, res))
            })
            .collect();
        let rows = rows.map_err(|e| e.at("boundary curve"))?;
        Ok(BoundaryCurveR {
            t,
            vt_plus: vt_plus_r(rep, t),
            angles: rows.iter().map(|v| v.0).collect(),
            g: rows.iter().map(|v| v.1).collect(),
            h_values: rows.iter().map(|v| v.2).collect(),
            residuals: rows.iter().map(|v| v.3).collect(),
            r_grid,
        })
    }

    pub fn in_vt_plus(&self, r: f64) -> bool {
        self.vt_plus.iter().any(|&(a, b)| r > a && r < b)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,A_t,g,h_t,in_vt_plus")?;
        for j in 0..self.r_grid.len() {
            let r = self.r_grid[j];
            writeln!(
                w,
                "{},{},{},{},{}",
                crate::fmt_f64(r),
                crate::fmt_f64(self.angles[j]),
                crate::fmt_f64(self.g[j]),
                crate::fmt_f64(self.h_values[j]),
                u8::from(self.in_vt_plus(r))
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::closed_form_rho_atomic_r;

    fn two_atom() -> (MeasureR, NevanlinnaRepR) {
        let mu = MeasureR::atomic(&[(1.0, 0.5), (4.0, 0.5)]).unwrap();
        let rep = closed_form_rho_atomic_r(&mu).unwrap();
        (mu, rep)
    }

    #[test]
    fn g_closed_form() {
        let (_, rep) = two_atom();
        for r in [0.1, 0.25, 1.0, 3.0] {
            let want = 9.0 / 40.0 * r / ((r - 0.625) * (r - 0.4));
            assert!((g_radial(&rep, r) - want).abs() < 1e-12 * want.max(1.0));
        }
        assert!((g_radial(&rep, 1.0) - 1.0).abs() < 1e-12);
        assert!(g_radial(&rep, 0.5).is_infinite());
        assert_eq!(g_radial(&NevanlinnaRepR::constant(0.3), 2.0), 0.0);
    }

    #[test]
    fn vt_plus_two_atoms() {
        let (_, rep) = two_atom();
        let v = vt_plus_r(&rep, 2.0);
        assert_eq!(v.len(), 1);
        assert!((v[0].0 - 0.25).abs() < 1e-9 && (v[0].1 - 1.0).abs() < 1e-9, "{v:?}");
        let v3 = vt_plus_r(&rep, 3.0);
        assert!(v3[0].0 <= v[0].0 && v3[0].1 >= v[0].1);
    }

    #[test]
    fn angle_and_h() {
        let (mu, rep) = two_atom();
        assert_eq!(angle_a_t(&mu, &rep, 2.0, 0.2).unwrap(), 0.0);
        let (a, res) = angle_a_t_with_residual(&mu, &rep, 2.0, 0.5).unwrap();
        assert!(a > 0.0 && res < 1e-8);
        let u = log_kappa_r(&mu, C64::from_polar(0.5, a)).unwrap();
        assert!((u.im + a).abs() < 1e-8);
        let h = h_t_r(&mu, &rep, 2.0, 0.25).unwrap();
        assert!(
            (h - 0.0625).abs() < 1e-12,
            "{h} {} {}",
            g_radial(&rep, 0.25),
            angle_a_t(&mu, &rep, 2.0, 0.25).unwrap()
        );
        assert!((h_t_r(&mu, &rep, 2.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_h_is_linear() {
        let mu = MeasureR::point(2.0).unwrap();
        let rep = closed_form_rho_atomic_r(&mu).unwrap();
        for r in [0.1, 1.0, 7.0] {
            assert_eq!(angle_a_t(&mu, &rep, 3.0, r).unwrap(), 0.0);
            let h = h_t_r(&mu, &rep, 3.0, r).unwrap();
            assert!((h - r / 4.0).abs() < 1e-14 * r);
        }
        assert!(vt_plus_r(&rep, 3.0).is_empty());
    }
}
