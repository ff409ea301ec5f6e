//! Integral representations of u = log kappa.
//!
//! Half-line: u(z) = a + int (1 + z s)/(z - s) d rho(s), with rho made of
//! closed-form bands (density 1/(1+s^2) where kappa < 0 on a gap of the
//! support), atoms and a gridded density recovered from boundary values.
//!
//! Circle: u(z) = i alpha + int (zeta + z)/(zeta - z) d rho(zeta), with the
//! density of rho sampled on a uniform periodic grid and read through its
//! trigonometric interpolant.

use crate::error::{Error, Result};
use crate::measures::{Atom, Density, Measure, MeasureR, MeasureT, Transform};
use crate::quadrature::{integrate, with_breakpoint, Tolerance};
use crate::roots::bisect_sign;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde_json::{json, Value};
use std::f64::consts::{FRAC_PI_2, PI};

/// Default relative offsets (half-line) and radial gaps (circle) for boundary limits.
pub const EPS_SCHEDULE: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// Values of the circle density below this are treated as zero.
pub const CIRCLE_ZERO_TOL: f64 = 1e-9;

/// Principal log of kappa on the half-line, with Im u kept in (-pi, 0] on the upper half-plane.
pub fn log_kappa_r(mu: &MeasureR, z: C64) -> Result<C64> {
    let mut u = mu.kappa(z)?.ln();
    if z.im > 0.0 && u.im > FRAC_PI_2 {
        u.im -= 2.0 * PI;
    } else if z.im < 0.0 && u.im < -FRAC_PI_2 {
        u.im += 2.0 * PI;
    }
    Ok(u)
}

/// Log of kappa on the disc, continued radially from u(0) = -log eta'(0).
pub fn log_kappa_t(mu: &MeasureT, z: C64) -> Result<C64> {
    mu.check_domain(z)?;
    let u0 = -mu.mean().ln();
    let rad = z.norm();
    if rad == 0.0 {
        return Ok(u0);
    }
    let dir = z / rad;
    let mut prev = u0;
    let mut r = 0.0;
    let mut h = rad / 8.0;
    while r < rad {
        let next = (r + h).min(rad);
        let cand = near_branch(mu.kappa(dir * next)?.ln(), prev);
        if (cand.im - prev.im).abs() <= FRAC_PI_2 {
            prev = cand;
            r = next;
            h *= 2.0;
        } else {
            h *= 0.5;
            if h < 1e-13 * rad.max(1e-300) {
                return Err(Error::Branch(format!("phase jump unresolved near radius {r} toward {z}")));
            }
        }
    }
    Ok(prev)
}

/// Shift `w` by a multiple of 2 pi i to land closest to `reference`.
pub fn near_branch(w: C64, reference: C64) -> C64 {
    let k = ((reference.im - w.im) / (2.0 * PI)).round();
    C64::new(w.re, w.im + 2.0 * PI * k)
}

pub fn log_kappa(mu: &Measure, z: C64) -> Result<C64> {
    match mu {
        Measure::R(m) => log_kappa_r(m, z),
        Measure::T(m) => log_kappa_t(m, z),
    }
}

/// Representation of u on the half-line.
#[derive(Debug, Clone, PartialEq)]
pub struct NevanlinnaRepR {
    pub a: f64,
    /// Intervals carrying rho = ds/(1+s^2); the upper end may be infinite.
    pub bands: Vec<(f64, f64)>,
    pub atoms: Vec<Atom>,
    /// Gridded density of rho.
    pub density: Option<Density>,
    pub diagnostics: Vec<String>,
}

fn band_term(lo: f64, hi: f64, z: C64) -> C64 {
    let l = (C64::new(lo, 0.0) - z).ln();
    if hi.is_infinite() {
        l - 0.5 * (1.0 + lo * lo).ln()
    } else {
        l - (C64::new(hi, 0.0) - z).ln() + 0.5 * ((1.0 + hi * hi) / (1.0 + lo * lo)).ln()
    }
}

impl NevanlinnaRepR {
    /// rho = 0.
    pub fn constant(a: f64) -> Self {
        NevanlinnaRepR { a, bands: vec![], atoms: vec![], density: None, diagnostics: vec![] }
    }

    pub fn total_mass(&self) -> f64 {
        let b: f64 = self.bands.iter().map(|&(l, h)| h.atan() - l.atan()).sum();
        b + self.atoms.iter().map(|a| a.mass).sum::<f64>() + self.density.as_ref().map_or(0.0, |d| d.mass())
    }

    /// Density of rho at s (bands and grid; atoms excluded).
    pub fn density_at(&self, s: f64) -> f64 {
        let mut v = self.density.as_ref().map_or(0.0, |d| d.eval(s));
        if self.bands.iter().any(|&(l, h)| s > l && s < h) {
            v += 1.0 / (1.0 + s * s);
        }
        v
    }

    /// Whether s lies in the closed support of rho.
    pub fn in_support(&self, s: f64) -> bool {
        self.bands.iter().any(|&(l, h)| s >= l && s <= h)
            || self.atoms.iter().any(|a| a.pos == s)
            || self.density.as_ref().is_some_and(|d| s >= d.lo() && s <= d.hi() && d.eval(s) > 0.0)
    }

    /// u(z) - a.
    pub fn integral(&self, z: C64) -> Result<C64> {
        let mut v = C64::new(0.0, 0.0);
        for &(l, h) in &self.bands {
            v += band_term(l, h, z);
        }
        for a in &self.atoms {
            v += a.mass * (1.0 + z * a.pos) / (z - a.pos);
        }
        if let Some(d) = &self.density {
            let pts = with_breakpoint(&d.grid, z.re);
            v += integrate(|s| (1.0 + z * s) / (z - s) * d.eval(s), &pts, Tolerance::default())?;
        }
        Ok(v)
    }

    pub fn eval_u(&self, z: C64) -> Result<C64> {
        if z.im == 0.0 && self.in_support(z.re) {
            return Err(Error::Domain(format!("{z} lies on the support of rho")));
        }
        Ok(self.a + self.integral(z)?)
    }

    pub fn to_json(&self) -> Value {
        let d = self.density.clone().unwrap_or(Density { grid: vec![], values: vec![] });
        json!({
            "a": self.a,
            "rho": {
                "atoms": self.atoms,
                "bands": self.bands.iter().map(|&(l, h)| json!([l, if h.is_finite() { json!(h) } else { Value::Null }])).collect::<Vec<_>>(),
                "grid": d.grid,
                "values": d.values,
            }
        })
    }
}

/// Intervals of (0, inf) off the support where kappa < 0, found from the
/// monotonicity of psi(x)/x and 1 + psi(x) between consecutive singular points.
pub fn kappa_bands(mu: &MeasureR) -> Result<Vec<(f64, f64)>> {
    let mut sing: Vec<f64> = mu.atoms.iter().map(|a| 1.0 / a.pos).collect();
    let window = mu.ac.as_ref().map(|d| (1.0 / d.hi(), 1.0 / d.lo()));
    if let Some((wl, wh)) = window {
        sing.retain(|&p| p < wl || p > wh);
        sing.push(wl);
        sing.push(wh);
    }
    sing.sort_by(f64::total_cmp);
    let mut cuts = vec![0.0];
    cuts.extend(sing);
    cuts.push(f64::INFINITY);
    let mut bands: Vec<(f64, f64)> = vec![];
    for w in cuts.windows(2) {
        let (l, r) = (w[0], w[1]);
        if let Some((wl, wh)) = window {
            if l >= wl && r <= wh {
                continue;
            }
        }
        let is_edge = |p: f64| window.is_some_and(|(wl, wh)| p == wl || p == wh);
        for b in gap_bands(mu, l, r, is_edge(l), is_edge(r))? {
            match bands.last_mut() {
                Some(last) if (b.0 - last.1).abs() <= 1e-14 * b.0 => last.1 = b.1,
                _ => bands.push(b),
            }
        }
    }
    Ok(bands)
}

fn real_moments(mu: &MeasureR, x: f64) -> Result<(f64, f64)> {
    let m = mu.moments_unchecked(C64::new(x, 0.0), false)?;
    Ok((m.psi_over_z.re, m.one_plus_psi.re))
}

/// Bands inside one analytic gap (l, r). Near an atom pole the moments blow up
/// like 1/d, near an edge of the density window only like log d, so the probe
/// offset from a window edge is larger to keep the quadrature well conditioned.
fn gap_bands(mu: &MeasureR, l: f64, r: f64, l_edge: bool, r_edge: bool) -> Result<Vec<(f64, f64)>> {
    let iso = |what: &str| Error::RootIsolation(format!("{what} on ({l}, {r})"));
    let off = |edge: bool| if edge { 1e-10 } else { 1e-13 };
    let lo = if l == 0.0 { 0.0 } else { l * (1.0 + off(l_edge)) };
    // Finite stand-in for the right end, with the limiting signs already attained.
    let (hi, sa_hi, sb_hi) = if r.is_infinite() {
        let sb = if mu.mass_at_zero > 0.0 { 1.0 } else { -1.0 };
        let mut x = (2.0 * l).max(1.0);
        let mut k = 0;
        loop {
            let (a, b) = real_moments(mu, x)?;
            if a < 0.0 && b.signum() == sb {
                break;
            }
            x *= 2.0;
            k += 1;
            if k > 2000 {
                return Err(iso("tail signs"));
            }
        }
        (x, -1.0, sb)
    } else {
        let x = r * (1.0 - off(r_edge));
        let (a, b) = real_moments(mu, x)?;
        (x, a.signum(), b.signum())
    };
    let (sa_lo, sb_lo) = if lo == 0.0 {
        (1.0, 1.0)
    } else {
        let (a, b) = real_moments(mu, lo)?;
        (a.signum(), b.signum())
    };
    let root = |which: usize| -> Result<f64> {
        bisect_sign(lo, hi, 200, |x| {
            real_moments(mu, x).map(|v| if which == 0 { v.0 } else { v.1 }).unwrap_or(f64::NAN)
        })
        .ok_or_else(|| iso(if which == 0 { "psi/x root" } else { "1+psi root" }))
    };
    let ra = if sa_lo != sa_hi { Some(root(0)?) } else { None };
    let rb = if sb_lo != sb_hi { Some(root(1)?) } else { None };
    let sign_at = |x: f64| {
        let sa = match ra {
            Some(p) if x > p => sa_hi,
            _ => sa_lo,
        };
        let sb = match rb {
            Some(p) if x > p => sb_hi,
            _ => sb_lo,
        };
        sa * sb
    };
    let mut edges = vec![l];
    edges.extend(ra.iter().chain(rb.iter()).copied());
    edges.push(r);
    edges.sort_by(f64::total_cmp);
    let mut out = vec![];
    for e in edges.windows(2) {
        if !(e[1] > e[0]) {
            continue;
        }
        let mid = if e[1].is_infinite() { e[0] * 2.0 + 1.0 } else { 0.5 * (e[0] + e[1]) };
        if sign_at(mid) < 0.0 {
            out.push((e[0], e[1]));
        }
    }
    Ok(out)
}

/// Exact rho for a purely atomic measure: bands where kappa < 0.
pub fn closed_form_rho_atomic_r(mu: &MeasureR) -> Result<NevanlinnaRepR> {
    if !mu.is_atomic() {
        return Err(Error::InvalidMeasure("closed-form rho requires a purely atomic measure".into()));
    }
    let mut rep = NevanlinnaRepR::constant(0.0);
    rep.bands = kappa_bands(mu)?;
    fix_constant_r(mu, &mut rep)?;
    Ok(rep)
}

fn fix_constant_r(mu: &MeasureR, rep: &mut NevanlinnaRepR) -> Result<()> {
    let z = C64::new(-1.0, 0.0);
    rep.a = log_kappa_r(mu, z)?.re - rep.integral(z)?.re;
    Ok(())
}

/// Cosine-clustered nodes on [a, b], endpoints included.
pub fn cos_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|j| a + (b - a) * 0.5 * (1.0 - (PI * j as f64 / n as f64).cos())).collect()
}

/// Second differences below this pass the contraction check: for a smooth limit the
/// linear and quadratic terms can cancel in the first difference.
const RICHARDSON_FLOOR: f64 = 1e-5;

/// Two-point first-order extrapolation to h = 0 with a contraction test on three estimates.
fn richardson(h: &[f64; 3], v: [f64; 3]) -> Option<f64> {
    let d1 = v[1] - v[0];
    let d2 = v[2] - v[1];
    if d2.abs() > d1.abs().max(RICHARDSON_FLOOR) {
        return None;
    }
    Some((h[1] * v[2] - h[2] * v[1]) / (h[1] - h[2]))
}

/// Extract the half-line representation. `n` is the target number of nodes used
/// for the gridded part of rho (on the reciprocal of the density support of mu).
pub fn extract_rep_r(mu: &MeasureR, n: usize, eps: &[f64; 3]) -> Result<NevanlinnaRepR> {
    let mut rep = NevanlinnaRepR::constant(0.0);
    rep.bands = kappa_bands(mu).map_err(|e| e.at("rho bands"))?;
    if let Some(d) = &mu.ac {
        let (wl, wh) = (1.0 / d.hi(), 1.0 / d.lo());
        let mut brk: Vec<f64> = d.grid.iter().map(|g| 1.0 / g).collect();
        brk.extend(mu.atoms.iter().map(|a| 1.0 / a.pos).filter(|&p| p > wl && p < wh));
        brk.sort_by(f64::total_cmp);
        brk.dedup();
        let per = (n / (brk.len() - 1)).max(8);
        let mut xs: Vec<f64> = vec![];
        for w in brk.windows(2) {
            let seg = cos_nodes(w[0], w[1], per);
            let skip = if xs.is_empty() { 0 } else { 1 };
            xs.extend_from_slice(&seg[skip..]);
        }
        // Heights are relative to the distance from the nearest jump of phi, so
        // nodes next to a window edge or an embedded atom still see a contracting sequence.
        let mut jumps = vec![wl, wh];
        jumps.extend(mu.atoms.iter().map(|a| 1.0 / a.pos).filter(|&p| p > wl && p < wh));
        let phis: Vec<Result<(f64, Option<String>)>> = xs
            .par_iter()
            .map(|&x| {
                let d = jumps.iter().map(|&j| (x - j).abs()).fold(f64::INFINITY, f64::min);
                let scale = if d > 0.0 { x.min(10.0 * d) } else { x };
                let mut v = [0.0; 3];
                for (k, e) in eps.iter().enumerate() {
                    v[k] = -log_kappa_r(mu, C64::new(x, e * scale)).map_err(|e| e.at("rho density"))?.im / PI;
                }
                let r = richardson(eps, v).ok_or_else(|| Error::Extrapolation(format!("x = {x}, estimates {v:?}")))?;
                let note = (r < -1e-9).then(|| format!("negative rho density {r:e} clipped at {x}"));
                Ok((r.clamp(0.0, 1.0), note))
            })
            .collect();
        let mut vals = Vec::with_capacity(xs.len());
        for (p, x) in phis.into_iter().zip(&xs) {
            let (phi, note) = p?;
            if let Some(nt) = note {
                rep.diagnostics.push(nt);
            }
            vals.push(phi / (1.0 + x * x));
        }
        rep.density = Some(Density::new(xs, vals)?);
    }
    fix_constant_r(mu, &mut rep).map_err(|e| e.at("rho constant"))?;
    Ok(rep)
}

/// Representation of u on the disc.
#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzRepT {
    pub alpha: f64,
    pub atoms: Vec<Atom>,
    /// Density of rho at the angles -pi + 2 pi j / N.
    pub values: Vec<f64>,
    coeffs: Vec<C64>,
    pub diagnostics: Vec<String>,
}

impl HerglotzRepT {
    pub fn from_samples(alpha: f64, values: Vec<f64>, atoms: Vec<Atom>) -> Result<Self> {
        let n = values.len();
        if n < 8 {
            return Err(Error::InvalidMeasure("circle representation needs at least 8 samples".into()));
        }
        let mut buf: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let kmax = (n - 1) / 2;
        let coeffs = (0..=kmax)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                buf[k] * (sign / n as f64)
            })
            .collect();
        Ok(HerglotzRepT { alpha, atoms, values, coeffs, diagnostics: vec![] })
    }

    pub fn constant(alpha: f64) -> Self {
        Self::from_samples(alpha, vec![0.0; 8], vec![]).expect("fixed size")
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.values.len();
        (0..n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect()
    }

    pub fn total_mass(&self) -> f64 {
        2.0 * PI * self.coeffs[0].re + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }

    /// Trigonometric interpolant of the rho density.
    pub fn density_at(&self, theta: f64) -> f64 {
        let e = C64::from_polar(1.0, theta);
        self.coeffs[0].re + 2.0 * (e * horner(&self.coeffs[1..], e)).re
    }

    /// int (zeta + z)/(zeta - z) d rho, valid for |z| <= 1 away from rho atoms.
    pub fn u_rho(&self, z: C64) -> C64 {
        let mut v = 2.0 * PI * self.coeffs[0] + 4.0 * PI * z * horner(&self.coeffs[1..], z);
        for a in &self.atoms {
            let zeta = C64::from_polar(1.0, a.pos);
            v += a.mass * (zeta + z) / (zeta - z);
        }
        v
    }

    pub fn eval_u(&self, z: C64) -> Result<C64> {
        if !(z.norm() <= 1.0 + 1e-15) {
            return Err(Error::Domain(format!("{z} outside the closed disc")));
        }
        Ok(C64::new(0.0, self.alpha) + self.u_rho(z))
    }

    /// int d rho(phi)/(1 - cos(theta - phi)) computed as if the density vanished at theta:
    /// minus the radial derivative of Re u at the boundary.
    pub fn g_finite_part(&self, theta: f64) -> f64 {
        let e = C64::from_polar(1.0, theta);
        let mut s = C64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            s = s * e + c * k as f64;
        }
        let mut g = -4.0 * PI * (s * e).re;
        for a in &self.atoms {
            g += a.mass / (1.0 - (theta - a.pos).cos());
        }
        g
    }

    pub fn to_json(&self) -> Value {
        json!({
            "alpha": self.alpha,
            "rho": { "atoms": self.atoms, "grid": self.grid(), "values": self.values }
        })
    }
}

/// sum_{k>=1} c_k z^{k-1}.
fn horner(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &ck| acc * z + ck)
}

/// Extract the circle representation on `n` uniform angles, extrapolating r -> 1
/// through the radii 1 - gaps[k].
pub fn extract_rep_t(mu: &MeasureT, n: usize, gaps: &[f64; 3]) -> Result<HerglotzRepT> {
    let mean = mu.mean();
    if mean.norm() == 0.0 {
        return Err(Error::ZeroEta("first moment vanishes".into()));
    }
    let alpha = -mean.arg();
    let thetas: Vec<f64> = (0..n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect();
    let vals: Result<Vec<f64>> = thetas
        .par_iter()
        .map(|&th| {
            let mut v = [0.0; 3];
            for (k, g) in gaps.iter().enumerate() {
                v[k] = mu.kappa(C64::from_polar(1.0 - g, th))?.norm().ln() / (2.0 * PI);
            }
            richardson(gaps, v).ok_or_else(|| Error::Extrapolation(format!("theta = {th}, estimates {v:?}")))
        })
        .collect();
    let mut vals = vals?;
    let mut notes = vec![];
    for (v, th) in vals.iter_mut().zip(&thetas) {
        if *v < -1e-9 {
            notes.push(format!("negative rho density {v:e} clipped at theta = {th}"));
        }
        *v = v.max(0.0);
    }
    let mut rep = HerglotzRepT::from_samples(alpha, vals, vec![])?;
    let deficit = -mean.norm().ln() - rep.total_mass();
    if deficit.abs() > 1e-6 {
        notes.push(format!("rho mass deficit {deficit:e} against -log|eta'(0)|"));
    }
    rep.diagnostics = notes;
    Ok(rep)
}

/// Either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Rep {
    R(NevanlinnaRepR),
    T(HerglotzRepT),
}

impl Rep {
    pub fn eval_u(&self, z: C64) -> Result<C64> {
        match self {
            Rep::R(r) => r.eval_u(z),
            Rep::T(r) => r.eval_u(z),
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            Rep::R(r) => r.total_mass(),
            Rep::T(r) => r.total_mass(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Rep::R(r) => r.to_json(),
            Rep::T(r) => r.to_json(),
        }
    }
}

/// Extract with default settings: `n` nodes and the default limit schedule.
pub fn extract_rep(mu: &Measure, n: usize) -> Result<Rep> {
    match mu {
        Measure::R(m) => extract_rep_r(m, n, &EPS_SCHEDULE).map(Rep::R),
        Measure::T(m) => extract_rep_t(m, n, &EPS_SCHEDULE).map(Rep::T),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn point_mass_rep() {
        let mu = MeasureR::point(3.0).unwrap();
        assert!((log_kappa_r(&mu, c(0.2, 0.5)).unwrap() - c(-(3f64.ln()), 0.0)).norm() < 1e-14);
        let rep = closed_form_rho_atomic_r(&mu).unwrap();
        assert!(rep.bands.is_empty());
        assert!((rep.a + 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn two_atom_bands() {
        let mu = MeasureR::atomic(&[(1.0, 0.5), (4.0, 0.5)]).unwrap();
        let u = log_kappa_r(&mu, c(-1.0, 0.0)).unwrap();
        assert!((u - c((7.0f64 / 13.0).ln(), 0.0)).norm() < 1e-14);
        let rep = closed_form_rho_atomic_r(&mu).unwrap();
        assert_eq!(rep.bands.len(), 1);
        assert!((rep.bands[0].0 - 0.4).abs() < 1e-14 && (rep.bands[0].1 - 0.625).abs() < 1e-14);
        let total = (0.625f64).atan() - (0.4f64).atan();
        assert!((rep.total_mass() - total).abs() < 1e-14);
        assert!((rep.total_mass() - 0.17809).abs() < 1e-5);
        for z in [c(-1.0, 0.0), c(0.5, 0.3), c(2.0, -0.7), c(-0.1, 3.0)] {
            assert!((rep.eval_u(z).unwrap() - log_kappa_r(&mu, z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn three_atom_bands() {
        let mu = MeasureR::atomic(&[(1.0, 1.0 / 3.0), (2.0, 1.0 / 3.0), (3.0, 1.0 / 3.0)]).unwrap();
        let rep = closed_form_rho_atomic_r(&mu).unwrap();
        assert_eq!(rep.bands.len(), 2);
        assert!(rep.bands[0].1 < 0.5 && rep.bands[1].0 > 0.5);
    }

    #[test]
    fn mass_at_zero_gives_tail_band() {
        let mu = MeasureR::new(vec![Atom { pos: 2.0, mass: 0.7 }], 0.3, None).unwrap();
        let rep = closed_form_rho_atomic_r(&mu).unwrap();
        assert_eq!(rep.bands.len(), 1);
        assert!((rep.bands[0].0 - 1.0 / 0.6).abs() < 1e-12 && rep.bands[0].1.is_infinite());
        for z in [c(-1.0, 0.0), c(0.5, 0.3), c(3.0, -0.7)] {
            assert!((rep.eval_u(z).unwrap() - log_kappa_r(&mu, z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn mixture_round_trip() {
        let mu = MeasureR::with_uniform(&[(1.5, 0.4)], 0.6, 1.0, 2.0).unwrap();
        let rep = extract_rep_r(&mu, 1024, &EPS_SCHEDULE).unwrap();
        for z in [c(-2.0, 0.0), c(-0.3, 0.0), c(0.5, 0.4), c(1.0, 1.0), c(3.0, 0.5), c(0.2, -0.3)] {
            let d = (rep.eval_u(z).unwrap() - log_kappa_r(&mu, z).unwrap()).norm();
            assert!(d < 1e-5, "{z}: {d}");
        }
    }

    #[test]
    fn haar_log_kappa_and_rep() {
        let s = 0.5;
        let mu = MeasureT::haar_mixture(s).unwrap();
        let z = c(0.0, 0.3);
        let exact = (1.0 - s * z).ln() - (1.0f64 - s).ln();
        assert!((log_kappa_t(&mu, z).unwrap() - exact).norm() < 1e-9);
        let rep = extract_rep_t(&mu, 2048, &EPS_SCHEDULE).unwrap();
        assert!((rep.total_mass() - 2f64.ln()).abs() < 1e-6);
        assert!(rep.alpha.abs() < 1e-12);
        assert!((rep.eval_u(z).unwrap() - exact).norm() < 1e-6);
        for th in [0.5, 2.0, -1.3] {
            let f = ((C64::new(1.0, 0.0) - s * C64::from_polar(1.0, th)).norm().ln() - (1.0 - s).ln()) / (2.0 * PI);
            assert!((rep.density_at(th) - f).abs() < 1e-6);
        }
        // finite part at the zero of the density equals s/(1-s)
        assert!((rep.g_finite_part(0.0) - s / (1.0 - s)).abs() < 1e-5);
    }

    #[test]
    fn rotated_point_mass_rep() {
        let b = 0.8;
        let mu = MeasureT::point(b).unwrap();
        let rep = extract_rep_t(&mu, 256, &EPS_SCHEDULE).unwrap();
        assert!((rep.alpha + b).abs() < 1e-14);
        assert!(rep.total_mass().abs() < 1e-12);
        assert!((log_kappa_t(&mu, c(0.3, -0.2)).unwrap() - c(0.0, -b)).norm() < 1e-12);
    }

    #[test]
    fn branch_tracking_across_cut() {
        // eta'(0) = e^{i 3}: u starts near -3 i, beyond the principal cut of nearby values
        let mu = MeasureT::new(
            vec![Atom { pos: 3.0, mass: 0.6 }],
            Some(Density::new(vec![-PI, PI], vec![0.4 / (2.0 * PI); 2]).unwrap()),
        )
        .unwrap();
        let u = log_kappa_t(&mu, C64::from_polar(0.9, 2.0)).unwrap();
        let zz = C64::from_polar(0.9, 2.0);
        // closed form: eta = 0.6 e^{3i} z/(1 - 0.4 e^{3i} z)
        let e = C64::from_polar(1.0, 3.0);
        let exact_k = (1.0 - 0.4 * e * zz) / (0.6 * e);
        assert!((u.exp() - exact_k).norm() < 1e-9);
        assert!((u.im + 3.0).abs() < 1.0);
    }
}
