//! Free multiplicative convolution powers: density, atoms and support of mu^{boxtimes t}.
//!
//! The absolutely continuous part is read off the boundary curve: on the
//! half-line the point r of V_t+ carries density
//!
//!   (1/pi) h l sin(theta_t) / (1 - 2 l cos(theta_t) + l^2)  at x = 1/h,
//!
//! with h = h_t(r), l = |eta_mu(r e^{i A})| = r exp(-Re u), theta_t = t A/(t-1).
//! On the circle the point theta of V_t+ carries the Poisson-type density
//! (1/2pi)(1 - l^2)/(1 - 2 l cos(alpha) + l^2) at conj(h_t(e^{i theta})), with
//! l = R_t^{t/(t-1)} and alpha = theta - Im u(R_t e^{i theta}).
//! Both values are densities in the original variable of the power.
//!
//! Masses are integrated with the midpoint rule on cosine-clustered parameter
//! nodes: odd nodes carry density samples, even nodes only their locations, so
//! the endpoints of V_t+ (where the density may have inverse square-root
//! behaviour in the location variable) are never sampled.

use crate::boundary_r::{self, default_r_grid, g_radial, h_from_angle, vt_plus_r};
use crate::boundary_t::{self, arc_contains, h_from_radius, radius_r_t, uniform_thetas, Arc};
use crate::error::{Error, Result};
use crate::herglotz::{
    extract_rep_r, extract_rep_t, log_kappa_r, log_kappa_t, HerglotzRepT, NevanlinnaRepR, EPS_SCHEDULE,
};
use crate::measures::{membership, Atom, Measure, MeasureR, MeasureT, Space, Transform};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::io::Write;

/// Numerical resolution of a power computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    /// Nodes for the representation of u and for boundary grids.
    pub grid: usize,
    /// Density samples per support component.
    pub density_nodes: usize,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig { grid: 2048, density_nodes: 400 }
    }
}

/// A density sample of the power in the original variable (angle on the circle).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensitySample {
    pub location: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerResult {
    pub t: f64,
    pub space: Space,
    /// Density samples ordered by location.
    pub density: Vec<DensitySample>,
    /// Atoms; on the half-line a point mass at 0 is listed with position 0.
    pub atoms: Vec<Atom>,
    /// Closed support components: intervals (half-line) or arcs (circle, end may exceed pi).
    pub components: Vec<(f64, f64)>,
    pub component_count: usize,
    /// Atom masses plus the integral of the density.
    pub mass_balance: f64,
    /// Half-line only: density of the pushforward under x -> 1/x at 1/location.
    pub reciprocal_density: Vec<DensitySample>,
}

impl PowerResult {
    pub fn to_json(&self) -> Value {
        json!({
            "t": self.t,
            "space": self.space,
            "atoms": self.atoms,
            "components": self.components,
            "density": {
                "locations": self.density.iter().map(|d| d.location).collect::<Vec<_>>(),
                "values": self.density.iter().map(|d| d.value).collect::<Vec<_>>(),
            },
            "mass_balance": self.mass_balance,
            "component_count": self.component_count,
        })
    }

    pub fn write_density_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "location,density")?;
        for d in &self.density {
            writeln!(w, "{},{}", crate::fmt_f64(d.location), crate::fmt_f64(d.value))?;
        }
        Ok(())
    }

    /// Trapezoid integral of the density samples over each component.
    pub fn trapezoid_mass(&self) -> f64 {
        let mut m = 0.0;
        for w in self.density.windows(2) {
            if w[1].location - w[0].location < 0.0 {
                continue;
            }
            let same = self.components.iter().any(|&(a, b)| {
                let inside = |x: f64| match self.space {
                    Space::Rplus => x >= a && x <= b,
                    Space::T => arc_contains(&[(a - 1e-15, b + 1e-15)], x) || b - a >= 2.0 * PI,
                };
                inside(w[0].location) && inside(w[1].location)
            });
            if same {
                m += 0.5 * (w[0].value + w[1].value) * (w[1].location - w[0].location);
            }
        }
        m
    }
}

/// Parameter nodes a + (b - a)(1 - cos(j pi/(2n)))/2, j = 0..2n.
fn cluster_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=2 * n).map(|j| a + (b - a) * 0.5 * (1.0 - (PI * j as f64 / (2 * n) as f64).cos())).collect()
}

/// Nodes covering (a, inf) through r = a + a v/(1 - v), v clustered in [0, 1]; the last node is infinite.
fn tail_nodes(a: f64, n: usize) -> Vec<f64> {
    cluster_nodes(0.0, 1.0, n)
        .into_iter()
        .map(|v| if v >= 1.0 { f64::INFINITY } else { a + a * v / (1.0 - v) })
        .collect()
}

/// Nodes on (a, b) clustered on each piece between the singular radii inside it.
/// Every piece contributes an even number of cells, so odd nodes keep both neighbours
/// in their own piece.
fn split_nodes(a: f64, b: f64, singular: &[f64], n: usize) -> Vec<f64> {
    let mut cuts = vec![a];
    cuts.extend(singular.iter().copied().filter(|&p| p > a * (1.0 + 1e-9) && p < b * (1.0 - 1e-9)));
    cuts.push(b);
    let mut out: Vec<f64> = vec![];
    for w in cuts.windows(2) {
        let piece = if w[1].is_infinite() { tail_nodes(w[0], n) } else { cluster_nodes(w[0], w[1], n) };
        let skip = usize::from(!out.is_empty());
        out.extend_from_slice(&piece[skip..]);
    }
    out
}

/// Half-line density at the boundary point over r, given A = A_t(r) > 0.
/// Returns (x, p): location 1/h_t(r) and the density there.
pub fn density_r_at(mu: &MeasureR, t: f64, r: f64, a: f64) -> Result<(f64, f64)> {
    let u = log_kappa_r(mu, C64::from_polar(r, a))?;
    let h = h_from_angle(mu, t, r, a)?;
    let l = r * (-u.re).exp();
    let th = t * a / (t - 1.0);
    let p = h * l * th.sin() / (PI * (1.0 - 2.0 * l * th.cos() + l * l));
    Ok((1.0 / h, p.max(0.0)))
}

/// density_r_at with A_t(r) computed; empty off V_t+.
pub fn density_r(mu: &MeasureR, rep: &NevanlinnaRepR, t: f64, r: f64) -> Result<Option<(f64, f64)>> {
    let a = boundary_r::angle_a_t(mu, rep, t, r)?;
    if a == 0.0 {
        return Ok(None);
    }
    density_r_at(mu, t, r, a).map(Some)
}

/// Circle density at conj(h_t(e^{i theta})), as (angle of the location, density).
pub fn density_t_at(rep: &HerglotzRepT, t: f64, theta: f64, r: f64) -> Result<(f64, f64)> {
    let h = h_from_radius(rep, t, theta, r)?;
    let u = rep.eval_u(C64::from_polar(r, theta))?;
    Ok((-h.arg(), poisson_density(t, theta, r, u)))
}

fn poisson_density(t: f64, theta: f64, r: f64, u: C64) -> f64 {
    let l = r.powf(t / (t - 1.0));
    let al = theta - u.im;
    let p = (1.0 - l * l) / (2.0 * PI * (1.0 - 2.0 * l * al.cos() + l * l));
    p.max(0.0)
}

/// R_t(theta) and u there, re-solved against log |kappa| of the measure itself.
///
/// Near a surviving atom R_t tends to 1 and the density depends on 1 - R_t, which
/// the sampled representation only resolves to its absolute accuracy. The
/// representation's root `r0` seeds a secant iteration on
/// log |kappa(e^{-s + i theta})| = s/(t-1); `None` when it does not converge.
pub fn refine_radius_t(mu: &MeasureT, rep: &HerglotzRepT, t: f64, theta: f64, r0: f64) -> Option<(f64, C64)> {
    if !(r0 < 1.0) {
        return None;
    }
    let thr = 1.0 / (t - 1.0);
    let f = |s: f64| -> Option<f64> {
        let k = mu.kappa(C64::from_polar((-s).exp(), theta)).ok()?;
        Some(k.norm().ln() - thr * s)
    };
    let mut s0 = -r0.ln();
    let mut s1 = s0 * (1.0 + 1e-4);
    let (mut f0, mut f1) = (f(s0)?, f(s1)?);
    for _ in 0..40 {
        if f1 == f0 {
            break;
        }
        let s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
        if !(s2 > 0.0) || (s2 / (-r0.ln()) - 1.0).abs() > 0.5 {
            return None;
        }
        (s0, f0) = (s1, f1);
        s1 = s2;
        f1 = f(s1)?;
        if (s1 - s0).abs() <= 1e-14 * s1 {
            break;
        }
    }
    if (s1 - s0).abs() > 1e-10 * s1 {
        return None;
    }
    let z = C64::from_polar((-s1).exp(), theta);
    let u = crate::herglotz::near_branch(mu.kappa(z).ok()?.ln(), rep.eval_u(z).ok()?);
    Some(((-s1).exp(), u))
}

/// Below this distance from the circle the representation's R_t is refined.
const REFINE_GAP: f64 = 1e-2;

/// Location angle and density at theta, refined against the measure when possible.
fn density_t_refined(mu: &MeasureT, rep: &HerglotzRepT, t: f64, theta: f64, r0: f64) -> Result<(f64, f64)> {
    let refined = if 1.0 - r0 < REFINE_GAP { refine_radius_t(mu, rep, t, theta, r0) } else { None };
    match refined {
        Some((r, u)) => {
            let h = C64::from_polar(r, theta) * ((t - 1.0) * u).exp();
            Ok((-h.arg(), poisson_density(t, theta, r, u)))
        }
        None => density_t_at(rep, t, theta, r0),
    }
}

/// density_t_at with R_t(theta) computed; empty off V_t+.
pub fn density_t(rep: &HerglotzRepT, t: f64, theta: f64) -> Result<Option<(f64, f64)>> {
    let r = radius_r_t(rep, t, theta)?;
    if r >= 1.0 {
        return Ok(None);
    }
    density_t_at(rep, t, theta, r).map(Some)
}

/// Atom survives iff its mass exceeds (t-1)/t; its new mass is t m - (t - 1).
pub fn atom_mass_after(m: f64, t: f64) -> Option<f64> {
    (m > (t - 1.0) / t).then_some(t * m - (t - 1.0))
}

/// Half-line atoms of the power: (r^t, t m - (t-1)); a point mass at 0 is carried through.
pub fn atoms_r(mu: &MeasureR, t: f64) -> Vec<Atom> {
    let mut out = vec![];
    if mu.mass_at_zero > 0.0 {
        out.push(Atom { pos: 0.0, mass: mu.mass_at_zero });
    }
    for a in &mu.atoms {
        if let Some(m) = atom_mass_after(a.mass, t) {
            out.push(Atom { pos: a.pos.powf(t), mass: m });
        }
    }
    out
}

/// Circle atoms of the power, located at conj(Phi_t(e^{-i beta})) for an atom of mu at e^{i beta}.
pub fn atoms_t(mu: &MeasureT, t: f64) -> Result<Vec<Atom>> {
    let mut out = vec![];
    for a in &mu.atoms {
        let Some(m) = atom_mass_after(a.mass, t) else { continue };
        let z = C64::from_polar(1.0 - 1e-9, -a.pos);
        let u = log_kappa_t(mu, z).map_err(|e| Error::Locate(format!("atom at angle {}: {e}", a.pos)))?;
        let phi = C64::from_polar(1.0, -a.pos) * ((t - 1.0) * C64::new(0.0, u.im)).exp();
        if !phi.norm().is_finite() {
            return Err(Error::Locate(format!("atom at angle {}", a.pos)));
        }
        // Adding 0.0 turns -0.0 into 0.0 for stable output.
        out.push(Atom { pos: -phi.arg() + 0.0, mass: m });
    }
    Ok(out)
}

/// |1 + int r (s^2+1)/(r-s)^2 d rho(s) - 1/mu({1/r})| for the half-line.
pub fn atom_identity_residual_r(mu: &MeasureR, rep: &NevanlinnaRepR, r: f64) -> f64 {
    let m = mu.atoms.iter().find(|a| (a.pos * r - 1.0).abs() < 1e-12).map_or(0.0, |a| a.mass);
    (1.0 + g_radial(rep, r) - 1.0 / m).abs()
}

/// |1 + int d rho(phi)/(1 - cos(theta - phi)) - 1/mu({e^{i beta}})| on the circle.
/// The identity pairs the angle theta = -beta of the reciprocal point with the atom at beta.
pub fn atom_identity_residual_t(mu: &MeasureT, rep: &HerglotzRepT, beta: f64) -> f64 {
    let m = mu.atoms.iter().find(|a| (1.0 - (a.pos - beta).cos()).abs() < 1e-14).map_or(0.0, |a| a.mass);
    (1.0 + rep.g_finite_part(-beta) - 1.0 / m).abs()
}

/// Measure together with its extracted representation, reusable across t.
#[derive(Debug, Clone)]
pub enum Prepared {
    R { mu: MeasureR, rep: NevanlinnaRepR, cfg: PowerConfig },
    T { mu: MeasureT, rep: HerglotzRepT, cfg: PowerConfig },
}

impl Prepared {
    /// Check membership and extract the representation.
    pub fn new(mu: &Measure, cfg: PowerConfig) -> Result<Self> {
        let report = membership(mu).map_err(|e| e.at("membership"))?;
        if !report.pass {
            return Err(Error::InvalidMeasure(report.reasons.join("; ")).at("membership"));
        }
        Ok(match mu {
            Measure::R(m) => Prepared::R {
                rep: extract_rep_r(m, cfg.grid, &EPS_SCHEDULE).map_err(|e| e.at("representation"))?,
                mu: m.clone(),
                cfg,
            },
            Measure::T(m) => Prepared::T {
                rep: extract_rep_t(m, cfg.grid, &EPS_SCHEDULE).map_err(|e| e.at("representation"))?,
                mu: m.clone(),
                cfg,
            },
        })
    }

    pub fn power(&self, t: f64) -> Result<PowerResult> {
        if !(t >= 1.0) {
            return Err(Error::Domain(format!("t = {t} must be at least 1")));
        }
        match self {
            Prepared::R { mu, rep, cfg } => {
                if t == 1.0 {
                    return Ok(identity_r(mu, cfg));
                }
                power_r(mu, rep, t, cfg)
            }
            Prepared::T { mu, rep, cfg } => {
                if t == 1.0 {
                    return Ok(identity_t(mu, cfg));
                }
                power_t(mu, rep, t, cfg)
            }
        }
    }
}

/// mu^{boxtimes t}.
pub fn assemble(mu: &Measure, t: f64, cfg: PowerConfig) -> Result<PowerResult> {
    Prepared::new(mu, cfg)?.power(t)
}

/// Component counts for ascending t values.
pub fn component_count_sweep(mu: &Measure, ts: &[f64], cfg: PowerConfig) -> Result<Vec<usize>> {
    if ts.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("t values must be ascending".into()));
    }
    let p = Prepared::new(mu, cfg)?;
    ts.iter().map(|&t| p.power(t).map(|r| r.component_count)).collect()
}

fn power_r(mu: &MeasureR, rep: &NevanlinnaRepR, t: f64, cfg: &PowerConfig) -> Result<PowerResult> {
    let n = cfg.density_nodes;
    let vt = vt_plus_r(rep, t);
    let singular = boundary_r::singular_radii(rep);
    let mut density = vec![];
    let mut intervals = vec![];
    let mut ac_mass = 0.0;
    for &(a, b) in &vt {
        let rs = split_nodes(a, b, &singular, n);
        let rows: Result<Vec<(f64, f64)>> = rs
            .par_iter()
            .enumerate()
            .map(|(j, &r)| {
                if r.is_infinite() {
                    return Ok((0.0, 0.0));
                }
                if j % 2 == 0 {
                    let ang = boundary_r::angle_a_t(mu, rep, t, r)?;
                    return Ok((1.0 / h_from_angle(mu, t, r, ang)?, 0.0));
                }
                let ang = boundary_r::angle_a_t(mu, rep, t, r)?;
                if ang == 0.0 {
                    return Ok((1.0 / h_from_angle(mu, t, r, 0.0)?, 0.0));
                }
                density_r_at(mu, t, r, ang)
            })
            .collect();
        let rows = rows.map_err(|e| e.at("half-line density"))?;
        // Weights in y = x^{1/t}, which stays smooth in the node parameter where
        // x itself decays or grows like a high power of it.
        let y = |x: f64| x.powf(1.0 / t);
        for j in (1..rows.len()).step_by(2) {
            let dx_dy = t * y(rows[j].0).powf(t - 1.0);
            ac_mass += rows[j].1 * dx_dy * (y(rows[j - 1].0) - y(rows[j + 1].0)).abs();
            density.push(DensitySample { location: rows[j].0, value: rows[j].1 });
        }
        let xs: Vec<f64> = rows.iter().map(|v| v.0).collect();
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(0.0, f64::max);
        intervals.push((lo, hi));
    }
    density.sort_by(|p, q| p.location.total_cmp(&q.location));
    let atoms = atoms_r(mu, t);
    let grid = default_r_grid(mu, cfg.grid);
    let log_cell = (grid[1] / grid[0]).ln();
    let components = merge_r(&intervals, &atoms, log_cell);
    let mass_balance = atoms.iter().map(|a| a.mass).sum::<f64>() + ac_mass;
    let reciprocal_density = density_reciprocal(&density);
    Ok(PowerResult {
        t,
        space: Space::Rplus,
        component_count: components.len(),
        components,
        density,
        atoms,
        mass_balance,
        reciprocal_density,
    })
}

/// Merge closed intervals and atoms whose logarithmic gap is at most one grid cell.
fn merge_r(intervals: &[(f64, f64)], atoms: &[Atom], log_cell: f64) -> Vec<(f64, f64)> {
    let mut sets: Vec<(f64, f64)> = intervals.to_vec();
    sets.extend(atoms.iter().map(|a| (a.pos, a.pos)));
    sets.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(f64, f64)> = vec![];
    for s in sets {
        match out.last_mut() {
            Some(last) if s.0 <= last.1 || (last.1 > 0.0 && (s.0 / last.1).ln() <= log_cell) => {
                last.1 = last.1.max(s.1)
            }
            _ => out.push(s),
        }
    }
    out
}

fn identity_r(mu: &MeasureR, cfg: &PowerConfig) -> PowerResult {
    let mut atoms: Vec<Atom> = vec![];
    if mu.mass_at_zero > 0.0 {
        atoms.push(Atom { pos: 0.0, mass: mu.mass_at_zero });
    }
    atoms.extend(mu.atoms.iter().copied());
    let (density, intervals, mass) = match &mu.ac {
        Some(d) => (
            d.grid.iter().zip(&d.values).map(|(&x, &v)| DensitySample { location: x, value: v }).collect(),
            vec![(d.lo(), d.hi())],
            d.mass(),
        ),
        None => (vec![], vec![], 0.0),
    };
    let grid = default_r_grid(mu, cfg.grid);
    let components = merge_r(&intervals, &atoms, (grid[1] / grid[0]).ln());
    let reciprocal_density = density_reciprocal(&density);
    PowerResult {
        t: 1.0,
        space: Space::Rplus,
        component_count: components.len(),
        components,
        mass_balance: atoms.iter().map(|a| a.mass).sum::<f64>() + mass,
        density,
        atoms,
        reciprocal_density,
    }
}

fn density_reciprocal(d: &[DensitySample]) -> Vec<DensitySample> {
    d.iter()
        .rev()
        .map(|s| DensitySample { location: 1.0 / s.location, value: s.value * s.location * s.location })
        .collect()
}

fn power_t(mu: &MeasureT, rep: &HerglotzRepT, t: f64, cfg: &PowerConfig) -> Result<PowerResult> {
    let n = cfg.density_nodes;
    let thetas = uniform_thetas(cfg.grid);
    let vt = boundary_t::vt_plus_t(rep, t, &thetas);
    let mut density = vec![];
    let mut arcs: Vec<Arc> = vec![];
    let mut ac_mass = 0.0;
    for &(a, b) in &vt {
        let full = b - a >= 2.0 * PI;
        let nodes: Vec<f64> = if full {
            (0..4 * n).map(|j| a + 2.0 * PI * j as f64 / (4 * n) as f64).collect()
        } else {
            cluster_nodes(a, b, n)
        };
        let rows: Result<Vec<(f64, f64)>> = nodes
            .par_iter()
            .enumerate()
            .map(|(j, &th)| {
                let r = radius_r_t(rep, t, th)?;
                if r >= 1.0 {
                    let h = h_from_radius(rep, t, th, r)?;
                    return Ok((-h.arg(), 0.0));
                }
                let (loc, p) = density_t_refined(mu, rep, t, th, r)?;
                Ok((loc, if j % 2 == 0 { 0.0 } else { p }))
            })
            .collect();
        let rows = rows.map_err(|e| e.at("circle density"))?;
        let m = rows.len();
        // Unwrap locations along the arc.
        let mut locs = Vec::with_capacity(m);
        let mut prev = rows[0].0;
        locs.push(prev);
        for row in rows.iter().skip(1) {
            let mut x = row.0;
            x += 2.0 * PI * ((prev - x) / (2.0 * PI)).round();
            locs.push(x);
            prev = x;
        }
        if full {
            // Periodic grid: node 0 follows the last node after one turn.
            let wrap_next = rows[0].0 + 2.0 * PI * ((locs[m - 1] - rows[0].0) / (2.0 * PI)).round();
            for j in (1..m).step_by(2) {
                let after = if j + 1 < m { locs[j + 1] } else { wrap_next };
                ac_mass += rows[j].1 * (after - locs[j - 1]).abs();
                density.push(DensitySample { location: wrap(locs[j]), value: rows[j].1 });
            }
            arcs.push((-PI, PI));
        } else {
            for j in (1..m).step_by(2) {
                ac_mass += rows[j].1 * (locs[j + 1] - locs[j - 1]).abs();
                density.push(DensitySample { location: wrap(locs[j]), value: rows[j].1 });
            }
            let (lo, hi) = if locs[m - 1] >= locs[0] { (locs[0], locs[m - 1]) } else { (locs[m - 1], locs[0]) };
            let k = ((lo + PI) / (2.0 * PI)).floor();
            arcs.push((lo - 2.0 * PI * k, hi - 2.0 * PI * k));
        }
    }
    density.sort_by(|p, q| p.location.total_cmp(&q.location));
    let atoms = atoms_t(mu, t).map_err(|e| e.at("circle atoms"))?;
    let cell = 2.0 * PI / cfg.grid as f64;
    let components = merge_arcs(&arcs, &atoms, cell);
    let mass_balance = atoms.iter().map(|a| a.mass).sum::<f64>() + ac_mass;
    Ok(PowerResult {
        t,
        space: Space::T,
        component_count: components.len(),
        components,
        density,
        atoms,
        mass_balance,
        reciprocal_density: vec![],
    })
}

fn wrap(x: f64) -> f64 {
    crate::measures::wrap_angle(x)
}

/// Merge arcs and atoms on the circle whose gap is at most `cell`.
fn merge_arcs(arcs: &[Arc], atoms: &[Atom], cell: f64) -> Vec<Arc> {
    if arcs.iter().any(|&(a, b)| b - a >= 2.0 * PI - cell) {
        return vec![(-PI, PI)];
    }
    let mut sets: Vec<Arc> = arcs.to_vec();
    sets.extend(atoms.iter().map(|a| (wrap(a.pos), wrap(a.pos))));
    if sets.is_empty() {
        return sets;
    }
    sets.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<Arc> = vec![];
    for s in sets {
        match out.last_mut() {
            Some(last) if s.0 <= last.1 + cell => last.1 = last.1.max(s.1),
            _ => out.push(s),
        }
    }
    // Close across the cut at pi.
    if out.len() > 1 {
        let first = out[0];
        let last = *out.last().expect("nonempty");
        if first.0 + 2.0 * PI <= last.1 + cell {
            out.pop();
            out[0] = (last.0, (first.1 + 2.0 * PI).max(last.1));
            out.rotate_left(1);
        }
    }
    if out.len() == 1 && out[0].1 - out[0].0 >= 2.0 * PI - cell {
        return vec![(-PI, PI)];
    }
    out
}

fn identity_t(mu: &MeasureT, cfg: &PowerConfig) -> PowerResult {
    let atoms = mu.atoms.clone();
    let (density, arcs, mass) = match &mu.ac {
        Some(d) => (
            d.grid.iter().zip(&d.values).map(|(&x, &v)| DensitySample { location: x, value: v }).collect(),
            vec![(d.lo(), d.hi())],
            d.mass(),
        ),
        None => (vec![], vec![], 0.0),
    };
    let components = merge_arcs(&arcs, &atoms, 2.0 * PI / cfg.grid as f64);
    PowerResult {
        t: 1.0,
        space: Space::T,
        component_count: components.len(),
        components,
        mass_balance: atoms.iter().map(|a| a.mass).sum::<f64>() + mass,
        density,
        atoms,
        reciprocal_density: vec![],
    }
}
