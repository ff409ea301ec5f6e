//! Probability measures on the half-line and the unit circle, the transforms
//! psi, eta, kappa and Sigma, boundary inversion, and class membership checks.
//!
//! Half-line measures live on [0, inf) in their own variable. Circle measures are
//! parameterised by angle in (-pi, pi]. Every transform is evaluated from two or
//! four kernel moments computed in a single quadrature pass (see [`Moments`]).

use crate::error::{Error, Result};
use crate::quadrature::{integrate, with_breakpoint, Cv, Tolerance};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Total-mass tolerance accepted by the constructors.
pub const MASS_TOL: f64 = 1e-8;
/// Evaluations closer than this to the excluded set are rejected.
pub const DOMAIN_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub pos: f64,
    pub mass: f64,
}

/// Piecewise-linear density on an ascending grid, zero outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl Density {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(Error::InvalidMeasure("density grid and values must have equal length >= 2".into()));
        }
        if grid.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure("density contains non-finite entries".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidMeasure("density grid must be strictly ascending".into()));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidMeasure("density values must be nonnegative".into()));
        }
        Ok(Density { grid, values })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let g = &self.grid;
        let n = g.len();
        if !(x >= g[0] && x <= g[n - 1]) {
            return 0.0;
        }
        let i = g.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (x0, x1) = (g[i - 1], g[i]);
        let w = (x - x0) / (x1 - x0);
        self.values[i - 1] * (1.0 - w) + self.values[i] * w
    }

    /// Exact integral of the interpolant.
    pub fn mass(&self) -> f64 {
        self.grid.windows(2).zip(self.values.windows(2)).map(|(g, v)| 0.5 * (v[0] + v[1]) * (g[1] - g[0])).sum()
    }

    pub fn scaled(&self, k: f64) -> Density {
        Density { grid: self.grid.clone(), values: self.values.iter().map(|v| v * k).collect() }
    }

    pub fn lo(&self) -> f64 {
        self.grid[0]
    }

    pub fn hi(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }
}

/// Kernel moments at z, with w = 1/(1 - z s):
/// `psi_over_z` = int s w, `one_plus_psi` = int w, `dpsi` = int s w^2, `q` = int s^2 w^2.
/// The last two are NaN when only values were requested.
#[derive(Debug, Clone, Copy)]
pub struct Moments {
    pub psi_over_z: C64,
    pub one_plus_psi: C64,
    pub dpsi: C64,
    pub q: C64,
}

impl Moments {
    fn add_point(&mut self, s: C64, m: f64, z: C64) {
        let w = 1.0 / (1.0 - z * s);
        let sw = s * w;
        self.psi_over_z += sw * m;
        self.one_plus_psi += w * m;
        self.dpsi += sw * w * m;
        self.q += sw * sw * m;
    }

    fn zero(derivs: bool) -> Self {
        let z = C64::new(0.0, 0.0);
        let d = if derivs { z } else { C64::new(f64::NAN, f64::NAN) };
        Moments { psi_over_z: z, one_plus_psi: z, dpsi: d, q: d }
    }

    fn add(&mut self, o: &Moments) {
        self.psi_over_z += o.psi_over_z;
        self.one_plus_psi += o.one_plus_psi;
        self.dpsi += o.dpsi;
        self.q += o.q;
    }

    pub fn psi(&self, z: C64) -> C64 {
        z * self.psi_over_z
    }

    pub fn eta(&self, z: C64) -> Result<C64> {
        if self.one_plus_psi.norm() < 1e-14 {
            return Err(Error::Pole(format!("{z}")));
        }
        Ok(z * self.psi_over_z / self.one_plus_psi)
    }

    /// eta'(z) = psi'(z) / (1 + psi(z))^2.
    pub fn eta_prime(&self) -> Result<C64> {
        if self.one_plus_psi.norm() < 1e-14 {
            return Err(Error::Pole("eta'".into()));
        }
        Ok(self.dpsi / (self.one_plus_psi * self.one_plus_psi))
    }

    pub fn kappa(&self) -> Result<C64> {
        if self.psi_over_z.norm() < 1e-300 {
            return Err(Error::ZeroEta("kappa".into()));
        }
        Ok(self.one_plus_psi / self.psi_over_z)
    }

    /// Derivative of log kappa, written without the 1/z cancellation.
    pub fn dlog_kappa(&self) -> C64 {
        self.dpsi / self.one_plus_psi - self.q / self.psi_over_z
    }
}

/// Analytic transforms shared by both spaces.
pub trait Transform: Sync {
    /// Reject points too close to the excluded set.
    fn check_domain(&self, z: C64) -> Result<()>;
    /// Moments without the domain check; only valid off the support of the pushforward.
    /// `derivs` selects whether `dpsi` and `q` are computed.
    fn moments_unchecked(&self, z: C64, derivs: bool) -> Result<Moments>;
    /// First moment, equal to eta'(0).
    fn mean(&self) -> C64;

    /// All four moments.
    fn moments(&self, z: C64) -> Result<Moments> {
        self.check_domain(z)?;
        self.moments_unchecked(z, true)
    }

    /// psi/z and 1 + psi only.
    fn values(&self, z: C64) -> Result<Moments> {
        self.check_domain(z)?;
        self.moments_unchecked(z, false)
    }

    fn psi(&self, z: C64) -> Result<C64> {
        Ok(self.values(z)?.psi(z))
    }

    fn eta(&self, z: C64) -> Result<C64> {
        self.values(z)?.eta(z)
    }

    fn kappa(&self, z: C64) -> Result<C64> {
        self.values(z)?.kappa()
    }

    /// Sigma(z) = eta^{-1}(z)/z by Newton from w = z/eta'(0).
    fn sigma(&self, z: C64) -> Result<C64> {
        let m = self.mean();
        if m.norm() == 0.0 || z.norm() == 0.0 {
            return Err(Error::Inversion("zero mean or zero argument".into()));
        }
        let mut w = z / m;
        for _ in 0..200 {
            let mo = self.moments(w)?;
            let r = mo.eta(w)? - z;
            if r.norm() <= 1e-15 * z.norm() {
                return Ok(w / z);
            }
            let step = r / mo.eta_prime()?;
            let mut lam = 1.0;
            loop {
                let cand = w - step * lam;
                let ok =
                    self.values(cand).and_then(|m2| m2.eta(cand)).map(|e| (e - z).norm() < r.norm()).unwrap_or(false);
                if ok {
                    w = cand;
                    break;
                }
                lam *= 0.5;
                if lam < 1e-12 {
                    return Err(Error::Inversion(format!("Newton stalled at {w}")));
                }
            }
        }
        Err(Error::Inversion(format!("no convergence for z = {z}")))
    }
}

/// Integrate the moment kernels against a density; `point(x)` returns the support
/// point for the parameter x together with the density value there.
fn kernel_integral<P: Fn(f64) -> (C64, f64)>(
    point: P,
    z: C64,
    pts: &[f64],
    tol: Tolerance,
    derivs: bool,
) -> Result<Moments> {
    if derivs {
        let v = integrate(
            |x| {
                let (s, m) = point(x);
                let w = 1.0 / (1.0 - z * s);
                let sw = w * s;
                Cv([sw * m, w * m, sw * w * m, sw * sw * m])
            },
            pts,
            tol,
        )?;
        Ok(Moments { psi_over_z: v.0[0], one_plus_psi: v.0[1], dpsi: v.0[2], q: v.0[3] })
    } else {
        let v = integrate(
            |x| {
                let (s, m) = point(x);
                let w = 1.0 / (1.0 - z * s);
                Cv([w * s * m, w * m])
            },
            pts,
            tol,
        )?;
        let nan = C64::new(f64::NAN, f64::NAN);
        Ok(Moments { psi_over_z: v.0[0], one_plus_psi: v.0[1], dpsi: nan, q: nan })
    }
}

/// Probability measure on [0, inf): atoms, a point mass at 0, and a gridded density.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureR {
    pub atoms: Vec<Atom>,
    pub mass_at_zero: f64,
    pub ac: Option<Density>,
    pub tol: Tolerance,
}

impl MeasureR {
    pub fn new(mut atoms: Vec<Atom>, mass_at_zero: f64, ac: Option<Density>) -> Result<Self> {
        if !(0.0..=1.0).contains(&mass_at_zero) {
            return Err(Error::InvalidMeasure("mass_at_zero must lie in [0, 1]".into()));
        }
        for a in &atoms {
            if !(a.pos > 0.0 && a.pos.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom position {} is not positive", a.pos)));
            }
            if !(a.mass > 0.0 && a.mass <= 1.0 + MASS_TOL) {
                return Err(Error::InvalidMeasure(format!("atom mass {} outside (0, 1]", a.mass)));
            }
        }
        atoms.sort_by(|a, b| a.pos.total_cmp(&b.pos));
        if atoms.windows(2).any(|w| w[0].pos == w[1].pos) {
            return Err(Error::InvalidMeasure("atom positions must be distinct".into()));
        }
        if let Some(d) = &ac {
            if d.lo() <= 0.0 {
                return Err(Error::InvalidMeasure("half-line density grid must be positive".into()));
            }
        }
        let total = atoms.iter().map(|a| a.mass).sum::<f64>() + mass_at_zero + ac.as_ref().map_or(0.0, |d| d.mass());
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("total mass {total} differs from 1")));
        }
        Ok(MeasureR { atoms, mass_at_zero, ac, tol: Tolerance::default() })
    }

    /// Purely atomic measure from (position, mass) pairs.
    pub fn atomic(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(pos, mass)| Atom { pos, mass }).collect(), 0.0, None)
    }

    pub fn point(c: f64) -> Result<Self> {
        Self::atomic(&[(c, 1.0)])
    }

    /// Atoms plus `weight` times the uniform distribution on [lo, hi].
    pub fn with_uniform(pairs: &[(f64, f64)], weight: f64, lo: f64, hi: f64) -> Result<Self> {
        let d = Density::new(vec![lo, hi], vec![weight / (hi - lo); 2])?;
        Self::new(pairs.iter().map(|&(pos, mass)| Atom { pos, mass }).collect(), 0.0, Some(d))
    }

    pub fn is_atomic(&self) -> bool {
        self.ac.is_none()
    }

    /// Smallest and largest positive support points.
    pub fn support_hull(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for a in &self.atoms {
            lo = lo.min(a.pos);
            hi = hi.max(a.pos);
        }
        if let Some(d) = &self.ac {
            lo = lo.min(d.lo());
            hi = hi.max(d.hi());
        }
        (lo, hi)
    }

    /// kappa at a real point x > 0 off the support of the pushforward. The poles of psi
    /// at reciprocal atom positions cancel in kappa and are divided out there.
    pub fn kappa_real(&self, x: f64) -> Result<f64> {
        let z = C64::new(x, 0.0);
        let near = self.atoms.iter().enumerate().find(|(_, a)| (1.0 - x * a.pos).abs() < 1e-6);
        let Some((k, a0)) = near else {
            return Ok(self.moments_unchecked(z, false)?.kappa()?.re);
        };
        let mut rest = self.clone();
        rest.atoms.remove(k);
        let m = rest.moments_unchecked(z, false)?;
        let d = 1.0 - x * a0.pos;
        let num = d * m.one_plus_psi.re + a0.mass;
        let den = d * m.psi_over_z.re + a0.mass * a0.pos;
        if den == 0.0 {
            return Err(Error::ZeroEta(format!("kappa has a pole at {x}")));
        }
        Ok(num / den)
    }

    fn ac_moments(&self, d: &Density, z: C64, derivs: bool) -> Result<Moments> {
        let pts = with_breakpoint(&d.grid, (1.0 / z).re);
        kernel_integral(|s| (C64::new(s, 0.0), d.eval(s)), z, &pts, self.tol, derivs)
    }
}

impl Transform for MeasureR {
    fn check_domain(&self, z: C64) -> Result<()> {
        let dist = if z.re >= 0.0 { z.im.abs() } else { z.norm() };
        if !(dist > DOMAIN_MARGIN) || !z.is_finite() {
            return Err(Error::Domain(format!("{z}")));
        }
        Ok(())
    }

    fn moments_unchecked(&self, z: C64, derivs: bool) -> Result<Moments> {
        let mut m = Moments::zero(derivs);
        m.one_plus_psi += self.mass_at_zero;
        for a in &self.atoms {
            m.add_point(C64::new(a.pos, 0.0), a.mass, z);
        }
        if let Some(d) = &self.ac {
            m.add(&self.ac_moments(d, z, derivs)?);
        }
        Ok(m)
    }

    fn mean(&self) -> C64 {
        let mut s: f64 = self.atoms.iter().map(|a| a.pos * a.mass).sum();
        if let Some(d) = &self.ac {
            s += d
                .grid
                .windows(2)
                .zip(d.values.windows(2))
                .map(|(g, v)| {
                    let h = g[1] - g[0];
                    h * (v[0] * (2.0 * g[0] + g[1]) + v[1] * (g[0] + 2.0 * g[1])) / 6.0
                })
                .sum::<f64>();
        }
        C64::new(s, 0.0)
    }
}

/// Probability measure on the unit circle: atoms at angles and a gridded density in angle.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureT {
    pub atoms: Vec<Atom>,
    pub ac: Option<Density>,
    pub tol: Tolerance,
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

impl MeasureT {
    pub fn new(mut atoms: Vec<Atom>, ac: Option<Density>) -> Result<Self> {
        for a in &mut atoms {
            if !a.pos.is_finite() {
                return Err(Error::InvalidMeasure("atom angle is not finite".into()));
            }
            a.pos = wrap_angle(a.pos);
            if !(a.mass > 0.0 && a.mass <= 1.0 + MASS_TOL) {
                return Err(Error::InvalidMeasure(format!("atom mass {} outside (0, 1]", a.mass)));
            }
        }
        atoms.sort_by(|a, b| a.pos.total_cmp(&b.pos));
        if atoms.windows(2).any(|w| (w[0].pos - w[1].pos).abs() < 1e-14) {
            return Err(Error::InvalidMeasure("atom angles must be distinct".into()));
        }
        if let Some(d) = &ac {
            if d.hi() - d.lo() > 2.0 * PI + 1e-12 {
                return Err(Error::InvalidMeasure("circle density grid spans more than one turn".into()));
            }
        }
        let total = atoms.iter().map(|a| a.mass).sum::<f64>() + ac.as_ref().map_or(0.0, |d| d.mass());
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("total mass {total} differs from 1")));
        }
        Ok(MeasureT { atoms, ac, tol: Tolerance::default() })
    }

    pub fn atomic(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(pos, mass)| Atom { pos, mass }).collect(), None)
    }

    pub fn point(beta: f64) -> Result<Self> {
        Self::atomic(&[(beta, 1.0)])
    }

    /// (1 - s) delta_1 + s Haar.
    pub fn haar_mixture(s: f64) -> Result<Self> {
        let atoms = if s < 1.0 { vec![Atom { pos: 0.0, mass: 1.0 - s }] } else { vec![] };
        let ac = if s > 0.0 { Some(Density::new(vec![-PI, PI], vec![s / (2.0 * PI); 2])?) } else { None };
        Self::new(atoms, ac)
    }

    /// Atoms plus `weight` times a gridded Poisson density with radius `a` centred at angle 0.
    pub fn with_poisson(pairs: &[(f64, f64)], weight: f64, a: f64, nodes: usize) -> Result<Self> {
        let grid: Vec<f64> = (0..=nodes).map(|j| -PI + 2.0 * PI * j as f64 / nodes as f64).collect();
        let vals: Vec<f64> =
            grid.iter().map(|&th| (1.0 - a * a) / (2.0 * PI * (1.0 - 2.0 * a * th.cos() + a * a))).collect();
        let d = Density::new(grid, vals)?;
        let d = d.scaled(weight / d.mass());
        Self::new(pairs.iter().map(|&(pos, mass)| Atom { pos, mass }).collect(), Some(d))
    }

    fn ac_moments(&self, d: &Density, z: C64, derivs: bool) -> Result<Moments> {
        // On a full period the mean density c contributes exactly: int w = 2 pi c and the
        // other three moments vanish. Only the remainder is integrated.
        let full = (d.lo() + PI).abs() < 1e-12 && (d.hi() - PI).abs() < 1e-12;
        let c = if full { d.mass() / (2.0 * PI) } else { 0.0 };
        let mut m = Moments::zero(derivs);
        m.one_plus_psi += 2.0 * PI * c;
        if d.values.iter().all(|&v| (v - c).abs() <= 1e-15 * c) {
            return Ok(m);
        }
        let mut pts = d.grid.clone();
        if z.norm() > 0.0 {
            let p = -z.arg();
            for k in [-1.0, 0.0, 1.0] {
                pts = with_breakpoint(&pts, p + 2.0 * PI * k);
            }
        }
        m.add(&kernel_integral(|th| (C64::from_polar(1.0, th), d.eval(th) - c), z, &pts, self.tol, derivs)?);
        Ok(m)
    }
}

impl Transform for MeasureT {
    fn check_domain(&self, z: C64) -> Result<()> {
        if !(z.norm() < 1.0 - DOMAIN_MARGIN) || !z.is_finite() {
            return Err(Error::Domain(format!("{z}")));
        }
        Ok(())
    }

    fn moments_unchecked(&self, z: C64, derivs: bool) -> Result<Moments> {
        let mut m = Moments::zero(derivs);
        for a in &self.atoms {
            m.add_point(C64::from_polar(1.0, a.pos), a.mass, z);
        }
        if let Some(d) = &self.ac {
            m.add(&self.ac_moments(d, z, derivs)?);
        }
        Ok(m)
    }

    fn mean(&self) -> C64 {
        // psi_over_z at 0 is the first moment.
        self.moments_unchecked(C64::new(0.0, 0.0), false).map(|m| m.psi_over_z).unwrap_or(C64::new(0.0, 0.0))
    }
}

/// A measure on either space.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    R(MeasureR),
    T(MeasureT),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Rplus,
    T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AcSpec {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// JSON layout of an input measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub space: Space,
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_at_zero: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ac: Option<AcSpec>,
}

impl Measure {
    pub fn from_spec(spec: MeasureSpec) -> Result<Measure> {
        let ac = match spec.ac {
            Some(a) => Some(Density::new(a.grid, a.values)?),
            None => None,
        };
        match spec.space {
            Space::Rplus => Ok(Measure::R(MeasureR::new(spec.atoms, spec.mass_at_zero.unwrap_or(0.0), ac)?)),
            Space::T => {
                if spec.mass_at_zero.is_some_and(|m| m != 0.0) {
                    return Err(Error::InvalidMeasure("mass_at_zero is only meaningful on Rplus".into()));
                }
                Ok(Measure::T(MeasureT::new(spec.atoms, ac)?))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Measure> {
        let spec: MeasureSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidMeasure(format!("malformed JSON: {e}")))?;
        Self::from_spec(spec)
    }

    pub fn to_spec(&self) -> MeasureSpec {
        let ac = |d: &Option<Density>| d.as_ref().map(|d| AcSpec { grid: d.grid.clone(), values: d.values.clone() });
        match self {
            Measure::R(m) => MeasureSpec {
                space: Space::Rplus,
                atoms: m.atoms.clone(),
                mass_at_zero: Some(m.mass_at_zero),
                ac: ac(&m.ac),
            },
            Measure::T(m) => MeasureSpec { space: Space::T, atoms: m.atoms.clone(), mass_at_zero: None, ac: ac(&m.ac) },
        }
    }

    pub fn space(&self) -> Space {
        match self {
            Measure::R(_) => Space::Rplus,
            Measure::T(_) => Space::T,
        }
    }

    pub fn transform(&self) -> &dyn Transform {
        match self {
            Measure::R(m) => m,
            Measure::T(m) => m,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MembershipReport {
    pub pass: bool,
    pub reasons: Vec<String>,
    pub mean: [f64; 2],
    /// Zeros of eta(z)/z inside the sampled circle (circle measures only).
    pub zero_count: Option<i64>,
    pub samples: usize,
}

/// Sampling check of the half-line class: eta(0-) = 0 and arg eta(z) in [arg z, pi) on the upper half-plane.
pub fn membership_r(mu: &MeasureR) -> MembershipReport {
    let mean = mu.mean().re;
    let mut rep =
        MembershipReport { pass: true, reasons: vec![], mean: [mean + 0.0, 0.0], zero_count: None, samples: 0 };
    if mu.mass_at_zero >= 1.0 - MASS_TOL {
        rep.pass = false;
        rep.reasons.push("excluded point measure".into());
        return rep;
    }
    let scale = 1.0 / mean;
    let probes: Vec<(f64, f64)> = (0..17)
        .flat_map(|k| (1..17).map(move |j| (scale * 10f64.powf((k as f64 - 8.0) / 2.0), j as f64 * PI / 17.0)))
        .collect();
    rep.samples = probes.len() + 1;
    let bad: Vec<String> = probes
        .par_iter()
        .filter_map(|&(r, th)| {
            let z = C64::from_polar(r, th);
            match mu.eta(z) {
                Ok(e) => {
                    let a = e.arg();
                    if a < th - 1e-9 || a >= PI {
                        Some(format!("arg eta({z:.3e}) = {a} outside [arg z, pi)"))
                    } else {
                        None
                    }
                }
                Err(e) => Some(format!("evaluation failed at {z:.3e}: {e}")),
            }
        })
        .collect();
    if let Some(first) = bad.first() {
        rep.pass = false;
        rep.reasons.push(format!("{} argument violations, first: {first}", bad.len()));
    }
    let x = -1e-10 * scale;
    match mu.eta(C64::new(x, 0.0)) {
        Ok(e) if e.norm() <= 1e-6 => {}
        Ok(e) => {
            rep.pass = false;
            rep.reasons.push(format!("eta(0-) does not vanish: {e}"));
        }
        Err(e) => {
            rep.pass = false;
            rep.reasons.push(format!("eta(0-) evaluation failed: {e}"));
        }
    }
    rep
}

/// Radius of the circle used for zero counting.
pub const WINDING_RADIUS: f64 = 1.0 - 1e-3;

/// Number of zeros of `f` inside |z| < radius by the argument principle.
/// Sampling starts at `n0` points and doubles until no increment exceeds pi/4.
pub fn winding_number<F: Fn(C64) -> Result<C64> + Sync>(f: F, radius: f64, n0: usize) -> Result<i64> {
    let mut n = n0.max(16);
    while n <= 1 << 22 {
        let vals: Result<Vec<C64>> =
            (0..n).into_par_iter().map(|j| f(C64::from_polar(radius, 2.0 * PI * j as f64 / n as f64))).collect();
        let vals = vals?;
        let mut total = 0.0;
        let mut worst = 0.0f64;
        for j in 0..n {
            let d = (vals[(j + 1) % n] / vals[j]).arg();
            worst = worst.max(d.abs());
            total += d;
        }
        let w = total / (2.0 * PI);
        if worst <= PI / 4.0 {
            if (w - w.round()).abs() > 1e-3 {
                return Err(Error::WindingAmbiguity(format!("winding {w} at {n} samples")));
            }
            return Ok(w.round() as i64);
        }
        n *= 2;
    }
    Err(Error::WindingAmbiguity(format!("increments unresolved at {n} samples")))
}

/// Circle class check: nonzero first moment and eta(z)/z zero-free in the disc.
pub fn membership_t(mu: &MeasureT) -> Result<MembershipReport> {
    let mean = mu.mean();
    let mut rep =
        MembershipReport { pass: true, reasons: vec![], mean: [mean.re, mean.im], zero_count: None, samples: 0 };
    if mean.norm() < 1e-12 {
        rep.pass = false;
        rep.reasons.push("first moment vanishes".into());
        return Ok(rep);
    }
    let zeros = winding_number(
        |z| {
            let m = mu.values(z)?;
            Ok(m.psi_over_z / m.one_plus_psi)
        },
        WINDING_RADIUS,
        4096,
    )?;
    rep.zero_count = Some(zeros);
    if zeros != 0 {
        rep.pass = false;
        rep.reasons.push(format!("eta vanishes inside the disc ({zeros} zeros)"));
    }
    let mut schwarz = 0;
    for k in 1..10 {
        for j in 0..16 {
            let z = C64::from_polar(0.1 * k as f64, 2.0 * PI * j as f64 / 16.0);
            if let Ok(e) = mu.eta(z) {
                if e.norm() > z.norm() * (1.0 + 1e-12) {
                    schwarz += 1;
                }
            }
            rep.samples += 1;
        }
    }
    if schwarz > 0 {
        rep.pass = false;
        rep.reasons.push(format!("|eta(z)| > |z| at {schwarz} samples"));
    }
    Ok(rep)
}

pub fn membership(mu: &Measure) -> Result<MembershipReport> {
    match mu {
        Measure::R(m) => Ok(membership_r(m)),
        Measure::T(m) => membership_t(m),
    }
}

/// Output of Stieltjes inversion on a grid of x > 0.
#[derive(Debug, Clone)]
pub struct StieltjesSamples {
    pub x: Vec<f64>,
    /// (1/pi) Im((x + i eps)/(1 - eta(x + i eps))): the smoothed density of the
    /// measure itself at the point 1/x, in its original variable.
    pub raw: Vec<f64>,
    /// raw / x^2: the smoothed density of the pushforward under s -> 1/s at x.
    pub reciprocal_density: Vec<f64>,
}

pub fn stieltjes_invert_r<F: Fn(C64) -> Result<C64> + Sync>(
    eta: F,
    grid: &[f64],
    eps: f64,
) -> Result<StieltjesSamples> {
    let raw: Result<Vec<f64>> = grid
        .par_iter()
        .map(|&x| {
            let z = C64::new(x, eps);
            let e = eta(z)?;
            Ok((z / (1.0 - e)).im / PI)
        })
        .collect();
    let raw = raw?;
    let reciprocal_density = raw.iter().zip(grid).map(|(r, x)| r / (x * x)).collect();
    Ok(StieltjesSamples { x: grid.to_vec(), raw, reciprocal_density })
}

/// Poisson inversion at radius r: (1/2pi)(1 - |eta|^2)/|1 - eta|^2 at r e^{i theta}.
/// The value is the smoothed density of the pushforward under zeta -> 1/zeta at
/// angle theta, i.e. the density of the measure itself at angle -theta.
pub fn poisson_invert_t<F: Fn(C64) -> Result<C64> + Sync>(eta: F, thetas: &[f64], r: f64) -> Result<Vec<f64>> {
    thetas
        .par_iter()
        .map(|&th| {
            let e = eta(C64::from_polar(r, th))?;
            Ok((1.0 - e.norm_sqr()) / (2.0 * PI * (1.0 - e).norm_sqr()))
        })
        .collect()
}
