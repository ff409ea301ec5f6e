//! Independent path to mu^{boxtimes t} through subordination.
//!
//! The subordination function omega_t solves Phi_t(omega) = z with
//! Phi_t(w) = w exp((t-1) u(w)), and eta of the power is eta_mu(omega_t).
//! omega_t is continued from a neighbourhood of 0 along the ray to z with a
//! geometric ladder of moduli, Newton-correcting log Phi_t(omega)/z on each rung.

use crate::error::{Error, Result};
use crate::herglotz::near_branch;
use crate::measures::Measure;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

/// Residual bound |Phi_t(omega) - z| / max(1, |z|) for an accepted solution.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// First rung and growth factor of the continuation ladder.
pub const LADDER_START: f64 = 1e-6;
pub const LADDER_FACTOR: f64 = 1.25;
/// Bound on |omega eta'(0)| at the first rung.
const LINEAR_REGIME: f64 = 1e-4;

/// u, u', eta and eta' at a point of the domain.
#[derive(Debug, Clone, Copy)]
struct Local {
    u: C64,
    du: C64,
    eta: C64,
    deta: C64,
}

fn local(mu: &Measure, w: C64, prev_u: C64) -> Result<Local> {
    let m = mu.transform().moments(w)?;
    let mut u = m.kappa()?.ln();
    match mu {
        Measure::R(_) => {
            if w.im > 0.0 && u.im > FRAC_PI_2 {
                u.im -= 2.0 * PI;
            } else if w.im < 0.0 && u.im < -FRAC_PI_2 {
                u.im += 2.0 * PI;
            }
        }
        Measure::T(_) => u = near_branch(u, prev_u),
    }
    Ok(Local { u, du: m.dlog_kappa(), eta: m.eta(w)?, deta: m.eta_prime()? })
}

/// u(0) = -log eta'(0).
fn u_at_zero(mu: &Measure) -> C64 {
    -mu.transform().mean().ln()
}

/// An accepted solution of Phi_t(omega) = z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSolution {
    pub z: C64,
    pub omega: C64,
    /// u(omega) on the tracked branch.
    pub u: C64,
    pub residual: f64,
    pub iterations: usize,
}

fn phi(w: C64, u: C64, t: f64) -> C64 {
    w * ((t - 1.0) * u).exp()
}

/// Newton on log(Phi_t(omega)/target) in the variable log omega, starting from `w`.
fn newton(mu: &Measure, t: f64, target: C64, mut w: C64, mut u: C64, budget: usize) -> Result<(C64, C64, usize)> {
    let mut loc = local(mu, w, u)?;
    u = loc.u;
    for it in 0..budget {
        let f = (phi(w, u, t) / target).ln();
        if f.norm() <= 1e-15 {
            return Ok((w, u, it));
        }
        let step = -f / (1.0 + (t - 1.0) * w * loc.du);
        let mut lam = 1.0;
        loop {
            let cand = w * (step * lam).exp();
            if let Ok(l2) = local(mu, cand, u) {
                let f2 = (phi(cand, l2.u, t) / target).ln();
                if f2.norm() < f.norm() {
                    w = cand;
                    loc = l2;
                    u = l2.u;
                    break;
                }
            }
            lam *= 0.5;
            if lam < 1e-6 {
                return Ok((w, u, it));
            }
        }
    }
    Ok((w, u, budget))
}

fn domain_ok(mu: &Measure, z: C64, w: C64) -> bool {
    match mu {
        Measure::R(_) => {
            if z.im == 0.0 {
                w.im.abs() <= 1e-12 * w.norm() && w.re < 0.0
            } else {
                let (az, aw) = (z.im.signum() * z.arg(), z.im.signum() * w.arg());
                aw >= az - 1e-12 && aw < PI
            }
        }
        Measure::T(_) => w.norm() <= z.norm() * (1.0 + 1e-12),
    }
}

/// omega_t(z) by continuation along lambda z, lambda from LADDER_START to 1.
pub fn solve_omega(mu: &Measure, t: f64, z: C64) -> Result<OmegaSolution> {
    if t == 1.0 {
        return Ok(OmegaSolution { z, omega: z, u: u_at_zero(mu), residual: 0.0, iterations: 0 });
    }
    mu.transform().check_domain(z)?;
    let u0 = u_at_zero(mu);
    // The first rung must sit where omega is close to its linearization z mean^{t-1},
    // i.e. |omega mean| small; near the positive axis it may also need to move out
    // of the excluded margin.
    let scale = z.norm() * mu.transform().mean().norm().powf(t);
    let mut lam = LADDER_START.min(LINEAR_REGIME / scale);
    while lam < 1.0 && mu.transform().check_domain(z * lam).is_err() {
        lam = (lam * 10.0).min(1.0);
    }
    let mut accepted: Option<f64> = None;
    let mut w = z * lam * (-(t - 1.0) * u0).exp();
    let mut u = u0;
    let mut iters = 0;
    let mut factor = LADDER_FACTOR;
    loop {
        let target = z * lam;
        let (w2, u2, k) = newton(mu, t, target, w, u, 60)?;
        iters += k;
        let res = (phi(w2, u2, t) - target).norm() / target.norm().max(1e-300);
        if res <= 1e-12 && domain_ok(mu, target, w2) {
            w = w2;
            u = u2;
            accepted = Some(lam);
            if lam >= 1.0 {
                break;
            }
            factor = (factor * factor).min(LADDER_FACTOR);
            lam = (lam * factor).min(1.0);
        } else {
            // Retry from the last accepted rung with a smaller step.
            let Some(prev) = accepted else {
                return Err(Error::Continuation(format!("first rung failed for {z}")));
            };
            factor = factor.sqrt();
            if factor - 1.0 < 1e-8 {
                return Err(Error::Continuation(format!("stalled at lambda = {prev} toward {z}")));
            }
            lam = (prev * factor).min(1.0);
        }
    }
    let residual = (phi(w, u, t) - z).norm() / z.norm().max(1.0);
    if residual > RESIDUAL_TOL || !domain_ok(mu, z, w) {
        return Err(Error::Continuation(format!("no admissible root for {z}: residual {residual:e}, omega {w}")));
    }
    Ok(OmegaSolution { z, omega: w, u, residual, iterations: iters })
}

/// Solutions at many probes.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTrace {
    pub t: f64,
    pub solutions: Vec<OmegaSolution>,
}

impl OracleTrace {
    pub fn compute(mu: &Measure, t: f64, probes: &[C64]) -> Result<Self> {
        let solutions: Result<Vec<OmegaSolution>> = probes.par_iter().map(|&z| solve_omega(mu, t, z)).collect();
        Ok(OracleTrace { t, solutions: solutions? })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        use crate::fmt_f64 as f;
        writeln!(w, "probe_re,probe_im,omega_re,omega_im,residual,iterations")?;
        for s in &self.solutions {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                f(s.z.re),
                f(s.z.im),
                f(s.omega.re),
                f(s.omega.im),
                f(s.residual),
                s.iterations
            )?;
        }
        Ok(())
    }
}

/// eta of the power at z: eta_mu(omega_t(z)).
pub fn eta_power(mu: &Measure, t: f64, z: C64) -> Result<C64> {
    let s = solve_omega(mu, t, z)?;
    mu.transform().eta(s.omega)
}

/// Max relative deviation between Sigma of the power (by inverting eta_mu o omega_t)
/// and Sigma_mu^t at the given small points.
pub fn sigma_power_check(mu: &Measure, t: f64, zs: &[C64]) -> Result<f64> {
    let u0 = u_at_zero(mu);
    let mut worst = 0.0f64;
    for &z in zs {
        // Sigma_mu(z)^t = exp(t log Sigma_mu(z)) with log Sigma continued from u(0).
        let sig = mu.transform().sigma(z)?;
        let log_sig = near_branch(sig.ln(), u0);
        let want = (t * log_sig).exp();
        // Newton on y for eta_mu(omega_t(y)) = z.
        let mean_t = (-t * u0).exp();
        let mut y = z / mean_t;
        let mut sol = solve_omega(mu, t, y)?;
        let mut ok = false;
        for _ in 0..100 {
            let loc = local(mu, sol.omega, sol.u)?;
            let r = loc.eta - z;
            if r.norm() <= 1e-15 * z.norm() {
                ok = true;
                break;
            }
            let dphi = phi(sol.omega, sol.u, t) * (1.0 / sol.omega + (t - 1.0) * loc.du);
            let dy = -r / (loc.deta / dphi);
            y += dy;
            let (w, u, _) = newton(mu, t, y, sol.omega, sol.u, 60)?;
            sol = OmegaSolution { z: y, omega: w, u, residual: (phi(w, u, t) - y).norm(), iterations: 0 };
            if dy.norm() <= 1e-16 * y.norm() {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::Inversion(format!("eta of the power not inverted at {z}")));
        }
        worst = worst.max(((y / z) - want).norm() / want.norm());
    }
    Ok(worst)
}

/// Density of the power at the given locations by inverting eta_mu o omega_t.
///
/// Half-line: locations X > 0, density (1/pi) Im(z/(1 - eta(z))) at z = (1 + i eps)/X.
/// Circle: locations are angles phi, density is the Poisson formula at (1 - eps) e^{-i phi}.
/// The smoothing bias is linear in eps; values at eps and 2 eps are extrapolated to eps = 0.
pub fn oracle_density(mu: &Measure, t: f64, locations: &[f64], eps: f64) -> Result<Vec<f64>> {
    locations
        .par_iter()
        .map(|&x| Ok(2.0 * smoothed_density(mu, t, x, eps)? - smoothed_density(mu, t, x, 2.0 * eps)?))
        .collect()
}

/// Density of the power smoothed at distance eps from the boundary.
pub fn smoothed_density(mu: &Measure, t: f64, x: f64, eps: f64) -> Result<f64> {
    match mu {
        Measure::R(_) => {
            let z = C64::new(1.0, eps) / x;
            let e = eta_power(mu, t, z)?;
            Ok((z / (1.0 - e)).im / PI)
        }
        Measure::T(_) => {
            let z = C64::from_polar(1.0 - eps, -x);
            let e = eta_power(mu, t, z)?;
            Ok((1.0 - e.norm_sqr()) / (2.0 * PI * (1.0 - e).norm_sqr()))
        }
    }
}
