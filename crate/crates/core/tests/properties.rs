use mfree::boundary_r::{h_t_r, log_grid, vt_plus_r};
use mfree::boundary_t::{radius_r_t, t_kernel, uniform_thetas, vt_plus_t};
use mfree::freepower::{atom_mass_after, PowerConfig, Prepared};
use mfree::herglotz::log_kappa;
use mfree::measures::{Measure, MeasureR, MeasureT};
use mfree::oracle::solve_omega;
use mfree::C64;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Atomic half-line measure with 2 to 4 atoms in [0.1, 10].
fn atomic_r() -> impl Strategy<Value = Measure> {
    prop::collection::vec((0.1f64..10.0, 0.1f64..1.0), 2..=4).prop_filter_map("distinct atoms", |pairs| {
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        let mut v: Vec<(f64, f64)> = pairs.iter().map(|&(x, m)| (x, m / total)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        if v.windows(2).any(|w| w[1].0 / w[0].0 < 1.05) {
            return None;
        }
        let rest: f64 = v[1..].iter().map(|p| p.1).sum();
        v[0].1 = 1.0 - rest;
        MeasureR::atomic(&v).ok().map(Measure::R)
    })
}

fn haar_mixture() -> impl Strategy<Value = Measure> {
    (0.05f64..0.95).prop_map(|s| Measure::T(MeasureT::haar_mixture(s).unwrap()))
}

fn rep_r(mu: &Measure) -> Prepared {
    Prepared::new(mu, PowerConfig { grid: 256, density_nodes: 64 }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn log_kappa_conjugate_symmetric(mu in atomic_r(), re in -5.0f64..5.0, im in 0.01f64..5.0) {
        let z = C64::new(re, im);
        let a = log_kappa(&mu, z).unwrap();
        let b = log_kappa(&mu, z.conj()).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn omega_respects_schwarz_bound(mu in haar_mixture(), t in 1.05f64..6.0, rad in 0.0f64..0.99, arg in -PI..PI) {
        let z = C64::from_polar(rad.sqrt(), arg);
        let s = solve_omega(&mu, t, z).unwrap();
        prop_assert!(s.omega.norm() <= z.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn omega_rotates_away_from_positive_axis(
        mu in atomic_r(), t in 1.05f64..6.0, lr in -2.0f64..2.0, th in 1e-3f64..(PI - 1e-3),
    ) {
        let z = C64::from_polar(10f64.powf(lr), th);
        let s = solve_omega(&mu, t, z).unwrap();
        prop_assert!(s.omega.arg() >= th - 1e-12 && s.omega.arg() < PI);
        let lower = solve_omega(&mu, t, z.conj()).unwrap();
        prop_assert!((lower.omega - s.omega.conj()).norm() <= 1e-9 * s.omega.norm());
    }

    #[test]
    fn circle_kernel_increases_in_radius(r1 in 0.01f64..0.999, dr in 1e-4f64..0.5, th in -PI..PI) {
        let r2 = (r1 + dr).min(0.9999);
        prop_assume!(r2 > r1);
        prop_assert!(t_kernel(r2, th) >= t_kernel(r1, th) * (1.0 - 1e-12));
    }

    #[test]
    fn vt_plus_grows_with_t(mu in atomic_r(), t1 in 1.05f64..4.0, dt in 0.1f64..4.0) {
        let Prepared::R { rep, .. } = rep_r(&mu) else { unreachable!() };
        let small = vt_plus_r(&rep, t1);
        let large = vt_plus_r(&rep, t1 + dt);
        for (a, b) in small {
            prop_assert!(large.iter().any(|&(c, d)| c <= a * (1.0 + 1e-9) && b <= d * (1.0 + 1e-9)), "({a}, {b})");
        }
    }

    #[test]
    fn circle_vt_plus_grows_with_t(mu in haar_mixture(), t1 in 1.05f64..4.0, dt in 0.1f64..4.0) {
        let Prepared::T { rep, .. } = rep_r(&mu) else { unreachable!() };
        let thetas = uniform_thetas(256);
        let small = vt_plus_t(&rep, t1, &thetas);
        let large = vt_plus_t(&rep, t1 + dt, &thetas);
        let covered: f64 = large.iter().map(|a| a.1 - a.0).sum();
        let inner: f64 = small.iter().map(|a| a.1 - a.0).sum();
        prop_assert!(covered >= inner - 1e-9);
        for th in thetas {
            prop_assert!(radius_r_t(&rep, t1 + dt, th).unwrap() <= radius_r_t(&rep, t1, th).unwrap() + 1e-12);
        }
    }

    #[test]
    fn boundary_map_is_increasing(mu in atomic_r(), t in 1.2f64..6.0) {
        let Prepared::R { mu: m, rep, .. } = rep_r(&mu) else { unreachable!() };
        let mut prev = 0.0;
        for r in log_grid(0.05, 20.0, 60) {
            let h = h_t_r(&m, &rep, t, r).unwrap();
            prop_assert!(h > prev, "h_t not increasing at r = {r}");
            prev = h;
        }
    }

    #[test]
    fn atom_masses_stay_in_range(m in 0.0f64..=1.0, t in 1.0f64..20.0) {
        match atom_mass_after(m, t) {
            Some(w) => prop_assert!(w > 0.0 && w <= m + 1e-15),
            None => prop_assert!(m <= (t - 1.0) / t),
        }
    }

    #[test]
    fn power_of_atomic_measure_has_unit_mass(mu in atomic_r(), t in 1.2f64..5.0) {
        let r = Prepared::new(&mu, PowerConfig::default()).unwrap().power(t).unwrap();
        prop_assert!((r.mass_balance - 1.0).abs() <= 1e-3, "mass {}", r.mass_balance);
    }

    #[test]
    fn power_of_haar_mixture_has_unit_mass(mu in haar_mixture(), t in 1.05f64..8.0) {
        let r = Prepared::new(&mu, PowerConfig::default()).unwrap().power(t).unwrap();
        prop_assert!((r.mass_balance - 1.0).abs() <= 1e-3, "mass {}", r.mass_balance);
    }
}
