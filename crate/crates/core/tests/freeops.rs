use critwave::freeops::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

/// Richardson-extrapolated central difference.
fn deriv(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    let d2 = (f(x + 2.0 * h) - f(x - 2.0 * h)) / (4.0 * h);
    (4.0 * d1 - d2) / 3.0
}

fn deriv_c(f: impl Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    let d2 = (f(x + 2.0 * h) - f(x - 2.0 * h)) / (4.0 * h);
    (d1 * 4.0 - d2) / 3.0
}

fn second(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let s = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    (4.0 * s(h) - s(2.0 * h)) / 3.0
}

#[test]
fn phi_at_zero_wavenumber() {
    for &x in &[0.01, 1.0, 7.5] {
        assert!(close(phi_free(0.0, x).unwrap().value, (PI * x / 2.0).sqrt(), 1e-15));
    }
}

#[test]
fn phi_vanishes_at_first_bessel_root() {
    assert!(phi_free(1.0, 2.404825557695773).unwrap().value.abs() < 1e-9);
}

#[test]
fn domain_errors() {
    assert!(phi_free(1.0, 0.0).is_err());
    assert!(phi_free(1.0, -1.0).is_err());
    assert!(theta_free(0.0, 1.0).is_err());
    assert!(theta_free(-1.0, 1.0).is_err());
    assert!(matches!(jost_free(0.0, 1.0), Err(critwave::Error::SingularInput(_))));
    assert!(green_free(1.0, 0.0, 1.0).is_err());
    assert!(dphi_free_dk(1.0, -2.0).is_err());
}

#[test]
fn theta_matches_reference_value() {
    // mpmath: √(5π)·(−Y₀(10)).
    assert!(close(theta_free(1.0, 10.0).unwrap().value, -0.22064305698468015, 1e-10));
}

#[test]
fn theta_small_k_limit() {
    // θ₀(k², x) → √(2x/π)(ln 2 − γ − ln x) as k → 0.
    let gamma = 0.5772156649015329;
    for &x in &[0.5, 3.0] {
        let lim = (2.0 * x / PI).sqrt() * (2f64.ln() - gamma - x.ln());
        assert!((theta_free(1e-7, x).unwrap().value - lim).abs() < 1e-10);
    }
}

#[test]
fn theta_phi_wronskian_is_one() {
    for &k in &[0.3f64, 1.0, 4.0] {
        for &x in &[0.1f64, 1.0, 10.0] {
            let th = |x: f64| theta_free(k, x).unwrap().value;
            let ph = |x: f64| phi_free(k, x).unwrap().value;
            let h = 1e-3 * x.min(1.0 / k);
            let w = th(x) * deriv(ph, x, h) - deriv(th, x, h) * ph(x);
            assert!((w - 1.0).abs() < 1e-9, "k={k} x={x} W={w}");
        }
    }
}

#[test]
fn jost_free_asymptotics_and_symmetry() {
    for &k in &[0.5, 2.0] {
        let x = 100.0 / k;
        let f = jost_free(k, x).unwrap().value;
        assert!((f * Complex64::from_polar(1.0, -k * x) - 1.0).norm() <= 0.02);
        let m = jost_free(-k, x).unwrap().value;
        assert_eq!(m, f.conj());
    }
}

#[test]
fn jost_wronskian_is_2ik() {
    for &k in &[0.5, 3.0] {
        for &x in &[0.2, 5.0] {
            let fp = |x: f64| jost_free(k, x).unwrap().value;
            let fm = |x: f64| jost_free(-k, x).unwrap().value;
            let h = 1e-3 * x;
            let w = fm(x) * deriv_c(fp, x, h) - deriv_c(fm, x, h) * fp(x);
            assert!((w - Complex64::new(0.0, 2.0 * k)).norm() < 1e-8 * k, "{w}");
        }
    }
}

#[test]
fn jost_function_free_is_wronskian() {
    let k = 1.7;
    let x = 2.0;
    let f = |x: f64| jost_free(k, x).unwrap().value;
    let p = |x: f64| Complex64::from(phi_free(k, x).unwrap().value);
    let w = f(x) * deriv_c(p, x, 1e-3) - deriv_c(f, x, 1e-3) * p(x);
    assert!((w - jost_function_free(k)).norm() < 1e-9);
}

#[test]
fn imaginary_axis_jost_uses_k0() {
    // √(2κx/π) K₀(κx) at κx = 2: K₀(2) = 0.11389387274953344.
    let v = jost_free_imag(1.0, 2.0).unwrap().value;
    assert!(close(v, (4.0 / PI).sqrt() * 0.11389387274953344, 1e-12));
}

#[test]
fn green_reference_values() {
    // mpmath values of −(π/2)√(xy)[J₀(kx)Y₀(ky) − J₀(ky)Y₀(kx)].
    assert!(close(green_free(1.0, 2.0, 1.0).unwrap(), 0.8236624325254631, 1e-11));
    assert!(close(green_free(0.3, 5.0, 0.2).unwrap(), 2.097717653988604, 1e-11));
    assert_eq!(green_free(1.3, 2.0, 2.0).unwrap(), 0.0);
}

#[test]
fn green_positive_for_small_arguments() {
    for &(k, x, y) in &[(0.1, 5.0, 0.5), (1.0, 1.0, 0.01), (0.5, 2.0, 1.9)] {
        assert!(green_free(k, x, y).unwrap() > 0.0);
    }
}

#[test]
fn green_bounded_by_inverse_k_at_high_energy() {
    let mut c: f64 = 0.0;
    for &k in &[0.5, 1.0, 3.0, 10.0] {
        for i in 0..40 {
            let y = (1.0 + i as f64 * 0.5) / k;
            for j in 0..40 {
                let x = y + j as f64 * 0.37 / k;
                c = c.max(green_free(k, x, y).unwrap().abs() * k);
            }
        }
    }
    assert!(c <= 1.2, "fitted constant {c}");
}

#[test]
fn green_derivative_matches_difference() {
    let fd = deriv(|k| green_free(k, 2.0, 1.0).unwrap(), 1.0, 1e-5);
    let d = dgreen_dk(1.0, 2.0, 1.0).unwrap();
    assert!(close(d, fd, 1e-5));
    assert!(close(d, -0.29744115282163263, 1e-10));
    assert!(dgreen_dk(0.7, 3.0, 3.0).unwrap().abs() < 1e-14);
}

#[test]
fn phi_derivative() {
    assert_eq!(dphi_free_dk(0.0, 3.0).unwrap(), 0.0);
    let fd = deriv(|k| phi_free(k, 1.0).unwrap().value, 1.0, 1e-4);
    assert!(close(dphi_free_dk(1.0, 1.0).unwrap(), fd, 1e-6));
}

#[test]
fn free_solutions_solve_the_equation() {
    let grid: Vec<f64> = (0..60).map(|i| 0.01 * 2000f64.powf(i as f64 / 59.0)).collect();
    for &k in &[0.3, 1.0, 5.0] {
        let fns: Vec<Box<dyn Fn(f64) -> f64>> = vec![
            Box::new(move |x| phi_free(k, x).unwrap().value),
            Box::new(move |x| theta_free(k, x).unwrap().value),
            Box::new(move |x| jost_free(k, x).unwrap().value.re),
            Box::new(move |x| jost_free(k, x).unwrap().value.im),
        ];
        for f in &fns {
            for &x in &grid {
                let h = 0.002 * x.min(1.0 / k);
                let r = -second(f.as_ref(), x, h) - f(x) / (4.0 * x * x) - k * k * f(x);
                assert!(r.abs() <= 1e-6, "k={k} x={x} residual {r}");
            }
        }
    }
}

#[test]
fn green_solves_the_equation_beyond_the_source() {
    let (k, y) = (1.3, 0.7);
    let g = move |x: f64| green_free(k, x, y).unwrap();
    for &x in &[1.0f64, 2.5, 8.0] {
        let h = 0.02 * x.min(1.0 / k);
        let r = -second(&g, x, h) - g(x) / (4.0 * x * x) - k * k * g(x);
        assert!(r.abs() <= 1e-6, "x={x} residual {r}");
    }
}

#[test]
fn regimes_follow_thresholds() {
    assert_eq!(Wavenumber::new(1e-4).regime, Wavenumber::new(-1e-4).regime);
    assert_ne!(Wavenumber::new(1.0).regime, Wavenumber::new(1e4).regime);
}

proptest! {
    #[test]
    fn phi_even_in_k(k in 0.0f64..50.0, x in 0.001f64..50.0) {
        prop_assert_eq!(phi_free(k, x).unwrap().value, phi_free(-k, x).unwrap().value);
    }

    #[test]
    fn green_antisymmetric(k in 0.01f64..20.0, x in 0.01f64..20.0, y in 0.01f64..20.0) {
        let a = green_free(k, x, y).unwrap();
        let b = green_free(k, y, x).unwrap();
        prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn jost_free_conjugate_symmetry(k in 0.01f64..50.0, x in 0.01f64..50.0) {
        prop_assert_eq!(jost_free(-k, x).unwrap().value, jost_free(k, x).unwrap().value.conj());
    }

    #[test]
    fn jost_free_bounded(k in 0.01f64..50.0, x in 0.01f64..50.0) {
        // √z H₀(z) is bounded on the positive axis; the sup of |f₀| is about 1.07.
        prop_assert!(jost_free(k, x).unwrap().value.norm() <= 1.1);
    }
}
