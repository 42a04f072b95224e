use critwave::freeops::{dphi_free_dk, jost_free, phi_free};
use critwave::ode::{self, OdeOptions};
use critwave::volterra::*;
use critwave::{Error, Potential};
use num_complex::Complex64;
use proptest::prelude::*;

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

fn exp1() -> Potential {
    Potential::exponential(1.0, 1.0).unwrap()
}

fn potentials() -> Vec<Potential> {
    vec![
        exp1(),
        Potential::bump(-2.0, 1.0, 2.0, 0.25).unwrap(),
        Potential::bump(-10.0, 1.0, 2.0, 0.0).unwrap(),
    ]
}

/// f₀ and its x-derivative by a Richardson difference.
fn jost_free_with_derivative(k: f64, x: f64) -> (Complex64, Complex64) {
    let f = |x: f64| jost_free(k, x).unwrap().value;
    let h = 1e-3 * x.min(1.0 / k);
    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    let d2 = (f(x + 2.0 * h) - f(x - 2.0 * h)) / (4.0 * h);
    (f(x), (d1 * 4.0 - d2) / 3.0)
}

#[test]
fn free_regular_solution_is_phi() {
    let grid = log_grid(0.01, 20.0, 80);
    let p = Potential::custom("zero", |_| 0.0, (0.0, None), vec![], 1.0);
    for &k in &[0.1, 1.0, 10.0] {
        let r = regular_solution(&p, k, &grid, 1e-10).unwrap();
        for (x, v) in grid.iter().zip(&r.values) {
            let e = phi_free(k, *x).unwrap().value;
            assert!((v - e).abs() <= 1e-9 * e.abs());
        }
    }
}

#[test]
fn regular_solution_matches_ode() {
    let grid = log_grid(0.1, 10.0, 40);
    let r = regular_solution(&exp1(), 1.0, &grid, 1e-11).unwrap();
    let o = ode::regular(&exp1(), 1.0, &grid, &OdeOptions::default()).unwrap();
    for (a, b) in r.values.iter().zip(&o) {
        assert!((a - b.0).abs() <= 1e-6 * b.0.abs().max(1e-2));
    }
}

#[test]
fn regular_solution_boundary_normalization() {
    // φ(k², x)/√x → √(π/2) as x → 0.
    let r = regular_solution(&exp1(), 2.0, &[1e-7, 1.0], 1e-11).unwrap();
    let lim = (std::f64::consts::PI / 2.0).sqrt();
    assert!((r.values[0] / 1e-7f64.sqrt() - lim).abs() < 1e-6);
}

#[test]
fn regular_solution_rejects_bad_input() {
    assert!(matches!(regular_solution(&exp1(), 1.0, &[1.0, 0.5], 1e-9), Err(Error::Grid(_))));
    assert!(regular_solution(&exp1(), 1.0, &[-1.0, 0.5], 1e-9).is_err());
    // ∫₀¹ x(1 − log x)|q| = ∞ for q = x⁻².
    let p = Potential::custom("x^-2", |x| 1.0 / (x * x), (0.0, Some(1.0)), vec![], 1.0);
    assert!(matches!(regular_solution(&p, 1.0, &[0.5], 1e-9), Err(Error::Hypothesis(_))));
}

#[test]
fn iteration_count_within_certificate() {
    let grid = log_grid(0.1, 10.0, 10);
    for p in potentials() {
        for &k in &[0.5, 2.0, 8.0] {
            let r = regular_solution(&p, k, &grid, 1e-10).unwrap();
            assert!(r.iteration_count <= r.certificate, "{} > {}", r.iteration_count, r.certificate);
            assert!(r.tail_estimate <= 1e-10);
        }
    }
}

#[test]
fn fields_solve_the_equation() {
    // Second derivative from the returned first derivatives; residual ≤ 10·tol.
    let tol = 1e-10;
    for p in potentials() {
        for &k in &[0.5, 2.0] {
            for &x in &[0.3, 1.5, 4.0] {
                if p.breakpoints().iter().any(|b| (b - x).abs() < 0.1) {
                    continue;
                }
                let h = 1e-3;
                let pts = [x - 2.0 * h, x - h, x, x + h, x + 2.0 * h];
                let r = regular_solution(&p, k, &pts, tol).unwrap();
                let d = r.derivatives.as_ref().unwrap();
                let d1 = (d[3] - d[1]) / (2.0 * h);
                let d2 = (d[4] - d[0]) / (4.0 * h);
                let upp = (4.0 * d1 - d2) / 3.0;
                let u = r.values[2];
                let res = -upp - u / (4.0 * x * x) + (p.eval(x) - k * k) * u;
                assert!(res.abs() <= 10.0 * tol.max(1e-9), "k={k} x={x} residual {res}");

                let j = jost_solution(&p, k, &pts, tol).unwrap();
                let d = j.derivatives.as_ref().unwrap();
                let d1 = (d[3] - d[1]) / (2.0 * h);
                let d2 = (d[4] - d[0]) / (4.0 * h);
                let upp = (d1 * 4.0 - d2) / 3.0;
                let u = j.values[2];
                let res = -upp - u / (4.0 * x * x) + (p.eval(x) - k * k) * u;
                assert!(res.norm() <= 10.0 * tol.max(1e-9), "jost k={k} x={x} residual {res}");
            }
        }
    }
}

#[test]
fn free_dk_is_free_derivative() {
    let grid = log_grid(0.05, 10.0, 20);
    let p = Potential::custom("zero", |_| 0.0, (0.0, None), vec![], 1.0);
    let r = regular_solution_dk(&p, 1.3, &grid, 1e-11).unwrap();
    for (x, v) in grid.iter().zip(&r.values) {
        let e = dphi_free_dk(1.3, *x).unwrap();
        assert!((v - e).abs() <= 1e-9 * e.abs().max(1e-3));
    }
}

#[test]
fn dk_matches_finite_difference() {
    let p = exp1();
    let phi = |k: f64| regular_solution(&p, k, &[2.0], 1e-12).unwrap().values[0];
    let h = 1e-4;
    let d1 = (phi(1.0 + h) - phi(1.0 - h)) / (2.0 * h);
    let d2 = (phi(1.0 + 2.0 * h) - phi(1.0 - 2.0 * h)) / (4.0 * h);
    let fd = (4.0 * d1 - d2) / 3.0;
    let d = regular_solution_dk(&p, 1.0, &[2.0], 1e-12).unwrap().values[0];
    assert!((d - fd).abs() <= 1e-4 * fd.abs());
}

#[test]
fn dk_vanishes_linearly_at_zero() {
    let p = exp1();
    let a = regular_solution_dk(&p, 1e-3, &[2.0], 1e-12).unwrap().values[0];
    let b = regular_solution_dk(&p, 2e-3, &[2.0], 1e-12).unwrap().values[0];
    assert!((b / a - 2.0).abs() < 1e-4, "ratio {}", b / a);
    assert!(matches!(regular_solution_dk(&p, 0.0, &[2.0], 1e-9), Err(Error::SingularInput(_))));
}

#[test]
fn free_jost_solution_is_jost_free() {
    let grid = log_grid(0.01, 20.0, 50);
    let p = Potential::custom("zero", |_| 0.0, (0.0, Some(1.0)), vec![], 1.0);
    for &k in &[0.1, 1.0, 10.0] {
        let j = jost_solution(&p, k, &grid, 1e-10).unwrap();
        for (x, v) in grid.iter().zip(&j.values) {
            let e = jost_free(k, *x).unwrap().value;
            assert!((v - e).norm() <= 1e-9 * e.norm());
        }
    }
}

#[test]
fn jost_solution_matches_inward_ode() {
    let grid = log_grid(0.1, 10.0, 30);
    let p = exp1();
    let k = 2.0;
    let j = jost_solution(&p, k, &grid, 1e-11).unwrap();
    let x_end = 40.0;
    let (u0, du0) = jost_free_with_derivative(k, x_end);
    let targets: Vec<f64> = grid.iter().rev().copied().collect();
    let o = ode::propagate(&p, k * k, x_end, u0, du0, &targets, &OdeOptions::default()).unwrap();
    for (a, b) in j.values.iter().zip(o.iter().rev()) {
        assert!((a - b.0).norm() <= 1e-6 * b.0.norm());
    }
}

#[test]
fn jost_solution_tends_to_plane_wave() {
    let k = 3.0;
    let j = jost_solution(&exp1(), k, &[30.0, 60.0], 1e-11).unwrap();
    for (x, v) in [30.0f64, 60.0].iter().zip(&j.values) {
        let r = (v * Complex64::from_polar(1.0, -k * x) - 1.0).norm();
        assert!(r < 1.0 / (k * x), "x={x} {r}");
    }
}

#[test]
fn jost_rejects_zero_wavenumber() {
    assert!(matches!(jost_solution(&exp1(), 0.0, &[1.0], 1e-9), Err(Error::SingularInput(_))));
}

#[test]
fn zero_energy_pair_free() {
    let grid = log_grid(0.01, 50.0, 30);
    let p = Potential::custom("zero", |_| 0.0, (0.0, Some(1.0)), vec![], 1.0);
    let (y1, y2) = zero_energy_pair(&p, &grid).unwrap();
    for (i, &x) in grid.iter().enumerate() {
        assert!((y1.values[i] - x.sqrt()).abs() <= 1e-10 * x.sqrt());
        let e = x.sqrt() * x.ln();
        assert!((y2.values[i] - e).abs() <= 1e-10 * e.abs().max(x.sqrt()));
        let w = y1.values[i] * y2.derivatives.as_ref().unwrap()[i] - y1.derivatives.as_ref().unwrap()[i] * y2.values[i];
        assert!((w - 1.0).abs() < 1e-10);
    }
}

#[test]
fn zero_energy_pair_wronskian_and_tail() {
    let grid = log_grid(0.05, 10.0, 25);
    let p = exp1();
    let (y1, y2) = zero_energy_pair(&p, &grid).unwrap();
    let (d1, d2) = (y1.derivatives.unwrap(), y2.derivatives.unwrap());
    for i in 0..grid.len() {
        let w = y1.values[i] * d2[i] - d1[i] * y2.values[i];
        assert!((w - 1.0).abs() < 1e-8, "x={} W={w}", grid[i]);
    }
    // |y₁/√x − 1| ≤ C ∫ₓ^∞ s log²(s)|q| at x = 10.
    let x = 10.0f64;
    let rhs = p.weighted_integral(&|s: f64| s * s.ln().powi(2), x, 80.0);
    let lhs = (y1.values.last().unwrap() / x.sqrt() - 1.0).abs();
    assert!(lhs <= 2.0 * rhs, "{lhs} vs {rhs}");
}

#[test]
fn ode_oracle_free_and_abel() {
    let opts = OdeOptions::default();
    let z = Potential::zero();
    let k = 1.2;
    let x0 = 0.01;
    let f = |x: f64| phi_free(k, x).unwrap().value;
    let h = 1e-5;
    let d0 = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
    let d0b = (f(x0 + 2.0 * h) - f(x0 - 2.0 * h)) / (4.0 * h);
    let du = (4.0 * d0 - d0b) / 3.0;
    let r = ode::propagate(&z, k * k, x0, f(x0).into(), du.into(), &[10.0], &opts).unwrap();
    assert!((r[0].0.re - f(10.0)).abs() <= 1e-8 * f(10.0).abs());

    // Two solutions of the same equation keep a constant Wronskian.
    let p = exp1();
    let pts = log_grid(0.1, 20.0, 15);
    let a = ode::propagate(&p, 2.0, 0.05, 1.0.into(), 0.0.into(), &pts, &opts).unwrap();
    let b = ode::propagate(&p, 2.0, 0.05, 0.0.into(), 1.0.into(), &pts, &opts).unwrap();
    let w: Vec<f64> = a.iter().zip(&b).map(|(a, b)| (a.0 * b.1 - a.1 * b.0).re).collect();
    for v in &w {
        assert!((v - w[0]).abs() <= 1e-8 * w[0].abs());
    }
}

#[test]
fn negative_wavenumber_conjugates() {
    let grid = [0.5, 2.0, 5.0];
    let p = exp1();
    let a = jost_solution(&p, 1.5, &grid, 1e-11).unwrap();
    let b = jost_solution(&p, -1.5, &grid, 1e-11).unwrap();
    for (u, v) in a.values.iter().zip(&b.values) {
        assert!((u.conj() - v).norm() <= 1e-10);
    }
    let a = regular_solution(&p, 1.5, &grid, 1e-11).unwrap();
    let b = regular_solution(&p, -1.5, &grid, 1e-11).unwrap();
    assert_eq!(a.values, b.values);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn regular_solution_is_real_and_even(k in 0.05f64..20.0, a in -3.0f64..3.0) {
        let p = Potential::exponential(a, 1.0).unwrap();
        let grid = [0.2, 1.0, 3.0];
        let r = regular_solution(&p, k, &grid, 1e-10).unwrap();
        let m = regular_solution(&p, -k, &grid, 1e-10).unwrap();
        prop_assert!(r.values.iter().all(|v| v.is_finite()));
        prop_assert_eq!(r.values, m.values);
    }

    #[test]
    fn estimate_for_regular_solution(k in 0.05f64..20.0, x in 0.01f64..20.0) {
        // |φ − φ₀| ≤ C (x/(1+kx))^{1/2} ∫₀ˣ y/(1+ky)(1 + log(x/y))|q| dy with C = 3.
        let p = exp1();
        let v = regular_solution(&p, k, &[x], 1e-11).unwrap().values[0];
        let e = (v - phi_free(k, x).unwrap().value).abs();
        let w = p.weighted_integral(&|y| y / (1.0 + k * y) * (1.0 + (x / y).ln()), 0.0, x);
        prop_assert!(e <= 3.0 * (x / (1.0 + k * x)).sqrt() * w + 1e-12);
    }
}
