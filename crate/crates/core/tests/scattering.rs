use critwave::ode::{count_nodes, OdeOptions};
use critwave::scattering::*;
use critwave::volterra::SolverOptions;
use critwave::{Error, Potential};
use num_complex::Complex64;
use proptest::prelude::*;

fn step() -> Potential {
    Potential::bump(-10.0, 1.0, 2.0, 0.0).unwrap()
}

/// Eigenvalues below zero by Sturm oscillation at zero energy.
fn eigen_count(p: &Potential, x_end: f64) -> usize {
    count_nodes(p, 0.0, x_end, &OdeOptions::default()).unwrap()
}

#[test]
fn free_jost_function_is_one() {
    let p = Potential::zero();
    for &k in &[0.01, 1.0, 50.0] {
        let e = jost_function(&p, k).unwrap();
        assert!((e.normalized - 1.0).norm() < 1e-12);
        assert!((e.m.im - 1.0).abs() < 1e-10);
    }
}

#[test]
fn sharp_step_reference_values() {
    // mpmath: exact Bessel matching at x = 1 and x = 2.
    let refs = [
        (0.5, Complex64::new(-0.8486425835108747, -0.2334848832224533)),
        (2.0, Complex64::new(0.09126356575603757, -1.1764588206419317)),
        (8.0, Complex64::new(0.8048764643819771, -0.5175493086273898)),
    ];
    for (k, f) in refs {
        let e = jost_function(&step(), k).unwrap();
        assert!((e.normalized - f).norm() <= 1e-8, "k={k}: {} vs {f}", e.normalized);
        assert!(e.consistency_gap <= CONSISTENCY_TOL);
    }
}

#[test]
fn sharp_step_bound_state() {
    let b = bound_states(&step(), 20.0).unwrap();
    assert_eq!(b.len(), 1);
    assert!((b[0] - 2.575112686515873).abs() <= 1e-7);
    assert_eq!(eigen_count(&step(), 2.0), 1);
    let opts = SolverOptions::default();
    assert!(jost_imag(&step(), b[0], &opts).unwrap().abs() < 1e-6);
}

#[test]
fn bound_state_count_matches_oscillation() {
    for p in [
        Potential::bump(-2.0, 1.0, 2.0, 0.25).unwrap(),
        Potential::bump(-12.0, 0.5, 3.0, 0.0).unwrap(),
        Potential::bump(3.0, 1.0, 2.0, 0.0).unwrap(),
    ] {
        let n = bound_states(&p, 30.0).unwrap();
        assert_eq!(n.len(), eigen_count(&p, 3.0), "{:?}", p.family());
        assert!(n.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn conjugate_symmetry_in_k() {
    let p = Potential::exponential(1.5, 1.0).unwrap();
    let a = jost_function(&p, 1.3).unwrap();
    let b = jost_function(&p, -1.3).unwrap();
    assert!((a.jost.conj() - b.jost).norm() <= 1e-10 * a.jost.norm());
    assert!((a.m.conj() - b.m).norm() <= 1e-10 * a.m.norm());
}

#[test]
fn weyl_function_imaginary_part() {
    // Im m(k² + i0) = k/|f(k)|².
    let p = Potential::bump(-2.0, 1.0, 2.0, 0.25).unwrap();
    for &k in &[0.3, 1.0, 4.0] {
        let e = jost_function(&p, k).unwrap();
        let expect = k / e.jost.norm_sqr();
        assert!((e.m.im - expect).abs() <= 1e-8 * expect, "k={k}");
    }
}

#[test]
fn split_recombines() {
    let p = Potential::exponential(2.0, 1.0).unwrap();
    let k = 0.7;
    let (f1, f2) = f_split(&p, k).unwrap();
    let e = jost_function(&p, k).unwrap();
    let l = (k * k).ln() / std::f64::consts::PI;
    let f = f1 + Complex64::new(-l, 1.0) * f2;
    assert!((f - e.normalized).norm() <= 1e-9);
}

#[test]
fn high_energy_limit() {
    let p = Potential::exponential(2.0, 1.0).unwrap();
    let e = jost_function(&p, 200.0).unwrap();
    assert!((e.normalized - 1.0).norm() < 0.02);
}

fn exp_f2(a: f64) -> f64 {
    resonance_check(&Potential::exponential(a, 1.0).unwrap(), 1e-6).unwrap().f2_at_0
}

#[test]
fn resonance_is_a_bound_state_threshold() {
    // F₂(0) changes sign between a = −4 and −4.5; a new bound state appears there.
    let (mut lo, mut hi) = (-4.5, -4.0);
    assert!(exp_f2(lo) > 0.0 && exp_f2(hi) < 0.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if exp_f2(mid) > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    let a = 0.5 * (lo + hi);
    let r = resonance_check(&Potential::exponential(a, 1.0).unwrap(), 1e-6).unwrap();
    assert_eq!(r.verdict, Verdict::Resonant);
    let below = eigen_count(&Potential::exponential(a + 0.05, 1.0).unwrap(), 40.0);
    let above = eigen_count(&Potential::exponential(a - 0.05, 1.0).unwrap(), 40.0);
    assert_eq!(above, below + 1);
}

#[test]
fn free_is_resonant_and_repulsive_is_not() {
    let r = resonance_check(&Potential::zero(), 1e-8).unwrap();
    assert_eq!(r.verdict, Verdict::Resonant);
    let r = resonance_check(&Potential::exponential(1.0, 1.0).unwrap(), 1e-6).unwrap();
    assert_eq!(r.verdict, Verdict::NonResonant);
    assert!((r.f2_at_0 - std::f64::consts::FRAC_PI_2.sqrt() * r.wronskian_limit).abs() < 1e-5);
}

#[test]
fn argument_errors() {
    let p = Potential::exponential(1.0, 1.0).unwrap();
    assert!(matches!(resonance_check(&p, 0.0), Err(Error::Parameter(_))));
    assert!(bound_states(&p, 0.0).is_err());
    assert!(jost_imag(&p, -1.0, &SolverOptions::default()).is_err());
    assert!(jost_function(&p, 0.0).is_err());
}

#[test]
fn sweep_csv_columns() {
    let p = Potential::exponential(1.0, 1.0).unwrap();
    let evals: Vec<_> = jost_sweep_k(&p, &[0.5, 1.0, 2.0], &SolverOptions::default())
        .into_iter()
        .map(|r| r.unwrap())
        .collect();
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &evals).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "k,re_F,im_F,F1,F2,abs_f,im_m");
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 3);
    let first: f64 = rows[0].split(',').next().unwrap().parse().unwrap();
    assert_eq!(first, 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn jost_function_bounded_away_from_zero(k in 0.05f64..30.0, a in 0.0f64..4.0) {
        // Repulsive potentials have no real zeros of F.
        let e = jost_function(&Potential::exponential(a, 1.0).unwrap(), k).unwrap();
        prop_assert!(e.normalized.norm() > 1e-3);
        prop_assert!(e.wronskian_spread < 1e-6);
    }
}
