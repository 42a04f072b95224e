use critwave::specfun::*;
use proptest::prelude::*;
use std::f64::consts::PI;

// 40-digit reference values (mpmath), rounded to f64.
const JY_TABLE: &[(f64, f64, f64, f64, f64)] = &[
    (1e-06, 0.99999999999975, 4.999999999999375e-07, -8.869031481659444, -636619.772372175),
    (0.01, 0.9999750001562495, 0.004999937500260416, -3.005455637083646, -63.67859628206065),
    (0.1, 0.99750156206604, 0.049937526036242, -1.5342386513503667, -6.4589510947020266),
    (0.5, 0.9384698072408129, 0.2422684576748739, -0.44451873350670656, -1.471472392670243),
    (1.0, 0.7651976865579666, 0.4400505857449335, 0.08825696421567696, -0.7812128213002887),
    (3.0, -0.26005195490193345, 0.3390589585259365, 0.3768500100127904, 0.3246744247918),
    (5.0, -0.1775967713143383, -0.32757913759146523, -0.30851762524903376, 0.14786314339122683),
    (7.5, 0.2663396578803784, 0.1352484275797055, 0.11731328614820863, -0.25912851048611624),
    (9.0, -0.09033361118287614, 0.24531178657332528, 0.24993669828502468, 0.10431457519671589),
    (11.0, -0.1711903004071961, -0.17678529895672151, -0.16884732389207954, 0.16370553741494284),
    (13.0, 0.20692610237706782, -0.07031805212177837, -0.07820786452787591, -0.2100814084206935),
    (13.9, 0.18357985545786965, 0.11652489036905639, 0.10985918945952657, -0.1797509510695483),
];

const JY_TABLE_LARGE: &[(f64, f64, f64, f64, f64)] = &[
    (14.1, 0.15695287703260125, 0.14878435129739387, 0.14313622862254458, -0.15198133346781773),
    (15.0, -0.014224472826780772, 0.20510403861352275, 0.20546429603891828, 0.02107362803687351),
    (17.0, -0.16985425215118355, -0.09766849275778065, -0.0926371984423237, 0.1672050360772337),
    (20.0, 0.16702466434058316, 0.06683312417585005, 0.06264059680938383, -0.1655116143625213),
    (30.0, -0.08636798358104021, -0.11875106261662294, -0.11729573168666403, 0.08442557066174723),
    (50.0, 0.055812327669251816, -0.09751182812517514, -0.09806499547007708, -0.05679566856201477),
    (100.0, 0.019985850304223122, -0.07714535201411216, -0.07724431336508315, -0.020372312002759792),
    (1000.5, 0.01948655998713014, 0.016027715373203338, 0.016017974964604328, -0.019478557437521776),
];

const IK_TABLE: &[(f64, f64, f64, f64, f64)] = &[
    (0.0001, 1.0000000025, 5.00000000625e-05, 9.326271913450276, 9999.999508686404),
    (0.3, 1.022626879351597, 0.15169384000359276, 1.3724600605442974, 3.055992033457325),
    (0.99, 1.2604492607081457, 0.5581714164778423, 0.42709503097965784, 0.6122489779992295),
    (1.01, 1.2717525859257404, 0.5721897329506921, 0.415056144085075, 0.5917881779729701),
    (2.0, 2.2795853023360673, 1.590636854637329, 0.11389387274953344, 0.13986588181652243),
    (5.0, 27.239871823604446, 24.335642142450528, 0.0036910983340425942, 0.004044613445452165),
    (10.0, 2815.7166284662544, 2670.9883037012546, 1.778006231616765e-05, 1.8648773453825585e-05),
    (17.9, 5642579.560048394, 5482629.114450267, 4.952330101180311e-09, 5.088830788300595e-09),
    (18.1, 6853118.776963021, 6661032.670669892, 4.032456690957726e-09, 4.142390340355361e-09),
    (19.9, 39513376.52006682, 38507423.87486228, 6.360780949642313e-10, 6.518685500851477e-10),
    (20.1, 48017874.1071365, 46807739.533029884, 5.182101748797715e-10, 5.309480556151319e-10),
    (30.0, 781672297823.9775, 768532038938.957, 2.1324774964630563e-14, 2.1677320018915495e-14),
    (60.0, 5.894077055609801e+24, 5.844751588390468e+24, 1.4138978405591078e-27, 1.4256320265171043e-27),
];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// J_n(x) = (1/π)∫₀^π cos(nθ − x sin θ) dθ; the periodic trapezoid rule is
/// exponentially accurate once the node count exceeds x by a margin.
fn j_integral(n: f64, x: f64) -> f64 {
    let m = (2.0 * x) as usize + 200;
    let h = PI / m as f64;
    let mut s = 0.5 * (1.0 + (n * PI).cos());
    for i in 1..m {
        let t = i as f64 * h;
        s += (n * t - x * t.sin()).cos();
    }
    s * h / PI
}

#[test]
fn series_range_relative_accuracy() {
    for &(x, j0, j1, y0, y1) in JY_TABLE {
        let r = jy01(x);
        assert!(rel(r.j0, j0) < 1e-12, "J0({x})");
        assert!(rel(r.j1, j1) < 1e-12, "J1({x})");
        assert!(rel(r.y0, y0) < 1e-12, "Y0({x})");
        assert!(rel(r.y1, y1) < 1e-12, "Y1({x})");
    }
}

#[test]
fn asymptotic_range_absolute_accuracy() {
    for &(x, j0, j1, y0, y1) in JY_TABLE_LARGE {
        let r = jy01(x);
        for (got, want) in [(r.j0, j0), (r.j1, j1), (r.y0, y0), (r.y1, y1)] {
            assert!((got - want).abs() < 1e-10, "x={x} got {got} want {want}");
        }
    }
}

#[test]
fn j_matches_integral_representation() {
    for &x in &[0.3, 2.0, 8.0, 13.5, 14.5, 25.0, 77.7] {
        let r = jy01(x);
        assert!((r.j0 - j_integral(0.0, x)).abs() < 1e-13, "J0 {x}");
        assert!((r.j1 - j_integral(1.0, x)).abs() < 1e-13, "J1 {x}");
    }
}

#[test]
fn first_j0_root() {
    let v = bessel_j(Order::Zero, 2.404825557695773).unwrap().value;
    assert!(v.abs() < 1e-10);
}

#[test]
fn y0_small_argument_limit() {
    let x = 1e-9;
    let v = bessel_y(Order::Zero, x).unwrap().value - 2.0 / PI * (x / 2.0).ln();
    assert!((v - 2.0 * EULER_GAMMA / PI).abs() < 1e-12);
    assert!((2.0 * EULER_GAMMA / PI - 0.367467).abs() < 1e-6);
}

#[test]
fn y0_envelope_at_ten() {
    let v = bessel_y(Order::Zero, 10.0).unwrap().value;
    assert!(v.abs() <= (2.0 / (PI * 10.0)).sqrt() * 1.1);
}

fn deriv(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-4 * x.max(1e-2);
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

#[test]
fn same_order_wronskian() {
    for &x in &[0.1, 1.0, 10.0] {
        let r = jy01(x);
        // J₀′ = −J₁, Y₀′ = −Y₁
        let w = r.j0 * (-r.y1) - (-r.j1) * r.y0;
        assert!((w - 2.0 / (PI * x)).abs() < 1e-10, "x={x}");
    }
}

#[test]
fn cross_order_wronskian_on_log_grid() {
    let n = 200;
    for i in 0..=n {
        let x = 0.05 * (100.0f64 / 0.05).powf(i as f64 / n as f64);
        let r = jy01(x);
        let w = r.j1 * r.y0 - r.j0 * r.y1;
        assert!((w - 2.0 / (PI * x)).abs() < 1e-10, "x={x} w={w}");
    }
}

#[test]
fn derivative_identities() {
    for &x in &[0.3, 1.0, 4.0, 12.0, 16.0, 40.0] {
        let dj0 = deriv(|s| jy01(s).j0, x);
        let dy0 = deriv(|s| jy01(s).y0, x);
        let r = jy01(x);
        assert!(rel(dj0, -r.j1) < 1e-6, "J0' at {x}");
        assert!(rel(dy0, -r.y1) < 1e-6, "Y0' at {x}");
        // J₁′ = J₀ − J₁/x
        let dj1 = deriv(|s| jy01(s).j1, x);
        assert!((dj1 - (r.j0 - r.j1 / x)).abs() < 1e-6 * (1.0 + r.j0.abs()), "J1' at {x}");
    }
}

#[test]
fn branches_agree_in_overlap_window() {
    let n = 100;
    for i in 0..=n {
        let x = SERIES_SWITCH - 1.0 + 2.0 * i as f64 / n as f64;
        let s = jy01_series(x);
        let a = jy01_asymptotic(x);
        for (p, q) in [(s.j0, a.j0), (s.j1, a.j1), (s.y0, a.y0), (s.y1, a.y1)] {
            assert!((p - q).abs() < 1e-8, "x={x}: {p} vs {q}");
        }
    }
}

#[test]
fn modulus_monotone_decreasing() {
    let n = 400;
    let mut prev = f64::INFINITY;
    for i in 0..=n {
        let x = 1e-3 * (1e3f64 / 1e-3).powf(i as f64 / n as f64);
        let r = jy01(x);
        let m = r.j0 * r.j0 + r.y0 * r.y0;
        assert!(m < prev, "x={x}");
        prev = m;
    }
}

#[test]
fn hankel_composition() {
    for &x in &[0.5, 5.0, 20.0] {
        let h1 = hankel(HankelKind::First, Order::Zero, x).unwrap().value;
        let h2 = hankel(HankelKind::Second, Order::Zero, x).unwrap().value;
        let j = bessel_j(Order::Zero, x).unwrap().value;
        let y = bessel_y(Order::Zero, x).unwrap().value;
        assert_eq!(h1.re, j);
        assert_eq!(h1.im, y);
        assert_eq!(h2, h1.conj());
    }
    let x = 50.0;
    let h = hankel(HankelKind::First, Order::Zero, x).unwrap().value;
    let lead = num_complex::Complex64::from_polar(1.0, x - PI / 4.0);
    assert!(((PI * x / 2.0).sqrt() * h - lead).norm() <= 0.01);
    let big = 1e4;
    let hb = hankel(HankelKind::First, Order::Zero, big).unwrap().value;
    let m = ((PI * big / 2.0).sqrt() * hb * num_complex::Complex64::from_polar(1.0, -big)).norm();
    assert!((m - 1.0).abs() < 1e-4);
}

#[test]
fn modified_against_table() {
    for &(x, i0, i1, k0, k1) in IK_TABLE {
        let r = ik01(x);
        assert!(rel(r.i0, i0) < 1e-10, "I0({x})");
        assert!(rel(r.i1, i1) < 1e-10, "I1({x})");
        assert!(rel(r.k0, k0) < 1e-10, "K0({x})");
        assert!(rel(r.k1, k1) < 1e-10, "K1({x})");
    }
}

#[test]
fn modified_examples() {
    let i = modified_bessel(Modified::I0, 1e-12).unwrap().value;
    assert!((i - 1.0).abs() < 1e-15);
    // the product crosses 1/2 near x = 1.0667, so the check starts just above it
    for &x in &[1.07, 2.0, 5.0, 17.0, 19.0, 40.0, 200.0] {
        let r = ik01(x);
        assert!(r.k0 * r.i0 <= 0.5, "x={x}");
    }
    let di0 = deriv(|s| ik01(s).i0, 1.0);
    assert!(rel(di0, ik01(1.0).i1) < 1e-6);
    let dk0 = deriv(|s| ik01(s).k0, 3.0);
    assert!(rel(dk0, -ik01(3.0).k1) < 1e-6);
}

#[test]
fn modified_wronskian() {
    // I₀K₁ + I₁K₀ = 1/x
    for &x in &[1e-3, 0.5, 1.0, 3.0, 17.9, 18.1, 25.0, 100.0] {
        let r = ik01(x);
        assert!(rel(r.i0 * r.k1 + r.i1 * r.k0, 1.0 / x) < 1e-12, "x={x}");
    }
}

#[test]
fn modified_monotone() {
    let mut pi = 0.0;
    let mut pk = f64::INFINITY;
    for i in 1..=600 {
        let x = i as f64 * 0.1;
        let r = ik01(x);
        assert!(r.i0 > pi && r.k0 < pk, "x={x}");
        pi = r.i0;
        pk = r.k0;
    }
}

#[test]
fn digamma_values() {
    assert!((digamma_int(1).unwrap() + 0.5772156649015329).abs() < 1e-15);
    assert!((digamma_int(2).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-15);
    let h9: f64 = (1..10).map(|j| 1.0 / j as f64).sum();
    assert!((digamma_int(10).unwrap() - (h9 - EULER_GAMMA)).abs() < 1e-15);
}

proptest! {
    #[test]
    fn error_estimates_finite(x in 1e-6f64..1e4) {
        for o in [Order::Zero, Order::One] {
            let j = bessel_j(o, x).unwrap();
            let y = bessel_y(o, x).unwrap();
            prop_assert!(j.abs_error_est.is_finite() && j.abs_error_est >= 0.0);
            prop_assert!(y.abs_error_est.is_finite() && y.abs_error_est >= 0.0);
        }
        let k = modified_bessel(Modified::K0, x.min(600.0)).unwrap();
        prop_assert!(k.abs_error_est.is_finite() && k.abs_error_est >= 0.0);
    }

    #[test]
    fn wronskian_everywhere(x in 0.05f64..100.0) {
        let r = jy01(x);
        prop_assert!((r.j1 * r.y0 - r.j0 * r.y1 - 2.0 / (PI * x)).abs() < 1e-10);
    }

    #[test]
    fn digamma_recurrence(n in 1i64..500) {
        let a = digamma_int(n).unwrap();
        let b = digamma_int(n + 1).unwrap();
        prop_assert!((b - a - 1.0 / n as f64).abs() < 1e-14);
    }
}
