use super::EULER_GAMMA;
use std::f64::consts::PI;

/// I₀, I₁, K₀, K₁ at one positive argument with relative error estimates.
#[derive(Debug, Clone, Copy)]
pub struct Ik01 {
    pub i0: f64,
    pub i1: f64,
    pub k0: f64,
    pub k1: f64,
    pub rel_err_i: f64,
    pub rel_err_k: f64,
}

const I_SERIES_MAX: f64 = 20.0;
const K_SERIES_MAX: f64 = 1.0;
const K_TRAPEZOID_MAX: f64 = 18.0;

pub fn ik01(x: f64) -> Ik01 {
    let (i0, i1) = if x <= I_SERIES_MAX {
        i_series(x)
    } else {
        i_asymptotic(x)
    };
    let (k0, k1) = if x <= K_SERIES_MAX {
        k_series(x, i0, i1)
    } else if x <= K_TRAPEZOID_MAX {
        k_trapezoid(x)
    } else {
        k_asymptotic(x)
    };
    Ik01 {
        i0,
        i1,
        k0,
        k1,
        rel_err_i: 1e-15,
        rel_err_k: if x <= K_SERIES_MAX { 1e-14 } else { 1e-15 },
    }
}

fn i_series(x: f64) -> (f64, f64) {
    let z = 0.25 * x * x;
    let (mut t0, mut t1) = (1.0f64, 1.0f64);
    let (mut s0, mut s1) = (1.0, 1.0);
    let mut k = 1.0;
    while t0 > 1e-18 * s0 || t1 > 1e-18 * s1 {
        t0 *= z / (k * k);
        t1 *= z / (k * (k + 1.0));
        s0 += t0;
        s1 += t1;
        k += 1.0;
    }
    (s0, 0.5 * x * s1)
}

/// Σ b_j with b_j = a_j(ν)/x^j; `alternate` flips the sign of odd terms.
fn modified_asym_sum(mu: f64, x: f64, alternate: bool) -> f64 {
    let mut s = 1.0;
    let mut b = 1.0f64;
    for j in 1..100 {
        let jf = j as f64;
        let nb = b * (mu - (2.0 * jf - 1.0).powi(2)) / (8.0 * jf * x);
        if nb.abs() >= b.abs() || nb.abs() < 1e-18 {
            break;
        }
        b = nb;
        s += if alternate && j % 2 == 1 { -b } else { b };
    }
    s
}

fn i_asymptotic(x: f64) -> (f64, f64) {
    let pre = x.exp() / (2.0 * PI * x).sqrt();
    (
        pre * modified_asym_sum(0.0, x, true),
        pre * modified_asym_sum(4.0, x, true),
    )
}

fn k_asymptotic(x: f64) -> (f64, f64) {
    let pre = (PI / (2.0 * x)).sqrt() * (-x).exp();
    (
        pre * modified_asym_sum(0.0, x, false),
        pre * modified_asym_sum(4.0, x, false),
    )
}

fn k_series(x: f64, i0: f64, i1: f64) -> (f64, f64) {
    let z = 0.25 * x * x;
    let lg = (0.5 * x).ln();
    let (mut t0, mut t1) = (1.0f64, 1.0f64);
    let mut h = 0.0;
    let mut s0 = 0.0;
    let mut s1 = -2.0 * EULER_GAMMA + 1.0; // ψ(1) + ψ(2)
    let mut k = 1.0;
    loop {
        t0 *= z / (k * k);
        t1 *= z / (k * (k + 1.0));
        h += 1.0 / k;
        s0 += h * t0;
        s1 += (-2.0 * EULER_GAMMA + 2.0 * h + 1.0 / (k + 1.0)) * t1;
        if t0 < 1e-18 && t1 < 1e-18 {
            break;
        }
        k += 1.0;
    }
    let k0 = -(lg + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + lg * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt by the trapezoid rule, which
/// converges geometrically for this analytic, rapidly decaying integrand.
fn k_trapezoid(x: f64) -> (f64, f64) {
    const H: f64 = 0.1;
    let scale = (-x).exp();
    let mut s0 = 0.5;
    let mut s1 = 0.5;
    let mut j = 1.0;
    loop {
        let t = j * H;
        let c = t.cosh();
        let e = (-x * (c - 1.0)).exp();
        s0 += e;
        s1 += e * c;
        if x * (c - 1.0) > 45.0 {
            break;
        }
        j += 1.0;
    }
    (H * s0 * scale, H * s1 * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_meet() {
        for x in [0.9, 1.0, 1.1] {
            let (i0, i1) = i_series(x);
            let (a0, a1) = k_series(x, i0, i1);
            let (b0, b1) = k_trapezoid(x);
            assert!((a0 / b0 - 1.0).abs() < 1e-13 && (a1 / b1 - 1.0).abs() < 1e-13, "{x}");
        }
        for x in [17.0, 18.0, 19.0] {
            let (a0, a1) = k_asymptotic(x);
            let (b0, b1) = k_trapezoid(x);
            assert!((a0 / b0 - 1.0).abs() < 1e-13 && (a1 / b1 - 1.0).abs() < 1e-13, "{x}");
        }
        for x in [19.0, 20.0, 21.0] {
            let (a0, a1) = i_asymptotic(x);
            let (b0, b1) = i_series(x);
            assert!((a0 / b0 - 1.0).abs() < 1e-13 && (a1 / b1 - 1.0).abs() < 1e-13, "{x}");
        }
    }
}
