//! Gauss–Legendre rules, per-cell spectral integration and adaptive Gauss–Kronrod.

/// Legendre polynomials P₀..P_{n} at s.
pub(crate) fn legendre_all(n: usize, s: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if n == 0 {
        return;
    }
    out[1] = s;
    for p in 1..n {
        let pf = p as f64;
        out[p + 1] = ((2.0 * pf + 1.0) * s * out[p] - pf * out[p - 1]) / (pf + 1.0);
    }
}

/// n-point Gauss–Legendre nodes and weights on [−1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// A Gauss–Legendre rule with its spectral integration matrix
/// `s[j][m] = ∫_{−1}^{τ_j} ℓ_m(s) ds` (ℓ_m the Lagrange basis on the nodes).
#[derive(Debug, Clone)]
pub struct CellRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub integ: Vec<Vec<f64>>,
}

impl CellRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        let mut pm = vec![0.0; n + 1];
        let mut pt = vec![0.0; n + 1];
        let mut integ = vec![vec![0.0; n]; n];
        for (j, &tau) in nodes.iter().enumerate() {
            legendre_all(n, tau, &mut pt);
            for m in 0..n {
                legendre_all(n, nodes[m], &mut pm);
                let mut acc = 0.5 * (tau + 1.0);
                for p in 1..n {
                    acc += 0.5 * pm[p] * (pt[p + 1] - pt[p - 1]);
                }
                integ[j][m] = weights[m] * acc;
            }
        }
        CellRule {
            nodes,
            weights,
            integ,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

// Gauss–Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let d = h * XGK[j];
        let s = f(c - d) + f(c + d);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Adaptive Gauss–Kronrod on [a, b]; returns (integral, error estimate).
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let mut stack = vec![(a, b, gk15(f, a, b))];
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evaluations = 0usize;
    let initial = stack[0].2 .0.abs();
    while let Some((lo, hi, (v, e))) = stack.pop() {
        let local_tol = (abs_tol.max(rel_tol * initial)) * (hi - lo) / (b - a);
        if e <= local_tol || evaluations > 20_000 || (hi - lo) < 1e-14 * (b - a).abs() {
            total += v;
            err += e;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        evaluations += 2;
        stack.push((lo, mid, gk15(f, lo, mid)));
        stack.push((mid, hi, gk15(f, mid, hi)));
    }
    (total, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn integration_matrix_exact_on_degree_seven() {
        let r = CellRule::new(8);
        for (j, &t) in r.nodes.iter().enumerate() {
            let s: f64 = (0..8).map(|m| r.integ[j][m] * r.nodes[m].powi(7)).sum();
            let exact = (t.powi(8) - 1.0) / 8.0;
            assert!((s - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn kronrod_adapts() {
        let (v, _) = integrate(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-13, 1e-13);
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }
}
