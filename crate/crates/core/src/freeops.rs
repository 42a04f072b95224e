//! Closed-form solutions of the unperturbed equation −u″ − u/(4x²) = k²u.

use crate::error::{domain, Error, Result};
use crate::specfun::{ik01, jy01, Jy01};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// |k| below this is treated as the near-zero regime.
pub const NEAR_ZERO_K: f64 = 1e-3;
/// |k| above this is treated as the asymptotic regime.
pub const ASYMPTOTIC_K: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NearZero,
    Bulk,
    Asymptotic,
}

/// A real wavenumber with its regime classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber {
    pub k: f64,
    pub regime: Regime,
}

impl Wavenumber {
    pub fn new(k: f64) -> Self {
        let a = k.abs();
        let regime = if a < NEAR_ZERO_K {
            Regime::NearZero
        } else if a > ASYMPTOTIC_K {
            Regime::Asymptotic
        } else {
            Regime::Bulk
        };
        Wavenumber { k, regime }
    }
}

/// Which formula produced a free value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Bessel functions in their power-series range.
    Series,
    /// Bessel functions in their asymptotic range.
    Asymptotic,
    /// Exact zero-energy limit.
    ZeroEnergy,
    /// Modified Bessel functions (imaginary wavenumber).
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEval<T> {
    pub value: T,
    pub source: Branch,
}

fn branch(kx: f64) -> Branch {
    if kx == 0.0 {
        Branch::ZeroEnergy
    } else if kx <= crate::specfun::SERIES_SWITCH {
        Branch::Series
    } else {
        Branch::Asymptotic
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("x must be positive and finite, got {x}")))
    }
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("k must be finite, got {k}")))
    }
}

/// φ₀(k², x) = √(πx/2) J₀(kx).
pub fn phi_free(k: f64, x: f64) -> Result<FreeEval<f64>> {
    check_x(x)?;
    check_k(k)?;
    let kx = (k * x).abs();
    let (j0, _) = crate::specfun::j01(kx);
    Ok(FreeEval {
        value: (FRAC_PI_2 * x).sqrt() * j0,
        source: branch(kx),
    })
}

/// θ₀(k², x) = √(πx/2)[(1/π) log(k²) J₀(kx) − Y₀(kx)] for k > 0.
pub fn theta_free(k: f64, x: f64) -> Result<FreeEval<f64>> {
    check_x(x)?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(domain(format!("theta_free requires k > 0, got {k}")));
    }
    let r = jy01(k * x);
    Ok(FreeEval {
        value: (FRAC_PI_2 * x).sqrt() * ((k * k).ln() / PI * r.j0 - r.y0),
        source: branch(k * x),
    })
}

/// f₀(k, x) = e^{iπ/4} √(πkx/2) H₀⁽¹⁾(kx); negative k gives the conjugate.
pub fn jost_free(k: f64, x: f64) -> Result<FreeEval<Complex64>> {
    check_x(x)?;
    check_k(k)?;
    if k == 0.0 {
        return Err(Error::SingularInput("jost_free at k = 0".into()));
    }
    let a = k.abs();
    let v = jost_free_unchecked(a, x, &jy01(a * x)).0;
    Ok(FreeEval {
        value: if k < 0.0 { v.conj() } else { v },
        source: branch(a * x),
    })
}

/// f₀(iκ, x) = √(2κx/π) K₀(κx), real.
pub fn jost_free_imag(kappa: f64, x: f64) -> Result<FreeEval<f64>> {
    check_x(x)?;
    if !(kappa > 0.0) {
        return Err(domain(format!("kappa must be positive, got {kappa}")));
    }
    Ok(FreeEval {
        value: (2.0 * kappa * x / PI).sqrt() * ik01(kappa * x).k0,
        source: Branch::Modified,
    })
}

/// f₀(k) = W(f₀(k,·), φ₀(k²,·)) = √k e^{−iπ/4} for k > 0.
pub fn jost_function_free(k: f64) -> Complex64 {
    let v = Complex64::from_polar(k.abs().sqrt(), -FRAC_PI_4);
    if k < 0.0 {
        v.conj()
    } else {
        v
    }
}

/// G₀(k², x, y) = φ₀(x)θ₀(y) − φ₀(y)θ₀(x); a function of k².
pub fn green_free(k: f64, x: f64, y: f64) -> Result<f64> {
    check_x(x)?;
    check_x(y)?;
    check_k(k)?;
    Ok(green_unchecked(k.abs(), x, y))
}

pub(crate) fn green_unchecked(k: f64, x: f64, y: f64) -> f64 {
    if k == 0.0 {
        return (x * y).sqrt() * (x / y).ln();
    }
    let a = jy01(k * x);
    let b = jy01(k * y);
    -FRAC_PI_2 * (x * y).sqrt() * (a.j0 * b.y0 - b.j0 * a.y0)
}

/// ∂ₖG₀(k², x, y).
pub fn dgreen_dk(k: f64, x: f64, y: f64) -> Result<f64> {
    check_x(x)?;
    check_x(y)?;
    check_k(k)?;
    if k == 0.0 {
        return Ok(0.0);
    }
    let s = k.signum();
    let k = k.abs();
    let a = jy01(k * x);
    let b = jy01(k * y);
    let v = FRAC_PI_2
        * (x * y).sqrt()
        * (x * a.j1 * b.y0 + y * a.j0 * b.y1 - y * b.j1 * a.y0 - x * b.j0 * a.y1);
    Ok(s * v)
}

/// ∂ₖφ₀(k², x) = −x√(πx/2) J₁(kx).
pub fn dphi_free_dk(k: f64, x: f64) -> Result<f64> {
    check_x(x)?;
    check_k(k)?;
    let (_, j1) = crate::specfun::j01(k * x);
    Ok(-x * (FRAC_PI_2 * x).sqrt() * j1)
}

/// Values and x-derivatives of the free pair at one point.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Pair {
    pub u: f64,
    pub du: f64,
    pub v: f64,
    pub dv: f64,
}

/// Real wavenumber: u = φ₀, v = θ₀ (W(u, v) = −1). At k = 0, v = −√(2x/π) log x.
pub(crate) fn real_pair(k: f64, x: f64, r: &Jy01) -> Pair {
    let sx = x.sqrt();
    let c = FRAC_PI_2.sqrt();
    if k == 0.0 {
        let lx = x.ln();
        let d = (2.0 / PI).sqrt();
        return Pair {
            u: c * sx,
            du: c * 0.5 / sx,
            v: -d * sx * lx,
            dv: -d * (lx + 2.0) / (2.0 * sx),
        };
    }
    let l = (k * k).ln() / PI;
    let a = l * r.j0 - r.y0;
    Pair {
        u: c * sx * r.j0,
        du: c * (0.5 * r.j0 / sx - k * sx * r.j1),
        v: c * sx * a,
        dv: c * (0.5 * a / sx + k * sx * (r.y1 - l * r.j1)),
    }
}

/// Imaginary wavenumber iκ: u = φ₀(−κ²) = √(πx/2) I₀(κx), v = √(2x/π) K₀(κx), W(u, v) = −1.
pub(crate) fn imag_pair(kappa: f64, x: f64) -> Pair {
    let r = ik01(kappa * x);
    let sx = x.sqrt();
    let c = FRAC_PI_2.sqrt();
    let d = (2.0 / PI).sqrt();
    Pair {
        u: c * sx * r.i0,
        du: c * (0.5 * r.i0 / sx + kappa * sx * r.i1),
        v: d * sx * r.k0,
        dv: d * (0.5 * r.k0 / sx - kappa * sx * r.k1),
    }
}

/// (f₀, f₀′) for k > 0.
pub(crate) fn jost_free_unchecked(k: f64, x: f64, r: &Jy01) -> (Complex64, Complex64) {
    let pre = Complex64::from_polar((FRAC_PI_2 * k).sqrt(), FRAC_PI_4);
    let sx = x.sqrt();
    let h0 = Complex64::new(r.j0, r.y0);
    let h1 = Complex64::new(r.j1, r.y1);
    (pre * sx * h0, pre * (0.5 * h0 / sx - k * sx * h1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert_eq!(Wavenumber::new(1e-4).regime, Regime::NearZero);
        assert_eq!(Wavenumber::new(-2.0).regime, Regime::Bulk);
        assert_eq!(Wavenumber::new(100.0).regime, Regime::Asymptotic);
    }

    #[test]
    fn pairs_have_unit_wronskian() {
        for &k in &[0.0, 1e-6, 0.3, 7.0] {
            for &x in &[1e-6, 0.5, 3.0, 40.0] {
                let p = real_pair(k, x, &jy01(k * x));
                assert!((p.u * p.dv - p.du * p.v + 1.0).abs() < 1e-10, "k={k} x={x}");
            }
        }
        for &x in &[1e-3, 0.5, 3.0, 40.0] {
            let p = imag_pair(0.7, x);
            assert!((p.u * p.dv - p.du * p.v + 1.0).abs() < 1e-10, "x={x}");
        }
    }
}
