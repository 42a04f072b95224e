//! Perturbations q(x) with their integrability metadata.

use crate::error::{Error, Result};
use crate::quad::integrate;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Named family and parameters, kept for reporting.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Zero,
    /// A·e^{−βx}
    Exponential { amplitude: f64, beta: f64 },
    /// A on [a, b], mollified over ±eps around each edge (eps = 0 is a sharp step).
    Bump { amplitude: f64, a: f64, b: f64, eps: f64 },
    /// Monotone cubic interpolant of (x, q) samples, zero outside the table.
    Tabulated { points: usize, x_min: f64, x_max: f64 },
    /// Library-supplied closure.
    Custom { name: String },
    /// c·q for another potential.
    Scaled { factor: f64, inner: Box<Family> },
}

impl Family {
    /// Flat key/value description.
    pub fn describe(&self) -> Vec<(String, String)> {
        let kv = |k: &str, v: f64| (k.to_string(), format!("{v}"));
        match self {
            Family::Zero => vec![("family".into(), "zero".into())],
            Family::Exponential { amplitude, beta } => vec![
                ("family".into(), "exponential".into()),
                kv("amplitude", *amplitude),
                kv("beta", *beta),
            ],
            Family::Bump { amplitude, a, b, eps } => vec![
                ("family".into(), "bump".into()),
                kv("amplitude", *amplitude),
                kv("a", *a),
                kv("b", *b),
                kv("eps", *eps),
            ],
            Family::Tabulated { points, x_min, x_max } => vec![
                ("family".into(), "tabulated".into()),
                ("points".into(), points.to_string()),
                kv("x_min", *x_min),
                kv("x_max", *x_max),
            ],
            Family::Custom { name } => vec![
                ("family".into(), "custom".into()),
                ("name".into(), name.clone()),
            ],
            Family::Scaled { factor, inner } => {
                let mut v = inner.describe();
                v.push(kv("scale", *factor));
                v
            }
        }
    }
}

/// A moment integral with a convergence flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: f64,
    pub converged: bool,
}

/// Integrability metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// ∫₀¹ |q|
    pub near_abs: Moment,
    /// ∫₀¹ x(1 − log x)|q|
    pub near_xlog: Moment,
    /// ∫₁^∞ x|q|
    pub far_x: Moment,
    /// ∫₁^∞ x log(1+x)|q|
    pub far_xlog: Moment,
    /// ∫₁^∞ x log²(1+x)|q|
    pub far_xlog2: Moment,
    /// ∫₀^∞ |q|
    pub l1: Moment,
}

/// Which of the paper's integrability hypotheses hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypothesisFlags {
    /// ∫₀¹|q| < ∞ and ∫₁^∞ x log²(1+x)|q| < ∞ (dispersive decay theorem).
    pub decay: bool,
    /// ∫₀¹ x(1 − log x)|q| < ∞ (regular solution exists).
    pub regular: bool,
    /// regular and ∫₁^∞ x log(1+x)|q| < ∞ (Jost solution).
    pub marchenko: bool,
    /// regular and ∫₁^∞ x log²(1+x)|q| < ∞ (F₁/F₂ split, zero-energy solutions).
    pub marchenko2: bool,
}

#[derive(Clone)]
pub struct Potential {
    family: Family,
    eval: Eval,
    support: (f64, Option<f64>),
    breakpoints: Vec<f64>,
    zones: Vec<(f64, f64, f64)>,
    feature_scale: f64,
    moments: Moments,
    flags: HypothesisFlags,
    zero: bool,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("family", &self.family)
            .field("support", &self.support)
            .field("flags", &self.flags)
            .finish()
    }
}

/// C∞ step: 0 for s ≤ 0, 1 for s ≥ 1, built from e^{−1/s}.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    a / (a + b)
}

impl Potential {
    fn build(
        family: Family,
        eval: Eval,
        support: (f64, Option<f64>),
        mut breakpoints: Vec<f64>,
        zones: Vec<(f64, f64, f64)>,
        feature_scale: f64,
        zero: bool,
    ) -> Self {
        breakpoints.retain(|b| *b > 0.0 && b.is_finite());
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let mut p = Potential {
            family,
            eval,
            support,
            breakpoints,
            zones,
            feature_scale,
            moments: Moments {
                near_abs: Moment { value: 0.0, converged: true },
                near_xlog: Moment { value: 0.0, converged: true },
                far_x: Moment { value: 0.0, converged: true },
                far_xlog: Moment { value: 0.0, converged: true },
                far_xlog2: Moment { value: 0.0, converged: true },
                l1: Moment { value: 0.0, converged: true },
            },
            flags: HypothesisFlags {
                decay: true,
                regular: true,
                marchenko: true,
                marchenko2: true,
            },
            zero,
        };
        if !zero {
            p.compute_moments();
        }
        p
    }

    pub fn zero() -> Self {
        Self::build(Family::Zero, Arc::new(|_| 0.0), (0.0, Some(0.0)), vec![], vec![], f64::INFINITY, true)
    }

    /// A·e^{−βx}, β > 0.
    pub fn exponential(amplitude: f64, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite() && amplitude.is_finite()) {
            return Err(Error::Parameter(format!("exponential needs beta > 0, got {beta}")));
        }
        if amplitude == 0.0 {
            return Ok(Self::zero());
        }
        Ok(Self::build(
            Family::Exponential { amplitude, beta },
            Arc::new(move |x| amplitude * (-beta * x).exp()),
            (0.0, None),
            vec![],
            vec![],
            0.5 / beta,
            false,
        ))
    }

    /// A on [a, b] with C∞ edges of half-width eps (eps = 0: sharp indicator).
    pub fn bump(amplitude: f64, a: f64, b: f64, eps: f64) -> Result<Self> {
        if !(a >= 0.0 && b > a && eps >= 0.0 && a - eps >= 0.0 && 2.0 * eps <= b - a) {
            return Err(Error::Parameter(format!(
                "bump needs 0 ≤ a − eps, a < b, 2·eps ≤ b − a (got a={a}, b={b}, eps={eps})"
            )));
        }
        if amplitude == 0.0 {
            return Ok(Self::zero());
        }
        let eval: Eval = if eps == 0.0 {
            Arc::new(move |x| if x >= a && x <= b { amplitude } else { 0.0 })
        } else {
            Arc::new(move |x| {
                let up = smooth_step((x - (a - eps)) / (2.0 * eps));
                let down = smooth_step(((b + eps) - x) / (2.0 * eps));
                amplitude * up * down
            })
        };
        let (bps, zones) = if eps == 0.0 {
            (vec![a, b], vec![])
        } else {
            (
                vec![a - eps, a + eps, b - eps, b + eps],
                vec![(a - eps, a + eps, eps / 8.0), (b - eps, b + eps, eps / 8.0)],
            )
        };
        Ok(Self::build(
            Family::Bump { amplitude, a, b, eps },
            eval,
            (a - eps, Some(b + eps)),
            bps,
            zones,
            ((b - a) / 4.0).min(0.5),
            false,
        ))
    }

    /// Monotone (Fritsch–Carlson) cubic interpolant of the samples, zero outside.
    pub fn tabulated(xs: Vec<f64>, qs: Vec<f64>) -> Result<Self> {
        if xs.len() != qs.len() || xs.len() < 2 {
            return Err(Error::Parameter("tabulated potential needs ≥ 2 matching samples".into()));
        }
        if xs[0] < 0.0 || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("tabulated x must be non-negative and strictly increasing".into()));
        }
        if qs.iter().any(|q| !q.is_finite()) {
            return Err(Error::Parameter("tabulated q must be finite".into()));
        }
        let slopes = fritsch_carlson(&xs, &qs);
        let min_gap = xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let family = Family::Tabulated {
            points: xs.len(),
            x_min: xs[0],
            x_max: *xs.last().unwrap(),
        };
        let support = (xs[0], Some(*xs.last().unwrap()));
        let bps = xs.clone();
        let eval: Eval = Arc::new(move |x| hermite_eval(&xs, &qs, &slopes, x));
        Ok(Self::build(family, eval, support, bps, vec![], min_gap.min(0.5), false))
    }

    /// Two-column CSV (x, q); lines starting with '#' and a non-numeric header are skipped.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut xs = Vec::new();
        let mut qs = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
            if rec.len() < 2 {
                return Err(Error::Parameter(format!("line {}: expected two columns", i + 1)));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(x), Ok(q)) => {
                    xs.push(x);
                    qs.push(q);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::Parameter(format!("line {}: not numeric", i + 1))),
            }
        }
        Self::tabulated(xs, qs)
    }

    /// Arbitrary closure. `support_end` is where q vanishes identically (if it does),
    /// `breakpoints` are non-smooth points, `feature_scale` bounds the mesh width.
    pub fn custom(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: (f64, Option<f64>),
        breakpoints: Vec<f64>,
        feature_scale: f64,
    ) -> Self {
        Self::build(
            Family::Custom { name: name.to_string() },
            Arc::new(f),
            support,
            breakpoints,
            vec![],
            feature_scale,
            false,
        )
    }

    /// c·q.
    pub fn scaled(&self, factor: f64) -> Self {
        if self.zero || factor == 0.0 {
            return Self::zero();
        }
        let inner = self.eval.clone();
        Self::build(
            Family::Scaled { factor, inner: Box::new(self.family.clone()) },
            Arc::new(move |x| factor * inner(x)),
            self.support,
            self.breakpoints.clone(),
            self.zones.clone(),
            self.feature_scale,
            false,
        )
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if self.zero {
            0.0
        } else {
            (self.eval)(x)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn support(&self) -> (f64, Option<f64>) {
        self.support
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// (lo, hi, max cell width) zones needing extra resolution.
    pub fn zones(&self) -> &[(f64, f64, f64)] {
        &self.zones
    }

    pub fn feature_scale(&self) -> f64 {
        self.feature_scale
    }

    pub fn moments(&self) -> &Moments {
        &self.moments
    }

    pub fn flags(&self) -> HypothesisFlags {
        self.flags
    }

    /// ∫ₐᵇ w(x)|q(x)| dx honouring breakpoints.
    pub fn weighted_integral(&self, w: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        if self.zero || b <= a {
            return 0.0;
        }
        let (lo, hi) = (a.max(self.support.0), self.support.1.map_or(b, |s| b.min(s)));
        if hi <= lo {
            return 0.0;
        }
        let mut cuts = vec![lo];
        cuts.extend(self.breakpoints.iter().copied().filter(|&p| p > lo && p < hi));
        cuts.push(hi);
        let f = |x: f64| w(x) * self.eval(x).abs();
        cuts.windows(2)
            .map(|c| integrate(&f, c[0], c[1], 1e-16, 1e-12).0)
            .sum()
    }

    /// σⱼ(x) = ∫₀ˣ sʲ|q(s)| ds.
    pub fn sigma(&self, j: i32, x: f64) -> f64 {
        self.weighted_integral(&|s: f64| s.powi(j), 0.0, x)
    }

    /// σ̃ⱼ(x) = ∫ₓ^∞ sʲ|q(s)| ds.
    pub fn sigma_tilde(&self, j: i32, x: f64) -> f64 {
        let w = |s: f64| s.powi(j);
        match self.support.1 {
            Some(end) => self.weighted_integral(&w, x, end),
            None => self.far_moment(&w, x).value,
        }
    }

    /// ∫ₓ^∞ w|q| over doubly-exponential shells in log x, flagged divergent if
    /// shell contributions stop decaying.
    fn far_moment(&self, w: &dyn Fn(f64) -> f64, start: f64) -> Moment {
        if let Some(end) = self.support.1 {
            return Moment { value: self.weighted_integral(w, start, end), converged: true };
        }
        let s0 = start.max(1e-300).ln();
        let f = |s: f64| {
            let x = s.exp();
            if !x.is_finite() {
                return 0.0;
            }
            w(x) * self.eval(x).abs() * x
        };
        let mut total = 0.0;
        let mut prev = f64::INFINITY;
        let mut last = 0.0;
        let mut ratio = 0.0;
        let mut lo = s0;
        for j in 0..10 {
            let hi = if j == 0 { s0.max(0.0) + 1.0 } else { lo + (lo.abs().max(1.0)) };
            let hi = hi.min(700.0);
            let v = integrate(&f, lo, hi, 1e-300, 1e-12).0;
            total += v;
            if prev.is_finite() && prev > 0.0 {
                ratio = v / prev;
            }
            prev = v;
            last = v;
            lo = hi;
            if hi >= 700.0 || (v <= 1e-16 * total && j > 1) {
                break;
            }
        }
        let converged = total.is_finite() && (last <= 1e-12 * total.max(1e-300) || ratio < 0.75);
        Moment { value: total, converged }
    }

    /// ∫₀¹ w|q| with shells toward 0 in −log x.
    fn near_moment(&self, w: &dyn Fn(f64) -> f64) -> Moment {
        let f = |s: f64| {
            let x = (-s).exp();
            w(x) * self.eval(x).abs() * x
        };
        let mut total = 0.0;
        let mut prev = f64::INFINITY;
        let mut ratio = 0.0;
        let mut last = 0.0;
        let mut lo = 0.0f64;
        // below the support start the integrand vanishes
        let s_stop = if self.support.0 > 0.0 { -self.support.0.ln() } else { 700.0 };
        for j in 0..10 {
            let hi = if j == 0 { 1.0 } else { 2.0 * lo }.min(700.0).min(s_stop.max(1.0));
            if hi <= lo {
                break;
            }
            let v = integrate(&f, lo, hi, 1e-300, 1e-12).0;
            total += v;
            if prev.is_finite() && prev > 0.0 {
                ratio = v / prev;
            }
            prev = v;
            last = v;
            lo = hi;
            if hi >= 700.0 || hi >= s_stop || (v <= 1e-16 * total && j > 1) {
                break;
            }
        }
        let converged = total.is_finite() && (last <= 1e-12 * total.max(1e-300) || ratio < 0.75);
        Moment { value: total, converged }
    }

    fn compute_moments(&mut self) {
        // the part of [0, 1] above the near shells is handled with breakpoints
        let near = |w: &dyn Fn(f64) -> f64| -> Moment {
            let has_bp = self.breakpoints.iter().any(|&b| b < 1.0);
            if has_bp || self.support.0 > 0.0 {
                Moment { value: self.weighted_integral(w, 0.0, 1.0), converged: true }
            } else {
                self.near_moment(w)
            }
        };
        let near_abs = near(&|_| 1.0);
        let near_xlog = near(&|x: f64| x * (1.0 - x.ln()));
        let far = |w: &dyn Fn(f64) -> f64| -> Moment {
            match self.support.1 {
                Some(e) if e <= 1.0 => Moment { value: 0.0, converged: true },
                Some(e) => Moment { value: self.weighted_integral(w, 1.0, e), converged: true },
                None => {
                    let has_bp = self.breakpoints.iter().any(|&b| b > 1.0);
                    if has_bp {
                        let last = self.breakpoints.last().copied().unwrap();
                        let a = self.weighted_integral(w, 1.0, last);
                        let b = self.far_moment(w, last);
                        Moment { value: a + b.value, converged: b.converged }
                    } else {
                        self.far_moment(w, 1.0)
                    }
                }
            }
        };
        let far_x = far(&|x| x);
        let far_xlog = far(&|x: f64| x * (1.0 + x).ln());
        let far_xlog2 = far(&|x: f64| x * (1.0 + x).ln().powi(2));
        let far_1 = far(&|_| 1.0);
        let l1 = Moment {
            value: near_abs.value + far_1.value,
            converged: near_abs.converged && far_1.converged,
        };
        self.moments = Moments { near_abs, near_xlog, far_x, far_xlog, far_xlog2, l1 };
        let regular = near_xlog.converged;
        self.flags = HypothesisFlags {
            decay: near_abs.converged && far_xlog2.converged,
            regular,
            marchenko: regular && far_xlog.converged,
            marchenko2: regular && far_xlog2.converged,
        };
    }

    /// Smallest X with σ̃₁(X)·log²(1+X) < tol/10 (X = support end for compact support).
    pub fn truncation_point(&self, tol: f64) -> Result<f64> {
        if self.zero {
            return Ok(0.0);
        }
        if let Some(end) = self.support.1 {
            return Ok(end);
        }
        let target = tol / 10.0;
        let g = |x: f64| self.sigma_tilde(1, x) * (1.0 + x).ln().powi(2);
        let mut hi = self.breakpoints.last().copied().unwrap_or(1.0).max(1.0);
        while g(hi) >= target {
            hi *= 2.0;
            if hi > 1e8 {
                return Err(Error::Truncation(format!(
                    "tail moment still {:.3e} at x = {hi:.3e}; requested tolerance {tol:.1e}",
                    g(hi)
                )));
            }
        }
        let mut lo = hi / 2.0;
        if g(lo) < target {
            return Ok(lo);
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < target {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-3 * hi {
                break;
            }
        }
        Ok(hi)
    }
}

fn fritsch_carlson(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        m[i] = if d[i - 1] * d[i] <= 0.0 { 0.0 } else { 0.5 * (d[i - 1] + d[i]) };
    }
    for i in 0..n - 1 {
        if d[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / d[i];
        let b = m[i + 1] / d[i];
        let s = a * a + b * b;
        if s > 9.0 {
            let t = 3.0 / s.sqrt();
            m[i] = t * a * d[i];
            m[i + 1] = t * b * d[i];
        }
    }
    m
}

fn hermite_eval(x: &[f64], y: &[f64], m: &[f64], t: f64) -> f64 {
    let n = x.len();
    if t < x[0] || t > x[n - 1] {
        return 0.0;
    }
    let i = match x.binary_search_by(|v| v.total_cmp(&t)) {
        Ok(i) => return y[i],
        Err(i) => i - 1,
    };
    let h = x[i + 1] - x[i];
    let s = (t - x[i]) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y[i]
        + (s3 - 2.0 * s2 + s) * h * m[i]
        + (-2.0 * s3 + 3.0 * s2) * y[i + 1]
        + (s3 - s2) * h * m[i + 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_step_plateaus() {
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monotone_interpolant_preserves_monotonicity() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let qs = vec![0.0, 0.0, 1.0, 1.0, 5.0];
        let p = Potential::tabulated(xs, qs).unwrap();
        let mut prev = -1.0;
        for i in 0..=400 {
            let v = p.eval(i as f64 * 0.01);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }
}
