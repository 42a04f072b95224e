use crate::error::{Error, Result};
use crate::potential::smooth_step;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffKind {
    /// 1 for |k| ≤ k0/2, 0 for |k| ≥ k0.
    LowPass,
    /// 0 for |k| ≤ 2k0, 1 for |k| ≥ 3k0.
    HighPass,
}

/// Smooth energy cutoff χ(k²) built from the e^{−1/s} step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub k0: f64,
    pub kind: CutoffKind,
}

impl CutoffSpec {
    pub fn low_pass(k0: f64) -> Result<Self> {
        make_cutoff(k0, CutoffKind::LowPass)
    }

    pub fn high_pass(k0: f64) -> Result<Self> {
        make_cutoff(k0, CutoffKind::HighPass)
    }

    /// χ as a function of |k|.
    pub fn eval_k(&self, k: f64) -> f64 {
        let a = k.abs();
        match self.kind {
            CutoffKind::LowPass => 1.0 - smooth_step((a - 0.5 * self.k0) / (0.5 * self.k0)),
            CutoffKind::HighPass => smooth_step((a - 2.0 * self.k0) / self.k0),
        }
    }

    /// χ as a function of the energy k².
    pub fn eval(&self, k2: f64) -> f64 {
        self.eval_k(k2.max(0.0).sqrt())
    }

    /// Transition band edges in the energy variable.
    pub fn band(&self) -> (f64, f64) {
        let k0 = self.k0;
        match self.kind {
            CutoffKind::LowPass => (0.25 * k0 * k0, k0 * k0),
            CutoffKind::HighPass => (4.0 * k0 * k0, 9.0 * k0 * k0),
        }
    }
}

pub fn make_cutoff(k0: f64, kind: CutoffKind) -> Result<CutoffSpec> {
    if !(k0 > 0.0 && k0.is_finite()) {
        return Err(Error::Parameter(format!("cutoff k0 must be positive, got {k0}")));
    }
    Ok(CutoffSpec { k0, kind })
}
