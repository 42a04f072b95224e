use crate::error::{Error, Result};
use crate::quad::CellRule;
use std::sync::OnceLock;

/// Nodes per cell.
pub(crate) const ORDER: usize = 8;

pub(crate) fn rule() -> &'static CellRule {
    static RULE: OnceLock<CellRule> = OnceLock::new();
    RULE.get_or_init(|| CellRule::new(ORDER))
}

/// Cell partition of [ends[0], ends[last]] with Gauss nodes in every cell.
#[derive(Debug, Clone)]
pub(crate) struct Mesh {
    pub ends: Vec<f64>,
    pub nodes: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct MeshSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub per_decade: f64,
    pub max_width: f64,
    /// Mandatory cell boundaries.
    pub breakpoints: Vec<f64>,
    /// (lo, hi, width) refinement zones.
    pub zones: Vec<(f64, f64, f64)>,
}

impl Mesh {
    pub fn build(spec: &MeshSpec) -> Result<Mesh> {
        let (a, b) = (spec.x_min, spec.x_max);
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(Error::Grid(format!("invalid mesh interval [{a}, {b}]")));
        }
        let ratio = 10f64.powf(1.0 / spec.per_decade) - 1.0;
        let mut bps: Vec<f64> = spec
            .breakpoints
            .iter()
            .copied()
            .filter(|&p| p > a && p < b)
            .collect();
        bps.push(b);
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let width = |x: f64| {
            let mut w = (x * ratio).min(spec.max_width);
            for &(lo, hi, zw) in &spec.zones {
                if x >= lo - zw && x < hi {
                    w = w.min(zw);
                }
            }
            w
        };
        let mut ends = vec![a];
        let mut x = a;
        for &target in &bps {
            while x < target {
                let w = width(x);
                let next = if x + 1.25 * w >= target { target } else { x + w };
                ends.push(next);
                x = next;
                if ends.len() > 5_000_000 {
                    return Err(Error::Grid("mesh exceeds 5e6 cells".into()));
                }
            }
        }
        let r = rule();
        let mut nodes = Vec::with_capacity((ends.len() - 1) * ORDER);
        for c in ends.windows(2) {
            let (m, h) = (0.5 * (c[0] + c[1]), 0.5 * (c[1] - c[0]));
            nodes.extend(r.nodes.iter().map(|s| m + h * s));
        }
        Ok(Mesh { ends, nodes })
    }

    pub fn cells(&self) -> usize {
        self.ends.len() - 1
    }

    pub fn half_width(&self, c: usize) -> f64 {
        0.5 * (self.ends[c + 1] - self.ends[c])
    }

    /// Index of the cell end equal to x (x must be a breakpoint).
    pub fn end_index(&self, x: f64) -> Option<usize> {
        self.ends.binary_search_by(|e| e.total_cmp(&x)).ok()
    }
}
