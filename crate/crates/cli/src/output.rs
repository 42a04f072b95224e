//! CSV artifacts with a `#` header block, and the accompanying gnuplot scripts.

use crate::config::Config;
use crate::Failure;
use critwave::Potential;
use std::fmt::Write as _;
use std::path::Path;

/// Header lines: tool version, seed, effective config and the hypothesis report.
pub fn header(cfg: &Config, seed: u64, p: Option<&Potential>) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "# critwave {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(h, "# seed = {seed}");
    for line in cfg.to_toml().lines().filter(|l| !l.trim().is_empty()) {
        let _ = writeln!(h, "# {line}");
    }
    if let Some(p) = p {
        for line in hypothesis_report(p) {
            let _ = writeln!(h, "# {line}");
        }
    }
    h
}

/// Moments with convergence flags, then the hypothesis flags.
pub fn hypothesis_report(p: &Potential) -> Vec<String> {
    let m = p.moments();
    let f = p.flags();
    let moment = |name: &str, v: critwave::potential::Moment| {
        format!(
            "moment.{name} = {:.6e} ({})",
            v.value,
            if v.converged { "converged" } else { "divergent" }
        )
    };
    vec![
        moment("near_abs", m.near_abs),
        moment("near_xlog", m.near_xlog),
        moment("far_x", m.far_x),
        moment("far_xlog", m.far_xlog),
        moment("far_xlog2", m.far_xlog2),
        moment("l1", m.l1),
        format!("flag.decay = {}", f.decay),
        format!("flag.regular = {}", f.regular),
        format!("flag.marchenko = {}", f.marchenko),
        format!("flag.marchenko2 = {}", f.marchenko2),
    ]
}

/// Rejects bodies containing non-finite numbers, then writes header + body.
pub fn write_csv(dir: &Path, name: &str, header: &str, body: &str) -> Result<(), Failure> {
    if let Some(bad) = body
        .split([',', '\n'])
        .find(|tok| matches!(tok.trim().to_ascii_lowercase().as_str(), "nan" | "inf" | "-inf"))
    {
        return Err(Failure {
            code: 4,
            kind: "non_finite".into(),
            message: format!("{name}: refusing to write non-finite value {bad:?}"),
        });
    }
    write_file(dir, name, &format!("{header}{body}"))
}

pub fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure { code: 4, kind: "io".into(), message: format!("{}: {e}", dir.display()) };
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join(name), text).map_err(io)
}

/// Rows of numbers in `{:.12e}` format.
pub fn table(columns: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = columns.join(",");
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:.12e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}
