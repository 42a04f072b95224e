use crate::config::{Command, Config, CutoffKindSpec};
use crate::output::{header, hypothesis_report, table, write_csv, write_file};
use crate::Failure;
use critwave::propagator::{
    born_kernel_with, decay_sweep, gnuplot_script, kernel, kernel_slice, van_der_corput_check, write_decay_csv,
    write_slice_csv, CutoffSpec,
};
use critwave::scattering::{bound_states_with, jost_sweep_k, resonance_check_with, write_sweep_csv, Verdict};
use critwave::volterra::{jost_solution_with, regular_solution_with};
use critwave::{exec, Potential};
use std::path::PathBuf;

pub struct Context {
    pub cfg: Config,
    /// Directory of the config file, for relative input paths.
    pub base: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub quiet: bool,
}

impl Context {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    fn potential(&self) -> Result<Potential, Failure> {
        let p = self.cfg.potential.build(self.base.as_deref())?;
        let f = p.flags();
        if !self.quiet && !(f.decay && f.marchenko2) {
            for line in hypothesis_report(&p) {
                eprintln!("warning: {line}");
            }
        }
        Ok(p)
    }

    fn header(&self, p: Option<&Potential>) -> String {
        header(&self.cfg, self.seed, p)
    }

    fn csv(&self, name: &str, p: Option<&Potential>, body: &str) -> Result<(), Failure> {
        write_csv(&self.out, name, &self.header(p), body)?;
        self.say(format!("wrote {}", self.out.join(name).display()));
        Ok(())
    }

    fn script(&self, csv: &str, title: &str, cols: &[(usize, &str)], log: bool) -> Result<(), Failure> {
        let name = csv.replace(".csv", ".gp");
        write_file(&self.out, &name, &gnuplot_script(csv, title, cols, log))
    }
}

fn utf8(buf: Vec<u8>) -> String {
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn run(ctx: &Context) -> Result<(), Failure> {
    let cmd = ctx
        .cfg
        .command
        .ok_or_else(|| Failure::config("no command given (pass one on the command line or set `command`)"))?;
    match cmd {
        Command::Solve => solve(ctx),
        Command::JostSweep => jost_sweep(ctx),
        Command::Resonance => resonance(ctx),
        Command::BoundStates => bound_states(ctx),
        Command::Kernel => kernel_cmd(ctx),
        Command::Decay => decay(ctx),
        Command::BornCheck => born_check(ctx),
        Command::VdcCheck => vdc_check(ctx),
        Command::Acceptance => acceptance(ctx),
    }
}

fn solve(ctx: &Context) -> Result<(), Failure> {
    let p = ctx.potential()?;
    let ks = ctx.cfg.k.points()?;
    let grid = ctx.cfg.grid.points()?;
    let opts = ctx.cfg.solver.options();
    let rows = exec::map(&ks, |&k| -> critwave::Result<Vec<Vec<f64>>> {
        let r = regular_solution_with(&p, k, &grid, &opts)?;
        let j = jost_solution_with(&p, k, &grid, &opts)?;
        let dr = r.derivatives.as_ref();
        Ok(grid
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                vec![k, x, r.values[i], dr.map_or(f64::NAN, |d| d[i]), j.values[i].re, j.values[i].im]
            })
            .collect())
    });
    let mut all = Vec::new();
    for r in rows {
        all.extend(r?);
    }
    ctx.csv("solve.csv", Some(&p), &table(&["k", "x", "phi", "dphi", "re_f", "im_f"], all))?;
    ctx.script("solve.csv", "regular solution", &[(3, "phi")], false)
}

fn jost_sweep(ctx: &Context) -> Result<(), Failure> {
    let p = ctx.potential()?;
    let ks = ctx.cfg.k.points()?;
    let evals = jost_sweep_k(&p, &ks, &ctx.cfg.solver.options())
        .into_iter()
        .collect::<critwave::Result<Vec<_>>>()?;
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &evals)?;
    ctx.csv("jost_sweep.csv", Some(&p), &utf8(buf))?;
    ctx.script("jost_sweep.csv", "Jost function", &[(2, "Re F"), (3, "Im F"), (6, "|f|")], false)?;
    let worst = evals.iter().map(|e| e.wronskian_spread).fold(0.0, f64::max);
    ctx.say(format!("{} wavenumbers, max Wronskian spread {worst:.3e}", evals.len()));
    Ok(())
}

fn resonance(ctx: &Context) -> Result<(), Failure> {
    let p = ctx.potential()?;
    let r = resonance_check_with(&p, ctx.cfg.resonance.tol, &ctx.cfg.solver.options())?;
    let verdict = match r.verdict {
        Verdict::Resonant => "resonant",
        Verdict::NonResonant => "non-resonant",
    };
    let body = format!(
        "f2_at_0,f1_at_0,wronskian_limit,wronskian_log_limit,spread,resonant\n{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{}\n",
        r.f2_at_0,
        r.f1_at_0,
        r.wronskian_limit,
        r.wronskian_log_limit,
        r.spread,
        u8::from(r.verdict == Verdict::Resonant)
    );
    ctx.csv("resonance.csv", Some(&p), &body)?;
    ctx.say(format!("F2(0) = {:.6e}", r.f2_at_0));
    ctx.say(format!("verdict: {verdict}"));
    Ok(())
}

fn bound_states(ctx: &Context) -> Result<(), Failure> {
    let p = ctx.potential()?;
    let kappas = bound_states_with(&p, ctx.cfg.bound_states.kappa_max, &ctx.cfg.solver.options())?;
    let rows = kappas.iter().enumerate().map(|(i, &k)| vec![i as f64, k, -k * k]);
    ctx.csv("bound_states.csv", Some(&p), &table(&["index", "kappa", "energy"], rows))?;
    ctx.say(format!("{} bound state(s)", kappas.len()));
    for k in &kappas {
        ctx.say(format!("kappa = {k:.10}  E = {:.10}", -k * k));
    }
    Ok(())
}

fn kernel_cmd(ctx: &Context) -> Result<(), Failure> {
    let p = ctx.potential()?;
    let kc = &ctx.cfg.kernel;
    let chi = ctx.cfg.cutoff.spec()?;
    let rows = kernel_slice(&p, kc.t, kc.x, &kc.ys()?, chi.as_ref(), &kc.quad(&ctx.cfg.solver))?;
    let mut buf = Vec::new();
    write_slice_csv(&mut buf, &rows)?;
    ctx.csv("kernel.csv", Some(&p), &utf8(buf))?;
    ctx.script("kernel.csv", &format!("K(t = {}, x = {}, y)", kc.t, kc.x), &[(2, "Re K"), (3, "Im K")], false)?;
    let err = rows.iter().map(|r| r.quadrature_error_est).fold(0.0, f64::max);
    ctx.say(format!("{} points, max quadrature error estimate {err:.3e}", rows.len()));
    Ok(())
}

fn decay(ctx: &Context) -> Result<(), Failure> {
    let p = ctx.potential()?;
    let d = &ctx.cfg.decay;
    let chi = ctx.cfg.cutoff.spec()?;
    let r = decay_sweep(&p, &d.t_list, &d.grid()?, chi.as_ref(), &ctx.cfg.kernel.quad(&ctx.cfg.solver))?;
    let mut buf = Vec::new();
    write_decay_csv(&mut buf, &r)?;
    ctx.csv("decay.csv", Some(&p), &utf8(buf))?;
    ctx.script("decay.csv", "dispersive decay", &[(2, "sup |K|"), (3, "sup |K| sqrt t")], true)?;
    ctx.say(format!("fitted slope {:.4}", r.fitted_slope));
    ctx.say(format!("max/min of sup*sqrt(t) {:.4}", r.scaled_ratio()));
    if r.failures > 0 {
        return Err(Failure {
            code: 4,
            kind: "decay".into(),
            message: format!("{} grid points gave non-finite kernel values", r.failures),
        });
    }
    Ok(())
}

fn born_check(ctx: &Context) -> Result<(), Failure> {
    let p = ctx.potential()?;
    let b = &ctx.cfg.born;
    if ctx.cfg.cutoff.kind != CutoffKindSpec::HighPass {
        return Err(Failure::config("born-check needs cutoff.kind = \"high-pass\""));
    }
    let chi = CutoffSpec::high_pass(ctx.cfg.cutoff.k0)?;
    let quad = ctx.cfg.kernel.quad(&ctx.cfg.solver);
    let born = born_kernel_with(&p, b.t, b.x, b.y, &chi, b.order, &quad)?;
    let exact = kernel(&p, b.t, b.x, b.y, Some(&chi), &quad)?;
    let rows = born.terms.iter().enumerate().map(|(n, term)| {
        let ratio = if n == 0 { 0.0 } else { born.ratios[n - 1] };
        vec![n as f64, term.re, term.im, born.term_norms[n], ratio]
    });
    ctx.csv("born.csv", Some(&p), &table(&["order", "re_term", "im_term", "term_norm", "ratio"], rows))?;
    let diff = (born.kernel.value - exact.value).norm();
    ctx.say(format!("Born sum   {:.10e}", born.kernel.value));
    ctx.say(format!("direct     {:.10e}", exact.value));
    ctx.say(format!(
        "difference {diff:.3e} (error estimates {:.3e} + {:.3e})",
        born.kernel.quadrature_error_est, exact.quadrature_error_est
    ));
    Ok(())
}

fn vdc_samples(ctx: &Context) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let v = &ctx.cfg.vdc;
    if v.file.is_empty() {
        if !(v.width > 0.0 && v.half_range > 0.0 && v.points >= 8) {
            return Err(Failure::config("vdc needs width > 0, half_range > 0 and points ≥ 8"));
        }
        let n = v.points;
        let k: Vec<f64> = (0..n).map(|i| -v.half_range + 2.0 * v.half_range * i as f64 / (n - 1) as f64).collect();
        let a = k.iter().map(|k| (-(k / v.width).powi(2)).exp()).collect();
        return Ok((k, a));
    }
    let path = PathBuf::from(&v.file);
    let path = match &ctx.base {
        Some(b) if path.is_relative() => b.join(path),
        _ => path,
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    let (mut k, mut a) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(|c| c.trim().parse::<f64>());
        match (cols.next(), cols.next()) {
            (Some(Ok(x)), Some(Ok(y))) => {
                k.push(x);
                a.push(y);
            }
            _ if k.is_empty() => continue,
            _ => return Err(Failure::config(format!("{}: line {} is not two numbers", path.display(), i + 1))),
        }
    }
    Ok((k, a))
}

fn vdc_check(ctx: &Context) -> Result<(), Failure> {
    let (k, a) = vdc_samples(ctx)?;
    let r = van_der_corput_check(&k, &a, &ctx.cfg.vdc.t_list)?;
    let rows = (0..r.t_list.len()).map(|i| {
        vec![r.t_list[i], r.integrals[i].re, r.integrals[i].im, r.scaled[i], r.bound, r.margins[i]]
    });
    ctx.csv("vdc.csv", None, &table(&["t", "re_I", "im_I", "scaled", "bound", "margin"], rows))?;
    ctx.script("vdc.csv", "van der Corput", &[(4, "|I| sqrt t"), (5, "bound")], true)?;
    ctx.say(format!("Wiener norm {:.6e}, bound {:.6e}", r.wiener_norm, r.bound));
    ctx.say(format!("bound holds: {}", r.holds));
    Ok(())
}

fn acceptance(ctx: &Context) -> Result<(), Failure> {
    let outcomes = critwave::acceptance::run_all(&ctx.cfg.acceptance.criteria, |o| ctx.say(o.line()));
    let rows = outcomes
        .iter()
        .map(|o| vec![o.id as f64, f64::from(u8::from(o.passed)), o.elapsed.as_secs_f64()]);
    ctx.csv("acceptance.csv", None, &table(&["id", "passed", "seconds"], rows))?;
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    ctx.say(format!("acceptance: {} passed, {} failed", outcomes.len() - failed.len(), failed.len()));
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure { code: 1, kind: "acceptance".into(), message: format!("failed criteria: {failed:?}") })
    }
}
