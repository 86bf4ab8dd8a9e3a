//! The six pipelines. Each scale runs in its own directory under
//! `<out>/<command>/`, and the command directory gets a manifest listing them.

use std::f64::consts::TAU;
use std::path::PathBuf;

use rayon::prelude::*;
use revivalkit::direct_spectrum::{
    discretize, resolution_bound, spectrum_between, window_spectrum, Parity, Stencil, WindowOptions,
};
use revivalkit::dynamics::{
    detect_peaks, level_return, partial_autocorrelation, revival_grid, uniform_grid, Approximants, ClosedForm,
    PhaseData, TimeLimits,
};
use revivalkit::fit::{fit_line, median, LineFit};
use revivalkit::gauss::{coefficients, modulus_law};
use revivalkit::model_spectrum::{Family, ModelOptions, SpectralModel, SpectrumWindow};
use revivalkit::potential::{canonical_double_well, flow_period, FlowOptions, Potential};
use revivalkit::wavepacket::{select_centers, split_sets, CoefficientSequence, Packet, PacketSpec};
use revivalkit::Error;
use serde_json::{json, Value};

use crate::config::{Regime, RunConfig, Scale, Settings};
use crate::error::{io, CliError};
use crate::output::{num, relative, RunDir};

/// Box half-width for the direct backend; `V(1.6) ~ 4` clears every window.
const DIRECT_HALF_WIDTH: f64 = 1.6;

fn core(context: &str) -> impl Fn(Error) -> CliError + '_ {
    move |e| CliError::from_core(e, context)
}

fn settings_json(s: &Settings) -> Value {
    json!({
        "config": s.config,
        "potential": "x^4 - x^2",
        "E": s.energy,
        "gamma": s.gamma,
        "gamma_prime": s.gamma_prime,
        "alpha": s.alpha,
        "beta": s.beta,
        "chi": s.profile.name(),
        "backend": s.backend,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn fit_json(fit: Option<LineFit>) -> Value {
    match fit {
        Some(f) => json!({
            "slope": f.slope,
            "intercept": f.intercept,
            "max_residual": f.max_residual,
            "rms_residual": f.rms_residual,
        }),
        None => Value::Null,
    }
}

/// Runs `f` on every scale with at most `jobs` workers, then writes the
/// command-level manifest.
fn for_each_scale(
    s: &Settings,
    command: &str,
    f: impl Fn(&Settings, Scale, PathBuf) -> Result<String, CliError> + Sync,
) -> Result<(), CliError> {
    let base = s.out.join(command);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(s.jobs)
        .build()
        .map_err(|e| io("thread pool", e))?;
    let results: Vec<Result<String, CliError>> = pool.install(|| {
        s.scales
            .par_iter()
            .map(|&scale| f(s, scale, base.join(scale.label())))
            .collect()
    });
    let mut runs = Vec::new();
    for (scale, r) in s.scales.iter().zip(results) {
        let summary = r?;
        println!("{command} {}: {summary}", scale.label());
        runs.push(json!({ "h": scale.h, "log_h": scale.log_h, "dir": scale.label() }));
    }
    let mut dir = RunDir::create(base.clone())?;
    dir.record("command", command);
    dir.record("settings", settings_json(s));
    dir.record("runs", runs);
    let path = dir.finish()?;
    println!("wrote {}", path.display());
    Ok(())
}

fn model_at(v: &Potential, scale: Scale, opts: ModelOptions) -> Result<SpectralModel, Error> {
    match scale.h {
        Some(h) => SpectralModel::new(v, h, opts),
        None => SpectralModel::from_log_h(v, scale.log_h, opts),
    }
}

/// The model, its window and the alpha packet at one scale.
struct PacketRun {
    spec: PacketSpec,
    bound: f64,
    window: SpectrumWindow,
    packet: Packet,
    seq: CoefficientSequence,
    phase: PhaseData,
    limits: TimeLimits,
}

impl PacketRun {
    fn new(s: &Settings, scale: Scale) -> Result<Self, CliError> {
        let label = scale.label();
        let err = core(&label);
        let spec = scale.spec(s)?;
        let v = canonical_double_well();
        // one family's levels are about 2 pi omega / |ln h| apart in lambda
        let gap = TAU * v.omega() / scale.log_h;
        let bound = (spec.energy.abs() + 1.2 * gap * spec.radius() as f64 + 1.0).max(1.0);
        let opts = ModelOptions {
            lambda_bound: bound,
            ..ModelOptions::default()
        };
        if let Some(h) = scale.h {
            if bound * h > opts.delta {
                return Err(CliError::Config(format!(
                    "{label}: the packet reaches |lambda| = {bound:.3}, beyond delta / h = {:.3}; \
                     use a smaller h or a larger gamma'",
                    opts.delta / h
                )));
            }
        }
        let model = model_at(&v, scale, opts).map_err(&err)?;
        let window = model.solve_families().map_err(&err)?;
        let packet = Packet::from_window(&spec, &window, 1.0).map_err(&err)?;
        let seq = packet.alpha.clone().ok_or_else(|| CliError::Numeric(format!("{label}: empty packet")))?;
        let phase = PhaseData::from_model(&model, &window, Family::Alpha, seq.center).map_err(&err)?;
        let limits = s.limits(&spec)?;
        Ok(Self {
            spec,
            bound,
            window,
            packet,
            seq,
            phase,
            limits,
        })
    }

    fn approximants(&self) -> Approximants {
        Approximants::new(&self.spec, &self.seq, self.phase, Some(self.limits))
    }

    /// Even-parity levels of the finite-difference operator over the same
    /// rescaled range, the class matching the alpha family.
    fn direct_levels(&self, scale: Scale) -> Result<Vec<f64>, CliError> {
        let label = scale.label();
        let h = scale.h.ok_or_else(|| CliError::Config(format!("{label}: the direct backend needs h")))?;
        let v = canonical_double_well();
        let top = self.bound * h;
        let vmin = v.grid_minimum(20_001);
        let dx = resolution_bound(&v, h) * ((h - vmin) / (top - vmin)).sqrt();
        let op = discretize(&v, h, DIRECT_HALF_WIDTH, dx, Stencil::Fourth).map_err(core(&label))?;
        let ws = spectrum_between(&op, -top, top, true, WindowOptions { samples: 0 }).map_err(core(&label))?;
        Ok(ws.parity_class(Parity::Even).iter().map(|e| e / h).collect())
    }

    fn phase_json(&self) -> Value {
        let p = &self.phase;
        json!({
            "A0": p.a0,
            "A1": p.a1,
            "A2": p.a2,
            "A3_bound": p.a3_bound,
            "center": p.center,
            "T_hyp": p.t_hyp(),
            "T_rev": p.t_rev(),
            "N_h": p.n_h(),
            "theta_hat": p.theta_hat(),
            "curvature": p.curvature,
            "T_rev_over_log_h_cubed": p.t_rev() / self.spec.log_h().powi(3),
        })
    }
}

fn peaks_json(times: &[f64], values: &[f64], threshold: f64, t_hyp: f64) -> Value {
    match detect_peaks(times, values, threshold) {
        Ok(p) => json!({
            "count": p.times.len(),
            "first": p.times.first(),
            "period": p.period,
            "period_over_t_hyp": p.period.map(|x| x / t_hyp.abs()),
        }),
        Err(_) => Value::Null,
    }
}

fn sup_norm(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

pub fn spectrum(s: &Settings) -> Result<(), CliError> {
    for_each_scale(s, "spectrum", |s, scale, path| {
        let label = scale.label();
        let mut dir = RunDir::create(path)?;
        dir.record("scale", json!(scale));
        let v = canonical_double_well();
        let mut summary = Vec::new();
        if s.backend.wants_model() {
            let model = model_at(&v, scale, ModelOptions::default()).map_err(core(&label))?;
            let window = model.solve_families().map_err(core(&label))?.restricted(1.0);
            let rows = [Family::Alpha, Family::Beta].iter().flat_map(|&f| {
                window
                    .family(f)
                    .iter()
                    .map(move |l| vec![f.label().to_string(), l.index.to_string(), num(l.lambda), num(l.eigenvalue)])
            });
            dir.write_csv("spectrum_model.csv", &["family", "index", "lambda", "eigenvalue"], rows.collect::<Vec<_>>())?;
            let scaled: Vec<f64> = [Family::Alpha, Family::Beta]
                .iter()
                .flat_map(|&f| window.gaps(f))
                .map(|g| g * scale.log_h)
                .collect();
            dir.record(
                "model",
                json!({
                    "alpha_count": window.alphas.len(),
                    "beta_count": window.betas.len(),
                    "interleaving_violations": window.interleaving_violations(),
                    "median_gap_times_log_h": median(&scaled),
                    "min_gap_times_log_h": scaled.iter().copied().reduce(f64::min),
                    "max_gap_times_log_h": scaled.iter().copied().reduce(f64::max),
                }),
            );
            dir.plot("model levels", "spectrum_model.csv", 2, &[(3, "lambda")], None);
            summary.push(format!("model {} levels", window.count()));
        }
        if s.backend.wants_direct() {
            let h = scale.h.ok_or_else(|| CliError::Config(format!("{label}: the direct backend needs h")))?;
            let op = discretize(&v, h, DIRECT_HALF_WIDTH, resolution_bound(&v, h), Stencil::Fourth)
                .map_err(core(&label))?;
            let ws = window_spectrum(&op, true, WindowOptions { samples: 0 }).map_err(core(&label))?;
            let rows: Vec<Vec<String>> = ws
                .eigenvalues
                .iter()
                .zip(&ws.indices)
                .zip(&ws.parities)
                .map(|((e, i), p)| vec![i.to_string(), num(*e), num(e / h), format!("{p:?}").to_lowercase()])
                .collect();
            dir.write_csv("spectrum_direct.csv", &["position", "eigenvalue", "lambda", "parity"], rows)?;
            let gaps = ws.gaps();
            dir.record(
                "direct",
                json!({
                    "count": ws.count(),
                    "dx": op.dx,
                    "half_width": op.half_width,
                    "stencil": op.stencil,
                    "parities_alternate": ws.parities_alternate(),
                    "mean_gap_over_h": (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64 / h),
                }),
            );
            dir.plot("direct levels", "spectrum_direct.csv", 1, &[(3, "lambda")], None);
            summary.push(format!("direct {} levels", ws.count()));
        }
        let path = dir.finish()?;
        Ok(format!("{} -> {}", summary.join(", "), relative(&s.out, &path)))
    })
}

pub fn packet(s: &Settings) -> Result<(), CliError> {
    for_each_scale(s, "packet", |s, scale, path| {
        let run = PacketRun::new(s, scale)?;
        let split = split_sets(&run.spec, &run.seq);
        let rows: Vec<Vec<String>> = run
            .seq
            .indices()
            .zip(&run.seq.values)
            .map(|(n, a)| {
                let m = n - run.seq.center;
                vec![
                    n.to_string(),
                    m.to_string(),
                    num(*a),
                    num(a * a),
                    split.delta.contains(&n).to_string(),
                ]
            })
            .collect();
        let mut dir = RunDir::create(path)?;
        dir.record("scale", json!(scale));
        dir.write_csv("packet.csv", &["n", "m", "a", "weight", "in_delta"], rows)?;
        let beta_center = run.packet.beta.as_ref().map(|b| b.center);
        dir.record(
            "packet",
            json!({
                "alpha_center": run.seq.center,
                "beta_center": beta_center,
                "width": run.spec.width(),
                "radius": run.seq.radius,
                "norm_constant": run.seq.norm_constant,
                "closed_form_norm": run.seq.closed_form_norm,
                "norm_relative_error": run.seq.norm_relative_error(),
                "delta_half_width": run.spec.delta_half_width(),
                "delta_len": split.delta_len(),
                "gamma_mass": split.gamma_mass,
            }),
        );
        dir.plot("packet coefficients", "packet.csv", 2, &[(3, "a_n")], None);
        let path = dir.finish()?;
        Ok(format!(
            "n0 = {}, L = {:.4}, R = {}, K_h = {:.6} -> {}",
            run.seq.center,
            run.spec.width(),
            run.seq.radius,
            run.seq.norm_constant,
            relative(&s.out, &path)
        ))
    })
}

pub fn evolve(s: &Settings) -> Result<(), CliError> {
    for_each_scale(s, "evolve", |s, scale, path| {
        let label = scale.label();
        let run = PacketRun::new(s, scale)?;
        let t_hyp = run.phase.t_hyp();
        let t_end = s
            .t_max
            .or(s.periods.map(|k| k * t_hyp.abs()))
            .unwrap_or_else(|| run.limits.order1_limit());
        let grid = uniform_grid(t_hyp, t_end, s.samples_per_period.unwrap_or(64));
        let ap = run.approximants();
        let a1 = ap.order1(&grid).map_err(core(&label))?;
        let mut header = vec!["t", "t_over_t_hyp", "abs_a1"];
        let mut columns: Vec<Vec<f64>> = vec![
            grid.clone(),
            grid.iter().map(|t| t / t_hyp.abs()).collect(),
            a1.iter().map(|z| z.norm()).collect(),
        ];
        let mut dir = RunDir::create(path)?;
        dir.record("scale", json!(scale));
        dir.record("phase", run.phase_json());
        dir.record("order1_limit", run.limits.order1_limit());
        dir.record("grid", json!({ "t_max": t_end, "points": grid.len() }));
        dir.record("peaks_abs_a1", peaks_json(&grid, &columns[2], 0.5, t_hyp));
        let mut summary = format!("T_hyp = {t_hyp:.6}");
        if let Ok(closed) = ap.closed_form(&grid, ClosedForm::Poisson) {
            let diff = sup_norm(closed.iter().zip(&columns[2]).map(|(c, a)| (c - a).abs()));
            dir.record("sup_closed_form_difference", diff);
            header.push("closed_form");
            columns.push(closed);
        }
        if s.backend.wants_model() {
            let exact = partial_autocorrelation(&run.window, &run.packet, Family::Alpha, &grid).map_err(core(&label))?;
            let err = sup_norm(grid.iter().zip(exact.iter().zip(&a1)).map(|(t, (a, b))| (a - ap.carrier(*t) * b).norm()));
            let c: Vec<f64> = exact.iter().map(|z| z.norm()).collect();
            dir.record("peaks_model", peaks_json(&grid, &c, 0.5, t_hyp));
            dir.record("sup_order1_error", err);
            summary.push_str(&format!(", sup|a - a1~| = {err:.3e}"));
            header.push("c_model");
            columns.push(c);
        }
        if s.backend.wants_direct() {
            let levels = run.direct_levels(scale)?;
            let r = level_return(&levels, &run.spec, &grid).map_err(core(&label))?;
            let c: Vec<f64> = r.iter().map(|z| z.norm()).collect();
            dir.record("peaks_direct", peaks_json(&grid, &c, 0.5, t_hyp));
            header.push("c_direct");
            columns.push(c);
        }
        let rows = (0..grid.len()).map(|i| columns.iter().map(|c| num(c[i])).collect());
        dir.write_csv("evolve.csv", &header, rows)?;
        let ys: Vec<(usize, &str)> = header.iter().enumerate().skip(2).map(|(i, name)| (i + 1, *name)).collect();
        dir.plot("return amplitude", "evolve.csv", 2, &ys, None);
        let path = dir.finish()?;
        Ok(format!("{summary} -> {}", relative(&s.out, &path)))
    })
}

pub fn revival(s: &Settings) -> Result<(), CliError> {
    let pairs = if s.pairs.is_empty() { vec![(1, 2)] } else { s.pairs.clone() };
    for_each_scale(s, "revival", |s, scale, path| {
        let label = scale.label();
        let run = PacketRun::new(s, scale)?;
        let (t_hyp, t_rev) = (run.phase.t_hyp(), run.phase.t_rev());
        let grid = match (s.t_max, s.periods) {
            (None, None) => revival_grid(&run.phase),
            (t_max, periods) => {
                let t_end = t_max.unwrap_or_else(|| periods.unwrap_or(1.0) * t_hyp.abs());
                uniform_grid(t_hyp, t_end, s.samples_per_period.unwrap_or(16))
            }
        };
        let ap = run.approximants();
        let a2 = ap.order2(&grid).map_err(core(&label))?;
        let mut header = vec!["t", "t_over_t_rev", "abs_a2"];
        let mut columns: Vec<Vec<f64>> = vec![
            grid.clone(),
            grid.iter().map(|t| t / t_rev.abs()).collect(),
            a2.iter().map(|z| z.norm()).collect(),
        ];
        let defect = ap.revival_defect(&grid).map_err(core(&label))?;
        let mut dir = RunDir::create(path)?;
        dir.record("scale", json!(scale));
        dir.record("phase", run.phase_json());
        dir.record("order2_limit", run.limits.order2_limit());
        dir.record("grid", json!({ "t_max": grid.last(), "points": grid.len() }));
        dir.record("revival_defect", defect);
        dir.record("n_h_t_hyp_over_t_rev", run.phase.n_h() as f64 * t_hyp / t_rev);
        if s.backend.wants_model() {
            let exact = partial_autocorrelation(&run.window, &run.packet, Family::Alpha, &grid).map_err(core(&label))?;
            let err = sup_norm(grid.iter().zip(exact.iter().zip(&a2)).map(|(t, (a, b))| (a - ap.carrier(*t) * b).norm()));
            dir.record("sup_order2_error", err);
            header.push("c_model");
            columns.push(exact.iter().map(|z| z.norm()).collect());
        }
        if s.backend.wants_direct() {
            let levels = run.direct_levels(scale)?;
            let r = level_return(&levels, &run.spec, &grid).map_err(core(&label))?;
            header.push("c_direct");
            columns.push(r.iter().map(|z| z.norm()).collect());
        }
        let rows = (0..grid.len()).map(|i| columns.iter().map(|c| num(c[i])).collect());
        dir.write_csv("revival.csv", &header, rows)?;
        let ys: Vec<(usize, &str)> = header.iter().enumerate().skip(2).map(|(i, name)| (i + 1, *name)).collect();
        dir.plot("revival scale", "revival.csv", 2, &ys, None);

        let fgrid = uniform_grid(t_hyp, 2.0 * t_hyp.abs(), 64);
        let mut fractional = Vec::new();
        for &(p, q) in &pairs {
            let cmp = ap.fractional_prediction(&fgrid, p, q).map_err(core(&label))?;
            let name = format!("fractional_p{p}_q{q}.csv");
            let rows: Vec<Vec<String>> = fgrid
                .iter()
                .zip(cmp.lhs.iter().zip(&cmp.rhs))
                .map(|(t, (l, r))| vec![num(*t), num(t / t_hyp.abs()), num(l.norm()), num(r.norm()), num((l - r).norm())])
                .collect();
            dir.write_csv(&name, &["t", "t_over_t_hyp", "abs_order2_shifted", "abs_clone_sum", "abs_difference"], rows)?;
            dir.plot(&format!("clones at p/q = {p}/{q}"), &name, 2, &[(3, "order 2"), (4, "clone sum")], None);
            fractional.push(json!({
                "p": p,
                "q": q,
                "ell": cmp.ell,
                "file": name,
                "b_tilde": cmp.b_tilde.iter().map(|b| [b.re, b.im]).collect::<Vec<_>>(),
                "sup_difference": cmp.sup_difference,
            }));
        }
        dir.record("fractional", fractional);
        let path = dir.finish()?;
        Ok(format!(
            "T_rev = {t_rev:.6}, N_h = {}, defect = {defect:.3e} -> {}",
            run.phase.n_h(),
            relative(&s.out, &path)
        ))
    })
}

/// Gauss coefficients need no spectrum, so only the pairs and the output
/// directory are read from the configuration.
pub fn gauss(config: &RunConfig, out: PathBuf) -> Result<(), CliError> {
    let pairs: Vec<(i64, i64)> = match (&config.p, &config.q) {
        (Some(p), Some(q)) if p.len() == q.len() && !p.is_empty() => p.iter().copied().zip(q.iter().copied()).collect(),
        _ => return Err(CliError::Config("gauss needs --p and --q lists of equal length".into())),
    };
    let n0 = config.n0.unwrap_or(0);
    let mut dir = RunDir::create(out.join("gauss"))?;
    let mut entries = Vec::new();
    for (p, q) in pairs {
        let ctx = format!("p = {p}, q = {q}");
        let c = coefficients(p, q, n0).map_err(|e| CliError::Config(format!("{ctx}: {e}")))?;
        let law = modulus_law(p, q).map_err(core(&ctx))?;
        println!("p = {p}, q = {q}, n0 = {n0}: ell = {}", c.ell);
        println!("  k  |b_k|^2");
        let rows: Vec<Vec<String>> = (0..c.ell as usize)
            .map(|k| {
                println!("  {k}  {:.16}", c.b[k].norm_sqr());
                vec![
                    k.to_string(),
                    num(c.b[k].re),
                    num(c.b[k].im),
                    num(c.b[k].norm_sqr()),
                    num(law[k]),
                    num(c.b_tilde[k].re),
                    num(c.b_tilde[k].im),
                ]
            })
            .collect();
        let name = format!("gauss_p{p}_q{q}.csv");
        dir.write_csv(&name, &["k", "b_re", "b_im", "b_abs2", "law_abs2", "b_tilde_re", "b_tilde_im"], rows)?;
        dir.plot(&format!("|b_k|^2 for p/q = {p}/{q}"), &name, 1, &[(4, "computed"), (5, "law")], None);
        entries.push(json!({ "p": p, "q": q, "n0": n0, "ell": c.ell, "parseval_sum": c.parseval_sum(), "file": name }));
    }
    dir.record("command", "gauss");
    dir.record("config", json!(config));
    dir.record("coefficients", entries);
    let path = dir.finish()?;
    println!("wrote {}", path.display());
    Ok(())
}

struct SweepRow {
    scale: Scale,
    center: i64,
    t_hyp: f64,
    t_rev: f64,
    n_h: i64,
    theta_hat: f64,
    curvature: f64,
    count: usize,
    flow_period: Option<f64>,
}

pub fn sweep(s: &Settings) -> Result<(), CliError> {
    if s.scales.len() < 2 {
        return Err(CliError::Config("sweep needs at least two values of h".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(s.jobs)
        .build()
        .map_err(|e| io("thread pool", e))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        s.scales
            .par_iter()
            .map(|&scale| {
                let label = scale.label();
                let err = core(&label);
                let v = canonical_double_well();
                // phase data only needs the centre level and a few neighbours
                let gap = TAU * v.omega() / scale.log_h;
                let opts = ModelOptions {
                    lambda_bound: (s.energy.abs() + 3.0 * gap + 1.0).max(1.0),
                    ..ModelOptions::default()
                };
                let model = model_at(&v, scale, opts).map_err(&err)?;
                let window = model.solve_families().map_err(&err)?;
                let (center, _) = select_centers(&window, s.energy).map_err(&err)?;
                let phase = PhaseData::from_model(&model, &window, Family::Alpha, center).map_err(&err)?;
                let count = window.restricted(1.0).count();
                let flow_period = match scale.h {
                    Some(h) => Some(flow_period(&v, h, &FlowOptions::default()).map_err(&err)?.period),
                    None => None,
                };
                Ok(SweepRow {
                    scale,
                    center,
                    t_hyp: phase.t_hyp(),
                    t_rev: phase.t_rev(),
                    n_h: phase.n_h(),
                    theta_hat: phase.theta_hat(),
                    curvature: phase.curvature.unwrap_or(f64::NAN),
                    count,
                    flow_period,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    let mut dir = RunDir::create(s.out.join("sweep"))?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.scale.h.map(num).unwrap_or_default(),
                num(r.scale.log_h),
                r.center.to_string(),
                num(r.t_hyp),
                num(r.t_rev),
                r.n_h.to_string(),
                num(r.theta_hat),
                num(r.curvature),
                r.count.to_string(),
                r.flow_period.map(num).unwrap_or_default(),
            ]
        })
        .collect();
    dir.write_csv(
        "sweep.csv",
        &["h", "log_h", "center", "t_hyp", "t_rev", "n_h", "theta_hat", "curvature", "window_count", "flow_period"],
        csv_rows,
    )?;
    let logs: Vec<f64> = rows.iter().map(|r| r.scale.log_h).collect();
    let cubes: Vec<f64> = logs.iter().map(|l| l.powi(3)).collect();
    let col = |f: &dyn Fn(&SweepRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let t_hyp_fit = fit_line(&logs, &col(&|r| r.t_hyp.abs()));
    let t_rev_fit = fit_line(&cubes, &col(&|r| r.t_rev.abs()));
    let count_fit = fit_line(&logs, &col(&|r| r.count as f64));
    let flow: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.flow_period.map(|p| (r.scale.log_h, p))).collect();
    let flow_fit = fit_line(&flow.iter().map(|x| x.0).collect::<Vec<_>>(), &flow.iter().map(|x| x.1).collect::<Vec<_>>());
    dir.record("command", "sweep");
    dir.record("settings", settings_json(s));
    dir.record(
        "fits",
        json!({
            "abs_t_hyp_vs_log_h": fit_json(t_hyp_fit),
            "abs_t_rev_vs_log_h_cubed": fit_json(t_rev_fit),
            "window_count_vs_log_h": fit_json(count_fit),
            "flow_period_vs_log_h": fit_json(flow_fit),
        }),
    );
    dir.plot("T_hyp against |ln h|", "sweep.csv", 2, &[(4, "T_hyp")], None);
    dir.plot("T_rev against |ln h|", "sweep.csv", 2, &[(5, "T_rev")], None);
    let path = dir.finish()?;
    for r in &rows {
        println!(
            "sweep {}: T_hyp = {:.6}, T_rev = {:.6}, N_h = {}, count = {}",
            r.scale.label(),
            r.t_hyp,
            r.t_rev,
            r.n_h,
            r.count
        );
    }
    if let Some(f) = t_hyp_fit {
        println!("|T_hyp| = {:.6} |ln h| + {:.6}, max residual {:.3e}", f.slope, f.intercept, f.max_residual);
    }
    println!("wrote {}", path.display());
    Ok(())
}

pub fn default_out() -> PathBuf {
    PathBuf::from("revivalkit-out")
}

pub fn regime_of(command: &str) -> Regime {
    match command {
        "evolve" => Regime::Hyperbolic,
        "revival" => Regime::Revival,
        _ => Regime::Static,
    }
}
