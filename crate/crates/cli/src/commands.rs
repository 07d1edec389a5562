use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Map, Value};

use dipolar_core::ansatz::{f_disk, f_stripe, AnsatzResult};
use dipolar_core::energy::{energy_boundary, energy_grid, gamma_limit_energy, gamma_limit_energy_modified};
use dipolar_core::geometry::{rasterize, sample_arclength, SampledShape};
use dipolar_core::optimize::{gradient_flow, osc_curvature, FlowOptions, FlowStatus};
use dipolar_core::phase::{crossover_scan, crossover_scan_with_threshold};
use dipolar_core::{EnergyBreakdown, Evaluator, KernelParams, LayerSeparation, ShapeConfig};

use crate::config::{parse_grid, parse_shape, FileConfig, ResolvedParams, RunConfig};
use crate::emit::{svg_curves, svg_series, to_csv, to_json, write_text};
use crate::{AnsatzArgs, CliError, EnergyArgs, EvaluatorArg, OptimizeArgs, PhaseScanArgs};

/// Raster size beyond which the grid evaluator is refused.
const MAX_GRID_CELLS: f64 = 6.0e7;

pub struct Context {
    pub file: FileConfig,
    pub workers: Option<usize>,
    pub dump_config: Option<PathBuf>,
}

impl Context {
    /// Reports the effective configuration on stderr and, if requested, to a file.
    pub fn record(&self, mut cfg: RunConfig) -> Result<(), CliError> {
        cfg.workers = Some(self.workers.unwrap_or_else(rayon::current_num_threads));
        let text = to_json(&cfg);
        eprint!("effective config: {text}");
        if let Some(p) = &self.dump_config {
            write_text(Some(p), &text)?;
        }
        Ok(())
    }
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{flag} is required")))
}

fn sample(shape: &ShapeConfig, nodes: Option<usize>) -> Result<SampledShape, CliError> {
    match nodes {
        Some(n) if n < 16 => Err(CliError::Usage(format!("--nodes must be at least 16, got {n}"))),
        Some(n) => Ok(shape.sample(n)?),
        None => Ok(shape.sample_auto()?),
    }
}

fn breakdown_value(b: &EnergyBreakdown) -> Value {
    let mut v = serde_json::to_value(b).expect("breakdown serializes");
    if let (Some(p), Value::Object(m)) = (b.params, &mut v) {
        m.insert("log_delta_abs_times_total".into(), json!(p.log_delta_abs() * b.total));
    }
    v
}

fn grid_energy(shape: &ShapeConfig, sampled: &SampledShape, params: &KernelParams, h: f64) -> Result<EnergyBreakdown, CliError> {
    if !(h > 0.0) {
        return Err(CliError::Usage(format!("--h must be positive, got {h}")));
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in &sampled.components {
        for p in &c.curve.points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
    }
    let cells = ((hi[0] - lo[0]) / h + 2.0) * ((hi[1] - lo[1]) / h + 2.0);
    if cells > MAX_GRID_CELLS {
        return Err(CliError::Run(format!(
            "grid evaluator would need {cells:.2e} cells at h = {h}; use a larger δ or a smaller shape"
        )));
    }
    let raster = rasterize(shape, h)?;
    Ok(energy_grid(&raster, sampled.perimeter(), params)?)
}

pub fn energy(ctx: &Context, a: EnergyArgs) -> Result<(), CliError> {
    let spec = require(a.shape.clone().or(ctx.file.shape.clone()), "--shape")?;
    let rp = ResolvedParams::resolve(&a.params, &ctx.file)?;
    let evaluator = a.evaluator.or(ctx.file.evaluator).unwrap_or(EvaluatorArg::Boundary);
    let nodes = a.nodes.or(ctx.file.nodes);
    let needs_params = !a.all && matches!(evaluator, EvaluatorArg::Boundary | EvaluatorArg::Grid);
    let params = if needs_params {
        Some(rp.kernel(&format!("--evaluator {}", evaluator_name(evaluator)))?)
    } else if rp.delta.is_some() {
        Some(rp.kernel("energy")?)
    } else {
        None
    };
    let h = a.h.or(ctx.file.h).or(params.map(|p| p.delta() / 8.0));
    let shape = parse_shape(&spec)?;
    let sampled = sample(&shape, nodes)?;
    ctx.record(RunConfig {
        command: "energy",
        lambda: params.map(|p| p.lambda()),
        delta: params.map(|p| p.delta()),
        ell: Some(rp.ell),
        shape: Some(spec),
        evaluator: Some(if a.all { "all".into() } else { evaluator_name(evaluator).into() }),
        nodes,
        h: h.filter(|_| a.all || evaluator == EvaluatorArg::Grid),
        outputs: a.out.iter().cloned().collect(),
        ..RunConfig::default()
    })?;

    let text = if a.all {
        let mut results = Vec::new();
        let mut skipped = Map::new();
        let boundary = params.map(|p| energy_boundary(&sampled, &p)).transpose()?;
        let grid = match (params, h) {
            (Some(p), Some(h)) if shape.components.iter().all(|c| matches!(c.placement, dipolar_core::Placement::At(_))) => {
                match grid_energy(&shape, &sampled, &p, h) {
                    Ok(g) => Some(g),
                    Err(CliError::Run(m)) => {
                        skipped.insert("GRID".into(), json!(m));
                        None
                    }
                    Err(e) => return Err(e),
                }
            }
            (Some(_), _) => {
                skipped.insert("GRID".into(), json!("far-separated components have no common raster"));
                None
            }
            (None, _) => None,
        };
        if params.is_none() {
            skipped.insert("BOUNDARY".into(), json!("needs --delta"));
            skipped.insert("GRID".into(), json!("needs --delta"));
        }
        let gamma = gamma_limit_energy(&sampled)?;
        let modified = match rp.ell {
            LayerSeparation::Finite(_) => Some(gamma_limit_energy_modified(&sampled, rp.ell)?),
            LayerSeparation::Infinite => {
                skipped.insert("GAMMA_LIMIT_MODIFIED".into(), json!("needs a finite --ell"));
                None
            }
        };
        for b in [&boundary, &grid].into_iter().flatten() {
            results.push(breakdown_value(b));
        }
        results.push(breakdown_value(&gamma));
        if let Some(m) = &modified {
            results.push(breakdown_value(m));
        }
        let mut consistency = Map::new();
        if let (Some(b), Some(g)) = (&boundary, &grid) {
            consistency.insert("grid_minus_boundary_relative".into(), json!((g.total - b.total) / b.total.abs()));
        }
        if let (Some(b), Some(p)) = (&boundary, params) {
            if p.lambda() == 1.0 && p.ell().is_infinite() {
                consistency.insert(
                    "log_delta_abs_times_boundary_minus_gamma".into(),
                    json!(p.log_delta_abs() * b.total - gamma.total),
                );
            }
        }
        if let Some(m) = &modified {
            consistency.insert("gamma_modified_minus_gamma".into(), json!(m.total - gamma.total));
        }
        to_json(&json!({ "evaluations": results, "consistency": consistency, "skipped": skipped }))
    } else {
        let b = match evaluator {
            EvaluatorArg::Boundary => energy_boundary(&sampled, &params.expect("checked above"))?,
            EvaluatorArg::Grid => grid_energy(&shape, &sampled, &params.expect("checked above"), h.expect("set with δ"))?,
            EvaluatorArg::Gamma => gamma_limit_energy(&sampled)?,
            EvaluatorArg::GammaModified => gamma_limit_energy_modified(&sampled, rp.ell)?,
        };
        to_json(&breakdown_value(&b))
    };
    write_text(a.out.as_deref(), &text)
}

fn evaluator_name(e: EvaluatorArg) -> &'static str {
    match e {
        EvaluatorArg::Boundary => "boundary",
        EvaluatorArg::Grid => "grid",
        EvaluatorArg::Gamma => "gamma",
        EvaluatorArg::GammaModified => "gamma-modified",
    }
}

pub fn ansatz(ctx: &Context, a: AnsatzArgs) -> Result<(), CliError> {
    let spec = require(a.shape.clone().or(ctx.file.shape.clone()), "--shape")?;
    let ell = match &a.ell {
        Some(s) => LayerSeparation::parse(s).map_err(|e| CliError::Usage(e.to_string()))?,
        None => ctx.file.ell.unwrap_or(LayerSeparation::Infinite),
    };
    let bad = || CliError::Usage(format!("ansatz shape must be disk:r or stripe:a,m, got `{spec}`"));
    let (kind, body) = spec.split_once(':').ok_or_else(bad)?;
    let nums: Vec<f64> = body.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let usage = |e: dipolar_core::Error| CliError::Usage(e.to_string());
    let result = match (kind, nums.as_slice()) {
        ("disk", [r]) => AnsatzResult::disk(*r, ell).map_err(usage)?,
        ("stripe", [a, m]) => AnsatzResult::stripe(*a, *m, ell).map_err(usage)?,
        _ => return Err(bad()),
    };
    ctx.record(RunConfig {
        command: "ansatz",
        ell: Some(ell),
        shape: Some(spec.clone()),
        outputs: a.out.iter().cloned().collect(),
        ..RunConfig::default()
    })?;
    write_text(a.out.as_deref(), &(result.to_json() + "\n"))
}

#[derive(Serialize)]
struct PhaseRow {
    ell: f64,
    a_opt: Option<f64>,
    f_disk_min: f64,
    f_stripe: Option<f64>,
    winner: String,
    #[serde(rename = "M_est")]
    m_est: Option<f64>,
}

pub fn phase_scan(ctx: &Context, a: PhaseScanArgs) -> Result<(), CliError> {
    let spec = require(a.l_grid.clone().or(ctx.file.l_grid.clone()), "--l")?;
    let grid = parse_grid(&spec)?;
    if let Some(bad) = grid.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(CliError::Usage(format!("layer separations must be positive, got {bad}")));
    }
    ctx.record(RunConfig {
        command: "phase-scan",
        l_grid: Some(spec),
        outputs: a.out.iter().chain(&a.svg).cloned().collect(),
        ..RunConfig::default()
    })?;
    let points = if a.threshold { crossover_scan_with_threshold(&grid)? } else { crossover_scan(&grid)? };
    let rows: Vec<PhaseRow> = points
        .iter()
        .map(|p| PhaseRow {
            ell: p.ell,
            a_opt: p.a_opt,
            f_disk_min: p.f_disk_min,
            f_stripe: p.f_stripe_at_a_opt,
            winner: p.winner.to_string(),
            m_est: p.m_est,
        })
        .collect();
    let csv = to_csv(&rows, &["ell", "a_opt", "f_disk_min", "f_stripe", "winner", "M_est"])?;
    write_text(a.out.as_deref(), &csv)?;
    if let Some(path) = &a.svg {
        let (ell, a_opt) = match a.plot_ell {
            Some(l) => {
                if !(l > 0.0 && l.is_finite()) {
                    return Err(CliError::Usage(format!("--plot-ell must be positive, got {l}")));
                }
                (l, dipolar_core::phase::find_optimal_disk_scale(l)?)
            }
            None => match points.iter().find(|p| p.a_opt.is_some()) {
                Some(p) => (p.ell, p.a_opt),
                None => return Err(CliError::Usage("no non-degenerate row to plot; pass --plot-ell".into())),
            },
        };
        let a_max = a_opt.map_or(2.0, |a| 3.0 * a);
        let xs: Vec<f64> = (1..=200).map(|i| a_max * i as f64 / 200.0).collect();
        let curve = |f: &dyn Fn(f64) -> dipolar_core::Result<f64>| -> Result<Vec<[f64; 2]>, CliError> {
            xs.iter().map(|&x| Ok([x, f(x)?])).collect()
        };
        let svg = svg_series(
            &format!("energy per mass at l = {ell:.5}"),
            "a",
            &[("f_disk", curve(&|x| f_disk(x, ell))?), ("f_stripe", curve(&|x| f_stripe(x, ell))?)],
        );
        write_text(Some(path), &svg)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceCsvRow {
    step: usize,
    energy: f64,
    residual: f64,
    area: f64,
}

pub fn optimize(ctx: &Context, a: OptimizeArgs) -> Result<(), CliError> {
    let spec = require(a.start.clone().or(ctx.file.shape.clone()), "--start")?;
    let rp = ResolvedParams::resolve(&a.params, &ctx.file)?;
    let params = rp.kernel("optimize")?;
    let defaults = FlowOptions::default();
    let nodes = a.nodes.or(ctx.file.nodes).unwrap_or(defaults.nodes);
    let opts = FlowOptions {
        nodes,
        max_mode: a.max_mode.or(ctx.file.max_mode).unwrap_or((nodes / 16).max(1)),
        max_steps: a.max_steps.or(ctx.file.max_steps).unwrap_or(defaults.max_steps),
        dt0: a.dt0.or(ctx.file.dt0),
        tol: a.tol.or(ctx.file.tol).unwrap_or(defaults.tol),
        ..defaults
    };
    let shape = parse_shape(&spec)?;
    ctx.record(RunConfig {
        command: "optimize",
        lambda: Some(params.lambda()),
        delta: Some(params.delta()),
        ell: Some(params.ell()),
        shape: Some(spec),
        evaluator: Some("boundary".into()),
        nodes: Some(opts.nodes),
        max_mode: Some(opts.max_mode),
        max_steps: Some(opts.max_steps),
        dt0: opts.dt0,
        tol: Some(opts.tol),
        outputs: a.trace.iter().chain(&a.curve_out).chain(&a.svg).cloned().collect(),
        ..RunConfig::default()
    })?;
    let flow = gradient_flow(&shape, &params, Evaluator::Boundary, &opts).map_err(|e| match e {
        dipolar_core::Error::InvalidParameter(m) | dipolar_core::Error::Precondition(m) => CliError::Usage(m),
        e => e.into(),
    })?;
    let rows: Vec<TraceCsvRow> = flow
        .trace
        .iter()
        .map(|r| TraceCsvRow { step: r.step, energy: r.energy, residual: r.residual, area: r.area })
        .collect();
    write_text(a.trace.as_deref(), &to_csv(&rows, &["step", "energy", "residual", "area"])?)?;
    if let Some(p) = &a.curve_out {
        write_text(Some(p), &(ShapeConfig::single(flow.curve.clone())?.to_json() + "\n"))?;
    }
    if let Some(p) = &a.svg {
        let initial = sample_arclength(&shape.placed_curves()[0].0, opts.nodes)?;
        write_text(Some(p), &svg_curves(&[("initial", &initial.points), ("final", &flow.sampled.points)]))?;
    }
    eprintln!(
        "flow: {:?} after {} steps, energy {:.9} -> {:.9}, residual {:.3e}, osc κ {:.3e}",
        flow.status,
        flow.step,
        flow.trace[0].energy,
        flow.energy(),
        flow.residual(),
        osc_curvature(&flow.sampled)
    );
    if flow.trace.windows(2).any(|w| w[1].energy > w[0].energy) {
        return Err(CliError::Checks("energy trace increased".into()));
    }
    match flow.status {
        FlowStatus::Converged | FlowStatus::MaxSteps => Ok(()),
        s => Err(CliError::Checks(format!("flow aborted: {s:?}; outputs hold the last valid state"))),
    }
}
