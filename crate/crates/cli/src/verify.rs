//! Property suite behind `dipolar verify`.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use dipolar_core::ansatz::{disk_energy_gamma, g_second, h1, h2, stripe_energy_modified};
use dipolar_core::energy::{
    energy_boundary, energy_grid, gamma_limit_energy, gamma_limit_energy_modified, lower_bound, rescale_params,
};
use dipolar_core::geometry::{make_disk, make_ellipse, make_stripe, random_band_limited, rasterize, SampledShape};
use dipolar_core::optimize::{circle_rigidity_check, gradient_flow, osc_curvature, shape_gradient, FlowOptions, FlowStatus};
use dipolar_core::phase::{compare_phases, mass_threshold, ELL_CRITICAL};
use dipolar_core::{Evaluator, JordanCurve, KernelParams, LayerSeparation, ShapeConfig, Winner};

use crate::commands::Context;
use crate::config::RunConfig;
use crate::emit::{to_json, write_text};
use crate::{CliError, VerifyArgs};

type Check = dipolar_core::Result<(bool, String)>;

#[derive(Serialize)]
struct CheckResult {
    name: &'static str,
    passed: bool,
    detail: String,
    seconds: f64,
}

struct Suite {
    quick: bool,
    seed: u64,
}

fn single(c: &JordanCurve, n: usize) -> dipolar_core::Result<SampledShape> {
    ShapeConfig::single(c.clone())?.sample(n)
}

fn params(lambda: f64, delta: f64, ell: LayerSeparation) -> dipolar_core::Result<KernelParams> {
    KernelParams::new(lambda, delta, ell)
}

impl Suite {
    fn shapes(&self, stream: u64, count: usize) -> dipolar_core::Result<Vec<JordanCurve>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        (0..count)
            .map(|_| {
                let scale = rng.gen_range(0.5..2.0);
                Ok(random_band_limited(&mut rng, 5, 0.3)?.scaled(scale))
            })
            .collect()
    }

    fn convexity(&self) -> Check {
        let n = if self.quick { 1_000 } else { 10_000 };
        let (mut min_h2, mut min_gap) = (f64::INFINITY, f64::INFINITY);
        for i in 1..n {
            let t = i as f64 / n as f64;
            let v = h2(t)?;
            min_h2 = min_h2.min(v);
            min_gap = min_gap.min(h1(t)? - v);
        }
        let m = if self.quick { 200 } else { 1_000 };
        let mut min_g2 = f64::INFINITY;
        for i in 0..m {
            min_g2 = min_g2.min(g_second(10f64.powf(-3.0 + 6.0 * i as f64 / (m - 1) as f64))?);
        }
        let ok = min_h2 > 0.0 && min_g2 > 0.0 && min_gap >= 0.0;
        Ok((ok, format!("min h2 {min_h2:.3e}, min h1 − h2 {min_gap:.3e}, min g'' {min_g2:.3e}")))
    }

    fn disk_gamma(&self) -> Check {
        let n = if self.quick { 512 } else { 2048 };
        let s = single(&make_disk(1.0)?, n)?;
        let d = (gamma_limit_energy(&s)?.total + 2.0 * PI * 4f64.ln()).abs();
        let l2 = LayerSeparation::Finite(2.0);
        let dm = (gamma_limit_energy_modified(&s, l2)?.total - disk_energy_gamma(1.0, l2)?).abs();
        Ok((d <= 1e-6 && dm <= 1e-6, format!("errors {d:.2e}, {dm:.2e}")))
    }

    fn rescaling(&self) -> Check {
        let count = if self.quick { 4 } else { 20 };
        let (mut worst_rel, mut worst_slack) = (0.0f64, f64::INFINITY);
        for (i, c) in self.shapes(1, count)?.iter().enumerate() {
            let ell = if i % 2 == 0 { LayerSeparation::Infinite } else { LayerSeparation::Finite(1.5) };
            let p = params(0.7, 1e-2, ell)?;
            let s = single(c, 256)?;
            let e = energy_boundary(&s, &p)?.total;
            for alpha in [0.5, 1.5, 2.0, 4.0] {
                let shrunk = single(&c.scaled(1.0 / alpha), 256)?;
                let (pt, _) = rescale_params(alpha, &p, c.enclosed_area()?)?;
                let et = alpha * energy_boundary(&shrunk, &pt)?.total;
                worst_rel = worst_rel.max((et - e).abs() / e.abs().max(1.0));
                if alpha > 1.0 && ell.is_infinite() {
                    let lhs = alpha * energy_boundary(&shrunk, &p)?.total - e;
                    worst_slack = worst_slack.min(p.lambda() * alpha.ln() / p.log_delta_abs() * s.perimeter() - lhs);
                }
            }
        }
        let ok = worst_rel <= 1e-6 && worst_slack >= 0.0;
        Ok((ok, format!("identity error {worst_rel:.2e}, min inequality slack {worst_slack:.3e}")))
    }

    fn lower_bound(&self) -> Check {
        let count = if self.quick { 6 } else { 50 };
        let lambdas = [0.3, 0.7, 1.0];
        let mut worst = f64::INFINITY;
        for (i, c) in self.shapes(2, count)?.iter().enumerate() {
            let p = params(lambdas[i % 3], 1e-2, LayerSeparation::Infinite)?;
            let s = ShapeConfig::single(c.clone())?.sample_auto()?;
            let per = s.perimeter();
            let e = energy_boundary(&s, &p)?.total;
            worst = worst.min((e - lower_bound(per, c.enclosed_area()?, &p)) / per + 1e-6);
        }
        Ok((worst >= 0.0, format!("min (E − bound)/P + 1e-6 = {worst:.3e}")))
    }

    fn monotonicity(&self) -> Check {
        let mut shapes = vec![("disk", make_disk(1.0)?), ("ellipse", make_ellipse(1.3, 0.8)?)];
        if !self.quick {
            shapes.push(("rounded stripe", make_stripe(1.0, 4.0, 0.2)?));
        }
        let mut ok = true;
        let mut detail = Vec::new();
        for (name, c) in shapes {
            let s = ShapeConfig::single(c)?.sample_auto()?;
            let limit = gamma_limit_energy(&s)?.total;
            let mut gaps = Vec::new();
            for d in [1e-2, 1e-3, 1e-4] {
                let p = params(1.0, d, LayerSeparation::Infinite)?;
                gaps.push(p.log_delta_abs() * energy_boundary(&s, &p)?.total - limit);
            }
            // non-increasing in δ, converging to the limit
            ok &= gaps.windows(2).all(|w| w[1] >= w[0] && w[1].abs() < w[0].abs());
            detail.push(format!("{name} {:.2e}/{:.2e}/{:.2e}", gaps[0], gaps[1], gaps[2]));
        }
        Ok((ok, format!("|log δ|E − E_(1,0) at δ = 1e-2/1e-3/1e-4: {}", detail.join(", "))))
    }

    fn cross_evaluator(&self) -> Check {
        let delta = 0.05;
        let cfg = ShapeConfig::single(make_ellipse(1.2, 1.0 / 1.2)?)?;
        let p = params(1.0, delta, LayerSeparation::Infinite)?;
        let s = cfg.sample(512)?;
        let b = energy_boundary(&s, &p)?.total;
        let g = energy_grid(&rasterize(&cfg, delta / 8.0)?, s.perimeter(), &p)?.total;
        let rel = (g - b).abs() / b.abs();
        Ok((rel <= 0.02, format!("grid {g:.5}, boundary {b:.5}, relative {rel:.2e}")))
    }

    fn phase(&self) -> Check {
        let l = ELL_CRITICAL + 0.02;
        let p = compare_phases(l)?;
        if p.winner != Winner::Stripe {
            return Ok((false, format!("winner {} at l = {l:.6}", p.winner)));
        }
        let m = mass_threshold(l)?;
        let a = p.a_opt.expect("stripe rows carry a minimizer");
        let at2 = stripe_energy_modified(a, 2.0 * m, LayerSeparation::Finite(l))? / (2.0 * m);
        Ok((at2 < p.f_disk_min, format!("STRIPE at l = {l:.6}, M_est {m:.4e}")))
    }

    fn flow(&self) -> Check {
        let p = params(0.5, 1e-3, LayerSeparation::Infinite)?;
        if self.quick {
            let s = single(&make_disk(1.0)?, 128)?;
            let (v, _) = shape_gradient(&s.components[0].curve, &p)?;
            let worst = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            return Ok((worst <= 1e-6, format!("circle velocity {worst:.2e}")));
        }
        let a = 1.5f64.sqrt();
        let f = gradient_flow(&ShapeConfig::single(make_ellipse(a, 1.0 / a)?)?, &p, Evaluator::Boundary, &FlowOptions::default())?;
        let disk = energy_boundary(&single(&make_disk(1.0)?, 256)?, &p)?.total;
        let rel = (f.energy() - disk).abs() / disk.abs();
        let osc = osc_curvature(&f.sampled);
        let ok = f.status == FlowStatus::Converged && osc < 1e-2 && circle_rigidity_check(&f.sampled).holds && rel <= 1e-3;
        Ok((ok, format!("{:?} in {} steps, osc κ {osc:.2e}, relative to disk {rel:.2e}", f.status, f.step)))
    }
}

pub fn run(ctx: &Context, a: VerifyArgs) -> Result<(), CliError> {
    let seed = a.seed.or(ctx.file.seed).unwrap_or(0);
    ctx.record(RunConfig {
        command: "verify",
        seed: Some(seed),
        outputs: a.report.iter().cloned().collect(),
        ..RunConfig::default()
    })?;
    let suite = Suite { quick: a.quick, seed };
    let checks: [(&str, fn(&Suite) -> Check); 8] = [
        ("convexity certificate", Suite::convexity),
        ("disk Γ-limit oracle", Suite::disk_gamma),
        ("rescaling identities", Suite::rescaling),
        ("lower bound", Suite::lower_bound),
        ("monotone Γ-convergence", Suite::monotonicity),
        ("grid vs boundary", Suite::cross_evaluator),
        ("stripe window above 2/e²", Suite::phase),
        ("gradient flow", Suite::flow),
    ];
    let mut results = Vec::new();
    for (name, check) in checks {
        let start = Instant::now();
        let (passed, detail) = match check(&suite) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let seconds = start.elapsed().as_secs_f64();
        println!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
        results.push(CheckResult { name, passed, detail, seconds });
    }
    if let Some(p) = &a.report {
        write_text(Some(p), &to_json(&results))?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Checks(format!("{failed} of {} checks failed", results.len())));
    }
    Ok(())
}
