use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use stochmoments::mc::{
    estimate_gamma_mc, estimates_to_csv, estimates_to_json, format_real, rare_event_warning, second_moment,
    strong_error_table, ErrorMetric, PlanSystem, Scheme, SimulationPlan,
};
use stochmoments::moments::{gamma, gamma_with, mixed_moment_i, Backend, GammaIndex, MomentEngine};
use stochmoments::sde::{LevySampler, TestSdeParams};
use stochmoments::stability::{lyapunov_un, region_scan, un_coeffs, Method};
use stochmoments::{BigFloat, Rational};

use crate::{BackendArg, Cli, Command, Format, MethodArg, MetricArg, SchemeArg, TestSystemArgs};

pub fn parse_sampler(s: &str) -> Result<LevySampler, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let count = |v: &str| v.parse::<u32>().ok().filter(|n| *n > 0).ok_or_else(|| format!("bad count '{v}' in '{s}'"));
    match parts.as_slice() {
        ["subdiv", n] => Ok(LevySampler::Subdiv { substeps: count(n)? }),
        ["fourier", n] => Ok(LevySampler::Fourier { terms: count(n)?, tail: true }),
        ["fourier", n, "notail"] => Ok(LevySampler::Fourier { terms: count(n)?, tail: false }),
        _ => Err(format!("expected subdiv:<n>, fourier:<n> or fourier:<n>:notail, got '{s}'")),
    }
}

/// A positive real, or `2^-k`.
pub(crate) fn parse_step(s: &str) -> Result<f64, String> {
    let v = match s.trim().strip_prefix("2^") {
        Some(e) => 2f64.powi(e.parse::<i32>().map_err(|_| format!("bad exponent in '{s}'"))?),
        None => s.trim().parse::<f64>().map_err(|_| format!("'{s}' is not a number"))?,
    };
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("step must be positive, got '{s}'"))
    }
}

fn decimal(r: &Rational, bits: u32) -> String {
    let f = BigFloat::from_rational(r, bits);
    f.to_sci_string(f.decimal_digits())
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn scheme(s: SchemeArg) -> Scheme {
    match s {
        SchemeArg::MagnusEuler => Scheme::MagnusEuler,
        SchemeArg::MagnusMilstein => Scheme::MagnusMilstein,
        SchemeArg::ClassicalMilstein => Scheme::ClassicalMilstein,
    }
}

fn plan(method: SchemeArg, sys: &TestSystemArgs, h: f64, t_end: f64) -> Result<SimulationPlan> {
    let params = TestSdeParams::new(sys.lambda, sys.sigma1, sys.sigma2)?;
    Ok(SimulationPlan::new(
        scheme(method),
        PlanSystem::Test(params),
        h,
        t_end,
        sys.paths,
        sys.batches,
        sys.seed,
        sys.sampler,
    )?)
}

pub fn execute(cli: &Cli) -> Result<String> {
    let bits = cli.precision_bits;
    match &cli.command {
        Command::Gamma(a) => {
            let idx = GammaIndex::new(a.n, a.k, a.l);
            let backend = match a.backend {
                BackendArg::Recursive => Backend::Recursive,
                BackendArg::Explicit => Backend::Explicit,
                BackendArg::Mgf => Backend::Mgf,
            };
            let value = gamma_with(idx, backend)?;
            Ok(match cli.format {
                Format::Csv if a.decimal => format!("{}\n", decimal(&value, bits)),
                Format::Csv => format!("{value}\n"),
                Format::Json => json_text(&json!({
                    "index": idx.to_string(),
                    "exact": value.to_string(),
                    "decimal": decimal(&value, bits),
                })),
            })
        }
        Command::GammaTable(a) => {
            let mut rows = Vec::new();
            for n in 0..=a.max_n {
                for k in 0..=a.max_k {
                    for l in 0..=a.max_l {
                        rows.push((n, k, l, gamma(GammaIndex::new(n, k, l))?));
                    }
                }
            }
            Ok(match cli.format {
                Format::Csv => {
                    let mut out = String::from("n,k,l,exact,decimal\n");
                    for (n, k, l, v) in &rows {
                        out.push_str(&format!("{n},{k},{l},{v},{}\n", decimal(v, bits)));
                    }
                    out
                }
                Format::Json => json_text(&Value::Array(
                    rows.iter()
                        .map(|(n, k, l, v)| json!({"n": n, "k": k, "l": l, "exact": v.to_string(), "decimal": decimal(v, bits)}))
                        .collect(),
                )),
            })
        }
        Command::MixedMoment(a) => {
            let v = mixed_moment_i(a.a, a.b, a.c)?;
            Ok(match cli.format {
                Format::Csv if a.decimal => format!("{}\n", decimal(&v, bits)),
                Format::Csv => format!("{v}\n"),
                Format::Json => json_text(&json!({
                    "a": a.a, "b": a.b, "c": a.c, "exact": v.to_string(), "decimal": decimal(&v, bits),
                })),
            })
        }
        Command::UnCoeffs(a) => {
            let u = un_coeffs(a.n)?;
            let coeffs: Vec<String> = u.coeffs.iter().map(|c| c.to_string()).collect();
            Ok(match cli.format {
                Format::Csv => format!("{}\n", coeffs.join(",")),
                Format::Json => json_text(&json!({ "n": a.n, "coeffs": coeffs })),
            })
        }
        Command::Lyapunov(a) => {
            if a.n_min > a.n_max {
                bail!("--n-min {} exceeds --n-max {}", a.n_min, a.n_max);
            }
            let rows = (a.n_min..=a.n_max).map(|n| lyapunov_un(n, bits)).collect::<Result<Vec<_>, _>>()?;
            let sign = |p: bool| if p { "+" } else { "-" };
            Ok(match cli.format {
                Format::Csv => {
                    let mut out = String::from("n,value,sign\n");
                    for r in &rows {
                        out.push_str(&format!("{},{},{}\n", r.n, r.value.to_sci_string(17), sign(r.positive)));
                    }
                    out
                }
                Format::Json => json_text(&Value::Array(
                    rows.iter()
                        .map(|r| json!({"n": r.n, "value": r.value.to_sci_string(17), "sign": sign(r.positive)}))
                        .collect(),
                )),
            })
        }
        Command::StabilityRegion(a) => {
            let method = match a.method {
                MethodArg::Euler => Method::Euler,
                MethodArg::Milstein => Method::Milstein,
            };
            let grid = region_scan(
                a.x,
                (a.p_min, a.p_max),
                (a.q_min, a.q_max),
                (a.grid_p, a.grid_q),
                method,
                a.n_terms,
                bits,
            )?;
            Ok(match cli.format {
                Format::Csv => grid.to_csv(),
                Format::Json => json_text(&json!({
                    "method": grid.method.to_string(),
                    "x": format_real(grid.x),
                    "n_terms": grid.n_terms,
                    "points": grid.points.iter().map(|p| json!({
                        "p": format_real(p.p),
                        "q1": format_real(p.q1),
                        "factor": p.factor.to_sci_string(17),
                        "converged": p.converged,
                        "diverging": p.diverging,
                        "method_stable": p.method_stable,
                        "true_stable": p.true_stable,
                    })).collect::<Vec<_>>(),
                })),
            })
        }
        Command::Simulate(a) => {
            let plan = plan(a.method, &a.system, a.h, a.t_end)?;
            let est = second_moment(&plan)?;
            if let Some(w) = rare_event_warning(&plan, &est) {
                eprintln!("{w}");
            }
            let rows = vec![("second_moment".to_string(), est)];
            Ok(match cli.format {
                Format::Csv => estimates_to_csv(&rows),
                Format::Json => json_text(&estimates_to_json(plan.to_json(), &rows)),
            })
        }
        Command::StrongError(a) => {
            if a.h_list.is_empty() {
                bail!("--h-list must name at least one step size");
            }
            let plan = plan(a.method, &a.system, a.h_list[0].min(0.5), a.t_end)
                .context("building the strong-error plan")?;
            let metric = match a.metric {
                MetricArg::Mse => ErrorMetric::MeanSquare,
                MetricArg::Rms => ErrorMetric::RootMeanSquare,
                MetricArg::MeanNorm => ErrorMetric::MeanNorm,
                MetricArg::RssPerPath => ErrorMetric::RootSumSquarePerPath,
            };
            let table = strong_error_table(&plan, &a.h_list, a.ref_h, metric)?;
            Ok(match cli.format {
                Format::Csv => table.to_csv(),
                Format::Json => json_text(&json!({
                    "plan": plan.to_json(),
                    "metric": metric.to_string(),
                    "reference_h": format_real(table.reference_h),
                    "rows": table.rows.iter().map(|r| json!({
                        "key": format_real(r.h),
                        "log2_error": format_real(r.log2_error),
                        "mean": format_real(r.mean_sq.mean),
                        "sd": format_real(r.mean_sq.sd),
                        "se": format_real(r.mean_sq.se),
                    })).collect::<Vec<_>>(),
                })),
            })
        }
        Command::EstimateGamma(a) => {
            let idx = GammaIndex::new(a.n, a.k, a.l);
            let sampler = LevySampler::Subdiv { substeps: a.substeps };
            let est = estimate_gamma_mc(idx, a.samples, a.batches, &sampler, a.seed)?;
            let exact = MomentEngine::global().gamma(idx)?;
            let exact_f = exact.to_f64();
            let z = est.z_score(exact_f);
            Ok(match cli.format {
                Format::Csv => format!(
                    "index,exact,mean,sd,se,z\n\"{idx}\",{exact},{},{},{},{}\n",
                    format_real(est.mean),
                    format_real(est.sd),
                    format_real(est.se),
                    format_real(z)
                ),
                Format::Json => json_text(&json!({
                    "index": idx.to_string(),
                    "exact": exact.to_string(),
                    "mean": format_real(est.mean),
                    "sd": format_real(est.sd),
                    "se": format_real(est.se),
                    "z": format_real(z),
                    "paths_total": est.paths_total,
                })),
            })
        }
    }
}
