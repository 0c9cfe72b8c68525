use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rayon::prelude::*;

use super::{whole_ratio, McError, MomentEstimate, PlanSystem, Scheme, SimulationPlan};
use crate::sde::{
    classical_milstein_step, expm2_raw, magnus_euler_step, magnus_milstein_step, LevySampler, NoiseDraw,
    SemilinearSystem, StreamRng, TestSdeParams,
};
use crate::stability::{milstein_factor, DEFAULT_TERMS};

fn step(scheme: Scheme, system: &SemilinearSystem, y: &DVector<f64>, draw: &NoiseDraw) -> Result<DVector<f64>, McError> {
    let h = draw.h();
    Ok(match scheme {
        Scheme::MagnusEuler => magnus_euler_step(system, y, h, draw)?,
        Scheme::MagnusMilstein => magnus_milstein_step(system, y, h, draw)?,
        Scheme::ClassicalMilstein => classical_milstein_step(system, y, h, draw)?,
    })
}

/// Magnus steps on the test system with the 2×2 closed-form exponential.
pub(crate) fn test_system_path(
    p: &TestSdeParams,
    scheme: Scheme,
    h: f64,
    steps: u64,
    sampler: &LevySampler,
    rng: &mut StreamRng,
    y0: [f64; 2],
) -> Result<[f64; 2], McError> {
    debug_assert!(scheme != Scheme::ClassicalMilstein);
    let diag = (p.lambda - 0.5 * (p.sigma1 * p.sigma1 + p.sigma2 * p.sigma2)) * h;
    let s12 = p.sigma1 * p.sigma2;
    let [mut y1, mut y2] = y0;
    for _ in 0..steps {
        let (dw1, dw2, a) = sampler.sample_pair(rng, h)?;
        let rot = if scheme == Scheme::MagnusMilstein { s12 * a } else { 0.0 };
        let off = p.sigma2 * dw2;
        let d1 = p.sigma1 * dw1;
        let [e00, e01, e10, e11] = expm2_raw(diag + d1, off - rot, off + rot, diag - d1);
        (y1, y2) = (e00 * y1 + e01 * y2, e10 * y1 + e11 * y2);
    }
    Ok([y1, y2])
}

fn final_state(plan: &SimulationPlan, system: &SemilinearSystem, rng: &mut StreamRng) -> Result<DVector<f64>, McError> {
    if let (PlanSystem::Test(p), Scheme::MagnusEuler | Scheme::MagnusMilstein) = (&plan.system, plan.scheme) {
        let y = test_system_path(p, plan.scheme, plan.h, plan.steps(), &plan.sampler, rng, [plan.y0[0], plan.y0[1]])?;
        return Ok(DVector::from_vec(y.to_vec()));
    }
    let mut y = plan.y0.clone();
    for _ in 0..plan.steps() {
        let draw = plan.sampler.sample(rng, plan.h, system.noises())?;
        y = step(plan.scheme, system, &y, &draw)?;
    }
    Ok(y)
}

/// Batch statistics of `‖y_N‖²` at `t_end`.
pub fn second_moment(plan: &SimulationPlan) -> Result<MomentEstimate, McError> {
    let system = plan.system.system();
    let batches = (0..plan.batches)
        .map(|b| {
            (0..plan.paths)
                .into_par_iter()
                .map(|i| {
                    let mut rng = StreamRng::for_path(plan.seed, b, i);
                    final_state(plan, &system, &mut rng).map(|y| y.norm_squared())
                })
                .collect::<Result<Vec<f64>, McError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MomentEstimate::from_batches(&batches))
}

/// [`second_moment`] for plans that differ only in `λ`.
pub fn second_moment_table(plans: &[SimulationPlan]) -> Result<Vec<MomentEstimate>, McError> {
    if let Some(first) = plans.first() {
        for p in &plans[1..] {
            let same = p.scheme == first.scheme
                && p.h == first.h
                && p.t_end == first.t_end
                && p.paths == first.paths
                && p.batches == first.batches
                && p.seed == first.seed
                && p.sampler == first.sampler
                && p.y0 == first.y0;
            let same_noise = match (&p.system, &first.system) {
                (PlanSystem::Test(a), PlanSystem::Test(b)) => a.sigma1 == b.sigma1 && a.sigma2 == b.sigma2,
                _ => false,
            };
            if !same || !same_noise {
                return Err(McError::InvalidPlan("second-moment plans may differ only in lambda".into()));
            }
        }
    }
    plans.iter().map(second_moment).collect()
}

/// The caveat for large `q₁`: the Milstein series diverges, driven by rare
/// large draws that a plain Monte Carlo run will usually miss.
pub fn rare_event_warning(plan: &SimulationPlan, estimate: &MomentEstimate) -> Option<String> {
    let PlanSystem::Test(p) = &plan.system else { return None };
    if plan.scheme != Scheme::MagnusMilstein {
        return None;
    }
    let params = p.stability_params(plan.h, DEFAULT_TERMS).ok()?;
    let r = milstein_factor(&params).ok()?;
    let start = plan.y0.norm_squared();
    (r.diverging && estimate.mean <= start).then(|| {
        format!(
            "warning: the Milstein stability series diverges at q1 = {:.6}, x = {:.6}, but the simulated mean {:.6e} \
             shows no growth; the instability is carried by rare events this sample size is unlikely to see",
            params.q1(),
            params.x(),
            estimate.mean
        )
    })
}

/// What the strong-error table reports on a log₂ scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMetric {
    /// `⟨‖y_N − y_ref‖²⟩`
    MeanSquare,
    /// `⟨‖y_N − y_ref‖²⟩^{1/2}`
    RootMeanSquare,
    /// `⟨‖y_N − y_ref‖⟩`
    MeanNorm,
    /// `(Σ_paths ‖y_N − y_ref‖²)^{1/2} / paths`, i.e. `(MSE / paths)^{1/2}`
    RootSumSquarePerPath,
}

impl fmt::Display for ErrorMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorMetric::MeanSquare => "mse",
            ErrorMetric::RootMeanSquare => "rms",
            ErrorMetric::MeanNorm => "mean-norm",
            ErrorMetric::RootSumSquarePerPath => "rss-per-path",
        })
    }
}

impl FromStr for ErrorMetric {
    type Err = McError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mse" => Ok(ErrorMetric::MeanSquare),
            "rms" => Ok(ErrorMetric::RootMeanSquare),
            "mean-norm" => Ok(ErrorMetric::MeanNorm),
            "rss-per-path" => Ok(ErrorMetric::RootSumSquarePerPath),
            other => Err(McError::InvalidPlan(format!("unknown error metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongErrorRow {
    pub h: f64,
    /// log₂ of the selected metric
    pub log2_error: f64,
    pub mean_sq: MomentEstimate,
    pub mean_norm: MomentEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongErrorTable {
    pub metric: ErrorMetric,
    pub reference_h: f64,
    pub rows: Vec<StrongErrorRow>,
}

impl StrongErrorTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,log2_error,mean_sq,mean_sq_se,mean_norm,mean_norm_se\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                super::format_real(r.h),
                super::format_real(r.log2_error),
                super::format_real(r.mean_sq.mean),
                super::format_real(r.mean_sq.se),
                super::format_real(r.mean_norm.mean),
                super::format_real(r.mean_norm.se)
            ));
        }
        out
    }
}

/// Errors at `t_end` of `plan.scheme` with each step in `h_list` against a
/// classical Milstein reference at `reference_h` on the same Brownian path.
/// Coarse draws are aggregated from the reference draws with Chen's relation.
/// `plan.h` is ignored.
pub fn strong_error_table(
    plan: &SimulationPlan,
    h_list: &[f64],
    reference_h: f64,
    metric: ErrorMetric,
) -> Result<StrongErrorTable, McError> {
    let ref_steps = whole_ratio(plan.t_end, reference_h)
        .ok_or(McError::IndivisibleStep { h: plan.t_end, reference_h })?;
    let ratios = h_list
        .iter()
        .map(|&h| {
            let r = whole_ratio(h, reference_h).ok_or(McError::IndivisibleStep { h, reference_h })?;
            if ref_steps % r != 0 {
                return Err(McError::IndivisibleStep { h: plan.t_end, reference_h: h });
            }
            Ok(r as usize)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let system = plan.system.system();
    let m = system.noises();

    // per batch, per path: (‖e‖², ‖e‖) for each h
    let per_batch = (0..plan.batches)
        .map(|b| {
            (0..plan.paths)
                .into_par_iter()
                .map(|i| {
                    let mut rng = StreamRng::for_path(plan.seed, b, i);
                    let fine = (0..ref_steps)
                        .map(|_| plan.sampler.sample(&mut rng, reference_h, m))
                        .collect::<Result<Vec<_>, _>>()?;
                    let mut y_ref = plan.y0.clone();
                    for d in &fine {
                        y_ref = classical_milstein_step(&system, &y_ref, reference_h, d)?;
                    }
                    ratios
                        .iter()
                        .map(|&r| {
                            let mut y = plan.y0.clone();
                            for chunk in fine.chunks(r) {
                                let mut coarse = chunk[0].clone();
                                for d in &chunk[1..] {
                                    coarse = coarse.concat(d)?;
                                }
                                y = step(plan.scheme, &system, &y, &coarse)?;
                            }
                            let e = (y - &y_ref).norm();
                            Ok((e * e, e))
                        })
                        .collect::<Result<Vec<_>, McError>>()
                })
                .collect::<Result<Vec<_>, McError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let rows = h_list
        .iter()
        .enumerate()
        .map(|(k, &h)| {
            let sq: Vec<Vec<f64>> = per_batch.iter().map(|paths| paths.iter().map(|v| v[k].0).collect()).collect();
            let nm: Vec<Vec<f64>> = per_batch.iter().map(|paths| paths.iter().map(|v| v[k].1).collect()).collect();
            let mean_sq = MomentEstimate::from_batches(&sq);
            let mean_norm = MomentEstimate::from_batches(&nm);
            let log2_error = match metric {
                ErrorMetric::MeanSquare => mean_sq.mean.log2(),
                ErrorMetric::RootMeanSquare => 0.5 * mean_sq.mean.log2(),
                ErrorMetric::MeanNorm => mean_norm.mean.log2(),
                ErrorMetric::RootSumSquarePerPath => 0.5 * (mean_sq.mean / mean_sq.paths_total as f64).log2(),
            };
            StrongErrorRow { h, log2_error, mean_sq, mean_norm }
        })
        .collect();
    Ok(StrongErrorTable { metric, reference_h, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_path_matches_general_steppers() {
        let p = TestSdeParams::new(-0.4, 1.0, 0.7).unwrap();
        let sys = p.to_system();
        let sampler = LevySampler::Fourier { terms: 4, tail: true };
        for scheme in [Scheme::MagnusEuler, Scheme::MagnusMilstein] {
            let mut r1 = StreamRng::new(11, 3);
            let mut r2 = StreamRng::new(11, 3);
            let fast = test_system_path(&p, scheme, 0.5, 10, &sampler, &mut r1, [1.0, 1.0]).unwrap();
            let mut y = DVector::from_vec(vec![1.0, 1.0]);
            for _ in 0..10 {
                let d = sampler.sample(&mut r2, 0.5, 2).unwrap();
                y = step(scheme, &sys, &y, &d).unwrap();
            }
            assert!((y[0] - fast[0]).abs() <= 1e-12 * y.norm() && (y[1] - fast[1]).abs() <= 1e-12 * y.norm());
        }
    }
}
