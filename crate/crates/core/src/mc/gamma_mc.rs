use rayon::prelude::*;

use super::{McError, MomentEstimate};
use crate::moments::GammaIndex;
use crate::sde::{LevySampler, StreamRng};

/// Monte Carlo estimate of `γ(n,k,l)` from unit-interval draws.
pub fn estimate_gamma_mc(
    idx: GammaIndex,
    samples: u64,
    batches: u32,
    sampler: &LevySampler,
    seed: u64,
) -> Result<MomentEstimate, McError> {
    Ok(estimate_gamma_mc_many(&[idx], samples, batches, sampler, seed)?.remove(0))
}

/// Several indices from one shared set of draws. `samples` are split evenly
/// over `batches`.
pub fn estimate_gamma_mc_many(
    indices: &[GammaIndex],
    samples: u64,
    batches: u32,
    sampler: &LevySampler,
    seed: u64,
) -> Result<Vec<MomentEstimate>, McError> {
    if batches == 0 || samples < batches as u64 {
        return Err(McError::InvalidPlan(format!("cannot split {samples} samples into {batches} batches")));
    }
    let per_batch = (samples / batches as u64) as u32;
    let powers: Vec<(i32, i32, i32)> =
        indices.iter().map(|g| (2 * g.n as i32, 2 * g.k as i32, 2 * g.l as i32)).collect();
    // values[b][i][j]: batch b, sample i, index j
    let values = (0..batches)
        .map(|b| {
            (0..per_batch)
                .into_par_iter()
                .map(|i| {
                    let mut rng = StreamRng::for_path(seed, b, i);
                    let (w1, w2, a) = sampler.sample_pair(&mut rng, 1.0)?;
                    Ok(powers.iter().map(|&(pn, pk, pl)| w1.powi(pn) * a.powi(pk) * w2.powi(pl)).collect::<Vec<f64>>())
                })
                .collect::<Result<Vec<_>, McError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..indices.len())
        .map(|j| {
            let cols: Vec<Vec<f64>> = values.iter().map(|batch| batch.iter().map(|v| v[j]).collect()).collect();
            MomentEstimate::from_batches(&cols)
        })
        .collect())
}
