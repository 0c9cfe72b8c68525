use super::McError;

/// Batch mean with its spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub mean: f64,
    /// Sample SD of the batch means, or of the individual paths when there
    /// is a single batch.
    pub sd: f64,
    pub se: f64,
    pub paths_total: u64,
}

impl MomentEstimate {
    /// Combine per-batch path values (each batch in path order).
    pub fn from_batches(batches: &[Vec<f64>]) -> Self {
        let paths_total = batches.iter().map(|b| b.len() as u64).sum();
        if batches.len() == 1 {
            let v = &batches[0];
            let n = v.len() as f64;
            let mean = pairwise_sum(v) / n;
            let sd = sample_sd(v, mean);
            return MomentEstimate { mean, sd, se: sd / n.sqrt(), paths_total };
        }
        let means: Vec<f64> = batches.iter().map(|b| pairwise_sum(b) / b.len() as f64).collect();
        let b = means.len() as f64;
        let mean = pairwise_sum(&means) / b;
        let sd = sample_sd(&means, mean);
        MomentEstimate { mean, sd, se: sd / b.sqrt(), paths_total }
    }

    /// `(mean − exact)/se`; infinite when `se = 0` and the mean is off.
    pub fn z_score(&self, exact: f64) -> f64 {
        let d = self.mean - exact;
        if d == 0.0 {
            0.0
        } else {
            d / self.se
        }
    }
}

fn sample_sd(v: &[f64], mean: f64) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let sq: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    (pairwise_sum(&sq) / (v.len() - 1) as f64).sqrt()
}

/// Recursive halving sum; fixed order for a fixed slice.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Least-squares slope of `log₂ value` against `log₂ h`.
pub fn fit_order(points: &[(f64, f64)]) -> Result<f64, McError> {
    if points.len() < 2 {
        return Err(McError::Fit(format!("got {} point(s)", points.len())));
    }
    if let Some((h, v)) = points.iter().find(|(h, v)| !(*h > 0.0) || !(*v > 0.0)) {
        return Err(McError::Fit(format!("nonpositive point ({h}, {v})")));
    }
    let xs: Vec<f64> = points.iter().map(|(h, _)| h.log2()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(McError::Fit("all step sizes are equal".into()));
    }
    Ok(sxy / sxx)
}
