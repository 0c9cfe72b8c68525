use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{check_dim, SdeError};

/// Seedable ChaCha8 stream. Distinct `stream` ids under the same seed give
/// independent sequences, so each (batch, path) owns its own generator.
#[derive(Debug, Clone)]
pub struct StreamRng {
    rng: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        StreamRng { rng }
    }

    pub fn for_path(seed: u64, batch: u32, path: u32) -> Self {
        Self::new(seed, ((batch as u64) << 32) | path as u64)
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

/// Wiener increments and Lévy areas over one step of length `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraw {
    h: f64,
    dw: Vec<f64>,
    /// antisymmetric `A_{i,j}`
    levy: DMatrix<f64>,
}

impl NoiseDraw {
    pub fn new(h: f64, dw: Vec<f64>, levy: DMatrix<f64>) -> Result<Self, SdeError> {
        if !(h > 0.0) {
            return Err(SdeError::Domain(format!("step size must be positive, got {h}")));
        }
        let m = dw.len();
        check_dim("Levy matrix rows", m, levy.nrows())?;
        check_dim("Levy matrix columns", m, levy.ncols())?;
        for i in 0..m {
            if levy[(i, i)] != 0.0 {
                return Err(SdeError::Domain("Levy matrix must have a zero diagonal".into()));
            }
            for j in i + 1..m {
                if levy[(i, j)] != -levy[(j, i)] {
                    return Err(SdeError::Domain("Levy matrix must be antisymmetric".into()));
                }
            }
        }
        Ok(NoiseDraw { h, dw, levy })
    }

    /// Increments only; all Lévy areas zero.
    pub fn increments(h: f64, dw: Vec<f64>) -> Result<Self, SdeError> {
        let m = dw.len();
        Self::new(h, dw, DMatrix::zeros(m, m))
    }

    /// Two noises with `A₁,₂ = a`.
    pub fn pair(h: f64, dw1: f64, dw2: f64, a: f64) -> Result<Self, SdeError> {
        Self::new(h, vec![dw1, dw2], DMatrix::from_row_slice(2, 2, &[0.0, a, -a, 0.0]))
    }

    pub(crate) fn from_upper(h: f64, dw: Vec<f64>, upper: impl Fn(usize, usize) -> f64) -> Self {
        let m = dw.len();
        let mut levy = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i + 1..m {
                let a = upper(i, j);
                levy[(i, j)] = a;
                levy[(j, i)] = -a;
            }
        }
        NoiseDraw { h, dw, levy }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn noises(&self) -> usize {
        self.dw.len()
    }

    pub fn dw(&self) -> &[f64] {
        &self.dw
    }

    pub fn levy(&self) -> &DMatrix<f64> {
        &self.levy
    }

    /// `A_{i,j}`, zero-based.
    pub fn area(&self, i: usize, j: usize) -> f64 {
        self.levy[(i, j)]
    }

    /// Iterated Itô integral `I_{i,j}`, zero-based.
    pub fn iterated(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.5 * (self.dw[i] * self.dw[i] - self.h)
        } else {
            0.5 * self.dw[i] * self.dw[j] + 0.5 * self.levy[(i, j)]
        }
    }

    /// The draw over `[t, t + h₁ + h₂]` from consecutive draws (Chen's relation):
    /// `A_{i,j} = A′ + A″ + ΔW′_i ΔW″_j − ΔW′_j ΔW″_i`.
    pub fn concat(&self, next: &NoiseDraw) -> Result<NoiseDraw, SdeError> {
        check_dim("noise count", self.noises(), next.noises())?;
        let dw = self.dw.iter().zip(&next.dw).map(|(a, b)| a + b).collect();
        Ok(NoiseDraw::from_upper(self.h + next.h, dw, |i, j| {
            self.levy[(i, j)] + next.levy[(i, j)] + (self.dw[i] * next.dw[j] - self.dw[j] * next.dw[i])
        }))
    }
}

/// `m` independent `N(0, h)` draws.
pub fn sample_increments(rng: &mut StreamRng, h: f64, m: usize) -> Result<Vec<f64>, SdeError> {
    if !(h > 0.0) {
        return Err(SdeError::Domain(format!("step size must be positive, got {h}")));
    }
    let sd = h.sqrt();
    Ok((0..m).map(|_| sd * rng.normal()).collect())
}

/// How Lévy areas are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevySampler {
    /// Discrete area of the Brownian path on `substeps` uniform sub-intervals.
    Subdiv { substeps: u32 },
    /// Fourier series truncated after `terms` modes, optionally with a
    /// conditionally Gaussian correction for the discarded variance.
    Fourier { terms: u32, tail: bool },
}

impl LevySampler {
    pub fn sample(&self, rng: &mut StreamRng, h: f64, m: usize) -> Result<NoiseDraw, SdeError> {
        if !(h > 0.0) {
            return Err(SdeError::Domain(format!("step size must be positive, got {h}")));
        }
        if m == 2 {
            let (dw1, dw2, a) = self.sample_pair(rng, h)?;
            return Ok(NoiseDraw::from_upper(h, vec![dw1, dw2], |_, _| a));
        }
        match *self {
            LevySampler::Subdiv { substeps } => subdiv(rng, h, m, substeps),
            LevySampler::Fourier { terms, tail } => fourier(rng, h, m, terms, tail),
        }
    }

    /// `(ΔW₁, ΔW₂, A₁,₂)` without allocating; the two-noise hot path.
    pub(crate) fn sample_pair(&self, rng: &mut StreamRng, h: f64) -> Result<(f64, f64, f64), SdeError> {
        match *self {
            LevySampler::Subdiv { substeps } => {
                if substeps == 0 {
                    return Err(SdeError::Domain("substeps must be positive".into()));
                }
                let sd = (h / substeps as f64).sqrt();
                let (mut w1, mut w2, mut a) = (0.0, 0.0, 0.0);
                for _ in 0..substeps {
                    let d1 = sd * rng.normal();
                    let d2 = sd * rng.normal();
                    a += w1 * d2 - w2 * d1;
                    w1 += d1;
                    w2 += d2;
                }
                Ok((w1, w2, a))
            }
            LevySampler::Fourier { terms, tail } => {
                if terms == 0 {
                    return Err(SdeError::Domain("at least one Fourier term is required".into()));
                }
                let sqrt2 = std::f64::consts::SQRT_2;
                let xi1 = rng.normal();
                let xi2 = rng.normal();
                let mut acc = 0.0;
                for r in 1..=terms {
                    let z1 = rng.normal();
                    let z2 = rng.normal();
                    let e1 = rng.normal();
                    let e2 = rng.normal();
                    acc += (z1 * (sqrt2 * xi2 + e2) - z2 * (sqrt2 * xi1 + e1)) / r as f64;
                }
                if tail {
                    let a_p = tail_weight(terms);
                    acc += (2.0 * a_p * (1.0 + xi1 * xi1 + xi2 * xi2)).sqrt() * rng.normal();
                }
                let sh = h.sqrt();
                Ok((sh * xi1, sh * xi2, h / PI * acc))
            }
        }
    }
}

/// `Σ_{r>p} 1/r²`, the variance weight of the modes a `p`-term series drops.
fn tail_weight(p: u32) -> f64 {
    PI * PI / 6.0 - (1..=p).map(|r| 1.0 / (r as f64 * r as f64)).sum::<f64>()
}

fn subdiv(rng: &mut StreamRng, h: f64, m: usize, substeps: u32) -> Result<NoiseDraw, SdeError> {
    if substeps == 0 {
        return Err(SdeError::Domain("substeps must be positive".into()));
    }
    let sd = (h / substeps as f64).sqrt();
    let mut w = vec![0.0; m];
    let mut dw = vec![0.0; m];
    let mut area = DMatrix::<f64>::zeros(m, m);
    for _ in 0..substeps {
        for v in dw.iter_mut() {
            *v = sd * rng.normal();
        }
        for i in 0..m {
            for j in i + 1..m {
                area[(i, j)] += w[i] * dw[j] - w[j] * dw[i];
            }
        }
        for (wi, di) in w.iter_mut().zip(&dw) {
            *wi += di;
        }
    }
    Ok(NoiseDraw::from_upper(h, w, |i, j| area[(i, j)]))
}

fn fourier(rng: &mut StreamRng, h: f64, m: usize, terms: u32, tail: bool) -> Result<NoiseDraw, SdeError> {
    if terms == 0 {
        return Err(SdeError::Domain("at least one Fourier term is required".into()));
    }
    let xi: Vec<f64> = (0..m).map(|_| rng.normal()).collect();
    let p = terms as usize;
    let mut zeta = vec![0.0; m * p];
    let mut eta = vec![0.0; m * p];
    for i in 0..m {
        for r in 0..p {
            zeta[i * p + r] = rng.normal();
            eta[i * p + r] = rng.normal();
        }
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut area = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in i + 1..m {
            let mut acc = 0.0;
            for r in 0..p {
                let (zi, zj) = (zeta[i * p + r], zeta[j * p + r]);
                let (ei, ej) = (eta[i * p + r], eta[j * p + r]);
                acc += (zi * (sqrt2 * xi[j] + ej) - zj * (sqrt2 * xi[i] + ei)) / (r + 1) as f64;
            }
            area[(i, j)] = acc;
        }
    }
    if tail {
        let a_p = tail_weight(terms);
        for i in 0..m {
            for j in i + 1..m {
                let sd = (2.0 * a_p * (1.0 + xi[i] * xi[i] + xi[j] * xi[j])).sqrt();
                area[(i, j)] += sd * rng.normal();
            }
        }
    }
    let scale = h / PI;
    let sh = h.sqrt();
    let dw = xi.iter().map(|x| sh * x).collect();
    Ok(NoiseDraw::from_upper(h, dw, |i, j| scale * area[(i, j)]))
}

/// Two-noise draw with the subdivision sampler.
pub fn sample_levy_subdiv(rng: &mut StreamRng, h: f64, substeps: u32) -> Result<NoiseDraw, SdeError> {
    LevySampler::Subdiv { substeps }.sample(rng, h, 2)
}

/// Two-noise draw with the truncated Fourier sampler.
pub fn sample_levy_kp(rng: &mut StreamRng, h: f64, terms: u32, tail: bool) -> Result<NoiseDraw, SdeError> {
    LevySampler::Fourier { terms, tail }.sample(rng, h, 2)
}

