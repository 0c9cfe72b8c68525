use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{check_dim, SdeError};
use crate::stability::{StabilityError, StabilityParams};

pub type VectorFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;

#[derive(Clone)]
struct Nonlinearity {
    /// `g₀, g₁, …, g_m`
    g: Vec<VectorFn>,
    /// `g₁′, …, g_m′` when supplied
    jacobians: Option<Vec<JacobianFn>>,
}

/// Constant matrices `F₀, F₁..F_m` plus optional nonlinear parts `g₀..g_m`.
#[derive(Clone)]
pub struct SemilinearSystem {
    f0: DMatrix<f64>,
    f: Vec<DMatrix<f64>>,
    nonlinear: Option<Nonlinearity>,
    // F₀ − ½ Σ F_j²
    drift_tilde: DMatrix<f64>,
    // (i, j, F_iF_j − F_jF_i) for i < j
    commutators: Vec<(usize, usize, DMatrix<f64>)>,
}

impl fmt::Debug for SemilinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemilinearSystem")
            .field("f0", &self.f0)
            .field("f", &self.f)
            .field("nonlinear", &self.nonlinear.is_some())
            .finish()
    }
}

impl SemilinearSystem {
    pub fn new(f0: DMatrix<f64>, f: Vec<DMatrix<f64>>) -> Result<Self, SdeError> {
        let d = f0.nrows();
        check_dim("F0 columns", d, f0.ncols())?;
        for fj in &f {
            check_dim("F_j rows", d, fj.nrows())?;
            check_dim("F_j columns", d, fj.ncols())?;
        }
        let mut drift_tilde = f0.clone();
        for fj in &f {
            drift_tilde -= fj * fj * 0.5;
        }
        let mut commutators = Vec::new();
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                let c = &f[i] * &f[j] - &f[j] * &f[i];
                if c.iter().any(|v| *v != 0.0) {
                    commutators.push((i, j, c));
                }
            }
        }
        Ok(SemilinearSystem { f0, f, nonlinear: None, drift_tilde, commutators })
    }

    /// Attach `g₀..g_m` (exactly `m + 1` functions) and optionally the
    /// Jacobians of `g₁..g_m`. Missing Jacobians are replaced by central
    /// finite differences.
    pub fn with_nonlinearity(mut self, g: Vec<VectorFn>, jacobians: Option<Vec<JacobianFn>>) -> Result<Self, SdeError> {
        check_dim("nonlinear functions g_0..g_m", self.f.len() + 1, g.len())?;
        if let Some(j) = &jacobians {
            check_dim("Jacobians of g_1..g_m", self.f.len(), j.len())?;
        }
        self.nonlinear = Some(Nonlinearity { g, jacobians });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.f0.nrows()
    }

    pub fn noises(&self) -> usize {
        self.f.len()
    }

    pub fn f0(&self) -> &DMatrix<f64> {
        &self.f0
    }

    /// `F_{j+1}`, zero-based over the noise terms.
    pub fn diffusion(&self, j: usize) -> &DMatrix<f64> {
        &self.f[j]
    }

    pub fn is_linear(&self) -> bool {
        self.nonlinear.is_none()
    }

    pub(crate) fn drift_tilde(&self) -> &DMatrix<f64> {
        &self.drift_tilde
    }

    pub(crate) fn commutators(&self) -> &[(usize, usize, DMatrix<f64>)] {
        &self.commutators
    }

    /// `g_j(y)` for `j = 0..=m`; zero for a linear system.
    pub fn g(&self, j: usize, y: &DVector<f64>) -> DVector<f64> {
        match &self.nonlinear {
            Some(n) => (n.g[j])(y),
            None => DVector::zeros(self.dim()),
        }
    }

    /// Jacobian of `g_j` for `j = 1..=m`.
    pub fn jacobian(&self, j: usize, y: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let Some(n) = &self.nonlinear else {
            return DMatrix::zeros(d, d);
        };
        if let Some(jac) = &n.jacobians {
            return (jac[j - 1])(y);
        }
        let step = f64::EPSILON.cbrt() * y.norm().max(1.0);
        let mut out = DMatrix::zeros(d, d);
        for c in 0..d {
            let mut plus = y.clone();
            let mut minus = y.clone();
            plus[c] += step;
            minus[c] -= step;
            let col = ((n.g[j])(&plus) - (n.g[j])(&minus)) / (2.0 * step);
            out.set_column(c, &col);
        }
        out
    }
}

/// `dy = λy dt + σ₁ diag(1,−1) y dW₁ + σ₂ [[0,1],[1,0]] y dW₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSdeParams {
    pub lambda: f64,
    pub sigma1: f64,
    pub sigma2: f64,
}

impl TestSdeParams {
    pub fn new(lambda: f64, sigma1: f64, sigma2: f64) -> Result<Self, SdeError> {
        for (name, v) in [("lambda", lambda), ("sigma1", sigma1), ("sigma2", sigma2)] {
            if v == 0.0 || !v.is_finite() {
                return Err(SdeError::Domain(format!("{name} must be finite and nonzero, got {v}")));
            }
        }
        Ok(TestSdeParams { lambda, sigma1, sigma2 })
    }

    pub fn to_system(&self) -> SemilinearSystem {
        let f0 = DMatrix::from_row_slice(2, 2, &[self.lambda, 0.0, 0.0, self.lambda]);
        let f1 = DMatrix::from_row_slice(2, 2, &[self.sigma1, 0.0, 0.0, -self.sigma1]);
        let f2 = DMatrix::from_row_slice(2, 2, &[0.0, self.sigma2, self.sigma2, 0.0]);
        SemilinearSystem::new(f0, vec![f1, f2]).expect("2x2 matrices")
    }

    /// Stability-plane coordinates for step `h`.
    pub fn stability_params(&self, h: f64, n_terms: u32) -> Result<StabilityParams, StabilityError> {
        StabilityParams::from_sde(self.lambda, self.sigma1, self.sigma2, h, n_terms)
    }
}

/// `2λ + σ₁² + σ₂² < 0`.
pub fn ms_stable_true(params: &TestSdeParams) -> bool {
    2.0 * params.lambda + params.sigma1 * params.sigma1 + params.sigma2 * params.sigma2 < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn true_stability() {
        assert!(ms_stable_true(&TestSdeParams::new(-1.0, 1.0, 0.5).unwrap()));
        assert!(!ms_stable_true(&TestSdeParams::new(-0.01, 3.0, 3.0).unwrap()));
        assert!(ms_stable_true(&TestSdeParams::new(-0.25, 0.5, 0.4).unwrap()));
        assert!(TestSdeParams::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn finite_difference_jacobian() {
        let sys = SemilinearSystem::new(DMatrix::identity(2, 2), vec![DMatrix::zeros(2, 2)])
            .unwrap()
            .with_nonlinearity(
                vec![
                    Arc::new(|y: &DVector<f64>| y * 0.0),
                    Arc::new(|y: &DVector<f64>| DVector::from_vec(vec![y[0].sin(), y[0] * y[1]])),
                ],
                None,
            )
            .unwrap();
        let y = DVector::from_vec(vec![0.3, -1.2]);
        let j = sys.jacobian(1, &y);
        let exact = DMatrix::from_row_slice(2, 2, &[0.3f64.cos(), 0.0, -1.2, 0.3]);
        assert!((j - exact).abs().max() < 1e-9);
    }

    #[test]
    fn test_system_commutator() {
        let sys = TestSdeParams::new(-1.0, 0.5, 2.0).unwrap().to_system();
        let (i, j, c) = &sys.commutators()[0];
        assert_eq!((*i, *j), (0, 1));
        assert_eq!(*c, DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]));
    }
}
