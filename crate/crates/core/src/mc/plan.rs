use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde_json::{json, Value};

use super::{whole_ratio, McError};
use crate::sde::{LevySampler, SemilinearSystem, TestSdeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    MagnusEuler,
    MagnusMilstein,
    ClassicalMilstein,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::MagnusEuler => "magnus_euler",
            Scheme::MagnusMilstein => "magnus_milstein",
            Scheme::ClassicalMilstein => "classical_milstein",
        })
    }
}

impl FromStr for Scheme {
    type Err = McError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "magnus_euler" | "euler" => Ok(Scheme::MagnusEuler),
            "magnus_milstein" | "milstein" => Ok(Scheme::MagnusMilstein),
            "classical_milstein" | "classical" => Ok(Scheme::ClassicalMilstein),
            other => Err(McError::InvalidPlan(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum PlanSystem {
    Test(TestSdeParams),
    General(SemilinearSystem),
}

impl PlanSystem {
    pub fn system(&self) -> SemilinearSystem {
        match self {
            PlanSystem::Test(p) => p.to_system(),
            PlanSystem::General(s) => s.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PlanSystem::Test(_) => 2,
            PlanSystem::General(s) => s.dim(),
        }
    }
}

/// One Monte Carlo experiment.
#[derive(Debug, Clone)]
pub struct SimulationPlan {
    pub scheme: Scheme,
    pub system: PlanSystem,
    pub h: f64,
    pub t_end: f64,
    pub paths: u32,
    pub batches: u32,
    pub seed: u64,
    pub sampler: LevySampler,
    pub y0: DVector<f64>,
}

impl SimulationPlan {
    /// Starts from `y₀ = (1, …, 1)`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        scheme: Scheme,
        system: PlanSystem,
        h: f64,
        t_end: f64,
        paths: u32,
        batches: u32,
        seed: u64,
        sampler: LevySampler,
    ) -> Result<Self, McError> {
        if !(h > 0.0 && h < 1.0) {
            return Err(McError::InvalidPlan(format!("h must lie in (0, 1), got {h}")));
        }
        if !(t_end > 0.0) || whole_ratio(t_end, h).is_none() {
            return Err(McError::InvalidPlan(format!("t_end = {t_end} is not a whole number of steps h = {h}")));
        }
        if paths == 0 || batches == 0 {
            return Err(McError::InvalidPlan("paths and batches must be positive".into()));
        }
        let y0 = DVector::from_element(system.dim(), 1.0);
        Ok(SimulationPlan { scheme, system, h, t_end, paths, batches, seed, sampler, y0 })
    }

    pub fn with_y0(mut self, y0: DVector<f64>) -> Result<Self, McError> {
        if y0.len() != self.system.dim() {
            return Err(McError::InvalidPlan(format!("y0 has length {}, expected {}", y0.len(), self.system.dim())));
        }
        self.y0 = y0;
        Ok(self)
    }

    pub fn steps(&self) -> u64 {
        whole_ratio(self.t_end, self.h).expect("validated")
    }

    pub fn to_json(&self) -> Value {
        let system = match &self.system {
            PlanSystem::Test(p) => json!({
                "kind": "test",
                "lambda": super::format_real(p.lambda),
                "sigma1": super::format_real(p.sigma1),
                "sigma2": super::format_real(p.sigma2),
            }),
            PlanSystem::General(s) => json!({ "kind": "custom", "dim": s.dim(), "noises": s.noises() }),
        };
        let sampler = match self.sampler {
            LevySampler::Subdiv { substeps } => json!({ "kind": "subdiv", "substeps": substeps }),
            LevySampler::Fourier { terms, tail } => json!({ "kind": "fourier", "terms": terms, "tail": tail }),
        };
        json!({
            "method": self.scheme.to_string(),
            "system": system,
            "h": super::format_real(self.h),
            "t_end": super::format_real(self.t_end),
            "paths": self.paths,
            "batches": self.batches,
            "seed": self.seed,
            "sampler": sampler,
            "y0": self.y0.iter().map(|v| super::format_real(*v)).collect::<Vec<_>>(),
        })
    }
}
