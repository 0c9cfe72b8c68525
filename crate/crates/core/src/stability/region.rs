use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use super::euler::{euler_factor_from_values, euler_values};
use super::milstein::{milstein_factor_from_values, milstein_values};
use super::{StabilityError, StabilityParams};
use crate::numkernel::BigFloat;

pub const REGION_CSV_HEADER: &str = "p,q1,x,factor,converged,diverging,method_stable,true_stable";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Euler,
    Milstein,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Euler => "euler",
            Method::Milstein => "milstein",
        })
    }
}

impl FromStr for Method {
    type Err = StabilityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euler" => Ok(Method::Euler),
            "milstein" => Ok(Method::Milstein),
            other => Err(StabilityError::InvalidParams(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RegionPoint {
    pub p: f64,
    pub q1: f64,
    pub x: f64,
    pub factor: BigFloat,
    pub converged: bool,
    pub diverging: bool,
    pub method_stable: bool,
    pub true_stable: bool,
}

#[derive(Debug, Clone)]
pub struct RegionGrid {
    pub method: Method,
    pub x: f64,
    pub n_terms: u32,
    /// Row-major over `p`, then `q₁`.
    pub points: Vec<RegionPoint>,
}

impl RegionGrid {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{REGION_CSV_HEADER}")?;
        for pt in &self.points {
            writeln!(
                out,
                "{:e},{:e},{:e},{},{},{},{},{}",
                pt.p,
                pt.q1,
                pt.x,
                pt.factor.to_sci_string(17),
                pt.converged,
                pt.diverging,
                pt.method_stable,
                pt.true_stable
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Scan a `grid.0 × grid.1` mesh of `(p, q₁)` at fixed `x`.
///
/// The `p` axis includes both endpoints. The `q₁` axis excludes `q_range.0`
/// (which is typically 0, where the parameters are invalid) and includes
/// `q_range.1`.
pub fn region_scan(
    x: f64,
    p_range: (f64, f64),
    q_range: (f64, f64),
    grid: (usize, usize),
    method: Method,
    n_terms: u32,
    precision: u32,
) -> Result<RegionGrid, StabilityError> {
    let (gp, gq) = grid;
    if gp < 2 || gq < 2 {
        return Err(StabilityError::InvalidParams(format!("grid must be at least 2x2, got {gp}x{gq}")));
    }
    if !(p_range.0 < p_range.1) || !(q_range.0 < q_range.1) || q_range.0 < 0.0 {
        return Err(StabilityError::InvalidParams(format!(
            "invalid ranges p={p_range:?}, q1={q_range:?}"
        )));
    }
    // validates x and precision
    StabilityParams::new(p_range.0, q_range.1, x, n_terms)?.with_precision(precision)?;

    let values = match method {
        Method::Euler => euler_values(x, n_terms, precision),
        Method::Milstein => milstein_values(x, n_terms, precision)?,
    };

    let mesh: Vec<(f64, f64)> = (0..gp)
        .flat_map(|i| {
            let p = p_range.0 + (p_range.1 - p_range.0) * i as f64 / (gp - 1) as f64;
            (0..gq).map(move |j| (p, q_range.0 + (q_range.1 - q_range.0) * (j + 1) as f64 / gq as f64))
        })
        .collect();

    let points = mesh
        .into_par_iter()
        .map(|(p, q1)| {
            let params = StabilityParams::new(p, q1, x, n_terms)?.with_precision(precision)?;
            let r = match method {
                Method::Euler => euler_factor_from_values(&params, &values),
                Method::Milstein => milstein_factor_from_values(&params, &values),
            };
            Ok(RegionPoint {
                p,
                q1,
                x,
                method_stable: r.method_stable(),
                factor: r.factor,
                converged: r.converged,
                diverging: r.diverging,
                true_stable: r.true_stable,
            })
        })
        .collect::<Result<Vec<_>, StabilityError>>()?;

    Ok(RegionGrid { method, x, n_terms, points })
}
