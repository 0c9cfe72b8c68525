use nalgebra::{DMatrix, DVector};

use super::{check_dim, expm, NoiseDraw, SdeError, SemilinearSystem};

/// Truncation order of the stochastic Magnus expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagnusOrder {
    /// `Ω^[1] = (F₀ − ½ΣF_j²)h + ΣF_jΔW_j`
    One,
    /// `Ω^[2] = Ω^[1] − ½Σ_{i<j}(F_iF_j − F_jF_i) A_{i,j}`
    Two,
}

fn check_draw(system: &SemilinearSystem, h: f64, draw: &NoiseDraw) -> Result<(), SdeError> {
    check_dim("noise count", system.noises(), draw.noises())?;
    if h != draw.h() {
        return Err(SdeError::Domain(format!("step {h} does not match the draw's step {}", draw.h())));
    }
    Ok(())
}

pub fn omega(system: &SemilinearSystem, h: f64, draw: &NoiseDraw, order: MagnusOrder) -> Result<DMatrix<f64>, SdeError> {
    check_draw(system, h, draw)?;
    let mut om = system.drift_tilde() * h;
    for (j, dw) in draw.dw().iter().enumerate() {
        om += system.diffusion(j) * *dw;
    }
    if order == MagnusOrder::Two {
        for (i, j, c) in system.commutators() {
            om -= c * (0.5 * draw.area(*i, *j));
        }
    }
    Ok(om)
}

/// `y + g̃₀(y)h + Σ g_j(y)ΔW_j`, with `g̃₀ = g₀ − ΣF_jg_j`.
fn euler_bracket(system: &SemilinearSystem, y: &DVector<f64>, h: f64, draw: &NoiseDraw) -> DVector<f64> {
    let mut v = y.clone();
    if system.is_linear() {
        return v;
    }
    let mut g0 = system.g(0, y);
    for (j, dw) in draw.dw().iter().enumerate() {
        let gj = system.g(j + 1, y);
        g0 -= system.diffusion(j) * &gj;
        v += gj * *dw;
    }
    v + g0 * h
}

fn check_state(system: &SemilinearSystem, y: &DVector<f64>) -> Result<(), SdeError> {
    check_dim("state", system.dim(), y.len())
}

pub fn magnus_euler_step(
    system: &SemilinearSystem,
    y: &DVector<f64>,
    h: f64,
    draw: &NoiseDraw,
) -> Result<DVector<f64>, SdeError> {
    check_state(system, y)?;
    let r = expm(&omega(system, h, draw, MagnusOrder::One)?)?;
    Ok(r * euler_bracket(system, y, h, draw))
}

pub fn magnus_milstein_step(
    system: &SemilinearSystem,
    y: &DVector<f64>,
    h: f64,
    draw: &NoiseDraw,
) -> Result<DVector<f64>, SdeError> {
    check_state(system, y)?;
    let r = expm(&omega(system, h, draw, MagnusOrder::Two)?)?;
    let mut v = euler_bracket(system, y, h, draw);
    if !system.is_linear() {
        let m = system.noises();
        let g: Vec<DVector<f64>> = (1..=m).map(|j| system.g(j, y)).collect();
        for i in 0..m {
            let jac = system.jacobian(i + 1, y);
            for j in 0..m {
                let fj = system.diffusion(j);
                // H_{ij} = g_i′(F_j y + g_j) − F_j g_j
                let hij = &jac * (fj * y + &g[j]) - fj * &g[j];
                v += hij * draw.iterated(i, j);
            }
        }
    }
    Ok(r * v)
}

/// Itô–Milstein step for the full right-hand side, with `b_j = F_j y + g_j(y)`:
/// `y + (F₀y + g₀)h + Σ b_jΔW_j + Σ_{i,j} b_j′ b_i I_{i,j}`.
pub fn classical_milstein_step(
    system: &SemilinearSystem,
    y: &DVector<f64>,
    h: f64,
    draw: &NoiseDraw,
) -> Result<DVector<f64>, SdeError> {
    check_state(system, y)?;
    check_draw(system, h, draw)?;
    let m = system.noises();
    let b: Vec<DVector<f64>> = (0..m).map(|j| system.diffusion(j) * y + system.g(j + 1, y)).collect();
    let mut out = y + (system.f0() * y + system.g(0, y)) * h;
    for j in 0..m {
        out += &b[j] * draw.dw()[j];
    }
    for j in 0..m {
        let db = system.diffusion(j) + system.jacobian(j + 1, y);
        for i in 0..m {
            out += &db * &b[i] * draw.iterated(i, j);
        }
    }
    Ok(out)
}
