use num_complex::Complex64;

use super::tridiag::solve_complex_tridiagonal;
use super::GridSpec;
use crate::assembly::{phase, MovingSolution};
use crate::boundary::BoundaryLaw;
use crate::error::Result;
use crate::fixed_domain::PotentialModel;

/// Outcome of one Crank–Nicolson run.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationReport {
    pub n_x: usize,
    pub n_t: usize,
    /// `‖ψ_numerical − ψ_analytic‖` over `[0, L(t1)]`.
    pub l2_error: f64,
    pub max_error: f64,
    /// Largest relative change of the discrete norm over all steps.
    pub norm_drift: f64,
    /// `ψ` at `x_i = i L(t1)/n_x`, `i = 0..=n_x`.
    pub field: Vec<Complex64>,
}

/// Evolves `χ` on the fixed grid `q_i = i/n_x` with the static potential
/// `Ṽ(q)` in the rescaled clock (`Δτ_j = τ(t_{j+1}) − τ(t_j)`), maps back
/// to `ψ` through the gauge phase and compares with `initial` at `t1`.
pub fn propagate_cn(
    model: &PotentialModel,
    law: &BoundaryLaw,
    initial: &MovingSolution,
    grid: &GridSpec,
) -> Result<PropagationReport> {
    grid.check_against(law)?;
    let n = grid.n_x;
    let h = 1.0 / n as f64;
    let inv_h2 = 1.0 / (h * h);
    let v = (1..n)
        .map(|i| model.potential(i as f64 * h))
        .collect::<Result<Vec<f64>>>()?;

    let start = initial.frame(grid.t0)?;
    let mut chi: Vec<Complex64> = (1..n).map(|i| start.chi(i as f64 * h)).collect();
    let discrete_norm = |c: &[Complex64]| c.iter().map(|z| z.norm_sqr()).sum::<f64>() * h;
    let norm0 = discrete_norm(&chi);

    let dt = grid.dt();
    let taus = (0..=grid.n_t)
        .map(|j| law.tau(grid.t0 + j as f64 * dt))
        .collect::<Result<Vec<f64>>>()?;
    let mut drift = 0.0f64;
    let half_i = Complex64::new(0.0, 0.5);
    let mut rhs = vec![Complex64::new(0.0, 0.0); n - 1];
    for step in taus.windows(2) {
        let a = half_i * (step[1] - step[0]);
        let off = -a * inv_h2;
        let off_vec = vec![off; n - 2];
        let diag: Vec<Complex64> = v.iter().map(|vi| 1.0 + a * (2.0 * inv_h2 + vi)).collect();
        for i in 0..n - 1 {
            // (I − aH) χ
            let mut r = (1.0 - a * (2.0 * inv_h2 + v[i])) * chi[i];
            if i > 0 {
                r += a * inv_h2 * chi[i - 1];
            }
            if i + 2 < n {
                r += a * inv_h2 * chi[i + 1];
            }
            rhs[i] = r;
        }
        chi = solve_complex_tridiagonal(&off_vec, &diag, &off_vec, &rhs)?;
        drift = drift.max((discrete_norm(&chi) - norm0).abs() / norm0);
    }

    let end = initial.frame(grid.t1)?;
    let length = end.length();
    let zero = Complex64::new(0.0, 0.0);
    let mut field = Vec::with_capacity(n + 1);
    field.push(zero);
    for (i, c) in chi.iter().enumerate() {
        let x = (i + 1) as f64 * h * length;
        field.push(phase(law, grid.t1, x)?.exp() * c);
    }
    field.push(zero);
    let hx = length * h;
    let (mut sum, mut max) = (0.0, 0.0f64);
    for (i, psi) in field.iter().enumerate() {
        let err = (psi - end.psi_at_fraction(i as f64 * h)).norm();
        sum += err * err * hx;
        max = max.max(err);
    }
    Ok(PropagationReport {
        n_x: n,
        n_t: grid.n_t,
        l2_error: sum.sqrt(),
        max_error: max,
        norm_drift: drift,
        field,
    })
}
