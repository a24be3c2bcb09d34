use num_complex::Complex64;

use crate::assembly::MovingSolution;
use crate::boundary::BoundaryLaw;
use crate::error::Result;
use crate::fixed_domain::PotentialModel;
use crate::quadrature;

/// Simpson points used for the Gram integrals.
const GRAM_POINTS: usize = 4001;

/// Max `|G − I|` for the Gram matrix of the first `k` admissible assembled
/// modes at time `t`, integrated over `[0, L(t)]`.
pub fn orthonormality(model: &PotentialModel, law: &BoundaryLaw, t: f64, k: usize) -> Result<f64> {
    let sols = model
        .admissible_levels(k)
        .into_iter()
        .map(|n| MovingSolution::assemble_mode(model, law, n))
        .collect::<Result<Vec<_>>>()?;
    gram_deviation(&sols, t)
}

/// Max `|G − I|` over the given solutions, which must share one law.
pub(crate) fn gram_deviation(sols: &[MovingSolution], t: f64) -> Result<f64> {
    let frames = sols.iter().map(|s| s.frame(t)).collect::<Result<Vec<_>>>()?;
    let Some(first) = frames.first() else {
        return Ok(0.0);
    };
    let length = first.length();
    let h = 1.0 / (GRAM_POINTS - 1) as f64;
    let samples: Vec<Vec<Complex64>> = frames
        .iter()
        .map(|f| (0..GRAM_POINTS).map(|i| f.psi_at_fraction(i as f64 * h)).collect())
        .collect();
    let mut worst = 0.0f64;
    for a in 0..samples.len() {
        for b in a..samples.len() {
            let prod: Vec<Complex64> = samples[a]
                .iter()
                .zip(&samples[b])
                .map(|(u, v)| u.conj() * v * length)
                .collect();
            let re = quadrature::simpson(&prod.iter().map(|z| z.re).collect::<Vec<_>>(), h)?;
            let im = quadrature::simpson(&prod.iter().map(|z| z.im).collect::<Vec<_>>(), h)?;
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max(Complex64::new(re - expect, im).norm());
        }
    }
    Ok(worst)
}
