use super::tridiag::SymmetricTridiagonal;
use crate::error::{Error, Result};
use crate::fixed_domain::PotentialModel;

/// Largest number of levels [`fd_spectrum`] will return.
pub const MAX_LEVELS: usize = 10;

/// Smallest accepted number of grid intervals.
pub const MIN_POINTS: usize = 200;

/// Lowest `k` eigenvalues of the 3-point Dirichlet discretization of
/// `−Q″ + Ṽ Q` on the interior nodes `q_i = i/n_x`, without extrapolation.
pub fn fd_spectrum_raw(model: &PotentialModel, n_x: usize, k: usize) -> Result<Vec<f64>> {
    if k > MAX_LEVELS {
        return Err(Error::InvalidArgument(format!(
            "at most {MAX_LEVELS} levels can be requested, got {k}"
        )));
    }
    if n_x < MIN_POINTS {
        return Err(Error::InvalidGrid(format!(
            "fd_spectrum needs n_x >= {MIN_POINTS}, got {n_x}"
        )));
    }
    let h = 1.0 / n_x as f64;
    let inv_h2 = 1.0 / (h * h);
    let diag = (1..n_x)
        .map(|i| Ok(2.0 * inv_h2 + model.potential(i as f64 * h)?))
        .collect::<Result<Vec<f64>>>()
        .map_err(|e| Error::Eigensolver(format!("potential sampling failed: {e}")))?;
    let matrix = SymmetricTridiagonal::new(diag, vec![-inv_h2; n_x - 2])?;
    matrix.lowest_eigenvalues(k)
}

/// [`fd_spectrum_raw`] at `n_x` and `2 n_x`, Richardson-extrapolated in `h²`.
pub fn fd_spectrum(model: &PotentialModel, n_x: usize, k: usize) -> Result<Vec<f64>> {
    let coarse = fd_spectrum_raw(model, n_x, k)?;
    let fine = fd_spectrum_raw(model, 2 * n_x, k)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::close_relative;
    use std::f64::consts::PI;

    const PI2: f64 = PI * PI;

    #[test]
    fn square_well_levels() {
        let ev = fd_spectrum(&PotentialModel::square_well(), 400, 3).unwrap();
        for (n, v) in ev.iter().enumerate() {
            let expect = (n * (n + 2)) as f64 * PI2;
            assert!(close_relative(*v, expect, 1e-4), "n={n}: {v} vs {expect}");
        }
    }

    #[test]
    fn second_order_partner_deletes_two_levels() {
        let model = PotentialModel::second_order_partner(0).unwrap();
        let ev = fd_spectrum(&model, 400, 3).unwrap();
        for (v, m) in ev.iter().zip([8.0, 15.0, 24.0]) {
            assert!(close_relative(*v, m * PI2, 1e-2), "{v} vs {}", m * PI2);
        }
    }

    #[test]
    fn case1_ground_level_is_variationally_bounded() {
        let model = PotentialModel::square_well().with_case1(1.0);
        let e0 = fd_spectrum(&model, 400, 1).unwrap()[0];
        // trial state √2 sin(πq): ⟨q²⟩/4 = (1/3 − 1/(2π²))/4
        let bound = (1.0 / 3.0 - 0.5 / PI2) / 4.0;
        assert!(e0 > 0.0 && e0 < 0.25, "{e0}");
        assert!(e0 <= bound + 1e-9, "{e0} > {bound}");
    }

    #[test]
    fn argument_validation() {
        let m = PotentialModel::square_well();
        assert!(matches!(fd_spectrum(&m, 400, 11), Err(Error::InvalidArgument(_))));
        assert!(matches!(fd_spectrum(&m, 100, 3), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn extrapolation_improves_singular_family() {
        let model = PotentialModel::first_order_partner();
        let exact = 3.0 * PI2;
        let raw = fd_spectrum_raw(&model, 400, 1).unwrap()[0];
        let extrapolated = fd_spectrum(&model, 400, 1).unwrap()[0];
        assert!((extrapolated - exact).abs() < 0.1 * (raw - exact).abs());
    }
}
