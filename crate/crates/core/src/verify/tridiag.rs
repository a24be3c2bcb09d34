use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off.len() == diag.len() − 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Eigensolver(format!(
                "inconsistent tridiagonal sizes {} and {}",
                diag.len(),
                off.len()
            )));
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::Eigensolver("non-finite matrix entry".into()));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in self.diag.iter().enumerate() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1].powi(2) };
            d = a - x - if i == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k` smallest eigenvalues in ascending order, by bisection.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        if k > self.dim() {
            return Err(Error::Eigensolver(format!(
                "requested {k} eigenvalues of a {}-dimensional matrix",
                self.dim()
            )));
        }
        let (lo, hi) = self.bounds();
        (0..k)
            .map(|m| {
                let (mut a, mut b) = (lo, hi);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b {
                        break;
                    }
                    if self.count_below(mid) > m {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                let value = 0.5 * (a + b);
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::Eigensolver(format!("bisection failed for level {m}")))
                }
            })
            .collect()
    }
}

/// Solves `A x = rhs` for tridiagonal `A` with sub-diagonal `lower`,
/// diagonal `diag` and super-diagonal `upper` (Thomas algorithm).
pub fn solve_complex_tridiagonal(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    if rhs.len() != n || lower.len() + 1 != n || upper.len() + 1 != n {
        return Err(Error::InvalidArgument("tridiagonal system size mismatch".into()));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - lower[i - 1] * c[i - 1];
        }
        if pivot.norm() == 0.0 {
            return Err(Error::InvalidArgument(format!("zero pivot at row {i}")));
        }
        if i + 1 < n {
            c[i] = upper[i] / pivot;
        }
        d[i] = if i == 0 {
            rhs[0] / pivot
        } else {
            (rhs[i] - lower[i - 1] * d[i - 1]) / pivot
        };
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let m = SymmetricTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let ev = m.lowest_eigenvalues(4).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let theta = (k + 1) as f64 * PI / (2.0 * (n + 1) as f64);
            assert!((v - 4.0 * theta.sin().powi(2)).abs() < 1e-13);
        }
        assert_eq!(m.count_below(10.0), n);
        assert_eq!(m.count_below(-1.0), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SymmetricTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymmetricTridiagonal::new(vec![1.0, f64::NAN], vec![0.0]).is_err());
        let m = SymmetricTridiagonal::new(vec![1.0], vec![]).unwrap();
        assert!(m.lowest_eigenvalues(2).is_err());
    }

    #[test]
    fn thomas_solves_random_system() {
        let n = 7;
        let lower: Vec<_> = (0..n - 1).map(|i| Complex64::new(0.3 * i as f64, -0.2)).collect();
        let upper: Vec<_> = (0..n - 1).map(|i| Complex64::new(-0.1, 0.4 + 0.01 * i as f64)).collect();
        let diag: Vec<_> = (0..n).map(|i| Complex64::new(3.0 + i as f64, 1.0)).collect();
        let x: Vec<_> = (0..n).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let rhs: Vec<_> = (0..n)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += upper[i] * x[i + 1];
                }
                v
            })
            .collect();
        let sol = solve_complex_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for (a, b) in sol.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
