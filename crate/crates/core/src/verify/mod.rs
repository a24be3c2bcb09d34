//! Independent numerical checks of the assembled solutions: TDSE residuals
//! in physical coordinates, a Dirichlet eigensolver on `[0, 1]`, and
//! Crank–Nicolson propagation in the rescaled frame.

mod gram;
mod propagate;
mod residual;
mod spectrum;
pub mod suite;
mod tridiag;

use std::io::Write;

use crate::boundary::BoundaryLaw;
use crate::error::{Error, Result};

pub use gram::orthonormality;
pub use propagate::{propagate_cn, PropagationReport};
pub use residual::{tdse_residual, ResidualNorms, SINGULAR_MARGIN};
pub use spectrum::{fd_spectrum, fd_spectrum_raw, MAX_LEVELS, MIN_POINTS};
pub use tridiag::{solve_complex_tridiagonal, SymmetricTridiagonal};

/// Space-time resolution and time window of a check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_x: usize,
    pub n_t: usize,
    pub t0: f64,
    pub t1: f64,
}

impl GridSpec {
    pub const MIN_STEPS: usize = 16;

    pub fn new(n_x: usize, n_t: usize, t0: f64, t1: f64) -> Result<Self> {
        if n_x < Self::MIN_STEPS || n_t < Self::MIN_STEPS {
            return Err(Error::InvalidGrid(format!(
                "n_x and n_t must be at least {}, got {n_x} and {n_t}",
                Self::MIN_STEPS
            )));
        }
        if !(t0.is_finite() && t1.is_finite() && t0 >= 0.0 && t0 < t1) {
            return Err(Error::InvalidGrid(format!(
                "time window must satisfy 0 <= t0 < t1, got [{t0}, {t1}]"
            )));
        }
        Ok(Self { n_x, n_t, t0, t1 })
    }

    /// Both step counts doubled.
    pub fn refined(&self) -> Self {
        Self {
            n_x: 2 * self.n_x,
            n_t: 2 * self.n_t,
            ..*self
        }
    }

    pub fn check_against(&self, law: &BoundaryLaw) -> Result<()> {
        let slack = 1e-12 * law.t_max().max(1.0);
        if self.t1 > law.t_max() + slack {
            return Err(Error::OutsideHorizon {
                t: self.t1,
                t_max: law.t_max(),
            });
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.n_t as f64
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub l2: f64,
    pub max: f64,
    pub order: Option<f64>,
    pub pass: bool,
    pub tolerance: f64,
}

impl CheckRecord {
    pub const CSV_HEADER: [&'static str; 6] = ["name", "l2", "max", "order", "pass", "tolerance"];

    /// Fields in [`Self::CSV_HEADER`] order, numbers with 17 significant digits.
    pub fn csv_fields(&self) -> [String; 6] {
        [
            self.name.clone(),
            format!("{:.16e}", self.l2),
            format!("{:.16e}", self.max),
            self.order.map_or_else(String::new, |o| format!("{o:.16e}")),
            self.pass.to_string(),
            format!("{:.16e}", self.tolerance),
        ]
    }
}

/// Aggregated outcome of one or more checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub residual_l2: f64,
    pub residual_max: f64,
    pub order_estimate: Option<f64>,
    pub details: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.details.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.details.iter().filter(|r| !r.pass)
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.residual_l2 = self.residual_l2.max(other.residual_l2);
        self.residual_max = self.residual_max.max(other.residual_max);
        if self.order_estimate.is_none() {
            self.order_estimate = other.order_estimate;
        }
        self.details.extend(other.details);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CheckRecord::CSV_HEADER)?;
        for r in &self.details {
            w.write_record(r.csv_fields())?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Convergence order from errors at step `h` and `h/2`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// `|a − b| ≤ tol · max(|b|, 1)`: relative, falling back to absolute near zero.
pub fn close_relative(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(15, 64, 0.0, 1.0).is_err());
        assert!(GridSpec::new(64, 64, 1.0, 1.0).is_err());
        assert!(GridSpec::new(64, 64, -0.1, 1.0).is_err());
        let g = GridSpec::new(64, 32, 0.0, 1.0).unwrap();
        assert_eq!(g.refined().n_x, 128);
        assert_eq!(g.dt(), 1.0 / 32.0);
        let law = BoundaryLaw::fixed(0.5).unwrap();
        assert!(matches!(g.check_against(&law), Err(Error::OutsideHorizon { .. })));
    }

    #[test]
    fn csv_report_format() {
        let report = VerificationReport {
            details: vec![CheckRecord {
                name: "residual:well:linear:1,0.5".into(),
                l2: 0.1,
                max: 1.0,
                order: None,
                pass: true,
                tolerance: 1e-3,
            }],
            ..Default::default()
        };
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "name,l2,max,order,pass,tolerance\n\
             \"residual:well:linear:1,0.5\",1.0000000000000001e-1,1.0000000000000000e0,,true,1.0000000000000000e-3\n"
        );
    }

    #[test]
    fn relative_closeness_near_zero() {
        assert!(close_relative(5e-5, 0.0, 1e-4));
        assert!(!close_relative(2e-4, 0.0, 1e-4));
        assert!(close_relative(100.005, 100.0, 1e-4));
    }
}
