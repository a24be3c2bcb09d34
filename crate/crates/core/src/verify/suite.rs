//! Verification suites run by the command-line front end.
//!
//! A suite covers one model on one boundary law: TDSE residuals, the
//! finite-difference spectrum, Gram matrices, the Darboux reconstruction
//! and Crank–Nicolson propagation. Each check yields one or more
//! [`CheckRecord`]s.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::gram::gram_deviation;
use super::{
    fd_spectrum, observed_order, propagate_cn, tdse_residual, CheckRecord, GridSpec,
    VerificationReport,
};
use crate::assembly::{MovingSolution, Mutation};
use crate::boundary::BoundaryLaw;
use crate::darboux::{
    apply_a, normalized, superpotential_from_ground, IntertwinerSecond, LogWronskianRoute, SineMode,
};
use crate::error::{Error, Result};
use crate::fixed_domain::{Family, PotentialModel};

/// Pass/fail thresholds. All are relative unless stated otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Expected residual convergence order and the allowed deviation.
    pub residual_order: f64,
    pub residual_order_band: f64,
    /// Bound on `max|R| / max|ψ_xx|`.
    pub residual_relative: f64,
    pub spectrum_regular: f64,
    pub spectrum_singular: f64,
    /// Distance (relative to `max(|ε|, π²)`) below which a computed level
    /// counts as a deleted level reappearing.
    pub deletion: f64,
    /// Absolute bound on `max|G − I|`.
    pub gram: f64,
    pub norm_drift: f64,
    /// Required error reduction when both propagation steps are halved.
    pub propagation_ratio: f64,
    pub darboux_potential: f64,
    /// Absolute max-norm bound on normalized Darboux-built modes.
    pub darboux_mode: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual_order: 2.0,
            residual_order_band: 0.3,
            residual_relative: 1e-3,
            spectrum_regular: 1e-4,
            spectrum_singular: 1e-2,
            deletion: 1e-2,
            gram: 1e-8,
            norm_drift: 1e-10,
            propagation_ratio: 3.5,
            darboux_potential: 1e-6,
            darboux_mode: 1e-8,
        }
    }
}

/// Resolution and options shared by every suite in a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Number of admissible modes checked per family.
    pub levels: usize,
    pub residual: GridSpec,
    /// Spatial resolution and step count for propagation; the window is
    /// always `[0, t_max]`.
    pub propagation_nx: usize,
    pub propagation_nt: usize,
    pub spectrum_nx: usize,
    /// Number of sample times for the Gram check, spread over `[0, t_max]`.
    pub gram_times: usize,
    pub tolerances: Tolerances,
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            levels: 3,
            residual: GridSpec {
                n_x: 256,
                n_t: 256,
                t0: 0.0,
                t1: 0.05,
            },
            propagation_nx: 256,
            propagation_nt: 2048,
            spectrum_nx: 2000,
            gram_times: 5,
            tolerances: Tolerances::default(),
            mutation: None,
        }
    }
}

/// Number of samples on `[0.05, 0.95]` for the Darboux comparisons.
pub const DARBOUX_SAMPLES: usize = 500;

fn darboux_grid() -> impl Iterator<Item = f64> {
    (0..DARBOUX_SAMPLES).map(|i| 0.05 + 0.9 * i as f64 / (DARBOUX_SAMPLES - 1) as f64)
}

fn record(name: String, l2: f64, max: f64, order: Option<f64>, pass: bool, tolerance: f64) -> CheckRecord {
    CheckRecord {
        name,
        l2,
        max,
        order,
        pass,
        tolerance,
    }
}

fn residual_checks(model: &PotentialModel, law: &BoundaryLaw, cfg: &SuiteConfig) -> Result<VerificationReport> {
    let tol = &cfg.tolerances;
    let mut out = VerificationReport::default();
    for n in model.admissible_levels(cfg.levels) {
        let sol = MovingSolution::assemble_mode(model, law, n)?.with_mutation(cfg.mutation);
        let (report, [coarse, _]) = tdse_residual(&sol, &cfg.residual)?;
        let order = report.order_estimate.unwrap_or(f64::NAN);
        let tag = format!("{}:{law}:n={n}", model.family());
        let in_band = (order - tol.residual_order).abs() <= tol.residual_order_band;
        out.details.push(record(
            format!("residual-order:{tag}"),
            coarse.l2,
            coarse.max,
            Some(order),
            in_band,
            tol.residual_order_band,
        ));
        out.details.push(record(
            format!("residual-relative:{tag}"),
            coarse.relative_l2(),
            coarse.relative_max(),
            None,
            coarse.relative_max() <= tol.residual_relative,
            tol.residual_relative,
        ));
        out.residual_l2 = out.residual_l2.max(coarse.l2);
        out.residual_max = out.residual_max.max(coarse.max);
        out.order_estimate = Some(out.order_estimate.map_or(order, |o: f64| o.min(order)));
    }
    Ok(out)
}

/// Finite-difference spectrum against the closed-form levels, plus the
/// absence of deleted levels.
pub fn spectrum_checks(model: &PotentialModel, cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let tol = &cfg.tolerances;
    let family = model.family();
    let levels = model.admissible_levels(cfg.levels);
    let computed = fd_spectrum(model, cfg.spectrum_nx, levels.len())?;
    let errors: Vec<f64> = levels
        .iter()
        .zip(&computed)
        .map(|(&n, &e)| {
            let exact = model.energy(n)?;
            Ok((e - exact).abs() / exact.abs().max(1.0))
        })
        .collect::<Result<_>>()?;
    let bound = if family.is_singular() {
        tol.spectrum_singular
    } else {
        tol.spectrum_regular
    };
    let max = errors.iter().cloned().fold(0.0, f64::max);
    let rms = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len().max(1) as f64).sqrt();
    let mut out = vec![record(format!("spectrum:{family}"), rms, max, None, max <= bound, bound)];
    if !family.deleted_levels().is_empty() {
        let closest = family
            .deleted_levels()
            .iter()
            .flat_map(|&d| {
                let target = family.energy(d);
                computed
                    .iter()
                    .map(move |e| (e - target).abs() / target.abs().max(PI * PI))
            })
            .fold(f64::INFINITY, f64::min);
        out.push(record(
            format!("deletion:{family}"),
            closest,
            closest,
            None,
            closest > tol.deletion,
            tol.deletion,
        ));
    }
    Ok(out)
}

fn gram_check(model: &PotentialModel, law: &BoundaryLaw, cfg: &SuiteConfig) -> Result<CheckRecord> {
    let sols = model
        .admissible_levels(cfg.levels.max(2))
        .into_iter()
        .map(|n| Ok(MovingSolution::assemble_mode(model, law, n)?.with_mutation(cfg.mutation)))
        .collect::<Result<Vec<_>>>()?;
    let samples = cfg.gram_times.max(1);
    let deviations = (0..samples)
        .map(|k| {
            let t = if samples == 1 {
                0.0
            } else {
                law.t_max() * k as f64 / (samples - 1) as f64
            };
            gram_deviation(&sols, t)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max = deviations.iter().cloned().fold(0.0, f64::max);
    let rms = (deviations.iter().map(|d| d * d).sum::<f64>() / samples as f64).sqrt();
    Ok(record(
        format!("orthonormality:{}:{law}", model.family()),
        rms,
        max,
        None,
        max <= cfg.tolerances.gram,
        cfg.tolerances.gram,
    ))
}

fn compare_on_grid<F, G>(f: F, g: G) -> (f64, f64)
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let (mut sum, mut max) = (0.0, 0.0f64);
    for q in darboux_grid() {
        let d = (f(q) - g(q)).abs();
        sum += d * d;
        max = max.max(d);
    }
    ((sum / DARBOUX_SAMPLES as f64).sqrt(), max)
}

/// Rebuilds the family's potential and modes from square-well seeds and
/// compares them with the catalog on `[0.05, 0.95]`.
pub fn darboux_checks(model: &PotentialModel, cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    if model.case1_c1().is_some() {
        return Err(Error::CaseIComposite);
    }
    let tol = &cfg.tolerances;
    let family = model.family();
    let catalog_v = |q: f64| model.potential(q).expect("interior sample");
    // scaled difference |a − b| / max(|b|, 1)
    let scaled = |v: &dyn Fn(f64) -> f64| {
        compare_on_grid(|q| v(q) / catalog_v(q).abs().max(1.0), |q| catalog_v(q) / catalog_v(q).abs().max(1.0))
    };
    let levels = model.admissible_levels(cfg.levels);
    let mut mode_diffs = Vec::new();
    let (pot_l2, pot_max) = match family {
        Family::SquareWell | Family::FirstOrderPartner => {
            let w = superpotential_from_ground(Arc::new(SineMode::square_well(0)))?;
            for &n in &levels {
                let reference = model.mode(n)?;
                let diff = if family == Family::SquareWell {
                    let base = SineMode::square_well(n);
                    let u = normalized(|q: f64| crate::darboux::Eigenfunction::value(&base, q))?;
                    compare_on_grid(u, |q| reference.value(q))
                } else {
                    let base = SineMode::square_well(n + 1);
                    let u = normalized(apply_a(&w, &base))?;
                    compare_on_grid(u, |q| reference.value(q))
                };
                mode_diffs.push(diff);
            }
            if family == Family::SquareWell {
                scaled(&|q| w.lower_potential(q) + w.seed_energy())
            } else {
                scaled(&|q| w.upper_potential(q))
            }
        }
        Family::SecondOrderPartner(pair) => {
            let itw = IntertwinerSecond::square_well(pair.index())?;
            for &n in &levels {
                let reference = model.mode(n)?;
                let base = SineMode::square_well(n);
                let u = normalized(itw.apply_d(&base)?)?;
                mode_diffs.push(compare_on_grid(u, |q| reference.value(q)));
            }
            let v2 = itw.partner_potential(|_| -PI * PI, LogWronskianRoute::Numerical);
            scaled(&|q| v2(q).expect("interior sample"))
        }
    };
    let mode_max = mode_diffs.iter().map(|d| d.1).fold(0.0, f64::max);
    let mode_l2 = mode_diffs.iter().map(|d| d.0).fold(0.0, f64::max);
    Ok(vec![
        record(
            format!("darboux-potential:{family}"),
            pot_l2,
            pot_max,
            None,
            pot_max <= tol.darboux_potential,
            tol.darboux_potential,
        ),
        record(
            format!("darboux-modes:{family}"),
            mode_l2,
            mode_max,
            None,
            mode_max <= tol.darboux_mode,
            tol.darboux_mode,
        ),
    ])
}

fn propagation_checks(model: &PotentialModel, law: &BoundaryLaw, cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let tol = &cfg.tolerances;
    let one = Complex64::new(1.0, 0.0);
    let coeffs: Vec<_> = model.admissible_levels(cfg.levels).into_iter().map(|n| (n, one)).collect();
    let packet = MovingSolution::superpose(model, law, &coeffs)?.with_mutation(cfg.mutation);
    let grid = GridSpec::new(cfg.propagation_nx, cfg.propagation_nt, 0.0, law.t_max())?;
    let coarse = propagate_cn(model, law, &packet, &grid)?;
    let fine = propagate_cn(model, law, &packet, &grid.refined())?;
    let ratio = coarse.l2_error / fine.l2_error;
    let tag = format!("{}:{law}", model.family());
    let drift = coarse.norm_drift.max(fine.norm_drift);
    Ok(vec![
        record(
            format!("propagation:{tag}"),
            coarse.l2_error,
            coarse.max_error,
            Some(observed_order(coarse.l2_error, fine.l2_error)),
            ratio >= tol.propagation_ratio,
            tol.propagation_ratio,
        ),
        record(
            format!("norm-drift:{tag}"),
            drift,
            drift,
            None,
            drift <= tol.norm_drift,
            tol.norm_drift,
        ),
    ])
}

/// Law-dependent checks for one model on one law.
pub fn run_suite(model: &PotentialModel, law: &BoundaryLaw, cfg: &SuiteConfig) -> Result<VerificationReport> {
    if model.case1_c1().is_some() {
        return Err(Error::CaseIComposite);
    }
    let mut report = residual_checks(model, law, cfg)?;
    report.details.push(gram_check(model, law, cfg)?);
    report.details.extend(propagation_checks(model, law, cfg)?);
    Ok(report)
}

/// Every model on every law, plus the law-independent spectrum and Darboux
/// checks once per model. Jobs run in parallel; records keep the input order.
pub fn run_matrix(models: &[PotentialModel], laws: &[BoundaryLaw], cfg: &SuiteConfig) -> Result<VerificationReport> {
    let static_reports = models
        .par_iter()
        .map(|m| {
            let mut r = VerificationReport::default();
            r.details.extend(spectrum_checks(m, cfg)?);
            r.details.extend(darboux_checks(m, cfg)?);
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|m| (0..laws.len()).map(move |l| (m, l)))
        .collect();
    let law_reports = jobs
        .par_iter()
        .map(|&(m, l)| run_suite(&models[m], &laws[l], cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut report = VerificationReport::default();
    for (m, stat) in static_reports.into_iter().enumerate() {
        report.merge(stat);
        for (j, r) in law_reports.iter().enumerate() {
            if jobs[j].0 == m {
                report.merge(r.clone());
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SuiteConfig {
        SuiteConfig {
            residual: GridSpec::new(128, 128, 0.0, 0.02).unwrap(),
            propagation_nx: 64,
            propagation_nt: 256,
            spectrum_nx: 400,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn darboux_reconstruction_passes_for_all_families() {
        for family in Family::ALL {
            let model = PotentialModel::new(family);
            for r in darboux_checks(&model, &quick()).unwrap() {
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn spectrum_records_deletion() {
        let model = PotentialModel::second_order_partner(0).unwrap();
        let records = spectrum_checks(&model, &quick()).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|r| r.pass), "{records:?}");
    }

    #[test]
    fn well_suite_passes_and_mutation_fails() {
        let law = BoundaryLaw::linear(1.0, 0.5, 1.0).unwrap();
        let model = PotentialModel::square_well();
        let report = run_suite(&model, &law, &quick()).unwrap();
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        let cfg = SuiteConfig {
            mutation: Some(Mutation::NoLogL),
            ..quick()
        };
        let report = run_suite(&model, &law, &cfg).unwrap();
        assert!(!report.passed());
    }
}
