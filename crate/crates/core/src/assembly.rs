//! Moving-wall potentials and wavefunctions assembled from a fixed-domain
//! model and a boundary law.
//!
//! With `q = x/L` the physical solution is `ψ = e^φ χ(q, τ)` where
//! `φ = (i/4)(L̇/L)x² − ½ log L` and `χ = Σ c_n Q_n(q) e^{−iε_n τ}` solves the
//! static problem `iχ_τ = −χ_qq + Ṽχ`. The matching physical potential is
//! `V = Ṽ(q)/L² − (L̈/4L)x²`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::boundary::{BoundaryLaw, WallState};
use crate::error::{Error, Result};
use crate::fixed_domain::{PotentialModel, StationaryMode};

/// Relative slack when deciding whether `x` lies inside `[0, L]`.
const BOX_SLACK: f64 = 1e-12;

/// Deliberate convention changes used to show that the checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// Energies without the `π²` factor.
    NoPi2,
    /// `L̇` in place of `L̈` in the quadratic potential term.
    LdotForLddot,
    /// Phase without the `−½ log L` amplitude term.
    NoLogL,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [Mutation::NoPi2, Mutation::LdotForLddot, Mutation::NoLogL];

    pub fn selector(self) -> &'static str {
        match self {
            Mutation::NoPi2 => "no-pi2",
            Mutation::LdotForLddot => "ldot-for-lddot",
            Mutation::NoLogL => "no-logL",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.selector())
    }
}

impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.selector().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown mutation '{s}' (expected no-pi2, ldot-for-lddot or no-logL)"
                ))
            })
    }
}

fn check_in_box(x: f64, length: f64) -> Result<()> {
    if !(x >= -BOX_SLACK * length && x <= length * (1.0 + BOX_SLACK)) {
        return Err(Error::OutsideBox { x, length });
    }
    Ok(())
}

fn phase_of(state: &WallState, x: f64, keep_log: bool) -> Complex64 {
    let re = if keep_log { -0.5 * state.length.ln() } else { 0.0 };
    Complex64::new(re, 0.25 * state.velocity / state.length * x * x)
}

/// Gauge exponent `φ = (i/4)(L̇/L)x² − ½ log L`.
pub fn phase(law: &BoundaryLaw, t: f64, x: f64) -> Result<Complex64> {
    let state = law.eval(t)?;
    check_in_box(x, state.length)?;
    Ok(phase_of(&state, x, true))
}

/// `V(x,t) = Ṽ(x/L)/L² − (L̈/4L)x²`.
///
/// For a model carrying a Case I harmonic term `c₁q²/4` this reduces to
/// `Ṽ(x/L)/L²` when the law has the same `c₁`.
pub fn assemble_potential(model: &PotentialModel, law: &BoundaryLaw, t: f64, x: f64) -> Result<f64> {
    let state = law.eval(t)?;
    check_in_box(x, state.length)?;
    let q = x / state.length;
    Ok(model.potential(q)? / state.length.powi(2) - 0.25 * state.acceleration / state.length * x * x)
}

/// One stationary mode with its complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub mode: StationaryMode,
    pub coefficient: Complex64,
}

/// `ψ(x,t) = Σ c_n e^{φ} Q_n(x/L) e^{−iε_n τ(t)}` on a moving box.
#[derive(Debug, Clone)]
pub struct MovingSolution {
    law: BoundaryLaw,
    model: PotentialModel,
    terms: Vec<Term>,
    mutation: Option<Mutation>,
}

impl MovingSolution {
    /// Single normalized mode `n`.
    pub fn assemble_mode(model: &PotentialModel, law: &BoundaryLaw, n: usize) -> Result<Self> {
        Self::superpose(model, law, &[(n, Complex64::new(1.0, 0.0))])
    }

    /// Linear combination of modes; the coefficients are rescaled so that
    /// `Σ|c_n|² = 1`.
    pub fn superpose(
        model: &PotentialModel,
        law: &BoundaryLaw,
        coeffs: &[(usize, Complex64)],
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidSuperposition("no terms given".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &(n, c) in coeffs {
            if !seen.insert(n) {
                return Err(Error::InvalidSuperposition(format!("duplicate level {n}")));
            }
            if !c.is_finite() {
                return Err(Error::InvalidSuperposition(format!(
                    "non-finite coefficient for level {n}"
                )));
            }
        }
        let norm = coeffs.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidSuperposition("all coefficients are zero".into()));
        }
        let terms = coeffs
            .iter()
            .map(|&(n, c)| {
                Ok(Term {
                    mode: model.mode(n)?,
                    coefficient: c / norm,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            law: law.clone(),
            model: model.clone(),
            terms,
            mutation: None,
        })
    }

    /// Same solution evaluated under a deliberately wrong convention.
    pub fn with_mutation(mut self, mutation: Option<Mutation>) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn law(&self) -> &BoundaryLaw {
        &self.law
    }

    pub fn model(&self) -> &PotentialModel {
        &self.model
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn mutation(&self) -> Option<Mutation> {
        self.mutation
    }

    fn term_energy(&self, term: &Term) -> f64 {
        match self.mutation {
            Some(Mutation::NoPi2) => term.mode.energy() / (PI * PI),
            _ => term.mode.energy(),
        }
    }

    /// Everything that depends on `t` alone, precomputed.
    pub fn frame(&self, t: f64) -> Result<Frame<'_>> {
        let state = self.law.eval(t)?;
        let tau = self.law.tau(t)?;
        let factors = self
            .terms
            .iter()
            .map(|term| term.coefficient * Complex64::from_polar(1.0, -self.term_energy(term) * tau))
            .collect();
        Ok(Frame {
            sol: self,
            t,
            state,
            tau,
            factors,
        })
    }

    pub fn psi(&self, t: f64, x: f64) -> Result<Complex64> {
        self.frame(t)?.psi(x)
    }

    pub fn potential(&self, t: f64, x: f64) -> Result<f64> {
        self.frame(t)?.potential(x)
    }

    /// Static-frame solution `χ(q, τ) = Σ c_n Q_n(q) e^{−iε_n τ}`.
    pub fn chi(&self, q: f64, tau: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| {
                term.coefficient
                    * term.mode.value(q)
                    * Complex64::from_polar(1.0, -self.term_energy(term) * tau)
            })
            .sum()
    }
}

/// A [`MovingSolution`] at one instant.
#[derive(Debug, Clone)]
pub struct Frame<'a> {
    sol: &'a MovingSolution,
    t: f64,
    state: WallState,
    tau: f64,
    factors: Vec<Complex64>,
}

impl Frame<'_> {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> WallState {
        self.state
    }

    pub fn length(&self) -> f64 {
        self.state.length
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `c_n e^{−iε_n τ}` for each term, in the order of [`MovingSolution::terms`].
    pub fn factors(&self) -> &[Complex64] {
        &self.factors
    }

    /// `e^φ` at `x = qL`, honouring the `no-logL` mutation.
    pub fn gauge(&self, q: f64) -> Complex64 {
        let keep_log = self.sol.mutation != Some(Mutation::NoLogL);
        phase_of(&self.state, q * self.state.length, keep_log).exp()
    }

    /// Physical potential at `x = qL` given the fixed-domain value `Ṽ(q)`.
    pub fn potential_from_static(&self, static_value: f64, q: f64) -> f64 {
        let curvature = if self.sol.mutation == Some(Mutation::LdotForLddot) {
            self.state.velocity
        } else {
            self.state.acceleration
        };
        static_value / self.state.length.powi(2) - 0.25 * curvature * self.state.length * q * q
    }

    /// `χ(q)` at this instant.
    pub fn chi(&self, q: f64) -> Complex64 {
        self.sol
            .terms
            .iter()
            .zip(&self.factors)
            .map(|(term, f)| f * term.mode.value(q))
            .sum()
    }

    /// `ψ` at the physical point `x = qL`, for `q ∈ [0, 1]`.
    pub fn psi_at_fraction(&self, q: f64) -> Complex64 {
        self.gauge(q) * self.chi(q)
    }

    pub fn psi(&self, x: f64) -> Result<Complex64> {
        check_in_box(x, self.state.length)?;
        Ok(self.psi_at_fraction(x / self.state.length))
    }

    pub fn potential(&self, x: f64) -> Result<f64> {
        check_in_box(x, self.state.length)?;
        let q = x / self.state.length;
        Ok(self.potential_from_static(self.sol.model.potential(q)?, q))
    }

    pub fn potential_at_fraction(&self, q: f64) -> Result<f64> {
        self.potential(q * self.state.length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::numeric_derivative;
    use crate::quadrature;
    use approx::assert_relative_eq;

    const PI2: f64 = PI * PI;

    fn laws() -> Vec<BoundaryLaw> {
        vec![
            BoundaryLaw::fixed(2.0).unwrap(),
            BoundaryLaw::linear(1.0, 0.5, 2.0).unwrap(),
            BoundaryLaw::case1(1.0, 0.0, 1.0, 2.0).unwrap(),
        ]
    }

    fn families() -> Vec<PotentialModel> {
        vec![
            PotentialModel::square_well(),
            PotentialModel::first_order_partner(),
            PotentialModel::second_order_partner(0).unwrap(),
            PotentialModel::second_order_partner(1).unwrap(),
        ]
    }

    fn norm_sq(sol: &MovingSolution, t: f64) -> f64 {
        let frame = sol.frame(t).unwrap();
        let l = frame.length();
        quadrature::simpson_fn(|q| frame.psi_at_fraction(q).norm_sqr() * l, 0.0, 1.0, 4001).unwrap()
    }

    #[test]
    fn phase_examples() {
        let fixed = BoundaryLaw::fixed(1.0).unwrap();
        assert_eq!(phase(&fixed, 0.5, 0.3).unwrap(), Complex64::new(0.0, 0.0));
        let lin = BoundaryLaw::linear(1.0, 0.5, 2.0).unwrap();
        let p = phase(&lin, 2.0, 1.0).unwrap();
        assert_relative_eq!(p.re, -0.5 * 2f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(p.im, 1.0 / 16.0, epsilon = 1e-15);
        for &x in &[0.0, 0.7, 1.9] {
            assert_relative_eq!(phase(&lin, 2.0, x).unwrap().exp().norm_sqr(), 0.5, epsilon = 1e-15);
        }
        assert!(matches!(phase(&lin, 2.0, 2.1), Err(Error::OutsideBox { .. })));
    }

    #[test]
    fn potential_examples() {
        let fixed = BoundaryLaw::fixed(1.0).unwrap();
        let well = PotentialModel::square_well();
        for &x in &[0.0, 0.3, 1.0] {
            assert_relative_eq!(assemble_potential(&well, &fixed, 0.2, x).unwrap(), -PI2);
        }
        let lin = BoundaryLaw::linear(1.0, 0.5, 2.0).unwrap();
        let susy1 = PotentialModel::first_order_partner();
        assert_relative_eq!(
            assemble_potential(&susy1, &lin, 2.0, 1.0).unwrap(),
            PI2 / 4.0,
            max_relative = 1e-14
        );
        let c1 = BoundaryLaw::case1(1.0, 0.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(
            assemble_potential(&well, &c1, 0.0, 0.5).unwrap(),
            -PI2 - 1.0 / 16.0,
            max_relative = 1e-14
        );
        assert!(assemble_potential(&susy1, &lin, 2.0, 0.0).is_err());
        assert!(matches!(
            assemble_potential(&well, &lin, 2.5, 0.5),
            Err(Error::OutsideHorizon { .. })
        ));
    }

    #[test]
    fn case1_composite_potential_drops_harmonic_term() {
        let law = BoundaryLaw::case1(1.0, 0.0, 1.0, 2.0).unwrap();
        let model = PotentialModel::square_well().with_case1(law.c1().unwrap());
        for &t in &[0.0, 0.7, 1.5] {
            let l = law.length(t).unwrap();
            for &f in &[0.1, 0.5, 0.9] {
                let v = assemble_potential(&model, &law, t, f * l).unwrap();
                assert_relative_eq!(v, -PI2 / (l * l), max_relative = 1e-12);
            }
        }
        assert!(matches!(
            MovingSolution::assemble_mode(&model, &law, 0),
            Err(Error::CaseIComposite)
        ));
    }

    #[test]
    fn static_ground_mode() {
        let law = BoundaryLaw::fixed(1.0).unwrap();
        let sol = MovingSolution::assemble_mode(&PotentialModel::square_well(), &law, 0).unwrap();
        for &t in &[0.0, 0.4, 1.0] {
            for &x in &[0.1, 0.5, 0.8] {
                let v = sol.psi(t, x).unwrap();
                assert_relative_eq!(v.re, 2f64.sqrt() * (PI * x).sin(), epsilon = 1e-14);
                assert!(v.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn linear_law_modulus_at_centre() {
        let law = BoundaryLaw::linear(1.0, 0.5, 2.0).unwrap();
        let sol = MovingSolution::assemble_mode(&PotentialModel::square_well(), &law, 0).unwrap();
        assert_relative_eq!(sol.psi(2.0, 1.0).unwrap().norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn deleted_level_rejected() {
        let law = BoundaryLaw::fixed(1.0).unwrap();
        let model = PotentialModel::second_order_partner(1).unwrap();
        assert!(matches!(
            MovingSolution::assemble_mode(&model, &law, 2),
            Err(Error::DeletedLevel(2))
        ));
    }

    #[test]
    fn superpose_validation() {
        let law = BoundaryLaw::fixed(1.0).unwrap();
        let well = PotentialModel::square_well();
        let one = Complex64::new(1.0, 0.0);
        assert!(matches!(
            MovingSolution::superpose(&well, &law, &[(0, one), (0, one)]),
            Err(Error::InvalidSuperposition(_))
        ));
        assert!(matches!(
            MovingSolution::superpose(&well, &law, &[(0, Complex64::new(0.0, 0.0))]),
            Err(Error::InvalidSuperposition(_))
        ));
        let a = MovingSolution::superpose(&well, &law, &[(1, one * 3.0)]).unwrap();
        let b = MovingSolution::assemble_mode(&well, &law, 1).unwrap();
        assert_eq!(a.psi(0.3, 0.2).unwrap(), b.psi(0.3, 0.2).unwrap());
        let total: f64 = a.terms().iter().map(|t| t.coefficient.norm_sqr()).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn walls_are_nodes() {
        for law in laws() {
            for model in families() {
                let levels = model.admissible_levels(3);
                let coeffs: Vec<_> = levels.iter().map(|&n| (n, Complex64::new(1.0, 0.5))).collect();
                let sol = MovingSolution::superpose(&model, &law, &coeffs).unwrap();
                for &t in &[0.0, 0.9, 2.0] {
                    let frame = sol.frame(t).unwrap();
                    assert!(frame.psi(0.0).unwrap().norm() < 1e-12);
                    assert!(frame.psi(frame.length()).unwrap().norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn norm_is_conserved() {
        for law in laws() {
            for model in families() {
                let levels = model.admissible_levels(3);
                let coeffs: Vec<_> = levels
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| (n, Complex64::new(1.0 + i as f64, -0.3 * i as f64)))
                    .collect();
                let sol = MovingSolution::superpose(&model, &law, &coeffs).unwrap();
                for &t in &[0.0, 0.5, 1.0, 1.5, 2.0] {
                    assert!((norm_sq(&sol, t) - 1.0).abs() < 1e-9, "{:?} t={t}", model.family());
                }
            }
        }
    }

    #[test]
    fn gram_matrix_of_assembled_modes() {
        let law = BoundaryLaw::case1(1.0, 0.0, 1.0, 2.0).unwrap();
        let model = PotentialModel::first_order_partner();
        let sols: Vec<_> = (0..4)
            .map(|n| MovingSolution::assemble_mode(&model, &law, n).unwrap())
            .collect();
        let t = 1.0;
        let frames: Vec<_> = sols.iter().map(|s| s.frame(t).unwrap()).collect();
        let l = frames[0].length();
        for a in 0..4 {
            for b in 0..4 {
                let re = quadrature::simpson_fn(
                    |q| (frames[a].psi_at_fraction(q).conj() * frames[b].psi_at_fraction(q)).re * l,
                    0.0,
                    1.0,
                    4001,
                )
                .unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((re - expect).abs() < 1e-10, "G[{a}][{b}] = {re}");
            }
        }
    }

    #[test]
    fn two_level_beat_period() {
        let law = BoundaryLaw::fixed(2.0).unwrap();
        let c = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
        let sol = MovingSolution::superpose(&PotentialModel::square_well(), &law, &[(0, c), (1, c)]).unwrap();
        let period = 2.0 / (3.0 * PI);
        let x = 0.3;
        let at = |t: f64| sol.psi(t, x).unwrap().norm_sqr();
        for &t in &[0.0, 0.13, 0.4] {
            assert_relative_eq!(at(t), at(t + period), epsilon = 1e-12);
        }
        assert!((at(0.0) - at(0.5 * period)).abs() > 0.5);
    }

    #[test]
    fn gauge_identity() {
        let law = BoundaryLaw::linear(1.0, 0.5, 2.0).unwrap();
        let model = PotentialModel::second_order_partner(0).unwrap();
        let c = Complex64::new(0.6, 0.8);
        let sol = MovingSolution::superpose(&model, &law, &[(2, c), (4, c.conj())]).unwrap();
        let t = 1.3;
        let tau = law.tau(t).unwrap();
        let l = law.length(t).unwrap();
        for &q in &[0.2, 0.45, 0.7] {
            let x = q * l;
            let direct = sol.psi(t, x).unwrap();
            let via = phase(&law, t, x).unwrap().exp() * sol.chi(q, tau);
            assert!((direct - via).norm() < 1e-14);
            // χ solves the static equation i χ_τ = −χ_qq + Ṽχ
            let d = |f: &dyn Fn(f64) -> Complex64, at: f64, order: usize, h: f64| {
                Complex64::new(
                    numeric_derivative(|v| f(v).re, at, order, h),
                    numeric_derivative(|v| f(v).im, at, order, h),
                )
            };
            let chi_qq = d(&|v| sol.chi(v, tau), q, 2, 1e-3);
            let chi_tau = d(&|v| sol.chi(q, v), tau, 1, 1e-4);
            let r = Complex64::i() * chi_tau + chi_qq - model.potential(q).unwrap() * sol.chi(q, tau);
            assert!(r.norm() < 1e-6, "q={q} r={r}");
        }
    }

    #[test]
    fn ground_mode_peak_tracks_half_length() {
        let law = BoundaryLaw::case1(1.0, 0.0, 1.0, 2.0).unwrap();
        let sol = MovingSolution::assemble_mode(&PotentialModel::square_well(), &law, 0).unwrap();
        for &t in &[0.0, 1.0, 2.0] {
            let frame = sol.frame(t).unwrap();
            let l = frame.length();
            let n = 2000;
            let (best, _) = (0..=n)
                .map(|i| (i, frame.psi(l * i as f64 / n as f64).unwrap().norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!((best as f64 / n as f64 * l - 0.5 * l).abs() <= l / n as f64);
        }
    }

    #[test]
    fn mutations_change_the_solution() {
        let law = BoundaryLaw::case1(1.0, 0.0, 1.0, 2.0).unwrap();
        let model = PotentialModel::first_order_partner();
        let base = MovingSolution::assemble_mode(&model, &law, 0).unwrap();
        let t = 1.0;
        let x = 0.6;
        let pi2 = base.clone().with_mutation(Some(Mutation::NoPi2));
        assert!((pi2.psi(t, x).unwrap() - base.psi(t, x).unwrap()).norm() > 1e-2);
        let ldot = base.clone().with_mutation(Some(Mutation::LdotForLddot));
        assert!((ldot.potential(t, x).unwrap() - base.potential(t, x).unwrap()).abs() > 1e-3);
        let nolog = base.clone().with_mutation(Some(Mutation::NoLogL));
        let ratio = nolog.psi(t, x).unwrap().norm() / base.psi(t, x).unwrap().norm();
        assert_relative_eq!(ratio, law.length(t).unwrap().sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn mutation_selectors_round_trip() {
        for m in Mutation::ALL {
            assert_eq!(m.selector().parse::<Mutation>().unwrap(), m);
        }
        assert_eq!("NO-LOGL".parse::<Mutation>().unwrap(), Mutation::NoLogL);
        assert!("no-hbar".parse::<Mutation>().is_err());
    }
}
