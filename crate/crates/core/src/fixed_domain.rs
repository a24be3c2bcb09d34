//! Catalog of exactly solvable potentials on the unit interval `q ∈ [0, 1]`.
//!
//! Units are `ħ = 2m = 1`, so the stationary problem is
//! `−Q″ + V(q) Q = ε Q` with `Q(0) = Q(1) = 0`. The catalog holds the
//! square well `V = −π²` and three of its SUSY partners:
//!
//! | family               | potential                                   | levels            |
//! |----------------------|---------------------------------------------|-------------------|
//! | `SquareWell`         | `−π²`                                       | `n(n+2)π²`        |
//! | `FirstOrderPartner`  | `π²(2 csc²πq − 1)`                          | `(n+1)(n+3)π²`    |
//! | `SecondOrderPartner` j=0 | `π²(6 csc²πq − 1)`                      | `n(n+2)π²`, n ≥ 2 |
//! | `SecondOrderPartner` j=1 | rational trig form, see [`PotentialModel::potential`] | `n(n+2)π²`, n ∉ {1,2} |
//!
//! Mode shapes are evaluated through Gegenbauer/Chebyshev forms that are
//! algebraically identical to the textbook trig expressions (available via
//! [`PotentialModel::closed_form_shape`]) but keep full absolute accuracy
//! next to the walls, where the partner modes vanish like `q²` or `q³`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::special::{chebyshev_u, gegenbauer};

const PI2: f64 = PI * PI;

/// Which pair of consecutive square-well levels seeds a second-order partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeedPair {
    /// Levels 0 and 1.
    J0,
    /// Levels 1 and 2.
    J1,
}

impl SeedPair {
    pub fn from_index(j: usize) -> Result<Self> {
        match j {
            0 => Ok(Self::J0),
            1 => Ok(Self::J1),
            other => Err(Error::UnsupportedSeed(other)),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Self::J0 => 0,
            Self::J1 => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    SquareWell,
    FirstOrderPartner,
    SecondOrderPartner(SeedPair),
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::SquareWell,
        Family::FirstOrderPartner,
        Family::SecondOrderPartner(SeedPair::J0),
        Family::SecondOrderPartner(SeedPair::J1),
    ];

    /// Selector string used by the command line.
    pub fn selector(self) -> &'static str {
        match self {
            Family::SquareWell => "well",
            Family::FirstOrderPartner => "susy1",
            Family::SecondOrderPartner(SeedPair::J0) => "susy2-j0",
            Family::SecondOrderPartner(SeedPair::J1) => "susy2-j1",
        }
    }

    /// Potentials with a `csc²` wall singularity.
    pub fn is_singular(self) -> bool {
        !matches!(self, Family::SquareWell)
    }

    pub fn deleted_levels(self) -> &'static [usize] {
        match self {
            Family::SecondOrderPartner(SeedPair::J0) => &[0, 1],
            Family::SecondOrderPartner(SeedPair::J1) => &[1, 2],
            _ => &[],
        }
    }

    pub fn energy(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Family::FirstOrderPartner => (n + 1.0) * (n + 3.0) * PI2,
            _ => n * (n + 2.0) * PI2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.selector())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.selector() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown family '{s}' (expected well, susy1, susy2-j0 or susy2-j1)"
                ))
            })
    }
}

/// A fixed-domain potential together with its discrete spectrum.
#[derive(Debug, Clone)]
pub struct PotentialModel {
    family: Family,
    case1_c1: Option<f64>,
    norms: Arc<RwLock<HashMap<usize, f64>>>,
}

impl PartialEq for PotentialModel {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.case1_c1 == other.case1_c1
    }
}

impl PotentialModel {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            case1_c1: None,
            norms: Arc::default(),
        }
    }

    pub fn square_well() -> Self {
        Self::new(Family::SquareWell)
    }

    pub fn first_order_partner() -> Self {
        Self::new(Family::FirstOrderPartner)
    }

    pub fn second_order_partner(j: usize) -> Result<Self> {
        Ok(Self::new(Family::SecondOrderPartner(SeedPair::from_index(j)?)))
    }

    /// Adds the Case I harmonic term `(c1/4) q²` to the potential. The
    /// composite has no closed-form modes.
    pub fn with_case1(mut self, c1: f64) -> Self {
        self.case1_c1 = Some(c1);
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn case1_c1(&self) -> Option<f64> {
        self.case1_c1
    }

    pub fn deleted_levels(&self) -> &'static [usize] {
        self.family.deleted_levels()
    }

    pub fn is_admissible(&self, n: usize) -> bool {
        !self.deleted_levels().contains(&n)
    }

    /// The first `count` admissible level indices.
    pub fn admissible_levels(&self, count: usize) -> Vec<usize> {
        (0..).filter(|&n| self.is_admissible(n)).take(count).collect()
    }

    /// Closed-form energy of level `n`.
    pub fn energy(&self, n: usize) -> Result<f64> {
        self.check_level(n)?;
        Ok(self.family.energy(n))
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if self.is_admissible(n) {
            Ok(())
        } else {
            Err(Error::DeletedLevel(n))
        }
    }

    /// Potential at `q` (with the Case I term when configured).
    ///
    /// The j = 1 second-order partner is
    /// `π² [135 + 160 cos 2πq + 4 cos 4πq + cos 6πq] csc²πq / (2 (3 + 2 cos 2πq)²)`.
    pub fn potential(&self, q: f64) -> Result<f64> {
        let base = base_potential(self.family, q)?;
        Ok(base + self.case1_c1.map_or(0.0, |c1| 0.25 * c1 * q * q))
    }

    /// Unnormalized mode shape in its textbook trig form.
    ///
    /// * well: `sin((n+1)πq)`
    /// * first-order partner: `π[(n+2) cos((n+2)πq) − cot(πq) sin((n+2)πq)]`
    /// * j = 0: `π² sin((n+1)πq){3 csc²πq − (n²+2n+3)} − 3(n+1)π² cot(πq) cos((n+1)πq)`
    /// * j = 1: `π² csc²πq / (2(3 + 2cos2πq)) · (cos πq {(n²−3n+2) sin((n+4)πq)
    ///   + (n²+7n+12) sin((n−2)πq)} − 2(n²+2n−8) sin((n+1)πq))`
    ///
    /// Loses accuracy close to the walls; use [`StationaryMode::value`]
    /// for evaluation.
    pub fn closed_form_shape(&self, n: usize, q: f64) -> Result<f64> {
        self.check_level(n)?;
        if self.family.is_singular() && !(q > 0.0 && q < 1.0) {
            return Err(Error::Singular(q));
        }
        let th = PI * q;
        let nf = n as f64;
        Ok(match self.family {
            Family::SquareWell => ((nf + 1.0) * th).sin(),
            Family::FirstOrderPartner => {
                let k = nf + 2.0;
                PI * (k * (k * th).cos() - (k * th).sin() / th.tan())
            }
            Family::SecondOrderPartner(SeedPair::J0) => {
                let k = nf + 1.0;
                let csc2 = th.sin().powi(-2);
                PI2 * (k * th).sin() * (3.0 * csc2 - (nf * nf + 2.0 * nf + 3.0))
                    - 3.0 * k * PI2 * (k * th).cos() / th.tan()
            }
            Family::SecondOrderPartner(SeedPair::J1) => {
                let csc2 = th.sin().powi(-2);
                let bracket = th.cos()
                    * ((nf * nf - 3.0 * nf + 2.0) * ((nf + 4.0) * th).sin()
                        + (nf * nf + 7.0 * nf + 12.0) * ((nf - 2.0) * th).sin())
                    - 2.0 * (nf * nf + 2.0 * nf - 8.0) * ((nf + 1.0) * th).sin();
                PI2 * csc2 / (2.0 * (3.0 + 2.0 * (2.0 * th).cos())) * bracket
            }
        })
    }

    /// Normalized eigenpair for level `n`.
    pub fn mode(&self, n: usize) -> Result<StationaryMode> {
        self.check_level(n)?;
        if self.case1_c1.is_some() {
            return Err(Error::CaseIComposite);
        }
        let factor = self.norm_factor(n)?;
        Ok(StationaryMode {
            family: self.family,
            n,
            energy: self.family.energy(n),
            factor,
        })
    }

    /// The first `count` admissible modes.
    pub fn modes(&self, count: usize) -> Result<Vec<StationaryMode>> {
        self.admissible_levels(count)
            .into_iter()
            .map(|n| self.mode(n))
            .collect()
    }

    fn norm_factor(&self, n: usize) -> Result<f64> {
        if self.family == Family::SquareWell {
            return Ok(std::f64::consts::SQRT_2);
        }
        if let Some(&f) = self.norms.read().expect("norm cache poisoned").get(&n) {
            return Ok(f);
        }
        let family = self.family;
        let integral = quadrature::integrate(
            |q| stable_shape(family, n, q).powi(2),
            0.0,
            1.0,
            Tolerance {
                abs: 0.0,
                rel: 1e-14,
                max_intervals: 4000,
            },
        )?;
        // sign convention: positive just inside q = 0
        let probe = (0.1 / (n as f64 + 2.0)).min(1e-3);
        let sign = stable_shape(family, n, probe).signum();
        let factor = sign / integral.sqrt();
        self.norms
            .write()
            .expect("norm cache poisoned")
            .insert(n, factor);
        Ok(factor)
    }
}

fn base_potential(family: Family, q: f64) -> Result<f64> {
    if family == Family::SquareWell {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidArgument(format!("q = {q} outside [0, 1]")));
        }
        return Ok(-PI2);
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Singular(q));
    }
    // reflect into (0, 1/2]; all catalog potentials are symmetric about 1/2
    let th = PI * q.min(1.0 - q);
    let csc2 = th.sin().powi(-2);
    Ok(match family {
        Family::FirstOrderPartner => PI2 * (2.0 * csc2 - 1.0),
        Family::SecondOrderPartner(SeedPair::J0) => PI2 * (6.0 * csc2 - 1.0),
        Family::SecondOrderPartner(SeedPair::J1) => {
            let c2 = (2.0 * th).cos();
            let num = 135.0 + 160.0 * c2 + 4.0 * (4.0 * th).cos() + (6.0 * th).cos();
            PI2 * num * csc2 / (2.0 * (3.0 + 2.0 * c2).powi(2))
        }
        Family::SquareWell => unreachable!(),
    })
}

/// Unnormalized, numerically stable mode shape on `[0, 1]`.
///
/// Evaluated on `[0, 1/2]` and reflected with parity `(−1)ⁿ`.
fn stable_shape(family: Family, n: usize, q: f64) -> f64 {
    let (s, parity) = if q > 0.5 {
        (1.0 - q, if n.is_multiple_of(2) { 1.0 } else { -1.0 })
    } else {
        (q, 1.0)
    };
    parity * half_shape(family, n, PI * s)
}

fn half_shape(family: Family, n: usize, th: f64) -> f64 {
    let (sin, u) = (th.sin(), th.cos());
    let n = n as isize;
    match family {
        Family::SquareWell => ((n + 1) as f64 * th).sin(),
        // = −(2π)⁻¹ × first-order closed form
        Family::FirstOrderPartner => sin * sin * gegenbauer(n, 2.0, u),
        // = (8π²)⁻¹ × j = 0 closed form
        Family::SecondOrderPartner(SeedPair::J0) => sin.powi(3) * gegenbauer(n - 2, 3.0, u),
        // = π⁻² × j = 1 closed form
        Family::SecondOrderPartner(SeedPair::J1) => {
            let m = (n + 1) as f64;
            let um = chebyshev_u(n, u);
            let du = 2.0 * gegenbauer(n - 1, 2.0, u);
            let bracket = (4.0 - m * m) * um
                + 5.0 * (4.0 * u * u - 1.0) * (u * du - um) / (1.0 + 4.0 * u * u);
            sin * bracket
        }
    }
}

/// One normalized eigenpair `(ε_n, Q_n)` with `∫₀¹ Q_n² = 1` and
/// `Q_n > 0` just inside `q = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryMode {
    family: Family,
    n: usize,
    energy: f64,
    factor: f64,
}

impl StationaryMode {
    pub fn index(&self) -> usize {
        self.n
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// `Q_n(q)`; `q` is clamped to `[0, 1]`.
    pub fn value(&self, q: f64) -> f64 {
        self.factor * stable_shape(self.family, self.n, q.clamp(0.0, 1.0))
    }

    pub fn eval(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidArgument(format!("q = {q} outside [0, 1]")));
        }
        Ok(self.value(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::SQRT_2;

    fn all_models() -> Vec<PotentialModel> {
        Family::ALL.into_iter().map(PotentialModel::new).collect()
    }

    #[test]
    fn square_well_spectrum() {
        let m = PotentialModel::square_well();
        assert_eq!(m.mode(0).unwrap().energy(), 0.0);
        assert_relative_eq!(m.mode(1).unwrap().energy(), 3.0 * PI2);
        assert_relative_eq!(m.mode(1).unwrap().energy(), 29.608813203268074);
        assert_relative_eq!(m.mode(0).unwrap().value(0.5), SQRT_2, epsilon = 1e-15);
        let m2 = m.mode(2).unwrap();
        assert_relative_eq!(m2.energy(), 8.0 * PI2);
        for &q in &[0.1, 0.33, 0.5, 0.8] {
            assert_relative_eq!(m2.value(q), SQRT_2 * (3.0 * PI * q).sin(), epsilon = 1e-14);
        }
        assert_eq!(m.potential(0.0).unwrap(), -PI2);
        assert_eq!(m.potential(1.0).unwrap(), -PI2);
    }

    #[test]
    fn partner_potentials_at_midpoint() {
        let p1 = PotentialModel::first_order_partner();
        assert_relative_eq!(p1.potential(0.5).unwrap(), PI2, epsilon = 1e-13);
        let p20 = PotentialModel::second_order_partner(0).unwrap();
        assert_relative_eq!(p20.potential(0.5).unwrap(), 5.0 * PI2, epsilon = 1e-13);
        let p21 = PotentialModel::second_order_partner(1).unwrap();
        assert_relative_eq!(p21.potential(0.5).unwrap(), -11.0 * PI2, epsilon = 1e-13);
    }

    #[test]
    fn singular_potentials_diverge_like_inverse_square() {
        let p1 = PotentialModel::first_order_partner();
        for &q in &[1e-3, 1e-4, 1e-5] {
            let v = p1.potential(q).unwrap();
            assert_relative_eq!(v * q * q, 2.0, max_relative = 1e-5);
        }
        assert!(matches!(p1.potential(0.0), Err(Error::Singular(_))));
        assert!(matches!(p1.potential(1.0), Err(Error::Singular(_))));
    }

    #[test]
    fn case1_composite_adds_harmonic_term() {
        let m = PotentialModel::square_well().with_case1(1.0);
        assert_relative_eq!(m.potential(0.5).unwrap(), -PI2 + 1.0 / 16.0);
        assert_eq!(m.mode(0), Err(Error::CaseIComposite));
    }

    #[test]
    fn deleted_levels_and_indexing() {
        let p20 = PotentialModel::second_order_partner(0).unwrap();
        assert_eq!(p20.mode(0), Err(Error::DeletedLevel(0)));
        assert_eq!(p20.mode(1), Err(Error::DeletedLevel(1)));
        assert_eq!(p20.admissible_levels(3), vec![2, 3, 4]);
        let p21 = PotentialModel::second_order_partner(1).unwrap();
        assert_eq!(p21.admissible_levels(4), vec![0, 3, 4, 5]);
        assert_eq!(p21.mode(0).unwrap().energy(), 0.0);
        assert!(matches!(
            PotentialModel::second_order_partner(2),
            Err(Error::UnsupportedSeed(2))
        ));
        let p1 = PotentialModel::first_order_partner();
        assert_relative_eq!(p1.mode(0).unwrap().energy(), 3.0 * PI2);
    }

    #[test]
    fn unnormalized_j0_shape_at_midpoint() {
        let p20 = PotentialModel::second_order_partner(0).unwrap();
        assert_relative_eq!(p20.closed_form_shape(2, 0.5).unwrap(), 8.0 * PI2, epsilon = 1e-12);
    }

    #[test]
    fn stable_forms_match_closed_forms() {
        for model in all_models() {
            for n in model.admissible_levels(7) {
                let mode = model.mode(n).unwrap();
                // fix the scale from one interior point, compare elsewhere
                let scale = model.closed_form_shape(n, 0.123).unwrap() / mode.value(0.123);
                for i in 1..40 {
                    let q = i as f64 / 40.0;
                    let cf = model.closed_form_shape(n, q).unwrap();
                    assert!(
                        (cf - scale * mode.value(q)).abs() < 1e-9 * scale.abs(),
                        "{} n={n} q={q}",
                        model.family()
                    );
                }
            }
        }
    }

    #[test]
    fn modes_vanish_at_walls() {
        for model in all_models() {
            for mode in model.modes(5).unwrap() {
                assert!(mode.value(0.0).abs() < 1e-15);
                assert!(mode.value(1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn orthonormal_within_each_family() {
        for model in all_models() {
            let modes = model.modes(6).unwrap();
            for a in &modes {
                for b in &modes {
                    let g = quadrature::integrate(
                        |q| a.value(q) * b.value(q),
                        0.0,
                        1.0,
                        Tolerance::absolute(1e-13),
                    )
                    .unwrap();
                    let target = if a.index() == b.index() { 1.0 } else { 0.0 };
                    assert!((g - target).abs() < 1e-10, "{} {a:?} {b:?}: {g}", model.family());
                }
            }
        }
    }

    #[test]
    fn kth_mode_has_k_nodes_and_positive_start() {
        for model in all_models() {
            for (k, mode) in model.modes(6).unwrap().into_iter().enumerate() {
                assert!(mode.value(1e-3) > 0.0);
                let samples: Vec<f64> = (1..4000).map(|i| mode.value(i as f64 / 4000.0)).collect();
                let nodes = samples.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
                assert_eq!(nodes, k, "{} mode {}", model.family(), mode.index());
            }
        }
    }

    #[test]
    fn eigen_residual_converges_at_second_order() {
        fn residual(model: &PotentialModel, mode: &StationaryMode, nx: usize) -> f64 {
            let h = 1.0 / nx as f64;
            let mut sum = 0.0;
            for i in 1..nx {
                let q = i as f64 * h;
                let d2 = (mode.value(q - h) - 2.0 * mode.value(q) + mode.value(q + h)) / (h * h);
                let r = -d2 + (model.potential(q).unwrap() - mode.energy()) * mode.value(q);
                sum += r * r * h;
            }
            sum.sqrt()
        }
        for model in all_models() {
            for mode in model.modes(4).unwrap() {
                let coarse = residual(&model, &mode, 400);
                let fine = residual(&model, &mode, 800);
                let order = (coarse / fine).log2();
                assert!((order - 2.0).abs() < 0.3, "{} {}: {order}", model.family(), mode.index());
            }
        }
    }

    #[test]
    fn missing_pi_squared_energy_is_not_an_eigenvalue() {
        let model = PotentialModel::first_order_partner();
        let mode = model.mode(0).unwrap();
        let h = 1e-3;
        let q = 0.3;
        let d2 = (mode.value(q - h) - 2.0 * mode.value(q) + mode.value(q + h)) / (h * h);
        let good = -d2 + (model.potential(q).unwrap() - mode.energy()) * mode.value(q);
        let bad = -d2 + (model.potential(q).unwrap() - 3.0) * mode.value(q);
        assert!(good.abs() < 1e-3);
        assert!(bad.abs() > 10.0);
    }

    #[test]
    fn family_selectors_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.selector().parse::<Family>().unwrap(), f);
        }
        assert!("susy2-j7".parse::<Family>().is_err());
    }
}
