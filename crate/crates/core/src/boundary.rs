//! Motion of the right wall, `L(t)`, and the rescaled clock
//! `tau(t) = ∫₀ᵗ ds / L(s)²`.
//!
//! Three laws are supported. `CaseI` is the square-root law
//! `L = sqrt(λt² + μt + ν)` for which `L³ L̈` is the constant
//! `c1 = λν − μ²/4`; `Linear` is a wall moving at constant speed; `Custom`
//! takes user-supplied `L`, `L̇` and `L̈`. Laws are validated on
//! `[0, t_max]` by dense sampling and are immutable afterwards.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Number of interior sample points used to check positivity of `L(t)`.
pub const VALIDITY_SAMPLES: usize = 4096;

/// Absolute tolerance for the quadrature fallback of `tau`.
pub const TAU_QUADRATURE_TOL: f64 = 1e-12;

type LawFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied law: `L`, `L̇` and `L̈` must all be provided.
#[derive(Clone)]
pub struct CustomLaw {
    pub length: LawFn,
    pub velocity: LawFn,
    pub acceleration: LawFn,
}

impl CustomLaw {
    pub fn new<L, V, A>(length: L, velocity: V, acceleration: A) -> Self
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        A: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            length: Arc::new(length),
            velocity: Arc::new(velocity),
            acceleration: Arc::new(acceleration),
        }
    }
}

impl fmt::Debug for CustomLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomLaw { .. }")
    }
}

#[derive(Debug, Clone)]
pub enum LawKind {
    CaseI { lambda: f64, mu: f64, nu: f64 },
    Linear { l0: f64, v: f64 },
    Custom(CustomLaw),
}

/// `L(t)` with its first two derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallState {
    pub length: f64,
    pub velocity: f64,
    pub acceleration: f64,
}

#[derive(Debug, Clone)]
pub struct BoundaryLaw {
    kind: LawKind,
    t_max: f64,
}

/// Formats as the command-line law syntax, e.g. `case1:1,0,1`.
impl fmt::Display for BoundaryLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            LawKind::CaseI { lambda, mu, nu } => write!(f, "case1:{lambda},{mu},{nu}"),
            LawKind::Linear { l0, v } => write!(f, "linear:{l0},{v}"),
            LawKind::Custom(_) => f.write_str("custom"),
        }
    }
}

impl BoundaryLaw {
    /// `L(t) = sqrt(λt² + μt + ν)`.
    pub fn case1(lambda: f64, mu: f64, nu: f64, t_max: f64) -> Result<Self> {
        check_finite(&[lambda, mu, nu, t_max])?;
        let law = Self {
            kind: LawKind::CaseI { lambda, mu, nu },
            t_max,
        };
        law.validate(|t| lambda * t * t + mu * t + nu, "radicand λt²+μt+ν")?;
        Ok(law)
    }

    /// `L(t) = L0 + v t`.
    pub fn linear(l0: f64, v: f64, t_max: f64) -> Result<Self> {
        check_finite(&[l0, v, t_max])?;
        let law = Self {
            kind: LawKind::Linear { l0, v },
            t_max,
        };
        law.validate(|t| l0 + v * t, "L0 + v t")?;
        Ok(law)
    }

    /// The fixed box `L ≡ 1`.
    pub fn fixed(t_max: f64) -> Result<Self> {
        Self::linear(1.0, 0.0, t_max)
    }

    pub fn custom(law: CustomLaw, t_max: f64) -> Result<Self> {
        check_finite(&[t_max])?;
        let length = law.length.clone();
        let law = Self {
            kind: LawKind::Custom(law),
            t_max,
        };
        law.validate(|t| length(t), "L(t)")?;
        Ok(law)
    }

    fn validate<F: Fn(f64) -> f64>(&self, positive: F, what: &str) -> Result<()> {
        if !(self.t_max > 0.0) {
            return Err(Error::InvalidLaw(format!(
                "t_max must be positive, got {}",
                self.t_max
            )));
        }
        for i in 0..=VALIDITY_SAMPLES + 1 {
            let t = self.t_max * i as f64 / (VALIDITY_SAMPLES + 1) as f64;
            let value = positive(t);
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidLaw(format!(
                    "{what} is not positive at t = {t} (value {value})"
                )));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &LawKind {
        &self.kind
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// `c1 = λν − μ²/4`, defined only for Case I laws.
    pub fn c1(&self) -> Option<f64> {
        match self.kind {
            LawKind::CaseI { lambda, mu, nu } => Some(lambda * nu - 0.25 * mu * mu),
            _ => None,
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        // allow round-off past the horizon from grids built as t0 + k*dt
        let slack = 1e-12 * self.t_max.max(1.0);
        if !(t >= -slack && t <= self.t_max + slack) {
            return Err(Error::OutsideHorizon {
                t,
                t_max: self.t_max,
            });
        }
        Ok(())
    }

    /// `(L, L̇, L̈)` at time `t`.
    pub fn eval(&self, t: f64) -> Result<WallState> {
        self.check_time(t)?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> WallState {
        match &self.kind {
            LawKind::CaseI { lambda, mu, nu } => {
                let length = (lambda * t * t + mu * t + nu).sqrt();
                let c1 = lambda * nu - 0.25 * mu * mu;
                WallState {
                    length,
                    velocity: (2.0 * lambda * t + mu) / (2.0 * length),
                    acceleration: c1 / length.powi(3),
                }
            }
            LawKind::Linear { l0, v } => WallState {
                length: l0 + v * t,
                velocity: *v,
                acceleration: 0.0,
            },
            LawKind::Custom(c) => WallState {
                length: (c.length)(t),
                velocity: (c.velocity)(t),
                acceleration: (c.acceleration)(t),
            },
        }
    }

    pub fn length(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.length)
    }

    /// Closed-form `tau(t)` when one is registered for this law.
    pub fn tau_closed_form(&self, t: f64) -> Option<f64> {
        match self.kind {
            LawKind::Linear { l0, v } => Some(t / (l0 * (l0 + v * t))),
            LawKind::CaseI { lambda, mu, nu } => {
                let disc = 4.0 * lambda * nu - mu * mu;
                if disc > 0.0 {
                    let root = disc.sqrt();
                    Some(
                        2.0 / root
                            * (((2.0 * lambda * t + mu) / root).atan() - (mu / root).atan()),
                    )
                } else {
                    None
                }
            }
            LawKind::Custom(_) => None,
        }
    }

    /// `tau(t)` by adaptive quadrature, regardless of closed forms.
    pub fn tau_quadrature(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        quadrature::integrate(
            |s| self.eval_unchecked(s).length.powi(-2),
            0.0,
            t,
            Tolerance::absolute(TAU_QUADRATURE_TOL),
        )
    }

    /// Rescaled clock `tau(t) = ∫₀ᵗ ds / L(s)²`.
    pub fn tau(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        match self.tau_closed_form(t) {
            Some(v) => Ok(v),
            None => self.tau_quadrature(t),
        }
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidLaw("non-finite coefficient".into()))
    }
}
