//! First- and second-order Darboux (SUSY) transformations on arbitrary
//! eigenfunctions of `−Q″ + V Q = ε Q`.
//!
//! Nothing here knows the catalog closed forms; the module is used as the
//! oracle that reconstructs partner potentials and eigenfunctions from the
//! seed states alone.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fixed_domain::StationaryMode;
use crate::quadrature::{self, Tolerance};

/// Default finite-difference steps for derivative orders 1, 2 and 3.
///
/// Order 1 uses `1e-4`; the higher orders use wider stencils because
/// round-off grows like `eps / hᵏ`.
pub const DIFF_STEPS: [f64; 3] = [1e-4, 1e-3, 5e-3];

/// Step of the numerical route for `(log W)″`.
pub const LOG_WRONSKIAN_STEP: f64 = 1e-3;

/// Number of interior samples used for node and Wronskian checks.
const SAMPLE_CHECKS: usize = 2000;

/// Derivative of order 1..=3 by 5-point central differences, Richardson
/// extrapolated over `h` and `h/2`.
pub fn numeric_derivative<F: Fn(f64) -> f64>(f: F, x: f64, order: usize, h: f64) -> f64 {
    let stencil = |h: f64| -> f64 {
        let (fm2, fm1, fp1, fp2) = (f(x - 2.0 * h), f(x - h), f(x + h), f(x + 2.0 * h));
        match order {
            1 => (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h),
            2 => (-fm2 + 16.0 * fm1 - 30.0 * f(x) + 16.0 * fp1 - fp2) / (12.0 * h * h),
            3 => (-fm2 + 2.0 * fm1 - 2.0 * fp1 + fp2) / (2.0 * h * h * h),
            _ => panic!("numeric_derivative supports orders 1..=3, got {order}"),
        }
    };
    let (coarse, fine) = (stencil(h), stencil(0.5 * h));
    if order == 3 {
        // leading error O(h²)
        (4.0 * fine - coarse) / 3.0
    } else {
        (16.0 * fine - coarse) / 15.0
    }
}

/// An eigenfunction usable as a transformation seed or target.
pub trait Eigenfunction: Send + Sync {
    fn energy(&self) -> f64;

    fn value(&self, q: f64) -> f64;

    /// Derivative of order `0..=3`. The default uses [`numeric_derivative`].
    fn derivative(&self, q: f64, order: usize) -> f64 {
        if order == 0 {
            return self.value(q);
        }
        numeric_derivative(|x| self.value(x), q, order, DIFF_STEPS[order - 1])
    }
}

/// `a · sin(kπq)` with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineMode {
    pub wave_number: f64,
    pub amplitude: f64,
    pub energy: f64,
}

impl SineMode {
    /// Unnormalized square-well level `n`: `sin((n+1)πq)`, `ε = n(n+2)π²`.
    pub fn square_well(n: usize) -> Self {
        let k = (n + 1) as f64;
        Self {
            wave_number: k,
            amplitude: 1.0,
            energy: (k * k - 1.0) * PI * PI,
        }
    }

    /// `sin(kπq)`, `cos(kπq)`. For integer `k` the right half is reflected
    /// onto `1 − q` (exact there), keeping full relative precision at `q → 1`.
    fn sin_cos(&self, q: f64) -> (f64, f64) {
        let k = self.wave_number;
        if q > 0.5 && k.fract() == 0.0 {
            let (s, c) = (k * PI * (1.0 - q)).sin_cos();
            let odd = k.rem_euclid(2.0) == 1.0;
            if odd {
                (s, -c)
            } else {
                (-s, c)
            }
        } else {
            (k * PI * q).sin_cos()
        }
    }
}

impl Eigenfunction for SineMode {
    fn energy(&self) -> f64 {
        self.energy
    }

    fn value(&self, q: f64) -> f64 {
        self.amplitude * self.sin_cos(q).0
    }

    fn derivative(&self, q: f64, order: usize) -> f64 {
        let k = self.wave_number * PI;
        let (s, c) = self.sin_cos(q);
        let d = match order % 4 {
            0 => s,
            1 => c,
            2 => -s,
            _ => -c,
        };
        self.amplitude * k.powi(order as i32) * d
    }
}

/// A seed given only by its values; derivatives are numerical.
pub struct FnEigenfunction<F> {
    f: F,
    energy: f64,
}

impl<F: Fn(f64) -> f64 + Send + Sync> FnEigenfunction<F> {
    pub fn new(energy: f64, f: F) -> Self {
        Self { f, energy }
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> Eigenfunction for FnEigenfunction<F> {
    fn energy(&self) -> f64 {
        self.energy
    }

    fn value(&self, q: f64) -> f64 {
        (self.f)(q)
    }
}

impl Eigenfunction for StationaryMode {
    fn energy(&self) -> f64 {
        StationaryMode::energy(self)
    }

    fn value(&self, q: f64) -> f64 {
        StationaryMode::value(self, q)
    }
}

fn interior_samples() -> impl Iterator<Item = f64> {
    (1..SAMPLE_CHECKS).map(|i| i as f64 / SAMPLE_CHECKS as f64)
}

/// Superpotential `w = −Q₀′/Q₀` built from a nodeless ground state.
#[derive(Clone)]
pub struct Superpotential {
    seed: Arc<dyn Eigenfunction>,
}

impl std::fmt::Debug for Superpotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Superpotential")
            .field("seed_energy", &self.seed.energy())
            .finish()
    }
}

/// Builds `w = −Q₀′/Q₀`. Rejects seeds with an interior node.
pub fn superpotential_from_ground(seed: Arc<dyn Eigenfunction>) -> Result<Superpotential> {
    let mut sign = 0.0;
    for q in interior_samples() {
        let v = seed.value(q);
        if v == 0.0 || (sign != 0.0 && v.signum() != sign) {
            return Err(Error::NodalSeed(q));
        }
        sign = v.signum();
    }
    Ok(Superpotential { seed })
}

impl Superpotential {
    pub fn value(&self, q: f64) -> f64 {
        -self.seed.derivative(q, 1) / self.seed.value(q)
    }

    /// `w′ = −Q₀″/Q₀ + (Q₀′/Q₀)²`.
    pub fn derivative(&self, q: f64) -> f64 {
        let v = self.seed.value(q);
        let d1 = self.seed.derivative(q, 1) / v;
        -self.seed.derivative(q, 2) / v + d1 * d1
    }

    /// `V₋ = w² − w′`, which equals the seed potential minus the seed energy.
    pub fn lower_potential(&self, q: f64) -> f64 {
        let w = self.value(q);
        w * w - self.derivative(q)
    }

    /// `V₊ = w² + w′`.
    pub fn upper_potential(&self, q: f64) -> f64 {
        let w = self.value(q);
        w * w + self.derivative(q)
    }

    pub fn seed_energy(&self) -> f64 {
        self.seed.energy()
    }
}

/// `A f = f′ + w f`, mapping eigenfunctions of `V₋` onto those of `V₊`.
pub fn apply_a<'a>(
    w: &'a Superpotential,
    f: &'a dyn Eigenfunction,
) -> impl Fn(f64) -> f64 + Send + Sync + 'a {
    move |q| f.derivative(q, 1) + w.value(q) * f.value(q)
}

/// Route used for the second derivative of `log W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogWronskianRoute {
    /// Quotient rule with seed derivatives up to third order.
    Analytic,
    /// Richardson-extrapolated central differences of `log |W|`.
    Numerical,
}

/// Second-order intertwiner seeded by two consecutive levels.
#[derive(Clone)]
pub struct IntertwinerSecond {
    j: usize,
    lower: Arc<dyn Eigenfunction>,
    upper: Arc<dyn Eigenfunction>,
    seed_scale: f64,
}

impl std::fmt::Debug for IntertwinerSecond {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IntertwinerSecond")
            .field("j", &self.j)
            .field("energies", &(self.lower.energy(), self.upper.energy()))
            .finish()
    }
}

impl IntertwinerSecond {
    /// `lower` and `upper` are the seed levels `j` and `j + 1`.
    pub fn new(j: usize, lower: Arc<dyn Eigenfunction>, upper: Arc<dyn Eigenfunction>) -> Result<Self> {
        if lower.energy() == upper.energy() {
            return Err(Error::InvalidArgument(
                "seed energies must differ (confluent transformations are not supported)".into(),
            ));
        }
        let mut itw = Self {
            j,
            lower,
            upper,
            seed_scale: 1.0,
        };
        let mut sign = 0.0;
        let (mut max_lo, mut max_hi) = (0.0f64, 0.0f64);
        for q in interior_samples() {
            let w = itw.wronskian(q);
            if w == 0.0 || (sign != 0.0 && w.signum() != sign) {
                return Err(Error::VanishingWronskian(q));
            }
            sign = w.signum();
            max_lo = max_lo.max(itw.lower.value(q).abs());
            max_hi = max_hi.max(itw.upper.value(q).abs());
        }
        itw.seed_scale = max_lo * max_hi;
        Ok(itw)
    }

    /// Square-well seeds `sin((j+1)πq)`, `sin((j+2)πq)`.
    pub fn square_well(j: usize) -> Result<Self> {
        Self::new(
            j,
            Arc::new(SineMode::square_well(j)),
            Arc::new(SineMode::square_well(j + 1)),
        )
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn seed_energies(&self) -> (f64, f64) {
        (self.lower.energy(), self.upper.energy())
    }

    /// `W = Q_j Q_{j+1}′ − Q_j′ Q_{j+1}`.
    pub fn wronskian(&self, q: f64) -> f64 {
        self.lower.value(q) * self.upper.derivative(q, 1)
            - self.lower.derivative(q, 1) * self.upper.value(q)
    }

    fn wronskian_derivatives(&self, q: f64) -> (f64, f64, f64) {
        let a: [f64; 4] = std::array::from_fn(|k| self.lower.derivative(q, k));
        let b: [f64; 4] = std::array::from_fn(|k| self.upper.derivative(q, k));
        let w = a[0] * b[1] - a[1] * b[0];
        let w1 = a[0] * b[2] - a[2] * b[0];
        let w2 = a[1] * b[2] + a[0] * b[3] - a[3] * b[0] - a[2] * b[1];
        (w, w1, w2)
    }

    /// `d²/dq² log W` at `q`.
    pub fn log_wronskian_dd(&self, q: f64, route: LogWronskianRoute) -> Result<f64> {
        match route {
            LogWronskianRoute::Analytic => {
                let (w, w1, w2) = self.wronskian_derivatives(q);
                if w == 0.0 {
                    return Err(Error::VanishingWronskian(q));
                }
                Ok(w2 / w - (w1 / w).powi(2))
            }
            LogWronskianRoute::Numerical => {
                let h = LOG_WRONSKIAN_STEP;
                let centre = self.wronskian(q).signum();
                for k in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                    let w = self.wronskian(q + k * h);
                    if w == 0.0 || w.signum() != centre {
                        return Err(Error::VanishingWronskian(q + k * h));
                    }
                }
                Ok(numeric_derivative(|x| self.wronskian(x).abs().ln(), q, 2, h))
            }
        }
    }

    /// Partner potential `V₂ = V₀ − 2 (log W)″`.
    pub fn partner_potential<'a, V>(
        &'a self,
        v0: V,
        route: LogWronskianRoute,
    ) -> impl Fn(f64) -> Result<f64> + 'a
    where
        V: Fn(f64) -> f64 + 'a,
    {
        move |q| Ok(v0(q) - 2.0 * self.log_wronskian_dd(q, route)?)
    }

    /// `D Q_k = det[Q_j, Q_{j+1}, Q_k; first; second derivatives] / W`.
    ///
    /// Rejects targets at the seed energies: those map onto the
    /// non-normalizable states `Q_j/W`, `Q_{j+1}/W`.
    pub fn apply_d<'a>(
        &'a self,
        target: &'a dyn Eigenfunction,
    ) -> Result<impl Fn(f64) -> f64 + Send + Sync + 'a> {
        let e = target.energy();
        let (e_lo, e_hi) = self.seed_energies();
        let tol = 1e-12 * e_lo.abs().max(e_hi.abs()).max(1.0);
        if (e - e_lo).abs() <= tol {
            return Err(Error::DeletedLevel(self.j));
        }
        if (e - e_hi).abs() <= tol {
            return Err(Error::DeletedLevel(self.j + 1));
        }
        Ok(move |q: f64| {
            let a: [f64; 3] = std::array::from_fn(|k| self.lower.derivative(q, k));
            let b: [f64; 3] = std::array::from_fn(|k| self.upper.derivative(q, k));
            let c: [f64; 3] = std::array::from_fn(|k| target.derivative(q, k));
            let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1])
                + c[0] * (a[1] * b[2] - a[2] * b[1]);
            det / (a[0] * b[1] - a[1] * b[0])
        })
    }

    /// Coefficients of `D = d²/dq² + β d/dq + γ`:
    /// `β = Δε Q_j Q_{j+1} / W`,
    /// `γ = −β″/(2β) + (β′/(2β))² + β′/2 + β²/4 − (Δε/(2β))²`.
    pub fn beta_gamma(&self, q: f64) -> Result<(f64, f64)> {
        let a: [f64; 4] = std::array::from_fn(|k| self.lower.derivative(q, k));
        let b: [f64; 4] = std::array::from_fn(|k| self.upper.derivative(q, k));
        let (e_lo, e_hi) = self.seed_energies();
        let de = e_hi - e_lo;
        let p = a[0] * b[0];
        if p.abs() <= 1e-12 * self.seed_scale {
            return Err(Error::VanishingBeta(q));
        }
        let p1 = a[1] * b[0] + a[0] * b[1];
        let p2 = a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2];
        let (w, w1, w2) = self.wronskian_derivatives(q);
        let beta = de * p / w;
        let beta1 = de * (p1 * w - p * w1) / (w * w);
        let beta2 = de * ((p2 * w - p * w2) / (w * w) - 2.0 * w1 * (p1 * w - p * w1) / w.powi(3));
        let gamma = -beta2 / (2.0 * beta) + (beta1 / (2.0 * beta)).powi(2) + 0.5 * beta1
            + 0.25 * beta * beta
            - (de / (2.0 * beta)).powi(2);
        Ok((beta, gamma))
    }

    /// `(d²/dq² + β d/dq + γ) Q_k` at `q`.
    pub fn apply_operator(&self, target: &dyn Eigenfunction, q: f64) -> Result<f64> {
        let (beta, gamma) = self.beta_gamma(q)?;
        Ok(target.derivative(q, 2) + beta * target.derivative(q, 1) + gamma * target.value(q))
    }

    /// `∫_δ^{1−δ} (Q/W)²` for the would-be partner states `Q_j/W`
    /// (`upper = false`) or `Q_{j+1}/W`. Grows without bound as `δ → 0`.
    pub fn deleted_state_norm(&self, upper: bool, cutoff: f64) -> Result<f64> {
        let seed = if upper { &self.upper } else { &self.lower };
        quadrature::integrate(
            |q| (seed.value(q) / self.wronskian(q)).powi(2),
            cutoff,
            1.0 - cutoff,
            Tolerance {
                abs: 0.0,
                rel: 1e-10,
                max_intervals: 4000,
            },
        )
    }
}

/// Scales `f` to unit `L²` norm on `[0, 1]`, positive near `q = 0`.
pub fn normalized<F: Fn(f64) -> f64>(f: F) -> Result<impl Fn(f64) -> f64> {
    let norm2 = quadrature::integrate(
        |q| f(q).powi(2),
        0.0,
        1.0,
        Tolerance {
            abs: 0.0,
            rel: 1e-13,
            max_intervals: 4000,
        },
    )?;
    let samples: Vec<f64> = (1..1000).map(|i| f(i as f64 / 1000.0)).collect();
    let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let first = samples
        .iter()
        .find(|v| v.abs() > 1e-3 * peak)
        .copied()
        .unwrap_or(1.0);
    let factor = first.signum() / norm2.sqrt();
    Ok(move |q| factor * f(q))
}
