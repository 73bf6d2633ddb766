//! Closed-form trial function and its perturbation potential.
//!
//! The outgoing branch is
//!
//! ```text
//! phi_+(r) = ((r0 + a)/(r + a))^k exp(-g S0(r) - S1(r))
//! ```
//!
//! with `S0' = (r^2 - r0^2) sqrt(r^2 + A r0^2)` and `S1` chosen so that the
//! perturbation `h_+` carries no positive powers of `r`. The reflected branch
//! `phi_-` replaces `S0(r)` by `S0(-r)`; mixing the two with weight `xi`
//! enforces `phi'(0) = 0` inside `r0`, and a constant rescaling of `phi_+`
//! continues the function beyond `r0`.
//!
//! Everything is stored as a log-amplitude. `phi` itself is only formed inside
//! ratios, because `exp(-g S0)` underflows long before the tail stops mattering.
//!
//! Sign convention: `h` is defined by
//! `(-1/(2 r^2k) d/dr r^2k d/dr + V - h) phi = g E0 phi`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Radius below which [`TrialFunction::h`] is evaluated at the clamp radius.
pub const DEFAULT_CLAMP_RADIUS: f64 = 1e-5;

/// `S0'(r) = (r^2 - r0^2) sqrt(r^2 + A r0^2)`.
pub fn s0_prime(r: f64, p: &ModelParams) -> f64 {
    let r0_sq = p.r0_sq();
    (r * r - r0_sq) * (r * r + p.a_shape() * r0_sq).sqrt()
}

/// Antiderivative of [`s0_prime`].
pub fn s0(r: f64, p: &ModelParams) -> f64 {
    let (even, odd) = s0_parts(r, p);
    even + odd
}

/// `S0(-r)`, the exponent of the reflected branch.
pub fn s0_reflected(r: f64, p: &ModelParams) -> f64 {
    let (even, odd) = s0_parts(r, p);
    even - odd
}

// Splits S0 into the parts even and odd under r -> -r. The odd part uses
// ln((q + r)/(q - r)) = 2 atanh(r/q) so that S0(r) - S0(-r) keeps full
// precision near the origin.
fn s0_parts(r: f64, p: &ModelParams) -> (f64, f64) {
    let a = p.a_shape();
    let r0_sq = p.r0_sq();
    let a_r0_sq = a * r0_sq;
    let q = (r * r + a_r0_sq).sqrt();
    let log_coeff = (a * a + 4.0 * a) * r0_sq * r0_sq / 8.0;
    // ln(r + q) = ln(sqrt(A) r0) + asinh(r / (sqrt(A) r0)); even part is the constant.
    let even = -log_coeff * a_r0_sq.sqrt().ln();
    let odd = r * q * (2.0 * r * r + a_r0_sq - 4.0 * r0_sq) / 8.0 - log_coeff * (r / a_r0_sq.sqrt()).asinh();
    (even, odd)
}

/// Trial-function parameter `a` together with the model it belongs to.
///
/// Frequently used constants are cached here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    params: ModelParams,
    a: f64,
    sqrt_1pa: f64,
    r0: f64,
    r0_sq: f64,
    a_r0_sq: f64,
    /// `r0 sqrt(1 + A)`
    c: f64,
}

pub const DEFAULT_TRIAL_PARAMETER: f64 = 2.0;

/// Zeroth-order energy `E0 = E0(1) + E0(2) + E0(3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyZero {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub total: f64,
}

impl TrialConfig {
    pub fn new(params: ModelParams, a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidTrialParameter(a));
        }
        let sqrt_1pa = (1.0 + params.a_shape()).sqrt();
        let r0 = params.r0();
        let r0_sq = params.r0_sq();
        Ok(Self {
            params,
            a,
            sqrt_1pa,
            r0,
            r0_sq,
            a_r0_sq: params.a_shape() * r0_sq,
            c: r0 * sqrt_1pa,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    fn k(&self) -> f64 {
        self.params.k()
    }

    fn q(&self, r: f64) -> f64 {
        (r * r + self.a_r0_sq).sqrt()
    }

    // gamma' / (alpha' + beta') pieces: S1' first fraction without the
    // removable (r^2 - r0^2) factor.
    fn gamma_prime(&self, r: f64) -> f64 {
        let a = self.params.a_shape();
        let r2 = r * r;
        9.0 * r2 * r2 + 3.0 * (4.0 * a + 1.0) * r2 * self.r0_sq + 4.0 * a * (1.0 + a) * self.r0_sq * self.r0_sq
    }

    fn alpha_beta_prime(&self, r: f64) -> f64 {
        let a = self.params.a_shape();
        r * (3.0 * r * r + (2.0 * a - 1.0) * self.r0_sq) + 2.0 * self.r0_sq * self.sqrt_1pa * self.q(r)
    }

    /// `S1'(r)`.
    ///
    /// The first fraction of the textbook form is `(alpha' - beta') / (2 (r^2 - r0^2) q^2)`,
    /// a 0/0 at `r0`. Multiplying by the conjugate `alpha' + beta'` cancels the double
    /// root analytically, so this is evaluated without any special window.
    pub fn s1_prime(&self, r: f64) -> f64 {
        let q = self.q(r);
        let first = self.gamma_prime(r) / (2.0 * q * q * self.alpha_beta_prime(r));
        let second = self.k() * self.a / (q * (q + self.c));
        first + second
    }

    /// Antiderivative of [`TrialConfig::s1_prime`].
    pub fn s1(&self, r: f64) -> f64 {
        let a_shape = self.params.a_shape();
        let q = self.q(r);
        let num = self.sqrt_1pa * q + r + a_shape * self.r0;
        let den = self.sqrt_1pa * q - r + a_shape * self.r0;
        (r + self.r0).ln()
            + 0.25 * (q * q).ln()
            + (0.5 + self.k() * self.a / (2.0 * self.r0)) * (num / den).ln()
    }

    /// `(S1'^2 - S1'') / 2` through its explicit rational form.
    ///
    /// The `gamma/(alpha + beta)` term has a removable 0/0 for very small `A`;
    /// there the same quantity is taken from the derivative of the regular
    /// first fraction instead.
    pub fn s1_curvature_term(&self, r: f64) -> f64 {
        let a = self.params.a_shape();
        let k = self.k();
        let ta = self.a;
        let (r0_sq, c) = (self.r0_sq, self.c);
        let r2 = r * r;
        let q = self.q(r);
        let q2 = q * q;
        let ab_p = self.alpha_beta_prime(r);

        let alpha = 15.0 * r2 * r2 * r2
            + (18.0 * a - 6.0) * r2 * r2 * r0_sq
            + (8.0 * a * a + 12.0 * a + 7.0) * r2 * r0_sq * r0_sq
            + (8.0 * a * a + 2.0 * a) * r0_sq * r0_sq * r0_sq;
        let beta = 8.0 * self.sqrt_1pa * r0_sq * r * (3.0 * r2 + (2.0 * a - 1.0) * r0_sq) * q;
        let first = if alpha + beta > 0.05 * ab_p * ab_p {
            let r0_4 = r0_sq * r0_sq;
            let gamma = 225.0 * r2 * r2 * r2 * r2
                + 270.0 * (1.0 + 2.0 * a) * r2 * r2 * r2 * r0_sq
                + 3.0 * (188.0 * a * a + 216.0 * a - 5.0) * r2 * r2 * r0_4
                + 36.0 * a * (8.0 * a * a + 10.0 * a - 1.0) * r2 * r0_4 * r0_sq
                + 4.0 * a * a * (16.0 * a * a + 8.0 * a + 1.0) * r0_4 * r0_4;
            gamma / (8.0 * q2 * q2 * (alpha + beta))
        } else {
            self.first_fraction_curvature(r)
        };

        let qc = q + c;
        let cross = k * ta * self.gamma_prime(r) / (2.0 * q2 * q * ab_p * qc);
        let square = k * k * ta * ta / (2.0 * q2 * qc * qc);
        let slope = k * ta * r * (2.0 * q + c) / (2.0 * q2 * q * qc * qc);
        first + cross + square + slope
    }

    // (F^2 - F')/2 for F = gamma'/(2 q^2 (alpha' + beta')), differentiated analytically.
    fn first_fraction_curvature(&self, r: f64) -> f64 {
        let a = self.params.a_shape();
        let q = self.q(r);
        let s = self.alpha_beta_prime(r);
        let s_prime = 9.0 * r * r + (2.0 * a - 1.0) * self.r0_sq + 2.0 * self.r0_sq * self.sqrt_1pa * r / q;
        let num = self.gamma_prime(r);
        let num_prime = 36.0 * r * r * r + 6.0 * (4.0 * a + 1.0) * r * self.r0_sq;
        let den = 2.0 * q * q * s;
        let den_prime = 2.0 * (2.0 * r * s + q * q * s_prime);
        0.5 * (num * num - num_prime * den + num * den_prime) / (den * den)
    }

    /// The part of `h_+` proportional to `g`, divided by `g`:
    /// `k a (a^2 - r0^2) q / (r (r + a)) - k a^2 A r0^2 / (r (q + r))`.
    fn coupling_term(&self, r: f64) -> f64 {
        let k = self.k();
        let a = self.a;
        let q = self.q(r);
        k * a * (a * a - self.r0_sq) * q / (r * (r + a)) - k * a * a * self.a_r0_sq / (r * (q + r))
    }

    /// Perturbation potential of the outgoing branch, for `r > 0`.
    pub fn h_plus(&self, r: f64) -> f64 {
        let k = self.k();
        let a = self.a;
        let ra = r * (r + a);
        let kinetic = self.s1_curvature_term(r) + 0.5 * k * (k + 1.0) / ((r + a) * (r + a))
            - k * a * self.s1_prime(r) / ra
            - k * k / ra;
        -kinetic + self.params.g() * self.coupling_term(r)
    }

    pub fn energy_zero(&self) -> EnergyZero {
        let k = self.k();
        let e1 = self.r0_sq * self.sqrt_1pa;
        let e2 = k * self.a * self.r0 * self.sqrt_1pa;
        let e3 = -k * self.a * self.a;
        EnergyZero { e1, e2, e3, total: e1 + e2 + e3 }
    }

    fn log_prefactor(&self, r: f64) -> f64 {
        self.k() * ((self.r0 + self.a) / (r + self.a)).ln()
    }

    /// `ln phi_+(r)`.
    pub fn log_phi_plus(&self, r: f64) -> f64 {
        self.log_prefactor(r) - self.params.g() * s0(r, &self.params) - self.s1(r)
    }

    /// `ln phi_-(r)`.
    pub fn log_phi_minus(&self, r: f64) -> f64 {
        self.log_prefactor(r) - self.params.g() * s0_reflected(r, &self.params) - self.s1(r)
    }

    /// `ln phi_+ - ln phi_-`; zero at the origin and increasing up to `r0`.
    fn log_branch_gap(&self, r: f64) -> f64 {
        -2.0 * self.params.g() * s0_parts(r, &self.params).1
    }

    /// Mixing coefficient enforcing `phi'(0) = 0`.
    ///
    /// Both branches agree at the origin, so `xi = -(ln phi_+)'(0) / (ln phi_-)'(0)`.
    pub fn mixing_xi(&self) -> Result<f64> {
        let (plus, minus) = self.origin_log_slopes();
        if minus.abs() <= 1e-14 * (plus.abs() + 1.0) {
            return Err(Error::DegenerateMixing);
        }
        Ok(-plus / minus)
    }

    /// `((ln phi_+)'(0), (ln phi_-)'(0))`.
    pub fn origin_log_slopes(&self) -> (f64, f64) {
        let base = -self.k() / self.a - self.s1_prime(0.0);
        let drift = self.params.g() * s0_prime(0.0, &self.params);
        (base - drift, base + drift)
    }
}

/// Which closed form of `h` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `r < r0`: mixed function `phi_+ + xi phi_-`.
    Inner,
    /// `r >= r0`: rescaled `phi_+`.
    Outer,
}

/// Trial function `phi` with its perturbation `h`; immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFunction {
    config: TrialConfig,
    xi: f64,
    e0: EnergyZero,
    log_scale_outer: f64,
    clamp_radius: f64,
}

pub fn build_trial(cfg: TrialConfig) -> Result<TrialFunction> {
    let xi = cfg.mixing_xi()?;
    // phi = phi_-(e^gap + xi) on [0, r0) with gap >= 0, so xi > -1 keeps it positive.
    if xi <= -1.0 {
        return Err(Error::NonPositiveTrial { xi });
    }
    let gap = cfg.log_branch_gap(cfg.r0);
    let log_scale_outer = (xi * (-gap).exp()).ln_1p();
    Ok(TrialFunction {
        config: cfg,
        xi,
        e0: cfg.energy_zero(),
        log_scale_outer,
        clamp_radius: DEFAULT_CLAMP_RADIUS,
    })
}

impl TrialFunction {
    pub fn with_clamp_radius(mut self, clamp_radius: f64) -> Self {
        self.clamp_radius = clamp_radius;
        self
    }

    pub fn config(&self) -> &TrialConfig {
        &self.config
    }

    pub fn params(&self) -> &ModelParams {
        &self.config.params
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn e0(&self) -> EnergyZero {
        self.e0
    }

    pub fn clamp_radius(&self) -> f64 {
        self.clamp_radius
    }

    /// `1 + xi phi_-(r0) / phi_+(r0)`, the factor continuing `phi` past `r0`.
    pub fn phi_ratio_at_r0(&self) -> f64 {
        self.log_scale_outer.exp()
    }

    pub fn branch(&self, r: f64) -> Branch {
        if r < self.config.r0 {
            Branch::Inner
        } else {
            Branch::Outer
        }
    }

    /// `ln phi(r)` for `r >= 0`.
    pub fn log_phi(&self, r: f64) -> f64 {
        let plus = self.config.log_phi_plus(r);
        match self.branch(r) {
            Branch::Inner => plus + (self.xi * (-self.config.log_branch_gap(r)).exp()).ln_1p(),
            Branch::Outer => plus + self.log_scale_outer,
        }
    }

    /// `phi_- / phi` on the inner branch.
    fn reflected_fraction(&self, r: f64) -> f64 {
        1.0 / (self.config.log_branch_gap(r).exp() + self.xi)
    }

    /// Perturbation potential `h(r)`; below the clamp radius the value at the clamp
    /// radius is returned.
    pub fn h(&self, r: f64) -> f64 {
        self.h_branch(r, self.branch(r))
    }

    /// `h` using the closed form of the given branch.
    ///
    /// Quadrature panels ending at `r0` need the inner limit at `r0` itself.
    pub fn h_branch(&self, r: f64, branch: Branch) -> f64 {
        let r = r.max(self.clamp_radius);
        let cfg = &self.config;
        let outer = cfg.h_plus(r);
        match branch {
            Branch::Outer => outer,
            Branch::Inner => {
                let g = cfg.params.g();
                let bracket = self.e0.total + cfg.coupling_term(r);
                outer - 2.0 * g * self.xi * bracket * self.reflected_fraction(r)
            }
        }
    }
}
