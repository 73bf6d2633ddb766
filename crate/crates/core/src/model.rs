//! Problem parameters, the sombrero potential and the radial operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of one sombrero problem.
///
/// `k = (N - 1)/2` and `r0 = ((2 + N)/3)^(1/4)` are derived once at
/// construction; every formula in the crate reads them from here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    n_dim: u32,
    g: f64,
    a_shape: f64,
    k: f64,
    r0: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    n_dim: u32,
    g: f64,
    a_shape: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.n_dim, raw.g, raw.a_shape)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams { n_dim: p.n_dim, g: p.g, a_shape: p.a_shape }
    }
}

impl ModelParams {
    pub fn new(n_dim: u32, g: f64, a_shape: f64) -> Result<Self> {
        if n_dim < 1 {
            return Err(Error::InvalidDimension(n_dim));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidCoupling(g));
        }
        // A <= 0 makes sqrt(r^2 + A r0^2) imaginary near the origin.
        if !(a_shape.is_finite() && a_shape > 0.0) {
            return Err(Error::InvalidShape(a_shape));
        }
        let n = f64::from(n_dim);
        Ok(Self {
            n_dim,
            g,
            a_shape,
            k: (n - 1.0) / 2.0,
            r0: ((2.0 + n) / 3.0).powf(0.25),
        })
    }

    pub fn n_dim(&self) -> u32 {
        self.n_dim
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn a_shape(&self) -> f64 {
        self.a_shape
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn r0_sq(&self) -> f64 {
        self.r0 * self.r0
    }
}

/// `V(r) = g^2/2 (r^2 - r0^2)^2 (r^2 + A r0^2)`.
pub fn potential(r: f64, p: &ModelParams) -> f64 {
    let r0_sq = p.r0_sq();
    let well = r * r - r0_sq;
    0.5 * p.g * p.g * well * well * (r * r + p.a_shape * r0_sq)
}

/// Residual samples of the radial operator on the interior of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl Residual {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Evaluates `-psi''/2 - (k/r) psi' + V psi - E psi` with three-point
/// centred differences on a (possibly non-uniform) grid.
///
/// Only interior points are returned. When the grid starts exactly at `r = 0`
/// the origin is included through the reflection `psi(-h) = psi(h)`, where the
/// operator reduces to `-(1 + 2k) psi''(0) / 2`.
pub fn operator_residual(radii: &[f64], psi: &[f64], energy: f64, p: &ModelParams) -> Result<Residual> {
    operator_residual_with(radii, psi, energy, p.k(), |r| potential(r, p))
}

/// [`operator_residual`] for an arbitrary potential and centrifugal index `k`.
pub fn operator_residual_with<V>(radii: &[f64], psi: &[f64], energy: f64, k: f64, v: V) -> Result<Residual>
where
    V: Fn(f64) -> f64,
{
    const MIN_POINTS: usize = 5;
    if radii.len() != psi.len() {
        return Err(Error::LengthMismatch { expected: radii.len(), found: psi.len() });
    }
    if radii.len() < MIN_POINTS {
        return Err(Error::GridTooShort { len: radii.len(), min: MIN_POINTS });
    }
    if let Some(index) = radii.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneGrid { index: index + 1 });
    }

    let n = radii.len();
    let mut out = Residual { radii: Vec::with_capacity(n), values: Vec::with_capacity(n) };
    if radii[0] == 0.0 {
        let h = radii[1];
        let second = 2.0 * (psi[1] - psi[0]) / (h * h);
        let value = -0.5 * (1.0 + 2.0 * k) * second + (v(0.0) - energy) * psi[0];
        out.radii.push(0.0);
        out.values.push(value);
    }
    for i in 1..n - 1 {
        let r = radii[i];
        let hm = r - radii[i - 1];
        let hp = radii[i + 1] - r;
        let denom = hm * hp * (hm + hp);
        let first = (hm * hm * psi[i + 1] - hp * hp * psi[i - 1] + (hp * hp - hm * hm) * psi[i]) / denom;
        let second = 2.0 * (hm * psi[i + 1] - (hm + hp) * psi[i] + hp * psi[i - 1]) / denom;
        let value = -0.5 * second - k / r * first + (v(r) - energy) * psi[i];
        out.radii.push(r);
        out.values.push(value);
    }
    Ok(out)
}

/// Closed-form ground state available at `g = 1, A = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactGroundState {
    pub energy: f64,
}

impl ExactGroundState {
    /// `psi(r) = exp(-r^4 / 4)`, normalised to 1 at the origin.
    pub fn psi(&self, r: f64) -> f64 {
        (-0.25 * r.powi(4)).exp()
    }
}

pub fn exact_case(p: &ModelParams) -> Option<ExactGroundState> {
    const MATCH_TOL: f64 = 1e-12;
    if (p.g - 1.0).abs() <= MATCH_TOL && (p.a_shape - 2.0).abs() <= MATCH_TOL {
        Some(ExactGroundState { energy: p.r0.powi(6) })
    } else {
        None
    }
}
