//! Finite-difference ground state, independent of the trial function.
//!
//! With `u = r^k psi` the radial equation becomes
//! `-u''/2 + [V + k(k - 1)/(2 r^2)] u = E u`, discretised by the three-point
//! stencil into a symmetric tridiagonal matrix. For `k < 1` the centrifugal term
//! is attractive (critically so at `k = 1/2`) and the stencil converges badly, so
//! there the flux form `-(r^{2k} psi')' / (2 r^{2k})` is discretised on cell
//! centres instead and symmetrised with `u_i = r_i^k psi_i`.
//!
//! The lowest eigenvalue comes from Sturm-count bisection and the vector from
//! shifted inverse iteration.

use crate::error::{Error, Result};
use crate::model::{potential, ModelParams};

/// Largest step accepted by [`ground_energy`].
pub const MAX_STEP: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteHamiltonian {
    step: f64,
    radii: Vec<f64>,
    diag: Vec<f64>,
    off: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleState {
    pub energy: f64,
    pub radii: Vec<f64>,
    /// Ground-state `u`, unit Euclidean norm and positive.
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub coarse: f64,
    pub fine: f64,
    /// `(4 fine - coarse) / 3`
    pub energy: f64,
}

impl DiscreteHamiltonian {
    /// Dirichlet at `r_max`. For `k >= 1` the nodes are `i step` with `u(0) = 0`;
    /// otherwise they are cell centres and the flux through the origin vanishes.
    pub fn new(k: f64, step: f64, r_max: f64, v: impl Fn(f64) -> f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0 && r_max > 4.0 * step) {
            return Err(Error::InvalidOption(format!("step {step} does not fit in r_max {r_max}")));
        }
        let inv = 1.0 / (step * step);
        let m = (r_max / step).round() as usize;
        let ham = if k >= 1.0 {
            let centrifugal = 0.5 * k * (k - 1.0);
            let radii: Vec<f64> = (1..m).map(|i| i as f64 * step).collect();
            let diag = radii.iter().map(|&r| inv + v(r) + centrifugal / (r * r)).collect();
            let off = vec![-0.5 * inv; radii.len() - 1];
            Self { step, radii, diag, off }
        } else {
            let radii: Vec<f64> = (1..=m).map(|i| (i as f64 - 0.5) * step).collect();
            // r^{2k} at the cell faces i * step; the face at the origin carries no flux.
            let face = |i: usize| if i == 0 { 0.0 } else { (i as f64 * step).powf(2.0 * k) };
            let diag = radii
                .iter()
                .enumerate()
                .map(|(i, &r)| 0.5 * inv * (face(i) + face(i + 1)) / r.powf(2.0 * k) + v(r))
                .collect();
            let off = (0..m - 1)
                .map(|i| -0.5 * inv * face(i + 1) / (radii[i] * radii[i + 1]).powf(k))
                .collect();
            Self { step, radii, diag, off }
        };
        if let Some(i) = ham.diag.iter().position(|d| !d.is_finite()) {
            return Err(Error::NonFinite { stage: "hamiltonian", radius: ham.radii[i] });
        }
        Ok(ham)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in self.diag.iter().enumerate() {
            d = if i == 0 { a - x } else { a - x - self.off[i - 1] * self.off[i - 1] / d };
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + x.abs()).max(1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Lowest eigenvalue by bisection on the Sturm count.
    pub fn lowest_eigenvalue(&self) -> Result<f64> {
        // Gershgorin bounds.
        let radius = |i: usize| {
            let left = if i == 0 { 0.0 } else { self.off[i - 1].abs() };
            left + self.off.get(i).map_or(0.0, |b| b.abs())
        };
        let mut lo = (0..self.len()).map(|i| self.diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
        let mut hi = (0..self.len()).map(|i| self.diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
        if self.sturm_count(lo) != 0 || self.sturm_count(hi) == 0 {
            return Err(Error::SturmBracket);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.sturm_count(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Solves `(T - shift) x = rhs` by the Thomas algorithm.
    fn shifted_solve(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let b = |i: usize| self.off.get(i).copied().unwrap_or(0.0);
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut denom = self.diag[0] - shift;
        c[0] = b(0) / denom;
        x[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            c[i] = b(i) / denom;
            x[i] = (rhs[i] - self.off[i - 1] * x[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }

    /// Eigenvector for `eigenvalue`, shifted just below it so `T - shift` stays
    /// positive definite.
    pub fn ground_vector(&self, eigenvalue: f64) -> Result<Vec<f64>> {
        let shift = eigenvalue - 1e-9 * eigenvalue.abs().max(1.0);
        let mut v = vec![1.0 / (self.len() as f64).sqrt(); self.len()];
        for _ in 0..50 {
            let mut next = self.shifted_solve(shift, &v);
            let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::InverseIterationStagnation);
            }
            let sign = if next.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            next.iter_mut().for_each(|x| *x *= sign / norm);
            let change = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = next;
            if change < 1e-13 {
                return Ok(v);
            }
        }
        Err(Error::InverseIterationStagnation)
    }
}

/// Ground state for an arbitrary potential.
pub fn ground_energy_with(k: f64, step: f64, r_max: f64, v: impl Fn(f64) -> f64) -> Result<OracleState> {
    if step > MAX_STEP {
        return Err(Error::InvalidOption(format!("oracle step {step} exceeds {MAX_STEP}")));
    }
    let ham = DiscreteHamiltonian::new(k, step, r_max, v)?;
    let energy = ham.lowest_eigenvalue()?;
    let u = ham.ground_vector(energy)?;
    Ok(OracleState { energy, radii: ham.radii, u })
}

pub fn ground_energy(p: &ModelParams, step: f64, r_max: f64) -> Result<OracleState> {
    ground_energy_with(p.k(), step, r_max, |r| potential(r, p))
}

/// Energies at `step` and `step / 2`, combined to cancel the `O(step^2)` error.
pub fn extrapolated_energy(p: &ModelParams, step: f64, r_max: f64) -> Result<Extrapolated> {
    let coarse = ground_energy(p, step, r_max)?.energy;
    let fine = ground_energy(p, 0.5 * step, r_max)?.energy;
    Ok(Extrapolated { coarse, fine, energy: (4.0 * fine - coarse) / 3.0 })
}

/// `psi = u / r^k` with `psi(0) = 1`, returned as `(radii, psi)` with the origin
/// prepended. The origin value comes from a quadratic through the first three nodes.
pub fn psi_from_u(radii: &[f64], u: &[f64], p: &ModelParams) -> Result<(Vec<f64>, Vec<f64>)> {
    if radii.len() != u.len() {
        return Err(Error::LengthMismatch { expected: radii.len(), found: u.len() });
    }
    if radii.len() < 3 {
        return Err(Error::GridTooShort { len: radii.len(), min: 3 });
    }
    let scale = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = 1e-12 * scale;
    let sign = if u.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    if let Some(index) = u.iter().position(|x| sign * x < -floor) {
        return Err(Error::NodeInGroundState { index });
    }
    let k = p.k();
    let raw: Vec<f64> = radii
        .iter()
        .zip(u)
        .map(|(&r, &x)| sign * x / r.powf(k))
        .collect();
    let (x0, x1, x2) = (radii[0], radii[1], radii[2]);
    let origin = raw[0] * x1 * x2 / ((x0 - x1) * (x0 - x2))
        + raw[1] * x0 * x2 / ((x1 - x0) * (x1 - x2))
        + raw[2] * x0 * x1 / ((x2 - x0) * (x2 - x1));
    if !(origin.is_finite() && origin > 0.0) {
        return Err(Error::NonFinite { stage: "oracle origin value", radius: 0.0 });
    }
    let mut out_r = vec![0.0];
    out_r.extend_from_slice(radii);
    let mut psi = vec![1.0];
    psi.extend(raw.iter().map(|v| (v / origin).max(0.0)));
    Ok((out_r, psi))
}
