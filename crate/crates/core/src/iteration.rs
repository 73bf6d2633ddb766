//! Energy-correction / correction-factor iteration.
//!
//! With `psi = phi f` and `w = r^{2k} phi^2` the correction factor obeys
//! `(w f')' = -2 w (Delta - h) f`. Starting from `f_0 = 1`, each step computes
//!
//! ```text
//! Delta_n = <h f_{n-1}> / <f_{n-1}>                 (weight w)
//! f_n(r)  = 1 - 2 int_{r_c}^{r} I(y) / w(y) dy,     I(y) = int_0^y w (Delta_n - h) f_{n-1}
//! ```
//!
//! `Delta_n` makes `I(r_max) = 0`, so `I / w` is evaluated as a left-running
//! integral up to the peak of `w` and as minus a right-running integral beyond
//! it. Both recurrences only ever multiply by `exp(W(x) - W(y))` with
//! `W = ln w`, so nothing overflows even when `w` spans hundreds of decades.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::compensated_sum;
use crate::numerics::grid::{build_grid, weighted_integral_scaled, GridSpec, RadialGrid};
use crate::numerics::quadrature::{gauss_legendre, Rule};
use crate::trialfn::{build_trial, Branch, EnergyZero, TrialConfig, TrialFunction};

/// Gauss points per gap sub-interval.
const GAP_POINTS: usize = 8;
/// Upper bound on sub-intervals per gap.
const MAX_GAP_SPLITS: usize = 64;
/// A ring lower than this (relative to `psi(0)`) is reported as an origin peak.
pub const ORIGIN_PEAK_TOLERANCE: f64 = 1e-9;

/// Point where the iterates are pinned to 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Anchor {
    Origin,
    #[default]
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub anchor: Anchor,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 60, anchor: Anchor::Infinity }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidOption(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidOption("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// One iterate `f_n` with its energy.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub n: usize,
    /// `f_n` at the grid nodes.
    pub f: Vec<f64>,
    /// `f_n(0)`.
    pub f_origin: f64,
    pub delta: f64,
    pub energy: f64,
}

/// Serializable summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub params: ModelParams,
    pub a: f64,
    pub xi: f64,
    pub e0: EnergyZero,
    /// `g E0 + Delta_n` for `n = 0, 1, ...`, with `Delta_0 = 0`.
    pub energies: Vec<f64>,
    /// `Delta_1, Delta_2, ...`
    pub deltas: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub argmax_radius: f64,
    pub anchor: Anchor,
    /// Sign changes of `h` across the grid nodes.
    pub h_sign_changes: usize,
}

impl SolverReport {
    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("energy series starts with g E0")
    }

    /// `|Delta_n - Delta_{n-1}|` for `n = 2, 3, ...`
    pub fn delta_steps(&self) -> Vec<f64> {
        self.deltas.windows(2).map(|w| (w[1] - w[0]).abs()).collect()
    }
}

/// Converged (or last) iterate together with the curves it defines.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub report: SolverReport,
    /// `0` followed by the grid nodes.
    pub radii: Vec<f64>,
    /// `phi f`, normalised so `psi(0) = 1`.
    pub psi: Vec<f64>,
    /// Trial function normalised so `phi(0) = 1`.
    pub phi: Vec<f64>,
    pub f: Vec<f64>,
    pub f_origin: f64,
    grid: RadialGrid,
}

impl Solution {
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// `psi` interpolated at any `r` in `[0, r_max]`.
    pub fn psi_at(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 1.0;
        }
        self.grid.interpolate(&self.psi[1..], r)
    }

    /// Normalised trial function at any `r` in `[0, r_max]`.
    pub fn phi_at(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 1.0;
        }
        self.grid.interpolate(&self.phi[1..], r)
    }
}

/// Sub-quadrature of every gap between consecutive nodes (gap 0 is `[0, r_0]`).
#[derive(Debug, Clone)]
struct GapQuadrature {
    /// Sub-points of gap `i` are `start[i]..start[i + 1]`.
    start: Vec<usize>,
    weight: Vec<f64>,
    log_w: Vec<f64>,
    h: Vec<f64>,
    /// First node of the panel whose interpolant covers each point.
    panel_first: Vec<usize>,
    /// Interpolation coefficients, `order` per point.
    basis: Vec<f64>,
}

/// Precomputed trial data on one grid.
#[derive(Debug, Clone)]
pub struct Iteration<'a> {
    tf: &'a TrialFunction,
    grid: &'a RadialGrid,
    log_phi: Vec<f64>,
    log_phi_origin: f64,
    /// `W = 2 ln phi + 2k ln r` at the nodes.
    log_w: Vec<f64>,
    h: Vec<f64>,
    peak: usize,
    gaps: GapQuadrature,
}

fn panel_branch(grid: &RadialGrid, panel: usize) -> Branch {
    if grid.panels()[panel].b <= grid.r0() {
        Branch::Inner
    } else {
        Branch::Outer
    }
}

impl<'a> Iteration<'a> {
    pub fn new(tf: &'a TrialFunction, grid: &'a RadialGrid) -> Result<Self> {
        let k = tf.params().k();
        let nodes = grid.nodes();
        let log_phi: Vec<f64> = nodes.iter().map(|&r| tf.log_phi(r)).collect();
        let log_w: Vec<f64> = nodes.iter().zip(&log_phi).map(|(&r, lp)| 2.0 * lp + 2.0 * k * r.ln()).collect();
        let mut h = Vec::with_capacity(nodes.len());
        for panel in 0..grid.panels().len() {
            let branch = panel_branch(grid, panel);
            let first = grid.panels()[panel].first;
            for &r in &nodes[first..first + grid.order()] {
                h.push(tf.h_branch(r, branch));
            }
        }
        for (i, v) in log_w.iter().chain(&h).enumerate() {
            if !v.is_finite() {
                let radius = nodes[i % nodes.len()];
                return Err(Error::NonFinite { stage: "trial samples", radius });
            }
        }
        let peak = log_w
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > log_w[best] { i } else { best });
        let gaps = Self::gap_quadrature(tf, grid, &log_w)?;
        Ok(Self { tf, grid, log_phi, log_phi_origin: tf.log_phi(0.0), log_w, h, peak, gaps })
    }

    fn gap_quadrature(tf: &TrialFunction, grid: &RadialGrid, log_w: &[f64]) -> Result<GapQuadrature> {
        let k = tf.params().k();
        let rule: Rule = gauss_legendre(GAP_POINTS);
        let nodes = grid.nodes();
        let mut q = GapQuadrature {
            start: Vec::with_capacity(nodes.len() + 1),
            weight: Vec::new(),
            log_w: Vec::new(),
            h: Vec::new(),
            panel_first: Vec::new(),
            basis: Vec::new(),
        };
        for (i, &hi) in nodes.iter().enumerate() {
            q.start.push(q.weight.len());
            let (lo, splits) = if i == 0 {
                (0.0, 1)
            } else {
                let jump = (log_w[i] - log_w[i - 1]).abs();
                (nodes[i - 1], (1 + (jump / 2.0) as usize).min(MAX_GAP_SPLITS))
            };
            let panel = grid.panel_index(hi);
            let branch = panel_branch(grid, panel);
            let first = grid.panels()[panel].first;
            for s in 0..splits {
                let a = lo + (hi - lo) * s as f64 / splits as f64;
                let b = lo + (hi - lo) * (s + 1) as f64 / splits as f64;
                for (x, w) in rule.mapped(a, b) {
                    let lw = 2.0 * tf.log_phi(x) + 2.0 * k * x.ln();
                    let hx = tf.h_branch(x, branch);
                    if !(lw.is_finite() && hx.is_finite()) {
                        return Err(Error::NonFinite { stage: "gap quadrature", radius: x });
                    }
                    q.weight.push(w);
                    q.log_w.push(lw);
                    q.h.push(hx);
                    q.panel_first.push(first);
                    q.basis.extend(grid.basis_at(panel, x));
                }
            }
        }
        q.start.push(q.weight.len());
        Ok(q)
    }

    /// Replaces `h` by `h_fn` everywhere; used to probe the kernel with stubs.
    pub fn with_perturbation(mut self, h_fn: impl Fn(f64) -> f64) -> Self {
        self.h = self.grid.nodes().iter().map(|&r| h_fn(r)).collect();
        let mut sub = Vec::with_capacity(self.gaps.h.len());
        for i in 0..self.grid.len() {
            let lo = if i == 0 { 0.0 } else { self.grid.nodes()[i - 1] };
            let hi = self.grid.nodes()[i];
            let (s, e) = (self.gaps.start[i], self.gaps.start[i + 1]);
            // Sub-point radii are not stored; rebuild them from the same layout.
            let splits = (e - s) / GAP_POINTS;
            let rule = gauss_legendre(GAP_POINTS);
            for j in 0..splits {
                let a = lo + (hi - lo) * j as f64 / splits as f64;
                let b = lo + (hi - lo) * (j + 1) as f64 / splits as f64;
                sub.extend(rule.mapped(a, b).map(|(x, _)| h_fn(x)));
            }
        }
        self.gaps.h = sub;
        self
    }

    pub fn trial(&self) -> &TrialFunction {
        self.tf
    }

    pub fn grid(&self) -> &RadialGrid {
        self.grid
    }

    /// `h` at the grid nodes.
    pub fn h_nodes(&self) -> &[f64] {
        &self.h
    }

    /// `2 ln phi + 2k ln r` at the grid nodes.
    pub fn log_weight(&self) -> &[f64] {
        &self.log_w
    }

    pub fn delta_step(&self, f_prev: &[f64]) -> Result<f64> {
        let hf: Vec<f64> = self.h.iter().zip(f_prev).map(|(h, f)| h * f).collect();
        let (num, _) = weighted_integral_scaled(&hf, self.grid, &self.log_w)?;
        let (den, _) = weighted_integral_scaled(f_prev, self.grid, &self.log_w)?;
        if den.abs() <= f64::MIN_POSITIVE {
            return Err(Error::VanishingDenominator);
        }
        let delta = num / den;
        if !delta.is_finite() {
            return Err(Error::NonFinite { stage: "delta step", radius: f64::NAN });
        }
        Ok(delta)
    }

    fn sub_f(&self, f_prev: &[f64], point: usize) -> f64 {
        let order = self.grid.order();
        let first = self.gaps.panel_first[point];
        let basis = &self.gaps.basis[point * order..(point + 1) * order];
        basis.iter().zip(&f_prev[first..first + order]).map(|(b, f)| b * f).sum()
    }

    /// `sum over gap i of weight * exp(W(x) - W_ref) * (delta - h) f`.
    fn gap_sum(&self, f_prev: &[f64], delta: f64, gap: usize, w_ref: f64) -> f64 {
        let range = self.gaps.start[gap]..self.gaps.start[gap + 1];
        compensated_sum(range.map(|p| {
            let q = (delta - self.gaps.h[p]) * self.sub_f(f_prev, p);
            self.gaps.weight[p] * (self.gaps.log_w[p] - w_ref).exp() * q
        }))
    }

    /// `I(r_i) / w(r_i)` at every node.
    fn ratio(&self, f_prev: &[f64], delta: f64) -> Vec<f64> {
        let m = self.grid.len();
        let lw = &self.log_w;
        let mut out = vec![0.0; m];
        let mut left = 0.0;
        for i in 0..=self.peak {
            let carry = if i == 0 { 0.0 } else { (lw[i - 1] - lw[i]).exp() * left };
            left = carry + self.gap_sum(f_prev, delta, i, lw[i]);
            out[i] = left;
        }
        let mut right = 0.0;
        for i in (self.peak + 1..m).rev() {
            if i + 1 < m {
                right = (lw[i + 1] - lw[i]).exp() * right + self.gap_sum(f_prev, delta, i + 1, lw[i]);
            }
            out[i] = -right;
        }
        out
    }

    /// Next iterate; returns node values and the value at the origin.
    pub fn f_step(&self, f_prev: &[f64], delta: f64, anchor: Anchor) -> Result<(Vec<f64>, f64)> {
        if f_prev.len() != self.grid.len() {
            return Err(Error::LengthMismatch { expected: self.grid.len(), found: f_prev.len() });
        }
        let ratio = self.ratio(f_prev, delta);
        let cumulative = self.grid.cumulative_integral(&ratio);
        let total = *cumulative.last().expect("grid is not empty");
        let (f, origin): (Vec<f64>, f64) = match anchor {
            Anchor::Infinity => (cumulative.iter().map(|c| 1.0 + 2.0 * (total - c)).collect(), 1.0 + 2.0 * total),
            Anchor::Origin => (cumulative.iter().map(|c| 1.0 - 2.0 * c).collect(), 1.0),
        };
        if let Some(i) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { stage: "f step", radius: self.grid.nodes()[i] });
        }
        Ok((f, origin))
    }

    pub fn run(&self, opts: &SolveOptions) -> Result<Solution> {
        opts.validate()?;
        let g_e0 = self.tf.params().g() * self.tf.e0().total;
        let mut state = IterationState { n: 0, f: vec![1.0; self.grid.len()], f_origin: 1.0, delta: 0.0, energy: g_e0 };
        let mut energies = vec![g_e0];
        let mut deltas = Vec::new();
        let mut converged = false;
        while state.n < opts.max_iter {
            let n = state.n + 1;
            let delta = self.delta_step(&state.f)?;
            let (f, f_origin) = self.f_step(&state.f, delta, opts.anchor)?;
            if f_origin <= 0.0 {
                return Err(Error::PositivityViolation { iteration: n, radius: 0.0 });
            }
            if let Some(i) = f.iter().position(|&v| v <= 0.0) {
                return Err(Error::PositivityViolation { iteration: n, radius: self.grid.nodes()[i] });
            }
            let previous = state.delta;
            state = IterationState { n, f, f_origin, delta, energy: g_e0 + delta };
            energies.push(state.energy);
            deltas.push(delta);
            if n >= 2 && (delta - previous).abs() <= opts.tol * state.energy.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        Ok(self.assemble(state, energies, deltas, converged, opts.anchor))
    }

    fn assemble(&self, state: IterationState, energies: Vec<f64>, deltas: Vec<f64>, converged: bool, anchor: Anchor) -> Solution {
        let mut radii = Vec::with_capacity(self.grid.len() + 1);
        radii.push(0.0);
        radii.extend_from_slice(self.grid.nodes());
        let mut phi = vec![1.0];
        phi.extend(self.log_phi.iter().map(|lp| (lp - self.log_phi_origin).exp()));
        let mut psi = vec![1.0];
        psi.extend(phi[1..].iter().zip(&state.f).map(|(p, f)| p * f / state.f_origin));
        let report = SolverReport {
            params: *self.tf.params(),
            a: self.tf.config().a(),
            xi: self.tf.xi(),
            e0: self.tf.e0(),
            energies,
            deltas,
            converged,
            iterations: state.n,
            argmax_radius: argmax_radius(&radii, &psi),
            anchor,
            h_sign_changes: sign_changes(&self.h),
        };
        Solution { report, radii, psi, phi, f: state.f, f_origin: state.f_origin, grid: self.grid.clone() }
    }
}

fn sign_changes(values: &[f64]) -> usize {
    let signs: Vec<bool> = values.iter().filter(|v| **v != 0.0).map(|v| *v > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Radius of the maximum of `values`, refined by a parabola through the
/// discrete maximum and its neighbours.
///
/// Peaks within [`ORIGIN_PEAK_TOLERANCE`] of `values[0]` (relative) count as
/// origin peaks, as do parabolic vertices at or inside the first node.
pub fn argmax_radius(radii: &[f64], values: &[f64]) -> f64 {
    let Some((i, &top)) = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
        return 0.0;
    };
    if i == 0 || top - values[0] <= ORIGIN_PEAK_TOLERANCE * values[0].abs() {
        return 0.0;
    }
    if i + 1 == values.len() {
        return radii[i];
    }
    let (x0, x1, x2) = (radii[i - 1], radii[i], radii[i + 1]);
    let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if curvature >= 0.0 {
        return x1;
    }
    let vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
    let vertex = vertex.clamp(x0, x2);
    if i == 1 && vertex <= radii[1] {
        0.0
    } else {
        vertex
    }
}

/// Builds the trial function and runs the iteration on `grid`.
pub fn solve(cfg: TrialConfig, grid: &RadialGrid, opts: &SolveOptions) -> Result<Solution> {
    let tf = build_trial(cfg)?;
    Iteration::new(&tf, grid)?.run(opts)
}

/// [`solve`] on a freshly built grid.
pub fn solve_model(params: ModelParams, a: f64, spec: &GridSpec, opts: &SolveOptions) -> Result<Solution> {
    let cfg = TrialConfig::new(params, a)?;
    let grid = build_grid(&params, spec)?;
    solve(cfg, &grid, opts)
}
