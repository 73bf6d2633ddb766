//! Truncated radial grid of right-anchored Gauss-Radau panels.
//!
//! Breakpoints sit at `0`, `r0`, `2 r0` and the cutoff `r_max`. Panels on
//! `[0, 2 r0]` are twice as dense as the rest. Because each panel includes its
//! right endpoint, `r0` and `r_max` are nodes while `r = 0` never is.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::compensated_sum;
use crate::numerics::quadrature::{gauss_radau_right, Interpolant, Rule};
use crate::trialfn::s0;

pub const MIN_DENSITY: f64 = 64.0;
pub const DEFAULT_DENSITY: f64 = 128.0;
pub const DEFAULT_OVERFLOW_BUDGET: f64 = 300.0;
pub const DEFAULT_PANEL_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Nodes per unit length away from the origin.
    pub points_per_unit: f64,
    /// Cutoff rule: smallest `r` with `g S0(r) >= overflow_budget`.
    pub overflow_budget: f64,
    pub panel_order: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points_per_unit: DEFAULT_DENSITY,
            overflow_budget: DEFAULT_OVERFLOW_BUDGET,
            panel_order: DEFAULT_PANEL_ORDER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    /// Index of the first node in this panel.
    pub first: usize,
}

impl Panel {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    pub fn to_reference(&self, r: f64) -> f64 {
        (2.0 * r - self.a - self.b) / (self.b - self.a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: Vec<Panel>,
    order: usize,
    r_max: f64,
    r0: f64,
    k: f64,
    interp: Interpolant,
    integration: Vec<Vec<f64>>,
}

/// Smallest radius where `g S0(r)` reaches `budget`.
pub fn cutoff_radius(p: &ModelParams, budget: f64) -> Result<f64> {
    let excess = |r: f64| p.g() * s0(r, p) - budget;
    let mut lo = p.r0();
    if !(budget.is_finite() && budget > 0.0) || excess(lo) >= 0.0 {
        return Err(Error::CutoffSearch(budget));
    }
    let mut hi = lo + 1.0;
    let mut expansions = 0;
    while excess(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 || !hi.is_finite() {
            return Err(Error::CutoffSearch(budget));
        }
    }
    // S0 is increasing beyond r0, so plain bisection converges to the crossing.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(hi)
}

pub fn build_grid(p: &ModelParams, spec: &GridSpec) -> Result<RadialGrid> {
    if spec.points_per_unit.is_nan() || spec.points_per_unit < MIN_DENSITY {
        return Err(Error::DensityTooLow(spec.points_per_unit));
    }
    if spec.panel_order < 2 {
        return Err(Error::InvalidOption(format!("panel order {} < 2", spec.panel_order)));
    }
    let r_max = cutoff_radius(p, spec.overflow_budget)?;
    let r0 = p.r0();
    let inner_end = (2.0 * r0).min(r_max);
    let mut segments = vec![(0.0, r0, 2.0), (r0, inner_end, 2.0)];
    if r_max > inner_end {
        segments.push((inner_end, r_max, 1.0));
    }

    let order = spec.panel_order;
    let rule = gauss_radau_right(order);
    let mut panels = Vec::new();
    for (start, end, boost) in segments {
        if end <= start {
            continue;
        }
        let width = order as f64 / (spec.points_per_unit * boost);
        let count = ((end - start) / width).ceil().max(1.0) as usize;
        for j in 0..count {
            let a = start + (end - start) * j as f64 / count as f64;
            let b = if j + 1 == count { end } else { start + (end - start) * (j + 1) as f64 / count as f64 };
            panels.push(Panel { a, b, first: panels.len() * order });
        }
    }

    Ok(RadialGrid::from_panels(panels, &rule, r0, p.k()))
}

impl RadialGrid {
    fn from_panels(panels: Vec<Panel>, rule: &Rule, r0: f64, k: f64) -> Self {
        let order = rule.len();
        let mut nodes = Vec::with_capacity(panels.len() * order);
        let mut weights = Vec::with_capacity(panels.len() * order);
        for panel in &panels {
            for (x, w) in rule.mapped(panel.a, panel.b) {
                nodes.push(x);
                weights.push(w);
            }
            // Right endpoint exactly, not via the affine map.
            *nodes.last_mut().expect("panel has nodes") = panel.b;
        }
        let r_max = panels.last().map_or(0.0, |p| p.b);
        let interp = Interpolant::new(&rule.nodes);
        let integration = interp.integration_matrix();
        Self { nodes, weights, panels, order, r_max, r0, k, interp, integration }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// The potential minimum, always a panel boundary.
    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Index of the panel containing `r`; panels are half-open `(a, b]`.
    pub fn panel_index(&self, r: f64) -> usize {
        let idx = self.panels.partition_point(|p| p.b < r);
        idx.min(self.panels.len() - 1)
    }

    /// Interpolation coefficients for `r` over the nodes of `panel`.
    pub fn basis_at(&self, panel: usize, r: f64) -> Vec<f64> {
        let x = self.panels[panel].to_reference(r);
        self.interp.basis(x)
    }

    /// Interpolates node samples at `r`, using the panel that contains it.
    pub fn interpolate(&self, values: &[f64], r: f64) -> f64 {
        let pi = self.panel_index(r);
        let first = self.panels[pi].first;
        let x = self.panels[pi].to_reference(r);
        self.interp.eval(&values[first..first + self.order], x)
    }

    /// `C[i] = integral from 0 to nodes[i]` of the interpolated samples.
    pub fn cumulative_integral(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; values.len()];
        let mut start = 0.0;
        for panel in &self.panels {
            let local = &values[panel.first..panel.first + self.order];
            let half = panel.half_width();
            for (i, row) in self.integration.iter().enumerate() {
                let s = compensated_sum(row.iter().zip(local).map(|(a, b)| a * b));
                out[panel.first + i] = start + half * s;
            }
            start = out[panel.first + self.order - 1];
        }
        out
    }
}

/// Overflow-safe weighted sum `sum_i w_i f_i exp(L_i)`, returned as
/// `(mantissa, shift)` with value `mantissa * exp(shift)`.
pub fn weighted_integral_scaled(f: &[f64], grid: &RadialGrid, log_weight: &[f64]) -> Result<(f64, f64)> {
    if f.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: f.len() });
    }
    if log_weight.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: log_weight.len() });
    }
    let shift = log_weight.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Err(Error::EmptyLogWeights);
    }
    let mantissa = compensated_sum(
        grid.weights
            .iter()
            .zip(f)
            .zip(log_weight)
            .map(|((w, fi), lw)| w * fi * (lw - shift).exp()),
    );
    Ok((mantissa, shift))
}

/// `integral f(r) exp(L(r)) dr` over the grid, with `L = 2 ln phi + 2k ln r`.
pub fn weighted_integral(f: &[f64], grid: &RadialGrid, log_weight: &[f64]) -> Result<f64> {
    let (mantissa, shift) = weighted_integral_scaled(f, grid, log_weight)?;
    Ok(mantissa * shift.exp())
}
