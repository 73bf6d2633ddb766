//! WebAssembly bindings for the browser demo in `www/`.

use sombrero::iteration::{solve_model, Anchor};
use sombrero::{potential, GridSpec, ModelParams, Solution, SolveOptions};
use wasm_bindgen::prelude::*;

const TOL: f64 = 1e-10;
const MAX_ITER: usize = 60;
/// Coarser grid for the phase map, where many points are solved per redraw.
const MAP_DENSITY: f64 = 64.0;

fn samples(r_end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|i| r_end * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Solves with the default anchor, then with the other one if that fails.
fn solve_either(params: ModelParams, a: f64, spec: &GridSpec) -> Result<Solution, String> {
    let mut last = String::new();
    for anchor in [Anchor::Infinity, Anchor::Origin] {
        let opts = SolveOptions { tol: TOL, max_iter: MAX_ITER, anchor };
        match solve_model(params, a, spec, &opts) {
            Ok(sol) if sol.report.converged => return Ok(sol),
            Ok(_) => last = format!("not converged after {MAX_ITER} iterations"),
            Err(e) => last = e.to_string(),
        }
    }
    Err(last)
}

/// Ground state sampled on `[0, r_end]`, both curves scaled to peak at 1.
#[wasm_bindgen]
pub struct GroundState {
    energy: f64,
    energies: Vec<f64>,
    argmax_radius: f64,
    iterations: usize,
    radii: Vec<f64>,
    psi: Vec<f64>,
    trial: Vec<f64>,
}

#[wasm_bindgen]
impl GroundState {
    #[wasm_bindgen(getter)]
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Energy estimate after each iteration.
    #[wasm_bindgen(getter)]
    pub fn energies(&self) -> Vec<f64> {
        self.energies.clone()
    }

    #[wasm_bindgen(getter, js_name = argmaxRadius)]
    pub fn argmax_radius(&self) -> f64 {
        self.argmax_radius
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[wasm_bindgen(getter)]
    pub fn radii(&self) -> Vec<f64> {
        self.radii.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn psi(&self) -> Vec<f64> {
        self.psi.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn trial(&self) -> Vec<f64> {
        self.trial.clone()
    }
}

fn scaled(values: Vec<f64>) -> Vec<f64> {
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.into_iter().map(|v| v / peak).collect()
}

pub fn compute_ground_state(n: u32, g: f64, a_shape: f64, a_trial: f64, r_end: f64, count: usize) -> Result<GroundState, String> {
    let params = ModelParams::new(n, g, a_shape).map_err(|e| e.to_string())?;
    let sol = solve_either(params, a_trial, &GridSpec::default())?;
    let r_end = r_end.min(sol.grid().r_max());
    let radii = samples(r_end, count);
    let psi = scaled(radii.iter().map(|&r| sol.psi_at(r)).collect());
    let trial = scaled(radii.iter().map(|&r| sol.phi_at(r)).collect());
    Ok(GroundState {
        energy: sol.report.final_energy(),
        energies: sol.report.energies.clone(),
        argmax_radius: sol.report.argmax_radius,
        iterations: sol.report.iterations,
        radii,
        psi,
        trial,
    })
}

/// Peak radius of the ground state over a `g` by `A` lattice, row-major in `g`.
/// Cells that fail to converge are `NaN`.
pub fn compute_phase_map(n: u32, g: (f64, f64, usize), a_shape: (f64, f64, usize), a_trial: f64) -> Vec<f64> {
    let spec = GridSpec { points_per_unit: MAP_DENSITY, ..GridSpec::default() };
    let lattice = |(lo, hi, count): (f64, f64, usize)| -> Vec<f64> {
        samples(hi - lo, count).into_iter().map(|x| lo + x).collect()
    };
    let a_values = lattice(a_shape);
    lattice(g)
        .into_iter()
        .flat_map(|gv| a_values.iter().map(move |&av| (gv, av)))
        .map(|(gv, av)| {
            ModelParams::new(n, gv, av)
                .map_err(|e| e.to_string())
                .and_then(|p| solve_either(p, a_trial, &spec))
                .map_or(f64::NAN, |sol| sol.report.argmax_radius)
        })
        .collect()
}

pub fn compute_potential(n: u32, g: f64, a_shape: f64, r_end: f64, count: usize) -> Result<Vec<f64>, String> {
    let params = ModelParams::new(n, g, a_shape).map_err(|e| e.to_string())?;
    Ok(samples(r_end, count).into_iter().map(|r| potential(r, &params)).collect())
}

#[wasm_bindgen(js_name = groundState)]
pub fn ground_state(n: u32, g: f64, a_shape: f64, a_trial: f64, r_end: f64, count: usize) -> Result<GroundState, JsValue> {
    compute_ground_state(n, g, a_shape, a_trial, r_end, count).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = phaseMap)]
#[allow(clippy::too_many_arguments)]
pub fn phase_map(
    n: u32,
    g_min: f64,
    g_max: f64,
    g_count: usize,
    a_min: f64,
    a_max: f64,
    a_count: usize,
    a_trial: f64,
) -> Vec<f64> {
    compute_phase_map(n, (g_min, g_max, g_count), (a_min, a_max, a_count), a_trial)
}

#[wasm_bindgen(js_name = potentialCurve)]
pub fn potential_curve(n: u32, g: f64, a_shape: f64, r_end: f64, count: usize) -> Result<Vec<f64>, JsValue> {
    compute_potential(n, g, a_shape, r_end, count).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_ground_state() {
        let gs = compute_ground_state(3, 1.0, 2.0, 2.0, 3.0, 61).unwrap();
        assert!((gs.energy - (5.0f64 / 3.0).powf(1.5)).abs() < 1e-8);
        assert_eq!(gs.radii.len(), 61);
        for (&r, &p) in gs.radii.iter().zip(&gs.psi) {
            assert!((p - (-0.25 * r.powi(4)).exp()).abs() < 1e-8);
        }
        assert!(gs.trial[0] < 1.0);
    }

    #[test]
    fn invalid_input_is_an_error() {
        assert!(compute_ground_state(0, 1.0, 2.0, 2.0, 3.0, 10).is_err());
        assert!(compute_potential(3, -1.0, 2.0, 3.0, 10).is_err());
    }

    #[test]
    fn phase_map_corners() {
        let map = compute_phase_map(3, (0.5, 2.0, 2), (1.0, 3.0, 2), 2.0);
        assert_eq!(map.len(), 4);
        assert_eq!(map[0], 0.0);
        assert!(map[3] > 0.0);
        assert!(compute_phase_map(3, (0.5, 2.0, 0), (1.0, 3.0, 4), 2.0).is_empty());
    }

    #[test]
    fn potential_vanishes_at_r0() {
        let p = ModelParams::new(3, 1.0, 2.0).unwrap();
        let v = compute_potential(3, 1.0, 2.0, 2.0 * p.r0(), 3).unwrap();
        assert!(v[1].abs() < 1e-12);
        assert!((v[0] - 0.5 * 2.0 * p.r0_sq().powi(3)).abs() < 1e-12);
    }
}
