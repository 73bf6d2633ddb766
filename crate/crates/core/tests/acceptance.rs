//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sombrero::iteration::solve_model;
use sombrero::numerics::grid::cutoff_radius;
use sombrero::oracle::ground_energy;
use sombrero::reference::{solve_reference, REFERENCE_ROWS, REFERENCE_TOLERANCE};
use sombrero::trialfn::{s0, s0_prime, DEFAULT_TRIAL_PARAMETER};
use sombrero::{potential, GridSpec, ModelParams, Solution, SolveOptions, TrialConfig};

const TABLE_TOL: f64 = 1e-10;
const TABLE_MAX_ITER: usize = 80;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn analytic() -> ModelParams {
    ModelParams::new(3, 1.0, 2.0).unwrap()
}

fn table_runs() -> Vec<Solution> {
    REFERENCE_ROWS
        .iter()
        .map(|row| solve_reference(row, &GridSpec::default(), TABLE_TOL, TABLE_MAX_ITER).unwrap())
        .collect()
}

fn analytic_energy() -> Outcome {
    let start = Instant::now();
    let sol = solve_model(analytic(), DEFAULT_TRIAL_PARAMETER, &GridSpec::default(), &SolveOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let exact = (5.0f64 / 3.0).powf(1.5);
    let err = (sol.report.final_energy() - exact).abs();
    let pass = sol.report.converged && err <= 2e-3 && elapsed.as_secs_f64() <= 5.0;
    outcome(pass, format!("E = {:.8}, |E - (5/3)^1.5| = {err:.2e}, {:.3} s", sol.report.final_energy(), elapsed.as_secs_f64()))
}

fn analytic_wave_function() -> Outcome {
    let sol = solve_model(analytic(), DEFAULT_TRIAL_PARAMETER, &GridSpec::default(), &SolveOptions::default()).unwrap();
    let exact = |r: f64| (-0.25 * r.powi(4)).exp();
    let on_nodes = sol
        .radii
        .iter()
        .zip(&sol.psi)
        .filter(|(r, _)| **r <= 3.0)
        .map(|(&r, &v)| (v - exact(r)).abs())
        .fold(0.0, f64::max);
    let between = (0..=3000)
        .map(|i| i as f64 * 1e-3)
        .map(|r| (sol.psi_at(r) - exact(r)).abs())
        .fold(0.0, f64::max);
    let err = on_nodes.max(between);
    outcome(err <= 1e-4, format!("sup |psi - exp(-r^4/4)| on [0, 3] = {err:.2e}"))
}

fn table_energies(runs: &[Solution]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (row, sol) in REFERENCE_ROWS.iter().zip(runs) {
        let dev = (sol.report.final_energy() - row.converged()).abs();
        pass &= sol.report.converged && dev <= REFERENCE_TOLERANCE;
        parts.push(format!("({}, {}) {:.5} vs {:.4}", row.g, row.a_shape, sol.report.final_energy(), row.converged()));
    }
    outcome(pass, parts.join("; "))
}

fn oracle_cross_check(runs: &[Solution]) -> Outcome {
    let mut pass = true;
    let mut worst_dev = 0.0f64;
    let mut ratios = Vec::new();
    for (row, sol) in REFERENCE_ROWS.iter().zip(runs) {
        let p = row.params();
        let r_max = sol.grid().r_max();
        let e: Vec<f64> = [0.01, 0.005, 0.0025].iter().map(|&h| ground_energy(&p, h, r_max).unwrap().energy).collect();
        let extrapolated = (4.0 * e[1] - e[0]) / 3.0;
        let dev = (extrapolated - sol.report.final_energy()).abs();
        let ratio = (e[0] - e[1]) / (e[1] - e[2]);
        worst_dev = worst_dev.max(dev);
        pass &= dev <= 1e-3 && (3.6..=4.4).contains(&ratio);
        ratios.push(format!("{ratio:.3}"));
    }
    outcome(pass, format!("max |E_oracle - E| = {worst_dev:.2e}; step-halving ratios [{}]", ratios.join(", ")))
}

fn shape_transition(runs: &[Solution]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (row, sol) in REFERENCE_ROWS.iter().zip(runs) {
        let r = sol.report.argmax_radius;
        pass &= if row.origin_peaked() { r == 0.0 } else { r > 0.0 };
        parts.push(format!("({}, {}) argmax {r:.4}", row.g, row.a_shape));
    }
    outcome(pass, parts.join("; "))
}

fn trial_independence() -> Outcome {
    let energies: Vec<f64> = [2.0, 3.0, 4.0, 5.0]
        .iter()
        .map(|&a| solve_model(analytic(), a, &GridSpec::default(), &SolveOptions::default()).unwrap())
        .map(|sol| sol.report.final_energy())
        .collect();
    let spread = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max) - energies.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(spread <= 5e-4, format!("a = 2, 3, 4, 5 spread {spread:.2e}"))
}

fn centred(f: impl Fn(f64) -> f64, r: f64, eps: f64) -> f64 {
    (-f(r + 2.0 * eps) + 8.0 * f(r + eps) - 8.0 * f(r - eps) + f(r - 2.0 * eps)) / (12.0 * eps)
}

fn algebra() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_2008);
    let mut worst_residual = 0.0f64;
    for _ in 0..10 {
        let g = rng.gen_range(0.5..2.0);
        let a_shape = rng.gen_range(1.0..3.0);
        let a = rng.gen_range(1.0..5.0);
        let p = ModelParams::new(3, g, a_shape).unwrap();
        let cfg = TrialConfig::new(p, a).unwrap();
        let ge0 = g * cfg.energy_zero().total;
        let r_end = 1.2 * cutoff_radius(&p, 300.0).unwrap();
        let (eps, k) = (1e-3, p.k());
        let l = |x: f64| cfg.log_phi_plus(x);
        let mut r = 0.05;
        while r <= r_end {
            let d1 = centred(l, r, eps);
            let d2 = (-l(r + 2.0 * eps) + 16.0 * l(r + eps) - 30.0 * l(r) + 16.0 * l(r - eps) - l(r - 2.0 * eps)) / (12.0 * eps * eps);
            let res = -0.5 * (d2 + d1 * d1 + 2.0 * k * d1 / r) + potential(r, &p) - cfg.h_plus(r) - ge0;
            worst_residual = worst_residual.max(res.abs());
            r += 1e-3;
        }
    }

    let mut worst_anti = 0.0f64;
    let mut worst_identity = 0.0f64;
    for _ in 0..20 {
        let p = ModelParams::new(3, rng.gen_range(0.5..2.0), rng.gen_range(1.0..3.0)).unwrap();
        let cfg = TrialConfig::new(p, rng.gen_range(1.0..5.0)).unwrap();
        let r = rng.gen_range(0.05..4.0 * p.r0());
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
        worst_anti = worst_anti.max(rel(centred(|x| s0(x, &p), r, 1e-3), s0_prime(r, &p)));
        worst_anti = worst_anti.max(rel(centred(|x| cfg.s1(x), r, 1e-3), cfg.s1_prime(r)));
        let s1p = cfg.s1_prime(r);
        let s1pp = centred(|x| cfg.s1_prime(x), r, 1e-3);
        worst_identity = worst_identity.max(rel(0.5 * (s1p * s1p - s1pp), cfg.s1_curvature_term(r)));
    }
    let pass = worst_residual <= 1e-4 && worst_anti <= 1e-6 && worst_identity <= 1e-6;
    outcome(
        pass,
        format!("residual {worst_residual:.2e}; antiderivatives {worst_anti:.2e}; curvature identity {worst_identity:.2e}"),
    )
}

/// `|Delta_{n+1} - Delta_n| <= |Delta_n - Delta_{n-1}| / 3` for every `n >= 3`,
/// until the steps reach rounding level.
fn contraction(runs: &[Solution]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (row, sol) in REFERENCE_ROWS.iter().zip(runs) {
        // steps[j] = |Delta_{j+2} - Delta_{j+1}|
        let steps = sol.report.delta_steps();
        let floor = 1e-12 * sol.report.final_energy().abs().max(1.0);
        let factors: Vec<f64> =
            steps.windows(2).skip(1).take_while(|w| w[1] > floor).map(|w| w[0] / w[1]).collect();
        let worst = factors.iter().copied().fold(f64::INFINITY, f64::min);
        pass &= !factors.is_empty() && worst >= 3.0;
        parts.push(format!("({}, {}) min factor {worst:.2} over {}", row.g, row.a_shape, factors.len()));
    }
    outcome(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let runs = table_runs();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 analytic energy", analytic_energy()),
        ("2 analytic wave function", analytic_wave_function()),
        ("3 reference energies", table_energies(&runs)),
        ("4 oracle cross-check", oracle_cross_check(&runs)),
        ("5 shape transition", shape_transition(&runs)),
        ("6 trial-parameter independence", trial_independence()),
        ("7 algebra", algebra()),
        ("8 contraction factor", contraction(&runs)),
    ];
    let mut failed = 0;
    for (name, out) in &criteria {
        println!("criterion {name}: {} ({})", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        failed += usize::from(!out.pass);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
