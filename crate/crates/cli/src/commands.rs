//! Subcommand implementations. Each returns the process exit status.

use anyhow::{ensure, Context, Result};
use rayon::prelude::*;
use sombrero::iteration::{solve_model, Anchor};
use sombrero::oracle::extrapolated_energy;
use sombrero::reference::{ReferenceRow, REFERENCE_ANCHOR, REFERENCE_ROWS, REFERENCE_TOLERANCE};
use sombrero::{build_grid, exact_case, ModelParams, Solution, TrialConfig};

use crate::output::{json_bytes, write_file, Cell, Table};
use crate::{Cli, FiguresArgs, IterArgs, OracleArgs, SolveArgs, SweepArgs, Table1Args, EXIT_NOT_CONVERGED, EXIT_TABLE_MISMATCH};

/// Largest accepted gap between the iteration and the extrapolated oracle.
const ORACLE_TOLERANCE: f64 = 1e-3;

fn anchor_name(anchor: Anchor) -> &'static str {
    match anchor {
        Anchor::Origin => "origin",
        Anchor::Infinity => "infinity",
    }
}

fn other(anchor: Anchor) -> Anchor {
    match anchor {
        Anchor::Origin => Anchor::Infinity,
        Anchor::Infinity => Anchor::Origin,
    }
}

fn run(params: ModelParams, a: f64, iter: &IterArgs, anchor: Anchor) -> sombrero::error::Result<Solution> {
    let opts = sombrero::SolveOptions { anchor, ..iter.options(anchor) };
    solve_model(params, a, &iter.grid.spec(), &opts)
}

pub fn solve(cli: &Cli, args: &SolveArgs) -> Result<u8> {
    let params = args.problem.params()?;
    let sol = run(params, args.a_trial, &args.iter, args.iter.options(Anchor::default()).anchor)?;
    let report = &sol.report;
    let path = write_file(&cli.out, "report.json", &json_bytes(report)?)?;
    println!(
        "E = {} after {} iterations ({}), argmax r = {}; wrote {}",
        crate::output::format_sig(report.final_energy()),
        report.iterations,
        if report.converged { "converged" } else { "not converged" },
        crate::output::format_sig(report.argmax_radius),
        path.display()
    );
    if args.curves {
        let mut table = Table::new(["r", "phi", "psi", "f"]);
        let f = std::iter::once(sol.f_origin).chain(sol.f.iter().copied());
        for (((&r, &phi), &psi), f) in sol.radii.iter().zip(&sol.phi).zip(&sol.psi).zip(f) {
            table.push(vec![r.into(), phi.into(), psi.into(), f.into()]);
        }
        let path = table.write(&cli.out, "curves", cli.format)?;
        println!("wrote {}", path.display());
    }
    Ok(if report.converged { 0 } else { EXIT_NOT_CONVERGED })
}

struct TableRun {
    row: ReferenceRow,
    a: f64,
    anchor: Anchor,
    outcome: Result<(Solution, f64), String>,
}

impl TableRun {
    fn passes(&self) -> bool {
        match &self.outcome {
            Ok((sol, oracle)) => {
                let e = sol.report.final_energy();
                sol.report.converged
                    && (e - self.row.converged()).abs() <= REFERENCE_TOLERANCE
                    && (oracle - e).abs() <= ORACLE_TOLERANCE
            }
            Err(_) => false,
        }
    }
}

pub fn table1(cli: &Cli, args: &Table1Args) -> Result<u8> {
    let anchor = args.iter.options(REFERENCE_ANCHOR).anchor;
    let runs: Vec<TableRun> = REFERENCE_ROWS
        .par_iter()
        .map(|row| {
            let a = args.a_trial.unwrap_or(row.trial_parameter);
            let outcome = (|| {
                let params = row.params();
                let grid = build_grid(&params, &args.iter.grid.spec())?;
                let sol = sombrero::solve(TrialConfig::new(params, a)?, &grid, &args.iter.options(anchor))?;
                let oracle = extrapolated_energy(&params, args.step, grid.r_max())?;
                Ok::<_, sombrero::error::Error>((sol, oracle.energy))
            })()
            .map_err(|e| e.to_string());
            TableRun { row: *row, a, anchor, outcome }
        })
        .collect();

    let mut headers: Vec<String> = ["g", "A", "a", "anchor"].map(String::from).to_vec();
    headers.extend((0..6).map(|n| format!("E{n}")));
    headers.extend(
        ["energy", "reference", "deviation", "oracle", "oracle_deviation", "converged", "iterations", "argmax_radius", "status"]
            .map(String::from),
    );
    let mut table = Table::new(headers);
    let mut failures = 0;
    for run in &runs {
        let pass = run.passes();
        failures += usize::from(!pass);
        let mut cells: Vec<Cell> = vec![run.row.g.into(), run.row.a_shape.into(), run.a.into(), anchor_name(run.anchor).into()];
        match &run.outcome {
            Ok((sol, oracle)) => {
                let r = &sol.report;
                let e = r.final_energy();
                cells.extend((0..6).map(|n| Cell::from(r.energies.get(n).copied())));
                cells.extend([
                    e.into(),
                    run.row.converged().into(),
                    (e - run.row.converged()).into(),
                    (*oracle).into(),
                    (oracle - e).into(),
                    r.converged.into(),
                    r.iterations.into(),
                    r.argmax_radius.into(),
                    (if pass { "pass" } else { "fail" }).into(),
                ]);
                println!(
                    "{}: E = {:.7} (reference {:.4}, oracle {:.7}) {}",
                    run.row.label(),
                    e,
                    run.row.converged(),
                    oracle,
                    if pass { "PASS" } else { "FAIL" }
                );
            }
            Err(msg) => {
                cells.extend((0..6).map(|_| Cell::Missing));
                cells.extend([Cell::Missing, run.row.converged().into()]);
                cells.extend((0..6).map(|_| Cell::Missing));
                cells.push(format!("error: {msg}").into());
                println!("{}: error: {msg} FAIL", run.row.label());
            }
        }
        table.push(cells);
    }
    let path = table.write(&cli.out, "table1", cli.format)?;
    println!("{} of {} rows pass; wrote {}", runs.len() - failures, runs.len(), path.display());
    Ok(if failures == 0 { 0 } else { EXIT_TABLE_MISMATCH })
}

/// Samples of `curve` on `radii`, scaled so the largest is 1.
fn normalised(radii: &[f64], curve: impl Fn(f64) -> f64) -> Vec<f64> {
    let values: Vec<f64> = radii.iter().map(|&r| curve(r)).collect();
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().map(|v| v / peak).collect()
}

fn figure(radii: &[f64], columns: Vec<(String, Vec<f64>)>) -> Table {
    let mut table = Table::new(std::iter::once("r".to_owned()).chain(columns.iter().map(|(name, _)| name.clone())));
    for (i, &r) in radii.iter().enumerate() {
        table.push(std::iter::once(r.into()).chain(columns.iter().map(|(_, v)| v[i].into())).collect());
    }
    table
}

pub fn figures(cli: &Cli, args: &FiguresArgs) -> Result<u8> {
    let configs = [(1.0, 2.0), (1.0, 1.0), (1.0, 3.0), (0.5, 2.0), (2.0, 2.0)];
    let anchor = args.iter.options(Anchor::default()).anchor;
    let sols: Vec<Solution> = configs
        .par_iter()
        .map(|&(g, a_shape)| {
            let params = ModelParams::new(3, g, a_shape)?;
            run(params, args.a_trial, &args.iter, anchor).with_context(|| format!("g={g} A={a_shape}"))
        })
        .collect::<Result<_>>()?;
    let count = (args.r_end / args.r_step + 1e-9).floor() as usize;
    let radii: Vec<f64> = (0..=count).map(|i| i as f64 * args.r_step).collect();
    for ((g, a_shape), sol) in configs.iter().zip(&sols) {
        ensure!(
            args.r_end <= sol.grid().r_max(),
            "r_end {} exceeds the grid cutoff {} for g={g} A={a_shape}",
            args.r_end,
            sol.grid().r_max()
        );
    }
    let psi = |i: usize| normalised(&radii, |r| sols[i].psi_at(r));
    let figs = [
        ("fig1", vec![("trial".to_owned(), normalised(&radii, |r| sols[0].phi_at(r))), ("psi".to_owned(), psi(0))]),
        ("fig2", vec![("A=1".to_owned(), psi(1)), ("A=2".to_owned(), psi(0)), ("A=3".to_owned(), psi(2))]),
        ("fig3", vec![("g=0.5".to_owned(), psi(3)), ("g=1".to_owned(), psi(0)), ("g=2".to_owned(), psi(4))]),
    ];
    for (stem, columns) in figs {
        let path = write_file(&cli.out, &format!("{stem}.csv"), &figure(&radii, columns).to_csv()?)?;
        println!("wrote {}", path.display());
    }
    let stalled: Vec<String> = configs
        .iter()
        .zip(&sols)
        .filter(|(_, s)| !s.report.converged)
        .map(|((g, a_shape), _)| format!("g={g} A={a_shape}"))
        .collect();
    if stalled.is_empty() {
        Ok(0)
    } else {
        eprintln!("not converged: {}", stalled.join(", "));
        Ok(EXIT_NOT_CONVERGED)
    }
}

pub fn oracle(cli: &Cli, args: &OracleArgs) -> Result<u8> {
    let params = args.problem.params()?;
    let r_max = build_grid(&params, &args.grid.spec())?.r_max();
    let ex = extrapolated_energy(&params, args.step, r_max)?;
    let exact = exact_case(&params).map(|e| e.energy);
    let mut table = Table::new(["n", "g", "A", "step", "r_max", "coarse", "fine", "extrapolated", "exact"]);
    table.push(vec![
        params.n_dim().into(),
        params.g().into(),
        params.a_shape().into(),
        args.step.into(),
        r_max.into(),
        ex.coarse.into(),
        ex.fine.into(),
        ex.energy.into(),
        exact.into(),
    ]);
    let path = table.write(&cli.out, "oracle", cli.format)?;
    println!("E = {} (steps {} and {}); wrote {}", crate::output::format_sig(ex.energy), args.step, args.step / 2.0, path.display());
    Ok(0)
}

/// `count` evenly spaced values from `lo` to `hi`.
pub fn lattice(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

pub fn sweep(cli: &Cli, args: &SweepArgs) -> Result<u8> {
    ensure!(args.g_min <= args.g_max, "g-min must not exceed g-max");
    ensure!(args.a_min <= args.a_max, "A-min must not exceed A-max");
    let primary = args.iter.options(Anchor::default()).anchor;
    let points: Vec<(f64, f64)> = lattice(args.g_min, args.g_max, args.g_count)
        .into_iter()
        .flat_map(|g| lattice(args.a_min, args.a_max, args.a_count).into_iter().map(move |a| (g, a)))
        .collect();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(g, a_shape)| {
            let params = match ModelParams::new(args.n, g, a_shape) {
                Ok(p) => p,
                Err(e) => return failure_row(g, a_shape, e.to_string()),
            };
            let mut errors = Vec::new();
            for anchor in [primary, other(primary)] {
                match run(params, args.a_trial, &args.iter, anchor) {
                    Ok(sol) if sol.report.converged => {
                        let r = &sol.report;
                        let shape = if r.argmax_radius == 0.0 { "origin" } else { "ring" };
                        return vec![
                            g.into(),
                            a_shape.into(),
                            r.final_energy().into(),
                            r.argmax_radius.into(),
                            shape.into(),
                            anchor_name(anchor).into(),
                            true.into(),
                            r.iterations.into(),
                            "ok".into(),
                        ];
                    }
                    Ok(sol) => errors.push(format!("{}: not converged after {}", anchor_name(anchor), sol.report.iterations)),
                    Err(e) => errors.push(format!("{}: {e}", anchor_name(anchor))),
                }
            }
            failure_row(g, a_shape, errors.join("; "))
        })
        .collect();
    let mut table =
        Table::new(["g", "A", "energy", "argmax_radius", "shape", "anchor", "converged", "iterations", "status"]);
    let failed = rows.iter().filter(|r| r[6] != Cell::Bool(true)).count();
    for row in rows {
        table.push(row);
    }
    let path = table.write(&cli.out, "sweep", cli.format)?;
    println!("{} points, {failed} failed; wrote {}", points.len(), path.display());
    Ok(0)
}

fn failure_row(g: f64, a_shape: f64, msg: String) -> Vec<Cell> {
    vec![
        g.into(),
        a_shape.into(),
        Cell::Missing,
        Cell::Missing,
        Cell::Missing,
        Cell::Missing,
        false.into(),
        Cell::Missing,
        format!("failed: {msg}").into(),
    ]
}
