//! The six commands. Each builds a complete table before anything is written.

use std::time::Instant;

use nlgeo_core::measures::werner_closed_form;
use nlgeo_core::state::bd_probs_to_corr;
use nlgeo_core::{
    bd_grid, bd_is_chsh_local, bd_measure, bd_measure_numeric, bd_measure_numeric_all, bd_sweep,
    cglmp_threshold, isotropic_measure, werner_maximum, werner_measure, DistanceKind, Error,
    GridPoint, MeasureResult, SweepFamily, WERNER_THRESHOLD,
};

use crate::args::{BdInput, Command, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// A finished table and, for `validate`, the number of failed checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub failures: usize,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self { table, failures: 0 }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::WernerSweep => werner_sweep(cfg).map(Into::into),
        Command::BdSweep => sweep(cfg).map(Into::into),
        Command::BdGrid => grid(cfg).map(Into::into),
        Command::BdMeasure => measure(cfg).map(Into::into),
        Command::Iso => iso(cfg).map(Into::into),
        Command::Validate => validate(cfg),
    }
}

fn tags(kinds: &[DistanceKind]) -> Vec<String> {
    kinds.iter().map(|k| k.tag().to_owned()).collect()
}

fn table<S: Into<String>>(cfg: &RunConfig, columns: impl IntoIterator<Item = S>) -> Table {
    let mut t = Table::new(columns);
    let o = &cfg.optimizer;
    t.meta("tool", "nlgeo");
    t.meta("version", env!("CARGO_PKG_VERSION"));
    t.meta("command", cfg.command.name());
    t.meta("hellinger", "squared");
    t.meta("bures", "squared");
    t.meta("trace_factor", 0.5);
    t.meta("log_base", 2u64);
    t.meta("kinds", tags(&cfg.kinds).join(" "));
    t.meta("param_tol", o.param_tol);
    t.meta("value_tol", o.value_tol);
    t.meta("max_iters", o.max_iters);
    t.meta("starts", o.seeds);
    t.meta("penalty_growth", o.penalty_growth);
    t.meta("seed", cfg.seed);
    t
}

fn add_maxima(t: &mut Table, kinds: &[DistanceKind]) {
    for &k in kinds {
        t.meta(format!("max_{}", k.tag()), werner_maximum(k));
    }
}

/// `n` evenly spaced points from `lo` to `hi`, the last one exactly `hi`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn sweep_points(n: usize) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Argument(format!(
            "--n must be at least 2, got {n}"
        )));
    }
    Ok(())
}

fn werner_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let ws = match cfg.w {
        Some(w) => vec![w],
        None => {
            let (lo, hi) = cfg.w_range;
            if !(lo >= WERNER_THRESHOLD && lo < hi && hi <= 1.0) {
                return Err(CliError::Argument(format!(
                    "Werner sweep range must satisfy 1/sqrt(2) <= w_min < w_max <= 1, got [{lo}, {hi}]"
                )));
            }
            sweep_points(cfg.n)?;
            linspace(lo, hi, cfg.n)
        }
    };
    let mut t = table(cfg, std::iter::once("w".to_owned()).chain(tags(&cfg.kinds)));
    add_maxima(&mut t, &cfg.kinds);
    for w in ws {
        let mut row = vec![Cell::Num(w)];
        for &k in &cfg.kinds {
            row.push((werner_measure(k, w)?.value / werner_maximum(k)).into());
        }
        t.push(row);
    }
    Ok(t)
}

fn sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    sweep_points(cfg.n)?;
    let param = match cfg.family {
        SweepFamily::TwoBellMix => "p",
        SweepFamily::WernerLine => "w",
    };
    let columns = [param, "a1", "a2", "a3"]
        .map(String::from)
        .into_iter()
        .chain(tags(&cfg.kinds));
    let mut t = table(cfg, columns);
    t.meta("family", cfg.family.tag());
    add_maxima(&mut t, &cfg.kinds);
    let per_kind = cfg
        .kinds
        .iter()
        .map(|&k| bd_sweep(k, cfg.family, cfg.n, &cfg.optimizer))
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..cfg.n {
        let first = &per_kind[0][i];
        let mut row = vec![first.param.into()];
        row.extend(first.correlators.map(Cell::Num));
        row.extend(per_kind.iter().map(|pts| Cell::Num(pts[i].normalized)));
        t.push(row);
    }
    Ok(t)
}

fn grid(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut t = table(cfg, ["kind", "e1", "e2", "e3", "value", "normalized"]);
    t.meta("grid_n", cfg.grid_n);
    t.meta("e4", 0.0);
    add_maxima(&mut t, &cfg.kinds);
    for &k in &cfg.kinds {
        for p in bd_grid(k, cfg.grid_n, &cfg.optimizer)? {
            t.push(vec![
                k.tag().into(),
                p.e1.into(),
                p.e2.into(),
                p.e3.into(),
                p.result.value.into(),
                p.normalized.into(),
            ]);
        }
    }
    Ok(t)
}

fn measure(cfg: &RunConfig) -> Result<Table, CliError> {
    let a = match cfg
        .state
        .expect("bd-measure input is checked at parse time")
    {
        BdInput::Correlators(a) => a,
        BdInput::Probabilities(e) => bd_probs_to_corr(e)?,
    };
    let local = bd_is_chsh_local(a)?;
    let columns = [
        "kind",
        "value",
        "normalized",
        "method",
        "surface",
        "iterations",
        "converged",
        "residual",
        "c1",
        "c2",
        "c3",
    ];
    let mut t = table(cfg, columns);
    for (i, x) in a.iter().enumerate() {
        t.meta(format!("a{}", i + 1), *x);
    }
    t.meta("chsh_local", local);
    for &k in &cfg.kinds {
        let r = bd_measure(k, a, &cfg.optimizer)?;
        let c = r
            .closest_local
            .correlators()
            .map_or([Cell::Missing, Cell::Missing, Cell::Missing], |c| {
                c.map(Cell::Num)
            });
        let mut row = vec![
            k.tag().into(),
            r.value.into(),
            (r.value / werner_maximum(k)).into(),
            r.method.tag().into(),
            r.surface.map(|s| s.label()).into(),
            r.iterations.into(),
            r.converged.into(),
            r.residual.into(),
        ];
        row.extend(c);
        t.push(row);
    }
    Ok(t)
}

fn iso(cfg: &RunConfig) -> Result<Table, CliError> {
    let threshold = cglmp_threshold(cfg.d)?;
    let omegas = match cfg.omega {
        Some(o) => vec![o],
        None => {
            sweep_points(cfg.n)?;
            linspace(cfg.omega_range.0, cfg.omega_range.1, cfg.n)
        }
    };
    let mut t = table(cfg, ["kind", "omega", "value", "printed", "consistent"]);
    t.meta("d", cfg.d);
    t.meta("i_d_qm", threshold.i_d_qm);
    t.meta("threshold", threshold.omega_threshold);
    for &k in &cfg.kinds {
        for &omega in &omegas {
            let m = isotropic_measure(k, cfg.d, omega)?;
            t.push(vec![
                k.tag().into(),
                omega.into(),
                m.result.value.into(),
                m.printed.into(),
                m.consistent.into(),
            ]);
        }
    }
    Ok(t)
}

const ORACLE_TOL: f64 = 1e-6;
const GRID_TOL: f64 = 1e-6;
const VERTEX_TOL: f64 = 1e-9;
const START_TOL: f64 = 1e-6;
const ISO_TOL: f64 = 1e-9;

/// Bell-diagonal points used for the multi-start consistency check.
const START_POINTS: [[f64; 3]; 4] = [
    [0.5, -0.5, 1.0],
    [0.85, -0.6, 0.5],
    [0.8, 0.75, -0.6],
    [0.9, 0.9, -0.9],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    NotConverged,
}

impl Status {
    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotConverged => "not_converged",
        }
    }
}

struct Check {
    name: &'static str,
    subject: String,
    status: Status,
    residual: f64,
    tolerance: f64,
    elapsed_ms: f64,
}

fn judge(residual: f64, tolerance: f64, converged: bool) -> Status {
    if !converged {
        Status::NotConverged
    } else if residual <= tolerance {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Value of a numeric run, keeping the best iterate of a non-converged one.
fn numeric_value(r: Result<MeasureResult, Error>) -> Result<(f64, bool), CliError> {
    match r {
        Ok(m) => Ok((m.value, m.converged)),
        Err(Error::NotConverged(m)) => Ok((m.value, false)),
        Err(e) => Err(e.into()),
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T, CliError>) -> Result<(T, f64), CliError> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64() * 1e3))
}

fn werner_line_check(kind: DistanceKind, cfg: &RunConfig) -> Result<(f64, bool), CliError> {
    let t = WERNER_THRESHOLD;
    let mut worst = 0.0f64;
    let mut converged = true;
    for i in 1..=20 {
        let w = t + (1.0 - t) * i as f64 / 20.0;
        let (v, ok) = numeric_value(bd_measure_numeric(kind, [-w, -w, -w], &cfg.optimizer))?;
        worst = worst.max((v - werner_closed_form(kind, w)).abs());
        converged &= ok;
    }
    Ok((worst, converged))
}

fn grids(kind: DistanceKind, cfg: &RunConfig) -> Result<Option<[Vec<GridPoint>; 3]>, CliError> {
    let mut out = Vec::new();
    for n in [10, 20, 50] {
        match bd_grid(kind, n, &cfg.optimizer) {
            Ok(g) => out.push(g),
            Err(Error::NotConverged(_)) => return Ok(None),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out.try_into().ok())
}

fn grid_drift(grids: &[Vec<GridPoint>; 3]) -> f64 {
    let mut worst = 0.0f64;
    for p in &grids[0] {
        for fine in &grids[1..] {
            let twin = fine.iter().find(|q| q.e1 == p.e1 && q.e2 == p.e2);
            worst = worst.max(twin.map_or(f64::INFINITY, |q| (q.normalized - p.normalized).abs()));
        }
    }
    worst
}

fn vertex_error(grid: &[GridPoint]) -> f64 {
    grid.iter()
        .filter(|p| [(1.0, 0.0), (0.0, 1.0), (0.0, 0.0)].contains(&(p.e1, p.e2)))
        .map(|p| (p.normalized - 1.0).abs())
        .fold(0.0, f64::max)
}

fn start_spread(kind: DistanceKind, cfg: &RunConfig) -> Result<(f64, bool), CliError> {
    let mut worst = 0.0f64;
    let mut converged = true;
    for a in START_POINTS {
        let runs = bd_measure_numeric_all(kind, a, &cfg.optimizer)?;
        let lo = runs.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
        let hi = runs
            .iter()
            .map(|r| r.value)
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(hi - lo);
        converged &= runs.iter().all(|r| r.converged);
    }
    Ok((worst, converged))
}

fn iso_werner_gap(kind: DistanceKind) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for omega in [0.75, 0.8, 0.9, 1.0] {
        let iso = isotropic_measure(kind, 2, omega)?.result.value;
        worst = worst.max((iso - werner_measure(kind, omega)?.value).abs());
    }
    Ok(worst)
}

fn run_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let mut push =
        |name, subject: String, (residual, converged): (f64, bool), tolerance, elapsed_ms| {
            checks.push(Check {
                name,
                subject,
                status: judge(residual, tolerance, converged),
                residual,
                tolerance,
                elapsed_ms,
            })
        };
    for &k in &cfg.kinds {
        let (r, ms) = timed(|| werner_line_check(k, cfg))?;
        push("werner_line", k.tag().into(), r, ORACLE_TOL, ms);
    }
    for &k in &cfg.kinds {
        let (g, ms) = timed(|| grids(k, cfg))?;
        match g {
            Some(g) => {
                push(
                    "grid_convergence",
                    k.tag().into(),
                    (grid_drift(&g), true),
                    GRID_TOL,
                    ms,
                );
                push(
                    "grid_vertices",
                    k.tag().into(),
                    (vertex_error(&g[0]), true),
                    VERTEX_TOL,
                    0.0,
                );
            }
            None => push(
                "grid_convergence",
                k.tag().into(),
                (f64::NAN, false),
                GRID_TOL,
                ms,
            ),
        }
    }
    for &k in &cfg.kinds {
        let (r, ms) = timed(|| start_spread(k, cfg))?;
        push("multi_start", k.tag().into(), r, START_TOL, ms);
    }
    let expected = [
        (2, std::f64::consts::FRAC_1_SQRT_2, 1e-12),
        (3, (6.0 * 3f64.sqrt() - 9.0) / 2.0, 1e-9),
    ];
    for (d, want, tol) in expected {
        let (gap, ms) = timed(|| Ok((cglmp_threshold(d)?.omega_threshold - want).abs()))?;
        push("cglmp_threshold", format!("d={d}"), (gap, true), tol, ms);
    }
    for &k in &cfg.kinds {
        let (gap, ms) = timed(|| iso_werner_gap(k))?;
        push("iso_vs_werner", k.tag().into(), (gap, true), ISO_TOL, ms);
    }
    Ok(checks)
}

fn validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let checks = run_checks(cfg)?;
    let mut columns = vec!["check", "subject", "status", "residual", "tolerance"];
    if cfg.timings {
        columns.push("elapsed_ms");
    }
    let mut t = table(cfg, columns);
    let failures = checks.iter().filter(|c| c.status != Status::Pass).count();
    t.meta("checks", checks.len());
    t.meta("failures", failures);
    for c in checks {
        let mut row = vec![
            c.name.into(),
            c.subject.into(),
            c.status.tag().into(),
            c.residual.into(),
            c.tolerance.into(),
        ];
        if cfg.timings {
            row.push(c.elapsed_ms.into());
        }
        t.push(row);
    }
    Ok(Outcome { table: t, failures })
}
