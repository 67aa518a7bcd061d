use std::path::PathBuf;

use gausscap_core::capacities::{
    classical_capacity_lower_bound, conferencing_lower_bound, energy_constrained_q_lower_bound, q_ghx_closed_form,
    uncertainty_report,
};
use gausscap_core::degradability::{
    c_coefficient, find_violation_near_rational, fig1_preset, min_negativity_scan, negativity_witness, q_window_hi,
    q_window_lo, DegradabilityWitness,
};
use gausscap_core::fock::{entropy_crosscheck, gaussian_output_entropies, CROSSCHECK_Q};
use gausscap_core::{EnergyBudget64, Error as CoreError, TwoModeUnitary64};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Cli, Command, Figure, Format};
use crate::config::{Range, Settings};
use crate::error::{CliError, Status};
use crate::output::{emit, Cell, Row};

pub const FIGURE_RANGE: Range = Range {
    start: 0.5,
    stop: 0.99,
    step: 0.01,
};

/// Maps `f` over `items` on a pool of `jobs` threads, keeping input order.
pub fn par_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Result<Vec<R>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::check(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

fn first_error<R>(results: Vec<Result<R, CliError>>) -> Result<Vec<R>, CliError> {
    results.into_iter().collect()
}

fn check_q(q: f64) -> Result<(), CliError> {
    if q == 1.0 {
        return Err(CliError::invalid(
            "q = 1 is the singular point: the coupling is the identity, neither beam splitter nor amplifier",
        ));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(CliError::invalid(format!("q must be positive and finite, got {q}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityRow {
    pub q: f64,
    pub p_a: f64,
    pub p_e: f64,
    pub q_closed: f64,
    pub q_energy_lb: f64,
    pub c_classical_lb: f64,
    pub chi_h: f64,
    pub chi_a: f64,
    pub uncertainty_lb: f64,
    pub class: &'static str,
    pub class_lb: Option<f64>,
    pub conferencing_lb: f64,
}

impl Row for CapacityRow {
    const HEADER: &'static [&'static str] = &[
        "q",
        "P_A",
        "P_E",
        "Q_closed",
        "Q_energy_lb",
        "C_classical_lb",
        "chi_h",
        "chi_a",
        "uncertainty_lb",
        "class",
        "class_lb",
        "conferencing_lb",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.q.into(),
            self.p_a.into(),
            self.p_e.into(),
            self.q_closed.into(),
            self.q_energy_lb.into(),
            self.c_classical_lb.into(),
            self.chi_h.into(),
            self.chi_a.into(),
            self.uncertainty_lb.into(),
            self.class.into(),
            self.class_lb.into(),
            self.conferencing_lb.into(),
        ]
    }
}

pub fn capacity_point(q: f64, p_a: f64, p_e: f64) -> Result<CapacityRow, CliError> {
    check_q(q)?;
    let budget = EnergyBudget64::new(p_a, p_e)?;
    let u = TwoModeUnitary64::new(q)?;
    let w = u.dilation();
    let report = uncertainty_report(w, &budget)?;
    Ok(CapacityRow {
        q,
        p_a,
        p_e,
        q_closed: q_ghx_closed_form(q)?,
        q_energy_lb: energy_constrained_q_lower_bound(w, &budget)?.value,
        c_classical_lb: classical_capacity_lower_bound(q, (1.0 - q).abs(), &budget)?.value,
        chi_h: report.chi_h_lower,
        chi_a: report.chi_a_lower,
        uncertainty_lb: report.generic_bound,
        class: report.class.tag(),
        class_lb: report.class_bound,
        conferencing_lb: conferencing_lower_bound(w, p_a)?.value,
    })
}

pub fn capacity(s: &Settings) -> Result<Vec<CapacityRow>, CliError> {
    let grid = s.grid(None)?;
    grid.iter().try_for_each(|&q| check_q(q))?;
    first_error(par_map(s.jobs, &grid, |&q| capacity_point(q, s.pa, s.pe))?)
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig1Row {
    pub q: f64,
    pub label: &'static str,
    pub n: usize,
    pub m: usize,
    /// `None` when `k_n` and `k_m` share a sign at this q.
    pub c: Option<f64>,
}

impl Row for Fig1Row {
    const HEADER: &'static [&'static str] = &["q", "label", "n", "m", "c"];

    fn cells(&self) -> Vec<Cell> {
        vec![self.q.into(), self.label.into(), self.n.into(), self.m.into(), self.c.into()]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Row {
    pub q: f64,
    pub n_max: usize,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub min_c: Option<f64>,
    pub witness: bool,
    pub exact: bool,
}

impl Row for Fig2Row {
    const HEADER: &'static [&'static str] = &["q", "n_max", "n", "m", "min_c", "witness", "exact"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.q.into(),
            self.n_max.into(),
            self.n.into(),
            self.m.into(),
            self.min_c.into(),
            self.witness.into(),
            self.exact.into(),
        ]
    }
}

/// The figure grid plus the two window edges that fall inside it.
pub fn fig1_grid(base: &[f64]) -> Vec<f64> {
    let mut g = base.to_vec();
    if let (Some(lo), Some(hi)) = (
        base.iter().copied().reduce(f64::min),
        base.iter().copied().reduce(f64::max),
    ) {
        g.extend([q_window_lo(), q_window_hi()].into_iter().filter(|x| (lo..=hi).contains(x)));
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

pub fn fig1_row(q: f64) -> Result<Option<Fig1Row>, CliError> {
    let Some(p) = fig1_preset(q) else {
        return Ok(None);
    };
    let c = match c_coefficient(q, p.n, p.m) {
        Ok(c) => Some(c),
        Err(CoreError::InadmissiblePair { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(Some(Fig1Row {
        q,
        label: p.label,
        n: p.n,
        m: p.m,
        c,
    }))
}

pub fn fig1(s: &Settings) -> Result<Vec<Fig1Row>, CliError> {
    let grid = fig1_grid(&s.grid(Some(FIGURE_RANGE))?);
    let rows = first_error(par_map(s.jobs, &grid, |&q| fig1_row(q))?)?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn fig2_row(q: f64, n_max: usize) -> Result<Fig2Row, CliError> {
    let scan = min_negativity_scan(q, n_max)?;
    Ok(Fig2Row {
        q,
        n_max,
        n: scan.min.map(|m| m.0),
        m: scan.min.map(|m| m.1),
        min_c: scan.min.map(|m| m.2),
        witness: scan.is_witness(),
        exact: scan.exact,
    })
}

pub fn fig2(s: &Settings) -> Result<Vec<Fig2Row>, CliError> {
    let grid = s.grid(Some(FIGURE_RANGE))?;
    first_error(par_map(s.jobs, &grid, |&q| fig2_row(q, s.n_max))?)
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Writes the selected figure tables into `out_dir` and returns their paths.
pub fn figures(s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(&s.out_dir)
        .map_err(|e| CliError::check(format!("cannot create {}: {e}", s.out_dir.display())))?;
    let mut written = Vec::new();
    if matches!(s.which, Figure::Fig1 | Figure::All) {
        let path = s.out_dir.join(format!("fig1.{}", extension(s.format)));
        emit(Some(&path), s.format, "figures/fig1", &fig1(s)?)?;
        written.push(path);
    }
    if matches!(s.which, Figure::Fig2 | Figure::All) {
        let path = s.out_dir.join(format!("fig2.{}", extension(s.format)));
        emit(Some(&path), s.format, "figures/fig2", &fig2(s)?)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckOut {
    pub q: f64,
    pub nbar: f64,
    pub s: f64,
    pub cutoff: usize,
    pub gaussian_b: f64,
    pub fock_b: Option<f64>,
    pub gaussian_f: f64,
    pub fock_f: Option<f64>,
    pub max_abs_diff: Option<f64>,
    pub tail: Option<f64>,
    pub pass: bool,
    pub note: String,
}

impl Row for CrosscheckOut {
    const HEADER: &'static [&'static str] = &[
        "q",
        "nbar",
        "s",
        "cutoff",
        "gaussian_b",
        "fock_b",
        "gaussian_f",
        "fock_f",
        "max_abs_diff",
        "tail",
        "pass",
        "note",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.q.into(),
            self.nbar.into(),
            self.s.into(),
            self.cutoff.into(),
            self.gaussian_b.into(),
            self.fock_b.into(),
            self.gaussian_f.into(),
            self.fock_f.into(),
            self.max_abs_diff.into(),
            self.tail.into(),
            self.pass.into(),
            self.note.as_str().into(),
        ]
    }
}

pub fn crosscheck_point(q: f64, nbar: f64, s: f64, cutoff: usize, tol: f64) -> Result<CrosscheckOut, CliError> {
    match entropy_crosscheck(q, nbar, s, cutoff) {
        Ok(r) => {
            let diff = r.max_abs_diff();
            Ok(CrosscheckOut {
                q,
                nbar,
                s,
                cutoff,
                gaussian_b: r.gaussian_b,
                fock_b: Some(r.fock_b),
                gaussian_f: r.gaussian_f,
                fock_f: Some(r.fock_f),
                max_abs_diff: Some(diff),
                tail: Some(r.tail),
                pass: diff <= tol,
                note: String::new(),
            })
        }
        Err(e @ CoreError::CutoffTooSmall { .. }) => {
            let (gaussian_b, gaussian_f) = gaussian_output_entropies(q, nbar, s)?;
            Ok(CrosscheckOut {
                q,
                nbar,
                s,
                cutoff,
                gaussian_b,
                fock_b: None,
                gaussian_f,
                fock_f: None,
                max_abs_diff: None,
                tail: None,
                pass: false,
                note: e.to_string(),
            })
        }
        Err(e) => Err(e.into()),
    }
}

pub fn crosscheck(s: &Settings) -> Result<Vec<CrosscheckOut>, CliError> {
    let qs = s.q.clone().unwrap_or_else(|| match s.q_range {
        Some(r) => r.points(),
        None => CROSSCHECK_Q.to_vec(),
    });
    let mut points = Vec::new();
    for &q in &qs {
        if !(q > 0.0 && q < 1.0) {
            return Err(CliError::invalid(format!("crosscheck needs beam splitters, 0 < q < 1; got {q}")));
        }
        for &nbar in &s.nbar {
            for &sq in &s.s {
                points.push((q, nbar, sq));
            }
        }
    }
    first_error(par_map(s.jobs, &points, |&(q, nbar, sq)| {
        crosscheck_point(q, nbar, sq, s.cutoff, s.tol)
    })?)
}

impl Row for DegradabilityWitness {
    const HEADER: &'static [&'static str] = &[
        "kind",
        "q",
        "q_prime",
        "n",
        "m",
        "m1",
        "m2",
        "value",
        "gap_lower",
        "gap_upper",
        "truncation",
        "exact",
    ];

    fn cells(&self) -> Vec<Cell> {
        match self {
            DegradabilityWitness::Negativity { q, n, m, value, exact } => vec![
                "negativity".into(),
                (*q).into(),
                Cell::Empty,
                (*n).into(),
                (*m).into(),
                Cell::Empty,
                Cell::Empty,
                (*value).into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                (*exact).into(),
            ],
            DegradabilityWitness::RelativeEntropy {
                q,
                q_prime,
                m1,
                m2,
                gap,
            } => vec![
                "relative_entropy".into(),
                (*q).into(),
                (*q_prime).into(),
                Cell::Empty,
                Cell::Empty,
                (*m1).into(),
                (*m2).into(),
                gap.partial.into(),
                gap.lower().into(),
                gap.upper().into(),
                gap.truncation.into(),
                Cell::Empty,
            ],
        }
    }
}

/// `x/y` with `y ≤ 1000` matching `q` to 1e-12, in lowest terms.
pub fn as_small_rational(q: f64) -> Option<(usize, usize)> {
    (1..=1000usize).find_map(|y| {
        let x = (q * y as f64).round();
        ((x / y as f64 - q).abs() < 1e-12 && x >= 1.0).then_some((x as usize, y))
    })
}

pub fn witness(s: &Settings) -> Result<DegradabilityWitness, CliError> {
    if let Some((x, y)) = s.rational {
        return Ok(find_violation_near_rational(x, y, &s.eps)?);
    }
    let q = match s.q.as_deref() {
        Some([q]) => *q,
        Some(_) => return Err(CliError::invalid("witness takes a single q")),
        None => return Err(CliError::invalid("witness needs --q or --rational x/y")),
    };
    check_q(q)?;
    if q < 1.0 {
        return Ok(negativity_witness(q, s.n_max)?);
    }
    let (x, y) = as_small_rational(q)
        .ok_or_else(|| CliError::invalid(format!("gain {q} is not a ratio of small integers; pass --rational x/y")))?;
    Ok(find_violation_near_rational(x, y, &s.eps)?)
}

pub fn run(cli: &Cli, s: &Settings) -> Result<Status, CliError> {
    let out = s.output.as_deref();
    match &cli.command {
        Command::Capacity(_) => {
            emit(out, s.format, "capacity", &capacity(s)?)?;
            Ok(Status::Ok)
        }
        Command::Figures(_) => {
            for p in figures(s)? {
                println!("{}", p.display());
            }
            Ok(Status::Ok)
        }
        Command::Crosscheck(_) => {
            let rows = crosscheck(s)?;
            emit(out, s.format, "crosscheck", &rows)?;
            let bad: Vec<String> = rows
                .iter()
                .filter(|r| !r.pass)
                .map(|r| {
                    let why = r.max_abs_diff.map_or_else(|| r.note.clone(), |d| format!("diff {d:e}"));
                    format!("q={} nbar={} s={}: {why}", r.q, r.nbar, r.s)
                })
                .collect();
            if bad.is_empty() {
                Ok(Status::Ok)
            } else {
                Err(CliError::check(format!(
                    "{} of {} points exceed tol {:e}:\n  {}",
                    bad.len(),
                    rows.len(),
                    s.tol,
                    bad.join("\n  ")
                )))
            }
        }
        Command::Witness(_) => {
            emit(out, s.format, "witness", &[witness(s)?])?;
            Ok(Status::Ok)
        }
        Command::Acceptance(a) => {
            let reports = crate::acceptance::run(a.only.as_deref(), s.jobs);
            for r in &reports {
                println!("{r}");
            }
            Ok(if reports.iter().all(|r| r.passed) {
                Status::Ok
            } else {
                Status::CheckFailed
            })
        }
    }
}
