//! The ten acceptance criteria, each timed against its budget.

use std::fmt;
use std::time::{Duration, Instant};

use gausscap_core::capacities::{
    chi_a_lower, chi_h_lower, class_uncertainty_bound, maximize_coherent_info, optimized_coherent_info_omg,
    q_ghx_closed_form, uncertainty_lower_bound, ClassParams,
};
use gausscap_core::channels::{beam_splitter, two_mode_squeezer, OmgClass};
use gausscap_core::degradability::{
    c_coefficient, find_violation_near_rational, min_negativity_scan, proposition_coefficients, q_window_hi,
    q_window_lo, solve_gamma_recursion, DegradabilityWitness, DEFAULT_EPS_GRID, WITNESS_TOL,
};
use gausscap_core::fock::{
    amp_atom, amp_channel_spectra, beam_splitter_unitary_fock, bs_output_spectrum, c_mn, entropy_crosscheck,
    squeezer_unitary_fock, CROSSCHECK_NBAR, CROSSCHECK_Q, CROSSCHECK_S,
};
use gausscap_core::nalgebra::DMatrix;
use gausscap_core::symplectic::{
    entropy_gaussian, mode_mixer, phase_rotation, relative_entropy_diagonal, single_mode_squeezer,
    symplectic_defect, symplectic_eigenvalues, symplectic_form,
};
use gausscap_core::{CovarianceMatrix64, EnergyBudget64, TwoModeUnitary64};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::par_map;
use crate::config::Range;

pub const IDS: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone)]
pub struct Report {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Individual failing checks, empty when the criterion passes.
    pub failures: Vec<String>,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:>2} {} [{:.3} s / {} s] {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )?;
        for x in &self.failures {
            write!(f, "\n        {x}")?;
        }
        Ok(())
    }
}

struct Outcome {
    detail: String,
    failures: Vec<String>,
}

fn title(id: u8) -> (&'static str, u64) {
    match id {
        1 => ("closed-form capacities", 1),
        2 => ("coherent information at large input power", 30),
        3 => ("c(k_n, k_m) at the window edge", 1),
        4 => ("min c over n, m <= 50 on 0.51:0.99:0.01", 300),
        5 => ("low-order coefficient signs inside the window", 1),
        6 => ("amplifier relative-entropy witness near q = 2", 10),
        7 => ("Gaussian / Fock oracle equivalence", 60),
        8 => ("chi_h + chi_a uncertainty relation", 1),
        9 => ("class bounds dominate the generic bound", 1),
        10 => ("randomized invariant suites, 1000 cases each", 60),
        _ => ("unknown criterion", 0),
    }
}

pub fn run_one(id: u8, jobs: usize) -> Report {
    let (name, secs) = title(id);
    let start = Instant::now();
    let outcome = match id {
        1 => closed_forms(),
        2 => large_power(),
        3 => window_edge(),
        4 => negativity_grid(jobs),
        5 => window_signs(),
        6 => amplifier_witness(),
        7 => oracle_equivalence(jobs),
        8 => uncertainty(),
        9 => class_bounds(),
        10 => invariants(),
        _ => Outcome {
            detail: String::new(),
            failures: vec![format!("no criterion {id}")],
        },
    };
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(secs);
    let mut failures = outcome.failures;
    if elapsed > budget {
        failures.push(format!("runtime {:.3} s exceeds {secs} s", elapsed.as_secs_f64()));
    }
    Report {
        id,
        title: name,
        passed: failures.is_empty(),
        detail: outcome.detail,
        failures,
        elapsed,
        budget,
    }
}

pub fn run(only: Option<&[u8]>, jobs: usize) -> Vec<Report> {
    IDS.iter()
        .filter(|id| only.is_none_or(|o| o.contains(id)))
        .map(|&id| run_one(id, jobs))
        .collect()
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

fn closed_forms() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    for q in [0.55_f64, 2.0 / 3.0, 0.75, 0.9, 1.5, 2.0, 5.0] {
        let closed = q_ghx_closed_form(q);
        let opt = optimized_coherent_info_omg(q, (1.0 - q).abs());
        match (closed, opt) {
            (Ok(c), Ok(o)) => {
                let d = (c - o.value).abs();
                worst = worst.max(d);
                check(&mut failures, d <= 1e-12, || format!("q={q}: closed {c} vs optimized {}", o.value));
            }
            (c, o) => failures.push(format!("q={q}: {c:?} {o:?}")),
        }
    }
    for q in [2.0 / 3.0, 2.0] {
        let v = q_ghx_closed_form(q).unwrap_or(f64::NAN);
        check(&mut failures, (v - std::f64::consts::LN_2).abs() <= 1e-15, || {
            format!("q={q}: {v} is not ln 2")
        });
    }
    Outcome {
        detail: format!("max |closed - optimized| = {worst:.1e}; ln 2 at q = 2/3, 2"),
        failures,
    }
}

fn large_power() -> Outcome {
    let mut failures = Vec::new();
    let w = match beam_splitter(0.75) {
        Ok(w) => w,
        Err(e) => {
            return Outcome {
                detail: String::new(),
                failures: vec![e.to_string()],
            }
        }
    };
    let mut values = Vec::new();
    for pa in [10.0, 100.0, 1e4] {
        match EnergyBudget64::new(pa, 1.0).and_then(|b| maximize_coherent_info(w.dilation(), &b)) {
            Ok(r) => values.push(r.value),
            Err(e) => failures.push(format!("P_A={pa}: {e}")),
        }
    }
    let ln3 = 3f64.ln();
    if let [a, b, c] = values[..] {
        check(&mut failures, a <= b && b <= c, || format!("not increasing in P_A: {values:?}"));
        check(&mut failures, (ln3 - c).abs() <= 2e-3 && c <= ln3 + 1e-9, || {
            format!("P_A=1e4 gives {c}, ln 3 = {ln3}")
        });
    }
    Outcome {
        detail: format!(
            "I_c(P_A = 10, 100, 1e4) = {:?}; gap to ln 3 = {:.2e}",
            values.iter().map(|v| (v * 1e6).round() / 1e6).collect::<Vec<_>>(),
            values.last().map_or(f64::NAN, |v| ln3 - v)
        ),
        failures,
    }
}

fn window_edge() -> Outcome {
    let q = q_window_hi();
    let mut failures = Vec::new();
    let c21 = c_coefficient(q, 2, 1).unwrap_or(f64::NAN);
    let c42 = c_coefficient(q, 4, 2).unwrap_or(f64::NAN);
    check(&mut failures, c21.abs() <= 1e-9, || format!("c(2,1) = {c21}"));
    check(&mut failures, (c42 + 0.0303).abs() <= 5e-3, || format!("c(4,2) = {c42}"));
    Outcome {
        detail: format!("q = 1/2+sqrt(3)/6: c(k_2,-k_1) = {c21:.1e}, c(-k_4,k_2) = {c42:.6}"),
        failures,
    }
}

fn negativity_grid(jobs: usize) -> Outcome {
    let grid = Range {
        start: 0.51,
        stop: 0.99,
        step: 0.01,
    }
    .points();
    let scans = par_map(jobs, &grid, |&q| min_negativity_scan(q, 50)).unwrap_or_default();
    let mut failures = Vec::new();
    let mut worst: Option<f64> = None;
    let mut follow_up = Vec::new();
    for (q, scan) in grid.iter().zip(&scans) {
        match scan {
            Ok(s) if s.is_witness() => {
                let c = s.min.map_or(f64::NAN, |m| m.2);
                worst = Some(worst.map_or(c, |w: f64| w.max(c)));
            }
            Ok(s) => {
                failures.push(match s.min {
                    Some((n, m, c)) => format!("q={q}: min c = {c:.6e} at ({n}, {m}), not below -{WITNESS_TOL:e}"),
                    None => format!("q={q}: no admissible pair"),
                });
                follow_up.push(*q);
            }
            Err(e) => failures.push(format!("q={q}: {e}")),
        }
    }
    if scans.len() != grid.len() {
        failures.push("worker pool failed".into());
    }
    let mut detail = format!(
        "{} of {} grid points negative; largest witnessing minimum {:.3e}",
        grid.len() - failures.len(),
        grid.len(),
        worst.unwrap_or(f64::NAN)
    );
    for q in follow_up {
        if let Ok(s) = min_negativity_scan(q, 100) {
            if let Some((n, m, c)) = s.min {
                detail.push_str(&format!("; q={q} with n, m <= 100: min c = {c:.4e} at ({n}, {m})"));
            }
        }
    }
    Outcome { detail, failures }
}

fn window_signs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (lo, hi) = (q_window_lo(), q_window_hi());
    let mut failures = Vec::new();
    for _ in 0..20 {
        let q = rng.gen_range(lo..hi);
        let closed = proposition_coefficients(q);
        let solved = solve_gamma_recursion(q, 2).and_then(|s| s.low_order_combination());
        let ok = |c: [f64; 3]| c[0] > 0.0 && c[1] < 0.0 && c[2] >= 0.0;
        check(&mut failures, ok(closed), || format!("q={q}: closed forms {closed:?}"));
        match solved {
            Ok(c) => check(&mut failures, ok(c), || format!("q={q}: recursion {c:?}")),
            Err(e) => failures.push(format!("q={q}: {e}")),
        }
    }
    Outcome {
        detail: "20 seeded q in (1/sqrt 2, 1/2+sqrt(3)/6): |0>,|1>,|2> coefficients (+, -, +)".into(),
        failures,
    }
}

fn amplifier_witness() -> Outcome {
    let mut failures = Vec::new();
    let detail = match find_violation_near_rational(2, 1, &DEFAULT_EPS_GRID) {
        Ok(DegradabilityWitness::RelativeEntropy { q_prime, m1, m2, gap, .. }) => {
            check(&mut failures, q_prime > 2.0 && q_prime <= 2.001, || format!("q' = {q_prime}"));
            check(&mut failures, gap.lower() <= gap.upper() && gap.upper() < 0.0, || {
                format!("enclosure [{}, {}] does not exclude 0", gap.lower(), gap.upper())
            });
            format!(
                "q' = {q_prime}, (m1, m2) = ({m1}, {m2}): gap in [{:.6}, {:.6}], T = {}",
                gap.lower(),
                gap.upper(),
                gap.truncation
            )
        }
        Ok(w) => {
            failures.push(format!("unexpected witness {w:?}"));
            String::new()
        }
        Err(e) => {
            failures.push(e.to_string());
            String::new()
        }
    };
    Outcome { detail, failures }
}

fn oracle_equivalence(jobs: usize) -> Outcome {
    let mut failures = Vec::new();
    let mut points = Vec::new();
    for q in CROSSCHECK_Q {
        for nbar in CROSSCHECK_NBAR {
            for s in CROSSCHECK_S {
                points.push((q, nbar, s));
            }
        }
    }
    let rows = par_map(jobs, &points, |&(q, nbar, s)| entropy_crosscheck(q, nbar, s, 60)).unwrap_or_default();
    let mut worst_entropy = 0.0_f64;
    for ((q, nbar, s), r) in points.iter().zip(&rows) {
        match r {
            Ok(r) => {
                worst_entropy = worst_entropy.max(r.max_abs_diff());
                check(&mut failures, r.max_abs_diff() <= 1e-6, || {
                    format!("q={q} nbar={nbar} s={s}: entropy diff {:e}", r.max_abs_diff())
                });
            }
            Err(e) => failures.push(format!("q={q} nbar={nbar} s={s}: {e}")),
        }
    }
    if rows.len() != points.len() {
        failures.push("worker pool failed".into());
    }

    let mut worst_bs = 0.0_f64;
    let d = 13;
    for q in [0.4_f64, 0.72] {
        let dense = match beam_splitter_unitary_fock(q, d) {
            Ok(u) => u.to_dense(),
            Err(e) => {
                failures.push(e.to_string());
                continue;
            }
        };
        for n in 0..=10usize {
            let p = bs_output_spectrum(q, n).unwrap_or_default();
            for (l, &pl) in p.iter().enumerate() {
                let col = n * d + 1;
                let row = (n + 1 - l) * d + l;
                let amp = dense[(row, col)].norm_sqr();
                worst_bs = worst_bs.max((amp - pl).abs());
            }
        }
    }
    check(&mut failures, worst_bs <= 1e-12, || format!("beam-splitter spectrum diff {worst_bs:e}"));

    let mut worst_amp = 0.0_f64;
    for q in [1.5, 2.0, 3.0] {
        let u = match squeezer_unitary_fock(q, 60) {
            Ok(u) => u,
            Err(e) => {
                failures.push(e.to_string());
                continue;
            }
        };
        for m in 0..=3usize {
            if m > 0 {
                let a = amp_atom(q, m).unwrap_or(f64::NAN);
                worst_amp = worst_amp.max((u.entry((m - 1, 0), (m, 1)).norm_sqr() - a).abs());
            }
            for n in 0..=20usize {
                let c = c_mn(q, m, n).unwrap_or(f64::NAN);
                worst_amp = worst_amp.max((u.entry((n + m, n + 1), (m, 1)).norm_sqr() - c).abs());
            }
        }
    }
    check(&mut failures, worst_amp <= 1e-12, || format!("amplifier coefficient diff {worst_amp:e}"));
    Outcome {
        detail: format!(
            "entropies max diff {worst_entropy:.1e} over {} points at D = 60; spectrum {worst_bs:.1e}; amplifier coefficients {worst_amp:.1e}",
            points.len()
        ),
        failures,
    }
}

const POWERS: [f64; 5] = [0.1, 0.5, 1.0, 5.0, 10.0];

fn uncertainty() -> Outcome {
    let mut failures = Vec::new();
    let mut margin = f64::INFINITY;
    for q in [0.6, 0.75, 1.5, 2.0] {
        let u = match TwoModeUnitary64::new(q) {
            Ok(u) => u,
            Err(e) => {
                failures.push(e.to_string());
                continue;
            }
        };
        for pa in POWERS {
            for pe in POWERS {
                let b = EnergyBudget64 { p_a: pa, p_e: pe };
                match (chi_h_lower(u.dilation(), &b), chi_a_lower(u.dilation(), &b)) {
                    (Ok(h), Ok(a)) => {
                        let bound = uncertainty_lower_bound(&b);
                        margin = margin.min(h + a - bound);
                        check(&mut failures, h + a >= bound - 1e-12, || {
                            format!("q={q} P_A={pa} P_E={pe}: {h} + {a} < {bound}")
                        });
                    }
                    (h, a) => failures.push(format!("q={q} P_A={pa} P_E={pe}: {h:?} {a:?}")),
                }
            }
        }
    }
    let third = uncertainty_lower_bound(&EnergyBudget64 { p_a: 1.0, p_e: 1.0 });
    check(&mut failures, (third - 1.0 / 3.0).abs() < 1e-15, || format!("generic bound at 1, 1 is {third}"));
    Outcome {
        detail: format!("100 points, smallest margin {margin:.3e}; generic bound at P_A = P_E = 1 is {third}"),
        failures,
    }
}

fn class_bounds() -> Outcome {
    let none = ClassParams { kappa: None, n0: None };
    let mut cases = vec![(OmgClass::A1, none), (OmgClass::A2, none)];
    for k in [0.3, 0.5, 0.7] {
        cases.push((OmgClass::CAtt, ClassParams { kappa: Some(k), n0: None }));
    }
    for k in [1.5, 2.0, 4.0] {
        cases.push((OmgClass::CAmp, ClassParams { kappa: Some(k), n0: None }));
    }
    for k in [-0.5, -1.0, -3.0] {
        cases.push((OmgClass::D, ClassParams { kappa: Some(k), n0: None }));
    }
    for n0 in [0.5, 1.0, 2.0] {
        cases.push((OmgClass::B1, ClassParams { kappa: None, n0: Some(n0) }));
        cases.push((OmgClass::B2, ClassParams { kappa: None, n0: Some(n0) }));
    }
    let mut failures = Vec::new();
    let mut margin = f64::INFINITY;
    let mut count = 0;
    for (class, params) in &cases {
        for pa in POWERS {
            for pe in POWERS {
                let b = EnergyBudget64 { p_a: pa, p_e: pe };
                count += 1;
                match class_uncertainty_bound(*class, params, &b) {
                    Ok(v) => {
                        let g = uncertainty_lower_bound(&b);
                        margin = margin.min(v - g);
                        check(&mut failures, v >= g, || format!("{class:?} {params:?} P_A={pa} P_E={pe}: {v} < {g}"));
                    }
                    Err(e) => failures.push(format!("{class:?} {params:?}: {e}")),
                }
            }
        }
    }
    Outcome {
        detail: format!("{count} (class, parameter, budget) points, smallest margin {margin:.3e}"),
        failures,
    }
}

fn runner() -> TestRunner {
    let config = Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn random_symplectic(p: &[f64; 7]) -> DMatrix<f64> {
    phase_rotation(2, 0, p[0])
        * single_mode_squeezer(2, 0, p[1])
        * mode_mixer(2, 0, 1, p[2])
        * phase_rotation(2, 1, p[3])
        * single_mode_squeezer(2, 1, p[4])
        * mode_mixer(2, 0, 1, p[5])
        * phase_rotation(2, 0, p[6])
}

fn two_mode_thermal(n1: f64, n2: f64) -> CovarianceMatrix64 {
    CovarianceMatrix64::thermal(1, n1)
        .and_then(|a| Ok(a.direct_sum(&CovarianceMatrix64::thermal(1, n2)?)))
        .expect("thermal states with nonnegative occupation")
}

fn invariants() -> Outcome {
    let ang = -3.2..3.2_f64;
    let sq = -1.2..1.2_f64;
    let sympl = (ang.clone(), sq.clone(), ang.clone(), ang.clone(), sq, ang.clone(), ang)
        .prop_map(|(a, b, c, d, e, f, g)| [a, b, c, d, e, f, g]);
    let occupations = (0.0..4.0_f64, 0.0..4.0_f64);
    let mut suites: Vec<(&str, Result<(), String>)> = Vec::new();

    suites.push((
        "CM validity",
        runner()
            .run(&(sympl.clone(), occupations.clone()), |(p, (n1, n2))| {
                let w = two_mode_thermal(n1, n2)
                    .congruence(&random_symplectic(&p))
                    .map_err(|e| TestCaseError::fail(e.to_string()))?;
                for nu in symplectic_eigenvalues(&w).map_err(|e| TestCaseError::fail(e.to_string()))? {
                    prop_assert!(nu >= 0.5 - 1e-9);
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    ));

    suites.push((
        "congruence invariance",
        runner()
            .run(&(sympl, occupations), |(p, (n1, n2))| {
                let v = two_mode_thermal(n1, n2);
                let s = random_symplectic(&p);
                prop_assert!(symplectic_defect(&s) < 1e-9);
                let w = v.congruence(&s).map_err(|e| TestCaseError::fail(e.to_string()))?;
                let mut a = symplectic_eigenvalues(&v).map_err(|e| TestCaseError::fail(e.to_string()))?;
                let mut b = symplectic_eigenvalues(&w).map_err(|e| TestCaseError::fail(e.to_string()))?;
                a.sort_by(f64::total_cmp);
                b.sort_by(f64::total_cmp);
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() < 1e-8 * (1.0 + x));
                }
                let (sa, sb) = (entropy_gaussian(&v).unwrap_or(f64::NAN), entropy_gaussian(&w).unwrap_or(f64::NAN));
                prop_assert!((sa - sb).abs() < 1e-8 * (1.0 + sa));
                Ok(())
            })
            .map_err(|e| e.to_string()),
    ));

    suites.push((
        "unitarity blocks",
        runner()
            .run(&(prop_oneof![0.01..0.99_f64, 1.01..8.0_f64], 2usize..8), |(q, d)| {
                let u = if q < 1.0 { beam_splitter(q) } else { two_mode_squeezer(q) }
                    .map_err(|e| TestCaseError::fail(e.to_string()))?;
                let w = u.dilation();
                let sigma = symplectic_form::<f64>(1);
                let top = w.m() * &sigma * w.m().transpose() + w.n() * &sigma * w.n().transpose();
                let bottom = w.o() * &sigma * w.o().transpose() + w.p() * &sigma * w.p().transpose();
                let cross = w.m() * &sigma * w.o().transpose() + w.n() * &sigma * w.p().transpose();
                prop_assert!((top - &sigma).amax() < 1e-10);
                prop_assert!((bottom - &sigma).amax() < 1e-10);
                prop_assert!(cross.amax() < 1e-10);
                if q < 1.0 {
                    let f = beam_splitter_unitary_fock(q, d).map_err(|e| TestCaseError::fail(e.to_string()))?;
                    prop_assert!(f.isometry_defect(d - 1) < 1e-12);
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    ));

    suites.push((
        "spectra normalization",
        runner()
            .run(&(0.01..0.99_f64, 0usize..40, 1.05..6.0_f64, 0usize..6), |(q, n, g, m)| {
                let s: f64 = bs_output_spectrum(q, n).unwrap_or_default().iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-11);
                let sp = amp_channel_spectra(g, m, 1e-12).map_err(|e| TestCaseError::fail(e.to_string()))?;
                for v in [&sp.output, &sp.complementary] {
                    let t: f64 = v.iter().sum();
                    prop_assert!(t <= 1.0 + 1e-11 && t >= 1.0 - sp.tail_bound - 1e-11);
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    ));

    let dist = |n: usize| {
        prop::collection::vec(1e-3..1.0_f64, n).prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<_>>()
        })
    };
    suites.push((
        "D(p||r) >= 0",
        runner()
            .run(&(2usize..12).prop_flat_map(move |n| (dist(n), dist(n))), |(p, r)| {
                let d = relative_entropy_diagonal(&p, &r).map_err(|e| TestCaseError::fail(e.to_string()))?;
                let l1: f64 = p.iter().zip(&r).map(|(a, b)| (a - b).abs()).sum();
                prop_assert!(d >= 0.5 * l1 * l1 - 1e-12);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    ));

    let failures = suites
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    Outcome {
        detail: suites.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", "),
        failures,
    }
}
