//! Non-degradability witnesses.
//!
//! Two routes. For the beam splitter a would-be degrading map Γ is pinned
//! down on Fock-diagonal inputs by a triangular recursion; a convex
//! combination of its images that cancels the unknown `Γ(|0⟩⟨0|)` and still
//! has a negative coefficient proves Γ is not positive. For the amplifier,
//! data processing under a degrading map would force
//! `D(N(ρ₁)‖N(ρ₂)) ≥ D(Ñ(ρ₁)‖Ñ(ρ₂))` on Fock inputs; a certified negative gap
//! rules it out.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fock::{amp_atom, c_mn, c_mn_tail_bound};

/// Below this a coefficient or gap counts as a witness; `(−WITNESS_TOL, 0)`
/// is inconclusive.
pub const WITNESS_TOL: f64 = 1e-7;

/// Float results are rejected once the propagated error estimate exceeds this.
pub const FLOAT_ERROR_LIMIT: f64 = 1e-10;

pub const DEFAULT_EPS_GRID: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];

/// Field the Γ-recursion can run in: `f64` or [`BigRational`].
pub trait Field: Clone + Num + Signed + PartialOrd + FromPrimitive + ToPrimitive + Debug {}

impl<F> Field for F where F: Clone + Num + Signed + PartialOrd + FromPrimitive + ToPrimitive + Debug {}

fn from_usize<F: Field>(n: usize) -> F {
    F::from_usize(n).expect("integer representable in field")
}

/// `Γ(|n⟩⟨n|) = k·Γ(|0⟩⟨0|) + Σ_j d[j]·|j⟩⟨j|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaImage<F> {
    pub k: F,
    pub d: Vec<F>,
}

impl<F: Field> GammaImage<F> {
    pub fn d_at(&self, j: usize) -> F {
        self.d.get(j).cloned().unwrap_or_else(F::zero)
    }

    /// `k + Σ d`, which must equal one for a trace-preserving Γ.
    pub fn trace(&self) -> F {
        self.d.iter().fold(self.k.clone(), |acc, x| acc + x.clone())
    }
}

/// Photon-number distribution of the beam-splitter output on `|n⟩`, in `F`.
pub fn bs_spectrum_in<F: Field>(q: &F, n: usize) -> Vec<F> {
    let one_q = F::one() - q.clone();
    let np1: F = from_usize(n + 1);
    let mut qpow = vec![F::one(); n + 1];
    let mut opow = vec![F::one(); n + 2];
    for i in 1..=n {
        qpow[i] = qpow[i - 1].clone() * q.clone();
    }
    for i in 1..=n + 1 {
        opow[i] = opow[i - 1].clone() * one_q.clone();
    }
    let norm = np1.clone() * one_q.clone();
    let mut binom = F::one();
    (0..=n + 1)
        .map(|l| {
            if l > 0 {
                binom = binom.clone() * from_usize(n + 2 - l) / from_usize(l);
            }
            let w = norm.clone() - from_usize(l);
            let qp = if l <= n { qpow[n - l].clone() } else { F::one() / q.clone() };
            binom.clone() * opow[l].clone() * qp * w.clone() * w / norm.clone()
        })
        .collect()
}

/// Runs the triangular recursion for `Γ(|n⟩⟨n|)`, `n = 0..=n_max`.
pub fn solve_gamma_recursion_in<F: Field>(q: &F, n_max: usize) -> Result<Vec<GammaImage<F>>> {
    let mut images = Vec::with_capacity(n_max + 1);
    images.push(GammaImage {
        k: F::one(),
        d: Vec::new(),
    });
    for n in 0..n_max {
        let p = bs_spectrum_in(q, n);
        let lead = p[0].clone();
        if lead.is_zero() {
            return Err(Error::RecursionBreak { n, leading: 0.0 });
        }
        let mut k = F::zero();
        let mut d = p.clone();
        for (l, pl) in p.iter().enumerate().skip(1) {
            let prev: &GammaImage<F> = &images[n + 1 - l];
            k = k - pl.clone() * prev.k.clone();
            for (j, v) in prev.d.iter().enumerate() {
                d[j] = d[j].clone() - pl.clone() * v.clone();
            }
        }
        images.push(GammaImage {
            k: k / lead.clone(),
            d: d.into_iter().map(|x| x / lead.clone()).collect(),
        });
    }
    Ok(images)
}

/// Propagated bound on `|k_n| + Σ|d_n|` and the resulting float error estimate.
fn float_error_estimate(q: f64, n_max: usize) -> f64 {
    let mut bound = vec![1.0_f64];
    let mut worst = 2.0 * f64::EPSILON;
    for n in 0..n_max {
        let p = bs_spectrum_in(&q, n);
        let mut acc = 1.0;
        for (l, pl) in p.iter().enumerate().skip(1) {
            acc += pl.abs() * bound[n + 1 - l];
        }
        let m = acc / p[0].abs();
        worst = worst.max(m * (n + 2) as f64 * f64::EPSILON);
        bound.push(m);
    }
    worst
}

fn exact_q(q: f64) -> Result<BigRational> {
    let r = Ratio::<i64>::approximate_float(q).ok_or_else(|| invalid("q", q, "not representable as a rational"))?;
    Ok(BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
}

#[derive(Debug, Clone)]
enum Table {
    Float(Vec<GammaImage<f64>>),
    Exact(Vec<GammaImage<BigRational>>),
}

/// Γ images up to `n_max`, in float when well conditioned and in exact
/// rationals otherwise.
#[derive(Debug, Clone)]
pub struct GammaSolution {
    q: f64,
    table: Table,
    float_error: f64,
}

pub fn solve_gamma_recursion(q: f64, n_max: usize) -> Result<GammaSolution> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid("q", q, "beam splitter needs 0 < q < 1"));
    }
    let float_error = float_error_estimate(q, n_max);
    let table = if float_error <= FLOAT_ERROR_LIMIT {
        Table::Float(solve_gamma_recursion_in(&q, n_max)?)
    } else {
        Table::Exact(solve_gamma_recursion_in(&exact_q(q)?, n_max)?)
    };
    Ok(GammaSolution { q, table, float_error })
}

fn f(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl GammaSolution {
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_max(&self) -> usize {
        match &self.table {
            Table::Float(t) => t.len() - 1,
            Table::Exact(t) => t.len() - 1,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.table, Table::Exact(_))
    }

    /// Error estimate of the float recursion (whether or not it was used).
    pub fn float_error(&self) -> f64 {
        self.float_error
    }

    pub fn image(&self, n: usize) -> GammaImage<f64> {
        match &self.table {
            Table::Float(t) => t[n].clone(),
            Table::Exact(t) => GammaImage {
                k: f(&t[n].k),
                d: t[n].d.iter().map(f).collect(),
            },
        }
    }

    pub fn k(&self, n: usize) -> f64 {
        self.image(n).k
    }

    pub fn c_coefficient(&self, n: usize, m: usize) -> Result<f64> {
        match &self.table {
            Table::Float(t) => c_coefficient_in(t, n, m),
            Table::Exact(t) => c_coefficient_in(t, n, m).map(|c| f(&c)),
        }
    }

    /// Coefficients on `|0⟩, |1⟩, |2⟩` of `Γ(|1⟩⟨1|)/|k_1| + Γ(|2⟩⟨2|)/|k_2|`.
    pub fn low_order_combination(&self) -> Result<[f64; 3]> {
        if self.n_max() < 2 {
            return Err(invalid("n_max", self.n_max() as f64, "needs at least two images"));
        }
        let (g1, g2) = (self.image(1), self.image(2));
        if g1.k * g2.k >= 0.0 {
            return Err(Error::InadmissiblePair {
                n: 2,
                m: 1,
                reason: "k_1 and k_2 have the same sign",
            });
        }
        let (w1, w2) = (1.0 / g1.k.abs(), 1.0 / g2.k.abs());
        Ok([0, 1, 2].map(|j| w1 * g1.d_at(j) + w2 * g2.d_at(j)))
    }
}

/// `|1⟩⟨1|` coefficient of the combination of `Γ(|n⟩⟨n|)` and `Γ(|m⟩⟨m|)`
/// that cancels `Γ(|0⟩⟨0|)`.
pub fn c_coefficient_in<F: Field>(images: &[GammaImage<F>], n: usize, m: usize) -> Result<F> {
    let len = images.len();
    if n >= len || m >= len {
        return Err(Error::InadmissiblePair {
            n,
            m,
            reason: "index beyond the solved range",
        });
    }
    let (gn, gm) = (&images[n], &images[m]);
    if !(gn.k.clone() * gm.k.clone() < F::zero()) {
        return Err(Error::InadmissiblePair {
            n,
            m,
            reason: "k_n and k_m must have opposite signs",
        });
    }
    let (a, b) = (gn.k.abs(), gm.k.abs());
    Ok((b.clone() * gn.d_at(1) + a.clone() * gm.d_at(1)) / (a + b))
}

pub fn c_coefficient(q: f64, n: usize, m: usize) -> Result<f64> {
    solve_gamma_recursion(q, n.max(m))?.c_coefficient(n, m)
}

/// Closed forms of the low-order combination for `q > 1/√2`, ordered
/// `|0⟩, |1⟩, |2⟩`.
pub fn proposition_coefficients(q: f64) -> [f64; 3] {
    let den = 2.0 * q * q - 1.0;
    [
        (1.0 - q) / q + (1.0 - q) * (-1.0 + 6.0 * q - 6.0 * q * q) / (q * den),
        1.0 + (1.0 - 2.0 * q).powi(3) / (q * den),
        2.0 * (1.0 - q).powi(2) / den,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preset {
    pub n: usize,
    pub m: usize,
    pub label: &'static str,
}

/// Lower end of the window where the `(2, 1)` pair is negative.
pub fn q_window_lo() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

pub fn q_window_hi() -> f64 {
    0.5 + 3.0_f64.sqrt() / 6.0
}

/// Interval-dependent pair plotted in the `c(q)` figure.
pub fn fig1_preset(q: f64) -> Option<Preset> {
    if !(0.5..1.0).contains(&q) {
        return None;
    }
    Some(if q < q_window_lo() {
        Preset {
            n: 4,
            m: 2,
            label: "c(k_4,-k_2)",
        }
    } else if q < q_window_hi() {
        Preset {
            n: 2,
            m: 1,
            label: "c(k_2,-k_1)",
        }
    } else {
        Preset {
            n: 4,
            m: 2,
            label: "c(-k_4,k_2)",
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativityScan {
    pub q: f64,
    pub n_max: usize,
    /// `(n, m, c)` at the minimum, `None` if no pair is admissible.
    pub min: Option<(usize, usize, f64)>,
    pub admissible_pairs: usize,
    pub exact: bool,
}

impl NegativityScan {
    pub fn is_witness(&self) -> bool {
        matches!(self.min, Some((_, _, c)) if c < -WITNESS_TOL)
    }
}

fn scan_table<F: Field>(t: &[GammaImage<F>]) -> (Option<(usize, usize, F)>, usize) {
    let mut best: Option<(usize, usize, F)> = None;
    let mut count = 0;
    for n in 0..t.len() {
        for m in 0..n {
            if let Ok(c) = c_coefficient_in(t, n, m) {
                count += 1;
                if best.as_ref().is_none_or(|b| c < b.2) {
                    best = Some((n, m, c));
                }
            }
        }
    }
    (best, count)
}

/// Minimum of `c(n, m)` over admissible pairs with `n, m ≤ n_max`.
pub fn min_negativity_scan(q: f64, n_max: usize) -> Result<NegativityScan> {
    let sol = solve_gamma_recursion(q, n_max)?;
    let (min, admissible_pairs) = match &sol.table {
        Table::Float(t) => scan_table(t),
        Table::Exact(t) => {
            let (b, c) = scan_table(t);
            (b.map(|(n, m, v)| (n, m, f(&v))), c)
        }
    };
    Ok(NegativityScan {
        q,
        n_max,
        min,
        admissible_pairs,
        exact: sol.is_exact(),
    })
}

/// `D(N(|m1⟩)‖N(|m2⟩)) − D(Ñ(|m1⟩)‖Ñ(|m2⟩))` for the amplifier: a partial
/// sum over `n ≤ truncation` plus a certified enclosure of the rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub q: f64,
    pub m1: usize,
    pub m2: usize,
    pub truncation: usize,
    pub partial: f64,
    pub remainder_lo: f64,
    pub remainder_hi: f64,
}

impl GapEstimate {
    pub fn lower(&self) -> f64 {
        self.partial + self.remainder_lo
    }

    pub fn upper(&self) -> f64 {
        self.partial + self.remainder_hi
    }

    pub fn width(&self) -> f64 {
        self.remainder_hi - self.remainder_lo
    }

    fn infinite(q: f64, m1: usize, m2: usize, value: f64) -> Self {
        Self {
            q,
            m1,
            m2,
            truncation: 0,
            partial: value,
            remainder_lo: 0.0,
            remainder_hi: 0.0,
        }
    }
}

fn check_gap_args(q: f64, m1: usize, m2: usize) -> Result<()> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(invalid("q", q, "amplifier gain must exceed 1"));
    }
    if m2 == 0 || m1 <= m2 {
        return Err(invalid("m1", m1 as f64, "need m1 > m2 >= 1"));
    }
    Ok(())
}

/// Smallest truncation past every zero of the coefficients involved.
fn min_truncation(q: f64, m1: usize) -> usize {
    (m1 as f64 * (q - 1.0)).ceil() as usize + 1
}

pub fn relative_entropy_gap(q: f64, m1: usize, m2: usize, truncation: usize) -> Result<GapEstimate> {
    check_gap_args(q, m1, m2)?;
    let d = m1 - m2;
    let a1 = amp_atom(q, m1)?;
    let a2 = amp_atom(q, m2)?;
    let c_atom = c_mn(q, m2, d - 1)?;
    let (mut plus_inf, mut minus_inf) = (c_atom == 0.0, false);
    let mut partial = if plus_inf { 0.0 } else { a1 * (a2 / c_atom).ln() };

    let mut t = truncation.max(min_truncation(q, m1));
    let mut tail = c_mn_tail_bound(q, m1, t)?;
    while tail.is_none() {
        t += 1;
        tail = c_mn_tail_bound(q, m1, t)?;
    }
    for n in 0..=t {
        let c1 = c_mn(q, m1, n)?;
        if c1 == 0.0 {
            continue;
        }
        let num = c_mn(q, m2, n)?;
        let den = c_mn(q, m2, n + d)?;
        if num == 0.0 {
            minus_inf = true;
        } else if den == 0.0 {
            plus_inf = true;
        } else {
            partial += c1 * (num / den).ln();
        }
    }
    match (plus_inf, minus_inf) {
        (true, true) => return Err(Error::IndeterminateGap),
        (true, false) => return Ok(GapEstimate::infinite(q, m1, m2, f64::INFINITY)),
        (false, true) => return Ok(GapEstimate::infinite(q, m1, m2, f64::NEG_INFINITY)),
        _ => {}
    }

    // past the truncation ln(c_{m2,n}/c_{m2,n+d}) increases towards d·ln(q/(q−1))
    let a = m2 as f64 * (q - 1.0);
    let (tf, df) = (t as f64, d as f64);
    let ceiling = df * (q / (q - 1.0)).ln();
    let mut first = 2.0 * ((tf + 2.0 - a) / (tf + df + 2.0 - a)).ln();
    for j in 2..=m2 {
        let j = j as f64;
        first += ((tf + 1.0 + j) / (tf + 1.0 + df + j)).ln();
    }
    let mass = tail.expect("tail bound found above");
    Ok(GapEstimate {
        q,
        m1,
        m2,
        truncation: t,
        partial,
        remainder_lo: mass * (ceiling + first).min(0.0),
        remainder_hi: mass * ceiling.max(0.0),
    })
}

/// Grows the truncation until the enclosure is narrower than `1e-6·|partial|`.
pub fn certified_relative_entropy_gap(q: f64, m1: usize, m2: usize) -> Result<GapEstimate> {
    let mut t = 32;
    loop {
        let est = relative_entropy_gap(q, m1, m2, t)?;
        if !est.partial.is_finite() || est.width() <= 1e-6 * est.partial.abs() || est.width() < 1e-15 {
            return Ok(est);
        }
        if est.truncation > 1 << 20 {
            return Err(Error::NoConvergence);
        }
        t = est.truncation * 2;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegradabilityWitness {
    Negativity {
        q: f64,
        n: usize,
        m: usize,
        value: f64,
        exact: bool,
    },
    RelativeEntropy {
        q: f64,
        q_prime: f64,
        m1: usize,
        m2: usize,
        gap: GapEstimate,
    },
}

impl DegradabilityWitness {
    pub fn q(&self) -> f64 {
        match self {
            Self::Negativity { q, .. } | Self::RelativeEntropy { q, .. } => *q,
        }
    }

    /// Certified value: the coefficient, or the upper end of the gap enclosure.
    pub fn value(&self) -> f64 {
        match self {
            Self::Negativity { value, .. } => *value,
            Self::RelativeEntropy { gap, .. } => gap.upper(),
        }
    }

    /// Recomputes the witness from scratch.
    pub fn revalidate(&self) -> Result<bool> {
        Ok(match self {
            Self::Negativity { q, n, m, .. } => c_coefficient(*q, *n, *m)? < -WITNESS_TOL,
            Self::RelativeEntropy { q_prime, m1, m2, .. } => {
                certified_relative_entropy_gap(*q_prime, *m1, *m2)?.upper() < -WITNESS_TOL
            }
        })
    }
}

pub fn negativity_witness(q: f64, n_max: usize) -> Result<DegradabilityWitness> {
    let scan = min_negativity_scan(q, n_max)?;
    match scan.min {
        Some((n, m, value)) if value < -WITNESS_TOL => Ok(DegradabilityWitness::Negativity {
            q,
            n,
            m,
            value,
            exact: scan.exact,
        }),
        Some((n, m, value)) => Err(Error::Inconclusive(format!(
            "minimum c({n}, {m}) = {value:e} is not below -{WITNESS_TOL:e}"
        ))),
        None => Err(Error::Inconclusive(format!("no admissible pair up to n = {n_max}"))),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Searches `q' = x/y + ε` over `eps_grid` for a certified negative gap
/// between Fock inputs `m2 = y` and `m1 ∈ {x+1, x+2, x+3}`.
pub fn find_violation_near_rational(x: usize, y: usize, eps_grid: &[f64]) -> Result<DegradabilityWitness> {
    if y == 0 || x <= y || gcd(x, y) != 1 {
        return Err(invalid("x", x as f64, "need coprime x > y >= 1"));
    }
    if let Some(&bad) = eps_grid.iter().find(|e| !(**e > 0.0)) {
        return Err(invalid("eps", bad, "offsets must be positive"));
    }
    let q = x as f64 / y as f64;
    let mut notes = Vec::new();
    for &eps in eps_grid {
        let q_prime = q + eps;
        for m1 in x + 1..=x + 3 {
            match certified_relative_entropy_gap(q_prime, m1, y) {
                Ok(gap) if gap.upper() < -WITNESS_TOL => {
                    return Ok(DegradabilityWitness::RelativeEntropy {
                        q,
                        q_prime,
                        m1,
                        m2: y,
                        gap,
                    })
                }
                Ok(gap) => notes.push(format!("q'={q_prime} m1={m1}: gap <= {:e}", gap.upper())),
                Err(e) => notes.push(format!("q'={q_prime} m1={m1}: {e}")),
            }
        }
    }
    Err(Error::Inconclusive(notes.join("; ")))
}
