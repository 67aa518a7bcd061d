//! Single-letter capacity quantities and bounds for Gaussian dilations.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channels::{classify_omg, effective_channel, squeezed_env_cm, OmgClass, SymplecticDilation};
use crate::error::{invalid, Error, Result};
use crate::optimize::{coordinate_ascent, line_max, AscentOptions};
use crate::scalar::{lit, to_f64, xlogx, Scalar};
use crate::symplectic::{
    entropy_of_matrix, g_entropy, g_occupation, symplectic_spectrum, CovarianceMatrix, EnergyBudget,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Optimized,
    Bound,
}

/// Gaussian input/environment parameters found by a numerical search.
///
/// `V_A` is a squeezed thermal state with occupation `nbar_a`, squeezing
/// `s_a` and angle `theta_a`; `V_E` is the pure squeezed state
/// `squeezed_env_cm(s_e, theta_e)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimizer {
    pub nbar_a: f64,
    pub s_a: f64,
    pub theta_a: f64,
    pub s_e: f64,
    pub theta_e: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult<T: Scalar> {
    pub value: T,
    pub optimizer: Option<Optimizer>,
    pub method: Method,
    /// False when the search hit its iteration cap; `value` is then the best
    /// found so far.
    pub converged: bool,
    pub iterations: usize,
}

/// JSON form `{quantity, params, value, optimizer, method}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRecord {
    pub quantity: String,
    pub params: serde_json::Map<String, serde_json::Value>,
    pub value: f64,
    pub optimizer: Option<Optimizer>,
    pub method: Method,
}

impl<T: Scalar> CapacityResult<T> {
    pub fn closed_form(value: T) -> Self {
        Self {
            value,
            optimizer: None,
            method: Method::ClosedForm,
            converged: true,
            iterations: 0,
        }
    }

    pub fn to_record(&self, quantity: &str, params: serde_json::Map<String, serde_json::Value>) -> CapacityRecord {
        CapacityRecord {
            quantity: quantity.to_string(),
            params,
            value: to_f64(self.value),
            optimizer: self.optimizer,
            method: self.method,
        }
    }
}

fn check_one_mode<T: Scalar>(w: &SymplecticDilation<T>) -> Result<()> {
    if w.n_a() != 1 || w.n_e() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: w.n_a().max(w.n_e()),
        });
    }
    Ok(())
}

/// `S(M V_A Mᵀ + N V_E Nᵀ) − S(O V_A Oᵀ + P V_E Pᵀ)`.
pub fn coherent_information_gaussian<T: Scalar>(
    w: &SymplecticDilation<T>,
    v_e: &CovarianceMatrix<T>,
    v_a: &CovarianceMatrix<T>,
) -> Result<T> {
    if v_a.n_modes() != w.n_a() {
        return Err(Error::DimensionMismatch {
            expected: w.n_a(),
            found: v_a.n_modes(),
        });
    }
    if v_e.n_modes() != w.n_e() {
        return Err(Error::DimensionMismatch {
            expected: w.n_e(),
            found: v_e.n_modes(),
        });
    }
    let (m, n, o, p) = (w.m(), w.n(), w.o(), w.p());
    let b = &m * v_a.matrix() * m.transpose() + &n * v_e.matrix() * n.transpose();
    let f = &o * v_a.matrix() * o.transpose() + &p * v_e.matrix() * p.transpose();
    Ok(entropy_of_matrix(&b)? - entropy_of_matrix(&f)?)
}

/// Closed-form optimum of the coherent information for a one-mode channel
/// with parameters `x`, `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmgCoherentInfo<T> {
    pub value: T,
    pub k: T,
    /// Set when `K < 0` or the formula is negative; `value` is then 0.
    pub clamped: bool,
}

pub fn optimized_coherent_info_omg<T: Scalar>(x: T, y: T) -> Result<OmgCoherentInfo<T>> {
    if !x.is_finite() || x <= T::zero() {
        return Err(invalid("x", to_f64(x), "must be positive"));
    }
    if x == T::one() {
        return Err(invalid("x", 1.0, "singular at x = 1"));
    }
    if !y.is_finite() || y < T::zero() {
        return Err(invalid("y", to_f64(y), "must be nonnegative"));
    }
    let d = (T::one() - x).abs();
    let mut k = (y - d) * lit(0.5);
    if k.abs() <= d * lit(1e-14) {
        k = T::zero();
    }
    if k < T::zero() {
        return Ok(OmgCoherentInfo {
            value: T::zero(),
            k,
            clamped: true,
        });
    }
    let u = k / d;
    let value = xlogx(u) - xlogx(u + T::one()) + (x / d).ln();
    if value < T::zero() {
        return Ok(OmgCoherentInfo {
            value: T::zero(),
            k,
            clamped: true,
        });
    }
    Ok(OmgCoherentInfo {
        value,
        k,
        clamped: false,
    })
}

/// Unconstrained capacity of the canonical unitary `U^(q)`:
/// 0 for `q ≤ 1/2`, `ln(q/(1−q))` below 1 and `ln(q/(q−1))` above.
pub fn q_ghx_closed_form<T: Scalar>(q: T) -> Result<T> {
    if !q.is_finite() || q <= T::zero() {
        return Err(invalid("q", to_f64(q), "must be positive"));
    }
    if q == T::one() {
        return Err(invalid("q", 1.0, "singular at q = 1"));
    }
    let half: T = lit(0.5);
    Ok(if q <= half {
        T::zero()
    } else if q < T::one() {
        (q / (T::one() - q)).ln()
    } else {
        (q / (q - T::one())).ln()
    })
}

/// `(P + 1/2) I` on `n_modes` modes.
pub fn gibbs_state_cm<T: Scalar>(p: T, n_modes: usize) -> Result<CovarianceMatrix<T>> {
    CovarianceMatrix::thermal(n_modes, p)
}

fn acosh_budget<T: Scalar>(p: T) -> T {
    // largest s with cosh(2s) ≤ 2P + 1
    (lit::<T>(2.0) * p + T::one()).acosh() * lit(0.5)
}

fn input_cm<T: Scalar>(p_a: T, s_a: T, t: T, theta_a: T) -> Result<(CovarianceMatrix<T>, T)> {
    let half: T = lit(0.5);
    let c = (lit::<T>(2.0) * s_a).cosh();
    let nbar = (t * ((p_a + half) / c - half)).max(T::zero());
    Ok((CovarianceMatrix::squeezed_thermal(nbar, s_a, theta_a * half)?, nbar))
}

/// Maximizes the coherent information over Gaussian inputs with mean photon
/// number ≤ `P_A` and pure squeezed environments with mean photon number
/// ≤ `P_E`, starting from (thermal input, vacuum environment).
pub fn maximize_coherent_info<T: Scalar>(w: &SymplecticDilation<T>, budget: &EnergyBudget<T>) -> Result<CapacityResult<T>> {
    maximize_coherent_info_from(w, budget, [T::zero(), T::one(), T::zero(), T::zero(), T::zero()], AscentOptions::default())
}

/// As [`maximize_coherent_info`] from an explicit start
/// `[s_a, t, theta_a, s_e, theta_e]` where `nbar_a = t·((P_A+½)/cosh 2s_a − ½)`.
pub fn maximize_coherent_info_from<T: Scalar>(
    w: &SymplecticDilation<T>,
    budget: &EnergyBudget<T>,
    start: [T; 5],
    opts: AscentOptions,
) -> Result<CapacityResult<T>> {
    check_one_mode(w)?;
    let two_pi: T = T::two_pi();
    let bounds = [
        (T::zero(), acosh_budget(budget.p_a)),
        (T::zero(), T::one()),
        (T::zero(), two_pi),
        (T::zero(), acosh_budget(budget.p_e)),
        (T::zero(), two_pi),
    ];
    let eval = |p: &[T]| -> Result<T> {
        let (v_a, _) = input_cm(budget.p_a, p[0], p[1], p[2])?;
        let v_e = squeezed_env_cm(p[3], p[4])?;
        coherent_information_gaussian(w, &v_e, &v_a)
    };
    let objective = |p: &[T]| eval(p).unwrap_or(T::min_value().unwrap());
    let r = coordinate_ascent(objective, &start, &bounds, opts);
    let value = eval(&r.x)?;
    let (_, nbar) = input_cm(budget.p_a, r.x[0], r.x[1], r.x[2])?;
    Ok(CapacityResult {
        value,
        optimizer: Some(Optimizer {
            nbar_a: to_f64(nbar),
            s_a: to_f64(r.x[0]),
            theta_a: to_f64(r.x[2]),
            s_e: to_f64(r.x[3]),
            theta_e: to_f64(r.x[4]),
        }),
        method: Method::Optimized,
        converged: r.converged,
        iterations: r.iterations,
    })
}

/// Re-evaluates the coherent information at a reported optimizer.
pub fn coherent_info_at<T: Scalar>(w: &SymplecticDilation<T>, opt: &Optimizer) -> Result<T> {
    let v_a = CovarianceMatrix::squeezed_thermal(lit(opt.nbar_a), lit(opt.s_a), lit::<T>(opt.theta_a) * lit(0.5))?;
    let v_e = squeezed_env_cm(lit(opt.s_e), lit(opt.theta_e))?;
    coherent_information_gaussian(w, &v_e, &v_a)
}

/// Lower bound from the Gibbs input `γ_A(P_A)` maximized over pure squeezed
/// environments with energy ≤ `P_E`.
pub fn energy_constrained_q_lower_bound<T: Scalar>(w: &SymplecticDilation<T>, budget: &EnergyBudget<T>) -> Result<CapacityResult<T>> {
    check_one_mode(w)?;
    let gibbs = gibbs_state_cm(budget.p_a, 1)?;
    let bounds = [(T::zero(), acosh_budget(budget.p_e)), (T::zero(), T::two_pi())];
    let eval = |p: &[T]| -> Result<T> {
        let v_e = squeezed_env_cm(p[0], p[1])?;
        coherent_information_gaussian(w, &v_e, &gibbs)
    };
    let r = coordinate_ascent(
        |p: &[T]| eval(p).unwrap_or(T::min_value().unwrap()),
        &[T::zero(), T::zero()],
        &bounds,
        AscentOptions::default(),
    );
    Ok(CapacityResult {
        value: eval(&r.x)?,
        optimizer: Some(Optimizer {
            nbar_a: to_f64(budget.p_a),
            s_a: 0.0,
            theta_a: 0.0,
            s_e: to_f64(r.x[0]),
            theta_e: to_f64(r.x[1]),
        }),
        method: Method::Bound,
        converged: r.converged,
        iterations: r.iterations,
    })
}

/// Threshold power `e^{2|s|} + 2y sinh(2|s|)/|x| − 1`.
pub fn threshold_power<T: Scalar>(x: T, y: T, s: T) -> T {
    let two: T = lit(2.0);
    let s = s.abs();
    (two * s).exp() + two * y * (two * s).sinh() / x.abs() - T::one()
}

/// Classical-capacity lower bound
/// `max_s g_occ(|x|P_A + y cosh 2s + (|x|−1)/2) − g_occ(y + (|x|−1)/2)`
/// subject to `cosh 2s ≤ 2P_E + 1` and `P_th(s) ≤ P_A`.
pub fn classical_capacity_lower_bound<T: Scalar>(x: T, y: T, budget: &EnergyBudget<T>) -> Result<CapacityResult<T>> {
    if !x.is_finite() || x == T::zero() || x == T::one() {
        return Err(invalid("x", to_f64(x), "must be finite and differ from 0 and 1"));
    }
    if !y.is_finite() || y < T::zero() {
        return Err(invalid("y", to_f64(y), "must be nonnegative"));
    }
    let half: T = lit(0.5);
    let ax = x.abs();
    let base = y + (ax - T::one()) * half;
    if base < T::zero() {
        return Err(invalid("y", to_f64(y), "noise below the vacuum level for this x"));
    }
    // P_th is increasing in s, so the feasible set is [0, s_max]
    let s_energy = acosh_budget(budget.p_e);
    let s_max = if threshold_power(x, y, s_energy) <= budget.p_a {
        s_energy
    } else {
        let (mut lo, mut hi) = (T::zero(), s_energy);
        for _ in 0..200 {
            let mid = (lo + hi) * half;
            if threshold_power(x, y, mid) <= budget.p_a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let value = classical_objective(x, y, budget.p_a, s_max)?;
    Ok(CapacityResult {
        value,
        optimizer: Some(Optimizer {
            nbar_a: to_f64(budget.p_a),
            s_a: 0.0,
            theta_a: 0.0,
            s_e: to_f64(s_max),
            theta_e: 0.0,
        }),
        method: Method::Bound,
        converged: true,
        iterations: 0,
    })
}

/// Objective of [`classical_capacity_lower_bound`] at squeezing `s`.
pub fn classical_objective<T: Scalar>(x: T, y: T, p_a: T, s: T) -> Result<T> {
    let half: T = lit(0.5);
    let ax = x.abs();
    let base = y + (ax - T::one()) * half;
    Ok(g_occupation(ax * p_a + y * (lit::<T>(2.0) * s).cosh() + (ax - T::one()) * half)? - g_occupation(base)?)
}

/// `S((P_A+½)MMᵀ + ½NNᵀ) − S(½MMᵀ + ½NNᵀ)`.
pub fn chi_h_lower<T: Scalar>(w: &SymplecticDilation<T>, budget: &EnergyBudget<T>) -> Result<T> {
    chi_lower(&w.m(), &w.n(), budget.p_a)
}

/// `chi_h_lower` with `(M, P_A)` and `(N, P_E)` exchanged.
pub fn chi_a_lower<T: Scalar>(w: &SymplecticDilation<T>, budget: &EnergyBudget<T>) -> Result<T> {
    chi_lower(&w.n(), &w.m(), budget.p_e)
}

fn chi_lower<T: Scalar>(m: &DMatrix<T>, n: &DMatrix<T>, p: T) -> Result<T> {
    if p < T::zero() {
        return Err(invalid("P", to_f64(p), "must be nonnegative"));
    }
    let half: T = lit(0.5);
    let mm = m * m.transpose();
    let nn = n * n.transpose();
    let signal = &mm * (p + half) + &nn * half;
    let noise = (&mm + &nn) * half;
    Ok(entropy_of_matrix(&signal)? - entropy_of_matrix(&noise)?)
}

/// `min(P_A, P_E) / (2 max(P_A, P_E) + 1)`.
pub fn uncertainty_lower_bound<T: Scalar>(budget: &EnergyBudget<T>) -> T {
    let lo = budget.p_a.min(budget.p_e);
    let hi = budget.p_a.max(budget.p_e);
    lo / (lit::<T>(2.0) * hi + T::one())
}

/// Parameters of the per-class bounds, in the parameterization where the
/// class is given by `M` and `NNᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub kappa: Option<f64>,
    pub n0: Option<f64>,
}

/// Per-class lower bound on `chi_h + chi_a` for one-mode dilations:
///
/// * A1 (`M = 0`, `NNᵀ = I`), A2 (`M = diag(1,0)`, `NNᵀ = I`): no parameters.
/// * B1 (`M = I`, `NNᵀ = diag(1,0)/(2N₀+1)`), B2 (`M = I`,
///   `NNᵀ = N₀/(N₀+½) I`): `n0 ≥ 0`.
/// * C_att (`0<κ<1`), C_amp (`κ>1`), D (`κ<0`): `kappa`.
pub fn class_uncertainty_bound<T: Scalar>(class: OmgClass, params: &ClassParams, budget: &EnergyBudget<T>) -> Result<T> {
    let half: T = lit(0.5);
    let two: T = lit(2.0);
    let (pa, pe) = (budget.p_a, budget.p_e);
    let g = |v: T| g_entropy(v);
    let n0 = || -> Result<T> {
        match params.n0 {
            Some(v) if v >= 0.0 => Ok(lit(v)),
            Some(v) => Err(invalid("n0", v, "must be nonnegative")),
            None => Err(invalid("n0", f64::NAN, "required for class B")),
        }
    };
    let kappa = |ok: fn(f64) -> bool, why: &'static str| -> Result<T> {
        match params.kappa {
            Some(k) if ok(k) => Ok(lit(k)),
            Some(k) => Err(invalid("kappa", k, why)),
            None => Err(invalid("kappa", f64::NAN, why)),
        }
    };
    match class {
        OmgClass::A1 => g(pe + half),
        OmgClass::A2 => Ok(g(((pa + T::one()) * half).sqrt())?
            + g(((pe + T::one()) * (pe + half)).sqrt())?
            - two * g(half.sqrt())?),
        OmgClass::B1 => {
            let n0 = n0()?;
            let d = lit::<T>(4.0) * n0 + two;
            Ok(g(((pa + half + two / d) * (pa + half)).sqrt())?
                + g(((pe + half) / d + half).sqrt())?
                - two * g((lit::<T>(0.25) + T::one() / d).sqrt())?)
        }
        OmgClass::B2 => {
            let n0 = n0()?;
            let r = n0 / (two * n0 + T::one());
            Ok(g(pa + half + r)? + g((pe + half) * n0 / (n0 + half) + half)? - two * g(half + r)?)
        }
        OmgClass::CAtt => {
            let k = kappa(|k| k > 0.0 && k < 1.0, "C_att needs 0 < kappa < 1")?;
            Ok(g((pa + half) * k + T::one() - k)? + g((pe + half) * (T::one() - k) + k)?)
        }
        OmgClass::CAmp => {
            let k = kappa(|k| k > 1.0 && k.is_finite(), "C_amp needs kappa > 1")?;
            Ok(g((pa + half) * k + k - T::one())? + g((pe + half) * (k - T::one()) + k)? - two * g(k - half)?)
        }
        OmgClass::D => {
            let k = kappa(|k| k < 0.0 && k.is_finite(), "D needs kappa < 0")?;
            let ak = k.abs();
            let one_k = (T::one() - k).abs();
            Ok(g((pa + half) * ak + T::one() - k)? + g((pe + half) * (T::one() - k) + ak)?
                - two * g((ak + one_k) * half)?)
        }
    }
}

/// Class of the effective channel of `w` with a vacuum environment and the
/// class-bound parameters read off `M` and `NNᵀ`.
pub fn dilation_class<T: Scalar>(w: &SymplecticDilation<T>) -> Result<(OmgClass, ClassParams)> {
    check_one_mode(w)?;
    let ch = effective_channel(w, &CovarianceMatrix::vacuum(1))?;
    let class = classify_omg(&ch)?.class;
    let m = w.m();
    let n = w.n();
    let nn = &n * n.transpose();
    let kappa = to_f64(m.determinant());
    let params = match class {
        OmgClass::A1 | OmgClass::A2 => ClassParams { kappa: None, n0: None },
        OmgClass::B1 => {
            let a = to_f64(nn.trace());
            let n0 = if a > 0.0 { (1.0 / a - 1.0) / 2.0 } else { f64::INFINITY };
            ClassParams { kappa: None, n0: Some(n0) }
        }
        OmgClass::B2 => {
            let a = to_f64(nn.determinant()).max(0.0).sqrt();
            let n0 = if a < 1.0 { a / (2.0 * (1.0 - a)) } else { f64::INFINITY };
            ClassParams { kappa: None, n0: Some(n0) }
        }
        OmgClass::CAtt | OmgClass::CAmp | OmgClass::D => ClassParams {
            kappa: Some(kappa),
            n0: None,
        },
    };
    Ok((class, params))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub chi_h_lower: f64,
    pub chi_a_lower: f64,
    pub generic_bound: f64,
    /// `None` when the class parameters fall outside the bound's domain.
    pub class_bound: Option<f64>,
    pub class: OmgClass,
    pub params: ClassParams,
}

pub fn uncertainty_report<T: Scalar>(w: &SymplecticDilation<T>, budget: &EnergyBudget<T>) -> Result<UncertaintyReport> {
    let (class, params) = dilation_class(w)?;
    let class_bound = class_uncertainty_bound(class, &params, budget).ok().map(to_f64);
    Ok(UncertaintyReport {
        chi_h_lower: to_f64(chi_h_lower(w, budget)?),
        chi_a_lower: to_f64(chi_a_lower(w, budget)?),
        generic_bound: to_f64(uncertainty_lower_bound(budget)),
        class_bound,
        class,
        params,
    })
}

/// Conferencing-encoder bound with both readings of its `g` arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConferencingBound {
    /// `Σ g_occ(((2P_A+1)ν − 1)/2) − g_occ((ν − 1)/2)`, i.e. the displayed
    /// arguments read as occupation numbers.
    pub value: f64,
    /// The displayed arguments fed to the `ν`-form `g`; `None` when any
    /// argument lies below 1/2.
    pub nu_form: Option<f64>,
    pub symplectic_eigenvalues: Vec<f64>,
}

pub fn conferencing_lower_bound<T: Scalar>(w: &SymplecticDilation<T>, p_a: T) -> Result<ConferencingBound> {
    if !(p_a >= T::zero()) {
        return Err(invalid("P_A", to_f64(p_a), "must be nonnegative"));
    }
    let half: T = lit(0.5);
    let m = w.m();
    let n = w.n();
    let sum = &m * m.transpose() + &n * n.transpose();
    let nus = symplectic_spectrum(&sum)?;
    let scale = lit::<T>(2.0) * p_a + T::one();
    let mut value = T::zero();
    let mut nu_form = Some(T::zero());
    for &nu in &nus {
        let hi = (scale * nu - T::one()) * half;
        let lo = ((nu - T::one()) * half).max(T::zero());
        value += g_occupation(hi.max(T::zero()))? - g_occupation(lo)?;
        nu_form = match nu_form {
            Some(acc) if hi >= half && lo >= half => Some(acc + g_entropy(hi)? - g_entropy(lo)?),
            _ => None,
        };
    }
    Ok(ConferencingBound {
        value: to_f64(value),
        nu_form: nu_form.map(to_f64),
        symplectic_eigenvalues: nus.into_iter().map(to_f64).collect(),
    })
}

/// `28√ε g(4P_B/√ε + ½) + 3 g(√ε + ½)`.
pub fn continuity_bound<T: Scalar>(epsilon: T, p_b: T) -> Result<T> {
    if !(epsilon > T::zero() && epsilon <= T::one()) {
        return Err(invalid("epsilon", to_f64(epsilon), "must lie in (0, 1]"));
    }
    if !(p_b >= T::zero()) {
        return Err(invalid("P_B", to_f64(p_b), "must be nonnegative"));
    }
    let half: T = lit(0.5);
    let r = epsilon.sqrt();
    Ok(lit::<T>(28.0) * r * g_entropy(lit::<T>(4.0) * p_b / r + half)? + lit::<T>(3.0) * g_entropy(r + half)?)
}

/// One-dimensional scan used to cross-check the classical bound.
pub fn classical_bound_by_scan<T: Scalar>(x: T, y: T, budget: &EnergyBudget<T>, samples: usize) -> Result<T> {
    let s_energy = acosh_budget(budget.p_e);
    let mut best = classical_objective(x, y, budget.p_a, T::zero())?;
    for i in 1..=samples {
        let s = s_energy * lit(i as f64 / samples as f64);
        if threshold_power(x, y, s) <= budget.p_a {
            best = best.max(classical_objective(x, y, budget.p_a, s)?);
        }
    }
    Ok(best)
}

/// Thermal-input coherent information maximized over the occupation alone.
pub fn thermal_coherent_info_max<T: Scalar>(w: &SymplecticDilation<T>, v_e: &CovarianceMatrix<T>, p_a: T) -> Result<T> {
    let f = |nbar: T| {
        CovarianceMatrix::thermal(1, nbar)
            .and_then(|v| coherent_information_gaussian(w, v_e, &v))
            .unwrap_or(T::min_value().unwrap())
    };
    Ok(line_max(f, T::zero(), p_a, 16, 1e-12).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{beam_splitter, two_mode_squeezer};

    const LN2: f64 = std::f64::consts::LN_2;

    fn bs(q: f64) -> SymplecticDilation<f64> {
        beam_splitter(q).unwrap().dilation().clone()
    }

    fn amp(q: f64) -> SymplecticDilation<f64> {
        two_mode_squeezer(q).unwrap().dilation().clone()
    }

    fn budget(pa: f64, pe: f64) -> EnergyBudget<f64> {
        EnergyBudget::new(pa, pe).unwrap()
    }

    fn g(x: f64) -> f64 {
        g_entropy(x).unwrap()
    }

    #[test]
    fn coherent_info_examples() {
        let w = bs(0.75);
        let vac = CovarianceMatrix::vacuum(1);
        assert!(coherent_information_gaussian(&w, &vac, &vac).unwrap().abs() < 1e-14);
        let th = CovarianceMatrix::thermal(1, 5.0).unwrap();
        let expect = g(0.75 * 5.5 + 0.25 * 0.5) - g(0.25 * 5.5 + 0.75 * 0.5);
        assert!((coherent_information_gaussian(&w, &vac, &th).unwrap() - expect).abs() < 1e-12);
        let big = CovarianceMatrix::thermal(1, 1e4).unwrap();
        let v = coherent_information_gaussian(&w, &vac, &big).unwrap();
        assert!((v - 3.0_f64.ln()).abs() < 2e-3);
        assert!(coherent_information_gaussian(&w, &CovarianceMatrix::vacuum(2), &vac).is_err());
    }

    #[test]
    fn brad_examples() {
        let r = optimized_coherent_info_omg(0.75_f64, 0.25).unwrap();
        assert_eq!(r.k, 0.0);
        assert!((r.value - 3.0_f64.ln()).abs() < 1e-15);
        let r = optimized_coherent_info_omg(2.0_f64, 1.0).unwrap();
        assert_eq!(r.value, LN2);
        let r = optimized_coherent_info_omg(0.8_f64, 0.5).unwrap();
        assert!((r.k - 0.15).abs() < 1e-15);
        let expect = 0.75 * 0.75_f64.ln() - 1.75 * 1.75_f64.ln() + 4.0_f64.ln();
        assert!((r.value - expect).abs() < 1e-12);
        assert!(optimized_coherent_info_omg(1.0_f64, 0.5).is_err());
        assert!(optimized_coherent_info_omg(0.0_f64, 0.5).is_err());
        assert!(optimized_coherent_info_omg(0.5_f64, -0.1).is_err());
        let r = optimized_coherent_info_omg(0.75_f64, 0.1).unwrap();
        assert!(r.clamped && r.value == 0.0);
    }

    #[test]
    fn closed_form_examples() {
        assert!((q_ghx_closed_form(2.0_f64 / 3.0).unwrap() - LN2).abs() < 1e-15);
        assert_eq!(q_ghx_closed_form(0.3_f64).unwrap(), 0.0);
        assert_eq!(q_ghx_closed_form(0.5_f64).unwrap(), 0.0);
        assert_eq!(q_ghx_closed_form(2.0_f64).unwrap(), LN2);
        assert!(q_ghx_closed_form(1.0_f64).is_err());
        assert!(q_ghx_closed_form(0.0_f64).is_err());
    }

    #[test]
    fn closed_form_matches_brad_on_grid() {
        for i in 1..500 {
            let q = 0.5 + i as f64 * 0.001;
            let b = optimized_coherent_info_omg(q, (1.0 - q).abs()).unwrap().value;
            assert!((b - q_ghx_closed_form(q).unwrap()).abs() < 1e-12, "{q}");
        }
        for i in 1..900 {
            let q = 1.0 + i as f64 * 0.01;
            let b = optimized_coherent_info_omg(q, q - 1.0).unwrap().value;
            assert!((b - q_ghx_closed_form(q).unwrap()).abs() < 1e-12, "{q}");
        }
    }

    #[test]
    fn gibbs_examples() {
        assert_eq!(gibbs_state_cm(0.0_f64, 1).unwrap(), CovarianceMatrix::vacuum(1));
        let v = gibbs_state_cm(1.0_f64, 1).unwrap();
        assert_eq!(v.matrix()[(0, 0)], 1.5);
        let s = crate::symplectic::entropy_gaussian(&v).unwrap();
        assert!((s - g(1.5)).abs() < 1e-14);
        assert!(gibbs_state_cm(-1.0_f64, 1).is_err());
        let mut prev = -1.0;
        for p in [0.0, 0.1, 0.5, 1.0, 3.0, 10.0] {
            let s = crate::symplectic::entropy_gaussian(&gibbs_state_cm(p, 2).unwrap()).unwrap();
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn maximize_zero_budget_is_zero() {
        let r = maximize_coherent_info(&bs(0.75), &budget(0.0, 0.0)).unwrap();
        assert!(r.value.abs() < 1e-14);
        assert!(r.converged);
    }

    #[test]
    fn maximize_matches_thermal_oracle_without_environment_energy() {
        let w = bs(0.75);
        let r = maximize_coherent_info(&w, &budget(100.0, 0.0)).unwrap();
        let oracle = thermal_coherent_info_max(&w, &CovarianceMatrix::vacuum(1), 100.0).unwrap();
        assert!((r.value - oracle).abs() < 5e-2);
        assert!(r.value >= oracle - 1e-9);
        let again = coherent_info_at(&w, r.optimizer.as_ref().unwrap()).unwrap();
        assert!((again - r.value).abs() < 1e-9);
    }

    #[test]
    fn maximize_is_monotone_and_reproducible() {
        let w = bs(0.8);
        let lo = maximize_coherent_info(&w, &budget(1.0, 0.5)).unwrap();
        let hi = maximize_coherent_info(&w, &budget(10.0, 0.5)).unwrap();
        assert!(lo.value <= hi.value + 1e-12);
        let other = maximize_coherent_info_from(
            &w,
            &budget(10.0, 0.5),
            [0.5, 0.3, 1.0, 0.2, 2.0],
            AscentOptions::default(),
        )
        .unwrap();
        assert!((other.value - hi.value).abs() < 1e-6);
    }

    #[test]
    fn maximize_amplifier_approaches_closed_form() {
        let w = amp(2.0);
        let r = maximize_coherent_info(&w, &budget(1e4, 1.0)).unwrap();
        assert!(r.value <= LN2 + 1e-9);
        assert!((r.value - LN2).abs() < 2e-3);
    }

    #[test]
    fn energy_lower_bound_examples() {
        let w = bs(0.75);
        let r = energy_constrained_q_lower_bound(&w, &budget(5.0, 0.0)).unwrap();
        let direct = coherent_information_gaussian(&w, &CovarianceMatrix::vacuum(1), &CovarianceMatrix::thermal(1, 5.0).unwrap()).unwrap();
        assert!((r.value - direct).abs() < 1e-14);
        let closed = q_ghx_closed_form(0.75).unwrap();
        let mut prev = f64::MIN;
        for pa in [0.1, 1.0, 10.0, 100.0] {
            for pe in [0.0, 1.0, 10.0] {
                let v = energy_constrained_q_lower_bound(&w, &budget(pa, pe)).unwrap().value;
                assert!(v <= closed + 1e-12);
                if pe == 0.0 {
                    assert!(v >= prev);
                    prev = v;
                }
            }
        }
        let far = energy_constrained_q_lower_bound(&w, &budget(1e4, 1e4)).unwrap().value;
        assert!((far - closed).abs() < 5e-3);
    }

    #[test]
    fn classical_bound_examples() {
        let b0 = budget(2.0, 0.0);
        let r = classical_capacity_lower_bound(0.75_f64, 0.25, &b0).unwrap();
        let expect = g_occupation(0.75 * 2.0 + 0.25 - 0.125).unwrap() - g_occupation(0.125).unwrap();
        assert!((r.value - expect).abs() < 1e-14);
        let z = classical_capacity_lower_bound(0.75_f64, 0.25, &budget(0.0, 3.0)).unwrap();
        assert!(z.value.abs() < 1e-14);
        let mut prev = f64::MIN;
        for pe in [0.0, 0.1, 0.5, 1.0, 5.0] {
            let b = budget(3.0, pe);
            let v = classical_capacity_lower_bound(0.75_f64, 0.25, &b).unwrap().value;
            let scan = classical_bound_by_scan(0.75_f64, 0.25, &b, 20_000).unwrap();
            assert!(v >= prev - 1e-12);
            assert!(v >= scan - 1e-12 && v - scan < 1e-3, "{pe} {v} {scan}");
            prev = v;
        }
        assert!(classical_capacity_lower_bound(1.0_f64, 0.25, &b0).is_err());
        assert!(classical_capacity_lower_bound(0.0_f64, 0.25, &b0).is_err());
    }

    #[test]
    fn threshold_power_vanishes_at_zero() {
        assert_eq!(threshold_power(0.5_f64, 0.5, 0.0), 0.0);
        assert!(threshold_power(0.5_f64, 0.5, 0.3) > 0.0);
    }

    #[test]
    fn chi_examples() {
        let w = bs(0.3);
        assert!(chi_h_lower(&w, &budget(0.0, 4.0)).unwrap().abs() < 1e-14);
        for pa in [0.1, 1.0, 7.0] {
            let v = chi_h_lower(&w, &budget(pa, 0.0)).unwrap();
            assert!((v - g(0.3 * pa + 0.5)).abs() < 1e-12);
        }
        let b = budget(2.0, 5.0);
        let swapped = w.exchange_inputs();
        assert!((chi_h_lower(&w, &b).unwrap() - chi_a_lower(&swapped, &b.swapped()).unwrap()).abs() < 1e-12);
        assert!((chi_a_lower(&w, &b).unwrap() - chi_h_lower(&swapped, &b.swapped()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn uncertainty_examples() {
        assert!((uncertainty_lower_bound(&budget(1.0, 1.0)) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(uncertainty_lower_bound(&budget(0.0, 5.0)), 0.0);
        assert_eq!(uncertainty_lower_bound(&budget(2.0, 7.0)), uncertainty_lower_bound(&budget(7.0, 2.0)));
    }

    #[test]
    fn uncertainty_relation_holds_for_canonical_unitaries() {
        let ps = [0.1, 0.5, 1.0, 5.0, 10.0];
        for w in [bs(0.6), bs(0.75), amp(1.5), amp(2.0)] {
            for pa in ps {
                for pe in ps {
                    let b = budget(pa, pe);
                    let sum = chi_h_lower(&w, &b).unwrap() + chi_a_lower(&w, &b).unwrap();
                    assert!(sum >= uncertainty_lower_bound(&b));
                }
            }
        }
    }

    #[test]
    fn class_bound_examples() {
        for p in [0.1, 1.0, 10.0] {
            let v = class_uncertainty_bound(OmgClass::CAtt, &ClassParams { kappa: Some(0.5), n0: None }, &budget(p, p)).unwrap();
            assert!((v - 2.0 * g(p / 2.0 + 0.75)).abs() < 1e-13);
        }
        let none = ClassParams { kappa: None, n0: None };
        let v = class_uncertainty_bound(OmgClass::A1, &none, &budget(3.0, 1.0)).unwrap();
        assert!((v - 2.0 * LN2).abs() < 1e-15);
        assert!(class_uncertainty_bound(OmgClass::CAtt, &ClassParams { kappa: Some(1.5), n0: None }, &budget(1.0, 1.0)).is_err());
        assert!(class_uncertainty_bound(OmgClass::B2, &none, &budget(1.0, 1.0)).is_err());
        assert!(class_uncertainty_bound(OmgClass::B2, &ClassParams { kappa: None, n0: Some(-1.0) }, &budget(1.0, 1.0)).is_err());
    }

    #[test]
    fn class_amp_limit_near_one() {
        let b = budget(2.0, 3.0);
        let near = class_uncertainty_bound(OmgClass::CAmp, &ClassParams { kappa: Some(1.0 + 1e-9), n0: None }, &b).unwrap();
        // the κ-dependence of the second and third terms leaves g(1) behind
        let limit = g(2.5) + g(1.0);
        assert!((near - limit).abs() < 1e-6, "{near} {limit}");
    }

    #[test]
    fn class_bounds_dominate_generic_bound() {
        let ps = [0.1, 0.5, 1.0, 5.0, 10.0];
        let mut cases: Vec<(OmgClass, ClassParams)> = vec![
            (OmgClass::A1, ClassParams { kappa: None, n0: None }),
            (OmgClass::A2, ClassParams { kappa: None, n0: None }),
        ];
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
        for (class, params) in cases {
            for pa in ps {
                for pe in ps {
                    let b = budget(pa, pe);
                    let v = class_uncertainty_bound(class, &params, &b).unwrap();
                    assert!(v >= uncertainty_lower_bound(&b), "{class} {params:?} {pa} {pe}");
                }
            }
        }
    }

    #[test]
    fn class_a1_bound_below_chi_sum() {
        let b = budget(1.5, 2.5);
        let half = ClassParams { kappa: None, n0: None };
        let a1 = SymplecticDilation::<f64>::swap();
        let sum = chi_h_lower(&a1, &b).unwrap() + chi_a_lower(&a1, &b).unwrap();
        let bound = class_uncertainty_bound(OmgClass::A1, &half, &b).unwrap();
        assert!(sum >= bound - 1e-12);
    }

    #[test]
    fn dilation_class_of_canonical_unitaries() {
        let (c, p) = dilation_class(&bs(0.4)).unwrap();
        assert_eq!(c, OmgClass::CAtt);
        assert!((p.kappa.unwrap() - 0.4).abs() < 1e-12);
        let (c, p) = dilation_class(&amp(3.0)).unwrap();
        assert_eq!(c, OmgClass::CAmp);
        assert!((p.kappa.unwrap() - 3.0).abs() < 1e-12);
        let (c, _) = dilation_class(&SymplecticDilation::<f64>::swap()).unwrap();
        assert_eq!(c, OmgClass::A1);
        let r = uncertainty_report(&bs(0.4), &budget(1.0, 1.0)).unwrap();
        assert!(r.class_bound.is_some());
        assert_eq!(r.generic_bound, 1.0 / 3.0);
    }

    #[test]
    fn conferencing_examples() {
        let w = bs(0.6);
        assert!(conferencing_lower_bound(&w, 0.0_f64).unwrap().value.abs() < 1e-14);
        let r = conferencing_lower_bound(&w, 1.0_f64).unwrap();
        assert_eq!(r.symplectic_eigenvalues.len(), 1);
        assert!((r.symplectic_eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((r.value - g(1.5)).abs() < 1e-12);
        assert!((r.value - g_occupation(1.0).unwrap()).abs() < 1e-12);
        assert!(r.nu_form.is_none());
        // the encoders share one energy budget, so P_E = P_A
        for w in [bs(0.6), bs(0.75), amp(1.5), amp(2.0)] {
            for p in [0.1, 0.5, 1.0, 5.0, 10.0] {
                let b = budget(p, p);
                let chi = chi_h_lower(&w, &b).unwrap() + chi_a_lower(&w, &b).unwrap();
                let conf = conferencing_lower_bound(&w, p).unwrap().value;
                assert!(conf >= chi / 2.0 - 1e-12, "{p} {conf} {chi}");
            }
        }
    }

    #[test]
    fn continuity_examples() {
        assert!((continuity_bound(1.0_f64, 0.0).unwrap() - 6.0 * LN2).abs() < 1e-13);
        let mut prev = f64::MAX;
        for k in 2..=8 {
            let v = continuity_bound(10f64.powi(-k), 1.0).unwrap();
            assert!(v >= 0.0 && v < prev);
            prev = v;
        }
        assert!(continuity_bound(0.0_f64, 1.0).is_err());
        assert!(continuity_bound(1.5_f64, 1.0).is_err());
    }

    #[test]
    fn capacity_record_serializes() {
        let r = maximize_coherent_info(&bs(0.75), &budget(1.0, 0.0)).unwrap();
        let mut params = serde_json::Map::new();
        params.insert("q".into(), 0.75.into());
        let rec = r.to_record("q_energy", params);
        let text = serde_json::to_string(&rec).unwrap();
        assert!(text.contains("\"method\":\"optimized\""));
    }
}
