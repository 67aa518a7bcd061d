//! Symplectic linear algebra, Gaussian-state covariance matrices and the
//! entropy primitives built on them.
//!
//! Quadratures are ordered `(q_1, p_1, q_2, p_2, ...)` and the vacuum has
//! covariance matrix `I/2`. A matrix `V` is a bona fide covariance matrix
//! when `V + (i/2) Σ ⪰ 0`, equivalently when every symplectic eigenvalue is
//! at least `1/2`.

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{int, lit, to_f64, validity_tol, xlogx, Scalar};

/// Block-diagonal symplectic form with `n_modes` blocks `[[0, 1], [-1, 0]]`.
pub fn symplectic_form<T: Scalar>(n_modes: usize) -> DMatrix<T> {
    let dim = 2 * n_modes;
    let mut sigma = DMatrix::zeros(dim, dim);
    for k in 0..n_modes {
        sigma[(2 * k, 2 * k + 1)] = T::one();
        sigma[(2 * k + 1, 2 * k)] = -T::one();
    }
    sigma
}

/// Largest absolute entry of `m - mᵀ`.
pub(crate) fn asymmetry<T: Scalar>(m: &DMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)]).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

fn check_square_even<T: Scalar>(m: &DMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: 2 * (m.nrows() / 2 + 1),
            found: m.nrows(),
        });
    }
    Ok(m.nrows() / 2)
}

fn check_symmetric<T: Scalar>(m: &DMatrix<T>) -> Result<()> {
    let asym = asymmetry(m);
    if asym > validity_tol() {
        return Err(Error::NotSymmetric(to_f64(asym)));
    }
    Ok(())
}

/// Smallest eigenvalue of the Hermitian matrix `m + i·c·Σ`.
pub(crate) fn min_eig_with_form<T: Scalar>(m: &DMatrix<T>, c: T) -> T {
    let n_modes = m.nrows() / 2;
    let sigma = symplectic_form::<T>(n_modes);
    let h = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        // symmetrize the real part so tiny asymmetries do not break hermiticity
        let re = (m[(i, j)] + m[(j, i)]) * lit(0.5);
        Complex::new(re, c * sigma[(i, j)])
    });
    let eig = SymmetricEigen::new(h);
    eig.eigenvalues.iter().copied().fold(T::max_value().unwrap(), |a, b| if b < a { b } else { a })
}

/// Symplectic spectrum of a real symmetric positive matrix.
///
/// Returns the `n` values `|λ|` over eigenvalues `λ` of `iΣm`, one per pair,
/// in descending order.
pub fn symplectic_spectrum<T: Scalar>(m: &DMatrix<T>) -> Result<Vec<T>> {
    let n_modes = check_square_even(m)?;
    check_symmetric(m)?;
    if n_modes == 1 {
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        return Ok(vec![det.max(T::zero()).sqrt()]);
    }
    let sigma = symplectic_form::<T>(n_modes);
    let product = &sigma * m;
    let schur = Schur::try_new(product, T::default_epsilon(), 100_000).ok_or(Error::NoConvergence)?;
    let eigs = schur.complex_eigenvalues();
    let mut mags: Vec<T> = eigs.iter().map(|z| (z.re * z.re + z.im * z.im).sqrt()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(mags
        .chunks(2)
        .map(|pair| (pair[0] + pair[1]) * lit(0.5))
        .collect())
}

/// Sum of the symplectic eigenvalues of a symmetric positive-definite matrix.
pub fn symplectic_trace<T: Scalar>(m: &DMatrix<T>) -> Result<T> {
    check_square_even(m)?;
    check_symmetric(m)?;
    if m.clone().cholesky().is_none() {
        let eig = SymmetricEigen::new(m.clone());
        let min = eig.eigenvalues.iter().copied().fold(T::max_value().unwrap(), |a, b| if b < a { b } else { a });
        return Err(Error::NotPositive(to_f64(min)));
    }
    Ok(symplectic_spectrum(m)?.into_iter().fold(T::zero(), |a, b| a + b))
}

/// Entropy (nats) carried by one symplectic eigenvalue `x ≥ 1/2`:
/// `g(x) = (x + 1/2) ln(x + 1/2) − (x − 1/2) ln(x − 1/2)`.
///
/// This function is increasing and concave, with `g(1/2) = 0`.
pub fn g_entropy<T: Scalar>(x: T) -> Result<T> {
    let half = lit::<T>(0.5);
    if !(x >= half - validity_tol()) {
        return Err(invalid("x", to_f64(x), "g is defined for x >= 1/2"));
    }
    let x = x.max(half);
    Ok(xlogx(x + half) - xlogx(x - half))
}

/// Entropy of a thermal mode with mean photon number `n`: `g(n + 1/2)`.
pub fn g_occupation<T: Scalar>(n: T) -> Result<T> {
    if !(n >= -validity_tol::<T>()) {
        return Err(invalid("n", to_f64(n), "occupation must be nonnegative"));
    }
    g_entropy(n.max(T::zero()) + lit(0.5))
}

/// Covariance matrix of an `n`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix<T: Scalar> {
    matrix: DMatrix<T>,
}

impl<T: Scalar> CovarianceMatrix<T> {
    /// Validates symmetry and the uncertainty relation `V + (i/2)Σ ⪰ 0`.
    pub fn new(matrix: DMatrix<T>) -> Result<Self> {
        check_square_even(&matrix)?;
        check_symmetric(&matrix)?;
        let min = min_eig_with_form(&matrix, lit(0.5));
        if min < -validity_tol::<T>() {
            return Err(Error::NotPhysical(to_f64(min)));
        }
        Ok(Self { matrix })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self::thermal(n_modes, T::zero()).expect("vacuum is physical")
    }

    /// Thermal state with mean photon number `nbar` in every mode: `(nbar + 1/2) I`.
    pub fn thermal(n_modes: usize, nbar: T) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid("n_modes", 0.0, "at least one mode"));
        }
        if !(nbar >= T::zero()) {
            return Err(invalid("nbar", to_f64(nbar), "must be nonnegative"));
        }
        let dim = 2 * n_modes;
        Ok(Self {
            matrix: DMatrix::identity(dim, dim) * (nbar + lit(0.5)),
        })
    }

    /// Single-mode state `(nbar + 1/2) R(θ) diag(e^{2s}, e^{-2s}) R(θ)ᵀ`.
    pub fn squeezed_thermal(nbar: T, s: T, theta: T) -> Result<Self> {
        if !(nbar >= T::zero()) {
            return Err(invalid("nbar", to_f64(nbar), "must be nonnegative"));
        }
        let rot = rotation(theta);
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![
            (lit::<T>(2.0) * s).exp(),
            (lit::<T>(-2.0) * s).exp(),
        ]));
        let mut m = &rot * diag * rot.transpose() * (nbar + lit(0.5));
        symmetrize(&mut m);
        Ok(Self { matrix: m })
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }

    /// Mean photon number summed over modes: `Tr V / 2 − n/2`.
    pub fn mean_photon_number(&self) -> T {
        self.matrix.trace() * lit(0.5) - int::<T>(self.n_modes()) * lit(0.5)
    }

    /// `S V Sᵀ`; the result is re-validated.
    pub fn congruence(&self, s: &DMatrix<T>) -> Result<Self> {
        if s.ncols() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: s.ncols(),
            });
        }
        let mut m = s * &self.matrix * s.transpose();
        symmetrize(&mut m);
        Self::new(m)
    }

    /// `V_1 ⊕ V_2` (modes of `self` first).
    pub fn direct_sum(&self, other: &Self) -> Self {
        let a = self.matrix.nrows();
        let b = other.matrix.nrows();
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.matrix);
        m.view_mut((a, a), (b, b)).copy_from(&other.matrix);
        Self { matrix: m }
    }
}

/// Gaussian state: first moments plus covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState<T: Scalar> {
    pub mean: DVector<T>,
    pub cm: CovarianceMatrix<T>,
}

impl<T: Scalar> GaussianState<T> {
    pub fn new(mean: DVector<T>, cm: CovarianceMatrix<T>) -> Result<Self> {
        if mean.len() != cm.matrix().nrows() {
            return Err(Error::DimensionMismatch {
                expected: cm.matrix().nrows(),
                found: mean.len(),
            });
        }
        if let Some(bad) = mean.iter().find(|x| !x.is_finite()) {
            return Err(invalid("mean", to_f64(*bad), "must be finite"));
        }
        Ok(Self { mean, cm })
    }

    pub fn centered(cm: CovarianceMatrix<T>) -> Self {
        let dim = cm.matrix().nrows();
        Self {
            mean: DVector::zeros(dim),
            cm,
        }
    }
}

/// Mean photon numbers per mode available to the sender (`p_a`) and the
/// helper (`p_e`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct EnergyBudget<T: Scalar> {
    pub p_a: T,
    pub p_e: T,
}

impl<T: Scalar> EnergyBudget<T> {
    pub fn new(p_a: T, p_e: T) -> Result<Self> {
        if !(p_a >= T::zero()) || !p_a.is_finite() {
            return Err(invalid("p_a", to_f64(p_a), "must be finite and nonnegative"));
        }
        if !(p_e >= T::zero()) || !p_e.is_finite() {
            return Err(invalid("p_e", to_f64(p_e), "must be finite and nonnegative"));
        }
        Ok(Self { p_a, p_e })
    }

    pub fn swapped(&self) -> Self {
        Self {
            p_a: self.p_e,
            p_e: self.p_a,
        }
    }
}

/// Symplectic eigenvalues of a covariance matrix, descending.
pub fn symplectic_eigenvalues<T: Scalar>(v: &CovarianceMatrix<T>) -> Result<Vec<T>> {
    symplectic_spectrum(v.matrix())
}

/// Von Neumann entropy (nats) of the Gaussian state with covariance `v`.
pub fn entropy_gaussian<T: Scalar>(v: &CovarianceMatrix<T>) -> Result<T> {
    entropy_of_matrix(v.matrix())
}

/// `Σ g(ν_i)` for any symmetric matrix whose symplectic eigenvalues are ≥ 1/2.
pub(crate) fn entropy_of_matrix<T: Scalar>(m: &DMatrix<T>) -> Result<T> {
    symplectic_spectrum(m)?
        .into_iter()
        .try_fold(T::zero(), |acc, nu| Ok(acc + g_entropy(nu)?))
}

/// Relative entropy `Σ p_n ln(p_n / r_n)` of two diagonal states.
///
/// Returns `+∞` when `p` is not supported inside `r`. Shorter inputs are
/// padded with zeros.
pub fn relative_entropy_diagonal<T: Scalar>(p: &[T], r: &[T]) -> Result<T> {
    let norm_tol = lit::<T>(1e-9);
    for (name, v) in [("p", p), ("r", r)] {
        if let Some(bad) = v.iter().find(|x| !(**x >= T::zero())) {
            return Err(invalid(name, to_f64(*bad), "entries must be nonnegative"));
        }
        let sum = v.iter().fold(T::zero(), |a, b| a + *b);
        if (sum - T::one()).abs() > norm_tol {
            return Err(Error::NotNormalized(name, to_f64(sum)));
        }
    }
    let len = p.len().max(r.len());
    let mut acc = T::zero();
    for k in 0..len {
        let pk = p.get(k).copied().unwrap_or(T::zero());
        let rk = r.get(k).copied().unwrap_or(T::zero());
        if pk == T::zero() {
            continue;
        }
        if rk == T::zero() {
            return Ok(lit(f64::INFINITY));
        }
        acc += pk * (pk / rk).ln();
    }
    Ok(acc.max(T::zero()))
}

pub(crate) fn symmetrize<T: Scalar>(m: &mut DMatrix<T>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)]) * lit(0.5);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// 2x2 rotation by `theta`.
pub fn rotation<T: Scalar>(theta: T) -> DMatrix<T> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Phase rotation of `mode` inside an `n_modes` system.
pub fn phase_rotation<T: Scalar>(n_modes: usize, mode: usize, theta: T) -> DMatrix<T> {
    let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
    s.view_mut((2 * mode, 2 * mode), (2, 2)).copy_from(&rotation(theta));
    s
}

/// Single-mode squeezer `diag(e^{r}, e^{-r})` on `mode`.
pub fn single_mode_squeezer<T: Scalar>(n_modes: usize, mode: usize, r: T) -> DMatrix<T> {
    let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
    s[(2 * mode, 2 * mode)] = r.exp();
    s[(2 * mode + 1, 2 * mode + 1)] = (-r).exp();
    s
}

/// Passive two-mode mixer coupling modes `i` and `j` with angle `theta`.
pub fn mode_mixer<T: Scalar>(n_modes: usize, i: usize, j: usize, theta: T) -> DMatrix<T> {
    let (s, c) = theta.sin_cos();
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for k in 0..2 {
        let (a, b) = (2 * i + k, 2 * j + k);
        m[(a, a)] = c;
        m[(b, b)] = c;
        m[(a, b)] = -s;
        m[(b, a)] = s;
    }
    m
}

/// Max-abs deviation of `S Σ Sᵀ` from `Σ`.
pub fn symplectic_defect<T: Scalar>(s: &DMatrix<T>) -> T {
    let sigma = symplectic_form::<T>(s.nrows() / 2);
    let d = s * &sigma * s.transpose() - sigma;
    d.iter().fold(T::zero(), |a, b| a.max(b.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn form_one_mode() {
        let s = symplectic_form::<f64>(1);
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn form_two_modes_blocks() {
        let s = symplectic_form::<f64>(2);
        assert_eq!(s[(0, 1)], 1.0);
        assert_eq!(s[(2, 3)], 1.0);
        assert_eq!(s[(3, 2)], -1.0);
        assert_eq!(s[(0, 3)], 0.0);
        assert_eq!(&s * s.transpose(), DMatrix::identity(4, 4));
    }

    #[test]
    fn form_squares_to_minus_identity() {
        let s = symplectic_form::<f64>(3);
        assert_eq!(&s * &s, -DMatrix::<f64>::identity(6, 6));
    }

    #[test]
    fn eigenvalues_of_simple_states() {
        let vac = CovarianceMatrix::<f64>::vacuum(1);
        assert!((symplectic_eigenvalues(&vac).unwrap()[0] - 0.5).abs() < 1e-12);
        let sq = CovarianceMatrix::<f64>::squeezed_thermal(0.0, 0.7, 0.0).unwrap();
        assert!((symplectic_eigenvalues(&sq).unwrap()[0] - 0.5).abs() < 1e-12);
        let th = CovarianceMatrix::<f64>::thermal(1, 1.0).unwrap();
        assert!((symplectic_eigenvalues(&th).unwrap()[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_two_modes_sorted() {
        let a = CovarianceMatrix::<f64>::thermal(1, 2.0).unwrap();
        let b = CovarianceMatrix::<f64>::thermal(1, 0.25).unwrap();
        let v = b.direct_sum(&a);
        let nu = symplectic_eigenvalues(&v).unwrap();
        assert!((nu[0] - 2.5).abs() < 1e-10);
        assert!((nu[1] - 0.75).abs() < 1e-10);
    }

    #[test]
    fn nonsymmetric_input_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.0, 1.0]);
        assert!(matches!(symplectic_spectrum(&m), Err(Error::NotSymmetric(_))));
        assert!(matches!(CovarianceMatrix::new(m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn unphysical_cm_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[0.3, 0.0, 0.0, 0.3]);
        assert!(matches!(CovarianceMatrix::new(m), Err(Error::NotPhysical(_))));
    }

    #[test]
    fn symplectic_trace_values() {
        let half = DMatrix::<f64>::identity(2, 2) * 0.5;
        assert!((symplectic_trace(&half).unwrap() - 0.5).abs() < 1e-12);
        let id = DMatrix::<f64>::identity(4, 4);
        assert!((symplectic_trace(&id).unwrap() - 2.0).abs() < 1e-12);
        let two = DMatrix::<f64>::identity(4, 4) * 2.0;
        assert!(symplectic_trace(&two).unwrap() >= symplectic_trace(&id).unwrap());
        let neg = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(symplectic_trace(&neg), Err(Error::NotPositive(_))));
    }

    #[test]
    fn g_values() {
        assert_eq!(g_entropy(0.5_f64).unwrap(), 0.0);
        assert!((g_entropy(1.5_f64).unwrap() - 2.0 * LN2).abs() < 1e-14);
        assert!(g_entropy(0.4_f64).is_err());
        let grid = [0.5, 1.0, 2.0, 5.0];
        for w in grid.windows(2) {
            assert!(g_entropy(w[1]).unwrap() > g_entropy(w[0]).unwrap());
        }
        assert_eq!(g_occupation(1.0_f64).unwrap(), g_entropy(1.5).unwrap());
    }

    #[test]
    fn g_finite_differences_positive_and_decreasing() {
        let h = 0.05;
        let diffs: Vec<f64> = (0..200)
            .map(|k| {
                let x = 0.5 + h * k as f64;
                g_entropy(x + h).unwrap() - g_entropy(x).unwrap()
            })
            .collect();
        assert!(diffs.iter().all(|d| *d > 0.0));
        assert!(diffs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy_gaussian(&CovarianceMatrix::<f64>::vacuum(2)).unwrap(), 0.0);
        let th = CovarianceMatrix::<f64>::thermal(1, 1.0).unwrap();
        assert!((entropy_gaussian(&th).unwrap() - 2.0 * LN2).abs() < 1e-12);
    }

    #[test]
    fn entropy_matches_thermal_fock_spectrum() {
        // -Σ p_n ln p_n over the geometric photon distribution, cutoff 60
        let nbar = 1.0_f64;
        let ratio = nbar / (nbar + 1.0);
        let fock: f64 = (0..60)
            .map(|n| {
                let p = ratio.powi(n) / (nbar + 1.0);
                -p * p.ln()
            })
            .sum();
        let th = CovarianceMatrix::<f64>::thermal(1, nbar).unwrap();
        assert!((entropy_gaussian(&th).unwrap() - fock).abs() < 1e-6);
    }

    #[test]
    fn relative_entropy_examples() {
        let d = relative_entropy_diagonal(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(d, 0.0);
        let inf: f64 = relative_entropy_diagonal(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!(inf.is_infinite() && inf > 0.0);
        let v = relative_entropy_diagonal(&[0.75, 0.25], &[0.5, 0.5]).unwrap();
        let expected = 0.75 * 1.5_f64.ln() + 0.25 * 0.5_f64.ln();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.1308).abs() < 1e-4);
        assert!(matches!(
            relative_entropy_diagonal(&[0.7, 0.2], &[0.5, 0.5]),
            Err(Error::NotNormalized("p", _))
        ));
    }

    #[test]
    fn single_precision_works() {
        let th = CovarianceMatrix::<f32>::thermal(1, 1.0).unwrap();
        let s = entropy_gaussian(&th).unwrap();
        assert!((s - 2.0 * std::f32::consts::LN_2).abs() < 1e-5);
    }

    #[test]
    fn generators_are_symplectic() {
        let s = mode_mixer::<f64>(3, 0, 2, 0.4)
            * single_mode_squeezer(3, 1, 0.3)
            * phase_rotation(3, 2, 1.1);
        assert!(symplectic_defect(&s) < 1e-12);
    }
}
