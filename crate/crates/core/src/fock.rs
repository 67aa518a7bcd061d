//! Truncated Fock-space oracle: two-mode unitaries `U^(q)` column by column,
//! channel outputs on density matrices and the analytic output spectra.
//!
//! Two-mode basis states `|i, j⟩` put the system mode (`a`, input `A`,
//! output `B`) first and the environment mode (`b`, `E → F`) second; the
//! flat index is `i * D + j`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::channels::{beam_splitter, complementary_channel, effective_channel, squeezed_env_cm};
use crate::error::{invalid, Error, Result};
use crate::symplectic::{entropy_gaussian, CovarianceMatrix, GaussianState};
use crate::scalar::{int, lit, to_f64, xlogx, Scalar};

/// Leakage above which channel outputs are rejected.
pub const MAX_LEAKAGE: f64 = 1e-6;
/// Default tail tolerance for automatic cutoff selection.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedFockSpace {
    cutoff: usize,
    n_modes: usize,
}

impl TruncatedFockSpace {
    pub fn new(cutoff: usize, n_modes: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(invalid("cutoff", cutoff as f64, "needs D >= 2"));
        }
        if !(1..=2).contains(&n_modes) {
            return Err(invalid("n_modes", n_modes as f64, "one or two modes"));
        }
        Ok(Self { cutoff, n_modes })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        self.cutoff.pow(self.n_modes as u32)
    }
}

/// Annihilation and creation operators on `|0⟩ … |D−1⟩`.
pub fn ladder_ops<T: Scalar>(d: usize) -> Result<(DMatrix<T>, DMatrix<T>)> {
    TruncatedFockSpace::new(d, 1)?;
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = int::<T>(n).sqrt();
    }
    let ad = a.transpose();
    Ok((a, ad))
}

type Entry<T> = (usize, usize, Complex<T>);

fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Two-mode operator stored by columns.
///
/// Columns are indexed by input states `|k, l⟩` with `k, l < D`; each holds
/// the nonzero amplitudes `(i, j, ⟨i, j|U|k, l⟩)` for `i, j < out_cutoff`.
/// For the beam splitter `out_cutoff = 2D − 1`, so no output is lost.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator<T: Scalar> {
    space: TruncatedFockSpace,
    out_cutoff: usize,
    columns: Vec<Vec<Entry<T>>>,
}

impl<T: Scalar> FockOperator<T> {
    pub fn space(&self) -> TruncatedFockSpace {
        self.space
    }

    pub fn out_cutoff(&self) -> usize {
        self.out_cutoff
    }

    pub fn column(&self, k: usize, l: usize) -> &[Entry<T>] {
        &self.columns[k * self.space.cutoff + l]
    }

    /// `⟨i, j|U|k, l⟩`.
    pub fn entry(&self, out: (usize, usize), inp: (usize, usize)) -> Complex<T> {
        self.column(inp.0, inp.1)
            .iter()
            .find(|e| (e.0, e.1) == out)
            .map_or_else(czero, |e| e.2)
    }

    /// Dense `D² × D²` matrix, dropping outputs outside the input space.
    pub fn to_dense(&self) -> DMatrix<Complex<T>> {
        let d = self.space.cutoff;
        let mut m = DMatrix::from_element(d * d, d * d, czero());
        for (c, col) in self.columns.iter().enumerate() {
            for &(i, j, v) in col {
                if i < d && j < d {
                    m[(i * d + j, c)] = v;
                }
            }
        }
        m
    }

    /// `1 − ‖U|k, l⟩‖²` over the stored output range.
    pub fn leakage(&self, k: usize, l: usize) -> T {
        T::one() - self.column(k, l).iter().fold(T::zero(), |s, e| s + e.2.norm_sqr())
    }

    /// `max |⟨U c|U c'⟩ − δ_{cc'}|` over input states with total photon
    /// number ≤ `max_total`.
    pub fn isometry_defect(&self, max_total: usize) -> T {
        let d = self.space.cutoff;
        let n = self.out_cutoff;
        let inputs: Vec<(usize, usize)> = (0..d)
            .flat_map(|k| (0..d).map(move |l| (k, l)))
            .filter(|&(k, l)| k + l <= max_total)
            .collect();
        let dense: Vec<Vec<Complex<T>>> = inputs
            .iter()
            .map(|&(k, l)| {
                let mut v = vec![czero(); n * n];
                for &(i, j, a) in self.column(k, l) {
                    v[i * n + j] = a;
                }
                v
            })
            .collect();
        let mut worst = T::zero();
        for x in 0..dense.len() {
            for y in x..dense.len() {
                let ip = dense[x]
                    .iter()
                    .zip(&dense[y])
                    .fold(czero(), |s: Complex<T>, (a, b)| s + a.conj() * b);
                let target = if x == y { T::one() } else { T::zero() };
                worst = worst.max((ip - Complex::new(target, T::zero())).norm_sqr().sqrt());
            }
        }
        worst
    }

    /// `U(u ⊗ w)` as an `out × out` amplitude matrix `Ψ[i, j]`.
    pub fn apply_product(&self, u: &DVector<Complex<T>>, w: &DVector<Complex<T>>) -> Result<DMatrix<Complex<T>>> {
        let d = self.space.cutoff;
        if u.len() != d || w.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if u.len() != d { u.len() } else { w.len() },
            });
        }
        let n = self.out_cutoff;
        let mut psi = DMatrix::from_element(n, n, czero());
        for (k, &uk) in u.iter().enumerate() {
            if uk == czero() {
                continue;
            }
            for (l, &wl) in w.iter().enumerate() {
                if wl == czero() {
                    continue;
                }
                let c = uk * wl;
                for &(i, j, a) in self.column(k, l) {
                    psi[(i, j)] += c * a;
                }
            }
        }
        Ok(psi)
    }
}

/// Beam splitter `exp(arccos√q (a†b − ab†))`.
///
/// Columns are generated exactly inside each total-photon block from
/// `U a† U† = √q a† − √(1−q) b†` and `U b† U† = √q b† + √(1−q) a†`.
pub fn beam_splitter_unitary_fock<T: Scalar>(q: T, d: usize) -> Result<FockOperator<T>> {
    if !(q > T::zero() && q < T::one()) {
        return Err(invalid("q", to_f64(q), "beam splitter needs 0 < q < 1"));
    }
    let space = TruncatedFockSpace::new(d, 2)?;
    let c = q.sqrt();
    let s = (T::one() - q).sqrt();
    let out = 2 * d - 1;
    let mut columns = vec![Vec::new(); d * d];
    // prev[k] = U|k, K−1−k⟩ over i = 0..K−1 (state |i, K−1−i⟩)
    let mut prev: Vec<Vec<T>> = vec![vec![T::one()]];
    columns[0] = vec![(0, 0, Complex::new(T::one(), T::zero()))];
    for big_k in 1..=(2 * d - 2) {
        let mut cur: Vec<Vec<T>> = Vec::with_capacity(big_k + 1);
        for k in 0..=big_k {
            let mut r = vec![T::zero(); big_k + 1];
            if k == 0 {
                // (c b† + s a†)/√K applied to U|0, K−1⟩
                let v = &prev[0];
                for (i, &vi) in v.iter().enumerate() {
                    r[i] += c * int::<T>(big_k - i).sqrt() * vi;
                    r[i + 1] += s * int::<T>(i + 1).sqrt() * vi;
                }
                let norm = int::<T>(big_k).sqrt();
                r.iter_mut().for_each(|x| *x /= norm);
            } else {
                // (c a† − s b†)/√k applied to U|k−1, K−k⟩
                let v = &prev[k - 1];
                for (i, &vi) in v.iter().enumerate() {
                    r[i + 1] += c * int::<T>(i + 1).sqrt() * vi;
                    r[i] -= s * int::<T>(big_k - i).sqrt() * vi;
                }
                let norm = int::<T>(k).sqrt();
                r.iter_mut().for_each(|x| *x /= norm);
            }
            let l = big_k - k;
            if k < d && l < d {
                columns[k * d + l] = r
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != T::zero())
                    .map(|(i, &v)| (i, big_k - i, Complex::new(v, T::zero())))
                    .collect();
            }
            cur.push(r);
        }
        prev = cur;
    }
    Ok(FockOperator {
        space,
        out_cutoff: out,
        columns,
    })
}

/// Two-mode squeezer `exp(i arccosh√q (a†b† + ab))` in disentangled form
/// `e^{r a†b†} e^{−s(a†a + bb†)} e^{r ab}` with `r = i√((q−1)/q)`,
/// `s = ln √q`. The lowering and diagonal factors are exact; the raising
/// series is truncated at `D` photons per mode.
pub fn squeezer_unitary_fock<T: Scalar>(q: T, d: usize) -> Result<FockOperator<T>> {
    squeezer_unitary_fock_with_output(q, d, d)
}

/// As [`squeezer_unitary_fock`] with an explicit output cutoff `out ≥ D`.
pub fn squeezer_unitary_fock_with_output<T: Scalar>(q: T, d: usize, out: usize) -> Result<FockOperator<T>> {
    if !(q > T::one()) || !q.is_finite() {
        return Err(invalid("q", to_f64(q), "squeezer needs q > 1"));
    }
    let space = TruncatedFockSpace::new(d, 2)?;
    if out < d {
        return Err(invalid("out", out as f64, "output cutoff below input cutoff"));
    }
    let r = Complex::new(T::zero(), ((q - T::one()) / q).sqrt());
    let s = q.sqrt().ln();
    let mut columns = vec![Vec::new(); d * d];
    for k in 0..d {
        for l in 0..d {
            // amplitudes along the line i − j = k − l, indexed by j
            let shift = k as isize - l as isize;
            let j_min = if shift < 0 { (-shift) as usize } else { 0 };
            let mut acc = vec![czero::<T>(); out];
            let mut low = Complex::new(T::one(), T::zero());
            for t in 0..=k.min(l) {
                if t > 0 {
                    let f = (int::<T>(k - t + 1) * int::<T>(l - t + 1)).sqrt() / int::<T>(t);
                    low = low * r * f;
                }
                let (i0, j0) = (k - t, l - t);
                let mut amp = low * (-s * int::<T>(i0 + j0 + 1)).exp();
                let mut u = 0;
                while i0 + u < out && j0 + u < out {
                    if u > 0 {
                        let f = (int::<T>(i0 + u) * int::<T>(j0 + u)).sqrt() / int::<T>(u);
                        amp = amp * r * f;
                    }
                    acc[j0 + u] += amp;
                    u += 1;
                }
            }
            columns[k * d + l] = acc
                .into_iter()
                .enumerate()
                .skip(j_min)
                .filter(|(_, a)| *a != czero())
                .map(|(j, a)| (((j as isize) + shift) as usize, j, a))
                .filter(|e| e.0 < out)
                .collect();
        }
    }
    Ok(FockOperator {
        space,
        out_cutoff: out,
        columns,
    })
}

/// `|n⟩⟨n|` on `D` levels.
pub fn fock_dm<T: Scalar>(d: usize, n: usize) -> Result<DMatrix<Complex<T>>> {
    if n >= d {
        return Err(invalid("n", n as f64, "outside the truncated space"));
    }
    let mut m = DMatrix::from_element(d, d, czero());
    m[(n, n)] = Complex::new(T::one(), T::zero());
    Ok(m)
}

/// Thermal state truncated to `D` levels (not renormalized).
pub fn thermal_dm<T: Scalar>(d: usize, nbar: T) -> Result<DMatrix<Complex<T>>> {
    if !(nbar >= T::zero()) {
        return Err(invalid("nbar", to_f64(nbar), "must be nonnegative"));
    }
    let mut m = DMatrix::from_element(d, d, czero());
    let ratio = nbar / (nbar + T::one());
    let mut p = T::one() / (nbar + T::one());
    for n in 0..d {
        m[(n, n)] = Complex::new(p, T::zero());
        p *= ratio;
    }
    Ok(m)
}

/// Squeezed vacuum whose covariance matrix is `½ diag(e^{2s}, e^{−2s})`,
/// truncated to `D` levels (not renormalized).
pub fn squeezed_vacuum_dm<T: Scalar>(d: usize, s: T) -> Result<DMatrix<Complex<T>>> {
    let t = s.tanh();
    let mut v = DVector::from_element(d, czero());
    let mut amp = T::one() / s.cosh().sqrt();
    let mut n = 0;
    while 2 * n < d {
        v[2 * n] = Complex::new(amp, T::zero());
        // √((2n+2)!)/(2^{n+1}(n+1)!) over √((2n)!)/(2^n n!)
        let f = (int::<T>((2 * n + 1) * (2 * n + 2))).sqrt() / int::<T>(2 * (n + 1));
        amp = amp * t * f;
        n += 1;
    }
    Ok(&v * v.adjoint())
}

/// Outputs of the channel and its complement with their trace deficit.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPair<T: Scalar> {
    pub rho_b: DMatrix<Complex<T>>,
    pub rho_f: DMatrix<Complex<T>>,
    /// `1 − Tr ρ_B`, combining input truncation and operator leakage.
    pub tail: T,
}

fn is_diagonal<T: Scalar>(m: &DMatrix<Complex<T>>) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == czero()))
}

fn decompose<T: Scalar>(rho: &DMatrix<Complex<T>>, name: &'static str) -> Result<Vec<(T, DVector<Complex<T>>)>> {
    let n = rho.nrows();
    if rho.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: rho.ncols(),
        });
    }
    let tol: T = lit(1e-9);
    let trace = (0..n).fold(T::zero(), |s, i| s + rho[(i, i)].re);
    if trace > T::one() + tol {
        return Err(Error::NotNormalized(name, to_f64(trace)));
    }
    let mut out = Vec::new();
    if is_diagonal(rho) {
        for i in 0..n {
            let p = rho[(i, i)].re;
            if p < -tol {
                return Err(Error::NotPositive(to_f64(p)));
            }
            if p > T::zero() {
                let mut v = DVector::from_element(n, czero());
                v[i] = Complex::new(T::one(), T::zero());
                out.push((p, v));
            }
        }
        return Ok(out);
    }
    let mut h = rho.clone();
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = (rho[(i, j)] + rho[(j, i)].conj()) * lit::<T>(0.5);
        }
    }
    let eig = SymmetricEigen::new(h);
    for (idx, &p) in eig.eigenvalues.iter().enumerate() {
        if p < -tol {
            return Err(Error::NotPositive(to_f64(p)));
        }
        if p > T::zero() {
            out.push((p, eig.eigenvectors.column(idx).into_owned()));
        }
    }
    Ok(out)
}

/// `ρ_B = Tr_F U(ρ ⊗ η)U†` and `ρ_F = Tr_B U(ρ ⊗ η)U†`.
pub fn channel_pair_on_state<T: Scalar>(
    u: &FockOperator<T>,
    rho_a: &DMatrix<Complex<T>>,
    eta_e: &DMatrix<Complex<T>>,
) -> Result<ChannelPair<T>> {
    let d = u.space.cutoff;
    for m in [rho_a, eta_e] {
        if m.nrows() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.nrows(),
            });
        }
    }
    let rs = decompose(rho_a, "rho_A")?;
    let es = decompose(eta_e, "eta_E")?;
    let n = u.out_cutoff;
    let mut rho_b = DMatrix::from_element(n, n, czero());
    let mut rho_f = DMatrix::from_element(n, n, czero());
    let mut nz: Vec<usize> = Vec::with_capacity(n);
    for (p, uvec) in &rs {
        for (e, wvec) in &es {
            let weight = *p * *e;
            let psi = u.apply_product(uvec, wvec)?;
            // ρ_B[i,i'] += w Σ_j Ψ[i,j] Ψ*[i',j]
            for j in 0..n {
                nz.clear();
                nz.extend((0..n).filter(|&i| psi[(i, j)] != czero()));
                for &i in &nz {
                    let a = psi[(i, j)] * weight;
                    for &i2 in &nz {
                        rho_b[(i, i2)] += a * psi[(i2, j)].conj();
                    }
                }
            }
            for i in 0..n {
                nz.clear();
                nz.extend((0..n).filter(|&j| psi[(i, j)] != czero()));
                for &j in &nz {
                    let a = psi[(i, j)] * weight;
                    for &j2 in &nz {
                        rho_f[(j, j2)] += a * psi[(i, j2)].conj();
                    }
                }
            }
        }
    }
    let trace = (0..n).fold(T::zero(), |s, i| s + rho_b[(i, i)].re);
    let tail = T::one() - trace;
    if tail > lit(MAX_LEAKAGE) {
        return Err(Error::CutoffTooSmall {
            cutoff: d,
            leakage: to_f64(tail),
        });
    }
    Ok(ChannelPair { rho_b, rho_f, tail })
}

/// `−Tr ρ ln ρ`, ignoring eigenvalues at or below zero.
pub fn von_neumann_entropy<T: Scalar>(rho: &DMatrix<Complex<T>>) -> T {
    let values: Vec<T> = if is_diagonal(rho) {
        (0..rho.nrows()).map(|i| rho[(i, i)].re).collect()
    } else {
        SymmetricEigen::new(rho.clone()).eigenvalues.iter().copied().collect()
    };
    values
        .into_iter()
        .filter(|p| *p > T::zero())
        .fold(T::zero(), |s, p| s - xlogx(p))
}

/// Photon-number distribution of the environment output for `U|n⟩|1⟩`:
/// `p_ℓ`, ℓ = 0..=n+1, where `ℓ` photons leave in `F` and `n+1−ℓ` in `B`.
pub fn bs_output_spectrum<T: Scalar>(q: T, n: usize) -> Result<Vec<T>> {
    if !(q > T::zero() && q < T::one()) {
        return Err(invalid("q", to_f64(q), "beam splitter needs 0 < q < 1"));
    }
    let one_q = T::one() - q;
    let np1 = int::<T>(n + 1);
    let mut binom = T::one();
    let mut out = Vec::with_capacity(n + 2);
    for l in 0..=n + 1 {
        if l > 0 {
            binom = binom * int::<T>(n + 2 - l) / int::<T>(l);
        }
        let w = np1 * one_q - int::<T>(l);
        let pow = one_q.powi(l as i32) * if l <= n { q.powi((n - l) as i32) } else { T::one() / q };
        out.push(binom * pow * w * w / (np1 * one_q));
    }
    Ok(out)
}

fn check_gain<T: Scalar>(q: T) -> Result<()> {
    if !(q > T::one()) || !q.is_finite() {
        return Err(invalid("q", to_f64(q), "amplifier needs q > 1"));
    }
    Ok(())
}

fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    let k = k.min(n - k);
    (0..k).fold(T::one(), |acc, i| acc * int::<T>(n - i) / int::<T>(i + 1))
}

/// `((n+1−m(q−1))² / ((n+1) q^{m+2})) C(n+m, m) ((q−1)/q)ⁿ`.
pub fn c_mn<T: Scalar>(q: T, m: usize, n: usize) -> Result<T> {
    check_gain(q)?;
    let w = int::<T>(n + 1) - int::<T>(m) * (q - T::one());
    Ok(w * w / (int::<T>(n + 1) * q.powi(m as i32 + 2))
        * binomial::<T>(n + m, m)
        * ((q - T::one()) / q).powi(n as i32))
}

/// Weight `m (q−1)/q^{m+1}` of the isolated term of both amplifier spectra.
pub fn amp_atom<T: Scalar>(q: T, m: usize) -> Result<T> {
    check_gain(q)?;
    Ok(int::<T>(m) * (q - T::one()) / q.powi(m as i32 + 1))
}

/// Bound on `Σ_{n > t} c_mn` from the ratio test, or `None` when the ratio
/// has not yet dropped below one.
pub fn c_mn_tail_bound<T: Scalar>(q: T, m: usize, t: usize) -> Result<Option<T>> {
    let b = int::<T>(m) * (q - T::one());
    let n = int::<T>(t);
    let two: T = lit(2.0);
    // ratio c_{m,n+1}/c_{m,n} ≤ ρ for all n ≥ t
    if n + T::one() - b <= T::zero() {
        return Ok(None);
    }
    // each factor of the ratio is non-increasing in n past the zero of c_mn
    let num = (n + two - b) * (n + two - b);
    let den = (n + T::one() - b) * (n + T::one() - b);
    let binom = ((n + int::<T>(m) + T::one()) / (n + two)).max(T::one());
    let rho = num / den * binom * (q - T::one()) / q;
    if rho >= T::one() {
        return Ok(None);
    }
    Ok(Some(c_mn(q, m, t)? * rho / (T::one() - rho)))
}

/// Diagonal output spectra for input `|m⟩⟨m|` and environment `|1⟩⟨1|`
/// through the amplifier, indexed by photon number and truncated once the
/// certified tail falls below `tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmpSpectra<T> {
    /// `N(|m⟩⟨m|)`: atom at `m−1`, `c_mn` at `n+m`.
    pub output: Vec<T>,
    /// `Ñ(|m⟩⟨m|)`: atom at `0`, `c_mn` at `n+1`.
    pub complementary: Vec<T>,
    pub tail_bound: T,
}

pub fn amp_channel_spectra<T: Scalar>(q: T, m: usize, tol: T) -> Result<AmpSpectra<T>> {
    check_gain(q)?;
    if !(tol > T::zero()) {
        return Err(invalid("tol", to_f64(tol), "must be positive"));
    }
    let atom = amp_atom(q, m)?;
    let mut tail_c = Vec::new();
    let mut t = 0;
    let tail_bound = loop {
        tail_c.push(c_mn(q, m, t)?);
        if let Some(b) = c_mn_tail_bound(q, m, t)? {
            if b < tol {
                break b;
            }
        }
        t += 1;
        if t > 1_000_000 {
            return Err(Error::NoConvergence);
        }
    };
    let len = tail_c.len();
    let mut output = vec![T::zero(); len + m];
    let mut complementary = vec![T::zero(); len + 1];
    if m > 0 {
        output[m - 1] += atom;
        complementary[0] += atom;
    }
    for (n, c) in tail_c.into_iter().enumerate() {
        output[n + m] += c;
        complementary[n + 1] += c;
    }
    Ok(AmpSpectra {
        output,
        complementary,
        tail_bound,
    })
}

/// Smallest `D` with thermal tail `(N̄/(N̄+1))^D ≤ tol`.
pub fn thermal_cutoff(nbar: f64, tol: f64) -> usize {
    if nbar <= 0.0 {
        return 2;
    }
    let ratio = nbar / (nbar + 1.0);
    ((tol.ln() / ratio.ln()).ceil() as usize).max(2)
}

/// Smallest `D` such that the amplifier spectra for input `|m⟩` carry a
/// certified tail below `tol` inside `D` levels.
pub fn amplifier_cutoff(q: f64, m: usize, tol: f64) -> Result<usize> {
    let s = amp_channel_spectra(q, m, tol)?;
    Ok(s.output.len().max(s.complementary.len()).max(2))
}

pub const CROSSCHECK_Q: [f64; 2] = [0.6, 0.75];
pub const CROSSCHECK_NBAR: [f64; 3] = [0.0, 1.0, 3.0];
pub const CROSSCHECK_S: [f64; 2] = [0.0, 0.5];

/// Output entropies of the beam splitter on a thermal input with a squeezed
/// vacuum environment, computed from covariance matrices and in Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrosscheckRow {
    pub q: f64,
    pub nbar: f64,
    pub s: f64,
    pub cutoff: usize,
    pub gaussian_b: f64,
    pub fock_b: f64,
    pub gaussian_f: f64,
    pub fock_f: f64,
    pub tail: f64,
}

impl CrosscheckRow {
    pub fn max_abs_diff(&self) -> f64 {
        (self.gaussian_b - self.fock_b).abs().max((self.gaussian_f - self.fock_f).abs())
    }
}

/// `(S(B), S(F))` from covariance matrices.
pub fn gaussian_output_entropies(q: f64, nbar: f64, s: f64) -> Result<(f64, f64)> {
    let w = beam_splitter(q)?;
    let v_e = squeezed_env_cm(s, 0.0)?;
    let input = GaussianState::centered(CovarianceMatrix::thermal(1, nbar)?);
    let out_b = effective_channel(w.dilation(), &v_e)?.apply(&input)?;
    let out_f = complementary_channel(w.dilation(), &v_e)?.apply(&input)?;
    Ok((entropy_gaussian(&out_b.cm)?, entropy_gaussian(&out_f.cm)?))
}

pub fn entropy_crosscheck(q: f64, nbar: f64, s: f64, cutoff: usize) -> Result<CrosscheckRow> {
    let (gaussian_b, gaussian_f) = gaussian_output_entropies(q, nbar, s)?;
    let u = beam_splitter_unitary_fock(q, cutoff)?;
    let pair = channel_pair_on_state(&u, &thermal_dm(cutoff, nbar)?, &squeezed_vacuum_dm(cutoff, s)?)?;
    Ok(CrosscheckRow {
        q,
        nbar,
        s,
        cutoff,
        gaussian_b,
        fock_b: von_neumann_entropy(&pair.rho_b),
        gaussian_f,
        fock_f: von_neumann_entropy(&pair.rho_f),
        tail: pair.tail,
    })
}
