//! Two-mode Gaussian unitaries in canonical form, their block dilations and
//! the one-mode channels they induce.

use std::fmt;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{lit, to_f64, validity_tol, Scalar};
use crate::symplectic::{
    asymmetry, rotation, symmetrize, symplectic_defect, symplectic_form, CovarianceMatrix,
    GaussianState,
};

/// Tolerance used when matching a channel against a canonical form.
pub const CLASSIFY_TOL: f64 = 1e-8;

/// Symplectic matrix of a unitary `AE → BF`, partitioned as
/// `[[M, N], [O, P]]` with `M: A→B`, `N: E→B`, `O: A→F`, `P: E→F`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticDilation<T: Scalar> {
    s: DMatrix<T>,
    n_a: usize,
    n_e: usize,
}

impl<T: Scalar> SymplecticDilation<T> {
    pub fn new(s: DMatrix<T>, n_a: usize, n_e: usize) -> Result<Self> {
        let dim = 2 * (n_a + n_e);
        if n_a == 0 || n_e == 0 {
            return Err(invalid("n_a/n_e", 0.0, "both subsystems need at least one mode"));
        }
        if s.nrows() != dim || s.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.nrows().max(s.ncols()),
            });
        }
        let defect = symplectic_defect(&s);
        if defect > validity_tol() {
            return Err(invalid("S", to_f64(defect), "matrix is not symplectic"));
        }
        Ok(Self { s, n_a, n_e })
    }

    /// Identity interaction: `B = A`, `F = E`.
    pub fn identity(n_a: usize, n_e: usize) -> Self {
        let dim = 2 * (n_a + n_e);
        Self {
            s: DMatrix::identity(dim, dim),
            n_a,
            n_e,
        }
    }

    /// Mode exchange between `A` and `E` (one mode each).
    pub fn swap() -> Self {
        let mut s = DMatrix::zeros(4, 4);
        for k in 0..2 {
            s[(k, k + 2)] = T::one();
            s[(k + 2, k)] = T::one();
        }
        Self { s, n_a: 1, n_e: 1 }
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.s
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_e(&self) -> usize {
        self.n_e
    }

    pub fn m(&self) -> DMatrix<T> {
        let a = 2 * self.n_a;
        self.s.view((0, 0), (a, a)).into_owned()
    }

    pub fn n(&self) -> DMatrix<T> {
        let (a, e) = (2 * self.n_a, 2 * self.n_e);
        self.s.view((0, a), (a, e)).into_owned()
    }

    pub fn o(&self) -> DMatrix<T> {
        let (a, e) = (2 * self.n_a, 2 * self.n_e);
        self.s.view((a, 0), (e, a)).into_owned()
    }

    pub fn p(&self) -> DMatrix<T> {
        let (a, e) = (2 * self.n_a, 2 * self.n_e);
        self.s.view((a, a), (e, e)).into_owned()
    }

    /// Exchanges the roles of `A` and `E`: `[[N, M], [P, O]]`.
    pub fn exchange_inputs(&self) -> Self {
        let (a, e) = (2 * self.n_a, 2 * self.n_e);
        let dim = a + e;
        let mut s = DMatrix::zeros(dim, dim);
        s.view_mut((0, 0), (a, e)).copy_from(&self.n());
        s.view_mut((0, e), (a, a)).copy_from(&self.m());
        s.view_mut((a, 0), (e, e)).copy_from(&self.p());
        s.view_mut((a, e), (e, a)).copy_from(&self.o());
        Self {
            s,
            n_a: self.n_e,
            n_e: self.n_a,
        }
    }

    /// Joint output covariance `S (V_A ⊕ V_E) Sᵀ`.
    pub fn evolve(&self, v_a: &CovarianceMatrix<T>, v_e: &CovarianceMatrix<T>) -> Result<CovarianceMatrix<T>> {
        self.check_inputs(v_a, v_e)?;
        v_a.direct_sum(v_e).congruence(&self.s)
    }

    fn check_inputs(&self, v_a: &CovarianceMatrix<T>, v_e: &CovarianceMatrix<T>) -> Result<()> {
        if v_a.n_modes() != self.n_a {
            return Err(Error::DimensionMismatch {
                expected: self.n_a,
                found: v_a.n_modes(),
            });
        }
        if v_e.n_modes() != self.n_e {
            return Err(Error::DimensionMismatch {
                expected: self.n_e,
                found: v_e.n_modes(),
            });
        }
        Ok(())
    }

    pub fn to_record(&self) -> DilationRecord {
        DilationRecord {
            schema_version: SCHEMA_VERSION,
            q: None,
            n_a: self.n_a,
            n_e: self.n_e,
            blocks: DilationBlocks {
                m: rows(&self.m()),
                n: rows(&self.n()),
                o: rows(&self.o()),
                p: rows(&self.p()),
            },
        }
    }

    pub fn from_record(rec: &DilationRecord) -> Result<Self> {
        let (a, e) = (2 * rec.n_a, 2 * rec.n_e);
        let dim = a + e;
        let mut s = DMatrix::zeros(dim, dim);
        s.view_mut((0, 0), (a, a)).copy_from(&from_rows::<T>(&rec.blocks.m, a, a)?);
        s.view_mut((0, a), (a, e)).copy_from(&from_rows::<T>(&rec.blocks.n, a, e)?);
        s.view_mut((a, 0), (e, a)).copy_from(&from_rows::<T>(&rec.blocks.o, e, a)?);
        s.view_mut((a, a), (e, e)).copy_from(&from_rows::<T>(&rec.blocks.p, e, e)?);
        Self::new(s, rec.n_a, rec.n_e)
    }
}

/// Kind of the canonical two-mode unitary `U^(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitaryKind {
    /// `0 < q < 1`, transmissivity `q`.
    BeamSplitter,
    /// `q > 1`, gain `q`.
    Amplifier,
}

/// Canonical two-mode Gaussian unitary `U^(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeUnitary<T: Scalar> {
    q: T,
    kind: UnitaryKind,
    dilation: SymplecticDilation<T>,
}

impl<T: Scalar> TwoModeUnitary<T> {
    /// Beam splitter for `q < 1`, two-mode squeezer for `q > 1`.
    pub fn new(q: T) -> Result<Self> {
        if q > T::one() {
            two_mode_squeezer(q)
        } else {
            beam_splitter(q)
        }
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn kind(&self) -> UnitaryKind {
        self.kind
    }

    pub fn dilation(&self) -> &SymplecticDilation<T> {
        &self.dilation
    }

    /// `|r| = sqrt((q-1)/q)` and `s = ln sqrt(q)` of the disentangled
    /// amplifier; `None` for beam splitters.
    pub fn disentangling_params(&self) -> Option<(T, T)> {
        match self.kind {
            UnitaryKind::Amplifier => Some((
                ((self.q - T::one()) / self.q).sqrt(),
                self.q.sqrt().ln(),
            )),
            UnitaryKind::BeamSplitter => None,
        }
    }

    pub fn to_record(&self) -> DilationRecord {
        let mut rec = self.dilation.to_record();
        rec.q = Some(to_f64(self.q));
        rec
    }
}

/// Beam splitter with transmissivity `q ∈ (0, 1)`.
pub fn beam_splitter<T: Scalar>(q: T) -> Result<TwoModeUnitary<T>> {
    if !(q > T::zero() && q < T::one()) {
        return Err(invalid("q", to_f64(q), "beam splitter needs 0 < q < 1"));
    }
    let c = q.sqrt();
    let s = (T::one() - q).sqrt();
    let z = T::zero();
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c, z, -s, z,
        z, c, z, -s,
        s, z, c, z,
        z, s, z, c,
    ]);
    Ok(TwoModeUnitary {
        q,
        kind: UnitaryKind::BeamSplitter,
        dilation: SymplecticDilation::new(m, 1, 1)?,
    })
}

/// Two-mode squeezer with gain `q > 1`.
pub fn two_mode_squeezer<T: Scalar>(q: T) -> Result<TwoModeUnitary<T>> {
    if !(q > T::one()) || !q.is_finite() {
        return Err(invalid("q", to_f64(q), "two-mode squeezer needs q > 1"));
    }
    let c = q.sqrt();
    let s = (q - T::one()).sqrt();
    let z = T::zero();
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c, z, z, -s,
        z, c, -s, z,
        z, -s, c, z,
        -s, z, z, c,
    ]);
    Ok(TwoModeUnitary {
        q,
        kind: UnitaryKind::Amplifier,
        dilation: SymplecticDilation::new(m, 1, 1)?,
    })
}

/// Pure one-mode squeezed state `(1/2) R diag(e^{2s}, e^{-2s}) Rᵀ`, with
/// `R` the rotation by `theta / 2` so that `theta ∈ [0, 2π)` covers every
/// squeezing direction once.
pub fn squeezed_env_cm<T: Scalar>(s: T, theta: T) -> Result<CovarianceMatrix<T>> {
    if !s.is_finite() || !theta.is_finite() {
        return Err(invalid("s", to_f64(s), "squeezing parameters must be finite"));
    }
    CovarianceMatrix::squeezed_thermal(T::zero(), s, theta * lit(0.5))
}

/// Gaussian channel `d ↦ X d + d_E`, `V ↦ X V Xᵀ + Y`.
///
/// `X` may be rectangular (output × input). One-mode channels (OMG) carry
/// the derived parameters `x`, `y`, `K` and a canonical class.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel<T: Scalar> {
    x: DMatrix<T>,
    y: DMatrix<T>,
    offset: DVector<T>,
}

/// One-mode Gaussian channel.
pub type OmgChannel<T> = GaussianChannel<T>;

impl<T: Scalar> GaussianChannel<T> {
    /// Checks `Y = Yᵀ`, `Y ⪰ 0` and complete positivity
    /// `Y + (i/2)Σ ⪰ (i/2) X Σ Xᵀ`.
    pub fn new(x: DMatrix<T>, y: DMatrix<T>) -> Result<Self> {
        let out = y.nrows();
        if y.ncols() != out || !out.is_multiple_of(2) || out == 0 {
            return Err(Error::NotSquare {
                rows: y.nrows(),
                cols: y.ncols(),
            });
        }
        if x.nrows() != out || !x.ncols().is_multiple_of(2) || x.ncols() == 0 {
            return Err(Error::DimensionMismatch {
                expected: out,
                found: x.nrows(),
            });
        }
        let asym = asymmetry(&y);
        if asym > validity_tol() {
            return Err(Error::NotSymmetric(to_f64(asym)));
        }
        let mut y = y;
        symmetrize(&mut y);
        let min = cp_min_eigenvalue(&x, &y);
        if min < -validity_tol::<T>() {
            return Err(Error::NotCompletelyPositive(to_f64(min)));
        }
        let offset = DVector::zeros(out);
        Ok(Self { x, y, offset })
    }

    pub fn with_offset(mut self, offset: DVector<T>) -> Result<Self> {
        if offset.len() != self.y.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.y.nrows(),
                found: offset.len(),
            });
        }
        self.offset = offset;
        Ok(self)
    }

    pub fn x(&self) -> &DMatrix<T> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<T> {
        &self.y
    }

    pub fn offset(&self) -> &DVector<T> {
        &self.offset
    }

    fn check_one_mode(&self) -> Result<()> {
        if self.x.shape() != (2, 2) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.x.nrows().max(self.x.ncols()),
            });
        }
        Ok(())
    }

    /// `x = det X` (signed).
    ///
    /// For `X = √q I` this is `q`, the gain/transmissivity of the channel.
    pub fn x_param(&self) -> Result<T> {
        self.check_one_mode()?;
        Ok(det2(&self.x))
    }

    /// `y = 2 √det Y`, the noise in units of the vacuum variance; `1 − q`
    /// for the beam splitter with a pure environment.
    pub fn y_param(&self) -> Result<T> {
        self.check_one_mode()?;
        Ok(lit::<T>(2.0) * det2(&self.y).max(T::zero()).sqrt())
    }

    /// `K = (y − |1 − x|) / 2`.
    pub fn k_param(&self) -> Result<T> {
        let x = self.x_param()?;
        let y = self.y_param()?;
        Ok((y - (T::one() - x).abs()) * lit(0.5))
    }

    pub fn apply(&self, st: &GaussianState<T>) -> Result<GaussianState<T>> {
        apply_channel(self, st)
    }

    pub fn to_record(&self) -> Result<ChannelRecord> {
        let class = classify_omg(self).ok();
        let (x, y, k) = match (self.x_param(), self.y_param(), self.k_param()) {
            (Ok(x), Ok(y), Ok(k)) => (Some(to_f64(x)), Some(to_f64(y)), Some(to_f64(k))),
            _ => (None, None, None),
        };
        Ok(ChannelRecord {
            schema_version: SCHEMA_VERSION,
            q: None,
            blocks: ChannelBlocks {
                x: rows(&self.x),
                y: rows(&self.y),
            },
            class: class.map(|c| c.class.tag().to_string()),
            kappa: class.and_then(|c| c.kappa),
            n0: class.and_then(|c| c.n0),
            x,
            y,
            k,
        })
    }

    pub fn from_record(rec: &ChannelRecord) -> Result<Self> {
        let out = rec.blocks.y.len();
        let inp = rec.blocks.x.first().map_or(0, |r| r.len());
        Self::new(
            from_rows(&rec.blocks.x, out, inp)?,
            from_rows(&rec.blocks.y, out, out)?,
        )
    }
}

fn det2<T: Scalar>(m: &DMatrix<T>) -> T {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Smallest eigenvalue of `Y + (i/2)(Σ_out − X Σ_in Xᵀ)`.
fn cp_min_eigenvalue<T: Scalar>(x: &DMatrix<T>, y: &DMatrix<T>) -> T {
    let sig_out = symplectic_form::<T>(y.nrows() / 2);
    let sig_in = symplectic_form::<T>(x.ncols() / 2);
    let im: DMatrix<T> = (sig_out - x * sig_in * x.transpose()) * lit::<T>(0.5);
    let h = DMatrix::from_fn(y.nrows(), y.ncols(), |i, j| {
        Complex::new(y[(i, j)], (im[(i, j)] - im[(j, i)]) * lit(0.5))
    });
    let eig = SymmetricEigen::new(h);
    eig.eigenvalues
        .iter()
        .copied()
        .fold(T::max_value().unwrap(), |a, b| if b < a { b } else { a })
}

/// Channel `A → B` obtained by fixing the environment to `v_e`:
/// `X = M`, `Y = N V_E Nᵀ`.
pub fn effective_channel<T: Scalar>(w: &SymplecticDilation<T>, v_e: &CovarianceMatrix<T>) -> Result<GaussianChannel<T>> {
    if v_e.n_modes() != w.n_e() {
        return Err(Error::DimensionMismatch {
            expected: w.n_e(),
            found: v_e.n_modes(),
        });
    }
    let n = w.n();
    let mut y = &n * v_e.matrix() * n.transpose();
    symmetrize(&mut y);
    GaussianChannel::new(w.m(), y)
}

/// Complementary channel `A → F`: `X = O`, `Y = P V_E Pᵀ`.
pub fn complementary_channel<T: Scalar>(w: &SymplecticDilation<T>, v_e: &CovarianceMatrix<T>) -> Result<GaussianChannel<T>> {
    if v_e.n_modes() != w.n_e() {
        return Err(Error::DimensionMismatch {
            expected: w.n_e(),
            found: v_e.n_modes(),
        });
    }
    let p = w.p();
    let mut y = &p * v_e.matrix() * p.transpose();
    symmetrize(&mut y);
    GaussianChannel::new(w.o(), y)
}

/// `d ↦ X d + d_E`, `V ↦ X V Xᵀ + Y`.
pub fn apply_channel<T: Scalar>(ch: &GaussianChannel<T>, st: &GaussianState<T>) -> Result<GaussianState<T>> {
    if st.cm.matrix().nrows() != ch.x.ncols() {
        return Err(Error::DimensionMismatch {
            expected: ch.x.ncols(),
            found: st.cm.matrix().nrows(),
        });
    }
    let mean = &ch.x * &st.mean + &ch.offset;
    let mut v = &ch.x * st.cm.matrix() * ch.x.transpose() + &ch.y;
    symmetrize(&mut v);
    GaussianState::new(mean, CovarianceMatrix::new(v)?)
}

/// Canonical classes of one-mode Gaussian channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OmgClass {
    A1,
    A2,
    B1,
    B2,
    #[serde(rename = "C_att")]
    CAtt,
    #[serde(rename = "C_amp")]
    CAmp,
    D,
}

impl OmgClass {
    pub const ALL: [OmgClass; 7] = [
        OmgClass::A1,
        OmgClass::A2,
        OmgClass::B1,
        OmgClass::B2,
        OmgClass::CAtt,
        OmgClass::CAmp,
        OmgClass::D,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            OmgClass::A1 => "A1",
            OmgClass::A2 => "A2",
            OmgClass::B1 => "B1",
            OmgClass::B2 => "B2",
            OmgClass::CAtt => "C_att",
            OmgClass::CAmp => "C_amp",
            OmgClass::D => "D",
        }
    }
}

impl fmt::Display for OmgClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Class tag plus the invariant parameters of a one-mode channel.
///
/// `kappa = det X` for classes C and D. `n0` is the thermal occupation of the
/// canonical environment (`Y = |1 − κ|(n0 + 1/2) I` for C/D,
/// `Y = (n0 + 1/2) I` for A, additive noise `Y = n0 I` for B2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub class: OmgClass,
    pub kappa: Option<f64>,
    pub n0: Option<f64>,
}

/// Identifies the canonical form of a one-mode channel from its invariants
/// `det X`, `rank X`, `det Y` and `rank Y`.
pub fn classify_omg<T: Scalar>(ch: &GaussianChannel<T>) -> Result<Classification> {
    ch.check_one_mode()?;
    let tol: T = lit(CLASSIFY_TOL);
    let half: T = lit(0.5);
    let kappa = det2(&ch.x);
    let det_y = det2(&ch.y);
    let sqrt_det_y = det_y.max(T::zero()).sqrt();
    let x_norm = ch.x.iter().fold(T::zero(), |a, b| a.max(b.abs()));
    let y_norm = ch.y.iter().fold(T::zero(), |a, b| a.max(b.abs()));

    let checked_n0 = |n0: T| -> Result<Option<f64>> {
        if n0 < -tol {
            Err(Error::Unclassified)
        } else {
            Ok(Some(to_f64(n0.max(T::zero()))))
        }
    };

    let (class, kappa_out, n0) = if x_norm <= tol {
        (OmgClass::A1, None, checked_n0(sqrt_det_y - half)?)
    } else if kappa.abs() <= tol {
        (OmgClass::A2, None, checked_n0(sqrt_det_y - half)?)
    } else if (kappa - T::one()).abs() <= tol {
        if y_norm > tol && det_y.abs() <= tol * y_norm {
            (OmgClass::B1, None, None)
        } else {
            (OmgClass::B2, None, checked_n0(sqrt_det_y)?)
        }
    } else if kappa > T::zero() {
        let class = if kappa < T::one() {
            OmgClass::CAtt
        } else {
            OmgClass::CAmp
        };
        let n0 = sqrt_det_y / (T::one() - kappa).abs() - half;
        (class, Some(to_f64(kappa)), checked_n0(n0)?)
    } else {
        let n0 = sqrt_det_y / (T::one() - kappa) - half;
        (OmgClass::D, Some(to_f64(kappa)), checked_n0(n0)?)
    };
    Ok(Classification {
        class,
        kappa: kappa_out,
        n0,
    })
}

/// Canonical representative of a class.
///
/// `kappa` is required for C (`0 < κ < 1` attenuator, `κ > 1` amplifier)
/// and D (`κ < 0`); `n0 ≥ 0` is ignored for B1. Class D uses
/// `Z = diag(1, −1)`.
pub fn canonical_channel<T: Scalar>(class: OmgClass, kappa: Option<T>, n0: T) -> Result<GaussianChannel<T>> {
    if !(n0 >= T::zero()) {
        return Err(invalid("n0", to_f64(n0), "must be nonnegative"));
    }
    let half: T = lit(0.5);
    let id = DMatrix::<T>::identity(2, 2);
    let need_kappa = || kappa.ok_or(invalid("kappa", f64::NAN, "required for classes C and D"));
    let (x, y) = match class {
        OmgClass::A1 => (DMatrix::zeros(2, 2), &id * (n0 + half)),
        OmgClass::A2 => (
            DMatrix::from_row_slice(2, 2, &[T::one(), T::zero(), T::zero(), T::zero()]),
            &id * (n0 + half),
        ),
        OmgClass::B1 => (
            id.clone(),
            DMatrix::from_row_slice(2, 2, &[T::zero(), T::zero(), T::zero(), half]),
        ),
        OmgClass::B2 => (id.clone(), &id * n0),
        OmgClass::CAtt => {
            let k = need_kappa()?;
            if !(k > T::zero() && k < T::one()) {
                return Err(invalid("kappa", to_f64(k), "C_att needs 0 < kappa < 1"));
            }
            (&id * k.sqrt(), &id * ((T::one() - k) * (n0 + half)))
        }
        OmgClass::CAmp => {
            let k = need_kappa()?;
            if !(k > T::one()) {
                return Err(invalid("kappa", to_f64(k), "C_amp needs kappa > 1"));
            }
            (&id * k.sqrt(), &id * ((k - T::one()) * (n0 + half)))
        }
        OmgClass::D => {
            let k = need_kappa()?;
            if !(k < T::zero()) {
                return Err(invalid("kappa", to_f64(k), "D needs kappa < 0"));
            }
            let z = DMatrix::from_row_slice(2, 2, &[T::one(), T::zero(), T::zero(), -T::one()]);
            (z * (-k).sqrt(), &id * ((T::one() - k) * (n0 + half)))
        }
    };
    GaussianChannel::new(x, y)
}

/// Rotates a one-mode channel by input/output phase shifts; the class and
/// parameters are unchanged.
pub fn rotate_channel<T: Scalar>(ch: &GaussianChannel<T>, theta_in: T, theta_out: T) -> Result<GaussianChannel<T>> {
    ch.check_one_mode()?;
    let r_in = rotation(theta_in);
    let r_out = rotation(theta_out);
    let x = &r_out * &ch.x * &r_in;
    let mut y = &r_out * &ch.y * r_out.transpose();
    symmetrize(&mut y);
    GaussianChannel::new(x, y)
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationBlocks {
    #[serde(rename = "M")]
    pub m: Vec<Vec<f64>>,
    #[serde(rename = "N")]
    pub n: Vec<Vec<f64>>,
    #[serde(rename = "O")]
    pub o: Vec<Vec<f64>>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
}

/// JSON form of a dilation: row-major blocks plus the optional `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationRecord {
    pub schema_version: u32,
    pub q: Option<f64>,
    pub n_a: usize,
    pub n_e: usize,
    pub blocks: DilationBlocks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelBlocks {
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<f64>>,
}

/// JSON form of a channel with its derived parameters and class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub schema_version: u32,
    pub q: Option<f64>,
    pub blocks: ChannelBlocks,
    pub class: Option<String>,
    pub kappa: Option<f64>,
    pub n0: Option<f64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub k: Option<f64>,
}

fn rows<T: Scalar>(m: &DMatrix<T>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| to_f64(m[(i, j)])).collect())
        .collect()
}

fn from_rows<T: Scalar>(rows: &[Vec<f64>], nrows: usize, ncols: usize) -> Result<DMatrix<T>> {
    if rows.len() != nrows {
        return Err(Error::DimensionMismatch {
            expected: nrows,
            found: rows.len(),
        });
    }
    let mut m = DMatrix::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::DimensionMismatch {
                expected: ncols,
                found: row.len(),
            });
        }
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = lit(*v);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{entropy_gaussian, symplectic_eigenvalues, symplectic_trace};

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    #[test]
    fn beam_splitter_half() {
        let u = beam_splitter(0.5_f64).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for v in u.dilation().matrix().iter() {
            assert!(*v == 0.0 || (v.abs() - h).abs() < 1e-15);
        }
        assert!((u.dilation().matrix()[(0, 2)] + h).abs() < 1e-15);
        assert!((u.dilation().matrix()[(2, 0)] - h).abs() < 1e-15);
    }

    #[test]
    fn beam_splitter_near_identity() {
        let u = beam_splitter(0.9999_f64).unwrap();
        let d = u.dilation().m() - DMatrix::identity(2, 2);
        assert!(d.norm() < 0.011);
    }

    #[test]
    fn canonical_unitaries_are_symplectic() {
        for q in [0.37_f64, 0.5, 0.99] {
            let u = beam_splitter(q).unwrap();
            assert!(symplectic_defect(u.dilation().matrix()) < 1e-12);
            assert!((u.dilation().matrix().determinant() - 1.0).abs() < 1e-10);
        }
        for q in [1.5_f64, 2.0, 3.0, 20.0] {
            let u = two_mode_squeezer(q).unwrap();
            assert!(symplectic_defect(u.dilation().matrix()) < 1e-10);
            assert!((u.dilation().matrix().determinant() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn squeezer_q2_entries() {
        let u = two_mode_squeezer(2.0_f64).unwrap();
        let s = u.dilation().matrix();
        assert_eq!(s[(0, 3)], -1.0);
        assert_eq!(s[(3, 0)], -1.0);
        assert!((s[(0, 0)] - 2.0_f64.sqrt()).abs() < 1e-15);
        let (r, sq) = u.disentangling_params().unwrap();
        assert!((r - 0.5_f64.sqrt()).abs() < 1e-15);
        assert!((sq - 2.0_f64.sqrt().ln()).abs() < 1e-15);
    }

    #[test]
    fn constructors_reject_bad_q() {
        assert!(beam_splitter(1.0_f64).is_err());
        assert!(beam_splitter(0.0_f64).is_err());
        assert!(two_mode_squeezer(1.0_f64).is_err());
        assert!(TwoModeUnitary::new(1.0_f64).is_err());
        assert!(TwoModeUnitary::new(-0.5_f64).is_err());
    }

    #[test]
    fn effective_channel_of_beam_splitter() {
        let q = 0.3_f64;
        let u = beam_splitter(q).unwrap();
        let vac = CovarianceMatrix::vacuum(1);
        let ch = effective_channel(u.dilation(), &vac).unwrap();
        assert!(max_abs(&(ch.x() - DMatrix::identity(2, 2) * q.sqrt())) < 1e-15);
        assert!(max_abs(&(ch.y() - DMatrix::identity(2, 2) * ((1.0 - q) / 2.0))) < 1e-15);
        let comp = complementary_channel(u.dilation(), &vac).unwrap();
        assert!(max_abs(&(comp.x() - DMatrix::identity(2, 2) * (1.0 - q).sqrt())) < 1e-15);
        assert!(max_abs(&(comp.y() - DMatrix::identity(2, 2) * (q / 2.0))) < 1e-15);
    }

    #[test]
    fn omg_params_for_pure_environments() {
        for (s, th) in [(0.0_f64, 0.0_f64), (0.8, 1.1), (-0.4, 5.0)] {
            let v_e = squeezed_env_cm(s, th).unwrap();
            for q in [0.2_f64, 0.75] {
                let ch = effective_channel(beam_splitter(q).unwrap().dilation(), &v_e).unwrap();
                assert!((ch.x_param().unwrap() - q).abs() < 1e-12);
                assert!((ch.y_param().unwrap() - (1.0 - q)).abs() < 1e-12);
                assert!(ch.k_param().unwrap().abs() < 1e-12);
                let comp = complementary_channel(beam_splitter(q).unwrap().dilation(), &v_e).unwrap();
                assert!((ch.x_param().unwrap() + comp.x_param().unwrap() - 1.0).abs() < 1e-10);
            }
            for q in [1.5_f64, 2.0, 4.0] {
                let ch = effective_channel(two_mode_squeezer(q).unwrap().dilation(), &v_e).unwrap();
                assert!((ch.x_param().unwrap() - q).abs() < 1e-12);
                assert!((ch.y_param().unwrap() - (q - 1.0)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn identity_dilation_gives_identity_channel() {
        let w = SymplecticDilation::<f64>::identity(1, 1);
        let ch = effective_channel(&w, &CovarianceMatrix::vacuum(1)).unwrap();
        assert_eq!(ch.x(), &DMatrix::identity(2, 2));
        assert_eq!(ch.y(), &DMatrix::zeros(2, 2));
        let c = classify_omg(&ch).unwrap();
        assert_eq!(c.class, OmgClass::B2);
        assert_eq!(c.n0, Some(0.0));
    }

    #[test]
    fn swap_complementary_is_unitary_block() {
        let w = SymplecticDilation::<f64>::swap();
        assert_eq!(w.m(), DMatrix::zeros(2, 2));
        let comp = complementary_channel(&w, &CovarianceMatrix::vacuum(1)).unwrap();
        assert!((comp.x().determinant().abs() - 1.0).abs() < 1e-15);
        let ch = effective_channel(&w, &CovarianceMatrix::vacuum(1)).unwrap();
        assert_eq!(classify_omg(&ch).unwrap().class, OmgClass::A1);
    }

    #[test]
    fn marginals_match_joint_evolution() {
        let q = 0.6_f64;
        let w = beam_splitter(q).unwrap().dilation().clone();
        let v_a = CovarianceMatrix::thermal(1, 2.0).unwrap();
        let v_e = squeezed_env_cm(0.5, 0.3).unwrap();
        let joint = w.evolve(&v_a, &v_e).unwrap();
        let st = GaussianState::centered(v_a.clone());
        let b = effective_channel(&w, &v_e).unwrap().apply(&st).unwrap();
        let f = complementary_channel(&w, &v_e).unwrap().apply(&st).unwrap();
        let jb = joint.matrix().view((0, 0), (2, 2)).into_owned();
        let jf = joint.matrix().view((2, 2), (2, 2)).into_owned();
        assert!(max_abs(&(jb - b.cm.matrix())) < 1e-12);
        assert!(max_abs(&(jf - f.cm.matrix())) < 1e-12);
        // the joint state is a unitary image of a state with ν = {2.5, 0.5}
        let total_in = symplectic_trace(&v_a.direct_sum(&v_e).into_matrix()).unwrap();
        let total_out = symplectic_trace(joint.matrix()).unwrap();
        assert!((total_in - total_out).abs() < 1e-10);
        let marg = symplectic_trace(b.cm.matrix()).unwrap() + symplectic_trace(f.cm.matrix()).unwrap();
        assert!(marg >= total_out - 1e-10);
    }

    #[test]
    fn apply_examples() {
        let att = canonical_channel(OmgClass::CAtt, Some(0.5), 0.0).unwrap();
        let vac = GaussianState::centered(CovarianceMatrix::<f64>::vacuum(1));
        let out = apply_channel(&att, &vac).unwrap();
        assert!(max_abs(&(out.cm.matrix() - DMatrix::identity(2, 2) * 0.5)) < 1e-15);

        let amp = GaussianChannel::new(
            DMatrix::identity(2, 2) * 2.0_f64.sqrt(),
            DMatrix::identity(2, 2) * 0.5,
        )
        .unwrap();
        let out = apply_channel(&amp, &vac).unwrap();
        assert!(max_abs(&(out.cm.matrix() - DMatrix::identity(2, 2) * 1.5)) < 1e-14);

        let th = GaussianState::centered(CovarianceMatrix::<f64>::thermal(1, 3.0).unwrap());
        let id = canonical_channel(OmgClass::B2, None, 0.0).unwrap();
        assert_eq!(apply_channel(&id, &th).unwrap(), th);
    }

    #[test]
    fn displacement_is_transformed() {
        let ch = canonical_channel(OmgClass::CAtt, Some(0.25_f64), 0.0)
            .unwrap()
            .with_offset(DVector::from_vec(vec![1.0, 0.0]))
            .unwrap();
        let st = GaussianState::new(DVector::from_vec(vec![2.0_f64, -4.0]), CovarianceMatrix::vacuum(1)).unwrap();
        let out = ch.apply(&st).unwrap();
        assert!((out.mean[0] - 2.0).abs() < 1e-15);
        assert!((out.mean[1] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn cp_violation_detected() {
        let bad = GaussianChannel::new(DMatrix::identity(2, 2) * 0.5_f64, DMatrix::zeros(2, 2));
        assert!(matches!(bad, Err(Error::NotCompletelyPositive(_))));
        let w = beam_splitter(0.5_f64).unwrap();
        assert!(effective_channel(w.dilation(), &CovarianceMatrix::vacuum(2)).is_err());
    }

    #[test]
    fn classify_examples() {
        let catt = GaussianChannel::new(
            DMatrix::identity(2, 2) * 0.7_f64.sqrt(),
            DMatrix::identity(2, 2) * 0.15,
        )
        .unwrap();
        let c = classify_omg(&catt).unwrap();
        assert_eq!(c.class, OmgClass::CAtt);
        assert!((c.kappa.unwrap() - 0.7).abs() < 1e-12);
        assert!(c.n0.unwrap().abs() < 1e-12);

        let a1 = GaussianChannel::new(DMatrix::zeros(2, 2), DMatrix::identity(2, 2) * 0.5_f64).unwrap();
        assert_eq!(classify_omg(&a1).unwrap().class, OmgClass::A1);
    }

    #[test]
    fn classify_round_trips_canonical_forms() {
        for class in OmgClass::ALL {
            let kappas: Vec<Option<f64>> = match class {
                OmgClass::CAtt => vec![Some(0.1), Some(0.5), Some(0.9)],
                OmgClass::CAmp => vec![Some(1.2), Some(2.0), Some(7.0)],
                OmgClass::D => vec![Some(-0.3), Some(-1.0), Some(-4.0)],
                _ => vec![None],
            };
            for kappa in kappas {
                for n0 in [0.0, 0.5, 2.0] {
                    let ch = canonical_channel(class, kappa, n0).unwrap();
                    for (ti, to) in [(0.0, 0.0), (0.7, 2.1)] {
                        let rotated = rotate_channel(&ch, ti, to).unwrap();
                        let c = classify_omg(&rotated).unwrap();
                        assert_eq!(c.class, class, "{class:?} {kappa:?} {n0}");
                        if let Some(k) = kappa {
                            assert!((c.kappa.unwrap() - k).abs() < 1e-9);
                        }
                        if class != OmgClass::B1 {
                            assert!((c.n0.unwrap() - n0).abs() < 1e-9, "{class:?} {n0} {:?}", c.n0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn squeezed_env_examples() {
        let v = squeezed_env_cm(0.0_f64, 1.0).unwrap();
        assert!(max_abs(&(v.matrix() - DMatrix::identity(2, 2) * 0.5)) < 1e-15);
        let v = squeezed_env_cm(1.0_f64, 0.0).unwrap();
        let e2 = 2.0_f64.exp();
        assert!((v.matrix()[(0, 0)] - e2 / 2.0).abs() < 1e-14);
        assert!((v.matrix()[(1, 1)] - 1.0 / (2.0 * e2)).abs() < 1e-15);
        let v = squeezed_env_cm(0.8_f64, 1.1).unwrap();
        assert!((symplectic_eigenvalues(&v).unwrap()[0] - 0.5).abs() < 1e-12);
        assert!(entropy_gaussian(&v).unwrap().abs() < 1e-10);
        // mean photon number sinh²(s)
        assert!((v.mean_photon_number() - 0.8_f64.sinh().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn json_records_round_trip() {
        let u = two_mode_squeezer(2.5_f64).unwrap();
        let rec = u.to_record();
        let text = serde_json::to_string(&rec).unwrap();
        assert!(text.contains("\"M\""));
        let back: DilationRecord = serde_json::from_str(&text).unwrap();
        let w = SymplecticDilation::<f64>::from_record(&back).unwrap();
        assert_eq!(w.matrix(), u.dilation().matrix());

        let ch = effective_channel(u.dilation(), &CovarianceMatrix::vacuum(1)).unwrap();
        let rec = ch.to_record().unwrap();
        assert_eq!(rec.class.as_deref(), Some("C_amp"));
        let text = serde_json::to_string(&rec).unwrap();
        let back: ChannelRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(GaussianChannel::<f64>::from_record(&back).unwrap(), ch);
    }
}
