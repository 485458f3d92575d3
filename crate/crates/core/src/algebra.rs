//! Finite-dimensional algebra of `gl(m)`, its Lorentz subalgebra `k`, the
//! transvection complement `p`, and the affine algebra `a(m) = gl(m) ⊕ R^m`
//! together with the affine group `A(m, R)`.
//!
//! Matrix conventions: an element `a ∈ gl(m)` has components `a^k_i` where the
//! upper index is the row and the lower index the column, so `(a ξ)^k = a^k_i ξ^i`.
//! `E^r_c` is the elementary matrix with a single `1` in row `r`, column `c`.
//! The Levi-Civita symbol is the plain permutation symbol with `ε_123 = +1`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Threshold used for every invertibility check.
pub const DET_EPS: f64 = 1e-12;

/// Default truncation tolerance of the exponential series.
pub const EXP_TOL: f64 = 1e-16;

/// An element of `gl(m, R)`.
pub type GlElt = DMatrix<f64>;

/// The diagonal signature matrix `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    diag: Vec<f64>,
}

impl Signature {
    pub fn new(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidSignature("empty signature".into()));
        }
        if let Some(bad) = diag.iter().find(|&&s| s != 1.0 && s != -1.0) {
            return Err(Error::InvalidSignature(format!(
                "entries must be +1 or -1, found {bad}"
            )));
        }
        Ok(Self {
            diag: diag.to_vec(),
        })
    }

    /// `η = diag(-1, +1, +1)`.
    pub fn lorentz3() -> Self {
        Self {
            diag: vec![-1.0, 1.0, 1.0],
        }
    }

    pub fn m(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// `η_ij`; equal to `η^ij` because `η² = 1`.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else {
            0.0
        }
    }

    pub fn eta(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.diag))
    }

    /// `η(u, v) = η_ij u^i v^j`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.diag
            .iter()
            .zip(u.iter().zip(v))
            .map(|(s, (a, b))| s * a * b)
            .sum()
    }
}

impl Default for Signature {
    fn default() -> Self {
        Self::lorentz3()
    }
}

/// Which invariant pairing to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairingKind {
    /// `⟨a, b⟩ = η^ij η_kl a^k_i b^l_j` on `gl(m)`.
    GlEta,
    /// The extension of `GlEta` to `a(3)` through `k ≅ R^3`.
    Aff3,
}

/// An element `(a, ξ)` of the affine algebra `a(m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffElt {
    pub lin: GlElt,
    pub trans: DVector<f64>,
}

impl AffElt {
    pub fn new(lin: GlElt, trans: DVector<f64>) -> Result<Self> {
        check_square(&lin)?;
        if trans.len() != lin.nrows() {
            return Err(Error::DimensionMismatch {
                expected: lin.nrows(),
                found: trans.len(),
            });
        }
        Ok(Self { lin, trans })
    }

    pub fn zero(m: usize) -> Self {
        Self {
            lin: DMatrix::zeros(m, m),
            trans: DVector::zeros(m),
        }
    }

    pub fn from_lin(lin: GlElt) -> Self {
        let m = lin.nrows();
        Self {
            lin,
            trans: DVector::zeros(m),
        }
    }

    pub fn from_trans(trans: DVector<f64>) -> Self {
        let m = trans.len();
        Self {
            lin: DMatrix::zeros(m, m),
            trans,
        }
    }

    pub fn m(&self) -> usize {
        self.trans.len()
    }

    /// Block embedding `[[a, ξ], [0, 0]]` into `gl(m + 1)`.
    pub fn to_block(&self) -> DMatrix<f64> {
        let m = self.m();
        let mut b = DMatrix::zeros(m + 1, m + 1);
        b.view_mut((0, 0), (m, m)).copy_from(&self.lin);
        b.view_mut((0, m), (m, 1)).copy_from(&self.trans);
        b
    }

    pub fn norm(&self) -> f64 {
        (self.lin.norm_squared() + self.trans.norm_squared()).sqrt()
    }

    /// Coordinates in the storage basis: the `m²` entries of `lin` in
    /// row-major order followed by the `m` entries of `trans`.
    pub fn to_coords(&self) -> Vec<f64> {
        let m = self.m();
        let mut out = Vec::with_capacity(m * m + m);
        for r in 0..m {
            for c in 0..m {
                out.push(self.lin[(r, c)]);
            }
        }
        out.extend(self.trans.iter());
        out
    }

    pub fn from_coords(m: usize, coords: &[f64]) -> Result<Self> {
        if coords.len() != m * m + m {
            return Err(Error::DimensionMismatch {
                expected: m * m + m,
                found: coords.len(),
            });
        }
        Ok(Self {
            lin: DMatrix::from_row_slice(m, m, &coords[..m * m]),
            trans: DVector::from_column_slice(&coords[m * m..]),
        })
    }
}

/// An element `(h, t)` of `A(m, R)`, acting on `R^m` by `z ↦ h z + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffGroupElt {
    lin: DMatrix<f64>,
    trans: DVector<f64>,
}

impl AffGroupElt {
    pub fn new(lin: DMatrix<f64>, trans: DVector<f64>) -> Result<Self> {
        check_square(&lin)?;
        if trans.len() != lin.nrows() {
            return Err(Error::DimensionMismatch {
                expected: lin.nrows(),
                found: trans.len(),
            });
        }
        let det = lin.determinant();
        if det.abs() <= DET_EPS || !det.is_finite() {
            return Err(Error::Singular { det });
        }
        Ok(Self { lin, trans })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            lin: DMatrix::identity(m, m),
            trans: DVector::zeros(m),
        }
    }

    /// `α`: the translation subgroup.
    pub fn from_translation(t: DVector<f64>) -> Self {
        let m = t.len();
        Self {
            lin: DMatrix::identity(m, m),
            trans: t,
        }
    }

    /// `γ`: the linear subgroup.
    pub fn from_linear(h: DMatrix<f64>) -> Result<Self> {
        let m = h.nrows();
        Self::new(h, DVector::zeros(m))
    }

    /// `β`: projection onto the linear part.
    pub fn linear_part(&self) -> &DMatrix<f64> {
        &self.lin
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.trans
    }

    pub fn m(&self) -> usize {
        self.trans.len()
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            lin: &self.lin * &other.lin,
            trans: &self.lin * &other.trans + &self.trans,
        }
    }

    pub fn inverse(&self) -> Self {
        let h_inv = self
            .lin
            .clone()
            .try_inverse()
            .expect("AffGroupElt invariant: linear part is invertible");
        let t = -(&h_inv * &self.trans);
        Self {
            lin: h_inv,
            trans: t,
        }
    }

    pub fn to_block(&self) -> DMatrix<f64> {
        let m = self.m();
        let mut b = DMatrix::zeros(m + 1, m + 1);
        b.view_mut((0, 0), (m, m)).copy_from(&self.lin);
        b.view_mut((0, m), (m, 1)).copy_from(&self.trans);
        b[(m, m)] = 1.0;
        b
    }
}

fn check_square(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    Ok(())
}

fn check_dim(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `E^r_c`.
pub fn elementary(m: usize, row: usize, col: usize) -> GlElt {
    let mut e = DMatrix::zeros(m, m);
    e[(row, col)] = 1.0;
    e
}

/// `ε_ijk` for indices in `0..3`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `η a^T η`, the adjoint of `a` with respect to `η`.
fn eta_adjoint(a: &GlElt, sig: &Signature) -> GlElt {
    let m = sig.m();
    DMatrix::from_fn(m, m, |r, c| sig.diag[r] * a[(c, r)] * sig.diag[c])
}

/// Splits `a` into its `k` and `p` parts:
/// `k = ½(a − η aᵀ η)`, `p = ½(a + η aᵀ η)`.
pub fn project_kp(a: &GlElt, sig: &Signature) -> Result<(GlElt, GlElt)> {
    check_square(a)?;
    check_dim(a.nrows(), sig.m())?;
    let adj = eta_adjoint(a, sig);
    let k = (a - &adj) * 0.5;
    let p = (a + &adj) * 0.5;
    Ok((k, p))
}

/// `a^j_i = η^jk ε_ikl ξ^l`, the isomorphism `R^3 → k`.
pub fn iso_k_r3(xi: &[f64], sig: &Signature) -> Result<GlElt> {
    if sig.m() != 3 {
        return Err(Error::RequiresDim3(sig.m()));
    }
    check_dim(xi.len(), 3)?;
    let mut a = DMatrix::zeros(3, 3);
    for j in 0..3 {
        for i in 0..3 {
            let mut s = 0.0;
            for l in 0..3 {
                s += sig.diag[j] * levi_civita(i, j, l) * xi[l];
            }
            a[(j, i)] = s;
        }
    }
    Ok(a)
}

/// Inverse of [`iso_k_r3`]. For a general `a ∈ gl(3)` this returns the
/// coordinates of its `k` part.
pub fn iso_r3_k(a: &GlElt, sig: &Signature) -> Result<[f64; 3]> {
    if sig.m() != 3 {
        return Err(Error::RequiresDim3(sig.m()));
    }
    check_square(a)?;
    check_dim(a.nrows(), 3)?;
    let (k, _) = project_kp(a, sig)?;
    // (η k)_{ji} = η_jj a^j_i = ε_{i j l} ξ^l, so ξ^l = ½ ε_{ijl} (η k)_{ji}.
    let mut xi = [0.0; 3];
    for (l, x) in xi.iter_mut().enumerate() {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += levi_civita(i, j, l) * sig.diag[j] * k[(j, i)];
            }
        }
        *x = 0.5 * s;
    }
    Ok(xi)
}

/// `⟨a, b⟩ = η^ij η_kl a^k_i b^l_j`.
pub fn pair_gl(a: &GlElt, b: &GlElt, sig: &Signature) -> Result<f64> {
    check_square(a)?;
    check_square(b)?;
    let m = sig.m();
    check_dim(a.nrows(), m)?;
    check_dim(b.nrows(), m)?;
    let mut s = 0.0;
    for i in 0..m {
        for k in 0..m {
            s += sig.diag[i] * sig.diag[k] * a[(k, i)] * b[(k, i)];
        }
    }
    Ok(s)
}

/// The pairing on `a(3)`: `k × R^3` cross terms through [`iso_k_r3`], `p`
/// paired with itself by [`pair_gl`], and `p ⊥ (k ⊕ R^3)`.
pub fn pair_aff(x: &AffElt, y: &AffElt, sig: &Signature) -> Result<f64> {
    if sig.m() != 3 {
        return Err(Error::RequiresDim3(sig.m()));
    }
    check_dim(x.m(), 3)?;
    check_dim(y.m(), 3)?;
    let (kx, px) = project_kp(&x.lin, sig)?;
    let (ky, py) = project_kp(&y.lin, sig)?;
    let iso_y = iso_k_r3(y.trans.as_slice(), sig)?;
    let iso_x = iso_k_r3(x.trans.as_slice(), sig)?;
    Ok(pair_gl(&kx, &iso_y, sig)? + pair_gl(&ky, &iso_x, sig)? + pair_gl(&px, &py, sig)?)
}

pub fn bracket_gl(a: &GlElt, b: &GlElt) -> Result<GlElt> {
    check_square(a)?;
    check_square(b)?;
    check_dim(b.nrows(), a.nrows())?;
    Ok(a * b - b * a)
}

/// `[(a, ξ), (b, ζ)] = ([a, b], a ζ − b ξ)`.
pub fn bracket_aff(x: &AffElt, y: &AffElt) -> Result<AffElt> {
    check_dim(y.m(), x.m())?;
    Ok(AffElt {
        lin: bracket_gl(&x.lin, &y.lin)?,
        trans: &x.lin * &y.trans - &y.lin * &x.trans,
    })
}

/// `Ad_(h,t) (a, ξ) = (h a h⁻¹, h ξ − h a h⁻¹ t)`.
pub fn adjoint_aff(g: &AffGroupElt, x: &AffElt) -> Result<AffElt> {
    check_dim(x.m(), g.m())?;
    let h_inv = g.lin.clone().try_inverse().ok_or(Error::Singular {
        det: g.lin.determinant(),
    })?;
    let conj = &g.lin * &x.lin * &h_inv;
    let trans = &g.lin * &x.trans - &conj * &g.trans;
    Ok(AffElt { lin: conj, trans })
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.norm();
    let mut s = 0u32;
    while norm / 2f64.powi(s as i32) > 0.5 {
        s += 1;
    }
    let scaled = a / 2f64.powi(s as i32);
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..200 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.norm() < tol {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Exponential of the block embedding of `x`.
pub fn exp_aff(x: &AffElt, tol: f64) -> AffGroupElt {
    let m = x.m();
    let b = expm(&x.to_block(), tol);
    AffGroupElt {
        lin: b.view((0, 0), (m, m)).into_owned(),
        trans: b.view((0, m), (m, 1)).column(0).into_owned(),
    }
}

/// Basis of `p` used for Gram matrices: `½(E^i_j + η E^j_i η)` for
/// `i ≤ j`, in row-major order.
pub fn p_basis(sig: &Signature) -> Vec<GlElt> {
    let m = sig.m();
    let mut out = Vec::with_capacity(m * (m + 1) / 2);
    for i in 0..m {
        for j in i..m {
            let e = elementary(m, i, j);
            let et = elementary(m, j, i);
            let adj = sig.eta() * et * sig.eta();
            out.push((e + adj) * 0.5);
        }
    }
    out
}

/// `iso_k_r3(e_1), iso_k_r3(e_2), iso_k_r3(e_3)`.
pub fn k_basis(sig: &Signature) -> Result<Vec<GlElt>> {
    (0..3)
        .map(|l| {
            let mut e = [0.0; 3];
            e[l] = 1.0;
            iso_k_r3(&e, sig)
        })
        .collect()
}

/// Gram matrix of a pairing on its standard basis.
///
/// `GlEta` uses the `m²` elementary matrices in row-major order; `Aff3` uses
/// the `p` basis, then the `k` basis, then the standard basis of `R^3`.
pub fn gram(pk: PairingKind, sig: &Signature) -> Result<DMatrix<f64>> {
    match pk {
        PairingKind::GlEta => {
            let m = sig.m();
            let basis: Vec<GlElt> = (0..m * m).map(|a| elementary(m, a / m, a % m)).collect();
            let mut g = DMatrix::zeros(m * m, m * m);
            for (a, ea) in basis.iter().enumerate() {
                for (b, eb) in basis.iter().enumerate() {
                    g[(a, b)] = pair_gl(ea, eb, sig)?;
                }
            }
            Ok(g)
        }
        PairingKind::Aff3 => {
            if sig.m() != 3 {
                return Err(Error::RequiresDim3(sig.m()));
            }
            let mut basis: Vec<AffElt> = p_basis(sig).into_iter().map(AffElt::from_lin).collect();
            basis.extend(k_basis(sig)?.into_iter().map(AffElt::from_lin));
            for l in 0..3 {
                let mut e = DVector::zeros(3);
                e[l] = 1.0;
                basis.push(AffElt::from_trans(e));
            }
            let n = basis.len();
            let mut g = DMatrix::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    g[(a, b)] = pair_aff(&basis[a], &basis[b], sig)?;
                }
            }
            Ok(g)
        }
    }
}
