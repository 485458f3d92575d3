//! Vector-space valued differential forms on a chart whose coefficients are
//! jets, so exterior derivatives are exact.
//!
//! A degree-`p` form stores one coefficient per strictly increasing
//! multi-index `I = (i_1 < … < i_p)` and per basis element of its value
//! space. Multi-indices are encoded as bit masks and ordered
//! lexicographically by their sorted index tuples.

use std::fmt;
use std::sync::{Arc, LazyLock};

use nalgebra::DMatrix;

use super::chart::Chart;
use super::jet::{Jet, Jet2Scalar, MAX_DIM};
use crate::algebra::{self, AffElt, PairingKind, Signature};
use crate::error::{Error, Result};

/// The vector space in which a form takes its values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueSpace {
    Scalar,
    /// `R^m`.
    Vec(usize),
    /// `gl(m)`, stored row-major.
    Gl(usize),
    /// `a(m)`: the `gl(m)` entries row-major, then the `R^m` part.
    Aff(usize),
}

impl ValueSpace {
    pub fn dim(&self) -> usize {
        match *self {
            ValueSpace::Scalar => 1,
            ValueSpace::Vec(m) => m,
            ValueSpace::Gl(m) => m * m,
            ValueSpace::Aff(m) => m * m + m,
        }
    }

    pub fn is_algebra(&self) -> bool {
        matches!(self, ValueSpace::Gl(_) | ValueSpace::Aff(_))
    }
}

struct IndexTables {
    masks: Vec<Vec<Vec<u8>>>,
    pos: Vec<[usize; 1 << MAX_DIM]>,
}

static TABLES: LazyLock<IndexTables> = LazyLock::new(|| {
    let mut masks = Vec::with_capacity(MAX_DIM + 1);
    let mut pos = Vec::with_capacity(MAX_DIM + 1);
    for n in 0..=MAX_DIM {
        let mut by_degree = vec![Vec::new(); n + 1];
        let mut table = [usize::MAX; 1 << MAX_DIM];
        for p in 0..=n {
            let mut tuples: Vec<Vec<usize>> = Vec::new();
            combinations(n, p, 0, &mut Vec::new(), &mut tuples);
            for (k, t) in tuples.iter().enumerate() {
                let mask = t.iter().fold(0u8, |acc, &i| acc | (1 << i));
                by_degree[p].push(mask);
                table[mask as usize] = k;
            }
        }
        masks.push(by_degree);
        pos.push(table);
    }
    IndexTables { masks, pos }
});

fn combinations(n: usize, p: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == p {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        combinations(n, p, i + 1, cur, out);
        cur.pop();
    }
}

/// Increasing multi-indices of length `p` in `n` dimensions, as bit masks.
pub fn multi_indices(n: usize, p: usize) -> &'static [u8] {
    &TABLES.masks[n][p]
}

#[inline]
pub fn mask_position(n: usize, mask: u8) -> usize {
    TABLES.pos[n][mask as usize]
}

/// Sorted index tuple of a mask.
pub fn mask_indices(mask: u8) -> Vec<usize> {
    (0..8).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of the permutation sorting `(I, J)` for disjoint increasing `I`, `J`.
#[inline]
pub fn shuffle_sign(left: u8, right: u8) -> f64 {
    let mut inversions = 0u32;
    for j in 0..8 {
        if right & (1 << j) != 0 {
            inversions += (left >> (j + 1)).count_ones();
        }
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Pointwise jets of all coefficients of a form.
#[derive(Debug, Clone, PartialEq)]
pub struct FormJet {
    pub n: usize,
    pub degree: usize,
    pub dim: usize,
    pub order: u8,
    /// `coeffs[component * dim + basis]`.
    pub coeffs: Vec<Jet>,
}

impl FormJet {
    pub fn zeros(n: usize, degree: usize, dim: usize, order: u8) -> Self {
        let ncomp = multi_indices(n, degree).len();
        Self {
            n,
            degree,
            dim,
            order,
            coeffs: vec![Jet::default(); ncomp * dim],
        }
    }

    pub fn ncomp(&self) -> usize {
        multi_indices(self.n, self.degree).len()
    }

    #[inline]
    pub fn get(&self, comp: usize, basis: usize) -> &Jet {
        &self.coeffs[comp * self.dim + basis]
    }

    #[inline]
    pub fn get_mut(&mut self, comp: usize, basis: usize) -> &mut Jet {
        &mut self.coeffs[comp * self.dim + basis]
    }

    pub fn value(&self, comp: usize, basis: usize) -> f64 {
        self.get(comp, basis).value
    }

    /// Value coefficients of one component.
    pub fn component_values(&self, comp: usize) -> Vec<f64> {
        (0..self.dim).map(|b| self.value(comp, b)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .fold(0.0, |m, j| m.max(j.max_abs(self.n, self.order)))
    }

    pub fn value_max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, j| m.max(j.value.abs()))
    }

    pub fn add_scaled(&mut self, other: &FormJet, c: f64) {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        let order = self.order.min(other.order);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_scaled(b, c, self.n, order);
        }
        self.order = order;
    }
}

/// Pointwise exterior derivative. The input must carry at least a 1-jet;
/// the output loses one order.
pub fn ext_d_at(f: &FormJet) -> Result<FormJet> {
    if f.order == 0 {
        return Err(Error::JetExhausted);
    }
    if f.degree >= f.n {
        return Err(Error::DegreeOverflow {
            degree: f.degree + 1,
            dim: f.n,
        });
    }
    let n = f.n;
    let order = f.order - 1;
    let mut out = FormJet::zeros(n, f.degree + 1, f.dim, order);
    for (ci, &mi) in multi_indices(n, f.degree).iter().enumerate() {
        for j in 0..n {
            let bit = 1u8 << j;
            if mi & bit != 0 {
                continue;
            }
            let sign = if (mi & (bit - 1)).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            let co = mask_position(n, mi | bit);
            for b in 0..f.dim {
                let d = f.get(ci, b).partial(j, n, order);
                out.get_mut(co, b).add_scaled(&d, sign, n, order);
            }
        }
    }
    Ok(out)
}

/// A bilinear map `U × V → W` given by its nonzero structure constants,
/// grouped by input basis pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Bilinear {
    pub left: usize,
    pub right: usize,
    pub out: usize,
    terms: Vec<(usize, usize, Vec<(usize, f64)>)>,
}

impl Bilinear {
    /// Builds the map from its values on basis pairs.
    pub fn from_basis_fn<F>(left: usize, right: usize, out: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<Vec<f64>>,
    {
        let mut terms = Vec::new();
        for i in 0..left {
            for j in 0..right {
                let v = f(i, j)?;
                if v.len() != out {
                    return Err(Error::DimensionMismatch {
                        expected: out,
                        found: v.len(),
                    });
                }
                let nz: Vec<(usize, f64)> = v
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| *c != 0.0)
                    .collect();
                if !nz.is_empty() {
                    terms.push((i, j, nz));
                }
            }
        }
        Ok(Self {
            left,
            right,
            out,
            terms,
        })
    }

    /// The pairing `pk` on the storage basis of `space`.
    pub fn pairing(pk: PairingKind, sig: &Signature, space: ValueSpace) -> Result<Self> {
        match (pk, space) {
            (PairingKind::GlEta, ValueSpace::Gl(m)) if m == sig.m() => {
                Self::from_basis_fn(m * m, m * m, 1, |a, b| {
                    let ea = algebra::elementary(m, a / m, a % m);
                    let eb = algebra::elementary(m, b / m, b % m);
                    Ok(vec![algebra::pair_gl(&ea, &eb, sig)?])
                })
            }
            (PairingKind::Aff3, ValueSpace::Aff(3)) => {
                if sig.m() != 3 {
                    return Err(Error::RequiresDim3(sig.m()));
                }
                Self::from_basis_fn(12, 12, 1, |a, b| {
                    let ea = AffElt::from_coords(3, &unit(12, a))?;
                    let eb = AffElt::from_coords(3, &unit(12, b))?;
                    Ok(vec![algebra::pair_aff(&ea, &eb, sig)?])
                })
            }
            _ => Err(Error::SpaceMismatch(format!(
                "pairing {pk:?} is not defined on {space:?} with m = {}",
                sig.m()
            ))),
        }
    }

    /// The Lie bracket of `gl(m)` or `a(m)` on its storage basis.
    pub fn bracket(space: ValueSpace) -> Result<Self> {
        match space {
            ValueSpace::Gl(m) => Self::from_basis_fn(m * m, m * m, m * m, |a, b| {
                let ea = algebra::elementary(m, a / m, a % m);
                let eb = algebra::elementary(m, b / m, b % m);
                let c = algebra::bracket_gl(&ea, &eb)?;
                Ok(c.transpose().as_slice().to_vec())
            }),
            ValueSpace::Aff(m) => {
                let d = m * m + m;
                Self::from_basis_fn(d, d, d, |a, b| {
                    let ea = AffElt::from_coords(m, &unit(d, a))?;
                    let eb = AffElt::from_coords(m, &unit(d, b))?;
                    Ok(algebra::bracket_aff(&ea, &eb)?.to_coords())
                })
            }
            _ => Err(Error::SpaceMismatch(format!(
                "{space:?} is not a Lie algebra"
            ))),
        }
    }

    /// `gl(m) × R^m → R^m`, `(a, v) ↦ a v`.
    pub fn matrix_action(m: usize) -> Self {
        Self::from_basis_fn(m * m, m, m, |a, j| {
            let mut v = vec![0.0; m];
            if a % m == j {
                v[a / m] = 1.0;
            }
            Ok(v)
        })
        .expect("matrix action is well formed")
    }

    pub fn apply(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.out];
        for (i, j, outs) in &self.terms {
            let p = u[*i] * v[*j];
            for (k, c) in outs {
                w[*k] += c * p;
            }
        }
        w
    }
}

fn unit(d: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[k] = 1.0;
    v
}

/// Pointwise `B(α ∧ β)` with shuffle signs.
pub fn wedge_at(bil: &Bilinear, a: &FormJet, b: &FormJet) -> Result<FormJet> {
    let n = a.n;
    if a.degree + b.degree > n {
        return Err(Error::DegreeOverflow {
            degree: a.degree + b.degree,
            dim: n,
        });
    }
    let order = a.order.min(b.order);
    let mut out = FormJet::zeros(n, a.degree + b.degree, bil.out, order);
    for (ci, &mi) in multi_indices(n, a.degree).iter().enumerate() {
        for (cj, &mj) in multi_indices(n, b.degree).iter().enumerate() {
            if mi & mj != 0 {
                continue;
            }
            let sign = shuffle_sign(mi, mj);
            let co = mask_position(n, mi | mj);
            for (i, j, outs) in &bil.terms {
                let p = Jet::product(a.get(ci, *i), b.get(cj, *j), n, order);
                for (k, c) in outs {
                    out.get_mut(co, *k).add_scaled(&p, sign * c, n, order);
                }
            }
        }
    }
    Ok(out)
}

/// Sparse constant linear map on value spaces: `(out, in, coefficient)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub out_dim: usize,
    pub in_dim: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl LinearMap {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != 0.0 {
                    entries.push((r, c, m[(r, c)]));
                }
            }
        }
        Self {
            out_dim: m.nrows(),
            in_dim: m.ncols(),
            entries,
        }
    }

    /// Builds the map from its action on the input basis.
    pub fn from_basis_fn<F>(in_dim: usize, out_dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize) -> Result<Vec<f64>>,
    {
        let mut m = DMatrix::zeros(out_dim, in_dim);
        for c in 0..in_dim {
            let col = f(c)?;
            if col.len() != out_dim {
                return Err(Error::DimensionMismatch {
                    expected: out_dim,
                    found: col.len(),
                });
            }
            for (r, v) in col.into_iter().enumerate() {
                m[(r, c)] = v;
            }
        }
        Ok(Self::from_matrix(&m))
    }

    pub fn apply_at(&self, f: &FormJet) -> FormJet {
        let mut out = FormJet::zeros(f.n, f.degree, self.out_dim, f.order);
        for comp in 0..f.ncomp() {
            for &(r, c, v) in &self.entries {
                let src = *f.get(comp, c);
                out.get_mut(comp, r).add_scaled(&src, v, f.n, f.order);
            }
        }
        out
    }
}

type EvalFn = dyn Fn(&[f64], u8) -> Result<FormJet> + Send + Sync;

/// A `space`-valued differential form of fixed degree on a chart.
///
/// Evaluation produces jets of every coefficient at a point. `jet_order`
/// records how many derivative levels the evaluator can supply: forms built
/// from [`Jet2Scalar`] coefficients carry 2-jets, each exterior derivative
/// consumes one level.
#[derive(Clone)]
pub struct ValuedForm {
    chart: Chart,
    degree: usize,
    space: ValueSpace,
    jet_order: u8,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for ValuedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValuedForm")
            .field("chart", &self.chart)
            .field("degree", &self.degree)
            .field("space", &self.space)
            .field("jet_order", &self.jet_order)
            .finish()
    }
}

impl ValuedForm {
    /// Wraps a pointwise evaluator. The evaluator receives a point and the
    /// requested order (never above `jet_order`).
    pub fn from_evaluator<F>(
        chart: Chart,
        degree: usize,
        space: ValueSpace,
        jet_order: u8,
        eval: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64], u8) -> Result<FormJet> + Send + Sync + 'static,
    {
        if degree > chart.dim() {
            return Err(Error::DegreeOverflow {
                degree,
                dim: chart.dim(),
            });
        }
        Ok(Self {
            chart,
            degree,
            space,
            jet_order: jet_order.min(2),
            eval: Arc::new(eval),
        })
    }

    /// One [`Jet2Scalar`] per component per basis element, component-major.
    pub fn from_coeffs(
        chart: Chart,
        degree: usize,
        space: ValueSpace,
        coeffs: Vec<Jet2Scalar>,
    ) -> Result<Self> {
        let n = chart.dim();
        if degree > n {
            return Err(Error::DegreeOverflow { degree, dim: n });
        }
        let expected = multi_indices(n, degree).len() * space.dim();
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        let dim = space.dim();
        Self::from_evaluator(chart, degree, space, 2, move |x, order| {
            let mut out = FormJet::zeros(n, degree, dim, order);
            for (slot, c) in out.coeffs.iter_mut().zip(&coeffs) {
                *slot = c.eval(x, order);
            }
            Ok(out)
        })
    }

    pub fn constant(
        chart: Chart,
        degree: usize,
        space: ValueSpace,
        values: Vec<f64>,
    ) -> Result<Self> {
        let coeffs = values.into_iter().map(Jet2Scalar::constant).collect();
        Self::from_coeffs(chart, degree, space, coeffs)
    }

    pub fn zero(chart: Chart, degree: usize, space: ValueSpace) -> Result<Self> {
        let n = chart.dim();
        if degree > n {
            return Err(Error::DegreeOverflow { degree, dim: n });
        }
        let dim = space.dim();
        Self::from_evaluator(chart, degree, space, 2, move |_, order| {
            Ok(FormJet::zeros(n, degree, dim, order))
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn space(&self) -> ValueSpace {
        self.space
    }

    pub fn jet_order(&self) -> u8 {
        self.jet_order
    }

    pub fn eval(&self, x: &[f64], order: u8) -> Result<FormJet> {
        if x.len() != self.chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.chart.dim(),
                found: x.len(),
            });
        }
        if order > self.jet_order {
            return Err(Error::JetExhausted);
        }
        (self.eval)(x, order)
    }

    /// Coefficient values at `x`.
    pub fn values(&self, x: &[f64]) -> Result<FormJet> {
        self.eval(x, 0)
    }

    /// Largest coefficient magnitude over a set of points.
    pub fn sup_norm(&self, points: &[Vec<f64>]) -> Result<f64> {
        let mut m = 0.0f64;
        for x in points {
            m = m.max(self.values(x)?.value_max_abs());
        }
        Ok(m)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.chart != other.chart {
            return Err(Error::InvalidChart("forms live on different charts".into()));
        }
        if self.degree != other.degree {
            return Err(Error::WrongDegree {
                expected: self.degree,
                found: other.degree,
            });
        }
        if self.space != other.space {
            return Err(Error::SpaceMismatch(format!(
                "{:?} vs {:?}",
                self.space, other.space
            )));
        }
        Ok(())
    }

    /// `a · self + b · other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let (f, g) = (self.clone(), other.clone());
        let order = self.jet_order.min(other.jet_order);
        Self::from_evaluator(
            self.chart.clone(),
            self.degree,
            self.space,
            order,
            move |x, r| {
                let mut out = f.eval(x, r)?;
                for c in out.coeffs.iter_mut() {
                    *c = c.scaled(a, x.len(), r);
                }
                out.add_scaled(&g.eval(x, r)?, b);
                Ok(out)
            },
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        let f = self.clone();
        Self::from_evaluator(
            self.chart.clone(),
            self.degree,
            self.space,
            self.jet_order,
            move |x, r| {
                let mut out = f.eval(x, r)?;
                for j in out.coeffs.iter_mut() {
                    *j = j.scaled(c, x.len(), r);
                }
                Ok(out)
            },
        )
        .expect("degree already validated")
    }

    /// Applies a constant linear map to the values, landing in `out_space`.
    pub fn map_linear(&self, out_space: ValueSpace, map: &LinearMap) -> Result<Self> {
        if map.in_dim != self.space.dim() || map.out_dim != out_space.dim() {
            return Err(Error::SpaceMismatch(format!(
                "linear map {}→{} does not fit {:?}→{:?}",
                map.in_dim, map.out_dim, self.space, out_space
            )));
        }
        let f = self.clone();
        let map = map.clone();
        Self::from_evaluator(
            self.chart.clone(),
            self.degree,
            out_space,
            self.jet_order,
            move |x, r| Ok(map.apply_at(&f.eval(x, r)?)),
        )
    }
}

/// Exterior derivative.
pub fn ext_d(alpha: &ValuedForm) -> Result<ValuedForm> {
    let n = alpha.chart.dim();
    if alpha.degree >= n {
        return Err(Error::DegreeOverflow {
            degree: alpha.degree + 1,
            dim: n,
        });
    }
    if alpha.jet_order == 0 {
        return Err(Error::JetExhausted);
    }
    let f = alpha.clone();
    ValuedForm::from_evaluator(
        alpha.chart.clone(),
        alpha.degree + 1,
        alpha.space,
        alpha.jet_order - 1,
        move |x, r| ext_d_at(&f.eval(x, r + 1)?),
    )
}

/// `B(α ∧ β)` for an arbitrary bilinear map `B`.
pub fn wedge_bilinear(
    bil: Arc<Bilinear>,
    out_space: ValueSpace,
    alpha: &ValuedForm,
    beta: &ValuedForm,
) -> Result<ValuedForm> {
    if alpha.chart != beta.chart {
        return Err(Error::InvalidChart("forms live on different charts".into()));
    }
    if bil.left != alpha.space.dim() || bil.right != beta.space.dim() || bil.out != out_space.dim()
    {
        return Err(Error::SpaceMismatch(format!(
            "bilinear map does not fit {:?} × {:?} → {:?}",
            alpha.space, beta.space, out_space
        )));
    }
    let n = alpha.chart.dim();
    if alpha.degree + beta.degree > n {
        return Err(Error::DegreeOverflow {
            degree: alpha.degree + beta.degree,
            dim: n,
        });
    }
    let (a, b) = (alpha.clone(), beta.clone());
    ValuedForm::from_evaluator(
        alpha.chart.clone(),
        alpha.degree + beta.degree,
        out_space,
        alpha.jet_order.min(beta.jet_order),
        move |x, r| wedge_at(&bil, &a.eval(x, r)?, &b.eval(x, r)?),
    )
}

/// `⟨α ∧ β⟩` for the pairing `pk`.
pub fn wedge_pair(
    pk: PairingKind,
    sig: &Signature,
    alpha: &ValuedForm,
    beta: &ValuedForm,
) -> Result<ValuedForm> {
    if alpha.space != beta.space {
        return Err(Error::SpaceMismatch(format!(
            "{:?} vs {:?}",
            alpha.space, beta.space
        )));
    }
    let bil = Arc::new(Bilinear::pairing(pk, sig, alpha.space)?);
    wedge_bilinear(bil, ValueSpace::Scalar, alpha, beta)
}

/// `[α ∧ β]` for the Lie bracket of the common value algebra.
pub fn wedge_bracket(alpha: &ValuedForm, beta: &ValuedForm) -> Result<ValuedForm> {
    if alpha.space != beta.space {
        return Err(Error::SpaceMismatch(format!(
            "{:?} vs {:?}",
            alpha.space, beta.space
        )));
    }
    let bil = Arc::new(Bilinear::bracket(alpha.space)?);
    wedge_bilinear(bil, alpha.space, alpha, beta)
}

/// `α_x(v_1, …, v_p) = Σ_I α_I(x) det(v_a^{i_b})`.
pub fn eval_form(alpha: &ValuedForm, x: &[f64], vectors: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = alpha.chart.dim();
    if vectors.len() != alpha.degree {
        return Err(Error::DimensionMismatch {
            expected: alpha.degree,
            found: vectors.len(),
        });
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let vals = alpha.values(x)?;
    let p = alpha.degree;
    let mut out = vec![0.0; alpha.space.dim()];
    // Evaluate on a canonical ordering of the arguments so that permuting
    // them changes the result by exactly the permutation sign.
    let mut order: Vec<usize> = (0..p).collect();
    let cmp = |a: &usize, b: &usize| {
        vectors[*a]
            .iter()
            .zip(&vectors[*b])
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    order.sort_by(cmp);
    if order.windows(2).any(|w| cmp(&w[0], &w[1]).is_eq()) {
        return Ok(out);
    }
    let sign = permutation_sign(&order);
    for (ci, &mask) in multi_indices(n, p).iter().enumerate() {
        let idx = mask_indices(mask);
        let det = if p == 0 {
            1.0
        } else {
            DMatrix::from_fn(p, p, |a, b| vectors[order[a]][idx[b]]).determinant()
        };
        for (b, o) in out.iter_mut().enumerate() {
            *o += vals.value(ci, b) * det;
        }
    }
    for o in out.iter_mut() {
        *o *= sign;
    }
    Ok(out)
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
