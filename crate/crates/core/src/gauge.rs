//! Connection potentials, gauge maps and the Chern–Simons family of forms.
//!
//! Gauge maps act on the right: a potential `A` transforms under
//! `g: U → G` as `A ↦ Ad_{g⁻¹} A + g⁻¹ dg`.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::algebra::{self, AffElt, PairingKind, Signature, EXP_TOL};
use crate::error::{Error, Result};
use crate::jetfields::{
    ext_d, ext_d_at, wedge_at, wedge_pair, Bilinear, Chart, FormJet, ValueSpace, ValuedForm,
};

/// Largest number of series terms before giving up.
pub const MAX_SERIES_TERMS: usize = 64;

/// A degree-1 form valued in `gl(m)` or `a(m)`.
#[derive(Debug, Clone)]
pub struct GaugePotential {
    form: ValuedForm,
}

impl GaugePotential {
    pub fn new(form: ValuedForm) -> Result<Self> {
        if form.degree() != 1 {
            return Err(Error::WrongDegree {
                expected: 1,
                found: form.degree(),
            });
        }
        if !form.space().is_algebra() {
            return Err(Error::SpaceMismatch(format!(
                "potential must be Lie algebra valued, found {:?}",
                form.space()
            )));
        }
        Ok(Self { form })
    }

    pub fn zero(chart: Chart, space: ValueSpace) -> Result<Self> {
        Self::new(ValuedForm::zero(chart, 1, space)?)
    }

    pub fn form(&self) -> &ValuedForm {
        &self.form
    }

    pub fn into_form(self) -> ValuedForm {
        self.form
    }

    pub fn space(&self) -> ValueSpace {
        self.form.space()
    }

    pub fn chart(&self) -> &Chart {
        self.form.chart()
    }
}

/// A group-valued map `g = exp(χ_1) exp(χ_2) ⋯ exp(χ_k)` given by Lie
/// algebra valued 0-forms. The empty product is the identity.
#[derive(Debug, Clone)]
pub struct GaugeMap {
    chart: Chart,
    space: ValueSpace,
    generators: Vec<ValuedForm>,
    bracket: Arc<Bilinear>,
}

impl GaugeMap {
    pub fn identity(chart: Chart, space: ValueSpace) -> Result<Self> {
        let bracket = Arc::new(Bilinear::bracket(space)?);
        Ok(Self {
            chart,
            space,
            generators: Vec::new(),
            bracket,
        })
    }

    /// `g = exp(χ)`.
    pub fn exp(chi: ValuedForm) -> Result<Self> {
        if chi.degree() != 0 {
            return Err(Error::WrongDegree {
                expected: 0,
                found: chi.degree(),
            });
        }
        let mut g = Self::identity(chi.chart().clone(), chi.space())?;
        g.generators.push(chi);
        Ok(g)
    }

    /// The pointwise product `self · other`.
    pub fn compose(&self, other: &GaugeMap) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(format!(
                "{:?} vs {:?}",
                self.space, other.space
            )));
        }
        if self.chart != other.chart {
            return Err(Error::InvalidChart(
                "gauge maps live on different charts".into(),
            ));
        }
        let mut g = self.clone();
        g.generators.extend(other.generators.iter().cloned());
        Ok(g)
    }

    pub fn space(&self) -> ValueSpace {
        self.space
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn generators(&self) -> &[ValuedForm] {
        &self.generators
    }

    /// Jet order available for the Maurer–Cartan form.
    fn mc_order(&self) -> u8 {
        self.generators
            .iter()
            .map(|c| c.jet_order())
            .min()
            .unwrap_or(3)
            .saturating_sub(1)
            .min(2)
    }

    fn adjoint_order(&self) -> u8 {
        self.generators
            .iter()
            .map(|c| c.jet_order())
            .min()
            .unwrap_or(2)
    }

    /// Group element at `x` as a matrix: `m × m` for `gl(m)`, the
    /// `(m+1) × (m+1)` block form for `a(m)`.
    pub fn value(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let size = match self.space {
            ValueSpace::Gl(m) => m,
            ValueSpace::Aff(m) => m + 1,
            _ => unreachable!("gauge maps are algebra valued"),
        };
        let mut g = DMatrix::identity(size, size);
        for chi in &self.generators {
            let v = chi.values(x)?.component_values(0);
            let block = match self.space {
                ValueSpace::Gl(m) => DMatrix::from_row_slice(m, m, &v),
                ValueSpace::Aff(m) => AffElt::from_coords(m, &v)?.to_block(),
                _ => unreachable!(),
            };
            g *= algebra::expm(&block, EXP_TOL);
        }
        Ok(g)
    }
}

/// `Σ_k (−ad_χ)^k X / (d(1) ⋯ d(k))` on jets, summed until a term drops
/// below [`EXP_TOL`].
fn ad_series(
    bracket: &Bilinear,
    chi: &FormJet,
    x: FormJet,
    divisor: impl Fn(usize) -> f64,
) -> Result<FormJet> {
    let mut sum = x.clone();
    let mut term = x;
    for k in 1..=MAX_SERIES_TERMS + 1 {
        if term.max_abs() < EXP_TOL {
            return Ok(sum);
        }
        if k > MAX_SERIES_TERMS {
            break;
        }
        let next = scaled(wedge_at(bracket, chi, &term)?, -1.0 / divisor(k));
        sum.add_scaled(&next, 1.0);
        term = next;
    }
    Err(Error::SeriesNonTermination(MAX_SERIES_TERMS))
}

/// `Ad_{exp(−χ)} X = Σ_k (−ad_χ)^k X / k!`.
fn adjoint_exp_neg_at(bracket: &Bilinear, chi: &FormJet, x: FormJet) -> Result<FormJet> {
    ad_series(bracket, chi, x, |k| k as f64)
}

/// `exp(−χ) d exp(χ) = Σ_k (−ad_χ)^k dχ / (k+1)!`, from a jet of `χ` one
/// order above the requested output.
fn mc_exp_at(bracket: &Bilinear, chi: &FormJet) -> Result<FormJet> {
    let dchi = ext_d_at(chi)?;
    ad_series(bracket, chi, dchi, |k| (k + 1) as f64)
}

fn adjoint_inv_at(g: &GaugeMap, x: &[f64], value: FormJet, order: u8) -> Result<FormJet> {
    let mut out = value;
    for chi in &g.generators {
        let c = chi.eval(x, order)?;
        out = adjoint_exp_neg_at(&g.bracket, &c, out)?;
    }
    Ok(out)
}

fn check_space(space: ValueSpace, g: &GaugeMap) -> Result<()> {
    if space != g.space {
        return Err(Error::SpaceMismatch(format!(
            "form valued in {:?}, gauge map in {:?}",
            space, g.space
        )));
    }
    Ok(())
}

/// `Ad_{g⁻¹} α` for a form of any degree valued in the algebra of `g`.
pub fn adjoint_inverse(g: &GaugeMap, alpha: &ValuedForm) -> Result<ValuedForm> {
    check_space(alpha.space(), g)?;
    if alpha.chart() != g.chart() {
        return Err(Error::InvalidChart(
            "form and gauge map live on different charts".into(),
        ));
    }
    let (gg, a) = (g.clone(), alpha.clone());
    let order = alpha.jet_order().min(g.adjoint_order());
    ValuedForm::from_evaluator(
        alpha.chart().clone(),
        alpha.degree(),
        alpha.space(),
        order,
        move |x, r| adjoint_inv_at(&gg, x, a.eval(x, r)?, r),
    )
}

fn scaled(mut f: FormJet, c: f64) -> FormJet {
    let (n, order) = (f.n, f.order);
    for j in f.coeffs.iter_mut() {
        *j = j.scaled(c, n, order);
    }
    f
}

/// `dA + c [A ∧ A]` from a jet of `A` one order above the output.
fn d_plus_bracket_at(bracket: &Bilinear, a: &FormJet, c: f64) -> Result<FormJet> {
    let mut out = ext_d_at(a)?;
    out.add_scaled(&wedge_at(bracket, a, a)?, c);
    Ok(out)
}

fn derived_order(form: &ValuedForm) -> Result<u8> {
    form.jet_order().checked_sub(1).ok_or(Error::JetExhausted)
}

/// `F = dA + ½ [A ∧ A]`.
pub fn curvature(a: &GaugePotential) -> Result<ValuedForm> {
    let n = a.chart().dim();
    if n < 2 {
        return Err(Error::DegreeOverflow { degree: 2, dim: n });
    }
    let bracket = Bilinear::bracket(a.space())?;
    let form = a.form.clone();
    ValuedForm::from_evaluator(
        a.chart().clone(),
        2,
        a.space(),
        derived_order(&a.form)?,
        move |x, r| d_plus_bracket_at(&bracket, &form.eval(x, r + 1)?, 0.5),
    )
}

/// The left Maurer–Cartan form `λ_g = g⁻¹ dg`.
pub fn maurer_cartan(g: &GaugeMap) -> Result<GaugePotential> {
    let n = g.chart.dim();
    let dim = g.space.dim();
    let gg = g.clone();
    let form =
        ValuedForm::from_evaluator(g.chart.clone(), 1, g.space, g.mc_order(), move |x, r| {
            // λ_{g₁g₂} = Ad_{g₂⁻¹} λ₁ + λ₂
            let mut lambda = FormJet::zeros(n, 1, dim, r);
            for chi in &gg.generators {
                let c = chi.eval(x, r + 1)?;
                lambda = adjoint_exp_neg_at(&gg.bracket, &c, lambda)?;
                lambda.add_scaled(&mc_exp_at(&gg.bracket, &c)?, 1.0);
            }
            Ok(lambda)
        })?;
    GaugePotential::new(form)
}

/// `A ↦ Ad_{g⁻¹} A + g⁻¹ dg`.
pub fn gauge_transform(a: &GaugePotential, g: &GaugeMap) -> Result<GaugePotential> {
    let rotated = adjoint_inverse(g, &a.form)?;
    let lambda = maurer_cartan(g)?;
    GaugePotential::new(rotated.add(&lambda.form)?)
}

/// The potential seen by the section moved by `g`; the same rule as
/// [`gauge_transform`].
pub fn section_pullback(g: &GaugeMap, a: &GaugePotential) -> Result<GaugePotential> {
    gauge_transform(a, g)
}

fn require_dim3(chart: &Chart) -> Result<()> {
    if chart.dim() < 3 {
        return Err(Error::DegreeOverflow {
            degree: 3,
            dim: chart.dim(),
        });
    }
    Ok(())
}

/// A scalar 3-form computed pointwise from one jet of `A`.
fn cubic_form<F>(
    a: &GaugePotential,
    pk: PairingKind,
    sig: &Signature,
    rule: F,
) -> Result<ValuedForm>
where
    F: Fn(&Bilinear, &Bilinear, &FormJet) -> Result<FormJet> + Send + Sync + 'static,
{
    require_dim3(a.chart())?;
    let pairing = Bilinear::pairing(pk, sig, a.space())?;
    let bracket = Bilinear::bracket(a.space())?;
    let form = a.form.clone();
    ValuedForm::from_evaluator(
        a.chart().clone(),
        3,
        ValueSpace::Scalar,
        derived_order(&a.form)?,
        move |x, r| rule(&pairing, &bracket, &form.eval(x, r + 1)?),
    )
}

/// `⟨A ∧ (dA + ⅓ [A ∧ A])⟩`.
pub fn cs_form(a: &GaugePotential, pk: PairingKind, sig: &Signature) -> Result<ValuedForm> {
    cubic_form(a, pk, sig, |pairing, bracket, a| {
        wedge_at(pairing, a, &d_plus_bracket_at(bracket, a, 1.0 / 3.0)?)
    })
}

/// `⟨A ∧ F⟩ − (1/6) ⟨A ∧ [A ∧ A]⟩`.
pub fn transgression_form(
    a: &GaugePotential,
    pk: PairingKind,
    sig: &Signature,
) -> Result<ValuedForm> {
    cubic_form(a, pk, sig, |pairing, bracket, a| {
        let f = d_plus_bracket_at(bracket, a, 0.5)?;
        let aaa = wedge_at(pairing, a, &wedge_at(bracket, a, a)?)?;
        let mut out = wedge_at(pairing, a, &f)?;
        out.add_scaled(&aaa, -1.0 / 6.0);
        Ok(out)
    })
}

/// `⟨F ∧ F⟩`.
pub fn chern_weil_form(a: &GaugePotential, pk: PairingKind, sig: &Signature) -> Result<ValuedForm> {
    let n = a.chart().dim();
    if n < 4 {
        return Err(Error::DegreeOverflow { degree: 4, dim: n });
    }
    let pairing = Bilinear::pairing(pk, sig, a.space())?;
    let bracket = Bilinear::bracket(a.space())?;
    let form = a.form.clone();
    ValuedForm::from_evaluator(
        a.chart().clone(),
        4,
        ValueSpace::Scalar,
        derived_order(&a.form)?,
        move |x, r| {
            let f = d_plus_bracket_at(&bracket, &form.eval(x, r + 1)?, 0.5)?;
            wedge_at(&pairing, &f, &f)
        },
    )
}

/// `(1/6) ⟨λ_g ∧ [λ_g ∧ λ_g]⟩`.
pub fn wzw_form(g: &GaugeMap, pk: PairingKind, sig: &Signature) -> Result<ValuedForm> {
    require_dim3(g.chart())?;
    let lambda = maurer_cartan(g)?.into_form();
    let pairing = Bilinear::pairing(pk, sig, g.space())?;
    let bracket = Bilinear::bracket(g.space())?;
    ValuedForm::from_evaluator(
        g.chart().clone(),
        3,
        ValueSpace::Scalar,
        lambda.jet_order(),
        move |x, r| {
            let l = lambda.eval(x, r)?;
            Ok(scaled(
                wedge_at(&pairing, &l, &wedge_at(&bracket, &l, &l)?)?,
                1.0 / 6.0,
            ))
        },
    )
}

/// `cs(A') − cs(A) − d⟨Ad_{g⁻¹}A ∧ λ_g⟩ + wzw(g)` with `A'` the gauge
/// transform of `A` by `g`. Vanishes identically.
pub fn gauge_defect(
    a: &GaugePotential,
    g: &GaugeMap,
    pk: PairingKind,
    sig: &Signature,
) -> Result<ValuedForm> {
    let transformed = gauge_transform(a, g)?;
    let cs_new = cs_form(&transformed, pk, sig)?;
    let cs_old = cs_form(a, pk, sig)?;
    let rotated = adjoint_inverse(g, &a.form)?;
    let lambda = maurer_cartan(g)?;
    let exact = ext_d(&wedge_pair(pk, sig, &rotated, &lambda.form)?)?;
    let wzw = wzw_form(g, pk, sig)?;
    cs_new.sub(&cs_old)?.sub(&exact)?.add(&wzw)
}
