//! Measured residuals of the identity suite. Every function returns the
//! quantity a check compares against its tolerance.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use csgrav::algebra::{self, AffElt, PairingKind, Signature, EXP_TOL};
use csgrav::gauge::{
    chern_weil_form, cs_form, curvature, gauge_defect, gauge_transform, transgression_form,
    wzw_form, GaugeMap, GaugePotential,
};
use csgrav::gravity::{
    metricity_residual, p_projector, reduce_connection, spin_curvature, torsion, witten_lift,
    GravSection,
};
use csgrav::jetfields::{
    ext_d, integrate_abs, integrate_top, wedge_bracket, wedge_pair, Chart, QuadratureGrid,
    ValueSpace, ValuedForm,
};
use csgrav::sampling::{
    random_form, random_k_form, random_k_translation_form, random_section, TrigParams,
};
use csgrav::Result;

use crate::spec::FieldSpec;

pub const SPACES: [ValueSpace; 2] = [ValueSpace::Gl(3), ValueSpace::Aff(3)];

pub fn pairing_for(space: ValueSpace) -> PairingKind {
    match space {
        ValueSpace::Aff(_) => PairingKind::Aff3,
        _ => PairingKind::GlEta,
    }
}

/// Field generator driven by a [`FieldSpec`]. `flat` yields zero
/// potentials, identity gauge maps and the flat section.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGen {
    params: Option<TrigParams>,
    p_contamination: f64,
}

impl FieldGen {
    pub fn new(spec: &FieldSpec) -> Self {
        match *spec {
            FieldSpec::Flat => Self {
                params: None,
                p_contamination: 0.0,
            },
            FieldSpec::TrigRandom {
                max_frequency,
                amplitude,
                p_contamination,
            } => Self {
                params: Some(TrigParams {
                    max_frequency: max_frequency as i64,
                    terms: 3,
                    amplitude,
                }),
                p_contamination,
            },
            FieldSpec::PerturbedFlat { magnitude } => Self {
                params: Some(TrigParams {
                    max_frequency: 1,
                    terms: 3,
                    amplitude: magnitude,
                }),
                p_contamination: 0.0,
            },
        }
    }

    pub fn is_flat(&self) -> bool {
        self.params.is_none()
    }

    /// Arbitrary form, or zero.
    pub fn form(
        &self,
        chart: &Chart,
        degree: usize,
        space: ValueSpace,
        rng: &mut ChaCha8Rng,
    ) -> Result<ValuedForm> {
        match &self.params {
            None => ValuedForm::zero(chart.clone(), degree, space),
            Some(p) => random_form(chart, degree, space, p, rng),
        }
    }

    /// Algebra-valued form; `restricted` keeps it in `k` (GL) or `k ⊕ R^3`
    /// (AFF) where the pairings are invariant.
    pub fn algebra_form(
        &self,
        chart: &Chart,
        degree: usize,
        space: ValueSpace,
        restricted: bool,
        sig: &Signature,
        rng: &mut ChaCha8Rng,
    ) -> Result<ValuedForm> {
        let Some(p) = &self.params else {
            return ValuedForm::zero(chart.clone(), degree, space);
        };
        match (space, restricted) {
            (ValueSpace::Gl(3), true) => random_k_form(chart, degree, sig, p, rng),
            (ValueSpace::Aff(3), true) => random_k_translation_form(chart, degree, sig, p, rng),
            _ => random_form(chart, degree, space, p, rng),
        }
    }

    pub fn potential(
        &self,
        chart: &Chart,
        space: ValueSpace,
        restricted: bool,
        sig: &Signature,
        rng: &mut ChaCha8Rng,
    ) -> Result<GaugePotential> {
        GaugePotential::new(self.algebra_form(chart, 1, space, restricted, sig, rng)?)
    }

    pub fn gauge_map(
        &self,
        chart: &Chart,
        space: ValueSpace,
        restricted: bool,
        sig: &Signature,
        rng: &mut ChaCha8Rng,
    ) -> Result<GaugeMap> {
        if self.is_flat() {
            return GaugeMap::identity(chart.clone(), space);
        }
        GaugeMap::exp(self.algebra_form(chart, 0, space, restricted, sig, rng)?)
    }

    /// Section with coframe perturbation a quarter of the connection
    /// amplitude. A positive `p_contamination` adds a `p`-valued part to
    /// the connection even when `admissible` is requested.
    pub fn section(
        &self,
        chart: &Chart,
        sig: &Signature,
        admissible: bool,
        rng: &mut ChaCha8Rng,
    ) -> Result<GravSection> {
        let Some(p) = &self.params else {
            return GravSection::flat(chart.clone());
        };
        let s = random_section(chart, sig, p, p.amplitude / 4.0, admissible, rng)?;
        if self.p_contamination == 0.0 {
            return Ok(s);
        }
        let noise = TrigParams {
            amplitude: self.p_contamination,
            ..*p
        };
        let extra = random_form(chart, 1, ValueSpace::Gl(3), &noise, rng)?
            .map_linear(ValueSpace::Gl(3), &p_projector(sig)?)?;
        GravSection::new(s.theta().clone(), s.omega().add(&extra)?)
    }
}

pub fn random_points(chart: &Chart, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let (lower, extent) = chart.extent();
    (0..count)
        .map(|_| {
            (0..chart.dim())
                .map(|a| lower[a] + extent[a] * rng.gen::<f64>())
                .collect()
        })
        .collect()
}

pub fn sup(form: &ValuedForm, points: &[Vec<f64>]) -> Result<f64> {
    form.sup_norm(points)
}

fn random_matrix(rng: &mut ChaCha8Rng, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-scale..scale))
}

fn random_vector(rng: &mut ChaCha8Rng, scale: f64) -> DVector<f64> {
    DVector::from_fn(3, |_, _| rng.gen_range(-scale..scale))
}

fn random_k(sig: &Signature, rng: &mut ChaCha8Rng, scale: f64) -> Result<DMatrix<f64>> {
    let xi: Vec<f64> = (0..3).map(|_| rng.gen_range(-scale..scale)).collect();
    algebra::iso_k_r3(&xi, sig)
}

/// Largest violation over `n` random matrices of `k + p = a`, idempotence,
/// and `k ∈ k`, `p ∈ p` (checked through the `η`-adjoint).
pub fn projector_residual(sig: &Signature, n: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let eta = sig.eta();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let a = random_matrix(rng, 1.0);
        let (k, p) = algebra::project_kp(&a, sig)?;
        let (kk, kp) = algebra::project_kp(&k, sig)?;
        let (pk, pp) = algebra::project_kp(&p, sig)?;
        let adj = |m: &DMatrix<f64>| &eta * m.transpose() * &eta;
        for r in [
            (&k + &p - &a).amax(),
            (kk - &k).amax(),
            kp.amax(),
            pk.amax(),
            (pp - &p).amax(),
            (adj(&k) + &k).amax(),
            (adj(&p) - &p).amax(),
        ] {
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// Relative `K`-invariance residual of the `gl(3)` pairing: group action
/// `g a g⁻¹` with `g = exp(k)`, and the infinitesimal form
/// `⟨[x, a], b⟩ + ⟨a, [x, b]⟩` for `x ∈ k`.
pub fn pairing_invariance_gl(sig: &Signature, n: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let x = random_k(sig, rng, 1.0)?;
        let g = algebra::expm(&x, EXP_TOL);
        let g_inv = g
            .clone()
            .try_inverse()
            .expect("exponentials are invertible");
        let a = random_matrix(rng, 1.0);
        let b = random_matrix(rng, 1.0);
        let base = algebra::pair_gl(&a, &b, sig)?;
        let moved = algebra::pair_gl(&(&g * &a * &g_inv), &(&g * &b * &g_inv), sig)?;
        let infinitesimal = algebra::pair_gl(&algebra::bracket_gl(&x, &a)?, &b, sig)?
            + algebra::pair_gl(&a, &algebra::bracket_gl(&x, &b)?, sig)?;
        let scale = 1f64.max(a.norm() * b.norm());
        worst = worst
            .max((moved - base).abs() / scale)
            .max(infinitesimal.abs() / scale);
    }
    Ok(worst)
}

/// Relative invariance residual of the affine pairing on `k ⊕ R^3` under
/// `exp(k ⊕ R^3)`.
pub fn pairing_invariance_aff(sig: &Signature, n: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let gen = AffElt::new(random_k(sig, rng, 1.0)?, random_vector(rng, 1.0))?;
        let g = algebra::exp_aff(&gen, EXP_TOL);
        let a = AffElt::new(random_k(sig, rng, 1.0)?, random_vector(rng, 1.0))?;
        let b = AffElt::new(random_k(sig, rng, 1.0)?, random_vector(rng, 1.0))?;
        let base = algebra::pair_aff(&a, &b, sig)?;
        let moved = algebra::pair_aff(
            &algebra::adjoint_aff(&g, &a)?,
            &algebra::adjoint_aff(&g, &b)?,
            sig,
        )?;
        let infinitesimal = algebra::pair_aff(&algebra::bracket_aff(&gen, &a)?, &b, sig)?
            + algebra::pair_aff(&a, &algebra::bracket_aff(&gen, &b)?, sig)?;
        let scale = 1f64.max(a.norm() * b.norm());
        worst = worst
            .max((moved - base).abs() / scale)
            .max(infinitesimal.abs() / scale);
    }
    Ok(worst)
}

pub fn gram_det(pk: PairingKind, sig: &Signature) -> Result<f64> {
    Ok(algebra::gram(pk, sig)?.determinant().abs())
}

/// `sup |d d α|` over forms of every degree up to `n − 2`.
pub fn d_squared(
    gen: &FieldGen,
    chart: &Chart,
    points: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in 0..=chart.dim() - 2 {
        let a = gen.form(chart, p, ValueSpace::Gl(3), rng)?;
        worst = worst.max(sup(&ext_d(&ext_d(&a)?)?, points)?);
    }
    Ok(worst)
}

/// Relative graded Leibniz residual for the pairing and bracket wedges.
pub fn leibniz(
    gen: &FieldGen,
    chart: &Chart,
    sig: &Signature,
    points: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (p, q) in [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0), (1, 2)] {
        if p + q + 1 > chart.dim() {
            continue;
        }
        let a = gen.form(chart, p, ValueSpace::Gl(3), rng)?;
        let b = gen.form(chart, q, ValueSpace::Gl(3), rng)?;
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let (da, db) = (ext_d(&a)?, ext_d(&b)?);
        let pair = |x: &ValuedForm, y: &ValuedForm| wedge_pair(PairingKind::GlEta, sig, x, y);
        let lhs = ext_d(&pair(&a, &b)?)?;
        let rhs = pair(&da, &b)?.combine(1.0, &pair(&a, &db)?, sign)?;
        worst = worst.max(sup(&lhs.sub(&rhs)?, points)? / (1.0 + sup(&lhs, points)?));
        let lhs = ext_d(&wedge_bracket(&a, &b)?)?;
        let rhs = wedge_bracket(&da, &b)?.combine(1.0, &wedge_bracket(&a, &db)?, sign)?;
        worst = worst.max(sup(&lhs.sub(&rhs)?, points)? / (1.0 + sup(&lhs, points)?));
    }
    Ok(worst)
}

/// `sup |dF + [A ∧ F]|` for an unrestricted potential in `space`.
pub fn bianchi(
    gen: &FieldGen,
    chart: &Chart,
    space: ValueSpace,
    sig: &Signature,
    points: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let a = gen.potential(chart, space, false, sig, rng)?;
    let f = curvature(&a)?;
    sup(&ext_d(&f)?.add(&wedge_bracket(a.form(), &f)?)?, points)
}

pub fn cs_transgression(
    gen: &FieldGen,
    chart: &Chart,
    space: ValueSpace,
    sig: &Signature,
    points: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let a = gen.potential(chart, space, false, sig, rng)?;
    let pk = pairing_for(space);
    sup(
        &cs_form(&a, pk, sig)?.sub(&transgression_form(&a, pk, sig)?)?,
        points,
    )
}

/// Pointwise sup of the gauge defect and its integral relative to
/// `∫ |cs(A)|`.
pub fn gauge_defect_residuals(
    gen: &FieldGen,
    chart: &Chart,
    space: ValueSpace,
    sig: &Signature,
    points: &[Vec<f64>],
    grid: &QuadratureGrid,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64)> {
    let pk = pairing_for(space);
    let a = gen.potential(chart, space, true, sig, rng)?;
    let g = gen.gauge_map(chart, space, true, sig, rng)?;
    let defect = gauge_defect(&a, &g, pk, sig)?;
    let pointwise = sup(&defect, points)?;
    let scale = 1f64.max(integrate_abs(&cs_form(&a, pk, sig)?, grid)?);
    Ok((pointwise, integrate_top(&defect, grid)?.abs() / scale))
}

/// `sup |d wzw(g)|` on a 4-chart.
pub fn wzw_closed(
    gen: &FieldGen,
    chart4: &Chart,
    space: ValueSpace,
    sig: &Signature,
    points: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let g = gen.gauge_map(chart4, space, true, sig, rng)?;
    sup(&ext_d(&wzw_form(&g, pairing_for(space), sig)?)?, points)
}

/// Metricity over `count` sections, alternating admissible and not:
/// the largest residual of `θ(∇ζ)θᵀ = 2 π_p(ω) η` and the number of
/// sections where `π_p(ω) = 0` and `∇ζ = 0` disagree.
pub fn metricity(
    gen: &FieldGen,
    chart: &Chart,
    sig: &Signature,
    points: &[Vec<f64>],
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, usize)> {
    let eta = sig.eta();
    let mut worst: f64 = 0.0;
    let mut mismatches = 0;
    for k in 0..count {
        let s = gen.section(chart, sig, k % 2 == 0, rng)?;
        let m = metricity_residual(&s, sig)?;
        for x in points {
            let (p, n) = (m.p_part.values(x)?, m.nabla.values(x)?);
            for mu in 0..3 {
                let pm = DMatrix::from_row_slice(3, 3, &p.component_values(mu));
                let nm = DMatrix::from_row_slice(3, 3, &n.component_values(mu));
                worst = worst.max((nm - &pm * &eta * 2.0).amax());
            }
        }
        let p_zero = sup(&m.p_part, points)? <= 1e-12;
        let n_zero = sup(&m.nabla, points)? <= 1e-10;
        if p_zero != n_zero {
            mismatches += 1;
        }
    }
    Ok((worst, mismatches))
}

/// `sup` of the difference between the lifted curvature and
/// `(Ω(ω), Θ(θ, ω))`.
pub fn witten_split(
    gen: &FieldGen,
    chart: &Chart,
    sig: &Signature,
    points: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let s = gen.section(chart, sig, false, rng)?;
    let f = curvature(&witten_lift(&s)?)?;
    let (om, th) = (spin_curvature(&s)?, torsion(&s)?);
    let mut worst: f64 = 0.0;
    for x in points {
        let (fv, ov, tv) = (f.values(x)?, om.values(x)?, th.values(x)?);
        for c in 0..3 {
            for b in 0..9 {
                worst = worst.max((fv.value(c, b) - ov.value(c, b)).abs());
            }
            for i in 0..3 {
                worst = worst.max((fv.value(c, 9 + i) - tv.value(c, i)).abs());
            }
        }
    }
    Ok(worst)
}

/// `sup |d cs(A) − ⟨F ∧ F⟩|` on a 4-chart and the two integrals
/// `(∫ ⟨F∧F⟩, ∫ |⟨F∧F⟩|)`.
pub fn chern_weil(
    a: &GaugePotential,
    sig: &Signature,
    points: &[Vec<f64>],
    grid: &QuadratureGrid,
) -> Result<(f64, f64, f64)> {
    let pk = pairing_for(a.space());
    let cw = chern_weil_form(a, pk, sig)?;
    let dcs = ext_d(&cs_form(a, pk, sig)?)?;
    let pointwise = sup(&dcs.sub(&cw)?, points)?;
    Ok((
        pointwise,
        integrate_top(&cw, grid)?,
        integrate_abs(&cw, grid)?,
    ))
}

/// `|∫ cs(A^g) − ∫ cs(A)| / max(1, ∫ |cs(A)|)` for a gauge map homotopic
/// to the identity.
pub fn action_gauge_invariance(
    gen: &FieldGen,
    chart: &Chart,
    space: ValueSpace,
    sig: &Signature,
    grid: &QuadratureGrid,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let pk = pairing_for(space);
    let a = gen.potential(chart, space, true, sig, rng)?;
    let g = gen.gauge_map(chart, space, true, sig, rng)?;
    let cs = cs_form(&a, pk, sig)?;
    let moved = integrate_top(&cs_form(&gauge_transform(&a, &g)?, pk, sig)?, grid)?;
    Ok((moved - integrate_top(&cs, grid)?).abs() / 1f64.max(integrate_abs(&cs, grid)?))
}

/// Largest `sup |lift(reduce(lift(s))) − lift(s)|` over `count`
/// admissible sections, plus the number not recognized as reducible.
pub fn witten_roundtrip(
    gen: &FieldGen,
    chart: &Chart,
    sig: &Signature,
    points: &[Vec<f64>],
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    let mut rejected = 0;
    for _ in 0..count {
        let a = witten_lift(&gen.section(chart, sig, true, rng)?)?;
        let red = reduce_connection(&a, sig, 1e-12, points)?;
        if !red.reducible {
            rejected += 1;
            continue;
        }
        let back = witten_lift(&red.section()?)?;
        worst = worst.max(sup(&back.form().sub(a.form())?, points)?);
    }
    Ok((worst, rejected))
}
