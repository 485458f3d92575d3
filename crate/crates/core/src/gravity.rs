//! Frame-bundle sections on a 3-chart: coframes, spin connections, the
//! induced metric, metricity, torsion, the Palatini Lagrangian, and the
//! affine lift relating it to the Chern–Simons Lagrangian.
//!
//! A coframe is an `R^3`-valued 1-form with coefficient `(μ, i) = θ^i_μ`;
//! a spin connection is a `gl(3)`-valued 1-form with coefficient
//! `(μ, j·3 + k) = ω^j_{kμ}`.

use nalgebra::Matrix3;

use crate::algebra::{self, PairingKind, Signature, DET_EPS};
use crate::error::{Error, Result};
use crate::gauge::{cs_form, curvature, GaugePotential};
use crate::jetfields::{
    ext_d_at, pairwise_sum, sample_grid, wedge_at, Bilinear, Chart, FormJet, Jet, LinearMap,
    QuadratureGrid, ValueSpace, ValuedForm,
};

/// Default bound on `sup |π_p(ω)|` for a section to count as admissible.
pub const ADMISSIBILITY_TOL: f64 = 1e-10;

/// A local section: coframe `θ` and connection `ω` on a 3-chart.
#[derive(Debug, Clone)]
pub struct GravSection {
    theta: ValuedForm,
    omega: ValuedForm,
}

impl GravSection {
    pub fn new(theta: ValuedForm, omega: ValuedForm) -> Result<Self> {
        if theta.chart().dim() != 3 {
            return Err(Error::InvalidChart(format!(
                "sections live on 3-charts, found dimension {}",
                theta.chart().dim()
            )));
        }
        if theta.chart() != omega.chart() {
            return Err(Error::InvalidChart(
                "coframe and connection on different charts".into(),
            ));
        }
        for (form, space) in [(&theta, ValueSpace::Vec(3)), (&omega, ValueSpace::Gl(3))] {
            if form.degree() != 1 {
                return Err(Error::WrongDegree {
                    expected: 1,
                    found: form.degree(),
                });
            }
            if form.space() != space {
                return Err(Error::SpaceMismatch(format!(
                    "expected {space:?}, found {:?}",
                    form.space()
                )));
            }
        }
        Ok(Self { theta, omega })
    }

    /// `θ^i = dx^i`, `ω = 0`.
    pub fn flat(chart: Chart) -> Result<Self> {
        let mut id = vec![0.0; 9];
        for i in 0..3 {
            id[i * 3 + i] = 1.0;
        }
        let theta = ValuedForm::constant(chart.clone(), 1, ValueSpace::Vec(3), id)?;
        let omega = ValuedForm::zero(chart, 1, ValueSpace::Gl(3))?;
        Self::new(theta, omega)
    }

    pub fn theta(&self) -> &ValuedForm {
        &self.theta
    }

    pub fn omega(&self) -> &ValuedForm {
        &self.omega
    }

    pub fn chart(&self) -> &Chart {
        self.theta.chart()
    }

    /// Smallest `|det θ^i_μ|` over the points; fails if any is below
    /// [`DET_EPS`].
    pub fn check_coframe(&self, points: &[Vec<f64>]) -> Result<f64> {
        let mut min = f64::INFINITY;
        for x in points {
            let v = self.theta.values(x)?;
            let det = frame_values(&v).determinant();
            if det.abs() <= DET_EPS {
                return Err(Error::Singular { det });
            }
            min = min.min(det.abs());
        }
        Ok(min)
    }
}

fn frame_values(theta: &FormJet) -> Matrix3<f64> {
    Matrix3::from_fn(|i, mu| theta.value(mu, i))
}

type JetMat = [[Jet; 3]; 3];

fn theta_jets(theta: &FormJet) -> JetMat {
    let mut m = [[Jet::default(); 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (mu, slot) in row.iter_mut().enumerate() {
            *slot = *theta.get(mu, i);
        }
    }
    m
}

fn slot_matrix(m: &JetMat, f: impl Fn(&Jet) -> f64) -> Matrix3<f64> {
    Matrix3::from_fn(|r, c| f(&m[r][c]))
}

/// Jets of `M⁻¹` from jets of `M` on an `n`-chart:
/// `∂X = −X ∂M X`, `∂²X = X ∂_a M X ∂_b M X + X ∂_b M X ∂_a M X − X ∂²M X`.
fn inverse_jets(m: &JetMat, n: usize, order: u8) -> Result<JetMat> {
    let v = slot_matrix(m, |j| j.value);
    let det = v.determinant();
    if det.abs() <= DET_EPS {
        return Err(Error::Singular { det });
    }
    let x = v.try_inverse().ok_or(Error::Singular { det })?;
    let mut out = [[Jet::default(); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c].value = x[(r, c)];
        }
    }
    if order == 0 {
        return Ok(out);
    }
    let dm: Vec<Matrix3<f64>> = (0..n).map(|a| slot_matrix(m, |j| j.grad[a])).collect();
    let xdmx: Vec<Matrix3<f64>> = dm.iter().map(|d| x * d * x).collect();
    for (a, d) in xdmx.iter().enumerate() {
        for r in 0..3 {
            for c in 0..3 {
                out[r][c].grad[a] = -d[(r, c)];
            }
        }
    }
    if order >= 2 {
        for a in 0..n {
            for b in 0..n {
                let h = slot_matrix(m, |j| j.hess[a][b]);
                let d2 = xdmx[a] * dm[b] * x + xdmx[b] * dm[a] * x - x * h * x;
                for r in 0..3 {
                    for c in 0..3 {
                        out[r][c].hess[a][b] = d2[(r, c)];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `ζ^{μν} = η^{ij} X^μ_i X^ν_j` from the frame `X = θ⁻¹`.
fn metric_jets(x: &JetMat, sig: &Signature, n: usize, order: u8) -> JetMat {
    let mut z = [[Jet::default(); 3]; 3];
    for mu in 0..3 {
        for nu in 0..3 {
            for i in 0..3 {
                z[mu][nu].add_product(&x[mu][i], &x[nu][i], sig.entry(i, i), n, order);
            }
        }
    }
    z
}

fn check_sig(sig: &Signature) -> Result<()> {
    if sig.m() != 3 {
        return Err(Error::RequiresDim3(sig.m()));
    }
    Ok(())
}

/// The contravariant metric `ζ^{μν}` as a `gl(3)`-valued 0-form
/// (row `μ`, column `ν`).
pub fn metric_from_frame(section: &GravSection, sig: &Signature) -> Result<ValuedForm> {
    check_sig(sig)?;
    let theta = section.theta.clone();
    let sig = sig.clone();
    ValuedForm::from_evaluator(
        section.chart().clone(),
        0,
        ValueSpace::Gl(3),
        theta.jet_order(),
        move |x, r| {
            let n = x.len();
            let inv = inverse_jets(&theta_jets(&theta.eval(x, r)?), n, r)?;
            let z = metric_jets(&inv, &sig, n, r);
            let mut out = FormJet::zeros(n, 0, 9, r);
            for mu in 0..3 {
                for nu in 0..3 {
                    *out.get_mut(0, mu * 3 + nu) = z[mu][nu];
                }
            }
            Ok(out)
        },
    )
}

/// Outcome of comparing a section's induced metric with a given one.
#[derive(Debug, Clone)]
pub struct OrthogonalityReport {
    pub orthogonal: bool,
    pub sup_residual: f64,
    /// `η^{ij} X^μ_i X^ν_j − ζ^{μν}`.
    pub residual: ValuedForm,
}

/// Whether the frame of `section` is `ζ`-orthonormal at the sample points.
pub fn orthogonality_check(
    section: &GravSection,
    zeta: &ValuedForm,
    sig: &Signature,
    tol: f64,
    points: &[Vec<f64>],
) -> Result<OrthogonalityReport> {
    let residual = metric_from_frame(section, sig)?.sub(zeta)?;
    let sup_residual = residual.sup_norm(points)?;
    Ok(OrthogonalityReport {
        orthogonal: sup_residual <= tol,
        sup_residual,
        residual,
    })
}

/// `a ↦ ½ (a + η aᵀ η)` on `gl(3)` storage coordinates.
pub fn p_projector(sig: &Signature) -> Result<LinearMap> {
    LinearMap::from_basis_fn(9, 9, |c| {
        let e = algebra::elementary(3, c / 3, c % 3);
        let (_, p) = algebra::project_kp(&e, sig)?;
        Ok(p.transpose().as_slice().to_vec())
    })
}

/// The metricity data of a section.
#[derive(Debug, Clone)]
pub struct Metricity {
    /// `π_p(ω)`, a `gl(3)`-valued 1-form.
    pub p_part: ValuedForm,
    /// Frame components `θ^a_α θ^b_β ∇_μ ζ^{αβ}` of the covariant
    /// derivative of the induced metric, as a `gl(3)`-valued 1-form
    /// (component `μ`, entry `(a, b)`).
    pub nabla: ValuedForm,
}

/// `π_p(ω)` together with `∇ζ`, the latter computed in coordinates from
/// the Christoffel symbols `Γ^γ_{μα} = X^γ_i (∂_μ θ^i_α + ω^i_{jμ} θ^j_α)`.
pub fn metricity_residual(section: &GravSection, sig: &Signature) -> Result<Metricity> {
    check_sig(sig)?;
    let p_part = section
        .omega
        .map_linear(ValueSpace::Gl(3), &p_projector(sig)?)?;
    let theta = section.theta.clone();
    let omega = section.omega.clone();
    let sig = sig.clone();
    let order = theta.jet_order().saturating_sub(1).min(omega.jet_order());
    if theta.jet_order() == 0 {
        return Err(Error::JetExhausted);
    }
    let nabla = ValuedForm::from_evaluator(
        section.chart().clone(),
        1,
        ValueSpace::Gl(3),
        order,
        move |x, r| {
            let n = x.len();
            let th = theta_jets(&theta.eval(x, r + 1)?);
            let om = omega.eval(x, r)?;
            let inv = inverse_jets(&th, n, r + 1)?;
            let zeta = metric_jets(&inv, &sig, n, r + 1);
            // Γ[μ][γ][α]
            let mut gamma = [[[Jet::default(); 3]; 3]; 3];
            for mu in 0..3 {
                for alpha in 0..3 {
                    for i in 0..3 {
                        let mut t = th[i][alpha].partial(mu, n, r);
                        for j in 0..3 {
                            t.add_product(om.get(mu, i * 3 + j), &th[j][alpha], 1.0, n, r);
                        }
                        for g in 0..3 {
                            gamma[mu][g][alpha].add_product(&inv[g][i], &t, 1.0, n, r);
                        }
                    }
                }
            }
            let mut out = FormJet::zeros(n, 1, 9, r);
            for mu in 0..3 {
                let mut cov = [[Jet::default(); 3]; 3];
                for al in 0..3 {
                    for be in 0..3 {
                        let mut c = zeta[al][be].partial(mu, n, r);
                        for g in 0..3 {
                            c.add_product(&gamma[mu][al][g], &zeta[g][be], 1.0, n, r);
                            c.add_product(&gamma[mu][be][g], &zeta[al][g], 1.0, n, r);
                        }
                        cov[al][be] = c;
                    }
                }
                for a in 0..3 {
                    for b in 0..3 {
                        let slot = out.get_mut(mu, a * 3 + b);
                        for al in 0..3 {
                            for be in 0..3 {
                                let w = Jet::product(&th[a][al], &th[b][be], n, r);
                                slot.add_product(&w, &cov[al][be], 1.0, n, r);
                            }
                        }
                    }
                }
            }
            Ok(out)
        },
    )?;
    Ok(Metricity { p_part, nabla })
}

/// Largest `|π_p(ω)|` coefficient over the points.
pub fn admissibility_sup(
    section: &GravSection,
    sig: &Signature,
    points: &[Vec<f64>],
) -> Result<f64> {
    check_sig(sig)?;
    section
        .omega
        .map_linear(ValueSpace::Gl(3), &p_projector(sig)?)?
        .sup_norm(points)
}

/// `Θ^i = dθ^i + ω^i_j ∧ θ^j`.
pub fn torsion(section: &GravSection) -> Result<ValuedForm> {
    let theta = section.theta.clone();
    let omega = section.omega.clone();
    let action = Bilinear::matrix_action(3);
    let order = theta
        .jet_order()
        .checked_sub(1)
        .ok_or(Error::JetExhausted)?
        .min(omega.jet_order());
    ValuedForm::from_evaluator(
        section.chart().clone(),
        2,
        ValueSpace::Vec(3),
        order,
        move |x, r| {
            let th = theta.eval(x, r + 1)?;
            let mut out = ext_d_at(&th)?;
            out.add_scaled(&wedge_at(&action, &omega.eval(x, r)?, &th)?, 1.0);
            Ok(out)
        },
    )
}

/// `R^3 × gl(3) → R`, `(v, a) ↦ η^{kl} ε_{lij} v^i a^j_k`.
fn eta_epsilon(sig: &Signature) -> Result<Bilinear> {
    Bilinear::from_basis_fn(3, 9, 1, |i, c| {
        let (j, k) = (c / 3, c % 3);
        Ok(vec![sig.entry(k, k) * algebra::levi_civita(k, i, j)])
    })
}

/// `R^3 × gl(3) → R`, `(v, a) ↦ ⟨iso(v), a⟩`.
fn iso_pairing(sig: &Signature) -> Result<Bilinear> {
    Bilinear::from_basis_fn(3, 9, 1, |i, c| {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        let iso = algebra::iso_k_r3(&e, sig)?;
        let b = algebra::elementary(3, c / 3, c % 3);
        Ok(vec![algebra::pair_gl(&iso, &b, sig)?])
    })
}

fn theta_curvature_form(section: &GravSection, bil: Bilinear) -> Result<ValuedForm> {
    let theta = section.theta.clone();
    let omega = section.omega.clone();
    let bracket = Bilinear::bracket(ValueSpace::Gl(3))?;
    let order = omega
        .jet_order()
        .checked_sub(1)
        .ok_or(Error::JetExhausted)?
        .min(theta.jet_order());
    ValuedForm::from_evaluator(
        section.chart().clone(),
        3,
        ValueSpace::Scalar,
        order,
        move |x, r| {
            let om = omega.eval(x, r + 1)?;
            let mut f = ext_d_at(&om)?;
            f.add_scaled(&wedge_at(&bracket, &om, &om)?, 0.5);
            wedge_at(&bil, &theta.eval(x, r)?, &f)
        },
    )
}

fn require_3chart(section: &GravSection, sig: &Signature) -> Result<()> {
    check_sig(sig)?;
    if section.chart().dim() != 3 {
        return Err(Error::InvalidChart("Palatini form needs a 3-chart".into()));
    }
    Ok(())
}

/// `λ_PG = η^{kl} ε_{lij} θ^i ∧ Ω^j_k` with `Ω` the curvature of `ω`.
pub fn palatini_form(section: &GravSection, sig: &Signature) -> Result<ValuedForm> {
    require_3chart(section, sig)?;
    theta_curvature_form(section, eta_epsilon(sig)?)
}

/// `⟨θ ∧ Ω⟩`, the coframe paired with the curvature through the
/// isomorphism `R^3 ≅ k` and the `gl(3)` pairing. Equals `−λ_PG`.
pub fn palatini_pairing_form(section: &GravSection, sig: &Signature) -> Result<ValuedForm> {
    require_3chart(section, sig)?;
    theta_curvature_form(section, iso_pairing(sig)?)
}

/// `gl(3) → a(3)` and `R^3 → a(3)` on storage coordinates.
fn aff_embeddings() -> Result<(LinearMap, LinearMap)> {
    let lin = LinearMap::from_basis_fn(9, 12, |c| {
        let mut v = vec![0.0; 12];
        v[c] = 1.0;
        Ok(v)
    })?;
    let trans = LinearMap::from_basis_fn(3, 12, |c| {
        let mut v = vec![0.0; 12];
        v[9 + c] = 1.0;
        Ok(v)
    })?;
    Ok((lin, trans))
}

/// The affine potential `A = (ω, θ)`.
pub fn witten_lift(section: &GravSection) -> Result<GaugePotential> {
    let (lin, trans) = aff_embeddings()?;
    let a = section
        .omega
        .map_linear(ValueSpace::Aff(3), &lin)?
        .add(&section.theta.map_linear(ValueSpace::Aff(3), &trans)?)?;
    GaugePotential::new(a)
}

/// `cs_form(witten_lift(σ))` with the `a(3)` pairing.
pub fn cs_of_section(section: &GravSection, sig: &Signature) -> Result<ValuedForm> {
    require_3chart(section, sig)?;
    cs_form(&witten_lift(section)?, PairingKind::Aff3, sig)
}

/// Result of splitting an affine potential into connection and coframe.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub reducible: bool,
    /// `sup |π_p(lin A)|` over the sample points.
    pub p_sup: f64,
    /// `π_k(lin A)`.
    pub omega_k: ValuedForm,
    pub theta: ValuedForm,
}

impl Reduction {
    pub fn section(&self) -> Result<GravSection> {
        GravSection::new(self.theta.clone(), self.omega_k.clone())
    }
}

/// Splits `A = (lin, trans)`; reducible when `π_p(lin)` vanishes to `tol`
/// at the sample points.
pub fn reduce_connection(
    a: &GaugePotential,
    sig: &Signature,
    tol: f64,
    points: &[Vec<f64>],
) -> Result<Reduction> {
    check_sig(sig)?;
    if a.space() != ValueSpace::Aff(3) {
        return Err(Error::SpaceMismatch(format!(
            "expected Aff(3), found {:?}",
            a.space()
        )));
    }
    let lin = LinearMap::from_basis_fn(12, 9, |c| {
        let mut v = vec![0.0; 9];
        if c < 9 {
            v[c] = 1.0;
        }
        Ok(v)
    })?;
    let trans = LinearMap::from_basis_fn(12, 3, |c| {
        let mut v = vec![0.0; 3];
        if c >= 9 {
            v[c - 9] = 1.0;
        }
        Ok(v)
    })?;
    let lin_part = a.form().map_linear(ValueSpace::Gl(3), &lin)?;
    let theta = a.form().map_linear(ValueSpace::Vec(3), &trans)?;
    let p = p_projector(sig)?;
    let k = LinearMap::from_basis_fn(9, 9, |c| {
        let e = algebra::elementary(3, c / 3, c % 3);
        let (k, _) = algebra::project_kp(&e, sig)?;
        Ok(k.transpose().as_slice().to_vec())
    })?;
    let p_sup = lin_part
        .map_linear(ValueSpace::Gl(3), &p)?
        .sup_norm(points)?;
    Ok(Reduction {
        reducible: p_sup <= tol,
        p_sup,
        omega_k: lin_part.map_linear(ValueSpace::Gl(3), &k)?,
        theta,
    })
}

/// Palatini and Chern–Simons actions of one section over a periodic chart.
#[derive(Debug, Clone)]
pub struct Correspondence {
    pub integral_pg: f64,
    pub integral_cs: f64,
    /// `∫ (cs − pg)`.
    pub integral_diff: f64,
    /// `integral_cs / integral_pg` when `|integral_pg| > 1e-12`.
    pub ratio: Option<f64>,
    /// `cs_of_section − palatini_form`.
    pub pointwise_diff: ValuedForm,
}

/// Integrates both Lagrangians of an admissible section. Sections whose
/// connection has a `p` part above `tol` on the grid are rejected.
pub fn correspondence(
    section: &GravSection,
    sig: &Signature,
    grid: &QuadratureGrid,
    tol: f64,
) -> Result<Correspondence> {
    require_3chart(section, sig)?;
    let chart = section.chart();
    if !chart.is_periodic() {
        return Err(Error::NonPeriodicChart);
    }
    let sup = admissibility_sup(section, sig, &grid.points(chart))?;
    if sup > tol {
        return Err(Error::Inadmissible { sup, tol });
    }
    let pg = palatini_form(section, sig)?;
    let cs = cs_of_section(section, sig)?;
    let samples = sample_grid(chart, grid, |x| {
        Ok((pg.values(x)?.value(0, 0), cs.values(x)?.value(0, 0)))
    })?;
    let scale = chart.volume() / grid.len() as f64;
    let integral = |f: &dyn Fn(&(f64, f64)) -> f64| {
        pairwise_sum(&samples.iter().map(f).collect::<Vec<_>>()) * scale
    };
    let integral_pg = integral(&|s| s.0);
    let integral_cs = integral(&|s| s.1);
    let integral_diff = integral(&|s| s.1 - s.0);
    Ok(Correspondence {
        integral_pg,
        integral_cs,
        integral_diff,
        ratio: (integral_pg.abs() > 1e-12).then(|| integral_cs / integral_pg),
        pointwise_diff: cs.sub(&pg)?,
    })
}

/// Curvature of the spin connection alone.
pub fn spin_curvature(section: &GravSection) -> Result<ValuedForm> {
    curvature(&GaugePotential::new(section.omega.clone())?)
}
