use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::lattice::{site_jet, KBasis, LatticeConfig, Perturbation, SiteJet};
use crate::algebra::levi_civita;
use crate::error::Result;
use crate::jetfields::pairwise_sum;

/// Which Lagrangian a discrete action evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Palatini,
    ChernSimons,
}

/// Ordered axis pairs `(0,1), (0,2), (1,2)` used for 2-form components.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Per-site curvature (`k` coordinates) and torsion, one entry per pair in
/// [`PAIRS`], with their norms.
#[derive(Debug, Clone, PartialEq)]
pub struct ElResidual {
    pub curv: Vec<[Vector3<f64>; 3]>,
    pub tors: Vec<[Vector3<f64>; 3]>,
    pub curv_sup: f64,
    pub curv_l2: f64,
    pub tors_sup: f64,
    pub tors_l2: f64,
}

impl ElResidual {
    /// `‖curv‖²_{L²} + ‖tors‖²_{L²}`.
    pub fn objective(&self) -> f64 {
        self.curv_l2 * self.curv_l2 + self.tors_l2 * self.tors_l2
    }
}

fn column(m: &Matrix3<f64>, mu: usize) -> Vector3<f64> {
    m.column(mu).into_owned()
}

fn pair_index(mu: usize, nu: usize) -> (usize, f64) {
    match (mu, nu) {
        (0, 1) => (0, 1.0),
        (1, 0) => (0, -1.0),
        (0, 2) => (1, 1.0),
        (2, 0) => (1, -1.0),
        (1, 2) => (2, 1.0),
        (2, 1) => (2, -1.0),
        _ => unreachable!("diagonal pair"),
    }
}

/// Curvature and torsion 2-form components at one site, with `c` the
/// coefficient of the quadratic term (`1` for `F`, `⅔` inside the
/// Chern–Simons integrand).
fn site_two_forms(kb: &KBasis, j: &SiteJet, c: f64) -> ([Vector3<f64>; 3], [Vector3<f64>; 3]) {
    let mut f = [Vector3::zeros(); 3];
    let mut t = [Vector3::zeros(); 3];
    for (p, &(mu, nu)) in PAIRS.iter().enumerate() {
        let (xm, xn) = (column(&j.omega_k, mu), column(&j.omega_k, nu));
        let (tm, tn) = (column(&j.theta, mu), column(&j.theta, nu));
        f[p] =
            column(&j.d_omega_k[mu], nu) - column(&j.d_omega_k[nu], mu) + kb.bracket(&xm, &xn) * c;
        t[p] = column(&j.d_theta[mu], nu) - column(&j.d_theta[nu], mu)
            + (kb.matrix(&xm) * tn - kb.matrix(&xn) * tm) * c;
    }
    (f, t)
}

/// Top coefficient of `η_kk ε_kij θ^i ∧ Ω^j_k` at one site.
pub(crate) fn palatini_density(kb: &KBasis, j: &SiteJet) -> f64 {
    let (f, _) = site_two_forms(kb, j, 1.0);
    let om = [kb.matrix(&f[0]), kb.matrix(&f[1]), kb.matrix(&f[2])];
    let mut out = 0.0;
    for k in 0..3 {
        for i in 0..3 {
            for jj in 0..3 {
                let e = levi_civita(k, i, jj);
                if e == 0.0 {
                    continue;
                }
                let w = j.theta[(i, 0)] * om[2][(jj, k)] - j.theta[(i, 1)] * om[1][(jj, k)]
                    + j.theta[(i, 2)] * om[0][(jj, k)];
                out += kb.eta[(k, k)] * e * w;
            }
        }
    }
    out
}

/// Top coefficient of `⟨A ∧ (dA + ⅓[A∧A])⟩` for the affine lift
/// `A = (ω, θ)` at one site.
pub(crate) fn cs_density(kb: &KBasis, j: &SiteJet) -> f64 {
    let (g, t) = site_two_forms(kb, j, 2.0 / 3.0);
    let pair = |mu: usize, p: usize| {
        let xi = column(&j.omega_k, mu);
        let u = column(&j.theta, mu);
        xi.dot(&(kb.gram * t[p])) + g[p].dot(&(kb.gram * u))
    };
    pair(0, 2) - pair(1, 1) + pair(2, 0)
}

/// Discrete action: the chosen density at every site from the prolonged
/// data, summed in index order and multiplied by the cell volume.
pub fn discrete_action(cfg: &LatticeConfig, which: ActionKind) -> Result<f64> {
    cfg.check_coframe()?;
    Ok(action_unchecked(cfg, which))
}

pub(crate) fn action_unchecked(cfg: &LatticeConfig, which: ActionKind) -> f64 {
    let kb = KBasis::new(cfg.signature());
    let nb = cfg.neighbours();
    let h = cfg.spacing();
    let vals: Vec<f64> = (0..cfg.len())
        .into_par_iter()
        .map(|s| {
            let j = site_jet(cfg, &nb, &h, s);
            match which {
                ActionKind::Palatini => palatini_density(&kb, &j),
                ActionKind::ChernSimons => cs_density(&kb, &j),
            }
        })
        .collect();
    pairwise_sum(&vals) * cfg.cell_volume()
}

/// Discrete curvature `F = Δω + ½[ω, ω]` and torsion `Θ = Δθ + ω∧θ`.
pub fn el_residual(cfg: &LatticeConfig) -> ElResidual {
    let kb = KBasis::new(cfg.signature());
    let nb = cfg.neighbours();
    let h = cfg.spacing();
    let (curv, tors): (Vec<_>, Vec<_>) = (0..cfg.len())
        .into_par_iter()
        .map(|s| site_two_forms(&kb, &site_jet(cfg, &nb, &h, s), 1.0))
        .unzip();
    let cv = cfg.cell_volume();
    let norms = |field: &[[Vector3<f64>; 3]]| {
        let sq: Vec<f64> = field
            .iter()
            .map(|a| a.iter().map(|v| v.norm_squared()).sum())
            .collect();
        let sup = field
            .iter()
            .flat_map(|a| a.iter().map(|v| v.amax()))
            .fold(0.0f64, f64::max);
        (sup, (pairwise_sum(&sq) * cv).sqrt())
    };
    let (curv_sup, curv_l2) = norms(&curv);
    let (tors_sup, tors_l2) = norms(&tors);
    ElResidual {
        curv,
        tors,
        curv_sup,
        curv_l2,
        tors_sup,
        tors_l2,
    }
}

/// Residual objective and its Euclidean gradient with respect to every
/// lattice entry.
pub fn objective_and_gradient(cfg: &LatticeConfig) -> (f64, Perturbation) {
    let res = el_residual(cfg);
    let kb = KBasis::new(cfg.signature());
    let nb = cfg.neighbours();
    let h = cfg.spacing();
    let scale = 2.0 * cfg.cell_volume();
    let signed = |field: &[[Vector3<f64>; 3]], s: usize, mu: usize, nu: usize| {
        let (p, sign) = pair_index(mu, nu);
        field[s][p] * sign
    };
    let grads: Vec<(Matrix3<f64>, Matrix3<f64>)> = (0..cfg.len())
        .into_par_iter()
        .map(|s| {
            let mut g_theta = Matrix3::zeros();
            let mut g_xi = Matrix3::zeros();
            let omega: [Matrix3<f64>; 3] =
                std::array::from_fn(|mu| kb.matrix(&column(&cfg.omega_k[s], mu)));
            for nu in 0..3 {
                let mut gt = Vector3::zeros();
                let mut gx = Vector3::zeros();
                for mu in 0..3 {
                    if mu == nu {
                        continue;
                    }
                    let (p, m) = nb.step(s, mu);
                    let inv = 1.0 / (2.0 * h[mu]);
                    let f_here = signed(&res.curv, s, mu, nu);
                    let t_here = signed(&res.tors, s, mu, nu);
                    gx -= (signed(&res.curv, p, mu, nu) - signed(&res.curv, m, mu, nu)) * inv;
                    gx += kb.ad(&column(&cfg.omega_k[s], mu)).transpose() * f_here;
                    gt -= (signed(&res.tors, p, mu, nu) - signed(&res.tors, m, mu, nu)) * inv;
                    gt += omega[mu].transpose() * t_here;
                    // dω_ν θ_μ term, with (ν, μ) as the ordered pair
                    let t_nm = signed(&res.tors, s, nu, mu);
                    let th_mu = column(&cfg.theta[s], mu);
                    for l in 0..3 {
                        gx[l] += t_nm.dot(&(kb.e[l] * th_mu));
                    }
                }
                g_theta.set_column(nu, &(gt * scale));
                g_xi.set_column(nu, &(gx * scale));
            }
            (g_theta, g_xi)
        })
        .collect();
    let (theta, omega_k) = grads.into_iter().unzip();
    (res.objective(), Perturbation { theta, omega_k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;
    use crate::jetfields::{Chart, QuadratureGrid};

    #[test]
    fn pair_index_is_antisymmetric() {
        for &(mu, nu) in &PAIRS {
            let (a, s) = pair_index(mu, nu);
            let (b, t) = pair_index(nu, mu);
            assert_eq!((a, s), (b, -t));
        }
    }

    #[test]
    fn flat_lattice_has_zero_densities() {
        let cfg = LatticeConfig::flat(
            Chart::unit_torus(3),
            QuadratureGrid::uniform(3, 4).unwrap(),
            Signature::lorentz3(),
        )
        .unwrap();
        assert_eq!(discrete_action(&cfg, ActionKind::Palatini).unwrap(), 0.0);
        assert_eq!(discrete_action(&cfg, ActionKind::ChernSimons).unwrap(), 0.0);
        assert_eq!(el_residual(&cfg).objective(), 0.0);
    }
}
