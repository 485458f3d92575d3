use nalgebra::Matrix3;
use rand::Rng;
use rayon::prelude::*;

use crate::algebra::{self, Signature, DET_EPS};
use crate::error::{Error, Result};
use crate::gravity::GravSection;
use crate::jetfields::{sample_grid, Chart, QuadratureGrid, ValueSpace};
use crate::sampling::{random_form, TrigParams};

/// Smallest per-axis count for which central differences see two distinct
/// neighbours.
pub const MIN_LATTICE_COUNT: usize = 3;

/// Field content on a periodic lattice over a 3-torus.
///
/// `theta[s]` holds `θ^i_μ` at row `i`, column `μ`. Column `μ` of
/// `omega_k[s]` holds the `k` coordinates of `ω_μ`, so every connection
/// is admissible by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig {
    chart: Chart,
    grid: QuadratureGrid,
    sig: Signature,
    pub theta: Vec<Matrix3<f64>>,
    pub omega_k: Vec<Matrix3<f64>>,
}

/// Variation of a [`LatticeConfig`], same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub theta: Vec<Matrix3<f64>>,
    pub omega_k: Vec<Matrix3<f64>>,
}

/// Discrete 1-jet at one site: values and central differences along
/// each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteJet {
    pub theta: Matrix3<f64>,
    pub omega_k: Matrix3<f64>,
    pub d_theta: [Matrix3<f64>; 3],
    pub d_omega_k: [Matrix3<f64>; 3],
}

fn check_lattice(chart: &Chart, grid: &QuadratureGrid, sig: &Signature) -> Result<()> {
    if sig.m() != 3 {
        return Err(Error::RequiresDim3(sig.m()));
    }
    if chart.dim() != 3 {
        return Err(Error::InvalidChart(format!(
            "lattice needs a 3-chart, found {}",
            chart.dim()
        )));
    }
    if !chart.is_periodic() {
        return Err(Error::NonPeriodicChart);
    }
    if grid.counts().len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: grid.counts().len(),
        });
    }
    if grid.counts().iter().any(|&c| c < MIN_LATTICE_COUNT) {
        return Err(Error::GridTooSmall {
            min: MIN_LATTICE_COUNT,
        });
    }
    Ok(())
}

impl LatticeConfig {
    pub fn new(
        chart: Chart,
        grid: QuadratureGrid,
        sig: Signature,
        theta: Vec<Matrix3<f64>>,
        omega_k: Vec<Matrix3<f64>>,
    ) -> Result<Self> {
        check_lattice(&chart, &grid, &sig)?;
        for len in [theta.len(), omega_k.len()] {
            if len != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    found: len,
                });
            }
        }
        Ok(Self {
            chart,
            grid,
            sig,
            theta,
            omega_k,
        })
    }

    /// Constant coframe `c`, zero connection.
    pub fn constant(
        chart: Chart,
        grid: QuadratureGrid,
        sig: Signature,
        coframe: Matrix3<f64>,
    ) -> Result<Self> {
        let n = grid.len();
        Self::new(
            chart,
            grid,
            sig,
            vec![coframe; n],
            vec![Matrix3::zeros(); n],
        )
    }

    /// `θ^i = dx^i`, `ω = 0`.
    pub fn flat(chart: Chart, grid: QuadratureGrid, sig: Signature) -> Result<Self> {
        Self::constant(chart, grid, sig, Matrix3::identity())
    }

    /// Samples a section at the lattice sites. The connection must be
    /// `k`-valued to within `tol`.
    pub fn from_section(
        section: &GravSection,
        grid: QuadratureGrid,
        sig: Signature,
        tol: f64,
    ) -> Result<Self> {
        let chart = section.chart().clone();
        check_lattice(&chart, &grid, &sig)?;
        let sites = sample_grid(&chart, &grid, |x| {
            let th = section.theta().values(x)?;
            let om = section.omega().values(x)?;
            let mut theta = Matrix3::zeros();
            let mut xi = Matrix3::zeros();
            let mut p_sup: f64 = 0.0;
            for mu in 0..3 {
                for i in 0..3 {
                    theta[(i, mu)] = th.value(mu, i);
                }
                let w = nalgebra::DMatrix::from_row_slice(3, 3, &om.component_values(mu));
                let (_, p) = algebra::project_kp(&w, &sig)?;
                p_sup = p_sup.max(p.amax());
                let c = algebra::iso_r3_k(&w, &sig)?;
                for l in 0..3 {
                    xi[(l, mu)] = c[l];
                }
            }
            Ok((theta, xi, p_sup))
        })?;
        let sup = sites.iter().fold(0.0f64, |m, s| m.max(s.2));
        if sup > tol {
            return Err(Error::Inadmissible { sup, tol });
        }
        let (theta, omega_k) = sites.into_iter().map(|(t, w, _)| (t, w)).unzip();
        Self::new(chart, grid, sig, theta, omega_k)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Lattice spacing per axis.
    pub fn spacing(&self) -> [f64; 3] {
        let periods = self.chart.extent().1;
        let c = self.grid.counts();
        [
            periods[0] / c[0] as f64,
            periods[1] / c[1] as f64,
            periods[2] / c[2] as f64,
        ]
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    /// `ω_μ` as a matrix at site `s`.
    pub fn omega(&self, s: usize, mu: usize) -> Matrix3<f64> {
        let basis = KBasis::new(&self.sig);
        basis.matrix(&self.omega_k[s].column(mu).into_owned())
    }

    /// Smallest `|det θ|` over the sites; errors if any is below
    /// [`DET_EPS`].
    pub fn check_coframe(&self) -> Result<f64> {
        let min = self
            .theta
            .par_iter()
            .map(|t| t.determinant().abs())
            .reduce(|| f64::INFINITY, f64::min);
        if min.is_nan() || min <= DET_EPS {
            return Err(Error::Singular { det: min });
        }
        Ok(min)
    }

    /// `self + t · pert`.
    pub fn perturbed(&self, pert: &Perturbation, t: f64) -> Result<Self> {
        self.check_shape(pert)?;
        let mut out = self.clone();
        for (a, b) in out.theta.iter_mut().zip(&pert.theta) {
            *a += b * t;
        }
        for (a, b) in out.omega_k.iter_mut().zip(&pert.omega_k) {
            *a += b * t;
        }
        Ok(out)
    }

    fn check_shape(&self, pert: &Perturbation) -> Result<()> {
        if pert.theta.len() != self.len() || pert.omega_k.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: pert.theta.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn neighbours(&self) -> Neighbours {
        Neighbours::new(self.grid.counts())
    }
}

impl Perturbation {
    pub fn zero(len: usize) -> Self {
        Self {
            theta: vec![Matrix3::zeros(); len],
            omega_k: vec![Matrix3::zeros(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Squared Euclidean norm over all entries.
    pub fn norm_squared(&self) -> f64 {
        let t: Vec<f64> = self.theta.iter().map(|m| m.norm_squared()).collect();
        let w: Vec<f64> = self.omega_k.iter().map(|m| m.norm_squared()).collect();
        crate::jetfields::pairwise_sum(&t) + crate::jetfields::pairwise_sum(&w)
    }

    /// `L²` norm on the lattice: `sqrt(cell volume · Σ entries²)`.
    pub fn l2_norm(&self, cell_volume: f64) -> f64 {
        (cell_volume * self.norm_squared()).sqrt()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            theta: self.theta.iter().map(|m| m * t).collect(),
            omega_k: self.omega_k.iter().map(|m| m * t).collect(),
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        let t: Vec<f64> = self
            .theta
            .iter()
            .zip(&other.theta)
            .map(|(a, b)| a.dot(b))
            .collect();
        let w: Vec<f64> = self
            .omega_k
            .iter()
            .zip(&other.omega_k)
            .map(|(a, b)| a.dot(b))
            .collect();
        crate::jetfields::pairwise_sum(&t) + crate::jetfields::pairwise_sum(&w)
    }

    /// `self − other`.
    pub fn sub(&self, other: &Self) -> Self {
        Self {
            theta: self
                .theta
                .iter()
                .zip(&other.theta)
                .map(|(a, b)| a - b)
                .collect(),
            omega_k: self
                .omega_k
                .iter()
                .zip(&other.omega_k)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Difference `b − a` of two configurations on the same lattice.
    pub fn between(a: &LatticeConfig, b: &LatticeConfig) -> Result<Self> {
        if a.grid != b.grid {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        Ok(Self {
            theta: b.theta.iter().zip(&a.theta).map(|(x, y)| x - y).collect(),
            omega_k: b
                .omega_k
                .iter()
                .zip(&a.omega_k)
                .map(|(x, y)| x - y)
                .collect(),
        })
    }

    /// Smooth random variation: every entry is a trig field with frequencies
    /// up to `params.max_frequency`, sampled at the sites.
    pub fn random_smooth<R: Rng>(
        cfg: &LatticeConfig,
        params: &TrigParams,
        rng: &mut R,
    ) -> Result<Self> {
        let chart = cfg.chart();
        let dtheta = random_form(chart, 1, ValueSpace::Vec(3), params, rng)?;
        let dxi = random_form(chart, 1, ValueSpace::Vec(3), params, rng)?;
        let sites = sample_grid(chart, cfg.grid(), |x| {
            let (a, b) = (dtheta.values(x)?, dxi.values(x)?);
            let mut t = Matrix3::zeros();
            let mut w = Matrix3::zeros();
            for mu in 0..3 {
                for i in 0..3 {
                    t[(i, mu)] = a.value(mu, i);
                    w[(i, mu)] = b.value(mu, i);
                }
            }
            Ok((t, w))
        })?;
        let (theta, omega_k) = sites.into_iter().unzip();
        Ok(Self { theta, omega_k })
    }

    /// [`Perturbation::random_smooth`] rescaled to unit `L²` norm.
    pub fn random_unit<R: Rng>(
        cfg: &LatticeConfig,
        params: &TrigParams,
        rng: &mut R,
    ) -> Result<Self> {
        let p = Self::random_smooth(cfg, params, rng)?;
        let n = p.l2_norm(cfg.cell_volume());
        if n == 0.0 {
            return Ok(p);
        }
        Ok(p.scaled(1.0 / n))
    }
}

/// `k` basis `E_l = iso(e_l)` with its Gram matrix and structure
/// constants, in fixed-size form.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KBasis {
    pub e: [Matrix3<f64>; 3],
    pub eta: Matrix3<f64>,
    /// `gram[(l, m)] = ⟨E_l, E_m⟩`.
    pub gram: Matrix3<f64>,
    /// `[E_l, E_m] = Σ_n structure[l][m][n] E_n`.
    pub structure: [[[f64; 3]; 3]; 3],
}

impl KBasis {
    pub fn new(sig: &Signature) -> Self {
        let to3 = |m: &nalgebra::DMatrix<f64>| Matrix3::from_fn(|i, j| m[(i, j)]);
        let basis = algebra::k_basis(sig).expect("signature checked to be 3-dimensional");
        let e = [to3(&basis[0]), to3(&basis[1]), to3(&basis[2])];
        let eta = Matrix3::from_diagonal(&nalgebra::Vector3::new(
            sig.diag()[0],
            sig.diag()[1],
            sig.diag()[2],
        ));
        let gram = Matrix3::from_fn(|l, m| (eta * e[l].transpose() * eta * e[m]).trace());
        let mut structure = [[[0.0; 3]; 3]; 3];
        for l in 0..3 {
            for m in 0..3 {
                let br = &basis[l] * &basis[m] - &basis[m] * &basis[l];
                structure[l][m] = algebra::iso_r3_k(&br, sig).expect("3-dimensional");
            }
        }
        Self {
            e,
            eta,
            gram,
            structure,
        }
    }

    pub fn matrix(&self, xi: &nalgebra::Vector3<f64>) -> Matrix3<f64> {
        self.e[0] * xi[0] + self.e[1] * xi[1] + self.e[2] * xi[2]
    }

    /// `k` coordinates of `[iso ξ, iso ζ]`.
    pub fn bracket(
        &self,
        xi: &nalgebra::Vector3<f64>,
        zeta: &nalgebra::Vector3<f64>,
    ) -> nalgebra::Vector3<f64> {
        let mut out = nalgebra::Vector3::zeros();
        for l in 0..3 {
            for m in 0..3 {
                let c = xi[l] * zeta[m];
                if c != 0.0 {
                    for n in 0..3 {
                        out[n] += c * self.structure[l][m][n];
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ζ ↦ bracket(ξ, ζ)`.
    pub fn ad(&self, xi: &nalgebra::Vector3<f64>) -> Matrix3<f64> {
        Matrix3::from_fn(|n, m| (0..3).map(|l| xi[l] * self.structure[l][m][n]).sum())
    }
}

/// Periodic neighbour lookup in row-major order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Neighbours {
    counts: [usize; 3],
    strides: [usize; 3],
}

impl Neighbours {
    pub fn new(counts: &[usize]) -> Self {
        let c = [counts[0], counts[1], counts[2]];
        Self {
            counts: c,
            strides: [c[1] * c[2], c[2], 1],
        }
    }

    /// `(s + e_axis, s − e_axis)` with periodic wrap.
    pub fn step(&self, s: usize, axis: usize) -> (usize, usize) {
        let n = self.counts[axis];
        let stride = self.strides[axis];
        let i = (s / stride) % n;
        let base = s - i * stride;
        (
            base + ((i + 1) % n) * stride,
            base + ((i + n - 1) % n) * stride,
        )
    }
}

/// Central difference `(f(x + h e_a) − f(x − h e_a)) / 2h` of a scalar
/// field sampled in row-major order on a periodic lattice.
pub fn central_difference(
    values: &[f64],
    counts: &[usize],
    spacing: f64,
    axis: usize,
) -> Result<Vec<f64>> {
    if counts.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: counts.len(),
        });
    }
    if counts.iter().any(|&c| c < MIN_LATTICE_COUNT) {
        return Err(Error::GridTooSmall {
            min: MIN_LATTICE_COUNT,
        });
    }
    let len: usize = counts.iter().product();
    if values.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: values.len(),
        });
    }
    let nb = Neighbours::new(counts);
    Ok((0..len)
        .map(|s| {
            let (p, m) = nb.step(s, axis);
            (values[p] - values[m]) / (2.0 * spacing)
        })
        .collect())
}

/// Discrete 1-jet of the configuration at every site.
pub fn prolong(cfg: &LatticeConfig) -> Vec<SiteJet> {
    let nb = cfg.neighbours();
    let h = cfg.spacing();
    (0..cfg.len())
        .into_par_iter()
        .map(|s| site_jet(cfg, &nb, &h, s))
        .collect()
}

pub(crate) fn site_jet(cfg: &LatticeConfig, nb: &Neighbours, h: &[f64; 3], s: usize) -> SiteJet {
    let mut d_theta = [Matrix3::zeros(); 3];
    let mut d_omega_k = [Matrix3::zeros(); 3];
    for a in 0..3 {
        let (p, m) = nb.step(s, a);
        d_theta[a] = (cfg.theta[p] - cfg.theta[m]) / (2.0 * h[a]);
        d_omega_k[a] = (cfg.omega_k[p] - cfg.omega_k[m]) / (2.0 * h[a]);
    }
    SiteJet {
        theta: cfg.theta[s],
        omega_k: cfg.omega_k[s],
        d_theta,
        d_omega_k,
    }
}
