//! Seeded random trigonometric fields for tests and experiments.

use std::f64::consts::PI;

use rand::Rng;

use crate::algebra::{self, Signature};
use crate::error::{Error, Result};
use crate::gravity::GravSection;
use crate::jetfields::{
    make_trig_field, multi_indices, Chart, Jet2Scalar, LinearMap, TrigTerm, ValueSpace, ValuedForm,
};

/// Shape of a random trigonometric coefficient field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigParams {
    /// Frequencies are drawn from `-max_frequency..=max_frequency` per axis.
    pub max_frequency: i64,
    pub terms: usize,
    /// Amplitudes are uniform in `[-amplitude, amplitude]`.
    pub amplitude: f64,
}

impl Default for TrigParams {
    fn default() -> Self {
        Self {
            max_frequency: 2,
            terms: 3,
            amplitude: 0.5,
        }
    }
}

pub fn random_trig_terms<R: Rng>(n: usize, params: &TrigParams, rng: &mut R) -> Vec<TrigTerm> {
    let k = params.max_frequency.max(0);
    (0..params.terms)
        .map(|_| TrigTerm {
            freq: (0..n).map(|_| rng.gen_range(-k..=k)).collect(),
            amplitude: rng.gen_range(-params.amplitude..=params.amplitude),
            phase: rng.gen_range(0.0..2.0 * PI),
        })
        .collect()
}

pub fn random_trig_scalar<R: Rng>(
    chart: &Chart,
    params: &TrigParams,
    rng: &mut R,
) -> Result<Jet2Scalar> {
    make_trig_field(chart, &random_trig_terms(chart.dim(), params, rng))
}

/// A form whose every coefficient is an independent random trig field.
pub fn random_form<R: Rng>(
    chart: &Chart,
    degree: usize,
    space: ValueSpace,
    params: &TrigParams,
    rng: &mut R,
) -> Result<ValuedForm> {
    if degree > chart.dim() {
        return Err(Error::DegreeOverflow {
            degree,
            dim: chart.dim(),
        });
    }
    let count = multi_indices(chart.dim(), degree).len() * space.dim();
    let coeffs = (0..count)
        .map(|_| random_trig_scalar(chart, params, rng))
        .collect::<Result<Vec<_>>>()?;
    ValuedForm::from_coeffs(chart.clone(), degree, space, coeffs)
}

/// `R^3 → gl(3)`, `ξ ↦ iso_k_r3(ξ)`, on storage coordinates.
pub fn k_embedding(sig: &Signature) -> Result<LinearMap> {
    let basis = algebra::k_basis(sig)?;
    LinearMap::from_basis_fn(3, 9, |l| Ok(basis[l].transpose().as_slice().to_vec()))
}

/// `R^3 ⊕ R^3 → a(3)`, `(ξ, v) ↦ (iso_k_r3(ξ), v)`.
pub fn k_translation_embedding(sig: &Signature) -> Result<LinearMap> {
    let basis = algebra::k_basis(sig)?;
    LinearMap::from_basis_fn(6, 12, |c| {
        let mut out = vec![0.0; 12];
        if c < 3 {
            out[..9].copy_from_slice(basis[c].transpose().as_slice());
        } else {
            out[9 + c - 3] = 1.0;
        }
        Ok(out)
    })
}

/// Random `k`-valued form in `gl(3)`.
pub fn random_k_form<R: Rng>(
    chart: &Chart,
    degree: usize,
    sig: &Signature,
    params: &TrigParams,
    rng: &mut R,
) -> Result<ValuedForm> {
    let coords = random_form(chart, degree, ValueSpace::Vec(3), params, rng)?;
    coords.map_linear(ValueSpace::Gl(3), &k_embedding(sig)?)
}

/// Random `k ⊕ R^3`-valued form in `a(3)`.
pub fn random_k_translation_form<R: Rng>(
    chart: &Chart,
    degree: usize,
    sig: &Signature,
    params: &TrigParams,
    rng: &mut R,
) -> Result<ValuedForm> {
    let coords = random_form(chart, degree, ValueSpace::Vec(6), params, rng)?;
    coords.map_linear(ValueSpace::Aff(3), &k_translation_embedding(sig)?)
}

/// `θ^i = dx^i + δθ^i` with `δθ` a random trig 1-form of the given
/// amplitude, and `ω` either `k`-valued (admissible) or unrestricted.
pub fn random_section<R: Rng>(
    chart: &Chart,
    sig: &Signature,
    connection: &TrigParams,
    coframe_amplitude: f64,
    admissible: bool,
    rng: &mut R,
) -> Result<GravSection> {
    let coframe = TrigParams {
        amplitude: coframe_amplitude,
        ..*connection
    };
    let delta = random_form(chart, 1, ValueSpace::Vec(3), &coframe, rng)?;
    let theta = GravSection::flat(chart.clone())?.theta().add(&delta)?;
    let omega = if admissible {
        random_k_form(chart, 1, sig, connection, rng)?
    } else {
        random_form(chart, 1, ValueSpace::Gl(3), connection, rng)?
    };
    GravSection::new(theta, omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn k_forms_are_k_valued() {
        let sig = Signature::lorentz3();
        let chart = Chart::unit_torus(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_k_form(&chart, 1, &sig, &TrigParams::default(), &mut rng).unwrap();
        let v = a.values(&[0.1, 0.2, 0.3]).unwrap();
        for comp in 0..3 {
            let m = nalgebra::DMatrix::from_row_slice(3, 3, &v.component_values(comp));
            let (_, p) = algebra::project_kp(&m, &sig).unwrap();
            assert!(p.norm() < 1e-15);
            assert!(m.norm() > 0.0);
        }
    }

    #[test]
    fn same_seed_same_field() {
        let chart = Chart::unit_torus(3);
        let f = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_trig_scalar(&chart, &TrigParams::default(), &mut rng)
                .unwrap()
                .eval(&[0.3, 0.4, 0.5], 2)
        };
        assert_eq!(f(7), f(7));
        assert_ne!(f(7), f(8));
    }
}
