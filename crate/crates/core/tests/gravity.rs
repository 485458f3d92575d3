mod common;

use approx::assert_abs_diff_eq;
use csgrav::algebra::{self, AffElt, PairingKind, Signature};
use csgrav::gauge::{cs_form, curvature, gauge_transform, GaugeMap, GaugePotential};
use csgrav::gravity::*;
use csgrav::jetfields::*;
use csgrav::sampling::{random_k_translation_form, random_section, TrigParams};
use csgrav::Error;
use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};

use common::{random_points, rng, sup, sup_diff};

const CONNECTION: TrigParams = TrigParams {
    max_frequency: 2,
    terms: 2,
    amplitude: 0.4,
};

fn scaled_flat(chart: &Chart, c: f64) -> GravSection {
    let flat = GravSection::flat(chart.clone()).unwrap();
    GravSection::new(flat.theta().scale(c), flat.omega().clone()).unwrap()
}

fn constant_omega(chart: &Chart, values: &[DMatrix<f64>; 3]) -> ValuedForm {
    let v: Vec<f64> = values
        .iter()
        .flat_map(|m| m.transpose().as_slice().to_vec())
        .collect();
    ValuedForm::constant(chart.clone(), 1, ValueSpace::Gl(3), v).unwrap()
}

fn zeta_matrix(zeta: &ValuedForm, x: &[f64]) -> Matrix3<f64> {
    let v = zeta.values(x).unwrap().component_values(0);
    Matrix3::from_row_slice(&v)
}

#[test]
fn metric_of_identity_and_scaled_frames() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let x = [0.1, 0.2, 0.3];
    let flat = GravSection::flat(chart.clone()).unwrap();
    let eta = Matrix3::from_diagonal(&nalgebra::Vector3::new(-1.0, 1.0, 1.0));
    assert_eq!(
        zeta_matrix(&metric_from_frame(&flat, &sig).unwrap(), &x),
        eta
    );
    let scaled = scaled_flat(&chart, 2.0);
    assert_eq!(
        zeta_matrix(&metric_from_frame(&scaled, &sig).unwrap(), &x),
        eta * 0.25
    );
}

#[test]
fn metric_of_random_frame_is_symmetric_with_signature() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(41);
    let s = random_section(&chart, &sig, &CONNECTION, 0.1, true, &mut r).unwrap();
    let zeta = metric_from_frame(&s, &sig).unwrap();
    for x in random_points(&chart, 100, &mut r) {
        let z = zeta_matrix(&zeta, &x);
        assert_eq!(z, z.transpose());
        let mut ev: Vec<f64> = SymmetricEigen::new(z).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!(ev[0] < 0.0 && ev[1] > 0.0 && ev[2] > 0.0);
    }
}

#[test]
fn metric_jets_match_inverse_identity_and_differences() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(42);
    let s = random_section(&chart, &sig, &CONNECTION, 0.15, true, &mut r).unwrap();
    let zeta = metric_from_frame(&s, &sig).unwrap();
    let h = 1e-5;
    for x in random_points(&chart, 10, &mut r) {
        let j = zeta.eval(&x, 2).unwrap();
        for mu in 0..3 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[mu] += h;
            xm[mu] -= h;
            let (zp, zm) = (zeta.eval(&xp, 1).unwrap(), zeta.eval(&xm, 1).unwrap());
            for b in 0..9 {
                let fd = (zp.value(0, b) - zm.value(0, b)) / (2.0 * h);
                assert_abs_diff_eq!(j.get(0, b).grad[mu], fd, epsilon = 1e-6);
                for nu in 0..3 {
                    let fd2 = (zp.get(0, b).grad[nu] - zm.get(0, b).grad[nu]) / (2.0 * h);
                    assert_abs_diff_eq!(j.get(0, b).hess[mu][nu], fd2, epsilon = 1e-4);
                }
            }
        }
    }
}

#[test]
fn singular_coframe_is_rejected() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let flat = GravSection::flat(chart.clone()).unwrap();
    let degenerate = GravSection::new(flat.theta().scale(0.0), flat.omega().clone()).unwrap();
    let zeta = metric_from_frame(&degenerate, &sig).unwrap();
    assert!(matches!(
        zeta.values(&[0.0; 3]),
        Err(Error::Singular { .. })
    ));
    assert!(matches!(
        degenerate.check_coframe(&[vec![0.0; 3]]),
        Err(Error::Singular { .. })
    ));
}

#[test]
fn orthogonality_examples() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(43);
    let pts = random_points(&chart, 50, &mut r);
    let tol = 1e-10;
    for _ in 0..5 {
        let s = random_section(&chart, &sig, &CONNECTION, 0.1, false, &mut r).unwrap();
        let zeta = metric_from_frame(&s, &sig).unwrap();
        let rep = orthogonality_check(&s, &zeta, &sig, tol, &pts).unwrap();
        assert!(rep.orthogonal);
        assert_eq!(rep.sup_residual, 0.0);

        let bump =
            ValuedForm::constant(chart.clone(), 0, ValueSpace::Gl(3), vec![10.0 * tol; 9]).unwrap();
        let rep = orthogonality_check(&s, &zeta.add(&bump).unwrap(), &sig, tol, &pts).unwrap();
        assert!(!rep.orthogonal);
    }

    let eta = ValuedForm::constant(
        chart.clone(),
        0,
        ValueSpace::Gl(3),
        vec![-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    )
    .unwrap();
    let rep = orthogonality_check(&scaled_flat(&chart, 2.0), &eta, &sig, tol, &pts).unwrap();
    assert!(!rep.orthogonal);
    assert_eq!(rep.sup_residual, 0.75);
    let v = rep.residual.values(&[0.5; 3]).unwrap().component_values(0);
    assert_eq!(v, vec![0.75, 0.0, 0.0, 0.0, -0.75, 0.0, 0.0, 0.0, -0.75]);
}

#[test]
fn metricity_examples() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(44);
    let pts = random_points(&chart, 50, &mut r);

    let flat = GravSection::flat(chart.clone()).unwrap();
    let m = metricity_residual(&flat, &sig).unwrap();
    assert_eq!(sup(&m.p_part, &pts), 0.0);
    assert_eq!(sup(&m.nabla, &pts), 0.0);

    let k = random_section(&chart, &sig, &CONNECTION, 0.1, true, &mut r).unwrap();
    let m = metricity_residual(&k, &sig).unwrap();
    assert!(sup(&m.p_part, &pts) <= 1e-12);
    assert!(sup(&m.nabla, &pts) <= 1e-12);

    let id = DMatrix::identity(3, 3);
    let z = DMatrix::zeros(3, 3);
    let omega = constant_omega(&chart, &[id, z.clone(), z]);
    let pure_p = GravSection::new(flat.theta().clone(), omega.clone()).unwrap();
    let m = metricity_residual(&pure_p, &sig).unwrap();
    assert_eq!(sup_diff(&m.p_part, &omega, &pts), 0.0);
    assert!(sup(&m.nabla, &pts) > 1.0);
}

#[test]
fn nabla_is_two_p_eta() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(45);
    let pts = random_points(&chart, 20, &mut r);
    let eta = sig.eta();
    for k in 0..50 {
        let admissible = k % 2 == 0;
        let s = random_section(&chart, &sig, &CONNECTION, 0.1, admissible, &mut r).unwrap();
        let m = metricity_residual(&s, &sig).unwrap();
        let p_sup = sup(&m.p_part, &pts);
        let n_sup = sup(&m.nabla, &pts);
        assert_eq!(p_sup <= 1e-12, n_sup <= 1e-10);
        assert_eq!(admissible, p_sup <= 1e-12);
        for x in &pts[..5] {
            let (p, n) = (m.p_part.values(x).unwrap(), m.nabla.values(x).unwrap());
            for mu in 0..3 {
                let pm = DMatrix::from_row_slice(3, 3, &p.component_values(mu));
                // θ(∇ζ)θᵀ = ωη + ηωᵀ, and kη is antisymmetric while pη is symmetric
                let expect = &pm * &eta * 2.0;
                let got = DMatrix::from_row_slice(3, 3, &n.component_values(mu));
                assert!((got - expect).amax() <= 1e-12);
            }
        }
    }
}

#[test]
fn torsion_examples() {
    let chart = Chart::unit_torus(3);
    let flat = GravSection::flat(chart.clone()).unwrap();
    let pts = [vec![0.3, 0.1, 0.8]];
    assert_eq!(sup(&torsion(&flat).unwrap(), &pts), 0.0);

    let c = 0.7;
    let e12 = algebra::elementary(3, 0, 1) * c;
    let z = DMatrix::zeros(3, 3);
    // ω = c E¹₂ dx² ⇒ Θ¹ = c dx² ∧ dx² = 0
    let s = GravSection::new(
        flat.theta().clone(),
        constant_omega(&chart, &[z.clone(), e12.clone(), z.clone()]),
    )
    .unwrap();
    assert_eq!(sup(&torsion(&s).unwrap(), &pts), 0.0);
    // ω = c E¹₂ dx³ ⇒ Θ¹ = c dx³ ∧ dx² = −c dx² ∧ dx³
    let s = GravSection::new(
        flat.theta().clone(),
        constant_omega(&chart, &[z.clone(), z, e12]),
    )
    .unwrap();
    let t = torsion(&s).unwrap().values(&pts[0]).unwrap();
    assert_eq!(t.value(2, 0), -c);
    assert_eq!(t.value_max_abs(), c);
}

#[test]
fn torsion_matches_component_formula() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(46);
    let s = random_section(&chart, &sig, &CONNECTION, 0.2, false, &mut r).unwrap();
    let t = torsion(&s).unwrap();
    let pairs = [(0, 1), (0, 2), (1, 2)];
    for x in random_points(&chart, 20, &mut r) {
        let th = s.theta().eval(&x, 1).unwrap();
        let om = s.omega().values(&x).unwrap();
        let tv = t.values(&x).unwrap();
        for (c, &(mu, nu)) in pairs.iter().enumerate() {
            for i in 0..3 {
                let mut e = th.get(nu, i).grad[mu] - th.get(mu, i).grad[nu];
                for j in 0..3 {
                    e += om.value(mu, i * 3 + j) * th.value(nu, j)
                        - om.value(nu, i * 3 + j) * th.value(mu, j);
                }
                assert_abs_diff_eq!(tv.value(c, i), e, epsilon = 1e-12);
            }
        }
    }
}

/// `(a ∧ B)_{123}` for a 1-form `a` and 2-form `B` given by components.
fn wedge_123(a: [f64; 3], b12: f64, b13: f64, b23: f64) -> f64 {
    a[0] * b23 - a[1] * b13 + a[2] * b12
}

#[test]
fn palatini_for_constant_k_connection() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(47);
    let flat = GravSection::flat(chart.clone()).unwrap();
    let x = vec![0.2, 0.4, 0.6];
    assert_eq!(
        sup(
            &palatini_form(&flat, &sig).unwrap(),
            std::slice::from_ref(&x)
        ),
        0.0
    );
    for _ in 0..5 {
        use rand::Rng;
        let w: [DMatrix<f64>; 3] = std::array::from_fn(|_| {
            let xi: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
            algebra::iso_k_r3(&xi, &sig).unwrap()
        });
        let s = GravSection::new(flat.theta().clone(), constant_omega(&chart, &w)).unwrap();
        let value = palatini_form(&s, &sig)
            .unwrap()
            .values(&x)
            .unwrap()
            .value(0, 0);
        // Ω_{μν} = [ω_μ, ω_ν] for constant ω
        let br = |a: usize, b: usize| &w[a] * &w[b] - &w[b] * &w[a];
        let (o12, o13, o23) = (br(0, 1), br(0, 2), br(1, 2));
        let mut expect = 0.0;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut dxi = [0.0; 3];
                    dxi[i] = 1.0;
                    expect += sig.entry(k, k)
                        * algebra::levi_civita(k, i, j)
                        * wedge_123(dxi, o12[(j, k)], o13[(j, k)], o23[(j, k)]);
                }
            }
        }
        assert_abs_diff_eq!(value, expect, epsilon = 1e-13);
        assert!(expect.abs() > 1e-3);
    }
}

#[test]
fn palatini_scaling_in_connection() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(48);
    let s = random_section(&chart, &sig, &CONNECTION, 0.1, true, &mut r).unwrap();
    let at = |t: f64| {
        let st = GravSection::new(s.theta().clone(), s.omega().scale(t)).unwrap();
        palatini_form(&st, &sig).unwrap()
    };
    for x in random_points(&chart, 10, &mut r) {
        let p: Vec<f64> = [0.0, 1.0, 2.0, 3.0]
            .iter()
            .map(|&t| at(t).values(&x).unwrap().value(0, 0))
            .collect();
        assert_eq!(p[0], 0.0);
        // P(t) = a t + b t²: vanishing third difference
        let scale = p.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        assert!((p[3] - 3.0 * p[2] + 3.0 * p[1] - p[0]).abs() <= 1e-12 * scale);
        let b = (p[2] - 2.0 * p[1]) / 2.0;
        assert!(b.abs() > 1e-6);
    }
}

#[test]
fn palatini_pairing_form_is_minus_palatini() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(49);
    let pts = random_points(&chart, 100, &mut r);
    for _ in 0..5 {
        let s = random_section(&chart, &sig, &CONNECTION, 0.1, true, &mut r).unwrap();
        let pg = palatini_form(&s, &sig).unwrap();
        let pair = palatini_pairing_form(&s, &sig).unwrap();
        assert!(sup(&pg.add(&pair).unwrap(), &pts) <= 1e-10);
        assert!(sup(&pg, &pts) > 1e-2);
    }
}

#[test]
fn witten_lift_examples() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(50);
    let pts = random_points(&chart, 50, &mut r);
    let flat = GravSection::flat(chart.clone()).unwrap();
    let a = witten_lift(&flat).unwrap();
    let v = a.form().values(&pts[0]).unwrap();
    for mu in 0..3 {
        let mut expect = vec![0.0; 12];
        expect[9 + mu] = 1.0;
        assert_eq!(v.component_values(mu), expect);
    }
    assert_eq!(sup(&curvature(&a).unwrap(), &pts), 0.0);

    let s = random_section(&chart, &sig, &CONNECTION, 0.1, true, &mut r).unwrap();
    let red = reduce_connection(&witten_lift(&s).unwrap(), &sig, 1e-12, &pts).unwrap();
    assert!(red.p_sup <= 1e-15);
}

#[test]
fn witten_lift_curvature_splits() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(51);
    let pts = random_points(&chart, 50, &mut r);
    for admissible in [true, false] {
        let s = random_section(&chart, &sig, &CONNECTION, 0.2, admissible, &mut r).unwrap();
        let f = curvature(&witten_lift(&s).unwrap()).unwrap();
        let omega_f = spin_curvature(&s).unwrap();
        let tors = torsion(&s).unwrap();
        for x in &pts {
            let (fv, ov, tv) = (
                f.values(x).unwrap(),
                omega_f.values(x).unwrap(),
                tors.values(x).unwrap(),
            );
            for c in 0..3 {
                for b in 0..9 {
                    assert!((fv.value(c, b) - ov.value(c, b)).abs() <= 1e-10);
                }
                for i in 0..3 {
                    assert!((fv.value(c, 9 + i) - tv.value(c, i)).abs() <= 1e-10);
                }
            }
        }
    }
}

#[test]
fn cs_of_section_examples() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(52);
    let pts = random_points(&chart, 50, &mut r);
    let flat = GravSection::flat(chart.clone()).unwrap();
    assert_eq!(sup(&cs_of_section(&flat, &sig).unwrap(), &pts), 0.0);
    let s = random_section(&chart, &sig, &CONNECTION, 0.3, true, &mut r).unwrap();
    let no_connection = GravSection::new(s.theta().clone(), flat.omega().clone()).unwrap();
    assert!(sup(&cs_of_section(&no_connection, &sig).unwrap(), &pts) <= 1e-15);
}

#[test]
fn cs_of_section_matches_component_expansion() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(53);
    let s = random_section(&chart, &sig, &CONNECTION, 0.2, true, &mut r).unwrap();
    let cs = cs_of_section(&s, &sig).unwrap();
    let a = witten_lift(&s).unwrap();
    for x in random_points(&chart, 20, &mut r) {
        let j = a.form().eval(&x, 1).unwrap();
        let elt = |mu: usize| AffElt::from_coords(3, &j.component_values(mu)).unwrap();
        let d_elt = |mu: usize, nu: usize| {
            let v: Vec<f64> = (0..12).map(|b| j.get(nu, b).grad[mu]).collect();
            AffElt::from_coords(3, &v).unwrap()
        };
        let sub = |p: AffElt, q: AffElt| AffElt::new(p.lin - q.lin, p.trans - q.trans).unwrap();
        let add = |p: AffElt, q: AffElt| AffElt::new(p.lin + q.lin, p.trans + q.trans).unwrap();
        // 2-form components of dA + ⅓[A∧A]: ∂_μA_ν − ∂_νA_μ + ⅔[A_μ, A_ν]
        let inner = |mu: usize, nu: usize| {
            let br = algebra::bracket_aff(&elt(mu), &elt(nu)).unwrap();
            let br = AffElt::new(br.lin * (2.0 / 3.0), br.trans * (2.0 / 3.0)).unwrap();
            add(sub(d_elt(mu, nu), d_elt(nu, mu)), br)
        };
        let pair = |p: &AffElt, q: &AffElt| algebra::pair_aff(p, q, &sig).unwrap();
        let expect =
            pair(&elt(0), &inner(1, 2)) - pair(&elt(1), &inner(0, 2)) + pair(&elt(2), &inner(0, 1));
        assert_abs_diff_eq!(cs.values(&x).unwrap().value(0, 0), expect, epsilon = 1e-12);
    }
}

#[test]
fn correspondence_of_flat_section() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let grid = QuadratureGrid::uniform(3, 5).unwrap();
    let c = correspondence(
        &GravSection::flat(chart).unwrap(),
        &sig,
        &grid,
        ADMISSIBILITY_TOL,
    )
    .unwrap();
    assert_eq!(
        (c.integral_pg, c.integral_cs, c.integral_diff),
        (0.0, 0.0, 0.0)
    );
    assert_eq!(c.ratio, None);
}

#[test]
fn correspondence_ratio_is_minus_two() {
    let sig = Signature::lorentz3();
    let chart = Chart::periodic(&[1.0, 1.5, 2.0]).unwrap();
    let mut r = rng(54);
    let grid = QuadratureGrid::for_bandwidth(3, 2);
    for _ in 0..5 {
        let s = random_section(&chart, &sig, &CONNECTION, 0.1, true, &mut r).unwrap();
        let c = correspondence(&s, &sig, &grid, ADMISSIBILITY_TOL).unwrap();
        let ratio = c.ratio.unwrap();
        assert!((ratio + 2.0).abs() <= 1e-9, "{ratio}");
        assert!((c.integral_diff - (c.integral_cs - c.integral_pg)).abs() <= 1e-12);
    }
}

#[test]
fn correspondence_rejects_inadmissible_sections() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(55);
    let s = random_section(&chart, &sig, &CONNECTION, 0.1, false, &mut r).unwrap();
    let grid = QuadratureGrid::uniform(3, 5).unwrap();
    assert!(matches!(
        correspondence(&s, &sig, &grid, ADMISSIBILITY_TOL),
        Err(Error::Inadmissible { .. })
    ));
    let boxed = Chart::boxed(&[0.0; 3], &[1.0; 3]).unwrap();
    let flat = GravSection::flat(boxed).unwrap();
    assert_eq!(
        correspondence(&flat, &sig, &grid, 1e-10).unwrap_err(),
        Error::NonPeriodicChart
    );
}

#[test]
fn gauge_shifted_section_has_equal_actions() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(56);
    let params = TrigParams {
        max_frequency: 1,
        terms: 2,
        amplitude: 0.3,
    };
    let s = random_section(&chart, &sig, &params, 0.1, true, &mut r).unwrap();
    let g = GaugeMap::exp(random_k_translation_form(&chart, 0, &sig, &params, &mut r).unwrap())
        .unwrap();
    let shifted = gauge_transform(&witten_lift(&s).unwrap(), &g).unwrap();
    let grid = QuadratureGrid::uniform(3, 16).unwrap();
    let pts = grid.points(&chart);
    let red = reduce_connection(&shifted, &sig, 1e-12, &pts).unwrap();
    assert!(red.reducible);
    let moved = red.section().unwrap();
    let before = correspondence(&s, &sig, &grid, ADMISSIBILITY_TOL).unwrap();
    let after = correspondence(&moved, &sig, &grid, ADMISSIBILITY_TOL).unwrap();
    let scale = before.integral_pg.abs().max(1e-3);
    assert!((before.integral_cs - after.integral_cs).abs() <= 1e-9 * scale);
    assert!((before.integral_pg - after.integral_pg).abs() <= 1e-9 * scale);
    let direct =
        integrate_top(&cs_form(&shifted, PairingKind::Aff3, &sig).unwrap(), &grid).unwrap();
    assert!((direct - after.integral_cs).abs() <= 1e-12);
}

#[test]
fn reduce_connection_examples() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let mut r = rng(57);
    let pts = random_points(&chart, 50, &mut r);

    let s = random_section(&chart, &sig, &CONNECTION, 0.1, true, &mut r).unwrap();
    let a = witten_lift(&s).unwrap();
    let red = reduce_connection(&a, &sig, 1e-12, &pts).unwrap();
    assert!(red.reducible);
    let back = witten_lift(&red.section().unwrap()).unwrap();
    assert_eq!(sup_diff(back.form(), a.form(), &pts), 0.0);

    let mut coords = vec![0.0; 36];
    for i in 0..3 {
        coords[i * 3 + i] = 1.0;
    }
    let id_dx1 = GaugePotential::new(
        ValuedForm::constant(chart.clone(), 1, ValueSpace::Aff(3), coords).unwrap(),
    )
    .unwrap();
    assert!(
        !reduce_connection(&id_dx1, &sig, 1e-12, &pts)
            .unwrap()
            .reducible
    );

    let zero = GaugePotential::zero(chart, ValueSpace::Aff(3)).unwrap();
    let red = reduce_connection(&zero, &sig, 1e-12, &pts).unwrap();
    assert!(red.reducible);
    assert_eq!(sup(&red.theta, &pts), 0.0);
    assert_eq!(sup(&red.omega_k, &pts), 0.0);
}

#[test]
fn section_construction_checks() {
    let chart = Chart::unit_torus(3);
    let flat = GravSection::flat(chart.clone()).unwrap();
    assert!(GravSection::new(flat.omega().clone(), flat.theta().clone()).is_err());
    let four = Chart::unit_torus(4);
    assert!(GravSection::flat(four).is_err());
    let translation = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    assert_eq!(AffElt::from_trans(translation).m(), 3);
}
