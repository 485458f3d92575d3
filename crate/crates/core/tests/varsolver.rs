mod common;

use std::f64::consts::PI;

use csgrav::algebra::Signature;
use csgrav::gauge::{gauge_transform, GaugeMap};
use csgrav::gravity::{
    correspondence, reduce_connection, witten_lift, GravSection, ADMISSIBILITY_TOL,
};
use csgrav::jetfields::{Chart, QuadratureGrid};
use csgrav::sampling::{random_k_translation_form, random_section, TrigParams};
use csgrav::varsolver::*;
use csgrav::Error;
use nalgebra::Matrix3;
use rand::Rng;

use common::rng;

const SMOOTH: TrigParams = TrigParams {
    max_frequency: 1,
    terms: 2,
    amplitude: 1.0,
};

fn lattice(n: usize) -> LatticeConfig {
    LatticeConfig::flat(
        Chart::unit_torus(3),
        QuadratureGrid::uniform(3, n).unwrap(),
        Signature::lorentz3(),
    )
    .unwrap()
}

fn sampled(section: &GravSection, n: usize) -> LatticeConfig {
    LatticeConfig::from_section(
        section,
        QuadratureGrid::uniform(3, n).unwrap(),
        Signature::lorentz3(),
        1e-10,
    )
    .unwrap()
}

fn perturbed_start(n: usize, magnitude: f64, seed: u64) -> LatticeConfig {
    let flat = lattice(n);
    let p = Perturbation::random_smooth(&flat, &SMOOTH, &mut rng(seed)).unwrap();
    let p = p.scaled(magnitude / p.l2_norm(flat.cell_volume()));
    flat.perturbed(&p, 1.0).unwrap()
}

fn admissible_section(seed: u64) -> GravSection {
    let params = TrigParams {
        max_frequency: 1,
        terms: 2,
        amplitude: 0.4,
    };
    random_section(
        &Chart::unit_torus(3),
        &Signature::lorentz3(),
        &params,
        0.1,
        true,
        &mut rng(seed),
    )
    .unwrap()
}

#[test]
fn constant_field_has_zero_differences() {
    let mut cfg = lattice(4);
    let c = Matrix3::new(1.0, 0.2, -0.3, 0.0, 2.0, 0.1, 0.5, 0.0, 1.5);
    cfg.theta = vec![c; cfg.len()];
    cfg.omega_k = vec![c * 0.5; cfg.len()];
    for jet in prolong(&cfg) {
        assert_eq!(jet.theta, c);
        for a in 0..3 {
            assert_eq!(jet.d_theta[a], Matrix3::zeros());
            assert_eq!(jet.d_omega_k[a], Matrix3::zeros());
        }
    }
}

fn sine_error(n: usize, period: f64) -> f64 {
    let counts = [n, 4, 3];
    let h = period / n as f64;
    let k = 2.0 * PI / period;
    let values: Vec<f64> = (0..n * 12)
        .map(|s| (k * (s / 12) as f64 * h).sin())
        .collect();
    let d = central_difference(&values, &counts, h, 0).unwrap();
    (0..n * 12)
        .map(|s| (d[s] - k * (k * (s / 12) as f64 * h).cos()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn central_difference_is_second_order() {
    let period = 2.0;
    let e32 = sine_error(32, period);
    let h = period / 32.0;
    let k = 2.0 * PI / period;
    // sin(kh)/h − k ≈ −k³h²/6
    assert!(e32 <= k.powi(3) * h * h / 6.0 * 1.001);
    for n in [16, 32, 64] {
        let ratio = sine_error(n, period) / sine_error(2 * n, period);
        assert!((3.7..=4.3).contains(&ratio), "{n}: {ratio}");
    }
}

#[test]
fn prolong_matches_central_difference() {
    let cfg = perturbed_start(5, 0.3, 1);
    let jets = prolong(&cfg);
    let h = cfg.spacing();
    for axis in 0..3 {
        let vals: Vec<f64> = cfg.theta.iter().map(|m| m[(1, 2)]).collect();
        let d = central_difference(&vals, cfg.grid().counts(), h[axis], axis).unwrap();
        for (s, j) in jets.iter().enumerate() {
            assert_eq!(j.d_theta[axis][(1, 2)], d[s]);
        }
    }
}

#[test]
fn lattice_construction_errors() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    assert_eq!(
        LatticeConfig::flat(
            chart.clone(),
            QuadratureGrid::new(&[2, 4, 4]).unwrap(),
            sig.clone()
        )
        .unwrap_err(),
        Error::GridTooSmall { min: 3 }
    );
    let boxed = Chart::boxed(&[0.0; 3], &[1.0; 3]).unwrap();
    assert_eq!(
        LatticeConfig::flat(boxed, QuadratureGrid::uniform(3, 4).unwrap(), sig.clone())
            .unwrap_err(),
        Error::NonPeriodicChart
    );
    assert!(central_difference(&[0.0; 8], &[2, 2, 2], 0.5, 0).is_err());
    let bad = random_section(
        &chart,
        &sig,
        &TrigParams::default(),
        0.1,
        false,
        &mut rng(2),
    )
    .unwrap();
    assert!(matches!(
        LatticeConfig::from_section(&bad, QuadratureGrid::uniform(3, 4).unwrap(), sig, 1e-10),
        Err(Error::Inadmissible { .. })
    ));
    let mut singular = lattice(3);
    singular.theta[5] = Matrix3::zeros();
    assert!(matches!(
        discrete_action(&singular, ActionKind::Palatini),
        Err(Error::Singular { .. })
    ));
}

#[test]
fn flat_family_is_stationary() {
    let mut r = rng(3);
    for k in 0..5 {
        let mut cfg = lattice(6);
        if k > 0 {
            let c = Matrix3::identity() + Matrix3::from_fn(|_, _| r.gen_range(-0.3..0.3));
            cfg.theta = vec![c; cfg.len()];
        }
        let res = el_residual(&cfg);
        assert!(res.curv_sup <= 1e-14 && res.tors_sup <= 1e-14);
        for which in [ActionKind::Palatini, ActionKind::ChernSimons] {
            assert_eq!(discrete_action(&cfg, which).unwrap(), 0.0);
            for _ in 0..10 {
                let p = Perturbation::random_smooth(&cfg, &SMOOTH, &mut r).unwrap();
                let dd = directional_derivative(&cfg, &p, which, 1e-5).unwrap();
                assert!(dd.abs() <= 1e-8 * p.l2_norm(cfg.cell_volume()), "{dd}");
            }
        }
    }
}

#[test]
fn directional_derivative_contracts() {
    let cfg = perturbed_start(5, 0.3, 4);
    let zero = Perturbation::zero(cfg.len());
    assert_eq!(
        directional_derivative(&cfg, &zero, ActionKind::Palatini, 1e-5).unwrap(),
        0.0
    );
    assert!(directional_derivative(&cfg, &zero, ActionKind::Palatini, 0.0).is_err());
    assert!(directional_derivative(&cfg, &zero, ActionKind::Palatini, -1.0).is_err());
}

#[test]
fn cs_is_even_in_connection_at_constant_coframe() {
    let mut r = rng(5);
    let mut cfg = lattice(6);
    let c = Matrix3::identity() + Matrix3::from_fn(|_, _| r.gen_range(-0.3..0.3));
    cfg.theta = vec![c; cfg.len()];
    for _ in 0..5 {
        let mut p = Perturbation::random_smooth(&cfg, &SMOOTH, &mut r).unwrap();
        p.theta = vec![Matrix3::zeros(); cfg.len()];
        let dd = directional_derivative(&cfg, &p, ActionKind::ChernSimons, 1e-3).unwrap();
        assert!(dd.abs() <= 1e-14);
        // S(+t δω) = S(−t δω)
        let plus =
            discrete_action(&cfg.perturbed(&p, 0.1).unwrap(), ActionKind::ChernSimons).unwrap();
        let minus =
            discrete_action(&cfg.perturbed(&p, -0.1).unwrap(), ActionKind::ChernSimons).unwrap();
        assert!((plus - minus).abs() <= 1e-14 * plus.abs().max(1.0));
        assert!(plus.abs() > 1e-6);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut r = rng(6);
    let cfg = perturbed_start(5, 0.5, 7);
    let (obj, grad) = objective_and_gradient(&cfg);
    assert_eq!(obj, el_residual(&cfg).objective());
    for _ in 0..5 {
        let d = Perturbation::random_smooth(&cfg, &SMOOTH, &mut r).unwrap();
        let e = 1e-5;
        let fd = (el_residual(&cfg.perturbed(&d, e).unwrap()).objective()
            - el_residual(&cfg.perturbed(&d, -e).unwrap()).objective())
            / (2.0 * e);
        let an = grad.dot(&d);
        assert!((an - fd).abs() <= 1e-7 * an.abs().max(1e-3), "{an} {fd}");
    }
}

#[test]
fn discrete_actions_converge_at_second_order() {
    let sig = Signature::lorentz3();
    for seed in [10, 11] {
        let s = admissible_section(seed);
        let exact = correspondence(
            &s,
            &sig,
            &QuadratureGrid::for_bandwidth(3, 1),
            ADMISSIBILITY_TOL,
        )
        .unwrap();
        for (which, target) in [
            (ActionKind::Palatini, exact.integral_pg),
            (ActionKind::ChernSimons, exact.integral_cs),
        ] {
            let err = |n| (discrete_action(&sampled(&s, n), which).unwrap() - target).abs();
            let (e16, e32, e33) = (err(16), err(32), err(33));
            let ratio = e16 / e32;
            assert!((3.5..=4.5).contains(&ratio), "{ratio}");
            // frequency-1 fields: relative error of a central difference is
            // about (2π/N)²/6
            let bound = (2.0 * PI / 33.0).powi(2) / 6.0;
            assert!(e33 / target.abs() <= 1.5 * bound, "{}", e33 / target.abs());
        }
    }
}

#[test]
fn discrete_actions_keep_measured_ratio() {
    let sig = Signature::lorentz3();
    for seed in [12, 13, 14] {
        let s = admissible_section(seed);
        let ratio = correspondence(
            &s,
            &sig,
            &QuadratureGrid::for_bandwidth(3, 1),
            ADMISSIBILITY_TOL,
        )
        .unwrap()
        .ratio
        .unwrap();
        for n in [8, 16] {
            let cfg = sampled(&s, n);
            let pg = discrete_action(&cfg, ActionKind::Palatini).unwrap();
            let cs = discrete_action(&cfg, ActionKind::ChernSimons).unwrap();
            assert!((cs - ratio * pg).abs() <= 1e-9 * pg.abs().max(1.0));
        }
    }
}

#[test]
fn gauge_transformed_flat_has_second_order_residual() {
    let sig = Signature::lorentz3();
    let chart = Chart::unit_torus(3);
    let params = TrigParams {
        max_frequency: 1,
        terms: 2,
        amplitude: 0.3,
    };
    let chi = random_k_translation_form(&chart, 0, &sig, &params, &mut rng(15)).unwrap();
    let g = GaugeMap::exp(chi).unwrap();
    let flat = GravSection::flat(chart.clone()).unwrap();
    let moved = gauge_transform(&witten_lift(&flat).unwrap(), &g).unwrap();
    let pts = QuadratureGrid::uniform(3, 4).unwrap().points(&chart);
    let section = reduce_connection(&moved, &sig, 1e-10, &pts)
        .unwrap()
        .section()
        .unwrap();
    let norm = |n| {
        let res = el_residual(&sampled(&section, n));
        res.curv_l2.hypot(res.tors_l2)
    };
    let (r16, r32) = (norm(16), norm(32));
    assert!(r16 > 1e-6);
    assert!((3.5..=4.5).contains(&(r16 / r32)), "{}", r16 / r32);
}

#[test]
fn random_configuration_is_not_flat() {
    let res = el_residual(&sampled(&admissible_section(16), 8));
    assert!(res.curv_l2 > 1e-3 && res.tors_l2 > 1e-3);
    assert!(res.curv_sup >= res.curv_l2 * 0.1);
}

#[test]
fn descend_from_flat_converges_immediately() {
    let (end, rep) = descend(&lattice(6), &DescentOptions::default()).unwrap();
    assert_eq!(rep.iterations, 0);
    assert!(rep.converged);
    assert_eq!(end, lattice(6));
    assert_eq!(rep.objective, vec![0.0]);
}

#[test]
fn descend_rejects_bad_options() {
    let opts = DescentOptions {
        step0: 0.0,
        ..Default::default()
    };
    assert!(descend(&lattice(4), &opts).is_err());
}

#[test]
fn descend_reaches_a_stationary_configuration() {
    let start = perturbed_start(16, 1e-2, 17);
    let (end, rep) = descend(&start, &DescentOptions::default()).unwrap();
    assert!(rep.iterations <= 500);
    assert!(rep.final_objective() * 1e3 <= rep.initial_objective());
    for w in rep.objective.windows(2) {
        assert!(w[1] <= w[0]);
    }
    assert_eq!(rep.objective.len(), rep.iterations + 1);
    assert_eq!(rep.final_objective(), el_residual(&end).objective());
    let st = stationarity_report(&end, 10, 1e-5, -2.0, 18).unwrap();
    assert!(st.max_pg <= 1e-6 * st.action_scale);
    assert!(st.max_cs <= 1e-6 * st.action_scale);
}

#[test]
fn large_perturbation_descent_is_monotone() {
    let start = perturbed_start(6, 0.5, 19);
    let opts = DescentOptions {
        max_iters: 40,
        step0: 1.0,
        tol: 0.0,
    };
    let (_, rep) = descend(&start, &opts).unwrap();
    assert!(rep.iterations > 0);
    for w in rep.objective.windows(2) {
        assert!(w[1] <= w[0]);
    }
}

#[test]
fn descent_is_deterministic_across_thread_counts() {
    let start = perturbed_start(8, 1e-2, 20);
    let opts = DescentOptions {
        max_iters: 30,
        ..Default::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| descend(&start, &opts).unwrap())
    };
    let (a, ra) = run(1);
    let (b, rb) = run(3);
    assert!(ra.same_run(&rb));
    assert_eq!(a, b);
}

#[test]
fn stationarity_side_by_side() {
    let flat = lattice(6);
    let st = stationarity_report(&flat, 5, 1e-5, -2.0, 21).unwrap();
    assert_eq!(st.directions.len(), 5);
    assert!(st.max_pg <= 1e-8 && st.max_cs <= 1e-8);

    let cfg = sampled(&admissible_section(22), 8);
    let st = stationarity_report(&cfg, 5, 1e-5, -2.0, 23).unwrap();
    assert!(st.max_pg > 1e-3);
    assert!(st.max_diff <= 1e-8 * st.max_pg);
    for d in &st.directions {
        assert!(d.richardson_gap <= 1e-6 * d.pg.abs().max(1.0));
    }
}
