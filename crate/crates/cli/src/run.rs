use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use csgrav::algebra::PairingKind;
use csgrav::gravity::{correspondence, Correspondence};
use csgrav::jetfields::{Chart, QuadratureGrid, ValueSpace};
use csgrav::varsolver::{
    descend, discrete_action, stationarity_report, ActionKind, DescentOptions, LatticeConfig,
    Perturbation,
};
use csgrav::Error;

use crate::checks::{self, FieldGen, SPACES};
use crate::error::{CliError, CliResult};
use crate::report::{CheckRecord, History, Report};
use crate::spec::{Command, FieldSpec, RunSpec};

/// A finished run: the report, plus the iteration history for `extremize`.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub history: Option<History>,
}

pub fn run(spec: &RunSpec) -> CliResult<Outcome> {
    spec.validate()?;
    match spec.command {
        Command::Verify => run_verify(spec).map(no_history),
        Command::Correspond => run_correspond(spec).map(no_history),
        Command::Chern => run_chern(spec).map(no_history),
        Command::Extremize => run_extremize(spec),
    }
}

fn no_history(report: Report) -> Outcome {
    Outcome {
        report,
        history: None,
    }
}

fn chart_of(spec: &RunSpec) -> CliResult<Chart> {
    Chart::periodic(&spec.chart.periods).map_err(|e| CliError::Invalid(e.to_string()))
}

fn grid_of(spec: &RunSpec) -> CliResult<QuadratureGrid> {
    QuadratureGrid::new(&spec.grid).map_err(|e| CliError::Invalid(e.to_string()))
}

fn space_name(space: ValueSpace) -> &'static str {
    match space {
        ValueSpace::Aff(_) => "aff",
        _ => "gl",
    }
}

/// Identity suite on the fields described by the spec.
pub fn run_verify(spec: &RunSpec) -> CliResult<Report> {
    spec.validate()?;
    let sig = spec.sig();
    let chart = chart_of(spec)?;
    let grid = grid_of(spec)?;
    let gen = FieldGen::new(&spec.field_spec);
    let samples = spec.samples.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed_or_default());
    let pts = checks::random_points(&chart, samples, &mut rng);
    let mut periods4 = spec.chart.periods.clone();
    periods4.push(1.0);
    let chart4 = Chart::periodic(&periods4)?;
    let pts4 = checks::random_points(&chart4, samples, &mut rng);
    let tol = |name| spec.tolerance(name);
    let mut out = Vec::new();

    out.push(CheckRecord::max(
        "projector",
        "k/p splitting of gl(3): complementary idempotent projectors",
        checks::projector_residual(&sig, samples, &mut rng)?,
        tol("projector"),
    ));
    out.push(CheckRecord::max(
        "pairing_invariance_gl",
        "gl(3) pairing tr(η aᵀ η b) is Lorentz invariant",
        checks::pairing_invariance_gl(&sig, samples, &mut rng)?,
        tol("pairing_invariance"),
    ));
    out.push(CheckRecord::max(
        "pairing_invariance_aff",
        "affine pairing is invariant on k ⊕ R³ under the Poincaré group",
        checks::pairing_invariance_aff(&sig, samples, &mut rng)?,
        tol("pairing_invariance"),
    ));
    out.push(CheckRecord::max(
        "gram_gl",
        "gl(3) pairing is nondegenerate: ||det gram| − 1|",
        (checks::gram_det(PairingKind::GlEta, &sig)? - 1.0).abs(),
        tol("gram_gl"),
    ));
    out.push(CheckRecord::min(
        "gram_aff",
        "affine pairing is nondegenerate: |det gram|",
        checks::gram_det(PairingKind::Aff3, &sig)?,
        tol("gram_aff"),
    ));
    out.push(CheckRecord::max(
        "d_squared",
        "d ∘ d = 0",
        checks::d_squared(&gen, &chart, &pts, &mut rng)?
            .max(checks::d_squared(&gen, &chart4, &pts4, &mut rng)?),
        tol("d_squared"),
    ));
    out.push(CheckRecord::max(
        "leibniz",
        "graded Leibniz rule for pairing and bracket wedges",
        checks::leibniz(&gen, &chart, &sig, &pts, &mut rng)?
            .max(checks::leibniz(&gen, &chart4, &sig, &pts4, &mut rng)?),
        tol("leibniz"),
    ));
    for space in SPACES {
        let n = space_name(space);
        out.push(CheckRecord::max(
            &format!("bianchi_{n}"),
            "Bianchi identity dF + [A ∧ F] = 0",
            checks::bianchi(&gen, &chart, space, &sig, &pts, &mut rng)?,
            tol("bianchi"),
        ));
    }
    for space in SPACES {
        let n = space_name(space);
        out.push(CheckRecord::max(
            &format!("cs_transgression_{n}"),
            "Chern–Simons form equals the transgression ⟨A∧F⟩ − (1/6)⟨A∧[A∧A]⟩",
            checks::cs_transgression(&gen, &chart, space, &sig, &pts, &mut rng)?,
            tol("cs_transgression"),
        ));
    }
    for space in SPACES {
        let n = space_name(space);
        let (pointwise, integral) =
            checks::gauge_defect_residuals(&gen, &chart, space, &sig, &pts, &grid, &mut rng)?;
        out.push(CheckRecord::max(
            &format!("gauge_defect_{n}"),
            "gauge change of cs(A) is d⟨Ad A ∧ λ⟩ − wzw(g)",
            pointwise,
            tol("gauge_defect"),
        ));
        out.push(CheckRecord::max(
            &format!("gauge_defect_integral_{n}"),
            "integrated gauge defect on the torus, relative to ∫|cs|",
            integral,
            tol("gauge_defect_integral"),
        ));
    }
    let gauge_counts: Vec<usize> = spec
        .grid
        .iter()
        .map(|&c| c.max(10 * spec.field_spec.bandwidth() + 1))
        .collect();
    let gauge_grid = QuadratureGrid::new(&gauge_counts)?;
    for space in SPACES {
        let n = space_name(space);
        out.push(CheckRecord::max(
            &format!("action_gauge_{n}"),
            "∫cs is unchanged by gauge maps homotopic to the identity",
            checks::action_gauge_invariance(&gen, &chart, space, &sig, &gauge_grid, &mut rng)?,
            tol("action_gauge"),
        ));
    }
    for space in SPACES {
        let n = space_name(space);
        out.push(CheckRecord::max(
            &format!("wzw_closed_{n}"),
            "WZW 3-form is closed (4-torus)",
            checks::wzw_closed(&gen, &chart4, space, &sig, &pts4, &mut rng)?,
            tol("wzw_closed"),
        ));
    }
    let (relation, mismatches) =
        checks::metricity(&gen, &chart, &sig, &pts[..pts.len().min(20)], 10, &mut rng)?;
    out.push(CheckRecord::max(
        "metricity_relation",
        "frame components of ∇ζ equal 2 π_p(ω) η",
        relation,
        tol("metricity"),
    ));
    out.push(CheckRecord::max(
        "metricity_equivalence",
        "π_p(ω) = 0 exactly when ∇ζ = 0 (mismatching sections)",
        mismatches as f64,
        0.0,
    ));
    out.push(CheckRecord::max(
        "witten_split",
        "curvature of the affine lift splits into (Ω, Θ)",
        checks::witten_split(&gen, &chart, &sig, &pts, &mut rng)?,
        tol("witten_split"),
    ));
    let (roundtrip, rejected) = checks::witten_roundtrip(&gen, &chart, &sig, &pts, 5, &mut rng)?;
    let mut record = CheckRecord::max(
        "witten_roundtrip",
        "reducing the affine lift of an admissible section recovers it",
        roundtrip,
        tol("witten_roundtrip"),
    );
    if rejected > 0 {
        record = CheckRecord::max(
            "witten_roundtrip",
            &record.anchor,
            f64::INFINITY,
            record.tolerance,
        )
        .with_detail(format!(
            "{rejected} admissible lifts were not recognized as reducible"
        ));
    }
    out.push(record);
    Ok(Report::new(
        spec.clone(),
        out,
        json!({ "samples": samples, "gauge_grid": gauge_counts }),
    ))
}

fn ratio_stats(results: &[Correspondence]) -> (Option<f64>, f64, f64, f64) {
    let ratios: Vec<f64> = results.iter().filter_map(|c| c.ratio).collect();
    if ratios.is_empty() {
        return (None, 0.0, 0.0, 0.0);
    }
    let mean = csgrav::jetfields::pairwise_sum(&ratios) / ratios.len() as f64;
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (Some(mean), min, max, (max - min) / mean.abs())
}

/// Chern–Simons vs Palatini integrals over random admissible sections.
pub fn run_correspond(spec: &RunSpec) -> CliResult<Report> {
    spec.validate()?;
    let sig = spec.sig();
    let chart = chart_of(spec)?;
    let grid = grid_of(spec)?;
    let gen = FieldGen::new(&spec.field_spec);
    let contaminated = matches!(spec.field_spec, FieldSpec::TrigRandom { p_contamination, .. } if p_contamination > 0.0);
    let count = spec.sections.unwrap_or(20);
    let admissibility = spec.tolerance("admissibility");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed_or_default());
    let mut results = Vec::with_capacity(count);
    for i in 0..count {
        let section = gen.section(&chart, &sig, true, &mut rng)?;
        match correspondence(&section, &sig, &grid, admissibility) {
            Ok(c) => results.push(c),
            Err(Error::Inadmissible { sup, tol }) if contaminated => {
                let record = CheckRecord::max(
                    "admissibility",
                    "sections must have k-valued connections (metricity constraint)",
                    sup,
                    tol,
                )
                .with_detail(format!(
                    "section {i} rejected: sup |π_p(ω)| = {sup:e} exceeds {tol:e}"
                ));
                return Ok(Report::new(
                    spec.clone(),
                    vec![record],
                    json!({ "rejected_section": i }),
                ));
            }
            Err(e) => return Err(CliError::Internal(format!("section {i}: {e}"))),
        }
    }
    let (ratio, min, max, spread) = ratio_stats(&results);
    let identity = results
        .iter()
        .map(|c| {
            (c.integral_cs - ratio.unwrap_or(0.0) * c.integral_pg).abs()
                / c.integral_pg.abs().max(1.0)
        })
        .fold(0.0f64, f64::max);
    let checks = vec![
        CheckRecord::max(
            "admissibility",
            "sections must have k-valued connections (metricity constraint)",
            0.0,
            admissibility,
        ),
        CheckRecord::max(
            "ratio_spread",
            "∫CS / ∫PG is the same constant for every section (relative spread)",
            spread,
            spec.tolerance("ratio_spread"),
        ),
        CheckRecord::max(
            "integral_identity",
            "|∫CS − ratio · ∫PG| / max(|∫PG|, 1)",
            identity,
            spec.tolerance("integral_identity"),
        ),
    ];
    let sections: Vec<_> = results
        .iter()
        .map(|c| json!({ "integral_pg": c.integral_pg, "integral_cs": c.integral_cs, "ratio": c.ratio }))
        .collect();
    let data = json!({
        "sections": sections,
        "ratio": ratio,
        "ratio_min": ratio.map(|_| min),
        "ratio_max": ratio.map(|_| max),
        "ratio_spread": spread,
    });
    Ok(Report::new(spec.clone(), checks, data))
}

/// `d cs = ⟨F ∧ F⟩` and `∫ ⟨F ∧ F⟩ = 0` on a 4-torus.
pub fn run_chern(spec: &RunSpec) -> CliResult<Report> {
    spec.validate()?;
    let sig = spec.sig();
    let chart = chart_of(spec)?;
    let grid = grid_of(spec)?;
    let gen = FieldGen::new(&spec.field_spec);
    let samples = spec.samples.unwrap_or(200);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed_or_default());
    let pts = checks::random_points(&chart, samples, &mut rng);
    let mut out = Vec::new();
    let mut data = serde_json::Map::new();
    for space in SPACES {
        let n = space_name(space);
        let a = gen.potential(&chart, space, true, &sig, &mut rng)?;
        let (pointwise, integral, integral_abs) = checks::chern_weil(&a, &sig, &pts, &grid)?;
        out.push(CheckRecord::max(
            &format!("chern_weil_{n}"),
            "d cs(A) = ⟨F ∧ F⟩ pointwise",
            pointwise,
            spec.tolerance("chern_weil"),
        ));
        out.push(CheckRecord::max(
            &format!("chern_integral_{n}"),
            "∫⟨F ∧ F⟩ over the closed 4-torus vanishes, relative to max(1, ∫|⟨F ∧ F⟩|)",
            integral.abs() / integral_abs.max(1.0),
            spec.tolerance("chern_integral"),
        ));
        data.insert(
            n.into(),
            json!({ "max_pointwise": pointwise, "integral_cw": integral, "integral_abs_cw": integral_abs }),
        );
    }
    data.insert("samples".into(), json!(samples));
    Ok(Report::new(
        spec.clone(),
        out,
        serde_json::Value::Object(data),
    ))
}

/// Starting lattice configuration for `extremize`.
pub fn start_config(spec: &RunSpec) -> CliResult<LatticeConfig> {
    let sig = spec.sig();
    let chart = chart_of(spec)?;
    let grid = grid_of(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed_or_default());
    let flat = LatticeConfig::flat(chart.clone(), grid.clone(), sig.clone())?;
    match &spec.field_spec {
        FieldSpec::Flat => Ok(flat),
        FieldSpec::PerturbedFlat { magnitude } => {
            let params = csgrav::sampling::TrigParams {
                max_frequency: 1,
                terms: 2,
                amplitude: 1.0,
            };
            let p = Perturbation::random_smooth(&flat, &params, &mut rng)?;
            let norm = p.l2_norm(flat.cell_volume());
            let scale = if norm > 0.0 { magnitude / norm } else { 0.0 };
            Ok(flat.perturbed(&p, scale)?)
        }
        FieldSpec::TrigRandom { .. } => {
            let gen = FieldGen::new(&spec.field_spec);
            let section = gen.section(&chart, &sig, true, &mut rng)?;
            LatticeConfig::from_section(
                &section,
                grid,
                sig,
                spec.tolerances
                    .get("admissibility")
                    .copied()
                    .unwrap_or(1e-10),
            )
            .map_err(|e| match e {
                Error::Inadmissible { .. } => {
                    CliError::Invalid(format!("start configuration: {e}"))
                }
                e => e.into(),
            })
        }
    }
}

/// Residual descent on the lattice with a stationarity check of both
/// discrete actions at the end point.
pub fn run_extremize(spec: &RunSpec) -> CliResult<Outcome> {
    spec.validate()?;
    let solver = spec.solver.expect("validated");
    let start = start_config(spec)?;
    let opts = DescentOptions {
        max_iters: solver.max_iters,
        step0: solver.step0,
        tol: solver.tol,
    };
    let (end, rep) = descend(&start, &opts)?;
    let s_pg = discrete_action(&start, ActionKind::Palatini)?;
    let s_cs = discrete_action(&start, ActionKind::ChernSimons)?;
    let ratio = (s_pg != 0.0).then(|| s_cs / s_pg);
    let directions = spec.samples.unwrap_or(10);
    let seed = spec.seed_or_default().wrapping_add(1);
    let st = stationarity_report(&end, directions, 1e-5, ratio.unwrap_or(0.0), seed)?;
    let r0 = rep.initial_objective();
    let r1 = rep.final_objective();
    let reduction = if r0 <= solver.tol { 0.0 } else { r1 / r0 };
    let stationarity = |v: f64| v / st.action_scale;
    let mut checks = vec![
        CheckRecord::max(
            "objective",
            "residual objective ‖F‖² + ‖Θ‖² below the solver tolerance",
            r1,
            solver.tol,
        ),
        CheckRecord::max(
            "reduction",
            "final / initial residual objective",
            reduction,
            spec.tolerance("reduction"),
        ),
        CheckRecord::max(
            "stationarity_pg",
            "max |dS_PG| over unit directions / action scale",
            stationarity(st.max_pg),
            spec.tolerance("stationarity"),
        ),
        CheckRecord::max(
            "stationarity_cs",
            "max |dS_CS| over unit directions / action scale",
            stationarity(st.max_cs),
            spec.tolerance("stationarity"),
        ),
    ];
    if rep.stalled {
        checks.push(
            CheckRecord::max(
                "line_search",
                "line search found a decreasing step",
                1.0,
                0.0,
            )
            .warn()
            .with_detail(format!("stalled after {} iterations", rep.iterations)),
        );
    }
    let dirs: Vec<_> = st
        .directions
        .iter()
        .map(|d| json!({ "pg": d.pg, "cs": d.cs, "diff": ratio.map(|_| d.diff), "richardson_gap": d.richardson_gap }))
        .collect();
    let data = json!({
        "iterations": rep.iterations,
        "converged": rep.converged,
        "stalled": rep.stalled,
        "initial_objective": r0,
        "final_objective": r1,
        "final_curvature_l2": rep.final_curvature_l2,
        "final_torsion_l2": rep.final_torsion_l2,
        "action_ratio": ratio,
        "action_scale": st.action_scale,
        "directions": dirs,
    });
    let history = History {
        objective: rep.objective,
        step: rep.step,
        action_pg: rep.action_pg,
        action_cs: rep.action_cs,
    };
    Ok(Outcome {
        report: Report::new(spec.clone(), checks, data),
        history: Some(history),
    })
}
