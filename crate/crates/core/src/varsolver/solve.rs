use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::action::{
    action_unchecked, discrete_action, el_residual, objective_and_gradient, ActionKind,
};
use super::lattice::{LatticeConfig, Perturbation};
use crate::error::{Error, Result};
use crate::sampling::TrigParams;

/// Armijo sufficient-decrease constant.
const ARMIJO: f64 = 1e-4;
/// Step halvings before the line search gives up.
const MAX_BACKTRACKS: usize = 60;

/// Central difference `(S(cfg + ε p) − S(cfg − ε p)) / 2ε`.
pub fn directional_derivative(
    cfg: &LatticeConfig,
    pert: &Perturbation,
    which: ActionKind,
    eps: f64,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let plus = discrete_action(&cfg.perturbed(pert, eps)?, which)?;
    let minus = discrete_action(&cfg.perturbed(pert, -eps)?, which)?;
    Ok((plus - minus) / (2.0 * eps))
}

/// Settings for [`descend`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    pub max_iters: usize,
    /// First trial step, in units of the `L²` gradient.
    pub step0: f64,
    /// Stop once the objective is below this value.
    pub tol: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            step0: 1e-3,
            tol: 1e-20,
        }
    }
}

/// Outcome of a descent run. `objective`, `step`, `action_pg` and
/// `action_cs` hold one entry per accepted iterate, starting with the
/// initial configuration (step 0).
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// The line search could not find a decreasing step.
    pub stalled: bool,
    pub objective: Vec<f64>,
    pub step: Vec<f64>,
    pub action_pg: Vec<f64>,
    pub action_cs: Vec<f64>,
    pub final_curvature_l2: f64,
    pub final_torsion_l2: f64,
    pub wall_time: Duration,
}

impl SolveReport {
    /// Same run up to wall time.
    pub fn same_run(&self, other: &Self) -> bool {
        let strip = |r: &Self| Self {
            wall_time: Duration::ZERO,
            ..r.clone()
        };
        strip(self) == strip(other)
    }

    pub fn initial_objective(&self) -> f64 {
        self.objective[0]
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective.last().expect("history holds the start")
    }
}

/// Objective, or `+∞` when the coframe degenerates.
fn guarded_objective(cfg: &LatticeConfig) -> f64 {
    if cfg.check_coframe().is_err() {
        return f64::INFINITY;
    }
    el_residual(cfg).objective()
}

/// Gradient descent on the residual objective with Barzilai–Borwein trial
/// steps and Armijo backtracking.
pub fn descend(
    start: &LatticeConfig,
    opts: &DescentOptions,
) -> Result<(LatticeConfig, SolveReport)> {
    if !(opts.step0 > 0.0) || opts.tol < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need step0 > 0 and tol ≥ 0, got {} and {}",
            opts.step0, opts.tol
        )));
    }
    start.check_coframe()?;
    let timer = Instant::now();
    let cv = start.cell_volume();
    let mut cfg = start.clone();
    let (mut r, grad) = objective_and_gradient(&cfg);
    // gradient with respect to the L² inner product
    let mut g = grad.scaled(1.0 / cv);
    let mut report = SolveReport {
        iterations: 0,
        converged: false,
        stalled: false,
        objective: vec![r],
        step: vec![0.0],
        action_pg: vec![action_unchecked(&cfg, ActionKind::Palatini)],
        action_cs: vec![action_unchecked(&cfg, ActionKind::ChernSimons)],
        final_curvature_l2: 0.0,
        final_torsion_l2: 0.0,
        wall_time: Duration::ZERO,
    };
    let mut alpha = opts.step0;
    while r >= opts.tol && report.iterations < opts.max_iters {
        let g2 = g.dot(&g) * cv;
        if g2 == 0.0 {
            report.stalled = true;
            break;
        }
        let mut trial = alpha;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let next = cfg.perturbed(&g, -trial)?;
            let rn = guarded_objective(&next);
            if rn <= r - ARMIJO * trial * g2 {
                accepted = Some((next, rn));
                break;
            }
            trial *= 0.5;
        }
        let Some((next, rn)) = accepted else {
            report.stalled = true;
            break;
        };
        let (_, grad_next) = objective_and_gradient(&next);
        let g_next = grad_next.scaled(1.0 / cv);
        let s = Perturbation::between(&cfg, &next)?;
        let y = g_next.sub(&g);
        let sy = s.dot(&y);
        alpha = if sy > 0.0 {
            s.dot(&s) / sy
        } else {
            trial * 2.0
        };
        cfg = next;
        r = rn;
        g = g_next;
        report.iterations += 1;
        report.objective.push(r);
        report.step.push(trial);
        report
            .action_pg
            .push(action_unchecked(&cfg, ActionKind::Palatini));
        report
            .action_cs
            .push(action_unchecked(&cfg, ActionKind::ChernSimons));
    }
    report.converged = r < opts.tol;
    let res = el_residual(&cfg);
    report.final_curvature_l2 = res.curv_l2;
    report.final_torsion_l2 = res.tors_l2;
    report.wall_time = timer.elapsed();
    Ok((cfg, report))
}

/// Directional derivatives of both actions along one perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionRecord {
    pub pg: f64,
    pub cs: f64,
    /// `cs − ratio · pg`.
    pub diff: f64,
    /// `|dd(ε) − dd(2ε)|`, the larger of the two actions.
    pub richardson_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    pub directions: Vec<DirectionRecord>,
    pub max_pg: f64,
    pub max_cs: f64,
    pub max_diff: f64,
    /// `max(1, |S_PG|, |S_CS|)` at the configuration.
    pub action_scale: f64,
}

/// Directional derivatives of both discrete actions along `n_dirs` random
/// smooth unit (`L²`) perturbations drawn from `seed`.
pub fn stationarity_report(
    cfg: &LatticeConfig,
    n_dirs: usize,
    eps: f64,
    ratio: f64,
    seed: u64,
) -> Result<StationarityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = TrigParams {
        max_frequency: 2,
        terms: 2,
        amplitude: 1.0,
    };
    let s_pg = discrete_action(cfg, ActionKind::Palatini)?;
    let s_cs = discrete_action(cfg, ActionKind::ChernSimons)?;
    let mut directions = Vec::with_capacity(n_dirs);
    for _ in 0..n_dirs {
        let p = Perturbation::random_unit(cfg, &params, &mut rng)?;
        let pg = directional_derivative(cfg, &p, ActionKind::Palatini, eps)?;
        let cs = directional_derivative(cfg, &p, ActionKind::ChernSimons, eps)?;
        let pg2 = directional_derivative(cfg, &p, ActionKind::Palatini, 2.0 * eps)?;
        let cs2 = directional_derivative(cfg, &p, ActionKind::ChernSimons, 2.0 * eps)?;
        directions.push(DirectionRecord {
            pg,
            cs,
            diff: cs - ratio * pg,
            richardson_gap: (pg - pg2).abs().max((cs - cs2).abs()),
        });
    }
    let max = |f: fn(&DirectionRecord) -> f64| {
        directions.iter().map(f).fold(0.0f64, |m, v| m.max(v.abs()))
    };
    Ok(StationarityReport {
        max_pg: max(|d| d.pg),
        max_cs: max(|d| d.cs),
        max_diff: max(|d| d.diff),
        action_scale: 1f64.max(s_pg.abs()).max(s_cs.abs()),
        directions,
    })
}
