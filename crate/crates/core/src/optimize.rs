//! Gradient ascent on `J` and second-order probes of `f₀`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytic::{classify, DomainLabel};
use crate::error::{invalid, Error, Result};
use crate::objective::{objective_for_control, AdjointCache, KernelSpec, SystemConfig};
use crate::spectral::{discretize_piecewise_constant, sym_eigen_pairs, EigenMethod};
use crate::su2::PiecewiseControl;

/// Fewest control segments accepted by [`gradient_ascent`].
pub const MIN_SEGMENTS: usize = 8;

/// Default number of control segments.
pub const DEFAULT_SEGMENTS: usize = 64;

/// Whether every control is trap-free for `W = e^{iφ_W σ_z}`:
/// always for `φ_W < π/2`, and for `T > π − φ_W` otherwise.
pub fn no_trap_hypothesis(phi_w: f64, t: f64) -> bool {
    phi_w < std::f64::consts::FRAC_PI_2 || t > std::f64::consts::PI - phi_w
}

/// Shortest final time at which `±W` is reachable.
///
/// Writing `U = X(α) Z(a) X(β)` with `X`, `Z` rotations about `x`, `z`, the
/// drift alone supplies `Z(a)` at the rate `|a| ≤ T` while the control
/// supplies `X` at no cost in the limit of large amplitudes. `±W` needs
/// `a ≡ ±φ_W (mod π)`, hence `T ≥ min(φ_W, π − φ_W)`. At equality the
/// target is reached only by impulsive controls, so `J → 1` only as the
/// amplitudes grow without bound.
pub fn min_gate_time(phi_w: f64) -> f64 {
    phi_w.min(std::f64::consts::PI - phi_w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentOptions {
    pub max_iters: usize,
    pub initial_step: f64,
    /// Largest change of any amplitude in one iteration.
    pub max_update: f64,
    /// Stop once the gradient sup-norm falls below this.
    pub grad_tol: f64,
    /// Stop once `J` reaches this value.
    pub target_j: Option<f64>,
    /// Record the control every this many iterations (0 = never).
    pub snapshot_every: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            max_iters: 500,
            initial_step: 1.0,
            max_update: 1.0,
            grad_tol: 1e-10,
            target_j: None,
            snapshot_every: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GradientTolerance,
    TargetReached,
    MaxIterations,
    /// Halving never produced an increase.
    StepUnderflow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentStep {
    pub iteration: usize,
    pub j: f64,
    pub grad_sup: f64,
    /// Step accepted to reach this point (0 for the start).
    pub step: f64,
    pub control: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AscentTrace {
    pub steps: Vec<AscentStep>,
    pub final_control: PiecewiseControl,
    pub stop: StopReason,
}

impl AscentTrace {
    pub fn final_j(&self) -> f64 {
        self.steps.last().map_or(f64::NAN, |s| s.j)
    }

    /// First iteration at which `J ≥ level`.
    pub fn first_reaching(&self, level: f64) -> Option<usize> {
        self.steps.iter().find(|s| s.j >= level).map(|s| s.iteration)
    }

    pub fn is_monotone(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].j >= w[0].j)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "j", "grad_sup", "step"])?;
        for s in &self.steps {
            w.write_record(&[
                s.iteration.to_string(),
                format!("{:.15}", s.j),
                format!("{:.6e}", s.grad_sup),
                format!("{:.6e}", s.step),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// Steepest ascent on the segment-averaged gradient with a backtracking
/// step: the step doubles after each accepted move, is capped so that no
/// amplitude moves by more than `max_update`, and halves until `J` increases.
pub fn gradient_ascent(cfg: &SystemConfig, ctrl0: &PiecewiseControl, opts: &AscentOptions) -> Result<AscentTrace> {
    if ctrl0.segments() < MIN_SEGMENTS {
        return Err(invalid("segments", ctrl0.segments() as f64, "gradient ascent needs at least 8"));
    }
    if !(opts.max_update > 0.0) {
        return Err(invalid("max_update", opts.max_update, "must be positive"));
    }
    if !(opts.initial_step > 0.0) {
        return Err(invalid("initial_step", opts.initial_step, "must be positive"));
    }
    let snapshot = |it: usize, c: &PiecewiseControl| {
        (opts.snapshot_every > 0 && it.is_multiple_of(opts.snapshot_every)).then(|| c.amplitudes().to_vec())
    };
    let mut ctrl = ctrl0.clone();
    let mut cache = AdjointCache::new(cfg, &ctrl)?;
    let mut j = cache.objective();
    let mut grad = cache.segment_gradient();
    let sup = |g: &[f64]| g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut steps = vec![AscentStep {
        iteration: 0,
        j,
        grad_sup: sup(&grad),
        step: 0.0,
        control: snapshot(0, &ctrl),
    }];
    let mut alpha = opts.initial_step;
    let mut stop = StopReason::MaxIterations;
    for it in 1..=opts.max_iters {
        if opts.target_j.is_some_and(|t| j >= t) {
            stop = StopReason::TargetReached;
            break;
        }
        if sup(&grad) < opts.grad_tol {
            stop = StopReason::GradientTolerance;
            break;
        }
        // trust region: no amplitude moves by more than max_update
        alpha = alpha.min(opts.max_update / sup(&grad));
        let mut accepted = None;
        while alpha > 1e-14 {
            let trial = ctrl.perturbed(&grad, alpha)?;
            let jt = objective_for_control(cfg, &trial)?;
            if jt > j {
                accepted = Some((trial, jt));
                break;
            }
            alpha *= 0.5;
        }
        let Some((next, jn)) = accepted else {
            stop = StopReason::StepUnderflow;
            break;
        };
        ctrl = next;
        j = jn;
        cache = AdjointCache::new(cfg, &ctrl)?;
        grad = cache.segment_gradient();
        steps.push(AscentStep {
            iteration: it,
            j,
            grad_sup: sup(&grad),
            step: alpha,
            control: snapshot(it, &ctrl),
        });
        alpha *= 2.0;
    }
    if stop == StopReason::MaxIterations && opts.target_j.is_some_and(|t| j >= t) {
        stop = StopReason::TargetReached;
    }
    Ok(AscentTrace {
        steps,
        final_control: ctrl,
        stop,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// Control segments, also the Galerkin cell count.
    pub cells: usize,
    /// Gauss order on each cell.
    pub order: usize,
    pub eps: f64,
    /// Directions with the largest `|λ|`, plus the extreme of each sign.
    pub top_k: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            cells: DEFAULT_SEGMENTS,
            order: 6,
            eps: 1e-2,
            top_k: 4,
        }
    }
}

/// Curvature of `J` along one Hessian eigendirection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeDirection {
    /// Eigenvalue of the cell-averaged Hessian.
    pub eigenvalue: f64,
    /// Second derivative of `J` along the unit eigendirection, from
    /// symmetric differences at `ε` and `ε/2` combined to cancel the `ε²` error.
    pub fitted_q: f64,
    pub rel_err: f64,
    /// `|J₊ − J₋| / |J₊ + J₋ − 2J₀|` at `ε`.
    pub asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleProbe {
    pub label: DomainLabel,
    pub eps: f64,
    pub directions: Vec<ProbeDirection>,
}

impl SaddleProbe {
    pub fn has_both_signs(&self, floor: f64) -> bool {
        let pos = self.directions.iter().any(|d| d.fitted_q > floor);
        let neg = self.directions.iter().any(|d| d.fitted_q < -floor);
        pos && neg
    }

    /// Largest relative error over directions with `|λ| > floor`.
    pub fn max_rel_err(&self, floor: f64) -> f64 {
        self.directions
            .iter()
            .filter(|d| d.eigenvalue.abs() > floor)
            .map(|d| d.rel_err)
            .fold(0.0, f64::max)
    }
}

/// Second-order probe of `f₀` along eigenvectors of the Hessian.
pub fn saddle_probe(cfg: &SystemConfig, opts: &ProbeOptions) -> Result<SaddleProbe> {
    let label = classify(cfg.phi_w(), cfg.t_final())?;
    if label == DomainLabel::Excluded {
        return Err(Error::ExcludedPoint {
            label: label.to_string(),
        });
    }
    if !(opts.eps > 1e-4 && opts.eps < 1e-1) {
        return Err(invalid("eps", opts.eps, "must lie in (1e-4, 1e-1)"));
    }
    let op = discretize_piecewise_constant(&KernelSpec::hessian_at_f0(cfg), opts.cells, opts.order)?;
    let pairs = sym_eigen_pairs(&op, EigenMethod::Auto)?;

    let mut chosen: Vec<usize> = (0..pairs.len()).collect();
    chosen.sort_by(|&a, &b| pairs[b].value.abs().total_cmp(&pairs[a].value.abs()));
    chosen.truncate(opts.top_k);
    for idx in [0, pairs.len() - 1] {
        if !chosen.contains(&idx) {
            chosen.push(idx);
        }
    }

    let f0 = cfg.special_control_signal(opts.cells)?;
    let j0 = objective_for_control(cfg, &f0)?;
    let second = |dir: &[f64], eps: f64| -> Result<(f64, f64)> {
        let jp = objective_for_control(cfg, &f0.perturbed(dir, eps)?)?;
        let jm = objective_for_control(cfg, &f0.perturbed(dir, -eps)?)?;
        Ok(((jp + jm - 2.0 * j0) / (eps * eps), (jp - jm).abs()))
    };
    let mut directions = Vec::with_capacity(chosen.len());
    for idx in chosen {
        let pair = &pairs[idx];
        let (q1, odd) = second(&pair.function, opts.eps)?;
        let (q2, _) = second(&pair.function, 0.5 * opts.eps)?;
        let fitted_q = (4.0 * q2 - q1) / 3.0;
        let even = (q1 * opts.eps * opts.eps).abs();
        directions.push(ProbeDirection {
            eigenvalue: pair.value,
            fitted_q,
            rel_err: (fitted_q - pair.value).abs() / pair.value.abs(),
            asymmetry: if even > 0.0 { odd / even } else { 0.0 },
        });
    }
    directions.sort_by(|a, b| b.eigenvalue.total_cmp(&a.eigenvalue));
    Ok(SaddleProbe {
        label,
        eps: opts.eps,
        directions,
    })
}
