//! Cross-validation of numeric and analytic spectra, parameter sweeps and
//! finite-difference checks of the derivative kernels.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    analytic_spectrum, classify, hessian_prediction, theorem4_prose, AnalyticSpectrum, DomainLabel, MagnitudeBounds,
    DEFAULT_N_MAX,
};
use crate::error::{invalid, Result};
use crate::objective::{objective_for_control, AdjointCache, KernelSpec, SystemConfig};
use crate::quadrature::Scheme;
use crate::spectral::{
    discretize, spectrum_report, sym_eigen, Provenance, Sign, SignSignature, SpectrumReport, DEFAULT_NODES,
    DEFAULT_RHO,
};
use crate::su2::PiecewiseControl;

/// Node count used by sweeps before refinement.
pub const DEFAULT_SWEEP_NODES: usize = 200;

/// Hessians whose largest eigenvalue is below this multiple of `2v²T`
/// are treated as identically zero.
pub const ZERO_OPERATOR_TOL: f64 = 1e-12;

/// Relative tolerance for pairing numeric with analytic eigenvalues.
pub fn match_tolerance(n: usize) -> f64 {
    if n >= 2000 {
        1e-3
    } else {
        1e-2
    }
}

/// Settings shared by [`cross_validate`] and [`grid_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub nodes: usize,
    pub scheme: Scheme,
    /// Relative zero threshold `ρ`; `τ = ρ · max|λ|`.
    pub rho: f64,
    pub n_max: usize,
    /// Number of analytic eigenvalues (largest magnitude) to pair.
    pub top_k: usize,
    /// Repeat the sign count with twice the nodes.
    pub refine: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            nodes: DEFAULT_NODES,
            scheme: Scheme::Trapezoid,
            rho: DEFAULT_RHO,
            n_max: DEFAULT_N_MAX,
            top_k: 10,
            refine: true,
        }
    }
}

/// A numeric eigenvalue of `K` paired with its analytic value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub analytic: f64,
    pub numeric: f64,
    pub rel_err: f64,
    pub bounds: Option<MagnitudeBounds>,
    pub within_bounds: Option<bool>,
}

/// Sign structure of the numeric Hessian at a refined node count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub nodes: usize,
    pub signature: Option<SignSignature>,
    pub matches_propositions_with_factor: Option<bool>,
    pub matches_theorem4_prose: Option<bool>,
    pub stable: bool,
}

/// Numeric versus analytic comparison at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRecord {
    pub phi_w: f64,
    pub t_final: f64,
    pub v: f64,
    pub label: DomainLabel,
    pub options: ValidationOptions,
    /// Spectrum of the discretized Hessian at `f₀`.
    pub numeric: SpectrumReport,
    pub numeric_signature: Option<SignSignature>,
    pub analytic: Option<AnalyticSpectrum>,
    /// Pairs in descending analytic order.
    pub matches: Vec<MatchedPair>,
    /// Analytic values among the top `k` with no numeric partner.
    pub unmatched_analytic: Vec<f64>,
    pub pairs_descending: bool,
    pub bounds_respected: bool,
    /// `v² sin 2φ`.
    pub hessian_factor: f64,
    pub predicted: Option<SignSignature>,
    pub prose: Option<SignSignature>,
    pub matches_propositions_with_factor: Option<bool>,
    pub matches_theorem4_prose: Option<bool>,
    /// `|tr − (−2v² cos²φ T)| / (1 + |target|)`.
    pub trace_err: f64,
    pub j_f0: f64,
    pub refinement: Option<Refinement>,
}

impl ValidationRecord {
    pub fn factor_sign(&self) -> i8 {
        match Sign::of(self.hessian_factor) {
            Some(Sign::Positive) => 1,
            Some(Sign::Negative) => -1,
            None => 0,
        }
    }

    /// Largest-magnitude numeric Hessian eigenvalues.
    pub fn top_eigenvalues(&self, k: usize) -> Vec<f64> {
        self.numeric.top_by_magnitude(k)
    }
}

/// Sign report of the discretized Hessian at `f₀`.
///
/// An operator whose largest eigenvalue is below [`ZERO_OPERATOR_TOL`]·2v²T
/// (the corner `φ_W + T = 3π/2`, where `cos φ = 0`) is reported as all zero.
pub fn hessian_report(cfg: &SystemConfig, nodes: usize, scheme: Scheme, rho: f64) -> Result<SpectrumReport> {
    let op = discretize(&KernelSpec::hessian_at_f0(cfg), nodes, scheme)?;
    let eigs = sym_eigen(&op)?;
    let max = eigs.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let scale = 2.0 * cfg.v().powi(2) * cfg.t_final();
    let tau = if max <= ZERO_OPERATOR_TOL * scale { max } else { rho * max };
    let mut report = spectrum_report(&eigs, tau, Provenance::Numeric)?;
    report.trace = op.trace();
    Ok(report)
}

/// Greedy pairing of each analytic value with the nearest unused numeric
/// value, accepted within relative tolerance `tol`.
fn pair_eigenvalues(
    analytic: &[(f64, Option<MagnitudeBounds>)],
    numeric: &[f64],
    tol: f64,
) -> (Vec<MatchedPair>, Vec<f64>) {
    let mut used = vec![false; numeric.len()];
    let mut matches = Vec::new();
    let mut unmatched = Vec::new();
    for &(a, bounds) in analytic {
        let best = numeric
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .min_by(|x, y| (x.1 - a).abs().total_cmp(&(y.1 - a).abs()));
        match best {
            Some((i, &x)) if (x - a).abs() <= tol * a.abs() => {
                used[i] = true;
                matches.push(MatchedPair {
                    analytic: a,
                    numeric: x,
                    rel_err: (x - a).abs() / a.abs(),
                    bounds,
                    within_bounds: bounds.map(|b| b.contains(x, tol)),
                });
            }
            _ => unmatched.push(a),
        }
    }
    matches.sort_by(|p, q| q.analytic.total_cmp(&p.analytic));
    (matches, unmatched)
}

fn agreement(numeric: Option<SignSignature>, expected: Option<SignSignature>, label: DomainLabel) -> Option<bool> {
    label.has_spectrum().then_some(numeric == expected)
}

/// Compares the discretized spectra of the Hessian and of `K` at `f₀` with
/// the analytic spectrum.
pub fn cross_validate(cfg: &SystemConfig, opts: &ValidationOptions) -> Result<ValidationRecord> {
    let (phi_w, t) = (cfg.phi_w(), cfg.t_final());
    let label = classify(phi_w, t)?;
    let numeric = hessian_report(cfg, opts.nodes, opts.scheme, opts.rho)?;
    let numeric_signature = numeric.signature();
    let factor = cfg.hessian_factor();
    let target = -2.0 * cfg.v().powi(2) * cfg.phi().cos().powi(2) * t;
    let trace_err = (numeric.trace - target).abs() / (1.0 + target.abs());

    let (predicted, prose) = if label.has_spectrum() {
        (hessian_prediction(label, factor), theorem4_prose(label))
    } else {
        (None, None)
    };

    let mut analytic = None;
    let mut matches = Vec::new();
    let mut unmatched_analytic = Vec::new();
    if label.has_spectrum() {
        let spec = analytic_spectrum(cfg, opts.n_max)?;
        if opts.top_k > 0 {
            let mut wanted: Vec<(f64, Option<MagnitudeBounds>)> = spec
                .records
                .iter()
                .zip(&spec.bounds)
                .flat_map(|(r, b)| std::iter::repeat_n((r.mu_k, *b), r.multiplicity))
                .collect();
            wanted.sort_by(|x, y| y.0.abs().total_cmp(&x.0.abs()));
            wanted.truncate(opts.top_k);
            let k_op = discretize(&KernelSpec::operator_k(cfg)?, opts.nodes, opts.scheme)?;
            let k_eigs = sym_eigen(&k_op)?;
            (matches, unmatched_analytic) = pair_eigenvalues(&wanted, &k_eigs, match_tolerance(opts.nodes));
        }
        analytic = Some(spec);
    }
    let pairs_descending = matches.windows(2).all(|w| w[0].numeric >= w[1].numeric);
    let bounds_respected = matches.iter().all(|m| m.within_bounds != Some(false));

    let matches_prop = agreement(numeric_signature, predicted, label);
    let matches_prose = agreement(numeric_signature, prose, label);
    let refinement = if opts.refine {
        let fine = hessian_report(cfg, 2 * opts.nodes, opts.scheme, opts.rho)?;
        let sig = fine.signature();
        Some(Refinement {
            nodes: 2 * opts.nodes,
            signature: sig,
            matches_propositions_with_factor: agreement(sig, predicted, label),
            matches_theorem4_prose: agreement(sig, prose, label),
            stable: sig == numeric_signature,
        })
    } else {
        None
    };

    Ok(ValidationRecord {
        phi_w,
        t_final: t,
        v: cfg.v(),
        label,
        options: *opts,
        numeric,
        numeric_signature,
        analytic,
        matches,
        unmatched_analytic,
        pairs_descending,
        bounds_respected,
        hessian_factor: factor,
        predicted,
        prose,
        matches_propositions_with_factor: matches_prop,
        matches_theorem4_prose: matches_prose,
        trace_err,
        j_f0: cfg.objective_at_f0(),
        refinement,
    })
}

/// Grid over the rectangle: `φ_W = π·i/phi_steps`, `T = (π/2)·j/t_steps`
/// for `i, j ≥ 1`, so the left and bottom edges are left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub phi_steps: usize,
    pub t_steps: usize,
    pub v: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            phi_steps: 40,
            t_steps: 20,
            v: 1.0,
        }
    }
}

impl GridSpec {
    /// Points in row-major order (`φ_W` outer, `T` inner).
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.phi_steps * self.t_steps);
        for i in 1..=self.phi_steps {
            for j in 1..=self.t_steps {
                out.push((PI * i as f64 / self.phi_steps as f64, FRAC_PI_2 * j as f64 / self.t_steps as f64));
            }
        }
        out
    }
}

/// Number of numeric eigenvalues written per sweep row.
pub const SWEEP_TOP_EIGS: usize = 5;

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi_w: f64,
    pub t: f64,
    pub v: f64,
    pub label: DomainLabel,
    pub n_pos_num: usize,
    pub n_neg_num: usize,
    pub n_zero_num: usize,
    pub n_pos_analytic_k: Option<usize>,
    pub factor_sign: i8,
    pub match_prop: Option<bool>,
    pub match_thm4: Option<bool>,
    pub trace_err: f64,
    pub top_eigs: Vec<f64>,
    pub j_f0: f64,
    pub refine_stable: Option<bool>,
    /// Agreement with the proposition-derived counts at the refined node count.
    pub refined_match_prop: Option<bool>,
    pub bounds_respected: bool,
}

impl SweepRow {
    fn from_record(rec: &ValidationRecord) -> Self {
        SweepRow {
            phi_w: rec.phi_w,
            t: rec.t_final,
            v: rec.v,
            label: rec.label,
            n_pos_num: rec.numeric.n_pos,
            n_neg_num: rec.numeric.n_neg,
            n_zero_num: rec.numeric.n_zero,
            n_pos_analytic_k: rec.analytic.as_ref().map(|a| a.n_pos_k),
            factor_sign: rec.factor_sign(),
            match_prop: rec.matches_propositions_with_factor,
            match_thm4: rec.matches_theorem4_prose,
            trace_err: rec.trace_err,
            top_eigs: rec.top_eigenvalues(SWEEP_TOP_EIGS),
            j_f0: rec.j_f0,
            refine_stable: rec.refinement.map(|r| r.stable),
            refined_match_prop: rec.refinement.and_then(|r| r.matches_propositions_with_factor),
            bounds_respected: rec.bounds_respected,
        }
    }
}

/// Settings recorded in the header of sweep output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub grid: GridSpec,
    pub options: ValidationOptions,
    pub grid_rule: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub metadata: SweepMetadata,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Rows with a spectral label.
    pub fn labeled_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.label.has_spectrum())
    }

    /// Every labeled row agrees with the factor-adjusted proposition counts at
    /// both node counts, and the sign count is stable under refinement.
    pub fn all_consistent(&self) -> bool {
        self.labeled_rows().all(|r| {
            r.match_prop == Some(true) && r.refine_stable != Some(false) && r.refined_match_prop != Some(false)
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let meta = serde_json::to_value(self.metadata)?;
        if let serde_json::Value::Object(map) = meta {
            for (k, v) in map {
                writeln!(out, "# {k}: {v}")?;
            }
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = [
            "phi_w",
            "t",
            "v",
            "label",
            "n_pos_num",
            "n_neg_num",
            "n_zero_num",
            "n_pos_analytic_K",
            "factor_sign",
            "match_prop",
            "match_thm4",
            "trace_err",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((1..=SWEEP_TOP_EIGS).map(|i| format!("top_eig_{i}")));
        header.extend(["j_f0", "refine_stable"].iter().map(|s| s.to_string()));
        w.write_record(&header)?;
        let opt = |x: Option<bool>| x.map(|b| b.to_string()).unwrap_or_default();
        for r in &self.rows {
            let mut rec = vec![
                format!("{:.12}", r.phi_w),
                format!("{:.12}", r.t),
                r.v.to_string(),
                r.label.to_string(),
                r.n_pos_num.to_string(),
                r.n_neg_num.to_string(),
                r.n_zero_num.to_string(),
                r.n_pos_analytic_k.map(|n| n.to_string()).unwrap_or_default(),
                r.factor_sign.to_string(),
                opt(r.match_prop),
                opt(r.match_thm4),
                format!("{:.3e}", r.trace_err),
            ];
            for i in 0..SWEEP_TOP_EIGS {
                rec.push(r.top_eigs.get(i).map(|x| format!("{x:.10e}")).unwrap_or_default());
            }
            rec.push(format!("{:.12}", r.j_f0));
            rec.push(opt(r.refine_stable));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        self.write_json(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// Cross-validation at every grid point, in grid order. Points are
/// evaluated in parallel when the `parallel` feature is on.
pub fn grid_sweep(grid: &GridSpec, opts: &ValidationOptions) -> Result<SweepReport> {
    if grid.phi_steps == 0 || grid.t_steps == 0 {
        return Err(invalid("grid steps", 0.0, "must be positive"));
    }
    let points = grid.points();
    let eval = |&(phi_w, t): &(f64, f64)| -> Result<SweepRow> {
        let cfg = SystemConfig::with_coupling(phi_w, t, grid.v)?;
        Ok(SweepRow::from_record(&cross_validate(&cfg, opts)?))
    };
    #[cfg(feature = "parallel")]
    let rows: Result<Vec<SweepRow>> = {
        use rayon::prelude::*;
        points.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<SweepRow>> = points.iter().map(eval).collect();
    Ok(SweepReport {
        metadata: SweepMetadata {
            grid: *grid,
            options: *opts,
            grid_rule: "phi_w = pi*i/phi_steps, t = (pi/2)*j/t_steps, i,j >= 1",
            version: env!("CARGO_PKG_VERSION"),
        },
        rows: rows?,
    })
}

/// One directional derivative comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteDiffCheck {
    pub first_adjoint: f64,
    pub first_fd: f64,
    pub first_rel_err: f64,
    pub second_adjoint: f64,
    pub second_fd: f64,
    pub second_rel_err: f64,
}

/// Step sizes and the absolute floor used in relative errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteDiffSteps {
    pub eps_first: f64,
    pub eps_second: f64,
    pub floor: f64,
}

impl Default for FiniteDiffSteps {
    fn default() -> Self {
        FiniteDiffSteps {
            eps_first: 1e-3,
            eps_second: 1e-3,
            floor: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDiffReport {
    pub checks: Vec<FiniteDiffCheck>,
    pub max_first_rel_err: f64,
    pub max_second_rel_err: f64,
}

impl FiniteDiffReport {
    pub fn passes(&self, tol_first: f64, tol_second: f64) -> bool {
        self.max_first_rel_err < tol_first && self.max_second_rel_err < tol_second
    }
}

/// Compares adjoint directional derivatives of `J` at `ctrl` with central
/// differences along `directions` seeded random directions.
///
/// The first derivative uses the five-point stencil, the second the
/// three-point one.
pub fn finite_diff_check(
    cfg: &SystemConfig,
    ctrl: &PiecewiseControl,
    directions: usize,
    seed: u64,
    steps: FiniteDiffSteps,
) -> Result<FiniteDiffReport> {
    let cache = AdjointCache::new(cfg, ctrl)?;
    let j0 = cache.objective();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(steps.floor);
    let mut checks = Vec::with_capacity(directions);
    for _ in 0..directions {
        let dir: Vec<f64> = (0..ctrl.segments()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let j = |eps: f64| objective_for_control(cfg, &ctrl.perturbed(&dir, eps)?);
        let (e1, e2) = (steps.eps_first, steps.eps_second);
        // five-point stencil: truncation O(ε⁴), roundoff O(1e-16/ε)
        let first_fd = (8.0 * (j(e1)? - j(-e1)?) - (j(2.0 * e1)? - j(-2.0 * e1)?)) / (12.0 * e1);
        let second_fd = (j(e2)? - 2.0 * j0 + j(-e2)?) / (e2 * e2);
        let first_adjoint = cache.gradient_directional(&dir)?;
        let second_adjoint = cache.hessian_quadratic_form(&dir)?;
        checks.push(FiniteDiffCheck {
            first_adjoint,
            first_fd,
            first_rel_err: rel(first_adjoint, first_fd),
            second_adjoint,
            second_fd,
            second_rel_err: rel(second_adjoint, second_fd),
        });
    }
    Ok(FiniteDiffReport {
        max_first_rel_err: checks.iter().map(|c| c.first_rel_err).fold(0.0, f64::max),
        max_second_rel_err: checks.iter().map(|c| c.second_rel_err).fold(0.0, f64::max),
        checks,
    })
}

/// A seeded random piecewise-constant control with amplitudes in `[−amp, amp]`.
pub fn random_control(t_final: f64, segments: usize, amp: f64, seed: u64) -> Result<PiecewiseControl> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PiecewiseControl::new(t_final, (0..segments).map(|_| rng.random_range(-amp..=amp)).collect())
}
