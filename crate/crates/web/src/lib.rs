//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations: the domain label grid of the parameter rectangle, the
//! Hessian spectrum at a point next to its analytic prediction, and `J`
//! along the extreme Hessian eigendirections at `f₀`. Results cross the
//! boundary as JSON strings or byte arrays; errors are thrown as strings.

use std::f64::consts::{FRAC_PI_2, PI};

use qlandscape::analytic::{analytic_spectrum, classify, DomainLabel, DEFAULT_N_MAX};
use qlandscape::objective::{objective_for_control, KernelSpec};
use qlandscape::quadrature::Scheme;
use qlandscape::spectral::{discretize_piecewise_constant, sym_eigen_pairs, EigenMethod, SignSignature};
use qlandscape::verify::{cross_validate, ValidationOptions};
use qlandscape::SystemConfig;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest node count accepted from the page; keeps a click under a second.
pub const MAX_BROWSER_NODES: u32 = 800;

/// Gauss order per Galerkin cell for the landscape curves.
const CELL_ORDER: usize = 4;

fn to_js<E: ToString>(e: E) -> String {
    e.to_string()
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(to_js)
}

/// Names of the domain labels, indexed as in [`phase_diagram`].
#[wasm_bindgen]
pub fn label_names() -> String {
    let names: Vec<&str> = DomainLabel::ALL.iter().map(|l| l.as_str()).collect();
    serde_json::to_string(&names).expect("strings serialize")
}

/// Label index of each cell center of a `phi_steps × t_steps` grid, in
/// rows of increasing `T`, each row by increasing `φ_W`.
#[wasm_bindgen]
pub fn phase_diagram(phi_steps: u32, t_steps: u32) -> Result<Vec<u8>, String> {
    if phi_steps == 0 || t_steps == 0 || phi_steps * t_steps > 1 << 20 {
        return Err(format!("grid {phi_steps}x{t_steps} is empty or too large"));
    }
    let mut out = Vec::with_capacity((phi_steps * t_steps) as usize);
    for j in 0..t_steps {
        let t = FRAC_PI_2 * (j as f64 + 0.5) / t_steps as f64;
        for i in 0..phi_steps {
            let phi_w = PI * (i as f64 + 0.5) / phi_steps as f64;
            let label = classify(phi_w, t).map_err(to_js)?;
            let idx = DomainLabel::ALL.iter().position(|&l| l == label).expect("label is listed");
            out.push(idx as u8);
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct PointSpectrum {
    pub label: DomainLabel,
    pub phi_w: f64,
    pub t: f64,
    pub j_f0: f64,
    /// `v² sin 2φ`.
    pub hessian_factor: f64,
    pub nodes: usize,
    /// Largest-magnitude eigenvalues of the discretized Hessian.
    pub numeric: Vec<f64>,
    /// Largest-magnitude Hessian eigenvalues from the characteristic roots.
    pub analytic: Vec<f64>,
    pub numeric_signature: Option<String>,
    pub predicted_signature: Option<String>,
    pub prose_signature: Option<String>,
}

/// Numeric and analytic Hessian spectrum at `(φ_W, T)` with `v = 1`.
pub fn point_spectrum(phi_w: f64, t: f64, nodes: u32, count: u32) -> Result<PointSpectrum, String> {
    if !(2..=MAX_BROWSER_NODES).contains(&nodes) {
        return Err(format!("nodes must lie in 2..={MAX_BROWSER_NODES}"));
    }
    let cfg = SystemConfig::with_coupling(phi_w, t, 1.0).map_err(to_js)?;
    let opts = ValidationOptions {
        nodes: nodes as usize,
        scheme: Scheme::Trapezoid,
        top_k: count as usize,
        refine: false,
        ..ValidationOptions::default()
    };
    let rec = cross_validate(&cfg, &opts).map_err(to_js)?;
    let analytic = if rec.label.has_spectrum() {
        let spec = analytic_spectrum(&cfg, DEFAULT_N_MAX).map_err(to_js)?;
        let mut mu: Vec<f64> = spec.mu_hess_values();
        mu.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        mu.truncate(count as usize);
        mu
    } else {
        Vec::new()
    };
    let sig = |s: Option<SignSignature>| s.map(|s| s.to_string());
    Ok(PointSpectrum {
        label: rec.label,
        phi_w,
        t,
        j_f0: rec.j_f0,
        hessian_factor: rec.hessian_factor,
        nodes: nodes as usize,
        numeric: rec.top_eigenvalues(count as usize),
        analytic,
        numeric_signature: sig(rec.numeric_signature),
        predicted_signature: sig(rec.predicted),
        prose_signature: sig(rec.prose),
    })
}

/// [`point_spectrum`] as JSON.
#[wasm_bindgen]
pub fn spectrum_at(phi_w: f64, t: f64, nodes: u32, count: u32) -> Result<String, String> {
    json(&point_spectrum(phi_w, t, nodes, count)?)
}

#[derive(Debug, Serialize)]
pub struct DirectionCurve {
    /// Hessian eigenvalue of the direction.
    pub eigenvalue: f64,
    /// `J(f₀ + s·g)` at each step.
    pub j: Vec<f64>,
    /// `J(f₀) + ½ λ s²`.
    pub quadratic: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct LandscapeCurves {
    pub label: DomainLabel,
    pub j_f0: f64,
    pub steps: Vec<f64>,
    /// Largest eigenvalue first, then the smallest.
    pub curves: Vec<DirectionCurve>,
}

/// `J` along the unit eigendirections of the largest and smallest Hessian
/// eigenvalues at `f₀`, for steps in `[−max_step, max_step]`.
pub fn landscape_curves(phi_w: f64, t: f64, cells: u32, max_step: f64, samples: u32) -> Result<LandscapeCurves, String> {
    if !(4..=256).contains(&cells) {
        return Err("cells must lie in 4..=256".into());
    }
    if !(max_step > 0.0 && max_step.is_finite()) || !(3..=1001).contains(&samples) {
        return Err("max_step must be positive and samples in 3..=1001".into());
    }
    let cfg = SystemConfig::with_coupling(phi_w, t, 1.0).map_err(to_js)?;
    let label = classify(phi_w, t).map_err(to_js)?;
    let f0 = cfg.special_control_signal(cells as usize).map_err(to_js)?;
    let op = discretize_piecewise_constant(&KernelSpec::hessian_at_f0(&cfg), cells as usize, CELL_ORDER)
        .map_err(to_js)?;
    let pairs = sym_eigen_pairs(&op, EigenMethod::Auto).map_err(to_js)?;
    let j_f0 = cfg.objective_at_f0();
    let steps: Vec<f64> = (0..samples)
        .map(|k| max_step * (2.0 * k as f64 / (samples - 1) as f64 - 1.0))
        .collect();
    let mut curves = Vec::new();
    for pair in [&pairs[0], &pairs[pairs.len() - 1]] {
        let j = steps
            .iter()
            .map(|&s| objective_for_control(&cfg, &f0.perturbed(&pair.function, s)?))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(to_js)?;
        let quadratic = steps.iter().map(|s| j_f0 + 0.5 * pair.value * s * s).collect();
        curves.push(DirectionCurve {
            eigenvalue: pair.value,
            j,
            quadratic,
        });
    }
    Ok(LandscapeCurves {
        label,
        j_f0,
        steps,
        curves,
    })
}

/// [`landscape_curves`] as JSON.
#[wasm_bindgen]
pub fn j_curves(phi_w: f64, t: f64, cells: u32, max_step: f64, samples: u32) -> Result<String, String> {
    json(&landscape_curves(phi_w, t, cells, max_step, samples)?)
}
