//! Subcommand bodies: each computes, prints a short summary and writes the
//! requested file.

use qlandscape::analytic::{analytic_spectrum, classify};
use qlandscape::objective::KernelSpec;
use qlandscape::optimize::{gradient_ascent, min_gate_time, no_trap_hypothesis, saddle_probe, AscentOptions, ProbeOptions};
use qlandscape::spectral::{discretize, spectrum_report_relative, sym_eigen, Provenance};
use qlandscape::verify::{cross_validate, grid_sweep, hessian_report, random_control, GridSpec, ValidationOptions};
use qlandscape::SystemConfig;
use serde_json::json;

use crate::args::{
    AscendArgs, ClassifyArgs, Command, OperatorArg, ProbeArgs, RootsArgs, SpectrumArgs, SweepArgs, ValidateArgs,
};
use crate::output::{cell, emit, metadata, num, CliResult, Table};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Classify(a) => run_classify(&a),
        Command::Spectrum(a) => run_spectrum(&a),
        Command::Roots(a) => run_roots(&a),
        Command::Validate(a) => run_validate(&a),
        Command::Sweep(a) => run_sweep(&a),
        Command::Ascend(a) => run_ascend(&a),
        Command::Probe(a) => run_probe(&a),
    }
}

fn resolved(phi_w: f64, t: f64) -> serde_json::Value {
    json!({ "phi_w_rad": phi_w, "t_rad": t })
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>().join(", ")
}

fn opt_str<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "n/a".into())
}

fn run_classify(a: &ClassifyArgs) -> CliResult<()> {
    let (phi_w, t) = a.point.radians();
    let label = classify(phi_w, t)?;
    let cfg = SystemConfig::with_coupling(phi_w, t, 1.0)?;
    println!("label: {label}");
    println!("phi_w = {phi_w:.12}, T = {t:.12}, phi_w + T = {:.12}", phi_w + t);
    println!("J(f0) = {:.12}, sin 2phi = {:.6e}", cfg.objective_at_f0(), cfg.hessian_factor());
    let meta = metadata("classify", a, resolved(phi_w, t))?;
    let result = json!({
        "phi_w": phi_w,
        "t": t,
        "label": label,
        "j_f0": cfg.objective_at_f0(),
        "sin_2phi": cfg.hessian_factor(),
    });
    emit(&a.output, &meta, &result, |buf| {
        let mut table = Table::new(&["phi_w", "t", "label", "j_f0", "sin_2phi"]);
        table.push(vec![
            num(phi_w),
            num(t),
            label.to_string(),
            num(cfg.objective_at_f0()),
            num(cfg.hessian_factor()),
        ]);
        table.write(buf)
    })
}

fn run_spectrum(a: &SpectrumArgs) -> CliResult<()> {
    let (phi_w, t) = a.point.radians();
    let cfg = SystemConfig::with_coupling(phi_w, t, a.v)?;
    let label = classify(phi_w, t)?;
    let n = a.n as usize;
    let report = match a.operator {
        OperatorArg::K => {
            let op = discretize(&KernelSpec::operator_k(&cfg)?, n, a.scheme.into())?;
            let mut r = spectrum_report_relative(&sym_eigen(&op)?, a.rho, Provenance::Numeric)?;
            r.trace = op.trace();
            r
        }
        OperatorArg::Hessian => hessian_report(&cfg, n, a.scheme.into(), a.rho)?,
    };
    let name = match a.operator {
        OperatorArg::K => "K",
        OperatorArg::Hessian => "Hessian",
    };
    println!("label: {label}");
    println!("operator: {name}, N = {n}, v^2 sin 2phi = {:.6e}", cfg.hessian_factor());
    println!(
        "counts (tau = {:.3e}): {} positive, {} negative, {} zero",
        report.tau, report.n_pos, report.n_neg, report.n_zero
    );
    println!("signature: {}", opt_str(report.signature()));
    println!("trace: {:.10e}", report.trace);
    println!("top by magnitude: {}", fmt_list(&report.top_by_magnitude(a.top)));
    let meta = metadata("spectrum", a, resolved(phi_w, t))?;
    emit(&a.output, &meta, &report, |buf| {
        let mut table = Table::new(&["rank", "eigenvalue"]);
        for (i, x) in report.eigenvalues.iter().enumerate() {
            table.push(vec![(i + 1).to_string(), num(*x)]);
        }
        table.write(buf)
    })
}

fn run_roots(a: &RootsArgs) -> CliResult<()> {
    let (phi_w, t) = a.point.radians();
    let cfg = SystemConfig::with_coupling(phi_w, t, a.v)?;
    let spec = analytic_spectrum(&cfg, a.n_max as usize)?;
    println!("label: {}", spec.label);
    println!(
        "K: {} positive (finite side), {} negative listed; Hessian factor {:.6e}",
        spec.n_pos_k, spec.n_neg_listed_k, spec.hessian_factor
    );
    println!("K signature: {}", spec.k_signature());
    println!("Hessian signature: {}", opt_str(spec.hessian_signature()));
    let top: Vec<f64> = spec.mu_k_by_magnitude().into_iter().take(6).collect();
    println!("largest |mu_K|: {}", fmt_list(&top));
    let meta = metadata("roots", a, resolved(phi_w, t))?;
    emit(&a.output, &meta, &spec, |buf| {
        let mut table = Table::new(&[
            "equation",
            "index",
            "bracket_lo",
            "bracket_hi",
            "root",
            "lambda",
            "mu_k",
            "mu_hess",
            "multiplicity",
            "residual",
            "bound_lo",
            "bound_hi",
        ]);
        for (r, b) in spec.records.iter().zip(&spec.bounds) {
            table.push(vec![
                r.equation.to_string(),
                r.index.to_string(),
                cell(r.bracket.map(|b| b.0)),
                cell(r.bracket.map(|b| b.1)),
                cell(r.root),
                num(r.lambda),
                num(r.mu_k),
                num(r.mu_hess),
                r.multiplicity.to_string(),
                num(r.residual),
                cell(b.map(|b| b.lo)),
                cell(b.map(|b| b.hi)),
            ]);
        }
        table.write(buf)
    })
}

fn run_validate(a: &ValidateArgs) -> CliResult<()> {
    let (phi_w, t) = a.point.radians();
    let cfg = SystemConfig::with_coupling(phi_w, t, a.v)?;
    let opts = ValidationOptions {
        nodes: a.n as usize,
        scheme: a.scheme.into(),
        rho: a.rho,
        n_max: a.n_max as usize,
        top_k: a.top_k,
        refine: !a.no_refine,
    };
    let rec = cross_validate(&cfg, &opts)?;
    println!("label: {}", rec.label);
    println!(
        "numeric: {} positive, {} negative, {} zero; signature {}",
        rec.numeric.n_pos,
        rec.numeric.n_neg,
        rec.numeric.n_zero,
        opt_str(rec.numeric_signature)
    );
    println!("propositions x sign(factor): {}", opt_str(rec.predicted));
    println!("Theorem 4 prose: {}", opt_str(rec.prose));
    println!(
        "agrees with propositions: {}, with prose: {}",
        opt_str(rec.matches_propositions_with_factor),
        opt_str(rec.matches_theorem4_prose)
    );
    if let Some(r) = rec.refinement {
        println!(
            "at N = {}: signature {}, stable {}",
            r.nodes,
            opt_str(r.signature),
            r.stable
        );
    }
    println!(
        "paired {} eigenvalues ({} unmatched), bounds respected: {}, trace error {:.3e}",
        rec.matches.len(),
        rec.unmatched_analytic.len(),
        rec.bounds_respected,
        rec.trace_err
    );
    let meta = metadata("validate", a, resolved(phi_w, t))?;
    emit(&a.output, &meta, &rec, |buf| {
        let mut table = Table::new(&["analytic_mu_k", "numeric_mu_k", "rel_err", "bound_lo", "bound_hi", "within_bounds"]);
        for m in &rec.matches {
            table.push(vec![
                num(m.analytic),
                num(m.numeric),
                num(m.rel_err),
                cell(m.bounds.map(|b| b.lo)),
                cell(m.bounds.map(|b| b.hi)),
                m.within_bounds.map(|b| b.to_string()).unwrap_or_default(),
            ]);
        }
        table.write(buf)
    })
}

fn run_sweep(a: &SweepArgs) -> CliResult<()> {
    let grid = GridSpec {
        phi_steps: a.res.phi_steps,
        t_steps: a.res.t_steps,
        v: a.v,
    };
    let opts = ValidationOptions {
        nodes: a.n as usize,
        scheme: a.scheme.into(),
        rho: a.rho,
        n_max: a.n_max as usize,
        top_k: a.top_k,
        refine: !a.no_refine,
    };
    let report = grid_sweep(&grid, &opts)?;
    let labeled: Vec<_> = report.labeled_rows().collect();
    let prop = labeled.iter().filter(|r| r.match_prop == Some(true)).count();
    let prose = labeled.iter().filter(|r| r.match_thm4 == Some(true)).count();
    println!(
        "grid {}x{}: {} points, {} with a spectral label",
        a.res.phi_steps,
        a.res.t_steps,
        report.rows.len(),
        labeled.len()
    );
    println!("agree with propositions x sign(factor): {prop}/{}", labeled.len());
    println!("agree with Theorem 4 prose: {prose}/{}", labeled.len());
    println!("consistent under refinement: {}", report.all_consistent());
    for r in labeled.iter().filter(|r| r.match_prop != Some(true)).take(10) {
        println!("  mismatch at phi_w = {:.6}, T = {:.6} ({})", r.phi_w, r.t, r.label);
    }
    let meta = metadata("sweep", a, json!({}))?;
    emit(&a.output, &meta, &report, |buf| Ok(report.write_csv(buf)?))
}

fn run_ascend(a: &AscendArgs) -> CliResult<()> {
    let (phi_w, t) = a.point.radians();
    let cfg = SystemConfig::with_coupling(phi_w, t, a.v)?;
    let start = random_control(t, a.segments as usize, a.amp, a.seed)?;
    let opts = AscentOptions {
        max_iters: a.max_iters,
        max_update: a.max_update,
        target_j: a.target,
        ..AscentOptions::default()
    };
    let trace = gradient_ascent(&cfg, &start, &opts)?;
    let j0 = trace.steps.first().map_or(f64::NAN, |s| s.j);
    println!("no-trap hypothesis holds: {}", no_trap_hypothesis(phi_w, t));
    let t_min = min_gate_time(phi_w);
    if t <= t_min {
        println!("note: T <= {t_min:.6}, the shortest time reaching the gate; J = 1 is not attainable");
    }
    println!("J: {j0:.12} -> {:.12}", trace.final_j());
    println!(
        "iterations: {}, stop: {:?}, first J >= 0.99 at: {}",
        trace.steps.last().map_or(0, |s| s.iteration),
        trace.stop,
        opt_str(trace.first_reaching(0.99))
    );
    let meta = metadata("ascend", a, resolved(phi_w, t))?;
    emit(&a.output, &meta, &trace, |buf| Ok(trace.write_csv(buf)?))
}

fn run_probe(a: &ProbeArgs) -> CliResult<()> {
    let (phi_w, t) = a.point.radians();
    let cfg = SystemConfig::with_coupling(phi_w, t, a.v)?;
    let opts = ProbeOptions {
        cells: a.cells as usize,
        order: a.order as usize,
        eps: a.eps,
        top_k: a.top_k,
    };
    let probe = saddle_probe(&cfg, &opts)?;
    println!("label: {}", probe.label);
    for d in &probe.directions {
        println!(
            "  eigenvalue {:+.6e}  fitted {:+.6e}  rel err {:.2e}",
            d.eigenvalue, d.fitted_q, d.rel_err
        );
    }
    println!(
        "both signs: {}, max rel err (|eigenvalue| > 1e-3): {:.3e}",
        probe.has_both_signs(1e-3),
        probe.max_rel_err(1e-3)
    );
    let meta = metadata("probe", a, resolved(phi_w, t))?;
    emit(&a.output, &meta, &probe, |buf| {
        let mut table = Table::new(&["eigenvalue", "fitted_q", "rel_err", "asymmetry"]);
        for d in &probe.directions {
            table.push(vec![
                num(d.eigenvalue),
                num(d.fitted_q),
                num(d.rel_err),
                num(d.asymmetry),
            ]);
        }
        table.write(buf)
    })
}
