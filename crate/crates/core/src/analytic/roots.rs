//! Positive roots of the characteristic equations.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::characteristic::{eq11_residual, eq12_residual, eq1_residual, eq2_residual, f1};
use super::eigenfunction::null_space_dimension;
use super::{BoundaryTolerance, DomainLabel};
use crate::error::{Error, Result};
use crate::roots::bisect_with_sign;

/// Source of an eigenvalue record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootEquation {
    /// `−x cot φ_W = cot xT`, `λ = 1 − a²`.
    Eq1,
    /// `−x tan φ_W = tan xT`, `λ = 1 − a²`.
    Eq2,
    /// `−x tan φ_W = tanh xT`, `λ = 1 + a²`.
    Eq11,
    /// `x cot φ_W = coth xT`, `λ = 1 + a²`.
    Eq12,
    /// `λ = 1`, present when the discriminant vanishes.
    Lambda1,
    /// Exact roots of `F¹` at `φ_W = π` or `φ_W = π/2`.
    ClosedForm,
}

impl RootEquation {
    pub fn as_str(self) -> &'static str {
        match self {
            RootEquation::Eq1 => "eq1",
            RootEquation::Eq2 => "eq2",
            RootEquation::Eq11 => "eq11",
            RootEquation::Eq12 => "eq12",
            RootEquation::Lambda1 => "lambda1",
            RootEquation::ClosedForm => "closed_form",
        }
    }

    /// Roots of this equation give `λ = 1 + a²`.
    pub fn is_exponential(self) -> bool {
        matches!(self, RootEquation::Eq11 | RootEquation::Eq12)
    }
}

impl fmt::Display for RootEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One eigenvalue of `K` (and of the Hessian) derived from a root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub equation: RootEquation,
    /// Bracket number for `eq1`/`eq2`/closed forms, 1 otherwise.
    pub index: usize,
    /// Interval known to contain the root; `None` for `λ = 1`.
    pub bracket: Option<(f64, f64)>,
    pub root: Option<f64>,
    pub lambda: f64,
    pub mu_k: f64,
    /// Factor `v² sin 2φ` relating `K` to the Hessian.
    pub hessian_factor: f64,
    pub mu_hess: f64,
    pub multiplicity: usize,
    /// `|F(a)|` divided by its natural scale; zero for `λ = 1`.
    pub residual: f64,
}

impl RootRecord {
    fn from_root(equation: RootEquation, index: usize, bracket: (f64, f64), a: f64, phi_w: f64, t: f64) -> Self {
        let (lambda, residual) = if equation.is_exponential() {
            let r = 4.0 * (eq11_residual(a, phi_w, t) * eq12_residual(a, phi_w, t)).abs();
            (1.0 + a * a, r / (1.0 + a).powi(2))
        } else {
            (1.0 - a * a, f1(a, phi_w, t).abs() / (1.0 + a).powi(2))
        };
        let factor = unit_hessian_factor(phi_w, t);
        RootRecord {
            equation,
            index,
            bracket: Some(bracket),
            root: Some(a),
            lambda,
            mu_k: 1.0 / lambda,
            hessian_factor: factor,
            mu_hess: factor / lambda,
            multiplicity: 1,
            residual,
        }
    }

    pub(crate) fn lambda_one(phi_w: f64, t: f64) -> Self {
        let factor = unit_hessian_factor(phi_w, t);
        RootRecord {
            equation: RootEquation::Lambda1,
            index: 1,
            bracket: None,
            root: None,
            lambda: 1.0,
            mu_k: 1.0,
            hessian_factor: factor,
            mu_hess: factor,
            multiplicity: 1,
            residual: 0.0,
        }
    }

    /// Same record with the Hessian factor replaced.
    pub fn with_hessian_factor(mut self, factor: f64) -> Self {
        self.hessian_factor = factor;
        self.mu_hess = factor * self.mu_k;
        self
    }

    pub fn is_positive_k(&self) -> bool {
        self.mu_k > 0.0
    }
}

/// `sin 2φ` with `φ = −(φ_W + T)`, the Hessian factor at `v = 1`.
pub(crate) fn unit_hessian_factor(phi_w: f64, t: f64) -> f64 {
    (-2.0 * (phi_w + t)).sin()
}

fn check_inputs(phi_w: f64, t: f64) -> Result<()> {
    let snap = BoundaryTolerance::default().snap;
    if !(phi_w > 0.0 && phi_w <= PI + snap && t > 0.0 && t <= FRAC_PI_2 + snap) {
        return Err(Error::OutOfRectangle { phi_w, t });
    }
    Ok(())
}

/// Root in `[lo, hi]` given the sign just inside `lo`, looking in the half
/// split at the midpoint (where `tan`/`cot` of `xT` have their poles).
fn root_in_split_bracket<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, sign_lo: f64) -> Option<f64> {
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    if fm == 0.0 {
        return Some(mid);
    }
    if fm.signum() != sign_lo.signum() {
        bisect_with_sign(f, lo, mid, sign_lo)
    } else {
        bisect_with_sign(f, mid, hi, fm)
    }
}

/// Grows `hi` geometrically until `f(hi)` has sign `target`, then bisects from 0.
fn root_on_half_line<F: Fn(f64) -> f64>(f: &F, sign_at_zero: f64) -> Option<(f64, (f64, f64))> {
    let mut hi = 1.0;
    for _ in 0..1100 {
        let v = f(hi);
        if v != 0.0 && v.signum() != sign_at_zero.signum() {
            return bisect_with_sign(f, 0.0, hi, sign_at_zero).map(|a| (a, (0.0, hi)));
        }
        hi *= 2.0;
        if !hi.is_finite() {
            break;
        }
    }
    None
}

/// Sign of `G₂` just to the right of 0, using the cubic term when the
/// linear one vanishes.
fn eq2_sign_near_zero(phi_w: f64, t: f64) -> f64 {
    let (s, c) = phi_w.sin_cos();
    let linear = t * c + s;
    if linear != 0.0 {
        return linear.signum();
    }
    -(c * t.powi(3) / 6.0 + s * t * t / 2.0).signum()
}

/// Positive roots of one transcendental equation.
///
/// `eq1`/`eq2` give at most one root in each bracket `((n−1)π/T, nπ/T)`,
/// `n ≤ n_max`; brackets without a sign change are skipped. `eq11`/`eq12`
/// give at most one root. Records carry the Hessian factor for `v = 1`.
pub fn transcendental_roots(eqn: RootEquation, phi_w: f64, t: f64, n_max: usize) -> Result<Vec<RootRecord>> {
    check_inputs(phi_w, t)?;
    let snap = BoundaryTolerance::default().snap;
    let near_pi = (phi_w - PI).abs() <= snap;
    let near_half = (phi_w - FRAC_PI_2).abs() <= snap;
    let degenerate = |reason: &'static str| Error::DegenerateEquation {
        equation: eqn.as_str(),
        reason,
    };
    let (s, c) = phi_w.sin_cos();
    let mut out = Vec::new();
    match eqn {
        RootEquation::Eq1 | RootEquation::Eq2 => {
            let is_eq1 = eqn == RootEquation::Eq1;
            if is_eq1 && near_pi {
                return Err(degenerate("cot φ_W is undefined at φ_W = π"));
            }
            if !is_eq1 && near_half {
                return Err(degenerate("tan φ_W is undefined at φ_W = π/2"));
            }
            let f = |x: f64| {
                if is_eq1 {
                    eq1_residual(x, phi_w, t)
                } else {
                    eq2_residual(x, phi_w, t)
                }
            };
            for n in 1..=n_max {
                let lo = (n - 1) as f64 * PI / t;
                let hi = n as f64 * PI / t;
                let alternating = if n % 2 == 1 { 1.0 } else { -1.0 };
                let sign_lo = if is_eq1 {
                    s * alternating
                } else if n == 1 {
                    eq2_sign_near_zero(phi_w, t)
                } else {
                    s * alternating
                };
                if let Some(a) = root_in_split_bracket(&f, lo, hi, sign_lo) {
                    if a > lo && a < hi {
                        out.push(RootRecord::from_root(eqn, n, (lo, hi), a, phi_w, t));
                    }
                }
            }
        }
        RootEquation::Eq11 => {
            if near_pi {
                return Err(degenerate("cot φ_W is undefined at φ_W = π"));
            }
            if s + c * t < 0.0 {
                let f = |x: f64| eq11_residual(x, phi_w, t);
                if let Some((a, br)) = root_on_half_line(&f, -1.0) {
                    out.push(RootRecord::from_root(eqn, 1, br, a, phi_w, t));
                }
            }
        }
        RootEquation::Eq12 => {
            if near_half {
                return Err(degenerate("tan φ_W is undefined at φ_W = π/2"));
            }
            if c > 0.0 {
                let f = |x: f64| eq12_residual(x, phi_w, t);
                if let Some((a, br)) = root_on_half_line(&f, -1.0) {
                    out.push(RootRecord::from_root(eqn, 1, br, a, phi_w, t));
                }
            }
        }
        RootEquation::Lambda1 | RootEquation::ClosedForm => {
            return Err(degenerate("not a transcendental equation"));
        }
    }
    Ok(out)
}

/// Exact roots of `F¹` where it factors: `a_n = nπ/T` at `φ_W = π` and
/// `a_n = (2n−1)π/(2T)` at `φ_W = π/2`.
///
/// Multiplicities come from the rank of the boundary-condition system.
/// Records carry the Hessian factor for `v = 1`.
pub fn closed_form_roots(label: DomainLabel, t: f64, n_max: usize) -> Result<Vec<RootRecord>> {
    let (phi_w, root_of): (f64, fn(usize, f64) -> f64) = match label {
        DomainLabel::D4 => (PI, |n, t| n as f64 * PI / t),
        DomainLabel::D1PhiHalf => (FRAC_PI_2, |n, t| (2 * n - 1) as f64 * PI / (2.0 * t)),
        other => return Err(Error::NoClosedForm(other.to_string())),
    };
    check_inputs(phi_w, t)?;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let a = root_of(n, t);
        let bracket = ((n - 1) as f64 * PI / t, n as f64 * PI / t);
        let mut rec = RootRecord::from_root(RootEquation::ClosedForm, n, bracket, a, phi_w, t);
        rec.multiplicity = null_space_dimension(&rec, phi_w, t)?.max(1);
        out.push(rec);
    }
    Ok(out)
}
