//! Exact spectral theory of the Hessian at the special control.
//!
//! With `φ = −(φ_W + T)` and `sin 2φ ≠ 0` the Hessian equals `v² sin 2φ · K`,
//! where `K` has kernel `−cos(2|t−s| + φ)/sin φ`. If `K g = μ g` and
//! `h = K g`, then `h'' + 4h = 4g` with initial conditions fixed by `g`, so
//! `h'' = 4(λ − 1)h` for `λ = 1/μ`. Eigenvalues therefore come from positive
//! roots `a` of two characteristic determinants:
//!
//! * `F¹(a)` (oscillatory, `λ = 1 − a²`), whose roots solve
//!   `−a cot φ_W = cot(aT)` or `−a tan φ_W = tan(aT)`;
//! * `F²(a)` (exponential, `λ = 1 + a²`), whose roots solve
//!   `a cot φ_W = coth(aT)` or `−a tan φ_W = tanh(aT)`;
//!
//! plus `λ = 1` exactly when `Δ = −2 sin φ_W (sin φ_W + T cos φ_W)` vanishes.

mod characteristic;
mod eigenfunction;
mod roots;
mod spectrum;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use characteristic::{
    delta_lambda1, eq11_residual, eq12_residual, eq1_residual, eq2_residual, f1, f2, lemma_cot_root_count,
    lemma_tan_root_count, F2Value, F2_OVERFLOW_ARG,
};
pub use eigenfunction::{characteristic_system, eigenfunction_for_root, CharacteristicSystem, EigenForm, Eigenfunction};
pub use roots::{closed_form_roots, transcendental_roots, RootEquation, RootRecord};
pub use spectrum::{
    analytic_spectrum, eigenvalue_bounds, hessian_prediction, proposition_positive_count, theorem4_prose,
    AnalyticSpectrum, MagnitudeBounds, DEFAULT_N_MAX,
};

/// Region of the `(φ_W, T)` rectangle `(0, π] × (0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainLabel {
    /// `π/2 < φ_W < π − T`.
    D1,
    /// `φ_W = π/2`, `T < π/2`.
    D1PhiHalf,
    /// `φ_W + T > π`, `φ_W < π`, `T < −tan φ_W`.
    D2p,
    /// As `D2p` with `T = −tan φ_W`.
    D2pp,
    /// As `D2p` with `T > −tan φ_W`.
    D2ppp,
    /// `φ_W < π/2`, `φ_W + T < π/2`.
    D3Low,
    /// `φ_W < π/2`, `φ_W + T > π/2`.
    D3High,
    /// `φ_W = π`.
    D4,
    /// `φ_W + T = π`: `f₀` is a global maximum.
    DiagMax,
    /// `φ_W + T = π/2`: `f₀` is a global minimum.
    DiagMin,
    /// Too close to a boundary line to be labeled reliably.
    Excluded,
}

impl DomainLabel {
    pub const ALL: [DomainLabel; 11] = [
        DomainLabel::D1,
        DomainLabel::D1PhiHalf,
        DomainLabel::D2p,
        DomainLabel::D2pp,
        DomainLabel::D2ppp,
        DomainLabel::D3Low,
        DomainLabel::D3High,
        DomainLabel::D4,
        DomainLabel::DiagMax,
        DomainLabel::DiagMin,
        DomainLabel::Excluded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DomainLabel::D1 => "D1",
            DomainLabel::D1PhiHalf => "D1_phi_half",
            DomainLabel::D2p => "D2p",
            DomainLabel::D2pp => "D2pp",
            DomainLabel::D2ppp => "D2ppp",
            DomainLabel::D3Low => "D3_low",
            DomainLabel::D3High => "D3_high",
            DomainLabel::D4 => "D4",
            DomainLabel::DiagMax => "DiagMax",
            DomainLabel::DiagMin => "DiagMin",
            DomainLabel::Excluded => "Excluded",
        }
    }

    /// Points where the Hessian spectrum theory applies.
    pub fn has_spectrum(self) -> bool {
        !matches!(self, DomainLabel::DiagMax | DomainLabel::DiagMin | DomainLabel::Excluded)
    }

    pub fn is_d1(self) -> bool {
        matches!(self, DomainLabel::D1 | DomainLabel::D1PhiHalf)
    }

    pub fn is_d2(self) -> bool {
        matches!(self, DomainLabel::D2p | DomainLabel::D2pp | DomainLabel::D2ppp)
    }

    pub fn is_d3(self) -> bool {
        matches!(self, DomainLabel::D3Low | DomainLabel::D3High)
    }
}

impl fmt::Display for DomainLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DomainLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        DomainLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown domain label {s:?}"))
    }
}

/// Distances used to decide membership of the boundary lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTolerance {
    /// Points this close to a labeled line take that line's label.
    pub snap: f64,
    /// Points farther than `snap` but within `guard` of a line are `Excluded`.
    pub guard: f64,
}

impl Default for BoundaryTolerance {
    fn default() -> Self {
        BoundaryTolerance {
            snap: 1e-7,
            guard: 1e-6,
        }
    }
}

/// Label of `(φ_W, T)` with the default tolerances.
pub fn classify(phi_w: f64, t: f64) -> Result<DomainLabel> {
    classify_with(phi_w, t, BoundaryTolerance::default())
}

/// Label of `(φ_W, T)`.
///
/// Lines are checked in the order `φ_W = π`, `φ_W + T = π`,
/// `φ_W + T = π/2`, `φ_W = π/2`, `T = −tan φ_W`. The corner `(π, π/2)` lies
/// on both `φ_W = π` and `φ_W + T = 3π/2`; it is labeled `D4`.
pub fn classify_with(phi_w: f64, t: f64, tol: BoundaryTolerance) -> Result<DomainLabel> {
    let in_rect = phi_w > 0.0 && phi_w <= PI + tol.snap && t > 0.0 && t <= FRAC_PI_2 + tol.snap;
    if !in_rect || !phi_w.is_finite() || !t.is_finite() {
        return Err(Error::OutOfRectangle { phi_w, t });
    }
    let sum = phi_w + t;
    let d_edge = (phi_w - PI).abs();
    let d_max = (sum - PI).abs();
    let d_min = (sum - FRAC_PI_2).abs();
    let d_half = (phi_w - FRAC_PI_2).abs();
    let d_d2pp = if sum > PI && phi_w > FRAC_PI_2 {
        (t + phi_w.tan()).abs()
    } else {
        f64::INFINITY
    };

    if d_edge <= tol.snap {
        return Ok(DomainLabel::D4);
    }
    if d_max <= tol.snap {
        return Ok(DomainLabel::DiagMax);
    }
    if d_min <= tol.snap {
        return Ok(DomainLabel::DiagMin);
    }
    if d_half <= tol.snap {
        return Ok(DomainLabel::D1PhiHalf);
    }
    if d_d2pp <= tol.snap {
        return Ok(DomainLabel::D2pp);
    }
    if [d_edge, d_max, d_min, d_half, d_d2pp].iter().any(|&d| d <= tol.guard) {
        return Ok(DomainLabel::Excluded);
    }

    Ok(if phi_w < FRAC_PI_2 {
        if sum < FRAC_PI_2 {
            DomainLabel::D3Low
        } else {
            DomainLabel::D3High
        }
    } else if sum < PI {
        DomainLabel::D1
    } else if t < -phi_w.tan() {
        DomainLabel::D2p
    } else {
        DomainLabel::D2ppp
    })
}
