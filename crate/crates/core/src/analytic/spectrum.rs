//! Assembly of the analytic spectrum and its sign predictions.

use serde::{Deserialize, Serialize};

use super::characteristic::delta_lambda1;
use super::eigenfunction::null_space_dimension;
use super::roots::{closed_form_roots, transcendental_roots, RootEquation, RootRecord};
use super::{classify, DomainLabel};
use crate::error::{Error, Result};
use crate::objective::SystemConfig;
use crate::spectral::{Sign, SignSignature};

/// Brackets per oscillatory equation.
pub const DEFAULT_N_MAX: usize = 50;

/// Closed interval known to contain `|μ_K|`; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeBounds {
    pub lo: f64,
    pub hi: f64,
}

impl MagnitudeBounds {
    /// Whether `|mu|` lies in the interval up to relative slack `rel`.
    pub fn contains(&self, mu: f64, rel: f64) -> bool {
        let m = mu.abs();
        m >= self.lo * (1.0 - rel) && (self.hi.is_infinite() || m <= self.hi * (1.0 + rel))
    }
}

/// Bounds on `|μ_K|` implied by where the root lies.
///
/// * `λ = 1`: exactly 1.
/// * closed forms: the exact value.
/// * `λ = 1 + a²`: `(0, 1)`.
/// * oscillatory root in `(0, 1)`: `(1, ∞)`.
/// * oscillatory root in a bracket `(lo, hi)` with `lo ≥ 1`:
///   `(1/(hi² − 1), 1/(lo² − 1))`.
///
/// A bracket with `lo < 1 < hi` whose root exceeds 1 gives no bound.
pub fn eigenvalue_bounds(rec: &RootRecord) -> Result<MagnitudeBounds> {
    match rec.equation {
        RootEquation::Lambda1 => Ok(MagnitudeBounds { lo: 1.0, hi: 1.0 }),
        RootEquation::ClosedForm => {
            let m = rec.mu_k.abs();
            Ok(MagnitudeBounds { lo: m, hi: m })
        }
        RootEquation::Eq11 | RootEquation::Eq12 => Ok(MagnitudeBounds { lo: 0.0, hi: 1.0 }),
        RootEquation::Eq1 | RootEquation::Eq2 => {
            let a = rec.root.unwrap_or(f64::NAN);
            let (lo, hi) = rec.bracket.unwrap_or((f64::NAN, f64::NAN));
            if a < 1.0 {
                Ok(MagnitudeBounds {
                    lo: 1.0,
                    hi: f64::INFINITY,
                })
            } else if lo >= 1.0 {
                Ok(MagnitudeBounds {
                    lo: 1.0 / (hi * hi - 1.0),
                    hi: 1.0 / (lo * lo - 1.0),
                })
            } else {
                Err(Error::BracketStraddlesOne { lo, hi })
            }
        }
    }
}

/// Exact spectral data of `K` and the Hessian at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSpectrum {
    pub label: DomainLabel,
    pub phi_w: f64,
    pub t_final: f64,
    /// `v² sin 2φ`.
    pub hessian_factor: f64,
    pub records: Vec<RootRecord>,
    /// Bounds on `|μ_K|` per record, `None` where no bound applies.
    pub bounds: Vec<Option<MagnitudeBounds>>,
    /// Positive eigenvalues of `K`, with multiplicity. This side is finite.
    pub n_pos_k: usize,
    /// Negative eigenvalues of `K` among the listed records.
    pub n_neg_listed_k: usize,
    /// Sign of the infinite family of `K` eigenvalues, which accumulate at 0.
    pub infinite_sign_k: Sign,
}

impl AnalyticSpectrum {
    /// Sign structure of `K`: finitely many positive, infinitely many negative.
    pub fn k_signature(&self) -> SignSignature {
        SignSignature {
            finite_sign: Sign::Positive,
            finite_count: self.n_pos_k,
        }
    }

    /// Sign structure of the Hessian; `None` when the factor vanishes.
    pub fn hessian_signature(&self) -> Option<SignSignature> {
        Sign::of(self.hessian_factor).map(|s| self.k_signature().scaled(s))
    }

    /// `μ_K` values repeated by multiplicity, sorted descending.
    pub fn mu_k_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .records
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.mu_k, r.multiplicity))
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// `μ_Hess` values repeated by multiplicity, sorted descending.
    pub fn mu_hess_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.mu_k_values().iter().map(|m| m * self.hessian_factor).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// `μ_K` values with the largest magnitude first.
    pub fn mu_k_by_magnitude(&self) -> Vec<f64> {
        let mut v = self.mu_k_values();
        v.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        v
    }

    /// Records sorted by `|μ_K|` descending.
    pub fn records_by_magnitude(&self) -> Vec<&RootRecord> {
        let mut v: Vec<&RootRecord> = self.records.iter().collect();
        v.sort_by(|a, b| b.mu_k.abs().total_cmp(&a.mu_k.abs()));
        v
    }
}

/// Full analytic spectrum of `K` at `cfg`, listing `n_max` brackets per
/// oscillatory equation.
pub fn analytic_spectrum(cfg: &SystemConfig, n_max: usize) -> Result<AnalyticSpectrum> {
    let (phi_w, t) = (cfg.phi_w(), cfg.t_final());
    let label = classify(phi_w, t)?;
    if !label.has_spectrum() {
        return Err(Error::ExcludedPoint {
            label: label.to_string(),
        });
    }
    let mut records = Vec::new();
    match label {
        DomainLabel::D4 | DomainLabel::D1PhiHalf => {
            records.extend(closed_form_roots(label, t, n_max)?);
            if label == DomainLabel::D4 {
                let mut rec = RootRecord::lambda_one(phi_w, t);
                rec.multiplicity = null_space_dimension(&rec, phi_w, t)?;
                records.push(rec);
            }
        }
        _ => {
            let d2pp = label == DomainLabel::D2pp;
            records.extend(transcendental_roots(RootEquation::Eq1, phi_w, t, n_max)?);
            for rec in transcendental_roots(RootEquation::Eq2, phi_w, t, n_max)? {
                // on T = −tan φ_W the small eq2 root merges into λ = 1
                if !(d2pp && rec.root.is_some_and(|a| a < 1.0)) {
                    records.push(rec);
                }
            }
            if !d2pp {
                records.extend(transcendental_roots(RootEquation::Eq11, phi_w, t, 1)?);
            }
            records.extend(transcendental_roots(RootEquation::Eq12, phi_w, t, 1)?);
            if d2pp || delta_lambda1(phi_w, t).abs() < 1e-12 {
                let mut rec = RootRecord::lambda_one(phi_w, t);
                rec.multiplicity = null_space_dimension(&rec, phi_w, t)?.max(1);
                records.push(rec);
            }
        }
    }
    let factor = cfg.hessian_factor();
    let records: Vec<RootRecord> = records
        .into_iter()
        .filter(|r| r.multiplicity > 0)
        .map(|r| r.with_hessian_factor(factor))
        .collect();
    let bounds = records.iter().map(|r| eigenvalue_bounds(r).ok()).collect();
    let n_pos_k = records.iter().filter(|r| r.mu_k > 0.0).map(|r| r.multiplicity).sum();
    let n_neg_listed_k = records.iter().filter(|r| r.mu_k < 0.0).map(|r| r.multiplicity).sum();
    Ok(AnalyticSpectrum {
        label,
        phi_w,
        t_final: t,
        hessian_factor: factor,
        records,
        bounds,
        n_pos_k,
        n_neg_listed_k,
        infinite_sign_k: Sign::Negative,
    })
}

/// Number of positive eigenvalues of `K` stated for each region.
pub fn proposition_positive_count(label: DomainLabel) -> Option<usize> {
    match label {
        DomainLabel::D1 | DomainLabel::D1PhiHalf => Some(0),
        DomainLabel::D2p | DomainLabel::D2pp | DomainLabel::D2ppp => Some(2),
        DomainLabel::D3Low | DomainLabel::D3High | DomainLabel::D4 => Some(1),
        DomainLabel::DiagMax | DomainLabel::DiagMin | DomainLabel::Excluded => None,
    }
}

/// Hessian sign structure obtained from the `K` counts and the factor
/// `v² sin 2φ`; `None` off the spectral regions or where the factor vanishes.
pub fn hessian_prediction(label: DomainLabel, hessian_factor: f64) -> Option<SignSignature> {
    let count = proposition_positive_count(label)?;
    let sign = Sign::of(hessian_factor)?;
    Some(
        SignSignature {
            finite_sign: Sign::Positive,
            finite_count: count,
        }
        .scaled(sign),
    )
}

/// Hessian sign structure as stated in the main theorem's wording.
pub fn theorem4_prose(label: DomainLabel) -> Option<SignSignature> {
    let (finite_sign, finite_count) = match label {
        DomainLabel::D1 | DomainLabel::D1PhiHalf => (Sign::Positive, 0),
        DomainLabel::D2p | DomainLabel::D2pp | DomainLabel::D2ppp => (Sign::Positive, 2),
        DomainLabel::D3Low => (Sign::Positive, 1),
        DomainLabel::D3High | DomainLabel::D4 => (Sign::Negative, 1),
        DomainLabel::DiagMax | DomainLabel::DiagMin | DomainLabel::Excluded => return None,
    };
    Some(SignSignature {
        finite_sign,
        finite_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn spectrum(phi_w: f64, t: f64) -> AnalyticSpectrum {
        analytic_spectrum(&SystemConfig::with_coupling(phi_w, t, 1.0).unwrap(), DEFAULT_N_MAX).unwrap()
    }

    #[test]
    fn d1_has_no_positive_eigenvalues() {
        let s = spectrum(3.0 * FRAC_PI_4, PI / 8.0);
        assert_eq!(s.label, DomainLabel::D1);
        assert_eq!(s.n_pos_k, 0);
        assert!(s.records.iter().all(|r| r.mu_k < 0.0));
    }

    #[test]
    fn d2p_positives_come_from_oscillatory_roots() {
        let s = spectrum(2.5, 0.7);
        assert_eq!(s.label, DomainLabel::D2p);
        assert_eq!(s.n_pos_k, 2);
        for r in s.records.iter().filter(|r| r.mu_k > 0.0) {
            assert!(matches!(r.equation, RootEquation::Eq1 | RootEquation::Eq2));
            assert!(r.root.unwrap() < 1.0);
        }
    }

    #[test]
    fn d4_spectrum() {
        let s = spectrum(PI, FRAC_PI_2);
        let pos: Vec<_> = s.records.iter().filter(|r| r.mu_k > 0.0).collect();
        assert_eq!(pos.len(), 1);
        assert_eq!(pos[0].equation, RootEquation::Lambda1);
        assert_eq!(pos[0].multiplicity, 1);
        assert_eq!(s.n_pos_k, 1);
        for r in s.records.iter().filter(|r| r.mu_k < 0.0) {
            let n = r.index as f64;
            assert!((r.mu_k - 1.0 / (1.0 - 4.0 * n * n)).abs() < 1e-14);
        }
    }

    #[test]
    fn counts_follow_the_regions() {
        for i in 1..=40 {
            for j in 1..=20 {
                let pw = PI * (i as f64 - 0.5) / 40.0;
                let t = FRAC_PI_2 * (j as f64 - 0.5) / 20.0;
                let label = classify(pw, t).unwrap();
                if !label.has_spectrum() {
                    continue;
                }
                let s = spectrum(pw, t);
                assert_eq!(Some(s.n_pos_k), proposition_positive_count(label), "{label} at ({pw}, {t})");
            }
        }
    }

    #[test]
    fn boundary_lines() {
        let s = spectrum(3.0 * FRAC_PI_4, 1.0);
        assert_eq!(s.label, DomainLabel::D2pp);
        assert_eq!(s.n_pos_k, 2);
        assert!(s.records.iter().any(|r| r.equation == RootEquation::Lambda1));
        let s = spectrum(FRAC_PI_2, 0.6);
        assert_eq!(s.label, DomainLabel::D1PhiHalf);
        assert_eq!(s.n_pos_k, 0);
        assert!(s.records.iter().all(|r| r.multiplicity == 2));
    }

    #[test]
    fn diagonal_points_are_rejected() {
        let cfg = SystemConfig::with_coupling(2.0, PI - 2.0, 1.0).unwrap();
        assert!(matches!(analytic_spectrum(&cfg, 5), Err(Error::ExcludedPoint { .. })));
    }

    #[test]
    fn bounds_examples() {
        let rec = RootRecord {
            equation: RootEquation::Eq1,
            index: 3,
            bracket: Some((2.0 * PI, 3.0 * PI)),
            root: Some(2.5 * PI),
            lambda: 1.0 - 6.25 * PI * PI,
            mu_k: 1.0 / (1.0 - 6.25 * PI * PI),
            hessian_factor: 1.0,
            mu_hess: 0.0,
            multiplicity: 1,
            residual: 0.0,
        };
        let b = eigenvalue_bounds(&rec).unwrap();
        assert!((b.lo - 1.0 / (9.0 * PI * PI - 1.0)).abs() < 1e-15);
        assert!((b.hi - 1.0 / (4.0 * PI * PI - 1.0)).abs() < 1e-15);
        assert!(b.contains(rec.mu_k, 0.0));
        let straddle = RootRecord {
            bracket: Some((0.0, PI)),
            root: Some(2.0),
            ..rec
        };
        assert!(matches!(eigenvalue_bounds(&straddle), Err(Error::BracketStraddlesOne { .. })));
    }

    #[test]
    fn every_root_respects_its_bound() {
        for i in 1..=20 {
            for j in 1..=20 {
                let pw = PI * (i as f64 - 0.3) / 20.0;
                let t = FRAC_PI_2 * (j as f64 - 0.3) / 20.0;
                if !classify(pw, t).unwrap().has_spectrum() {
                    continue;
                }
                let s = spectrum(pw, t);
                for (r, b) in s.records.iter().zip(&s.bounds) {
                    if let Some(b) = b {
                        assert!(b.contains(r.mu_k, 1e-12), "{r:?} outside {b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn hessian_sign_is_factor_times_k_sign() {
        let s = spectrum(2.8, 0.5);
        for r in &s.records {
            assert_eq!(r.mu_hess.signum(), s.hessian_factor.signum() * r.mu_k.signum());
        }
    }

    #[test]
    fn prediction_versus_prose() {
        // the factor flips D2 and both D3 subcases relative to the prose
        let cases = [
            (3.0 * FRAC_PI_4, PI / 8.0, true),
            (2.8, 0.5, false),
            (0.3, 0.3, false),
            (1.0, 1.0, false),
            (PI, 1.0, true),
        ];
        for (pw, t, agree) in cases {
            let s = spectrum(pw, t);
            assert_eq!(s.hessian_signature() == theorem4_prose(s.label), agree, "{}", s.label);
            assert_eq!(s.hessian_signature(), hessian_prediction(s.label, s.hessian_factor));
        }
    }

    #[test]
    fn continuity_towards_the_edge() {
        // top μ_K of D2''' tends to the λ = 1 eigenvalue of D4
        let t = 1.2;
        let mut last = 0.0;
        for k in [1e-2, 1e-3, 1e-4, 1e-5] {
            let s = spectrum(PI - k, t);
            assert_eq!(s.label, DomainLabel::D2ppp);
            last = s.mu_k_values()[0];
        }
        assert!((last - 1.0).abs() < 1e-3, "{last}");
    }
}
