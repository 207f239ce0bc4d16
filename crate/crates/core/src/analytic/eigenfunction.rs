//! Eigenfunctions of `K` attached to a root.
//!
//! `h = K g` with `g = λ h` solves `h'' = 4(λ − 1) h`, so `h` lies in a
//! two-dimensional family. The boundary data
//! `h(0) = −(λ/sin φ) ∫ cos(2s + φ) h(s) ds` and
//! `h'(0) = −(2λ/sin φ) ∫ sin(2s + φ) h(s) ds`
//! give a 2×2 linear system whose null space holds the eigenfunctions.

use serde::{Deserialize, Serialize};

use super::roots::{RootEquation, RootRecord};
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

/// Singular values below this fraction of the entry scale count as zero.
const RANK_TOL: f64 = 1e-7;

const GAUSS_ORDER: usize = 20;

/// Shape of `h` for the three regimes of `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EigenForm {
    /// `h = b cos 2at + c sin 2at`, `λ = 1 − a²`.
    Oscillatory { a: f64 },
    /// `h = b + c t`, `λ = 1`.
    Linear,
    /// `h = b e^{2a(t−T)} + c e^{−2at}`, `λ = 1 + a²`.
    Exponential { a: f64 },
}

impl EigenForm {
    fn for_record(rec: &RootRecord) -> EigenForm {
        match (rec.equation, rec.root) {
            (RootEquation::Lambda1, _) | (_, None) => EigenForm::Linear,
            (eq, Some(a)) if eq.is_exponential() => EigenForm::Exponential { a },
            (_, Some(a)) => EigenForm::Oscillatory { a },
        }
    }

    /// Basis functions, their first and second derivatives at `t`.
    fn basis(&self, t: f64, t_final: f64) -> [[f64; 3]; 2] {
        match *self {
            EigenForm::Oscillatory { a } => {
                let w = 2.0 * a;
                let (s, c) = (w * t).sin_cos();
                [[c, -w * s, -w * w * c], [s, w * c, -w * w * s]]
            }
            EigenForm::Linear => [[1.0, 0.0, 0.0], [t, 1.0, 0.0]],
            EigenForm::Exponential { a } => {
                let w = 2.0 * a;
                let up = (w * (t - t_final)).exp();
                let down = (-w * t).exp();
                [[up, w * up, w * w * up], [down, -w * down, w * w * down]]
            }
        }
    }

    fn panels(&self, t_final: f64) -> usize {
        let a = match *self {
            EigenForm::Oscillatory { a } | EigenForm::Exponential { a } => a,
            EigenForm::Linear => 0.0,
        };
        4 + (2.0 * a * t_final) as usize
    }
}

/// The 2×2 boundary-condition system for a given form and `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSystem {
    pub matrix: [[f64; 2]; 2],
    /// Sum of absolute term sizes per entry, used to judge rank.
    pub scale: f64,
}

impl CharacteristicSystem {
    /// Singular values, largest first.
    pub fn singular_values(&self) -> [f64; 2] {
        let [[a, b], [c, d]] = self.matrix;
        let s1 = a * a + b * b + c * c + d * d;
        let det = (a * d - b * c).abs();
        let disc = (s1 * s1 - 4.0 * det * det).max(0.0).sqrt();
        let big = (0.5 * (s1 + disc)).sqrt();
        let small = if big > 0.0 { det / big } else { 0.0 };
        [big, small]
    }

    /// Numerical rank judged relative to `scale`.
    pub fn rank(&self) -> usize {
        let [big, small] = self.singular_values();
        let tol = RANK_TOL * self.scale.max(f64::MIN_POSITIVE);
        if big <= tol {
            0
        } else if small <= tol {
            1
        } else {
            2
        }
    }
}

/// System whose null vectors `(b, c)` give eigenfunctions for `form` and `λ`.
pub fn characteristic_system(form: EigenForm, lambda: f64, phi_w: f64, t_final: f64) -> CharacteristicSystem {
    let phi = -(phi_w + t_final);
    let sin_phi = phi.sin();
    let rule = GaussRule::new(GAUSS_ORDER);
    let panels = form.panels(t_final);
    let at0 = form.basis(0.0, t_final);
    let mut matrix = [[0.0; 2]; 2];
    let mut scale: f64 = 0.0;
    for j in 0..2 {
        let ic = rule.integrate(|s| (2.0 * s + phi).cos() * form.basis(s, t_final)[j][0], 0.0, t_final, panels);
        let is = rule.integrate(|s| (2.0 * s + phi).sin() * form.basis(s, t_final)[j][0], 0.0, t_final, panels);
        let abs_int = rule.integrate(|s| form.basis(s, t_final)[j][0].abs(), 0.0, t_final, panels);
        let k = lambda / sin_phi;
        matrix[0][j] = at0[j][0] + k * ic;
        matrix[1][j] = at0[j][1] + 2.0 * k * is;
        scale = scale
            .max(at0[j][0].abs() + k.abs() * abs_int)
            .max(at0[j][1].abs() + 2.0 * k.abs() * abs_int);
    }
    CharacteristicSystem { matrix, scale }
}

/// Dimension of the eigenspace attached to a record (0 when the system is
/// numerically full rank).
pub(crate) fn null_space_dimension(rec: &RootRecord, phi_w: f64, t_final: f64) -> Result<usize> {
    let form = EigenForm::for_record(rec);
    Ok(2 - characteristic_system(form, rec.lambda, phi_w, t_final).rank())
}

/// An eigenfunction `g` of `K` with eigenvalue `μ = 1/λ`, normalized so that
/// `‖g‖₂ = 1` on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenfunction {
    pub form: EigenForm,
    pub lambda: f64,
    /// Coefficients `(b, c)` of `h = K g` in the form's basis.
    pub coefficients: (f64, f64),
    pub t_final: f64,
}

impl Eigenfunction {
    pub fn mu(&self) -> f64 {
        1.0 / self.lambda
    }

    /// `h(t) = (K g)(t) = μ g(t)`.
    pub fn h(&self, t: f64) -> f64 {
        self.combine(t, 0)
    }

    pub fn h_second(&self, t: f64) -> f64 {
        self.combine(t, 2)
    }

    /// `g(t) = λ h(t)`.
    pub fn g(&self, t: f64) -> f64 {
        self.lambda * self.h(t)
    }

    pub fn sample(&self, nodes: &[f64]) -> Vec<f64> {
        nodes.iter().map(|&t| self.g(t)).collect()
    }

    fn combine(&self, t: f64, derivative: usize) -> f64 {
        let basis = self.form.basis(t, self.t_final);
        self.coefficients.0 * basis[0][derivative] + self.coefficients.1 * basis[1][derivative]
    }

    fn inner(&self, other: &Eigenfunction) -> f64 {
        let panels = self.form.panels(self.t_final);
        GaussRule::new(GAUSS_ORDER).integrate(|t| self.g(t) * other.g(t), 0.0, self.t_final, panels)
    }

    fn scaled(mut self, factor: f64) -> Self {
        self.coefficients.0 *= factor;
        self.coefficients.1 *= factor;
        self
    }

    fn normalized(self) -> Self {
        let n = self.inner(&self).sqrt();
        self.scaled(1.0 / n)
    }
}

/// Orthonormal eigenfunctions for a record, one per unit of multiplicity.
///
/// Fails with [`Error::FullRankSystem`] when the boundary system has no
/// null space, meaning the record is not an eigenvalue.
pub fn eigenfunction_for_root(rec: &RootRecord, phi_w: f64, t_final: f64) -> Result<Vec<Eigenfunction>> {
    let form = EigenForm::for_record(rec);
    let sys = characteristic_system(form, rec.lambda, phi_w, t_final);
    let make = |b: f64, c: f64| Eigenfunction {
        form,
        lambda: rec.lambda,
        coefficients: (b, c),
        t_final,
    };
    match sys.rank() {
        2 => Err(Error::FullRankSystem(sys.singular_values()[1] / sys.scale)),
        1 => {
            let [[a, b], [c, d]] = sys.matrix;
            let (r0, r1) = if a.hypot(b) >= c.hypot(d) { (a, b) } else { (c, d) };
            Ok(vec![make(-r1, r0).normalized()])
        }
        _ => {
            let first = make(1.0, 0.0).normalized();
            let second = make(0.0, 1.0);
            let overlap = second.inner(&first);
            let second = make(-overlap * first.coefficients.0, 1.0 - overlap * first.coefficients.1).normalized();
            Ok(vec![first, second])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{closed_form_roots, transcendental_roots, DomainLabel};
    use crate::objective::operator_k_kernel;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// `(K g)(t)` by Gauss–Legendre split at the kink `s = t`.
    fn apply_k(f: &Eigenfunction, phi_w: f64, t_final: f64, t: f64) -> f64 {
        let phi = -(phi_w + t_final);
        let rule = GaussRule::new(GAUSS_ORDER);
        let panels = 4 + (4.0 * t_final * f.lambda.abs().sqrt()) as usize;
        let k = |s: f64| operator_k_kernel(phi, t, s) * f.g(s);
        rule.integrate(k, 0.0, t, panels) + rule.integrate(k, t, t_final, panels)
    }

    fn check_eigen(f: &Eigenfunction, phi_w: f64, t_final: f64) {
        for i in 0..=10 {
            let t = t_final * i as f64 / 10.0;
            let kg = apply_k(f, phi_w, t_final, t);
            assert!((kg - f.mu() * f.g(t)).abs() < 1e-9 * (1.0 + f.mu().abs()), "t={t}: {kg} vs {}", f.mu() * f.g(t));
        }
    }

    #[test]
    fn transcendental_eigenfunctions_solve_the_integral_equation() {
        for &(pw, t) in &[(2.8, 0.5), (2.5, 1.2), (0.3, 0.3), (1.0, 1.0)] {
            for eqn in [RootEquation::Eq1, RootEquation::Eq2, RootEquation::Eq11, RootEquation::Eq12] {
                for rec in transcendental_roots(eqn, pw, t, 3).unwrap() {
                    let fs = eigenfunction_for_root(&rec, pw, t).unwrap();
                    assert_eq!(fs.len(), 1);
                    check_eigen(&fs[0], pw, t);
                }
            }
        }
    }

    #[test]
    fn d4_linear_family_is_an_eigenfunction() {
        let t = 1.0;
        let rec = RootRecord::lambda_one(PI, t);
        let fs = eigenfunction_for_root(&rec, PI, t).unwrap();
        assert_eq!(fs.len(), 1);
        check_eigen(&fs[0], PI, t);
    }

    #[test]
    fn closed_form_roots_are_double() {
        for label in [DomainLabel::D4, DomainLabel::D1PhiHalf] {
            let pw = if label == DomainLabel::D4 { PI } else { FRAC_PI_2 };
            let rec = &closed_form_roots(label, 0.7, 2).unwrap()[1];
            let fs = eigenfunction_for_root(rec, pw, 0.7).unwrap();
            assert_eq!(fs.len(), 2);
            assert!(fs[0].inner(&fs[1]).abs() < 1e-12);
            for f in &fs {
                assert!((f.inner(f) - 1.0).abs() < 1e-12);
                check_eigen(f, pw, 0.7);
            }
        }
    }

    #[test]
    fn h_solves_the_ode() {
        let rec = &transcendental_roots(RootEquation::Eq1, 2.8, 0.5, 2).unwrap()[1];
        let f = eigenfunction_for_root(rec, 2.8, 0.5).unwrap()[0];
        for i in 1..10 {
            let t = 0.05 * i as f64;
            assert!((f.h_second(t) + 4.0 * f.h(t) - 4.0 * f.g(t)).abs() < 1e-8);
        }
    }

    #[test]
    fn non_root_is_rejected() {
        let mut rec = transcendental_roots(RootEquation::Eq1, 2.8, 0.5, 1).unwrap().remove(0);
        let a = rec.root.unwrap() + 0.1;
        rec.root = Some(a);
        rec.lambda = 1.0 - a * a;
        assert!(matches!(eigenfunction_for_root(&rec, 2.8, 0.5), Err(Error::FullRankSystem(_))));
    }
}
