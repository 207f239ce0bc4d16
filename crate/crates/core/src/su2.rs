//! Exact single-qubit dynamics under piecewise-constant controls.
//!
//! Each control segment contributes the closed-form exponential of a 2x2
//! Hermitian generator, so propagators carry no integration error.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance used when validating Hermiticity and unitarity of inputs.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// A complex 2x2 matrix, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Matrix(pub [[Complex64; 2]; 2]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// The Pauli matrix for `axis`.
pub fn pauli(axis: Axis) -> Su2Matrix {
    match axis {
        Axis::X => Su2Matrix([[C0, C1], [C1, C0]]),
        Axis::Y => Su2Matrix([[C0, -CI], [CI, C0]]),
        Axis::Z => Su2Matrix([[C1, C0], [C0, -C1]]),
    }
}

impl Su2Matrix {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Su2Matrix([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Su2Matrix([[C1, C0], [C0, C1]])
    }

    pub fn zero() -> Self {
        Su2Matrix([[C0; 2]; 2])
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Su2Matrix([[a, C0], [C0, d]])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Su2Matrix([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    #[inline]
    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let m = &self.0;
        Su2Matrix([[m[0][0] * z, m[0][1] * z], [m[1][0] * z, m[1][1] * z]])
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(Complex64::new(x, 0.0))
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Su2Matrix) -> Su2Matrix {
        *self * *other - *other * *self
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Su2Matrix) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |U†U − I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Su2Matrix::identity())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Pauli coordinates `(c₀, c_x, c_y, c_z)` with `H = c₀I + c·σ`, assuming `H` Hermitian.
    pub fn pauli_coords(&self) -> [f64; 4] {
        let m = &self.0;
        [
            0.5 * (m[0][0].re + m[1][1].re),
            0.5 * (m[0][1].re + m[1][0].re),
            0.5 * (m[1][0].im - m[0][1].im),
            0.5 * (m[0][0].re - m[1][1].re),
        ]
    }

    /// `c₀I + c_x σ_x + c_y σ_y + c_z σ_z`.
    pub fn from_pauli_coords(c: [f64; 4]) -> Self {
        Su2Matrix([
            [Complex64::new(c[0] + c[3], 0.0), Complex64::new(c[1], -c[2])],
            [Complex64::new(c[1], c[2]), Complex64::new(c[0] - c[3], 0.0)],
        ])
    }
}

impl Mul for Su2Matrix {
    type Output = Su2Matrix;

    #[inline]
    fn mul(self, rhs: Su2Matrix) -> Su2Matrix {
        let a = &self.0;
        let b = &rhs.0;
        Su2Matrix([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Add for Su2Matrix {
    type Output = Su2Matrix;

    fn add(self, rhs: Su2Matrix) -> Su2Matrix {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Su2Matrix {
    type Output = Su2Matrix;

    fn sub(self, rhs: Su2Matrix) -> Su2Matrix {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

/// `exp(−i H dt)` for Hermitian `H`, in closed form.
///
/// With `H = c₀I + c·σ` and `r = |c|` the result is
/// `e^{−i c₀ dt} (cos(r dt) I − i sin(r dt) ĉ·σ)`.
pub fn expm_su2(h: &Su2Matrix, dt: f64) -> Result<Su2Matrix> {
    if !dt.is_finite() {
        return Err(invalid("dt", dt, "must be finite"));
    }
    let deviation = h.hermiticity_defect();
    if deviation > STRUCTURE_TOL * (1.0 + h.max_abs()) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(expm_hermitian_unchecked(h, dt))
}

pub(crate) fn expm_hermitian_unchecked(h: &Su2Matrix, dt: f64) -> Su2Matrix {
    let [c0, cx, cy, cz] = h.pauli_coords();
    let r = (cx * cx + cy * cy + cz * cz).sqrt();
    let theta = r * dt;
    let cos = theta.cos();
    // sin(r dt)/r, continuous at r = 0
    let sinc = if theta.abs() < 1e-8 {
        dt * (1.0 - theta * theta / 6.0)
    } else {
        theta.sin() / r
    };
    // cos I − i sinc (c·σ)
    let rot = Su2Matrix([
        [Complex64::new(cos, -sinc * cz), Complex64::new(-sinc * cy, -sinc * cx)],
        [Complex64::new(sinc * cy, -sinc * cx), Complex64::new(cos, sinc * cz)],
    ]);
    let phase = Complex64::from_polar(1.0, -c0 * dt);
    rot.scale(phase)
}

/// A real control on `[0, T]` that is constant on `M` uniform segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseControl {
    t_final: f64,
    amplitudes: Vec<f64>,
}

impl PiecewiseControl {
    pub fn new(t_final: f64, amplitudes: Vec<f64>) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(invalid("T", t_final, "final time must be positive and finite"));
        }
        if amplitudes.is_empty() {
            return Err(Error::EmptyControl);
        }
        if let Some(&bad) = amplitudes.iter().find(|a| !a.is_finite()) {
            return Err(invalid("amplitude", bad, "must be finite"));
        }
        Ok(PiecewiseControl {
            t_final,
            amplitudes,
        })
    }

    pub fn constant(t_final: f64, segments: usize, value: f64) -> Result<Self> {
        Self::new(t_final, vec![value; segments])
    }

    pub fn zero(t_final: f64, segments: usize) -> Result<Self> {
        Self::constant(t_final, segments, 0.0)
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn segments(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn segment_len(&self) -> f64 {
        self.t_final / self.amplitudes.len() as f64
    }

    /// Left endpoint of segment `k`.
    pub fn boundary(&self, k: usize) -> f64 {
        if k == self.segments() {
            self.t_final
        } else {
            k as f64 * self.segment_len()
        }
    }

    /// Segment containing `t`; the final time belongs to the last segment.
    pub fn segment_of(&self, t: f64) -> usize {
        let k = (t / self.segment_len()).floor();
        (k.max(0.0) as usize).min(self.segments() - 1)
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.amplitudes[self.segment_of(t)]
    }

    /// `self + eps * direction`, segment by segment.
    pub fn perturbed(&self, direction: &[f64], eps: f64) -> Result<Self> {
        if direction.len() != self.segments() {
            return Err(invalid(
                "direction length",
                direction.len() as f64,
                "must equal the segment count",
            ));
        }
        let amps = self
            .amplitudes
            .iter()
            .zip(direction)
            .map(|(a, d)| a + eps * d)
            .collect();
        Self::new(self.t_final, amps)
    }

    /// Segments `start..end` as a control on `[0, (end − start)·h]`.
    pub fn window(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.segments() {
            return Err(invalid("window", end as f64, "need start < end <= segment count"));
        }
        Self::new(
            (end - start) as f64 * self.segment_len(),
            self.amplitudes[start..end].to_vec(),
        )
    }
}

/// Propagators at segment boundaries and requested sample times, in time order.
#[derive(Debug, Clone)]
pub struct PropagatorTrajectory {
    points: Vec<(f64, Su2Matrix)>,
}

impl PropagatorTrajectory {
    pub fn points(&self) -> &[(f64, Su2Matrix)] {
        &self.points
    }

    pub fn final_propagator(&self) -> Su2Matrix {
        self.points.last().map(|p| p.1).unwrap_or_else(Su2Matrix::identity)
    }

    /// The stored propagator closest to `t`.
    pub fn nearest(&self, t: f64) -> (f64, Su2Matrix) {
        *self
            .points
            .iter()
            .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
            .expect("trajectory always holds the initial point")
    }
}

/// Boundary propagators `U_{t_k}` for `k = 0..=M`, computed as the ordered
/// product of exact per-segment exponentials of `−i(H₀ + f_k V)`.
pub fn boundary_propagators(ctrl: &PiecewiseControl, h0: &Su2Matrix, v: &Su2Matrix) -> Result<Vec<Su2Matrix>> {
    check_generators(h0, v)?;
    let h = ctrl.segment_len();
    let mut out = Vec::with_capacity(ctrl.segments() + 1);
    let mut u = Su2Matrix::identity();
    out.push(u);
    for &f in ctrl.amplitudes() {
        let gen = *h0 + v.scale_re(f);
        u = expm_hermitian_unchecked(&gen, h) * u;
        out.push(u);
    }
    Ok(out)
}

/// `U_T` for the given control.
pub fn final_propagator(ctrl: &PiecewiseControl, h0: &Su2Matrix, v: &Su2Matrix) -> Result<Su2Matrix> {
    Ok(*boundary_propagators(ctrl, h0, v)?.last().expect("non-empty"))
}

/// Propagate the Schrödinger equation `dU/dt = −i(H₀ + f(t)V)U`, `U₀ = I`.
pub fn propagate(
    ctrl: &PiecewiseControl,
    h0: &Su2Matrix,
    v: &Su2Matrix,
    samples: &[f64],
) -> Result<PropagatorTrajectory> {
    let t_final = ctrl.t_final();
    if let Some(&t) = samples.iter().find(|&&t| !(0.0..=t_final).contains(&t)) {
        return Err(Error::SampleOutOfRange { t, t_final });
    }
    let bounds = boundary_propagators(ctrl, h0, v)?;
    let mut points: Vec<(f64, Su2Matrix)> = bounds
        .iter()
        .enumerate()
        .map(|(k, u)| (ctrl.boundary(k), *u))
        .collect();
    for &t in samples {
        let k = ctrl.segment_of(t);
        let gen = *h0 + v.scale_re(ctrl.amplitudes()[k]);
        let u = expm_hermitian_unchecked(&gen, t - ctrl.boundary(k)) * bounds[k];
        points.push((t, u));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(PropagatorTrajectory { points })
}

fn check_generators(h0: &Su2Matrix, v: &Su2Matrix) -> Result<()> {
    for m in [h0, v] {
        let deviation = m.hermiticity_defect();
        if deviation > STRUCTURE_TOL * (1.0 + m.max_abs()) {
            return Err(Error::NotHermitian { deviation });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: &Su2Matrix, b: &Su2Matrix, tol: f64) -> bool {
        a.max_abs_diff(b) < tol
    }

    #[test]
    fn pauli_z_is_diagonal() {
        assert_eq!(pauli(Axis::Z), Su2Matrix::diag(C1, -C1));
    }

    #[test]
    fn pauli_squares_and_commutator() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let p = pauli(axis);
            assert!(close(&(p * p), &Su2Matrix::identity(), 0.0 + 1e-15));
        }
        let comm = pauli(Axis::Z).commutator(&pauli(Axis::X));
        assert!(close(&comm, &pauli(Axis::Y).scale(CI * 2.0), 1e-15));
    }

    #[test]
    fn expm_examples() {
        let z = expm_su2(&pauli(Axis::Z), PI).unwrap();
        assert!(close(&z, &Su2Matrix::identity().scale_re(-1.0), 1e-12));

        let id = expm_su2(&Su2Matrix::zero(), 1.0).unwrap();
        assert!(close(&id, &Su2Matrix::identity(), 1e-15));

        let x = expm_su2(&pauli(Axis::X), FRAC_PI_2).unwrap();
        assert!(close(&x, &pauli(Axis::X).scale(-CI), 1e-12));
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let m = Su2Matrix::new(C0, C1, C0, C0);
        assert!(matches!(expm_su2(&m, 1.0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn expm_includes_global_phase() {
        // H = 2I + σ_x
        let h = Su2Matrix::identity().scale_re(2.0) + pauli(Axis::X);
        let u = expm_su2(&h, 0.7).unwrap();
        let expected = expm_su2(&pauli(Axis::X), 0.7)
            .unwrap()
            .scale(Complex64::from_polar(1.0, -1.4));
        assert!(close(&u, &expected, 1e-14));
    }

    #[test]
    fn free_evolution_is_z_rotation() {
        let ctrl = PiecewiseControl::zero(1.3, 5).unwrap();
        let ut = final_propagator(&ctrl, &pauli(Axis::Z), &pauli(Axis::X)).unwrap();
        let expected = Su2Matrix::diag(Complex64::from_polar(1.0, -1.3), Complex64::from_polar(1.0, 1.3));
        assert!(close(&ut, &expected, 1e-14));
    }

    #[test]
    fn trajectory_starts_at_identity() {
        let ctrl = PiecewiseControl::new(1.0, vec![0.3, -1.0, 2.0]).unwrap();
        let traj = propagate(&ctrl, &pauli(Axis::Z), &pauli(Axis::X), &[0.0, 0.5]).unwrap();
        assert_eq!(traj.points()[0], (0.0, Su2Matrix::identity()));
        assert!(traj.points().windows(2).all(|w| w[0].0 <= w[1].0));
    }

    #[test]
    fn constant_control_is_segment_count_independent() {
        let h0 = pauli(Axis::Z);
        let v = pauli(Axis::X).scale_re(0.8) + pauli(Axis::Y).scale_re(-0.3);
        let one = PiecewiseControl::constant(1.1, 1, 0.9).unwrap();
        let many = PiecewiseControl::constant(1.1, 64, 0.9).unwrap();
        let a = final_propagator(&one, &h0, &v).unwrap();
        let b = final_propagator(&many, &h0, &v).unwrap();
        assert!(close(&a, &b, 1e-12));
    }

    #[test]
    fn propagate_errors() {
        let ctrl = PiecewiseControl::zero(1.0, 2).unwrap();
        let err = propagate(&ctrl, &pauli(Axis::Z), &pauli(Axis::X), &[1.5]);
        assert!(matches!(err, Err(Error::SampleOutOfRange { .. })));
        assert!(matches!(PiecewiseControl::new(1.0, vec![]), Err(Error::EmptyControl)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn propagators_are_unitary(
                amps in prop::collection::vec(-5.0f64..5.0, 1..20),
                t in 0.05f64..3.0,
                vx in -2.0f64..2.0,
                vy in -2.0f64..2.0,
            ) {
                let ctrl = PiecewiseControl::new(t, amps).unwrap();
                let v = pauli(Axis::X).scale_re(vx) + pauli(Axis::Y).scale_re(vy);
                let traj = propagate(&ctrl, &pauli(Axis::Z), &v, &[0.37 * t, t]).unwrap();
                for (_, u) in traj.points() {
                    prop_assert!(u.unitarity_defect() < 1e-12);
                }
                prop_assert!((traj.final_propagator().det().norm() - 1.0).abs() < 1e-12);
            }

            #[test]
            fn propagation_composes(
                amps in prop::collection::vec(-4.0f64..4.0, 2..16),
                split in 1usize..15,
            ) {
                let m = amps.len();
                let split = 1 + split % (m - 1);
                let ctrl = PiecewiseControl::new(1.7, amps).unwrap();
                let h0 = pauli(Axis::Z);
                let v = pauli(Axis::X);
                let full = final_propagator(&ctrl, &h0, &v).unwrap();
                let first = final_propagator(&ctrl.window(0, split).unwrap(), &h0, &v).unwrap();
                let second = final_propagator(&ctrl.window(split, m).unwrap(), &h0, &v).unwrap();
                prop_assert!((second * first).max_abs_diff(&full) < 1e-12);
            }
        }
    }
}
