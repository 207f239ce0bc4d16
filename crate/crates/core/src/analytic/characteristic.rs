//! Characteristic functions and their pole-free factors.
//!
//! `F¹ = −4·G₁·G₂` with
//! `G₁(x) = sin φ_W cos xT + x cos φ_W sin xT` (zero iff `−x cot φ_W = cot xT`) and
//! `G₂(x) = cos φ_W sin xT + x sin φ_W cos xT` (zero iff `−x tan φ_W = tan xT`).
//!
//! `F² = −4 cosh²(xT)·H₁·H₂` with
//! `H₁(x) = x sin φ_W + cos φ_W tanh xT` (zero iff `−x tan φ_W = tanh xT`) and
//! `H₂(x) = x cos φ_W tanh xT − sin φ_W` (zero iff `x cot φ_W = coth xT`).
//!
//! Bisection runs on the factors, which stay finite where `tan`/`cot` blow up.

/// Largest `2aT` for which `F²` is evaluated directly.
pub const F2_OVERFLOW_ARG: f64 = 350.0;

/// Oscillatory characteristic function.
pub fn f1(a: f64, phi_w: f64, t: f64) -> f64 {
    let (s2a, c2a) = (2.0 * a * t).sin_cos();
    let (s2w, c2w) = (2.0 * phi_w).sin_cos();
    -2.0 * a - a * a * s2a * s2w - s2a * s2w + 2.0 * a * c2a * c2w
}

/// Value of `F²`, saturated to a signed infinity once `2aT` exceeds
/// [`F2_OVERFLOW_ARG`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F2Value {
    pub value: f64,
    pub overflow: bool,
}

/// Exponential characteristic function.
pub fn f2(a: f64, phi_w: f64, t: f64) -> F2Value {
    let (s2w, c2w) = (2.0 * phi_w).sin_cos();
    let arg = 2.0 * a * t;
    if arg > F2_OVERFLOW_ARG {
        // sinh ≈ cosh ≈ e^{arg}/2; the sign is that of the bracket below
        let lead = (1.0 - a * a) * s2w - 2.0 * a * c2w;
        let value = if lead == 0.0 {
            -f64::INFINITY * a.signum()
        } else {
            f64::INFINITY.copysign(lead)
        };
        return F2Value { value, overflow: true };
    }
    let (sh, ch) = (arg.sinh(), arg.cosh());
    F2Value {
        value: -a * a * sh * s2w + 2.0 * a * (1.0 - ch * c2w) + sh * s2w,
        overflow: false,
    }
}

/// Discriminant of the `λ = 1` system; the eigenvalue `μ = 1` exists iff it vanishes.
pub fn delta_lambda1(phi_w: f64, t: f64) -> f64 {
    let (s, c) = phi_w.sin_cos();
    -2.0 * s * (s + t * c)
}

/// Pole-free form of `−x cot φ_W = cot xT`.
pub fn eq1_residual(x: f64, phi_w: f64, t: f64) -> f64 {
    let (s, c) = phi_w.sin_cos();
    let (sx, cx) = (x * t).sin_cos();
    s * cx + x * c * sx
}

/// Pole-free form of `−x tan φ_W = tan xT`.
pub fn eq2_residual(x: f64, phi_w: f64, t: f64) -> f64 {
    let (s, c) = phi_w.sin_cos();
    let (sx, cx) = (x * t).sin_cos();
    c * sx + x * s * cx
}

/// Pole-free form of `−x tan φ_W = tanh xT`.
pub fn eq11_residual(x: f64, phi_w: f64, t: f64) -> f64 {
    let (s, c) = phi_w.sin_cos();
    x * s + c * (x * t).tanh()
}

/// Pole-free form of `x cot φ_W = coth xT`.
pub fn eq12_residual(x: f64, phi_w: f64, t: f64) -> f64 {
    let (s, c) = phi_w.sin_cos();
    x * c * (x * t).tanh() - s
}

/// Number of roots of `αx = tan(Tx)` on `(0, 1)` for `T ∈ (0, π/2]`.
///
/// `tan(Tx)/x` increases from `T` to `tan T`, so there is exactly one root
/// when `T < α < tan T` and none otherwise.
pub fn lemma_tan_root_count(alpha: f64, t: f64) -> usize {
    usize::from(t < alpha && alpha < t.tan())
}

/// Number of roots of `αx = cot(Tx)` on `(0, 1)` for `T ∈ (0, π/2]`.
///
/// `cot(Tx)/x` decreases from `+∞` to `cot T`, so there is one root exactly
/// when `α > cot T`.
pub fn lemma_cot_root_count(alpha: f64, t: f64) -> usize {
    usize::from(alpha > t.cos() / t.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn f1_examples() {
        assert!(f1(2.0, PI, FRAC_PI_2).abs() < 1e-12);
        for t in [0.3, 0.9, 1.4] {
            for n in 1..6 {
                let a = (2.0 * PI * n as f64 - PI) / (2.0 * t);
                assert!(f1(a, FRAC_PI_2, t).abs() < 1e-10 * (1.0 + a) * (1.0 + a));
            }
        }
        assert_eq!(f1(0.0, 1.3, 0.7), 0.0);
    }

    #[test]
    fn f2_examples() {
        assert_eq!(f2(0.0, 1.0, 1.0).value, 0.0);
        for a in [0.1, 1.0, 3.0, 20.0] {
            let v = f2(a, PI, 1.0).value;
            assert!(v < 0.0);
            let expect = 2.0 * a * (1.0 - (2.0 * a).cosh());
            assert!((v - expect).abs() <= 1e-9 * expect.abs());
        }
        let big = f2(200.0, PI, 1.0);
        assert!(big.overflow && big.value == f64::NEG_INFINITY);
    }

    #[test]
    fn factorizations_match() {
        for &(pw, t) in &[(0.3, 0.3), (2.8, 0.5), (2.5, 1.2), (1.0, 1.0), (3.0 * FRAC_PI_4, PI / 8.0)] {
            for i in 1..200 {
                let x = i as f64 * 0.05;
                let g = -4.0 * eq1_residual(x, pw, t) * eq2_residual(x, pw, t);
                assert!((f1(x, pw, t) - g).abs() < 1e-11 * (1.0 + x).powi(2));
                let ch = (x * t).cosh();
                let h = -4.0 * ch * ch * eq11_residual(x, pw, t) * eq12_residual(x, pw, t);
                let f = f2(x, pw, t).value;
                assert!((f - h).abs() < 1e-11 * (1.0 + x).powi(2) * ch * ch, "x={x}");
            }
        }
    }

    #[test]
    fn delta_examples() {
        assert!(delta_lambda1(PI, 0.7).abs() < 1e-15);
        assert!(delta_lambda1(3.0 * FRAC_PI_4, 1.0).abs() < 1e-15);
        assert!((delta_lambda1(FRAC_PI_2, 0.4) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn f2_root_bracket_at_d3_sample() {
        let (pw, t) = (0.3, 0.3);
        assert!(f2(0.5, pw, t).value.signum() != f2(10.0, pw, t).value.signum());
    }
}
