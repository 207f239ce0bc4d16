//! Gate-fidelity objective, its gradient and Hessian kernels.
//!
//! For a control `f` with final propagator `U_T` put `Y = W†U_T` and
//! `V_t = U_t† V U_t`. Then
//!
//! * `J_W[f] = ¼ |Tr Y|²`,
//! * `δJ/δf(t) = ½ Im(conj(Tr Y) · Tr(Y V_t))`,
//! * `Hess(t, s) = ½ Re(Tr(Y V_t) Tr(Y† V_s) − Tr(Y V_s V_t) conj(Tr Y))` for `t ≤ s`,
//!   extended symmetrically.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quadrature::GaussRule;
use crate::su2::{
    boundary_propagators, expm_hermitian_unchecked, pauli, Axis, PiecewiseControl, Su2Matrix,
    STRUCTURE_TOL,
};

/// Gauss–Legendre order used per control segment.
const CELL_ORDER: usize = 6;

/// Result of the special-control formula, with both readings of its denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialControl {
    /// `(−Tr H₀ Tr V + 2 Tr(H₀V)) / ((Tr V)² − 2 Tr(V²))`.
    pub value: f64,
    /// Same numerator over `(Tr V²)² − 2 Tr(V²)`; `None` when that denominator vanishes.
    pub literal_reading: Option<f64>,
    pub readings_agree: bool,
}

/// Special constant control `f₀` for the pair `(H₀, V)`.
pub fn special_control(h0: &Su2Matrix, v: &Su2Matrix) -> Result<SpecialControl> {
    ensure_noncommuting(h0, v)?;
    let tr_h = h0.trace().re;
    let tr_v = v.trace().re;
    let tr_hv = (*h0 * *v).trace().re;
    let tr_v2 = (*v * *v).trace().re;
    let numerator = -tr_h * tr_v + 2.0 * tr_hv;
    let denominator = tr_v * tr_v - 2.0 * tr_v2;
    if denominator.abs() < 1e-14 * (1.0 + tr_v2) {
        return Err(Error::ZeroDenominator);
    }
    let value = numerator / denominator;
    let literal_den = tr_v2 * tr_v2 - 2.0 * tr_v2;
    let literal_reading = (literal_den.abs() > 1e-14 * (1.0 + tr_v2 * tr_v2)).then(|| numerator / literal_den);
    let readings_agree = literal_reading.is_some_and(|l| (l - value).abs() <= 1e-12 * (1.0 + value.abs()));
    Ok(SpecialControl {
        value,
        literal_reading,
        readings_agree,
    })
}

/// Special time `T₀ = π / spread(H₀ − I Tr H₀/2 + f₀(V − I Tr V/2))`, where
/// `spread` is the eigenvalue gap `λ_max − λ_min`.
pub fn special_time(h0: &Su2Matrix, v: &Su2Matrix, f0: f64) -> Result<f64> {
    ensure_noncommuting(h0, v)?;
    let [_, hx, hy, hz] = h0.pauli_coords();
    let [_, vx, vy, vz] = v.pauli_coords();
    let c = [hx + f0 * vx, hy + f0 * vy, hz + f0 * vz];
    let r = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    if r < 1e-14 {
        return Err(Error::ZeroTracelessPart);
    }
    Ok(PI / (2.0 * r))
}

fn ensure_noncommuting(h0: &Su2Matrix, v: &Su2Matrix) -> Result<()> {
    let scale = 1.0 + h0.max_abs() * v.max_abs();
    if h0.commutator(v).max_abs() <= 1e-12 * scale {
        return Err(Error::CommutingHamiltonians);
    }
    Ok(())
}

/// Control problem: drift `σ_z`, coupling `v_x σ_x + v_y σ_y`, target `W = e^{iφ_W σ_z}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemConfig {
    phi_w: f64,
    t_final: f64,
    vx: f64,
    vy: f64,
    special: SpecialControl,
    special_time: f64,
}

impl SystemConfig {
    pub fn new(phi_w: f64, t_final: f64, vx: f64, vy: f64) -> Result<Self> {
        if !(phi_w > 0.0 && phi_w <= PI * (1.0 + 1e-12)) {
            return Err(invalid("phi_w", phi_w, "gate angle must lie in (0, pi]"));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(invalid("T", t_final, "final time must be positive and finite"));
        }
        if !(vx.is_finite() && vy.is_finite()) || vx * vx + vy * vy == 0.0 {
            return Err(invalid("v", vx.hypot(vy), "coupling must be finite and nonzero"));
        }
        let h0 = pauli(Axis::Z);
        let v = coupling(vx, vy);
        let special = special_control(&h0, &v)?;
        let special_time = special_time(&h0, &v, special.value)?;
        Ok(SystemConfig {
            phi_w,
            t_final,
            vx,
            vy,
            special,
            special_time,
        })
    }

    /// Coupling along `σ_x` with strength `v`.
    pub fn with_coupling(phi_w: f64, t_final: f64, v: f64) -> Result<Self> {
        Self::new(phi_w, t_final, v, 0.0)
    }

    pub fn phi_w(&self) -> f64 {
        self.phi_w
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn vx(&self) -> f64 {
        self.vx
    }

    pub fn vy(&self) -> f64 {
        self.vy
    }

    pub fn v(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    /// `φ = −(φ_W + T)`.
    pub fn phi(&self) -> f64 {
        -(self.phi_w + self.t_final)
    }

    pub fn special_control(&self) -> SpecialControl {
        self.special
    }

    pub fn f0(&self) -> f64 {
        self.special.value
    }

    pub fn special_time(&self) -> f64 {
        self.special_time
    }

    pub fn drift(&self) -> Su2Matrix {
        pauli(Axis::Z)
    }

    pub fn coupling(&self) -> Su2Matrix {
        coupling(self.vx, self.vy)
    }

    /// `W = e^{iφ_W σ_z}` (gate phase fixed to zero).
    pub fn gate(&self) -> Su2Matrix {
        Su2Matrix::diag(
            Complex64::from_polar(1.0, self.phi_w),
            Complex64::from_polar(1.0, -self.phi_w),
        )
    }

    /// `cos²(φ_W + T)`, the objective at `f₀`.
    pub fn objective_at_f0(&self) -> f64 {
        (self.phi_w + self.t_final).cos().powi(2)
    }

    /// `v² sin 2φ`, the factor relating the Hessian to the operator K.
    ///
    /// Rounding residue below `1e-12` in `sin 2φ` is returned as exactly 0.
    pub fn hessian_factor(&self) -> f64 {
        let s = (2.0 * self.phi()).sin();
        if s.abs() < 1e-12 {
            0.0
        } else {
            self.v().powi(2) * s
        }
    }

    /// The special control `f₀` held over `segments` segments.
    pub fn special_control_signal(&self, segments: usize) -> Result<PiecewiseControl> {
        PiecewiseControl::constant(self.t_final, segments, self.f0())
    }
}

fn coupling(vx: f64, vy: f64) -> Su2Matrix {
    pauli(Axis::X).scale_re(vx) + pauli(Axis::Y).scale_re(vy)
}

/// `¼ |Tr(U_T W†)|²`.
pub fn objective(u_t: &Su2Matrix, w: &Su2Matrix) -> Result<f64> {
    for (what, m) in [("U_T", u_t), ("W", w)] {
        let deviation = m.unitarity_defect();
        if deviation > STRUCTURE_TOL {
            return Err(Error::NotUnitary { what, deviation });
        }
    }
    Ok(0.25 * (*u_t * w.adjoint()).trace().norm_sqr())
}

/// `J_W[f]` for a control under `cfg`.
pub fn objective_for_control(cfg: &SystemConfig, ctrl: &PiecewiseControl) -> Result<f64> {
    let bounds = boundary_propagators(ctrl, &cfg.drift(), &cfg.coupling())?;
    let u_t = bounds.last().expect("non-empty");
    Ok(0.25 * (cfg.gate().adjoint() * *u_t).trace().norm_sqr())
}

/// Propagation data shared by the gradient and Hessian kernels of one control.
#[derive(Debug, Clone)]
pub struct AdjointCache {
    ctrl: PiecewiseControl,
    h0: Su2Matrix,
    v: Su2Matrix,
    bounds: Vec<Su2Matrix>,
    y: Su2Matrix,
    tr_y: Complex64,
    nodes: Vec<f64>,
    sampled: Vec<Su2Matrix>,
}

impl AdjointCache {
    pub fn new(cfg: &SystemConfig, ctrl: &PiecewiseControl) -> Result<Self> {
        Self::with_nodes(cfg, ctrl, &[])
    }

    /// Cache that additionally stores `V_t` at `nodes`.
    pub fn with_nodes(cfg: &SystemConfig, ctrl: &PiecewiseControl, nodes: &[f64]) -> Result<Self> {
        if (ctrl.t_final() - cfg.t_final()).abs() > 1e-12 * cfg.t_final() {
            return Err(invalid("T", ctrl.t_final(), "control horizon differs from the configured final time"));
        }
        let t_final = ctrl.t_final();
        if let Some(&t) = nodes.iter().find(|&&t| !(0.0..=t_final).contains(&t)) {
            return Err(Error::SampleOutOfRange { t, t_final });
        }
        let h0 = cfg.drift();
        let v = cfg.coupling();
        let bounds = boundary_propagators(ctrl, &h0, &v)?;
        let y = cfg.gate().adjoint() * *bounds.last().expect("non-empty");
        let mut cache = AdjointCache {
            ctrl: ctrl.clone(),
            h0,
            v,
            bounds,
            y,
            tr_y: y.trace(),
            nodes: nodes.to_vec(),
            sampled: Vec::new(),
        };
        cache.sampled = nodes.iter().map(|&t| cache.v_at(t)).collect();
        Ok(cache)
    }

    pub fn y(&self) -> Su2Matrix {
        self.y
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn sampled(&self) -> &[Su2Matrix] {
        &self.sampled
    }

    pub fn objective(&self) -> f64 {
        0.25 * self.tr_y.norm_sqr()
    }

    pub fn propagator_at(&self, t: f64) -> Su2Matrix {
        let k = self.ctrl.segment_of(t);
        let gen = self.h0 + self.v.scale_re(self.ctrl.amplitudes()[k]);
        expm_hermitian_unchecked(&gen, t - self.ctrl.boundary(k)) * self.bounds[k]
    }

    /// `V_t = U_t† V U_t`.
    pub fn v_at(&self, t: f64) -> Su2Matrix {
        let u = self.propagator_at(t);
        u.adjoint() * self.v * u
    }

    pub fn gradient_from(&self, vt: &Su2Matrix) -> f64 {
        0.5 * (self.tr_y.conj() * (self.y * *vt).trace()).im
    }

    /// Hessian kernel from `V_t`, `V_s`; the argument order is irrelevant.
    pub fn hessian_from(&self, t: f64, vt: &Su2Matrix, s: f64, vs: &Su2Matrix) -> f64 {
        let (early, late) = if t <= s { (vt, vs) } else { (vs, vt) };
        let a = (self.y * *early).trace();
        let b = (self.y.adjoint() * *late).trace();
        let c = (self.y * *late * *early).trace();
        0.5 * (a * b - c * self.tr_y.conj()).re
    }

    pub fn gradient_at(&self, t: f64) -> f64 {
        self.gradient_from(&self.v_at(t))
    }

    pub fn hessian_at(&self, t: f64, s: f64) -> f64 {
        self.hessian_from(t, &self.v_at(t), s, &self.v_at(s))
    }

    /// Cell-wise Gauss nodes with weights and cached `V_t`.
    fn cell_samples(&self, rule: &GaussRule) -> Vec<Vec<(f64, f64, Su2Matrix)>> {
        (0..self.ctrl.segments())
            .map(|k| {
                rule.mapped(self.ctrl.boundary(k), self.ctrl.boundary(k + 1))
                    .map(|(t, w)| (t, w, self.v_at(t)))
                    .collect()
            })
            .collect()
    }

    /// `∂J/∂f_k / h`: the gradient kernel averaged over each segment.
    pub fn segment_gradient(&self) -> Vec<f64> {
        let rule = GaussRule::new(CELL_ORDER);
        let h = self.ctrl.segment_len();
        self.cell_samples(&rule)
            .iter()
            .map(|cell| cell.iter().map(|(_, w, vt)| w * self.gradient_from(vt)).sum::<f64>() / h)
            .collect()
    }

    /// `∫ δJ/δf(t) g(t) dt` for a direction `g` constant on the control segments.
    pub fn gradient_directional(&self, direction: &[f64]) -> Result<f64> {
        self.check_direction(direction)?;
        let h = self.ctrl.segment_len();
        Ok(self
            .segment_gradient()
            .iter()
            .zip(direction)
            .map(|(g, d)| g * h * d)
            .sum())
    }

    /// `∬ Hess(t, s) g(t) g(s) dt ds` for a direction constant on the control segments.
    ///
    /// The kernel is smooth on each side of the diagonal, so the integral is
    /// taken over `t < s` only: tensor Gauss rules on off-diagonal cell pairs
    /// and a collapsed rule on the triangle inside each diagonal cell.
    pub fn hessian_quadratic_form(&self, direction: &[f64]) -> Result<f64> {
        self.check_direction(direction)?;
        let rule = GaussRule::new(CELL_ORDER);
        let cells = self.cell_samples(&rule);
        let m = cells.len();
        let mut total = 0.0;
        for j in 0..m {
            if direction[j] == 0.0 {
                continue;
            }
            for k in (j + 1)..m {
                if direction[k] == 0.0 {
                    continue;
                }
                let mut acc = 0.0;
                for (t, wt, vt) in &cells[j] {
                    for (s, ws, vs) in &cells[k] {
                        acc += wt * ws * self.hessian_from(*t, vt, *s, vs);
                    }
                }
                total += 2.0 * direction[j] * direction[k] * acc;
            }
        }
        let unit = rule.unit();
        let h = self.ctrl.segment_len();
        for (k, &d) in direction.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let a = self.ctrl.boundary(k);
            let mut acc = 0.0;
            // s = a + h x, t = a + h x y, Jacobian h² x
            for &(x, wx) in &unit {
                let s = a + h * x;
                let vs = self.v_at(s);
                for &(y, wy) in &unit {
                    let t = a + h * x * y;
                    acc += wx * wy * h * h * x * self.hessian_from(t, &self.v_at(t), s, &vs);
                }
            }
            total += 2.0 * d * d * acc;
        }
        Ok(total)
    }

    fn check_direction(&self, direction: &[f64]) -> Result<()> {
        if direction.len() != self.ctrl.segments() {
            return Err(invalid(
                "direction length",
                direction.len() as f64,
                "must equal the segment count",
            ));
        }
        Ok(())
    }
}

/// Gradient kernel `δJ/δf(t)` at each node.
pub fn gradient_kernel(cfg: &SystemConfig, ctrl: &PiecewiseControl, nodes: &[f64]) -> Result<Vec<f64>> {
    let cache = AdjointCache::with_nodes(cfg, ctrl, nodes)?;
    Ok(cache.sampled().iter().map(|vt| cache.gradient_from(vt)).collect())
}

/// Hessian kernel `Hess(t, s)` for an arbitrary control.
pub fn hessian_kernel(cfg: &SystemConfig, ctrl: &PiecewiseControl, t: f64, s: f64) -> Result<f64> {
    let cache = AdjointCache::with_nodes(cfg, ctrl, &[t, s])?;
    let v = cache.sampled();
    Ok(cache.hessian_from(t, &v[0], s, &v[1]))
}

/// Closed-form Hessian kernel at `f₀ = 0`: `−2v² cos φ · cos(2|t−s| + φ)`.
pub fn hessian_kernel_at_f0(cfg: &SystemConfig, t: f64, s: f64) -> f64 {
    let phi = cfg.phi();
    -2.0 * cfg.v().powi(2) * phi.cos() * (2.0 * (t - s).abs() + phi).cos()
}

/// Kernel of the rescaled operator `K = Hess / (v² sin 2φ)`: `−cos(2|t−s| + φ) / sin φ`.
pub fn operator_k_kernel(phi: f64, t: f64, s: f64) -> f64 {
    -(2.0 * (t - s).abs() + phi).cos() / phi.sin()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelForm {
    /// Closed-form Hessian kernel at the special control.
    HessianAtF0,
    /// The operator K.
    OperatorK,
    /// Trace-formula Hessian for a general control.
    GeneralControl,
    Custom,
}

impl fmt::Display for KernelForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KernelForm::HessianAtF0 => "hessian_at_f0",
            KernelForm::OperatorK => "operator_k",
            KernelForm::GeneralControl => "general_control",
            KernelForm::Custom => "custom",
        };
        f.write_str(s)
    }
}

type KernelFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A symmetric kernel on `[0, T]²` with metadata on how it was built.
#[derive(Clone)]
pub struct KernelSpec {
    form: KernelForm,
    t_final: f64,
    f: Arc<KernelFn>,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("form", &self.form)
            .field("t_final", &self.t_final)
            .finish_non_exhaustive()
    }
}

impl KernelSpec {
    pub fn hessian_at_f0(cfg: &SystemConfig) -> Self {
        let cfg = *cfg;
        KernelSpec {
            form: KernelForm::HessianAtF0,
            t_final: cfg.t_final(),
            f: Arc::new(move |t, s| hessian_kernel_at_f0(&cfg, t, s)),
        }
    }

    /// The operator K; undefined where `sin φ = 0`.
    pub fn operator_k(cfg: &SystemConfig) -> Result<Self> {
        let phi = cfg.phi();
        if phi.sin().abs() < 1e-12 {
            return Err(invalid("phi", phi, "sin(phi) vanishes; K is undefined"));
        }
        Ok(KernelSpec {
            form: KernelForm::OperatorK,
            t_final: cfg.t_final(),
            f: Arc::new(move |t, s| operator_k_kernel(phi, t, s)),
        })
    }

    pub fn general_control(cfg: &SystemConfig, ctrl: &PiecewiseControl) -> Result<Self> {
        let cache = AdjointCache::new(cfg, ctrl)?;
        Ok(KernelSpec {
            form: KernelForm::GeneralControl,
            t_final: cfg.t_final(),
            f: Arc::new(move |t, s| cache.hessian_at(t, s)),
        })
    }

    pub fn constant(t_final: f64, c: f64) -> Self {
        Self::custom(t_final, move |_, _| c)
    }

    pub fn custom<F>(t_final: f64, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        KernelSpec {
            form: KernelForm::Custom,
            t_final,
            f: Arc::new(f),
        }
    }

    pub fn form(&self) -> KernelForm {
        self.form
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    #[inline]
    pub fn eval(&self, t: f64, s: f64) -> f64 {
        (self.f)(t, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn cfg(phi_w: f64, t: f64) -> SystemConfig {
        SystemConfig::new(phi_w, t, 0.8, -0.6).unwrap()
    }

    #[test]
    fn special_control_examples() {
        let z = pauli(Axis::Z);
        let x = pauli(Axis::X);
        assert_eq!(special_control(&z, &x).unwrap().value, 0.0);
        let v = x.scale_re(0.3) + pauli(Axis::Y).scale_re(1.7);
        assert_eq!(special_control(&z, &v).unwrap().value, 0.0);
        let sc = special_control(&z, &(x + z)).unwrap();
        assert!((sc.value + 0.5).abs() < 1e-15);
        assert_eq!(sc.literal_reading, Some(0.5));
        assert!(!sc.readings_agree);
        assert!(matches!(special_control(&z, &z), Err(Error::CommutingHamiltonians)));
    }

    #[test]
    fn special_time_examples() {
        let z = pauli(Axis::Z);
        let x = pauli(Axis::X);
        assert!((special_time(&z, &x, 0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((special_time(&z.scale_re(2.0), &x, 0.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(matches!(special_time(&z, &z, 0.0), Err(Error::CommutingHamiltonians)));
        let c = SystemConfig::with_coupling(2.0, 1.0, 3.0).unwrap();
        assert_eq!(c.f0(), 0.0);
        assert!((c.special_time() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn objective_examples() {
        let c = cfg(2.0, 0.7);
        let w = c.gate();
        assert!((objective(&w, &w).unwrap() - 1.0).abs() < 1e-15);
        let diag = cfg(PI - 1.0, 1.0);
        let zero = PiecewiseControl::zero(1.0, 8).unwrap();
        assert!((objective_for_control(&diag, &zero).unwrap() - 1.0).abs() < 1e-14);
        let zero = PiecewiseControl::zero(0.7, 8).unwrap();
        assert!((objective_for_control(&c, &zero).unwrap() - c.objective_at_f0()).abs() < 1e-14);
        let bad = Su2Matrix::identity().scale_re(2.0);
        assert!(matches!(objective(&bad, &w), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn gradient_vanishes_at_f0() {
        let c = cfg(2.3, 1.1);
        let ctrl = c.special_control_signal(16).unwrap();
        let nodes: Vec<f64> = (0..=200).map(|i| 1.1 * i as f64 / 200.0).collect();
        let g = gradient_kernel(&c, &ctrl, &nodes).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn gradient_vanishes_when_target_is_reached() {
        let base = cfg(1.0, 0.9);
        let ctrl = PiecewiseControl::new(0.9, vec![0.4, -1.2, 2.0, 0.1]).unwrap();
        let u_t = crate::su2::final_propagator(&ctrl, &base.drift(), &base.coupling()).unwrap();
        // W' = U_T makes Y = I
        let mut cache = AdjointCache::new(&base, &ctrl).unwrap();
        cache.y = Su2Matrix::identity();
        cache.tr_y = cache.y.trace();
        assert!(u_t.unitarity_defect() < 1e-12);
        for t in [0.0, 0.2, 0.5, 0.9] {
            assert!(cache.gradient_at(t).abs() < 1e-15);
        }
    }

    #[test]
    fn hessian_kernel_at_f0_examples() {
        let c = SystemConfig::with_coupling(PI, FRAC_PI_4, 1.0).unwrap();
        let phi = c.phi();
        assert!((hessian_kernel_at_f0(&c, 0.3, 0.3) + 2.0 * phi.cos().powi(2)).abs() < 1e-15);
        assert!((hessian_kernel_at_f0(&c, 0.1, 0.1 + PI / 8.0) + SQRT_2).abs() < 1e-14);
        let g = cfg(2.2, 0.9);
        for (t, s) in [(0.0, 0.9), (0.3, 0.1), (0.5, 0.5)] {
            let scaled = g.hessian_factor() * operator_k_kernel(g.phi(), t, s);
            assert!((scaled - hessian_kernel_at_f0(&g, t, s)).abs() < 1e-14);
        }
    }

    #[test]
    fn general_hessian_matches_closed_form_at_zero_control() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let c = SystemConfig::new(rng.random_range(0.1..PI), rng.random_range(0.1..1.5), rng.random_range(-1.0..1.0), 0.5).unwrap();
            let ctrl = PiecewiseControl::zero(c.t_final(), 5).unwrap();
            let t = rng.random_range(0.0..c.t_final());
            let s = rng.random_range(0.0..c.t_final());
            let general = hessian_kernel(&c, &ctrl, t, s).unwrap();
            assert!((general - hessian_kernel_at_f0(&c, t, s)).abs() < 1e-12);
            assert!((general - hessian_kernel(&c, &ctrl, s, t).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let c = cfg(2.0, 1.2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let amps: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ctrl = PiecewiseControl::new(1.2, amps).unwrap();
        let dir: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cache = AdjointCache::new(&c, &ctrl).unwrap();
        let j = |eps: f64| objective_for_control(&c, &ctrl.perturbed(&dir, eps).unwrap()).unwrap();

        let first = cache.gradient_directional(&dir).unwrap();
        let fd1 = (j(1e-5) - j(-1e-5)) / 2e-5;
        assert!((first - fd1).abs() < 1e-6 * first.abs().max(1e-3), "{first} vs {fd1}");

        let second = cache.hessian_quadratic_form(&dir).unwrap();
        let fd2 = (j(1e-3) - 2.0 * j(0.0) + j(-1e-3)) / 1e-6;
        assert!((second - fd2).abs() < 1e-3 * second.abs(), "{second} vs {fd2}");
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(SystemConfig::new(3.5, 1.0, 1.0, 0.0).is_err());
        assert!(SystemConfig::new(1.0, -1.0, 1.0, 0.0).is_err());
        assert!(SystemConfig::new(1.0, 1.0, 0.0, 0.0).is_err());
        let c = SystemConfig::new(PI, 1.0, 3.0, 4.0).unwrap();
        assert_eq!(c.v(), 5.0);
        assert_eq!(c.phi(), -(PI + 1.0));
        assert!(c.gate().commutator(&pauli(Axis::Z)).max_abs() < 1e-15);
    }
}
