//! Discretization of symmetric integral operators and their spectra.
//!
//! The Nyström matrix `A_ij = √w_i · k(t_i, t_j) · √w_j` is similar to the
//! weighted matrix `k(t_i, t_j) w_j`, so its real spectrum approximates the
//! operator spectrum and a symmetric solver applies.

mod jacobi;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use jacobi::{jacobi_eigen, MAX_SWEEPS, OFF_DIAGONAL_TOL};

use crate::error::{invalid, Error, Result};
use crate::objective::KernelSpec;
use crate::quadrature::{nodes_weights, GaussRule, Scheme};

/// Default node count.
pub const DEFAULT_NODES: usize = 1000;

/// Default relative threshold `ρ`; `τ = ρ · max|λ|`.
pub const DEFAULT_RHO: f64 = 1e-8;

/// Largest size handled by the Jacobi route under [`EigenMethod::Auto`].
pub const JACOBI_AUTO_LIMIT: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    Nystrom(Scheme),
    /// Piecewise-constant Galerkin on uniform cells.
    PiecewiseConstant,
}

/// A symmetrized discretization of an integral operator.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    matrix: DMatrix<f64>,
    trace: f64,
    method: Discretization,
}

/// Nyström discretization of `kernel` with `n` nodes.
pub fn discretize(kernel: &KernelSpec, n: usize, scheme: Scheme) -> Result<DiscretizedOperator> {
    let t_final = kernel.t_final();
    if !(t_final > 0.0) {
        return Err(invalid("T", t_final, "must be positive"));
    }
    let (nodes, weights) = nodes_weights(scheme, t_final, n)?;
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut matrix = DMatrix::zeros(n, n);
    let mut trace = 0.0;
    for i in 0..n {
        let kii = kernel.eval(nodes[i], nodes[i]);
        trace += weights[i] * kii;
        matrix[(i, i)] = weights[i] * kii;
        for j in (i + 1)..n {
            let a = sw[i] * kernel.eval(nodes[i], nodes[j]) * sw[j];
            matrix[(i, j)] = a;
            matrix[(j, i)] = a;
        }
    }
    Ok(DiscretizedOperator {
        nodes,
        weights,
        matrix,
        trace,
        method: Discretization::Nystrom(scheme),
    })
}

/// Galerkin discretization on `cells` uniform cells with the orthonormal
/// basis `χ_k / √h`; its eigenvectors are piecewise-constant functions.
///
/// Off-diagonal cell pairs use a tensor Gauss rule; diagonal cells integrate
/// each side of the kernel's diagonal kink with a collapsed rule.
pub fn discretize_piecewise_constant(kernel: &KernelSpec, cells: usize, order: usize) -> Result<DiscretizedOperator> {
    if cells < 2 {
        return Err(Error::TooFewNodes(cells));
    }
    let t_final = kernel.t_final();
    let h = t_final / cells as f64;
    let rule = GaussRule::new(order);
    let unit = rule.unit();
    let edges: Vec<f64> = (0..=cells).map(|k| k as f64 * h).collect();
    let mut matrix = DMatrix::zeros(cells, cells);
    for j in 0..cells {
        for k in (j + 1)..cells {
            let mut acc = 0.0;
            for (t, wt) in rule.mapped(edges[j], edges[j + 1]) {
                for (s, ws) in rule.mapped(edges[k], edges[k + 1]) {
                    acc += wt * ws * kernel.eval(t, s);
                }
            }
            matrix[(j, k)] = acc / h;
            matrix[(k, j)] = acc / h;
        }
        let a = edges[j];
        let mut acc = 0.0;
        for &(x, wx) in &unit {
            for &(y, wy) in &unit {
                let s = a + h * x;
                let t = a + h * x * y;
                acc += wx * wy * h * h * x * (kernel.eval(t, s) + kernel.eval(s, t));
            }
        }
        matrix[(j, j)] = acc / h;
    }
    let trace = matrix.trace();
    Ok(DiscretizedOperator {
        nodes: edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(),
        weights: vec![h; cells],
        matrix,
        trace,
        method: Discretization::PiecewiseConstant,
    })
}

impl DiscretizedOperator {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn method(&self) -> Discretization {
        self.method
    }

    /// `Σ w_i k(t_i, t_i)`.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    /// Largest `|A_ij − A_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        worst
    }

    /// `(K g)(t_i) ≈ Σ_j w_j k(t_i, t_j) g(t_j)` for `g` sampled at the nodes.
    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        let n = self.len();
        let sw: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        let scaled: Vec<f64> = g.iter().zip(&sw).map(|(g, s)| g * s).collect();
        (0..n)
            .map(|i| {
                let row: f64 = (0..n).map(|j| self.matrix[(i, j)] * scaled[j]).sum();
                row / sw[i]
            })
            .collect()
    }

    /// Discrete `L²` norm `(Σ w_i g_i²)^{1/2}`.
    pub fn l2_norm(&self, g: &[f64]) -> f64 {
        g.iter().zip(&self.weights).map(|(g, w)| w * g * g).sum::<f64>().sqrt()
    }

    fn row_major(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.matrix[(i, j)]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    Jacobi,
    /// Householder tridiagonalization with implicit QR (nalgebra).
    Tridiagonal,
    Auto,
}

/// All eigenvalues of the operator, descending.
pub fn sym_eigen(op: &DiscretizedOperator) -> Result<Vec<f64>> {
    sym_eigen_with(op, EigenMethod::Auto)
}

pub fn sym_eigen_with(op: &DiscretizedOperator, method: EigenMethod) -> Result<Vec<f64>> {
    let defect = op.symmetry_defect();
    if defect > 1e-14 * (1.0 + op.matrix.amax()) {
        return Err(Error::NotSymmetric(defect));
    }
    let n = op.len();
    let use_jacobi = match method {
        EigenMethod::Jacobi => true,
        EigenMethod::Tridiagonal => false,
        EigenMethod::Auto => n <= JACOBI_AUTO_LIMIT,
    };
    let mut eigs = if use_jacobi {
        jacobi_eigen(&op.row_major(), n, false)?.0
    } else {
        op.matrix.symmetric_eigenvalues().iter().copied().collect()
    };
    eigs.sort_by(|a, b| b.total_cmp(a));
    Ok(eigs)
}

/// An eigenpair with the eigenvector expressed as function values at the nodes,
/// normalized to unit discrete `L²` norm.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub function: Vec<f64>,
}

/// Eigenpairs sorted by descending eigenvalue.
pub fn sym_eigen_pairs(op: &DiscretizedOperator, method: EigenMethod) -> Result<Vec<EigenPair>> {
    let n = op.len();
    let use_jacobi = match method {
        EigenMethod::Jacobi => true,
        EigenMethod::Tridiagonal => false,
        EigenMethod::Auto => n <= JACOBI_AUTO_LIMIT,
    };
    let (values, vectors): (Vec<f64>, Vec<Vec<f64>>) = if use_jacobi {
        let (l, q) = jacobi_eigen(&op.row_major(), n, true)?;
        let q = q.expect("requested vectors");
        let cols = (0..n).map(|k| (0..n).map(|i| q[i * n + k]).collect()).collect();
        (l, cols)
    } else {
        let eig = op.matrix.clone().symmetric_eigen();
        let cols = (0..n).map(|k| eig.eigenvectors.column(k).iter().copied().collect()).collect();
        (eig.eigenvalues.iter().copied().collect(), cols)
    };
    let mut pairs: Vec<EigenPair> = values
        .into_iter()
        .zip(vectors)
        .map(|(value, u)| {
            let function = u.iter().zip(&op.weights).map(|(u, w)| u / w.sqrt()).collect();
            EigenPair { value, function }
        })
        .collect();
    pairs.sort_by(|a, b| b.value.total_cmp(&a.value));
    Ok(pairs)
}

/// `Σ w_i k(t_i, t_i)`.
pub fn operator_trace(op: &DiscretizedOperator) -> f64 {
    op.trace()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Numeric,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn of(x: f64) -> Option<Sign> {
        if x > 0.0 {
            Some(Sign::Positive)
        } else if x < 0.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }
}

/// Sign structure of a compact operator: how many eigenvalues carry the
/// finitely-represented sign. The other sign accumulates at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignSignature {
    pub finite_sign: Sign,
    pub finite_count: usize,
}

impl SignSignature {
    /// Signature after multiplying the operator by a scalar of sign `factor`.
    pub fn scaled(self, factor: Sign) -> SignSignature {
        match factor {
            Sign::Positive => self,
            Sign::Negative => SignSignature {
                finite_sign: self.finite_sign.flipped(),
                finite_count: self.finite_count,
            },
        }
    }
}

impl std::fmt::Display for SignSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (fin, inf) = match self.finite_sign {
            Sign::Positive => ("pos", "neg"),
            Sign::Negative => ("neg", "pos"),
        };
        write!(f, "{}{}+inf{}", self.finite_count, fin, inf)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub provenance: Provenance,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
    pub trace: f64,
    pub n: usize,
    pub tau: f64,
}

/// Sign counts with `|λ| ≤ τ` counted as zero.
pub fn spectrum_report(eigs: &[f64], tau: f64, provenance: Provenance) -> Result<SpectrumReport> {
    if !(tau >= 0.0) {
        return Err(invalid("tau", tau, "threshold must be non-negative"));
    }
    let mut eigenvalues = eigs.to_vec();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let n_pos = eigenvalues.iter().filter(|&&l| l > tau).count();
    let n_neg = eigenvalues.iter().filter(|&&l| l < -tau).count();
    Ok(SpectrumReport {
        provenance,
        n: eigenvalues.len(),
        n_zero: eigenvalues.len() - n_pos - n_neg,
        n_pos,
        n_neg,
        trace: eigenvalues.iter().sum(),
        eigenvalues,
        tau,
    })
}

/// Report with `τ = ρ · max|λ|`.
pub fn spectrum_report_relative(eigs: &[f64], rho: f64, provenance: Provenance) -> Result<SpectrumReport> {
    if !(rho >= 0.0) {
        return Err(invalid("rho", rho, "threshold ratio must be non-negative"));
    }
    let max = eigs.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    spectrum_report(eigs, rho * max, provenance)
}

impl SpectrumReport {
    /// Sign with fewer above-threshold eigenvalues and its count; `None` when
    /// every eigenvalue is below threshold.
    pub fn signature(&self) -> Option<SignSignature> {
        if self.n_pos == 0 && self.n_neg == 0 {
            return None;
        }
        Some(if self.n_pos <= self.n_neg {
            SignSignature {
                finite_sign: Sign::Positive,
                finite_count: self.n_pos,
            }
        } else {
            SignSignature {
                finite_sign: Sign::Negative,
                finite_count: self.n_neg,
            }
        })
    }

    /// The `k` eigenvalues of largest magnitude, by decreasing magnitude.
    pub fn top_by_magnitude(&self, k: usize) -> Vec<f64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        v.truncate(k);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn from_dense(rows: &[&[f64]]) -> DiscretizedOperator {
        let n = rows.len();
        DiscretizedOperator {
            nodes: (0..n).map(|i| i as f64).collect(),
            weights: vec![1.0; n],
            matrix: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
            trace: (0..n).map(|i| rows[i][i]).sum(),
            method: Discretization::Nystrom(Scheme::Trapezoid),
        }
    }

    fn random_symmetric(n: usize, seed: u64) -> DiscretizedOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x: f64 = rng.random_range(-1.0..1.0);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        DiscretizedOperator {
            nodes: vec![0.0; n],
            weights: vec![1.0; n],
            trace: m.trace(),
            matrix: m,
            method: Discretization::Nystrom(Scheme::Trapezoid),
        }
    }

    #[test]
    fn diagonal_and_swap() {
        let d = from_dense(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, -2.0]]);
        assert_eq!(sym_eigen_with(&d, EigenMethod::Jacobi).unwrap(), vec![3.0, 1.0, -2.0]);
        let s = from_dense(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = sym_eigen_with(&s, EigenMethod::Jacobi).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-15 && (e[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalue_sum_equals_trace() {
        let op = random_symmetric(50, 11);
        for method in [EigenMethod::Jacobi, EigenMethod::Tridiagonal] {
            let e = sym_eigen_with(&op, method).unwrap();
            assert!((e.iter().sum::<f64>() - op.trace()).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobi_and_tridiagonal_routes_agree() {
        let op = random_symmetric(60, 5);
        let a = sym_eigen_with(&op, EigenMethod::Jacobi).unwrap();
        let b = sym_eigen_with(&op, EigenMethod::Tridiagonal).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let op = from_dense(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(sym_eigen(&op), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn constant_kernel_is_rank_one() {
        let k = KernelSpec::constant(1.7, 0.6);
        for scheme in [Scheme::Trapezoid, Scheme::GaussLegendre] {
            let op = discretize(&k, 40, scheme).unwrap();
            let e = sym_eigen(&op).unwrap();
            assert!((e[0] - 0.6 * 1.7).abs() < 1e-10);
            assert!(e[1..].iter().all(|l| l.abs() < 1e-10));
            assert!((operator_trace(&op) - 0.6 * 1.7).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_cosine_kernel_has_rank_two() {
        let k = KernelSpec::custom(1.3, |t, s| (2.0 * (t - s)).cos());
        let op = discretize(&k, 120, Scheme::Trapezoid).unwrap();
        let rep = spectrum_report_relative(&sym_eigen(&op).unwrap(), 1e-9, Provenance::Numeric).unwrap();
        assert_eq!((rep.n_pos, rep.n_neg), (2, 0));
        assert!(op.symmetry_defect() == 0.0);
    }

    #[test]
    fn report_counts() {
        let r = spectrum_report(&[2.0, 1e-12, -3.0], 1e-9, Provenance::Numeric).unwrap();
        assert_eq!((r.n_pos, r.n_neg, r.n_zero), (1, 1, 1));
        assert_eq!(r.eigenvalues, vec![2.0, 1e-12, -3.0]);
        assert!(spectrum_report(&[1.0], -1.0, Provenance::Numeric).is_err());
        assert_eq!(
            r.signature(),
            Some(SignSignature {
                finite_sign: Sign::Positive,
                finite_count: 1
            })
        );
    }

    #[test]
    fn apply_matches_eigenpairs() {
        let k = KernelSpec::custom(1.0, |t, s| (-(t - s).abs()).exp());
        let op = discretize(&k, 80, Scheme::Trapezoid).unwrap();
        for pair in sym_eigen_pairs(&op, EigenMethod::Jacobi).unwrap().iter().take(3) {
            let kg = op.apply(&pair.function);
            let resid: Vec<f64> = kg.iter().zip(&pair.function).map(|(a, g)| a - pair.value * g).collect();
            assert!(op.l2_norm(&resid) < 1e-12);
            assert!((op.l2_norm(&pair.function) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn piecewise_constant_galerkin_of_constant_kernel() {
        let k = KernelSpec::constant(2.0, 1.5);
        let op = discretize_piecewise_constant(&k, 8, 4).unwrap();
        let e = sym_eigen(&op).unwrap();
        assert!((e[0] - 3.0).abs() < 1e-13);
        assert!(e[1..].iter().all(|l| l.abs() < 1e-13));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn zero_count_grows_with_threshold(
                eigs in prop::collection::vec(-10.0f64..10.0, 1..40),
                a in 0.0f64..5.0,
                b in 0.0f64..5.0,
            ) {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                let r1 = spectrum_report(&eigs, lo, Provenance::Numeric).unwrap();
                let r2 = spectrum_report(&eigs, hi, Provenance::Numeric).unwrap();
                prop_assert_eq!(r1.n_pos + r1.n_neg + r1.n_zero, eigs.len());
                prop_assert!(r2.n_zero >= r1.n_zero);
            }
        }
    }
}
