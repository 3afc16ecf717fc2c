//! State and measurement representations.
//!
//! [`DensityMatrix`], [`CqState`] and [`Povm`] are validated on construction;
//! the `*_unchecked` constructors skip validation so that [`Validate`] can be
//! used to diagnose arbitrary input.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use nalgebra::DMatrix;
use serde::Serialize;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const CQ_NORM_TOL: f64 = 1e-9;
pub const POVM_SUM_TOL: f64 = 1e-9;
pub const WAVE_NORM_TOL: f64 = 1e-8;

/// One checked invariant and how far the input is from satisfying it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub invariant: String,
    pub passed: bool,
    pub violation: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub checks: Vec<Check>,
}

impl Diagnostics {
    fn push(&mut self, invariant: impl Into<String>, violation: f64, tol: f64) {
        self.checks.push(Check {
            invariant: invariant.into(),
            passed: violation <= tol,
            violation: violation.max(0.0),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn into_result(self) -> Result<()> {
        match self.first_failure() {
            None => Ok(()),
            Some(check) => Err(match check.invariant.as_str() {
                "hermitian" => Error::NotHermitian(check.violation),
                "psd" => Error::NotPsd(-check.violation),
                other => Error::Normalization(format!("{other} (violation {:e})", check.violation)),
            }),
        }
    }
}

/// Report pass/fail per invariant with measured violations.
pub trait Validate {
    fn validate(&self) -> Diagnostics;
}

fn psd_checks(diag: &mut Diagnostics, m: &CMatrix, label: &str) {
    diag.push(
        format!("{label}hermitian"),
        linalg::max_hermitian_deviation(m),
        HERMITIAN_TOL,
    );
    let lmin = linalg::lambda_min(m);
    diag.push(format!("{label}psd"), -lmin, PSD_TOL);
}

/// Finite-dimensional positive operator with trace at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        let dm = Self::from_matrix_unchecked(mat);
        dm.validate().into_result()?;
        Ok(Self {
            mat: linalg::hermitize(&dm.mat),
        })
    }

    pub fn from_matrix_unchecked(mat: CMatrix) -> Self {
        Self { mat }
    }

    pub fn pure(psi: &CVector) -> Result<Self> {
        Self::new(linalg::outer(psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: linalg::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Result<Self> {
        Self::new(linalg::real_diag(diag))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.mat)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.mat)
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            mat: linalg::kron(&self.mat, &other.mat),
        }
    }
}

impl Validate for DensityMatrix {
    fn validate(&self) -> Diagnostics {
        let mut diag = Diagnostics::default();
        psd_checks(&mut diag, &self.mat, "");
        let tr = linalg::trace_re(&self.mat);
        let violation = if tr <= 0.0 {
            f64::INFINITY
        } else {
            tr - (1.0 + TRACE_TOL)
        };
        diag.push("trace", violation.max(0.0), 0.0);
        diag
    }
}

/// Classical-quantum state: labeled subnormalized conditional operators whose
/// traces sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct CqState {
    outcomes: Vec<(String, CMatrix)>,
}

impl CqState {
    pub fn new(outcomes: Vec<(String, CMatrix)>) -> Result<Self> {
        let st = Self::from_outcomes_unchecked(outcomes);
        if st.outcomes.is_empty() {
            return Err(Error::InvalidArgument("cq state has no outcomes".into()));
        }
        let dim = st.outcomes[0].1.nrows();
        for (_, op) in &st.outcomes {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: op.nrows(),
                });
            }
        }
        st.validate().into_result()?;
        Ok(Self {
            outcomes: st
                .outcomes
                .into_iter()
                .map(|(l, m)| (l, linalg::hermitize(&m)))
                .collect(),
        })
    }

    /// Labels are the outcome indices.
    pub fn from_ops(ops: Vec<CMatrix>) -> Result<Self> {
        Self::new(
            ops.into_iter()
                .enumerate()
                .map(|(i, m)| (i.to_string(), m))
                .collect(),
        )
    }

    pub fn from_outcomes_unchecked(outcomes: Vec<(String, CMatrix)>) -> Self {
        Self { outcomes }
    }

    /// Trivial memory: a probability vector as a cq state with `dim = 1`.
    pub fn classical(probs: &[f64]) -> Result<Self> {
        Self::from_ops(
            probs
                .iter()
                .map(|&p| CMatrix::from_element(1, 1, c(p, 0.0)))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.outcomes.first().map_or(0, |(_, m)| m.nrows())
    }

    pub fn outcomes(&self) -> &[(String, CMatrix)] {
        &self.outcomes
    }

    pub fn ops(&self) -> impl Iterator<Item = &CMatrix> {
        self.outcomes.iter().map(|(_, m)| m)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|(l, _)| l.as_str())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.ops().map(linalg::trace_re).collect()
    }

    /// `ω_B = Σ_x ω_B^x`.
    pub fn marginal_b(&self) -> CMatrix {
        let d = self.dim();
        self.ops().fold(CMatrix::zeros(d, d), |acc, m| acc + m)
    }

    /// Block-diagonal embedding `Σ_x |x⟩⟨x| ⊗ ω_B^x` on `X ⊗ B`.
    pub fn block_diagonal(&self) -> CMatrix {
        let n = self.len();
        let d = self.dim();
        let mut out = CMatrix::zeros(n * d, n * d);
        for (x, m) in self.ops().enumerate() {
            out.view_mut((x * d, x * d), (d, d)).copy_from(m);
        }
        out
    }

    /// Drop outcomes with zero trace (they do not affect any entropy).
    pub fn without_null_outcomes(&self) -> CqState {
        Self {
            outcomes: self
                .outcomes
                .iter()
                .filter(|(_, m)| linalg::trace_re(m) > 0.0)
                .cloned()
                .collect(),
        }
    }

    /// Append an uncorrelated memory factor: `ω_B^x ↦ ω_B^x ⊗ τ`.
    pub fn with_memory_factor(&self, tau: &DensityMatrix) -> CqState {
        let t = tau.matrix().scale(1.0 / tau.trace());
        Self {
            outcomes: self
                .outcomes
                .iter()
                .map(|(l, m)| (l.clone(), linalg::kron(m, &t)))
                .collect(),
        }
    }

    /// Trace out a memory factor: memory is `dims`, keep the listed factors.
    pub fn reduce_memory(&self, dims: &[usize], keep: &[usize]) -> Result<CqState> {
        let total: usize = dims.iter().product();
        if total != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: total,
            });
        }
        Ok(Self {
            outcomes: self
                .outcomes
                .iter()
                .map(|(l, m)| (l.clone(), linalg::partial_trace(m, dims, keep)))
                .collect(),
        })
    }
}

impl Validate for CqState {
    fn validate(&self) -> Diagnostics {
        let mut diag = Diagnostics::default();
        for (label, op) in &self.outcomes {
            psd_checks(&mut diag, op, &format!("outcome[{label}]."));
        }
        let total: f64 = self.ops().map(linalg::trace_re).sum();
        diag.push("normalization", (total - 1.0).abs(), CQ_NORM_TOL);
        diag
    }
}

/// Positive operator valued measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let p = Self::from_elements_unchecked(elements);
        if p.elements.is_empty() {
            return Err(Error::InvalidArgument("POVM has no elements".into()));
        }
        let dim = p.dim();
        if let Some(bad) = p.elements.iter().find(|e| e.nrows() != dim || e.ncols() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.nrows(),
            });
        }
        p.validate().into_result()?;
        Ok(Self {
            elements: p.elements.iter().map(linalg::hermitize).collect(),
        })
    }

    pub fn from_elements_unchecked(elements: Vec<CMatrix>) -> Self {
        Self { elements }
    }

    /// Projective measurement in the orthonormal basis given by the columns.
    pub fn from_basis(basis: &CMatrix) -> Result<Self> {
        Self::new(
            (0..basis.ncols())
                .map(|j| linalg::outer(&basis.column(j).into_owned()))
                .collect(),
        )
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            elements: (0..dim).map(|k| linalg::outer(&linalg::basis(dim, k))).collect(),
        }
    }

    /// Projectors onto the discrete-Fourier basis `|f_k⟩ = d^{-1/2} Σ_j ω^{jk} |j⟩`.
    pub fn fourier(dim: usize) -> Self {
        Self {
            elements: (0..dim)
                .map(|k| linalg::outer(&fourier_vector(dim, k)))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.elements.first().map_or(0, |e| e.nrows())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// `E_x ⊗ 1` on a larger system.
    pub fn tensor_identity(&self, dim: usize) -> Povm {
        let id = linalg::identity(dim);
        Self {
            elements: self.elements.iter().map(|e| linalg::kron(e, &id)).collect(),
        }
    }

    /// `1 ⊗ E_x` on a larger system.
    pub fn identity_tensor(&self, dim: usize) -> Povm {
        let id = linalg::identity(dim);
        Self {
            elements: self.elements.iter().map(|e| linalg::kron(&id, e)).collect(),
        }
    }

    /// Outcome probabilities `tr(E_x ρ)`.
    pub fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| (e * rho).trace().re)
            .collect()
    }

    /// Apply the measurement to the first factor of a bipartite state on
    /// `A ⊗ B`, yielding the cq state `ω_B^x = tr_A[(E_x ⊗ 1) ρ_AB]`.
    pub fn measure_first(&self, rho_ab: &CMatrix, dim_b: usize) -> Result<CqState> {
        let dim_a = self.dim();
        if dim_a * dim_b != rho_ab.nrows() {
            return Err(Error::DimensionMismatch {
                expected: rho_ab.nrows(),
                got: dim_a * dim_b,
            });
        }
        let id = linalg::identity(dim_b);
        let ops = self
            .elements
            .iter()
            .map(|e| {
                let root = linalg::kron(&linalg::sqrt_psd(e), &id);
                linalg::partial_trace(&(&root * rho_ab * &root), &[dim_a, dim_b], &[1])
            })
            .collect();
        CqState::from_ops(ops)
    }
}

impl Validate for Povm {
    fn validate(&self) -> Diagnostics {
        let mut diag = Diagnostics::default();
        for (i, e) in self.elements.iter().enumerate() {
            psd_checks(&mut diag, e, &format!("element[{i}]."));
        }
        let d = self.dim();
        let sum = self
            .elements
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, e| acc + e);
        let dev = (sum - linalg::identity(d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        diag.push("completeness", dev, POVM_SUM_TOL);
        diag
    }
}

pub fn fourier_vector(dim: usize, k: usize) -> CVector {
    let norm = 1.0 / (dim as f64).sqrt();
    CVector::from_iterator(
        dim,
        (0..dim).map(|j| {
            let phase = 2.0 * std::f64::consts::PI * (j * k) as f64 / dim as f64;
            C64::from_polar(norm, phase)
        }),
    )
}

/// Uniformly sampled, memory-valued wavefunction `ψ: grid → C^d`.
///
/// Row `i` of `samples` is `ψ(q0 + i·dq)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWaveFunction {
    pub q0: f64,
    pub dq: f64,
    samples: DMatrix<C64>,
}

impl GridWaveFunction {
    pub fn new(q0: f64, dq: f64, samples: DMatrix<C64>) -> Result<Self> {
        let wf = Self::new_unnormalized(q0, dq, samples)?;
        let norm = wf.norm_sq();
        if (norm - 1.0).abs() > WAVE_NORM_TOL {
            return Err(Error::Normalization(format!(
                "wavefunction norm {norm} deviates from 1"
            )));
        }
        Ok(wf)
    }

    pub fn new_unnormalized(q0: f64, dq: f64, samples: DMatrix<C64>) -> Result<Self> {
        if !(dq > 0.0) || !dq.is_finite() || !q0.is_finite() {
            return Err(Error::InvalidArgument(format!("grid spacing {dq} must be positive")));
        }
        if samples.nrows() == 0 || samples.ncols() == 0 {
            return Err(Error::InvalidArgument("empty wavefunction".into()));
        }
        Ok(Self { q0, dq, samples })
    }

    /// Sample a function on `n` points starting at `q0` and normalize on the grid.
    pub fn from_fn(q0: f64, dq: f64, n: usize, d: usize, f: impl Fn(f64) -> Vec<C64>) -> Result<Self> {
        let mut samples = DMatrix::zeros(n, d);
        for i in 0..n {
            let v = f(q0 + i as f64 * dq);
            for (k, z) in v.into_iter().take(d).enumerate() {
                samples[(i, k)] = z;
            }
        }
        Self::new_unnormalized(q0, dq, samples)?.normalized()
    }

    /// Scalar (`d = 1`) Gaussian `ψ(q) ∝ exp(−(q−mean)²/(4σ²))`, position variance `σ²`.
    pub fn gaussian(q0: f64, dq: f64, n: usize, mean: f64, sigma: f64) -> Result<Self> {
        Self::from_fn(q0, dq, n, 1, |q| {
            let x = (q - mean) / sigma;
            vec![c((-0.25 * x * x).exp(), 0.0)]
        })
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sq();
        if !(norm > 0.0) {
            return Err(Error::Normalization("wavefunction has zero norm".into()));
        }
        self.samples.scale_mut(1.0 / norm.sqrt());
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    pub fn memory_dim(&self) -> usize {
        self.samples.ncols()
    }

    pub fn samples(&self) -> &DMatrix<C64> {
        &self.samples
    }

    pub fn point(&self, i: usize) -> f64 {
        self.q0 + i as f64 * self.dq
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn sample(&self, i: usize) -> CVector {
        self.samples.row(i).transpose()
    }

    /// `dq · Σ_i ‖ψ(q_i)‖²`.
    pub fn norm_sq(&self) -> f64 {
        self.density().iter().sum::<f64>() * self.dq
    }

    /// Pointwise density `‖ψ(q_i)‖²`.
    pub fn density(&self) -> Vec<f64> {
        self.samples
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    /// Reduced memory state `dq Σ_i ψ(q_i) ψ(q_i)†`.
    pub fn memory_state(&self) -> CMatrix {
        (self.samples.adjoint() * &self.samples).transpose().scale(self.dq)
    }
}

/// `tr_{¬keep}(ρ)` for `ρ` on `⊗ dims`.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: total,
        });
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(format!("factor index {bad} out of range")));
    }
    Ok(DensityMatrix::from_matrix_unchecked(linalg::partial_trace(
        rho.matrix(),
        dims,
        keep,
    )))
}

/// `F(ρ, σ) = ‖√ρ √σ‖₁²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    Ok(linalg::fidelity_raw(rho.matrix(), sigma.matrix()))
}

/// Purification of a cq state.
#[derive(Debug, Clone)]
pub struct CqPurification {
    pub vector: CVector,
    /// Factor dimensions `[X, X', B, B']`.
    pub dims: [usize; 4],
}

/// `|Ψ⟩ = Σ_x |x⟩_X |x⟩_X' ⊗ |ψ_x⟩_BB'` with `tr_B' |ψ_x⟩⟨ψ_x| = ω_B^x`.
pub fn purify_cq(omega: &CqState) -> CqPurification {
    let n = omega.len();
    let d = omega.dim();
    let mut vector = CVector::zeros(n * n * d * d);
    for (x, op) in omega.ops().enumerate() {
        let (vals, vecs) = linalg::eigh(op);
        for (i, &lam) in vals.iter().enumerate() {
            let amp = lam.max(0.0).sqrt();
            if amp == 0.0 {
                continue;
            }
            for b in 0..d {
                // index of |x⟩|x⟩|b⟩|i⟩
                let idx = ((x * n + x) * d + b) * d + i;
                vector[idx] += vecs[(b, i)] * amp;
            }
        }
    }
    CqPurification {
        vector,
        dims: [n, n, d, d],
    }
}

/// `‖√E √F‖² = λ_max(√E F √E)`.
pub fn sqrt_overlap_norm(e: &CMatrix, f: &CMatrix) -> Result<f64> {
    if e.nrows() != f.nrows() {
        return Err(Error::DimensionMismatch {
            expected: e.nrows(),
            got: f.nrows(),
        });
    }
    for m in [e, f] {
        let lmin = linalg::lambda_min(m);
        if lmin < -PSD_TOL {
            return Err(Error::NotPsd(lmin));
        }
    }
    let se = linalg::sqrt_psd(e);
    Ok(linalg::lambda_max(&(&se * f * &se)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(v: &[C64]) -> CVector {
        CVector::from_column_slice(v)
    }

    fn plus() -> CVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ket(&[c(s, 0.0), c(s, 0.0)])
    }

    fn proj(k: usize, d: usize) -> CMatrix {
        linalg::outer(&linalg::basis(d, k))
    }

    #[test]
    fn validate_maximally_mixed_qubit() {
        assert!(DensityMatrix::maximally_mixed(2).validate().passed());
    }

    #[test]
    fn validate_flags_negative_eigenvalue() {
        let bad = DensityMatrix::from_matrix_unchecked(linalg::real_diag(&[1.1, -0.1]));
        let d = bad.validate();
        assert!(!d.passed());
        assert_eq!(d.first_failure().unwrap().invariant, "psd");
        assert!((d.first_failure().unwrap().violation - 0.1).abs() < 1e-12);
        assert!(matches!(DensityMatrix::new(linalg::real_diag(&[1.1, -0.1])), Err(Error::NotPsd(_))));
    }

    #[test]
    fn validate_orthogonal_cq_state() {
        let cq = CqState::from_outcomes_unchecked(vec![
            ("0".into(), proj(0, 2).scale(0.5)),
            ("1".into(), proj(1, 2).scale(0.5)),
        ]);
        assert!(cq.validate().passed());
    }

    #[test]
    fn cq_normalization_error() {
        let res = CqState::from_ops(vec![proj(0, 2).scale(0.6), proj(1, 2).scale(0.5)]);
        assert!(matches!(res, Err(Error::Normalization(_))));
    }

    #[test]
    fn povm_completeness_checked() {
        assert!(Povm::fourier(3).validate().passed());
        let bad = Povm::from_elements_unchecked(vec![proj(0, 2)]);
        assert!(!bad.validate().passed());
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ket(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let rho = DensityMatrix::pure(&phi).unwrap();
        let a = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert!((a.matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_of_product_and_trivial_factor() {
        let rho = DensityMatrix::from_real_diag(&[0.3, 0.7]).unwrap();
        let sigma = DensityMatrix::new(linalg::real_diag(&[0.2, 0.2, 0.1]).scale(1.0)).unwrap();
        let prod = rho.kron(&sigma);
        let a = partial_trace(&prod, &[2, 3], &[0]).unwrap();
        assert!((a.matrix() - rho.matrix().scale(sigma.trace())).norm() < 1e-14);

        let same = partial_trace(&rho, &[2, 1], &[0]).unwrap();
        assert!((same.matrix() - rho.matrix()).norm() < 1e-15);
        assert!(partial_trace(&rho, &[3], &[0]).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = DensityMatrix::new(proj(0, 2)).unwrap();
        let one = DensityMatrix::new(proj(1, 2)).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-12);
        // tr|√ρ√σ| = tr √(diag(1,0)·½) = 1/√2
        assert!((fidelity(&zero, &mixed).unwrap() - 0.5).abs() < 1e-12);
        assert!(fidelity(&zero, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn purification_of_orthogonal_cq_state_is_ghz_like() {
        let cq = CqState::from_ops(vec![proj(0, 2).scale(0.5), proj(1, 2).scale(0.5)]).unwrap();
        let pur = purify_cq(&cq);
        // nonzero amplitudes only on |0000⟩ and |1111⟩ (up to local basis choice)
        let nonzero: Vec<usize> = (0..pur.vector.len())
            .filter(|&i| pur.vector[i].norm() > 1e-12)
            .collect();
        assert_eq!(nonzero.len(), 2);
        for &i in &nonzero {
            assert!((pur.vector[i].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
        let rho = linalg::outer(&pur.vector);
        let xb = linalg::partial_trace(&rho, &pur.dims, &[0, 2]);
        assert!((xb - cq.block_diagonal()).norm() < 1e-12);
    }

    #[test]
    fn purification_of_single_pure_outcome_is_product() {
        let cq = CqState::from_ops(vec![linalg::outer(&plus())]).unwrap();
        let pur = purify_cq(&cq);
        let rho = linalg::outer(&pur.vector);
        let b = linalg::partial_trace(&rho, &pur.dims, &[2]);
        // pure marginal on B
        assert!((linalg::lambda_max(&b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_overlap_examples() {
        let p0 = proj(0, 2);
        let pp = linalg::outer(&plus());
        assert!((sqrt_overlap_norm(&p0, &p0).unwrap() - 1.0).abs() < 1e-12);
        assert!((sqrt_overlap_norm(&p0, &pp).unwrap() - 0.5).abs() < 1e-12);
        assert!(sqrt_overlap_norm(&p0, &proj(1, 2)).unwrap().abs() < 1e-12);
        assert!(sqrt_overlap_norm(&p0, &linalg::real_diag(&[1.0, -0.5])).is_err());
    }

    #[test]
    fn measure_first_on_product_state() {
        let rho_a = proj(0, 2);
        let rho_b = linalg::real_diag(&[0.25, 0.75]);
        let cq = Povm::computational(2)
            .measure_first(&linalg::kron(&rho_a, &rho_b), 2)
            .unwrap();
        assert!((cq.outcomes()[0].1.clone() - rho_b).norm() < 1e-14);
        assert!(cq.outcomes()[1].1.norm() < 1e-14);
    }

    #[test]
    fn gaussian_grid_normalized() {
        let wf = GridWaveFunction::gaussian(-10.0, 0.01, 2001, 0.0, 1.0).unwrap();
        assert!((wf.norm_sq() - 1.0).abs() < 1e-12);
        let mem = wf.memory_state();
        assert!((mem[(0, 0)].re - 1.0).abs() < 1e-12);
    }
}
