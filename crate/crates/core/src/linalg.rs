//! Dense complex linear algebra on small Hermitian matrices.
//!
//! Every matrix function goes through [`eigh`], which symmetrizes its input
//! first and returns ascending eigenvalues. Eigenvalues in `[-EIG_CLIP, 0)`
//! are treated as exact zeros by the matrix functions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Negative eigenvalues of at most this magnitude are clipped to zero.
pub const EIG_CLIP: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// `(M + M†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_hermitian_deviation(m: &CMatrix) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigendecomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = nalgebra::SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).0
}

pub fn lambda_min(m: &CMatrix) -> f64 {
    eigvalsh(m).first().copied().unwrap_or(0.0)
}

pub fn lambda_max(m: &CMatrix) -> f64 {
    eigvalsh(m).last().copied().unwrap_or(0.0)
}

/// `V f(Λ) V†` with clipping of tiny negative eigenvalues.
pub fn apply_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    from_spectrum(&vals.iter().map(|&l| f(clip(l))).collect::<Vec<_>>(), &vecs)
}

pub fn from_spectrum(vals: &[f64], vecs: &CMatrix) -> CMatrix {
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    &scaled * vecs.adjoint()
}

pub fn clip(l: f64) -> f64 {
    if l < 0.0 && l >= -EIG_CLIP {
        0.0
    } else {
        l
    }
}

pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    apply_fn(m, |l| l.max(0.0).sqrt())
}

/// Projection onto the PSD cone in Frobenius norm.
pub fn psd_part(m: &CMatrix) -> CMatrix {
    apply_fn(m, |l| l.max(0.0))
}

/// Moore–Penrose style inverse square root on the support (eigenvalues above
/// `threshold`); zero on the kernel.
pub fn inv_sqrt_on_support(m: &CMatrix, threshold: f64) -> CMatrix {
    apply_fn(m, |l| if l > threshold { 1.0 / l.sqrt() } else { 0.0 })
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    eigvalsh(m).iter().map(|l| l.abs()).sum()
}

/// Singular values of a general matrix (via eigenvalues of `M†M`).
pub fn trace_norm(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    eigvalsh(&g).iter().map(|l| l.max(0.0).sqrt()).sum()
}

/// `Re tr(A† B)`.
pub fn inner_re(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn basis(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = c(1.0, 0.0);
    v
}

pub fn real_diag(diag: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        diag.len(),
        diag.iter().map(|&d| c(d, 0.0)),
    ))
}

/// Partial trace over every factor not listed in `keep`.
///
/// `dims` lists the tensor factors in order; the kept factors appear in the
/// result in their original relative order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let n_fac = dims.len();
    let kept: Vec<usize> = (0..n_fac).filter(|i| keep.contains(i)).collect();
    let traced: Vec<usize> = (0..n_fac).filter(|i| !keep.contains(i)).collect();
    let dk: usize = kept.iter().map(|&i| dims[i]).product();
    let dt: usize = traced.iter().map(|&i| dims[i]).product();

    // strides of each factor in the full index
    let mut strides = vec![1usize; n_fac];
    for i in (0..n_fac.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let compose = |kidx: usize, tidx: usize| -> usize {
        let mut full = 0;
        let mut rem = kidx;
        for &f in kept.iter().rev() {
            full += (rem % dims[f]) * strides[f];
            rem /= dims[f];
        }
        let mut rem = tidx;
        for &f in traced.iter().rev() {
            full += (rem % dims[f]) * strides[f];
            rem /= dims[f];
        }
        full
    };

    let mut out = CMatrix::zeros(dk, dk);
    for r in 0..dk {
        for col in 0..dk {
            let mut acc = c(0.0, 0.0);
            for t in 0..dt {
                acc += m[(compose(r, t), compose(col, t))];
            }
            out[(r, col)] = acc;
        }
    }
    out
}

/// Fidelity `‖√ρ √σ‖₁²` of two PSD operators.
pub fn fidelity_raw(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let sr = sqrt_psd(rho);
    let inner = &sr * sigma * &sr;
    let root: f64 = eigvalsh(&inner).iter().map(|l| l.max(0.0).sqrt()).sum();
    root * root
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_trace_keeps_order() {
        let a = real_diag(&[0.2, 0.8]);
        let b = real_diag(&[0.1, 0.3, 0.6]);
        let cc = real_diag(&[0.5, 0.5]);
        let abc = kron(&kron(&a, &b), &cc);
        let ac = partial_trace(&abc, &[2, 3, 2], &[0, 2]);
        assert!((ac - kron(&a, &cc)).norm() < 1e-14);
        let b_only = partial_trace(&abc, &[2, 3, 2], &[1]);
        assert!((b_only - b).norm() < 1e-14);
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (vals, vecs) = eigh(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        assert!((from_spectrum(&vals, &vecs) - m).norm() < 1e-12);
    }

    #[test]
    fn trace_norm_of_hermitian_difference() {
        let m = real_diag(&[0.5, -0.25]);
        assert!((trace_norm(&m) - 0.75).abs() < 1e-12);
        assert!((trace_norm_hermitian(&m) - 0.75).abs() < 1e-12);
    }
}
