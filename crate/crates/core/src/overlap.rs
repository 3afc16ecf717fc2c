//! Measurement overlaps.
//!
//! The position–momentum overlap `c(δq, δp)` is the top eigenvalue of the
//! time–frequency limiting operator: the integral operator on
//! `L²([−δq/2, δq/2])` with kernel `sin(δp(x−y)/2) / (π(x−y))`. It is solved by
//! Nyström discretization on Gauss–Legendre nodes with symmetric weighting
//! `A_ij = √(w_i w_j) K(x_i, x_j)`.

use crate::error::{Error, Result};
use crate::linalg::{c, C64};
use crate::qstate::{self, GridWaveFunction, Povm};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use std::f64::consts::PI;

pub const START_ORDER: usize = 64;
pub const MAX_ORDER: usize = 2048;
pub const CONVERGENCE_TOL: f64 = 1e-10;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `sin(δp·u/2) / (π u)` with the removable singularity at `u = 0`.
pub fn limiting_kernel(delta_p: f64, u: f64) -> f64 {
    let half = 0.5 * delta_p * u;
    if half.abs() < 1e-4 {
        // series of sin(h)/h to the h⁴ term
        let h2 = half * half;
        delta_p / (2.0 * PI) * (1.0 - h2 / 6.0 + h2 * h2 / 120.0)
    } else {
        half.sin() / (PI * u)
    }
}

/// Top eigenfunction of the limiting operator, stored at the quadrature nodes
/// and evaluated elsewhere by Nyström interpolation.
#[derive(Debug, Clone, Serialize)]
pub struct Eigenfunction {
    pub delta_q: f64,
    pub delta_p: f64,
    pub eigenvalue: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
}

impl Eigenfunction {
    /// `ψ(x) = λ⁻¹ Σ_j w_j K(x, x_j) ψ(x_j)` inside the interval, zero outside.
    pub fn eval(&self, x: f64) -> f64 {
        if x.abs() > 0.5 * self.delta_q {
            return 0.0;
        }
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((&xj, &wj), &vj)| wj * limiting_kernel(self.delta_p, x - xj) * vj)
            .sum();
        s / self.eigenvalue
    }

    /// Samples on `q_i = q0 + i·dq`, renormalized on the grid.
    pub fn on_grid(&self, q0: f64, dq: f64, n: usize) -> Result<GridWaveFunction> {
        GridWaveFunction::from_fn(q0, dq, n, 1, |q| vec![c(self.eval(q), 0.0)])
    }

    /// `⟨ψ, Kψ⟩ / ⟨ψ, ψ⟩` by Gauss–Legendre quadrature of order `n`,
    /// independent of the nodes the eigenproblem was solved on.
    pub fn rayleigh_quotient(&self, n: usize) -> f64 {
        let (t, w) = gauss_legendre(n);
        let half = 0.5 * self.delta_q;
        let xs: Vec<f64> = t.iter().map(|&ti| half * ti).collect();
        let ws: Vec<f64> = w.iter().map(|&wi| half * wi).collect();
        let psi: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            den += ws[i] * psi[i] * psi[i];
            let k_psi: f64 = (0..n)
                .map(|j| ws[j] * limiting_kernel(self.delta_p, xs[i] - xs[j]) * psi[j])
                .sum();
            num += ws[i] * psi[i] * k_psi;
        }
        num / den
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapResult {
    pub c: f64,
    pub delta_q: f64,
    pub delta_p: f64,
    pub nystrom_order: usize,
    /// `|λ(n/2) − λ(n)|` at the reported order `n`.
    pub change: f64,
    #[serde(skip)]
    pub eigenfunction: Option<Eigenfunction>,
}

struct NystromSolve {
    lambda: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    vector: Vec<f64>,
}

fn nystrom(delta_q: f64, delta_p: f64, n: usize) -> NystromSolve {
    let (t, w) = gauss_legendre(n);
    let half = 0.5 * delta_q;
    let nodes: Vec<f64> = t.iter().map(|&ti| half * ti).collect();
    let weights: Vec<f64> = w.iter().map(|&wi| half * wi).collect();
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| {
        sw[i] * sw[j] * limiting_kernel(delta_p, nodes[i] - nodes[j])
    });
    let eig = SymmetricEigen::new(a);
    let top = eig.eigenvalues.imax();
    NystromSolve {
        lambda: eig.eigenvalues[top],
        vector: eig.eigenvectors.column(top).iter().copied().collect(),
        nodes,
        weights,
    }
}

fn check_widths(delta_q: f64, delta_p: f64) -> Result<()> {
    for (name, v) in [("delta_q", delta_q), ("delta_p", delta_p)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} = {v} must be positive")));
        }
    }
    Ok(())
}

/// `c(δq, δp)`, doubling the quadrature order from `n_quad` until two
/// successive orders agree within [`CONVERGENCE_TOL`].
pub fn prolate_overlap(delta_q: f64, delta_p: f64, n_quad: usize) -> Result<OverlapResult> {
    solve(delta_q, delta_p, n_quad, false)
}

pub fn prolate_top_eigenfunction(delta_q: f64, delta_p: f64, n_quad: usize) -> Result<Eigenfunction> {
    Ok(solve(delta_q, delta_p, n_quad, true)?
        .eigenfunction
        .expect("eigenfunction requested"))
}

fn solve(delta_q: f64, delta_p: f64, n_quad: usize, keep_vector: bool) -> Result<OverlapResult> {
    check_widths(delta_q, delta_p)?;
    if n_quad < 16 {
        return Err(Error::InvalidArgument(format!("quadrature order {n_quad} < 16")));
    }
    let mut n = n_quad;
    let mut prev = nystrom(delta_q, delta_p, n);
    loop {
        let next_n = 2 * n;
        if next_n > MAX_ORDER {
            return Err(Error::NonConvergence {
                iterations: n,
                gap: f64::NAN,
            });
        }
        let next = nystrom(delta_q, delta_p, next_n);
        let change = (next.lambda - prev.lambda).abs();
        if change < CONVERGENCE_TOL {
            let eigenfunction = keep_vector.then(|| {
                // ψ(x_j) = v_j / √w_j has unit quadrature norm; fix the sign by ψ(0) > 0
                let mid = next.vector[next_n / 2] + next.vector[next_n / 2 - 1];
                let sign = if mid < 0.0 { -1.0 } else { 1.0 };
                let values = next
                    .vector
                    .iter()
                    .zip(&next.weights)
                    .map(|(v, w)| sign * v / w.sqrt())
                    .collect();
                Eigenfunction {
                    delta_q,
                    delta_p,
                    eigenvalue: next.lambda,
                    nodes: next.nodes.clone(),
                    weights: next.weights.clone(),
                    values,
                }
            });
            return Ok(OverlapResult {
                c: next.lambda,
                delta_q,
                delta_p,
                nystrom_order: next_n,
                change,
                eigenfunction,
            });
        }
        prev = next;
        n = next_n;
    }
}

/// `c(δ, δ)` for each `δ`, in input order.
pub fn overlap_sweep(deltas: &[f64]) -> Result<Vec<OverlapResult>> {
    deltas
        .iter()
        .map(|&d| prolate_overlap(d, d, START_ORDER))
        .collect()
}

fn check_same_dim(e: &Povm, f: &Povm) -> Result<()> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            got: f.dim(),
        });
    }
    Ok(())
}

/// `c(E, F) = max_{x,y} ‖√E_x √F_y‖²`.
pub fn povm_overlap(e: &Povm, f: &Povm) -> Result<f64> {
    check_same_dim(e, f)?;
    let mut best: f64 = 0.0;
    for ex in e.elements() {
        for fy in f.elements() {
            best = best.max(qstate::sqrt_overlap_norm(ex, fy)?);
        }
    }
    Ok(best)
}

/// `c₁(E, F) = max_{x,y} tr[E_x F_y]`.
pub fn frank_lieb_overlap(e: &Povm, f: &Povm) -> Result<f64> {
    check_same_dim(e, f)?;
    let mut best: f64 = 0.0;
    for ex in e.elements() {
        for fy in f.elements() {
            let t: C64 = (ex * fy).trace();
            best = best.max(t.re);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [2, 5, 16, 64, 257] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // ∫ x^{2k} = 2/(2k+1) exact up to degree 2n−1
            let k = (n - 1).min(20);
            let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(2 * k as i32)).sum();
            assert!((s - 2.0 / (2 * k + 1) as f64).abs() < 1e-13, "n={n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn small_product_approaches_linear_law() {
        let r = prolate_overlap(0.1, 0.1, START_ORDER).unwrap();
        let lin = 0.01 / (2.0 * PI);
        assert!((r.c / lin - 1.0).abs() < 5e-3);
        assert!(r.change < CONVERGENCE_TOL);
        let mut last = f64::INFINITY;
        for prod in [1e-2f64, 1e-3, 1e-4] {
            let d = prod.sqrt();
            let dev = (prolate_overlap(d, d, START_ORDER).unwrap().c / (prod / (2.0 * PI)) - 1.0).abs();
            assert!(dev < last);
            last = dev;
        }
    }

    #[test]
    fn depends_only_on_product() {
        let a = prolate_overlap(0.5, 2.0, START_ORDER).unwrap().c;
        let b = prolate_overlap(1.0, 1.0, START_ORDER).unwrap().c;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn increasing_and_bounded() {
        let deltas: Vec<f64> = (0..30).map(|i| 0.1 * 1.15f64.powi(i)).collect();
        let cs: Vec<f64> = overlap_sweep(&deltas).unwrap().iter().map(|r| r.c).collect();
        assert!(cs.windows(2).all(|w| w[0] < w[1]));
        assert!(cs.iter().all(|&c| c > 0.0 && c <= 1.0 + 1e-10));
    }

    #[test]
    fn matches_known_slepian_eigenvalue() {
        // uniform-grid midpoint eigensolve with Richardson extrapolation
        // gives 0.57258178 at δqδp = 4 and 0.91793669 at δqδp = 9
        let r = prolate_overlap(2.0, 2.0, START_ORDER).unwrap();
        assert!((r.c - 0.572_581_78).abs() < 1e-8, "{}", r.c);
        let r = prolate_overlap(3.0, 3.0, START_ORDER).unwrap();
        assert!((r.c - 0.917_936_69).abs() < 1e-7, "{}", r.c);
    }

    #[test]
    fn eigenfunction_is_even_normalized_and_consistent() {
        let ef = prolate_top_eigenfunction(1.0, 1.0, START_ORDER).unwrap();
        let c = prolate_overlap(1.0, 1.0, START_ORDER).unwrap().c;
        assert!((ef.rayleigh_quotient(96) - c).abs() < 1e-9);
        let norm: f64 = ef.weights.iter().zip(&ef.values).map(|(w, v)| w * v * v).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        for x in [0.05, 0.2, 0.37, 0.49] {
            assert!((ef.eval(x) - ef.eval(-x)).abs() < 1e-9);
        }
        assert!(ef.eval(0.0) > 0.0);
        assert_eq!(ef.eval(0.6), 0.0);
    }

    #[test]
    fn small_product_eigenfunction_is_flat() {
        let ef = prolate_top_eigenfunction(0.1, 0.1, START_ORDER).unwrap();
        let flat: f64 = 1.0 / 0.1f64.sqrt();
        let dev = ef
            .values
            .iter()
            .map(|v| (v / flat - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(dev < 0.02);
    }

    #[test]
    fn invalid_widths_rejected() {
        assert!(prolate_overlap(0.0, 1.0, 64).is_err());
        assert!(prolate_overlap(1.0, -1.0, 64).is_err());
        assert!(prolate_overlap(1.0, 1.0, 8).is_err());
    }

    #[test]
    fn finite_dimensional_overlaps() {
        let z = Povm::computational(2);
        let x = Povm::fourier(2);
        assert!((povm_overlap(&z, &x).unwrap() - 0.5).abs() < 1e-12);
        assert!((povm_overlap(&z, &z).unwrap() - 1.0).abs() < 1e-12);
        assert!((frank_lieb_overlap(&z, &x).unwrap() - 0.5).abs() < 1e-12);
        let z3 = Povm::computational(3);
        let f3 = Povm::fourier(3);
        assert!((povm_overlap(&z3, &f3).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(povm_overlap(&z, &z3).is_err());
    }

    #[test]
    fn gedankenexperiment_overlaps() {
        let e1 = Povm::computational(2).tensor_identity(2);
        let f1 = Povm::fourier(2).tensor_identity(2);
        assert!((frank_lieb_overlap(&e1, &f1).unwrap() - 1.0).abs() < 1e-12);
        assert!((povm_overlap(&e1, &f1).unwrap() - 0.5).abs() < 1e-12);
    }
}
