//! Gaussian continuous-variable states with `ℏ = 1` and vacuum variance ½,
//! quadratures ordered `(q₁, p₁, q₂, p₂, …)`.

use crate::entropy::EntropyValue;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::qstate::GridWaveFunction;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::f64::consts::{E, PI};

pub const SYMPLECTIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub n_modes: usize,
    pub cov: DMatrix<f64>,
    pub displacement: DVector<f64>,
}

/// `Ω = ⊕ [[0, 1], [−1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut om = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        om[(2 * k, 2 * k + 1)] = 1.0;
        om[(2 * k + 1, 2 * k)] = -1.0;
    }
    om
}

impl GaussianState {
    pub fn new(cov: DMatrix<f64>, displacement: DVector<f64>) -> Result<Self> {
        let n = cov.nrows();
        if n % 2 != 0 || cov.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "covariance must be 2n×2n, got {}×{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if displacement.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: displacement.len(),
            });
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::NotHermitian(asym));
        }
        let state = Self {
            n_modes: n / 2,
            cov,
            displacement,
        };
        let nu_min = state.symplectic_eigenvalues().first().copied().unwrap_or(0.5);
        if nu_min < 0.5 - SYMPLECTIC_TOL {
            return Err(Error::NotPsd(nu_min - 0.5));
        }
        Ok(state)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            n_modes,
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
            displacement: DVector::zeros(2 * n_modes),
        }
    }

    /// Reduced state on the listed modes, in the listed order.
    pub fn marginal(&self, modes: &[usize]) -> Result<Self> {
        if let Some(&bad) = modes.iter().find(|&&m| m >= self.n_modes) {
            return Err(Error::InvalidArgument(format!("mode {bad} out of range")));
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let k = idx.len();
        Ok(Self {
            n_modes: modes.len(),
            cov: DMatrix::from_fn(k, k, |i, j| self.cov[(idx[i], idx[j])]),
            displacement: DVector::from_fn(k, |i, _| self.displacement[idx[i]]),
        })
    }

    /// Symplectic eigenvalues ascending: the positive eigenvalues of the
    /// Hermitian matrix `Γ^{1/2} (iΩ) Γ^{1/2}`.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let n = 2 * self.n_modes;
        let g = CMatrix::from_fn(n, n, |i, j| c(self.cov[(i, j)], 0.0));
        let sg = linalg::sqrt_psd(&g);
        let om = symplectic_form(self.n_modes);
        let i_om = CMatrix::from_fn(n, n, |i, j| c(0.0, om[(i, j)]));
        let vals = linalg::eigvalsh(&(&sg * i_om * &sg));
        // spectrum is ±ν_k; the top half are the ν_k
        vals[self.n_modes..].to_vec()
    }

    pub fn vn_entropy(&self) -> EntropyValue {
        gaussian_vn_entropy(self)
    }
}

/// `g(t) = t log t − (t−1) log(t−1)` in nats, with `g(1) = 0`.
pub fn thermal_entropy(t: f64) -> f64 {
    let a = if t > 0.0 { t * t.ln() } else { 0.0 };
    let b = if t > 1.0 { (t - 1.0) * (t - 1.0).ln() } else { 0.0 };
    a - b
}

/// `Σ_k g(ν_k + ½)`.
pub fn gaussian_vn_entropy(state: &GaussianState) -> EntropyValue {
    let s = state
        .symplectic_eigenvalues()
        .into_iter()
        .map(|nu| thermal_entropy((nu + 0.5).max(1.0)))
        .sum();
    EntropyValue::nats(s)
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu >= 1.0) || !nu.is_finite() {
        return Err(Error::InvalidArgument(format!("ν = {nu} must be ≥ 1")));
    }
    Ok(())
}

/// Two-mode EPR state `½ [ν𝟙, √(ν²−1) Z; √(ν²−1) Z, ν𝟙]`, `Z = diag(1, −1)`.
pub fn epr_state(nu: f64) -> Result<GaussianState> {
    check_nu(nu)?;
    let s = (nu * nu - 1.0).sqrt();
    #[rustfmt::skip]
    let cov = DMatrix::from_row_slice(4, 4, &[
        nu,  0.0, s,   0.0,
        0.0, nu,  0.0, -s,
        s,   0.0, nu,  0.0,
        0.0, -s,  0.0, nu,
    ]) * 0.5;
    GaussianState::new(cov, DVector::zeros(4))
}

pub fn nu_from_r(r: f64) -> f64 {
    (2.0 * r).cosh()
}

/// `f(ν) = log(eπν) − t log t + (t−1) log(t−1)`, `t = (ν+1)/2`, in nats.
pub fn epr_f(nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok((E * PI * nu).ln() - thermal_entropy(0.5 * (nu + 1.0)))
}

/// `f(ν) − log 2π` in nats.
pub fn epr_gap(nu: f64) -> Result<f64> {
    Ok(epr_f(nu)? - (2.0 * PI).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EprEntropies {
    pub h_q_given_b: f64,
    pub h_p: f64,
    pub sum: f64,
}

/// `h(Q|B) = h(Q) − H(B)` and `h(P) = h(Q) = ½ log(πeν)`, in nats.
pub fn epr_conditional_entropies(nu: f64) -> Result<EprEntropies> {
    check_nu(nu)?;
    let h_q = 0.5 * (PI * E * nu).ln();
    let h_b = thermal_entropy(0.5 * (nu + 1.0));
    Ok(EprEntropies {
        h_q_given_b: h_q - h_b,
        h_p: h_q,
        sum: 2.0 * h_q - h_b,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EprGapRow {
    pub r: f64,
    pub nu: f64,
    pub gap_bits: f64,
    pub gap_nats: f64,
    pub ln_gap: f64,
    /// `1 + 2 sinh(r/2)²`, reported as is next to the gap.
    pub mean_energy: f64,
}

/// `n` evenly spaced squeezing values from `r_lo` to `r_hi` inclusive.
pub fn epr_gap_curve(r_lo: f64, r_hi: f64, n: usize) -> Result<Vec<EprGapRow>> {
    if !(r_lo >= 0.0) || !(r_hi >= r_lo) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need 0 ≤ r_lo ≤ r_hi and n ≥ 1, got [{r_lo}, {r_hi}], n = {n}"
        )));
    }
    (0..n)
        .map(|i| {
            let r = if n == 1 {
                r_lo
            } else {
                r_lo + (r_hi - r_lo) * i as f64 / (n - 1) as f64
            };
            let nu = nu_from_r(r);
            let gap = epr_gap(nu)?;
            Ok(EprGapRow {
                r,
                nu,
                gap_bits: gap / std::f64::consts::LN_2,
                gap_nats: gap,
                ln_gap: gap.ln(),
                mean_energy: 1.0 + 2.0 * (0.5 * r).sinh().powi(2),
            })
        })
        .collect()
}

/// Hermite functions `φ_n(q)` for `n < count`, normalized for vacuum variance ½.
pub fn hermite_functions(q: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let phi0 = PI.powf(-0.25) * (-0.5 * q * q).exp();
    out.push(phi0);
    if count > 1 {
        out.push(2f64.sqrt() * q * phi0);
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * q * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Position wavefunction of mode A of the two-mode squeezed vacuum with
/// `ν = cosh 2r`, memory B in a Fock basis truncated to `fock_dim` levels:
/// `ψ(q) = √(1−λ²) Σ_n λⁿ φ_n(q) |n⟩`, `λ = tanh r`. Renormalized on the grid.
pub fn epr_wavefunction(nu: f64, q0: f64, dq: f64, n: usize, fock_dim: usize) -> Result<GridWaveFunction> {
    check_nu(nu)?;
    if fock_dim == 0 {
        return Err(Error::InvalidArgument("Fock cutoff must be positive".into()));
    }
    let lam = ((nu - 1.0) / (nu + 1.0)).sqrt();
    let pref = (1.0 - lam * lam).sqrt();
    GridWaveFunction::from_fn(q0, dq, n, fock_dim, |q| {
        let mut amp = pref;
        hermite_functions(q, fock_dim)
            .into_iter()
            .map(|phi| {
                let v = c(amp * phi, 0.0);
                amp *= lam;
                v
            })
            .collect()
    })
}

/// Fock cutoff keeping all but `eps` of the Schmidt weight, `λ^{2d} ≤ eps`.
pub fn fock_cutoff(nu: f64, eps: f64) -> Result<usize> {
    check_nu(nu)?;
    if nu == 1.0 {
        return Ok(1);
    }
    let lam2 = (nu - 1.0) / (nu + 1.0);
    Ok((eps.ln() / lam2.ln()).ceil().max(1.0) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::Base;

    #[test]
    fn epr_covariance_entries() {
        let g = epr_state(1.0).unwrap();
        assert!((&g.cov - DMatrix::identity(4, 4) * 0.5).amax() < 1e-15);
        let nu = 3f64.cosh();
        let g = epr_state(nu).unwrap();
        assert!((g.cov[(0, 2)] - 3f64.sinh() / 2.0).abs() < 1e-12);
        assert!((g.cov[(1, 1)] - nu / 2.0).abs() < 1e-15);
        assert!(epr_state(0.99).is_err());
    }

    #[test]
    fn symplectic_spectra() {
        let v = GaussianState::vacuum(1).symplectic_eigenvalues();
        assert_eq!(v.len(), 1);
        assert!((v[0] - 0.5).abs() < 1e-12);
        for nu in [1.0, 2.5, 10.0, 50.0] {
            let g = epr_state(nu).unwrap();
            for s in g.symplectic_eigenvalues() {
                assert!((s - 0.5).abs() < 1e-8 * nu, "{nu}: {s}");
            }
            let m = g.marginal(&[1]).unwrap().symplectic_eigenvalues();
            assert!((m[0] - nu / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn entropies() {
        assert!(GaussianState::vacuum(2).vn_entropy().in_nats().abs() < 1e-10);
        let b = epr_state(3.0).unwrap().marginal(&[1]).unwrap();
        assert!((b.vn_entropy().to(Base::Bits).value - 2.0).abs() < 1e-10);
        for nu in [1.0, 1.5, 7.0, 50.0] {
            assert!(epr_state(nu).unwrap().vn_entropy().in_nats().abs() < 1e-6);
        }
        // additivity over product modes
        let two = epr_state(3.0).unwrap().marginal(&[0, 1]).unwrap();
        let a = epr_state(3.0).unwrap().marginal(&[0]).unwrap();
        let mut cov = DMatrix::zeros(4, 4);
        cov.view_mut((0, 0), (2, 2)).copy_from(&a.cov);
        cov.view_mut((2, 2), (2, 2)).copy_from(&b.cov);
        let prod = GaussianState::new(cov, DVector::zeros(4)).unwrap();
        assert!((prod.vn_entropy().in_nats() - 2.0 * b.vn_entropy().in_nats()).abs() < 1e-9);
        assert!(two.vn_entropy().in_nats().abs() < 1e-6);
    }

    #[test]
    fn unphysical_covariance_rejected() {
        let cov = DMatrix::identity(2, 2) * 0.4;
        assert!(GaussianState::new(cov, DVector::zeros(2)).is_err());
    }

    #[test]
    fn gap_values() {
        let g0 = epr_gap(1.0).unwrap() / std::f64::consts::LN_2;
        assert!((g0 - (E / 2.0).log2()).abs() < 1e-12);
        let g1 = epr_gap(nu_from_r(1.0)).unwrap();
        let g15 = epr_gap(nu_from_r(1.5)).unwrap();
        let g2 = epr_gap(nu_from_r(2.0)).unwrap();
        assert!(g1 > g15 && g15 > g2 && g2 > 0.0);
        // f at ν = cosh 3 evaluated at 40 digits: 1.649229459899130e-3 nats
        assert!((g15 - 1.649_229_459_899_13e-3).abs() < 1e-13);
    }

    #[test]
    fn conditional_entropies() {
        let e = epr_conditional_entropies(1.0).unwrap();
        assert!((e.h_q_given_b - (0.5 + 0.5 * PI.ln())).abs() < 1e-12);
        assert!((e.sum - (E * PI).ln()).abs() < 1e-12);
        for nu in [1.0, 2.0, 3f64.cosh(), 40.0] {
            let e = epr_conditional_entropies(nu).unwrap();
            assert!((e.sum - epr_f(nu).unwrap()).abs() < 1e-12);
            assert!(e.sum >= (2.0 * PI).ln());
        }
        let e = epr_conditional_entropies(3f64.cosh()).unwrap();
        assert!(e.sum - (2.0 * PI).ln() < 2e-3);
    }

    #[test]
    fn epr_gap_rows() {
        let rows = epr_gap_curve(0.0, 3.0, 61).unwrap();
        assert_eq!(rows.len(), 61);
        assert!(rows.windows(2).all(|w| w[1].gap_nats < w[0].gap_nats && w[1].gap_nats > 0.0));
        assert!((rows[0].mean_energy - 1.0).abs() < 1e-15);
        assert!((rows[60].r - 3.0).abs() < 1e-15);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let n = 4000;
        let dq = 0.01;
        let k = 12;
        let mut gram = DMatrix::<f64>::zeros(k, k);
        for i in 0..n {
            let q = -20.0 + (i as f64 + 0.5) * dq;
            let h = hermite_functions(q, k);
            for a in 0..k {
                for b in 0..k {
                    gram[(a, b)] += h[a] * h[b] * dq;
                }
            }
        }
        assert!((gram - DMatrix::identity(k, k)).amax() < 1e-10);
    }

    #[test]
    fn epr_wavefunction_moments() {
        let nu = 3.0;
        let d = fock_cutoff(nu, 1e-14).unwrap();
        let n = 4096;
        let dq = 24.0 / n as f64;
        let wf = epr_wavefunction(nu, -12.0 + 0.5 * dq, dq, n, d).unwrap();
        let var: f64 = wf
            .density()
            .iter()
            .enumerate()
            .map(|(i, p)| wf.point(i).powi(2) * p)
            .sum::<f64>()
            * dq;
        assert!((var - nu / 2.0).abs() < 1e-9);
        // memory marginal is thermal with H(B) = 2 bits at ν = 3
        let rho_b = wf.memory_state();
        let h = crate::entropy::vn_raw(&rho_b) / std::f64::consts::LN_2;
        assert!((h - 2.0).abs() < 1e-9, "{h}");
    }
}
