//! Conditional min- and max-entropy.
//!
//! Both quantities reduce to the semidefinite program
//!
//! ```text
//!   minimize  tr σ_C   subject to  1_A ⊗ σ_C ⪰ ω_k   for every block k
//! ```
//!
//! - cq guessing probability: `A` trivial, one block per outcome `ω_B^x`;
//! - conditional min-entropy of a general state `ρ_AC`: a single block.
//!
//! The solver is consensus ADMM with slack variables `S_k = 1⊗σ − ω_k`
//! projected onto the PSD cone. Every returned value is certified: the dual
//! iterate is shifted by `t·1` until feasible (upper bound) and the scaled
//! multipliers are normalized into a feasible measurement (lower bound).
//! The conditional max-entropy of a cq state is obtained by duality on a
//! purification.

use crate::entropy::EntropyValue;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{purify_cq, CqState, Povm};
use serde::Serialize;

pub const DEFAULT_TOL: f64 = 1e-7;
pub const MAX_ITERATIONS: usize = 50_000;
const CHECK_EVERY: usize = 10;
// rho is rebalanced at this cadence and frozen afterwards; adapting it on every
// step can make the iteration cycle instead of converge
const REBALANCE_EVERY: usize = 50;
const REBALANCE_UNTIL: usize = 5_000;
const PGM_REFINE_STEPS: usize = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Closed form, used for two outcomes or trivial memory.
    Exact,
    Admm,
}

/// Certified solution of the guessing-probability program.
#[derive(Debug, Clone)]
pub struct SdpResult {
    /// Primal (measurement) value, a certified lower bound on the optimum.
    pub value: f64,
    /// `tr σ` of the feasible dual certificate, an upper bound.
    pub dual_value: f64,
    /// Measurement operators, one per block. For the cq program these form a
    /// POVM on `B`; in general `Σ_k tr_A E_k = 1_C`.
    pub primal: Vec<CMatrix>,
    pub dual_certificate: CMatrix,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
}

impl SdpResult {
    pub fn primal_povm(&self) -> Result<Povm> {
        Povm::new(self.primal.clone())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverDiagnostics {
    pub value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
}

impl From<&SdpResult> for SolverDiagnostics {
    fn from(r: &SdpResult) -> Self {
        Self {
            value: r.value,
            dual_value: r.dual_value,
            gap: r.gap,
            iterations: r.iterations,
            converged: r.converged,
            method: r.method,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} outside (0, 1e-3]")));
    }
    Ok(())
}

/// `P_guess(X|B)`; two outcomes use the Helstrom closed form.
pub fn guessing_probability(omega: &CqState, tol: f64) -> Result<SdpResult> {
    check_tol(tol)?;
    if omega.len() == 1 {
        let d = omega.dim();
        return Ok(SdpResult {
            value: 1.0,
            dual_value: 1.0,
            primal: vec![linalg::identity(d)],
            dual_certificate: omega.marginal_b(),
            gap: 0.0,
            iterations: 0,
            converged: true,
            method: Method::Exact,
        });
    }
    if omega.len() == 2 {
        return Ok(helstrom(omega));
    }
    if omega.dim() == 1 {
        return Ok(classical_guess(omega));
    }
    guessing_probability_admm(omega, tol)
}

/// Always run the ADMM solver, regardless of the number of outcomes.
pub fn guessing_probability_admm(omega: &CqState, tol: f64) -> Result<SdpResult> {
    check_tol(tol)?;
    let blocks: Vec<CMatrix> = omega.ops().cloned().collect();
    let mut res = admm(&blocks, 1, omega.dim(), tol);
    if !res.converged {
        refine_pgm(&blocks, &mut res);
        res.converged = res.gap <= tol;
    }
    Ok(res)
}

/// Optimal two-outcome discrimination:
/// `½(tr ω⁰ + tr ω¹ + ‖ω⁰ − ω¹‖₁)`.
pub fn helstrom(omega: &CqState) -> SdpResult {
    let ops: Vec<&CMatrix> = omega.ops().collect();
    let (w0, w1) = (ops[0], ops[1]);
    let delta = w0 - w1;
    let (vals, vecs) = linalg::eigh(&delta);
    let pos: Vec<f64> = vals.iter().map(|&l| if l > 0.0 { 1.0 } else { 0.0 }).collect();
    let e0 = linalg::from_spectrum(&pos, &vecs);
    let e1 = linalg::identity(omega.dim()) - &e0;
    let delta_pos = linalg::from_spectrum(&vals.iter().map(|&l| l.max(0.0)).collect::<Vec<_>>(), &vecs);
    let sigma = w1 + delta_pos;
    let norm1: f64 = vals.iter().map(|l| l.abs()).sum();
    let value = 0.5 * (linalg::trace_re(w0) + linalg::trace_re(w1) + norm1);
    let dual_value = linalg::trace_re(&sigma);
    SdpResult {
        value,
        dual_value,
        primal: vec![e0, e1],
        dual_certificate: sigma,
        gap: (dual_value - value).max(0.0),
        iterations: 0,
        converged: true,
        method: Method::Exact,
    }
}

fn classical_guess(omega: &CqState) -> SdpResult {
    let probs = omega.probabilities();
    let (best, &pmax) = probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty cq state");
    let primal = (0..probs.len())
        .map(|k| CMatrix::from_element(1, 1, linalg::c(if k == best { 1.0 } else { 0.0 }, 0.0)))
        .collect();
    SdpResult {
        value: pmax,
        dual_value: pmax,
        primal,
        dual_certificate: CMatrix::from_element(1, 1, linalg::c(pmax, 0.0)),
        gap: 0.0,
        iterations: 0,
        converged: true,
        method: Method::Exact,
    }
}

/// `2^{-H_min(A|C)}` optimum for a general state on `A ⊗ C`:
/// `min tr σ_C` subject to `1_A ⊗ σ_C ⪰ ρ_AC`.
pub fn conditional_min_sdp(rho_ac: &CMatrix, dim_a: usize, dim_c: usize, tol: f64) -> Result<SdpResult> {
    check_tol(tol)?;
    if dim_a * dim_c != rho_ac.nrows() {
        return Err(Error::DimensionMismatch {
            expected: rho_ac.nrows(),
            got: dim_a * dim_c,
        });
    }
    Ok(admm(std::slice::from_ref(rho_ac), dim_a, dim_c, tol))
}

/// `H_min(A|C)` of a general bipartite state.
pub fn conditional_min_entropy(rho_ac: &CMatrix, dim_a: usize, dim_c: usize, tol: f64) -> Result<EntropyValue> {
    let res = conditional_min_sdp(rho_ac, dim_a, dim_c, tol)?;
    ensure_converged(&res, tol)?;
    Ok(EntropyValue::nats(-res.value.ln()))
}

fn ensure_converged(res: &SdpResult, tol: f64) -> Result<()> {
    if res.converged && res.gap <= tol {
        Ok(())
    } else {
        Err(Error::NonConvergence {
            iterations: res.iterations,
            gap: res.gap,
        })
    }
}

/// `H_min(X|B) = −log P_guess(X|B)`.
pub fn h_min_cq(omega: &CqState, tol: f64) -> Result<EntropyValue> {
    let res = guessing_probability(omega, tol)?;
    ensure_converged(&res, tol)?;
    Ok(EntropyValue::nats(-res.value.ln()))
}

/// `F_dec(X|B) = max_σ (Σ_x √F(ω_B^x, σ))²`, computed by duality as
/// `2^{-H_min(X|X'B')}` on a purification of the cq state.
pub fn decoupling_fidelity(omega: &CqState, tol: f64) -> Result<f64> {
    Ok(decoupling_fidelity_sdp(omega, tol)?.value)
}

/// Solver result behind [`decoupling_fidelity`].
pub fn decoupling_fidelity_sdp(omega: &CqState, tol: f64) -> Result<SdpResult> {
    check_tol(tol)?;
    let omega = omega.without_null_outcomes();
    if omega.dim() == 1 {
        // trivial memory: (Σ_x √p_x)²
        let root: f64 = omega.probabilities().iter().map(|p| p.max(0.0).sqrt()).sum();
        let v = root * root;
        return Ok(SdpResult {
            value: v,
            dual_value: v,
            primal: Vec::new(),
            dual_certificate: CMatrix::from_element(1, 1, linalg::c(v, 0.0)),
            gap: 0.0,
            iterations: 0,
            converged: true,
            method: Method::Exact,
        });
    }
    let (rho_xc, n, dim_c) = complementary_state(&omega);
    let res = admm(std::slice::from_ref(&rho_xc), n, dim_c, tol);
    ensure_converged(&res, tol)?;
    Ok(res)
}

/// Reduced state on `X ⊗ C` of a purification of `Σ_x |x⟩⟨x| ⊗ ω_B^x`,
/// where `C = X'B'` is compressed to the support of its marginal.
fn complementary_state(omega: &CqState) -> (CMatrix, usize, usize) {
    let pur = purify_cq(omega);
    let [n, _, d, _] = pur.dims;
    let full = linalg::outer(&pur.vector);
    // X ⊗ X' ⊗ B ⊗ B'  →  keep X, X', B'
    let rho_xc = linalg::partial_trace(&full, &pur.dims, &[0, 1, 3]);
    let dim_c = n * d;
    let rho_c = linalg::partial_trace(&rho_xc, &[n, dim_c], &[1]);
    let (vals, vecs) = linalg::eigh(&rho_c);
    let top = vals.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > 1e-14 * top).collect();
    if keep.len() == dim_c {
        return (rho_xc, n, dim_c);
    }
    let mut basis = CMatrix::zeros(dim_c, keep.len());
    for (dst, &j) in keep.iter().enumerate() {
        basis.set_column(dst, &vecs.column(j));
    }
    let iso = linalg::kron(&linalg::identity(n), &basis);
    let compressed = iso.adjoint() * rho_xc * &iso;
    (compressed, n, keep.len())
}

/// `H_max(X|B) = log F_dec(X|B)`.
pub fn h_max_cq(omega: &CqState, tol: f64) -> Result<EntropyValue> {
    Ok(EntropyValue::nats(decoupling_fidelity(omega, tol)?.ln()))
}

/// Direct maximization of `(Σ_x √F(ω_B^x, σ))²` over qubit states `σ`
/// parametrized by the Bloch ball. Independent of the duality route.
pub fn decoupling_fidelity_bloch(omega: &CqState) -> Result<f64> {
    if omega.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "Bloch-ball search needs qubit memory, got dim {}",
            omega.dim()
        )));
    }
    let ops: Vec<CMatrix> = omega.ops().cloned().collect();
    let objective = |r: [f64; 3]| -> f64 {
        let sigma = bloch_state(r);
        let s: f64 = ops.iter().map(|w| qubit_root_fidelity(w, &sigma)).sum();
        s * s
    };
    // coarse grid over the ball
    let mut best = ([0.0; 3], objective([0.0; 3]));
    let steps = 12;
    for i in 0..=steps {
        for j in 0..=steps {
            for k in 0..=steps {
                let r = [
                    -1.0 + 2.0 * i as f64 / steps as f64,
                    -1.0 + 2.0 * j as f64 / steps as f64,
                    -1.0 + 2.0 * k as f64 / steps as f64,
                ];
                let r = clamp_ball(r);
                let v = objective(r);
                if v > best.1 {
                    best = (r, v);
                }
            }
        }
    }
    // pattern search; the objective is concave in σ
    let mut step = 2.0 / steps as f64;
    while step > 1e-9 {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut r = best.0;
                r[axis] += sign * step;
                let r = clamp_ball(r);
                let v = objective(r);
                if v > best.1 {
                    best = (r, v);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(best.1)
}

fn clamp_ball(r: [f64; 3]) -> [f64; 3] {
    let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if n > 1.0 {
        [r[0] / n, r[1] / n, r[2] / n]
    } else {
        r
    }
}

fn bloch_state(r: [f64; 3]) -> CMatrix {
    use linalg::c;
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + r[2]), 0.0),
            c(0.5 * r[0], -0.5 * r[1]),
            c(0.5 * r[0], 0.5 * r[1]),
            c(0.5 * (1.0 - r[2]), 0.0),
        ],
    )
}

/// `tr|√ρ√σ| = √(tr ρσ + 2√(det ρ det σ))` for 2×2 PSD matrices.
fn qubit_root_fidelity(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let det = |m: &CMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
    let overlap = (rho * sigma).trace().re;
    (overlap + 2.0 * (det(rho) * det(sigma)).sqrt()).max(0.0).sqrt()
}

struct Bounds {
    primal: Vec<CMatrix>,
    value: f64,
    sigma: CMatrix,
    dual_value: f64,
}

/// Consensus ADMM for `min tr σ  s.t.  1_a ⊗ σ ⪰ ω_k`.
fn admm(blocks: &[CMatrix], dim_a: usize, dim_c: usize, tol: f64) -> SdpResult {
    let n = blocks.len();
    let big = dim_a * dim_c;
    let id_c = linalg::identity(dim_c);
    let id_a = linalg::identity(dim_a);
    let lift = |s: &CMatrix| linalg::kron(&id_a, s);
    let tr_a = |m: &CMatrix| linalg::partial_trace(m, &[dim_a, dim_c], &[1]);

    // start from the feasible point σ = Σ_k tr_A ω_k
    let mut sigma = blocks.iter().fold(CMatrix::zeros(dim_c, dim_c), |acc, w| acc + tr_a(w));
    let mut slack: Vec<CMatrix> = blocks.iter().map(|w| linalg::psd_part(&(lift(&sigma) - w))).collect();
    let mut scaled: Vec<CMatrix> = vec![CMatrix::zeros(big, big); n];
    let mut rho = 1.0;

    let mut best: Option<Bounds> = None;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let sigma_prev = sigma.clone();

        // σ-update: closed-form minimizer of the augmented Lagrangian
        let mut acc = CMatrix::zeros(dim_c, dim_c);
        for k in 0..n {
            acc += tr_a(&(&blocks[k] + &slack[k] - &scaled[k]));
        }
        sigma = (acc - id_c.scale(1.0 / rho)).scale(1.0 / (n * dim_a) as f64);
        sigma = linalg::hermitize(&sigma);
        let lifted = lift(&sigma);

        let mut r_norm = 0.0;
        for k in 0..n {
            slack[k] = linalg::psd_part(&(&lifted - &blocks[k] + &scaled[k]));
            let resid = &lifted - &blocks[k] - &slack[k];
            r_norm += resid.norm_squared();
            scaled[k] += resid;
        }
        let r_norm = r_norm.sqrt();
        let s_norm = rho * (n as f64).sqrt() * lift(&(&sigma - &sigma_prev)).norm();

        if iterations % CHECK_EVERY == 0 || iterations == MAX_ITERATIONS {
            let bounds = certify(blocks, dim_a, dim_c, &sigma, &scaled, rho);
            best = Some(merge(best, bounds));
            let b = best.as_ref().unwrap();
            if b.dual_value - b.value <= 0.5 * tol {
                converged = true;
                break;
            }
        }

        // residual balancing
        if iterations % REBALANCE_EVERY == 0 && iterations <= REBALANCE_UNTIL {
            let factor = if r_norm > 10.0 * s_norm {
                2.0
            } else if s_norm > 10.0 * r_norm {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                for u in scaled.iter_mut() {
                    *u = u.scale(1.0 / factor);
                }
            }
        }
    }

    let b = best.unwrap_or_else(|| certify(blocks, dim_a, dim_c, &sigma, &scaled, rho));
    SdpResult {
        gap: (b.dual_value - b.value).max(0.0),
        value: b.value,
        dual_value: b.dual_value,
        primal: b.primal,
        dual_certificate: b.sigma,
        iterations,
        converged,
        method: Method::Admm,
    }
}

fn merge(prev: Option<Bounds>, new: Bounds) -> Bounds {
    match prev {
        None => new,
        Some(p) => {
            let (primal, value) = if new.value > p.value {
                (new.primal, new.value)
            } else {
                (p.primal, p.value)
            };
            let (sigma, dual_value) = if new.dual_value < p.dual_value {
                (new.sigma, new.dual_value)
            } else {
                (p.sigma, p.dual_value)
            };
            Bounds {
                primal,
                value,
                sigma,
                dual_value,
            }
        }
    }
}

/// Feasible primal/dual pair from the current iterate.
fn certify(blocks: &[CMatrix], dim_a: usize, dim_c: usize, sigma: &CMatrix, scaled: &[CMatrix], rho: f64) -> Bounds {
    let id_a = linalg::identity(dim_a);
    let lifted = linalg::kron(&id_a, sigma);
    let shift = blocks
        .iter()
        .map(|w| (-linalg::lambda_min(&(&lifted - w))).max(0.0))
        .fold(0.0, f64::max);
    let sigma_feas = sigma + linalg::identity(dim_c).scale(shift);
    let dual_value = linalg::trace_re(&sigma_feas);

    // multipliers E_k = −ρ U_k, projected to the PSD cone and normalized
    let raw: Vec<CMatrix> = scaled.iter().map(|u| linalg::psd_part(&u.scale(-rho))).collect();
    let primal = normalize_measurement(raw, dim_a, dim_c);
    let value = blocks.iter().zip(&primal).map(|(w, e)| linalg::inner_re(e, w)).sum();
    Bounds {
        primal,
        value,
        sigma: sigma_feas,
        dual_value,
    }
}

/// `E_k ↦ (1⊗G^{-1/2}) E_k (1⊗G^{-1/2})` with `G = Σ_k tr_A E_k`, completed on
/// the kernel of `G` so that `Σ_k tr_A E_k = 1_C` exactly.
fn normalize_measurement(raw: Vec<CMatrix>, dim_a: usize, dim_c: usize) -> Vec<CMatrix> {
    let g = raw.iter().fold(CMatrix::zeros(dim_c, dim_c), |acc, e| {
        acc + linalg::partial_trace(e, &[dim_a, dim_c], &[1])
    });
    let (vals, vecs) = linalg::eigh(&g);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let thresh = 1e-13 * top.max(1e-300);
    let inv: Vec<f64> = vals.iter().map(|&l| if l > thresh { 1.0 / l.sqrt() } else { 0.0 }).collect();
    let ker: Vec<f64> = vals.iter().map(|&l| if l > thresh { 0.0 } else { 1.0 }).collect();
    let id_a = linalg::identity(dim_a);
    let w = linalg::kron(&id_a, &linalg::from_spectrum(&inv, &vecs));
    let mut out: Vec<CMatrix> = raw.iter().map(|e| linalg::hermitize(&(&w * e * &w))).collect();
    let kernel = linalg::from_spectrum(&ker, &vecs);
    if let Some(first) = out.first_mut() {
        *first += linalg::kron(&id_a, &kernel).scale(1.0 / dim_a as f64);
    }
    out
}

/// Fixed-point iteration on pretty-good-measurement style updates
/// `E_x ↦ R^{-1/2} ω_x E_x ω_x R^{-1/2}`, `R = Σ_x ω_x E_x ω_x`,
/// keeping the best feasible measurement found.
fn refine_pgm(blocks: &[CMatrix], res: &mut SdpResult) {
    let d = blocks[0].nrows();
    let mut povm: Vec<CMatrix> = res.primal.clone();
    for _ in 0..PGM_REFINE_STEPS {
        let terms: Vec<CMatrix> = blocks.iter().zip(&povm).map(|(w, e)| w * e * w).collect();
        let r = terms.iter().fold(CMatrix::zeros(d, d), |acc, t| acc + t);
        let w = linalg::inv_sqrt_on_support(&r, 1e-14 * linalg::lambda_max(&r));
        let next: Vec<CMatrix> = terms.iter().map(|t| linalg::hermitize(&(&w * t * &w))).collect();
        povm = normalize_measurement(next, 1, d);
        let value: f64 = blocks.iter().zip(&povm).map(|(w, e)| linalg::inner_re(e, w)).sum();
        if value > res.value {
            res.value = value;
            res.primal = povm.clone();
            res.gap = (res.dual_value - value).max(0.0);
        }
    }
}
