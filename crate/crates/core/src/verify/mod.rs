//! Randomized and constructed-instance checkers for the uncertainty relations
//! and the entropy inequalities they rest on.
//!
//! Every checker reports slack `LHS − RHS` in bits per instance. An instance
//! is a violation when its slack falls below `−tolerance`; instances whose
//! solver did not converge are flagged and not counted.

pub mod random;

use crate::entropy::{cond_vn, cond_vn_cq, max_relative_entropy_raw, relative_entropy_raw, vn_raw};
use crate::error::{Error, Result};
use crate::linalg::{self, basis, c, identity, kron, kron_vec, outer, partial_trace, CMatrix, CVector};
use crate::minmax::{self, DEFAULT_TOL};
use crate::overlap::{frank_lieb_overlap, povm_overlap};
use crate::par;
use crate::qstate::{CqState, DensityMatrix, Povm};
use random::{haar_pure, mub_pair, random_basis, random_cq, random_density, random_povm, random_psd, trial_rng, Rng};
use rand::Rng as _;
use serde::Serialize;
use std::f64::consts::LN_2;

/// Slack below `−VIOLATION_TOL` bits counts as a violation for exactly
/// computed quantities.
pub const VIOLATION_TOL: f64 = 1e-7;
/// Tolerance for quantities obtained from the min/max solver.
pub const SOLVER_SLACK_TOL: f64 = 2.0 * DEFAULT_TOL;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl Witness {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            slack: lhs - rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub relation: String,
    pub seed: u64,
    pub instances: usize,
    pub min_slack: f64,
    pub violations: usize,
    /// Instances skipped because the solver did not converge.
    pub flagged: usize,
    pub tolerance: f64,
    pub slacks: Vec<f64>,
    pub witnesses: Vec<Witness>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn build(relation: &str, seed: u64, tolerance: f64, trials: Vec<Result<f64>>, witnesses: Vec<Witness>) -> Result<Self> {
        let mut slacks = Vec::with_capacity(trials.len());
        let mut flagged = 0;
        for t in trials {
            match t {
                Ok(s) => slacks.push(s),
                Err(Error::NonConvergence { .. }) => flagged += 1,
                Err(e) => return Err(e),
            }
        }
        let violations = slacks
            .iter()
            .chain(witnesses.iter().map(|w| &w.slack))
            .filter(|&&s| !(s >= -tolerance))
            .count();
        Ok(Self {
            relation: relation.to_string(),
            seed,
            instances: slacks.len(),
            min_slack: slacks.iter().copied().fold(f64::INFINITY, f64::min),
            violations,
            flagged,
            tolerance,
            slacks,
            witnesses,
        })
    }
}

fn bits(nats: f64) -> f64 {
    nats / LN_2
}

fn run_trials(trials: usize, seed: u64, f: impl Fn(u64, &mut Rng) -> Result<f64> + Sync) -> Vec<Result<f64>> {
    par::map_indexed(trials, |i| {
        let mut rng = trial_rng(seed, i as u64);
        f(i as u64, &mut rng)
    })
}

/// Alternates MUBs, random bases and random POVMs with `dim + 1` outcomes.
fn measurement_pair(dim: usize, trial: u64, rng: &mut Rng, allow_povm: bool) -> (Povm, Povm) {
    let modulus = if allow_povm { 3 } else { 2 };
    match trial % modulus {
        0 => mub_pair(dim),
        1 => (random_basis(dim, rng), random_basis(dim, rng)),
        _ => (random_povm(dim, dim + 1, rng), random_povm(dim, dim + 1, rng)),
    }
}

fn check_dims(dims: &[usize], cap: usize) -> Result<()> {
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::InvalidArgument(format!("dimensions {dims:?} must be positive")));
    }
    let total: usize = dims.iter().product();
    if total > cap {
        return Err(Error::InvalidArgument(format!(
            "total dimension {total} exceeds the limit {cap}"
        )));
    }
    Ok(())
}

/// cq states `ω_XB` and `ω_YC` from measuring `A` of a pure state on `A⊗B⊗C`.
pub fn tripartite_cq(psi: &CVector, dims: [usize; 3], e: &Povm, f: &Povm) -> Result<(CqState, CqState)> {
    let rho = outer(psi);
    let rho_ab = partial_trace(&rho, &dims, &[0, 1]);
    let rho_ac = partial_trace(&rho, &dims, &[0, 2]);
    Ok((e.measure_first(&rho_ab, dims[1])?, f.measure_first(&rho_ac, dims[2])?))
}

/// `(H_max(X|B) + H_min(Y|C), −log c)` in bits.
pub fn minmax_terms(psi: &CVector, dims: [usize; 3], e: &Povm, f: &Povm) -> Result<(f64, f64)> {
    let (xb, yc) = tripartite_cq(psi, dims, e, f)?;
    let lhs = minmax::h_max_cq(&xb, DEFAULT_TOL)?.in_bits() + minmax::h_min_cq(&yc, DEFAULT_TOL)?.in_bits();
    Ok((lhs, -povm_overlap(e, f)?.log2()))
}

/// `(H(X|B) + H(Y|C), −log c)` in bits.
pub fn vn_terms(psi: &CVector, dims: [usize; 3], e: &Povm, f: &Povm) -> Result<(f64, f64)> {
    let (xb, yc) = tripartite_cq(psi, dims, e, f)?;
    let lhs = cond_vn_cq(&xb).in_bits() + cond_vn_cq(&yc).in_bits();
    Ok((lhs, -povm_overlap(e, f)?.log2()))
}

fn product_witness(dims: [usize; 3], seed: u64) -> CVector {
    let mut rng = trial_rng(seed, u64::MAX);
    kron_vec(&basis(dims[0], 0), &haar_pure(dims[1] * dims[2], &mut rng))
}

/// `H_max(X|B) + H_min(Y|C) ≥ −log c(E, F)` on Haar-random pure states.
pub fn check_minmax_tripartite(dims: [usize; 3], trials: usize, seed: u64) -> Result<CheckReport> {
    check_dims(&dims, 64)?;
    let da = dims[0];
    let results = run_trials(trials, seed, |t, rng| {
        let psi = haar_pure(da * dims[1] * dims[2], rng);
        let (e, f) = measurement_pair(da, t, rng, true);
        let (lhs, rhs) = minmax_terms(&psi, dims, &e, &f)?;
        Ok(lhs - rhs)
    });
    let (z, x) = mub_pair(2);
    let mut witnesses = Vec::new();
    let (lhs, rhs) = minmax_terms(&product_witness([2, 2, 2], seed), [2, 2, 2], &z, &x)?;
    witnesses.push(Witness::new("eigenstate of the first basis", lhs, rhs));
    let (lhs, rhs) = minmax_terms(&basis(2, 0), [2, 1, 1], &z, &x)?;
    witnesses.push(Witness::new("trivial memories", lhs, rhs));
    CheckReport::build("minmax", seed, SOLVER_SLACK_TOL, results, witnesses)
}

/// `H(X|B) + H(Y|C) ≥ −log c(E, F)` on Haar-random pure states.
pub fn check_vn_tripartite(dims: [usize; 3], trials: usize, seed: u64) -> Result<CheckReport> {
    check_dims(&dims, 64)?;
    let da = dims[0];
    let results = run_trials(trials, seed, |t, rng| {
        let psi = haar_pure(da * dims[1] * dims[2], rng);
        let (e, f) = measurement_pair(da, t, rng, true);
        let (lhs, rhs) = vn_terms(&psi, dims, &e, &f)?;
        Ok(lhs - rhs)
    });
    let (z, x) = mub_pair(2);
    let mut witnesses = Vec::new();
    let (lhs, rhs) = vn_terms(&product_witness([2, 2, 2], seed), [2, 2, 2], &z, &x)?;
    witnesses.push(Witness::new("eigenstate of the first basis", lhs, rhs));
    let bell = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (lhs, rhs) = vn_terms(&bell, [2, 2, 1], &z, &x)?;
    witnesses.push(Witness::new("maximally entangled with B", lhs, rhs));
    CheckReport::build("vn", seed, VIOLATION_TOL, results, witnesses)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BipartiteVariant {
    FrankLieb,
    Dilation,
}

/// Both sides of the bipartite relations for one state and measurement pair,
/// in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BipartiteTerms {
    /// `H(X|B) + H(Y|B)`
    pub lhs: f64,
    /// `log 1/c₁ + H(A|B)`
    pub frank_lieb_rhs: f64,
    /// `log 1/c + H(A|B) − min{H(A|XB), H(A|YB)}`
    pub dilation_rhs: f64,
}

impl BipartiteTerms {
    pub fn rhs(&self, variant: BipartiteVariant) -> f64 {
        match variant {
            BipartiteVariant::FrankLieb => self.frank_lieb_rhs,
            BipartiteVariant::Dilation => self.dilation_rhs,
        }
    }
}

/// `H(A|XB)` after the dilation `|ψ⟩ ↦ Σ_x √E_x|ψ⟩ ⊗ |x, x⟩`, in nats.
pub fn cond_entropy_after_dilation(rho_ab: &CMatrix, dim_a: usize, dim_b: usize, e: &Povm) -> f64 {
    let id_b = identity(dim_b);
    let mut h_axb = 0.0;
    let mut h_xb = 0.0;
    for ex in e.elements() {
        let root = kron(&linalg::sqrt_psd(ex), &id_b);
        let block = &root * rho_ab * &root;
        h_axb += vn_raw(&block);
        h_xb += vn_raw(&partial_trace(&block, &[dim_a, dim_b], &[1]));
    }
    h_axb - h_xb
}

pub fn bipartite_terms(rho_ab: &CMatrix, dim_a: usize, dim_b: usize, e: &Povm, f: &Povm) -> Result<BipartiteTerms> {
    let xb = e.measure_first(rho_ab, dim_b)?;
    let yb = f.measure_first(rho_ab, dim_b)?;
    let lhs = cond_vn_cq(&xb).in_bits() + cond_vn_cq(&yb).in_bits();
    let h_ab = bits(cond_vn(rho_ab, dim_a, dim_b));
    let h_axb = bits(cond_entropy_after_dilation(rho_ab, dim_a, dim_b, e));
    let h_ayb = bits(cond_entropy_after_dilation(rho_ab, dim_a, dim_b, f));
    Ok(BipartiteTerms {
        lhs,
        frank_lieb_rhs: -frank_lieb_overlap(e, f)?.log2() + h_ab,
        dilation_rhs: -povm_overlap(e, f)?.log2() + h_ab - h_axb.min(h_ayb),
    })
}

/// The two-qubit example: `A = A₁A₂` with `A₁` maximally entangled with `B`
/// and `A₂` maximally mixed. Returns the terms for measuring `A₁` and for
/// measuring `A₂` with the computational/Fourier pair.
pub fn gedankenexperiment() -> Result<(BipartiteTerms, BipartiteTerms)> {
    // factors A₁, A₂, B
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut rho = CMatrix::zeros(8, 8);
    for a2 in 0..2 {
        let mut v = CVector::zeros(8);
        for i in 0..2 {
            v[(i * 2 + a2) * 2 + i] = c(s, 0.0);
        }
        rho += outer(&v).scale(0.5);
    }
    let (z, x) = mub_pair(2);
    let on_a1 = bipartite_terms(&rho, 4, 2, &z.tensor_identity(2), &x.tensor_identity(2))?;
    let on_a2 = bipartite_terms(&rho, 4, 2, &z.identity_tensor(2), &x.identity_tensor(2))?;
    Ok((on_a1, on_a2))
}

/// Bipartite relations on random mixed states with MUBs and random bases.
pub fn check_bipartite(dims: [usize; 2], trials: usize, seed: u64, variant: BipartiteVariant) -> Result<CheckReport> {
    check_dims(&dims, 16)?;
    let [da, db] = dims;
    let results = run_trials(trials, seed, |t, rng| {
        let rho = random_density(da * db, da * db, rng);
        let (e, f) = measurement_pair(da, t, rng, false);
        let terms = bipartite_terms(&rho, da, db, &e, &f)?;
        Ok(terms.lhs - terms.rhs(variant))
    });
    let (on_a1, on_a2) = gedankenexperiment()?;
    let witnesses = vec![
        Witness::new("measure the entangled qubit", on_a1.lhs, on_a1.rhs(variant)),
        Witness::new("measure the mixed qubit", on_a2.lhs, on_a2.rhs(variant)),
    ];
    let id = match variant {
        BipartiteVariant::FrankLieb => "frank-lieb",
        BipartiteVariant::Dilation => "dilation",
    };
    CheckReport::build(id, seed, VIOLATION_TOL, results, witnesses)
}

fn random_state(dim: usize, rng: &mut Rng) -> CMatrix {
    random_density(dim, dim, rng)
}

/// Strict contraction `K` with `‖K‖ < 1`.
fn random_contraction(dim: usize, rng: &mut Rng) -> CMatrix {
    let g = random::complex_gaussian(dim, dim, rng);
    let norm = linalg::lambda_max(&(g.adjoint() * &g)).sqrt();
    let u: f64 = rng.random_range(0.2..0.95);
    g.scale(u / norm)
}

/// `γ ≤ σ` with `γ ⪰ 0`.
fn dominated(sigma: &CMatrix, rng: &mut Rng) -> CMatrix {
    let p = random_psd(sigma.nrows(), rng);
    let s = rng.random_range(0.1..0.9) * linalg::lambda_min(sigma) / linalg::lambda_max(&p);
    sigma - p.scale(s)
}

type Lemma = fn(&mut Rng) -> Result<f64>;

fn lemma_dmax_monotone(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(4, rng);
    let sigma = random_state(4, rng);
    let before = max_relative_entropy_raw(&rho, &sigma);
    let partial = before - max_relative_entropy_raw(&partial_trace(&rho, &[2, 2], &[0]), &partial_trace(&sigma, &[2, 2], &[0]));
    let k = random_contraction(4, rng);
    let sub = before - max_relative_entropy_raw(&(&k * &rho * k.adjoint()), &(&k * &sigma * k.adjoint()));
    Ok(bits(partial.min(sub)))
}

fn lemma_dmax_order(rng: &mut Rng) -> Result<f64> {
    let omega = random_state(3, rng);
    let sigma = random_state(3, rng);
    let gamma = dominated(&sigma, rng);
    Ok(bits(max_relative_entropy_raw(&omega, &gamma) - max_relative_entropy_raw(&omega, &sigma)))
}

fn lemma_dmax_scaling(rng: &mut Rng) -> Result<f64> {
    let omega = random_state(3, rng);
    let sigma = random_state(3, rng);
    let k: f64 = rng.random_range(0.1..10.0);
    let diff = max_relative_entropy_raw(&omega, &sigma.scale(k)) - max_relative_entropy_raw(&omega, &sigma) + k.ln();
    Ok(-bits(diff.abs()))
}

fn lemma_dmax_dominates_relative(rng: &mut Rng) -> Result<f64> {
    let omega = random_state(3, rng);
    let sigma = random_state(3, rng);
    Ok(bits(max_relative_entropy_raw(&omega, &sigma) - relative_entropy_raw(&omega, &sigma)))
}

fn lemma_hmin_dmax(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(4, rng);
    let r = minmax::conditional_min_sdp(&rho, 2, 2, DEFAULT_TOL)?;
    let t = linalg::trace_re(&r.dual_certificate);
    let at_cert = max_relative_entropy_raw(&rho, &kron(&identity(2), &r.dual_certificate.scale(1.0 / t)));
    let feasible = t.ln() - at_cert;
    let sigma = random_state(2, rng);
    let lower = max_relative_entropy_raw(&rho, &kron(&identity(2), &sigma)) - r.value.ln();
    let tight = -(r.dual_value.ln() - r.value.ln());
    Ok(bits(feasible.min(lower).min(tight)))
}

fn lemma_data_processing(rng: &mut Rng) -> Result<f64> {
    let xbc = random_cq(2, 4, rng);
    let xb = xbc.reduce_memory(&[2, 2], &[0])?;
    let vn = cond_vn_cq(&xb).in_bits() - cond_vn_cq(&xbc).in_bits();
    let hmin = minmax::h_min_cq(&xb, DEFAULT_TOL)?.in_bits() - minmax::h_min_cq(&xbc, DEFAULT_TOL)?.in_bits();
    let hmax = minmax::h_max_cq(&xb, DEFAULT_TOL)?.in_bits() - minmax::h_max_cq(&xbc, DEFAULT_TOL)?.in_bits();
    Ok(vn.min(hmin).min(hmax))
}

fn lemma_appended_memory(rng: &mut Rng) -> Result<f64> {
    let xb = random_cq(2, 2, rng);
    let tau = DensityMatrix::from_matrix_unchecked(random_state(2, rng));
    let ext = xb.with_memory_factor(&tau);
    let vn = (cond_vn_cq(&xb).in_bits() - cond_vn_cq(&ext).in_bits()).abs();
    let hmin = (minmax::h_min_cq(&xb, DEFAULT_TOL)?.in_bits() - minmax::h_min_cq(&ext, DEFAULT_TOL)?.in_bits()).abs();
    let hmax = (minmax::h_max_cq(&xb, DEFAULT_TOL)?.in_bits() - minmax::h_max_cq(&ext, DEFAULT_TOL)?.in_bits()).abs();
    Ok(-vn.max(hmin).max(hmax))
}

fn lemma_minmax_duality(rng: &mut Rng) -> Result<f64> {
    // the duality value must dominate log F(ρ_XB, 1⊗σ) for every state σ
    let xb = random_cq(2, 2, rng);
    let h = minmax::h_max_cq(&xb, DEFAULT_TOL)?.in_nats();
    let sigma = random_state(2, rng);
    let lb = linalg::fidelity_raw(&xb.block_diagonal(), &kron(&identity(2), &sigma)).ln();
    Ok(bits(h - lb))
}

fn lemma_vn_duality(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(4, rng);
    let (vals, vecs) = linalg::eigh(&rho);
    let mut psi = CVector::zeros(16);
    for (i, &l) in vals.iter().enumerate() {
        psi += kron_vec(&vecs.column(i).into_owned(), &basis(4, i)) * c(l.max(0.0).sqrt(), 0.0);
    }
    let rho_ac = partial_trace(&outer(&psi), &[2, 2, 4], &[0, 2]);
    Ok(-bits((cond_vn(&rho_ac, 2, 4) + cond_vn(&rho, 2, 2)).abs()))
}

fn lemma_relative_monotone(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(4, rng);
    let sigma = random_state(4, rng);
    let reduced = relative_entropy_raw(&partial_trace(&rho, &[2, 2], &[0]), &partial_trace(&sigma, &[2, 2], &[0]));
    Ok(bits(relative_entropy_raw(&rho, &sigma) - reduced))
}

fn lemma_relative_subunital(rng: &mut Rng) -> Result<f64> {
    let omega = random_state(3, rng);
    let sigma = random_state(3, rng);
    let k = random_contraction(3, rng);
    let rest = identity(3) - k.adjoint() * &k;
    let a = linalg::inner_re(&rest, &omega);
    let b = linalg::inner_re(&rest, &sigma);
    let scalar = if a > 0.0 { a * (a / b).ln() } else { 0.0 };
    let mapped = relative_entropy_raw(&(&k * &omega * k.adjoint()), &(&k * &sigma * k.adjoint()));
    Ok(bits(relative_entropy_raw(&omega, &sigma) - mapped - scalar))
}

fn lemma_relative_order(rng: &mut Rng) -> Result<f64> {
    let omega = random_state(3, rng);
    let sigma = random_state(3, rng);
    let gamma = dominated(&sigma, rng);
    Ok(bits(relative_entropy_raw(&omega, &gamma) - relative_entropy_raw(&omega, &sigma)))
}

fn lemma_relative_scaling(rng: &mut Rng) -> Result<f64> {
    let omega = random_state(3, rng).scale(rng.random_range(0.2..1.0));
    let sigma = random_state(3, rng);
    let k: f64 = rng.random_range(0.1..10.0);
    let diff = relative_entropy_raw(&omega, &sigma.scale(k)) - relative_entropy_raw(&omega, &sigma) + linalg::trace_re(&omega) * k.ln();
    Ok(-bits(diff.abs()))
}

fn lemma_relative_chain(rng: &mut Rng) -> Result<f64> {
    let omega = random_state(6, rng);
    let sa = random_state(2, rng);
    let sb = random_state(3, rng);
    let oa = partial_trace(&omega, &[2, 3], &[0]);
    let lhs = relative_entropy_raw(&omega, &kron(&sa, &sb));
    let rhs = relative_entropy_raw(&oa, &sa) + relative_entropy_raw(&omega, &kron(&oa, &sb));
    Ok(-bits((lhs - rhs).abs()))
}

fn lemma_relative_restriction(rng: &mut Rng) -> Result<f64> {
    // scalars ⊂ 2×2 block-diagonal ⊂ full matrices on ℂ⁴
    let omega = random_state(4, rng);
    let sigma = random_state(4, rng);
    let pinch = |m: &CMatrix| {
        CMatrix::from_fn(4, 4, |i, j| if (i < 2) == (j < 2) { m[(i, j)] } else { c(0.0, 0.0) })
    };
    let d0 = 0.0;
    let d1 = relative_entropy_raw(&pinch(&omega), &pinch(&sigma));
    let d2 = relative_entropy_raw(&omega, &sigma);
    Ok(bits((d1 - d0).min(d2 - d1)))
}

/// Relation ids and checks of the entropy inequalities used by the
/// uncertainty relations.
pub const LEMMAS: &[(&str, Lemma, f64)] = &[
    ("dmax-monotone", lemma_dmax_monotone, VIOLATION_TOL),
    ("dmax-order", lemma_dmax_order, VIOLATION_TOL),
    ("dmax-scaling", lemma_dmax_scaling, VIOLATION_TOL),
    ("dmax-dominates-relative", lemma_dmax_dominates_relative, VIOLATION_TOL),
    ("hmin-dmax", lemma_hmin_dmax, SOLVER_SLACK_TOL),
    ("data-processing", lemma_data_processing, SOLVER_SLACK_TOL),
    ("appended-memory", lemma_appended_memory, SOLVER_SLACK_TOL),
    ("minmax-duality", lemma_minmax_duality, SOLVER_SLACK_TOL),
    ("vn-duality", lemma_vn_duality, 1e-9),
    ("relative-monotone", lemma_relative_monotone, VIOLATION_TOL),
    ("relative-subunital", lemma_relative_subunital, VIOLATION_TOL),
    ("relative-order", lemma_relative_order, VIOLATION_TOL),
    ("relative-scaling", lemma_relative_scaling, VIOLATION_TOL),
    ("relative-chain", lemma_relative_chain, VIOLATION_TOL),
    ("relative-restriction", lemma_relative_restriction, VIOLATION_TOL),
];

/// One report per lemma, each over `trials` random instances.
pub fn check_lemmas(trials: usize, seed: u64) -> Result<Vec<CheckReport>> {
    LEMMAS
        .iter()
        .enumerate()
        .map(|(k, &(id, lemma, tol))| {
            // distinct streams per lemma
            let lemma_seed = seed.wrapping_add((k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let results = run_trials(trials, lemma_seed, |_, rng| lemma(rng));
            CheckReport::build(id, seed, tol, results, Vec::new())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    MinMax,
    Vn,
    FrankLieb,
    Dilation,
    Lemmas,
}

impl std::str::FromStr for Relation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minmax" => Ok(Self::MinMax),
            "vn" => Ok(Self::Vn),
            "frank-lieb" => Ok(Self::FrankLieb),
            "dilation" => Ok(Self::Dilation),
            "lemmas" => Ok(Self::Lemmas),
            other => Err(Error::InvalidArgument(format!(
                "unknown relation {other:?} (expected minmax, vn, frank-lieb, dilation or lemmas)"
            ))),
        }
    }
}

/// Run one relation; tripartite relations use all three `dims`, bipartite
/// ones the first two.
pub fn run_relation(relation: Relation, dims: [usize; 3], trials: usize, seed: u64) -> Result<Vec<CheckReport>> {
    Ok(match relation {
        Relation::MinMax => vec![check_minmax_tripartite(dims, trials, seed)?],
        Relation::Vn => vec![check_vn_tripartite(dims, trials, seed)?],
        Relation::FrankLieb => vec![check_bipartite([dims[0], dims[1]], trials, seed, BipartiteVariant::FrankLieb)?],
        Relation::Dilation => vec![check_bipartite([dims[0], dims[1]], trials, seed, BipartiteVariant::Dilation)?],
        Relation::Lemmas => check_lemmas(trials, seed)?,
    })
}

/// Guessing probability by the general solver against the two-outcome
/// closed form on a random binary cq state; returns
/// `(|admm − closed form|, certified gap)`.
pub fn helstrom_agreement(dim: usize, rng: &mut Rng) -> Result<(f64, f64)> {
    let omega = random_cq(2, dim, rng);
    let admm = minmax::guessing_probability_admm(&omega, DEFAULT_TOL)?;
    let exact = minmax::helstrom(&omega);
    Ok(((admm.value - exact.value).abs(), admm.gap))
}

/// `|H_max by duality − H_max by Bloch-ball search|` in bits on a random
/// qubit-memory cq state with `outcomes` outcomes.
pub fn duality_vs_bloch(outcomes: usize, rng: &mut Rng) -> Result<f64> {
    let omega = random_cq(outcomes, 2, rng);
    let dual = minmax::decoupling_fidelity(&omega, DEFAULT_TOL)?;
    let brute = minmax::decoupling_fidelity_bloch(&omega)?;
    Ok((dual.log2() - brute.log2()).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gedankenexperiment_values() {
        let (a1, a2) = gedankenexperiment().unwrap();
        assert!(a1.lhs.abs() < 1e-9);
        assert!(a1.frank_lieb_rhs.abs() < 1e-9);
        assert!(a1.dilation_rhs.abs() < 1e-9);
        assert!((a2.lhs - 2.0).abs() < 1e-9);
        assert!((a2.dilation_rhs - 2.0).abs() < 1e-9);
        assert!(a2.frank_lieb_rhs.abs() < 1e-9);
    }

    #[test]
    fn tripartite_witnesses_are_sharp() {
        let (z, x) = mub_pair(2);
        let psi = product_witness([2, 2, 2], 3);
        let (lhs, rhs) = minmax_terms(&psi, [2, 2, 2], &z, &x).unwrap();
        assert!((lhs - 1.0).abs() < 1e-6 && (rhs - 1.0).abs() < 1e-12);
        let (lhs, rhs) = vn_terms(&psi, [2, 2, 2], &z, &x).unwrap();
        assert!((lhs - 1.0).abs() < 1e-9 && (rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_suites_pass() {
        for r in [
            check_minmax_tripartite([2, 2, 2], 6, 1).unwrap(),
            check_vn_tripartite([2, 2, 2], 6, 1).unwrap(),
            check_bipartite([2, 2], 6, 1, BipartiteVariant::FrankLieb).unwrap(),
            check_bipartite([2, 2], 6, 1, BipartiteVariant::Dilation).unwrap(),
        ] {
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.instances + r.flagged, 6);
        }
        for r in check_lemmas(4, 1).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let a = check_vn_tripartite([2, 2, 2], 5, 99).unwrap();
        let b = check_vn_tripartite([2, 2, 2], 5, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oversized_dimensions_rejected() {
        assert!(check_vn_tripartite([4, 4, 8], 1, 0).is_err());
        assert!(check_bipartite([4, 8], 1, 0, BipartiteVariant::Dilation).is_err());
    }

    #[test]
    fn relation_ids_parse() {
        assert_eq!("frank-lieb".parse::<Relation>().unwrap(), Relation::FrankLieb);
        assert!("nope".parse::<Relation>().is_err());
    }
}
