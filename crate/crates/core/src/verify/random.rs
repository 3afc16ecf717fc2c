//! Seeded random states and measurements.
//!
//! Every trial draws from its own ChaCha stream derived from `(seed, trial)`,
//! so results do not depend on the order in which trials are executed.

use crate::linalg::{self, c, CMatrix, CVector};
use crate::qstate::{CqState, Povm};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Rng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn complex_gaussian(rows: usize, cols: usize, rng: &mut Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `diag R` moved into `Q`.
pub fn haar_unitary(dim: usize, rng: &mut Rng) -> CMatrix {
    let qr = complex_gaussian(dim, dim, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

pub fn haar_pure(dim: usize, rng: &mut Rng) -> CVector {
    let g = complex_gaussian(dim, 1, rng);
    let v = CVector::from_iterator(dim, g.iter().copied());
    let n = v.norm();
    v / c(n, 0.0)
}

/// Mixed state of the given rank: marginal of a Haar-random pure state on
/// `dim ⊗ rank`. `rank = dim` gives the Hilbert–Schmidt measure.
pub fn random_density(dim: usize, rank: usize, rng: &mut Rng) -> CMatrix {
    let g = complex_gaussian(dim, rank, rng);
    let m = &g * g.adjoint();
    let t = linalg::trace_re(&m);
    m.scale(1.0 / t)
}

/// Random positive operator with eigenvalues spread over `[0, scale]`.
pub fn random_psd(dim: usize, rng: &mut Rng) -> CMatrix {
    let g = complex_gaussian(dim, dim, rng);
    &g * g.adjoint()
}

/// `E_k = S^{-1/2} G_k S^{-1/2}` for random PSD `G_k` and `S = Σ G_k`.
pub fn random_povm(dim: usize, outcomes: usize, rng: &mut Rng) -> Povm {
    let gs: Vec<CMatrix> = (0..outcomes).map(|_| random_psd(dim, rng)).collect();
    let s = gs.iter().fold(CMatrix::zeros(dim, dim), |acc, g| acc + g);
    let root = linalg::inv_sqrt_on_support(&s, 0.0);
    Povm::from_elements_unchecked(
        gs.iter()
            .map(|g| linalg::hermitize(&(&root * g * &root)))
            .collect(),
    )
}

/// Rank-one projective measurement onto a Haar-random basis.
pub fn random_basis(dim: usize, rng: &mut Rng) -> Povm {
    let u = haar_unitary(dim, rng);
    Povm::from_elements_unchecked((0..dim).map(|j| linalg::outer(&u.column(j).into_owned())).collect())
}

/// Computational and discrete-Fourier bases, unbiased in every dimension.
pub fn mub_pair(dim: usize) -> (Povm, Povm) {
    (Povm::computational(dim), Povm::fourier(dim))
}

/// cq state from measuring the first factor of a random state on `X ⊗ B` in
/// the computational basis.
pub fn random_cq(outcomes: usize, dim_b: usize, rng: &mut Rng) -> CqState {
    let rho = random_density(outcomes * dim_b, outcomes * dim_b, rng);
    Povm::computational(outcomes)
        .measure_first(&rho, dim_b)
        .expect("dimensions agree by construction")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Pure,
    Mixed,
    Povm { outcomes: usize },
    Basis,
    Mub,
}

#[derive(Debug, Clone)]
pub enum Instance {
    Pure(CVector),
    Mixed(CMatrix),
    Povm(Povm),
    Pair(Povm, Povm),
}

/// Endless stream of instances on a system of total dimension `Π dims`.
pub fn random_instances(kind: InstanceKind, dims: &[usize], seed: u64) -> impl Iterator<Item = Instance> {
    let dim: usize = dims.iter().product();
    (0u64..).map(move |trial| {
        let mut rng = trial_rng(seed, trial);
        match kind {
            InstanceKind::Pure => Instance::Pure(haar_pure(dim, &mut rng)),
            InstanceKind::Mixed => Instance::Mixed(random_density(dim, dim, &mut rng)),
            InstanceKind::Povm { outcomes } => Instance::Povm(random_povm(dim, outcomes, &mut rng)),
            InstanceKind::Basis => Instance::Povm(random_basis(dim, &mut rng)),
            InstanceKind::Mub => {
                let (e, f) = mub_pair(dim);
                Instance::Pair(e, f)
            }
        }
    })
}
