//! Interval partitions of the real line, discretization of grid
//! wavefunctions into cq states, the FFT momentum transform and
//! regularized-limit convergence ladders.
//!
//! A grid sample `q_i` stands for the midpoint cell `[q_i − dq/2, q_i + dq/2]`.
//! When a partition edge falls inside such a cell the sample's weight is
//! split in proportion to the overlap; when edges coincide with sample-cell
//! edges this is exactly the midpoint sum `dq Σ_{q_i ∈ I_k} ψ(q_i)ψ(q_i)†`.

use crate::entropy::{self, EntropyValue};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, C64};
use crate::minmax;
use crate::qstate::{CqState, GridWaveFunction};
use nalgebra::DMatrix;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

/// Weights below this are dropped, weights within it of one are snapped to one.
const WEIGHT_SNAP: f64 = 1e-12;

/// Balanced partition `I_k = (offset + kα, offset + (k+1)α]`, `k_min ≤ k ≤ k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Partition {
    pub alpha: f64,
    pub offset: f64,
    pub k_min: i64,
    pub k_max: i64,
}

impl Partition {
    /// Cells of width `alpha` with edges at `offset + kα`, covering `[lo, hi]`.
    pub fn covering(alpha: f64, offset: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("cell width {alpha} must be positive")));
        }
        if !(hi >= lo) {
            return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi}]")));
        }
        let k_min = ((lo - offset) / alpha).floor() as i64 - 1;
        let k_max = ((hi - offset) / alpha).ceil() as i64;
        Ok(Self {
            alpha,
            offset,
            k_min,
            k_max,
        })
    }

    /// Partition with a cell centered at 0, covering `[lo, hi]`.
    pub fn centered(alpha: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::covering(alpha, -0.5 * alpha, lo, hi)
    }

    /// Same edges refined by a factor of two (every cell split in half).
    pub fn refined(&self) -> Self {
        Self {
            alpha: 0.5 * self.alpha,
            offset: self.offset,
            k_min: 2 * self.k_min,
            k_max: 2 * self.k_max + 1,
        }
    }

    pub fn n_cells(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    pub fn lower(&self, k: i64) -> f64 {
        self.offset + k as f64 * self.alpha
    }

    pub fn upper(&self, k: i64) -> f64 {
        self.offset + (k + 1) as f64 * self.alpha
    }

    /// Index of the cell containing `x` under the `(lower, upper]` convention.
    pub fn cell_of(&self, x: f64) -> i64 {
        ((x - self.offset) / self.alpha).ceil() as i64 - 1
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.lower(self.k_min) <= lo && self.upper(self.k_max) >= hi
    }

    /// `(cell index, weight)` pairs of the sample cell `[q − dq/2, q + dq/2]`.
    pub fn split(&self, q: f64, dq: f64) -> Vec<(i64, f64)> {
        let a = q - 0.5 * dq;
        let b = q + 0.5 * dq;
        let k_lo = self.cell_of(a).max(self.k_min);
        let k_hi = self.cell_of(b).min(self.k_max);
        let mut out = Vec::with_capacity(2);
        for k in k_lo..=k_hi {
            let overlap = b.min(self.upper(k)) - a.max(self.lower(k));
            let mut w = overlap / dq;
            if w < WEIGHT_SNAP {
                continue;
            }
            if w > 1.0 - WEIGHT_SNAP {
                w = 1.0;
            }
            out.push((k, w));
        }
        out
    }
}

fn check_resolution(p: &Partition, dq: f64) -> Result<()> {
    if p.alpha < 2.0 * dq * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "undersampled partition: cell width {} < 2·dq = {}",
            p.alpha,
            2.0 * dq
        )));
    }
    Ok(())
}

fn check_coverage(wf: &GridWaveFunction, p: &Partition) -> Result<()> {
    let lo = wf.point(0) - 0.5 * wf.dq;
    let hi = wf.point(wf.len() - 1) + 0.5 * wf.dq;
    if !p.covers(lo, hi) {
        return Err(Error::InvalidArgument(format!(
            "partition [{}, {}] does not cover grid [{lo}, {hi}]",
            p.lower(p.k_min),
            p.upper(p.k_max)
        )));
    }
    Ok(())
}

/// Cell probabilities `∫_{I_k} ‖ψ‖²` for every cell of `p`.
pub fn cell_probabilities(wf: &GridWaveFunction, p: &Partition) -> Result<Vec<f64>> {
    check_resolution(p, wf.dq)?;
    check_coverage(wf, p)?;
    let mut probs = vec![0.0; p.n_cells()];
    for (i, dens) in wf.density().into_iter().enumerate() {
        for (k, w) in p.split(wf.point(i), wf.dq) {
            probs[(k - p.k_min) as usize] += w * dens * wf.dq;
        }
    }
    Ok(probs)
}

/// `ω_B^k = dq Σ_i w_ik ψ(q_i) ψ(q_i)†`, labels are the cell indices `k`.
pub fn discretize_position(wf: &GridWaveFunction, p: &Partition) -> Result<CqState> {
    check_resolution(p, wf.dq)?;
    check_coverage(wf, p)?;
    let d = wf.memory_dim();
    let mut ops = vec![CMatrix::zeros(d, d); p.n_cells()];
    for i in 0..wf.len() {
        let v = wf.sample(i);
        if v.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            continue;
        }
        let outer = &v * v.adjoint();
        for (k, w) in p.split(wf.point(i), wf.dq) {
            ops[(k - p.k_min) as usize] += outer.scale(w * wf.dq);
        }
    }
    let outcomes = ops
        .into_iter()
        .enumerate()
        .map(|(j, m)| ((p.k_min + j as i64).to_string(), m))
        .collect();
    let cq = CqState::from_outcomes_unchecked(outcomes);
    let total: f64 = cq.probabilities().iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::Normalization(format!("discretized mass {total} != 1")));
    }
    Ok(cq)
}

/// Merge the cells of a discretization on `fine` into the cells of `coarse`.
/// Every fine cell must lie inside one coarse cell.
pub fn coarsen(cq: &CqState, fine: &Partition, coarse: &Partition) -> Result<CqState> {
    if fine.n_cells() != cq.len() {
        return Err(Error::DimensionMismatch {
            expected: fine.n_cells(),
            got: cq.len(),
        });
    }
    let d = cq.dim();
    let mut ops = vec![CMatrix::zeros(d, d); coarse.n_cells()];
    for (j, op) in cq.ops().enumerate() {
        let k = fine.k_min + j as i64;
        let mid = 0.5 * (fine.lower(k) + fine.upper(k));
        let ck = coarse.cell_of(mid);
        if ck < coarse.k_min || ck > coarse.k_max {
            return Err(Error::InvalidArgument(format!("fine cell {k} outside coarse partition")));
        }
        let lo_ok = coarse.lower(ck) <= fine.lower(k) + 1e-12 * coarse.alpha;
        let hi_ok = coarse.upper(ck) >= fine.upper(k) - 1e-12 * coarse.alpha;
        if !(lo_ok && hi_ok) {
            return Err(Error::InvalidArgument("partitions are not nested".into()));
        }
        ops[(ck - coarse.k_min) as usize] += op;
    }
    Ok(CqState::from_outcomes_unchecked(
        ops.into_iter()
            .enumerate()
            .map(|(j, m)| ((coarse.k_min + j as i64).to_string(), m))
            .collect(),
    ))
}

/// Momentum-space wavefunction and whether the input was zero-padded to a
/// power-of-two length first.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub wavefunction: GridWaveFunction,
    pub padded_from: Option<usize>,
}

/// `F[ψ](p) = (2π)^{-1/2} ∫ ψ(q) e^{−iqp} dq` on the grid
/// `p_j = −π/dq + j·2π/(N dq)`.
pub fn momentum_transform(wf: &GridWaveFunction) -> Result<Transformed> {
    let n0 = wf.len();
    let n = n0.next_power_of_two();
    let padded_from = (n != n0).then_some(n0);
    let d = wf.memory_dim();
    let dq = wf.dq;
    let q0 = wf.q0;
    let dp = 2.0 * PI / (n as f64 * dq);
    let p0 = -PI / dq;

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut out = DMatrix::<C64>::zeros(n, d);
    let pref = dq / (2.0 * PI).sqrt();
    let global = C64::from_polar(1.0, -q0 * p0);
    for col in 0..d {
        let mut buf: Vec<C64> = (0..n)
            .map(|i| {
                if i < n0 {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    wf.samples()[(i, col)] * sign
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect();
        fft.process(&mut buf);
        for (j, z) in buf.into_iter().enumerate() {
            let phase = C64::from_polar(1.0, -q0 * j as f64 * dp);
            out[(j, col)] = z * phase * global * pref;
        }
    }
    Ok(Transformed {
        wavefunction: GridWaveFunction::new_unnormalized(p0, dp, out)?,
        padded_from,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    Position,
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyKind {
    Vn,
    Min,
    Max,
}

impl std::str::FromStr for EntropyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vn" => Ok(Self::Vn),
            "min" | "hmin" => Ok(Self::Min),
            "max" | "hmax" => Ok(Self::Max),
            other => Err(Error::InvalidArgument(format!("unknown entropy kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for EntropyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Vn => "vn",
            Self::Min => "min",
            Self::Max => "max",
        })
    }
}

impl std::str::FromStr for Quadrature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "position" | "q" => Ok(Self::Position),
            "momentum" | "p" => Ok(Self::Momentum),
            other => Err(Error::InvalidArgument(format!("unknown quadrature {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderRow {
    pub alpha: f64,
    /// `H(X_α|B) + log α`, in nats.
    pub regularized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub quadrature: Quadrature,
    pub kind: EntropyKind,
    /// Ordered by decreasing `alpha`.
    pub rows: Vec<LadderRow>,
    /// Richardson estimate of the `α → 0` limit from the last three rungs.
    pub extrapolated: Option<f64>,
    /// Every halving of `α` did not increase the regularized entropy
    /// (within `MONOTONE_TOL` plus the solver tolerance).
    pub monotone: bool,
}

pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct LadderConfig {
    pub alpha0: f64,
    pub n_max: usize,
    pub tol: f64,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            alpha0: 1.0,
            n_max: 8,
            tol: minmax::DEFAULT_TOL,
        }
    }
}

/// Conditional entropy of a discretization, in nats.
pub fn discretized_entropy(cq: &CqState, kind: EntropyKind, tol: f64) -> Result<f64> {
    let cq = cq.without_null_outcomes();
    if cq.dim() == 1 {
        let p = cq.probabilities();
        return Ok(match kind {
            EntropyKind::Vn => -p.iter().map(|&x| entropy::xlogx(x)).sum::<f64>(),
            EntropyKind::Min => -p.iter().copied().fold(0.0, f64::max).ln(),
            EntropyKind::Max => 2.0 * p.iter().map(|x| x.max(0.0).sqrt()).sum::<f64>().ln(),
        });
    }
    Ok(match kind {
        EntropyKind::Vn => entropy::cond_vn_cq(&cq).in_nats(),
        EntropyKind::Min => minmax::h_min_cq(&cq, tol)?.in_nats(),
        EntropyKind::Max => minmax::h_max_cq(&cq, tol)?.in_nats(),
    })
}

/// Regularized discretized entropies `H(X_α|B) + log α` for
/// `α = α₀·2^{−n}`, `n = 0..=n_max`, on nested partitions with a cell of the
/// coarsest rung centered at 0.
pub fn convergence_ladder(
    wf: &GridWaveFunction,
    quadrature: Quadrature,
    kind: EntropyKind,
    cfg: LadderConfig,
) -> Result<ConvergenceTable> {
    let grid = match quadrature {
        Quadrature::Position => wf.clone(),
        Quadrature::Momentum => momentum_transform(wf)?.wavefunction,
    };
    let finest = cfg.alpha0 * 0.5f64.powi(cfg.n_max as i32);
    if finest < 2.0 * grid.dq * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "ladder reaches α = {finest} below 2·grid spacing {}",
            2.0 * grid.dq
        )));
    }
    let lo = grid.point(0) - 0.5 * grid.dq;
    let hi = grid.point(grid.len() - 1) + 0.5 * grid.dq;
    let mut partition = Partition::centered(cfg.alpha0, lo, hi)?;
    let mut rows = Vec::with_capacity(cfg.n_max + 1);
    for _ in 0..=cfg.n_max {
        let cq = discretize_position(&grid, &partition)?;
        let h = discretized_entropy(&cq, kind, cfg.tol)?;
        rows.push(LadderRow {
            alpha: partition.alpha,
            regularized: h + partition.alpha.ln(),
        });
        partition = partition.refined();
    }
    let slack = MONOTONE_TOL + if kind == EntropyKind::Vn { 0.0 } else { 2.0 * cfg.tol };
    let monotone = rows
        .windows(2)
        .all(|w| w[1].regularized <= w[0].regularized + slack);
    Ok(ConvergenceTable {
        quadrature,
        kind,
        extrapolated: richardson(&rows),
        rows,
        monotone,
    })
}

/// Richardson extrapolation for step ratio 2 with the observed order.
fn richardson(rows: &[LadderRow]) -> Option<f64> {
    let n = rows.len();
    if n < 2 {
        return None;
    }
    let h1 = rows[n - 1].regularized;
    let h2 = rows[n - 2].regularized;
    let mut order = 2.0;
    if n >= 3 {
        let h4 = rows[n - 3].regularized;
        let ratio = (h4 - h2) / (h2 - h1);
        if ratio.is_finite() && ratio > 1.0 {
            order = ratio.log2().clamp(0.5, 4.0);
        }
    }
    Some(h1 + (h1 - h2) / (2f64.powf(order) - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub finite: bool,
    pub value: f64,
    /// Density at the grid edge is not negligible: the true tail was cut off.
    pub grid_truncated: bool,
}

/// `∫ x² ω(x) dx` by the midpoint rule on `x_i = q0 + i·dq`.
pub fn second_moment_finite(density: &[f64], q0: f64, dq: f64) -> MomentReport {
    let value: f64 = density
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let x = q0 + i as f64 * dq;
            x * x * p
        })
        .sum::<f64>()
        * dq;
    let peak = density.iter().copied().fold(0.0, f64::max);
    let edge = density.first().copied().unwrap_or(0.0).max(density.last().copied().unwrap_or(0.0));
    MomentReport {
        finite: value.is_finite(),
        value,
        grid_truncated: edge > 1e-12 * peak,
    }
}

/// Left endpoint of an `n`-point grid symmetric about 0 with no point at 0
/// (for even `n`): partition edges at multiples of `dq` fall between samples.
pub fn symmetric_grid_start(n: usize, dq: f64) -> f64 {
    -(n as f64) * 0.5 * dq + 0.5 * dq
}

pub fn differential_entropies(wf: &GridWaveFunction) -> Result<(EntropyValue, EntropyValue, EntropyValue)> {
    let dens = wf.density();
    let h = entropy::differential_entropy(&dens, wf.dq)?;
    let (hmin, hmax) = entropy::classical_hmin_hmax(&dens, wf.dq)?;
    Ok((hmin, h, hmax))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector;

    fn gaussian(n: usize, half_width: f64, sigma: f64) -> GridWaveFunction {
        let dq = 2.0 * half_width / n as f64;
        GridWaveFunction::gaussian(symmetric_grid_start(n, dq), dq, n, 0.0, sigma).unwrap()
    }

    #[test]
    fn partition_cells_and_split() {
        let p = Partition::centered(1.0, -3.0, 3.0).unwrap();
        assert_eq!(p.cell_of(0.0), 0);
        assert_eq!(p.cell_of(0.5), 0);
        assert_eq!(p.cell_of(0.5000001), 1);
        assert!(p.covers(-3.0, 3.0));
        let parts = p.split(0.5, 0.2);
        assert_eq!(parts.len(), 2);
        assert!((parts[0].1 - 0.5).abs() < 1e-12 && (parts[1].1 - 0.5).abs() < 1e-12);
        let whole = p.split(0.1, 0.2);
        assert_eq!(whole, vec![(0, 1.0)]);
    }

    #[test]
    fn trivial_memory_reduces_to_binned_density() {
        let wf = gaussian(1024, 10.0, 1.0);
        let p = Partition::centered(0.5, -10.0, 10.0).unwrap();
        let cq = discretize_position(&wf, &p).unwrap();
        let probs = cell_probabilities(&wf, &p).unwrap();
        for (a, b) in cq.probabilities().iter().zip(&probs) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn undersampled_partition_rejected() {
        let wf = gaussian(256, 10.0, 1.0);
        let p = Partition::centered(wf.dq, -10.0, 10.0).unwrap();
        assert!(discretize_position(&wf, &p).is_err());
    }

    #[test]
    fn merging_refined_cells_reproduces_coarse_discretization() {
        // memory-valued wavefunction: ψ(q) = (g(q), q g(q), i·sin(q) g(q))
        let n = 2048;
        let dq = 16.0 / n as f64;
        let wf = GridWaveFunction::from_fn(symmetric_grid_start(n, dq) + 0.3 * dq, dq, n, 3, |q| {
            let g = (-q * q / 2.0).exp();
            vec![c(g, 0.0), c(q * g, 0.0), c(0.0, q.sin() * g)]
        })
        .unwrap();
        let coarse = Partition::covering(0.25, -0.1, -8.5, 8.5).unwrap();
        let fine = coarse.refined();
        let a = discretize_position(&wf, &coarse).unwrap();
        let b = coarsen(&discretize_position(&wf, &fine).unwrap(), &fine, &coarse).unwrap();
        for (x, y) in a.ops().zip(b.ops()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn orthogonally_tagged_peaks_are_perfectly_guessable() {
        let n = 1024;
        let dq = 20.0 / n as f64;
        let wf = GridWaveFunction::from_fn(symmetric_grid_start(n, dq), dq, n, 2, |q| {
            let left = (-(q + 3.0).powi(2) * 4.0).exp();
            let right = (-(q - 3.0).powi(2) * 4.0).exp();
            vec![c(left, 0.0), c(right, 0.0)]
        })
        .unwrap();
        let p = Partition::covering(6.0, -12.0, -10.0, 10.0).unwrap();
        let cq = discretize_position(&wf, &p).unwrap().without_null_outcomes();
        let mut probs = cq.probabilities();
        probs.sort_by(|a, b| b.total_cmp(a));
        assert!((probs[0] - 0.5).abs() < 1e-12 && (probs[1] - 0.5).abs() < 1e-12);
        assert!(probs[2..].iter().all(|&x| x < 1e-30));
        let h = minmax::h_min_cq(&cq, minmax::DEFAULT_TOL).unwrap();
        assert!(h.in_bits().abs() < 1e-9);
    }

    #[test]
    fn momentum_of_gaussian_has_reciprocal_variance() {
        let sigma = 0.8;
        let wf = gaussian(4096, 20.0 * sigma, sigma);
        let t = momentum_transform(&wf).unwrap();
        assert!(t.padded_from.is_none());
        let pw = t.wavefunction;
        assert!((pw.norm_sq() - 1.0).abs() < 1e-8);
        assert!((pw.q0 + PI / wf.dq).abs() < 1e-12);
        let dens = pw.density();
        let var: f64 = dens
            .iter()
            .enumerate()
            .map(|(j, &p)| pw.point(j).powi(2) * p)
            .sum::<f64>()
            * pw.dq;
        assert!((var - 1.0 / (4.0 * sigma * sigma)).abs() < 1e-6, "{var}");
    }

    #[test]
    fn double_transform_is_parity() {
        let n = 1024;
        let dq = 0.05;
        // integer grid q_i = (i − n/2)·dq, asymmetric profile with phase
        let wf = GridWaveFunction::from_fn(-(n as f64) / 2.0 * dq, dq, n, 1, |q| {
            let g = (-(q - 1.0).powi(2)).exp() * (1.0 + 0.3 * q);
            vec![C64::from_polar(g.abs(), 0.7 * q)]
        })
        .unwrap();
        let once = momentum_transform(&wf).unwrap().wavefunction;
        let twice = momentum_transform(&once).unwrap().wavefunction;
        assert!((twice.dq - dq).abs() < 1e-12);
        for i in 1..n {
            let mirrored = wf.samples()[(n - i, 0)];
            assert!((twice.samples()[(i, 0)] - mirrored).norm() < 1e-8);
        }
    }

    #[test]
    fn windowed_plane_wave_peaks_at_carrier() {
        let n = 2048;
        let dq = 0.05;
        let carrier = 3.0;
        let width = 4.0;
        let wf = GridWaveFunction::from_fn(symmetric_grid_start(n, dq), dq, n, 1, |q| {
            let amp = if q.abs() <= width / 2.0 { 1.0 } else { 0.0 };
            vec![C64::from_polar(amp, carrier * q)]
        })
        .unwrap();
        let pw = momentum_transform(&wf).unwrap().wavefunction;
        let dens = pw.density();
        let peak = (0..dens.len()).max_by(|&a, &b| dens[a].total_cmp(&dens[b])).unwrap();
        // oracle: |∫ e^{i(k−p)q} dq|² over the window is a sinc² centered at k
        assert!((pw.point(peak) - carrier).abs() <= pw.dq);
        let p = pw.point(peak);
        let direct: C64 = wf
            .points()
            .enumerate()
            .map(|(i, q)| wf.samples()[(i, 0)] * C64::from_polar(1.0, -q * p))
            .sum::<C64>()
            * (dq / (2.0 * PI).sqrt());
        assert!((direct.norm_sqr() - dens[peak]).abs() < 1e-10);
    }

    #[test]
    fn non_power_of_two_grid_is_padded() {
        let wf = gaussian(1000, 10.0, 1.0);
        let t = momentum_transform(&wf).unwrap();
        assert_eq!(t.padded_from, Some(1000));
        assert_eq!(t.wavefunction.len(), 1024);
        assert!((t.wavefunction.norm_sq() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gaussian_vn_ladder_limit() {
        let wf = gaussian(1 << 14, 16.0, 1.0);
        let cfg = LadderConfig { alpha0: 1.0, n_max: 6, tol: minmax::DEFAULT_TOL };
        let t = convergence_ladder(&wf, Quadrature::Position, EntropyKind::Vn, cfg).unwrap();
        let exact = 0.5 * (2.0 * PI * std::f64::consts::E).ln();
        let last = t.rows.last().unwrap().regularized;
        assert!((last - exact).abs() < 1e-3);
        assert!(t.monotone);
        assert!((t.extrapolated.unwrap() - exact).abs() < (last - exact).abs());
    }

    #[test]
    fn point_supported_density_min_ladder() {
        // uniform density on (0, 0.25]: below the support width every rung
        // puts the whole mass in cells of width ≥ support
        let n = 1024;
        let dq = 1.0 / 1024.0;
        let wf = GridWaveFunction::from_fn(-0.5 + 0.5 * dq, dq, n, 1, |q| {
            vec![c(if q > 0.0 && q < 0.25 { 1.0 } else { 0.0 }, 0.0)]
        })
        .unwrap();
        let cfg = LadderConfig { alpha0: 1.0, n_max: 2, tol: minmax::DEFAULT_TOL };
        let t = convergence_ladder(&wf, Quadrature::Position, EntropyKind::Min, cfg).unwrap();
        for row in &t.rows {
            assert!((row.regularized - row.alpha.ln()).abs() < 1e-12, "{row:?}");
        }
    }

    #[test]
    fn second_moments() {
        let wf = gaussian(4096, 20.0, 1.0);
        let r = second_moment_finite(&wf.density(), wf.q0, wf.dq);
        assert!(r.finite && !r.grid_truncated);
        assert!((r.value - 1.0).abs() < 1e-9);

        let n = 1000;
        let dq = 1.0 / n as f64;
        let uni = vec![1.0; n];
        let r = second_moment_finite(&uni, 0.5 * dq, dq);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-6);

        // Cauchy density cut off by the grid
        let m = 2001;
        let dx = 0.1;
        let cauchy: Vec<f64> = (0..m)
            .map(|i| {
                let x = -100.0 + i as f64 * dx;
                1.0 / (PI * (1.0 + x * x))
            })
            .collect();
        let r = second_moment_finite(&cauchy, -100.0, dx);
        assert!(r.finite && r.grid_truncated);
    }

    #[test]
    fn memory_state_is_preserved_by_discretization() {
        let n = 512;
        let dq = 12.0 / n as f64;
        let wf = GridWaveFunction::from_fn(symmetric_grid_start(n, dq), dq, n, 2, |q| {
            let g = (-q * q / 2.0).exp();
            vec![c(g, 0.0), c(0.0, q * g)]
        })
        .unwrap();
        let p = Partition::centered(0.5, -6.0, 6.0).unwrap();
        let cq = discretize_position(&wf, &p).unwrap();
        assert!((cq.marginal_b() - wf.memory_state()).norm() < 1e-12);
        let _ = CVector::zeros(1);
    }
}
