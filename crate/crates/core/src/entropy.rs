//! Entropy functionals.
//!
//! Everything is computed in nats; [`EntropyValue::to`] converts for output.
//! Support of an operator means eigenvalues above `SUPPORT_REL_TOL · λ_max`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{CqState, DensityMatrix};
use serde::{Serialize, Serializer};
use std::f64::consts::LN_2;
use std::fmt;

pub const SUPPORT_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    Bits,
    Nats,
}

impl Base {
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            Base::Bits => nats / LN_2,
            Base::Nats => nats,
        }
    }

    pub fn to_nats(self, value: f64) -> f64 {
        match self {
            Base::Bits => value * LN_2,
            Base::Nats => value,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Base::Bits => "bits",
            Base::Nats => "nats",
        })
    }
}

impl std::str::FromStr for Base {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bits" | "2" => Ok(Base::Bits),
            "nats" | "e" => Ok(Base::Nats),
            other => Err(Error::InvalidArgument(format!("unknown log base {other:?}"))),
        }
    }
}

/// Extended-real entropy value tagged with its logarithm base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue {
    pub value: f64,
    pub base: Base,
}

impl EntropyValue {
    pub fn nats(value: f64) -> Self {
        Self {
            value,
            base: Base::Nats,
        }
    }

    pub fn bits(value: f64) -> Self {
        Self {
            value,
            base: Base::Bits,
        }
    }

    pub fn infinity() -> Self {
        Self::nats(f64::INFINITY)
    }

    pub fn to(self, base: Base) -> Self {
        Self {
            value: base.from_nats(self.base.to_nats(self.value)),
            base,
        }
    }

    pub fn in_nats(self) -> f64 {
        self.base.to_nats(self.value)
    }

    pub fn in_bits(self) -> f64 {
        Base::Bits.from_nats(self.in_nats())
    }

    pub fn is_finite(self) -> bool {
        self.value.is_finite()
    }
}

impl Serialize for EntropyValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EntropyValue", 2)?;
        if self.value == f64::INFINITY {
            st.serialize_field("value", "inf")?;
        } else if self.value == f64::NEG_INFINITY {
            st.serialize_field("value", "-inf")?;
        } else {
            st.serialize_field("value", &self.value)?;
        }
        st.serialize_field("base", &self.base)?;
        st.end()
    }
}

/// `x log x` with `0 log 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `−tr ρ log ρ` on a raw PSD matrix (no normalization requirement).
pub fn vn_raw(m: &CMatrix) -> f64 {
    -linalg::eigvalsh(m).into_iter().map(xlogx).sum::<f64>()
}

pub fn von_neumann(rho: &DensityMatrix) -> Result<EntropyValue> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization(format!("trace {tr} != 1")));
    }
    Ok(EntropyValue::nats(vn_raw(rho.matrix())))
}

/// Spectral data of `σ` restricted to its support.
struct Support {
    vals: Vec<f64>,
    vecs: CMatrix,
    thresh: f64,
}

impl Support {
    fn of(m: &CMatrix) -> Self {
        let (vals, vecs) = linalg::eigh(m);
        let top = vals.last().copied().unwrap_or(0.0).max(0.0);
        Self {
            vals,
            vecs,
            thresh: SUPPORT_REL_TOL * top,
        }
    }

    /// Weight of `ρ` outside the support, relative to `tr ρ`.
    fn leakage(&self, rho: &CMatrix) -> f64 {
        let mut out = 0.0;
        for (j, &l) in self.vals.iter().enumerate() {
            if l <= self.thresh {
                let v = self.vecs.column(j);
                out += (v.adjoint() * rho * v)[(0, 0)].re;
            }
        }
        out
    }

    fn contains(&self, rho: &CMatrix) -> bool {
        // supp ρ ⊆ supp σ  ⟺  ρ has no weight on ker σ
        let scale = linalg::lambda_max(rho).max(0.0);
        self.leakage(rho) <= SUPPORT_REL_TOL * scale.max(f64::MIN_POSITIVE) * self.vals.len() as f64
    }

    fn log(&self) -> CMatrix {
        let logs: Vec<f64> = self
            .vals
            .iter()
            .map(|&l| if l > self.thresh { l.ln() } else { 0.0 })
            .collect();
        linalg::from_spectrum(&logs, &self.vecs)
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::DimensionMismatch { expected: a, got: b })
    } else {
        Ok(())
    }
}

/// `D(ρ‖σ) = tr ρ log ρ − tr ρ log σ` on raw PSD matrices.
pub fn relative_entropy_raw(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let supp = Support::of(sigma);
    if linalg::trace_re(rho) <= 0.0 {
        return 0.0;
    }
    if !supp.contains(rho) {
        return f64::INFINITY;
    }
    let neg_h = linalg::eigvalsh(rho).into_iter().map(xlogx).sum::<f64>();
    neg_h - linalg::inner_re(&supp.log(), rho)
}

pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<EntropyValue> {
    same_dim(rho.dim(), sigma.dim())?;
    Ok(EntropyValue::nats(relative_entropy_raw(rho.matrix(), sigma.matrix())))
}

/// `log λ_max(σ^{-1/2} ρ σ^{-1/2})` on supp σ; `+∞` if supp ρ ⊄ supp σ.
pub fn max_relative_entropy_raw(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let supp = Support::of(sigma);
    if !supp.contains(rho) {
        return f64::INFINITY;
    }
    let inv: Vec<f64> = supp
        .vals
        .iter()
        .map(|&l| if l > supp.thresh { 1.0 / l.sqrt() } else { 0.0 })
        .collect();
    let s = linalg::from_spectrum(&inv, &supp.vecs);
    let lmax = linalg::lambda_max(&(&s * rho * &s));
    if lmax <= 0.0 {
        f64::NEG_INFINITY
    } else {
        lmax.ln()
    }
}

pub fn max_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<EntropyValue> {
    same_dim(rho.dim(), sigma.dim())?;
    Ok(EntropyValue::nats(max_relative_entropy_raw(rho.matrix(), sigma.matrix())))
}

/// `H(X|B) = −Σ_x D(ω_B^x ‖ ω_B)`.
pub fn cond_vn_cq(omega: &CqState) -> EntropyValue {
    let marginal = omega.marginal_b();
    let supp = Support::of(&marginal);
    let log_b = supp.log();
    let value: f64 = omega
        .ops()
        .map(|op| {
            let neg_h: f64 = linalg::eigvalsh(op).into_iter().map(xlogx).sum();
            -(neg_h - linalg::inner_re(&log_b, op))
        })
        .sum();
    EntropyValue::nats(value)
}

/// `H(A|B) = H(AB) − H(B)` for a state on `A ⊗ B`.
pub fn cond_vn(rho_ab: &CMatrix, dim_a: usize, dim_b: usize) -> f64 {
    let rho_b = linalg::partial_trace(rho_ab, &[dim_a, dim_b], &[1]);
    vn_raw(rho_ab) - vn_raw(&rho_b)
}

pub fn shannon(p: &[f64]) -> Result<EntropyValue> {
    check_probabilities(p, 1e-9)?;
    Ok(EntropyValue::nats(-p.iter().map(|&x| xlogx(x)).sum::<f64>()))
}

fn check_probabilities(p: &[f64], sum_tol: f64) -> Result<()> {
    if let Some(&neg) = p.iter().find(|&&x| x < -1e-12) {
        return Err(Error::InvalidArgument(format!("negative probability {neg}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > sum_tol {
        return Err(Error::Normalization(format!("probabilities sum to {total}")));
    }
    Ok(())
}

/// Density sampled at grid points, integrated by the midpoint rule.
fn check_density(density: &[f64], dq: f64) -> Result<()> {
    if !(dq > 0.0) {
        return Err(Error::InvalidArgument(format!("grid spacing {dq} must be positive")));
    }
    if let Some(&neg) = density.iter().find(|&&x| x < -1e-12) {
        return Err(Error::InvalidArgument(format!("negative density {neg}")));
    }
    let total: f64 = density.iter().sum::<f64>() * dq;
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Normalization(format!("density integrates to {total}")));
    }
    Ok(())
}

/// `h = −∫ p log p`.
pub fn differential_entropy(density: &[f64], dq: f64) -> Result<EntropyValue> {
    check_density(density, dq)?;
    Ok(EntropyValue::nats(-dq * density.iter().map(|&p| xlogx(p)).sum::<f64>()))
}

/// `(h_min, h_max) = (−log ‖p‖_∞, 2 log ∫ √p)`.
pub fn classical_hmin_hmax(density: &[f64], dq: f64) -> Result<(EntropyValue, EntropyValue)> {
    check_density(density, dq)?;
    let peak = density.iter().copied().fold(0.0, f64::max);
    let root: f64 = dq * density.iter().map(|&p| p.max(0.0).sqrt()).sum::<f64>();
    Ok((EntropyValue::nats(-peak.ln()), EntropyValue::nats(2.0 * root.ln())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, outer, CVector};
    use std::f64::consts::{E, PI};

    fn plus() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        outer(&CVector::from_column_slice(&[c(s, 0.0), c(s, 0.0)]))
    }

    fn proj(k: usize) -> CMatrix {
        outer(&linalg::basis(2, k))
    }

    /// binary Shannon entropy in bits
    fn h2(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn von_neumann_examples() {
        let pure = DensityMatrix::new(plus()).unwrap();
        assert!(von_neumann(&pure).unwrap().value.abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(5);
        assert!((von_neumann(&mixed).unwrap().value - 5f64.ln()).abs() < 1e-12);
        let d = DensityMatrix::from_real_diag(&[0.75, 0.25]).unwrap();
        let bits = von_neumann(&d).unwrap().in_bits();
        assert!((bits - h2(0.25)).abs() < 1e-12);
        assert!((bits - 0.8113).abs() < 1e-4);
        let sub = DensityMatrix::from_real_diag(&[0.5, 0.25]).unwrap();
        assert!(von_neumann(&sub).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = DensityMatrix::from_real_diag(&[0.5, 0.5]).unwrap();
        let sigma = DensityMatrix::from_real_diag(&[0.75, 0.25]).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().value.abs() < 1e-12);
        let zero = DensityMatrix::new(proj(0)).unwrap();
        let one = DensityMatrix::new(proj(1)).unwrap();
        assert_eq!(relative_entropy(&zero, &one).unwrap().value, f64::INFINITY);
        // classical KL: ½ log(½/¾) + ½ log(½/¼)
        let kl = 0.5 * (0.5f64 / 0.75).log2() + 0.5 * (0.5f64 / 0.25).log2();
        let d = relative_entropy(&rho, &sigma).unwrap().in_bits();
        assert!((d - kl).abs() < 1e-12);
        assert!((d - 0.2075).abs() < 1e-4);
    }

    #[test]
    fn max_relative_entropy_examples() {
        let rho = DensityMatrix::from_real_diag(&[0.3, 0.7]).unwrap();
        assert!(max_relative_entropy(&rho, &rho).unwrap().value.abs() < 1e-12);
        let scaled = DensityMatrix::new(rho.matrix().scale(0.25)).unwrap();
        let v = max_relative_entropy(&rho, &scaled).unwrap().value;
        assert!((v - 4f64.ln()).abs() < 1e-12);
        let p = DensityMatrix::new(plus()).unwrap();
        let v = max_relative_entropy(&p, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((v.in_bits() - 1.0).abs() < 1e-12);
        let zero = DensityMatrix::new(proj(0)).unwrap();
        let one = DensityMatrix::new(proj(1)).unwrap();
        assert_eq!(max_relative_entropy(&zero, &one).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn cond_vn_cq_examples() {
        let orth = CqState::from_ops(vec![proj(0).scale(0.5), proj(1).scale(0.5)]).unwrap();
        assert!(cond_vn_cq(&orth).value.abs() < 1e-12);

        let half_mixed = linalg::identity(2).scale(0.25);
        let product = CqState::from_ops(vec![half_mixed.clone(), half_mixed]).unwrap();
        assert!((cond_vn_cq(&product).in_bits() - 1.0).abs() < 1e-12);

        let bb84 = CqState::from_ops(vec![proj(0).scale(0.5), plus().scale(0.5)]).unwrap();
        let direct = cond_vn_cq(&bb84).in_bits();
        // oracle: H(XB) − H(B) on the 4×4 block-diagonal embedding
        let oracle = (vn_raw(&bb84.block_diagonal()) - vn_raw(&bb84.marginal_b())) / LN_2;
        assert!((direct - oracle).abs() < 1e-12);
        // H(XB) = 1, H(B) = h₂(cos²(π/8)) ≈ 0.6009
        assert!((direct - 0.3991).abs() < 1e-4);
    }

    #[test]
    fn shannon_examples() {
        assert!((shannon(&[0.25; 4]).unwrap().in_bits() - 2.0).abs() < 1e-12);
        assert_eq!(shannon(&[1.0, 0.0, 0.0]).unwrap().value, 0.0);
        assert!(shannon(&[1.1, -0.1]).is_err());
        assert!(shannon(&[0.5, 0.4]).is_err());
    }

    fn gaussian_density(sigma: f64, half_width: f64, n: usize) -> (Vec<f64>, f64) {
        let dq = 2.0 * half_width / n as f64;
        let dens = (0..n)
            .map(|i| {
                let q = -half_width + (i as f64 + 0.5) * dq;
                (-q * q / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt()
            })
            .collect();
        (dens, dq)
    }

    #[test]
    fn differential_entropy_of_gaussian() {
        let (dens, dq) = gaussian_density(1.0, 20.0, 4096);
        let h = differential_entropy(&dens, dq).unwrap().value;
        assert!((h - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-6);
        // point mass on one cell of width 1
        let h0 = differential_entropy(&[0.0, 1.0, 0.0], 1.0).unwrap().value;
        assert_eq!(h0, 0.0);
    }

    #[test]
    fn renyi_extremes_of_gaussian() {
        let (dens, dq) = gaussian_density(1.0, 20.0, 4096);
        let (hmin, hmax) = classical_hmin_hmax(&dens, dq).unwrap();
        // midpoint grid does not sample q = 0 exactly: peak is at q = ±dq/2
        let peak = (-(dq / 2.0).powi(2) / 2.0).exp() / (2.0 * PI).sqrt();
        assert!((hmin.value + peak.ln()).abs() < 1e-12);
        assert!((hmin.value - 0.5 * (2.0 * PI).ln()).abs() < 2e-5);
        assert!((hmax.value - (2.0 * (2.0 * PI).sqrt()).ln()).abs() < 1e-9);
        let h = differential_entropy(&dens, dq).unwrap().value;
        assert!(hmin.value <= h && h <= hmax.value);

        let uniform = vec![1.0; 1000];
        let (a, b) = classical_hmin_hmax(&uniform, 1e-3).unwrap();
        assert!(a.value.abs() < 1e-12 && b.value.abs() < 1e-9);
    }

    #[test]
    fn entropy_value_serializes_infinity() {
        let s = serde_json::to_string(&EntropyValue::infinity().to(Base::Bits)).unwrap();
        assert_eq!(s, r#"{"value":"inf","base":"bits"}"#);
        let s = serde_json::to_string(&EntropyValue::bits(1.5)).unwrap();
        assert_eq!(s, r#"{"value":1.5,"base":"bits"}"#);
    }

    #[test]
    fn base_round_trip() {
        let v = EntropyValue::nats(2.0);
        assert!((v.to(Base::Bits).to(Base::Nats).value - 2.0).abs() < 1e-15);
        assert_eq!("bits".parse::<Base>().unwrap(), Base::Bits);
    }
}
