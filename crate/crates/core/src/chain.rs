//! Weighted open chains and the Krawtchouk family.
//!
//! A chain with sites 0..=N is described by hoppings J_0..J_{N-1} and on-site
//! fields B_0..B_N. Its one-particle matrix has diagonal −B_n and
//! off-diagonal J_n. The sign of B is unrestricted: the Krawtchouk chain at
//! p = 1/2 already has B_n < 0.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{eig_sym_tridiagonal, Matrix, SpectralBasis, SymTridiagonal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChain", into = "RawChain")]
pub struct ChainSpec {
    hopping: Vec<f64>,
    onsite: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawChain {
    #[serde(rename = "J")]
    hopping: Vec<f64>,
    #[serde(rename = "B")]
    onsite: Vec<f64>,
}

impl TryFrom<RawChain> for ChainSpec {
    type Error = crate::Error;

    fn try_from(raw: RawChain) -> Result<Self> {
        ChainSpec::new(raw.hopping, raw.onsite)
    }
}

impl From<ChainSpec> for RawChain {
    fn from(spec: ChainSpec) -> Self {
        RawChain {
            hopping: spec.hopping,
            onsite: spec.onsite,
        }
    }
}

impl ChainSpec {
    pub fn new(hopping: Vec<f64>, onsite: Vec<f64>) -> Result<Self> {
        if onsite.is_empty() {
            return invalid("chain needs at least one site");
        }
        if hopping.len() + 1 != onsite.len() {
            return invalid(format!(
                "{} hoppings do not fit {} sites",
                hopping.len(),
                onsite.len()
            ));
        }
        if let Some((n, j)) = hopping.iter().enumerate().find(|(_, j)| !(**j > 0.0) || !j.is_finite()) {
            return invalid(format!("hopping J_{n} = {j} must be positive and finite"));
        }
        if onsite.iter().any(|b| !b.is_finite()) {
            return invalid("on-site fields must be finite");
        }
        Ok(Self { hopping, onsite })
    }

    /// Homogeneous chain with hopping `j` and field `b` on `n_sites` sites.
    pub fn uniform(n_sites: usize, j: f64, b: f64) -> Result<Self> {
        Self::new(vec![j; n_sites.saturating_sub(1)], vec![b; n_sites])
    }

    pub fn n_sites(&self) -> usize {
        self.onsite.len()
    }

    pub fn hopping(&self) -> &[f64] {
        &self.hopping
    }

    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }
}

/// Parameters of the Krawtchouk chain on sites 0..=N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrawtchoukParams {
    n: usize,
    p: f64,
}

impl KrawtchoukParams {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n < 1 {
            return invalid("Krawtchouk chain needs N >= 1");
        }
        if !(p > 0.0 && p < 1.0) {
            return invalid(format!("p = {p} must lie in (0, 1)"));
        }
        Ok(Self { n, p })
    }

    /// N, the largest site index.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn hop(&self, n: usize) -> f64 {
        let big_n = self.n as f64;
        let n = n as f64;
        ((big_n - n) * (n + 1.0) * self.p * (1.0 - self.p)).sqrt()
    }

    fn field(&self, n: usize) -> f64 {
        -(self.n as f64 * self.p + n as f64 * (1.0 - 2.0 * self.p))
    }

    /// Exact one-particle energies ω_k = k.
    pub fn energies(&self) -> Vec<f64> {
        (0..=self.n).map(|k| k as f64).collect()
    }

    /// Exact eigenvalues λ_n = n of the position-diagonal partner operator.
    pub fn dual_eigenvalues(&self) -> Vec<f64> {
        self.energies()
    }
}

pub fn krawtchouk_chain(params: &KrawtchoukParams) -> ChainSpec {
    let hopping = (0..params.n).map(|n| params.hop(n)).collect();
    let onsite = (0..=params.n).map(|n| params.field(n)).collect();
    ChainSpec { hopping, onsite }
}

/// One-particle matrix Λ: diagonal −B_n, off-diagonal J_n.
pub fn jacobi_matrix(spec: &ChainSpec) -> SymTridiagonal {
    SymTridiagonal::new(spec.onsite.iter().map(|b| -b).collect(), spec.hopping.clone())
        .expect("ChainSpec invariants guarantee a valid tridiagonal matrix")
}

/// Eigenbasis of Λ. Column k holds φ_n(k) = ⟨n|ω_k⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBasis {
    basis: SpectralBasis,
    source: ChainSpec,
}

impl EnergyBasis {
    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn source(&self) -> &ChainSpec {
        &self.source
    }

    pub fn energies(&self) -> &[f64] {
        self.basis.eigenvalues()
    }
}

pub fn energy_basis(spec: &ChainSpec) -> Result<EnergyBasis> {
    let basis = eig_sym_tridiagonal(&jacobi_matrix(spec))?;
    Ok(EnergyBasis {
        basis,
        source: spec.clone(),
    })
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (1..=k)
        .map(|i| ((n - k + i) as f64 / i as f64).ln())
        .sum()
}

/// φ_0(k), ..., φ_N(k) for one level k.
///
/// The three-term recurrence of Λ is run forward from the n = 0 seed and
/// backward from the n = N seed; each direction is only stable until it
/// leaves the oscillatory region, so the two runs are spliced where both are
/// large.
pub fn krawtchouk_level(k: usize, params: &KrawtchoukParams) -> Result<Vec<f64>> {
    let big_n = params.n;
    if k > big_n {
        return invalid(format!("level {k} out of range 0..={big_n}"));
    }
    let p = params.p;
    let q = 1.0 - p;
    let kf = k as f64;
    let lnc = ln_binomial(big_n, k);
    let hop: Vec<f64> = (0..big_n).map(|n| params.hop(n)).collect();
    // (ω_k + B_n), the coefficient of φ_n in the recurrence
    let shift: Vec<f64> = (0..=big_n).map(|n| kf + params.field(n)).collect();

    let mut fwd = vec![0.0; big_n + 1];
    fwd[0] = (0.5 * (kf * p.ln() + (big_n - k) as f64 * q.ln() + lnc)).exp();
    fwd[1] = shift[0] * fwd[0] / hop[0];
    for n in 1..big_n {
        fwd[n + 1] = (shift[n] * fwd[n] - hop[n - 1] * fwd[n - 1]) / hop[n];
    }

    let mut bwd = vec![0.0; big_n + 1];
    let sign = if (big_n + k) % 2 == 0 { 1.0 } else { -1.0 };
    bwd[big_n] = sign * (0.5 * ((big_n - k) as f64 * p.ln() + kf * q.ln() + lnc)).exp();
    bwd[big_n - 1] = shift[big_n] * bwd[big_n] / hop[big_n - 1];
    for n in (1..big_n).rev() {
        bwd[n - 1] = (shift[n] * bwd[n] - hop[n] * bwd[n + 1]) / hop[n - 1];
    }

    let splice = (0..=big_n)
        .max_by(|&a, &b| {
            let ma = fwd[a].abs().min(bwd[a].abs());
            let mb = fwd[b].abs().min(bwd[b].abs());
            ma.total_cmp(&mb)
        })
        .unwrap_or(0);
    let mut out = fwd;
    out[splice + 1..].copy_from_slice(&bwd[splice + 1..]);
    Ok(out)
}

/// φ_n(k) for the Krawtchouk chain.
pub fn krawtchouk_wavefunction(n: usize, k: usize, params: &KrawtchoukParams) -> Result<f64> {
    if n > params.n {
        return invalid(format!("site {n} out of range 0..={}", params.n));
    }
    Ok(krawtchouk_level(k, params)?[n])
}

/// Matrix [φ_n(k)] with rows indexed by site and columns by level.
pub fn krawtchouk_wavefunctions(params: &KrawtchoukParams) -> Matrix {
    let size = params.n + 1;
    let mut m = Matrix::zeros(size, size);
    for k in 0..size {
        let col = krawtchouk_level(k, params).expect("level index is in range");
        for (n, v) in col.into_iter().enumerate() {
            m[(n, k)] = v;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    const HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn krawtchouk_small_chains() {
        let spec = krawtchouk_chain(&KrawtchoukParams::new(1, 0.5).unwrap());
        assert_eq!(spec.hopping(), &[0.5]);
        assert_eq!(spec.onsite(), &[-0.5, -0.5]);
        let lam = jacobi_matrix(&spec);
        assert_eq!(lam.diag(), &[0.5, 0.5]);
        assert_eq!(lam.offdiag(), &[0.5]);

        let spec = krawtchouk_chain(&KrawtchoukParams::new(2, 0.5).unwrap());
        for j in spec.hopping() {
            assert!((j - HALF).abs() < 1e-15);
        }

        let spec = krawtchouk_chain(&KrawtchoukParams::new(4, 0.5).unwrap());
        let s = 6f64.sqrt() / 2.0;
        for (got, want) in spec.hopping().iter().zip([1.0, s, s, 1.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_chain_matrix() {
        let spec = ChainSpec::uniform(3, 1.0, 0.0).unwrap();
        let lam = jacobi_matrix(&spec);
        assert_eq!(lam.diag(), &[0.0, 0.0, 0.0]);
        assert_eq!(lam.offdiag(), &[1.0, 1.0]);
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(KrawtchoukParams::new(4, 0.0).is_err());
        assert!(KrawtchoukParams::new(4, 1.0).is_err());
        assert!(KrawtchoukParams::new(0, 0.5).is_err());
        assert!(ChainSpec::new(vec![1.0, -1.0], vec![0.0; 3]).is_err());
        assert!(ChainSpec::new(vec![1.0], vec![0.0; 3]).is_err());
        let params = KrawtchoukParams::new(3, 0.4).unwrap();
        assert!(krawtchouk_wavefunction(4, 0, &params).is_err());
        assert!(krawtchouk_wavefunction(0, 4, &params).is_err());
    }

    #[test]
    fn wavefunction_seeds() {
        let params = KrawtchoukParams::new(7, 0.3).unwrap();
        let phi = krawtchouk_wavefunction(0, 0, &params).unwrap();
        assert!((phi - 0.7f64.powi(7).sqrt()).abs() < 1e-15);

        let params = KrawtchoukParams::new(1, 0.5).unwrap();
        let phi = krawtchouk_wavefunctions(&params);
        let expected = Matrix::from_row_slice(2, 2, &[HALF, HALF, -HALF, HALF]);
        assert!((phi - expected).amax() < 1e-15);
    }

    #[test]
    fn wavefunctions_are_orthonormal() {
        let params = KrawtchoukParams::new(6, 0.3).unwrap();
        let phi = krawtchouk_wavefunctions(&params);
        let gram = phi.transpose() * &phi;
        assert!((gram - Matrix::identity(7, 7)).amax() < 1e-13);
    }

    #[test]
    fn energy_basis_matches_closed_forms() {
        let spec = krawtchouk_chain(&KrawtchoukParams::new(1, 0.5).unwrap());
        let eb = energy_basis(&spec).unwrap();
        assert!((eb.energies()[0]).abs() < 1e-15);
        assert!((eb.energies()[1] - 1.0).abs() < 1e-15);

        let spec = krawtchouk_chain(&KrawtchoukParams::new(10, 0.5).unwrap());
        let eb = energy_basis(&spec).unwrap();
        for (k, w) in eb.energies().iter().enumerate() {
            assert!((w - k as f64).abs() < 1e-9);
        }

        let params = KrawtchoukParams::new(8, 0.4).unwrap();
        let eb = energy_basis(&krawtchouk_chain(&params)).unwrap();
        let phi = krawtchouk_wavefunctions(&params);
        for k in 0..=8 {
            let col = eb.basis().eigenvectors().column(k);
            let dot: f64 = col.dot(&phi.column(k));
            let sign = dot.signum();
            assert!((col - phi.column(k) * sign).amax() < 1e-9);
        }
    }

    #[test]
    fn json_round_trip_uses_j_and_b_keys() {
        let spec = ChainSpec::new(vec![1.0, 2.0], vec![0.5, -0.5, 0.0]).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"J":[1.0,2.0],"B":[0.5,-0.5,0.0]}"#);
        let back: ChainSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<ChainSpec>(r#"{"J":[-1.0],"B":[0,0]}"#).is_err());
    }
}
