//! Tridiagonal operators commuting with the chopped correlation matrix.
//!
//! Given the chain matrix Λ and a partner X that is diagonal in the position
//! basis (eigenvalues λ_n) and tridiagonal in the energy basis, the operator
//!
//! ```text
//! T̄ = {X, Λ} + μ X + ν Λ
//! ```
//!
//! is tridiagonal in both bases. Choosing μ = −(ω_K + ω_{K+1}) removes the
//! coupling between levels K and K+1 in the energy basis and
//! ν = −(λ_ℓ + λ_{ℓ+1}) removes the coupling between sites ℓ and ℓ+1, so T̄
//! commutes with both projectors and its leading block T commutes with
//! C = Π_S Π_E Π_S. T has a simple, well separated spectrum, which makes its
//! eigenvectors a stable route to the spectrum of C.

use std::ops::Range;

use crate::chain::{jacobi_matrix, krawtchouk_chain, EnergyBasis, KrawtchoukParams};
use crate::correlation::{clamp_occupations, ChoppedCorrelation};
use crate::error::{invalid, Error, Result};
use crate::linalg::{cluster_sorted, commutator_norm, eig_sym_dense, eig_sym_tridiagonal, Matrix, SymTridiagonal};

/// Maximum relative commutator norm accepted before using T's eigenvectors.
pub const COMMUTANT_TOLERANCE: f64 = 1e-8;

/// Relative eigenvalue gap of T below which eigenvectors are not trusted
/// individually.
pub const COMMUTANT_DEGENERACY_GAP: f64 = 1e-10;

/// Λ together with the eigenvalues of its position-diagonal partner X.
#[derive(Debug, Clone, PartialEq)]
pub struct BispectralPair {
    lambda: SymTridiagonal,
    x_diagonal: Vec<f64>,
    energies: Vec<f64>,
}

impl BispectralPair {
    pub fn new(lambda: SymTridiagonal, x_diagonal: Vec<f64>, energies: Vec<f64>) -> Result<Self> {
        let n = lambda.len();
        if x_diagonal.len() != n || energies.len() != n {
            return invalid(format!(
                "bispectral pair sizes differ: Λ {n}, X {}, energies {}",
                x_diagonal.len(),
                energies.len()
            ));
        }
        if energies.windows(2).any(|w| w[0] > w[1]) {
            return invalid("energies must be sorted ascending");
        }
        Ok(Self {
            lambda,
            x_diagonal,
            energies,
        })
    }

    /// Krawtchouk chain with λ_n = n and exact energies ω_k = k.
    pub fn krawtchouk(params: &KrawtchoukParams) -> Self {
        Self {
            lambda: jacobi_matrix(&krawtchouk_chain(params)),
            x_diagonal: params.dual_eigenvalues(),
            energies: params.energies(),
        }
    }

    /// Uses the numerically computed energies of an already diagonalized chain.
    pub fn from_energy_basis(basis: &EnergyBasis, x_diagonal: Vec<f64>) -> Result<Self> {
        Self::new(jacobi_matrix(basis.source()), x_diagonal, basis.energies().to_vec())
    }

    pub fn lambda(&self) -> &SymTridiagonal {
        &self.lambda
    }

    pub fn x_diagonal(&self) -> &[f64] {
        &self.x_diagonal
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }
}

/// {X, Λ} + μX + νΛ assembled entry by entry.
pub fn heun_operator(pair: &BispectralPair, mu: f64, nu: f64) -> SymTridiagonal {
    let x = &pair.x_diagonal;
    let diag = pair
        .lambda
        .diag()
        .iter()
        .zip(x)
        .map(|(&l, &xn)| 2.0 * xn * l + mu * xn + nu * l)
        .collect();
    let offdiag = pair
        .lambda
        .offdiag()
        .iter()
        .enumerate()
        .map(|(n, &j)| (x[n] + x[n + 1] + nu) * j)
        .collect();
    SymTridiagonal::new(diag, offdiag).expect("finite inputs give finite entries")
}

/// μ = −(ω_K + ω_{K+1}), ν = −(λ_ℓ + λ_{ℓ+1}).
pub fn fix_parameters(pair: &BispectralPair, ell: usize, fermi_index: usize) -> Result<(f64, f64)> {
    let last = pair.len() - 1;
    if fermi_index >= last {
        return invalid(format!("Fermi index {fermi_index} has no level above it (N = {last})"));
    }
    if ell >= last {
        return invalid(format!("cut {ell} has no site after it (N = {last})"));
    }
    let w = &pair.energies;
    let x = &pair.x_diagonal;
    Ok((-(w[fermi_index] + w[fermi_index + 1]), -(x[ell] + x[ell + 1])))
}

/// T̄ with the parameters fixed for one cut and one filling, and its leading
/// block T.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutantOperator {
    pub full: SymTridiagonal,
    pub restricted: SymTridiagonal,
    pub mu: f64,
    pub nu: f64,
    pub cut: usize,
    pub fermi_index: usize,
}

impl CommutantOperator {
    pub fn build(pair: &BispectralPair, ell: usize, fermi_index: usize) -> Result<Self> {
        let (mu, nu) = fix_parameters(pair, ell, fermi_index)?;
        let full = heun_operator(pair, mu, nu);
        let restricted = full.leading_block(ell + 1)?;
        Ok(Self {
            full,
            restricted,
            mu,
            nu,
            cut: ell,
            fermi_index,
        })
    }
}

/// Closed-form commutant of the p = 1/2 Krawtchouk chain:
/// T_nn = (N/2)(2n−2ℓ−1) − n(2K+1), T_{n−1,n} = (n−ℓ−1)√(n(N−n+1)).
pub fn krawtchouk_commutant_closed_form(n: usize, ell: usize, fermi_index: usize) -> Result<SymTridiagonal> {
    if ell >= n || fermi_index >= n {
        return invalid(format!("need ℓ, K < N = {n}, got ℓ = {ell}, K = {fermi_index}"));
    }
    let big_n = n as f64;
    let l = ell as f64;
    let k = fermi_index as f64;
    let diag = (0..=ell)
        .map(|i| {
            let i = i as f64;
            0.5 * big_n * (2.0 * i - 2.0 * l - 1.0) - i * (2.0 * k + 1.0)
        })
        .collect();
    let offdiag = (1..=ell)
        .map(|i| {
            let i = i as f64;
            (i - l - 1.0) * (i * (big_n - i + 1.0)).sqrt()
        })
        .collect();
    SymTridiagonal::new(diag, offdiag)
}

/// Result of fitting `target ≈ scale·source + shift·I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMatch {
    pub scale: f64,
    pub shift: f64,
    pub max_deviation: f64,
}

/// Least-squares affine relation between two tridiagonal matrices of equal
/// size. The shift only acts on the diagonal.
pub fn affine_match(source: &SymTridiagonal, target: &SymTridiagonal) -> Result<AffineMatch> {
    if source.len() != target.len() {
        return invalid("affine match needs equal sizes");
    }
    // normal equations for (scale, shift) over diagonal and off-diagonal entries
    let (mut saa, mut sa, mut sab, mut sb) = (0.0, 0.0, 0.0, 0.0);
    let nd = source.len() as f64;
    for (a, b) in source.diag().iter().zip(target.diag()) {
        saa += a * a;
        sa += a;
        sab += a * b;
        sb += b;
    }
    for (a, b) in source.offdiag().iter().zip(target.offdiag()) {
        saa += 2.0 * a * a;
        sab += 2.0 * a * b;
    }
    let det = saa * nd - sa * sa;
    let (scale, shift) = if det.abs() > 1e-12 * saa.max(1.0) * nd {
        ((sab * nd - sa * sb) / det, (saa * sb - sa * sab) / det)
    } else {
        (1.0, (sb - sa) / nd)
    };
    let dev_diag = source
        .diag()
        .iter()
        .zip(target.diag())
        .map(|(a, b)| (scale * a + shift - b).abs());
    let dev_off = source
        .offdiag()
        .iter()
        .zip(target.offdiag())
        .map(|(a, b)| (scale * a - b).abs());
    let max_deviation = dev_diag.chain(dev_off).fold(0.0, f64::max);
    Ok(AffineMatch {
        scale,
        shift,
        max_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegeneracyPolicy {
    /// Diagonalize C inside near-degenerate eigenspaces of T.
    Fallback,
    /// Fail with [`Error::DegenerateCommutant`].
    Strict,
}

/// Spectrum of C recovered from the eigenvectors of T.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutantSpectrum {
    /// T eigenvalue paired with each occupation, in the same order.
    pub t_eigenvalues: Vec<f64>,
    /// Eigenvalues of C sorted descending, clamped into [0, 1].
    pub occupations: Vec<f64>,
    pub commutator_norm: f64,
    /// Smallest gap between consecutive T eigenvalues over the spectral
    /// width; infinite for a 1×1 block.
    pub min_relative_gap: f64,
    /// Index ranges (in ascending T order) where C was diagonalized directly.
    pub fallback_clusters: Vec<Range<usize>>,
}

pub fn spectrum_of_c_via_t(
    commutant: &CommutantOperator,
    c: &ChoppedCorrelation,
    policy: DegeneracyPolicy,
) -> Result<CommutantSpectrum> {
    let t = &commutant.restricted;
    if t.len() != c.dim() {
        return invalid(format!("T has size {} but C has size {}", t.len(), c.dim()));
    }
    let norm = commutator_norm(&t.to_dense(), c.matrix())?;
    if norm > COMMUTANT_TOLERANCE {
        return Err(Error::NotACommutant { norm });
    }
    let basis = eig_sym_tridiagonal(t)?;
    let values = basis.eigenvalues();
    let vectors = basis.eigenvectors();
    let width = basis.spectral_width();
    let min_relative_gap = if values.len() < 2 || width == 0.0 {
        f64::INFINITY
    } else {
        values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min) / width
    };

    let cmat = c.matrix();
    let mut raw = Vec::with_capacity(values.len());
    let mut fallback_clusters = Vec::new();
    for cluster in cluster_sorted(values, COMMUTANT_DEGENERACY_GAP) {
        if cluster.len() == 1 {
            let v = vectors.column(cluster.start);
            raw.push((values[cluster.start], (v.transpose() * cmat * v)[(0, 0)]));
            continue;
        }
        if policy == DegeneracyPolicy::Strict {
            return Err(Error::DegenerateCommutant { gap: min_relative_gap });
        }
        let block: Matrix = vectors.columns(cluster.start, cluster.len()).into_owned();
        let projected = block.transpose() * cmat * &block;
        let inner = eig_sym_dense(&projected)?;
        for (i, &nu) in inner.eigenvalues().iter().enumerate() {
            raw.push((values[cluster.start + i], nu));
        }
        fallback_clusters.push(cluster);
    }

    raw.sort_by(|a, b| b.1.total_cmp(&a.1));
    let occupations = clamp_occupations(&raw.iter().map(|r| r.1).collect::<Vec<_>>())?;
    Ok(CommutantSpectrum {
        t_eigenvalues: raw.iter().map(|r| r.0).collect(),
        occupations,
        commutator_norm: norm,
        min_relative_gap,
        fallback_clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_partner_doubles_lambda() {
        let lambda = SymTridiagonal::new(vec![0.3, -1.0, 2.0], vec![0.5, 0.7]).unwrap();
        let pair = BispectralPair::new(lambda.clone(), vec![1.0; 3], vec![0.0, 1.0, 2.0]).unwrap();
        let t = heun_operator(&pair, 0.0, 0.0);
        assert_eq!(t.diag(), &[0.6, -2.0, 4.0]);
        assert_eq!(t.offdiag(), &[1.0, 1.4]);
    }

    #[test]
    fn diagonal_lambda_stays_diagonal() {
        let lambda = SymTridiagonal::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.0]).unwrap();
        let pair = BispectralPair::new(lambda, vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]).unwrap();
        let t = heun_operator(&pair, 0.0, 0.0);
        assert_eq!(t.diag(), &[2.0, 8.0, 18.0]);
        assert_eq!(t.offdiag(), &[0.0, 0.0]);
    }

    #[test]
    fn krawtchouk_n2_offdiagonal() {
        let pair = BispectralPair::krawtchouk(&KrawtchoukParams::new(2, 0.5).unwrap());
        let t = heun_operator(&pair, 0.0, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((t.offdiag()[0] - h).abs() < 1e-15);
        assert!((t.offdiag()[1] - 3.0 * h).abs() < 1e-15);
    }

    #[test]
    fn parameters_and_decoupling() {
        let pair = BispectralPair::krawtchouk(&KrawtchoukParams::new(9, 0.5).unwrap());
        assert_eq!(fix_parameters(&pair, 2, 3).unwrap(), (-7.0, -5.0));
        assert_eq!(fix_parameters(&pair, 0, 0).unwrap(), (-1.0, -1.0));
        assert!(fix_parameters(&pair, 9, 0).is_err());
        assert!(fix_parameters(&pair, 0, 9).is_err());
        let op = CommutantOperator::build(&pair, 4, 2).unwrap();
        assert!(op.full.offdiag()[4].abs() <= 1e-12);
        assert_eq!(op.restricted.len(), 5);
    }

    #[test]
    fn closed_form_entries() {
        let t = krawtchouk_commutant_closed_form(4, 1, 1).unwrap();
        assert_eq!(t.diag(), &[-6.0, -5.0]);
        assert_eq!(t.offdiag(), &[-2.0]);
        assert!(krawtchouk_commutant_closed_form(4, 4, 1).is_err());
    }

    #[test]
    fn closed_form_matches_construction() {
        for n in 2..=12 {
            let pair = BispectralPair::krawtchouk(&KrawtchoukParams::new(n, 0.5).unwrap());
            for ell in 0..n {
                for k in 0..n {
                    let built = CommutantOperator::build(&pair, ell, k).unwrap();
                    let closed = krawtchouk_commutant_closed_form(n, ell, k).unwrap();
                    let fit = affine_match(&built.restricted, &closed).unwrap();
                    assert!(fit.max_deviation <= 1e-9, "N={n} ℓ={ell} K={k}: {fit:?}");
                }
            }
        }
    }

    #[test]
    fn affine_match_recovers_known_relation() {
        let a = SymTridiagonal::new(vec![1.0, 4.0, -2.0], vec![0.5, 1.5]).unwrap();
        let b = SymTridiagonal::new(vec![3.0 * 1.0 - 2.0, 3.0 * 4.0 - 2.0, 3.0 * -2.0 - 2.0], vec![1.5, 4.5]).unwrap();
        let fit = affine_match(&a, &b).unwrap();
        assert!((fit.scale - 3.0).abs() < 1e-12);
        assert!((fit.shift + 2.0).abs() < 1e-12);
        assert!(fit.max_deviation < 1e-12);
    }
}
