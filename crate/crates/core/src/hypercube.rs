//! Free fermions on the hypercube Q_d.
//!
//! Vertices are d-bit strings stored as integers 0..2^d, the reference vertex
//! is 0. The adjacency matrix is the sum of single-bit flips (σ_x in every
//! tensor slot) and the dual adjacency is the diagonal matrix
//! A*_vv = d − 2·popcount(v) (σ_z in every slot). Together they span a
//! representation of su(2) whose irreducible blocks are weighted chains, so
//! the entanglement of the weight-≤ℓ ball reduces to a sum over spin-j chains.
//!
//! Two independent routes are provided: a dense 2^d-dimensional computation
//! and the block decomposition.

use nalgebra::DVector;

use crate::chain::{energy_basis, ChainSpec};
use crate::correlation::{
    chop_to, entropy_from_occupations, occupied_projector, von_neumann_entropy, ChoppedCorrelation, FermiFilling,
    Provenance,
};
use crate::error::{invalid, Error, Result};
use crate::heun::{spectrum_of_c_via_t, BispectralPair, CommutantOperator, DegeneracyPolicy};
use crate::linalg::{eig_sym_dense, Matrix, Projector, SpectralBasis};

/// Largest dimension for matrix-free operations.
pub const MAX_DIM: usize = 14;
/// Largest dimension for which dense 2^d × 2^d matrices are formed.
pub const MAX_DENSE_DIM: usize = 12;

/// Adjacency and dual adjacency of Q_d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphOperators {
    dim: usize,
}

pub fn hypercube_operators(dim: usize) -> Result<GraphOperators> {
    if !(1..=MAX_DIM).contains(&dim) {
        return invalid(format!("hypercube dimension {dim} outside 1..={MAX_DIM}"));
    }
    Ok(GraphOperators { dim })
}

pub fn weight(v: usize) -> usize {
    v.count_ones() as usize
}

impl GraphOperators {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        1 << self.dim
    }

    fn require_dense(&self) -> Result<()> {
        if self.dim > MAX_DENSE_DIM {
            return invalid(format!(
                "dense hypercube matrices are limited to d <= {MAX_DENSE_DIM}, got {}",
                self.dim
            ));
        }
        Ok(())
    }

    pub fn adjacency_dense(&self) -> Result<Matrix> {
        self.require_dense()?;
        let n = self.vertex_count();
        let mut a = Matrix::zeros(n, n);
        for v in 0..n {
            for b in 0..self.dim {
                a[(v, v ^ (1 << b))] = 1.0;
            }
        }
        Ok(a)
    }

    /// Diagonal of A*: d − 2·popcount(v).
    pub fn dual_diagonal(&self) -> Vec<f64> {
        (0..self.vertex_count())
            .map(|v| self.dim as f64 - 2.0 * weight(v) as f64)
            .collect()
    }

    pub fn dual_dense(&self) -> Result<Matrix> {
        self.require_dense()?;
        Ok(Matrix::from_diagonal(&DVector::from_vec(self.dual_diagonal())))
    }

    /// A·x without forming A.
    pub fn apply_adjacency(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.vertex_count();
        if x.len() != n {
            return invalid(format!("vector of length {} applied to Q_{}", x.len(), self.dim));
        }
        Ok(DVector::from_fn(n, |v, _| (0..self.dim).map(|b| x[v ^ (1 << b)]).sum()))
    }

    /// Vertices of weight ≤ ℓ in increasing order.
    pub fn ball(&self, ell: usize) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| weight(v) <= ell).collect()
    }
}

/// Uniform superposition of the weight-n vertices.
pub fn column_state(dim: usize, n: usize) -> Result<DVector<f64>> {
    let ops = hypercube_operators(dim)?;
    if n > dim {
        return invalid(format!("column {n} out of range 0..={dim}"));
    }
    let amp = 1.0 / (binomial(dim, n) as f64).sqrt();
    Ok(DVector::from_fn(ops.vertex_count(), |v, _| if weight(v) == n { amp } else { 0.0 }))
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Checks that every requested energy is an eigenvalue d − 2k of A and
/// returns them as sorted distinct integers.
pub fn energy_set(dim: usize, energies: &[f64]) -> Result<Vec<i64>> {
    let mut out = Vec::with_capacity(energies.len());
    for &e in energies {
        let r = e.round();
        let ri = r as i64;
        if (e - r).abs() > 1e-9 || ri.abs() > dim as i64 || (dim as i64 - ri) % 2 != 0 {
            return invalid(format!("{e} is not an eigenvalue of the Q_{dim} adjacency matrix"));
        }
        out.push(ri);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Strictly negative adjacency eigenvalues, plus 0 for even d when
/// `include_zero` is set.
pub fn half_filling_energies(dim: usize, include_zero: bool) -> Vec<f64> {
    (0..=dim)
        .map(|k| dim as f64 - 2.0 * k as f64)
        .filter(|&e| e < 0.0 || (include_zero && e == 0.0))
        .rev()
        .collect()
}

/// Dense eigendecomposition of A with its eigenvalue clusters labelled by
/// the exact eigenvalue d − 2k.
#[derive(Debug, Clone)]
pub struct HypercubeSpectrum {
    ops: GraphOperators,
    basis: SpectralBasis,
    /// (exact eigenvalue, first column, one past the last column)
    levels: Vec<(i64, usize, usize)>,
}

impl HypercubeSpectrum {
    pub fn new(ops: GraphOperators) -> Result<Self> {
        let basis = eig_sym_dense(&ops.adjacency_dense()?)?;
        let d = ops.dim as i64;
        let mut levels = Vec::new();
        for cluster in basis.clusters() {
            let vals = &basis.eigenvalues()[cluster.clone()];
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let exact = mean.round() as i64;
            let k = (d - exact) / 2;
            if (mean - exact as f64).abs() > 1e-8
                || (d - exact) % 2 != 0
                || vals.len() as u128 != binomial(ops.dim, k as usize)
            {
                return Err(Error::NumericalBreakdown(format!(
                    "adjacency eigenvalue cluster at {mean} of size {} does not match the Q_{d} spectrum",
                    vals.len()
                )));
            }
            levels.push((exact, cluster.start, cluster.end));
        }
        Ok(Self { ops, basis, levels })
    }

    pub fn ops(&self) -> &GraphOperators {
        &self.ops
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    /// Distinct eigenvalues ascending.
    pub fn distinct_eigenvalues(&self) -> Vec<i64> {
        self.levels.iter().map(|l| l.0).collect()
    }

    fn filling(&self, energies: &[f64]) -> Result<FermiFilling> {
        let wanted = energy_set(self.ops.dim, energies)?;
        let occupied = self
            .levels
            .iter()
            .filter(|l| wanted.contains(&l.0))
            .flat_map(|l| l.1..l.2)
            .collect();
        FermiFilling::allow_trivial(self.basis.eigenvalues(), occupied)
    }
}

/// Π_SE (spectral projector of A onto the energies in `energies`) and
/// Π_SV (diagonal indicator of weight ≤ ℓ).
pub fn graph_projectors(spectrum: &HypercubeSpectrum, energies: &[f64], ell: usize) -> Result<(Projector, Projector)> {
    let ops = spectrum.ops;
    if ell > ops.dim {
        return invalid(format!("cut {ell} exceeds dimension {}", ops.dim));
    }
    let filling = spectrum.filling(energies)?;
    let pi_se = occupied_projector(&spectrum.basis, &filling)?;
    let diag: Vec<f64> = (0..ops.vertex_count())
        .map(|v| if weight(v) <= ell { 1.0 } else { 0.0 })
        .collect();
    let rank = diag.iter().filter(|&&x| x == 1.0).count();
    let pi_sv = Projector::from_matrix(Matrix::from_diagonal(&DVector::from_vec(diag)), rank)?;
    Ok((pi_se, pi_sv))
}

/// Π_SV Π_SE Π_SV on the coordinates of the weight-≤ℓ ball.
pub fn chopped_correlation_graph(
    spectrum: &HypercubeSpectrum,
    energies: &[f64],
    ell: usize,
) -> Result<ChoppedCorrelation> {
    let ops = spectrum.ops;
    if ell > ops.dim {
        return invalid(format!("cut {ell} exceeds dimension {}", ops.dim));
    }
    let filling = spectrum.filling(energies)?;
    let pi_se = occupied_projector(&spectrum.basis, &filling)?;
    chop_to(&pi_se, &ops.ball(ell), ell, filling, Provenance::Hypercube { dim: ops.dim })
}

/// Entropy of the weight-≤ℓ ball by dense diagonalization.
pub fn direct_entropy(spectrum: &HypercubeSpectrum, energies: &[f64], ell: usize) -> Result<f64> {
    von_neumann_entropy(&chopped_correlation_graph(spectrum, energies, ell)?)
}

/// Σ_{k=0}^{upto} Π_{j≠k} (2j − d − M) / (2(j − k)).
///
/// With M = A this is the projector onto the eigenvalues 2k − d, k ≤ upto.
pub fn product_formula_projector(m: &Matrix, dim: usize, upto: usize) -> Matrix {
    let n = m.nrows();
    let id = Matrix::identity(n, n);
    let mut total = Matrix::zeros(n, n);
    for k in 0..=upto.min(dim) {
        let mut term = id.clone();
        for j in (0..=dim).filter(|&j| j != k) {
            let factor = (&id * (2.0 * j as f64 - dim as f64) - m) / (2.0 * (j as f64 - k as f64));
            term = term * factor;
        }
        total += term;
    }
    total
}

/// {A, A*} + μA* + νA.
pub fn generalized_heun_graph(ops: &GraphOperators, mu: f64, nu: f64) -> Result<Matrix> {
    let a = ops.adjacency_dense()?;
    let dual = ops.dual_diagonal();
    let n = ops.vertex_count();
    Ok(Matrix::from_fn(n, n, |u, v| {
        let off = a[(u, v)] * (dual[u] + dual[v] + nu);
        if u == v {
            off + mu * dual[u]
        } else {
            off
        }
    }))
}

/// μ = −(θ_K + θ_{K+1}) over the ascending distinct eigenvalues of A and
/// ν = −(λ_ℓ + λ_{ℓ+1}) with λ_i = d − 2i the dual eigenvalue on weight i.
pub fn graph_heun_parameters(dim: usize, energies: &[f64], ell: usize) -> Result<(f64, f64)> {
    let set = energy_set(dim, energies)?;
    let d = dim as i64;
    let count = set.len();
    let lowest: Vec<i64> = (0..count as i64).map(|k| -d + 2 * k).collect();
    if set != lowest {
        return Err(Error::DegenerateFermiLevel {
            index: count,
            gap: 2.0,
        });
    }
    if count == 0 || count > dim {
        return invalid("filling must occupy a non-empty proper set of eigenvalues");
    }
    if ell >= dim {
        return invalid(format!("cut {ell} leaves no complement in Q_{dim}"));
    }
    let k = (count - 1) as i64;
    let mu = -((-d + 2 * k) + (-d + 2 * k + 2)) as f64;
    let l = ell as i64;
    let nu = -((d - 2 * l) + (d - 2 * l - 2)) as f64;
    Ok((mu, nu))
}

/// One spin-j block of the su(2) decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrepBlock {
    /// 2j.
    pub two_j: usize,
    pub multiplicity: u128,
    /// ℓ − (d/2 − j); negative when the ball misses the block.
    pub ell_j: i64,
    /// Occupied levels of the block chain (energy −2j + 2k for level k).
    pub occupied: Vec<usize>,
}

impl IrrepBlock {
    pub fn chain_length(&self) -> usize {
        self.two_j + 1
    }

    /// Highest occupied level index, if any level is occupied.
    pub fn fermi_index(&self) -> Option<usize> {
        self.occupied.last().copied()
    }

    /// Block chain with couplings √((n+1)(2j−n)) and no on-site field.
    pub fn chain(&self) -> ChainSpec {
        spin_chain(self.two_j)
    }
}

pub fn spin_chain(two_j: usize) -> ChainSpec {
    let hopping = (0..two_j)
        .map(|n| (((n + 1) * (two_j - n)) as f64).sqrt())
        .collect();
    ChainSpec::new(hopping, vec![0.0; two_j + 1]).expect("spin chain couplings are positive")
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrrepBlockDecomposition {
    pub dim: usize,
    pub ell: usize,
    pub blocks: Vec<IrrepBlock>,
}

impl IrrepBlockDecomposition {
    /// Σ_j m_j (2j+1), which must equal 2^d.
    pub fn total_dimension(&self) -> u128 {
        self.blocks
            .iter()
            .map(|b| b.multiplicity * b.chain_length() as u128)
            .sum()
    }
}

/// Splits Q_d into spin blocks j = d/2, d/2 − 1, … with multiplicities
/// C(d, t) − C(d, t − 1), t = d/2 − j.
pub fn irrep_decomposition(dim: usize, ell: usize, energies: &[f64]) -> Result<IrrepBlockDecomposition> {
    if dim == 0 {
        return invalid("dimension must be at least 1");
    }
    if ell > dim {
        return invalid(format!("cut {ell} exceeds dimension {dim}"));
    }
    let set = energy_set(dim, energies)?;
    let blocks = (0..=dim / 2)
        .map(|t| {
            let two_j = dim - 2 * t;
            let multiplicity = binomial(dim, t) - if t > 0 { binomial(dim, t - 1) } else { 0 };
            let occupied = (0..=two_j)
                .filter(|&k| set.contains(&(2 * k as i64 - two_j as i64)))
                .collect();
            IrrepBlock {
                two_j,
                multiplicity,
                ell_j: ell as i64 - t as i64,
                occupied,
            }
        })
        .collect();
    Ok(IrrepBlockDecomposition { dim, ell, blocks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockRoute {
    Direct,
    Commutant,
}

/// Entropy of one block chain; zero when the cut misses or covers the block
/// or when the filling is trivial.
pub fn block_entropy(dim: usize, block: &IrrepBlock, route: BlockRoute) -> Result<f64> {
    let len = block.chain_length();
    let occ = block.occupied.len();
    if block.ell_j < 0 || block.ell_j as usize + 1 >= len || occ == 0 || occ == len {
        return Ok(0.0);
    }
    let ell = block.ell_j as usize;
    let spec = block.chain();
    let basis = energy_basis(&spec)?;
    let filling = FermiFilling::new(basis.energies(), block.occupied.clone())?;
    let cbar = occupied_projector(basis.basis(), &filling)?;
    let sites: Vec<usize> = (0..=ell).collect();
    let c = chop_to(
        &cbar,
        &sites,
        ell,
        filling.clone(),
        Provenance::IrrepBlock {
            dim,
            two_j: block.two_j,
        },
    )?;
    match route {
        BlockRoute::Direct => von_neumann_entropy(&c),
        BlockRoute::Commutant => {
            let k = filling
                .fermi_index()
                .ok_or_else(|| Error::InvalidInput("commutant route needs a lowest-levels filling".into()))?;
            let two_j = block.two_j as f64;
            let energies = (0..len).map(|i| 2.0 * i as f64 - two_j).collect();
            let x = (0..len).map(|i| i as f64).collect();
            let pair = BispectralPair::new(crate::chain::jacobi_matrix(&spec), x, energies)?;
            let op = CommutantOperator::build(&pair, ell, k)?;
            let spectrum = spectrum_of_c_via_t(&op, &c, DegeneracyPolicy::Fallback)?;
            entropy_from_occupations(&spectrum.occupations)
        }
    }
}

/// Per-block entropies (same order as the blocks) and Σ_j m_j 𝔖_j.
pub fn decomposition_entropy(decomp: &IrrepBlockDecomposition, route: BlockRoute) -> Result<(Vec<f64>, f64)> {
    let per_block = decomp
        .blocks
        .iter()
        .map(|b| block_entropy(decomp.dim, b, route))
        .collect::<Result<Vec<_>>>()?;
    let total = decomp
        .blocks
        .iter()
        .zip(&per_block)
        .map(|(b, s)| b.multiplicity as f64 * s)
        .sum();
    Ok((per_block, total))
}
