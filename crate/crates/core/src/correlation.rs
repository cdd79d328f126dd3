//! Ground-state correlation matrices, their restriction to a subsystem and the
//! von Neumann entanglement entropy computed from the restricted spectrum.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::chain::{energy_basis, ChainSpec, EnergyBasis};
use crate::error::{invalid, Error, Result};
use crate::heun::{spectrum_of_c_via_t, BispectralPair, CommutantOperator, DegeneracyPolicy};
use crate::linalg::{cluster_sorted, eig_sym_dense, projector_from_columns, Matrix, Projector, SpectralBasis, CLUSTER_REL_GAP};

/// Eigenvalues of a chopped correlation matrix may leave [0, 1] by at most
/// this much before the computation is declared broken.
pub const CLAMP_WINDOW: f64 = 1e-8;

/// Occupied one-particle levels of a Slater-determinant ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct FermiFilling {
    occupied: Vec<usize>,
    n_levels: usize,
    fermi_gap: Option<f64>,
}

impl FermiFilling {
    /// Non-empty proper filling of the given ascending spectrum.
    pub fn new(spectrum: &[f64], occupied: Vec<usize>) -> Result<Self> {
        let filling = Self::allow_trivial(spectrum, occupied)?;
        if filling.occupied.is_empty() || filling.occupied.len() == spectrum.len() {
            return invalid("filling must be a non-empty proper subset of the levels");
        }
        Ok(filling)
    }

    /// Like [`FermiFilling::new`] but accepts the empty and the full filling.
    pub fn allow_trivial(spectrum: &[f64], mut occupied: Vec<usize>) -> Result<Self> {
        occupied.sort_unstable();
        occupied.dedup();
        let n_levels = spectrum.len();
        if let Some(&last) = occupied.last() {
            if last >= n_levels {
                return invalid(format!("level {last} out of range 0..{n_levels}"));
            }
        }
        check_clusters(spectrum, &occupied)?;
        let count = occupied.len();
        let contiguous = occupied.iter().enumerate().all(|(i, &k)| i == k);
        let fermi_gap = (contiguous && count > 0 && count < n_levels)
            .then(|| spectrum[count] - spectrum[count - 1]);
        Ok(Self {
            occupied,
            n_levels,
            fermi_gap,
        })
    }

    /// The `count` lowest levels.
    pub fn lowest(spectrum: &[f64], count: usize) -> Result<Self> {
        Self::new(spectrum, (0..count).collect())
    }

    /// Levels 0..=K.
    pub fn up_to(spectrum: &[f64], fermi_index: usize) -> Result<Self> {
        Self::lowest(spectrum, fermi_index + 1)
    }

    pub fn occupied(&self) -> &[usize] {
        &self.occupied
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    /// ω_{K+1} − ω_K when the filling is the lowest K+1 levels.
    pub fn fermi_gap(&self) -> Option<f64> {
        self.fermi_gap
    }

    /// K, when the filling is a contiguous block starting at level 0.
    pub fn fermi_index(&self) -> Option<usize> {
        let contiguous = self.occupied.iter().enumerate().all(|(i, &k)| i == k);
        (contiguous && !self.occupied.is_empty()).then(|| self.occupied.len() - 1)
    }

    pub fn is_trivial(&self) -> bool {
        self.occupied.is_empty() || self.occupied.len() == self.n_levels
    }
}

fn check_clusters(spectrum: &[f64], occupied: &[usize]) -> Result<()> {
    let mut mask = vec![false; spectrum.len()];
    for &k in occupied {
        mask[k] = true;
    }
    for cluster in cluster_sorted(spectrum, CLUSTER_REL_GAP) {
        let first = mask[cluster.start];
        if let Some(k) = cluster.clone().find(|&k| mask[k] != first) {
            let gap = spectrum[k] - spectrum[k - 1];
            return Err(Error::DegenerateFermiLevel { index: k, gap });
        }
    }
    Ok(())
}

/// Where a chopped correlation matrix came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Chain { n_sites: usize },
    Hypercube { dim: usize },
    IrrepBlock { dim: usize, two_j: usize },
}

/// C = Π_S Π_E Π_S written on the subsystem coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoppedCorrelation {
    matrix: Matrix,
    cut: usize,
    filling: FermiFilling,
    provenance: Provenance,
}

impl ChoppedCorrelation {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn cut(&self) -> usize {
        self.cut
    }

    pub fn filling(&self) -> &FermiFilling {
        &self.filling
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues by dense diagonalization, ascending, checked against
    /// [`CLAMP_WINDOW`] and clamped into [0, 1].
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let raw = eig_sym_dense(&self.matrix)?;
        clamp_occupations(raw.eigenvalues())
    }
}

/// Clamps occupation numbers into [0, 1], failing when one lies farther
/// than [`CLAMP_WINDOW`] outside.
pub fn clamp_occupations(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&v| {
            if !(-CLAMP_WINDOW..=1.0 + CLAMP_WINDOW).contains(&v) {
                Err(Error::NumericalBreakdown(format!(
                    "correlation eigenvalue {v:e} outside [0, 1]"
                )))
            } else {
                Ok(v.clamp(0.0, 1.0))
            }
        })
        .collect()
}

/// Projector onto the occupied levels of `basis`.
pub fn occupied_projector(basis: &SpectralBasis, filling: &FermiFilling) -> Result<Projector> {
    if filling.n_levels() != basis.len() {
        return invalid(format!(
            "filling over {} levels used with a basis of {}",
            filling.n_levels(),
            basis.len()
        ));
    }
    check_clusters(basis.eigenvalues(), filling.occupied())?;
    projector_from_columns(basis, filling.occupied())
}

/// C̄ = Σ_{k occupied} |ω_k⟩⟨ω_k|.
pub fn correlation_matrix(basis: &EnergyBasis, filling: &FermiFilling) -> Result<Projector> {
    occupied_projector(basis.basis(), filling)
}

/// Restriction of C̄ to an arbitrary ordered set of coordinates.
pub fn chop_to(
    cbar: &Projector,
    sites: &[usize],
    cut: usize,
    filling: FermiFilling,
    provenance: Provenance,
) -> Result<ChoppedCorrelation> {
    let n = cbar.dim();
    if let Some(&bad) = sites.iter().find(|&&s| s >= n) {
        return invalid(format!("site {bad} out of range 0..{n}"));
    }
    let full = cbar.matrix();
    let matrix = Matrix::from_fn(sites.len(), sites.len(), |i, j| full[(sites[i], sites[j])]);
    Ok(ChoppedCorrelation {
        matrix,
        cut,
        filling,
        provenance,
    })
}

/// Leading (ℓ+1)×(ℓ+1) block of a chain correlation matrix.
pub fn chop(cbar: &Projector, cut: usize, filling: FermiFilling) -> Result<ChoppedCorrelation> {
    let n_sites = cbar.dim();
    if cut + 1 >= n_sites {
        return invalid(format!("cut {cut} must leave a non-empty complement of {n_sites} sites"));
    }
    let sites: Vec<usize> = (0..=cut).collect();
    chop_to(cbar, &sites, cut, filling, Provenance::Chain { n_sites })
}

/// −[ν ln ν + (1−ν) ln(1−ν)] with 0 ln 0 = 0.
fn binary_entropy(nu: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    -(term(nu) + term(1.0 - nu))
}

/// Entropy (nats) from the eigenvalues of a chopped correlation matrix.
pub fn entropy_from_occupations(values: &[f64]) -> Result<f64> {
    let clamped = clamp_occupations(values)?;
    Ok(clamped.iter().map(|&v| binary_entropy(v)).sum::<f64>().max(0.0))
}

/// Von Neumann entanglement entropy in nats.
pub fn von_neumann_entropy(c: &ChoppedCorrelation) -> Result<f64> {
    entropy_from_occupations(&c.spectrum()?)
}

/// How the Fermi sea of a chain is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FillingRule {
    /// Levels 0..=K.
    FermiIndex(usize),
    /// K = ⌊(N−1)/2⌋ on sites 0..=N.
    HalfFilling,
}

impl FillingRule {
    pub fn fermi_index(&self, n_sites: usize) -> Result<usize> {
        match *self {
            FillingRule::FermiIndex(k) => Ok(k),
            FillingRule::HalfFilling if n_sites >= 2 => Ok((n_sites - 2) / 2),
            FillingRule::HalfFilling => invalid("half filling needs at least two sites"),
        }
    }
}

/// Diagonalization strategy for the chopped correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Route {
    Direct,
    /// Diagonalize the tridiagonal commutant built from a position-diagonal
    /// partner operator with the given eigenvalues λ_n.
    Commutant { dual_eigenvalues: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    /// Largest site index N.
    pub n: usize,
    pub ell: usize,
    pub k: usize,
    pub entropy: f64,
}

impl ProfileRow {
    pub const CSV_HEADER: &'static str = "N,ell,K,entropy_nats";
}

/// Writes profile rows as CSV; `bits` converts entropies to base 2 and
/// renames the last column accordingly.
pub fn profile_csv(rows: &[ProfileRow], bits: bool) -> String {
    let mut out = String::new();
    if bits {
        out.push_str("N,ell,K,entropy_bits\n");
    } else {
        out.push_str(ProfileRow::CSV_HEADER);
        out.push('\n');
    }
    for r in rows {
        let s = if bits { r.entropy / std::f64::consts::LN_2 } else { r.entropy };
        let _ = writeln!(out, "{},{},{},{}", r.n, r.ell, r.k, s);
    }
    out
}

/// Entropy of the block of sites 0..=ℓ in the ground state with levels 0..=K
/// occupied, for one cut of an already diagonalized chain.
pub fn cut_entropy(basis: &EnergyBasis, cbar: &Projector, filling: &FermiFilling, ell: usize, route: &Route) -> Result<f64> {
    let c = chop(cbar, ell, filling.clone())?;
    match route {
        Route::Direct => von_neumann_entropy(&c),
        Route::Commutant { dual_eigenvalues } => {
            let k = filling
                .fermi_index()
                .ok_or_else(|| Error::InvalidInput("commutant route needs a lowest-levels filling".into()))?;
            let pair = BispectralPair::from_energy_basis(basis, dual_eigenvalues.clone())?;
            let commutant = CommutantOperator::build(&pair, ell, k)?;
            let spec = spectrum_of_c_via_t(&commutant, &c, DegeneracyPolicy::Fallback)?;
            entropy_from_occupations(&spec.occupations)
        }
    }
}

/// One row per cut in `cuts`, computed in parallel and returned in cut order.
pub fn entropy_profile(
    spec: &ChainSpec,
    rule: FillingRule,
    cuts: RangeInclusive<usize>,
    route: &Route,
) -> Result<Vec<ProfileRow>> {
    let n_sites = spec.n_sites();
    let k = rule.fermi_index(n_sites)?;
    let basis = energy_basis(spec)?;
    let filling = FermiFilling::up_to(basis.energies(), k)?;
    let cbar = correlation_matrix(&basis, &filling)?;
    let cuts: Vec<usize> = cuts.collect();
    cuts.par_iter()
        .map(|&ell| {
            let entropy = cut_entropy(&basis, &cbar, &filling, ell, route)?;
            Ok(ProfileRow {
                n: n_sites - 1,
                ell,
                k,
                entropy,
            })
        })
        .collect()
}
