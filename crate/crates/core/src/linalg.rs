//! Symmetric eigensolvers, projectors and commutator norms.
//!
//! All spectral data produced here is sorted ascending and carries a fixed
//! sign convention on eigenvectors: the first component with magnitude above
//! [`SIGN_THRESHOLD`] is positive. Inside a degenerate cluster only the
//! spanned subspace is meaningful, so consumers should build projectors onto
//! whole clusters (see [`SpectralBasis::clusters`]).

use std::ops::Range;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};

pub type Matrix = DMatrix<f64>;

/// Components below this magnitude are skipped when fixing eigenvector signs.
pub const SIGN_THRESHOLD: f64 = 1e-12;

/// Relative gap (fraction of spectral width) under which neighbouring
/// eigenvalues are treated as one degenerate cluster.
pub const CLUSTER_REL_GAP: f64 = 1e-9;

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return invalid("tridiagonal matrix must have at least one row");
        }
        if offdiag.len() + 1 != diag.len() {
            return invalid(format!(
                "off-diagonal length {} does not match diagonal length {}",
                offdiag.len(),
                diag.len()
            ));
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return invalid("tridiagonal matrix has non-finite entries");
        }
        Ok(Self { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Leading `size`×`size` principal block.
    pub fn leading_block(&self, size: usize) -> Result<Self> {
        if size == 0 || size > self.len() {
            return invalid(format!("block size {size} outside 1..={}", self.len()));
        }
        Ok(Self {
            diag: self.diag[..size].to_vec(),
            offdiag: self.offdiag[..size - 1].to_vec(),
        })
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.offdiag)
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &d) in self.diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        for (i, &e) in self.offdiag.iter().enumerate() {
            m[(i, i + 1)] = e;
            m[(i + 1, i)] = e;
        }
        m
    }
}

/// Sorted eigenvalues with their orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    eigenvalues: Vec<f64>,
    eigenvectors: Matrix,
}

impl SpectralBasis {
    /// Sorts the pairs ascending and applies the sign convention.
    fn from_unsorted(values: Vec<f64>, vectors: Matrix) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let eigenvalues = order.iter().map(|&i| values[i]).collect();
        let mut eigenvectors = Matrix::zeros(vectors.nrows(), n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = vectors.column(src).into_owned();
            if let Some(first) = col.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
                if *first < 0.0 {
                    col.neg_mut();
                }
            }
            eigenvectors.set_column(dst, &col);
        }
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigenvectors
    }

    pub fn spectral_width(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// Index ranges of degenerate clusters, in ascending order.
    pub fn clusters(&self) -> Vec<Range<usize>> {
        cluster_sorted(&self.eigenvalues, CLUSTER_REL_GAP)
    }

    /// V·diag(w)·Vᵀ.
    pub fn reconstruct(&self) -> Matrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, &w) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(w);
        }
        &scaled * self.eigenvectors.transpose()
    }
}

/// Groups a sorted slice into runs whose consecutive gaps are below
/// `rel_gap` times the total width.
pub fn cluster_sorted(values: &[f64], rel_gap: f64) -> Vec<Range<usize>> {
    if values.is_empty() {
        return Vec::new();
    }
    let width = values[values.len() - 1] - values[0];
    let tol = rel_gap * width;
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..values.len() {
        if values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out.push(start..values.len());
    out
}

/// Orthogonal projector stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: Matrix,
    rank: usize,
}

impl Projector {
    /// Wraps a matrix known to be a projector. Symmetry is enforced exactly
    /// by averaging with the transpose.
    pub fn from_matrix(matrix: Matrix, rank: usize) -> Result<Self> {
        if !matrix.is_square() {
            return invalid("projector must be square");
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        Ok(Self { matrix: sym, rank })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// ‖P² − P‖_F.
    pub fn idempotency_error(&self) -> f64 {
        (&self.matrix * &self.matrix - &self.matrix).norm()
    }
}

/// Implicit QL iteration with Wilkinson shifts (EISPACK `tql2`), accumulating
/// rotations into `z`.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut Matrix) -> Result<()> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 64 * n.max(8) {
                    return Err(Error::NumericalBreakdown(format!(
                        "QL iteration did not converge for eigenvalue {l}"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..z.nrows() {
                        let zk1 = z[(k, i + 1)];
                        let zk = z[(k, i)];
                        z[(k, i + 1)] = s * zk + c * zk1;
                        z[(k, i)] = c * zk - s * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric tridiagonal matrix.
pub fn eig_sym_tridiagonal(m: &SymTridiagonal) -> Result<SpectralBasis> {
    let n = m.len();
    if n == 0 {
        return invalid("empty matrix");
    }
    let mut d = m.diag.clone();
    let mut e = m.offdiag.clone();
    e.push(0.0);
    let mut z = Matrix::identity(n, n);
    tql2(&mut d, &mut e, &mut z)?;
    Ok(SpectralBasis::from_unsorted(d, z))
}

/// Full eigendecomposition of a dense symmetric matrix.
pub fn eig_sym_dense(m: &Matrix) -> Result<SpectralBasis> {
    if !m.is_square() || m.nrows() == 0 {
        return invalid(format!("expected a non-empty square matrix, got {}x{}", m.nrows(), m.ncols()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return invalid("matrix has non-finite entries");
    }
    let n = m.nrows();
    let scale = 1.0 + m.amax();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return invalid(format!("matrix is not symmetric at ({i}, {j})"));
            }
        }
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalBreakdown("symmetric eigensolver did not converge".into()))?;
    Ok(SpectralBasis::from_unsorted(
        eig.eigenvalues.iter().copied().collect(),
        eig.eigenvectors,
    ))
}

/// Σ_{k ∈ selected} v_k v_kᵀ.
pub fn projector_from_columns(basis: &SpectralBasis, selected: &[usize]) -> Result<Projector> {
    let n = basis.len();
    let mut seen = vec![false; n];
    for &k in selected {
        if k >= n {
            return invalid(format!("column index {k} out of range 0..{n}"));
        }
        if std::mem::replace(&mut seen[k], true) {
            return invalid(format!("duplicate column index {k}"));
        }
    }
    let dim = basis.eigenvectors.nrows();
    let mut cols = Matrix::zeros(dim, selected.len());
    for (dst, &k) in selected.iter().enumerate() {
        cols.set_column(dst, &basis.eigenvectors.column(k));
    }
    Projector::from_matrix(&cols * cols.transpose(), selected.len())
}

/// ‖AB − BA‖_F / (‖A‖_F ‖B‖_F + 1e-300).
pub fn commutator_norm(a: &Matrix, b: &Matrix) -> Result<f64> {
    if !a.is_square() || a.shape() != b.shape() {
        return invalid(format!(
            "commutator needs equal square shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        ));
    }
    let comm = a * b - b * a;
    Ok(comm.norm() / (a.norm() * b.norm() + 1e-300))
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).amax()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_basis(b: &SpectralBasis, original: &Matrix) {
        let n = b.len();
        let gram = b.eigenvectors().transpose() * b.eigenvectors();
        assert!(max_abs_diff(&gram, &Matrix::identity(n, n)) < 1e-12);
        let recon = b.reconstruct();
        assert!(max_abs_diff(&recon, original) <= 1e-10 * (1.0 + original.amax()));
        assert!(b.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        for col in b.eigenvectors().column_iter() {
            let first = col.iter().find(|x| x.abs() > SIGN_THRESHOLD).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn one_by_one() {
        let t = SymTridiagonal::new(vec![0.0], vec![]).unwrap();
        let b = eig_sym_tridiagonal(&t).unwrap();
        assert_eq!(b.eigenvalues(), &[0.0]);
        assert_eq!(b.eigenvectors()[(0, 0)], 1.0);
    }

    #[test]
    fn two_by_two_krawtchouk() {
        let t = SymTridiagonal::new(vec![0.5, 0.5], vec![0.5]).unwrap();
        let b = eig_sym_tridiagonal(&t).unwrap();
        assert!((b.eigenvalues()[0] - 0.0).abs() < 1e-15);
        assert!((b.eigenvalues()[1] - 1.0).abs() < 1e-15);
        check_basis(&b, &t.to_dense());
        let p = projector_from_columns(&b, &[0]).unwrap();
        let expected = Matrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]);
        assert!(max_abs_diff(p.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn three_site_uniform_path() {
        let t = SymTridiagonal::new(vec![0.0; 3], vec![1.0, 1.0]).unwrap();
        let b = eig_sym_tridiagonal(&t).unwrap();
        let s = 2f64.sqrt();
        for (got, want) in b.eigenvalues().iter().zip([-s, 0.0, s]) {
            assert!((got - want).abs() < 1e-14);
        }
        check_basis(&b, &t.to_dense());
    }

    #[test]
    fn dense_small_cases() {
        let b = eig_sym_dense(&Matrix::identity(3, 3)).unwrap();
        assert_eq!(b.eigenvalues(), &[1.0, 1.0, 1.0]);
        assert_eq!(b.clusters(), vec![0..3]);

        let sx = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let b = eig_sym_dense(&sx).unwrap();
        assert!((b.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((b.eigenvalues()[1] - 1.0).abs() < 1e-15);

        // 4-cycle = hypercube Q_2 in bit order 00,01,10,11
        let q2 = Matrix::from_row_slice(
            4,
            4,
            &[0., 1., 1., 0., 1., 0., 0., 1., 1., 0., 0., 1., 0., 1., 1., 0.],
        );
        let b = eig_sym_dense(&q2).unwrap();
        for (got, want) in b.eigenvalues().iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(b.clusters(), vec![0..1, 1..3, 3..4]);
        check_basis(&b, &q2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            SymTridiagonal::new(vec![f64::NAN], vec![]),
            Err(Error::InvalidInput(_))
        ));
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        let asym = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(eig_sym_dense(&asym), Err(Error::InvalidInput(_))));
        let b = eig_sym_dense(&Matrix::identity(2, 2)).unwrap();
        assert!(projector_from_columns(&b, &[2]).is_err());
        assert!(projector_from_columns(&b, &[0, 0]).is_err());
        assert!(commutator_norm(&Matrix::identity(2, 2), &Matrix::identity(3, 3)).is_err());
    }

    #[test]
    fn projector_extremes() {
        let t = SymTridiagonal::new(vec![1.0, -2.0, 0.5], vec![0.3, 0.7]).unwrap();
        let b = eig_sym_tridiagonal(&t).unwrap();
        let empty = projector_from_columns(&b, &[]).unwrap();
        assert_eq!(empty.rank(), 0);
        assert_eq!(empty.matrix().amax(), 0.0);
        let full = projector_from_columns(&b, &[0, 1, 2]).unwrap();
        assert!(max_abs_diff(full.matrix(), &Matrix::identity(3, 3)) < 1e-14);
        assert!((full.trace() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn commutator_cases() {
        let b = Matrix::from_row_slice(2, 2, &[0.3, 1.0, 1.0, -2.0]);
        assert_eq!(commutator_norm(&Matrix::identity(2, 2), &b).unwrap(), 0.0);
        let d = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]));
        let sx = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(commutator_norm(&d, &sx).unwrap() > 0.1);
    }

    #[test]
    fn clustering_uses_relative_gap() {
        let v = [0.0, 1.0, 1.0 + 1e-12, 2.0];
        assert_eq!(cluster_sorted(&v, CLUSTER_REL_GAP), vec![0..1, 1..3, 3..4]);
    }
}
