//! Symmetric association schemes: axiom checks, intersection numbers,
//! primitive idempotents, dual matrices and P-/Q-polynomial detection.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{cluster_sorted, eig_sym_dense, Matrix};

/// Relative gap used to separate the common eigenspaces of the scheme.
const EIGENSPACE_REL_GAP: f64 = 1e-9;
/// Q-polynomial detection is only attempted up to this many classes.
pub const MAX_Q_POLYNOMIAL_CLASSES: usize = 4;

/// A verified symmetric association scheme with its spectral tables.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeData {
    adjacency: Vec<Matrix>,
    /// `intersection[i][j][k]` = p^k_{ij}.
    intersection: Vec<Vec<Vec<i64>>>,
    tables: IdempotentTables,
}

/// Primitive idempotents with eigenvalue tables.
#[derive(Debug, Clone, PartialEq)]
pub struct IdempotentTables {
    pub idempotents: Vec<Matrix>,
    /// `eigenmatrix[j][i]` = θ_i(j), the eigenvalue of A_i on E_j.
    pub eigenmatrix: Vec<Vec<f64>>,
    /// `dual_eigenmatrix[j][i]` = θ*_i(j), with E_i = (1/|V|) Σ_j θ*_i(j) A_j.
    pub dual_eigenmatrix: Vec<Vec<f64>>,
    pub ranks: Vec<usize>,
}

impl SchemeData {
    /// Number of classes d (the scheme has d + 1 relations).
    pub fn classes(&self) -> usize {
        self.adjacency.len() - 1
    }

    pub fn vertices(&self) -> usize {
        self.adjacency[0].nrows()
    }

    pub fn adjacency(&self) -> &[Matrix] {
        &self.adjacency
    }

    pub fn intersection(&self, i: usize, j: usize, k: usize) -> i64 {
        self.intersection[i][j][k]
    }

    pub fn intersection_numbers(&self) -> &[Vec<Vec<i64>>] {
        &self.intersection
    }

    pub fn tables(&self) -> &IdempotentTables {
        &self.tables
    }

    pub fn idempotents(&self) -> &[Matrix] {
        &self.tables.idempotents
    }

    /// Row sums k_i of the relations.
    pub fn valencies(&self) -> Vec<i64> {
        (0..=self.classes()).map(|i| self.intersection[i][i][0]).collect()
    }

    /// ‖A_iA_j − Σ_k p^k_{ij}A_k‖_max over all i, j.
    pub fn closure_residual(&self) -> f64 {
        let d = self.classes();
        let mut worst = 0.0_f64;
        for i in 0..=d {
            for j in 0..=d {
                let mut r = &self.adjacency[i] * &self.adjacency[j];
                for k in 0..=d {
                    r -= &self.adjacency[k] * self.intersection[i][j][k] as f64;
                }
                worst = worst.max(r.amax());
            }
        }
        worst
    }
}

fn not_a_scheme<T>(axiom: &str, witness: String) -> Result<T> {
    Err(Error::NotAScheme {
        axiom: axiom.to_string(),
        witness,
    })
}

/// Checks the axioms A_0 = I, Σ A_i = J, A_i = A_iᵀ and Bose–Mesner closure
/// on every entry, then computes the spectral tables.
pub fn verify_scheme(adjacency: Vec<Matrix>) -> Result<SchemeData> {
    let Some(first) = adjacency.first() else {
        return invalid("scheme needs at least the identity relation");
    };
    let n = first.nrows();
    if n == 0 {
        return invalid("scheme needs at least one vertex");
    }
    for (i, a) in adjacency.iter().enumerate() {
        if a.shape() != (n, n) {
            return not_a_scheme("square", format!("A_{i} has shape {:?}, expected ({n}, {n})", a.shape()));
        }
        if let Some((idx, v)) = a.iter().enumerate().find(|(_, &v)| v != 0.0 && v != 1.0) {
            return not_a_scheme("zero-one", format!("A_{i}[{}, {}] = {v}", idx % n, idx / n));
        }
    }
    for u in 0..n {
        for v in 0..n {
            let want = if u == v { 1.0 } else { 0.0 };
            if adjacency[0][(u, v)] != want {
                return not_a_scheme("identity", format!("A_0[{u}, {v}] = {}", adjacency[0][(u, v)]));
            }
        }
    }
    for (i, a) in adjacency.iter().enumerate() {
        for u in 0..n {
            for v in (u + 1)..n {
                if a[(u, v)] != a[(v, u)] {
                    return not_a_scheme("symmetric", format!("A_{i}[{u}, {v}] != A_{i}[{v}, {u}]"));
                }
            }
        }
    }
    // class[u][v] = the unique relation containing (u, v)
    let mut class = vec![usize::MAX; n * n];
    for u in 0..n {
        for v in 0..n {
            let mut hits = adjacency.iter().enumerate().filter(|(_, a)| a[(u, v)] == 1.0);
            match (hits.next(), hits.next()) {
                (Some((i, _)), None) => class[u * n + v] = i,
                (None, _) => return not_a_scheme("partition", format!("entry ({u}, {v}) is in no relation")),
                (Some((i, _)), Some((j, _))) => {
                    return not_a_scheme("partition", format!("entry ({u}, {v}) is in both A_{i} and A_{j}"))
                }
            }
        }
    }
    let d = adjacency.len() - 1;
    if let Some(i) = (1..=d).find(|&i| adjacency[i].iter().all(|&x| x == 0.0)) {
        return not_a_scheme("partition", format!("A_{i} is empty"));
    }

    let neighbours: Vec<Vec<Vec<usize>>> = adjacency
        .iter()
        .map(|a| (0..n).map(|u| (0..n).filter(|&w| a[(u, w)] == 1.0).collect()).collect())
        .collect();
    let mut intersection = vec![vec![vec![-1_i64; d + 1]; d + 1]; d + 1];
    let mut counts = vec![0_i64; n];
    for i in 0..=d {
        for j in 0..=d {
            for u in 0..n {
                counts.iter_mut().for_each(|c| *c = 0);
                for &w in &neighbours[i][u] {
                    for &v in &neighbours[j][w] {
                        counts[v] += 1;
                    }
                }
                for (v, &c) in counts.iter().enumerate() {
                    let k = class[u * n + v];
                    let slot = &mut intersection[i][j][k];
                    if *slot < 0 {
                        *slot = c;
                    } else if *slot != c {
                        return not_a_scheme(
                            "closure",
                            format!("(A_{i}A_{j})[{u}, {v}] = {c} but p^{k}_{{{i}{j}}} = {slot} elsewhere on A_{k}"),
                        );
                    }
                }
            }
        }
    }
    for i in 0..=d {
        for j in 0..i {
            for k in 0..=d {
                if intersection[i][j][k] != intersection[j][i][k] {
                    return not_a_scheme("commutative", format!("p^{k}_{{{i}{j}}} != p^{k}_{{{j}{i}}}"));
                }
            }
        }
    }
    let tables = primitive_idempotents(&adjacency)?;
    Ok(SchemeData {
        adjacency,
        intersection,
        tables,
    })
}

/// Simultaneous eigenspaces of the relations, E_0 = J/|V| first and the rest
/// ordered by θ_1 descending.
pub fn primitive_idempotents(adjacency: &[Matrix]) -> Result<IdempotentTables> {
    let d = adjacency.len() - 1;
    let n = adjacency[0].nrows();
    let nf = n as f64;
    // a generic combination separates the common eigenspaces
    let mut generic = Matrix::zeros(n, n);
    for (i, a) in adjacency.iter().enumerate().skip(1) {
        let c = 1.0 + ((i as f64) * 0.754_877_666_246_692_7).fract() / (1.0 + i as f64);
        generic += a * c;
    }
    let basis = eig_sym_dense(&generic)?;
    let clusters = cluster_sorted(basis.eigenvalues(), EIGENSPACE_REL_GAP);
    if clusters.len() != d + 1 {
        return not_a_scheme(
            "idempotents",
            format!("found {} common eigenspaces for {} relations", clusters.len(), d + 1),
        );
    }
    let mut idempotents: Vec<Matrix> = clusters
        .iter()
        .map(|c| {
            let cols = basis.eigenvectors().columns(c.start, c.len());
            &cols * cols.transpose()
        })
        .collect();
    let mut ranks: Vec<usize> = clusters.iter().map(|c| c.len()).collect();
    let theta = |e: &Matrix, rank: usize| -> Vec<f64> {
        adjacency.iter().map(|a| a.component_mul(e).sum() / rank as f64).collect()
    };
    let mut eigenmatrix: Vec<Vec<f64>> = idempotents.iter().zip(&ranks).map(|(e, &r)| theta(e, r)).collect();

    let ones = Matrix::from_element(n, n, 1.0 / nf);
    let trivial = idempotents
        .iter()
        .position(|e| (e - &ones).amax() < 1e-8)
        .ok_or_else(|| Error::NotAScheme {
            axiom: "idempotents".into(),
            witness: "no eigenspace equals J/|V|".into(),
        })?;
    let mut order: Vec<usize> = (0..=d).filter(|&j| j != trivial).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&eigenmatrix[a], &eigenmatrix[b]);
        (1..=d)
            .map(|i| rb[i].total_cmp(&ra[i]))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order.insert(0, trivial);
    idempotents = order.iter().map(|&j| idempotents[j].clone()).collect();
    ranks = order.iter().map(|&j| ranks[j]).collect();
    eigenmatrix = order.iter().map(|&j| eigenmatrix[j].clone()).collect();

    for (i, a) in adjacency.iter().enumerate() {
        let mut recon = Matrix::zeros(n, n);
        for (j, e) in idempotents.iter().enumerate() {
            recon += e * eigenmatrix[j][i];
        }
        let err = (a - recon).amax();
        if err > 1e-9 * (1.0 + nf) {
            return not_a_scheme("commuting", format!("A_{i} is not diagonal on the common eigenspaces (error {err:e})"));
        }
    }

    // θ*_i(j): |V|·E_i is constant on the support of A_j
    let sizes: Vec<f64> = adjacency.iter().map(|a| a.sum()).collect();
    let dual_eigenmatrix: Vec<Vec<f64>> = idempotents
        .iter()
        .map(|e| {
            adjacency
                .iter()
                .zip(&sizes)
                .map(|(a, s)| nf * a.component_mul(e).sum() / s)
                .collect()
        })
        .collect();
    for (i, e) in idempotents.iter().enumerate() {
        let mut recon = Matrix::zeros(n, n);
        for (j, a) in adjacency.iter().enumerate() {
            recon += a * (dual_eigenmatrix[i][j] / nf);
        }
        let err = (e - recon).amax();
        if err > 1e-9 {
            return not_a_scheme("idempotents", format!("E_{i} is not in the Bose-Mesner algebra (error {err:e})"));
        }
    }
    Ok(IdempotentTables {
        idempotents,
        eigenmatrix,
        dual_eigenmatrix,
        ranks,
    })
}

/// Diagonal dual matrices anchored at a reference vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPair {
    pub reference: usize,
    /// Diagonals of A*_i: |V|·[E_i]_{v0,v}.
    pub dual_adjacency: Vec<Vec<f64>>,
    /// Diagonals of E*_i: [A_i]_{v0,v}.
    pub dual_idempotents: Vec<Vec<f64>>,
}

pub fn dual_pair(scheme: &SchemeData, reference: usize) -> Result<DualPair> {
    let n = scheme.vertices();
    if reference >= n {
        return invalid(format!("reference vertex {reference} out of range 0..{n}"));
    }
    let nf = n as f64;
    let dual_adjacency = scheme
        .idempotents()
        .iter()
        .map(|e| (0..n).map(|v| nf * e[(reference, v)]).collect())
        .collect();
    let dual_idempotents = scheme
        .adjacency
        .iter()
        .map(|a| (0..n).map(|v| a[(reference, v)]).collect())
        .collect();
    Ok(DualPair {
        reference,
        dual_adjacency,
        dual_idempotents,
    })
}

/// Distance classes ordered so that A_i = p_i(A_1) with deg p_i = i.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PPolynomial {
    /// `ordering[i]` is the input index of the i-th distance class.
    pub ordering: Vec<usize>,
    /// `coefficients[i][r]` multiplies A_1^r in p_i.
    pub coefficients: Vec<Vec<f64>>,
    /// Largest coordinate error of p_i(A_1) − A_i in the Bose–Mesner basis.
    pub residual: f64,
}

/// Tries each non-identity relation as A_1 and follows the distance layering
/// of its powers in the Bose–Mesner algebra.
pub fn p_polynomial_check(scheme: &SchemeData) -> Result<PPolynomial> {
    let d = scheme.classes();
    if d == 0 {
        return Ok(PPolynomial {
            ordering: vec![0],
            coefficients: vec![vec![1.0]],
            residual: 0.0,
        });
    }
    let p = &scheme.intersection;
    // coordinates of A_c · Σ_k x_k A_k
    let mul = |c: usize, x: &[i128]| -> Vec<i128> {
        let mut out = vec![0i128; d + 1];
        for (k, &xk) in x.iter().enumerate() {
            if xk != 0 {
                for (m, o) in out.iter_mut().enumerate() {
                    *o += xk * p[c][k][m] as i128;
                }
            }
        }
        out
    };
    'candidates: for c in 1..=d {
        let mut ordering = vec![0];
        let mut powers = vec![{
            let mut e = vec![0i128; d + 1];
            e[0] = 1;
            e
        }];
        for _ in 1..=d {
            let next = mul(c, powers.last().unwrap());
            let fresh: Vec<usize> = (0..=d).filter(|m| next[*m] != 0 && !ordering.contains(m)).collect();
            if fresh.len() != 1 {
                continue 'candidates;
            }
            ordering.push(fresh[0]);
            powers.push(next);
        }
        // p_i = (x^i − Σ_{m<i} w_{i,m} p_m) / w_{i,i} with w from the powers
        let mut coefficients: Vec<Vec<f64>> = vec![vec![1.0]];
        for i in 1..=d {
            let mut poly = vec![0.0; i + 1];
            poly[i] = 1.0;
            for m in 0..i {
                let w = powers[i][ordering[m]] as f64;
                for (r, &cm) in coefficients[m].iter().enumerate() {
                    poly[r] -= w * cm;
                }
            }
            let lead = powers[i][ordering[i]] as f64;
            poly.iter_mut().for_each(|x| *x /= lead);
            coefficients.push(poly);
        }
        // evaluate p_i(A_1) in coordinates
        let mut residual = 0.0_f64;
        let monomials: Vec<Vec<f64>> = powers.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
        for (i, poly) in coefficients.iter().enumerate() {
            let mut value = vec![0.0; d + 1];
            for (r, &cr) in poly.iter().enumerate() {
                for (m, vm) in value.iter_mut().enumerate() {
                    *vm += cr * monomials[r][m];
                }
            }
            for (m, vm) in value.iter().enumerate() {
                let want = if m == ordering[i] { 1.0 } else { 0.0 };
                residual = residual.max((vm - want).abs());
            }
        }
        if residual > 1e-8 {
            continue;
        }
        return Ok(PPolynomial {
            ordering,
            coefficients,
            residual,
        });
    }
    Err(Error::NotPPolynomial(
        "no relation generates the others as polynomials of increasing degree".into(),
    ))
}

/// Dense evaluation of Σ_r coeffs[r]·M^r.
pub fn evaluate_polynomial(coeffs: &[f64], m: &Matrix) -> Matrix {
    let n = m.nrows();
    let mut out = Matrix::zeros(n, n);
    let mut power = Matrix::identity(n, n);
    for &c in coeffs {
        out += &power * c;
        power = &power * m;
    }
    out
}

/// Whether some ordering makes E_i a degree-i polynomial of E_1 under the
/// entrywise product. `None` above [`MAX_Q_POLYNOMIAL_CLASSES`] classes.
pub fn q_polynomial_check(scheme: &SchemeData) -> Option<bool> {
    let d = scheme.classes();
    if d > MAX_Q_POLYNOMIAL_CLASSES {
        return None;
    }
    if d == 0 {
        return Some(true);
    }
    let tables = &scheme.tables;
    let n = scheme.vertices();
    let coords = |m: &Matrix| -> Vec<f64> {
        tables
            .idempotents
            .iter()
            .zip(&tables.ranks)
            .map(|(e, &r)| m.component_mul(e).sum() / r as f64)
            .collect()
    };
    'candidates: for c in 1..=d {
        let e1 = &tables.idempotents[c];
        let scale = e1.amax().max(f64::MIN_POSITIVE);
        let mut seen = vec![0usize];
        let mut power = Matrix::from_element(n, n, 1.0);
        for step in 1..=d {
            power = power.component_mul(e1);
            let x = coords(&power);
            let tol = 1e-9 * scale.powi(step as i32);
            let fresh: Vec<usize> = (0..=d).filter(|j| x[*j].abs() > tol && !seen.contains(j)).collect();
            if fresh.len() != 1 {
                continue 'candidates;
            }
            seen.push(fresh[0]);
        }
        return Some(true);
    }
    Some(false)
}

/// Distance matrices A_0..A_d of the hypercube Q_d (vertices in bit order).
pub fn hamming_distance_matrices(dim: usize) -> Vec<Matrix> {
    let n = 1usize << dim;
    (0..=dim)
        .map(|i| Matrix::from_fn(n, n, |u, v| if (u ^ v).count_ones() as usize == i { 1.0 } else { 0.0 }))
        .collect()
}

/// JSON input: one row-major 0/1 matrix per relation, flat or nested.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct SchemeFile {
    pub matrices: Vec<MatrixEntries>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum MatrixEntries {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

impl SchemeFile {
    pub fn from_matrices(matrices: &[Matrix]) -> Self {
        let matrices = matrices
            .iter()
            .map(|m| MatrixEntries::Flat(m.transpose().iter().copied().collect()))
            .collect();
        Self { matrices }
    }

    pub fn to_matrices(&self) -> Result<Vec<Matrix>> {
        self.matrices
            .iter()
            .enumerate()
            .map(|(i, entries)| match entries {
                MatrixEntries::Flat(v) => {
                    let n = (v.len() as f64).sqrt().round() as usize;
                    if n * n != v.len() {
                        return invalid(format!("matrix {i} has {} entries, not a square count", v.len()));
                    }
                    Ok(Matrix::from_row_slice(n, n, v))
                }
                MatrixEntries::Nested(rows) => {
                    let n = rows.len();
                    if rows.iter().any(|r| r.len() != n) {
                        return invalid(format!("matrix {i} is not square"));
                    }
                    Ok(Matrix::from_fn(n, n, |r, c| rows[r][c]))
                }
            })
            .collect()
    }
}

/// Machine-readable outcome of a scheme verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum SchemeReport {
    #[serde(rename = "valid")]
    Valid {
        classes: usize,
        vertices: usize,
        valencies: Vec<i64>,
        /// `intersection_numbers[i][j][k]` = p^k_{ij}.
        intersection_numbers: Vec<Vec<Vec<i64>>>,
        idempotent_ranks: Vec<usize>,
        eigenmatrix: Vec<Vec<f64>>,
        dual_eigenmatrix: Vec<Vec<f64>>,
        p_polynomial: Option<PPolynomial>,
        q_polynomial: Option<bool>,
    },
    NotAScheme {
        axiom: String,
        witness: String,
    },
}

impl SchemeReport {
    /// Runs the full verification. Errors other than axiom violations are
    /// returned as errors.
    pub fn build(adjacency: Vec<Matrix>) -> Result<Self> {
        match verify_scheme(adjacency) {
            Ok(s) => Ok(SchemeReport::Valid {
                classes: s.classes(),
                vertices: s.vertices(),
                valencies: s.valencies(),
                intersection_numbers: s.intersection.clone(),
                idempotent_ranks: s.tables.ranks.clone(),
                eigenmatrix: s.tables.eigenmatrix.clone(),
                dual_eigenmatrix: s.tables.dual_eigenmatrix.clone(),
                p_polynomial: p_polynomial_check(&s).ok(),
                q_polynomial: q_polynomial_check(&s),
            }),
            Err(Error::NotAScheme { axiom, witness }) => Ok(SchemeReport::NotAScheme { axiom, witness }),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_scheme() {
        let s = verify_scheme(vec![Matrix::identity(1, 1)]).unwrap();
        assert_eq!(s.classes(), 0);
        assert_eq!(s.idempotents()[0], Matrix::identity(1, 1));
        let p = p_polynomial_check(&s).unwrap();
        assert_eq!(p.ordering, vec![0]);
    }

    #[test]
    fn square_intersection_numbers() {
        let s = verify_scheme(hamming_distance_matrices(2)).unwrap();
        assert_eq!(s.intersection(1, 1, 0), 2);
        assert_eq!(s.intersection(1, 1, 2), 2);
        assert_eq!(s.intersection(1, 1, 1), 0);
        assert_eq!(s.valencies(), vec![1, 2, 1]);
        assert_eq!(s.closure_residual(), 0.0);
    }

    #[test]
    fn square_eigenmatrix_and_duals() {
        let s = verify_scheme(hamming_distance_matrices(2)).unwrap();
        let t = s.tables();
        assert_eq!(t.ranks, vec![1, 2, 1]);
        let theta1: Vec<f64> = t.eigenmatrix.iter().map(|row| row[1]).collect();
        for (got, want) in theta1.iter().zip([2.0, 0.0, -2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let dp = dual_pair(&s, 0).unwrap();
        assert_eq!(dp.dual_idempotents[0], vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(dp.dual_idempotents[1], vec![0.0, 1.0, 1.0, 0.0]);
        for (got, want) in dp.dual_adjacency[1].iter().zip([2.0, 0.0, 0.0, -2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn square_distance_two_polynomial() {
        let s = verify_scheme(hamming_distance_matrices(2)).unwrap();
        let p = p_polynomial_check(&s).unwrap();
        assert_eq!(p.ordering, vec![0, 1, 2]);
        assert_eq!(p.coefficients[2], vec![-1.0, 0.0, 0.5]);
        let a1 = &s.adjacency()[1];
        let a2 = evaluate_polynomial(&p.coefficients[2], a1);
        assert_eq!(a2, s.adjacency()[2]);
        assert_eq!(q_polynomial_check(&s), Some(true));
    }

    #[test]
    fn axiom_violations_are_named() {
        let mut m = hamming_distance_matrices(2);
        m[1][(0, 1)] = 0.0;
        m[1][(1, 0)] = 0.0;
        match verify_scheme(m) {
            Err(Error::NotAScheme { axiom, .. }) => assert_eq!(axiom, "partition"),
            other => panic!("unexpected {other:?}"),
        }
        let mut m = hamming_distance_matrices(2);
        m[1][(0, 1)] = 0.0;
        m[2][(0, 1)] = 1.0;
        match verify_scheme(m) {
            Err(Error::NotAScheme { axiom, .. }) => assert_eq!(axiom, "symmetric"),
            other => panic!("unexpected {other:?}"),
        }
        let mut m = hamming_distance_matrices(2);
        m.swap(0, 1);
        match verify_scheme(m) {
            Err(Error::NotAScheme { axiom, .. }) => assert_eq!(axiom, "identity"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn path_relations_are_not_closed() {
        // distance relations of the path 0-1-2 (not distance-regular)
        let a0 = Matrix::identity(3, 3);
        let a1 = Matrix::from_row_slice(3, 3, &[0., 1., 0., 1., 0., 1., 0., 1., 0.]);
        let a2 = Matrix::from_row_slice(3, 3, &[0., 0., 1., 0., 0., 0., 1., 0., 0.]);
        match verify_scheme(vec![a0, a1, a2]) {
            Err(Error::NotAScheme { axiom, .. }) => assert_eq!(axiom, "closure"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn imprimitive_scheme_orders_classes() {
        // two disjoint triangles: A_1 joins the triangles, A_2 stays inside
        let n = 6;
        let a0 = Matrix::identity(n, n);
        let other = Matrix::from_fn(n, n, |u, v| if u / 3 != v / 3 { 1.0 } else { 0.0 });
        let same = Matrix::from_fn(n, n, |u, v| if u != v && u / 3 == v / 3 { 1.0 } else { 0.0 });
        let s = verify_scheme(vec![a0, same, other]).unwrap();
        let p = p_polynomial_check(&s).unwrap();
        assert_eq!(p.ordering, vec![0, 2, 1]);
    }

    #[test]
    fn rook_scheme_is_not_p_polynomial() {
        // 3x3 grid with same-row, same-column and neither as separate classes
        let n = 9;
        let rel = |f: fn(usize, usize, usize, usize) -> bool| {
            Matrix::from_fn(n, n, move |u, v| if f(u / 3, u % 3, v / 3, v % 3) { 1.0 } else { 0.0 })
        };
        let s = verify_scheme(vec![
            Matrix::identity(n, n),
            rel(|r, c, s, t| r == s && c != t),
            rel(|r, c, s, t| r != s && c == t),
            rel(|r, c, s, t| r != s && c != t),
        ])
        .unwrap();
        assert!(matches!(p_polynomial_check(&s), Err(Error::NotPPolynomial(_))));
    }

    #[test]
    fn file_round_trip() {
        let m = hamming_distance_matrices(1);
        let file = SchemeFile::from_matrices(&m);
        assert_eq!(file.to_matrices().unwrap(), m);
        let nested: SchemeFile = serde_json::from_str(r#"{"matrices": [[[1,0],[0,1]], [[0,1],[1,0]]]}"#).unwrap();
        assert_eq!(nested.to_matrices().unwrap(), m);
    }
}
