//! Explicit many-body oracle shared by the integration tests.

use ffent::linalg::Matrix;
use nalgebra::SymmetricEigen;

/// Many-body Hamiltonian Σ Λ_mn c†_m c_n in the occupation basis, with the
/// Jordan–Wigner string ordered by mode index.
fn many_body_hamiltonian(lambda: &Matrix) -> Matrix {
    let modes = lambda.nrows();
    let dim = 1usize << modes;
    let mut h = Matrix::zeros(dim, dim);
    for s in 0..dim {
        for n in 0..modes {
            if s >> n & 1 == 0 {
                continue;
            }
            h[(s, s)] += lambda[(n, n)];
            for m in 0..modes {
                if m == n || lambda[(m, n)] == 0.0 || s >> m & 1 == 1 {
                    continue;
                }
                let (lo, hi) = (m.min(n), m.max(n));
                let between = ((s >> (lo + 1)) & ((1usize << (hi - lo - 1)) - 1)).count_ones();
                let sign = if between % 2 == 0 { 1.0 } else { -1.0 };
                let t = (s ^ (1 << n)) | (1 << m);
                h[(t, s)] += sign * lambda[(m, n)];
            }
        }
    }
    h
}

fn number_operator(modes: usize) -> Matrix {
    let dim = 1usize << modes;
    Matrix::from_fn(dim, dim, |r, c| if r == c { r.count_ones() as f64 } else { 0.0 })
}

/// Entropy of modes 0..=ell from the explicit ground state of H − μN̂.
pub fn partial_trace_entropy(lambda: &Matrix, chemical_potential: f64, ell: usize) -> f64 {
    let modes = lambda.nrows();
    let h = many_body_hamiltonian(lambda) - number_operator(modes) * chemical_potential;
    let eig = SymmetricEigen::new(h);
    let ground = eig.eigenvalues.imin();
    let mut sorted: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    sorted.sort_by(f64::total_cmp);
    assert!(sorted[1] - sorted[0] > 1e-6, "many-body ground state is degenerate");
    let psi = eig.eigenvectors.column(ground);
    let inner = 1usize << (ell + 1);
    let outer = 1usize << (modes - ell - 1);
    // amplitude as an inner × outer matrix, part-1 modes in the low bits
    let amp = Matrix::from_fn(inner, outer, |a, b| psi[a + b * inner]);
    let rho = &amp * amp.transpose();
    let weights = SymmetricEigen::new(rho).eigenvalues;
    -weights.iter().filter(|&&w| w > 1e-300).map(|w| w * w.ln()).sum::<f64>()
}
