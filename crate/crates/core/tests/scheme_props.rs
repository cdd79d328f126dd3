use ffent::error::Error;
use ffent::hypercube::{binomial, hypercube_operators};
use ffent::linalg::Matrix;
use ffent::scheme::{
    dual_pair, evaluate_polynomial, hamming_distance_matrices, p_polynomial_check, q_polynomial_check, verify_scheme,
    SchemeFile, SchemeReport,
};

#[test]
fn hamming_schemes_verify() {
    for d in 1..=6 {
        let s = verify_scheme(hamming_distance_matrices(d)).unwrap();
        let n = 1usize << d;
        assert_eq!(s.classes(), d);
        assert!(s.closure_residual() <= 1e-9);
        for i in 0..=d {
            let row_sum = s.adjacency()[i].row(0).sum();
            assert_eq!(s.intersection(i, i, 0) as f64, row_sum);
            assert_eq!(s.valencies()[i] as u128, binomial(d, i));
            for j in 0..=d {
                for k in 0..=d {
                    assert!(s.intersection(i, j, k) >= 0);
                }
            }
        }
        let e = s.idempotents();
        let mut sum = Matrix::zeros(n, n);
        for i in 0..=d {
            sum += &e[i];
            for j in 0..=d {
                let prod = &e[i] * &e[j];
                let want = if i == j { e[i].clone() } else { Matrix::zeros(n, n) };
                assert!((prod - want).amax() <= 1e-10);
            }
        }
        assert!((sum - Matrix::identity(n, n)).amax() <= 1e-10);
        for (j, row) in s.tables().eigenmatrix.iter().enumerate() {
            assert!((row[1] - (d as f64 - 2.0 * j as f64)).abs() < 1e-10);
            assert_eq!(s.tables().ranks[j] as u128, binomial(d, j));
        }
    }
}

#[test]
fn hamming_square_counts() {
    let s = verify_scheme(hamming_distance_matrices(2)).unwrap();
    // brute force: common neighbours of a pair at distance k
    let a = &s.adjacency()[1];
    for k in 0..=2 {
        let (u, v) = (0usize, [0usize, 1, 3][k]);
        let common = (0..4).filter(|&w| a[(u, w)] == 1.0 && a[(w, v)] == 1.0).count() as i64;
        assert_eq!(s.intersection(1, 1, k), common);
    }
    assert_eq!(s.intersection(1, 1, 0), 2);
    assert_eq!(s.intersection(1, 1, 2), 2);
    assert_eq!(s.intersection(1, 1, 1), 0);
}

#[test]
fn dual_adjacency_is_the_hypercube_dual() {
    for d in 1..=6 {
        let s = verify_scheme(hamming_distance_matrices(d)).unwrap();
        let duals = dual_pair(&s, 0).unwrap();
        let expected = hypercube_operators(d).unwrap().dual_diagonal();
        for (x, y) in duals.dual_adjacency[1].iter().zip(&expected) {
            assert!((x - y).abs() <= 1e-12, "d={d}: {x} vs {y}");
        }
        let n = 1usize << d;
        let mut total = vec![0.0; n];
        for (i, ei) in duals.dual_idempotents.iter().enumerate() {
            for (j, ej) in duals.dual_idempotents.iter().enumerate() {
                for v in 0..n {
                    let want = if i == j { ei[v] } else { 0.0 };
                    assert_eq!(ei[v] * ej[v], want);
                }
            }
            for (acc, x) in total.iter_mut().zip(ei) {
                *acc += x;
            }
        }
        assert!(total.iter().all(|&x| x == 1.0));
    }
}

#[test]
fn hamming_distances_are_polynomials_in_adjacency() {
    for d in 1..=6 {
        let s = verify_scheme(hamming_distance_matrices(d)).unwrap();
        let poly = p_polynomial_check(&s).unwrap();
        assert_eq!(poly.ordering, (0..=d).collect::<Vec<_>>());
        let a1 = &s.adjacency()[1];
        for (i, coeffs) in poly.coefficients.iter().enumerate() {
            assert_eq!(coeffs.len(), i + 1);
            assert!((evaluate_polynomial(coeffs, a1) - &s.adjacency()[i]).amax() <= 1e-8);
        }
        if d <= 4 {
            assert_eq!(q_polynomial_check(&s), Some(true));
        } else {
            assert_eq!(q_polynomial_check(&s), None);
        }
    }
}

#[test]
fn shuffled_classes_are_reordered() {
    let mut m = hamming_distance_matrices(4);
    m.swap(1, 2);
    let s = verify_scheme(m).unwrap();
    let poly = p_polynomial_check(&s).unwrap();
    // the distance-2 graph at index 1 is disconnected, so index 2 leads
    assert_eq!(poly.ordering, vec![0, 2, 1, 3, 4]);
}

#[test]
fn reports_name_the_broken_axiom() {
    let report = SchemeReport::build(hamming_distance_matrices(3)).unwrap();
    match report {
        SchemeReport::Valid { classes, p_polynomial, .. } => {
            assert_eq!(classes, 3);
            assert!(p_polynomial.is_some());
        }
        other => panic!("unexpected {other:?}"),
    }
    let mut m = hamming_distance_matrices(3);
    // move the pair (0, 1) from distance 1 to distance 2
    for (u, v) in [(0, 1), (1, 0)] {
        m[1][(u, v)] = 0.0;
        m[2][(u, v)] = 1.0;
    }
    match SchemeReport::build(m).unwrap() {
        SchemeReport::NotAScheme { axiom, witness } => {
            assert_eq!(axiom, "closure");
            assert!(!witness.is_empty());
        }
        other => panic!("unexpected {other:?}"),
    }
    let json = serde_json::to_value(SchemeReport::build(hamming_distance_matrices(1)).unwrap()).unwrap();
    assert_eq!(json["status"], "valid");
}

#[test]
fn file_format_round_trips() {
    let m = hamming_distance_matrices(3);
    let text = serde_json::to_string(&SchemeFile::from_matrices(&m)).unwrap();
    let back: SchemeFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_matrices().unwrap(), m);
    let bad: SchemeFile = serde_json::from_str(r#"{"matrices": [[1, 0, 0]]}"#).unwrap();
    assert!(bad.to_matrices().is_err());
}

#[test]
fn non_square_input_is_not_a_scheme() {
    let m = vec![Matrix::identity(2, 2), Matrix::zeros(3, 3)];
    assert!(matches!(verify_scheme(m), Err(Error::NotAScheme { .. })));
}
