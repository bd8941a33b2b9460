use mzsim_core::linalg::{
    apply_unitary, expectation, hermitian_eigenvalues, partial_trace_ancilla, tensor,
    tensor_density, validate_density, ComplexMatrix, DensityOperator, GateMatrix,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

/// `G G^dag / tr(G G^dag)` for a random complex `G`.
fn density(dim: usize) -> impl Strategy<Value = DensityOperator> {
    complex_entries(dim * dim)
        .prop_filter("non-degenerate", |g| g.iter().map(|v| v.norm_sqr()).sum::<f64>() > 1e-2)
        .prop_map(move |g| {
            let g = ComplexMatrix::from_row_major(dim, &g).unwrap();
            let gg = g * g.adjoint();
            let tr = gg.trace().re;
            DensityOperator::new(gg.scale_real(1.0 / tr)).unwrap()
        })
}

/// Modified Gram-Schmidt on the columns of a random complex matrix.
fn unitary(dim: usize) -> impl Strategy<Value = GateMatrix> {
    complex_entries(dim * dim).prop_filter_map("rank deficient", move |g| {
        let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|c| (0..dim).map(|r| g[r * dim + c]).collect()).collect();
        for c in 0..dim {
            for prev in 0..c {
                let overlap: Complex64 = cols[prev].iter().zip(&cols[c]).map(|(p, v)| p.conj() * v).sum();
                let (done, rest) = cols.split_at_mut(c);
                for (v, p) in rest[0].iter_mut().zip(&done[prev]) {
                    *v -= overlap * p;
                }
            }
            let norm = cols[c].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-3 {
                return None;
            }
            cols[c].iter_mut().for_each(|v| *v /= norm);
        }
        let entries: Vec<Complex64> = (0..dim).flat_map(|r| cols.iter().map(move |col| col[r])).collect();
        GateMatrix::new(ComplexMatrix::from_row_major(dim, &entries).unwrap()).ok()
    })
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_entries(dim * dim).prop_map(move |g| {
        let g = ComplexMatrix::from_row_major(dim, &g).unwrap();
        (g + g.adjoint()).scale_real(0.5)
    })
}

proptest! {
    #[test]
    fn partial_trace_undoes_tensor(a in density(2), b in density(2)) {
        let joint = tensor_density(&a, &b).unwrap();
        let reduced = partial_trace_ancilla(&joint).unwrap();
        prop_assert!(reduced.matrix().max_abs_diff(a.matrix()) <= 1e-12);
        prop_assert!(reduced.validate().passed);
    }

    #[test]
    fn unitary_conjugation_preserves_spectrum(rho in density(4), u in unitary(4)) {
        let out = apply_unitary(&rho, &u).unwrap();
        let report = validate_density(out.matrix(), 1e-10);
        prop_assert!(report.passed, "{:?}", report);
        let before = hermitian_eigenvalues(rho.matrix());
        let after = hermitian_eigenvalues(out.matrix());
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn single_qubit_conjugation_preserves_trace(rho in density(2), u in unitary(2)) {
        let out = apply_unitary(&rho, &u).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(out.matrix().hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn expectation_is_linear(rho in density(4), sigma in density(4), a in hermitian(4), b in hermitian(4), x in -2.0f64..2.0, t in 0.0f64..1.0) {
        let combo = a.scale_real(x) + b;
        let lhs = expectation(&rho, &combo).unwrap();
        let rhs = x * expectation(&rho, &a).unwrap() + expectation(&rho, &b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);

        let mixed = DensityOperator::new(rho.matrix().scale_real(t) + sigma.matrix().scale_real(1.0 - t)).unwrap();
        let lhs = expectation(&mixed, &a).unwrap();
        let rhs = t * expectation(&rho, &a).unwrap() + (1.0 - t) * expectation(&sigma, &a).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn tensor_mixed_product(a in complex_entries(4), b in complex_entries(4), c in complex_entries(4), d in complex_entries(4)) {
        let m = |v: &[Complex64]| ComplexMatrix::from_row_major(2, v).unwrap();
        let (a, b, c, d) = (m(&a), m(&b), m(&c), m(&d));
        let lhs = tensor(&a, &b).unwrap() * tensor(&c, &d).unwrap();
        let rhs = tensor(&(a * c), &(b * d)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn tensor_is_bilinear(a in complex_entries(4), b in complex_entries(4), c in complex_entries(4), s in -3.0f64..3.0) {
        let m = |v: &[Complex64]| ComplexMatrix::from_row_major(2, v).unwrap();
        let (a, b, c) = (m(&a), m(&b), m(&c));
        let lhs = tensor(&(a.scale_real(s) + b), &c).unwrap();
        let rhs = tensor(&a, &c).unwrap().scale_real(s) + tensor(&b, &c).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }
}

#[test]
fn kronecker_elements_follow_target_ancilla_order() {
    // (a ⊗ b)[2i+k][2j+l] = a[i][j] b[k][l], checked against every index.
    let a = ComplexMatrix::from_row_major(2, &[1.0, 2.0, 3.0, 4.0].map(|x| Complex64::new(x, 0.0))).unwrap();
    let b = ComplexMatrix::from_row_major(2, &[5.0, 6.0, 7.0, 8.0].map(|x| Complex64::new(0.0, x))).unwrap();
    let t = tensor(&a, &b).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    assert_eq!(t[(2 * i + k, 2 * j + l)], a[(i, j)] * b[(k, l)]);
                }
            }
        }
    }
}
