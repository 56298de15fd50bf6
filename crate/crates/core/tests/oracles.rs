mod common;

use std::f64::consts::PI;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reconlab_core::corpus::cycle_corpus;
use reconlab_core::graph6::Graph6Record;
use reconlab_core::matrix::{
    deck, determinant, eigen_sorted, majors_multiset, shifted_det, SymmetricMatrix,
};
use reconlab_core::presentation::{
    factor_presentation, project_origin, t_of_lambda, volume_eigenvector, Presentation,
};
use reconlab_core::solid_angle::{angle_fraction, Cone};

use common::{cofactor_det, gaussian_matrix, sym};

fn sym_strategy(max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-3.0..3.0f64, n * (n + 1) / 2).prop_map(move |upper| {
            let mut m = vec![vec![0.0; n]; n];
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    m[i][j] = upper[k];
                    m[j][i] = upper[k];
                    k += 1;
                }
            }
            m
        })
    })
}

proptest! {
    #[test]
    fn lu_determinant_matches_cofactor(rows in sym_strategy(6)) {
        let m = sym(rows.clone());
        let lu = determinant(m.as_matrix());
        let oracle = cofactor_det(&rows);
        prop_assert!((lu - oracle).abs() <= 1e-9 * oracle.abs().max(1.0), "{lu} vs {oracle}");
    }

    #[test]
    fn shifted_det_matches_cofactor(rows in sym_strategy(5), lambda in -3.0..3.0f64, t in -3.0..3.0f64) {
        let n = rows.len();
        let shifted: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| rows[i][j] + t - if i == j { lambda } else { 0.0 }).collect())
            .collect();
        let got = shifted_det(&sym(rows), lambda, t);
        let oracle = cofactor_det(&shifted);
        prop_assert!((got - oracle).abs() <= 1e-9 * oracle.abs().max(1.0));
    }

    #[test]
    fn eigen_trace_and_determinant(rows in sym_strategy(6)) {
        let m = sym(rows.clone());
        let e = eigen_sorted(&m);
        let trace: f64 = (0..rows.len()).map(|i| rows[i][i]).sum();
        let product: f64 = e.values.iter().product();
        prop_assert!((e.values.iter().sum::<f64>() - trace).abs() <= 1e-9 * m.scale() * rows.len() as f64);
        prop_assert!((product - cofactor_det(&rows)).abs() <= 1e-8 * product.abs().max(1.0));
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn cycle_spectrum_closed_form() {
    for n in [5usize, 6, 7, 8] {
        let a = Graph6Record::cycle(n).adjacency_matrix().unwrap();
        let mut expected: Vec<f64> = (0..n)
            .map(|k| 2.0 * (2.0 * PI * k as f64 / n as f64).cos())
            .collect();
        expected.sort_by(|x, y| y.total_cmp(x));
        let got = eigen_sorted(&a).values;
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-12, "C{n}: {got:?} vs {expected:?}");
        }
    }
}

#[test]
fn c5_spectrum_multiplicities() {
    let a = Graph6Record::cycle(5).adjacency_matrix().unwrap();
    let e = eigen_sorted(&a);
    let lowest = 2.0 * (4.0 * PI / 5.0).cos();
    // the bottom eigenvalue is double; for t < -0.72 the simple eigenvalue
    // 2 + 5t of A + tJ (eigenvector 1) drops below it and becomes the lowest
    assert!((e.values[3] - lowest).abs() < 1e-12 && (e.values[4] - lowest).abs() < 1e-12);
    assert!((e.values[0] - 2.0).abs() < 1e-12);
    let shifted = eigen_sorted(&a.plus_ones(-1.0));
    assert!((shifted.lowest() + 3.0).abs() < 1e-12);
    assert!((shifted.lowest_gap() - (lowest + 3.0)).abs() < 1e-12);
}

#[test]
fn corpus_majors_and_determinants_agree_with_cofactor() {
    for p in cycle_corpus().unwrap() {
        let ma = majors_multiset(&p.a).unwrap();
        let mb = majors_multiset(&p.b).unwrap();
        assert_eq!(ma.len(), p.a.n());
        for (x, y) in ma.iter().zip(&mb) {
            assert!((x - y).abs() < 1e-9, "{}", p.name);
        }
        let mut oracle: Vec<f64> = deck(&p.a)
            .unwrap()
            .iter()
            .map(|m| cofactor_det(&m.rows()))
            .collect();
        oracle.sort_by(f64::total_cmp);
        for (x, y) in ma.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-9);
        }
        // determinant bridge: det(A + tJ) = det(B + tJ)
        for t in [-4.0, -1.5, 0.0, 0.5, 3.0] {
            let da = cofactor_det(&p.a.plus_ones(t).rows());
            let db = cofactor_det(&p.b.plus_ones(t).rows());
            assert!((da - db).abs() <= 1e-9 * da.abs().max(1.0), "{} at t={t}", p.name);
        }
    }
}

#[test]
fn volume_eigenvector_matches_triangle_areas() {
    // areas of conv{0, u_j, u_k} by the shoelace formula
    let pts = [[2.0, 0.0], [0.0, 1.0], [-1.0, -1.0]];
    let area = |p: [f64; 2], q: [f64; 2]| 0.5 * (p[0] * q[1] - p[1] * q[0]).abs();
    let raw = [area(pts[1], pts[2]), area(pts[0], pts[2]), area(pts[0], pts[1])];
    let total: f64 = raw.iter().sum();
    let u = Presentation::from_columns(&pts.map(|p| p.to_vec())).unwrap();
    let alpha = volume_eigenvector(&u).unwrap();
    for (a, r) in alpha.iter().zip(raw) {
        assert!((a - r / total).abs() < 1e-12);
    }
    assert!((alpha[0] - 0.2).abs() < 1e-12 && (alpha[1] - 0.4).abs() < 1e-12);
}

#[test]
fn origin_distance_by_least_squares() {
    // distance from 0 to the line through (1, 0) and (0, 2), independently
    let (p, q) = (DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, 2.0]));
    let d = &q - &p;
    let s = -p.dot(&d) / d.dot(&d);
    let foot = &p + &d * s;
    let u = Presentation::from_columns(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
    let path = project_origin(&u).unwrap();
    assert!((path.u0_norm_sq - 0.8).abs() < 1e-12);
    assert!((&path.u0 - &foot).amax() < 1e-12);
}

#[test]
fn t_of_lambda_against_explicit_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 3..=8 {
        let w = gaussian_matrix(&mut rng, n, n);
        let a = SymmetricMatrix::from_dmatrix(w.transpose() * &w).unwrap();
        let inv = a.plus_identity(1.5).into_matrix().try_inverse().unwrap();
        let expected = -1.0 / inv.sum();
        let t = t_of_lambda(&a, 1.5).unwrap();
        assert!((t - expected).abs() < 1e-10);
        let u = factor_presentation(&a).unwrap();
        assert!(u.gram().max_abs_diff(&a) <= 1e-9 * a.scale());
    }
}

#[test]
fn spherical_triangle_by_girard() {
    // octant-like cones from Girard's theorem: Ω = A + B + C - π
    let cone = |g: &[[f64; 3]]| {
        Cone::new(
            DVector::zeros(3),
            g.iter().map(|x| DVector::from_row_slice(x)).collect(),
            None,
        )
        .unwrap()
    };
    let a = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0]];
    let unit: Vec<DVector<f64>> = a.iter().map(|x| DVector::from_row_slice(x).normalize()).collect();
    let dihedral = |p: usize, q: usize, r: usize| {
        // angle at vertex p between great-circle arcs towards q and r
        let tq = &unit[q] - &unit[p] * unit[p].dot(&unit[q]);
        let tr = &unit[r] - &unit[p] * unit[p].dot(&unit[r]);
        (tq.dot(&tr) / (tq.norm() * tr.norm())).acos()
    };
    let omega = dihedral(0, 1, 2) + dihedral(1, 0, 2) + dihedral(2, 0, 1) - PI;
    let got = angle_fraction(&cone(&a), 1, 0).unwrap().fraction;
    assert!((got - omega / (4.0 * PI)).abs() < 1e-12);
}
