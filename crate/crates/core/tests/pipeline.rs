use std::f64::consts::PI;

use negtype_core::verify::{run_suite, VerifyConfig};
use negtype_core::*;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn p3_from_csv_through_every_stage() {
    let x = io::parse_matrix_csv("a,b,c\n0,1,2\n1,0,1\n2,1,0\n").unwrap();
    assert_eq!(x.labels().unwrap(), ["a", "b", "c"]);

    let sup = supremal_negative_type(&x, &tol()).unwrap();
    let p = sup.p_sup.finite().unwrap();
    assert!((p - 2.0).abs() < 1e-6);
    let (lo, hi) = sup.bracket.unwrap();
    assert!(lo <= p && p <= hi && hi - lo <= tol().bisect_tol * (1.0 + 1e-9));

    let w = witness_null_simplex(&x, &tol()).unwrap();
    assert_eq!(w.simplex.shape(), (2, 1));
    assert_eq!(w.simplex.side_b(), [1]);
    assert!(w.gap.abs() <= 1e-6 * w.scale);

    let g = negative_type_gap(&x, 1.0, &tol()).unwrap();
    assert!((g.gamma.to_f64() - 0.5).abs() < 1e-9);
    let z = zeta_bound(&x, 1.0, g.gamma.to_f64()).unwrap();
    assert!((z.interval_hi.to_f64() - 2.0).abs() < 1e-9);
}

#[test]
fn square_circle_witness_pairs_opposite_points() {
    let x = gen_circle(&[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]).unwrap();
    let w = witness_null_simplex(&x, &tol()).unwrap();
    let (mut a, mut b) = (w.simplex.side_a().to_vec(), w.simplex.side_b().to_vec());
    a.sort();
    b.sort();
    assert!(a == [0, 2] && b == [1, 3] || a == [1, 3] && b == [0, 2]);
    for v in w.simplex.weights_a().iter().chain(w.simplex.weights_b()) {
        assert!((v - 0.5).abs() < 1e-6);
    }
    assert!(w.gap.abs() < 1e-6 * w.scale);
}

#[test]
fn failing_gap_reports_violating_simplex() {
    let x = gen_path(4, 1.0).unwrap();
    let g = negative_type_gap(&x, 3.0, &tol()).unwrap();
    assert_eq!(g.status, Status::Fail);
    assert_eq!(g.gamma, ExtendedReal::NegInfinity);
    assert!(simplex_gap(&x, &g.arg_simplex, 3.0).unwrap() < 0.0);
}

#[test]
fn discrete_space_is_unbounded_everywhere() {
    let x = gen_discrete(6).unwrap();
    assert_eq!(
        supremal_negative_type(&x, &tol()).unwrap().p_sup,
        ExtendedReal::PosInfinity
    );
    assert!(matches!(
        witness_null_simplex(&x, &tol()),
        Err(Error::NoBoundaryWitness(_))
    ));
    let g = negative_type_gap(&x, 1.0, &tol()).unwrap();
    let z = zeta_bound(&x, 1.0, g.gamma.to_f64()).unwrap();
    assert_eq!(z.zeta, ExtendedReal::PosInfinity);
    assert!((g.gamma.to_f64() - (1.0 - gamma_fn(6).unwrap())).abs() < 1e-9);
}

#[test]
fn generator_specs_match_direct_construction() {
    let pairs: [(&str, FiniteSemiMetricSpace); 4] = [
        ("star:3", gen_star(3, 1.0).unwrap()),
        ("path:4,2", gen_path(4, 2.0).unwrap()),
        (
            "circle:0;2pi/3;4pi/3",
            gen_circle(&[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]).unwrap(),
        ),
        (
            "random:5,7,1,1.5",
            gen_random_semimetric(5, 7, 1.0, 1.5).unwrap(),
        ),
    ];
    for (spec, direct) in pairs {
        let built = spec.parse::<io::GenSpec>().unwrap().build(0).unwrap();
        assert_eq!(built.space.matrix(), direct.matrix(), "{spec}");
    }
}

#[test]
fn weighted_tree_zeta_uses_formula_gap() {
    let t = WeightedTree::new(vec![(0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5)]).unwrap();
    let x = t.space();
    let exact = tree_gap(&t);
    let g = negative_type_gap(&x, 1.0, &tol()).unwrap();
    assert!((g.gamma.to_f64() - exact).abs() < 1e-9);
    let z = zeta_bound(&x, 1.0, exact).unwrap();
    let p = supremal_negative_type(&x, &tol()).unwrap().p_sup.to_f64();
    assert!(z.interval_hi.to_f64() <= p + 1e-6);
}

#[test]
fn full_property_suite_passes() {
    let bad = FiniteSemiMetricSpace::from_matrix(&[vec![0.0, 1.0], vec![3.0, 0.0]]);
    let report = run_suite(&VerifyConfig::default(), vec![("asymmetric".into(), bad)]);
    assert!(report.all_passed(), "{}", report.render());
    assert_eq!(report.rejected.len(), 1);
    assert_eq!(report.outcomes.len(), 23);
    assert!(report.outcomes.iter().all(|o| o.checked > 0));
}

#[test]
fn oracle_is_seed_deterministic() {
    let x = gen_random_semimetric(5, 3, 0.5, 2.0).unwrap();
    let a = brute_force_gap(&x, 1.0, 2_000, 11).unwrap();
    let b = brute_force_gap(&x, 1.0, 2_000, 11).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.simplex, b.simplex);
}
