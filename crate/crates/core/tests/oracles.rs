//! Closed forms computed by hand, checked against the general machinery.

use elastigraph::fixtures::{fixture_endomorphism, lattes};
use elastigraph::format::Workspace;
use elastigraph::graph::extremal_length;
use elastigraph::obstruction::{obstruction_matrix, perron_eigenvalue, q_of_matrix, QValue};
use elastigraph::pl::{emb, Exponent, PlMap};
use elastigraph::ribbon::DEFAULT_BUDGET;
use elastigraph::spine::wreath_recursion;
use elastigraph::vend::validate_vend;
use elastigraph::{MultiCurve, Q};

/// For `(x, y) ↦ (d x, k y)` the horizontal curve has `k` preimages, each
/// of degree `d`, so `λ(M^p) = k d^{1−p}` and it crosses 1 at
/// `p = 1 + log k / log d`.
#[test]
fn lattes_family_closed_forms() {
    for (d, k) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
        let ws = Workspace::parse(&lattes(d, k)).unwrap();
        let v = validate_vend(&ws, &format!("lattes-k{k}d{d}"), DEFAULT_BUDGET).unwrap();
        let c = ws.curve("horizontal").unwrap().curve.clone();
        let m = obstruction_matrix(&v, &c);
        assert!(m.is_forward_invariant(), "d = {d}, k = {k}");
        for p in [1.0, 1.5, 2.0, 3.0, 4.5] {
            let lam = perron_eigenvalue(&m.at(Exponent::Finite(p))).value();
            let want = k as f64 * (d as f64).powf(1.0 - p);
            assert!((lam - want).abs() <= 1e-9 * want.max(1.0), "d = {d}, k = {k}, p = {p}: {lam} vs {want}");
        }
        let q = 1.0 + (k as f64).ln() / (d as f64).ln();
        match q_of_matrix(&m).unwrap() {
            QValue::At(x) => assert!((x - q).abs() <= 1e-6, "d = {d}, k = {k}: {x} vs {q}"),
            other => panic!("d = {d}, k = {k}: {other:?}"),
        }
    }
}

#[test]
fn k2d2_frozen() {
    let v = fixture_endomorphism("obstructed-k2d2").unwrap();
    assert_eq!(v.degree(), 4);
    let ws = elastigraph::fixtures::load_fixture("obstructed-k2d2").unwrap();
    let c = ws.curve("horizontal").unwrap().curve.clone();
    let m = obstruction_matrix(&v, &c);
    assert_eq!(m.exact(2), vec![vec![Q::from_integer(1.into())]]);
    assert_eq!(m.exact(3), vec![vec![Q::new(1.into(), 2.into())]]);
}

#[test]
fn theta_frozen() {
    let v = fixture_endomorphism("theta").unwrap();
    assert_eq!(v.degree(), 2);
    let a0 = &v.gamma0.alpha;
    let g = &v.gamma0.graph;
    // unit lengths: a loop around one marked point crosses two edges once
    let c = MultiCurve::parse(g, "a ~c").unwrap();
    assert_eq!(extremal_length(&c, a0).unwrap(), Q::from_integer(2.into()));
    assert_eq!(extremal_length(&c.union(&c), a0).unwrap(), Q::from_integer(8.into()));
    // b0 and b1 both run over c at speed 1
    let psi = PlMap::constant_speed(&v.phi, &v.gamma1.alpha, a0);
    assert_eq!(emb(&psi), Q::from_integer(2.into()));
    let rules = wreath_recursion(&v).unwrap().rules();
    assert_eq!(rules, ["a(0w) = 1·b(w)", "a(1w) = 0·A(w)", "b(0w) = 1·w", "b(1w) = 0·w"]);
}

#[test]
fn loop_doubling_frozen() {
    let v = fixture_endomorphism("loop-doubling").unwrap();
    let psi = PlMap::constant_speed(&v.phi, &v.gamma1.alpha, &v.gamma0.alpha);
    // a0 collapses, a1 runs once over a at speed 1
    assert_eq!(emb(&psi), Q::from_integer(1.into()));
    assert_eq!(wreath_recursion(&v).unwrap().rules(), ["a(0w) = 1·w", "a(1w) = 0·a(w)"]);
}
