use std::sync::Arc;

use elastigraph::graph::{extremal_length, Elastic, MultiCurve, RibbonGraph, Q};
use elastigraph::random::{self, Rand};
use elastigraph::thicken::{build_thickening, thickening_bounds, thickening_factor};
use elastigraph::traintrack::{stitch_simple, TrainTrack};
use num::{One, Zero};
use rand::Rng;

/// A trivalent graph, lengths and a nonempty simple multi-curve on it.
fn instance(r: &mut Rand) -> (Arc<RibbonGraph>, Elastic, MultiCurve) {
    loop {
        let k = r.gen_range(1..=3);
        let g = random::trivalent(r, k);
        let alpha = random::lengths(r, &g);
        let t = TrainTrack::singletons(g.clone()).unwrap();
        let w = random::weighted_track(r, &t, &[0, 2, 2, 4]);
        if w.weights.iter().all(Zero::is_zero) {
            continue;
        }
        let s = stitch_simple(&w).unwrap();
        return (g, alpha, s.curve);
    }
}

#[test]
fn sandwich_on_random_trivalent_graphs() {
    let mut r = random::rng(2024);
    for _ in 0..50 {
        let (g, alpha, c) = instance(&mut r);
        let m = alpha.min_length();
        let el = extremal_length(&c, &alpha).unwrap();
        let mut last: Option<Q> = None;
        for k in [4, 8, 16] {
            let eps = &m / Q::from_integer(k.into());
            let t = build_thickening(&g, &alpha, &eps).unwrap();
            assert_eq!(t.boundary.len(), g.faces().len());
            assert_eq!(t.area(), &alpha.total_length() * &eps);
            let b = thickening_bounds(&g, &alpha, &c, &eps).unwrap();
            assert_eq!(b.lower, el);
            assert_eq!(&b.upper / &b.lower, thickening_factor(&eps, &m));
            assert_eq!(&b.upper / &b.lower, Q::one() + Q::from_integer(8.into()) / Q::from_integer(k.into()));
            assert!(b.annuli_area <= &eps * &el * b.factor());
            let ratio = &b.upper / &b.lower;
            assert!(ratio > Q::one());
            if let Some(prev) = last {
                assert!(ratio < prev);
                // the excess over 1 halves with ε
                assert_eq!((&ratio - Q::one()) * Q::from_integer(2.into()), prev - Q::one());
            }
            last = Some(ratio);
        }
    }
}
