use elastigraph::random;
use elastigraph::MultiCurve;
use elastigraph::traintrack::{check_witness, exhaustive_simple_curves, is_simple, stitch_simple};
use num::ToPrimitive;
use rand::Rng;

#[test]
fn stitched_curves_are_simple_and_realize_weights() {
    let mut r = random::rng(99);
    let mut compared = 0;
    for _ in 0..100 {
        let g = random::small_graph(&mut r);
        let t = random::track(&mut r, &g);
        let choices: &[u64] = if r.gen_bool(0.6) { &[0, 0, 2] } else { &[0, 2, 4] };
        let wt = random::weighted_track(&mut r, &t, choices);
        let w: Vec<u64> = wt.weights.iter().map(|x| x.to_u64().unwrap()).collect();
        let s = stitch_simple(&wt).unwrap();
        assert_eq!(s.curve.edge_counts(g.edge_count()), w);
        assert!(s.curve.components().iter().all(|c| t.is_legal(c)));
        assert!(check_witness(&g, &s));
        assert!(s.curve.is_empty() || is_simple(&g, &s.curve).is_ribbon());
        if w.iter().sum::<u64>() <= 8 {
            let all = exhaustive_simple_curves(&t, &w);
            assert!(all.contains(&s.curve), "{} missing from the oracle", s.curve.display(&g));
            compared += 1;
        }
    }
    assert!(compared >= 30, "only {compared} instances small enough for the oracle");
}

#[test]
fn oracle_on_the_loop() {
    let mut r = random::rng(5);
    let g = random::graph(&mut r, 1, 1);
    assert_eq!(g.edge_count(), 1);
    let t = random::track(&mut r, &g);
    let one = MultiCurve::parse(&g, "e0").unwrap();
    assert_eq!(exhaustive_simple_curves(&t, &[1]), vec![one.clone()]);
    // two parallel copies, never the doubled loop
    assert_eq!(exhaustive_simple_curves(&t, &[2]), vec![one.union(&one)]);
}
