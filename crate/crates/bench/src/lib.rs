//! Inputs shared by the benchmarks.

use elastigraph::fixtures::fixture_endomorphism;
use elastigraph::vend::{iterate, DEFAULT_TOWER_CAP};
use elastigraph::{Elastic, GraphMap};

/// `φ_n` of a fixture with the lengths on both sides.
pub fn level(fixture: &str, n: usize) -> (GraphMap, Elastic, Elastic) {
    let v = fixture_endomorphism(fixture).expect("known fixture");
    let t = iterate(&v, n, DEFAULT_TOWER_CAP).expect("tower fits");
    let l = t.level(n);
    (l.phi.clone(), l.alpha.clone(), t.level(0).alpha.clone())
}

/// Dense nonnegative matrix with a fixed pattern, for eigenvalue timings.
pub fn pattern_matrix(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if (i * 7 + j * 3) % 5 == 0 { ((i + j) % 3 + 1) as f64 * 0.25 } else { 0.0 }).collect())
        .collect()
}
