//! Train tracks on ribbon graphs and stitching of integer weights into
//! simple multi-curves.
//!
//! A gate is a class of half-edges at a vertex. A legal curve always leaves a
//! vertex through a different gate from the one it arrived by, and weights
//! must satisfy the triangle inequality `w(g) ≤ Σ_{g'≠g} w(g')` at each gate.

use std::sync::Arc;

use num::{Integer, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{canonical_cyclic, invert_word, Dart, MultiCurve, RibbonGraph, Q};
use crate::ribbon::{curve_map, StrandOrder};

pub use crate::ribbon::is_simple;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrackError {
    #[error("gates at `{0}` do not partition its star")]
    NotPartition(String),
    #[error("vertex `{0}` has fewer than two gates")]
    TooFewGates(String),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("edge `{0}` has negative weight")]
    Negative(String),
    #[error("gate {gate} at `{vertex}` has weight {weight}, more than the {rest} of the other gates")]
    Inequality { vertex: String, gate: usize, weight: Q, rest: Q },
    #[error("edge `{0}` has non-integer weight")]
    NotInteger(String),
    #[error("total weight {total} at `{vertex}` is odd")]
    Parity { vertex: String, total: u64 },
    #[error("stitching stuck at `{0}`")]
    Stuck(String),
    #[error("no even-integer weights within the inequalities at scale {scale}: best violation {gap}")]
    NoApproximant { scale: Q, gap: Q },
}

/// A ribbon graph whose stars are partitioned into gates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainTrack {
    graph: Arc<RibbonGraph>,
    gates: Vec<Vec<Vec<Dart>>>,
    gate_of: Vec<usize>,
}

impl TrainTrack {
    /// `gates[v]` lists the gates at `v`, each as outgoing darts.
    pub fn new(graph: Arc<RibbonGraph>, gates: Vec<Vec<Vec<Dart>>>) -> Result<Self, TrackError> {
        let mut gate_of = vec![usize::MAX; graph.dart_count()];
        if gates.len() != graph.vertex_count() {
            return Err(TrackError::WeightCount { expected: graph.vertex_count(), got: gates.len() });
        }
        for (v, gs) in gates.iter().enumerate() {
            let name = graph.vertex_name(v).to_string();
            if gs.iter().filter(|g| !g.is_empty()).count() < 2 {
                return Err(TrackError::TooFewGates(name));
            }
            let mut seen = 0;
            for (k, g) in gs.iter().enumerate() {
                for &d in g {
                    if d.index() >= gate_of.len() || graph.tail(d) != v || gate_of[d.index()] != usize::MAX {
                        return Err(TrackError::NotPartition(name));
                    }
                    gate_of[d.index()] = k;
                    seen += 1;
                }
            }
            if seen != graph.degree(v) {
                return Err(TrackError::NotPartition(name));
            }
        }
        Ok(TrainTrack { graph, gates, gate_of })
    }

    /// Every half-edge in its own gate.
    pub fn singletons(graph: Arc<RibbonGraph>) -> Result<Self, TrackError> {
        let gates = (0..graph.vertex_count())
            .map(|v| graph.rotation(v).iter().map(|&d| vec![d]).collect())
            .collect();
        TrainTrack::new(graph, gates)
    }

    pub fn graph(&self) -> &Arc<RibbonGraph> {
        &self.graph
    }

    pub fn gates(&self, v: usize) -> &[Vec<Dart>] {
        &self.gates[v]
    }

    pub fn gate_of(&self, d: Dart) -> usize {
        self.gate_of[d.index()]
    }

    /// Whether consecutive darts `a` then `b` change gate at the shared vertex.
    pub fn is_legal_turn(&self, a: Dart, b: Dart) -> bool {
        let back = a.rev();
        self.graph.tail(back) == self.graph.tail(b) && self.gate_of(back) != self.gate_of(b)
    }

    /// Closed words all of whose turns, including the closing one, are legal.
    pub fn is_legal(&self, w: &[Dart]) -> bool {
        !w.is_empty() && (0..w.len()).all(|i| self.is_legal_turn(w[i], w[(i + 1) % w.len()]))
    }

    /// Weight `Σ w(e)` of each gate at `v`, counting loops once per half-edge.
    pub fn gate_weights<T: Clone + Zero + std::ops::Add<Output = T>>(&self, v: usize, w: &[T]) -> Vec<T> {
        self.gates[v]
            .iter()
            .map(|g| g.iter().fold(T::zero(), |acc, d| acc + w[d.edge()].clone()))
            .collect()
    }
}

/// A train track with weights satisfying every gate inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedTrainTrack {
    pub track: TrainTrack,
    pub weights: Vec<Q>,
    /// `(vertex, gate)` pairs where the inequality is an equality.
    pub equalities: Vec<(usize, usize)>,
}

pub fn validate_weighted_tt(t: &TrainTrack, w: Vec<Q>) -> Result<WeightedTrainTrack, TrackError> {
    let g = &t.graph;
    if w.len() != g.edge_count() {
        return Err(TrackError::WeightCount { expected: g.edge_count(), got: w.len() });
    }
    if let Some(e) = w.iter().position(|x| x.is_negative()) {
        return Err(TrackError::Negative(g.edge_name(e).to_string()));
    }
    let mut equalities = Vec::new();
    for v in 0..g.vertex_count() {
        let gw = t.gate_weights(v, &w);
        let total: Q = gw.iter().sum();
        for (k, x) in gw.iter().enumerate() {
            let rest = &total - x;
            if *x > rest {
                return Err(TrackError::Inequality { vertex: g.vertex_name(v).to_string(), gate: k, weight: x.clone(), rest });
            }
            if *x == rest {
                equalities.push((v, k));
            }
        }
    }
    Ok(WeightedTrainTrack { track: t.clone(), weights: w, equalities })
}

/// A stitched multi-curve and the strand order proving it simple.
#[derive(Clone, Debug)]
pub struct Stitched {
    pub curve: MultiCurve,
    /// Order for [`curve_map`] of `curve`.
    pub witness: StrandOrder,
}

fn integer_weights(t: &WeightedTrainTrack) -> Result<Vec<u64>, TrackError> {
    t.weights
        .iter()
        .enumerate()
        .map(|(e, x)| {
            x.is_integer()
                .then(|| x.to_integer().to_u64())
                .flatten()
                .ok_or_else(|| TrackError::NotInteger(t.track.graph.edge_name(e).to_string()))
        })
        .collect()
}

// strand end: (strand, end) with end 0 at the edge tail
type End = (usize, usize);

/// Non-crossing pairing of the strand ends at each vertex, joining ends in
/// different gates. A gate carrying half the ends must take part in every
/// join; this is the smoothing of equality gates, and it keeps each gate at
/// most half of what is left.
fn pair_ends(t: &TrainTrack, w: &[u64], first: &[usize], n: usize) -> Result<Vec<[End; 2]>, TrackError> {
    let g = &t.graph;
    let mut partner = vec![[(usize::MAX, 0); 2]; n];
    for v in 0..g.vertex_count() {
        let mut ring: Vec<(End, usize)> = Vec::new();
        for &h in g.rotation(v) {
            let e = h.edge();
            let k = t.gate_of(h);
            let ids = first[e]..first[e] + w[e] as usize;
            if h.is_forward() {
                ring.extend(ids.map(|s| ((s, 0), k)));
            } else {
                ring.extend(ids.rev().map(|s| ((s, 1), k)));
            }
        }
        let total = ring.len();
        if total % 2 == 1 {
            return Err(TrackError::Parity { vertex: g.vertex_name(v).to_string(), total: total as u64 });
        }
        let mut count = vec![0usize; t.gates[v].len()];
        for &(_, k) in &ring {
            count[k] += 1;
        }
        while !ring.is_empty() {
            let n = ring.len();
            debug_assert!(count.iter().all(|&c| 2 * c <= n));
            let tight = count.iter().position(|&c| 2 * c == n);
            let pick = (0..n).find(|&i| {
                let (a, b) = (ring[i].1, ring[(i + 1) % n].1);
                a != b && tight.map_or(true, |k| a == k || b == k)
            });
            let Some(i) = pick else {
                return Err(TrackError::Stuck(g.vertex_name(v).to_string()));
            };
            let j = (i + 1) % n;
            let (x, y) = (ring[i], ring[j]);
            partner[x.0 .0][x.0 .1] = y.0;
            partner[y.0 .0][y.0 .1] = x.0;
            count[x.1] -= 1;
            count[y.1] -= 1;
            ring.remove(i.max(j));
            ring.remove(i.min(j));
        }
    }
    Ok(partner)
}

/// Stitches integer weights with even totals into a simple multi-curve
/// with `n_c = w`, following the track's gates.
pub fn stitch_simple(t: &WeightedTrainTrack) -> Result<Stitched, TrackError> {
    let g = t.track.graph.clone();
    let w = integer_weights(t)?;
    let mut first = Vec::with_capacity(w.len());
    let mut n = 0usize;
    for &x in &w {
        first.push(n);
        n += x as usize;
    }
    let edge_of: Vec<usize> = (0..w.len()).flat_map(|e| std::iter::repeat(e).take(w[e] as usize)).collect();
    let partner = pair_ends(&t.track, &w, &first, n)?;

    // trace components as (dart, strand) sequences
    let mut used = vec![false; n];
    let mut traced: Vec<(Vec<Dart>, Vec<usize>)> = Vec::new();
    for s0 in 0..n {
        if used[s0] {
            continue;
        }
        let (mut word, mut strands) = (Vec::new(), Vec::new());
        let (mut s, mut from) = (s0, 0usize);
        loop {
            used[s] = true;
            word.push(Dart::new(edge_of[s], from == 0));
            strands.push(s);
            let (ns, nend) = partner[s][1 - from];
            if (ns, nend) == (s0, 0) {
                break;
            }
            debug_assert!(!used[ns], "strand revisited");
            s = ns;
            from = nend;
        }
        traced.push((word, strands));
    }

    // match traced components to the canonical ones of the multi-curve
    let mut canon: Vec<(Vec<Dart>, Vec<usize>)> = traced
        .into_iter()
        .map(|(word, strands)| {
            debug_assert!(t.track.is_legal(&word));
            let c = canonical_cyclic(&word);
            let m = word.len();
            let inv = invert_word(&word);
            let rstr: Vec<usize> = strands.iter().rev().copied().collect();
            for r in 0..m {
                if (0..m).all(|i| word[(r + i) % m] == c[i]) {
                    return (c, (0..m).map(|i| strands[(r + i) % m]).collect());
                }
                if (0..m).all(|i| inv[(r + i) % m] == c[i]) {
                    return (c, (0..m).map(|i| rstr[(r + i) % m]).collect());
                }
            }
            unreachable!("canonical form is a rotation of the word or its inverse")
        })
        .collect();
    canon.sort();
    let curve = MultiCurve::new(&g, canon.iter().map(|(c, _)| c.clone()).collect())
        .expect("stitched strands close up");
    debug_assert_eq!(curve.components(), canon.iter().map(|(c, _)| c.clone()).collect::<Vec<_>>());
    let mut label = vec![(0, 0); n];
    let mut base = 0;
    for (c, strands) in &canon {
        for (k, &s) in strands.iter().enumerate() {
            label[s] = (base + k, 0);
        }
        base += c.len();
    }
    let per_edge = (0..w.len()).map(|e| (first[e]..first[e] + w[e] as usize).map(|s| label[s]).collect()).collect();
    Ok(Stitched { curve, witness: StrandOrder { per_edge } })
}

/// One term of an even-integer approximation `k·w_i ≈ w`.
#[derive(Clone, Debug)]
pub struct ApproxStep {
    pub k: Q,
    pub weights: Vec<u64>,
    pub stitched: Stitched,
    /// `‖k·w_i − w‖_∞`.
    pub error: Q,
}

/// Even integers on either side of `x`.
fn even_bracket(x: &Q) -> [u64; 2] {
    let f = x.floor().to_integer();
    let lo = if f.is_even() { f } else { f - 1 };
    let lo = lo.to_u64().unwrap_or(0);
    if Q::from_integer(lo.into()) == *x {
        [lo, lo]
    } else {
        [lo, lo + 2]
    }
}

/// Largest amount by which any gate inequality fails.
fn violation(t: &TrainTrack, w: &[u64]) -> u64 {
    (0..t.graph.vertex_count())
        .flat_map(|v| {
            let gw = t.gate_weights(v, w);
            let total: u64 = gw.iter().sum();
            gw.into_iter().map(move |x| (2 * x).saturating_sub(total))
        })
        .max()
        .unwrap_or(0)
}

fn sup_error(k: &Q, wi: &[u64], w: &[Q]) -> Q {
    wi.iter()
        .zip(w)
        .map(|(&a, b)| (k * Q::from_integer(a.into()) - b).abs())
        .max()
        .unwrap_or_else(Q::zero)
}

/// Widest search over floor/ceiling choices before giving up.
const ROUNDING_CHOICES: usize = 16;

/// Even-integer weights `w_i` at scales `2^i` with `k_i = 2^{-i}`, each the
/// closest valid floor/ceiling rounding of `2^i·w`. A step never does worse
/// than doubling the previous one, so the error is non-increasing. Stops
/// early once the approximation is exact.
pub fn approx_sequence(t: &TrainTrack, w: &[Q], steps: usize) -> Result<Vec<ApproxStep>, TrackError> {
    validate_weighted_tt(t, w.to_vec())?;
    let mut out: Vec<ApproxStep> = Vec::new();
    let two = Q::from_integer(2.into());
    let mut scale = Q::one();
    for _ in 0..steps {
        let k = scale.recip();
        let brackets: Vec<[u64; 2]> = w.iter().map(|x| even_bracket(&(x * &scale))).collect();
        let free: Vec<usize> = (0..w.len()).filter(|&e| brackets[e][0] != brackets[e][1]).collect();
        let nearest: Vec<u64> = w
            .iter()
            .zip(&brackets)
            .map(|(x, b)| {
                let y = x * &scale;
                if &y - Q::from_integer(b[0].into()) <= Q::one() { b[0] } else { b[1] }
            })
            .collect();
        let mut best: Option<(Q, Vec<u64>)> = None;
        let mut gap = violation(t, &nearest);
        if gap == 0 {
            best = Some((sup_error(&k, &nearest, w), nearest));
        } else if free.len() <= ROUNDING_CHOICES {
            for mask in 0u32..(1 << free.len()) {
                let mut cand: Vec<u64> = brackets.iter().map(|b| b[0]).collect();
                for (bit, &e) in free.iter().enumerate() {
                    cand[e] = brackets[e][((mask >> bit) & 1) as usize];
                }
                let viol = violation(t, &cand);
                gap = gap.min(viol);
                if viol == 0 {
                    let err = sup_error(&k, &cand, w);
                    if best.as_ref().map_or(true, |(b, _)| err < *b) {
                        best = Some((err, cand));
                    }
                }
            }
        }
        if let Some(prev) = out.last() {
            let doubled: Vec<u64> = prev.weights.iter().map(|x| 2 * x).collect();
            if best.as_ref().map_or(true, |(err, _)| *err > prev.error) {
                best = Some((prev.error.clone(), doubled));
            }
        }
        let Some((error, weights)) = best else {
            return Err(TrackError::NoApproximant { scale, gap: Q::from_integer(gap.into()) });
        };
        let wt = validate_weighted_tt(t, weights.iter().map(|&x| Q::from_integer(x.into())).collect())?;
        let stitched = stitch_simple(&wt)?;
        let exact = error.is_zero();
        out.push(ApproxStep { k, weights, stitched, error });
        if exact {
            break;
        }
        scale *= &two;
    }
    Ok(out)
}

/// Checks a stitched witness against its curve.
pub fn check_witness(g: &Arc<RibbonGraph>, s: &Stitched) -> bool {
    crate::ribbon::check_strand_order(&curve_map(g, &s.curve), &s.witness)
}

/// Every simple legal multi-curve with edge counts exactly `w`, found by
/// enumerating legal closed words and their multisets. Exponential; meant
/// for total weight up to about 8.
pub fn exhaustive_simple_curves(t: &TrainTrack, w: &[u64]) -> Vec<MultiCurve> {
    let g = t.graph();
    let total: u64 = w.iter().sum();
    let fits = |c: &[u64]| c.iter().zip(w).all(|(a, b)| a <= b);
    let words: Vec<(Vec<Dart>, Vec<u64>)> = crate::graph::enumerate_cyclic_words(g, total as usize)
        .into_iter()
        .filter(|x| t.is_legal(x))
        .map(|x| {
            let mut c = vec![0; w.len()];
            for d in &x {
                c[d.edge()] += 1;
            }
            (x, c)
        })
        .filter(|(_, c)| fits(c))
        .collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut left = w.to_vec();
    fn go(
        words: &[(Vec<Dart>, Vec<u64>)],
        from: usize,
        left: &mut Vec<u64>,
        chosen: &mut Vec<Vec<Dart>>,
        out: &mut Vec<Vec<Vec<Dart>>>,
    ) {
        if left.iter().all(|&x| x == 0) {
            out.push(chosen.clone());
            return;
        }
        for i in from..words.len() {
            let (x, c) = &words[i];
            if c.iter().zip(left.iter()).all(|(a, b)| a <= b) {
                left.iter_mut().zip(c).for_each(|(l, a)| *l -= a);
                chosen.push(x.clone());
                go(words, i, left, chosen, out);
                chosen.pop();
                left.iter_mut().zip(c).for_each(|(l, a)| *l += a);
            }
        }
    }
    go(&words, 0, &mut left, &mut chosen, &mut out);
    let mut simple: Vec<MultiCurve> = out
        .into_iter()
        .map(|ws| MultiCurve::new(g, ws).expect("closed words"))
        .filter(|c| c.is_empty() || is_simple(g, c).is_ribbon())
        .collect();
    simple.sort();
    simple.dedup();
    simple
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::tests::rose;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn theta() -> Arc<RibbonGraph> {
        let f = Dart::forward;
        let b = Dart::backward;
        Arc::new(
            RibbonGraph::new(
                "theta",
                vec!["s".into(), "t".into()],
                vec![("a".into(), 0, 1), ("b".into(), 0, 1), ("c".into(), 0, 1)],
                vec![vec![f(1), f(2), f(0)], vec![b(0), b(2), b(1)]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn gates_must_partition() {
        let g = rose("r", 2);
        let (a, b) = (Dart::forward(0), Dart::forward(1));
        assert!(matches!(TrainTrack::new(g.clone(), vec![vec![vec![a, b, a.rev(), b.rev()]]]), Err(TrackError::TooFewGates(_))));
        assert!(matches!(TrainTrack::new(g.clone(), vec![vec![vec![a], vec![b, a.rev()]]]), Err(TrackError::NotPartition(_))));
        assert!(TrainTrack::new(g, vec![vec![vec![a, b], vec![a.rev(), b.rev()]]]).is_ok());
    }

    #[test]
    fn rose_inequalities() {
        let t = TrainTrack::singletons(rose("r", 2)).unwrap();
        let wt = validate_weighted_tt(&t, vec![q(2), q(0)]).unwrap();
        // the two half-edges of `a` are each balanced by the other
        assert_eq!(wt.equalities, vec![(0, 0), (0, 1)]);
        assert!(matches!(validate_weighted_tt(&t, vec![q(0), q(0)]), Ok(_)));
        let lop = TrainTrack::new(
            rose("r", 2),
            vec![vec![vec![Dart::forward(0), Dart::backward(0), Dart::forward(1)], vec![Dart::backward(1)]]],
        )
        .unwrap();
        assert!(matches!(validate_weighted_tt(&lop, vec![q(2), q(1)]), Err(TrackError::Inequality { .. })));
    }

    #[test]
    fn rose_stitches_parallel_copies() {
        let g = rose("r", 2);
        let t = TrainTrack::singletons(g.clone()).unwrap();
        let s = stitch_simple(&validate_weighted_tt(&t, vec![q(2), q(0)]).unwrap()).unwrap();
        assert_eq!(s.curve.display(&g), "a, a");
        assert!(check_witness(&g, &s));
        let z = stitch_simple(&validate_weighted_tt(&t, vec![q(0), q(0)]).unwrap()).unwrap();
        assert!(z.curve.is_empty());
    }

    #[test]
    fn theta_with_equality_gate() {
        let g = theta();
        let t = TrainTrack::singletons(g.clone()).unwrap();
        let wt = validate_weighted_tt(&t, vec![q(1), q(1), q(2)]).unwrap();
        assert_eq!(wt.equalities.len(), 2);
        let s = stitch_simple(&wt).unwrap();
        assert_eq!(s.curve.edge_counts(3), vec![1, 1, 2]);
        assert!(check_witness(&g, &s));
        assert!(is_simple(&g, &s.curve).is_ribbon());
    }

    #[test]
    fn parity_and_integrality() {
        let g = theta();
        let t = TrainTrack::singletons(g).unwrap();
        let odd = validate_weighted_tt(&t, vec![q(1), q(1), q(1)]).unwrap();
        assert!(matches!(stitch_simple(&odd), Err(TrackError::Parity { .. })));
        let half = validate_weighted_tt(&t, vec![Q::new(1.into(), 2.into()), Q::new(1.into(), 2.into()), q(1)]).unwrap();
        assert!(matches!(stitch_simple(&half), Err(TrackError::NotInteger(_))));
    }

    #[test]
    fn approximation_refines() {
        let t = TrainTrack::singletons(theta()).unwrap();
        assert!(approx_sequence(&t, &[q(2), q(2), q(4)], 0).unwrap().is_empty());
        let exact = approx_sequence(&t, &[q(2), q(2), q(4)], 5).unwrap();
        assert_eq!(exact.len(), 1);
        assert_eq!(exact[0].k, Q::one());
        let third = Q::new(1.into(), 3.into());
        let w = vec![third.clone(), third.clone(), &third * q(2)];
        let seq = approx_sequence(&t, &w, 8).unwrap();
        assert_eq!(seq.len(), 8);
        for pair in seq.windows(2) {
            assert!(pair[1].error <= pair[0].error);
        }
        assert!(seq.last().unwrap().error < Q::new(1.into(), 32.into()));
        for s in &seq {
            assert_eq!(s.stitched.curve.edge_counts(3), s.weights);
        }
    }
}
