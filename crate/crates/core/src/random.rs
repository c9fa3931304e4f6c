//! Seeded random instances: graphs, covers, maps, PL maps, curves and
//! weighted train tracks. Used by property tests and benchmarks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{reduce_cyclic, Dart, Elastic, MultiCurve, RibbonGraph, Q};
use crate::maps::{validate_covering, Covering, GraphMap};
use crate::pl::{Image, Piece, PlMap, Point};
use crate::traintrack::{validate_weighted_tt, TrainTrack, WeightedTrainTrack};

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// A rational in `(0, 1)` with denominator at most 6.
pub fn fraction(r: &mut Rand) -> Q {
    let d = r.gen_range(2..=6);
    q(r.gen_range(1..d), d)
}

/// Builds a graph from edge ends with a random rotation at every vertex.
fn assemble(r: &mut Rand, name: &str, n: usize, ends: &[(usize, usize)]) -> Arc<RibbonGraph> {
    let mut rotation = vec![Vec::new(); n];
    for (e, &(t, h)) in ends.iter().enumerate() {
        rotation[t].push(Dart::forward(e));
        rotation[h].push(Dart::backward(e));
    }
    for rot in &mut rotation {
        rot.shuffle(r);
    }
    let vertices = (0..n).map(|v| format!("v{v}")).collect();
    let edges = ends.iter().enumerate().map(|(e, &(t, h))| (format!("e{e}"), t, h)).collect();
    Arc::new(RibbonGraph::new(name, vertices, edges, rotation).expect("random graph is well formed"))
}

/// A connected graph on `n` vertices: a random tree plus `extra` edges,
/// loops allowed, and a loop at any leaf so every degree is at least 2.
pub fn graph(r: &mut Rand, n: usize, extra: usize) -> Arc<RibbonGraph> {
    let n = n.max(1);
    let mut ends: Vec<(usize, usize)> = (1..n).map(|v| (r.gen_range(0..v), v)).collect();
    for _ in 0..extra {
        ends.push((r.gen_range(0..n), r.gen_range(0..n)));
    }
    let mut deg = vec![0; n];
    for &(t, h) in &ends {
        deg[t] += 1;
        deg[h] += 1;
    }
    for v in 0..n {
        if deg[v] < 2 {
            ends.push((v, v));
        }
    }
    assemble(r, "random", n, &ends)
}

/// [`graph`] with 1 to 3 vertices and up to 2 extra edges.
pub fn small_graph(r: &mut Rand) -> Arc<RibbonGraph> {
    let n = r.gen_range(1..=3);
    let extra = r.gen_range(0..=2);
    graph(r, n, extra)
}

/// A connected trivalent graph on `2k` vertices from random half-edge matchings.
pub fn trivalent(r: &mut Rand, k: usize) -> Arc<RibbonGraph> {
    let n = 2 * k.max(1);
    loop {
        let mut half: Vec<usize> = (0..3 * n).map(|i| i / 3).collect();
        half.shuffle(r);
        let ends: Vec<(usize, usize)> = half.chunks(2).map(|p| (p[0], p[1])).collect();
        let g = assemble(r, "trivalent", n, &ends);
        if g.is_connected() {
            return g;
        }
    }
}

/// Edge lengths `a/b` with `1 ≤ a ≤ 8`, `1 ≤ b ≤ 4`.
pub fn lengths(r: &mut Rand, g: &RibbonGraph) -> Elastic {
    let v = (0..g.edge_count()).map(|_| q(r.gen_range(1..=8), r.gen_range(1..=4))).collect();
    Elastic::new(g, v).expect("positive lengths")
}

/// A connected degree-`d` cover from one random permutation per edge, with
/// the pulled-back rotation.
pub fn cover(r: &mut Rand, g: &Arc<RibbonGraph>, d: usize) -> Covering {
    loop {
        let perms: Vec<Vec<usize>> = (0..g.edge_count())
            .map(|_| {
                let mut p: Vec<usize> = (0..d).collect();
                p.shuffle(r);
                p
            })
            .collect();
        let mut inverse = vec![vec![0; d]; g.edge_count()];
        for (e, p) in perms.iter().enumerate() {
            for (i, &j) in p.iter().enumerate() {
                inverse[e][j] = i;
            }
        }
        let mut rotation = Vec::new();
        for v in 0..g.vertex_count() {
            for i in 0..d {
                rotation.push(
                    g.rotation(v)
                        .iter()
                        .map(|&h| {
                            let e = h.edge();
                            if h.is_forward() {
                                Dart::forward(e * d + i)
                            } else {
                                Dart::backward(e * d + inverse[e][i])
                            }
                        })
                        .collect::<Vec<_>>(),
                );
            }
        }
        let vertices = (0..g.vertex_count()).flat_map(|v| (0..d).map(move |i| format!("{}.{i}", g.vertex_name(v)))).collect();
        let mut edges = Vec::new();
        for e in 0..g.edge_count() {
            let [t, h] = g.ends(e);
            for i in 0..d {
                edges.push((format!("{}.{i}", g.edge_name(e)), t * d + i, h * d + perms[e][i]));
            }
        }
        let src = Arc::new(RibbonGraph::new("cover", vertices, edges, rotation).expect("lifted graph is well formed"));
        if !src.is_connected() {
            continue;
        }
        let vmap = (0..src.vertex_count()).map(|x| x / d).collect();
        let emap = (0..src.edge_count()).map(|x| vec![Dart::forward(x / d)]).collect();
        let m = GraphMap::new(src, g.clone(), vmap, emap).expect("cover map is incident");
        return validate_covering(m).expect("permutation cover");
    }
}

fn walk(r: &mut Rand, g: &RibbonGraph, from: usize, steps: usize) -> (Vec<Dart>, usize) {
    let mut at = from;
    let mut w = Vec::new();
    for _ in 0..steps {
        let d = *g.rotation(at).choose(r).expect("no isolated vertices");
        w.push(d);
        at = g.head(d);
    }
    (w, at)
}

/// A graph map sending each edge to a short random walk closed up by a tree path.
pub fn graph_map(r: &mut Rand, src: &Arc<RibbonGraph>, tgt: &Arc<RibbonGraph>, max_walk: usize) -> GraphMap {
    let tree = tgt.spanning_tree();
    let vmap: Vec<usize> = (0..src.vertex_count()).map(|_| r.gen_range(0..tgt.vertex_count())).collect();
    let emap = (0..src.edge_count())
        .map(|e| {
            let [t, h] = src.ends(e);
            let steps = r.gen_range(0..=max_walk);
            let (mut w, at) = walk(r, tgt, vmap[t], steps);
            w.extend(tgt.tree_path(&tree, at, vmap[h]).expect("target is connected"));
            w
        })
        .collect();
    GraphMap::new(src.clone(), tgt.clone(), vmap, emap).expect("walks are incident")
}

/// Full traversal of `d`, as parameters on its edge.
fn traverse(alpha: &Elastic, d: Dart) -> (Q, Q) {
    let a = alpha.alpha(d.edge()).clone();
    if d.is_forward() {
        (q(0, 1), a)
    } else {
        (a, q(0, 1))
    }
}

/// A PL map homotopic to `m` with random breakpoints, random speeds, constant
/// stretches and, when `wiggle` is set, backtracking excursions.
pub fn pl_map(r: &mut Rand, m: &GraphMap, alpha_s: &Elastic, alpha_t: &Elastic, wiggle: bool) -> PlMap {
    let (s, t) = (m.source(), m.target());
    let mut pieces = Vec::with_capacity(s.edge_count());
    for e in 0..s.edge_count() {
        // images first, lengths after
        let mut images: Vec<Image> = Vec::new();
        let mut at = m.vertex_image(s.ends(e)[0]);
        let stop = |r: &mut Rand, images: &mut Vec<Image>, at: usize| {
            if r.gen_ratio(1, 5) {
                images.push(Image::Point(Point::Vertex(at)));
            }
        };
        for &d in m.edge_image(e) {
            stop(r, &mut images, at);
            if wiggle && r.gen_ratio(1, 4) {
                let x = *t.rotation(at).choose(r).expect("no isolated vertices");
                let (a, b) = traverse(alpha_t, x);
                let mid = &a + (&b - &a) * fraction(r);
                images.push(Image::Segment { edge: x.edge(), from: a.clone(), to: mid.clone() });
                images.push(Image::Segment { edge: x.edge(), from: mid, to: a });
            }
            let (a, b) = traverse(alpha_t, d);
            if r.gen_bool(0.5) {
                let mid = &a + (&b - &a) * fraction(r);
                images.push(Image::Segment { edge: d.edge(), from: a, to: mid.clone() });
                images.push(Image::Segment { edge: d.edge(), from: mid, to: b });
            } else {
                images.push(Image::Segment { edge: d.edge(), from: a, to: b });
            }
            at = t.head(d);
        }
        stop(r, &mut images, at);
        if images.is_empty() {
            images.push(Image::Point(Point::Vertex(at)));
        }
        let weights: Vec<Q> = images.iter().map(|_| q(r.gen_range(1..=5), 1)).collect();
        let total: Q = weights.iter().sum();
        let scale = alpha_s.alpha(e) / total;
        pieces.push(images.into_iter().zip(weights).map(|(image, w)| Piece { len: w * &scale, image }).collect());
    }
    let psi = PlMap {
        source: s.clone(),
        target: t.clone(),
        alpha_s: alpha_s.clone(),
        alpha_t: alpha_t.clone(),
        vertex_image: (0..s.vertex_count()).map(|v| Point::Vertex(m.vertex_image(v))).collect(),
        pieces,
    };
    debug_assert!(psi.validate().is_ok());
    psi
}

/// A nonempty cyclically reduced closed word from a random walk of about `len` steps.
pub fn closed_word(r: &mut Rand, g: &RibbonGraph, len: usize) -> Vec<Dart> {
    let tree = g.spanning_tree();
    loop {
        let start = r.gen_range(0..g.vertex_count());
        let (mut w, at) = walk(r, g, start, len.max(1));
        w.extend(g.tree_path(&tree, at, start).expect("connected graph"));
        let w = reduce_cyclic(&w);
        if !w.is_empty() {
            return w;
        }
    }
}

/// A multi-curve with `1..=max_components` random components.
pub fn curve(r: &mut Rand, g: &RibbonGraph, len: usize, max_components: usize) -> MultiCurve {
    let k = r.gen_range(1..=max_components.max(1));
    let words = (0..k)
        .map(|_| {
            let l = r.gen_range(1..=len.max(1));
            closed_word(r, g, l)
        })
        .collect();
    MultiCurve::new(g, words).expect("reduced closed words")
}

/// Random gates at every vertex: between 2 and `degree` nonempty classes.
pub fn track(r: &mut Rand, g: &Arc<RibbonGraph>) -> TrainTrack {
    let gates = (0..g.vertex_count())
        .map(|v| {
            let mut darts = g.rotation(v).to_vec();
            darts.shuffle(r);
            let k = r.gen_range(2..=darts.len());
            let mut gs = vec![Vec::new(); k];
            for (i, d) in darts.into_iter().enumerate() {
                let slot = if i < k { i } else { r.gen_range(0..k) };
                gs[slot].push(d);
            }
            gs
        })
        .collect();
    TrainTrack::new(g.clone(), gates).expect("gates partition every star")
}

/// Even integer weights drawn from `choices` until every gate inequality holds.
pub fn weighted_track(r: &mut Rand, t: &TrainTrack, choices: &[u64]) -> WeightedTrainTrack {
    let n = t.graph().edge_count();
    for _ in 0..1000 {
        let w: Vec<Q> = (0..n).map(|_| Q::from_integer((*choices.choose(r).expect("choices")).into())).collect();
        if w.iter().all(|x| x.is_integer() && x.to_integer() % 2 == 0.into()) {
            if let Ok(wt) = validate_weighted_tt(t, w) {
                return wt;
            }
        }
    }
    validate_weighted_tt(t, vec![Q::from_integer(0.into()); n]).expect("zero weights are valid")
}
