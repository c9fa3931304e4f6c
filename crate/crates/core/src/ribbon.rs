//! Ribbon-map test by searching for a consistent order of parallel strands.
//!
//! Every step of every edge image is a strand running along one target edge.
//! Strand ends meeting at a target vertex are grouped into blocks: a chord
//! joins two consecutive steps of one edge image, and a star collects the
//! first and last steps of all non-collapsed edges at a component of the
//! collapsed subgraph. The map is ribbon exactly when some choice of strand
//! order along each target edge makes every vertex a non-crossing partition
//! whose stars keep the counterclockwise order of their stubs.

use std::collections::HashMap;
use std::sync::Arc;

use crate::graph::{Dart, MultiCurve, RibbonGraph, UnionFind};
use crate::maps::GraphMap;

/// Default search node budget.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// Strands on each target edge, listed counterclockwise as seen from the
/// edge's tail; the head sees the reverse order. Entries are
/// `(source edge, step along its image)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrandOrder {
    pub per_edge: Vec<Vec<(usize, usize)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RibbonVerdict {
    Ribbon(StrandOrder),
    NotRibbon(String),
    /// Search budget exhausted before a decision.
    Unknown,
}

impl RibbonVerdict {
    pub fn is_ribbon(&self) -> bool {
        matches!(self, RibbonVerdict::Ribbon(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            RibbonVerdict::Ribbon(_) => "ribbon",
            RibbonVerdict::NotRibbon(_) => "not ribbon",
            RibbonVerdict::Unknown => "unknown",
        }
    }
}

const NO_RANK: u32 = u32::MAX;

struct Problem {
    target: Arc<RibbonGraph>,
    strand_edge: Vec<usize>,
    labels: Vec<(usize, usize)>,
    // block and star rank of each strand end; end 0 sits at the edge tail
    block: Vec<[usize; 2]>,
    rank: Vec<[u32; 2]>,
}

fn tail_end(d: Dart) -> usize {
    if d.is_forward() {
        0
    } else {
        1
    }
}

fn head_end(d: Dart) -> usize {
    1 - tail_end(d)
}

impl Problem {
    fn build(phi: &GraphMap) -> Result<Problem, String> {
        let y = phi.source();
        let target = phi.target().clone();
        let mut strand_edge = Vec::new();
        let mut labels = Vec::new();
        let mut first = vec![0; y.edge_count()];
        for e in 0..y.edge_count() {
            first[e] = strand_edge.len();
            for (k, d) in phi.edge_image(e).iter().enumerate() {
                strand_edge.push(d.edge());
                labels.push((e, k));
            }
        }
        let n = strand_edge.len();
        let mut block = vec![[usize::MAX; 2]; n];
        let mut rank = vec![[NO_RANK; 2]; n];
        let mut blocks = 0;
        for e in 0..y.edge_count() {
            let img = phi.edge_image(e);
            for k in 1..img.len() {
                let (a, b) = (first[e] + k - 1, first[e] + k);
                block[a][head_end(img[k - 1])] = blocks;
                block[b][tail_end(img[k])] = blocks;
                blocks += 1;
            }
        }
        let collapsed = |d: Dart| phi.is_collapsed(d.edge());
        let mut uf = UnionFind::new(y.vertex_count());
        for e in 0..y.edge_count() {
            if phi.is_collapsed(e) {
                let [t, h] = y.ends(e);
                uf.union(t, h);
            }
        }
        let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..y.vertex_count() {
            members.entry(uf.find(v)).or_default().push(v);
        }
        let mut roots: Vec<usize> = members.keys().copied().collect();
        roots.sort_unstable();
        for root in roots {
            let verts = &members[&root];
            let darts: Vec<Dart> = verts.iter().flat_map(|&v| y.rotation(v).iter().copied()).collect();
            let internal: Vec<Dart> = darts.iter().copied().filter(|&d| collapsed(d)).collect();
            let stubs: Vec<Dart> = darts.iter().copied().filter(|&d| !collapsed(d)).collect();
            let name = y.vertex_name(verts[0]);
            if !internal.is_empty() {
                // faces of the collapsed component alone
                let succ_k = |d: Dart| {
                    let mut x = y.succ(d);
                    while !collapsed(x) {
                        x = y.succ(x);
                    }
                    x
                };
                let mut seen: HashMap<Dart, bool> = HashMap::new();
                let mut faces = 0i64;
                for &d in &internal {
                    if seen.contains_key(&d) {
                        continue;
                    }
                    faces += 1;
                    let mut x = d;
                    loop {
                        seen.insert(x, true);
                        x = succ_k(x.rev());
                        if x == d {
                            break;
                        }
                    }
                }
                let euler = verts.len() as i64 - (internal.len() / 2) as i64 + faces;
                if euler != 2 {
                    return Err(format!("collapsed part at `{name}` is not planar"));
                }
            }
            if stubs.is_empty() {
                continue;
            }
            let mut walk = Vec::new();
            let mut cur = stubs[0];
            loop {
                walk.push(cur);
                let mut nxt = y.succ(cur);
                while collapsed(nxt) {
                    nxt = y.succ(nxt.rev());
                }
                cur = nxt;
                if cur == stubs[0] {
                    break;
                }
            }
            if walk.len() != stubs.len() {
                return Err(format!("stubs at `{name}` lie on several boundary circles"));
            }
            for (r, &s) in walk.iter().enumerate() {
                let e = s.edge();
                let img = phi.dart_image(Dart::forward(e));
                let (strand, end) = if s.is_forward() {
                    (first[e], tail_end(img[0]))
                } else {
                    (first[e] + img.len() - 1, head_end(img[img.len() - 1]))
                };
                block[strand][end] = blocks;
                rank[strand][end] = r as u32;
            }
            blocks += 1;
        }
        debug_assert!(block.iter().all(|b| b[0] != usize::MAX && b[1] != usize::MAX));
        Ok(Problem { target, strand_edge, labels, block, rank })
    }

    /// Consistency of the strands placed so far around vertex `x`.
    fn vertex_ok(&self, x: usize, placed: &[Vec<usize>]) -> bool {
        let mut seq: Vec<(usize, u32)> = Vec::new();
        for &h in self.target.rotation(x) {
            let list = &placed[h.edge()];
            if h.is_forward() {
                seq.extend(list.iter().map(|&s| (self.block[s][0], self.rank[s][0])));
            } else {
                seq.extend(list.iter().rev().map(|&s| (self.block[s][1], self.rank[s][1])));
            }
        }
        let mut remaining: HashMap<usize, usize> = HashMap::new();
        for &(b, _) in &seq {
            *remaining.entry(b).or_default() += 1;
        }
        let mut stack: Vec<usize> = Vec::new();
        let mut started: HashMap<usize, bool> = HashMap::new();
        for &(b, _) in &seq {
            if started.insert(b, true).is_some() && stack.last() != Some(&b) {
                return false;
            }
            if stack.last() != Some(&b) {
                stack.push(b);
            }
            let r = remaining.get_mut(&b).expect("counted");
            *r -= 1;
            if *r == 0 {
                stack.pop();
            }
        }
        let mut stars: HashMap<usize, Vec<u32>> = HashMap::new();
        for &(b, r) in &seq {
            if r != NO_RANK {
                stars.entry(b).or_default().push(r);
            }
        }
        stars.values().all(|rs| {
            let m = rs.len();
            m < 3 || (0..m).filter(|&i| rs[i] > rs[(i + 1) % m]).count() == 1
        })
    }

    fn search(&self, budget: u64) -> RibbonVerdict {
        let n = self.strand_edge.len();
        let mut placed: Vec<Vec<usize>> = vec![Vec::new(); self.target.edge_count()];
        let mut choice = vec![0usize; n + 1];
        let mut nodes = 0u64;
        let mut i = 0usize;
        loop {
            if i == n {
                let per_edge = placed
                    .iter()
                    .map(|l| l.iter().map(|&s| self.labels[s]).collect())
                    .collect();
                return RibbonVerdict::Ribbon(StrandOrder { per_edge });
            }
            let e = self.strand_edge[i];
            if choice[i] > placed[e].len() {
                if i == 0 {
                    return RibbonVerdict::NotRibbon("no consistent strand order".into());
                }
                i -= 1;
                let pe = self.strand_edge[i];
                placed[pe].retain(|&s| s != i);
                choice[i] += 1;
                continue;
            }
            nodes += 1;
            if nodes > budget {
                return RibbonVerdict::Unknown;
            }
            placed[e].insert(choice[i], i);
            let [t, h] = self.target.ends(e);
            if self.vertex_ok(t, &placed) && (h == t || self.vertex_ok(h, &placed)) {
                i += 1;
                choice[i] = 0;
            } else {
                placed[e].remove(choice[i]);
                choice[i] += 1;
            }
        }
    }
}

/// Checks a proposed strand order without searching.
pub fn check_strand_order(phi: &GraphMap, order: &StrandOrder) -> bool {
    let Ok(p) = Problem::build(phi) else { return false };
    if order.per_edge.len() != p.target.edge_count() {
        return false;
    }
    let index: HashMap<(usize, usize), usize> = p.labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut used = vec![false; p.labels.len()];
    let mut placed = vec![Vec::new(); p.target.edge_count()];
    for (e, list) in order.per_edge.iter().enumerate() {
        for l in list {
            match index.get(l) {
                Some(&s) if p.strand_edge[s] == e && !used[s] => {
                    used[s] = true;
                    placed[e].push(s);
                }
                _ => return false,
            }
        }
    }
    used.iter().all(|&u| u) && (0..p.target.vertex_count()).all(|x| p.vertex_ok(x, &placed))
}

/// Decides whether `phi` lifts to an orientation-preserving embedding of
/// thickenings, within `budget` search nodes.
pub fn is_ribbon_map(phi: &GraphMap, budget: u64) -> RibbonVerdict {
    match Problem::build(phi) {
        Ok(p) => p.search(budget),
        Err(why) => RibbonVerdict::NotRibbon(why),
    }
}

/// Disjoint union of cycles, one per curve component, mapped onto `c`.
pub fn curve_map(g: &Arc<RibbonGraph>, c: &MultiCurve) -> GraphMap {
    let mut vnames = Vec::new();
    let mut edges = Vec::new();
    let mut rotation = Vec::new();
    let mut vmap = Vec::new();
    let mut emap = Vec::new();
    for (i, w) in c.components().iter().enumerate() {
        let base = vnames.len();
        let m = w.len();
        for (k, &d) in w.iter().enumerate() {
            vnames.push(format!("c{i}v{k}"));
            vmap.push(g.tail(d));
            let next = base + (k + 1) % m;
            edges.push((format!("c{i}e{k}"), base + k, next));
            emap.push(vec![d]);
            let prev = base + (k + m - 1) % m;
            rotation.push(vec![Dart::forward(base + k), Dart::backward(prev)]);
        }
    }
    let src = Arc::new(
        RibbonGraph::new(format!("{}-curve", g.name()), vnames, edges, rotation).expect("cycle graph"),
    );
    GraphMap::new(src, g.clone(), vmap, emap).expect("curve words are closed walks")
}

/// A multicurve is simple when its components can be drawn disjointly and
/// without self-crossings on the thickened graph.
pub fn is_simple(g: &Arc<RibbonGraph>, c: &MultiCurve) -> RibbonVerdict {
    is_ribbon_map(&curve_map(g, c), u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::tests::rose;

    fn interleaved_rose() -> Arc<RibbonGraph> {
        let (a, b) = (Dart::forward(0), Dart::forward(1));
        Arc::new(
            RibbonGraph::new(
                "torus",
                vec!["o".into()],
                vec![("a".into(), 0, 0), ("b".into(), 0, 0)],
                vec![vec![a, b, a.rev(), b.rev()]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn identity_is_ribbon() {
        let g = interleaved_rose();
        assert!(is_ribbon_map(&GraphMap::identity(g), DEFAULT_BUDGET).is_ribbon());
    }

    #[test]
    fn swap_on_interleaved_rose_is_not_ribbon() {
        let g = interleaved_rose();
        let (a, b) = (Dart::forward(0), Dart::forward(1));
        let swap = GraphMap::new(g.clone(), g, vec![0], vec![vec![b], vec![a]]).unwrap();
        assert!(matches!(is_ribbon_map(&swap, DEFAULT_BUDGET), RibbonVerdict::NotRibbon(_)));
    }

    #[test]
    fn swap_on_planar_rose_is_not_ribbon_but_rotation_is() {
        // planar two-petal rose: a ~a b ~b
        let g = rose("r", 2);
        let (a, b) = (Dart::forward(0), Dart::forward(1));
        let swap = GraphMap::new(g.clone(), g.clone(), vec![0], vec![vec![b], vec![a]]).unwrap();
        assert!(swap_is(&swap, true));
        let flip = GraphMap::new(g.clone(), g, vec![0], vec![vec![a.rev()], vec![b]]).unwrap();
        assert!(swap_is(&flip, false));
    }

    fn swap_is(m: &GraphMap, expect: bool) -> bool {
        is_ribbon_map(m, DEFAULT_BUDGET).is_ribbon() == expect
    }

    #[test]
    fn simple_and_non_simple_curves() {
        let g = rose("r", 2);
        // faces of the planar rose are (a b), (~a), (~b)
        let ok = MultiCurve::parse(&g, "a b").unwrap();
        assert!(is_simple(&g, &ok).is_ribbon());
        let eight = MultiCurve::parse(&g, "a ~b").unwrap();
        assert!(!is_simple(&g, &eight).is_ribbon());
        let two = MultiCurve::parse(&g, "a, a").unwrap();
        assert!(is_simple(&g, &two).is_ribbon());
        let bad = MultiCurve::parse(&g, "a a b").unwrap();
        assert!(!is_simple(&g, &bad).is_ribbon());
        let t = interleaved_rose();
        assert!(is_simple(&t, &MultiCurve::parse(&t, "a b").unwrap()).is_ribbon());
        assert!(!is_simple(&t, &MultiCurve::parse(&t, "a, b").unwrap()).is_ribbon());
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let g = rose("r", 2);
        let c = MultiCurve::parse(&g, "a a b").unwrap();
        assert_eq!(is_ribbon_map(&curve_map(&g, &c), 1), RibbonVerdict::Unknown);
    }
}
