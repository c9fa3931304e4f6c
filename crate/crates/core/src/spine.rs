//! Rose spines, wreath recursions and critical portraits.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{canonical_oriented, reduce_cyclic, reduce_word, Dart, RibbonGraph, UnionFind};
use crate::maps::{validate_covering, Covering, GraphMap, MapError};
use crate::vend::VirtualEndomorphism;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpineError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("edges do not form a spanning tree of Γ0")]
    NotSpanningTree,
    #[error("Γ0 is not connected")]
    Disconnected,
    #[error("{0} is not a sphere (genus {1})")]
    Genus(&'static str, usize),
    #[error("image of face `{0}` matches no face of Γ0")]
    UnmatchedFace(String),
    #[error("face `{0}` of Γ0 is the image of {1} faces of Γ1")]
    FaceMultiplicity(String, usize),
}

/// Contracts each component of `forest` to its vertex listed in `bases`,
/// keeping the cyclic order of the remaining half-edges.
pub fn contract_forest(g: &RibbonGraph, forest: &[usize], bases: &[usize]) -> (RibbonGraph, Vec<usize>) {
    let mut in_forest = vec![false; g.edge_count()];
    let mut uf = UnionFind::new(g.vertex_count());
    for &e in forest {
        in_forest[e] = true;
        let [a, b] = g.ends(e);
        uf.union(a, b);
    }
    let comp_of: Vec<usize> = (0..g.vertex_count())
        .map(|v| {
            let r = uf.find(v);
            bases.iter().position(|&b| uf.find(b) == r).expect("one base per component")
        })
        .collect();
    let kept: Vec<usize> = (0..g.edge_count()).filter(|&e| !in_forest[e]).collect();
    let new_index = |e: usize| kept.binary_search(&e).expect("kept edge");
    let mut rotation = Vec::new();
    for &b in bases {
        // boundary walk of the contracted tree from its base vertex
        let mut start = None;
        let mut frontier = vec![b];
        let mut seen = BTreeSet::from([b]);
        while let Some(v) = frontier.pop() {
            if let Some(&d) = g.rotation(v).iter().find(|d| !in_forest[d.edge()]) {
                start = Some(d);
                break;
            }
            for &d in g.rotation(v) {
                if seen.insert(g.head(d)) {
                    frontier.push(g.head(d));
                }
            }
        }
        let mut rot = Vec::new();
        if let Some(s) = start {
            let mut cur = s;
            loop {
                rot.push(Dart::new(new_index(cur.edge()), cur.is_forward()));
                let mut nxt = g.succ(cur);
                while in_forest[nxt.edge()] {
                    nxt = g.succ(nxt.rev());
                }
                cur = nxt;
                if cur == s {
                    break;
                }
            }
        }
        rotation.push(rot);
    }
    let vnames = bases.iter().map(|&b| g.vertex_name(b).to_string()).collect();
    let edges = kept
        .iter()
        .map(|&e| {
            let [t, h] = g.ends(e);
            (g.edge_name(e).to_string(), comp_of[t], comp_of[h])
        })
        .collect();
    let r = RibbonGraph::new(format!("{}/T", g.name()), vnames, edges, rotation).expect("contraction is well formed");
    (r, comp_of)
}

/// Rose-based virtual endomorphism obtained by collapsing a spanning tree.
#[derive(Clone, Debug)]
pub struct RoseSpine {
    pub tree: Vec<usize>,
    pub r0: Arc<RibbonGraph>,
    pub r1: Arc<RibbonGraph>,
    pub pi: Covering,
    pub phi: GraphMap,
    /// Γ1 vertex over the Γ0 base vertex, one per letter.
    pub letter_base: Vec<usize>,
}

/// Delete tree darts and reduce, giving a word in the rose generators.
fn rose_word(w: &[Dart], in_tree: &[bool], gen_of: &[usize]) -> Vec<Dart> {
    let kept: Vec<Dart> =
        w.iter().filter(|d| !in_tree[d.edge()]).map(|d| Dart::new(gen_of[d.edge()], d.is_forward())).collect();
    reduce_word(&kept)
}

pub fn collapse_tree(v: &VirtualEndomorphism, tree: &[usize]) -> Result<RoseSpine, SpineError> {
    let g0 = &v.gamma0.graph;
    let g1 = &v.gamma1.graph;
    if !g0.is_connected() {
        return Err(SpineError::Disconnected);
    }
    if !g0.is_spanning_tree(tree) {
        return Err(SpineError::NotSpanningTree);
    }
    let mut in_tree = vec![false; g0.edge_count()];
    for &e in tree {
        in_tree[e] = true;
    }
    let gen_of: Vec<usize> = {
        let mut k = 0;
        (0..g0.edge_count())
            .map(|e| {
                let i = k;
                if !in_tree[e] {
                    k += 1;
                }
                i
            })
            .collect()
    };
    let lifted: Vec<usize> =
        (0..g1.edge_count()).filter(|&e| in_tree[v.pi.project_dart(Dart::forward(e)).edge()]).collect();
    let letter_base = v.pi.fiber(0).to_vec();
    let (r0, _) = contract_forest(g0, tree, &[0]);
    let (r1, _) = contract_forest(g1, &lifted, &letter_base);
    let (r0, r1) = (Arc::new(r0), Arc::new(r1));
    let mut lifted_mask = vec![false; g1.edge_count()];
    for &e in &lifted {
        lifted_mask[e] = true;
    }
    let kept1: Vec<usize> = (0..g1.edge_count()).filter(|&e| !lifted_mask[e]).collect();
    let pi_e = kept1
        .iter()
        .map(|&e| {
            let d = v.pi.project_dart(Dart::forward(e));
            vec![Dart::new(gen_of[d.edge()], d.is_forward())]
        })
        .collect();
    let pi = validate_covering(GraphMap::new(r1.clone(), r0.clone(), vec![0; r1.vertex_count()], pi_e)?)?;
    // conjugate each edge image by the φ-images of tree paths to the letter bases
    let base_of = |x: usize| {
        letter_base
            .iter()
            .copied()
            .find(|&b| g1.tree_path(&lifted, b, x).is_some())
            .expect("every vertex lies in a lifted tree")
    };
    let mut phi_e = Vec::new();
    for &e in &kept1 {
        let [t, h] = g1.ends(e);
        let mut w = g1.tree_path(&lifted, base_of(t), t).expect("in tree");
        w.push(Dart::forward(e));
        w.extend(g1.tree_path(&lifted, h, base_of(h)).expect("in tree"));
        phi_e.push(rose_word(&v.phi.word_image(&w), &in_tree, &gen_of));
    }
    let phi = GraphMap::new(r1.clone(), r0.clone(), vec![0; r1.vertex_count()], phi_e)?;
    Ok(RoseSpine { tree: tree.to_vec(), r0, r1, pi, phi, letter_base })
}

/// Wreath recursion `x(i·w) = j·u(w)` read off by path lifting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    pub generators: Vec<String>,
    /// `transitions[x][i] = (j, u)` with `u` a word of signed generators.
    pub transitions: Vec<Vec<(usize, Vec<(usize, bool)>)>>,
    /// Face words of the rose, one per marked point. The transitions only
    /// see the graph maps; these carry the cyclic order at the vertex.
    pub peripheral: Vec<Vec<(usize, bool)>>,
}

impl Automaton {
    pub fn letters(&self) -> usize {
        self.transitions.first().map_or(0, Vec::len)
    }

    /// Inverse generators print in capitals when every name is a single
    /// lowercase letter, and with a `~` prefix otherwise.
    fn letter_name(&self, g: usize, positive: bool) -> String {
        let n = &self.generators[g];
        let capitals = self.generators.iter().all(|s| s.len() == 1 && s.chars().all(|c| c.is_ascii_lowercase()));
        match (positive, capitals) {
            (true, _) => n.clone(),
            (false, true) => n.to_ascii_uppercase(),
            (false, false) => format!("~{n}"),
        }
    }

    pub fn word_text(&self, u: &[(usize, bool)]) -> String {
        let short = self.generators.iter().all(|s| s.len() == 1);
        u.iter().map(|&(g, s)| self.letter_name(g, s)).collect::<Vec<_>>().join(if short { "" } else { " " })
    }

    /// One line per generator and letter, e.g. `a(0w) = 1·b(w)`.
    pub fn rules(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (x, row) in self.transitions.iter().enumerate() {
            for (i, (j, u)) in row.iter().enumerate() {
                let rhs = if u.is_empty() { format!("{j}·w") } else { format!("{j}·{}(w)", self.word_text(u)) };
                out.push(format!("{}({i}w) = {rhs}", self.generators[x]));
            }
        }
        out
    }

    /// Peripheral words, e.g. `aB`.
    pub fn peripheral_words(&self) -> Vec<String> {
        self.peripheral.iter().map(|u| self.word_text(u)).collect()
    }

    /// Each generator permutes the letters.
    pub fn is_permutational(&self) -> bool {
        self.transitions.iter().all(|row| {
            let mut seen = vec![false; row.len()];
            row.iter().all(|(j, _)| !std::mem::replace(&mut seen[*j], true))
        })
    }
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.rules() {
            writeln!(f, "{r}")?;
        }
        writeln!(f, "peripheral: {}", self.peripheral_words().join(", "))
    }
}

/// Automaton of `v` relative to its stored spanning tree, or the greedy one.
pub fn wreath_recursion(v: &VirtualEndomorphism) -> Result<Automaton, SpineError> {
    let tree = match &v.tree {
        Some(t) => t.clone(),
        None => v.gamma0.graph.spanning_tree(),
    };
    let rose = collapse_tree(v, &tree)?;
    Ok(automaton_of_rose(&rose))
}

pub fn automaton_of_rose(rose: &RoseSpine) -> Automaton {
    let r0 = &rose.r0;
    let generators = r0.edge_names().to_vec();
    let mut transitions = Vec::new();
    for x in 0..r0.edge_count() {
        let mut row = Vec::new();
        for i in 0..rose.r1.vertex_count() {
            let d = rose.pi.lift_dart(i, Dart::forward(x));
            let j = rose.r1.head(d);
            let u = rose.phi.dart_image(d).iter().map(|d| (d.edge(), d.is_forward())).collect();
            row.push((j, u));
        }
        transitions.push(row);
    }
    let mut peripheral: Vec<Vec<(usize, bool)>> = r0
        .faces()
        .iter()
        .map(|f| canonical_oriented(f).iter().map(|d| (d.edge(), d.is_forward())).collect())
        .collect();
    peripheral.sort();
    Automaton { generators, transitions, peripheral }
}

/// Functional graph on marked points with local degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPortrait {
    pub points: Vec<String>,
    /// `(from, to, degree)`, one per point.
    pub arrows: Vec<(usize, usize, usize)>,
    pub hyperbolic_type: bool,
    pub non_compact_type: bool,
    /// Sum of `degree − 1` over all faces of Γ1.
    pub branching: usize,
}

impl CriticalPortrait {
    pub fn find(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    pub fn arrow_from(&self, p: usize) -> Option<(usize, usize)> {
        self.arrows.iter().find(|a| a.0 == p).map(|a| (a.1, a.2))
    }

    /// Points lying on cycles, grouped by cycle.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for start in 0..self.points.len() {
            let mut p = start;
            for _ in 0..self.points.len() {
                match self.arrow_from(p) {
                    Some((q, _)) => p = q,
                    None => break,
                }
            }
            // p is now on a cycle if the orbit never ended
            let mut cyc = vec![p];
            let mut q = p;
            loop {
                match self.arrow_from(q) {
                    Some((r, _)) if r != p => {
                        cyc.push(r);
                        q = r;
                    }
                    Some(_) => break,
                    None => {
                        cyc.clear();
                        break;
                    }
                }
            }
            if !cyc.is_empty() {
                let m = *cyc.iter().min().expect("nonempty");
                let k = cyc.iter().position(|&x| x == m).expect("member");
                cyc.rotate_left(k);
                if !out.contains(&cyc) {
                    out.push(cyc);
                }
            }
        }
        out
    }

    pub fn lines(&self) -> Vec<String> {
        self.arrows
            .iter()
            .map(|&(a, b, d)| {
                if d > 1 {
                    format!("{} ->({d}) {}", self.points[a], self.points[b])
                } else {
                    format!("{} -> {}", self.points[a], self.points[b])
                }
            })
            .collect()
    }
}

fn face_label(names: &[(String, Vec<Dart>)], g: &RibbonGraph, face: &[Dart], fallback: &str) -> String {
    let key = canonical_oriented(face);
    names
        .iter()
        .find(|(_, w)| canonical_oriented(w) == key)
        .map(|(n, _)| n.clone())
        .unwrap_or_else(|| format!("{fallback}({})", g.word_name(&key)))
}

pub fn critical_portrait(v: &VirtualEndomorphism) -> Result<CriticalPortrait, SpineError> {
    let g0 = &v.gamma0.graph;
    let g1 = &v.gamma1.graph;
    if g0.genus() != 0 {
        return Err(SpineError::Genus("Γ0", g0.genus()));
    }
    if g1.genus() != 0 {
        return Err(SpineError::Genus("Γ1", g1.genus()));
    }
    let faces0 = g0.faces();
    let keys0: Vec<Vec<Dart>> = faces0.iter().map(|f| canonical_oriented(f)).collect();
    let mut face_of_dart = vec![0; g0.dart_count()];
    for (k, f) in faces0.iter().enumerate() {
        for d in f {
            face_of_dart[d.index()] = k;
        }
    }
    let mut points: Vec<String> =
        faces0.iter().map(|f| face_label(&v.gamma0.faces, g0, f, "face")).collect();
    let mut arrows = Vec::new();
    let mut matched = vec![0usize; faces0.len()];
    let mut branching = 0;
    for f in g1.faces() {
        let below = face_of_dart[v.pi.project_dart(f[0]).index()];
        let degree = f.len() / faces0[below].len();
        branching += degree - 1;
        let img = reduce_cyclic(&v.phi.word_image(&f));
        if img.is_empty() {
            if degree > 1 {
                points.push(face_label(&v.gamma1.faces, g1, &f, "critical"));
                arrows.push((points.len() - 1, below, degree));
            }
            continue;
        }
        let key = canonical_oriented(&img);
        let at = keys0.iter().position(|k| *k == key).ok_or_else(|| SpineError::UnmatchedFace(g1.word_name(&f)))?;
        matched[at] += 1;
        arrows.push((at, below, degree));
    }
    if let Some(k) = matched.iter().position(|&m| m != 1) {
        return Err(SpineError::FaceMultiplicity(points[k].clone(), matched[k]));
    }
    arrows.sort();
    let mut p = CriticalPortrait { points, arrows, hyperbolic_type: false, non_compact_type: false, branching };
    let cycles = p.cycles();
    let branched = |c: &Vec<usize>| c.iter().any(|&x| p.arrow_from(x).is_some_and(|(_, d)| d > 1));
    let hyperbolic = !cycles.is_empty() && cycles.iter().all(branched);
    let non_compact = cycles.iter().any(branched);
    p.hyperbolic_type = hyperbolic;
    p.non_compact_type = non_compact;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture_vend, load_fixture};
    use crate::ribbon::DEFAULT_BUDGET;
    use crate::vend::validate_vend;

    fn vend(name: &str) -> VirtualEndomorphism {
        validate_vend(&load_fixture(name).unwrap(), &fixture_vend(name).unwrap(), DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn theta_automaton_matches_hand_lifting() {
        let a = wreath_recursion(&vend("theta")).unwrap();
        assert_eq!(a.rules(), ["a(0w) = 1·b(w)", "a(1w) = 0·A(w)", "b(0w) = 1·w", "b(1w) = 0·w"]);
        assert!(a.is_permutational());
    }

    #[test]
    fn rabbits_differ_only_in_peripheral_words() {
        let (a, b) = (wreath_recursion(&vend("rabbit15")).unwrap(), wreath_recursion(&vend("rabbit25")).unwrap());
        assert_eq!(a.transitions, b.transitions);
        assert_ne!(a.peripheral, b.peripheral);
        assert_ne!(a, b);
    }

    #[test]
    fn loop_doubling_automaton() {
        let a = wreath_recursion(&vend("loop-doubling")).unwrap();
        assert_eq!(a.rules(), ["a(0w) = 1·w", "a(1w) = 0·a(w)"]);
    }

    #[test]
    fn theta_collapse_gives_rose() {
        let v = vend("theta");
        let r = collapse_tree(&v, &[2]).unwrap();
        assert_eq!((r.r0.vertex_count(), r.r0.edge_count()), (1, 2));
        assert_eq!((r.r1.vertex_count(), r.r1.edge_count()), (2, 4));
        assert_eq!(collapse_tree(&v, &[0, 2, 1]).unwrap_err(), SpineError::NotSpanningTree);
        let lp = vend("loop-doubling");
        let same = collapse_tree(&lp, &[]).unwrap();
        assert_eq!(same.r0.rotations(), lp.gamma0.graph.rotations());
    }

    #[test]
    fn theta_portrait() {
        let p = critical_portrait(&vend("theta")).unwrap();
        assert_eq!(p.lines(), ["-1 -> inf", "inf ->(2) -1", "1 -> inf", "0 ->(2) 1"]);
        assert!(p.hyperbolic_type);
        assert_eq!(p.branching, 2);
    }

    #[test]
    fn rabbit_portraits() {
        for n in ["rabbit15", "rabbit25"] {
            let p = critical_portrait(&vend(n)).unwrap();
            let x0 = p.find("x0").unwrap();
            let inf = p.find("inf").unwrap();
            assert_eq!(p.arrow_from(x0), Some((p.find("x1").unwrap(), 2)), "{n}");
            assert_eq!(p.arrow_from(inf), Some((inf, 2)), "{n}");
            assert_eq!(p.cycles().len(), 2, "{n}");
            assert!(p.hyperbolic_type);
        }
    }
}
