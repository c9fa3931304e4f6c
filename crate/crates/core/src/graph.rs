//! Ribbon graphs stored as half-edge combinatorial maps.
//!
//! A half-edge is identified with the dart that leaves its vertex, so edge
//! `e` owns darts `2e` (tail to head) and `2e + 1` (head to tail). The
//! rotation at a vertex lists its outgoing darts counterclockwise.

use std::collections::HashMap;
use std::fmt;

use num::{BigRational, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar used for every length and energy.
pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("half-edge `{0}` is not listed in the rotation at its vertex")]
    DanglingHalfEdge(String),
    #[error("rotation at `{0}` is not a permutation of its star")]
    RotationNotPermutation(String),
    #[error("edge `{0}` has nonpositive length")]
    NonPositiveLength(String),
    #[error("steps `{0}` and `{1}` are not incident")]
    NotIncident(String, String),
    #[error("word does not close up")]
    NotClosed,
    #[error("malformed dart `{0}`")]
    BadDart(String),
}

/// Directed edge; also names the half-edge at its starting vertex.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Dart(pub u32);

impl Dart {
    pub fn forward(e: usize) -> Dart {
        Dart((e as u32) << 1)
    }

    pub fn backward(e: usize) -> Dart {
        Dart(((e as u32) << 1) | 1)
    }

    pub fn new(e: usize, forward: bool) -> Dart {
        if forward {
            Dart::forward(e)
        } else {
            Dart::backward(e)
        }
    }

    pub fn edge(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_forward(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn rev(self) -> Dart {
        Dart(self.0 ^ 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonGraph {
    name: String,
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    ends: Vec<[usize; 2]>,
    rotation: Vec<Vec<Dart>>,
    succ: Vec<Dart>,
    pred: Vec<Dart>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

impl RibbonGraph {
    /// Builds and validates a ribbon graph. `edges` holds `(name, tail, head)`.
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<String>,
        edges: Vec<(String, usize, usize)>,
        rotation: Vec<Vec<Dart>>,
    ) -> Result<Self, GraphError> {
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateName(v.clone()));
            }
        }
        let mut edge_index = HashMap::new();
        let mut edge_names = Vec::with_capacity(edges.len());
        let mut ends = Vec::with_capacity(edges.len());
        for (i, (n, t, h)) in edges.into_iter().enumerate() {
            if edge_index.insert(n.clone(), i).is_some() || vertex_index.contains_key(&n) {
                return Err(GraphError::DuplicateName(n));
            }
            if t >= vertices.len() || h >= vertices.len() {
                return Err(GraphError::UnknownVertex(n));
            }
            edge_names.push(n);
            ends.push([t, h]);
        }
        if rotation.len() != vertices.len() {
            return Err(GraphError::RotationNotPermutation(
                vertices.first().cloned().unwrap_or_default(),
            ));
        }
        let nd = 2 * ends.len();
        let mut seen = vec![false; nd];
        let mut succ = vec![Dart(0); nd];
        let mut pred = vec![Dart(0); nd];
        for (v, rot) in rotation.iter().enumerate() {
            for &d in rot {
                let ok = d.index() < nd && !seen[d.index()] && {
                    let e = ends[d.edge()];
                    (if d.is_forward() { e[0] } else { e[1] }) == v
                };
                if !ok {
                    return Err(GraphError::RotationNotPermutation(vertices[v].clone()));
                }
                seen[d.index()] = true;
            }
            for i in 0..rot.len() {
                let a = rot[i];
                let b = rot[(i + 1) % rot.len()];
                succ[a.index()] = b;
                pred[b.index()] = a;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            let d = Dart(i as u32);
            return Err(GraphError::DanglingHalfEdge(dart_label(&edge_names, d)));
        }
        Ok(RibbonGraph {
            name: name.into(),
            vertex_names: vertices,
            edge_names,
            ends,
            rotation,
            succ,
            pred,
            vertex_index,
            edge_index,
        })
    }

    /// Same combinatorics with a different rotation system.
    pub fn with_rotation(&self, rotation: Vec<Vec<Dart>>) -> Result<Self, GraphError> {
        let edges = (0..self.edge_count())
            .map(|e| (self.edge_names[e].clone(), self.ends[e][0], self.ends[e][1]))
            .collect();
        RibbonGraph::new(self.name.clone(), self.vertex_names.clone(), edges, rotation)
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        let mut g = self.clone();
        g.name = name.into();
        g
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn dart_count(&self) -> usize {
        2 * self.edge_names.len()
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> {
        (0..self.dart_count() as u32).map(Dart)
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edge_names[e]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn edge_names(&self) -> &[String] {
        &self.edge_names
    }

    pub fn find_vertex(&self, name: &str) -> Option<usize> {
        self.vertex_index.get(name).copied()
    }

    pub fn find_edge(&self, name: &str) -> Option<usize> {
        self.edge_index.get(name).copied()
    }

    /// `tail` and `head` of edge `e`.
    pub fn ends(&self, e: usize) -> [usize; 2] {
        self.ends[e]
    }

    /// Vertex the dart leaves.
    pub fn tail(&self, d: Dart) -> usize {
        let e = self.ends[d.edge()];
        if d.is_forward() {
            e[0]
        } else {
            e[1]
        }
    }

    /// Vertex the dart enters.
    pub fn head(&self, d: Dart) -> usize {
        self.tail(d.rev())
    }

    pub fn rotation(&self, v: usize) -> &[Dart] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<Dart>] {
        &self.rotation
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    /// Next outgoing dart counterclockwise around `tail(d)`.
    pub fn succ(&self, d: Dart) -> Dart {
        self.succ[d.index()]
    }

    pub fn pred(&self, d: Dart) -> Dart {
        self.pred[d.index()]
    }

    /// Face permutation: follow `d`, then turn to the next half-edge.
    pub fn face_next(&self, d: Dart) -> Dart {
        self.succ(d.rev())
    }

    pub fn dart_name(&self, d: Dart) -> String {
        dart_label(&self.edge_names, d)
    }

    pub fn parse_dart(&self, tok: &str) -> Result<Dart, GraphError> {
        let (fwd, name) = match tok.strip_prefix('~') {
            Some(rest) => (false, rest),
            None => (true, tok),
        };
        if name.is_empty() {
            return Err(GraphError::BadDart(tok.to_string()));
        }
        let e = self
            .find_edge(name)
            .ok_or_else(|| GraphError::UnknownEdge(name.to_string()))?;
        Ok(Dart::new(e, fwd))
    }

    pub fn parse_word(&self, text: &str) -> Result<Vec<Dart>, GraphError> {
        text.split_whitespace().map(|t| self.parse_dart(t)).collect()
    }

    pub fn word_name(&self, w: &[Dart]) -> String {
        if w.is_empty() {
            return ".".to_string();
        }
        w.iter().map(|&d| self.dart_name(d)).collect::<Vec<_>>().join(" ")
    }

    /// Orbits of the face permutation, each starting at its smallest dart.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        let mut seen = vec![false; self.dart_count()];
        let mut out = Vec::new();
        for d in self.darts() {
            if seen[d.index()] {
                continue;
            }
            let mut face = Vec::new();
            let mut x = d;
            while !seen[x.index()] {
                seen[x.index()] = true;
                face.push(x);
                x = self.face_next(x);
            }
            out.push(face);
        }
        out
    }

    /// Connected components as a vertex labelling and a count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.vertex_count()];
        let mut n = 0;
        for s in 0..self.vertex_count() {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = n;
            while let Some(v) = stack.pop() {
                for &d in &self.rotation[v] {
                    let w = self.head(d);
                    if comp[w] == usize::MAX {
                        comp[w] = n;
                        stack.push(w);
                    }
                }
            }
            n += 1;
        }
        (comp, n)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Genus of each connected component, from `V - E + F = 2 - 2g`.
    pub fn genus_per_component(&self) -> Vec<usize> {
        let (comp, n) = self.components();
        let mut chi = vec![0i64; n];
        for &c in &comp {
            chi[c] += 1;
        }
        for e in 0..self.edge_count() {
            chi[comp[self.ends[e][0]]] -= 1;
        }
        for f in self.faces() {
            chi[comp[self.tail(f[0])]] += 1;
        }
        chi.into_iter()
            .map(|x| {
                debug_assert!(x <= 2 && (2 - x) % 2 == 0);
                ((2 - x) / 2) as usize
            })
            .collect()
    }

    pub fn genus(&self) -> usize {
        self.genus_per_component().iter().sum()
    }

    /// First rank of the underlying graph.
    pub fn rank(&self) -> usize {
        let (_, n) = self.components();
        self.edge_count() + n - self.vertex_count()
    }

    /// A spanning forest chosen greedily in edge order.
    pub fn spanning_tree(&self) -> Vec<usize> {
        self.spanning_tree_preferring(&[])
    }

    /// Spanning forest that takes `preferred` edges first when they keep it acyclic.
    pub fn spanning_tree_preferring(&self, preferred: &[usize]) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertex_count());
        let mut tree = Vec::new();
        let rest = (0..self.edge_count()).filter(|e| !preferred.contains(e));
        for e in preferred.iter().copied().chain(rest) {
            let [a, b] = self.ends[e];
            if uf.union(a, b) {
                tree.push(e);
            }
        }
        tree.sort_unstable();
        tree
    }

    /// True when the edges form a forest spanning every component.
    pub fn is_spanning_tree(&self, edges: &[usize]) -> bool {
        let mut uf = UnionFind::new(self.vertex_count());
        for &e in edges {
            if e >= self.edge_count() {
                return false;
            }
            let [a, b] = self.ends[e];
            if !uf.union(a, b) {
                return false;
            }
        }
        let (_, n) = self.components();
        edges.len() + n == self.vertex_count()
    }

    /// Darts of the tree path from `a` to `b` inside the forest `tree`.
    pub fn tree_path(&self, tree: &[usize], a: usize, b: usize) -> Option<Vec<Dart>> {
        let mut in_tree = vec![false; self.edge_count()];
        for &e in tree {
            in_tree[e] = true;
        }
        let mut via: Vec<Option<Dart>> = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[a] = true;
        let mut stack = vec![a];
        while let Some(v) = stack.pop() {
            for &d in &self.rotation[v] {
                if !in_tree[d.edge()] {
                    continue;
                }
                let w = self.head(d);
                if !seen[w] {
                    seen[w] = true;
                    via[w] = Some(d);
                    stack.push(w);
                }
            }
        }
        if !seen[b] {
            return None;
        }
        let mut path = Vec::new();
        let mut v = b;
        while v != a {
            let d = via[v].expect("tree path");
            path.push(d);
            v = self.tail(d);
        }
        path.reverse();
        Some(path)
    }
}

fn dart_label(names: &[String], d: Dart) -> String {
    if d.is_forward() {
        names[d.edge()].clone()
    } else {
        format!("~{}", names[d.edge()])
    }
}

impl fmt::Display for RibbonGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (V={}, E={}, F={}, g={})",
            self.name,
            self.vertex_count(),
            self.edge_count(),
            self.faces().len(),
            self.genus()
        )
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Positive edge lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elastic {
    alpha: Vec<Q>,
}

impl Elastic {
    pub fn new(g: &RibbonGraph, alpha: Vec<Q>) -> Result<Self, GraphError> {
        if alpha.len() != g.edge_count() {
            return Err(GraphError::UnknownEdge(format!(
                "{} lengths for {} edges",
                alpha.len(),
                g.edge_count()
            )));
        }
        for (e, a) in alpha.iter().enumerate() {
            if !a.is_positive() {
                return Err(GraphError::NonPositiveLength(g.edge_name(e).to_string()));
            }
        }
        Ok(Elastic { alpha })
    }

    pub fn uniform(g: &RibbonGraph) -> Self {
        Elastic { alpha: vec![Q::from_integer(1.into()); g.edge_count()] }
    }

    pub fn alpha(&self, e: usize) -> &Q {
        &self.alpha[e]
    }

    pub fn values(&self) -> &[Q] {
        &self.alpha
    }

    /// Minimum edge length `m`.
    pub fn min_length(&self) -> Q {
        self.alpha.iter().min().cloned().unwrap_or_else(Q::zero)
    }

    /// Total edge length `M`.
    pub fn total_length(&self) -> Q {
        self.alpha.iter().fold(Q::zero(), |acc, a| acc + a)
    }
}

/// Edge path with an explicit basepoint so that empty paths still know where they are.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgePath {
    pub start: usize,
    pub darts: Vec<Dart>,
}

impl EdgePath {
    pub fn trivial(v: usize) -> Self {
        EdgePath { start: v, darts: Vec::new() }
    }

    pub fn new(g: &RibbonGraph, start: usize, darts: Vec<Dart>) -> Result<Self, GraphError> {
        check_incident(g, Some(start), &darts)?;
        Ok(EdgePath { start, darts })
    }

    pub fn end(&self, g: &RibbonGraph) -> usize {
        self.darts.last().map_or(self.start, |&d| g.head(d))
    }

    /// Cancels every backtrack; the result is homotopic rel endpoints.
    pub fn reduced(&self) -> Self {
        EdgePath { start: self.start, darts: reduce_word(&self.darts) }
    }
}

pub(crate) fn check_incident(
    g: &RibbonGraph,
    start: Option<usize>,
    darts: &[Dart],
) -> Result<(), GraphError> {
    if let (Some(s), Some(&d)) = (start, darts.first()) {
        if g.tail(d) != s {
            return Err(GraphError::NotIncident(g.vertex_name(s).to_string(), g.dart_name(d)));
        }
    }
    for w in darts.windows(2) {
        if g.head(w[0]) != g.tail(w[1]) {
            return Err(GraphError::NotIncident(g.dart_name(w[0]), g.dart_name(w[1])));
        }
    }
    Ok(())
}

/// Free reduction of a dart word.
pub fn reduce_word(w: &[Dart]) -> Vec<Dart> {
    let mut out: Vec<Dart> = Vec::with_capacity(w.len());
    for &d in w {
        if out.last() == Some(&d.rev()) {
            out.pop();
        } else {
            out.push(d);
        }
    }
    out
}

/// Cyclic reduction: free reduction plus wraparound cancellation.
pub fn reduce_cyclic(w: &[Dart]) -> Vec<Dart> {
    let r = reduce_word(w);
    let mut i = 0;
    let mut j = r.len();
    while j - i >= 2 && r[i] == r[j - 1].rev() {
        i += 1;
        j -= 1;
    }
    r[i..j].to_vec()
}

/// Checked reduction of a path given as darts.
pub fn reduce_path(g: &RibbonGraph, w: &[Dart]) -> Result<Vec<Dart>, GraphError> {
    check_incident(g, None, w)?;
    Ok(reduce_word(w))
}

/// Checked cyclic reduction of a closed walk.
pub fn reduce_closed(g: &RibbonGraph, w: &[Dart]) -> Result<Vec<Dart>, GraphError> {
    check_incident(g, None, w)?;
    if let (Some(&a), Some(&b)) = (w.first(), w.last()) {
        if g.head(b) != g.tail(a) {
            return Err(GraphError::NotClosed);
        }
    }
    Ok(reduce_cyclic(w))
}

pub fn invert_word(w: &[Dart]) -> Vec<Dart> {
    w.iter().rev().map(|d| d.rev()).collect()
}

/// Lexicographically least rotation of `w`.
fn least_rotation(w: &[Dart]) -> Vec<Dart> {
    let n = w.len();
    let mut best = 0;
    for s in 1..n {
        for k in 0..n {
            let (a, b) = (w[(s + k) % n], w[(best + k) % n]);
            if a != b {
                if a < b {
                    best = s;
                }
                break;
            }
        }
    }
    (0..n).map(|k| w[(best + k) % n]).collect()
}

/// Canonical unoriented cyclic word: least over rotations of the word and its inverse.
/// The input must already be cyclically reduced.
pub fn canonical_cyclic(w: &[Dart]) -> Vec<Dart> {
    let a = least_rotation(w);
    let b = least_rotation(&invert_word(w));
    a.min(b)
}

/// Canonical oriented cyclic word: least rotation only.
pub fn canonical_oriented(w: &[Dart]) -> Vec<Dart> {
    least_rotation(w)
}

/// Multiset of cyclically reduced unoriented closed curves, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiCurve {
    components: Vec<Vec<Dart>>,
}

impl MultiCurve {
    pub fn empty() -> Self {
        MultiCurve::default()
    }

    /// Reduces and canonicalises each closed walk; null-homotopic ones vanish.
    pub fn new(g: &RibbonGraph, words: Vec<Vec<Dart>>) -> Result<Self, GraphError> {
        let mut comps = Vec::with_capacity(words.len());
        for w in words {
            let r = reduce_closed(g, &w)?;
            if !r.is_empty() {
                comps.push(canonical_cyclic(&r));
            }
        }
        comps.sort();
        Ok(MultiCurve { components: comps })
    }

    /// Builds from words already known to be closed walks.
    pub(crate) fn from_closed(words: impl IntoIterator<Item = Vec<Dart>>) -> Self {
        let mut comps: Vec<Vec<Dart>> = words
            .into_iter()
            .map(|w| reduce_cyclic(&w))
            .filter(|w| !w.is_empty())
            .map(|w| canonical_cyclic(&w))
            .collect();
        comps.sort();
        MultiCurve { components: comps }
    }

    pub fn parse(g: &RibbonGraph, text: &str) -> Result<Self, GraphError> {
        let words = text
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| g.parse_word(s))
            .collect::<Result<Vec<_>, _>>()?;
        MultiCurve::new(g, words)
    }

    pub fn components(&self) -> &[Vec<Dart>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn union(&self, other: &MultiCurve) -> MultiCurve {
        let mut comps = self.components.clone();
        comps.extend(other.components.iter().cloned());
        comps.sort();
        MultiCurve { components: comps }
    }

    /// Multiplicity `n_c(e)` of each edge.
    pub fn edge_counts(&self, edge_count: usize) -> Vec<u64> {
        let mut n = vec![0u64; edge_count];
        for w in &self.components {
            for d in w {
                n[d.edge()] += 1;
            }
        }
        n
    }

    pub fn display(&self, g: &RibbonGraph) -> String {
        if self.components.is_empty() {
            return "(empty)".to_string();
        }
        self.components.iter().map(|w| g.word_name(w)).collect::<Vec<_>>().join(", ")
    }
}

/// `Σ α(e) n_c(e)²`.
pub fn extremal_length(c: &MultiCurve, alpha: &Elastic) -> Result<Q, GraphError> {
    let ne = alpha.values().len();
    if let Some(d) = c.components.iter().flatten().find(|d| d.edge() >= ne) {
        return Err(GraphError::UnknownEdge(format!("#{}", d.edge())));
    }
    Ok(el_from_counts(&c.edge_counts(ne), alpha))
}

pub(crate) fn el_from_counts(n: &[u64], alpha: &Elastic) -> Q {
    n.iter()
        .zip(alpha.values())
        .filter(|(k, _)| **k > 0)
        .fold(Q::zero(), |acc, (k, a)| acc + a * Q::from_integer((k * k).into()))
}

/// Canonical cyclically reduced words of length `1..=max_len`, ordered by length then darts.
pub fn enumerate_cyclic_words(g: &RibbonGraph, max_len: usize) -> Vec<Vec<Dart>> {
    enumerate_cyclic_words_capped(g, max_len, usize::MAX)
}

/// As [`enumerate_cyclic_words`], stopping after `cap` words.
pub fn enumerate_cyclic_words_capped(g: &RibbonGraph, max_len: usize, cap: usize) -> Vec<Vec<Dart>> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        let from = out.len();
        for d0 in g.darts().filter(|d| d.is_forward()) {
            let mut w = vec![d0];
            extend_words(g, len, &mut w, &mut out, cap);
            if out.len() >= cap {
                break;
            }
        }
        out[from..].sort();
        if out.len() >= cap {
            break;
        }
    }
    out
}

fn extend_words(g: &RibbonGraph, len: usize, w: &mut Vec<Dart>, out: &mut Vec<Vec<Dart>>, cap: usize) {
    if out.len() >= cap {
        return;
    }
    let first = w[0];
    if w.len() == len {
        let last = *w.last().unwrap();
        if g.head(last) == g.tail(first) && last != first.rev() && canonical_cyclic(w) == *w {
            out.push(w.clone());
        }
        return;
    }
    let last = *w.last().unwrap();
    for &d in g.rotation(g.head(last)) {
        // a canonical word starts with its least dart, in either orientation
        if d == last.rev() || d < first || d.rev() < first {
            continue;
        }
        w.push(d);
        extend_words(g, len, w, out, cap);
        w.pop();
    }
}

/// All multi-curves with at most `max_components` components drawn from the
/// canonical words of length at most `max_len`, with repetition.
pub fn enumerate_curves(g: &RibbonGraph, max_len: usize, max_components: usize) -> Vec<MultiCurve> {
    let words = enumerate_cyclic_words(g, max_len);
    multisets(&words, max_components)
}

pub(crate) fn multisets(words: &[Vec<Dart>], max_components: usize) -> Vec<MultiCurve> {
    let mut out = Vec::new();
    let mut idx = Vec::new();
    for k in 1..=max_components {
        idx.clear();
        push_multisets(words, k, 0, &mut idx, &mut out);
    }
    out
}

fn push_multisets(
    words: &[Vec<Dart>],
    k: usize,
    from: usize,
    idx: &mut Vec<usize>,
    out: &mut Vec<MultiCurve>,
) {
    if idx.len() == k {
        let mut comps: Vec<Vec<Dart>> = idx.iter().map(|&i| words[i].clone()).collect();
        comps.sort();
        out.push(MultiCurve { components: comps });
        return;
    }
    for i in from..words.len() {
        idx.push(i);
        push_multisets(words, k, i, idx, out);
        idx.pop();
    }
}
