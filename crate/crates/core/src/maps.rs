//! Graph maps, coverings, fiber products and curve transport.

use std::sync::Arc;

use num::Zero;
use thiserror::Error;

use crate::graph::{
    check_incident, reduce_cyclic, reduce_word, Dart, EdgePath, Elastic, GraphError, MultiCurve,
    RibbonGraph, Q,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("image of edge `{edge}` does not run from the image of its tail to the image of its head")]
    EdgeImageMismatch { edge: String },
    #[error("wrong number of images: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("edge `{0}` is not sent to a single edge")]
    NotSingleEdge(String),
    #[error("star of `{0}` does not map bijectively onto the star of its image")]
    StarNotBijective(String),
    #[error("degree is not constant over target component containing `{0}`")]
    DegreeNotConstant(String),
    #[error("target graphs differ: `{0}` vs `{1}`")]
    TargetMismatch(String, String),
    #[error("vertex `{0}` is not in the fiber over the path start")]
    NotInFiber(String),
    #[error("graph maps are not composable")]
    NotComposable,
}

/// A graph map sending vertices to vertices and edges to taut edge paths.
#[derive(Clone, Debug)]
pub struct GraphMap {
    source: Arc<RibbonGraph>,
    target: Arc<RibbonGraph>,
    vmap: Vec<usize>,
    emap: Vec<Vec<Dart>>,
}

impl GraphMap {
    /// Validates incidence and tightens every edge image.
    pub fn new(
        source: Arc<RibbonGraph>,
        target: Arc<RibbonGraph>,
        vmap: Vec<usize>,
        emap: Vec<Vec<Dart>>,
    ) -> Result<Self, MapError> {
        if vmap.len() != source.vertex_count() {
            return Err(MapError::Arity { expected: source.vertex_count(), got: vmap.len() });
        }
        if emap.len() != source.edge_count() {
            return Err(MapError::Arity { expected: source.edge_count(), got: emap.len() });
        }
        if let Some(&v) = vmap.iter().find(|&&v| v >= target.vertex_count()) {
            return Err(GraphError::UnknownVertex(format!("#{v}")).into());
        }
        let mut tight = Vec::with_capacity(emap.len());
        for (e, path) in emap.into_iter().enumerate() {
            let [t, h] = source.ends(e);
            let mismatch = || MapError::EdgeImageMismatch { edge: source.edge_name(e).to_string() };
            if path.iter().any(|d| d.edge() >= target.edge_count()) {
                return Err(mismatch());
            }
            check_incident(&target, Some(vmap[t]), &path).map_err(|_| mismatch())?;
            let end = path.last().map_or(vmap[t], |&d| target.head(d));
            if end != vmap[h] {
                return Err(mismatch());
            }
            tight.push(reduce_word(&path));
        }
        Ok(GraphMap { source, target, vmap, emap: tight })
    }

    pub fn identity(g: Arc<RibbonGraph>) -> Self {
        let vmap = (0..g.vertex_count()).collect();
        let emap = (0..g.edge_count()).map(|e| vec![Dart::forward(e)]).collect();
        GraphMap { source: g.clone(), target: g, vmap, emap }
    }

    pub fn source(&self) -> &Arc<RibbonGraph> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RibbonGraph> {
        &self.target
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.vmap[v]
    }

    pub fn vertex_images(&self) -> &[usize] {
        &self.vmap
    }

    pub fn edge_image(&self, e: usize) -> &[Dart] {
        &self.emap[e]
    }

    pub fn edge_images(&self) -> &[Vec<Dart>] {
        &self.emap
    }

    /// Image of a dart, reversed for backward darts.
    pub fn dart_image(&self, d: Dart) -> Vec<Dart> {
        let p = &self.emap[d.edge()];
        if d.is_forward() {
            p.clone()
        } else {
            p.iter().rev().map(|x| x.rev()).collect()
        }
    }

    /// Concatenated image of a word, not reduced.
    pub fn word_image(&self, w: &[Dart]) -> Vec<Dart> {
        let mut out = Vec::new();
        for &d in w {
            out.extend(self.dart_image(d));
        }
        out
    }

    pub fn path_image(&self, p: &EdgePath) -> EdgePath {
        EdgePath { start: self.vmap[p.start], darts: reduce_word(&self.word_image(&p.darts)) }
    }

    /// `self ∘ inner`, tightened.
    pub fn compose(&self, inner: &GraphMap) -> Result<GraphMap, MapError> {
        if !Arc::ptr_eq(&inner.target, &self.source) && inner.target.as_ref() != self.source.as_ref() {
            return Err(MapError::NotComposable);
        }
        let vmap = inner.vmap.iter().map(|&v| self.vmap[v]).collect();
        let emap = inner.emap.iter().map(|p| reduce_word(&self.word_image(p))).collect();
        Ok(GraphMap { source: inner.source.clone(), target: self.target.clone(), vmap, emap })
    }

    /// Same combinatorics with the target replaced by an equal graph carrying
    /// another rotation system (or vice versa for the source).
    pub fn with_graphs(&self, source: Arc<RibbonGraph>, target: Arc<RibbonGraph>) -> Result<Self, MapError> {
        GraphMap::new(source, target, self.vmap.clone(), self.emap.clone())
    }

    pub fn is_collapsed(&self, e: usize) -> bool {
        self.emap[e].is_empty()
    }
}

/// A covering map of constant degree with a lifting table.
#[derive(Clone, Debug)]
pub struct Covering {
    map: GraphMap,
    degree: usize,
    // lift[v * D + d] = source dart at v over target dart d
    lift: Vec<u32>,
    fibers: Vec<Vec<usize>>,
}

const NONE: u32 = u32::MAX;

/// Checks star bijectivity and constant degree.
pub fn validate_covering(map: GraphMap) -> Result<Covering, MapError> {
    let src = map.source.clone();
    let tgt = map.target.clone();
    for e in 0..src.edge_count() {
        if map.emap[e].len() != 1 {
            return Err(MapError::NotSingleEdge(src.edge_name(e).to_string()));
        }
    }
    let nd = tgt.dart_count();
    let mut lift = vec![NONE; src.vertex_count() * nd];
    for v in 0..src.vertex_count() {
        let x = map.vmap[v];
        if src.degree(v) != tgt.degree(x) {
            return Err(MapError::StarNotBijective(src.vertex_name(v).to_string()));
        }
        for &d in src.rotation(v) {
            let img = map.dart_image(d)[0];
            let slot = &mut lift[v * nd + img.index()];
            if *slot != NONE || tgt.tail(img) != x {
                return Err(MapError::StarNotBijective(src.vertex_name(v).to_string()));
            }
            *slot = d.0;
        }
    }
    let mut fibers = vec![Vec::new(); tgt.vertex_count()];
    for v in 0..src.vertex_count() {
        fibers[map.vmap[v]].push(v);
    }
    let (comp, ncomp) = tgt.components();
    let mut deg = vec![None; ncomp];
    for x in 0..tgt.vertex_count() {
        let k = fibers[x].len();
        match deg[comp[x]] {
            None => deg[comp[x]] = Some(k),
            Some(d) if d != k => return Err(MapError::DegreeNotConstant(tgt.vertex_name(x).to_string())),
            _ => {}
        }
    }
    let degree = deg.iter().flatten().copied().max().unwrap_or(0);
    if deg.iter().any(|d| *d != Some(degree)) || degree == 0 {
        let x = tgt.vertex_names().first().cloned().unwrap_or_default();
        return Err(MapError::DegreeNotConstant(x));
    }
    Ok(Covering { map, degree, lift, fibers })
}

impl Covering {
    pub fn map(&self) -> &GraphMap {
        &self.map
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn source(&self) -> &Arc<RibbonGraph> {
        &self.map.source
    }

    pub fn target(&self) -> &Arc<RibbonGraph> {
        &self.map.target
    }

    /// Source vertices over `x`, in index order.
    pub fn fiber(&self, x: usize) -> &[usize] {
        &self.fibers[x]
    }

    /// The dart at source vertex `v` lying over target dart `d`.
    pub fn lift_dart(&self, v: usize, d: Dart) -> Dart {
        let r = self.lift[v * self.map.target.dart_count() + d.index()];
        debug_assert!(r != NONE, "dart does not start at the image of v");
        Dart(r)
    }

    /// Image dart of a source dart.
    pub fn project_dart(&self, d: Dart) -> Dart {
        let t = self.map.emap[d.edge()][0];
        if d.is_forward() {
            t
        } else {
            t.rev()
        }
    }

    /// Follows a target word from `v`; returns lifted darts and the end vertex.
    pub fn lift_word(&self, v: usize, w: &[Dart]) -> (Vec<Dart>, usize) {
        let src = &self.map.source;
        let mut at = v;
        let mut out = Vec::with_capacity(w.len());
        for &d in w {
            let l = self.lift_dart(at, d);
            out.push(l);
            at = src.head(l);
        }
        (out, at)
    }

    /// End vertex of the lift of `w` from `v`.
    pub fn lift_end(&self, v: usize, w: &[Dart]) -> usize {
        let src = &self.map.source;
        w.iter().fold(v, |at, &d| src.head(self.lift_dart(at, d)))
    }

    pub fn project_word(&self, w: &[Dart]) -> Vec<Dart> {
        w.iter().map(|&d| self.project_dart(d)).collect()
    }
}

/// Unique path lifting through a covering.
pub fn lift_path(pi: &Covering, p: &EdgePath, start: usize) -> Result<EdgePath, MapError> {
    if start >= pi.source().vertex_count() || pi.map.vmap[start] != p.start {
        return Err(MapError::NotInFiber(format!("#{start}")));
    }
    check_incident(pi.target(), Some(p.start), &p.darts)?;
    let (darts, _) = pi.lift_word(start, &p.darts);
    Ok(EdgePath { start, darts })
}

/// Fiber product of a covering with a graph map into its target.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub graph: Arc<RibbonGraph>,
    /// Covering onto the source of the map that was pulled back along.
    pub projection: Covering,
    /// Map into the total space of the original covering.
    pub lifted: GraphMap,
    /// For each pullback vertex, its pair (map-source vertex, cover-space vertex).
    pub pairs: Vec<(usize, usize)>,
}

/// Fiber product `Y ×_X X̃` of `pi: X̃ → X` and `g: Y → X`, with edge images
/// lifted as paths so no subdivision is required. Vertex and edge names
/// prefix the cover coordinate: `x̃.y` and `x̃.e`.
pub fn pullback_along(pi: &Covering, g: &GraphMap) -> Result<Pullback, MapError> {
    if pi.target().as_ref() != g.target().as_ref() {
        return Err(MapError::TargetMismatch(pi.target().name().into(), g.target().name().into()));
    }
    let y = g.source().clone();
    let cover = pi.source().clone();
    let mut index = vec![Vec::new(); y.vertex_count()];
    let mut pairs = Vec::new();
    let mut vnames = Vec::new();
    for v in 0..y.vertex_count() {
        for &xt in pi.fiber(g.vertex_image(v)) {
            index[v].push(pairs.len());
            pairs.push((v, xt));
            vnames.push(format!("{}.{}", cover.vertex_name(xt), y.vertex_name(v)));
        }
    }
    let slot = |v: usize, xt: usize| -> usize {
        let k = pi.fiber(g.vertex_image(v)).binary_search(&xt).expect("fiber member");
        index[v][k]
    };
    let mut edges = Vec::new();
    let mut edge_index = vec![Vec::new(); y.edge_count()];
    let mut origin = Vec::new();
    let mut lifted_imgs = Vec::new();
    for e in 0..y.edge_count() {
        let [t, h] = y.ends(e);
        for &xt in pi.fiber(g.vertex_image(t)) {
            let (darts, end) = pi.lift_word(xt, g.edge_image(e));
            edge_index[e].push(edges.len());
            origin.push(e);
            edges.push((format!("{}.{}", cover.vertex_name(xt), y.edge_name(e)), slot(t, xt), slot(h, end)));
            lifted_imgs.push(darts);
        }
    }
    // rotation pulled back from Y
    let mut rotation = vec![Vec::new(); pairs.len()];
    for (p, &(v, xt)) in pairs.iter().enumerate() {
        for &d in y.rotation(v) {
            let e = d.edge();
            let from = if d.is_forward() {
                xt
            } else {
                let back: Vec<Dart> = g.dart_image(d);
                pi.lift_end(xt, &back)
            };
            let k = pi.fiber(g.vertex_image(y.ends(e)[0])).binary_search(&from).expect("fiber member");
            rotation[p].push(Dart::new(edge_index[e][k], d.is_forward()));
        }
    }
    let name = format!("{}*{}", cover.name(), y.name());
    let graph = Arc::new(RibbonGraph::new(name, vnames, edges, rotation)?);
    let proj_v = pairs.iter().map(|&(v, _)| v).collect();
    let proj_e = origin.iter().map(|&e| vec![Dart::forward(e)]).collect();
    let projection = validate_covering(GraphMap::new(graph.clone(), y, proj_v, proj_e)?)?;
    let lifted_v = pairs.iter().map(|&(_, xt)| xt).collect();
    let lifted = GraphMap::new(graph.clone(), cover, lifted_v, lifted_imgs)?;
    Ok(Pullback { graph, projection, lifted, pairs })
}

/// Subdivides the source of `g` so every edge maps to at most one edge.
/// Pieces of an edge `e` are named `e#0, e#1, ...`, new vertices `e@1, ...`,
/// and the pieces share the length of `e` equally.
pub fn subdivide_map(g: &GraphMap, alpha: &Elastic) -> Result<(GraphMap, Elastic), MapError> {
    let y = g.source();
    let mut vnames: Vec<String> = y.vertex_names().to_vec();
    let mut vmap: Vec<usize> = g.vertex_images().to_vec();
    let mut edges = Vec::new();
    let mut emap = Vec::new();
    let mut lengths = Vec::new();
    // first and last piece of each original edge, for the rotation at old vertices
    let mut first_last = Vec::new();
    let mut inner_rot: Vec<Vec<Dart>> = Vec::new();
    for e in 0..y.edge_count() {
        let [t, h] = y.ends(e);
        let img = g.edge_image(e);
        let k = img.len().max(1);
        let piece_len = alpha.alpha(e) / Q::from_integer((k as i64).into());
        let first = edges.len();
        let mut prev = t;
        for i in 0..k {
            let next = if i + 1 == k {
                h
            } else {
                vnames.push(format!("{}@{}", y.edge_name(e), i + 1));
                vmap.push(g.target().head(img[i]));
                inner_rot.push(Vec::new());
                vnames.len() - 1
            };
            edges.push((format!("{}#{}", y.edge_name(e), i), prev, next));
            emap.push(if img.is_empty() { Vec::new() } else { vec![img[i]] });
            lengths.push(piece_len.clone());
            prev = next;
        }
        first_last.push((first, edges.len() - 1));
    }
    let old = y.vertex_count();
    let mut rotation: Vec<Vec<Dart>> = (0..old)
        .map(|v| {
            y.rotation(v)
                .iter()
                .map(|&d| {
                    let (f, l) = first_last[d.edge()];
                    if d.is_forward() {
                        Dart::forward(f)
                    } else {
                        Dart::backward(l)
                    }
                })
                .collect()
        })
        .collect();
    rotation.extend(inner_rot);
    for (i, (_, t, h)) in edges.iter().enumerate() {
        if *t >= old {
            rotation[*t].insert(0, Dart::forward(i));
        }
        if *h >= old {
            rotation[*h].push(Dart::backward(i));
        }
    }
    let sub = Arc::new(RibbonGraph::new(format!("{}'", y.name()), vnames, edges, rotation)?);
    let alpha_sub = Elastic::new(&sub, lengths)?;
    Ok((GraphMap::new(sub, g.target().clone(), vmap, emap)?, alpha_sub))
}

/// Pullback of a covering along a map, after subdividing the map's source.
pub fn pullback_cover(pi: &Covering, g: &GraphMap, alpha: &Elastic) -> Result<(Pullback, Elastic), MapError> {
    let (sub, alpha_sub) = subdivide_map(g, alpha)?;
    let pb = pullback_along(pi, &sub)?;
    let lengths = (0..pb.graph.edge_count())
        .map(|e| alpha_sub.alpha(pb.projection.project_dart(Dart::forward(e)).edge()).clone())
        .collect();
    let a = Elastic::new(&pb.graph, lengths)?;
    Ok((pb, a))
}

/// Lengths on the source of a covering pulled back from its target.
pub fn pull_lengths(pi: &Covering, alpha: &Elastic) -> Elastic {
    let g = pi.source();
    let v = (0..g.edge_count())
        .map(|e| alpha.alpha(pi.project_dart(Dart::forward(e)).edge()).clone())
        .collect();
    Elastic::new(g, v).expect("pulled back lengths are positive")
}

/// One component of a lifted curve with the degree it covers its image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedComponent {
    pub word: Vec<Dart>,
    pub degree: usize,
}

/// Components of the preimage of one cyclically reduced word.
pub fn lift_closed_word(pi: &Covering, w: &[Dart]) -> Vec<LiftedComponent> {
    if w.is_empty() {
        return Vec::new();
    }
    let base = pi.target().tail(w[0]);
    let fiber = pi.fiber(base).to_vec();
    let mut done = vec![false; fiber.len()];
    let mut out = Vec::new();
    for (i, &start) in fiber.iter().enumerate() {
        if done[i] {
            continue;
        }
        let mut word = Vec::new();
        let mut at = start;
        let mut degree = 0;
        loop {
            let k = fiber.binary_search(&at).expect("fiber member");
            done[k] = true;
            let (darts, end) = pi.lift_word(at, w);
            word.extend(darts);
            degree += 1;
            at = end;
            if at == start {
                break;
            }
        }
        out.push(LiftedComponent { word, degree });
    }
    out
}

/// `π* c`: every component lifted, preserving multiplicity.
pub fn pullback_curve(pi: &Covering, c: &MultiCurve) -> MultiCurve {
    MultiCurve::from_closed(
        c.components().iter().flat_map(|w| lift_closed_word(pi, w).into_iter().map(|l| l.word)),
    )
}

/// `φ_* c`: substitute, cyclically reduce, drop null-homotopic components.
pub fn pushforward_curve(phi: &GraphMap, c: &MultiCurve) -> MultiCurve {
    MultiCurve::from_closed(c.components().iter().map(|w| phi.word_image(w)))
}

/// Image of a single closed word, cyclically reduced.
pub fn push_word(phi: &GraphMap, w: &[Dart]) -> Vec<Dart> {
    reduce_cyclic(&phi.word_image(w))
}

/// Total length of an edge path.
pub fn path_length(alpha: &Elastic, w: &[Dart]) -> Q {
    w.iter().fold(Q::zero(), |acc, d| acc + alpha.alpha(d.edge()))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::extremal_length;

    pub(crate) fn rose(name: &str, petals: usize) -> Arc<RibbonGraph> {
        let names = ["a", "b", "c", "d", "e", "f"];
        let edges = (0..petals).map(|i| (names[i].to_string(), 0, 0)).collect();
        let rot = (0..petals).flat_map(|i| [Dart::forward(i), Dart::backward(i)]).collect();
        Arc::new(RibbonGraph::new(name, vec!["o".into()], edges, vec![rot]).unwrap())
    }

    /// Cyclic degree-`d` cover of the one-petal rose.
    pub(crate) fn loop_cover(d: usize) -> Covering {
        let base = rose("loop", 1);
        let vs: Vec<String> = (0..d).map(|i| format!("o{i}")).collect();
        let es = (0..d).map(|i| (format!("a{i}"), i, (i + 1) % d)).collect();
        let rot = (0..d)
            .map(|i| vec![Dart::forward(i), Dart::backward((i + d - 1) % d)])
            .collect();
        let g = Arc::new(RibbonGraph::new(format!("loop{d}"), vs, es, rot).unwrap());
        let m = GraphMap::new(g, base, vec![0; d], (0..d).map(|_| vec![Dart::forward(0)]).collect()).unwrap();
        validate_covering(m).unwrap()
    }

    #[test]
    fn identity_is_degree_one() {
        let g = rose("r", 2);
        let c = validate_covering(GraphMap::identity(g)).unwrap();
        assert_eq!(c.degree(), 1);
    }

    #[test]
    fn collapse_is_not_a_covering() {
        let g = rose("r", 1);
        let m = GraphMap::new(g.clone(), g, vec![0], vec![vec![]]).unwrap();
        assert!(matches!(validate_covering(m), Err(MapError::NotSingleEdge(_))));
    }

    #[test]
    fn lift_of_square_closes_in_double_cover() {
        let pi = loop_cover(2);
        let base = pi.target().clone();
        let w = base.parse_word("a a").unwrap();
        let p = lift_path(&pi, &EdgePath { start: 0, darts: w }, 0).unwrap();
        assert_eq!(p.end(pi.source()), 0);
        let single = lift_path(&pi, &EdgePath { start: 0, darts: base.parse_word("a").unwrap() }, 0).unwrap();
        assert_eq!(single.end(pi.source()), 1);
        assert!(lift_path(&pi, &EdgePath::trivial(0), 1).unwrap().darts.is_empty());
    }

    #[test]
    fn pullback_of_double_cover_along_triple_map() {
        let pi = loop_cover(2);
        let base = pi.target().clone();
        let triple = GraphMap::new(base.clone(), base.clone(), vec![0], vec![vec![Dart::forward(0); 3]]).unwrap();
        let (pb, _) = pullback_cover(&pi, &triple, &Elastic::uniform(&base)).unwrap();
        assert_eq!(pb.graph.edge_count(), 6);
        assert_eq!(pb.projection.degree(), 2);
    }

    #[test]
    fn pullback_along_constant_map_is_disjoint_copies() {
        let pi = loop_cover(3);
        let base = pi.target().clone();
        let y = rose("y", 2);
        let g = GraphMap::new(y, base, vec![0], vec![vec![], vec![]]).unwrap();
        let pb = pullback_along(&pi, &g).unwrap();
        assert_eq!(pb.graph.components().1, 3);
        assert_eq!(pb.graph.edge_count(), 6);
    }

    #[test]
    fn curve_lift_doubles_length() {
        let pi = loop_cover(2);
        let base = pi.target().clone();
        let c = MultiCurve::parse(&base, "a").unwrap();
        let up = pullback_curve(&pi, &c);
        assert_eq!(up.len(), 1);
        assert_eq!(up.components()[0].len(), 2);
        let a0 = Elastic::uniform(&base);
        let a1 = pull_lengths(&pi, &a0);
        let two = Q::from_integer(2.into());
        assert_eq!(extremal_length(&up, &a1).unwrap(), two * extremal_length(&c, &a0).unwrap());
    }

    #[test]
    fn pushforward_drops_null_homotopic() {
        let g = rose("r", 2);
        let m = GraphMap::new(g.clone(), g.clone(), vec![0], vec![vec![Dart::forward(0)], vec![Dart::forward(0)]])
            .unwrap();
        let c = MultiCurve::parse(&g, "a ~b").unwrap();
        assert!(pushforward_curve(&m, &c).is_empty());
        let id = GraphMap::identity(g.clone());
        assert_eq!(pushforward_curve(&id, &c), c);
    }
}
