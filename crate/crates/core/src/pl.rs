//! Piecewise-linear maps between elastic graphs and their exact energies.

use std::collections::HashMap;
use std::sync::Arc;

use num::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{Dart, Elastic, RibbonGraph, Q};
use crate::maps::{validate_covering, Covering, GraphMap, MapError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlError {
    #[error("piece of source edge `{0}` has non-positive length")]
    DegenerateSegment(String),
    #[error("pieces of source edge `{0}` do not add up to its length")]
    LengthMismatch(String),
    #[error("image of source edge `{0}` is not continuous")]
    Discontinuous(String),
    #[error("parameter outside target edge `{0}`")]
    OutOfRange(String),
    #[error("maps are not composable")]
    NotComposable,
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A point of an elastic graph: a vertex or an interior point of an edge,
/// at distance `t` from the tail measured in length units.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Vertex(usize),
    OnEdge(usize, Q),
}

impl Point {
    /// Rewrites edge endpoints as vertices.
    pub fn normalize(self, g: &RibbonGraph, alpha: &Elastic) -> Point {
        match self {
            Point::OnEdge(e, t) if t.is_zero() => Point::Vertex(g.ends(e)[0]),
            Point::OnEdge(e, t) if &t == alpha.alpha(e) => Point::Vertex(g.ends(e)[1]),
            p => p,
        }
    }
}

/// Image of one piece of a source edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Image {
    /// Constant map to a point.
    Point(Point),
    /// Linear map onto `[from, to]` of a target edge; `from > to` runs backward.
    Segment { edge: usize, from: Q, to: Q },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    /// Source length of the piece.
    pub len: Q,
    pub image: Image,
}

impl Piece {
    /// `|ψ′|` on the piece.
    pub fn speed(&self) -> Q {
        match &self.image {
            Image::Point(_) => Q::zero(),
            Image::Segment { from, to, .. } => (to - from).abs() / &self.len,
        }
    }
}

/// A PL map: each source edge is cut into pieces of constant derivative.
#[derive(Clone, Debug)]
pub struct PlMap {
    pub source: Arc<RibbonGraph>,
    pub target: Arc<RibbonGraph>,
    pub alpha_s: Elastic,
    pub alpha_t: Elastic,
    pub vertex_image: Vec<Point>,
    pub pieces: Vec<Vec<Piece>>,
}

fn piece_start(p: &Piece) -> Point {
    match &p.image {
        Image::Point(x) => x.clone(),
        Image::Segment { edge, from, .. } => Point::OnEdge(*edge, from.clone()),
    }
}

fn piece_end(p: &Piece) -> Point {
    match &p.image {
        Image::Point(x) => x.clone(),
        Image::Segment { edge, to, .. } => Point::OnEdge(*edge, to.clone()),
    }
}

impl PlMap {
    /// Checks lengths, ranges and continuity.
    pub fn validate(&self) -> Result<(), PlError> {
        let (s, t) = (&self.source, &self.target);
        let norm = |p: Point| p.normalize(t, &self.alpha_t);
        for e in 0..s.edge_count() {
            let name = || s.edge_name(e).to_string();
            let ps = &self.pieces[e];
            let mut total = Q::zero();
            let [a, b] = s.ends(e);
            let mut at = norm(self.vertex_image[a].clone());
            for p in ps {
                if !p.len.is_positive() {
                    return Err(PlError::DegenerateSegment(name()));
                }
                total += &p.len;
                if let Image::Segment { edge, from, to } = &p.image {
                    let top = self.alpha_t.alpha(*edge);
                    let bad = |x: &Q| x.is_negative() || x > top;
                    if bad(from) || bad(to) || from == to {
                        return Err(PlError::OutOfRange(t.edge_name(*edge).to_string()));
                    }
                }
                if norm(piece_start(p)) != at {
                    return Err(PlError::Discontinuous(name()));
                }
                at = norm(piece_end(p));
            }
            if &total != self.alpha_s.alpha(e) {
                return Err(PlError::LengthMismatch(name()));
            }
            if at != norm(self.vertex_image[b].clone()) {
                return Err(PlError::Discontinuous(name()));
            }
        }
        Ok(())
    }

    /// Constant-speed map along the taut edge images of `m`.
    pub fn constant_speed(m: &GraphMap, alpha_s: &Elastic, alpha_t: &Elastic) -> PlMap {
        let s = m.source();
        let mut pieces = Vec::new();
        for e in 0..s.edge_count() {
            let img = m.edge_image(e);
            if img.is_empty() {
                let v = m.vertex_image(s.ends(e)[0]);
                pieces.push(vec![Piece { len: alpha_s.alpha(e).clone(), image: Image::Point(Point::Vertex(v)) }]);
                continue;
            }
            let total: Q = img.iter().map(|d| alpha_t.alpha(d.edge()).clone()).sum();
            let scale = alpha_s.alpha(e) / total;
            pieces.push(img.iter().map(|&d| full_piece(d, alpha_t, &scale)).collect());
        }
        PlMap {
            source: s.clone(),
            target: m.target().clone(),
            alpha_s: alpha_s.clone(),
            alpha_t: alpha_t.clone(),
            vertex_image: m.vertex_images().iter().map(|&v| Point::Vertex(v)).collect(),
            pieces,
        }
    }

    /// Image of a point of the source.
    pub fn eval(&self, p: &Point) -> Point {
        let norm = |x: Point| x.normalize(&self.target, &self.alpha_t);
        match p.clone().normalize(&self.source, &self.alpha_s) {
            Point::Vertex(v) => norm(self.vertex_image[v].clone()),
            Point::OnEdge(e, t) => {
                let mut start = Q::zero();
                for pc in &self.pieces[e] {
                    let end = &start + &pc.len;
                    if t <= end {
                        return norm(match &pc.image {
                            Image::Point(x) => x.clone(),
                            Image::Segment { edge, from, to } => {
                                Point::OnEdge(*edge, from + (to - from) * (&t - &start) / &pc.len)
                            }
                        });
                    }
                    start = end;
                }
                unreachable!("parameter beyond edge length")
            }
        }
    }
}

fn full_piece(d: Dart, alpha_t: &Elastic, scale: &Q) -> Piece {
    let a = alpha_t.alpha(d.edge()).clone();
    let (from, to) = if d.is_forward() { (Q::zero(), a.clone()) } else { (a.clone(), Q::zero()) };
    Piece { len: a * scale, image: Image::Segment { edge: d.edge(), from, to } }
}

/// Which energy density to take over the preimages of a target point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    One,
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn parse(s: &str) -> Option<Exponent> {
        match s {
            "1" => Some(Exponent::One),
            "inf" | "infinity" | "∞" => Some(Exponent::Infinity),
            _ => s.parse::<f64>().ok().filter(|p| *p > 1.0 && p.is_finite()).map(Exponent::Finite),
        }
    }
}

/// Energy value: exact when the density is rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Q),
    Approx(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Value::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Q> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Approx(_) => None,
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{} (≈ {:.9})", crate::format::format_rational(q), self.to_f64()),
            Value::Approx(x) => write!(f, "{x:.9}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnergyKind {
    Emb,
    Epp(Exponent),
    Lip,
}

/// Maximum of the density with its profile over open target intervals.
#[derive(Clone, Debug)]
pub struct EnergyReport {
    pub kind: EnergyKind,
    pub value: Value,
    /// `(target edge, lo, hi, density)` for every open interval with preimages.
    pub profile: Vec<(usize, Q, Q, Value)>,
}

/// Speeds of all pieces covering each open interval of each target edge.
pub fn sweep(psi: &PlMap) -> Vec<(usize, Q, Q, Vec<Q>)> {
    let mut by_edge: HashMap<usize, Vec<(Q, Q, Q)>> = HashMap::new();
    for ps in &psi.pieces {
        for p in ps {
            if let Image::Segment { edge, from, to } = &p.image {
                let (lo, hi) = if from < to { (from.clone(), to.clone()) } else { (to.clone(), from.clone()) };
                by_edge.entry(*edge).or_default().push((lo, hi, p.speed()));
            }
        }
    }
    let mut out = Vec::new();
    let mut edges: Vec<usize> = by_edge.keys().copied().collect();
    edges.sort_unstable();
    for e in edges {
        let segs = &by_edge[&e];
        let mut cuts: Vec<Q> = segs.iter().flat_map(|(l, h, _)| [l.clone(), h.clone()]).collect();
        cuts.sort();
        cuts.dedup();
        for w in cuts.windows(2) {
            let speeds: Vec<Q> =
                segs.iter().filter(|(l, h, _)| l <= &w[0] && &w[1] <= h).map(|(_, _, s)| s.clone()).collect();
            if !speeds.is_empty() {
                out.push((e, w[0].clone(), w[1].clone(), speeds));
            }
        }
    }
    out
}

fn density(kind: EnergyKind, speeds: &[Q]) -> Value {
    match kind {
        EnergyKind::Emb => Value::Exact(speeds.iter().sum()),
        EnergyKind::Lip | EnergyKind::Epp(Exponent::Infinity) => {
            Value::Exact(speeds.iter().max().cloned().unwrap_or_else(Q::zero))
        }
        EnergyKind::Epp(Exponent::One) => Value::Exact(Q::from_integer(speeds.len().into())),
        EnergyKind::Epp(Exponent::Finite(p)) => {
            let s: f64 = speeds.iter().map(|x| x.to_f64().unwrap_or(0.0).powf(p - 1.0)).sum();
            Value::Approx(s.powf(1.0 / p))
        }
    }
}

fn max_value(vals: impl Iterator<Item = Value>) -> Value {
    let mut best: Option<Value> = None;
    for v in vals {
        best = Some(match (best, v) {
            (None, v) => v,
            (Some(Value::Exact(a)), Value::Exact(b)) => Value::Exact(a.max(b)),
            (Some(a), b) => Value::Approx(a.to_f64().max(b.to_f64())),
        });
    }
    best.unwrap_or(Value::Exact(Q::zero()))
}

/// Essential supremum of the chosen density over target points.
pub fn evaluate(psi: &PlMap, kind: EnergyKind) -> EnergyReport {
    let profile: Vec<(usize, Q, Q, Value)> =
        sweep(psi).into_iter().map(|(e, lo, hi, s)| (e, lo, hi, density(kind, &s))).collect();
    let value = match kind {
        // Lipschitz constant is a sup over the source, including collapsed pieces
        EnergyKind::Lip => Value::Exact(psi.pieces.iter().flatten().map(Piece::speed).max().unwrap_or_else(Q::zero)),
        _ => max_value(profile.iter().map(|p| p.3.clone())),
    };
    EnergyReport { kind, value, profile }
}

pub fn emb_evaluate(psi: &PlMap) -> EnergyReport {
    evaluate(psi, EnergyKind::Emb)
}

pub fn emb(psi: &PlMap) -> Q {
    match emb_evaluate(psi).value {
        Value::Exact(q) => q,
        Value::Approx(_) => unreachable!("embedding energy is rational"),
    }
}

pub fn epp_evaluate(psi: &PlMap, p: Exponent) -> EnergyReport {
    evaluate(psi, EnergyKind::Epp(p))
}

/// `‖ψ′‖_p` over the source, treating the target as a length graph.
pub fn epinf_evaluate(psi: &PlMap, p: Exponent) -> Value {
    let pieces = psi.pieces.iter().flatten();
    match p {
        Exponent::Infinity => Value::Exact(pieces.map(Piece::speed).max().unwrap_or_else(Q::zero)),
        Exponent::One => Value::Exact(pieces.map(|pc| pc.speed() * &pc.len).sum()),
        Exponent::Finite(p) => {
            let s: f64 = pieces.map(|pc| pc.len.to_f64().unwrap_or(0.0) * pc.speed().to_f64().unwrap_or(0.0).powf(p)).sum();
            Value::Approx(s.powf(1.0 / p))
        }
    }
}

/// `outer ∘ inner` without tightening.
pub fn compose(outer: &PlMap, inner: &PlMap) -> Result<PlMap, PlError> {
    if inner.target.as_ref() != outer.source.as_ref() || inner.alpha_t != outer.alpha_s {
        return Err(PlError::NotComposable);
    }
    let mut pieces = Vec::new();
    for ps in &inner.pieces {
        let mut out = Vec::new();
        for p in ps {
            match &p.image {
                Image::Point(x) => out.push(Piece { len: p.len.clone(), image: Image::Point(outer.eval(x)) }),
                Image::Segment { edge, from, to } => {
                    let forward = from < to;
                    let (lo, hi) = if forward { (from, to) } else { (to, from) };
                    let span = hi - lo;
                    // outer pieces of this edge that meet (lo, hi)
                    let mut subs = Vec::new();
                    let mut start = Q::zero();
                    for q in &outer.pieces[*edge] {
                        let end = &start + &q.len;
                        let a = if &start > lo { start.clone() } else { lo.clone() };
                        let b = if &end < hi { end.clone() } else { hi.clone() };
                        if a < b {
                            let image = match &q.image {
                                Image::Point(x) => Image::Point(x.clone()),
                                Image::Segment { edge: f, from: qf, to: qt } => {
                                    let at = |x: &Q| qf + (qt - qf) * (x - &start) / &q.len;
                                    let (u, w) = if forward { (at(&a), at(&b)) } else { (at(&b), at(&a)) };
                                    Image::Segment { edge: *f, from: u, to: w }
                                }
                            };
                            subs.push(Piece { len: &p.len * (&b - &a) / &span, image });
                        }
                        start = end;
                    }
                    if !forward {
                        subs.reverse();
                    }
                    out.extend(subs);
                }
            }
        }
        pieces.push(out);
    }
    let vertex_image = inner.vertex_image.iter().map(|x| outer.eval(x)).collect();
    Ok(PlMap {
        source: inner.source.clone(),
        target: outer.target.clone(),
        alpha_s: inner.alpha_s.clone(),
        alpha_t: outer.alpha_t.clone(),
        vertex_image,
        pieces,
    })
}

/// Edge of the cover leaving (or entering) `v` over `e`.
fn lift_dart_at(cover: &Covering, v: usize, e: usize, at_tail: bool) -> usize {
    cover.lift_dart(v, Dart::new(e, at_tail)).edge()
}

/// Lift of `psi` through a covering of its target: returns the lifted map
/// on the pulled-back source and the covering of the source.
pub fn lift(psi: &PlMap, cover: &Covering) -> Result<(PlMap, Covering), PlError> {
    let t = &psi.target;
    let up = cover.source();
    let alpha_up = crate::maps::pull_lengths(cover, &psi.alpha_t);
    let norm_down = |p: Point| p.normalize(t, &psi.alpha_t);
    let norm_up = |p: Point| p.normalize(up, &alpha_up);
    // points over a point of the target
    let fiber_of = |p: &Point| -> Vec<Point> {
        match norm_down(p.clone()) {
            Point::Vertex(x) => cover.fiber(x).iter().map(|&v| Point::Vertex(v)).collect(),
            Point::OnEdge(e, s) => {
                let tail = t.ends(e)[0];
                cover
                    .fiber(tail)
                    .iter()
                    .map(|&v| Point::OnEdge(lift_dart_at(cover, v, e, true), s.clone()))
                    .collect()
            }
        }
    };
    // a lifted point moved along a piece
    let step = |at: &Point, img: &Image| -> (Image, Point) {
        match img {
            Image::Point(_) => (Image::Point(at.clone()), at.clone()),
            Image::Segment { edge, from, to } => {
                let lifted_edge = match at {
                    Point::OnEdge(le, _) => *le,
                    Point::Vertex(v) => {
                        let at_tail = from.is_zero();
                        let e = lift_dart_at(cover, *v, *edge, at_tail);
                        debug_assert!(at_tail || from == psi.alpha_t.alpha(*edge));
                        e
                    }
                };
                let end = norm_up(Point::OnEdge(lifted_edge, to.clone()));
                (Image::Segment { edge: lifted_edge, from: from.clone(), to: to.clone() }, end)
            }
        }
    };
    let s = &psi.source;
    let mut vnames = Vec::new();
    let mut vkey: HashMap<(usize, Point), usize> = HashMap::new();
    let mut vimage = Vec::new();
    let mut proj_v = Vec::new();
    for v in 0..s.vertex_count() {
        for (k, p) in fiber_of(&psi.vertex_image[v]).into_iter().enumerate() {
            let p = norm_up(p);
            vkey.insert((v, p.clone()), vnames.len());
            vnames.push(format!("{}.{k}", s.vertex_name(v)));
            vimage.push(p);
            proj_v.push(v);
        }
    }
    let mut edges = Vec::new();
    let mut pieces = Vec::new();
    let mut proj_e = Vec::new();
    let mut ends_at: HashMap<(usize, usize), usize> = HashMap::new();
    let mut starts_at: HashMap<(usize, usize), usize> = HashMap::new();
    for e in 0..s.edge_count() {
        let [a, b] = s.ends(e);
        let starts: Vec<usize> = (0..vnames.len()).filter(|&i| proj_v[i] == a).collect();
        for (k, &i) in starts.iter().enumerate() {
            let mut at = vimage[i].clone();
            let mut out = Vec::new();
            for p in &psi.pieces[e] {
                let (img, next) = step(&at, &p.image);
                out.push(Piece { len: p.len.clone(), image: img });
                at = next;
            }
            let j = *vkey.get(&(b, at)).ok_or_else(|| PlError::Discontinuous(s.edge_name(e).to_string()))?;
            ends_at.insert((e, j), edges.len());
            starts_at.insert((e, i), edges.len());
            edges.push((format!("{}.{k}", s.edge_name(e)), i, j));
            pieces.push(out);
            proj_e.push(vec![Dart::forward(e)]);
        }
    }
    let mut rotation = Vec::new();
    for i in 0..vnames.len() {
        let v = proj_v[i];
        let mut rot = Vec::new();
        for &d in s.rotation(v) {
            let le = if d.is_forward() { starts_at[&(d.edge(), i)] } else { ends_at[&(d.edge(), i)] };
            rot.push(Dart::new(le, d.is_forward()));
        }
        rotation.push(rot);
    }
    let src = Arc::new(RibbonGraph::new(format!("{}~", s.name()), vnames, edges, rotation).map_err(MapError::from)?);
    let proj = validate_covering(GraphMap::new(src.clone(), s.clone(), proj_v, proj_e)?)?;
    let alpha_src = crate::maps::pull_lengths(&proj, &psi.alpha_s);
    let lifted = PlMap {
        source: src,
        target: up.clone(),
        alpha_s: alpha_src,
        alpha_t: alpha_up,
        vertex_image: vimage,
        pieces,
    };
    Ok((lifted, proj))
}

/// The identity of an elastic graph.
pub fn identity(g: &Arc<RibbonGraph>, alpha: &Elastic) -> PlMap {
    PlMap::constant_speed(&GraphMap::identity(g.clone()), alpha, alpha)
}

/// Total source length mapped into the target with positive speed.
pub fn covered_length(psi: &PlMap) -> Q {
    psi.pieces.iter().flatten().filter(|p| !p.speed().is_zero()).map(|p| p.len.clone()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::tests::{loop_cover, rose};

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn identity_has_unit_energies() {
        let g = rose("r", 2);
        let alpha = Elastic::new(&g, vec![q(1, 1), q(3, 2)]).unwrap();
        let id = identity(&g, &alpha);
        id.validate().unwrap();
        assert_eq!(emb(&id), q(1, 1));
        assert_eq!(evaluate(&id, EnergyKind::Lip).value, Value::Exact(q(1, 1)));
        assert_eq!(epinf_evaluate(&id, Exponent::One), Value::Exact(q(5, 2)));
    }

    #[test]
    fn doubling_loop_has_energy_two_and_lifts_invariantly() {
        let cover = loop_cover(2);
        let g = cover.target().clone();
        let alpha = Elastic::uniform(&g);
        // a local isometry of degree 2 has two preimages of speed 1
        let up = cover.source().clone();
        let alpha_up = pull_lengths_for(&cover, &alpha);
        let psi = PlMap::constant_speed(cover.map(), &alpha_up, &alpha);
        psi.validate().unwrap();
        assert_eq!(emb(&psi), q(2, 1));
        let m = GraphMap::new(g.clone(), g.clone(), vec![0], vec![vec![Dart::forward(0), Dart::forward(0)]]).unwrap();
        let sq = PlMap::constant_speed(&m, &alpha, &alpha);
        assert_eq!(emb(&sq), q(4, 1));
        let (lifted, proj) = lift(&sq, &cover).unwrap();
        lifted.validate().unwrap();
        assert_eq!(proj.degree(), 2);
        assert_eq!(lifted.target.as_ref(), up.as_ref());
        assert_eq!(emb(&lifted), q(4, 1));
        let c = compose(&sq, &sq).unwrap();
        c.validate().unwrap();
        assert_eq!(emb(&c), q(16, 1));
        assert_eq!(evaluate(&c, EnergyKind::Lip).value, Value::Exact(q(4, 1)));
    }

    fn pull_lengths_for(c: &Covering, a: &Elastic) -> Elastic {
        crate::maps::pull_lengths(c, a)
    }

    #[test]
    fn eval_interpolates_and_rejects_gaps() {
        let g = rose("r", 1);
        let alpha = Elastic::uniform(&g);
        let m = GraphMap::new(g.clone(), g.clone(), vec![0], vec![vec![Dart::forward(0), Dart::forward(0)]]).unwrap();
        let mut psi = PlMap::constant_speed(&m, &alpha, &alpha);
        assert_eq!(psi.eval(&Point::OnEdge(0, q(1, 4))), Point::OnEdge(0, q(1, 2)));
        assert_eq!(psi.eval(&Point::OnEdge(0, q(1, 2))), Point::Vertex(0));
        psi.pieces[0][1].image = Image::Segment { edge: 0, from: q(1, 3), to: q(1, 1) };
        assert!(matches!(psi.validate(), Err(PlError::Discontinuous(_))));
    }
}
