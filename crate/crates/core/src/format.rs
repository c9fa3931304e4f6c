//! Line-oriented text format for graphs, maps, virtual endomorphisms,
//! curves and train tracks.
//!
//! ```text
//! [graph theta]
//! vertex s rotation: b c a
//! vertex t rotation: ~a ~c ~b
//! edge a s t length 1
//! edge b s t length 1
//! edge c s t length 3/2
//! face inf: b ~a
//!
//! [map phi from theta1 to theta]
//! vertex s0 -> s
//! edge a0 -> b
//! edge c0 -> .
//!
//! [vend theta theta0 theta1 pi phi]
//! tree c
//!
//! [curves theta]
//! curve ab: a ~b
//!
//! [traintrack theta]
//! gates s: {a} {b c}
//! weight a 2
//! ```
//!
//! `#` starts a comment. Stanzas may reference names defined later.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use num::{BigInt, One, Zero};
use thiserror::Error;

use crate::graph::{canonical_oriented, Dart, Elastic, GraphError, MultiCurve, RibbonGraph, Q};
use crate::maps::{GraphMap, MapError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

/// Parses `p/q`, an integer, or a finite decimal.
pub fn parse_rational(s: &str) -> Option<Q> {
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let whole = BigInt::from_str(if int.is_empty() || int == "-" { "0" } else { int }).ok()?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let f = BigInt::from_str(frac).ok()?;
        let num = whole * &scale + if neg { -f } else { f };
        return Some(Q::new(num, scale));
    }
    Q::from_str(s).ok()
}

pub fn format_rational(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// An elastic ribbon graph with optional face names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEntry {
    pub graph: Arc<RibbonGraph>,
    pub alpha: Elastic,
    pub faces: Vec<(String, Vec<Dart>)>,
}

impl GraphEntry {
    pub fn new(graph: RibbonGraph, alpha: Elastic) -> Self {
        GraphEntry { graph: Arc::new(graph), alpha, faces: Vec::new() }
    }

    /// Name of the face with boundary `w`, matched up to rotation.
    pub fn face_name(&self, w: &[Dart]) -> Option<&str> {
        let key = canonical_oriented(w);
        self.faces.iter().find(|(_, f)| canonical_oriented(f) == key).map(|(n, _)| n.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct MapEntry {
    pub name: String,
    pub from: String,
    pub to: String,
    pub map: GraphMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VendEntry {
    pub name: String,
    pub gamma0: String,
    pub gamma1: String,
    pub pi: String,
    pub phi: String,
    /// Spanning tree of `gamma0` used for automata.
    pub tree: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveEntry {
    pub name: String,
    pub graph: String,
    pub curve: MultiCurve,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackEntry {
    pub graph: String,
    /// Per vertex, its gates as lists of outgoing darts.
    pub gates: Vec<Vec<Vec<Dart>>>,
    pub weights: Vec<Q>,
}

/// Everything parsed from one or more input files.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub graphs: Vec<(String, GraphEntry)>,
    pub maps: Vec<MapEntry>,
    pub vends: Vec<VendEntry>,
    pub curves: Vec<CurveEntry>,
    pub tracks: Vec<TrackEntry>,
}

impl Workspace {
    pub fn graph(&self, name: &str) -> Option<&GraphEntry> {
        self.graphs.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    pub fn map(&self, name: &str) -> Option<&MapEntry> {
        self.maps.iter().find(|m| m.name == name)
    }

    pub fn vend(&self, name: &str) -> Option<&VendEntry> {
        self.vends.iter().find(|v| v.name == name)
    }

    pub fn curve(&self, name: &str) -> Option<&CurveEntry> {
        self.curves.iter().find(|c| c.name == name)
    }

    /// Parses text and merges it in; names must stay unique.
    pub fn load(&mut self, text: &str) -> Result<(), ParseError> {
        let stanzas = split_stanzas(text)?;
        let mut pending_maps = Vec::new();
        let mut pending_curves = Vec::new();
        let mut pending_tracks = Vec::new();
        for st in stanzas {
            match st.kind.as_str() {
                "graph" => {
                    let [name] = header_args::<1>(&st)?;
                    if self.graph(&name).is_some() {
                        return err(st.line, format!("duplicate graph `{name}`"));
                    }
                    let g = build_graph(&name, &st)?;
                    self.graphs.push((name, g));
                }
                "map" => pending_maps.push(st),
                "vend" => {
                    let [name, g0, g1, pi, phi] = header_args::<5>(&st)?;
                    if self.vend(&name).is_some() {
                        return err(st.line, format!("duplicate vend `{name}`"));
                    }
                    let mut tree = None;
                    for (ln, body) in &st.body {
                        match body.split_once(char::is_whitespace) {
                            Some(("tree", rest)) => tree = Some(rest.split_whitespace().map(String::from).collect()),
                            _ if body == "tree" => tree = Some(Vec::new()),
                            _ => return err(*ln, format!("unexpected line in vend stanza: `{body}`")),
                        }
                    }
                    self.vends.push(VendEntry { name, gamma0: g0, gamma1: g1, pi, phi, tree });
                }
                "curves" => pending_curves.push(st),
                "traintrack" => pending_tracks.push(st),
                other => return err(st.line, format!("unknown stanza `{other}`")),
            }
        }
        for st in pending_maps {
            let m = build_map(self, &st)?;
            if self.map(&m.name).is_some() {
                return err(st.line, format!("duplicate map `{}`", m.name));
            }
            self.maps.push(m);
        }
        for st in pending_curves {
            let [gname] = header_args::<1>(&st)?;
            let g = self.graph(&gname).ok_or(ParseError { line: st.line, message: format!("unknown graph `{gname}`") })?;
            let mut new = Vec::new();
            for (ln, body) in &st.body {
                let rest = body.strip_prefix("curve ").ok_or(ParseError {
                    line: *ln,
                    message: format!("expected `curve NAME: ...`, got `{body}`"),
                })?;
                let (name, words) = rest.split_once(':').ok_or(ParseError { line: *ln, message: "missing `:`".into() })?;
                let curve = MultiCurve::parse(&g.graph, words).map_err(|e| ParseError { line: *ln, message: e.to_string() })?;
                new.push(CurveEntry { name: name.trim().to_string(), graph: gname.clone(), curve });
            }
            for c in new {
                if self.curve(&c.name).is_some() {
                    return err(st.line, format!("duplicate curve `{}`", c.name));
                }
                self.curves.push(c);
            }
        }
        for st in pending_tracks {
            let t = build_track(self, &st)?;
            self.tracks.push(t);
        }
        for v in &self.vends {
            for (what, n) in [("graph", &v.gamma0), ("graph", &v.gamma1)] {
                if self.graph(n).is_none() {
                    return err(0, format!("vend `{}` references unknown {what} `{n}`", v.name));
                }
            }
            for n in [&v.pi, &v.phi] {
                if self.map(n).is_none() {
                    return err(0, format!("vend `{}` references unknown map `{n}`", v.name));
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Workspace, ParseError> {
        let mut ws = Workspace::default();
        ws.load(text)?;
        Ok(ws)
    }

    /// Canonical text; parsing it yields an equal workspace.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, g) in &self.graphs {
            out.push_str(&write_graph(name, g));
            out.push('\n');
        }
        for m in &self.maps {
            out.push_str(&write_map(m));
            out.push('\n');
        }
        for v in &self.vends {
            let _ = writeln!(out, "[vend {} {} {} {} {}]", v.name, v.gamma0, v.gamma1, v.pi, v.phi);
            if let Some(t) = &v.tree {
                let _ = writeln!(out, "tree {}", t.join(" "));
            }
            out.push('\n');
        }
        let mut graphs_with_curves: Vec<&str> = self.curves.iter().map(|c| c.graph.as_str()).collect();
        graphs_with_curves.dedup();
        for gname in graphs_with_curves {
            let g = &self.graph(gname).expect("resolved").graph;
            let _ = writeln!(out, "[curves {gname}]");
            for c in self.curves.iter().filter(|c| c.graph == gname) {
                let _ = writeln!(out, "curve {}: {}", c.name, c.curve.display(g));
            }
            out.push('\n');
        }
        for t in &self.tracks {
            let g = &self.graph(&t.graph).expect("resolved").graph;
            let _ = writeln!(out, "[traintrack {}]", t.graph);
            for (v, gates) in t.gates.iter().enumerate() {
                let parts: Vec<String> = gates.iter().map(|gate| format!("{{{}}}", g.word_name(gate))).collect();
                let _ = writeln!(out, "gates {}: {}", g.vertex_name(v), parts.join(" "));
            }
            for (e, w) in t.weights.iter().enumerate() {
                if !w.is_zero() {
                    let _ = writeln!(out, "weight {} {}", g.edge_name(e), format_rational(w));
                }
            }
            out.push('\n');
        }
        out.trim_end().to_string() + "\n"
    }
}

pub fn write_graph(name: &str, g: &GraphEntry) -> String {
    let gr = &g.graph;
    let mut out = format!("[graph {name}]\n");
    for v in 0..gr.vertex_count() {
        let _ = writeln!(out, "vertex {} rotation: {}", gr.vertex_name(v), gr.word_name(gr.rotation(v)));
    }
    for e in 0..gr.edge_count() {
        let [t, h] = gr.ends(e);
        let _ = writeln!(
            out,
            "edge {} {} {} length {}",
            gr.edge_name(e),
            gr.vertex_name(t),
            gr.vertex_name(h),
            format_rational(g.alpha.alpha(e))
        );
    }
    for (n, w) in &g.faces {
        let _ = writeln!(out, "face {}: {}", n, gr.word_name(w));
    }
    out
}

pub fn write_map(m: &MapEntry) -> String {
    let map = &m.map;
    let (s, t) = (map.source(), map.target());
    let mut out = format!("[map {} from {} to {}]\n", m.name, m.from, m.to);
    for v in 0..s.vertex_count() {
        let _ = writeln!(out, "vertex {} -> {}", s.vertex_name(v), t.vertex_name(map.vertex_image(v)));
    }
    for e in 0..s.edge_count() {
        let _ = writeln!(out, "edge {} -> {}", s.edge_name(e), t.word_name(map.edge_image(e)));
    }
    out
}

struct Stanza {
    line: usize,
    kind: String,
    args: Vec<String>,
    body: Vec<(usize, String)>,
}

fn split_stanzas(text: &str) -> Result<Vec<Stanza>, ParseError> {
    let mut out: Vec<Stanza> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('[') {
            let h = h.strip_suffix(']').ok_or(ParseError { line: ln, message: "unterminated header".into() })?;
            let mut words = h.split_whitespace().map(String::from);
            let kind = words.next().ok_or(ParseError { line: ln, message: "empty header".into() })?;
            out.push(Stanza { line: ln, kind, args: words.collect(), body: Vec::new() });
        } else {
            match out.last_mut() {
                Some(st) => st.body.push((ln, line.to_string())),
                None => return err(ln, "content before first stanza header"),
            }
        }
    }
    Ok(out)
}

fn header_args<const N: usize>(st: &Stanza) -> Result<[String; N], ParseError> {
    st.args.clone().try_into().map_err(|_| ParseError {
        line: st.line,
        message: format!("`[{}]` header expects {} names", st.kind, N),
    })
}

fn graph_err(line: usize) -> impl Fn(GraphError) -> ParseError {
    move |e| ParseError { line, message: e.to_string() }
}

fn build_graph(name: &str, st: &Stanza) -> Result<GraphEntry, ParseError> {
    let mut vnames = Vec::new();
    let mut rot_text = Vec::new();
    let mut edges = Vec::new();
    let mut lengths = Vec::new();
    let mut face_text = Vec::new();
    for (ln, body) in &st.body {
        let words: Vec<&str> = body.split_whitespace().collect();
        match words[0] {
            "vertex" => {
                if words.len() < 3 || words[2] != "rotation:" {
                    return err(*ln, "expected `vertex ID rotation: h1 h2 ...`");
                }
                vnames.push(words[1].to_string());
                rot_text.push((*ln, words[3..].join(" ")));
            }
            "edge" => {
                let len = match words.len() {
                    4 => Q::one(),
                    6 if words[4] == "length" => parse_rational(words[5])
                        .ok_or(ParseError { line: *ln, message: format!("bad length `{}`", words[5]) })?,
                    _ => return err(*ln, "expected `edge ID V1 V2 length L`"),
                };
                edges.push((*ln, words[1].to_string(), words[2].to_string(), words[3].to_string()));
                lengths.push(len);
            }
            "face" => {
                let (n, w) = body["face".len()..]
                    .split_once(':')
                    .ok_or(ParseError { line: *ln, message: "expected `face NAME: darts`".into() })?;
                face_text.push((*ln, n.trim().to_string(), w.to_string()));
            }
            other => return err(*ln, format!("unexpected `{other}` in graph stanza")),
        }
    }
    let find_v = |ln: usize, v: &str| {
        vnames.iter().position(|x| x == v).ok_or(ParseError { line: ln, message: format!("unknown vertex `{v}`") })
    };
    let mut edge_list = Vec::new();
    for (ln, e, a, b) in &edges {
        edge_list.push((e.clone(), find_v(*ln, a)?, find_v(*ln, b)?));
    }
    // rotations reference edges by name, so resolve them against a bare graph first
    let lookup = |ln: usize, tok: &str| -> Result<Dart, ParseError> {
        let (fwd, nm) = match tok.strip_prefix('~') {
            Some(n) => (false, n),
            None => (true, tok),
        };
        let e = edges
            .iter()
            .position(|x| x.1 == nm)
            .ok_or(ParseError { line: ln, message: format!("unknown edge `{nm}`") })?;
        Ok(Dart::new(e, fwd))
    };
    let mut rotation = Vec::new();
    for (ln, text) in &rot_text {
        rotation.push(text.split_whitespace().map(|t| lookup(*ln, t)).collect::<Result<Vec<_>, _>>()?);
    }
    let g = RibbonGraph::new(name, vnames.clone(), edge_list, rotation).map_err(graph_err(st.line))?;
    let alpha = Elastic::new(&g, lengths).map_err(graph_err(st.line))?;
    let mut entry = GraphEntry::new(g, alpha);
    let faces: Vec<Vec<Dart>> = entry.graph.faces().iter().map(|f| canonical_oriented(f)).collect();
    for (ln, n, w) in face_text {
        let word = entry.graph.parse_word(&w).map_err(graph_err(ln))?;
        if !faces.contains(&canonical_oriented(&word)) {
            return err(ln, format!("`{}` is not a face boundary", w.trim()));
        }
        entry.faces.push((n, word));
    }
    Ok(entry)
}

fn build_map(ws: &Workspace, st: &Stanza) -> Result<MapEntry, ParseError> {
    let a = &st.args;
    if a.len() != 5 || a[1] != "from" || a[3] != "to" {
        return err(st.line, "expected `[map NAME from G1 to G2]`");
    }
    let unknown = |n: &str| ParseError { line: st.line, message: format!("unknown graph `{n}`") };
    let src = ws.graph(&a[2]).ok_or_else(|| unknown(&a[2]))?.graph.clone();
    let tgt = ws.graph(&a[4]).ok_or_else(|| unknown(&a[4]))?.graph.clone();
    let mut vmap = vec![None; src.vertex_count()];
    let mut emap = vec![None; src.edge_count()];
    for (ln, body) in &st.body {
        let (lhs, rhs) = body.split_once("->").ok_or(ParseError { line: *ln, message: "missing `->`".into() })?;
        let lhs: Vec<&str> = lhs.split_whitespace().collect();
        if lhs.len() != 2 {
            return err(*ln, "expected `vertex v -> w` or `edge e -> path`");
        }
        match lhs[0] {
            "vertex" => {
                let v = src.find_vertex(lhs[1]).ok_or(ParseError { line: *ln, message: format!("unknown vertex `{}`", lhs[1]) })?;
                let w = tgt.find_vertex(rhs.trim()).ok_or(ParseError {
                    line: *ln,
                    message: format!("unknown vertex `{}`", rhs.trim()),
                })?;
                vmap[v] = Some(w);
            }
            "edge" => {
                let e = src.find_edge(lhs[1]).ok_or(ParseError { line: *ln, message: format!("unknown edge `{}`", lhs[1]) })?;
                let rhs = rhs.trim();
                let path = if rhs == "." { Vec::new() } else { tgt.parse_word(rhs).map_err(graph_err(*ln))? };
                emap[e] = Some(path);
            }
            other => return err(*ln, format!("unexpected `{other}` in map stanza")),
        }
    }
    let vmap: Vec<usize> = vmap
        .into_iter()
        .enumerate()
        .map(|(v, w)| w.ok_or(ParseError { line: st.line, message: format!("vertex `{}` has no image", src.vertex_name(v)) }))
        .collect::<Result<_, _>>()?;
    let emap: Vec<Vec<Dart>> = emap
        .into_iter()
        .enumerate()
        .map(|(e, p)| p.ok_or(ParseError { line: st.line, message: format!("edge `{}` has no image", src.edge_name(e)) }))
        .collect::<Result<_, _>>()?;
    let map = GraphMap::new(src, tgt, vmap, emap).map_err(|e: MapError| ParseError { line: st.line, message: e.to_string() })?;
    Ok(MapEntry { name: a[0].clone(), from: a[2].clone(), to: a[4].clone(), map })
}

fn build_track(ws: &Workspace, st: &Stanza) -> Result<TrackEntry, ParseError> {
    let [gname] = header_args::<1>(st)?;
    let g = &ws.graph(&gname).ok_or(ParseError { line: st.line, message: format!("unknown graph `{gname}`") })?.graph;
    let mut gates = vec![Vec::new(); g.vertex_count()];
    let mut weights = vec![Q::zero(); g.edge_count()];
    for (ln, body) in &st.body {
        if let Some(rest) = body.strip_prefix("gates ") {
            let (v, classes) = rest.split_once(':').ok_or(ParseError { line: *ln, message: "missing `:`".into() })?;
            let v = g.find_vertex(v.trim()).ok_or(ParseError { line: *ln, message: format!("unknown vertex `{}`", v.trim()) })?;
            let mut list = Vec::new();
            for part in classes.split('}') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let inner = part.strip_prefix('{').ok_or(ParseError { line: *ln, message: "expected `{`".into() })?;
                list.push(g.parse_word(inner).map_err(graph_err(*ln))?);
            }
            gates[v] = list;
        } else if let Some(rest) = body.strip_prefix("weight ") {
            let w: Vec<&str> = rest.split_whitespace().collect();
            if w.len() != 2 {
                return err(*ln, "expected `weight EDGE W`");
            }
            let e = g.find_edge(w[0]).ok_or(ParseError { line: *ln, message: format!("unknown edge `{}`", w[0]) })?;
            weights[e] = parse_rational(w[1]).ok_or(ParseError { line: *ln, message: format!("bad weight `{}`", w[1]) })?;
        } else {
            return err(*ln, format!("unexpected line in traintrack stanza: `{body}`"));
        }
    }
    Ok(TrackEntry { graph: gname, gates, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: &str = "\
[graph theta]
vertex s rotation: b c a
vertex t rotation: ~a ~c ~b
edge a s t length 1
edge b s t length 1
edge c s t length 3/2   # longer middle edge
face inf: b ~a

[curves theta]
curve ab: a ~b
";

    #[test]
    fn parses_and_round_trips() {
        let ws = Workspace::parse(THETA).unwrap();
        let g = ws.graph("theta").unwrap();
        assert_eq!(g.graph.faces().len(), 3);
        assert_eq!(g.alpha.alpha(2), &Q::new(3.into(), 2.into()));
        assert_eq!(g.face_name(&g.graph.parse_word("~a b").unwrap()), Some("inf"));
        let text = ws.to_text();
        let again = Workspace::parse(&text).unwrap();
        assert_eq!(again.to_text(), text);
        assert_eq!(again.curve("ab").unwrap().curve, ws.curve("ab").unwrap().curve);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "[graph g]\nvertex o rotation: a ~a\nedge a o p length 1\n";
        let e = Workspace::parse(bad).unwrap_err();
        assert_eq!(e.line, 3);
        let e = Workspace::parse("vertex o rotation:\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = Workspace::parse("[graph g]\nvertex o rotation: a ~a\nedge a o o length -1\n").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn maps_resolve_forward_references() {
        let text = "\
[map f from g to g]
vertex o -> o
edge a -> a a

[graph g]
vertex o rotation: a ~a
edge a o o
";
        let ws = Workspace::parse(text).unwrap();
        assert_eq!(ws.map("f").unwrap().map.edge_image(0).len(), 2);
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("0.25"), Some(Q::new(1.into(), 4.into())));
        assert_eq!(parse_rational("-1.5"), Some(Q::new((-3).into(), 2.into())));
        assert_eq!(parse_rational("7"), Some(Q::from_integer(7.into())));
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&Q::new(6.into(), 4.into())), "3/2");
    }
}
