//! Heuristic upper bounds for the embedding energy of a homotopy class.
//!
//! Vertex images live on a grid that cuts each target edge into `k` equal
//! segments. For fixed vertex images the edge images are taut grid paths, and
//! the best reparametrization is read off the top eigenvector of
//! `B = Σ_e α_e⁻¹ v_e v_eᵀ` with `v_e[σ] = √ℓ_σ · #(e over σ)`: giving each
//! traversal of σ a source length proportional to `u_σ √ℓ_σ`, `u` the vector,
//! makes the preimage sum equal to `λ_max(B)` on every covered segment.

use num::{BigInt, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Dart, Elastic, RibbonGraph, Q};
use crate::maps::GraphMap;
use crate::pl::{emb_evaluate, EnergyReport, Image, Piece, PlMap, Point};

/// Traversal of segment `k` of `edge`, forward or backward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridStep {
    pub edge: u32,
    pub k: u32,
    pub forward: bool,
}

impl GridStep {
    pub fn inv(self) -> Self {
        GridStep { forward: !self.forward, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum GridPoint {
    Vertex(usize),
    Interior(usize, usize),
}

struct Grid<'a> {
    g: &'a RibbonGraph,
    k: usize,
}

impl Grid<'_> {
    fn start(&self, s: GridStep) -> GridPoint {
        let (e, k) = (s.edge as usize, s.k as usize);
        match (s.forward, k) {
            (true, 0) => GridPoint::Vertex(self.g.ends(e)[0]),
            (true, _) => GridPoint::Interior(e, k),
            (false, _) if k + 1 == self.k => GridPoint::Vertex(self.g.ends(e)[1]),
            (false, _) => GridPoint::Interior(e, k + 1),
        }
    }

    fn end(&self, s: GridStep) -> GridPoint {
        self.start(s.inv())
    }

    fn moves(&self, p: GridPoint) -> Vec<GridStep> {
        let last = (self.k - 1) as u32;
        match p {
            GridPoint::Vertex(v) => self
                .g
                .rotation(v)
                .iter()
                .map(|d| GridStep { edge: d.edge() as u32, k: if d.is_forward() { 0 } else { last }, forward: d.is_forward() })
                .collect(),
            GridPoint::Interior(e, k) => vec![
                GridStep { edge: e as u32, k: k as u32, forward: true },
                GridStep { edge: e as u32, k: k as u32 - 1, forward: false },
            ],
        }
    }

    fn expand(&self, d: Dart, out: &mut Vec<GridStep>) {
        let e = d.edge() as u32;
        if d.is_forward() {
            out.extend((0..self.k as u32).map(|k| GridStep { edge: e, k, forward: true }));
        } else {
            out.extend((0..self.k as u32).rev().map(|k| GridStep { edge: e, k, forward: false }));
        }
    }

    fn segment(&self, s: GridStep) -> usize {
        s.edge as usize * self.k + s.k as usize
    }

    fn to_point(&self, p: GridPoint, alpha: &Elastic) -> Point {
        match p {
            GridPoint::Vertex(v) => Point::Vertex(v),
            GridPoint::Interior(e, k) => Point::OnEdge(e, alpha.alpha(e) * Q::new(k.into(), self.k.into())),
        }
    }
}

fn push_reduced(path: &mut Vec<GridStep>, s: GridStep) {
    if path.last() == Some(&s.inv()) {
        path.pop();
    } else {
        path.push(s);
    }
}

fn refine(path: &[GridStep]) -> Vec<GridStep> {
    path.iter()
        .flat_map(|s| {
            let (a, b) = (GridStep { k: 2 * s.k, ..*s }, GridStep { k: 2 * s.k + 1, ..*s });
            if s.forward {
                [a, b]
            } else {
                [b, a]
            }
        })
        .collect()
}

/// Limits for [`emb_minimize`].
#[derive(Clone, Debug)]
pub struct MinimizeBudget {
    pub restarts: usize,
    /// Finest grid is `2^levels` segments per target edge.
    pub levels: u32,
    /// Cap on eigenvalue evaluations per restart.
    pub max_evaluations: u64,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for MinimizeBudget {
    fn default() -> Self {
        MinimizeBudget { restarts: 50, levels: 5, max_evaluations: 200_000, seed: 0, jobs: 1 }
    }
}

/// Best map found with its exact energy and the vertex tracks that certify
/// its homotopy class.
#[derive(Clone, Debug)]
pub struct Minimized {
    pub map: PlMap,
    pub report: EnergyReport,
    pub value: Q,
    /// Segments per target edge in the grid the tracks live on.
    pub grid: usize,
    /// Grid path from `φ(v)` to the image of `v`.
    pub tracks: Vec<Vec<GridStep>>,
    pub evaluations: u64,
    pub exhausted: bool,
}

struct Problem<'a> {
    phi: &'a GraphMap,
    alpha_s: &'a Elastic,
    alpha_t: &'a Elastic,
    inv_alpha: Vec<f64>,
    incident: Vec<Vec<usize>>,
}

struct State<'a> {
    grid: Grid<'a>,
    tracks: Vec<Vec<GridStep>>,
    paths: Vec<Vec<GridStep>>,
    sqrt_len: Vec<f64>,
    x: Vec<f64>,
    lambda: f64,
    evaluations: u64,
}

impl<'a> Problem<'a> {
    fn path(&self, grid: &Grid, tracks: &[Vec<GridStep>], e: usize) -> Vec<GridStep> {
        let s = self.phi.source();
        let [a, b] = s.ends(e);
        let mut full = Vec::new();
        for &st in tracks[a].iter().rev() {
            push_reduced(&mut full, st.inv());
        }
        let mut img = Vec::new();
        for &d in self.phi.edge_image(e) {
            grid.expand(d, &mut img);
        }
        for st in img.into_iter().chain(tracks[b].iter().copied()) {
            push_reduced(&mut full, st);
        }
        full
    }

    fn state(&self, k: usize, tracks: Vec<Vec<GridStep>>) -> State<'a> {
        let target: &'a RibbonGraph = self.phi.target();
        let grid = Grid { g: target, k };
        let paths = (0..self.phi.source().edge_count()).map(|e| self.path(&grid, &tracks, e)).collect();
        let sqrt_len = (0..target.edge_count() * k)
            .map(|s| (self.alpha_t.alpha(s / k).to_f64().unwrap_or(1.0) / k as f64).sqrt())
            .collect();
        let mut st = State { grid, tracks, paths, sqrt_len, x: vec![1.0; target.edge_count() * k], lambda: 0.0, evaluations: 0 };
        st.lambda = self.lambda(&mut st, None);
        st
    }

    /// Top eigenvalue of `B`, warm-started from the stored vector.
    fn lambda(&self, st: &mut State, paths: Option<&[Vec<GridStep>]>) -> f64 {
        st.evaluations += 1;
        let paths = paths.unwrap_or(&st.paths);
        let vecs: Vec<Vec<(usize, f64)>> = paths
            .iter()
            .map(|p| {
                let mut idx: Vec<usize> = p.iter().map(|&s| st.grid.segment(s)).collect();
                idx.sort_unstable();
                let mut out: Vec<(usize, f64)> = Vec::new();
                for i in idx {
                    match out.last_mut() {
                        Some((j, c)) if *j == i => *c += st.sqrt_len[i],
                        _ => out.push((i, st.sqrt_len[i])),
                    }
                }
                out
            })
            .collect();
        let n = st.x.len();
        let mut x: Vec<f64> = st.x.iter().map(|v| v.abs() + 1e-3).collect();
        let mut lam = 0.0;
        for _ in 0..2000 {
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= norm);
            let mut y = vec![0.0; n];
            for (e, v) in vecs.iter().enumerate() {
                let dot: f64 = v.iter().map(|&(i, c)| c * x[i]).sum::<f64>() * self.inv_alpha[e];
                for &(i, c) in v {
                    y[i] += dot * c;
                }
            }
            let next: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
            x = y;
            if (next - lam).abs() <= 1e-13 * next.max(1.0) {
                lam = next;
                break;
            }
            lam = next;
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        st.x = x.into_iter().map(|v| v / norm).collect();
        lam
    }

    /// One sweep of moves over all vertices; returns whether anything improved.
    fn descend(&self, st: &mut State, max_eval: u64) -> bool {
        let mut improved_any = false;
        loop {
            let mut improved = false;
            for v in 0..self.phi.source().vertex_count() {
                if st.evaluations >= max_eval {
                    return improved_any;
                }
                let here = self.track_end(st, v);
                let mut best: Option<(f64, GridStep, Vec<Vec<GridStep>>, Vec<f64>)> = None;
                let saved_x = st.x.clone();
                for m in st.grid.moves(here) {
                    let mut tracks = st.tracks.clone();
                    push_reduced(&mut tracks[v], m);
                    let mut paths = st.paths.clone();
                    for &e in &self.incident[v] {
                        paths[e] = self.path(&st.grid, &tracks, e);
                    }
                    st.x = saved_x.clone();
                    let lam = self.lambda(st, Some(&paths));
                    let bar = best.as_ref().map_or(st.lambda, |b| b.0);
                    if lam < bar * (1.0 - 1e-10) {
                        best = Some((lam, m, paths, st.x.clone()));
                    }
                }
                st.x = saved_x;
                if let Some((lam, m, paths, x)) = best {
                    push_reduced(&mut st.tracks[v], m);
                    st.paths = paths;
                    st.lambda = lam;
                    st.x = x;
                    improved = true;
                    improved_any = true;
                }
            }
            if !improved {
                return improved_any;
            }
        }
    }

    fn track_end(&self, st: &State, v: usize) -> GridPoint {
        match st.tracks[v].last() {
            Some(&s) => st.grid.end(s),
            None => GridPoint::Vertex(self.phi.vertex_image(v)),
        }
    }

    /// Coarse-to-fine descent from the given coarse tracks.
    fn run(&self, tracks: Vec<Vec<GridStep>>, budget: &MinimizeBudget) -> (State<'a>, bool) {
        let mut st = self.state(1, tracks);
        let mut exhausted = false;
        let mut used = 0;
        for level in 0..=budget.levels {
            if level > 0 {
                let tracks = st.tracks.iter().map(|t| refine(t)).collect();
                used += st.evaluations;
                st = self.state(st.grid.k * 2, tracks);
            }
            self.descend(&mut st, budget.max_evaluations.saturating_sub(used));
            if used + st.evaluations >= budget.max_evaluations {
                exhausted = true;
                break;
            }
        }
        st.evaluations += used;
        (st, exhausted)
    }

    fn build(&self, st: &State) -> PlMap {
        let k = st.grid.k;
        let s = self.phi.source();
        let y = self.weights(st);
        let mut pieces = Vec::new();
        for e in 0..s.edge_count() {
            let path = &st.paths[e];
            if path.is_empty() {
                let p = st.grid.to_point(self.track_end(st, s.ends(e)[0]), self.alpha_t);
                pieces.push(vec![Piece { len: self.alpha_s.alpha(e).clone(), image: Image::Point(p) }]);
                continue;
            }
            let raw: Vec<Q> = path.iter().map(|&g| to_rational(y[st.grid.segment(g)])).collect();
            let total: Q = raw.iter().sum();
            let mut out = Vec::new();
            for (g, r) in path.iter().zip(raw) {
                let e_t = g.edge as usize;
                let seg = self.alpha_t.alpha(e_t) / Q::from_integer(BigInt::from(k));
                let a = &seg * Q::from_integer(BigInt::from(g.k));
                let b = &a + &seg;
                let (from, to) = if g.forward { (a, b) } else { (b, a) };
                out.push(Piece { len: self.alpha_s.alpha(e) * r / &total, image: Image::Segment { edge: e_t, from, to } });
            }
            pieces.push(out);
        }
        PlMap {
            source: s.clone(),
            target: self.phi.target().clone(),
            alpha_s: self.alpha_s.clone(),
            alpha_t: self.alpha_t.clone(),
            vertex_image: (0..s.vertex_count()).map(|v| st.grid.to_point(self.track_end(st, v), self.alpha_t)).collect(),
            pieces,
        }
    }

    /// Source length weight per segment, `y_σ ℓ_σ ∝ u_σ √ℓ_σ`, floored to
    /// stay positive on segments the eigenvector misses.
    fn weights(&self, st: &State) -> Vec<f64> {
        let w: Vec<f64> = st.x.iter().zip(&st.sqrt_len).map(|(x, l)| x.abs() * l).collect();
        let top = w.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        w.into_iter().map(|v| v.max(top * 1e-6)).collect()
    }
}

fn to_rational(x: f64) -> Q {
    const SCALE: i64 = 1 << 30;
    let n = (x * SCALE as f64).round().max(1.0) as i64;
    Q::new(n.into(), SCALE.into())
}

fn random_tracks(p: &Problem, rng: &mut ChaCha8Rng) -> Vec<Vec<GridStep>> {
    let grid = Grid { g: p.phi.target(), k: 1 };
    (0..p.phi.source().vertex_count())
        .map(|v| {
            let mut t = Vec::new();
            let steps = rng.gen_range(0..=2);
            let mut at = GridPoint::Vertex(p.phi.vertex_image(v));
            for _ in 0..steps {
                let ms = grid.moves(at);
                let m = ms[rng.gen_range(0..ms.len())];
                push_reduced(&mut t, m);
                at = grid.end(m);
            }
            t
        })
        .collect()
}

/// Searches the homotopy class of `phi` for a PL map of small embedding
/// energy. The returned value is exact and always an upper bound.
pub fn emb_minimize(phi: &GraphMap, alpha_s: &Elastic, alpha_t: &Elastic, budget: &MinimizeBudget) -> Minimized {
    let s = phi.source();
    let mut incident = vec![Vec::new(); s.vertex_count()];
    for e in 0..s.edge_count() {
        let [a, b] = s.ends(e);
        incident[a].push(e);
        if b != a {
            incident[b].push(e);
        }
    }
    let problem = Problem {
        phi,
        alpha_s,
        alpha_t,
        inv_alpha: alpha_s.values().iter().map(|a| 1.0 / a.to_f64().unwrap_or(1.0)).collect(),
        incident,
    };
    let restarts = budget.restarts.max(1);
    let run_one = |r: usize| -> (Q, Minimized) {
        let tracks = if r == 0 {
            vec![Vec::new(); s.vertex_count()]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_mul(0x9e37_79b9).wrapping_add(r as u64));
            random_tracks(&problem, &mut rng)
        };
        let (st, exhausted) = problem.run(tracks, budget);
        let map = problem.build(&st);
        let report = emb_evaluate(&map);
        let value = report.value.exact().cloned().unwrap_or_else(Q::zero);
        let m = Minimized {
            map,
            report,
            value: value.clone(),
            grid: st.grid.k,
            tracks: st.tracks.clone(),
            evaluations: st.evaluations,
            exhausted,
        };
        (value, m)
    };
    let jobs = budget.jobs.max(1).min(restarts);
    let mut results: Vec<(usize, Q, Minimized)> = if jobs == 1 {
        (0..restarts).map(|r| { let (v, m) = run_one(r); (r, v, m) }).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    let run_one = &run_one;
                    scope.spawn(move || {
                        (j..restarts).step_by(jobs).map(|r| { let (v, m) = run_one(r); (r, v, m) }).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("restart worker")).collect()
        })
    };
    results.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let evaluations = results.iter().map(|r| r.2.evaluations).sum();
    let exhausted = results.iter().any(|r| r.2.exhausted);
    let mut best = results.swap_remove(0).2;
    best.evaluations = evaluations;
    best.exhausted = exhausted;
    best
}

/// Checks that `m` is homotopic to `phi`: every edge image, conjugated back
/// along the vertex tracks, tightens to the refined image under `phi`.
pub fn is_homotopic(phi: &GraphMap, m: &Minimized) -> bool {
    let target: &RibbonGraph = phi.target();
    let grid = Grid { g: target, k: m.grid };
    let s = phi.source();
    let alpha_t = &m.map.alpha_t;
    for v in 0..s.vertex_count() {
        let end = match m.tracks[v].last() {
            Some(&st) => grid.end(st),
            None => GridPoint::Vertex(phi.vertex_image(v)),
        };
        if let Some(&first) = m.tracks[v].first() {
            if grid.start(first) != GridPoint::Vertex(phi.vertex_image(v)) {
                return false;
            }
        }
        if m.tracks[v].windows(2).any(|w| grid.end(w[0]) != grid.start(w[1])) {
            return false;
        }
        if grid.to_point(end, alpha_t).normalize(target, alpha_t) != m.map.vertex_image[v].clone().normalize(target, alpha_t) {
            return false;
        }
    }
    for e in 0..s.edge_count() {
        let mut steps = Vec::new();
        for pc in &m.map.pieces[e] {
            match &pc.image {
                Image::Point(_) => {}
                Image::Segment { edge, from, to } => {
                    let seg = alpha_t.alpha(*edge) / Q::from_integer(BigInt::from(m.grid));
                    let lo = if from < to { from } else { to };
                    let k = lo / &seg;
                    if !k.is_integer() || (to - from).abs() != seg {
                        return false;
                    }
                    let k = k.to_integer().to_u32().unwrap_or(u32::MAX);
                    steps.push(GridStep { edge: *edge as u32, k, forward: from < to });
                }
            }
        }
        let [a, b] = s.ends(e);
        let mut full = Vec::new();
        for st in m.tracks[a].iter().copied().chain(steps).chain(m.tracks[b].iter().rev().map(|s| s.inv())) {
            push_reduced(&mut full, st);
        }
        let mut want = Vec::new();
        for &d in phi.edge_image(e) {
            grid.expand(d, &mut want);
        }
        if full != want {
            return false;
        }
    }
    true
}
