//! p-conformal multi-curves, obstruction matrices and their Perron eigenvalues.

use std::collections::HashSet;
use std::sync::Arc;

use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{canonical_cyclic, enumerate_cyclic_words_capped, reduce_cyclic, Dart, MultiCurve, RibbonGraph, Q};
use crate::maps::lift_closed_word;
use crate::pl::{Exponent, Value};
use crate::ribbon::{is_simple, RibbonVerdict};
use crate::vend::VirtualEndomorphism;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObstructionError {
    #[error("p-harmonic sum of no values")]
    Empty,
    #[error("exponent must lie in [1, ∞]")]
    BadExponent,
    #[error("multi-curve is not forwards-invariant")]
    NotForwardInvariant,
    #[error("saturation exceeded {0} components")]
    ComponentCap(usize),
}

fn p_value(p: Exponent) -> f64 {
    match p {
        Exponent::One => 1.0,
        Exponent::Finite(x) => x,
        Exponent::Infinity => f64::INFINITY,
    }
}

/// Integral exponent, when `p` has one.
fn p_integer(p: Exponent) -> Option<i32> {
    match p {
        Exponent::One => Some(1),
        Exponent::Finite(x) if x.fract() == 0.0 && x <= 1e6 => Some(x as i32),
        _ => None,
    }
}

fn qpow(x: &Q, k: i32) -> Q {
    if k >= 0 {
        num::pow(x.clone(), k as usize)
    } else {
        num::pow(x.recip(), (-k) as usize)
    }
}

/// `(Σ v^{1−p})^{1/(1−p)}`; the minimum at `p = ∞`.
pub fn p_harmonic_sum(values: &[Value], p: Exponent) -> Result<Value, ObstructionError> {
    if values.is_empty() {
        return Err(ObstructionError::Empty);
    }
    let exact: Option<Vec<&Q>> = values.iter().map(Value::exact).collect();
    match p {
        Exponent::One => Err(ObstructionError::BadExponent),
        Exponent::Infinity => Ok(match exact {
            Some(qs) => Value::Exact(qs.into_iter().min().cloned().expect("non-empty")),
            None => Value::Approx(values.iter().map(Value::to_f64).fold(f64::INFINITY, f64::min)),
        }),
        Exponent::Finite(x) => {
            if let (Some(qs), Some(2)) = (&exact, p_integer(p)) {
                let s: Q = qs.iter().map(|q| q.recip()).sum();
                return Ok(Value::Exact(s.recip()));
            }
            let s: f64 = values.iter().map(|v| v.to_f64().powf(1.0 - x)).sum();
            Ok(Value::Approx(s.powf(1.0 / (1.0 - x))))
        }
    }
}

/// Multi-curve on Γ0 with a p-length (or a weight when `p = 1`) per component.
#[derive(Clone, Debug, PartialEq)]
pub struct PConformalMultiCurve {
    pub support: MultiCurve,
    pub p: Exponent,
    pub lengths: Vec<Value>,
}

impl PConformalMultiCurve {
    /// `γ = α^{1−p}`; the weight itself when `p = 1`.
    pub fn conductances(&self) -> Vec<Value> {
        self.lengths.iter().map(|l| conductance(l, self.p)).collect()
    }

    pub fn from_conductances(support: MultiCurve, p: Exponent, gamma: &[Value]) -> Self {
        let lengths = gamma.iter().map(|g| length_of(g, p)).collect();
        PConformalMultiCurve { support, p, lengths }
    }

    /// Hölder conjugate `p/(p−1)`.
    pub fn conjugate(&self) -> f64 {
        let p = p_value(self.p);
        if p.is_infinite() {
            1.0
        } else {
            p / (p - 1.0)
        }
    }
}

fn conductance(l: &Value, p: Exponent) -> Value {
    match (l, p_integer(p)) {
        (_, Some(1)) => l.clone(),
        (Value::Exact(q), Some(k)) => Value::Exact(qpow(q, 1 - k)),
        _ if p == Exponent::Infinity => Value::Approx(0.0),
        _ => Value::Approx(l.to_f64().powf(1.0 - p_value(p))),
    }
}

fn length_of(g: &Value, p: Exponent) -> Value {
    match (g, p_integer(p)) {
        (_, Some(1)) => g.clone(),
        (Value::Exact(q), Some(2)) => Value::Exact(q.recip()),
        _ => Value::Approx(g.to_f64().powf(1.0 / (1.0 - p_value(p)))),
    }
}

fn add(a: &Value, b: &Value) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact(x + y),
        _ => Value::Approx(a.to_f64() + b.to_f64()),
    }
}

fn scale(a: &Value, k: usize, p: Exponent) -> Value {
    // series law for `k` copies end to end: the p-length multiplies by `k`
    match p {
        Exponent::One => a.clone(),
        _ => match a {
            Value::Exact(q) => Value::Exact(q * Q::from_integer(k.into())),
            Value::Approx(x) => Value::Approx(x * k as f64),
        },
    }
}

/// Face boundaries of Γ0 in canonical form; curves parallel to them bound
/// a punctured disk.
pub fn peripheral_words(g: &RibbonGraph) -> HashSet<Vec<Dart>> {
    g.faces().iter().map(|f| canonical_cyclic(&reduce_cyclic(f))).filter(|w| !w.is_empty()).collect()
}

fn primitive_root(w: &[Dart]) -> &[Dart] {
    let n = w.len();
    for k in 1..n {
        if n % k == 0 && (0..n).all(|i| w[i] == w[i % k]) {
            return &w[..k];
        }
    }
    w
}

/// Canonical form of `φ_*D`, or `None` when it is trivial or peripheral.
fn essential(w: &[Dart], peripheral: &HashSet<Vec<Dart>>) -> Option<Vec<Dart>> {
    let r = reduce_cyclic(w);
    if r.is_empty() {
        return None;
    }
    let c = canonical_cyclic(&r);
    if peripheral.contains(&canonical_cyclic(primitive_root(&c))) {
        return None;
    }
    Some(c)
}

/// Each component of `π*C_i` pushed forward: `(i, image, degree)`, with
/// trivial and peripheral images dropped.
fn pushpull_images(v: &VirtualEndomorphism, c: &MultiCurve) -> Vec<(usize, Vec<Dart>, usize)> {
    let peripheral = peripheral_words(&v.gamma0.graph);
    let mut out = Vec::new();
    for (i, w) in c.components().iter().enumerate() {
        for lc in lift_closed_word(&v.pi, w) {
            if let Some(img) = essential(&v.phi.word_image(&lc.word), &peripheral) {
                out.push((i, img, lc.degree));
            }
        }
    }
    out
}

/// `φ_*π*A` after joining parallel components.
pub fn pushpull(v: &VirtualEndomorphism, a: &PConformalMultiCurve) -> PConformalMultiCurve {
    let mut support: Vec<Vec<Dart>> = Vec::new();
    let mut cond: Vec<Value> = Vec::new();
    for (i, img, deg) in pushpull_images(v, &a.support) {
        let lifted = conductance(&scale(&a.lengths[i], deg, a.p), a.p);
        match support.iter().position(|s| *s == img) {
            Some(k) => cond[k] = add(&cond[k], &lifted),
            None => {
                support.push(img);
                cond.push(lifted);
            }
        }
    }
    let mut order: Vec<usize> = (0..support.len()).collect();
    order.sort_by(|&x, &y| support[x].cmp(&support[y]));
    let words: Vec<Vec<Dart>> = order.iter().map(|&k| support[k].clone()).collect();
    let gam: Vec<Value> = order.iter().map(|&k| cond[k].clone()).collect();
    PConformalMultiCurve::from_conductances(MultiCurve::from_closed(words), a.p, &gam)
}

/// Drops trivial and peripheral components and merges parallel ones.
pub fn join_p(g: &RibbonGraph, a: &PConformalMultiCurve) -> PConformalMultiCurve {
    let peripheral = peripheral_words(g);
    let mut support: Vec<Vec<Dart>> = Vec::new();
    let mut groups: Vec<Vec<Value>> = Vec::new();
    for (w, l) in a.support.components().iter().zip(&a.lengths) {
        if let Some(c) = essential(w, &peripheral) {
            match support.iter().position(|s| *s == c) {
                Some(k) => groups[k].push(l.clone()),
                None => {
                    support.push(c);
                    groups.push(vec![l.clone()]);
                }
            }
        }
    }
    let lengths: Vec<Value> = groups
        .iter()
        .map(|ls| match a.p {
            Exponent::One => ls.iter().skip(1).fold(ls[0].clone(), |acc, x| add(&acc, x)),
            p => p_harmonic_sum(ls, p).expect("non-empty group"),
        })
        .collect();
    let mut order: Vec<usize> = (0..support.len()).collect();
    order.sort_by(|&x, &y| support[x].cmp(&support[y]));
    PConformalMultiCurve {
        support: MultiCurve::from_closed(order.iter().map(|&k| support[k].clone())),
        p: a.p,
        lengths: order.iter().map(|&k| lengths[k].clone()).collect(),
    }
}

/// `M^p_C`: entry `(i, j)` sums `deg^{1−p}` over components `D` of `π*C_i`
/// with `φ_*D` parallel to `C_j`. Conductances push forward as `Mᵀγ`.
#[derive(Clone, Debug)]
pub struct ObstructionMatrix {
    pub components: Vec<Vec<Dart>>,
    pub degrees: Vec<Vec<Vec<usize>>>,
    /// Images of preimages that are not parallel to any component.
    pub escaping: Vec<(usize, Vec<Dart>)>,
}

impl ObstructionMatrix {
    pub fn size(&self) -> usize {
        self.components.len()
    }

    pub fn at(&self, p: Exponent) -> Vec<Vec<f64>> {
        let e = 1.0 - p_value(p);
        self.degrees
            .iter()
            .map(|row| {
                row.iter()
                    .map(|ds| {
                        ds.iter()
                            .map(|&d| if d == 1 { 1.0 } else if e.is_infinite() { 0.0 } else { (d as f64).powf(e) })
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// Exact entries for integral `p`.
    pub fn exact(&self, p: i32) -> Vec<Vec<Q>> {
        self.degrees
            .iter()
            .map(|row| row.iter().map(|ds| ds.iter().map(|&d| qpow(&Q::from_integer(d.into()), 1 - p)).sum()).collect())
            .collect()
    }

    pub fn is_forward_invariant(&self) -> bool {
        self.escaping.is_empty()
    }
}

pub fn obstruction_matrix(v: &VirtualEndomorphism, c: &MultiCurve) -> ObstructionMatrix {
    let comps: Vec<Vec<Dart>> = c.components().iter().map(|w| canonical_cyclic(w)).collect();
    let n = comps.len();
    let mut degrees = vec![vec![Vec::new(); n]; n];
    let mut escaping = Vec::new();
    for (i, img, deg) in pushpull_images(v, c) {
        match comps.iter().position(|w| *w == img) {
            Some(j) => degrees[i][j].push(deg),
            None => escaping.push((i, img)),
        }
    }
    ObstructionMatrix { components: comps, degrees, escaping }
}

/// Perron root with a Collatz–Wielandt enclosure.
#[derive(Clone, Debug, PartialEq)]
pub struct Perron {
    pub lower: f64,
    pub upper: f64,
    pub vector: Option<Vec<f64>>,
}

impl Perron {
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Strongly connected components in reverse topological order.
pub fn sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct T<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(t: &mut T, v: usize) {
        t.index[v] = Some(t.next);
        t.low[v] = t.next;
        t.next += 1;
        t.stack.push(v);
        t.on[v] = true;
        for k in 0..t.adj[v].len() {
            let w = t.adj[v][k];
            match t.index[w] {
                None => {
                    visit(t, w);
                    t.low[v] = t.low[v].min(t.low[w]);
                }
                Some(i) if t.on[w] => t.low[v] = t.low[v].min(i),
                _ => {}
            }
        }
        if Some(t.low[v]) == t.index[v] {
            let mut comp = Vec::new();
            while let Some(w) = t.stack.pop() {
                t.on[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            t.out.push(comp);
        }
    }
    let n = adj.len();
    let mut t = T { adj, index: vec![None; n], low: vec![0; n], on: vec![false; n], stack: Vec::new(), next: 0, out: Vec::new() };
    for v in 0..n {
        if t.index[v].is_none() {
            visit(&mut t, v);
        }
    }
    t.out
}

fn adjacency(m: &[Vec<f64>]) -> Vec<Vec<usize>> {
    m.iter().map(|row| (0..row.len()).filter(|&j| row[j] > 0.0).collect()).collect()
}

/// Enclosure of the Perron root of an irreducible block of `m`.
fn block_perron(m: &[Vec<f64>], idx: &[usize]) -> Perron {
    let n = idx.len();
    if n == 1 {
        let a = m[idx[0]][idx[0]];
        return Perron { lower: a, upper: a, vector: Some(vec![1.0]) };
    }
    // shifting by the identity makes the block primitive
    let mut x = vec![1.0; n];
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    for _ in 0..100_000 {
        let y: Vec<f64> = (0..n).map(|a| x[a] + (0..n).map(|b| m[idx[a]][idx[b]] * x[b]).sum::<f64>()).collect();
        let ratios: Vec<f64> = (0..n).map(|a| y[a] / x[a]).collect();
        lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
        hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - 1.0;
        let s: f64 = y.iter().sum();
        x = y.into_iter().map(|v| v / s).collect();
        if hi - lo <= 1e-12 * hi.abs().max(1.0) {
            break;
        }
    }
    Perron { lower: lo.max(0.0), upper: hi, vector: Some(x) }
}

/// Perron root of a nonnegative matrix; `0` for the empty matrix.
pub fn perron_eigenvalue(m: &[Vec<f64>]) -> Perron {
    if m.is_empty() {
        return Perron { lower: 0.0, upper: 0.0, vector: None };
    }
    let comps = sccs(&adjacency(m));
    let mut best = Perron { lower: 0.0, upper: 0.0, vector: None };
    let mut blocks = 0;
    for c in &comps {
        let cyclic = c.len() > 1 || m[c[0]][c[0]] > 0.0;
        if !cyclic {
            continue;
        }
        blocks += 1;
        let p = block_perron(m, c);
        if p.upper > best.upper || best.vector.is_none() {
            let mut full = vec![0.0; m.len()];
            if let Some(v) = &p.vector {
                for (k, &i) in c.iter().enumerate() {
                    full[i] = v[k];
                }
            }
            best = Perron { lower: p.lower.max(best.lower), upper: p.upper.max(best.upper), vector: Some(full) };
        } else {
            best.lower = best.lower.max(p.lower);
        }
    }
    // the eigenvector is only meaningful for an irreducible matrix
    if !(comps.len() == 1 && blocks == 1) {
        best.vector = None;
    }
    best
}

/// Exact comparison of the Perron root with 1: `ρ(M) < 1` iff `I − M` is
/// invertible with a nonnegative inverse.
pub fn compare_with_one(m: &[Vec<Q>]) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let n = m.len();
    if n == 0 {
        return Ordering::Less;
    }
    // Gauss-Jordan on [I − M | I]
    let mut a: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row: Vec<Q> = (0..n).map(|j| if i == j { Q::one() - &m[i][j] } else { -m[i][j].clone() }).collect();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ordering::Equal;
        };
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..2 * n {
                    let t = &a[col][k] * &f;
                    a[r][k] -= t;
                }
            }
        }
    }
    if a.iter().any(|row| row[n..].iter().any(|x| x.is_negative())) {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Where `λ(M^p) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum QValue {
    At(f64),
    /// `λ = 1` for every `p`: only degree-one cycles carry the root.
    AlwaysOne,
    /// `λ(M¹) < 1`.
    NeverOne,
    /// `λ(M^p) > 1` up to the search limit.
    AboveRange,
}

pub const Q_SEARCH_LIMIT: f64 = 64.0;

pub fn q_of_matrix(m: &ObstructionMatrix) -> Result<QValue, ObstructionError> {
    if !m.is_forward_invariant() {
        return Err(ObstructionError::NotForwardInvariant);
    }
    let lam = |p: f64| perron_eigenvalue(&m.at(Exponent::Finite(p))).value();
    let l1 = perron_eigenvalue(&m.at(Exponent::One)).value();
    if l1 < 1.0 - 1e-12 {
        return Ok(QValue::NeverOne);
    }
    let top = lam(Q_SEARCH_LIMIT);
    if (top - 1.0).abs() <= 1e-9 && (l1 - 1.0).abs() <= 1e-9 {
        return Ok(QValue::AlwaysOne);
    }
    if top > 1.0 + 1e-12 {
        return Ok(QValue::AboveRange);
    }
    let (mut lo, mut hi) = (1.0, Q_SEARCH_LIMIT);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if lam(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(QValue::At(0.5 * (lo + hi)))
}

pub fn q_of_curve(v: &VirtualEndomorphism, c: &MultiCurve) -> Result<QValue, ObstructionError> {
    q_of_matrix(&obstruction_matrix(v, c))
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub forwards: bool,
    pub back: bool,
    pub totally: bool,
    pub irreducible: bool,
    pub sccs: Vec<Vec<usize>>,
}

pub fn classify_invariance(v: &VirtualEndomorphism, c: &MultiCurve) -> InvarianceReport {
    let m = obstruction_matrix(v, c);
    let n = m.size();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| !m.degrees[i][j].is_empty()).collect()).collect();
    let forwards = m.is_forward_invariant();
    let back = (0..n).all(|j| (0..n).any(|i| !m.degrees[i][j].is_empty()));
    let comps = sccs(&adj);
    let strongly = n == 0 || (comps.len() == 1 && (n > 1 || !adj[0].is_empty()));
    InvarianceReport { forwards, back, totally: forwards && back, irreducible: forwards && strongly, sccs: comps }
}

/// Grows `C` by its push-pulls until nothing new appears.
pub fn saturate_back_invariant(v: &VirtualEndomorphism, c: &MultiCurve, cap: usize) -> Result<MultiCurve, ObstructionError> {
    let mut cur = MultiCurve::from_closed(c.components().iter().cloned());
    loop {
        let mut words: Vec<Vec<Dart>> = cur.components().to_vec();
        for (_, img, _) in pushpull_images(v, &cur) {
            if !words.contains(&img) {
                words.push(img);
            }
        }
        if words.len() > cap {
            return Err(ObstructionError::ComponentCap(cap));
        }
        let next = MultiCurve::from_closed(words);
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Result of [`check_p_obstruction`].
#[derive(Clone, Debug, PartialEq)]
pub struct PCheck {
    pub obstruction: bool,
    pub energy: Value,
}

/// Whether the natural map `A → φ_*π*A` has `E^p_p ≤ 1`, computed from how
/// each component's conductance scales.
pub fn check_p_obstruction(v: &VirtualEndomorphism, a: &PConformalMultiCurve) -> Result<PCheck, ObstructionError> {
    if a.support.is_empty() {
        return Ok(PCheck { obstruction: false, energy: Value::Approx(f64::INFINITY) });
    }
    let m = obstruction_matrix(v, &a.support);
    if !m.is_forward_invariant() {
        return Err(ObstructionError::NotForwardInvariant);
    }
    let gamma = a.conductances();
    let n = m.size();
    let none = PCheck { obstruction: false, energy: Value::Approx(f64::INFINITY) };
    if p_integer(a.p) == Some(2) && gamma.iter().all(|g| g.exact().is_some()) {
        // E = max_j (γ_j / γ'_j)^{1/2}; the square is compared exactly
        let mat = m.exact(2);
        let mut worst = Q::zero();
        for j in 0..n {
            let pushed: Q = (0..n).map(|i| &mat[i][j] * gamma[i].exact().expect("exact")).sum();
            if pushed.is_zero() {
                return Ok(none);
            }
            worst = worst.max(gamma[j].exact().expect("exact") / pushed);
        }
        let e = worst.to_f64().unwrap_or(f64::INFINITY).sqrt();
        return Ok(PCheck { obstruction: worst <= Q::one(), energy: Value::Approx(e) });
    }
    let mat = m.at(a.p);
    let p = p_value(a.p);
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let pushed: f64 = (0..n).map(|i| mat[i][j] * gamma[i].to_f64()).sum();
        if pushed <= 0.0 {
            return Ok(none);
        }
        let r = gamma[j].to_f64() / pushed;
        worst = worst.max(if p.is_infinite() { r } else { r.powf(1.0 / p) });
    }
    Ok(PCheck { obstruction: worst <= 1.0 + 1e-12, energy: Value::Approx(worst) })
}

/// An obstruction found by [`scan`].
#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub curve: MultiCurve,
    pub matrix: ObstructionMatrix,
    pub p: Exponent,
    pub lambda: Perron,
    /// Exact `λ ≥ 1` at `p = 2`.
    pub exact_at_least_one: bool,
    pub q: QValue,
    pub invariance: InvarianceReport,
}

/// Searches simple non-peripheral curves of length at most `max_len` on Γ0
/// whose forward saturation is a simple multi-curve with `λ(M²) ≥ 1`.
pub fn scan(v: &VirtualEndomorphism, max_len: usize, cap: usize) -> Option<ObstructionReport> {
    let g: &Arc<RibbonGraph> = &v.gamma0.graph;
    let peripheral = peripheral_words(g);
    let mut seen: HashSet<Vec<Vec<Dart>>> = HashSet::new();
    for w in enumerate_cyclic_words_capped(g, max_len, 50_000) {
        if essential(&w, &peripheral).is_none() {
            continue;
        }
        let c = MultiCurve::from_closed([w]);
        if !matches!(is_simple(g, &c), RibbonVerdict::Ribbon(_)) {
            continue;
        }
        let Ok(sat) = saturate_back_invariant(v, &c, cap) else { continue };
        if !seen.insert(sat.components().to_vec()) {
            continue;
        }
        if !matches!(is_simple(g, &sat), RibbonVerdict::Ribbon(_)) {
            continue;
        }
        let m = obstruction_matrix(v, &sat);
        if compare_with_one(&m.exact(2)) == std::cmp::Ordering::Less {
            continue;
        }
        let lambda = perron_eigenvalue(&m.at(Exponent::Finite(2.0)));
        let q = q_of_matrix(&m).unwrap_or(QValue::NeverOne);
        let invariance = classify_invariance(v, &sat);
        return Some(ObstructionReport { curve: sat, matrix: m, p: Exponent::Finite(2.0), lambda, exact_at_least_one: true, q, invariance });
    }
    None
}

/// Report for a given multi-curve at exponent `p`.
pub fn analyze(v: &VirtualEndomorphism, c: &MultiCurve, p: Exponent) -> ObstructionReport {
    let m = obstruction_matrix(v, c);
    let lambda = perron_eigenvalue(&m.at(p));
    let exact_at_least_one = compare_with_one(&m.exact(2)) != std::cmp::Ordering::Less;
    let q = q_of_matrix(&m).unwrap_or(QValue::NeverOne);
    let invariance = classify_invariance(v, c);
    ObstructionReport { curve: c.clone(), matrix: m, p, lambda, exact_at_least_one, q, invariance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture_endomorphism, load_fixture};

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn horizontal() -> (VirtualEndomorphism, MultiCurve) {
        let v = fixture_endomorphism("obstructed-k2d2").unwrap();
        let ws = load_fixture("obstructed-k2d2").unwrap();
        let c = ws.curve("horizontal").unwrap().curve.clone();
        (v, c)
    }

    #[test]
    fn harmonic_sums() {
        let one = Value::Exact(q(1, 1));
        assert_eq!(p_harmonic_sum(&[one.clone(), one.clone()], Exponent::Finite(2.0)).unwrap(), Value::Exact(q(1, 2)));
        let v = p_harmonic_sum(&[Value::Exact(q(2, 1)), Value::Exact(q(3, 1))], Exponent::Infinity).unwrap();
        assert_eq!(v, Value::Exact(q(2, 1)));
        let v = p_harmonic_sum(&[one.clone(), one], Exponent::Finite(3.0)).unwrap();
        assert!((v.to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(p_harmonic_sum(&[], Exponent::Finite(2.0)), Err(ObstructionError::Empty));
    }

    #[test]
    fn perron_examples() {
        assert_eq!(perron_eigenvalue(&[vec![1.0]]).value(), 1.0);
        let swap = perron_eigenvalue(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((swap.value() - 1.0).abs() < 1e-9 && swap.upper - swap.lower <= 1e-9);
        let tri = perron_eigenvalue(&[vec![2.0, 0.0], vec![1.0, 3.0]]);
        assert!((tri.value() - 3.0).abs() < 1e-9);
        assert_eq!(perron_eigenvalue(&[]).value(), 0.0);
    }

    #[test]
    fn exact_comparison_with_one() {
        use std::cmp::Ordering::*;
        assert_eq!(compare_with_one(&[vec![q(1, 1)]]), Equal);
        assert_eq!(compare_with_one(&[vec![q(1, 2)]]), Less);
        assert_eq!(compare_with_one(&[vec![q(0, 1), q(2, 1)], vec![q(1, 1), q(0, 1)]]), Greater);
        assert_eq!(compare_with_one(&[vec![q(0, 1), q(1, 2)], vec![q(1, 1), q(0, 1)]]), Less);
    }

    #[test]
    fn lattes_horizontal_curve_is_an_obstruction() {
        let (v, c) = horizontal();
        let m = obstruction_matrix(&v, &c);
        assert!(m.is_forward_invariant());
        assert_eq!(m.exact(2), vec![vec![q(1, 1)]]);
        assert_eq!(m.exact(1), vec![vec![q(2, 1)]]);
        let lam = perron_eigenvalue(&m.at(Exponent::Finite(2.0)));
        assert!((lam.value() - 1.0).abs() <= 1e-9);
        match q_of_matrix(&m).unwrap() {
            QValue::At(x) => assert!((x - 2.0).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
        let a = PConformalMultiCurve { support: c.clone(), p: Exponent::Finite(2.0), lengths: vec![Value::Exact(q(1, 1))] };
        let chk = check_p_obstruction(&v, &a).unwrap();
        assert!(chk.obstruction);
        assert!((chk.energy.to_f64() - 1.0).abs() < 1e-12);
        let a3 = PConformalMultiCurve { p: Exponent::Finite(3.0), ..a.clone() };
        let chk3 = check_p_obstruction(&v, &a3).unwrap();
        assert!(!chk3.obstruction);
        assert!((chk3.energy.to_f64() - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
        let inv = classify_invariance(&v, &c);
        assert!(inv.totally && inv.irreducible);
        assert_eq!(saturate_back_invariant(&v, &c, 16).unwrap(), c);
        // conductance 1 pushes forward to 2·2^{-1}
        let pp = pushpull(&v, &a);
        assert_eq!(pp.support, c);
        assert_eq!(pp.lengths, vec![Value::Exact(q(1, 1))]);
    }

    #[test]
    fn scan_finds_the_lattes_obstruction_only() {
        let (v, _) = horizontal();
        let r = scan(&v, 4, 8).expect("obstruction");
        assert!(r.exact_at_least_one);
        assert!(scan(&fixture_endomorphism("theta").unwrap(), 6, 8).is_none());
    }

    #[test]
    fn join_merges_parallel_copies() {
        let (v, c) = horizontal();
        let g = &v.gamma0.graph;
        let doubled = c.union(&c);
        let one = Value::Exact(q(1, 1));
        let a = PConformalMultiCurve { support: doubled.clone(), p: Exponent::Finite(2.0), lengths: vec![one.clone(), one.clone()] };
        let j = join_p(g, &a);
        assert_eq!(j.support, c);
        assert_eq!(j.lengths, vec![Value::Exact(q(1, 2))]);
        let w = PConformalMultiCurve { support: doubled, p: Exponent::One, lengths: vec![Value::Exact(q(2, 1)), Value::Exact(q(3, 1))] };
        assert_eq!(join_p(g, &w).lengths, vec![Value::Exact(q(5, 1))]);
        assert!(join_p(g, &PConformalMultiCurve { support: MultiCurve::empty(), p: Exponent::One, lengths: vec![] }).support.is_empty());
    }

    #[test]
    fn empty_inputs() {
        let (v, _) = horizontal();
        let m = obstruction_matrix(&v, &MultiCurve::empty());
        assert_eq!(m.size(), 0);
        let inv = classify_invariance(&v, &MultiCurve::empty());
        assert!(inv.forwards && inv.back && inv.sccs.is_empty());
        let a = PConformalMultiCurve { support: MultiCurve::empty(), p: Exponent::Finite(2.0), lengths: vec![] };
        assert!(!check_p_obstruction(&v, &a).unwrap().obstruction);
        assert!(pushpull(&v, &a).support.is_empty());
    }
}
