//! Stretch-factor lower bounds from curves and rationality certificates.

use num::{One, Zero};

use crate::graph::{el_from_counts, enumerate_cyclic_words_capped, reduce_cyclic, Dart, Elastic, MultiCurve, Q};
use crate::maps::{lift_closed_word, Covering, GraphMap};
use crate::minimize::{emb_minimize, is_homotopic, MinimizeBudget, Minimized};
use crate::obstruction::{scan, ObstructionReport};
use crate::pl::emb;
use crate::spine::critical_portrait;
use crate::vend::{iterate, Tower, VirtualEndomorphism, DEFAULT_TOWER_CAP};

/// Curves tried per level before giving up on exhaustive enumeration.
pub const DEFAULT_CURVE_CAP: usize = 20_000;
/// Best single curves combined into multi-curves.
const PAIR_POOL: usize = 40;

/// `EL(φ∘c)/EL(c)` maximized over the curves tried.
#[derive(Clone, Debug)]
pub struct SfBound {
    pub value: Q,
    pub witness: MultiCurve,
    pub image: MultiCurve,
    pub tried: usize,
}

fn counts(words: &[&Vec<Dart>], edges: usize) -> Vec<u64> {
    let mut n = vec![0u64; edges];
    for w in words {
        for d in w.iter() {
            n[d.edge()] += 1;
        }
    }
    n
}

struct Scored {
    word: Vec<Dart>,
    image: Vec<Dart>,
    el: Q,
}

fn ratio(phi: &GraphMap, alpha_s: &Elastic, alpha_t: &Elastic, comps: &[&Scored]) -> Q {
    let src: Vec<&Vec<Dart>> = comps.iter().map(|s| &s.word).collect();
    let img: Vec<&Vec<Dart>> = comps.iter().map(|s| &s.image).collect();
    let el_s = el_from_counts(&counts(&src, phi.source().edge_count()), alpha_s);
    let el_t = el_from_counts(&counts(&img, phi.target().edge_count()), alpha_t);
    el_t / el_s
}

/// Lower bound for `SF[φ]` from curves of length at most `max_len` in the
/// source, plus lifts of short target curves through `cover` when given.
pub fn sf_lower_bound(
    phi: &GraphMap,
    alpha_s: &Elastic,
    alpha_t: &Elastic,
    max_len: usize,
    max_components: usize,
    cover: Option<&Covering>,
) -> SfBound {
    let s = phi.source();
    let mut words = enumerate_cyclic_words_capped(s, max_len, DEFAULT_CURVE_CAP);
    if let Some(pi) = cover {
        for w in enumerate_cyclic_words_capped(pi.target(), max_len, DEFAULT_CURVE_CAP) {
            for lc in lift_closed_word(pi, &w) {
                words.push(crate::graph::canonical_cyclic(&lc.word));
            }
        }
    }
    words.sort();
    words.dedup();
    let mut scored: Vec<(Q, Scored)> = words
        .into_iter()
        .map(|w| {
            let image = reduce_cyclic(&phi.word_image(&w));
            let el = el_from_counts(&counts(&[&w], s.edge_count()), alpha_s);
            let sc = Scored { word: w, image, el };
            (ratio(phi, alpha_s, alpha_t, &[&sc]), sc)
        })
        .collect();
    let tried = scored.len();
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.el.cmp(&b.1.el)).then(a.1.word.cmp(&b.1.word)));
    let mut best = (Q::zero(), Vec::new());
    if let Some((r, _)) = scored.first() {
        best = (r.clone(), vec![0]);
    }
    let pool = scored.len().min(PAIR_POOL);
    if max_components >= 2 {
        for i in 0..pool {
            for j in i..pool {
                let r = ratio(phi, alpha_s, alpha_t, &[&scored[i].1, &scored[j].1]);
                if r > best.0 {
                    best = (r, vec![i, j]);
                }
            }
        }
    }
    let witness = MultiCurve::from_closed(best.1.iter().map(|&i| scored[i].1.word.clone()));
    let image = MultiCurve::from_closed(best.1.iter().map(|&i| scored[i].1.image.clone()));
    SfBound { value: best.0, witness, image, tried: tried + pool * (pool + 1) / 2 }
}

/// Limits for [`certify`] and the per-level bounds it computes.
#[derive(Clone, Debug)]
pub struct CertifyBudget {
    pub minimize: MinimizeBudget,
    pub max_len: usize,
    pub max_components: usize,
    /// Longest curve tried when scanning for obstructions.
    pub scan_len: usize,
    /// Largest forward saturation kept during the scan.
    pub scan_cap: usize,
    pub tower_cap: usize,
}

impl Default for CertifyBudget {
    fn default() -> Self {
        CertifyBudget {
            minimize: MinimizeBudget::default(),
            max_len: 8,
            max_components: 2,
            scan_len: 6,
            scan_cap: 8,
            tower_cap: DEFAULT_TOWER_CAP,
        }
    }
}

/// Bounds for `Emb[φ_n]` at one level.
#[derive(Clone, Debug)]
pub struct LevelBounds {
    pub n: usize,
    pub sf_lower: SfBound,
    pub emb_upper: Minimized,
}

/// A PL map in the class of `φ_n` with embedding energy below 1.
#[derive(Clone, Debug)]
pub struct RationalityCertificate {
    pub n: usize,
    pub witness: Minimized,
    pub emb_upper: Q,
    pub sf_lower: Q,
    pub curves: MultiCurve,
}

impl RationalityCertificate {
    pub fn margin(&self) -> Q {
        Q::one() - &self.emb_upper
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Certificate(RationalityCertificate),
    Obstruction(ObstructionReport),
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct CertifyReport {
    pub verdict: Verdict,
    pub table: Vec<LevelBounds>,
    pub warnings: Vec<String>,
}

/// Bounds for `Emb[φ_n]` on one tower level.
pub fn level_bounds(t: &Tower, n: usize, budget: &CertifyBudget) -> LevelBounds {
    let l = t.level(n);
    let a0 = &t.level(0).alpha;
    let sf_lower = sf_lower_bound(&l.phi, &l.alpha, a0, budget.max_len, budget.max_components, Some(&l.pi));
    let emb_upper = emb_minimize(&l.phi, &l.alpha, a0, &budget.minimize);
    LevelBounds { n, sf_lower, emb_upper }
}

/// Looks for an obstruction at `p = 2`, then for a level `n ≤ max_n` whose
/// map has a PL representative of embedding energy below 1.
pub fn certify(v: &VirtualEndomorphism, max_n: usize, budget: &CertifyBudget) -> CertifyReport {
    let mut warnings = Vec::new();
    match critical_portrait(v) {
        Ok(p) if !p.hyperbolic_type => {
            warnings.push("not of hyperbolic type: a missing certificate says nothing about rationality".into())
        }
        Ok(_) => {}
        Err(e) => warnings.push(format!("critical portrait unavailable: {e}")),
    }
    if let Some(r) = scan(v, budget.scan_len, budget.scan_cap) {
        return CertifyReport { verdict: Verdict::Obstruction(r), table: Vec::new(), warnings };
    }
    let mut table = Vec::new();
    if max_n == 0 {
        return CertifyReport { verdict: Verdict::Inconclusive, table, warnings };
    }
    let mut tower = Tower::new(v, budget.tower_cap);
    for n in 1..=max_n {
        if let Err(e) = tower.extend_to(n) {
            warnings.push(e.to_string());
            break;
        }
        let b = level_bounds(&tower, n, budget);
        let done = b.emb_upper.value < Q::one();
        table.push(b);
        if done {
            let b = table.last().expect("just pushed");
            let cert = RationalityCertificate {
                n,
                witness: b.emb_upper.clone(),
                emb_upper: b.emb_upper.value.clone(),
                sf_lower: b.sf_lower.value.clone(),
                curves: b.sf_lower.witness.clone(),
            };
            return CertifyReport { verdict: Verdict::Certificate(cert), table, warnings };
        }
    }
    CertifyReport { verdict: Verdict::Inconclusive, table, warnings }
}

/// Rebuilds level `n` and re-checks every claim of a certificate.
pub fn verify_certificate(v: &VirtualEndomorphism, c: &RationalityCertificate) -> bool {
    let Ok(t) = iterate(v, c.n, DEFAULT_TOWER_CAP) else { return false };
    let phi = &t.level(c.n).phi;
    c.witness.map.validate().is_ok()
        && c.witness.map.source.as_ref() == phi.source().as_ref()
        && is_homotopic(phi, &c.witness)
        && emb(&c.witness.map) == c.emb_upper
        && c.emb_upper < Q::one()
        && c.sf_lower <= c.emb_upper
}
