//! Energies of iterates and their n-th roots.

use num::{One, ToPrimitive};
use thiserror::Error;

use crate::energy::sf_lower_bound;
use crate::graph::Q;
use crate::minimize::{emb_minimize, MinimizeBudget, Minimized};
use crate::pl::{compose, emb, epp_evaluate, lift, Exponent, PlError, Value};
use crate::vend::{Tower, VendError, VirtualEndomorphism};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AsymptoticError {
    #[error("degree must exceed 1, got {0}")]
    Degree(usize),
    #[error(transparent)]
    Vend(#[from] VendError),
    #[error(transparent)]
    Pl(#[from] PlError),
}

#[derive(Clone, Debug)]
pub struct AsymptoticRow {
    pub n: usize,
    /// Best curve ratio on level `n`; reported, not a bound on the limit.
    pub lower: Q,
    /// Energy of the best witness in the class of `φ_n`.
    pub upper: Value,
    pub lower_root: f64,
    pub upper_root: f64,
}

#[derive(Clone, Debug)]
pub struct AsymptoticTable {
    pub p: Exponent,
    pub rows: Vec<AsymptoticRow>,
    /// `min_n upper_n^{1/n}`, an upper bound for the asymptotic energy.
    pub asf_upper: Option<f64>,
    /// Some `upper_n < 1`, decided before taking roots.
    pub below_one: bool,
}

fn root(x: f64, n: usize) -> f64 {
    x.powf(1.0 / n as f64)
}

/// `min_n x_n^{1/n}` over `x_1, x_2, ...`; none for an empty sequence.
pub fn fekete_upper(values: &[f64]) -> Option<f64> {
    values.iter().enumerate().map(|(i, &x)| root(x, i + 1)).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))))
}

/// Rows for levels `1..=max_n`; `p = 2` uses the embedding energy.
pub fn asf_estimate(
    v: &VirtualEndomorphism,
    max_n: usize,
    budget: &MinimizeBudget,
    max_len: usize,
    p: Exponent,
    tower_cap: usize,
) -> Result<AsymptoticTable, AsymptoticError> {
    if v.degree() < 2 {
        return Err(AsymptoticError::Degree(v.degree()));
    }
    let mut tower = Tower::new(v, tower_cap);
    tower.extend_to(max_n)?;
    let a0 = tower.level(0).alpha.clone();
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let l = tower.level(n);
        let lower = sf_lower_bound(&l.phi, &l.alpha, &a0, max_len, 2, Some(&l.pi)).value;
        let w = emb_minimize(&l.phi, &l.alpha, &a0, budget);
        let upper = if p == Exponent::Finite(2.0) { Value::Exact(w.value.clone()) } else { epp_evaluate(&w.map, p).value };
        rows.push(AsymptoticRow {
            n,
            lower_root: root(lower.to_f64().unwrap_or(f64::NAN), n),
            upper_root: root(upper.to_f64(), n),
            lower,
            upper,
        });
    }
    let asf_upper = fekete_upper(&rows.iter().map(|r| r.upper.to_f64()).collect::<Vec<_>>());
    let below_one = rows.iter().any(|r| match &r.upper {
        Value::Exact(q) => q < &Q::one(),
        Value::Approx(x) => *x < 1.0,
    });
    Ok(AsymptoticTable { p, rows, asf_upper, below_one })
}

/// One evaluated relation between witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditItem {
    pub n: usize,
    pub k: usize,
    pub relation: &'static str,
    pub lhs: Q,
    pub rhs: Q,
    pub holds: bool,
    pub equality: bool,
}

/// For witnesses `w_n ≃ φ_n` and `w_k ≃ φ_k`, lifts `w_k` through `π_n`
/// and checks `Emb(lift) = Emb(w_k)` and `Emb(w_n ∘ lift) ≤ Emb(w_n)·Emb(w_k)`.
pub fn submult_audit(
    v: &VirtualEndomorphism,
    max_n: usize,
    budget: &MinimizeBudget,
    tower_cap: usize,
) -> Result<Vec<AuditItem>, AsymptoticError> {
    let mut out = Vec::new();
    if max_n == 0 {
        return Ok(out);
    }
    let mut tower = Tower::new(v, tower_cap);
    tower.extend_to(max_n)?;
    let a0 = tower.level(0).alpha.clone();
    let witnesses: Vec<Minimized> = (1..=max_n)
        .map(|n| {
            let l = tower.level(n);
            emb_minimize(&l.phi, &l.alpha, &a0, budget)
        })
        .collect();
    // pairs up to n + k = max_n + 1, so that max_n = 1 still audits (1, 1)
    for n in 1..=max_n {
        for k in 1..=max_n + 1 - n {
            let (wn, wk) = (&witnesses[n - 1], &witnesses[k - 1]);
            let (lifted, _) = lift(&wk.map, &tower.level(n).pi)?;
            let el = emb(&lifted);
            out.push(AuditItem { n, k, relation: "cover invariance", holds: el == wk.value, equality: el == wk.value, lhs: el, rhs: wk.value.clone() });
            let c = compose(&wn.map, &lifted)?;
            let ec = emb(&c);
            let bound = &wn.value * &wk.value;
            out.push(AuditItem { n, k, relation: "submultiplicativity", holds: ec <= bound, equality: ec == bound, lhs: ec, rhs: bound });
        }
    }
    Ok(out)
}
