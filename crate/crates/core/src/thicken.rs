//! Rectangle model of the ε-thickening of an elastic ribbon graph and the
//! two-sided extremal-length bounds it supports.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num::{One, Signed};
use thiserror::Error;

use crate::graph::{canonical_oriented, extremal_length, Dart, Elastic, GraphError, MultiCurve, RibbonGraph, Q};
use crate::ribbon::is_simple;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThickenError {
    #[error("thickness must be positive, got {0}")]
    NonPositive(Q),
    #[error("thickness {eps} is not below half the shortest edge ({half})")]
    TooThick { eps: Q, half: Q },
    #[error("vertex `{0}` is not trivalent")]
    NotTrivalent(String),
    #[error("curve is not simple")]
    NotSimple,
    #[error("boundary walks do not match the faces")]
    BoundaryMismatch,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// An `α(e) × ε` rectangle for edge `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rectangle {
    pub edge: usize,
    pub length: Q,
    pub width: Q,
}

/// At `vertex`, the half of the end of `from`'s rectangle on its
/// counterclockwise side is glued to the facing half of `to`'s rectangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corner {
    pub vertex: usize,
    pub from: Dart,
    pub to: Dart,
}

#[derive(Clone, Debug)]
pub struct ThickenedComplex {
    pub graph: Arc<RibbonGraph>,
    pub eps: Q,
    pub rectangles: Vec<Rectangle>,
    pub corners: Vec<Corner>,
    /// Boundary circles, each as the darts whose rectangle sides it runs along.
    pub boundary: Vec<Vec<Dart>>,
}

impl ThickenedComplex {
    pub fn area(&self) -> Q {
        self.rectangles.iter().map(|r| &r.length * &r.width).sum()
    }

    /// Plain-text gluing table: one line per rectangle, then one per corner.
    pub fn gluing_table(&self) -> String {
        let g = &self.graph;
        let mut out = String::new();
        for r in &self.rectangles {
            let [t, h] = g.ends(r.edge);
            let _ = writeln!(
                out,
                "rect {} {} x {} from {} to {}",
                g.edge_name(r.edge),
                r.length,
                r.width,
                g.vertex_name(t),
                g.vertex_name(h)
            );
        }
        for c in &self.corners {
            let _ = writeln!(out, "glue {} {} {}", g.vertex_name(c.vertex), g.dart_name(c.from), g.dart_name(c.to));
        }
        out
    }
}

pub fn build_thickening(g: &Arc<RibbonGraph>, alpha: &Elastic, eps: &Q) -> Result<ThickenedComplex, ThickenError> {
    if !eps.is_positive() {
        return Err(ThickenError::NonPositive(eps.clone()));
    }
    let rectangles = (0..g.edge_count())
        .map(|e| Rectangle { edge: e, length: alpha.alpha(e).clone(), width: eps.clone() })
        .collect();
    let mut corners = Vec::new();
    for v in 0..g.vertex_count() {
        let rot = g.rotation(v);
        for (i, &h) in rot.iter().enumerate() {
            corners.push(Corner { vertex: v, from: h, to: rot[(i + 1) % rot.len()] });
        }
    }
    // walk the boundary: along the side of d into its head, across the
    // corner there, and out along the next rectangle
    let glue: HashMap<Dart, Dart> = corners.iter().map(|c| (c.from, c.to)).collect();
    let mut seen = vec![false; g.dart_count()];
    let mut boundary = Vec::new();
    for d in g.darts() {
        if seen[d.index()] {
            continue;
        }
        let mut walk = Vec::new();
        let mut x = d;
        while !seen[x.index()] {
            seen[x.index()] = true;
            walk.push(x);
            x = glue[&x.rev()];
        }
        boundary.push(walk);
    }
    let key = |ws: &[Vec<Dart>]| {
        let mut k: Vec<Vec<Dart>> = ws.iter().map(|w| canonical_oriented(w)).collect();
        k.sort();
        k
    };
    if key(&boundary) != key(&g.faces()) {
        return Err(ThickenError::BoundaryMismatch);
    }
    Ok(ThickenedComplex { graph: g.clone(), eps: eps.clone(), rectangles, corners, boundary })
}

/// Bounds on `ε·EL` of a simple multi-curve on the thickened surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThickeningBound {
    pub el_graph: Q,
    pub lower: Q,
    pub upper: Q,
    /// Area of the test annuli around the curve.
    pub annuli_area: Q,
    /// Shortest edge length.
    pub m: Q,
    pub eps: Q,
}

impl ThickeningBound {
    /// `1 + 8ε/m`.
    pub fn factor(&self) -> Q {
        thickening_factor(&self.eps, &self.m)
    }
}

pub fn thickening_factor(eps: &Q, m: &Q) -> Q {
    Q::one() + Q::from_integer(8.into()) * eps / m
}

pub fn thickening_bounds(
    g: &Arc<RibbonGraph>,
    alpha: &Elastic,
    c: &MultiCurve,
    eps: &Q,
) -> Result<ThickeningBound, ThickenError> {
    if !eps.is_positive() {
        return Err(ThickenError::NonPositive(eps.clone()));
    }
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) != 3) {
        return Err(ThickenError::NotTrivalent(g.vertex_name(v).to_string()));
    }
    let m = alpha.min_length();
    let half = &m / Q::from_integer(2.into());
    if *eps >= half {
        return Err(ThickenError::TooThick { eps: eps.clone(), half });
    }
    if !c.is_empty() && !is_simple(g, c).is_ribbon() {
        return Err(ThickenError::NotSimple);
    }
    let el = extremal_length(c, alpha)?;
    let upper = &el * thickening_factor(eps, &m);
    let two = Q::from_integer(2.into());
    let ten = Q::from_integer(10.into());
    let annuli_area: Q = c
        .edge_counts(g.edge_count())
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(e, &n)| {
            let n2 = Q::from_integer((n * n).into());
            &n2 * (alpha.alpha(e) - &two * eps) * eps + &ten * &n2 * eps * eps
        })
        .sum();
    debug_assert!(annuli_area <= eps * &upper);
    Ok(ThickeningBound { lower: el.clone(), el_graph: el, upper, annuli_area, m, eps: eps.clone() })
}

/// Widens a graph-side bracket `[lower, upper]` for the stretch factor into
/// the bracket it implies on the thickened surfaces.
pub fn surface_bracket(lower: &Q, upper: &Q, eps: &Q, m: &Q) -> (Q, Q) {
    let f = thickening_factor(eps, m);
    (lower / &f, upper * &f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;
    use crate::maps::tests::rose;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn theta(torus: bool) -> Arc<RibbonGraph> {
        let f = Dart::forward;
        let b = Dart::backward;
        let head = if torus { vec![b(0), b(1), b(2)] } else { vec![b(0), b(2), b(1)] };
        Arc::new(
            RibbonGraph::new(
                "theta",
                vec!["s".into(), "t".into()],
                vec![("a".into(), 0, 1), ("b".into(), 0, 1), ("c".into(), 0, 1)],
                vec![vec![f(1), f(2), f(0)], head],
            )
            .unwrap(),
        )
    }

    #[test]
    fn boundary_counts() {
        let eps = q(1, 10);
        let l = rose("loop", 1);
        assert_eq!(build_thickening(&l, &Elastic::uniform(&l), &eps).unwrap().boundary.len(), 2);
        for (torus, n) in [(false, 3), (true, 1)] {
            let g = theta(torus);
            let t = build_thickening(&g, &Elastic::uniform(&g), &eps).unwrap();
            assert_eq!(t.boundary.len(), n);
            assert_eq!(t.area(), q(3, 10));
        }
        assert!(matches!(build_thickening(&l, &Elastic::uniform(&l), &Q::zero()), Err(ThickenError::NonPositive(_))));
    }

    #[test]
    fn theta_bounds() {
        let g = theta(false);
        let alpha = Elastic::uniform(&g);
        let c = MultiCurve::parse(&g, "a ~b").unwrap();
        let b = thickening_bounds(&g, &alpha, &c, &q(1, 10)).unwrap();
        assert_eq!(b.lower, q(2, 1));
        assert_eq!(b.upper, q(18, 5));
        assert!(b.annuli_area <= &b.eps * &b.upper);
        let empty = thickening_bounds(&g, &alpha, &MultiCurve::empty(), &q(1, 10)).unwrap();
        assert!(empty.el_graph.is_zero() && empty.upper.is_zero() && empty.annuli_area.is_zero());
    }

    #[test]
    fn near_half_thickness() {
        let g = theta(false);
        let alpha = Elastic::uniform(&g);
        let c = MultiCurve::parse(&g, "a ~b").unwrap();
        let eps = q(2, 5);
        let b = thickening_bounds(&g, &alpha, &c, &eps).unwrap();
        // two edges, each n = 1
        assert_eq!(b.annuli_area, q(2, 1) * (q(1, 5) * q(2, 5) + q(10, 1) * q(4, 25)));
        assert!(b.annuli_area <= &eps * &b.upper);
        assert!(matches!(thickening_bounds(&g, &alpha, &c, &q(1, 2)), Err(ThickenError::TooThick { .. })));
    }

    #[test]
    fn refuses_bad_input() {
        let r = rose("r", 2);
        let c = MultiCurve::parse(&r, "a").unwrap();
        assert!(matches!(
            thickening_bounds(&r, &Elastic::uniform(&r), &c, &q(1, 10)),
            Err(ThickenError::NotTrivalent(_))
        ));
        let g = theta(false);
        let twice = MultiCurve::parse(&g, "a ~b a ~b a ~c").unwrap();
        assert!(matches!(
            thickening_bounds(&g, &Elastic::uniform(&g), &twice, &q(1, 10)),
            Err(ThickenError::NotSimple)
        ));
    }
}
