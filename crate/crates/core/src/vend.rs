//! Virtual endomorphisms `(π, φ): Γ1 ⇉ Γ0` and their orbit-space towers.

use std::sync::Arc;

use thiserror::Error;

use crate::fold::pi1_surjective;
use crate::format::{GraphEntry, ParseError, Workspace};
use crate::graph::{canonical_oriented, Dart, Elastic, RibbonGraph};
use crate::maps::{pull_lengths, pullback_along, validate_covering, Covering, GraphMap, MapError};
use crate::ribbon::{is_ribbon_map, RibbonVerdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("unknown virtual endomorphism `{0}`")]
    Unknown(String),
    #[error("π is not a covering: {0}")]
    NotCovering(MapError),
    #[error("π and φ must share source and target")]
    Mismatch,
    #[error("φ is not a bijection on components")]
    NotPi0Bijective,
    #[error("φ is not surjective on π1")]
    NotPi1Surjective,
    #[error("φ is not a ribbon map: {0}")]
    NotRibbon(String),
    #[error("face name `{0}` is not a face of the pulled-back ribbon structure")]
    BadFaceName(String),
    #[error("`{0}` is not a spanning tree of Γ0")]
    BadTree(String),
    #[error("tower level {level} would have {edges} edges, over the cap of {cap}")]
    TowerCap { level: usize, edges: usize, cap: usize },
}

/// A validated virtual endomorphism with the ribbon structure of Γ1 pulled
/// back from Γ0 along π.
#[derive(Clone, Debug)]
pub struct VirtualEndomorphism {
    pub name: String,
    pub gamma0: GraphEntry,
    pub gamma1: GraphEntry,
    pub pi: Covering,
    pub phi: GraphMap,
    pub ribbon: RibbonVerdict,
    /// Whether the rotation written for Γ1 agreed with the pulled-back one.
    pub rotation_matched_input: bool,
    /// Spanning tree of Γ0 for automata, as edge indices.
    pub tree: Option<Vec<usize>>,
}

impl VirtualEndomorphism {
    pub fn degree(&self) -> usize {
        self.pi.degree()
    }
}

/// Rotation at each Γ1 vertex obtained by lifting the rotation below it.
pub fn pulled_back_rotation(pi: &Covering) -> Vec<Vec<Dart>> {
    let g0 = pi.target();
    (0..pi.source().vertex_count())
        .map(|v| {
            let x = pi.map().vertex_image(v);
            g0.rotation(x).iter().map(|&d| pi.lift_dart(v, d)).collect()
        })
        .collect()
}

pub fn validate_vend(ws: &Workspace, name: &str, budget: u64) -> Result<VirtualEndomorphism, VendError> {
    let v = ws.vend(name).ok_or_else(|| VendError::Unknown(name.to_string()))?;
    let g0 = ws.graph(&v.gamma0).expect("resolved at load").clone();
    let g1 = ws.graph(&v.gamma1).expect("resolved at load").clone();
    let pi = ws.map(&v.pi).expect("resolved at load").map.clone();
    let phi = ws.map(&v.phi).expect("resolved at load").map.clone();
    let tree = match &v.tree {
        None => None,
        Some(names) => {
            let mut t = Vec::new();
            for n in names {
                t.push(g0.graph.find_edge(n).ok_or_else(|| VendError::BadTree(n.clone()))?);
            }
            Some(t)
        }
    };
    validate_parts(name, g0, g1, pi, phi, tree, budget)
}

/// Checks every invariant and rebuilds Γ1's rotation from Γ0's.
pub fn validate_parts(
    name: &str,
    gamma0: GraphEntry,
    gamma1: GraphEntry,
    pi: GraphMap,
    phi: GraphMap,
    tree: Option<Vec<usize>>,
    budget: u64,
) -> Result<VirtualEndomorphism, VendError> {
    let same = |a: &RibbonGraph, b: &RibbonGraph| a == b;
    if !same(pi.source(), &gamma1.graph)
        || !same(phi.source(), &gamma1.graph)
        || !same(pi.target(), &gamma0.graph)
        || !same(phi.target(), &gamma0.graph)
    {
        return Err(VendError::Mismatch);
    }
    let cover = validate_covering(pi).map_err(VendError::NotCovering)?;
    let rotation = pulled_back_rotation(&cover);
    let matched = rotation
        .iter()
        .zip(gamma1.graph.rotations())
        .all(|(a, b)| canonical_oriented(a) == canonical_oriented(b));
    let g1 = Arc::new(gamma1.graph.with_rotation(rotation).map_err(MapError::from)?);
    let faces = g1.faces().iter().map(|f| canonical_oriented(f)).collect::<Vec<_>>();
    let mut face_names = Vec::new();
    for (n, w) in &gamma1.faces {
        if !faces.contains(&canonical_oriented(w)) {
            return Err(VendError::BadFaceName(n.clone()));
        }
        face_names.push((n.clone(), w.clone()));
    }
    let cover = validate_covering(cover.map().with_graphs(g1.clone(), gamma0.graph.clone())?)?;
    let phi = phi.with_graphs(g1.clone(), gamma0.graph.clone())?;
    let (c1, n1) = g1.components();
    let (c0, n0) = gamma0.graph.components();
    let mut hit = vec![None; n1];
    for v in 0..g1.vertex_count() {
        let img = c0[phi.vertex_image(v)];
        match hit[c1[v]] {
            None => hit[c1[v]] = Some(img),
            Some(x) if x != img => return Err(VendError::NotPi0Bijective),
            _ => {}
        }
    }
    let mut images: Vec<usize> = hit.into_iter().flatten().collect();
    images.sort_unstable();
    images.dedup();
    if n1 != n0 || images.len() != n0 {
        return Err(VendError::NotPi0Bijective);
    }
    if !pi1_surjective(&phi)?.surjective {
        return Err(VendError::NotPi1Surjective);
    }
    let ribbon = is_ribbon_map(&phi, budget);
    if let RibbonVerdict::NotRibbon(why) = &ribbon {
        return Err(VendError::NotRibbon(why.clone()));
    }
    if let Some(t) = &tree {
        if !gamma0.graph.is_spanning_tree(t) {
            let names: Vec<&str> = t.iter().map(|&e| gamma0.graph.edge_name(e)).collect();
            return Err(VendError::BadTree(names.join(" ")));
        }
    }
    let alpha1 = pull_lengths(&cover, &gamma0.alpha);
    let gamma1 = GraphEntry { graph: g1, alpha: alpha1, faces: face_names };
    Ok(VirtualEndomorphism {
        name: name.to_string(),
        gamma0,
        gamma1,
        pi: cover,
        phi,
        ribbon,
        rotation_matched_input: matched,
        tree,
    })
}

/// One orbit space `X_n` with its two maps to `X_0 = Γ0`.
#[derive(Clone, Debug)]
pub struct Level {
    pub graph: Arc<RibbonGraph>,
    pub alpha: Elastic,
    pub pi: Covering,
    pub phi: GraphMap,
    /// `X_n → X_{n−1}`; absent at level 0.
    pub step: Option<GraphMap>,
}

/// Default cap on the number of edges of any level.
pub const DEFAULT_TOWER_CAP: usize = 1_000_000;

/// Orbit spaces built incrementally: `X_n = X_{n−1} ×_{π_{n−1}, φ} Γ1`.
#[derive(Clone, Debug)]
pub struct Tower {
    gamma1_phi: GraphMap,
    gamma1_pi: Covering,
    levels: Vec<Level>,
    cap: usize,
}

impl Tower {
    pub fn new(v: &VirtualEndomorphism, cap: usize) -> Tower {
        let g0 = v.gamma0.graph.clone();
        let id = GraphMap::identity(g0.clone());
        let base = Level {
            graph: g0,
            alpha: v.gamma0.alpha.clone(),
            pi: validate_covering(id.clone()).expect("identity covers"),
            phi: id,
            step: None,
        };
        let one = Level {
            graph: v.gamma1.graph.clone(),
            alpha: v.gamma1.alpha.clone(),
            pi: v.pi.clone(),
            phi: v.phi.clone(),
            step: Some(v.phi.clone()),
        };
        Tower { gamma1_phi: v.phi.clone(), gamma1_pi: v.pi.clone(), levels: vec![base, one], cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Builds levels up to `n`.
    pub fn extend_to(&mut self, n: usize) -> Result<(), VendError> {
        while self.levels.len() <= n {
            let k = self.levels.len();
            let prev = &self.levels[k - 1];
            let edges = self.gamma1_phi.source().edge_count() * prev.pi.degree();
            if edges > self.cap {
                return Err(VendError::TowerCap { level: k, edges, cap: self.cap });
            }
            let pb = pullback_along(&prev.pi, &self.gamma1_phi)?;
            let pi = validate_covering(self.gamma1_pi.map().compose(pb.projection.map())?)?;
            let phi = prev.phi.compose(&pb.lifted)?;
            let alpha = pull_lengths(&pi, &self.levels[0].alpha);
            let graph = pb.graph.clone();
            self.levels.push(Level { graph, alpha, pi, phi, step: Some(pb.lifted) });
        }
        Ok(())
    }

    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// `φ_n^k: X_n → X_k`, the composite of steps.
    pub fn projection(&self, n: usize, k: usize) -> GraphMap {
        assert!(k <= n && n < self.levels.len());
        let mut m = GraphMap::identity(self.levels[n].graph.clone());
        for j in (k + 1..=n).rev() {
            let s = self.levels[j].step.as_ref().expect("step above level 0");
            m = s.compose(&m).expect("steps compose");
        }
        m
    }
}

/// Builds a tower through level `n` with the given edge cap.
pub fn iterate(v: &VirtualEndomorphism, n: usize, cap: usize) -> Result<Tower, VendError> {
    let mut t = Tower::new(v, cap);
    t.extend_to(n)?;
    Ok(t)
}
