//! Stallings folding, used to decide whether a graph map is onto on π1.

use std::collections::BTreeSet;

use crate::graph::{Dart, RibbonGraph, UnionFind};
use crate::maps::{GraphMap, MapError};

/// A letter of a free group: generator index and sign.
pub type Letter = (usize, bool);

/// Folded core graph of a finite set of words based at vertex 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Folded {
    pub generators: usize,
    pub vertices: usize,
    /// Labelled edges `(from, generator, to)`, sorted.
    pub edges: Vec<(usize, usize, usize)>,
}

impl Folded {
    /// Rank of the subgroup represented by the core graph.
    pub fn rank(&self) -> usize {
        if self.vertices == 0 {
            return 0;
        }
        self.edges.len() + 1 - self.vertices
    }

    /// Folded graph is the bouquet on all generators.
    pub fn is_whole_group(&self) -> bool {
        self.vertices == 1
            && self.edges.len() == self.generators
            && self.edges.iter().map(|e| e.1).collect::<BTreeSet<_>>().len() == self.generators
    }
}

/// Folds the wedge of the given loops, then trims hanging trees away from
/// the base vertex.
pub fn fold_words(generators: usize, words: &[Vec<Letter>]) -> Folded {
    let mut n = 1;
    let mut raw: Vec<(usize, usize, usize)> = Vec::new();
    for w in words {
        if w.is_empty() {
            continue;
        }
        let mut at = 0;
        for (i, &(g, pos)) in w.iter().enumerate() {
            let next = if i + 1 == w.len() {
                0
            } else {
                n += 1;
                n - 1
            };
            raw.push(if pos { (at, g, next) } else { (next, g, at) });
            at = next;
        }
    }
    let mut uf = UnionFind::new(n);
    loop {
        let mut edges: BTreeSet<(usize, usize, usize)> =
            raw.iter().map(|&(a, g, b)| (uf.find(a), g, uf.find(b))).collect();
        let mut merged = false;
        let mut out: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
        let mut inn: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
        for &(a, g, b) in &edges {
            if let Some(&b2) = out.get(&(a, g)) {
                if uf.union(b, b2) {
                    merged = true;
                }
            } else {
                out.insert((a, g), b);
            }
            if let Some(&a2) = inn.get(&(b, g)) {
                if uf.union(a, a2) {
                    merged = true;
                }
            } else {
                inn.insert((b, g), a);
            }
        }
        if !merged {
            // trim vertices of degree one other than the base
            let base = uf.find(0);
            loop {
                let mut deg: std::collections::BTreeMap<usize, usize> = Default::default();
                for &(a, _, b) in &edges {
                    *deg.entry(a).or_default() += 1;
                    *deg.entry(b).or_default() += 1;
                }
                let before = edges.len();
                edges.retain(|&(a, _, b)| {
                    let leaf = |v: usize| v != base && deg[&v] == 1;
                    !(leaf(a) || leaf(b))
                });
                if edges.len() == before {
                    break;
                }
            }
            let mut verts: BTreeSet<usize> = edges.iter().flat_map(|&(a, _, b)| [a, b]).collect();
            verts.insert(base);
            let mut ids: Vec<usize> = verts.into_iter().collect();
            ids.sort_by_key(|&v| (v != base, v));
            let relabel = |v: usize| ids.iter().position(|&x| x == v).expect("vertex");
            let mut e: Vec<_> = edges.iter().map(|&(a, g, b)| (relabel(a), g, relabel(b))).collect();
            e.sort();
            return Folded { generators, vertices: ids.len(), edges: e };
        }
    }
}

/// Generator index of each non-tree edge, or `None` for tree edges.
fn generator_indices(g: &RibbonGraph, tree: &[usize], comp_of: &[usize], comp: usize) -> Vec<Option<usize>> {
    let mut idx = vec![None; g.edge_count()];
    let mut k = 0;
    for e in 0..g.edge_count() {
        if comp_of[g.ends(e)[0]] == comp && !tree.contains(&e) {
            idx[e] = Some(k);
            k += 1;
        }
    }
    idx
}

fn word_letters(w: &[Dart], idx: &[Option<usize>]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for d in w {
        if let Some(gen) = idx[d.edge()] {
            let l = (gen, d.is_forward());
            if out.last() == Some(&(gen, !l.1)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
    }
    out
}

/// Result of the π1-surjectivity test.
#[derive(Clone, Debug)]
pub struct Surjectivity {
    pub surjective: bool,
    /// One folded graph per source component.
    pub folded: Vec<Folded>,
}

/// π1-surjectivity with spanning trees chosen greedily.
pub fn pi1_surjective(phi: &GraphMap) -> Result<Surjectivity, MapError> {
    pi1_surjective_with_trees(phi, &phi.source().spanning_tree(), &phi.target().spanning_tree())
}

/// Each source component must map onto π1 of its own target component, and
/// components must correspond bijectively.
pub fn pi1_surjective_with_trees(
    phi: &GraphMap,
    src_tree: &[usize],
    tgt_tree: &[usize],
) -> Result<Surjectivity, MapError> {
    let y = phi.source();
    let x = phi.target();
    let (ycomp, ny) = y.components();
    let (xcomp, nx) = x.components();
    let mut surjective = ny == nx;
    let mut hit = vec![false; nx];
    let mut folded = Vec::new();
    for c in 0..ny {
        let y0 = (0..y.vertex_count()).find(|&v| ycomp[v] == c).expect("component has a vertex");
        let x1 = phi.vertex_image(y0);
        let d = xcomp[x1];
        if hit[d] {
            surjective = false;
        }
        hit[d] = true;
        let x0 = (0..x.vertex_count()).find(|&v| xcomp[v] == d).expect("component has a vertex");
        let idx = generator_indices(x, tgt_tree, &xcomp, d);
        let gens = idx.iter().flatten().count();
        let to_x1 = x.tree_path(tgt_tree, x0, x1).ok_or(MapError::NotComposable)?;
        let mut words = Vec::new();
        for e in 0..y.edge_count() {
            if ycomp[y.ends(e)[0]] != c || src_tree.contains(&e) {
                continue;
            }
            let [t, h] = y.ends(e);
            let mut w = y.tree_path(src_tree, y0, t).ok_or(MapError::NotComposable)?;
            w.push(Dart::forward(e));
            w.extend(y.tree_path(src_tree, h, y0).ok_or(MapError::NotComposable)?);
            let mut img = to_x1.clone();
            img.extend(phi.word_image(&w));
            img.extend(crate::graph::invert_word(&to_x1));
            words.push(word_letters(&img, &idx));
        }
        let f = fold_words(gens, &words);
        surjective &= f.is_whole_group();
        folded.push(f);
    }
    Ok(Surjectivity { surjective, folded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::tests::rose;
    use std::sync::Arc;

    #[test]
    fn free_basis_is_whole_group() {
        let f = fold_words(2, &[vec![(0, true)], vec![(1, true)]]);
        assert!(f.is_whole_group());
        assert_eq!(f.rank(), 2);
    }

    #[test]
    fn squares_fold_to_index_two_subgroup() {
        let f = fold_words(1, &[vec![(0, true), (0, true)]]);
        assert!(!f.is_whole_group());
        assert_eq!(f.vertices, 2);
    }

    #[test]
    fn conjugates_fold_together() {
        // a, b a b^-1 generate only <a>^F conjugates; with b itself they give F2
        let a = (0, true);
        let b = (1, true);
        let bi = (1, false);
        let f = fold_words(2, &[vec![a], vec![b, a, bi]]);
        assert!(!f.is_whole_group());
        let g = fold_words(2, &[vec![a], vec![b, a, bi], vec![b, b]]);
        assert!(!g.is_whole_group());
        let h = fold_words(2, &[vec![b, a], vec![a]]);
        assert!(h.is_whole_group());
    }

    #[test]
    fn maps_between_roses() {
        let r2 = rose("r2", 2);
        let r1 = rose("r1", 1);
        let a = Dart::forward(0);
        let b = Dart::forward(1);
        let swap = GraphMap::new(r2.clone(), r2.clone(), vec![0], vec![vec![b], vec![a, b]]).unwrap();
        assert!(pi1_surjective(&swap).unwrap().surjective);
        let sq = GraphMap::new(r2.clone(), r2.clone(), vec![0], vec![vec![a, a], vec![b]]).unwrap();
        assert!(!pi1_surjective(&sq).unwrap().surjective);
        let onto_loop = GraphMap::new(r2, r1.clone(), vec![0], vec![vec![], vec![a]]).unwrap();
        assert!(pi1_surjective(&onto_loop).unwrap().surjective);
        let trivial = GraphMap::new(Arc::new(r1.renamed("s")), r1, vec![0], vec![vec![]]).unwrap();
        assert!(!pi1_surjective(&trivial).unwrap().surjective);
    }
}
