//! Maps between ordered trees: morphisms, embeddings, rigid surjections and
//! their Galois adjoints.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::tree::{OrderedTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("image list has {got} entries but the source has {expected} nodes")]
    Arity { expected: usize, got: usize },
    #[error("image {image} of node {node} is not a node of the target ({len} nodes)")]
    ImageOutOfRange { node: usize, image: usize, len: usize },
    #[error("map is not a rigid surjection")]
    NotRigid,
    #[error("cannot compose: {0}")]
    Composition(String),
    #[error("malformed map text: {0}")]
    Syntax(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A function from the nodes of `source` to the nodes of `target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeMap {
    source: OrderedTree,
    target: OrderedTree,
    image: Vec<usize>,
}

impl TreeMap {
    pub fn new(source: OrderedTree, target: OrderedTree, image: Vec<usize>) -> Result<Self, MapError> {
        if image.len() != source.len() {
            return Err(MapError::Arity {
                expected: source.len(),
                got: image.len(),
            });
        }
        if let Some((node, &image)) = image.iter().enumerate().find(|(_, &i)| i >= target.len()) {
            return Err(MapError::ImageOutOfRange {
                node,
                image,
                len: target.len(),
            });
        }
        Ok(TreeMap {
            source,
            target,
            image,
        })
    }

    pub(crate) fn new_unchecked(source: OrderedTree, target: OrderedTree, image: Vec<usize>) -> Self {
        debug_assert_eq!(image.len(), source.len());
        TreeMap {
            source,
            target,
            image,
        }
    }

    pub fn identity(t: &OrderedTree) -> Self {
        Self::new_unchecked(t.clone(), t.clone(), (0..t.len()).collect())
    }

    /// Every node of `source` goes to the root of `target`.
    pub fn constant_root(source: &OrderedTree, target: &OrderedTree) -> Self {
        Self::new_unchecked(source.clone(), target.clone(), vec![0; source.len()])
    }

    pub fn source(&self) -> &OrderedTree {
        &self.source
    }

    pub fn target(&self) -> &OrderedTree {
        &self.target
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, v: usize) -> usize {
        self.image[v]
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &TreeMap) -> Result<TreeMap, MapError> {
        if inner.target != self.source {
            return Err(MapError::Composition(format!(
                "inner target {} differs from outer source {}",
                inner.target, self.source
            )));
        }
        Ok(Self::new_unchecked(
            inner.source.clone(),
            self.target.clone(),
            inner.image.iter().map(|&v| self.image[v]).collect(),
        ))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        self.image.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        for &v in &self.image {
            seen[v] = true;
        }
        seen.into_iter().all(|b| b)
    }

    /// Meet-preserving, ≤-monotone and root-to-root.
    pub fn is_morphism(&self) -> bool {
        let (s, t) = (&self.source, &self.target);
        if self.image[0] != t.root() {
            return false;
        }
        for v in 0..s.len() {
            for w in v..s.len() {
                let (ev, ew) = (self.image[v], self.image[w]);
                // v ≤ w in preorder, so monotone means ev ≤ ew.
                if ev > ew {
                    return false;
                }
                if self.image[s.meet_unchecked(v, w)] != t.meet_unchecked(ev, ew) {
                    return false;
                }
            }
        }
        true
    }

    /// An injective morphism.
    pub fn is_embedding(&self) -> bool {
        self.is_injective() && self.is_morphism()
    }

    /// Whether the fiber over the ≤-largest target node is exactly the
    /// ≤-largest source node.
    pub fn is_sealed(&self) -> bool {
        let top = self.target.last();
        let last = self.source.last();
        self.image
            .iter()
            .enumerate()
            .all(|(w, &v)| (v == top) == (w == last))
    }
}

impl fmt::Display for TreeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} : ", self.source, self.target)?;
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for TreeMap {
    type Err = MapError;

    /// `"T -> S : i0,i1,..."` with images listed by source preorder index.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (trees, list) = s
            .split_once(" : ")
            .ok_or_else(|| MapError::Syntax("missing ' : ' separator".into()))?;
        let (src, tgt) = trees
            .split_once(" -> ")
            .ok_or_else(|| MapError::Syntax("missing ' -> ' separator".into()))?;
        let source = OrderedTree::decode(src)?;
        let target = OrderedTree::decode(tgt)?;
        let image = list
            .split(',')
            .map(|x| {
                x.parse::<usize>()
                    .map_err(|_| MapError::Syntax(format!("bad image index {x:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        TreeMap::new(source, target, image)
    }
}

/// A pair `(f, e)` with `f: T → S` and `e: S → T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaloisPair {
    pub projection: TreeMap,
    pub section: TreeMap,
}

impl GaloisPair {
    /// Both clauses of the embedding-projection law, pointwise:
    /// `e(f(w)) ⊑ w` for all `w ∈ T` and `f(e(v)) = v` for all `v ∈ S`.
    pub fn verify(&self) -> bool {
        let (f, e) = (&self.projection, &self.section);
        if f.source != e.target || f.target != e.source {
            return false;
        }
        let t = &f.source;
        (0..t.len()).all(|w| t.is_predecessor(e.apply(f.apply(w)), w))
            && (0..f.target.len()).all(|v| f.apply(e.apply(v)) == v)
    }
}

pub fn galois_verify(p: &GaloisPair) -> bool {
    p.verify()
}

/// The unique morphism `e` making `(f, e)` an embedding-projection pair, if
/// one exists. `e(v)` is forced to be the ≤-least element of `f⁻¹(v)`.
pub fn rigid_adjoint(f: &TreeMap) -> Option<GaloisPair> {
    let s = f.target();
    let mut least = vec![None; s.len()];
    for (w, &v) in f.images().iter().enumerate() {
        least[v].get_or_insert(w);
    }
    let image = least.into_iter().collect::<Option<Vec<usize>>>()?;
    let section = TreeMap::new_unchecked(s.clone(), f.source().clone(), image);
    let pair = GaloisPair {
        projection: f.clone(),
        section,
    };
    (pair.section.is_morphism() && pair.verify()).then_some(pair)
}

pub fn is_rigid_surjection(f: &TreeMap) -> bool {
    rigid_adjoint(f).is_some()
}

/// All rigid surjections `t → s` in lexicographic order of image tuples.
///
/// Images are assigned in preorder. A value seen for the first time fixes
/// `e(v)` at the current node, which must extend the first-occurrence
/// sequence `0, 1, 2, ...` (monotonicity of `e`) and preserve meets with all
/// earlier first occurrences; a repeated value must have its first
/// occurrence ⊑ the current node.
pub fn enumerate_rigid_surjections(t: &OrderedTree, s: &OrderedTree, sealed_only: bool) -> Vec<TreeMap> {
    let mut out = Vec::new();
    if s.len() > t.len() {
        return out;
    }
    let mut image = Vec::with_capacity(t.len());
    let mut first = Vec::with_capacity(s.len());
    rs_dfs(t, s, sealed_only, &mut image, &mut first, &mut out);
    out
}

fn rs_dfs(
    t: &OrderedTree,
    s: &OrderedTree,
    sealed_only: bool,
    image: &mut Vec<usize>,
    first: &mut Vec<usize>,
    out: &mut Vec<TreeMap>,
) {
    let w = image.len();
    if w == t.len() {
        if first.len() == s.len() {
            out.push(TreeMap::new_unchecked(t.clone(), s.clone(), image.clone()));
        }
        return;
    }
    let remaining = t.len() - w;
    if s.len() - first.len() > remaining {
        return;
    }
    let top = s.last();
    let is_last = w == t.last();
    for v in 0..=first.len().min(s.len() - 1) {
        if sealed_only && ((v == top) != is_last) {
            continue;
        }
        if v < first.len() {
            if !t.is_predecessor(first[v], w) {
                continue;
            }
            image.push(v);
            rs_dfs(t, s, sealed_only, image, first, out);
            image.pop();
        } else {
            // At w = 0 the only candidate is v = 0, so the root goes to the root.
            let meets_ok = (0..v).all(|u| first[s.meet_unchecked(u, v)] == t.meet_unchecked(first[u], w));
            if !meets_ok {
                continue;
            }
            first.push(w);
            image.push(v);
            rs_dfs(t, s, sealed_only, image, first, out);
            image.pop();
            first.pop();
        }
    }
}

/// All embeddings `s → t`, in lexicographic order of image tuples.
pub fn enumerate_embeddings(s: &OrderedTree, t: &OrderedTree) -> Vec<TreeMap> {
    let mut out = Vec::new();
    if s.len() > t.len() {
        return out;
    }
    let mut image = vec![0usize];
    emb_dfs(s, t, &mut image, &mut out);
    out
}

fn emb_dfs(s: &OrderedTree, t: &OrderedTree, image: &mut Vec<usize>, out: &mut Vec<TreeMap>) {
    let v = image.len();
    if v == s.len() {
        out.push(TreeMap::new_unchecked(s.clone(), t.clone(), image.clone()));
        return;
    }
    // Injective and monotone means strictly increasing in preorder.
    let lo = image[v - 1] + 1;
    let hi = t.len() - (s.len() - v);
    for x in lo..=hi {
        if (0..v).all(|u| image[s.meet_unchecked(u, v)] == t.meet_unchecked(image[u], x)) {
            image.push(x);
            emb_dfs(s, t, image, out);
            image.pop();
        }
    }
}

/// `f^v`: the restriction of `f` to `T^{e(v)}`, as a map onto `S^v`.
pub fn truncate_map(f: &TreeMap, v: usize) -> Result<TreeMap, MapError> {
    f.target().check_node(v)?;
    let pair = rigid_adjoint(f).ok_or(MapError::NotRigid)?;
    let cut = pair.section.apply(v);
    Ok(TreeMap::new_unchecked(
        f.source().initial_segment(cut)?,
        f.target().initial_segment(v)?,
        f.images()[..=cut].to_vec(),
    ))
}

/// For an embedding `e: S → T`, the projection sending each node of `T` to
/// the node whose `e`-image is its deepest predecessor in `e(S)`, provided
/// that projection is a morphism forming an embedding-projection pair with `e`.
pub fn projection_for_embedding(e: &TreeMap) -> Option<GaloisPair> {
    if !e.is_embedding() {
        return None;
    }
    let (s, t) = (e.source(), e.target());
    let mut preimage = vec![None; t.len()];
    for (v, &x) in e.images().iter().enumerate() {
        preimage[x] = Some(v);
    }
    let mut proj = vec![0usize; t.len()];
    for w in 0..t.len() {
        proj[w] = match preimage[w] {
            Some(v) => v,
            None => proj[t.parent(w).expect("root is always in the image")],
        };
    }
    let projection = TreeMap::new_unchecked(t.clone(), s.clone(), proj);
    let pair = GaloisPair {
        projection,
        section: e.clone(),
    };
    (pair.projection.is_morphism() && pair.verify()).then_some(pair)
}

/// Every function from the nodes of `source` to the nodes of `target`, in
/// lexicographic order of image tuples.
pub fn all_maps<'a>(source: &'a OrderedTree, target: &'a OrderedTree) -> impl Iterator<Item = TreeMap> + 'a {
    let n = source.len();
    let k = target.len();
    let total = k.checked_pow(n as u32).expect("function space too large");
    (0..total).map(move |mut code| {
        let mut image = vec![0; n];
        for slot in image.iter_mut().rev() {
            *slot = code % k;
            code /= k;
        }
        TreeMap::new_unchecked(source.clone(), target.clone(), image)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{trees_with_nodes, enumerate_trees};

    fn t(s: &str) -> OrderedTree {
        OrderedTree::decode(s).unwrap()
    }

    fn map(source: &OrderedTree, target: &OrderedTree, image: &[usize]) -> TreeMap {
        TreeMap::new(source.clone(), target.clone(), image.to_vec()).unwrap()
    }

    #[test]
    fn morphism_examples() {
        for tree in enumerate_trees(4, None) {
            assert!(TreeMap::identity(&tree).is_morphism());
        }
        let two = OrderedTree::path(2);
        assert!(TreeMap::constant_root(&OrderedTree::single(), &two).is_morphism());
        // A constant map to the root satisfies all three conditions.
        assert!(TreeMap::constant_root(&two, &two).is_morphism());
        assert!(!TreeMap::constant_root(&two, &two).is_embedding());
        assert!(!map(&two, &two, &[1, 1]).is_morphism());
    }

    #[test]
    fn embedding_examples() {
        let two = OrderedTree::path(2);
        for m in 2..=6 {
            assert_eq!(enumerate_embeddings(&two, &OrderedTree::path(m)).len(), m - 1);
        }
        assert!(enumerate_embeddings(&t("(()())"), &OrderedTree::path(3)).is_empty());
        for tree in enumerate_trees(5, None) {
            assert_eq!(enumerate_embeddings(&tree, &tree), vec![TreeMap::identity(&tree)]);
        }
    }

    #[test]
    fn adjoint_examples() {
        let p3 = OrderedTree::path(3);
        let p2 = OrderedTree::path(2);
        let id = rigid_adjoint(&TreeMap::identity(&p3)).unwrap();
        assert_eq!(id.section, TreeMap::identity(&p3));

        let cherry = t("(()())");
        let constant = TreeMap::constant_root(&cherry, &OrderedTree::single());
        let pair = rigid_adjoint(&constant).unwrap();
        assert_eq!(pair.section.images(), &[0]);

        // Fibers {1}, {2, 3} in 1-based path labels.
        let f = map(&p3, &p2, &[0, 1, 1]);
        let pair = rigid_adjoint(&f).unwrap();
        assert_eq!(pair.section.images(), &[0, 1]);

        assert!(rigid_adjoint(&map(&p3, &p2, &[0, 0, 0])).is_none());
        assert!(rigid_adjoint(&map(&p3, &p2, &[1, 0, 1])).is_none());
    }

    #[test]
    fn galois_verify_examples() {
        let p3 = OrderedTree::path(3);
        let p2 = OrderedTree::path(2);
        assert!(GaloisPair {
            projection: TreeMap::identity(&p3),
            section: TreeMap::identity(&p3),
        }
        .verify());
        let single = OrderedTree::single();
        assert!(GaloisPair {
            projection: TreeMap::constant_root(&p3, &single),
            section: TreeMap::constant_root(&single, &p3),
        }
        .verify());
        let bad = GaloisPair {
            projection: map(&p3, &p2, &[0, 1, 1]),
            section: map(&p2, &p3, &[0, 2]),
        };
        assert!(!bad.verify());
    }

    #[test]
    fn path_counts_are_stirling_numbers() {
        let p = OrderedTree::path;
        assert_eq!(enumerate_rigid_surjections(&p(3), &p(2), false).len(), 3);
        assert_eq!(enumerate_rigid_surjections(&p(4), &p(2), false).len(), 7);
        assert_eq!(enumerate_rigid_surjections(&p(4), &p(3), false).len(), 6);
    }

    #[test]
    fn pruned_enumeration_matches_filtered_function_space() {
        for tn in 1..=5 {
            for sn in 1..=tn.min(4) {
                for src in trees_with_nodes(tn) {
                    for tgt in trees_with_nodes(sn) {
                        for sealed in [false, true] {
                            let naive: Vec<TreeMap> = all_maps(&src, &tgt)
                                .filter(|f| is_rigid_surjection(f) && (!sealed || f.is_sealed()))
                                .collect();
                            assert_eq!(
                                enumerate_rigid_surjections(&src, &tgt, sealed),
                                naive,
                                "{src} -> {tgt}, sealed = {sealed}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn self_and_point_surjections() {
        let single = OrderedTree::single();
        for tree in enumerate_trees(5, None) {
            assert_eq!(
                enumerate_rigid_surjections(&tree, &tree, false),
                vec![TreeMap::identity(&tree)]
            );
            assert_eq!(
                enumerate_rigid_surjections(&tree, &single, false),
                vec![TreeMap::constant_root(&tree, &single)]
            );
        }
    }

    #[test]
    fn truncation_examples() {
        let p3 = OrderedTree::path(3);
        let p2 = OrderedTree::path(2);
        let f = map(&p3, &p2, &[0, 1, 1]);
        assert_eq!(truncate_map(&f, 1).unwrap(), map(&p2, &p2, &[0, 1]));
        let root = truncate_map(&f, 0).unwrap();
        assert_eq!(root, TreeMap::identity(&OrderedTree::single()));
        let sealed = map(&p3, &p2, &[0, 0, 1]);
        assert_eq!(truncate_map(&sealed, 1).unwrap(), sealed);
        assert_eq!(truncate_map(&map(&p3, &p2, &[0, 0, 0]), 0), Err(MapError::NotRigid));
        assert!(truncate_map(&f, 2).is_err());
    }

    #[test]
    fn map_text_format() {
        let f: TreeMap = "((())) -> (()) : 0,1,1".parse().unwrap();
        assert_eq!(f, map(&OrderedTree::path(3), &OrderedTree::path(2), &[0, 1, 1]));
        assert_eq!(f.to_string(), "((())) -> (()) : 0,1,1");
        assert!("((())) -> (()) : 0,1".parse::<TreeMap>().is_err());
        assert!("((())) -> (()) : 0,2,1".parse::<TreeMap>().is_err());
        assert!("((()))->(()):0,1,1".parse::<TreeMap>().is_err());
        assert!("((())) -> (()) : 0, 1,1".parse::<TreeMap>().is_err());
    }
}
