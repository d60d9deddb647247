//! Finite ordered trees in canonical preorder form.
//!
//! Nodes are numbered `0..n` in depth-first preorder with children visited in
//! their fixed order, so the root is always node `0`. Two trees are equal iff
//! they are isomorphic as ordered trees, and the parenthesis encoding
//! (`"(()(()))"`) is the canonical name of a tree.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("node {node} out of range for a tree with {len} nodes")]
    NodeOutOfRange { node: usize, len: usize },
    #[error("invalid tree structure: {0}")]
    Invalid(String),
}

/// A finite rooted tree with a linear order on the children of every node.
#[derive(Clone)]
pub struct OrderedTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    /// Number of nodes in the subtree rooted at each node.
    size: Vec<usize>,
    code: String,
}

impl OrderedTree {
    /// Builds a tree from a preorder parent array (`None` for the root).
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self, TreeError> {
        if parent.is_empty() {
            return Err(TreeError::Invalid("trees are non-empty".into()));
        }
        if parent[0].is_some() {
            return Err(TreeError::Invalid("node 0 must be the root".into()));
        }
        // The parent of each node must lie on the current rightmost branch.
        let mut stack = vec![0usize];
        for (v, p) in parent.iter().enumerate().skip(1) {
            let p = p.ok_or_else(|| TreeError::Invalid(format!("node {v} has no parent")))?;
            if p >= v {
                return Err(TreeError::Invalid(format!(
                    "parent {p} of node {v} does not precede it"
                )));
            }
            while stack.last().is_some_and(|&top| top != p) {
                stack.pop();
            }
            if stack.is_empty() {
                return Err(TreeError::Invalid(format!(
                    "node {v} breaks preorder (parent {p} is closed)"
                )));
            }
            stack.push(v);
        }
        Ok(Self::build(parent))
    }

    fn build(parent: Vec<Option<usize>>) -> Self {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        for v in 1..n {
            let p = parent[v].expect("validated");
            children[p].push(v);
            depth[v] = depth[p] + 1;
        }
        let mut size = vec![1; n];
        for v in (1..n).rev() {
            size[parent[v].expect("validated")] += size[v];
        }
        let mut code = String::with_capacity(2 * n);
        let mut stack: Vec<usize> = Vec::new();
        for v in 0..n {
            while let Some(&top) = stack.last() {
                if Some(top) == parent[v] {
                    break;
                }
                code.push(')');
                stack.pop();
            }
            code.push('(');
            stack.push(v);
        }
        for _ in stack {
            code.push(')');
        }
        OrderedTree {
            parent,
            children,
            depth,
            size,
            code,
        }
    }

    /// The one-node tree.
    pub fn single() -> Self {
        Self::build(vec![None])
    }

    /// The path `[m]`: a chain of `m` nodes.
    pub fn path(m: usize) -> Self {
        assert!(m >= 1, "paths are non-empty");
        Self::build((0..m).map(|v| v.checked_sub(1)).collect())
    }

    /// Parses the balanced-parenthesis format.
    pub fn decode(s: &str) -> Result<Self, TreeError> {
        if s.is_empty() {
            return Err(TreeError::Parse {
                position: 0,
                message: "empty string".into(),
            });
        }
        let mut parent = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut closed = false;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => {
                    if closed {
                        return Err(TreeError::Parse {
                            position: i,
                            message: "content after the outer pair".into(),
                        });
                    }
                    parent.push(stack.last().copied());
                    stack.push(parent.len() - 1);
                }
                ')' => {
                    if stack.pop().is_none() {
                        return Err(TreeError::Parse {
                            position: i,
                            message: "unmatched ')'".into(),
                        });
                    }
                    if stack.is_empty() {
                        closed = true;
                    }
                }
                other => {
                    return Err(TreeError::Parse {
                        position: i,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
        if !stack.is_empty() {
            return Err(TreeError::Parse {
                position: s.len(),
                message: format!("{} unclosed '('", stack.len()),
            });
        }
        Ok(Self::build(parent))
    }

    /// The canonical balanced-parenthesis string.
    pub fn encode(&self) -> &str {
        &self.code
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    /// Always false; trees have at least one node.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        0
    }

    /// The ≤-largest node, which is the last one in preorder.
    pub fn last(&self) -> usize {
        self.len() - 1
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    /// Leaves in ≤-order.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_leaf(v)).collect()
    }

    /// Every node has zero or two children.
    pub fn is_binary(&self) -> bool {
        self.children.iter().all(|c| c.is_empty() || c.len() == 2)
    }

    pub fn check_node(&self, v: usize) -> Result<(), TreeError> {
        if v < self.len() {
            Ok(())
        } else {
            Err(TreeError::NodeOutOfRange {
                node: v,
                len: self.len(),
            })
        }
    }

    /// Tree order: `a ⊑ b` iff `a` is a predecessor of `b` (or equal to it).
    pub fn is_predecessor(&self, a: usize, b: usize) -> bool {
        a <= b && b < a + self.size[a]
    }

    /// The ⊑-largest common predecessor of `v` and `w`.
    pub fn meet(&self, v: usize, w: usize) -> Result<usize, TreeError> {
        self.check_node(v)?;
        self.check_node(w)?;
        Ok(self.meet_unchecked(v, w))
    }

    pub(crate) fn meet_unchecked(&self, mut v: usize, mut w: usize) -> usize {
        while self.depth[v] > self.depth[w] {
            v = self.parent[v].expect("non-root");
        }
        while self.depth[w] > self.depth[v] {
            w = self.parent[w].expect("non-root");
        }
        while v != w {
            v = self.parent[v].expect("non-root");
            w = self.parent[w].expect("non-root");
        }
        v
    }

    /// The lexicographic order ≤_T. For canonical trees this is preorder
    /// index comparison; [`OrderedTree::lex_compare_by_definition`] evaluates
    /// the branch-based definition directly.
    pub fn lex_compare(&self, v: usize, w: usize) -> Result<Ordering, TreeError> {
        self.check_node(v)?;
        self.check_node(w)?;
        Ok(v.cmp(&w))
    }

    /// ≤_T from first principles: predecessors come first; otherwise compare
    /// the children of `v ∧ w` lying on the branches towards `v` and `w`.
    pub fn lex_compare_by_definition(&self, v: usize, w: usize) -> Result<Ordering, TreeError> {
        self.check_node(v)?;
        self.check_node(w)?;
        if v == w {
            return Ok(Ordering::Equal);
        }
        if self.is_predecessor(v, w) {
            return Ok(Ordering::Less);
        }
        if self.is_predecessor(w, v) {
            return Ok(Ordering::Greater);
        }
        let m = self.meet_unchecked(v, w);
        let branch = |mut x: usize| {
            while self.parent[x] != Some(m) {
                x = self.parent[x].expect("below the meet");
            }
            x
        };
        let (bv, bw) = (branch(v), branch(w));
        let kids = &self.children[m];
        let pos = |x| kids.iter().position(|&c| c == x).expect("child of meet");
        Ok(pos(bv).cmp(&pos(bw)))
    }

    /// `T^w`: the nodes `≤_T w`, which are exactly the preorder prefix `0..=w`.
    pub fn initial_segment(&self, w: usize) -> Result<OrderedTree, TreeError> {
        self.check_node(w)?;
        Ok(Self::build(self.parent[..=w].to_vec()))
    }
}

impl PartialEq for OrderedTree {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for OrderedTree {}

impl Hash for OrderedTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.code.hash(state);
    }
}

/// Trees are ordered by node count, then by canonical string.
impl Ord for OrderedTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.code.cmp(&other.code))
    }
}

impl PartialOrd for OrderedTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OrderedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

impl fmt::Debug for OrderedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrderedTree({})", self.code)
    }
}

impl FromStr for OrderedTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::decode(s)
    }
}

/// Canonical strings of all ordered forests with `nodes` nodes, memoized by size.
struct ForestTable {
    trees: Vec<Vec<String>>,
    forests: Vec<Vec<String>>,
}

impl ForestTable {
    fn new() -> Self {
        ForestTable {
            trees: vec![Vec::new()],
            forests: vec![vec![String::new()]],
        }
    }

    fn extend_to(&mut self, nodes: usize) {
        while self.trees.len() <= nodes {
            let n = self.trees.len();
            let mut trees: Vec<String> = self.forests[n - 1]
                .iter()
                .map(|f| format!("({f})"))
                .collect();
            trees.sort();
            self.trees.push(trees);
            let mut forests = Vec::new();
            for first in 1..=n {
                for t in &self.trees[first] {
                    for rest in &self.forests[n - first] {
                        forests.push(format!("{t}{rest}"));
                    }
                }
            }
            self.forests.push(forests);
        }
    }
}

/// All ordered trees with exactly `nodes` nodes, in canonical-string order.
pub fn trees_with_nodes(nodes: usize) -> Vec<OrderedTree> {
    if nodes == 0 {
        return Vec::new();
    }
    let mut table = ForestTable::new();
    table.extend_to(nodes);
    table.trees[nodes]
        .iter()
        .map(|s| OrderedTree::decode(s).expect("generated strings are balanced"))
        .collect()
}

/// Every ordered tree with at most `max_nodes` nodes, one per isomorphism
/// class, ordered by (node count, canonical string).
///
/// With `binary_leaves = Some(n)` only binary trees with `n` leaves are kept;
/// such trees have `2n - 1` nodes, so `max_nodes` must reach that to yield
/// all of them.
pub fn enumerate_trees(
    max_nodes: usize,
    binary_leaves: Option<usize>,
) -> impl Iterator<Item = OrderedTree> {
    (1..=max_nodes)
        .flat_map(trees_with_nodes)
        .filter(move |t| match binary_leaves {
            Some(n) => t.is_binary() && t.leaves().len() == n,
            None => true,
        })
}

/// Binary trees with exactly `leaves` leaves, built by splitting the leaves
/// between the two subtrees of the root. Canonical-string order.
pub fn binary_trees(leaves: usize) -> Vec<OrderedTree> {
    let mut memo: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    fn strings(k: usize, memo: &mut BTreeMap<usize, Vec<String>>) -> Vec<String> {
        if let Some(v) = memo.get(&k) {
            return v.clone();
        }
        let out = if k == 1 {
            vec!["()".to_string()]
        } else {
            let mut out = Vec::new();
            for left in 1..k {
                let ls = strings(left, memo);
                let rs = strings(k - left, memo);
                for l in &ls {
                    for r in &rs {
                        out.push(format!("({l}{r})"));
                    }
                }
            }
            out.sort();
            out
        };
        memo.insert(k, out.clone());
        out
    }
    if leaves == 0 {
        return Vec::new();
    }
    strings(leaves, &mut memo)
        .iter()
        .map(|s| OrderedTree::decode(s).expect("generated strings are balanced"))
        .collect()
}

/// A point of the norm poset: an ordered tree, compared by initial segments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormPoint(pub OrderedTree);

impl NormPoint {
    pub fn tree(&self) -> &OrderedTree {
        &self.0
    }
}

/// `a ≤ b` iff `a = b^w` for some node `w` of `b`. Since `b^w` has `w + 1`
/// nodes the only candidate is `w = |a| - 1`.
pub fn norm_leq(a: &OrderedTree, b: &OrderedTree) -> bool {
    a.len() <= b.len() && b.parents()[..a.len()] == *a.parents()
}
