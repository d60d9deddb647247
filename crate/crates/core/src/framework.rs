//! Finite fragments of normed composition spaces and Ramsey domains.
//!
//! All operations are stored as explicit partial tables; a missing key means
//! "undefined". The concrete instance over sealed rigid surjections between
//! small canonical trees is built by [`build_tree_instance`].

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::{enumerate_rigid_surjections, truncate_map, TreeMap};
use crate::tree::{enumerate_trees, norm_leq, OrderedTree};
use crate::witness::{decide_witness_with, ColoringInstance, SearchOptions, WitnessError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameworkError {
    #[error("point {y} is not in the truncation of set {p}")]
    NotInTruncation { p: usize, y: usize },
    #[error("unknown set id {0}")]
    UnknownSet(usize),
    #[error("fragment too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

/// Point-level structure: `A`, `X`, multiplication, action, truncation and
/// norm into a finite poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionSpaceFragment {
    pub a_elems: Vec<String>,
    pub x_elems: Vec<String>,
    pub mult: BTreeMap<(usize, usize), usize>,
    pub act: BTreeMap<(usize, usize), usize>,
    pub trunc: Vec<usize>,
    pub norm: Vec<usize>,
    pub norm_labels: Vec<String>,
    /// `norm_order[i][j]` iff norm `i` ≤ norm `j`.
    pub norm_order: Vec<Vec<bool>>,
}

impl CompositionSpaceFragment {
    /// One point in `A` and `X`, acting trivially, with a single norm.
    pub fn one_point() -> Self {
        CompositionSpaceFragment {
            a_elems: vec!["e".into()],
            x_elems: vec!["e".into()],
            mult: BTreeMap::from([((0, 0), 0)]),
            act: BTreeMap::from([((0, 0), 0)]),
            trunc: vec![0],
            norm: vec![0],
            norm_labels: vec!["*".into()],
            norm_order: vec![vec![true]],
        }
    }

    pub fn act(&self, a: usize, x: usize) -> Option<usize> {
        self.act.get(&(a, x)).copied()
    }

    pub fn mult(&self, a: usize, b: usize) -> Option<usize> {
        self.mult.get(&(a, b)).copied()
    }

    fn norm_le(&self, x: usize, y: usize) -> bool {
        self.norm_order[self.norm[x]][self.norm[y]]
    }

    /// `ext[a][b]`: `b` extends `a`, i.e. wherever `a·x` is defined, `b·x`
    /// is defined and equal to it. Scans all of `X`.
    pub fn extends_table(&self) -> Vec<Vec<bool>> {
        let n = self.a_elems.len();
        let mut rows: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (&(a, x), &ax) in &self.act {
            rows[a].push((x, ax));
        }
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| rows[a].iter().all(|&(x, ax)| self.act(b, x) == Some(ax)))
                    .collect()
            })
            .collect()
    }
}

/// Set-level structure over a [`CompositionSpaceFragment`]. Sets are
/// identified by id; members are sorted element ids.
///
/// Distinct ids may share members (sets carry labels such as `(d, r)`), so
/// the truncation `∂P` is stored as an explicit id table rather than looked
/// up by members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamseyDomainFragment {
    pub f_sets: Vec<Vec<usize>>,
    pub f_labels: Vec<String>,
    pub p_sets: Vec<Vec<usize>>,
    pub p_labels: Vec<String>,
    /// Id of `∂P` for each `P`.
    pub p_trunc: Vec<usize>,
    pub set_mult: BTreeMap<(usize, usize), usize>,
    pub set_act: BTreeMap<(usize, usize), usize>,
}

impl RamseyDomainFragment {
    pub fn one_point() -> Self {
        RamseyDomainFragment {
            f_sets: vec![vec![0]],
            f_labels: vec!["{e}".into()],
            p_sets: vec![vec![0]],
            p_labels: vec!["{e}".into()],
            p_trunc: vec![0],
            set_mult: BTreeMap::from([((0, 0), 0)]),
            set_act: BTreeMap::from([((0, 0), 0)]),
        }
    }

    /// F sets acting on each P set, in F order.
    fn acting_on(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.p_sets.len()];
        for (&(f, p), &q) in &self.set_act {
            out[p].push((f, q));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// `a·(b·x) = (a·b)·x` whenever both sides are defined.
    ActionLaw,
    /// (i) `∂(a·x) = a·∂x` whenever `a·x` and `a·∂x` are defined.
    TruncationCommutes,
    /// (ii) `|∂x| ≤ |x|`.
    TruncationShrinksNorm,
    /// (iii) `|x| ≤ |y|` and `a·y` defined imply `a·x` defined and `|a·x| ≤ |a·y|`.
    ActionRespectsNorm,
    /// Set multiplication is computed pointwise.
    PointwiseMult,
    /// Set action is computed pointwise.
    PointwiseAct,
    /// (a) `F⦁(G⦁P)` defined implies `(F•G)⦁P` defined.
    Associativity,
    /// (b) `∂P ∈ 𝓟`.
    TruncationClosed,
    /// (c) `F⦁∂P` defined gives `G` acting on `P` whose members extend those of `F`.
    Extension,
    Vanishing,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    /// Number of cases inspected.
    pub cases: u64,
    /// Ids of the first failing tuple, in the order named by the axiom.
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    fn push(&mut self, axiom: Axiom, cases: u64, witness: Option<Vec<usize>>) {
        self.checks.push(AxiomCheck {
            axiom,
            passed: witness.is_none(),
            cases,
            witness,
        });
    }
}

/// Checks the action law and axioms (i)–(iii).
pub fn check_space_axioms(s: &CompositionSpaceFragment) -> AxiomReport {
    let mut report = AxiomReport::default();
    let n_a = s.a_elems.len();

    let mut cases = 0;
    let mut witness = None;
    'law: for (&(b, x), &bx) in &s.act {
        for a in 0..n_a {
            let (Some(lhs), Some(ab)) = (s.act(a, bx), s.mult(a, b)) else {
                continue;
            };
            let Some(rhs) = s.act(ab, x) else { continue };
            cases += 1;
            if lhs != rhs {
                witness = Some(vec![a, b, x]);
                break 'law;
            }
        }
    }
    report.push(Axiom::ActionLaw, cases, witness);

    let mut cases = 0;
    let mut witness = None;
    for (&(a, x), &ax) in &s.act {
        if let Some(a_dx) = s.act(a, s.trunc[x]) {
            cases += 1;
            if s.trunc[ax] != a_dx {
                witness = Some(vec![a, x]);
                break;
            }
        }
    }
    report.push(Axiom::TruncationCommutes, cases, witness);

    let witness = (0..s.x_elems.len())
        .find(|&x| !s.norm_le(s.trunc[x], x))
        .map(|x| vec![x]);
    report.push(Axiom::TruncationShrinksNorm, s.x_elems.len() as u64, witness);

    let mut cases = 0;
    let mut witness = None;
    'iii: for (&(a, y), &ay) in &s.act {
        for x in 0..s.x_elems.len() {
            if !s.norm_le(x, y) {
                continue;
            }
            cases += 1;
            match s.act(a, x) {
                Some(ax) if s.norm_le(ax, ay) => {}
                _ => {
                    witness = Some(vec![a, x, y]);
                    break 'iii;
                }
            }
        }
    }
    report.push(Axiom::ActionRespectsNorm, cases, witness);
    report
}

fn pointwise(table: &BTreeMap<(usize, usize), usize>, left: &[usize], right: &[usize]) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for &f in left {
        for &g in right {
            out.push(*table.get(&(f, g))?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Some(out)
}

fn truncate_set(s: &CompositionSpaceFragment, set: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = set.iter().map(|&x| s.trunc[x]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Checks pointwise-ness, (a)–(c), vanishing and linearity.
pub fn check_domain_axioms(s: &CompositionSpaceFragment, d: &RamseyDomainFragment) -> AxiomReport {
    let mut report = AxiomReport::default();

    let witness = d
        .set_mult
        .iter()
        .find(|(&(f, g), &h)| pointwise(&s.mult, &d.f_sets[f], &d.f_sets[g]).as_deref() != Some(&d.f_sets[h][..]))
        .map(|(&(f, g), &h)| vec![f, g, h]);
    report.push(Axiom::PointwiseMult, d.set_mult.len() as u64, witness);

    let witness = d
        .set_act
        .iter()
        .find(|(&(f, p), &q)| pointwise(&s.act, &d.f_sets[f], &d.p_sets[p]).as_deref() != Some(&d.p_sets[q][..]))
        .map(|(&(f, p), &q)| vec![f, p, q]);
    report.push(Axiom::PointwiseAct, d.set_act.len() as u64, witness);

    let acting = d.acting_on();
    let mut cases = 0;
    let mut witness = None;
    'a: for (&(g, p), &q) in &d.set_act {
        for &(f, _) in &acting[q] {
            cases += 1;
            let ok = d
                .set_mult
                .get(&(f, g))
                .is_some_and(|&fg| d.set_act.contains_key(&(fg, p)));
            if !ok {
                witness = Some(vec![f, g, p]);
                break 'a;
            }
        }
    }
    report.push(Axiom::Associativity, cases, witness);

    let witness = (0..d.p_sets.len())
        .find(|&p| {
            d.p_trunc
                .get(p)
                .and_then(|&dp| d.p_sets.get(dp))
                .is_none_or(|members| *members != truncate_set(s, &d.p_sets[p]))
        })
        .map(|p| vec![p]);
    report.push(Axiom::TruncationClosed, d.p_sets.len() as u64, witness);

    let ext = s.extends_table();
    let mut cases = 0;
    let mut witness = None;
    'c: for p in 0..d.p_sets.len() {
        let Some(&dp) = d.p_trunc.get(p).filter(|&&dp| dp < d.p_sets.len()) else {
            continue;
        };
        for &(f, _) in &acting[dp] {
            cases += 1;
            let found = acting[p].iter().any(|&(g, _)| {
                d.f_sets[f]
                    .iter()
                    .all(|&a| d.f_sets[g].iter().any(|&b| ext[a][b]))
            });
            if !found {
                witness = Some(vec![f, p]);
                break 'c;
            }
        }
    }
    report.push(Axiom::Extension, cases, witness);

    let witness = (0..d.p_sets.len())
        .find(|&p| vanishing_steps(s, &d.p_sets[p]).is_none())
        .map(|p| vec![p]);
    report.push(Axiom::Vanishing, d.p_sets.len() as u64, witness);

    let mut cases = 0;
    let mut witness = None;
    'lin: for (i, p) in d.p_sets.iter().enumerate() {
        for (j, &x) in p.iter().enumerate() {
            for &y in &p[j + 1..] {
                cases += 1;
                if !s.norm_le(x, y) && !s.norm_le(y, x) {
                    witness = Some(vec![i, x, y]);
                    break 'lin;
                }
            }
        }
    }
    report.push(Axiom::Linear, cases, witness);
    report
}

/// Least `t` with `∂^t P` a single point, if any.
pub fn vanishing_steps(s: &CompositionSpaceFragment, p: &[usize]) -> Option<usize> {
    let mut cur = p.to_vec();
    cur.sort_unstable();
    cur.dedup();
    for t in 0..=s.x_elems.len() {
        if cur.len() == 1 {
            return Some(t);
        }
        let next = truncate_set(s, &cur);
        if next == cur {
            return None;
        }
        cur = next;
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RVerdict {
    HoldsWith { f_set: usize },
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpVerdict {
    HoldsWith { f_set: usize, a: usize },
    Fails,
}

/// Coloring instance: smalls are `⋃_f f·P`, placements the elements `f`.
fn orbit_instance(
    s: &CompositionSpaceFragment,
    fs: &[usize],
    ps: &[usize],
    colors: usize,
) -> Result<ColoringInstance, WitnessError> {
    let images: Vec<Vec<usize>> = fs
        .iter()
        .map(|&f| {
            ps.iter()
                .map(|&x| s.act(f, x).expect("action defined on the whole set"))
                .collect()
        })
        .collect();
    let mut smalls: Vec<usize> = images.iter().flatten().copied().collect();
    smalls.sort_unstable();
    smalls.dedup();
    let pos: HashMap<usize, usize> = smalls.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let induced = images
        .iter()
        .map(|img| img.iter().map(|x| pos[x]).collect())
        .collect();
    ColoringInstance::new(
        smalls.iter().map(|&x| s.x_elems[x].clone()).collect(),
        fs.iter().map(|&f| s.a_elems[f].clone()).collect(),
        induced,
        colors,
    )
}

/// Condition (R) for one `P`: the first `F` in fragment order with `F⦁P`
/// defined such that every coloring of `F⦁P` has some `f ∈ F` with `f·P`
/// monochromatic.
pub fn check_r(
    s: &CompositionSpaceFragment,
    d: &RamseyDomainFragment,
    colors: usize,
    p: usize,
    opts: SearchOptions,
) -> Result<RVerdict, FrameworkError> {
    let ps = d.p_sets.get(p).ok_or(FrameworkError::UnknownSet(p))?;
    for (f, fs) in d.f_sets.iter().enumerate() {
        if !d.set_act.contains_key(&(f, p)) {
            continue;
        }
        let inst = orbit_instance(s, fs, ps, colors)?;
        if decide_witness_with(&inst, opts)?.is_witness() {
            return Ok(RVerdict::HoldsWith { f_set: f });
        }
    }
    Ok(RVerdict::Fails)
}

/// `P_y = {x ∈ P : ∂x = y}`.
pub fn fiber(s: &CompositionSpaceFragment, p: &[usize], y: usize) -> Vec<usize> {
    p.iter().copied().filter(|&x| s.trunc[x] == y).collect()
}

/// Condition (LP) for one `P` and `y ∈ ∂P`: the first `(F, a)` with `F⦁P`
/// and `a·y` defined such that every coloring of `F_a⦁P_y` has some
/// `f ∈ F_a` with `f·P_y` monochromatic.
pub fn check_lp(
    s: &CompositionSpaceFragment,
    d: &RamseyDomainFragment,
    colors: usize,
    p: usize,
    y: usize,
    opts: SearchOptions,
) -> Result<LpVerdict, FrameworkError> {
    let ext = s.extends_table();
    check_lp_with(s, d, &ext, colors, p, y, opts)
}

fn check_lp_with(
    s: &CompositionSpaceFragment,
    d: &RamseyDomainFragment,
    ext: &[Vec<bool>],
    colors: usize,
    p: usize,
    y: usize,
    opts: SearchOptions,
) -> Result<LpVerdict, FrameworkError> {
    let ps = d.p_sets.get(p).ok_or(FrameworkError::UnknownSet(p))?;
    let py = fiber(s, ps, y);
    if py.is_empty() {
        return Err(FrameworkError::NotInTruncation { p, y });
    }
    for (f, fs) in d.f_sets.iter().enumerate() {
        if !d.set_act.contains_key(&(f, p)) {
            continue;
        }
        for a in 0..s.a_elems.len() {
            if s.act(a, y).is_none() {
                continue;
            }
            let fa: Vec<usize> = fs.iter().copied().filter(|&g| ext[a][g]).collect();
            if fa.is_empty() {
                continue;
            }
            let inst = orbit_instance(s, &fa, &py, colors)?;
            if decide_witness_with(&inst, opts)?.is_witness() {
                return Ok(LpVerdict::HoldsWith { f_set: f, a });
            }
        }
    }
    Ok(LpVerdict::Fails)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpRRow {
    pub p: usize,
    pub fibers: usize,
    /// (LP) at every fiber of `P`.
    pub lp_all_fibers: bool,
    /// (LP) at every fiber of every `∂^k P`, the hypothesis the inductive
    /// argument actually consumes.
    pub lp_down_closed: bool,
    pub r: RVerdict,
}

/// Per-`P` comparison of (LP) at every fiber with (R).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpImpliesRReport {
    pub colors: usize,
    pub rows: Vec<LpRRow>,
    /// Sets where (LP) held at every fiber of every `∂^k P` but (R) failed,
    /// each with the number of `F` sets acting on it.
    pub violations: Vec<(usize, usize)>,
    /// Sets where (LP) held at the fibers of `P` itself but (R) failed; such
    /// a set has some `∂^k P` where (LP) fails inside the fragment.
    pub local_gaps: Vec<usize>,
    /// (LP) for every `P` and fiber, and (R) for every `P`.
    pub lp_everywhere: bool,
    pub r_everywhere: bool,
}

impl LpImpliesRReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && (!self.lp_everywhere || self.r_everywhere)
    }
}

/// Runs (LP) and (R) on every `P` of the fragment at `colors` colors.
pub fn lp_implies_r(
    s: &CompositionSpaceFragment,
    d: &RamseyDomainFragment,
    colors: usize,
    opts: SearchOptions,
) -> Result<LpImpliesRReport, FrameworkError> {
    let ext = s.extends_table();
    let acting = d.acting_on();
    let mut lp_all = Vec::with_capacity(d.p_sets.len());
    let mut fibers = Vec::with_capacity(d.p_sets.len());
    for (p, ps) in d.p_sets.iter().enumerate() {
        let ys = truncate_set(s, ps);
        let mut ok = true;
        for &y in &ys {
            if check_lp_with(s, d, &ext, colors, p, y, opts)? == LpVerdict::Fails {
                ok = false;
                break;
            }
        }
        lp_all.push(ok);
        fibers.push(ys.len());
    }
    let mut rows = Vec::with_capacity(d.p_sets.len());
    let mut violations = Vec::new();
    let mut local_gaps = Vec::new();
    for p in 0..d.p_sets.len() {
        let mut down = true;
        let mut q = p;
        for _ in 0..=d.p_sets.len() {
            down &= lp_all[q];
            let next = d.p_trunc[q];
            if next == q {
                break;
            }
            q = next;
        }
        let r = check_r(s, d, colors, p, opts)?;
        if r == RVerdict::Fails {
            if down {
                violations.push((p, acting[p].len()));
            } else if lp_all[p] {
                local_gaps.push(p);
            }
        }
        rows.push(LpRRow {
            p,
            fibers: fibers[p],
            lp_all_fibers: lp_all[p],
            lp_down_closed: down,
            r,
        });
    }
    let lp_everywhere = rows.iter().all(|r| r.lp_all_fibers);
    let r_everywhere = rows.iter().all(|r| r.r != RVerdict::Fails);
    Ok(LpImpliesRReport {
        colors,
        rows,
        violations,
        local_gaps,
        lp_everywhere,
        r_everywhere,
    })
}

/// The fragment of sealed rigid surjections between canonical trees with at
/// most `max_nodes` nodes.
#[derive(Debug, Clone)]
pub struct TreeInstance {
    pub max_nodes: usize,
    /// Canonical trees; doubles as the norm poset.
    pub trees: Vec<OrderedTree>,
    pub elements: Vec<TreeMap>,
    /// `(d, r)` tree ids for every set (shared by `F` and `P` ids).
    pub set_tags: Vec<(usize, usize)>,
    pub space: CompositionSpaceFragment,
    pub domain: RamseyDomainFragment,
}

/// Largest number of elements sharing a `(d, r)` pair before the power set
/// of the group is refused.
pub const MAX_GROUP: usize = 14;

/// Builds `A = X`, `·`, `∂` and `|·|` for sealed rigid surjections between
/// trees with at most `max_nodes` nodes.
///
/// `g·f` is defined when the domain of `f` is the initial segment `T^y` of
/// the codomain `T` of `g`, and equals `f ∘ g^y`. `∂f = f` when the codomain
/// is a single node and `f^v` at its second-largest node otherwise. `|f|` is
/// the domain of `f`.
pub fn build_tree_space(max_nodes: usize) -> (Vec<OrderedTree>, Vec<TreeMap>, CompositionSpaceFragment) {
    let trees: Vec<OrderedTree> = enumerate_trees(max_nodes, None).collect();
    let tree_id: HashMap<&OrderedTree, usize> = trees.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut elements = Vec::new();
    for dom in &trees {
        for img in &trees {
            elements.extend(enumerate_rigid_surjections(dom, img, true));
        }
    }
    let elem_id: HashMap<&TreeMap, usize> = elements.iter().enumerate().map(|(i, f)| (f, i)).collect();

    let mut mult = BTreeMap::new();
    for (gi, g) in elements.iter().enumerate() {
        for (fi, f) in elements.iter().enumerate() {
            if !norm_leq(f.source(), g.target()) {
                continue;
            }
            let y = f.source().last();
            let gy = truncate_map(g, y).expect("sealed maps are rigid");
            let gf = f.compose(&gy).expect("g^y lands in T^y = dom f");
            mult.insert((gi, fi), elem_id[&gf]);
        }
    }
    let trunc = elements
        .iter()
        .map(|f| {
            let s = f.target();
            if s.len() == 1 {
                elem_id[f]
            } else {
                let df = truncate_map(f, s.len() - 2).expect("sealed maps are rigid");
                elem_id[&df]
            }
        })
        .collect();
    let norm = elements.iter().map(|f| tree_id[f.source()]).collect();
    let norm_order = trees
        .iter()
        .map(|a| trees.iter().map(|b| norm_leq(a, b)).collect())
        .collect();
    let labels: Vec<String> = elements.iter().map(|f| f.to_string()).collect();
    let space = CompositionSpaceFragment {
        a_elems: labels.clone(),
        x_elems: labels,
        act: mult.clone(),
        mult,
        trunc,
        norm,
        norm_labels: trees.iter().map(|t| t.to_string()).collect(),
        norm_order,
    };
    (trees, elements, space)
}

/// The tree instance with its Ramsey domain: for every pair of trees
/// `(d, r)`, every non-empty set of elements with image `r` and domain an
/// initial segment of `d`. `F•G` is defined when `d(G) = r(F)` and `F⦁P`
/// when `d(P) = r(F)`.
pub fn build_tree_instance(max_nodes: usize) -> Result<TreeInstance, FrameworkError> {
    let (trees, elements, space) = build_tree_space(max_nodes);
    let tree_id: HashMap<&OrderedTree, usize> = trees.iter().enumerate().map(|(i, t)| (t, i)).collect();

    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut set_tags = Vec::new();
    let mut labels = Vec::new();
    for (di, d) in trees.iter().enumerate() {
        for ri in 0..trees.len() {
            let group: Vec<usize> = elements
                .iter()
                .enumerate()
                .filter(|(_, f)| tree_id[f.target()] == ri && norm_leq(f.source(), d))
                .map(|(i, _)| i)
                .collect();
            if group.len() > MAX_GROUP {
                return Err(FrameworkError::TooLarge(format!(
                    "{} elements with domain in {d} and image {}",
                    group.len(),
                    trees[ri]
                )));
            }
            for mask in 1u32..(1 << group.len()) {
                let members: Vec<usize> = group
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                labels.push(format!("d={d} r={} {{{}}}", trees[ri], join(&members)));
                sets.push(members);
                set_tags.push((di, ri));
            }
        }
    }
    let set_id: HashMap<(usize, usize, &[usize]), usize> = sets
        .iter()
        .zip(&set_tags)
        .enumerate()
        .map(|(i, (m, &(d, r)))| ((d, r, m.as_slice()), i))
        .collect();
    let mut by_d: Vec<Vec<usize>> = vec![Vec::new(); trees.len()];
    for (i, &(d, _)) in set_tags.iter().enumerate() {
        by_d[d].push(i);
    }
    let p_trunc = sets
        .iter()
        .zip(&set_tags)
        .map(|(members, &(d, r))| {
            let rt = &trees[r];
            let dr = if rt.len() == 1 { r } else { tree_id[&rt.initial_segment(rt.len() - 2).expect("node exists")] };
            set_id[&(d, dr, truncate_set(&space, members).as_slice())]
        })
        .collect();
    let mut set_act = BTreeMap::new();
    for (f, &(fd, fr)) in set_tags.iter().enumerate() {
        for &p in &by_d[fr] {
            let members = pointwise(&space.act, &sets[f], &sets[p]).expect("d(P) = r(F) makes the action total");
            let key = (fd, set_tags[p].1, members.as_slice());
            set_act.insert((f, p), set_id[&key]);
        }
    }
    let domain = RamseyDomainFragment {
        f_sets: sets.clone(),
        f_labels: labels.clone(),
        p_sets: sets,
        p_labels: labels,
        p_trunc,
        set_mult: set_act.clone(),
        set_act,
    };
    Ok(TreeInstance {
        max_nodes,
        trees,
        elements,
        set_tags,
        space,
        domain,
    })
}

fn join(ids: &[usize]) -> String {
    ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledId {
    pub id: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSet {
    pub id: usize,
    pub label: String,
    pub members: Vec<usize>,
}

/// Serialized form of a fragment: ids are positions, tables are sorted
/// arrays of triples `[left, right, value]` (pairs for unary maps).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentDump {
    pub a_elems: Vec<LabeledId>,
    pub x_elems: Vec<LabeledId>,
    pub norms: Vec<LabeledId>,
    pub norm_order: Vec<[usize; 2]>,
    pub mult: Vec<[usize; 3]>,
    pub act: Vec<[usize; 3]>,
    pub trunc: Vec<[usize; 2]>,
    pub norm: Vec<[usize; 2]>,
    pub f_sets: Vec<LabeledSet>,
    pub p_sets: Vec<LabeledSet>,
    pub p_trunc: Vec<[usize; 2]>,
    pub set_mult: Vec<[usize; 3]>,
    pub set_act: Vec<[usize; 3]>,
}

pub fn dump_fragment(s: &CompositionSpaceFragment, d: &RamseyDomainFragment) -> FragmentDump {
    let ids = |labels: &[String]| {
        labels
            .iter()
            .enumerate()
            .map(|(id, l)| LabeledId { id, label: l.clone() })
            .collect()
    };
    let sets = |sets: &[Vec<usize>], labels: &[String]| {
        sets.iter()
            .zip(labels)
            .enumerate()
            .map(|(id, (m, l))| LabeledSet {
                id,
                label: l.clone(),
                members: m.clone(),
            })
            .collect()
    };
    let triples = |t: &BTreeMap<(usize, usize), usize>| t.iter().map(|(&(a, b), &c)| [a, b, c]).collect();
    let mut norm_order = Vec::new();
    for (i, row) in s.norm_order.iter().enumerate() {
        for (j, &le) in row.iter().enumerate() {
            if le {
                norm_order.push([i, j]);
            }
        }
    }
    FragmentDump {
        a_elems: ids(&s.a_elems),
        x_elems: ids(&s.x_elems),
        norms: ids(&s.norm_labels),
        norm_order,
        mult: triples(&s.mult),
        act: triples(&s.act),
        trunc: s.trunc.iter().enumerate().map(|(x, &y)| [x, y]).collect(),
        norm: s.norm.iter().enumerate().map(|(x, &n)| [x, n]).collect(),
        f_sets: sets(&d.f_sets, &d.f_labels),
        p_sets: sets(&d.p_sets, &d.p_labels),
        p_trunc: d.p_trunc.iter().enumerate().map(|(p, &q)| [p, q]).collect(),
        set_mult: triples(&d.set_mult),
        set_act: triples(&d.set_act),
    }
}
