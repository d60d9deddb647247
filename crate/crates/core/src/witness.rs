//! Deciding whether an object is a Ramsey witness.
//!
//! An instance consists of small objects, placements, and for every
//! placement the set of small objects it induces. It is a witness at `c`
//! colors when every `c`-coloring of the small objects leaves some placement
//! with a monochromatic induced set. A *bad coloring* is one that makes every
//! induced set polychromatic; the engine searches for one.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::{enumerate_embeddings, enumerate_rigid_surjections, TreeMap};
use crate::partitions::{enumerate_partitions, is_subpartition, PartitionError, SetPartition};
use crate::tree::{enumerate_trees, OrderedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("search budget of {budget} nodes exhausted; verdict inconclusive")]
    BudgetExhausted { budget: u64 },
    #[error("naive enumeration needs {colorings} colorings, above the cap of {cap}")]
    CapExceeded { colorings: String, cap: u128 },
    #[error("no placements: {smalls} small objects but nothing to place")]
    EmptyPlacements { smalls: usize },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringInstance {
    smalls: Vec<String>,
    placements: Vec<String>,
    induced: Vec<Vec<usize>>,
    colors: usize,
}

impl ColoringInstance {
    /// `induced[p]` lists the small objects induced by placement `p`;
    /// duplicates are removed.
    pub fn new(
        smalls: Vec<String>,
        placements: Vec<String>,
        induced: Vec<Vec<usize>>,
        colors: usize,
    ) -> Result<Self, WitnessError> {
        if colors == 0 {
            return Err(WitnessError::Invalid("at least one color is required".into()));
        }
        if placements.len() != induced.len() {
            return Err(WitnessError::Invalid(format!(
                "{} placements but {} induced sets",
                placements.len(),
                induced.len()
            )));
        }
        if !placements.is_empty() && smalls.is_empty() {
            return Err(WitnessError::Invalid("placements without small objects".into()));
        }
        let mut clean = Vec::with_capacity(induced.len());
        for (p, mut set) in induced.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(WitnessError::Invalid(format!("placement {p} induces nothing")));
            }
            if let Some(&bad) = set.iter().find(|&&s| s >= smalls.len()) {
                return Err(WitnessError::Invalid(format!(
                    "placement {p} induces unknown small object {bad}"
                )));
            }
            clean.push(set);
        }
        Ok(ColoringInstance {
            smalls,
            placements,
            induced: clean,
            colors,
        })
    }

    pub fn smalls(&self) -> &[String] {
        &self.smalls
    }

    pub fn placements(&self) -> &[String] {
        &self.placements
    }

    pub fn induced(&self) -> &[Vec<usize>] {
        &self.induced
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn with_colors(&self, colors: usize) -> Result<Self, WitnessError> {
        Self::new(
            self.smalls.clone(),
            self.placements.clone(),
            self.induced.clone(),
            colors,
        )
    }

    /// The same instance with placement `p` removed.
    pub fn without_placement(&self, p: usize) -> Self {
        let mut out = self.clone();
        out.placements.remove(p);
        out.induced.remove(p);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Witness,
    NotWitness,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_micros: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessVerdict {
    pub verdict: Verdict,
    pub bad_coloring: Option<Vec<usize>>,
    pub stats: SearchStats,
}

impl WitnessVerdict {
    pub fn is_witness(&self) -> bool {
        self.verdict == Verdict::Witness
    }
}

/// True iff every placement of `inst` sees at least two colors under `coloring`.
pub fn verify_bad_coloring(inst: &ColoringInstance, coloring: &[usize]) -> bool {
    coloring.len() == inst.smalls.len()
        && coloring.iter().all(|&c| c < inst.colors)
        && inst.induced.iter().all(|set| {
            let c0 = coloring[set[0]];
            set.iter().any(|&s| coloring[s] != c0)
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Node limit for each top-level subtree of the search.
    pub budget: u64,
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 50_000_000,
            workers: 1,
        }
    }
}

/// Decides `inst` by depth-first search for a bad coloring. Single worker.
pub fn decide_witness(inst: &ColoringInstance, budget: u64) -> Result<WitnessVerdict, WitnessError> {
    decide_witness_with(inst, SearchOptions { budget, workers: 1 })
}

/// Depth of the deterministic frontier that is split between workers.
const SPLIT_DEPTH: usize = 3;

/// Decides `inst`, splitting the search below a fixed frontier.
///
/// Every frontier subtree is searched to completion or to its first bad
/// coloring, and the lexicographically least coloring found is reported, so
/// the result and the node count do not depend on `workers`.
pub fn decide_witness_with(inst: &ColoringInstance, opts: SearchOptions) -> Result<WitnessVerdict, WitnessError> {
    let start = Instant::now();
    let mut root = Dfs::new(inst);
    let mut frontier = Vec::new();
    let mut nodes = 0u64;
    let early = root.collect_frontier(SPLIT_DEPTH, &mut frontier, &mut nodes);

    let outcome = match early {
        Some(coloring) => Ok((Some(coloring), 0)),
        None => {
            let solve = |prefix: &Vec<(usize, usize)>| {
                let mut dfs = Dfs::new(inst);
                for &(s, c) in prefix {
                    let ok = dfs.step(s, c).is_some();
                    debug_assert!(ok, "frontier prefixes are consistent");
                }
                dfs.nodes = 0;
                let found = dfs.search(opts.budget);
                (found, dfs.nodes)
            };
            let results: Vec<(Result<Option<Vec<usize>>, ()>, u64)> = if opts.workers > 1 {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(opts.workers)
                    .build()
                    .map_err(|e| WitnessError::Invalid(format!("thread pool: {e}")))?;
                pool.install(|| frontier.par_iter().map(solve).collect())
            } else {
                frontier.iter().map(solve).collect()
            };
            let mut best: Option<Vec<usize>> = None;
            let mut exhausted = false;
            let mut sub_nodes = 0u64;
            for (res, n) in results {
                sub_nodes += n;
                match res {
                    Ok(Some(c)) => {
                        if best.as_ref().is_none_or(|b| c < *b) {
                            best = Some(c);
                        }
                    }
                    Ok(None) => {}
                    Err(()) => exhausted = true,
                }
            }
            if best.is_none() && exhausted {
                Err(WitnessError::BudgetExhausted { budget: opts.budget })
            } else {
                Ok((best, sub_nodes))
            }
        }
    };
    let (bad, sub_nodes) = outcome?;
    let stats = SearchStats {
        nodes: nodes + sub_nodes,
        elapsed_micros: start.elapsed().as_micros(),
    };
    if let Some(c) = &bad {
        assert!(
            verify_bad_coloring(inst, c),
            "search returned a coloring that leaves a placement monochromatic"
        );
    }
    Ok(WitnessVerdict {
        verdict: if bad.is_some() {
            Verdict::NotWitness
        } else {
            Verdict::Witness
        },
        bad_coloring: bad,
        stats,
    })
}

struct Dfs<'a> {
    inst: &'a ColoringInstance,
    /// Placements containing each small object.
    occurs: Vec<Vec<usize>>,
    color: Vec<Option<usize>>,
    /// First color seen in each placement.
    seen: Vec<Option<usize>>,
    dead: Vec<bool>,
    assigned: Vec<usize>,
    used: usize,
    trail: Vec<Undo>,
    nodes: u64,
}

enum Undo {
    Seen(usize),
    Dead(usize),
}

impl<'a> Dfs<'a> {
    fn new(inst: &'a ColoringInstance) -> Self {
        let mut occurs = vec![Vec::new(); inst.smalls.len()];
        for (p, set) in inst.induced.iter().enumerate() {
            for &s in set {
                occurs[s].push(p);
            }
        }
        Dfs {
            inst,
            occurs,
            color: vec![None; inst.smalls.len()],
            seen: vec![None; inst.induced.len()],
            dead: vec![false; inst.induced.len()],
            assigned: vec![0; inst.induced.len()],
            used: 0,
            trail: Vec::new(),
            nodes: 0,
        }
    }

    /// Colors `s` with `c`; false if some placement became fully colored
    /// and monochromatic. The caller must `unassign` either way.
    fn assign(&mut self, s: usize, c: usize) -> bool {
        self.color[s] = Some(c);
        let mut ok = true;
        for &p in &self.occurs[s] {
            self.assigned[p] += 1;
            if self.dead[p] {
                continue;
            }
            match self.seen[p] {
                None => {
                    self.seen[p] = Some(c);
                    self.trail.push(Undo::Seen(p));
                }
                Some(c0) if c0 != c => {
                    self.dead[p] = true;
                    self.trail.push(Undo::Dead(p));
                }
                Some(_) => {}
            }
            if !self.dead[p] && self.assigned[p] == self.inst.induced[p].len() {
                ok = false;
            }
        }
        ok
    }

    fn unassign(&mut self, s: usize, mark: usize) {
        self.color[s] = None;
        for &p in &self.occurs[s] {
            self.assigned[p] -= 1;
        }
        while self.trail.len() > mark {
            match self.trail.pop().expect("above mark") {
                Undo::Seen(p) => self.seen[p] = None,
                Undo::Dead(p) => self.dead[p] = false,
            }
        }
    }

    /// The unassigned small object in the most live placements, ties to the
    /// smallest index; `None` when no live placement remains.
    fn pick(&self) -> Option<usize> {
        let mut best = None;
        let mut best_count = 0;
        for s in 0..self.color.len() {
            if self.color[s].is_some() {
                continue;
            }
            let count = self.occurs[s].iter().filter(|&&p| !self.dead[p]).count();
            if count > best_count {
                best_count = count;
                best = Some(s);
            }
        }
        best
    }

    /// Colors to try for `s`: used colors plus one fresh one, minus colors
    /// that would complete a monochromatic placement.
    fn candidates(&self, s: usize) -> Vec<usize> {
        let limit = (self.used + 1).min(self.inst.colors);
        let mut allowed = vec![true; limit];
        for &p in &self.occurs[s] {
            if !self.dead[p] && self.assigned[p] + 1 == self.inst.induced[p].len() {
                if let Some(c0) = self.seen[p] {
                    if c0 < limit {
                        allowed[c0] = false;
                    }
                }
            }
        }
        (0..limit).filter(|&c| allowed[c]).collect()
    }

    fn coloring(&self) -> Vec<usize> {
        self.color.iter().map(|c| c.unwrap_or(0)).collect()
    }

    fn step(&mut self, s: usize, c: usize) -> Option<(usize, usize)> {
        self.nodes += 1;
        let mark = self.trail.len();
        let prev_used = self.used;
        if c == self.used {
            self.used += 1;
        }
        if self.assign(s, c) {
            Some((mark, prev_used))
        } else {
            self.unassign(s, mark);
            self.used = prev_used;
            None
        }
    }

    fn undo_step(&mut self, s: usize, (mark, prev_used): (usize, usize)) {
        self.unassign(s, mark);
        self.used = prev_used;
    }

    /// Explores the first `depth` branching levels, pushing the consistent
    /// partial assignments at that depth. Returns a bad coloring found above
    /// the frontier.
    fn collect_frontier(&mut self, depth: usize, out: &mut Vec<Vec<(usize, usize)>>, nodes: &mut u64) -> Option<Vec<usize>> {
        let mut prefix = Vec::new();
        let found = self.frontier_rec(depth, &mut prefix, out);
        *nodes += self.nodes;
        found
    }

    fn frontier_rec(
        &mut self,
        depth: usize,
        prefix: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) -> Option<Vec<usize>> {
        let Some(s) = self.pick() else {
            return Some(self.coloring());
        };
        if depth == 0 {
            out.push(prefix.clone());
            return None;
        }
        for c in self.candidates(s) {
            if let Some(undo) = self.step(s, c) {
                prefix.push((s, c));
                let found = self.frontier_rec(depth - 1, prefix, out);
                prefix.pop();
                self.undo_step(s, undo);
                if found.is_some() {
                    // Above the frontier the result is independent of workers,
                    // so stopping early keeps determinism.
                    out.clear();
                    return found;
                }
            }
        }
        None
    }

    fn search(&mut self, budget: u64) -> Result<Option<Vec<usize>>, ()> {
        let Some(s) = self.pick() else {
            return Ok(Some(self.coloring()));
        };
        for c in self.candidates(s) {
            if self.nodes >= budget {
                return Err(());
            }
            if let Some(undo) = self.step(s, c) {
                let found = self.search(budget);
                self.undo_step(s, undo);
                match found {
                    Ok(None) => {}
                    other => return other,
                }
            }
        }
        Ok(None)
    }
}

/// Tries every coloring in lexicographic order; the reference semantics for
/// [`decide_witness`].
pub fn naive_oracle(inst: &ColoringInstance, cap: u128) -> Result<WitnessVerdict, WitnessError> {
    let n = inst.smalls.len();
    let c = inst.colors as u128;
    let total = c.checked_pow(n as u32);
    match total {
        Some(t) if t <= cap => {}
        _ => {
            return Err(WitnessError::CapExceeded {
                colorings: total.map_or_else(|| format!("{c}^{n}"), |t| t.to_string()),
                cap,
            })
        }
    }
    let start = Instant::now();
    let mut coloring = vec![0usize; n];
    let mut tried = 0u64;
    loop {
        tried += 1;
        if verify_bad_coloring(inst, &coloring) {
            return Ok(WitnessVerdict {
                verdict: Verdict::NotWitness,
                bad_coloring: Some(coloring),
                stats: SearchStats {
                    nodes: tried,
                    elapsed_micros: start.elapsed().as_micros(),
                },
            });
        }
        // Mixed-radix increment, last position fastest.
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(WitnessVerdict {
                    verdict: Verdict::Witness,
                    bad_coloring: None,
                    stats: SearchStats {
                        nodes: tried,
                        elapsed_micros: start.elapsed().as_micros(),
                    },
                });
            }
            i -= 1;
            coloring[i] += 1;
            if coloring[i] < inst.colors {
                break;
            }
            coloring[i] = 0;
        }
    }
}

/// The Ramsey statement an instance is built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceSpec {
    /// Smalls are rigid surjections `U → S`, placements rigid surjections
    /// `g₀: U → T`, and `g₀` induces `{f ∘ g₀ : f: T → S rigid}`.
    DualTree {
        s: OrderedTree,
        t: OrderedTree,
        u: OrderedTree,
        sealed: bool,
    },
    /// Smalls are copies of `S` in `U`, placements copies of `T` in `U`.
    Leeb {
        s: OrderedTree,
        t: OrderedTree,
        u: OrderedTree,
    },
    /// Smalls are `k`-partitions of `[m]`, placements `l`-partitions, and a
    /// placement induces its `k`-subpartitions.
    Gr { k: usize, l: usize, m: usize },
    /// As [`InstanceSpec::Gr`] restricted to homogeneous partitions.
    GrHomogeneous { k: usize, l: usize, m: usize },
}

fn index_of<T: PartialEq>(items: &[T], x: &T) -> usize {
    items.iter().position(|y| y == x).expect("induced object is among the smalls")
}

/// Builds the coloring instance for `spec` at `colors` colors.
///
/// Fails with [`WitnessError::EmptyPlacements`] when there is nothing to
/// place, since no coloring can then be avoided.
pub fn build_instance(spec: &InstanceSpec, colors: usize) -> Result<ColoringInstance, WitnessError> {
    let (smalls, placements, induced) = match spec {
        InstanceSpec::DualTree { s, t, u, sealed } => {
            let smalls = enumerate_rigid_surjections(u, s, *sealed);
            let placements = enumerate_rigid_surjections(u, t, *sealed);
            let onto_s = enumerate_rigid_surjections(t, s, *sealed);
            let mut lookup = std::collections::HashMap::new();
            for (i, f) in smalls.iter().enumerate() {
                lookup.insert(f.clone(), i);
            }
            let induced = placements
                .iter()
                .map(|g0| {
                    onto_s
                        .iter()
                        .map(|f| {
                            let h = f.compose(g0).expect("g0 maps onto T");
                            *lookup.get(&h).expect("composites of rigid surjections are rigid")
                        })
                        .collect()
                })
                .collect();
            (label_maps(&smalls), label_maps(&placements), induced)
        }
        InstanceSpec::Leeb { s, t, u } => {
            let copies = |e: &[TreeMap]| {
                let mut sets: Vec<Vec<usize>> = e
                    .iter()
                    .map(|m| {
                        let mut img = m.images().to_vec();
                        img.sort_unstable();
                        img
                    })
                    .collect();
                sets.sort();
                sets.dedup();
                sets
            };
            let smalls = copies(&enumerate_embeddings(s, u));
            let placement_maps = enumerate_embeddings(t, u);
            let s_in_t = enumerate_embeddings(s, t);
            let mut seen = std::collections::BTreeMap::new();
            for e_t in &placement_maps {
                let mut copy = e_t.images().to_vec();
                copy.sort_unstable();
                seen.entry(copy).or_insert_with(|| e_t.clone());
            }
            let mut placements = Vec::new();
            let mut induced = Vec::new();
            for (copy, e_t) in &seen {
                placements.push(copy.clone());
                induced.push(
                    s_in_t
                        .iter()
                        .map(|e_s| {
                            let mut img = e_t.compose(e_s).expect("S → T → U").images().to_vec();
                            img.sort_unstable();
                            index_of(&smalls, &img)
                        })
                        .collect(),
                );
            }
            (label_sets(&smalls), label_sets(&placements), induced)
        }
        InstanceSpec::Gr { k, l, m } => gr_instance(*k, *l, *m, false)?,
        InstanceSpec::GrHomogeneous { k, l, m } => gr_instance(*k, *l, *m, true)?,
    };
    if placements.is_empty() {
        return Err(WitnessError::EmptyPlacements { smalls: smalls.len() });
    }
    ColoringInstance::new(smalls, placements, induced, colors)
}

type RawInstance = (Vec<String>, Vec<String>, Vec<Vec<usize>>);

fn gr_instance(k: usize, l: usize, m: usize, homogeneous: bool) -> Result<RawInstance, WitnessError> {
    if k == 0 || k > l {
        return Err(WitnessError::Invalid(format!("need 1 <= k <= l, got k = {k}, l = {l}")));
    }
    if homogeneous && !l.is_multiple_of(k) {
        // Merging l equal blocks into k equal groups needs k | l; otherwise
        // every placement would induce the empty set.
        return Err(WitnessError::Invalid(format!(
            "homogeneous {k}-subpartitions of a homogeneous {l}-partition need {k} to divide {l}"
        )));
    }
    let family = |j: usize| -> Result<Vec<SetPartition>, WitnessError> {
        if j > m {
            return Ok(Vec::new());
        }
        Ok(enumerate_partitions(m, j, homogeneous)?.partitions)
    };
    let smalls = family(k)?;
    let placements = family(l)?;
    let mut induced = Vec::with_capacity(placements.len());
    for q in &placements {
        let mut set = Vec::new();
        for (i, p) in smalls.iter().enumerate() {
            if is_subpartition(p, q)? {
                set.push(i);
            }
        }
        debug_assert!(!set.is_empty());
        induced.push((q.to_string(), set));
    }
    let (placement_labels, induced) = induced.into_iter().unzip();
    Ok((smalls.iter().map(|p| p.to_string()).collect(), placement_labels, induced))
}

fn label_maps(maps: &[TreeMap]) -> Vec<String> {
    maps.iter()
        .map(|f| f.images().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        .collect()
}

fn label_sets(sets: &[Vec<usize>]) -> Vec<String> {
    sets.iter()
        .map(|s| format!("{{{}}}", s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
        .collect()
}

/// Which family [`search_min_witness`] walks through.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchKind {
    DualTree { s: OrderedTree, t: OrderedTree, sealed: bool },
    Leeb { s: OrderedTree, t: OrderedTree },
    Gr { k: usize, l: usize },
    GrHomogeneous { k: usize, l: usize },
}

impl SearchKind {
    fn candidates(&self, max_size: usize) -> Vec<(String, InstanceSpec)> {
        match self {
            SearchKind::DualTree { s, t, sealed } => enumerate_trees(max_size, None)
                .map(|u| {
                    (
                        u.to_string(),
                        InstanceSpec::DualTree {
                            s: s.clone(),
                            t: t.clone(),
                            u,
                            sealed: *sealed,
                        },
                    )
                })
                .collect(),
            SearchKind::Leeb { s, t } => enumerate_trees(max_size, None)
                .map(|u| {
                    (
                        u.to_string(),
                        InstanceSpec::Leeb {
                            s: s.clone(),
                            t: t.clone(),
                            u,
                        },
                    )
                })
                .collect(),
            SearchKind::Gr { k, l } => (1..=max_size)
                .map(|m| (m.to_string(), InstanceSpec::Gr { k: *k, l: *l, m }))
                .collect(),
            SearchKind::GrHomogeneous { k, l } => (1..=max_size)
                .map(|m| (m.to_string(), InstanceSpec::GrHomogeneous { k: *k, l: *l, m }))
                .collect(),
        }
    }
}

/// What happened at one candidate of a minimal-witness search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateOutcome {
    NoPlacements,
    NotWitness(Vec<usize>),
    Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateLog {
    pub candidate: String,
    pub outcome: CandidateOutcome,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinWitnessReport {
    /// The first witness in candidate order with its verdict.
    pub found: Option<(String, WitnessVerdict)>,
    pub tried: Vec<CandidateLog>,
}

/// Walks candidates in canonical order (trees by node count and string,
/// partitions by `m`) and stops at the first witness.
pub fn search_min_witness(
    kind: &SearchKind,
    colors: usize,
    max_size: usize,
    opts: SearchOptions,
) -> Result<MinWitnessReport, WitnessError> {
    let mut tried = Vec::new();
    for (name, spec) in kind.candidates(max_size) {
        let inst = match build_instance(&spec, colors) {
            Ok(inst) => inst,
            Err(WitnessError::EmptyPlacements { .. }) => {
                tried.push(CandidateLog {
                    candidate: name,
                    outcome: CandidateOutcome::NoPlacements,
                    nodes: 0,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let verdict = decide_witness_with(&inst, opts)?;
        let nodes = verdict.stats.nodes;
        if verdict.is_witness() {
            tried.push(CandidateLog {
                candidate: name.clone(),
                outcome: CandidateOutcome::Witness,
                nodes,
            });
            return Ok(MinWitnessReport {
                found: Some((name, verdict)),
                tried,
            });
        }
        tried.push(CandidateLog {
            candidate: name,
            outcome: CandidateOutcome::NotWitness(verdict.bad_coloring.clone().unwrap_or_default()),
            nodes,
        });
    }
    Ok(MinWitnessReport { found: None, tried })
}
