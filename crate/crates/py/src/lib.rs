//! Python bindings: trees and tree maps as classes, the decision
//! procedures as functions returning plain dicts and lists.
//!
//! Input errors raise `ValueError`; exhausted search budgets and coloring
//! caps raise `RuntimeError`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::{json, Value};

use ramsey_forge::framework::{build_tree_instance, check_domain_axioms, check_space_axioms};
use ramsey_forge::fullsets::{self, Factor, FullSetError, PartialVector};
use ramsey_forge::maps::{self, TreeMap};
use ramsey_forge::moore::{self, Feasibility, MooreError, MooreProblem};
use ramsey_forge::tree::{self, OrderedTree};
use ramsey_forge::witness::{self, CandidateOutcome, InstanceSpec, SearchKind, SearchOptions, WitnessError};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (None, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(v).map_err(value_error)?)
}

fn parse_tree(code: &str) -> PyResult<OrderedTree> {
    OrderedTree::decode(code).map_err(value_error)
}

/// A canonical ordered tree, written as balanced parentheses.
#[pyclass(name = "Tree", frozen, skip_from_py_object, eq, hash, module = "ramsey_forge_py")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyTree(OrderedTree);

#[pymethods]
impl PyTree {
    #[new]
    fn new(code: &str) -> PyResult<Self> {
        parse_tree(code).map(PyTree)
    }

    #[staticmethod]
    fn single() -> Self {
        PyTree(OrderedTree::single())
    }

    #[staticmethod]
    fn path(nodes: usize) -> PyResult<Self> {
        if nodes == 0 {
            return Err(value_error("a path needs at least one node"));
        }
        Ok(PyTree(OrderedTree::path(nodes)))
    }

    /// Trees with at most `max_nodes` nodes by (size, string).
    #[staticmethod]
    #[pyo3(signature = (max_nodes, binary_leaves=None))]
    fn enumerate(max_nodes: usize, binary_leaves: Option<usize>) -> Vec<Self> {
        tree::enumerate_trees(max_nodes, binary_leaves).map(PyTree).collect()
    }

    #[staticmethod]
    fn binary(leaves: usize) -> Vec<Self> {
        tree::binary_trees(leaves).into_iter().map(PyTree).collect()
    }

    fn encode(&self) -> String {
        self.0.encode().to_string()
    }

    fn parents(&self) -> Vec<Option<usize>> {
        self.0.parents().to_vec()
    }

    fn children(&self, v: usize) -> PyResult<Vec<usize>> {
        self.0.check_node(v).map_err(value_error)?;
        Ok(self.0.children(v).to_vec())
    }

    fn leaves(&self) -> Vec<usize> {
        self.0.leaves()
    }

    fn is_binary(&self) -> bool {
        self.0.is_binary()
    }

    fn is_predecessor(&self, a: usize, b: usize) -> PyResult<bool> {
        self.0.check_node(a).and(self.0.check_node(b)).map_err(value_error)?;
        Ok(self.0.is_predecessor(a, b))
    }

    fn meet(&self, v: usize, w: usize) -> PyResult<usize> {
        self.0.meet(v, w).map_err(value_error)
    }

    /// -1, 0 or 1 by the lexicographic order of the tree.
    fn lex_compare(&self, v: usize, w: usize) -> PyResult<i8> {
        Ok(self.0.lex_compare(v, w).map_err(value_error)? as i8)
    }

    fn initial_segment(&self, w: usize) -> PyResult<Self> {
        self.0.initial_segment(w).map(PyTree).map_err(value_error)
    }

    /// Whether `self` is an initial segment of `other`.
    fn norm_leq(&self, other: &PyTree) -> bool {
        tree::norm_leq(&self.0, &other.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.encode()
    }

    fn __repr__(&self) -> String {
        format!("Tree('{}')", self.0)
    }
}

/// A map between two trees, given by the image of each node.
#[pyclass(name = "TreeMap", frozen, skip_from_py_object, eq, hash, module = "ramsey_forge_py")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyTreeMap(TreeMap);

#[pymethods]
impl PyTreeMap {
    #[new]
    fn new(source: &PyTree, target: &PyTree, images: Vec<usize>) -> PyResult<Self> {
        TreeMap::new(source.0.clone(), target.0.clone(), images)
            .map(PyTreeMap)
            .map_err(value_error)
    }

    /// Parses `"T -> S : i,j,..."`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(PyTreeMap).map_err(value_error)
    }

    fn source(&self) -> PyTree {
        PyTree(self.0.source().clone())
    }

    fn target(&self) -> PyTree {
        PyTree(self.0.target().clone())
    }

    fn images(&self) -> Vec<usize> {
        self.0.images().to_vec()
    }

    fn apply(&self, v: usize) -> PyResult<usize> {
        self.0.source().check_node(v).map_err(value_error)?;
        Ok(self.0.apply(v))
    }

    /// `self ∘ inner`.
    fn compose(&self, inner: &PyTreeMap) -> PyResult<Self> {
        self.0.compose(&inner.0).map(PyTreeMap).map_err(value_error)
    }

    fn is_morphism(&self) -> bool {
        self.0.is_morphism()
    }

    fn is_embedding(&self) -> bool {
        self.0.is_embedding()
    }

    fn is_sealed(&self) -> bool {
        self.0.is_sealed()
    }

    fn is_rigid_surjection(&self) -> bool {
        maps::is_rigid_surjection(&self.0)
    }

    /// The adjoint morphism back into the source, if `self` is rigid.
    fn rigid_adjoint(&self) -> Option<PyTreeMap> {
        maps::rigid_adjoint(&self.0).map(|p| PyTreeMap(p.section))
    }

    /// Restriction to the initial segment above the adjoint of `v`.
    fn truncate(&self, v: usize) -> PyResult<Self> {
        maps::truncate_map(&self.0, v).map(PyTreeMap).map_err(value_error)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("TreeMap('{}')", self.0)
    }
}

#[pyfunction]
#[pyo3(signature = (source, target, sealed=false))]
fn rigid_surjections(source: &PyTree, target: &PyTree, sealed: bool) -> Vec<PyTreeMap> {
    maps::enumerate_rigid_surjections(&source.0, &target.0, sealed)
        .into_iter()
        .map(PyTreeMap)
        .collect()
}

#[pyfunction]
fn embeddings(source: &PyTree, target: &PyTree) -> Vec<PyTreeMap> {
    maps::enumerate_embeddings(&source.0, &target.0)
        .into_iter()
        .map(PyTreeMap)
        .collect()
}

/// `k`-partitions of `[m]` as strings like `"1,3|2,4"`.
#[pyfunction]
#[pyo3(signature = (m, k, homogeneous=false))]
fn partitions(m: usize, k: usize, homogeneous: bool) -> PyResult<Vec<String>> {
    let list = ramsey_forge::partitions::enumerate_partitions(m, k, homogeneous).map_err(value_error)?;
    Ok(list.partitions.iter().map(|p| p.to_string()).collect())
}

fn witness_error(e: WitnessError) -> PyErr {
    match e {
        WitnessError::BudgetExhausted { .. } | WitnessError::CapExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        e => value_error(e),
    }
}

fn tree_param(name: &str, v: Option<&str>) -> PyResult<OrderedTree> {
    parse_tree(v.ok_or_else(|| value_error(format!("instance needs `{name}`")))?)
}

fn count_param(name: &str, v: Option<usize>) -> PyResult<usize> {
    v.ok_or_else(|| value_error(format!("instance needs `{name}`")))
}

/// Decides whether the candidate described by `instance` and its
/// parameters is a witness at `colors` colors.
#[pyfunction]
#[pyo3(signature = (instance, colors=2, s=None, t=None, u=None, k=None, l=None, m=None, sealed=false, budget=50_000_000, workers=1))]
#[allow(clippy::too_many_arguments)]
fn witness_check<'py>(
    py: Python<'py>,
    instance: &str,
    colors: usize,
    s: Option<&str>,
    t: Option<&str>,
    u: Option<&str>,
    k: Option<usize>,
    l: Option<usize>,
    m: Option<usize>,
    sealed: bool,
    budget: u64,
    workers: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = match instance {
        "dual-tree" => InstanceSpec::DualTree {
            s: tree_param("s", s)?,
            t: tree_param("t", t)?,
            u: tree_param("u", u)?,
            sealed,
        },
        "leeb" => InstanceSpec::Leeb {
            s: tree_param("s", s)?,
            t: tree_param("t", t)?,
            u: tree_param("u", u)?,
        },
        "gr" => InstanceSpec::Gr {
            k: count_param("k", k)?,
            l: count_param("l", l)?,
            m: count_param("m", m)?,
        },
        "gr-homogeneous" => InstanceSpec::GrHomogeneous {
            k: count_param("k", k)?,
            l: count_param("l", l)?,
            m: count_param("m", m)?,
        },
        other => return Err(value_error(format!("unknown instance {other:?}"))),
    };
    let value = match witness::build_instance(&spec, colors) {
        Err(WitnessError::EmptyPlacements { smalls }) => json!({
            "verdict": "not_witness",
            "bad_coloring": vec![0; smalls],
            "smalls": smalls,
            "placements": 0,
            "nodes": 0,
        }),
        Err(e) => return Err(witness_error(e)),
        Ok(inst) => {
            let opts = SearchOptions {
                budget,
                workers: workers.max(1),
            };
            let v = py
                .detach(|| witness::decide_witness_with(&inst, opts))
                .map_err(witness_error)?;
            json!({
                "verdict": v.verdict,
                "bad_coloring": v.bad_coloring,
                "smalls": inst.smalls(),
                "placements": inst.placements().len(),
                "nodes": v.stats.nodes,
            })
        }
    };
    to_py(py, &value)
}

/// Least witness among candidates up to `max_size`.
#[pyfunction]
#[pyo3(signature = (instance, max_size, colors=2, s=None, t=None, k=None, l=None, sealed=false, budget=50_000_000, workers=1))]
#[allow(clippy::too_many_arguments)]
fn witness_search<'py>(
    py: Python<'py>,
    instance: &str,
    max_size: usize,
    colors: usize,
    s: Option<&str>,
    t: Option<&str>,
    k: Option<usize>,
    l: Option<usize>,
    sealed: bool,
    budget: u64,
    workers: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = match instance {
        "dual-tree" => SearchKind::DualTree {
            s: tree_param("s", s)?,
            t: tree_param("t", t)?,
            sealed,
        },
        "leeb" => SearchKind::Leeb {
            s: tree_param("s", s)?,
            t: tree_param("t", t)?,
        },
        "gr" => SearchKind::Gr {
            k: count_param("k", k)?,
            l: count_param("l", l)?,
        },
        "gr-homogeneous" => SearchKind::GrHomogeneous {
            k: count_param("k", k)?,
            l: count_param("l", l)?,
        },
        other => return Err(value_error(format!("unknown instance {other:?}"))),
    };
    let opts = SearchOptions {
        budget,
        workers: workers.max(1),
    };
    let report = py
        .detach(|| witness::search_min_witness(&kind, colors, max_size, opts))
        .map_err(witness_error)?;
    let tried: Vec<Value> = report
        .tried
        .iter()
        .map(|c| {
            let (outcome, bad) = match &c.outcome {
                CandidateOutcome::NoPlacements => ("no_placements", None),
                CandidateOutcome::NotWitness(col) => ("not_witness", Some(col.clone())),
                CandidateOutcome::Witness => ("witness", None),
            };
            json!({ "candidate": c.candidate, "outcome": outcome, "bad_coloring": bad, "nodes": c.nodes })
        })
        .collect();
    let found = report.found.map(|(name, _)| name);
    to_py(py, &json!({ "found": found, "candidates_tried": tried }))
}

fn moore_error(e: MooreError) -> PyErr {
    match e {
        MooreError::CapExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        e => value_error(e),
    }
}

/// Sweeps every 2-coloring of the binary trees with `n` leaves.
#[pyfunction]
#[pyo3(signature = (m, n, cap=None, workers=1))]
fn moore_check<'py>(py: Python<'py>, m: usize, n: usize, cap: Option<u128>, workers: usize) -> PyResult<Bound<'py, PyAny>> {
    let cap = cap.unwrap_or_else(ramsey_forge::coloring_cap_from_env);
    let report = py
        .detach(|| moore::moore_check(m, n, cap, workers.max(1)))
        .map_err(moore_error)?;
    serialize(py, &report)
}

/// Exact `α` as rational strings for one coloring (indexed like
/// `Tree.binary(n)`), or `None` when infeasible.
#[pyfunction]
fn moore_feasibility(m: usize, n: usize, coloring: Vec<bool>) -> PyResult<Option<Vec<String>>> {
    let problem = MooreProblem::new(m, n).map_err(moore_error)?;
    Ok(match problem.feasibility(&coloring).map_err(moore_error)? {
        Feasibility::Feasible(alpha) => Some(alpha.iter().map(|a| a.to_string()).collect()),
        Feasibility::Infeasible => None,
    })
}

/// Graft tuples for `(m, n)` as lists of tree strings, in variable order.
#[pyfunction]
fn graft_tuples(m: usize, n: usize) -> Vec<Vec<String>> {
    moore::graft_tuples(m, n)
        .iter()
        .map(|u| u.parts().iter().map(|p| p.to_string()).collect())
        .collect()
}

fn fullset_error(e: FullSetError) -> PyErr {
    match e {
        FullSetError::CapExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        e => value_error(e),
    }
}

/// `(Z/p)^{n:l}` in text form, `·` marking undefined coordinates.
#[pyfunction]
fn partial_vectors(n: usize, l: usize, p: u8) -> PyResult<Vec<String>> {
    Ok(fullsets::enumerate_space(n, l, p)
        .map_err(fullset_error)?
        .iter()
        .map(|v| v.to_string())
        .collect())
}

/// A certificate dict `{h, a, a_r}` if the set is full, else `None`.
#[pyfunction]
fn is_full<'py>(py: Python<'py>, vectors: Vec<String>, n: usize, l: usize, p: u8) -> PyResult<Option<Bound<'py, PyAny>>> {
    let set = vectors
        .iter()
        .map(|v| PartialVector::parse(v, p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(fullset_error)?;
    if let Some(v) = set.iter().find(|v| v.n() != n) {
        return Err(value_error(format!("{v} does not have {n} coordinates")));
    }
    match fullsets::is_full(&set, n, l, p).map_err(fullset_error)? {
        Some(cert) => Ok(Some(serialize(py, &cert)?)),
        None => Ok(None),
    }
}

/// Sweeps all colorings of a product of `(p, l, n)` factors.
#[pyfunction]
#[pyo3(signature = (factors, colors=2, cap=None, workers=1))]
fn fullsets_check<'py>(
    py: Python<'py>,
    factors: Vec<(u8, usize, usize)>,
    colors: usize,
    cap: Option<u128>,
    workers: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let factors: Vec<Factor> = factors.into_iter().map(|(p, l, n)| Factor { p, l, n }).collect();
    let cap = cap.unwrap_or_else(ramsey_forge::coloring_cap_from_env);
    let report = py
        .detach(|| fullsets::fs_instance_check(&factors, colors, cap, workers.max(1)))
        .map_err(fullset_error)?;
    serialize(py, &report)
}

/// Checks every axiom on the sealed-surjection fragment.
#[pyfunction]
fn check_axioms<'py>(py: Python<'py>, max_nodes: usize) -> PyResult<Bound<'py, PyAny>> {
    if max_nodes == 0 {
        return Err(value_error("max_nodes must be at least 1"));
    }
    let inst = build_tree_instance(max_nodes).map_err(value_error)?;
    let space = check_space_axioms(&inst.space);
    let domain = check_domain_axioms(&inst.space, &inst.domain);
    let value = json!({
        "elements": inst.elements.len(),
        "sets": inst.domain.p_sets.len(),
        "all_passed": space.all_passed() && domain.all_passed(),
        "checks": space.checks.iter().chain(&domain.checks).collect::<Vec<_>>(),
    });
    to_py(py, &value)
}

#[pymodule]
fn ramsey_forge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTree>()?;
    m.add_class::<PyTreeMap>()?;
    m.add_function(wrap_pyfunction!(rigid_surjections, m)?)?;
    m.add_function(wrap_pyfunction!(embeddings, m)?)?;
    m.add_function(wrap_pyfunction!(partitions, m)?)?;
    m.add_function(wrap_pyfunction!(witness_check, m)?)?;
    m.add_function(wrap_pyfunction!(witness_search, m)?)?;
    m.add_function(wrap_pyfunction!(moore_check, m)?)?;
    m.add_function(wrap_pyfunction!(moore_feasibility, m)?)?;
    m.add_function(wrap_pyfunction!(graft_tuples, m)?)?;
    m.add_function(wrap_pyfunction!(partial_vectors, m)?)?;
    m.add_function(wrap_pyfunction!(is_full, m)?)?;
    m.add_function(wrap_pyfunction!(fullsets_check, m)?)?;
    m.add_function(wrap_pyfunction!(check_axioms, m)?)?;
    Ok(())
}
