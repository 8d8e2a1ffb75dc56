//! Python bindings: thin wrappers over `mdd-core` with the same names the
//! CLI uses. Every operation takes an explicit `cap` keyword (defaulting to
//! the crate-wide enumeration guard) and raises `ValueError` with the core
//! error message on any failure. Fractions cross the boundary as
//! `fractions.Fraction`, big naturals as `int`.

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mdd_core::formats::{load_document, save_document, InstanceDocument};
use mdd_core::games::{builtin_algorithm, builtin_algorithms, run_demand_game, run_value_game};
use mdd_core::valuation::{Cnf, PropertyReport, TypeDistribution};
use mdd_core::{instances, matroid, reduction, solvers, transforms};
use mdd_core::{ItemSet, Rational, DEFAULT_ENUM_CAP, DEFAULT_LP_CAP};

fn fail(e: mdd_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn set(members: Vec<usize>, ground_size: usize) -> PyResult<ItemSet> {
    ItemSet::new(members, ground_size).map_err(fail)
}

fn json_text(doc: &InstanceDocument) -> String {
    String::from_utf8(save_document(doc)).expect("canonical JSON is UTF-8")
}

fn parse(text: &str) -> PyResult<InstanceDocument> {
    load_document(text.as_bytes()).map_err(fail)
}

#[pyclass(frozen, eq, name = "Matroid")]
#[derive(PartialEq)]
struct PyMatroid {
    inner: matroid::Matroid,
}

#[pymethods]
impl PyMatroid {
    #[staticmethod]
    fn explicit(ground_size: usize, independent: Vec<Vec<usize>>) -> PyResult<Self> {
        let inner = matroid::Matroid::explicit(ground_size, independent).map_err(fail)?;
        Ok(PyMatroid { inner })
    }

    #[staticmethod]
    fn uniform(ground_size: usize, rank: usize) -> PyResult<Self> {
        let inner = matroid::Matroid::uniform(ground_size, rank).map_err(fail)?;
        Ok(PyMatroid { inner })
    }

    #[staticmethod]
    fn partition(ground_size: usize, blocks: Vec<Vec<usize>>, caps: Vec<usize>) -> PyResult<Self> {
        let inner = matroid::Matroid::partition(ground_size, blocks, caps).map_err(fail)?;
        Ok(PyMatroid { inner })
    }

    #[staticmethod]
    fn truncated(y: usize, inner: &PyMatroid) -> PyResult<Self> {
        let inner = matroid::Matroid::truncated(y, inner.inner.clone()).map_err(fail)?;
        Ok(PyMatroid { inner })
    }

    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn rank(&self, members: Vec<usize>) -> PyResult<usize> {
        let s = set(members, self.inner.ground_size())?;
        self.inner.rank(&s).map_err(fail)
    }

    /// `(holds, violation)` after exhaustively checking the three axioms.
    #[pyo3(signature = (cap = DEFAULT_ENUM_CAP))]
    fn verify_axioms(&self, cap: usize) -> PyResult<(bool, Option<String>)> {
        let report = matroid::verify_axioms(&self.inner, cap).map_err(fail)?;
        Ok((report.holds, report.violation.map(|v| format!("{v:?}"))))
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(frozen, eq, name = "Valuation")]
#[derive(PartialEq)]
struct PyValuation {
    inner: mdd_core::Valuation,
}

fn wrap_valuation(inner: mdd_core::Valuation) -> PyValuation {
    PyValuation { inner }
}

fn properties_dict<'py>(py: Python<'py>, report: &PropertyReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("normalized", report.normalized)?;
    d.set_item("monotone", report.monotone)?;
    d.set_item(
        "monotone_witness",
        report
            .monotone_witness
            .as_ref()
            .map(|w| (w.subset.members().to_vec(), w.superset.members().to_vec())),
    )?;
    d.set_item("submodular", report.submodular)?;
    d.set_item(
        "submodular_witness",
        report
            .submodular_witness
            .as_ref()
            .map(|w| (w.base.members().to_vec(), w.item, w.extra)),
    )?;
    d.set_item("trivial_items", report.trivial_items.clone())?;
    d.set_item("satisfies_assumptions", report.satisfies_assumptions())?;
    Ok(d)
}

#[pymethods]
impl PyValuation {
    #[staticmethod]
    fn additive(weights: Vec<u64>) -> PyResult<Self> {
        mdd_core::Valuation::additive(weights)
            .map(wrap_valuation)
            .map_err(fail)
    }

    #[staticmethod]
    fn cdemand(c: usize, weights: Vec<u64>) -> PyResult<Self> {
        mdd_core::Valuation::cdemand(c, weights)
            .map(wrap_valuation)
            .map_err(fail)
    }

    /// One row per item; entry `j` is the edge weight to right node `j`,
    /// zero meaning no edge.
    #[staticmethod]
    fn oxs(weights: Vec<Vec<u64>>) -> PyResult<Self> {
        mdd_core::Valuation::oxs(weights)
            .map(wrap_valuation)
            .map_err(fail)
    }

    #[staticmethod]
    fn matroid_based(matroid: &PyMatroid, weights: Vec<u64>) -> PyResult<Self> {
        mdd_core::Valuation::matroid_based(matroid.inner.clone(), weights)
            .map(wrap_valuation)
            .map_err(fail)
    }

    /// `values[mask]` is the value of the subset with that bitmask; the
    /// length fixes the ground size and must be a power of two.
    #[staticmethod]
    fn explicit_table(values: Vec<u64>) -> PyResult<Self> {
        mdd_core::Valuation::explicit_table(values)
            .map(wrap_valuation)
            .map_err(fail)
    }

    /// Base valuation plus one extra unit on half-size subsets encoding
    /// satisfying assignments of the clause list (DIMACS-style literals).
    #[staticmethod]
    fn sat_perturbed(base: &PyValuation, clauses: Vec<Vec<i32>>, num_vars: usize) -> PyResult<Self> {
        let cnf = Cnf::new(clauses, num_vars).map_err(fail)?;
        mdd_core::Valuation::sat_perturbed(base.inner.clone(), cnf, num_vars)
            .map(wrap_valuation)
            .map_err(fail)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse(text)?.into_valuation().map(wrap_valuation).map_err(fail)
    }

    fn to_json(&self) -> String {
        json_text(&InstanceDocument::Valuation(self.inner.clone()))
    }

    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    #[pyo3(signature = (members, cap = DEFAULT_ENUM_CAP))]
    fn value(&self, members: Vec<usize>, cap: usize) -> PyResult<u64> {
        let s = set(members, self.inner.ground_size())?;
        self.inner.value_with_cap(&s, cap).map_err(fail)
    }

    #[pyo3(signature = (cap = DEFAULT_ENUM_CAP))]
    fn value_table(&self, cap: usize) -> PyResult<Vec<u64>> {
        self.inner.value_table(cap).map_err(fail)
    }

    /// Lexicographically-least utility-maximizing subset at the prices.
    #[pyo3(signature = (prices, cap = DEFAULT_ENUM_CAP))]
    fn demand(&self, prices: Vec<Rational>, cap: usize) -> PyResult<Vec<usize>> {
        let s = self.inner.demand(&prices, cap).map_err(fail)?;
        Ok(s.members().to_vec())
    }

    #[pyo3(signature = (cap = DEFAULT_ENUM_CAP))]
    fn check_properties<'py>(&self, py: Python<'py>, cap: usize) -> PyResult<Bound<'py, PyDict>> {
        let report = self.inner.check_properties(cap).map_err(fail)?;
        properties_dict(py, &report)
    }

    fn scaled(&self, factor: u64) -> PyResult<Self> {
        transforms::scale(self.inner.clone(), factor)
            .map(wrap_valuation)
            .map_err(fail)
    }

    fn item_truncated(&self, y: usize) -> PyResult<Self> {
        transforms::item_truncate(self.inner.clone(), y)
            .map(wrap_valuation)
            .map_err(fail)
    }

    fn value_truncated(&self, x: u64) -> PyResult<Self> {
        transforms::value_truncate(self.inner.clone(), x)
            .map(wrap_valuation)
            .map_err(fail)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// Ground-disjoint sum of valuations on consecutive index blocks.
#[pyfunction]
fn disjoint_union(parts: Vec<PyRef<PyValuation>>) -> PyResult<PyValuation> {
    let parts: Vec<mdd_core::Valuation> = parts.iter().map(|p| p.inner.clone()).collect();
    transforms::disjoint_union(parts)
        .map(wrap_valuation)
        .map_err(fail)
}

/// Type `ell` (1-based) of the scaled-disjoint-union family over `(v, w)`.
#[pyfunction]
fn scaled_disjoint_union(
    v: &PyValuation,
    w: &PyValuation,
    k: usize,
    ell: usize,
) -> PyResult<PyValuation> {
    transforms::scaled_disjoint_union(&v.inner, &w.inner, k, ell)
        .map(wrap_valuation)
        .map_err(fail)
}

/// `(value, singleton_queries, marginal_queries)` of the counted greedy
/// truncated-value routine; exact on matroid-shaped valuations.
#[pyfunction]
#[pyo3(signature = (v, y, members, cap = DEFAULT_ENUM_CAP))]
fn fast_truncated_value(
    v: &PyValuation,
    y: usize,
    members: Vec<usize>,
    cap: usize,
) -> PyResult<(u64, usize, usize)> {
    let s = set(members, v.inner.ground_size())?;
    let (value, log) = transforms::fast_truncated_value(&v.inner, y, &s, cap).map_err(fail)?;
    Ok((value, log.singleton_queries, log.marginal_queries))
}

#[pyclass(frozen, eq, name = "TypeDistribution")]
#[derive(PartialEq)]
struct PyTypeDistribution {
    inner: TypeDistribution,
}

#[pymethods]
impl PyTypeDistribution {
    #[new]
    fn new(entries: Vec<(PyRef<PyValuation>, Rational)>) -> PyResult<Self> {
        let entries = entries
            .into_iter()
            .map(|(v, p)| (v.inner.clone(), p))
            .collect();
        TypeDistribution::new(entries)
            .map(|inner| PyTypeDistribution { inner })
            .map_err(fail)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse(text)?
            .into_distribution()
            .map(|inner| PyTypeDistribution { inner })
            .map_err(fail)
    }

    fn to_json(&self) -> String {
        json_text(&InstanceDocument::Distribution(self.inner.clone()))
    }

    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn entries(&self) -> Vec<(PyValuation, Rational)> {
        self.inner
            .entries()
            .iter()
            .map(|(v, p)| (wrap_valuation(v.clone()), p.clone()))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("TypeDistribution(k={})", self.inner.len())
    }
}

#[pyclass(frozen, name = "SadpInstance")]
struct PySadpInstance {
    inner: reduction::SadpInstance,
}

#[pymethods]
impl PySadpInstance {
    /// Hand-built instance without provenance; recovery refuses it, the
    /// solvers and checks accept it.
    #[new]
    fn new(valuations: Vec<PyRef<PyValuation>>) -> PyResult<Self> {
        let valuations = valuations.iter().map(|v| v.inner.clone()).collect();
        reduction::SadpInstance::new(valuations)
            .map(|inner| PySadpInstance { inner })
            .map_err(fail)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse(text)?
            .into_sadp_instance()
            .map(|inner| PySadpInstance { inner })
            .map_err(fail)
    }

    fn to_json(&self) -> String {
        json_text(&InstanceDocument::SadpInstance(self.inner.clone()))
    }

    fn k(&self) -> usize {
        self.inner.k()
    }

    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn valuations(&self) -> Vec<PyValuation> {
        self.inner
            .valuations()
            .iter()
            .map(|v| wrap_valuation(v.clone()))
            .collect()
    }

    /// `(construction, truncation, v, w)` of the builder that produced the
    /// instance, or None for hand-built ones. The construction uses the JSON
    /// tag: "item-truncation" or "value-truncation".
    fn provenance(&self) -> Option<(&'static str, u64, PyValuation, PyValuation)> {
        self.inner.provenance().map(|p| {
            let tag = match p.construction {
                reduction::Construction::ItemTruncation => "item-truncation",
                reduction::Construction::ValueTruncation => "value-truncation",
            };
            (
                tag,
                p.truncation,
                wrap_valuation(p.v.clone()),
                wrap_valuation(p.w.clone()),
            )
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "SadpInstance(k={}, ground_size={})",
            self.inner.k(),
            self.inner.ground_size()
        )
    }
}

#[pyclass(frozen, eq, name = "Witness")]
#[derive(PartialEq)]
struct PyWitness {
    inner: reduction::CompatibilityWitness,
}

#[pymethods]
impl PyWitness {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse(text)?
            .into_witness()
            .map(|inner| PyWitness { inner })
            .map_err(fail)
    }

    fn to_json(&self) -> String {
        json_text(&InstanceDocument::Witness(self.inner.clone()))
    }

    fn allocations(&self) -> Vec<Vec<usize>> {
        self.inner
            .allocations
            .iter()
            .map(|s| s.members().to_vec())
            .collect()
    }

    fn multipliers(&self) -> Vec<BigUint> {
        self.inner.multipliers.clone()
    }

    #[getter]
    fn c(&self) -> u64 {
        self.inner.c
    }

    #[getter]
    fn c1(&self) -> BigUint {
        self.inner.c1.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Witness(gaps={}, c={})",
            self.inner.allocations.len(),
            self.inner.c
        )
    }
}

#[pyclass(frozen, eq, name = "Menu")]
#[derive(PartialEq)]
struct PyMenu {
    inner: solvers::Menu,
}

#[pymethods]
impl PyMenu {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse(text)?
            .into_menu()
            .map(|inner| PyMenu { inner })
            .map_err(fail)
    }

    fn to_json(&self) -> String {
        json_text(&InstanceDocument::Menu(self.inner.clone()))
    }

    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn __len__(&self) -> usize {
        self.inner.entries().len()
    }

    /// One `(lottery, price)` per type, the lottery as
    /// `[(members, probability), ..]`.
    fn entries(&self) -> Vec<(Vec<(Vec<usize>, Rational)>, Rational)> {
        self.inner
            .entries()
            .iter()
            .map(|entry| {
                let lottery = entry
                    .lottery
                    .iter()
                    .map(|(s, p)| (s.members().to_vec(), p.clone()))
                    .collect();
                (lottery, entry.price.clone())
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Menu(entries={}, ground_size={})",
            self.inner.entries().len(),
            self.inner.ground_size()
        )
    }
}

#[pyclass(frozen, eq, name = "Transcript")]
#[derive(PartialEq)]
struct PyTranscript {
    inner: mdd_core::games::GameTranscript,
}

#[pymethods]
impl PyTranscript {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse(text)?
            .into_transcript()
            .map(|inner| PyTranscript { inner })
            .map_err(fail)
    }

    fn to_json(&self) -> String {
        json_text(&InstanceDocument::Transcript(self.inner.clone()))
    }

    #[getter]
    fn game(&self) -> String {
        self.inner.game.to_string()
    }

    #[getter]
    fn algorithm(&self) -> String {
        self.inner.algorithm.clone()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn x(&self) -> u64 {
        self.inner.x
    }

    #[getter]
    fn budget(&self) -> usize {
        self.inner.budget
    }

    #[getter]
    fn trials(&self) -> usize {
        self.inner.trials
    }

    #[getter]
    fn successes(&self) -> usize {
        self.inner.successes
    }

    #[getter]
    fn voided(&self) -> usize {
        self.inner.voided
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn query_counts(&self) -> Vec<usize> {
        self.inner.query_counts.clone()
    }

    #[getter]
    fn hidden_ranks(&self) -> Vec<u64> {
        self.inner.hidden_ranks.clone()
    }

    #[getter]
    fn bound(&self) -> Rational {
        self.inner.bound.clone()
    }

    fn empirical_rate(&self) -> Rational {
        self.inner.empirical_rate()
    }

    fn __repr__(&self) -> String {
        format!(
            "Transcript(game={}, algorithm={}, successes={}/{})",
            self.inner.game, self.inner.algorithm, self.inner.successes, self.inner.trials
        )
    }
}

/// Parses any document and returns the matching typed object.
#[pyfunction]
fn load_json(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let obj: Py<PyAny> = match parse(text)? {
        InstanceDocument::Valuation(inner) => Py::new(py, PyValuation { inner })?.into_any(),
        InstanceDocument::Distribution(inner) => {
            Py::new(py, PyTypeDistribution { inner })?.into_any()
        }
        InstanceDocument::SadpInstance(inner) => Py::new(py, PySadpInstance { inner })?.into_any(),
        InstanceDocument::Menu(inner) => Py::new(py, PyMenu { inner })?.into_any(),
        InstanceDocument::Witness(inner) => Py::new(py, PyWitness { inner })?.into_any(),
        InstanceDocument::Transcript(inner) => Py::new(py, PyTranscript { inner })?.into_any(),
    };
    Ok(obj)
}

// ---- hard instances ----

/// The complete-bipartite perturbable family on `m` items (m even):
/// `{"base", "m", "x", "y"}` with `base(S) = min(|S|, m/2)`.
#[pyfunction]
fn boxs_family(py: Python<'_>, m: usize) -> PyResult<Bound<'_, PyDict>> {
    let fam = instances::boxs_family(m).map_err(fail)?;
    let d = PyDict::new(py);
    d.set_item("base", Py::new(py, wrap_valuation(fam.base.clone()))?)?;
    d.set_item("m", fam.m)?;
    d.set_item("x", fam.x)?;
    d.set_item("y", fam.y)?;
    Ok(d)
}

/// The family's base lowered by one on exactly the hidden half-size set.
#[pyfunction]
fn perturb(m: usize, members: Vec<usize>) -> PyResult<PyValuation> {
    let fam = instances::boxs_family(m).map_err(fail)?;
    let s = set(members, m)?;
    instances::perturb(&fam, &s).map(wrap_valuation).map_err(fail)
}

/// 1-based rank of a half-size subset in lexicographic member-list order.
#[pyfunction]
fn subset_rank(m: usize, members: Vec<usize>) -> PyResult<u64> {
    let s = set(members, m)?;
    instances::subset_rank(m, &s).map_err(fail)
}

#[pyfunction]
fn subset_unrank(m: usize, rank: u64) -> PyResult<Vec<usize>> {
    let s = instances::subset_unrank(m, rank).map_err(fail)?;
    Ok(s.members().to_vec())
}

/// Monotone submodular four-item table whose two-item truncation is not
/// submodular.
#[pyfunction]
fn appendix_counterexample() -> PyValuation {
    wrap_valuation(instances::appendix_counterexample())
}

// ---- reduction ----

#[pyfunction]
fn build_it(v: &PyValuation, w: &PyValuation, k: usize) -> PyResult<PySadpInstance> {
    reduction::build_it(&v.inner, &w.inner, k)
        .map(|inner| PySadpInstance { inner })
        .map_err(fail)
}

#[pyfunction]
#[pyo3(signature = (v, w, k, cap = DEFAULT_ENUM_CAP))]
fn build_vt(v: &PyValuation, w: &PyValuation, k: usize, cap: usize) -> PyResult<PySadpInstance> {
    reduction::build_vt(&v.inner, &w.inner, k, cap)
        .map(|inner| PySadpInstance { inner })
        .map_err(fail)
}

#[pyfunction]
#[pyo3(signature = (members, inst, cap = DEFAULT_ENUM_CAP))]
fn recover_from_it(
    members: Vec<usize>,
    inst: &PySadpInstance,
    cap: usize,
) -> PyResult<(Vec<usize>, u64)> {
    let s = set(members, inst.inner.ground_size())?;
    let (solution, value) = reduction::recover_from_it(&s, &inst.inner, cap).map_err(fail)?;
    Ok((solution.members().to_vec(), value))
}

#[pyfunction]
#[pyo3(signature = (members, inst, cap = DEFAULT_ENUM_CAP))]
fn recover_from_vt(
    members: Vec<usize>,
    inst: &PySadpInstance,
    cap: usize,
) -> PyResult<(Vec<usize>, u64)> {
    let s = set(members, inst.inner.ground_size())?;
    let (solution, value) = reduction::recover_from_vt(&s, &inst.inner, cap).map_err(fail)?;
    Ok((solution.members().to_vec(), value))
}

/// `{"d", "gaps", "full_values"}`: how large the last type's total value is
/// against the smallest adjacent gap.
#[pyfunction]
#[pyo3(signature = (inst, cap = DEFAULT_ENUM_CAP))]
fn balancedness<'py>(
    py: Python<'py>,
    inst: &PySadpInstance,
    cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let report = reduction::balancedness(&inst.inner, cap).map_err(fail)?;
    let d = PyDict::new(py);
    d.set_item("d", report.d)?;
    d.set_item("gaps", report.gaps)?;
    d.set_item("full_values", report.full_values)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (v, w, k, cap = DEFAULT_ENUM_CAP))]
fn witness_for_it(v: &PyValuation, w: &PyValuation, k: usize, cap: usize) -> PyResult<PyWitness> {
    reduction::witness_for_it(&v.inner, &w.inner, k, cap)
        .map(|inner| PyWitness { inner })
        .map_err(fail)
}

/// `(holds, violation)`: replays the witness against the instance.
#[pyfunction]
#[pyo3(signature = (inst, witness, cap = DEFAULT_ENUM_CAP))]
fn check_c_compatibility(
    inst: &PySadpInstance,
    witness: &PyWitness,
    cap: usize,
) -> PyResult<(bool, Option<String>)> {
    let check = reduction::check_c_compatibility(&inst.inner, &witness.inner, cap).map_err(fail)?;
    let violation = if check.holds() {
        None
    } else {
        Some(format!("{check:?}"))
    };
    Ok((check.holds(), violation))
}

/// Approximation quality `alpha / (d (k - 1) + alpha)` carried through the
/// reduction.
#[pyfunction]
fn quality(alpha: Rational, d: Rational, k: usize) -> PyResult<Rational> {
    reduction::quality_formula(&alpha, &d, k).map_err(fail)
}

fn budget_dict<'py>(py: Python<'py>, b: reduction::HardnessBudget) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("k", b.k)?;
    d.set_item("items", b.items)?;
    d.set_item("support", b.support)?;
    d.set_item("bound", b.bound)?;
    Ok(d)
}

/// Types, items, support, and residual bound for ruling out an
/// `m^(1-eps)`-approximation at ground size `m`.
#[pyfunction]
fn hardness_budget(py: Python<'_>, m: usize, eps: Rational) -> PyResult<Bound<'_, PyDict>> {
    budget_dict(py, reduction::hardness_budget(m, &eps).map_err(fail)?)
}

/// Same budget pinned at an explicit type count `k`.
#[pyfunction]
fn hardness_budget_for_k(py: Python<'_>, m: usize, k: u64) -> PyResult<Bound<'_, PyDict>> {
    budget_dict(py, reduction::hardness_budget_for_k(m, k).map_err(fail)?)
}

// ---- solvers ----

#[pyfunction]
#[pyo3(signature = (v, w, cap = DEFAULT_ENUM_CAP))]
fn brute_force_odp(v: &PyValuation, w: &PyValuation, cap: usize) -> PyResult<(Vec<usize>, u64)> {
    let (s, value) = solvers::brute_force_odp(&v.inner, &w.inner, cap).map_err(fail)?;
    Ok((s.members().to_vec(), value))
}

/// `{"ratios", "best_index", "best_ratio"}` of a candidate solution against
/// every adjacent gap (best_index is 1-based).
#[pyfunction]
#[pyo3(signature = (inst, members, cap = DEFAULT_ENUM_CAP))]
fn sadp_eval<'py>(
    py: Python<'py>,
    inst: &PySadpInstance,
    members: Vec<usize>,
    cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let s = set(members, inst.inner.ground_size())?;
    let eval = solvers::sadp_eval(&inst.inner, &s, cap).map_err(fail)?;
    let d = PyDict::new(py);
    d.set_item("ratios", eval.ratios)?;
    d.set_item("best_index", eval.best_index)?;
    d.set_item("best_ratio", eval.best_ratio)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (inst, cap = DEFAULT_ENUM_CAP))]
fn sadp_opt(inst: &PySadpInstance, cap: usize) -> PyResult<(Vec<usize>, Rational)> {
    let (s, ratio) = solvers::sadp_opt(&inst.inner, cap).map_err(fail)?;
    Ok((s.members().to_vec(), ratio))
}

/// Exact revenue-optimal lottery menu by rational LP: `(menu, revenue)`.
#[pyfunction]
#[pyo3(signature = (dist, cap = DEFAULT_LP_CAP))]
fn lp_optimal_mdmdp(dist: &PyTypeDistribution, cap: usize) -> PyResult<(PyMenu, Rational)> {
    let (menu, revenue) = solvers::lp_optimal_mdmdp(&dist.inner, cap).map_err(fail)?;
    Ok((PyMenu { inner: menu }, revenue))
}

/// Best deterministic grand-bundle price: `(price, revenue)`.
#[pyfunction]
#[pyo3(signature = (dist, cap = DEFAULT_ENUM_CAP))]
fn best_posted_price(dist: &PyTypeDistribution, cap: usize) -> PyResult<(Rational, Rational)> {
    solvers::best_posted_price(&dist.inner, cap).map_err(fail)
}

/// `{"menu", "revenue", "target", "bound"}` for the grand-bundle menu
/// targeting the best single type; revenue is at least a 1/k fraction of
/// the optimum.
#[pyfunction]
#[pyo3(signature = (dist, cap = DEFAULT_ENUM_CAP))]
fn trivial_bundle_menu<'py>(
    py: Python<'py>,
    dist: &PyTypeDistribution,
    cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let bundle = solvers::trivial_bundle_menu(&dist.inner, cap).map_err(fail)?;
    let d = PyDict::new(py);
    d.set_item("menu", Py::new(py, PyMenu { inner: bundle.menu })?)?;
    d.set_item("revenue", bundle.revenue)?;
    d.set_item("target", bundle.target)?;
    d.set_item("bound", bundle.bound)?;
    Ok(d)
}

/// `{"revenue", "max_ic_violation", "max_ir_violation", "clean"}`; both
/// violations are exactly zero on a feasible menu.
#[pyfunction]
#[pyo3(signature = (dist, menu, cap = DEFAULT_ENUM_CAP))]
fn verify_menu<'py>(
    py: Python<'py>,
    dist: &PyTypeDistribution,
    menu: &PyMenu,
    cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let audit = solvers::verify_menu(&dist.inner, &menu.inner, cap).map_err(fail)?;
    let d = PyDict::new(py);
    d.set_item("clean", audit.clean())?;
    d.set_item("revenue", audit.revenue)?;
    d.set_item("max_ic_violation", audit.max_ic_violation)?;
    d.set_item("max_ir_violation", audit.max_ir_violation)?;
    Ok(d)
}

// ---- games ----

/// Exact success ceiling `s/x + 1/(x - s)` for `s` queries against `x`
/// hidden candidates.
#[pyfunction]
fn theoretical_bound(s: u64, x: u64) -> PyResult<Rational> {
    mdd_core::games::theoretical_bound(s, x).map_err(fail)
}

/// Names of the built-in oracle algorithms.
#[pyfunction]
fn algorithms() -> Vec<String> {
    builtin_algorithms()
        .iter()
        .map(|a| a.name().to_string())
        .collect()
}

/// Plays `trials` hidden-perturbation rounds of the `"value"` or `"demand"`
/// game and returns the reproducible transcript.
#[pyfunction]
#[pyo3(signature = (game, algorithm, m, budget, trials, seed, cap = DEFAULT_ENUM_CAP))]
fn run_game(
    game: &str,
    algorithm: &str,
    m: usize,
    budget: usize,
    trials: usize,
    seed: u64,
    cap: usize,
) -> PyResult<PyTranscript> {
    let alg = builtin_algorithm(algorithm).map_err(fail)?;
    let fam = instances::boxs_family(m).map_err(fail)?;
    let transcript = match game {
        "value" => run_value_game(alg.as_ref(), &fam, budget, trials, seed, cap),
        "demand" => run_demand_game(alg.as_ref(), &fam, budget, trials, seed, cap),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown game {other:?}; expected \"value\" or \"demand\""
            )))
        }
    }
    .map_err(fail)?;
    Ok(PyTranscript { inner: transcript })
}

#[pymodule]
fn _native(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatroid>()?;
    m.add_class::<PyValuation>()?;
    m.add_class::<PyTypeDistribution>()?;
    m.add_class::<PySadpInstance>()?;
    m.add_class::<PyWitness>()?;
    m.add_class::<PyMenu>()?;
    m.add_class::<PyTranscript>()?;

    m.add_function(wrap_pyfunction!(disjoint_union, m)?)?;
    m.add_function(wrap_pyfunction!(scaled_disjoint_union, m)?)?;
    m.add_function(wrap_pyfunction!(fast_truncated_value, m)?)?;
    m.add_function(wrap_pyfunction!(load_json, m)?)?;

    m.add_function(wrap_pyfunction!(boxs_family, m)?)?;
    m.add_function(wrap_pyfunction!(perturb, m)?)?;
    m.add_function(wrap_pyfunction!(subset_rank, m)?)?;
    m.add_function(wrap_pyfunction!(subset_unrank, m)?)?;
    m.add_function(wrap_pyfunction!(appendix_counterexample, m)?)?;

    m.add_function(wrap_pyfunction!(build_it, m)?)?;
    m.add_function(wrap_pyfunction!(build_vt, m)?)?;
    m.add_function(wrap_pyfunction!(recover_from_it, m)?)?;
    m.add_function(wrap_pyfunction!(recover_from_vt, m)?)?;
    m.add_function(wrap_pyfunction!(balancedness, m)?)?;
    m.add_function(wrap_pyfunction!(witness_for_it, m)?)?;
    m.add_function(wrap_pyfunction!(check_c_compatibility, m)?)?;
    m.add_function(wrap_pyfunction!(quality, m)?)?;
    m.add_function(wrap_pyfunction!(hardness_budget, m)?)?;
    m.add_function(wrap_pyfunction!(hardness_budget_for_k, m)?)?;

    m.add_function(wrap_pyfunction!(brute_force_odp, m)?)?;
    m.add_function(wrap_pyfunction!(sadp_eval, m)?)?;
    m.add_function(wrap_pyfunction!(sadp_opt, m)?)?;
    m.add_function(wrap_pyfunction!(lp_optimal_mdmdp, m)?)?;
    m.add_function(wrap_pyfunction!(best_posted_price, m)?)?;
    m.add_function(wrap_pyfunction!(trivial_bundle_menu, m)?)?;
    m.add_function(wrap_pyfunction!(verify_menu, m)?)?;

    m.add_function(wrap_pyfunction!(theoretical_bound, m)?)?;
    m.add_function(wrap_pyfunction!(algorithms, m)?)?;
    m.add_function(wrap_pyfunction!(run_game, m)?)?;

    m.add("DEFAULT_ENUM_CAP", DEFAULT_ENUM_CAP)?;
    m.add("DEFAULT_LP_CAP", DEFAULT_LP_CAP)?;
    m.add("SCHEMA_VERSION", mdd_core::formats::SCHEMA_VERSION)?;
    Ok(())
}
