//! Python bindings. Structured results cross the boundary as JSON and are
//! decoded with `json.loads`, so callers get plain dicts and lists.

use std::path::PathBuf;

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use remap_core::evalkit::{self, LabeledPair};
use remap_core::extractor::{self, ExtractConfig, ProjectSnapshot};
use remap_core::mapper::{self, FilterConfig, MappingResult, Profile, Task};
use remap_core::normalizer::{self, Normalizer};
use remap_core::pair::CandidatePair;
use remap_core::prefilter;
use remap_core::project::ProjectRole;
use remap_core::simcore;

fn err(e: remap_core::Error) -> PyErr {
    match e {
        remap_core::Error::Config(_) | remap_core::Error::Regex { .. } => {
            PyValueError::new_err(e.to_string())
        }
        remap_core::Error::UnresolvedId { .. } => PyKeyError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

fn loads<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn from_json<T: serde::de::DeserializeOwned>(py: Python<'_>, obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = PyModule::import(py, "json")?
        .call_method1("dumps", (obj,))?
        .extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn tokenize(text: &str) -> Vec<String> {
    normalizer::tokenize(text).as_slice().to_vec()
}

#[pyfunction]
fn normalize_doc(text: &str) -> String {
    normalizer::normalize_doc(text)
}

/// LCS similarity of two token lists; None when both are empty.
#[pyfunction]
fn lcs_sim(a: Vec<String>, b: Vec<String>) -> Option<f64> {
    simcore::lcs_sim(&a.into_iter().collect(), &b.into_iter().collect())
}

#[pyclass(name = "RuleSet", frozen)]
#[derive(Clone)]
struct PyRuleSet(normalizer::RuleSet);

#[pymethods]
impl PyRuleSet {
    /// A bundled rule set by name, e.g. `soot-sootup`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        normalizer::RuleSet::builtin(name)
            .map(PyRuleSet)
            .ok_or_else(|| PyValueError::new_err(format!("unknown rule set `{name}`")))
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        normalizer::RuleSet::from_toml_str(text)
            .map(PyRuleSet)
            .map_err(err)
    }

    #[staticmethod]
    fn empty() -> Self {
        PyRuleSet(normalizer::RuleSet::empty())
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Applies the rules to `text` as field `field` of a project with `role`.
    fn apply(&self, text: &str, field: &str, role: &str) -> PyResult<String> {
        let field: normalizer::FieldKind = serde_json::from_value(field.into())
            .map_err(|_| PyValueError::new_err(format!("unknown field `{field}`")))?;
        Ok(self.0.apply(text, field, parse(role)?))
    }

    fn to_toml(&self) -> String {
        self.0.to_toml_string()
    }
}

#[pyclass(name = "WeightConfig", frozen)]
#[derive(Clone)]
struct PyWeightConfig(simcore::WeightConfig);

#[pymethods]
impl PyWeightConfig {
    #[new]
    #[pyo3(signature = (alpha=0.5, beta=0.25, theta=0.25, delta=0.5, eta=0.35, phi=0.15))]
    fn new(alpha: f64, beta: f64, theta: f64, delta: f64, eta: f64, phi: f64) -> PyResult<Self> {
        simcore::WeightConfig::new(alpha, beta, theta, delta, eta, phi)
            .map(PyWeightConfig)
            .map_err(err)
    }

    fn as_tuple(&self) -> (f64, f64, f64, f64, f64, f64) {
        let [a, b, t, d, e, p] = self.0.as_array();
        (a, b, t, d, e, p)
    }

    fn __repr__(&self) -> String {
        format!("WeightConfig{:?}", self.as_tuple())
    }
}

#[pyclass(name = "Snapshot", frozen)]
struct PySnapshot(ProjectSnapshot);

#[pymethods]
impl PySnapshot {
    /// Parses the Java sources under `root`.
    #[staticmethod]
    #[pyo3(signature = (root, role, name, test_roots=None))]
    fn extract(root: PathBuf, role: &str, name: &str, test_roots: Option<Vec<String>>) -> PyResult<Self> {
        let mut cfg = ExtractConfig::new(parse::<ProjectRole>(role)?, name);
        if let Some(roots) = test_roots {
            cfg = cfg.with_test_roots(roots);
        }
        extractor::extract(&root, &cfg).map(PySnapshot).map_err(err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        ProjectSnapshot::load(&path).map(PySnapshot).map_err(err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.0.save(&path).map_err(err)
    }

    #[getter]
    fn role(&self) -> &'static str {
        self.0.role().as_str()
    }

    fn __len__(&self) -> usize {
        self.0.records().len()
    }

    fn method_ids(&self) -> Vec<String> {
        self.0.records().iter().map(|r| r.id.clone()).collect()
    }

    /// Full method record for an id or signature key, or None.
    fn method<'py>(&self, py: Python<'py>, key: &str) -> PyResult<Option<Bound<'py, PyAny>>> {
        self.0.resolve_key(key).map(|r| loads(py, r)).transpose()
    }
}

/// Cross product of methods with at least `min_loc` lines, as pair dicts.
#[pyfunction]
#[pyo3(signature = (left, right, min_loc=5))]
fn exhaustive_pairs<'py>(
    py: Python<'py>,
    left: &PySnapshot,
    right: &PySnapshot,
    min_loc: usize,
) -> PyResult<Bound<'py, PyAny>> {
    loads(py, &prefilter::exhaustive_pairs(&left.0, &right.0, min_loc))
}

/// Scores candidate pairs and returns ranked result dicts.
#[pyfunction]
#[pyo3(signature = (pairs, left, right, task="cm", profile="heavy", threshold=None, weights=None, rules=None, ablation="all"))]
#[allow(clippy::too_many_arguments)]
fn score_pairs<'py>(
    py: Python<'py>,
    pairs: &Bound<'py, PyAny>,
    left: &PySnapshot,
    right: &PySnapshot,
    task: &str,
    profile: &str,
    threshold: Option<f64>,
    weights: Option<PyWeightConfig>,
    rules: Option<PyRuleSet>,
    ablation: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let pairs: Vec<CandidatePair> = from_json(py, pairs)?;
    let profile: Profile = parse(profile)?;
    let mut cfg = FilterConfig::new(parse::<Task>(task)?, profile);
    if let Some(t) = threshold {
        cfg = cfg.with_threshold(t);
    }
    if let Some(w) = weights {
        cfg.weights = w.0;
    }
    cfg.ablation = parse(ablation)?;
    let rules = match rules {
        Some(r) => r.0,
        None => match profile {
            Profile::Heavy => normalizer::RuleSet::soot_sootup(),
            Profile::Light => normalizer::RuleSet::findbugs_spotbugs(),
        },
    };
    let normalizer = Normalizer::new(rules);
    let results = py
        .allow_threads(|| mapper::score_pairs(&pairs, &left.0, &right.0, &normalizer, &cfg))
        .map_err(err)?;
    loads(py, &results)
}

/// Evaluates scored results against a labeled CSV dataset. Signature-style
/// keys are resolved against the snapshots when both are given.
#[pyfunction]
#[pyo3(signature = (results, dataset, task="cm", left=None, right=None))]
fn evaluate<'py>(
    py: Python<'py>,
    results: &Bound<'py, PyAny>,
    dataset: PathBuf,
    task: &str,
    left: Option<&PySnapshot>,
    right: Option<&PySnapshot>,
) -> PyResult<Bound<'py, PyAny>> {
    let results: Vec<MappingResult> = from_json(py, results)?;
    let mut labels: Vec<LabeledPair> = evalkit::read_dataset(&dataset).map_err(err)?;
    if let (Some(l), Some(r)) = (left, right) {
        evalkit::resolve_dataset_keys(&mut labels, &l.0, &r.0);
    }
    loads(py, &evalkit::evaluate_results(&results, &labels, parse(task)?))
}

#[pymodule]
fn remap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_doc, m)?)?;
    m.add_function(wrap_pyfunction!(lcs_sim, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(score_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_class::<PyRuleSet>()?;
    m.add_class::<PyWeightConfig>()?;
    m.add_class::<PySnapshot>()?;
    Ok(())
}
