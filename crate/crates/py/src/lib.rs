//! Python bindings. Sets cross the boundary as sorted lists of elements;
//! records and reports come back as plain dicts (via their JSON form).

use poset_ramsey::constructions::{self, LllConfig, WeakParams};
use poset_ramsey::embedder::{self, EmbedRecord, SweepMode};
use poset_ramsey::lattice::{self, Color, Coloring, Permutation, SetWord, WeightedFamily};
use poset_ramsey::oracle::{self, CopyKind, RamseyOptions};
use poset_ramsey::verifier;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn word(elems: Vec<u32>) -> PyResult<SetWord> {
    SetWord::from_elems(elems).map_err(err)
}

fn words(sets: Vec<Vec<u32>>) -> PyResult<Vec<SetWord>> {
    sets.into_iter().map(word).collect()
}

fn kind(name: &str) -> PyResult<CopyKind> {
    name.parse().map_err(PyValueError::new_err)
}

/// A blue/red coloring of `Q_N`.
#[pyclass(name = "Coloring", module = "poset_ramsey", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyColoring {
    inner: Coloring,
}

#[pymethods]
impl PyColoring {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyColoring { inner: lattice::from_json(text).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n, blue_layers, blue_extra=Vec::new()))]
    fn structured(n: u32, blue_layers: Vec<u32>, blue_extra: Vec<Vec<u32>>) -> PyResult<Self> {
        let inner = Coloring::structured(n, blue_layers, words(blue_extra)?, None).map_err(err)?;
        Ok(PyColoring { inner })
    }

    #[staticmethod]
    fn dense_from_hex(n: u32, blue_hex: &str) -> PyResult<Self> {
        Ok(PyColoring { inner: Coloring::dense_from_hex(n, blue_hex).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (m, n, blue_layers=None))]
    fn layered(m: u32, n: u32, blue_layers: Option<Vec<u32>>) -> PyResult<Self> {
        Ok(PyColoring { inner: constructions::layered_coloring(m, n, blue_layers).map_err(err)? })
    }

    #[staticmethod]
    fn induced_q2(n: u32) -> PyResult<Self> {
        Ok(PyColoring { inner: constructions::induced_q2_coloring(n).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n, m, k=None, d=None, p=None))]
    fn weak(n: u32, m: u32, k: Option<u32>, d: Option<u64>, p: Option<u64>) -> PyResult<Self> {
        let w = constructions::weak_construction(n, m, WeakParams { k, d, p }).map_err(err)?;
        Ok(PyColoring { inner: w.coloring })
    }

    /// Coloring built on a resampled random family; `p_incl` defaults to
    /// the tuned value.
    #[staticmethod]
    #[pyo3(signature = (n, m, seed, p_incl=None, max_resamples=constructions::DEFAULT_MAX_RESAMPLES))]
    fn probabilistic(n: u32, m: u32, seed: u64, p_incl: Option<f64>, max_resamples: u64) -> PyResult<Self> {
        let p = p_incl.unwrap_or_else(|| constructions::tuned_probability(n));
        let mut cfg = LllConfig::with_probability(n, m, p, seed);
        cfg.max_resamples = max_resamples;
        let out = constructions::lll_family(&cfg).map_err(err)?;
        Ok(PyColoring { inner: constructions::probabilistic_coloring(n, m, &out.family).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    fn color_of(&self, s: Vec<u32>) -> PyResult<&'static str> {
        let s = word(s)?;
        if !s.fits(self.inner.n()) {
            return Err(err(format!("{s} not inside [{}]", self.inner.n())));
        }
        Ok(match self.inner.color_of(s) {
            Color::Blue => "blue",
            Color::Red => "red",
        })
    }

    fn to_json(&self) -> String {
        lattice::to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Coloring(n={})", self.inner.n())
    }
}

#[pyfunction]
fn is_subset(a: Vec<u32>, b: Vec<u32>) -> PyResult<bool> {
    Ok(lattice::is_subset(word(a)?, word(b)?))
}

#[pyfunction]
fn sym_diff_size(a: Vec<u32>, b: Vec<u32>) -> PyResult<u32> {
    Ok(lattice::sym_diff_size(word(a)?, word(b)?))
}

#[pyfunction]
fn layer(n: u32, s: u32) -> PyResult<Vec<Vec<u32>>> {
    Ok(lattice::layer(n, s).map_err(err)?.map(SetWord::to_vec).collect())
}

#[pyfunction]
#[pyo3(signature = (family, m, kind="induced"))]
fn find_copy<'py>(py: Python<'py>, family: Vec<Vec<u32>>, m: u32, kind: &str) -> PyResult<Bound<'py, PyAny>> {
    let w = oracle::find_copy(&words(family)?, m, self::kind(kind)?).map_err(err)?;
    to_py(py, &w)
}

#[pyfunction]
fn find_chain(family: Vec<Vec<u32>>, length: usize) -> PyResult<Option<Vec<Vec<u32>>>> {
    let c = oracle::find_chain(&words(family)?, length).map_err(err)?;
    Ok(c.map(|c| c.sets().iter().map(|s| s.to_vec()).collect()))
}

#[pyfunction]
#[pyo3(signature = (m, n, kind="induced", max_n=4))]
fn exhaustive_ramsey_number<'py>(py: Python<'py>, m: u32, n: u32, kind: &str, max_n: u32) -> PyResult<Bound<'py, PyAny>> {
    let scan = oracle::exhaustive_ramsey_number(m, n, self::kind(kind)?, max_n, &RamseyOptions::default()).map_err(err)?;
    to_py(py, &scan)
}

#[pyfunction]
#[pyo3(signature = (coloring, m, n, kind="induced"))]
fn coloring_is_ramsey<'py>(py: Python<'py>, coloring: &PyColoring, m: u32, n: u32, kind: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = oracle::coloring_is_ramsey(&coloring.inner, m, n, self::kind(kind)?, oracle::DEFAULT_NODE_BUDGET).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn embed<'py>(py: Python<'py>, coloring: &PyColoring, n: u32, k: u32, pi: Vec<u32>) -> PyResult<Bound<'py, PyAny>> {
    let pi = Permutation::new(n, k, pi).map_err(err)?;
    let rec = embedder::embed_with_permutation(&coloring.inner, n, k, &pi).map_err(err)?;
    to_py(py, &rec)
}

#[pyfunction]
fn verify_embedding<'py>(py: Python<'py>, record: Bound<'py, PyAny>, coloring: &PyColoring) -> PyResult<Bound<'py, PyAny>> {
    let text: String = py.import("json")?.call_method1("dumps", (record,))?.extract()?;
    let rec: EmbedRecord = lattice::from_json(&text).map_err(err)?;
    let v = verifier::verify_embedding(&rec, &coloring.inner).map_err(err)?;
    to_py(py, &v)
}

#[pyfunction]
fn recover_permutation(chain: Vec<Vec<u32>>, n: u32) -> PyResult<Vec<u32>> {
    let chain = lattice::Chain::new(words(chain)?).map_err(err)?;
    embedder::recover_permutation(&chain, n).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (coloring, n, k, sample=None, seed=0))]
fn sweep_permutations<'py>(
    py: Python<'py>,
    coloring: &PyColoring,
    n: u32,
    k: u32,
    sample: Option<u64>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let mode = match sample {
        Some(count) => SweepMode::Sample { count, seed },
        None => SweepMode::All,
    };
    let r = py.detach(|| embedder::sweep_permutations(&coloring.inner, n, k, &mode)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn counting_bound<'py>(py: Python<'py>, n: u64, c: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &embedder::counting_bound(n, c).map_err(err)?)
}

#[pyfunction]
fn minimal_k(n: u64) -> PyResult<u64> {
    embedder::minimal_k(n).map_err(err)
}

#[pyfunction]
fn find_prime(ground: u32) -> PyResult<u64> {
    constructions::find_prime(ground).map_err(err)
}

#[pyfunction]
fn olson_subset_sum(values: Vec<u64>, p: u64, target: u64) -> PyResult<Vec<u64>> {
    constructions::olson_subset_sum(&values, p, target).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (ground, m, k, big_y, y, p=None, d=None))]
fn code_witness(ground: u32, m: u32, k: u32, big_y: Vec<u32>, y: u32, p: Option<u64>, d: Option<u64>) -> PyResult<Vec<u32>> {
    let p = match p {
        Some(p) => p,
        None => constructions::find_prime(ground).map_err(err)?,
    };
    let code = constructions::modp_code(ground, k, d.unwrap_or(p), p).map_err(err)?;
    let c = constructions::code_witness(ground, m, k, &code, word(big_y)?, y).map_err(err)?;
    Ok(c.to_vec())
}

#[pyfunction]
fn dp_count(ground: Vec<u32>, k: u32, p: u64, r: u64) -> PyResult<u128> {
    Ok(verifier::dp_count(word(ground)?, k, p, r))
}

#[pyfunction]
fn check_code_statement<'py>(py: Python<'py>, ground: u32, m: u32, k: u32, p: u64, d: u64) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| verifier::check_code_statement(ground, m, k, p, d)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn check_min_distance(ground: u32, weight: u32, members: Vec<Vec<u32>>, bound: u32) -> PyResult<Option<(Vec<u32>, Vec<u32>)>> {
    let fam = WeightedFamily::explicit(ground, weight, words(members)?).map_err(err)?;
    let w = verifier::check_min_distance(&fam, bound, verifier::DEFAULT_ENUMERATION_LIMIT).map_err(err)?;
    Ok(w.map(|(a, b)| (a.to_vec(), b.to_vec())))
}

#[pyfunction]
fn check_conditions<'py>(py: Python<'py>, ground: u32, weight: u32, members: Vec<Vec<u32>>) -> PyResult<Bound<'py, PyAny>> {
    let fam = WeightedFamily::explicit(ground, weight, words(members)?).map_err(err)?;
    to_py(py, &verifier::check_conditions(&fam).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (coloring, m, kind="weak"))]
fn certify_blue_free<'py>(py: Python<'py>, coloring: &PyColoring, m: u32, kind: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = verifier::certify_blue_free(&coloring.inner, m, self::kind(kind)?).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn lll_inequality_report<'py>(py: Python<'py>, n: u32, m: u32, p_incl: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &verifier::lll_inequality_report(n, m, p_incl).map_err(err)?)
}

#[pyfunction]
fn refute_m2<'py>(py: Python<'py>, ground: u32, members: Vec<Vec<u32>>) -> PyResult<Bound<'py, PyAny>> {
    let fam = WeightedFamily::explicit(ground, 2, words(members)?).map_err(err)?;
    to_py(py, &constructions::refute_m2(&fam).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "poset_ramsey")]
fn poset_ramsey_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyColoring>()?;
    m.add_function(wrap_pyfunction!(is_subset, m)?)?;
    m.add_function(wrap_pyfunction!(sym_diff_size, m)?)?;
    m.add_function(wrap_pyfunction!(layer, m)?)?;
    m.add_function(wrap_pyfunction!(find_copy, m)?)?;
    m.add_function(wrap_pyfunction!(find_chain, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_ramsey_number, m)?)?;
    m.add_function(wrap_pyfunction!(coloring_is_ramsey, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(verify_embedding, m)?)?;
    m.add_function(wrap_pyfunction!(recover_permutation, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_permutations, m)?)?;
    m.add_function(wrap_pyfunction!(counting_bound, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_k, m)?)?;
    m.add_function(wrap_pyfunction!(find_prime, m)?)?;
    m.add_function(wrap_pyfunction!(olson_subset_sum, m)?)?;
    m.add_function(wrap_pyfunction!(code_witness, m)?)?;
    m.add_function(wrap_pyfunction!(dp_count, m)?)?;
    m.add_function(wrap_pyfunction!(check_code_statement, m)?)?;
    m.add_function(wrap_pyfunction!(check_min_distance, m)?)?;
    m.add_function(wrap_pyfunction!(check_conditions, m)?)?;
    m.add_function(wrap_pyfunction!(certify_blue_free, m)?)?;
    m.add_function(wrap_pyfunction!(lll_inequality_report, m)?)?;
    m.add_function(wrap_pyfunction!(refute_m2, m)?)?;
    Ok(())
}
