//! Python bindings: a thin wrapper exposing index construction, queries and
//! serialization. Build with `cargo build -p pfp-py`, then import the cdylib
//! as `pfp_py` (see python/smoke_test.py).

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

fn to_py_err(e: pfpds::Error) -> PyErr {
    match e {
        pfpds::Error::OutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A queryable prefix-free-parsing index over one text.
#[pyclass(frozen, name = "PfpIndex")]
struct PyPfpIndex {
    inner: pfpds::PfpIndex,
}

#[pymethods]
impl PyPfpIndex {
    /// Parses `data` and builds an index. Trigger strings of length `w` are
    /// either chosen by hash (`p`) or given explicitly via `triggers`;
    /// `remap=True` shifts input bytes up by 3 to free the reserved range
    /// 0x00-0x02.
    #[new]
    #[pyo3(signature = (data, w = pfpds::DEFAULT_W, p = pfpds::DEFAULT_P, triggers = None, remap = false))]
    fn new(data: &[u8], w: usize, p: u64, triggers: Option<Vec<Vec<u8>>>, remap: bool) -> PyResult<Self> {
        let text = pfpds::prepare_text(data, w, remap).map_err(to_py_err)?;
        let cfg = match triggers {
            Some(list) => pfpds::TriggerConfig::explicit(w, list),
            None => pfpds::TriggerConfig::hash(w, p),
        }
        .map_err(to_py_err)?;
        let inner = pfpds::PfpIndex::build(&text, &cfg).map_err(to_py_err)?;
        Ok(PyPfpIndex { inner })
    }

    /// Reconstructs an index from bytes produced by `serialize()`.
    #[staticmethod]
    fn deserialize(data: &[u8]) -> PyResult<Self> {
        Ok(PyPfpIndex { inner: pfpds::deserialize(data).map_err(to_py_err)? })
    }

    /// Canonical serialized form; feed back to `deserialize()`.
    fn serialize<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new_bound(py, &pfpds::serialize(&self.inner))
    }

    /// Text length, sentinels included.
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Trigger window length.
    #[getter]
    fn w(&self) -> usize {
        self.inner.w()
    }

    /// Parse length (number of phrase occurrences).
    #[getter]
    fn m(&self) -> usize {
        self.inner.parse().len()
    }

    /// Number of distinct dictionary phrases.
    #[getter]
    fn dict_phrases(&self) -> usize {
        self.inner.dict().len()
    }

    /// S[i].
    fn access(&self, i: usize) -> PyResult<u8> {
        self.inner.access(i).map_err(to_py_err)
    }

    /// Starting position of the i-th smallest rotation.
    fn sa(&self, i: usize) -> PyResult<usize> {
        self.inner.sa(i).map_err(to_py_err)
    }

    /// Rank of the rotation starting at `pos`.
    fn isa(&self, pos: usize) -> PyResult<usize> {
        self.inner.isa(pos).map_err(to_py_err)
    }

    /// LCP of the rotations ranked i-1 and i (0 for i = 0).
    fn lcp(&self, i: usize) -> PyResult<usize> {
        self.inner.lcp(i).map_err(to_py_err)
    }

    /// Longest common extension of the suffixes starting at i and j.
    fn lce(&self, i: usize, j: usize) -> PyResult<usize> {
        self.inner.lce(i, j).map_err(to_py_err)
    }

    /// Minimum of lcp(l..=r), answered as lce(sa(l-1), sa(r)).
    fn rmq_lcp(&self, l: usize, r: usize) -> PyResult<usize> {
        self.inner.rmq_lcp(l, r).map_err(to_py_err)
    }

    /// BWT[i] = S[SA[i] - 1 mod n].
    fn bwt(&self, i: usize) -> PyResult<u8> {
        self.inner.bwt(i).map_err(to_py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!(
            "PfpIndex(n={}, w={}, m={}, dict_phrases={})",
            self.inner.n(),
            self.inner.w(),
            self.inner.parse().len(),
            self.inner.dict().len()
        )
    }
}

#[pymodule]
fn pfp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPfpIndex>()?;
    m.add("DEFAULT_W", pfpds::DEFAULT_W)?;
    m.add("DEFAULT_P", pfpds::DEFAULT_P)?;
    m.add("SENTINEL", pfpds::SENTINEL)?;
    Ok(())
}
