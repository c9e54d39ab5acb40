//! Python bindings: the finite structures, their JSON interchange, and the
//! main constructions between them.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;

use skewlat_core::assembly::{dissolution_checks, enumerate_nuclei_with_cap, NUCLEUS_CAP};
use skewlat_core::duality::{self, counit, unit_sigma};
use skewlat_core::io::{self, Document, IoError, SectionMap};
use skewlat_core::iso::{homeomorphism, lattice_isomorphism, skew_isomorphism};
use skewlat_core::order::points;
use skewlat_core::skew::{classify_with, green_d, shadow, ClassifyOptions, FULL_JOIN_COMPLETE_CAP};
use skewlat_core::topo::{front_topology, is_sober, spectrum};
use skewlat_core::{bits, catalog, Error, FiniteFrame, FiniteLattice, FiniteSkewLattice, FiniteSpace};

create_exception!(skewlat, SkewlatError, PyValueError, "A checked law or construction failed.");

fn err(e: Error) -> PyErr {
    SkewlatError::new_err(e.to_string())
}

fn io_err(e: IoError) -> PyErr {
    match e {
        IoError::Parse(m) => PyValueError::new_err(m),
        IoError::Invalid(e) => err(e),
    }
}

fn to_python<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

#[pyclass(name = "Lattice", module = "skewlat", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLattice(FiniteLattice);

#[pyclass(name = "SkewLattice", module = "skewlat", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySkew(FiniteSkewLattice);

#[pyclass(name = "Space", module = "skewlat", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpace(FiniteSpace);

#[pyclass(name = "Sheaf", module = "skewlat", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySheaf(skewlat_core::sheaf::FiniteSheaf);

fn wrap(py: Python<'_>, d: Document) -> PyResult<Py<PyAny>> {
    Ok(match d {
        Document::Lattice(l) => Py::new(py, PyLattice(l))?.into_any(),
        Document::SkewLattice(s) => Py::new(py, PySkew(s))?.into_any(),
        Document::Space(y) => Py::new(py, PySpace(y))?.into_any(),
        Document::Sheaf(e) => Py::new(py, PySheaf(e))?.into_any(),
        Document::Presheaf(p) => {
            let (cover, family) = p.gluing_failure().expect("presheaf kept only on gluing failure");
            return Err(err(Error::GluingFailure { cover, family }));
        }
        other => to_python(py, &io::to_value(&other))?.unbind(),
    })
}

/// Parses any interchange document into the matching object.
#[pyfunction]
fn loads(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    wrap(py, io::parse(text).map_err(io_err)?)
}

/// A catalog entry by name (`NC5`, `P22`, `PRIM3`, `CHAIN3`, `BOOL2`, `SIER`, ...).
#[pyfunction]
fn named(py: Python<'_>, name: &str) -> PyResult<Py<PyAny>> {
    wrap(py, catalog::named(name).ok_or_else(|| PyValueError::new_err(format!("unknown catalog entry `{name}`")))?)
}

#[pymethods]
impl PyLattice {
    #[new]
    fn new(meet: Vec<Vec<usize>>, join: Vec<Vec<usize>>) -> PyResult<Self> {
        FiniteLattice::validate(&meet, &join).map(PyLattice).map_err(err)
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    fn meet(&self, a: usize, b: usize) -> usize {
        self.0.meet(a, b)
    }

    fn join(&self, a: usize, b: usize) -> usize {
        self.0.join(a, b)
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        self.0.leq(a, b)
    }

    fn is_distributive(&self) -> bool {
        self.0.distributivity_witness().is_none()
    }

    fn is_boolean(&self) -> bool {
        self.0.is_boolean()
    }

    /// Prime filters, as member lists.
    fn points(&self) -> PyResult<Vec<Vec<usize>>> {
        let f = FiniteFrame::new(self.0.clone()).map_err(err)?;
        Ok(points(&f).iter().map(|p| p.members().to_vec()).collect())
    }

    fn spectrum(&self) -> PyResult<PySpace> {
        let f = FiniteFrame::new(self.0.clone()).map_err(err)?;
        Ok(PySpace(spectrum(&f).map_err(err)?.space))
    }

    /// Nucleus tables, sorted.
    #[pyo3(signature = (cap = NUCLEUS_CAP))]
    fn nuclei(&self, cap: usize) -> PyResult<Vec<Vec<usize>>> {
        let f = FiniteFrame::new(self.0.clone()).map_err(err)?;
        Ok(enumerate_nuclei_with_cap(&f, cap).map_err(err)?.nuclei)
    }

    fn is_isomorphic(&self, other: &PyLattice) -> bool {
        lattice_isomorphism(&self.0, &other.0).is_some()
    }

    fn to_skew(&self) -> PySkew {
        PySkew(FiniteSkewLattice::from_lattice(&self.0))
    }

    fn to_json(&self) -> String {
        io::lattice_json(&self.0).to_string()
    }

    fn __repr__(&self) -> String {
        format!("Lattice(size={})", self.0.size())
    }
}

#[pymethods]
impl PySkew {
    #[new]
    #[pyo3(signature = (meet, join, zero = None))]
    fn new(meet: Vec<Vec<usize>>, join: Vec<Vec<usize>>, zero: Option<usize>) -> PyResult<Self> {
        FiniteSkewLattice::validate(&meet, &join, zero).map(PySkew).map_err(err)
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    #[getter]
    fn labels(&self) -> Option<Vec<String>> {
        self.0.labels().map(<[String]>::to_vec)
    }

    #[getter]
    fn zero(&self) -> Option<usize> {
        self.0.zero()
    }

    fn meet(&self, a: usize, b: usize) -> usize {
        self.0.meet(a, b)
    }

    fn join(&self, a: usize, b: usize) -> usize {
        self.0.join(a, b)
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        self.0.leq(a, b)
    }

    fn mirror(&self) -> PySkew {
        PySkew(self.0.mirror())
    }

    /// Verdicts of the identity catalog as a dict.
    #[pyo3(signature = (seed = 0, cap = FULL_JOIN_COMPLETE_CAP))]
    fn classify<'py>(&self, py: Python<'py>, seed: u64, cap: usize) -> PyResult<Bound<'py, PyAny>> {
        let r = classify_with(&self.0, ClassifyOptions { seed, full_cap: cap });
        to_python(py, &serde_json::to_value(r).expect("serializable"))
    }

    fn d_classes(&self) -> PyResult<Vec<Vec<usize>>> {
        Ok(green_d(&self.0).map_err(err)?.classes)
    }

    /// The shadow lattice and the projection onto it.
    fn shadow(&self) -> PyResult<(PyLattice, Vec<usize>)> {
        let (l, p) = shadow(&self.0).map_err(err)?;
        Ok((PyLattice(l), p.map))
    }

    /// `σ : A → H(G(A))` as a table, with whether it is bijective.
    fn unit_sigma(&self) -> PyResult<(Vec<usize>, bool)> {
        let u = unit_sigma(&self.0).map_err(err)?;
        let ok = u.bijective();
        Ok((u.sigma.map, ok))
    }

    /// Base space, sheaf on its front, section map and stalk sizes of `G(A)`.
    fn dualize<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        let g = duality::G(&self.0).map_err(err)?;
        let d = pyo3::types::PyDict::new(py);
        d.set_item("base", PySpace(g.base.clone()))?;
        d.set_item("sheaf", PySheaf(g.sheaf.clone()))?;
        d.set_item("section_map", SectionMap::from_g(&g).entries)?;
        d.set_item("stalks", g.stalk_sizes())?;
        Ok(d)
    }

    /// The morphism onto the two-element primitive separating `a` from `b`,
    /// or `None` when no point separates them.
    fn separate(&self, a: usize, b: usize) -> PyResult<Option<Vec<usize>>> {
        Ok(duality::separate(&self.0, a, b).map_err(err)?.map(|s| s.morphism.map))
    }

    fn is_isomorphic(&self, other: &PySkew) -> bool {
        skew_isomorphism(&self.0, &other.0).is_some()
    }

    fn to_json(&self) -> String {
        io::skew_json(&self.0).to_string()
    }

    fn __repr__(&self) -> String {
        format!("SkewLattice(size={})", self.0.size())
    }
}

#[pymethods]
impl PySpace {
    #[new]
    fn new(points: usize, opens: Vec<Vec<usize>>) -> PyResult<Self> {
        FiniteSpace::from_index_lists(points, &opens).map(PySpace).map_err(err)
    }

    #[getter]
    fn points(&self) -> usize {
        self.0.points()
    }

    #[getter]
    fn opens(&self) -> Vec<Vec<usize>> {
        self.0.opens().iter().map(|&u| bits::to_indices(u)).collect()
    }

    fn front(&self) -> PySpace {
        PySpace(front_topology(&self.0))
    }

    fn is_sober(&self) -> bool {
        is_sober(&self.0).ok
    }

    fn is_discrete(&self) -> bool {
        self.0.is_discrete()
    }

    fn opens_lattice(&self) -> PyLattice {
        PyLattice(self.0.opens_lattice().into_lattice())
    }

    fn is_homeomorphic(&self, other: &PySpace) -> bool {
        homeomorphism(&self.0, &other.0).is_some()
    }

    /// Nucleus count, booleanness and the front comparison for the opens.
    fn dissolution_checks<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = dissolution_checks(&self.0).map_err(err)?;
        to_python(py, &serde_json::to_value(r).expect("serializable"))
    }

    fn to_json(&self) -> String {
        io::space_json(&self.0).to_string()
    }

    fn __repr__(&self) -> String {
        format!("Space(points={}, opens={})", self.0.points(), self.0.opens().len())
    }
}

#[pymethods]
impl PySheaf {
    /// The sheaf whose stalk at each point is a set of the given size, on a
    /// space whose minimal opens partition the points.
    #[staticmethod]
    fn product_over_blocks(space: &PySpace, stalks: Vec<usize>) -> PyResult<Self> {
        skewlat_core::sheaf::FiniteSheaf::product_over_blocks(&space.0, &stalks).map(PySheaf).map_err(err)
    }

    #[staticmethod]
    fn constant(space: &PySpace, k: usize) -> PyResult<Self> {
        skewlat_core::sheaf::FiniteSheaf::constant(&space.0, k).map(PySheaf).map_err(err)
    }

    #[getter]
    fn space(&self) -> PySpace {
        PySpace(self.0.space().clone())
    }

    fn section_counts(&self) -> Vec<usize> {
        self.0.presheaf().section_counts().to_vec()
    }

    fn stalk_sizes(&self) -> Vec<usize> {
        self.0.stalk_sizes()
    }

    fn to_json(&self) -> String {
        io::sheaf_json(&self.0).to_string()
    }

    fn __repr__(&self) -> String {
        format!("Sheaf(stalks={:?})", self.0.stalk_sizes())
    }
}

/// The ncframe of pairs `(U, s)` for a sheaf on the front of `space`.
#[pyfunction]
fn realize(space: &PySpace, sheaf: &PySheaf) -> PyResult<PySkew> {
    Ok(PySkew(duality::h(&space.0, &sheaf.0).map_err(err)?.skew))
}

/// Whether the counit of `(space, sheaf)` is an isomorphism.
#[pyfunction]
fn counit_iso(space: &PySpace, sheaf: &PySheaf) -> PyResult<bool> {
    Ok(counit(&space.0, &sheaf.0).map_err(err)?.iso)
}

#[pymodule]
fn skewlat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SkewlatError", m.py().get_type::<SkewlatError>())?;
    m.add_class::<PyLattice>()?;
    m.add_class::<PySkew>()?;
    m.add_class::<PySpace>()?;
    m.add_class::<PySheaf>()?;
    m.add_function(wrap_pyfunction!(loads, m)?)?;
    m.add_function(wrap_pyfunction!(named, m)?)?;
    m.add_function(wrap_pyfunction!(realize, m)?)?;
    m.add_function(wrap_pyfunction!(counit_iso, m)?)?;
    Ok(())
}
