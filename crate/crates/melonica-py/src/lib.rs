//! Python bindings: the main graph type and the headline operations
//! (degrees, melonic recognition, enumeration, tree counts, critical point,
//! Gaussian moments and the N=1 series with its oracle).

use num::bigint::BigInt;
use num::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use melonica::error::Error;
use melonica::series::BigRational;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn big_pair(r: &BigRational) -> (BigInt, BigInt) {
    (r.numer().clone(), r.denom().clone())
}

/// A closed bipartite edge-colored graph. Permutations are given as
/// 1-indexed image lists, one per color, matching the JSON file format.
#[pyclass(frozen)]
struct ColoredGraph {
    inner: melonica::ColoredGraph,
}

#[pymethods]
impl ColoredGraph {
    #[new]
    fn new(perms: Vec<Vec<usize>>) -> PyResult<Self> {
        let num_colors = perms.len();
        let mut shifted = Vec::with_capacity(num_colors);
        for list in &perms {
            let mut images = Vec::with_capacity(list.len());
            for &v in list {
                if v == 0 {
                    return Err(PyValueError::new_err(
                        "images are 1-indexed; 0 is out of range",
                    ));
                }
                images.push(v - 1);
            }
            shifted.push(images);
        }
        Ok(ColoredGraph {
            inner: melonica::ColoredGraph::new(num_colors, shifted).map_err(err)?,
        })
    }

    #[staticmethod]
    fn dipole(num_colors: usize) -> ColoredGraph {
        ColoredGraph {
            inner: melonica::dipole(num_colors),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<ColoredGraph> {
        Ok(ColoredGraph {
            inner: melonica::ColoredGraph::decode(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.encode()
    }

    #[getter]
    fn num_colors(&self) -> usize {
        self.inner.num_colors()
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    fn face_count(&self, i: usize, j: usize) -> PyResult<usize> {
        self.inner.face_count(i, j).map_err(err)
    }

    fn total_faces(&self) -> usize {
        self.inner.total_faces()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn canonical_key(&self) -> String {
        self.inner.canonical_form().key()
    }

    fn aut_order(&self) -> u64 {
        self.inner.automorphism_order()
    }

    /// Degree report: `(omega, jacket_genera, faces)`.
    fn degree(&self) -> PyResult<(u64, Vec<u64>, usize)> {
        let r = melonica::degree(&self.inner).map_err(err)?;
        Ok((r.omega, r.jacket_genera, r.face_total))
    }

    /// Large-N exponent `D - 2ω/(D-1)!` as `(numerator, denominator)`.
    fn amplitude_exponent(&self) -> PyResult<(i64, i64)> {
        let d = self.inner.num_colors() - 1;
        let e = melonica::amplitude_exponent(&self.inner, d).map_err(err)?;
        Ok((*e.0.numer(), *e.0.denom()))
    }

    fn is_melonic(&self) -> PyResult<bool> {
        melonica::is_melonic(&self.inner).map_err(err)
    }

    /// Insert a melon on the color-`color` line at white vertex `white`
    /// (0-indexed), returning the grown graph.
    fn insert_melon(&self, white: usize, color: usize) -> PyResult<ColoredGraph> {
        if white >= self.inner.p() || color >= self.inner.num_colors() {
            return Err(PyValueError::new_err("white vertex or color out of range"));
        }
        Ok(ColoredGraph {
            inner: melonica::melonic::insert_melon(&self.inner, white, color),
        })
    }

    /// Cell counts `(c0, c1, c2, c3)` and Euler characteristic of the dual
    /// gluing (4-colored graphs).
    fn cell_complex(&self) -> PyResult<((usize, usize, usize, usize), i64)> {
        let s = melonica::cell_complex(&self.inner).map_err(err)?;
        Ok(((s.c0, s.c1, s.c2, s.c3), s.chi))
    }

    /// Link genera of all 3-colored subgraphs plus the manifold verdict.
    fn link_genera(&self) -> PyResult<(Vec<u64>, bool)> {
        let report = melonica::is_manifold(&self.inner).map_err(err)?;
        Ok((
            report.links.iter().map(|l| l.genus).collect(),
            report.is_manifold,
        ))
    }

    fn __repr__(&self) -> String {
        format!("ColoredGraph({})", self.inner.key())
    }

    fn __eq__(&self, other: &ColoredGraph) -> bool {
        self.inner == other.inner
    }
}

/// Connected classes with `num_colors` colors and `2p` vertices, as
/// `(graph, aut_order, omega)` triples in canonical order.
#[pyfunction]
fn enumerate_bubbles(num_colors: usize, p: usize) -> PyResult<Vec<(ColoredGraph, u64, u64)>> {
    let catalog = melonica::enumerate_bubbles(num_colors, p).map_err(err)?;
    Ok(catalog
        .classes
        .into_iter()
        .map(|c| (ColoredGraph { inner: c.graph }, c.aut_order, c.omega))
        .collect())
}

/// Number of melonic classes with `2p` vertices at rank `d`, checked against
/// the insertion generator.
#[pyfunction]
fn count_melons(d: usize, p: usize) -> PyResult<u64> {
    let by_filter = melonica::count_melons_exhaustive(d, p).map_err(err)?;
    let by_insertion = melonica::melons_by_insertion(d, p).map_err(err)?.len() as u64;
    if by_filter != by_insertion {
        return Err(PyValueError::new_err(format!(
            "melon generators disagree: {} vs {}",
            by_filter, by_insertion
        )));
    }
    Ok(by_filter)
}

/// Fuss–Catalan count of colored trees with `p` nodes at rank `d`.
#[pyfunction]
fn count_colored_trees(d: usize, p: usize) -> BigUint {
    melonica::count_colored_trees(d, p)
}

/// Ratio-test estimate of the tree-series radius of convergence:
/// `(lower, upper, estimate)`, each an exact `(numerator, denominator)` pair.
#[pyfunction]
fn estimate_critical_point(
    d: usize,
    max_p: usize,
) -> PyResult<((BigInt, BigInt), (BigInt, BigInt), (BigInt, BigInt))> {
    let est = melonica::estimate_critical_point(d, max_p).map_err(err)?;
    Ok((
        big_pair(&est.lower),
        big_pair(&est.upper),
        big_pair(&est.estimate()),
    ))
}

/// Gaussian expectation of a connected bubble as `{exponent: coefficient}`.
#[pyfunction]
fn gaussian_expectation(
    bubble: &ColoredGraph,
) -> PyResult<std::collections::BTreeMap<i64, BigInt>> {
    let d = bubble.inner.num_colors();
    let poly = melonica::gaussian_expectation(&bubble.inner, d).map_err(err)?;
    let mut out = std::collections::BTreeMap::new();
    for (e, c) in &poly.terms {
        debug_assert!(e.is_integer() && c.is_integer());
        out.insert(*e.numer(), c.numer().clone());
    }
    Ok(out)
}

/// Free-energy coefficients of a model at N = 1, orders `1..=max_order`, as
/// exact `(numerator, denominator)` pairs. `model_json` is the same document
/// the CLI accepts (inline graphs only here).
#[pyfunction]
fn free_energy_n1(model_json: &str, max_order: usize) -> PyResult<Vec<(BigInt, BigInt)>> {
    let model = melonica::ModelSpec::from_json(model_json, |_| {
        Err(Error::Parse(
            "catalog references are not supported from Python".into(),
        ))
    })
    .map_err(err)?;
    let table = melonica::free_energy_series(&model, max_order, true).map_err(err)?;
    Ok(table
        .n1_coefficients()
        .iter()
        .map(|(_, v)| big_pair(v))
        .collect())
}

/// The independent N=1 integral oracle for a single quartic coupling at
/// rank 3, same output shape as [`free_energy_n1`].
#[pyfunction]
fn n1_integral_oracle(max_order: usize) -> Vec<(BigInt, BigInt)> {
    melonica::series::n1_log_moment_series(max_order)
        .iter()
        .map(big_pair)
        .collect()
}

/// Maximum deviation of the numeric invariant under Haar-random unitaries.
#[pyfunction]
fn unitary_invariance_check(
    bubble: &ColoredGraph,
    n: usize,
    trials: usize,
    seed: u64,
) -> PyResult<f64> {
    let t = melonica::NumericTensor::random(bubble.inner.num_colors(), n, seed);
    melonica::unitary_invariance_check(&bubble.inner, &t, trials, seed + 1).map_err(err)
}

#[pymodule]
fn melonica_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ColoredGraph>()?;
    m.add_function(wrap_pyfunction!(enumerate_bubbles, m)?)?;
    m.add_function(wrap_pyfunction!(count_melons, m)?)?;
    m.add_function(wrap_pyfunction!(count_colored_trees, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_critical_point, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(free_energy_n1, m)?)?;
    m.add_function(wrap_pyfunction!(n1_integral_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(unitary_invariance_check, m)?)?;
    Ok(())
}
