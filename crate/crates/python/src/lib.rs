//! Python bindings. Homology comes back as `{(h, q): dim}` dicts, reports as
//! the same JSON documents the command line prints.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use khf_core::harness::{self, Input, SsTheory, VerifyKind, VerifyOptions};
use khf_core::spectral::{default_k_max, leray_pages};
use khf_core::theories::DEFAULT_CAP;
use khf_core::{Axis, BigradedDims, Edge, Error};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn input(pd: Option<String>, fixture: Option<String>, plugin: Option<PathBuf>) -> PyResult<Input> {
    match (pd, fixture, plugin) {
        (Some(s), None, None) => Ok(Input::Pd(s)),
        (None, Some(f), None) => Ok(Input::Fixture(f)),
        (None, None, Some(p)) => Ok(Input::Plugin(p)),
        _ => Err(PyValueError::new_err("give exactly one of pd, fixture, plugin")),
    }
}

fn dims(d: &BigradedDims) -> BTreeMap<(i32, i32), usize> {
    d.iter().collect()
}

fn cube(i: &Input, t: &khf_core::TheorySpec, cap: usize) -> PyResult<khf_core::CubeComplex> {
    let r = harness::resolve(i).map_err(err)?;
    khf_core::theories::build_complex_capped(&r.diagram, t, cap).map_err(err)
}

/// Khovanov homology, or the plugin theory when `plugin` is given.
#[pyfunction]
#[pyo3(signature = (pd=None, fixture=None, plugin=None, cap=DEFAULT_CAP))]
fn kh(pd: Option<String>, fixture: Option<String>, plugin: Option<PathBuf>, cap: usize) -> PyResult<BTreeMap<(i32, i32), usize>> {
    let i = input(pd, fixture, plugin)?;
    let r = harness::resolve(&i).map_err(err)?;
    let cc = cube(&i, &r.theory(), cap)?;
    Ok(dims(&cc.complex.homology().map_err(err)?.dims))
}

#[pyfunction]
#[pyo3(signature = (basepoint, pd=None, fixture=None, cap=DEFAULT_CAP))]
fn reduced(basepoint: Edge, pd: Option<String>, fixture: Option<String>, cap: usize) -> PyResult<BTreeMap<(i32, i32), usize>> {
    let i = input(pd, fixture, None)?;
    let cc = cube(&i, &khf_core::TheorySpec::khovanov(), cap)?;
    let red = khf_core::basepoint::reduced(&cc, basepoint).map_err(err)?;
    Ok(dims(&red.homology_dims().map_err(err)?))
}

/// Bar-Natan homology by filtration level.
#[pyfunction]
#[pyo3(signature = (pd=None, fixture=None, cap=DEFAULT_CAP))]
fn bn(pd: Option<String>, fixture: Option<String>, cap: usize) -> PyResult<BTreeMap<(i32, i32), usize>> {
    let i = input(pd, fixture, None)?;
    let cc = cube(&i, &khf_core::TheorySpec::bar_natan(), cap)?;
    Ok(dims(&cc.complex.homology().map_err(err)?.dims))
}

/// Unnormalized Jones polynomial from the state sum, as `{exponent: coeff}`.
#[pyfunction]
#[pyo3(signature = (pd=None, fixture=None))]
fn bracket(pd: Option<String>, fixture: Option<String>) -> PyResult<BTreeMap<i32, i64>> {
    let r = harness::resolve(&input(pd, fixture, None)?).map_err(err)?;
    let p = khf_core::bracket::jones_unnormalized(&r.diagram).map_err(err)?;
    Ok(p.terms().collect())
}

/// Spectral sequence pages as a list of `{(h, q): dim}`.
#[pyfunction]
#[pyo3(signature = (theory="kh", pd=None, fixture=None, plugin=None, pages=None, cap=DEFAULT_CAP))]
fn spectral_pages(
    theory: &str,
    pd: Option<String>,
    fixture: Option<String>,
    plugin: Option<PathBuf>,
    pages: Option<usize>,
    cap: usize,
) -> PyResult<Vec<BTreeMap<(i32, i32), usize>>> {
    let i = input(pd, fixture, plugin)?;
    let r = harness::resolve(&i).map_err(err)?;
    let t = match theory.parse().map_err(err)? {
        SsTheory::Kh => khf_core::TheorySpec::khovanov(),
        SsTheory::Bn => khf_core::TheorySpec::bar_natan(),
        SsTheory::Plugin => r
            .plugin
            .clone()
            .ok_or_else(|| PyValueError::new_err("theory \"plugin\" needs plugin="))?,
    };
    let cc = cube(&i, &t, cap)?;
    let k = pages.unwrap_or_else(|| default_k_max(&cc.complex, r.diagram.crossing_count()));
    let ss = leray_pages(&cc.complex, k).map_err(err)?;
    Ok(ss.pages.iter().map(|p| dims(&p.dims)).collect())
}

/// Run a check and return the JSON report.
#[pyfunction]
#[pyo3(signature = (check, pd=None, fixture=None, plugin=None, with_=None, cap=DEFAULT_CAP))]
fn verify(
    check: &str,
    pd: Option<String>,
    fixture: Option<String>,
    plugin: Option<PathBuf>,
    with_: Option<String>,
    cap: usize,
) -> PyResult<String> {
    let kind: VerifyKind = check.parse().map_err(err)?;
    let opts = VerifyOptions {
        cap,
        with: with_.map(|s| {
            if khf_core::fixtures::fixture(&s).is_ok() {
                Input::Fixture(s)
            } else {
                Input::Pd(s)
            }
        }),
        ..Default::default()
    };
    let rep = harness::run_verify(&input(pd, fixture, plugin)?, kind, &opts).map_err(err)?;
    Ok(rep.to_json())
}

/// PD code of the mutant along a tangle.
#[pyfunction]
#[pyo3(signature = (tangle, crossings, axis, pd=None, fixture=None))]
fn mutate(tangle: [Edge; 4], crossings: Vec<usize>, axis: &str, pd: Option<String>, fixture: Option<String>) -> PyResult<String> {
    let r = harness::resolve(&input(pd, fixture, None)?).map_err(err)?;
    let axis: Axis = axis.parse().map_err(err)?;
    let t = khf_core::TangleRegion::new(tangle, crossings);
    Ok(r.diagram.mutate(&t, axis).map_err(err)?.to_pd_string())
}

#[pyfunction]
fn fixtures() -> Vec<&'static str> {
    khf_core::fixtures::fixture_names()
}

#[pymodule]
fn khf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", khf_core::report::TOOL_VERSION)?;
    m.add_function(wrap_pyfunction!(kh, m)?)?;
    m.add_function(wrap_pyfunction!(reduced, m)?)?;
    m.add_function(wrap_pyfunction!(bn, m)?)?;
    m.add_function(wrap_pyfunction!(bracket, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_pages, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(mutate, m)?)?;
    m.add_function(wrap_pyfunction!(fixtures, m)?)?;
    Ok(())
}
