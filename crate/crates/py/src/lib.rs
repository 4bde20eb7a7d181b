//! Python module `hotplug_cc`.

use hotplug_cc::analysis::{self, Anchors, RatePoint, Scheme, DEFAULT_ALPHA_STEP};
use hotplug_cc::designs::{self, Design};
use hotplug_cc::engine::format_ratio;
use hotplug_cc::hppda::{self, HpPda, VerifyMode};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((text,))
}

fn point_tuple<'py>(py: Python<'py>, p: &RatePoint) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    Ok((fraction(py, &format_ratio(&p.m_over_n))?, fraction(py, &format_ratio(&p.rate))?))
}

/// A t-(v,k,lambda) design.
#[pyclass(name = "Design", frozen)]
struct PyDesign {
    inner: Design,
}

#[pymethods]
impl PyDesign {
    /// Parse the text format: header "t v k lambda", then one block per line.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Design::parse(text).map(|inner| PyDesign { inner }).map_err(err)
    }

    /// The shipped 3-(8,4,1) design.
    #[staticmethod]
    fn builtin_3_8_4_1() -> Self {
        PyDesign {
            inner: designs::design_3_8_4_1(),
        }
    }

    #[getter]
    fn t(&self) -> usize {
        self.inner.t()
    }
    #[getter]
    fn v(&self) -> usize {
        self.inner.v()
    }
    #[getter]
    fn k(&self) -> usize {
        self.inner.block_size()
    }
    #[getter]
    fn lam(&self) -> usize {
        self.inner.lambda()
    }
    #[getter]
    fn blocks(&self) -> Vec<Vec<usize>> {
        self.inner.blocks().to_vec()
    }

    /// `(valid, [(t_subset, count), ...])`
    fn verify(&self) -> (bool, Vec<(Vec<usize>, usize)>) {
        let r = self.inner.verify();
        (r.valid, r.violations)
    }

    fn lambda_s(&self, s: usize) -> PyResult<usize> {
        self.inner.lambda_s(s).map_err(err)
    }

    fn lambda_exact(&self, i: usize) -> PyResult<usize> {
        self.inner.lambda_exact(i).map_err(err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        let d = &self.inner;
        format!("Design({}-({},{},{}), b={})", d.t(), d.v(), d.block_size(), d.lambda(), d.num_blocks())
    }
}

/// A hotplug placement delivery array (P, B).
#[pyclass(name = "HpPda", frozen)]
struct PyHpPda {
    inner: HpPda,
}

#[pymethods]
impl PyHpPda {
    #[staticmethod]
    #[allow(non_snake_case)]
    fn man(K: usize, Kp: usize, t: usize) -> PyResult<Self> {
        hppda::man_hppda(K, Kp, t).map(|inner| PyHpPda { inner }).map_err(err)
    }

    #[staticmethod]
    fn tdesign(design: &PyDesign, a: Vec<usize>) -> PyResult<Self> {
        hppda::tdesign_hppda(&design.inner, &a)
            .map(|inner| PyHpPda { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn from_bundle(text: &str) -> PyResult<Self> {
        HpPda::from_bundle(text).map(|inner| PyHpPda { inner }).map_err(err)
    }

    fn to_bundle(&self) -> String {
        self.inner.to_bundle()
    }

    /// `(K, K', F, F', Z, Z', S)`
    #[getter]
    fn params(&self) -> (usize, usize, usize, usize, usize, usize, usize) {
        let p = self.inner.params();
        (p.k, p.k_active, p.f, p.f_active, p.z, p.z_active, p.s)
    }

    #[getter]
    fn p(&self) -> String {
        self.inner.p().to_string()
    }

    #[getter]
    fn b(&self) -> String {
        self.inner.b().to_string()
    }

    /// Returns `(valid, failing_tau, problems)`.
    #[pyo3(signature = (mode = "auto", samples = 1000, seed = 0))]
    fn verify(&self, mode: &str, samples: usize, seed: u64) -> PyResult<(bool, Option<Vec<usize>>, Vec<String>)> {
        let mode = match mode {
            "auto" => VerifyMode::Auto,
            "exhaustive" => VerifyMode::Exhaustive,
            "sample" => VerifyMode::Sample { count: samples, seed },
            other => return Err(err(format!("unknown mode {other:?}"))),
        };
        let r = hppda::verify_hppda(&self.inner, mode);
        Ok((r.valid, r.failing_tau, r.problems.iter().map(ToString::to_string).collect()))
    }

    /// Rows of P matched to the rows of B for active set `tau`.
    fn find_zeta(&self, tau: Vec<usize>) -> PyResult<Vec<usize>> {
        hppda::find_zeta(&self.inner, &tau).map(|m| m.zeta).map_err(err)
    }

    /// Run placement, delivery and decoding; returns a dict with `rate`
    /// (Fraction), `success`, `users` and `transmissions`.
    #[pyo3(signature = (n_files, tau, demands, seed = 0))]
    fn simulate<'py>(
        &self,
        py: Python<'py>,
        n_files: usize,
        tau: Vec<usize>,
        demands: Vec<usize>,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = hotplug_cc::simulate(&self.inner, n_files, &tau, &demands, seed).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("rate", fraction(py, &format_ratio(&r.rate))?)?;
        d.set_item("success", r.all_success())?;
        let users: Vec<(usize, usize, bool)> = r.users.iter().map(|u| (u.user, u.demand, u.success)).collect();
        d.set_item("users", users)?;
        d.set_item("transmissions", r.transmissions)?;
        d.set_item("subpacketization", r.subpacketization)?;
        Ok(d)
    }

    /// `(M/N, R)` of the scheme built directly from this array.
    fn proposed_point<'py>(&self, py: Python<'py>) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
        point_tuple(py, &analysis::proposed_point(&self.inner).map_err(err)?)
    }

    fn theorem1_point<'py>(&self, py: Python<'py>) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
        point_tuple(py, &analysis::theorem1_point(&self.inner).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("HpPda({})", self.inner.params())
    }
}

#[pyfunction]
#[pyo3(signature = (n, kp, m, alpha_step = DEFAULT_ALPHA_STEP))]
fn converse_bound(n: usize, kp: usize, m: f64, alpha_step: f64) -> PyResult<f64> {
    analysis::converse_bound(n, kp, m, alpha_step).map_err(err)
}

/// Lower convex envelope of `[(m_num, m_den, r_num, r_den), ...]` points in
/// the (M/N, R) plane; vertices come back as Fractions.
#[pyfunction]
#[pyo3(signature = (points, anchors = None))]
fn lower_envelope<'py>(
    py: Python<'py>,
    points: Vec<(usize, usize, usize, usize)>,
    anchors: Option<(usize, usize)>,
) -> PyResult<Vec<(Bound<'py, PyAny>, Bound<'py, PyAny>)>> {
    let pts = points
        .into_iter()
        .map(|(a, b, c, d)| match (b, d) {
            (0, _) | (_, 0) => Err(err("zero denominator")),
            _ => Ok(RatePoint::from_ints((a, b), (c, d), Scheme::Proposed)),
        })
        .collect::<PyResult<Vec<_>>>()?;
    let env = analysis::lower_envelope(&pts, anchors.map(|(n, kp)| Anchors { n, kp })).map_err(err)?;
    env.vertices
        .iter()
        .map(|(m, r)| Ok((fraction(py, &format_ratio(m))?, fraction(py, &format_ratio(r))?)))
        .collect()
}

#[pymodule]
#[pyo3(name = "hotplug_cc")]
fn hotplug_cc_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDesign>()?;
    m.add_class::<PyHpPda>()?;
    m.add_function(wrap_pyfunction!(converse_bound, m)?)?;
    m.add_function(wrap_pyfunction!(lower_envelope, m)?)?;
    Ok(())
}
