//! Python bindings. Structured results (reports, oracle results, weights)
//! come back as plain dicts built from the same JSON the CLI emits.

use std::collections::BTreeMap;

use hybrid_witness::channels::{self, NoiseParameter};
use hybrid_witness::fock::{self, AnyState, Mixture, Mode, Party};
use hybrid_witness::states::{self, ExemplarKind, Sign};
use hybrid_witness::{cli, oracles, stokes, witness, Error, OccupationQuad, SectorSet, SqueezingParams};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

create_exception!(hybrid_witness, WitnessError, PyValueError, "Invalid input or failed computation.");
create_exception!(hybrid_witness, EmptySubspaceError, WitnessError, "Nothing left in the requested subspace.");

fn err(e: Error) -> PyErr {
    match e {
        Error::EmptySubspace(_) => EmptySubspaceError::new_err(e.to_string()),
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        _ => WitnessError::new_err(e.to_string()),
    }
}

fn subspace(spec: &str) -> PyResult<SectorSet> {
    spec.parse().map_err(err)
}

fn quad((a_h, a_v, b_h, b_v): (u32, u32, u32, u32)) -> OccupationQuad {
    OccupationQuad::new(a_h, a_v, b_h, b_v)
}

fn party(name: &str) -> PyResult<Party> {
    match name.to_ascii_lowercase().as_str() {
        "alice" | "a" => Ok(Party::Alice),
        "bob" | "b" => Ok(Party::Bob),
        _ => Err(WitnessError::new_err(format!("unknown party {name:?}"))),
    }
}

/// Serializes through JSON into native Python objects.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| err(e.into()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

#[pyclass(name = "PureState", module = "hybrid_witness", from_py_object)]
#[derive(Clone)]
pub struct PyPureState {
    inner: fock::PureState,
}

#[pymethods]
impl PyPureState {
    #[staticmethod]
    fn vacuum(n_max: u32) -> Self {
        Self { inner: fock::PureState::vacuum(n_max) }
    }

    #[staticmethod]
    fn basis(occupation: (u32, u32, u32, u32), n_max: u32) -> PyResult<Self> {
        Ok(Self { inner: fock::PureState::basis(quad(occupation), n_max).map_err(err)? })
    }

    /// From `{(n_AH, n_AV, n_BH, n_BV): amplitude}`.
    #[staticmethod]
    fn from_amplitudes(n_max: u32, amplitudes: BTreeMap<(u32, u32, u32, u32), Complex64>) -> PyResult<Self> {
        let inner =
            fock::PureState::from_amplitudes(n_max, amplitudes.into_iter().map(|(q, a)| (quad(q), a))).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: serde_json::from_str(text).map_err(|e| err(e.into()))? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| err(e.into()))
    }

    #[getter]
    fn n_max(&self) -> u32 {
        self.inner.n_max()
    }

    #[getter]
    fn leakage(&self) -> f64 {
        self.inner.leakage()
    }

    fn amplitude(&self, occupation: (u32, u32, u32, u32)) -> Complex64 {
        self.inner.amplitude(&quad(occupation))
    }

    fn amplitudes(&self) -> BTreeMap<(u32, u32, u32, u32), Complex64> {
        self.inner.iter().map(|(q, a)| ((q.a_h, q.a_v, q.b_h, q.b_v), *a)).collect()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn normalized(&self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.normalized().map_err(err)? })
    }

    fn mean_photons(&self, mode: &str) -> PyResult<f64> {
        Ok(self.inner.mean_photons(mode.parse::<Mode>().map_err(err)?))
    }

    fn inner_product(&self, other: &Self) -> PyResult<Complex64> {
        self.inner.inner_product(&other.inner).map_err(err)
    }

    /// Eigenvalues of the reduced state of `party`, ascending.
    fn reduced_eigenvalues(&self, party_name: &str) -> PyResult<Vec<f64>> {
        Ok(fock::partial_trace(&self.inner, party(party_name)?).eigenvalues())
    }

    /// Renormalized projection onto `sectors` and its probability.
    fn project(&self, sectors: &str) -> PyResult<(Self, f64)> {
        let (inner, p) = fock::project_subspace(&self.inner, &subspace(sectors)?).map_err(err)?;
        Ok((Self { inner }, p))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("PureState(n_max={}, terms={}, norm={:.6})", self.inner.n_max(), self.inner.len(), self.inner.norm())
    }
}

#[pyclass(name = "StateEnsemble", module = "hybrid_witness", from_py_object)]
#[derive(Clone)]
pub struct PyStateEnsemble {
    inner: fock::StateEnsemble,
}

#[pymethods]
impl PyStateEnsemble {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: serde_json::from_str(text).map_err(|e| err(e.into()))? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| err(e.into()))
    }

    fn branches(&self) -> Vec<(f64, PyPureState)> {
        self.inner.branches().iter().map(|b| (b.weight, PyPureState { inner: b.state.clone() })).collect()
    }

    #[getter]
    fn discarded(&self) -> f64 {
        self.inner.discarded()
    }

    #[getter]
    fn total_weight(&self) -> f64 {
        self.inner.total_weight()
    }

    fn __len__(&self) -> usize {
        self.inner.branches().len()
    }

    fn __repr__(&self) -> String {
        format!("StateEnsemble(branches={}, discarded={:.3e})", self.inner.branches().len(), self.inner.discarded())
    }
}

/// A `PureState` or a `StateEnsemble` argument.
#[derive(FromPyObject)]
enum StateArg {
    Pure(PyPureState),
    Mixed(PyStateEnsemble),
}

impl StateArg {
    fn get(&self) -> &dyn Mixture {
        match self {
            StateArg::Pure(s) => &s.inner,
            StateArg::Mixed(e) => &e.inner,
        }
    }

    fn pure(&self) -> PyResult<&fock::PureState> {
        match self {
            StateArg::Pure(s) => Ok(&s.inner),
            StateArg::Mixed(_) => Err(WitnessError::new_err("a pure state is required")),
        }
    }
}

fn ensemble(inner: fock::StateEnsemble) -> PyStateEnsemble {
    PyStateEnsemble { inner }
}

/// Reads a state file in the JSON schema used by the CLI.
#[pyfunction]
fn load_state(py: Python<'_>, path: std::path::PathBuf) -> PyResult<Py<PyAny>> {
    Ok(match cli::read_state(&path).map_err(err)? {
        AnyState::Pure(inner) => Py::new(py, PyPureState { inner })?.into_any(),
        AnyState::Mixed(inner) => Py::new(py, PyStateEnsemble { inner })?.into_any(),
    })
}

#[pyfunction]
#[pyo3(signature = (r, n_max = fock::DEFAULT_N_MAX, theta = 0.0))]
fn mbs_singlet(r: f64, n_max: u32, theta: f64) -> PyResult<PyPureState> {
    let params = SqueezingParams::new(r, theta).map_err(err)?;
    Ok(PyPureState { inner: states::mbs_singlet(params, n_max).map_err(err)? })
}

#[pyfunction]
fn sector_singlet(sector: u32, n_max: u32) -> PyResult<PyPureState> {
    Ok(PyPureState { inner: states::sector_singlet(sector, n_max).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (r, modes = ("AH".to_string(), "BV".to_string()), sign = "+", n_max = fock::DEFAULT_N_MAX))]
fn tmsv(r: f64, modes: (String, String), sign: &str, n_max: u32) -> PyResult<PyPureState> {
    let modes = (modes.0.parse().map_err(err)?, modes.1.parse().map_err(err)?);
    let sign = match sign {
        "+" | "plus" => Sign::Plus,
        "-" | "minus" => Sign::Minus,
        _ => return Err(WitnessError::new_err(format!("sign must be '+' or '-', got {sign:?}"))),
    };
    Ok(PyPureState { inner: states::tmsv(SqueezingParams::real(r).map_err(err)?, modes, sign, n_max).map_err(err)? })
}

/// `{N: weight}` of the singlet on `sectors`.
#[pyfunction]
#[pyo3(signature = (r, sectors = "full", renormalize = false))]
fn sector_probabilities(r: f64, sectors: &str, renormalize: bool) -> PyResult<BTreeMap<u32, f64>> {
    let weights =
        states::sector_probabilities(SqueezingParams::real(r).map_err(err)?, &subspace(sectors)?, renormalize)
            .map_err(err)?;
    Ok(weights.weights)
}

#[pyfunction]
fn blind_mixture(weights: BTreeMap<u32, f64>, n_max: u32) -> PyResult<PyStateEnsemble> {
    Ok(ensemble(states::blind_mixture(&weights, n_max).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (kind, alpha, beta, n_max = 3))]
fn exemplar_state(kind: &str, alpha: Complex64, beta: Complex64, n_max: u32) -> PyResult<PyPureState> {
    let kind = match kind {
        "cross_layer" => ExemplarKind::CrossLayer,
        "beam_splitter" => ExemplarKind::BeamSplitter,
        _ => return Err(WitnessError::new_err(format!("unknown exemplar {kind:?}"))),
    };
    Ok(PyPureState { inner: states::exemplar_state(kind, alpha, beta, n_max).map_err(err)? })
}

#[pyfunction]
fn beam_splitter_interfere(state: &PyPureState, transmissivity: f64) -> PyResult<PyPureState> {
    Ok(PyPureState { inner: states::beam_splitter_interfere(&state.inner, transmissivity).map_err(err)? })
}

#[pyfunction]
fn postselect_pair(state: &PyPureState, kept: Vec<(u32, u32, u32, u32)>) -> PyResult<(PyPureState, f64)> {
    let kept: Vec<_> = kept.into_iter().map(quad).collect();
    let (inner, p) = states::postselect_pair(&state.inner, &kept).map_err(err)?;
    Ok((PyPureState { inner }, p))
}

#[pyfunction]
fn estimate_squeezing(mean_photons_per_mode: f64) -> PyResult<f64> {
    states::estimate_squeezing(mean_photons_per_mode).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, sectors = "nonvacuum"))]
fn bound_number(r: f64, sectors: &str) -> PyResult<f64> {
    witness::bound_number(r, &subspace(sectors)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, sectors = "nonvacuum"))]
fn bound_polarization(r: f64, sectors: &str) -> PyResult<f64> {
    witness::bound_polarization(r, &subspace(sectors)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, sectors = "nonvacuum"))]
fn threshold(r: f64, sectors: &str) -> PyResult<f64> {
    witness::threshold(r, &subspace(sectors)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, sectors = "nonvacuum"))]
fn dominant_number_sector(r: f64, sectors: &str) -> PyResult<u32> {
    witness::dominant_number_sector(r, &subspace(sectors)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (sectors = "nonvacuum"))]
fn crossover_squeezing(sectors: &str) -> PyResult<f64> {
    witness::crossover_squeezing(&subspace(sectors)?).map_err(err)
}

/// Witness report as a dict.
#[pyfunction]
#[pyo3(signature = (state, r, sectors = "nonvacuum"))]
fn evaluate_witness<'py>(py: Python<'py>, state: StateArg, r: f64, sectors: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &witness::evaluate_witness(state.get(), r, &subspace(sectors)?).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (r, sectors = "nonvacuum", n_max = 8))]
fn oracle_number_sup<'py>(py: Python<'py>, r: f64, sectors: &str, n_max: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &oracles::oracle_number_sup(r, &subspace(sectors)?, n_max).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (r, sectors = "nonvacuum", n_max = 8, restarts = oracles::DEFAULT_RESTARTS, seed = 0))]
fn oracle_polarization_sup<'py>(
    py: Python<'py>,
    r: f64,
    sectors: &str,
    n_max: u32,
    restarts: u32,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &oracles::oracle_polarization_sup(r, &subspace(sectors)?, n_max, restarts, seed).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (sector, restarts = oracles::DEFAULT_RESTARTS, seed = 0))]
fn sector_product_max<'py>(py: Python<'py>, sector: u32, restarts: u32, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &oracles::sector_product_max(sector, restarts, seed).map_err(err)?)
}

/// Appendix chain over random product ansatz; dict with the violation count.
#[pyfunction]
#[pyo3(signature = (r, samples = 200, sectors = "full", n_max = 8, seed = 0))]
fn verify_appendix_chain<'py>(
    py: Python<'py>,
    r: f64,
    samples: u32,
    sectors: &str,
    n_max: u32,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &cli::chain_summary(r, &subspace(sectors)?, n_max, samples, seed).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (state, cap = oracles::DEFAULT_DENSE_CAP))]
fn negativity(state: &PyPureState, cap: usize) -> PyResult<f64> {
    oracles::negativity(&state.inner, cap).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (state, eta, prune = channels::DEFAULT_BRANCH_PRUNE))]
fn photon_loss(state: StateArg, eta: f64, prune: f64) -> PyResult<PyStateEnsemble> {
    Ok(ensemble(channels::photon_loss(state.get(), eta, prune).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (state, visibility, sectors = "nonvacuum"))]
fn white_noise_mix(state: StateArg, visibility: f64, sectors: &str) -> PyResult<PyStateEnsemble> {
    Ok(ensemble(channels::white_noise_mix(state.get(), visibility, &subspace(sectors)?).map_err(err)?))
}

#[pyfunction]
fn dephase_sectors(state: StateArg, strength: f64) -> PyResult<PyStateEnsemble> {
    Ok(ensemble(channels::dephase_sectors(state.get(), strength).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (parameter, r, sectors = "nonvacuum", n_max = fock::DEFAULT_N_MAX, tolerance = 1e-6))]
fn robustness_threshold(parameter: &str, r: f64, sectors: &str, n_max: u32, tolerance: f64) -> PyResult<f64> {
    let parameter: NoiseParameter = parameter.parse().map_err(err)?;
    channels::robustness_threshold(parameter, r, &subspace(sectors)?, n_max, tolerance).map_err(err)
}

#[pyfunction]
fn total_spin_squared(state: StateArg) -> PyResult<f64> {
    stokes::total_spin_squared(state.get()).map_err(err)
}

/// `{sx, sy, sz, s2, variances}` of the total spin.
#[pyfunction]
fn observables<'py>(py: Python<'py>, state: StateArg) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &stokes::observables(state.get()).map_err(err)?)
}

#[pyfunction]
fn fidelity_to_pure(state: StateArg, target: &PyPureState) -> PyResult<f64> {
    fock::fidelity_to_pure(state.get(), &target.inner).map_err(err)
}

#[pyfunction]
fn inner_product(lhs: StateArg, rhs: &PyPureState) -> PyResult<Complex64> {
    lhs.pure()?.inner_product(&rhs.inner).map_err(err)
}

#[pymodule]
#[pyo3(name = "hybrid_witness")]
pub fn hybrid_witness_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("WitnessError", py.get_type::<WitnessError>())?;
    m.add("EmptySubspaceError", py.get_type::<EmptySubspaceError>())?;
    m.add_class::<PyPureState>()?;
    m.add_class::<PyStateEnsemble>()?;
    m.add_function(wrap_pyfunction!(load_state, m)?)?;
    m.add_function(wrap_pyfunction!(mbs_singlet, m)?)?;
    m.add_function(wrap_pyfunction!(sector_singlet, m)?)?;
    m.add_function(wrap_pyfunction!(tmsv, m)?)?;
    m.add_function(wrap_pyfunction!(sector_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(blind_mixture, m)?)?;
    m.add_function(wrap_pyfunction!(exemplar_state, m)?)?;
    m.add_function(wrap_pyfunction!(beam_splitter_interfere, m)?)?;
    m.add_function(wrap_pyfunction!(postselect_pair, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_squeezing, m)?)?;
    m.add_function(wrap_pyfunction!(bound_number, m)?)?;
    m.add_function(wrap_pyfunction!(bound_polarization, m)?)?;
    m.add_function(wrap_pyfunction!(threshold, m)?)?;
    m.add_function(wrap_pyfunction!(dominant_number_sector, m)?)?;
    m.add_function(wrap_pyfunction!(crossover_squeezing, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_witness, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_number_sup, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_polarization_sup, m)?)?;
    m.add_function(wrap_pyfunction!(sector_product_max, m)?)?;
    m.add_function(wrap_pyfunction!(verify_appendix_chain, m)?)?;
    m.add_function(wrap_pyfunction!(negativity, m)?)?;
    m.add_function(wrap_pyfunction!(photon_loss, m)?)?;
    m.add_function(wrap_pyfunction!(white_noise_mix, m)?)?;
    m.add_function(wrap_pyfunction!(dephase_sectors, m)?)?;
    m.add_function(wrap_pyfunction!(robustness_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(total_spin_squared, m)?)?;
    m.add_function(wrap_pyfunction!(observables, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_to_pure, m)?)?;
    m.add_function(wrap_pyfunction!(inner_product, m)?)?;
    Ok(())
}
