use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<F>(f: F)
where
    F: for<'py> FnOnce(&Bound<'py, PyModule>) -> PyResult<()>,
{
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(hybrid_witness_py::hybrid_witness_py)(py);
        f(module.bind(py).cast::<PyModule>().unwrap()).unwrap();
    });
}

#[test]
fn threshold_and_witness() {
    with_module(|m| {
        let thr: f64 = m.getattr("threshold")?.call1((0.5,))?.extract()?;
        assert!((thr - 0.69243).abs() < 1e-5);
        let state = m.getattr("mbs_singlet")?.call1((0.5, 12))?;
        let report = m.getattr("evaluate_witness")?.call1((state, 0.5))?;
        let report = report.cast::<PyDict>()?;
        let verdict: String = report.get_item("verdict")?.unwrap().extract()?;
        assert_eq!(verdict, "hybrid-entangled");
        Ok(())
    });
}

#[test]
fn states_round_trip_and_accept_ensembles() {
    with_module(|m| {
        let weights = PyDict::new(m.py());
        weights.set_item(1, 0.5)?;
        weights.set_item(2, 0.5)?;
        let blind = m.getattr("blind_mixture")?.call1((weights, 4))?;
        let s2: f64 = m.getattr("total_spin_squared")?.call1((&blind,))?.extract()?;
        assert!(s2.abs() < 1e-10);
        let text: String = blind.call_method0("to_json")?.extract()?;
        let again = m.getattr("StateEnsemble")?.call_method1("from_json", (text,))?;
        assert_eq!(again.len()?, 2);
        Ok(())
    });
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(|m| {
        let vacuum = m.getattr("PureState")?.call_method1("vacuum", (2,))?;
        let err = m.getattr("evaluate_witness")?.call1((vacuum, 0.5)).unwrap_err();
        assert!(err.is_instance(m.py(), &m.getattr("EmptySubspaceError")?.cast_into()?));
        let err = m.getattr("threshold")?.call1((0.5, "1-x")).unwrap_err();
        assert!(err.is_instance(m.py(), &m.getattr("WitnessError")?.cast_into()?));
        Ok(())
    });
}
