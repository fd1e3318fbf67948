//! Python bindings: curves, the imaginary quadratic field machinery, and the
//! full report pipeline (returned as JSON strings with schema
//! "lambda-transfer/1").

use lambda_transfer::congruence::{self, LevelChoice};
use lambda_transfer::curves::{self, EllipticCurveQ};
use lambda_transfer::ingest::{self, IngestConfig, Record};
use lambda_transfer::iwasawa::{self, FactorKind};
use lambda_transfer::quadfield::{self, ImagQuadField, QuadInt};
use lambda_transfer::report::{self, PipelineOptions};
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn offline_config() -> IngestConfig {
    let cache = std::env::var_os("LAMBDA_TRANSFER_CACHE")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("lambda-transfer-cache"));
    let mut c = IngestConfig::new("https://example.invalid/curves", &cache);
    c.offline = true;
    c
}

fn resolve(input: &str) -> PyResult<Record> {
    ingest::resolve_input(input, &offline_config()).map_err(err)
}

/// Integral Weierstrass model over Q.
#[pyclass(name = "Curve", skip_from_py_object)]
#[derive(Clone)]
struct PyCurve {
    inner: EllipticCurveQ,
}

#[pymethods]
impl PyCurve {
    #[new]
    #[pyo3(signature = (ainvs, label=None))]
    fn new(ainvs: Vec<BigInt>, label: Option<String>) -> PyResult<Self> {
        if ainvs.len() != 5 {
            return Err(PyValueError::new_err(
                "ainvs must be [a1, a2, a3, a4, a6]",
            ));
        }
        let mut it = ainvs.into_iter();
        let inner = EllipticCurveQ::new(
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
            label,
        )
        .map_err(err)?;
        Ok(PyCurve { inner })
    }

    /// Load a bundled fixture or a JSON record file.
    #[staticmethod]
    fn load(input: &str) -> PyResult<Self> {
        match resolve(input)? {
            Record::Curve(c) => Ok(PyCurve {
                inner: c.curve().map_err(err)?,
            }),
            Record::Eigenform(_) => Err(PyValueError::new_err(
                "record is an eigenform, not a curve",
            )),
        }
    }

    #[getter]
    fn label(&self) -> Option<String> {
        self.inner.label.clone()
    }

    #[getter]
    fn ainvs(&self) -> Vec<BigInt> {
        self.inner.ainvs().into_iter().cloned().collect()
    }

    fn discriminant(&self) -> BigInt {
        self.inner.discriminant()
    }

    fn conductor(&self) -> BigInt {
        BigInt::from(curves::conductor(&self.inner).value().clone())
    }

    /// Trace of Frobenius at a prime of good reduction (minimizing first if
    /// the model is non-minimal there).
    fn trace(&self, ell: u64) -> PyResult<i64> {
        curves::trace_of_frobenius(&self.inner, ell).map_err(err)
    }

    /// a_ell for any reduction type (±1 multiplicative, 0 additive).
    fn a_ell(&self, ell: u64) -> i64 {
        curves::a_ell_any(&self.inner, ell)
    }

    fn tamagawa_product(&self) -> BigInt {
        BigInt::from(curves::tamagawa_product(&self.inner))
    }

    /// Local reduction data at ell as a dict-shaped JSON string.
    fn local_data(&self, ell: u64) -> String {
        serde_json::to_string(&curves::local_data(&self.inner, ell)).unwrap()
    }

    /// Local invariant lambda_ell = s_ell·d_ell over Q(sqrt(-d)).
    fn local_lambda(&self, d: u64, ell: u64, p: u64) -> PyResult<String> {
        let k = ImagQuadField::new(d).map_err(err)?;
        let data = iwasawa::local_lambda(&self.inner, &k, ell, p, false).map_err(err)?;
        Ok(serde_json::to_string(&data).unwrap())
    }

    fn __repr__(&self) -> String {
        match &self.inner.label {
            Some(l) => format!("Curve({l})"),
            None => format!(
                "Curve([{}, {}, {}, {}, {}])",
                self.inner.a1, self.inner.a2, self.inner.a3, self.inner.a4, self.inner.a6
            ),
        }
    }
}

/// Imaginary quadratic field K = Q(sqrt(-d)).
#[pyclass(name = "QuadField", skip_from_py_object)]
#[derive(Clone)]
struct PyQuadField {
    inner: ImagQuadField,
}

#[pymethods]
impl PyQuadField {
    #[new]
    fn new(d: u64) -> PyResult<Self> {
        Ok(PyQuadField {
            inner: ImagQuadField::new(d).map_err(err)?,
        })
    }

    #[getter]
    fn d(&self) -> u64 {
        self.inner.d()
    }

    #[getter]
    fn class_number(&self) -> u64 {
        self.inner.class_number()
    }

    /// "Split", "Inert", or "Ramified".
    fn splitting_type(&self, ell: u64) -> String {
        format!("{:?}", self.inner.splitting_type(ell))
    }

    /// Primitive (a, b) with a² + ab + ((D+1)/4)b² = target.
    #[pyo3(signature = (target, avoid_p=None))]
    fn norm_form_representation(
        &self,
        target: BigInt,
        avoid_p: Option<u64>,
    ) -> PyResult<(BigInt, BigInt)> {
        let t = target
            .to_biguint()
            .ok_or_else(|| PyValueError::new_err("target must be positive"))?;
        self.inner.norm_form_representation(&t, avoid_p).map_err(err)
    }

    /// Norm of a + bω in O_K.
    fn norm(&self, a: BigInt, b: BigInt) -> PyResult<BigInt> {
        QuadInt::new(a, b).norm(&self.inner).map_err(err)
    }

    /// Brink's recipe at a split prime: returns the full record as JSON.
    fn brink(&self, ell: u64, p: u64) -> PyResult<String> {
        let r = quadfield::brink_s_ell(&self.inner, ell, p).map_err(err)?;
        Ok(serde_json::to_string(&r).unwrap())
    }

    /// s_ell alone.
    fn s_ell(&self, ell: u64, p: u64) -> PyResult<u64> {
        Ok(quadfield::brink_s_ell(&self.inner, ell, p).map_err(err)?.s_ell)
    }

    fn __repr__(&self) -> String {
        format!("QuadField(d={}, h={})", self.inner.d(), self.inner.class_number())
    }
}

/// Class number of the imaginary quadratic order of fundamental
/// discriminant `disc` (< 0).
#[pyfunction]
fn class_number(disc: i64) -> PyResult<u64> {
    quadfield::class_number(disc).map_err(err)
}

/// Kronecker symbol (a | n).
#[pyfunction]
fn kronecker(a: BigInt, n: BigInt) -> i32 {
    lambda_transfer::arith::kronecker(&a, &n)
}

/// Sturm bound floor(k·[SL2(Z) : Gamma_0(level)] / 12).
#[pyfunction]
fn sturm_bound(level: BigInt, weight: u32) -> PyResult<u64> {
    let m = level
        .to_biguint()
        .ok_or_else(|| PyValueError::new_err("level must be positive"))?;
    Ok(congruence::sturm_bound(&m, weight))
}

/// Multiplicity d_ell of X = ell⁻¹ in the reduced Euler factor.
#[pyfunction]
fn d_ell(a_ell: BigInt, ell: u64, kind: &str, p: u64) -> PyResult<u32> {
    let kind = match kind {
        "good" => FactorKind::Good,
        "multiplicative" => FactorKind::BadMultiplicative,
        "additive" => FactorKind::BadAdditive,
        other => {
            return Err(PyValueError::new_err(format!(
                "kind must be good/multiplicative/additive, got {other}"
            )))
        }
    };
    let f = iwasawa::euler_factor(&a_ell, ell, kind, p).map_err(err)?;
    iwasawa::d_ell(&f, p).map_err(err)
}

/// Evaluate lambda(f2) = lambda(f1) + 2·Σ(lambda_ell(f1) − lambda_ell(f2))
/// over a table of (ell, lambda_ell_f1, lambda_ell_f2).
#[pyfunction]
fn transfer_lambda(lambda_f1: u64, table: Vec<(u64, u64, u64)>) -> PyResult<u64> {
    Ok(iwasawa::transfer_lambda(lambda_f1, &table)
        .map_err(err)?
        .lambda_f2)
}

/// Inspect a record (fixture label or JSON file path): JSON report.
#[pyfunction]
#[pyo3(signature = (input, p=5, d=None))]
fn inspect(input: &str, p: u64, d: Option<u64>) -> PyResult<String> {
    let rec = resolve(input)?;
    let rep = report::run_inspect(&rec, p, d).map_err(err)?;
    Ok(serde_json::to_string_pretty(&rep).unwrap())
}

/// Residual congruence report for two records: JSON report.
#[pyfunction]
#[pyo3(signature = (input1, input2, p=5))]
fn congruent(input1: &str, input2: &str, p: u64) -> PyResult<String> {
    let r1 = resolve(input1)?;
    let r2 = resolve(input2)?;
    let f1 = report::resolve_form(&r1);
    let f2 = report::resolve_form(&r2);
    let rep = congruence::check_congruence(f1.as_form(), f2.as_form(), p, LevelChoice::Lcm)
        .map_err(err)?;
    Ok(serde_json::to_string_pretty(&rep).unwrap())
}

/// Full transfer dossier for a pair of records: JSON report with the
/// transferred lambda under "transfer.lambda_f2" on success.
#[pyfunction]
#[pyo3(signature = (input1, input2, p=5, d=51))]
fn transfer(input1: &str, input2: &str, p: u64, d: u64) -> PyResult<String> {
    let r1 = resolve(input1)?;
    let r2 = resolve(input2)?;
    let opts = PipelineOptions {
        p,
        d,
        level_choice: LevelChoice::Lcm,
        strict_congruence: false,
        audit_brink: false,
    };
    let dossier = report::run_transfer(&r1, &r2, &opts).map_err(err)?;
    Ok(serde_json::to_string_pretty(&dossier).unwrap())
}

#[pymodule]
fn lambda_transfer_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCurve>()?;
    m.add_class::<PyQuadField>()?;
    m.add_function(wrap_pyfunction!(class_number, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(sturm_bound, m)?)?;
    m.add_function(wrap_pyfunction!(d_ell, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(inspect, m)?)?;
    m.add_function(wrap_pyfunction!(congruent, m)?)?;
    m.add_function(wrap_pyfunction!(transfer, m)?)?;
    m.add("SCHEMA", report::SCHEMA)?;
    Ok(())
}
