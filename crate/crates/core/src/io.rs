//! JSON encodings. Complex numbers are `[re, im]`, matrices are lists of rows.
//!
//! - circuit: `{"n_modes", "elements": [{"kind", "modes", "params": {...}}]}`
//! - transform: `{"n_modes", "A", "B", "beta"}`
//! - reduced form: `{"U", "V", "r", "beta"}`
//! - network: `{"n_modes", "stages": [{"i", "j", "theta", "phi"}], "output_phases"}`

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bogoliubov::GaussianTransform;
use crate::elements::{compile, Circuit, CircuitElement, ElementKind};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, ToleranceConfig};
use crate::reduction::BlochMessiahForm;

type Pair = [f64; 2];

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unitary: Option<Vec<Vec<Pair>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementJson {
    kind: String,
    #[serde(default)]
    modes: Vec<usize>,
    #[serde(default)]
    params: Params,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CircuitJson {
    n_modes: usize,
    elements: Vec<ElementJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TransformJson {
    n_modes: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<Pair>>,
    #[serde(rename = "B")]
    b: Vec<Vec<Pair>>,
    #[serde(default)]
    beta: Option<Vec<Pair>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FormJson {
    #[serde(rename = "U")]
    u: Vec<Vec<Pair>>,
    #[serde(rename = "V")]
    v: Vec<Vec<Pair>>,
    r: Vec<f64>,
    beta: Vec<Pair>,
}

pub fn complex_to_json(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

pub fn vector_to_json(v: &ComplexVector) -> Value {
    Value::Array(v.iter().map(|&z| complex_to_json(z)).collect())
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    serde_json::to_value(matrix_pairs(m)).expect("matrix serializes")
}

fn matrix_pairs(m: &ComplexMatrix) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn vector_pairs(v: impl IntoIterator<Item = Complex64>) -> Vec<Pair> {
    v.into_iter().map(|z| [z.re, z.im]).collect()
}

fn matrix_from_pairs(rows: &[Vec<Pair>], what: &str) -> Result<ComplexMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::invalid(format!("{what}: rows have different lengths")));
    }
    let m = ComplexMatrix::from_fn(n, m, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
    Ok(m)
}

fn vector_from_pairs(v: &[Pair]) -> Vec<Complex64> {
    v.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

fn parse<T: for<'de> Deserialize<'de>>(value: &Value, what: &str) -> Result<T> {
    serde_json::from_value(value.clone()).map_err(|e| Error::invalid(format!("bad {what} JSON: {e}")))
}

pub fn circuit_to_json(circuit: &Circuit) -> Value {
    let elements = circuit
        .elements
        .iter()
        .map(|el| {
            let mut p = Params::default();
            match &el.kind {
                ElementKind::Squeezer { r, phi } => {
                    p.r = Some(*r);
                    p.phi = Some(*phi);
                }
                ElementKind::TwoModeDownconverter { r } | ElementKind::FourModeDownconverter { r } => {
                    p.r = Some(*r)
                }
                ElementKind::Beamsplitter { theta, phi } => {
                    p.theta = Some(*theta);
                    p.phi = Some(*phi);
                }
                ElementKind::PhaseShifter { phi } => p.phi = Some(*phi),
                ElementKind::Multiport { unitary } => p.unitary = Some(matrix_pairs(unitary)),
                ElementKind::Displacement { beta } => p.beta = Some(vector_pairs(beta.iter().copied())),
                ElementKind::Permutation | ElementKind::QndCoupler => {}
            }
            ElementJson {
                kind: el.kind.name().to_string(),
                modes: el.modes.clone(),
                params: p,
            }
        })
        .collect();
    serde_json::to_value(CircuitJson {
        n_modes: circuit.n_modes,
        elements,
    })
    .expect("circuit serializes")
}

pub fn circuit_from_json(value: &Value) -> Result<Circuit> {
    let raw: CircuitJson = parse(value, "circuit")?;
    let mut circuit = Circuit::new(raw.n_modes);
    for (idx, el) in raw.elements.into_iter().enumerate() {
        let p = &el.params;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::invalid(format!("element {idx} ({}) needs param '{name}'", el.kind)))
        };
        let kind = match el.kind.as_str() {
            "squeezer" => ElementKind::Squeezer {
                r: need(p.r, "r")?,
                phi: p.phi.unwrap_or(0.0),
            },
            "two_mode_downconverter" => ElementKind::TwoModeDownconverter { r: need(p.r, "r")? },
            "four_mode_downconverter" => ElementKind::FourModeDownconverter { r: need(p.r, "r")? },
            "beamsplitter" => ElementKind::Beamsplitter {
                theta: need(p.theta, "theta")?,
                phi: p.phi.unwrap_or(0.0),
            },
            "phase_shifter" => ElementKind::PhaseShifter { phi: need(p.phi, "phi")? },
            "multiport" => {
                let rows = p.unitary.as_ref().ok_or_else(|| {
                    Error::invalid(format!("element {idx} (multiport) needs param 'unitary'"))
                })?;
                ElementKind::Multiport {
                    unitary: matrix_from_pairs(rows, "multiport unitary")?,
                }
            }
            "permutation" => ElementKind::Permutation,
            "displacement" => {
                let beta = p.beta.as_ref().ok_or_else(|| {
                    Error::invalid(format!("element {idx} (displacement) needs param 'beta'"))
                })?;
                ElementKind::Displacement {
                    beta: vector_from_pairs(beta),
                }
            }
            "qnd_coupler" => ElementKind::QndCoupler,
            other => return Err(Error::invalid(format!("element {idx}: unknown kind '{other}'"))),
        };
        circuit.elements.push(CircuitElement::new(kind, el.modes));
    }
    Ok(circuit)
}

pub fn transform_to_json(t: &GaussianTransform) -> Value {
    serde_json::to_value(TransformJson {
        n_modes: t.n_modes(),
        a: matrix_pairs(&t.a),
        b: matrix_pairs(&t.b),
        beta: Some(vector_pairs(t.beta.iter().copied())),
    })
    .expect("transform serializes")
}

pub fn transform_from_json(value: &Value) -> Result<GaussianTransform> {
    let raw: TransformJson = parse(value, "transform")?;
    let a = matrix_from_pairs(&raw.a, "A")?;
    let b = matrix_from_pairs(&raw.b, "B")?;
    if a.nrows() != raw.n_modes {
        return Err(Error::invalid(format!(
            "n_modes is {} but A has {} rows",
            raw.n_modes,
            a.nrows()
        )));
    }
    let beta = match raw.beta {
        Some(v) => ComplexVector::from_vec(vector_from_pairs(&v)),
        None => ComplexVector::zeros(raw.n_modes),
    };
    GaussianTransform::new(a, b, beta)
}

pub fn form_to_json(form: &BlochMessiahForm) -> Value {
    serde_json::to_value(FormJson {
        u: matrix_pairs(&form.u),
        v: matrix_pairs(&form.v),
        r: form.r.clone(),
        beta: vector_pairs(form.beta.iter().copied()),
    })
    .expect("form serializes")
}

pub fn form_from_json(value: &Value) -> Result<BlochMessiahForm> {
    let raw: FormJson = parse(value, "reduced form")?;
    Ok(BlochMessiahForm {
        u: matrix_from_pairs(&raw.u, "U")?,
        v: matrix_from_pairs(&raw.v, "V")?,
        r: raw.r,
        beta: ComplexVector::from_vec(vector_from_pairs(&raw.beta)),
    })
}

/// A circuit file or a transform file, told apart by their keys.
#[derive(Debug, Clone)]
pub enum Loaded {
    Circuit(Circuit),
    Transform(GaussianTransform),
}

impl Loaded {
    pub fn into_transform(self, tol: &ToleranceConfig) -> Result<GaussianTransform> {
        match self {
            Loaded::Circuit(c) => compile(&c, tol),
            Loaded::Transform(t) => Ok(t),
        }
    }
}

pub fn load_str(text: &str) -> Result<Loaded> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("invalid JSON: {e}")))?;
    if value.get("elements").is_some() {
        Ok(Loaded::Circuit(circuit_from_json(&value)?))
    } else if value.get("A").is_some() {
        Ok(Loaded::Transform(transform_from_json(&value)?))
    } else {
        Err(Error::invalid("expected a circuit ('elements') or a transform ('A')"))
    }
}
