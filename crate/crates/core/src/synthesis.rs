//! Triangular beam-splitter meshes for passive unitaries.
//!
//! A network applies its stages in order and then a layer of output phases,
//! so `evaluate = diag(e^{iφ}) · T_K ⋯ T_1`. Each stage is the beam splitter
//! of [`crate::elements::beamsplitter`] on an adjacent pair of modes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elements::{Circuit, ElementKind};
use crate::error::{Error, Result};
use crate::linalg::{unitarity_residual, ComplexMatrix, ToleranceConfig};
use crate::reduction::BlochMessiahForm;

/// Stages with mixing angle below this are dropped; output phases below it
/// are set to zero.
const MIN_ANGLE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub i: usize,
    pub j: usize,
    pub theta: f64,
    pub phi: f64,
}

impl Stage {
    /// Energy transmission `cos² θ`.
    pub fn transmission(&self) -> f64 {
        self.theta.cos().powi(2)
    }

    fn block(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        [
            [Complex64::new(c, 0.0), -Complex64::from_polar(s, self.phi)],
            [Complex64::from_polar(s, -self.phi), Complex64::new(c, 0.0)],
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassiveNetwork {
    pub n_modes: usize,
    pub stages: Vec<Stage>,
    pub output_phases: Vec<f64>,
}

impl PassiveNetwork {
    pub fn evaluate(&self) -> Result<ComplexMatrix> {
        evaluate(self)
    }

    /// Appends the stages as beam splitters and the non-zero output phases
    /// as phase shifters.
    pub fn append_to(&self, circuit: &mut Circuit) -> Result<()> {
        if circuit.n_modes != self.n_modes {
            return Err(Error::invalid("network and circuit mode counts differ"));
        }
        for st in &self.stages {
            circuit.beamsplitter(st.i, st.j, st.theta, st.phi);
        }
        for (m, &phi) in self.output_phases.iter().enumerate() {
            if phi != 0.0 {
                circuit.phase_shifter(m, phi);
            }
        }
        Ok(())
    }
}

fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Applies the stage's block to columns `(i, j)` from the right, conjugated:
/// `m ← m · T†`.
fn mix_columns_adjoint(m: &mut ComplexMatrix, st: &Stage) {
    let t = st.block();
    for row in 0..m.nrows() {
        let x = m[(row, st.i)];
        let y = m[(row, st.j)];
        m[(row, st.i)] = x * t[0][0].conj() + y * t[0][1].conj();
        m[(row, st.j)] = x * t[1][0].conj() + y * t[1][1].conj();
    }
}

/// Eliminates the strictly lower triangle row by row from the bottom, each
/// entry with one rotation of adjacent columns. What remains is diagonal.
pub fn synthesize(u: &ComplexMatrix, tol: &ToleranceConfig) -> Result<PassiveNetwork> {
    let n = u.nrows();
    if u.ncols() != n {
        return Err(Error::invalid("unitary must be square"));
    }
    if u.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::invalid("unitary has non-finite entries"));
    }
    let residual = unitarity_residual(u);
    if residual > tol.structural_tol {
        return Err(Error::invalid(format!(
            "matrix is not unitary (residual {residual:.3e})"
        )));
    }

    let mut work = u.clone();
    let mut eliminations = Vec::new();
    for p in (1..n).rev() {
        for q in 0..p {
            let x = work[(p, q)];
            let y = work[(p, q + 1)];
            let theta = x.norm().atan2(y.norm());
            if theta < MIN_ANGLE {
                continue;
            }
            let phi = if y.norm() == 0.0 { -x.arg() } else { y.arg() - x.arg() };
            let st = Stage {
                i: q,
                j: q + 1,
                theta,
                phi: wrap_phase(phi),
            };
            mix_columns_adjoint(&mut work, &st);
            work[(p, q)] = Complex64::new(0.0, 0.0);
            eliminations.push(st);
        }
    }
    // `u · T_1† ⋯ T_K† = D`, hence `u = D · T_K ⋯ T_1`: elimination order is
    // already the order in time.
    let output_phases = (0..n)
        .map(|k| work[(k, k)].arg())
        .map(|phi| if phi.abs() < MIN_ANGLE { 0.0 } else { phi })
        .collect();
    Ok(PassiveNetwork {
        n_modes: n,
        stages: eliminations,
        output_phases,
    })
}

pub fn evaluate(network: &PassiveNetwork) -> Result<ComplexMatrix> {
    let n = network.n_modes;
    if network.output_phases.len() != n {
        return Err(Error::invalid("network needs one output phase per mode"));
    }
    let mut m = ComplexMatrix::identity(n, n);
    for st in &network.stages {
        if st.i >= n || st.j >= n || st.i == st.j {
            return Err(Error::invalid(format!(
                "stage on modes ({}, {}) is invalid for {n} modes",
                st.i, st.j
            )));
        }
        if !(st.theta.is_finite() && st.phi.is_finite()) {
            return Err(Error::invalid("stage parameters must be finite"));
        }
        let t = st.block();
        for col in 0..n {
            let x = m[(st.i, col)];
            let y = m[(st.j, col)];
            m[(st.i, col)] = t[0][0] * x + t[0][1] * y;
            m[(st.j, col)] = t[1][0] * x + t[1][1] * y;
        }
    }
    for (k, &phi) in network.output_phases.iter().enumerate() {
        if !phi.is_finite() {
            return Err(Error::invalid("output phases must be finite"));
        }
        let z = Complex64::from_polar(1.0, phi);
        for col in 0..n {
            m[(k, col)] *= z;
        }
    }
    Ok(m)
}

/// Primitive-element circuit of a reduced form: mesh for `V†`, one squeezer
/// per non-zero `r_j`, mesh for `U`, then the displacement.
pub fn full_circuit(form: &BlochMessiahForm, tol: &ToleranceConfig) -> Result<Circuit> {
    form.check(tol)?;
    let n = form.n_modes();
    let mut circuit = Circuit::new(n);
    synthesize(&form.v.adjoint(), tol)?.append_to(&mut circuit)?;
    for (mode, &r) in form.r.iter().enumerate() {
        if r > 0.0 {
            circuit.squeezer(mode, r, 0.0);
        }
    }
    synthesize(&form.u, tol)?.append_to(&mut circuit)?;
    if form.beta.iter().any(|z| *z != Complex64::new(0.0, 0.0)) {
        circuit.push(
            ElementKind::Displacement {
                beta: form.beta.iter().copied().collect(),
            },
            (0..n).collect(),
        );
    }
    Ok(circuit)
}
