//! Primitive optical elements and declarative circuits.
//!
//! Phase conventions (the physics fixes none of them):
//! - squeezer: `b = cosh(r) a + e^{iφ} sinh(r) a†`; `r < 0` equals phase π.
//! - two-mode down-converter: `b_i = cosh(r) a_i + sinh(r) a_j†` and symmetrically for `j`.
//! - beam splitter on `(i, j)`: `[[cos θ, -e^{iφ} sin θ], [e^{-iφ} sin θ, cos θ]]`,
//!   energy transmission `cos² θ`.
//! - phase shifter: `b = e^{iφ} a`.
//! - permutation: `modes[k]` is the output mode that input mode `k` is routed to.

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::bogoliubov::{compose_unchecked, random_transform_parts, GaussianTransform};
use crate::error::{Error, Result};
use crate::linalg::{
    require_finite, unitarity_residual, ComplexMatrix, ComplexVector, ToleranceConfig,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    Squeezer { r: f64, phi: f64 },
    TwoModeDownconverter { r: f64 },
    FourModeDownconverter { r: f64 },
    Beamsplitter { theta: f64, phi: f64 },
    PhaseShifter { phi: f64 },
    /// Unitary acting on the element's modes, in the listed order.
    Multiport { unitary: ComplexMatrix },
    /// Full bijection carried by the element's `modes`.
    Permutation,
    Displacement { beta: Vec<Complex64> },
    QndCoupler,
}

impl ElementKind {
    pub fn name(&self) -> &'static str {
        match self {
            ElementKind::Squeezer { .. } => "squeezer",
            ElementKind::TwoModeDownconverter { .. } => "two_mode_downconverter",
            ElementKind::FourModeDownconverter { .. } => "four_mode_downconverter",
            ElementKind::Beamsplitter { .. } => "beamsplitter",
            ElementKind::PhaseShifter { .. } => "phase_shifter",
            ElementKind::Multiport { .. } => "multiport",
            ElementKind::Permutation => "permutation",
            ElementKind::Displacement { .. } => "displacement",
            ElementKind::QndCoupler => "qnd_coupler",
        }
    }

    pub fn is_passive(&self) -> bool {
        matches!(
            self,
            ElementKind::Beamsplitter { .. }
                | ElementKind::PhaseShifter { .. }
                | ElementKind::Multiport { .. }
                | ElementKind::Permutation
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitElement {
    pub kind: ElementKind,
    pub modes: Vec<usize>,
}

impl CircuitElement {
    pub fn new(kind: ElementKind, modes: Vec<usize>) -> Self {
        Self { kind, modes }
    }

    /// The element as a transform on `n` modes.
    pub fn transform(&self, n: usize, tol: &ToleranceConfig) -> Result<GaussianTransform> {
        let m = &self.modes;
        let arity = |k: usize| -> Result<()> {
            if m.len() != k {
                return Err(Error::invalid(format!(
                    "{} acts on {k} mode(s), got {}",
                    self.kind.name(),
                    m.len()
                )));
            }
            Ok(())
        };
        match &self.kind {
            ElementKind::Squeezer { r, phi } => {
                arity(1)?;
                squeezer(n, m[0], *r, *phi)
            }
            ElementKind::TwoModeDownconverter { r } => {
                arity(2)?;
                two_mode_downconverter(n, m[0], m[1], *r)
            }
            ElementKind::FourModeDownconverter { r } => {
                arity(4)?;
                four_mode_downconverter(n, [m[0], m[1], m[2], m[3]], *r)
            }
            ElementKind::Beamsplitter { theta, phi } => {
                arity(2)?;
                beamsplitter(n, m[0], m[1], *theta, *phi)
            }
            ElementKind::PhaseShifter { phi } => {
                arity(1)?;
                phase_shifter(n, m[0], *phi)
            }
            ElementKind::Multiport { unitary } => multiport_on(n, m, unitary, tol),
            ElementKind::Permutation => permutation(n, m),
            ElementKind::Displacement { beta } => {
                if beta.len() != m.len() {
                    return Err(Error::invalid("displacement needs one amplitude per mode"));
                }
                check_modes(n, m)?;
                let mut full = vec![ZERO; n];
                for (&k, &z) in m.iter().zip(beta) {
                    full[k] = z;
                }
                displacement(n, &full)
            }
            ElementKind::QndCoupler => {
                arity(2)?;
                check_modes(n, m)?;
                let local = qnd_coupler();
                Ok(embed(n, m, &local.a, &local.b))
            }
        }
    }
}

/// Elements applied left to right in time.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_modes: usize,
    pub elements: Vec<CircuitElement>,
}

impl Circuit {
    pub fn new(n_modes: usize) -> Self {
        Self {
            n_modes,
            elements: Vec::new(),
        }
    }

    pub fn push(&mut self, kind: ElementKind, modes: Vec<usize>) -> &mut Self {
        self.elements.push(CircuitElement::new(kind, modes));
        self
    }

    pub fn squeezer(&mut self, mode: usize, r: f64, phi: f64) -> &mut Self {
        self.push(ElementKind::Squeezer { r, phi }, vec![mode])
    }

    pub fn two_mode_downconverter(&mut self, i: usize, j: usize, r: f64) -> &mut Self {
        self.push(ElementKind::TwoModeDownconverter { r }, vec![i, j])
    }

    pub fn four_mode_downconverter(&mut self, modes: [usize; 4], r: f64) -> &mut Self {
        self.push(ElementKind::FourModeDownconverter { r }, modes.to_vec())
    }

    pub fn beamsplitter(&mut self, i: usize, j: usize, theta: f64, phi: f64) -> &mut Self {
        self.push(ElementKind::Beamsplitter { theta, phi }, vec![i, j])
    }

    pub fn phase_shifter(&mut self, mode: usize, phi: f64) -> &mut Self {
        self.push(ElementKind::PhaseShifter { phi }, vec![mode])
    }

    pub fn permutation(&mut self, perm: Vec<usize>) -> &mut Self {
        self.push(ElementKind::Permutation, perm)
    }

    pub fn count(&self, pred: impl Fn(&ElementKind) -> bool) -> usize {
        self.elements.iter().filter(|e| pred(&e.kind)).count()
    }
}

/// Composes the circuit's elements in order.
pub fn compile(circuit: &Circuit, tol: &ToleranceConfig) -> Result<GaussianTransform> {
    let n = circuit.n_modes;
    circuit
        .elements
        .iter()
        .try_fold(GaussianTransform::identity(n), |acc, el| {
            let t = el.transform(n, tol)?;
            Ok(compose_unchecked(&t, &acc))
        })
}

fn check_modes(n: usize, modes: &[usize]) -> Result<()> {
    let mut seen = HashSet::new();
    for &m in modes {
        if m >= n {
            return Err(Error::invalid(format!("mode {m} out of range for {n} modes")));
        }
        if !seen.insert(m) {
            return Err(Error::invalid(format!("mode {m} repeated")));
        }
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("element parameters must be finite"))
    }
}

/// Identity on `n` modes except for the `(a, b)` block on `modes`.
fn embed(n: usize, modes: &[usize], a: &ComplexMatrix, b: &ComplexMatrix) -> GaussianTransform {
    let mut t = GaussianTransform::identity(n);
    for (li, &gi) in modes.iter().enumerate() {
        for (lj, &gj) in modes.iter().enumerate() {
            t.a[(gi, gj)] = a[(li, lj)];
            t.b[(gi, gj)] = b[(li, lj)];
        }
    }
    t
}

pub fn squeezer(n: usize, mode: usize, r: f64, phi: f64) -> Result<GaussianTransform> {
    check_modes(n, &[mode])?;
    check_finite(&[r, phi])?;
    let a = ComplexMatrix::from_element(1, 1, Complex64::new(r.cosh(), 0.0));
    let b = ComplexMatrix::from_element(1, 1, Complex64::from_polar(r.sinh(), phi));
    Ok(embed(n, &[mode], &a, &b))
}

pub fn two_mode_downconverter(n: usize, i: usize, j: usize, r: f64) -> Result<GaussianTransform> {
    check_modes(n, &[i, j])?;
    check_finite(&[r])?;
    let (c, s) = (Complex64::new(r.cosh(), 0.0), Complex64::new(r.sinh(), 0.0));
    let a = ComplexMatrix::from_row_slice(2, 2, &[c, ZERO, ZERO, c]);
    let b = ComplexMatrix::from_row_slice(2, 2, &[ZERO, s, s, ZERO]);
    Ok(embed(n, &[i, j], &a, &b))
}

/// Pair creation on `(m1, m2)` and `(m3, m4)` with a common strength.
pub fn four_mode_downconverter(n: usize, modes: [usize; 4], r: f64) -> Result<GaussianTransform> {
    check_modes(n, &modes)?;
    check_finite(&[r])?;
    let (c, s) = (Complex64::new(r.cosh(), 0.0), Complex64::new(r.sinh(), 0.0));
    let mut a = ComplexMatrix::zeros(4, 4);
    let mut b = ComplexMatrix::zeros(4, 4);
    for k in 0..4 {
        a[(k, k)] = c;
        b[(k, k ^ 1)] = s;
    }
    Ok(embed(n, &modes, &a, &b))
}

pub fn beamsplitter(n: usize, i: usize, j: usize, theta: f64, phi: f64) -> Result<GaussianTransform> {
    check_modes(n, &[i, j])?;
    check_finite(&[theta, phi])?;
    let (s, c) = theta.sin_cos();
    let a = ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            -Complex64::from_polar(s, phi),
            Complex64::from_polar(s, -phi),
            Complex64::new(c, 0.0),
        ],
    );
    Ok(embed(n, &[i, j], &a, &ComplexMatrix::zeros(2, 2)))
}

pub fn phase_shifter(n: usize, mode: usize, phi: f64) -> Result<GaussianTransform> {
    check_modes(n, &[mode])?;
    check_finite(&[phi])?;
    let a = ComplexMatrix::from_element(1, 1, Complex64::from_polar(1.0, phi));
    Ok(embed(n, &[mode], &a, &ComplexMatrix::zeros(1, 1)))
}

/// Passive transform `A = U` on all `n` modes.
pub fn multiport(n: usize, u: &ComplexMatrix, tol: &ToleranceConfig) -> Result<GaussianTransform> {
    let modes: Vec<usize> = (0..n).collect();
    multiport_on(n, &modes, u, tol)
}

pub fn multiport_on(
    n: usize,
    modes: &[usize],
    u: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<GaussianTransform> {
    check_modes(n, modes)?;
    if u.nrows() != modes.len() || u.ncols() != modes.len() {
        return Err(Error::invalid(format!(
            "multiport unitary is {}x{} but acts on {} modes",
            u.nrows(),
            u.ncols(),
            modes.len()
        )));
    }
    require_finite(u, "multiport unitary")?;
    let residual = unitarity_residual(u);
    if residual > tol.structural_tol {
        return Err(Error::ConstraintViolation {
            check: "unitarity",
            residual,
            tol: tol.structural_tol,
        });
    }
    Ok(embed(n, modes, u, &ComplexMatrix::zeros(modes.len(), modes.len())))
}

/// Routes input mode `k` to output mode `perm[k]`.
pub fn permutation(n: usize, perm: &[usize]) -> Result<GaussianTransform> {
    if perm.len() != n {
        return Err(Error::invalid(format!(
            "permutation must list all {n} modes, got {}",
            perm.len()
        )));
    }
    check_modes(n, perm)?;
    let mut t = GaussianTransform::identity(n);
    t.a.fill(ZERO);
    for (k, &dst) in perm.iter().enumerate() {
        t.a[(dst, k)] = ONE;
    }
    Ok(t)
}

pub fn displacement(n: usize, beta: &[Complex64]) -> Result<GaussianTransform> {
    if beta.len() != n {
        return Err(Error::invalid("displacement needs one amplitude per mode"));
    }
    if beta.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::invalid("displacement amplitudes must be finite"));
    }
    let mut t = GaussianTransform::identity(n);
    t.beta = ComplexVector::from_column_slice(beta);
    Ok(t)
}

/// Ideal quadrature QND coupling:
/// `b1 = a1 - a2/2 + a2†/2`, `b2 = a1/2 + a2 + a1†/2`.
pub fn qnd_coupler() -> GaussianTransform {
    let h = Complex64::new(0.5, 0.0);
    GaussianTransform {
        a: ComplexMatrix::from_row_slice(2, 2, &[ONE, -h, h, ONE]),
        b: ComplexMatrix::from_row_slice(2, 2, &[ZERO, h, h, ZERO]),
        beta: ComplexVector::zeros(2),
    }
}

/// Named circuits: `qnd`, `d2[:r]`, `e4[:r]`, `fig2[:r]`, `fig2-literal[:r]`,
/// `fig3[:r]`, `random[:n]` (uses `seed`, squeezing up to 1). Default `r = 0.5`,
/// default `n = 4`.
pub fn builtin(spec: &str, seed: u64) -> Result<Circuit> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let num = |default: f64| -> Result<f64> {
        match arg {
            None => Ok(default),
            Some(a) => a
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad builtin parameter '{a}'"))),
        }
    };
    let r = num(0.5)?;
    let circuit = match name {
        "qnd" => {
            let mut c = Circuit::new(2);
            c.push(ElementKind::QndCoupler, vec![0, 1]);
            c
        }
        "d2" => {
            let mut c = Circuit::new(2);
            c.two_mode_downconverter(0, 1, r);
            c
        }
        "e4" => {
            let mut c = Circuit::new(4);
            c.four_mode_downconverter([0, 1, 2, 3], r);
            c
        }
        "fig2" => fig2_circuit(r),
        "fig2-literal" => fig2_literal_circuit(r),
        "fig3" => fig3_circuit(r),
        "random" => {
            let n = num(4.0)?;
            if n < 1.0 || n.fract() != 0.0 {
                return Err(Error::invalid("random builtin needs a positive integer mode count"));
            }
            let parts = random_transform_parts(n as usize, 1.0, seed);
            let n = n as usize;
            let all: Vec<usize> = (0..n).collect();
            let mut c = Circuit::new(n);
            c.push(ElementKind::Multiport { unitary: parts.unitary_in }, all.clone());
            for (k, r) in parts.squeezing.iter().enumerate() {
                c.squeezer(k, *r, 0.0);
            }
            c.push(ElementKind::Multiport { unitary: parts.unitary_out }, all);
            c
        }
        other => return Err(Error::invalid(format!("unknown builtin '{other}'"))),
    };
    Ok(circuit)
}

/// Two opposite squeezers between a balanced splitter and its inverse. Equal
/// to `two_mode_downconverter(r)` as a transform; on vacuum input the first
/// splitter is inert and the circuit reduces to squeezers plus one 50:50 splitter.
pub fn fig2_circuit(r: f64) -> Circuit {
    let mut c = Circuit::new(2);
    c.beamsplitter(0, 1, -FRAC_PI_4, 0.0)
        .squeezer(0, r, 0.0)
        .squeezer(1, -r, 0.0)
        .beamsplitter(0, 1, FRAC_PI_4, 0.0);
    c
}

/// Squeezers followed by a single 50:50 splitter, as drawn.
pub fn fig2_literal_circuit(r: f64) -> Circuit {
    let mut c = Circuit::new(2);
    c.squeezer(0, r, 0.0)
        .squeezer(1, -r, 0.0)
        .beamsplitter(0, 1, FRAC_PI_4, 0.0);
    c
}

/// Two independent pair sources whose outputs are re-routed by polarizing
/// splitters (modelled as a mode permutation).
pub fn fig3_circuit(r: f64) -> Circuit {
    let mut c = Circuit::new(4);
    c.two_mode_downconverter(0, 1, r)
        .two_mode_downconverter(2, 3, r)
        .permutation(vec![0, 2, 1, 3]);
    c
}
