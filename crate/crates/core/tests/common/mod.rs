//! Reference computations for the integration and acceptance tests. None of
//! these call the library's factorizations or Fock routines.

#![allow(dead_code)]

use std::collections::HashMap;

use gauss_reduce::{Circuit, ComplexMatrix, ElementKind, GaussianTransform};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Singular values straight from nalgebra, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// The four Bogoliubov constraints, computed directly.
pub fn constraint_residuals(t: &GaussianTransform) -> [f64; 4] {
    let n = t.a.nrows();
    let id = ComplexMatrix::identity(n, n);
    let (a, b) = (&t.a, &t.b);
    let ab_t = a * b.transpose();
    let ad_b = a.adjoint() * b;
    [
        max_abs(&(&ab_t - ab_t.transpose())),
        max_abs(&(a * a.adjoint() - b * b.adjoint() - &id)),
        max_abs(&(&ad_b - ad_b.transpose())),
        max_abs(&(a.adjoint() * a - (b.adjoint() * b).transpose() - &id)),
    ]
}

/// State matrix of the vacuum image: the output is annihilated by
/// `A† a − Bᵀ a†`, which forces `Z = (A†)⁻¹ Bᵀ`.
pub fn vacuum_state_matrix(t: &GaussianTransform) -> ComplexMatrix {
    let inv = t.a.adjoint().try_inverse().expect("A is invertible");
    inv * t.b.transpose()
}

/// Hafnian by expansion over perfect matchings of the first index.
pub fn hafnian(m: &ComplexMatrix) -> Complex64 {
    fn rec(m: &ComplexMatrix, idx: &mut Vec<usize>) -> Complex64 {
        if idx.is_empty() {
            return c(1.0);
        }
        let first = idx.remove(0);
        let mut acc = ZERO;
        for k in 0..idx.len() {
            let partner = idx.remove(k);
            acc += m[(first, partner)] * rec(m, idx);
            idx.insert(k, partner);
        }
        idx.insert(0, first);
        acc
    }
    if m.nrows() % 2 == 1 {
        return ZERO;
    }
    rec(m, &mut (0..m.nrows()).collect())
}

/// Amplitude of `exp(½ a† Z a†)|0⟩` on an occupation tuple:
/// `haf(Z with index j repeated n_j times) / √(Π n_j!)`.
pub fn gaussian_amplitude(z: &ComplexMatrix, occ: &[usize]) -> Complex64 {
    let idx: Vec<usize> = occ.iter().enumerate().flat_map(|(j, &n)| std::iter::repeat_n(j, n)).collect();
    let sub = ComplexMatrix::from_fn(idx.len(), idx.len(), |p, q| z[(idx[p], idx[q])]);
    let norm: f64 = occ.iter().map(|&n| factorial(n)).product();
    hafnian(&sub) / norm.sqrt()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// All occupation tuples of `n` modes with total at most `cutoff`,
/// lexicographic.
pub fn tuples(n: usize, cutoff: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, cutoff, &mut Vec::new(), &mut out);
    out
}

/// Dense truncated Fock space for the circuit simulator.
pub struct Space {
    pub n: usize,
    pub cutoff: usize,
    pub states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl Space {
    pub fn new(n: usize, cutoff: usize) -> Self {
        let states = tuples(n, cutoff);
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self { n, cutoff, states, index }
    }

    pub fn vacuum(&self) -> Vec<Complex64> {
        let mut v = vec![ZERO; self.states.len()];
        v[0] = c(1.0);
        v
    }

    pub fn get(&self, occ: &[usize]) -> Option<usize> {
        self.index.get(occ).copied()
    }
}

/// A quadratic generator as a sum of monomials `coef · ops`, where `ops` is
/// a list of `(mode, creation?)` applied right to left.
struct Generator {
    terms: Vec<(Complex64, Vec<(usize, bool)>)>,
    norm_bound: f64,
}

impl Generator {
    fn apply(&self, space: &Space, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; v.len()];
        for (idx, &amp) in v.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            for (coef, ops) in &self.terms {
                let mut occ = space.states[idx].clone();
                let mut factor = 1.0;
                let mut alive = true;
                for &(mode, create) in ops.iter().rev() {
                    if create {
                        occ[mode] += 1;
                        factor *= (occ[mode] as f64).sqrt();
                    } else if occ[mode] == 0 {
                        alive = false;
                        break;
                    } else {
                        factor *= (occ[mode] as f64).sqrt();
                        occ[mode] -= 1;
                    }
                }
                if !alive {
                    continue;
                }
                if let Some(dst) = space.get(&occ) {
                    out[dst] += coef * amp * factor;
                }
            }
        }
        out
    }

    /// `exp(G) v` by Taylor series on sub-steps with `‖G‖/steps ≤ 1/2`.
    fn exp_apply(&self, space: &Space, v: &[Complex64]) -> Vec<Complex64> {
        let steps = (2.0 * self.norm_bound).ceil().max(1.0) as usize;
        let scale = 1.0 / steps as f64;
        let mut cur = v.to_vec();
        for _ in 0..steps {
            let mut term = cur.clone();
            let mut sum = cur.clone();
            for k in 1..80 {
                term = self.apply(space, &term);
                let f = scale / k as f64;
                term.iter_mut().for_each(|z| *z *= f);
                sum.iter_mut().zip(&term).for_each(|(s, t)| *s += t);
                let tn: f64 = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if tn < 1e-18 {
                    break;
                }
            }
            cur = sum;
        }
        cur
    }
}

/// Schrödinger-picture simulation of a circuit acting on vacuum, truncated
/// at `space.cutoff` total photons. Squeezers, down-converters and beam
/// splitters are exponentiated from their generators; phase shifters and
/// permutations act exactly.
pub fn simulate_vacuum(circuit: &Circuit, space: &Space) -> Vec<Complex64> {
    let nc = space.cutoff as f64 + 2.0;
    let mut v = space.vacuum();
    for el in &circuit.elements {
        let m = &el.modes;
        match &el.kind {
            ElementKind::Squeezer { r, phi } => {
                let zeta = Complex64::from_polar(*r, *phi);
                let g = Generator {
                    terms: vec![
                        (zeta * 0.5, vec![(m[0], true), (m[0], true)]),
                        (-zeta.conj() * 0.5, vec![(m[0], false), (m[0], false)]),
                    ],
                    norm_bound: r.abs() * nc,
                };
                v = g.exp_apply(space, &v);
            }
            ElementKind::TwoModeDownconverter { r } => {
                v = two_mode(space, &v, m[0], m[1], *r, nc);
            }
            ElementKind::FourModeDownconverter { r } => {
                v = two_mode(space, &v, m[0], m[1], *r, nc);
                v = two_mode(space, &v, m[2], m[3], *r, nc);
            }
            ElementKind::Beamsplitter { theta, phi } => {
                let e = Complex64::from_polar(*theta, *phi);
                let g = Generator {
                    terms: vec![
                        (-e, vec![(m[0], true), (m[1], false)]),
                        (e.conj(), vec![(m[1], true), (m[0], false)]),
                    ],
                    norm_bound: theta.abs() * nc,
                };
                v = g.exp_apply(space, &v);
            }
            ElementKind::PhaseShifter { phi } => {
                for (idx, z) in v.iter_mut().enumerate() {
                    *z *= Complex64::from_polar(1.0, phi * space.states[idx][m[0]] as f64);
                }
            }
            ElementKind::Permutation => {
                let mut out = vec![ZERO; v.len()];
                for (idx, &z) in v.iter().enumerate() {
                    let mut occ = vec![0; space.n];
                    for (k, &dst) in m.iter().enumerate() {
                        occ[dst] = space.states[idx][k];
                    }
                    out[space.get(&occ).unwrap()] = z;
                }
                v = out;
            }
            other => panic!("simulator does not support {}", other.name()),
        }
    }
    v
}

fn two_mode(space: &Space, v: &[Complex64], i: usize, j: usize, r: f64, nc: f64) -> Vec<Complex64> {
    let g = Generator {
        terms: vec![
            (c(r), vec![(i, true), (j, true)]),
            (c(-r), vec![(i, false), (j, false)]),
        ],
        norm_bound: r.abs() * nc,
    };
    g.exp_apply(space, v)
}

/// `‖UU† − I‖_max`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u * u.adjoint() - ComplexMatrix::identity(n, n)))
}

/// Beam-splitter block product for a list of stages, independent of the
/// library's evaluator: `diag(e^{iφ_out}) · T_K ⋯ T_1`.
pub fn network_matrix(n: usize, stages: &[(usize, usize, f64, f64)], phases: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(n, n);
    for &(i, j, theta, phi) in stages {
        let mut t = ComplexMatrix::identity(n, n);
        t[(i, i)] = c(theta.cos());
        t[(i, j)] = -Complex64::from_polar(theta.sin(), phi);
        t[(j, i)] = Complex64::from_polar(theta.sin(), -phi);
        t[(j, j)] = c(theta.cos());
        m = t * m;
    }
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        phases.iter().map(|&p| Complex64::from_polar(1.0, p)),
    ));
    d * m
}
