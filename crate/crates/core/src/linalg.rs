//! Dense matrix kernels with explicit tolerance contracts.
//!
//! Complex SVD, QR and LU come from `nalgebra`. The symmetric eigensolver is a
//! cyclic Jacobi iteration: it leaves exactly-zero couplings untouched, so
//! block-decoupled inputs (for instance quadrature blocks that never mix)
//! produce eigenvectors that respect the blocks.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealMatrix = DMatrix<f64>;
pub type ComplexVector = DVector<Complex64>;

const JACOBI_MAX_SWEEPS: usize = 80;
const POLAR_MAX_ITERS: usize = 100;

/// Numerical tolerances shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Absolute max-norm bound for structural checks (unitarity, symplecticity, residuals).
    pub structural_tol: f64,
    /// Relative gap below which singular values or squeezing parameters are grouped.
    pub degeneracy_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            structural_tol: 1e-10,
            degeneracy_tol: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn new(structural_tol: f64, degeneracy_tol: f64) -> Result<Self> {
        for (name, v) in [("structural_tol", structural_tol), ("degeneracy_tol", degeneracy_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            structural_tol,
            degeneracy_tol,
        })
    }
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RealMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_vec(v: &ComplexVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn require_finite(m: &ComplexMatrix, what: &str) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} has non-finite entries")))
    }
}

pub(crate) fn require_square(m: &ComplexMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::invalid(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// `max |U U† - I|`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u * u.adjoint() - ComplexMatrix::identity(n, n)))
}

pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    u.nrows() == u.ncols() && unitarity_residual(u) <= tol
}

/// The symplectic form `[[0, I], [-I, 0]]` in xxpp ordering.
pub fn symplectic_form(n: usize) -> RealMatrix {
    let mut omega = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        omega[(i, n + i)] = 1.0;
        omega[(n + i, i)] = -1.0;
    }
    omega
}

/// Real 2n x 2n image `[[Re U, -Im U], [Im U, Re U]]` of a complex n x n matrix.
pub fn realify(u: &ComplexMatrix) -> RealMatrix {
    let n = u.nrows();
    let m = u.ncols();
    let mut r = RealMatrix::zeros(2 * n, 2 * m);
    for i in 0..n {
        for j in 0..m {
            let z = u[(i, j)];
            r[(i, j)] = z.re;
            r[(i, m + j)] = -z.im;
            r[(n + i, j)] = z.im;
            r[(n + i, m + j)] = z.re;
        }
    }
    r
}

/// Inverse of [`realify`], averaging the redundant blocks.
pub fn complexify(r: &RealMatrix) -> ComplexMatrix {
    let n = r.nrows() / 2;
    let m = r.ncols() / 2;
    ComplexMatrix::from_fn(n, m, |i, j| {
        Complex64::new(
            0.5 * (r[(i, j)] + r[(n + i, m + j)]),
            0.5 * (r[(n + i, j)] - r[(i, m + j)]),
        )
    })
}

pub fn to_complex(r: &RealMatrix) -> ComplexMatrix {
    r.map(|x| Complex64::new(x, 0.0))
}

pub fn diag_complex(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(values[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Groups consecutive entries of a descending sequence whose gap is at most
/// `rel_tol` relative to the larger entry.
pub fn degenerate_groups(sorted_desc: &[f64], rel_tol: f64) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=sorted_desc.len() {
        let split = i == sorted_desc.len() || {
            let (a, b) = (sorted_desc[i - 1], sorted_desc[i]);
            let scale = a.abs().max(b.abs());
            (a - b).abs() > rel_tol * scale
        };
        if split {
            if start < i {
                groups.push(start..i);
            }
            start = i;
        }
    }
    groups
}

/// `M = U diag(sigma) V†`, sigma descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn degenerate_blocks(&self, rel_tol: f64) -> Vec<Range<usize>> {
        degenerate_groups(&self.sigma, rel_tol)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.u * diag_complex(&self.sigma) * self.v.adjoint()
    }
}

/// Singular value decomposition of a complex matrix.
///
/// Each column of `U` is rotated so that its first non-negligible entry is
/// real and positive; the matching column of `V` absorbs the same phase.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    require_finite(m, "svd input")?;
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Ok(Svd {
            u: ComplexMatrix::zeros(m.nrows(), 0),
            sigma: Vec::new(),
            v: ComplexMatrix::zeros(m.ncols(), 0),
        });
    }
    let raw = m.clone().svd(true, true);
    let (u_raw, v_t_raw) = match (raw.u, raw.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => {
            return Err(Error::NumericalFailure {
                reason: "svd did not return singular vectors".into(),
                residual: f64::NAN,
            })
        }
    };
    let v_raw = v_t_raw.adjoint();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        raw.singular_values[b]
            .partial_cmp(&raw.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut u = ComplexMatrix::zeros(m.nrows(), k);
    let mut v = ComplexMatrix::zeros(m.ncols(), k);
    let mut sigma = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        sigma.push(raw.singular_values[src]);
        u.set_column(dst, &u_raw.column(src));
        v.set_column(dst, &v_raw.column(src));
    }

    for j in 0..k {
        let col_max = u.column(j).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        let lead = u.column(j).iter().copied().find(|z| z.norm() > 1e-8 * col_max);
        if let Some(lead) = lead {
            let phase = Complex64::from_polar(1.0, -lead.arg());
            for z in u.column_mut(j).iter_mut() {
                *z *= phase;
            }
            for z in v.column_mut(j).iter_mut() {
                *z *= phase;
            }
        }
    }

    Ok(Svd { u, sigma, v })
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: RealMatrix,
}

impl SymmetricEigen {
    pub fn reconstruct(&self) -> RealMatrix {
        let d = RealMatrix::from_diagonal(&DVector::from_column_slice(&self.values));
        &self.vectors * d * self.vectors.transpose()
    }
}

pub fn eigh_symmetric(m: &RealMatrix, tol: &ToleranceConfig) -> Result<SymmetricEigen> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::invalid("eigh_symmetric needs a square matrix"));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("eigh_symmetric input has non-finite entries"));
    }
    let asym = max_abs_real(&(m - m.transpose()));
    if asym > tol.structural_tol {
        return Err(Error::invalid(format!(
            "matrix is not symmetric (max |M - M^T| = {asym:.3e})"
        )));
    }

    // Row-major working copy of the symmetrized input.
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (m[(i, j)] + m[(j, i)]);
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    jacobi_sweeps(&mut a, &mut v, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| {
        a[q * n + q]
            .partial_cmp(&a[p * n + p])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(p.cmp(&q))
    });
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = RealMatrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
    Ok(SymmetricEigen { values, vectors })
}

fn jacobi_sweeps(a: &mut [f64], v: &mut [f64], n: usize) -> Result<()> {
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum();
        if off == 0.0 {
            return Ok(());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let h = aqq - app;
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let gj = a[j * n + p];
                    let hj = a[j * n + q];
                    let new_p = gj - s * (hj + gj * tau);
                    let new_q = hj + s * (gj - hj * tau);
                    a[j * n + p] = new_p;
                    a[p * n + j] = new_p;
                    a[j * n + q] = new_q;
                    a[q * n + j] = new_q;
                }
                for j in 0..n {
                    let gj = v[j * n + p];
                    let hj = v[j * n + q];
                    v[j * n + p] = gj - s * (hj + gj * tau);
                    v[j * n + q] = hj + s * (gj - hj * tau);
                }
            }
        }
    }
    let off: f64 = (0..n)
        .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
        .map(|(p, q)| a[p * n + q] * a[p * n + q])
        .sum();
    Err(Error::NumericalFailure {
        reason: "Jacobi eigensolver did not converge".into(),
        residual: off.sqrt(),
    })
}

/// `S = O P` with `O` orthogonal and `P = (S^T S)^{1/2}`.
#[derive(Debug, Clone)]
pub struct Polar {
    pub orthogonal: RealMatrix,
    pub positive: RealMatrix,
}

/// Polar decomposition by the scaled Newton iteration `X <- (g X + X^{-T} / g) / 2`.
pub fn polar_decompose(s: &RealMatrix, tol: &ToleranceConfig) -> Result<Polar> {
    let n = s.nrows();
    if n != s.ncols() {
        return Err(Error::invalid("polar_decompose needs a square matrix"));
    }
    if s.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("polar_decompose input has non-finite entries"));
    }
    if n == 0 {
        return Ok(Polar {
            orthogonal: s.clone(),
            positive: s.clone(),
        });
    }
    let smallest = s
        .clone()
        .singular_values()
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    if smallest <= tol.structural_tol {
        return Err(Error::SingularInput(smallest));
    }

    let mut x = s.clone();
    let mut scaling = true;
    let mut converged = false;
    let mut delta = f64::INFINITY;
    for _ in 0..POLAR_MAX_ITERS {
        let inv = x
            .clone()
            .try_inverse()
            .ok_or(Error::SingularInput(smallest))?;
        let gamma = if scaling {
            (inv.norm() / x.norm()).sqrt()
        } else {
            1.0
        };
        let next = (&x * gamma + inv.transpose() / gamma) * 0.5;
        delta = (&next - &x).norm() / next.norm();
        x = next;
        if converged {
            break;
        }
        if delta < 1e-2 {
            scaling = false;
        }
        if delta < 1e-13 {
            // One more unscaled step to settle the last bits.
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure {
            reason: "polar iteration did not converge".into(),
            residual: delta,
        });
    }
    let p = x.transpose() * s;
    let positive = (&p + p.transpose()) * 0.5;
    Ok(Polar {
        orthogonal: x,
        positive,
    })
}

/// `M = W diag(d) W^T` for complex symmetric `M`, `W` unitary, `d` descending.
#[derive(Debug, Clone)]
pub struct Takagi {
    pub w: ComplexMatrix,
    pub d: Vec<f64>,
}

impl Takagi {
    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.w * diag_complex(&self.d) * self.w.transpose()
    }
}

/// Takagi factorization through the real symmetric embedding
/// `[[Re M, Im M], [Im M, -Re M]]`, whose eigenvalues are `±d`.
pub fn takagi(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Takagi> {
    let n = require_square(m, "takagi input")?;
    require_finite(m, "takagi input")?;
    let asym = max_abs(&(m - m.transpose()));
    if asym > tol.structural_tol {
        return Err(Error::invalid(format!(
            "matrix is not symmetric (max |M - M^T| = {asym:.3e})"
        )));
    }
    if n == 0 {
        return Ok(Takagi {
            w: ComplexMatrix::zeros(0, 0),
            d: Vec::new(),
        });
    }
    let sym = (m + m.transpose()) * Complex64::new(0.5, 0.0);
    let mut h = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = sym[(i, j)];
            h[(i, j)] = z.re;
            h[(i, n + j)] = z.im;
            h[(n + i, j)] = z.im;
            h[(n + i, n + j)] = -z.re;
        }
    }
    let eig = eigh_symmetric(&h, tol)?;
    let candidates: Vec<ComplexVector> = (0..n)
        .map(|j| {
            ComplexVector::from_fn(n, |i, _| {
                Complex64::new(eig.vectors[(i, j)], eig.vectors[(n + i, j)])
            })
        })
        .collect();
    // Columns for positive values are complex-orthogonal up to round-off; the
    // zero block may hold pairs (w, i w), which Gram-Schmidt drops and the
    // completion step refills.
    let mut cols: Vec<ComplexVector> = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for (j, cand) in candidates.iter().enumerate() {
        let mut w = cand.clone();
        for q in &cols {
            let proj = q.dotc(&w);
            w -= q * proj;
        }
        let norm = w.norm();
        if norm > 0.5 {
            cols.push(w / Complex64::new(norm, 0.0));
            d.push(eig.values[j].max(0.0));
        }
    }
    let cols = complete_orthonormal(cols, n);
    d.resize(n, 0.0);
    let w = ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]);
    Ok(Takagi { w, d })
}

/// Extends an orthonormal set to a basis of C^n using standard basis
/// vectors, picking the best-conditioned candidate at each step.
pub(crate) fn complete_orthonormal(mut basis: Vec<ComplexVector>, n: usize) -> Vec<ComplexVector> {
    let candidates: Vec<ComplexVector> = (0..n)
        .map(|k| {
            let mut e = ComplexVector::zeros(n);
            e[k] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    extend_pivoted(&mut basis, &candidates, n);
    basis
}

/// Pivoted complex Gram-Schmidt: appends the candidate with the largest
/// residual until `target` vectors are present or candidates run out.
pub(crate) fn extend_pivoted(basis: &mut Vec<ComplexVector>, candidates: &[ComplexVector], target: usize) {
    let mut residuals: Vec<ComplexVector> = candidates
        .iter()
        .map(|c| {
            let mut w = c.clone();
            for q in basis.iter() {
                let proj = q.dotc(&w);
                w -= q * proj;
            }
            w
        })
        .collect();
    while basis.len() < target {
        let best = residuals
            .iter()
            .enumerate()
            .map(|(k, w)| (k, w.norm()))
            .fold(None::<(usize, f64)>, |acc, (k, nrm)| match acc {
                Some((_, best)) if best >= nrm => acc,
                _ => Some((k, nrm)),
            });
        let Some((k, norm)) = best else { break };
        if norm < 1e-6 {
            break;
        }
        // Second pass for numerical orthogonality.
        let mut q = residuals[k].clone() / Complex64::new(norm, 0.0);
        for b in basis.iter() {
            let proj = b.dotc(&q);
            q -= b * proj;
        }
        let q = q.clone() / Complex64::new(q.norm(), 0.0);
        for w in residuals.iter_mut() {
            let proj = q.dotc(w);
            *w -= &q * proj;
        }
        basis.push(q);
    }
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the phase fix
/// on the diagonal of R.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}
