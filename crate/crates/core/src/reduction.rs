//! Bloch-Messiah reduction: `A = U cosh(r) V†`, `B = U sinh(r) V^T`.
//!
//! The factorization is computed on the real symplectic image `S` of the
//! transform. `S = O P` (polar), `P` is symmetric positive definite and
//! symplectic, so its eigenvalues pair up as `e^{±r}` with eigenvectors
//! related by the symplectic form. Eigenvectors of the `e^{+r}` branch are
//! read as complex vectors `x + i p`; they form the columns of `V`. The
//! `r = 0` eigenspace is closed under the symplectic form and gets a complex
//! orthonormal basis by pivoted Gram-Schmidt. `U` is the complex image of
//! `O · realify(V)`.

use std::ops::Range;

use num_complex::Complex64;

use crate::bogoliubov::{require_valid, symplectic_unchecked, transform_distance, GaussianTransform};
use crate::error::{Error, Result};
use crate::linalg::{
    complexify, degenerate_groups, diag_complex, eigh_symmetric, extend_pivoted, max_abs,
    polar_decompose, realify, svd, unitarity_residual, ComplexMatrix, ComplexVector,
    ToleranceConfig,
};

/// Reduced form: passive `V†`, squeezers `r` (descending), passive `U`, then
/// the displacement `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMessiahForm {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub r: Vec<f64>,
    pub beta: ComplexVector,
}

impl BlochMessiahForm {
    pub fn n_modes(&self) -> usize {
        self.r.len()
    }

    /// `A_D = diag(cosh r)`.
    pub fn a_diag(&self) -> Vec<f64> {
        self.r.iter().map(|r| r.cosh()).collect()
    }

    /// `B_D = diag(sinh r)`.
    pub fn b_diag(&self) -> Vec<f64> {
        self.r.iter().map(|r| r.sinh()).collect()
    }

    pub fn squeezer_count(&self) -> usize {
        self.r.iter().filter(|&&r| r > 0.0).count()
    }

    /// Index ranges of equal squeezing parameters. Within a block, `U` and
    /// `V` are determined only up to a common real orthogonal rotation.
    pub fn degenerate_blocks(&self, tol: &ToleranceConfig) -> Vec<Range<usize>> {
        degenerate_groups(&self.r, tol.degeneracy_tol)
    }

    pub fn check(&self, tol: &ToleranceConfig) -> Result<()> {
        let n = self.r.len();
        if self.u.shape() != (n, n) || self.v.shape() != (n, n) || self.beta.len() != n {
            return Err(Error::invalid("Bloch-Messiah form has inconsistent shapes"));
        }
        if self.r.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::invalid("squeezing parameters must be finite and non-negative"));
        }
        if self.r.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("squeezing parameters must be sorted descending"));
        }
        for m in [&self.u, &self.v] {
            let residual = unitarity_residual(m);
            if residual > tol.structural_tol {
                return Err(Error::ConstraintViolation {
                    check: "unitarity",
                    residual,
                    tol: tol.structural_tol,
                });
            }
        }
        Ok(())
    }
}

/// Squeezing in decibels of quadrature variance, `10 log10(e^{2r})`.
pub fn squeezing_db(r: f64) -> f64 {
    20.0 * r / std::f64::consts::LN_10
}

pub fn reduce(t: &GaussianTransform, tol: &ToleranceConfig) -> Result<BlochMessiahForm> {
    require_valid(t, tol)?;
    let n = t.n_modes();
    if n == 0 {
        return Ok(BlochMessiahForm {
            u: ComplexMatrix::zeros(0, 0),
            v: ComplexMatrix::zeros(0, 0),
            r: Vec::new(),
            beta: ComplexVector::zeros(0),
        });
    }

    let s = symplectic_unchecked(t);
    let polar = polar_decompose(&s, tol)?;
    let eig = eigh_symmetric(&polar.positive, tol)?;
    let lambda = &eig.values;
    if lambda[2 * n - 1] <= 0.0 {
        return Err(Error::NumericalFailure {
            reason: "positive factor of the polar decomposition is not definite".into(),
            residual: lambda[2 * n - 1],
        });
    }

    let mut r = Vec::with_capacity(n);
    for j in 0..n {
        let (hi, lo) = (lambda[j], lambda[2 * n - 1 - j]);
        let mismatch = (hi * lo - 1.0).abs();
        if mismatch > tol.degeneracy_tol {
            return Err(Error::NumericalFailure {
                reason: format!("eigenvalues {hi} and {lo} are not symplectic partners"),
                residual: mismatch,
            });
        }
        let rj = 0.5 * (hi.ln() - lo.ln());
        r.push(if rj <= tol.structural_tol { 0.0 } else { rj });
    }
    let squeezed = r.iter().filter(|&&x| x > 0.0).count();

    let as_complex = |j: usize| -> ComplexVector {
        ComplexVector::from_fn(n, |i, _| {
            Complex64::new(eig.vectors[(i, j)], eig.vectors[(n + i, j)])
        })
    };

    let mut cols: Vec<ComplexVector> = Vec::with_capacity(n);
    for j in 0..squeezed {
        let mut w = as_complex(j);
        for q in &cols {
            let proj = q.dotc(&w);
            w -= q * proj;
        }
        let norm = w.norm();
        if norm < 0.5 {
            return Err(Error::NumericalFailure {
                reason: "squeezed eigenvectors are not complex-orthogonal".into(),
                residual: 1.0 - norm,
            });
        }
        cols.push(w / Complex64::new(norm, 0.0));
    }
    let passive: Vec<ComplexVector> = (squeezed..2 * n - squeezed).map(as_complex).collect();
    extend_pivoted(&mut cols, &passive, n);
    if cols.len() != n {
        return Err(Error::NumericalFailure {
            reason: "unsqueezed eigenspace has the wrong complex dimension".into(),
            residual: (n - cols.len()) as f64,
        });
    }

    let mut v = ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]);
    let mut u = complexify(&(&polar.orthogonal * realify(&v)));
    fix_column_signs(&mut u, &mut v);

    let form = BlochMessiahForm {
        u,
        v,
        r,
        beta: t.beta.clone(),
    };
    let residual = transform_distance(&recompose_unchecked(&form), t)?;
    let bound = 10.0 * tol.structural_tol * max_abs(&t.a).max(1.0);
    if residual > bound {
        return Err(Error::NumericalFailure {
            reason: "recomposed transform misses the input".into(),
            residual,
        });
    }
    Ok(form)
}

/// Only a sign per column is free: a phase on column j of `U` must be
/// matched on `V` and would rotate `B`. The first non-negligible entry of
/// each `U` column is made to have positive real part (or positive
/// imaginary part when it is purely imaginary).
fn fix_column_signs(u: &mut ComplexMatrix, v: &mut ComplexMatrix) {
    for j in 0..u.ncols() {
        let col_max = u.column(j).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        let Some(lead) = u.column(j).iter().copied().find(|z| z.norm() > 1e-8 * col_max) else {
            continue;
        };
        let negative = if lead.re.abs() > 1e-12 * col_max {
            lead.re < 0.0
        } else {
            lead.im < 0.0
        };
        if negative {
            u.column_mut(j).neg_mut();
            v.column_mut(j).neg_mut();
        }
    }
}

/// `multiport(U) ∘ squeezers(r) ∘ multiport(V†)`, then `displacement(beta)`.
pub fn recompose(form: &BlochMessiahForm, tol: &ToleranceConfig) -> Result<GaussianTransform> {
    form.check(tol)?;
    Ok(recompose_unchecked(form))
}

fn recompose_unchecked(form: &BlochMessiahForm) -> GaussianTransform {
    GaussianTransform {
        a: &form.u * diag_complex(&form.a_diag()) * form.v.adjoint(),
        b: &form.u * diag_complex(&form.b_diag()) * form.v.transpose(),
        beta: form.beta.clone(),
    }
}

/// `arcsinh` of the singular values of `B`, descending. This equals
/// `arccosh` of the singular values of `A` but stays well conditioned near
/// zero squeezing.
pub fn squeeze_spectrum(t: &GaussianTransform, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    require_valid(t, tol)?;
    Ok(svd(&t.b)?.sigma.iter().map(|s| s.asinh()).collect())
}

/// `arccosh` of the singular values of `A`, descending.
pub fn squeeze_spectrum_via_a(t: &GaussianTransform, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    require_valid(t, tol)?;
    Ok(svd(&t.a)?.sigma.iter().map(|s| s.max(1.0).acosh()).collect())
}

/// Number of squeezing parameters above `threshold`.
pub fn squeezer_count(t: &GaussianTransform, threshold: f64, tol: &ToleranceConfig) -> Result<usize> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::invalid("squeezer threshold must be positive"));
    }
    Ok(squeeze_spectrum(t, tol)?
        .iter()
        .filter(|&&r| r > threshold)
        .count())
}

/// Two reference decompositions of the QND coupler: unbalanced beam
/// splitters at `θ = ½ asin(2/√5)` on both sides, and the variant with 50:50
/// splitters and phase plates. Both carry `r = ln φ` on each mode.
pub fn qnd_witnesses() -> [(&'static str, BlochMessiahForm); 2] {
    let theta = qnd_mixing_angle();
    let (s, c) = theta.sin_cos();
    let i = Complex64::i();
    let re = |x: f64| Complex64::new(x, 0.0);
    let r = vec![((1.0 + 5f64.sqrt()) / 2.0).ln(); 2];

    let unbalanced = BlochMessiahForm {
        u: ComplexMatrix::from_row_slice(2, 2, &[re(s), -i * c, re(c), i * s]),
        v: ComplexMatrix::from_row_slice(2, 2, &[re(c), -i * s, re(s), i * c]),
        r: r.clone(),
        beta: ComplexVector::zeros(2),
    };

    let e = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, theta);
    let ec = e.conj();
    let balanced = BlochMessiahForm {
        u: ComplexMatrix::from_row_slice(2, 2, &[i * e, i * ec, -e, ec]),
        v: ComplexMatrix::from_row_slice(2, 2, &[-ec, e, -i * ec, -i * e]),
        r,
        beta: ComplexVector::zeros(2),
    };
    [("unbalanced", unbalanced), ("balanced", balanced)]
}

/// `½ asin(2/√5)`, the QND splitter angle.
pub fn qnd_mixing_angle() -> f64 {
    0.5 * (2.0 / 5f64.sqrt()).asin()
}
