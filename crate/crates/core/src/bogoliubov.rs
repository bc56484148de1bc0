//! Linear Bogoliubov transformations `b = A a + B a† + beta`.
//!
//! Quadrature convention, used everywhere in the crate: `x = (a + a†)/√2`,
//! `p = -i (a - a†)/√2`, ordered `(x_1..x_n, p_1..p_n)`. The real image of a
//! transform is then `S = [[Re(A+B), -Im(A-B)], [Im(A+B), Re(A-B)]]`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    haar_unitary, max_abs, max_abs_real, max_abs_vec, require_finite, symplectic_form,
    ComplexMatrix, ComplexVector, RealMatrix, ToleranceConfig,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTransform {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub beta: ComplexVector,
}

/// Residuals of the four canonical-commutation conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    /// `max |A B^T - (A B^T)^T|`
    pub rel1: f64,
    /// `max |A A† - B B† - I|`
    pub rel2: f64,
    /// `max |A† B - (A† B)^T|`
    pub rel3: f64,
    /// `max |A† A - (B† B)^T - I|`
    pub rel4: f64,
    pub tol: f64,
}

impl ValidationReport {
    pub fn max_residual(&self) -> f64 {
        self.rel1.max(self.rel2).max(self.rel3).max(self.rel4)
    }

    pub fn is_valid(&self) -> bool {
        self.max_residual() <= self.tol
    }

    pub fn residuals(&self) -> [(&'static str, f64); 4] {
        [
            ("rel1", self.rel1),
            ("rel2", self.rel2),
            ("rel3", self.rel3),
            ("rel4", self.rel4),
        ]
    }
}

impl GaussianTransform {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, beta: ComplexVector) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || b.ncols() != n || beta.len() != n {
            return Err(Error::invalid(format!(
                "shape mismatch: A {}x{}, B {}x{}, beta {}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                beta.len()
            )));
        }
        require_finite(&a, "A")?;
        require_finite(&b, "B")?;
        if beta.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("beta has non-finite entries"));
        }
        Ok(Self { a, b, beta })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            a: ComplexMatrix::identity(n, n),
            b: ComplexMatrix::zeros(n, n),
            beta: ComplexVector::zeros(n),
        }
    }

    /// Passive transform `A = U`; the caller is responsible for unitarity.
    pub(crate) fn passive_unchecked(u: ComplexMatrix) -> Self {
        let n = u.nrows();
        Self {
            a: u,
            b: ComplexMatrix::zeros(n, n),
            beta: ComplexVector::zeros(n),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_passive(&self) -> bool {
        self.b.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    pub fn has_displacement(&self) -> bool {
        self.beta.iter().any(|z| *z != Complex64::new(0.0, 0.0))
    }

    /// Same linear part with the displacement removed.
    pub fn without_displacement(&self) -> Self {
        Self {
            beta: ComplexVector::zeros(self.n_modes()),
            ..self.clone()
        }
    }

    pub fn validate(&self, tol: &ToleranceConfig) -> ValidationReport {
        validate(self, tol)
    }
}

pub fn validate(t: &GaussianTransform, tol: &ToleranceConfig) -> ValidationReport {
    let n = t.n_modes();
    let id = ComplexMatrix::identity(n, n);
    let abt = &t.a * t.b.transpose();
    let adb = t.a.adjoint() * &t.b;
    ValidationReport {
        rel1: max_abs(&(&abt - abt.transpose())),
        rel2: max_abs(&(&t.a * t.a.adjoint() - &t.b * t.b.adjoint() - &id)),
        rel3: max_abs(&(&adb - adb.transpose())),
        rel4: max_abs(&(t.a.adjoint() * &t.a - (t.b.adjoint() * &t.b).transpose() - id)),
        tol: tol.structural_tol,
    }
}

pub(crate) fn require_valid(t: &GaussianTransform, tol: &ToleranceConfig) -> Result<()> {
    let report = validate(t, tol);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::ConstraintViolation {
            check: "canonical commutation relations",
            residual: report.max_residual(),
            tol: report.tol,
        })
    }
}

fn require_same_modes(x: &GaussianTransform, y: &GaussianTransform) -> Result<()> {
    if x.n_modes() != y.n_modes() {
        return Err(Error::invalid(format!(
            "mode-count mismatch: {} vs {}",
            x.n_modes(),
            y.n_modes()
        )));
    }
    Ok(())
}

/// Applies `first`, then `second`: `A = A2 A1 + B2 B1*`, `B = A2 B1 + B2 A1*`,
/// `beta = beta2 + A2 beta1 + B2 beta1*`.
pub fn compose(second: &GaussianTransform, first: &GaussianTransform) -> Result<GaussianTransform> {
    require_same_modes(second, first)?;
    Ok(compose_unchecked(second, first))
}

pub(crate) fn compose_unchecked(
    second: &GaussianTransform,
    first: &GaussianTransform,
) -> GaussianTransform {
    let a1c = first.a.conjugate();
    let b1c = first.b.conjugate();
    GaussianTransform {
        a: &second.a * &first.a + &second.b * &b1c,
        b: &second.a * &first.b + &second.b * a1c,
        beta: &second.beta + &second.a * &first.beta + &second.b * first.beta.conjugate(),
    }
}

/// `A' = A†`, `B' = -B^T`, `beta' = -A† beta + B^T beta*`.
pub fn inverse(t: &GaussianTransform, tol: &ToleranceConfig) -> Result<GaussianTransform> {
    require_valid(t, tol)?;
    let a_inv = t.a.adjoint();
    let b_t = t.b.transpose();
    let beta = -(&a_inv * &t.beta) + &b_t * t.beta.conjugate();
    Ok(GaussianTransform {
        a: a_inv,
        b: -b_t,
        beta,
    })
}

/// Real 2n x 2n symplectic image of the linear part of `t`.
pub fn to_real_symplectic(t: &GaussianTransform, tol: &ToleranceConfig) -> Result<RealMatrix> {
    require_valid(t, tol)?;
    Ok(symplectic_unchecked(t))
}

pub(crate) fn symplectic_unchecked(t: &GaussianTransform) -> RealMatrix {
    let n = t.n_modes();
    let sum = &t.a + &t.b;
    let diff = &t.a - &t.b;
    let mut s = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = sum[(i, j)].re;
            s[(i, n + j)] = -diff[(i, j)].im;
            s[(n + i, j)] = sum[(i, j)].im;
            s[(n + i, n + j)] = diff[(i, j)].re;
        }
    }
    s
}

/// `max |S Ω S^T - Ω|`.
pub fn symplectic_residual(s: &RealMatrix) -> f64 {
    let omega = symplectic_form(s.nrows() / 2);
    max_abs_real(&(s * &omega * s.transpose() - omega))
}

/// Inverse of [`to_real_symplectic`]; the result has no displacement.
pub fn from_real_symplectic(s: &RealMatrix, tol: &ToleranceConfig) -> Result<GaussianTransform> {
    if s.nrows() != s.ncols() || !s.nrows().is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "symplectic matrix must be 2n x 2n, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    if s.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("symplectic matrix has non-finite entries"));
    }
    let residual = symplectic_residual(s);
    if residual > tol.structural_tol {
        return Err(Error::ConstraintViolation {
            check: "symplectic form",
            residual,
            tol: tol.structural_tol,
        });
    }
    let n = s.nrows() / 2;
    let a = ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::new(
            0.5 * (s[(i, j)] + s[(n + i, n + j)]),
            0.5 * (s[(n + i, j)] - s[(i, n + j)]),
        )
    });
    let b = ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::new(
            0.5 * (s[(i, j)] - s[(n + i, n + j)]),
            0.5 * (s[(n + i, j)] + s[(i, n + j)]),
        )
    });
    Ok(GaussianTransform {
        a,
        b,
        beta: ComplexVector::zeros(n),
    })
}

/// Largest elementwise difference over `A`, `B` and `beta`.
pub fn transform_distance(t1: &GaussianTransform, t2: &GaussianTransform) -> Result<f64> {
    require_same_modes(t1, t2)?;
    Ok(max_abs(&(&t1.a - &t2.a))
        .max(max_abs(&(&t1.b - &t2.b)))
        .max(max_abs_vec(&(&t1.beta - &t2.beta))))
}

/// Random transform with its known factors `unitary_out ∘ squeezers ∘ unitary_in`.
#[derive(Debug, Clone)]
pub struct RandomTransform {
    pub transform: GaussianTransform,
    pub unitary_out: ComplexMatrix,
    pub squeezing: Vec<f64>,
    pub unitary_in: ComplexMatrix,
}

/// Haar-random passive factors around independent squeezers with `r_j`
/// uniform in `[0, max_r]`. Deterministic in `seed`.
pub fn random_transform_parts(n: usize, max_r: f64, seed: u64) -> RandomTransform {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unitary_in = haar_unitary(n, &mut rng);
    let squeezing: Vec<f64> = (0..n)
        .map(|_| if max_r > 0.0 { rng.random_range(0.0..=max_r) } else { 0.0 })
        .collect();
    let unitary_out = haar_unitary(n, &mut rng);

    let squeeze = GaussianTransform {
        a: ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(squeezing[i].cosh(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
        b: ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(squeezing[i].sinh(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
        beta: ComplexVector::zeros(n),
    };
    let first = GaussianTransform::passive_unchecked(unitary_in.clone());
    let last = GaussianTransform::passive_unchecked(unitary_out.clone());
    let transform = compose_unchecked(&last, &compose_unchecked(&squeeze, &first));
    RandomTransform {
        transform,
        unitary_out,
        squeezing,
        unitary_in,
    }
}

pub fn random_transform(n: usize, max_r: f64, seed: u64) -> GaussianTransform {
    random_transform_parts(n, max_r, seed).transform
}
