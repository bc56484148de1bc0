//! Pure zero-displacement Gaussian states `exp(½ Σ B_jk a_j† a_k†)|0⟩` and
//! single-photon conditioning.
//!
//! States are stored unnormalized, with amplitude 1 on the vacuum. A click is
//! modelled as the projection `⟨1_ℓ| = ⟨0_ℓ| a_ℓ`, so the conditioned state of
//! a click on `ℓ` with vacuum on the detected set is
//! `(Σ_m B_ℓm a_m†) |Gaussian on the rest⟩`.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::bogoliubov::GaussianTransform;
use crate::error::{Error, Result};
use crate::fock::{overlap, FockBasis, FockVector};
use crate::linalg::{diag_complex, max_abs_vec, takagi, ComplexMatrix, ComplexVector, ToleranceConfig};
use crate::parallel::{map_indexed, Exec};
use crate::reduction::reduce;

/// Brute-force and analytic conditioned states must agree this closely for
/// the single-excitation structure to count as confirmed.
pub const STRUCTURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PureGaussianState {
    bmat: ComplexMatrix,
}

impl PureGaussianState {
    pub fn new(bmat: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let state = Self { bmat };
        let d = state.takagi_values(tol)?;
        if d.first().is_some_and(|&x| x >= 1.0) {
            return Err(Error::invalid(format!(
                "state matrix has Takagi value {} >= 1 and is not normalizable",
                d[0]
            )));
        }
        Ok(state)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            bmat: ComplexMatrix::zeros(n_modes, n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.bmat.nrows()
    }

    pub fn bmat(&self) -> &ComplexMatrix {
        &self.bmat
    }

    /// Takagi values of the state matrix, `tanh r_j`, descending.
    pub fn takagi_values(&self, tol: &ToleranceConfig) -> Result<Vec<f64>> {
        Ok(takagi(&self.bmat, tol)?.d)
    }

    pub fn fock_amplitudes(&self, cutoff: usize) -> Result<FockVector> {
        self.fock_amplitudes_with(cutoff, Exec::default())
    }

    /// Power series of the exponential on the vacuum, one even photon-number
    /// shell at a time: `ψ_{2k} = Q ψ_{2k-2} / k`.
    pub fn fock_amplitudes_with(&self, cutoff: usize, exec: Exec) -> Result<FockVector> {
        let n = self.n_modes();
        let basis = FockBasis::new(n, cutoff)?;
        let mut shells: Vec<Vec<usize>> = vec![Vec::new(); cutoff + 1];
        for idx in 0..basis.len() {
            shells[basis.total(idx)].push(idx);
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.len()];
        amps[0] = Complex64::new(1.0, 0.0);
        for level in 1..=cutoff / 2 {
            let targets = &shells[2 * level];
            let prev = &amps;
            let values = map_indexed(exec, targets.len(), |k| {
                let idx = targets[k];
                let occ = basis.tuple(idx);
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let Some(once) = basis.lowered(j, idx) else { continue };
                    for l in 0..n {
                        let Some(twice) = basis.lowered(l, once) else { continue };
                        let nl = occ[l] as f64 - if l == j { 1.0 } else { 0.0 };
                        acc += self.bmat[(j, l)] * (occ[j] as f64 * nl).sqrt() * prev[twice];
                    }
                }
                acc * (0.5 / level as f64)
            });
            for (&idx, z) in targets.iter().zip(values) {
                amps[idx] = z;
            }
        }
        FockVector::from_amplitudes(basis, amps)
    }

    /// `⟨0_detected|ψ⟩`: the principal submatrix on the remaining modes.
    /// Detecting every mode leaves the zero-mode state (amplitude 1).
    pub fn project_vacuum(&self, detected: &[usize]) -> Result<Self> {
        let keep = remaining_modes(self.n_modes(), detected)?;
        Ok(Self {
            bmat: submatrix(&self.bmat, &keep),
        })
    }

    pub fn condition_single_photon(
        &self,
        detected_vacuum: &[usize],
        click: usize,
        tol: &ToleranceConfig,
    ) -> Result<ConditionedState> {
        let n = self.n_modes();
        if click >= n {
            return Err(Error::invalid(format!("click mode {click} out of range for {n} modes")));
        }
        if detected_vacuum.contains(&click) {
            return Err(Error::invalid(format!(
                "click mode {click} is also in the vacuum-detected set"
            )));
        }
        let mut projected = detected_vacuum.to_vec();
        projected.push(click);
        let modes = remaining_modes(n, &projected)?;
        let coeffs = ComplexVector::from_iterator(modes.len(), modes.iter().map(|&m| self.bmat[(click, m)]));
        let is_null = max_abs_vec(&coeffs) <= tol.structural_tol;
        Ok(ConditionedState {
            base: Self {
                bmat: submatrix(&self.bmat, &modes),
            },
            coeffs,
            modes,
            is_null,
        })
    }
}

/// `(Σ_m c_m a_m†) |base⟩` on the undetected modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedState {
    pub base: PureGaussianState,
    pub coeffs: ComplexVector,
    /// Original indices of the undetected modes, in order.
    pub modes: Vec<usize>,
    /// No first-order click amplitude: every coefficient vanishes.
    pub is_null: bool,
}

impl ConditionedState {
    /// Fock amplitudes, exact for total photon number below `cutoff`.
    pub fn fock_amplitudes(&self, cutoff: usize) -> Result<FockVector> {
        let base = self.base.fock_amplitudes(cutoff)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); base.amplitudes().len()];
        for (m, c) in self.coeffs.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (a, z) in amps.iter_mut().zip(base.create(m).amplitudes()) {
                *a += c * z;
            }
        }
        FockVector::from_amplitudes(base.basis().clone(), amps)
    }

    /// `|⟨single photon in mode c|ψ⟩|²` with both sides normalized, where
    /// the single photon occupies the mode `Σ c_m a_m†`.
    pub fn single_excitation_fidelity(&self, cutoff: usize) -> Result<Option<f64>> {
        if self.is_null || cutoff == 0 {
            return Ok(None);
        }
        let state = self.fock_amplitudes(cutoff)?;
        let single = ConditionedState {
            base: PureGaussianState::vacuum(self.modes.len()),
            ..self.clone()
        };
        Ok(Some(overlap(&single.fock_amplitudes(cutoff)?, &state)?.norm_sqr()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub click: usize,
    pub detected_vacuum: Vec<usize>,
    pub modes: Vec<usize>,
    pub coeffs: ComplexVector,
    pub base_bmat: ComplexMatrix,
    /// Max amplitude difference between brute force and the analytic form,
    /// normalized unless the click is null.
    pub discrepancy: f64,
    pub is_null: bool,
    pub confirmed: bool,
    pub single_excitation_fidelity: Option<f64>,
    /// Photon cutoff at which the comparison is exact.
    pub compared_cutoff: usize,
}

pub fn evolve_vacuum(t: &GaussianTransform, tol: &ToleranceConfig) -> Result<PureGaussianState> {
    if t.has_displacement() {
        return Err(Error::UnsupportedInput(
            "state evolution needs a transform without displacement".into(),
        ));
    }
    let form = reduce(t, tol)?;
    let tanh: Vec<f64> = form.r.iter().map(|r| r.tanh()).collect();
    let z = &form.u * diag_complex(&tanh) * form.u.transpose();
    let bmat = (&z + z.transpose()).unscale(2.0);
    Ok(PureGaussianState { bmat })
}

/// Compares the conditioned state two ways: the analytic single-excitation
/// form, and `⟨0_{detected ∪ click}| a_click |ψ⟩` on the Fock expansion of
/// the full output at `cutoff`. Both are exact below the cutoff.
pub fn verify_single_excitation_structure(
    t: &GaussianTransform,
    detected_vacuum: &[usize],
    click: usize,
    cutoff: usize,
    tol: &ToleranceConfig,
) -> Result<StructureReport> {
    if cutoff == 0 {
        return Err(Error::invalid("cutoff must be at least 1 to see a click"));
    }
    let state = evolve_vacuum(t, tol)?;
    let cond = state.condition_single_photon(detected_vacuum, click, tol)?;
    let compared = cutoff - 1;

    let mut projected = detected_vacuum.to_vec();
    projected.push(click);
    let brute = state
        .fock_amplitudes(cutoff)?
        .annihilate(click)
        .project_vacuum(&projected)?
        .truncate(compared)?;
    let analytic = cond.fock_amplitudes(cutoff)?.truncate(compared)?;

    let raw = brute.max_abs_diff(&analytic)?;
    let discrepancy = if cond.is_null || analytic.norm() == 0.0 || brute.norm() == 0.0 {
        raw
    } else {
        brute.normalized()?.max_abs_diff(&analytic.normalized()?)?
    };
    Ok(StructureReport {
        click,
        detected_vacuum: detected_vacuum.to_vec(),
        modes: cond.modes.clone(),
        coeffs: cond.coeffs.clone(),
        base_bmat: cond.base.bmat.clone(),
        discrepancy,
        is_null: cond.is_null,
        confirmed: discrepancy < STRUCTURE_TOL,
        single_excitation_fidelity: cond.single_excitation_fidelity(compared)?,
        compared_cutoff: compared,
    })
}

fn remaining_modes(n: usize, removed: &[usize]) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = removed.iter().copied().collect();
    if set.len() != removed.len() {
        return Err(Error::invalid("mode listed twice"));
    }
    if let Some(&bad) = set.iter().find(|&&m| m >= n) {
        return Err(Error::invalid(format!("mode {bad} out of range for {n} modes")));
    }
    Ok((0..n).filter(|m| !set.contains(m)).collect())
}

fn submatrix(m: &ComplexMatrix, keep: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])])
}
