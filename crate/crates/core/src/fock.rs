//! Truncated multimode Fock space: all occupation tuples with total photon
//! number at most a cutoff, in lexicographic order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Debug)]
pub struct FockBasis {
    n_modes: usize,
    cutoff: usize,
    tuples: Vec<Box<[u8]>>,
    index: HashMap<Box<[u8]>, usize>,
    raise: Vec<Vec<u32>>,
    lower: Vec<Vec<u32>>,
}

impl FockBasis {
    pub fn new(n_modes: usize, cutoff: usize) -> Result<Arc<Self>> {
        if cutoff > u8::MAX as usize {
            return Err(Error::invalid("photon cutoff must be at most 255"));
        }
        let mut tuples = Vec::new();
        let mut current = vec![0u8; n_modes];
        enumerate(&mut current, 0, cutoff, &mut tuples);
        let index: HashMap<Box<[u8]>, usize> =
            tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();

        let mut raise = vec![vec![NONE; tuples.len()]; n_modes];
        let mut lower = vec![vec![NONE; tuples.len()]; n_modes];
        for (idx, t) in tuples.iter().enumerate() {
            let total: usize = t.iter().map(|&x| x as usize).sum();
            for m in 0..n_modes {
                if total < cutoff {
                    let mut up = t.clone();
                    up[m] += 1;
                    let dst = index[&up];
                    raise[m][idx] = dst as u32;
                    lower[m][dst] = idx as u32;
                }
            }
        }
        Ok(Arc::new(Self {
            n_modes,
            cutoff,
            tuples,
            index,
            raise,
            lower,
        }))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuple(&self, idx: usize) -> &[u8] {
        &self.tuples[idx]
    }

    pub fn total(&self, idx: usize) -> usize {
        self.tuples[idx].iter().map(|&x| x as usize).sum()
    }

    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    /// Index of the tuple with one more photon in `mode`, if within cutoff.
    pub fn raised(&self, mode: usize, idx: usize) -> Option<usize> {
        let v = self.raise[mode][idx];
        (v != NONE).then_some(v as usize)
    }

    /// Index of the tuple with one photon fewer in `mode`.
    pub fn lowered(&self, mode: usize, idx: usize) -> Option<usize> {
        let v = self.lower[mode][idx];
        (v != NONE).then_some(v as usize)
    }
}

fn enumerate(current: &mut Vec<u8>, pos: usize, left: usize, out: &mut Vec<Box<[u8]>>) {
    if pos == current.len() {
        out.push(current.clone().into_boxed_slice());
        return;
    }
    for k in 0..=left {
        current[pos] = k as u8;
        enumerate(current, pos + 1, left - k, out);
    }
    current[pos] = 0;
}

/// Amplitudes over a [`FockBasis`].
#[derive(Debug, Clone)]
pub struct FockVector {
    basis: Arc<FockBasis>,
    amps: Vec<Complex64>,
}

impl PartialEq for FockVector {
    fn eq(&self, other: &Self) -> bool {
        self.n_modes() == other.n_modes() && self.cutoff() == other.cutoff() && self.amps == other.amps
    }
}

impl FockVector {
    pub fn zeros(basis: Arc<FockBasis>) -> Self {
        let amps = vec![Complex64::new(0.0, 0.0); basis.len()];
        Self { basis, amps }
    }

    pub fn vacuum(n_modes: usize, cutoff: usize) -> Result<Self> {
        let mut v = Self::zeros(FockBasis::new(n_modes, cutoff)?);
        v.amps[0] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_amplitudes(basis: Arc<FockBasis>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.len() {
            return Err(Error::invalid("amplitude count does not match the basis"));
        }
        if amps.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("Fock amplitudes must be finite"));
        }
        Ok(Self { basis, amps })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn n_modes(&self) -> usize {
        self.basis.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.basis.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude on an occupation tuple; zero beyond the cutoff.
    pub fn amplitude(&self, occupation: &[usize]) -> Complex64 {
        assert_eq!(occupation.len(), self.n_modes(), "occupation tuple has wrong length");
        if occupation.iter().sum::<usize>() > self.cutoff() {
            return Complex64::new(0.0, 0.0);
        }
        let key: Vec<u8> = occupation.iter().map(|&x| x as u8).collect();
        self.basis
            .index_of(&key)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], Complex64)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, &z)| (self.basis.tuple(i), z))
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            basis: self.basis.clone(),
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    /// `a_m† |v⟩`, dropping what leaves the cutoff.
    pub fn create(&self, mode: usize) -> Self {
        let mut out = Self::zeros(self.basis.clone());
        for (idx, &z) in self.amps.iter().enumerate() {
            if let Some(dst) = self.basis.raised(mode, idx) {
                let n = self.basis.tuple(dst)[mode] as f64;
                out.amps[dst] += z * n.sqrt();
            }
        }
        out
    }

    /// `a_m |v⟩`.
    pub fn annihilate(&self, mode: usize) -> Self {
        let mut out = Self::zeros(self.basis.clone());
        for (idx, &z) in self.amps.iter().enumerate() {
            if let Some(dst) = self.basis.lowered(mode, idx) {
                let n = self.basis.tuple(idx)[mode] as f64;
                out.amps[dst] += z * n.sqrt();
            }
        }
        out
    }

    /// `⟨0_detected| v⟩` as a vector on the remaining modes (in their
    /// original order), same cutoff.
    pub fn project_vacuum(&self, detected: &[usize]) -> Result<Self> {
        let n = self.n_modes();
        if let Some(&bad) = detected.iter().find(|&&m| m >= n) {
            return Err(Error::invalid(format!("mode {bad} out of range for {n} modes")));
        }
        let keep: Vec<usize> = (0..n).filter(|m| !detected.contains(m)).collect();
        let basis = FockBasis::new(keep.len(), self.cutoff())?;
        let mut out = Self::zeros(basis);
        for (idx, &z) in self.amps.iter().enumerate() {
            let t = self.basis.tuple(idx);
            if detected.iter().all(|&m| t[m] == 0) {
                let key: Vec<u8> = keep.iter().map(|&m| t[m]).collect();
                let dst = out.basis.index_of(&key).expect("projected tuple within cutoff");
                out.amps[dst] = z;
            }
        }
        Ok(out)
    }

    /// Drops all tuples above `cutoff`.
    pub fn truncate(&self, cutoff: usize) -> Result<Self> {
        if cutoff > self.cutoff() {
            return Err(Error::invalid("truncation cannot raise the cutoff"));
        }
        let basis = FockBasis::new(self.n_modes(), cutoff)?;
        let amps = (0..basis.len())
            .map(|i| self.amps[self.basis.index_of(basis.tuple(i)).expect("sub-basis")])
            .collect();
        Ok(Self { basis, amps })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.require_same_shape(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm())))
    }

    /// Largest amplitude on a tuple with odd total photon number.
    pub fn max_odd_amplitude(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.basis.total(*i) % 2 == 1)
            .fold(0.0, |acc, (_, z)| acc.max(z.norm()))
    }

    /// One line per tuple: `n1 n2 … nk re im`, lexicographic.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (t, z) in self.iter() {
            for n in t {
                let _ = write!(s, "{n} ");
            }
            let _ = writeln!(s, "{:.17e} {:.17e}", z.re, z.im);
        }
        s
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.n_modes() != other.n_modes() || self.cutoff() != other.cutoff() {
            return Err(Error::invalid(format!(
                "Fock vectors differ in shape: {} modes/cutoff {} vs {} modes/cutoff {}",
                self.n_modes(),
                self.cutoff(),
                other.n_modes(),
                other.cutoff()
            )));
        }
        Ok(())
    }
}

/// `⟨f1|f2⟩` after normalizing both within the cutoff.
pub fn overlap(f1: &FockVector, f2: &FockVector) -> Result<Complex64> {
    f1.require_same_shape(f2)?;
    let (a, b) = (f1.normalized()?, f2.normalized()?);
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}
