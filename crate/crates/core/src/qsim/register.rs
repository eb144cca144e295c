use std::collections::HashSet;

use num_complex::Complex;

use super::label::Label;
use super::MAX_QUBITS;
use crate::error::{Error, Result};
use crate::scalar::{czero, is_finite, Scalar};

/// Dense state vector over an ordered list of named qubits.
///
/// `labels[0]` is the most significant bit of the amplitude index. The vector is
/// always normalized; every constructor and operation renormalizes or preserves
/// the norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Register<T: Scalar> {
    labels: Vec<Label>,
    amps: Vec<Complex<T>>,
}

pub(crate) fn check_labels(labels: &[Label]) -> Result<()> {
    if labels.len() > MAX_QUBITS {
        return Err(Error::TooManyQubits(labels.len()));
    }
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::DuplicateLabel(l.to_string()));
        }
    }
    Ok(())
}

/// Bit shift of qubit `k` in an `n`-qubit index.
#[inline]
pub(crate) fn shift_of(n: usize, k: usize) -> usize {
    n - 1 - k
}

impl<T: Scalar> Register<T> {
    /// Builds a normalized register from `(basis-string, coefficient)` pairs.
    ///
    /// Repeated basis strings accumulate.
    pub fn make<L: Into<Label>>(
        entries: &[(&str, Complex<T>)],
        labels: impl IntoIterator<Item = L>,
    ) -> Result<Self> {
        let labels: Vec<Label> = labels.into_iter().map(Into::into).collect();
        check_labels(&labels)?;
        let n = labels.len();
        let mut amps = vec![czero(); 1 << n];
        for (bits, c) in entries {
            if bits.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: bits.len(),
                });
            }
            let mut idx = 0usize;
            for ch in bits.chars() {
                idx <<= 1;
                match ch {
                    '0' => {}
                    '1' => idx |= 1,
                    _ => return Err(Error::InvalidBasisString((*bits).to_owned())),
                }
            }
            amps[idx] = amps[idx] + *c;
        }
        Self::from_amplitudes(labels, amps)
    }

    /// Wraps a raw amplitude vector, normalizing it.
    pub fn from_amplitudes<L: Into<Label>>(
        labels: impl IntoIterator<Item = L>,
        amps: Vec<Complex<T>>,
    ) -> Result<Self> {
        let labels: Vec<Label> = labels.into_iter().map(Into::into).collect();
        check_labels(&labels)?;
        if amps.len() != 1 << labels.len() {
            return Err(Error::LengthMismatch {
                expected: 1 << labels.len(),
                found: amps.len(),
            });
        }
        if !amps.iter().all(is_finite) {
            return Err(Error::NonFinite);
        }
        let mut reg = Register { labels, amps };
        reg.normalize()?;
        Ok(reg)
    }

    /// Computational basis state `|bits⟩`.
    pub fn basis<L: Into<Label>>(bits: &str, labels: impl IntoIterator<Item = L>) -> Result<Self> {
        Self::make(&[(bits, Complex::new(T::one(), T::zero()))], labels)
    }

    /// Assembles a register without validation. Callers guarantee the invariants.
    pub(crate) fn from_parts(labels: Vec<Label>, amps: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << labels.len());
        Register { labels, amps }
    }

    pub(crate) fn normalize(&mut self) -> Result<T> {
        let norm = self.norm_sqr().sqrt();
        if norm <= T::zero() || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let inv = T::one() / norm;
        for a in &mut self.amps {
            *a = a.scale(inv);
        }
        Ok(norm)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn norm_sqr(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Position of `label` in the register ordering.
    pub fn index_of(&self, label: &Label) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    /// Amplitude of the basis string `bits` (in this register's label order).
    pub fn amplitude(&self, bits: &str) -> Result<Complex<T>> {
        if bits.len() != self.num_qubits() {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits(),
                found: bits.len(),
            });
        }
        let idx = usize::from_str_radix(bits, 2)
            .map_err(|_| Error::InvalidBasisString(bits.to_owned()))?;
        Ok(self.amps[idx])
    }

    /// Nonzero amplitudes as `(basis-string, amplitude)` pairs, above `tol` in magnitude.
    pub fn support(&self, tol: T) -> Vec<(String, Complex<T>)> {
        let n = self.num_qubits();
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > tol)
            .map(|(i, a)| (format!("{:0width$b}", i, width = n), *a))
            .collect()
    }

    /// Kronecker product; labels of `other` are appended after ours.
    pub fn tensor(&self, other: &Register<T>) -> Result<Register<T>> {
        for l in &other.labels {
            if self.contains(l) {
                return Err(Error::OverlappingLabels(l.to_string()));
            }
        }
        let n = self.num_qubits() + other.num_qubits();
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(*a * *b);
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Ok(Register { labels, amps })
    }

    /// Re-indexes the amplitudes so the qubits appear in `new_order`.
    pub fn permute<L: Into<Label>>(
        &self,
        new_order: impl IntoIterator<Item = L>,
    ) -> Result<Register<T>> {
        let new_order: Vec<Label> = new_order.into_iter().map(Into::into).collect();
        let src = self.source_positions(&new_order)?;
        if src.iter().enumerate().all(|(p, &s)| p == s) {
            return Ok(self.clone());
        }
        let n = self.num_qubits();
        let mut amps = vec![czero(); self.amps.len()];
        for (old, a) in self.amps.iter().enumerate() {
            amps[remap_index(old, n, &src)] = *a;
        }
        Ok(Register {
            labels: new_order,
            amps,
        })
    }

    /// For each position of `new_order`, the position of that label in `self`.
    pub(crate) fn source_positions(&self, new_order: &[Label]) -> Result<Vec<usize>> {
        if new_order.len() != self.num_qubits() {
            return Err(Error::NotPermutation);
        }
        let mut used = vec![false; self.num_qubits()];
        let mut src = Vec::with_capacity(new_order.len());
        for l in new_order {
            let k = self.index_of(l).map_err(|_| Error::NotPermutation)?;
            if used[k] {
                return Err(Error::NotPermutation);
            }
            used[k] = true;
            src.push(k);
        }
        Ok(src)
    }

    /// This register re-expressed in `other`'s label order. Fails unless the
    /// two label sets coincide.
    pub(crate) fn aligned_to(&self, order: &[Label]) -> Result<Register<T>> {
        self.permute(order.iter()).map_err(|_| Error::LabelMismatch)
    }

    /// Moves `front` to the leading positions, keeping the rest in their
    /// current relative order. Returns the permuted register and the trailing labels.
    pub(crate) fn bring_to_front(&self, front: &[Label]) -> Result<(Register<T>, Vec<Label>)> {
        for l in front {
            self.index_of(l)?;
        }
        check_labels(front)?;
        let rest: Vec<Label> = self
            .labels
            .iter()
            .filter(|l| !front.contains(l))
            .cloned()
            .collect();
        let order: Vec<Label> = front.iter().chain(rest.iter()).cloned().collect();
        Ok((self.permute(order)?, rest))
    }

    /// ⟨self|other⟩, with `other` aligned to our label order.
    pub fn inner(&self, other: &Register<T>) -> Result<Complex<T>> {
        let other = other.aligned_to(&self.labels)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// True iff some unit phase `φ` gives `‖self − φ·other‖ ≤ tol`.
    ///
    /// `φ` is taken from the largest-magnitude amplitude of `other`.
    pub fn equal_up_to_global_phase(&self, other: &Register<T>, tol: T) -> Result<bool> {
        let other = other.aligned_to(&self.labels)?;
        let (k, _) = other
            .amps
            .iter()
            .enumerate()
            .fold((0, T::zero()), |best, (i, a)| {
                if a.norm() > best.1 {
                    (i, a.norm())
                } else {
                    best
                }
            });
        let rel = self.amps[k] * other.amps[k].conj();
        let phase = if rel.norm() > T::zero() {
            rel.unscale(rel.norm())
        } else {
            Complex::new(T::one(), T::zero())
        };
        Ok(distance(&self.amps, &other.amps, phase) <= tol)
    }

    /// Strict comparison: amplitudes equal within `tol` in the 2-norm, no phase freedom.
    pub fn approx_eq(&self, other: &Register<T>, tol: T) -> Result<bool> {
        let other = other.aligned_to(&self.labels)?;
        Ok(distance(&self.amps, &other.amps, Complex::new(T::one(), T::zero())) <= tol)
    }

    /// Multiplies every amplitude by a unit-modulus phase.
    pub fn with_global_phase(&self, phase: Complex<T>) -> Register<T> {
        let mut out = self.clone();
        for a in &mut out.amps {
            *a = *a * phase;
        }
        out
    }
}

fn distance<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>], phase: Complex<T>) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + (*x - phase * *y).norm_sqr())
        .sqrt()
}

/// Index of basis state `old` after reordering qubits so new position `p`
/// carries old position `src[p]`.
#[inline]
pub(crate) fn remap_index(old: usize, n: usize, src: &[usize]) -> usize {
    let mut new = 0usize;
    for (p, &s) in src.iter().enumerate() {
        if old >> shift_of(n, s) & 1 == 1 {
            new |= 1 << shift_of(n, p);
        }
    }
    new
}
