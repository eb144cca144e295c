use num_complex::Complex;

use super::label::Label;
use super::register::{check_labels, remap_index, Register};
use crate::error::{Error, Result};
use crate::scalar::{czero, Scalar};

/// Reduced state of a subset of qubits, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    labels: Vec<Label>,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// `|ψ⟩⟨ψ|` for a register.
    pub fn pure(reg: &Register<T>) -> Self {
        let v = reg.amplitudes();
        let d = v.len();
        let mut entries = vec![czero(); d * d];
        for i in 0..d {
            for j in 0..d {
                entries[i * d + j] = v[i] * v[j].conj();
            }
        }
        DensityMatrix {
            labels: reg.labels().to_vec(),
            entries,
        }
    }

    /// Builds from explicit entries; the matrix must be `2^m × 2^m`.
    pub fn from_entries<L: Into<Label>>(
        labels: impl IntoIterator<Item = L>,
        entries: Vec<Complex<T>>,
    ) -> Result<Self> {
        let labels: Vec<Label> = labels.into_iter().map(Into::into).collect();
        check_labels(&labels)?;
        let d = 1usize << labels.len();
        if entries.len() != d * d {
            return Err(Error::LengthMismatch {
                expected: d * d,
                found: entries.len(),
            });
        }
        Ok(DensityMatrix { labels, entries })
    }

    /// Convex combination `Σ wᵢ ρᵢ`. All inputs must share one label order.
    pub fn mixture(parts: &[(T, DensityMatrix<T>)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or(Error::ZeroVector)?;
        let mut entries = vec![czero(); first.entries.len()];
        for (w, rho) in parts {
            let rho = rho.permute(first.labels.iter())?;
            for (e, x) in entries.iter_mut().zip(&rho.entries) {
                *e = *e + x.scale(*w);
            }
        }
        Ok(DensityMatrix {
            labels: first.labels.clone(),
            entries,
        })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i * self.dim() + j]
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim()).fold(czero(), |acc, i| acc + self.entry(i, i))
    }

    /// `tr ρ²`; 1 exactly for pure states.
    pub fn purity(&self) -> T {
        // tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ.
        self.entries
            .iter()
            .fold(T::zero(), |acc, e| acc + e.norm_sqr())
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| (self.entry(i, j) - self.entry(j, i).conj()).norm() <= tol))
    }

    /// Eigenvalues in ascending order (Hermitian input assumed).
    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.entries, self.dim())
    }

    pub fn is_psd(&self, tol: T) -> bool {
        self.eigenvalues().first().is_none_or(|&l| l >= -tol)
    }

    /// Re-indexes rows and columns so the qubits appear in `new_order`.
    pub fn permute<L: Into<Label>>(&self, new_order: impl IntoIterator<Item = L>) -> Result<Self> {
        let new_order: Vec<Label> = new_order.into_iter().map(Into::into).collect();
        let n = self.labels.len();
        if new_order.len() != n {
            return Err(Error::NotPermutation);
        }
        let mut src = Vec::with_capacity(n);
        for l in &new_order {
            let k = self
                .labels
                .iter()
                .position(|x| x == l)
                .ok_or(Error::NotPermutation)?;
            if src.contains(&k) {
                return Err(Error::NotPermutation);
            }
            src.push(k);
        }
        let d = self.dim();
        let map: Vec<usize> = (0..d).map(|i| remap_index(i, n, &src)).collect();
        let mut entries = vec![czero(); d * d];
        for i in 0..d {
            for j in 0..d {
                entries[map[i] * d + map[j]] = self.entries[i * d + j];
            }
        }
        Ok(DensityMatrix {
            labels: new_order,
            entries,
        })
    }

    /// `⟨target|ρ|target⟩`, with the target aligned to this matrix's label order.
    pub fn fidelity_pure(&self, target: &Register<T>) -> Result<T> {
        let t = target.aligned_to(&self.labels)?;
        let v = t.amplitudes();
        let d = self.dim();
        let mut acc = czero();
        for i in 0..d {
            if v[i].norm_sqr() == T::zero() {
                continue;
            }
            let mut row = czero();
            for j in 0..d {
                row = row + self.entries[i * d + j] * v[j];
            }
            acc = acc + v[i].conj() * row;
        }
        Ok(acc.re)
    }
}

impl<T: Scalar> Register<T> {
    /// Partial trace over every qubit not listed in `keep`.
    ///
    /// The result is ordered as `keep`.
    pub fn reduced_density<L: Into<Label>>(
        &self,
        keep: impl IntoIterator<Item = L>,
    ) -> Result<DensityMatrix<T>> {
        let keep: Vec<Label> = keep.into_iter().map(Into::into).collect();
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        let (front, _) = self.bring_to_front(&keep)?;
        let d = 1usize << keep.len();
        let rest = front.amplitudes().len() / d;
        let a = front.amplitudes();
        let mut entries = vec![czero(); d * d];
        for i in 0..d {
            for j in i..d {
                let mut s = czero();
                for r in 0..rest {
                    s = s + a[i * rest + r] * a[j * rest + r].conj();
                }
                entries[i * d + j] = s;
                entries[j * d + i] = s.conj();
            }
        }
        Ok(DensityMatrix {
            labels: keep,
            entries,
        })
    }

    /// Fidelity of this pure state's reduction onto `target`'s qubits with `target`.
    pub fn fidelity_on(&self, target: &Register<T>) -> Result<T> {
        self.reduced_density(target.labels().iter())?
            .fidelity_pure(target)
    }
}

/// Eigenvalues of a Hermitian matrix via the real symmetric embedding
/// `[[Re, −Im], [Im, Re]]` and cyclic Jacobi rotations. Each eigenvalue of the
/// embedding appears twice; every other one is returned.
fn hermitian_eigenvalues<T: Scalar>(h: &[Complex<T>], d: usize) -> Vec<T> {
    let m = 2 * d;
    let mut a = vec![T::zero(); m * m];
    for i in 0..d {
        for j in 0..d {
            let z = h[i * d + j];
            a[i * m + j] = z.re;
            a[(i + d) * m + (j + d)] = z.re;
            a[(i + d) * m + j] = z.im;
            a[i * m + (j + d)] = -z.im;
        }
    }
    for _sweep in 0..100 {
        let off = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |acc, (i, j)| acc + a[i * m + j] * a[i * m + j]);
        if off <= T::epsilon() * T::epsilon() {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..m).map(|i| a[i * m + i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    ev.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::creal;

    fn c(x: f64) -> Complex<f64> {
        creal(x)
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let r = Register::make(&[("00", c(1.0)), ("11", c(1.0))], ["x", "y"]).unwrap();
        let rho = r.reduced_density(["x"]).unwrap();
        assert!((rho.entry(0, 0) - c(0.5)).norm() < 1e-15);
        assert!((rho.entry(1, 1) - c(0.5)).norm() < 1e-15);
        assert!(rho.entry(0, 1).norm() < 1e-15);
        assert!((rho.purity() - 0.5).abs() < 1e-15);
        let ev = rho.eigenvalues();
        assert!((ev[0] - 0.5).abs() < 1e-12 && (ev[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn product_reduces_to_projector() {
        let x = Register::make(&[("0", c(0.6)), ("1", Complex::new(0.0, 0.8))], ["x"]).unwrap();
        let y = Register::<f64>::basis("1", ["y"])
            .unwrap()
            .gate1("y", crate::qsim::Gate1::H)
            .unwrap();
        let rho = x.tensor(&y).unwrap().reduced_density(["x"]).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!((rho.fidelity_pure(&x).unwrap() - 1.0).abs() < 1e-12);
        assert!(rho.is_hermitian(1e-15));
        assert!(rho.is_psd(1e-10));
        assert!((rho.trace() - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn keep_order_is_respected() {
        let r = Register::<f64>::basis("01", ["x", "y"]).unwrap();
        let rho = r.reduced_density(["y", "x"]).unwrap();
        assert!((rho.entry(2, 2) - c(1.0)).norm() < 1e-15);
        assert_eq!(
            rho.permute(["x", "y"]).unwrap(),
            r.reduced_density(["x", "y"]).unwrap()
        );
    }

    #[test]
    fn reduce_errors() {
        let r = Register::<f64>::basis("01", ["x", "y"]).unwrap();
        assert_eq!(
            r.reduced_density(Vec::<Label>::new()),
            Err(Error::EmptyKeep)
        );
        assert_eq!(
            r.reduced_density(["z"]),
            Err(Error::UnknownLabel("z".into()))
        );
    }

    #[test]
    fn fidelity_basics() {
        let s00 = Register::<f64>::basis("00", ["x", "y"]).unwrap();
        let s11 = Register::<f64>::basis("11", ["x", "y"]).unwrap();
        let rho = DensityMatrix::pure(&s00);
        assert!((rho.fidelity_pure(&s00).unwrap() - 1.0).abs() < 1e-15);
        assert!(rho.fidelity_pure(&s11).unwrap().abs() < 1e-15);
        let other = Register::<f64>::basis("00", ["x", "z"]).unwrap();
        assert_eq!(rho.fidelity_pure(&other), Err(Error::LabelMismatch));
    }

    #[test]
    fn dephased_epr_fidelity_closed_form() {
        // diag(|a0|², 0, 0, |a1|²) against a0|00⟩ + a1|11⟩.
        let (a0, a1) = (Complex::new(0.6, 0.0), Complex::new(0.0, 0.8));
        let mut e = vec![c(0.0); 16];
        e[0] = c(a0.norm_sqr());
        e[15] = c(a1.norm_sqr());
        let rho = DensityMatrix::from_entries(["x", "y"], e).unwrap();
        let t = Register::make(&[("00", a0), ("11", a1)], ["x", "y"]).unwrap();
        let want = 0.6f64.powi(4) + 0.8f64.powi(4);
        assert!((rho.fidelity_pure(&t).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_a_non_diagonal_hermitian() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let e = vec![
            c(2.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, -1.0),
            c(2.0),
        ];
        let m = DensityMatrix::from_entries(["q"], e).unwrap();
        let ev = m.eigenvalues();
        assert!(
            (ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12,
            "{ev:?}"
        );
    }
}
