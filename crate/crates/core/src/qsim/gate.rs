use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::label::Label;
use super::register::{shift_of, Register};
use crate::error::{Error, Result};
use crate::scalar::{frac_1_sqrt_2, Scalar};

/// Single-qubit gates supported by the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate1 {
    I,
    X,
    Z,
    H,
}

impl fmt::Display for Gate1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Gate1::I => "I",
            Gate1::X => "X",
            Gate1::Z => "Z",
            Gate1::H => "H",
        };
        f.write_str(s)
    }
}

impl<T: Scalar> Register<T> {
    /// Applies `gate` to qubit `q` in place.
    pub fn apply_gate1(&mut self, q: &Label, gate: Gate1) -> Result<()> {
        let k = self.index_of(q)?;
        let mask = 1usize << shift_of(self.num_qubits(), k);
        let amps = self.amplitudes_mut();
        match gate {
            Gate1::I => {}
            Gate1::X => {
                for i in 0..amps.len() {
                    if i & mask == 0 {
                        amps.swap(i, i | mask);
                    }
                }
            }
            Gate1::Z => {
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & mask != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate1::H => {
                let h = frac_1_sqrt_2::<T>();
                for i in 0..amps.len() {
                    if i & mask == 0 {
                        let (a0, a1) = (amps[i], amps[i | mask]);
                        amps[i] = (a0 + a1).scale(h);
                        amps[i | mask] = (a0 - a1).scale(h);
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies a sequence of `(qubit, gate)` pairs in order.
    pub fn apply_all<'a>(
        &mut self,
        ops: impl IntoIterator<Item = (&'a Label, Gate1)>,
    ) -> Result<()> {
        for (q, g) in ops {
            self.apply_gate1(q, g)?;
        }
        Ok(())
    }

    /// Controlled-NOT: flips `target` on every basis state where `control` is 1.
    pub fn apply_cnot(&mut self, control: &Label, target: &Label) -> Result<()> {
        if control == target {
            return Err(Error::SameControlTarget(control.to_string()));
        }
        let n = self.num_qubits();
        let cmask = 1usize << shift_of(n, self.index_of(control)?);
        let tmask = 1usize << shift_of(n, self.index_of(target)?);
        let amps = self.amplitudes_mut();
        for i in 0..amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                amps.swap(i, i | tmask);
            }
        }
        Ok(())
    }

    /// Consuming variant of [`Register::apply_gate1`].
    pub fn gate1(mut self, q: impl Into<Label>, gate: Gate1) -> Result<Self> {
        self.apply_gate1(&q.into(), gate)?;
        Ok(self)
    }

    /// Consuming variant of [`Register::apply_cnot`].
    pub fn cnot(mut self, control: impl Into<Label>, target: impl Into<Label>) -> Result<Self> {
        self.apply_cnot(&control.into(), &target.into())?;
        Ok(self)
    }
}

#[allow(dead_code)]
pub(crate) fn matrix<T: Scalar>(gate: Gate1) -> [[Complex<T>; 2]; 2] {
    let o = Complex::new(T::one(), T::zero());
    let z = Complex::new(T::zero(), T::zero());
    let h = Complex::new(frac_1_sqrt_2::<T>(), T::zero());
    match gate {
        Gate1::I => [[o, z], [z, o]],
        Gate1::X => [[z, o], [o, z]],
        Gate1::Z => [[o, z], [z, -o]],
        Gate1::H => [[h, h], [h, -h]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::creal;

    fn c(x: f64) -> Complex<f64> {
        creal(x)
    }

    #[test]
    fn hadamard_on_zero() {
        let r = Register::<f64>::basis("0", ["q"])
            .unwrap()
            .gate1("q", Gate1::H)
            .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(r
            .approx_eq(
                &Register::make(&[("0", c(h)), ("1", c(h))], ["q"]).unwrap(),
                1e-15
            )
            .unwrap());
    }

    #[test]
    fn z_flips_one_component() {
        let a0 = Complex::new(0.6, 0.0);
        let a1 = Complex::new(0.0, 0.8);
        let r = Register::make(&[("0", a0), ("1", a1)], ["q"])
            .unwrap()
            .gate1("q", Gate1::Z)
            .unwrap();
        assert_eq!(r.amplitudes(), &[a0, -a1]);
    }

    #[test]
    fn zz_is_identity_on_even_parity_span() {
        let a0 = Complex::new(0.6, 0.0);
        let a1 = Complex::new(0.0, 0.8);
        let r = Register::make(&[("00", a0), ("11", a1)], ["b1", "b2"]).unwrap();
        let zz = r
            .clone()
            .gate1("b1", Gate1::Z)
            .unwrap()
            .gate1("b2", Gate1::Z)
            .unwrap();
        assert!(zz.approx_eq(&r, 1e-15).unwrap());
    }

    #[test]
    fn cnot_truth_table() {
        let r = Register::<f64>::basis("10", ["c", "t"])
            .unwrap()
            .cnot("c", "t")
            .unwrap();
        assert_eq!(r.amplitude("11").unwrap(), c(1.0));
        let r = Register::<f64>::basis("00", ["c", "t"])
            .unwrap()
            .cnot("c", "t")
            .unwrap();
        assert_eq!(r.amplitude("00").unwrap(), c(1.0));
        let r = Register::<f64>::basis("01", ["t", "c"])
            .unwrap()
            .cnot("c", "t")
            .unwrap();
        assert_eq!(r.amplitude("11").unwrap(), c(1.0));
    }

    #[test]
    fn gate_errors() {
        let r = Register::<f64>::basis("00", ["c", "t"]).unwrap();
        assert_eq!(
            r.clone().cnot("c", "c"),
            Err(Error::SameControlTarget("c".into()))
        );
        assert_eq!(
            r.clone().cnot("c", "x"),
            Err(Error::UnknownLabel("x".into()))
        );
        assert_eq!(r.gate1("x", Gate1::X), Err(Error::UnknownLabel("x".into())));
    }

    #[test]
    fn matrices_match_application() {
        let a0 = Complex::new(0.3, -0.2);
        let a1 = Complex::new(0.1, 0.9);
        let r = Register::make(&[("0", a0), ("1", a1)], ["q"]).unwrap();
        for g in [Gate1::I, Gate1::X, Gate1::Z, Gate1::H] {
            let m = matrix::<f64>(g);
            let v = r.amplitudes();
            let want = [
                m[0][0] * v[0] + m[0][1] * v[1],
                m[1][0] * v[0] + m[1][1] * v[1],
            ];
            let got = r.clone().gate1("q", g).unwrap();
            for (x, y) in got.amplitudes().iter().zip(want) {
                assert!((x - y).norm() < 1e-15, "{g}");
            }
        }
    }
}
