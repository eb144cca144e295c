use std::fmt;

use num_complex::Complex;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::label::Label;
use super::register::{shift_of, Register};
use crate::error::{Error, Result};
use crate::scalar::{czero, frac_1_sqrt_2, Scalar};

/// Single-qubit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Z => "Z",
            Basis::X => "X",
        })
    }
}

/// How an outcome is chosen.
///
/// `Sample` consumes exactly one `f64` draw from the generator per measurement.
pub enum Mode<'a> {
    Sample(&'a mut dyn RngCore),
    Force(u8),
}

impl fmt::Debug for Mode<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Sample(_) => f.write_str("Sample"),
            Mode::Force(o) => write!(f, "Force({o})"),
        }
    }
}

impl Mode<'_> {
    /// Reborrows, so one generator can drive a sequence of measurements.
    pub fn reborrow(&mut self) -> Mode<'_> {
        match self {
            Mode::Sample(rng) => Mode::Sample(&mut **rng),
            Mode::Force(o) => Mode::Force(*o),
        }
    }
}

/// Result of a projective measurement.
///
/// For the Z basis `outcome` is the bit value; for X, `0` is `|+⟩` and `1` is `|−⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement<T: Scalar> {
    pub outcome: u8,
    pub probability: T,
    /// Post-measurement state with the measured qubit removed.
    pub collapsed: Register<T>,
}

/// Selects an outcome index from a probability table.
///
/// Sampling draws one uniform `u ∈ [0,1)` and walks the cumulative sum;
/// outcomes below [`Scalar::MIN_PROB`] are never selected.
pub(crate) fn choose<T: Scalar>(probs: &[T], mode: Mode<'_>) -> Result<usize> {
    match mode {
        Mode::Force(o) => {
            let o = o as usize;
            if o >= probs.len() {
                return Err(Error::InvalidOutcome(o as u8));
            }
            if probs[o] < T::MIN_PROB {
                return Err(Error::ZeroProbability(probs[o].as_f64()));
            }
            Ok(o)
        }
        Mode::Sample(rng) => {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut last = None;
            for (i, p) in probs.iter().enumerate() {
                if *p < T::MIN_PROB {
                    continue;
                }
                acc += p.as_f64();
                last = Some(i);
                if u < acc {
                    return Ok(i);
                }
            }
            last.ok_or(Error::ZeroVector)
        }
    }
}

impl<T: Scalar> Register<T> {
    /// Splits the amplitudes on qubit `k` into the `bit = 0` and `bit = 1`
    /// halves, each indexed by the remaining qubits in order.
    fn halves(&self, k: usize) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let n = self.num_qubits();
        let s = shift_of(n, k);
        let low = (1usize << s) - 1;
        let half = self.amplitudes().len() / 2;
        let mut h0 = vec![czero(); half];
        let mut h1 = vec![czero(); half];
        for (i, a) in self.amplitudes().iter().enumerate() {
            let r = ((i >> (s + 1)) << s) | (i & low);
            if i >> s & 1 == 0 {
                h0[r] = *a;
            } else {
                h1[r] = *a;
            }
        }
        (h0, h1)
    }

    /// Unnormalized projections onto both outcomes of `basis` on qubit `k`.
    fn projections(&self, k: usize, basis: Basis) -> [Vec<Complex<T>>; 2] {
        let (h0, h1) = self.halves(k);
        match basis {
            Basis::Z => [h0, h1],
            Basis::X => {
                let h = frac_1_sqrt_2::<T>();
                let plus = h0
                    .iter()
                    .zip(&h1)
                    .map(|(a, b)| (*a + *b).scale(h))
                    .collect();
                let minus = h0
                    .iter()
                    .zip(&h1)
                    .map(|(a, b)| (*a - *b).scale(h))
                    .collect();
                [plus, minus]
            }
        }
    }

    /// Born probabilities of both outcomes of `basis` on qubit `q`.
    pub fn outcome_probabilities(&self, q: &Label, basis: Basis) -> Result<[T; 2]> {
        let k = self.index_of(q)?;
        let [p0, p1] = self.projections(k, basis);
        Ok([norm_sqr(&p0), norm_sqr(&p1)])
    }

    /// Projective measurement of qubit `q`; the qubit is dropped from the result.
    pub fn measure(&self, q: &Label, basis: Basis, mode: Mode<'_>) -> Result<Measurement<T>> {
        let k = self.index_of(q)?;
        let projs = self.projections(k, basis);
        let probs = [norm_sqr(&projs[0]), norm_sqr(&projs[1])];
        let o = choose(&probs, mode)?;
        let [p0, p1] = projs;
        let amps = if o == 0 { p0 } else { p1 };
        let labels: Vec<Label> = self
            .labels()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, l)| l.clone())
            .collect();
        let mut collapsed = Register::from_parts(labels, amps);
        collapsed.normalize()?;
        Ok(Measurement {
            outcome: o as u8,
            probability: probs[o],
            collapsed,
        })
    }
}

pub(crate) fn norm_sqr<T: Scalar>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::creal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus() -> Register<f64> {
        Register::<f64>::basis("0", ["q"])
            .unwrap()
            .gate1("q", Gate1::H)
            .unwrap()
    }

    use crate::qsim::Gate1;

    #[test]
    fn z_measure_plus_forcing_zero() {
        let m = plus()
            .measure(&"q".into(), Basis::Z, Mode::Force(0))
            .unwrap();
        assert_eq!(m.outcome, 0);
        assert!((m.probability - 0.5).abs() < 1e-15);
        assert_eq!(m.collapsed.num_qubits(), 0);
        assert_eq!(m.collapsed.amplitudes(), &[creal(1.0)]);
    }

    #[test]
    fn x_measure_plus_is_certain() {
        let p = plus().outcome_probabilities(&"q".into(), Basis::X).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1] < 1e-15);
        let err = plus()
            .measure(&"q".into(), Basis::X, Mode::Force(1))
            .unwrap_err();
        assert!(matches!(err, Error::ZeroProbability(_)));
    }

    #[test]
    fn measured_qubit_is_removed_in_order() {
        let r = Register::<f64>::basis("101", ["x", "y", "z"]).unwrap();
        let m = r.measure(&"y".into(), Basis::Z, Mode::Force(0)).unwrap();
        assert_eq!(m.collapsed.labels(), &[Label::from("x"), Label::from("z")]);
        assert_eq!(m.collapsed.amplitude("11").unwrap(), creal(1.0));
        assert_eq!(
            r.measure(&"w".into(), Basis::Z, Mode::Force(0)),
            Err(Error::UnknownLabel("w".into()))
        );
        assert_eq!(
            r.measure(&"y".into(), Basis::Z, Mode::Force(2)),
            Err(Error::InvalidOutcome(2))
        );
    }

    #[test]
    fn sampling_matches_born_frequencies() {
        let r = Register::make(&[("0", creal(0.6)), ("1", creal(0.8))], ["q"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 20_000;
        let ones = (0..n)
            .filter(|_| {
                r.measure(&"q".into(), Basis::Z, Mode::Sample(&mut rng))
                    .unwrap()
                    .outcome
                    == 1
            })
            .count();
        let f = ones as f64 / n as f64;
        let sigma = (0.64 * 0.36 / n as f64).sqrt();
        assert!((f - 0.64).abs() < 5.0 * sigma, "{f}");
    }

    #[test]
    fn sample_never_picks_impossible_outcome() {
        let r = Register::<f64>::basis("1", ["q"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let m = r
                .measure(&"q".into(), Basis::Z, Mode::Sample(&mut rng))
                .unwrap();
            assert_eq!(m.outcome, 1);
        }
    }
}
