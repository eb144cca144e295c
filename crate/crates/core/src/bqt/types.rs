use std::fmt;

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{Label, Register};
use crate::scalar::{czero, Scalar};

/// Outcome of an X-basis measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "p")]
    Plus,
    #[serde(rename = "m")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// Outcome index as used by [`crate::qsim::Mode::Force`]: `+` is 0.
    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_bit(b: u8) -> Self {
        if b == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Wire encoding, `p` or `m`.
    pub fn code(self) -> &'static str {
        match self {
            Sign::Plus => "p",
            Sign::Minus => "m",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Results of the four single-qubit measurements made before the first announcement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step3 {
    /// Z-basis result on Alice's channel qubit a1.
    pub a1: u8,
    /// X-basis result on Alice's input qubit A2.
    pub alice_x: Sign,
    /// Z-basis result on Bob's channel qubit b3.
    pub b3: u8,
    /// X-basis result on Bob's input qubit B2.
    pub bob_x: Sign,
}

impl Step3 {
    /// All 16 combinations, ordered by a1, then b3, then A2, then B2.
    pub fn all() -> impl Iterator<Item = Step3> {
        (0..2u8).flat_map(|a1| {
            (0..2u8).flat_map(move |b3| {
                Sign::BOTH.into_iter().flat_map(move |alice_x| {
                    Sign::BOTH.into_iter().map(move |bob_x| Step3 {
                        a1,
                        alice_x,
                        b3,
                        bob_x,
                    })
                })
            })
        })
    }

    /// The branch worked through explicitly in the protocol description.
    pub const WORKED: Step3 = Step3 {
        a1: 0,
        alice_x: Sign::Plus,
        b3: 0,
        bob_x: Sign::Plus,
    };
}

impl fmt::Display for Step3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a1={} A2={} b3={} B2={}",
            self.a1, self.alice_x, self.b3, self.bob_x
        )
    }
}

/// Results of the X-basis measurements on A1 and B1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step4 {
    pub alice: Sign,
    pub bob: Sign,
}

impl Step4 {
    pub fn all() -> impl Iterator<Item = Step4> {
        Sign::BOTH
            .into_iter()
            .flat_map(|alice| Sign::BOTH.into_iter().map(move |bob| Step4 { alice, bob }))
    }
}

impl fmt::Display for Step4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A1={} B1={}", self.alice, self.bob)
    }
}

/// Full assignment of the six measurement outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LeafKey {
    pub step3: Step3,
    pub step4: Step4,
}

impl LeafKey {
    pub const COUNT: usize = 64;

    /// All 64 leaves in canonical order (step-3 order, then A1, then B1).
    pub fn all() -> impl Iterator<Item = LeafKey> {
        Step3::all().flat_map(|step3| Step4::all().map(move |step4| LeafKey { step3, step4 }))
    }

    /// Position in [`LeafKey::all`].
    pub fn index(&self) -> usize {
        let s = &self.step3;
        let i3 = (s.a1 as usize) << 3
            | (s.b3 as usize) << 2
            | (s.alice_x.bit() as usize) << 1
            | s.bob_x.bit() as usize;
        i3 << 2 | (self.step4.alice.bit() as usize) << 1 | self.step4.bob.bit() as usize
    }
}

impl fmt::Display for LeafKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.step3, self.step4)
    }
}

/// A two-qubit state `c0|00⟩ + c1|11⟩` to be teleported.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EprInput<T: Scalar> {
    pub c0: Complex<T>,
    pub c1: Complex<T>,
}

impl<T: Scalar> EprInput<T> {
    /// Requires `|c0|² + |c1|² = 1` within [`Scalar::EQ_TOL`].
    pub fn new(c0: Complex<T>, c1: Complex<T>) -> Result<Self> {
        Self::normalized(c0, c1, T::EQ_TOL)
    }

    /// Accepts coefficients whose squared norm is within `tol` of 1 and
    /// rescales them to unit norm.
    pub fn normalized(c0: Complex<T>, c1: Complex<T>, tol: T) -> Result<Self> {
        let n2 = c0.norm_sqr() + c1.norm_sqr();
        if !n2.is_finite() || (n2 - T::one()).abs() > tol {
            return Err(Error::NotNormalized(n2.as_f64()));
        }
        let inv = T::one() / n2.sqrt();
        Ok(EprInput {
            c0: c0.scale(inv),
            c1: c1.scale(inv),
        })
    }

    pub fn real(c0: f64, c1: f64) -> Result<Self> {
        Self::new(
            Complex::new(T::lit(c0), T::zero()),
            Complex::new(T::lit(c1), T::zero()),
        )
    }

    /// `c0 = cos θ`, `c1 = e^{iφ} sin θ`.
    pub fn from_angles(theta: T, phi: T) -> Self {
        EprInput {
            c0: Complex::new(theta.cos(), T::zero()),
            c1: Complex::from_polar(theta.sin(), phi),
        }
    }

    /// Uniformly random magnitudes split and independent phases on both coefficients.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let tau = std::f64::consts::TAU;
        let theta = T::lit(rng.gen::<f64>() * std::f64::consts::FRAC_PI_2);
        let p0 = T::lit(rng.gen::<f64>() * tau);
        let p1 = T::lit(rng.gen::<f64>() * tau);
        EprInput {
            c0: Complex::from_polar(theta.cos(), p0),
            c1: Complex::from_polar(theta.sin(), p1),
        }
    }

    pub fn with_global_phase(self, phase: T) -> Self {
        let u = Complex::from_polar(T::one(), phase);
        EprInput {
            c0: self.c0 * u,
            c1: self.c1 * u,
        }
    }

    /// `|c0|⁴ + |c1|⁴`.
    pub fn dephased_fidelity(&self) -> T {
        let a = self.c0.norm_sqr();
        let b = self.c1.norm_sqr();
        a * a + b * b
    }

    /// `c0|00⟩ + c1|11⟩` on the given pair.
    pub fn register<L: Into<Label>>(&self, labels: [L; 2]) -> Result<Register<T>> {
        let mut amps = vec![czero(); 4];
        amps[0] = self.c0;
        amps[3] = self.c1;
        Register::from_amplitudes(labels, amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaf_order_and_index_agree() {
        for (i, k) in LeafKey::all().enumerate() {
            assert_eq!(k.index(), i);
        }
        assert_eq!(LeafKey::all().count(), LeafKey::COUNT);
        assert_eq!(Step3::all().next(), Some(Step3::WORKED));
    }

    #[test]
    fn step3_order_follows_measurement_table() {
        let v: Vec<Step3> = Step3::all().collect();
        assert_eq!(
            (v[1].bob_x, v[2].alice_x, v[4].b3, v[8].a1),
            (Sign::Minus, Sign::Minus, 1, 1)
        );
    }

    #[test]
    fn input_validation() {
        assert!(EprInput::<f64>::real(0.6, 0.8).is_ok());
        assert!(matches!(
            EprInput::<f64>::real(1.0, 1.0),
            Err(Error::NotNormalized(_))
        ));
        let e = EprInput::<f64>::normalized(
            Complex::new(0.6, 0.0),
            Complex::new(0.8 + 1e-10, 0.0),
            1e-9,
        )
        .unwrap();
        assert!((e.c0.norm_sqr() + e.c1.norm_sqr() - 1.0).abs() < 1e-15);
        let a = EprInput::<f64>::from_angles(0.3, 1.2);
        assert!((a.c0.norm_sqr() + a.c1.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(
            (EprInput::<f64>::real(0.6, 0.8).unwrap().dephased_fidelity() - 0.5392).abs() < 1e-15
        );
    }

    #[test]
    fn sign_wire_codes() {
        assert_eq!(serde_json::to_string(&Sign::Minus).unwrap(), "\"m\"");
        assert_eq!(serde_json::from_str::<Sign>("\"p\"").unwrap(), Sign::Plus);
        assert_eq!(Sign::from_bit(Sign::Minus.bit()), Sign::Minus);
    }
}
