//! Unit phases in three precision tiers.
//!
//! A phase is a point on the unit circle. Exact phases are stored as reduced
//! turn fractions: `Dyadic { num, exp }` is e^{2πi·num/2^exp} and
//! `Rational { num, den }` is e^{2πi·num/den} with `den` not a power of two.
//! `Float { radians }` is the inexact escape hatch. Products and conjugates
//! never leave the exact tiers; a float operand makes the result float.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest allowed dyadic exponent, so `1u64 << exp` and residue arithmetic
/// cannot overflow.
pub const MAX_DYADIC_EXP: u32 = 62;

/// Tolerance for comparisons that involve at least one float-tier phase.
pub const MIXED_EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PhaseError {
    #[error("turn fraction has zero denominator")]
    ZeroDenominator,
    #[error("angle must be finite")]
    NonFiniteAngle,
    #[error("dyadic exponent {0} exceeds {MAX_DYADIC_EXP}")]
    ExponentTooLarge(u32),
}

/// Outcome of asking whether a phase is a 2^n-th root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoPowerRoot {
    /// The phase has exact order 2^n.
    Root(u32),
    /// Exact phase that is provably not a root of unity of 2-power order.
    NotTwoPowerRoot,
    /// Float tier: membership cannot be certified either way.
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    /// e^{2πi·num/2^exp}; reduced, so `num` is odd unless `(num, exp) = (0, 0)`.
    Dyadic { num: u64, exp: u32 },
    /// e^{2πi·num/den}; reduced and `den` is not a power of two.
    Rational { num: u64, den: u64 },
    /// e^{i·radians} with radians in [0, 2π).
    Float { radians: f64 },
}

fn reduce_dyadic(mut num: u64, mut exp: u32) -> Phase {
    num &= mask(exp);
    while num & 1 == 0 && exp > 0 {
        num >>= 1;
        exp -= 1;
    }
    if num == 0 {
        exp = 0;
    }
    Phase::Dyadic { num, exp }
}

fn mask(exp: u32) -> u64 {
    if exp == 0 {
        0
    } else {
        (1u64 << exp) - 1
    }
}

/// Reduces a nonnegative turn fraction and picks the exact tier.
fn reduce_turn(num: u128, den: u128) -> Result<Phase, PhaseError> {
    debug_assert!(den > 0);
    let num = num % den;
    let g = num.gcd(&den);
    let (num, den) = (num / g, den / g);
    if den.is_power_of_two() {
        let exp = den.trailing_zeros();
        if exp > MAX_DYADIC_EXP {
            return Err(PhaseError::ExponentTooLarge(exp));
        }
        Ok(Phase::Dyadic { num: num as u64, exp })
    } else {
        let den = u64::try_from(den).map_err(|_| PhaseError::ExponentTooLarge(64))?;
        Ok(Phase::Rational { num: num as u64, den })
    }
}

fn wrap_radians(r: f64) -> f64 {
    let w = r.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

impl Phase {
    pub const fn one() -> Self {
        Phase::Dyadic { num: 0, exp: 0 }
    }

    pub const fn minus_one() -> Self {
        Phase::Dyadic { num: 1, exp: 1 }
    }

    /// The imaginary unit, turn 1/4.
    pub const fn i() -> Self {
        Phase::Dyadic { num: 1, exp: 2 }
    }

    /// e^{2πi·num/2^exp}, reduced.
    pub fn dyadic(num: u64, exp: u32) -> Result<Self, PhaseError> {
        if exp > MAX_DYADIC_EXP {
            return Err(PhaseError::ExponentTooLarge(exp));
        }
        Ok(reduce_dyadic(num, exp))
    }

    /// e^{2πi·num/den} for an arbitrary integer turn fraction.
    pub fn from_turn(num: i64, den: i64) -> Result<Self, PhaseError> {
        if den == 0 {
            return Err(PhaseError::ZeroDenominator);
        }
        // Normalize to a nonnegative fraction of a positive denominator.
        let d = den.unsigned_abs() as u128;
        let n = if den < 0 { -(num as i128) } else { num as i128 };
        let n = n.rem_euclid(d as i128) as u128;
        reduce_turn(n, d)
    }

    pub fn from_radians(radians: f64) -> Result<Self, PhaseError> {
        if !radians.is_finite() {
            return Err(PhaseError::NonFiniteAngle);
        }
        Ok(Phase::Float {
            radians: wrap_radians(radians),
        })
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Phase::Float { .. })
    }

    /// Structural identity check; never true for the float tier.
    pub fn is_one(&self) -> bool {
        matches!(self, Phase::Dyadic { num: 0, exp: 0 })
    }

    /// Turn fraction (num, den) for exact tiers.
    pub fn turn(&self) -> Option<(u64, u64)> {
        match *self {
            Phase::Dyadic { num, exp } => Some((num, 1u64 << exp)),
            Phase::Rational { num, den } => Some((num, den)),
            Phase::Float { .. } => None,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Self) -> Self {
        use Phase::*;
        match (self, other) {
            (Dyadic { num: n1, exp: e1 }, Dyadic { num: n2, exp: e2 }) => {
                let exp = e1.max(e2);
                let s = (n1 << (exp - e1)) + (n2 << (exp - e2));
                reduce_dyadic(s, exp)
            }
            (a, b) if a.is_exact() && b.is_exact() => {
                let (n1, d1) = a.turn().unwrap();
                let (n2, d2) = b.turn().unwrap();
                let num = n1 as u128 * d2 as u128 + n2 as u128 * d1 as u128;
                let den = d1 as u128 * d2 as u128;
                // Inputs are reduced u64 fractions, so the reduced sum fits.
                reduce_turn(num, den).expect("turn denominator overflow")
            }
            (a, b) => {
                let r = a.radians() + b.radians();
                Phase::Float {
                    radians: wrap_radians(r),
                }
            }
        }
    }

    pub fn conj(self) -> Self {
        match self {
            Phase::Dyadic { num: 0, exp: 0 } => self,
            Phase::Dyadic { num, exp } => Phase::Dyadic {
                num: (1u64 << exp) - num,
                exp,
            },
            Phase::Rational { num, den } => Phase::Rational {
                num: den - num,
                den,
            },
            Phase::Float { radians } => Phase::Float {
                radians: wrap_radians(-radians),
            },
        }
    }

    /// Integer power by binary exponentiation on the angle, so exponents as
    /// large as the sweep windows never overflow the turn arithmetic.
    pub fn pow(self, e: i64) -> Self {
        let (mut base, mut e) = if e < 0 {
            (self.conj(), e.unsigned_abs())
        } else {
            (self, e as u64)
        };
        let mut acc = Phase::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    /// Exact classification of 2-power-root membership.
    ///
    /// A reduced rational turn with a denominator that is not a power of two
    /// has order divisible by an odd prime, so it can never be a 2-power
    /// root; the float tier is never certified either way.
    pub fn classify_two_power_root(self) -> TwoPowerRoot {
        match self {
            Phase::Dyadic { exp, .. } => TwoPowerRoot::Root(exp),
            Phase::Rational { .. } => TwoPowerRoot::NotTwoPowerRoot,
            Phase::Float { .. } => TwoPowerRoot::Indeterminate,
        }
    }

    pub fn radians(&self) -> f64 {
        match *self {
            Phase::Dyadic { num, exp } => TAU * (num as f64) / (1u64 << exp) as f64,
            Phase::Rational { num, den } => TAU * (num as f64) / den as f64,
            Phase::Float { radians } => radians,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.radians())
    }

    /// Distance-based comparison used whenever a float tier is involved.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.to_complex() - other.to_complex()).norm() <= tol
    }

    /// Structural equality on exact tiers, tolerance [`MIXED_EQ_TOL`] as soon
    /// as one side is float.
    pub fn agrees(&self, other: &Self) -> bool {
        if self.is_exact() && other.is_exact() {
            self == other
        } else {
            self.approx_eq(other, MIXED_EQ_TOL)
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Phase::Dyadic { num: 0, exp: 0 } => write!(f, "1"),
            Phase::Dyadic { num: 1, exp: 1 } => write!(f, "-1"),
            Phase::Dyadic { num: 1, exp: 2 } => write!(f, "i"),
            Phase::Dyadic { num: 3, exp: 2 } => write!(f, "-i"),
            Phase::Dyadic { num, exp } => write!(f, "turn {}/{}", num, 1u64 << exp),
            Phase::Rational { num, den } => write!(f, "turn {num}/{den}"),
            Phase::Float { radians } => write!(f, "angle {radians}"),
        }
    }
}

/// Wire form: {"dyadic":[h,n]} | {"rational":[p,q]} | {"angle":radians}.
#[derive(Serialize, Deserialize)]
enum PhaseWire {
    #[serde(rename = "dyadic")]
    Dyadic(u64, u32),
    #[serde(rename = "rational")]
    Rational(u64, u64),
    #[serde(rename = "angle")]
    Angle(f64),
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let wire = match *self {
            Phase::Dyadic { num, exp } => PhaseWire::Dyadic(num, exp),
            Phase::Rational { num, den } => PhaseWire::Rational(num, den),
            Phase::Float { radians } => PhaseWire::Angle(radians),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = PhaseWire::deserialize(deserializer)?;
        match wire {
            PhaseWire::Dyadic(num, exp) => Phase::dyadic(num, exp).map_err(D::Error::custom),
            PhaseWire::Rational(num, den) => {
                if den == 0 {
                    return Err(D::Error::custom(PhaseError::ZeroDenominator));
                }
                reduce_turn(num as u128, den as u128).map_err(D::Error::custom)
            }
            PhaseWire::Angle(radians) => Phase::from_radians(radians).map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dy(num: u64, exp: u32) -> Phase {
        Phase::dyadic(num, exp).unwrap()
    }

    fn rt(num: i64, den: i64) -> Phase {
        Phase::from_turn(num, den).unwrap()
    }

    #[test]
    fn products_of_small_roots() {
        assert_eq!(dy(1, 1).mul(dy(1, 1)), Phase::one());
        assert_eq!(dy(1, 2).mul(dy(1, 2)), dy(1, 1));
        assert_eq!(rt(1, 3).mul(rt(1, 3)), rt(2, 3));
        // Float-tier contamination: one float operand makes the result float.
        let f = Phase::from_radians(0.5).unwrap();
        assert!(!dy(1, 2).mul(f).is_exact());
    }

    #[test]
    fn conjugates() {
        assert_eq!(dy(1, 2).conj(), dy(3, 2));
        assert_eq!(Phase::one().conj(), Phase::one());
        assert_eq!(rt(1, 3).conj(), rt(2, 3));
        let f = Phase::from_radians(1.0).unwrap();
        assert!(f.mul(f.conj()).approx_eq(&Phase::one(), 1e-15));
    }

    #[test]
    fn two_power_root_classification() {
        assert_eq!(dy(1, 1).classify_two_power_root(), TwoPowerRoot::Root(1));
        assert_eq!(Phase::one().classify_two_power_root(), TwoPowerRoot::Root(0));
        assert_eq!(
            rt(1, 3).classify_two_power_root(),
            TwoPowerRoot::NotTwoPowerRoot
        );
        assert_eq!(
            Phase::from_radians(0.1).unwrap().classify_two_power_root(),
            TwoPowerRoot::Indeterminate
        );
    }

    #[test]
    fn reduction_is_canonical() {
        assert_eq!(dy(2, 2), dy(1, 1));
        assert_eq!(dy(4, 2), Phase::one());
        assert_eq!(rt(6, 9), rt(2, 3));
        assert_eq!(rt(-1, 3), rt(2, 3));
        assert_eq!(rt(3, 12), dy(1, 2));
        assert_eq!(rt(5, -10), dy(1, 1));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(Phase::from_turn(1, 0), Err(PhaseError::ZeroDenominator));
        assert_eq!(
            Phase::from_radians(f64::NAN),
            Err(PhaseError::NonFiniteAngle)
        );
        assert_eq!(
            Phase::dyadic(1, 63),
            Err(PhaseError::ExponentTooLarge(63))
        );
    }

    fn random_phase(rng: &mut StdRng) -> Phase {
        match rng.random_range(0..3) {
            0 => dy(rng.random_range(0..1u64 << 10), 10),
            1 => rt(rng.random_range(0..5040), 5040),
            _ => Phase::from_radians(rng.random_range(0.0..TAU)).unwrap(),
        }
    }

    #[test]
    fn mul_is_associative_and_commutative() {
        let mut rng = StdRng::seed_from_u64(0x51C0FFEE);
        for _ in 0..10_000 {
            let (a, b, c) = (
                random_phase(&mut rng),
                random_phase(&mut rng),
                random_phase(&mut rng),
            );
            let left = a.mul(b).mul(c);
            let right = a.mul(b.mul(c));
            if left.is_exact() && right.is_exact() {
                assert_eq!(left, right);
            } else {
                assert!(left.approx_eq(&right, 1e-12), "{a} {b} {c}");
            }
            let ab = a.mul(b);
            let ba = b.mul(a);
            if ab.is_exact() {
                assert_eq!(ab, ba);
            } else {
                assert!(ab.approx_eq(&ba, 1e-12));
            }
        }
    }

    #[test]
    fn conj_is_inverse() {
        let mut rng = StdRng::seed_from_u64(0xC0B0);
        for _ in 0..10_000 {
            let a = random_phase(&mut rng);
            let p = a.mul(a.conj());
            if p.is_exact() {
                assert!(p.is_one());
            } else {
                assert!(p.approx_eq(&Phase::one(), 1e-12));
            }
        }
    }

    #[test]
    fn squaring_chain_of_odd_dyadic_hits_minus_one_then_one() {
        for exp in 1..=16u32 {
            for num in [1u64, (1 << exp) - 1, (1 << (exp - 1)) | 1] {
                let mut z = dy(num, exp);
                assert_eq!(z.classify_two_power_root(), TwoPowerRoot::Root(exp));
                for _ in 0..exp - 1 {
                    z = z.mul(z);
                }
                assert_eq!(z, Phase::minus_one());
                assert_eq!(z.mul(z), Phase::one());
            }
        }
    }

    #[test]
    fn float_evaluation_matches_exact_angles() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..10_000 {
            let a = random_phase(&mut rng);
            let b = random_phase(&mut rng);
            let prod = a.mul(b).to_complex();
            let float_prod = a.to_complex() * b.to_complex();
            assert!((prod - float_prod).norm() <= 1e-12);
        }
        // RationalTurn(1/3)^2 against a direct float evaluation.
        let z = rt(1, 3).mul(rt(1, 3));
        assert_eq!(z, rt(2, 3));
        let direct = Complex64::from_polar(1.0, 2.0 * TAU / 3.0);
        assert!((z.to_complex() - direct).norm() < 1e-15);
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..2_000 {
            let a = random_phase(&mut rng);
            let e = rng.random_range(-40..40i64);
            let mut expect = Phase::one();
            for _ in 0..e.unsigned_abs() {
                expect = expect.mul(if e < 0 { a.conj() } else { a });
            }
            let got = a.pow(e);
            if got.is_exact() {
                assert_eq!(got, expect);
            } else {
                assert!(got.approx_eq(&expect, 1e-9));
            }
        }
        // Exponents far beyond u32 stay exact and reduced.
        assert_eq!(dy(1, 20).pow(1 << 20), Phase::one());
        assert_eq!(dy(1, 20).pow((1 << 19) + 3), dy(1, 20).pow(3).mul(dy(1, 1)));
    }

    #[test]
    fn serde_wire_format() {
        let z = dy(3, 3);
        assert_eq!(serde_json::to_string(&z).unwrap(), r#"{"dyadic":[3,3]}"#);
        let r = rt(2, 5);
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"rational":[2,5]}"#);
        let f = Phase::from_radians(1.5).unwrap();
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"{"angle":1.5}"#);
        for z in [z, r, f] {
            let back: Phase = serde_json::from_str(&serde_json::to_string(&z).unwrap()).unwrap();
            assert_eq!(back, z);
        }
        // Non-canonical wire input reduces on parse.
        let back: Phase = serde_json::from_str(r#"{"dyadic":[4,3]}"#).unwrap();
        assert_eq!(back, dy(1, 1));
        let back: Phase = serde_json::from_str(r#"{"rational":[3,12]}"#).unwrap();
        assert_eq!(back, dy(1, 2));
        assert!(serde_json::from_str::<Phase>(r#"{"rational":[1,0]}"#).is_err());
        assert!(serde_json::from_str::<Phase>(r#"{"angle":null}"#).is_err());
    }
}
