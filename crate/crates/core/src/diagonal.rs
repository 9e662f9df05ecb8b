//! Localized diagonal unitaries: tables of unit phases indexed by residues
//! mod 2^k.
//!
//! A table at level k acts on l^2(Z) by e_m -> d(m mod 2^k) e_m. The algebra
//! here mirrors the operator picture: entrywise products, the shift
//! endomorphism phi (phi(d) = S_1 d S_1* + S_2 d S_2*, on entries
//! phi(d)(m) = d(floor(m/2))), conjugation by powers of the translation U,
//! and compression by powers of S_2. Levels embed upward by periodic
//! extension; `canonicalize` removes a redundant top bit so each operator has
//! one minimal table.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::phase::{Phase, TwoPowerRoot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DiagonalError {
    #[error("table length {len} does not match 2^{level}")]
    TableSizeMismatch { len: usize, level: u32 },
    #[error("level {requested} exceeds the configured cap {cap}")]
    LevelCapExceeded { requested: u32, cap: u32 },
    #[error("operation requires exact-tier phases")]
    NonExactPhase,
}

fn check_cap(requested: u32) -> Result<(), DiagonalError> {
    let cap = crate::level_cap();
    if requested > cap {
        Err(DiagonalError::LevelCapExceeded { requested, cap })
    } else {
        Ok(())
    }
}

#[derive(Clone)]
pub struct DiagonalUnitary {
    level: u32,
    table: Vec<Phase>,
}

impl DiagonalUnitary {
    pub fn identity() -> Self {
        Self::constant(Phase::one())
    }

    /// Level-0 table holding a single phase.
    pub fn constant(z: Phase) -> Self {
        DiagonalUnitary {
            level: 0,
            table: vec![z],
        }
    }

    /// Builds a table from 2^level phases. The table is kept as given;
    /// canonical minimal form is a separate step.
    pub fn from_table(level: u32, table: Vec<Phase>) -> Result<Self, DiagonalError> {
        check_cap(level)?;
        if table.len() != 1usize << level {
            return Err(DiagonalError::TableSizeMismatch {
                len: table.len(),
                level,
            });
        }
        Ok(DiagonalUnitary { level, table })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn entries(&self) -> &[Phase] {
        &self.table
    }

    pub fn is_constant(&self) -> bool {
        self.clone().canonicalize().level == 0
    }

    /// Entry on the basis vector e_m; negative m reads the table through its
    /// nonnegative representative mod 2^level.
    pub fn eval_at(&self, m: i64) -> Phase {
        let modulus = 1i64 << self.level;
        self.table[m.rem_euclid(modulus) as usize]
    }

    /// Periodic extension to a (not necessarily canonical) higher level.
    pub fn embed(&self, level: u32) -> Self {
        assert!(level >= self.level, "embed only grows levels");
        let size = 1usize << level;
        let mask = (1usize << self.level) - 1;
        DiagonalUnitary {
            level,
            table: (0..size).map(|r| self.table[r & mask]).collect(),
        }
    }

    fn mul_impl(&self, other: &Self, conj_other: bool) -> Self {
        let level = self.level.max(other.level);
        let size = 1usize << level;
        let (ma, mb) = ((1usize << self.level) - 1, (1usize << other.level) - 1);
        let table = (0..size)
            .map(|r| {
                let b = other.table[r & mb];
                let b = if conj_other { b.conj() } else { b };
                self.table[r & ma].mul(b)
            })
            .collect();
        DiagonalUnitary { level, table }.canonicalize()
    }

    /// Entrywise product after embedding both tables to the common level;
    /// the result is canonical.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_impl(other, false)
    }

    /// Entrywise product with the adjoint of `other`.
    pub fn mul_adjoint(&self, other: &Self) -> Self {
        self.mul_impl(other, true)
    }

    pub fn scale(&self, z: Phase) -> Self {
        self.mul(&DiagonalUnitary::constant(z))
    }

    pub fn adjoint(&self) -> Self {
        DiagonalUnitary {
            level: self.level,
            table: self.table.iter().map(|p| p.conj()).collect(),
        }
    }

    /// Shift endomorphism: phi(d)(m) = d(floor(m/2)). Output entries are
    /// constant on sibling pairs {2m, 2m+1}. Panics if the grown level would
    /// pass the configured cap.
    pub fn phi(&self) -> Self {
        let level = self.level + 1;
        assert!(
            check_cap(level).is_ok(),
            "phi would grow level {} past the cap {}",
            self.level,
            crate::level_cap()
        );
        let table = (0..1usize << level).map(|r| self.table[r >> 1]).collect();
        DiagonalUnitary { level, table }.canonicalize()
    }

    /// Conjugation by U^j: entry r of the result reads entry (r - j) mod 2^k.
    pub fn ad_u(&self, j: i64) -> Self {
        let modulus = 1i64 << self.level;
        let shift = j.rem_euclid(modulus) as usize;
        let size = 1usize << self.level;
        let table = (0..size)
            .map(|r| self.table[(r + size - shift) & (size - 1)])
            .collect();
        DiagonalUnitary {
            level: self.level,
            table,
        }
    }

    /// Compression by S_2^i: entry m of (S_2*)^i d S_2^i is d(2^i m). Levels
    /// at or above the table level collapse to the constant d(0).
    pub fn compress(&self, i: u32) -> Self {
        if i >= self.level {
            return DiagonalUnitary::constant(self.table[0]);
        }
        let level = self.level - i;
        let table = (0..1usize << level).map(|r| self.table[r << i]).collect();
        DiagonalUnitary { level, table }.canonicalize()
    }

    /// Minimal table for the same operator: drops the top bit while the two
    /// halves agree structurally.
    pub fn canonicalize(mut self) -> Self {
        while self.level > 0 {
            let half = 1usize << (self.level - 1);
            if (0..half).all(|r| self.table[r] == self.table[r + half]) {
                self.table.truncate(half);
                self.level -= 1;
            } else {
                break;
            }
        }
        self
    }

    /// Max entrywise distance in the plane; exactly 0.0 when the tables agree
    /// structurally as operators.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        if self == other {
            return 0.0;
        }
        let level = self.level.max(other.level);
        let (ma, mb) = ((1usize << self.level) - 1, (1usize << other.level) - 1);
        (0..1usize << level)
            .map(|r| {
                (self.table[r & ma].to_complex() - other.table[r & mb].to_complex()).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Operator equality: tables agree after periodic extension to the common
/// level (equivalently, their canonical forms are structurally equal).
impl PartialEq for DiagonalUnitary {
    fn eq(&self, other: &Self) -> bool {
        let level = self.level.max(other.level);
        let (ma, mb) = ((1usize << self.level) - 1, (1usize << other.level) - 1);
        (0..1usize << level).all(|r| self.table[r & ma] == other.table[r & mb])
    }
}

impl fmt::Display for DiagonalUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (r, p) in self.table.iter().enumerate() {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for DiagonalUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "diag(level={}) {}", self.level, self)
    }
}

#[derive(Serialize, Deserialize)]
struct DiagonalWire {
    level: u32,
    phases: Vec<Phase>,
}

impl Serialize for DiagonalUnitary {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DiagonalWire {
            level: self.level,
            phases: self.table.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiagonalUnitary {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = DiagonalWire::deserialize(deserializer)?;
        if wire.level > 62 {
            return Err(D::Error::custom(format!(
                "level {} out of structural range",
                wire.level
            )));
        }
        if wire.phases.len() != 1usize << wire.level.min(62) {
            return Err(D::Error::custom(DiagonalError::TableSizeMismatch {
                len: wire.phases.len(),
                level: wire.level,
            }));
        }
        Ok(DiagonalUnitary {
            level: wire.level,
            table: wire.phases,
        })
    }
}

/// Result of building the canonical diagonal with entries z^{ceil(m/2)}, the
/// coboundary of the gauge-type unitary m -> z^m.
#[derive(Debug, Clone, PartialEq)]
pub enum GaugeCoboundary {
    Localized(DiagonalUnitary),
    NotLocalized(NonLocalizedEvidence),
}

/// Witness that the candidate table z^{ceil(m/2)} is not periodic: two
/// indices in the same residue class mod 2^probe_level carrying different
/// values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonLocalizedEvidence {
    pub probe_level: u32,
    pub residue_class: u64,
    pub index_a: i64,
    pub index_b: i64,
    pub value_a: Phase,
    pub value_b: Phase,
}

/// Default probe depth for non-localization evidence.
pub const DEFAULT_PROBE_LEVEL: u32 = 20;

/// Builds the diagonal with entries d(m) = z^{ceil(m/2)} for an exact phase
/// z. When z has 2-power order 2^n the table closes up at level n+1; any
/// other exact order leaves the candidate aperiodic and evidence is returned
/// instead. Float-tier z is rejected: localization cannot be certified from
/// an approximate angle.
pub fn gauge_coboundary(z: Phase) -> Result<GaugeCoboundary, DiagonalError> {
    gauge_coboundary_probed(z, DEFAULT_PROBE_LEVEL)
}

pub fn gauge_coboundary_probed(
    z: Phase,
    probe_level: u32,
) -> Result<GaugeCoboundary, DiagonalError> {
    match z.classify_two_power_root() {
        TwoPowerRoot::Indeterminate => Err(DiagonalError::NonExactPhase),
        TwoPowerRoot::Root(n) => {
            let level = n + 1;
            check_cap(level)?;
            let table = (0..1i64 << level).map(|r| z.pow((r + 1) / 2)).collect();
            Ok(GaugeCoboundary::Localized(
                DiagonalUnitary { level, table }.canonicalize(),
            ))
        }
        TwoPowerRoot::NotTwoPowerRoot => {
            // z has an odd prime in its order, so z^{2^(L-1)} != 1 for every
            // L: indices 0 and 2^L sit in the same class mod 2^L but carry
            // different candidate values.
            let index_b = 1i64 << probe_level.min(62);
            Ok(GaugeCoboundary::NotLocalized(NonLocalizedEvidence {
                probe_level,
                residue_class: 0,
                index_a: 0,
                index_b,
                value_a: Phase::one(),
                value_b: z.pow(index_b / 2),
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    pub(crate) fn dy(num: u64, exp: u32) -> Phase {
        Phase::dyadic(num, exp).unwrap()
    }

    fn diag(level: u32, turns: &[(u64, u32)]) -> DiagonalUnitary {
        let table = turns.iter().map(|&(n, e)| dy(n, e)).collect();
        DiagonalUnitary::from_table(level, table).unwrap()
    }

    fn one() -> Phase {
        Phase::one()
    }
    fn mone() -> Phase {
        Phase::minus_one()
    }
    fn i() -> Phase {
        Phase::i()
    }
    fn mi() -> Phase {
        Phase::i().conj()
    }

    fn random_table(rng: &mut StdRng, level: u32) -> DiagonalUnitary {
        let table = (0..1usize << level)
            .map(|_| dy(rng.random_range(0..16), 4))
            .collect();
        DiagonalUnitary::from_table(level, table).unwrap()
    }

    #[test]
    fn eval_reads_residues() {
        assert_eq!(DiagonalUnitary::identity().eval_at(7), one());
        let d = DiagonalUnitary::from_table(2, vec![one(), i(), mi(), one()]).unwrap();
        assert_eq!(d.eval_at(-1), one());
        assert_eq!(d.eval_at(-2), mi());
        let d = DiagonalUnitary::from_table(1, vec![one(), i()]).unwrap();
        assert_eq!(d.eval_at(6), one());
    }

    #[test]
    fn products_embed_and_canonicalize() {
        let a = DiagonalUnitary::from_table(1, vec![one(), i()]).unwrap();
        assert_eq!(a.mul_adjoint(&a), DiagonalUnitary::identity());
        assert_eq!(
            a.mul(&a),
            DiagonalUnitary::from_table(1, vec![one(), mone()]).unwrap()
        );
        let b = DiagonalUnitary::from_table(2, vec![one(), one(), i(), one()]).unwrap();
        let c = DiagonalUnitary::from_table(1, vec![one(), mone()]).unwrap();
        assert_eq!(
            c.mul(&b),
            DiagonalUnitary::from_table(2, vec![one(), mone(), i(), mone()]).unwrap()
        );
    }

    #[test]
    fn phi_examples() {
        assert_eq!(DiagonalUnitary::identity().phi(), DiagonalUnitary::identity());
        let d = DiagonalUnitary::from_table(1, vec![one(), i()]).unwrap();
        assert_eq!(
            d.phi(),
            DiagonalUnitary::from_table(2, vec![one(), one(), i(), i()]).unwrap()
        );
        assert_eq!(d.phi().eval_at(-1), d.eval_at(-1));
        // Sibling pairs carry the parent entry.
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let d = random_table(&mut rng, 4);
            let p = d.phi();
            for m in -40..40i64 {
                assert_eq!(p.eval_at(2 * m), d.eval_at(m));
                assert_eq!(p.eval_at(2 * m + 1), d.eval_at(m));
            }
        }
    }

    #[test]
    fn ad_u_shifts_cyclically() {
        let d = DiagonalUnitary::from_table(2, vec![one(), i(), mi(), one()]).unwrap();
        assert_eq!(d.ad_u(0), d);
        assert_eq!(
            d.ad_u(1),
            DiagonalUnitary::from_table(2, vec![one(), one(), i(), mi()]).unwrap()
        );
        assert_eq!(d.ad_u(4), d);
        assert_eq!(d.ad_u(-3), d.ad_u(1));
        // Group action and compatibility with products.
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let a = random_table(&mut rng, 3);
            let b = random_table(&mut rng, 2);
            let (j1, j2) = (rng.random_range(-9..9i64), rng.random_range(-9..9i64));
            assert_eq!(a.ad_u(j1).ad_u(j2), a.ad_u(j1 + j2));
            assert_eq!(a.mul(&b).ad_u(j1), a.ad_u(j1).mul(&b.ad_u(j1)));
            for m in -20..20i64 {
                assert_eq!(a.ad_u(j1).eval_at(m), a.eval_at(m - j1));
            }
        }
    }

    #[test]
    fn compress_examples() {
        let d = DiagonalUnitary::from_table(2, vec![one(), one(), i(), one()]).unwrap();
        assert_eq!(
            d.compress(1),
            DiagonalUnitary::from_table(1, vec![one(), i()]).unwrap()
        );
        assert_eq!(d.compress(2), DiagonalUnitary::identity());
        assert_eq!(d.compress(7), DiagonalUnitary::constant(d.eval_at(0)));
        // Tower property and exactness at the level.
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..50 {
            let d = random_table(&mut rng, 5);
            for (a, b) in [(1u32, 2u32), (2, 3), (3, 4)] {
                assert_eq!(d.compress(a).compress(b), d.compress(a + b));
            }
            let c = d.compress(5);
            assert_eq!(c, DiagonalUnitary::constant(d.eval_at(0)));
            assert_eq!(c.sup_distance(&DiagonalUnitary::constant(d.eval_at(0))), 0.0);
        }
    }

    #[test]
    fn canonical_forms() {
        let z = i();
        let d = DiagonalUnitary::from_table(2, vec![z, z, z, z]).unwrap();
        assert_eq!(d.canonicalize(), DiagonalUnitary::constant(z));
        let d = DiagonalUnitary::from_table(2, vec![one(), i(), one(), i()]).unwrap();
        let c = d.canonicalize();
        assert_eq!(c.level(), 1);
        assert_eq!(c.entries(), &[one(), i()]);
        let d = DiagonalUnitary::from_table(2, vec![one(), i(), mi(), one()]).unwrap();
        assert_eq!(d.clone().canonicalize().level(), 2);
        // Operator equality sees through redundant levels.
        assert_eq!(
            DiagonalUnitary::from_table(1, vec![i(), i()]).unwrap(),
            DiagonalUnitary::constant(i())
        );
    }

    #[test]
    fn sup_distance_values() {
        let a = DiagonalUnitary::constant(one());
        let b = DiagonalUnitary::constant(mone());
        assert_eq!(a.sup_distance(&a), 0.0);
        assert!((a.sup_distance(&b) - 2.0).abs() < 1e-15);
        let d = DiagonalUnitary::from_table(2, vec![one(), one(), i(), one()]).unwrap();
        let dist = d.compress(1).sup_distance(&DiagonalUnitary::identity());
        assert!((dist - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn table_size_must_match_level() {
        assert_eq!(
            DiagonalUnitary::from_table(2, vec![one(); 3]).unwrap_err(),
            DiagonalError::TableSizeMismatch { len: 3, level: 2 }
        );
    }

    #[test]
    fn gauge_coboundary_examples() {
        match gauge_coboundary(one()).unwrap() {
            GaugeCoboundary::Localized(d) => assert_eq!(d, DiagonalUnitary::identity()),
            other => panic!("expected localized, got {other:?}"),
        }
        match gauge_coboundary(mone()).unwrap() {
            GaugeCoboundary::Localized(d) => {
                assert_eq!(d, diag(2, &[(0, 0), (1, 1), (1, 1), (0, 0)]));
            }
            other => panic!("expected localized, got {other:?}"),
        }
        match gauge_coboundary(i()).unwrap() {
            GaugeCoboundary::Localized(d) => {
                assert_eq!(d.level(), 3);
                for m in -20..20i64 {
                    assert_eq!(d.eval_at(m), i().pow((m + 1).div_euclid(2)));
                }
            }
            other => panic!("expected localized, got {other:?}"),
        }
        let third = Phase::from_turn(1, 3).unwrap();
        match gauge_coboundary(third).unwrap() {
            GaugeCoboundary::NotLocalized(ev) => {
                assert_eq!(ev.probe_level, DEFAULT_PROBE_LEVEL);
                assert_eq!(ev.residue_class, 0);
                assert_ne!(ev.value_a, ev.value_b);
                assert_eq!(ev.index_b, 1 << DEFAULT_PROBE_LEVEL);
            }
            other => panic!("expected evidence, got {other:?}"),
        }
        assert_eq!(
            gauge_coboundary(Phase::from_radians(0.3).unwrap()).unwrap_err(),
            DiagonalError::NonExactPhase
        );
    }

    #[test]
    fn abelian_group_laws() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let (la, lb, lc) = (
                rng.random_range(0..5),
                rng.random_range(0..5),
                rng.random_range(0..5),
            );
            let a = random_table(&mut rng, la);
            let b = random_table(&mut rng, lb);
            let c = random_table(&mut rng, lc);
            assert_eq!(a.mul(&b), b.mul(&a));
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul_adjoint(&a), DiagonalUnitary::identity());
            assert_eq!(a.mul(&DiagonalUnitary::identity()), a.clone().canonicalize());
        }
    }

    #[test]
    fn serde_roundtrip_and_validation() {
        let d = DiagonalUnitary::from_table(1, vec![one(), i()]).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(
            json,
            r#"{"level":1,"phases":[{"dyadic":[0,0]},{"dyadic":[1,2]}]}"#
        );
        let back: DiagonalUnitary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<DiagonalUnitary>(
            r#"{"level":2,"phases":[{"dyadic":[0,0]}]}"#
        )
        .is_err());
    }
}
