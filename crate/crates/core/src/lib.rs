//! Exact arithmetic for localized diagonal unitaries of the Cuntz algebra O_2
//! viewed inside the 2-adic ring algebra Q_2.
//!
//! A localized diagonal unitary is a finite table of unit phases indexed by
//! residues mod 2^k; it acts on the canonical basis of l^2(Z) by
//! `e_m -> d(m mod 2^k) e_m`. The crate decides whether the automorphism
//! `S_i -> d S_i` of O_2 extends to Q_2, produces a gauge/inner certificate
//! when it does, computes the induced unitary on the extra generator U by two
//! independent routes, inverts that correspondence, and cross-checks
//! everything against a windowed model of the defining representation.
//!
//! Module layout:
//! - [`phase`]: unit phases in three tiers (dyadic turns, rational turns,
//!   float angles) with exact arithmetic on the exact tiers.
//! - [`cantor`]: words over the alphabet {1,2}, residues, the odometer and
//!   the shift.
//! - [`diagonal`]: residue-indexed phase tables and their operator algebra.
//! - [`extend`]: the extendibility decision, certificates, obstructions and
//!   check-map inversion.
//! - [`canrep`]: an independent oracle that applies generator words to basis
//!   vectors of l^2(Z) through index maps on a finite window.

#![forbid(unsafe_code)]

pub mod cantor;
pub mod canrep;
pub mod diagonal;
pub mod extend;
pub mod phase;

use std::sync::atomic::{AtomicU32, Ordering};

/// Default bound on table levels; tables hold 2^level entries.
pub const DEFAULT_LEVEL_CAP: u32 = 30;

static LEVEL_CAP: AtomicU32 = AtomicU32::new(DEFAULT_LEVEL_CAP);

/// Current process-wide level cap for diagonal tables.
pub fn level_cap() -> u32 {
    LEVEL_CAP.load(Ordering::Relaxed)
}

/// Replaces the process-wide level cap (still bounded by 62 so residue
/// arithmetic stays inside u64). Returns the previous value.
pub fn set_level_cap(cap: u32) -> u32 {
    assert!(cap <= 62, "level cap {cap} out of range (max 62)");
    LEVEL_CAP.swap(cap, Ordering::Relaxed)
}
