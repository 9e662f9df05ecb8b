//! Windowed oracle for the defining representation on l^2(Z).
//!
//! Generators act on basis vectors by pure index maps: U e_m = e_{m+1},
//! S_2 e_m = e_{2m}, S_1 e_m = e_{2m+1} (S_1 is expanded as U S_2
//! internally), their adjoints halve or annihilate, and diagonal symbols
//! multiply by a single phase read off the table. Everything is confined to
//! the index window [-N, N); any step that leaves it taints the result as
//! out-of-window instead of silently truncating. Identities are verified on
//! the safe sub-window of basis vectors whose evaluations stay fully inside
//! the window on both sides, so a pass is an exact statement about finitely
//! many matrix entries, never a truncation artifact.
//!
//! This module is an oracle for the table algebra and deliberately avoids
//! it: no entrywise products, shifts or compressions are used here, only
//! index maps and single-entry reads.

use serde::Serialize;

use crate::diagonal::{DiagonalError, DiagonalUnitary};
use crate::extend::ExtensionCertificate;
use crate::phase::Phase;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanrepError {
    #[error("no basis vector evaluates fully inside the window")]
    EmptySafeWindow,
    #[error(transparent)]
    Diagonal(#[from] DiagonalError),
}

/// One generator symbol. Words are read as operator products, so the last
/// symbol of a word acts first.
#[derive(Debug, Clone, PartialEq)]
pub enum GenSym {
    U,
    UStar,
    S1,
    S1Star,
    S2,
    S2Star,
    Diag(DiagonalUnitary),
    Scalar(Phase),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenWord {
    syms: Vec<GenSym>,
}

impl GenWord {
    pub fn new(syms: Vec<GenSym>) -> Self {
        GenWord { syms }
    }

    pub fn syms(&self) -> &[GenSym] {
        &self.syms
    }
}

impl std::fmt::Display for GenWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, sym) in self.syms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match sym {
                GenSym::U => write!(f, "U")?,
                GenSym::UStar => write!(f, "U*")?,
                GenSym::S1 => write!(f, "S1")?,
                GenSym::S1Star => write!(f, "S1*")?,
                GenSym::S2 => write!(f, "S2")?,
                GenSym::S2Star => write!(f, "S2*")?,
                GenSym::Diag(d) => write!(f, "D{d}")?,
                GenSym::Scalar(z) => write!(f, "z:{z}")?,
            }
        }
        Ok(())
    }
}

/// Result of applying a word to one basis vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Applied {
    Vector { index: i64, amplitude: Phase },
    /// An adjoint isometry hit an index of the wrong parity: exact zero.
    Annihilated,
    /// Some intermediate index left [-N, N); the result is unknown.
    OutOfWindow,
}

/// Applies `word` to e_m inside the window [-half_width, half_width).
pub fn apply_word(word: &GenWord, m: i64, half_width: i64) -> Applied {
    let fits = |x: i64| -half_width <= x && x < half_width;
    if !fits(m) {
        return Applied::OutOfWindow;
    }
    let mut index = m;
    let mut amplitude = Phase::one();
    for sym in word.syms.iter().rev() {
        match sym {
            GenSym::U => index += 1,
            GenSym::UStar => index -= 1,
            GenSym::S2 => index *= 2,
            GenSym::S2Star => {
                if index.rem_euclid(2) != 0 {
                    return Applied::Annihilated;
                }
                index /= 2;
            }
            GenSym::S1 => {
                // U S2 expanded: the doubled index must itself fit.
                index *= 2;
                if !fits(index) {
                    return Applied::OutOfWindow;
                }
                index += 1;
            }
            GenSym::S1Star => {
                // S2* U* expanded: step to m-1 first, then halve.
                index -= 1;
                if !fits(index) {
                    return Applied::OutOfWindow;
                }
                if index.rem_euclid(2) != 0 {
                    return Applied::Annihilated;
                }
                index /= 2;
            }
            GenSym::Diag(d) => {
                amplitude = amplitude.mul(d.eval_at(index));
                continue;
            }
            GenSym::Scalar(z) => {
                amplitude = amplitude.mul(*z);
                continue;
            }
        }
        if !fits(index) {
            return Applied::OutOfWindow;
        }
    }
    Applied::Vector { index, amplitude }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityMismatch {
    pub m: i64,
    pub lhs: Applied,
    pub rhs: Applied,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub half_width: i64,
    /// Basis vectors on which both sides evaluated fully in-window.
    pub safe_min: i64,
    pub safe_max: i64,
    pub safe_count: u64,
    pub mismatches: Vec<IdentityMismatch>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares two words on every basis vector of the window whose evaluations
/// stay in-window on both sides. Exact phases compare structurally, anything
/// float within 1e-12.
pub fn verify_identity(
    lhs: &GenWord,
    rhs: &GenWord,
    half_width: i64,
) -> Result<IdentityReport, CanrepError> {
    let mut report = IdentityReport {
        half_width,
        safe_min: 0,
        safe_max: 0,
        safe_count: 0,
        mismatches: Vec::new(),
    };
    for m in -half_width..half_width {
        let left = apply_word(lhs, m, half_width);
        let right = apply_word(rhs, m, half_width);
        if left == Applied::OutOfWindow || right == Applied::OutOfWindow {
            continue;
        }
        if report.safe_count == 0 {
            report.safe_min = m;
        }
        report.safe_max = m;
        report.safe_count += 1;
        let agree = match (&left, &right) {
            (Applied::Annihilated, Applied::Annihilated) => true,
            (
                Applied::Vector {
                    index: i1,
                    amplitude: a1,
                },
                Applied::Vector {
                    index: i2,
                    amplitude: a2,
                },
            ) => i1 == i2 && a1.agrees(a2),
            _ => false,
        };
        if !agree {
            report.mismatches.push(IdentityMismatch {
                m,
                lhs: left,
                rhs: right,
            });
        }
    }
    if report.safe_count == 0 {
        return Err(CanrepError::EmptySafeWindow);
    }
    Ok(report)
}

/// Entry of d_k = d phi(d) ... phi^{k-1}(d) at index m, evaluated directly
/// from single-entry reads: phi^i(d)(m) = d(floor(m / 2^i)).
fn running_product_entry(d: &DiagonalUnitary, k: usize, m: i64) -> Phase {
    (0..k as u32).fold(Phase::one(), |acc, i| {
        acc.mul(d.eval_at(m.div_euclid(1i64 << i)))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialProducts {
    /// d_1 .. d_n as canonical tables.
    pub tables: Vec<DiagonalUnitary>,
    /// For each window index m, the first k (1-based) from which the entry
    /// d_k(m) stays constant through d_n.
    pub stabilized_at: Vec<(i64, usize)>,
}

/// Exact tables of the running products d_k = d phi(d) ... phi^{k-1}(d),
/// k = 1..n, with entrywise stabilization indices over the window.
pub fn partial_products(
    d: &DiagonalUnitary,
    n: usize,
    half_width: i64,
) -> Result<PartialProducts, CanrepError> {
    let d = d.clone().canonicalize();
    if n == 0 {
        return Ok(PartialProducts {
            tables: Vec::new(),
            stabilized_at: Vec::new(),
        });
    }
    let top = d.level() + n as u32 - 1;
    let cap = crate::level_cap();
    if top > cap {
        return Err(DiagonalError::LevelCapExceeded {
            requested: top,
            cap,
        }
        .into());
    }
    let tables: Vec<DiagonalUnitary> = (1..=n)
        .map(|k| {
            let level = d.level() + k as u32 - 1;
            let table = (0..1i64 << level)
                .map(|r| running_product_entry(&d, k, r))
                .collect();
            DiagonalUnitary::from_table(level, table)
                .expect("level checked against cap")
                .canonicalize()
        })
        .collect();
    let mut stabilized_at = Vec::new();
    for m in -half_width..half_width {
        let values: Vec<Phase> = (1..=n).map(|k| running_product_entry(&d, k, m)).collect();
        let mut first = n;
        while first > 1 && values[first - 2] == values[first - 1] {
            first -= 1;
        }
        stabilized_at.push((m, first));
    }
    Ok(PartialProducts {
        tables,
        stabilized_at,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct XSequence {
    /// Leftmost window index of each row.
    pub offset: i64,
    /// Row k-1 holds the diagonal entries of x_k on the window; `None` marks
    /// entries killed by the range projection at step k.
    pub rows: Vec<Vec<Option<Phase>>>,
    /// First k (1-based) from which every live window entry equals the check
    /// image's entry, through row n.
    pub stabilized_at: Option<usize>,
    pub alpha: Phase,
}

/// Diagonal window entries of the approximants
/// x_k = (alpha - 1)|e_0><e_0| + Q_k d_k U d_k* U*, alpha = check(0),
/// built from the gauge-normalized source so d_k(0) = d_k(-1) = 1. Q_k is
/// the projection onto e_0 and the indices not divisible by 2^k; on its
/// range the entry at m is d_k(m) conj(d_k(m-1)).
pub fn x_sequence(
    cert: &ExtensionCertificate,
    n: usize,
    half_width: i64,
) -> Result<XSequence, CanrepError> {
    let e = cert.normalized_source();
    let alpha = cert.check.eval_at(0);
    if n > 0 {
        let top = e.level() + n as u32 - 1;
        let cap = crate::level_cap();
        if top > cap {
            return Err(DiagonalError::LevelCapExceeded {
                requested: top,
                cap,
            }
            .into());
        }
    }
    let mut rows = Vec::with_capacity(n);
    let mut stabilized_at = None;
    for k in 1..=n {
        let mut row = Vec::with_capacity((2 * half_width) as usize);
        let mut live_match = true;
        for m in -half_width..half_width {
            let entry = if m == 0 {
                Some(alpha)
            } else if m.trailing_zeros() >= k as u32 {
                None
            } else {
                let num = running_product_entry(&e, k, m);
                let den = running_product_entry(&e, k, m - 1);
                Some(num.mul(den.conj()))
            };
            if let Some(v) = entry {
                if !v.agrees(&cert.check.eval_at(m)) {
                    live_match = false;
                }
            }
            row.push(entry);
        }
        rows.push(row);
        if live_match {
            stabilized_at.get_or_insert(k);
        } else {
            stabilized_at = None;
        }
    }
    Ok(XSequence {
        offset: -half_width,
        rows,
        stabilized_at,
        alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Isometry {
    S1,
    S2,
}

/// Point spectrum of d S_i: the single eigenvalue d(-1) for S_1 (eigenvector
/// e_{-1}) or d(0) for S_2 (eigenvector e_0). The eigenvector equation is
/// re-checked through the window oracle; a window too small to contain it is
/// reported as empty.
pub fn point_spectrum(
    d: &DiagonalUnitary,
    which: Isometry,
    half_width: i64,
) -> Result<Phase, CanrepError> {
    let (fix, word) = match which {
        Isometry::S2 => (0, GenWord::new(vec![GenSym::Diag(d.clone()), GenSym::S2])),
        Isometry::S1 => (-1, GenWord::new(vec![GenSym::Diag(d.clone()), GenSym::S1])),
    };
    let eigenvalue = d.eval_at(fix);
    match apply_word(&word, fix, half_width) {
        Applied::Vector { index, amplitude } => {
            assert_eq!(index, fix, "internal error: e_{fix} must be fixed");
            assert!(
                amplitude.agrees(&eigenvalue),
                "internal error: eigenvalue mismatch at e_{fix}"
            );
            Ok(eigenvalue)
        }
        Applied::OutOfWindow => Err(CanrepError::EmptySafeWindow),
        Applied::Annihilated => unreachable!("isometries never annihilate"),
    }
}
