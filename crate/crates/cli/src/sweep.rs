//! Exhaustive sweeps over phase-grid tables. Two enumeration modes:
//!
//! * direct: every table of the given level with entries in the grid, in
//!   lexicographic order (residue 0 is the most significant digit);
//! * coboundary: every extendible candidate z d' phi(d')* with gauge z in
//!   the grid and d' a grid table one level down, normalized to d'(0) = 1.
//!   This covers exactly the extendible grid tables: the gauge is pinned to
//!   d(0), and the normalized inner is unique with entries that stay inside
//!   the grid group.
//!
//! Work is split into index blocks; blocks may run on parallel workers and
//! are merged in block order, so survivor lists are identical with
//! parallelism on or off.

use qdiag_core::diagonal::DiagonalUnitary;
use qdiag_core::extend::{decide_extendible, Decision};
use qdiag_core::phase::Phase;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_BUDGET: u64 = 1 << 27;
const BLOCK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    /// Extendible and the check image equals the table itself.
    FixedPoint,
    /// Extendible and d(m) = 1 on all even m.
    S2Fixed,
    /// Extendible and d(m) = 1 on all even m and all m = 3 mod 4.
    S2AndS1SqFixed,
}

impl Predicate {
    /// Integers the predicate pins to phase 1, spanning every touched
    /// residue class: 0..2^max(k,2) suffices for both constraint shapes.
    fn pinned(&self, level: u32) -> Vec<i64> {
        let span = 1i64 << level.max(2);
        match self {
            Predicate::FixedPoint => Vec::new(),
            Predicate::S2Fixed => (0..span).step_by(2).collect(),
            Predicate::S2AndS1SqFixed => {
                (0..span).filter(|m| m % 2 == 0 || m % 4 == 3).collect()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub level: u32,
    /// Grid of 2^grid_exp-th roots of unity.
    pub grid_exp: u32,
    pub predicate: Predicate,
    pub coboundary: bool,
    pub budget: u64,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub mode: String,
    pub candidates: u64,
    /// Candidates that survived the digit prefilter and were evaluated.
    pub decided: u64,
    pub survivors: Vec<DiagonalUnitary>,
}

/// Number of grid digits enumerated: the whole table in direct mode, the
/// gauge plus the free inner entries in coboundary mode.
fn digit_count(cfg: &SweepConfig) -> u32 {
    if cfg.coboundary {
        if cfg.level == 0 {
            1
        } else {
            1 << (cfg.level - 1)
        }
    } else {
        1 << cfg.level
    }
}

/// Digit j of `idx` in base 2^grid_exp, most significant digit first.
fn digit(cfg: &SweepConfig, idx: u64, j: u32) -> u64 {
    let digits = digit_count(cfg);
    (idx >> (cfg.grid_exp * (digits - 1 - j))) & ((1 << cfg.grid_exp) - 1)
}

fn grid_phase(cfg: &SweepConfig, t: u64) -> Phase {
    Phase::dyadic(t, cfg.grid_exp).expect("grid digits are reduced dyadics")
}

struct Enumeration<'a> {
    cfg: &'a SweepConfig,
    /// Integers whose phase must be 1 for the predicate to hold.
    pinned: Vec<i64>,
    /// Direct mode only: table digit positions forced to 0 by `pinned`.
    pinned_digits: Vec<u32>,
}

impl Enumeration<'_> {
    fn candidate(&self, idx: u64, decided: &mut u64) -> Option<DiagonalUnitary> {
        let cfg = self.cfg;
        let d = if cfg.coboundary {
            let gauge = grid_phase(cfg, digit(cfg, idx, 0));
            let inner_level = cfg.level.saturating_sub(1);
            let table = (0..1u64 << inner_level)
                .map(|r| {
                    if r == 0 {
                        Phase::one()
                    } else {
                        grid_phase(cfg, digit(cfg, idx, r as u32))
                    }
                })
                .collect();
            let inner = DiagonalUnitary::from_table(inner_level, table).expect("level under cap");
            inner.mul_adjoint(&inner.phi()).scale(gauge)
        } else {
            // Pinned digits must be 0 (grid phase 1) before any table is
            // built; this is what keeps large direct sweeps cheap.
            if !self.pinned_digits.iter().all(|&j| digit(cfg, idx, j) == 0) {
                return None;
            }
            let table = (0..1u64 << cfg.level)
                .map(|r| grid_phase(cfg, digit(cfg, idx, r as u32)))
                .collect();
            DiagonalUnitary::from_table(cfg.level, table).expect("level under cap")
        };
        *decided += 1;
        if !self.pinned.iter().all(|&m| d.eval_at(m).is_one()) {
            return None;
        }
        let survives = match decide_extendible(&d) {
            Decision::Extendible(cert) => match cfg.predicate {
                Predicate::FixedPoint => cert.check == d,
                _ => true,
            },
            Decision::NotExtendible(_) => false,
        };
        survives.then(|| d.canonicalize())
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome, CliError> {
    let cap = qdiag_core::level_cap();
    if cfg.level > cap {
        return Err(qdiag_core::diagonal::DiagonalError::LevelCapExceeded {
            requested: cfg.level,
            cap,
        }
        .into());
    }
    let digits = digit_count(cfg);
    let grid: u128 = 1 << cfg.grid_exp;
    let total = grid
        .checked_pow(digits)
        .filter(|&t| t <= cfg.budget as u128);
    let Some(total) = total else {
        return Err(CliError::BudgetExceeded {
            candidates: grid.saturating_pow(digits),
            budget: cfg.budget,
        });
    };
    let total = total as u64;
    let pinned = cfg.predicate.pinned(cfg.level);
    let pinned_digits = if cfg.coboundary {
        Vec::new()
    } else {
        let span = 1u64 << cfg.level;
        let mut positions: Vec<u32> = pinned.iter().map(|&m| (m as u64 % span) as u32).collect();
        positions.sort_unstable();
        positions.dedup();
        positions
    };
    let enumeration = Enumeration {
        cfg,
        pinned,
        pinned_digits,
    };
    let blocks = total.div_ceil(BLOCK);
    let run_block = |b: u64| -> (u64, Vec<DiagonalUnitary>) {
        let mut decided = 0;
        let mut survivors = Vec::new();
        for idx in b * BLOCK..total.min((b + 1) * BLOCK) {
            if let Some(d) = enumeration.candidate(idx, &mut decided) {
                survivors.push(d);
            }
        }
        (decided, survivors)
    };
    let per_block: Vec<(u64, Vec<DiagonalUnitary>)> = if cfg.parallel {
        (0..blocks).into_par_iter().map(run_block).collect()
    } else {
        (0..blocks).map(run_block).collect()
    };
    let mut outcome = SweepOutcome {
        mode: if cfg.coboundary { "coboundary" } else { "direct" }.into(),
        candidates: total,
        decided: 0,
        survivors: Vec::new(),
    };
    for (decided, survivors) in per_block {
        outcome.decided += decided;
        outcome.survivors.extend(survivors);
    }
    Ok(outcome)
}
