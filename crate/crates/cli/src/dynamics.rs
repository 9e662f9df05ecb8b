//! Odometer orbit statistics on the level-k residue model.

use qdiag_core::cantor::{odometer_step, Word};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsStats {
    pub level: u32,
    pub cylinder: String,
    pub steps_run: u64,
    /// First return time to the all-2 start word, when reached.
    pub period: Option<u64>,
    pub hits: u64,
    /// Birkhoff average of the cylinder indicator over the steps run, as a
    /// reduced fraction.
    pub average_num: u64,
    pub average_den: u64,
    pub average_float: f64,
}

/// Iterates the odometer from the all-2 word, counting visits to the
/// cylinder. `steps` caps the iteration; the default is one full period 2^k.
pub fn dynamics_stats(
    level: u32,
    cylinder: &Word,
    steps: Option<u64>,
) -> Result<DynamicsStats, CliError> {
    let cap = qdiag_core::level_cap();
    if level > cap {
        return Err(qdiag_core::diagonal::DiagonalError::LevelCapExceeded {
            requested: level,
            cap,
        }
        .into());
    }
    if cylinder.len() > level {
        return Err(CliError::BadLevel(format!(
            "cylinder {cylinder} is longer than level {level}"
        )));
    }
    let budget = steps.unwrap_or(1u64 << level).max(1);
    let start = Word::all_twos(level).expect("level <= cap <= 62");
    let mut word = start;
    let mut hits = 0u64;
    let mut steps_run = 0u64;
    let mut period = None;
    while steps_run < budget {
        if word.starts_with(cylinder) {
            hits += 1;
        }
        word = odometer_step(&word);
        steps_run += 1;
        if word == start {
            period = Some(steps_run);
            break;
        }
    }
    let g = gcd(hits.max(1), steps_run);
    let (average_num, average_den) = if hits == 0 {
        (0, 1)
    } else {
        (hits / g, steps_run / g)
    };
    Ok(DynamicsStats {
        level,
        cylinder: cylinder.to_string(),
        steps_run,
        period,
        hits,
        average_num,
        average_den,
        average_float: hits as f64 / steps_run as f64,
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}
