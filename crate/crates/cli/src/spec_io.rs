//! Input formats: unitary specs as JSON (flat table or cylinder-keyed),
//! phase tokens, and generator words in text form.

use std::collections::BTreeMap;

use qdiag_core::canrep::{GenSym, GenWord};
use qdiag_core::cantor::{residue_to_word, Residue, Word};
use qdiag_core::diagonal::DiagonalUnitary;
use qdiag_core::extend::ExtensionCertificate;
use qdiag_core::phase::Phase;
use serde_json::Value;

use crate::CliError;

/// Reads the argument as inline JSON when it starts with '{', otherwise as a
/// file path.
pub fn load_json(arg: &str) -> Result<Value, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)?
    };
    Ok(serde_json::from_str(&text)?)
}

/// One phase in text form: `1`, `-1`, `i`, `-i`, a turn fraction `p/q`, or
/// `angle:<radians>`.
pub fn parse_phase_token(token: &str) -> Result<Phase, CliError> {
    let bad = |msg: &str| CliError::NonUnitPhase(format!("{token}: {msg}"));
    match token {
        "1" => return Ok(Phase::one()),
        "-1" => return Ok(Phase::minus_one()),
        "i" => return Ok(Phase::i()),
        "-i" => return Ok(Phase::i().conj()),
        _ => {}
    }
    if let Some(rest) = token.strip_prefix("angle:") {
        let radians: f64 = rest.parse().map_err(|_| bad("not a number"))?;
        return Phase::from_radians(radians).map_err(|e| bad(&e.to_string()));
    }
    let fraction = token.strip_prefix("turn:").unwrap_or(token);
    let (p, q) = fraction.split_once('/').ok_or_else(|| bad("unknown form"))?;
    let p: i64 = p.parse().map_err(|_| bad("bad numerator"))?;
    let q: i64 = q.parse().map_err(|_| bad("bad denominator"))?;
    Phase::from_turn(p, q).map_err(|e| bad(&e.to_string()))
}

/// Accepts a wire phase object, the integers 1 and -1, or a phase token
/// string.
fn phase_from_value(v: &Value) -> Result<Phase, CliError> {
    match v {
        Value::Number(n) if n.as_i64() == Some(1) => Ok(Phase::one()),
        Value::Number(n) if n.as_i64() == Some(-1) => Ok(Phase::minus_one()),
        Value::String(s) => parse_phase_token(s),
        Value::Object(_) => serde_json::from_value(v.clone())
            .map_err(|e| CliError::NonUnitPhase(e.to_string())),
        other => Err(CliError::NonUnitPhase(other.to_string())),
    }
}

/// Validated, canonicalized table from either spec form:
/// `{"level": k, "phases": [...]}` or `{"cylinders": {"1121": phase, ...}}`.
pub fn parse_unitary_spec(doc: &Value) -> Result<DiagonalUnitary, CliError> {
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::BadLevel("spec must be a JSON object".into()))?;
    if let Some(cyl) = obj.get("cylinders") {
        return parse_cylinders(cyl);
    }
    let level = obj
        .get("level")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::BadLevel("missing numeric \"level\"".into()))?;
    let phases = obj
        .get("phases")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::BadLevel("missing \"phases\" array".into()))?;
    if level > 62 || phases.len() as u64 != 1u64 << level {
        return Err(CliError::BadLevel(format!(
            "level {level} needs {} phases, got {}",
            1u128 << level.min(63),
            phases.len()
        )));
    }
    let table = phases
        .iter()
        .map(phase_from_value)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DiagonalUnitary::from_table(level as u32, table)?.canonicalize())
}

/// Cylinder-keyed form: keys are words over {1,2}; they must be prefix-free
/// and tile the whole Cantor set. The table level is the longest key.
fn parse_cylinders(cyl: &Value) -> Result<DiagonalUnitary, CliError> {
    let map = cyl
        .as_object()
        .ok_or_else(|| CliError::BadLevel("\"cylinders\" must be an object".into()))?;
    let mut words: BTreeMap<String, (Word, Phase)> = BTreeMap::new();
    for (key, value) in map {
        let word: Word = key
            .parse()
            .map_err(|e| CliError::BadWord(format!("{key}: {e}")))?;
        let phase = phase_from_value(value)?;
        if words.insert(key.clone(), (word, phase)).is_some() {
            return Err(CliError::DuplicateCylinder(key.clone()));
        }
    }
    let entries: Vec<&(Word, Phase)> = words.values().collect();
    for (i, (a, _)) in entries.iter().enumerate() {
        for (b, _) in entries.iter().skip(i + 1).map(|e| &**e) {
            if a.starts_with(b) || b.starts_with(a) {
                return Err(CliError::DuplicateCylinder(format!("{a} overlaps {b}")));
            }
        }
    }
    let level = entries.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
    // Prefix-free keys tile iff their masses 2^-len sum to 1; count in units
    // of 2^-level.
    let covered: u64 = entries.iter().map(|(w, _)| 1u64 << (level - w.len())).sum();
    if covered != 1u64 << level {
        return Err(CliError::IncompleteCover {
            covered_num: covered,
            covered_den: 1u64 << level,
        });
    }
    let table = (0..1u64 << level)
        .map(|r| {
            let word = residue_to_word(&Residue { value: r, level });
            entries
                .iter()
                .find(|(w, _)| word.starts_with(w))
                .map(|(_, p)| *p)
                .expect("tiling guarantees a unique matching cylinder")
        })
        .collect();
    Ok(DiagonalUnitary::from_table(level, table)?.canonicalize())
}

pub fn parse_certificate(doc: &Value) -> Result<ExtensionCertificate, CliError> {
    Ok(serde_json::from_value(doc.clone())?)
}

/// Generator words as whitespace-separated tokens, applied right to left:
/// `U U* S1 S1* S2 S2* D:<file[#name]> z:<phase>`.
pub fn parse_gen_word(text: &str) -> Result<GenWord, CliError> {
    let mut syms = Vec::new();
    for token in text.split_whitespace() {
        let sym = match token {
            "U" => GenSym::U,
            "U*" => GenSym::UStar,
            "S1" => GenSym::S1,
            "S1*" => GenSym::S1Star,
            "S2" => GenSym::S2,
            "S2*" => GenSym::S2Star,
            _ => {
                if let Some(spec) = token.strip_prefix("D:") {
                    let (path, name) = match spec.split_once('#') {
                        Some((p, n)) => (p, Some(n)),
                        None => (spec, None),
                    };
                    let doc = load_json(path)?;
                    let doc = match name {
                        Some(n) => doc
                            .get(n)
                            .ok_or_else(|| {
                                CliError::BadToken(format!("{token}: no member \"{n}\""))
                            })?
                            .clone(),
                        None => doc,
                    };
                    GenSym::Diag(parse_unitary_spec(&doc)?)
                } else if let Some(phase) = token.strip_prefix("z:") {
                    GenSym::Scalar(parse_phase_token(phase)?)
                } else {
                    return Err(CliError::BadToken(token.into()));
                }
            }
        };
        syms.push(sym);
    }
    Ok(GenWord::new(syms))
}
