//! Words over the alphabet {1, 2}, their residue classes, the odometer and
//! the one-sided shift.
//!
//! A word of length k names both a multi-index of isometries S_w = S_{w_1}
//! ... S_{w_k} and the cylinder of infinite sequences starting with w. Under
//! the defining action on l^2(Z) (S_1 e_m = e_{2m+1}, S_2 e_m = e_{2m}) the
//! cylinder of w corresponds to the arithmetic class r mod 2^k where bit j-1
//! of r is set exactly when w_j = 1; the first letter is the least
//! significant bit. Two readings of the odometer are implemented: the letter
//! form (the first 1 becomes 2, every earlier letter becomes 1, the all-2
//! word rolls over to all-1) and the residue form r -> (r - 1) mod 2^k. The
//! residue form is normative; the letter form is kept as a cross-check.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Hard structural bound on word lengths, matching u64 residue storage.
pub const MAX_WORD_LEN: u32 = 62;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CantorError {
    #[error("cannot shift the empty word")]
    EmptyWord,
    #[error("word letter {0} is not 1 or 2")]
    BadLetter(char),
    #[error("word length {0} exceeds {MAX_WORD_LEN}")]
    WordTooLong(u32),
    #[error("residue value {value} out of range for level {level}")]
    ResidueOutOfRange { value: u64, level: u32 },
}

/// Packed word: bit j-1 is set iff letter j is 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    bits: u64,
    len: u32,
}

/// Arithmetic class `value` mod 2^`level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    #[serde(rename = "r")]
    pub value: u64,
    #[serde(rename = "k")]
    pub level: u32,
}

impl Residue {
    pub fn new(value: u64, level: u32) -> Result<Self, CantorError> {
        if level > MAX_WORD_LEN || (level < 64 && value >> level != 0) {
            return Err(CantorError::ResidueOutOfRange { value, level });
        }
        Ok(Residue { value, level })
    }
}

impl Word {
    pub fn empty() -> Self {
        Word { bits: 0, len: 0 }
    }

    pub fn from_letters(letters: &[u8]) -> Result<Self, CantorError> {
        if letters.len() > MAX_WORD_LEN as usize {
            return Err(CantorError::WordTooLong(letters.len() as u32));
        }
        let mut bits = 0u64;
        for (j, &l) in letters.iter().enumerate() {
            match l {
                1 => bits |= 1 << j,
                2 => {}
                other => {
                    return Err(CantorError::BadLetter(
                        char::from_digit(other as u32, 10).unwrap_or('?'),
                    ))
                }
            }
        }
        Ok(Word {
            bits,
            len: letters.len() as u32,
        })
    }

    /// All-2 word: the cylinder of the zero residue class.
    pub fn all_twos(len: u32) -> Result<Self, CantorError> {
        if len > MAX_WORD_LEN {
            return Err(CantorError::WordTooLong(len));
        }
        Ok(Word { bits: 0, len })
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Letter at 1-based position j.
    pub fn letter(&self, j: u32) -> u8 {
        debug_assert!(j >= 1 && j <= self.len);
        if self.bits >> (j - 1) & 1 == 1 {
            1
        } else {
            2
        }
    }

    pub fn letters(&self) -> Vec<u8> {
        (1..=self.len).map(|j| self.letter(j)).collect()
    }

    /// True when `self` begins with `prefix`.
    pub fn starts_with(&self, prefix: &Word) -> bool {
        prefix.len <= self.len && self.bits & low_mask(prefix.len) == prefix.bits
    }
}

fn low_mask(len: u32) -> u64 {
    if len == 0 {
        0
    } else {
        u64::MAX >> (64 - len)
    }
}

/// Residue class of the cylinder named by `w`; the first letter is the least
/// significant bit.
pub fn word_to_residue(w: &Word) -> Residue {
    Residue {
        value: w.bits,
        level: w.len,
    }
}

pub fn residue_to_word(r: &Residue) -> Word {
    Word {
        bits: r.value,
        len: r.level,
    }
}

/// One odometer step, residue form: r -> (r - 1) mod 2^k.
pub fn odometer_step(w: &Word) -> Word {
    if w.len == 0 {
        return *w;
    }
    Word {
        bits: w.bits.wrapping_sub(1) & low_mask(w.len),
        len: w.len,
    }
}

/// One odometer step, letter form: the first 1 turns into 2, all earlier
/// letters turn into 1, and the all-2 word rolls over to the all-1 word.
/// Cross-check implementation; `odometer_step` is normative.
pub fn odometer_step_letters(w: &Word) -> Word {
    let mut letters = w.letters();
    match letters.iter().position(|&l| l == 1) {
        Some(j) => {
            letters[j] = 2;
            letters[..j].fill(1);
        }
        None => letters.fill(1),
    }
    Word::from_letters(&letters).expect("length unchanged")
}

/// Drops the first letter; on residues this is r -> floor(r / 2).
pub fn shift_word(w: &Word) -> Result<Word, CantorError> {
    if w.len == 0 {
        return Err(CantorError::EmptyWord);
    }
    Ok(Word {
        bits: w.bits >> 1,
        len: w.len - 1,
    })
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 1..=self.len {
            write!(f, "{}", self.letter(j))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

impl FromStr for Word {
    type Err = CantorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > MAX_WORD_LEN as usize {
            return Err(CantorError::WordTooLong(s.len() as u32));
        }
        let mut bits = 0u64;
        for (j, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << j,
                '2' => {}
                other => return Err(CantorError::BadLetter(other)),
            }
        }
        Ok(Word {
            bits,
            len: s.chars().count() as u32,
        })
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
