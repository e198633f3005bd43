//! The two built-in rewriting systems and the maps connecting them.
//!
//! `builtin_r01` is a width-2 clearing system over 0/1 whose non-empty
//! members all have length 2 * 9^k. `builtin_ruv` is a width-1 growing
//! system over u/V that tracks it step for step under the collapse map
//! `phi`. The chain builders assemble the long derivations behind that
//! length spectrum; every builder returns a trace the caller can replay
//! with `validate_trace` instead of taking it on faith.

use thiserror::Error;

use crate::crs::{ClearingRA, ContextRewritingSystem, DerivationTrace, Direction, TraceStep};
use crate::word::{Alphabet, Word};

pub const R01_SOURCE: &str = "\
crs k=2
sigma: 0 1
gamma: 0 1
instr 0a: ^ / 0 0 -> _ / $
instr 1a: ^ / 1 0 -> _ / 0 0
instr 1b: ^ / 0 0 -> _ / 1 0
instr 2a: 0 1 / 1 0 -> _ / 0 0
instr 2b: 0 0 / 1 1 -> _ / 0 1
instr 2c: 1 1 / 0 0 -> _ / 1 0
instr 2d: 1 0 / 0 1 -> _ / 1 1
instr 3a: 0 1 / 1 0 -> _ / 0 $
instr 3b: 0 0 / 1 1 -> _ / 0 $
";

pub const RUV_SOURCE: &str = "\
crs k=1
sigma: u V
gamma: u V
instr 0: ^ / _ -> u u / $
instr 1: ^ / u -> u u V / _
instr 2: _ / V u -> u u u V / _
instr 3: _ / V u -> u u u u / $
";

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SystemsError {
    #[error("word uses symbol {0} outside the 0/1 alphabet")]
    NotBinary(String),
    #[error("word uses symbol {0} outside the u/V alphabet")]
    NotUv(String),
    #[error("potential exceeds the 128-bit range")]
    PotentialOverflow,
    #[error("level {0} is past the supported maximum {max}", max = MAX_LEVELS)]
    LevelTooLarge(usize),
    #[error("{0}")]
    BadChainParameters(&'static str),
}

pub fn binary_alphabet() -> Alphabet {
    Alphabet::from_names(&["0", "1"]).expect("fixed alphabet")
}

pub fn uv_alphabet() -> Alphabet {
    Alphabet::from_names(&["u", "V"]).expect("fixed alphabet")
}

pub fn builtin_r01() -> ClearingRA {
    let system = ContextRewritingSystem::parse(R01_SOURCE).expect("built-in source parses");
    ClearingRA::new(system).expect("built-in system clears")
}

pub fn builtin_ruv() -> ContextRewritingSystem {
    ContextRewritingSystem::parse(RUV_SOURCE).expect("built-in source parses")
}

/// A word checked to lie over the 0/1 alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryWord(Word);

impl BinaryWord {
    pub fn new(w: &Word) -> Result<Self, SystemsError> {
        match binary_alphabet().foreign_symbol(w) {
            Some(s) => Err(SystemsError::NotBinary(s.name().to_owned())),
            None => Ok(BinaryWord(w.clone())),
        }
    }

    pub fn word(&self) -> &Word {
        &self.0
    }
}

/// A word checked to lie over the u/V alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UvWord(Word);

impl UvWord {
    pub fn new(w: &Word) -> Result<Self, SystemsError> {
        match uv_alphabet().foreign_symbol(w) {
            Some(s) => Err(SystemsError::NotUv(s.name().to_owned())),
            None => Ok(UvWord(w.clone())),
        }
    }

    pub fn word(&self) -> &Word {
        &self.0
    }
}

/// Letter collapse: a position maps to V when its two neighbours carry
/// the same bit, to u otherwise. End positions have one neighbour only
/// and always map to u.
pub fn phi(w: &BinaryWord) -> UvWord {
    let alphabet = uv_alphabet();
    let u = alphabet.get("u").expect("fixed alphabet").clone();
    let v = alphabet.get("V").expect("fixed alphabet").clone();
    let symbols = w.word().symbols();
    let image = (0..symbols.len())
        .map(|i| {
            let interior = i > 0 && i + 1 < symbols.len();
            if interior && symbols[i - 1] == symbols[i + 1] {
                v.clone()
            } else {
                u.clone()
            }
        })
        .collect();
    UvWord(Word::new(image))
}

// Membership in the filtered set is the absence of these four factors.
const FORBIDDEN_FACTORS: [[&str; 3]; 4] = [
    ["0", "0", "0"],
    ["0", "1", "0"],
    ["1", "0", "1"],
    ["1", "1", "1"],
];

pub fn in_k(w: &BinaryWord) -> bool {
    let symbols = w.word().symbols();
    symbols.windows(3).all(|window| {
        FORBIDDEN_FACTORS.iter().all(|factor| {
            window[0].name() != factor[0]
                || window[1].name() != factor[1]
                || window[2].name() != factor[2]
        })
    })
}

/// Word potential: the empty word scores 0, a leading u adds one, a
/// leading V adds one and triples the rest.
pub fn potential(w: &UvWord) -> Result<u128, SystemsError> {
    let mut acc: u128 = 0;
    for s in w.word().symbols().iter().rev() {
        let factor = if s.name() == "V" { 3 } else { 1 };
        acc = acc
            .checked_mul(factor)
            .and_then(|x| x.checked_add(1))
            .ok_or(SystemsError::PotentialOverflow)?;
    }
    Ok(acc)
}

/// Largest level the certificate and period builders accept.
pub const MAX_LEVELS: usize = 6;

/// Number of 1100 periods in the level-k member, (9^k - 1) / 2.
pub fn period_count(level: usize) -> Result<u64, SystemsError> {
    if level > MAX_LEVELS {
        return Err(SystemsError::LevelTooLarge(level));
    }
    Ok((9u64.pow(level as u32) - 1) / 2)
}

/// Builds a word over 0/1 from its character string. Panics on any other
/// character; meant for fixed patterns, not user input.
pub fn binary_word(bits: &str) -> Word {
    let alphabet = binary_alphabet();
    let zero = alphabet.get("0").expect("fixed alphabet").clone();
    let one = alphabet.get("1").expect("fixed alphabet").clone();
    Word::new(
        bits.chars()
            .map(|c| match c {
                '0' => zero.clone(),
                '1' => one.clone(),
                other => panic!("binary pattern holds {other:?}"),
            })
            .collect(),
    )
}

/// 00 (1100)^alpha mid (1100)^beta as a binary word.
pub fn block_word(alpha: usize, mid: &str, beta: usize) -> Word {
    let mut bits = String::with_capacity(2 + 4 * alpha + mid.len() + 4 * beta);
    bits.push_str("00");
    for _ in 0..alpha {
        bits.push_str("1100");
    }
    bits.push_str(mid);
    for _ in 0..beta {
        bits.push_str("1100");
    }
    binary_word(&bits)
}

// One produce step of the block shift, as
// (instruction, position offset, leading periods gained, middle section,
// trailing periods spent): after the step the word reads
// 00 (1100)^(alpha+gained) middle (1100)^(beta-spent) and the instruction
// fires at offset + 4 alpha. Valid for every alpha and every beta >= 1.
const SHIFT_TEMPLATE: [(&str, usize, usize, &str, usize); 16] = [
    ("2b", 6, 0, "100110", 0),
    ("2a", 4, 0, "11000110", 0),
    ("2b", 7, 1, "110110", 0),
    ("2d", 10, 1, "11001110", 0),
    ("2d", 15, 2, "111001", 0),
    ("2c", 13, 3, "1001", 0),
    ("2a", 16, 3, "110001", 0),
    ("2b", 19, 4, "1101", 0),
    ("2c", 24, 4, "1101100100", 1),
    ("2d", 22, 4, "110011100100", 1),
    ("2c", 25, 5, "1100100100", 1),
    ("2a", 28, 6, "11000100", 1),
    ("2a", 33, 7, "011000", 1),
    ("2b", 31, 7, "11011000", 1),
    ("2d", 34, 7, "1100111000", 1),
    ("2c", 37, 9, "1000", 1),
];

fn shift_steps(alpha: usize, beta: usize) -> Vec<TraceStep> {
    SHIFT_TEMPLATE
        .iter()
        .map(|&(rule, offset, gained, mid, spent)| TraceStep {
            instruction: rule.to_owned(),
            position: offset + 4 * alpha,
            word: block_word(alpha + gained, mid, beta - spent),
        })
        .collect()
}

/// Sixteen produce steps trading one trailing 1100 block for nine
/// leading ones: from 00 (1100)^alpha 1000 (1100)^beta the trace grows
/// to 00 (1100)^(alpha+9) 1000 (1100)^(beta-1), so the larger word
/// clears to the smaller. Needs beta >= 1.
pub fn shift_chain(alpha: usize, beta: usize) -> Result<DerivationTrace, SystemsError> {
    if beta == 0 {
        return Err(SystemsError::BadChainParameters(
            "the shift consumes a trailing 1100 block, so beta must be at least 1",
        ));
    }
    Ok(DerivationTrace {
        direction: Direction::Produce,
        start: block_word(alpha, "1000", beta),
        steps: shift_steps(alpha, beta),
    })
}

fn absorb_steps(beta: usize) -> Vec<TraceStep> {
    let mut steps = Vec::with_capacity(16 * beta);
    for i in 0..beta {
        steps.extend(shift_steps(9 * i, beta - i));
    }
    steps
}

/// Chains shifts until every trailing block is absorbed: from
/// 00 1000 (1100)^beta the trace grows to 00 (1100)^(9 beta) 1000 in
/// 16 beta produce steps.
pub fn absorb_chain(beta: usize) -> DerivationTrace {
    DerivationTrace {
        direction: Direction::Produce,
        start: block_word(0, "1000", beta),
        steps: absorb_steps(beta),
    }
}

// Closing chain once every block is absorbed. With p = 00 (1100)^periods
// and q = |p|, entry (instruction, offset, suffix) records the word
// p suffix rewritten at position q + offset. The final suffix is
// (1100)^4: the 1000 marker has been folded into four fresh periods.
const CLOSE_TEMPLATE: [(&str, usize, &str); 6] = [
    ("3b", 4, "100110"),
    ("2a", 2, "11000110"),
    ("2b", 5, "1100110110"),
    ("2d", 8, "110011001110"),
    ("2c", 11, "11001100110010"),
    ("3a", 14, "1100110011001100"),
];

fn close_steps(periods: usize) -> Vec<TraceStep> {
    let q = 2 + 4 * periods;
    CLOSE_TEMPLATE
        .iter()
        .map(|&(rule, offset, suffix)| TraceStep {
            instruction: rule.to_owned(),
            position: q + offset,
            word: block_word(periods, suffix, 0),
        })
        .collect()
}

/// Produce trace from the empty word to 00 (1100)^n with
/// n = `period_count(level)`, in exactly 9^level steps. Levels past 4
/// are accepted but their traces no longer fit in ordinary memory.
pub fn spectrum_certificate(level: usize) -> Result<DerivationTrace, SystemsError> {
    if level > MAX_LEVELS {
        return Err(SystemsError::LevelTooLarge(level));
    }
    let mut steps = vec![TraceStep {
        instruction: "0a".to_owned(),
        position: 1,
        word: binary_word("00"),
    }];
    let mut n = 0usize;
    for _ in 0..level {
        let mut marker = String::with_capacity(4 + 4 * n);
        marker.push_str("1000");
        for _ in 0..n {
            marker.push_str("1100");
        }
        steps.push(TraceStep {
            instruction: "1a".to_owned(),
            position: 1,
            word: binary_word(&marker),
        });
        steps.push(TraceStep {
            instruction: "1b".to_owned(),
            position: 1,
            word: block_word(0, "1000", n),
        });
        steps.extend(absorb_steps(n));
        steps.extend(close_steps(9 * n));
        n = 9 * n + 4;
    }
    Ok(DerivationTrace {
        direction: Direction::Produce,
        start: Word::empty(),
        steps,
    })
}
