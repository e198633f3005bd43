//! Context rewriting with bounded left/right contexts and the two end
//! sentinels. An instruction (left, from -> to, right) rewrites
//! u1·from·u2 into u1·to·u2 whenever the contexts match around the split:
//! an anchored left context must equal u1 exactly, an unanchored one must
//! be a suffix of u1, and the right side mirrors this with prefixes.
//!
//! The clearing wrapper restricts every instruction to erase its factor
//! and defines membership as reducibility to the empty word; the inverse
//! relation (growing words by inserting factors back) drives bounded
//! language generation.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::text::{content_lines, ParseError};
use crate::word::{Alphabet, Symbol, Word};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CrsError {
    #[error("context width k must be at least 1")]
    ZeroWidth,
    #[error("input symbol {0} is missing from the working alphabet")]
    SigmaNotInGamma(String),
    #[error("instruction {id}: {side} context exceeds width {k} (sentinel counts one)")]
    ContextTooWide { id: String, side: &'static str, k: usize },
    #[error("instruction {id}: symbol {symbol} is outside the working alphabet")]
    ForeignSymbol { id: String, symbol: String },
    #[error("instruction id must be non-empty")]
    EmptyId,
    #[error("duplicate instruction id {0}")]
    DuplicateId(String),
    #[error("no instruction named {0}")]
    UnknownInstruction(String),
    #[error("instruction index {0} is out of range")]
    BadInstructionIndex(usize),
    #[error("instruction {id} does not apply at position {position}")]
    NotApplicable { id: String, position: usize },
    #[error("word uses symbol {0} outside the expected alphabet")]
    ForeignInput(String),
    #[error("instruction {0} shrinks its factor; search from the empty word would be incomplete")]
    ShrinkingInstruction(String),
    #[error("instruction {0} does not erase its factor")]
    NotClearing(String),
    #[error("instruction {0} rewrites the empty factor")]
    EmptyFactor(String),
    #[error("working symbol {0} is outside the input alphabet")]
    ExtraWorkingSymbol(String),
}

/// One rewriting instruction. `left`/`right` hold the context letters
/// only; the sentinels live in the `*_anchored` flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instruction {
    pub id: String,
    pub left_anchored: bool,
    pub left: Word,
    pub from: Word,
    pub to: Word,
    pub right: Word,
    pub right_anchored: bool,
}

impl Instruction {
    fn matches(&self, u1: &[Symbol], u2: &[Symbol]) -> bool {
        let left_ok = if self.left_anchored {
            u1 == self.left.symbols()
        } else {
            u1.ends_with(self.left.symbols())
        };
        let right_ok = if self.right_anchored {
            u2 == self.right.symbols()
        } else {
            u2.starts_with(self.right.symbols())
        };
        left_ok && right_ok
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |anchored: bool, w: &Word, lead: bool| -> String {
            let mut parts: Vec<String> = Vec::new();
            if anchored && lead {
                parts.push("^".into());
            }
            if !w.is_empty() {
                parts.extend(w.symbols().iter().map(|s| s.name().to_owned()));
            }
            if anchored && !lead {
                parts.push("$".into());
            }
            if parts.is_empty() {
                parts.push("_".into());
            }
            parts.join(" ")
        };
        write!(
            f,
            "{}: {} / {} -> {} / {}",
            self.id,
            side(self.left_anchored, &self.left, true),
            self.from,
            self.to,
            side(self.right_anchored, &self.right, false)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextRewritingSystem {
    sigma: Alphabet,
    gamma: Alphabet,
    k: usize,
    instructions: Vec<Instruction>,
}

impl ContextRewritingSystem {
    pub fn new(
        sigma: Alphabet,
        gamma: Alphabet,
        k: usize,
        instructions: Vec<Instruction>,
    ) -> Result<Self, CrsError> {
        if k == 0 {
            return Err(CrsError::ZeroWidth);
        }
        if let Some(s) = sigma.symbols().iter().find(|s| !gamma.contains(s)) {
            return Err(CrsError::SigmaNotInGamma(s.name().to_owned()));
        }
        let mut seen: HashSet<&str> = HashSet::new();
        for instr in &instructions {
            if instr.id.is_empty() {
                return Err(CrsError::EmptyId);
            }
            if !seen.insert(&instr.id) {
                return Err(CrsError::DuplicateId(instr.id.clone()));
            }
            let left_width = instr.left.len() + usize::from(instr.left_anchored);
            if left_width > k {
                return Err(CrsError::ContextTooWide {
                    id: instr.id.clone(),
                    side: "left",
                    k,
                });
            }
            let right_width = instr.right.len() + usize::from(instr.right_anchored);
            if right_width > k {
                return Err(CrsError::ContextTooWide {
                    id: instr.id.clone(),
                    side: "right",
                    k,
                });
            }
            for w in [&instr.left, &instr.from, &instr.to, &instr.right] {
                if let Some(s) = gamma.foreign_symbol(w) {
                    return Err(CrsError::ForeignSymbol {
                        id: instr.id.clone(),
                        symbol: s.name().to_owned(),
                    });
                }
            }
        }
        Ok(ContextRewritingSystem {
            sigma,
            gamma,
            k,
            instructions,
        })
    }

    pub fn sigma(&self) -> &Alphabet {
        &self.sigma
    }

    pub fn gamma(&self) -> &Alphabet {
        &self.gamma
    }

    pub fn width(&self) -> usize {
        self.k
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn instruction_index(&self, id: &str) -> Option<usize> {
        self.instructions.iter().position(|i| i.id == id)
    }

    /// All (instruction index, position) pairs that rewrite `w`, in
    /// instruction order, positions ascending. Positions are the 1-based
    /// start of the matched `from` factor.
    pub fn applicable(&self, w: &Word) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (index, instr) in self.instructions.iter().enumerate() {
            for pos in w.occurrences(&instr.from) {
                let u1 = &w.symbols()[..pos - 1];
                let u2 = &w.symbols()[pos - 1 + instr.from.len()..];
                if instr.matches(u1, u2) {
                    out.push((index, pos));
                }
            }
        }
        out
    }

    /// Rewrites `w` with the given instruction at the given position,
    /// re-checking the match.
    pub fn apply(&self, w: &Word, index: usize, position: usize) -> Result<Word, CrsError> {
        let instr = self
            .instructions
            .get(index)
            .ok_or(CrsError::BadInstructionIndex(index))?;
        let not_applicable = || CrsError::NotApplicable {
            id: instr.id.clone(),
            position,
        };
        if position == 0 || position + instr.from.len() > w.len() + 1 {
            return Err(not_applicable());
        }
        let u1 = &w.symbols()[..position - 1];
        let middle = &w.symbols()[position - 1..position - 1 + instr.from.len()];
        let u2 = &w.symbols()[position - 1 + instr.from.len()..];
        if middle != instr.from.symbols() || !instr.matches(u1, u2) {
            return Err(not_applicable());
        }
        let mut symbols = Vec::with_capacity(u1.len() + instr.to.len() + u2.len());
        symbols.extend_from_slice(u1);
        symbols.extend_from_slice(instr.to.symbols());
        symbols.extend_from_slice(u2);
        Ok(Word::new(symbols))
    }

    /// Every word of length at most `maxlen` reachable from `seed` by
    /// forward rewriting, in shortlex order.
    pub fn forward_closure(&self, seed: &Word, maxlen: usize) -> Vec<Word> {
        let mut seen: HashSet<Word> = HashSet::new();
        let mut queue: VecDeque<Word> = VecDeque::new();
        if seed.len() <= maxlen {
            seen.insert(seed.clone());
            queue.push_back(seed.clone());
        }
        while let Some(w) = queue.pop_front() {
            for (index, pos) in self.applicable(&w) {
                let next = self.apply(&w, index, pos).expect("applicable pair");
                if next.len() <= maxlen && seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        let mut out: Vec<Word> = seen.into_iter().collect();
        self.gamma.sort_shortlex(&mut out);
        out
    }

    /// Searches for a forward derivation from the empty word to `target`.
    /// Sound only when no instruction shrinks its factor (lengths then
    /// never decrease, so the search space is bounded by |target|); a
    /// shrinking instruction is reported as an error instead.
    pub fn derive_from_empty(&self, target: &Word) -> Result<Option<DerivationTrace>, CrsError> {
        if let Some(instr) = self
            .instructions
            .iter()
            .find(|i| i.to.len() < i.from.len())
        {
            return Err(CrsError::ShrinkingInstruction(instr.id.clone()));
        }
        if let Some(s) = self.gamma.foreign_symbol(target) {
            return Err(CrsError::ForeignInput(s.name().to_owned()));
        }
        // parent: child word -> (parent word, instruction, position)
        let mut parent: HashMap<Word, (Word, usize, usize)> = HashMap::new();
        let empty = Word::empty();
        if *target == empty {
            return Ok(Some(DerivationTrace {
                direction: Direction::Reduce,
                start: empty,
                steps: Vec::new(),
            }));
        }
        let mut queue: VecDeque<Word> = VecDeque::new();
        queue.push_back(empty.clone());
        let mut found = false;
        'search: while let Some(w) = queue.pop_front() {
            for (index, pos) in self.applicable(&w) {
                let next = self.apply(&w, index, pos).expect("applicable pair");
                if next.len() > target.len() || next == empty || parent.contains_key(&next) {
                    continue;
                }
                parent.insert(next.clone(), (w.clone(), index, pos));
                if next == *target {
                    found = true;
                    break 'search;
                }
                queue.push_back(next);
            }
        }
        if !found {
            return Ok(None);
        }
        let mut steps: Vec<TraceStep> = Vec::new();
        let mut cursor = target.clone();
        while cursor != empty {
            let (prev, index, position) = parent[&cursor].clone();
            steps.push(TraceStep {
                instruction: self.instructions[index].id.clone(),
                position,
                word: cursor.clone(),
            });
            cursor = prev;
        }
        steps.reverse();
        Ok(Some(DerivationTrace {
            direction: Direction::Reduce,
            start: empty,
            steps,
        }))
    }

    /// Reads the `crs` text format:
    ///
    /// ```text
    /// crs k=2
    /// sigma: 0 1
    /// gamma: 0 1
    /// instr 0a: ^ / 0 0 -> _ / $
    /// instr 2b: 0 0 / 1 1 -> _ / 0 1
    /// ```
    ///
    /// `^` anchors the left context to the word start, `$` anchors the
    /// right context to the word end, `_` is the empty word, and `/`
    /// separates the contexts from the rewrite.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let lines = content_lines(text);
        let mut iter = lines.iter();
        let k = match iter.next() {
            Some((n, tokens)) if tokens[0] == "crs" => match tokens[..] {
                [_, spec] if spec.starts_with("k=") => spec[2..]
                    .parse::<usize>()
                    .map_err(|_| ParseError::new(*n, format!("bad context width {spec:?}")))?,
                _ => return Err(ParseError::new(*n, "expected header line 'crs k=<width>'")),
            },
            Some((n, _)) => return Err(ParseError::new(*n, "expected header line 'crs k=<width>'")),
            None => return Err(ParseError::new(1, "empty description")),
        };
        let mut sigma: Option<Alphabet> = None;
        let mut gamma: Option<Alphabet> = None;
        let mut instr_lines: Vec<(usize, Vec<&str>)> = Vec::new();
        for (n, tokens) in iter {
            let (n, key, rest) = (*n, tokens[0], &tokens[1..]);
            match key {
                "sigma:" => {
                    if sigma.is_some() {
                        return Err(ParseError::new(n, "duplicate sigma line"));
                    }
                    sigma = Some(
                        Alphabet::from_names(rest)
                            .map_err(|e| ParseError::new(n, e.to_string()))?,
                    );
                }
                "gamma:" => {
                    if gamma.is_some() {
                        return Err(ParseError::new(n, "duplicate gamma line"));
                    }
                    gamma = Some(
                        Alphabet::from_names(rest)
                            .map_err(|e| ParseError::new(n, e.to_string()))?,
                    );
                }
                "instr" => instr_lines.push((n, rest.to_vec())),
                other => {
                    return Err(ParseError::new(n, format!("unexpected line {other:?}")));
                }
            }
        }
        let sigma = sigma.ok_or_else(|| ParseError::new(1, "missing sigma line"))?;
        let gamma = gamma.ok_or_else(|| ParseError::new(1, "missing gamma line"))?;
        let mut instructions = Vec::with_capacity(instr_lines.len());
        for (n, tokens) in instr_lines {
            instructions.push(parse_instruction(&gamma, n, &tokens)?);
        }
        ContextRewritingSystem::new(sigma, gamma, k, instructions)
            .map_err(|e| ParseError::new(1, e.to_string()))
    }
}

fn parse_instruction(
    gamma: &Alphabet,
    n: usize,
    tokens: &[&str],
) -> Result<Instruction, ParseError> {
    let Some((first, rest)) = tokens.split_first() else {
        return Err(ParseError::new(n, "instruction id missing"));
    };
    let Some(id) = first.strip_suffix(':') else {
        return Err(ParseError::new(n, "instruction id must end with ':'"));
    };
    if id.is_empty() {
        return Err(ParseError::new(n, "instruction id missing"));
    }
    let segments: Vec<&[&str]> = rest.split(|t| *t == "/").collect();
    let [left_seg, rule_seg, right_seg] = segments[..] else {
        return Err(ParseError::new(
            n,
            "instruction takes: <left> / <from> -> <to> / <right>",
        ));
    };
    if left_seg.is_empty() || right_seg.is_empty() {
        return Err(ParseError::new(n, "context may not be blank (use _, ^, or $)"));
    }
    let word = |tokens: &[&str]| {
        gamma
            .word_from_tokens(tokens)
            .map_err(|e| ParseError::new(n, e.to_string()))
    };
    let (left_anchored, left) = match left_seg {
        ["^"] => (true, Word::empty()),
        ["^", ctx @ ..] => (true, word(ctx)?),
        ctx => (false, word(ctx)?),
    };
    let (right_anchored, right) = match right_seg {
        ["$"] => (true, Word::empty()),
        [ctx @ .., "$"] => (true, word(ctx)?),
        ctx => (false, word(ctx)?),
    };
    let arrow = rule_seg.iter().position(|t| *t == "->");
    let (from_tokens, to_tokens) = match arrow {
        Some(i) => (&rule_seg[..i], &rule_seg[i + 1..]),
        None => return Err(ParseError::new(n, "rewrite takes: <from> -> <to>")),
    };
    if from_tokens.is_empty() || to_tokens.is_empty() {
        return Err(ParseError::new(n, "rewrite sides must be non-empty (use _ )"));
    }
    Ok(Instruction {
        id: id.to_owned(),
        left_anchored,
        left,
        from: word(from_tokens)?,
        to: word(to_tokens)?,
        right,
        right_anchored,
    })
}

/// A context rewriting system in which every instruction erases a
/// non-empty factor over the input alphabet. Membership means the word
/// can be cleared down to the empty word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClearingRA {
    system: ContextRewritingSystem,
}

impl ClearingRA {
    pub fn new(system: ContextRewritingSystem) -> Result<Self, CrsError> {
        if let Some(s) = system
            .gamma
            .symbols()
            .iter()
            .find(|s| !system.sigma.contains(s))
        {
            return Err(CrsError::ExtraWorkingSymbol(s.name().to_owned()));
        }
        for instr in &system.instructions {
            if !instr.to.is_empty() {
                return Err(CrsError::NotClearing(instr.id.clone()));
            }
            if instr.from.is_empty() {
                return Err(CrsError::EmptyFactor(instr.id.clone()));
            }
        }
        Ok(ClearingRA { system })
    }

    pub fn system(&self) -> &ContextRewritingSystem {
        &self.system
    }

    pub fn sigma(&self) -> &Alphabet {
        &self.system.sigma
    }

    pub fn applicable(&self, w: &Word) -> Vec<(usize, usize)> {
        self.system.applicable(w)
    }

    pub fn apply(&self, w: &Word, index: usize, position: usize) -> Result<Word, CrsError> {
        self.system.apply(w, index, position)
    }

    /// Clears `w` down to the empty word if possible, returning the
    /// deterministic first trace found under instruction/position order.
    pub fn reduce_to_empty(&self, w: &Word) -> Result<Option<DerivationTrace>, CrsError> {
        if let Some(s) = self.system.sigma.foreign_symbol(w) {
            return Err(CrsError::ForeignInput(s.name().to_owned()));
        }
        let mut dead: HashSet<Word> = HashSet::new();
        let mut steps: Vec<TraceStep> = Vec::new();
        if self.clear(w, &mut steps, &mut dead) {
            Ok(Some(DerivationTrace {
                direction: Direction::Reduce,
                start: w.clone(),
                steps,
            }))
        } else {
            Ok(None)
        }
    }

    fn clear(&self, w: &Word, steps: &mut Vec<TraceStep>, dead: &mut HashSet<Word>) -> bool {
        if w.is_empty() {
            return true;
        }
        if dead.contains(w) {
            return false;
        }
        for (index, pos) in self.system.applicable(w) {
            let next = self.system.apply(w, index, pos).expect("applicable pair");
            steps.push(TraceStep {
                instruction: self.system.instructions[index].id.clone(),
                position: pos,
                word: next.clone(),
            });
            if self.clear(&next, steps, dead) {
                return true;
            }
            steps.pop();
        }
        dead.insert(w.clone());
        false
    }

    /// All one-step predecessors of `u` under clearing: the words
    /// u1·from·u2 (for every split u = u1·u2 and every instruction) whose
    /// contexts match around the re-inserted factor. Shortlex order.
    pub fn produce_step(&self, u: &Word) -> Result<Vec<Word>, CrsError> {
        if let Some(s) = self.system.sigma.foreign_symbol(u) {
            return Err(CrsError::ForeignInput(s.name().to_owned()));
        }
        let mut out: Vec<Word> = Vec::new();
        for instr in &self.system.instructions {
            for cut in 0..=u.len() {
                let u1 = &u.symbols()[..cut];
                let u2 = &u.symbols()[cut..];
                if !instr.matches(u1, u2) {
                    continue;
                }
                let mut symbols = Vec::with_capacity(u.len() + instr.from.len());
                symbols.extend_from_slice(u1);
                symbols.extend_from_slice(instr.from.symbols());
                symbols.extend_from_slice(u2);
                out.push(Word::new(symbols));
            }
        }
        self.system.sigma.sort_shortlex(&mut out);
        out.dedup();
        Ok(out)
    }

    /// The accepted language cut at `maxlen`: the closure of the empty
    /// word under `produce_step`, in shortlex order.
    pub fn generate(&self, maxlen: usize) -> Vec<Word> {
        let mut seen: HashSet<Word> = HashSet::new();
        let mut queue: VecDeque<Word> = VecDeque::new();
        seen.insert(Word::empty());
        queue.push_back(Word::empty());
        while let Some(w) = queue.pop_front() {
            for next in self.produce_step(&w).expect("word over sigma") {
                if next.len() <= maxlen && seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        let mut out: Vec<Word> = seen.into_iter().collect();
        self.system.sigma.sort_shortlex(&mut out);
        out
    }
}

/// Which way a trace reads: `Reduce` steps apply instructions as written
/// (each recorded word is the rewrite of its predecessor), `Produce`
/// steps run them backwards (each recorded word rewrites into its
/// predecessor). Positions always locate `from` in the word that
/// contains it, which is the same offset on both sides of a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Reduce,
    Produce,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub instruction: String,
    pub position: usize,
    pub word: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTrace {
    pub direction: Direction,
    pub start: Word,
    pub steps: Vec<TraceStep>,
}

impl DerivationTrace {
    pub fn end(&self) -> &Word {
        self.steps.last().map_or(&self.start, |s| &s.word)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("start word uses symbol {0} outside the working alphabet")]
    ForeignStart(String),
    #[error("step {step}: word uses symbol {symbol} outside the working alphabet")]
    ForeignWord { step: usize, symbol: String },
    #[error("step {step}: no instruction named {id}")]
    UnknownInstruction { step: usize, id: String },
    #[error("step {step}: instruction {id} does not apply at position {position}")]
    NotApplicable {
        step: usize,
        id: String,
        position: usize,
    },
    #[error("step {step}: the recorded word does not match the rewrite")]
    WrongWord { step: usize },
}

/// Replays a trace against a system, reporting the first bad step
/// (0-based) on failure.
pub fn validate_trace(
    system: &ContextRewritingSystem,
    trace: &DerivationTrace,
) -> Result<(), TraceError> {
    if let Some(s) = system.gamma.foreign_symbol(&trace.start) {
        return Err(TraceError::ForeignStart(s.name().to_owned()));
    }
    let mut prev = trace.start.clone();
    for (step, record) in trace.steps.iter().enumerate() {
        if let Some(s) = system.gamma.foreign_symbol(&record.word) {
            return Err(TraceError::ForeignWord {
                step,
                symbol: s.name().to_owned(),
            });
        }
        let index = system
            .instruction_index(&record.instruction)
            .ok_or_else(|| TraceError::UnknownInstruction {
                step,
                id: record.instruction.clone(),
            })?;
        // The word holding the `from` factor: the previous word when
        // reducing, the recorded (longer) word when producing.
        let host = match trace.direction {
            Direction::Reduce => &prev,
            Direction::Produce => &record.word,
        };
        let rewritten = system
            .apply(host, index, record.position)
            .map_err(|_| TraceError::NotApplicable {
                step,
                id: record.instruction.clone(),
                position: record.position,
            })?;
        let expected = match trace.direction {
            Direction::Reduce => &record.word,
            Direction::Produce => &prev,
        };
        if rewritten != *expected {
            return Err(TraceError::WrongWord { step });
        }
        prev = record.word.clone();
    }
    Ok(())
}
