//! Words over declared alphabets of named symbols.
//!
//! Positions are 1-based throughout: position `p` points at the p-th symbol
//! of a word, and an insertion at position `p` makes the inserted piece
//! start there. Words are immutable; every operation returns a fresh word.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Tokens with a fixed meaning in machine description files. No symbol may
/// use one of these as its full name (longer names containing them are fine).
pub const RESERVED_TOKENS: &[&str] = &["^", "$", "_", "#", "|", "->", "/"];

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("empty symbol name")]
    EmptySymbolName,
    #[error("symbol name {0:?} contains whitespace")]
    WhitespaceInName(String),
    // '#' starts a comment anywhere in a line, so it can never survive a
    // write/read round trip inside a name.
    #[error("symbol name {0:?} contains '#'")]
    CommentCharInName(String),
    #[error("symbol name {0:?} is a reserved token")]
    ReservedName(String),
    #[error("duplicate symbol {0} in alphabet")]
    DuplicateSymbol(String),
    #[error("symbol {0} is not in the alphabet")]
    UnknownSymbol(String),
    #[error("position {pos} is out of range 1..={max}")]
    PositionOutOfRange { pos: usize, max: usize },
    #[error("the piece does not occur at position {0}")]
    NoOccurrenceAt(usize),
    #[error("'_' stands for the empty word and cannot appear inside a longer word")]
    MisplacedEpsilon,
}

/// A named symbol. Equality, ordering and hashing go by the name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Result<Self, WordError> {
        if name.is_empty() {
            return Err(WordError::EmptySymbolName);
        }
        if name.chars().any(char::is_whitespace) {
            return Err(WordError::WhitespaceInName(name.to_owned()));
        }
        if RESERVED_TOKENS.contains(&name) {
            return Err(WordError::ReservedName(name.to_owned()));
        }
        if name.contains('#') {
            return Err(WordError::CommentCharInName(name.to_owned()));
        }
        Ok(Symbol(name.into()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite set of symbols with a fixed declaration order. The declaration
/// order defines the canonical shortlex order on words over the alphabet.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
    rank: HashMap<Symbol, usize>,
}

impl Alphabet {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, WordError> {
        let mut rank = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if rank.insert(s.clone(), i).is_some() {
                return Err(WordError::DuplicateSymbol(s.name().to_owned()));
            }
        }
        Ok(Alphabet { symbols, rank })
    }

    pub fn from_names(names: &[&str]) -> Result<Self, WordError> {
        let symbols = names
            .iter()
            .map(|n| Symbol::new(n))
            .collect::<Result<Vec<_>, _>>()?;
        Alphabet::new(symbols)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.rank.contains_key(s)
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        w.symbols().iter().all(|s| self.contains(s))
    }

    /// First symbol of `w` that is not in the alphabet, if any.
    pub fn foreign_symbol<'w>(&self, w: &'w Word) -> Option<&'w Symbol> {
        w.symbols().iter().find(|s| !self.contains(s))
    }

    pub fn rank(&self, s: &Symbol) -> Option<usize> {
        self.rank.get(s).copied()
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.iter().find(|s| s.name() == name)
    }

    pub fn is_subset_of(&self, other: &Alphabet) -> bool {
        self.symbols.iter().all(|s| other.contains(s))
    }

    /// Builds a word from whitespace-split tokens. A single `_` token is the
    /// empty word; `_` mixed with other tokens is an error.
    pub fn word_from_tokens<T: AsRef<str>>(&self, tokens: &[T]) -> Result<Word, WordError> {
        if tokens.len() == 1 && tokens[0].as_ref() == "_" {
            return Ok(Word::empty());
        }
        let mut symbols = Vec::with_capacity(tokens.len());
        for t in tokens {
            let t = t.as_ref();
            if t == "_" {
                return Err(WordError::MisplacedEpsilon);
            }
            match self.get(t) {
                Some(s) => symbols.push(s.clone()),
                None => return Err(WordError::UnknownSymbol(t.to_owned())),
            }
        }
        Ok(Word::new(symbols))
    }

    /// Shortlex comparison: length first, then declaration rank per position.
    /// Symbols outside the alphabet sort after all declared ones, by name.
    pub fn cmp_shortlex(&self, a: &Word, b: &Word) -> Ordering {
        a.len().cmp(&b.len()).then_with(|| {
            for (x, y) in a.symbols().iter().zip(b.symbols()) {
                let rx = (self.rank(x).unwrap_or(usize::MAX), x);
                let ry = (self.rank(y).unwrap_or(usize::MAX), y);
                match rx.cmp(&ry) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }

    pub fn sort_shortlex(&self, words: &mut [Word]) {
        words.sort_by(|a, b| self.cmp_shortlex(a, b));
    }

    /// All words of length at most `maxlen`, in shortlex order.
    pub fn words_up_to(&self, maxlen: usize) -> Vec<Word> {
        let mut all = vec![Word::empty()];
        let mut level = vec![Word::empty()];
        for _ in 0..maxlen {
            let mut next = Vec::with_capacity(level.len() * self.symbols.len());
            for w in &level {
                for s in &self.symbols {
                    let mut v = w.0.to_vec();
                    v.push(s.clone());
                    next.push(Word::new(v));
                }
            }
            all.extend(next.iter().cloned());
            level = next;
            if level.is_empty() {
                break;
            }
        }
        all
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.symbols.iter()).finish()
    }
}

/// An immutable word. The canonical `Ord` is shortlex with symbol names as
/// the tiebreak; machine operations re-sort by their alphabet's declaration
/// order where that differs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word(Arc<[Symbol]>);

impl Word {
    pub fn empty() -> Self {
        Word(Arc::from(Vec::new()))
    }

    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(Arc::from(symbols))
    }

    pub fn single(s: Symbol) -> Self {
        Word::new(vec![s])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.to_vec();
        v.extend_from_slice(&other.0);
        Word::new(v)
    }

    /// 1-based start positions of every occurrence of `piece`, ascending.
    /// The empty piece occurs at every boundary: positions 1..=len+1.
    pub fn occurrences(&self, piece: &Word) -> Vec<usize> {
        if piece.is_empty() {
            return (1..=self.len() + 1).collect();
        }
        if piece.len() > self.len() {
            return Vec::new();
        }
        self.0
            .windows(piece.len())
            .enumerate()
            .filter(|(_, w)| *w == piece.symbols())
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Removes the occurrence of `piece` starting at position `pos`.
    pub fn delete_at(&self, piece: &Word, pos: usize) -> Result<Word, WordError> {
        let max = (self.len() + 1).saturating_sub(piece.len());
        if pos == 0 || pos > max {
            return Err(WordError::PositionOutOfRange { pos, max });
        }
        let (i, j) = (pos - 1, pos - 1 + piece.len());
        if self.0[i..j] != *piece.symbols() {
            return Err(WordError::NoOccurrenceAt(pos));
        }
        let mut v = self.0[..i].to_vec();
        v.extend_from_slice(&self.0[j..]);
        Ok(Word::new(v))
    }

    /// Splices `piece` in so that it starts at position `pos` of the result.
    pub fn insert_at(&self, piece: &Word, pos: usize) -> Result<Word, WordError> {
        if pos == 0 || pos > self.len() + 1 {
            return Err(WordError::PositionOutOfRange {
                pos,
                max: self.len() + 1,
            });
        }
        let i = pos - 1;
        let mut v = self.0[..i].to_vec();
        v.extend_from_slice(&piece.0);
        v.extend_from_slice(&self.0[i..]);
        Ok(Word::new(v))
    }

    /// Every word obtained by inserting `piece` at one position, deduplicated
    /// and in shortlex order. All results share one length, so the order is
    /// plain lexicographic.
    pub fn insertions(&self, piece: &Word) -> Vec<Word> {
        let set: BTreeSet<Word> = (1..=self.len() + 1)
            .map(|p| self.insert_at(piece, p).expect("position in range"))
            .collect();
        set.into_iter().collect()
    }

    /// Every word obtained by deleting one occurrence of `piece`, deduplicated
    /// and in shortlex order.
    pub fn deletions(&self, piece: &Word) -> Vec<Word> {
        let set: BTreeSet<Word> = self
            .occurrences(piece)
            .into_iter()
            .map(|p| self.delete_at(piece, p).expect("occurrence verified"))
            .collect();
        set.into_iter().collect()
    }

    /// Keeps only the symbols that belong to `keep`, preserving order.
    pub fn project(&self, keep: &Alphabet) -> Word {
        Word::new(
            self.0
                .iter()
                .filter(|s| keep.contains(s))
                .cloned()
                .collect(),
        )
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word::new(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("_");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(s.name())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// All words reachable from `seed` by repeatedly inserting members of
/// `pieces` anywhere, up to length `maxlen`, in shortlex order. Empty when
/// the seed itself already exceeds the bound.
pub fn insert_closure(seed: &Word, pieces: &[Word], maxlen: usize) -> Vec<Word> {
    if seed.len() > maxlen {
        return Vec::new();
    }
    let mut seen: HashSet<Word> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(seed.clone());
    queue.push_back(seed.clone());
    while let Some(w) = queue.pop_front() {
        for piece in pieces {
            if w.len() + piece.len() > maxlen || piece.is_empty() {
                continue;
            }
            for next in w.insertions(piece) {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    let mut out: Vec<Word> = seen.into_iter().collect();
    out.sort();
    out
}
