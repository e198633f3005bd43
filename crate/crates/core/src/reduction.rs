//! From a grammar in head-normal shape to a deletion machine that can
//! only reject perfectly interleaved words. The builder mints one fresh
//! marker symbol per nonterminal, collects the factor sets driving the
//! machine's three branches, and assembles the machine itself:
//!
//! - branch q1 deletes marker-annotated derivation steps and accepts
//!   anything that shrinks to the bare start symbol,
//! - branch q2 accepts anything containing a two-symbol factor that the
//!   perfectly interleaved form never shows,
//! - branch q3 accepts the leftovers of broken interleavings.
//!
//! Marker-annotated derivation words of derivable inputs clear through
//! q1, and an accepted interleaved encoding always belongs to a
//! derivable word. The converse does not hold for this rule set: some
//! gap-free words with good endpoints, the bare separator among them,
//! fall outside all three branches, which bounded universality
//! refutation makes easy to observe.

use std::collections::HashSet;

use thiserror::Error;

use crate::gjfa::{Gjfa, GjfaError};
use crate::gnf::{GnfError, GnfGrammar};
use crate::word::{Alphabet, Symbol, Word, WordError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("grammar: {0}")]
    Grammar(#[from] GnfError),
    #[error("machine: {0}")]
    Machine(#[from] GjfaError),
    #[error("alphabet: {0}")]
    Alphabet(#[from] WordError),
    #[error("the interleaved form is defined for non-empty words only")]
    EmptyInput,
    #[error("symbol {0} is not a grammar terminal")]
    ForeignSymbol(String),
    #[error("the grammar does not derive the given word")]
    NotDerivable,
}

/// Everything the grammar-to-machine construction yields: the working
/// alphabet, the marker symbols, the three factor sets (each sorted
/// shortlex), the separator word, and the machine.
#[derive(Clone, Debug)]
pub struct ReductionArtifacts {
    grammar: GnfGrammar,
    gamma: Alphabet,
    markers: Vec<Symbol>,
    p_bu: Vec<Word>,
    p_nb: Vec<Word>,
    p_c: Vec<Word>,
    t: Word,
    machine: Gjfa,
}

impl ReductionArtifacts {
    pub fn build(grammar: &GnfGrammar) -> Result<Self, ReductionError> {
        grammar.validate()?;
        let terminals = grammar.terminals();
        let nonterminals = grammar.nonterminals();

        // One fresh marker per nonterminal: prefix the name until it
        // collides with nothing already in play.
        let mut markers: Vec<Symbol> = Vec::with_capacity(nonterminals.len());
        for nt in nonterminals.symbols() {
            let mut name = format!("^{}", nt.name());
            let collides = |name: &str, chosen: &[Symbol]| {
                terminals.get(name).is_some()
                    || nonterminals.get(name).is_some()
                    || chosen.iter().any(|s| s.name() == name)
            };
            while collides(&name, &markers) {
                name.insert(0, '^');
            }
            markers.push(Symbol::new(&name)?);
        }

        let mut gamma_symbols: Vec<Symbol> = terminals.symbols().to_vec();
        gamma_symbols.extend_from_slice(nonterminals.symbols());
        gamma_symbols.extend_from_slice(&markers);
        let gamma = Alphabet::new(gamma_symbols)?;

        let marker_of = |nt: &Symbol| -> &Symbol {
            &markers[nonterminals.rank(nt).expect("nonterminal is declared")]
        };

        // Annotated derivation steps: the marker of the head, then the
        // whole replacement.
        let mut p_bu: Vec<Word> = grammar
            .rules()
            .iter()
            .map(|rule| {
                let mut symbols = Vec::with_capacity(1 + rule.rhs.len());
                symbols.push(marker_of(&rule.lhs).clone());
                symbols.extend_from_slice(rule.rhs.symbols());
                Word::new(symbols)
            })
            .collect();
        gamma.sort_shortlex(&mut p_bu);
        p_bu.dedup();

        // Unused annotations: a nonterminal directly against its marker.
        let mut p_nb: Vec<Word> = nonterminals
            .symbols()
            .iter()
            .map(|nt| Word::new(vec![nt.clone(), marker_of(nt).clone()]))
            .collect();
        gamma.sort_shortlex(&mut p_nb);
        p_nb.dedup();

        // The two-symbol factors a perfect interleaving can show. With
        // the separator A_1 m_1 A_2 m_2 ... A_n m_n between terminals
        // these are terminal-to-first-nonterminal, each nonterminal to
        // its marker, each marker to the next nonterminal, and the last
        // marker back to a terminal.
        let first_nt = &nonterminals.symbols()[0];
        let last_marker = markers.last().expect("at least one nonterminal");
        let mut p_c: Vec<Word> = Vec::new();
        for x in terminals.symbols() {
            p_c.push(Word::new(vec![x.clone(), first_nt.clone()]));
            p_c.push(Word::new(vec![last_marker.clone(), x.clone()]));
        }
        for (i, nt) in nonterminals.symbols().iter().enumerate() {
            p_c.push(Word::new(vec![nt.clone(), markers[i].clone()]));
            if let Some(next) = nonterminals.symbols().get(i + 1) {
                p_c.push(Word::new(vec![markers[i].clone(), next.clone()]));
            }
        }
        gamma.sort_shortlex(&mut p_c);
        p_c.dedup();

        let mut t_symbols = Vec::with_capacity(2 * nonterminals.len());
        for (i, nt) in nonterminals.symbols().iter().enumerate() {
            t_symbols.push(nt.clone());
            t_symbols.push(markers[i].clone());
        }
        let t = Word::new(t_symbols);

        let machine = Self::assemble_machine(
            grammar, &gamma, &markers, &p_bu, &p_nb, &p_c,
        )?;

        Ok(ReductionArtifacts {
            grammar: grammar.clone(),
            gamma,
            markers,
            p_bu,
            p_nb,
            p_c,
            t,
            machine,
        })
    }

    fn assemble_machine(
        grammar: &GnfGrammar,
        gamma: &Alphabet,
        markers: &[Symbol],
        p_bu: &[Word],
        p_nb: &[Word],
        p_c: &[Word],
    ) -> Result<Gjfa, GjfaError> {
        let gap: HashSet<&Word> = p_c.iter().collect();
        let mut builder = Gjfa::builder(gamma.clone())
            .states(["q0", "q1", "q2", "q3", "q4"])
            .start("q0")
            .final_state("q4")
            .rule("q0", Word::empty(), "q1");
        for p in p_bu.iter().chain(p_nb) {
            builder = builder.rule("q1", p.clone(), "q1");
        }
        builder = builder.rule("q1", Word::single(grammar.start().clone()), "q4");
        for x in gamma.symbols() {
            for y in gamma.symbols() {
                let pair = Word::new(vec![x.clone(), y.clone()]);
                if !gap.contains(&pair) {
                    builder = builder.rule("q0", pair, "q2");
                }
            }
        }
        for x in gamma.symbols() {
            builder = builder.rule("q2", Word::single(x.clone()), "q2");
        }
        builder = builder
            .rule("q2", Word::empty(), "q4")
            .rule("q0", Word::empty(), "q3");
        for x in grammar.terminals().symbols() {
            builder = builder.rule("q3", Word::single(x.clone()), "q3");
        }
        for m in markers {
            for nt in grammar.nonterminals().symbols() {
                builder = builder.rule("q3", Word::new(vec![m.clone(), nt.clone()]), "q3");
            }
        }
        for u in grammar
            .nonterminals()
            .symbols()
            .iter()
            .chain(markers)
        {
            builder = builder.rule("q3", Word::single(u.clone()), "q4");
        }
        builder = builder.rule("q3", Word::empty(), "q4");
        builder.build()
    }

    pub fn grammar(&self) -> &GnfGrammar {
        &self.grammar
    }

    pub fn gamma(&self) -> &Alphabet {
        &self.gamma
    }

    /// Marker symbols, parallel to the nonterminal declaration order.
    pub fn markers(&self) -> &[Symbol] {
        &self.markers
    }

    pub fn p_bu(&self) -> &[Word] {
        &self.p_bu
    }

    pub fn p_nb(&self) -> &[Word] {
        &self.p_nb
    }

    pub fn p_c(&self) -> &[Word] {
        &self.p_c
    }

    /// Separator word: each nonterminal followed by its marker, in
    /// declaration order.
    pub fn separator(&self) -> &Word {
        &self.t
    }

    pub fn machine(&self) -> &Gjfa {
        &self.machine
    }

    /// The encoding the machine judges: the separator after every
    /// letter of `v`, so `v = x1 x2 ... xn` becomes `x1 t x2 t ... xn t`.
    pub fn interleave(&self, v: &Word) -> Result<Word, ReductionError> {
        if v.is_empty() {
            return Err(ReductionError::EmptyInput);
        }
        if let Some(s) = self.grammar.terminals().foreign_symbol(v) {
            return Err(ReductionError::ForeignSymbol(s.name().to_owned()));
        }
        let mut symbols = Vec::with_capacity(v.len() * (self.t.len() + 1));
        for x in v.symbols() {
            symbols.push(x.clone());
            symbols.extend_from_slice(self.t.symbols());
        }
        Ok(Word::new(symbols))
    }

    /// Marker-annotated leftmost derivation of `v`: starts at the bare
    /// start symbol; each step inserts the marker and the replacement
    /// after the leftmost nonterminal that is not yet annotated. The
    /// last word carries the whole derivation.
    pub fn annotated_derivation(&self, v: &Word) -> Result<Vec<Word>, ReductionError> {
        let path = self
            .grammar
            .leftmost_derivation(v)?
            .ok_or(ReductionError::NotDerivable)?;
        let nonterminals = self.grammar.nonterminals();
        let marker_rank = |s: &Symbol| nonterminals.rank(s);
        let mut current: Vec<Symbol> = vec![self.grammar.start().clone()];
        let mut words = vec![Word::single(self.grammar.start().clone())];
        for rule_index in path {
            let rule = &self.grammar.rules()[rule_index];
            let pending = current
                .iter()
                .enumerate()
                .position(|(i, s)| {
                    marker_rank(s).is_some_and(|r| {
                        current.get(i + 1).map(Symbol::name) != Some(self.markers[r].name())
                    })
                })
                .expect("derivation has a pending nonterminal per step");
            assert_eq!(current[pending], rule.lhs, "leftmost order");
            let rank = marker_rank(&rule.lhs).expect("head is declared");
            let mut insertion = Vec::with_capacity(1 + rule.rhs.len());
            insertion.push(self.markers[rank].clone());
            insertion.extend_from_slice(rule.rhs.symbols());
            current.splice(pending + 1..pending + 1, insertion);
            words.push(Word::new(current.clone()));
        }
        Ok(words)
    }

    /// Whether `w` shrinks to the bare start symbol by deleting
    /// annotated-step factors alone. Holds for every final word of
    /// `annotated_derivation`.
    pub fn derivation_word_clears(&self, w: &Word) -> bool {
        let target = Word::single(self.grammar.start().clone());
        let mut dead: HashSet<Word> = HashSet::new();
        self.clears(w, &target, &mut dead)
    }

    fn clears(&self, w: &Word, target: &Word, dead: &mut HashSet<Word>) -> bool {
        if w == target {
            return true;
        }
        if w.len() <= target.len() || dead.contains(w) {
            return false;
        }
        for piece in &self.p_bu {
            for pos in w.occurrences(piece) {
                let shorter = w.delete_at(piece, pos).expect("occurrence is valid");
                if self.clears(&shorter, target, dead) {
                    return true;
                }
            }
        }
        dead.insert(w.clone());
        false
    }

    /// The machine and factor sets in a line-per-entry text form, the
    /// separator last.
    pub fn sets_text(&self) -> String {
        let mut out = String::new();
        for p in &self.p_bu {
            out.push_str(&format!("p_bu: {p}\n"));
        }
        for p in &self.p_nb {
            out.push_str(&format!("p_nb: {p}\n"));
        }
        for p in &self.p_c {
            out.push_str(&format!("p_c: {p}\n"));
        }
        out.push_str(&format!("t: {}\n", self.t));
        out
    }
}
