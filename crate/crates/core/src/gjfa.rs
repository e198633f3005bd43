//! Jumping machines: a rule `(p, y, q)` deletes one occurrence of the label
//! word `y` anywhere in the current word while the control moves from state
//! `p` to state `q`. A word is accepted when some sequence of deletions
//! consumes it completely and ends in a final state; the empty word is
//! accepted exactly when the start state is final.

use std::collections::{BTreeSet, HashSet, VecDeque};

use thiserror::Error;

use crate::text::{content_lines, ParseError};
use crate::word::{Alphabet, Word, WordError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GjfaError {
    #[error("machine has no states")]
    NoStates,
    #[error("machine alphabet is empty")]
    EmptyAlphabet,
    #[error("duplicate state {0}")]
    DuplicateState(String),
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("rule label uses symbol {0} outside the alphabet")]
    ForeignLabelSymbol(String),
    #[error("input word uses symbol {0} outside the alphabet")]
    ForeignInputSymbol(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Why replaying an [`AcceptWitness`] failed.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("step {step}: rule index {rule} does not exist")]
    NoSuchRule { step: usize, rule: usize },
    #[error("step {step}: rule starts in {expected} but the machine is in {found}")]
    WrongState {
        step: usize,
        expected: String,
        found: String,
    },
    #[error("step {step}: the label does not occur at position {pos}")]
    BadPosition { step: usize, pos: usize },
    #[error("input not fully consumed after the last step")]
    LeftoverInput,
    #[error("replay ends in non-final state {0}")]
    NotFinal(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub from: usize,
    pub label: Word,
    pub to: usize,
}

/// One deletion performed during an accepting run: rule index into
/// [`Gjfa::rules`] and the 1-based position the label was deleted at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessStep {
    pub rule: usize,
    pub position: usize,
}

/// A checkable certificate for acceptance. Steps are found with rules tried
/// in declaration order and positions ascending, so the witness for a given
/// machine and word is deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcceptWitness {
    pub steps: Vec<WitnessStep>,
}

impl AcceptWitness {
    /// Re-runs the deletions against `machine` starting from `input` and
    /// checks that they end at the empty word in a final state.
    pub fn replay(&self, machine: &Gjfa, input: &Word) -> Result<(), ReplayError> {
        let mut state = machine.start;
        let mut word = input.clone();
        for (i, step) in self.steps.iter().enumerate() {
            let rule = machine
                .rules
                .get(step.rule)
                .ok_or(ReplayError::NoSuchRule {
                    step: i,
                    rule: step.rule,
                })?;
            if rule.from != state {
                return Err(ReplayError::WrongState {
                    step: i,
                    expected: machine.states[rule.from].clone(),
                    found: machine.states[state].clone(),
                });
            }
            word = word
                .delete_at(&rule.label, step.position)
                .map_err(|_| ReplayError::BadPosition {
                    step: i,
                    pos: step.position,
                })?;
            state = rule.to;
        }
        if !word.is_empty() {
            return Err(ReplayError::LeftoverInput);
        }
        if !machine.finals.contains(&state) {
            return Err(ReplayError::NotFinal(machine.states[state].clone()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gjfa {
    states: Vec<String>,
    alphabet: Alphabet,
    start: usize,
    finals: BTreeSet<usize>,
    rules: Vec<Rule>,
}

/// Incremental construction; rules and states keep their declaration order.
pub struct GjfaBuilder {
    alphabet: Alphabet,
    states: Vec<String>,
    start: Option<String>,
    finals: Vec<String>,
    rules: Vec<(String, Word, String)>,
}

impl GjfaBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        GjfaBuilder {
            alphabet,
            states: Vec::new(),
            start: None,
            finals: Vec::new(),
            rules: Vec::new(),
        }
    }

    pub fn state(mut self, name: &str) -> Self {
        self.states.push(name.to_owned());
        self
    }

    pub fn states<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.states.extend(names.into_iter().map(str::to_owned));
        self
    }

    pub fn start(mut self, name: &str) -> Self {
        self.start = Some(name.to_owned());
        self
    }

    pub fn final_state(mut self, name: &str) -> Self {
        self.finals.push(name.to_owned());
        self
    }

    /// Adds the rule `(from, label, to)`.
    pub fn rule(mut self, from: &str, label: Word, to: &str) -> Self {
        self.rules.push((from.to_owned(), label, to.to_owned()));
        self
    }

    pub fn build(self) -> Result<Gjfa, GjfaError> {
        if self.states.is_empty() {
            return Err(GjfaError::NoStates);
        }
        if self.alphabet.is_empty() {
            return Err(GjfaError::EmptyAlphabet);
        }
        let mut seen = HashSet::new();
        for s in &self.states {
            if !seen.insert(s.clone()) {
                return Err(GjfaError::DuplicateState(s.clone()));
            }
        }
        let index = |name: &str| -> Result<usize, GjfaError> {
            self.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| GjfaError::UnknownState(name.to_owned()))
        };
        let start = index(&self.start.ok_or(GjfaError::NoStates)?)?;
        let mut finals = BTreeSet::new();
        for f in &self.finals {
            finals.insert(index(f)?);
        }
        let mut rules = Vec::with_capacity(self.rules.len());
        for (from, label, to) in self.rules {
            if let Some(s) = self.alphabet.foreign_symbol(&label) {
                return Err(GjfaError::ForeignLabelSymbol(s.name().to_owned()));
            }
            rules.push(Rule {
                from: index(&from)?,
                label,
                to: index(&to)?,
            });
        }
        Ok(Gjfa {
            states: self.states,
            alphabet: self.alphabet,
            start,
            finals,
            rules,
        })
    }
}

impl Gjfa {
    pub fn builder(alphabet: Alphabet) -> GjfaBuilder {
        GjfaBuilder::new(alphabet)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, index: usize) -> &str {
        &self.states[index]
    }

    pub fn start_state(&self) -> &str {
        &self.states[self.start]
    }

    pub fn final_states(&self) -> impl Iterator<Item = &str> {
        self.finals.iter().map(|&i| self.states[i].as_str())
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    fn check_input(&self, w: &Word) -> Result<(), GjfaError> {
        match self.alphabet.foreign_symbol(w) {
            Some(s) => Err(GjfaError::ForeignInputSymbol(s.name().to_owned())),
            None => Ok(()),
        }
    }

    /// Deterministic accepting run for `w`, if one exists. The search
    /// memoizes failed (state, word) configurations, so each is expanded at
    /// most once.
    pub fn witness(&self, w: &Word) -> Result<Option<AcceptWitness>, GjfaError> {
        self.check_input(w)?;
        let mut failed: HashSet<(usize, Word)> = HashSet::new();
        let mut steps = Vec::new();
        if self.search(self.start, w.clone(), &mut failed, &mut steps) {
            Ok(Some(AcceptWitness { steps }))
        } else {
            Ok(None)
        }
    }

    pub fn accepts(&self, w: &Word) -> Result<bool, GjfaError> {
        Ok(self.witness(w)?.is_some())
    }

    fn search(
        &self,
        state: usize,
        word: Word,
        failed: &mut HashSet<(usize, Word)>,
        steps: &mut Vec<WitnessStep>,
    ) -> bool {
        if word.is_empty() && self.finals.contains(&state) {
            return true;
        }
        // Inserting on entry also cuts cycles through label-free rules.
        if !failed.insert((state, word.clone())) {
            return false;
        }
        for (ri, rule) in self.rules.iter().enumerate() {
            if rule.from != state {
                continue;
            }
            for pos in word.occurrences(&rule.label) {
                let rest = word.delete_at(&rule.label, pos).expect("occurrence");
                steps.push(WitnessStep { rule: ri, position: pos });
                if self.search(rule.to, rest, failed, steps) {
                    return true;
                }
                steps.pop();
            }
        }
        false
    }

    /// The accepted language up to length `maxlen`, in shortlex order.
    ///
    /// Computed without the membership search: the accepted set is the
    /// closure of `(final, empty)` configurations under reversed rules,
    /// where reversing a deletion means inserting the label anywhere.
    pub fn enumerate(&self, maxlen: usize) -> Vec<Word> {
        let mut rules_into: Vec<Vec<usize>> = vec![Vec::new(); self.states.len()];
        for (ri, rule) in self.rules.iter().enumerate() {
            rules_into[rule.to].push(ri);
        }
        let mut seen: HashSet<(usize, Word)> = HashSet::new();
        let mut queue: VecDeque<(usize, Word)> = VecDeque::new();
        for &f in &self.finals {
            if seen.insert((f, Word::empty())) {
                queue.push_back((f, Word::empty()));
            }
        }
        while let Some((state, word)) = queue.pop_front() {
            for &ri in &rules_into[state] {
                let rule = &self.rules[ri];
                if word.len() + rule.label.len() > maxlen {
                    continue;
                }
                for longer in word.insertions(&rule.label) {
                    let cfg = (rule.from, longer);
                    if !seen.contains(&cfg) {
                        seen.insert(cfg.clone());
                        queue.push_back(cfg);
                    }
                }
            }
        }
        let mut out: Vec<Word> = seen
            .into_iter()
            .filter(|(s, _)| *s == self.start)
            .map(|(_, w)| w)
            .collect();
        self.alphabet.sort_shortlex(&mut out);
        out
    }

    /// Shortlex-least word of length at most `maxlen` that the machine
    /// rejects, or `None` when it accepts everything within the bound.
    pub fn refute_universality(&self, maxlen: usize) -> Option<Word> {
        self.alphabet
            .words_up_to(maxlen)
            .into_iter()
            .find(|w| !self.accepts(w).expect("word built over own alphabet"))
    }

    /// Reads the `gjfa` text format:
    ///
    /// ```text
    /// gjfa
    /// alphabet: a b
    /// states: q0 q1
    /// start: q0
    /// final: q1
    /// rule: q0 q1 a b   # from, to, then the label; _ for the empty label
    /// ```
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let lines = content_lines(text);
        let mut iter = lines.iter();
        match iter.next() {
            Some((_, tokens)) if tokens[..] == ["gjfa"] => {}
            Some((n, _)) => return Err(ParseError::new(*n, "expected header line 'gjfa'")),
            None => return Err(ParseError::new(1, "empty description")),
        }
        let mut alphabet: Option<Alphabet> = None;
        let mut states: Option<Vec<String>> = None;
        let mut start: Option<String> = None;
        let mut finals: Option<Vec<String>> = None;
        let mut rules: Vec<(usize, Vec<&str>)> = Vec::new();
        for (n, tokens) in iter {
            let (n, key, rest) = (*n, tokens[0], &tokens[1..]);
            match key {
                "alphabet:" => {
                    if alphabet.is_some() {
                        return Err(ParseError::new(n, "duplicate alphabet line"));
                    }
                    let al = Alphabet::from_names(rest)
                        .map_err(|e| ParseError::new(n, e.to_string()))?;
                    alphabet = Some(al);
                }
                "states:" => {
                    if states.is_some() {
                        return Err(ParseError::new(n, "duplicate states line"));
                    }
                    states = Some(rest.iter().map(|s| s.to_string()).collect());
                }
                "start:" => {
                    if start.is_some() {
                        return Err(ParseError::new(n, "duplicate start line"));
                    }
                    match rest {
                        [name] => start = Some(name.to_string()),
                        _ => return Err(ParseError::new(n, "start takes exactly one state")),
                    }
                }
                "final:" => {
                    if finals.is_some() {
                        return Err(ParseError::new(n, "duplicate final line"));
                    }
                    finals = Some(rest.iter().map(|s| s.to_string()).collect());
                }
                "rule:" => rules.push((n, rest.to_vec())),
                other => {
                    return Err(ParseError::new(n, format!("unexpected line {other:?}")));
                }
            }
        }
        let alphabet = alphabet.ok_or_else(|| ParseError::new(1, "missing alphabet line"))?;
        let states = states.ok_or_else(|| ParseError::new(1, "missing states line"))?;
        let start = start.ok_or_else(|| ParseError::new(1, "missing start line"))?;
        let finals = finals.ok_or_else(|| ParseError::new(1, "missing final line"))?;
        let mut b = Gjfa::builder(alphabet.clone());
        for s in &states {
            b = b.state(s);
        }
        b = b.start(&start);
        for f in &finals {
            b = b.final_state(f);
        }
        for (n, tokens) in rules {
            if tokens.len() < 3 {
                return Err(ParseError::new(
                    n,
                    "rule takes: from-state to-state label-symbols",
                ));
            }
            let label = alphabet
                .word_from_tokens(&tokens[2..])
                .map_err(|e| ParseError::new(n, e.to_string()))?;
            b = b.rule(tokens[0], label, tokens[1]);
        }
        b.build().map_err(|e| ParseError::new(1, e.to_string()))
    }

    /// Writes the machine in the format accepted by [`Gjfa::parse`]; parsing
    /// the output reproduces the machine exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::from("gjfa\n");
        out.push_str("alphabet:");
        for s in self.alphabet.symbols() {
            out.push(' ');
            out.push_str(s.name());
        }
        out.push_str("\nstates:");
        for s in &self.states {
            out.push(' ');
            out.push_str(s);
        }
        out.push_str("\nstart: ");
        out.push_str(&self.states[self.start]);
        out.push_str("\nfinal:");
        for &f in &self.finals {
            out.push(' ');
            out.push_str(&self.states[f]);
        }
        out.push('\n');
        for rule in &self.rules {
            out.push_str(&format!(
                "rule: {} {} {}\n",
                self.states[rule.from], self.states[rule.to], rule.label
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Symbol;

    fn ab() -> Alphabet {
        Alphabet::from_names(&["a", "b"]).unwrap()
    }

    fn w(s: &str) -> Word {
        let al = ab();
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens.is_empty() {
            Word::empty()
        } else {
            al.word_from_tokens(&tokens).unwrap()
        }
    }

    /// One rule deleting "ab"; accepts exactly {ab}.
    fn m1() -> Gjfa {
        Gjfa::builder(ab())
            .states(["s", "f"])
            .start("s")
            .final_state("f")
            .rule("s", w("a b"), "f")
            .build()
            .unwrap()
    }

    /// Deletes "ab" one or more times; start state is not final.
    fn m2() -> Gjfa {
        Gjfa::builder(ab())
            .states(["q0", "q1"])
            .start("q0")
            .final_state("q1")
            .rule("q0", w("a b"), "q1")
            .rule("q1", w("a b"), "q1")
            .build()
            .unwrap()
    }

    #[test]
    fn accepts_by_deleting_anywhere() {
        let m = m1();
        assert!(m.accepts(&w("a b")).unwrap());
        assert!(!m.accepts(&w("b a")).unwrap());
        assert!(!m.accepts(&Word::empty()).unwrap());
        assert!(!m.accepts(&w("a b a b")).unwrap());

        let m = m2();
        assert!(m.accepts(&w("a a b b")).unwrap());
        assert!(m.accepts(&w("a b a b")).unwrap());
        // "abba" gets stuck on "ba" after the only possible deletion.
        assert!(!m.accepts(&w("a b b a")).unwrap());
    }

    #[test]
    fn empty_word_needs_final_start() {
        let m = Gjfa::builder(ab())
            .state("q")
            .start("q")
            .final_state("q")
            .build()
            .unwrap();
        assert!(m.accepts(&Word::empty()).unwrap());
        assert!(!m.accepts(&w("a")).unwrap());
    }

    #[test]
    fn witness_is_deterministic_and_replays() {
        let m = m2();
        let input = w("a a b b");
        let witness = m.witness(&input).unwrap().unwrap();
        // Rules in declaration order, positions ascending: rule 0 deletes at
        // the leftmost occurrence of ab (position 2), leaving ab.
        assert_eq!(
            witness.steps,
            vec![
                WitnessStep { rule: 0, position: 2 },
                WitnessStep { rule: 1, position: 1 },
            ]
        );
        witness.replay(&m, &input).unwrap();
        // The same witness must not replay against a different input.
        assert!(witness.replay(&m, &w("a b a b")).is_err());
    }

    #[test]
    fn foreign_input_is_an_error() {
        let m = m1();
        let c = Word::single(Symbol::new("c").unwrap());
        assert_eq!(
            m.accepts(&c),
            Err(GjfaError::ForeignInputSymbol("c".to_owned()))
        );
    }

    #[test]
    fn enumerate_matches_frozen_set() {
        let words = m2().enumerate(4);
        assert_eq!(words, vec![w("a b"), w("a a b b"), w("a b a b")]);
        // Monotone in the bound.
        let more = m2().enumerate(6);
        for x in &words {
            assert!(more.contains(x));
        }
    }

    #[test]
    fn enumerate_agrees_with_search() {
        for m in [m1(), m2()] {
            let enumerated = m.enumerate(6);
            for cand in ab().words_up_to(6) {
                assert_eq!(
                    enumerated.contains(&cand),
                    m.accepts(&cand).unwrap(),
                    "disagree on {cand}"
                );
            }
        }
    }

    #[test]
    fn refutes_with_shortlex_least_word() {
        // m1 rejects the empty word, which is the shortlex minimum.
        assert_eq!(m1().refute_universality(2), Some(Word::empty()));
        // A machine that deletes single symbols in a final start state
        // accepts everything.
        let total = Gjfa::builder(ab())
            .state("q")
            .start("q")
            .final_state("q")
            .rule("q", w("a"), "q")
            .rule("q", w("b"), "q")
            .build()
            .unwrap();
        assert_eq!(total.refute_universality(4), None);
    }

    #[test]
    fn rules_with_empty_labels_terminate() {
        // Label-free rules can cycle through states; the search must not
        // loop on them.
        let m = Gjfa::builder(ab())
            .states(["p", "q", "f"])
            .start("p")
            .final_state("f")
            .rule("p", Word::empty(), "q")
            .rule("q", Word::empty(), "p")
            .rule("q", w("a"), "f")
            .build()
            .unwrap();
        assert!(m.accepts(&w("a")).unwrap());
        assert!(!m.accepts(&w("b")).unwrap());
        assert_eq!(m.enumerate(2), vec![w("a")]);
    }

    #[test]
    fn parse_and_write_round_trip() {
        let text = "\
# toy machine
gjfa
alphabet: a b
states: q0 q1
start: q0
final: q1
rule: q0 q1 a b
rule: q1 q1 _
";
        let m = Gjfa::parse(text).unwrap();
        assert_eq!(m.start_state(), "q0");
        assert_eq!(m.rules().len(), 2);
        assert!(m.rules()[1].label.is_empty());
        let again = Gjfa::parse(&m.to_text()).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn parse_reports_bad_lines() {
        let bad = "gjfa\nalphabet: a\nstates: q\nstart: q\nfinal: q\nrule: q r a\n";
        let err = Gjfa::parse(bad).unwrap_err();
        assert!(err.msg.contains("unknown state"), "{err}");
        let missing = "gjfa\nstates: q\nstart: q\nfinal: q\n";
        assert!(Gjfa::parse(missing).unwrap_err().msg.contains("alphabet"));
    }
}
