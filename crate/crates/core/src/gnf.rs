//! Grammars whose rules all have the shape `A -> x B1..Bn`: one terminal
//! followed by zero or more nonterminals. Every derivation of a word of
//! length d takes exactly d rule applications, which keeps membership
//! search finite without extra bookkeeping.

use std::collections::HashSet;

use thiserror::Error;

use crate::text::{content_lines, ParseError};
use crate::word::{Alphabet, Symbol, Word};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GnfError {
    #[error("terminal and nonterminal alphabets share {0}")]
    OverlappingAlphabets(String),
    #[error("terminal alphabet is empty")]
    NoTerminals,
    #[error("nonterminal alphabet is empty")]
    NoNonterminals,
    #[error("start symbol {0} is not a nonterminal")]
    BadStart(String),
    #[error("rule {index}: unknown symbol {symbol}")]
    UnknownSymbol { index: usize, symbol: String },
    #[error("grammar has no rules")]
    EmptyRuleSet,
    #[error("rule {index}: left side {lhs} is not a nonterminal")]
    LhsNotNonterminal { index: usize, lhs: String },
    #[error("rule {index}: right side is empty")]
    EmptyRhs { index: usize },
    #[error("rule {index}: right side must start with a terminal, found {found}")]
    RhsHeadNotTerminal { index: usize, found: String },
    #[error("rule {index}: right side tail must be nonterminals, found {found}")]
    RhsTailNotNonterminal { index: usize, found: String },
    #[error("input word uses symbol {0} outside the terminal alphabet")]
    ForeignInputSymbol(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnfRule {
    pub lhs: Symbol,
    pub rhs: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnfGrammar {
    terminals: Alphabet,
    nonterminals: Alphabet,
    start: Symbol,
    rules: Vec<GnfRule>,
}

impl GnfGrammar {
    /// Wires the grammar up and checks that every mentioned symbol is
    /// declared. Shape violations (rules that are not in the one-terminal-
    /// head form) are reported by [`GnfGrammar::validate`] instead, so a
    /// malformed grammar can still be constructed and inspected.
    pub fn new(
        terminals: Alphabet,
        nonterminals: Alphabet,
        start: Symbol,
        rules: Vec<GnfRule>,
    ) -> Result<Self, GnfError> {
        if terminals.is_empty() {
            return Err(GnfError::NoTerminals);
        }
        if nonterminals.is_empty() {
            return Err(GnfError::NoNonterminals);
        }
        for s in terminals.symbols() {
            if nonterminals.contains(s) {
                return Err(GnfError::OverlappingAlphabets(s.name().to_owned()));
            }
        }
        if !nonterminals.contains(&start) {
            return Err(GnfError::BadStart(start.name().to_owned()));
        }
        for (index, rule) in rules.iter().enumerate() {
            let known = |s: &Symbol| terminals.contains(s) || nonterminals.contains(s);
            if !known(&rule.lhs) {
                return Err(GnfError::UnknownSymbol {
                    index,
                    symbol: rule.lhs.name().to_owned(),
                });
            }
            if let Some(s) = rule.rhs.symbols().iter().find(|s| !known(s)) {
                return Err(GnfError::UnknownSymbol {
                    index,
                    symbol: s.name().to_owned(),
                });
            }
        }
        Ok(GnfGrammar {
            terminals,
            nonterminals,
            start,
            rules,
        })
    }

    pub fn terminals(&self) -> &Alphabet {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &Alphabet {
        &self.nonterminals
    }

    pub fn start(&self) -> &Symbol {
        &self.start
    }

    pub fn rules(&self) -> &[GnfRule] {
        &self.rules
    }

    /// Checks the rule shape, reporting the first violated rule.
    pub fn validate(&self) -> Result<(), GnfError> {
        if self.rules.is_empty() {
            return Err(GnfError::EmptyRuleSet);
        }
        for (index, rule) in self.rules.iter().enumerate() {
            if !self.nonterminals.contains(&rule.lhs) {
                return Err(GnfError::LhsNotNonterminal {
                    index,
                    lhs: rule.lhs.name().to_owned(),
                });
            }
            let symbols = rule.rhs.symbols();
            let Some(head) = symbols.first() else {
                return Err(GnfError::EmptyRhs { index });
            };
            if !self.terminals.contains(head) {
                return Err(GnfError::RhsHeadNotTerminal {
                    index,
                    found: head.name().to_owned(),
                });
            }
            if let Some(s) = symbols[1..].iter().find(|s| !self.nonterminals.contains(s)) {
                return Err(GnfError::RhsTailNotNonterminal {
                    index,
                    found: s.name().to_owned(),
                });
            }
        }
        Ok(())
    }

    fn check_input(&self, w: &Word) -> Result<(), GnfError> {
        match self.terminals.foreign_symbol(w) {
            Some(s) => Err(GnfError::ForeignInputSymbol(s.name().to_owned())),
            None => Ok(()),
        }
    }

    /// Whether the grammar derives `w`. The empty word is never derivable.
    pub fn derives(&self, w: &Word) -> Result<bool, GnfError> {
        self.validate()?;
        self.check_input(w)?;
        let mut failed: HashSet<(usize, Vec<Symbol>)> = HashSet::new();
        Ok(self.reachable(w, 0, &mut vec![self.start.clone()], &mut failed))
    }

    // Pure reachability over (input position, pending nonterminal stack)
    // configurations. The stack top is the last element. Since every rule
    // consumes one input symbol, a stack deeper than the remaining input
    // can never empty in time.
    fn reachable(
        &self,
        w: &Word,
        pos: usize,
        stack: &mut Vec<Symbol>,
        failed: &mut HashSet<(usize, Vec<Symbol>)>,
    ) -> bool {
        let remaining = w.len() - pos;
        if remaining == 0 {
            return stack.is_empty();
        }
        if stack.is_empty() || stack.len() > remaining {
            return false;
        }
        if failed.contains(&(pos, stack.clone())) {
            return false;
        }
        let top = stack.last().cloned().expect("nonempty");
        let next_input = &w.symbols()[pos];
        for rule in &self.rules {
            if rule.lhs != top || rule.rhs.symbols()[0] != *next_input {
                continue;
            }
            stack.pop();
            for s in rule.rhs.symbols()[1..].iter().rev() {
                stack.push(s.clone());
            }
            let ok = self.reachable(w, pos + 1, stack, failed);
            for _ in 1..rule.rhs.len() {
                stack.pop();
            }
            stack.push(top.clone());
            if ok {
                return true;
            }
        }
        failed.insert((pos, stack.clone()));
        false
    }

    /// Rule indices of the leftmost derivation of `w` that is
    /// lexicographically least by rule index, or `None` when `w` is not
    /// derivable. The sequence always has exactly `w.len()` entries.
    pub fn leftmost_derivation(&self, w: &Word) -> Result<Option<Vec<usize>>, GnfError> {
        self.validate()?;
        self.check_input(w)?;
        let mut failed: HashSet<(usize, Vec<Symbol>)> = HashSet::new();
        let mut path = Vec::new();
        if self.derive_path(w, 0, &mut vec![self.start.clone()], &mut path, &mut failed) {
            Ok(Some(path))
        } else {
            Ok(None)
        }
    }

    fn derive_path(
        &self,
        w: &Word,
        pos: usize,
        stack: &mut Vec<Symbol>,
        path: &mut Vec<usize>,
        failed: &mut HashSet<(usize, Vec<Symbol>)>,
    ) -> bool {
        let remaining = w.len() - pos;
        if remaining == 0 {
            return stack.is_empty();
        }
        if stack.is_empty() || stack.len() > remaining {
            return false;
        }
        if failed.contains(&(pos, stack.clone())) {
            return false;
        }
        let top = stack.last().cloned().expect("nonempty");
        let next_input = &w.symbols()[pos];
        for (ri, rule) in self.rules.iter().enumerate() {
            if rule.lhs != top || rule.rhs.symbols()[0] != *next_input {
                continue;
            }
            stack.pop();
            for s in rule.rhs.symbols()[1..].iter().rev() {
                stack.push(s.clone());
            }
            path.push(ri);
            let ok = self.derive_path(w, pos + 1, stack, path, failed);
            if ok {
                return true;
            }
            path.pop();
            for _ in 1..rule.rhs.len() {
                stack.pop();
            }
            stack.push(top.clone());
        }
        failed.insert((pos, stack.clone()));
        false
    }

    /// Reads the `gnf` text format:
    ///
    /// ```text
    /// gnf
    /// terminals: a b
    /// nonterminals: S B
    /// start: S
    /// rule: S -> a B
    /// rule: B -> b
    /// ```
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let lines = content_lines(text);
        let mut iter = lines.iter();
        match iter.next() {
            Some((_, tokens)) if tokens[..] == ["gnf"] => {}
            Some((n, _)) => return Err(ParseError::new(*n, "expected header line 'gnf'")),
            None => return Err(ParseError::new(1, "empty description")),
        }
        let mut terminals: Option<Alphabet> = None;
        let mut nonterminals: Option<Alphabet> = None;
        let mut start: Option<String> = None;
        let mut rule_lines: Vec<(usize, Vec<&str>)> = Vec::new();
        for (n, tokens) in iter {
            let (n, key, rest) = (*n, tokens[0], &tokens[1..]);
            match key {
                "terminals:" => {
                    if terminals.is_some() {
                        return Err(ParseError::new(n, "duplicate terminals line"));
                    }
                    terminals = Some(
                        Alphabet::from_names(rest)
                            .map_err(|e| ParseError::new(n, e.to_string()))?,
                    );
                }
                "nonterminals:" => {
                    if nonterminals.is_some() {
                        return Err(ParseError::new(n, "duplicate nonterminals line"));
                    }
                    nonterminals = Some(
                        Alphabet::from_names(rest)
                            .map_err(|e| ParseError::new(n, e.to_string()))?,
                    );
                }
                "start:" => {
                    if start.is_some() {
                        return Err(ParseError::new(n, "duplicate start line"));
                    }
                    match rest {
                        [name] => start = Some(name.to_string()),
                        _ => return Err(ParseError::new(n, "start takes exactly one symbol")),
                    }
                }
                "rule:" => rule_lines.push((n, rest.to_vec())),
                other => {
                    return Err(ParseError::new(n, format!("unexpected line {other:?}")));
                }
            }
        }
        let terminals =
            terminals.ok_or_else(|| ParseError::new(1, "missing terminals line"))?;
        let nonterminals =
            nonterminals.ok_or_else(|| ParseError::new(1, "missing nonterminals line"))?;
        let start_name = start.ok_or_else(|| ParseError::new(1, "missing start line"))?;
        let start = nonterminals
            .get(&start_name)
            .or_else(|| terminals.get(&start_name))
            .cloned()
            .ok_or_else(|| ParseError::new(1, format!("start symbol {start_name} undeclared")))?;
        if let Some(s) = terminals
            .symbols()
            .iter()
            .find(|s| nonterminals.contains(s))
        {
            let cause = GnfError::OverlappingAlphabets(s.name().to_owned());
            return Err(ParseError::new(1, cause.to_string()));
        }
        let everything = {
            let mut all = terminals.symbols().to_vec();
            all.extend(nonterminals.symbols().iter().cloned());
            Alphabet::new(all).map_err(|e| ParseError::new(1, e.to_string()))?
        };
        let mut rules = Vec::with_capacity(rule_lines.len());
        for (n, tokens) in rule_lines {
            let arrow = tokens.iter().position(|t| *t == "->");
            let (lhs_tokens, rhs_tokens) = match arrow {
                Some(i) => (&tokens[..i], &tokens[i + 1..]),
                None => return Err(ParseError::new(n, "rule takes: lhs -> rhs-symbols")),
            };
            let [lhs_name] = lhs_tokens else {
                return Err(ParseError::new(n, "rule left side must be one symbol"));
            };
            let lhs = everything
                .get(lhs_name)
                .cloned()
                .ok_or_else(|| ParseError::new(n, format!("unknown symbol {lhs_name}")))?;
            if rhs_tokens.is_empty() {
                return Err(ParseError::new(n, "rule right side is missing (use _ )"));
            }
            let rhs = everything
                .word_from_tokens(rhs_tokens)
                .map_err(|e| ParseError::new(n, e.to_string()))?;
            rules.push(GnfRule { lhs, rhs });
        }
        GnfGrammar::new(terminals, nonterminals, start, rules)
            .map_err(|e| ParseError::new(1, e.to_string()))
    }
}
