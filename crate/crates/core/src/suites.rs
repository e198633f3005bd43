//! Named verification suites. Each suite bundles related cross-checks
//! over the built-in systems, the chain builders, the collapse map, and
//! the grammar-to-machine reduction, and reports one pass/fail line per
//! check. Every check compares two independent routes to the same fact;
//! none of them trusts a precomputed answer.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::crs::{validate_trace, DerivationTrace};
use crate::gjfa::Gjfa;
use crate::gnf::GnfGrammar;
use crate::reduction::ReductionArtifacts;
use crate::systems::{
    absorb_chain, binary_alphabet, binary_word, block_word, builtin_r01, builtin_ruv, in_k,
    period_count, phi, potential, shift_chain, spectrum_certificate, uv_alphabet, BinaryWord,
    UvWord,
};
use crate::word::{Alphabet, Symbol, Word};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0xc1ea12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuiteName {
    Lemma2,
    Lemma3,
    Lemma4,
    Lemma6,
    Cor5,
    Cor7,
    Cor8,
    Spectrum,
    Reduction,
    GjfaCross,
}

impl SuiteName {
    pub const ALL: [SuiteName; 10] = [
        SuiteName::Lemma2,
        SuiteName::Lemma3,
        SuiteName::Lemma4,
        SuiteName::Lemma6,
        SuiteName::Cor5,
        SuiteName::Cor7,
        SuiteName::Cor8,
        SuiteName::Spectrum,
        SuiteName::Reduction,
        SuiteName::GjfaCross,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SuiteName::Lemma2 => "lemma2",
            SuiteName::Lemma3 => "lemma3",
            SuiteName::Lemma4 => "lemma4",
            SuiteName::Lemma6 => "lemma6",
            SuiteName::Cor5 => "cor5",
            SuiteName::Cor7 => "cor7",
            SuiteName::Cor8 => "cor8",
            SuiteName::Spectrum => "spectrum",
            SuiteName::Reduction => "reduction",
            SuiteName::GjfaCross => "gjfa-cross",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("no suite named {0}; known suites: lemma2 lemma3 lemma4 lemma6 cor5 cor7 cor8 spectrum reduction gjfa-cross")]
pub struct UnknownSuite(pub String);

impl FromStr for SuiteName {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.label() == s)
            .ok_or_else(|| UnknownSuite(s.to_owned()))
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl CheckResult {
    fn pass(name: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            counterexample: None,
        }
    }

    fn fail(name: impl Into<String>, counterexample: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            counterexample: Some(counterexample.into()),
        }
    }

    /// Pass unless a counterexample was found.
    fn from_counterexample(name: impl Into<String>, counterexample: Option<String>) -> Self {
        match counterexample {
            None => CheckResult::pass(name),
            Some(c) => CheckResult::fail(name, c),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub checks: Vec<CheckResult>,
    pub wall: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One `PASS`/`FAIL` line per check, then a `#` summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for check in &self.checks {
            if check.passed {
                out.push_str(&format!("PASS {}.{}\n", self.suite, check.name));
            } else {
                out.push_str(&format!("FAIL {}.{}", self.suite, check.name));
                if let Some(c) = &check.counterexample {
                    out.push_str(&format!(" {c}"));
                }
                out.push('\n');
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!(
            "# {}: {}/{} passed in {} ms\n",
            self.suite,
            passed,
            self.checks.len(),
            self.wall.as_millis()
        ));
        out
    }
}

pub fn run_suite(name: SuiteName, seed: u64) -> SuiteReport {
    let begun = Instant::now();
    let checks = match name {
        SuiteName::Lemma2 => lemma2_checks(),
        SuiteName::Lemma3 => lemma3_checks(),
        SuiteName::Lemma4 => lemma4_checks(),
        SuiteName::Lemma6 => lemma6_checks(),
        SuiteName::Cor5 => cor5_checks(),
        SuiteName::Cor7 => cor7_checks(),
        SuiteName::Cor8 => cor8_checks(),
        SuiteName::Spectrum => spectrum_checks(),
        SuiteName::Reduction => reduction_checks(),
        SuiteName::GjfaCross => gjfa_cross_checks(seed),
    };
    SuiteReport {
        suite: name,
        checks,
        wall: begun.elapsed(),
    }
}

pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    SuiteName::ALL
        .into_iter()
        .map(|name| run_suite(name, seed))
        .collect()
}

fn all_u(w: &UvWord) -> bool {
    w.word().symbols().iter().all(|s| s.name() == "u")
}

fn binary(w: &Word) -> BinaryWord {
    BinaryWord::new(w).expect("word over 0/1")
}

// The filter and the collapse map agree: a binary word avoids the four
// forbidden factors exactly when its image carries no V.
fn lemma2_checks() -> Vec<CheckResult> {
    let words = binary_alphabet().words_up_to(12);
    (0..=12)
        .map(|n| {
            let name = format!("len-{n}");
            let counter = words
                .iter()
                .filter(|w| w.len() == n)
                .find(|w| {
                    let bw = binary(w);
                    in_k(&bw) != all_u(&phi(&bw))
                })
                .map(|w| format!("word {w}"));
            CheckResult::from_counterexample(name, counter)
        })
        .collect()
}

fn score(w: &Word) -> u128 {
    potential(&UvWord::new(w).expect("word over u/V")).expect("word is short")
}

fn is_tripling_value(p: u128) -> bool {
    if p == 0 {
        return true;
    }
    if !p.is_multiple_of(2) {
        return false;
    }
    let mut rest = p / 2;
    while rest.is_multiple_of(3) {
        rest /= 3;
    }
    rest == 1
}

// How each rewriting instruction moves the potential.
fn lemma3_checks() -> Vec<CheckResult> {
    let ruv = builtin_ruv();
    let words = uv_alphabet().words_up_to(8);
    let mut checks = Vec::new();

    let seeded = ruv.apply(&Word::empty(), 0, 1).expect("rule 0 seeds");
    checks.push(if score(&Word::empty()) == 0 && score(&seeded) == 2 {
        CheckResult::pass("rule0-potential")
    } else {
        CheckResult::fail("rule0-potential", format!("seed word {seeded}"))
    });

    // index 1 triples the potential, indexes 2 and 3 preserve it.
    for (index, name, factor) in [
        (1usize, "rule1-triples", 3u128),
        (2, "rule2-preserves", 1),
        (3, "rule3-preserves", 1),
    ] {
        let counter = words.iter().find_map(|w| {
            ruv.applicable(w)
                .into_iter()
                .filter(|&(i, _)| i == index)
                .find_map(|(i, pos)| {
                    let next = ruv.apply(w, i, pos).expect("applicable pair");
                    (score(&next) != factor * score(w))
                        .then(|| format!("word {w} at position {pos}"))
                })
        });
        checks.push(CheckResult::from_counterexample(name, counter));
    }

    let counter = (0..=20).find_map(|n| {
        let run = Word::new(vec![
            uv_alphabet().get("u").expect("fixed alphabet").clone();
            n
        ]);
        (score(&run) != n as u128).then(|| format!("length {n}"))
    });
    checks.push(CheckResult::from_counterexample(
        "allu-potential-is-length",
        counter,
    ));

    // Every reachable word scores 0 or twice a power of three.
    let counter = ruv
        .forward_closure(&Word::empty(), 20)
        .into_iter()
        .find(|w| !is_tripling_value(score(w)))
        .map(|w| format!("word {w} scores {}", score(&w)));
    checks.push(CheckResult::from_counterexample("spectrum-up-to-20", counter));

    checks
}

// Growing a binary word by one deletion-inverse step moves its collapse
// image by exactly one step of the companion system.
fn lemma4_checks() -> Vec<CheckResult> {
    let r01 = builtin_r01();
    let ruv = builtin_ruv();
    let words = binary_alphabet().words_up_to(10);
    (0..=10)
        .map(|n| {
            let name = format!("len-{n}");
            let counter = words
                .iter()
                .filter(|w| w.len() == n)
                .find_map(|w| {
                    let image = phi(&binary(w));
                    r01.produce_step(w)
                        .expect("word over 0/1")
                        .into_iter()
                        .find_map(|v| {
                            let target = phi(&binary(&v));
                            let hit = ruv.applicable(image.word()).into_iter().any(|(i, pos)| {
                                ruv.apply(image.word(), i, pos).expect("applicable pair")
                                    == *target.word()
                            });
                            (!hit).then(|| format!("{w} grows to {v}"))
                        })
                })
                .map(|c| format!("no matching step: {c}"));
            CheckResult::from_counterexample(name, counter)
        })
        .collect()
}

fn validated(
    name: String,
    trace: &DerivationTrace,
    steps: usize,
    start: &Word,
    end: &Word,
) -> CheckResult {
    let r01 = builtin_r01();
    if let Err(e) = validate_trace(r01.system(), trace) {
        return CheckResult::fail(name, format!("replay: {e}"));
    }
    if trace.steps.len() != steps {
        return CheckResult::fail(
            name,
            format!("expected {steps} steps, found {}", trace.steps.len()),
        );
    }
    if trace.start != *start {
        return CheckResult::fail(name, format!("starts at {}", trace.start));
    }
    if trace.end() != end {
        return CheckResult::fail(name, format!("ends at {}", trace.end()));
    }
    CheckResult::pass(name)
}

// The sixteen-step shift replays for every small parameter pair.
fn lemma6_checks() -> Vec<CheckResult> {
    let mut checks = Vec::new();
    for alpha in 1..=3 {
        for beta in 1..=3 {
            let name = format!("chain-a{alpha}-b{beta}");
            match shift_chain(alpha, beta) {
                Ok(chain) => checks.push(validated(
                    name,
                    &chain,
                    16,
                    &block_word(alpha, "1000", beta),
                    &block_word(alpha + 9, "1000", beta - 1),
                )),
                Err(e) => checks.push(CheckResult::fail(name, e.to_string())),
            }
        }
    }
    checks
}

// Absorbing all trailing blocks is just the shift iterated.
fn cor5_checks() -> Vec<CheckResult> {
    (1..=3)
        .map(|beta| {
            let chain = absorb_chain(beta);
            validated(
                format!("beta-{beta}"),
                &chain,
                16 * beta,
                &block_word(0, "1000", beta),
                &block_word(9 * beta, "1000", 0),
            )
        })
        .collect()
}

// Certificates replay end to end; small endpoints are re-confirmed by
// the membership search, which knows nothing about the construction.
fn cor7_checks() -> Vec<CheckResult> {
    let r01 = builtin_r01();
    let mut checks = Vec::new();
    for level in 0..=2 {
        let name = format!("certificate-k{level}");
        match spectrum_certificate(level) {
            Ok(cert) => {
                let periods = period_count(level).expect("small level") as usize;
                checks.push(validated(
                    name,
                    &cert,
                    9usize.pow(level as u32),
                    &Word::empty(),
                    &block_word(periods, "", 0),
                ));
            }
            Err(e) => checks.push(CheckResult::fail(name, e.to_string())),
        }
    }
    for level in 0..=1 {
        let name = format!("confirm-k{level}");
        let member = spectrum_certificate(level)
            .expect("small level")
            .end()
            .clone();
        let counter = match r01.reduce_to_empty(&member) {
            Ok(Some(trace)) => validate_trace(r01.system(), &trace)
                .err()
                .map(|e| format!("replay: {e}")),
            Ok(None) => Some(format!("search rejects {member}")),
            Err(e) => Some(e.to_string()),
        };
        checks.push(CheckResult::from_counterexample(name, counter));
    }
    checks
}

// Generated language cut at 18, filtered: the three expected members
// are present and nothing of another length sneaks in.
fn cor8_checks() -> Vec<CheckResult> {
    let r01 = builtin_r01();
    let filtered: Vec<Word> = r01
        .generate(18)
        .into_iter()
        .filter(|w| !w.is_empty() && in_k(&binary(w)))
        .collect();
    let mut checks = Vec::new();
    for (name, expected) in [
        ("witness-2", binary_word("00")),
        ("witness-6", binary_word("100110")),
        ("witness-18", block_word(4, "", 0)),
    ] {
        checks.push(if filtered.contains(&expected) {
            CheckResult::pass(name)
        } else {
            CheckResult::fail(name, format!("missing {expected}"))
        });
    }
    let lengths: BTreeSet<usize> = filtered.iter().map(Word::len).collect();
    checks.push(if lengths == BTreeSet::from([2, 6, 18]) {
        CheckResult::pass("length-set")
    } else {
        CheckResult::fail("length-set", format!("lengths {lengths:?}"))
    });
    checks
}

// The companion system's reachable all-u words stop at the same three
// lengths, computed by forward closure alone.
fn spectrum_checks() -> Vec<CheckResult> {
    let ruv = builtin_ruv();
    let closure = ruv.forward_closure(&Word::empty(), 20);
    let u = uv_alphabet().get("u").expect("fixed alphabet").clone();
    let mut checks = Vec::new();
    for (name, n) in [("witness-2", 2), ("witness-6", 6), ("witness-18", 18)] {
        let run = Word::new(vec![u.clone(); n]);
        checks.push(if closure.contains(&run) {
            CheckResult::pass(name)
        } else {
            CheckResult::fail(name, format!("missing {run}"))
        });
    }
    let lengths: BTreeSet<usize> = closure
        .iter()
        .filter(|w| !w.is_empty() && w.symbols().iter().all(|s| *s == u))
        .map(Word::len)
        .collect();
    checks.push(if lengths == BTreeSet::from([2, 6, 18]) {
        CheckResult::pass("length-set")
    } else {
        CheckResult::fail("length-set", format!("lengths {lengths:?}"))
    });
    checks
}

const G_A_SOURCE: &str = "\
gnf
terminals: a
nonterminals: S
start: S
rule: S -> a S
rule: S -> a
";

const G_AB_SOURCE: &str = "\
gnf
terminals: a b
nonterminals: S B
start: S
rule: S -> a B
rule: B -> b
";

fn fixture(source: &str) -> ReductionArtifacts {
    let grammar = GnfGrammar::parse(source).expect("fixture parses");
    ReductionArtifacts::build(&grammar).expect("fixture reduces")
}

fn accepts(arts: &ReductionArtifacts, w: &Word) -> bool {
    arts.machine().accepts(w).expect("word over gamma")
}

// Any word showing a pair the perfect interleaving never shows is
// accepted.
fn gap_factor_counter(arts: &ReductionArtifacts) -> Option<String> {
    let gap_free: HashSet<&Word> = arts.p_c().iter().collect();
    arts.gamma()
        .words_up_to(5)
        .into_iter()
        .filter(|w| {
            w.symbols().windows(2).any(|pair| {
                let pair = Word::new(pair.to_vec());
                !gap_free.contains(&pair)
            })
        })
        .find(|w| !accepts(arts, w))
        .map(|w| format!("rejected {w}"))
}

// Factors of perfect interleavings that start on a marker or end on a
// nonterminal are accepted.
fn edge_symbol_counter(arts: &ReductionArtifacts) -> Option<String> {
    let terminals = arts.grammar().terminals();
    let nonterminals = arts.grammar().nonterminals();
    let markers: HashSet<&str> = arts.markers().iter().map(Symbol::name).collect();
    let mut factors: BTreeSet<Word> = BTreeSet::new();
    for v in terminals.words_up_to(3) {
        if v.len() != 3 {
            continue;
        }
        let encoded = arts.interleave(&v).expect("terminal word");
        let symbols = encoded.symbols();
        for i in 0..symbols.len() {
            for j in i + 1..=symbols.len().min(i + 6) {
                factors.insert(Word::new(symbols[i..j].to_vec()));
            }
        }
    }
    factors
        .into_iter()
        .filter(|f| {
            let first = f.symbols().first().expect("factor is non-empty");
            let last = f.symbols().last().expect("factor is non-empty");
            markers.contains(first.name()) || nonterminals.contains(last)
        })
        .find(|f| !accepts(arts, f))
        .map(|f| format!("rejected {f}"))
}

fn derivable_words(arts: &ReductionArtifacts, maxlen: usize) -> Vec<Word> {
    arts.grammar()
        .terminals()
        .words_up_to(maxlen)
        .into_iter()
        .filter(|v| !v.is_empty() && arts.grammar().derives(v).expect("terminal word"))
        .collect()
}

fn derivation_accept_counter(arts: &ReductionArtifacts) -> Option<String> {
    derivable_words(arts, 3).into_iter().find_map(|v| {
        let annotated = arts.annotated_derivation(&v).expect("derivable");
        let last = annotated.last().expect("starts non-empty").clone();
        (!accepts(arts, &last)).then(|| format!("rejected {last}"))
    })
}

fn wd_clears_counter(arts: &ReductionArtifacts) -> Option<String> {
    derivable_words(arts, 3).into_iter().find_map(|v| {
        let annotated = arts.annotated_derivation(&v).expect("derivable");
        let last = annotated.last().expect("starts non-empty").clone();
        (!arts.derivation_word_clears(&last)).then(|| format!("does not clear: {last}"))
    })
}

// An accepted encoding always belongs to a derivable word. Only an
// implication: this machine rejects even the encodings of derivable
// words, so acceptance of an encoding is strong evidence, not the
// decision procedure.
fn reverse_direction_counter(arts: &ReductionArtifacts, maxlen: usize) -> Option<String> {
    arts.grammar()
        .terminals()
        .words_up_to(maxlen)
        .into_iter()
        .filter(|v| !v.is_empty())
        .find_map(|v| {
            let encoded = arts.interleave(&v).expect("terminal word");
            let accepted = accepts(arts, &encoded);
            let derived = arts.grammar().derives(&v).expect("terminal word");
            (accepted && !derived)
                .then(|| format!("accepted the encoding of underivable {v}"))
        })
}

fn reduction_checks() -> Vec<CheckResult> {
    let ga = fixture(G_A_SOURCE);
    let gab = fixture(G_AB_SOURCE);
    let mut checks = Vec::new();
    for (tag, arts) in [("ga", &ga), ("gab", &gab)] {
        checks.push(CheckResult::from_counterexample(
            format!("gap-factor-{tag}"),
            gap_factor_counter(arts),
        ));
    }
    for (tag, arts) in [("ga", &ga), ("gab", &gab)] {
        checks.push(CheckResult::from_counterexample(
            format!("edge-symbol-{tag}"),
            edge_symbol_counter(arts),
        ));
    }
    for (tag, arts) in [("ga", &ga), ("gab", &gab)] {
        checks.push(CheckResult::from_counterexample(
            format!("derivation-accept-{tag}"),
            derivation_accept_counter(arts),
        ));
    }
    for (tag, arts) in [("ga", &ga), ("gab", &gab)] {
        checks.push(CheckResult::from_counterexample(
            format!("wd-clears-{tag}"),
            wd_clears_counter(arts),
        ));
    }
    for (tag, arts, maxlen) in [("ga", &ga, 3), ("gab", &gab, 2)] {
        checks.push(CheckResult::from_counterexample(
            format!("reverse-direction-{tag}"),
            reverse_direction_counter(arts, maxlen),
        ));
    }
    checks.push(match gab.machine().refute_universality(2) {
        Some(_) => CheckResult::pass("not-universal-gab"),
        None => CheckResult::fail(
            "not-universal-gab",
            "no rejected word up to length 2".to_owned(),
        ),
    });
    checks
}

fn random_machine(rng: &mut ChaCha8Rng) -> Gjfa {
    let alphabet = Alphabet::from_names(&["a", "b"]).expect("fixed alphabet");
    let state_count = rng.random_range(1..=3usize);
    let names: Vec<String> = (0..state_count).map(|i| format!("s{i}")).collect();
    let mut builder = Gjfa::builder(alphabet.clone());
    for name in &names {
        builder = builder.state(name);
    }
    builder = builder.start(&names[rng.random_range(0..state_count)]);
    for name in &names {
        if rng.random_bool(0.5) {
            builder = builder.final_state(name);
        }
    }
    for _ in 0..rng.random_range(0..=4usize) {
        let from = rng.random_range(0..state_count);
        let to = rng.random_range(0..state_count);
        let label: Vec<Symbol> = (0..rng.random_range(0..=2usize))
            .map(|_| alphabet.symbols()[rng.random_range(0..2)].clone())
            .collect();
        builder = builder.rule(&names[from], Word::new(label), &names[to]);
    }
    builder.build().expect("random machine is well formed")
}

// The membership search and the backwards enumeration must agree on
// every random machine.
fn gjfa_cross_checks(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let machines: Vec<Gjfa> = (0..250).map(|_| random_machine(&mut rng)).collect();
    let mut checks = Vec::new();
    for batch in 0..5 {
        let name = format!("batch-{batch}");
        let counter = machines[batch * 50..(batch + 1) * 50]
            .iter()
            .enumerate()
            .find_map(|(offset, machine)| {
                let index = batch * 50 + offset;
                let enumerated = machine.enumerate(6);
                let searched: Vec<Word> = machine
                    .alphabet()
                    .words_up_to(6)
                    .into_iter()
                    .filter(|w| machine.accepts(w).expect("word over own alphabet"))
                    .collect();
                if enumerated == searched {
                    return None;
                }
                let listed: HashSet<&Word> = enumerated.iter().collect();
                let found: HashSet<&Word> = searched.iter().collect();
                let witness = found
                    .symmetric_difference(&listed)
                    .next()
                    .expect("sets differ");
                Some(format!("machine {index} disagrees on {witness}"))
            });
        checks.push(CheckResult::from_counterexample(name, counter));
    }

    // Label-free rules may loop through states; the search still ends.
    let alphabet = Alphabet::from_names(&["a", "b"]).expect("fixed alphabet");
    let looper = Gjfa::builder(alphabet)
        .states(["s0", "s1"])
        .start("s0")
        .final_state("s1")
        .rule("s0", Word::empty(), "s0")
        .rule("s0", Word::empty(), "s1")
        .rule("s1", Word::empty(), "s0")
        .build()
        .expect("looper is well formed");
    let a = Word::single(looper.alphabet().symbols()[0].clone());
    let ok = looper.accepts(&Word::empty()).expect("empty word")
        && !looper.accepts(&a).expect("word over own alphabet");
    checks.push(if ok {
        CheckResult::pass("epsilon-rules-terminate")
    } else {
        CheckResult::fail("epsilon-rules-terminate", "looper misjudged a word".to_owned())
    });

    let counter = machines[..50].iter().enumerate().find_map(|(index, m)| {
        let narrow: HashSet<Word> = m.enumerate(5).into_iter().collect();
        let wide: HashSet<Word> = m.enumerate(6).into_iter().collect();
        (!narrow.is_subset(&wide)).then(|| format!("machine {index} loses words at 6"))
    });
    checks.push(CheckResult::from_counterexample("enumerate-monotone", counter));

    checks
}
