//! Acceptance gate. One test per criterion, each printing a single
//! `PASS criterion-N` line (run with `-- --nocapture` to see them) and
//! holding the stated wall-clock bound. Every expected value here is
//! recomputed from the library's primitives, never read back from the
//! component under test.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clearjump::crs::validate_trace;
use clearjump::gnf::GnfGrammar;
use clearjump::reduction::ReductionArtifacts;
use clearjump::systems::{
    binary_alphabet, binary_word, block_word, builtin_r01, builtin_ruv, in_k, period_count, phi,
    potential, shift_chain, spectrum_certificate, uv_alphabet, BinaryWord, UvWord,
};
use clearjump::word::{Alphabet, Symbol, Word};
use clearjump::Gjfa;

fn report(criterion: usize, begun: Instant, bound: Duration, detail: &str) {
    let wall = begun.elapsed();
    println!(
        "PASS criterion-{criterion} ({} ms): {detail}",
        wall.as_millis()
    );
    assert!(
        wall < bound,
        "criterion-{criterion} took {} ms, bound is {} ms",
        wall.as_millis(),
        bound.as_millis()
    );
}

fn over_binary(w: &Word) -> BinaryWord {
    BinaryWord::new(w).expect("word over 0/1")
}

fn score(w: &Word) -> u128 {
    potential(&UvWord::new(w).expect("word over u/V")).expect("word is short")
}

// Generating the first system's language up to length 18 and filtering
// by the forbidden factors leaves exactly the three expected members.
#[test]
fn criterion_1_filtered_generation() {
    let begun = Instant::now();
    let r01 = builtin_r01();
    let filtered: Vec<Word> = r01
        .generate(18)
        .into_iter()
        .filter(|w| !w.is_empty() && in_k(&over_binary(w)))
        .collect();
    for expected in [binary_word("00"), binary_word("100110"), block_word(4, "", 0)] {
        assert!(filtered.contains(&expected), "missing {expected}");
    }
    let lengths: BTreeSet<usize> = filtered.iter().map(Word::len).collect();
    assert_eq!(lengths, BTreeSet::from([2, 6, 18]));
    report(
        1,
        begun,
        Duration::from_secs(30),
        "filtered lengths are exactly {2, 6, 18}",
    );
}

// Every small shift chain replays as sixteen production steps between
// the stated block words.
#[test]
fn criterion_2_shift_chains() {
    let begun = Instant::now();
    let r01 = builtin_r01();
    for alpha in 1..=3 {
        for beta in 1..=3 {
            let chain = shift_chain(alpha, beta).expect("beta is positive");
            validate_trace(r01.system(), &chain).expect("chain replays");
            assert_eq!(chain.steps.len(), 16, "alpha={alpha} beta={beta}");
            assert_eq!(chain.start, block_word(alpha, "1000", beta));
            assert_eq!(*chain.end(), block_word(alpha + 9, "1000", beta - 1));
        }
    }
    report(
        2,
        begun,
        Duration::from_secs(1),
        "nine chains of sixteen steps replay",
    );
}

// Certificates for the first three levels replay step by step, and the
// small endpoints are re-accepted by the membership search, which
// knows nothing about how the certificate was assembled.
#[test]
fn criterion_3_certificates() {
    let begun = Instant::now();
    let r01 = builtin_r01();
    for level in 0..=2 {
        let cert = spectrum_certificate(level).expect("level within range");
        validate_trace(r01.system(), &cert).expect("certificate replays");
        assert_eq!(cert.steps.len(), 9usize.pow(level as u32));
        assert_eq!(cert.start, Word::empty());
        let periods = period_count(level).expect("level within range") as usize;
        assert_eq!(*cert.end(), block_word(periods, "", 0));
    }
    for level in 0..=1 {
        let member = spectrum_certificate(level).expect("level within range");
        let trace = r01
            .reduce_to_empty(member.end())
            .expect("word over 0/1")
            .expect("endpoint is a member");
        validate_trace(r01.system(), &trace).expect("search trace replays");
    }
    report(
        3,
        begun,
        Duration::from_secs(30),
        "levels 0..=2 replay, levels 0..=1 re-confirmed by search",
    );
}

// One growth step of the binary system always projects to one step of
// the companion system, exhaustively up to length 10.
#[test]
fn criterion_4_projection_tracks_growth() {
    let begun = Instant::now();
    let r01 = builtin_r01();
    let ruv = builtin_ruv();
    for u in binary_alphabet().words_up_to(10) {
        let image = phi(&over_binary(&u));
        for v in r01.produce_step(&u).expect("word over 0/1") {
            let target = phi(&over_binary(&v));
            let hit = ruv.applicable(image.word()).into_iter().any(|(i, pos)| {
                ruv.apply(image.word(), i, pos).expect("applicable pair") == *target.word()
            });
            assert!(hit, "{u} grows to {v} but {image:?} cannot reach {target:?}");
        }
    }
    report(
        4,
        begun,
        Duration::from_secs(30),
        "all growth steps up to length 10 project to companion steps",
    );
}

// The potential seeds at 2, is tripled by the duplication instruction,
// is preserved by the two shuffles, and so takes only values 0 and
// twice a power of three on the reachable set.
#[test]
fn criterion_5_potential_rules() {
    let begun = Instant::now();
    let ruv = builtin_ruv();
    let seeded = ruv.apply(&Word::empty(), 0, 1).expect("rule 0 seeds");
    assert_eq!(score(&Word::empty()), 0);
    assert_eq!(score(&seeded), 2);
    for w in uv_alphabet().words_up_to(8) {
        for (i, pos) in ruv.applicable(&w) {
            if i == 0 {
                continue;
            }
            let next = ruv.apply(&w, i, pos).expect("applicable pair");
            let factor = if i == 1 { 3 } else { 1 };
            assert_eq!(score(&next), factor * score(&w), "{w} via {i} at {pos}");
        }
    }
    let u = uv_alphabet().get("u").expect("fixed alphabet").clone();
    let mut lengths = BTreeSet::new();
    for w in ruv.forward_closure(&Word::empty(), 20) {
        let p = score(&w);
        if p != 0 {
            assert!(p.is_multiple_of(2), "{w} scores {p}");
            let mut rest = p / 2;
            while rest.is_multiple_of(3) {
                rest /= 3;
            }
            assert_eq!(rest, 1, "{w} scores {p}");
        }
        if !w.is_empty() && w.symbols().iter().all(|s| *s == u) {
            lengths.insert(w.len());
        }
    }
    assert!(
        lengths.is_subset(&BTreeSet::from([2, 6, 18])),
        "plain run lengths {lengths:?}"
    );
    report(
        5,
        begun,
        Duration::from_secs(10),
        "potential moves as stated; plain runs stay within {2, 6, 18}",
    );
}

// The factor filter and the collapse map agree on every binary word up
// to length 12.
#[test]
fn criterion_6_filter_matches_collapse() {
    let begun = Instant::now();
    for w in binary_alphabet().words_up_to(12) {
        let bw = over_binary(&w);
        let plain = phi(&bw).word().symbols().iter().all(|s| s.name() == "u");
        assert_eq!(in_k(&bw), plain, "word {w}");
    }
    report(
        6,
        begun,
        Duration::from_secs(10),
        "filter and collapse agree up to length 12",
    );
}

// The forward membership search and the backwards enumeration agree on
// 250 seeded random machines for every word up to length 6.
#[test]
fn criterion_7_search_vs_enumeration() {
    let begun = Instant::now();
    let alphabet = Alphabet::from_names(&["a", "b"]).expect("fixed alphabet");
    let mut rng = ChaCha8Rng::seed_from_u64(clearjump::DEFAULT_SEED);
    for index in 0..250 {
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
        let machine = builder.build().expect("random machine is well formed");
        let enumerated = machine.enumerate(6);
        let searched: Vec<Word> = alphabet
            .words_up_to(6)
            .into_iter()
            .filter(|w| machine.accepts(w).expect("word over own alphabet"))
            .collect();
        assert_eq!(enumerated, searched, "machine {index}");
    }
    report(
        7,
        begun,
        Duration::from_secs(30),
        "250 machines agree up to length 6",
    );
}

// The grammar-to-machine reduction behaves as designed on the two
// fixture grammars: words with a gap pair or a bad edge symbol are
// accepted outright, annotated derivation words are accepted, and an
// accepted perfect encoding always belongs to a derivable word.
#[test]
fn criterion_8_reduction_behaviour() {
    let begun = Instant::now();
    let g_a = GnfGrammar::parse(
        "gnf\nterminals: a\nnonterminals: S\nstart: S\nrule: S -> a S\nrule: S -> a\n",
    )
    .expect("fixture parses");
    let g_ab = GnfGrammar::parse(
        "gnf\nterminals: a b\nnonterminals: S B\nstart: S\nrule: S -> a B\nrule: B -> b\n",
    )
    .expect("fixture parses");
    for (grammar, encode_up_to) in [(&g_a, 3usize), (&g_ab, 2)] {
        let arts = ReductionArtifacts::build(grammar).expect("fixture reduces");
        let machine = arts.machine();
        let accepts = |w: &Word| machine.accepts(w).expect("word over gamma");

        let perfect: std::collections::HashSet<&Word> = arts.p_c().iter().collect();
        for w in arts.gamma().words_up_to(5) {
            let gap = w.symbols().windows(2).any(|pair| {
                let pair = Word::new(pair.to_vec());
                !perfect.contains(&pair)
            });
            if gap {
                assert!(accepts(&w), "gap word {w} rejected");
            }
        }

        let markers: Vec<&str> = arts.markers().iter().map(Symbol::name).collect();
        let mut factors: BTreeSet<Word> = BTreeSet::new();
        for v in grammar.terminals().words_up_to(3) {
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
        for f in factors {
            let first = f.symbols().first().expect("factor is non-empty");
            let last = f.symbols().last().expect("factor is non-empty");
            if markers.contains(&first.name()) || grammar.nonterminals().contains(last) {
                assert!(accepts(&f), "edge factor {f} rejected");
            }
        }

        for v in grammar.terminals().words_up_to(3) {
            if v.is_empty() || !grammar.derives(&v).expect("terminal word") {
                continue;
            }
            let annotated = arts.annotated_derivation(&v).expect("derivable");
            let last = annotated.last().expect("starts non-empty");
            assert!(accepts(last), "derivation word for {v} rejected");
            assert!(arts.derivation_word_clears(last), "{last} does not clear");
        }

        for v in grammar.terminals().words_up_to(encode_up_to) {
            if v.is_empty() {
                continue;
            }
            let encoded = arts.interleave(&v).expect("terminal word");
            if accepts(&encoded) {
                assert!(
                    grammar.derives(&v).expect("terminal word"),
                    "accepted the encoding of underivable {v}"
                );
            }
        }
    }

    let arts = ReductionArtifacts::build(&g_ab).expect("fixture reduces");
    let aa = arts
        .interleave(&Word::new(vec![
            g_ab.terminals().get("a").expect("fixture terminal").clone();
            2
        ]))
        .expect("terminal word");
    assert!(
        !arts.machine().accepts(&aa).expect("word over gamma"),
        "the encoding of aa must be rejected"
    );

    report(
        8,
        begun,
        Duration::from_secs(60),
        "gap, edge, derivation, and encoding behaviour all hold",
    );
}
