//! Command-line front end for the `clearjump` engines. Machines are named
//! either `builtin:R01` / `builtin:RuV` or by a file path in one of the
//! three text formats; the format is detected from the header line.
//!
//! Exit codes: 0 accept or pass, 1 reject or fail, 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use clearjump::suites::UnknownSuite;
use clearjump::systems::{binary_alphabet, R01_SOURCE, RUV_SOURCE};
use clearjump::{
    in_k, parse_machine, phi, potential, run_all, run_suite, validate_trace, AcceptWitness,
    Alphabet, BinaryWord, ClearingRA, ContextRewritingSystem, DerivationTrace, Gjfa, GnfGrammar,
    MachineFile, ReductionArtifacts, SuiteName, SuiteReport, Symbol, Word, DEFAULT_SEED,
};

#[derive(Parser)]
#[command(name = "clearjump", version, about = "Membership, generation, and verification tools for clearing systems and jumping machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a machine accepts (or a grammar derives) a word.
    Member {
        /// builtin:R01, builtin:RuV, or a machine file
        machine: String,
        /// word tokens; a lone _ is the empty word
        #[arg(required = true)]
        word: Vec<String>,
        /// print the accepting run, one step per line
        #[arg(long)]
        trace: bool,
    },
    /// List the accepted or derivable words up to a length bound, shortlex.
    Generate {
        /// builtin:R01, builtin:RuV, or a machine file
        machine: String,
        /// length bound, inclusive
        #[arg(long)]
        maxlen: usize,
        /// keep only words passing the named screen; K drops words with a
        /// factor in {000, 010, 101, 111} and needs a binary alphabet
        #[arg(long)]
        filter: Option<String>,
    },
    /// Compile a grammar file into a jumping machine plus its factor sets.
    Reduce {
        /// grammar file in the gnf format
        grammar: PathBuf,
        /// output prefix; writes <prefix>.gjfa and <prefix>.sets
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in verification suites and print their reports.
    Verify {
        /// one suite by name
        #[arg(long, conflicts_with = "all")]
        suite: Option<String>,
        /// every suite
        #[arg(long)]
        all: bool,
        /// seed for the randomized cross-checks
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Search a jumping machine for the shortlex-least rejected word.
    Refute {
        /// a gjfa machine, builtin or file
        machine: String,
        /// length bound, inclusive
        #[arg(long)]
        maxlen: usize,
    },
    /// Show the neighbour-equality image, the K screen, and the potential
    /// of a binary word.
    Phi {
        /// word tokens over 0 1; a lone _ is the empty word
        #[arg(required = true)]
        word: Vec<String>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Member {
            machine,
            word,
            trace,
        } => cmd_member(&machine, &word, trace),
        Command::Generate {
            machine,
            maxlen,
            filter,
        } => cmd_generate(&machine, maxlen, filter.as_deref()),
        Command::Reduce { grammar, out } => cmd_reduce(&grammar, &out),
        Command::Verify { suite, all, seed } => cmd_verify(suite.as_deref(), all, seed),
        Command::Refute { machine, maxlen } => cmd_refute(&machine, maxlen),
        Command::Phi { word } => cmd_phi(&word),
    }
}

/// A loaded machine, classified by which engine answers for it. A crs file
/// whose instructions all erase becomes a clearing engine; any other crs
/// file is handled as a general rewriting system.
enum Engine {
    Jumping(Gjfa),
    Clearing(ClearingRA),
    Rewriting(ContextRewritingSystem),
    Grammar(GnfGrammar),
}

impl Engine {
    /// The alphabet CLI word arguments are read against.
    fn word_alphabet(&self) -> &Alphabet {
        match self {
            Engine::Jumping(m) => m.alphabet(),
            Engine::Clearing(c) => c.sigma(),
            Engine::Rewriting(s) => s.gamma(),
            Engine::Grammar(g) => g.terminals(),
        }
    }
}

fn load_engine(name: &str) -> Result<Engine, String> {
    let text = match name {
        "builtin:R01" => R01_SOURCE.to_owned(),
        "builtin:RuV" => RUV_SOURCE.to_owned(),
        other if other.starts_with("builtin:") => {
            return Err(format!(
                "unknown builtin {other}; the builtins are builtin:R01 and builtin:RuV"
            ));
        }
        path => {
            fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?
        }
    };
    Ok(match parse_machine(&text).map_err(|e| e.to_string())? {
        MachineFile::Gjfa(m) => Engine::Jumping(m),
        MachineFile::Gnf(g) => Engine::Grammar(g),
        MachineFile::Crs(s) => match ClearingRA::new(s.clone()) {
            Ok(c) => Engine::Clearing(c),
            Err(_) => Engine::Rewriting(s),
        },
    })
}

/// Reads word tokens against an alphabet. When every symbol name is a
/// single character, a token that is not itself a name is split into
/// characters, so `100110` and `1 0 0 1 1 0` read the same word.
fn parse_word(alphabet: &Alphabet, tokens: &[String]) -> Result<Word, String> {
    let single = alphabet
        .symbols()
        .iter()
        .all(|s| s.name().chars().count() == 1);
    let mut expanded: Vec<String> = Vec::new();
    for t in tokens {
        if t == "_" || alphabet.get(t).is_some() || !single {
            expanded.push(t.clone());
        } else {
            expanded.extend(t.chars().map(|c| c.to_string()));
        }
    }
    alphabet
        .word_from_tokens(&expanded)
        .map_err(|e| e.to_string())
}

fn cmd_member(machine: &str, tokens: &[String], trace: bool) -> Result<ExitCode, String> {
    let engine = load_engine(machine)?;
    let word = parse_word(engine.word_alphabet(), tokens)?;
    let lines = match &engine {
        Engine::Jumping(m) => m
            .witness(&word)
            .map_err(|e| e.to_string())?
            .map(|w| jumping_trace_lines(m, &word, &w))
            .transpose()?,
        Engine::Clearing(c) => c
            .reduce_to_empty(&word)
            .map_err(|e| e.to_string())?
            .map(|t| rewriting_trace_lines(c.system(), &t))
            .transpose()?,
        Engine::Rewriting(s) => s
            .derive_from_empty(&word)
            .map_err(|e| e.to_string())?
            .map(|t| rewriting_trace_lines(s, &t))
            .transpose()?,
        Engine::Grammar(g) => g
            .leftmost_derivation(&word)
            .map_err(|e| e.to_string())?
            .map(|idxs| grammar_trace_lines(g, &word, &idxs))
            .transpose()?,
    };
    match lines {
        Some(lines) => {
            println!("ACCEPT");
            if trace {
                for line in lines {
                    println!("{line}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("REJECT");
            Ok(ExitCode::from(1))
        }
    }
}

/// Replays the witness to recover the word left after each deletion.
/// Rules have no names of their own, so the printed id is the rule index.
fn jumping_trace_lines(
    m: &Gjfa,
    input: &Word,
    w: &AcceptWitness,
) -> Result<Vec<String>, String> {
    w.replay(m, input)
        .map_err(|e| format!("internal: witness does not replay: {e}"))?;
    let mut lines = Vec::with_capacity(w.steps.len());
    let mut cur = input.clone();
    for step in &w.steps {
        let label = &m.rules()[step.rule].label;
        cur = cur
            .delete_at(label, step.position)
            .map_err(|e| e.to_string())?;
        lines.push(format!("{cur}  [{} @ {}]", step.rule, step.position));
    }
    Ok(lines)
}

fn rewriting_trace_lines(
    s: &ContextRewritingSystem,
    t: &DerivationTrace,
) -> Result<Vec<String>, String> {
    validate_trace(s, t).map_err(|e| format!("internal: trace does not validate: {e}"))?;
    Ok(t.steps
        .iter()
        .map(|st| format!("{}  [{} @ {}]", st.word, st.instruction, st.position))
        .collect())
}

/// Rebuilds the sentential forms of a leftmost derivation. The printed id
/// is the rule index and the position is that of the replaced nonterminal.
fn grammar_trace_lines(
    g: &GnfGrammar,
    target: &Word,
    rules_applied: &[usize],
) -> Result<Vec<String>, String> {
    let mut form: Vec<Symbol> = vec![g.start().clone()];
    let mut lines = Vec::with_capacity(rules_applied.len());
    for &idx in rules_applied {
        let rule = g
            .rules()
            .get(idx)
            .ok_or_else(|| format!("internal: no rule {idx}"))?;
        let p = form
            .iter()
            .position(|s| g.nonterminals().contains(s))
            .ok_or_else(|| "internal: derivation continues past a terminal form".to_owned())?;
        if form[p] != rule.lhs {
            return Err("internal: derivation step names the wrong rule".to_owned());
        }
        form.splice(p..=p, rule.rhs.symbols().iter().cloned());
        lines.push(format!("{}  [{idx} @ {}]", Word::new(form.clone()), p + 1));
    }
    if form != target.symbols() {
        return Err("internal: derivation does not end at the word".to_owned());
    }
    Ok(lines)
}

fn cmd_generate(machine: &str, maxlen: usize, filter: Option<&str>) -> Result<ExitCode, String> {
    let engine = load_engine(machine)?;
    let words = match &engine {
        Engine::Jumping(m) => m.enumerate(maxlen),
        Engine::Clearing(c) => c.generate(maxlen),
        Engine::Rewriting(s) => s.forward_closure(&Word::empty(), maxlen),
        Engine::Grammar(g) => {
            let mut out = Vec::new();
            for w in g.terminals().words_up_to(maxlen) {
                if g.derives(&w).map_err(|e| e.to_string())? {
                    out.push(w);
                }
            }
            out
        }
    };
    let words = match filter {
        None => words,
        Some("K") => {
            if !engine.word_alphabet().is_subset_of(&binary_alphabet()) {
                return Err("filter K needs a machine over the binary alphabet 0 1".to_owned());
            }
            words
                .into_iter()
                .filter(|w| in_k(&BinaryWord::new(w).expect("checked binary")))
                .collect()
        }
        Some(other) => return Err(format!("unknown filter {other}; the only filter is K")),
    };
    for w in &words {
        println!("{w}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(grammar_path: &Path, out: &Path) -> Result<ExitCode, String> {
    let text = fs::read_to_string(grammar_path)
        .map_err(|e| format!("cannot read {}: {e}", grammar_path.display()))?;
    let grammar = GnfGrammar::parse(&text).map_err(|e| e.to_string())?;
    let arts = ReductionArtifacts::build(&grammar).map_err(|e| e.to_string())?;
    let gjfa_path = appended(out, ".gjfa");
    let sets_path = appended(out, ".sets");
    fs::write(&gjfa_path, arts.machine().to_text())
        .map_err(|e| format!("cannot write {}: {e}", gjfa_path.display()))?;
    fs::write(&sets_path, arts.sets_text())
        .map_err(|e| format!("cannot write {}: {e}", sets_path.display()))?;
    println!("wrote {}", gjfa_path.display());
    println!("wrote {}", sets_path.display());
    Ok(ExitCode::SUCCESS)
}

fn appended(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_verify(suite: Option<&str>, all: bool, seed: Option<u64>) -> Result<ExitCode, String> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let reports: Vec<SuiteReport> = if all {
        run_all(seed)
    } else if let Some(name) = suite {
        let name: SuiteName = name.parse().map_err(|e: UnknownSuite| e.to_string())?;
        vec![run_suite(name, seed)]
    } else {
        return Err("pass --suite <name> or --all".to_owned());
    };
    for report in &reports {
        print!("{}", report.render());
    }
    if reports.iter().all(|r| r.passed()) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_refute(machine: &str, maxlen: usize) -> Result<ExitCode, String> {
    let Engine::Jumping(m) = load_engine(machine)? else {
        return Err("refute needs a gjfa machine".to_owned());
    };
    match m.refute_universality(maxlen) {
        Some(w) => {
            println!("{w}");
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("NONE-UP-TO {maxlen}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_phi(tokens: &[String]) -> Result<ExitCode, String> {
    let alphabet = binary_alphabet();
    let word = parse_word(&alphabet, tokens)?;
    let bits = BinaryWord::new(&word).map_err(|e| e.to_string())?;
    let image = phi(&bits);
    println!("phi: {}", image.word());
    println!("in_k: {}", in_k(&bits));
    match potential(&image) {
        Ok(value) => println!("potential: {value}"),
        Err(e) => return Err(e.to_string()),
    }
    Ok(ExitCode::SUCCESS)
}
