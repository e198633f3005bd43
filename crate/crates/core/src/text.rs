//! Line-oriented tokenizer shared by the machine description formats, plus
//! format detection for files whose kind is not known in advance.
//!
//! All formats share the same lexical layer: `#` starts a comment that runs
//! to the end of the line, tokens are whitespace-separated, blank lines are
//! ignored, and the first meaningful line names the format (`gjfa`, `gnf`,
//! or `crs k=N`).

use thiserror::Error;

use crate::crs::ContextRewritingSystem;
use crate::gjfa::Gjfa;
use crate::gnf::GnfGrammar;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            msg: msg.into(),
        }
    }
}

/// Comment-stripped, tokenized lines with their 1-based line numbers.
/// Lines that are empty after stripping do not appear.
pub(crate) fn content_lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let body = match line.find('#') {
                Some(p) => &line[..p],
                None => line,
            };
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if tokens.is_empty() {
                None
            } else {
                Some((i + 1, tokens))
            }
        })
        .collect()
}

/// A machine description of any of the three supported kinds.
#[derive(Clone, Debug)]
pub enum MachineFile {
    Gjfa(Gjfa),
    Crs(ContextRewritingSystem),
    Gnf(GnfGrammar),
}

/// Parses a description whose format is determined by its header line.
pub fn parse_machine(text: &str) -> Result<MachineFile, ParseError> {
    let lines = content_lines(text);
    let Some((line_no, header)) = lines.first() else {
        return Err(ParseError::new(1, "empty description"));
    };
    match header[0] {
        "gjfa" => Gjfa::parse(text).map(MachineFile::Gjfa),
        "crs" => ContextRewritingSystem::parse(text).map(MachineFile::Crs),
        "gnf" => GnfGrammar::parse(text).map(MachineFile::Gnf),
        other => Err(ParseError::new(
            *line_no,
            format!("unknown format {other:?}; expected gjfa, gnf, or crs"),
        )),
    }
}
