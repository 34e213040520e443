//! Tagged-corpus ingestion.
//!
//! The input format is one `surface<TAB>tag` pair per line, with a blank line
//! closing each sentence. Lines starting with `#` are comments. The final
//! sentence may omit its trailing blank line.

use std::fmt;
use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};

pub const VERB_TAGS: [&str; 6] = ["VB", "VBD", "VBG", "VBN", "VBP", "VBZ"];
pub const NOUN_TAGS: [&str; 4] = ["NN", "NNS", "NNP", "NNPS"];

pub fn is_verb_tag(tag: &str) -> bool {
    VERB_TAGS.contains(&tag)
}

pub fn is_noun_tag(tag: &str) -> bool {
    NOUN_TAGS.contains(&tag)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TaggedToken {
    surface: String,
    pos: String,
}

impl TaggedToken {
    /// Surfaces may not contain whitespace (the tab separator included).
    pub fn new(surface: impl Into<String>, pos: impl Into<String>) -> Result<Self> {
        let surface = surface.into();
        let pos = pos.into();
        if surface.is_empty() {
            return Err(Error::InvalidToken("empty surface".into()));
        }
        if surface.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken(format!(
                "surface {surface:?} contains whitespace"
            )));
        }
        if pos.is_empty() || pos.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken(format!("invalid tag {pos:?}")));
        }
        Ok(TaggedToken { surface, pos })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn pos(&self) -> &str {
        &self.pos
    }

    pub fn is_verb(&self) -> bool {
        is_verb_tag(&self.pos)
    }

    pub fn is_noun(&self) -> bool {
        is_noun_tag(&self.pos)
    }
}

impl fmt::Display for TaggedToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.surface, self.pos)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedSentence {
    tokens: Vec<TaggedToken>,
    source_id: String,
}

impl TaggedSentence {
    pub fn new(tokens: Vec<TaggedToken>, source_id: impl Into<String>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidToken("sentence has no tokens".into()));
        }
        Ok(TaggedSentence {
            tokens,
            source_id: source_id.into(),
        })
    }

    /// Builds a sentence from `word/TAG` notation, splitting each item at its
    /// last slash. Handy for tests and examples.
    pub fn from_slash_notation(text: &str, source_id: impl Into<String>) -> Result<Self> {
        let tokens = text
            .split_whitespace()
            .map(|item| {
                let (surface, pos) = item.rsplit_once('/').ok_or_else(|| {
                    Error::InvalidToken(format!("{item:?} is not in word/TAG form"))
                })?;
                TaggedToken::new(surface, pos)
            })
            .collect::<Result<Vec<_>>>()?;
        TaggedSentence::new(tokens, source_id)
    }

    pub fn tokens(&self) -> &[TaggedToken] {
        &self.tokens
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Streaming parser over a tagged corpus. Holds at most one sentence.
///
/// A malformed line yields an `Err` carrying its line number; the rest of
/// that sentence is discarded and parsing resumes after the next blank line.
pub struct CorpusReader<R> {
    input: R,
    name: String,
    line_no: usize,
    buf: String,
    finished: bool,
}

pub fn parse_tagged_corpus<R: BufRead>(input: R, name: impl Into<String>) -> CorpusReader<R> {
    CorpusReader {
        input,
        name: name.into(),
        line_no: 0,
        buf: String::new(),
        finished: false,
    }
}

/// Parses a whole in-memory corpus, failing on the first malformed line.
pub fn parse_str(text: &str, name: &str) -> Result<Vec<TaggedSentence>> {
    parse_tagged_corpus(text.as_bytes(), name).collect()
}

impl<R: BufRead> CorpusReader<R> {
    fn sentence(&self, tokens: Vec<TaggedToken>, first: usize, last: usize) -> TaggedSentence {
        TaggedSentence {
            tokens,
            source_id: format!("{}:{}-{}", self.name, first, last),
        }
    }

    fn skip_to_boundary(&mut self) -> Result<()> {
        loop {
            self.buf.clear();
            if self.input.read_line(&mut self.buf)? == 0 {
                self.finished = true;
                return Ok(());
            }
            self.line_no += 1;
            if self.buf.trim().is_empty() {
                return Ok(());
            }
        }
    }
}

fn parse_line(line: &str, line_no: usize) -> Result<TaggedToken> {
    let mut fields = line.split('\t');
    let (surface, pos) = match (fields.next(), fields.next(), fields.next()) {
        (Some(surface), Some(pos), None) => (surface, pos),
        _ => {
            let count = line.split('\t').count();
            return Err(Error::parse(
                line_no,
                format!("expected 2 tab-separated fields, found {count}"),
            ));
        }
    };
    TaggedToken::new(surface, pos).map_err(|e| Error::parse(line_no, e.to_string()))
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<TaggedSentence>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        let mut tokens = Vec::new();
        let mut first_line = 0;
        let mut last_line = 0;
        loop {
            self.buf.clear();
            let read = match self.input.read_line(&mut self.buf) {
                Ok(n) => n,
                Err(e) => {
                    self.finished = true;
                    return Some(Err(e.into()));
                }
            };
            if read == 0 {
                self.finished = true;
                if tokens.is_empty() {
                    return None;
                }
                return Some(Ok(self.sentence(tokens, first_line, last_line)));
            }
            self.line_no += 1;
            let line = self.buf.trim_end_matches(['\n', '\r']);
            if line.trim().is_empty() {
                if tokens.is_empty() {
                    continue;
                }
                return Some(Ok(self.sentence(tokens, first_line, last_line)));
            }
            if line.starts_with('#') {
                continue;
            }
            match parse_line(line, self.line_no) {
                Ok(token) => {
                    if tokens.is_empty() {
                        first_line = self.line_no;
                    }
                    last_line = self.line_no;
                    tokens.push(token);
                }
                Err(e) => {
                    if let Err(io) = self.skip_to_boundary() {
                        self.finished = true;
                        return Some(Err(io));
                    }
                    return Some(Err(e));
                }
            }
        }
    }
}

/// Writes sentences back in the corpus format.
pub fn write_corpus<'a, W, I>(out: &mut W, sentences: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a TaggedSentence>,
{
    for sentence in sentences {
        for token in sentence.tokens() {
            writeln!(out, "{}\t{}", token.surface, token.pos)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
