//! Streaming CoNLL reader and token classification.
//!
//! Sentences are read one at a time, so memory use is bounded by the largest
//! sentence in the stream. A malformed sentence produces a recoverable
//! [`ReadError::Malformed`] and reading resumes at the next sentence.
//!
//! The reader accepts two variants:
//!
//! * `conllx`: ten tab-separated columns `ID FORM LEMMA CPOSTAG POSTAG FEATS
//!   HEAD DEPREL PHEAD PDEPREL`.
//! * `conllu-basic`: the same column count; multiword ranges (`3-4`) and empty
//!   nodes (`5.1`) are skipped.
//!
//! Lines starting with `#` are comments in both variants.

use std::fmt;
use std::io::{self, BufRead};
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;
use unicode_general_category::{get_general_category, GeneralCategory};

const COLUMNS: usize = 10;
const EMPTY: &str = "_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    ConllX,
    ConlluBasic,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conllx" => Ok(Format::ConllX),
            "conllu-basic" => Ok(Format::ConlluBasic),
            other => Err(format!("unknown format '{other}' (expected conllx or conllu-basic)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::ConllX => "conllx",
            Format::ConlluBasic => "conllu-basic",
        })
    }
}

/// One token line. Optional string columns written as `_` are stored empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken {
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub cpostag: String,
    pub postag: String,
    pub feats: String,
    /// `0` attaches the token to the artificial root.
    pub head: usize,
    pub deprel: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSentence {
    /// 1-based ordinal of the sentence in its stream, counting malformed ones.
    pub id: usize,
    pub tokens: Vec<RawToken>,
}

impl RawSentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Renders the sentence as CoNLL-X lines followed by a blank line.
    pub fn to_conll(&self) -> String {
        fn col(s: &str) -> &str {
            if s.is_empty() {
                EMPTY
            } else {
                s
            }
        }
        let mut out = String::new();
        for t in &self.tokens {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t_\t_\n",
                t.index,
                t.form,
                col(&t.lemma),
                col(&t.cpostag),
                col(&t.postag),
                col(&t.feats),
                t.head,
                col(&t.deprel)
            ));
        }
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MalformedKind {
    #[error("expected {COLUMNS} tab-separated columns, found {0}")]
    ColumnCount(usize),
    #[error("column {0} is empty")]
    EmptyField(usize),
    #[error("token index '{0}' is not a positive integer")]
    BadIndex(String),
    #[error("head '{0}' is not a non-negative integer")]
    BadHead(String),
    #[error("expected token index {expected}, found {found}")]
    IndexSequence { expected: usize, found: usize },
    #[error("head {head} is beyond the sentence length {len}")]
    HeadOutOfRange { head: usize, len: usize },
    #[error("token {0} is its own head")]
    SelfHead(usize),
    #[error("line is not valid UTF-8")]
    InvalidUtf8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sentence {sentence}, line {line}: {kind}")]
pub struct MalformedSentence {
    pub sentence: usize,
    pub line: usize,
    pub kind: MalformedKind,
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Malformed(#[from] MalformedSentence),
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
}

/// Iterator over the sentences of a CoNLL stream.
pub struct ConllReader<R> {
    reader: R,
    format: Format,
    line_no: usize,
    sentence_no: usize,
    buf: Vec<u8>,
    done: bool,
}

impl<R: BufRead> ConllReader<R> {
    pub fn new(reader: R, format: Format) -> Self {
        ConllReader {
            reader,
            format,
            line_no: 0,
            sentence_no: 0,
            buf: Vec::new(),
            done: false,
        }
    }

    /// Next line without its terminator, `Ok(None)` at end of stream.
    fn next_line(&mut self) -> io::Result<Option<Result<String, ()>>> {
        self.buf.clear();
        if self.reader.read_until(b'\n', &mut self.buf)? == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        while matches!(self.buf.last(), Some(b'\n' | b'\r')) {
            self.buf.pop();
        }
        Ok(Some(String::from_utf8(std::mem::take(&mut self.buf)).map_err(|_| ())))
    }

    fn read_sentence(&mut self) -> Option<Result<RawSentence, ReadError>> {
        let mut tokens: Vec<RawToken> = Vec::new();
        let mut lines: Vec<usize> = Vec::new();
        let mut error: Option<(usize, MalformedKind)> = None;
        let mut started = false;

        loop {
            let line = match self.next_line() {
                Ok(line) => line,
                Err(e) => {
                    self.done = true;
                    return Some(Err(ReadError::Io(e)));
                }
            };
            let Some(line) = line else {
                self.done = true;
                break;
            };
            let line = match line {
                Ok(l) => l,
                Err(()) => {
                    if !started {
                        started = true;
                        self.sentence_no += 1;
                    }
                    error.get_or_insert((self.line_no, MalformedKind::InvalidUtf8));
                    continue;
                }
            };
            if line.trim().is_empty() {
                if started {
                    break;
                }
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            if !started {
                started = true;
                self.sentence_no += 1;
            }
            if error.is_some() {
                continue;
            }
            match parse_token_line(&line, self.format, tokens.len() + 1) {
                Ok(Some(token)) => {
                    tokens.push(token);
                    lines.push(self.line_no);
                }
                Ok(None) => {}
                Err(kind) => error = Some((self.line_no, kind)),
            }
        }

        if !started {
            return None;
        }
        let sentence = self.sentence_no;
        if error.is_none() {
            let len = tokens.len();
            error = tokens.iter().zip(&lines).find_map(|(t, &line)| {
                if t.head > len {
                    Some((line, MalformedKind::HeadOutOfRange { head: t.head, len }))
                } else if t.head == t.index {
                    Some((line, MalformedKind::SelfHead(t.index)))
                } else {
                    None
                }
            });
        }
        Some(match error {
            Some((line, kind)) => Err(ReadError::Malformed(MalformedSentence { sentence, line, kind })),
            None => Ok(RawSentence { id: sentence, tokens }),
        })
    }
}

impl<R: BufRead> Iterator for ConllReader<R> {
    type Item = Result<RawSentence, ReadError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        self.read_sentence()
    }
}

fn optional(field: &str) -> String {
    if field == EMPTY {
        String::new()
    } else {
        field.to_owned()
    }
}

/// Parses one token line; `Ok(None)` for lines the format says to skip.
fn parse_token_line(line: &str, format: Format, expected: usize) -> Result<Option<RawToken>, MalformedKind> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != COLUMNS {
        return Err(MalformedKind::ColumnCount(cols.len()));
    }
    if let Some(i) = cols.iter().position(|c| c.is_empty()) {
        return Err(MalformedKind::EmptyField(i + 1));
    }
    if format == Format::ConlluBasic && cols[0].contains(['-', '.']) {
        return Ok(None);
    }
    let index: usize = match cols[0].parse() {
        Ok(i) if i > 0 => i,
        _ => return Err(MalformedKind::BadIndex(cols[0].to_owned())),
    };
    if index != expected {
        return Err(MalformedKind::IndexSequence { expected, found: index });
    }
    let head: usize = cols[6]
        .parse()
        .map_err(|_| MalformedKind::BadHead(cols[6].to_owned()))?;
    Ok(Some(RawToken {
        index,
        form: cols[1].to_owned(),
        lemma: optional(cols[2]),
        cpostag: optional(cols[3]),
        postag: optional(cols[4]),
        feats: optional(cols[5]),
        head,
        deprel: optional(cols[7]),
    }))
}

/// Reads sentences from `reader` using the format selected in `config`.
pub fn parse_conll<R: BufRead>(reader: R, config: &IngestConfig) -> ConllReader<R> {
    ConllReader::new(reader, config.format)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenClass {
    Word,
    Punctuation,
    NullElement,
}

/// A test on a token; a rule matches when any of its predicates does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    /// Every character of the form is Unicode punctuation (P*) or symbol (S*).
    FormIsPunctuation,
    /// Form equals one of these, ignoring case.
    FormIn(Vec<String>),
    /// CPOSTAG or POSTAG equals one of these.
    TagIn(Vec<String>),
    DeprelIn(Vec<String>),
}

fn is_punct_or_symbol(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
            | MathSymbol
            | CurrencySymbol
            | ModifierSymbol
            | OtherSymbol
    )
}

impl Predicate {
    pub fn matches(&self, token: &RawToken) -> bool {
        match self {
            Predicate::FormIsPunctuation => {
                !token.form.is_empty() && token.form.chars().all(is_punct_or_symbol)
            }
            Predicate::FormIn(forms) => {
                let form = token.form.to_lowercase();
                forms.iter().any(|f| f.to_lowercase() == form)
            }
            Predicate::TagIn(tags) => tags.iter().any(|t| *t == token.cpostag || *t == token.postag),
            Predicate::DeprelIn(rels) => rels.contains(&token.deprel),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestConfig {
    pub format: Format,
    pub punctuation: Vec<Predicate>,
    pub null_element: Vec<Predicate>,
}

impl Default for IngestConfig {
    /// Punctuation: symbol-only forms or tag `PUNCT`/`Z`. Null elements: form `NULL`.
    fn default() -> Self {
        IngestConfig {
            format: Format::ConllX,
            punctuation: vec![
                Predicate::FormIsPunctuation,
                Predicate::TagIn(vec!["PUNCT".into(), "Z".into()]),
            ],
            null_element: vec![Predicate::FormIn(vec!["NULL".into()])],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

#[derive(Default)]
struct RuleSpec {
    form_symbols: bool,
    forms: Vec<String>,
    tags: Vec<String>,
    deprels: Vec<String>,
}

impl RuleSpec {
    fn from_predicates(predicates: &[Predicate]) -> Self {
        let mut spec = RuleSpec::default();
        for p in predicates {
            match p {
                Predicate::FormIsPunctuation => spec.form_symbols = true,
                Predicate::FormIn(v) => spec.forms.extend(v.iter().cloned()),
                Predicate::TagIn(v) => spec.tags.extend(v.iter().cloned()),
                Predicate::DeprelIn(v) => spec.deprels.extend(v.iter().cloned()),
            }
        }
        spec
    }

    fn into_predicates(self) -> Vec<Predicate> {
        let mut rule = Vec::new();
        if self.form_symbols {
            rule.push(Predicate::FormIsPunctuation);
        }
        if !self.forms.is_empty() {
            rule.push(Predicate::FormIn(self.forms));
        }
        if !self.tags.is_empty() {
            rule.push(Predicate::TagIn(self.tags));
        }
        if !self.deprels.is_empty() {
            rule.push(Predicate::DeprelIn(self.deprels));
        }
        rule
    }

    fn render(&self, prefix: &str, out: &mut String) {
        out.push_str(&format!("{prefix}.form-symbols = {}\n", self.form_symbols));
        out.push_str(&format!("{prefix}.forms = {}\n", self.forms.join(", ")));
        out.push_str(&format!("{prefix}.tags = {}\n", self.tags.join(", ")));
        out.push_str(&format!("{prefix}.deprels = {}\n", self.deprels.join(", ")));
    }
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

impl IngestConfig {
    /// Parses the `key = value` config format. Keys not mentioned keep an
    /// empty rule, except `format`, which defaults to `conllx`.
    ///
    /// ```text
    /// format = conllx
    /// punctuation.form-symbols = true
    /// punctuation.forms =
    /// punctuation.tags = PUNCT, Z
    /// punctuation.deprels = AuxX, AuxK
    /// null.form-symbols = false
    /// null.forms = NULL
    /// null.tags =
    /// null.deprels =
    /// ```
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut format = Format::default();
        let mut punct = RuleSpec::default();
        let mut null = RuleSpec::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ConfigError { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "format" {
                format = value.parse().map_err(err)?;
                continue;
            }
            let (rule, field) = match key.split_once('.') {
                Some(("punctuation", field)) => (&mut punct, field),
                Some(("null", field)) => (&mut null, field),
                _ => return Err(err(format!("unknown key '{key}'"))),
            };
            match field {
                "form-symbols" => {
                    rule.form_symbols = value
                        .parse()
                        .map_err(|_| err(format!("'{value}' is not true or false")))?
                }
                "forms" => rule.forms = split_list(value),
                "tags" => rule.tags = split_list(value),
                "deprels" => rule.deprels = split_list(value),
                _ => return Err(err(format!("unknown key '{key}'"))),
            }
        }
        Ok(IngestConfig {
            format,
            punctuation: punct.into_predicates(),
            null_element: null.into_predicates(),
        })
    }

    /// Canonical text form; parsing it yields an equal config.
    pub fn to_config_string(&self) -> String {
        let mut out = format!("format = {}\n", self.format);
        RuleSpec::from_predicates(&self.punctuation).render("punctuation", &mut out);
        RuleSpec::from_predicates(&self.null_element).render("null", &mut out);
        out
    }

    /// First 16 hex digits of the SHA-256 of the canonical text.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_config_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Null-element rule first, then punctuation; anything else is a word.
pub fn classify_token(token: &RawToken, config: &IngestConfig) -> TokenClass {
    if config.null_element.iter().any(|p| p.matches(token)) {
        TokenClass::NullElement
    } else if config.punctuation.iter().any(|p| p.matches(token)) {
        TokenClass::Punctuation
    } else {
        TokenClass::Word
    }
}

pub fn classify_sentence(sentence: &RawSentence, config: &IngestConfig) -> Vec<TokenClass> {
    sentence.tokens.iter().map(|t| classify_token(t, config)).collect()
}
