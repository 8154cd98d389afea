//! Shared helpers for the line-oriented text formats.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        FormatError {
            line,
            message: message.into(),
        }
    }
}

/// Non-empty lines with 1-based line numbers; `#` starts a comment line.
pub(crate) fn content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_u64(line: usize, tok: &str) -> Result<u64, FormatError> {
    tok.parse::<u64>()
        .map_err(|_| FormatError::new(line, format!("expected a natural number, found `{tok}`")))
}

/// Parses `key=value` and returns the value.
pub(crate) fn keyed<'a>(line: usize, tok: &'a str, key: &str) -> Result<&'a str, FormatError> {
    tok.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| FormatError::new(line, format!("expected `{key}=...`, found `{tok}`")))
}

pub(crate) fn keyed_u64(line: usize, tok: &str, key: &str) -> Result<u64, FormatError> {
    parse_u64(line, keyed(line, tok, key)?)
}

pub(crate) fn expect_header(
    input: &str,
    header: &str,
) -> Result<(usize, Vec<String>), FormatError> {
    let (line, first) = content_lines(input)
        .next()
        .ok_or_else(|| FormatError::new(1, format!("missing `{header}` header")))?;
    let mut toks = first.split_whitespace();
    let mut expected = header.split_whitespace();
    for want in expected.by_ref() {
        match toks.next() {
            Some(got) if got == want => {}
            _ => return Err(FormatError::new(line, format!("expected header `{header}`"))),
        }
    }
    Ok((line, toks.map(str::to_string).collect()))
}
