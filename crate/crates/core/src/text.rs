//! Line-oriented tokenizing shared by the text formats.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, msg: impl Into<String>) -> Self {
        ParseError { line, msg: msg.into() }
    }
}

/// Iterates over non-empty, non-comment lines with 1-based line numbers.
pub struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), last: 0 }
    }

    /// Line number of the most recently returned line, or of the end of input.
    pub fn line(&self) -> usize {
        self.last
    }

    pub fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Some((i + 1, t));
        }
        self.last += 1;
        None
    }

    pub fn expect_line(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.next_line().ok_or_else(|| ParseError::new(self.last, format!("unexpected end of input, expected {what}")))
    }

    /// Reads a line and parses it as whitespace-separated integers of a fixed count.
    pub fn expect_ints<T: std::str::FromStr>(&mut self, n: usize, what: &str) -> Result<(usize, Vec<T>), ParseError> {
        let (ln, l) = self.expect_line(what)?;
        let v = parse_ints::<T>(ln, l)?;
        if v.len() != n {
            return Err(ParseError::new(ln, format!("expected {n} integers for {what}, found {}", v.len())));
        }
        Ok((ln, v))
    }
}

pub fn parse_ints<T: std::str::FromStr>(line: usize, s: &str) -> Result<Vec<T>, ParseError> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| ParseError::new(line, format!("invalid integer `{t}`"))))
        .collect()
}
