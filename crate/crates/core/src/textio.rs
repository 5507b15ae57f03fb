//! Line-oriented text records used for checkpoints and map exports.
//!
//! A record is a sequence of `key value...` lines. Blank lines and lines
//! starting with `#` are ignored. Floats are written with 17 significant
//! digits so that parsing returns the identical bit pattern.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Scientific notation with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Default, Clone)]
pub struct RecordWriter {
    buf: String,
}

impl RecordWriter {
    pub fn new(kind: &str) -> Self {
        let mut w = Self::default();
        w.line(&["format", kind]);
        w
    }

    pub fn line(&mut self, fields: &[&str]) {
        self.buf.push_str(&fields.join(" "));
        self.buf.push('\n');
    }

    pub fn int(&mut self, key: &str, v: i64) {
        let _ = writeln!(self.buf, "{key} {v}");
    }

    pub fn float(&mut self, key: &str, v: f64) {
        let _ = writeln!(self.buf, "{key} {}", fmt17(v));
    }

    pub fn text(&mut self, key: &str, v: &str) {
        let _ = writeln!(self.buf, "{key} {v}");
    }

    /// A row of the form `key i f f f ...`.
    pub fn row(&mut self, key: &str, index: i64, values: &[f64]) {
        let _ = write!(self.buf, "{key} {index}");
        for v in values {
            let _ = write!(self.buf, " {}", fmt17(*v));
        }
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// One non-empty line, split into whitespace-separated tokens with their columns.
#[derive(Debug, Clone)]
pub struct Line<'a> {
    pub number: usize,
    tokens: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    pub fn key(&self) -> &'a str {
        self.tokens[0].1
    }

    pub fn len(&self) -> usize {
        self.tokens.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn error(&self, col: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.number,
            column: col,
            message: message.into(),
        }
    }

    fn token(&self, i: usize) -> Result<(usize, &'a str)> {
        self.tokens.get(i + 1).copied().ok_or_else(|| {
            let col = self.tokens.last().map(|(c, t)| c + t.len()).unwrap_or(1);
            self.error(col, format!("`{}` expects at least {} values", self.key(), i + 1))
        })
    }

    pub fn expect_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            let col = self.tokens.get(n + 1).map(|t| t.0).unwrap_or(self.tokens[0].0);
            return Err(self.error(
                col,
                format!("`{}` expects {n} values, found {}", self.key(), self.len()),
            ));
        }
        Ok(())
    }

    pub fn str(&self, i: usize) -> Result<&'a str> {
        Ok(self.token(i)?.1)
    }

    pub fn f64(&self, i: usize) -> Result<f64> {
        let (col, t) = self.token(i)?;
        t.parse::<f64>()
            .map_err(|_| self.error(col, format!("`{t}` is not a number")))
    }

    pub fn i64(&self, i: usize) -> Result<i64> {
        let (col, t) = self.token(i)?;
        t.parse::<i64>()
            .map_err(|_| self.error(col, format!("`{t}` is not an integer")))
    }

    pub fn unexpected(&self) -> Error {
        self.error(self.tokens[0].0, format!("unexpected key `{}`", self.key()))
    }
}

/// Tokenized record with a cursor.
pub struct RecordReader<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    last_line: usize,
}

impl<'a> RecordReader<'a> {
    /// Splits `text` into lines and checks the `format <kind>` header.
    pub fn new(text: &'a str, kind: &str) -> Result<Self> {
        let mut lines = Vec::new();
        let mut last_line = 1;
        for (i, raw) in text.lines().enumerate() {
            last_line = i + 1;
            let trimmed = raw.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = Vec::new();
            let mut start = None;
            for (col, ch) in raw.char_indices() {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(col),
                    (true, Some(s)) => {
                        tokens.push((s + 1, &raw[s..col]));
                        start = None;
                    }
                    _ => {}
                }
            }
            if let Some(s) = start {
                tokens.push((s + 1, &raw[s..]));
            }
            lines.push(Line {
                number: i + 1,
                tokens,
            });
        }
        let mut r = Self {
            lines,
            pos: 0,
            last_line,
        };
        let header = r.expect("format")?;
        header.expect_len(1)?;
        if header.str(0)? != kind {
            return Err(Error::Parse {
                line: header.number,
                column: header.tokens[1].0,
                message: format!("expected a `{kind}` record, found `{}`", header.str(0)?),
            });
        }
        Ok(r)
    }

    pub fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.pos)
    }

    pub fn next_line(&mut self) -> Option<Line<'a>> {
        let l = self.lines.get(self.pos).cloned();
        self.pos += 1;
        l
    }

    /// Next line, which must carry `key`.
    pub fn expect(&mut self, key: &str) -> Result<Line<'a>> {
        match self.next_line() {
            Some(l) if l.key() == key => Ok(l),
            Some(l) => Err(Error::Parse {
                line: l.number,
                column: l.tokens[0].0,
                message: format!("expected `{key}`, found `{}`", l.key()),
            }),
            None => Err(Error::Parse {
                line: self.last_line,
                column: 1,
                message: format!("unexpected end of record, expected `{key}`"),
            }),
        }
    }

    pub fn finish(mut self) -> Result<()> {
        match self.next_line() {
            None => Ok(()),
            Some(l) => Err(l.unexpected()),
        }
    }
}
