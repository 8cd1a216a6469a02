//! Line-oriented text encoding shared by the model payloads.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any f64.
pub(crate) fn real(value: f64) -> String {
    format!("{value:.16e}")
}

#[derive(Default)]
pub(crate) struct Out {
    text: String,
}

impl Out {
    pub fn line(&mut self, key: &str, fields: impl IntoIterator<Item = String>) {
        self.text.push_str(key);
        for f in fields {
            self.text.push(' ');
            self.text.push_str(&f);
        }
        self.text.push('\n');
    }

    pub fn reals(&mut self, key: &str, values: &[f64]) {
        self.text.reserve(values.len() * 24 + key.len() + 1);
        self.text.push_str(key);
        for v in values {
            let _ = write!(self.text, " {v:.16e}");
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub(crate) struct In<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    line_no: usize,
}

impl<'a> In<'a> {
    pub fn new(text: &'a str) -> Self {
        In {
            lines: text.lines().enumerate(),
            line_no: 0,
        }
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::parse(self.line_no, message)
    }

    pub fn next_line(&mut self) -> Result<&'a str> {
        match self.lines.next() {
            Some((i, line)) => {
                self.line_no = i + 1;
                Ok(line)
            }
            None => {
                self.line_no += 1;
                Err(Error::parse(self.line_no, "unexpected end of file"))
            }
        }
    }

    /// Reads the next line, which must start with `key`, and returns its fields.
    pub fn expect(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let line = self.next_line()?;
        let mut parts = line.split(' ');
        if parts.next() != Some(key) {
            return Err(self.error(format!("expected '{key}' line")));
        }
        Ok(parts.collect())
    }

    pub fn expect_one<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let fields = self.expect(key)?;
        if fields.len() != 1 {
            return Err(self.error(format!("'{key}' takes one value")));
        }
        self.value(fields[0])
    }

    pub fn expect_reals(&mut self, key: &str, len: usize) -> Result<Vec<f64>> {
        let fields = self.expect(key)?;
        if fields.len() != len {
            return Err(self.error(format!(
                "'{key}' needs {len} values, found {}",
                fields.len()
            )));
        }
        fields.into_iter().map(|f| self.finite(f)).collect()
    }

    pub fn value<T: FromStr>(&self, field: &str) -> Result<T> {
        field
            .parse()
            .map_err(|_| self.error(format!("invalid value '{field}'")))
    }

    pub fn finite(&self, field: &str) -> Result<f64> {
        let v: f64 = self.value(field)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.error(format!("non-finite value '{field}'")))
        }
    }

    pub fn finish(&mut self) -> Result<()> {
        let fields = self.expect("end")?;
        if !fields.is_empty() {
            return Err(self.error("trailing fields after 'end'"));
        }
        match self.lines.find(|(_, l)| !l.trim().is_empty()) {
            Some((i, _)) => Err(Error::parse(i + 1, "content after 'end'")),
            None => Ok(()),
        }
    }
}
