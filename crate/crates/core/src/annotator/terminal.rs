use std::io::{BufRead, Write};

use serde_json::{Map, Value};

use super::AnnotationSession;
use crate::corpus::{Category, DatasetKind, Language, Sentiment, ThreatClass};
use crate::error::{Error, Result};
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TerminalSummary {
    pub submitted: usize,
    /// True when the user typed `q` before the dataset was finished.
    pub quit: bool,
}

enum Field {
    Choice(&'static str, Vec<&'static str>),
    Flag(&'static str),
    Text(&'static str),
}

fn choices<V: Vocabulary>() -> Vec<&'static str> {
    V::ALL.iter().map(|v| v.as_str()).collect()
}

fn fields(kind: DatasetKind) -> Vec<Field> {
    let mut f = vec![
        Field::Choice("language", choices::<Language>()),
        Field::Choice("sentiment", choices::<Sentiment>()),
        Field::Choice("category", choices::<Category>()),
        Field::Flag("offensive"),
    ];
    if kind == DatasetKind::Htc {
        f.extend([
            Field::Text("location"),
            Field::Text("violence"),
            Field::Text("threat"),
            Field::Text("threat_object"),
            Field::Choice("class", choices::<ThreatClass>()),
        ]);
    }
    f
}

enum Answer {
    Value(Value),
    Quit,
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<terminal>", e)
}

fn ask<R: BufRead, W: Write>(field: &Field, input: &mut R, out: &mut W) -> Result<Answer> {
    loop {
        let (name, hint) = match field {
            Field::Choice(name, opts) => (*name, opts.join("/")),
            Field::Flag(name) => (*name, "y/n".to_string()),
            Field::Text(name) => (*name, "blank for none".to_string()),
        };
        write!(out, "{name} [{hint}]: ").map_err(io_err)?;
        out.flush().map_err(io_err)?;
        let mut line = String::new();
        if input.read_line(&mut line).map_err(io_err)? == 0 {
            return Ok(Answer::Quit);
        }
        let answer = line.trim();
        if answer == "q" {
            return Ok(Answer::Quit);
        }
        let value = match field {
            Field::Choice(_, opts) => opts.contains(&answer).then(|| Value::String(answer.to_string())),
            Field::Flag(_) => match answer {
                "y" | "yes" | "true" => Some(Value::Bool(true)),
                "n" | "no" | "false" => Some(Value::Bool(false)),
                _ => None,
            },
            Field::Text(_) if answer.is_empty() => Some(Value::Null),
            Field::Text(_) => Some(Value::String(answer.to_string())),
        };
        match value {
            Some(v) => return Ok(Answer::Value(v)),
            None => writeln!(out, "  '{answer}' is not one of {hint}").map_err(io_err)?,
        }
    }
}

/// Prompts for every field of each unannotated post until the dataset is
/// complete or the user enters `q`. Answers go through the same JSON path as
/// the HTTP endpoint.
pub fn run_terminal<R: BufRead, W: Write>(
    session: &mut AnnotationSession,
    mut input: R,
    mut out: W,
) -> Result<TerminalSummary> {
    let mut summary = TerminalSummary::default();
    let form = fields(session.kind());
    while let Some((post, index)) = session.next_unlabeled()? {
        let p = session.progress();
        writeln!(out, "\n[{}/{}] post {} (index {index})", p.annotated, p.total, post.id).map_err(io_err)?;
        writeln!(out, "{}", post.text).map_err(io_err)?;
        let mut obj = Map::new();
        for field in &form {
            let name = match field {
                Field::Choice(n, _) | Field::Flag(n) | Field::Text(n) => *n,
            };
            match ask(field, &mut input, &mut out)? {
                Answer::Value(v) => {
                    obj.insert(name.to_string(), v);
                }
                Answer::Quit => {
                    summary.quit = true;
                    return Ok(summary);
                }
            }
        }
        match session.submit_json(index, &Value::Object(obj)) {
            Ok(()) => summary.submitted += 1,
            Err(Error::InvalidFields(errs)) => {
                for e in errs {
                    writeln!(out, "  {e}").map_err(io_err)?;
                }
                writeln!(out, "  annotation not saved; starting this post again").map_err(io_err)?;
            }
            Err(e) => return Err(e),
        }
    }
    writeln!(out, "all posts annotated").map_err(io_err)?;
    Ok(summary)
}
