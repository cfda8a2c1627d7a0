use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{source_tag}:{line}: {message}")]
pub struct LineError {
    pub source_tag: String,
    pub line: usize,
    pub message: String,
}

/// Loss accounting for one snapshot: `yielded + errors.len() == lines`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    pub source_tag: String,
    pub lines: usize,
    pub yielded: usize,
    pub errors: Vec<LineError>,
}

impl ParseReport {
    pub fn is_balanced(&self) -> bool {
        self.yielded + self.errors.len() == self.lines
    }
}

/// Streams non-blank lines through a parser. Errors are returned inline so
/// the caller can log them and carry on.
pub struct NdjsonLines<R, F> {
    reader: R,
    parse: F,
    source_tag: String,
    line_no: usize,
    buf: String,
}

impl<R: BufRead, T, F: FnMut(&str) -> Result<T, String>> NdjsonLines<R, F> {
    pub fn new(reader: R, source_tag: impl Into<String>, parse: F) -> Self {
        Self { reader, parse, source_tag: source_tag.into(), line_no: 0, buf: String::new() }
    }
}

impl<R: BufRead, T, F: FnMut(&str) -> Result<T, String>> Iterator for NdjsonLines<R, F> {
    type Item = Result<T, LineError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            self.line_no += 1;
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    return Some(Err(LineError {
                        source_tag: self.source_tag.clone(),
                        line: self.line_no,
                        message: e.to_string(),
                    }))
                }
            }
            let line = self.buf.trim();
            if line.is_empty() {
                continue;
            }
            return Some((self.parse)(line).map_err(|message| LineError {
                source_tag: self.source_tag.clone(),
                line: self.line_no,
                message,
            }));
        }
    }
}

/// Reads a whole snapshot file, collecting parse failures into the report.
pub fn read_ndjson<T, F>(path: &Path, parse: F) -> std::io::Result<(Vec<T>, ParseReport)>
where
    F: FnMut(&str) -> Result<T, String>,
{
    let tag = super::source_tag(path);
    let reader = BufReader::new(File::open(path)?);
    Ok(collect(NdjsonLines::new(reader, tag.clone(), parse), tag))
}

pub(crate) fn collect<T>(
    lines: impl Iterator<Item = Result<T, LineError>>,
    source_tag: String,
) -> (Vec<T>, ParseReport) {
    let mut report = ParseReport { source_tag, ..Default::default() };
    let mut items = Vec::new();
    for item in lines {
        report.lines += 1;
        match item {
            Ok(v) => {
                report.yielded += 1;
                items.push(v);
            }
            Err(e) => {
                log::warn!("{e}");
                report.errors.push(e);
            }
        }
    }
    (items, report)
}
