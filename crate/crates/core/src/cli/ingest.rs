//! Row-at-a-time readers for CSV and JSONL point streams.

use std::io::{BufRead, Lines};

use serde::Deserialize;

use super::Format;
use crate::error::{Error, Result};
use crate::metric::{Point, WeightedPoint};

#[derive(Deserialize)]
struct Row {
    coords: Vec<f64>,
    #[serde(default)]
    weight: Option<f64>,
}

enum Source<R: BufRead> {
    Csv(csv::StringRecordsIntoIter<R>),
    Jsonl { lines: Lines<R>, line: u64 },
}

/// Streaming iterator of points. Yields an error, then stops, on the first
/// malformed row or dimension change.
pub struct Ingest<R: BufRead> {
    source: Source<R>,
    dim: Option<usize>,
    failed: bool,
}

/// Reads points from `reader` one row at a time.
pub fn ingest<R: BufRead>(reader: R, format: Format) -> Ingest<R> {
    let source = match format {
        Format::Csv => Source::Csv(
            csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .trim(csv::Trim::All)
                .from_reader(reader)
                .into_records(),
        ),
        Format::Jsonl => Source::Jsonl { lines: reader.lines(), line: 0 },
    };
    Ingest { source, dim: None, failed: false }
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_csv(record: &csv::StringRecord, line: u64) -> Result<Vec<f64>> {
    record
        .iter()
        .enumerate()
        .map(|(i, field)| field.parse::<f64>().map_err(|_| parse_err(line, format!("field {} is not a number: {field:?}", i + 1))))
        .collect()
}

fn parse_jsonl(text: &str, line: u64) -> Result<Row> {
    serde_json::from_str::<Row>(text).map_err(|e| parse_err(line, e.to_string()))
}

impl<R: BufRead> Ingest<R> {
    /// Next row as raw coordinates and optional weight, with its line.
    fn next_row(&mut self) -> Option<Result<(u64, Row)>> {
        match &mut self.source {
            Source::Csv(records) => {
                let record = records.next()?;
                Some(record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string())).and_then(|r| {
                    let line = r.position().map_or(0, |p| p.line());
                    Ok((line, Row { coords: parse_csv(&r, line)?, weight: None }))
                }))
            }
            Source::Jsonl { lines, line } => loop {
                let text = lines.next()?;
                *line += 1;
                let text = match text {
                    Ok(t) => t,
                    Err(e) => return Some(Err(e.into())),
                };
                if text.trim().is_empty() {
                    continue;
                }
                let l = *line;
                return Some(parse_jsonl(&text, l).map(|r| (l, r)));
            },
        }
    }

    fn next_weighted(&mut self) -> Option<Result<(Point, Option<f64>)>> {
        if self.failed {
            return None;
        }
        let out = self.next_row()?.and_then(|(line, row)| {
            if row.coords.is_empty() {
                return Err(parse_err(line, "row has no coordinates"));
            }
            match self.dim {
                Some(d) if d != row.coords.len() => {
                    return Err(parse_err(line, format!("dimension changed from {d} to {}", row.coords.len())));
                }
                _ => self.dim = Some(row.coords.len()),
            }
            let point = Point::new(row.coords).map_err(|e| parse_err(line, e.to_string()))?;
            Ok((point, row.weight))
        });
        self.failed = out.is_err();
        Some(out)
    }
}

impl<R: BufRead> Iterator for Ingest<R> {
    type Item = Result<Point>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_weighted().map(|r| r.map(|(p, _)| p))
    }
}

/// Reads a weighted point set written by `poly` (JSONL with `coords` and
/// `weight`; a missing weight counts as 1). Arrivals are row positions.
pub fn read_weighted<R: BufRead>(reader: R) -> Result<Vec<WeightedPoint>> {
    let mut it = ingest(reader, Format::Jsonl);
    let mut out = Vec::new();
    while let Some(row) = it.next_weighted() {
        let (point, weight) = row?;
        let weight = weight.unwrap_or(1.0);
        if !(weight.is_finite() && weight >= 0.0) {
            let line = match &it.source {
                Source::Jsonl { line, .. } => *line,
                Source::Csv(_) => 0,
            };
            return Err(parse_err(line, format!("weight must be finite and nonnegative, got {weight}")));
        }
        out.push(WeightedPoint::new(point, weight, out.len() as u64 + 1));
    }
    Ok(out)
}
