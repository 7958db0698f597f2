//! CSV files with a leading `# schema: <tag>` line.

use std::io::{BufRead, Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub(crate) fn write_tagged<W: Write, T: Serialize>(mut out: W, schema: &str, rows: &[T]) -> Result<()> {
    writeln!(out, "# schema: {schema}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn read_tagged<R: Read, T: DeserializeOwned>(input: R, schema: &str) -> Result<Vec<T>> {
    let mut input = std::io::BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    match first.trim().strip_prefix("# schema:").map(str::trim) {
        Some(tag) if tag == schema => {}
        Some(tag) => return Err(Error::Parse { line: 1, msg: format!("schema `{tag}`, expected `{schema}`") }),
        None => return Err(Error::Parse { line: 1, msg: format!("missing `# schema: {schema}` line") }),
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    Ok(r.deserialize().collect::<Result<Vec<T>, csv::Error>>()?)
}
