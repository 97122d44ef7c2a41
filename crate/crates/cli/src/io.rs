//! Capacity file formats.
//!
//! CSV: a header row with the subset masks in ascending order (including the
//! ∅ and N columns), then one row per capacity with 17 significant digits —
//! enough to reproduce each f64 exactly on re-read.
//!
//! JSONL: one object per line, `{"n": …, "seed": …, "index": …, "values": […]}`
//! with values in ascending mask order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use capgen_core::Capacity64;

pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(out: &mut W, batch: &[Capacity64]) -> Result<()> {
    let n = batch.first().map(Capacity64::n).unwrap_or(0);
    let size = 1usize << n;
    let header: Vec<String> = (0..size).map(|m| m.to_string()).collect();
    writeln!(out, "{}", header.join(","))?;
    for c in batch {
        let row: Vec<String> = c.values().iter().map(|&v| format_value(v)).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write>(out: &mut W, batch: &[Capacity64], seed: u64) -> Result<()> {
    for (index, c) in batch.iter().enumerate() {
        let line = serde_json::json!({
            "n": c.n(),
            "seed": seed,
            "index": index,
            "values": c.values(),
        });
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a capacity file, dispatching on the extension (`.csv` vs anything
/// else = JSONL). Every row is validated; ground sets must agree.
pub fn read_capacities(path: &Path) -> Result<Vec<Capacity64>> {
    let is_csv = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false);
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let batch = if is_csv {
        read_csv(file)?
    } else {
        read_jsonl(file)?
    };
    if batch.is_empty() {
        bail!("{} contains no capacities", path.display());
    }
    let n = batch[0].n();
    for (i, c) in batch.iter().enumerate() {
        if c.n() != n {
            bail!("row {i} has n={} but the file started with n={n}", c.n());
        }
        c.validate()
            .with_context(|| format!("row {i} is not a valid capacity"))?;
    }
    Ok(batch)
}

fn infer_n(columns: usize) -> Result<u8> {
    let n = columns.trailing_zeros() as u8;
    if columns < 2 || 1usize << n != columns || n > capgen_core::MAX_GROUND_SET {
        bail!("{columns} columns do not form a full 2^n subset grid");
    }
    Ok(n)
}

fn read_csv(file: File) -> Result<Vec<Capacity64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let columns = reader.headers()?.len();
    let n = infer_n(columns)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != columns {
            bail!("row has {} fields, expected {columns}", record.len());
        }
        let values = record
            .iter()
            .map(|field| field.trim().parse::<f64>().context("parsing value"))
            .collect::<Result<Vec<f64>>>()?;
        out.push(Capacity64::from_values_unchecked(n, values));
    }
    Ok(out)
}

fn read_jsonl(file: File) -> Result<Vec<Capacity64>> {
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).with_context(|| format!("line {}", lineno + 1))?;
        let n = value
            .get("n")
            .and_then(serde_json::Value::as_u64)
            .with_context(|| format!("line {}: missing n", lineno + 1))? as u8;
        let values = value
            .get("values")
            .and_then(serde_json::Value::as_array)
            .with_context(|| format!("line {}: missing values", lineno + 1))?
            .iter()
            .map(|v| v.as_f64().context("non-numeric value"))
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != 1usize << n {
            bail!(
                "line {}: {} values for n={n}",
                lineno + 1,
                values.len()
            );
        }
        out.push(Capacity64::from_values_unchecked(n, values));
    }
    Ok(out)
}
