//! Bid-log files: `auctions.{csv,jsonl}` and `bids.{csv,jsonl}`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use auction_bids_core::data::{
    build_observations, validate_log, AuctionMeta, BidEvent, BuildOptions, Dataset,
};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

pub const AUCTION_FIELDS: [&str; 4] = ["auction_id", "category_id", "start_time", "end_time"];
pub const BID_FIELDS: [&str; 4] = ["auction_id", "bidder_id", "bid_time", "feedback_score"];

pub fn auctions_path(dir: &Path, format: Format) -> PathBuf {
    dir.join(format!("auctions.{}", format.extension()))
}

pub fn bids_path(dir: &Path, format: Format) -> PathBuf {
    dir.join(format!("bids.{}", format.extension()))
}

/// Records with the line each one came from.
pub struct Parsed<T> {
    pub rows: Vec<T>,
    pub lines: Vec<u64>,
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub fn read_records<T: DeserializeOwned>(
    path: &Path,
    format: Format,
    fields: &[&str],
) -> CliResult<Parsed<T>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    match format {
        Format::Csv => read_csv(path, file, fields),
        Format::Jsonl => read_jsonl(path, file),
    }
}

fn read_csv<T: DeserializeOwned>(path: &Path, file: File, fields: &[&str]) -> CliResult<Parsed<T>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(file);
    let headers = rdr
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .clone();
    for f in fields {
        if !headers.iter().any(|h| h == *f) {
            return Err(parse_error(path, 1, format!("missing column `{f}`")));
        }
    }
    let mut parsed = Parsed {
        rows: Vec::new(),
        lines: Vec::new(),
    };
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let row: T = rec
            .deserialize(Some(&headers))
            .map_err(|e| parse_error(path, line, e.to_string()))?;
        parsed.rows.push(row);
        parsed.lines.push(line);
    }
    Ok(parsed)
}

fn read_jsonl<T: DeserializeOwned>(path: &Path, file: File) -> CliResult<Parsed<T>> {
    let mut parsed = Parsed {
        rows: Vec::new(),
        lines: Vec::new(),
    };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i as u64 + 1;
        let text = line.map_err(|e| CliError::io(path, e))?;
        if text.trim().is_empty() {
            continue;
        }
        let row: T =
            serde_json::from_str(&text).map_err(|e| parse_error(path, line_no, e.to_string()))?;
        parsed.rows.push(row);
        parsed.lines.push(line_no);
    }
    Ok(parsed)
}

/// `fields` is only written as a CSV header when `rows` is empty; otherwise
/// the header comes from the serialized struct.
pub fn write_records<T: Serialize>(
    path: &Path,
    format: Format,
    fields: &[&str],
    rows: &[T],
) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io_err = |e: std::io::Error| CliError::io(path, e);
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            if rows.is_empty() {
                w.write_record(fields)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            }
            for r in rows {
                w.serialize(r)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            }
            w.flush().map_err(io_err)?;
        }
        Format::Jsonl => {
            for r in rows {
                let line = serde_json::to_string(r)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                writeln!(out, "{line}").map_err(io_err)?;
            }
        }
    }
    out.flush().map_err(io_err)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BidLog {
    pub auctions: Vec<AuctionMeta>,
    pub bids: Vec<BidEvent>,
}

/// Parse and validate `auctions` and `bids` files from `dir`.
pub fn read_bid_log(dir: &Path, format: Format) -> CliResult<BidLog> {
    let a_path = auctions_path(dir, format);
    let b_path = bids_path(dir, format);
    let auctions: Parsed<AuctionMeta> = read_records(&a_path, format, &AUCTION_FIELDS)?;
    let bids: Parsed<BidEvent> = read_records(&b_path, format, &BID_FIELDS)?;
    for (m, &line) in auctions.rows.iter().zip(&auctions.lines) {
        m.validate()
            .map_err(|e| parse_error(&a_path, line, e.to_string()))?;
    }
    if let Err((row, e)) = validate_log(&auctions.rows, &bids.rows) {
        let line = bids.lines.get(row).copied().unwrap_or(0);
        return Err(parse_error(&b_path, line, e.to_string()));
    }
    Ok(BidLog {
        auctions: auctions.rows,
        bids: bids.rows,
    })
}

pub fn write_bid_log(dir: &Path, format: Format, log: &BidLog) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_records(
        &auctions_path(dir, format),
        format,
        &AUCTION_FIELDS,
        &log.auctions,
    )?;
    write_records(&bids_path(dir, format), format, &BID_FIELDS, &log.bids)
}

/// Parse a bid log and derive observations.
pub fn load_dataset(dir: &Path, format: Format, opts: BuildOptions) -> CliResult<Dataset> {
    let log = read_bid_log(dir, format)?;
    if log.bids.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no bids",
            bids_path(dir, format).display()
        )));
    }
    Ok(build_observations(&log.auctions, &log.bids, opts)?)
}
