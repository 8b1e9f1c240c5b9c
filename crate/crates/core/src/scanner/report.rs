//! Text, JSON and CSV renderings of a scan report.

use std::fmt::Write as _;
use std::str::FromStr;

use super::ScanReport;
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(domain(format!("unknown format `{other}` (expected text, json or csv)"))),
        }
    }
}

pub const CSV_HEADER: &str = "n,predicate,verdict,lhs,rhs,modulus";

/// Renders `report`. Output never includes timing, so it depends only on
/// the scan's configuration.
pub fn render(report: &ScanReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for h in &report.hits {
                let _ = writeln!(s, "{},{},{},{},{},{}", h.n, report.predicate, h.verdict, h.lhs, h.rhs, h.modulus);
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for h in &report.hits {
                let _ = write!(s, "{} n={} lhs={} rhs={} mod={}", h.verdict, h.n, h.lhs, h.rhs, h.modulus);
                if let Some(d) = &h.detail {
                    let _ = write!(s, " {d}");
                }
                s.push('\n');
            }
            let _ = writeln!(
                s,
                "{} [{}, {}]: checked {}, skipped {}, hits {}{}",
                report.predicate,
                report.lo,
                report.hi,
                report.checked,
                report.skipped,
                report.hits.len(),
                if report.complete { String::new() } else { format!(" (stopped after n = {})", report.upto) },
            );
            s
        }
    }
}
