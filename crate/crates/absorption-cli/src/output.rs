use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Human,
}

/// One command's result in all three renderings.
#[derive(Debug)]
pub struct Output {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Lines printed above the table in human format.
    pub notes: Vec<String>,
}

impl Output {
    pub fn new(json: Value, header: &[&str]) -> Self {
        Self { json, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), notes: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    /// A two-column key/value rendering of a flat JSON object.
    pub fn record(json: Value) -> Self {
        let mut out = Self::new(json.clone(), &["field", "value"]);
        if let Value::Object(map) = &json {
            for (k, v) in map {
                let text = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.row(vec![k.clone(), text]);
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("values serialize") + "\n",
            Format::Tsv => {
                let mut s = self.header.join("\t") + "\n";
                for r in &self.rows {
                    s += &(r.join("\t") + "\n");
                }
                s
            }
            Format::Human => {
                let mut s = String::new();
                for n in &self.notes {
                    let _ = writeln!(s, "{n}");
                }
                let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
                for r in &self.rows {
                    for (i, c) in r.iter().enumerate() {
                        widths[i] = widths[i].max(c.chars().count());
                    }
                }
                let line = |cells: &[String]| {
                    let padded: Vec<String> =
                        cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                s += &line(&self.header);
                s += &line(&widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>());
                for r in &self.rows {
                    s += &line(r);
                }
                s
            }
        }
    }
}
