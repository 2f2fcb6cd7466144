//! CSV assembly: `#` metadata comments, a header line, then numeric rows.
//! Floats are printed with 17 significant digits so parsing an emitted
//! file recovers every value bit-for-bit.

use std::fmt::Display;
use std::fmt::Write as _;

pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::Float(v) => {
                let _ = write!(out, "{v:.16e}");
            }
        }
    }
}

pub struct Table {
    header: Vec<&'static str>,
    metadata: Vec<(String, String)>,
    lines: Vec<Line>,
}

enum Line {
    Row(Vec<Cell>),
    Comment(String),
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            metadata: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Display) {
        self.metadata.push((key.into(), value.to_string()));
    }

    /// A free-form `#` line among the rows, used to flag skipped sweep
    /// points in place.
    pub fn comment(&mut self, text: impl Into<String>) {
        self.lines.push(Line::Comment(text.into()));
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.header.len(), "row width mismatch");
        for cell in &cells {
            if let Cell::Float(v) = cell {
                assert!(v.is_finite(), "non-finite value slipped into a row");
            }
        }
        self.lines.push(Line::Row(cells));
    }

    pub fn render(&self, timestamp: Option<u64>) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            let _ = writeln!(out, "# {key}: {value}");
        }
        if let Some(ts) = timestamp {
            let _ = writeln!(out, "# timestamp: {ts} (unix seconds)");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for line in &self.lines {
            match line {
                Line::Comment(text) => {
                    let _ = writeln!(out, "# {text}");
                }
                Line::Row(cells) => {
                    for (i, cell) in cells.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        cell.render(&mut out);
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}
