//! CSV tables and run manifests.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Scientific notation with 17 significant digits, enough for an exact
/// round trip of any `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Header line, then one line per row; `,` separated, `\n` terminated.
pub fn emit_csv(table: &Table, dest: &mut dyn Write) -> Result<()> {
    let mut s = table.header.join(",");
    s.push('\n');
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    dest.write_all(s.as_bytes())?;
    Ok(())
}

/// Parameters and provenance of one command-line run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: Vec<(String, String)>,
    pub seed: u64,
    pub version: String,
    pub wall_time_s: f64,
}

impl RunManifest {
    /// `key=value` lines.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "subcommand={}", self.subcommand);
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "{k}={v}");
        }
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "version={}", self.version);
        let _ = writeln!(s, "wall_time_s={:.3}", self.wall_time_s);
        s
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn render(t: &Table) -> String {
        let mut buf = Vec::new();
        emit_csv(t, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(render(&Table::new(["g", "E2"])), "g,E2\n");
    }

    #[test]
    fn single_row_gives_two_lines() {
        let mut t = Table::new(["g", "E2"]);
        t.push(vec![0.5.into(), 0.1.into()]);
        assert_eq!(render(&t), "g,E2\n5.0000000000000000e-1,1.0000000000000001e-1\n");
    }

    #[test]
    fn manifest_lines() {
        let m = RunManifest {
            subcommand: "mg".into(),
            parameters: vec![("n".into(), "8".into())],
            seed: 7,
            version: "0.1.0".into(),
            wall_time_s: 0.25,
        };
        assert_eq!(m.render(), "subcommand=mg\nn=8\nseed=7\nversion=0.1.0\nwall_time_s=0.250\n");
    }

    proptest! {
        #[test]
        fn floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let mut t = Table::new(["x"]);
            t.push(vec![x.into()]);
            let text = render(&t);
            let back: f64 = text.lines().nth(1).unwrap().parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
