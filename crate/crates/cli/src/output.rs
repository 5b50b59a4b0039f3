use std::fs::File;
use std::path::{Path, PathBuf};

use crate::exit::CliResult;

/// Formats a number with 12 significant digits; plain decimals for moderate
/// magnitudes, scientific notation otherwise.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.11e}");
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-5..12).contains(&exp) {
        format!("{v:.*}", (11 - exp) as usize)
    } else {
        sci
    }
}

/// A CSV cell.
pub enum Cell {
    Num(f64),
    Int(u64),
    Flag(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => sig12(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Flag(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// CSV file with a fixed header.
pub struct Table {
    path: PathBuf,
    writer: csv::Writer<File>,
    width: usize,
}

impl Table {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> CliResult<Self> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(name);
        let mut writer = csv::Writer::from_path(&path)?;
        writer.write_record(header)?;
        Ok(Self {
            path,
            writer,
            width: header.len(),
        })
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> CliResult<()> {
        debug_assert_eq!(cells.len(), self.width);
        self.writer.write_record(cells.iter().map(Cell::render))?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<PathBuf> {
        self.writer.flush()?;
        println!("wrote {}", self.path.display());
        Ok(self.path)
    }
}

/// File-name friendly rendering of a horizon.
pub fn horizon_tag(t: f64) -> String {
    format!("{t}")
}
