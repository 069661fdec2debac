use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

const CONFIG_PREFIX: &str = "# config ";
const PARTIAL_PREFIX: &str = "# partial ";

/// Named columns of numbers, written in row order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Table(Table),
    /// Pre-formatted CSV, such as the trajectory event dump.
    Text(String),
}

/// One CSV file of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub body: Body,
    /// Set when the numbers stop early because a computation failed.
    pub partial: Option<String>,
}

impl Artifact {
    pub fn complete(file: impl Into<String>, table: Table) -> Self {
        Artifact {
            file: file.into(),
            body: Body::Table(table),
            partial: None,
        }
    }

    pub fn text(file: impl Into<String>, csv: String) -> Self {
        Artifact {
            file: file.into(),
            body: Body::Text(csv),
            partial: None,
        }
    }

    pub fn table(&self) -> Option<&Table> {
        match &self.body {
            Body::Table(t) => Some(t),
            Body::Text(_) => None,
        }
    }
}

/// Writes the config echo, a header and the rows. Numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn write_artifact<W: Write>(config: &ExperimentConfig, artifact: &Artifact, mut out: W) -> Result<()> {
    writeln!(out, "{CONFIG_PREFIX}{}", config.to_json()).map_err(|e| CliError::io(Path::new(&artifact.file), e))?;
    if let Some(reason) = &artifact.partial {
        writeln!(out, "{PARTIAL_PREFIX}{}", reason.replace('\n', " "))
            .map_err(|e| CliError::io(Path::new(&artifact.file), e))?;
    }
    let table = match &artifact.body {
        Body::Table(t) => t,
        Body::Text(text) => {
            return out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new(&artifact.file), e));
        }
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| format!("{x:?}")))?;
    }
    w.flush().map_err(|e| CliError::io(Path::new(&artifact.file), e))?;
    Ok(())
}

/// Writes every artifact under `dir`, creating it if needed.
pub fn write_all(config: &ExperimentConfig, artifacts: &[Artifact], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.file);
            let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
            write_artifact(config, a, std::io::BufWriter::new(file))?;
            Ok(path)
        })
        .collect()
}

/// Recovers the config echoed at the top of an output file.
pub fn read_config<R: std::io::Read>(input: R, name: &str) -> Result<ExperimentConfig> {
    for line in BufReader::new(input).lines() {
        let line = line.map_err(|e| CliError::io(Path::new(name), e))?;
        if let Some(json) = line.strip_prefix(CONFIG_PREFIX) {
            return Ok(serde_json::from_str(json)?);
        }
        if !line.starts_with('#') {
            break;
        }
    }
    Err(CliError::NoConfig(name.into()))
}

/// Reads a table written by [`write_artifact`], skipping comment lines.
pub fn read_table<R: std::io::Read>(input: R) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let mut table = Table::new(r.headers()?.iter().map(str::to_owned).collect::<Vec<_>>());
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| CliError::config("table", format!("`{s}` is not a number"))))
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    Ok(table)
}
