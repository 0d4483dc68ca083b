use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Format, RunConfig};
use crate::CliError;

pub const TOOL: &str = "ppt-robust";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rows of the plot-ready part of a report.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

/// A command's result: a JSON body plus the table its CSV form is built on.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub body: Value,
    pub table: Table,
    /// Key of the body member the table was derived from; CSV omits it from
    /// the metadata lines.
    pub table_key: &'static str,
}

impl Report {
    pub fn new(
        config: &RunConfig,
        result: impl Serialize,
        table_key: &'static str,
        table: Table,
    ) -> Result<Self, CliError> {
        let body = json!({
            "tool": TOOL,
            "version": VERSION,
            "config": config,
            "result": serde_json::to_value(result)?,
        });
        Ok(Self { body, table, table_key })
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.body)?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.render_csv(),
        }
    }

    /// `# key=value` lines for every scalar outside the table, then the table.
    fn render_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        let mut meta = Vec::new();
        flatten("", &self.body, self.table_key, &mut meta);
        for (k, v) in meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.table.headers)?;
        for row in &self.table.rows {
            writer.write_record(row.iter().map(scalar))?;
        }
        let bytes = writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, skip: &str, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let path = key(k);
                if path == skip {
                    continue;
                }
                flatten(&path, child, skip, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, skip, out);
            }
        }
        leaf => out.push((prefix.to_string(), scalar(leaf))),
    }
}

/// Builds table rows from an array of flat objects, in header order.
pub fn rows_from_objects(items: &Value, headers: &[&'static str]) -> Vec<Vec<Value>> {
    items
        .as_array()
        .map(|a| {
            a.iter().map(|obj| headers.iter().map(|h| obj.get(*h).cloned().unwrap_or(Value::Null)).collect()).collect()
        })
        .unwrap_or_default()
}
