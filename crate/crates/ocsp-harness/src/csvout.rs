//! Deterministic CSV documents: `# key: value` header lines, one column row,
//! data rows, and optional `# summary` footer lines. No timestamps, no
//! locale-dependent formatting, so equal seeds give equal bytes.

use crate::config::ExperimentConfig;

#[derive(Debug, Clone)]
pub struct CsvDoc {
    header: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
    footer: Vec<(String, String)>,
}

impl CsvDoc {
    pub fn new(config: &ExperimentConfig, columns: &[&str]) -> Self {
        let header = vec![
            ("config".to_string(), config.canonical_json()),
            ("config_hash".to_string(), format!("{:016x}", config.hash())),
            (
                "versions".to_string(),
                format!(
                    "ocsp-core={} ocsp-harness={}",
                    ocsp_core_version(),
                    env!("CARGO_PKG_VERSION")
                ),
            ),
        ];
        Self {
            header,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn push_summary(&mut self, key: &str, value: impl ToString) {
        self.footer.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        for (k, v) in &self.footer {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }
}

fn ocsp_core_version() -> &'static str {
    // Path dependency pinned in the workspace; version tracked manually.
    "0.1.0"
}

/// Format an f64 for CSV output: fixed six places, stable across platforms.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.6}")
}

pub fn fmt_rational(r: ocsp_core::Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
