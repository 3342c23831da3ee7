use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::error::CliError;

/// Config fields echoed into the JSON envelope; only the ones a command
/// actually consumed are present.
#[derive(Debug, Default, Serialize)]
pub struct ConfigEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_sweeps: Option<usize>,
}

/// Versioned JSON wrapper around every report payload.
#[derive(Debug, Serialize)]
pub struct ReportEnvelope {
    pub schema: u32,
    pub version: &'static str,
    pub command: &'static str,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_seconds: Option<f64>,
    pub payload: serde_json::Value,
}

/// One finished command: the payload rendered both ways.
pub struct CommandOutput {
    pub command: &'static str,
    pub config: ConfigEcho,
    pub payload: serde_json::Value,
    pub csv: String,
}

impl CommandOutput {
    pub fn new<T: Serialize>(
        command: &'static str,
        config: ConfigEcho,
        payload: &T,
        csv: String,
    ) -> Result<Self, CliError> {
        let payload = serde_json::to_value(payload)
            .map_err(|e| CliError::Config(format!("payload serialization failed: {e}")))?;
        Ok(CommandOutput {
            command,
            config,
            payload,
            csv,
        })
    }
}

/// 17 significant digits: parses back to the identical double.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Joins a header and rows into a `\n`-terminated CSV body.
pub fn csv_table(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn render(out: CommandOutput, format: Format, timing_seconds: Option<f64>) -> String {
    match format {
        Format::Csv => out.csv,
        Format::Json => {
            let envelope = ReportEnvelope {
                schema: 1,
                version: env!("CARGO_PKG_VERSION"),
                command: out.command,
                config: out.config,
                timing_seconds,
                payload: out.payload,
            };
            let mut text = serde_json::to_string_pretty(&envelope)
                .expect("envelope serialization cannot fail");
            text.push('\n');
            text
        }
    }
}

pub fn emit(text: &str, out_path: Option<&Path>) -> Result<(), CliError> {
    match out_path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}")))
        }
    }
}
