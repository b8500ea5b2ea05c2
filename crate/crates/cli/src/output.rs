use std::io::Write;

use serde_json::{json, Value};

use crate::commands::CliError;

/// Writes one record per result: a JSON line, or a human line with
/// `--pretty`.
pub struct Output {
    pretty: bool,
    out: std::io::StdoutLock<'static>,
}

impl Output {
    pub fn new(pretty: bool) -> Self {
        Output {
            pretty,
            out: std::io::stdout().lock(),
        }
    }

    pub fn record(&mut self, value: Value, human: impl FnOnce() -> String) {
        let line = if self.pretty {
            human()
        } else {
            value.to_string()
        };
        // a closed pipe is not worth a panic
        let _ = writeln!(self.out, "{line}");
    }

    pub fn error(&mut self, err: &CliError) {
        let file = err.file().map(|p| p.display().to_string());
        let (line, column) = err.position().unzip();
        let value = json!({
            "command": "error",
            "kind": err.kind(),
            "file": file,
            "line": line,
            "column": column,
            "message": err.to_string(),
        });
        self.record(value, || format!("error: {err}"));
        let at = match (&file, err.position()) {
            (Some(f), Some((l, c))) => format!("{f}:{l}:{c}: "),
            (Some(f), None) => format!("{f}: "),
            (None, _) => String::new(),
        };
        eprintln!("linctx: {at}{err}");
    }
}
