//! Result files. Every file opens with a format version and the resolved
//! config, so a run can be reproduced from any one of its outputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use xtalk_core::{Complex, Matrix};

use crate::config::RunConfig;
use crate::CliError;

pub const FORMAT_VERSION: &str = "xtalk/1";

/// Fixed-width scientific notation, enough digits to round-trip an f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Holds finished files until the pipeline succeeds, then writes them in order.
pub struct Writer {
    dir: PathBuf,
    config_json: String,
    files: Vec<(String, String)>,
}

impl Writer {
    pub fn new(dir: impl Into<PathBuf>, config: &RunConfig) -> Self {
        Self {
            dir: dir.into(),
            config_json: config.to_json(),
            files: Vec::new(),
        }
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) {
        let mut s = format!("# format_version: {FORMAT_VERSION}\n# config: {}\n", self.config_json);
        s.push_str(&header.join(","));
        s.push('\n');
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        self.files.push((name.into(), s));
    }

    pub fn json(&mut self, name: &str, result: impl Serialize) {
        let config: Value = serde_json::from_str(&self.config_json).expect("config is json");
        let doc = json!({
            "format_version": FORMAT_VERSION,
            "config": config,
            "result": result,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("result serializes");
        s.push('\n');
        self.files.push((name.into(), s));
    }

    /// SVG carries the header as an XML comment after the prolog.
    pub fn svg(&mut self, name: &str, body: String) {
        let comment = format!(
            "<!-- format_version: {FORMAT_VERSION} -->\n<!-- config: {} -->\n",
            self.config_json.replace("--", "- -")
        );
        let s = match body.split_once('\n') {
            Some((prolog, rest)) => format!("{prolog}\n{comment}{rest}"),
            None => format!("{comment}{body}"),
        };
        self.files.push((name.into(), s));
    }

    pub fn paths(&self) -> Vec<PathBuf> {
        self.files.iter().map(|(n, _)| self.dir.join(n)).collect()
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(&self.dir).map_err(|e| io_err(&self.dir, e))?;
        let mut out = Vec::new();
        for (name, content) in self.files {
            let p = self.dir.join(name);
            fs::write(&p, content).map_err(|e| io_err(&p, e))?;
            out.push(p);
        }
        Ok(out)
    }
}

pub fn io_err(p: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", p.display()))
}

fn pair(c: &Complex) -> [f64; 2] {
    [c.re, c.im]
}

/// Row-major nested `[re, im]` pairs.
pub fn matrix_pairs(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(pair).collect()).collect()
}
