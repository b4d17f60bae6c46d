//! Report files. Every file carries the library version, the config hash and
//! the seed, and nothing time-dependent, so reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct Stamp {
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    conharm_version: &'static str,
    config_hash: &'a str,
    seed: u64,
    command: &'a str,
    result: &'a T,
}

pub struct Writer {
    dir: PathBuf,
    stamp: Stamp,
    written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path, stamp: Stamp) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stamp,
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn header(&self) -> String {
        format!(
            "# conharm {}\n# command {}\n# config_hash {}\n# seed {}\n",
            conharm::VERSION,
            self.stamp.command,
            self.stamp.config_hash,
            self.stamp.seed
        )
    }

    fn put(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let env = Envelope {
            conharm_version: conharm::VERSION,
            config_hash: &self.stamp.config_hash,
            seed: self.stamp.seed,
            command: self.stamp.command,
            result: value,
        };
        let mut text = serde_json::to_string_pretty(&env)?;
        text.push('\n');
        self.put(name, &text)
    }

    /// CSV or plain text with `#` provenance lines on top.
    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let text = format!("{}{}", self.header(), body);
        self.put(name, &text)
    }

    /// Raw bytes, for binary dumps that carry their own sidecar.
    pub fn note_written(&mut self, path: PathBuf) {
        self.written.push(path);
    }

    #[cfg(test)]
    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Lists the files written, on stderr so stdout stays the report.
    pub fn finish(self) {
        for p in &self.written {
            eprintln!("wrote {}", p.display());
        }
    }
}

/// Left-aligned columns padded to the widest cell.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut out = line(headers.to_vec());
    out.push_str(&line(width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

/// Compact float for tables: integers print without a fraction.
pub fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.0}")
    } else {
        format!("{x:.6}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_aligns() {
        let t = table(&["a", "bbb"], &[vec!["xx".into(), "y".into()]]);
        assert_eq!(t, "a   bbb\n--  ---\nxx  y\n");
    }

    #[test]
    fn files_carry_stamp() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = Writer::new(
            dir.path(),
            Stamp {
                command: "test",
                config_hash: "abc".into(),
                seed: 9,
            },
        )
        .unwrap();
        w.text("x.csv", "a,b\n").unwrap();
        w.json("x.json", &[1, 2]).unwrap();
        let csv = fs::read_to_string(dir.path().join("x.csv")).unwrap();
        assert!(csv.contains("# config_hash abc") && csv.contains("# seed 9") && csv.ends_with("a,b\n"));
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("x.json")).unwrap()).unwrap();
        assert_eq!(json["conharm_version"], conharm::VERSION);
        assert_eq!(json["seed"], 9);
        assert_eq!(w.written().len(), 2);
    }
}
