//! Append-only JSON-lines cache of completed runs.
//!
//! One record per line, keyed by subcommand plus canonical arguments. The
//! last record for a key wins. A torn trailing line (interrupted write) is
//! ignored on load.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::app::Outcome;

#[derive(Serialize, Deserialize)]
struct Record {
    key: String,
    stdout: String,
    stderr: String,
    exit_code: i32,
}

pub struct Cache {
    path: PathBuf,
    entries: HashMap<String, Outcome>,
}

/// Stable key for a subcommand and its (already resolved) arguments.
pub fn cache_key(subcommand: &str, args: &BTreeMap<&str, String>) -> String {
    serde_json::to_string(&(subcommand, args)).expect("string maps serialize")
}

impl Cache {
    pub fn open(path: &Path) -> io::Result<Self> {
        let mut entries = HashMap::new();
        match File::open(path) {
            Ok(f) => {
                for line in BufReader::new(f).lines() {
                    let line = line?;
                    if let Ok(r) = serde_json::from_str::<Record>(&line) {
                        entries.insert(
                            r.key,
                            Outcome {
                                stdout: r.stdout,
                                stderr: r.stderr,
                                exit_code: r.exit_code,
                            },
                        );
                    }
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        Ok(Cache {
            path: path.to_owned(),
            entries,
        })
    }

    pub fn get(&self, key: &str) -> Option<&Outcome> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn append(&mut self, key: String, outcome: &Outcome) -> io::Result<()> {
        let record = Record {
            key: key.clone(),
            stdout: outcome.stdout.clone(),
            stderr: outcome.stderr.clone(),
            exit_code: outcome.exit_code,
        };
        let mut line = serde_json::to_string(&record).map_err(io::Error::other)?;
        line.push('\n');
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        f.write_all(line.as_bytes())?;
        f.flush()?;
        self.entries.insert(key, outcome.clone());
        Ok(())
    }
}
