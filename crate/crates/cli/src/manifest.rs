//! Run manifests and replay.
//!
//! Every subcommand records `manifest.json` in its output directory: the argument vector, working directory, seed, and SHA-256
//! digests of every input read and output written. Replaying a manifest
//! re-runs the same arguments into a chosen directory and compares the new
//! outputs against the recorded digests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Cli;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub argv: Vec<String>,
    pub cwd: String,
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileDigest>,
    pub timestamp_unix: u64,
}

/// One per output directory; a later run into the same directory replaces it.
pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Inputs and outputs of one invocation.
#[derive(Debug)]
pub struct Run {
    out_dir: PathBuf,
    inputs: Vec<PathBuf>,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(out_dir: &Path) -> Result<Run> {
        fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
        Ok(Run {
            out_dir: out_dir.to_path_buf(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    /// Records `path` as an input and returns it.
    pub fn input<'a>(&mut self, path: &'a Path) -> &'a Path {
        if !self.inputs.iter().any(|p| p == path) {
            self.inputs.push(path.to_path_buf());
        }
        path
    }

    /// Reserves an output file name and returns its full path.
    pub fn output(&mut self, name: &str) -> PathBuf {
        if !self.outputs.iter().any(|n| n == name) {
            self.outputs.push(name.to_string());
        }
        self.out_dir.join(name)
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        let path = self.output(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn finish(self, subcommand: &str, argv: &[String], seed: Option<u64>) -> Result<Manifest> {
        let digest = |p: &Path, shown: String| -> Result<FileDigest> {
            Ok(FileDigest {
                path: shown,
                sha256: sha256_file(p)?,
            })
        };
        let inputs = self
            .inputs
            .iter()
            .map(|p| digest(p, p.display().to_string()))
            .collect::<Result<_>>()?;
        let outputs = self
            .outputs
            .iter()
            .map(|n| digest(&self.out_dir.join(n), n.clone()))
            .collect::<Result<_>>()?;
        let manifest = Manifest {
            tool: "impl".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            argv: argv.to_vec(),
            cwd: std::env::current_dir()?.display().to_string(),
            seed,
            inputs,
            outputs,
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        };
        let path = self.out_dir.join(MANIFEST_NAME);
        fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(manifest)
    }
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
}

/// `argv` with its output directory replaced by `out_dir`.
fn with_out_dir(argv: &[String], out_dir: &Path) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len() + 2);
    let mut replaced = false;
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--out-dir" {
            it.next();
            out.push(a.clone());
            out.push(out_dir.display().to_string());
            replaced = true;
        } else if a.starts_with("--out-dir=") {
            out.push(format!("--out-dir={}", out_dir.display()));
            replaced = true;
        } else {
            out.push(a.clone());
        }
    }
    if !replaced {
        out.push("--out-dir".into());
        out.push(out_dir.display().to_string());
    }
    out
}

/// Re-runs the recorded invocation into `out_dir` and checks every output.
/// Returns the number of files compared.
pub fn replay(args: &ReplayArgs, out_dir: &Path) -> Result<usize> {
    let text = fs::read_to_string(&args.manifest).with_context(|| format!("reading {}", args.manifest.display()))?;
    let recorded: Manifest = serde_json::from_str(&text).context("parsing manifest")?;
    if recorded.subcommand == "replay" {
        bail!("a replay manifest cannot be replayed");
    }
    let out_dir = std::path::absolute(out_dir)?;
    let caller_dir = std::env::current_dir()?;
    std::env::set_current_dir(&recorded.cwd).with_context(|| format!("entering {}", recorded.cwd))?;
    let result = (|| {
        for input in &recorded.inputs {
            let now = sha256_file(Path::new(&input.path))?;
            if now != input.sha256 {
                bail!("input {} changed since the recorded run", input.path);
            }
        }
        let argv = with_out_dir(&recorded.argv, &out_dir);
        let cli = Cli::try_parse_from(std::iter::once("impl".to_string()).chain(argv.iter().cloned()))?;
        crate::commands::run(cli, argv)?;
        let mut mismatches = Vec::new();
        for output in &recorded.outputs {
            let path = out_dir.join(&output.path);
            match sha256_file(&path) {
                Ok(d) if d == output.sha256 => println!("identical\t{}", output.path),
                Ok(_) => {
                    println!("differs\t{}", output.path);
                    mismatches.push(output.path.clone());
                }
                Err(_) => {
                    println!("missing\t{}", output.path);
                    mismatches.push(output.path.clone());
                }
            }
        }
        if !mismatches.is_empty() {
            bail!("{} of {} outputs differ: {}", mismatches.len(), recorded.outputs.len(), mismatches.join(", "));
        }
        Ok(recorded.outputs.len())
    })();
    std::env::set_current_dir(caller_dir)?;
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_dir_is_replaced_or_appended() {
        let v = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let d = Path::new("/new");
        assert_eq!(with_out_dir(&v(&["perturb", "--out-dir", "old", "--x"]), d), v(&["perturb", "--out-dir", "/new", "--x"]));
        assert_eq!(with_out_dir(&v(&["perturb", "--out-dir=old"]), d), v(&["perturb", "--out-dir=/new"]));
        assert_eq!(with_out_dir(&v(&["perturb"]), d), v(&["perturb", "--out-dir", "/new"]));
    }
}
