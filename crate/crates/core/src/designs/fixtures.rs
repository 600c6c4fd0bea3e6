//! Loading a directory of known-valid designs.
//!
//! The directory holds one matrix file per design, a `manifest.json` array
//! of `{"file", "family", "params"}` entries, and optionally a `SHA256SUMS`
//! file (`<hex digest>  <file name>` per line) guarding against edits.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{parse_matrix, DesignError, DesignMatrix, InstanceManifest, InstanceSpec};

pub const FIXTURE_MANIFEST: &str = "manifest.json";
pub const CHECKSUM_FILE: &str = "SHA256SUMS";

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Design { path: PathBuf, source: DesignError },
    #[error("{0}: manifest lists no fixtures")]
    Empty(PathBuf),
}

#[derive(Debug, Deserialize)]
struct ManifestEntry {
    file: String,
    #[serde(flatten)]
    instance: InstanceManifest,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub file: String,
    pub instance: InstanceSpec,
    pub matrix: DesignMatrix,
    /// `None` when the directory has no checksum entry for this file.
    pub checksum_matches: Option<bool>,
}

fn read(path: &Path) -> Result<String, FixtureError> {
    fs::read_to_string(path).map_err(|source| FixtureError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn load_fixture_dir(dir: &Path) -> Result<Vec<Fixture>, FixtureError> {
    let manifest_path = dir.join(FIXTURE_MANIFEST);
    let text = read(&manifest_path)?;
    let entries: Vec<ManifestEntry> =
        serde_json::from_str(&text).map_err(|e| FixtureError::Design {
            path: manifest_path.clone(),
            source: DesignError::Parse {
                line: e.line(),
                message: e.to_string(),
            },
        })?;
    if entries.is_empty() {
        return Err(FixtureError::Empty(dir.to_path_buf()));
    }

    let sums_path = dir.join(CHECKSUM_FILE);
    let sums: HashMap<String, String> = if sums_path.exists() {
        read(&sums_path)?
            .lines()
            .filter_map(|l| l.split_once("  "))
            .map(|(digest, file)| (file.trim().to_string(), digest.trim().to_lowercase()))
            .collect()
    } else {
        HashMap::new()
    };

    entries
        .into_iter()
        .map(|entry| {
            let path = dir.join(&entry.file);
            let design_err = |source| FixtureError::Design {
                path: path.clone(),
                source,
            };
            let instance = entry.instance.instance().map_err(design_err)?;
            let text = read(&path)?;
            let matrix = parse_matrix(&text).map_err(design_err)?;
            let checksum_matches = sums
                .get(&entry.file)
                .map(|expected| *expected == hex_digest(text.as_bytes()));
            Ok(Fixture {
                file: entry.file,
                instance,
                matrix,
                checksum_matches,
            })
        })
        .collect()
}
