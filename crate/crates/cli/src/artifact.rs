//! Artifact headers and atomic writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn config_hash(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// First line of every artifact.
pub fn header_line(hash: &str, seed: Option<u64>) -> String {
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    format!("# surface-fidelity {VERSION} config_sha256={hash} seed={seed}\n")
}

/// Named artifact body, written below the header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub body: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, body: String) -> Self {
        Self { name: name.into(), body }
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Writes every artifact to a temporary name first and renames only after
/// all of them are on disk.
pub fn write_all(dir: &Path, header: &str, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut staged = Vec::new();
    for a in artifacts {
        let tmp = dir.join(format!(".{}.tmp", a.name));
        let mut f = fs::File::create(&tmp).map_err(io(&tmp))?;
        f.write_all(header.as_bytes()).map_err(io(&tmp))?;
        f.write_all(a.body.as_bytes()).map_err(io(&tmp))?;
        f.sync_all().map_err(io(&tmp))?;
        staged.push((tmp, dir.join(&a.name)));
    }
    let mut out = Vec::new();
    for (tmp, path) in staged {
        fs::rename(&tmp, &path).map_err(io(&path))?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_hex_sha256() {
        assert_eq!(config_hash(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn header_carries_seed() {
        assert!(header_line("ab", Some(3)).ends_with("config_sha256=ab seed=3\n"));
        assert!(header_line("ab", None).contains("seed=none"));
    }
}
