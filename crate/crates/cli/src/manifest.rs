use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// What a command reports back for its manifest.
pub struct Outcome {
    pub inputs: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

#[derive(Serialize)]
struct InputDigest {
    path: PathBuf,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
    config_sha256: String,
    inputs: Vec<InputDigest>,
    summary: serde_json::Value,
    duration_ms: u128,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Runs a command and, if it succeeds, writes `<out>.manifest.json`.
pub fn run<C: Serialize>(command: &str, config: &C, out: &Path, body: impl FnOnce() -> Result<Outcome>) -> Result<()> {
    let start = Instant::now();
    let outcome = body()?;
    let config_json = serde_json::to_vec(config)?;
    let inputs = outcome
        .inputs
        .into_iter()
        .map(|path| {
            let bytes = std::fs::read(&path).with_context(|| format!("hashing {}", path.display()))?;
            Ok(InputDigest {
                sha256: sha256_hex(&bytes),
                path,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
        config_sha256: sha256_hex(&config_json),
        inputs,
        summary: outcome.summary,
        duration_ms: start.elapsed().as_millis(),
    };
    let path = manifest_path(out);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    log::info!("{command} finished in {} ms", manifest.duration_ms);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("out/model.ckpt")),
            PathBuf::from("out/model.ckpt.manifest.json")
        );
    }
}
