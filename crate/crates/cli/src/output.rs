//! Emitting command output together with a run manifest.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cellform::catalog::write_atomic;
use cellform::ctengine::ENGINE_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub engine_version: String,
    pub wall_time_seconds: f64,
    /// SHA-256 of the emitted output, hex encoded.
    pub checksum: String,
    pub failures: usize,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value, output: &str, wall: Duration, failures: usize) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            engine_version: ENGINE_VERSION.to_string(),
            wall_time_seconds: wall.as_secs_f64(),
            checksum: checksum(output),
            failures,
        }
    }
}

pub fn checksum(output: &str) -> String {
    hex::encode(Sha256::digest(output.as_bytes()))
}

/// Write `output` to `out` (atomically) or stdout, and the manifest to
/// `<out>.manifest.json` or stderr.
pub fn emit(out: Option<&Path>, output: &str, manifest: &RunManifest) -> anyhow::Result<()> {
    let manifest_json = serde_json::to_string(manifest)?;
    match out {
        Some(path) => {
            write_atomic(path, output)?;
            let mut name = path.as_os_str().to_owned();
            name.push(".manifest.json");
            write_atomic(Path::new(&name), &(manifest_json + "\n"))?;
        }
        None => {
            print!("{output}");
            eprintln!("{manifest_json}");
        }
    }
    Ok(())
}

/// One CSV record, quoting fields that need it.
pub fn csv_line<S: AsRef<str>>(fields: &[S]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            let f = f.as_ref();
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.to_string()
            }
        })
        .collect();
    quoted.join(",") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_line(&["a", "1,2", "say \"x\""]), "a,\"1,2\",\"say \"\"x\"\"\"\n");
    }

    #[test]
    fn checksum_is_sha256() {
        assert_eq!(checksum(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
