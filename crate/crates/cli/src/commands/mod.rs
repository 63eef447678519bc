use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::output::Format;

pub mod cfs;
pub mod diamond;
pub mod kitaev;
pub mod matrices;
pub mod oracle;

#[derive(Clone, Debug)]
pub struct Globals {
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
}

pub const DEFAULT_SEED: u64 = 42;

/// The generator for stream `stream` of a run; trial `i` of a batch uses
/// stream `i`, so results do not depend on scheduling.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn file_digest(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

pub fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

pub fn finite(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite, got {v}")))
    }
}
