use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::RunConfig;
use crate::io::IoError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Inputs, settings and outputs of one run. Contains nothing time- or
/// host-dependent, so identical runs produce identical manifests.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub seed: Option<u64>,
    pub rules: Vec<String>,
    pub n_primes: Vec<usize>,
    pub repetitions: usize,
    pub reference_formats: Vec<String>,
    pub normalize: bool,
    pub valuation: crate::model::ValuationScheme,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

fn digest(path: &Path) -> Result<FileDigest, IoError> {
    let bytes = fs::read(path).map_err(|e| IoError::file(path, e))?;
    Ok(FileDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) })
}

impl Manifest {
    pub fn build(config: &RunConfig, inputs: &[PathBuf], outputs: &[PathBuf]) -> Result<Self, IoError> {
        let stability = config.subcommand == super::Subcmd::Stability;
        Ok(Manifest {
            tool: "pbvote",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: config.subcommand.tag(),
            seed: config.seed,
            rules: config.rules.iter().map(|r| r.to_string()).collect(),
            n_primes: if stability { config.n_primes.clone() } else { Vec::new() },
            repetitions: if stability { config.repetitions } else { 0 },
            reference_formats: config.reference_formats.iter().map(|f| f.to_string()).collect(),
            normalize: config.normalize,
            valuation: config.valuation,
            inputs: inputs.iter().map(|p| digest(p)).collect::<Result<_, _>>()?,
            outputs: outputs.iter().map(|p| digest(p)).collect::<Result<_, _>>()?,
        })
    }
}
