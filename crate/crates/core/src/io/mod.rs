//! File formats, synthetic data and the experiment runner behind the CLI.

mod config;
mod embeddings;
mod experiment;
mod ratings;
mod stats;
mod synthetic;

pub use config::{ExperimentConfig, ObjectiveKind};
pub use embeddings::{load_embeddings, parse_embeddings, write_embeddings};
pub use experiment::{build_instance, run_experiment, run_trace, write_outputs, Instance, RunOutput, Summary, CURVATURE_CAP};
pub use ratings::{load_ratings, parse_ratings, RatingTable};
pub use stats::{load_stats, parse_stats, write_stats};
pub use synthetic::{gen_synthetic, SyntheticSpec};

use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

fn line_of(record: &csv::StringRecord) -> Option<u64> {
    record.position().map(|p| p.line())
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::format(line, format!("{kind:?}")),
    }
}

fn reader<R: std::io::Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(r)
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, what: &str) -> Result<T> {
    let raw = record.get(idx).unwrap_or("").trim();
    raw.parse()
        .map_err(|_| Error::format(line_of(record), format!("{what}: cannot parse {raw:?}")))
}
