//! File formats, report rendering and the command implementations behind
//! the `honkit` binary.

#![deny(unsafe_code)]

pub mod commands;
pub mod config;
mod error;
pub mod format;

use std::fs::File;
use std::io::{self, BufReader};
use std::path::Path;

pub use config::{Direction, OutputFormat, RunConfig};
pub use error::{Error, Result};
pub use format::{parse_paths, parse_str, write_lines, write_ngram, Format};

/// Reads a path file, or standard input when `path` is `-`.
pub fn read_corpus(path: &Path, format: Format) -> Result<honkit_core::PathCorpus> {
    if path.as_os_str() == "-" {
        return parse_paths(io::stdin().lock(), format).map_err(|e| e.in_file("<stdin>"));
    }
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_paths(BufReader::new(file), format).map_err(|e| e.in_file(path))
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    use std::io::Write;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
