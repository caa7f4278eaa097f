//! Command-line plumbing for `lfg`: group files, the bundled corpus, suite
//! runner and line-delimited JSON reports.

use std::path::{Path, PathBuf};

use lfgroup::group::Group;
use lfgroup::io::{parse_mtable, IoError};
use thiserror::Error;

pub mod report;
pub mod suites;

pub use report::{Record, SuiteReport, Verdict};
pub use suites::{run_suite, SuiteConfig, SUITES};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("corpus file {file}: {msg}")]
    CorpusLoadError { file: String, msg: String },
    #[error("{path}: {source}")]
    Parse { path: String, source: IoError },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// The mtable files shipped with the crate.
pub fn bundled_corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// `NN_name.mtable` files in name order; the name is the part after `NN_`.
pub fn load_corpus(dir: &Path) -> Result<Vec<(String, Group)>, CliError> {
    let err = |file: &Path, msg: String| CliError::CorpusLoadError { file: file.display().to_string(), msg };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| err(dir, e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mtable"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(err(dir, "no .mtable files".into()));
    }
    let mut out = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f).map_err(|e| err(&f, e.to_string()))?;
        let g = parse_mtable(&text).map_err(|e| err(&f, e.to_string()))?;
        let stem = f.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let name = stem.split_once('_').map_or(stem, |(_, n)| n).to_string();
        out.push((name, g));
    }
    Ok(out)
}

pub fn parse_group_file(path: &Path) -> Result<Group, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse_mtable(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

/// A path to an mtable file, a corpus name such as `D4`, or a product of
/// corpus names such as `S3xZ3`.
pub fn load_group(arg: &str) -> Result<Group, CliError> {
    let p = Path::new(arg);
    if p.exists() {
        return parse_group_file(p);
    }
    if let Some(g) = lfgroup::corpus::by_name(arg) {
        return Ok(g);
    }
    let factors: Option<Vec<Group>> = arg.split('x').map(lfgroup::corpus::by_name).collect();
    match factors {
        Some(fs) if fs.len() > 1 => Ok(lfgroup::corpus::product(&fs)),
        _ => Err(CliError::Usage(format!("no file or corpus group `{arg}`"))),
    }
}

/// Comma- or space-separated indices.
pub fn parse_list(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u32>().map_err(|_| CliError::Usage(format!("bad index `{t}`"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corpus_round_trips() {
        let c = load_corpus(&bundled_corpus_dir()).unwrap();
        let built = lfgroup::corpus::small_groups();
        assert_eq!(c.len(), built.len());
        for ((n, g), (m, h)) in c.iter().zip(&built) {
            assert_eq!(n, m);
            assert_eq!(g.rows(), h.rows());
            let again = parse_mtable(&lfgroup::io::format_mtable(g)).unwrap();
            assert_eq!(again.rows(), g.rows());
        }
    }

    #[test]
    fn broken_corpus_names_the_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("01_Z1.mtable"), "mtable 1\n0\n").unwrap();
        std::fs::write(dir.path().join("02_bad.mtable"), "mtable 2\n0 1\n1 1\n").unwrap();
        match load_corpus(dir.path()) {
            Err(CliError::CorpusLoadError { file, .. }) => assert!(file.ends_with("02_bad.mtable")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn group_names() {
        assert_eq!(load_group("Z2xZ2").unwrap().order(), 4);
        assert_eq!(load_group("S3xS3").unwrap().order(), 36);
        assert!(load_group("S3xQ9").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("0,2, 4").unwrap(), vec![0, 2, 4]);
        assert!(parse_list("").unwrap().is_empty());
        assert!(parse_list("x").is_err());
    }
}
