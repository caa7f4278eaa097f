//! Text formats: the `mtable` group file, cycle notation, embedding lines.

use thiserror::Error;

use crate::group::{Embedding, Group, GroupError};
use crate::perm::Perm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

/// Parses and validates an `mtable` block. Lines starting with `#` and blank
/// lines are skipped; anything after the n table rows is ignored.
pub fn parse_mtable(text: &str) -> Result<Group, IoError> {
    let (g, _) = parse_mtable_prefix(text)?;
    Ok(g)
}

/// Like [`parse_mtable`], also returning the unconsumed lines (with their
/// 1-based line numbers).
pub fn parse_mtable_prefix(text: &str) -> Result<(Group, Vec<(usize, &str)>), IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("mtable") {
        return Err(parse_err(hl, "expected `mtable <n>` header"));
    }
    let n: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| parse_err(hl, "bad order in header"))?;
    if parts.next().is_some() {
        return Err(parse_err(hl, "trailing tokens in header"));
    }
    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        let (ln, line) = lines.next().ok_or_else(|| parse_err(hl + r + 1, format!("missing row {r}")))?;
        let row: Vec<u64> = line
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|_| parse_err(ln, format!("bad entry `{t}`"))))
            .collect::<Result<_, _>>()?;
        if row.len() != n {
            return Err(parse_err(ln, format!("row has {} entries, expected {n}", row.len())));
        }
        rows.push(row);
    }
    let g = Group::from_table(&rows)?;
    Ok((g, lines.collect()))
}

pub fn format_mtable(g: &Group) -> String {
    let mut s = format!("mtable {}\n", g.order());
    for row in g.rows() {
        let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        s.push_str(&r.join(" "));
        s.push('\n');
    }
    s
}

/// Disjoint cycles, least moved point first, fixed points omitted.
pub fn format_permutation(p: &Perm) -> String {
    let cycles = p.cycles();
    if cycles.is_empty() {
        return "()".to_string();
    }
    cycles
        .iter()
        .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")))
        .collect()
}

pub fn format_indices(label: &str, xs: &[u32]) -> String {
    let body: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    if body.is_empty() {
        format!("{label}:")
    } else {
        format!("{label}: {}", body.join(" "))
    }
}

pub fn format_embedding(label: &str, e: &Embedding) -> String {
    let m: Vec<u32> = (0..e.source_order() as u32).map(|x| e.apply(x)).collect();
    format_indices(label, &m)
}

/// Parses `label: i0 i1 ...`.
pub fn parse_indices(line: &str, label: &str, line_no: usize) -> Result<Vec<u32>, IoError> {
    let rest = line
        .strip_prefix(label)
        .and_then(|r| r.strip_prefix(':'))
        .ok_or_else(|| parse_err(line_no, format!("expected `{label}:`")))?;
    rest.split_whitespace()
        .map(|t| t.parse::<u32>().map_err(|_| parse_err(line_no, format!("bad index `{t}`"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        assert_eq!(parse_mtable("mtable 1\n0").unwrap().order(), 1);
        assert_eq!(parse_mtable("mtable 2\n0 1\n1 0").unwrap().order(), 2);
        assert_eq!(parse_mtable("mtable 2\n0 1\n1 1"), Err(IoError::Group(GroupError::NoInverse(1))));
        assert!(matches!(parse_mtable("mtable 2\n# c\n0 1\n1"), Err(IoError::Parse { line: 4, .. })));
        assert!(matches!(parse_mtable("table 2"), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(format_permutation(&Perm::identity(4)), "()");
        assert_eq!(format_permutation(&Perm::from_images(vec![1, 0, 2]).unwrap()), "(0 1)");
        assert_eq!(format_permutation(&Perm::from_images(vec![0, 1, 3, 4, 2]).unwrap()), "(2 3 4)");
        assert_eq!(format_permutation(&Perm::from_images(vec![1, 0, 3, 2]).unwrap()), "(0 1)(2 3)");
    }

    #[test]
    fn round_trip_corpus() {
        for (_, g) in crate::corpus::small_groups() {
            let back = parse_mtable(&format_mtable(&g)).unwrap();
            assert_eq!(back.rows(), g.rows());
        }
    }
}
