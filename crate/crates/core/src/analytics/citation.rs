use std::cmp::Ordering;

use serde::Serialize;

use crate::error::Result;
use crate::ingest::{BookMeta, Ideology};

use super::holders::{ideology_map, BeliefHolderRecord};

pub const DEFAULT_MIN_BOOKS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CitationRatioRow {
    pub canonical: String,
    pub n_left: usize,
    pub n_right: usize,
    pub p_left: f64,
    pub p_right: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CitationRanking {
    pub total_left: usize,
    pub total_right: usize,
    /// Descending ratio: holders cited more by left-wing books.
    pub left_leaning: Vec<CitationRatioRow>,
    /// Ascending ratio.
    pub right_leaning: Vec<CitationRatioRow>,
}

/// Pseudocounted book proportion (n + 1) / (N + 1).
pub fn proportion(n: usize, total: usize) -> f64 {
    (n as f64 + 1.0) / (total as f64 + 1.0)
}

/// Ranks holders cited in at least `min_books` left or right books.
/// Centrist books count toward neither side nor the threshold.
pub fn citation_ratios(records: &[BeliefHolderRecord], meta: &[BookMeta], min_books: usize) -> Result<CitationRanking> {
    let ideology = ideology_map(meta);
    let total_left = meta.iter().filter(|m| m.ideology == Ideology::Left).count();
    let total_right = meta.iter().filter(|m| m.ideology == Ideology::Right).count();
    let mut rows = Vec::new();
    for r in records {
        let (n_left, n_right, _) = r.ideology_counts(&ideology)?;
        if n_left + n_right < min_books {
            continue;
        }
        let p_left = proportion(n_left, total_left);
        let p_right = proportion(n_right, total_right);
        rows.push(CitationRatioRow {
            canonical: r.canonical.clone(),
            n_left,
            n_right,
            p_left,
            p_right,
            ratio: p_left / p_right,
        });
    }
    let by = |desc: bool| {
        move |a: &CitationRatioRow, b: &CitationRatioRow| {
            let o = a.ratio.partial_cmp(&b.ratio).unwrap_or(Ordering::Equal);
            (if desc { o.reverse() } else { o }).then_with(|| a.canonical.cmp(&b.canonical))
        }
    };
    let mut left_leaning = rows.clone();
    left_leaning.sort_by(by(true));
    rows.sort_by(by(false));
    Ok(CitationRanking {
        total_left,
        total_right,
        left_leaning,
        right_leaning: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn meta(n_left: usize, n_right: usize, n_centrist: usize) -> Vec<BookMeta> {
        let mk = |id: String, ideology| BookMeta {
            book_id: id,
            title: String::new(),
            author: String::new(),
            year: 2000,
            ideology,
        };
        (0..n_left)
            .map(|i| mk(format!("L{i}"), Ideology::Left))
            .chain((0..n_right).map(|i| mk(format!("R{i}"), Ideology::Right)))
            .chain((0..n_centrist).map(|i| mk(format!("C{i}"), Ideology::Centrist)))
            .collect()
    }

    fn record(name: &str, books: impl IntoIterator<Item = String>) -> BeliefHolderRecord {
        let books: BTreeSet<String> = books.into_iter().collect();
        BeliefHolderRecord {
            canonical: name.into(),
            mention_count: books.len(),
            books,
        }
    }

    #[test]
    fn all_left_books_edge_case() {
        let m = meta(133, 226, 11);
        let r = record("x", (0..133).map(|i| format!("L{i}")));
        let out = citation_ratios(&[r], &m, 8).unwrap();
        let row = &out.left_leaning[0];
        assert_eq!((row.n_left, row.n_right), (133, 0));
        assert!((row.ratio - 227.0).abs() < 1e-9);
    }

    #[test]
    fn threshold_ignores_centrists() {
        let m = meta(10, 10, 10);
        let books = (0..7).map(|i| format!("L{i}")).chain((0..5).map(|i| format!("C{i}")));
        let out = citation_ratios(&[record("x", books)], &m, 8).unwrap();
        assert!(out.left_leaning.is_empty());
    }

    #[test]
    fn rankings_and_ties() {
        let m = meta(10, 10, 0);
        let left = |n: usize| (0..n).map(|i| format!("L{i}")).collect::<Vec<_>>();
        let right = |n: usize| (0..n).map(|i| format!("R{i}")).collect::<Vec<_>>();
        let recs = [
            record("b", [left(4), right(4)].concat()),
            record("a", [left(4), right(4)].concat()),
            record("c", [left(8), right(1)].concat()),
        ];
        let out = citation_ratios(&recs, &m, 8).unwrap();
        let names = |rows: &[CitationRatioRow]| rows.iter().map(|r| r.canonical.clone()).collect::<Vec<_>>();
        assert_eq!(names(&out.left_leaning), ["c", "a", "b"]);
        assert_eq!(names(&out.right_leaning), ["a", "b", "c"]);
    }

    #[test]
    fn unknown_book_is_an_error() {
        assert!(citation_ratios(&[record("x", ["nope".to_string()])], &meta(1, 1, 0), 0).is_err());
    }
}
