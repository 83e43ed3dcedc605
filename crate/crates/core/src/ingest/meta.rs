use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const METADATA_COLUMNS: [&str; 5] = ["book_id", "title", "author", "year", "ideology"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Ideology {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
    #[serde(rename = "C")]
    Centrist,
}

impl Ideology {
    pub fn code(self) -> &'static str {
        match self {
            Ideology::Left => "L",
            Ideology::Right => "R",
            Ideology::Centrist => "C",
        }
    }
}

impl fmt::Display for Ideology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Ideology {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "L" => Ok(Ideology::Left),
            "R" => Ok(Ideology::Right),
            "C" => Ok(Ideology::Centrist),
            other => Err(format!("unknown ideology code {other:?} (expected L, R or C)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BookMeta {
    pub book_id: String,
    pub title: String,
    pub author: String,
    pub year: i32,
    pub ideology: Ideology,
}

/// Reads the tab-separated book metadata table. The header row is mandatory.
pub fn read_book_metadata(path: impl AsRef<Path>) -> Result<Vec<BookMeta>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_book_metadata(file, &path.display().to_string())
}

pub fn parse_book_metadata<R: std::io::Read>(reader: R, name: &str) -> Result<Vec<BookMeta>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::parse(name, 1, e.to_string()))?.clone();
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    if names != METADATA_COLUMNS {
        return Err(Error::parse(
            name,
            1,
            format!("expected header {:?}, found {names:?}", METADATA_COLUMNS.join("\t")),
        ));
    }

    let mut books = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::parse(name, line, e.to_string()))?;
        let field = |k: usize| record.get(k).unwrap_or("").trim().to_string();
        let book_id = field(0);
        let year = field(3)
            .parse::<i32>()
            .map_err(|_| Error::parse(name, line, format!("book {book_id:?}: invalid year {:?}", field(3))))?;
        let ideology = field(4)
            .parse::<Ideology>()
            .map_err(|why| Error::parse(name, line, format!("book {book_id:?}: {why}")))?;
        books.push(BookMeta {
            book_id,
            title: field(1),
            author: field(2),
            year,
            ideology,
        });
    }
    Ok(books)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub books: usize,
    pub left: usize,
    pub right: usize,
    pub centrist: usize,
    pub first_year: Option<i32>,
    pub last_year: Option<i32>,
}

pub fn corpus_stats(books: &[BookMeta]) -> CorpusStats {
    let mut by_ideology: BTreeMap<Ideology, usize> = BTreeMap::new();
    for b in books {
        *by_ideology.entry(b.ideology).or_default() += 1;
    }
    let count = |i| by_ideology.get(&i).copied().unwrap_or(0);
    CorpusStats {
        books: books.len(),
        left: count(Ideology::Left),
        right: count(Ideology::Right),
        centrist: count(Ideology::Centrist),
        first_year: books.iter().map(|b| b.year).min(),
        last_year: books.iter().map(|b| b.year).max(),
    }
}
