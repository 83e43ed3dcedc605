//! Crowd judgment CSV.
//!
//! ```text
//! #labels=CT+|CT-|PR+|PS+|Uu|NE
//! item_id,annotator_id,label
//! t1,w7,CT+
//! ```

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub item_id: String,
    pub annotator_id: String,
    pub label_index: usize,
}

/// All judgments of one dataset, at most one per (item, annotator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationSet {
    pub labels: Vec<String>,
    pub records: Vec<AnnotationRecord>,
    /// Records overwritten by a later record for the same (item, annotator).
    pub duplicates: usize,
}

/// Dense integer view used by the aggregation and agreement code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedAnnotations {
    pub k: usize,
    pub items: Vec<String>,
    pub annotators: Vec<String>,
    /// (item, annotator, label), grouped by nothing in particular.
    pub judgments: Vec<(usize, usize, usize)>,
}

impl AnnotationSet {
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    /// Items and annotators numbered by first appearance.
    pub fn indexed(&self) -> IndexedAnnotations {
        let mut items = Vec::new();
        let mut item_ix = HashMap::new();
        let mut annotators = Vec::new();
        let mut annotator_ix = HashMap::new();
        let mut judgments = Vec::with_capacity(self.records.len());
        for r in &self.records {
            let i = *item_ix.entry(r.item_id.clone()).or_insert_with(|| {
                items.push(r.item_id.clone());
                items.len() - 1
            });
            let a = *annotator_ix.entry(r.annotator_id.clone()).or_insert_with(|| {
                annotators.push(r.annotator_id.clone());
                annotators.len() - 1
            });
            judgments.push((i, a, r.label_index));
        }
        IndexedAnnotations {
            k: self.k(),
            items,
            annotators,
            judgments,
        }
    }
}

impl IndexedAnnotations {
    /// Labels per item, in judgment order.
    pub fn labels_by_item(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.items.len()];
        for &(i, _, l) in &self.judgments {
            out[i].push(l);
        }
        out
    }
}

pub fn read_annotations(path: impl AsRef<Path>) -> Result<AnnotationSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(file, &path.display().to_string())
}

pub fn parse_annotations<R: Read>(reader: R, name: &str) -> Result<AnnotationSet> {
    let mut reader = BufReader::new(reader);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| Error::io(name, e))?;
    let labels: Vec<String> = first
        .trim_end()
        .strip_prefix("#labels=")
        .ok_or_else(|| Error::parse(name, 1, "first line must declare labels as `#labels=a|b|c`"))?
        .split('|')
        .map(|s| s.trim().to_string())
        .collect();
    if labels.iter().any(String::is_empty) {
        return Err(Error::parse(name, 1, "empty label in label declaration"));
    }
    let label_ix: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    if label_ix.len() != labels.len() {
        return Err(Error::parse(name, 1, "duplicate label in label declaration"));
    }

    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::parse(name, 2, e.to_string()))?.clone();
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    if names != ["item_id", "annotator_id", "label"] {
        return Err(Error::parse(
            name,
            2,
            format!("expected header item_id,annotator_id,label, found {names:?}"),
        ));
    }

    let mut records: Vec<AnnotationRecord> = Vec::new();
    let mut position: HashMap<(String, String), usize> = HashMap::new();
    let mut duplicates = 0;
    for (i, row) in rdr.records().enumerate() {
        let line = i + 3;
        let row = row.map_err(|e| Error::parse(name, line, e.to_string()))?;
        if row.len() != 3 {
            return Err(Error::parse(
                name,
                line,
                format!("expected 3 fields, found {}", row.len()),
            ));
        }
        let item_id = row[0].trim().to_string();
        let annotator_id = row[1].trim().to_string();
        let label = row[2].trim();
        let label_index = *label_ix
            .get(label)
            .ok_or_else(|| Error::parse(name, line, format!("label {label:?} not in declared labels")))?;
        let key = (item_id.clone(), annotator_id.clone());
        if let Some(&at) = position.get(&key) {
            records[at].label_index = label_index;
            duplicates += 1;
            log::warn!("{name}:{line}: duplicate judgment for {key:?}, keeping the later one");
        } else {
            position.insert(key, records.len());
            records.push(AnnotationRecord {
                item_id,
                annotator_id,
                label_index,
            });
        }
    }
    Ok(AnnotationSet {
        labels,
        records,
        duplicates,
    })
}

pub fn write_annotations<W: Write>(mut out: W, set: &AnnotationSet) -> std::io::Result<()> {
    writeln!(out, "#labels={}", set.labels.join("|"))?;
    writeln!(out, "item_id,annotator_id,label")?;
    for r in &set.records {
        writeln!(out, "{},{},{}", r.item_id, r.annotator_id, set.labels[r.label_index])?;
    }
    Ok(())
}
