use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The eleven non-numeric OntoNotes entity types, plus a bucket for the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityType {
    Event,
    Facility,
    Gpe,
    Language,
    Law,
    Location,
    Norp,
    Organization,
    Person,
    Product,
    WorkOfArt,
    Other,
}

impl EntityType {
    pub const NAMED: [EntityType; 11] = [
        EntityType::Event,
        EntityType::Facility,
        EntityType::Gpe,
        EntityType::Language,
        EntityType::Law,
        EntityType::Location,
        EntityType::Norp,
        EntityType::Organization,
        EntityType::Person,
        EntityType::Product,
        EntityType::WorkOfArt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Event => "EVENT",
            EntityType::Facility => "FAC",
            EntityType::Gpe => "GPE",
            EntityType::Language => "LANGUAGE",
            EntityType::Law => "LAW",
            EntityType::Location => "LOC",
            EntityType::Norp => "NORP",
            EntityType::Organization => "ORG",
            EntityType::Person => "PERSON",
            EntityType::Product => "PRODUCT",
            EntityType::WorkOfArt => "WORK_OF_ART",
            EntityType::Other => "OTHER",
        }
    }

    pub fn is_named(self) -> bool {
        self != EntityType::Other
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = std::convert::Infallible;

    /// Accepts spaCy short labels and long names in any case; numeric and
    /// unknown types map to `Other`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = match s.trim().to_ascii_uppercase().replace(' ', "_").as_str() {
            "EVENT" => EntityType::Event,
            "FAC" | "FACILITY" => EntityType::Facility,
            "GPE" => EntityType::Gpe,
            "LANGUAGE" => EntityType::Language,
            "LAW" => EntityType::Law,
            "LOC" | "LOCATION" => EntityType::Location,
            "NORP" => EntityType::Norp,
            "ORG" | "ORGANIZATION" => EntityType::Organization,
            "PERSON" | "PER" => EntityType::Person,
            "PRODUCT" | "PROD" => EntityType::Product,
            "WORK_OF_ART" | "WOA" => EntityType::WorkOfArt,
            _ => EntityType::Other,
        };
        Ok(t)
    }
}

impl Serialize for EntityType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for EntityType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(s.parse().unwrap_or(EntityType::Other))
    }
}

/// Named-entity span over 0-based inclusive token positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerSpan {
    pub doc_id: String,
    pub sent_id: String,
    #[serde(rename = "start")]
    pub start_token: usize,
    #[serde(rename = "end")]
    pub end_token: usize,
    #[serde(rename = "type")]
    pub entity_type: EntityType,
    pub surface: String,
}

impl NerSpan {
    pub fn contains(&self, token: usize) -> bool {
        (self.start_token..=self.end_token).contains(&token)
    }

    pub fn check_bounds(&self, sentence_len: usize) -> Result<()> {
        if self.end_token >= sentence_len {
            return Err(Error::OutOfBounds {
                doc_id: self.doc_id.clone(),
                sent_id: self.sent_id.clone(),
                index: self.end_token,
                len: sentence_len,
            });
        }
        Ok(())
    }
}

pub fn read_ner_spans(path: impl AsRef<Path>) -> Result<Vec<NerSpan>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let mut spans = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let span: NerSpan = serde_json::from_str(&line).map_err(|e| Error::parse(&name, i + 1, e.to_string()))?;
        if span.start_token > span.end_token {
            return Err(Error::parse(
                &name,
                i + 1,
                format!("span start {} after end {}", span.start_token, span.end_token),
            ));
        }
        spans.push(span);
    }
    Ok(spans)
}

pub fn write_ner_spans(path: impl AsRef<Path>, spans: &[NerSpan]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for span in spans {
        let line = serde_json::to_string(span).expect("span serializes");
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ner.jsonl");
        std::fs::write(&path, "").unwrap();
        assert!(read_ner_spans(&path).unwrap().is_empty());
    }

    #[test]
    fn start_after_end_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ner.jsonl");
        std::fs::write(
            &path,
            r#"{"doc_id":"d","sent_id":"s","start":3,"end":1,"type":"PERSON","surface":"x"}"#,
        )
        .unwrap();
        assert!(matches!(read_ner_spans(&path), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ner.jsonl");
        let spans = vec![
            NerSpan {
                doc_id: "d".into(),
                sent_id: "1".into(),
                start_token: 0,
                end_token: 1,
                entity_type: EntityType::Person,
                surface: "Mitch McConnell".into(),
            },
            NerSpan {
                doc_id: "d".into(),
                sent_id: "2".into(),
                start_token: 4,
                end_token: 4,
                entity_type: EntityType::WorkOfArt,
                surface: "Bible".into(),
            },
        ];
        write_ner_spans(&path, &spans).unwrap();
        assert_eq!(read_ner_spans(&path).unwrap(), spans);
    }

    #[test]
    fn type_names() {
        assert_eq!("Organization".parse::<EntityType>().unwrap(), EntityType::Organization);
        assert_eq!("work of art".parse::<EntityType>().unwrap(), EntityType::WorkOfArt);
        assert_eq!("DATE".parse::<EntityType>().unwrap(), EntityType::Other);
        assert_eq!(EntityType::NAMED.len(), 11);
    }
}
