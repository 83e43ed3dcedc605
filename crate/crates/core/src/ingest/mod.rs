//! On-disk formats: CoNLL-U parses, book metadata, NER spans, crowd
//! annotations and tuple stores. All text is UTF-8 with LF line endings.

pub mod annotations;
pub mod conllu;
pub mod meta;
pub mod ner;
pub mod tuples;

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub use annotations::{read_annotations, AnnotationRecord, AnnotationSet, IndexedAnnotations};
pub use conllu::{read_conllu, ParsedSentence, ParsedToken};
pub use meta::{read_book_metadata, BookMeta, Ideology};
pub use ner::{read_ner_spans, write_ner_spans, EntityType, NerSpan};
pub use tuples::{read_tuples, write_tuples};

/// `*.conllu` files directly under `dir`, sorted by file name.
pub fn conllu_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|ext| ext == "conllu") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Reads one CoNLL-U file fully; returns the sentences and the skip count.
pub fn read_conllu_file(path: impl AsRef<Path>) -> Result<(Vec<ParsedSentence>, usize)> {
    let mut reader = read_conllu(path)?;
    let sentences = reader.by_ref().collect::<Result<Vec<_>>>()?;
    Ok((sentences, reader.skipped()))
}
