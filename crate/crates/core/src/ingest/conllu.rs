//! Reader for the 10-column CoNLL-U dependency format.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Token;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedToken {
    /// 1-based CoNLL-U ID.
    pub index: usize,
    pub form: String,
    pub lemma: Option<String>,
    pub upos: String,
    /// 0 marks the root.
    pub head: usize,
    pub deprel: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    pub doc_id: String,
    pub sent_id: String,
    pub tokens: Vec<ParsedToken>,
}

impl ParsedSentence {
    /// Token by 0-based position.
    pub fn token(&self, position: usize) -> &ParsedToken {
        &self.tokens[position]
    }

    /// 0-based position of the root token.
    pub fn root(&self) -> usize {
        self.tokens
            .iter()
            .position(|t| t.head == 0)
            .expect("validated sentence has a root")
    }

    /// 0-based position of the head of `position`, `None` for the root.
    pub fn head_of(&self, position: usize) -> Option<usize> {
        match self.tokens[position].head {
            0 => None,
            h => Some(h - 1),
        }
    }

    /// 0-based positions of the dependents of `position`, in sentence order.
    pub fn children(&self, position: usize) -> impl Iterator<Item = usize> + '_ {
        let id = position + 1;
        self.tokens
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.head == id)
            .map(|(i, _)| i)
    }

    /// Whether `node` lies in the subtree rooted at `ancestor` (inclusive).
    pub fn dominates(&self, ancestor: usize, node: usize) -> bool {
        let mut current = Some(node);
        let mut steps = 0;
        while let Some(n) = current {
            if n == ancestor {
                return true;
            }
            steps += 1;
            if steps > self.tokens.len() {
                return false;
            }
            current = self.head_of(n);
        }
        false
    }

    pub fn graph_tokens(&self) -> Vec<Token> {
        self.tokens
            .iter()
            .enumerate()
            .map(|(index, t)| Token {
                index,
                form: t.form.clone(),
            })
            .collect()
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let roots = self.tokens.iter().filter(|t| t.head == 0).count();
        if roots != 1 {
            return Err(format!("{roots} root tokens"));
        }
        let len = self.tokens.len();
        for (i, t) in self.tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(format!("token ids not contiguous at id {}", t.index));
            }
            if t.head > len {
                return Err(format!("head {} beyond sentence length {len}", t.head));
            }
        }
        // every token must reach the root
        for i in 0..len {
            if !self.dominates(self.root(), i) {
                return Err(format!("token {} is not connected to the root", i + 1));
            }
        }
        Ok(())
    }
}

/// Streams sentences from a CoNLL-U source.
///
/// Multiword-token ranges (`3-4`) and empty nodes (`5.1`) are skipped.
/// Sentences without exactly one root are skipped and counted; a line with
/// the wrong column count is a hard error.
pub struct ConlluReader<R> {
    reader: R,
    name: String,
    line_no: usize,
    doc_id: String,
    sent_in_doc: usize,
    skipped: usize,
    done: bool,
}

pub fn read_conllu(path: impl AsRef<Path>) -> Result<ConlluReader<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let default_doc = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(ConlluReader::new(
        BufReader::new(file),
        path.display().to_string(),
        default_doc,
    ))
}

impl<R: BufRead> ConlluReader<R> {
    /// `default_doc` is the document id used until a `# newdoc id` comment.
    pub fn new(reader: R, name: impl Into<String>, default_doc: impl Into<String>) -> Self {
        ConlluReader {
            reader,
            name: name.into(),
            line_no: 0,
            doc_id: default_doc.into(),
            sent_in_doc: 0,
            skipped: 0,
            done: false,
        }
    }

    /// Number of sentences dropped for having zero or several roots, or
    /// otherwise inconsistent heads.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.name.clone(), self.line_no, message)
    }

    fn parse_token(&self, line: &str) -> Result<Option<ParsedToken>> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(self.err(format!("expected 10 tab-separated columns, found {}", cols.len())));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            return Ok(None);
        }
        let index = id
            .parse::<usize>()
            .map_err(|_| self.err(format!("invalid token id {id:?}")))?;
        let head = cols[6]
            .parse::<usize>()
            .map_err(|_| self.err(format!("invalid head {:?}", cols[6])))?;
        let lemma = match cols[2] {
            "_" | "" => None,
            l => Some(l.to_string()),
        };
        Ok(Some(ParsedToken {
            index,
            form: cols[1].to_string(),
            lemma,
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
        }))
    }

    fn next_sentence(&mut self) -> Result<Option<ParsedSentence>> {
        loop {
            let mut sent_id = None;
            let mut tokens = Vec::new();
            let mut saw_content = false;
            let mut line = String::new();
            loop {
                line.clear();
                let n = self.reader.read_line(&mut line).map_err(|e| Error::io(&self.name, e))?;
                if n == 0 {
                    break;
                }
                self.line_no += 1;
                let trimmed = line.trim_end_matches(['\n', '\r']);
                if trimmed.trim().is_empty() {
                    if saw_content {
                        break;
                    }
                    continue;
                }
                saw_content = true;
                if let Some(comment) = trimmed.strip_prefix('#') {
                    let comment = comment.trim();
                    if let Some(v) = comment.strip_prefix("newdoc id") {
                        self.doc_id = v.trim_start().trim_start_matches('=').trim().to_string();
                        self.sent_in_doc = 0;
                    } else if let Some(v) = comment.strip_prefix("sent_id") {
                        sent_id = Some(v.trim_start().trim_start_matches('=').trim().to_string());
                    }
                    continue;
                }
                if let Some(token) = self.parse_token(trimmed)? {
                    tokens.push(token);
                }
            }
            if !saw_content {
                return Ok(None);
            }
            if tokens.is_empty() {
                continue;
            }
            self.sent_in_doc += 1;
            let sentence = ParsedSentence {
                doc_id: self.doc_id.clone(),
                sent_id: sent_id.unwrap_or_else(|| self.sent_in_doc.to_string()),
                tokens,
            };
            match sentence.validate() {
                Ok(()) => return Ok(Some(sentence)),
                Err(why) => {
                    log::warn!(
                        "{}: skipping sentence {}/{}: {why}",
                        self.name,
                        sentence.doc_id,
                        sentence.sent_id
                    );
                    self.skipped += 1;
                }
            }
        }
    }
}

impl<R: BufRead> Iterator for ConlluReader<R> {
    type Item = Result<ParsedSentence>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_sentence() {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Parses CoNLL-U text held in memory.
pub fn parse_conllu_str(text: &str, default_doc: &str) -> Result<(Vec<ParsedSentence>, usize)> {
    let mut reader = ConlluReader::new(text.as_bytes(), "<string>", default_doc);
    let sentences = reader.by_ref().collect::<Result<Vec<_>>>()?;
    Ok((sentences, reader.skipped()))
}
