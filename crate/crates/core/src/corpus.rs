//! Corpus ingestion and sentence segmentation.
//!
//! Input corpora are line-delimited JSON records with fields `id`, `date`
//! (ISO-8601 day), `title`, and `body`. Ingestion keeps records whose title or
//! body contains at least one filter keyword as a whole word
//! (case-insensitive), then segmentation splits each body into sentences of at
//! most [`MAX_SENTENCE_TOKENS`] whitespace tokens.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::io::BufRead;
use thiserror::Error;

/// Upper bound on tokens per sentence.
pub const MAX_SENTENCE_TOKENS: usize = 128;

/// Default keyword filter for China-relevant articles.
pub const DEFAULT_KEYWORDS: [&str; 5] = ["China", "Chinese", "Beijing", "Peking", "Shanghai"];

/// One dated news document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    pub publication_date: NaiveDate,
    /// Calendar year of `publication_date`.
    pub year: i32,
    pub title: String,
    pub body: String,
}

/// One bounded-length sentence of an article.
///
/// `text` is the sentence's whitespace tokens joined by single spaces, so
/// concatenating an article's sentences in index order reproduces the body's
/// token sequence exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub article_id: String,
    /// 0-based ordinal within the article.
    pub index: usize,
    pub text: String,
    pub token_count: usize,
}

/// A recoverable per-record ingestion problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    /// 1-based line number in the input file.
    pub line: usize,
    pub message: String,
}

/// Result of ingesting a corpus file.
#[derive(Debug, Clone)]
pub struct IngestOutcome {
    /// Matching articles, sorted by id.
    pub articles: Vec<Article>,
    /// Malformed records that were skipped.
    pub record_errors: Vec<RecordError>,
    /// Well-formed records that matched no keyword.
    pub filtered_out: usize,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("empty filter")]
    EmptyFilter,
    #[error("duplicate article id: {0}")]
    DuplicateId(String),
    #[error("i/o error reading corpus")]
    Io(#[from] std::io::Error),
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    date: String,
    title: String,
    body: String,
}

/// Reads a line-delimited corpus, keeping records that match the keyword
/// filter.
///
/// Malformed records (bad JSON, unparseable date, tokenless body) are reported
/// per line in [`IngestOutcome::record_errors`] and skipped; a duplicate id is
/// fatal. The returned articles are sorted by id, so the result is independent
/// of input record order.
pub fn ingest_corpus<R: BufRead>(
    reader: R,
    keywords: &[String],
) -> Result<IngestOutcome, CorpusError> {
    if keywords.is_empty() || keywords.iter().all(|k| k.trim().is_empty()) {
        return Err(CorpusError::EmptyFilter);
    }
    let keywords: BTreeSet<String> = keywords
        .iter()
        .filter(|k| !k.trim().is_empty())
        .map(|k| k.trim().to_lowercase())
        .collect();

    let mut articles = Vec::new();
    let mut record_errors = Vec::new();
    let mut filtered_out = 0usize;
    let mut seen_ids = BTreeSet::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                record_errors.push(RecordError {
                    line: line_no,
                    message: format!("malformed record: {e}"),
                });
                continue;
            }
        };
        let date = match NaiveDate::parse_from_str(&raw.date, "%Y-%m-%d") {
            Ok(d) => d,
            Err(_) => {
                record_errors.push(RecordError {
                    line: line_no,
                    message: format!("unparseable date: {:?}", raw.date),
                });
                continue;
            }
        };
        if raw.body.split_whitespace().next().is_none() {
            record_errors.push(RecordError {
                line: line_no,
                message: "empty body".to_string(),
            });
            continue;
        }
        if !seen_ids.insert(raw.id.clone()) {
            return Err(CorpusError::DuplicateId(raw.id));
        }
        if !contains_keyword(&raw.title, &keywords) && !contains_keyword(&raw.body, &keywords) {
            filtered_out += 1;
            continue;
        }
        articles.push(Article {
            year: date.year(),
            id: raw.id,
            publication_date: date,
            title: raw.title,
            body: raw.body,
        });
    }

    articles.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(IngestOutcome {
        articles,
        record_errors,
        filtered_out,
    })
}

/// Whole-word, case-insensitive keyword match. Words are maximal alphanumeric
/// runs, so "Beijing's" matches "beijing" but "Chinatown" does not match
/// "china". Keywords are matched as single words.
fn contains_keyword(text: &str, keywords: &BTreeSet<String>) -> bool {
    words(text).any(|w| keywords.contains(&w))
}

fn words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
}

/// Splits an article body into sentences.
///
/// The body is cut after `.`, `!`, or `?` when followed by whitespace or end
/// of text; any unit longer than [`MAX_SENTENCE_TOKENS`] whitespace tokens is
/// split further into consecutive chunks of at most that many tokens, greedily
/// from the left. A whitespace-only body yields no sentences.
pub fn segment(article: &Article) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    for unit in split_terminal(&article.body) {
        let tokens: Vec<&str> = unit.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        for chunk in tokens.chunks(MAX_SENTENCE_TOKENS) {
            sentences.push(Sentence {
                article_id: article.id.clone(),
                index: sentences.len(),
                text: chunk.join(" "),
                token_count: chunk.len(),
            });
        }
    }
    sentences
}

/// Cuts `body` after terminal punctuation followed by whitespace or end.
fn split_terminal(body: &str) -> Vec<&str> {
    let mut units = Vec::new();
    let mut start = 0;
    let mut chars = body.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let at_break = match chars.peek() {
                None => true,
                Some((_, next)) => next.is_whitespace(),
            };
            if at_break {
                let end = i + c.len_utf8();
                units.push(&body[start..end]);
                start = end;
            }
        }
    }
    if start < body.len() {
        units.push(&body[start..]);
    }
    units
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn kw(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn article(body: &str) -> Article {
        Article {
            id: "a1".into(),
            publication_date: NaiveDate::from_ymd_opt(1987, 6, 1).unwrap(),
            year: 1987,
            title: "t".into(),
            body: body.into(),
        }
    }

    #[test]
    fn keyword_filter_keeps_matching_records() {
        let data = concat!(
            r#"{"id":"a1","date":"1987-06-01","title":"Trade news","body":"China signed a deal."}"#,
            "\n",
            r#"{"id":"a2","date":"1988-01-02","title":"Beijing report","body":"Markets moved."}"#,
            "\n",
            r#"{"id":"a3","date":"1989-03-03","title":"Local story","body":"Nothing relevant here."}"#,
            "\n",
        );
        let out = ingest_corpus(Cursor::new(data), &kw(&["China", "Beijing"])).unwrap();
        assert_eq!(out.articles.len(), 2);
        assert_eq!(out.filtered_out, 1);
        assert!(out.record_errors.is_empty());
        let ids: Vec<&str> = out.articles.iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, ["a1", "a2"]);
    }

    #[test]
    fn empty_keyword_list_is_an_error() {
        let err = ingest_corpus(Cursor::new(""), &[]).unwrap_err();
        assert!(matches!(err, CorpusError::EmptyFilter));
        let err = ingest_corpus(Cursor::new(""), &kw(&["  "])).unwrap_err();
        assert!(matches!(err, CorpusError::EmptyFilter));
    }

    #[test]
    fn year_is_projected_from_date() {
        let data = r#"{"id":"a1","date":"1987-06-01","title":"x","body":"China."}"#;
        let out = ingest_corpus(Cursor::new(data), &kw(&["China"])).unwrap();
        assert_eq!(out.articles[0].year, 1987);
        assert_eq!(
            out.articles[0].publication_date,
            NaiveDate::from_ymd_opt(1987, 6, 1).unwrap()
        );
    }

    #[test]
    fn malformed_records_are_reported_with_line_numbers() {
        let data = concat!(
            r#"{"id":"a1","date":"1987-06-01","title":"x","body":"China leads."}"#,
            "\n",
            "{not json}\n",
            r#"{"id":"a2","date":"06/01/1987","title":"x","body":"China again."}"#,
            "\n",
            r#"{"id":"a3","date":"1990-01-01","title":"x","body":"   "}"#,
            "\n",
        );
        let out = ingest_corpus(Cursor::new(data), &kw(&["China"])).unwrap();
        assert_eq!(out.articles.len(), 1);
        assert_eq!(out.record_errors.len(), 3);
        assert_eq!(out.record_errors[0].line, 2);
        assert_eq!(out.record_errors[1].line, 3);
        assert!(out.record_errors[1].message.contains("unparseable date"));
        assert_eq!(out.record_errors[2].line, 4);
        assert!(out.record_errors[2].message.contains("empty body"));
    }

    #[test]
    fn duplicate_id_is_fatal() {
        let data = concat!(
            r#"{"id":"a1","date":"1987-06-01","title":"x","body":"China one."}"#,
            "\n",
            r#"{"id":"a1","date":"1988-06-01","title":"x","body":"China two."}"#,
            "\n",
        );
        let err = ingest_corpus(Cursor::new(data), &kw(&["China"])).unwrap_err();
        match err {
            CorpusError::DuplicateId(id) => assert_eq!(id, "a1"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn duplicate_id_is_fatal_even_when_filtered_out() {
        let data = concat!(
            r#"{"id":"a1","date":"1987-06-01","title":"x","body":"no match"}"#,
            "\n",
            r#"{"id":"a1","date":"1988-06-01","title":"x","body":"also none"}"#,
            "\n",
        );
        let err = ingest_corpus(Cursor::new(data), &kw(&["China"])).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId(_)));
    }

    #[test]
    fn whole_word_matching() {
        let keywords: BTreeSet<String> = ["china".to_string()].into();
        assert!(contains_keyword("Made in China, 1987", &keywords));
        assert!(contains_keyword("china's growth", &keywords));
        assert!(!contains_keyword("the Chinatown parade", &keywords));
        assert!(contains_keyword("CHINA", &keywords));
    }

    #[test]
    fn ingest_is_order_independent() {
        let a = r#"{"id":"a1","date":"1987-06-01","title":"x","body":"China one."}"#;
        let b = r#"{"id":"a2","date":"1988-06-01","title":"x","body":"China two."}"#;
        let fwd = ingest_corpus(Cursor::new(format!("{a}\n{b}\n")), &kw(&["China"])).unwrap();
        let rev = ingest_corpus(Cursor::new(format!("{b}\n{a}\n")), &kw(&["China"])).unwrap();
        assert_eq!(fwd.articles, rev.articles);
    }

    #[test]
    fn segment_splits_at_terminal_punctuation() {
        let s = segment(&article("It rains. It pours."));
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].text, "It rains.");
        assert_eq!(s[0].token_count, 2);
        assert_eq!(s[1].text, "It pours.");
        assert_eq!(s[1].token_count, 2);
        assert_eq!(s[0].index, 0);
        assert_eq!(s[1].index, 1);
    }

    #[test]
    fn segment_chunks_long_unpunctuated_bodies() {
        let body = (0..300).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
        let s = segment(&article(&body));
        let counts: Vec<usize> = s.iter().map(|x| x.token_count).collect();
        assert_eq!(counts, [128, 128, 44]);
    }

    #[test]
    fn segment_of_whitespace_body_is_empty() {
        assert!(segment(&article(" \t \n ")).is_empty());
    }

    #[test]
    fn segment_handles_punctuation_without_whitespace() {
        // "U.S." style: the inner period is not followed by whitespace.
        let s = segment(&article("The U.S. economy grew! Analysts agreed?"));
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].text, "The U.S.");
        assert_eq!(s[1].text, "economy grew!");
        assert_eq!(s[2].text, "Analysts agreed?");
    }

    proptest! {
        #[test]
        fn tokens_round_trip_and_bounds_hold(body in "[a-zA-Z0-9 .!?\\n]{0,600}") {
            let art = article(&body);
            let sentences = segment(&art);
            let mut joined: Vec<&str> = Vec::new();
            for s in &sentences {
                prop_assert!(s.token_count >= 1);
                prop_assert!(s.token_count <= MAX_SENTENCE_TOKENS);
                prop_assert_eq!(s.text.split_whitespace().count(), s.token_count);
                joined.extend(s.text.split_whitespace());
            }
            let original: Vec<&str> = body.split_whitespace().collect();
            prop_assert_eq!(joined, original);
        }
    }
}
