//! `ingest`: filter the corpus by keyword and segment bodies into sentences.

use mediatrend::corpus::CorpusError;
use mediatrend::io::write_jsonl;
use mediatrend::{ingest_corpus, segment, Sentence};

use super::{artifact_path, create_out_dir, open_reader, require_input, write_artifact};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::ManifestBuilder;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let corpus_path = require_input(&config.corpus, "corpus")?;
    create_out_dir(config)?;

    let reader = open_reader(corpus_path)?;
    let outcome = ingest_corpus(reader, &config.keywords).map_err(|e| match e {
        CorpusError::EmptyFilter => CliError::config("keywords", "keyword filter is empty"),
        other => CliError::internal(other),
    })?;
    for record_error in &outcome.record_errors {
        eprintln!(
            "warning: corpus line {}: {} (record skipped)",
            record_error.line, record_error.message
        );
    }

    let sentences: Vec<Sentence> = outcome.articles.iter().flat_map(segment).collect();

    let articles_path = artifact_path(config, super::ARTICLES);
    write_artifact(&articles_path, |w| {
        write_jsonl(w, &outcome.articles).map_err(CliError::internal)
    })?;
    let sentences_path = artifact_path(config, super::SENTENCES);
    write_artifact(&sentences_path, |w| {
        write_jsonl(w, &sentences).map_err(CliError::internal)
    })?;

    let mut manifest = ManifestBuilder::new("ingest");
    manifest.input(corpus_path)?;
    manifest.output(&articles_path)?;
    manifest.output(&sentences_path)?;
    manifest.write(config)?;

    eprintln!(
        "ingest: {} articles matched ({} filtered out, {} malformed records skipped), {} sentences",
        outcome.articles.len(),
        outcome.filtered_out,
        outcome.record_errors.len(),
        sentences.len()
    );
    Ok(())
}
