//! `aggregate`: collapse sentence scores to per-article topic categories.

use std::collections::BTreeMap;

use mediatrend::io::{read_jsonl, write_article_sentiments};
use mediatrend::{aggregate_article, Article, ArticleSentiment, SentenceScore};

use super::{artifact_path, create_out_dir, open_reader, require_artifact, write_artifact};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::ManifestBuilder;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let articles_path = require_artifact(config, super::ARTICLES)?;
    let scores_path = require_artifact(config, super::SCORES)?;
    create_out_dir(config)?;

    let articles: Vec<Article> = read_jsonl(open_reader(&articles_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", articles_path.display())))?;
    let scores: Vec<SentenceScore> = read_jsonl(open_reader(&scores_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", scores_path.display())))?;

    let mut by_article: BTreeMap<&str, Vec<&SentenceScore>> = BTreeMap::new();
    for score in &scores {
        by_article.entry(&score.article_id).or_default().push(score);
    }

    // The two artifacts must describe exactly the same article set.
    let known: BTreeMap<&str, &Article> = articles.iter().map(|a| (a.id.as_str(), a)).collect();
    if let Some(orphan) = by_article.keys().find(|id| !known.contains_key(*id)) {
        return Err(CliError::internal(format!(
            "scores reference article {orphan:?} absent from {}",
            super::ARTICLES
        )));
    }

    let thresholds = config.thresholds();
    let mut sentiments: Vec<ArticleSentiment> = Vec::with_capacity(articles.len());
    for article in &articles {
        let article_scores = by_article.get(article.id.as_str()).ok_or_else(|| {
            CliError::internal(format!(
                "article {:?} has no sentence scores in {}",
                article.id,
                super::SCORES
            ))
        })?;
        let owned: Vec<SentenceScore> =
            article_scores.iter().map(|s| (*s).clone()).collect();
        sentiments.push(
            aggregate_article(&owned, article.year, &thresholds)
                .map_err(|e| CliError::internal(format!("article {:?}: {e}", article.id)))?,
        );
    }

    let sentiment_path = artifact_path(config, super::SENTIMENT);
    write_artifact(&sentiment_path, |w| {
        write_article_sentiments(w, &sentiments).map_err(CliError::internal)
    })?;

    let mut manifest = ManifestBuilder::new("aggregate");
    manifest.input(&articles_path)?;
    manifest.input(&scores_path)?;
    manifest.output(&sentiment_path)?;
    manifest.write(config)?;

    eprintln!("aggregate: {} articles categorized", sentiments.len());
    Ok(())
}
