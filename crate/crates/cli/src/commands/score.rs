//! `score`: score every sentence on all eight topics.

use mediatrend::io::{read_csv, read_jsonl, write_jsonl};
use mediatrend::scoring::{LexiconEntry, LexiconScorer, ReplayScorer};
use mediatrend::{score_sentences, Sentence, SentenceScore};

use super::{artifact_path, create_out_dir, open_reader, require_artifact, require_input, write_artifact};
use crate::config::{RunConfig, ScorerKind};
use crate::error::CliError;
use crate::manifest::ManifestBuilder;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let sentences_path = require_artifact(config, super::SENTENCES)?;
    create_out_dir(config)?;
    let sentences: Vec<Sentence> = read_jsonl(open_reader(&sentences_path)?)
        .map_err(|e| CliError::internal(format!("{}: {e}", sentences_path.display())))?;

    let mut manifest = ManifestBuilder::new("score");
    manifest.input(&sentences_path)?;

    let scores = match config.scorer {
        ScorerKind::Lexicon => {
            let lexicon_path = require_input(&config.lexicon, "lexicon")?;
            manifest.input(lexicon_path)?;
            let entries: Vec<LexiconEntry> = read_csv(open_reader(lexicon_path)?)
                .map_err(|e| CliError::config("lexicon", format!("{}: {e}", lexicon_path.display())))?;
            let scorer = LexiconScorer::new(entries).map_err(|e| {
                CliError::config("lexicon", format!("{}: {e}", lexicon_path.display()))
            })?;
            score_sentences(&sentences, &scorer).map_err(CliError::internal)?
        }
        ScorerKind::Replay => {
            let replay_path = require_input(&config.replay_scores, "replay_scores")?;
            manifest.input(replay_path)?;
            let records: Vec<SentenceScore> = read_jsonl(open_reader(replay_path)?)
                .map_err(|e| CliError::config("replay_scores", format!("{}: {e}", replay_path.display())))?;
            let scorer = ReplayScorer::new(records).map_err(|e| {
                CliError::config("replay_scores", format!("{}: {e}", replay_path.display()))
            })?;
            // A replay file that does not cover every (sentence, topic) pair
            // is a bad input file, not a pipeline invariant breach.
            score_sentences(&sentences, &scorer).map_err(|e| {
                CliError::config("replay_scores", format!("{}: {e}", replay_path.display()))
            })?
        }
    };

    let scores_path = artifact_path(config, super::SCORES);
    write_artifact(&scores_path, |w| {
        write_jsonl(w, &scores).map_err(CliError::internal)
    })?;
    manifest.output(&scores_path)?;
    manifest.write(config)?;

    eprintln!(
        "score: {} sentences scored on 8 topics ({} scores)",
        sentences.len(),
        scores.len()
    );
    Ok(())
}
