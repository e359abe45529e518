//! `harmonize`: calibrate survey waves into one baseline-anchored series.

use mediatrend::harmonize::HarmonizeError;
use mediatrend::io::{read_waves, write_calibrations, write_opinion};
use mediatrend::{harmonize, HarmonizeOptions};

use super::{artifact_path, create_out_dir, open_reader, require_input, write_artifact};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::ManifestBuilder;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let waves_path = require_input(&config.waves, "waves")?;
    create_out_dir(config)?;

    let waves = read_waves(open_reader(waves_path)?)
        .map_err(|e| CliError::config("waves", format!("{}: {e}", waves_path.display())))?;

    let options = HarmonizeOptions {
        baseline_year: config.baseline_year,
        bootstrap_replicates: config.bootstrap_replicates,
        seed: config.seed,
        ..HarmonizeOptions::default()
    };
    let result = harmonize(&waves, &options).map_err(|e| match e {
        // The baseline year is a configuration choice; everything else is a
        // property of the wave data itself.
        HarmonizeError::BaselineYearMissing(year) => CliError::config(
            "baseline_year",
            format!("no survey wave covers baseline year {year}"),
        ),
        other => CliError::internal(other),
    })?;
    for warning in &result.warnings {
        eprintln!("warning: harmonize: {warning}");
    }

    let opinion_path = artifact_path(config, super::OPINION);
    write_artifact(&opinion_path, |w| {
        write_opinion(w, &result.opinion.points).map_err(CliError::internal)
    })?;
    let calibration_path = artifact_path(config, super::CALIBRATION);
    write_artifact(&calibration_path, |w| {
        write_calibrations(w, &result.calibrations).map_err(CliError::internal)
    })?;

    let mut manifest = ManifestBuilder::new("harmonize");
    manifest.input(waves_path)?;
    manifest.output(&opinion_path)?;
    manifest.output(&calibration_path)?;
    manifest.write(config)?;

    eprintln!(
        "harmonize: {} waves in {} series -> {} opinion years (baseline {})",
        waves.len(),
        result.calibrations.len(),
        result.opinion.points.len(),
        result.opinion.baseline_year
    );
    Ok(())
}
