use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::strategies::StrategyKind;

use super::config::ExperimentConfig;
use super::experiment::{ConditionSummary, EffectReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        }
    }
}

/// Everything one experiment produced, as written to JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub conditions: Vec<ConditionSummary>,
    pub effects: EffectReport,
    /// How interactions are computed.
    pub interaction_formula: String,
}

pub const INTERACTION_FORMULA: &str = "Y({f1,f2}) - Y({f1}) - Y({f2}) + Y(BASE)";

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig, conditions: Vec<ConditionSummary>, effects: EffectReport) -> Self {
        ExperimentReport { config, conditions, effects, interaction_formula: INTERACTION_FORMULA.to_string() }
    }

    /// Copy with every measured value rounded to 6 fractional digits.
    pub fn rounded(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.conditions {
            c.steals_per_game = round6(c.steals_per_game);
            c.mean_chain_length = round6(c.mean_chain_length);
            c.seat_means.iter_mut().for_each(|v| *v = round6(*v));
            for (_, m) in &mut c.strategy_means {
                *m = m.map(round6);
            }
        }
        out.effects.main_effects.iter_mut().for_each(|e| e.value = round6(e.value));
        out.effects.interactions.iter_mut().for_each(|e| e.value = round6(e.value));
        out
    }
}

/// CSV header: fixed columns, one per seat, one per strategy.
pub fn csv_header(n: usize) -> Vec<String> {
    let fixed = ["condition_id", "model", "features", "games", "steals_per_game", "mean_chain_length"];
    fixed
        .iter()
        .map(|s| s.to_string())
        .chain((1..=n).map(|i| format!("seat_{i}")))
        .chain(StrategyKind::ALL.iter().map(|k| format!("strat_{}", k.name())))
        .collect()
}

/// One row per condition, numbers with 6 fractional digits. A strategy no
/// seat ever played leaves its cell empty.
pub fn write_csv<W: Write>(summaries: &[ConditionSummary], out: W) -> Result<()> {
    let n = summaries.first().map_or(0, |s| s.seat_means.len());
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(csv_header(n))?;
    for s in summaries {
        let mut row = vec![
            s.condition_id.clone(),
            s.model.to_string(),
            s.features.to_string(),
            s.games.to_string(),
            format!("{:.6}", s.steals_per_game),
            format!("{:.6}", s.mean_chain_length),
        ];
        row.extend(s.seat_means.iter().map(|v| format!("{v:.6}")));
        row.extend(StrategyKind::ALL.iter().map(|&k| s.strategy_mean(k).map_or(String::new(), |v| format!("{v:.6}"))));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(report: &ExperimentReport, out: W) -> Result<()> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &report.rounded())?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes `results.csv` or `results.json` into `dir`, creating it if needed,
/// and returns the file path.
pub fn export(report: &ExperimentReport, format: ExportFormat, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("results.{}", format.extension()));
    let mut file = BufWriter::new(File::create(&path)?);
    match format {
        ExportFormat::Csv => write_csv(&report.conditions, &mut file)?,
        ExportFormat::Json => write_json(report, &mut file)?,
    }
    file.flush()?;
    Ok(path)
}
