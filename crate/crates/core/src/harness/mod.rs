//! Full-factorial experiments: 16 feature subsets under each of the three
//! valuation models, with per-condition aggregation, effect estimates and
//! CSV/JSON export.

mod config;
mod experiment;
mod export;
mod game;

pub use config::{ExperimentConfig, ModelKind, ModelParams};
pub use experiment::{
    enumerate_conditions, interaction, main_effect, run_condition, run_experiment, run_game_metrics, Condition,
    ConditionSummary, EffectReport, InteractionEffect, MainEffect, Metric,
};
pub use export::{
    csv_header, export, read_json, write_csv, write_json, ExperimentReport, ExportFormat, INTERACTION_FORMULA,
};
pub use game::{game_rng, play, BehavioralPolicy, GameMetrics, GameSetup};
