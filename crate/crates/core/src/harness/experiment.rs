use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::{Feature, FeatureSet};
use crate::error::{Error, Result};
use crate::strategies::StrategyKind;

use super::config::{ExperimentConfig, ModelKind};
use super::game::{game_rng, play, GameMetrics, GameSetup};

/// One cell of the factorial design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub index: usize,
    pub model: ModelKind,
    pub features: FeatureSet,
}

impl Condition {
    /// Stable identifier such as `correlated/PI+SC`.
    pub fn id(&self) -> String {
        format!("{}/{}", self.model, self.features)
    }
}

/// The 48 conditions: models in order, feature subsets in mask order within each.
pub fn enumerate_conditions() -> Vec<Condition> {
    ModelKind::ALL
        .into_iter()
        .flat_map(|model| FeatureSet::all().map(move |features| (model, features)))
        .enumerate()
        .map(|(index, (model, features))| Condition { index, model, features })
        .collect()
}

/// Aggregate metrics of one condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition_id: String,
    pub model: ModelKind,
    pub features: FeatureSet,
    pub games: usize,
    pub steals_per_game: f64,
    pub mean_chain_length: f64,
    /// Mean final true value of seats `1..=n`.
    pub seat_means: Vec<f64>,
    /// Mean final true value per strategy, `None` if no seat ever drew it.
    pub strategy_means: Vec<(StrategyKind, Option<f64>)>,
    /// Seats that played each strategy, summed over games.
    pub strategy_counts: Vec<(StrategyKind, usize)>,
}

impl ConditionSummary {
    fn aggregate(condition: &Condition, n: usize, games: &[GameMetrics]) -> Self {
        let count = games.len();
        let denom = count.max(1) as f64;
        let mut steals = 0usize;
        let mut chain = 0.0;
        let mut seats = vec![0.0; n];
        let mut strategies = [(0.0, 0usize); 6];
        for g in games {
            steals += g.steals;
            chain += g.mean_chain_length;
            for (acc, v) in seats.iter_mut().zip(&g.seat_values) {
                *acc += v;
            }
            for (acc, (sum, k)) in strategies.iter_mut().zip(&g.strategy_values) {
                acc.0 += sum;
                acc.1 += k;
            }
        }
        ConditionSummary {
            condition_id: condition.id(),
            model: condition.model,
            features: condition.features,
            games: count,
            steals_per_game: steals as f64 / denom,
            mean_chain_length: chain / denom,
            seat_means: seats.into_iter().map(|s| s / denom).collect(),
            strategy_means: StrategyKind::ALL
                .into_iter()
                .zip(&strategies)
                .map(|(kind, &(sum, k))| (kind, (k > 0).then(|| sum / k as f64)))
                .collect(),
            strategy_counts: StrategyKind::ALL.into_iter().zip(strategies.iter().map(|s| s.1)).collect(),
        }
    }

    pub fn strategy_mean(&self, kind: StrategyKind) -> Option<f64> {
        self.strategy_means.iter().find(|(k, _)| *k == kind).and_then(|(_, m)| *m)
    }

    pub fn metric(&self, metric: Metric) -> f64 {
        match metric {
            Metric::StealsPerGame => self.steals_per_game,
            Metric::MeanChainLength => self.mean_chain_length,
        }
    }
}

/// Plays game `game` of `condition`.
pub fn run_game_metrics(condition: &Condition, config: &ExperimentConfig, game: u64) -> Result<GameMetrics> {
    let mut rng = game_rng(config.base_seed, condition.model, game);
    let setup = GameSetup::generate(config, condition.model, &mut rng)?;
    let result = play(&setup, config, condition.features, &mut rng)?;
    Ok(GameMetrics::measure(&setup, &result))
}

/// Runs every game of one condition. Games run in parallel on the current
/// rayon pool and are reduced in game order.
pub fn run_condition(condition: &Condition, config: &ExperimentConfig) -> Result<ConditionSummary> {
    config.validate()?;
    let games = (0..config.games_per_condition as u64)
        .into_par_iter()
        .map(|g| run_game_metrics(condition, config, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionSummary::aggregate(condition, config.n_players, &games))
}

/// Runs all 48 conditions on a pool of `jobs` threads (`None` = all cores).
/// Results do not depend on the number of threads.
pub fn run_experiment(config: &ExperimentConfig, jobs: Option<usize>) -> Result<Vec<ConditionSummary>> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = jobs {
        if jobs == 0 {
            return Err(Error::InvalidArgument("jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().map_err(|e| Error::InvalidConfiguration(e.to_string()))?;
    pool.install(|| {
        enumerate_conditions()
            .par_iter()
            .map(|c| run_condition(c, config))
            .collect()
    })
}

/// Outcome measures used in effect estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    StealsPerGame,
    MeanChainLength,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::StealsPerGame, Metric::MeanChainLength];
}

fn lookup(summaries: &[ConditionSummary], model: ModelKind, features: FeatureSet) -> Result<&ConditionSummary> {
    summaries
        .iter()
        .find(|s| s.model == model && s.features == features)
        .ok_or_else(|| Error::InvalidArgument(format!("no summary for {model}/{features}")))
}

/// `Y({f}) - Y(BASE)` under `model`.
pub fn main_effect(summaries: &[ConditionSummary], feature: Feature, model: ModelKind, metric: Metric) -> Result<f64> {
    let with = lookup(summaries, model, FeatureSet::single(feature))?.metric(metric);
    let base = lookup(summaries, model, FeatureSet::EMPTY)?.metric(metric);
    Ok(with - base)
}

/// The 2x2 factorial contrast `Y({f1,f2}) - Y({f1}) - Y({f2}) + Y(BASE)`.
pub fn interaction(
    summaries: &[ConditionSummary],
    f1: Feature,
    f2: Feature,
    model: ModelKind,
    metric: Metric,
) -> Result<f64> {
    if f1 == f2 {
        return Err(Error::InvalidArgument(format!("interaction of {} with itself", f1.abbrev())));
    }
    let y = |set: FeatureSet| lookup(summaries, model, set).map(|s| s.metric(metric));
    let single = |f| FeatureSet::single(f);
    Ok(y(single(f1).with(f2))? - y(single(f1))? - y(single(f2))? + y(FeatureSet::EMPTY)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainEffect {
    pub model: ModelKind,
    pub feature: Feature,
    pub metric: Metric,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionEffect {
    pub model: ModelKind,
    pub features: (Feature, Feature),
    pub metric: Metric,
    pub value: f64,
}

/// Main effects of each feature and interactions of each pair, for every
/// model and metric.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EffectReport {
    pub main_effects: Vec<MainEffect>,
    pub interactions: Vec<InteractionEffect>,
}

impl EffectReport {
    pub fn compute(summaries: &[ConditionSummary]) -> Result<Self> {
        let mut report = EffectReport::default();
        for model in ModelKind::ALL {
            for metric in Metric::ALL {
                for feature in Feature::ALL {
                    let value = main_effect(summaries, feature, model, metric)?;
                    report.main_effects.push(MainEffect { model, feature, metric, value });
                }
                for (i, &f1) in Feature::ALL.iter().enumerate() {
                    for &f2 in &Feature::ALL[i + 1..] {
                        let value = interaction(summaries, f1, f2, model, metric)?;
                        report.interactions.push(InteractionEffect { model, features: (f1, f2), metric, value });
                    }
                }
            }
        }
        Ok(report)
    }
}
