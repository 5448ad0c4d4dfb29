use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::behavior::{adaptive_prob_linear, BehaviorParams, Feature, FeatureSet, SocialState};
use crate::engine::{run_game, Action, ActionKind, ActionRecord, GameResult, GameState, PlayerId, Policy};
use crate::error::Result;
use crate::strategies::{decide, DecisionContext, StrategyKind};
use crate::valuation::{generate_appearance, generate_valuations, AppearanceVector, ValuationMatrix};

use super::config::{ExperimentConfig, ModelKind};

/// Random stream for one game. It depends on the seed, the model and the
/// game index only, so the 16 feature subsets of a model replay the same
/// valuations, signals and strategy assignments.
pub fn game_rng(base_seed: u64, model: ModelKind, game: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(((model.index() as u64) << 48) | game);
    rng
}

/// Everything drawn before the first move.
#[derive(Clone, Debug, PartialEq)]
pub struct GameSetup {
    pub valuations: ValuationMatrix,
    pub appearance: AppearanceVector,
    /// Strategy of each seat.
    pub strategies: Vec<StrategyKind>,
}

impl GameSetup {
    pub fn generate<R: Rng + ?Sized>(config: &ExperimentConfig, model: ModelKind, rng: &mut R) -> Result<Self> {
        let n = config.n_players;
        let valuations = generate_valuations(model.with_params(&config.models), n, rng)?;
        let appearance = generate_appearance(valuations.quality(), config.behavior.sigma_a, rng)?;
        let strategies = (0..n).map(|_| StrategyKind::random(rng)).collect();
        Ok(GameSetup { valuations, appearance, strategies })
    }
}

/// Drives every seat with its assigned strategy plus the enabled decorations.
pub struct BehavioralPolicy<'a> {
    setup: &'a GameSetup,
    params: BehaviorParams,
    social: SocialState,
}

impl<'a> BehavioralPolicy<'a> {
    pub fn new(setup: &'a GameSetup, behavior: &BehaviorParams, features: FeatureSet) -> Self {
        let params = BehaviorParams { features, ..behavior.clone() };
        BehavioralPolicy { setup, social: SocialState::new(setup.strategies.len()), params }
    }

    pub fn social(&self) -> &SocialState {
        &self.social
    }
}

impl Policy for BehavioralPolicy<'_> {
    fn choose<R: Rng + ?Sized>(&mut self, state: &GameState, actor: PlayerId, rng: &mut R) -> Action {
        let setup = self.setup;
        let ctx = DecisionContext::build(actor, state, &setup.valuations, &setup.appearance, &self.social, &self.params);
        if self.params.features.contains(Feature::AdaptiveDynamics) {
            let p = &self.params;
            let p_steal = adaptive_prob_linear(
                p.p0,
                ctx.phase,
                self.social.frustration(actor),
                ctx.satisfaction(),
                [p.lambda1, p.lambda2, p.lambda3],
            );
            if !rng.random_bool(p_steal) {
                return Action::Open(ctx.choose_wrapped(rng));
            }
        }
        decide(setup.strategies[actor.index()], &ctx, rng)
    }

    /// Seat 1 takes the gift it values most, if that strictly beats its own.
    fn choose_swap<R: Rng + ?Sized>(&mut self, state: &GameState, _rng: &mut R) -> Option<PlayerId> {
        let me = PlayerId::new(1);
        let own = state.gift_of(me)?;
        let row = self.setup.valuations.row(me);
        let mut best = (None, row[own.index()]);
        for (i, held) in state.ownership().iter().enumerate() {
            if let Some(gift) = held {
                if row[gift.index()] > best.1 {
                    best = (Some(PlayerId::from_index(i)), row[gift.index()]);
                }
            }
        }
        best.0
    }

    fn observe(&mut self, _state: &GameState, record: &ActionRecord) {
        if let ActionKind::Steal { victim, .. } = record.kind {
            self.social.record_steal(record.actor, victim, self.params.gamma);
        }
    }

    fn end_round(&mut self, _state: &GameState) {
        self.social.frustration_decay(self.params.gamma_prime);
    }
}

/// Plays one game of `setup` under `features`, continuing with `rng`.
pub fn play<R: Rng + ?Sized>(
    setup: &GameSetup,
    config: &ExperimentConfig,
    features: FeatureSet,
    rng: &mut R,
) -> Result<GameResult> {
    let mut policy = BehavioralPolicy::new(setup, &config.behavior, features);
    run_game(config.n_players, config.steal_limits, &mut policy, rng)
}

/// Outcome measures of one game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameMetrics {
    pub steals: usize,
    /// Mean length of the rounds that saw at least one steal; 0 without steals.
    pub mean_chain_length: f64,
    /// True value of each seat's final gift.
    pub seat_values: Vec<f64>,
    /// Per strategy (in [`StrategyKind::ALL`] order): summed final value and seat count.
    pub strategy_values: [(f64, usize); 6],
}

impl GameMetrics {
    pub fn measure(setup: &GameSetup, result: &GameResult) -> Self {
        let chains: Vec<usize> = result.chain_lengths.iter().copied().filter(|&l| l > 0).collect();
        let mean_chain_length =
            if chains.is_empty() { 0.0 } else { chains.iter().sum::<usize>() as f64 / chains.len() as f64 };
        let seat_values: Vec<f64> = result
            .final_ownership
            .iter()
            .enumerate()
            .map(|(i, &gift)| setup.valuations.value(PlayerId::from_index(i), gift))
            .collect();
        let mut strategy_values = [(0.0, 0); 6];
        for (value, kind) in seat_values.iter().zip(&setup.strategies) {
            let slot = &mut strategy_values[*kind as usize];
            slot.0 += value;
            slot.1 += 1;
        }
        GameMetrics { steals: result.steal_count, mean_chain_length, seat_values, strategy_values }
    }
}
