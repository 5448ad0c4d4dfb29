//! The six decision strategies and the shared target selection.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::behavior::{net_steal_utility, sample_index, selection_weights, BehaviorParams, Feature, SocialState};
use crate::beliefs::perceived_value;
use crate::engine::{Action, GameState, GiftId, PlayerId};
use crate::error::{Error, Result};
use crate::valuation::{AppearanceVector, ValuationMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    AlwaysOpen,
    AlwaysSteal,
    CoinFlip,
    MeanBased,
    Threshold,
    ExpectedValue,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 6] = [
        StrategyKind::AlwaysOpen,
        StrategyKind::AlwaysSteal,
        StrategyKind::CoinFlip,
        StrategyKind::MeanBased,
        StrategyKind::Threshold,
        StrategyKind::ExpectedValue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::AlwaysOpen => "always_open",
            StrategyKind::AlwaysSteal => "always_steal",
            StrategyKind::CoinFlip => "coin_flip",
            StrategyKind::MeanBased => "mean_based",
            StrategyKind::Threshold => "threshold",
            StrategyKind::ExpectedValue => "expected_value",
        }
    }

    /// Uniform draw over the six strategies.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::ALL[rng.random_range(0..Self::ALL.len())]
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy {s:?}")))
    }
}

/// A legal steal as seen by the decider.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Target {
    pub victim: PlayerId,
    pub gift: GiftId,
    /// Perceived value of the target gift.
    pub value: f64,
    pub net_utility: f64,
}

/// Everything a strategy may look at for one decision.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionContext {
    pub actor: PlayerId,
    /// Perceived value of the decider's current gift, if any.
    pub own_value: Option<f64>,
    /// Legal steals in seat order.
    pub targets: Vec<Target>,
    /// Perceived values of every opened gift, the decider's own included.
    pub opened_values: Vec<f64>,
    /// Wrapped gifts with their perceived values, by gift number.
    pub wrapped: Vec<(GiftId, f64)>,
    /// Round index over player count.
    pub phase: f64,
    pub threshold: f64,
    /// Softmax temperature for picking a wrapped gift; `None` picks uniformly.
    pub selection_temperature: Option<f64>,
}

impl DecisionContext {
    /// Assembles the context for `actor` from the game and the behavioral state.
    pub fn build(
        actor: PlayerId,
        state: &GameState,
        valuations: &ValuationMatrix,
        appearance: &AppearanceVector,
        social: &SocialState,
        params: &BehaviorParams,
    ) -> Self {
        let perceived = |gift| perceived_value(actor, gift, state, valuations, appearance, params);
        let own_value = state.gift_of(actor).map(perceived);
        let costly = params.features.contains(Feature::SocialCosts);
        let targets = state
            .steal_targets(actor)
            .map(|(victim, gift)| {
                let value = perceived(gift);
                let cost = if costly { social.social_cost(actor, victim, params) } else { 0.0 };
                Target { victim, gift, value, net_utility: net_steal_utility(value, own_value, cost) }
            })
            .collect();
        DecisionContext {
            actor,
            own_value,
            targets,
            opened_values: state.opened_gifts().map(perceived).collect(),
            wrapped: state.wrapped_gifts().map(|g| (g, perceived(g))).collect(),
            phase: state.round() as f64 / state.n() as f64,
            threshold: params.threshold,
            selection_temperature: params.features.contains(Feature::BiasedSelection).then_some(params.tau),
        }
    }

    /// Perceived value of the held gift, 0 when empty handed.
    pub fn satisfaction(&self) -> f64 {
        self.own_value.unwrap_or(0.0)
    }

    fn wrapped_mean(&self) -> Option<f64> {
        mean(self.wrapped.iter().map(|(_, v)| *v))
    }

    /// Picks a wrapped gift: uniform, or softmax-weighted under biased selection.
    pub fn choose_wrapped<R: Rng + ?Sized>(&self, rng: &mut R) -> GiftId {
        assert!(!self.wrapped.is_empty(), "a wrapped gift exists at every decision point");
        let i = match self.selection_temperature {
            None => rng.random_range(0..self.wrapped.len()),
            Some(tau) => {
                let values: Vec<f64> = self.wrapped.iter().map(|(_, v)| *v).collect();
                let weights = selection_weights(&values, tau).expect("non-empty pool and validated temperature");
                sample_index(&weights, rng)
            }
        };
        self.wrapped[i].0
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// The legal target with the highest net utility; ties go to the lowest seat.
pub fn best_target(ctx: &DecisionContext) -> Option<&Target> {
    ctx.targets.iter().fold(None, |best: Option<&Target>, t| match best {
        Some(b) if b.net_utility > t.net_utility || (b.net_utility == t.net_utility && b.victim < t.victim) => Some(b),
        _ => Some(t),
    })
}

/// Whether `kind` would steal from `target`. Ties favor opening.
fn wants_steal<R: Rng + ?Sized>(kind: StrategyKind, ctx: &DecisionContext, target: &Target, rng: &mut R) -> bool {
    match kind {
        StrategyKind::AlwaysOpen => false,
        StrategyKind::AlwaysSteal => true,
        StrategyKind::CoinFlip => rng.random_bool(0.5),
        StrategyKind::MeanBased => {
            mean(ctx.opened_values.iter().copied()).is_some_and(|m| target.value > m)
        }
        StrategyKind::Threshold => target.net_utility > ctx.threshold,
        StrategyKind::ExpectedValue => match ctx.wrapped_mean() {
            Some(m) => target.net_utility > m - ctx.satisfaction(),
            None => true,
        },
    }
}

/// The action `kind` takes in `ctx`.
pub fn decide<R: Rng + ?Sized>(kind: StrategyKind, ctx: &DecisionContext, rng: &mut R) -> Action {
    match best_target(ctx) {
        Some(target) if wants_steal(kind, ctx, target, rng) => Action::Steal(target.victim),
        _ => Action::Open(ctx.choose_wrapped(rng)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn target(seat: usize, net: f64) -> Target {
        Target { victim: PlayerId::new(seat), gift: GiftId::new(seat), value: net, net_utility: net }
    }

    fn ctx(targets: Vec<Target>) -> DecisionContext {
        DecisionContext {
            actor: PlayerId::new(1),
            own_value: None,
            targets,
            opened_values: vec![0.3, 0.5],
            wrapped: vec![(GiftId::new(7), 0.5), (GiftId::new(8), 0.5)],
            phase: 0.5,
            threshold: 0.6,
            selection_temperature: None,
        }
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(5)
    }

    #[test]
    fn names_round_trip() {
        for kind in StrategyKind::ALL {
            assert_eq!(kind.name().parse::<StrategyKind>().unwrap(), kind);
            assert_eq!(serde_json::to_string(&kind).unwrap(), format!("\"{}\"", kind.name()));
        }
        assert!("greedy".parse::<StrategyKind>().is_err());
    }

    #[test]
    fn best_target_examples() {
        assert!(best_target(&ctx(vec![])).is_none());
        let c = ctx(vec![target(2, 0.2), target(4, 0.5)]);
        assert_eq!(best_target(&c).unwrap().victim, PlayerId::new(4));
        let tied = ctx(vec![target(3, 0.4), target(5, 0.4)]);
        assert_eq!(best_target(&tied).unwrap().victim, PlayerId::new(3));
        let reversed = ctx(vec![target(5, 0.4), target(3, 0.4)]);
        assert_eq!(best_target(&reversed).unwrap().victim, PlayerId::new(3));
    }

    #[test]
    fn forced_open_without_targets() {
        for kind in StrategyKind::ALL {
            assert!(matches!(decide(kind, &ctx(vec![]), &mut rng()), Action::Open(_)));
        }
    }

    #[test]
    fn threshold_boundary() {
        let below = ctx(vec![target(2, 0.59)]);
        assert!(matches!(decide(StrategyKind::Threshold, &below, &mut rng()), Action::Open(_)));
        let above = ctx(vec![target(2, 0.61)]);
        assert_eq!(decide(StrategyKind::Threshold, &above, &mut rng()), Action::Steal(PlayerId::new(2)));
        let at = ctx(vec![target(2, 0.6)]);
        assert!(matches!(decide(StrategyKind::Threshold, &at, &mut rng()), Action::Open(_)));
    }

    #[test]
    fn expected_value_example() {
        let c = ctx(vec![target(2, 0.7)]);
        assert_eq!(decide(StrategyKind::ExpectedValue, &c, &mut rng()), Action::Steal(PlayerId::new(2)));
        let c = ctx(vec![target(2, 0.45)]);
        assert!(matches!(decide(StrategyKind::ExpectedValue, &c, &mut rng()), Action::Open(_)));
        let mut holding = ctx(vec![target(2, 0.7)]);
        holding.own_value = Some(0.4);
        // 0.7 > 0.5 - 0.4
        assert_eq!(decide(StrategyKind::ExpectedValue, &holding, &mut rng()), Action::Steal(PlayerId::new(2)));
    }

    #[test]
    fn mean_based_compares_gift_value() {
        let mut c = ctx(vec![target(2, 0.45)]);
        assert_eq!(decide(StrategyKind::MeanBased, &c, &mut rng()), Action::Steal(PlayerId::new(2)));
        c.targets[0].value = 0.4;
        assert!(matches!(decide(StrategyKind::MeanBased, &c, &mut rng()), Action::Open(_)));
    }

    #[test]
    fn always_open_and_always_steal() {
        let c = ctx(vec![target(2, -0.3)]);
        assert!(matches!(decide(StrategyKind::AlwaysOpen, &c, &mut rng()), Action::Open(_)));
        assert_eq!(decide(StrategyKind::AlwaysSteal, &c, &mut rng()), Action::Steal(PlayerId::new(2)));
    }

    #[test]
    fn coin_flip_steals_about_half_the_time() {
        let c = ctx(vec![target(2, 0.1)]);
        let mut r = rng();
        let steals = (0..10_000)
            .filter(|_| matches!(decide(StrategyKind::CoinFlip, &c, &mut r), Action::Steal(_)))
            .count();
        assert!((4_700..5_300).contains(&steals), "{steals}");
    }

    #[test]
    fn biased_selection_prefers_valuable_gifts() {
        let mut c = ctx(vec![]);
        c.wrapped = vec![(GiftId::new(1), 0.0), (GiftId::new(2), 1.0)];
        c.selection_temperature = Some(1e6);
        for _ in 0..100 {
            assert_eq!(c.choose_wrapped(&mut rng()), GiftId::new(2));
        }
    }
}
