use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use giftex::behavior::{BehaviorParams, FeatureSet, SocialState};
use giftex::engine::{Action, GameState, Phase, StealLimits};
use giftex::strategies::{decide, DecisionContext, StrategyKind};
use giftex::valuation::{generate_appearance, generate_valuations, ValuationModel};

/// Walks random games and, at every decision point, asks each strategy
/// under a random feature set for a move.
#[test]
fn decide_never_returns_an_illegal_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut decisions = 0usize;
    while decisions < 100_000 {
        let n = rng.random_range(1..=12);
        let limits = StealLimits::new(rng.random_range(0..3), rng.random_range(0..3));
        let vals = generate_valuations(ValuationModel::Correlated { rho: 0.7 }, n, &mut rng).unwrap();
        let app = generate_appearance(vals.quality(), 0.3, &mut rng).unwrap();
        let mut social = SocialState::new(n);
        let mut state = GameState::new(n, limits).unwrap();
        while state.phase() == Phase::Rounds {
            let actor = state.current_actor().unwrap();
            let params = BehaviorParams {
                features: FeatureSet::from_mask(rng.random_range(0..16)).unwrap(),
                ..BehaviorParams::default()
            };
            let ctx = DecisionContext::build(actor, &state, &vals, &app, &social, &params);
            let legal = state.legal_actions(actor).unwrap();
            for kind in StrategyKind::ALL {
                let action = decide(kind, &ctx, &mut rng);
                assert!(legal.contains(&action), "{kind} chose {action:?}");
                if kind == StrategyKind::AlwaysOpen {
                    assert!(matches!(action, Action::Open(_)));
                }
                decisions += 1;
            }
            let next = *legal.choose(&mut rng).unwrap();
            if let Action::Steal(victim) = next {
                social.record_steal(actor, victim, params.gamma);
            }
            state.apply(actor, next).unwrap();
        }
    }
}
