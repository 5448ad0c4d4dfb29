//! Invariant auditing for whole games, used by the property suites.

use rand::Rng;

use crate::behavior::FeatureSet;
use crate::engine::{
    replay, run_game, Action, ActionKind, ActionRecord, GameResult, GameState, GiftId, PlayerId, Policy, StealLimits,
};
use crate::error::Result;
use crate::harness::{game_rng, BehavioralPolicy, ExperimentConfig, GameSetup, ModelKind};

/// Wraps a policy and audits every transition it sees: state invariants
/// after each move, and no gift moving twice within one chain.
pub struct Audited<P> {
    pub inner: P,
    pub locked_this_chain: Vec<GiftId>,
    pub violations: Vec<String>,
}

impl<P> Audited<P> {
    pub fn new(inner: P) -> Self {
        Audited { inner, locked_this_chain: Vec::new(), violations: Vec::new() }
    }
}

impl<P: Policy> Policy for Audited<P> {
    fn choose<R: Rng + ?Sized>(&mut self, state: &GameState, actor: PlayerId, rng: &mut R) -> Action {
        let action = self.inner.choose(state, actor, rng);
        if let Action::Steal(victim) = action {
            let gift = state.gift_of(victim).expect("victim holds a gift");
            if self.locked_this_chain.contains(&gift) {
                self.violations.push(format!("{gift} offered again within its chain"));
            }
        }
        action
    }

    fn choose_swap<R: Rng + ?Sized>(&mut self, state: &GameState, rng: &mut R) -> Option<PlayerId> {
        self.inner.choose_swap(state, rng)
    }

    fn observe(&mut self, state: &GameState, record: &ActionRecord) {
        if let Err(e) = state.check_invariants() {
            self.violations.push(e);
        }
        match record.kind {
            ActionKind::Steal { gift, .. } => {
                if self.locked_this_chain.contains(&gift) {
                    self.violations.push(format!("{gift} moved twice in one chain"));
                }
                self.locked_this_chain.push(gift);
            }
            _ => self.locked_this_chain.clear(),
        }
        self.inner.observe(state, record);
    }

    fn end_round(&mut self, state: &GameState) {
        self.inner.end_round(state);
    }
}

/// Plays one audited game and checks the end-of-game properties. Returns
/// the list of violations (empty when everything holds).
pub fn audited_game(config: &ExperimentConfig, model: ModelKind, features: FeatureSet, game: u64) -> Result<Vec<String>> {
    let mut rng = game_rng(config.base_seed, model, game);
    let setup = GameSetup::generate(config, model, &mut rng)?;
    let mut policy = Audited::new(BehavioralPolicy::new(&setup, &config.behavior, features));
    let n = config.n_players;
    let result = run_game(n, config.steal_limits, &mut policy, &mut rng)?;
    let mut violations = policy.violations;
    violations.extend(check_result(n, config.steal_limits, &result));
    Ok(violations)
}

/// End-of-game checks on a finished game: bijective allocation, chain bounds,
/// steal caps, consistent counters and a faithful replay.
pub fn check_result(n: usize, limits: StealLimits, result: &GameResult) -> Vec<String> {
    let mut v = Vec::new();
    let mut gifts: Vec<usize> = result.final_ownership.iter().map(|g| g.index()).collect();
    gifts.sort_unstable();
    if gifts != (0..n).collect::<Vec<_>>() {
        v.push("final ownership is not a bijection".into());
    }
    if result.chain_lengths.len() != n {
        v.push(format!("{} rounds logged for {n} players", result.chain_lengths.len()));
    }
    for (k, &len) in result.chain_lengths.iter().enumerate() {
        if len > n.saturating_sub(1) {
            v.push(format!("chain of {len} in an {n}-player game"));
        }
        // Round k+1 starts with k owners; under the per-round cap of one
        // each can be robbed at most once.
        if limits.per_round == 1 && len > k {
            v.push(format!("round {} chain of {len} exceeds {k}", k + 1));
        }
    }
    if result.steal_count != result.chain_lengths.iter().sum::<usize>() {
        v.push("steal count differs from summed chain lengths".into());
    }
    let mut round_steals = vec![vec![0u32; n]; n + 1];
    let mut total = vec![0u32; n];
    for r in &result.trajectory {
        if let ActionKind::Steal { gift, .. } = r.kind {
            round_steals[r.round][gift.index()] += 1;
            total[gift.index()] += 1;
        }
    }
    if limits.per_round > 0 && round_steals.iter().flatten().any(|&c| c > limits.per_round) {
        v.push("per-round cap exceeded".into());
    }
    if limits.lifetime > 0 && total.iter().any(|&c| c > limits.lifetime) {
        v.push("lifetime cap exceeded".into());
    }
    match replay(n, limits, &result.trajectory) {
        Ok(state) => {
            let replayed: Vec<Option<GiftId>> = state.ownership().to_vec();
            let expected: Vec<Option<GiftId>> = result.final_ownership.iter().copied().map(Some).collect();
            if replayed != expected {
                v.push("replay reached a different allocation".into());
            }
        }
        Err(e) => v.push(format!("replay failed: {e}")),
    }
    v
}
