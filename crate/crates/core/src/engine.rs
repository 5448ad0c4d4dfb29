//! The base game: ownership, gift status, stealing chains and the final swap.
//!
//! Seats are numbered `1..=n` and act in that order. A round starts with the
//! primary turn of seat `k`. Stealing displaces the victim, who must act next;
//! gifts taken during the current chain are locked until the chain ends. The
//! round (and the chain) ends with the first open. After round `n`, seat 1 may
//! swap gifts with anyone once, which concludes the game.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A seat at the table. Seat order is the primary-turn order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlayerId(usize);

impl PlayerId {
    /// Seat numbers start at 1.
    pub fn new(seat: usize) -> Self {
        assert!(seat >= 1, "seats are numbered from 1");
        PlayerId(seat)
    }

    pub fn from_index(index: usize) -> Self {
        PlayerId(index + 1)
    }

    pub fn seat(self) -> usize {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

/// An atomic gift, numbered `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GiftId(usize);

impl GiftId {
    pub fn new(number: usize) -> Self {
        assert!(number >= 1, "gifts are numbered from 1");
        GiftId(number)
    }

    pub fn from_index(index: usize) -> Self {
        GiftId(index + 1)
    }

    pub fn number(self) -> usize {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for GiftId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}", self.0)
    }
}

/// Caps on how often one gift may be stolen; `0` means unlimited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StealLimits {
    pub per_round: u32,
    pub lifetime: u32,
}

impl StealLimits {
    pub const fn new(per_round: u32, lifetime: u32) -> Self {
        StealLimits { per_round, lifetime }
    }

    /// At most one steal per gift per round, no lifetime cap.
    pub const fn standard() -> Self {
        StealLimits::new(1, 0)
    }
}

impl Default for StealLimits {
    fn default() -> Self {
        StealLimits::standard()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GiftStatus {
    Wrapped,
    Opened,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Rounds `1..=n` are being played.
    Rounds,
    /// All gifts are open; seat 1 still holds the swap option.
    FinalSwap,
    Concluded,
}

/// A move available at a decision point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Open(GiftId),
    /// Take the gift currently held by the named victim.
    Steal(PlayerId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ActionKind {
    Open { gift: GiftId },
    Steal { victim: PlayerId, gift: GiftId },
    Swap { with: Option<PlayerId> },
}

/// One logged transition. `position_in_chain` is 0 for the primary turn and
/// grows by one with every displacement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub actor: PlayerId,
    pub kind: ActionKind,
    pub round: usize,
    pub position_in_chain: usize,
}

impl fmt::Display for ActionRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "round {:>3} pos {:>2}  {} ", self.round, self.position_in_chain, self.actor)?;
        match self.kind {
            ActionKind::Open { gift } => write!(f, "opens {gift}"),
            ActionKind::Steal { victim, gift } => write!(f, "steals {gift} from {victim}"),
            ActionKind::Swap { with: Some(other) } => write!(f, "swaps with {other}"),
            ActionKind::Swap { with: None } => write!(f, "keeps their gift"),
        }
    }
}

/// Full game state, mutated in place by the `apply_*` methods.
///
/// The chain-lock set doubles as the per-round lock set: a round holds exactly
/// one chain, so the two never differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    limits: StealLimits,
    ownership: Vec<Option<GiftId>>,
    holder: Vec<Option<PlayerId>>,
    status: Vec<GiftStatus>,
    chain_locked: Vec<bool>,
    round_steals: Vec<u32>,
    total_steals: Vec<u32>,
    round: usize,
    displaced: Option<PlayerId>,
    chain_length: usize,
    opened: usize,
    phase: Phase,
}

impl GameState {
    /// All gifts wrapped, nobody holding anything, round 1.
    pub fn new(n: usize, limits: StealLimits) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfiguration("a game needs at least one player".into()));
        }
        Ok(GameState {
            limits,
            ownership: vec![None; n],
            holder: vec![None; n],
            status: vec![GiftStatus::Wrapped; n],
            chain_locked: vec![false; n],
            round_steals: vec![0; n],
            total_steals: vec![0; n],
            round: 1,
            displaced: None,
            chain_length: 0,
            opened: 0,
            phase: Phase::Rounds,
        })
    }

    pub fn n(&self) -> usize {
        self.ownership.len()
    }

    pub fn limits(&self) -> StealLimits {
        self.limits
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn displaced(&self) -> Option<PlayerId> {
        self.displaced
    }

    /// Steals made so far in the current round's chain.
    pub fn chain_length(&self) -> usize {
        self.chain_length
    }

    pub fn owner_of(&self, gift: GiftId) -> Option<PlayerId> {
        self.holder[gift.index()]
    }

    pub fn gift_of(&self, player: PlayerId) -> Option<GiftId> {
        self.ownership[player.index()]
    }

    pub fn status(&self, gift: GiftId) -> GiftStatus {
        self.status[gift.index()]
    }

    pub fn is_chain_locked(&self, gift: GiftId) -> bool {
        self.chain_locked[gift.index()]
    }

    pub fn chain_locked(&self) -> impl Iterator<Item = GiftId> + '_ {
        self.chain_locked
            .iter()
            .enumerate()
            .filter(|(_, &locked)| locked)
            .map(|(i, _)| GiftId::from_index(i))
    }

    pub fn round_steals(&self, gift: GiftId) -> u32 {
        self.round_steals[gift.index()]
    }

    pub fn total_steals(&self, gift: GiftId) -> u32 {
        self.total_steals[gift.index()]
    }

    pub fn opened_count(&self) -> usize {
        self.opened
    }

    pub fn wrapped_gifts(&self) -> impl Iterator<Item = GiftId> + '_ {
        self.status
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == GiftStatus::Wrapped)
            .map(|(i, _)| GiftId::from_index(i))
    }

    pub fn opened_gifts(&self) -> impl Iterator<Item = GiftId> + '_ {
        self.status
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == GiftStatus::Opened)
            .map(|(i, _)| GiftId::from_index(i))
    }

    /// Seat-indexed ownership, `None` for empty hands.
    pub fn ownership(&self) -> &[Option<GiftId>] {
        &self.ownership
    }

    /// The player who must act next during the rounds: the displaced victim
    /// if a chain is running, otherwise the seat whose round it is.
    pub fn current_actor(&self) -> Option<PlayerId> {
        match self.phase {
            Phase::Rounds => Some(self.displaced.unwrap_or(PlayerId(self.round))),
            Phase::FinalSwap | Phase::Concluded => None,
        }
    }

    /// Whether `gift` may be taken right now, given chain locks and limits.
    pub fn stealable(&self, gift: GiftId) -> bool {
        let i = gift.index();
        !self.chain_locked[i]
            && (self.limits.per_round == 0 || self.round_steals[i] < self.limits.per_round)
            && (self.limits.lifetime == 0 || self.total_steals[i] < self.limits.lifetime)
    }

    /// Players `actor` may steal from: anyone else holding a stealable gift.
    pub fn steal_targets(&self, actor: PlayerId) -> impl Iterator<Item = (PlayerId, GiftId)> + '_ {
        self.ownership.iter().enumerate().filter_map(move |(i, owned)| {
            let gift = (*owned)?;
            let victim = PlayerId::from_index(i);
            (victim != actor && self.stealable(gift)).then_some((victim, gift))
        })
    }

    /// Every legal action of `actor`, opens first (by gift number), then
    /// steals (by victim seat).
    pub fn legal_actions(&self, actor: PlayerId) -> Result<Vec<Action>> {
        self.expect_actor(actor)?;
        let mut actions: Vec<Action> = self.wrapped_gifts().map(Action::Open).collect();
        actions.extend(self.steal_targets(actor).map(|(victim, _)| Action::Steal(victim)));
        Ok(actions)
    }

    fn expect_actor(&self, actor: PlayerId) -> Result<()> {
        match self.current_actor() {
            None => Err(Error::InvalidPhase(format!("no actions remain in phase {:?}", self.phase))),
            Some(expected) if expected != actor => Err(Error::IllegalMove(format!(
                "{actor} acted but {expected} is to move"
            ))),
            Some(_) => {
                if actor.index() >= self.n() {
                    return Err(Error::IllegalMove(format!("{actor} is not seated")));
                }
                Ok(())
            }
        }
    }

    fn check_gift(&self, gift: GiftId) -> Result<()> {
        if gift.index() >= self.n() {
            return Err(Error::IllegalMove(format!("{gift} does not exist")));
        }
        Ok(())
    }

    /// Dispatches to [`apply_open`](Self::apply_open) or [`apply_steal`](Self::apply_steal).
    pub fn apply(&mut self, actor: PlayerId, action: Action) -> Result<ActionKind> {
        match action {
            Action::Open(gift) => {
                self.apply_open(actor, gift)?;
                Ok(ActionKind::Open { gift })
            }
            Action::Steal(victim) => {
                let gift = self.apply_steal(actor, victim)?;
                Ok(ActionKind::Steal { victim, gift })
            }
        }
    }

    /// Opens a wrapped gift. An open always ends the running chain and
    /// with it the round.
    pub fn apply_open(&mut self, actor: PlayerId, gift: GiftId) -> Result<()> {
        self.expect_actor(actor)?;
        self.check_gift(gift)?;
        if self.status[gift.index()] == GiftStatus::Opened {
            return Err(Error::IllegalMove(format!("{gift} is already open")));
        }
        debug_assert!(self.ownership[actor.index()].is_none(), "{actor} acts while holding a gift");

        self.ownership[actor.index()] = Some(gift);
        self.holder[gift.index()] = Some(actor);
        self.status[gift.index()] = GiftStatus::Opened;
        self.opened += 1;
        self.end_round();
        Ok(())
    }

    fn end_round(&mut self) {
        self.chain_locked.iter_mut().for_each(|l| *l = false);
        self.round_steals.iter_mut().for_each(|c| *c = 0);
        self.displaced = None;
        self.chain_length = 0;
        self.round += 1;
        if self.round > self.n() {
            self.phase = Phase::FinalSwap;
        }
    }

    /// `thief` takes the gift held by `victim`; the gift is chain-locked and
    /// the victim becomes the next actor. Returns the transferred gift.
    pub fn apply_steal(&mut self, thief: PlayerId, victim: PlayerId) -> Result<GiftId> {
        self.expect_actor(thief)?;
        if victim == thief {
            return Err(Error::IllegalMove(format!("{thief} cannot steal from themselves")));
        }
        if victim.index() >= self.n() {
            return Err(Error::IllegalMove(format!("{victim} is not seated")));
        }
        let gift = self.ownership[victim.index()]
            .ok_or_else(|| Error::IllegalMove(format!("{victim} holds nothing to steal")))?;
        if !self.stealable(gift) {
            return Err(Error::IllegalMove(format!("{gift} held by {victim} is not stealable")));
        }

        self.ownership[victim.index()] = None;
        self.ownership[thief.index()] = Some(gift);
        self.holder[gift.index()] = Some(thief);
        self.chain_locked[gift.index()] = true;
        self.round_steals[gift.index()] += 1;
        self.total_steals[gift.index()] += 1;
        self.displaced = Some(victim);
        self.chain_length += 1;
        Ok(gift)
    }

    /// Seat 1's optional closing trade. `None` keeps the current gift.
    pub fn final_swap(&mut self, partner: Option<PlayerId>) -> Result<()> {
        if self.phase != Phase::FinalSwap {
            return Err(Error::InvalidPhase(format!(
                "the final swap needs all rounds complete (phase {:?})",
                self.phase
            )));
        }
        if let Some(other) = partner {
            let first = PlayerId(1);
            if other == first || other.index() >= self.n() {
                return Err(Error::IllegalMove(format!("{first} cannot swap with {other}")));
            }
            self.ownership.swap(first.index(), other.index());
            for seat in [first, other] {
                if let Some(gift) = self.ownership[seat.index()] {
                    self.holder[gift.index()] = Some(seat);
                }
            }
        }
        self.phase = Phase::Concluded;
        Ok(())
    }

    /// Checks the structural invariants, returning a description of the
    /// first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.n();
        let mut seen = vec![false; n];
        for (i, owned) in self.ownership.iter().enumerate() {
            if let Some(gift) = owned {
                if std::mem::replace(&mut seen[gift.index()], true) {
                    return Err(format!("{gift} owned twice"));
                }
                if self.status[gift.index()] != GiftStatus::Opened {
                    return Err(format!("{gift} owned while wrapped"));
                }
                if self.holder[gift.index()] != Some(PlayerId::from_index(i)) {
                    return Err(format!("holder index out of sync for {gift}"));
                }
            }
        }
        let opened = self.status.iter().filter(|&&s| s == GiftStatus::Opened).count();
        if opened != self.opened {
            return Err("opened counter out of sync".into());
        }
        for (j, locked) in self.chain_locked.iter().enumerate() {
            if *locked && self.status[j] != GiftStatus::Opened {
                return Err(format!("{} locked while wrapped", GiftId::from_index(j)));
            }
        }
        if self.displaced.is_none() && self.chain_locked.iter().any(|&l| l) {
            return Err("locks survive outside a chain".into());
        }
        let (per_round, lifetime) = (self.limits.per_round, self.limits.lifetime);
        for j in 0..n {
            if per_round > 0 && self.round_steals[j] > per_round {
                return Err(format!("per-round cap exceeded on {}", GiftId::from_index(j)));
            }
            if lifetime > 0 && self.total_steals[j] > lifetime {
                return Err(format!("lifetime cap exceeded on {}", GiftId::from_index(j)));
            }
            if self.round_steals[j] > self.total_steals[j] {
                return Err("round counter above lifetime counter".into());
            }
        }
        match self.phase {
            Phase::Rounds => {
                // Rounds 1..k-1 are complete, so k-1 gifts are open.
                if opened != self.round - 1 {
                    return Err(format!("{opened} gifts open at the start of round {}", self.round));
                }
                if self.chain_length > n.saturating_sub(1) {
                    return Err("chain longer than n - 1".into());
                }
            }
            Phase::FinalSwap | Phase::Concluded => {
                if seen.iter().any(|s| !s) {
                    return Err("final ownership is not a bijection".into());
                }
            }
        }
        Ok(())
    }
}

/// A decision procedure for every seat. The engine calls it at each decision
/// point and reports every transition back through the hooks.
pub trait Policy {
    fn choose<R: Rng + ?Sized>(&mut self, state: &GameState, actor: PlayerId, rng: &mut R) -> Action;

    /// Seat 1's final swap partner, if any.
    fn choose_swap<R: Rng + ?Sized>(&mut self, _state: &GameState, _rng: &mut R) -> Option<PlayerId> {
        None
    }

    /// Called after each open or steal has been applied.
    fn observe(&mut self, _state: &GameState, _record: &ActionRecord) {}

    /// Called once after each round's closing open.
    fn end_round(&mut self, _state: &GameState) {}
}

/// Result of one round: the chain length and the log of the round's actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundOutcome {
    pub chain_length: usize,
    pub records: Vec<ActionRecord>,
}

/// Plays the primary turn of the current round and its full chain.
pub fn run_round<P, R>(state: &mut GameState, policy: &mut P, rng: &mut R) -> Result<RoundOutcome>
where
    P: Policy + ?Sized,
    R: Rng + ?Sized,
{
    if state.phase() != Phase::Rounds {
        return Err(Error::InvalidPhase("all rounds have been played".into()));
    }
    let round = state.round();
    let mut records = Vec::new();
    loop {
        let actor = state.current_actor().expect("rounds phase always has an actor");
        // A wrapped gift exists at every decision point before the last open,
        // so the action set is never empty.
        debug_assert!(state.wrapped_gifts().next().is_some());
        let position_in_chain = state.chain_length();
        let action = policy.choose(state, actor, rng);
        let kind = state.apply(actor, action)?;
        let record = ActionRecord { actor, kind, round, position_in_chain };
        policy.observe(state, &record);
        records.push(record);
        if let ActionKind::Open { .. } = kind {
            policy.end_round(state);
            return Ok(RoundOutcome { chain_length: position_in_chain, records });
        }
    }
}

/// Outcome of a complete game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameResult {
    /// Seat-indexed final gifts.
    pub final_ownership: Vec<GiftId>,
    pub trajectory: Vec<ActionRecord>,
    pub steal_count: usize,
    pub chain_lengths: Vec<usize>,
}

/// Plays rounds `1..=n` and the final swap.
pub fn run_game<P, R>(n: usize, limits: StealLimits, policy: &mut P, rng: &mut R) -> Result<GameResult>
where
    P: Policy + ?Sized,
    R: Rng + ?Sized,
{
    let mut state = GameState::new(n, limits)?;
    let mut trajectory = Vec::new();
    let mut chain_lengths = Vec::with_capacity(n);
    while state.phase() == Phase::Rounds {
        let outcome = run_round(&mut state, policy, rng)?;
        chain_lengths.push(outcome.chain_length);
        trajectory.extend(outcome.records);
    }
    let partner = policy.choose_swap(&state, rng);
    state.final_swap(partner)?;
    trajectory.push(ActionRecord {
        actor: PlayerId(1),
        kind: ActionKind::Swap { with: partner },
        round: n,
        position_in_chain: 0,
    });
    let final_ownership = state
        .ownership()
        .iter()
        .map(|g| g.expect("every seat holds a gift once the game concludes"))
        .collect();
    Ok(GameResult {
        final_ownership,
        steal_count: chain_lengths.iter().sum(),
        chain_lengths,
        trajectory,
    })
}

/// Re-applies a logged trajectory from the initial state.
pub fn replay(n: usize, limits: StealLimits, trajectory: &[ActionRecord]) -> Result<GameState> {
    let mut state = GameState::new(n, limits)?;
    for record in trajectory {
        match record.kind {
            ActionKind::Open { gift } => state.apply_open(record.actor, gift)?,
            ActionKind::Steal { victim, gift } => {
                let taken = state.apply_steal(record.actor, victim)?;
                if taken != gift {
                    return Err(Error::IllegalMove(format!(
                        "replay diverged: expected {gift}, took {taken}"
                    )));
                }
            }
            ActionKind::Swap { with } => state.final_swap(with)?,
        }
    }
    Ok(state)
}
