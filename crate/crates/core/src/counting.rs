//! Exact trajectory counts.
//!
//! A round with `k - 1` opened gifts admits `A(k)` chain patterns (an ordered
//! selection of distinct gifts to steal, possibly empty, followed by an open).
//! Multiplying by the `n!` ways to assign wrapped gifts to the round-closing
//! opens gives the trajectory count `T(n)`. With a lifetime limit the
//! patterns depend on how often each gift has been stolen, so the count is
//! a dynamic program over the multiset of per-gift steal counts.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::engine::{Action, GameState, Phase, StealLimits};
use crate::error::{Error, Result};

/// Largest player count the brute-force enumerator accepts.
pub const BRUTE_FORCE_MAX_PLAYERS: usize = 6;

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `A(k) = sum_{j=0}^{k-1} (k-1)!/j!`, the number of chain patterns in round `k`.
pub fn round_action_count(k: usize) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidArgument("rounds are numbered from 1".into()));
    }
    // Summing from j = k-1 down: each term is the previous one times (j+1).
    let mut term = BigUint::one();
    let mut total = BigUint::one();
    for j in (0..k - 1).rev() {
        term *= j + 1;
        total += &term;
    }
    Ok(total)
}

/// `T(n) = n! * prod_{k=1}^{n} A(k)`, excluding the final swap.
pub fn trajectory_count(n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one player is required".into()));
    }
    (1..=n).try_fold(factorial(n), |acc, k| Ok(acc * round_action_count(k)?))
}

/// `n * T(n)`: seat 1 may keep or swap with any of the other `n - 1` seats.
pub fn trajectory_count_with_swap(n: usize) -> Result<BigUint> {
    Ok(trajectory_count(n)? * n)
}

/// Sorted per-gift steal counts of the opened gifts. Gifts with equal counts
/// are interchangeable, so only the multiset matters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultisetState(Vec<u32>);

impl MultisetState {
    pub fn new(mut counts: Vec<u32>) -> Self {
        counts.sort_unstable();
        MultisetState(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn with_opened(&self) -> Self {
        let mut counts = Vec::with_capacity(self.0.len() + 1);
        counts.push(0);
        counts.extend_from_slice(&self.0);
        MultisetState(counts)
    }
}

fn below(count: u32, lifetime: u32) -> bool {
    lifetime == 0 || count < lifetime
}

/// Every non-empty chain from `start`: maps the resulting multiset (each
/// chosen gift's count incremented once) to the number of ordered chains
/// reaching it. Only gifts below `lifetime` (0 = unlimited) are targets,
/// and a gift leaves the pool once taken.
pub fn count_chains(start: &MultisetState, lifetime: u32) -> BTreeMap<MultisetState, BigUint> {
    // Frontier: (still available, already taken and incremented, ineligible) -> ways.
    type Key = (Vec<u32>, Vec<u32>);
    let (available, fixed): (Vec<u32>, Vec<u32>) = start.0.iter().partition(|&&c| below(c, lifetime));
    let mut frontier: BTreeMap<Key, BigUint> = BTreeMap::new();
    frontier.insert((available, fixed), BigUint::one());
    let mut out: BTreeMap<MultisetState, BigUint> = BTreeMap::new();

    while !frontier.is_empty() {
        let mut next: BTreeMap<Key, BigUint> = BTreeMap::new();
        for ((available, fixed), ways) in frontier {
            // Each distinct count value with multiplicity m contributes m ways.
            let mut i = 0;
            while i < available.len() {
                let c = available[i];
                let m = available[i..].iter().take_while(|&&x| x == c).count();
                let mut rest = available.clone();
                rest.remove(i);
                let mut taken = fixed.clone();
                taken.push(c + 1);
                taken.sort_unstable();
                let reach = &ways * m;

                let whole: Vec<u32> = rest.iter().chain(&taken).copied().collect();
                *out.entry(MultisetState::new(whole)).or_default() += &reach;
                *next.entry((rest, taken)).or_default() += reach;
                i += m;
            }
        }
        frontier = next;
    }
    out
}

/// Trajectory count under a lifetime limit (0 = unlimited), excluding the final swap.
pub fn count_trajectories(n: usize, lifetime: u32) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one player is required".into()));
    }
    if lifetime == 0 {
        return trajectory_count(n);
    }
    let mut states: BTreeMap<MultisetState, BigUint> = BTreeMap::new();
    states.insert(MultisetState::default(), BigUint::one());
    for _round in 1..=n {
        let mut next: BTreeMap<MultisetState, BigUint> = BTreeMap::new();
        for (state, ways) in &states {
            *next.entry(state.with_opened()).or_default() += ways;
            for (after, chains) in count_chains(state, lifetime) {
                *next.entry(after.with_opened()).or_default() += ways * chains;
            }
        }
        states = next;
    }
    let patterns: BigUint = states.values().sum();
    Ok(factorial(n) * patterns)
}

/// Counts trajectories by walking every legal action sequence through the
/// engine itself.
///
/// Legality never depends on which wrapped gift is opened, so the subtrees
/// below the opens of a round are isomorphic; the walk follows one of them
/// and multiplies by the number of wrapped gifts.
pub fn brute_force_count(n: usize, limits: StealLimits) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one player is required".into()));
    }
    if n > BRUTE_FORCE_MAX_PLAYERS {
        return Err(Error::InvalidArgument(format!(
            "brute-force enumeration is limited to {BRUTE_FORCE_MAX_PLAYERS} players, got {n}"
        )));
    }
    let state = GameState::new(n, limits)?;
    walk(&state)
}

fn walk(state: &GameState) -> Result<BigUint> {
    if state.phase() != Phase::Rounds {
        return Ok(BigUint::one());
    }
    let actor = state.current_actor().expect("rounds phase has an actor");
    let mut total = BigUint::zero();
    let mut opens = 0usize;
    let mut first_open = None;
    for action in state.legal_actions(actor)? {
        match action {
            Action::Open(_) => {
                opens += 1;
                first_open.get_or_insert(action);
            }
            Action::Steal(_) => {
                let mut child = state.clone();
                child.apply(actor, action)?;
                total += walk(&child)?;
            }
        }
    }
    if let Some(action) = first_open {
        let mut child = state.clone();
        child.apply(actor, action)?;
        total += walk(&child)? * opens;
    }
    Ok(total)
}
