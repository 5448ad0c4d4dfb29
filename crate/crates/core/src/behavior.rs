//! Behavioral decorations: feature flags, parameters, social costs,
//! frustration, adaptive steal probabilities and biased gift selection.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::PlayerId;
use crate::error::{Error, Result};

/// One of the four toggleable behavioral features.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Feature {
    #[serde(rename = "PI")]
    PartialInformation,
    #[serde(rename = "SC")]
    SocialCosts,
    #[serde(rename = "AD")]
    AdaptiveDynamics,
    #[serde(rename = "BS")]
    BiasedSelection,
}

impl Feature {
    pub const ALL: [Feature; 4] = [
        Feature::PartialInformation,
        Feature::SocialCosts,
        Feature::AdaptiveDynamics,
        Feature::BiasedSelection,
    ];

    pub fn abbrev(self) -> &'static str {
        match self {
            Feature::PartialInformation => "PI",
            Feature::SocialCosts => "SC",
            Feature::AdaptiveDynamics => "AD",
            Feature::BiasedSelection => "BS",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Feature::ALL
            .into_iter()
            .find(|f| f.abbrev().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown feature {s:?} (expected PI, SC, AD or BS)")))
    }
}

/// A subset of the four features, stored as a bit mask (PI = bit 0 ... BS = bit 3).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSet(u8);

impl FeatureSet {
    pub const EMPTY: FeatureSet = FeatureSet(0);
    pub const FULL: FeatureSet = FeatureSet(0b1111);

    pub fn from_mask(mask: u8) -> Result<Self> {
        if mask > 0b1111 {
            return Err(Error::InvalidArgument(format!("feature mask {mask} out of range")));
        }
        Ok(FeatureSet(mask))
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn single(feature: Feature) -> Self {
        FeatureSet(feature.bit())
    }

    pub fn with(self, feature: Feature) -> Self {
        FeatureSet(self.0 | feature.bit())
    }

    pub fn contains(self, feature: Feature) -> bool {
        self.0 & feature.bit() != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Feature> {
        Feature::ALL.into_iter().filter(move |f| self.contains(*f))
    }

    /// All 16 subsets in mask order, BASE first and FULL last.
    pub fn all() -> impl Iterator<Item = FeatureSet> {
        (0..16u8).map(FeatureSet)
    }
}

impl fmt::Display for FeatureSet {
    /// `BASE`, `FULL`, or the abbreviations joined with `+` (e.g. `PI+SC`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FeatureSet::EMPTY => f.write_str("BASE"),
            FeatureSet::FULL => f.write_str("FULL"),
            set => {
                let names: Vec<_> = set.iter().map(Feature::abbrev).collect();
                f.write_str(&names.join("+"))
            }
        }
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    /// Accepts a comma or `+` separated list, `BASE`/`none`/empty, or `FULL`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.eq_ignore_ascii_case("base") || s.eq_ignore_ascii_case("none") {
            return Ok(FeatureSet::EMPTY);
        }
        if s.eq_ignore_ascii_case("full") {
            return Ok(FeatureSet::FULL);
        }
        s.split([',', '+'])
            .try_fold(FeatureSet::EMPTY, |set, part| Ok(set.with(part.parse()?)))
    }
}

impl Serialize for FeatureSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FeatureSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Feature flags plus every behavioral constant. Defaults are the
/// experiment's calibrated values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BehaviorParams {
    #[serde(skip)]
    pub features: FeatureSet,
    /// Base cost of any steal.
    pub c0: f64,
    /// Repeat-victim multiplier.
    pub alpha: f64,
    /// Reputation cost per lifetime steal.
    pub beta: f64,
    /// Frustration gained when robbed.
    pub gamma: f64,
    /// Frustration lost at each round end.
    pub gamma_prime: f64,
    /// Intercept of the clipped-linear steal probability.
    pub p0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    /// Scale of the logit steal probability.
    pub mu_logit: f64,
    /// Softmax temperature for biased selection.
    pub tau: f64,
    pub mu0: f64,
    pub sigma0_sq: f64,
    pub sigma_a: f64,
    pub rho_risk: f64,
    /// Net-utility bar of the threshold strategy.
    pub threshold: f64,
}

impl Default for BehaviorParams {
    fn default() -> Self {
        BehaviorParams {
            features: FeatureSet::EMPTY,
            c0: 0.05,
            alpha: 2.0,
            beta: 0.1,
            gamma: 0.15,
            gamma_prime: 0.05,
            p0: 0.5,
            lambda1: 0.2,
            lambda2: 0.5,
            lambda3: 0.3,
            mu_logit: 1.0,
            tau: 2.0,
            mu0: 0.5,
            sigma0_sq: 0.25,
            sigma_a: 0.3,
            rho_risk: 0.5,
            threshold: 0.6,
        }
    }
}

impl BehaviorParams {
    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("c0", self.c0),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("gamma_prime", self.gamma_prime),
            ("p0", self.p0),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda3", self.lambda3),
            ("tau", self.tau),
            ("rho_risk", self.rho_risk),
            ("threshold", self.threshold),
        ];
        for (name, value) in non_negative {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidConfiguration(format!("{name} must be finite and non-negative, got {value}")));
            }
        }
        for (name, value) in [("mu_logit", self.mu_logit), ("sigma0_sq", self.sigma0_sq), ("sigma_a", self.sigma_a)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidConfiguration(format!("{name} must be positive, got {value}")));
            }
        }
        if !self.mu0.is_finite() {
            return Err(Error::InvalidConfiguration("mu0 must be finite".into()));
        }
        Ok(())
    }
}

/// Per-game social bookkeeping: frustration, steals committed and who robbed whom.
#[derive(Clone, Debug, PartialEq)]
pub struct SocialState {
    n: usize,
    frustration: Vec<f64>,
    steals: Vec<u32>,
    history: Vec<u32>,
}

impl SocialState {
    pub fn new(n: usize) -> Self {
        SocialState { n, frustration: vec![0.0; n], steals: vec![0; n], history: vec![0; n * n] }
    }

    pub fn frustration(&self, player: PlayerId) -> f64 {
        self.frustration[player.index()]
    }

    /// Total steals committed by `player`.
    pub fn steals_by(&self, player: PlayerId) -> u32 {
        self.steals[player.index()]
    }

    /// Prior steals by `thief` from `victim`.
    pub fn history(&self, thief: PlayerId, victim: PlayerId) -> u32 {
        self.history[thief.index() * self.n + victim.index()]
    }

    /// Cost to `thief` of stealing from `victim` given the history so far:
    /// `c0 + c0 * alpha * H(victim) + beta * steals`.
    pub fn social_cost(&self, thief: PlayerId, victim: PlayerId, params: &BehaviorParams) -> f64 {
        let repeat = f64::from(self.history(thief, victim));
        let reputation = f64::from(self.steals_by(thief));
        params.c0 + params.c0 * params.alpha * repeat + params.beta * reputation
    }

    /// Raises the victim's frustration by `gamma`, capped at 1.
    pub fn frustration_on_theft(&mut self, victim: PlayerId, gamma: f64) {
        let f = &mut self.frustration[victim.index()];
        *f = (*f + gamma).min(1.0);
    }

    /// Round-end decay for every player, floored at 0.
    pub fn frustration_decay(&mut self, gamma_prime: f64) {
        for f in &mut self.frustration {
            *f = (*f - gamma_prime).max(0.0);
        }
    }

    /// Bookkeeping for one committed steal: history, reputation count and
    /// the victim's frustration.
    pub fn record_steal(&mut self, thief: PlayerId, victim: PlayerId, gamma: f64) {
        self.history[thief.index() * self.n + victim.index()] += 1;
        self.steals[thief.index()] += 1;
        self.frustration_on_theft(victim, gamma);
    }
}

/// Value of the target minus value of the current holding (0 when empty
/// handed) minus the social cost.
pub fn net_steal_utility(target_value: f64, own_value: Option<f64>, social_cost: f64) -> f64 {
    target_value - own_value.unwrap_or(0.0) - social_cost
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Lower and upper clip of the clipped-linear steal probability.
pub const STEAL_PROB_FLOOR: f64 = 0.05;
pub const STEAL_PROB_CEILING: f64 = 0.95;

/// `clip(p0 + l1*phase + l2*frustration - l3*satisfaction, 0.05, 0.95)`.
pub fn adaptive_prob_linear(p0: f64, phase: f64, frustration: f64, satisfaction: f64, lambdas: [f64; 3]) -> f64 {
    let [l1, l2, l3] = lambdas;
    (p0 + l1 * phase + l2 * frustration - l3 * satisfaction).clamp(STEAL_PROB_FLOOR, STEAL_PROB_CEILING)
}

/// Logit steal probability `sigmoid((dU + l1*phase + l2*frustration - l3*satisfaction) / mu)`,
/// where `dU` is the systematic steal-minus-open utility.
pub fn adaptive_prob_logit(
    utility_gap: f64,
    phase: f64,
    frustration: f64,
    satisfaction: f64,
    lambdas: [f64; 3],
    mu_logit: f64,
) -> Result<f64> {
    if !(mu_logit > 0.0) {
        return Err(Error::InvalidConfiguration(format!("logit scale must be positive, got {mu_logit}")));
    }
    let [l1, l2, l3] = lambdas;
    Ok(sigmoid((utility_gap + l1 * phase + l2 * frustration - l3 * satisfaction) / mu_logit))
}

/// Softmax of `tau * value` over the wrapped pool.
pub fn selection_weights(values: &[f64], tau: f64) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("no wrapped gifts to choose from".into()));
    }
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!("temperature must be non-negative, got {tau}")));
    }
    let top = values.iter().map(|v| tau * v).fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = values.iter().map(|v| (tau * v - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(weights)
}

/// Draws an index from normalized `weights`.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // Rounding can leave the cumulative sum a hair under 1.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}
