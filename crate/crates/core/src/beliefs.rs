//! Partial-information beliefs: a conjugate Gaussian update of gift quality
//! from the appearance signal, priced with a CARA certainty equivalent.

use serde::{Deserialize, Serialize};

use crate::behavior::{BehaviorParams, Feature};
use crate::engine::{GameState, GiftId, GiftStatus, PlayerId};
use crate::error::{Error, Result};
use crate::valuation::{AppearanceVector, ValuationMatrix};

/// Common prior over gift quality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    pub mean: f64,
    pub variance: f64,
}

impl Prior {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::InvalidConfiguration(format!("prior variance must be positive, got {variance}")));
        }
        Ok(Prior { mean, variance })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    pub mean: f64,
    pub variance: f64,
}

/// Weight placed on the signal, `sigma_0^2 / (sigma_0^2 + sigma_a^2)`.
pub fn signal_weight(prior_variance: f64, signal_sd: f64) -> f64 {
    prior_variance / (prior_variance + signal_sd * signal_sd)
}

/// Posterior of quality after observing `signal` with noise `signal_sd`.
///
/// The posterior mean is the precision-weighted average of the prior mean and
/// the signal; the posterior precision is the sum of both precisions.
pub fn posterior(prior: Prior, signal: f64, signal_sd: f64) -> Result<Posterior> {
    if !(prior.variance > 0.0) {
        return Err(Error::InvalidConfiguration(format!("prior variance must be positive, got {}", prior.variance)));
    }
    if !(signal_sd > 0.0) {
        return Err(Error::InvalidConfiguration(format!("signal noise must be positive, got {signal_sd}")));
    }
    let signal_var = signal_sd * signal_sd;
    if signal_var.is_infinite() {
        return Ok(Posterior { mean: prior.mean, variance: prior.variance });
    }
    let w = signal_weight(prior.variance, signal_sd);
    Ok(Posterior {
        mean: (1.0 - w) * prior.mean + w * signal,
        variance: prior.variance * signal_var / (prior.variance + signal_var),
    })
}

/// CARA certainty equivalent of a Gaussian outcome: `mean - risk/2 * variance`.
pub fn certainty_equivalent(mean: f64, variance: f64, risk_aversion: f64) -> f64 {
    mean - 0.5 * risk_aversion * variance
}

/// Risk-adjusted value of a wrapped gift with appearance `signal`.
pub fn wrapped_gift_value(signal: f64, params: &BehaviorParams) -> Result<f64> {
    let prior = Prior::new(params.mu0, params.sigma0_sq)?;
    let post = posterior(prior, signal, params.sigma_a)?;
    Ok(certainty_equivalent(post.mean, post.variance, params.rho_risk))
}

/// What `player` believes `gift` is worth right now.
///
/// Opened gifts, and every gift without partial information, are valued at
/// the player's true subjective value. Under partial information a wrapped
/// gift is valued by the certainty equivalent of its quality posterior. The
/// result is not clipped.
pub fn perceived_value(
    player: PlayerId,
    gift: GiftId,
    state: &GameState,
    valuations: &ValuationMatrix,
    appearance: &AppearanceVector,
    params: &BehaviorParams,
) -> f64 {
    if params.features.contains(Feature::PartialInformation) && state.status(gift) == GiftStatus::Wrapped {
        wrapped_gift_value(appearance.signal(gift), params).expect("belief parameters validated")
    } else {
        valuations.value(player, gift)
    }
}
