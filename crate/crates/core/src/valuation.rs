//! Subjective valuations, objective quality and appearance signals.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::engine::{GiftId, PlayerId};
use crate::error::{Error, Result};

/// Generative model for the valuation matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValuationModel {
    /// Every entry i.i.d. Uniform(0, 1).
    Independent,
    /// `clip(rho * q_j + sqrt(1 - rho^2) * eps_ij)` with uniform `q` and `eps`.
    Correlated { rho: f64 },
    /// Even seats value gift `j` near `q_j`, odd seats near `1 - q_j`.
    Negative { sigma: f64 },
}

impl ValuationModel {
    pub fn name(&self) -> &'static str {
        match self {
            ValuationModel::Independent => "independent",
            ValuationModel::Correlated { .. } => "correlated",
            ValuationModel::Negative { .. } => "negative",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ValuationModel::Independent => Ok(()),
            ValuationModel::Correlated { rho } if (0.0..=1.0).contains(&rho) => Ok(()),
            ValuationModel::Correlated { rho } => {
                Err(Error::InvalidConfiguration(format!("rho must lie in [0, 1], got {rho}")))
            }
            ValuationModel::Negative { sigma } if sigma > 0.0 && sigma.is_finite() => Ok(()),
            ValuationModel::Negative { sigma } => {
                Err(Error::InvalidConfiguration(format!("sigma must be positive, got {sigma}")))
            }
        }
    }
}

pub(crate) fn clip01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `n x n` subjective values (row = player, column = gift) plus per-gift quality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValuationMatrix {
    n: usize,
    values: Vec<f64>,
    quality: Vec<f64>,
    model: ValuationModel,
}

impl ValuationMatrix {
    /// Builds a matrix from explicit rows (fixtures, replays). Quality defaults
    /// to column means and the model is reported as independent.
    pub fn from_rows(rows: Vec<Vec<f64>>, quality: Option<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("valuation rows must form a non-empty square".into()));
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument("valuations must lie in [0, 1]".into()));
        }
        let quality = match quality {
            Some(q) if q.len() == n => q,
            Some(_) => return Err(Error::InvalidArgument("one quality per gift".into())),
            None => column_means(&values, n),
        };
        Ok(ValuationMatrix { n, values, quality, model: ValuationModel::Independent })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> ValuationModel {
        self.model
    }

    pub fn value(&self, player: PlayerId, gift: GiftId) -> f64 {
        self.values[player.index() * self.n + gift.index()]
    }

    pub fn row(&self, player: PlayerId) -> &[f64] {
        let start = player.index() * self.n;
        &self.values[start..start + self.n]
    }

    pub fn quality(&self) -> &[f64] {
        &self.quality
    }

    pub fn column_mean(&self, gift: GiftId) -> f64 {
        (0..self.n).map(|i| self.values[i * self.n + gift.index()]).sum::<f64>() / self.n as f64
    }
}

fn column_means(values: &[f64], n: usize) -> Vec<f64> {
    (0..n).map(|j| (0..n).map(|i| values[i * n + j]).sum::<f64>() / n as f64).collect()
}

/// Draws a fresh valuation matrix under `model`.
pub fn generate_valuations<R: Rng + ?Sized>(model: ValuationModel, n: usize, rng: &mut R) -> Result<ValuationMatrix> {
    if n == 0 {
        return Err(Error::InvalidConfiguration("a game needs at least one player".into()));
    }
    model.validate()?;
    let (values, quality) = match model {
        ValuationModel::Independent => {
            let values: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>()).collect();
            let quality = column_means(&values, n);
            (values, quality)
        }
        ValuationModel::Correlated { rho } => {
            let quality: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let idio = (1.0 - rho * rho).max(0.0).sqrt();
            let mut values = Vec::with_capacity(n * n);
            for _ in 0..n {
                for q in &quality {
                    let eps: f64 = rng.random();
                    values.push(clip01(rho * q + idio * eps));
                }
            }
            (values, quality)
        }
        ValuationModel::Negative { sigma } => {
            let quality: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let noise = Normal::new(0.0, sigma).expect("sigma validated");
            let mut values = Vec::with_capacity(n * n);
            for i in 0..n {
                // Camp membership follows seat parity; seats start at 1.
                let even_seat = PlayerId::from_index(i).seat().is_multiple_of(2);
                for q in &quality {
                    let centre = if even_seat { *q } else { 1.0 - q };
                    values.push(clip01(centre + noise.sample(rng)));
                }
            }
            (values, quality)
        }
    };
    Ok(ValuationMatrix { n, values, quality, model })
}

/// Noisy per-gift observations of quality, clipped to `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppearanceVector {
    signals: Vec<f64>,
    noise_sd: f64,
}

impl AppearanceVector {
    pub fn from_signals(signals: Vec<f64>, noise_sd: f64) -> Result<Self> {
        if !(noise_sd > 0.0) {
            return Err(Error::InvalidConfiguration(format!("signal noise must be positive, got {noise_sd}")));
        }
        Ok(AppearanceVector { signals: signals.into_iter().map(clip01).collect(), noise_sd })
    }

    pub fn signals(&self) -> &[f64] {
        &self.signals
    }

    pub fn signal(&self, gift: GiftId) -> f64 {
        self.signals[gift.index()]
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_sd
    }
}

/// `a_j = clip(q_j + N(0, sigma_a^2))` for every gift.
pub fn generate_appearance<R: Rng + ?Sized>(quality: &[f64], sigma_a: f64, rng: &mut R) -> Result<AppearanceVector> {
    if !(sigma_a > 0.0 && sigma_a.is_finite()) {
        return Err(Error::InvalidConfiguration(format!("sigma_a must be positive, got {sigma_a}")));
    }
    let noise = Normal::new(0.0, sigma_a).expect("sigma_a validated");
    let signals = quality.iter().map(|q| clip01(q + noise.sample(rng))).collect();
    Ok(AppearanceVector { signals, noise_sd: sigma_a })
}
