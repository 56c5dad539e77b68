//! Online momentum-SGD training of a denoising autoencoder.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::CorruptedPair;
use crate::io::{sig17, write_atomic};
use crate::nn::{DenseNetwork, GradientSet, Scratch};
use crate::{Error, Result};

pub use crate::model::{load_model, save_model};

/// Anything that supplies an (input, target) pair of network-unit vectors.
pub trait TrainingPair {
    fn input(&self) -> &[f64];
    fn target(&self) -> &[f64];
}

impl TrainingPair for CorruptedPair {
    fn input(&self) -> &[f64] {
        &self.input
    }

    fn target(&self) -> &[f64] {
        &self.target
    }
}

impl TrainingPair for (Vec<f64>, Vec<f64>) {
    fn input(&self) -> &[f64] {
        &self.0
    }

    fn target(&self) -> &[f64] {
        &self.1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub max_epochs: usize,
    /// Stop once an epoch's mean loss is at or below this.
    pub target_mse: f64,
    pub shuffle_seed: u64,
    pub log_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            momentum: 0.9,
            max_epochs: 2000,
            target_mse: 1e-5,
            shuffle_seed: 0,
            log_every: 100,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidConfig("max_epochs must be >= 1".into()));
        }
        if !(self.target_mse >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "target_mse must be >= 0, got {}",
                self.target_mse
            )));
        }
        if self.log_every == 0 {
            return Err(Error::InvalidConfig("log_every must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs_run: usize,
    /// Mean per-sample loss of each epoch, accumulated while training.
    pub history: Vec<f64>,
    /// Mean loss of the untrained network over all pairs.
    pub initial_mse: f64,
    pub final_mse: f64,
    pub wall_time: Duration,
}

impl TrainReport {
    /// `epoch,mean_mse` rows, epochs counted from 1.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("epoch,mean_mse\n");
        for (i, mse) in self.history.iter().enumerate() {
            let _ = writeln!(out, "{},{}", i + 1, sig17(*mse));
        }
        out
    }

    pub fn save_history(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.history_csv().as_bytes())
    }
}

/// Trains `net` in place, one momentum-SGD update per pair, visiting pairs in
/// a freshly shuffled order each epoch.
///
/// Stops after `max_epochs` or as soon as an epoch's mean loss reaches
/// `target_mse`. The result depends only on `pairs`, `cfg` and the initial
/// network.
pub fn train<P: TrainingPair>(
    pairs: &[P],
    cfg: &TrainConfig,
    net: &mut DenseNetwork,
) -> Result<TrainReport> {
    cfg.validate()?;
    if pairs.is_empty() {
        return Err(Error::InvalidConfig("no training pairs".into()));
    }
    for p in pairs {
        net.check_input(p.input())?;
        net.check_target(p.target())?;
    }

    let started = Instant::now();
    let initial_mse = pairs
        .iter()
        .map(|p| net.loss(p.input(), p.target()))
        .sum::<Result<f64>>()?
        / pairs.len() as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.shuffle_seed);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut scratch = Scratch::new(net);
    let mut grads = GradientSet::zeros_like(net);
    let mut velocity = GradientSet::zeros_like(net);
    let mut history = Vec::with_capacity(cfg.max_epochs.min(100_000));

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &i in &order {
            let p = &pairs[i];
            let loss = net
                .backprop_into(p.input(), p.target(), &mut scratch, &mut grads)
                .map_err(|e| match e {
                    Error::Numerical(_) => Error::NonFiniteLoss { epoch, pair: i },
                    other => other,
                })?;
            net.apply_update(&grads, &mut velocity, cfg.learning_rate, cfg.momentum)?;
            total += loss;
        }
        let mean = total / pairs.len() as f64;
        if !mean.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch,
                pair: pairs.len() - 1,
            });
        }
        history.push(mean);
        if epoch % cfg.log_every == 0 {
            log::info!("epoch {epoch}: mean mse {mean:.3e}");
        }
        if mean <= cfg.target_mse {
            log::info!("epoch {epoch}: reached target mse {:.3e}", cfg.target_mse);
            break;
        }
    }

    Ok(TrainReport {
        epochs_run: history.len(),
        final_mse: *history.last().expect("at least one epoch"),
        initial_mse,
        history,
        wall_time: started.elapsed(),
    })
}
