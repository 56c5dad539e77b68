//! Missing-segment inference and residual statistics.
//!
//! A residual is `true_wire - predicted_wire` at the zeroed super-layer, in
//! wire units. Reports carry the overall and per-super-layer sample mean and
//! standard deviation, a histogram over ±10 wires, and the fraction of
//! residuals within a threshold (a stand-in for track-recovery efficiency).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{NormSpec, SENTINEL};
use crate::io::{sig17, write_atomic};
use crate::nn::DenseNetwork;
use crate::trackgen::{TrackSample, SUPERLAYERS};
use crate::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 5.0;
pub const HIST_LOW: f64 = -10.0;
pub const HIST_HIGH: f64 = 10.0;
pub const HIST_BIN_WIDTH: f64 = 0.25;

/// Predicted wire position of super-layer `missing_index` when that slot is
/// replaced by the sentinel. The sample's own value there is never seen by
/// the network.
pub fn infer_missing(
    net: &DenseNetwork,
    sample: &TrackSample,
    missing_index: usize,
    spec: &NormSpec,
) -> Result<f64> {
    if missing_index >= SUPERLAYERS {
        return Err(Error::OutOfRange(format!(
            "missing index {missing_index} outside 0..{SUPERLAYERS}"
        )));
    }
    let mut input = *sample.values();
    input[missing_index] = SENTINEL;
    predict_slot(net, &input, missing_index, spec)
}

/// Like [`infer_missing`] for a wire-unit vector that already holds exactly
/// one sentinel. Returns the slot and its prediction.
pub fn infer_corrupted(
    net: &DenseNetwork,
    input: &[f64; SUPERLAYERS],
    spec: &NormSpec,
) -> Result<(usize, f64)> {
    let zeros: Vec<usize> = (0..SUPERLAYERS).filter(|&k| input[k] == SENTINEL).collect();
    match zeros.as_slice() {
        [k] => Ok((*k, predict_slot(net, input, *k, spec)?)),
        _ => Err(Error::Usage(format!(
            "input must contain exactly one 0 (missing segment), found {}",
            zeros.len()
        ))),
    }
}

fn predict_slot(
    net: &DenseNetwork,
    input: &[f64; SUPERLAYERS],
    slot: usize,
    spec: &NormSpec,
) -> Result<f64> {
    let output = net.forward(&spec.normalize(input)?)?;
    if output.len() != SUPERLAYERS {
        return Err(Error::DimensionMismatch {
            context: "network output",
            expected: SUPERLAYERS,
            got: output.len(),
        });
    }
    Ok(spec.denormalize_value(output[slot]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub missing_index: usize,
    pub true_wire: f64,
    pub predicted_wire: f64,
    pub residual: f64,
}

impl Residual {
    pub fn new(missing_index: usize, true_wire: f64, predicted_wire: f64) -> Self {
        Self {
            missing_index,
            true_wire,
            predicted_wire,
            residual: true_wire - predicted_wire,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Each sample corrupted once at a seeded random slot.
    RandomIndex(u64),
    /// Each sample corrupted at all six slots.
    AllIndices,
}

/// Residuals in sample order (and slot order within a sample).
pub fn residuals(
    net: &DenseNetwork,
    test: &[TrackSample],
    mode: EvalMode,
    spec: &NormSpec,
) -> Result<Vec<Residual>> {
    if test.is_empty() {
        return Err(Error::InvalidConfig("empty test set".into()));
    }
    let one = |s: &TrackSample, k: usize| -> Result<Residual> {
        Ok(Residual::new(k, s[k], infer_missing(net, s, k, spec)?))
    };
    match mode {
        EvalMode::RandomIndex(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            test.iter()
                .map(|s| one(s, rng.random_range(0..SUPERLAYERS)))
                .collect()
        }
        EvalMode::AllIndices => test
            .iter()
            .flat_map(|s| (0..SUPERLAYERS).map(move |k| (s, k)))
            .map(|(s, k)| one(s, k))
            .collect(),
    }
}

pub fn evaluate(
    net: &DenseNetwork,
    test: &[TrackSample],
    mode: EvalMode,
    spec: &NormSpec,
    threshold: f64,
) -> Result<EvalReport> {
    let res = residuals(net, test, mode, spec)?;
    let mut report = summarize(&res, threshold)?;
    report.mode = Some(mode);
    report.wires = Some(spec.wires());
    Ok(report)
}

/// Sample mean and standard deviation (`n - 1` denominator; 0 for one value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    /// Sums in sorted order, so the result does not depend on input order.
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("no values to summarize".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            let mut dev: Vec<f64> = sorted.iter().map(|v| (v - mean) * (v - mean)).collect();
            dev.sort_by(f64::total_cmp);
            (dev.iter().sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self { n, mean, std })
    }
}

/// Fixed-width bins over `[low, high)` plus underflow and overflow counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub underflow: u64,
    pub counts: Vec<u64>,
    pub overflow: u64,
}

impl Histogram {
    pub fn bin_count() -> usize {
        ((HIST_HIGH - HIST_LOW) / HIST_BIN_WIDTH).round() as usize
    }

    pub fn new() -> Self {
        Self {
            underflow: 0,
            counts: vec![0; Self::bin_count()],
            overflow: 0,
        }
    }

    pub fn fill(&mut self, x: f64) {
        if x < HIST_LOW {
            self.underflow += 1;
        } else if x >= HIST_HIGH || x.is_nan() {
            self.overflow += 1;
        } else {
            let bin = (((x - HIST_LOW) / HIST_BIN_WIDTH).floor() as usize).min(self.counts.len() - 1);
            self.counts[bin] += 1;
        }
    }

    pub fn bin_edges(i: usize) -> (f64, f64) {
        let low = HIST_LOW + i as f64 * HIST_BIN_WIDTH;
        (low, low + HIST_BIN_WIDTH)
    }

    pub fn total(&self) -> u64 {
        self.underflow + self.overflow + self.counts.iter().sum::<u64>()
    }

    /// `bin_low,bin_high,count`, with `-inf` / `inf` edges on the outer bins.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,count\n");
        let _ = writeln!(out, "-inf,{HIST_LOW},{}", self.underflow);
        for (i, c) in self.counts.iter().enumerate() {
            let (lo, hi) = Self::bin_edges(i);
            let _ = writeln!(out, "{lo},{hi},{c}");
        }
        let _ = writeln!(out, "{HIST_HIGH},inf,{}", self.overflow);
        out
    }
}

impl Default for Histogram {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexStats {
    pub index: usize,
    /// `None` when no residual had this missing index.
    pub summary: Option<Summary>,
}

impl IndexStats {
    pub fn n(&self) -> usize {
        self.summary.map_or(0, |s| s.n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub per_index: [IndexStats; SUPERLAYERS],
    pub histogram: Histogram,
    pub threshold: f64,
    /// Fraction of residuals with `|r| <= threshold`.
    pub recovery_rate: f64,
    pub mode: Option<EvalMode>,
    pub wires: Option<u32>,
}

impl EvalReport {
    /// `index,n,mean,std`; indices that never went missing get empty stats.
    pub fn per_index_csv(&self) -> String {
        let mut out = String::from("index,n,mean,std\n");
        for s in &self.per_index {
            match s.summary {
                Some(sum) => {
                    let _ = writeln!(out, "{},{},{},{}", s.index, sum.n, sig17(sum.mean), sig17(sum.std));
                }
                None => {
                    let _ = writeln!(out, "{},0,,", s.index);
                }
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# segment-restoration residual report (residual = true - predicted, wire units)\n");
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        match self.mode {
            Some(EvalMode::RandomIndex(seed)) => {
                kv("mode", "random".into());
                kv("seed", seed.to_string());
            }
            Some(EvalMode::AllIndices) => kv("mode", "all".into()),
            None => {}
        }
        if let Some(w) = self.wires {
            kv("wires", w.to_string());
        }
        kv("n", self.n.to_string());
        kv("mean", sig17(self.mean));
        kv("std", sig17(self.std));
        kv("threshold", sig17(self.threshold));
        kv("recovery_rate", sig17(self.recovery_rate));
        kv(
            "recovery_rate_note",
            "proxy: fraction of inferred segments with |residual| <= threshold, not full tracking efficiency".into(),
        );
        out
    }

    /// Writes `report.txt`, `histogram.csv` and `per_index.csv` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_atomic(&dir.join("report.txt"), self.to_text().as_bytes())?;
        write_atomic(&dir.join("histogram.csv"), self.histogram.to_csv().as_bytes())?;
        write_atomic(&dir.join("per_index.csv"), self.per_index_csv().as_bytes())?;
        Ok(())
    }
}

pub fn recovery_rate(residuals: &[Residual], threshold: f64) -> f64 {
    if residuals.is_empty() {
        return 0.0;
    }
    let hits = residuals.iter().filter(|r| r.residual.abs() <= threshold).count();
    hits as f64 / residuals.len() as f64
}

pub fn summarize(residuals: &[Residual], threshold: f64) -> Result<EvalReport> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "threshold must be >= 0, got {threshold}"
        )));
    }
    let all: Vec<f64> = residuals.iter().map(|r| r.residual).collect();
    let overall = Summary::of(&all)?;

    let per_index = std::array::from_fn(|index| {
        let vals: Vec<f64> = residuals
            .iter()
            .filter(|r| r.missing_index == index)
            .map(|r| r.residual)
            .collect();
        IndexStats {
            index,
            summary: Summary::of(&vals).ok(),
        }
    });

    let mut histogram = Histogram::new();
    for &r in &all {
        histogram.fill(r);
    }

    Ok(EvalReport {
        n: overall.n,
        mean: overall.mean,
        std: overall.std,
        per_index,
        histogram,
        threshold,
        recovery_rate: recovery_rate(residuals, threshold),
        mode: None,
        wires: None,
    })
}
