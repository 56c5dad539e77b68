//! Training pairs built from clean tracks by zeroing one super-layer.
//!
//! Two constructions are supported:
//!
//! - [`Scheme::RandomIndex`]: one pair per track, missing slot chosen uniformly.
//! - [`Scheme::AllIndices`]: six pairs per track, one for every missing slot.
//!
//! Targets are always the clean track. Network-facing values are divided by
//! the wire count so valid tracks land in `(0, 1]`; the sentinel stays `0.0`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::{sig17, write_atomic};
use crate::trackgen::{TrackSample, SUPERLAYERS};
use crate::{Error, Result};

/// Value written into the missing super-layer slot.
pub const SENTINEL: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptedPair {
    pub input: [f64; SUPERLAYERS],
    pub target: [f64; SUPERLAYERS],
    pub missing_index: usize,
}

impl CorruptedPair {
    /// Pair whose input equals `target` except for a sentinel at `missing_index`.
    pub fn new(target: [f64; SUPERLAYERS], missing_index: usize) -> Result<Self> {
        if missing_index >= SUPERLAYERS {
            return Err(Error::OutOfRange(format!(
                "missing index {missing_index} outside 0..{SUPERLAYERS}"
            )));
        }
        let mut input = target;
        input[missing_index] = SENTINEL;
        Ok(Self {
            input,
            target,
            missing_index,
        })
    }

    /// The same pair in network units.
    pub fn normalized(&self, spec: &NormSpec) -> Result<Self> {
        Ok(Self {
            input: spec.normalize(&self.input)?,
            target: spec.normalize(&self.target)?,
            missing_index: self.missing_index,
        })
    }
}

/// Zeroes a fixed super-layer of `sample`.
pub fn corrupt_at(sample: &TrackSample, missing_index: usize) -> Result<CorruptedPair> {
    CorruptedPair::new(*sample.values(), missing_index)
}

pub fn corrupt_random<R: Rng + ?Sized>(sample: &TrackSample, rng: &mut R) -> CorruptedPair {
    let idx = rng.random_range(0..SUPERLAYERS);
    corrupt_at(sample, idx).expect("index drawn in range")
}

/// Six pairs with missing indices 0..=5 in order, sharing one target.
pub fn corrupt_expand(sample: &TrackSample) -> Vec<CorruptedPair> {
    (0..SUPERLAYERS)
        .map(|idx| corrupt_at(sample, idx).expect("index in range"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// One pair per sample with a random missing slot ("A").
    RandomIndex,
    /// Six pairs per sample covering every missing slot ("B").
    AllIndices,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Scheme::RandomIndex),
            "B" | "b" => Ok(Scheme::AllIndices),
            other => Err(Error::Usage(format!("unknown scheme {other:?}, expected A or B"))),
        }
    }
}

/// Corrupts every sample with `scheme`, in sample order. The random slot of
/// [`Scheme::RandomIndex`] is fixed here, once, from `seed`.
pub fn build_pairs(samples: &[TrackSample], scheme: Scheme, seed: u64) -> Vec<CorruptedPair> {
    match scheme {
        Scheme::RandomIndex => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            samples.iter().map(|s| corrupt_random(s, &mut rng)).collect()
        }
        Scheme::AllIndices => samples.iter().flat_map(corrupt_expand).collect(),
    }
}

/// Maps wire units to network units by dividing by the wire count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormSpec {
    wires: u32,
}

impl NormSpec {
    pub fn new(wires: u32) -> Result<Self> {
        if wires < 2 {
            return Err(Error::InvalidConfig(format!(
                "wire count must be >= 2, got {wires}"
            )));
        }
        Ok(Self { wires })
    }

    pub fn wires(&self) -> u32 {
        self.wires
    }

    pub fn normalize(&self, v: &[f64; SUPERLAYERS]) -> Result<[f64; SUPERLAYERS]> {
        let max = f64::from(self.wires);
        let mut out = [0.0; SUPERLAYERS];
        for (o, &x) in out.iter_mut().zip(v) {
            if !(0.0..=max).contains(&x) {
                return Err(Error::OutOfRange(format!(
                    "wire value {x} outside [0, {max}]"
                )));
            }
            *o = x / max;
        }
        Ok(out)
    }

    pub fn denormalize_value(&self, x: f64) -> f64 {
        x * f64::from(self.wires)
    }

    pub fn denormalize(&self, v: &[f64; SUPERLAYERS]) -> [f64; SUPERLAYERS] {
        v.map(|x| self.denormalize_value(x))
    }
}

impl Default for NormSpec {
    fn default() -> Self {
        Self {
            wires: crate::trackgen::DEFAULT_WIRES,
        }
    }
}

/// Disjoint seeded subsets of `train_n` and `test_n` items, drawn after one
/// Fisher-Yates shuffle.
pub fn split<T: Clone>(
    samples: &[T],
    train_n: usize,
    test_n: usize,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>)> {
    let needed = train_n + test_n;
    if needed > samples.len() {
        return Err(Error::InsufficientSamples {
            needed,
            available: samples.len(),
        });
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pick = |idx: &[usize]| idx.iter().map(|&i| samples[i].clone()).collect::<Vec<_>>();
    Ok((pick(&order[..train_n]), pick(&order[train_n..needed])))
}

pub const PAIR_CSV_HEADER: &str = "x1,x2,x3,x4,x5,x6,y1,y2,y3,y4,y5,y6,missing_index";

/// 13-column inspection dump: six inputs, six targets, missing index.
pub fn pairs_to_csv(pairs: &[CorruptedPair]) -> String {
    let mut out = String::from(PAIR_CSV_HEADER);
    out.push('\n');
    for p in pairs {
        for v in p.input.iter().chain(&p.target) {
            out.push_str(&sig17(*v));
            out.push(',');
        }
        let _ = writeln!(out, "{}", p.missing_index);
    }
    out
}

pub fn save_pairs_csv(pairs: &[CorruptedPair], path: &Path) -> Result<()> {
    write_atomic(path, pairs_to_csv(pairs).as_bytes())
}
