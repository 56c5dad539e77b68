//! Track samples: six mean wire positions, one per super-layer.
//!
//! Samples come either from a synthetic generator (smooth quadratic
//! trajectories with per-hit jitter) or from a CSV file of externally
//! reconstructed tracks.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::io::{read_to_string, sig17, write_atomic};
use crate::{Error, Result};

pub const SUPERLAYERS: usize = 6;
pub const DEFAULT_WIRES: u32 = 112;
/// Hits synthesized per segment, one per wire layer of a super-layer.
pub const HITS_PER_SEGMENT: usize = 6;
pub const MAX_REDRAWS: usize = 1000;
pub const CSV_HEADER: &str = "x1,x2,x3,x4,x5,x6";

/// Mean wire position of one segment per super-layer, in wire units.
///
/// Every element lies in `[1, W]`, so none can collide with the 0.0
/// missing-segment sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSample([f64; SUPERLAYERS]);

impl TrackSample {
    pub fn new(values: [f64; SUPERLAYERS], wires: u32) -> Result<Self> {
        for (k, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v >= 1.0 && v <= f64::from(wires)) {
                return Err(Error::OutOfRange(format!(
                    "super-layer {} value {v} outside [1, {wires}]",
                    k + 1
                )));
            }
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64; SUPERLAYERS] {
        &self.0
    }
}

impl std::ops::Index<usize> for TrackSample {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

/// Wire numbers of the hits forming one segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentHits {
    wires: Vec<u32>,
}

impl SegmentHits {
    pub fn new(wires: Vec<u32>, max_wire: u32) -> Result<Self> {
        if wires.is_empty() {
            return Err(Error::InvalidConfig("segment has no hits".into()));
        }
        if let Some(w) = wires.iter().find(|&&w| w == 0 || w > max_wire) {
            return Err(Error::OutOfRange(format!(
                "hit wire {w} outside [1, {max_wire}]"
            )));
        }
        Ok(Self { wires })
    }

    pub fn wires(&self) -> &[u32] {
        &self.wires
    }
}

/// Mean of the hit wire positions.
pub fn mean_wire(hits: &SegmentHits) -> f64 {
    let sum: f64 = hits.wires.iter().map(|&w| f64::from(w)).sum();
    sum / hits.wires.len() as f64
}

/// Trajectory `center(k) = intercept + slope * k + curvature * k^2` over
/// super-layers `k = 1..=6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackParams {
    pub intercept: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl TrackParams {
    pub fn center(&self, superlayer: usize) -> f64 {
        let k = superlayer as f64;
        self.intercept + self.slope * k + self.curvature * k * k
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub wires: u32,
    pub intercept: (f64, f64),
    pub slope: (f64, f64),
    pub curvature: (f64, f64),
    /// Standard deviation of the per-hit jitter, in wires.
    pub jitter_sigma: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            wires: DEFAULT_WIRES,
            intercept: (5.0, 100.0),
            slope: (-4.0, 4.0),
            curvature: (-0.4, 0.4),
            jitter_sigma: 0.5,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.wires < 2 {
            return Err(Error::InvalidConfig(format!(
                "wire count must be >= 2, got {}",
                self.wires
            )));
        }
        for (name, (lo, hi)) in [
            ("intercept", self.intercept),
            ("slope", self.slope),
            ("curvature", self.curvature),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidConfig(format!(
                    "{name} range [{lo}, {hi}] is degenerate"
                )));
            }
        }
        if !(self.jitter_sigma >= 0.0 && self.jitter_sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "jitter sigma must be >= 0, got {}",
                self.jitter_sigma
            )));
        }
        Ok(())
    }
}

/// Builds a sample from fixed trajectory parameters.
///
/// Fails if any super-layer center falls outside `[1, W]`.
pub fn track_from_params<R: Rng + ?Sized>(
    params: &TrackParams,
    cfg: &GenConfig,
    rng: &mut R,
) -> Result<TrackSample> {
    let max = f64::from(cfg.wires);
    let jitter = if cfg.jitter_sigma > 0.0 {
        Some(Normal::new(0.0, cfg.jitter_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?)
    } else {
        None
    };

    let mut values = [0.0; SUPERLAYERS];
    for (idx, value) in values.iter_mut().enumerate() {
        let center = params.center(idx + 1);
        if !(1.0..=max).contains(&center) {
            return Err(Error::OutOfRange(format!(
                "super-layer {} center {center} outside [1, {max}]",
                idx + 1
            )));
        }
        let base = center.round();
        let hits = (0..HITS_PER_SEGMENT)
            .map(|_| {
                let offset = jitter.map_or(0.0, |d| rng.sample(d).round());
                (base + offset).clamp(1.0, max) as u32
            })
            .collect();
        *value = mean_wire(&SegmentHits::new(hits, cfg.wires)?);
    }
    TrackSample::new(values, cfg.wires)
}

/// Draws trajectory parameters uniformly from the configured ranges,
/// redrawing whenever a segment center would leave the chamber.
pub fn gen_track<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<TrackSample> {
    cfg.validate()?;
    let max = f64::from(cfg.wires);
    for _ in 0..MAX_REDRAWS {
        let params = TrackParams {
            intercept: rng.random_range(cfg.intercept.0..=cfg.intercept.1),
            slope: rng.random_range(cfg.slope.0..=cfg.slope.1),
            curvature: rng.random_range(cfg.curvature.0..=cfg.curvature.1),
        };
        if (1..=SUPERLAYERS).all(|k| (1.0..=max).contains(&params.center(k))) {
            return track_from_params(&params, cfg, rng);
        }
    }
    Err(Error::GenerationExhausted {
        attempts: MAX_REDRAWS,
    })
}

/// `n` samples from a generator seeded with `cfg.seed`.
pub fn gen_dataset(n: usize, cfg: &GenConfig) -> Result<Vec<TrackSample>> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..n).map(|_| gen_track(cfg, &mut rng)).collect()
}

pub fn samples_to_csv(samples: &[TrackSample]) -> String {
    let mut out = String::with_capacity(samples.len() * 140 + 20);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in samples {
        let fields: Vec<String> = s.values().iter().map(|&v| sig17(v)).collect();
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn save_csv(samples: &[TrackSample], path: &Path) -> Result<()> {
    write_atomic(path, samples_to_csv(samples).as_bytes())
}

/// Parses CSV text; `path` is only used in error messages.
pub fn parse_csv(text: &str, wires: u32, path: &Path) -> Result<Vec<TrackSample>> {
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line_no == 1 && line.trim() == CSV_HEADER {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != SUPERLAYERS {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {SUPERLAYERS} fields, found {}", fields.len()),
            ));
        }
        let mut values = [0.0; SUPERLAYERS];
        for (v, field) in values.iter_mut().zip(&fields) {
            *v = field.trim().parse().map_err(|_| {
                Error::parse(path, line_no, format!("non-numeric field {:?}", field.trim()))
            })?;
        }
        if values.contains(&0.0) {
            return Err(Error::parse(
                path,
                line_no,
                "value 0.0 collides with the missing-segment sentinel",
            ));
        }
        let sample = TrackSample::new(values, wires)
            .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        samples.push(sample);
    }
    Ok(samples)
}

pub fn load_csv(path: &Path, wires: u32) -> Result<Vec<TrackSample>> {
    parse_csv(&read_to_string(path)?, wires, path)
}
