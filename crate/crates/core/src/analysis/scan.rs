use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{visibility, Engine, ScanMode, ScanSpec};
use crate::analytic::{CorrelationSample, EnsembleSpec, ANTIBUNCHING_TOLERANCE};
use crate::error::{Error, Result};
use crate::grating::Phase;
use crate::oracle::WStateOracle;

/// Width of the final bracket around a refined extremum.
pub const REFINE_TOLERANCE: f64 = 1e-11;

/// Detected g2 above this value is a superbunching peak.
const SUPERBUNCHING_THRESHOLD: f64 = 2.0;

// Step of the three-point stencil used for the derivative sign.
const STENCIL_STEP: f64 = 1e-7;

// Refined extrema closer than this are the same feature.
const MERGE_DISTANCE: f64 = 1e-9;

/// Point evaluator backed by either engine.
#[derive(Debug, Clone)]
pub enum Evaluator {
    Analytic(EnsembleSpec),
    Oracle(Box<WStateOracle>),
}

impl Evaluator {
    pub fn new(ensemble: EnsembleSpec, engine: Engine) -> Result<Self> {
        match engine {
            Engine::Analytic => Ok(Evaluator::Analytic(ensemble)),
            Engine::Oracle => Ok(Evaluator::Oracle(Box::new(WStateOracle::new(ensemble)?))),
        }
    }

    pub fn sample(&self, delta1: f64, delta2: f64) -> Result<CorrelationSample> {
        match self {
            Evaluator::Analytic(spec) => CorrelationSample::analytic(*spec, delta1, delta2),
            Evaluator::Oracle(oracle) => oracle.sample(delta1, delta2),
        }
    }
}

/// A refined local extremum of the scanned signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub position: Phase,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub spec: ScanSpec,
    /// Row-major (`delta1` outer) for grid scans.
    pub samples: Vec<CorrelationSample>,
    /// Positions where g2 (or G1 for intensity scans) vanishes.
    pub zeros: Vec<Extremum>,
    pub superbunching_peaks: Vec<Extremum>,
    /// `None` when the scanned signal is identically zero.
    pub visibility: Option<f64>,
}

/// Quantity whose extrema a line scan reports.
struct Signal<'a> {
    evaluator: &'a Evaluator,
    mode: ScanMode,
    intensity: bool,
}

impl Signal<'_> {
    fn at(&self, delta1: f64) -> Result<f64> {
        let delta2 = self.mode.second_detector(delta1).unwrap_or(delta1);
        let sample = self.evaluator.sample(delta1, delta2)?;
        Ok(Self::of(&sample, self.intensity))
    }

    fn of(sample: &CorrelationSample, intensity: bool) -> f64 {
        if intensity {
            sample.g1_at_1
        } else {
            // n_e >= 2 keeps both intensities positive, so g2 is defined.
            sample.g2_normalized.unwrap_or(f64::NAN)
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Target {
    Minimum,
    Maximum,
}

/// Bisection on the sign of the derivative of the parabola through
/// `x - h, x, x + h`, restricted to `[lo, hi]`.
fn refine(
    signal: &Signal<'_>,
    target: Target,
    mut lo: f64,
    mut hi: f64,
    seed: Extremum,
) -> Result<Extremum> {
    let orient = if target == Target::Minimum { 1.0 } else { -1.0 };
    while hi - lo > REFINE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let slope = orient * (signal.at(mid + STENCIL_STEP)? - signal.at(mid - STENCIL_STEP)?);
        if slope > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let position = 0.5 * (lo + hi);
    let value = signal.at(position)?;
    let better = match target {
        Target::Minimum => value <= seed.value,
        Target::Maximum => value >= seed.value,
    };
    Ok(if better {
        Extremum {
            position: Phase(position),
            value,
        }
    } else {
        seed
    })
}

fn local_extrema(values: &[f64], target: Target) -> Vec<usize> {
    let n = values.len();
    let beats = |a: f64, b: f64| match target {
        Target::Minimum => a < b,
        Target::Maximum => a > b,
    };
    let mut out = Vec::new();
    if n >= 2 && beats(values[0], values[1]) {
        out.push(0);
    }
    for i in 1..n.saturating_sub(1) {
        // non-strict on the left so a flat pair yields one candidate
        if !beats(values[i - 1], values[i]) && beats(values[i], values[i + 1]) {
            out.push(i);
        }
    }
    if n >= 2 && beats(values[n - 1], values[n - 2]) {
        out.push(n - 1);
    }
    out
}

fn refined_extrema(
    signal: &Signal<'_>,
    grid: &[f64],
    values: &[f64],
    target: Target,
) -> Result<Vec<Extremum>> {
    let last = grid.len() - 1;
    let candidates = local_extrema(values, target);
    let mut refined = candidates
        .par_iter()
        .map(|&i| {
            let lo = grid[i.saturating_sub(1)];
            let hi = grid[(i + 1).min(last)];
            let seed = Extremum {
                position: Phase(grid[i]),
                value: values[i],
            };
            refine(signal, target, lo, hi, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    refined.dedup_by(|b, a| (b.position.0 - a.position.0).abs() < MERGE_DISTANCE);
    Ok(refined)
}

/// Evaluate a scan, then locate and refine its zeros and superbunching peaks.
pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult> {
    spec.validate()?;
    let evaluator = Evaluator::new(spec.ensemble, spec.engine)?;
    let intensity = spec.is_intensity_scan();
    let grid = spec.range.grid(spec.resolution);

    if spec.mode == ScanMode::Grid {
        let second = spec
            .second_range
            .unwrap_or(spec.range)
            .grid(spec.resolution);
        let samples = grid
            .par_iter()
            .flat_map_iter(|&d1| second.iter().map(move |&d2| (d1, d2)))
            .map(|(d1, d2)| evaluator.sample(d1, d2))
            .collect::<Result<Vec<_>>>()?;
        let values: Vec<f64> = samples.iter().map(|s| Signal::of(s, intensity)).collect();
        return Ok(ScanResult {
            spec: *spec,
            samples,
            zeros: Vec::new(),
            superbunching_peaks: Vec::new(),
            visibility: visibility_or_none(&values)?,
        });
    }

    let samples = grid
        .par_iter()
        .map(|&d1| {
            let d2 = spec.mode.second_detector(d1).unwrap_or(d1);
            evaluator.sample(d1, d2)
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = samples.iter().map(|s| Signal::of(s, intensity)).collect();
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Numeric(
            "g2 undefined inside a correlation scan".into(),
        ));
    }

    let signal = Signal {
        evaluator: &evaluator,
        mode: spec.mode,
        intensity,
    };
    let zero_floor = if intensity {
        1e-12
    } else {
        ANTIBUNCHING_TOLERANCE
    };
    let zeros: Vec<Extremum> = refined_extrema(&signal, &grid, &values, Target::Minimum)?
        .into_iter()
        .filter(|e| e.value <= zero_floor)
        .collect();
    let superbunching_peaks: Vec<Extremum> = if intensity {
        Vec::new()
    } else {
        refined_extrema(&signal, &grid, &values, Target::Maximum)?
            .into_iter()
            .filter(|e| e.value > SUPERBUNCHING_THRESHOLD)
            .collect()
    };

    let mut all_values = values;
    all_values.extend(zeros.iter().chain(&superbunching_peaks).map(|e| e.value));
    Ok(ScanResult {
        spec: *spec,
        samples,
        zeros,
        superbunching_peaks,
        visibility: visibility_or_none(&all_values)?,
    })
}

fn visibility_or_none(values: &[f64]) -> Result<Option<f64>> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    match visibility(&finite) {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedVisibility) => Ok(None),
        Err(Error::InvalidRequest(_)) if finite.is_empty() => Ok(None),
        Err(e) => Err(e),
    }
}
