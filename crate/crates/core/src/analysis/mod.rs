//! Phase sweeps, feature detection and verification against the closed-form
//! feature catalog.

mod features;
mod scan;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::EnsembleSpec;
use crate::error::{Error, Result};
use crate::grating::Phase;

pub use features::{
    predicted_features, verify_features, FeatureCatalog, FeatureKind, FeatureMatch,
    PredictedFeature, VerificationReport, PEAK_VALUE_TOLERANCE, POSITION_TOLERANCE,
};
pub use scan::{run_scan, Evaluator, Extremum, ScanResult, REFINE_TOLERANCE};

/// Default number of grid points over one period.
pub const DEFAULT_RESOLUTION: usize = 2001;

/// Which closed forms or simulation produce the numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Analytic,
    Oracle,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "oracle" => Ok(Engine::Oracle),
            other => Err(Error::InvalidRequest(format!("unknown engine {other:?}"))),
        }
    }
}

/// Placement of the second detector while the first one sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    /// `delta2 = delta1`
    Diagonal,
    /// `delta2 = -delta1`
    Counter,
    /// `delta2` held at the given phase.
    Fixed(f64),
    /// Independent sweep of both detectors.
    Grid,
}

impl ScanMode {
    /// Second detector phase for line modes; `None` for grid scans.
    pub fn second_detector(&self, delta1: f64) -> Option<f64> {
        match *self {
            ScanMode::Diagonal => Some(delta1),
            ScanMode::Counter => Some(-delta1),
            ScanMode::Fixed(delta2) => Some(delta2),
            ScanMode::Grid => None,
        }
    }
}

impl fmt::Display for ScanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanMode::Diagonal => f.write_str("diagonal"),
            ScanMode::Counter => f.write_str("counter"),
            ScanMode::Fixed(delta2) => write!(f, "fixed:{delta2}"),
            ScanMode::Grid => f.write_str("grid"),
        }
    }
}

impl FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonal" => Ok(ScanMode::Diagonal),
            "counter" => Ok(ScanMode::Counter),
            "grid" => Ok(ScanMode::Grid),
            other => {
                let value = other
                    .strip_prefix("fixed:")
                    .ok_or_else(|| Error::InvalidRequest(format!("unknown scan mode {other:?}")))?;
                let delta2: f64 = value
                    .parse()
                    .map_err(|_| Error::InvalidRequest(format!("bad fixed phase {value:?}")))?;
                if !delta2.is_finite() {
                    return Err(Error::InvalidRequest(format!("bad fixed phase {value:?}")));
                }
                Ok(ScanMode::Fixed(delta2))
            }
        }
    }
}

/// Closed interval of phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRange {
    pub start: f64,
    pub end: f64,
}

impl PhaseRange {
    pub const FULL_PERIOD: PhaseRange = PhaseRange {
        start: 0.0,
        end: std::f64::consts::TAU,
    };

    pub fn new(start: f64, end: f64) -> Result<Self> {
        let range = Self { start, end };
        range.validate()?;
        Ok(range)
    }

    fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite()) {
            return Err(Error::InvalidRequest(format!(
                "range bounds must be finite, got [{}, {}]",
                self.start, self.end
            )));
        }
        if self.start >= self.end {
            return Err(Error::InvalidRequest(format!(
                "empty range [{}, {}]",
                self.start, self.end
            )));
        }
        Ok(())
    }

    pub fn contains(&self, delta: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.start.abs().max(self.end.abs()));
        delta >= self.start - slack && delta <= self.end + slack
    }

    /// `points` uniformly spaced phases including both ends.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        let last = points - 1;
        let width = self.end - self.start;
        (0..points)
            .map(|i| {
                if i == last {
                    self.end
                } else {
                    self.start + width * (i as f64 / last as f64)
                }
            })
            .collect()
    }
}

impl Default for PhaseRange {
    fn default() -> Self {
        Self::FULL_PERIOD
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub ensemble: EnsembleSpec,
    pub mode: ScanMode,
    pub range: PhaseRange,
    /// Range of the second detector for grid scans; defaults to `range`.
    pub second_range: Option<PhaseRange>,
    pub resolution: usize,
    pub engine: Engine,
}

impl ScanSpec {
    pub fn new(ensemble: EnsembleSpec, mode: ScanMode) -> Self {
        Self {
            ensemble,
            mode,
            range: PhaseRange::FULL_PERIOD,
            second_range: None,
            resolution: DEFAULT_RESOLUTION,
            engine: Engine::Analytic,
        }
    }

    pub fn with_range(mut self, range: PhaseRange) -> Self {
        self.range = range;
        self
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidRequest(format!(
                "resolution must be at least 2, got {}",
                self.resolution
            )));
        }
        self.range.validate()?;
        if let Some(second) = &self.second_range {
            second.validate()?;
        }
        if let ScanMode::Fixed(delta2) = self.mode {
            if !delta2.is_finite() {
                return Err(Error::InvalidRequest("fixed phase must be finite".into()));
            }
        }
        let EnsembleSpec { atoms, excitations } = self.ensemble;
        if self.engine == Engine::Analytic && !(1..=2).contains(&excitations) {
            return Err(Error::UnsupportedEnsemble {
                atoms,
                excitations,
                reason: "analytic scans cover one or two excitations",
            });
        }
        Ok(())
    }

    /// Fewer than two excitations: only the intensity carries information.
    pub fn is_intensity_scan(&self) -> bool {
        self.ensemble.excitations < 2
    }
}

/// `(max - min) / (max + min)`.
pub fn visibility(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidRequest(
            "visibility of an empty signal".into(),
        ));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Numeric(format!(
                "visibility input {v} is not a nonnegative number"
            )));
        }
        min = min.min(v);
        max = max.max(v);
    }
    if max + min <= 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok((max - min) / (max + min))
}

/// Positions of a list of extrema.
pub fn phase_list(points: &[Extremum]) -> Vec<Phase> {
    points.iter().map(|p| p.position).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visibility_examples() {
        assert_eq!(visibility(&[0.0, 6.0]).unwrap(), 1.0);
        assert_eq!(visibility(&[3.0, 3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(
            visibility(&[0.0, 0.0]).unwrap_err(),
            Error::UndefinedVisibility
        );
        assert!(visibility(&[]).is_err());
        assert!(visibility(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("diagonal".parse::<ScanMode>().unwrap(), ScanMode::Diagonal);
        assert_eq!("counter".parse::<ScanMode>().unwrap(), ScanMode::Counter);
        assert_eq!("grid".parse::<ScanMode>().unwrap(), ScanMode::Grid);
        assert_eq!("fixed:0".parse::<ScanMode>().unwrap(), ScanMode::Fixed(0.0));
        assert_eq!(
            "fixed:-1.5".parse::<ScanMode>().unwrap(),
            ScanMode::Fixed(-1.5)
        );
        assert!("fixed:".parse::<ScanMode>().is_err());
        assert!("fixed:nan".parse::<ScanMode>().is_err());
        assert!("sideways".parse::<ScanMode>().is_err());
    }

    #[test]
    fn grid_includes_both_ends() {
        let g = PhaseRange::FULL_PERIOD.grid(2001);
        assert_eq!(g.len(), 2001);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[2000], std::f64::consts::TAU);
        assert_eq!(g[1000], std::f64::consts::PI);
    }

    #[test]
    fn spec_validation() {
        let e = EnsembleSpec::new(4, 2).unwrap();
        assert!(ScanSpec::new(e, ScanMode::Diagonal).validate().is_ok());
        assert!(ScanSpec::new(e, ScanMode::Diagonal)
            .with_resolution(1)
            .validate()
            .is_err());
        let bad_range = ScanSpec {
            range: PhaseRange {
                start: 1.0,
                end: 1.0,
            },
            ..ScanSpec::new(e, ScanMode::Diagonal)
        };
        assert!(bad_range.validate().is_err());
        let e3 = EnsembleSpec::new(5, 3).unwrap();
        assert!(matches!(
            ScanSpec::new(e3, ScanMode::Diagonal).validate(),
            Err(Error::UnsupportedEnsemble { .. })
        ));
        assert!(ScanSpec::new(e3, ScanMode::Diagonal)
            .with_engine(Engine::Oracle)
            .validate()
            .is_ok());
    }
}
