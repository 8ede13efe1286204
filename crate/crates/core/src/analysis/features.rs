use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{PhaseRange, ScanMode, ScanResult, DEFAULT_RESOLUTION};
use crate::analytic::{
    classify, peak_at_pi, special_value, EnsembleSpec, PhotonStatClass, SpecialValue,
};
use crate::error::{Error, Result};
use crate::grating::{chi_squared, Phase};

/// Predicted and detected feature positions must agree to this many radians.
pub const POSITION_TOLERANCE: f64 = 1e-6;

/// Relative agreement required between predicted and detected values.
pub const PEAK_VALUE_TOLERANCE: f64 = 1e-9;

// Bisection width for the chi^2 = 1/N roots.
const ROOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    /// g2 vanishes.
    Zero,
    /// Local maximum with g2 > 2.
    SuperbunchingPeak,
    /// Closed-form value at a point, compared with the sample taken there.
    Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedFeature {
    pub position: Phase,
    pub value: f64,
    pub kind: FeatureKind,
    pub class: PhotonStatClass,
}

impl PredictedFeature {
    fn new(position: f64, value: f64, kind: FeatureKind) -> Result<Self> {
        Ok(Self {
            position: Phase(position),
            value,
            kind,
            class: classify(value)?,
        })
    }
}

/// Closed-form features of `|W_{2,N}>` for one detector configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCatalog {
    pub ensemble: EnsembleSpec,
    pub mode: ScanMode,
    pub range: PhaseRange,
    pub features: Vec<PredictedFeature>,
    pub notes: Vec<String>,
}

/// Phases `2π a / q` inside `range` for which `2a/q` is not an integer,
/// i.e. excluding multiples of π.
fn grating_family(q: usize, range: &PhaseRange) -> Vec<f64> {
    let lo = (range.start * q as f64 / TAU).floor() as i64 - 1;
    let hi = (range.end * q as f64 / TAU).ceil() as i64 + 1;
    let q = q as i64;
    (lo..=hi)
        .filter(|a| (2 * a).rem_euclid(q) != 0)
        .map(|a| TAU * a as f64 / q as f64)
        .filter(|&x| range.contains(x))
        .collect()
}

/// Phases `m π` inside `range`, split by parity of `m`.
fn multiples_of_pi(range: &PhaseRange, odd: bool) -> Vec<f64> {
    let lo = (range.start / PI).floor() as i64 - 1;
    let hi = (range.end / PI).ceil() as i64 + 1;
    (lo..=hi)
        .filter(|m| (m.rem_euclid(2) == 1) == odd)
        .map(|m| m as f64 * PI)
        .filter(|&x| range.contains(x))
        .collect()
}

/// Roots of `chi^2(delta) - 1/N` bracketed on a uniform grid and bisected.
fn counter_zeros(atoms: usize, range: &PhaseRange) -> Vec<f64> {
    let target = 1.0 / atoms as f64;
    let f = |x: f64| chi_squared(x, atoms) - target;
    let per_period = ((range.end - range.start) / TAU * (DEFAULT_RESOLUTION - 1) as f64).ceil();
    let points = (per_period as usize + 1).max(DEFAULT_RESOLUTION);
    let grid = range.grid(points);
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() || fhi == 0.0 {
            continue;
        }
        while hi - lo > ROOT_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    if let Some(&last) = grid.last() {
        if f(last) == 0.0 {
            roots.push(last);
        }
    }
    roots
}

fn peak_kind(value: f64) -> FeatureKind {
    if value > 2.0 {
        FeatureKind::SuperbunchingPeak
    } else {
        FeatureKind::Value
    }
}

/// Closed-form zeros, peaks and point values expected inside `range`.
///
/// Supported configurations are the diagonal, counter-propagating and
/// `fixed:0` modes of the doubly excited state.
pub fn predicted_features(
    ensemble: EnsembleSpec,
    mode: ScanMode,
    range: PhaseRange,
) -> Result<FeatureCatalog> {
    let EnsembleSpec { atoms, excitations } = ensemble;
    if excitations != 2 || atoms < 2 {
        return Err(Error::UnsupportedEnsemble {
            atoms,
            excitations,
            reason: "the feature catalog covers two excitations",
        });
    }
    range.validate()?;
    let forward = special_value(SpecialValue::ZeroZero, atoms)?;
    let mut features = Vec::new();
    let mut notes = Vec::new();
    let push_forward = |features: &mut Vec<PredictedFeature>| -> Result<()> {
        for x in multiples_of_pi(&range, false) {
            features.push(PredictedFeature::new(x, forward, FeatureKind::Value)?);
        }
        Ok(())
    };

    match mode {
        ScanMode::Diagonal => {
            // N chi^2(d) - chi(2d) = chi(d) sin((N-1)d/2) / (sin(d)/2):
            // zeros at 2πa/N and 2πb/(N-1) away from multiples of π.
            for x in grating_family(atoms, &range) {
                features.push(PredictedFeature::new(x, 0.0, FeatureKind::Zero)?);
            }
            if atoms >= 3 {
                for x in grating_family(atoms - 1, &range) {
                    features.push(PredictedFeature::new(x, 0.0, FeatureKind::Zero)?);
                }
            }
            let peak = peak_at_pi(atoms)?;
            for x in multiples_of_pi(&range, true) {
                features.push(PredictedFeature::new(x, peak, peak_kind(peak))?);
            }
            push_forward(&mut features)?;
            if atoms % 2 == 1 {
                notes.push(format!(
                    "odd N = {atoms}: g2(π, π) = N(N-1)/8 = {peak}; superbunching at π needs odd N >= 5, \
                     while the figure caption quotes N >= 4 without the parity split"
                ));
            }
        }
        ScanMode::Counter => {
            let peak = special_value(SpecialValue::CounterPeak, atoms)?;
            let a_range = (range.start * atoms as f64 / TAU).floor() as i64 - 1
                ..=(range.end * atoms as f64 / TAU).ceil() as i64 + 1;
            for a in a_range.filter(|a| a.rem_euclid(atoms as i64) != 0) {
                let x = TAU * a as f64 / atoms as f64;
                if range.contains(x) {
                    features.push(PredictedFeature::new(x, peak, peak_kind(peak))?);
                }
            }
            for x in counter_zeros(atoms, &range) {
                features.push(PredictedFeature::new(x, 0.0, FeatureKind::Zero)?);
            }
            push_forward(&mut features)?;
        }
        ScanMode::Fixed(0.0) => {
            let a_range = (range.start * atoms as f64 / TAU).floor() as i64 - 1
                ..=(range.end * atoms as f64 / TAU).ceil() as i64 + 1;
            for a in a_range.filter(|a| a.rem_euclid(atoms as i64) != 0) {
                let x = TAU * a as f64 / atoms as f64;
                if range.contains(x) {
                    features.push(PredictedFeature::new(x, 0.0, FeatureKind::Zero)?);
                }
            }
            push_forward(&mut features)?;
        }
        ScanMode::Fixed(_) | ScanMode::Grid => {
            return Err(Error::InvalidRequest(format!(
                "no closed-form feature catalog for mode {mode}"
            )));
        }
    }
    features.sort_by(|a, b| a.position.0.total_cmp(&b.position.0));
    Ok(FeatureCatalog {
        ensemble,
        mode,
        range,
        features,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatch {
    pub predicted: PredictedFeature,
    /// Detected position and value.
    pub observed: Phase,
    pub observed_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ensemble: EnsembleSpec,
    pub mode: ScanMode,
    pub matches: Vec<FeatureMatch>,
    pub misses: Vec<PredictedFeature>,
    /// Point values whose position is not on the scan grid.
    pub unsampled: Vec<PredictedFeature>,
    /// Detected zeros and peaks that no prediction accounts for.
    pub extras: Vec<(FeatureKind, Phase, f64)>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.misses.is_empty()
    }
}

fn value_agrees(expected: f64, observed: f64) -> bool {
    (observed - expected).abs() <= PEAK_VALUE_TOLERANCE * expected.abs().max(1.0)
}

/// Match every predicted feature against the detected ones.
pub fn verify_features(scan: &ScanResult, catalog: &FeatureCatalog) -> Result<VerificationReport> {
    if scan.spec.ensemble != catalog.ensemble || scan.spec.mode != catalog.mode {
        return Err(Error::InvalidRequest(format!(
            "scan ({} {}) and catalog ({} {}) describe different configurations",
            scan.spec.ensemble, scan.spec.mode, catalog.ensemble, catalog.mode
        )));
    }
    let mut matches = Vec::new();
    let mut misses = Vec::new();
    let mut unsampled = Vec::new();
    let mut used_zeros = vec![false; scan.zeros.len()];
    let mut used_peaks = vec![false; scan.superbunching_peaks.len()];

    for predicted in &catalog.features {
        let x = predicted.position.0;
        match predicted.kind {
            FeatureKind::Zero | FeatureKind::SuperbunchingPeak => {
                let (found, used) = if predicted.kind == FeatureKind::Zero {
                    (&scan.zeros, &mut used_zeros)
                } else {
                    (&scan.superbunching_peaks, &mut used_peaks)
                };
                let hit = found.iter().enumerate().find(|(_, e)| {
                    (e.position.0 - x).abs() <= POSITION_TOLERANCE
                        && (predicted.kind == FeatureKind::Zero
                            || value_agrees(predicted.value, e.value))
                });
                match hit {
                    Some((i, e)) => {
                        used[i] = true;
                        matches.push(FeatureMatch {
                            predicted: *predicted,
                            observed: e.position,
                            observed_value: e.value,
                        });
                    }
                    None => misses.push(*predicted),
                }
            }
            FeatureKind::Value => {
                let sample = scan
                    .samples
                    .iter()
                    .find(|s| (s.delta1.0 - x).abs() <= 1e-9 * (1.0 + x.abs()));
                match sample.and_then(|s| s.g2_normalized.map(|g| (s.delta1, g))) {
                    Some((at, g)) if value_agrees(predicted.value, g) => {
                        matches.push(FeatureMatch {
                            predicted: *predicted,
                            observed: at,
                            observed_value: g,
                        })
                    }
                    Some(_) => misses.push(*predicted),
                    None => unsampled.push(*predicted),
                }
            }
        }
    }

    let extras = scan
        .zeros
        .iter()
        .zip(&used_zeros)
        .map(|(e, u)| (FeatureKind::Zero, e, u))
        .chain(
            scan.superbunching_peaks
                .iter()
                .zip(&used_peaks)
                .map(|(e, u)| (FeatureKind::SuperbunchingPeak, e, u)),
        )
        .filter(|(_, _, used)| !**used)
        .map(|(kind, e, _)| (kind, e.position, e.value))
        .collect();

    Ok(VerificationReport {
        ensemble: catalog.ensemble,
        mode: catalog.mode,
        matches,
        misses,
        unsampled,
        extras,
        notes: catalog.notes.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{run_scan, Engine, ScanSpec};

    fn pair(n: usize) -> EnsembleSpec {
        EnsembleSpec::doubly_excited(n).unwrap()
    }

    fn half_period() -> PhaseRange {
        PhaseRange::new(1e-3, PI).unwrap()
    }

    #[test]
    fn four_atom_diagonal_catalog() {
        let c = predicted_features(pair(4), ScanMode::Diagonal, half_period()).unwrap();
        let kinds: Vec<(f64, f64, FeatureKind)> = c
            .features
            .iter()
            .map(|f| (f.position.0, f.value, f.kind))
            .collect();
        // π/2 from the 2πa/N family, 2π/3 from 2πb/(N-1), then the peak at π
        assert_eq!(kinds.len(), 3);
        assert!((kinds[0].0 - PI / 2.0).abs() < 1e-15 && kinds[0].2 == FeatureKind::Zero);
        assert!((kinds[1].0 - TAU / 3.0).abs() < 1e-15 && kinds[1].2 == FeatureKind::Zero);
        assert_eq!(
            (kinds[2].0, kinds[2].1, kinds[2].2),
            (PI, 6.0, FeatureKind::SuperbunchingPeak)
        );
    }

    #[test]
    fn three_atom_counter_catalog() {
        let c = predicted_features(pair(3), ScanMode::Counter, half_period()).unwrap();
        let peaks: Vec<_> = c
            .features
            .iter()
            .filter(|f| f.kind == FeatureKind::SuperbunchingPeak)
            .collect();
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].position.0 - TAU / 3.0).abs() < 1e-15);
        assert_eq!(peaks[0].value, 3.0);
    }

    #[test]
    fn three_atom_pi_value_is_nonclassical() {
        let c = predicted_features(pair(3), ScanMode::Diagonal, PhaseRange::FULL_PERIOD).unwrap();
        let at_pi = c.features.iter().find(|f| f.position.0 == PI).unwrap();
        assert_eq!(at_pi.value, 0.75);
        assert_eq!(at_pi.kind, FeatureKind::Value);
        assert_eq!(at_pi.class, PhotonStatClass::Nonclassical);
        assert_eq!(c.notes.len(), 1);
    }

    #[test]
    fn counter_zeros_satisfy_condition() {
        for n in 2..=12 {
            let c =
                predicted_features(pair(n), ScanMode::Counter, PhaseRange::FULL_PERIOD).unwrap();
            let zeros: Vec<_> = c
                .features
                .iter()
                .filter(|f| f.kind == FeatureKind::Zero)
                .collect();
            assert!(!zeros.is_empty());
            for z in zeros {
                let g = crate::analytic::g2_counter(pair(n), z.position.0).unwrap();
                assert!(g <= 1e-12, "N={n} at {}: {g}", z.position.0);
            }
        }
    }

    #[test]
    fn six_atom_diagonal_verifies_without_extras() {
        let scan = run_scan(&ScanSpec::new(pair(6), ScanMode::Diagonal)).unwrap();
        let c = predicted_features(pair(6), ScanMode::Diagonal, PhaseRange::FULL_PERIOD).unwrap();
        let report = verify_features(&scan, &c).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.extras.is_empty(), "{:?}", report.extras);
        assert!(report.unsampled.is_empty());
        let zeros_2pi_over_n = report
            .matches
            .iter()
            .filter(|m| m.predicted.kind == FeatureKind::Zero)
            .filter(|m| {
                let a = m.predicted.position.0 * 6.0 / TAU;
                (a - a.round()).abs() < 1e-12
            })
            .count();
        assert_eq!(zeros_2pi_over_n, 4);
    }

    #[test]
    fn two_atom_diagonal_has_no_superbunching() {
        let scan = run_scan(&ScanSpec::new(pair(2), ScanMode::Diagonal)).unwrap();
        let c = predicted_features(pair(2), ScanMode::Diagonal, PhaseRange::FULL_PERIOD).unwrap();
        assert!(c
            .features
            .iter()
            .all(|f| f.kind != FeatureKind::SuperbunchingPeak));
        assert!(scan.superbunching_peaks.is_empty());
        assert!(verify_features(&scan, &c).unwrap().passed());
    }

    #[test]
    fn five_atom_counter_peaks() {
        let range = half_period();
        let c = predicted_features(pair(5), ScanMode::Counter, range).unwrap();
        let peaks: Vec<f64> = c
            .features
            .iter()
            .filter(|f| f.kind == FeatureKind::SuperbunchingPeak)
            .map(|f| f.position.0)
            .collect();
        assert_eq!(peaks.len(), 2);
        assert!(c
            .features
            .iter()
            .filter(|f| f.kind == FeatureKind::SuperbunchingPeak)
            .all(|f| f.value == 10.0));
        let scan = run_scan(&ScanSpec::new(pair(5), ScanMode::Counter).with_range(range)).unwrap();
        assert!(verify_features(&scan, &c).unwrap().passed());
    }

    #[test]
    fn mismatched_catalog_is_rejected() {
        let scan =
            run_scan(&ScanSpec::new(pair(4), ScanMode::Diagonal).with_resolution(51)).unwrap();
        let c = predicted_features(pair(5), ScanMode::Diagonal, PhaseRange::FULL_PERIOD).unwrap();
        assert!(matches!(
            verify_features(&scan, &c),
            Err(Error::InvalidRequest(_))
        ));
        let c = predicted_features(pair(4), ScanMode::Counter, PhaseRange::FULL_PERIOD).unwrap();
        assert!(verify_features(&scan, &c).is_err());
    }

    #[test]
    fn unsupported_catalogs() {
        assert!(predicted_features(
            EnsembleSpec::new(5, 3).unwrap(),
            ScanMode::Diagonal,
            PhaseRange::FULL_PERIOD
        )
        .is_err());
        assert!(predicted_features(pair(4), ScanMode::Grid, PhaseRange::FULL_PERIOD).is_err());
        assert!(
            predicted_features(pair(4), ScanMode::Fixed(0.3), PhaseRange::FULL_PERIOD).is_err()
        );
    }

    #[test]
    fn fixed_zero_catalog_verifies_with_oracle() {
        let spec = ScanSpec::new(pair(5), ScanMode::Fixed(0.0)).with_engine(Engine::Oracle);
        let scan = run_scan(&spec).unwrap();
        let c = predicted_features(pair(5), ScanMode::Fixed(0.0), PhaseRange::FULL_PERIOD).unwrap();
        let report = verify_features(&scan, &c).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.extras.is_empty());
    }
}
