//! Closed-form correlation functions of generalized W states.
//!
//! `g1` is valid for any excitation number; the second-order evaluators are
//! closed forms for the doubly excited state `|W_{2,N}>` only. Requests for
//! other excitation numbers are rejected; callers who want those numbers
//! must ask the [`oracle`](crate::oracle) explicitly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grating::{chi, Phase};

/// Normalized g2 at or below this value is reported as complete antibunching.
pub const ANTIBUNCHING_TOLERANCE: f64 = 1e-9;

/// Rounding noise below zero that is silently clamped.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// Atom count `N` and excitation count `n_e` of a generalized W state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub atoms: usize,
    pub excitations: usize,
}

impl EnsembleSpec {
    pub fn new(atoms: usize, excitations: usize) -> Result<Self> {
        if atoms == 0 {
            return Err(Error::InvalidEnsemble(
                "at least one atom is required".into(),
            ));
        }
        if excitations > atoms {
            return Err(Error::InvalidEnsemble(format!(
                "{excitations} excitations exceed {atoms} atoms"
            )));
        }
        Ok(Self { atoms, excitations })
    }

    pub fn doubly_excited(atoms: usize) -> Result<Self> {
        Self::new(atoms, 2)
    }

    fn unsupported(&self, reason: &'static str) -> Error {
        Error::UnsupportedEnsemble {
            atoms: self.atoms,
            excitations: self.excitations,
            reason,
        }
    }

    fn require_pair(&self) -> Result<()> {
        if self.excitations != 2 {
            return Err(self.unsupported("closed-form g2 exists only for two excitations"));
        }
        if self.atoms < 2 {
            return Err(self.unsupported("two excitations need at least two atoms"));
        }
        Ok(())
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W(N={}, n_e={})", self.atoms, self.excitations)
    }
}

/// Photon statistics of a normalized g2 value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhotonStatClass {
    Antibunched,
    Nonclassical,
    Classical,
    Superbunched,
}

impl PhotonStatClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhotonStatClass::Antibunched => "Antibunched",
            PhotonStatClass::Nonclassical => "Nonclassical",
            PhotonStatClass::Classical => "Classical",
            PhotonStatClass::Superbunched => "Superbunched",
        }
    }
}

impl fmt::Display for PhotonStatClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhotonStatClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Antibunched" => Ok(PhotonStatClass::Antibunched),
            "Nonclassical" => Ok(PhotonStatClass::Nonclassical),
            "Classical" => Ok(PhotonStatClass::Classical),
            "Superbunched" => Ok(PhotonStatClass::Superbunched),
            other => Err(Error::InvalidRequest(format!("unknown class {other:?}"))),
        }
    }
}

/// Classify a normalized g2 value.
pub fn classify(g2: f64) -> Result<PhotonStatClass> {
    if g2.is_nan() || g2 < -NEGATIVE_TOLERANCE {
        return Err(Error::Numeric(format!("g2 must be nonnegative, got {g2}")));
    }
    Ok(if g2 <= ANTIBUNCHING_TOLERANCE {
        PhotonStatClass::Antibunched
    } else if g2 < 1.0 {
        PhotonStatClass::Nonclassical
    } else if g2 <= 2.0 {
        PhotonStatClass::Classical
    } else {
        PhotonStatClass::Superbunched
    })
}

/// Clamp rounding noise below zero; real negatives are an error.
pub(crate) fn clamp_nonnegative(value: f64) -> Result<f64> {
    if value.is_nan() || value < -NEGATIVE_TOLERANCE {
        return Err(Error::Numeric(format!(
            "analytically nonnegative quantity evaluated to {value}"
        )));
    }
    Ok(value.max(0.0))
}

/// First-order correlation (mean intensity) of `|W_{n_e,N}>`:
///
/// `G1 = n_e(n_e-1)/(N-1) + N n_e (N-n_e)/(N-1) chi^2(delta)`.
pub fn g1(spec: EnsembleSpec, delta: f64) -> Result<f64> {
    if spec.atoms < 2 {
        return Err(spec.unsupported("intensity formula is singular for a single atom"));
    }
    let n = spec.atoms as f64;
    let ne = spec.excitations as f64;
    let c = chi(delta, spec.atoms);
    let incoherent = ne * (ne - 1.0) / (n - 1.0);
    let coherent = n * ne * (n - ne) / (n - 1.0);
    clamp_nonnegative(incoherent + coherent * c * c)
}

#[inline]
fn pair_denominator(n: f64, c: f64) -> f64 {
    1.0 + n * (n - 2.0) * c * c
}

/// Normalized g2 of `|W_{2,N}>` for detectors at phases `delta1`, `delta2`.
pub fn g2_pair(spec: EnsembleSpec, delta1: f64, delta2: f64) -> Result<f64> {
    spec.require_pair()?;
    let atoms = spec.atoms;
    let n = atoms as f64;
    let c1 = chi(delta1, atoms);
    let c2 = chi(delta2, atoms);
    let c12 = chi(delta1 + delta2, atoms);
    let amplitude = n * c1 * c2 - c12;
    let value = 0.5 * n * (n - 1.0) * amplitude * amplitude
        / (pair_denominator(n, c1) * pair_denominator(n, c2));
    clamp_nonnegative(value)
}

/// Both detectors at the same phase.
pub fn g2_same(spec: EnsembleSpec, delta: f64) -> Result<f64> {
    spec.require_pair()?;
    let atoms = spec.atoms;
    let n = atoms as f64;
    let c = chi(delta, atoms);
    let c2 = chi(2.0 * delta, atoms);
    let amplitude = n * c * c - c2;
    let denom = pair_denominator(n, c);
    clamp_nonnegative(n * (n - 1.0) * amplitude * amplitude / (2.0 * denom * denom))
}

/// Counter-propagating detectors, `delta2 = -delta1`.
pub fn g2_counter(spec: EnsembleSpec, delta: f64) -> Result<f64> {
    spec.require_pair()?;
    let atoms = spec.atoms;
    let n = atoms as f64;
    let c = chi(delta, atoms);
    let amplitude = n * c * c - 1.0;
    let denom = pair_denominator(n, c);
    clamp_nonnegative(n * (n - 1.0) * amplitude * amplitude / (2.0 * denom * denom))
}

/// Second detector fixed at `delta2 = 0`.
pub fn g2_fixed_zero(spec: EnsembleSpec, delta: f64) -> Result<f64> {
    spec.require_pair()?;
    let atoms = spec.atoms;
    let n = atoms as f64;
    let c = chi(delta, atoms);
    let cc = c * c;
    clamp_nonnegative(n * (n - 1.0) * cc / (2.0 + 2.0 * n * (n - 2.0) * cc))
}

/// Unnormalized G2 of `|W_{n_e,N}>` from the closed forms.
///
/// One excitation cannot produce a photon pair, so `n_e <= 1` gives zero.
pub fn g2_unnormalized(spec: EnsembleSpec, delta1: f64, delta2: f64) -> Result<f64> {
    match spec.excitations {
        0 | 1 => {
            // still reject N = 1 consistently with g1
            g1(spec, delta1)?;
            Ok(0.0)
        }
        2 => Ok(g2_pair(spec, delta1, delta2)? * g1(spec, delta1)? * g1(spec, delta2)?),
        _ => Err(spec.unsupported("closed-form g2 exists only for two excitations")),
    }
}

/// Named closed-form values of `g2` for `|W_{2,N}>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialValue {
    /// `g2(π, π) = N(N-1)/2`, even N.
    PeakPiEven,
    /// `g2(π, π) = N(N-1)/8`, odd N.
    PeakPiOdd,
    /// `g2(0, 0) = N / (2(N-1))`.
    ZeroZero,
    /// `g2(2πa/N, -2πa/N) = N(N-1)/2`.
    CounterPeak,
}

impl SpecialValue {
    pub const ALL: [SpecialValue; 4] = [
        SpecialValue::PeakPiEven,
        SpecialValue::PeakPiOdd,
        SpecialValue::ZeroZero,
        SpecialValue::CounterPeak,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SpecialValue::PeakPiEven => "peak_pi_even",
            SpecialValue::PeakPiOdd => "peak_pi_odd",
            SpecialValue::ZeroZero => "zero_zero",
            SpecialValue::CounterPeak => "counter_peak",
        }
    }
}

impl FromStr for SpecialValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpecialValue::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidRequest(format!("unknown special value {s:?}")))
    }
}

pub fn special_value(name: SpecialValue, atoms: usize) -> Result<f64> {
    if atoms < 2 {
        return Err(Error::InvalidRequest(format!(
            "{} needs at least two atoms, got {atoms}",
            name.name()
        )));
    }
    let n = atoms as f64;
    let even = atoms.is_multiple_of(2);
    match name {
        SpecialValue::PeakPiEven if !even => Err(Error::InvalidRequest(format!(
            "peak_pi_even requires even N, got {atoms}"
        ))),
        SpecialValue::PeakPiOdd if even => Err(Error::InvalidRequest(format!(
            "peak_pi_odd requires odd N, got {atoms}"
        ))),
        SpecialValue::PeakPiEven | SpecialValue::CounterPeak => Ok(n * (n - 1.0) / 2.0),
        SpecialValue::PeakPiOdd => Ok(n * (n - 1.0) / 8.0),
        SpecialValue::ZeroZero => Ok(n / (2.0 * (n - 1.0))),
    }
}

/// `g2(π, π)` for either parity.
pub fn peak_at_pi(atoms: usize) -> Result<f64> {
    if atoms.is_multiple_of(2) {
        special_value(SpecialValue::PeakPiEven, atoms)
    } else {
        special_value(SpecialValue::PeakPiOdd, atoms)
    }
}

/// One evaluation of the correlation functions at a detector pair.
///
/// `g2` and `class` are `None` where an intensity vanishes and the
/// normalized correlation is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSample {
    pub delta1: Phase,
    pub delta2: Phase,
    pub g1_at_1: f64,
    pub g1_at_2: f64,
    #[serde(rename = "G2")]
    pub g2_unnormalized: f64,
    #[serde(rename = "g2")]
    pub g2_normalized: Option<f64>,
    pub class: Option<PhotonStatClass>,
}

/// Intensities at or below this value make g2 undefined.
pub const INTENSITY_FLOOR: f64 = 1e-12;

impl CorrelationSample {
    pub fn from_correlators(
        delta1: Phase,
        delta2: Phase,
        g1_at_1: f64,
        g1_at_2: f64,
        g2_unnormalized: f64,
    ) -> Result<Self> {
        let g1_at_1 = clamp_nonnegative(g1_at_1)?;
        let g1_at_2 = clamp_nonnegative(g1_at_2)?;
        let g2_unnormalized = clamp_nonnegative(g2_unnormalized)?;
        let (g2_normalized, class) = if g1_at_1 > INTENSITY_FLOOR && g1_at_2 > INTENSITY_FLOOR {
            let g2 = clamp_nonnegative(g2_unnormalized / (g1_at_1 * g1_at_2))?;
            (Some(g2), Some(classify(g2)?))
        } else {
            (None, None)
        };
        Ok(Self {
            delta1,
            delta2,
            g1_at_1,
            g1_at_2,
            g2_unnormalized,
            g2_normalized,
            class,
        })
    }

    /// Evaluate every field from the closed forms.
    ///
    /// For `n_e = 2` the normalized value comes straight from the pair formula
    /// rather than from the ratio of the stored correlators.
    pub fn analytic(spec: EnsembleSpec, delta1: f64, delta2: f64) -> Result<Self> {
        if spec.excitations == 0 || spec.excitations > 2 {
            return Err(spec.unsupported("closed forms cover one or two excitations"));
        }
        let g1_at_1 = g1(spec, delta1)?;
        let g1_at_2 = g1(spec, delta2)?;
        if spec.excitations == 1 {
            return Self::from_correlators(Phase(delta1), Phase(delta2), g1_at_1, g1_at_2, 0.0);
        }
        let g2 = g2_pair(spec, delta1, delta2)?;
        Ok(Self {
            delta1: Phase(delta1),
            delta2: Phase(delta2),
            g1_at_1,
            g1_at_2,
            g2_unnormalized: g2 * g1_at_1 * g1_at_2,
            g2_normalized: Some(g2),
            class: Some(classify(g2)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn pair(n: usize) -> EnsembleSpec {
        EnsembleSpec::doubly_excited(n).unwrap()
    }

    #[test]
    fn ensemble_validation() {
        assert!(EnsembleSpec::new(0, 0).is_err());
        assert!(EnsembleSpec::new(3, 4).is_err());
        assert!(EnsembleSpec::new(1, 1).is_ok());
        assert!(EnsembleSpec::new(5, 0).is_ok());
    }

    #[test]
    fn g1_examples() {
        for n in 2..=12 {
            let v = g1(EnsembleSpec::new(n, 1).unwrap(), 0.0).unwrap();
            assert!((v - n as f64).abs() < 1e-12);
        }
        assert!((g1(pair(4), 0.0).unwrap() - 6.0).abs() < 1e-12);
        for d in [0.0, 0.4, PI, 5.0] {
            assert!((g1(EnsembleSpec::new(4, 4).unwrap(), d).unwrap() - 4.0).abs() < 1e-12);
        }
        assert!((g1(pair(6), PI / 3.0).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn g1_rejects_single_atom() {
        let err = g1(EnsembleSpec::new(1, 1).unwrap(), 0.0).unwrap_err();
        assert!(matches!(err, Error::UnsupportedEnsemble { .. }));
    }

    #[test]
    fn g2_pair_examples() {
        assert!((g2_pair(pair(2), 0.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(g2_pair(pair(4), 0.0, PI).unwrap() < 1e-12);
        assert!((g2_pair(pair(6), PI / 3.0, -PI / 3.0).unwrap() - 15.0).abs() < 1e-9);
    }

    #[test]
    fn g2_rejects_other_excitations() {
        for ne in [0, 1, 3, 4] {
            let spec = EnsembleSpec::new(5, ne).unwrap();
            assert!(matches!(
                g2_pair(spec, 0.1, 0.2),
                Err(Error::UnsupportedEnsemble { .. })
            ));
            assert!(g2_same(spec, 0.1).is_err());
            assert!(g2_counter(spec, 0.1).is_err());
            assert!(g2_fixed_zero(spec, 0.1).is_err());
        }
        assert!(g2_unnormalized(EnsembleSpec::new(5, 3).unwrap(), 0.0, 0.0).is_err());
        assert_eq!(
            g2_unnormalized(EnsembleSpec::new(5, 1).unwrap(), 0.3, 0.4).unwrap(),
            0.0
        );
    }

    #[test]
    fn g2_same_examples() {
        assert!((g2_same(pair(4), PI).unwrap() - 6.0).abs() < 1e-12);
        assert!((g2_same(pair(5), PI).unwrap() - 2.5).abs() < 1e-12);
        assert!((g2_same(pair(6), 0.0).unwrap() - 0.6).abs() < 1e-12);
        assert!(g2_same(pair(6), PI / 3.0).unwrap() < 1e-18);
    }

    #[test]
    fn g2_counter_examples() {
        assert!((g2_counter(pair(3), TAU / 3.0).unwrap() - 3.0).abs() < 1e-9);
        // chi^2 = 1/4 for N = 4: chi(x) = cos(x/2) cos(x), root of 4 chi^2 = 1
        let root = bisect(
            |x| 4.0 * crate::grating::chi_squared(x, 4) - 1.0,
            0.0,
            PI / 2.0,
        );
        assert!(g2_counter(pair(4), root).unwrap() < 1e-12);
        assert!((g2_counter(pair(2), 0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn g2_fixed_zero_examples() {
        assert!((g2_fixed_zero(pair(2), 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(g2_fixed_zero(pair(6), PI / 3.0).unwrap() < 1e-18);
        let v = g2_fixed_zero(pair(40), 0.0).unwrap();
        assert!((v - 1560.0 / 3042.0).abs() < 1e-12);
        let mut last = f64::INFINITY;
        for n in 2..=40 {
            let v = g2_fixed_zero(pair(n), 0.0).unwrap();
            assert!(v < last && v > 0.5);
            last = v;
        }
    }

    #[test]
    fn special_values() {
        let get = |name: &str, n| special_value(name.parse().unwrap(), n);
        assert_eq!(get("peak_pi_even", 4).unwrap(), 6.0);
        assert_eq!(get("zero_zero", 3).unwrap(), 0.75);
        assert_eq!(get("peak_pi_odd", 5).unwrap(), 2.5);
        assert_eq!(get("counter_peak", 7).unwrap(), 21.0);
        assert!(matches!(
            get("peak_pi_even", 5),
            Err(Error::InvalidRequest(_))
        ));
        assert!(matches!(
            get("peak_pi_odd", 6),
            Err(Error::InvalidRequest(_))
        ));
        assert!("peak".parse::<SpecialValue>().is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(classify(0.0).unwrap(), PhotonStatClass::Antibunched);
        assert_eq!(classify(1e-9).unwrap(), PhotonStatClass::Antibunched);
        assert_eq!(classify(6.0).unwrap(), PhotonStatClass::Superbunched);
        assert_eq!(classify(0.6).unwrap(), PhotonStatClass::Nonclassical);
        assert_eq!(classify(1.0).unwrap(), PhotonStatClass::Classical);
        assert_eq!(classify(2.0).unwrap(), PhotonStatClass::Classical);
        assert_eq!(classify(-1e-13).unwrap(), PhotonStatClass::Antibunched);
        assert!(matches!(classify(-1e-6), Err(Error::Numeric(_))));
        assert!(classify(f64::NAN).is_err());
    }

    #[test]
    fn odd_three_atoms_at_pi_is_not_superbunched() {
        let v = special_value(SpecialValue::PeakPiOdd, 3).unwrap();
        assert_eq!(v, 0.75);
        assert_eq!(classify(v).unwrap(), PhotonStatClass::Nonclassical);
    }

    #[test]
    fn analytic_sample_for_single_excitation() {
        let spec = EnsembleSpec::new(4, 1).unwrap();
        let s = CorrelationSample::analytic(spec, 0.0, 0.0).unwrap();
        assert_eq!(s.g2_unnormalized, 0.0);
        assert_eq!(s.class, Some(PhotonStatClass::Antibunched));
        let dark = CorrelationSample::analytic(spec, PI / 2.0, 0.0).unwrap();
        assert_eq!(dark.g2_normalized, None);
    }
}
