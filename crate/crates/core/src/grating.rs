//! Far-field grating function and detector geometry.
//!
//! A detector in the far field of a linear chain with spacing `d` sees the
//! photon from atom `l` with the phase `l * delta`, where
//! `delta = k d sin(theta) cos(phi)`. The collective amplitude pattern of the
//! chain is the normalized N-slit grating function
//! `chi(x) = sin(N x / 2) / (N sin(x / 2))`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value of `|sin(x/2)|` the grating function is evaluated by its
/// limit at the nearest multiple of 2π.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// Dimensionless optical phase increment between neighbouring atoms, in radians.
///
/// Phases are never wrapped; every consumer treats them as 2π-periodic.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Phase(pub f64);

impl Phase {
    pub const ZERO: Phase = Phase(0.0);
    pub const PI: Phase = Phase(PI);

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn from_degrees(deg: f64) -> Self {
        Phase(deg.to_radians())
    }
}

impl From<f64> for Phase {
    fn from(value: f64) -> Self {
        Phase(value)
    }
}

impl From<Phase> for f64 {
    fn from(value: Phase) -> Self {
        value.0
    }
}

impl std::ops::Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase(-self.0)
    }
}

impl std::ops::Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        Phase(self.0 + rhs.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Physical placement of one far-field detector relative to the atom chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorGeometry {
    /// Wavenumber `k` of the emitted light (radians per length unit).
    pub wavenumber: f64,
    /// Interatomic spacing `d` (length unit).
    pub spacing: f64,
    /// Polar angle `theta` (radians).
    pub polar: f64,
    /// Azimuthal angle `phi` (radians).
    pub azimuth: f64,
}

impl DetectorGeometry {
    pub fn new(wavenumber: f64, spacing: f64, polar: f64, azimuth: f64) -> Result<Self> {
        let geometry = Self {
            wavenumber,
            spacing,
            polar,
            azimuth,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    fn validate(&self) -> Result<()> {
        if !(self.wavenumber.is_finite() && self.wavenumber > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "wavenumber must be finite and positive, got {}",
                self.wavenumber
            )));
        }
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "spacing must be finite and positive, got {}",
                self.spacing
            )));
        }
        if !(self.polar.is_finite() && self.azimuth.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "angles must be finite, got theta = {}, phi = {}",
                self.polar, self.azimuth
            )));
        }
        Ok(())
    }

    pub fn phase(&self) -> Result<Phase> {
        phase_from_geometry(self)
    }
}

/// `delta = k d sin(theta) cos(phi)`.
pub fn phase_from_geometry(geometry: &DetectorGeometry) -> Result<Phase> {
    geometry.validate()?;
    let delta =
        geometry.wavenumber * geometry.spacing * geometry.polar.sin() * geometry.azimuth.cos();
    if !delta.is_finite() {
        return Err(Error::InvalidGeometry(format!(
            "phase is not finite: {delta}"
        )));
    }
    Ok(Phase(delta))
}

/// Normalized N-slit grating function `sin(N x / 2) / (N sin(x / 2))`.
///
/// The argument is first split as `x = 2πm + r` with `|r| <= π`. Using
/// `sin(N(2πm + r)/2) = (-1)^(Nm) sin(N r / 2)` and
/// `sin((2πm + r)/2) = (-1)^m sin(r / 2)`, the function becomes
/// `(-1)^(m(N-1)) chi(r)`, which keeps full relative precision next to the
/// removable singularities. At the singularities themselves the limit
/// `(-1)^(m(N-1))` is returned.
pub fn chi(x: f64, atoms: usize) -> f64 {
    debug_assert!(atoms >= 1);
    if atoms <= 1 {
        return 1.0;
    }
    let turns = (x / TAU).round();
    let r = x - turns * TAU;
    // (-1)^(m(N-1)) is negative only when m is odd and N is even.
    let odd_turn = (turns % 2.0) != 0.0;
    let sign = if odd_turn && atoms.is_multiple_of(2) {
        -1.0
    } else {
        1.0
    };

    let half = 0.5 * r;
    let denom = half.sin();
    if denom.abs() < SINGULARITY_THRESHOLD {
        return sign;
    }
    let n = atoms as f64;
    let value = (n * half).sin() / (n * denom);
    (sign * value).clamp(-1.0, 1.0)
}

/// `chi(x)^2`, the normalized far-field intensity pattern of the grating.
#[inline]
pub fn chi_squared(x: f64, atoms: usize) -> f64 {
    let c = chi(x, atoms);
    c * c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_examples() {
        let g = DetectorGeometry::new(TAU, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(g.phase().unwrap(), Phase(0.0));

        let g = DetectorGeometry::new(TAU, 1.0, PI / 2.0, 0.0).unwrap();
        assert!((g.phase().unwrap().radians() - TAU).abs() < 1e-15);

        let g = DetectorGeometry::new(PI, 2.0, PI / 2.0, PI / 3.0).unwrap();
        assert!((g.phase().unwrap().radians() - PI).abs() < 1e-15);
    }

    #[test]
    fn geometry_rejects_bad_inputs() {
        for (k, d) in [
            (0.0, 1.0),
            (-1.0, 1.0),
            (1.0, 0.0),
            (f64::NAN, 1.0),
            (1.0, f64::INFINITY),
        ] {
            assert!(matches!(
                DetectorGeometry::new(k, d, 0.1, 0.2),
                Err(Error::InvalidGeometry(_))
            ));
        }
        let g = DetectorGeometry {
            wavenumber: 1.0,
            spacing: -2.0,
            polar: 0.0,
            azimuth: 0.0,
        };
        assert!(phase_from_geometry(&g).is_err());
    }

    #[test]
    fn chi_at_origin_is_one() {
        for n in 1..=24 {
            assert_eq!(chi(0.0, n), 1.0);
        }
    }

    #[test]
    fn chi_even_and_odd_identities() {
        assert!(chi(PI, 4).abs() < 1e-15);
        assert_eq!(chi(TAU, 4), -1.0);
        assert!((chi(PI, 5).abs() - 0.2).abs() < 1e-15);
        assert_eq!(chi(TAU, 5), 1.0);
    }

    #[test]
    fn chi_vanishes_at_grating_zeros() {
        assert!(chi(PI / 3.0, 6).abs() < 1e-15);
        for n in 2..=20 {
            for a in 1..n {
                let x = TAU * a as f64 / n as f64;
                assert!(chi(x, n).abs() < 1e-14, "N={n} a={a}: {}", chi(x, n));
            }
        }
    }

    #[test]
    fn chi_singular_branch_sign() {
        // (-1)^(m(N-1))
        for m in -5i32..=5 {
            for n in 1..=9usize {
                let expected = if m.rem_euclid(2) == 1 && n % 2 == 0 {
                    -1.0
                } else {
                    1.0
                };
                assert_eq!(chi(TAU * m as f64, n), expected, "m={m} N={n}");
            }
        }
    }

    #[test]
    fn chi_continuous_at_singularities() {
        for m in -3i32..=3 {
            for n in [2usize, 3, 4, 7, 12, 20] {
                let at = chi(TAU * m as f64, n);
                for offset in [1e-6, 1e-7, 1e-8] {
                    let x = TAU * m as f64;
                    for side in [-1.0, 1.0] {
                        let near = chi(x + side * offset, n);
                        assert!(
                            (near - at).abs() < 1e-9,
                            "m={m} N={n} offset={offset}: {near} vs {at}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn single_atom_is_flat() {
        for x in [-7.0, -1.0, 0.0, 0.3, PI, TAU, 100.0] {
            assert_eq!(chi(x, 1), 1.0);
        }
    }
}
