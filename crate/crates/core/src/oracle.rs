//! Brute-force state-vector evaluation of the correlation functions.
//!
//! The atoms live in a dense `2^N` occupation basis: bit `l` of a
//! configuration index is set when atom `l + 1` is excited. The far-field
//! operator `E+(delta) = sum_l exp(-i l delta) s_l^-` lowers one atom at a
//! time, so `G1 = |E+(d1) psi|^2` and `G2 = |E+(d2) E+(d1) psi|^2`.
//! Nothing here depends on the closed forms in [`analytic`](crate::analytic).

use num_complex::Complex64;

use crate::analytic::{clamp_nonnegative, CorrelationSample, EnsembleSpec, INTENSITY_FLOOR};
use crate::error::{Error, Result};
use crate::grating::Phase;

/// Largest chain the dense representation accepts (16M amplitudes).
pub const MAX_ATOMS: usize = 24;

/// Pure state of `num_atoms` two-level atoms as a dense amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_atoms: usize,
    amplitudes: Vec<Complex64>,
}

/// `E+(delta)|psi>`, left unnormalized.
pub type FieldApplication = QuantumState;

fn check_capacity(atoms: usize) -> Result<()> {
    if atoms > MAX_ATOMS {
        return Err(Error::Capacity {
            atoms,
            max: MAX_ATOMS,
        });
    }
    Ok(())
}

impl QuantumState {
    pub fn zero(num_atoms: usize) -> Result<Self> {
        check_capacity(num_atoms)?;
        Ok(Self {
            num_atoms,
            amplitudes: vec![Complex64::new(0.0, 0.0); 1 << num_atoms],
        })
    }

    /// All atoms in the ground state.
    pub fn ground(num_atoms: usize) -> Result<Self> {
        let mut state = Self::zero(num_atoms)?;
        state.amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn from_amplitudes(num_atoms: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_capacity(num_atoms)?;
        if amplitudes.len() != 1 << num_atoms {
            return Err(Error::InvalidRequest(format!(
                "{} amplitudes given for {num_atoms} atoms (expected {})",
                amplitudes.len(),
                1usize << num_atoms
            )));
        }
        Ok(Self {
            num_atoms,
            amplitudes,
        })
    }

    pub fn num_atoms(&self) -> usize {
        self.num_atoms
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, configuration: usize) -> Complex64 {
        self.amplitudes
            .get(configuration)
            .copied()
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re == 0.0 && a.im == 0.0)
    }

    /// Configurations carrying a nonzero amplitude.
    pub fn support(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
            .map(|(c, a)| (c, *a))
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Equal-amplitude superposition of every configuration with `n_e` excited atoms.
pub fn build_w_state(spec: EnsembleSpec) -> Result<QuantumState> {
    let EnsembleSpec { atoms, excitations } = spec;
    check_capacity(atoms)?;
    if excitations > atoms {
        return Err(Error::InvalidEnsemble(format!(
            "{excitations} excitations exceed {atoms} atoms"
        )));
    }
    let amplitude = Complex64::new((binomial(atoms, excitations) as f64).sqrt().recip(), 0.0);
    let mut state = QuantumState::zero(atoms)?;
    for (configuration, slot) in state.amplitudes.iter_mut().enumerate() {
        if configuration.count_ones() as usize == excitations {
            *slot = amplitude;
        }
    }
    Ok(state)
}

/// Apply `E+(delta) = sum_{l=1..N} exp(-i l delta) s_l^-`.
pub fn apply_field(state: &QuantumState, delta: f64) -> FieldApplication {
    apply_field_with_offset(state, delta, 0)
}

/// Same as [`apply_field`] with the atom labels shifted to `l + offset`.
///
/// The shift multiplies `E+` by a global phase, so no correlation function
/// may depend on it.
pub fn apply_field_with_offset(state: &QuantumState, delta: f64, offset: i64) -> FieldApplication {
    let phases: Vec<Complex64> = (0..state.num_atoms)
        .map(|bit| {
            let label = (bit as i64 + 1 + offset) as f64;
            Complex64::from_polar(1.0, -label * delta)
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); state.amplitudes.len()];
    for (configuration, amplitude) in state.support() {
        let mut excited = configuration;
        while excited != 0 {
            let bit = excited.trailing_zeros() as usize;
            excited &= excited - 1;
            out[configuration ^ (1 << bit)] += phases[bit] * amplitude;
        }
    }
    QuantumState {
        num_atoms: state.num_atoms,
        amplitudes: out,
    }
}

/// Prepared W state plus the detection routines that act on it.
#[derive(Debug, Clone)]
pub struct WStateOracle {
    spec: EnsembleSpec,
    state: QuantumState,
    offset: i64,
}

impl WStateOracle {
    pub fn new(spec: EnsembleSpec) -> Result<Self> {
        Ok(Self {
            spec,
            state: build_w_state(spec)?,
            offset: 0,
        })
    }

    /// Relabel atoms as `l + offset` in every field application.
    pub fn with_label_offset(mut self, offset: i64) -> Self {
        self.offset = offset;
        self
    }

    pub fn spec(&self) -> EnsembleSpec {
        self.spec
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    fn lower(&self, state: &QuantumState, delta: f64) -> QuantumState {
        apply_field_with_offset(state, delta, self.offset)
    }

    pub fn g1(&self, delta: f64) -> f64 {
        self.lower(&self.state, delta).norm_sqr()
    }

    /// Unnormalized `G2(delta1, delta2)`.
    pub fn g2(&self, delta1: f64, delta2: f64) -> f64 {
        let once = self.lower(&self.state, delta1);
        self.lower(&once, delta2).norm_sqr()
    }

    pub fn g2_normalized(&self, delta1: f64, delta2: f64) -> Result<f64> {
        let sample = self.sample(delta1, delta2)?;
        sample.g2_normalized.ok_or(Error::UndefinedCorrelation {
            g1_at_1: sample.g1_at_1,
            g1_at_2: sample.g1_at_2,
        })
    }

    /// All correlators at one detector pair, sharing the first field application.
    pub fn sample(&self, delta1: f64, delta2: f64) -> Result<CorrelationSample> {
        let once = self.lower(&self.state, delta1);
        let g1_at_1 = once.norm_sqr();
        let g1_at_2 = if delta2 == delta1 {
            g1_at_1
        } else {
            self.lower(&self.state, delta2).norm_sqr()
        };
        let g2 = self.lower(&once, delta2).norm_sqr();
        CorrelationSample::from_correlators(Phase(delta1), Phase(delta2), g1_at_1, g1_at_2, g2)
    }
}

pub fn g1_oracle(spec: EnsembleSpec, delta: f64) -> Result<f64> {
    clamp_nonnegative(WStateOracle::new(spec)?.g1(delta))
}

/// Unnormalized `G2`; zero for fewer than two excitations.
pub fn g2_oracle(spec: EnsembleSpec, delta1: f64, delta2: f64) -> Result<f64> {
    clamp_nonnegative(WStateOracle::new(spec)?.g2(delta1, delta2))
}

pub fn g2_normalized_oracle(spec: EnsembleSpec, delta1: f64, delta2: f64) -> Result<f64> {
    let oracle = WStateOracle::new(spec)?;
    let g1_at_1 = oracle.g1(delta1);
    let g1_at_2 = oracle.g1(delta2);
    if g1_at_1 <= INTENSITY_FLOOR || g1_at_2 <= INTENSITY_FLOOR {
        return Err(Error::UndefinedCorrelation { g1_at_1, g1_at_2 });
    }
    clamp_nonnegative(oracle.g2(delta1, delta2) / (g1_at_1 * g1_at_2))
}
