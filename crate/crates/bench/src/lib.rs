//! Benchmark fixtures shared by the criterion targets.

use wstate_core::analysis::{ScanMode, ScanSpec};
use wstate_core::analytic::EnsembleSpec;
use wstate_core::Engine;

/// Atom numbers used across the benchmarks.
pub const ATOMS: [usize; 4] = [4, 8, 12, 16];

pub fn diagonal_scan(atoms: usize, engine: Engine, points: usize) -> ScanSpec {
    let ensemble = EnsembleSpec::doubly_excited(atoms).expect("valid ensemble");
    ScanSpec::new(ensemble, ScanMode::Diagonal)
        .with_engine(engine)
        .with_resolution(points)
}
