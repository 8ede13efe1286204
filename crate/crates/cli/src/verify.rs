use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wstate_core::analysis::{
    predicted_features, run_scan, verify_features, Engine, ScanMode, ScanSpec,
};
use wstate_core::analytic::{self, special_value, EnsembleSpec, SpecialValue};
use wstate_core::oracle::{WStateOracle, MAX_ATOMS};
use wstate_core::Error;

use crate::output::{TOOL_NAME, TOOL_VERSION};
use crate::{emit, CliError, CliResult, Format, GlobalOptions};

/// Largest N for which the oracle scans take part in the feature checks.
pub const ORACLE_FEATURE_MAX_ATOMS: usize = 10;

const EQUIVALENCE_TOLERANCE: f64 = 1e-10;
const IDENTITY_TOLERANCE: f64 = 1e-12;
const SPECIAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,

    #[arg(long, default_value_t = 10)]
    pub n_max: usize,

    /// Largest excitation number for the intensity checks (default: N).
    #[arg(long)]
    pub ne_max: Option<usize>,

    /// Random phases per check.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,

    /// Also write the JSON report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub atoms: usize,
    pub excitations: Option<usize>,
    pub engine: Option<Engine>,
    pub passed: bool,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &'static str, atoms: usize, excitations: Option<usize>, tolerance: f64) -> Self {
        Self {
            name,
            atoms,
            excitations,
            engine: None,
            passed: true,
            cases: 0,
            max_error: 0.0,
            tolerance,
            counterexample: None,
            notes: Vec::new(),
        }
    }

    /// Compare `observed` against `expected`, scaled by `max(1, |expected|)`.
    fn compare(&mut self, observed: f64, expected: f64, describe: impl FnOnce() -> String) {
        let error = (observed - expected).abs() / expected.abs().max(1.0);
        self.cases += 1;
        if error > self.max_error || error.is_nan() {
            self.max_error = error;
        }
        if error.is_nan() || error > self.tolerance {
            self.fail(|| {
                format!(
                    "{}: observed {observed:e}, expected {expected:e}",
                    describe()
                )
            });
        }
    }

    fn fail(&mut self, describe: impl FnOnce() -> String) {
        self.passed = false;
        if self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    fn label(&self) -> String {
        let mut label = format!("{} N={}", self.name, self.atoms);
        if let Some(ne) = self.excitations {
            label.push_str(&format!(" n_e={ne}"));
        }
        if let Some(engine) = self.engine {
            label.push_str(&format!(" engine={engine}"));
        }
        label
    }
}

#[derive(Debug, Serialize)]
struct ReportMeta {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    n_min: usize,
    n_max: usize,
    ne_max: Option<usize>,
    samples: usize,
}

#[derive(Debug, Serialize)]
struct Report {
    meta: ReportMeta,
    passed: bool,
    checks: Vec<CheckOutcome>,
}

fn phase(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-TAU..TAU)
}

fn g1_equivalence(
    spec: EnsembleSpec,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> CliResult<CheckOutcome> {
    let mut check = CheckOutcome::new(
        "g1_equivalence",
        spec.atoms,
        Some(spec.excitations),
        EQUIVALENCE_TOLERANCE,
    );
    let oracle = WStateOracle::new(spec)?;
    for _ in 0..samples {
        let delta = phase(rng);
        let expected = analytic::g1(spec, delta)?;
        check.compare(oracle.g1(delta), expected, || {
            format!("{spec} delta={delta:e}")
        });
    }
    Ok(check)
}

fn g2_equivalence(
    spec: EnsembleSpec,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> CliResult<CheckOutcome> {
    let mut check = CheckOutcome::new("g2_equivalence", spec.atoms, Some(2), EQUIVALENCE_TOLERANCE);
    let oracle = WStateOracle::new(spec)?;
    for _ in 0..samples {
        let (d1, d2) = (phase(rng), phase(rng));
        let describe = || format!("{spec} delta1={d1:e} delta2={d2:e}");
        match oracle.g2_normalized(d1, d2) {
            Ok(observed) => check.compare(observed, analytic::g2_pair(spec, d1, d2)?, describe),
            Err(err) => check.fail(|| format!("{}: {err}", describe())),
        }
        check.compare(
            oracle.g2(d1, d2),
            analytic::g2_unnormalized(spec, d1, d2)?,
            || format!("{spec} unnormalized delta1={d1:e} delta2={d2:e}"),
        );
    }
    Ok(check)
}

fn restrictions(
    spec: EnsembleSpec,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> CliResult<CheckOutcome> {
    let mut check = CheckOutcome::new("restrictions", spec.atoms, Some(2), IDENTITY_TOLERANCE);
    for _ in 0..samples {
        let d = phase(rng);
        check.compare(
            analytic::g2_same(spec, d)?,
            analytic::g2_pair(spec, d, d)?,
            || format!("same position delta={d:e}"),
        );
        check.compare(
            analytic::g2_counter(spec, d)?,
            analytic::g2_pair(spec, d, -d)?,
            || format!("counter-propagating delta={d:e}"),
        );
        check.compare(
            analytic::g2_fixed_zero(spec, d)?,
            analytic::g2_pair(spec, d, 0.0)?,
            || format!("fixed detector delta={d:e}"),
        );
    }
    Ok(check)
}

fn symmetry(spec: EnsembleSpec, samples: usize, rng: &mut ChaCha8Rng) -> CliResult<CheckOutcome> {
    let mut check = CheckOutcome::new("symmetry", spec.atoms, Some(2), IDENTITY_TOLERANCE);
    for _ in 0..samples {
        let (d1, d2) = (phase(rng), phase(rng));
        check.compare(
            analytic::g2_pair(spec, d2, d1)?,
            analytic::g2_pair(spec, d1, d2)?,
            || format!("exchange delta1={d1:e} delta2={d2:e}"),
        );
        check.compare(
            analytic::g2_pair(spec, -d1, -d2)?,
            analytic::g2_pair(spec, d1, d2)?,
            || format!("parity delta1={d1:e} delta2={d2:e}"),
        );
    }
    Ok(check)
}

fn commutation(
    spec: EnsembleSpec,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> CliResult<CheckOutcome> {
    let mut check = CheckOutcome::new(
        "commutation",
        spec.atoms,
        Some(spec.excitations),
        EQUIVALENCE_TOLERANCE,
    );
    let oracle = WStateOracle::new(spec)?;
    for _ in 0..samples {
        let (d1, d2) = (phase(rng), phase(rng));
        check.compare(oracle.g2(d2, d1), oracle.g2(d1, d2), || {
            format!("{spec} delta1={d1:e} delta2={d2:e}")
        });
    }
    Ok(check)
}

fn label_offset(
    spec: EnsembleSpec,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> CliResult<CheckOutcome> {
    let mut check = CheckOutcome::new(
        "label_offset",
        spec.atoms,
        Some(spec.excitations),
        EQUIVALENCE_TOLERANCE,
    );
    let plain = WStateOracle::new(spec)?;
    let shifted = WStateOracle::new(spec)?.with_label_offset(3);
    for _ in 0..samples {
        let (d1, d2) = (phase(rng), phase(rng));
        check.compare(shifted.g1(d1), plain.g1(d1), || {
            format!("{spec} G1 delta={d1:e}")
        });
        check.compare(shifted.g2(d1, d2), plain.g2(d1, d2), || {
            format!("{spec} G2 delta1={d1:e} delta2={d2:e}")
        });
    }
    Ok(check)
}

fn special_values(spec: EnsembleSpec) -> CliResult<CheckOutcome> {
    let n = spec.atoms;
    let mut check = CheckOutcome::new("special_values", n, Some(2), SPECIAL_TOLERANCE);
    let oracle = WStateOracle::new(spec)?;
    let peak = if n.is_multiple_of(2) {
        SpecialValue::PeakPiEven
    } else {
        SpecialValue::PeakPiOdd
    };
    let mut points = vec![(peak, PI, PI), (SpecialValue::ZeroZero, 0.0, 0.0)];
    if n >= 3 {
        for a in 1..n {
            let d = TAU * a as f64 / n as f64;
            points.push((SpecialValue::CounterPeak, d, -d));
        }
    }
    for (name, d1, d2) in points {
        let expected = special_value(name, n)?;
        check.compare(analytic::g2_pair(spec, d1, d2)?, expected, || {
            format!("{} closed form at ({d1:e}, {d2:e})", name.name())
        });
        check.compare(oracle.g2_normalized(d1, d2)?, expected, || {
            format!("{} oracle at ({d1:e}, {d2:e})", name.name())
        });
    }
    Ok(check)
}

fn features(spec: EnsembleSpec, mode: ScanMode, engine: Engine) -> CliResult<CheckOutcome> {
    let name = match mode {
        ScanMode::Diagonal => "features_diagonal",
        ScanMode::Counter => "features_counter",
        _ => "features_fixed_zero",
    };
    let scan_spec = ScanSpec::new(spec, mode).with_engine(engine);
    let catalog = predicted_features(spec, mode, scan_spec.range)?;
    let report = verify_features(&run_scan(&scan_spec)?, &catalog)?;
    let mut check = CheckOutcome::new(
        name,
        spec.atoms,
        Some(2),
        wstate_core::analysis::POSITION_TOLERANCE,
    );
    check.engine = Some(engine);
    check.cases = report.matches.len() + report.misses.len();
    check.max_error = report
        .matches
        .iter()
        .map(|m| (m.observed.0 - m.predicted.position.0).abs())
        .fold(0.0, f64::max);
    if let Some(miss) = report.misses.first() {
        check.fail(|| {
            format!(
                "{spec} {mode}: no detected {:?} near {:e} (predicted value {:e})",
                miss.kind, miss.position.0, miss.value
            )
        });
    }
    check.notes = report.notes;
    check
        .notes
        .extend(report.extras.iter().map(|(kind, position, value)| {
            format!(
                "unpredicted {kind:?} at {:e} with value {value:e}",
                position.0
            )
        }));
    Ok(check)
}

fn validate(args: &VerifyArgs) -> CliResult<()> {
    if args.n_max < 2 {
        return Err(Error::UnsupportedEnsemble {
            atoms: args.n_max,
            excitations: 0,
            reason: "the intensity formula needs at least two atoms",
        }
        .into());
    }
    if args.n_max > MAX_ATOMS {
        return Err(Error::Capacity {
            atoms: args.n_max,
            max: MAX_ATOMS,
        }
        .into());
    }
    if args.n_min < 2 || args.n_min > args.n_max {
        return Err(CliError::Usage(format!(
            "--n-min must lie in [2, {}], got {}",
            args.n_max, args.n_min
        )));
    }
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    Ok(())
}

fn run_checks(args: &VerifyArgs, seed: u64) -> CliResult<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for n in args.n_min..=args.n_max {
        let ne_max = args.ne_max.unwrap_or(n).min(n);
        for ne in 0..=ne_max {
            let spec = EnsembleSpec::new(n, ne)?;
            checks.push(g1_equivalence(spec, args.samples, &mut rng)?);
            if ne >= 2 {
                checks.push(commutation(spec, args.samples, &mut rng)?);
            }
            checks.push(label_offset(spec, args.samples, &mut rng)?);
        }
        let pair = EnsembleSpec::doubly_excited(n)?;
        checks.push(g2_equivalence(pair, args.samples, &mut rng)?);
        checks.push(restrictions(pair, args.samples, &mut rng)?);
        checks.push(symmetry(pair, args.samples, &mut rng)?);
        checks.push(special_values(pair)?);
        for mode in [ScanMode::Diagonal, ScanMode::Counter, ScanMode::Fixed(0.0)] {
            checks.push(features(pair, mode, Engine::Analytic)?);
            if n <= ORACLE_FEATURE_MAX_ATOMS {
                checks.push(features(pair, mode, Engine::Oracle)?);
            }
        }
    }
    Ok(checks)
}

pub fn run(
    args: &VerifyArgs,
    global: &GlobalOptions,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    validate(args)?;
    let checks = run_checks(args, global.seed)?;
    let passed = checks.iter().all(|c| c.passed);
    let report = Report {
        meta: ReportMeta {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: "verify",
            seed: global.seed,
            n_min: args.n_min,
            n_max: args.n_max,
            ne_max: args.ne_max,
            samples: args.samples,
        },
        passed,
        checks,
    };
    let mut json =
        serde_json::to_vec_pretty(&report).map_err(|e| CliError::io("<report>", e.into()))?;
    json.push(b'\n');
    if let Some(path) = &args.report {
        emit(Some(path), &json, stdout)?;
    }

    if global.format == Some(Format::Json) {
        emit(global.output.as_deref(), &json, stdout)?;
    } else {
        let mut text = String::new();
        for check in report.checks.iter().filter(|c| !global.quiet || !c.passed) {
            let status = if check.passed { "PASS" } else { "FAIL" };
            text.push_str(&format!(
                "{status} {} cases={} max_error={:e}\n",
                check.label(),
                check.cases,
                check.max_error
            ));
        }
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        text.push_str(&format!(
            "{} checks, {failed} failed\n",
            report.checks.len()
        ));
        emit(global.output.as_deref(), text.as_bytes(), stdout)?;
    }

    match report.checks.iter().find(|c| !c.passed) {
        None => Ok(()),
        Some(check) => {
            let detail = check.counterexample.clone().unwrap_or_default();
            let _ = writeln!(stderr, "counterexample: {}: {detail}", check.label());
            Err(CliError::VerificationFailed(format!(
                "{}: {detail}",
                check.label()
            )))
        }
    }
}
