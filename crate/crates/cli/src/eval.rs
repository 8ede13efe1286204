use std::io::Write;

use clap::Args;
use wstate_core::analysis::Evaluator;
use wstate_core::analytic::{CorrelationSample, EnsembleSpec};
use wstate_core::grating::DetectorGeometry;

use crate::output::{number, write_point_json, write_samples_csv, RunMeta};
use crate::{emit, CliError, CliResult, Format, GlobalOptions};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Number of atoms N.
    #[arg(long)]
    pub atoms: usize,

    /// Number of excitations n_e.
    #[arg(long)]
    pub excitations: usize,

    /// Phase of the first detector.
    #[arg(long, allow_hyphen_values = true)]
    pub delta1: Option<f64>,

    /// Phase of the second detector (defaults to delta1).
    #[arg(long, allow_hyphen_values = true)]
    pub delta2: Option<f64>,

    /// Detector placement k,d,theta1,phi1[,theta2,phi2] instead of phases.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with_all = ["delta1", "delta2"]
    )]
    pub geometry: Option<Vec<f64>>,

    /// Read phases and angles in degrees.
    #[arg(long)]
    pub degrees: bool,
}

impl EvalArgs {
    /// Detector phases in radians.
    pub fn phases(&self) -> CliResult<(f64, f64)> {
        let angle = |x: f64| if self.degrees { x.to_radians() } else { x };
        if let Some(values) = &self.geometry {
            let (k, d) = match values.as_slice() {
                [k, d, ..] => (*k, *d),
                _ => {
                    return Err(CliError::Usage(
                        "--geometry needs k,d,theta1,phi1[,theta2,phi2]".into(),
                    ))
                }
            };
            let (first, second) = match values.as_slice() {
                [_, _, t1, p1] => ((*t1, *p1), (*t1, *p1)),
                [_, _, t1, p1, t2, p2] => ((*t1, *p1), (*t2, *p2)),
                _ => {
                    return Err(CliError::Usage(format!(
                        "--geometry takes 4 or 6 values, got {}",
                        values.len()
                    )))
                }
            };
            let d1 = DetectorGeometry::new(k, d, angle(first.0), angle(first.1))?.phase()?;
            let d2 = DetectorGeometry::new(k, d, angle(second.0), angle(second.1))?.phase()?;
            return Ok((d1.0, d2.0));
        }
        let delta1 = self
            .delta1
            .ok_or_else(|| CliError::Usage("either --delta1 or --geometry is required".into()))?;
        let delta2 = self.delta2.unwrap_or(delta1);
        if !(delta1.is_finite() && delta2.is_finite()) {
            return Err(CliError::Usage("phases must be finite".into()));
        }
        Ok((angle(delta1), angle(delta2)))
    }
}

fn render_text(ensemble: EnsembleSpec, engine: &str, sample: &CorrelationSample) -> String {
    let undefined = || "undefined".to_string();
    let rows = [
        (
            "ensemble",
            format!("N={} n_e={}", ensemble.atoms, ensemble.excitations),
        ),
        ("engine", engine.to_string()),
        ("delta1", number(sample.delta1.0)),
        ("delta2", number(sample.delta2.0)),
        ("G1(delta1)", number(sample.g1_at_1)),
        ("G1(delta2)", number(sample.g1_at_2)),
        ("G2", number(sample.g2_unnormalized)),
        (
            "g2",
            sample.g2_normalized.map(number).unwrap_or_else(undefined),
        ),
        (
            "class",
            sample
                .class
                .map(|c| c.to_string())
                .unwrap_or_else(undefined),
        ),
    ];
    rows.iter().map(|(k, v)| format!("{k:<11} {v}\n")).collect()
}

pub fn run(args: &EvalArgs, global: &GlobalOptions, stdout: &mut dyn Write) -> CliResult<()> {
    let ensemble = EnsembleSpec::new(args.atoms, args.excitations)?;
    let (delta1, delta2) = args.phases()?;
    let sample = Evaluator::new(ensemble, global.engine)?.sample(delta1, delta2)?;
    let engine = global.engine.as_str();
    let meta = RunMeta::for_point(ensemble, engine);

    let mut buf = Vec::new();
    let io = |e| CliError::io("<buffer>", e);
    match global.format.unwrap_or(Format::Text) {
        Format::Text => buf.extend_from_slice(render_text(ensemble, engine, &sample).as_bytes()),
        Format::Csv => write_samples_csv(&mut buf, &meta, &[sample], &[]).map_err(io)?,
        Format::Json => write_point_json(&mut buf, &meta, &sample).map_err(io)?,
    }
    emit(global.output.as_deref(), &buf, stdout)
}
