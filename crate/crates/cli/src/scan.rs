use std::f64::consts::TAU;
use std::io::Write;

use clap::Args;
use wstate_core::analysis::{run_scan, PhaseRange, ScanMode, ScanSpec, DEFAULT_RESOLUTION};
use wstate_core::analytic::EnsembleSpec;

use crate::output::{write_scan_csv, write_scan_json, RunMeta};
use crate::{emit, CliError, CliResult, Format, GlobalOptions};

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub atoms: usize,

    #[arg(long)]
    pub excitations: usize,

    /// diagonal | counter | fixed:<delta2> | grid
    #[arg(long, default_value = "diagonal", allow_hyphen_values = true)]
    pub mode: ScanMode,

    /// First phase of the sweep.
    #[arg(long = "from", default_value_t = 0.0, allow_hyphen_values = true)]
    pub start: f64,

    /// Last phase of the sweep.
    #[arg(long = "to", default_value_t = TAU, allow_hyphen_values = true)]
    pub end: f64,

    /// Grid points per axis.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub points: usize,

    /// Read phases in degrees.
    #[arg(long)]
    pub degrees: bool,
}

impl ScanArgs {
    pub fn spec(&self, global: &GlobalOptions) -> CliResult<ScanSpec> {
        let angle = |x: f64| if self.degrees { x.to_radians() } else { x };
        let mode = match self.mode {
            ScanMode::Fixed(delta2) => ScanMode::Fixed(angle(delta2)),
            other => other,
        };
        let spec = ScanSpec {
            ensemble: EnsembleSpec::new(self.atoms, self.excitations)?,
            mode,
            range: PhaseRange::new(angle(self.start), angle(self.end))?,
            second_range: None,
            resolution: self.points,
            engine: global.engine,
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn run(
    args: &ScanArgs,
    global: &GlobalOptions,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let spec = args.spec(global)?;
    let result = run_scan(&spec)?;
    let meta = RunMeta::for_scan("scan", &spec);
    let mut buf = Vec::new();
    let io = |e| CliError::io("<buffer>", e);
    match global.format.unwrap_or(Format::Csv) {
        Format::Csv | Format::Text => write_scan_csv(&mut buf, &meta, &result).map_err(io)?,
        Format::Json => write_scan_json(&mut buf, &meta, &result).map_err(io)?,
    }
    emit(global.output.as_deref(), &buf, stdout)?;
    if let (Some(path), false) = (&global.output, global.quiet) {
        let _ = writeln!(
            stderr,
            "wrote {} samples to {}",
            result.samples.len(),
            path.display()
        );
    }
    Ok(())
}
