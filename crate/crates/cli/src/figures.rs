use std::io::{self, Write};
use std::path::{Path, PathBuf};

use wstate_core::analysis::{
    run_scan, Engine, PhaseRange, ScanMode, ScanResult, ScanSpec, DEFAULT_RESOLUTION,
};
use wstate_core::analytic::EnsembleSpec;

use crate::output::{
    feature_comment_lines, number, sample_fields, CSV_COLUMNS, TOOL_NAME, TOOL_VERSION,
};
use crate::{CliError, CliResult, GlobalOptions};

pub const DEFAULT_DIRECTORY: &str = "figures";

/// One published figure: a scan mode and the atom numbers plotted in it.
#[derive(Debug, Clone, Copy)]
pub struct Figure {
    pub file: &'static str,
    pub mode: ScanMode,
    pub atoms: &'static [usize],
}

pub const FIGURES: [Figure; 3] = [
    Figure {
        file: "fig2.csv",
        mode: ScanMode::Diagonal,
        atoms: &[3, 4, 6],
    },
    Figure {
        file: "fig3.csv",
        mode: ScanMode::Counter,
        atoms: &[3, 4, 6],
    },
    Figure {
        file: "fig4.csv",
        mode: ScanMode::Fixed(0.0),
        atoms: &[2, 4, 6],
    },
];

fn write_dataset(
    out: &mut Vec<u8>,
    figure: &Figure,
    engine: Engine,
    scans: &[ScanResult],
) -> io::Result<()> {
    let range = PhaseRange::FULL_PERIOD;
    let atoms: Vec<String> = figure.atoms.iter().map(|n| n.to_string()).collect();
    writeln!(out, "# tool={TOOL_NAME} {TOOL_VERSION}")?;
    writeln!(out, "# command=figures")?;
    writeln!(out, "# figure={}", figure.file.trim_end_matches(".csv"))?;
    writeln!(out, "# atoms={}", atoms.join(","))?;
    writeln!(out, "# excitations=2")?;
    writeln!(out, "# mode={}", figure.mode)?;
    writeln!(out, "# engine={engine}")?;
    writeln!(out, "# range={},{}", number(range.start), number(range.end))?;
    writeln!(out, "# points={DEFAULT_RESOLUTION}")?;
    {
        let mut writer = csv::Writer::from_writer(&mut *out);
        let mut header = vec!["atoms"];
        header.extend(CSV_COLUMNS);
        writer.write_record(&header)?;
        for scan in scans {
            let n = scan.spec.ensemble.atoms.to_string();
            for sample in &scan.samples {
                let fields = sample_fields(sample);
                writer.write_record(
                    std::iter::once(n.as_str()).chain(fields.iter().map(String::as_str)),
                )?;
            }
        }
        writer.flush()?;
    }
    for scan in scans {
        for line in feature_comment_lines(scan, &format!("N={} ", scan.spec.ensemble.atoms)) {
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

/// Render every figure dataset in memory as `(file name, bytes)`.
pub fn render(engine: Engine) -> CliResult<Vec<(&'static str, Vec<u8>)>> {
    FIGURES
        .iter()
        .map(|figure| {
            let scans = figure
                .atoms
                .iter()
                .map(|&n| {
                    let spec = ScanSpec::new(EnsembleSpec::doubly_excited(n)?, figure.mode)
                        .with_range(PhaseRange::FULL_PERIOD)
                        .with_resolution(DEFAULT_RESOLUTION)
                        .with_engine(engine);
                    run_scan(&spec)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut bytes = Vec::new();
            write_dataset(&mut bytes, figure, engine, &scans)
                .map_err(|e| CliError::io(figure.file, e))?;
            Ok((figure.file, bytes))
        })
        .collect()
}

pub fn run(global: &GlobalOptions, stderr: &mut dyn Write) -> CliResult<()> {
    let dir: PathBuf = global
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DIRECTORY));
    let datasets = render(global.engine)?;
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    for (file, bytes) in &datasets {
        let path = Path::new(&dir).join(file);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        if !global.quiet {
            let _ = writeln!(stderr, "wrote {}", path.display());
        }
    }
    Ok(())
}
