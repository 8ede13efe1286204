//! CSV and JSON encodings of correlation samples and scan results.
//!
//! CSV numbers use 17 significant digits (`{:.16e}`), which round-trips every
//! `f64` exactly. Comment lines start with `#`; the header row is always
//! present.

use std::io::{self, Read, Write};

use serde::Serialize;
use wstate_core::analysis::{Extremum, ScanResult, ScanSpec};
use wstate_core::analytic::{CorrelationSample, EnsembleSpec, PhotonStatClass};
use wstate_core::grating::Phase;

pub const TOOL_NAME: &str = "wstate";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_COLUMNS: [&str; 7] = [
    "delta1", "delta2", "g1_at_1", "g1_at_2", "G2", "g2", "class",
];

pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Run metadata attached to every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMeta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub atoms: usize,
    pub excitations: usize,
    pub mode: String,
    pub engine: String,
    pub range: Option<[f64; 2]>,
    pub points: Option<usize>,
}

impl RunMeta {
    pub fn for_scan(command: &'static str, spec: &ScanSpec) -> Self {
        Self {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command,
            atoms: spec.ensemble.atoms,
            excitations: spec.ensemble.excitations,
            mode: spec.mode.to_string(),
            engine: spec.engine.to_string(),
            range: Some([spec.range.start, spec.range.end]),
            points: Some(spec.resolution),
        }
    }

    pub fn for_point(ensemble: EnsembleSpec, engine: &str) -> Self {
        Self {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: "eval",
            atoms: ensemble.atoms,
            excitations: ensemble.excitations,
            mode: "point".into(),
            engine: engine.into(),
            range: None,
            points: None,
        }
    }

    fn comment_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# tool={} {}", self.tool, self.version),
            format!("# command={}", self.command),
            format!("# atoms={}", self.atoms),
            format!("# excitations={}", self.excitations),
            format!("# mode={}", self.mode),
            format!("# engine={}", self.engine),
        ];
        if let Some([a, b]) = self.range {
            lines.push(format!("# range={},{}", number(a), number(b)));
        }
        if let Some(points) = self.points {
            lines.push(format!("# points={points}"));
        }
        lines
    }
}

pub fn sample_fields(sample: &CorrelationSample) -> [String; 7] {
    [
        number(sample.delta1.0),
        number(sample.delta2.0),
        number(sample.g1_at_1),
        number(sample.g1_at_2),
        number(sample.g2_unnormalized),
        sample.g2_normalized.map(number).unwrap_or_default(),
        sample.class.map(|c| c.to_string()).unwrap_or_default(),
    ]
}

fn extrema_list(points: &[Extremum]) -> String {
    points
        .iter()
        .map(|e| format!("{}:{}", number(e.position.0), number(e.value)))
        .collect::<Vec<_>>()
        .join(";")
}

/// Footer describing the detected features of one scan.
pub fn feature_comment_lines(result: &ScanResult, prefix: &str) -> Vec<String> {
    vec![
        format!("# {prefix}zeros={}", extrema_list(&result.zeros)),
        format!(
            "# {prefix}superbunching_peaks={}",
            extrema_list(&result.superbunching_peaks)
        ),
        format!(
            "# {prefix}visibility={}",
            result
                .visibility
                .map(number)
                .unwrap_or_else(|| "undefined".into())
        ),
    ]
}

fn write_lines(out: &mut dyn Write, lines: &[String]) -> io::Result<()> {
    for line in lines {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_samples_csv(
    out: &mut dyn Write,
    meta: &RunMeta,
    samples: &[CorrelationSample],
    footer: &[String],
) -> io::Result<()> {
    write_lines(out, &meta.comment_lines())?;
    {
        let mut writer = csv::Writer::from_writer(&mut *out);
        writer.write_record(CSV_COLUMNS)?;
        for sample in samples {
            writer.write_record(sample_fields(sample))?;
        }
        writer.flush()?;
    }
    write_lines(out, footer)
}

pub fn write_scan_csv(out: &mut dyn Write, meta: &RunMeta, result: &ScanResult) -> io::Result<()> {
    write_samples_csv(
        out,
        meta,
        &result.samples,
        &feature_comment_lines(result, ""),
    )
}

#[derive(Serialize)]
struct ScanDocument<'a> {
    meta: &'a RunMeta,
    samples: &'a [CorrelationSample],
    zeros: &'a [Extremum],
    superbunching_peaks: &'a [Extremum],
    visibility: Option<f64>,
}

pub fn write_scan_json(out: &mut dyn Write, meta: &RunMeta, result: &ScanResult) -> io::Result<()> {
    let doc = ScanDocument {
        meta,
        samples: &result.samples,
        zeros: &result.zeros,
        superbunching_peaks: &result.superbunching_peaks,
        visibility: result.visibility,
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

#[derive(Serialize)]
struct PointDocument<'a> {
    meta: &'a RunMeta,
    samples: [&'a CorrelationSample; 1],
}

pub fn write_point_json(
    out: &mut dyn Write,
    meta: &RunMeta,
    sample: &CorrelationSample,
) -> io::Result<()> {
    serde_json::to_writer_pretty(
        &mut *out,
        &PointDocument {
            meta,
            samples: [sample],
        },
    )?;
    writeln!(out)
}

/// One parsed CSV row. `atoms` is present in the figure datasets only.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub atoms: Option<usize>,
    pub sample: CorrelationSample,
}

fn parse_number(field: &str) -> io::Result<f64> {
    field
        .parse()
        .map_err(|_| io::Error::new(io::ErrorKind::InvalidData, format!("bad number {field:?}")))
}

/// Parse the sample rows of a scan or figure CSV, skipping comment lines.
pub fn read_samples_csv(input: impl Read) -> io::Result<Vec<CsvRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            io::Error::new(io::ErrorKind::InvalidData, format!("missing column {name}"))
        })
    };
    let idx: Vec<usize> = CSV_COLUMNS
        .iter()
        .map(|c| column(c))
        .collect::<io::Result<_>>()?;
    let atoms_idx = headers.iter().position(|h| h == "atoms");
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| record.get(idx[i]).unwrap_or("");
        let optional = |s: &str| -> io::Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_number(s).map(Some)
            }
        };
        let class = match field(6) {
            "" => None,
            s => Some(
                s.parse::<PhotonStatClass>()
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?,
            ),
        };
        let atoms =
            match atoms_idx {
                Some(i) => {
                    Some(record.get(i).unwrap_or("").parse().map_err(|_| {
                        io::Error::new(io::ErrorKind::InvalidData, "bad atoms field")
                    })?)
                }
                None => None,
            };
        rows.push(CsvRow {
            atoms,
            sample: CorrelationSample {
                delta1: Phase(parse_number(field(0))?),
                delta2: Phase(parse_number(field(1))?),
                g1_at_1: parse_number(field(2))?,
                g1_at_2: parse_number(field(3))?,
                g2_unnormalized: parse_number(field(4))?,
                g2_normalized: optional(field(5))?,
                class,
            },
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [
            0.1,
            std::f64::consts::PI,
            1e-300,
            6.0,
            2.0 / 3.0,
            f64::MIN_POSITIVE,
            0.0,
        ] {
            let s = number(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(number(6.0), "6.0000000000000000e0");
    }

    #[test]
    fn csv_round_trip_with_undefined_g2() {
        let samples = [
            CorrelationSample::from_correlators(Phase(0.5), Phase(-0.5), 1.5, 1.5, 0.75).unwrap(),
            CorrelationSample::from_correlators(Phase(1.0), Phase(1.0), 0.0, 0.0, 0.0).unwrap(),
        ];
        let meta = RunMeta::for_point(EnsembleSpec::new(3, 2).unwrap(), "analytic");
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &meta, &samples, &["# end".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("delta1,delta2,g1_at_1,g1_at_2,G2,g2,class\n"));
        let rows = read_samples_csv(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].sample, samples[0]);
        assert_eq!(rows[1].sample.g2_normalized, None);
        assert_eq!(rows[1].atoms, None);
    }
}
