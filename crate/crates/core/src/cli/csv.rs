//! CSV emission and parsing. Layout: `#` comment block (manifest, then any
//! flagged failures), one header line, data rows. Numbers carry 17
//! significant digits so parse-and-reemit is byte-identical.

use super::manifest::{fmt_f64, RunManifest};
use crate::error::{Error, Result};
use std::io::Write;

const HDR_TRAJECTORY: &str = "t,x,y,z";
const HDR_PHASE: &str = "k,x,y";
const HDR_BIFURCATION: &str = "param,k,x,y";
const HDR_LYAPUNOV: &str = "param,lambda_max";

/// One emittable dataset. `failures` hold flagged sweep points, rendered as
/// comment lines ahead of the header.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    /// Rows (t, x, y, z).
    Trajectory(Vec<(f64, f64, f64, f64)>),
    /// Rows (x, y); k is the row index.
    Phase(Vec<(f64, f64)>),
    /// Rows (param, sample index, x, y).
    Bifurcation { rows: Vec<(f64, u32, f64, f64)>, failures: Vec<String> },
    /// Rows (param, lambda_max).
    Lyapunov { rows: Vec<(f64, f64)>, failures: Vec<String> },
}

impl Dataset {
    fn header(&self) -> &'static str {
        match self {
            Dataset::Trajectory(_) => HDR_TRAJECTORY,
            Dataset::Phase(_) => HDR_PHASE,
            Dataset::Bifurcation { .. } => HDR_BIFURCATION,
            Dataset::Lyapunov { .. } => HDR_LYAPUNOV,
        }
    }

    fn failure_comments(&self) -> Vec<String> {
        let failures = match self {
            Dataset::Bifurcation { failures, .. } | Dataset::Lyapunov { failures, .. } => failures,
            _ => return Vec::new(),
        };
        failures.iter().map(|f| format!("# failed: {f}")).collect()
    }

    pub fn n_rows(&self) -> usize {
        match self {
            Dataset::Trajectory(rows) => rows.len(),
            Dataset::Phase(rows) => rows.len(),
            Dataset::Bifurcation { rows, .. } => rows.len(),
            Dataset::Lyapunov { rows, .. } => rows.len(),
        }
    }

    fn write_rows<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        match self {
            Dataset::Trajectory(rows) => {
                for &(t, x, y, z) in rows {
                    writeln!(w, "{},{},{},{}", fmt_f64(t), fmt_f64(x), fmt_f64(y), fmt_f64(z))?;
                }
            }
            Dataset::Phase(rows) => {
                for (k, &(x, y)) in rows.iter().enumerate() {
                    writeln!(w, "{k},{},{}", fmt_f64(x), fmt_f64(y))?;
                }
            }
            Dataset::Bifurcation { rows, .. } => {
                for &(p, k, x, y) in rows {
                    writeln!(w, "{},{k},{},{}", fmt_f64(p), fmt_f64(x), fmt_f64(y))?;
                }
            }
            Dataset::Lyapunov { rows, .. } => {
                for &(p, l) in rows {
                    writeln!(w, "{},{}", fmt_f64(p), fmt_f64(l))?;
                }
            }
        }
        Ok(())
    }
}

/// Emit with an explicit comment block (used verbatim; round-trip path).
pub fn emit_with_comments<W: Write>(comments: &[String], dataset: &Dataset, w: &mut W) -> Result<()> {
    for line in comments {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "{}", dataset.header())?;
    dataset.write_rows(w)?;
    Ok(())
}

/// Emit manifest comments, failure flags, header and rows.
pub fn write_csv<W: Write>(dataset: &Dataset, manifest: &RunManifest, w: &mut W) -> Result<()> {
    let mut comments = manifest.comment_lines();
    comments.extend(dataset.failure_comments());
    emit_with_comments(&comments, dataset, w)
}

pub fn csv_to_string(dataset: &Dataset, manifest: &RunManifest) -> String {
    let mut buf = Vec::new();
    write_csv(dataset, manifest, &mut buf).expect("in-memory write cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

fn parse_field(s: &str, line_no: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::CsvFormat(format!("line {line_no}: bad number {s:?}")))
}

/// Parse an emitted file back into its comment block and dataset. The schema
/// is identified by the header line. Reemitting via `emit_with_comments`
/// reproduces the input byte-for-byte.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Dataset)> {
    let mut lines = text.lines().enumerate().peekable();
    let mut comments = Vec::new();
    while let Some((_, l)) = lines.peek() {
        if l.starts_with('#') {
            comments.push(l.to_string());
            lines.next();
        } else {
            break;
        }
    }
    let (_, header) = lines.next().ok_or_else(|| Error::CsvFormat("missing header line".into()))?;

    let failures: Vec<String> = comments
        .iter()
        .filter_map(|c| c.strip_prefix("# failed: "))
        .map(str::to_string)
        .collect();

    let mut dataset = match header {
        HDR_TRAJECTORY => Dataset::Trajectory(Vec::new()),
        HDR_PHASE => Dataset::Phase(Vec::new()),
        HDR_BIFURCATION => Dataset::Bifurcation { rows: Vec::new(), failures },
        HDR_LYAPUNOV => Dataset::Lyapunov { rows: Vec::new(), failures },
        other => return Err(Error::CsvFormat(format!("unknown header {other:?}"))),
    };

    for (i, line) in lines {
        let no = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expect = |n: usize| {
            if fields.len() == n {
                Ok(())
            } else {
                Err(Error::CsvFormat(format!("line {no}: expected {n} fields, got {}", fields.len())))
            }
        };
        match &mut dataset {
            Dataset::Trajectory(rows) => {
                expect(4)?;
                rows.push((
                    parse_field(fields[0], no)?,
                    parse_field(fields[1], no)?,
                    parse_field(fields[2], no)?,
                    parse_field(fields[3], no)?,
                ));
            }
            Dataset::Phase(rows) => {
                expect(3)?;
                let k: usize = fields[0]
                    .parse()
                    .map_err(|_| Error::CsvFormat(format!("line {no}: bad index {:?}", fields[0])))?;
                if k != rows.len() {
                    return Err(Error::CsvFormat(format!("line {no}: index {k} out of order")));
                }
                rows.push((parse_field(fields[1], no)?, parse_field(fields[2], no)?));
            }
            Dataset::Bifurcation { rows, .. } => {
                expect(4)?;
                let k: u32 = fields[1]
                    .parse()
                    .map_err(|_| Error::CsvFormat(format!("line {no}: bad index {:?}", fields[1])))?;
                rows.push((
                    parse_field(fields[0], no)?,
                    k,
                    parse_field(fields[2], no)?,
                    parse_field(fields[3], no)?,
                ));
            }
            Dataset::Lyapunov { rows, .. } => {
                expect(2)?;
                rows.push((parse_field(fields[0], no)?, parse_field(fields[1], no)?));
            }
        }
    }
    Ok((comments, dataset))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest() -> RunManifest {
        let mut m = RunManifest::new("pdm test".into());
        m.push("params", "xi=5.0000000000000000e-1".into());
        m
    }

    #[test]
    fn empty_dataset_is_manifest_plus_header() {
        let s = csv_to_string(&Dataset::Trajectory(Vec::new()), &manifest());
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "t,x,y,z");
    }

    #[test]
    fn row_counts_and_headers() {
        let rows: Vec<_> = (0..640).map(|i| (0.5, i as u32 % 128, 0.1 * i as f64, -0.2)).collect();
        let s = csv_to_string(&Dataset::Bifurcation { rows, failures: Vec::new() }, &manifest());
        let mut lines = s.lines().skip_while(|l| l.starts_with('#'));
        assert_eq!(lines.next(), Some("param,k,x,y"));
        assert_eq!(lines.count(), 640);
    }

    #[test]
    fn failures_become_comment_flags() {
        let d = Dataset::Lyapunov {
            rows: vec![(0.5, -0.1)],
            failures: vec!["param=2.0000000000000000e0 step budget 50 exhausted at t=1.2".into()],
        };
        let s = csv_to_string(&d, &manifest());
        assert!(s.contains("# failed: param=2.0000000000000000e0"));
        let (_, parsed) = parse_csv(&s).unwrap();
        assert_eq!(parsed, d);
    }

    #[test]
    fn parse_then_reemit_is_byte_identical() {
        let datasets = [
            Dataset::Trajectory(vec![(0.0, 0.1, 0.1, 0.0), (0.25, -1.5e-8, 3.0, 7.7)]),
            Dataset::Phase(vec![(1.0, 2.0), (0.1, -0.3)]),
            Dataset::Bifurcation {
                rows: vec![(0.5, 0, 1.0, 2.0), (0.5, 1, -1.0, 0.25)],
                failures: vec!["param=9.0 diverged".into()],
            },
            Dataset::Lyapunov { rows: vec![(0.0, -0.1), (0.55, 0.084)], failures: Vec::new() },
        ];
        for d in datasets {
            let s1 = csv_to_string(&d, &manifest());
            let (comments, parsed) = parse_csv(&s1).unwrap();
            assert_eq!(parsed, d);
            let mut buf = Vec::new();
            emit_with_comments(&comments, &parsed, &mut buf).unwrap();
            assert_eq!(String::from_utf8(buf).unwrap(), s1);
        }
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("a,b,c\n1,2,3\n").is_err());
        assert!(parse_csv("t,x,y,z\n1,2,3\n").is_err());
        assert!(parse_csv("t,x,y,z\n1,2,bogus,4\n").is_err());
        assert!(parse_csv("k,x,y\n5,1.0,2.0\n").is_err());
    }

    #[test]
    fn exact_value_round_trip() {
        let vals = [0.1, f64::MIN_POSITIVE, 1.0 / 3.0, -6.02e23];
        let d = Dataset::Phase(vals.iter().map(|&v| (v, -v)).collect());
        let s = csv_to_string(&d, &manifest());
        let (_, parsed) = parse_csv(&s).unwrap();
        match parsed {
            Dataset::Phase(rows) => {
                for (i, &(x, y)) in rows.iter().enumerate() {
                    assert_eq!(x, vals[i]);
                    assert_eq!(y, -vals[i]);
                }
            }
            _ => panic!("wrong schema"),
        }
    }
}
