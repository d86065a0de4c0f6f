//! Aggregates summary files across seeds into a quartile table.
//!
//! All inputs must share the same schema version and column list; mixed
//! schemas are refused with the offending column named. Statistics use the
//! nearest-rank convention: quantile p of n sorted values is the element at
//! rank ceil(p*n), so every reported number is an actually observed value
//! and the median of an even count is the lower of the two middle values.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::runner::SUMMARY_VERSION;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot read {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: {message}", .path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{}: summary version {found}, expected v{expected}; refusing to mix schemas",
        .path.display())]
    VersionMismatch { path: PathBuf, found: String, expected: u32 },
    #[error("{}: column {index} is '{found}', expected '{expected}'; refusing to mix schemas",
        .path.display())]
    ColumnMismatch { path: PathBuf, index: usize, found: String, expected: String },
    #[error("no summary files given")]
    NoInputs,
}

/// One parsed summary file: header columns and rows of optional numbers
/// (empty cells stay empty rather than becoming zeros).
#[derive(Debug, Clone)]
pub struct SummaryFile {
    pub path: PathBuf,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

pub fn parse_summary(path: &Path) -> Result<SummaryFile, ReportError> {
    let text = fs::read_to_string(path)
        .map_err(|source| ReportError::Io { path: path.to_path_buf(), source })?;
    let mut lines = text.lines().enumerate();

    let (_, magic) = lines.next().ok_or_else(|| ReportError::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: "empty file".to_string(),
    })?;
    let version = magic.strip_prefix("# curio-summary v").ok_or_else(|| ReportError::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: format!("not a summary file (first line: '{magic}')"),
    })?;
    if version.trim() != SUMMARY_VERSION.to_string() {
        return Err(ReportError::VersionMismatch {
            path: path.to_path_buf(),
            found: version.trim().to_string(),
            expected: SUMMARY_VERSION,
        });
    }

    let (_, header) = lines.next().ok_or_else(|| ReportError::Parse {
        path: path.to_path_buf(),
        line: 2,
        message: "missing header row".to_string(),
    })?;
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();

    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(ReportError::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("{} cells, header has {}", cells.len(), columns.len()),
            });
        }
        let mut row = Vec::with_capacity(cells.len());
        for (cell, column) in cells.iter().zip(&columns) {
            if cell.is_empty() {
                row.push(None);
            } else {
                let value: f64 = cell.parse().map_err(|_| ReportError::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message: format!("column '{column}': '{cell}' is not a number"),
                })?;
                row.push(Some(value));
            }
        }
        rows.push(row);
    }
    Ok(SummaryFile { path: path.to_path_buf(), columns, rows })
}

/// Element at nearest rank ceil(numerator/4 * n), 1-indexed.
fn rank(sorted: &[f64], numerator: usize) -> f64 {
    sorted[(numerator * sorted.len()).div_ceil(4) - 1]
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricStats {
    pub metric: String,
    /// Number of non-empty cells aggregated.
    pub n: usize,
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub q3: Option<f64>,
}

/// Pools all rows of all files and computes per-column quartiles. The `seed`
/// column is identification, not a metric, and is skipped.
pub fn aggregate(files: &[SummaryFile]) -> Result<Vec<MetricStats>, ReportError> {
    let first = files.first().ok_or(ReportError::NoInputs)?;
    for file in &files[1..] {
        let longer = file.columns.len().max(first.columns.len());
        for index in 0..longer {
            let expected = first.columns.get(index).map(String::as_str).unwrap_or("<none>");
            let found = file.columns.get(index).map(String::as_str).unwrap_or("<none>");
            if expected != found {
                return Err(ReportError::ColumnMismatch {
                    path: file.path.clone(),
                    index,
                    found: found.to_string(),
                    expected: expected.to_string(),
                });
            }
        }
    }

    let mut stats = Vec::new();
    for (index, column) in first.columns.iter().enumerate() {
        if column == "seed" {
            continue;
        }
        let mut values: Vec<f64> = files
            .iter()
            .flat_map(|f| f.rows.iter())
            .filter_map(|row| row[index])
            .collect();
        values.sort_by(f64::total_cmp);
        if values.is_empty() {
            stats.push(MetricStats { metric: column.clone(), n: 0, q1: None, median: None, q3: None });
        } else {
            stats.push(MetricStats {
                metric: column.clone(),
                n: values.len(),
                q1: Some(rank(&values, 1)),
                median: Some(rank(&values, 2)),
                q3: Some(rank(&values, 3)),
            });
        }
    }
    Ok(stats)
}

pub fn render_table(stats: &[MetricStats]) -> String {
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("metric,n,q1,median,q3\n");
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.metric,
            s.n,
            cell(s.q1),
            cell(s.median),
            cell(s.q3)
        ));
    }
    out
}

/// Full pipeline: parse every file, refuse mixed schemas, render the table.
pub fn report(paths: &[PathBuf]) -> Result<String, ReportError> {
    if paths.is_empty() {
        return Err(ReportError::NoInputs);
    }
    let files: Vec<SummaryFile> =
        paths.iter().map(|p| parse_summary(p)).collect::<Result<_, _>>()?;
    Ok(render_table(&aggregate(&files)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;
    use tempfile::tempdir;

    fn write_summary(dir: &Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        let mut f = fs::File::create(&path).unwrap();
        write!(f, "{body}").unwrap();
        path
    }

    const HEADER: &str = "# curio-summary v1\nseed,return,steps_to_first_goal\n";

    #[test]
    fn single_summary_aggregates_to_itself() {
        let dir = tempdir().unwrap();
        let path = write_summary(dir.path(), "a.csv", &format!("{HEADER}7,2.5,40\n"));
        let table = report(&[path]).unwrap();
        assert_eq!(table, "metric,n,q1,median,q3\nreturn,1,2.5,2.5,2.5\nsteps_to_first_goal,1,40,40,40\n");
    }

    #[test]
    fn median_is_lower_median_for_even_counts() {
        let dir = tempdir().unwrap();
        let path = write_summary(
            dir.path(),
            "a.csv",
            &format!("{HEADER}1,1,\n2,2,\n3,3,\n4,4,\n"),
        );
        let files = [parse_summary(&path).unwrap()];
        let stats = aggregate(&files).unwrap();
        let ret = &stats[0];
        assert_eq!(ret.metric, "return");
        assert_eq!(ret.median, Some(2.0));
        assert_eq!((ret.q1, ret.q3), (Some(1.0), Some(3.0)));
        let goal = &stats[1];
        assert_eq!((goal.n, goal.median), (0, None));
    }

    #[test]
    fn odd_count_median_is_the_middle_value() {
        let dir = tempdir().unwrap();
        let path =
            write_summary(dir.path(), "a.csv", &format!("{HEADER}1,3,\n2,1,\n3,2,\n"));
        let stats = aggregate(&[parse_summary(&path).unwrap()]).unwrap();
        assert_eq!(stats[0].median, Some(2.0));
    }

    #[test]
    fn mixed_columns_are_refused_by_name() {
        let dir = tempdir().unwrap();
        let a = write_summary(dir.path(), "a.csv", &format!("{HEADER}1,1,2\n"));
        let b = write_summary(
            dir.path(),
            "b.csv",
            "# curio-summary v1\nseed,return,visits_0\n1,1,2\n",
        );
        let err = report(&[a, b]).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("visits_0") && message.contains("steps_to_first_goal"),
            "unexpected message: {message}");
    }

    #[test]
    fn future_versions_are_refused() {
        let dir = tempdir().unwrap();
        let a = write_summary(dir.path(), "a.csv", "# curio-summary v2\nseed,x\n1,1\n");
        let err = report(&[a]).unwrap_err();
        assert!(matches!(err, ReportError::VersionMismatch { .. }), "{err}");
    }

    #[test]
    fn rows_pooled_across_files() {
        let dir = tempdir().unwrap();
        let a = write_summary(dir.path(), "a.csv", &format!("{HEADER}1,10,\n"));
        let b = write_summary(dir.path(), "b.csv", &format!("{HEADER}2,30,\n3,20,\n"));
        let stats = aggregate(&[parse_summary(&a).unwrap(), parse_summary(&b).unwrap()]).unwrap();
        assert_eq!(stats[0].median, Some(20.0));
        assert_eq!(stats[0].n, 3);
    }
}
