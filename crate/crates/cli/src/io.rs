//! Dataset ingestion and serialization.
//!
//! Points format: header `id,groups,f1,...,fd`, one row per element, the
//! `groups` field holding `|`-separated labels, `.` as decimal separator.
//! Matrix format: a square numeric CSV without header plus a sidecar
//! `id,groups` file with the same row order.

use std::path::Path;

use fairdiv::{Dataset, FairnessSpec, GroupId, MetricKind};

use crate::errors::{CliError, CliResult};

pub fn read_points(path: &Path, metric: MetricKind) -> CliResult<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    {
        let headers = rdr
            .headers()
            .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        if headers.len() < 3 || &headers[0] != "id" || &headers[1] != "groups" {
            return Err(CliError::parse(format!(
                "{}: expected header id,groups,f1,... got {:?}",
                path.display(),
                headers
            )));
        }
    }

    let mut ids = Vec::new();
    let mut memberships = Vec::new();
    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        ids.push(record[0].to_string());
        memberships.push(parse_groups(&record[1], path, line)?);
        let mut coords = Vec::with_capacity(record.len() - 2);
        for field in record.iter().skip(2) {
            let v: f64 = field.parse().map_err(|_| {
                CliError::parse(format!(
                    "{}:{line}: non-numeric feature value {field:?}",
                    path.display()
                ))
            })?;
            coords.push(v);
        }
        points.push(coords);
    }

    Dataset::builder()
        .points(metric, points)
        .memberships(memberships)
        .external_ids(ids)
        .build()
        .map_err(Into::into)
}

pub fn read_matrix(matrix_path: &Path, labels_path: &Path) -> CliResult<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(matrix_path)
        .map_err(|e| CliError::parse(format!("{}: {e}", matrix_path.display())))?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record =
            record.map_err(|e| CliError::parse(format!("{}: {e}", matrix_path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(record.len());
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::parse(format!(
                    "{}:{line}: non-numeric distance {field:?}",
                    matrix_path.display()
                ))
            })?;
            row.push(v);
        }
        rows.push(row);
    }

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(labels_path)
        .map_err(|e| CliError::parse(format!("{}: {e}", labels_path.display())))?;
    let mut ids = Vec::new();
    let mut memberships = Vec::new();
    for record in rdr.records() {
        let record =
            record.map_err(|e| CliError::parse(format!("{}: {e}", labels_path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() < 2 {
            return Err(CliError::parse(format!(
                "{}:{line}: expected id,groups",
                labels_path.display()
            )));
        }
        ids.push(record[0].to_string());
        memberships.push(parse_groups(&record[1], labels_path, line)?);
    }

    Dataset::builder()
        .matrix(rows)
        .memberships(memberships)
        .external_ids(ids)
        .build()
        .map_err(Into::into)
}

fn parse_groups(field: &str, path: &Path, line: u64) -> CliResult<Vec<String>> {
    let labels: Vec<String> = field
        .split('|')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect();
    if labels.is_empty() {
        return Err(CliError::parse(format!(
            "{}:{line}: empty groups field",
            path.display()
        )));
    }
    Ok(labels)
}

/// Points dataset back to its CSV form; inverse of [`read_points`].
pub fn write_points_csv(ds: &Dataset) -> String {
    let dim = ds.point(fairdiv::ElementId(0)).map_or(0, |p| p.len());
    let mut out = String::from("id,groups");
    for i in 1..=dim {
        out.push_str(&format!(",f{i}"));
    }
    out.push('\n');
    for u in ds.element_ids() {
        let labels: Vec<&str> = ds.memberships(u).iter().map(|&g| ds.group_label(g)).collect();
        out.push_str(ds.external_id(u));
        out.push(',');
        out.push_str(&labels.join("|"));
        for c in ds.point(u).unwrap() {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
    }
    out
}

/// Matrix dataset back to its two CSV files: (matrix, labels).
pub fn write_matrix_csv(ds: &Dataset) -> (String, String) {
    let n = ds.len();
    let mut matrix = String::new();
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| format!("{}", ds.distance(fairdiv::ElementId(i), fairdiv::ElementId(j))))
            .collect();
        matrix.push_str(&row.join(","));
        matrix.push('\n');
    }
    let mut labels = String::from("id,groups\n");
    for u in ds.element_ids() {
        let ls: Vec<&str> = ds.memberships(u).iter().map(|&g| ds.group_label(g)).collect();
        labels.push_str(&format!("{},{}\n", ds.external_id(u), ls.join("|")));
    }
    (matrix, labels)
}

/// Parse `--constraints "urban=3,rural=2"`. Groups not listed get a count of
/// zero; unknown group names are rejected.
pub fn parse_constraints(text: &str, ds: &Dataset) -> CliResult<FairnessSpec> {
    let mut counts = vec![0usize; ds.num_groups()];
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (label, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::parse(format!("bad constraint {part:?}, expected name=count")))?;
        let g: GroupId = ds
            .group_by_label(label.trim())
            .ok_or_else(|| CliError::parse(format!("unknown group {:?} in constraints", label.trim())))?;
        let k: usize = value
            .trim()
            .parse()
            .map_err(|_| CliError::parse(format!("bad count {value:?} for group {label:?}")))?;
        counts[g.0] = k;
    }
    Ok(FairnessSpec::new(counts))
}
