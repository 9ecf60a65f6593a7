#![allow(dead_code)]

use marv_core::{AttributeDescriptor, Dataset, FiberRecord, StudySeries};

/// A series with one column per entry of `columns[step]`, named `a0, a1, ...`.
pub fn series(columns: &[Vec<Vec<f64>>]) -> StudySeries {
    let width = columns[0].len();
    let attrs: Vec<AttributeDescriptor> = (0..width).map(|a| AttributeDescriptor::new(format!("a{a}"), "")).collect();
    let steps = columns
        .iter()
        .enumerate()
        .map(|(t, cols)| {
            let n = cols[0].len();
            let records = (0..n).map(|i| FiberRecord::new(cols.iter().map(|c| c[i]).collect())).collect();
            Dataset::new(format!("t{t}"), t as f64 * 10.0, attrs.clone(), records).unwrap()
        })
        .collect();
    StudySeries::new("test", steps).unwrap()
}

pub fn single_column(steps: &[Vec<f64>]) -> StudySeries {
    let cols: Vec<Vec<Vec<f64>>> = steps.iter().map(|v| vec![v.clone()]).collect();
    series(&cols)
}
