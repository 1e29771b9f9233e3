//! Labelled feature tables in the `f1,f2,f3,f4,label` CSV layout.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const HEADER: [&str; 5] = ["f1", "f2", "f3", "f4", "label"];
pub const FEATURES: usize = 4;

/// Iris setosa (+1) vs. versicolor (−1), 100 rows, shipped with the crate.
pub const IRIS_BINARY_CSV: &str = include_str!("../data/iris_binary.csv");

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    pub features: Vec<Vec<T>>,
    pub labels: Vec<T>,
}

impl<T: Real> Dataset<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Rows at `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            features: idx.iter().map(|&i| self.features[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Parses CSV text. Row numbers in errors are 1-based file lines (header = 1).
pub fn parse_dataset<T: Real>(text: &str) -> Result<Dataset<T>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Ingestion {
        row: 1,
        msg: "empty file".into(),
    })?;
    let cols: Vec<&str> = header.trim_start_matches('\u{feff}').split(',').map(str::trim).collect();
    if cols != HEADER {
        return Err(Error::Ingestion {
            row: 1,
            msg: format!("expected header {:?}, got {header:?}", HEADER.join(",")),
        });
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines {
        let row = i + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != HEADER.len() {
            return Err(Error::Ingestion {
                row,
                msg: format!("expected {} cells, got {}", HEADER.len(), cells.len()),
            });
        }
        let mut vals = Vec::with_capacity(HEADER.len());
        for (name, cell) in HEADER.iter().zip(&cells) {
            let v: f64 = cell.parse().map_err(|_| Error::Ingestion {
                row,
                msg: format!("column {name}: {cell:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Ingestion {
                    row,
                    msg: format!("column {name}: non-finite value"),
                });
            }
            vals.push(v);
        }
        let label = vals[FEATURES];
        if label != 1.0 && label != -1.0 {
            return Err(Error::Ingestion {
                row,
                msg: format!("label must be -1 or 1, got {}", cells[FEATURES]),
            });
        }
        features.push(vals[..FEATURES].iter().map(|&v| T::lit(v)).collect());
        labels.push(T::lit(label));
    }
    if labels.is_empty() {
        return Err(Error::Ingestion {
            row: 2,
            msg: "no data rows".into(),
        });
    }
    Ok(Dataset { features, labels })
}

pub fn iris_binary<T: Real>() -> Dataset<T> {
    parse_dataset(IRIS_BINARY_CSV).expect("bundled dataset parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_iris() {
        let d = iris_binary::<f64>();
        assert_eq!(d.len(), 100);
        assert!(d.features.iter().all(|r| r.len() == 4));
        assert_eq!(d.labels.iter().filter(|&&l| l == 1.0).count(), 50);
        assert_eq!(d.features[0], vec![5.1, 3.5, 1.4, 0.2]);
    }

    #[test]
    fn empty_file() {
        assert!(matches!(parse_dataset::<f64>(""), Err(Error::Ingestion { row: 1, .. })));
        assert!(matches!(parse_dataset::<f64>("f1,f2,f3,f4,label\n"), Err(Error::Ingestion { .. })));
    }

    #[test]
    fn errors_name_the_row() {
        let bad_cell = "f1,f2,f3,f4,label\n1,2,3,4,1\n1,x,3,4,-1\n";
        assert!(matches!(parse_dataset::<f64>(bad_cell), Err(Error::Ingestion { row: 3, .. })));
        let bad_label = "f1,f2,f3,f4,label\n1,2,3,4,0\n";
        assert!(matches!(parse_dataset::<f64>(bad_label), Err(Error::Ingestion { row: 2, .. })));
        let bad_header = "a,b,c,d,e\n1,2,3,4,1\n";
        assert!(matches!(parse_dataset::<f64>(bad_header), Err(Error::Ingestion { row: 1, .. })));
    }

    #[test]
    fn one_row_per_class() {
        let d = parse_dataset::<f64>("f1,f2,f3,f4,label\n1,2,3,4,1\n5,6,7,8,-1\n").unwrap();
        assert_eq!(d.labels, vec![1.0, -1.0]);
    }
}
