//! Dense numeric encoding: one-hot nominals, mean/mode imputation and
//! standardized numeric columns.

use serde::{Deserialize, Serialize};

use super::{AttributeKind, Dataset, Value};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::usage("ragged matrix rows"));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    /// All entries in row-major order.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = T> + '_ {
        (0..self.rows).map(move |i| self.data[i * self.cols + j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    /// One-hot slot for the given nominal value index.
    OneHot(usize),
}

/// Provenance of one encoded column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSource {
    pub attribute: usize,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Per-attribute statistics learned from training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum AttributeEncoding<T> {
    Numeric {
        /// Value substituted for missing cells (raw units).
        impute: T,
        mean: T,
        /// Standard deviation; zero marks a constant column.
        scale: T,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        warning: Option<String>,
    },
    Nominal {
        width: usize,
        mode: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        warning: Option<String>,
    },
}

impl<T> AttributeEncoding<T> {
    fn width(&self) -> usize {
        match self {
            AttributeEncoding::Numeric { .. } => 1,
            AttributeEncoding::Nominal { width, .. } => *width,
        }
    }

    fn warning(&self) -> Option<&String> {
        match self {
            AttributeEncoding::Numeric { warning, .. } | AttributeEncoding::Nominal { warning, .. } => warning.as_ref(),
        }
    }
}

/// Encoding statistics, reusable on unseen instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoder<T> {
    pub attributes: Vec<AttributeEncoding<T>>,
}

impl<T: Scalar> Encoder<T> {
    /// Learns imputation and standardization statistics from `data`.
    pub fn fit(data: &Dataset) -> Encoder<T> {
        let attributes = data
            .schema()
            .attributes
            .iter()
            .enumerate()
            .map(|(j, attr)| match &attr.kind {
                AttributeKind::Numeric => fit_numeric(data.rows().iter().map(|r| r[j])),
                AttributeKind::Nominal { values } => fit_nominal(values.len(), data.rows().iter().map(|r| r[j])),
            })
            .collect();
        Encoder { attributes }
    }

    pub fn width(&self) -> usize {
        self.attributes.iter().map(AttributeEncoding::width).sum()
    }

    pub fn column_map(&self) -> Vec<ColumnSource> {
        let mut map = Vec::with_capacity(self.width());
        for (a, enc) in self.attributes.iter().enumerate() {
            let warning = enc.warning().cloned();
            match enc {
                AttributeEncoding::Numeric { .. } => map.push(ColumnSource {
                    attribute: a,
                    kind: ColumnKind::Numeric,
                    warning,
                }),
                AttributeEncoding::Nominal { width, .. } => map.extend((0..*width).map(|v| ColumnSource {
                    attribute: a,
                    kind: ColumnKind::OneHot(v),
                    warning: warning.clone(),
                })),
            }
        }
        map
    }

    /// Encodes one raw row, appending to `out`.
    pub fn encode_into(&self, row: &[Value], out: &mut Vec<T>) -> Result<()> {
        if row.len() != self.attributes.len() {
            return Err(Error::usage(format!(
                "instance has {} values, model expects {}",
                row.len(),
                self.attributes.len()
            )));
        }
        for (value, enc) in row.iter().zip(&self.attributes) {
            match (enc, value) {
                (
                    AttributeEncoding::Numeric {
                        impute, mean, scale, ..
                    },
                    v,
                ) => {
                    let x = match v {
                        Value::Numeric(x) => T::lit(*x),
                        Value::Missing => *impute,
                        Value::Nominal(_) => return Err(Error::usage("nominal value for numeric attribute")),
                    };
                    out.push(if *scale > T::zero() {
                        (x - *mean) / *scale
                    } else {
                        T::zero()
                    });
                }
                (AttributeEncoding::Nominal { width, mode, .. }, v) => {
                    let idx = match v {
                        Value::Nominal(i) if *i < *width => *i,
                        Value::Missing => *mode,
                        _ => return Err(Error::usage("value does not fit nominal attribute")),
                    };
                    out.extend((0..*width).map(|k| if k == idx { T::one() } else { T::zero() }));
                }
            }
        }
        Ok(())
    }

    pub fn encode_row(&self, row: &[Value]) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(self.width());
        self.encode_into(row, &mut out)?;
        Ok(out)
    }

    /// Applies these statistics to every row of `data`.
    pub fn transform(&self, data: &Dataset) -> Result<EncodedDataset<T>> {
        let mut buf = Vec::with_capacity(data.len() * self.width());
        for row in data.rows() {
            self.encode_into(row, &mut buf)?;
        }
        Ok(EncodedDataset {
            matrix: Matrix {
                rows: data.len(),
                cols: self.width(),
                data: buf,
            },
            column_map: self.column_map(),
            labels: data.labels().to_vec(),
            weights: data.weights().iter().map(|&w| T::lit(w)).collect(),
            n_classes: data.n_classes(),
        })
    }
}

fn fit_numeric<T: Scalar>(values: impl Iterator<Item = Value>) -> AttributeEncoding<T> {
    let mut total = 0usize;
    let mut present = Vec::new();
    for v in values {
        total += 1;
        if let Value::Numeric(x) = v {
            present.push(x);
        }
    }
    if present.is_empty() {
        return AttributeEncoding::Numeric {
            impute: T::zero(),
            mean: T::zero(),
            scale: T::zero(),
            warning: Some("all values missing".into()),
        };
    }
    let mean = present.iter().sum::<f64>() / present.len() as f64;
    // Imputed cells sit at the mean and add nothing to the sum of squares.
    let sum_sq: f64 = present.iter().map(|x| (x - mean) * (x - mean)).sum();
    let sd = (sum_sq / total as f64).sqrt();
    let tiny = 1e-12 * (1.0 + mean.abs());
    AttributeEncoding::Numeric {
        impute: T::lit(mean),
        mean: T::lit(mean),
        scale: if sd > tiny { T::lit(sd) } else { T::zero() },
        warning: None,
    }
}

fn fit_nominal<T>(width: usize, values: impl Iterator<Item = Value>) -> AttributeEncoding<T> {
    let mut counts = vec![0usize; width];
    for v in values {
        if let Value::Nominal(i) = v {
            counts[i] += 1;
        }
    }
    let mut mode = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[mode] {
            mode = i;
        }
    }
    let warning = (counts.iter().all(|&c| c == 0)).then(|| "all values missing".to_string());
    AttributeEncoding::Nominal { width, mode, warning }
}

/// Dense instance-by-column encoding of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset<T> {
    pub matrix: Matrix<T>,
    pub column_map: Vec<ColumnSource>,
    pub labels: Vec<usize>,
    pub weights: Vec<T>,
    pub n_classes: usize,
}

impl<T: Scalar> EncodedDataset<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn width(&self) -> usize {
        self.matrix.n_cols()
    }

    /// Rows drawn (with repetition) from `self`, weights reset to one.
    pub fn resample(&self, indices: &[usize]) -> EncodedDataset<T> {
        let mut data = Vec::with_capacity(indices.len() * self.width());
        for &i in indices {
            data.extend_from_slice(self.matrix.row(i));
        }
        EncodedDataset {
            matrix: Matrix {
                rows: indices.len(),
                cols: self.width(),
                data,
            },
            column_map: self.column_map.clone(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            weights: vec![T::one(); indices.len()],
            n_classes: self.n_classes,
        }
    }

    pub fn with_weights(&self, weights: Vec<T>) -> EncodedDataset<T> {
        assert_eq!(weights.len(), self.len());
        EncodedDataset {
            weights,
            ..self.clone()
        }
    }
}

/// Fits an encoder on `d` and applies it to `d`.
pub fn encode<T: Scalar>(d: &Dataset) -> EncodedDataset<T> {
    Encoder::fit(d)
        .transform(d)
        .expect("rows of a valid dataset fit its own schema")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, Schema};

    fn schema(attrs: Vec<Attribute>) -> Schema {
        Schema {
            attributes: attrs,
            class_attribute: "class".into(),
            classes: vec!["a".into(), "b".into()],
        }
    }

    #[test]
    fn one_hot_expansion() {
        let d = Dataset::new(
            schema(vec![Attribute::nominal("color", ["red", "blue", "green"])]),
            vec![vec![Value::Nominal(1)], vec![Value::Nominal(0)]],
            vec![0, 1],
        )
        .unwrap();
        let e = encode::<f64>(&d);
        assert_eq!(e.matrix.row(0), &[0.0, 1.0, 0.0]);
        assert_eq!(e.column_map.len(), 3);
        assert_eq!(e.column_map[2].kind, ColumnKind::OneHot(2));
    }

    #[test]
    fn mean_imputation_before_standardization() {
        let d = Dataset::new(
            schema(vec![Attribute::numeric("x")]),
            vec![
                vec![Value::Numeric(1.0)],
                vec![Value::Missing],
                vec![Value::Numeric(3.0)],
            ],
            vec![0, 1, 0],
        )
        .unwrap();
        let enc = Encoder::<f64>::fit(&d);
        match &enc.attributes[0] {
            AttributeEncoding::Numeric { impute, .. } => assert_eq!(*impute, 2.0),
            other => panic!("{other:?}"),
        }
        let e = enc.transform(&d).unwrap();
        assert_eq!(e.matrix.row(1), &[0.0]);
        let col: Vec<f64> = e.matrix.column(0).collect();
        let var = col.iter().map(|x| x * x).sum::<f64>() / 3.0;
        assert!((var - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_missing_column_is_zero_with_warning() {
        let d = Dataset::new(
            schema(vec![Attribute::numeric("x"), Attribute::nominal("k", ["u", "v"])]),
            vec![
                vec![Value::Missing, Value::Missing],
                vec![Value::Missing, Value::Missing],
            ],
            vec![0, 1],
        )
        .unwrap();
        let e = encode::<f64>(&d);
        assert_eq!(e.matrix.row(0), &[0.0, 1.0, 0.0]);
        assert!(e.column_map[0].warning.is_some());
        assert!(e.column_map[1].warning.is_some());
    }

    #[test]
    fn constant_column_standardizes_to_zero() {
        let d = Dataset::new(
            schema(vec![Attribute::numeric("x")]),
            vec![vec![Value::Numeric(5.0)], vec![Value::Numeric(5.0)]],
            vec![0, 1],
        )
        .unwrap();
        let e = encode::<f32>(&d);
        assert!(e.matrix.column(0).all(|x| x == 0.0));
    }

    #[test]
    fn nominal_mode_imputation_and_width_check() {
        let d = Dataset::new(
            schema(vec![Attribute::nominal("k", ["u", "v", "w"])]),
            vec![
                vec![Value::Nominal(2)],
                vec![Value::Nominal(2)],
                vec![Value::Missing],
                vec![Value::Nominal(0)],
            ],
            vec![0, 1, 0, 1],
        )
        .unwrap();
        let enc = Encoder::<f64>::fit(&d);
        assert_eq!(enc.encode_row(&[Value::Missing]).unwrap(), vec![0.0, 0.0, 1.0]);
        assert!(enc.encode_row(&[]).is_err());
        assert!(enc.encode_row(&[Value::Nominal(7)]).is_err());
    }
}
