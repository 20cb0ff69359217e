use crate::error::{Error, Result};

/// Micro-data: `n` rows of `d` real coordinates, optionally labelled by class.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n: usize,
    d: usize,
    labels: Option<Vec<usize>>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values.
    pub fn new(values: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Data("dimension must be at least 1".into()));
        }
        if values.is_empty() || !values.len().is_multiple_of(d) {
            return Err(Error::Data(format!(
                "{} values cannot form rows of width {d}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite entry at row {}", pos / d + 1)));
        }
        let n = values.len() / d;
        Ok(Self { values, n, d, labels: None })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map(|r| r.len()).unwrap_or(0);
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::Dimension { expected: d, got: bad.len() });
        }
        Self::new(rows.iter().flatten().copied().collect(), d)
    }

    pub fn from_column(x: &[f64]) -> Result<Self> {
        Self::new(x.to_vec(), 1)
    }

    /// Attaches class labels (1-based).
    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: labels.len() });
        }
        if labels.contains(&0) {
            return Err(Error::Data("class labels start at 1".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.d + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    /// Splits the matrix by class label, in increasing label order.
    pub fn split_by_class(&self) -> Vec<(usize, DataMatrix)> {
        let Some(labels) = &self.labels else {
            return vec![(1, DataMatrix { labels: None, ..self.clone() })];
        };
        let mut classes: Vec<usize> = labels.clone();
        classes.sort_unstable();
        classes.dedup();
        classes
            .into_iter()
            .map(|c| {
                let values: Vec<f64> = self
                    .rows()
                    .zip(labels)
                    .filter(|(_, &l)| l == c)
                    .flat_map(|(r, _)| r.iter().copied())
                    .collect();
                let n = values.len() / self.d;
                (c, DataMatrix { values, n, d: self.d, labels: None })
            })
            .collect()
    }
}
