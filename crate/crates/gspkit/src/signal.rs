//! Batches of graph signals.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};

/// An `n x m` matrix whose columns are graph signals on `n` vertices.
///
/// For time series the columns are time steps. Entries must be finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    values: Array2<f64>,
}

impl SignalMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::invalid("signal matrix must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("signal matrix has non-finite entries"));
        }
        Ok(SignalMatrix { values })
    }

    /// Wraps a single signal as a one-column matrix.
    pub fn from_signal(x: &ArrayView1<f64>) -> Result<Self> {
        let col = x.to_owned().insert_axis(ndarray::Axis(1));
        SignalMatrix::new(col)
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn m(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, f64> {
        self.values.column(j)
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.values
    }

    /// Subtracts each row's mean (vertex-wise mean across columns).
    pub fn centered(&self) -> SignalMatrix {
        let m = self.m() as f64;
        let mut v = self.values.clone();
        for mut row in v.rows_mut() {
            let mean = row.sum() / m;
            row.mapv_inplace(|x| x - mean);
        }
        SignalMatrix { values: v }
    }
}

impl From<Array1<f64>> for SignalMatrix {
    fn from(x: Array1<f64>) -> Self {
        SignalMatrix { values: x.insert_axis(ndarray::Axis(1)) }
    }
}
