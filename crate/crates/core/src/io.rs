//! JSON state files: `{"dims":[m,n],"re":[[...]],"im":[[...]]}` with
//! row-major `mn x mn` real and imaginary parts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{c, ComplexMatrix};
use crate::qcore::{DensityMatrix, Dims};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: [usize; 2],
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let n = m.nrows();
        let dims = rho.dims();
        Self {
            dims: [dims.m, dims.n],
            re: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        let [m, n] = self.dims;
        if m == 0 || n == 0 {
            return Err(Error::Parse(format!(
                "field 'dims': [{m}, {n}] has a zero entry"
            )));
        }
        let total = m * n;
        for (name, rows) in [("re", &self.re), ("im", &self.im)] {
            if rows.len() != total {
                return Err(Error::Parse(format!(
                    "field '{name}': {} rows, dims {m}x{n} need {total}",
                    rows.len()
                )));
            }
            if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != total) {
                return Err(Error::Parse(format!(
                    "field '{name}': row {i} has {} entries, expected {total}",
                    row.len()
                )));
            }
        }
        let mat = ComplexMatrix::from_fn(total, total, |i, j| c(self.re[i][j], self.im[i][j]));
        DensityMatrix::new(mat, Dims::new(m, n))
    }
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&StateFile::from_state(rho)).expect("state files always serialise")
}

pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_state()
}
