//! Minimal dense linear algebra for small regression designs.
//!
//! Least squares goes through Householder QR rather than the normal
//! equations; the explicit normal-equations route is reserved for test
//! oracles so the two stay independent.

/// Row-major dense matrix.
#[derive(Clone, Debug)]
pub(crate) struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_columns(columns: &[Vec<f64>]) -> DenseMatrix {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut data = vec![0.0; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged design matrix");
            for (i, &v) in col.iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        DenseMatrix { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }
}

#[derive(Debug)]
pub(crate) struct LeastSquares {
    pub beta: Vec<f64>,
    /// Diagonal of (X^T X)^{-1}, from the inverse of the R factor.
    pub xtx_inv_diag: Vec<f64>,
}

/// Columns whose R pivot collapsed, i.e. they are linear combinations of
/// earlier columns.
#[derive(Debug)]
pub(crate) struct RankDeficiency {
    pub columns: Vec<usize>,
}

/// Solve min ||X beta − y|| by Householder QR.
pub(crate) fn least_squares(x: &DenseMatrix, y: &[f64]) -> Result<LeastSquares, RankDeficiency> {
    let n = x.rows;
    let k = x.cols;
    assert!(n >= k && n == y.len());

    let mut a = x.clone();
    let mut qty = y.to_vec();

    for j in 0..k {
        // Householder vector for column j below the diagonal
        let mut norm = 0.0;
        for i in j..n {
            norm += a.get(i, j) * a.get(i, j);
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue; // column already zero; pivot check below flags it
        }
        let alpha = if a.get(j, j) >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..n).map(|i| a.get(i, j)).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            // apply I - 2 v v^T / (v^T v) to the trailing columns and to qty
            for col in j..k {
                let mut dot = 0.0;
                for (off, vi) in v.iter().enumerate() {
                    dot += vi * a.get(j + off, col);
                }
                let scale = 2.0 * dot / vnorm2;
                for (off, vi) in v.iter().enumerate() {
                    let cur = a.get(j + off, col);
                    a.set(j + off, col, cur - scale * vi);
                }
            }
            let mut dot = 0.0;
            for (off, vi) in v.iter().enumerate() {
                dot += vi * qty[j + off];
            }
            let scale = 2.0 * dot / vnorm2;
            for (off, vi) in v.iter().enumerate() {
                qty[j + off] -= scale * vi;
            }
        }
        a.set(j, j, alpha);
        for i in j + 1..n {
            a.set(i, j, 0.0);
        }
    }

    // rank check on the R diagonal
    let max_diag = (0..k).map(|j| a.get(j, j).abs()).fold(0.0f64, f64::max);
    let tol = f64::EPSILON * (n.max(k) as f64) * max_diag.max(1e-300);
    let deficient: Vec<usize> = (0..k).filter(|&j| a.get(j, j).abs() <= tol).collect();
    if !deficient.is_empty() {
        return Err(RankDeficiency { columns: deficient });
    }

    // back-substitution: R beta = (Q^T y)[..k]
    let mut beta = vec![0.0; k];
    for j in (0..k).rev() {
        let mut sum = qty[j];
        for m in j + 1..k {
            sum -= a.get(j, m) * beta[m];
        }
        beta[j] = sum / a.get(j, j);
    }

    // R^{-1} (upper triangular), then diag((X^T X)^{-1}) = rows of R^{-1} squared
    let mut rinv = vec![vec![0.0; k]; k];
    for j in (0..k).rev() {
        rinv[j][j] = 1.0 / a.get(j, j);
        for i in (0..j).rev() {
            let mut sum = 0.0;
            for m in i + 1..=j {
                sum += a.get(i, m) * rinv[m][j];
            }
            rinv[i][j] = -sum / a.get(i, i);
        }
    }
    let xtx_inv_diag = (0..k)
        .map(|j| (j..k).map(|m| rinv[j][m] * rinv[j][m]).sum())
        .collect();

    Ok(LeastSquares { beta, xtx_inv_diag })
}
