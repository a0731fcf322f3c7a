//! Transmit-side correlation matrices.
//!
//! Matrices are real symmetric with unit diagonal and off-diagonal entries in
//! `[0, 1)`. The spectrum is obtained with a cyclic Jacobi sweep, which is
//! accurate to a few ulps on the small orders used here (`n_T <= ~64`).

use crate::error::{invalid, Error, Result};

/// Relative gap below which two consecutive eigenvalues count as equal.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Offset used to split clustered eigenvalues, relative to the cluster value.
pub const DEGENERACY_PERTURBATION: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    /// `[R]_{i,j} = rho^{|i-j|}`.
    pub fn exponential(order: usize, rho: f64) -> Result<Self> {
        if order < 2 {
            return Err(invalid("n_T", order as f64, "at least two transmit antennas are required"));
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(invalid("rho", rho, "correlation coefficient must lie in [0, 1)"));
        }
        let mut entries = vec![0.0; order * order];
        for i in 0..order {
            for j in 0..order {
                entries[i * order + j] = rho.powi(i.abs_diff(j) as i32);
            }
        }
        Ok(Self { order, entries })
    }

    pub fn identity(order: usize) -> Result<Self> {
        Self::exponential(order, 0.0)
    }

    /// Builds a matrix from rows, checking every invariant.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        if order < 2 {
            return Err(invalid("n_T", order as f64, "at least two transmit antennas are required"));
        }
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::InvalidMatrix("matrix is not square".into()));
        }
        for i in 0..order {
            if rows[i][i] != 1.0 {
                return Err(Error::InvalidMatrix(format!("diagonal entry ({i},{i}) is not 1")));
            }
            for j in 0..order {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidMatrix(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
                if i != j && !(0.0..1.0).contains(&rows[i][j]) {
                    return Err(Error::InvalidMatrix(format!("off-diagonal entry ({i},{j}) outside [0, 1)")));
                }
            }
        }
        let m = Self {
            order,
            entries: rows.iter().flatten().copied().collect(),
        };
        let (values, _) = symmetric_eigen(&m.entries, order)?;
        if let Some(&min) = values.iter().min_by(|a, b| a.total_cmp(b)) {
            if min < -1e-12 {
                return Err(Error::InvalidMatrix(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `trace(R^2)`, i.e. the squared Frobenius norm of `R`.
    pub fn trace_of_square(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }
}

/// Eigenvalues of a covariance matrix, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    eigenvalues: Vec<f64>,
    eigenvalues_squared: Vec<f64>,
    trace: f64,
    trace_sq: f64,
    degenerate: bool,
    tol: f64,
}

impl EigenSpectrum {
    /// Builds a spectrum directly from eigenvalues (any order, all positive).
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, degeneracy_tol: f64) -> Result<Self> {
        if eigenvalues.len() < 2 {
            return Err(invalid("n_T", eigenvalues.len() as f64, "at least two eigenvalues are required"));
        }
        if let Some(&bad) = eigenvalues.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(invalid("eigenvalue", bad, "eigenvalues must be positive and finite"));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let eigenvalues_squared: Vec<f64> = eigenvalues.iter().map(|m| m * m).collect();
        let trace = eigenvalues.iter().sum();
        let trace_sq = eigenvalues_squared.iter().sum();
        let degenerate = min_relative_gap(&eigenvalues) < degeneracy_tol;
        Ok(Self {
            eigenvalues,
            eigenvalues_squared,
            trace,
            trace_sq,
            degenerate,
            tol: degeneracy_tol,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalues_squared(&self) -> &[f64] {
        &self.eigenvalues_squared
    }

    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn trace_sq(&self) -> f64 {
        self.trace_sq
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.tol
    }

    pub fn min_relative_gap(&self) -> f64 {
        min_relative_gap(&self.eigenvalues)
    }

    /// All eigenvalues coincide (within the degeneracy tolerance).
    pub fn is_scalar(&self) -> bool {
        let max = self.eigenvalues[0];
        let min = *self.eigenvalues.last().expect("non-empty");
        (max - min) / max < self.tol
    }

    /// Splits clusters of (near-)equal eigenvalues by `±1e-7 * k` relative
    /// offsets so that the hypoexponential weights are defined. Returns a
    /// clone when the spectrum is already non-degenerate.
    pub fn perturbed(&self) -> Self {
        if !self.degenerate {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.eigenvalues.len());
        let mut start = 0;
        while start < self.eigenvalues.len() {
            let mut end = start + 1;
            while end < self.eigenvalues.len()
                && (self.eigenvalues[end - 1] - self.eigenvalues[end]) / self.eigenvalues[end - 1] < self.tol
            {
                end += 1;
            }
            let len = end - start;
            let center = self.eigenvalues[start..end].iter().sum::<f64>() / len as f64;
            for k in 0..len {
                let offset = (len - 1) as f64 / 2.0 - k as f64;
                out.push(center * (1.0 + DEGENERACY_PERTURBATION * offset));
            }
            start = end;
        }
        Self::from_eigenvalues(out, self.tol).expect("perturbed eigenvalues stay positive")
    }
}

fn min_relative_gap(sorted_desc: &[f64]) -> f64 {
    sorted_desc
        .windows(2)
        .map(|w| (w[0] - w[1]) / w[0])
        .fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of `R`, sorted decreasingly, with the degeneracy flag set when
/// two consecutive eigenvalues are closer than `degeneracy_tol` (relative).
pub fn eigen_spectrum(r: &CovarianceMatrix, degeneracy_tol: f64) -> Result<EigenSpectrum> {
    let (values, _) = symmetric_eigen(&r.entries, r.order)?;
    if let Some(&bad) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidMatrix(format!("nonpositive eigenvalue {bad:e}")));
    }
    EigenSpectrum::from_eigenvalues(values, degeneracy_tol)
}

/// Symmetric square root `S = V diag(sqrt(mu)) V^T`, so that `S S = R`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSqrt {
    order: usize,
    entries: Vec<f64>,
}

impl MatrixSqrt {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

pub fn matrix_sqrt(r: &CovarianceMatrix) -> Result<MatrixSqrt> {
    let n = r.order;
    let (values, vectors) = symmetric_eigen(&r.entries, n)?;
    let mut roots = Vec::with_capacity(n);
    for &v in &values {
        if v < -1e-12 {
            return Err(Error::InvalidMatrix(format!("negative eigenvalue {v:e}; matrix is not PSD")));
        }
        roots.push(v.max(0.0).sqrt());
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let s: f64 = (0..n).map(|k| vectors[i * n + k] * roots[k] * vectors[j * n + k]).sum();
            entries[i * n + j] = s;
            entries[j * n + i] = s;
        }
    }
    Ok(MatrixSqrt { order: n, entries })
}

/// Cyclic Jacobi eigen-decomposition of a symmetric row-major matrix.
///
/// Returns `(eigenvalues, eigenvectors)` sorted by decreasing eigenvalue;
/// eigenvector `k` is column `k` of the row-major `vectors` matrix.
pub fn symmetric_eigen(matrix: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut converged = false;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "Jacobi eigensolver",
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_k, &old_k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_k] = v[i * n + old_k];
        }
    }
    Ok((values, vectors))
}
