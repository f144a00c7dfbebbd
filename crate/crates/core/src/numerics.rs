//! Complex vectors and a small dense real solver.
//!
//! Everything here is double precision. The solver is plain Gaussian
//! elimination with partial pivoting on a row-equilibrated copy of the
//! matrix, followed by one step of iterative refinement; at the sizes used
//! in this crate (n = 24) that is all the machinery needed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest admissible pivot after row equilibration.
pub const PIVOT_THRESHOLD: f64 = 1e-13;

/// Largest relative residual a returned solution may carry.
pub const RESIDUAL_BOUND: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is numerically singular (pivot {pivot:e} in column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("relative residual {0:e} exceeds bound {RESIDUAL_BOUND:e}")]
    ResidualTooLarge(f64),
}

/// A finite vector over the complex field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self, NumericsError> {
        if let Some(pos) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(NumericsError::NonFinite(pos));
        }
        Ok(Self(entries))
    }

    pub fn from_real(values: &[f64]) -> Result<Self, NumericsError> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); len])
    }

    /// Unit vector along coordinate `index` of a `len`-dimensional space.
    pub fn basis(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64, NumericsError> {
        inner_product(self, other)
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self, NumericsError> {
        check_len(self.len(), other.len())?;
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }
}

impl TryFrom<Vec<Complex64>> for ComplexVector {
    type Error = NumericsError;

    fn try_from(entries: Vec<Complex64>) -> Result<Self, Self::Error> {
        Self::new(entries)
    }
}

impl From<ComplexVector> for Vec<Complex64> {
    fn from(v: ComplexVector) -> Self {
        v.0
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, index: usize) -> &Complex64 {
        &self.0[index]
    }
}

fn check_len(left: usize, right: usize) -> Result<(), NumericsError> {
    if left == right {
        Ok(())
    } else {
        Err(NumericsError::LengthMismatch { left, right })
    }
}

/// `Σ conj(a_k) b_k`: antilinear in the first argument, linear in the second.
pub fn inner_product(a: &ComplexVector, b: &ComplexVector) -> Result<Complex64, NumericsError> {
    check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn norm(a: &ComplexVector) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NumericsError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(NumericsError::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            check_len(n_cols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::from_row_major(n_rows, n_cols, data)
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NumericsError> {
        if rows == 0 || cols == 0 {
            return Err(NumericsError::EmptyMatrix);
        }
        check_len(rows * cols, data.len())?;
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>, NumericsError> {
        check_len(self.cols, x.len())?;
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖Mx − rhs‖ / ‖rhs‖`, falling back to the absolute residual when `rhs = 0`.
pub fn relative_residual(m: &DenseMatrix, x: &[f64], rhs: &[f64]) -> Result<f64, NumericsError> {
    check_len(m.rows, rhs.len())?;
    let mx = m.mul_vec(x)?;
    let diff: Vec<f64> = mx.iter().zip(rhs).map(|(a, b)| a - b).collect();
    let scale = euclid(rhs);
    Ok(if scale > 0.0 {
        euclid(&diff) / scale
    } else {
        euclid(&diff)
    })
}

/// LU factors of a row-equilibrated square matrix.
struct Factorization {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    row_scale: Vec<f64>,
}

impl Factorization {
    fn new(m: &DenseMatrix) -> Result<Self, NumericsError> {
        let n = m.rows;
        let mut row_scale = Vec::with_capacity(n);
        let mut lu = m.data.clone();
        for r in 0..n {
            let max = m.row(r).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
            if max == 0.0 {
                return Err(NumericsError::Singular {
                    column: r,
                    pivot: 0.0,
                });
            }
            let s = 1.0 / max;
            lu[r * n..(r + 1) * n].iter_mut().for_each(|v| *v *= s);
            row_scale.push(s);
        }
        let mut perm: Vec<usize> = (0..n).collect();

        for col in 0..n {
            let (pivot_row, pivot_abs) =
                (col..n)
                    .map(|r| (r, lu[r * n + col].abs()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs < PIVOT_THRESHOLD {
                return Err(NumericsError::Singular {
                    column: col,
                    pivot: pivot_abs,
                });
            }
            if pivot_row != col {
                for c in 0..n {
                    lu.swap(col * n + c, pivot_row * n + c);
                }
                perm.swap(col, pivot_row);
            }
            let pivot = lu[col * n + col];
            for r in col + 1..n {
                let factor = lu[r * n + col] / pivot;
                lu[r * n + col] = factor;
                if factor != 0.0 {
                    for c in col + 1..n {
                        lu[r * n + c] -= factor * lu[col * n + c];
                    }
                }
            }
        }
        Ok(Self {
            n,
            lu,
            perm,
            row_scale,
        })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self
            .perm
            .iter()
            .map(|&p| rhs[p] * self.row_scale[p])
            .collect();
        for r in 1..n {
            let s: f64 = (0..r).map(|c| self.lu[r * n + c] * x[c]).sum();
            x[r] -= s;
        }
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|c| self.lu[r * n + c] * x[c]).sum();
            x[r] = (x[r] - s) / self.lu[r * n + r];
        }
        x
    }
}

/// Solves `M x = rhs` for square `M`.
///
/// The returned solution always satisfies the [`RESIDUAL_BOUND`] relative
/// residual; a solution that does not is reported as an error instead.
pub fn solve_dense_linear(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>, NumericsError> {
    if m.rows != m.cols {
        return Err(NumericsError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    check_len(m.rows, rhs.len())?;
    if let Some(pos) = rhs.iter().position(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite(pos));
    }
    let lu = Factorization::new(m)?;
    let mut x = lu.solve(rhs);

    // one refinement step
    let mx = m.mul_vec(&x)?;
    let r: Vec<f64> = rhs.iter().zip(&mx).map(|(b, a)| b - a).collect();
    let dx = lu.solve(&r);
    let refined: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
    if relative_residual(m, &refined, rhs)? <= relative_residual(m, &x, rhs)? {
        x = refined;
    }

    let res = relative_residual(m, &x, rhs)?;
    if !(res <= RESIDUAL_BOUND) {
        return Err(NumericsError::ResidualTooLarge(res));
    }
    Ok(x)
}
