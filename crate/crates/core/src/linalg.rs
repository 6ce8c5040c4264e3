//! Small dense matrices: exponential, Perron root, linear solves.
//!
//! Sizes here are the component count of a reaction system (2 or 3), so
//! everything is plain row-major `Vec` storage.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, PartialEq)]
pub struct Matrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::config("matrix rows must be non-empty and of equal length"));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    /// Induced 1-norm (max column sum).
    pub fn norm1(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn min_diag(&self) -> T {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .fold(T::infinity(), T::min)
    }

    pub fn max_diag(&self) -> T {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .fold(T::neg_infinity(), T::max)
    }

    /// Smallest off-diagonal entry (`+inf` for 1x1).
    pub fn min_off_diag(&self) -> T {
        let mut m = T::infinity();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    m = m.min(self[(i, j)]);
                }
            }
        }
        m
    }

    /// Irreducibility of the nonnegative pattern of the off-diagonal part
    /// (strong connectivity of the directed graph `i -> j` when `a_ij > 0`).
    pub fn is_irreducible(&self) -> bool {
        let n = self.rows;
        if n == 1 {
            return true;
        }
        let reach = |transpose: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    let a = if transpose { self[(j, i)] } else { self[(i, j)] };
                    if i != j && a > T::zero() && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(false) && reach(true)
    }

    /// Solves `self * x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if !self.is_square() || b.len() != self.rows {
            return Err(Error::config("solve needs a square system"));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[(i, col)].abs().partial_cmp(&a[(j, col)].abs()).unwrap())
                .unwrap();
            if a[(piv, col)].abs() <= T::min_positive_value() {
                return Err(Error::numeric("singular matrix"));
            }
            if piv != col {
                for j in 0..n {
                    let tmp = a[(col, j)];
                    a[(col, j)] = a[(piv, j)];
                    a[(piv, j)] = tmp;
                }
                x.swap(col, piv);
            }
            for i in col + 1..n {
                let f = a[(i, col)] / a[(col, col)];
                for j in col..n {
                    let v = a[(col, j)];
                    a[(i, j)] = a[(i, j)] - f * v;
                }
                x[i] = x[i] - f * x[col];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - a[(i, j)] * x[j];
            }
            x[i] = s / a[(i, i)];
        }
        Ok(x)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.cols.max(1))).finish()
    }
}

/// `exp(A)` by scaling and squaring with a Taylor series on the scaled matrix.
pub fn matrix_exp<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(Error::config(format!(
            "matrix_exp needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::numeric("matrix_exp input has non-finite entries"));
    }
    let n = a.rows();
    let norm = a.norm1();
    // scale so that ||A / 2^s|| <= 1/2
    let mut s = 0i32;
    if norm > T::lit(0.5) {
        s = (norm / T::lit(0.5)).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let scaled = a.scale(T::lit(2.0).powi(-s));
    let mut result = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=40 {
        term = (&term * &scaled).scale(T::one() / T::from_count(k));
        result = &result + &term;
        if term.norm1() <= T::epsilon() * result.norm1() {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    Ok(result)
}

/// Principal eigenpair of a nonnegative irreducible matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronPair<T = f64> {
    pub rho: T,
    /// Strictly positive eigenvector with `max_i v_i = 1`.
    pub vector: Vec<T>,
    pub iterations: usize,
}

/// Power iteration on `P + I` (primitive whenever `P` is irreducible), stopped
/// when `||P v - rho v||_inf < 1e-12 rho`.
pub fn perron<T: Real>(p: &Matrix<T>) -> Result<PerronPair<T>> {
    if !p.is_square() {
        return Err(Error::config("perron needs a square matrix"));
    }
    let n = p.rows();
    for i in 0..n {
        for j in 0..n {
            if !(p[(i, j)] >= T::zero()) {
                return Err(Error::config(format!(
                    "perron needs a nonnegative matrix, entry ({i},{j}) = {}",
                    p[(i, j)]
                )));
            }
        }
    }
    if p.norm1() == T::zero() {
        return Err(Error::numeric("perron: zero matrix has no positive eigenvalue"));
    }
    // Rescale so the shift by I is comparable in size to P.
    let scale = p.norm1();
    let ps = p.scale(T::one() / scale);
    let shifted = &ps + &Matrix::identity(n);
    let tol = T::tol_floor(1e-12);
    let mut v = vec![T::one(); n];
    for it in 1..=100_000 {
        let w = shifted.mul_vec(&v);
        let wmax = w.iter().copied().fold(T::zero(), T::max);
        if !(wmax > T::zero()) || !wmax.is_finite() {
            return Err(Error::numeric("perron: iteration collapsed"));
        }
        v = w.into_iter().map(|x| x / wmax).collect();
        let pv = ps.mul_vec(&v);
        let rho = pv.iter().copied().fold(T::zero(), T::max);
        let resid = pv
            .iter()
            .zip(&v)
            .fold(T::zero(), |m, (a, b)| m.max((*a - rho * *b).abs()));
        if resid <= tol * rho {
            return Ok(PerronPair {
                rho: rho * scale,
                vector: v,
                iterations: it,
            });
        }
    }
    Err(Error::numeric("perron: no convergence in 1e5 iterations"))
}

/// Stability modulus `s(A)` of a cooperative irreducible matrix, via the
/// Perron root of `A + sigma I >= 0`.
pub fn stability_modulus<T: Real>(a: &Matrix<T>) -> Result<T> {
    if a.rows() == 1 {
        return Ok(a[(0, 0)]);
    }
    if a.min_off_diag() < T::zero() {
        return Err(Error::config("stability_modulus needs a cooperative matrix"));
    }
    let sigma = T::one() + (-a.min_diag()).max(T::zero());
    let shifted = a + &Matrix::identity(a.rows()).scale(sigma);
    Ok(perron(&shifted)?.rho - sigma)
}

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
/// `lower[0]` and `upper[n-1]` are ignored. The solution overwrites `rhs`.
pub fn solve_tridiagonal<T: Real>(
    lower: &[T],
    diag: &[T],
    upper: &[T],
    rhs: &mut [T],
    scratch: &mut Vec<T>,
) -> Result<()> {
    let n = rhs.len();
    scratch.clear();
    scratch.resize(n, T::zero());
    let mut beta = diag[0];
    if beta == T::zero() {
        return Err(Error::numeric("tridiagonal solve: zero pivot"));
    }
    rhs[0] = rhs[0] / beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        if beta == T::zero() {
            return Err(Error::numeric("tridiagonal solve: zero pivot"));
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] - scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Plain power series summed until terms vanish; independent of scaling.
    fn exp_series_oracle(a: &Matrix) -> Matrix {
        let n = a.rows();
        let mut sum = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for k in 1..200 {
            term = (&term * a).scale(1.0 / k as f64);
            sum = &sum + &term;
        }
        sum
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        let z = Matrix::<f64>::zeros(3, 3);
        assert_eq!(matrix_exp(&z).unwrap(), Matrix::identity(3));
        let d = Matrix::from_diag(&[1.0, 2.0]);
        let e = matrix_exp(&d).unwrap();
        assert!((e[(0, 0)] - E).abs() < 1e-12 * E);
        assert!((e[(1, 1)] - E * E).abs() < 1e-12 * E * E);
        assert_eq!(e[(0, 1)], 0.0);
    }

    #[test]
    fn exp_of_swap_matrix_is_cosh_sinh() {
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = matrix_exp(&a).unwrap();
        let oracle = exp_series_oracle(&a);
        assert!(e.max_abs_diff(&oracle) < 1e-12 * 1.6);
        assert!((e[(0, 0)] - 1.5430806348152437).abs() < 1e-12);
        assert!((e[(0, 1)] - 1.1752011936438014).abs() < 1e-12);
    }

    #[test]
    fn exp_matches_series_on_larger_norm() {
        let a = m(&[&[-1.0, 2.0, 0.5], &[2.0, -1.0, 0.0], &[0.3, 0.1, 1.5]]);
        let e = matrix_exp(&a).unwrap();
        let oracle = exp_series_oracle(&a);
        let rel = e.max_abs_diff(&oracle) / oracle.norm1();
        assert!(rel < 1e-12, "rel = {rel}");
    }

    #[test]
    fn exp_rejects_non_square() {
        assert!(matrix_exp(&Matrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn perron_examples() {
        let p = perron(&m(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert!((p.rho - 3.0).abs() < 1e-12);
        assert!((p.vector[0] - 1.0).abs() < 1e-12 && (p.vector[1] - 1.0).abs() < 1e-12);
        assert!((perron(&Matrix::<f64>::identity(3)).unwrap().rho - 1.0).abs() < 1e-14);
        let ea = matrix_exp(&m(&[&[-1.0, 2.0], &[2.0, -1.0]])).unwrap();
        assert!((perron(&ea).unwrap().rho - E).abs() < 1e-12 * E);
    }

    #[test]
    fn perron_handles_periodic_pattern() {
        // [[0,1],[1,0]] is irreducible but not primitive
        let p = perron(&m(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((p.rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perron_errors() {
        assert!(perron(&Matrix::<f64>::zeros(2, 2)).is_err());
        assert!(perron(&m(&[&[1.0, -1.0], &[1.0, 1.0]])).is_err());
    }

    #[test]
    fn perron_bounds_by_row_sums() {
        let p = m(&[&[0.5, 2.0, 0.1], &[1.0, 0.2, 0.3], &[0.7, 0.0, 1.1]]);
        let pair = perron(&p).unwrap();
        let sums: Vec<f64> = (0..3).map(|i| (0..3).map(|j| p[(i, j)]).sum()).collect();
        let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = sums.iter().copied().fold(0.0, f64::max);
        assert!(pair.rho >= lo - 1e-12 && pair.rho <= hi + 1e-12);
        let pv = p.mul_vec(&pair.vector);
        for (a, b) in pv.iter().zip(&pair.vector) {
            assert!((a - pair.rho * b).abs() < 1e-12 * pair.rho);
            assert!(*b > 0.0);
        }
    }

    #[test]
    fn stability_modulus_of_pair() {
        let a = m(&[&[-1.0, 2.0], &[2.0, -1.0]]);
        assert!((stability_modulus(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn irreducibility() {
        assert!(m(&[&[0.0, 1.0], &[1.0, 0.0]]).is_irreducible());
        assert!(!m(&[&[1.0, 0.0], &[1.0, 1.0]]).is_irreducible());
    }

    #[test]
    fn gaussian_solve() {
        let a = m(&[&[4.0, 1.0], &[2.0, 3.0]]);
        let x = a.solve(&[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn thomas_matches_dense_solve() {
        let n = 6;
        let lower = vec![0.0, -1.0, -1.0, -0.5, -1.0, -2.0];
        let diag = vec![4.0, 4.0, 5.0, 4.0, 4.0, 4.0];
        let upper = vec![-2.0, -1.0, -1.0, -1.5, -1.0, 0.0];
        let mut dense = Matrix::zeros(n, n);
        for i in 0..n {
            dense[(i, i)] = diag[i];
            if i > 0 {
                dense[(i, i - 1)] = lower[i];
            }
            if i + 1 < n {
                dense[(i, i + 1)] = upper[i];
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 1.0).collect();
        let want = dense.solve(&b).unwrap();
        let mut got = b.clone();
        solve_tridiagonal(&lower, &diag, &upper, &mut got, &mut Vec::new()).unwrap();
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn works_in_f32() {
        let a = Matrix::<f32>::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = matrix_exp(&a).unwrap();
        assert!((e[(0, 0)] - 1.543_080_6).abs() < 1e-5);
        let p = perron(&e).unwrap();
        assert!((p.rho - std::f32::consts::E).abs() < 1e-4);
    }
}
