//! Small dense complex linear algebra: LU with partial pivoting, two-sided
//! equilibration and iterative refinement.

use alloc::vec;
use alloc::vec::Vec;

use crate::C64;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        libm::sqrt(self.row(i).iter().map(|c| c.norm_sqr()).sum())
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization `PA = LU` of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when a pivot is exactly zero or not finite.
    pub fn factor(a: &Matrix) -> Option<Lu> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| lu[(x, k)].norm().total_cmp(&lu[(y, k)].norm()))
                .unwrap_or(k);
            let pivot = lu[(p, k)];
            if pivot.norm() == 0.0 || !pivot.norm().is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / lu[(k, k)];
                lu[(i, k)] = f;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Some(Lu { lu, perm })
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.lu.rows;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            e[j] = C64::new(1.0, 0.0);
            for (i, v) in self.solve_vec(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }
}

/// Outcome of [`solve_refined`].
#[derive(Debug, Clone)]
pub struct RefinedSolution {
    pub x: Matrix,
    /// 1-norm condition number of the equilibrated matrix.
    pub condition: f64,
    /// Largest normwise backward error over the right-hand sides.
    pub backward_error: f64,
}

/// Solve `A X = B` for every column of `B`.
///
/// Rows and then columns are scaled to unit max-magnitude before factoring;
/// the solution is then polished by `rounds` steps of iterative refinement.
/// On failure returns the condition estimate (infinite when a pivot vanished).
pub fn solve_refined(a: &Matrix, b: &Matrix, rounds: usize) -> Result<RefinedSolution, f64> {
    let n = a.rows;
    assert_eq!(n, a.cols, "system must be square");
    assert_eq!(n, b.rows, "right-hand side has wrong height");
    let mut s = a.clone();
    let mut rhs = b.clone();
    for i in 0..n {
        let m = s.row(i).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if m == 0.0 {
            return Err(f64::INFINITY);
        }
        for j in 0..n {
            s[(i, j)] /= m;
        }
        for j in 0..rhs.cols {
            rhs[(i, j)] /= m;
        }
    }
    let mut col_scale = vec![0.0; n];
    for (j, cs) in col_scale.iter_mut().enumerate() {
        *cs = (0..n).map(|i| s[(i, j)].norm()).fold(0.0, f64::max);
        if *cs == 0.0 {
            return Err(f64::INFINITY);
        }
        for i in 0..n {
            s[(i, j)] /= *cs;
        }
    }
    let lu = Lu::factor(&s).ok_or(f64::INFINITY)?;
    let condition = s.norm1() * lu.inverse().norm1();
    if !condition.is_finite() {
        return Err(condition);
    }

    let mut y = Matrix::zeros(n, rhs.cols);
    let mut col = vec![C64::new(0.0, 0.0); n];
    for c in 0..rhs.cols {
        for i in 0..n {
            col[i] = rhs[(i, c)];
        }
        let mut sol = lu.solve_vec(&col);
        for _ in 0..rounds {
            let r: Vec<C64> = (0..n)
                .map(|i| col[i] - (0..n).map(|j| s[(i, j)] * sol[j]).sum::<C64>())
                .collect();
            if r.iter().all(|v| v.norm() == 0.0) {
                break;
            }
            let d = lu.solve_vec(&r);
            for (xi, di) in sol.iter_mut().zip(d) {
                *xi += di;
            }
        }
        for i in 0..n {
            y[(i, c)] = sol[i];
        }
    }

    // normwise: ‖b − Ay‖∞ / (‖A‖∞‖y‖∞ + ‖b‖∞) for each right-hand side
    let a_inf = (0..n).map(|i| s.row(i).iter().map(|c| c.norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut backward_error: f64 = 0.0;
    for c in 0..rhs.cols {
        let mut r_inf: f64 = 0.0;
        let mut y_inf: f64 = 0.0;
        let mut b_inf: f64 = 0.0;
        for i in 0..n {
            let mut r = rhs[(i, c)];
            for j in 0..n {
                r -= s[(i, j)] * y[(j, c)];
            }
            r_inf = r_inf.max(r.norm());
            y_inf = y_inf.max(y[(i, c)].norm());
            b_inf = b_inf.max(rhs[(i, c)].norm());
        }
        let mag = a_inf * y_inf + b_inf;
        if mag > 0.0 {
            backward_error = backward_error.max(r_inf / mag);
        }
    }

    let x = Matrix::from_fn(n, rhs.cols, |i, c| y[(i, c)] / col_scale[i]);
    Ok(RefinedSolution { x, condition, backward_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn solves_small_system() {
        let a = Matrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => c(2.0, 1.0),
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(1.0, 0.0),
            (1, 2) => c(3.0, 0.0),
            (2, 1) => c(0.5, 0.5),
            (2, 2) => c(-1.0, 0.0),
            _ => c(0.0, 0.0),
        });
        let x_true = Matrix::from_fn(3, 2, |i, j| c(i as f64 + 1.0, j as f64 - i as f64));
        let b = a.matmul(&x_true);
        let sol = solve_refined(&a, &b, 3).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert!((sol.x[(i, j)] - x_true[(i, j)]).norm() < 1e-14);
            }
        }
        assert!(sol.backward_error < 1e-15);
        assert!(sol.condition >= 1.0);
    }

    #[test]
    fn badly_scaled_system_recovers() {
        // the scales differ by 30 orders of magnitude
        let a = Matrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(1e-20, 0.0),
            (0, 1) => c(1e-20, 1e-20),
            (1, 0) => c(0.0, 1e10),
            _ => c(-1e10, 0.0),
        });
        let x_true = Matrix::from_fn(2, 1, |i, _| c(1.0, i as f64));
        let sol = solve_refined(&a, &a.matmul(&x_true), 2).unwrap();
        assert!((sol.x[(1, 0)] - c(1.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_reported() {
        let a = Matrix::from_fn(2, 2, |_, _| c(1.0, 0.0));
        assert!(solve_refined(&a, &Matrix::zeros(2, 1), 1).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = Matrix::from_fn(4, 4, |i, j| c((i * 4 + j) as f64 % 5.0 + 0.3, (i as f64) - (j as f64)));
        let inv = Lu::factor(&a).unwrap().inverse();
        let e = a.matmul(&inv);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((e[(i, j)] - c(want, 0.0)).norm() < 1e-13);
            }
        }
    }
}
