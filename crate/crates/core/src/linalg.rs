//! Small dense real systems.

use crate::scalar::Real;

/// LU factorisation with partial pivoting of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    lu: Vec<Vec<T>>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    /// `None` when a pivot vanishes exactly.
    #[allow(clippy::needless_range_loop)]
    pub fn factor(a: &[Vec<T>]) -> Option<Self> {
        let n = a.len();
        assert!(a.iter().all(|row| row.len() == n), "matrix must be square");
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let p = (col..n)
                .max_by(|&x, &y| lu[x][col].abs().partial_cmp(&lu[y][col].abs()).unwrap())
                .unwrap();
            if lu[p][col].is_zero() {
                return None;
            }
            lu.swap(col, p);
            perm.swap(col, p);
            let inv = lu[col][col].recip_exact();
            for r in (col + 1)..n {
                let f = lu[r][col] * inv;
                lu[r][col] = f;
                for c in (col + 1)..n {
                    let t = lu[col][c];
                    lu[r][c] = lu[r][c] - f * t;
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.len();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                let t = self.lu[r][c] * x[c];
                x[r] = x[r] - t;
            }
        }
        for r in (0..n).rev() {
            for c in (r + 1)..n {
                let t = self.lu[r][c] * x[c];
                x[r] = x[r] - t;
            }
            x[r] = x[r] * self.lu[r][r].recip_exact();
        }
        x
    }

    pub fn inverse(&self) -> Vec<Vec<T>> {
        let n = self.lu.len();
        let cols: Vec<Vec<T>> = (0..n)
            .map(|j| {
                let e: Vec<T> = (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect();
                self.solve(&e)
            })
            .collect();
        (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
    }
}

/// Maximum absolute column sum.
pub fn norm1<T: Real>(a: &[Vec<T>]) -> T {
    let n = a.first().map_or(0, Vec::len);
    (0..n)
        .map(|c| a.iter().fold(T::zero(), |s, row| s + row[c].abs()))
        .fold(T::zero(), T::max)
}

/// `||A||_1 ||A^{-1}||_1`; infinite for a singular matrix.
pub fn condition1<T: Real>(a: &[Vec<T>]) -> f64 {
    match Lu::factor(a) {
        Some(lu) => (norm1(a) * norm1(&lu.inverse())).as_f64(),
        None => f64::INFINITY,
    }
}

pub fn matvec<T: Real>(a: &[Vec<T>], x: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(T::zero(), |s, (a, b)| s + *a * *b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::TwoFloat;

    #[test]
    fn solves_permuted_system() {
        let a = vec![vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 1.0], vec![4.0, 0.0, -1.0]];
        let lu = Lu::factor(&a).unwrap();
        let x = lu.solve(&[3.0, 3.0, 3.0]);
        let b = matvec(&a, &x);
        for v in b {
            assert!((v - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_has_infinite_condition() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(Lu::factor(&a).is_none());
        assert!(condition1(&a).is_infinite());
    }

    #[test]
    fn hilbert_in_double_double() {
        let n = 8;
        let h: Vec<Vec<TwoFloat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| TwoFloat::from((i + j + 1) as f64).recip_exact())
                    .collect()
            })
            .collect();
        let ones = vec![TwoFloat::from(1.0); n];
        let b = matvec(&h, &ones);
        let x = Lu::factor(&h).unwrap().solve(&b);
        for v in x {
            assert!((v - TwoFloat::from(1.0)).abs().as_f64() < 1e-18);
        }
        assert!(condition1(&h) > 1e9);
    }
}
