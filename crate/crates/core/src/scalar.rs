//! Scalar abstraction for the exact-arithmetic lanes.
//!
//! The threshold condition system, the radius inequalities and the residual
//! error coefficients are all rational functions of their integer inputs, so
//! they are implemented once over [`Scalar`] and instantiated with `f64` for
//! everyday use and [`num::BigRational`] when exact answers are required
//! (see the [`crate::Rational`] alias at the crate root).

use num_traits::{Num, Signed};

/// Field-like scalar: enough structure for Gaussian elimination and the
/// rational coefficient formulas. Implemented by `f32`/`f64` and by
/// `num::BigRational` (exact).
pub trait Scalar: Num + Signed + Clone + PartialOrd {
    fn from_u64(n: u64) -> Self;

    /// n / d as a scalar; exact for rational scalars.
    fn ratio_u64(n: u64, d: u64) -> Self {
        Self::from_u64(n) / Self::from_u64(d)
    }
}

impl Scalar for f64 {
    fn from_u64(n: u64) -> Self {
        n as f64
    }
}

impl Scalar for f32 {
    fn from_u64(n: u64) -> Self {
        n as f32
    }
}

impl Scalar for num::BigRational {
    fn from_u64(n: u64) -> Self {
        num::BigRational::from_integer(n.into())
    }
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
///
/// Pivoting selects the largest remaining |entry| per column, which is the
/// usual stability choice for floats and a harmless one for exact scalars.
pub fn solve_linear_system<S: Scalar>(
    mut a: Vec<Vec<S>>,
    mut b: Vec<S>,
) -> Option<Vec<S>> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot_row][col].is_zero() {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in (col + 1)..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / a[col][col].clone();
            for k in col..n {
                let delta = factor.clone() * a[col][k].clone();
                a[row][k] = a[row][k].clone() - delta;
            }
            let delta = factor * b[col].clone();
            b[row] = b[row].clone() - delta;
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for col in (row + 1)..n {
            acc = acc - a[row][col].clone() * x[col].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    #[test]
    fn solves_small_float_system() {
        // x + y = 3, x - y = 1 -> (2, 1)
        let a = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let x = solve_linear_system(a, vec![3.0, 1.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solves_exactly_over_rationals() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        // 2x + 3y = 1, x - y = 0 -> x = y = 1/5
        let a = vec![vec![r(2, 1), r(3, 1)], vec![r(1, 1), r(-1, 1)]];
        let x = solve_linear_system(a, vec![r(1, 1), r(0, 1)]).unwrap();
        assert_eq!(x[0], r(1, 5));
        assert_eq!(x[1], r(1, 5));
    }

    #[test]
    fn singular_system_is_none() {
        let a = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(solve_linear_system(a, vec![1.0, 2.0]).is_none());
    }
}
