//! Exact and floating polynomial and linear algebra.

pub mod matrix;
pub mod mpoly;
pub mod roots;
pub mod scalar;
pub mod upoly;

pub use matrix::{bareiss_det, berkowitz_det, numeric_rank, Matrix};
pub use mpoly::MPoly;
pub use roots::{
    complex_roots, complex_roots_of, rational_root_near, real_roots, real_roots_exact, RealRoot,
};
pub use scalar::{ComplexScalar, RealScalar, Scalar};
pub use upoly::UPoly;

use num::traits::{One, Zero};

use crate::error::{Error, Result};
use matrix::Ring;

/// Sylvester matrix of two coefficient lists (lowest degree first, leading
/// entries nonzero). Size `(m+n) × (m+n)` for degrees `m`, `n`.
pub fn sylvester<R: Ring>(p: &[R], q: &[R]) -> Vec<Vec<R>> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![R::zero(); size];
        for (k, c) in p.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![R::zero(); size];
        for (k, c) in q.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Resultant eliminating variable `var` from two multivariate polynomials.
pub fn resultant<T: Scalar>(p: &MPoly<T>, q: &MPoly<T>, var: usize) -> Result<MPoly<T>> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::InvalidArgument(
            "resultant of a zero polynomial".into(),
        ));
    }
    let pc = p.coeffs_in(var);
    let qc = q.coeffs_in(var);
    if pc.len() == 1 && qc.len() == 1 {
        return Ok(MPoly::one());
    }
    Ok(berkowitz_det(&sylvester(&pc, &qc)))
}

/// Univariate resultant over a field.
pub fn resultant_univariate<T: Scalar>(p: &UPoly<T>, q: &UPoly<T>) -> Result<T> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::InvalidArgument(
            "resultant of a zero polynomial".into(),
        ));
    }
    let rows = sylvester(p.coeffs(), q.coeffs());
    if rows.is_empty() {
        return Ok(T::one());
    }
    Ok(Matrix::from_rows(rows).det())
}

/// Resultant of polynomials with formally prescribed degrees `dp`, `dq` in
/// the eliminated variable; leading coefficients may vanish, which keeps the
/// result a specialization of the generic resultant.
pub fn resultant_formal<T: Scalar>(p: &[T], dp: usize, q: &[T], dq: usize) -> T {
    let pad = |c: &[T], d: usize| -> Vec<T> {
        let mut v: Vec<T> = c.to_vec();
        v.resize(d + 1, T::zero());
        v
    };
    let rows = sylvester(&pad(p, dp), &pad(q, dq));
    if rows.is_empty() {
        return T::one();
    }
    Matrix::from_rows(rows).det()
}

/// Lagrange interpolation through `(xs[k], ys[k])` (distinct `xs`).
pub fn interpolate<T: Scalar>(xs: &[T], ys: &[T]) -> UPoly<T> {
    // Newton divided differences.
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (coef[i].clone() - coef[i - 1].clone()) / (xs[i].clone() - xs[i - j].clone());
        }
    }
    let mut p = UPoly::constant(coef[n - 1].clone());
    for i in (0..n - 1).rev() {
        p = &(&p * &UPoly::linear_root(xs[i].clone())) + &UPoly::constant(coef[i].clone());
    }
    p
}
