//! Central finite-difference stencils over any linearly combinable value.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;

/// Step of the five-point stencil used along curves on a hypersurface.
pub const CURVE_STEP: f64 = 1e-3;

/// Values that can be linearly combined.
pub trait Combine: Sized {
    fn combine(terms: &[(f64, &Self)]) -> Self;
}

impl Combine for f64 {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        terms.iter().map(|(c, v)| c * **v).sum()
    }
}

impl Combine for DVector<f64> {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        let mut out = DVector::zeros(terms[0].1.len());
        for (c, v) in terms {
            out.axpy(*c, v, 1.0);
        }
        out
    }
}

impl Combine for DMatrix<f64> {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        let (r, c) = terms[0].1.shape();
        let mut out = DMatrix::zeros(r, c);
        for (k, v) in terms {
            out += *v * *k;
        }
        out
    }
}

impl<T: Combine> Combine for Vec<T> {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        (0..terms[0].1.len())
            .map(|i| {
                let column: Vec<(f64, &T)> = terms.iter().map(|(c, v)| (*c, &v[i])).collect();
                T::combine(&column)
            })
            .collect()
    }
}

/// `f'(0)` by the fourth-order stencil `(f(-2h) - 8f(-h) + 8f(h) - f(2h)) / 12h`.
pub fn five_point<T: Combine>(h: f64, mut f: impl FnMut(f64) -> Result<T>) -> Result<T> {
    let m2 = f(-2.0 * h)?;
    let m1 = f(-h)?;
    let p1 = f(h)?;
    let p2 = f(2.0 * h)?;
    let w = 1.0 / (12.0 * h);
    Ok(T::combine(&[
        (w, &m2),
        (-8.0 * w, &m1),
        (8.0 * w, &p1),
        (-w, &p2),
    ]))
}

/// `f'(0)` by `(f(h) - f(-h)) / 2h`.
pub fn three_point<T: Combine>(h: f64, mut f: impl FnMut(f64) -> Result<T>) -> Result<T> {
    let m1 = f(-h)?;
    let p1 = f(h)?;
    let w = 1.0 / (2.0 * h);
    Ok(T::combine(&[(-w, &m1), (w, &p1)]))
}
