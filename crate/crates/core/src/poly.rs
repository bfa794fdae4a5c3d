//! Sparse real polynomials in the chart coordinates.
//!
//! Coordinates are ordered `(x1..xn, y1..yn, z)` for odd dimension `2n+1`;
//! other dimensions fall back to `u1..ud`. Differentiation is exact, which is
//! what lets the metric, `phi`, and polynomial vector fields be handled on the
//! analytic path.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector of a monomial, one entry per coordinate.
pub type Monomial = Vec<u8>;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Monomial, f64>,
}

/// Name of coordinate `index` in a chart of dimension `dim`.
pub fn coordinate_name(dim: usize, index: usize) -> String {
    if dim % 2 == 1 {
        let n = dim / 2;
        if index < n {
            format!("x{}", index + 1)
        } else if index < 2 * n {
            format!("y{}", index - n + 1)
        } else {
            "z".to_string()
        }
    } else {
        format!("u{}", index + 1)
    }
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], value);
        p
    }

    /// The coordinate function `index`.
    pub fn var(dim: usize, index: usize) -> Self {
        assert!(index < dim, "coordinate {index} out of range for dim {dim}");
        let mut mono = vec![0; dim];
        mono[index] = 1;
        let mut p = Self::zero(dim);
        p.add_term(mono, 1.0);
        p
    }

    /// Affine polynomial `c0 + sum_i coeffs[i] * u_i`.
    pub fn linear(constant: f64, coeffs: &[f64]) -> Self {
        let dim = coeffs.len();
        let mut p = Self::constant(dim, constant);
        for (i, &c) in coeffs.iter().enumerate() {
            p = p + Self::var(dim, i).scale(c);
        }
        p
    }

    fn add_term(&mut self, mono: Monomial, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                // exact cancellation only; tiny values are kept
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    /// Coefficient of a monomial (zero when absent).
    pub fn coefficient(&self, mono: &[u8]) -> f64 {
        self.terms.get(mono).copied().unwrap_or(0.0)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * factor);
        }
        out
    }

    pub fn eval(&self, coords: &[f64]) -> f64 {
        debug_assert_eq!(coords.len(), self.dim);
        self.terms
            .iter()
            .map(|(mono, c)| {
                let mut v = *c;
                for (x, &e) in coords.iter().zip(mono) {
                    for _ in 0..e {
                        v *= x;
                    }
                }
                v
            })
            .sum()
    }

    /// Exact partial derivative with respect to coordinate `index`.
    pub fn diff(&self, index: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (mono, c) in &self.terms {
            let e = mono[index];
            if e == 0 {
                continue;
            }
            let mut m = mono.clone();
            m[index] -= 1;
            out.add_term(m, c * e as f64);
        }
        out
    }

    /// Exact gradient as a list of partials.
    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.dim).map(|i| self.diff(i)).collect()
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), sign * c);
        }
        out
    }

    fn product(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        let mut out = Self::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        self.combine(&rhs, 1.0)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.combine(rhs, 1.0)
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self.combine(&rhs, -1.0)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.combine(rhs, -1.0)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        self.product(&rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.product(rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl fmt::Display for Poly {
    /// Canonical form: higher degree first, then chart order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&Monomial, f64)> = self.terms().collect();
        ordered.sort_by(|(ma, _), (mb, _)| {
            let da: u32 = ma.iter().map(|&e| e as u32).sum();
            let db: u32 = mb.iter().map(|&e| e as u32).sum();
            db.cmp(&da).then_with(|| mb.cmp(ma))
        });
        for (k, (mono, coeff)) in ordered.into_iter().enumerate() {
            let mut factors = Vec::new();
            for (i, &e) in mono.iter().enumerate() {
                for _ in 0..e {
                    factors.push(coordinate_name(self.dim, i));
                }
            }
            let magnitude = coeff.abs();
            let body = if factors.is_empty() {
                format!("{magnitude}")
            } else if magnitude == 1.0 {
                factors.join("*")
            } else {
                format!("{magnitude}*{}", factors.join("*"))
            };
            match (k, coeff < 0.0) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_derivative() {
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        let p = &(&x * &y) + &Poly::constant(3, 2.0);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(&[3.0, 4.0, 0.0]), 14.0);
        assert_eq!(p.diff(0), y);
        assert!(p.diff(2).is_zero());
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = Poly::var(3, 0);
        let p = &x - &x;
        assert!(p.is_zero());
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn canonical_display() {
        let d = 7;
        let p = Poly::var(d, 2).scale(2.0) - Poly::var(d, 3).scale(2.0);
        assert_eq!(p.to_string(), "2*x3 - 2*y1");
        let q = Poly::var(d, 6) * Poly::var(d, 0) - Poly::constant(d, 0.5);
        assert_eq!(q.to_string(), "x1*z - 0.5");
    }
}
