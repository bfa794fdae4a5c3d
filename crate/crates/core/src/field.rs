//! Points and vector fields on the coordinate chart.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::poly::Poly;

/// A point of the chart, coordinates in chart order.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: DVector<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(coords))
    }

    pub fn from_vector(coords: DVector<f64>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinitePoint(i));
        }
        Ok(Self { coords })
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    /// `p + t * dir`, without a finiteness check.
    pub fn offset(&self, dir: &DVector<f64>, t: f64) -> Point {
        Point {
            coords: &self.coords + dir * t,
        }
    }

    pub(crate) fn expect_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(GeometryError::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            })
        }
    }
}

/// A smooth vector field that can be evaluated and differentiated along a
/// direction at a point.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, p: &Point) -> Result<DVector<f64>>;

    /// Directional derivative `dY[v]` of the components at `p`.
    fn derivative(&self, p: &Point, direction: &DVector<f64>) -> Result<DVector<f64>>;

    fn name(&self) -> String {
        "field".to_string()
    }
}

/// Constant vector field; lets pointwise vectors stand in wherever a field is
/// accepted by a tensorial operation.
impl VectorField for DVector<f64> {
    fn dim(&self) -> usize {
        self.len()
    }

    fn value(&self, _p: &Point) -> Result<DVector<f64>> {
        Ok(self.clone())
    }

    fn derivative(&self, _p: &Point, _direction: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(DVector::zeros(self.len()))
    }

    fn name(&self) -> String {
        "constant".to_string()
    }
}

/// Vector field with polynomial components of degree at most two.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldExpr {
    name: String,
    components: Vec<Poly>,
    jacobian: Vec<Vec<Poly>>,
}

impl VectorFieldExpr {
    pub const MAX_DEGREE: usize = 2;

    pub fn new(name: impl Into<String>, components: Vec<Poly>) -> Result<Self> {
        let name = name.into();
        let dim = components.len();
        if dim == 0 {
            return Err(GeometryError::InvalidField(format!(
                "{name}: no components"
            )));
        }
        for c in &components {
            if c.dim() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
            if c.degree() > Self::MAX_DEGREE {
                return Err(GeometryError::InvalidField(format!(
                    "{name}: component `{c}` has degree {} > {}",
                    c.degree(),
                    Self::MAX_DEGREE
                )));
            }
        }
        let jacobian = components.iter().map(Poly::gradient).collect();
        Ok(Self {
            name,
            components,
            jacobian,
        })
    }

    /// Constant field with the given components.
    pub fn constant(name: impl Into<String>, values: &[f64]) -> Self {
        let dim = values.len();
        let comps = values.iter().map(|&v| Poly::constant(dim, v)).collect();
        Self::new(name, comps).expect("constants have degree 0")
    }

    /// The coordinate field `d/du_index`.
    pub fn coordinate(dim: usize, index: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[index] = 1.0;
        Self::constant(crate::poly::coordinate_name(dim, index), &v)
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn scale(&self, factor: f64) -> Self {
        let comps = self.components.iter().map(|c| c.scale(factor)).collect();
        Self::new(self.name.clone(), comps).expect("scaling preserves degree")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(format!("{}+{}", self.name, other.name), comps)
    }

    /// Exact Jacobian `J[a][b] = d_b Y^a`.
    pub fn jacobian(&self, p: &Point) -> DMatrix<f64> {
        let d = self.components.len();
        let x = p.as_slice();
        DMatrix::from_fn(d, d, |a, b| self.jacobian[a][b].eval(x))
    }

    pub fn eval(&self, p: &Point) -> DVector<f64> {
        let x = p.as_slice();
        DVector::from_iterator(
            self.components.len(),
            self.components.iter().map(|c| c.eval(x)),
        )
    }
}

impl VectorField for VectorFieldExpr {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn value(&self, p: &Point) -> Result<DVector<f64>> {
        p.expect_dim(self.dim())?;
        Ok(self.eval(p))
    }

    fn derivative(&self, p: &Point, direction: &DVector<f64>) -> Result<DVector<f64>> {
        p.expect_dim(self.dim())?;
        Ok(self.jacobian(p) * direction)
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

/// Constant-coefficient combination `sum_i c_i W_i` of other fields.
#[derive(Clone)]
pub struct LinearCombination {
    terms: Vec<(f64, Arc<dyn VectorField>)>,
}

impl LinearCombination {
    pub fn new(terms: Vec<(f64, Arc<dyn VectorField>)>) -> Self {
        assert!(!terms.is_empty(), "empty linear combination");
        Self { terms }
    }
}

impl VectorField for LinearCombination {
    fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    fn value(&self, p: &Point) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(self.dim());
        for (c, f) in &self.terms {
            out += f.value(p)? * *c;
        }
        Ok(out)
    }

    fn derivative(&self, p: &Point, direction: &DVector<f64>) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(self.dim());
        for (c, f) in &self.terms {
            out += f.derivative(p, direction)? * *c;
        }
        Ok(out)
    }

    fn name(&self) -> String {
        "combination".to_string()
    }
}

/// Lie bracket `[X,Y] = dY[X] - dX[Y]` at `p`; exact for polynomial fields.
pub fn lie_bracket(x: &dyn VectorField, y: &dyn VectorField, p: &Point) -> Result<DVector<f64>> {
    let xv = x.value(p)?;
    let yv = y.value(p)?;
    Ok(y.derivative(p, &xv)? - x.derivative(p, &yv)?)
}
