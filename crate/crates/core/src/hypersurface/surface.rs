use nalgebra::DVector;

use crate::contact::ContactMetricStructure;
use crate::error::{GeometryError, Result};
use crate::field::Point;
use crate::poly::Poly;
use crate::report::CheckReport;

/// Convergence threshold on `|F|` for the projection onto `{F = 0}`.
pub const RETRACT_TOL: f64 = 1e-12;
pub const RETRACT_MAX_ITER: usize = 20;
/// `|dF|` below this counts as a vanishing differential.
pub const ZERO_GRADIENT_TOL: f64 = 1e-12;

/// Level set `{F = 0}` of a polynomial of degree at most two.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypersurface {
    f: Poly,
    grad: Vec<Poly>,
}

impl Hypersurface {
    pub fn new(f: Poly) -> Result<Self> {
        if f.degree() > 2 {
            return Err(GeometryError::InvalidField(format!(
                "defining function `{f}` has degree {} > 2",
                f.degree()
            )));
        }
        if f.degree() == 0 {
            return Err(GeometryError::ZeroGradient);
        }
        let grad = f.gradient();
        Ok(Self { f, grad })
    }

    pub fn defining(&self) -> &Poly {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn is_linear(&self) -> bool {
        self.f.degree() <= 1
    }

    pub fn value(&self, p: &Point) -> f64 {
        self.f.eval(p.as_slice())
    }

    /// Components of `dF` at `p`.
    pub fn differential(&self, p: &Point) -> DVector<f64> {
        let x = p.as_slice();
        DVector::from_iterator(self.dim(), self.grad.iter().map(|g| g.eval(x)))
    }

    /// Whether `v` lies in `ker dF(p)` up to a relative tolerance.
    pub fn is_tangent(&self, p: &Point, v: &DVector<f64>, tol: f64) -> bool {
        let df = self.differential(p);
        df.dot(v).abs() <= tol * df.norm().max(1.0) * v.norm().max(1.0)
    }

    /// Newton projection along the Euclidean gradient of `F`.
    ///
    /// Points already within [`RETRACT_TOL`] are returned unchanged; for
    /// affine `F` one step is exact.
    pub fn retract(&self, p: &Point) -> Result<Point> {
        p.expect_dim(self.dim())?;
        let mut q = p.clone();
        for _ in 0..=RETRACT_MAX_ITER {
            let f = self.value(&q);
            if f.abs() <= RETRACT_TOL {
                return Ok(q);
            }
            let df = self.differential(&q);
            let n2 = df.norm_squared();
            if !(n2 > ZERO_GRADIENT_TOL * ZERO_GRADIENT_TOL) {
                return Err(GeometryError::RetractionFailed(f.abs()));
            }
            q = q.offset(&df, -f / n2);
        }
        let f = self.value(&q);
        if f.abs() <= RETRACT_TOL {
            Ok(q)
        } else {
            Err(GeometryError::RetractionFailed(f.abs()))
        }
    }

    /// `t -> retract(p + t v)`, a curve on the surface with velocity `v` at 0
    /// when `v` is tangent.
    pub fn curve_point(&self, p: &Point, v: &DVector<f64>, t: f64) -> Result<Point> {
        self.retract(&p.offset(v, t))
    }
}

/// `g^{-1} dF` at `p`, spanning the normal line.
pub fn metric_gradient(
    s: &ContactMetricStructure,
    surface: &Hypersurface,
    p: &Point,
    tol: f64,
) -> Result<DVector<f64>> {
    p.expect_dim(s.dim())?;
    let f = surface.value(p);
    if f.abs() > tol {
        return Err(GeometryError::NotOnSurface(f.abs()));
    }
    raw_metric_gradient(s, surface, p)
}

/// `g^{-1} dF` without the on-surface check.
pub(crate) fn raw_metric_gradient(
    s: &ContactMetricStructure,
    surface: &Hypersurface,
    p: &Point,
) -> Result<DVector<f64>> {
    let df = surface.differential(p);
    if df.amax() < ZERO_GRADIENT_TOL {
        return Err(GeometryError::ZeroGradient);
    }
    let g = s.metric_at(p);
    g.lu().solve(&df).ok_or(GeometryError::SingularMetric {
        det: 0.0,
        threshold: 0.0,
    })
}

/// Checks `F(p) = 0`, nullness of the normal, and tangency of zeta.
pub fn verify_null_tangent(
    s: &ContactMetricStructure,
    surface: &Hypersurface,
    p: &Point,
    tol: f64,
) -> Result<CheckReport> {
    p.expect_dim(s.dim())?;
    let mut r = CheckReport::new();
    r.record("on_surface", "F(p) = 0", surface.value(p).abs(), tol);
    let grad = raw_metric_gradient(s, surface, p)?;
    let g = s.metric_at(p);
    r.record(
        "null_normal",
        "g(grad F, grad F) = 0",
        (grad.transpose() * &g * &grad)[(0, 0)].abs(),
        tol,
    );
    r.record(
        "zeta_tangent",
        "dF(zeta) = 0",
        surface.differential(p).dot(&s.zeta_at(p)).abs(),
        tol,
    );
    Ok(r)
}
