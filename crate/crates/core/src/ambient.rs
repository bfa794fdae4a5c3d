//! Coordinate-chart tensor calculus: metric jets, the Levi-Civita
//! connection, curvature, and sectional curvature.
//!
//! Index conventions: `Γ^a_{bc}` is stored as `[a][b][c]`, and the curvature
//! tensor `R^a_{bcd}` is arranged so that `R(X,Y)Z = R^a_{bcd} Z^b X^c Y^d`,
//! i.e. `R(X,Y) = ∇_X∇_Y - ∇_Y∇_X - ∇_[X,Y]`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::field::{Point, VectorField};
use crate::poly::Poly;

/// Step for central first differences of a metric without analytic partials.
pub const FIRST_DIFF_STEP: f64 = 1e-6;
/// Step for nested central second differences.
pub const SECOND_DIFF_STEP: f64 = 1e-4;
/// Relative determinant threshold below which a metric counts as singular.
pub const SINGULAR_DET_RATIO: f64 = 1e-12;
/// Absolute threshold on the sectional-curvature denominator.
pub const DEGENERATE_PLANE_TOL: f64 = 1e-12;

/// A semi-Riemannian metric on a chart.
pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;

    /// Number of negative eigenvalues the metric is declared to have.
    fn index(&self) -> usize;

    fn eval(&self, p: &Point) -> DMatrix<f64>;

    /// First partials `d_c g`, one matrix per coordinate.
    fn partials(&self, p: &Point) -> Vec<DMatrix<f64>> {
        central_partials(self, p, FIRST_DIFF_STEP)
    }

    /// Second partials `d_c d_e g` as `[c][e]`.
    fn second_partials(&self, p: &Point) -> Vec<Vec<DMatrix<f64>>> {
        nested_second_partials(self, p, SECOND_DIFF_STEP)
    }

    /// Whether `partials`/`second_partials` are exact.
    fn is_analytic(&self) -> bool {
        false
    }
}

pub fn central_partials<M: MetricField + ?Sized>(m: &M, p: &Point, h: f64) -> Vec<DMatrix<f64>> {
    let d = m.dim();
    (0..d)
        .map(|c| {
            let mut e = DVector::zeros(d);
            e[c] = 1.0;
            (m.eval(&p.offset(&e, h)) - m.eval(&p.offset(&e, -h))) / (2.0 * h)
        })
        .collect()
}

pub fn nested_second_partials<M: MetricField + ?Sized>(
    m: &M,
    p: &Point,
    h: f64,
) -> Vec<Vec<DMatrix<f64>>> {
    let d = m.dim();
    let unit = |i: usize| {
        let mut e = DVector::zeros(d);
        e[i] = 1.0;
        e
    };
    let mut out = vec![vec![DMatrix::zeros(d, d); d]; d];
    for c in 0..d {
        for e in c..d {
            let (ec, ee) = (unit(c), unit(e));
            let pp = m.eval(&p.offset(&ec, h).offset(&ee, h));
            let pm = m.eval(&p.offset(&ec, h).offset(&ee, -h));
            let mp = m.eval(&p.offset(&ec, -h).offset(&ee, h));
            let mm = m.eval(&p.offset(&ec, -h).offset(&ee, -h));
            let val = (pp - pm - mp + mm) / (4.0 * h * h);
            out[e][c] = val.clone();
            out[c][e] = val;
        }
    }
    out
}

/// Metric with polynomial entries; all partials are exact.
#[derive(Debug, Clone)]
pub struct PolyMetric {
    dim: usize,
    index: usize,
    entries: Vec<Poly>,
    first: Vec<Vec<Poly>>,
    second: Vec<Vec<Vec<Poly>>>,
}

impl PolyMetric {
    /// `entries` is row-major `dim x dim` and must be symmetric.
    pub fn new(dim: usize, index: usize, entries: Vec<Poly>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        for a in 0..dim {
            for b in 0..a {
                if entries[a * dim + b] != entries[b * dim + a] {
                    return Err(GeometryError::InvalidField(format!(
                        "metric entry ({a},{b}) differs from ({b},{a})"
                    )));
                }
            }
        }
        let first: Vec<Vec<Poly>> = (0..dim)
            .map(|c| entries.iter().map(|e| e.diff(c)).collect())
            .collect();
        let second = (0..dim)
            .map(|c| {
                (0..dim)
                    .map(|e| first[c].iter().map(|f| f.diff(e)).collect())
                    .collect()
            })
            .collect();
        Ok(Self {
            dim,
            index,
            entries,
            first,
            second,
        })
    }

    /// Constant metric `diag(diagonal)`.
    pub fn diagonal(diagonal: &[f64]) -> Self {
        let dim = diagonal.len();
        let mut entries = vec![Poly::zero(dim); dim * dim];
        for (i, &v) in diagonal.iter().enumerate() {
            entries[i * dim + i] = Poly::constant(dim, v);
        }
        let index = diagonal.iter().filter(|v| **v < 0.0).count();
        Self::new(dim, index, entries).expect("diagonal metric is symmetric")
    }

    pub fn entry(&self, a: usize, b: usize) -> &Poly {
        &self.entries[a * self.dim + b]
    }

    fn matrix_of(&self, polys: &[Poly], p: &Point) -> DMatrix<f64> {
        let x = p.as_slice();
        DMatrix::from_fn(self.dim, self.dim, |a, b| polys[a * self.dim + b].eval(x))
    }
}

impl MetricField for PolyMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn index(&self) -> usize {
        self.index
    }

    fn eval(&self, p: &Point) -> DMatrix<f64> {
        self.matrix_of(&self.entries, p)
    }

    fn partials(&self, p: &Point) -> Vec<DMatrix<f64>> {
        self.first.iter().map(|f| self.matrix_of(f, p)).collect()
    }

    fn second_partials(&self, p: &Point) -> Vec<Vec<DMatrix<f64>>> {
        self.second
            .iter()
            .map(|row| row.iter().map(|f| self.matrix_of(f, p)).collect())
            .collect()
    }

    fn is_analytic(&self) -> bool {
        true
    }
}

type MetricFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// Metric given by a closure; derivatives come from central differences.
#[derive(Clone)]
pub struct FnMetric {
    dim: usize,
    index: usize,
    eval: Arc<MetricFn>,
}

impl FnMetric {
    pub fn new(
        dim: usize,
        index: usize,
        eval: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            index,
            eval: Arc::new(eval),
        }
    }

    /// Finite-difference view of another metric (drops analytic partials).
    pub fn sampled(m: Arc<dyn MetricField>) -> Self {
        let (dim, index) = (m.dim(), m.index());
        Self::new(dim, index, move |x| {
            m.eval(&Point::new(x.to_vec()).expect("finite sample point"))
        })
    }
}

impl MetricField for FnMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn index(&self) -> usize {
        self.index
    }

    fn eval(&self, p: &Point) -> DMatrix<f64> {
        (self.eval)(p.as_slice())
    }
}

/// Christoffel symbols of the second kind at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    /// `Γ^a_{bc} x^b y^c`.
    pub fn contract(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |a, _| {
            let mut s = 0.0;
            for b in 0..d {
                if x[b] == 0.0 {
                    continue;
                }
                for c in 0..d {
                    s += self.get(a, b, c) * x[b] * y[c];
                }
            }
            s
        })
    }
}

/// Metric, its inverse, first partials, and connection at one point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub point: Point,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub dg: Vec<DMatrix<f64>>,
    pub gamma: Christoffel,
}

impl MetricJet {
    pub fn new(m: &dyn MetricField, p: &Point) -> Result<Self> {
        p.expect_dim(m.dim())?;
        let g = m.eval(p);
        let g_inv = checked_inverse(&g)?;
        let dg = m.partials(p);
        let gamma = christoffel_from(&g_inv, &dg);
        Ok(Self {
            point: p.clone(),
            g,
            g_inv,
            dg,
            gamma,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        (a.transpose() * &self.g * b)[(0, 0)]
    }

    /// Metric dual `g(v, .)` as a covector.
    pub fn lower(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.g * v
    }

    /// `sum_c v^c d_c g`.
    pub fn dg_along(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for (c, m) in self.dg.iter().enumerate() {
            if v[c] != 0.0 {
                out += m * v[c];
            }
        }
        out
    }

    /// `∇_v Y` at the jet's point for a field `Y`.
    pub fn cov(&self, v: &DVector<f64>, y: &dyn VectorField) -> Result<DVector<f64>> {
        let yv = y.value(&self.point)?;
        Ok(y.derivative(&self.point, v)? + self.gamma.contract(v, &yv))
    }

    /// `v(g(A,B))` given the fields' values and derivatives along `v`.
    pub fn inner_derivative(
        &self,
        v: &DVector<f64>,
        a: &DVector<f64>,
        da: &DVector<f64>,
        b: &DVector<f64>,
        db: &DVector<f64>,
    ) -> f64 {
        (a.transpose() * self.dg_along(v) * b)[(0, 0)] + self.inner(da, b) + self.inner(a, db)
    }
}

fn checked_inverse(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = g.nrows() as i32;
    let norm_inf = g
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let det = g.determinant();
    let threshold = SINGULAR_DET_RATIO * norm_inf.powi(d);
    if !det.is_finite() || det.abs() < threshold || norm_inf == 0.0 {
        return Err(GeometryError::SingularMetric { det, threshold });
    }
    g.clone()
        .try_inverse()
        .ok_or(GeometryError::SingularMetric { det, threshold })
}

fn christoffel_from(g_inv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Christoffel {
    let d = g_inv.nrows();
    // lowered symbols Γ_{dbc}
    let mut lowered = vec![0.0; d * d * d];
    for dd in 0..d {
        for b in 0..d {
            for c in 0..d {
                lowered[(dd * d + b) * d + c] =
                    0.5 * (dg[b][(dd, c)] + dg[c][(dd, b)] - dg[dd][(b, c)]);
            }
        }
    }
    let mut data = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in b..d {
                let s: f64 = (0..d)
                    .map(|k| g_inv[(a, k)] * lowered[(k * d + b) * d + c])
                    .sum();
                data[(a * d + b) * d + c] = s;
                data[(a * d + c) * d + b] = s;
            }
        }
    }
    Christoffel { dim: d, data }
}

/// Levi-Civita connection coefficients at `p`.
pub fn christoffel(m: &dyn MetricField, p: &Point) -> Result<Christoffel> {
    Ok(MetricJet::new(m, p)?.gamma)
}

/// `∇_X Y` at `p`; only the value of `X` at `p` enters.
pub fn covariant_derivative(
    m: &dyn MetricField,
    x: &dyn VectorField,
    y: &dyn VectorField,
    p: &Point,
) -> Result<DVector<f64>> {
    let jet = MetricJet::new(m, p)?;
    jet.cov(&x.value(p)?, y)
}

/// Riemann tensor `R^a_{bcd}` at a point.
#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    dim: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.dim;
        self.data[((a * n + b) * n + c) * n + d]
    }

    /// `R(X,Y)Z`.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |a, _| {
            let mut s = 0.0;
            for b in 0..n {
                if z[b] == 0.0 {
                    continue;
                }
                for c in 0..n {
                    if x[c] == 0.0 {
                        continue;
                    }
                    for d in 0..n {
                        s += self.get(a, b, c, d) * z[b] * x[c] * y[d];
                    }
                }
            }
            s
        })
    }
}

/// Curvature tensor from the metric's first and second partials.
pub fn curvature_tensor(m: &dyn MetricField, p: &Point) -> Result<CurvatureTensor> {
    let jet = MetricJet::new(m, p)?;
    let ddg = m.second_partials(p);
    let n = jet.dim();
    let g_inv = &jet.g_inv;

    // d_e g^{-1} = -g^{-1} (d_e g) g^{-1}
    let d_inv: Vec<DMatrix<f64>> = jet.dg.iter().map(|dg| -(g_inv * dg * g_inv)).collect();

    // L_{kbc} = d_b g_kc + d_c g_kb - d_k g_bc and its partials
    let lowered =
        |k: usize, b: usize, c: usize| jet.dg[b][(k, c)] + jet.dg[c][(k, b)] - jet.dg[k][(b, c)];
    let d_lowered = |e: usize, k: usize, b: usize, c: usize| {
        ddg[e][b][(k, c)] + ddg[e][c][(k, b)] - ddg[e][k][(b, c)]
    };

    // dgamma[e][a][b][c] = d_e Γ^a_{bc}
    let idx4 = |e: usize, a: usize, b: usize, c: usize| ((e * n + a) * n + b) * n + c;
    let mut dgamma = vec![0.0; n * n * n * n];
    for e in 0..n {
        for a in 0..n {
            for b in 0..n {
                for c in b..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += 0.5 * d_inv[e][(a, k)] * lowered(k, b, c)
                            + 0.5 * g_inv[(a, k)] * d_lowered(e, k, b, c);
                    }
                    dgamma[idx4(e, a, b, c)] = s;
                    dgamma[idx4(e, a, c, b)] = s;
                }
            }
        }
    }

    let gamma = &jet.gamma;
    let mut data = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut s = dgamma[idx4(c, a, d, b)] - dgamma[idx4(d, a, c, b)];
                    for e in 0..n {
                        s += gamma.get(a, c, e) * gamma.get(e, d, b)
                            - gamma.get(a, d, e) * gamma.get(e, c, b);
                    }
                    data[((a * n + b) * n + c) * n + d] = s;
                }
            }
        }
    }
    Ok(CurvatureTensor { dim: n, data })
}

/// `R(X,Y)Z` at `p`.
pub fn riemann(
    m: &dyn MetricField,
    x: &dyn VectorField,
    y: &dyn VectorField,
    z: &dyn VectorField,
    p: &Point,
) -> Result<DVector<f64>> {
    let r = curvature_tensor(m, p)?;
    Ok(r.apply(&x.value(p)?, &y.value(p)?, &z.value(p)?))
}

/// Sectional curvature of span{x, y} from a precomputed tensor.
pub fn sectional_from(
    r: &CurvatureTensor,
    g: &DMatrix<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * g * b)[(0, 0)];
    let denom = ip(x, x) * ip(y, y) - ip(x, y).powi(2);
    if denom.abs() < DEGENERATE_PLANE_TOL {
        return Err(GeometryError::DegeneratePlane(denom.abs()));
    }
    Ok(ip(&r.apply(x, y, y), x) / denom)
}

/// `K(X,Y) = g(R(X,Y)Y, X) / (g(X,X)g(Y,Y) - g(X,Y)^2)`.
pub fn sectional_curvature(
    m: &dyn MetricField,
    x: &dyn VectorField,
    y: &dyn VectorField,
    p: &Point,
) -> Result<f64> {
    let r = curvature_tensor(m, p)?;
    sectional_from(&r, &m.eval(p), &x.value(p)?, &y.value(p)?)
}

/// Numbers of (negative, positive, zero) eigenvalues of the metric at `p`.
pub fn signature(m: &dyn MetricField, p: &Point, zero_tol: f64) -> (usize, usize, usize) {
    let eig = m.eval(p).symmetric_eigen();
    eig.eigenvalues.iter().fold((0, 0, 0), |(n, pz, z), &v| {
        if v.abs() <= zero_tol {
            (n, pz, z + 1)
        } else if v < 0.0 {
            (n + 1, pz, z)
        } else {
            (n, pz + 1, z)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::VectorFieldExpr;

    /// Round metric on the unit sphere in stereographic coordinates.
    fn sphere() -> FnMetric {
        FnMetric::new(2, 0, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            let f = 4.0 / (1.0 + r2).powi(2);
            DMatrix::from_diagonal_element(2, 2, f)
        })
    }

    #[test]
    fn flat_metric_has_no_connection_or_curvature() {
        let m = PolyMetric::diagonal(&[-1.0, 1.0, 1.0]);
        let p = Point::new(vec![0.4, -0.3, 2.0]).unwrap();
        let gamma = christoffel(&m, &p).unwrap();
        assert!((0..27).all(|i| gamma.data[i] == 0.0));
        let x = DVector::from_vec(vec![1.0, 2.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 1.0]);
        assert_eq!(riemann(&m, &x, &y, &x, &p).unwrap().amax(), 0.0);
        assert_eq!(sectional_curvature(&m, &x, &y, &p).unwrap(), 0.0);
    }

    #[test]
    fn constant_field_is_parallel_in_flat_space() {
        let m = PolyMetric::diagonal(&[1.0, 1.0]);
        let p = Point::new(vec![0.1, 0.2]).unwrap();
        let x = VectorFieldExpr::coordinate(2, 0);
        let y = VectorFieldExpr::constant("Y", &[3.0, -1.0]);
        assert_eq!(covariant_derivative(&m, &x, &y, &p).unwrap().amax(), 0.0);
    }

    #[test]
    fn round_sphere_has_unit_curvature() {
        let m = sphere();
        for coords in [[0.0, 0.0], [0.3, -0.7], [1.2, 0.4]] {
            let p = Point::new(coords.to_vec()).unwrap();
            let x = DVector::from_vec(vec![1.0, 0.0]);
            let y = DVector::from_vec(vec![0.3, 1.0]);
            let k = sectional_curvature(&m, &x, &y, &p).unwrap();
            assert!((k - 1.0).abs() < 1e-6, "K = {k} at {coords:?}");
        }
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let m = PolyMetric::diagonal(&[-1.0, 1.0, 1.0]);
        let p = Point::origin(3);
        let x = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 0.0, 0.0]);
        assert!(matches!(
            sectional_curvature(&m, &x, &y, &p),
            Err(GeometryError::DegeneratePlane(_))
        ));
    }

    #[test]
    fn singular_metric_is_rejected() {
        let m = PolyMetric::diagonal(&[1.0, 0.0, 1.0]);
        assert!(matches!(
            christoffel(&m, &Point::origin(3)),
            Err(GeometryError::SingularMetric { .. })
        ));
    }

    #[test]
    fn signature_counts_negative_directions() {
        let m = PolyMetric::diagonal(&[-1.0, 1.0, -2.0, 3.0]);
        assert_eq!(signature(&m, &Point::origin(4), 1e-12), (2, 2, 0));
    }
}
