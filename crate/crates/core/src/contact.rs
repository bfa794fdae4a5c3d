//! Almost contact metric structures on a chart, the standard indefinite
//! Sasakian structure, and its curvature.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ambient::{
    curvature_tensor, sectional_from, CurvatureTensor, MetricField, MetricJet, PolyMetric,
};
use crate::error::{GeometryError, Result};
use crate::field::{Point, VectorField, VectorFieldExpr};
use crate::poly::Poly;
use crate::report::CheckReport;

/// Space-form coefficients below this are considered unusable for solving c.
pub const SPACE_FORM_COEFF_MIN: f64 = 1e-6;

/// `(phi, zeta, eta, g)` on a chart of dimension `2n+1`.
///
/// `phi` is stored row-major as polynomials; column `b` is `phi(d_b)`.
#[derive(Clone)]
pub struct ContactMetricStructure {
    n: usize,
    q: usize,
    metric: Arc<dyn MetricField>,
    phi: Vec<Poly>,
    phi_partials: Vec<Vec<Poly>>,
    zeta: VectorFieldExpr,
    eta: Vec<Poly>,
}

impl std::fmt::Debug for ContactMetricStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContactMetricStructure")
            .field("n", &self.n)
            .field("q", &self.q)
            .field("zeta", &self.zeta)
            .finish_non_exhaustive()
    }
}

/// Sign of the metric on the `i`-th `(x^i, y^i)` block, `i` zero-based.
pub fn block_sign(q: usize, i: usize) -> f64 {
    if i < q / 2 {
        -1.0
    } else {
        1.0
    }
}

impl ContactMetricStructure {
    /// Assembles a structure without checking any axiom; use
    /// [`verify_almost_contact`] and [`verify_sasakian`] to test it.
    pub fn new(
        n: usize,
        q: usize,
        metric: Arc<dyn MetricField>,
        phi: Vec<Poly>,
        zeta: VectorFieldExpr,
        eta: Vec<Poly>,
    ) -> Result<Self> {
        let dim = 2 * n + 1;
        for (expected, found) in [
            (dim, metric.dim()),
            (dim * dim, phi.len()),
            (dim, zeta.dim()),
            (dim, eta.len()),
        ] {
            if expected != found {
                return Err(GeometryError::DimensionMismatch { expected, found });
            }
        }
        let phi_partials = (0..dim)
            .map(|c| phi.iter().map(|e| e.diff(c)).collect())
            .collect();
        Ok(Self {
            n,
            q,
            metric,
            phi,
            phi_partials,
            zeta,
            eta,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn metric(&self) -> &Arc<dyn MetricField> {
        &self.metric
    }

    pub fn zeta(&self) -> &VectorFieldExpr {
        &self.zeta
    }

    pub fn phi_polys(&self) -> &[Poly] {
        &self.phi
    }

    pub fn eta_polys(&self) -> &[Poly] {
        &self.eta
    }

    /// Same structure with another `phi`.
    pub fn with_phi(&self, phi: Vec<Poly>) -> Result<Self> {
        Self::new(
            self.n,
            self.q,
            self.metric.clone(),
            phi,
            self.zeta.clone(),
            self.eta.clone(),
        )
    }

    /// Same structure with another metric.
    pub fn with_metric(&self, metric: Arc<dyn MetricField>) -> Result<Self> {
        Self::new(
            self.n,
            self.q,
            metric,
            self.phi.clone(),
            self.zeta.clone(),
            self.eta.clone(),
        )
    }

    fn poly_matrix(&self, polys: &[Poly], p: &Point) -> DMatrix<f64> {
        let d = self.dim();
        let x = p.as_slice();
        DMatrix::from_fn(d, d, |a, b| polys[a * d + b].eval(x))
    }

    pub fn phi_at(&self, p: &Point) -> DMatrix<f64> {
        self.poly_matrix(&self.phi, p)
    }

    /// `sum_c v^c d_c phi` at `p`.
    pub fn phi_derivative(&self, p: &Point, v: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for (c, polys) in self.phi_partials.iter().enumerate() {
            if v[c] != 0.0 {
                out += self.poly_matrix(polys, p) * v[c];
            }
        }
        out
    }

    pub fn eta_at(&self, p: &Point) -> DVector<f64> {
        let x = p.as_slice();
        DVector::from_iterator(self.dim(), self.eta.iter().map(|e| e.eval(x)))
    }

    pub fn zeta_at(&self, p: &Point) -> DVector<f64> {
        self.zeta.eval(p)
    }

    pub fn metric_at(&self, p: &Point) -> DMatrix<f64> {
        self.metric.eval(p)
    }

    pub fn jet(&self, p: &Point) -> Result<MetricJet> {
        MetricJet::new(self.metric.as_ref(), p)
    }

    /// `Omega(X,Y) = g(X, phi Y)`.
    pub fn fundamental_form(&self, p: &Point, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * self.metric_at(p) * self.phi_at(p) * y)[(0, 0)]
    }

    /// The field `phi(W)` as a vector field.
    pub fn phi_of(self: &Arc<Self>, w: Arc<dyn VectorField>) -> PhiField {
        PhiField {
            structure: self.clone(),
            inner: w,
            factor: 1.0,
        }
    }
}

/// The field `factor * phi(W)`.
#[derive(Clone)]
pub struct PhiField {
    structure: Arc<ContactMetricStructure>,
    inner: Arc<dyn VectorField>,
    factor: f64,
}

impl PhiField {
    pub fn scaled(mut self, factor: f64) -> Self {
        self.factor *= factor;
        self
    }
}

impl VectorField for PhiField {
    fn dim(&self) -> usize {
        self.structure.dim()
    }

    fn value(&self, p: &Point) -> Result<DVector<f64>> {
        Ok(self.structure.phi_at(p) * self.inner.value(p)? * self.factor)
    }

    fn derivative(&self, p: &Point, direction: &DVector<f64>) -> Result<DVector<f64>> {
        let w = self.inner.value(p)?;
        let dw = self.inner.derivative(p, direction)?;
        Ok(
            (self.structure.phi_derivative(p, direction) * w + self.structure.phi_at(p) * dw)
                * self.factor,
        )
    }

    fn name(&self) -> String {
        format!("phi({})", self.inner.name())
    }
}

/// Standard Sasakian structure on `R^{2n+1}_q`:
/// `eta = (dz - sum y^i dx^i)/2`, `zeta = 2 d_z`,
/// `g = eta (x) eta + (1/4) sum e_i (dx^i dx^i + dy^i dy^i)` with `e_i = -1`
/// for the first `q/2` blocks, and
/// `phi d_{x^i} = -e_i d_{y^i}`, `phi d_{y^i} = e_i (d_{x^i} + y^i d_z)`, `phi d_z = 0`.
pub fn standard_sasakian(n: usize, q: usize) -> Result<ContactMetricStructure> {
    if n < 2 || !q.is_multiple_of(2) || q < 2 || q > 2 * n - 2 {
        return Err(GeometryError::BadSignature { n, q });
    }
    let dim = 2 * n + 1;
    let (xi, yi, z) = (|i: usize| i, |i: usize| n + i, 2 * n);

    let mut eta = vec![Poly::zero(dim); dim];
    for i in 0..n {
        eta[xi(i)] = Poly::var(dim, yi(i)).scale(-0.5);
    }
    eta[z] = Poly::constant(dim, 0.5);

    let mut g = vec![Poly::zero(dim); dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            g[a * dim + b] = &eta[a] * &eta[b];
        }
    }
    for i in 0..n {
        let e = Poly::constant(dim, 0.25 * block_sign(q, i));
        for k in [xi(i), yi(i)] {
            g[k * dim + k] = &g[k * dim + k] + &e;
        }
    }
    let metric = PolyMetric::new(dim, q, g)?;

    let mut phi = vec![Poly::zero(dim); dim * dim];
    for i in 0..n {
        let e = block_sign(q, i);
        phi[yi(i) * dim + xi(i)] = Poly::constant(dim, -e);
        phi[xi(i) * dim + yi(i)] = Poly::constant(dim, e);
        phi[z * dim + yi(i)] = Poly::var(dim, yi(i)).scale(e);
    }

    let mut zeta = vec![0.0; dim];
    zeta[z] = 2.0;
    let zeta = VectorFieldExpr::constant("zeta", &zeta);

    ContactMetricStructure::new(n, q, Arc::new(metric), phi, zeta, eta)
}

/// Residuals of the almost contact metric axioms at `p`.
pub fn verify_almost_contact(
    s: &ContactMetricStructure,
    p: &Point,
    tol: f64,
) -> Result<CheckReport> {
    p.expect_dim(s.dim())?;
    let d = s.dim();
    let phi = s.phi_at(p);
    let eta = s.eta_at(p);
    let zeta = s.zeta_at(p);
    let g = s.metric_at(p);
    let eta_zeta = &zeta * eta.transpose();

    let mut r = CheckReport::new();
    r.record(
        "phi_squared",
        "phi^2 = -I + eta (x) zeta",
        (&phi * &phi + DMatrix::identity(d, d) - &eta_zeta).amax(),
        tol,
    );
    r.record(
        "eta_zeta",
        "eta(zeta) = 1",
        (eta.dot(&zeta) - 1.0).abs(),
        tol,
    );
    r.record("phi_zeta", "phi zeta = 0", (&phi * &zeta).amax(), tol);
    r.record(
        "eta_phi",
        "eta o phi = 0",
        (eta.transpose() * &phi).amax(),
        tol,
    );
    let eta_eta = &eta * eta.transpose();
    r.record(
        "metric_compatibility",
        "g(phi X, phi Y) = g(X,Y) - eta(X) eta(Y)",
        (phi.transpose() * &g * &phi - (&g - eta_eta)).amax(),
        tol,
    );
    let omega = &g * &phi;
    r.record(
        "fundamental_form_antisymmetry",
        "g(X, phi Y) + g(Y, phi X) = 0",
        (&omega + omega.transpose()).amax(),
        tol,
    );
    Ok(r)
}

/// `(nabla_{d_b} phi)` as matrices, one per chart direction `b`.
pub fn phi_covariant_derivatives(s: &ContactMetricStructure, jet: &MetricJet) -> Vec<DMatrix<f64>> {
    let d = s.dim();
    let p = &jet.point;
    let phi = s.phi_at(p);
    (0..d)
        .map(|b| {
            let mut e = DVector::zeros(d);
            e[b] = 1.0;
            // Γ_b as the matrix (a, c) -> Γ^a_{bc}
            let gamma_b = DMatrix::from_fn(d, d, |a, c| jet.gamma.get(a, b, c));
            s.phi_derivative(p, &e) + &gamma_b * &phi - &phi * &gamma_b
        })
        .collect()
}

/// Residuals of `(nabla_X phi)Y = g(X,Y) zeta - eta(Y) X` and
/// `nabla_X zeta = -phi X` over chart basis fields at `p`.
pub fn verify_sasakian(s: &ContactMetricStructure, p: &Point, tol: f64) -> Result<CheckReport> {
    let jet = s.jet(p)?;
    let d = s.dim();
    let phi = s.phi_at(p);
    let eta = s.eta_at(p);
    let zeta = s.zeta_at(p);
    let nabla_phi = phi_covariant_derivatives(s, &jet);

    let mut sasaki = 0.0_f64;
    for (b, m) in nabla_phi.iter().enumerate() {
        for c in 0..d {
            for a in 0..d {
                let mut expected = jet.g[(b, c)] * zeta[a];
                if a == b {
                    expected -= eta[c];
                }
                sasaki = sasaki.max((m[(a, c)] - expected).abs());
            }
        }
    }

    let mut reeb = 0.0_f64;
    for b in 0..d {
        let mut e = DVector::zeros(d);
        e[b] = 1.0;
        let nabla_zeta = jet.cov(&e, s.zeta())?;
        reeb = reeb.max((nabla_zeta + phi.column(b)).amax());
    }

    let mut r = CheckReport::new();
    r.record(
        "sasakian_condition",
        "(nabla_X phi)Y = g(X,Y) zeta - eta(Y) X",
        sasaki,
        tol,
    );
    r.record("reeb_derivative", "nabla_X zeta = -phi X", reeb, tol);
    Ok(r)
}

/// Relative tolerance for `eta(X) = 0` in a phi-section.
pub const PHI_SECTION_TOL: f64 = 1e-9;

/// Sectional curvature of `span{X, phi X}` for non-null `X` orthogonal to zeta.
pub fn phi_sectional_curvature(
    s: &ContactMetricStructure,
    x: &dyn VectorField,
    p: &Point,
) -> Result<f64> {
    let xv = x.value(p)?;
    let scale = xv.amax().max(1.0);
    let eta_x = s.eta_at(p).dot(&xv);
    if eta_x.abs() > PHI_SECTION_TOL * scale {
        return Err(GeometryError::NotPhiSection(format!("eta(X) = {eta_x:e}")));
    }
    let g = s.metric_at(p);
    let norm = (xv.transpose() * &g * &xv)[(0, 0)];
    if norm.abs() < PHI_SECTION_TOL * scale * scale {
        return Err(GeometryError::NotPhiSection(format!(
            "X is null (g(X,X) = {norm:e})"
        )));
    }
    let unit = &xv / norm.abs().sqrt();
    let phi_x = s.phi_at(p) * &unit;
    let r = curvature_tensor(s.metric.as_ref(), p)?;
    sectional_from(&r, &g, &unit, &phi_x)
}

/// The two `c`-independent pieces of the space-form curvature:
/// `R(X,Y)Z = c * a + b` with `a = (S + T)/4`, `b = (3S - T)/4`, where
/// `S = g(Y,Z)X - g(X,Z)Y` and `T` collects the eta and phi terms.
pub fn space_form_parts(
    s: &ContactMetricStructure,
    p: &Point,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> (DVector<f64>, DVector<f64>) {
    let g = s.metric_at(p);
    let phi = s.phi_at(p);
    let eta = s.eta_at(p);
    let zeta = s.zeta_at(p);
    let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * &g * b)[(0, 0)];
    let (ex, ey, ez) = (eta.dot(x), eta.dot(y), eta.dot(z));
    let (px, py, pz) = (&phi * x, &phi * y, &phi * z);

    let s_term = x * ip(y, z) - y * ip(x, z);
    let t_term =
        y * (ex * ez) - x * (ey * ez) + &zeta * (ip(x, z) * ey - ip(y, z) * ex) + &px * ip(&py, z)
            - &py * ip(&px, z)
            - &pz * (2.0 * ip(&px, y));
    ((&s_term + &t_term) / 4.0, (s_term * 3.0 - t_term) / 4.0)
}

/// Right-hand side of the space-form curvature identity for constant `c`.
pub fn space_form_curvature(
    s: &ContactMetricStructure,
    p: &Point,
    c: f64,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> DVector<f64> {
    let (a, b) = space_form_parts(s, p, x, y, z);
    a * c + b
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceFormFit {
    pub c: f64,
    pub max_residual: f64,
}

/// Solves the space-form identity for `c` at the first well-conditioned
/// random triple, then reports its worst residual over all other triples.
///
/// Triple `k` is taken at `points[k % points.len()]` with components drawn
/// uniformly from `[-1, 1]` by a `ChaCha8Rng` seeded with `seed`.
pub fn fit_space_form_c(
    s: &ContactMetricStructure,
    points: &[Point],
    sample_count: usize,
    seed: u64,
) -> Result<SpaceFormFit> {
    if sample_count < 2 || points.is_empty() {
        return Err(GeometryError::InvalidField(
            "space-form fit needs at least two samples and one point".into(),
        ));
    }
    let d = s.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tensors: Vec<Option<CurvatureTensor>> = vec![None; points.len()];
    let mut solved: Option<(usize, f64)> = None;
    let mut samples = Vec::with_capacity(sample_count);

    for k in 0..sample_count {
        let idx = k % points.len();
        let p = &points[idx];
        if tensors[idx].is_none() {
            tensors[idx] = Some(curvature_tensor(s.metric.as_ref(), p)?);
        }
        let mut draw = || DVector::from_fn(d, |_, _| rng.random_range(-1.0..=1.0));
        let (x, y, z) = (draw(), draw(), draw());
        let lhs = tensors[idx]
            .as_ref()
            .expect("filled above")
            .apply(&x, &y, &z);
        let (a, b) = space_form_parts(s, p, &x, &y, &z);
        if solved.is_none() && a.amax() > SPACE_FORM_COEFF_MIN {
            solved = Some((k, a.dot(&(&lhs - &b)) / a.dot(&a)));
        }
        samples.push((lhs, a, b));
    }

    let (solved_at, c) = solved.ok_or(GeometryError::IllConditioned(SPACE_FORM_COEFF_MIN))?;
    let max_residual = samples
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != solved_at)
        .map(|(_, (lhs, a, b))| (lhs - a * c - b).amax())
        .fold(0.0, f64::max);
    Ok(SpaceFormFit { c, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{christoffel, signature};

    fn origin() -> Point {
        Point::origin(7)
    }

    fn unit(i: usize) -> DVector<f64> {
        let mut e = DVector::zeros(7);
        e[i] = 1.0;
        e
    }

    #[test]
    fn rejects_bad_signature() {
        for (n, q) in [(3, 1), (3, 0), (3, 6), (1, 0), (2, 4)] {
            assert!(matches!(
                standard_sasakian(n, q),
                Err(GeometryError::BadSignature { .. })
            ));
        }
        assert!(standard_sasakian(2, 2).is_ok());
    }

    #[test]
    fn reeb_field_and_signature() {
        let s = standard_sasakian(3, 2).unwrap();
        let p = Point::new(vec![0.3, -0.1, 0.8, 0.5, -0.9, 0.2, 1.7]).unwrap();
        assert_eq!(s.zeta_at(&p), unit(6) * 2.0);
        assert_eq!(s.eta_at(&p).dot(&s.zeta_at(&p)), 1.0);
        let g = s.metric_at(&p);
        let z = s.zeta_at(&p);
        assert!(((z.transpose() * g * &z)[(0, 0)] - 1.0).abs() < 1e-15);
        assert_eq!(signature(s.metric().as_ref(), &origin(), 1e-12), (2, 5, 0));
        let g0 = s.metric_at(&origin());
        let signs: Vec<f64> = (0..7).map(|i| g0[(i, i)].signum()).collect();
        assert_eq!(signs, vec![-1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn phi_on_coordinate_fields() {
        let s = standard_sasakian(3, 2).unwrap();
        let p = Point::new(vec![0.0, 0.0, 0.0, 0.4, 0.0, -0.6, 0.0]).unwrap();
        let phi = s.phi_at(&p);
        // spacelike block 3
        let expected = unit(2) + unit(6) * -0.6;
        assert_eq!(phi.column(5).into_owned(), expected);
        assert_eq!(phi.column(2).into_owned(), -unit(5));
        // timelike block 1 carries the block sign
        assert_eq!(phi.column(3).into_owned(), -(unit(0) + unit(6) * 0.4));
    }

    #[test]
    fn christoffel_table_at_origin() {
        // Γ^z_{x_i y_i} = -1/2, Γ^{x_i}_{y_i z} = -e_i/2, Γ^{y_i}_{x_i z} = e_i/2
        let s = standard_sasakian(3, 2).unwrap();
        let gamma = christoffel(s.metric().as_ref(), &origin()).unwrap();
        let mut expected = vec![0.0; 343];
        let mut set = |a: usize, b: usize, c: usize, v: f64| {
            expected[(a * 7 + b) * 7 + c] = v;
            expected[(a * 7 + c) * 7 + b] = v;
        };
        for i in 0..3 {
            let e = block_sign(2, i);
            set(6, i, 3 + i, -0.5);
            set(i, 3 + i, 6, -e / 2.0);
            set(3 + i, i, 6, e / 2.0);
        }
        for a in 0..7 {
            for b in 0..7 {
                for c in 0..7 {
                    let got = gamma.get(a, b, c);
                    let want = expected[(a * 7 + b) * 7 + c];
                    assert!(
                        (got - want).abs() < 1e-14,
                        "Γ^{a}_{b}{c} = {got}, want {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn reeb_derivative_on_coordinate_fields() {
        let s = standard_sasakian(3, 2).unwrap();
        let jet = s.jet(&origin()).unwrap();
        let v = jet.cov(&unit(5), s.zeta()).unwrap();
        assert!((v + unit(2)).amax() < 1e-15);
        let v = jet.cov(&unit(3), s.zeta()).unwrap();
        assert!((v - unit(0)).amax() < 1e-15);
    }

    #[test]
    fn detects_perturbed_phi() {
        let s = standard_sasakian(3, 2).unwrap();
        let mut phi = s.phi_polys().to_vec();
        phi[1] = &phi[1] + &Poly::constant(7, 1e-3);
        let bad = s.with_phi(phi).unwrap();
        let r = verify_almost_contact(&bad, &origin(), 1e-9).unwrap();
        assert!(!r.all_pass());
        assert!(r.residual_of("phi_squared") > 1e-4);
    }

    #[test]
    fn euclidean_metric_is_not_sasakian() {
        let s = standard_sasakian(3, 2).unwrap();
        let flat = s
            .with_metric(Arc::new(PolyMetric::diagonal(&[1.0; 7])))
            .unwrap();
        let r = verify_sasakian(&flat, &origin(), 1e-9).unwrap();
        assert!(!r.all_pass());
    }

    #[test]
    fn phi_section_of_zeta_is_rejected() {
        let s = standard_sasakian(3, 2).unwrap();
        let r = phi_sectional_curvature(&s, &unit(6), &origin());
        assert!(matches!(r, Err(GeometryError::NotPhiSection(_))));
    }

    #[test]
    fn phi_sectional_curvature_spacelike_and_timelike() {
        let s = standard_sasakian(3, 2).unwrap();
        let p = Point::new(vec![0.2, 0.7, -0.4, 0.1, 0.0, 0.3, -0.5]).unwrap();
        let x = unit(1) * 2.0;
        let k = phi_sectional_curvature(&s, &x, &p).unwrap();
        assert!((k + 3.0).abs() < 1e-6, "K = {k}");
        // timelike: 2(d_{x1} + y^1 d_z) has eta = 0
        let t = (unit(0) + unit(6) * 0.1) * 2.0;
        let k = phi_sectional_curvature(&s, &t, &p).unwrap();
        assert!((k + 3.0).abs() < 1e-6, "K = {k}");
    }

    #[test]
    fn fit_rejects_too_few_samples() {
        let s = standard_sasakian(2, 2).unwrap();
        assert!(fit_space_form_c(&s, &[Point::origin(5)], 1, 0).is_err());
    }
}
