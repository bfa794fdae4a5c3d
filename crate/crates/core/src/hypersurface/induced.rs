//! Induced objects of a null hypersurface at a point: `B`, `C`, `tau`, the
//! shape operators, `u`, `v`, `theta`, `omega`, `phi`, and the induced and
//! screen connections.
//!
//! Gauss-Weingarten conventions:
//! `nabla^_X Y = nabla_X Y + B(X,Y) N`, `nabla^_X N = -A_N X + tau(X) N`,
//! `nabla_X PY = nabla*_X PY + C(X,PY) xi`, `nabla_X xi = -A*_xi X - tau(X) xi`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::ambient::MetricJet;
use crate::contact::ContactMetricStructure;
use crate::error::{GeometryError, Result};
use crate::fd::{five_point, CURVE_STEP};
use crate::field::{Point, VectorField};

use super::frame::{FrameJet, LocalFrame, Member, TANGENT_TOL};
use super::surface::Hypersurface;

/// Everything needed to evaluate induced objects at one point.
#[derive(Debug, Clone)]
pub struct InducedGeometry {
    structure: Arc<ContactMetricStructure>,
    surface: Arc<Hypersurface>,
    pub frame: FrameJet,
    pub ambient: MetricJet,
    phi: DMatrix<f64>,
    eta: DVector<f64>,
}

impl InducedGeometry {
    pub fn at(frame: &LocalFrame, p: &Point) -> Result<Self> {
        let structure = frame.structure().clone();
        Ok(Self {
            ambient: structure.jet(p)?,
            phi: structure.phi_at(p),
            eta: structure.eta_at(p),
            frame: frame.jet(p)?,
            surface: frame.surface().clone(),
            structure,
        })
    }

    pub fn point(&self) -> &Point {
        &self.frame.point
    }

    pub fn structure(&self) -> &Arc<ContactMetricStructure> {
        &self.structure
    }

    pub fn g(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.ambient.inner(a, b)
    }

    pub fn value(&self, m: Member) -> &DVector<f64> {
        self.frame.value(m)
    }

    pub fn xi(&self) -> &DVector<f64> {
        self.value(Member::Xi)
    }

    pub fn n(&self) -> &DVector<f64> {
        self.value(Member::N)
    }

    /// `[xi, V, U, zeta, D0...]` at the point.
    pub fn tangent_basis(&self) -> Vec<DVector<f64>> {
        self.frame.values.tangent_basis()
    }

    pub fn tangent_members(&self) -> Vec<Member> {
        self.frame.tangent_members()
    }

    pub fn require_tangent(&self, x: &DVector<f64>, what: &str) -> Result<()> {
        if self.surface.is_tangent(self.point(), x, TANGENT_TOL) {
            Ok(())
        } else {
            Err(GeometryError::NotTangent(what.to_string()))
        }
    }

    pub fn phi_bar(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.phi * x
    }

    pub fn eta(&self, x: &DVector<f64>) -> f64 {
        self.eta.dot(x)
    }

    pub fn theta(&self, x: &DVector<f64>) -> f64 {
        self.g(self.n(), x)
    }

    pub fn u(&self, x: &DVector<f64>) -> f64 {
        self.g(self.value(Member::V), x)
    }

    pub fn v(&self, x: &DVector<f64>) -> f64 {
        self.g(self.value(Member::U), x)
    }

    /// `PY = Y - theta(Y) xi`.
    pub fn screen(&self, y: &DVector<f64>) -> DVector<f64> {
        y - self.xi() * self.theta(y)
    }

    /// `X - eta(X) zeta`, the projection onto `D + D'`.
    pub fn contact_projection(&self, x: &DVector<f64>) -> DVector<f64> {
        x - self.value(Member::Zeta) * self.eta(x)
    }

    /// Ambient `nabla^_X Y`.
    pub fn ambient_cov(&self, x: &DVector<f64>, y: &dyn VectorField) -> Result<DVector<f64>> {
        self.ambient.cov(x, y)
    }

    /// Ambient `nabla^_X W` for a frame member.
    pub fn cov_member(&self, x: &DVector<f64>, m: Member) -> Result<DVector<f64>> {
        Ok(self.frame.derivative(m, x)? + self.ambient.gamma.contract(x, self.value(m)))
    }

    /// `W - g(W, xi) N`: tangential part of an ambient vector along `M`.
    pub fn tangential(&self, w: &DVector<f64>) -> DVector<f64> {
        w - self.n() * self.g(w, self.xi())
    }

    /// `B(X,Y) = g(nabla^_X Y, xi)`.
    pub fn b(&self, x: &DVector<f64>, y: &dyn VectorField) -> Result<f64> {
        self.require_tangent(x, "X")?;
        self.require_tangent(&y.value(self.point())?, "Y")?;
        Ok(self.g(&self.ambient_cov(x, y)?, self.xi()))
    }

    /// `B(X,Y) = -g(nabla^_X xi, Y)`, tensorial in both slots.
    pub fn b_tensor(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        Ok(-self.g(&self.cov_member(x, Member::Xi)?, y))
    }

    /// `tau(X) = g(nabla^_X N, xi)`.
    pub fn tau(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(self.g(&self.cov_member(x, Member::N)?, self.xi()))
    }

    /// `A_N X = tau(X) N - nabla^_X N`.
    pub fn shape_n(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.n() * self.tau(x)? - self.cov_member(x, Member::N)?)
    }

    /// `A*_xi X = -nabla^_X xi - tau(X) xi`.
    pub fn shape_xi(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(-self.cov_member(x, Member::Xi)? - self.xi() * self.tau(x)?)
    }

    /// `X(g(A, B))` for fields `A`, `B` at the point.
    fn inner_derivative(
        &self,
        x: &DVector<f64>,
        a: &dyn VectorField,
        b: &dyn VectorField,
    ) -> Result<f64> {
        let p = self.point();
        Ok(self.ambient.inner_derivative(
            x,
            &a.value(p)?,
            &a.derivative(p, x)?,
            &b.value(p)?,
            &b.derivative(p, x)?,
        ))
    }

    /// `nabla^_X (PY)` by the product rule.
    pub fn cov_screen_projection(
        &self,
        x: &DVector<f64>,
        y: &dyn VectorField,
    ) -> Result<DVector<f64>> {
        let p = self.point();
        let yv = y.value(p)?;
        let d_theta = self.inner_derivative(x, &self.frame.member(Member::N), y)?;
        Ok(self.ambient_cov(x, y)?
            - self.xi() * d_theta
            - self.cov_member(x, Member::Xi)? * self.theta(&yv))
    }

    /// `C(X, PY) = g(nabla^_X (PY), N)`.
    pub fn c(&self, x: &DVector<f64>, y: &dyn VectorField) -> Result<f64> {
        self.require_tangent(x, "X")?;
        self.require_tangent(&y.value(self.point())?, "Y")?;
        Ok(self.g(&self.cov_screen_projection(x, y)?, self.n()))
    }

    /// `C(X, PY) = g(A_N X, PY)`, tensorial in both slots.
    pub fn c_tensor(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        Ok(self.g(&self.shape_n(x)?, &self.screen(y)))
    }

    /// `phi X = phi^ X - u(X) N`.
    pub fn phi(&self, x: &DVector<f64>) -> DVector<f64> {
        self.phi_bar(x) - self.n() * self.u(x)
    }

    /// `omega(X) = C(zeta, PX)`.
    pub fn omega(&self, x: &DVector<f64>) -> Result<f64> {
        self.c_tensor(&self.value(Member::Zeta).clone(), x)
    }

    /// Induced connection `nabla_X Y = nabla^_X Y - B(X,Y) N`.
    pub fn nabla(&self, x: &DVector<f64>, y: &dyn VectorField) -> Result<DVector<f64>> {
        Ok(self.tangential(&self.ambient_cov(x, y)?))
    }

    /// Screen connection `nabla*_X PY = nabla_X PY - C(X,PY) xi`.
    pub fn nabla_screen(&self, x: &DVector<f64>, y: &dyn VectorField) -> Result<DVector<f64>> {
        let w = self.cov_screen_projection(x, y)?;
        let nabla_py = self.tangential(&w);
        Ok(&nabla_py - self.xi() * self.g(&w, self.n()))
    }

    /// `nabla^_X (phi Y)` by the product rule.
    pub fn cov_phi(&self, x: &DVector<f64>, y: &dyn VectorField) -> Result<DVector<f64>> {
        let p = self.point();
        let yv = y.value(p)?;
        let dy = y.derivative(p, x)?;
        let d_u = self.inner_derivative(x, &self.frame.member(Member::V), y)?;
        let phi_y = self.phi(&yv);
        let d_phi_y = self.structure.phi_derivative(p, x) * &yv + &self.phi * dy
            - self.n() * d_u
            - self.frame.derivative(Member::N, x)? * self.u(&yv);
        Ok(d_phi_y + self.ambient.gamma.contract(x, &phi_y))
    }

    /// `(nabla_X phi) Y = nabla_X (phi Y) - phi(nabla_X Y)`.
    pub fn nabla_phi(&self, x: &DVector<f64>, y: &dyn VectorField) -> Result<DVector<f64>> {
        let first = self.tangential(&self.cov_phi(x, y)?);
        Ok(first - self.phi(&self.nabla(x, y)?))
    }
}

/// Derivatives along `X` of the bilinear forms over the frame's tangent
/// basis `E`: `X(B(E_i,E_j))`, `X(C(E_i,PE_j))`, `X(g(E_i,E_j))`, and
/// `X(g(PE_i,PE_j))`, each by the five-point stencil on the retracted curve.
#[derive(Debug, Clone)]
pub struct FormDerivatives {
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub screen_g: DMatrix<f64>,
}

/// Pointwise matrices `B(E_i,E_j)`, `C(E_i,PE_j)`, `g(E_i,E_j)`,
/// `g(PE_i,PE_j)` over the tangent frame basis.
pub fn form_matrices(geo: &InducedGeometry) -> Result<Vec<DMatrix<f64>>> {
    let e = geo.tangent_basis();
    let k = e.len();
    let mut b = DMatrix::zeros(k, k);
    let mut c = DMatrix::zeros(k, k);
    let mut g = DMatrix::zeros(k, k);
    let mut sg = DMatrix::zeros(k, k);
    let shape_xi: Vec<DVector<f64>> = e
        .iter()
        .map(|x| geo.cov_member(x, Member::Xi))
        .collect::<Result<_>>()?;
    let shape_n: Vec<DVector<f64>> = e.iter().map(|x| geo.shape_n(x)).collect::<Result<_>>()?;
    let screen: Vec<DVector<f64>> = e.iter().map(|y| geo.screen(y)).collect();
    for i in 0..k {
        for j in 0..k {
            b[(i, j)] = -geo.g(&shape_xi[i], &e[j]);
            c[(i, j)] = geo.g(&shape_n[i], &screen[j]);
            g[(i, j)] = geo.g(&e[i], &e[j]);
            sg[(i, j)] = geo.g(&screen[i], &screen[j]);
        }
    }
    Ok(vec![b, c, g, sg])
}

pub fn form_derivatives(
    frame: &LocalFrame,
    p: &Point,
    x: &DVector<f64>,
) -> Result<FormDerivatives> {
    let surface = frame.surface();
    let mut d = five_point(CURVE_STEP, |t| {
        let q = surface.curve_point(p, x, t)?;
        form_matrices(&InducedGeometry::at(frame, &q)?)
    })?;
    let screen_g = d.pop().expect("four forms");
    let g = d.pop().expect("four forms");
    let c = d.pop().expect("four forms");
    let b = d.pop().expect("four forms");
    Ok(FormDerivatives { b, c, g, screen_g })
}

/// `(nabla_X B)(Y,Z)` for constant-coefficient combinations `Y`, `Z` of the
/// tangent frame basis.
pub fn nabla_b(
    frame: &LocalFrame,
    x: &DVector<f64>,
    y: &[f64],
    z: &[f64],
    p: &Point,
) -> Result<f64> {
    let geo = InducedGeometry::at(frame, p)?;
    geo.require_tangent(x, "X")?;
    let d = form_derivatives(frame, p, x)?;
    let (yv, zv) = (
        geo.frame.values.combination(y),
        geo.frame.values.combination(z),
    );
    let x_b = bilinear(&d.b, y, z);
    let ny = geo.nabla(x, &geo.frame.combination(y))?;
    let nz = geo.nabla(x, &geo.frame.combination(z))?;
    Ok(x_b - geo.b_tensor(&ny, &zv)? - geo.b_tensor(&yv, &nz)?)
}

/// `(nabla_X C)(Y,PZ)` for constant-coefficient combinations `Y`, `Z`.
pub fn nabla_c(
    frame: &LocalFrame,
    x: &DVector<f64>,
    y: &[f64],
    z: &[f64],
    p: &Point,
) -> Result<f64> {
    let geo = InducedGeometry::at(frame, p)?;
    geo.require_tangent(x, "X")?;
    let d = form_derivatives(frame, p, x)?;
    let yv = geo.frame.values.combination(y);
    let x_c = bilinear(&d.c, y, z);
    let ny = geo.nabla(x, &geo.frame.combination(y))?;
    let nz = geo.nabla_screen(x, &geo.frame.combination(z))?;
    Ok(x_c - geo.c_tensor(&ny, &geo.frame.values.combination(z))? - geo.c_tensor(&yv, &nz)?)
}

pub(crate) fn bilinear(m: &DMatrix<f64>, y: &[f64], z: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, yi) in y.iter().enumerate() {
        for (j, zj) in z.iter().enumerate() {
            s += yi * m[(i, j)] * zj;
        }
    }
    s
}
