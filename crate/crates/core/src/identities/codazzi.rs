//! Codazzi equations, the non-metricity of the induced connection, and the
//! metricity of the screen connection.
//!
//! All quantities are tensors, so they are tabulated once per point over the
//! tangent frame basis `E = [xi, V, U, zeta, D0...]` and contracted for any
//! constant-coefficient triple.

use nalgebra::{DMatrix, DVector};

use crate::ambient::curvature_tensor;
use crate::error::Result;
use crate::field::Point;
use crate::hypersurface::{form_derivatives, form_matrices, InducedGeometry, LocalFrame};
use crate::report::CheckReport;

/// Rank-3 array over the tangent basis.
#[derive(Debug, Clone)]
struct Tensor3 {
    k: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    fn from_fn(k: usize, mut f: impl FnMut(usize, usize, usize) -> Result<f64>) -> Result<Self> {
        let mut data = Vec::with_capacity(k * k * k);
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    data.push(f(i, j, l)?);
                }
            }
        }
        Ok(Self { k, data })
    }

    fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.data[(i * self.k + j) * self.k + l]
    }

    fn contract(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.k {
            for j in 0..self.k {
                for l in 0..self.k {
                    s += self.get(i, j, l) * x[i] * y[j] * z[l];
                }
            }
        }
        s
    }
}

fn form(m: &DMatrix<f64>, y: &[f64], z: &[f64]) -> f64 {
    let y = DVector::from_column_slice(y);
    let z = DVector::from_column_slice(z);
    (y.transpose() * m * z)[(0, 0)]
}

fn dot(a: &DVector<f64>, y: &[f64]) -> f64 {
    a.iter().zip(y).map(|(p, q)| p * q).sum()
}

/// Residuals of the four Codazzi-type identities for one triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodazziResiduals {
    /// `g(R(X,Y)Z, xi)` against the `nabla B` side.
    pub b: f64,
    /// `g(R(X,Y)PZ, N)` against the `nabla C` side.
    pub c: f64,
    /// `nabla B` side against its space-form value for the supplied `c`.
    pub space_form_b: f64,
    /// `nabla C` side against its space-form value for the supplied `c`.
    pub space_form_c: f64,
}

/// First-order jet of the induced forms at one point.
#[derive(Debug, Clone)]
pub struct FormJet {
    pub geometry: InducedGeometry,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    tau: DVector<f64>,
    u: DVector<f64>,
    v: DVector<f64>,
    theta: DVector<f64>,
    eta: DVector<f64>,
    /// `g(phi^ E_i, E_j)`.
    phi_g: DMatrix<f64>,
    /// `g(E_i, PE_j)`.
    g_screen: DMatrix<f64>,
    /// `g(phi^ E_i, PE_j)`.
    phi_g_screen: DMatrix<f64>,
    eta_screen: DVector<f64>,
    v_screen: DVector<f64>,
    nabla_b: Tensor3,
    nabla_c: Tensor3,
    nabla_g: Tensor3,
    nabla_screen_g: Tensor3,
    /// `g(R(E_i,E_j)E_k, xi)`.
    r_xi: Tensor3,
    /// `g(R(E_i,E_j)PE_k, N)`.
    r_n: Tensor3,
}

impl FormJet {
    pub fn at(frame: &LocalFrame, p: &Point) -> Result<Self> {
        let geo = InducedGeometry::at(frame, p)?;
        let e = geo.tangent_basis();
        let members = geo.tangent_members();
        let k = e.len();
        let mut forms = form_matrices(&geo)?.into_iter();
        let (b, c) = (forms.next().expect("B"), forms.next().expect("C"));
        let screen: Vec<DVector<f64>> = e.iter().map(|y| geo.screen(y)).collect();

        let mut nabla = Vec::with_capacity(k);
        let mut nabla_star = Vec::with_capacity(k);
        let mut derivs = Vec::with_capacity(k);
        for x in &e {
            let mut row = Vec::with_capacity(k);
            let mut row_star = Vec::with_capacity(k);
            for m in &members {
                let field = geo.frame.member(*m);
                row.push(geo.nabla(x, &field)?);
                row_star.push(geo.nabla_screen(x, &field)?);
            }
            nabla.push(row);
            nabla_star.push(row_star);
            derivs.push(form_derivatives(frame, p, x)?);
        }

        let nabla_b = Tensor3::from_fn(k, |i, j, l| {
            Ok(derivs[i].b[(j, l)]
                - geo.b_tensor(&nabla[i][j], &e[l])?
                - geo.b_tensor(&e[j], &nabla[i][l])?)
        })?;
        let nabla_c = Tensor3::from_fn(k, |i, j, l| {
            Ok(derivs[i].c[(j, l)]
                - geo.c_tensor(&nabla[i][j], &e[l])?
                - geo.c_tensor(&e[j], &nabla_star[i][l])?)
        })?;
        let nabla_g = Tensor3::from_fn(k, |i, j, l| {
            Ok(derivs[i].g[(j, l)] - geo.g(&nabla[i][j], &e[l]) - geo.g(&e[j], &nabla[i][l]))
        })?;
        let nabla_screen_g = Tensor3::from_fn(k, |i, j, l| {
            Ok(derivs[i].screen_g[(j, l)]
                - geo.g(&nabla_star[i][j], &screen[l])
                - geo.g(&screen[j], &nabla_star[i][l]))
        })?;

        let r = curvature_tensor(geo.structure().metric().as_ref(), p)?;
        let (xi, n) = (geo.xi().clone(), geo.n().clone());
        let r_xi = Tensor3::from_fn(k, |i, j, l| Ok(geo.g(&r.apply(&e[i], &e[j], &e[l]), &xi)))?;
        let r_n = Tensor3::from_fn(k, |i, j, l| {
            Ok(geo.g(&r.apply(&e[i], &e[j], &screen[l]), &n))
        })?;

        let tau =
            DVector::from_iterator(k, e.iter().map(|x| geo.tau(x)).collect::<Result<Vec<_>>>()?);
        let vec_of = |f: &dyn Fn(&DVector<f64>) -> f64, basis: &[DVector<f64>]| {
            DVector::from_iterator(k, basis.iter().map(f))
        };
        let u = vec_of(&|x| geo.u(x), &e);
        let v = vec_of(&|x| geo.v(x), &e);
        let theta = vec_of(&|x| geo.theta(x), &e);
        let eta = vec_of(&|x| geo.eta(x), &e);
        let eta_screen = vec_of(&|x| geo.eta(x), &screen);
        let v_screen = vec_of(&|x| geo.v(x), &screen);
        let phi_e: Vec<DVector<f64>> = e.iter().map(|x| geo.phi_bar(x)).collect();
        let phi_g = DMatrix::from_fn(k, k, |i, j| geo.g(&phi_e[i], &e[j]));
        let g_screen = DMatrix::from_fn(k, k, |i, j| geo.g(&e[i], &screen[j]));
        let phi_g_screen = DMatrix::from_fn(k, k, |i, j| geo.g(&phi_e[i], &screen[j]));

        Ok(Self {
            geometry: geo,
            b,
            c,
            tau,
            u,
            v,
            theta,
            eta,
            phi_g,
            g_screen,
            phi_g_screen,
            eta_screen,
            v_screen,
            nabla_b,
            nabla_c,
            nabla_g,
            nabla_screen_g,
            r_xi,
            r_n,
        })
    }

    /// Number of tangent basis vectors.
    pub fn rank(&self) -> usize {
        self.tau.len()
    }

    /// `(nabla_X B)(Y,Z)`.
    pub fn nabla_b(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        self.nabla_b.contract(x, y, z)
    }

    /// `(nabla_X C)(Y,PZ)`.
    pub fn nabla_c(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        self.nabla_c.contract(x, y, z)
    }

    /// `(nabla_X g)(Y,Z)`.
    pub fn nabla_g(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        self.nabla_g.contract(x, y, z)
    }

    /// `(nabla*_X g)(PY,PZ)`.
    pub fn nabla_screen_g(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        self.nabla_screen_g.contract(x, y, z)
    }

    pub fn b_form(&self, y: &[f64], z: &[f64]) -> f64 {
        form(&self.b, y, z)
    }

    pub fn theta_of(&self, y: &[f64]) -> f64 {
        dot(&self.theta, y)
    }

    /// Residuals of the Codazzi equations and their space-form versions
    /// with constant `c` for the triple `(X, Y, Z)`.
    pub fn codazzi(&self, x: &[f64], y: &[f64], z: &[f64], c: f64) -> CodazziResiduals {
        let (tx, ty) = (dot(&self.tau, x), dot(&self.tau, y));
        let (ux, uy, uz) = (dot(&self.u, x), dot(&self.u, y), dot(&self.u, z));
        let (vx, vy) = (dot(&self.v, x), dot(&self.v, y));
        let (thx, thy) = (dot(&self.theta, x), dot(&self.theta, y));
        let (ex, ey) = (dot(&self.eta, x), dot(&self.eta, y));
        let (b_yz, b_xz) = (form(&self.b, y, z), form(&self.b, x, z));
        let (c_yz, c_xz) = (form(&self.c, y, z), form(&self.c, x, z));
        let phi_xy = form(&self.phi_g, x, y);

        let db = self.nabla_b(x, y, z) - self.nabla_b(y, x, z);
        let dc = self.nabla_c(x, y, z) - self.nabla_c(y, x, z);

        let b = (self.r_xi.contract(x, y, z) - (db + tx * b_yz - ty * b_xz)).abs();
        let c_res = (self.r_n.contract(x, y, z) - (dc - tx * c_yz + ty * c_xz)).abs();

        let k1 = (c - 1.0) / 4.0;
        let k3 = (c + 3.0) / 4.0;
        let sf_b = ty * b_xz - tx * b_yz
            + k1 * (form(&self.phi_g, y, z) * ux
                - form(&self.phi_g, x, z) * uy
                - 2.0 * phi_xy * uz);
        let (ez, vz) = (dot(&self.eta_screen, z), dot(&self.v_screen, z));
        let sf_c = tx * c_yz - ty * c_xz
            + k3 * (form(&self.g_screen, y, z) * thx - form(&self.g_screen, x, z) * thy)
            + k1 * (ex * ez * thy - ey * ez * thx + form(&self.phi_g_screen, y, z) * vx
                - form(&self.phi_g_screen, x, z) * vy
                - 2.0 * phi_xy * vz);

        CodazziResiduals {
            b,
            c: c_res,
            space_form_b: (db - sf_b).abs(),
            space_form_c: (dc - sf_c).abs(),
        }
    }

    /// `|(nabla_X g)(Y,Z) - B(X,Y)theta(Z) - B(X,Z)theta(Y)|`.
    pub fn nonmetricity(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        let rhs =
            form(&self.b, x, y) * dot(&self.theta, z) + form(&self.b, x, z) * dot(&self.theta, y);
        (self.nabla_g(x, y, z) - rhs).abs()
    }

    /// Largest `|(nabla_{E_i} g)(E_j,E_k)|` over the basis.
    pub fn max_nabla_g(&self) -> f64 {
        self.nabla_g.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn basis_vector(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.rank()];
        out[i] = 1.0;
        out
    }

    /// Basis triples `(i, j, k)` with `i < j`, the independent ones for an
    /// identity antisymmetric in its first two slots.
    fn antisymmetric_triples(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let k = self.rank();
        (0..k).flat_map(move |i| ((i + 1)..k).flat_map(move |j| (0..k).map(move |l| (i, j, l))))
    }
}

pub const CODAZZI_B_ANCHOR: &str =
    "g(R(X,Y)Z, xi) = (nabla_X B)(Y,Z) - (nabla_Y B)(X,Z) + tau(X)B(Y,Z) - tau(Y)B(X,Z)";
pub const CODAZZI_C_ANCHOR: &str =
    "g(R(X,Y)PZ, N) = (nabla_X C)(Y,PZ) - (nabla_Y C)(X,PZ) - tau(X)C(Y,PZ) + tau(Y)C(X,PZ)";
pub const SPACE_FORM_B_ANCHOR: &str =
    "(nabla_X B)(Y,Z) - (nabla_Y B)(X,Z) in a space form of constant c";
pub const SPACE_FORM_C_ANCHOR: &str =
    "(nabla_X C)(Y,PZ) - (nabla_Y C)(X,PZ) in a space form of constant c";

/// Codazzi residuals over all basis triples at every point, with the
/// space-form constant `c`.
pub fn check_codazzi(
    frame: &LocalFrame,
    points: &[Point],
    c: f64,
    tol: f64,
) -> Result<CheckReport> {
    let mut r = CheckReport::new();
    for p in points {
        let jet = FormJet::at(frame, p)?;
        for (i, j, l) in jet.antisymmetric_triples() {
            let (x, y, z) = (
                jet.basis_vector(i),
                jet.basis_vector(j),
                jet.basis_vector(l),
            );
            let res = jet.codazzi(&x, &y, &z, c);
            r.record("codazzi_b", CODAZZI_B_ANCHOR, res.b, tol);
            r.record("codazzi_c", CODAZZI_C_ANCHOR, res.c, tol);
            r.record(
                "space_form_codazzi_b",
                SPACE_FORM_B_ANCHOR,
                res.space_form_b,
                tol,
            );
            r.record(
                "space_form_codazzi_c",
                SPACE_FORM_C_ANCHOR,
                res.space_form_c,
                tol,
            );
        }
    }
    Ok(r)
}

/// `(nabla_X g)(Y,Z) = B(X,Y)theta(Z) + B(X,Z)theta(Y)` and metricity of the
/// screen connection, over all basis triples at every point.
pub fn check_nonmetricity(frame: &LocalFrame, points: &[Point], tol: f64) -> Result<CheckReport> {
    let mut r = CheckReport::new();
    for p in points {
        let jet = FormJet::at(frame, p)?;
        r.merge(nonmetricity_report(&jet, tol));
    }
    Ok(r)
}

pub(crate) fn nonmetricity_report(jet: &FormJet, tol: f64) -> CheckReport {
    let mut r = CheckReport::new();
    let k = jet.rank();
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                let (x, y, z) = (
                    jet.basis_vector(i),
                    jet.basis_vector(j),
                    jet.basis_vector(l),
                );
                r.record(
                    "nonmetricity",
                    "(nabla_X g)(Y,Z) = B(X,Y)theta(Z) + B(X,Z)theta(Y)",
                    jet.nonmetricity(&x, &y, &z),
                    tol,
                );
                r.record(
                    "screen_metric",
                    "(nabla*_X g)(PY,PZ) = 0",
                    jet.nabla_screen_g(&x, &y, &z).abs(),
                    tol,
                );
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fixtures::{hyperplane_frame, hyperplane_x1_y3, standard_structure};
    use crate::hypersurface::Hypersurface;

    fn frame() -> LocalFrame {
        let surf = Arc::new(Hypersurface::new(hyperplane_x1_y3().defining).unwrap());
        LocalFrame::explicit_unchecked(standard_structure(), surf, hyperplane_frame())
    }

    fn point() -> Point {
        Point::new(vec![0.3, -0.2, 0.5, 0.7, 0.1, 0.3, -0.4]).unwrap()
    }

    #[test]
    fn codazzi_holds_with_minus_three() {
        let r = check_codazzi(&frame(), &[point()], -3.0, 1e-6).unwrap();
        assert!(r.all_pass(), "{:?}", r.entries);
    }

    #[test]
    fn codazzi_space_form_rejects_c_one() {
        let r = check_codazzi(&frame(), &[point()], 1.0, 1e-6).unwrap();
        assert!(r.get("codazzi_b").unwrap().pass);
        let worst = r
            .residual_of("space_form_codazzi_b")
            .max(r.residual_of("space_form_codazzi_c"));
        assert!(worst > 1e-2, "{worst}");
    }

    #[test]
    fn codazzi_vanishes_on_the_diagonal() {
        let jet = FormJet::at(&frame(), &point()).unwrap();
        let x = [0.3, -1.0, 0.2, 0.5, 0.7, -0.4];
        let z = [1.0, 0.1, -0.2, 0.3, 0.0, 0.9];
        let res = jet.codazzi(&x, &x, &z, -3.0);
        assert!(res.b < 1e-9 && res.c < 1e-9);
    }

    #[test]
    fn nonmetricity_and_screen_metric() {
        let r = check_nonmetricity(&frame(), &[point()], 1e-6).unwrap();
        assert!(r.all_pass(), "{:?}", r.entries);
        let jet = FormJet::at(&frame(), &point()).unwrap();
        // Y = Z = xi: both sides vanish.
        let xi = jet.basis_vector(0);
        let x = [0.2, 0.4, -0.3, 1.0, 0.5, 0.1];
        assert!(jet.nabla_g(&x, &xi, &xi).abs() < 1e-9);
        // D0 directions: theta vanishes, so g is parallel there.
        let (d1, d2) = (jet.basis_vector(4), jet.basis_vector(5));
        assert!(jet.nabla_g(&x, &d1, &d2).abs() < 1e-9);
        assert!(jet.max_nabla_g() > 0.5);
    }

    #[test]
    fn nabla_b_vanishes_on_d0() {
        let jet = FormJet::at(&frame(), &point()).unwrap();
        for i in 0..jet.rank() {
            let x = jet.basis_vector(i);
            for (j, l) in [(4, 4), (4, 5), (5, 5)] {
                assert!(
                    jet.nabla_b(&x, &jet.basis_vector(j), &jet.basis_vector(l))
                        .abs()
                        < 1e-9
                );
            }
        }
    }
}
