//! Pointwise relations between the induced objects of a null hypersurface
//! tangent to zeta.

use nalgebra::DVector;

use crate::error::Result;
use crate::field::Point;
use crate::hypersurface::{InducedGeometry, LocalFrame, Member};
use crate::report::{CheckEntry, CheckReport, Tolerances};

fn record(r: &mut CheckReport, name: &str, anchor: &str, residual: f64, tol: f64) {
    r.record(name, anchor, residual, tol);
}

/// Relations of `zeta`, `U`, `V` with `B`, `C` and `phi`:
/// `nabla_X zeta = -phi X`, `B(X,zeta) = -u(X)`, `C(X,zeta) = -v(X)`,
/// `B(X,U) = C(X,V)` and the `nabla phi` formula, over every frame member
/// pair at every point.
pub fn check_structure_relations(
    frame: &LocalFrame,
    points: &[Point],
    tol: &Tolerances,
) -> Result<CheckReport> {
    let mut r = CheckReport::new();
    for p in points {
        let geo = InducedGeometry::at(frame, p)?;
        let jet = &geo.frame;
        let zeta = jet.member(Member::Zeta);
        let (u_vec, zeta_vec) = (
            geo.value(Member::U).clone(),
            geo.value(Member::Zeta).clone(),
        );
        let members = geo.tangent_members();
        for xm in &members {
            let x = geo.value(*xm).clone();
            let reeb = geo.nabla(&x, &zeta)? + geo.phi(&x);
            record(
                &mut r,
                "reeb_derivative",
                "nabla_X zeta = -phi X",
                reeb.amax(),
                tol.fd,
            );

            let b_zeta = geo.b(&x, &zeta)? + geo.u(&x);
            record(&mut r, "b_zeta", "B(X,zeta) = -u(X)", b_zeta.abs(), tol.fd);

            let c_zeta = geo.c(&x, &zeta)? + geo.v(&x);
            record(&mut r, "c_zeta", "C(X,zeta) = -v(X)", c_zeta.abs(), tol.fd);

            let bu_cv = geo.b(&x, &jet.member(Member::U))? - geo.c(&x, &jet.member(Member::V))?;
            record(
                &mut r,
                "b_u_equals_c_v",
                "B(X,U) = C(X,V)",
                bu_cv.abs(),
                tol.fd,
            );

            let a_n = geo.shape_n(&x)?;
            for ym in &members {
                let y = geo.value(*ym).clone();
                let lhs = geo.nabla_phi(&x, &jet.member(*ym))?;
                let rhs =
                    &zeta_vec * geo.g(&x, &y) - &x * geo.eta(&y) - &u_vec * geo.b_tensor(&x, &y)?
                        + &a_n * geo.u(&y);
                record(
                    &mut r,
                    "phi_derivative",
                    "(nabla_X phi)Y = g(X,Y)zeta - eta(Y)X - B(X,Y)U + u(Y)A_N X",
                    (lhs - rhs).amax(),
                    tol.fd,
                );
            }
        }
    }
    Ok(r)
}

/// Covariant derivatives of `U` and `V`:
/// `nabla_X U = phi A_N X - theta(X) zeta + tau(X) U` and
/// `nabla_X V = phi A*_xi X - tau(X) V`, plus `u(nabla_X U) = tau(X)`.
pub fn check_uv_derivatives(
    frame: &LocalFrame,
    points: &[Point],
    tol: &Tolerances,
) -> Result<CheckReport> {
    let mut r = CheckReport::new();
    for p in points {
        let geo = InducedGeometry::at(frame, p)?;
        let (u, v, zeta) = (
            geo.value(Member::U).clone(),
            geo.value(Member::V).clone(),
            geo.value(Member::Zeta).clone(),
        );
        for xm in geo.tangent_members() {
            let x = geo.value(xm).clone();
            let tau = geo.tau(&x)?;
            let nabla_u = geo.nabla(&x, &geo.frame.member(Member::U))?;
            let rhs_u = geo.phi(&geo.shape_n(&x)?) - &zeta * geo.theta(&x) + &u * tau;
            record(
                &mut r,
                "u_derivative",
                "nabla_X U = phi A_N X - theta(X)zeta + tau(X)U",
                (&nabla_u - rhs_u).amax(),
                tol.fd,
            );
            let nabla_v = geo.nabla(&x, &geo.frame.member(Member::V))?;
            let rhs_v = geo.phi(&geo.shape_xi(&x)?) - &v * tau;
            record(
                &mut r,
                "v_derivative",
                "nabla_X V = phi A*_xi X - tau(X)V",
                (nabla_v - rhs_v).amax(),
                tol.fd,
            );
            record(
                &mut r,
                "u_of_nabla_u",
                "u(nabla_X U) = tau(X)",
                (geo.u(&nabla_u) - tau).abs(),
                tol.fd,
            );
        }
    }
    Ok(r)
}

/// Defining properties of the induced objects themselves: symmetry of `B`,
/// agreement of the definitional and tensorial routes for `B` and `C`, the
/// shape operators, the induced `phi`, and the one-forms `u`, `v`, `omega`.
pub fn check_induced_relations(
    frame: &LocalFrame,
    points: &[Point],
    tol: &Tolerances,
) -> Result<CheckReport> {
    let mut r = CheckReport::new();
    for p in points {
        let geo = InducedGeometry::at(frame, p)?;
        let jet = &geo.frame;
        let members = geo.tangent_members();
        let value = |m: Member| geo.value(m).clone();
        let (xi, n, u, v, zeta) = (
            value(Member::Xi),
            value(Member::N),
            value(Member::U),
            value(Member::V),
            value(Member::Zeta),
        );

        record(
            &mut r,
            "u_of_u",
            "u(U) = 1",
            (geo.u(&u) - 1.0).abs(),
            tol.analytic,
        );
        record(
            &mut r,
            "v_of_v",
            "v(V) = 1",
            (geo.v(&v) - 1.0).abs(),
            tol.analytic,
        );
        record(
            &mut r,
            "u_of_xi",
            "u(xi) = 0",
            geo.u(&xi).abs(),
            tol.analytic,
        );
        record(
            &mut r,
            "phi_zeta",
            "phi zeta = 0",
            geo.phi(&zeta).amax(),
            tol.analytic,
        );
        record(
            &mut r,
            "phi_u",
            "phi U = 0",
            geo.phi(&u).amax(),
            tol.analytic,
        );
        record(
            &mut r,
            "omega_zeta",
            "omega(zeta) = 0",
            geo.omega(&zeta)?.abs(),
            tol.fd,
        );
        record(
            &mut r,
            "omega_v",
            "omega(V) = -1",
            (geo.omega(&v)? + 1.0).abs(),
            tol.fd,
        );
        record(
            &mut r,
            "shape_xi_xi",
            "A*_xi xi = 0",
            geo.shape_xi(&xi)?.amax(),
            tol.fd,
        );

        for xm in &members {
            let x = value(*xm);
            let phi_x = geo.phi(&x);
            let a_n = geo.shape_n(&x)?;
            let a_xi = geo.shape_xi(&x)?;
            let phi2 = geo.phi(&phi_x) + &x - &zeta * geo.eta(&x) - &u * geo.u(&x);
            record(
                &mut r,
                "phi_squared",
                "phi^2 X = -X + eta(X)zeta + u(X)U",
                phi2.amax(),
                tol.analytic,
            );
            record(
                &mut r,
                "phi_tangent",
                "g(phi X, xi) = 0",
                geo.g(&phi_x, &xi).abs(),
                tol.analytic,
            );
            record(
                &mut r,
                "b_xi",
                "B(X,xi) = 0",
                geo.b(&x, &jet.member(Member::Xi))?.abs(),
                tol.fd,
            );
            record(
                &mut r,
                "shape_n_screen",
                "g(A_N X, N) = 0",
                geo.g(&a_n, &n).abs(),
                tol.fd,
            );
            record(
                &mut r,
                "shape_xi_screen",
                "g(A*_xi X, N) = 0",
                geo.g(&a_xi, &n).abs(),
                tol.fd,
            );
            let n_null = geo.g(&geo.cov_member(&x, Member::N)?, &n);
            record(
                &mut r,
                "transversal_null",
                "g(nabla^_X N, N) = 0",
                n_null.abs(),
                tol.fd,
            );

            for ym in &members {
                let y = value(*ym);
                let yf = jet.member(*ym);
                let b_def = geo.b(&x, &yf)?;
                let b_swapped = geo.b(&y, &jet.member(*xm))?;
                let b_ten = geo.b_tensor(&x, &y)?;
                record(
                    &mut r,
                    "b_symmetry",
                    "B(X,Y) = B(Y,X)",
                    (b_def - b_swapped).abs(),
                    tol.fd,
                );
                record(
                    &mut r,
                    "b_routes",
                    "g(nabla^_X Y, xi) = -g(nabla^_X xi, Y)",
                    (b_def - b_ten).abs(),
                    tol.fd,
                );
                record(
                    &mut r,
                    "shape_xi_form",
                    "g(A*_xi X, Y) = B(X,Y)",
                    (geo.g(&a_xi, &y) - b_ten).abs(),
                    tol.fd,
                );
                let c_def = geo.c(&x, &yf)?;
                record(
                    &mut r,
                    "c_routes",
                    "g(nabla^_X PY, N) = g(A_N X, PY)",
                    (c_def - geo.c_tensor(&x, &y)?).abs(),
                    tol.fd,
                );

                let phi_y = geo.phi(&y);
                let skew = geo.g(&phi_x, &y)
                    + geo.g(&x, &phi_y)
                    + geo.u(&x) * geo.theta(&y)
                    + geo.u(&y) * geo.theta(&x);
                record(
                    &mut r,
                    "phi_skew",
                    "g(phi X, Y) = -g(X, phi Y) - u(X)theta(Y) - u(Y)theta(X)",
                    skew.abs(),
                    tol.analytic,
                );
                r.merge_entry(phi_metric_entry(&geo, &x, &y, &phi_x, &phi_y, tol.analytic));
            }
        }
    }
    Ok(r)
}

/// `g(phi X, phi Y) = g(X,Y) - eta(X)eta(Y) - u(Y)v(X) - u(X)v(Y)`; the
/// variant with the product `g(X,Y)eta(X)eta(Y)` is carried as a witness.
fn phi_metric_entry(
    geo: &InducedGeometry,
    x: &DVector<f64>,
    y: &DVector<f64>,
    phi_x: &DVector<f64>,
    phi_y: &DVector<f64>,
    tol: f64,
) -> CheckEntry {
    let lhs = geo.g(phi_x, phi_y);
    let cross = geo.u(y) * geo.v(x) + geo.u(x) * geo.v(y);
    let (gxy, ee) = (geo.g(x, y), geo.eta(x) * geo.eta(y));
    let corrected = (lhs - (gxy - ee - cross)).abs();
    let product = (lhs - (gxy * ee - cross)).abs();
    CheckEntry::residual(
        "phi_metric",
        "g(phi X, phi Y) = g(X,Y) - eta(X)eta(Y) - u(Y)v(X) - u(X)v(Y)",
        corrected,
        tol,
    )
    .with_witness("product_form_residual", product)
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

    fn points() -> Vec<Point> {
        vec![
            Point::new(vec![0.3, -0.2, 0.5, 0.7, 0.1, 0.3, -0.4]).unwrap(),
            Point::new(vec![-0.6, 0.9, -0.1, 0.2, -0.8, -0.6, 0.5]).unwrap(),
        ]
    }

    #[test]
    fn structure_relations_hold_on_hyperplane() {
        let r = check_structure_relations(&frame(), &points(), &Tolerances::default()).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.entries.len(), 5);
    }

    #[test]
    fn uv_derivatives_hold_on_hyperplane() {
        let r = check_uv_derivatives(&frame(), &points(), &Tolerances::default()).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn induced_relations_hold_and_product_form_does_not() {
        let r = check_induced_relations(&frame(), &points(), &Tolerances::default()).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
        let e = r.get("phi_metric").unwrap();
        assert!(e.witnesses["product_form_residual"] > 0.1);
    }

    #[test]
    fn b_zeta_at_xi_and_u() {
        let p = &points()[0];
        let geo = InducedGeometry::at(&frame(), p).unwrap();
        let zeta = geo.frame.member(Member::Zeta);
        assert!(geo.b(&geo.xi().clone(), &zeta).unwrap().abs() < 1e-12);
        let u = geo.value(Member::U).clone();
        assert!((geo.b(&u, &zeta).unwrap() + 1.0).abs() < 1e-12);
        let v = geo.value(Member::V).clone();
        assert!(
            (geo.c(
                &geo.value(Member::Zeta).clone(),
                &geo.frame.member(Member::V)
            )
            .unwrap()
                + 1.0)
                .abs()
                < 1e-12
        );
        assert!(
            (geo.b(&zeta_vec(&geo), &geo.frame.member(Member::U))
                .unwrap()
                + 1.0)
                .abs()
                < 1e-12
        );
        assert!(geo.u(&v).abs() < 1e-12);
    }

    fn zeta_vec(geo: &InducedGeometry) -> DVector<f64> {
        geo.value(Member::Zeta).clone()
    }
}
