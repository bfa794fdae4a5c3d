//! Consequences that hold for contact screen conformal and contact screen
//! umbilic null hypersurfaces of a Sasakian space form.

use crate::contact::fit_space_form_c;
use crate::error::{GeometryError, Result};
use crate::fd::three_point;
use crate::field::Point;
use crate::hypersurface::{InducedGeometry, LocalFrame, Member};
use crate::report::{CheckEntry, CheckReport, Tolerances};

use super::classify::{BalancedForms, Class, ClassificationReport};

/// Step along the `xi`-curve for the derivatives of fitted factors.
pub const XI_CURVE_STEP: f64 = 1e-4;
/// Random triples used to estimate the space-form constant.
pub const SPACE_FORM_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub c_estimate: f64,
    pub space_form_fit_residual: f64,
    pub conformal_applies: bool,
    pub umbilic_applies: bool,
    pub checks: CheckReport,
}

fn factor_at(frame: &LocalFrame, q: &Point, class: Class) -> Result<f64> {
    let geo = InducedGeometry::at(frame, q)?;
    Ok(BalancedForms::at(&geo)?.factor(class).unwrap_or(f64::NAN))
}

/// Value of the fitted factor at `p` and its derivative along `xi`.
fn factor_along_xi(
    frame: &LocalFrame,
    p: &Point,
    geo: &InducedGeometry,
    class: Class,
) -> Result<(f64, f64, f64)> {
    let xi = geo.xi().clone();
    let surface = frame.surface();
    let mut peak = 0.0_f64;
    let d = three_point(XI_CURVE_STEP, |t| {
        let f = factor_at(frame, &surface.curve_point(p, &xi, t)?, class)?;
        peak = peak.max(f.abs());
        Ok(f)
    })?;
    let f0 = factor_at(frame, p, class)?;
    Ok((f0, d, peak.max(f0.abs())))
}

/// Reports the relations implied by the classes that hold in `classes`.
///
/// Pointwise-algebraic clauses use the analytic tolerance for polynomial
/// frames and the finite-difference tolerance otherwise; the derivative
/// clauses always use the latter. A clause whose hypothesis is degenerate at
/// every sample is flagged vacuous.
pub fn check_theorem_consequences(
    frame: &LocalFrame,
    points: &[Point],
    classes: &ClassificationReport,
    tol: &Tolerances,
    seed: u64,
) -> Result<TheoremReport> {
    let conformal = classes.get(Class::ContactScreenConformal).holds();
    let umbilic = classes.get(Class::ContactScreenUmbilic).holds();
    if !conformal && !umbilic {
        return Err(GeometryError::NotApplicable(
            "neither contact_screen_conformal nor contact_screen_umbilic holds".into(),
        ));
    }
    let pointwise_tol = if frame.is_explicit() {
        tol.analytic
    } else {
        tol.fd
    };
    let fit = fit_space_form_c(frame.structure(), points, SPACE_FORM_SAMPLES, seed)?;
    let mut checks = CheckReport::new();
    checks.merge_entry(
        CheckEntry::residual("space_form_constant", "c = -3", (fit.c + 3.0).abs(), tol.fd)
            .with_witness("c_estimate", fit.c)
            .with_witness("fit_residual", fit.max_residual),
    );

    let mut omega_u = 0.0_f64;
    let mut phi_ode: Option<f64> = None;
    let mut gamma_omega = 0.0_f64;
    let mut gamma_bvv = 0.0_f64;
    let mut gamma_ode = 0.0_f64;
    let (mut max_buv, mut max_bvv, mut max_gamma) = (0.0_f64, 0.0_f64, 0.0_f64);

    for p in points {
        let geo = InducedGeometry::at(frame, p)?;
        let (u, v, xi) = (
            geo.value(Member::U).clone(),
            geo.value(Member::V).clone(),
            geo.xi().clone(),
        );
        let omega = geo.omega(&u)?;
        let tau_xi = geo.tau(&xi)?;
        omega_u = omega_u.max(omega.abs());

        if conformal {
            let buv = geo.b_tensor(&u, &v)?;
            max_buv = max_buv.max(buv.abs());
            if buv.abs() > tol.analytic {
                let (phi, xi_phi, _) =
                    factor_along_xi(frame, p, &geo, Class::ContactScreenConformal)?;
                let r = (xi_phi - 2.0 * phi * tau_xi).abs();
                phi_ode = Some(phi_ode.map_or(r, |m| if r.is_nan() { r } else { m.max(r) }));
            }
        }
        if umbilic {
            let (gamma, xi_gamma, peak) =
                factor_along_xi(frame, p, &geo, Class::ContactScreenUmbilic)?;
            let bvv = geo.b_tensor(&v, &v)?;
            max_bvv = max_bvv.max(bvv.abs());
            max_gamma = max_gamma.max(peak);
            gamma_omega = gamma_omega.max((gamma * gamma - 2.0 * omega).abs());
            gamma_bvv = gamma_bvv.max((gamma * bvv).abs());
            gamma_ode = gamma_ode.max((xi_gamma - gamma * tau_xi).abs());
        }
    }

    if conformal {
        checks.merge_entry(CheckEntry::residual(
            "omega_U",
            "omega(U) = C(zeta,U) = 0",
            omega_u,
            pointwise_tol,
        ));
        let anchor = "xi varphi - 2 varphi tau(xi) = 0 where B(U,V) != 0";
        let entry = match phi_ode {
            Some(r) => CheckEntry::residual("xi_phi_ode", anchor, r, tol.fd),
            None => CheckEntry::residual("xi_phi_ode", anchor, 0.0, tol.fd).into_vacuous(),
        };
        checks.merge_entry(entry.with_witness("max|B(U,V)|", max_buv));
    }
    if umbilic {
        checks.merge_entry(CheckEntry::residual(
            "gamma_sq_2omegaU",
            "gamma^2 - 2 omega(U) = 0",
            gamma_omega,
            pointwise_tol,
        ));
        let bvv = CheckEntry::residual("gamma_BVV", "gamma B(V,V) = 0", gamma_bvv, pointwise_tol)
            .with_witness("max|B(V,V)|", max_bvv);
        checks.merge_entry(if max_bvv <= tol.analytic {
            bvv.into_vacuous()
        } else {
            bvv
        });
        let ode = CheckEntry::residual(
            "xi_gamma_ode",
            "xi gamma - gamma tau(xi) = 0",
            gamma_ode,
            tol.fd,
        )
        .with_witness("max|gamma|", max_gamma);
        checks.merge_entry(if max_gamma <= tol.analytic {
            ode.into_vacuous()
        } else {
            ode
        });
    }

    Ok(TheoremReport {
        c_estimate: fit.c,
        space_form_fit_residual: fit.max_residual,
        conformal_applies: conformal,
        umbilic_applies: umbilic,
        checks,
    })
}
