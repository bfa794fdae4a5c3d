//! Acceptance criteria. Prints one line per criterion and exits non-zero if
//! any criterion fails. Every tolerance is pinned here.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lightlike::cli::config::SamplingConfig;
use lightlike::cli::{run, sample_points, Command, RunConfig};
use lightlike::contact::{
    fit_space_form_c, phi_sectional_curvature, verify_almost_contact, verify_sasakian,
    ContactMetricStructure,
};
use lightlike::field::{lie_bracket, Point};
use lightlike::fixtures::{hyperplane_reference_fields, hyperplane_x1_y3, standard_structure};
use lightlike::hypersurface::{
    build_adapted_frame, Hypersurface, HypersurfaceSpec, InducedGeometry, LocalFrame, Member,
};
use lightlike::identities::{
    check_codazzi, check_induced_relations, check_structure_relations, check_theorem_consequences,
    check_uv_derivatives, classify, Class,
};
use lightlike::report::Tolerances;

const SEED: u64 = 42;
const POINTS: usize = 100;

type Outcome = Result<(bool, String), String>;

fn ambient_points() -> Vec<Point> {
    let cfg = SamplingConfig {
        seed: SEED,
        count: POINTS,
        ..SamplingConfig::default()
    };
    sample_points(&cfg, 7, None).expect("ambient sampling")
}

fn surface_points(spec: &HypersurfaceSpec) -> Vec<Point> {
    let surf = Hypersurface::new(spec.defining.clone()).expect("surface");
    let cfg = SamplingConfig {
        seed: SEED,
        count: POINTS,
        ..SamplingConfig::default()
    };
    sample_points(&cfg, 7, Some(&surf)).expect("surface sampling")
}

fn frame_for(spec: &HypersurfaceSpec, points: &[Point]) -> LocalFrame {
    build_adapted_frame(standard_structure(), spec, &points[0], 1e-9).expect("frame")
}

fn inner(s: &ContactMetricStructure, p: &Point, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (s.metric_at(p) * b).dot(a)
}

fn sasakian_axioms() -> Outcome {
    const TOL: f64 = 1e-9;
    let s = standard_structure();
    let mut worst = 0.0_f64;
    for p in &ambient_points() {
        let a = verify_almost_contact(&s, p, TOL).map_err(|e| e.to_string())?;
        let b = verify_sasakian(&s, p, TOL).map_err(|e| e.to_string())?;
        worst = worst.max(a.max_residual()).max(b.max_residual());
    }
    Ok((
        worst < TOL,
        format!("max residual {worst:.3e} (tol {TOL:.0e})"),
    ))
}

fn space_form_constant() -> Outcome {
    const C_TOL: f64 = 1e-6;
    const FIT_TOL: f64 = 1e-7;
    const SECTION_TOL: f64 = 1e-6;
    const SECTIONS: usize = 20;
    let s = standard_structure();
    let points = ambient_points();
    let fit = fit_space_form_c(&s, &points, 64, SEED).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0_f64;
    for p in points.iter().take(SECTIONS) {
        let zeta = s.zeta_at(p);
        let raw = DVector::from_fn(7, |_, _| rng.random_range(-1.0..=1.0));
        let x = &raw - &zeta * s.eta_at(p).dot(&raw);
        let kx = phi_sectional_curvature(&s, &x, p).map_err(|e| e.to_string())?;
        worst = worst.max((kx - fit.c).abs());
    }
    let ok = (fit.c + 3.0).abs() < C_TOL && fit.max_residual < FIT_TOL && worst < SECTION_TOL;
    Ok((
        ok,
        format!(
            "c = {:.12}, fit residual {:.3e}, max |K - c| over {SECTIONS} sections {worst:.3e}",
            fit.c, fit.max_residual
        ),
    ))
}

fn hyperplane_frame_values() -> Outcome {
    const TOL: f64 = 1e-10;
    let spec = hyperplane_x1_y3();
    let points = surface_points(&spec);
    let frame = frame_for(&spec, &points);
    let s = standard_structure();
    let [z1, _, _, z4] = hyperplane_reference_fields();
    let (mut pairing, mut null, mut u_ident, mut v_ident, mut uu, mut vv) =
        (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for p in &points {
        let values = frame.values(p).map_err(|e| e.to_string())?;
        let (xi, n, u, v) = (
            values.get(Member::Xi),
            values.get(Member::N),
            values.get(Member::U),
            values.get(Member::V),
        );
        pairing = pairing.max((inner(&s, p, xi, n) - 1.0).abs());
        null = null
            .max(inner(&s, p, xi, xi).abs())
            .max(inner(&s, p, n, n).abs());
        u_ident = u_ident.max((u + z4.eval(p)).amax());
        v_ident = v_ident.max((v + z1.eval(p)).amax());
        uu = uu.max((inner(&s, p, u, v) - 1.0).abs());
        vv = vv.max((inner(&s, p, v, u) - 1.0).abs());
    }
    let ok = [pairing, null, u_ident, v_ident, uu, vv]
        .iter()
        .all(|r| *r < TOL);
    Ok((
        ok,
        format!(
            "|g(xi,N)-1| {pairing:.1e}, nullness {null:.1e}, |U+Z4| {u_ident:.1e}, |V+Z1| {v_ident:.1e}, \
             |u(U)-1| {uu:.1e}, |v(V)-1| {vv:.1e} (tol {TOL:.0e})"
        ),
    ))
}

fn hyperplane_forms() -> Outcome {
    const BRACKET_TOL: f64 = 1e-12;
    const TOL: f64 = 1e-9;
    let spec = hyperplane_x1_y3();
    let points = surface_points(&spec);
    let frame = frame_for(&spec, &points);
    let fields = frame.explicit_fields().expect("explicit frame");
    let s = standard_structure();
    let (mut bracket, mut b_res, mut c_res, mut c_zeta) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for p in &points {
        let xv = lie_bracket(fields.get(Member::Xi), fields.get(Member::V), p)
            .map_err(|e| e.to_string())?;
        bracket = bracket.max((xv + s.zeta_at(p) * 4.0).amax());

        let geo = InducedGeometry::at(&frame, p).map_err(|e| e.to_string())?;
        let complement: Vec<DVector<f64>> = geo
            .tangent_members()
            .into_iter()
            .filter(|m| *m != Member::Zeta)
            .map(|m| geo.value(m).clone())
            .collect();
        for x in &complement {
            for y in &complement {
                b_res = b_res.max(geo.b_tensor(x, y).map_err(|e| e.to_string())?.abs());
                c_res = c_res.max(geo.c_tensor(x, y).map_err(|e| e.to_string())?.abs());
            }
        }
        let zeta = geo.value(Member::Zeta).clone();
        for x in geo.tangent_basis() {
            c_zeta =
                c_zeta.max((geo.c_tensor(&zeta, &x).map_err(|e| e.to_string())? + geo.v(&x)).abs());
        }
    }
    let ok = bracket <= BRACKET_TOL && b_res < TOL && c_res < TOL && c_zeta < TOL;
    Ok((
        ok,
        format!(
            "|[xi,V]+4 zeta| {bracket:.3e} (tol {BRACKET_TOL:.0e}), B on D+D' {b_res:.1e}, C on D+D' {c_res:.1e}, \
             |C(zeta,X)+v(X)| {c_zeta:.1e} (tol {TOL:.0e})"
        ),
    ))
}

fn structure_relations() -> Outcome {
    const TOL: f64 = 1e-6;
    let spec = hyperplane_x1_y3();
    let points = surface_points(&spec);
    let frame = frame_for(&spec, &points);
    let tol = Tolerances::default();
    let a = check_structure_relations(&frame, &points, &tol).map_err(|e| e.to_string())?;
    let b = check_uv_derivatives(&frame, &points, &tol).map_err(|e| e.to_string())?;
    let (ra, rb) = (a.max_residual(), b.max_residual());
    Ok((
        ra < TOL && rb < TOL,
        format!("structure relations {ra:.3e}, U/V derivatives {rb:.3e} (tol {TOL:.0e})"),
    ))
}

fn codazzi_equations() -> Outcome {
    const TOL: f64 = 1e-6;
    const CONTROL_MIN: f64 = 1e-2;
    let spec = hyperplane_x1_y3();
    let points = surface_points(&spec);
    let frame = frame_for(&spec, &points);
    let good = check_codazzi(&frame, &points, -3.0, TOL).map_err(|e| e.to_string())?;
    let bad = check_codazzi(&frame, &points, 1.0, TOL).map_err(|e| e.to_string())?;
    let curvature = good
        .residual_of("codazzi_b")
        .max(good.residual_of("codazzi_c"));
    let space_form = good
        .residual_of("space_form_codazzi_b")
        .max(good.residual_of("space_form_codazzi_c"));
    let control = bad
        .residual_of("space_form_codazzi_b")
        .max(bad.residual_of("space_form_codazzi_c"));
    Ok((
        curvature < TOL && space_form < TOL && control > CONTROL_MIN,
        format!(
            "curvature form {curvature:.3e}, space form c=-3 {space_form:.3e} (tol {TOL:.0e}), \
             c=1 control {control:.3e} (must exceed {CONTROL_MIN:.0e})"
        ),
    ))
}

fn obstructions() -> Outcome {
    const RESIDUAL_MIN: f64 = 0.5;
    const WITNESS_TOL: f64 = 1e-9;
    const NONMETRIC_TOL: f64 = 1e-6;
    const B_NONZERO: f64 = 1e-6;
    let spec = hyperplane_x1_y3();
    let points = surface_points(&spec);
    let frame = frame_for(&spec, &points);
    let report = classify(&frame, &points, &Tolerances::default()).map_err(|e| e.to_string())?;
    let witnesses = ["|u(U)-1|", "|v(V)-1|", "|B(zeta,U)+1|"];
    let six = [
        Class::TotallyUmbilic,
        Class::ScreenTotallyUmbilic,
        Class::EtaTotallyUmbilic,
        Class::ScreenConformal,
        Class::Invariant,
        Class::ParallelScreen,
    ];
    let mut missing = Vec::new();
    for class in six {
        let e = report.get(class);
        let by_witness = witnesses
            .iter()
            .any(|w| e.witnesses.get(*w).is_some_and(|v| *v < WITNESS_TOL));
        if !(e.residual >= RESIDUAL_MIN || by_witness) {
            missing.push(class.name());
        }
    }
    let mc = report.get(Class::MetricConnection);
    let nonmetric = mc
        .witnesses
        .get("nonmetricity_residual")
        .copied()
        .unwrap_or(f64::INFINITY);
    let max_b = mc.witnesses.get("max|B|").copied().unwrap_or(0.0);
    let ok = missing.is_empty() && nonmetric < NONMETRIC_TOL && max_b > B_NONZERO;
    Ok((
        ok,
        format!(
            "6/6 obstructions exhibited{}; nonmetricity identity {nonmetric:.3e} (tol {NONMETRIC_TOL:.0e}), max|B| {max_b:.3}",
            if missing.is_empty() { String::new() } else { format!(" except {missing:?}") }
        ),
    ))
}

fn contact_screen_consequences() -> Outcome {
    const CLASS_TOL: f64 = 1e-9;
    const OMEGA_TOL: f64 = 1e-9;
    const GAMMA_TOL: f64 = 1e-12;
    let spec = hyperplane_x1_y3();
    let points = surface_points(&spec);
    let frame = frame_for(&spec, &points);
    let tol = Tolerances::default();
    let classes = classify(&frame, &points, &tol).map_err(|e| e.to_string())?;
    let csc = classes.get(Class::ContactScreenConformal);
    let csu = classes.get(Class::ContactScreenUmbilic);
    let report = check_theorem_consequences(&frame, &points, &classes, &tol, SEED)
        .map_err(|e| e.to_string())?;
    let c = &report.checks;
    let gamma = csu.fitted_factor.unwrap_or(f64::NAN);
    let omega = c.residual_of("omega_U");
    let gamma_rel = c.residual_of("gamma_sq_2omegaU");
    let vacuous = ["xi_phi_ode", "gamma_BVV", "xi_gamma_ode"]
        .iter()
        .all(|n| c.get(n).is_some_and(|e| e.vacuous));
    let ok = csc.residual < CLASS_TOL
        && csc.indeterminate_factor
        && csc.fitted_factor.is_none()
        && omega < OMEGA_TOL
        && gamma.abs() < GAMMA_TOL
        && gamma_rel < GAMMA_TOL
        && vacuous;
    Ok((
        ok,
        format!(
            "contact screen conformal residual {:.1e} indeterminate={}, |omega(U)| {omega:.1e}, gamma {gamma:.1e}, \
             |gamma^2-2omega(U)| {gamma_rel:.1e}, derivative clauses vacuous={vacuous}",
            csc.residual, csc.indeterminate_factor
        ),
    ))
}

fn algorithmic_frame() -> Outcome {
    const FRAME_TOL: f64 = 1e-10;
    let spec = HypersurfaceSpec {
        explicit_frame: None,
        ..hyperplane_x1_y3()
    };
    let points = surface_points(&spec);
    let frame = frame_for(&spec, &points);
    let tol = Tolerances::default();
    let mut invariants = 0.0_f64;
    for p in &points {
        invariants = invariants.max(
            frame
                .validate(p, FRAME_TOL)
                .map_err(|e| e.to_string())?
                .max_residual(),
        );
    }
    let mut suites = check_induced_relations(&frame, &points, &tol).map_err(|e| e.to_string())?;
    suites.merge(check_structure_relations(&frame, &points, &tol).map_err(|e| e.to_string())?);
    suites.merge(check_uv_derivatives(&frame, &points, &tol).map_err(|e| e.to_string())?);
    suites.merge(check_codazzi(&frame, &points, -3.0, tol.fd).map_err(|e| e.to_string())?);
    let failed: Vec<&str> = suites.failures().map(|e| e.name.as_str()).collect();
    Ok((
        invariants < FRAME_TOL && failed.is_empty(),
        format!(
            "frame invariants {invariants:.3e} (tol {FRAME_TOL:.0e}), {} suite checks, failing {failed:?}",
            suites.entries.len()
        ),
    ))
}

fn determinism() -> Outcome {
    let config = RunConfig::fixture("hyperplane-x1-y3").map_err(|e| e.to_string())?;
    let a = run(Command::All, config.clone())
        .map_err(|e| e.to_string())?
        .to_json()
        .map_err(|e| e.to_string())?;
    let b = run(Command::All, config)
        .map_err(|e| e.to_string())?
        .to_json()
        .map_err(|e| e.to_string())?;
    Ok((a == b, format!("{} bytes, identical={}", a.len(), a == b)))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("sasakian axioms", sasakian_axioms),
        ("space form constant", space_form_constant),
        ("hyperplane frame values", hyperplane_frame_values),
        ("hyperplane fundamental forms", hyperplane_forms),
        ("structure relation suites", structure_relations),
        ("codazzi equations", codazzi_equations),
        ("classification obstructions", obstructions),
        ("contact screen consequences", contact_screen_consequences),
        ("algorithmic frame", algorithmic_frame),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<30} {}  {detail} [{secs:.2}s]",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
