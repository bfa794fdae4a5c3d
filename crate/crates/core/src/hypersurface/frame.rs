//! Adapted frames `{xi, N, V, U, zeta, D0}` on a null hypersurface tangent
//! to zeta.
//!
//! Invariants of a valid frame at every point of `M`:
//! `g(xi,xi) = g(N,N) = 0`, `g(xi,N) = 1`, `xi` normal to `M`,
//! `N` orthogonal to `zeta, V, U`, `V = -phi xi`, `U = -phi N`, and `D0`
//! a nondegenerate complement orthogonal to all of them.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::contact::ContactMetricStructure;
use crate::error::{GeometryError, Result};
use crate::fd::{five_point, Combine, CURVE_STEP};
use crate::field::{Point, VectorField, VectorFieldExpr};
use crate::poly::Poly;
use crate::report::CheckReport;

use super::surface::{raw_metric_gradient, verify_null_tangent, Hypersurface};

/// Relative disagreement between the `h` and `h/2` stencils above which a
/// constructed frame is declared non-differentiable.
pub const SMOOTHNESS_PROBE_TOL: f64 = 1e-6;
/// Smallest `|eigenvalue|` of the `D0` Gram matrix accepted as nondegenerate.
pub const SCREEN_EIGEN_MIN: f64 = 1e-10;
/// Relative tolerance for "direction is tangent to M".
pub const TANGENT_TOL: f64 = 1e-8;

/// A member of the adapted frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Member {
    Xi,
    N,
    V,
    U,
    Zeta,
    D0(usize),
}

impl Member {
    pub fn label(&self) -> String {
        match self {
            Member::Xi => "xi".into(),
            Member::N => "N".into(),
            Member::V => "V".into(),
            Member::U => "U".into(),
            Member::Zeta => "zeta".into(),
            Member::D0(k) => format!("D0[{k}]"),
        }
    }
}

/// One value per frame member.
#[derive(Debug, Clone, PartialEq)]
pub struct Members<T> {
    pub xi: T,
    pub n: T,
    pub v: T,
    pub u: T,
    pub zeta: T,
    pub d0: Vec<T>,
}

impl<T> Members<T> {
    pub fn get(&self, m: Member) -> &T {
        match m {
            Member::Xi => &self.xi,
            Member::N => &self.n,
            Member::V => &self.v,
            Member::U => &self.u,
            Member::Zeta => &self.zeta,
            Member::D0(k) => &self.d0[k],
        }
    }

    /// `[xi, V, U, zeta, D0...]`, a basis of `TM`.
    pub fn tangent_members(&self) -> Vec<Member> {
        let mut out = vec![Member::Xi, Member::V, Member::U, Member::Zeta];
        out.extend((0..self.d0.len()).map(Member::D0));
        out
    }

    pub fn map<S>(&self, mut f: impl FnMut(&T) -> S) -> Members<S> {
        Members {
            xi: f(&self.xi),
            n: f(&self.n),
            v: f(&self.v),
            u: f(&self.u),
            zeta: f(&self.zeta),
            d0: self.d0.iter().map(f).collect(),
        }
    }

    fn all(&self) -> impl Iterator<Item = &T> {
        [&self.xi, &self.n, &self.v, &self.u, &self.zeta]
            .into_iter()
            .chain(self.d0.iter())
    }
}

impl<T: Combine> Combine for Members<T> {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        let pick = |f: &dyn Fn(&Self) -> &T| {
            let col: Vec<(f64, &T)> = terms.iter().map(|(c, m)| (*c, f(m))).collect();
            T::combine(&col)
        };
        Members {
            xi: pick(&|m| &m.xi),
            n: pick(&|m| &m.n),
            v: pick(&|m| &m.v),
            u: pick(&|m| &m.u),
            zeta: pick(&|m| &m.zeta),
            d0: (0..terms[0].1.d0.len())
                .map(|k| pick(&|m| &m.d0[k]))
                .collect(),
        }
    }
}

pub type FrameValues = Members<DVector<f64>>;

impl FrameValues {
    pub fn tangent_basis(&self) -> Vec<DVector<f64>> {
        self.tangent_members()
            .into_iter()
            .map(|m| self.get(m).clone())
            .collect()
    }

    /// `sum_k c_k E_k` over the tangent basis.
    pub fn combination(&self, coeffs: &[f64]) -> DVector<f64> {
        let members = self.tangent_members();
        assert_eq!(
            coeffs.len(),
            members.len(),
            "one coefficient per tangent member"
        );
        let mut out = DVector::zeros(self.xi.len());
        for (c, m) in coeffs.iter().zip(members) {
            out.axpy(*c, self.get(m), 1.0);
        }
        out
    }
}

/// Frame given by polynomial fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitFrame {
    pub xi: VectorFieldExpr,
    pub n: VectorFieldExpr,
    pub v: VectorFieldExpr,
    pub u: VectorFieldExpr,
    pub d0: Vec<VectorFieldExpr>,
}

/// Defining function plus an optional explicit frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HypersurfaceSpec {
    pub defining: Poly,
    pub explicit_frame: Option<ExplicitFrame>,
}

#[derive(Debug, Clone)]
enum Source {
    Explicit(Box<Members<VectorFieldExpr>>),
    /// Chart directions projected to span `D0`, fixed at construction.
    Algorithmic {
        d0_indices: Vec<usize>,
    },
}

/// A frame as fields near a point of the hypersurface.
#[derive(Clone)]
pub struct LocalFrame {
    structure: Arc<ContactMetricStructure>,
    surface: Arc<Hypersurface>,
    source: Source,
}

impl std::fmt::Debug for LocalFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LocalFrame")
            .field("surface", &self.surface)
            .field("source", &self.source)
            .finish_non_exhaustive()
    }
}

fn first_failure(report: &CheckReport) -> Option<GeometryError> {
    report
        .failures()
        .next()
        .map(|e| GeometryError::FrameValidation {
            name: e.name.clone(),
            residual: e.max_residual,
            tolerance: e.tolerance,
        })
}

impl LocalFrame {
    /// Adopts an explicit frame after validating it at `p`.
    pub fn explicit(
        structure: Arc<ContactMetricStructure>,
        surface: Arc<Hypersurface>,
        frame: ExplicitFrame,
        p: &Point,
        tol: f64,
    ) -> Result<Self> {
        let expected = 2 * structure.n() - 4;
        if frame.d0.len() != expected {
            return Err(GeometryError::FrameValidation {
                name: format!("D0 has {} fields, expected {expected}", frame.d0.len()),
                residual: f64::INFINITY,
                tolerance: tol,
            });
        }
        let out = Self::explicit_unchecked(structure, surface, frame);
        let report = out.validate(p, tol)?;
        match first_failure(&report) {
            Some(err) => Err(err),
            None => Ok(out),
        }
    }

    /// Adopts an explicit frame without checking any invariant.
    pub fn explicit_unchecked(
        structure: Arc<ContactMetricStructure>,
        surface: Arc<Hypersurface>,
        frame: ExplicitFrame,
    ) -> Self {
        let members = Members {
            xi: frame.xi,
            n: frame.n,
            v: frame.v,
            u: frame.u,
            zeta: structure.zeta().clone(),
            d0: frame.d0,
        };
        Self {
            structure,
            surface,
            source: Source::Explicit(Box::new(members)),
        }
    }

    /// Constructs the frame from `F` alone, choosing `D0` spanning directions
    /// at `p`.
    pub fn algorithmic(
        structure: Arc<ContactMetricStructure>,
        surface: Arc<Hypersurface>,
        p: &Point,
    ) -> Result<Self> {
        let core = algorithmic_core(&structure, &surface, p)?;
        let d0_indices = choose_screen_directions(&structure, p, &core)?;
        let out = Self {
            structure,
            surface,
            source: Source::Algorithmic { d0_indices },
        };
        out.values(p)?;
        Ok(out)
    }

    pub fn structure(&self) -> &Arc<ContactMetricStructure> {
        &self.structure
    }

    pub fn surface(&self) -> &Arc<Hypersurface> {
        &self.surface
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.source, Source::Explicit(_))
    }

    /// Explicit member fields, when the frame is explicit.
    pub fn explicit_fields(&self) -> Option<&Members<VectorFieldExpr>> {
        match &self.source {
            Source::Explicit(m) => Some(m),
            Source::Algorithmic { .. } => None,
        }
    }

    /// Member values at `p`.
    pub fn values(&self, p: &Point) -> Result<FrameValues> {
        p.expect_dim(self.structure.dim())?;
        match &self.source {
            Source::Explicit(m) => Ok(m.map(|f| f.eval(p))),
            Source::Algorithmic { d0_indices } => {
                let core = algorithmic_core(&self.structure, &self.surface, p)?;
                let g = self.structure.metric_at(p);
                let d0 = d0_indices
                    .iter()
                    .map(|&i| screen_projection(&g, &core, &unit(core.xi.len(), i)))
                    .collect();
                Ok(Members {
                    xi: core.xi,
                    n: core.n,
                    v: core.v,
                    u: core.u,
                    zeta: core.zeta,
                    d0,
                })
            }
        }
    }

    /// Values and first derivatives of every member at `p`.
    pub fn jet(&self, p: &Point) -> Result<FrameJet> {
        let values = self.values(p)?;
        let derivs = match &self.source {
            Source::Explicit(m) => Derivs::Exact(m.map(|f| f.jacobian(p))),
            Source::Algorithmic { .. } => {
                let basis = values.tangent_basis();
                let along = basis
                    .iter()
                    .map(|e| self.probed_derivative(p, e))
                    .collect::<Result<Vec<_>>>()?;
                let mat = DMatrix::from_columns(&basis);
                let pinv = mat
                    .clone()
                    .pseudo_inverse(1e-12)
                    .map_err(|e| GeometryError::InvalidField(e.to_string()))?;
                Derivs::Tangent { mat, pinv, along }
            }
        };
        Ok(FrameJet {
            point: p.clone(),
            values,
            derivs,
        })
    }

    /// Five-point derivative of all members along the retracted curve,
    /// cross-checked against the half step.
    fn probed_derivative(&self, p: &Point, dir: &DVector<f64>) -> Result<FrameValues> {
        let along = |h: f64| {
            five_point(h, |t| {
                let q = self.surface.curve_point(p, dir, t)?;
                self.values(&q)
            })
        };
        let coarse = along(CURVE_STEP)?;
        let fine = along(CURVE_STEP / 2.0)?;
        let mut mismatch = 0.0_f64;
        let mut scale = 1.0_f64;
        for (a, b) in coarse.all().zip(fine.all()) {
            mismatch = mismatch.max((a - b).amax());
            scale = scale.max(a.amax());
        }
        if !(mismatch <= SMOOTHNESS_PROBE_TOL * scale) {
            return Err(GeometryError::FrameNotDifferentiable(mismatch));
        }
        Ok(fine)
    }

    /// Residuals of every frame invariant at `p`.
    pub fn validate(&self, p: &Point, tol: f64) -> Result<CheckReport> {
        let values = self.values(p)?;
        frame_invariants(&self.structure, &self.surface, &values, p, tol)
    }

    /// Same frame with `xi -> alpha xi`, `N -> N / alpha` (explicit only;
    /// `V` and `U` rescale accordingly).
    pub fn rescaled(&self, alpha: f64) -> Option<Self> {
        let m = self.explicit_fields()?;
        let frame = ExplicitFrame {
            xi: m.xi.scale(alpha),
            n: m.n.scale(1.0 / alpha),
            v: m.v.scale(alpha),
            u: m.u.scale(1.0 / alpha),
            d0: m.d0.clone(),
        };
        Some(Self::explicit_unchecked(
            self.structure.clone(),
            self.surface.clone(),
            frame,
        ))
    }
}

/// Builds the frame for `spec` at `p`: validates and adopts an explicit
/// frame when given, otherwise constructs one.
pub fn build_adapted_frame(
    structure: Arc<ContactMetricStructure>,
    spec: &HypersurfaceSpec,
    p: &Point,
    tol: f64,
) -> Result<LocalFrame> {
    let surface = Arc::new(Hypersurface::new(spec.defining.clone())?);
    let pre = verify_null_tangent(&structure, &surface, p, tol)?;
    if let Some(e) = pre.failures().next() {
        return Err(match e.name.as_str() {
            "on_surface" => GeometryError::NotOnSurface(e.max_residual),
            "zeta_tangent" => GeometryError::NotTangent("zeta".into()),
            _ => GeometryError::FrameValidation {
                name: e.name.clone(),
                residual: e.max_residual,
                tolerance: e.tolerance,
            },
        });
    }
    match &spec.explicit_frame {
        Some(frame) => LocalFrame::explicit(structure, surface, frame.clone(), p, tol),
        None => LocalFrame::algorithmic(structure, surface, p),
    }
}

/// Residuals of the frame invariants for given member values.
pub fn frame_invariants(
    s: &ContactMetricStructure,
    surface: &Hypersurface,
    f: &FrameValues,
    p: &Point,
    tol: f64,
) -> Result<CheckReport> {
    let g = s.metric_at(p);
    let phi = s.phi_at(p);
    let eta = s.eta_at(p);
    let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * &g * b)[(0, 0)];
    let df = surface.differential(p);

    let mut r = CheckReport::new();
    r.record("xi_null", "g(xi,xi) = 0", ip(&f.xi, &f.xi).abs(), tol);
    r.record("n_null", "g(N,N) = 0", ip(&f.n, &f.n).abs(), tol);
    r.record(
        "xi_n_pairing",
        "g(xi,N) = 1",
        (ip(&f.xi, &f.n) - 1.0).abs(),
        tol,
    );

    // g xi must be a multiple of dF
    let gxi = &g * &f.xi;
    let normal = if df.norm_squared() > 0.0 {
        (&gxi - &df * (gxi.dot(&df) / df.norm_squared())).amax()
    } else {
        f64::INFINITY
    };
    r.record("xi_normal", "g(xi, X) = 0 for X in TM", normal, tol);

    let n_orth = [&f.zeta, &f.v, &f.u]
        .iter()
        .map(|w| ip(&f.n, w).abs())
        .fold(0.0, f64::max);
    r.record(
        "n_orthogonality",
        "g(N,zeta) = g(N,V) = g(N,U) = 0",
        n_orth,
        tol,
    );
    r.record(
        "v_definition",
        "V = -phi xi",
        (&f.v + &phi * &f.xi).amax(),
        tol,
    );
    r.record(
        "u_definition",
        "U = -phi N",
        (&f.u + &phi * &f.n).amax(),
        tol,
    );
    r.record("eta_xi", "eta(xi) = 0", eta.dot(&f.xi).abs(), tol);

    let scale = df.norm().max(1.0);
    let tangency = [&f.xi, &f.v, &f.u, &f.zeta]
        .into_iter()
        .chain(f.d0.iter())
        .map(|w| df.dot(w).abs() / scale)
        .fold(0.0, f64::max);
    r.record(
        "tangency",
        "dF(X) = 0 for X in {xi, V, U, zeta, D0}",
        tangency,
        tol,
    );

    let others = [&f.xi, &f.n, &f.v, &f.u, &f.zeta];
    let d0_orth =
        f.d0.iter()
            .flat_map(|d| others.iter().map(move |w| (d, *w)))
            .map(|(d, w)| ip(d, w).abs())
            .fold(0.0, f64::max);
    r.record(
        "d0_orthogonality",
        "D0 orthogonal to {xi, N, V, U, zeta}",
        d0_orth,
        tol,
    );

    if !f.d0.is_empty() {
        let gram = DMatrix::from_fn(f.d0.len(), f.d0.len(), |a, b| ip(&f.d0[a], &f.d0[b]));
        let min_eig = gram
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|e| e.abs())
            .fold(f64::INFINITY, f64::min);
        if min_eig < SCREEN_EIGEN_MIN {
            return Err(GeometryError::DegenerateScreen(min_eig));
        }
    }
    Ok(r)
}

/// Pointwise values and derivatives of a frame.
#[derive(Debug, Clone)]
pub struct FrameJet {
    pub point: Point,
    pub values: FrameValues,
    derivs: Derivs,
}

#[derive(Debug, Clone)]
enum Derivs {
    /// Jacobians of polynomial members.
    Exact(Members<DMatrix<f64>>),
    /// Derivatives along the tangent basis columns of `mat`.
    Tangent {
        mat: DMatrix<f64>,
        pinv: DMatrix<f64>,
        along: Vec<FrameValues>,
    },
}

impl FrameJet {
    /// `dW[dir]` for member `W`; `dir` must be tangent unless the frame is
    /// polynomial.
    pub fn derivative(&self, m: Member, dir: &DVector<f64>) -> Result<DVector<f64>> {
        match &self.derivs {
            Derivs::Exact(jac) => Ok(jac.get(m) * dir),
            Derivs::Tangent { mat, pinv, along } => {
                let c = pinv * dir;
                if (mat * &c - dir).amax() > TANGENT_TOL * dir.amax().max(1.0) {
                    return Err(GeometryError::NotTangent(
                        "differentiation direction".into(),
                    ));
                }
                let mut out = DVector::zeros(dir.len());
                for (ck, d) in c.iter().zip(along) {
                    out.axpy(*ck, d.get(m), 1.0);
                }
                Ok(out)
            }
        }
    }

    pub fn value(&self, m: Member) -> &DVector<f64> {
        self.values.get(m)
    }

    pub fn tangent_members(&self) -> Vec<Member> {
        self.values.tangent_members()
    }

    /// A constant-coefficient combination of tangent members as a field
    /// valid at this jet's point.
    pub fn combination(&self, coeffs: &[f64]) -> JetField<'_> {
        JetField {
            jet: self,
            terms: self
                .tangent_members()
                .into_iter()
                .zip(coeffs.iter().copied())
                .map(|(m, c)| (c, m))
                .collect(),
        }
    }

    pub fn member(&self, m: Member) -> JetField<'_> {
        JetField {
            jet: self,
            terms: vec![(1.0, m)],
        }
    }
}

/// `sum c_k W_k` for frame members `W_k`; evaluable only at the jet point.
pub struct JetField<'a> {
    jet: &'a FrameJet,
    terms: Vec<(f64, Member)>,
}

impl JetField<'_> {
    fn at_base(&self, p: &Point) -> Result<()> {
        if p == &self.jet.point {
            Ok(())
        } else {
            Err(GeometryError::InvalidField(
                "frame combination evaluated away from its base point".into(),
            ))
        }
    }
}

impl VectorField for JetField<'_> {
    fn dim(&self) -> usize {
        self.jet.point.dim()
    }

    fn value(&self, p: &Point) -> Result<DVector<f64>> {
        self.at_base(p)?;
        let mut out = DVector::zeros(self.dim());
        for (c, m) in &self.terms {
            out.axpy(*c, self.jet.value(*m), 1.0);
        }
        Ok(out)
    }

    fn derivative(&self, p: &Point, direction: &DVector<f64>) -> Result<DVector<f64>> {
        self.at_base(p)?;
        let mut out = DVector::zeros(self.dim());
        for (c, m) in &self.terms {
            out.axpy(*c, &self.jet.derivative(*m, direction)?, 1.0);
        }
        Ok(out)
    }

    fn name(&self) -> String {
        self.terms
            .iter()
            .map(|(c, m)| format!("{c}*{}", m.label()))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

struct Core {
    xi: DVector<f64>,
    n: DVector<f64>,
    v: DVector<f64>,
    u: DVector<f64>,
    zeta: DVector<f64>,
}

fn unit(d: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(d);
    e[i] = 1.0;
    e
}

/// `xi = g^{-1} dF`, `V = -phi xi`, `N` the minimum-norm solution of
/// `g(N,xi) = 1, g(N,zeta) = g(N,V) = 0` shifted along `xi` to be null,
/// `U = -phi N`.
fn algorithmic_core(s: &ContactMetricStructure, surface: &Hypersurface, p: &Point) -> Result<Core> {
    let xi = raw_metric_gradient(s, surface, p)?;
    let g = s.metric_at(p);
    let phi = s.phi_at(p);
    let zeta = s.zeta_at(p);
    let v = -(&phi * &xi);
    let rows = [
        (&g * &xi).transpose(),
        (&g * &zeta).transpose(),
        (&g * &v).transpose(),
    ];
    let a = DMatrix::from_rows(&rows);
    let aat = &a * a.transpose();
    let b = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    let y = aat
        .clone()
        .lu()
        .solve(&b)
        .ok_or_else(|| GeometryError::DegenerateScreen(aat.determinant().abs()))?;
    let n0 = a.transpose() * y;
    let shift = (n0.transpose() * &g * &n0)[(0, 0)] / 2.0;
    let n = &n0 - &xi * shift;
    let u = -(&phi * &n);
    Ok(Core { xi, n, v, u, zeta })
}

/// Orthogonal projection off `span{xi, N, V, U, zeta}`.
fn screen_projection(g: &DMatrix<f64>, c: &Core, w: &DVector<f64>) -> DVector<f64> {
    let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * g * b)[(0, 0)];
    w - &c.xi * ip(w, &c.n)
        - &c.n * ip(w, &c.xi)
        - &c.v * ip(w, &c.u)
        - &c.u * ip(w, &c.v)
        - &c.zeta * ip(w, &c.zeta)
}

/// Pivoted greedy choice of chart directions whose projections span `D0`.
fn choose_screen_directions(
    s: &ContactMetricStructure,
    p: &Point,
    core: &Core,
) -> Result<Vec<usize>> {
    let d = s.dim();
    let want = 2 * s.n() - 4;
    let g = s.metric_at(p);
    let projected: Vec<DVector<f64>> = (0..d)
        .map(|i| screen_projection(&g, core, &unit(d, i)))
        .collect();
    let mut residual = projected.clone();
    let mut chosen = Vec::with_capacity(want);
    while chosen.len() < want {
        let (best, norm) = residual
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(i, r)| (i, r.norm()))
            .fold(
                (usize::MAX, 0.0),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
        if best == usize::MAX || norm < 1e-8 {
            return Err(GeometryError::DegenerateScreen(norm));
        }
        chosen.push(best);
        let q = &residual[best] / norm;
        for r in residual.iter_mut() {
            let c = q.dot(r);
            r.axpy(-c, &q, 1.0);
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}
