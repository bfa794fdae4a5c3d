//! Residual-fit classification of a null hypersurface against the umbilic,
//! conformal and contact classes, with the witnesses that exhibit why the
//! classical classes cannot occur when zeta is tangent.
//!
//! Forms are evaluated over the balanced frame basis
//! `[s xi, s V, U / s, zeta, D0...]` with `s = sqrt(|N| / |xi|)` (Euclidean
//! norms). It is the same for every frame in the orbit `xi -> a xi`,
//! `N -> N / a`, so residuals and factors transform covariantly under
//! rescaling.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::Point;
use crate::hypersurface::{InducedGeometry, LocalFrame, Member};
use crate::report::{CheckEntry, CheckReport, Tolerances};

use super::codazzi::FormJet;

/// An obstruction is exhibited when its class residual reaches this value...
pub const OBSTRUCTION_RESIDUAL: f64 = 0.5;
/// ...or when one of its witnesses is within this distance of the value
/// that contradicts the class.
pub const WITNESS_TOL: f64 = 1e-9;
/// Pooled `sum a^2` below which a fitted factor is indeterminate.
pub const INDETERMINATE_SUM: f64 = 1e-14;

pub const U_OF_U: &str = "|u(U)-1|";
pub const V_OF_V: &str = "|v(V)-1|";
pub const B_ZETA_U: &str = "|B(zeta,U)+1|";
pub const C_ZETA_V: &str = "|C(zeta,V)+1|";
pub const MAX_U: &str = "max|u|";
pub const MAX_B: &str = "max|B|";
pub const NONMETRICITY: &str = "nonmetricity_residual";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    TotallyUmbilic,
    ScreenTotallyUmbilic,
    EtaTotallyUmbilic,
    TotallyContactUmbilic,
    ScreenConformal,
    Invariant,
    ContactScreenConformal,
    ContactScreenUmbilic,
    ParallelScreen,
    MetricConnection,
}

impl Class {
    pub const ALL: [Class; 10] = [
        Class::TotallyUmbilic,
        Class::ScreenTotallyUmbilic,
        Class::EtaTotallyUmbilic,
        Class::TotallyContactUmbilic,
        Class::ScreenConformal,
        Class::Invariant,
        Class::ContactScreenConformal,
        Class::ContactScreenUmbilic,
        Class::ParallelScreen,
        Class::MetricConnection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Class::TotallyUmbilic => "totally_umbilic",
            Class::ScreenTotallyUmbilic => "screen_totally_umbilic",
            Class::EtaTotallyUmbilic => "eta_totally_umbilic",
            Class::TotallyContactUmbilic => "totally_contact_umbilic",
            Class::ScreenConformal => "screen_conformal",
            Class::Invariant => "invariant",
            Class::ContactScreenConformal => "contact_screen_conformal",
            Class::ContactScreenUmbilic => "contact_screen_umbilic",
            Class::ParallelScreen => "parallel_screen",
            Class::MetricConnection => "metric_connection",
        }
    }

    pub fn anchor(self) -> &'static str {
        match self {
            Class::TotallyUmbilic => "B(X,Y) = rho g(X,Y)",
            Class::ScreenTotallyUmbilic => "C(X,PY) = rho g(X,PY)",
            Class::EtaTotallyUmbilic => "B(X,Y) = lambda {g(X,Y) - eta(X)eta(Y)}",
            Class::TotallyContactUmbilic => {
                "B(X,Y) = lambda {g(X,Y) - eta(X)eta(Y)} - eta(Y)u(X) - eta(X)u(Y)"
            }
            Class::ScreenConformal => "C(X,PY) = psi B(X,PY)",
            Class::Invariant => "phi^ X in TM for X in TM, i.e. u = 0",
            Class::ContactScreenConformal => "C(P~X,P~Y) = varphi B(P~X,P~Y)",
            Class::ContactScreenUmbilic => "C(P~X,P~PY) = gamma g(P~X,P~Y)",
            Class::ParallelScreen => "C(X,PY) = 0",
            Class::MetricConnection => "nabla g = 0",
        }
    }

    /// Classes that cannot occur for a null hypersurface tangent to zeta,
    /// with the witnesses that exhibit the contradiction.
    pub fn obstruction_witnesses(self) -> Option<&'static [&'static str]> {
        match self {
            Class::TotallyUmbilic | Class::EtaTotallyUmbilic | Class::MetricConnection => {
                Some(&[B_ZETA_U, U_OF_U])
            }
            Class::ScreenTotallyUmbilic | Class::ParallelScreen => Some(&[C_ZETA_V, V_OF_V]),
            Class::ScreenConformal => Some(&[V_OF_V]),
            Class::Invariant => Some(&[U_OF_U]),
            _ => None,
        }
    }

    fn fitted(self) -> bool {
        !matches!(
            self,
            Class::Invariant | Class::ParallelScreen | Class::MetricConnection
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub class_name: String,
    pub anchor: String,
    /// Pooled least-squares factor; absent for unfitted classes and when
    /// indeterminate.
    pub fitted_factor: Option<f64>,
    pub indeterminate_factor: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub witnesses: BTreeMap<String, f64>,
    pub obstruction: bool,
    /// For obstructions: the residual is large or a witness shows the
    /// contradiction.
    pub exhibited: bool,
}

impl ClassEntry {
    pub fn holds(&self) -> bool {
        self.residual < self.tolerance
    }

    pub fn to_check(&self) -> CheckEntry {
        let mut e = if self.obstruction {
            CheckEntry::obstruction(
                &self.class_name,
                &self.anchor,
                self.residual,
                self.tolerance,
                self.exhibited,
            )
        } else {
            CheckEntry::residual(
                &self.class_name,
                &self.anchor,
                self.residual,
                self.tolerance,
            )
        };
        for (k, v) in &self.witnesses {
            e = e.with_witness(k.clone(), *v);
        }
        if let Some(f) = self.fitted_factor {
            e = e.with_witness("fitted_factor", f);
        }
        if self.indeterminate_factor {
            e = e.with_witness("indeterminate_factor", 1.0);
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub classes: Vec<ClassEntry>,
}

impl ClassificationReport {
    pub fn get(&self, class: Class) -> &ClassEntry {
        self.classes
            .iter()
            .find(|e| e.class_name == class.name())
            .expect("every class is reported")
    }

    pub fn to_checks(&self) -> CheckReport {
        CheckReport {
            entries: self.classes.iter().map(ClassEntry::to_check).collect(),
        }
    }
}

/// Pointwise forms over the balanced basis.
#[derive(Debug, Clone)]
pub struct BalancedForms {
    /// `sqrt(|N| / |xi|)`.
    pub scale: f64,
    /// Coefficients of the balanced basis in the frame basis.
    pub weights: Vec<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    g: DMatrix<f64>,
    eta: DVector<f64>,
    u: DVector<f64>,
    b_contact: DMatrix<f64>,
    c_contact: DMatrix<f64>,
    g_contact: DMatrix<f64>,
}

impl BalancedForms {
    pub fn at(geo: &InducedGeometry) -> Result<Self> {
        let scale = (geo.n().norm() / geo.xi().norm()).sqrt();
        let members = geo.tangent_members();
        let weights: Vec<f64> = members
            .iter()
            .map(|m| match m {
                Member::Xi | Member::V => scale,
                Member::U => 1.0 / scale,
                _ => 1.0,
            })
            .collect();
        let e: Vec<DVector<f64>> = members
            .iter()
            .zip(&weights)
            .map(|(m, w)| geo.value(*m) * *w)
            .collect();
        let k = e.len();
        let contact: Vec<DVector<f64>> = e.iter().map(|x| geo.contact_projection(x)).collect();

        let table = |f: &dyn Fn(&DVector<f64>, &DVector<f64>) -> Result<f64>,
                     basis: &[DVector<f64>]| {
            let mut m = DMatrix::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    m[(i, j)] = f(&basis[i], &basis[j])?;
                }
            }
            Ok::<_, crate::error::GeometryError>(m)
        };
        Ok(Self {
            scale,
            b: table(&|x, y| geo.b_tensor(x, y), &e)?,
            c: table(&|x, y| geo.c_tensor(x, y), &e)?,
            g: table(&|x, y| Ok(geo.g(x, y)), &e)?,
            eta: DVector::from_iterator(k, e.iter().map(|x| geo.eta(x))),
            u: DVector::from_iterator(k, e.iter().map(|x| geo.u(x))),
            b_contact: table(&|x, y| geo.b_tensor(x, y), &contact)?,
            c_contact: table(&|x, y| geo.c_tensor(x, y), &contact)?,
            g_contact: table(&|x, y| Ok(geo.g(x, y)), &contact)?,
            weights,
        })
    }

    /// `(b, a)` of the fit `b = f a` for a fitted class.
    pub fn fit_pair(&self, class: Class) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
        let eta_eta = &self.eta * self.eta.transpose();
        let eta_u = &self.u * self.eta.transpose();
        Some(match class {
            Class::TotallyUmbilic => (self.b.clone(), self.g.clone()),
            Class::ScreenTotallyUmbilic => (self.c.clone(), self.g.clone()),
            Class::EtaTotallyUmbilic => (self.b.clone(), &self.g - eta_eta),
            Class::TotallyContactUmbilic => {
                (&self.b + &eta_u + eta_u.transpose(), &self.g - eta_eta)
            }
            Class::ScreenConformal => (self.c.clone(), self.b.clone()),
            Class::ContactScreenConformal => (self.c_contact.clone(), self.b_contact.clone()),
            Class::ContactScreenUmbilic => (self.c_contact.clone(), self.g_contact.clone()),
            _ => return None,
        })
    }

    /// Pointwise least-squares factor, `None` when `sum a^2` is negligible.
    pub fn factor(&self, class: Class) -> Option<f64> {
        let (b, a) = self.fit_pair(class)?;
        let aa = a.norm_squared();
        (aa >= INDETERMINATE_SUM).then(|| b.dot(&a) / aa)
    }
}

#[derive(Default)]
struct Accumulator {
    ab: f64,
    aa: f64,
    residual: f64,
}

/// Fits every class over all frame pairs at all points.
pub fn classify(
    frame: &LocalFrame,
    points: &[Point],
    tol: &Tolerances,
) -> Result<ClassificationReport> {
    let mut acc: Vec<Accumulator> = Class::ALL.iter().map(|_| Accumulator::default()).collect();
    let mut w: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut bump = |key: &'static str, value: f64| {
        let slot = w.entry(key).or_insert(0.0);
        *slot = slot.max(value);
    };
    for p in points {
        let jet = FormJet::at(frame, p)?;
        let geo = &jet.geometry;
        let forms = BalancedForms::at(geo)?;
        let value = |m: Member| geo.value(m).clone();
        let (u, v, zeta) = (value(Member::U), value(Member::V), value(Member::Zeta));

        bump(U_OF_U, (geo.u(&u) - 1.0).abs());
        bump(V_OF_V, (geo.v(&v) - 1.0).abs());
        bump(B_ZETA_U, (geo.b_tensor(&zeta, &u)? + 1.0).abs());
        bump(C_ZETA_V, (geo.c_tensor(&zeta, &v)? + 1.0).abs());
        bump(MAX_U, forms.u.amax());
        bump(MAX_B, forms.b.amax());

        let k = jet.rank();
        let mut nonmetric = 0.0_f64;
        let mut max_nabla_g = 0.0_f64;
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    let (x, y, z) = (
                        jet.basis_vector(i),
                        jet.basis_vector(j),
                        jet.basis_vector(l),
                    );
                    nonmetric = nonmetric.max(jet.nonmetricity(&x, &y, &z));
                    let scaled = forms.weights[i] * forms.weights[j] * forms.weights[l];
                    max_nabla_g = max_nabla_g.max((scaled * jet.nabla_g(&x, &y, &z)).abs());
                }
            }
        }
        bump(NONMETRICITY, nonmetric);

        for (class, a) in Class::ALL.iter().zip(acc.iter_mut()) {
            let residual = match forms.fit_pair(*class) {
                Some((bm, am)) => {
                    a.ab += bm.dot(&am);
                    a.aa += am.norm_squared();
                    let f = forms.factor(*class).unwrap_or(0.0);
                    (bm - am * f).amax()
                }
                None => match class {
                    Class::Invariant => forms.u.amax(),
                    Class::ParallelScreen => forms.c.amax(),
                    Class::MetricConnection => max_nabla_g,
                    _ => unreachable!("fitted classes handled above"),
                },
            };
            a.residual = a.residual.max(residual);
        }
    }

    let classes = Class::ALL
        .iter()
        .zip(acc)
        .map(|(class, a)| {
            let indeterminate = class.fitted() && a.aa < INDETERMINATE_SUM;
            let fitted_factor = (class.fitted() && !indeterminate).then(|| a.ab / a.aa);
            let witnesses: BTreeMap<String, f64> = w
                .iter()
                .filter(|(k, _)| {
                    !matches!(**k, MAX_B | NONMETRICITY) || *class == Class::MetricConnection
                })
                .map(|(k, v)| (k.to_string(), *v))
                .collect();
            let (obstruction, exhibited) = match class.obstruction_witnesses() {
                Some(keys) => {
                    let witnessed = keys
                        .iter()
                        .any(|k| w.get(k).is_some_and(|v| *v < WITNESS_TOL));
                    (true, a.residual >= OBSTRUCTION_RESIDUAL || witnessed)
                }
                None => (false, false),
            };
            ClassEntry {
                class_name: class.name().to_string(),
                anchor: class.anchor().to_string(),
                fitted_factor,
                indeterminate_factor: indeterminate,
                residual: a.residual,
                tolerance: tol.fit,
                witnesses,
                obstruction,
                exhibited,
            }
        })
        .collect();
    Ok(ClassificationReport { classes })
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
            Point::new(vec![0.0, 0.4, -0.3, -0.5, 0.2, 0.0, 0.9]).unwrap(),
        ]
    }

    #[test]
    fn hyperplane_classification() {
        let r = classify(&frame(), &points(), &Tolerances::default()).unwrap();
        let tu = r.get(Class::TotallyUmbilic);
        assert!(tu.obstruction && tu.exhibited);
        assert!(tu.residual >= 1.0 - 1e-9, "{}", tu.residual);
        assert!(tu.witnesses[B_ZETA_U] < 1e-9);

        let csc = r.get(Class::ContactScreenConformal);
        assert!(csc.residual < 1e-9 && csc.indeterminate_factor && csc.fitted_factor.is_none());

        let csu = r.get(Class::ContactScreenUmbilic);
        assert!(csu.residual < 1e-9);
        assert_eq!(csu.fitted_factor.map(|g| g.abs() < 1e-12), Some(true));

        let mc = r.get(Class::MetricConnection);
        assert!(mc.exhibited && mc.witnesses[NONMETRICITY] < 1e-6 && mc.witnesses[MAX_B] > 0.5);
        for e in r.classes.iter().filter(|e| e.obstruction) {
            assert!(e.exhibited, "{}", e.class_name);
        }
        assert!(r.to_checks().all_pass());
    }
}
