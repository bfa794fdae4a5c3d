//! Built-in setups on the standard structure of `R^7_2`.

use std::sync::Arc;

use crate::contact::{standard_sasakian, ContactMetricStructure};
use crate::expr::{parse_expression, parse_field};
use crate::field::VectorFieldExpr;
use crate::hypersurface::{ExplicitFrame, HypersurfaceSpec};

pub const FIXTURE_N: usize = 3;
pub const FIXTURE_Q: usize = 2;

pub const HYPERPLANE_DEFINING: &str = "x1 - y3";
pub const HYPERPLANE_XI: [&str; 7] = ["2", "0", "0", "0", "0", "2", "2*y1"];
pub const HYPERPLANE_N: [&str; 7] = ["-1", "0", "0", "0", "0", "1", "-y1"];
pub const HYPERPLANE_V: [&str; 7] = ["0", "0", "-2", "-2", "0", "0", "-2*y3"];
pub const HYPERPLANE_U: [&str; 7] = ["0", "0", "-1", "1", "0", "0", "-y3"];
pub const HYPERPLANE_D0: [[&str; 7]; 2] = [
    ["0", "2", "0", "0", "0", "0", "2*y2"],
    ["0", "0", "0", "0", "2", "0", "0"],
];

fn field(name: &str, comps: [&str; 7]) -> VectorFieldExpr {
    let comps: Vec<String> = comps.iter().map(|c| c.to_string()).collect();
    parse_field(name, &comps, FIXTURE_N).expect("fixture fields parse")
}

pub fn standard_structure() -> Arc<ContactMetricStructure> {
    Arc::new(standard_sasakian(FIXTURE_N, FIXTURE_Q).expect("valid signature"))
}

/// Tangent fields of the hyperplane `x1 = y3`:
/// `Z1 = 2(d_x3 - d_y1 + y3 d_z)`, `Z2 = 2(d_x2 + y2 d_z)`, `Z3 = 2 d_y2`,
/// `Z4 = d_x3 + d_y1 + y3 d_z`.
pub fn hyperplane_reference_fields() -> [VectorFieldExpr; 4] {
    [
        field("Z1", ["0", "0", "2", "-2", "0", "0", "2*y3"]),
        field("Z2", HYPERPLANE_D0[0]),
        field("Z3", HYPERPLANE_D0[1]),
        field("Z4", ["0", "0", "1", "1", "0", "0", "y3"]),
    ]
}

/// Frame of `x1 = y3` with `xi = 2(d_x1 + d_y3 + y1 d_z)`,
/// `N = -d_x1 + d_y3 - y1 d_z`, `V = -phi xi = -2 Z4`, `U = -phi N = -Z1/2`,
/// `D0 = {Z2, Z3}`.
pub fn hyperplane_frame() -> ExplicitFrame {
    let [_, z2, z3, _] = hyperplane_reference_fields();
    ExplicitFrame {
        xi: field("xi", HYPERPLANE_XI),
        n: field("N", HYPERPLANE_N),
        v: field("V", HYPERPLANE_V),
        u: field("U", HYPERPLANE_U),
        d0: vec![z2, z3],
    }
}

/// The hyperplane `x1 = y3` with its explicit frame.
pub fn hyperplane_x1_y3() -> HypersurfaceSpec {
    HypersurfaceSpec {
        defining: parse_expression(HYPERPLANE_DEFINING, FIXTURE_N).expect("fixture parses"),
        explicit_frame: Some(hyperplane_frame()),
    }
}

/// The null cone `x1^2 + y1^2 - x3^2 - y3^2 = 0`, without a frame.
pub fn null_cone() -> HypersurfaceSpec {
    HypersurfaceSpec {
        defining: parse_expression("x1*x1 + y1*y1 - x3*x3 - y3*y3", FIXTURE_N)
            .expect("fixture parses"),
        explicit_frame: None,
    }
}
