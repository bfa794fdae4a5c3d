//! Null hypersurfaces `{F = 0}` tangent to zeta, their adapted frames, and
//! induced objects.

pub mod frame;
pub mod induced;
pub mod surface;

pub use frame::{
    build_adapted_frame, frame_invariants, ExplicitFrame, FrameJet, FrameValues, HypersurfaceSpec,
    LocalFrame, Member, Members,
};
pub use induced::{
    form_derivatives, form_matrices, nabla_b, nabla_c, FormDerivatives, InducedGeometry,
};
pub use surface::{metric_gradient, verify_null_tangent, Hypersurface};
