//! Malliavin gradients obtained by lending a jump to the driving path.
//!
//! The perturbed path is `ω + a·1_{· ≥ u}` with `u` snapped forward to the
//! grid, so the jump is carried by the increment that ends at the snapped
//! point. All difference quotients are central.

pub mod chaos_gradient;
pub mod cylindrical;
pub mod ibp;
pub mod sde;
pub mod supremum;

use serde::{Deserialize, Serialize};

pub use chaos_gradient::{gradient_chaos, sharp_by_contraction};
pub use cylindrical::{gradient_cylindrical, BoundCylindrical, CylindricalFunctional, CylindricalGradient};
pub use ibp::{integration_by_parts_check, registered_pairs, IbpPair, IbpReport};
pub use sde::{
    flow_oracle, flow_oracle_profile, lent_particle_sde, lent_particle_sde_poisson, lent_particle_sde_poisson_profile,
    lent_particle_sde_profile, solve_sde, solve_sde_rotated, PoissonGradient, PoissonProfile, SdeParams, SdeSpec,
};
pub use supremum::{supremum_gradient, SupremumGradient};

/// Default difference step for θ and for jump sizes.
pub const DEFAULT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    JumpDifference,
    FlowOracle,
    Analytic,
}

impl GradientMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::JumpDifference => "jump_difference",
            Self::FlowOracle => "flow_oracle",
            Self::Analytic => "analytic",
        }
    }
}

/// One estimate of `D_u F` (or `D_u X_t`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientEstimate {
    /// Snapped perturbation time.
    pub u: f64,
    pub t: f64,
    pub value: f64,
    pub method: GradientMethod,
    /// Difference step, when one was used.
    pub theta: Option<f64>,
}

/// One Richardson level for a difference quotient with error `O(h^order)`,
/// given values at steps `h` and `h/2`.
pub fn richardson(at_h: f64, at_half: f64, order: i32) -> f64 {
    let w = 2f64.powi(order);
    (w * at_half - at_h) / (w - 1.0)
}

/// Same with an arbitrary step ratio `h_coarse / h_fine`.
pub fn richardson_ratio(coarse: f64, fine: f64, ratio: f64, order: i32) -> f64 {
    let w = ratio.powi(order);
    (w * fine - coarse) / (w - 1.0)
}
