//! Multiplier identities checked by quadrature on analytic test functions.
//!
//! Every identity is evaluated with `f` manufactured from `u`, so residuals
//! measure quadrature error only. Radial integrals use composite Gauss rules
//! with exact angular rules; the box path is a cross-check for the `ℓ = 1`
//! family.

pub mod identities;
pub mod jet;
pub mod magnetic;
pub mod profile;
pub mod quad;
pub mod radi;

pub use identities::{
    gauge_gradient_expansion_defect, gauge_moduli, gauge_phase, gauge_transform, hardy_check,
    identity_1_single_level, identity_2_single_level, identity_3_single_level, identity_residual_1,
    identity_residual_2, identity_residual_3, key_identity_residual, key_identity_single_level,
    relative_residual, triple_identity, HardyRatios, IdentityReport, MultiplierTriple, Term,
};
pub use magnetic::{magnetic_identity_smoke, MagneticReport};
pub use profile::{Family, Profile, Sample, TestFunction};
pub use quad::{Quadrature, CONVERGENCE_TOL};
pub use radi::{
    case_split_bound, radi_identity_terms, CaseSplitReport, ChainCheck, ProbeVerdict, RadiReport,
};
