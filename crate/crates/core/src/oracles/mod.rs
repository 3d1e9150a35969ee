//! Closed-form and quadrature oracles for path functionals and their limits.

pub mod excursion;
pub mod fbm;
pub mod laplace;
pub mod semicircle;

pub use excursion::{
    excursion_fdd_density, excursion_laplace_direct, limit_density, limit_laplace, ExcursionMarginalCdf,
};
pub use fbm::{fbm_density, fbm_joint_moment, fbm_transition, joint_pgf, FbmTimes, JointPgf};
pub use laplace::{brownian_laplace, laplace_joint, laplace_level_increments, laplace_level_increments_centered};
pub use semicircle::{
    level_pgf, motzkin_growth_ratio, semicircle_stieltjes, sulanke_coeffs, sulanke_poly,
};
