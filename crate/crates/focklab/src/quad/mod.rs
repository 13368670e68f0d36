//! Quadrature engines: rule generation, log-domain Gaussian integration,
//! divergence classification, and tail integrals outside balls.

pub mod classify;
pub mod integrate;
pub mod rules;
pub mod tail;

pub use classify::{classify_sup_over_rays, default_rays, SupVerdict};
pub use integrate::{
    gauss_weighted_integral, Classification, IntegralVerdict, QuadratureConfig,
};
pub use rules::{gauss_hermite, gauss_legendre, legendre_on, Rule};
pub use tail::{ball_integral, log_gaussian_tail, log_marcum_q, tail_integral};
