//! Symbol constructors: the phi functions driving convolution-type
//! operators and the measures driving kernel-integral operators.

mod measure;
mod phi;
mod profile;

pub use measure::{
    carleson_check, toeplitz_covariance_check, CarlesonVerdict, DensityKind, MassPoint,
    MeasureSpec,
};
pub use phi::{
    density_to_phi, erf_antiderivative, multiplier_to_phi, sinc_beta, PhiSpec,
};
pub use profile::Profile;
