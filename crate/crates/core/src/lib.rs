//! Spectral solver for the radially symmetric, spatially homogeneous,
//! non-cutoff Boltzmann equation with Maxwellian molecules.

pub mod cascade;
pub mod cross_section;
pub mod error;
pub mod field;
pub mod fourier;
pub mod io;
pub mod ode;
pub mod quadrature;
pub mod scalar;
pub mod specfun;
pub mod spectrum;
pub mod verify;

pub use cascade::{ExpSumSolution, InitialData, ModeCoefficients};
pub use cross_section::{CrossSectionForm, SingularityModel};
pub use error::{Error, Result};
pub use field::{NormKind, ProfileShape, RadialProfile};
pub use fourier::FourierProfile;
pub use ode::StepControl;
pub use quadrature::QuadratureSpec;
pub use scalar::Scalar;
pub use spectrum::SpectrumTables;

pub type Model = SingularityModel<f64>;
pub type Tables = SpectrumTables<f64>;
pub type Coefficients = ModeCoefficients<f64>;
pub type Initial = InitialData<f64>;
pub type Solution = ExpSumSolution<f64>;
pub type Profile = RadialProfile<f64>;
