pub mod bandlimited;
pub mod error;
pub mod hermite;
pub mod io;
pub mod metrology;
pub mod params;
pub mod pswf;
pub mod quadrature;
pub mod superres;

pub use bandlimited::{band_energy_fraction, project, synthesize, BandlimitedFunction};
pub use error::{Error, Result};
pub use hermite::HermiteGaussMode;
pub use params::{plunge_index, SlepianParams};
pub use pswf::{build_basis, lambda0_curve, sinc_kernel, ProlateBasis};
