//! Complex polynomials, rational functions, trigonometric polynomials on the
//! circle, spectral factorization and pythagorean mates.

mod mate;
mod poly;
mod rat;
mod roots;
mod trig;

pub use mate::{
    default_truncation, mate, poly_series_div, series_div, BoundaryZero, RationalMate, BOUNDARY_TOL,
    MATE_GRID,
};
pub use poly::Poly;
pub use rat::Rat;
pub use roots::{root_values, roots, Root, CLUSTER_TOL};
pub use trig::{fejer_riesz, spectral_factor, SpectralFactor, TrigPoly};

use num_complex::Complex64;

use crate::error::Result;

/// Anything that can be evaluated on the closed disc.
pub trait DiscFunction: Sync {
    fn value(&self, z: Complex64) -> Result<Complex64>;
    /// Fails if the function has a pole in the closed disc.
    fn check_closed_disc(&self) -> Result<()>;
    /// Upper bound for `|f'|` on the closed disc.
    fn lipschitz(&self) -> Result<f64>;
}

impl DiscFunction for Poly {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z))
    }
    fn check_closed_disc(&self) -> Result<()> {
        Ok(())
    }
    fn lipschitz(&self) -> Result<f64> {
        Ok(self.derivative_bound())
    }
}

impl DiscFunction for Rat {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        self.eval(z)
    }
    fn check_closed_disc(&self) -> Result<()> {
        self.check_holomorphic_closed_disc()
    }
    fn lipschitz(&self) -> Result<f64> {
        self.derivative_bound()
    }
}
