//! Quadrature engines.
//!
//! * [`c_alpha`] – the one-dimensional hypersingular constant.
//! * [`radial_integral`] – second-difference integrals along a ray, with
//!   Taylor subtraction near the origin and splitting at kinks.
//! * [`sphere_quadrature`] – integration over the unit sphere against a
//!   spectral density, splitting at cap boundaries.
//! * [`mc_region_volume`] – seeded Monte Carlo volumes of implicit regions.

mod calpha;
pub mod gauss;
pub mod gk;
mod mc;
pub(crate) mod radial;
mod sphere;

pub use calpha::c_alpha;
pub use mc::mc_region_volume;
pub use radial::{radial_correction, radial_integral, RadialMode};
pub use sphere::{sphere_area, sphere_quadrature, sphere_quadrature_with_errors, SphereBreaks};

use crate::error::{Error, Result};

/// Tolerances, budgets and seeds shared by every quadrature routine.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    /// Inner Taylor-subtraction radius, in units of the local scale ρ(x).
    pub t0: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Polar node count for the N = 3 product rule (azimuth uses twice as many).
    pub sphere_nodes: usize,
    pub mc_seed: u64,
    pub mc_samples: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            t0: 0.5,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            sphere_nodes: 32,
            mc_seed: 0x5eed_c0de,
            mc_samples: 20_000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InputDomain(m.to_string()));
        if !(self.t0 > 0.0) {
            return bad("t0 must be positive");
        }
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_subdivisions == 0 {
            return bad("max_subdivisions must be positive");
        }
        if self.sphere_nodes < 4 || !self.sphere_nodes.is_multiple_of(2) {
            return bad("sphere_nodes must be even and at least 4");
        }
        if self.mc_samples < 1000 {
            return bad("mc_samples must be at least 1000");
        }
        Ok(())
    }

    /// Copy with tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self { abs_tol: self.abs_tol * factor, rel_tol: self.rel_tol * factor, ..self.clone() }
    }

    pub(crate) fn tolerance(&self) -> gk::Tolerance {
        gk::Tolerance { abs: self.abs_tol, rel: self.rel_tol, max_subdivisions: self.max_subdivisions }
    }
}

/// Value of an integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub n_evals: usize,
    pub converged: bool,
}

impl IntegralResult {
    pub fn exact(value: f64) -> Self {
        Self { value, abs_error_estimate: 0.0, n_evals: 0, converged: true }
    }

    /// Turns a non-converged result into [`Error::Accuracy`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Accuracy { value: self.value, error: self.abs_error_estimate })
        }
    }
}
