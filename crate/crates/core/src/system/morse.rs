//! Separable channel surface: an Eckart barrier along x1 and a transverse
//! well in x2.
//!
//! ```text
//!     V(x1, x2) = H sech^2(x1 / w) + W(x2 - x2_center)
//! ```
//!
//! with W either harmonic, k u^2 / 2, or a Morse well D (1 - e^{-b u})^2.
//! Both channel limits x1 -> +-inf converge to the same one-dimensional
//! well, the channel floor sits at V = 0, and the dynamics is integrable,
//! which makes this the calibration surface for the oscillator and
//! Lyapunov machinery.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransverseWell {
    Harmonic {
        /// Force constant, eV/Angstrom^2.
        k: f64,
    },
    Morse {
        /// Well depth, eV.
        depth: f64,
        /// Range parameter, 1/Angstrom.
        inv_width: f64,
    },
}

impl TransverseWell {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            TransverseWell::Harmonic { k } => *k > 0.0,
            TransverseWell::Morse { depth, inv_width } => *depth > 0.0 && *inv_width > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("transverse well parameters must be positive"))
        }
    }

    pub fn dissociation_energy(&self) -> Option<f64> {
        match self {
            TransverseWell::Harmonic { .. } => None,
            TransverseWell::Morse { depth, .. } => Some(*depth),
        }
    }

    fn value(&self, u: f64) -> f64 {
        match self {
            TransverseWell::Harmonic { k } => 0.5 * k * u * u,
            TransverseWell::Morse { depth, inv_width } => {
                let e = (-inv_width * u).exp();
                depth * (1.0 - e) * (1.0 - e)
            }
        }
    }

    fn deriv(&self, u: f64) -> f64 {
        match self {
            TransverseWell::Harmonic { k } => k * u,
            TransverseWell::Morse { depth, inv_width } => {
                let e = (-inv_width * u).exp();
                2.0 * depth * inv_width * e * (1.0 - e)
            }
        }
    }

    fn deriv2(&self, u: f64) -> f64 {
        match self {
            TransverseWell::Harmonic { k } => *k,
            TransverseWell::Morse { depth, inv_width } => {
                let e = (-inv_width * u).exp();
                2.0 * depth * inv_width * inv_width * (2.0 * e * e - e)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MorseChannelsParams {
    /// Barrier height, eV; zero gives a free channel.
    pub barrier_height: f64,
    /// Barrier width, Angstrom.
    pub barrier_width: f64,
    /// Transverse position of the channel floor.
    pub x2_center: f64,
    pub transverse: TransverseWell,
}

impl MorseChannelsParams {
    pub fn validate(&self) -> Result<()> {
        if self.barrier_height < 0.0 || self.barrier_width <= 0.0 {
            return Err(Error::invalid("barrier_height >= 0 and barrier_width > 0 required"));
        }
        self.transverse.validate()
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        let s = 1.0 / (x[0] / self.barrier_width).cosh();
        self.barrier_height * s * s + self.transverse.value(x[1] - self.x2_center)
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let u = x[0] / self.barrier_width;
        let s = 1.0 / u.cosh();
        let t = u.tanh();
        [
            -2.0 * self.barrier_height * s * s * t / self.barrier_width,
            self.transverse.deriv(x[1] - self.x2_center),
        ]
    }

    pub fn hessian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let u = x[0] / self.barrier_width;
        let s = 1.0 / u.cosh();
        let t = u.tanh();
        let d2 = 2.0 * self.barrier_height * s * s * (2.0 * t * t - s * s)
            / (self.barrier_width * self.barrier_width);
        [[d2, 0.0], [0.0, self.transverse.deriv2(x[1] - self.x2_center)]]
    }
}
