//! Masses, mass-scaled coordinates, potential surfaces, momentum field.
//!
//! For the collinear arrangement A-B-C with bond lengths r_AB and r_BC the
//! kinetic energy diagonalizes in Jacobi coordinates (R_A, r_BC), where
//! R_A is the distance from A to the BC center of mass. Scaling both by
//! mass ratios gives coordinates (x1, x2) in which the kinetic energy is
//! that of a single point of reduced mass
//!
//! ```text
//!     mu0 = sqrt(mA mB mC / (mA + mB + mC)).
//! ```
//!
//! Orientation convention: the incoming channel A + BC runs along
//! decreasing x1 (A far to the left), so
//!
//! ```text
//!     x1 = -alpha (r_AB + c r_BC),    x2 = beta r_BC,
//!     alpha = sqrt(mu_A,BC / mu0),    beta = sqrt(mu_BC / mu0),
//!     c = mC / (mB + mC),
//! ```
//!
//! and the physical wedge r_AB > 0, r_BC > 0 opens leftward-up with skew
//! angle tan(theta) = sqrt(mB M / (mA mC)) between the channel axes.
//!
//! At total energy E the classical momentum field is
//! P0^2(x) = 2 mu0 (E - V(x)); trajectories exist where P0^2 > 0.

mod demo;
mod io;
mod leps;
mod morse;
mod tabulated;

pub use io::{load_surface, save_surface, surface_from_json, surface_to_json};
pub use leps::{LepsParams, PairParams};
pub use morse::{MorseChannelsParams, TransverseWell};
pub use tabulated::TabulatedGrid;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three masses in amu.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassTriple {
    pub m_a: f64,
    pub m_b: f64,
    pub m_c: f64,
}

impl MassTriple {
    pub fn new(m_a: f64, m_b: f64, m_c: f64) -> Result<Self> {
        for (name, m) in [("m_a", m_a), ("m_b", m_b), ("m_c", m_c)] {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::invalid(format!("{name} = {m} must be positive")));
            }
        }
        Ok(MassTriple { m_a, m_b, m_c })
    }

    pub fn total(&self) -> f64 {
        self.m_a + self.m_b + self.m_c
    }

    /// mu0 = sqrt(mA mB mC / M).
    pub fn reduced_mass(&self) -> f64 {
        (self.m_a * self.m_b * self.m_c / self.total()).sqrt()
    }

    /// Angle between the incoming and outgoing channel axes:
    /// tan(theta) = sqrt(mB M / (mA mC)).
    pub fn skew_angle(&self) -> f64 {
        (self.m_b * self.total() / (self.m_a * self.m_c)).sqrt().atan()
    }

    /// Scaling factor on R_A = r_AB + c r_BC.
    pub fn alpha(&self) -> f64 {
        let mu_a_bc = self.m_a * (self.m_b + self.m_c) / self.total();
        (mu_a_bc / self.reduced_mass()).sqrt()
    }

    /// Scaling factor on r_BC.
    pub fn beta(&self) -> f64 {
        let mu_bc = self.m_b * self.m_c / (self.m_b + self.m_c);
        (mu_bc / self.reduced_mass()).sqrt()
    }

    /// c = mC / (mB + mC).
    pub fn c_ratio(&self) -> f64 {
        self.m_c / (self.m_b + self.m_c)
    }

    /// Bond lengths -> mass-scaled plane coordinates.
    pub fn mass_scaled(&self, r_ab: f64, r_bc: f64) -> Result<[f64; 2]> {
        if !(r_ab > 0.0 && r_bc > 0.0) {
            return Err(Error::invalid(format!(
                "bond lengths must be positive: r_ab = {r_ab}, r_bc = {r_bc}"
            )));
        }
        Ok([-self.alpha() * (r_ab + self.c_ratio() * r_bc), self.beta() * r_bc])
    }

    /// Inverse map; values can be non-positive for points outside the
    /// physical wedge (where model potentials still evaluate finitely).
    pub fn bond_lengths(&self, x: [f64; 2]) -> (f64, f64) {
        let r_bc = x[1] / self.beta();
        let r_ab = -x[0] / self.alpha() - self.c_ratio() * r_bc;
        (r_ab, r_bc)
    }

    /// Time derivatives of the bond lengths for a mass-scaled velocity.
    pub fn bond_rates(&self, v: [f64; 2]) -> (f64, f64) {
        let rd_bc = v[1] / self.beta();
        let rd_ab = -v[0] / self.alpha() - self.c_ratio() * rd_bc;
        (rd_ab, rd_bc)
    }
}

/// mu0 for the masses; convenience free function mirroring `MassTriple`.
pub fn reduced_mass(m_a: f64, m_b: f64, m_c: f64) -> Result<f64> {
    Ok(MassTriple::new(m_a, m_b, m_c)?.reduced_mass())
}

/// Rectangle in the mass-scaled plane.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Domain {
    pub x1: [f64; 2],
    pub x2: [f64; 2],
}

impl Domain {
    pub fn new(x1: [f64; 2], x2: [f64; 2]) -> Result<Self> {
        if !(x1[0] < x1[1] && x2[0] < x2[1]) {
            return Err(Error::invalid("domain bounds must be ordered"));
        }
        Ok(Domain { x1, x2 })
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        x[0] >= self.x1[0] && x[0] <= self.x1[1] && x[1] >= self.x2[0] && x[1] <= self.x2[1]
    }
}

/// Functional form of the potential.
#[derive(Clone, Debug)]
pub enum SurfaceModel {
    Leps(LepsParams),
    MorseChannels(MorseChannelsParams),
    Tabulated(TabulatedGrid),
}

/// How exits and channel membership are decided.
#[derive(Clone, Debug)]
pub enum GeometryKind {
    /// Channels along -x1 (incoming) and +x1 (outgoing); transverse x2.
    Straight {
        /// Dissociation threshold on the transverse internal energy, if the
        /// transverse well has finite depth.
        dissociation_energy: Option<f64>,
    },
    /// Bond-coordinate exits: a channel is left when its bond length
    /// exceeds the corresponding threshold.
    Bonds {
        /// Exit threshold on r_AB.
        r_far_ab: f64,
        /// Exit threshold on r_BC.
        r_far_bc: f64,
        /// Diatomic well parameters for bound/unbound classification:
        /// (d, a, r0, energy offset) of each channel's singlet curve.
        ab_pair: PairParams,
        bc_pair: PairParams,
        /// Potential value with all three particles separated.
        plateau: f64,
    },
}

/// Channel layout derived from the surface model.
#[derive(Clone, Debug)]
pub struct ChannelGeometry {
    pub kind: GeometryKind,
    /// Transverse coordinate of the incoming channel floor.
    pub x2_in_center: f64,
    /// Launch abscissa: one asymptotic radius before the interaction region.
    pub x1_launch: f64,
    /// Interaction-region anchor on the x1 axis.
    pub x1_corner: f64,
    /// Longitudinal exit distance.
    pub r_asym: f64,
    /// Membership radius for dwell-time accounting (mass-scaled units,
    /// distance from the corner anchor).
    pub r_interaction: f64,
}

/// A potential surface over a declared domain, with channel geometry.
#[derive(Clone, Debug)]
pub struct PotentialSurface {
    masses: MassTriple,
    model: SurfaceModel,
    domain: Domain,
    geometry: ChannelGeometry,
}

impl PotentialSurface {
    pub fn new(
        masses: MassTriple,
        model: SurfaceModel,
        domain: Domain,
        asymptotic_radius: f64,
    ) -> Result<Self> {
        if !(asymptotic_radius.is_finite() && asymptotic_radius > 0.0) {
            return Err(Error::invalid("asymptotic_radius must be positive"));
        }
        let geometry = match &model {
            SurfaceModel::Leps(p) => {
                p.validate()?;
                let alpha = masses.alpha();
                let beta = masses.beta();
                let x2c = beta * p.bc.r0;
                let corner = -alpha * (p.ab.r0 + masses.c_ratio() * p.bc.r0);
                ChannelGeometry {
                    kind: GeometryKind::Bonds {
                        r_far_ab: p.ab.r0 + asymptotic_radius / alpha,
                        r_far_bc: p.bc.r0 + asymptotic_radius / beta,
                        ab_pair: p.ab,
                        bc_pair: p.bc,
                        plateau: p.bc.d,
                    },
                    x2_in_center: x2c,
                    x1_launch: corner - asymptotic_radius,
                    x1_corner: corner,
                    r_asym: asymptotic_radius,
                    r_interaction: 0.45 * asymptotic_radius,
                }
            }
            SurfaceModel::MorseChannels(p) => {
                p.validate()?;
                ChannelGeometry {
                    kind: GeometryKind::Straight {
                        dissociation_energy: p.transverse.dissociation_energy(),
                    },
                    x2_in_center: p.x2_center,
                    x1_launch: -asymptotic_radius,
                    x1_corner: 0.0,
                    r_asym: asymptotic_radius,
                    r_interaction: 4.0 * p.barrier_width,
                }
            }
            SurfaceModel::Tabulated(g) => {
                g.validate()?;
                let x2c = g.x2_center.unwrap_or(0.5 * (domain.x2[0] + domain.x2[1]));
                ChannelGeometry {
                    kind: GeometryKind::Straight { dissociation_energy: None },
                    x2_in_center: x2c,
                    x1_launch: -asymptotic_radius,
                    x1_corner: 0.0,
                    r_asym: asymptotic_radius,
                    r_interaction: 0.45 * asymptotic_radius,
                }
            }
        };
        let surf = PotentialSurface { masses, model, domain, geometry };
        // Launch point and channel center must lie inside the domain.
        let start = [surf.geometry.x1_launch, surf.geometry.x2_in_center];
        if !surf.domain.contains(start) {
            return Err(Error::invalid(format!(
                "launch point ({}, {}) outside declared domain",
                start[0], start[1]
            )));
        }
        Ok(surf)
    }

    pub fn masses(&self) -> &MassTriple {
        &self.masses
    }

    pub fn model(&self) -> &SurfaceModel {
        &self.model
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn geometry(&self) -> &ChannelGeometry {
        &self.geometry
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        self.domain.contains(x)
    }

    /// V(x); total-separation plateau referenced so the incoming channel
    /// floor sits at zero.
    pub fn value(&self, x: [f64; 2]) -> f64 {
        match &self.model {
            SurfaceModel::Leps(p) => p.value(&self.masses, x),
            SurfaceModel::MorseChannels(p) => p.value(x),
            SurfaceModel::Tabulated(g) => g.value(x),
        }
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        match &self.model {
            SurfaceModel::Leps(p) => p.gradient(&self.masses, x),
            SurfaceModel::MorseChannels(p) => p.gradient(x),
            SurfaceModel::Tabulated(g) => g.gradient(x),
        }
    }

    /// Hessian [[V11, V12], [V12, V22]].
    pub fn hessian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        match &self.model {
            SurfaceModel::Leps(p) => p.hessian(&self.masses, x),
            SurfaceModel::MorseChannels(p) => p.hessian(x),
            SurfaceModel::Tabulated(g) => g.hessian(x),
        }
    }

    /// A reasonable starting point for the saddle search.
    pub fn saddle_guess(&self) -> [f64; 2] {
        match &self.model {
            SurfaceModel::Leps(p) => {
                let alpha = self.masses.alpha();
                let beta = self.masses.beta();
                let c = self.masses.c_ratio();
                let (r_ab, r_bc) = (1.15 * p.ab.r0, 1.15 * p.bc.r0);
                [-alpha * (r_ab + c * r_bc), beta * r_bc]
            }
            _ => [0.0, self.geometry.x2_in_center],
        }
    }
}

/// The momentum field P0^2 = 2 mu0 (E - V) at fixed total energy.
#[derive(Clone, Copy)]
pub struct MomentumField<'a> {
    surface: &'a PotentialSurface,
    energy: f64,
    mu0: f64,
}

impl<'a> MomentumField<'a> {
    pub fn new(surface: &'a PotentialSurface, energy: f64) -> Result<Self> {
        if !energy.is_finite() {
            return Err(Error::invalid("energy must be finite"));
        }
        Ok(MomentumField { surface, energy, mu0: surface.masses().reduced_mass() })
    }

    pub fn surface(&self) -> &'a PotentialSurface {
        self.surface
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    /// P0^2 at a point of the declared domain.
    pub fn p0_sq(&self, x: [f64; 2]) -> Result<f64> {
        if !self.surface.contains(x) {
            return Err(Error::OutsideDomain(x[0], x[1]));
        }
        Ok(2.0 * self.mu0 * (self.energy - self.surface.value(x)))
    }

    /// P0^2 without the domain check (hot paths that already validated).
    pub fn p0_sq_unchecked(&self, x: [f64; 2]) -> f64 {
        2.0 * self.mu0 * (self.energy - self.surface.value(x))
    }

    /// Strictly classically allowed: P0^2 > 0.
    pub fn classically_allowed(&self, x: [f64; 2]) -> Result<bool> {
        Ok(self.p0_sq(x)? > 0.0)
    }

    /// Gradient of P0^2 = -2 mu0 grad V.
    pub fn grad_p0_sq(&self, x: [f64; 2]) -> [f64; 2] {
        let g = self.surface.gradient(x);
        [-2.0 * self.mu0 * g[0], -2.0 * self.mu0 * g[1]]
    }

    /// Derivatives of phi = ln P0: phi_i = -mu0 V_i / P0^2.
    /// Errors on classically forbidden points where phi is undefined.
    pub fn grad_log_p0(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        let p2 = self.p0_sq(x)?;
        if p2 <= 0.0 {
            return Err(Error::Forbidden(self.energy - self.surface.value(x), x[0], x[1]));
        }
        let g = self.surface.gradient(x);
        Ok([-self.mu0 * g[0] / p2, -self.mu0 * g[1] / p2])
    }
}

#[cfg(test)]
mod tests;
