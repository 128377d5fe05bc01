//! London-Eyring-Polanyi-Sato surface for the collinear exchange reaction.
//!
//! Each pair carries a Morse singlet curve and a Sato-weighted anti-Morse
//! triplet curve,
//!
//! ```text
//!     E1(r) = D (e^{-2a(r-r0)} - 2 e^{-a(r-r0)})
//!     E3(r) = (D/2) (e^{-2a(r-r0)} + 2 e^{-a(r-r0)})
//!     Q = (E1 + w E3) / 2,   J = (E1 - w E3) / 2,   w = (1 - S) / (1 + S),
//! ```
//!
//! combined through the London equation
//!
//! ```text
//!     V = Q_AB + Q_BC + Q_AC
//!         - sqrt(J_AB^2 + J_BC^2 + J_AC^2 - J_AB J_BC - J_BC J_AC - J_AC J_AB).
//! ```
//!
//! On the collinear line r_AC = r_AB + r_BC. In either asymptotic channel
//! the expression reduces exactly to the Morse curve of the surviving
//! diatomic, so the surface value is shifted by +D_BC to place the
//! incoming channel floor at zero energy.
//!
//! Derivatives are analytic: the bond map is linear in the mass-scaled
//! coordinates, so gradients and Hessians chain through a constant matrix.

use serde::{Deserialize, Serialize};

use super::MassTriple;
use crate::error::{Error, Result};

/// Morse/Sato parameters for one atom pair.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PairParams {
    /// Well depth, eV.
    pub d: f64,
    /// Range parameter, 1/Angstrom.
    pub a: f64,
    /// Equilibrium separation, Angstrom.
    pub r0: f64,
    /// Sato overlap parameter, dimensionless, > -1.
    pub sato: f64,
}

impl PairParams {
    fn validate(&self, name: &str) -> Result<()> {
        if !(self.d > 0.0 && self.a > 0.0 && self.r0 > 0.0) {
            return Err(Error::invalid(format!("{name}: d, a, r0 must be positive")));
        }
        if self.sato <= -1.0 {
            return Err(Error::invalid(format!("{name}: sato must exceed -1")));
        }
        Ok(())
    }

    /// Morse singlet curve E1(r).
    pub fn singlet(&self, r: f64) -> f64 {
        let e1 = (-self.a * (r - self.r0)).exp();
        self.d * (e1 * e1 - 2.0 * e1)
    }

    fn w(&self) -> f64 {
        (1.0 - self.sato) / (1.0 + self.sato)
    }

    /// (Q, J) with first and second radial derivatives.
    fn qj(&self, r: f64) -> PairTerms {
        let e1 = (-self.a * (r - self.r0)).exp();
        let e2 = e1 * e1;
        let (d, a) = (self.d, self.a);
        let s = d * (e2 - 2.0 * e1);
        let s1 = 2.0 * a * d * (e1 - e2);
        let s2 = 2.0 * a * a * d * (2.0 * e2 - e1);
        let t = 0.5 * d * (e2 + 2.0 * e1);
        let t1 = -a * d * (e2 + e1);
        let t2 = a * a * d * (2.0 * e2 + e1);
        let w = self.w();
        PairTerms {
            q: 0.5 * (s + w * t),
            q1: 0.5 * (s1 + w * t1),
            q2: 0.5 * (s2 + w * t2),
            j: 0.5 * (s - w * t),
            j1: 0.5 * (s1 - w * t1),
            j2: 0.5 * (s2 - w * t2),
        }
    }
}

struct PairTerms {
    q: f64,
    q1: f64,
    q2: f64,
    j: f64,
    j1: f64,
    j2: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LepsParams {
    pub ab: PairParams,
    pub bc: PairParams,
    pub ac: PairParams,
}

/// Below this the exchange square root and its derivatives are treated as
/// zero; K decays exponentially in the far field and reaches this level
/// only where the exchange term is far below measurable.
const K_FLOOR: f64 = 1e-240;

impl LepsParams {
    pub fn validate(&self) -> Result<()> {
        self.ab.validate("ab")?;
        self.bc.validate("bc")?;
        self.ac.validate("ac")
    }

    /// Value, gradient, and Hessian in bond coordinates (r_AB, r_BC).
    fn eval_bonds(&self, r_ab: f64, r_bc: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let p1 = self.ab.qj(r_ab);
        let p2 = self.bc.qj(r_bc);
        let p3 = self.ac.qj(r_ab + r_bc);

        let (j1, j2, j3) = (p1.j, p2.j, p3.j);
        let k = j1 * j1 + j2 * j2 + j3 * j3 - j1 * j2 - j2 * j3 - j3 * j1;

        // dK/dr1 and dK/dr2; J3 depends on both bonds.
        let dk_dj1 = 2.0 * j1 - j2 - j3;
        let dk_dj2 = 2.0 * j2 - j1 - j3;
        let dk_dj3 = 2.0 * j3 - j1 - j2;
        let k_r1 = dk_dj1 * p1.j1 + dk_dj3 * p3.j1;
        let k_r2 = dk_dj2 * p2.j1 + dk_dj3 * p3.j1;
        let k_r1r1 = 2.0 * (p1.j1 * p1.j1 - p1.j1 * p3.j1 + p3.j1 * p3.j1)
            + dk_dj1 * p1.j2
            + dk_dj3 * p3.j2;
        let k_r2r2 = 2.0 * (p2.j1 * p2.j1 - p2.j1 * p3.j1 + p3.j1 * p3.j1)
            + dk_dj2 * p2.j2
            + dk_dj3 * p3.j2;
        let k_r1r2 = -(p2.j1 + p3.j1) * p1.j1
            + (2.0 * p3.j1 - p2.j1) * p3.j1
            + dk_dj3 * p3.j2;

        let (g, g_r1, g_r2, g_r1r1, g_r1r2, g_r2r2) = if k > K_FLOOR {
            let g = k.sqrt();
            let gr1 = 0.5 * k_r1 / g;
            let gr2 = 0.5 * k_r2 / g;
            (
                g,
                gr1,
                gr2,
                0.5 * k_r1r1 / g - 0.25 * k_r1 * k_r1 / (g * g * g),
                0.5 * k_r1r2 / g - 0.25 * k_r1 * k_r2 / (g * g * g),
                0.5 * k_r2r2 / g - 0.25 * k_r2 * k_r2 / (g * g * g),
            )
        } else {
            (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        };

        let v = p1.q + p2.q + p3.q - g + self.bc.d;
        let vr = [p1.q1 + p3.q1 - g_r1, p2.q1 + p3.q1 - g_r2];
        let vh = [
            [p1.q2 + p3.q2 - g_r1r1, p3.q2 - g_r1r2],
            [p3.q2 - g_r1r2, p2.q2 + p3.q2 - g_r2r2],
        ];
        (v, vr, vh)
    }

    /// Jacobian d(r_AB, r_BC)/d(x1, x2); constant.
    fn bond_jacobian(masses: &MassTriple) -> [[f64; 2]; 2] {
        let alpha = masses.alpha();
        let beta = masses.beta();
        let c = masses.c_ratio();
        [[-1.0 / alpha, -c / beta], [0.0, 1.0 / beta]]
    }

    pub fn value(&self, masses: &MassTriple, x: [f64; 2]) -> f64 {
        let (r_ab, r_bc) = masses.bond_lengths(x);
        self.eval_bonds(r_ab, r_bc).0
    }

    pub fn gradient(&self, masses: &MassTriple, x: [f64; 2]) -> [f64; 2] {
        let (r_ab, r_bc) = masses.bond_lengths(x);
        let (_, vr, _) = self.eval_bonds(r_ab, r_bc);
        let m = Self::bond_jacobian(masses);
        [vr[0] * m[0][0] + vr[1] * m[1][0], vr[0] * m[0][1] + vr[1] * m[1][1]]
    }

    pub fn hessian(&self, masses: &MassTriple, x: [f64; 2]) -> [[f64; 2]; 2] {
        let (r_ab, r_bc) = masses.bond_lengths(x);
        let (_, _, vh) = self.eval_bonds(r_ab, r_bc);
        let m = Self::bond_jacobian(masses);
        // H_x = M^T H_r M with M = d(r)/d(x).
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for p in 0..2 {
                    for q in 0..2 {
                        acc += m[p][i] * vh[p][q] * m[q][j];
                    }
                }
                out[i][j] = acc;
            }
        }
        out
    }
}
