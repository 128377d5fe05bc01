//! Built-in surfaces used by the command-line examples and the test suite.

use super::{
    Domain, LepsParams, MassTriple, MorseChannelsParams, PairParams, PotentialSurface,
    SurfaceModel, TransverseWell,
};

impl PotentialSurface {
    /// Exothermic heavy-heavy-light exchange surface with a barrier between
    /// the channels. Masses are Li-F-H-like; pair parameters are a surrogate
    /// tuned so the interesting collision-energy window is roughly
    /// 0.9 to 2.0 eV above the incoming channel floor.
    ///
    /// The strong attractive AC term carves out the landmarks the collision
    /// maps rely on: a shallow pre-barrier well on the incoming channel floor
    /// (V ~ -0.17 eV), the barrier itself (V ~ 0.95 eV), and a deep pocket on
    /// the rearrangement floor just past the corner (V ~ -1.16 eV). Scattering
    /// off the pocket gives the three collision regimes: pure reflection below
    /// the barrier, a resonant band with temporary trapping and fractal
    /// outcome boundaries up to roughly 1.6 eV, and direct rearrangement
    /// across the central offset window above roughly 1.8 eV.
    pub fn demo_leps() -> PotentialSurface {
        let masses = MassTriple::new(6.941, 18.998, 1.008).unwrap();
        let params = LepsParams {
            ab: PairParams { d: 4.8, a: 1.8, r0: 1.65, sato: -0.20 },
            bc: PairParams { d: 4.2, a: 2.1, r0: 0.95, sato: -0.10 },
            ac: PairParams { d: 5.0, a: 1.7, r0: 3.0, sato: 1.0 },
        };
        PotentialSurface::new(
            masses,
            SurfaceModel::Leps(params),
            Domain::new([-14.0, -0.3], [0.2, 10.5]).unwrap(),
            8.0,
        )
        .unwrap()
    }

    /// Integrable separable channel: Eckart barrier along x1, harmonic
    /// transverse well. `barrier_height` in eV; zero gives free passage.
    pub fn demo_separable(barrier_height: f64) -> PotentialSurface {
        let masses = MassTriple::new(6.941, 18.998, 1.008).unwrap();
        let params = MorseChannelsParams {
            barrier_height,
            barrier_width: 0.8,
            x2_center: 0.0,
            transverse: TransverseWell::Harmonic { k: 2.0 },
        };
        PotentialSurface::new(
            masses,
            SurfaceModel::MorseChannels(params),
            Domain::new([-12.0, 12.0], [-4.0, 4.0]).unwrap(),
            8.0,
        )
        .unwrap()
    }

    /// Separable channel with a finite-depth Morse transverse well, for
    /// dissociation paths.
    pub fn demo_separable_morse(barrier_height: f64, depth: f64) -> PotentialSurface {
        let masses = MassTriple::new(6.941, 18.998, 1.008).unwrap();
        let params = MorseChannelsParams {
            barrier_height,
            barrier_width: 0.8,
            x2_center: 0.0,
            transverse: TransverseWell::Morse { depth, inv_width: 1.1 },
        };
        PotentialSurface::new(
            masses,
            SurfaceModel::MorseChannels(params),
            Domain::new([-12.0, 12.0], [-2.5, 12.0]).unwrap(),
            8.0,
        )
        .unwrap()
    }
}
