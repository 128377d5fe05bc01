//! Unit system: energies in eV, masses in amu, lengths in Angstrom.
//!
//! Derived units follow without further conversion factors: momentum in
//! sqrt(eV amu), action in sqrt(eV amu) Angstrom, time in
//! Angstrom sqrt(amu/eV) (about 10.18 fs). Exactly one physical constant
//! enters the model equations.

/// Reduced Planck constant in sqrt(eV amu) Angstrom.
///
/// hbar = 1.054571817e-34 J s, eV = 1.602176634e-19 J (exact),
/// amu = 1.66053906660e-27 kg, converted into the working unit system.
pub const HBAR: f64 = 0.06465415130134121;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hbar_matches_si_conversion() {
        let hbar_si = 1.054571817e-34_f64;
        let ev = 1.602176634e-19_f64;
        let amu = 1.66053906660e-27_f64;
        let ang = 1e-10;
        let expect = hbar_si / (ang * (ev * amu).sqrt());
        assert!((HBAR - expect).abs() < 1e-15, "HBAR off: {HBAR} vs {expect}");
    }
}
