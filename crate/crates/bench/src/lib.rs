//! Fixtures shared by the benchmarks.

use wsladder::discretize::{BoxSpec, Layout, Scheme};
use wsladder::{PotentialModel, ScaledHamiltonian};

/// Default tilt in recoil units.
pub const F: f64 = 0.0223015;

/// Scaled Hamiltonian of the below-surface problem at depth `u` on a box of
/// `lattice` periods plus a short exterior.
pub fn surface_hamiltonian(u: f64, lattice: f64, ppp: usize) -> ScaledHamiltonian {
    let m = PotentialModel::surface_below(u, F);
    let b = BoxSpec { lattice_periods: lattice, exterior_periods: lattice / 3.0, points_per_period: ppp, ..BoxSpec::surface_below() };
    Layout::new(&m, &b).unwrap().assemble(0.15, Scheme::Dvr).unwrap()
}
