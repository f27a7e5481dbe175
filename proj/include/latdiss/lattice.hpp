#ifndef LATDISS_LATTICE_HPP
#define LATDISS_LATTICE_HPP

#include <string>
#include <vector>

#include "latdiss/types.hpp"

namespace latdiss {

/// A particle-conserving quadratic lattice Hamiltonian with a single
/// drain site coupled to the engineered reservoir.
///
/// The matrix is stored in units of the hop scale J and must be
/// Hermitian to 1e-12*J elementwise.
struct LatticeModel {
    int n_sites = 0;
    Matrix hamiltonian;  // n_sites x n_sites, Hermitian
    int drain = 0;       // drain site index n0, in [0, n_sites)
    std::string label;
    double hop_scale = 1.0;  // J > 0

    /// Throws std::invalid_argument if the Hermiticity or drain-index
    /// invariants are violated.
    void validate() const;
};

/// Open chain with nearest-neighbor hopping -J and optional on-site
/// potential. Drain defaults to site 0 (an edge site).
LatticeModel build_chain(int n, double j, const std::vector<double>& potential = {});

/// Open chain with an antisymmetric step potential: -v left of the
/// central site, +v right of it, 0 at the center. Drain is the central
/// site; n must be odd.
LatticeModel build_step_chain(int n, double j, double v);

/// Periodic ring with Peierls phase e^{-i flux/n} on each forward hop,
/// threading total flux through the ring. flux is restricted to [0, pi].
/// Drain is site 0.
LatticeModel build_ring_flux(int n, double j, double flux);

/// Open nx x ny square lattice in Landau gauge: x hops are real -J,
/// +y hops at column x carry phase e^{i flux_per_plaquette * x}. Sites
/// are indexed row-major (site = y*nx + x); the drain sits in the top
/// row y=0 at column ceil(nx/2)-1.
LatticeModel build_hofstadter(int nx, int ny, double j, double flux_per_plaquette);

/// Model spec as read from a config file (keys: kind, n/nx/ny, j, flux,
/// v, drain). kind is one of chain, step-chain, ring, hofstadter.
struct ModelSpec {
    std::string kind;
    int n = 0;
    int nx = 0;
    int ny = 0;
    double j = 1.0;
    double flux = 0.0;
    double v = 0.0;
    int drain_override = -1;  // <0 keeps the builder default
};

/// Instantiates the model described by a ModelSpec.
LatticeModel build_model(const ModelSpec& spec);

} // namespace latdiss

#endif
