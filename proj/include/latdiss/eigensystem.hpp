#ifndef LATDISS_EIGENSYSTEM_HPP
#define LATDISS_EIGENSYSTEM_HPP

#include <iosfwd>
#include <vector>

#include "latdiss/lattice.hpp"
#include "latdiss/types.hpp"

namespace latdiss {

/// Energy eigenmodes of a lattice Hamiltonian restricted to the sector
/// that couples to the drain site.
///
/// Degenerate subspaces are rotated so that exactly one combination
/// carries all drain weight; the remaining combinations (and any mode
/// with drain weight <= drop_tolerance) are moved to the dropped_*
/// arrays. Retained modes are sorted ascending in energy and each
/// eigenvector is scaled so its largest-magnitude component is real
/// positive.
struct EigenSystem {
    RealVector energies;      // M, ascending
    Matrix wavefunctions;     // N x M, orthonormal columns
    Vector drain_amp;         // M, psi_i(n0)
    RealVector drain_phase;   // M, arg psi_i(n0)
    RealVector drain_weight;  // M, |psi_i(n0)|^2 (Gamma-independent part of Gbar_i)
    RealVector spacing;       // M, local level spacing Delta_i

    RealVector dropped_energies;   // K
    Matrix dropped_wavefunctions;  // N x K

    int drain = 0;
    double hop_scale = 1.0;
    double drop_tolerance = 1e-12;

    int n_modes() const { return static_cast<int>(energies.size()); }
    int n_sites() const { return static_cast<int>(wavefunctions.rows()); }
    int n_dropped() const { return static_cast<int>(dropped_energies.size()); }

    /// Effective reservoir coupling Gbar_i = |psi_i(n0)|^2 * Gamma.
    RealVector couplings(double gamma) const { return drain_weight * gamma; }
};

struct EigenOptions {
    double drop_tolerance = 1e-12;  // on |psi_i(n0)|^2
    double degeneracy_gap = 1e-9;   // in units of hop_scale
};

/// Hermitian eigendecomposition of model.hamiltonian, keeping only the
/// drain-coupled modes. Throws std::invalid_argument on non-Hermitian
/// input and NumericError if the eigensolver fails.
EigenSystem diagonalize_coupled(const LatticeModel& model, const EigenOptions& opts = {});

/// Local level spacing Delta_i: centered difference for interior modes,
/// one-sided at the spectrum endpoints. Requires at least two modes.
RealVector level_spacings(const RealVector& energies);
inline RealVector level_spacings(const EigenSystem& es) { return level_spacings(es.energies); }

/// Writes rows (i, eps_i, Delta_i, |psi_i(n0)|^2, phi_i) as CSV.
void write_eigensystem_csv(const EigenSystem& es, std::ostream& out);

} // namespace latdiss

#endif
