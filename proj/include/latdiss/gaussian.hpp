#ifndef LATDISS_GAUSSIAN_HPP
#define LATDISS_GAUSSIAN_HPP

#include <string>
#include <vector>

#include "latdiss/dissipation.hpp"
#include "latdiss/eigensystem.hpp"
#include "latdiss/lattice.hpp"
#include "latdiss/types.hpp"

namespace latdiss {

/// Squeezed Gaussian white-noise reservoir attached to the drain site:
/// <zeta^dag(t) zeta(t')> = delta(t-t') N, <zeta(t) zeta(t')> = delta(t-t') M.
struct BathSpec {
    double nbar = 0.0;   // N >= 0
    Complex m = 0.0;     // anomalous strength, |M|^2 <= N(N+1)
    double gamma = 0.0;  // dissipation rate Gamma

    void validate() const;

    /// Pure squeezing saturates |M|^2 = N(N+1).
    static BathSpec pure_squeezing(double nbar, double gamma);
};

enum class Basis { Eigenmode, Site };

/// Second moments of a Gaussian state: normal(i,j) = <b_i^dag b_j> and
/// anomalous(i,j) = <b_i b_j> in the tagged basis.
struct GaussianState {
    Matrix normal;     // Hermitian
    Matrix anomalous;  // symmetric
    Basis basis = Basis::Eigenmode;
    double time = 0.0;

    int n_modes() const { return static_cast<int>(normal.rows()); }

    static GaussianState vacuum(int m, Basis basis = Basis::Eigenmode);

    /// Smallest eigenvalue of the 2M x 2M second-moment matrix of
    /// {b, b^dag}; physical states have min_gram_eigenvalue >= -tol.
    double min_gram_eigenvalue() const;
    bool is_physical(double tol = 1e-8) const { return min_gram_eigenvalue() >= -tol; }
};

/// A sampled trajectory; all states share one basis tag.
struct TrajectoryRecord {
    std::vector<double> times;  // strictly increasing
    std::vector<GaussianState> states;
    std::string model_label;
    std::string bath_label;

    void validate() const;
};

/// Evaluates evolve_exact at each requested time (closed form, so the
/// samples are independent). Times must be strictly increasing.
TrajectoryRecord sample_trajectory(const DynamicalSpectrum& ds, const BathSpec& bath,
                                   const GaussianState& initial, const std::vector<double>& times,
                                   const std::string& model_label = {});

/// Closed-form propagation through the dynamical eigenbasis: transform
/// to b~ = V b, evolve each driven mode analytically, map back with
/// V^-1. Initial state must be in the eigenmode basis; t >= 0.
GaussianState evolve_exact(const DynamicalSpectrum& ds, const BathSpec& bath,
                           const GaussianState& initial, double t);

/// Independent oracle: classical RK4 on the coupled moment ODEs in the
/// energy eigenmode basis,
///   dN/dt =  i conj(A) N - i N A^T + nbar * conj(g) g^T,
///   dM/dt = -i A M - i M A^T + m * g g^T,   g_i = e^{-i phi_i} sqrt(Gbar_i).
/// The step is halved until two successive resolutions agree to 1e-8.
GaussianState evolve_rk4_oracle(const EigenSystem& es, const BathSpec& bath,
                                const GaussianState& initial, double t, double dt);

/// Default effective density-of-states rate: the reciprocal of the
/// one-sided time integral of the drain-site autocorrelation
/// sum_i |psi_i(n0)|^2 e^{-i eps_i tau}, truncated at tau = N/(4J).
double default_jeff(const EigenSystem& es);

/// Intermediate-time correlations of the Markov-reduced dynamics from a
/// vacuum initial state; valid in the window 1/J << t << N/J.
GaussianState intermediate_correlations(const EigenSystem& es, const BathSpec& bath, double jeff,
                                        double t);

/// Congruence transform of both blocks by the retained wavefunctions:
/// <a_m^dag a_n> = sum_ij psi_i(m)^* psi_j(n) <b_i^dag b_j>.
GaussianState to_site_basis(const GaussianState& state, const EigenSystem& es);

struct LightConeProfile {
    double inside_max = 0.0;   // max |<a_m a_n>| with max(d_m, d_n) <= c t + buffer
    double outside_max = 0.0;  // same over the complement
    double front_position = 0.0;  // largest shell with weight >= threshold * peak
};

struct LightConeOptions {
    double buffer = 4.0;      // sites added to the ballistic radius
    double threshold = 0.05;  // front detection, relative to the peak shell
};

/// Partitions the anomalous correlator by ballistic distance from the
/// drain. Only 1D geometries (chain, ring via arc distance) are
/// supported.
LightConeProfile light_cone_profile(const GaussianState& state, const LatticeModel& model,
                                    double speed, double t, const LightConeOptions& opts = {});

/// t -> infinity limit of evolve_exact. Requires every mode to decay
/// (min gamma_i > 1e-12), otherwise the coupled-sector steady state is
/// not unique.
GaussianState steady_state(const DynamicalSpectrum& ds, const BathSpec& bath);

} // namespace latdiss

#endif
