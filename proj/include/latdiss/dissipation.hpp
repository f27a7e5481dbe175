#ifndef LATDISS_DISSIPATION_HPP
#define LATDISS_DISSIPATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "latdiss/eigensystem.hpp"
#include "latdiss/types.hpp"

namespace latdiss {

/// Complex spectrum of the dynamical matrix together with the
/// closed-form left/inverse eigenvector matrices.
///
/// Eigenvalues are stored aligned with the parent energies of the
/// EigenSystem: lambda_i = eps_i + dnu_i - i*gamma_i/2.
struct DynamicalSpectrum {
    Vector lambdas;          // M
    RealVector dnu;          // M, real shift
    RealVector gamma;        // M, relaxation rate, >= 0 up to roundoff
    Matrix left_vectors;     // M x M, rows are left eigenvectors V
    Matrix inverse_vectors;  // M x M, V^-1
    Vector weights;          // M, G_i of the inverse closed form
    std::vector<int> match;  // permutation: raw eigensolver order -> energy order
    bool ambiguous_match = false;  // cost ties resolved by index order
    std::vector<bool> macroscopic;  // gamma_i > 10 * max Delta
    double coupling = 0.0;          // Gamma used to build the spectrum

    int n_modes() const { return static_cast<int>(lambdas.size()); }
};

/// Regime of a mode's relaxation rate, set by Gbar_i/2 vs Delta_i/pi.
enum class Regime { Perturbative, Impedance, Zeno };

const char* regime_name(Regime r);

/// Approximate dissipation spectrum from the scattering-phase-shift
/// closed form, with the rescaled remainder r_i and a regime label per
/// mode. pole[i] marks the exact impedance pole (gamma_approx = +inf).
struct ApproxSpectrum {
    RealVector remainder;     // M, dimensionless r_i, |r_i| <= 1/pi
    RealVector gamma_approx;  // M, >= 0; +inf at an exact pole
    std::vector<Regime> regime;
    std::vector<bool> pole;
};

struct RegimeInfo {
    Regime regime;
    double limit_value;  // the matching asymptotic-case value
    bool impedance_enhancement;  // |r_i| < |psi_i(n0)|^2 / sqrt(3)
};

/// Closed-form analytics for the flux-pi/2 ring.
struct RingAnalytics {
    std::optional<double> k_c;       // arccos(Gamma/4J) when Gamma < 4J
    RealVector mode_index;           // i = -(N-1)/2 ... (N-1)/2
    RealVector gamma_of_mode;        // per-mode analytic rate
    std::optional<double> gamma_macroscopic;  // detached-mode rate when Gamma > 4J
};

/// Dynamical matrix in the energy eigenmode basis:
/// A_ij = delta_ij eps_i - (i/2) e^{i(phi_j - phi_i)} sqrt(Gbar_i Gbar_j).
Matrix dynamical_matrix(const EigenSystem& es, double gamma);

/// Same operator in the site basis, H - i(Gamma/2)|n0><n0|, kept as an
/// independent route for cross-validation.
Matrix site_dynamical_matrix(const LatticeModel& model, double gamma);

/// Non-Hermitian eigendecomposition of A with eigenvalues paired to the
/// parent energies by minimal-cost assignment on |Re lambda - eps|.
DynamicalSpectrum exact_dynamical_spectrum(const Matrix& a, const EigenSystem& es, double gamma);

/// V_ij = (1/2) e^{i phi_j} sqrt(Gbar_j) / (lambda_i - eps_j). Returns V
/// and the residual max|V A - diag(lambda) V|. Throws NumericError on a
/// pole collision lambda_i == eps_j.
struct LeftEigenvectors {
    Matrix v;
    double residual;
};
LeftEigenvectors closed_form_left_eigenvectors(const Vector& lambdas, const EigenSystem& es,
                                               double gamma);

/// V^-1_ij = e^{-i phi_i} sqrt(Gbar_i) G_j / (lambda_j - eps_i) with
/// 1/G_i = (1/2) sum_j Gbar_j / (lambda_i - eps_j)^2.
struct InverseEigenvectors {
    Matrix v_inv;
    Vector g;
};
InverseEigenvectors closed_form_inverse(const Vector& lambdas, const EigenSystem& es,
                                        double gamma);

/// S(lambda) = (1/2) sum_j Gbar_j / (lambda - eps_j); the dynamical
/// eigenvalues solve S(lambda) = i.
Complex self_consistency(const EigenSystem& es, double gamma, Complex lambda);

/// Newton-polishes a candidate eigenvalue until |S(lambda) - i| < tol.
/// Throws NumericError (reporting the last iterate) after max_steps.
Complex refine_eigenvalue(const EigenSystem& es, double gamma, Complex lambda0,
                          double tol = 1e-10, int max_steps = 100);

/// Rescaled remainder r_i = (1/pi) sum_{j != i} Delta_i/(eps_i - eps_j) |psi_j(n0)|^2.
double remainder_r(const EigenSystem& es, int i);
RealVector remainders(const EigenSystem& es);

/// gamma_i = (Delta_i/pi) ln| (Delta_i/pi + (Gamma/2)(w_i + i r_i)) /
///                           (Delta_i/pi - (Gamma/2)(w_i - i r_i)) |,
/// evaluated as the modulus of the complex ratio before the real log.
ApproxSpectrum approx_dissipation_spectrum(const EigenSystem& es, const RealVector& r,
                                           double gamma);

/// Labels mode i perturbative / impedance / zeno by Gbar_i/2 vs
/// Delta_i/pi (factor-3 bands) and evaluates the matching limit form.
RegimeInfo classify_regime(const EigenSystem& es, const RealVector& r, double gamma, int i);

/// Large-N closed forms for the flux-pi/2 ring. For Gamma < 4J the
/// underdamped rate with its log enhancement at the critical momentum
/// k_c; for Gamma > 4J the overdamped rate plus the detached macroscopic
/// mode. Note: the detached-mode rate is sqrt(Gamma^2 - (4J)^2), the
/// value direct diagonalization reproduces.
RingAnalytics ring_analytics(int n, double j, double gamma);

} // namespace latdiss

#endif
