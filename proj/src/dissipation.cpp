#include "latdiss/dissipation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace latdiss {

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Perturbative: return "perturbative";
        case Regime::Impedance: return "impedance";
        case Regime::Zeno: return "zeno";
    }
    return "unknown";
}

Matrix dynamical_matrix(const EigenSystem& es, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("dynamical_matrix: Gamma must be >= 0");
    const int m = es.n_modes();
    const RealVector gbar = es.couplings(gamma);
    Matrix a(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Complex phase = std::exp(kI * (es.drain_phase(j) - es.drain_phase(i)));
            a(i, j) = -0.5 * kI * phase * std::sqrt(gbar(i) * gbar(j));
        }
        a(i, i) += es.energies(i);
    }
    return a;
}

Matrix site_dynamical_matrix(const LatticeModel& model, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("site_dynamical_matrix: Gamma must be >= 0");
    Matrix h = model.hamiltonian;
    h(model.drain, model.drain) -= 0.5 * kI * gamma;
    return h;
}

DynamicalSpectrum exact_dynamical_spectrum(const Matrix& a, const EigenSystem& es, double gamma) {
    const int m = es.n_modes();
    if (a.rows() != m || a.cols() != m)
        throw std::invalid_argument("exact_dynamical_spectrum: matrix/eigensystem size mismatch");

    Eigen::ComplexEigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericError("exact_dynamical_spectrum: complex eigensolver failed");
    const Vector raw = solver.eigenvalues();

    // Minimal-cost assignment of |Re lambda - eps| with both sequences
    // sorted: pairing in order is optimal for 1D transport costs.
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int p, int q) {
        if (raw(p).real() != raw(q).real()) return raw(p).real() < raw(q).real();
        return raw(p).imag() < raw(q).imag();
    });

    DynamicalSpectrum ds;
    ds.coupling = gamma;
    ds.match = order;
    ds.lambdas.resize(m);
    ds.dnu.resize(m);
    ds.gamma.resize(m);
    const double tie_tol = 1e-12 * std::max(1.0, raw.cwiseAbs().maxCoeff());
    for (int i = 0; i < m; ++i) {
        ds.lambdas(i) = raw(order[i]);
        ds.dnu(i) = ds.lambdas(i).real() - es.energies(i);
        ds.gamma(i) = -2.0 * ds.lambdas(i).imag();
        if (i > 0 && std::abs(ds.lambdas(i).real() - ds.lambdas(i - 1).real()) <= tie_tol)
            ds.ambiguous_match = true;
    }

    const double dmax = (m >= 2) ? es.spacing.maxCoeff() : 0.0;
    ds.macroscopic.assign(m, false);
    for (int i = 0; i < m; ++i)
        if (m >= 2 && ds.gamma(i) > 10.0 * dmax) ds.macroscopic[i] = true;

    if (gamma == 0.0) {
        // A is diagonal: lambda_i = eps_i and the closed forms are at
        // their poles, so the eigenvector matrices are trivial.
        ds.left_vectors = Matrix::Identity(m, m);
        ds.inverse_vectors = Matrix::Identity(m, m);
        ds.weights = Vector::Zero(m);
        return ds;
    }

    auto lv = closed_form_left_eigenvectors(ds.lambdas, es, gamma);
    ds.left_vectors = std::move(lv.v);
    auto inv = closed_form_inverse(ds.lambdas, es, gamma);
    ds.inverse_vectors = std::move(inv.v_inv);
    ds.weights = std::move(inv.g);
    return ds;
}

LeftEigenvectors closed_form_left_eigenvectors(const Vector& lambdas, const EigenSystem& es,
                                               double gamma) {
    const int m = es.n_modes();
    const RealVector gbar = es.couplings(gamma);
    Matrix v(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Complex den = lambdas(i) - es.energies(j);
            if (std::abs(den) < 1e-300) {
                std::ostringstream msg;
                msg << "closed_form_left_eigenvectors: pole collision lambda_" << i
                    << " == eps_" << j << " (" << es.energies(j) << ")";
                throw NumericError(msg.str());
            }
            v(i, j) = 0.5 * std::exp(kI * es.drain_phase(j)) * std::sqrt(gbar(j)) / den;
        }
    }
    const Matrix a = dynamical_matrix(es, gamma);
    const double residual = (v * a - lambdas.asDiagonal() * v).cwiseAbs().maxCoeff();
    return {std::move(v), residual};
}

InverseEigenvectors closed_form_inverse(const Vector& lambdas, const EigenSystem& es,
                                        double gamma) {
    const int m = es.n_modes();
    const RealVector gbar = es.couplings(gamma);
    Vector g(m);
    for (int i = 0; i < m; ++i) {
        Complex s = 0.0;
        for (int j = 0; j < m; ++j) {
            const Complex den = lambdas(i) - es.energies(j);
            if (std::abs(den) < 1e-300) {
                std::ostringstream msg;
                msg << "closed_form_inverse: pole collision lambda_" << i << " == eps_" << j;
                throw NumericError(msg.str());
            }
            s += 0.5 * gbar(j) / (den * den);
        }
        g(i) = 1.0 / s;
    }
    Matrix vinv(m, m);
    for (int i = 0; i < m; ++i) {
        const Complex pre = std::exp(-kI * es.drain_phase(i)) * std::sqrt(gbar(i));
        for (int j = 0; j < m; ++j)
            vinv(i, j) = pre * g(j) / (lambdas(j) - es.energies(i));
    }
    return {std::move(vinv), std::move(g)};
}

Complex self_consistency(const EigenSystem& es, double gamma, Complex lambda) {
    const RealVector gbar = es.couplings(gamma);
    Complex s = 0.0;
    for (int j = 0; j < es.n_modes(); ++j) s += 0.5 * gbar(j) / (lambda - es.energies(j));
    return s;
}

Complex refine_eigenvalue(const EigenSystem& es, double gamma, Complex lambda0, double tol,
                          int max_steps) {
    const RealVector gbar = es.couplings(gamma);
    Complex lambda = lambda0;
    for (int step = 0; step < max_steps; ++step) {
        Complex s = 0.0, ds = 0.0;
        for (int j = 0; j < es.n_modes(); ++j) {
            const Complex den = lambda - es.energies(j);
            s += 0.5 * gbar(j) / den;
            ds -= 0.5 * gbar(j) / (den * den);
        }
        if (std::abs(s - kI) < tol) return lambda;
        lambda -= (s - kI) / ds;
    }
    std::ostringstream msg;
    msg << "refine_eigenvalue: Newton did not converge in " << max_steps
        << " steps; last iterate (" << lambda.real() << "," << lambda.imag() << ")";
    throw NumericError(msg.str());
}

double remainder_r(const EigenSystem& es, int i) {
    const int m = es.n_modes();
    if (i < 0 || i >= m) throw std::invalid_argument("remainder_r: mode index out of range");
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        s += es.drain_weight(j) / (es.energies(i) - es.energies(j));
    }
    return es.spacing(i) * s / M_PI;
}

RealVector remainders(const EigenSystem& es) {
    RealVector r(es.n_modes());
    for (int i = 0; i < es.n_modes(); ++i) r(i) = remainder_r(es, i);
    return r;
}

ApproxSpectrum approx_dissipation_spectrum(const EigenSystem& es, const RealVector& r,
                                           double gamma) {
    if (gamma < 0.0)
        throw std::invalid_argument("approx_dissipation_spectrum: Gamma must be >= 0");
    const int m = es.n_modes();
    ApproxSpectrum ap;
    ap.remainder = r;
    ap.gamma_approx.resize(m);
    ap.regime.resize(m);
    ap.pole.assign(m, false);
    for (int i = 0; i < m; ++i) {
        const double a = es.spacing(i) / M_PI;
        const Complex num = a + 0.5 * gamma * Complex(es.drain_weight(i), r(i));
        const Complex den = a - 0.5 * gamma * Complex(es.drain_weight(i), -r(i));
        if (std::abs(den) == 0.0) {
            ap.gamma_approx(i) = std::numeric_limits<double>::infinity();
            ap.pole[i] = true;
        } else if (gamma == 0.0) {
            ap.gamma_approx(i) = 0.0;
        } else {
            ap.gamma_approx(i) = a * std::log(std::abs(num / den));
        }
        ap.regime[i] = classify_regime(es, r, gamma, i).regime;
    }
    return ap;
}

RegimeInfo classify_regime(const EigenSystem& es, const RealVector& r, double gamma, int i) {
    const double a = es.spacing(i) / M_PI;        // Delta_i / pi
    const double half_gbar = 0.5 * gamma * es.drain_weight(i);
    const double w = es.drain_weight(i);
    const double ri = r(i);

    RegimeInfo info{};
    info.impedance_enhancement = std::abs(ri) < w / std::sqrt(3.0);
    if (half_gbar < a / 3.0) {
        info.regime = Regime::Perturbative;
        const double a2 = a * a;
        const double rg = ri * 0.5 * gamma;
        info.limit_value = (a2 + rg * rg) > 0.0
                               ? a2 / (a2 + rg * rg) * 2.0 * half_gbar
                               : 2.0 * half_gbar;
    } else if (half_gbar > 3.0 * a) {
        info.regime = Regime::Zeno;
        const double w4 = w * w * w * w;
        const double delta = es.spacing(i);
        info.limit_value = w4 / (w4 + ri * ri) * (4.0 / (M_PI * M_PI)) * delta * delta /
                           (2.0 * half_gbar);
    } else {
        info.regime = Regime::Impedance;
        if (ri == 0.0) {
            info.limit_value = std::numeric_limits<double>::infinity();
        } else {
            const double w4 = w * w * w * w;
            info.limit_value =
                2.0 * half_gbar * 0.25 * std::log(1.0 + 4.0 * w4 / (ri * ri));
        }
    }
    return info;
}

RingAnalytics ring_analytics(int n, double j, double gamma) {
    if (n < 3) throw std::invalid_argument("ring_analytics: n must be >= 3");
    if (j <= 0.0 || gamma < 0.0)
        throw std::invalid_argument("ring_analytics: need j > 0 and Gamma >= 0");

    RingAnalytics ra;
    ra.mode_index.resize(n);
    ra.gamma_of_mode.resize(n);
    for (int k = 0; k < n; ++k) ra.mode_index(k) = -(n - 1) / 2.0 + k;

    const double four_j = 4.0 * j;
    if (gamma < four_j) {
        const double kc = std::acos(gamma / four_j);
        ra.k_c = kc;
        const double ckc = std::cos(kc);
        for (int k = 0; k < n; ++k) {
            const double th = M_PI * ra.mode_index(k) / n;
            const double c = std::cos(th);
            if (std::abs(c - ckc) < 1e-12) {
                // a mode sitting exactly at the critical momentum picks
                // up the log-N enhancement instead of the divergent form
                ra.gamma_of_mode(k) = (2.0 * j / n) * c * std::log(static_cast<double>(n));
            } else {
                ra.gamma_of_mode(k) =
                    (2.0 * j / n) * c * std::log(std::abs((c + ckc) / (c - ckc)));
            }
        }
    } else {
        if (gamma == four_j) ra.k_c = 0.0;  // marginal case: formulas coincide at band center
        for (int k = 0; k < n; ++k) {
            const double th = M_PI * ra.mode_index(k) / n;
            const double c = std::cos(th);
            ra.gamma_of_mode(k) =
                (2.0 * j / n) * c * std::log((gamma + four_j * c) / (gamma - four_j * c));
        }
        if (gamma > four_j)
            ra.gamma_macroscopic = std::sqrt(gamma * gamma - four_j * four_j);
    }
    return ra;
}

} // namespace latdiss
