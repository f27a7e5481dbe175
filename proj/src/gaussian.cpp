#include "latdiss/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace latdiss {

namespace {

// phi1(z, t) = (e^{z t} - 1) / z, series branch for small |z t| to avoid
// cancellation; phi1(0, t) = t.
Complex phi1(Complex z, double t) {
    const Complex zt = z * t;
    if (std::abs(zt) < 1e-6)
        return t * (1.0 + zt / 2.0 + zt * zt / 6.0);
    return (std::exp(zt) - 1.0) / z;
}

Vector drive_vector(const EigenSystem& es, double gamma) {
    Vector g(es.n_modes());
    for (int i = 0; i < es.n_modes(); ++i)
        g(i) = std::exp(-kI * es.drain_phase(i)) * std::sqrt(es.drain_weight(i) * gamma);
    return g;
}

} // namespace

void BathSpec::validate() const {
    if (nbar < 0.0) throw std::invalid_argument("BathSpec: nbar must be >= 0");
    if (gamma < 0.0) throw std::invalid_argument("BathSpec: gamma must be >= 0");
    if (std::norm(m) > nbar * (nbar + 1.0) + 1e-12)
        throw std::invalid_argument("BathSpec: |m|^2 exceeds nbar(nbar+1); bath is unphysical");
}

BathSpec BathSpec::pure_squeezing(double nbar, double gamma) {
    BathSpec b;
    b.nbar = nbar;
    b.gamma = gamma;
    b.m = std::sqrt(nbar * (nbar + 1.0));
    b.validate();
    return b;
}

GaussianState GaussianState::vacuum(int m, Basis basis) {
    GaussianState s;
    s.normal = Matrix::Zero(m, m);
    s.anomalous = Matrix::Zero(m, m);
    s.basis = basis;
    s.time = 0.0;
    return s;
}

double GaussianState::min_gram_eigenvalue() const {
    const int m = n_modes();
    // Second moments of the family {b, b^dag}:
    //   [[ I + N^T , M      ],
    //    [ conj(M) , N      ]]
    Matrix c(2 * m, 2 * m);
    c.topLeftCorner(m, m) = Matrix::Identity(m, m) + normal.transpose();
    c.topRightCorner(m, m) = anomalous;
    c.bottomLeftCorner(m, m) = anomalous.conjugate();
    c.bottomRightCorner(m, m) = normal;
    c = 0.5 * (c + c.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(c, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void TrajectoryRecord::validate() const {
    if (times.size() != states.size())
        throw std::invalid_argument("TrajectoryRecord: times/states length mismatch");
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        if (times[k + 1] <= times[k])
            throw std::invalid_argument("TrajectoryRecord: times must be strictly increasing");
    for (std::size_t k = 0; k + 1 < states.size(); ++k)
        if (states[k + 1].basis != states[k].basis)
            throw std::invalid_argument("TrajectoryRecord: states mix basis tags");
}

TrajectoryRecord sample_trajectory(const DynamicalSpectrum& ds, const BathSpec& bath,
                                   const GaussianState& initial, const std::vector<double>& times,
                                   const std::string& model_label) {
    TrajectoryRecord rec;
    rec.times = times;
    rec.model_label = model_label;
    rec.bath_label = "nbar=" + std::to_string(bath.nbar) + " gamma=" + std::to_string(bath.gamma);
    rec.states.reserve(times.size());
    for (double t : times) rec.states.push_back(evolve_exact(ds, bath, initial, t));
    rec.validate();
    return rec;
}

GaussianState evolve_exact(const DynamicalSpectrum& ds, const BathSpec& bath,
                           const GaussianState& initial, double t) {
    bath.validate();
    if (initial.basis != Basis::Eigenmode)
        throw std::invalid_argument("evolve_exact: initial state must be in the eigenmode basis");
    if (t < 0.0) throw std::invalid_argument("evolve_exact: t must be >= 0");
    const int m = ds.n_modes();
    if (initial.n_modes() != m)
        throw std::invalid_argument("evolve_exact: state/spectrum size mismatch");

    const Matrix& v = ds.left_vectors;
    const Matrix& vinv = ds.inverse_vectors;

    // b~ = V b: normal block picks up conj(V) . n . V^T, anomalous V . m . V^T.
    Matrix nt = v.conjugate() * initial.normal * v.transpose();
    Matrix mt = v * initial.anomalous * v.transpose();

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Complex dl = std::conj(ds.lambdas(i)) - ds.lambdas(j);
            const Complex sl = ds.lambdas(i) + ds.lambdas(j);
            // decay of the initial correlators plus the accumulated drive
            nt(i, j) = nt(i, j) * std::exp(kI * dl * t) + bath.nbar * phi1(kI * dl, t);
            mt(i, j) = mt(i, j) * std::exp(-kI * sl * t) - bath.m * phi1(-kI * sl, t);
        }
    }

    GaussianState out;
    out.basis = Basis::Eigenmode;
    out.time = initial.time + t;
    out.normal = vinv.conjugate() * nt * vinv.transpose();
    out.anomalous = vinv * mt * vinv.transpose();
    return out;
}

GaussianState evolve_rk4_oracle(const EigenSystem& es, const BathSpec& bath,
                                const GaussianState& initial, double t, double dt) {
    bath.validate();
    if (initial.basis != Basis::Eigenmode)
        throw std::invalid_argument("evolve_rk4_oracle: initial state must be in eigenmode basis");
    if (dt <= 0.0) throw std::invalid_argument("evolve_rk4_oracle: dt must be > 0");
    const int m = es.n_modes();
    if (initial.n_modes() != m)
        throw std::invalid_argument("evolve_rk4_oracle: state/eigensystem size mismatch");

    const Matrix a = dynamical_matrix(es, bath.gamma);
    const Matrix ac = a.conjugate();
    const Matrix at = a.transpose();
    const Vector g = drive_vector(es, bath.gamma);
    const Matrix drive_n = bath.nbar * (g.conjugate() * g.transpose());
    const Matrix drive_m = bath.m * (g * g.transpose());

    auto integrate = [&](double step) {
        Matrix nb = initial.normal;
        Matrix mb = initial.anomalous;
        const long nsteps = std::lround(std::ceil(t / step - 1e-12));
        const double h = (nsteps > 0) ? t / static_cast<double>(nsteps) : 0.0;
        Matrix k1n(m, m), k2n(m, m), k3n(m, m), k4n(m, m);
        Matrix k1m(m, m), k2m(m, m), k3m(m, m), k4m(m, m);
        auto rhs = [&](const Matrix& n, const Matrix& mm, Matrix& dn, Matrix& dm) {
            dn = kI * (ac * n) - kI * (n * at) + drive_n;
            dm = -kI * (a * mm) - kI * (mm * at) + drive_m;
        };
        for (long s = 0; s < nsteps; ++s) {
            rhs(nb, mb, k1n, k1m);
            rhs(nb + 0.5 * h * k1n, mb + 0.5 * h * k1m, k2n, k2m);
            rhs(nb + 0.5 * h * k2n, mb + 0.5 * h * k2m, k3n, k3m);
            rhs(nb + h * k3n, mb + h * k3m, k4n, k4m);
            nb += (h / 6.0) * (k1n + 2.0 * k2n + 2.0 * k3n + k4n);
            mb += (h / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        }
        return std::pair<Matrix, Matrix>(std::move(nb), std::move(mb));
    };

    auto coarse = integrate(dt);
    double step = dt;
    for (int halving = 0; halving < 12; ++halving) {
        step *= 0.5;
        auto fine = integrate(step);
        const double diff = std::max((coarse.first - fine.first).cwiseAbs().maxCoeff(),
                                     (coarse.second - fine.second).cwiseAbs().maxCoeff());
        if (diff < 1e-8) {
            GaussianState out;
            out.basis = Basis::Eigenmode;
            out.time = initial.time + t;
            out.normal = std::move(fine.first);
            out.anomalous = std::move(fine.second);
            return out;
        }
        coarse = std::move(fine);
    }
    throw NumericError("evolve_rk4_oracle: step halving did not converge to 1e-8");
}

double default_jeff(const EigenSystem& es) {
    // One-sided integral of sum_i w_i e^{-i eps_i tau}; each mode
    // integrates analytically, truncation at tau = N/(4J) keeps finite-size
    // recurrences out.
    const double tcut = es.n_sites() / (4.0 * es.hop_scale);
    Complex total = 0.0;
    for (int i = 0; i < es.n_modes(); ++i) {
        const double e = es.energies(i);
        if (std::abs(e) * tcut < 1e-12) {
            total += es.drain_weight(i) * tcut;
        } else {
            total += es.drain_weight(i) * (1.0 - std::exp(-kI * e * tcut)) / (kI * e);
        }
    }
    if (total.real() <= 0.0)
        throw NumericError("default_jeff: drain autocorrelation integral is not positive");
    return 1.0 / total.real();
}

GaussianState intermediate_correlations(const EigenSystem& es, const BathSpec& bath, double jeff,
                                        double t) {
    bath.validate();
    if (jeff <= 0.0) throw std::invalid_argument("intermediate_correlations: jeff must be > 0");
    const int m = es.n_modes();
    const double suppression = 1.0 + bath.gamma / (4.0 * jeff);
    const double pref = bath.gamma / (suppression * suppression);
    const double tiny = 1e-12 * es.hop_scale;

    GaussianState out;
    out.basis = Basis::Eigenmode;
    out.time = t;
    out.normal.resize(m, m);
    out.anomalous.resize(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double de = es.energies(j) - es.energies(i);
            const double se = es.energies(j) + es.energies(i);
            const Complex fn = (std::abs(de) < tiny)
                                   ? Complex(t, 0.0)
                                   : (1.0 - std::exp(-kI * de * t)) / (kI * de);
            const Complex fm = (std::abs(se) < tiny)
                                   ? Complex(t, 0.0)
                                   : (1.0 - std::exp(-kI * se * t)) / (kI * se);
            const Complex pi_ = es.drain_amp(i);
            const Complex pj = es.drain_amp(j);
            out.normal(i, j) = pref * bath.nbar * std::conj(pj) * pi_ * fn;
            out.anomalous(i, j) = pref * bath.m * std::conj(pj) * std::conj(pi_) * fm;
        }
    }
    return out;
}

GaussianState to_site_basis(const GaussianState& state, const EigenSystem& es) {
    if (state.basis != Basis::Eigenmode)
        throw std::invalid_argument("to_site_basis: state is not in the eigenmode basis");
    if (state.n_modes() != es.n_modes())
        throw std::invalid_argument("to_site_basis: state/eigensystem size mismatch");
    const Matrix& psi = es.wavefunctions;  // N x M
    GaussianState out;
    out.basis = Basis::Site;
    out.time = state.time;
    out.normal = psi.conjugate() * state.normal * psi.transpose();
    out.anomalous = psi * state.anomalous * psi.transpose();
    return out;
}

LightConeProfile light_cone_profile(const GaussianState& state, const LatticeModel& model,
                                    double speed, double t, const LightConeOptions& opts) {
    if (state.basis != Basis::Site)
        throw std::invalid_argument("light_cone_profile: state must be in the site basis");
    const int n = model.n_sites;
    if (state.n_modes() != n)
        throw std::invalid_argument("light_cone_profile: state/model size mismatch");

    const bool ring = model.label.rfind("ring", 0) == 0;
    const bool chain = model.label.rfind("chain", 0) == 0 || model.label.rfind("step-chain", 0) == 0;
    if (!ring && !chain)
        throw std::invalid_argument("light_cone_profile: only 1D geometries are supported");

    std::vector<int> dist(n);
    for (int s = 0; s < n; ++s) {
        const int d = std::abs(s - model.drain);
        dist[s] = ring ? std::min(d, n - d) : d;
    }
    const int dmax = *std::max_element(dist.begin(), dist.end());

    std::vector<double> shell(dmax + 1, 0.0);
    const double radius = speed * t + opts.buffer;
    LightConeProfile prof;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const int d = std::max(dist[a], dist[b]);
            const double mag = std::abs(state.anomalous(a, b));
            shell[d] = std::max(shell[d], mag);
            if (d <= radius)
                prof.inside_max = std::max(prof.inside_max, mag);
            else
                prof.outside_max = std::max(prof.outside_max, mag);
        }
    }
    const double peak = *std::max_element(shell.begin(), shell.end());
    if (peak > 0.0) {
        for (int d = dmax; d >= 0; --d) {
            if (shell[d] >= opts.threshold * peak) {
                prof.front_position = d;
                break;
            }
        }
    }
    return prof;
}

GaussianState steady_state(const DynamicalSpectrum& ds, const BathSpec& bath) {
    bath.validate();
    const int m = ds.n_modes();
    for (int i = 0; i < m; ++i)
        if (ds.gamma(i) <= 1e-12)
            throw NumericError("steady_state: mode " + std::to_string(i) +
                               " does not decay; steady state not unique on the coupled sector");

    Matrix nt(m, m), mt(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Complex dl = std::conj(ds.lambdas(i)) - ds.lambdas(j);
            const Complex sl = ds.lambdas(i) + ds.lambdas(j);
            nt(i, j) = bath.nbar / (-kI * dl);
            mt(i, j) = bath.m / (-kI * sl);
        }
    }
    GaussianState out;
    out.basis = Basis::Eigenmode;
    out.time = std::numeric_limits<double>::infinity();
    out.normal = ds.inverse_vectors.conjugate() * nt * ds.inverse_vectors.transpose();
    out.anomalous = ds.inverse_vectors * mt * ds.inverse_vectors.transpose();
    return out;
}

} // namespace latdiss
