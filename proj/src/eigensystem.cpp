#include "latdiss/eigensystem.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace latdiss {

namespace {

// Rescale so the largest-magnitude component is real positive; ties go
// to the lowest index, keeping the phase deterministic across platforms.
void fix_phase(Eigen::Ref<Vector> v) {
    int imax = 0;
    double best = -1.0;
    for (int k = 0; k < v.size(); ++k) {
        const double a = std::abs(v(k));
        if (a > best + 1e-15) {
            best = a;
            imax = k;
        }
    }
    if (best <= 0.0) return;
    v *= std::conj(v(imax)) / std::abs(v(imax));
}

} // namespace

EigenSystem diagonalize_coupled(const LatticeModel& model, const EigenOptions& opts) {
    model.validate();
    const int n = model.n_sites;

    Eigen::SelfAdjointEigenSolver<Matrix> solver(model.hamiltonian);
    if (solver.info() != Eigen::Success)
        throw NumericError("diagonalize_coupled: Hermitian eigensolver failed");
    const RealVector w = solver.eigenvalues();  // ascending
    const Matrix v = solver.eigenvectors();

    std::vector<double> kept_e, drop_e;
    std::vector<Vector> kept_v, drop_v;
    const double gap = opts.degeneracy_gap * model.hop_scale;

    int start = 0;
    for (int i = 1; i <= n; ++i) {
        if (i < n && w(i) - w(i - 1) <= gap) continue;
        const int d = i - start;
        if (d == 1) {
            Vector u = v.col(start);
            if (std::norm(u(model.drain)) > opts.drop_tolerance) {
                kept_e.push_back(w(start));
                kept_v.push_back(std::move(u));
            } else {
                drop_e.push_back(w(start));
                drop_v.push_back(std::move(u));
            }
        } else {
            // Rotate the degenerate subspace so one combination carries
            // all of the drain amplitude.
            const Matrix sub = v.middleCols(start, d);
            Vector c(d);
            for (int k = 0; k < d; ++k) c(k) = std::conj(sub(model.drain, k));
            const double nc = c.norm();
            if (nc * nc > opts.drop_tolerance) {
                // Unitary completion of c/|c| in coefficient space keeps
                // every rotated column an eigenvector of the subspace.
                Eigen::HouseholderQR<Matrix> qr{Matrix(c)};
                Matrix rot = qr.householderQ() * Matrix::Identity(d, d);
                kept_e.push_back(w(start));
                kept_v.push_back(sub * (c / nc));
                for (int k = 1; k < d; ++k) {
                    drop_e.push_back(w(start));
                    drop_v.push_back(sub * rot.col(k));
                }
            } else {
                for (int k = 0; k < d; ++k) {
                    drop_e.push_back(w(start));
                    drop_v.push_back(sub.col(k));
                }
            }
        }
        start = i;
    }

    EigenSystem es;
    es.drain = model.drain;
    es.hop_scale = model.hop_scale;
    es.drop_tolerance = opts.drop_tolerance;

    const int m = static_cast<int>(kept_e.size());
    es.energies.resize(m);
    es.wavefunctions.resize(n, m);
    for (int i = 0; i < m; ++i) {
        es.energies(i) = kept_e[i];
        es.wavefunctions.col(i) = kept_v[i];
        fix_phase(es.wavefunctions.col(i));
    }
    es.drain_amp.resize(m);
    es.drain_phase.resize(m);
    es.drain_weight.resize(m);
    for (int i = 0; i < m; ++i) {
        const Complex a = es.wavefunctions(model.drain, i);
        es.drain_amp(i) = a;
        es.drain_phase(i) = std::arg(a);
        es.drain_weight(i) = std::norm(a);
    }
    es.spacing = (m >= 2) ? level_spacings(es.energies) : RealVector::Zero(m);

    const int k = static_cast<int>(drop_e.size());
    es.dropped_energies.resize(k);
    es.dropped_wavefunctions.resize(n, k);
    for (int i = 0; i < k; ++i) {
        es.dropped_energies(i) = drop_e[i];
        es.dropped_wavefunctions.col(i) = drop_v[i];
    }
    return es;
}

RealVector level_spacings(const RealVector& energies) {
    const int m = static_cast<int>(energies.size());
    if (m < 2) throw std::invalid_argument("level_spacings: need at least two modes");
    RealVector d(m);
    d(0) = energies(1) - energies(0);
    d(m - 1) = energies(m - 1) - energies(m - 2);
    for (int i = 1; i + 1 < m; ++i) d(i) = (energies(i + 1) - energies(i - 1)) / 2.0;
    return d;
}

void write_eigensystem_csv(const EigenSystem& es, std::ostream& out) {
    out << "i,energy,spacing,drain_weight,drain_phase\n";
    char buf[128];
    for (int i = 0; i < es.n_modes(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", i, es.energies(i),
                      es.spacing(i), es.drain_weight(i), es.drain_phase(i));
        out << buf;
    }
}

} // namespace latdiss
