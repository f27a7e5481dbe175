#include "latdiss/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace latdiss {

void LatticeModel::validate() const {
    if (n_sites < 1) throw std::invalid_argument("LatticeModel: n_sites must be >= 1");
    if (hamiltonian.rows() != n_sites || hamiltonian.cols() != n_sites)
        throw std::invalid_argument("LatticeModel: hamiltonian dimension mismatch");
    if (drain < 0 || drain >= n_sites)
        throw std::invalid_argument("LatticeModel: drain site out of range");
    if (hop_scale <= 0.0) throw std::invalid_argument("LatticeModel: hop_scale must be > 0");
    const double herm = (hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12 * hop_scale)
        throw std::invalid_argument("LatticeModel: hamiltonian is not Hermitian (deviation " +
                                    std::to_string(herm) + ")");
}

LatticeModel build_chain(int n, double j, const std::vector<double>& potential) {
    if (n < 1) throw std::invalid_argument("build_chain: n must be >= 1");
    if (!potential.empty() && static_cast<int>(potential.size()) != n)
        throw std::invalid_argument("build_chain: potential length must be 0 or n");
    LatticeModel m;
    m.n_sites = n;
    m.hop_scale = j;
    m.label = "chain n=" + std::to_string(n);
    m.hamiltonian = Matrix::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        m.hamiltonian(k, k + 1) = -j;
        m.hamiltonian(k + 1, k) = -j;
    }
    for (int k = 0; k < static_cast<int>(potential.size()); ++k)
        m.hamiltonian(k, k) = potential[k];
    m.drain = 0;
    m.validate();
    return m;
}

LatticeModel build_step_chain(int n, double j, double v) {
    if (n < 1 || n % 2 == 0)
        throw std::invalid_argument("build_step_chain: n must be odd so a central site exists");
    if (v < 0.0) throw std::invalid_argument("build_step_chain: v must be >= 0");
    const int c = n / 2;
    std::vector<double> pot(n, 0.0);
    for (int k = 0; k < n; ++k) pot[k] = (k < c) ? -v : (k > c) ? v : 0.0;
    LatticeModel m = build_chain(n, j, pot);
    m.label = "step-chain n=" + std::to_string(n);
    m.drain = c;
    m.validate();
    return m;
}

LatticeModel build_ring_flux(int n, double j, double flux) {
    if (n < 3) throw std::invalid_argument("build_ring_flux: n must be >= 3");
    if (flux < 0.0 || flux > M_PI)
        throw std::invalid_argument("build_ring_flux: flux must lie in [0, pi]");
    LatticeModel m;
    m.n_sites = n;
    m.hop_scale = j;
    m.label = "ring n=" + std::to_string(n);
    m.hamiltonian = Matrix::Zero(n, n);
    const Complex hop = -j * std::exp(Complex(0.0, -flux / n));
    for (int k = 0; k < n; ++k) {
        const int kp = (k + 1) % n;
        m.hamiltonian(k, kp) = hop;
        m.hamiltonian(kp, k) = std::conj(hop);
    }
    m.drain = 0;
    m.validate();
    return m;
}

LatticeModel build_hofstadter(int nx, int ny, double j, double flux_per_plaquette) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("build_hofstadter: nx*ny must be >= 1");
    const int n = nx * ny;
    LatticeModel m;
    m.n_sites = n;
    m.hop_scale = j;
    m.label = "hofstadter " + std::to_string(nx) + "x" + std::to_string(ny);
    m.hamiltonian = Matrix::Zero(n, n);
    auto site = [nx](int x, int y) { return y * nx + x; };
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            if (x + 1 < nx) {
                m.hamiltonian(site(x + 1, y), site(x, y)) = -j;
                m.hamiltonian(site(x, y), site(x + 1, y)) = -j;
            }
            if (y + 1 < ny) {
                const Complex hop = -j * std::exp(Complex(0.0, flux_per_plaquette * x));
                m.hamiltonian(site(x, y + 1), site(x, y)) = hop;
                m.hamiltonian(site(x, y), site(x, y + 1)) = std::conj(hop);
            }
        }
    }
    const int col = (nx + 1) / 2 - 1;  // ceil(nx/2)-1
    m.drain = site(col < 0 ? 0 : col, 0);
    m.validate();
    return m;
}

LatticeModel build_model(const ModelSpec& spec) {
    if (spec.kind == "chain") {
        LatticeModel m = build_chain(spec.n, spec.j);
        if (spec.drain_override >= 0) m.drain = spec.drain_override;
        m.validate();
        return m;
    }
    if (spec.kind == "step-chain") {
        LatticeModel m = build_step_chain(spec.n, spec.j, spec.v);
        if (spec.drain_override >= 0) m.drain = spec.drain_override;
        m.validate();
        return m;
    }
    if (spec.kind == "ring") {
        LatticeModel m = build_ring_flux(spec.n, spec.j, spec.flux);
        if (spec.drain_override >= 0) m.drain = spec.drain_override;
        m.validate();
        return m;
    }
    if (spec.kind == "hofstadter") {
        LatticeModel m = build_hofstadter(spec.nx, spec.ny, spec.j, spec.flux);
        if (spec.drain_override >= 0) m.drain = spec.drain_override;
        m.validate();
        return m;
    }
    throw std::invalid_argument("build_model: unknown lattice kind '" + spec.kind + "'");
}

} // namespace latdiss
