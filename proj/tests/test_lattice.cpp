#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "latdiss/lattice.hpp"

using namespace latdiss;

namespace {

Eigen::VectorXd sorted_spectrum(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> s(h);
    return s.eigenvalues();
}

} // namespace

TEST_CASE("chain builder") {
    const LatticeModel two = build_chain(2, 1.0);
    CHECK(two.hamiltonian(0, 1) == Complex(-1.0, 0.0));
    CHECK(two.hamiltonian(1, 0) == Complex(-1.0, 0.0));
    CHECK(two.hamiltonian(0, 0) == Complex(0.0, 0.0));
    CHECK(two.drain == 0);

    const LatticeModel big = build_chain(25, 1.0);
    CHECK(big.n_sites == 25);
    CHECK(big.drain == 0);
    CHECK((big.hamiltonian - big.hamiltonian.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    // uniform potential only shifts the free spectrum
    const LatticeModel shifted = build_chain(3, 1.0, {5.0, 5.0, 5.0});
    const Eigen::VectorXd w = sorted_spectrum(shifted.hamiltonian);
    CHECK(w(0) == doctest::Approx(5.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(w(1) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(w(2) == doctest::Approx(5.0 + std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(build_chain(4, 1.0, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_chain(0, 1.0), std::invalid_argument);
}

TEST_CASE("step chain builder") {
    const LatticeModel m = build_step_chain(5, 1.0, 2.0);
    CHECK(m.drain == 2);
    for (int k = 0; k < 5; ++k) {
        const double expect = (k < 2) ? -2.0 : (k > 2) ? 2.0 : 0.0;
        CHECK(m.hamiltonian(k, k).real() == doctest::Approx(expect));
    }

    const LatticeModel fig = build_step_chain(25, 1.0, 2.0);
    CHECK(fig.drain == 12);
    CHECK(fig.hamiltonian(0, 0).real() == doctest::Approx(-2.0));
    CHECK(fig.hamiltonian(24, 24).real() == doctest::Approx(2.0));

    // zero step is the plain chain with the drain moved to the center
    const LatticeModel z = build_step_chain(3, 1.0, 0.0);
    const LatticeModel c = build_chain(3, 1.0);
    CHECK((z.hamiltonian - c.hamiltonian).cwiseAbs().maxCoeff() == 0.0);
    CHECK(z.drain == 1);

    CHECK_THROWS_AS(build_step_chain(4, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("flux ring builder") {
    const LatticeModel r4 = build_ring_flux(4, 1.0, 0.0);
    const Eigen::VectorXd w = sorted_spectrum(r4.hamiltonian);
    CHECK(w(0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(w(1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(w(2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(w(3) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(build_ring_flux(2, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_ring_flux(10, 1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(build_ring_flux(10, 1.0, 3.2), std::invalid_argument);
    CHECK_NOTHROW(build_ring_flux(10, 1.0, M_PI / 2));

    // flux pi/2, N=100: spectrum is 2J sin(pi i/N) over half-integer i
    const int n = 100;
    const LatticeModel ring = build_ring_flux(n, 1.0, M_PI / 2);
    const Eigen::VectorXd spec = sorted_spectrum(ring.hamiltonian);
    for (int k = 0; k < n; ++k) {
        const double i = -(n - 1) / 2.0 + k;
        CHECK(spec(k) == doctest::Approx(2.0 * std::sin(M_PI * i / n)).epsilon(1e-10));
    }

    // zero flux: -2J cos(2 pi k / N) as a multiset
    const int nz = 12;
    const LatticeModel flat = build_ring_flux(nz, 1.0, 0.0);
    Eigen::VectorXd expect(nz);
    for (int k = 0; k < nz; ++k) expect(k) = -2.0 * std::cos(2.0 * M_PI * k / nz);
    std::sort(expect.data(), expect.data() + nz);
    const Eigen::VectorXd got = sorted_spectrum(flat.hamiltonian);
    CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hofstadter builder") {
    const LatticeModel m = build_hofstadter(5, 5, 1.0, M_PI / 2);
    CHECK(m.n_sites == 25);
    CHECK(m.drain == 2);  // top row, column ceil(5/2)-1
    CHECK((m.hamiltonian - m.hamiltonian.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    // single bond: no closed plaquette, spectrum is flux-independent
    const LatticeModel b1 = build_hofstadter(2, 1, 1.0, 0.3);
    const LatticeModel b2 = build_hofstadter(2, 1, 1.0, 1.1);
    const Eigen::VectorXd w1 = sorted_spectrum(b1.hamiltonian);
    CHECK(w1(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(w1(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((w1 - sorted_spectrum(b2.hamiltonian)).cwiseAbs().maxCoeff() < 1e-12);

    // 2x2: product of the four hop amplitudes around the plaquette
    const LatticeModel p = build_hofstadter(2, 2, 1.0, M_PI / 2);
    auto site = [](int x, int y) { return y * 2 + x; };
    const Complex loop = p.hamiltonian(site(1, 0), site(0, 0)) *
                         p.hamiltonian(site(1, 1), site(1, 0)) *
                         p.hamiltonian(site(0, 1), site(1, 1)) *
                         p.hamiltonian(site(0, 0), site(0, 1));
    CHECK(std::arg(loop) == doctest::Approx(M_PI / 2).epsilon(1e-12));
}

TEST_CASE("hofstadter gauge invariance") {
    // a site-local phase redefinition preserves plaquette fluxes, so the
    // spectrum must not move
    const LatticeModel m = build_hofstadter(4, 3, 1.0, M_PI / 2);
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> dist(0.0, 2.0 * M_PI);
    Vector phases(m.n_sites);
    for (int k = 0; k < m.n_sites; ++k) phases(k) = std::exp(kI * dist(rng));
    const Matrix transformed =
        phases.asDiagonal() * m.hamiltonian * phases.conjugate().asDiagonal();
    const Eigen::VectorXd w0 = sorted_spectrum(m.hamiltonian);
    const Eigen::VectorXd w1 = sorted_spectrum(transformed);
    CHECK((w0 - w1).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("every builder output is Hermitian") {
    const LatticeModel models[] = {
        build_chain(7, 0.8), build_step_chain(9, 1.2, 2.0), build_ring_flux(11, 1.0, 1.0),
        build_hofstadter(3, 4, 1.0, M_PI / 2)};
    for (const auto& m : models) {
        CHECK_NOTHROW(m.validate());
        CHECK((m.hamiltonian - m.hamiltonian.adjoint()).cwiseAbs().maxCoeff() <=
              1e-12 * m.hop_scale);
    }
}

TEST_CASE("model spec dispatch") {
    ModelSpec spec;
    spec.kind = "ring";
    spec.n = 10;
    spec.j = 1.0;
    spec.flux = M_PI / 2;
    const LatticeModel m = build_model(spec);
    CHECK(m.n_sites == 10);
    CHECK(m.drain == 0);

    spec.drain_override = 3;
    CHECK(build_model(spec).drain == 3);

    spec.kind = "pyrochlore";
    CHECK_THROWS_AS(build_model(spec), std::invalid_argument);
}
