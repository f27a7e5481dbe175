#include <doctest.h>

#include <cmath>
#include <sstream>

#include "latdiss/eigensystem.hpp"
#include "latdiss/lattice.hpp"

using namespace latdiss;

TEST_CASE("symmetric dimer") {
    const EigenSystem es = diagonalize_coupled(build_chain(2, 1.0));
    REQUIRE(es.n_modes() == 2);
    CHECK(es.energies(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(es.energies(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(es.drain_weight(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(es.drain_weight(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("flux ring couples every mode equally") {
    const int n = 100;
    const EigenSystem es = diagonalize_coupled(build_ring_flux(n, 1.0, M_PI / 2));
    REQUIRE(es.n_modes() == n);
    CHECK(es.n_dropped() == 0);
    for (int i = 0; i < n; ++i)
        CHECK(es.drain_weight(i) == doctest::Approx(1.0 / n).epsilon(1e-10));
}

TEST_CASE("degenerate subspace rotates into one coupled mode") {
    // zero-flux ring n=4: the two eps=0 plane waves merge into a single
    // drain-coupled combination, the orthogonal one is dropped
    const EigenSystem es = diagonalize_coupled(build_ring_flux(4, 1.0, 0.0));
    REQUIRE(es.n_modes() == 3);
    REQUIRE(es.n_dropped() == 1);
    CHECK(es.energies(0) == doctest::Approx(-2.0));
    CHECK(es.energies(1) == doctest::Approx(0.0));
    CHECK(es.energies(2) == doctest::Approx(2.0));
    CHECK(es.drain_weight(0) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(es.drain_weight(1) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(es.drain_weight(2) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(es.dropped_energies(0) == doctest::Approx(0.0));
    CHECK(std::norm(es.dropped_wavefunctions(es.drain, 0)) < 1e-12);
}

TEST_CASE("completeness and reconstruction") {
    const LatticeModel models[] = {build_chain(25, 1.0), build_step_chain(25, 1.0, 2.0),
                                   build_ring_flux(4, 1.0, 0.0),
                                   build_hofstadter(5, 5, 1.0, M_PI / 2)};
    for (const auto& model : models) {
        const EigenSystem es = diagonalize_coupled(model);

        double total = es.drain_weight.sum();
        for (int k = 0; k < es.n_dropped(); ++k)
            total += std::norm(es.dropped_wavefunctions(model.drain, k));
        CHECK(std::abs(total - 1.0) < 1e-10);
        CHECK(es.drain_weight.sum() >= 1.0 - es.drop_tolerance * es.n_dropped() - 1e-10);

        // retained columns orthonormal
        const Matrix g = es.wavefunctions.adjoint() * es.wavefunctions;
        CHECK((g - Matrix::Identity(es.n_modes(), es.n_modes())).cwiseAbs().maxCoeff() < 1e-10);

        // retained + dropped reproduce H
        Matrix h = es.wavefunctions * es.energies.asDiagonal() * es.wavefunctions.adjoint();
        if (es.n_dropped() > 0)
            h += es.dropped_wavefunctions * es.dropped_energies.asDiagonal() *
                 es.dropped_wavefunctions.adjoint();
        CHECK((h - model.hamiltonian).cwiseAbs().maxCoeff() < 1e-9 * model.hop_scale);

        for (int i = 0; i < es.n_modes(); ++i) {
            CHECK(es.drain_weight(i) > es.drop_tolerance);
            CHECK(es.spacing(i) > 0.0);
        }
        for (int i = 0; i + 1 < es.n_modes(); ++i) CHECK(es.energies(i + 1) >= es.energies(i));
    }
}

TEST_CASE("deterministic phase convention") {
    const LatticeModel m = build_hofstadter(4, 4, 1.0, M_PI / 2);
    const EigenSystem a = diagonalize_coupled(m);
    const EigenSystem b = diagonalize_coupled(m);
    CHECK((a.drain_phase - b.drain_phase).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.wavefunctions - b.wavefunctions).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("level spacings") {
    RealVector ladder(4);
    ladder << 0.0, 1.0, 2.0, 3.0;
    const RealVector d = level_spacings(ladder);
    for (int i = 0; i < 4; ++i) CHECK(d(i) == doctest::Approx(1.0));

    // chain n=3 spectrum is {-sqrt2, 0, sqrt2} J
    const EigenSystem es3 = diagonalize_coupled(build_chain(3, 1.0));
    CHECK(es3.spacing(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    // flux ring: centered difference equals sin(pi/N) 2J cos(pi i/N) exactly
    const int n = 100;
    const EigenSystem es = diagonalize_coupled(build_ring_flux(n, 1.0, M_PI / 2));
    for (int k = 1; k + 1 < n; ++k) {
        const double i = -(n - 1) / 2.0 + k;
        const double expect = std::sin(M_PI / n) * 2.0 * std::cos(M_PI * i / n);
        CHECK(es.spacing(k) == doctest::Approx(expect).epsilon(1e-10));
    }

    RealVector single(1);
    single << 0.0;
    CHECK_THROWS_AS(level_spacings(single), std::invalid_argument);
}

TEST_CASE("non-Hermitian input is rejected") {
    LatticeModel bad = build_chain(3, 1.0);
    bad.hamiltonian(0, 1) = Complex(0.0, 0.5);
    CHECK_THROWS_AS(diagonalize_coupled(bad), std::invalid_argument);
}

TEST_CASE("csv dump") {
    const EigenSystem es = diagonalize_coupled(build_chain(4, 1.0));
    std::ostringstream out;
    write_eigensystem_csv(es, out);
    const std::string text = out.str();
    CHECK(text.rfind("i,energy,spacing,drain_weight,drain_phase\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
