#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "oracles.hpp"
#include "pdem/exact.hpp"
#include "pdem/tmm.hpp"

using namespace pdem;
using namespace pdem::tmm;

namespace {

Problem box(double l, double m = 1.0)
{
    return Problem(0.0, l, Profile::constant(Quantity::Mass, m),
                   Profile::constant(Quantity::Potential, 0.0));
}

Problem barrier(double v, double w, double ml, double mb)
{
    return Problem(0.0, w, Profile::constant(Quantity::Mass, mb),
                   Profile::constant(Quantity::Potential, v),
                   Scattering{{ml, 0.0}, {ml, 0.0}});
}

} // namespace

TEST_CASE("slabbing")
{
    const Problem p = linear_well(0.1, 0.2, 5.0);
    const Slabbing s = build_slabs(p, 10);
    CHECK(s.count() == 10);
    CHECK(s.boundaries.size() == 9);
    for (int j = 0; j < 10; ++j) {
        CHECK(s.centers(j) == doctest::Approx(-4.5 + j));
        CHECK(s.mass(j) == doctest::Approx(p.mass_at(s.centers(j))));
    }
    for (int j = 0; j < 9; ++j) {
        CHECK(s.boundaries(j) == doctest::Approx(0.5 * (s.centers(j) + s.centers(j + 1))));
        CHECK(s.slab_of(s.boundaries(j)) == j + 1);
    }
    CHECK(s.slab_of(-5.0) == 0);
    CHECK(s.slab_of(5.0) == 9);
    CHECK_THROWS_AS(build_slabs(p, 1), DiscretizationError);

    const Slabbing fine = build_slabs(p, 1000);
    for (int j = 1; j + 1 < 1000; ++j) {
        CHECK(std::abs(fine.mass(j + 1) - 2 * fine.mass(j) + fine.mass(j - 1)) < 1e-15);
    }
}

TEST_CASE("local transfer matrix")
{
    const ComplexMatrix2 same = local_transfer_matrix(0.4, 0.4, 0.3, 0.3, 2.7);
    CHECK((same - ComplexMatrix2::Identity()).cwiseAbs().maxCoeff() < 1e-15);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    for (int i = 0; i < 50; ++i) {
        const Complex k1(u(rng), 0.0), k2(0.0, u(rng));
        const double m1 = u(rng), m2 = u(rng);
        const ComplexMatrix2 t = local_transfer_matrix(k1 / m1, k2 / m2, k1, k2, u(rng) - 1.0);
        const Complex rho = (k1 / m1) / (k2 / m2);
        CHECK(std::abs(t.determinant() - rho) < 1e-12 * std::abs(rho));
    }
    CHECK_THROWS_AS(local_transfer_matrix(0.3, 0.0, 0.3, 0.0, 1.0), TurningPointError);

    // Shifting origins conjugates by diag(e^{i k o}, e^{-i k o}).
    const Complex ka(0.8, 0.0), kb(0.0, 1.3);
    const double y = 1.7, oa = 1.6, ob = 1.8;
    const auto phases = [](Complex k, double o) {
        ComplexMatrix2 d = ComplexMatrix2::Zero();
        d(0, 0) = std::exp(Complex(0.0, 1.0) * k * o);
        d(1, 1) = 1.0 / d(0, 0);
        return d;
    };
    const ComplexMatrix2 absolute = local_transfer_matrix(ka / 0.2, kb / 0.3, ka, kb, y);
    const ComplexMatrix2 centered = local_transfer_matrix(ka / 0.2, kb / 0.3, ka, kb, y, oa, ob);
    CHECK((phases(kb, ob) * absolute * phases(ka, oa).inverse() - centered).cwiseAbs().maxCoeff() <
          1e-12);
    // Far from x = 0 inside a thick barrier the absolute form overflows; the centered one does not.
    const Complex kappa(0.0, 16.0);
    CHECK(!std::isfinite(local_transfer_matrix(kappa, kappa * 1.01, kappa, kappa * 1.01, -30.0)
                             .cwiseAbs()
                             .maxCoeff()));
    CHECK(std::isfinite(local_transfer_matrix(kappa, kappa * 1.01, kappa, kappa * 1.01, -30.0,
                                              -30.005, -29.995)
                            .cwiseAbs()
                            .maxCoeff()));
}

TEST_CASE("amplitudes reproduce the prescribed state")
{
    const Complex k(0.7, 0.0), h = k / 0.2;
    const double x = 1.3;
    const AmplitudePair a = amplitudes_from_state(k, h, x, Complex(0.4, -0.1), Complex(2.0, 0.5));
    const Complex e = std::exp(Complex(0.0, 1.0) * k * x);
    CHECK(std::abs(a(0) * e + a(1) / e - Complex(0.4, -0.1)) < 1e-14);
    CHECK(std::abs(Complex(0.0, 1.0) * h * (a(0) * e - a(1) / e) - Complex(2.0, 0.5)) < 1e-14);
}

TEST_CASE("uniform medium propagates amplitudes unchanged")
{
    const Problem p = box(10.0, 0.067);
    const Slabbing s = build_slabs(p, 100);
    const AmplitudeChain chain = propagate(p, 0.2, s, AmplitudePair(1.0, 0.5));
    // Centered phases: each slab only advances the phase by k * width.
    const Complex step = std::exp(Complex(0.0, 1.0) * chain.waves.k(0) * s.width());
    for (std::size_t j = 0; j < chain.pairs.size(); ++j) {
        const Complex ph = std::pow(step, static_cast<double>(j));
        CHECK(std::abs(chain.pairs[j](0) - ph) < 1e-10);
        CHECK(std::abs(chain.pairs[j](1) - 0.5 / ph) < 1e-10);
    }
    CHECK(std::abs(chain.psi(99, 7.3) - (std::exp(Complex(0.0, 1.0) * chain.waves.k(0) * (7.3 - 0.05)) +
                                         0.5 * std::exp(Complex(0.0, -1.0) * chain.waves.k(0) * (7.3 - 0.05)))) < 1e-10);
    CHECK_THROWS_AS(propagate(p, 0.2, s, AmplitudePair(0.0, 0.0)), DegenerateWavefunctionError);
}

TEST_CASE("propagation: recurrence, flux and continuity")
{
    const Problem p = linear_well(0.1, 0.2, 5.0);
    const Slabbing s = build_slabs(p, 1000);
    const double e = 0.4055;
    const AmplitudeChain chain = propagate(p, e, s, AmplitudePair(1.0, Complex(0.3, 0.2)));

    const auto flux = [&](Eigen::Index j) {
        const auto& v = chain.pairs[static_cast<std::size_t>(j)];
        return (std::norm(v(0)) - std::norm(v(1))) * chain.waves.h(j).real();
    };
    const double f0 = flux(0);
    CHECK(std::abs(f0) > 0.1);
    for (Eigen::Index j = 0; j + 1 < s.count(); ++j) {
        const ComplexMatrix2 t = local_transfer_matrix(chain.waves.h(j), chain.waves.h(j + 1),
                                                       chain.waves.k(j), chain.waves.k(j + 1),
                                                       s.boundaries(j), s.centers(j),
                                                       s.centers(j + 1));
        const auto idx = static_cast<std::size_t>(j);
        CHECK((t * chain.pairs[idx] - chain.pairs[idx + 1]).cwiseAbs().maxCoeff() < 1e-13);
        CHECK(std::abs(flux(j + 1) - f0) < 1e-10 * std::abs(f0));

        const double y = s.boundaries(j);
        CHECK(std::abs(chain.psi(j, y) - chain.psi(j + 1, y)) < 1e-12);
        CHECK(std::abs(chain.flux_derivative(j, y) - chain.flux_derivative(j + 1, y)) < 1e-11);
    }
}

TEST_CASE("determinant telescopes to h_first / h_last")
{
    const Problem p = linear_well(0.1, 0.2, 5.0);
    const Slabbing s = build_slabs(p, 1000);
    for (double e : {0.1, 0.4055, 2.0}) {
        const TransferProduct t = total_transfer_matrix(p, e, s);
        const SlabWaves w = slab_waves(p, e, s);
        const Complex expected = w.h(0) / w.h(s.count() - 1);
        const Complex det = t.matrix.determinant() * std::exp(2.0 * t.log_scale);
        CHECK(std::abs(det - expected) < 1e-12 * std::abs(expected));
    }
}

TEST_CASE("boundary mismatch")
{
    const double l = 10.0;
    const Problem p = box(l);
    for (int n = 1; n <= 3; ++n) {
        const double e = oracle::infinite_well(n, 1.0, l);
        CHECK(std::abs(boundary_mismatch(p, e, 200)) < 1e-10);
        CHECK(boundary_mismatch(p, e * 0.99, 200) * boundary_mismatch(p, e * 1.01, 200) < 0.0);
    }

    const Problem w = linear_well(0.1, 0.2, 5.0);
    const double m0 = std::abs(boundary_mismatch(w, 0.0258, 20000));
    CHECK(m0 < std::abs(boundary_mismatch(w, 0.0238, 20000)));
    CHECK(m0 < std::abs(boundary_mismatch(w, 0.0278, 20000)));

    CHECK_THROWS_AS(boundary_mismatch(barrier(0.3, 2.0, 0.067, 0.067), 0.1, 100),
                    BoundaryKindError);
}

TEST_CASE("eigenvalues of the constant-mass box are exact")
{
    const double l = 10.0;
    const Problem p = box(l);
    const auto levels = find_eigenvalues(p, 1e-4, oracle::infinite_well(5, 1.0, l) * 1.01, 500,
                                         2000, 1e-13);
    REQUIRE(levels.size() == 5);
    for (int n = 1; n <= 5; ++n) {
        CHECK(levels[n - 1].n == n);
        CHECK(levels[n - 1].energy ==
              doctest::Approx(oracle::infinite_well(n, 1.0, l)).epsilon(1e-9));
    }
    CHECK(find_eigenvalues(p, 1e-5, 1e-3, 500).empty());
    CHECK_THROWS_AS(find_eigenvalues(p, 1e-4, 0.1, 500, 100, 1e-300), ConvergenceError);
}

TEST_CASE("linear well spectrum agrees with the Airy solution")
{
    const Problem p = linear_well(0.1, 0.2, 5.0);
    const auto levels = find_eigenvalues(p, 1e-3, 2.6, 20000, 300, 1e-10);
    const auto exact = exact::linear_well_exact_spectrum(exact::LinearWell{}, 10);
    REQUIRE(levels.size() == 10);
    for (int i = 0; i < 10; ++i) {
        CHECK(levels[i].n == i + 1);
        CHECK(std::abs(levels[i].energy - exact.levels[i].energy) < 1e-6);
    }
}

TEST_CASE("thick barriers: rescaled shooting matches the finite well")
{
    // Square well |x| < 2 with 10 eV walls 28 nm thick: amplitudes grow by e^450.
    const Problem p(-30.0, 30.0, Profile::constant(Quantity::Mass, 1.0),
                    Profile::piecewise_constant(Quantity::Potential, {-2.0, 2.0}, {10.0, 0.0, 10.0}));
    const auto expected = oracle::finite_well(4.0, 10.0, 1.0, 1.0);
    const auto levels = find_eigenvalues(p, 1e-3, 9.9, 6000, 4000, 1e-12);
    REQUIRE(levels.size() == expected.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        CHECK(levels[i].n == static_cast<int>(i) + 1);
        CHECK(levels[i].energy == doctest::Approx(expected[i]).epsilon(1e-9));
    }
}

TEST_CASE("turning points inside a slab are perturbed, not fatal")
{
    const Problem p(0.0, 10.0, Profile::constant(Quantity::Mass, 1.0),
                    Profile::linear(Quantity::Potential, 0.0, 10.0, 0.0, 1.0));
    const Slabbing s = build_slabs(p, 100);
    const double e = s.potential(37); // E equals V at a slab center
    const AmplitudeChain chain =
        propagate(p, e, s, hard_wall_launch(slab_waves(p, e, s), s));
    for (const auto& v : chain.pairs) {
        CHECK(std::isfinite(std::abs(v(0))));
        CHECK(std::isfinite(std::abs(v(1))));
    }
    CHECK(std::isfinite(boundary_mismatch(p, e, s)));
}

TEST_CASE("reconstructed state matches the Airy state")
{
    const Problem p = linear_well(0.1, 0.2, 5.0);
    const auto levels = find_eigenvalues(p, 0.35, 0.45, 20000, 50, 1e-12);
    REQUIRE(levels.size() == 1);
    CHECK(levels[0].n == 4);
    const Wavefunction ref = exact::linear_well_exact_wavefunction(exact::LinearWell{}, 4, 2048);

    const Slabbing s = build_slabs(p, 20000);
    const double e = levels[0].energy;
    const AmplitudeChain chain = propagate(p, e, s, hard_wall_launch(slab_waves(p, e, s), s));
    Wavefunction wf;
    wf.grid = ref.grid;
    wf.values.resize(ref.grid.size());
    for (Eigen::Index i = 0; i < ref.grid.size(); ++i) {
        wf.values(i) = evaluate(chain, s, ref.grid(i));
    }
    wf = normalize(std::move(wf));
    CHECK((wf.values - ref.values).cwiseAbs().maxCoeff() < 1e-3);
    CHECK(count_nodes(wf) == 3);

    const Wavefunction dense = reconstruct_wavefunction(p, s, chain, 4);
    CHECK(dense.grid.size() == 4 * 20000 + 1);
    CHECK(dense.grid(0) == -5.0);
    CHECK(dense.grid(dense.grid.size() - 1) == 5.0);
    CHECK(norm_squared(dense) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transmission: uniform medium and rectangular barriers")
{
    const Problem uniform(0.0, 5.0, Profile::constant(Quantity::Mass, 0.067),
                          Profile::constant(Quantity::Potential, 0.0),
                          Scattering{{0.067, 0.0}, {0.067, 0.0}});
    for (double e : {0.01, 0.1, 1.0}) {
        const Transmission t = transmission(uniform, e, 50);
        CHECK(t.transmitted == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(t.reflected < 1e-24);
    }

    for (double mb : {0.067, 0.092}) {
        const Problem b = barrier(0.3, 2.0, 0.067, mb);
        for (double e = 0.01; e < 0.6; e += 0.0237) {
            const Transmission t = transmission(b, e, 64);
            CHECK(std::abs(t.transmitted - oracle::rectangular_barrier(e, 0.3, 2.0, 0.067, mb)) <
                  1e-6);
            CHECK(std::abs(t.transmitted + t.reflected - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("transmission through a mass step")
{
    const Problem step(0.0, 1.0, Profile::constant(Quantity::Mass, 0.2),
                       Profile::constant(Quantity::Potential, 0.0),
                       Scattering{{0.067, 0.0}, {0.2, 0.0}});
    for (double e : {0.05, 0.3}) {
        const Transmission t = transmission(step, e, 20);
        CHECK(t.transmitted == doctest::Approx(oracle::mass_step(e, 0.067, 0.2)).epsilon(1e-12));
        CHECK(t.transmitted + t.reflected == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("transmission through a thick barrier survives overflow")
{
    const Problem b = barrier(10.0, 20.0, 1.0, 1.0);
    const double e = 1.0;
    const Transmission t = transmission(b, e, 2000);
    REQUIRE(t.transmitted > 0.0);
    CHECK(std::log(t.transmitted) ==
          doctest::Approx(oracle::log_thick_barrier(e, 10.0, 20.0, 1.0)).epsilon(1e-9));
    CHECK(t.reflected == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("T + R = 1 for random layered barriers")
{
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int layers = 2 + trial % 4;
        std::vector<double> breaks, pot, mass;
        double x = 0.0;
        for (int i = 0; i < layers - 1; ++i) {
            x += 0.2 + 2.0 * u(rng);
            breaks.push_back(x);
        }
        for (int i = 0; i < layers; ++i) {
            pot.push_back(0.6 * u(rng) - 0.1);
            mass.push_back(0.04 + 0.3 * u(rng));
        }
        const double ml = 0.04 + 0.2 * u(rng);
        const double mr = 0.04 + 0.2 * u(rng);
        const Problem p(-0.5, x + 0.5, Profile::piecewise_constant(Quantity::Mass, breaks, mass),
                        Profile::piecewise_constant(Quantity::Potential, breaks, pot),
                        Scattering{{ml, 0.0}, {mr, 0.05}});
        const double e = 0.06 + 0.8 * u(rng);
        const Transmission t = transmission(p, e, 400);
        CHECK(std::abs(t.transmitted + t.reflected - 1.0) < 1e-10);
    }
}

TEST_CASE("transmission errors")
{
    CHECK_THROWS_AS(transmission(box(5.0), 0.1, 10), BoundaryKindError);
    const Problem raised(0.0, 1.0, Profile::constant(Quantity::Mass, 0.067),
                         Profile::constant(Quantity::Potential, 0.0),
                         Scattering{{0.067, 0.2}, {0.067, 0.0}});
    CHECK_THROWS_AS(transmission(raised, 0.1, 10), NoPropagatingChannelError);
}
