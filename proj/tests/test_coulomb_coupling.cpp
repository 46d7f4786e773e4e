#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "septrap/constants.hpp"
#include "septrap/coulomb_coupling.hpp"

using namespace septrap;
using constants::pi;
using constants::two_pi;

namespace {

TrapPair be9_pair(double distance, double nu = two_pi * 4.04e6) {
    return TrapPair{IonSpecies::be9(), IonSpecies::be9(), nu, nu, distance};
}

} // namespace

TEST_CASE("coupling strength at the reference geometries") {
    const double g40 = coupling_g(be9_pair(40e-6));
    CHECK(std::abs(g40 - two_pi * 1.5e3) / (two_pi * 1.5e3) < 0.02);
    const double g20 = coupling_g(be9_pair(20e-6));
    CHECK(std::abs(g20 - two_pi * 12e3) / (two_pi * 12e3) < 0.02);
}

TEST_CASE("coupling strength scales as 1/d^3") {
    const double g1 = coupling_g(be9_pair(40e-6));
    const double g2 = coupling_g(be9_pair(80e-6));
    CHECK(g2 == doctest::Approx(g1 / 8.0).epsilon(1e-12));
}

TEST_CASE("coupling strength is symmetric in the two ions") {
    TrapPair p = be9_pair(35e-6);
    p.nu2 = two_pi * 3.1e6;
    p.ion2.mass *= 2.5;
    TrapPair q{p.ion2, p.ion1, p.nu2, p.nu1, p.distance};
    CHECK(coupling_g(p) == doctest::Approx(coupling_g(q)).epsilon(1e-14));
}

TEST_CASE("renormalized frequency") {
    const TrapPair p = be9_pair(40e-6);
    const double shift = renormalized_frequency(p, 1) - p.nu1;
    CHECK(std::abs(shift - two_pi * 1.5e3) / (two_pi * 1.5e3) < 0.02);
    // identical ions and traps: shift equals g
    CHECK(shift == doctest::Approx(coupling_g(p)).epsilon(1e-12));
    // decoupled limit
    const TrapPair far = be9_pair(1.0);
    CHECK(renormalized_frequency(far, 2) == doctest::Approx(far.nu2).epsilon(1e-12));
    CHECK_THROWS_AS(renormalized_frequency(p, 3), std::invalid_argument);
}

TEST_CASE("pair validation and harmonic expansion flag") {
    CHECK(be9_pair(40e-6).harmonic_expansion_valid());
    TrapPair bad = be9_pair(40e-6);
    bad.distance = -1.0;
    CHECK_THROWS_AS(coupling_g(bad), std::invalid_argument);
    TrapPair tight = be9_pair(20e-9);
    CHECK_FALSE(tight.harmonic_expansion_valid());
}

TEST_CASE("exchange evolution on the single-excitation subspace") {
    FockBasis b(10);
    const double g = coupling_g(be9_pair(40e-6));

    HybridState s10 = HybridState::two_modes(b, b, 1, 0);
    HybridState out = exchange_evolve(s10, g, 0.5 * pi / g);
    const int l01[2] = {0, 1};
    CHECK(std::abs(out.amplitudes[state_index(out, l01)] - Complex(0.0, 1.0)) < 1e-12);

    HybridState s00 = HybridState::two_modes(b, b, 0, 0);
    HybridState out00 = exchange_evolve(s00, g, 0.77 / g);
    CHECK((out00.amplitudes - s00.amplitudes).cwiseAbs().maxCoeff() < 1e-14);

    HybridState s01 = HybridState::two_modes(b, b, 0, 1);
    HybridState flip = exchange_evolve(s01, g, pi / g);
    const int i01 = int(state_index(flip, l01));
    CHECK(std::abs(flip.amplitudes[i01] - Complex(-1.0, 0.0)) < 1e-12);
}

TEST_CASE("exchange conserves the total excitation number") {
    FockBasis b(8);
    std::mt19937 rng(5);
    std::normal_distribution<double> gauss;
    HybridState s = HybridState::two_modes(b, b, 0, 0);
    for (int m1 = 0; m1 <= 4; ++m1)
        for (int m2 = 0; m2 <= 4 - m1; ++m2) {
            const int l[2] = {m1, m2};
            s.amplitudes[state_index(s, l)] = Complex(gauss(rng), gauss(rng));
        }
    s.amplitudes.normalize();
    auto total_n = [&](const HybridState& st) {
        double n = 0.0;
        for (int f : {0, 1})
            for (int m = 1; m < b.dim(); ++m) n += m * factor_population(st, f, m);
        return n;
    };
    const double before = total_n(s);
    const HybridState after = exchange_evolve(s, 1e4, 3.3e-5);
    CHECK(std::abs(total_n(after) - before) < 1e-12);
    CHECK(std::abs(after.norm() - 1.0) < 1e-12);

    // time reversal composes to the identity
    const HybridState back = exchange_evolve(after, 1e4, -3.3e-5);
    CHECK((back.amplitudes - s.amplitudes).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("exchange population oscillation follows cos^2(gt)") {
    FockBasis b(6);
    const double g = two_pi * 1.5e3;
    HybridState s01 = HybridState::two_modes(b, b, 0, 1);
    const int l01[2] = {0, 1};
    for (int i = 0; i < 20; ++i) {
        const double t = (i + 0.5) / 20.0 * two_pi / g;
        const HybridState out = exchange_evolve(s01, g, t);
        const double p = std::norm(out.amplitudes[state_index(out, l01)]);
        CHECK(std::abs(p - std::pow(std::cos(g * t), 2)) < 1e-10);
    }
}

TEST_CASE("exchange flags population on clipped sectors") {
    FockBasis b(4);
    HybridState corner = HybridState::two_modes(b, b, 4, 1); // total 5 > n_max
    CHECK_THROWS_AS(exchange_evolve(corner, 1e4, 1e-5), TruncationError);
    HybridState full_block = HybridState::two_modes(b, b, 4, 0); // total 4, complete
    CHECK_NOTHROW(exchange_evolve(full_block, 1e4, 1e-5));
}

TEST_CASE("full coupling model: decoupled limit is free evolution") {
    FockBasis b(4);
    const TrapPair far = be9_pair(1.0); // g ~ 1e-17 rad/s
    HybridState s = HybridState::two_modes(b, b, 1, 0);
    CouplingModelOptions opt;
    opt.tol = 1e-10;
    const HybridState out = full_coupling_propagate(s, far, 1e-4, opt);
    CHECK(std::abs(std::abs(s.amplitudes.dot(out.amplitudes)) - 1.0) < 1e-8);
}

TEST_CASE("full coupling model matches the effective exchange at resonance") {
    FockBasis b(8);
    const TrapPair pair = be9_pair(40e-6);
    const double g = coupling_g(pair);
    const double t = 0.5 * pi / g;
    HybridState s = HybridState::two_modes(b, b, 1, 0);
    CouplingModelOptions opt;
    opt.tol = 1e-9;
    const HybridState full = full_coupling_propagate(s, pair, t, opt);
    const HybridState eff = exchange_evolve(s, g, t);
    const double infidelity = 1.0 - std::norm(eff.amplitudes.dot(full.amplitudes));
    CHECK(infidelity < 1e-3);
}

TEST_CASE("full coupling model: the linear terms act as a static displacement") {
    // The linear displacement terms of the quadratic expansion encode a static
    // force of ~0.63 omega in ladder units; left in, they drive the modes into
    // coherent micro-oscillation of order one within half a trap period. This
    // is why the default model absorbs them into re-centered equilibria.
    FockBasis b(14), b2(1);
    const TrapPair pair = be9_pair(40e-6);
    const double w = renormalized_frequency(pair, 1);
    const double half_period = pi / w;
    HybridState vac = HybridState::two_modes(b, b2, 0, 0);
    CouplingModelOptions with_linear;
    with_linear.include_linear = true;
    with_linear.tol = 1e-8;
    const HybridState displaced = full_coupling_propagate(vac, pair, half_period, with_linear);
    CHECK(1.0 - factor_population(displaced, 0, 0) > 0.3);
    CHECK(std::abs(displaced.norm() - 1.0) < 1e-7);

    CouplingModelOptions recentered;
    recentered.tol = 1e-10;
    const HybridState centered = full_coupling_propagate(vac, pair, half_period, recentered);
    CHECK(1.0 - factor_population(centered, 0, 0) < 1e-4);
}

TEST_CASE("full coupling model: detuned traps suppress the transfer") {
    FockBasis b(6);
    TrapPair pair = be9_pair(40e-6);
    const double g = coupling_g(pair);
    const double delta = 1e5; // rad/s
    pair.nu1 = pair.nu2 + delta;
    HybridState s = HybridState::two_modes(b, b, 1, 0);
    CouplingModelOptions opt;
    opt.tol = 1e-6;
    const HybridState out = full_coupling_propagate(s, pair, 0.5 * pi / g, opt);
    const int l10[2] = {1, 0};
    const double stay = std::norm(out.amplitudes[state_index(out, l10)]);
    const double bound = std::pow(2.0 * g / delta, 2);
    CHECK(1.0 - stay < bound);
}
