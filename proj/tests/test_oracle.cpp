#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmd/minimax.hpp"
#include "mmd/oracle.hpp"
#include "mmd/rng.hpp"

using namespace mmd;

TEST_CASE("grid search reproduces the worked example") {
    ChannelSet delta({bsc(0.1), bsc(0.2)});
    LossMatrix loss = hamming_loss(2);
    oracle::GridResult g = oracle::grid_minimax_binary_k0({0.75, 0.25}, delta, loss, 1e-3);
    CHECK(std::abs(g.value - 0.1428) <= 2e-3);
    CHECK(std::abs(g.d1 - 0.510) <= 2e-3);
    CHECK(g.d0 == doctest::Approx(0.0));
}

TEST_CASE("grid search on a noiseless singleton") {
    ChannelSet delta({Channel({{1.0, 0.0}, {0.0, 1.0}})});
    LossMatrix loss = hamming_loss(2);
    oracle::GridResult g = oracle::grid_minimax_binary_k0({0.6, 0.4}, delta, loss, 0.01);
    CHECK(g.value == doctest::Approx(0.0));
    CHECK(g.d0 == doctest::Approx(0.0));
    CHECK(g.d1 == doctest::Approx(1.0));
}

TEST_CASE("grid search on the degenerate two-channel set") {
    double delta = 0.2;
    ChannelSet set({bsc(delta), Channel({{1.0, 0.0}, {0.0, 1.0}})});
    LossMatrix loss = hamming_loss(2);
    oracle::GridResult g =
        oracle::grid_minimax_binary_k0({1.0 - delta, delta}, set, loss, 1e-3);
    CHECK(std::abs(g.value - delta / 2.0) <= 2e-3);
    CHECK(std::abs(g.d1 - 0.5) <= 2e-3);
    CHECK(g.d0 == doctest::Approx(0.0));
}

TEST_CASE("grid value brackets the program value") {
    LossMatrix loss = hamming_loss(2);
    for (std::uint64_t i = 0; i < 10; ++i) {
        double q1 = 0.1 + 0.8 * rng::uniform(23, 61, i);
        double cap = std::min({q1, 1.0 - q1, 0.45});
        ChannelSet delta({bsc(0.9 * cap * rng::uniform(24, 61, i)),
                          bsc(0.9 * cap * (0.5 + 0.5 * rng::uniform(25, 61, i)))});
        JointDistribution q(2, 1, {1.0 - q1, q1});
        MinimaxSolution sol = solve_minimax(q, delta, 0, loss);
        oracle::GridResult g =
            oracle::grid_minimax_binary_k0({1.0 - q1, q1}, delta, loss, 1e-3);
        CHECK(g.value >= sol.value - 1e-9);  // grid points are feasible rules
        CHECK(std::abs(g.value - sol.value) <= 2e-3);
    }
}

TEST_CASE("exhaustive expectation of a noiseless identity setup is zero") {
    Channel id({{1.0, 0.0}, {0.0, 1.0}});
    SourceChannelPair pair{SourceModel::make_iid({0.5, 0.5}), id};
    WindowedDenoiser f = WindowedDenoiser::say_what_you_see(2, 0);
    oracle::ExhaustiveResult r = oracle::exhaustive_expected_loss(pair, f, 6, hamming_loss(2));
    CHECK(r.expected == doctest::Approx(0.0));
}

TEST_CASE("exhaustive expectation of say-what-you-see is the crossover rate") {
    SourceChannelPair pair{SourceModel::make_iid({0.7, 0.3}), bsc(0.12)};
    WindowedDenoiser f = WindowedDenoiser::say_what_you_see(2, 0);
    oracle::ExhaustiveResult r = oracle::exhaustive_expected_loss(pair, f, 8, hamming_loss(2));
    CHECK(r.expected == doctest::Approx(0.12).epsilon(1e-12));
}

TEST_CASE("exhaustive conditional averages back to the expectation") {
    SourceChannelPair pair{SourceModel::make_iid({0.6, 0.4}), bsc(0.2)};
    WindowedDenoiser f = WindowedDenoiser::uniform(2, 1);
    int n = 6;
    oracle::ExhaustiveResult r = oracle::exhaustive_expected_loss(pair, f, n, hamming_loss(2));
    // sum over z of P(z) E[L | z]
    double acc = 0.0;
    std::size_t states = pow_size(2, n);
    for (std::size_t zi = 0; zi < states; ++zi) {
        Sequence z(n);
        decode_tuple(zi, 2, z);
        double pz = 1.0;
        // output of an iid pair is iid with parameter p(1-d) + (1-p)d = .44
        for (Symbol s : z) pz *= (s == 1 ? 0.44 : 0.56);
        acc += pz * r.conditional(z);
    }
    CHECK(acc == doctest::Approx(r.expected).epsilon(1e-12));
}

TEST_CASE("state space guard") {
    SourceChannelPair pair{SourceModel::make_iid({0.5, 0.5}), bsc(0.1)};
    WindowedDenoiser f = WindowedDenoiser::say_what_you_see(2, 0);
    CHECK_THROWS_AS(oracle::exhaustive_expected_loss(pair, f, 13, hamming_loss(2)),
                    StateSpaceTooLargeError);
}

TEST_CASE("scalar bsc inversion") {
    CHECK(oracle::induced_bsc_input(0.25, 0.1) == doctest::Approx(0.1875).epsilon(1e-12));
    CHECK(oracle::induced_bsc_input(0.25, 0.2) == doctest::Approx(0.05 / 0.6).epsilon(1e-12));
    CHECK(oracle::induced_bsc_input(0.3, 0.3) == doctest::Approx(0.0));
    CHECK_THROWS_AS(oracle::induced_bsc_input(0.25, 0.5), SingularError);
}

TEST_CASE("stationary distributions") {
    ProbVector sym = oracle::markov_stationary({{0.8, 0.2}, {0.2, 0.8}});
    CHECK(sym[0] == doctest::Approx(0.5).epsilon(1e-10));

    ProbVector skew = oracle::markov_stationary({{0.9, 0.1}, {0.3, 0.7}});
    CHECK(skew[0] == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(skew[1] == doctest::Approx(0.25).epsilon(1e-10));

    // periodic but irreducible chains still converge under damping
    ProbVector per = oracle::markov_stationary({{0.0, 1.0}, {1.0, 0.0}});
    CHECK(per[0] == doctest::Approx(0.5).epsilon(1e-10));

    CHECK_THROWS_AS(oracle::markov_stationary({{1.0, 0.0}, {0.0, 1.0}}), NotIrreducibleError);
}
