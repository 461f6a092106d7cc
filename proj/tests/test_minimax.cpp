#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmd/empirical.hpp"
#include "mmd/minimax.hpp"
#include "mmd/rng.hpp"

using namespace mmd;

namespace {

// direct transcription of the closed-form binary context loss:
// [d(1-a-d) d1 + (1-d)(1-a-d) d0 + (1-d)(a-d)(1-d1) + d(a-d)(1-d0)] / (1-2d)
double binary_closed_form(double alpha, double delta, double d0, double d1) {
    double db = 1.0 - delta;
    return (delta * (1.0 - alpha - delta) * d1 + db * (1.0 - alpha - delta) * d0 +
            db * (alpha - delta) * (1.0 - d1) + delta * (alpha - delta) * (1.0 - d0)) /
           (1.0 - 2.0 * delta);
}

DenoiserSlice binary_slice(double d0, double d1) {
    return DenoiserSlice{{1.0 - d0, d0}, {1.0 - d1, d1}};
}

JointDistribution bern(double p1) { return JointDistribution(2, 1, {1.0 - p1, p1}); }

ProbVector random_simplex(int m, std::uint64_t seed, std::uint64_t idx) {
    ProbVector p(m);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        p[i] = -std::log(1.0 - rng::uniform(seed, 51, idx * 16 + i));
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

Channel random_channel(int m, std::uint64_t seed, std::uint64_t idx) {
    std::vector<std::vector<double>> rows(m);
    for (int x = 0; x < m; ++x) {
        ProbVector noise = random_simplex(m, seed, idx * 64 + x);
        rows[x].resize(m);
        for (int z = 0; z < m; ++z) rows[x][z] = 0.5 * noise[z] + (x == z ? 0.5 : 0.0);
    }
    return Channel(rows);
}

JointDistribution random_joint(int m, int order, std::uint64_t seed, std::uint64_t idx) {
    std::size_t size = pow_size(m, order);
    std::vector<double> data(size);
    double sum = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        data[i] = rng::uniform(seed, 53, idx * 4096 + i) + 1e-4;
        sum += data[i];
    }
    for (double& v : data) v /= sum;
    return JointDistribution(m, order, std::move(data));
}

WindowedDenoiser random_denoiser(int m, int k, std::uint64_t seed, std::uint64_t idx) {
    std::size_t windows = pow_size(m, 2 * k + 1);
    std::vector<ProbVector> table(windows);
    for (std::size_t w = 0; w < windows; ++w) table[w] = random_simplex(m, seed, idx * 512 + w);
    return WindowedDenoiser(m, k, std::move(table));
}

}  // namespace

TEST_CASE("context loss matches the binary closed form on feasible instances") {
    LossMatrix loss = hamming_loss(2);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        double alpha = 0.05 + 0.9 * rng::uniform(1, 61, i);
        double cap = std::min(alpha, 1.0 - alpha);
        double delta = 0.999 * cap * rng::uniform(2, 61, i);
        double d0 = rng::uniform(3, 61, i);
        double d1 = rng::uniform(4, 61, i);
        double got = f_k_context_loss({1.0 - alpha, alpha}, bsc(delta), binary_slice(d0, d1), loss);
        CHECK(got == doctest::Approx(binary_closed_form(alpha, delta, d0, d1)).epsilon(1e-12));
    }
}

TEST_CASE("say-what-you-see loses exactly the crossover probability") {
    LossMatrix loss = hamming_loss(2);
    double got = f_k_context_loss({1.0 - 0.1875, 0.1875}, bsc(0.1), binary_slice(0.0, 1.0), loss);
    CHECK(got == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("identity channel with matched point masses is lossless") {
    Channel id({{1.0, 0.0}, {0.0, 1.0}});
    LossMatrix loss = hamming_loss(2);
    CHECK(f_k_context_loss({0.0, 1.0}, id, binary_slice(0.0, 1.0), loss) == 0.0);
}

TEST_CASE("infeasible center laws are clamped to the boundary") {
    // alpha < delta: the raw inverted input puts negative mass on symbol 1
    LossMatrix loss = hamming_loss(2);
    double got = f_k_context_loss({0.95, 0.05}, bsc(0.2), binary_slice(0.3, 0.7), loss);
    // clamped posterior is a point mass on 0; loss is P(reconstruct 1)
    double want = 0.8 * 0.3 + 0.2 * 0.7;
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("order zero g_k reduces to the context loss on the marginal") {
    LossMatrix loss = hamming_loss(2);
    WindowedDenoiser f(2, 0, {{0.6, 0.4}, {0.1, 0.9}});
    double via_g = g_k_expected_loss(bern(0.25), bsc(0.1), f, loss);
    double via_f = f_k_context_loss({0.75, 0.25}, bsc(0.1), binary_slice(0.4, 0.9), loss);
    CHECK(via_g == doctest::Approx(via_f).epsilon(1e-12));
}

TEST_CASE("g_k is linear in the rule") {
    LossMatrix loss = hamming_loss(2);
    for (std::uint64_t i = 0; i < 50; ++i) {
        JointDistribution q = random_joint(2, 3, 5, i);
        Channel ch = random_channel(2, 6, i);
        WindowedDenoiser f = random_denoiser(2, 1, 7, i);
        WindowedDenoiser g = random_denoiser(2, 1, 8, i);
        double a = rng::uniform(9, 61, i);
        WindowedDenoiser mix = WindowedDenoiser::mixture(f, g, a);
        double want = a * g_k_expected_loss(q, ch, f, loss) +
                      (1.0 - a) * g_k_expected_loss(q, ch, g, loss);
        CHECK(g_k_expected_loss(q, ch, mix, loss) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("worked example expected losses") {
    LossMatrix loss = hamming_loss(2);
    ChannelSet delta({bsc(0.1), bsc(0.2)});
    WindowedDenoiser f1 = WindowedDenoiser::say_what_you_see(2, 0);
    WindowedDenoiser f2 = WindowedDenoiser::constant(2, 0, 0);

    CHECK(g_k_expected_loss(bern(0.25), delta.channel(0), f2, loss) ==
          doctest::Approx(0.15 / 0.8).epsilon(1e-12));

    WorstCase j1 = j_k_worst_case(bern(0.25), delta, f1, loss);
    CHECK(j1.value == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(j1.argmax_channel == 1);

    WorstCase j2 = j_k_worst_case(bern(0.25), delta, f2, loss);
    CHECK(j2.value == doctest::Approx(0.1875).epsilon(1e-12));
    CHECK(j2.argmax_channel == 0);
}

TEST_CASE("singleton worst case equals the plain expected loss") {
    LossMatrix loss = hamming_loss(2);
    ChannelSet delta({bsc(0.15)});
    WindowedDenoiser f = random_denoiser(2, 0, 11, 0);
    CHECK(j_k_worst_case(bern(0.3), delta, f, loss).value ==
          doctest::Approx(g_k_expected_loss(bern(0.3), delta.channel(0), f, loss)));
}

TEST_CASE("minimax solution of the worked example") {
    LossMatrix loss = hamming_loss(2);
    ChannelSet delta({bsc(0.1), bsc(0.2)});
    MinimaxSolution sol = solve_minimax(bern(0.25), delta, 0, loss);

    CHECK(sol.value == doctest::Approx(1.0 / 7.0).epsilon(1e-10));
    CHECK(std::abs(sol.value - 0.1428) <= 5e-4);
    double d0 = sol.denoiser.at(0)[1];
    double d1 = sol.denoiser.at(1)[1];
    CHECK(d0 == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(d1 == doctest::Approx(25.0 / 49.0).epsilon(1e-9));
    CHECK(std::abs(d1 - 0.5101) <= 5e-3);
    CHECK(sol.active_channels == std::vector<int>{0, 1});
    CHECK(sol.status == "optimal");

    // saddle: no channel exceeds the value, at least one attains it
    for (std::size_t i = 0; i < delta.size(); ++i)
        CHECK(g_k_expected_loss(bern(0.25), delta.channel(i), sol.denoiser, loss) <=
              sol.value + 1e-8);
}

TEST_CASE("degenerate uncertainty between a bsc and the clean channel") {
    LossMatrix loss = hamming_loss(2);
    for (double delta : {0.05, 0.1, 0.2}) {
        ChannelSet set({bsc(delta), Channel({{1.0, 0.0}, {0.0, 1.0}})});
        MinimaxSolution sol = solve_minimax(bern(delta), set, 0, loss);
        CHECK(std::abs(sol.value - delta / 2.0) <= 1e-6);
        CHECK(std::abs(sol.denoiser.at(1)[1] - 0.5) <= 1e-4);
        CHECK(std::abs(sol.denoiser.at(0)[1]) <= 1e-6);
    }
}

TEST_CASE("minimax value is a certificate against random competitors") {
    LossMatrix loss = hamming_loss(2);
    ChannelSet delta({bsc(0.07), bsc(0.17), bsc(0.27)});
    JointDistribution q = random_joint(2, 1, 13, 0);
    MinimaxSolution sol = solve_minimax(q, delta, 0, loss);
    for (std::uint64_t i = 0; i < 200; ++i) {
        WindowedDenoiser f = random_denoiser(2, 0, 14, i);
        CHECK(sol.value <= j_k_worst_case(q, delta, f, loss).value + 1e-8);
    }
}

TEST_CASE("scaling the loss scales the value and keeps the rule optimal") {
    LossMatrix loss = hamming_loss(2);
    LossMatrix scaled = loss.scaled(3.5);
    ChannelSet delta({bsc(0.1), bsc(0.2)});
    JointDistribution q = bern(0.25);
    MinimaxSolution base = solve_minimax(q, delta, 0, loss);
    MinimaxSolution big = solve_minimax(q, delta, 0, scaled);
    CHECK(big.value / base.value == doctest::Approx(3.5).epsilon(1e-9));
    // original minimizer stays optimal under the scaled loss
    CHECK(j_k_worst_case(q, delta, base.denoiser, scaled).value <= big.value + 1e-8);
}

TEST_CASE("singleton minimax equals the deterministic per-window rule") {
    for (std::uint64_t i = 0; i < 20; ++i) {
        int m = 2 + static_cast<int>(i % 2);
        int k = static_cast<int>((i / 2) % 2);
        LossMatrix loss = hamming_loss(m);
        Channel ch = random_channel(m, 15, i);
        ChannelSet delta({ch});
        JointDistribution q = random_joint(m, 2 * k + 1, 16, i);
        MinimaxSolution sol = solve_minimax(q, delta, k, loss);
        WindowedDenoiser dude = dude_rule(q, ch, k, loss);
        CHECK(std::abs(sol.value - g_k_expected_loss(q, ch, dude, loss)) <= 1e-9);
    }
}

TEST_CASE("known-channel rule on the worked example") {
    LossMatrix loss = hamming_loss(2);
    // crossover .1: output parameter .25 inverts to input .1875 > .1, so the
    // observation is the best guess
    WindowedDenoiser case1 = dude_rule(bern(0.25), bsc(0.1), 0, loss);
    CHECK(case1.at(0)[0] == 1.0);
    CHECK(case1.at(1)[1] == 1.0);
    // crossover .2: input parameter .0833 < .2, an observed 1 is more likely
    // channel noise
    WindowedDenoiser case2 = dude_rule(bern(0.25), bsc(0.2), 0, loss);
    CHECK(case2.at(0)[0] == 1.0);
    CHECK(case2.at(1)[0] == 1.0);

    Channel id({{1.0, 0.0}, {0.0, 1.0}});
    WindowedDenoiser through = dude_rule(bern(0.4), id, 0, loss);
    CHECK(through.at(0)[0] == 1.0);
    CHECK(through.at(1)[1] == 1.0);
}

TEST_CASE("zero-weight contexts come back uniform") {
    // all-zero observations never show context (1, 1)
    Sequence z(64, 0);
    EmpiricalStats stats = empirical_joint(z, 2, 1);
    LossMatrix loss = hamming_loss(2);
    ChannelSet delta({bsc(0.1), bsc(0.2)});
    MinimaxSolution sol = solve_minimax(stats, delta, 1, loss);
    std::vector<Symbol> unseen{1, 0, 1};
    CHECK(sol.denoiser.at_window(unseen)[0] == doctest::Approx(0.5));
    CHECK(sol.denoiser.at_window(unseen)[1] == doctest::Approx(0.5));
}

TEST_CASE("value matches the recomputed worst case") {
    for (std::uint64_t i = 0; i < 20; ++i) {
        int m = 2 + static_cast<int>(i % 2);
        LossMatrix loss = hamming_loss(m);
        ChannelSet delta({random_channel(m, 17, 2 * i), random_channel(m, 17, 2 * i + 1)});
        JointDistribution q = random_joint(m, 1, 18, i);
        MinimaxSolution sol = solve_minimax(q, delta, 0, loss);
        CHECK(std::abs(sol.value - j_k_worst_case(q, delta, sol.denoiser, loss).value) <= 1e-8);
    }
}

TEST_CASE("denoiser json round trip") {
    WindowedDenoiser f = random_denoiser(2, 1, 19, 3);
    WindowedDenoiser back = denoiser_from_json(denoiser_to_json(f));
    CHECK(back.k() == f.k());
    for (std::size_t w = 0; w < f.window_count(); ++w)
        for (int a = 0; a < 2; ++a)
            CHECK(back.at(w)[a] == f.at(w)[a]);  // bit-exact through the text form
    CHECK_THROWS_AS(denoiser_from_json("{\"k\":1,\"table\":{}}"), ConfigInvalidError);
}

TEST_CASE("shape mismatches are rejected") {
    LossMatrix loss = hamming_loss(2);
    WindowedDenoiser f = WindowedDenoiser::uniform(2, 0);
    Channel c3 = random_channel(3, 20, 0);
    CHECK_THROWS_AS(g_k_expected_loss(bern(0.3), c3, f, loss), DimensionMismatchError);
    EmpiricalStats stats = empirical_joint(Sequence{0, 1, 0, 1}, 2, 1);
    CHECK_THROWS_AS(solve_minimax(stats, ChannelSet({bsc(0.1)}), 0, loss),
                    DimensionMismatchError);
}
