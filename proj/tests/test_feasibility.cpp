#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mmd/empirical.hpp"
#include "mmd/evaluation.hpp"
#include "mmd/feasibility.hpp"
#include "mmd/minimax.hpp"
#include "mmd/rng.hpp"

using namespace mmd;

namespace {

JointDistribution bern_product(double p1, int order) {
    return JointDistribution::iid_product({1.0 - p1, p1}, order);
}

}  // namespace

TEST_CASE("identity channel leaves tensors unchanged") {
    Channel id({{1.0, 0.0}, {0.0, 1.0}});
    JointDistribution q = bern_product(0.3, 3);
    std::vector<double> out = induced_input(id, q);
    for (std::size_t i = 0; i < q.size(); ++i)
        CHECK(out[i] == doctest::Approx(q[i]).epsilon(1e-12));
}

TEST_CASE("bsc inversion reproduces the worked alphas") {
    JointDistribution q = bern_product(0.25, 1);
    CHECK(induced_input(bsc(0.1), q)[1] == doctest::Approx(0.15 / 0.8).epsilon(1e-12));
    CHECK(induced_input(bsc(0.2), q)[1] == doctest::Approx(0.05 / 0.6).epsilon(1e-12));
}

TEST_CASE("axis-wise contraction preserves mass") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        int m = 2 + static_cast<int>(trial % 2);
        int order = 1 + static_cast<int>(trial % 5);
        std::size_t size = pow_size(m, order);
        std::vector<double> data(size);
        double sum = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            data[i] = rng::uniform(trial, 31, i) + 1e-3;
            sum += data[i];
        }
        for (double& v : data) v /= sum;
        JointDistribution q(m, order, std::move(data));

        std::vector<std::vector<double>> rows(m, std::vector<double>(m, 0.1 / (m - 1)));
        for (int x = 0; x < m; ++x) rows[x][x] = 0.9;
        std::vector<double> out = induced_input(Channel(rows), q);
        double total = 0.0;
        for (double v : out) total += v;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("feasibility verdicts on the worked example") {
    JointDistribution q = bern_product(0.25, 1);
    FeasibilityVerdict v3 = is_feasible(bsc(0.3), q, 1e-6);
    CHECK(v3.min_entry == doctest::Approx(-0.125).epsilon(1e-12));
    CHECK_FALSE(v3.feasible);
    FeasibilityVerdict v2 = is_feasible(bsc(0.2), q, 1e-6);
    CHECK(v2.min_entry == doctest::Approx(0.05 / 0.6).epsilon(1e-12));
    CHECK(v2.feasible);
    Channel id({{1.0, 0.0}, {0.0, 1.0}});
    FeasibilityVerdict vid = is_feasible(id, q, 0.0);
    CHECK(vid.feasible);
    CHECK(vid.min_entry == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("trim keeps exactly the feasible channels") {
    ChannelSet delta({bsc(0.1), bsc(0.2), bsc(0.3)});
    TrimmedSet t = trim(delta, bern_product(0.25, 1), 1e-9);
    REQUIRE(t.survivors.size() == 2);
    CHECK_FALSE(t.fallback);
    CHECK(t.verdicts[0].feasible);
    CHECK(t.verdicts[1].feasible);
    CHECK_FALSE(t.verdicts[2].feasible);
}

TEST_CASE("trim of a feasible singleton is the identity") {
    ChannelSet delta({bsc(0.1)});
    TrimmedSet t = trim(delta, bern_product(0.25, 1), 0.0);
    CHECK(t.survivors.size() == 1);
    CHECK_FALSE(t.fallback);
}

TEST_CASE("empty trim falls back to the best scorer") {
    ChannelSet delta({bsc(0.4)});
    TrimmedSet t = trim(delta, bern_product(0.25, 1), 1e-9);
    REQUIRE(t.survivors.size() == 1);
    CHECK(t.fallback);
    CHECK(t.verdicts[0].min_entry == doctest::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("trimming is monotone in the order on exact product laws") {
    ChannelSet delta({bsc(0.05), bsc(0.15), bsc(0.24), bsc(0.3)});
    std::vector<std::vector<int>> surviving;
    for (int l = 0; l <= 2; ++l) {
        TrimmedSet t = trim(delta, bern_product(0.25, 2 * l + 1), 1e-12);
        std::vector<int> idx;
        for (const auto& v : t.verdicts)
            if (v.feasible) idx.push_back(v.channel_index);
        surviving.push_back(idx);
    }
    for (std::size_t l = 1; l < surviving.size(); ++l)
        for (int i : surviving[l])
            CHECK(std::find(surviving[l - 1].begin(), surviving[l - 1].end(), i) !=
                  surviving[l - 1].end());
}

TEST_CASE("true channel survives sampled trimming") {
    // Bern(.3) through BSC(.1); order-1 output parameter .34
    SourceChannelPair truth{SourceModel::make_iid({0.7, 0.3}), bsc(0.1)};
    ChannelSet delta({bsc(0.1), bsc(0.2), bsc(0.3), bsc(0.4)});
    int survived = 0;
    int trials = 30;
    std::uint64_t n = 100000;
    for (int s = 0; s < trials; ++s) {
        Sequence x = sample_source(truth.source, n, static_cast<std::uint64_t>(s));
        Sequence z = corrupt(x, truth.channel, static_cast<std::uint64_t>(s));
        TrimmedSet t = trim(delta, empirical_joint(z, 2, 0), 0.01);
        if (t.verdicts[0].feasible) ++survived;
    }
    CHECK(survived == trials);
}

TEST_CASE("phi_k formula") {
    ChannelSet delta({bsc(0.1)});
    LossMatrix loss = hamming_loss(2);
    CHECK(phi_k(0, delta, loss, 0.0) == 0.0);
    CHECK(phi_k(0, delta, loss, 0.01) == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(phi_k(0, delta, loss, 0.02) == doctest::Approx(2.0 * phi_k(0, delta, loss, 0.01)));
    CHECK(phi_k(1, delta, loss, 0.01) == doctest::Approx(4.0 * 0.025).epsilon(1e-12));
}

TEST_CASE("phi_k bounds the objective shift under set trimming") {
    LossMatrix loss = hamming_loss(2);
    int violations = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        int k = static_cast<int>(trial % 2);
        std::vector<Channel> chs;
        for (int i = 0; i < 4; ++i)
            chs.push_back(bsc(0.02 + 0.44 * rng::uniform(trial, 41, 100 + i)));
        ChannelSet delta(chs);
        ChannelSet sub({chs[0], chs[1]});

        std::size_t size = pow_size(2, 2 * k + 1);
        std::vector<double> data(size);
        double sum = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            data[i] = rng::uniform(trial, 43, i) + 1e-3;
            sum += data[i];
        }
        for (double& v : data) v /= sum;
        JointDistribution q(2, 2 * k + 1, std::move(data));

        std::vector<ProbVector> table(size);
        for (std::size_t w = 0; w < size; ++w) {
            double d = rng::uniform(trial, 47, w);
            table[w] = {1.0 - d, d};
        }
        WindowedDenoiser f(2, k, std::move(table));

        double gap = std::abs(j_k_worst_case(q, delta, f, loss).value -
                              j_k_worst_case(q, sub, f, loss).value);
        if (gap > phi_k(k, delta, loss, rho(delta, sub)) + 1e-9) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("b_l modulus") {
    ChannelSet delta({bsc(0.1)});
    auto b1 = b_l_modulus(1, delta);
    CHECK(b1(0.0) == 0.0);
    CHECK(b1(1.0) == doctest::Approx(1.5625).epsilon(1e-12));  // 1.25^(1*2)
    ChannelSet identity_only({Channel({{1.0, 0.0}, {0.0, 1.0}})});
    auto bi = b_l_modulus(3, identity_only);
    CHECK(bi(0.37) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("bsc cover grids") {
    ChannelSet single = bsc_cover(0.1, 0.1, 0.05);
    CHECK(single.size() == 1);
    CHECK(channel_distance(single.channel(0), bsc(0.1)) <= 1e-15);

    ChannelSet grid = bsc_cover(0.0, 0.4, 0.1);
    CHECK(grid.size() == 5);
    for (double d = 0.0; d <= 0.4; d += 0.013) {
        double best = 1.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            best = std::min(best, channel_distance(grid.channel(i), bsc(d)));
        CHECK(best <= 0.1 + 1e-12);
    }

    CHECK(bsc_cover(0.1, 0.2, 0.5).size() == 2);
    CHECK_THROWS_AS(bsc_cover(0.2, 0.1, 0.1), InvalidRangeError);
    CHECK_THROWS_AS(bsc_cover(0.0, 0.5, 0.1), InvalidRangeError);
}

TEST_CASE("default slack follows the deviation scale") {
    double eps = default_feas_eps(2, 0, 100000);
    CHECK(eps == doctest::Approx(std::sqrt(std::log(2.0) / 100000.0)).epsilon(1e-12));
    CHECK(default_feas_eps(2, 0, std::uint64_t{1} << 62) == 1e-9);  // floor kicks in
}

TEST_CASE("trim report json carries the verdicts") {
    ChannelSet delta({bsc(0.1), bsc(0.3)}, {"low", "high"});
    TrimmedSet t = trim(delta, bern_product(0.25, 1), 1e-9);
    std::string j = t.report_json(delta);
    CHECK(j.find("\"low\"") != std::string::npos);
    CHECK(j.find("\"high\"") != std::string::npos);
    CHECK(j.find("min_entry") != std::string::npos);
    CHECK(j.find("\"fallback\": false") != std::string::npos);
}
