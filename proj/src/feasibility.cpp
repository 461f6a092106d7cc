#include "mmd/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <json.hpp>

namespace mmd {

std::vector<double> induced_input(const Channel& ch, const JointDistribution& q) {
    if (ch.size() != q.base())
        throw DimensionMismatchError("channel alphabet does not match tensor base");
    int m = q.base();
    int t = q.order();
    std::vector<double> cur(q.data());
    std::vector<double> next(cur.size());
    // contract Pi^{-T} into one axis at a time: t * m^{t+1} multiplies total
    for (int axis = 0; axis < t; ++axis) {
        std::size_t inner = pow_size(m, t - 1 - axis);  // stride of this axis
        std::size_t outer = cur.size() / (inner * static_cast<std::size_t>(m));
        for (std::size_t o = 0; o < outer; ++o) {
            std::size_t base = o * inner * static_cast<std::size_t>(m);
            for (std::size_t i = 0; i < inner; ++i) {
                for (int x = 0; x < m; ++x) {
                    double acc = 0.0;
                    for (int z = 0; z < m; ++z)
                        acc += ch.inv_t(x, z) * cur[base + static_cast<std::size_t>(z) * inner + i];
                    next[base + static_cast<std::size_t>(x) * inner + i] = acc;
                }
            }
        }
        cur.swap(next);
    }
    return cur;
}

FeasibilityVerdict is_feasible(const Channel& ch, const JointDistribution& q, double eps,
                               int index) {
    if (eps < 0.0) throw InvalidRangeError("feasibility slack must be >= 0");
    std::vector<double> input = induced_input(ch, q);
    double min_entry = input.empty() ? 0.0 : input[0];
    for (double v : input) min_entry = std::min(min_entry, v);
    return FeasibilityVerdict{index, min_entry, min_entry >= -eps};
}

namespace {

TrimmedSet trim_against(const ChannelSet& delta, const JointDistribution& law, double eps,
                        int order, int threads) {
    std::vector<FeasibilityVerdict> verdicts(delta.size());
    auto run = [&](std::size_t i) { verdicts[i] = is_feasible(delta.channel(i), law, eps,
                                                              static_cast<int>(i)); };
    if (threads > 1 && delta.size() > 1) {
        std::vector<std::thread> pool;
        std::size_t stride = static_cast<std::size_t>(std::max(threads, 1));
        for (std::size_t t0 = 0; t0 < std::min<std::size_t>(stride, delta.size()); ++t0)
            pool.emplace_back([&, t0] {
                for (std::size_t i = t0; i < delta.size(); i += stride) run(i);
            });
        for (auto& th : pool) th.join();
    } else {
        for (std::size_t i = 0; i < delta.size(); ++i) run(i);
    }

    std::vector<Channel> kept;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (verdicts[i].feasible) {
            kept.push_back(delta.channel(i));
            labels.push_back(delta.label(i));
        }
    }
    bool fallback = kept.empty();
    if (fallback) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < delta.size(); ++i)
            if (verdicts[i].min_entry > verdicts[best].min_entry) best = i;
        kept.push_back(delta.channel(best));
        labels.push_back(delta.label(best));
    }
    return TrimmedSet{ChannelSet(std::move(kept), std::move(labels)), std::move(verdicts), eps,
                      order, fallback};
}

}  // namespace

TrimmedSet trim(const ChannelSet& delta, const EmpiricalStats& stats, double eps, int threads) {
    return trim_against(delta, stats.joint(), eps, stats.k(), threads);
}

TrimmedSet trim(const ChannelSet& delta, const JointDistribution& law, double eps, int threads) {
    int order = (law.order() - 1) / 2;
    return trim_against(delta, law, eps, order, threads);
}

std::string TrimmedSet::report_json(const ChannelSet& input) const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& v : verdicts) {
        j.push_back({{"label", input.label(static_cast<std::size_t>(v.channel_index))},
                     {"min_entry", v.min_entry},
                     {"feasible", v.feasible},
                     {"eps", eps}});
    }
    nlohmann::json top;
    top["order"] = order;
    top["eps"] = eps;
    top["fallback"] = fallback;
    top["channels"] = j;
    return top.dump(2);
}

double default_feas_eps(int m, int l, std::uint64_t n) {
    if (n <= 2 * static_cast<std::uint64_t>(l))
        throw SequenceTooShortError("sequence length must exceed 2l");
    double windows = static_cast<double>(n - 2 * static_cast<std::uint64_t>(l));
    double dev = std::sqrt((2 * l + 1) * std::log(static_cast<double>(m)) / windows);
    return std::max(1e-9, dev);
}

double phi_k(int k, const ChannelSet& delta, const LossMatrix& loss, double eps) {
    if (eps < 0.0) throw InvalidRangeError("eps must be >= 0");
    double states = static_cast<double>(pow_size(delta.m(), 2 * k + 1));
    return states * loss.max_loss() * delta.max_inv_norm() * eps;
}

std::function<double(double)> b_l_modulus(int l, const ChannelSet& delta) {
    double exponent = static_cast<double>(l) * static_cast<double>(pow_size(delta.m(), l));
    double factor = std::pow(delta.max_inv_norm(), exponent);
    return [factor](double eps) { return eps * factor; };
}

ChannelSet bsc_cover(double lo, double hi, double eta) {
    if (!(0.0 <= lo && lo <= hi && hi < 0.5)) throw InvalidRangeError("need 0 <= lo <= hi < 0.5");
    if (!(eta > 0.0)) throw InvalidRangeError("cover radius must be positive");
    std::vector<Channel> grid;
    std::vector<std::string> labels;
    auto add = [&](double d) {
        grid.push_back(bsc(d));
        char buf[32];
        std::snprintf(buf, sizeof(buf), "bsc_%.12g", d);
        labels.emplace_back(buf);
    };
    if (hi - lo <= 1e-15) {
        add(lo);
    } else {
        int points = static_cast<int>(std::ceil((hi - lo) / eta)) + 1;
        points = std::max(points, 2);
        double step = (hi - lo) / (points - 1);
        for (int i = 0; i < points; ++i) add(i + 1 == points ? hi : lo + i * step);
    }
    return ChannelSet(std::move(grid), std::move(labels));
}

}  // namespace mmd
