#include "mmd/empirical.hpp"

#include <cmath>
#include <ostream>

#include "mmd/parallel.hpp"

namespace mmd {

EmpiricalStats::EmpiricalStats(int m, int k, std::vector<std::uint64_t> counts)
    : m_(m), k_(k), counts_(std::move(counts)) {
    if (m < 2) throw InvalidRangeError("alphabet size must be >= 2");
    if (k < 0) throw InvalidRangeError("window order must be >= 0");
    if (counts_.size() != pow_size(m, 2 * k + 1))
        throw DimensionMismatchError("count table does not cover all windows");
    for (std::uint64_t c : counts_) total_ += c;
    if (total_ == 0) throw SequenceTooShortError("no windows counted");
}

JointDistribution EmpiricalStats::joint() const {
    std::vector<double> data(counts_.size());
    double norm = static_cast<double>(total_);
    for (std::size_t i = 0; i < counts_.size(); ++i)
        data[i] = static_cast<double>(counts_[i]) / norm;
    return JointDistribution(m_, 2 * k_ + 1, std::move(data));
}

std::size_t EmpiricalStats::context_count_slots() const { return pow_size(m_, 2 * k_); }

std::size_t EmpiricalStats::window_id(std::size_t ctx_id, Symbol center) const {
    return window_id_from_context(m_, k_, ctx_id, center);
}

std::uint64_t EmpiricalStats::context_count(std::size_t ctx_id) const {
    std::uint64_t c = 0;
    for (Symbol s = 0; s < m_; ++s) c += counts_[window_id(ctx_id, s)];
    return c;
}

ContextKey EmpiricalStats::context_key(std::size_t ctx_id) const {
    std::size_t side = pow_size(m_, k_);
    ContextKey key;
    key.left.resize(k_);
    key.right.resize(k_);
    decode_tuple(ctx_id / side, m_, key.left);
    decode_tuple(ctx_id % side, m_, key.right);
    return key;
}

std::size_t EmpiricalStats::context_id(const ContextKey& ctx) const {
    if (static_cast<int>(ctx.left.size()) != k_ || static_cast<int>(ctx.right.size()) != k_)
        throw DimensionMismatchError("context side length does not match order k");
    std::size_t side = pow_size(m_, k_);
    return encode_tuple(ctx.left, m_) * side + encode_tuple(ctx.right, m_);
}

ProbVector EmpiricalStats::conditional_center_by_id(std::size_t ctx_id) const {
    std::uint64_t ctx_total = context_count(ctx_id);
    if (ctx_total == 0) return ProbVector(m_, 1.0 / m_);
    ProbVector p(m_);
    for (Symbol s = 0; s < m_; ++s)
        p[s] = static_cast<double>(counts_[window_id(ctx_id, s)]) / static_cast<double>(ctx_total);
    return p;
}

ProbVector EmpiricalStats::conditional_center(const ContextKey& ctx) const {
    return conditional_center_by_id(context_id(ctx));
}

std::map<ContextKey, double> EmpiricalStats::context_weights() const {
    std::map<ContextKey, double> out;
    for (std::size_t c = 0; c < context_count_slots(); ++c) {
        std::uint64_t cnt = context_count(c);
        if (cnt > 0)
            out.emplace(context_key(c), static_cast<double>(cnt) / static_cast<double>(total_));
    }
    return out;
}

void EmpiricalStats::write_csv(std::ostream& os) const {
    os << "window,count,probability\n";
    std::vector<Symbol> tup(2 * k_ + 1);
    char buf[32];
    for (std::size_t w = 0; w < counts_.size(); ++w) {
        decode_tuple(w, m_, tup);
        std::snprintf(buf, sizeof(buf), "%.12g",
                      static_cast<double>(counts_[w]) / static_cast<double>(total_));
        os << tuple_to_string(tup) << ',' << counts_[w] << ',' << buf << '\n';
    }
}

EmpiricalStats empirical_joint(const Sequence& z, int m, int k, int threads) {
    std::int64_t n = static_cast<std::int64_t>(z.size());
    if (n <= 2 * static_cast<std::int64_t>(k))
        throw SequenceTooShortError("sequence length must exceed 2k");
    for (Symbol s : z)
        if (s < 0 || s >= m) throw InvalidRangeError("symbol out of alphabet range");

    std::size_t slots = pow_size(m, 2 * k + 1);
    std::int64_t windows = n - 2 * k;
    int chunks = std::max(1, std::min<int>(threads, static_cast<int>(windows)));
    std::vector<std::vector<std::uint64_t>> partial(
        chunks, std::vector<std::uint64_t>(slots, 0));

    // window i covers z[i-k .. i+k]; loop over 0-based center offsets
    parallel_chunks(windows, threads, [&](std::int64_t lo, std::int64_t hi, int chunk) {
        auto& local = partial[chunk];
        std::vector<Symbol> win(2 * k + 1);
        for (std::int64_t c = lo; c < hi; ++c) {
            for (int j = 0; j < 2 * k + 1; ++j) win[j] = z[static_cast<std::size_t>(c + j)];
            ++local[encode_tuple(win, m)];
        }
    });

    std::vector<std::uint64_t> counts(slots, 0);
    for (const auto& local : partial)
        for (std::size_t i = 0; i < slots; ++i) counts[i] += local[i];
    return EmpiricalStats(m, k, std::move(counts));
}

double l_inf_distance(const JointDistribution& p, const JointDistribution& q) {
    if (p.base() != q.base() || p.order() != q.order())
        throw DimensionMismatchError("distribution shapes differ");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d = std::max(d, std::abs(p[i] - q[i]));
    return d;
}

}  // namespace mmd
