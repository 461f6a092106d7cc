#pragma once
// Sliding-window statistics of an observed sequence: counts of all
// (2k+1)-windows, the induced joint law, and per-context center conditionals.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "mmd/core.hpp"

namespace mmd {

// Two-sided context: the k symbols left and k symbols right of a center.
struct ContextKey {
    std::vector<Symbol> left;
    std::vector<Symbol> right;

    bool operator==(const ContextKey&) const = default;
    auto operator<=>(const ContextKey&) const = default;
};

class EmpiricalStats {
public:
    // counts indexed by window id; window_total = sum of counts = n - 2k
    EmpiricalStats(int m, int k, std::vector<std::uint64_t> counts);

    int m() const { return m_; }
    int k() const { return k_; }
    std::uint64_t window_total() const { return total_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }

    // normalized joint law over (2k+1)-tuples
    JointDistribution joint() const;

    // context bookkeeping; context ids run over m^{2k} in (left, right) order
    std::size_t context_count_slots() const;
    std::uint64_t context_count(std::size_t ctx_id) const;
    std::size_t window_id(std::size_t ctx_id, Symbol center) const;
    ContextKey context_key(std::size_t ctx_id) const;
    std::size_t context_id(const ContextKey& ctx) const;

    // P(center | context), exact integer ratio; uniform if the context was
    // never observed
    ProbVector conditional_center(const ContextKey& ctx) const;
    ProbVector conditional_center_by_id(std::size_t ctx_id) const;

    // marginal probability of each observed two-sided context (zero-weight
    // contexts omitted); values sum to 1
    std::map<ContextKey, double> context_weights() const;

    // one row per window: window string, count, probability
    void write_csv(std::ostream& os) const;

private:
    int m_ = 0;
    int k_ = 0;
    std::uint64_t total_ = 0;
    std::vector<std::uint64_t> counts_;
};

// Counts windows centered at positions k+1..n-k (1-based); edge symbols enter
// only as context. Partitioning across threads changes nothing: counts merge
// by addition.
EmpiricalStats empirical_joint(const Sequence& z, int m, int k, int threads = 1);

double l_inf_distance(const JointDistribution& p, const JointDistribution& q);

}  // namespace mmd
