#pragma once
// Which channels in the uncertainty set could have produced the observed
// output law? A channel is feasible at order t when inverting it against the
// t-order output tensor leaves no entry below -eps.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mmd/core.hpp"
#include "mmd/empirical.hpp"

namespace mmd {

struct FeasibilityVerdict {
    int channel_index = 0;
    double min_entry = 0.0;  // most negative entry of the induced input tensor
    bool feasible = false;
};

struct TrimmedSet {
    ChannelSet survivors;
    std::vector<FeasibilityVerdict> verdicts;  // one per input channel
    double eps = 0.0;
    int order = 0;     // trimming order l
    bool fallback = false;  // no channel passed; kept the best-scoring one

    // JSON report, one object per channel: {label, min_entry, feasible, eps}
    std::string report_json(const ChannelSet& input) const;
};

// Candidate input law (Pi^{-T} applied along every axis of q). Entries may be
// negative; they always sum to 1. Contraction is axis-wise, the m^t x m^t
// Kronecker matrix is never formed.
std::vector<double> induced_input(const Channel& ch, const JointDistribution& q);

FeasibilityVerdict is_feasible(const Channel& ch, const JointDistribution& q, double eps,
                               int index = 0);

// Keeps the channels feasible against the observed law; if none pass, keeps
// the single channel with the largest min-entry and sets `fallback`.
TrimmedSet trim(const ChannelSet& delta, const EmpiricalStats& stats, double eps,
                int threads = 1);
TrimmedSet trim(const ChannelSet& delta, const JointDistribution& law, double eps,
                int threads = 1);

// Default feasibility slack: max(1e-9, sqrt(ln(m^{2l+1}) / (n - 2l))) — the
// scale of empirical deviation of the order-(2l+1) tensor.
double default_feas_eps(int m, int l, std::uint64_t n);

// Continuity modulus of the worst-case objective in the set metric rho:
// phi_k(eps) = m^{2k+1} * Lambda_max * max ||Pi^{-1}|| * eps.
double phi_k(int k, const ChannelSet& delta, const LossMatrix& loss, double eps);

// Modulus bounding rho of trimmed sets by the sup-distance of output laws:
// eps -> eps * (max ||Pi^{-1}||)^(l * m^l).
std::function<double(double)> b_l_modulus(int l, const ChannelSet& delta);

// BSC grid with spacing <= eta covering [lo, hi]; every crossover in the
// interval is within eta of a grid point.
ChannelSet bsc_cover(double lo, double hi, double eta);

}  // namespace mmd
