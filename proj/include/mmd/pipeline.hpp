#pragma once
// End-to-end block denoising: estimate window statistics, trim the channel
// set against them, solve the minimax program, apply the rule.

#include <cstdint>
#include <optional>

#include "mmd/core.hpp"
#include "mmd/feasibility.hpp"
#include "mmd/minimax.hpp"

namespace mmd {

enum class ApplyMode { sample, map, distribution };
enum class EdgePolicy { copy_observed };

struct PipelineConfig {
    int k = 0;
    int l = -1;               // < 0: use k
    double feas_eps = -1.0;   // < 0: default deviation-scale slack
    EdgePolicy edge_policy = EdgePolicy::copy_observed;
    ApplyMode apply_mode = ApplyMode::map;
    std::uint64_t seed = 0;
};

struct DenoiseResult {
    Sequence reconstruction;               // sample / map modes
    std::vector<ProbVector> distribution;  // distribution mode
    MinimaxSolution solution;
    std::optional<TrimmedSet> trim_report;
};

// floor(ln n / (16 ln m)), never negative. Takes n as a real so the rule can
// be queried beyond addressable block lengths.
int default_window_order(double n, int m);

struct Applied {
    Sequence seq;
    std::vector<ProbVector> dist;
};

// Sample mode draws one variate per position, keyed by (seed, position), so
// any parallel split reproduces the sequential output. Map mode takes the
// argmax with lowest-index ties. Edge positions copy the observed symbol.
Applied apply_denoiser(const WindowedDenoiser& f, const Sequence& z, ApplyMode mode,
                       std::uint64_t seed, int threads = 1);

// No trimming: every channel in delta is taken as feasible.
DenoiseResult denoise_feasible(const Sequence& z, const ChannelSet& delta,
                               const PipelineConfig& cfg, const LossMatrix& loss,
                               int threads = 1);

// Full pipeline: trim at order l against the observed law, then solve at
// order k over the survivors.
DenoiseResult denoise(const Sequence& z, const ChannelSet& delta, const PipelineConfig& cfg,
                      const LossMatrix& loss, int threads = 1);

}  // namespace mmd
