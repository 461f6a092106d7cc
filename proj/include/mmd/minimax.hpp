#pragma once
// Worst-case expected loss of a sliding-window rule over a channel set, and
// the randomized rule minimizing it, solved as a linear program over the
// product of per-window simplices. Also the known-channel per-context Bayes
// baseline.

#include <string>
#include <vector>

#include "mmd/core.hpp"
#include "mmd/empirical.hpp"

namespace mmd {

// Restriction of a denoiser to one two-sided context: observed center symbol
// -> distribution over reconstructions.
using DenoiserSlice = std::vector<ProbVector>;

// Per-context weights and center conditionals of an output law of order 2k+1.
// The common currency between empirical statistics, exact injected laws, and
// the objective evaluations below.
struct ContextModel {
    int m = 0;
    int k = 0;
    std::vector<double> weight;        // m^{2k}, sums to 1
    std::vector<ProbVector> q_center;  // m^{2k}; uniform where weight is 0

    static ContextModel from(const EmpiricalStats& stats);
    static ContextModel from(const JointDistribution& law);  // order must be odd
};

// Pi^{-T} q with negative entries clamped to zero and mass renormalized.
// Exact when q is a true output law of the channel.
ProbVector clamped_posterior(const Channel& ch, const ProbVector& q_center);

// Expected loss of estimating the center from its window, for one context:
// sum_{x,z} [Pi^{-T} q]_x Pi(x,z) sum_a Lambda(x,a) slice[z][a].
double f_k_context_loss(const ProbVector& q_center, const Channel& ch, const DenoiserSlice& slice,
                        const LossMatrix& loss);

// Context-weighted sum of the above over all two-sided contexts.
double g_k_expected_loss(const ContextModel& ctx, const Channel& ch, const WindowedDenoiser& f,
                         const LossMatrix& loss);
double g_k_expected_loss(const EmpiricalStats& stats, const Channel& ch,
                         const WindowedDenoiser& f, const LossMatrix& loss);
double g_k_expected_loss(const JointDistribution& law, const Channel& ch,
                         const WindowedDenoiser& f, const LossMatrix& loss);

struct WorstCase {
    double value = 0.0;
    int argmax_channel = 0;  // lowest index on ties
};

WorstCase j_k_worst_case(const ContextModel& ctx, const ChannelSet& delta,
                         const WindowedDenoiser& f, const LossMatrix& loss);
WorstCase j_k_worst_case(const EmpiricalStats& stats, const ChannelSet& delta,
                         const WindowedDenoiser& f, const LossMatrix& loss);
WorstCase j_k_worst_case(const JointDistribution& law, const ChannelSet& delta,
                         const WindowedDenoiser& f, const LossMatrix& loss);

struct MinimaxSolution {
    WindowedDenoiser denoiser;
    double value = 0.0;                // worst-case expected loss of `denoiser`
    std::vector<int> active_channels;  // channels attaining the max within 1e-6
    std::int64_t iterations = 0;
    std::string status;

    std::string to_json() const;  // {"k": ..., "table": {window: [probs]}} plus value
};

// min over order-k rules of the worst case over the channel set. Variables
// are the per-window reconstruction probabilities plus the worst-case bound;
// windows in zero-weight contexts are returned uniform.
MinimaxSolution solve_minimax(const ContextModel& ctx, const ChannelSet& delta, int k,
                              const LossMatrix& loss);
MinimaxSolution solve_minimax(const EmpiricalStats& stats, const ChannelSet& delta, int k,
                              const LossMatrix& loss);
MinimaxSolution solve_minimax(const JointDistribution& law, const ChannelSet& delta, int k,
                              const LossMatrix& loss);

// Known-channel baseline: per window, the deterministic reconstruction
// minimizing the channel-inverted posterior expected loss, lowest symbol on
// ties.
WindowedDenoiser dude_rule(const ContextModel& ctx, const Channel& ch, int k,
                           const LossMatrix& loss);
WindowedDenoiser dude_rule(const EmpiricalStats& stats, const Channel& ch, int k,
                           const LossMatrix& loss);
WindowedDenoiser dude_rule(const JointDistribution& law, const Channel& ch, int k,
                           const LossMatrix& loss);

std::string denoiser_to_json(const WindowedDenoiser& f);
WindowedDenoiser denoiser_from_json(const std::string& text);

}  // namespace mmd
