#pragma once
// Brute-force references used by the test suites. Everything here is
// deliberately naive and shares nothing with the production paths beyond the
// core value types.

#include <functional>
#include <vector>

#include "mmd/core.hpp"
#include "mmd/evaluation.hpp"

namespace mmd::oracle {

struct GridResult {
    double d0 = 0.0;  // probability of reconstructing 1 on observed 0
    double d1 = 0.0;  // probability of reconstructing 1 on observed 1
    double value = 0.0;
    double step = 0.0;
};

// Exhaustive sweep of the order-0 binary rule space at the given resolution;
// evaluates the worst case over the channel set by direct 2x2 arithmetic.
GridResult grid_minimax_binary_k0(const ProbVector& q, const ChannelSet& delta,
                                  const LossMatrix& loss, double step);

struct ExhaustiveResult {
    double expected = 0.0;  // E[L_f] under the pair's joint law
    std::function<double(const Sequence&)> conditional;  // z -> E[L_f | z]
};

// Full enumeration of (x^n, z^n); the pair state space m^{2n} must stay
// within 2^24.
ExhaustiveResult exhaustive_expected_loss(const SourceChannelPair& pair,
                                          const WindowedDenoiser& f, int n,
                                          const LossMatrix& loss);

// (q - delta) / (1 - 2 delta): the input parameter of a Bernoulli law whose
// BSC(delta) output has parameter q.
double induced_bsc_input(double q, double delta);

// Unique stationary vector of an irreducible row-stochastic matrix, by damped
// power iteration to a 1e-13 residual.
ProbVector markov_stationary(const std::vector<std::vector<double>>& transition);

}  // namespace mmd::oracle
