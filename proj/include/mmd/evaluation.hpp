#pragma once
// Loss measurement against source-channel pairs: realized windowed loss,
// conditional expected loss given the noisy realization, the worst case over
// an explicit feasible pair list, the best attainable order-k benchmark, and
// the deviation-bound calculators with their Monte Carlo validation harness.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmd/core.hpp"
#include "mmd/minimax.hpp"

namespace mmd {

struct SourceModel {
    enum class Kind { iid, markov };

    Kind kind = Kind::iid;
    ProbVector iid_p;
    std::vector<std::vector<double>> transition;
    ProbVector initial;

    static SourceModel make_iid(ProbVector p);
    static SourceModel make_markov(std::vector<std::vector<double>> transition, ProbVector initial);

    int m() const;
};

struct SourceChannelPair {
    SourceModel source;
    Channel channel;
};

// Deterministic sampling; every draw is keyed by (seed, stream, position).
Sequence sample_source(const SourceModel& source, std::uint64_t n, std::uint64_t seed);
Sequence corrupt(const Sequence& x, const Channel& ch, std::uint64_t seed);

// Law of a (2k+1)-window of the pair's output process (consecutive positions;
// pass a stationary initial distribution for a stationary law).
JointDistribution output_law(const SourceChannelPair& pair, int order);
ProbVector output_marginal(const SourceChannelPair& pair);

// (1/(n-2k)) sum over centers of sum_a Lambda(x_t, a) f(window_t)[a]
double realized_loss(const Sequence& x, const Sequence& z, const WindowedDenoiser& f,
                     const LossMatrix& loss);
// same, for a fixed reconstruction sequence
double realized_loss(const Sequence& x, const Sequence& xhat, int k, const LossMatrix& loss);

// P(X_t = x | Z = z) for every position; per-symbol Bayes for iid sources,
// scaled forward-backward smoothing for Markov sources.
std::vector<ProbVector> smoothing_posteriors(const SourceChannelPair& pair, const Sequence& z);

double conditional_expected_loss(const SourceChannelPair& pair, const Sequence& z,
                                 const WindowedDenoiser& f, const LossMatrix& loss);
double conditional_expected_loss(const SourceChannelPair& pair, const Sequence& z,
                                 const Sequence& xhat, int k, const LossMatrix& loss);

struct WorstCaseLoss {
    double value = 0.0;
    int argmax_index = 0;
    std::vector<double> per_pair;
};

WorstCaseLoss worst_case_loss(const std::vector<SourceChannelPair>& pairs, const Sequence& z,
                              const WindowedDenoiser& f, const LossMatrix& loss);
WorstCaseLoss worst_case_loss(const std::vector<SourceChannelPair>& pairs, const Sequence& z,
                              const Sequence& xhat, int k, const LossMatrix& loss);

struct BenchmarkResult {
    double value = 0.0;
    WindowedDenoiser f_star;
    std::int64_t iterations = 0;
};

// min over order-k rules of the worst conditional expected loss over the
// pairs, solved as a linear program; windows absent from z come back uniform.
BenchmarkResult benchmark_mu(const std::vector<SourceChannelPair>& pairs, const Sequence& z,
                             int k, const LossMatrix& loss);

// Deviation bounds for |G_k - L_f| and |G_k - E[L_f | Z]|, capped at 1.
double lemma1_bound(std::uint64_t n, int k, double delta, const LossMatrix& loss,
                    double inv_norm);
double lemma2_bound(std::uint64_t n, int k, double delta, const LossMatrix& loss,
                    double inv_norm);
double lemma4_bound(std::uint64_t n, int k, double delta, const LossMatrix& loss, double inv_norm,
                    int set_size);

struct ConcentrationReport {
    std::uint64_t n = 0;
    int k = 0;
    int trials = 0;
    double delta = 0.0;
    std::vector<double> gap_realized;     // |G_k - L_f| per trial
    std::vector<double> gap_conditional;  // |G_k - E[L_f|Z]| per trial (iid pairs only)
    double median_realized = 0.0;
    double median_conditional = 0.0;
    double exceed_realized = 0.0;     // fraction of trials with gap > delta
    double exceed_conditional = 0.0;
    double bound_lemma1 = 0.0;
    double bound_lemma2 = 0.0;

    void write_csv(std::ostream& os) const;  // one row per trial
};

ConcentrationReport concentration_experiment(const SourceChannelPair& pair,
                                             const WindowedDenoiser& f, int k, std::uint64_t n,
                                             int trials, double delta, std::uint64_t seed,
                                             const LossMatrix& loss, int threads = 1);

struct EvalReport {
    std::string name;
    double realized = 0.0;
    std::vector<double> per_pair;
    double worst_case = 0.0;
    int argmax_index = 0;
    double mu = 0.0;
    double regret = 0.0;  // worst_case - mu, >= -1e-8 by construction
    double objective = 0.0;  // worst-case objective under the estimated law

    std::string to_json() const;
};

}  // namespace mmd
