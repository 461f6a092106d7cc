#include "mmd/pipeline.hpp"

#include <cmath>

#include "mmd/empirical.hpp"
#include "mmd/parallel.hpp"
#include "mmd/rng.hpp"

namespace mmd {

int default_window_order(double n, int m) {
    if (!(n >= 2.0)) throw InvalidRangeError("block length must be >= 2");
    if (m < 2) throw InvalidRangeError("alphabet size must be >= 2");
    // the 1e-9 absorbs ulp noise when the ratio is an exact integer
    double v = std::log(n) / (16.0 * std::log(static_cast<double>(m)));
    int k = static_cast<int>(std::floor(v + 1e-9));
    return std::max(k, 0);
}

Applied apply_denoiser(const WindowedDenoiser& f, const Sequence& z, ApplyMode mode,
                       std::uint64_t seed, int threads) {
    int k = f.k();
    int m = f.m();
    std::int64_t n = static_cast<std::int64_t>(z.size());
    if (n <= 2 * k) throw SequenceTooShortError("sequence length must exceed 2k");

    Applied out;
    if (mode == ApplyMode::distribution) {
        out.dist.assign(z.size(), ProbVector(m, 0.0));
    } else {
        out.seq.assign(z.size(), 0);
    }

    parallel_chunks(n, threads, [&](std::int64_t lo, std::int64_t hi, int) {
        std::vector<Symbol> win(2 * k + 1);
        for (std::int64_t i = lo; i < hi; ++i) {
            bool edge = i < k || i >= n - k;
            if (edge) {
                if (mode == ApplyMode::distribution)
                    out.dist[static_cast<std::size_t>(i)][z[static_cast<std::size_t>(i)]] = 1.0;
                else
                    out.seq[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)];
                continue;
            }
            for (int j = 0; j < 2 * k + 1; ++j) win[j] = z[static_cast<std::size_t>(i - k + j)];
            const ProbVector& p = f.at_window(win);
            switch (mode) {
                case ApplyMode::distribution:
                    out.dist[static_cast<std::size_t>(i)] = p;
                    break;
                case ApplyMode::map: {
                    int best = 0;
                    for (int a = 1; a < m; ++a)
                        if (p[a] > p[best]) best = a;
                    out.seq[static_cast<std::size_t>(i)] = best;
                    break;
                }
                case ApplyMode::sample:
                    out.seq[static_cast<std::size_t>(i)] = rng::sample(
                        p, rng::uniform(seed, rng::kStreamApply, static_cast<std::uint64_t>(i)));
                    break;
            }
        }
    });
    return out;
}

DenoiseResult denoise_feasible(const Sequence& z, const ChannelSet& delta,
                               const PipelineConfig& cfg, const LossMatrix& loss, int threads) {
    int m = delta.m();
    EmpiricalStats stats = empirical_joint(z, m, cfg.k, threads);
    MinimaxSolution sol = solve_minimax(stats, delta, cfg.k, loss);
    Applied applied = apply_denoiser(sol.denoiser, z, cfg.apply_mode, cfg.seed, threads);
    return DenoiseResult{std::move(applied.seq), std::move(applied.dist), std::move(sol),
                         std::nullopt};
}

DenoiseResult denoise(const Sequence& z, const ChannelSet& delta, const PipelineConfig& cfg,
                      const LossMatrix& loss, int threads) {
    int m = delta.m();
    int l = cfg.l < 0 ? cfg.k : cfg.l;
    std::int64_t n = static_cast<std::int64_t>(z.size());
    if (n <= 2 * std::max(cfg.k, l))
        throw SequenceTooShortError("sequence length must exceed 2 max(k, l)");
    double eps = cfg.feas_eps < 0.0 ? default_feas_eps(m, l, z.size()) : cfg.feas_eps;

    EmpiricalStats stats_l = empirical_joint(z, m, l, threads);
    TrimmedSet trimmed = trim(delta, stats_l, eps, threads);

    EmpiricalStats stats_k = (l == cfg.k) ? stats_l : empirical_joint(z, m, cfg.k, threads);
    MinimaxSolution sol = solve_minimax(stats_k, trimmed.survivors, cfg.k, loss);
    Applied applied = apply_denoiser(sol.denoiser, z, cfg.apply_mode, cfg.seed, threads);
    return DenoiseResult{std::move(applied.seq), std::move(applied.dist), std::move(sol),
                         std::move(trimmed)};
}

}  // namespace mmd
