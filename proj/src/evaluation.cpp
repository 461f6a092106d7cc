#include "mmd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "mmd/parallel.hpp"
#include "mmd/empirical.hpp"
#include "mmd/rng.hpp"
#include "mmd/simplex.hpp"

namespace mmd {

// ---------------------------------------------------------------------------
// Sources and sampling
// ---------------------------------------------------------------------------

SourceModel SourceModel::make_iid(ProbVector p) {
    check_prob_vector(p);
    SourceModel s;
    s.kind = Kind::iid;
    s.iid_p = std::move(p);
    return s;
}

SourceModel SourceModel::make_markov(std::vector<std::vector<double>> transition,
                                     ProbVector initial) {
    int m = static_cast<int>(transition.size());
    if (m < 2) throw InvalidRangeError("markov source needs alphabet size >= 2");
    for (const auto& row : transition) {
        if (static_cast<int>(row.size()) != m)
            throw DimensionMismatchError("transition matrix not square");
        check_prob_vector(row);
    }
    check_prob_vector(initial);
    if (static_cast<int>(initial.size()) != m)
        throw DimensionMismatchError("initial distribution length mismatch");
    SourceModel s;
    s.kind = Kind::markov;
    s.transition = std::move(transition);
    s.initial = std::move(initial);
    return s;
}

int SourceModel::m() const {
    return kind == Kind::iid ? static_cast<int>(iid_p.size())
                             : static_cast<int>(transition.size());
}

Sequence sample_source(const SourceModel& source, std::uint64_t n, std::uint64_t seed) {
    Sequence x(n);
    if (source.kind == SourceModel::Kind::iid) {
        for (std::uint64_t t = 0; t < n; ++t)
            x[t] = rng::sample(source.iid_p, rng::uniform(seed, rng::kStreamSource, t));
    } else {
        Symbol prev = 0;
        for (std::uint64_t t = 0; t < n; ++t) {
            const ProbVector& row = (t == 0) ? source.initial : source.transition[prev];
            prev = rng::sample(row, rng::uniform(seed, rng::kStreamSource, t));
            x[t] = prev;
        }
    }
    return x;
}

Sequence corrupt(const Sequence& x, const Channel& ch, std::uint64_t seed) {
    int m = ch.size();
    Sequence z(x.size());
    std::vector<double> row(m);
    for (std::size_t t = 0; t < x.size(); ++t) {
        for (int j = 0; j < m; ++j) row[j] = ch(x[t], j);
        z[t] = rng::sample(row, rng::uniform(seed, rng::kStreamChannel, t));
    }
    return z;
}

ProbVector output_marginal(const SourceChannelPair& pair) {
    int m = pair.channel.size();
    if (pair.source.m() != m) throw DimensionMismatchError("pair alphabet sizes disagree");
    ProbVector p(m, 0.0);
    if (pair.source.kind == SourceModel::Kind::iid) {
        p = pair.source.iid_p;
    } else {
        p = pair.source.initial;
    }
    ProbVector q(m, 0.0);
    for (int z = 0; z < m; ++z)
        for (int x = 0; x < m; ++x) q[z] += p[x] * pair.channel(x, z);
    return q;
}

JointDistribution output_law(const SourceChannelPair& pair, int order) {
    int m = pair.channel.size();
    if (pair.source.m() != m) throw DimensionMismatchError("pair alphabet sizes disagree");
    if (pair.source.kind == SourceModel::Kind::iid) {
        ProbVector q(m, 0.0);
        for (int z = 0; z < m; ++z)
            for (int x = 0; x < m; ++x) q[z] += pair.source.iid_p[x] * pair.channel(x, z);
        return JointDistribution::iid_product(q, order);
    }
    // forward sum over hidden states, one run per output tuple
    std::size_t size = pow_size(m, order);
    std::vector<double> data(size);
    std::vector<Symbol> tup(order);
    std::vector<double> v(m), nv(m);
    for (std::size_t id = 0; id < size; ++id) {
        decode_tuple(id, m, tup);
        for (int x = 0; x < m; ++x) v[x] = pair.source.initial[x] * pair.channel(x, tup[0]);
        for (int i = 1; i < order; ++i) {
            for (int x = 0; x < m; ++x) {
                double acc = 0.0;
                for (int xp = 0; xp < m; ++xp) acc += v[xp] * pair.source.transition[xp][x];
                nv[x] = acc * pair.channel(x, tup[i]);
            }
            v.swap(nv);
        }
        double total = 0.0;
        for (double w : v) total += w;
        data[id] = total;
    }
    return JointDistribution(m, order, std::move(data));
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

double realized_loss(const Sequence& x, const Sequence& z, const WindowedDenoiser& f,
                     const LossMatrix& loss) {
    if (x.size() != z.size()) throw LengthMismatchError("clean and noisy lengths differ");
    int k = f.k();
    std::int64_t n = static_cast<std::int64_t>(x.size());
    if (n <= 2 * k) throw SequenceTooShortError("sequence length must exceed 2k");
    int m = f.m();
    std::vector<Symbol> win(2 * k + 1);
    double total = 0.0;
    for (std::int64_t c = k; c < n - k; ++c) {
        for (int j = 0; j < 2 * k + 1; ++j) win[j] = z[static_cast<std::size_t>(c - k + j)];
        const ProbVector& out = f.at_window(win);
        double term = 0.0;
        for (int a = 0; a < m; ++a) term += loss(x[static_cast<std::size_t>(c)], a) * out[a];
        total += term;
    }
    return total / static_cast<double>(n - 2 * k);
}

double realized_loss(const Sequence& x, const Sequence& xhat, int k, const LossMatrix& loss) {
    if (x.size() != xhat.size()) throw LengthMismatchError("sequence lengths differ");
    std::int64_t n = static_cast<std::int64_t>(x.size());
    if (n <= 2 * k) throw SequenceTooShortError("sequence length must exceed 2k");
    double total = 0.0;
    for (std::int64_t c = k; c < n - k; ++c)
        total += loss(x[static_cast<std::size_t>(c)], xhat[static_cast<std::size_t>(c)]);
    return total / static_cast<double>(n - 2 * k);
}

std::vector<ProbVector> smoothing_posteriors(const SourceChannelPair& pair, const Sequence& z) {
    int m = pair.channel.size();
    if (pair.source.m() != m) throw DimensionMismatchError("pair alphabet sizes disagree");
    std::size_t n = z.size();
    std::vector<ProbVector> post(n, ProbVector(m, 0.0));

    if (pair.source.kind == SourceModel::Kind::iid) {
        for (std::size_t t = 0; t < n; ++t) {
            double norm = 0.0;
            for (int x = 0; x < m; ++x) {
                post[t][x] = pair.source.iid_p[x] * pair.channel(x, z[t]);
                norm += post[t][x];
            }
            if (norm <= 0.0) throw ZeroLikelihoodError("observed symbol impossible under pair");
            for (int x = 0; x < m; ++x) post[t][x] /= norm;
        }
        return post;
    }

    // scaled forward-backward; per-step renormalization keeps everything in
    // range at n = 1e5 and beyond
    std::vector<ProbVector> alpha(n, ProbVector(m, 0.0));
    std::vector<double> scale(n, 0.0);
    for (int x = 0; x < m; ++x)
        alpha[0][x] = pair.source.initial[x] * pair.channel(x, z[0]);
    for (std::size_t t = 0;; ++t) {
        for (int x = 0; x < m; ++x) scale[t] += alpha[t][x];
        if (scale[t] <= 0.0) throw ZeroLikelihoodError("observed sequence impossible under pair");
        for (int x = 0; x < m; ++x) alpha[t][x] /= scale[t];
        if (t + 1 == n) break;
        for (int x = 0; x < m; ++x) {
            double acc = 0.0;
            for (int xp = 0; xp < m; ++xp) acc += alpha[t][xp] * pair.source.transition[xp][x];
            alpha[t + 1][x] = acc * pair.channel(x, z[t + 1]);
        }
    }
    ProbVector beta(m, 1.0), nbeta(m);
    for (std::size_t t = n; t-- > 0;) {
        double norm = 0.0;
        for (int x = 0; x < m; ++x) {
            post[t][x] = alpha[t][x] * beta[x];
            norm += post[t][x];
        }
        for (int x = 0; x < m; ++x) post[t][x] /= norm;
        if (t == 0) break;
        for (int x = 0; x < m; ++x) {
            double acc = 0.0;
            for (int xn = 0; xn < m; ++xn)
                acc += pair.source.transition[x][xn] * pair.channel(xn, z[t]) * beta[xn];
            nbeta[x] = acc / scale[t];
        }
        beta = nbeta;
    }
    return post;
}

namespace {

// loss_given_x[w * m + x] = sum_a Lambda(x, a) f(w)[a]
std::vector<double> denoiser_loss_table(const WindowedDenoiser& f, const LossMatrix& loss) {
    int m = f.m();
    std::vector<double> table(f.window_count() * static_cast<std::size_t>(m));
    for (std::size_t w = 0; w < f.window_count(); ++w) {
        for (int x = 0; x < m; ++x) {
            double acc = 0.0;
            for (int a = 0; a < m; ++a) acc += loss(x, a) * f.at(w)[a];
            table[w * m + static_cast<std::size_t>(x)] = acc;
        }
    }
    return table;
}

}  // namespace

double conditional_expected_loss(const SourceChannelPair& pair, const Sequence& z,
                                 const WindowedDenoiser& f, const LossMatrix& loss) {
    int k = f.k();
    int m = f.m();
    std::int64_t n = static_cast<std::int64_t>(z.size());
    if (n <= 2 * k) throw SequenceTooShortError("sequence length must exceed 2k");
    if (pair.channel.size() != m || loss.size() != m)
        throw DimensionMismatchError("alphabet sizes disagree");
    std::vector<ProbVector> post = smoothing_posteriors(pair, z);
    std::vector<double> table = denoiser_loss_table(f, loss);
    std::vector<Symbol> win(2 * k + 1);
    double total = 0.0;
    for (std::int64_t c = k; c < n - k; ++c) {
        for (int j = 0; j < 2 * k + 1; ++j) win[j] = z[static_cast<std::size_t>(c - k + j)];
        std::size_t w = encode_tuple(win, m);
        double term = 0.0;
        for (int x = 0; x < m; ++x)
            term += post[static_cast<std::size_t>(c)][x] * table[w * m + static_cast<std::size_t>(x)];
        total += term;
    }
    return total / static_cast<double>(n - 2 * k);
}

double conditional_expected_loss(const SourceChannelPair& pair, const Sequence& z,
                                 const Sequence& xhat, int k, const LossMatrix& loss) {
    if (z.size() != xhat.size()) throw LengthMismatchError("sequence lengths differ");
    std::int64_t n = static_cast<std::int64_t>(z.size());
    if (n <= 2 * k) throw SequenceTooShortError("sequence length must exceed 2k");
    int m = pair.channel.size();
    std::vector<ProbVector> post = smoothing_posteriors(pair, z);
    double total = 0.0;
    for (std::int64_t c = k; c < n - k; ++c) {
        double term = 0.0;
        for (int x = 0; x < m; ++x)
            term += post[static_cast<std::size_t>(c)][x] * loss(x, xhat[static_cast<std::size_t>(c)]);
        total += term;
    }
    return total / static_cast<double>(n - 2 * k);
}

WorstCaseLoss worst_case_loss(const std::vector<SourceChannelPair>& pairs, const Sequence& z,
                              const WindowedDenoiser& f, const LossMatrix& loss) {
    if (pairs.empty()) throw EmptySetError("pair list is empty");
    WorstCaseLoss out;
    out.value = -1.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        double v = conditional_expected_loss(pairs[i], z, f, loss);
        out.per_pair.push_back(v);
        if (v > out.value) {
            out.value = v;
            out.argmax_index = static_cast<int>(i);
        }
    }
    return out;
}

WorstCaseLoss worst_case_loss(const std::vector<SourceChannelPair>& pairs, const Sequence& z,
                              const Sequence& xhat, int k, const LossMatrix& loss) {
    if (pairs.empty()) throw EmptySetError("pair list is empty");
    WorstCaseLoss out;
    out.value = -1.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        double v = conditional_expected_loss(pairs[i], z, xhat, k, loss);
        out.per_pair.push_back(v);
        if (v > out.value) {
            out.value = v;
            out.argmax_index = static_cast<int>(i);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Benchmark
// ---------------------------------------------------------------------------

BenchmarkResult benchmark_mu(const std::vector<SourceChannelPair>& pairs, const Sequence& z,
                             int k, const LossMatrix& loss) {
    if (pairs.empty()) throw EmptySetError("pair list is empty");
    std::int64_t n = static_cast<std::int64_t>(z.size());
    if (n <= 2 * k) throw SequenceTooShortError("sequence length must exceed 2k");
    int m = pairs.front().channel.size();

    // Per-pair objective coefficients: the conditional expected loss is linear
    // in the rule, with weight on window w and reconstruction a equal to the
    // posterior-weighted loss accumulated over positions showing w.
    std::size_t window_slots = pow_size(m, 2 * k + 1);
    std::vector<std::vector<double>> coef(pairs.size(),
                                          std::vector<double>(window_slots * m, 0.0));
    std::vector<char> seen(window_slots, 0);
    std::vector<Symbol> win(2 * k + 1);
    double norm = static_cast<double>(n - 2 * k);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        std::vector<ProbVector> post = smoothing_posteriors(pairs[p], z);
        for (std::int64_t c = k; c < n - k; ++c) {
            for (int j = 0; j < 2 * k + 1; ++j) win[j] = z[static_cast<std::size_t>(c - k + j)];
            std::size_t w = encode_tuple(win, m);
            seen[w] = 1;
            for (int a = 0; a < m; ++a) {
                double acc = 0.0;
                for (int x = 0; x < m; ++x)
                    acc += post[static_cast<std::size_t>(c)][x] * loss(x, a);
                coef[p][w * m + static_cast<std::size_t>(a)] += acc / norm;
            }
        }
    }

    std::vector<std::size_t> occurring;
    for (std::size_t w = 0; w < window_slots; ++w)
        if (seen[w]) occurring.push_back(w);

    std::size_t num_vars = occurring.size() * static_cast<std::size_t>(m) + 1;
    std::size_t t_var = num_vars - 1;
    LpProblem lp;
    lp.objective.assign(num_vars, 0.0);
    lp.objective[t_var] = 1.0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        LpRow row;
        row.relation = LpRelation::le;
        row.rhs = 0.0;
        row.coeffs.assign(num_vars, 0.0);
        for (std::size_t wi = 0; wi < occurring.size(); ++wi)
            for (int a = 0; a < m; ++a)
                row.coeffs[wi * m + static_cast<std::size_t>(a)] =
                    coef[p][occurring[wi] * m + static_cast<std::size_t>(a)];
        row.coeffs[t_var] = -1.0;
        lp.rows.push_back(std::move(row));
    }
    for (std::size_t wi = 0; wi < occurring.size(); ++wi) {
        LpRow row;
        row.relation = LpRelation::eq;
        row.rhs = 1.0;
        row.coeffs.assign(num_vars, 0.0);
        for (int a = 0; a < m; ++a) row.coeffs[wi * m + static_cast<std::size_t>(a)] = 1.0;
        lp.rows.push_back(std::move(row));
    }

    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::optimal)
        throw SolverFailureError("benchmark program not solved to optimality");

    std::vector<ProbVector> table(window_slots, ProbVector(m, 1.0 / m));
    for (std::size_t wi = 0; wi < occurring.size(); ++wi) {
        ProbVector row(m);
        double sum = 0.0;
        for (int a = 0; a < m; ++a) {
            row[a] = std::max(res.x[wi * m + static_cast<std::size_t>(a)], 0.0);
            sum += row[a];
        }
        for (double& v : row) v /= sum;
        table[occurring[wi]] = std::move(row);
    }
    BenchmarkResult out{0.0, WindowedDenoiser(m, k, std::move(table)), res.iterations};
    out.value = worst_case_loss(pairs, z, out.f_star, loss).value;
    return out;
}

// ---------------------------------------------------------------------------
// Deviation bounds
// ---------------------------------------------------------------------------

namespace {

double log_lemma1(std::uint64_t n, int k, double delta, double lmax, double inv_norm, int m) {
    if (n <= 2 * static_cast<std::uint64_t>(k))
        throw SequenceTooShortError("bound needs n > 2k");
    if (!(delta > 0.0)) throw InvalidRangeError("bound needs delta > 0");
    double windows = static_cast<double>(n - 2 * static_cast<std::uint64_t>(k));
    double states = (2.0 * k + 1.0) * std::pow(static_cast<double>(m), 4.0 * k + 4.0);
    double exponent = 2.0 * delta * delta * windows / (states * lmax * lmax * inv_norm * inv_norm);
    return std::log(2.0 * (2 * k + 1)) + (2.0 * k + 1.0) * std::log(static_cast<double>(m)) -
           exponent;
}

}  // namespace

double lemma1_bound(std::uint64_t n, int k, double delta, const LossMatrix& loss,
                    double inv_norm) {
    double lg = log_lemma1(n, k, delta, loss.max_loss(), inv_norm, loss.size());
    return std::exp(std::min(0.0, lg));
}

double lemma2_bound(std::uint64_t n, int k, double delta, const LossMatrix& loss,
                    double inv_norm) {
    int m = loss.size();
    double prefactor = std::pow(static_cast<double>(m), 2.0 * k + 2.0) * inv_norm *
                       loss.max_loss() / (delta / 2.0);
    double lg = std::log(prefactor) +
                std::min(0.0, log_lemma1(n, k, delta / 2.0, loss.max_loss(), inv_norm, m));
    return std::exp(std::min(0.0, lg));
}

double lemma4_bound(std::uint64_t n, int k, double delta, const LossMatrix& loss, double inv_norm,
                    int set_size) {
    if (set_size < 1) throw InvalidRangeError("set size must be >= 1");
    int m = loss.size();
    double states = std::pow(static_cast<double>(m), 2.0 * k + 2.0);
    double base = 2.0 * loss.max_loss() * (1.0 + states * inv_norm) / delta;
    double lg2 = std::log(lemma2_bound(n, k, delta / 2.0, loss, inv_norm));
    double lg = std::log(static_cast<double>(set_size)) + states * std::log(base) + lg2;
    return std::exp(std::min(0.0, lg));
}

// ---------------------------------------------------------------------------
// Monte Carlo validation
// ---------------------------------------------------------------------------

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

ConcentrationReport concentration_experiment(const SourceChannelPair& pair,
                                             const WindowedDenoiser& f, int k, std::uint64_t n,
                                             int trials, double delta, std::uint64_t seed,
                                             const LossMatrix& loss, int threads) {
    if (trials < 1) throw InvalidRangeError("need at least one trial");
    if (f.k() != k) throw DimensionMismatchError("denoiser order does not match k");
    int m = pair.channel.size();
    bool iid = pair.source.kind == SourceModel::Kind::iid;

    ConcentrationReport rep;
    rep.n = n;
    rep.k = k;
    rep.trials = trials;
    rep.delta = delta;
    rep.gap_realized.assign(trials, 0.0);
    if (iid) rep.gap_conditional.assign(trials, 0.0);

    parallel_chunks(trials, threads, [&](std::int64_t lo, std::int64_t hi, int) {
        for (std::int64_t i = lo; i < hi; ++i) {
            std::uint64_t s = rng::derive_seed(seed, static_cast<std::uint64_t>(i));
            Sequence x = sample_source(pair.source, n, s);
            Sequence z = corrupt(x, pair.channel, s);
            EmpiricalStats stats = empirical_joint(z, m, k);
            double g = g_k_expected_loss(stats, pair.channel, f, loss);
            rep.gap_realized[i] = std::abs(g - realized_loss(x, z, f, loss));
            if (iid)
                rep.gap_conditional[i] = std::abs(g - conditional_expected_loss(pair, z, f, loss));
        }
    });

    rep.median_realized = median_of(rep.gap_realized);
    rep.median_conditional = median_of(rep.gap_conditional);
    auto exceed = [&](const std::vector<double>& g) {
        if (g.empty()) return 0.0;
        int c = 0;
        for (double v : g)
            if (v > delta) ++c;
        return static_cast<double>(c) / static_cast<double>(g.size());
    };
    rep.exceed_realized = exceed(rep.gap_realized);
    rep.exceed_conditional = exceed(rep.gap_conditional);
    rep.bound_lemma1 = lemma1_bound(n, k, delta, loss, pair.channel.inv_norm());
    rep.bound_lemma2 = lemma2_bound(n, k, delta, loss, pair.channel.inv_norm());
    return rep;
}

void ConcentrationReport::write_csv(std::ostream& os) const {
    os << "trial,gap_realized,gap_conditional\n";
    char buf[64];
    for (int i = 0; i < trials; ++i) {
        os << i;
        std::snprintf(buf, sizeof(buf), ",%.12g", gap_realized[static_cast<std::size_t>(i)]);
        os << buf;
        if (!gap_conditional.empty()) {
            std::snprintf(buf, sizeof(buf), ",%.12g",
                          gap_conditional[static_cast<std::size_t>(i)]);
            os << buf;
        } else {
            os << ",";
        }
        os << '\n';
    }
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["realized_loss"] = realized;
    j["per_pair"] = per_pair;
    j["worst_case"] = worst_case;
    j["argmax_pair"] = argmax_index;
    j["benchmark_mu"] = mu;
    j["regret"] = regret;
    j["objective"] = objective;
    return j.dump(2);
}

}  // namespace mmd
