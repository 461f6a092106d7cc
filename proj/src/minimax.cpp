#include "mmd/minimax.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mmd/simplex.hpp"

namespace mmd {

ContextModel ContextModel::from(const EmpiricalStats& stats) {
    ContextModel ctx;
    ctx.m = stats.m();
    ctx.k = stats.k();
    std::size_t slots = stats.context_count_slots();
    ctx.weight.resize(slots);
    ctx.q_center.resize(slots);
    double total = static_cast<double>(stats.window_total());
    for (std::size_t c = 0; c < slots; ++c) {
        ctx.weight[c] = static_cast<double>(stats.context_count(c)) / total;
        ctx.q_center[c] = stats.conditional_center_by_id(c);
    }
    return ctx;
}

ContextModel ContextModel::from(const JointDistribution& law) {
    if (law.order() % 2 == 0) throw DimensionMismatchError("window order must be odd");
    ContextModel ctx;
    ctx.m = law.base();
    ctx.k = (law.order() - 1) / 2;
    std::size_t slots = pow_size(ctx.m, 2 * ctx.k);
    ctx.weight.resize(slots);
    ctx.q_center.resize(slots);
    for (std::size_t c = 0; c < slots; ++c) {
        double w = 0.0;
        ProbVector q(ctx.m, 0.0);
        for (Symbol s = 0; s < ctx.m; ++s) {
            double v = law[window_id_from_context(ctx.m, ctx.k, c, s)];
            q[s] = v;
            w += v;
        }
        ctx.weight[c] = w;
        if (w > 0.0) {
            for (double& v : q) v /= w;
            ctx.q_center[c] = std::move(q);
        } else {
            ctx.q_center[c] = ProbVector(ctx.m, 1.0 / ctx.m);
        }
    }
    return ctx;
}

ProbVector clamped_posterior(const Channel& ch, const ProbVector& q_center) {
    std::vector<double> raw = ch.apply_inverse_transpose(q_center);
    double sum = 0.0;
    for (double& v : raw) {
        if (v < 0.0) v = 0.0;
        sum += v;
    }
    if (sum <= 0.0) return ProbVector(ch.size(), 1.0 / ch.size());
    for (double& v : raw) v /= sum;
    return raw;
}

double f_k_context_loss(const ProbVector& q_center, const Channel& ch, const DenoiserSlice& slice,
                        const LossMatrix& loss) {
    int m = ch.size();
    if (static_cast<int>(q_center.size()) != m || loss.size() != m ||
        static_cast<int>(slice.size()) != m)
        throw DimensionMismatchError("context loss arguments disagree on alphabet size");
    ProbVector p = clamped_posterior(ch, q_center);
    double total = 0.0;
    for (int x = 0; x < m; ++x) {
        if (p[x] == 0.0) continue;
        double inner = 0.0;
        for (int z = 0; z < m; ++z) {
            double pz = ch(x, z);
            if (pz == 0.0) continue;
            double recon = 0.0;
            for (int a = 0; a < m; ++a) recon += loss(x, a) * slice[z][a];
            inner += pz * recon;
        }
        total += p[x] * inner;
    }
    return total;
}

namespace {

DenoiserSlice slice_of(const WindowedDenoiser& f, std::size_t ctx_id) {
    DenoiserSlice s(f.m());
    for (Symbol z = 0; z < f.m(); ++z)
        s[z] = f.at(window_id_from_context(f.m(), f.k(), ctx_id, z));
    return s;
}

void check_shapes(const ContextModel& ctx, const Channel& ch, const WindowedDenoiser& f,
                  const LossMatrix& loss) {
    if (ctx.m != ch.size() || ctx.m != f.m() || ctx.m != loss.size())
        throw DimensionMismatchError("alphabet sizes disagree");
    if (ctx.k != f.k()) throw DimensionMismatchError("window orders disagree");
}

}  // namespace

double g_k_expected_loss(const ContextModel& ctx, const Channel& ch, const WindowedDenoiser& f,
                         const LossMatrix& loss) {
    check_shapes(ctx, ch, f, loss);
    double total = 0.0;
    for (std::size_t c = 0; c < ctx.weight.size(); ++c) {
        if (ctx.weight[c] == 0.0) continue;
        total += ctx.weight[c] * f_k_context_loss(ctx.q_center[c], ch, slice_of(f, c), loss);
    }
    return total;
}

double g_k_expected_loss(const EmpiricalStats& stats, const Channel& ch,
                         const WindowedDenoiser& f, const LossMatrix& loss) {
    return g_k_expected_loss(ContextModel::from(stats), ch, f, loss);
}

double g_k_expected_loss(const JointDistribution& law, const Channel& ch,
                         const WindowedDenoiser& f, const LossMatrix& loss) {
    return g_k_expected_loss(ContextModel::from(law), ch, f, loss);
}

WorstCase j_k_worst_case(const ContextModel& ctx, const ChannelSet& delta,
                         const WindowedDenoiser& f, const LossMatrix& loss) {
    WorstCase out;
    out.value = -1.0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        double g = g_k_expected_loss(ctx, delta.channel(i), f, loss);
        if (g > out.value) {
            out.value = g;
            out.argmax_channel = static_cast<int>(i);
        }
    }
    return out;
}

WorstCase j_k_worst_case(const EmpiricalStats& stats, const ChannelSet& delta,
                         const WindowedDenoiser& f, const LossMatrix& loss) {
    return j_k_worst_case(ContextModel::from(stats), delta, f, loss);
}

WorstCase j_k_worst_case(const JointDistribution& law, const ChannelSet& delta,
                         const WindowedDenoiser& f, const LossMatrix& loss) {
    return j_k_worst_case(ContextModel::from(law), delta, f, loss);
}

// ---------------------------------------------------------------------------
// Minimax solve
// ---------------------------------------------------------------------------

MinimaxSolution solve_minimax(const ContextModel& ctx, const ChannelSet& delta, int k,
                              const LossMatrix& loss) {
    int m = ctx.m;
    if (ctx.k != k) throw DimensionMismatchError("context model order does not match k");
    if (delta.m() != m || loss.size() != m)
        throw DimensionMismatchError("alphabet sizes disagree");

    std::vector<std::size_t> active;  // contexts with positive weight
    for (std::size_t c = 0; c < ctx.weight.size(); ++c)
        if (ctx.weight[c] > 0.0) active.push_back(c);
    if (active.empty()) throw EmptySetError("output law has no mass");

    // Variables: f(window)[a] for the m centers of every active context, then
    // the worst-case bound t. The objective coefficients are nonnegative (the
    // posterior is clamped), so t >= 0 loses nothing.
    std::size_t windows = active.size() * static_cast<std::size_t>(m);
    std::size_t num_vars = windows * static_cast<std::size_t>(m) + 1;
    std::size_t t_var = num_vars - 1;

    LpProblem lp;
    lp.objective.assign(num_vars, 0.0);
    lp.objective[t_var] = 1.0;

    // one worst-case constraint per channel: G_k(Q, Pi, f) - t <= 0
    for (std::size_t i = 0; i < delta.size(); ++i) {
        const Channel& ch = delta.channel(i);
        LpRow row;
        row.relation = LpRelation::le;
        row.rhs = 0.0;
        row.coeffs.assign(num_vars, 0.0);
        for (std::size_t ai = 0; ai < active.size(); ++ai) {
            ProbVector p = clamped_posterior(ch, ctx.q_center[active[ai]]);
            double w = ctx.weight[active[ai]];
            for (int z = 0; z < m; ++z) {
                std::size_t var0 = (ai * m + static_cast<std::size_t>(z)) * m;
                for (int a = 0; a < m; ++a) {
                    double coef = 0.0;
                    for (int x = 0; x < m; ++x) coef += p[x] * ch(x, z) * loss(x, a);
                    row.coeffs[var0 + static_cast<std::size_t>(a)] = w * coef;
                }
            }
        }
        row.coeffs[t_var] = -1.0;
        lp.rows.push_back(std::move(row));
    }

    // simplex membership per window
    for (std::size_t wi = 0; wi < windows; ++wi) {
        LpRow row;
        row.relation = LpRelation::eq;
        row.rhs = 1.0;
        row.coeffs.assign(num_vars, 0.0);
        for (int a = 0; a < m; ++a) row.coeffs[wi * m + static_cast<std::size_t>(a)] = 1.0;
        lp.rows.push_back(std::move(row));
    }

    LpResult res = solve_lp(lp);
    if (res.status == LpStatus::iteration_limit)
        throw SolverFailureError("simplex hit the iteration cap");
    if (res.status != LpStatus::optimal)
        throw SolverFailureError("minimax program not solved to optimality");

    std::vector<ProbVector> table(pow_size(m, 2 * k + 1), ProbVector(m, 1.0 / m));
    for (std::size_t ai = 0; ai < active.size(); ++ai) {
        for (int z = 0; z < m; ++z) {
            ProbVector row(m);
            double sum = 0.0;
            for (int a = 0; a < m; ++a) {
                double v = res.x[(ai * m + static_cast<std::size_t>(z)) * m + a];
                row[a] = std::max(v, 0.0);
                sum += row[a];
            }
            for (double& v : row) v /= sum;
            table[window_id_from_context(m, k, active[ai], z)] = std::move(row);
        }
    }

    MinimaxSolution sol{WindowedDenoiser(m, k, std::move(table)), 0.0, {}, res.iterations,
                        "optimal"};
    sol.value = j_k_worst_case(ctx, delta, sol.denoiser, loss).value;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        double g = g_k_expected_loss(ctx, delta.channel(i), sol.denoiser, loss);
        if (g >= sol.value - 1e-6) sol.active_channels.push_back(static_cast<int>(i));
    }
    return sol;
}

MinimaxSolution solve_minimax(const EmpiricalStats& stats, const ChannelSet& delta, int k,
                              const LossMatrix& loss) {
    if (stats.k() != k) throw DimensionMismatchError("statistics order does not match k");
    return solve_minimax(ContextModel::from(stats), delta, k, loss);
}

MinimaxSolution solve_minimax(const JointDistribution& law, const ChannelSet& delta, int k,
                              const LossMatrix& loss) {
    return solve_minimax(ContextModel::from(law), delta, k, loss);
}

// ---------------------------------------------------------------------------
// Known-channel baseline
// ---------------------------------------------------------------------------

WindowedDenoiser dude_rule(const ContextModel& ctx, const Channel& ch, int k,
                           const LossMatrix& loss) {
    int m = ctx.m;
    if (ctx.k != k) throw DimensionMismatchError("context model order does not match k");
    if (ch.size() != m || loss.size() != m) throw DimensionMismatchError("alphabet sizes disagree");
    std::vector<ProbVector> table(pow_size(m, 2 * k + 1));
    for (std::size_t c = 0; c < ctx.weight.size(); ++c) {
        ProbVector p = clamped_posterior(ch, ctx.q_center[c]);
        for (Symbol z = 0; z < m; ++z) {
            int best = 0;
            double best_score = 0.0;
            for (int a = 0; a < m; ++a) {
                double score = 0.0;
                for (int x = 0; x < m; ++x) score += p[x] * ch(x, z) * loss(x, a);
                if (a == 0 || score < best_score) {
                    best = a;
                    best_score = score;
                }
            }
            ProbVector row(m, 0.0);
            row[best] = 1.0;
            table[window_id_from_context(m, k, c, z)] = std::move(row);
        }
    }
    return WindowedDenoiser(m, k, std::move(table));
}

WindowedDenoiser dude_rule(const EmpiricalStats& stats, const Channel& ch, int k,
                           const LossMatrix& loss) {
    if (stats.k() != k) throw DimensionMismatchError("statistics order does not match k");
    return dude_rule(ContextModel::from(stats), ch, k, loss);
}

WindowedDenoiser dude_rule(const JointDistribution& law, const Channel& ch, int k,
                           const LossMatrix& loss) {
    return dude_rule(ContextModel::from(law), ch, k, loss);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string denoiser_to_json(const WindowedDenoiser& f) {
    nlohmann::json table = nlohmann::json::object();
    std::vector<Symbol> tup(2 * f.k() + 1);
    for (std::size_t w = 0; w < f.window_count(); ++w) {
        decode_tuple(w, f.m(), tup);
        table[tuple_to_string(tup)] = f.at(w);
    }
    nlohmann::json j;
    j["k"] = f.k();
    j["table"] = table;
    return j.dump();
}

WindowedDenoiser denoiser_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    int k = j.at("k").get<int>();
    const auto& table = j.at("table");
    if (table.empty()) throw ConfigInvalidError("denoiser table is empty");
    int m = static_cast<int>(table.begin()->size());
    std::vector<ProbVector> rows(pow_size(m, 2 * k + 1));
    for (const auto& [key, probs] : table.items()) {
        Sequence tup = tuple_from_string(key, m);
        if (static_cast<int>(tup.size()) != 2 * k + 1)
            throw ConfigInvalidError("window string length does not match k");
        rows[encode_tuple(tup, m)] = probs.get<ProbVector>();
    }
    for (const auto& r : rows)
        if (r.empty()) throw ConfigInvalidError("denoiser table does not cover all windows");
    return WindowedDenoiser(m, k, std::move(rows));
}

std::string MinimaxSolution::to_json() const {
    nlohmann::json j;
    j["denoiser"] = nlohmann::json::parse(denoiser_to_json(denoiser));
    j["value"] = value;
    j["active_channels"] = active_channels;
    j["iterations"] = iterations;
    j["status"] = status;
    return j.dump(2);
}

}  // namespace mmd
