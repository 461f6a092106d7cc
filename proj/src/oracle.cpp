#include "mmd/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace mmd::oracle {

namespace {

// 2x2 inverse transpose from the adjugate, applied to q and clamped to the
// simplex. Kept separate from the production posterior on purpose.
void input_posterior_2x2(const Channel& ch, double q0, double q1, double* p0, double* p1) {
    double a = ch(0, 0), b = ch(0, 1), c = ch(1, 0), d = ch(1, 1);
    double det = a * d - b * c;
    double r0 = (d * q0 - c * q1) / det;
    double r1 = (-b * q0 + a * q1) / det;
    r0 = std::max(r0, 0.0);
    r1 = std::max(r1, 0.0);
    double s = r0 + r1;
    if (s <= 0.0) {
        *p0 = 0.5;
        *p1 = 0.5;
        return;
    }
    *p0 = r0 / s;
    *p1 = r1 / s;
}

double expected_loss_2x2(const Channel& ch, const LossMatrix& loss, double q1, double d0,
                         double d1) {
    double p0 = 0.0, p1 = 0.0;
    input_posterior_2x2(ch, 1.0 - q1, q1, &p0, &p1);
    // rule on observed z: probability d_z of reconstructing 1
    double total = 0.0;
    for (int x = 0; x < 2; ++x) {
        double px = (x == 0) ? p0 : p1;
        for (int z = 0; z < 2; ++z) {
            double dz = (z == 0) ? d0 : d1;
            double recon = loss(x, 0) * (1.0 - dz) + loss(x, 1) * dz;
            total += px * ch(x, z) * recon;
        }
    }
    return total;
}

}  // namespace

GridResult grid_minimax_binary_k0(const ProbVector& q, const ChannelSet& delta,
                                  const LossMatrix& loss, double step) {
    if (delta.m() != 2 || loss.size() != 2 || q.size() != 2)
        throw DimensionMismatchError("grid oracle is binary only");
    check_prob_vector(q);
    if (!(step > 0.0)) throw InvalidRangeError("grid step must be positive");

    int points = static_cast<int>(std::floor(1.0 / step)) + 1;
    GridResult best;
    best.step = step;
    best.value = std::numeric_limits<double>::infinity();
    for (int i0 = 0; i0 <= points; ++i0) {
        double d0 = std::min(i0 * step, 1.0);
        for (int i1 = 0; i1 <= points; ++i1) {
            double d1 = std::min(i1 * step, 1.0);
            double worst = 0.0;
            for (std::size_t c = 0; c < delta.size(); ++c)
                worst = std::max(worst, expected_loss_2x2(delta.channel(c), loss, q[1], d0, d1));
            if (worst < best.value) {
                best.value = worst;
                best.d0 = d0;
                best.d1 = d1;
            }
        }
        if (d0 >= 1.0) break;
    }
    return best;
}

ExhaustiveResult exhaustive_expected_loss(const SourceChannelPair& pair,
                                          const WindowedDenoiser& f, int n,
                                          const LossMatrix& loss) {
    int m = pair.channel.size();
    int k = f.k();
    if (n <= 2 * k) throw SequenceTooShortError("sequence length must exceed 2k");
    if (n > 12) throw StateSpaceTooLargeError("enumeration limited to n <= 12");
    std::size_t states = pow_size(m, n);
    if (states > (1u << 12) || states * states > (1u << 24))
        throw StateSpaceTooLargeError("pair state space exceeds 2^24");

    auto source_prob = [&](const Sequence& x) {
        double p;
        if (pair.source.kind == SourceModel::Kind::iid) {
            p = 1.0;
            for (Symbol s : x) p *= pair.source.iid_p[s];
        } else {
            p = pair.source.initial[x[0]];
            for (int t = 1; t < n; ++t) p *= pair.source.transition[x[t - 1]][x[t]];
        }
        return p;
    };

    std::vector<double> z_prob(states, 0.0);
    std::vector<double> z_loss(states, 0.0);  // sum over x of P(x, z) * L_f(x, z)
    double expected = 0.0;

    Sequence x(n), z(n);
    std::vector<Symbol> win(2 * k + 1);
    for (std::size_t zi = 0; zi < states; ++zi) {
        decode_tuple(zi, m, z);
        for (std::size_t xi = 0; xi < states; ++xi) {
            decode_tuple(xi, m, x);
            double w = source_prob(x);
            if (w == 0.0) continue;
            for (int t = 0; t < n; ++t) w *= pair.channel(x[t], z[t]);
            if (w == 0.0) continue;

            double lf = 0.0;
            for (int c = k; c < n - k; ++c) {
                for (int j = 0; j < 2 * k + 1; ++j) win[j] = z[c - k + j];
                const ProbVector& out = f.at_window(win);
                for (int a = 0; a < m; ++a) lf += loss(x[c], a) * out[a];
            }
            lf /= static_cast<double>(n - 2 * k);

            z_prob[zi] += w;
            z_loss[zi] += w * lf;
            expected += w * lf;
        }
    }

    ExhaustiveResult out;
    out.expected = expected;
    out.conditional = [z_prob = std::move(z_prob), z_loss = std::move(z_loss), m,
                       n](const Sequence& zq) {
        if (static_cast<int>(zq.size()) != n)
            throw LengthMismatchError("query length differs from enumerated length");
        std::size_t id = encode_tuple(zq, m);
        if (z_prob[id] <= 0.0) throw ZeroLikelihoodError("query sequence has zero probability");
        return z_loss[id] / z_prob[id];
    };
    return out;
}

double induced_bsc_input(double q, double delta) {
    if (std::abs(1.0 - 2.0 * delta) < 1e-12) throw SingularError("crossover 0.5 is singular");
    return (q - delta) / (1.0 - 2.0 * delta);
}

ProbVector markov_stationary(const std::vector<std::vector<double>>& transition) {
    int m = static_cast<int>(transition.size());
    if (m < 1) throw InvalidRangeError("empty transition matrix");
    for (const auto& row : transition) {
        if (static_cast<int>(row.size()) != m)
            throw DimensionMismatchError("transition matrix not square");
        check_prob_vector(row);
    }

    // strong connectivity over positive transitions, checked from state 0
    auto reachable = [&](bool forward) {
        std::vector<char> seen(m, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < m; ++v) {
                double p = forward ? transition[u][v] : transition[v][u];
                if (p > 0.0 && !seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        return seen;
    };
    for (bool fwd : {true, false})
        for (char s : reachable(fwd))
            if (!s) throw NotIrreducibleError("transition graph is not strongly connected");

    // damped iteration pi <- (pi + pi T) / 2 converges for every irreducible
    // chain, periodic ones included; residual is measured against T itself
    ProbVector pi(m, 1.0 / m), next(m);
    for (int iter = 0; iter < 1000000; ++iter) {
        double residual = 0.0;
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i) acc += pi[i] * transition[i][j];
            next[j] = acc;
            residual = std::max(residual, std::abs(acc - pi[j]));
        }
        if (residual <= 1e-13) return pi;
        for (int j = 0; j < m; ++j) pi[j] = 0.5 * (pi[j] + next[j]);
    }
    throw NotIrreducibleError("stationary iteration did not converge");
}

}  // namespace mmd::oracle
