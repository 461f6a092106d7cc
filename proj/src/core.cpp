#include "mmd/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace mmd {

std::size_t pow_size(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(base))
            throw StateSpaceTooLargeError("tuple space overflows size_t");
        r *= static_cast<std::size_t>(base);
    }
    return r;
}

std::size_t encode_tuple(std::span<const Symbol> tuple, int m) {
    std::size_t id = 0;
    for (Symbol s : tuple) {
        if (s < 0 || s >= m) throw InvalidRangeError("symbol out of alphabet range");
        id = id * static_cast<std::size_t>(m) + static_cast<std::size_t>(s);
    }
    return id;
}

void decode_tuple(std::size_t id, int m, std::span<Symbol> out) {
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = static_cast<Symbol>(id % static_cast<std::size_t>(m));
        id /= static_cast<std::size_t>(m);
    }
}

std::string tuple_to_string(std::span<const Symbol> tuple) {
    std::string s;
    s.reserve(tuple.size());
    for (Symbol x : tuple) {
        if (x < 0 || x > 9) throw InvalidRangeError("digit encoding needs symbols in 0..9");
        s.push_back(static_cast<char>('0' + x));
    }
    return s;
}

std::size_t window_id_from_context(int m, int k, std::size_t ctx_id, Symbol center) {
    std::size_t side = pow_size(m, k);
    std::size_t left_id = ctx_id / side;
    std::size_t right_id = ctx_id % side;
    return (left_id * static_cast<std::size_t>(m) + static_cast<std::size_t>(center)) * side +
           right_id;
}

Sequence tuple_from_string(const std::string& s, int m) {
    Sequence out;
    out.reserve(s.size());
    for (char c : s) {
        if (c < '0' || c > '9') throw InvalidRangeError("non-digit in symbol string");
        Symbol x = c - '0';
        if (x >= m) throw InvalidRangeError("symbol out of alphabet range");
        out.push_back(x);
    }
    return out;
}

bool is_prob_vector(const ProbVector& p, double tol) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

void check_prob_vector(const ProbVector& p, double tol) {
    if (!is_prob_vector(p, tol)) throw NotStochasticError("not a probability vector");
}

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

namespace {

// Gauss-Jordan inverse with partial pivoting; also returns the determinant.
// Sizes here are at most a handful, dense is the right tool.
std::vector<double> invert_dense(std::vector<double> a, int n, double* det_out) {
    std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i) * n + i] = 1.0;
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[static_cast<std::size_t>(r) * n + col]) >
                std::abs(a[static_cast<std::size_t>(piv) * n + col]))
                piv = r;
        if (piv != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(a[static_cast<std::size_t>(piv) * n + c],
                          a[static_cast<std::size_t>(col) * n + c]);
                std::swap(inv[static_cast<std::size_t>(piv) * n + c],
                          inv[static_cast<std::size_t>(col) * n + c]);
            }
            det = -det;
        }
        double d = a[static_cast<std::size_t>(col) * n + col];
        det *= d;
        if (d == 0.0) {
            *det_out = 0.0;
            return inv;
        }
        double s = 1.0 / d;
        for (int c = 0; c < n; ++c) {
            a[static_cast<std::size_t>(col) * n + c] *= s;
            inv[static_cast<std::size_t>(col) * n + c] *= s;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[static_cast<std::size_t>(r) * n + col];
            if (f == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                a[static_cast<std::size_t>(r) * n + c] -=
                    f * a[static_cast<std::size_t>(col) * n + c];
                inv[static_cast<std::size_t>(r) * n + c] -=
                    f * inv[static_cast<std::size_t>(col) * n + c];
            }
        }
    }
    *det_out = det;
    return inv;
}

}  // namespace

Channel::Channel(const std::vector<std::vector<double>>& rows) {
    m_ = static_cast<int>(rows.size());
    if (m_ < 2) throw InvalidRangeError("channel needs alphabet size >= 2");
    p_.reserve(static_cast<std::size_t>(m_) * m_);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != m_)
            throw DimensionMismatchError("channel matrix not square");
        double sum = 0.0;
        for (double v : row) {
            if (v < 0.0) throw NotStochasticError("negative channel entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTol)
            throw NotStochasticError("channel row does not sum to 1");
        p_.insert(p_.end(), row.begin(), row.end());
    }

    double det = 0.0;
    std::vector<double> inv = invert_dense(p_, m_, &det);
    if (std::abs(det) < kSingularTol) throw SingularError("channel matrix is singular");
    det_ = det;

    // cache Pi^{-T} and verify Pi^{-T} Pi^{T} = I
    invt_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int x = 0; x < m_; ++x)
        for (int z = 0; z < m_; ++z)
            invt_[static_cast<std::size_t>(x) * m_ + z] = inv[static_cast<std::size_t>(z) * m_ + x];
    for (int i = 0; i < m_; ++i) {
        for (int j = 0; j < m_; ++j) {
            double acc = 0.0;
            for (int l = 0; l < m_; ++l)
                acc += invt_[static_cast<std::size_t>(i) * m_ + l] *
                       p_[static_cast<std::size_t>(j) * m_ + l];  // (Pi^T)(l, j) = Pi(j, l)
            double expect = (i == j) ? 1.0 : 0.0;
            if (std::abs(acc - expect) > kInverseCheckTol)
                throw SingularError("channel inverse failed residual check");
        }
    }

    // induced infinity norm of Pi^{-1}: max over z of sum_x |Pi^{-1}(z, x)|
    inv_norm_ = 0.0;
    for (int z = 0; z < m_; ++z) {
        double s = 0.0;
        for (int x = 0; x < m_; ++x) s += std::abs(invt_[static_cast<std::size_t>(x) * m_ + z]);
        inv_norm_ = std::max(inv_norm_, s);
    }
}

std::vector<std::vector<double>> Channel::rows() const {
    std::vector<std::vector<double>> out(m_);
    for (int x = 0; x < m_; ++x)
        out[x].assign(p_.begin() + static_cast<std::ptrdiff_t>(x) * m_,
                      p_.begin() + static_cast<std::ptrdiff_t>(x + 1) * m_);
    return out;
}

std::vector<double> Channel::apply_inverse_transpose(std::span<const double> q) const {
    if (static_cast<int>(q.size()) != m_)
        throw DimensionMismatchError("vector length does not match channel alphabet");
    std::vector<double> out(m_, 0.0);
    for (int x = 0; x < m_; ++x) {
        double acc = 0.0;
        for (int z = 0; z < m_; ++z) acc += invt_[static_cast<std::size_t>(x) * m_ + z] * q[z];
        out[x] = acc;
    }
    return out;
}

Channel channel_new(const std::vector<std::vector<double>>& rows) { return Channel(rows); }

Channel bsc(double delta) {
    if (delta < 0.0 || delta > 1.0) throw InvalidRangeError("crossover probability outside [0,1]");
    return Channel({{1.0 - delta, delta}, {delta, 1.0 - delta}});
}

double channel_distance(const Channel& a, const Channel& b) {
    if (a.size() != b.size()) throw DimensionMismatchError("channel alphabets differ");
    double d = 0.0;
    for (std::size_t i = 0; i < a.flat().size(); ++i)
        d = std::max(d, std::abs(a.flat()[i] - b.flat()[i]));
    return d;
}

// ---------------------------------------------------------------------------
// LossMatrix
// ---------------------------------------------------------------------------

LossMatrix::LossMatrix(const std::vector<std::vector<double>>& rows) {
    m_ = static_cast<int>(rows.size());
    if (m_ < 2) throw InvalidRangeError("loss matrix needs alphabet size >= 2");
    v_.reserve(static_cast<std::size_t>(m_) * m_);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != m_)
            throw DimensionMismatchError("loss matrix not square");
        for (double x : row) {
            if (x < 0.0) throw InvalidRangeError("negative loss entry");
            max_ = std::max(max_, x);
            v_.push_back(x);
        }
    }
}

std::vector<std::vector<double>> LossMatrix::rows() const {
    std::vector<std::vector<double>> out(m_);
    for (int a = 0; a < m_; ++a)
        out[a].assign(v_.begin() + static_cast<std::ptrdiff_t>(a) * m_,
                      v_.begin() + static_cast<std::ptrdiff_t>(a + 1) * m_);
    return out;
}

LossMatrix LossMatrix::scaled(double c) const {
    if (!(c > 0.0)) throw InvalidRangeError("loss scale must be positive");
    auto r = rows();
    for (auto& row : r)
        for (double& x : row) x *= c;
    return LossMatrix(r);
}

LossMatrix hamming_loss(int m) {
    if (m < 2) throw InvalidRangeError("alphabet size must be >= 2");
    std::vector<std::vector<double>> rows(m, std::vector<double>(m, 1.0));
    for (int a = 0; a < m; ++a) rows[a][a] = 0.0;
    return LossMatrix(rows);
}

// ---------------------------------------------------------------------------
// JointDistribution
// ---------------------------------------------------------------------------

JointDistribution::JointDistribution(int base, int order, std::vector<double> data)
    : m_(base), t_(order), data_(std::move(data)) {
    if (base < 2) throw InvalidRangeError("base must be >= 2");
    if (order < 1) throw InvalidRangeError("order must be >= 1");
    if (data_.size() != pow_size(base, order))
        throw DimensionMismatchError("tensor size does not match base^order");
    double sum = 0.0;
    for (double v : data_) {
        if (v < 0.0) throw NotStochasticError("negative tensor entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTol)
        throw NotStochasticError("tensor entries do not sum to 1");
}

JointDistribution JointDistribution::iid_product(const ProbVector& p, int order) {
    check_prob_vector(p);
    int m = static_cast<int>(p.size());
    std::size_t size = pow_size(m, order);
    std::vector<double> data(size);
    std::vector<Symbol> tup(order);
    for (std::size_t id = 0; id < size; ++id) {
        decode_tuple(id, m, tup);
        double v = 1.0;
        for (Symbol s : tup) v *= p[s];
        data[id] = v;
    }
    return JointDistribution(m, order, std::move(data));
}

// ---------------------------------------------------------------------------
// WindowedDenoiser
// ---------------------------------------------------------------------------

WindowedDenoiser::WindowedDenoiser(int m, int k, std::vector<ProbVector> table)
    : m_(m), k_(k), table_(std::move(table)) {
    if (m < 2) throw InvalidRangeError("alphabet size must be >= 2");
    if (k < 0) throw InvalidRangeError("window order must be >= 0");
    if (table_.size() != pow_size(m, 2 * k + 1))
        throw DimensionMismatchError("denoiser table does not cover all windows");
    for (const auto& row : table_) {
        if (static_cast<int>(row.size()) != m)
            throw DimensionMismatchError("denoiser row length mismatch");
        check_prob_vector(row);
    }
}

WindowedDenoiser WindowedDenoiser::uniform(int m, int k) {
    std::vector<ProbVector> t(pow_size(m, 2 * k + 1), ProbVector(m, 1.0 / m));
    return WindowedDenoiser(m, k, std::move(t));
}

WindowedDenoiser WindowedDenoiser::say_what_you_see(int m, int k) {
    std::size_t windows = pow_size(m, 2 * k + 1);
    std::size_t center_stride = pow_size(m, k);
    std::vector<ProbVector> t(windows, ProbVector(m, 0.0));
    for (std::size_t w = 0; w < windows; ++w) {
        Symbol center = static_cast<Symbol>((w / center_stride) % static_cast<std::size_t>(m));
        t[w][center] = 1.0;
    }
    return WindowedDenoiser(m, k, std::move(t));
}

WindowedDenoiser WindowedDenoiser::constant(int m, int k, Symbol s) {
    if (s < 0 || s >= m) throw InvalidRangeError("symbol out of alphabet range");
    std::vector<ProbVector> t(pow_size(m, 2 * k + 1), ProbVector(m, 0.0));
    for (auto& row : t) row[s] = 1.0;
    return WindowedDenoiser(m, k, std::move(t));
}

WindowedDenoiser WindowedDenoiser::mixture(const WindowedDenoiser& a, const WindowedDenoiser& b,
                                           double gamma) {
    if (a.m() != b.m() || a.k() != b.k())
        throw DimensionMismatchError("mixture components have different shapes");
    if (gamma < 0.0 || gamma > 1.0) throw InvalidRangeError("mixture weight outside [0,1]");
    std::vector<ProbVector> t(a.window_count());
    for (std::size_t w = 0; w < t.size(); ++w) {
        t[w].resize(a.m());
        for (int s = 0; s < a.m(); ++s)
            t[w][s] = gamma * a.at(w)[s] + (1.0 - gamma) * b.at(w)[s];
    }
    return WindowedDenoiser(a.m(), a.k(), std::move(t));
}

// ---------------------------------------------------------------------------
// ChannelSet
// ---------------------------------------------------------------------------

ChannelSet::ChannelSet(std::vector<Channel> channels, std::vector<std::string> labels)
    : channels_(std::move(channels)), labels_(std::move(labels)) {
    if (channels_.empty()) throw EmptySetError("channel set is empty");
    int m = channels_.front().size();
    for (const auto& ch : channels_)
        if (ch.size() != m) throw DimensionMismatchError("mixed alphabet sizes in channel set");
    for (std::size_t i = 0; i < channels_.size(); ++i)
        for (std::size_t j = i + 1; j < channels_.size(); ++j)
            if (channel_distance(channels_[i], channels_[j]) <= kMatrixEqTol)
                throw InvalidRangeError("duplicate channel in set");
    if (labels_.empty()) {
        labels_.reserve(channels_.size());
        for (std::size_t i = 0; i < channels_.size(); ++i)
            labels_.push_back("channel_" + std::to_string(i));
    }
    if (labels_.size() != channels_.size())
        throw DimensionMismatchError("label count does not match channel count");
}

double ChannelSet::max_inv_norm() const {
    double v = 0.0;
    for (const auto& ch : channels_) v = std::max(v, ch.inv_norm());
    return v;
}

double rho(const ChannelSet& a, const ChannelSet& b) {
    auto directed = [](const ChannelSet& from, const ChannelSet& to) {
        double worst = 0.0;
        for (std::size_t i = 0; i < from.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < to.size(); ++j)
                best = std::min(best, channel_distance(from.channel(i), to.channel(j)));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return directed(a, b) + directed(b, a);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::json matrix_json(const std::vector<std::vector<double>>& rows) {
    nlohmann::json j;
    j["matrix"] = rows;
    return j;
}

std::vector<std::vector<double>> matrix_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("matrix")) throw ConfigInvalidError("missing \"matrix\" key");
    return j.at("matrix").get<std::vector<std::vector<double>>>();
}

}  // namespace

std::string channel_to_json(const Channel& ch) { return matrix_json(ch.rows()).dump(); }

Channel channel_from_json(const std::string& text) { return Channel(matrix_from_json(text)); }

std::string loss_to_json(const LossMatrix& loss) { return matrix_json(loss.rows()).dump(); }

LossMatrix loss_from_json(const std::string& text) { return LossMatrix(matrix_from_json(text)); }

}  // namespace mmd
