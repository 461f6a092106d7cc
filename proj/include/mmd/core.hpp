#pragma once
// Core value types for discrete denoising under channel uncertainty:
// alphabets, channels, losses, joint distributions, sliding-window denoisers.
// All types are immutable after construction and safe to share across threads.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmd {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotStochasticError : Error { using Error::Error; };
struct SingularError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };
struct EmptySetError : Error { using Error::Error; };
struct SequenceTooShortError : Error { using Error::Error; };
struct LengthMismatchError : Error { using Error::Error; };
struct SolverFailureError : Error { using Error::Error; };
struct ZeroLikelihoodError : Error { using Error::Error; };
struct StateSpaceTooLargeError : Error { using Error::Error; };
struct NotIrreducibleError : Error { using Error::Error; };
struct InvalidRangeError : Error { using Error::Error; };
struct ConfigInvalidError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Basic aliases and tolerances
// ---------------------------------------------------------------------------

using Symbol = int;
using Sequence = std::vector<Symbol>;
using ProbVector = std::vector<double>;

inline constexpr double kRowSumTol = 1e-12;       // channel row-stochasticity
inline constexpr double kSimplexTol = 1e-9;       // probability vectors / tensors
inline constexpr double kSingularTol = 1e-10;     // |det| below this is rejected
inline constexpr double kInverseCheckTol = 1e-9;  // residual of computed inverse
inline constexpr double kMatrixEqTol = 1e-12;     // entrywise matrix equality

// Symbols live in {0, ..., size-1}.
struct Alphabet {
    int size;
    explicit Alphabet(int m) : size(m) {
        if (m < 2) throw InvalidRangeError("alphabet size must be >= 2");
    }
};

// Mixed-radix tuple codec, most significant symbol first. m^t tuple ids.
std::size_t pow_size(int base, int exp);
std::size_t encode_tuple(std::span<const Symbol> tuple, int m);
void decode_tuple(std::size_t id, int m, std::span<Symbol> out);
std::string tuple_to_string(std::span<const Symbol> tuple);
Sequence tuple_from_string(const std::string& s, int m);

// A (2k+1)-window is [left k symbols | center | right k symbols]; a two-sided
// context id packs (left, right) as left_id * m^k + right_id.
std::size_t window_id_from_context(int m, int k, std::size_t ctx_id, Symbol center);

bool is_prob_vector(const ProbVector& p, double tol = kSimplexTol);
void check_prob_vector(const ProbVector& p, double tol = kSimplexTol);

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

// Square row-stochastic transition matrix with cached inverse-transpose and
// the induced infinity-norm of its inverse (max absolute row sum).
class Channel {
public:
    explicit Channel(const std::vector<std::vector<double>>& rows);

    int size() const { return m_; }

    // transition probability, input x -> output z
    double operator()(int x, int z) const { return p_[static_cast<std::size_t>(x) * m_ + z]; }

    // entry (x, z) of the cached inverse-transpose
    double inv_t(int x, int z) const { return invt_[static_cast<std::size_t>(x) * m_ + z]; }

    double inv_norm() const { return inv_norm_; }
    double det() const { return det_; }

    const std::vector<double>& flat() const { return p_; }
    std::vector<std::vector<double>> rows() const;

    // y = Pi^{-T} q; preserves total mass because Pi^{-1} 1 = 1
    std::vector<double> apply_inverse_transpose(std::span<const double> q) const;

private:
    int m_ = 0;
    std::vector<double> p_;     // row-major Pi
    std::vector<double> invt_;  // row-major Pi^{-T}
    double inv_norm_ = 0.0;
    double det_ = 0.0;
};

Channel channel_new(const std::vector<std::vector<double>>& rows);

// Binary symmetric channel [[1-delta, delta], [delta, 1-delta]].
Channel bsc(double delta);

// entrywise max-abs difference between transition matrices
double channel_distance(const Channel& a, const Channel& b);

// ---------------------------------------------------------------------------
// LossMatrix
// ---------------------------------------------------------------------------

class LossMatrix {
public:
    explicit LossMatrix(const std::vector<std::vector<double>>& rows);

    int size() const { return m_; }
    double operator()(int a, int b) const { return v_[static_cast<std::size_t>(a) * m_ + b]; }
    double max_loss() const { return max_; }
    std::vector<std::vector<double>> rows() const;

    // multiplies every entry by c > 0
    LossMatrix scaled(double c) const;

private:
    int m_ = 0;
    std::vector<double> v_;
    double max_ = 0.0;
};

LossMatrix hamming_loss(int m);

// ---------------------------------------------------------------------------
// JointDistribution
// ---------------------------------------------------------------------------

// Dense order-t probability tensor over alphabet t-tuples (m^t entries).
class JointDistribution {
public:
    JointDistribution(int base, int order, std::vector<double> data);

    static JointDistribution iid_product(const ProbVector& p, int order);

    int base() const { return m_; }
    int order() const { return t_; }
    std::size_t size() const { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }
    const std::vector<double>& data() const { return data_; }

    double at(std::span<const Symbol> tuple) const { return data_[encode_tuple(tuple, m_)]; }

private:
    int m_ = 0;
    int t_ = 0;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// WindowedDenoiser
// ---------------------------------------------------------------------------

// Order-k sliding-window rule: each (2k+1)-window over the alphabet maps to a
// distribution over reconstructions of the window's center symbol.
class WindowedDenoiser {
public:
    WindowedDenoiser(int m, int k, std::vector<ProbVector> table);

    static WindowedDenoiser uniform(int m, int k);
    static WindowedDenoiser say_what_you_see(int m, int k);
    static WindowedDenoiser constant(int m, int k, Symbol s);
    // pointwise gamma * a + (1 - gamma) * b
    static WindowedDenoiser mixture(const WindowedDenoiser& a, const WindowedDenoiser& b,
                                    double gamma);

    int m() const { return m_; }
    int k() const { return k_; }
    std::size_t window_count() const { return table_.size(); }

    const ProbVector& at(std::size_t window_id) const { return table_[window_id]; }
    const ProbVector& at_window(std::span<const Symbol> window) const {
        return table_[encode_tuple(window, m_)];
    }
    const std::vector<ProbVector>& table() const { return table_; }

private:
    int m_ = 0;
    int k_ = 0;
    std::vector<ProbVector> table_;  // indexed by window id
};

// ---------------------------------------------------------------------------
// ChannelSet
// ---------------------------------------------------------------------------

// Finite nonempty list of same-alphabet channels; duplicates rejected.
class ChannelSet {
public:
    explicit ChannelSet(std::vector<Channel> channels, std::vector<std::string> labels = {});

    std::size_t size() const { return channels_.size(); }
    int m() const { return channels_.front().size(); }
    const Channel& channel(std::size_t i) const { return channels_[i]; }
    const std::string& label(std::size_t i) const { return labels_[i]; }
    const std::vector<Channel>& channels() const { return channels_; }
    const std::vector<std::string>& labels() const { return labels_; }

    double max_inv_norm() const;

private:
    std::vector<Channel> channels_;
    std::vector<std::string> labels_;
};

// Set distance: sup_a inf_b ||a-b|| + sup_b inf_a ||a-b|| in the entrywise
// max norm on transition matrices.
double rho(const ChannelSet& a, const ChannelSet& b);

// ---------------------------------------------------------------------------
// Serialization ({"matrix": [[...], ...]} documents)
// ---------------------------------------------------------------------------

std::string channel_to_json(const Channel& ch);
Channel channel_from_json(const std::string& text);
std::string loss_to_json(const LossMatrix& loss);
LossMatrix loss_from_json(const std::string& text);

}  // namespace mmd
