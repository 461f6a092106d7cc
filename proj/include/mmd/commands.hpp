#pragma once
// Config-driven front-end operations shared by the CLI binary and the test
// suites. Every command is a pure function of (config, input files, seed) and
// writes its outputs under the config's out_dir.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mmd/core.hpp"
#include "mmd/evaluation.hpp"
#include "mmd/io.hpp"
#include "mmd/pipeline.hpp"

namespace mmd {

struct ChannelSpec {
    std::string kind = "bsc";  // "bsc" | "matrix"
    double delta = 0.0;
    std::vector<std::vector<double>> matrix;
    std::string label;

    Channel build() const;
    std::string display_label(std::size_t index) const;
};

struct SourceSpec {
    std::string kind = "iid";  // "iid" | "markov"
    ProbVector p;
    std::vector<std::vector<double>> transition;
    ProbVector initial;  // empty: use the stationary distribution

    SourceModel build() const;
};

struct UncertaintySpec {
    std::string kind = "list";  // "list" | "bsc_interval"
    std::vector<ChannelSpec> channels;
    double lo = 0.0, hi = 0.0, eta = 0.0;

    ChannelSet build() const;
};

struct ExperimentConfig {
    std::string id = "experiment";
    int alphabet_size = 2;
    std::uint64_t n = 0;
    bool k_auto = false;
    int k = 0;
    int l = -1;              // < 0: default to k
    double feas_eps = -1.0;  // < 0: default deviation-scale slack
    std::uint64_t seed = 0;
    std::string loss_kind = "hamming";  // "hamming" | "matrix"
    std::vector<std::vector<double>> loss_matrix;
    SourceSpec source;
    ChannelSpec true_channel;
    UncertaintySpec uncertainty;
    std::string apply_mode = "map";  // "sample" | "map" | "distribution"
    bool exact_law = false;
    std::string io_format = "text";  // "text" | "binary"
    std::string out_dir = "out";
    int threads = 1;

    // sweep / bounds grids (defaults filled in the commands)
    std::vector<std::uint64_t> bounds_n;
    std::vector<int> bounds_k;
    std::vector<double> bounds_delta;
    std::vector<std::uint64_t> sweep_n;
    std::vector<int> sweep_k;
    double gamma_step = 0.01;

    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const;

    // resolves "auto" window order, default l, and default slack for a block
    // of the given length
    ExperimentConfig resolved(std::uint64_t actual_n) const;

    LossMatrix build_loss() const;
    ApplyMode build_apply_mode() const;
    SequenceFormat build_format() const;
};

// one channel per survivor, paired with the iid law induced by inverting it
// against the order-1 output marginal
std::vector<SourceChannelPair> feasible_pairs(const ChannelSet& survivors,
                                              const ProbVector& out_marginal);

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_denoise(const ExperimentConfig& cfg, const std::filesystem::path& noisy,
                std::ostream& log);
int cmd_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& clean,
                 const std::filesystem::path& noisy, const std::filesystem::path& input,
                 bool input_is_denoiser, std::ostream& log);
int cmd_example1(const std::filesystem::path& out_dir, std::ostream& log);
int cmd_bounds(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, const std::string& axis, std::ostream& log);
int cmd_feasibility(const ExperimentConfig& cfg,
                    const std::optional<std::filesystem::path>& noisy, std::ostream& log);

}  // namespace mmd
