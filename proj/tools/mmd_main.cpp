// Command-line front end: simulate data, denoise it, evaluate denoisers,
// reproduce the worked binary example, tabulate deviation bounds, and sweep
// parameters. All runs are config-driven and seeded.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mmd/commands.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct GlobalFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    std::optional<double> feas_eps;
    bool exact_law = false;
};

mmd::ExperimentConfig load_config(const GlobalFlags& g, bool required) {
    mmd::ExperimentConfig cfg;
    if (!g.config_path.empty()) {
        cfg = mmd::ExperimentConfig::from_json_text(mmd::read_text_file(g.config_path));
    } else if (required) {
        throw mmd::ConfigInvalidError("this subcommand needs --config");
    }
    if (g.seed) cfg.seed = *g.seed;
    if (g.threads) cfg.threads = *g.threads;
    if (g.out_dir) cfg.out_dir = *g.out_dir;
    if (g.feas_eps) cfg.feas_eps = *g.feas_eps;
    if (g.exact_law) cfg.exact_law = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimax sliding-window denoising under channel uncertainty"};
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--config", g.config_path, "experiment config (JSON)");
    std::uint64_t seed_val = 0;
    auto* seed_opt = app.add_option("--seed", seed_val, "override the config seed");
    int threads_val = 1;
    auto* threads_opt = app.add_option("--threads", threads_val, "worker thread cap");
    std::string out_val;
    auto* out_opt = app.add_option("--out", out_val, "override the output directory");
    double eps_val = 0.0;
    auto* eps_opt = app.add_option("--feas-eps", eps_val, "override the feasibility slack");
    app.add_flag("--exact-law", g.exact_law,
                 "use the analytic output law instead of empirical statistics");

    auto* c_sim = app.add_subcommand("simulate", "sample a clean/noisy pair from the config");
    auto* c_den = app.add_subcommand("denoise", "trim, solve, and apply to a noisy file");
    std::string den_noisy;
    c_den->add_option("noisy", den_noisy, "noisy sequence file")->required();
    auto* c_eval = app.add_subcommand("evaluate", "score a denoiser or reconstruction");
    std::string ev_clean, ev_noisy, ev_denoiser, ev_recon;
    c_eval->add_option("--clean", ev_clean, "clean sequence file")->required();
    c_eval->add_option("--noisy", ev_noisy, "noisy sequence file")->required();
    c_eval->add_option("--denoiser", ev_denoiser, "denoiser JSON to evaluate");
    c_eval->add_option("--recon", ev_recon, "reconstruction file to evaluate");
    auto* c_ex1 = app.add_subcommand("example1", "golden-number checks for the worked example");
    auto* c_bounds = app.add_subcommand("bounds", "tabulate deviation bounds over (n, k, delta)");
    auto* c_sweep = app.add_subcommand("sweep", "sweep gamma, n, or k and emit CSV");
    std::string sweep_axis = "gamma";
    c_sweep->add_option("axis", sweep_axis, "gamma | n | k")->required();
    auto* c_feas = app.add_subcommand("feasibility", "feasibility verdicts for the channel set");
    std::string feas_noisy;
    c_feas->add_option("noisy", feas_noisy, "noisy sequence file (omit with --exact-law)");

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) g.seed = seed_val;
    if (*threads_opt) g.threads = threads_val;
    if (*out_opt) g.out_dir = out_val;
    if (*eps_opt) g.feas_eps = eps_val;

    try {
        if (*c_sim) return mmd::cmd_simulate(load_config(g, true), std::cout);
        if (*c_den) return mmd::cmd_denoise(load_config(g, true), den_noisy, std::cout);
        if (*c_eval) {
            if (ev_denoiser.empty() == ev_recon.empty())
                throw mmd::ConfigInvalidError("evaluate needs exactly one of --denoiser/--recon");
            bool is_denoiser = !ev_denoiser.empty();
            return mmd::cmd_evaluate(load_config(g, true), ev_clean, ev_noisy,
                                     is_denoiser ? ev_denoiser : ev_recon, is_denoiser,
                                     std::cout);
        }
        if (*c_ex1) {
            std::string out = g.out_dir.value_or("out");
            return mmd::cmd_example1(out, std::cout);
        }
        if (*c_bounds) return mmd::cmd_bounds(load_config(g, true), std::cout);
        if (*c_sweep) return mmd::cmd_sweep(load_config(g, true), sweep_axis, std::cout);
        if (*c_feas) {
            std::optional<std::filesystem::path> noisy;
            if (!feas_noisy.empty()) noisy = feas_noisy;
            return mmd::cmd_feasibility(load_config(g, true), noisy, std::cout);
        }
    } catch (const mmd::ConfigInvalidError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mmd::SolverFailureError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const mmd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
