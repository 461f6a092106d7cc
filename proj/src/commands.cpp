#include "mmd/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mmd/empirical.hpp"
#include "mmd/feasibility.hpp"
#include "mmd/oracle.hpp"
#include "mmd/rng.hpp"

namespace mmd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config specs
// ---------------------------------------------------------------------------

Channel ChannelSpec::build() const {
    if (kind == "bsc") return bsc(delta);
    if (kind == "matrix") return Channel(matrix);
    throw ConfigInvalidError("unknown channel kind: " + kind);
}

std::string ChannelSpec::display_label(std::size_t index) const {
    if (!label.empty()) return label;
    if (kind == "bsc") return "bsc_" + fmt12(delta);
    return "channel_" + std::to_string(index);
}

SourceModel SourceSpec::build() const {
    if (kind == "iid") return SourceModel::make_iid(p);
    if (kind == "markov") {
        ProbVector init = initial.empty() ? oracle::markov_stationary(transition) : initial;
        return SourceModel::make_markov(transition, std::move(init));
    }
    throw ConfigInvalidError("unknown source kind: " + kind);
}

ChannelSet UncertaintySpec::build() const {
    if (kind == "bsc_interval") return bsc_cover(lo, hi, eta);
    if (kind != "list") throw ConfigInvalidError("unknown uncertainty kind: " + kind);
    if (channels.empty()) throw ConfigInvalidError("uncertainty list is empty");
    std::vector<Channel> chs;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        chs.push_back(channels[i].build());
        labels.push_back(channels[i].display_label(i));
    }
    return ChannelSet(std::move(chs), std::move(labels));
}

// ---------------------------------------------------------------------------
// Config JSON
// ---------------------------------------------------------------------------

namespace {

ChannelSpec channel_spec_from(const json& j) {
    ChannelSpec s;
    s.kind = j.value("kind", std::string("bsc"));
    s.delta = j.value("delta", 0.0);
    if (j.contains("matrix")) s.matrix = j.at("matrix").get<std::vector<std::vector<double>>>();
    s.label = j.value("label", std::string());
    return s;
}

json channel_spec_json(const ChannelSpec& s) {
    json j;
    j["kind"] = s.kind;
    if (s.kind == "bsc") j["delta"] = s.delta;
    if (!s.matrix.empty()) j["matrix"] = s.matrix;
    if (!s.label.empty()) j["label"] = s.label;
    return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigInvalidError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        ExperimentConfig c;
        c.id = j.value("id", std::string("experiment"));
        c.alphabet_size = j.value("alphabet_size", 2);
        c.n = j.value("n", std::uint64_t{0});
        if (j.contains("k")) {
            if (j.at("k").is_string()) {
                if (j.at("k").get<std::string>() != "auto")
                    throw ConfigInvalidError("k must be an integer or \"auto\"");
                c.k_auto = true;
            } else {
                c.k = j.at("k").get<int>();
            }
        }
        c.l = j.value("l", -1);
        c.feas_eps = j.value("feas_eps", -1.0);
        c.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("loss")) {
            if (j.at("loss").is_string()) {
                c.loss_kind = j.at("loss").get<std::string>();
            } else {
                c.loss_kind = "matrix";
                c.loss_matrix = j.at("loss").at("matrix").get<std::vector<std::vector<double>>>();
            }
        }
        if (j.contains("source")) {
            const json& s = j.at("source");
            c.source.kind = s.value("kind", std::string("iid"));
            if (s.contains("p")) c.source.p = s.at("p").get<ProbVector>();
            if (s.contains("transition"))
                c.source.transition = s.at("transition").get<std::vector<std::vector<double>>>();
            if (s.contains("initial") && !s.at("initial").is_string())
                c.source.initial = s.at("initial").get<ProbVector>();
        }
        if (j.contains("true_channel")) c.true_channel = channel_spec_from(j.at("true_channel"));
        if (j.contains("uncertainty_set")) {
            const json& u = j.at("uncertainty_set");
            c.uncertainty.kind = u.value("kind", std::string("list"));
            if (u.contains("channels"))
                for (const auto& e : u.at("channels"))
                    c.uncertainty.channels.push_back(channel_spec_from(e));
            c.uncertainty.lo = u.value("lo", 0.0);
            c.uncertainty.hi = u.value("hi", 0.0);
            c.uncertainty.eta = u.value("eta", 0.0);
        }
        c.apply_mode = j.value("apply_mode", std::string("map"));
        c.exact_law = j.value("exact_law", false);
        c.io_format = j.value("io_format", std::string("text"));
        c.out_dir = j.value("out_dir", std::string("out"));
        c.threads = j.value("threads", 1);
        if (j.contains("bounds_n")) c.bounds_n = j.at("bounds_n").get<std::vector<std::uint64_t>>();
        if (j.contains("bounds_k")) c.bounds_k = j.at("bounds_k").get<std::vector<int>>();
        if (j.contains("bounds_delta"))
            c.bounds_delta = j.at("bounds_delta").get<std::vector<double>>();
        if (j.contains("sweep_n")) c.sweep_n = j.at("sweep_n").get<std::vector<std::uint64_t>>();
        if (j.contains("sweep_k")) c.sweep_k = j.at("sweep_k").get<std::vector<int>>();
        c.gamma_step = j.value("gamma_step", 0.01);
        return c;
    } catch (const json::exception& e) {
        throw ConfigInvalidError(std::string("bad config field: ") + e.what());
    }
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["id"] = id;
    j["alphabet_size"] = alphabet_size;
    j["n"] = n;
    if (k_auto)
        j["k"] = "auto";
    else
        j["k"] = k;
    j["l"] = l;
    j["feas_eps"] = feas_eps;
    j["seed"] = seed;
    if (loss_kind == "matrix")
        j["loss"] = {{"matrix", loss_matrix}};
    else
        j["loss"] = loss_kind;
    {
        json s;
        s["kind"] = source.kind;
        if (!source.p.empty()) s["p"] = source.p;
        if (!source.transition.empty()) s["transition"] = source.transition;
        if (!source.initial.empty()) s["initial"] = source.initial;
        j["source"] = s;
    }
    j["true_channel"] = channel_spec_json(true_channel);
    {
        json u;
        u["kind"] = uncertainty.kind;
        if (!uncertainty.channels.empty()) {
            json arr = json::array();
            for (const auto& cs : uncertainty.channels) arr.push_back(channel_spec_json(cs));
            u["channels"] = arr;
        }
        if (uncertainty.kind == "bsc_interval") {
            u["lo"] = uncertainty.lo;
            u["hi"] = uncertainty.hi;
            u["eta"] = uncertainty.eta;
        }
        j["uncertainty_set"] = u;
    }
    j["apply_mode"] = apply_mode;
    j["exact_law"] = exact_law;
    j["io_format"] = io_format;
    j["out_dir"] = out_dir;
    j["threads"] = threads;
    if (!bounds_n.empty()) j["bounds_n"] = bounds_n;
    if (!bounds_k.empty()) j["bounds_k"] = bounds_k;
    if (!bounds_delta.empty()) j["bounds_delta"] = bounds_delta;
    if (!sweep_n.empty()) j["sweep_n"] = sweep_n;
    if (!sweep_k.empty()) j["sweep_k"] = sweep_k;
    j["gamma_step"] = gamma_step;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::resolved(std::uint64_t actual_n) const {
    ExperimentConfig r = *this;
    r.n = actual_n;
    if (r.k_auto) {
        r.k = default_window_order(static_cast<double>(actual_n), r.alphabet_size);
        r.k_auto = false;
    }
    if (r.l < 0) r.l = r.k;
    if (r.feas_eps < 0.0) r.feas_eps = default_feas_eps(r.alphabet_size, r.l, actual_n);
    if (r.threads < 1) r.threads = 1;
    return r;
}

LossMatrix ExperimentConfig::build_loss() const {
    if (loss_kind == "hamming") return hamming_loss(alphabet_size);
    if (loss_kind == "matrix") return LossMatrix(loss_matrix);
    throw ConfigInvalidError("unknown loss kind: " + loss_kind);
}

ApplyMode ExperimentConfig::build_apply_mode() const {
    if (apply_mode == "sample") return ApplyMode::sample;
    if (apply_mode == "map") return ApplyMode::map;
    if (apply_mode == "distribution") return ApplyMode::distribution;
    throw ConfigInvalidError("unknown apply mode: " + apply_mode);
}

SequenceFormat ExperimentConfig::build_format() const {
    if (io_format == "text") return SequenceFormat::text;
    if (io_format == "binary") return SequenceFormat::binary;
    throw ConfigInvalidError("unknown io format: " + io_format);
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

std::vector<SourceChannelPair> feasible_pairs(const ChannelSet& survivors,
                                              const ProbVector& out_marginal) {
    std::vector<SourceChannelPair> pairs;
    pairs.reserve(survivors.size());
    for (std::size_t i = 0; i < survivors.size(); ++i) {
        const Channel& ch = survivors.channel(i);
        ProbVector input = clamped_posterior(ch, out_marginal);
        pairs.push_back(SourceChannelPair{SourceModel::make_iid(std::move(input)), ch});
    }
    return pairs;
}

namespace {

std::string seq_file_name(const char* stem, SequenceFormat fmt) {
    return std::string(stem) + (fmt == SequenceFormat::text ? ".txt" : ".bin");
}

ProbVector empirical_marginal(const Sequence& z, int m) {
    return empirical_joint(z, m, 0).joint().data();
}

}  // namespace

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
    if (cfg.n == 0) throw ConfigInvalidError("simulate needs n > 0");
    ExperimentConfig r = cfg.resolved(cfg.n);
    SourceModel source = r.source.build();
    Channel ch = r.true_channel.build();
    if (source.m() != r.alphabet_size || ch.size() != r.alphabet_size)
        throw ConfigInvalidError("source or channel does not match alphabet_size");

    auto start = std::chrono::steady_clock::now();
    Sequence x = sample_source(source, r.n, r.seed);
    Sequence z = corrupt(x, ch, r.seed);

    SequenceFormat fmt = r.build_format();
    fs::path dir(r.out_dir);
    fs::create_directories(dir);
    fs::path clean = dir / seq_file_name("clean", fmt);
    fs::path noisy = dir / seq_file_name("noisy", fmt);
    write_sequence(clean, x, fmt);
    write_sequence(noisy, z, fmt);

    json manifest = json::parse(r.to_json_text());
    manifest["files"] = {{"clean", clean.string()}, {"noisy", noisy.string()}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

    log << "simulate: n=" << r.n << " seed=" << r.seed << " -> " << clean.string() << ", "
        << noisy.string() << " (" << fmt12(elapsed_s(start)) << " s)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// denoise
// ---------------------------------------------------------------------------

int cmd_denoise(const ExperimentConfig& cfg, const fs::path& noisy, std::ostream& log) {
    Sequence z = read_sequence(noisy, cfg.build_format(), cfg.alphabet_size);
    ExperimentConfig r = cfg.resolved(z.size());
    ChannelSet delta = r.uncertainty.build();
    LossMatrix loss = r.build_loss();

    auto start = std::chrono::steady_clock::now();
    DenoiseResult result = [&]() -> DenoiseResult {
        if (r.exact_law) {
            SourceChannelPair pair{r.source.build(), r.true_channel.build()};
            JointDistribution law_l = output_law(pair, 2 * r.l + 1);
            TrimmedSet trimmed = trim(delta, law_l, r.feas_eps, r.threads);
            JointDistribution law_k = output_law(pair, 2 * r.k + 1);
            MinimaxSolution sol = solve_minimax(law_k, trimmed.survivors, r.k, loss);
            Applied applied =
                apply_denoiser(sol.denoiser, z, r.build_apply_mode(), r.seed, r.threads);
            return DenoiseResult{std::move(applied.seq), std::move(applied.dist), std::move(sol),
                                 std::move(trimmed)};
        }
        PipelineConfig pcfg;
        pcfg.k = r.k;
        pcfg.l = r.l;
        pcfg.feas_eps = r.feas_eps;
        pcfg.apply_mode = r.build_apply_mode();
        pcfg.seed = r.seed;
        return denoise(z, delta, pcfg, loss, r.threads);
    }();
    double secs = elapsed_s(start);

    fs::path dir(r.out_dir);
    fs::create_directories(dir);
    if (r.build_apply_mode() == ApplyMode::distribution) {
        std::ostringstream csv;
        csv << "position";
        for (int a = 0; a < r.alphabet_size; ++a) csv << ",p" << a;
        csv << "\n";
        for (std::size_t i = 0; i < result.distribution.size(); ++i) {
            csv << i;
            for (double v : result.distribution[i]) csv << ',' << fmt12(v);
            csv << "\n";
        }
        write_text_file(dir / "distribution.csv", csv.str());
    } else {
        write_sequence(dir / seq_file_name("recon", r.build_format()), result.reconstruction,
                       r.build_format());
    }
    write_text_file(dir / "denoiser.json", denoiser_to_json(result.solution.denoiser) + "\n");

    json summary;
    summary["k"] = r.k;
    summary["l"] = r.l;
    summary["feas_eps"] = r.feas_eps;
    summary["seed"] = r.seed;
    summary["apply_mode"] = r.apply_mode;
    summary["exact_law"] = r.exact_law;
    summary["n"] = z.size();
    summary["solver"] = {{"value", result.solution.value},
                         {"status", result.solution.status},
                         {"iterations", result.solution.iterations},
                         {"active_channels", result.solution.active_channels}};
    if (result.trim_report)
        summary["trim"] = json::parse(result.trim_report->report_json(delta));
    summary["wall_time_s"] = secs;
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");

    log << "denoise: k=" << r.k << " l=" << r.l << " value=" << fmt12(result.solution.value)
        << " survivors="
        << (result.trim_report ? result.trim_report->survivors.size() : delta.size()) << "/"
        << delta.size() << " (" << fmt12(secs) << " s)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

namespace {

struct EvalTarget {
    std::string name;
    const WindowedDenoiser* denoiser = nullptr;  // or
    const Sequence* reconstruction = nullptr;
};

EvalReport evaluate_target(const EvalTarget& target, const Sequence& x, const Sequence& z,
                           const std::vector<SourceChannelPair>& pairs, double mu, int k,
                           const LossMatrix& loss, const ContextModel& law_ctx,
                           const ChannelSet& survivors) {
    EvalReport rep;
    rep.name = target.name;
    rep.mu = mu;
    if (target.denoiser) {
        rep.realized = realized_loss(x, z, *target.denoiser, loss);
        WorstCaseLoss wc = worst_case_loss(pairs, z, *target.denoiser, loss);
        rep.per_pair = wc.per_pair;
        rep.worst_case = wc.value;
        rep.argmax_index = wc.argmax_index;
        rep.objective = j_k_worst_case(law_ctx, survivors, *target.denoiser, loss).value;
    } else {
        rep.realized = realized_loss(x, *target.reconstruction, k, loss);
        WorstCaseLoss wc = worst_case_loss(pairs, z, *target.reconstruction, k, loss);
        rep.per_pair = wc.per_pair;
        rep.worst_case = wc.value;
        rep.argmax_index = wc.argmax_index;
        rep.objective = std::numeric_limits<double>::quiet_NaN();
    }
    rep.regret = rep.worst_case - mu;
    if (rep.regret < -1e-8)
        throw SolverFailureError("benchmark exceeded a candidate's worst case");
    return rep;
}

}  // namespace

int cmd_evaluate(const ExperimentConfig& cfg, const fs::path& clean, const fs::path& noisy,
                 const fs::path& input, bool input_is_denoiser, std::ostream& log) {
    SequenceFormat fmt = cfg.build_format();
    Sequence x = read_sequence(clean, fmt, cfg.alphabet_size);
    Sequence z = read_sequence(noisy, fmt, cfg.alphabet_size);
    if (x.size() != z.size()) throw LengthMismatchError("clean and noisy lengths differ");
    ExperimentConfig r = cfg.resolved(z.size());
    ChannelSet delta = r.uncertainty.build();
    LossMatrix loss = r.build_loss();

    auto start = std::chrono::steady_clock::now();

    // trim, then pair every survivor with its induced input law
    TrimmedSet trimmed = [&] {
        if (r.exact_law) {
            SourceChannelPair pair{r.source.build(), r.true_channel.build()};
            return trim(delta, output_law(pair, 2 * r.l + 1), r.feas_eps, r.threads);
        }
        return trim(delta, empirical_joint(z, r.alphabet_size, r.l, r.threads), r.feas_eps,
                    r.threads);
    }();
    ProbVector marginal =
        r.exact_law
            ? output_marginal(SourceChannelPair{r.source.build(), r.true_channel.build()})
            : empirical_marginal(z, r.alphabet_size);
    std::vector<SourceChannelPair> pairs = feasible_pairs(trimmed.survivors, marginal);

    ContextModel law_ctx =
        r.exact_law
            ? ContextModel::from(output_law(
                  SourceChannelPair{r.source.build(), r.true_channel.build()}, 2 * r.k + 1))
            : ContextModel::from(empirical_joint(z, r.alphabet_size, r.k, r.threads));

    BenchmarkResult bench = benchmark_mu(pairs, z, r.k, loss);

    WindowedDenoiser input_denoiser = WindowedDenoiser::uniform(r.alphabet_size, r.k);
    Sequence input_recon;
    std::vector<EvalTarget> targets;
    if (input_is_denoiser) {
        input_denoiser = denoiser_from_json(read_text_file(input));
        targets.push_back({"input_denoiser", &input_denoiser, nullptr});
    } else {
        input_recon = read_sequence(input, fmt, r.alphabet_size);
        targets.push_back({"reconstruction", nullptr, &input_recon});
    }
    WindowedDenoiser f_swys = WindowedDenoiser::say_what_you_see(r.alphabet_size, r.k);
    WindowedDenoiser f_zero = WindowedDenoiser::constant(r.alphabet_size, r.k, 0);
    targets.push_back({"say_what_you_see", &f_swys, nullptr});
    targets.push_back({"say_all_zeros", &f_zero, nullptr});

    std::vector<EvalReport> reports;
    for (const auto& t : targets)
        reports.push_back(evaluate_target(t, x, z, pairs, bench.value, r.k, loss, law_ctx,
                                          trimmed.survivors));
    double secs = elapsed_s(start);

    fs::path dir(r.out_dir);
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "experiment,n,k,l,denoiser,realized_loss,worst_case_loss,benchmark_mu,regret,"
           "solver_value,wall_time_s\n";
    for (const auto& rep : reports) {
        csv << r.id << ',' << z.size() << ',' << r.k << ',' << r.l << ',' << rep.name << ','
            << fmt12(rep.realized) << ',' << fmt12(rep.worst_case) << ',' << fmt12(rep.mu) << ','
            << fmt12(rep.regret) << ',' << (std::isnan(rep.objective) ? "" : fmt12(rep.objective))
            << ',' << fmt12(secs) << "\n";
    }
    write_text_file(dir / "results.csv", csv.str());

    json jreports = json::array();
    for (const auto& rep : reports) jreports.push_back(json::parse(rep.to_json()));
    json out;
    out["pairs"] = [&] {
        json arr = json::array();
        for (std::size_t i = 0; i < pairs.size(); ++i)
            arr.push_back({{"label", trimmed.survivors.label(i)},
                           {"input_law", pairs[i].source.iid_p}});
        return arr;
    }();
    out["benchmark_mu"] = bench.value;
    out["reports"] = jreports;
    write_text_file(dir / "report.json", out.dump(2) + "\n");

    for (const auto& rep : reports)
        log << "evaluate: " << rep.name << " realized=" << fmt12(rep.realized)
            << " worst=" << fmt12(rep.worst_case) << " mu=" << fmt12(rep.mu)
            << " regret=" << fmt12(rep.regret) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// example1
// ---------------------------------------------------------------------------

int cmd_example1(const fs::path& out_dir, std::ostream& log) {
    auto start = std::chrono::steady_clock::now();
    JointDistribution q(2, 1, {0.75, 0.25});
    ChannelSet delta({bsc(0.1), bsc(0.2)}, {"bsc_0.1", "bsc_0.2"});
    LossMatrix loss = hamming_loss(2);

    struct Row {
        std::string metric;
        double value;
        double expected;
        double tol;
        bool pass;
    };
    std::vector<Row> rows;
    auto check = [&](const std::string& metric, double value, double expected, double tol) {
        rows.push_back({metric, value, expected, tol, std::abs(value - expected) <= tol});
    };

    check("alpha_bsc_0.1", induced_input(delta.channel(0), q)[1], 0.15 / 0.8, 1e-9);
    check("alpha_bsc_0.2", induced_input(delta.channel(1), q)[1], 0.05 / 0.6, 1e-9);

    WindowedDenoiser f1 = WindowedDenoiser::say_what_you_see(2, 0);
    WindowedDenoiser f2 = WindowedDenoiser::constant(2, 0, 0);
    check("worst_loss_say_what_you_see", j_k_worst_case(q, delta, f1, loss).value, 0.2, 1e-9);
    check("worst_loss_say_all_zeros", j_k_worst_case(q, delta, f2, loss).value, 0.1875, 1e-9);

    MinimaxSolution sol = solve_minimax(q, delta, 0, loss);
    double d0 = sol.denoiser.at(0)[1];
    double d1 = sol.denoiser.at(1)[1];
    check("minimax_value", sol.value, 0.1428, 5e-4);
    check("gamma_star", d1, 0.5101, 5e-3);
    check("d0", d0, 0.0, 1e-6);

    WindowedDenoiser mix = WindowedDenoiser::mixture(f1, f2, d1);
    check("mixture_loss_at_gamma_star", j_k_worst_case(q, delta, mix, loss).value, sol.value,
          1e-9);

    bool all_pass = true;
    std::ostringstream csv;
    csv << "metric,value,expected,tolerance,pass\n";
    for (const auto& row : rows) {
        all_pass = all_pass && row.pass;
        csv << row.metric << ',' << fmt12(row.value) << ',' << fmt12(row.expected) << ','
            << fmt12(row.tol) << ',' << (row.pass ? "PASS" : "FAIL") << "\n";
        log << (row.pass ? "PASS " : "FAIL ") << row.metric << " = " << fmt12(row.value)
            << " (expected " << fmt12(row.expected) << " +- " << fmt12(row.tol) << ")\n";
    }
    log << (all_pass ? "example1: all checks passed" : "example1: CHECKS FAILED") << " ("
        << fmt12(elapsed_s(start)) << " s)\n";

    fs::create_directories(out_dir);
    write_text_file(out_dir / "example1.csv", csv.str());
    return all_pass ? 0 : 4;
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

int cmd_bounds(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<std::uint64_t> ns =
        cfg.bounds_n.empty() ? std::vector<std::uint64_t>{1000, 10000, 100000, 1000000}
                             : cfg.bounds_n;
    std::vector<int> ks = cfg.bounds_k.empty() ? std::vector<int>{0, 1} : cfg.bounds_k;
    std::vector<double> deltas =
        cfg.bounds_delta.empty() ? std::vector<double>{0.05, 0.1, 0.2} : cfg.bounds_delta;

    ChannelSet delta_set = cfg.uncertainty.channels.empty() && cfg.uncertainty.kind == "list"
                               ? ChannelSet({bsc(0.1), bsc(0.2)}, {"bsc_0.1", "bsc_0.2"})
                               : cfg.uncertainty.build();
    LossMatrix loss = cfg.build_loss();
    double inv_norm = delta_set.max_inv_norm();
    int set_size = static_cast<int>(delta_set.size());

    std::ostringstream csv;
    csv << "n,k,delta,lemma1,lemma2,lemma4\n";
    for (std::uint64_t n : ns)
        for (int k : ks)
            for (double d : deltas) {
                csv << n << ',' << k << ',' << fmt12(d) << ','
                    << fmt12(lemma1_bound(n, k, d, loss, inv_norm)) << ','
                    << fmt12(lemma2_bound(n, k, d, loss, inv_norm)) << ','
                    << fmt12(lemma4_bound(n, k, d, loss, inv_norm, set_size)) << "\n";
            }
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    write_text_file(dir / "bounds.csv", csv.str());
    log << "bounds: wrote " << (dir / "bounds.csv").string() << " (" << ns.size() * ks.size() *
        deltas.size() << " rows, inv_norm=" << fmt12(inv_norm) << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int cmd_sweep(const ExperimentConfig& cfg, const std::string& axis, std::ostream& log) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    LossMatrix loss = cfg.build_loss();

    if (axis == "gamma") {
        SourceChannelPair pair{cfg.source.build(), cfg.true_channel.build()};
        ChannelSet delta = cfg.uncertainty.build();
        JointDistribution law = output_law(pair, 1);
        WindowedDenoiser f1 = WindowedDenoiser::say_what_you_see(cfg.alphabet_size, 0);
        WindowedDenoiser f2 = WindowedDenoiser::constant(cfg.alphabet_size, 0, 0);
        std::ostringstream csv;
        csv << "gamma,worst_loss\n";
        for (double g = 0.0; g <= 1.0 + 1e-12; g += cfg.gamma_step) {
            double gamma = std::min(g, 1.0);
            WindowedDenoiser mix = WindowedDenoiser::mixture(f1, f2, gamma);
            csv << fmt12(gamma) << ','
                << fmt12(j_k_worst_case(law, delta, mix, loss).value) << "\n";
        }
        write_text_file(dir / "sweep_gamma.csv", csv.str());
        log << "sweep gamma: wrote " << (dir / "sweep_gamma.csv").string() << "\n";
        return 0;
    }

    if (axis != "n" && axis != "k") throw ConfigInvalidError("sweep axis must be gamma, n, or k");

    std::vector<std::uint64_t> ns = axis == "n"
                                        ? (cfg.sweep_n.empty()
                                               ? std::vector<std::uint64_t>{1000, 10000, 100000}
                                               : cfg.sweep_n)
                                        : std::vector<std::uint64_t>{cfg.n ? cfg.n : 10000};
    std::vector<int> ks = axis == "k"
                              ? (cfg.sweep_k.empty() ? std::vector<int>{0, 1, 2} : cfg.sweep_k)
                              : std::vector<int>{};

    SourceModel source = cfg.source.build();
    Channel true_ch = cfg.true_channel.build();
    ChannelSet delta = cfg.uncertainty.build();

    std::ostringstream csv;
    csv << "axis_value,n,k,l,realized_loss,worst_case_loss,benchmark_mu,regret,solver_value\n";
    auto run_point = [&](std::uint64_t n, int k_override) {
        ExperimentConfig r = cfg;
        if (k_override >= 0) {
            r.k_auto = false;
            r.k = k_override;
            r.l = -1;
        }
        r = r.resolved(n);
        Sequence x = sample_source(source, n, r.seed);
        Sequence z = corrupt(x, true_ch, r.seed);
        PipelineConfig pcfg;
        pcfg.k = r.k;
        pcfg.l = r.l;
        pcfg.feas_eps = r.feas_eps;
        pcfg.apply_mode = ApplyMode::map;
        pcfg.seed = r.seed;
        DenoiseResult res = denoise(z, delta, pcfg, loss, r.threads);
        std::vector<SourceChannelPair> pairs =
            feasible_pairs(res.trim_report->survivors, empirical_marginal(z, r.alphabet_size));
        double realized = realized_loss(x, z, res.solution.denoiser, loss);
        WorstCaseLoss wc = worst_case_loss(pairs, z, res.solution.denoiser, loss);
        BenchmarkResult bench = benchmark_mu(pairs, z, r.k, loss);
        csv << (axis == "n" ? std::to_string(n) : std::to_string(r.k)) << ',' << n << ',' << r.k
            << ',' << r.l << ',' << fmt12(realized) << ',' << fmt12(wc.value) << ','
            << fmt12(bench.value) << ',' << fmt12(wc.value - bench.value) << ','
            << fmt12(res.solution.value) << "\n";
    };
    if (axis == "n")
        for (std::uint64_t n : ns) run_point(n, -1);
    else
        for (int k : ks) run_point(ns.front(), k);

    fs::path file = dir / ("sweep_" + axis + ".csv");
    write_text_file(file, csv.str());
    log << "sweep " << axis << ": wrote " << file.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// feasibility
// ---------------------------------------------------------------------------

int cmd_feasibility(const ExperimentConfig& cfg, const std::optional<fs::path>& noisy,
                    std::ostream& log) {
    ChannelSet delta = cfg.uncertainty.build();
    TrimmedSet trimmed = [&] {
        if (cfg.exact_law || !noisy) {
            SourceChannelPair pair{cfg.source.build(), cfg.true_channel.build()};
            ExperimentConfig r = cfg.resolved(cfg.n ? cfg.n : 100000);
            return trim(delta, output_law(pair, 2 * r.l + 1), r.feas_eps, r.threads);
        }
        Sequence z = read_sequence(*noisy, cfg.build_format(), cfg.alphabet_size);
        ExperimentConfig r = cfg.resolved(z.size());
        return trim(delta, empirical_joint(z, r.alphabet_size, r.l, r.threads), r.feas_eps,
                    r.threads);
    }();

    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    write_text_file(dir / "feasibility.json", trimmed.report_json(delta) + "\n");
    for (const auto& v : trimmed.verdicts)
        log << "feasibility: " << delta.label(static_cast<std::size_t>(v.channel_index))
            << " min_entry=" << fmt12(v.min_entry) << (v.feasible ? " feasible" : " infeasible")
            << "\n";
    if (trimmed.fallback) log << "feasibility: no channel passed, fallback kept best scorer\n";
    return 0;
}

}  // namespace mmd
