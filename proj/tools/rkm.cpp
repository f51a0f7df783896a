#include "rkm/config.hpp"
#include "rkm/error.hpp"
#include "rkm/experiment.hpp"
#include "rkm/report_json.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace rkm;

namespace {

struct CommonFlags {
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string scheme;
    std::string format = "csv";
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool withOutputFlags) {
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--seed", f.seed, "Override the master seed");
    if (withOutputFlags) {
        cmd->add_option("--scheme", f.scheme, "Integration scheme")->check(CLI::IsMember({"davie", "heun"}));
        cmd->add_option("--format", f.format, "Trajectory format")->check(CLI::IsMember({"csv", "json"}));
    }
}

experiment::RunOptions run_options(const CommonFlags& f) {
    experiment::RunOptions o;
    o.seedOverride = f.seed;
    if (!f.scheme.empty()) o.schemeOverride = integrator::scheme_from_string(f.scheme);
    o.format = experiment::format_from_string(f.format);
    o.jobs = f.jobs;
    return o;
}

void emit(const report::Json& rep, const CommonFlags& f, const std::string& name) {
    if (!f.out.empty()) {
        fs::create_directories(f.out);
        experiment::write_text(fs::path(f.out) / name, rep.dump(2) + "\n");
    }
    std::cout << rep.dump(2) << "\n";
}

int simulate(const std::string& file, const CommonFlags& f) {
    const auto kv = config::load_key_values(file);
    const fs::path dir = f.out.empty() ? fs::path("rkm_out") : fs::path(f.out);
    const auto rep = experiment::run_point(kv, dir, run_options(f));
    std::cout << rep.dump(2) << "\n";
    std::cerr << "artifacts written to " << dir.string() << "\n";
    return 0;
}

int sweep(const std::string& file, const CommonFlags& f) {
    const auto plan = config::plan_from_key_values(config::load_key_values(file));
    const fs::path dir = f.out.empty() ? fs::path("rkm_sweep") : fs::path(f.out);
    const auto result = experiment::run_plan(plan, dir, run_options(f));
    std::cout << result.summary.dump(2) << "\n";
    for (const auto& r : result.runs) {
        if (r.status != "ok") std::cerr << r.dir << ": " << r.error << "\n";
    }
    return result.allOk ? 0 : 1;
}

int rate_bound(const std::string& file, const CommonFlags& f) {
    auto kv = config::load_key_values(file);
    if (f.seed) kv["seed"] = std::to_string(*f.seed);
    kv["scenario"] = "rateBound";
    emit(experiment::rate_bound_report(config::settings_from_key_values(kv)), f, "rate_bound.json");
    return 0;
}

int graph_info(const std::string& arg, const CommonFlags& f) {
    const graph::SignedGraph g = fs::is_regular_file(arg) ? graph::load_edge_list(arg) : graph::from_spec(arg);
    emit(report::graph_info(g), f, "graph_info.json");
    return 0;
}

int fbm_test(const std::string& file, const CommonFlags& f) {
    auto kv = config::load_key_values(file);
    kv.erase("scenario");
    if (f.seed) kv["seed"] = std::to_string(*f.seed);
    emit(experiment::fbm_test_report(kv), f, "fbm_test.json");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rough Kuramoto simulator and diagnostics"};
    app.require_subcommand(1);

    std::string input;
    CommonFlags flags;

    auto* sim = app.add_subcommand("simulate", "Run one configuration and write its artifacts");
    sim->add_option("config", input, "Configuration file")->required();
    add_common(sim, flags, true);

    auto* sw = app.add_subcommand("sweep", "Run every point of an experiment plan");
    sw->add_option("plan", input, "Plan file")->required();
    add_common(sw, flags, true);
    sw->add_option("--jobs", flags.jobs, "Worker threads (0 = hardware concurrency)");

    auto* rb = app.add_subcommand("rate-bound", "Hypotheses, E N estimate, rate bound and basin radius");
    rb->add_option("config", input, "Configuration file")->required();
    add_common(rb, flags, false);

    auto* gi = app.add_subcommand("graph-info", "Spectrum, balance and Cheeger bounds of a graph");
    gi->add_option("graph", input, "Edge-list file or family spec such as complete:10")->required();
    gi->add_option("--out", flags.out, "Output directory");

    auto* fb = app.add_subcommand("fbm-test", "Variance and Kolmogorov moment checks of the fBm sampler");
    fb->add_option("spec", input, "Key-value file (hurst, m, steps, samples, p, seed)")->required();
    add_common(fb, flags, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return simulate(input, flags);
        if (sw->parsed()) return sweep(input, flags);
        if (rb->parsed()) return rate_bound(input, flags);
        if (gi->parsed()) return graph_info(input, flags);
        if (fb->parsed()) return fbm_test(input, flags);
    } catch (const IntegrationAborted& e) {
        std::cerr << "integration aborted at step " << e.lastValidIndex() << ": " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
