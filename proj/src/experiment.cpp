#include "rkm/experiment.hpp"

#include "rkm/diagnostics.hpp"
#include "rkm/error.hpp"
#include "rkm/rng.hpp"
#include "rkm/svg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

namespace rkm::experiment {

using report::Json;

const std::vector<std::string>& scenarios() {
    static const std::vector<std::string> names{"sync",       "splitting", "nonRotInv", "frequencies",
                                                "hyperplane", "rateBound", "fbmTest",   "graphInfo"};
    return names;
}

TrajectoryFormat format_from_string(const std::string& s) {
    if (s == "csv") return TrajectoryFormat::csv;
    if (s == "json") return TrajectoryFormat::json;
    throw ParameterError("unknown format '" + s + "' (expected csv or json)");
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ParameterError("cannot write " + file.string());
    out << text;
    if (!out) throw ParameterError("failed writing " + file.string());
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<double> column(const Eigen::MatrixXd& m, int j) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index k = 0; k < m.rows(); ++k) out[static_cast<std::size_t>(k)] = m(k, j);
    return out;
}

void write_trajectory(const integrator::Trajectory& traj, const std::filesystem::path& dir, TrajectoryFormat f) {
    if (f == TrajectoryFormat::csv) {
        std::ostringstream out;
        integrator::write_trajectory_csv(traj, out);
        write_text(dir / "trajectory.csv", out.str());
        return;
    }
    Json j;
    j["t"] = to_vec(traj.times);
    Json theta = Json::array();
    for (int k = 0; k <= traj.steps(); ++k) theta.push_back(to_vec(traj.theta.row(k).transpose()));
    j["theta"] = std::move(theta);
    if (traj.varpi) {
        Json varpi = Json::array();
        for (int k = 0; k <= traj.steps(); ++k) varpi.push_back(to_vec(traj.varpi->row(k).transpose()));
        j["varpi"] = std::move(varpi);
    }
    write_text(dir / "trajectory.json", j.dump() + "\n");
}

svg::Chart phase_chart(const integrator::Trajectory& traj, const std::string& title) {
    svg::Chart c{title, "t", "theta_i(t)", {}, traj.N() <= 10};
    const auto t = to_vec(traj.times);
    for (int i = 0; i < traj.N(); ++i) c.series.push_back({"theta_" + std::to_string(i), t, column(traj.theta, i)});
    return c;
}

svg::Chart order_chart(const integrator::Trajectory& traj) {
    const auto op = diagnostics::order_parameter(traj);
    return {"Order parameter", "t", "r(t)", {{"r", to_vec(traj.times), to_vec(op.r)}}, false};
}

svg::Chart decay_chart(const integrator::Trajectory& traj, const std::optional<diagnostics::DecayFit>& fit) {
    const Eigen::VectorXd norms = diagnostics::deviation_norms(traj.theta);
    std::vector<double> t, y;
    for (int k = 0; k <= traj.steps(); ++k) {
        if (norms(k) >= diagnostics::kNormFloor) {
            t.push_back(traj.times(k));
            y.push_back(std::log10(norms(k)));
        }
    }
    svg::Chart c{"Deviation from the mean phase", "t", "log10 |theta_hat|", {{"|theta_hat|", t, y}}, true};
    if (fit && !t.empty()) {
        // Fitted line through the tail centroid.
        double sx = 0, sy = 0;
        int n = 0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t[k] >= fit->tLo) {
                sx += t[k];
                sy += y[k];
                ++n;
            }
        }
        if (n > 0) {
            const double cx = sx / n, cy = sy / n;
            const double slope = -fit->rate / std::log(10.0);
            c.series.push_back({"fit", {fit->tLo, fit->tHi},
                                {cy + slope * (fit->tLo - cx), cy + slope * (fit->tHi - cx)}, true});
        }
    }
    return c;
}

Json summarize_windows(const diagnostics::DistributionalFrequencies& df) {
    Json out = Json::array();
    for (const auto& s : df.smoothed) {
        const Eigen::RowVectorXd last = s.frequencies.bottomRows(1);
        out.push_back(Json{{"window", s.window},
                           {"span", s.span},
                           {"terminalMean", last.mean()},
                           {"terminalSpread", last.maxCoeff() - last.minCoeff()},
                           {"meanSeriesRange", {s.mean.minCoeff(), s.mean.maxCoeff()}}});
    }
    return out;
}

Json run_trajectory_scenario(const config::RunSettings& s, const std::filesystem::path& dir,
                             const RunOptions& opts) {
    const model::SystemConfig& cfg = s.cfg;
    const noise::RoughDriver driver = noise::sample_driver(cfg.fbm_spec());
    const Eigen::VectorXd theta0 = config::initial_phases(s);
    integrator::IntegrateOptions io;
    io.scheme = s.scheme;
    io.withFrequencies = s.withFrequencies;
    const integrator::Trajectory traj = integrator::integrate(cfg, driver, theta0, io);
    const diagnostics::SyncReport sync = diagnostics::sync_report(traj, cfg, &driver, s.tailFraction);

    Json rep;
    rep["scenario"] = s.scenario;
    rep["config"] = report::config_json(cfg);
    rep["scheme"] = integrator::to_string(s.scheme);
    rep["initialPhases"] = to_vec(theta0);
    rep["hypotheses"] = report::to_json(model::validate_hypotheses(cfg));
    rep["sync"] = report::to_json(sync);
    rep["terminalOrderParameter"] = diagnostics::order_parameter(traj.theta.bottomRows(1)).r(0);
    bool success = sync.verdicts.at("synchronized");

    std::vector<svg::Chart> panels{phase_chart(traj, "Phases"), order_chart(traj), decay_chart(traj, sync.fit)};

    if (s.scenario == "splitting") {
        const auto part = graph::balance_partition(cfg.graph);
        if (!part) throw Refusal("splitting scenario needs a balanced coupling graph");
        const auto split = diagnostics::splitting_check(traj, *part);
        const model::SystemConfig switched = model::switched_config(cfg, *part);
        const integrator::Trajectory other =
            integrator::integrate(switched, driver, model::switching_transform(theta0, *part), io);
        double err = 0.0;
        for (int k = 0; k <= traj.steps(); ++k) {
            const Eigen::VectorXd back = model::switching_inverse(other.theta.row(k).transpose(), *part);
            err = std::max(err, (back - traj.theta.row(k).transpose()).cwiseAbs().maxCoeff());
        }
        rep["partition"] = part->side;
        rep["splitting"] = report::to_json(split);
        rep["equivarianceError"] = err;
        success = split.verdict;
    } else if (s.scenario == "frequencies") {
        const auto freq = diagnostics::frequency_sync_check(traj, cfg, s.tailFraction);
        const auto df = diagnostics::distributional_frequencies(traj);
        rep["frequency"] = report::to_json(freq);
        rep["smoothedFrequencies"] = summarize_windows(df);
        success = freq.verdict;
        svg::Chart fc{"Frequency system", "t", "varpi_i(t)", {}, traj.N() <= 10};
        for (int i = 0; i < traj.N(); ++i) {
            fc.series.push_back({"varpi_" + std::to_string(i), to_vec(traj.times), column(*traj.varpi, i)});
        }
        std::vector<svg::Chart> fpanels{fc};
        for (const auto& w : df.smoothed) {
            char title[64];
            std::snprintf(title, sizeof title, "Finite-difference frequencies, smoothing %g", w.window);
            svg::Chart c{title, "t", "dtheta/dt", {}, false};
            for (int i = 0; i < traj.N(); ++i) c.series.push_back({"", to_vec(w.times), column(w.frequencies, i)});
            c.series.push_back({"mean", to_vec(w.times), to_vec(w.mean), true});
            fpanels.push_back(std::move(c));
        }
        write_text(dir / "frequencies.svg", svg::render(fpanels));
    } else if (s.scenario == "hyperplane") {
        success = sync.verdicts.at("conserved");
        if (traj.N() >= 3) {
            std::vector<svg::Chart> hp;
            hp.push_back({"Projection (theta_0, theta_1)", "theta_0", "theta_1",
                          {{"trajectory", column(traj.theta, 0), column(traj.theta, 1)}}, false});
            hp.push_back({"Projection (theta_1, theta_2)", "theta_1", "theta_2",
                          {{"trajectory", column(traj.theta, 1), column(traj.theta, 2)}}, false});
            write_text(dir / "hyperplane.svg", svg::render(hp));
        }
    }
    rep["success"] = success;
    write_trajectory(traj, dir, opts.format);
    write_text(dir / "phases.svg", svg::render(panels));
    return rep;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * (static_cast<double>(v.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Json stats(const std::vector<double>& v) {
    if (v.empty()) return Json{{"count", 0}, {"median", nullptr}, {"q25", nullptr}, {"q75", nullptr}, {"iqr", nullptr}};
    const double q25 = quantile(v, 0.25);
    const double q75 = quantile(v, 0.75);
    return Json{{"count", v.size()}, {"median", quantile(v, 0.5)}, {"q25", q25}, {"q75", q75}, {"iqr", q75 - q25}};
}

}  // namespace

report::Json rate_bound_report(const config::RunSettings& s) {
    const model::SystemConfig& cfg = s.cfg;
    const roughpath::PVarParams params{s.p};
    noise::FbmSpec unit = cfg.fbm_spec();
    unit.steps = static_cast<int>(std::lround(1.0 / cfg.dt));
    if (std::abs(unit.steps * cfg.dt - 1.0) > 1e-9) throw ParameterError("rate-bound needs dt dividing 1");
    const double gamma = 1.0 / (16.0 * s.cp);
    const auto en = roughpath::estimate_EN(unit, gamma, params, s.trials);
    const auto bound = diagnostics::rate_bound(cfg, en.mean, s.cp);

    Json rep;
    rep["scenario"] = "rateBound";
    rep["config"] = report::config_json(cfg);
    rep["p"] = s.p;
    rep["hypotheses"] = report::to_json(model::validate_hypotheses(cfg));
    rep["expectedGreedyCount"] = report::to_json(en);
    rep["rateBound"] = report::to_json(bound);

    const int nMax = std::max(1, static_cast<int>(std::floor(cfg.T + 1e-9)));
    noise::FbmSpec horizon = cfg.fbm_spec();
    horizon.steps = nMax * unit.steps;
    const noise::RoughDriver driver = noise::sample_driver(horizon);
    const double lambda = 0.5;
    const double eps = cfg.delta / 2.0;
    Json basin = report::to_json(diagnostics::basin_radius_truncated(cfg, driver, eps, nMax, lambda, s.cp, params));
    basin["lambda"] = lambda;
    basin["eps"] = eps;
    rep["basin"] = basin;
    rep["success"] = bound.positive;
    return rep;
}

report::Json fbm_test_report(const config::KeyValues& kv) {
    static const std::vector<std::string> allowed{"hurst", "m", "steps", "samples", "p", "seed",
                                                  "identicalComponents", "scenario"};
    for (const auto& [k, v] : kv) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
            throw ParameterError("unknown fbm-test key '" + k + "'");
        }
    }
    auto get = [&](const std::string& k, const std::string& fallback) {
        const auto it = kv.find(k);
        return it != kv.end() ? it->second : fallback;
    };
    noise::FbmSpec spec;
    spec.hurst = std::stod(get("hurst", "0.5"));
    spec.m = std::stoi(get("m", "1"));
    spec.steps = std::stoi(get("steps", "256"));
    spec.dt = 1.0 / spec.steps;
    spec.seed = std::stoull(get("seed", "0"));
    spec.identicalComponents = get("identicalComponents", "false") == "true";
    const int samples = std::stoi(get("samples", "1000"));
    const double p = std::stod(get("p", "4"));
    spec.validate();

    Json rep;
    rep["scenario"] = "fbmTest";
    rep["spec"] = Json{{"hurst", spec.hurst}, {"m", spec.m}, {"steps", spec.steps}, {"seed", spec.seed},
                       {"identicalComponents", spec.identicalComponents}, {"samples", samples}};
    const auto kol = noise::kolmogorov_check(spec, p, samples);
    rep["kolmogorov"] = report::to_json(kol);

    // Var(W_t) against t^{2H}, first component.
    const std::vector<double> times{0.25, 0.5, 1.0};
    std::vector<double> sum(times.size(), 0.0), sum2(times.size(), 0.0);
    for (int s = 0; s < samples; ++s) {
        noise::FbmSpec one = spec;
        one.seed = derive_seed(spec.seed, seed_purpose::kSampling, static_cast<std::uint64_t>(s));
        const Eigen::MatrixXd w = noise::sample_fbm(one);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double x = w(static_cast<int>(std::lround(times[k] * spec.steps)), 0);
            sum[k] += x;
            sum2[k] += x * x;
        }
    }
    Json var = Json::array();
    bool allWithin = true;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double mean = sum[k] / samples;
        const double v = (sum2[k] - samples * mean * mean) / (samples - 1);
        const double expected = std::pow(times[k], 2.0 * spec.hurst);
        const double se = expected * std::sqrt(2.0 / (samples - 1));
        const bool ok = std::abs(v - expected) <= 3.0 * se;
        allWithin = allWithin && ok;
        var.push_back(Json{{"t", times[k]}, {"empirical", v}, {"expected", expected}, {"standardError", se},
                           {"within3se", ok}});
    }
    rep["variance"] = var;
    rep["success"] = allWithin && kol.pass;
    return rep;
}

report::Json run_point(const config::KeyValues& kvIn, const std::filesystem::path& dir, const RunOptions& opts) {
    config::KeyValues kv = kvIn;
    if (opts.seedOverride) kv["seed"] = std::to_string(*opts.seedOverride);
    if (opts.schemeOverride) kv["scheme"] = integrator::to_string(*opts.schemeOverride);
    const std::string scenario = kv.count("scenario") ? kv.at("scenario") : "sync";
    if (std::find(scenarios().begin(), scenarios().end(), scenario) == scenarios().end()) {
        throw ParameterError("unknown scenario '" + scenario + "'");
    }
    std::filesystem::create_directories(dir);
    Json rep;
    if (scenario == "fbmTest") {
        kv.erase("scheme");
        rep = fbm_test_report(kv);
    } else if (scenario == "graphInfo") {
        const int n = kv.count("N") ? std::stoi(kv.at("N")) : 0;
        rep["scenario"] = scenario;
        rep["graph"] = report::graph_info(config::graph_from_keys(kv, "graph", n));
        rep["success"] = true;
    } else {
        const config::RunSettings s = config::settings_from_key_values(kv);
        rep = scenario == "rateBound" ? rate_bound_report(s) : run_trajectory_scenario(s, dir, opts);
    }
    write_text(dir / "report.json", rep.dump(2) + "\n");
    return rep;
}

report::Json seed_sweep_summary(const std::vector<RunRecord>& runs) {
    int succeeded = 0;
    int completed = 0;
    std::vector<double> rates, deviations;
    for (const auto& r : runs) {
        if (r.status != "ok") continue;
        ++completed;
        if (r.report.value("success", false)) ++succeeded;
        if (r.report.contains("sync")) {
            const Json& s = r.report["sync"];
            if (s["fittedRate"].is_number()) rates.push_back(s["fittedRate"].get<double>());
            deviations.push_back(s["terminalDeviation"].get<double>());
        }
    }
    const auto total = static_cast<double>(runs.size());
    return Json{{"runs", runs.size()},
                {"completed", completed},
                {"succeeded", succeeded},
                {"successFraction", runs.empty() ? 0.0 : succeeded / total},
                {"fittedRate", stats(rates)},
                {"terminalDeviation", stats(deviations)}};
}

SweepResult run_plan(const config::ExperimentPlan& plan, const std::filesystem::path& outDir, const RunOptions& opts) {
    const std::vector<config::KeyValues> points = config::expand_plan(plan);
    std::filesystem::create_directories(outDir);
    SweepResult result;
    result.runs.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "run_%04zu", i);
        result.runs[i].index = static_cast<int>(i);
        result.runs[i].params = points[i];
        result.runs[i].dir = name;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            RunRecord& rec = result.runs[i];
            try {
                rec.report = run_point(points[i], outDir / rec.dir, opts);
                rec.status = "ok";
            } catch (const std::exception& e) {
                rec.status = "failed";
                rec.error = e.what();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t jobs = std::min<std::size_t>(points.size(), opts.jobs > 0 ? opts.jobs : hw);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
        worker();
    }

    Json runs = Json::array();
    for (const auto& r : result.runs) {
        Json params = Json::object();
        for (const auto& [k, v] : r.params) params[k] = v;
        Json entry{{"index", r.index}, {"dir", r.dir}, {"status", r.status}, {"params", params}};
        if (r.status == "failed") {
            entry["error"] = r.error;
            result.allOk = false;
        } else {
            entry["success"] = r.report.value("success", false);
        }
        runs.push_back(std::move(entry));
    }
    Json sweeps = Json::object();
    for (const auto& [k, v] : plan.sweeps) sweeps[k] = v;
    result.index = Json{{"scenario", plan.scenario}, {"sweeps", sweeps}, {"runs", runs}};
    result.summary = seed_sweep_summary(result.runs);
    write_text(outDir / "index.json", result.index.dump(2) + "\n");
    write_text(outDir / "summary.json", result.summary.dump(2) + "\n");
    return result;
}

}  // namespace rkm::experiment
