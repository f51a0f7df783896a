#pragma once

// Flat key=value configuration files and experiment plans.

#include "rkm/integrator.hpp"
#include "rkm/model.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rkm::config {

using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines; '#' starts a comment; blank lines are ignored.
/// Duplicate keys are rejected.
KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::filesystem::path& file);

enum class InitKind { spread, interval, list };

/// Everything needed to run one simulation besides the driver.
struct RunSettings {
    model::SystemConfig cfg;
    InitKind initKind = InitKind::spread;
    double initSpread = 0.9;  // phases uniform on [0, spread * π]
    double initLo = 0.0;
    double initHi = 0.0;
    std::vector<double> initList;
    integrator::Scheme scheme = integrator::Scheme::davie;
    bool withFrequencies = false;
    double cp = 1.0;
    double p = 3.0;
    double tailFraction = 0.5;
    int trials = 100;  // Monte Carlo trials for E N
    std::string scenario = "sync";
};

/// Builds settings from keys K, N, sigma, nTilde, hurst, m, identicalComponents,
/// dt, T, seed, delta, graph.kind / graph.file, noiseGraph.kind /
/// noiseGraph.file, noiseKind, freqs (list), freqs.identical, freqs.uniform
/// (lo,hi, drawn per seed), init.spread, init.interval (lo,hi), init.list,
/// scheme, frequencies, cp, p, tailFraction, trials, scenario. Unknown keys are
/// rejected. When K is absent it is 1 for all-to-all coupling and N otherwise.
RunSettings settings_from_key_values(const KeyValues& kv);

/// Initial phases for the settings (random kinds draw from cfg.seed).
Eigen::VectorXd initial_phases(const RunSettings& s);

/// Graph from a bare family name sized by N ("complete", "cycle", "path",
/// "empty", "twoCommunity", "kNeighbor" with graph.k) or a full family spec.
graph::SignedGraph graph_from_keys(const KeyValues& kv, const std::string& prefix, int n);

struct ExperimentPlan {
    KeyValues base;
    std::string scenario = "sync";
    /// Swept keys (sorted by name) with their values.
    std::vector<std::pair<std::string, std::vector<std::string>>> sweeps;
};

/// Plan keys: anything accepted by settings_from_key_values plus
/// sweep.<key> = v1,v2,... or a..b (inclusive integer range). List-valued
/// keys (freqs, freqs.uniform, init.list, init.interval) separate sweep
/// values with ';'.
ExperimentPlan plan_from_key_values(const KeyValues& kv);

/// Cartesian product of the sweeps applied to the base keys (one entry when
/// there are no sweeps).
std::vector<KeyValues> expand_plan(const ExperimentPlan& plan);

std::vector<double> parse_double_list(const std::string& s);

}  // namespace rkm::config
