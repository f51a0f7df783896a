#include "rkm/config.hpp"

#include "rkm/error.hpp"
#include "rkm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace rkm::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParameterError("config key '" + key + "': '" + v + "' is not a number");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParameterError("config key '" + key + "': '" + v + "' is not an integer");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParameterError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::pair<double, double> to_pair(const std::string& key, const std::string& v) {
    const auto parts = split(v, ',');
    if (parts.size() != 2) throw ParameterError("config key '" + key + "' expects 'lo,hi'");
    const double lo = to_double(key, parts[0]);
    const double hi = to_double(key, parts[1]);
    if (!(lo <= hi)) throw ParameterError("config key '" + key + "' needs lo <= hi");
    return {lo, hi};
}

// Accepts plain numbers and multiples of pi such as "pi/8", "0.9pi", "-pi/4".
double to_angle(const std::string& key, const std::string& v) {
    const auto at = v.find("pi");
    if (at == std::string::npos) return to_double(key, v);
    std::string before = v.substr(0, at);
    const std::string after = v.substr(at + 2);
    double factor = 1.0;
    if (before == "-") {
        factor = -1.0;
    } else if (!before.empty()) {
        if (before.back() == '*') before.pop_back();
        factor = to_double(key, before);
    }
    double divisor = 1.0;
    if (!after.empty()) {
        if (after[0] != '/') throw ParameterError("config key '" + key + "': cannot parse angle '" + v + "'");
        divisor = to_double(key, after.substr(1));
    }
    return factor * std::numbers::pi / divisor;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "K", "N", "sigma", "nTilde", "hurst", "m", "identicalComponents", "dt", "T", "seed", "delta",
        "graph.kind", "graph.file", "graph.k", "graph.p1", "graph.q1", "graph.seed",
        "noiseGraph.kind", "noiseGraph.file", "noiseGraph.k", "noiseGraph.p1", "noiseGraph.q1", "noiseGraph.seed",
        "noiseKind", "freqs", "freqs.identical", "freqs.uniform", "init.spread", "init.interval", "init.list",
        "scheme", "frequencies", "cp", "p", "tailFraction", "trials", "scenario"};
    return keys;
}

bool is_all_to_all(const graph::SignedGraph& g) {
    for (int i = 0; i < g.n(); ++i) {
        for (int j = 0; j < g.n(); ++j) {
            if (i != j && g.weight(i, j) != 1.0) return false;
        }
    }
    return true;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParameterError("config line " + std::to_string(lineNo) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParameterError("config line " + std::to_string(lineNo) + ": empty key");
        if (!kv.emplace(key, value).second) {
            throw ParameterError("config line " + std::to_string(lineNo) + ": duplicate key '" + key + "'");
        }
    }
    return kv;
}

KeyValues load_key_values(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParameterError("cannot open config file " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) {
        if (!part.empty()) out.push_back(to_angle("list", part));
    }
    return out;
}

graph::SignedGraph graph_from_keys(const KeyValues& kv, const std::string& prefix, int n) {
    const auto file = kv.find(prefix + ".file");
    const auto kind = kv.find(prefix + ".kind");
    if (file != kv.end() && kind != kv.end()) {
        throw ParameterError("give only one of " + prefix + ".kind and " + prefix + ".file");
    }
    if (file != kv.end()) return graph::load_edge_list(file->second, n > 0 ? std::optional<int>(n) : std::nullopt);
    const std::string k = kind != kv.end() ? kind->second : "complete";
    if (k.find(':') != std::string::npos) return graph::from_spec(k);
    if (n < 1) throw ParameterError("N is required to size graph family '" + k + "'");
    auto get = [&](const std::string& sub, const std::string& fallback) {
        const auto it = kv.find(prefix + "." + sub);
        return it != kv.end() ? it->second : fallback;
    };
    if (k == "complete" || k == "allToAll") return graph::complete(n);
    if (k == "cycle") return graph::cycle(n);
    if (k == "path") return graph::path(n);
    if (k == "empty") return graph::empty(n);
    if (k == "twoCommunity") return graph::twoCommunity(n / 2, n - n / 2);
    if (k == "kNeighbor") return graph::kNeighbor(n, static_cast<int>(to_int(prefix + ".k", get("k", "1"))));
    if (k == "erdosRenyiSigned") {
        return graph::erdosRenyiSigned(n, to_double(prefix + ".p1", get("p1", "0.5")),
                                       to_double(prefix + ".q1", get("q1", "0")),
                                       static_cast<std::uint64_t>(to_int(prefix + ".seed", get("seed", "0"))));
    }
    throw ParameterError("unknown graph family '" + k + "'");
}

RunSettings settings_from_key_values(const KeyValues& kv) {
    for (const auto& [key, value] : kv) {
        if (!known_keys().count(key) && key.rfind("sweep.", 0) != 0) {
            throw ParameterError("unknown config key '" + key + "'");
        }
    }
    auto has = [&](const std::string& k) { return kv.count(k) > 0; };
    auto str = [&](const std::string& k) { return kv.at(k); };
    auto num = [&](const std::string& k, double fallback) { return has(k) ? to_double(k, str(k)) : fallback; };

    RunSettings s;
    model::SystemConfig& cfg = s.cfg;
    const int nKey = has("N") ? static_cast<int>(to_int("N", str("N"))) : 0;
    cfg.graph = graph_from_keys(kv, "graph", nKey);
    const int n = cfg.graph.n();
    if (nKey > 0 && n != nKey) throw ParameterError("graph size does not match N");
    const bool noiseGiven = has("noiseGraph.kind") || has("noiseGraph.file");
    cfg.noiseGraph = noiseGiven ? graph_from_keys(kv, "noiseGraph", n) : cfg.graph;

    cfg.K = has("K") ? to_double("K", str("K")) : (is_all_to_all(cfg.graph) ? 1.0 : static_cast<double>(n));
    cfg.sigma = num("sigma", 0.0);
    cfg.nTilde = static_cast<int>(has("nTilde") ? to_int("nTilde", str("nTilde")) : 1);
    cfg.dt = num("dt", 1.0 / 512.0);
    cfg.T = num("T", 1.0);
    cfg.seed = has("seed") ? static_cast<std::uint64_t>(to_int("seed", str("seed"))) : 0;
    cfg.delta = has("delta") ? to_angle("delta", str("delta")) : std::numbers::pi / 4.0;
    cfg.noiseKind = has("noiseKind") ? model::noise_kind_from_string(str("noiseKind"))
                                     : model::NoiseKind::sinePolynomial;
    cfg.fbm.hurst = num("hurst", 0.5);
    cfg.fbm.identicalComponents = has("identicalComponents") && to_bool("identicalComponents", str("identicalComponents"));
    cfg.fbm.m = static_cast<int>(has("m") ? to_int("m", str("m")) : 1);

    const int freqKeys = static_cast<int>(has("freqs")) + has("freqs.identical") + has("freqs.uniform");
    if (freqKeys > 1) throw ParameterError("give only one of freqs, freqs.identical, freqs.uniform");
    cfg.naturalFreqs = Eigen::VectorXd::Zero(n);
    if (has("freqs")) {
        const auto v = parse_double_list(str("freqs"));
        if (static_cast<int>(v.size()) != n) throw ParameterError("freqs must list N values");
        cfg.naturalFreqs = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    } else if (has("freqs.identical")) {
        cfg.naturalFreqs.setConstant(to_double("freqs.identical", str("freqs.identical")));
    } else if (has("freqs.uniform")) {
        const auto [lo, hi] = to_pair("freqs.uniform", str("freqs.uniform"));
        Rng rng(derive_seed(cfg.seed, seed_purpose::kFrequencies, 0));
        std::uniform_real_distribution<double> u(lo, hi);
        for (int i = 0; i < n; ++i) cfg.naturalFreqs(i) = u(rng);
    }

    const int initKeys = static_cast<int>(has("init.spread")) + has("init.interval") + has("init.list");
    if (initKeys > 1) throw ParameterError("give only one of init.spread, init.interval, init.list");
    if (has("init.interval")) {
        s.initKind = InitKind::interval;
        const auto parts = split(str("init.interval"), ',');
        if (parts.size() != 2) throw ParameterError("init.interval expects 'lo,hi'");
        s.initLo = to_angle("init.interval", parts[0]);
        s.initHi = to_angle("init.interval", parts[1]);
        if (!(s.initLo <= s.initHi)) throw ParameterError("init.interval needs lo <= hi");
    } else if (has("init.list")) {
        s.initKind = InitKind::list;
        s.initList = parse_double_list(str("init.list"));
        if (static_cast<int>(s.initList.size()) != n) throw ParameterError("init.list must list N values");
    } else {
        s.initKind = InitKind::spread;
        s.initSpread = num("init.spread", 0.9);
        if (!(s.initSpread >= 0.0)) throw ParameterError("init.spread must be >= 0");
    }

    if (has("scheme")) s.scheme = integrator::scheme_from_string(str("scheme"));
    s.withFrequencies = has("frequencies") && to_bool("frequencies", str("frequencies"));
    s.cp = num("cp", 1.0);
    if (!(s.cp > 0.0)) throw ParameterError("cp must be positive");
    s.p = num("p", 3.0);
    s.tailFraction = num("tailFraction", 0.5);
    s.trials = static_cast<int>(has("trials") ? to_int("trials", str("trials")) : 100);
    if (has("scenario")) s.scenario = str("scenario");
    if (s.scenario == "frequencies") s.withFrequencies = true;
    cfg.validate();
    return s;
}

Eigen::VectorXd initial_phases(const RunSettings& s) {
    const int n = s.cfg.N();
    if (s.initKind == InitKind::list) return Eigen::Map<const Eigen::VectorXd>(s.initList.data(), n);
    const double lo = s.initKind == InitKind::spread ? 0.0 : s.initLo;
    const double hi = s.initKind == InitKind::spread ? s.initSpread * std::numbers::pi : s.initHi;
    Rng rng(derive_seed(s.cfg.seed, seed_purpose::kInitialCondition, 0));
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd theta(n);
    for (int i = 0; i < n; ++i) theta(i) = lo == hi ? lo : u(rng);
    return theta;
}

ExperimentPlan plan_from_key_values(const KeyValues& kv) {
    ExperimentPlan plan;
    for (const auto& [key, value] : kv) {
        if (key.rfind("sweep.", 0) == 0) {
            const std::string target = key.substr(6);
            if (!known_keys().count(target)) throw ParameterError("sweep over unknown key '" + target + "'");
            std::vector<std::string> values;
            if (const auto dots = value.find(".."); dots != std::string::npos) {
                const long long a = to_int(key, trim(value.substr(0, dots)));
                const long long b = to_int(key, trim(value.substr(dots + 2)));
                if (b < a) throw ParameterError("sweep range '" + value + "' is empty");
                for (long long x = a; x <= b; ++x) values.push_back(std::to_string(x));
            } else if (target == "freqs" || target == "init.list" || target == "freqs.uniform" ||
                       target == "init.interval") {
                values = split(value, ';');
            } else {
                values = split(value, ',');
            }
            if (values.empty()) throw ParameterError("sweep over '" + target + "' has no values");
            plan.sweeps.emplace_back(target, std::move(values));
        } else {
            plan.base[key] = value;
        }
    }
    if (const auto it = plan.base.find("scenario"); it != plan.base.end()) plan.scenario = it->second;
    return plan;
}

std::vector<KeyValues> expand_plan(const ExperimentPlan& plan) {
    std::vector<KeyValues> out{plan.base};
    for (const auto& [key, values] : plan.sweeps) {
        std::vector<KeyValues> next;
        next.reserve(out.size() * values.size());
        for (const auto& kv : out) {
            for (const auto& v : values) {
                KeyValues copy = kv;
                copy[key] = v;
                next.push_back(std::move(copy));
            }
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace rkm::config
