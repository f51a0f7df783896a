#include "rkm/model.hpp"

#include "rkm/error.hpp"
#include "rkm/rng.hpp"

#include <cmath>
#include <numbers>

namespace rkm::model {

std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::sinePolynomial: return "sinePolynomial";
        case NoiseKind::diagonalSine: return "diagonalSine";
        case NoiseKind::custom: return "custom";
    }
    return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "sinePolynomial") return NoiseKind::sinePolynomial;
    if (s == "diagonalSine") return NoiseKind::diagonalSine;
    if (s == "custom") return NoiseKind::custom;
    throw ParameterError("unknown noiseKind '" + s + "' (expected sinePolynomial, diagonalSine or custom)");
}

int SystemConfig::steps() const {
    if (!(dt > 0.0) || !(T > 0.0)) throw ParameterError("T and dt must be positive");
    const double x = T / dt;
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9 * std::max(1.0, x) || r < 1) {
        throw ParameterError("T must be a positive multiple of dt");
    }
    return static_cast<int>(r);
}

noise::FbmSpec SystemConfig::fbm_spec() const {
    noise::FbmSpec s = fbm;
    s.dt = dt;
    s.steps = steps();
    s.seed = seed;
    return s;
}

void SystemConfig::validate() const {
    const int n = N();
    if (n < 1) throw ParameterError("config needs a coupling graph with at least one vertex");
    if (noiseGraph.n() != n) throw ParameterError("noise graph size must equal the coupling graph size");
    if (naturalFreqs.size() != n) throw ParameterError("natural frequency count must equal N");
    if (!(K > 0.0) || !std::isfinite(K)) throw ParameterError("K must be positive");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be >= 0");
    if (nTilde < 1) throw ParameterError("nTilde must be >= 1");
    if (!(delta >= 0.0 && delta < std::numbers::pi / 2.0)) throw ParameterError("delta must lie in [0, pi/2)");
    if (!naturalFreqs.allFinite()) throw ParameterError("natural frequencies must be finite");
    if (noiseKind == NoiseKind::custom) throw ParameterError("noiseKind custom has no built-in evaluator");
    if (noiseKind == NoiseKind::diagonalSine && fbm.m != 1 && fbm.m != n) {
        throw ParameterError("diagonalSine noise needs m = 1 or m = N");
    }
    fbm_spec().validate();
}

SystemConfig make_config(const graph::SignedGraph& g, double K, double sigma, int nTilde) {
    SystemConfig cfg;
    cfg.graph = g;
    cfg.noiseGraph = g;
    cfg.K = K;
    cfg.sigma = sigma;
    cfg.nTilde = nTilde;
    cfg.naturalFreqs = Eigen::VectorXd::Zero(g.n());
    return cfg;
}

// ---- drift ------------------------------------------------------------------

Eigen::VectorXd kuramoto_drift(const Eigen::VectorXd& theta, const SystemConfig& cfg) {
    const int n = cfg.N();
    const Eigen::MatrixXd& a = cfg.graph.weights();
    const double scale = cfg.K / n;
    Eigen::VectorXd f = cfg.naturalFreqs;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            if (a(i, j) != 0.0) s += a(i, j) * std::sin(theta(j) - theta(i));
        }
        f(i) += scale * s;
    }
    return f;
}

Eigen::MatrixXd drift_jacobian(const Eigen::VectorXd& theta, const SystemConfig& cfg) {
    const int n = cfg.N();
    const Eigen::MatrixXd& a = cfg.graph.weights();
    const double scale = cfg.K / n;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i || a(i, j) == 0.0) continue;
            const double c = scale * a(i, j) * std::cos(theta(j) - theta(i));
            J(i, j) = c;
            J(i, i) -= c;
        }
    }
    return J;
}

Eigen::VectorXd frequency_drift(const Eigen::VectorXd& varpi, const Eigen::VectorXd& theta,
                                const SystemConfig& cfg) {
    const int n = cfg.N();
    const Eigen::MatrixXd& a = cfg.graph.weights();
    const double scale = cfg.K / n;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            if (a(i, j) != 0.0) s += a(i, j) * std::cos(theta(j) - theta(i)) * (varpi(j) - varpi(i));
        }
        h(i) = scale * s;
    }
    return h;
}

// ---- noise ------------------------------------------------------------------

namespace {

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// r-th derivative of sin(x)^n for r = 0..3.
double sine_power_derivative(double x, int n, int r) {
    const double S = std::sin(x);
    const double C = std::cos(x);
    const double nn = n;
    switch (r) {
        case 0: return ipow(S, n);
        case 1: return nn * ipow(S, n - 1) * C;
        case 2: {
            const double a = n >= 2 ? nn * (nn - 1) * ipow(S, n - 2) * C * C : 0.0;
            return a - nn * ipow(S, n);
        }
        case 3: {
            const double a = n >= 3 ? nn * (nn - 1) * (nn - 2) * ipow(S, n - 3) * C * C * C : 0.0;
            return a - (2.0 * nn * (nn - 1) + nn * nn) * ipow(S, n - 1) * C;
        }
        default: throw ParameterError("derivative order must be 0..3");
    }
}

// Common column g_i = σ sum_k b_ik s(θ_i - θ_k).
Eigen::VectorXd sine_column(const Eigen::VectorXd& x, const SystemConfig& cfg) {
    const int n = cfg.N();
    const Eigen::MatrixXd& b = cfg.noiseGraph.weights();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    if (cfg.sigma == 0.0) return g;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            if (b(i, k) != 0.0) s += b(i, k) * ipow(std::sin(x(i) - x(k)), cfg.nTilde);
        }
        g(i) = cfg.sigma * s;
    }
    return g;
}

// (Dg · g)_i = σ sum_k b_ik s'(x_i - x_k)(g_i - g_k).
Eigen::VectorXd sine_column_dg_g(const Eigen::VectorXd& x, const SystemConfig& cfg) {
    const int n = cfg.N();
    const Eigen::MatrixXd& b = cfg.noiseGraph.weights();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    if (cfg.sigma == 0.0) return out;
    const Eigen::VectorXd g = sine_column(x, cfg);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            if (b(i, k) != 0.0) s += b(i, k) * sine_power_derivative(x(i) - x(k), cfg.nTilde, 1) * (g(i) - g(k));
        }
        out(i) = cfg.sigma * s;
    }
    return out;
}

void require_supported(const SystemConfig& cfg) {
    if (cfg.noiseKind == NoiseKind::custom) throw ParameterError("noiseKind custom has no built-in evaluator");
}

}  // namespace

Eigen::MatrixXd noise_G(const Eigen::VectorXd& theta, const SystemConfig& cfg) {
    const Eigen::VectorXd g = sine_column(theta, cfg);
    return g.replicate(1, cfg.fbm.m);
}

Eigen::MatrixXd noise_G_diagonal(const Eigen::VectorXd& theta, const SystemConfig& cfg) {
    const int n = cfg.N();
    const Eigen::VectorXd g = cfg.sigma * theta.array().sin().matrix();
    if (cfg.fbm.m == 1) return g;
    if (cfg.fbm.m == n) return g.asDiagonal();
    throw ParameterError("diagonalSine noise needs m = 1 or m = N");
}

Eigen::MatrixXd noise_matrix(const Eigen::VectorXd& theta, const SystemConfig& cfg) {
    require_supported(cfg);
    return cfg.noiseKind == NoiseKind::sinePolynomial ? noise_G(theta, cfg) : noise_G_diagonal(theta, cfg);
}

Eigen::VectorXd noise_levy_term(const Eigen::VectorXd& x, const SystemConfig& cfg, const Eigen::MatrixXd& area) {
    require_supported(cfg);
    const int n = cfg.N();
    if (cfg.sigma == 0.0) return Eigen::VectorXd::Zero(n);
    if (cfg.noiseKind == NoiseKind::sinePolynomial) {
        // Identical columns: DG_j G_l = (Dg) g for every (j, l).
        return sine_column_dg_g(x, cfg) * area.sum();
    }
    const double s2 = cfg.sigma * cfg.sigma;
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
        const double a = cfg.fbm.m == 1 ? area(0, 0) : area(i, i);
        out(i) = s2 * std::cos(x(i)) * std::sin(x(i)) * a;
    }
    return out;
}

Eigen::MatrixXd mean_noise_derivative(const Eigen::VectorXd& x, const SystemConfig& cfg) {
    require_supported(cfg);
    const int n = cfg.N();
    const int m = cfg.fbm.m;
    if (cfg.sigma == 0.0) return Eigen::MatrixXd::Zero(m, m);
    if (cfg.noiseKind == NoiseKind::sinePolynomial) {
        return Eigen::MatrixXd::Constant(m, m, sine_column_dg_g(x, cfg).mean());
    }
    const double s2 = cfg.sigma * cfg.sigma;
    if (m == 1) {
        return Eigen::MatrixXd::Constant(1, 1, s2 * (x.array().cos() * x.array().sin()).mean());
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < n; ++j) M(j, j) = s2 * std::cos(x(j)) * std::sin(x(j)) / n;
    return M;
}

Eigen::MatrixXd tilde_G(const Eigen::MatrixXd& G) {
    Eigen::MatrixXd out = G;
    out.rowwise() -= G.colwise().mean();
    return out;
}

double noise_derivative_sup(const Eigen::VectorXd& theta, const SystemConfig& cfg, int order) {
    require_supported(cfg);
    if (order < 0 || order > 3) throw ParameterError("derivative order must be 0..3");
    const int n = cfg.N();
    const double sigma = cfg.sigma;
    double best = 0.0;
    if (cfg.noiseKind == NoiseKind::diagonalSine) {
        for (int i = 0; i < n; ++i) {
            const double v = order % 2 == 0 ? std::sin(theta(i)) : std::cos(theta(i));
            best = std::max(best, std::abs(sigma * v));
        }
        return best;
    }
    const Eigen::MatrixXd& b = cfg.noiseGraph.weights();
    for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (int k = 0; k < n; ++k) {
            if (b(i, k) == 0.0) continue;
            const double term = sigma * b(i, k) * sine_power_derivative(theta(i) - theta(k), cfg.nTilde, order);
            total += term;
            // Mixed partials in (θ_i, θ_k) differ from this term only in sign.
            if (order > 0) best = std::max(best, std::abs(term));
        }
        best = std::max(best, std::abs(total));
    }
    return best;
}

double estimate_CG(const SystemConfig& cfg, int samples, std::uint64_t sampleSeed) {
    require_supported(cfg);
    if (cfg.sigma == 0.0) return 0.0;
    if (samples < 1) throw ParameterError("estimate_CG needs at least one sample");
    Rng rng(derive_seed(sampleSeed, seed_purpose::kSampling, 0));
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    const int n = cfg.N();
    Eigen::VectorXd theta(n);
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < n; ++i) theta(i) = u(rng);
        for (int r = 0; r <= 3; ++r) best = std::max(best, noise_derivative_sup(theta, cfg, r));
    }
    return best;
}

// ---- reductions and switching -----------------------------------------------

ReducedState reduce_state(const Eigen::VectorXd& theta) {
    ReducedState r;
    r.Theta = theta.size() ? theta.mean() : 0.0;
    r.thetaHat = theta.array() - r.Theta;
    return r;
}

namespace {

void check_partition(const Eigen::VectorXd& v, const graph::BalancePartition& part) {
    if (static_cast<Eigen::Index>(part.side.size()) != v.size()) {
        throw ParameterError("partition size must equal the state size");
    }
}

}  // namespace

Eigen::VectorXd switching_transform(const Eigen::VectorXd& theta, const graph::BalancePartition& part) {
    check_partition(theta, part);
    Eigen::VectorXd phi = theta;
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        if (part.side[static_cast<std::size_t>(i)] == 1) phi(i) += std::numbers::pi;
    }
    return phi;
}

Eigen::VectorXd switching_inverse(const Eigen::VectorXd& phi, const graph::BalancePartition& part) {
    check_partition(phi, part);
    Eigen::VectorXd theta = phi;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (part.side[static_cast<std::size_t>(i)] == 1) theta(i) -= std::numbers::pi;
    }
    return theta;
}

graph::SignedGraph switched_graph(const graph::SignedGraph& g, const graph::BalancePartition& part) {
    const auto s = part.signs();
    if (static_cast<int>(s.size()) != g.n()) throw ParameterError("partition size must equal the graph size");
    Eigen::MatrixXd w = g.weights();
    for (int i = 0; i < g.n(); ++i) {
        for (int j = 0; j < g.n(); ++j) w(i, j) *= s[i] * s[j];
    }
    return graph::SignedGraph(std::move(w));
}

SystemConfig switched_config(const SystemConfig& cfg, const graph::BalancePartition& part) {
    SystemConfig out = cfg;
    out.graph = switched_graph(cfg.graph, part);
    if (cfg.nTilde % 2 == 1) out.noiseGraph = switched_graph(cfg.noiseGraph, part);
    return out;
}

// ---- hypothesis report ------------------------------------------------------

double c_two_delta(double delta) {
    return delta == 0.0 ? 1.0 : std::sin(2.0 * delta) / (2.0 * delta);
}

HypothesisReport validate_hypotheses(const SystemConfig& cfg, int cgSamples) {
    HypothesisReport r;
    const int n = cfg.N();
    r.symmetric = true;  // SignedGraph enforces symmetry on construction
    r.nonnegative = cfg.graph.isNonnegative();
    r.components = graph::connected_components(cfg.graph);
    r.connected = graph::component_count(r.components) == 1;
    r.partition = graph::balance_partition(cfg.graph);
    r.A = r.symmetric && r.nonnegative && r.connected;
    r.AI = r.symmetric && r.nonnegative;
    r.AIII = r.partition.has_value();
    r.AII = r.AIII && r.connected;
    r.B = n > 0 && (cfg.naturalFreqs.array() == cfg.naturalFreqs(0)).all();
    r.HWplus = cfg.fbm.identicalComponents || cfg.fbm.m == 1;

    const bool sine = cfg.noiseKind == NoiseKind::sinePolynomial;
    r.HG = sine;
    r.HGII = cfg.noiseKind == NoiseKind::diagonalSine;
    const bool oddPower = cfg.nTilde % 2 == 1;
    r.HGplus = sine && (oddPower || cfg.sigma == 0.0);
    bool noiseWithinComponents = true;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            if (cfg.noiseGraph.hasEdge(i, k) && r.components[i] != r.components[k]) noiseWithinComponents = false;
        }
    }
    r.HGIplus = r.HGplus && noiseWithinComponents;

    if (r.HGII && !r.HWplus) {
        r.warnings.push_back("diagonalSine noise with independent driver components: rotation-free "
                             "synchronization result does not apply");
    }
    if (r.nonnegative) {
        r.fiedler = graph::spectrum(cfg.graph).fiedler;
        r.d = cfg.K * c_two_delta(cfg.delta) * r.fiedler / n;
    } else {
        r.warnings.push_back("coupling graph has negative weights; dissipation d is computed on the "
                             "switched graph only when balanced");
        if (r.partition) {
            r.fiedler = graph::spectrum(switched_graph(cfg.graph, *r.partition)).fiedler;
            r.d = cfg.K * c_two_delta(cfg.delta) * r.fiedler / n;
        }
    }
    if (cfg.noiseKind != NoiseKind::custom) r.CG = estimate_CG(cfg, cgSamples);
    if (r.CG > 0.0 && r.CG >= r.d) {
        r.warnings.push_back("C_G is not small compared with the dissipation d; noise may dominate");
    }
    return r;
}

}  // namespace rkm::model
