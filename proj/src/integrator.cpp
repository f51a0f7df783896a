#include "rkm/integrator.hpp"

#include "rkm/error.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace rkm::integrator {

std::string to_string(Scheme s) {
    return s == Scheme::davie ? "davie" : "heun";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "davie") return Scheme::davie;
    if (s == "heun") return Scheme::heun;
    throw ParameterError("unknown scheme '" + s + "' (expected davie or heun)");
}

KuramotoSystem::KuramotoSystem(const model::SystemConfig& cfg, bool centred) : cfg_(cfg), centred_(centred) {}

Eigen::VectorXd KuramotoSystem::drift(const Eigen::VectorXd& y) const {
    return model::kuramoto_drift(y, cfg_);
}

Eigen::MatrixXd KuramotoSystem::diffusion(const Eigen::VectorXd& y) const {
    const Eigen::MatrixXd G = model::noise_matrix(y, cfg_);
    return centred_ ? model::tilde_G(G) : G;
}

Eigen::VectorXd KuramotoSystem::levy_term(const Eigen::VectorXd& y, const Eigen::MatrixXd& area) const {
    Eigen::VectorXd v = model::noise_levy_term(y, cfg_, area);
    if (centred_) v.array() -= v.mean();
    return v;
}

FrequencySystem::FrequencySystem(const model::SystemConfig& cfg, const Eigen::VectorXd& theta)
    : cfg_(cfg), theta_(theta) {}

Eigen::VectorXd FrequencySystem::drift(const Eigen::VectorXd& y) const {
    return model::frequency_drift(y, theta_, cfg_);
}

Eigen::MatrixXd FrequencySystem::diffusion(const Eigen::VectorXd& y) const {
    return model::noise_matrix(y, cfg_);
}

Eigen::VectorXd FrequencySystem::levy_term(const Eigen::VectorXd& y, const Eigen::MatrixXd& area) const {
    return model::noise_levy_term(y, cfg_, area);
}

Eigen::VectorXd step_davie(const RdeSystem& sys, const Eigen::VectorXd& y, double dt, const Eigen::VectorXd& inc,
                           const Eigen::MatrixXd& area) {
    return y + sys.drift(y) * dt + sys.diffusion(y) * inc + sys.levy_term(y, area);
}

Eigen::VectorXd step_heun(const RdeSystem& sys, const Eigen::VectorXd& y, double dt, const Eigen::VectorXd& inc) {
    const Eigen::VectorXd f0 = sys.drift(y);
    const Eigen::MatrixXd g0 = sys.diffusion(y);
    const Eigen::VectorXd pred = y + f0 * dt + g0 * inc;
    return y + 0.5 * (f0 + sys.drift(pred)) * dt + 0.5 * (g0 + sys.diffusion(pred)) * inc;
}

Eigen::VectorXd step(Scheme scheme, const RdeSystem& sys, const Eigen::VectorXd& y, double dt,
                     const Eigen::VectorXd& inc, const Eigen::MatrixXd& area) {
    return scheme == Scheme::davie ? step_davie(sys, y, dt, inc, area) : step_heun(sys, y, dt, inc);
}

namespace {

bool state_ok(const Eigen::VectorXd& y) {
    return y.allFinite() && (y.size() == 0 || y.cwiseAbs().maxCoeff() <= kBlowUpThreshold);
}

void guard(const Eigen::VectorXd& y, int k) {
    if (!state_ok(y)) {
        throw IntegrationAborted("state left the finite region at step " + std::to_string(k + 1),
                                 static_cast<std::size_t>(k));
    }
}

}  // namespace

Eigen::MatrixXd integrate_system(const RdeSystem& sys, const Eigen::VectorXd& y0, const noise::RoughDriver& driver,
                                 Scheme scheme) {
    if (y0.size() != sys.dim()) throw ParameterError("initial state has the wrong dimension");
    if (driver.m() != sys.m()) throw ParameterError("driver dimension does not match the system");
    const int steps = driver.steps();
    Eigen::MatrixXd path(steps + 1, sys.dim());
    path.row(0) = y0.transpose();
    Eigen::VectorXd y = y0;
    for (int k = 0; k < steps; ++k) {
        y = step(scheme, sys, y, driver.dt(), driver.increment(k), driver.area(k));
        guard(y, k);
        path.row(k + 1) = y.transpose();
    }
    return path;
}

Trajectory integrate(const model::SystemConfig& cfg, const noise::RoughDriver& driver, const Eigen::VectorXd& theta0,
                     const IntegrateOptions& opts) {
    cfg.validate();
    const int n = cfg.N();
    const int steps = cfg.steps();
    if (theta0.size() != n) throw ParameterError("initial phases must have length N");
    if (driver.m() != cfg.fbm.m) throw ParameterError("driver dimension does not match cfg.fbm.m");
    if (std::abs(driver.dt() - cfg.dt) > 1e-12 * cfg.dt) throw ParameterError("driver dt does not match cfg.dt");
    if (driver.steps() < steps) throw ParameterError("driver is shorter than the configured horizon");

    Trajectory tr;
    tr.scheme = opts.scheme;
    tr.dt = cfg.dt;
    tr.times.resize(steps + 1);
    tr.theta.resize(steps + 1, n);
    tr.meanPhase.resize(steps + 1);
    for (int k = 0; k <= steps; ++k) tr.times(k) = k * cfg.dt;

    const KuramotoSystem phases(cfg, opts.centredNoise);
    Eigen::VectorXd theta = theta0;
    Eigen::VectorXd varpi = cfg.naturalFreqs;
    if (opts.withFrequencies) {
        tr.varpi = Eigen::MatrixXd(steps + 1, n);
        tr.varpi->row(0) = varpi.transpose();
    }
    tr.theta.row(0) = theta.transpose();
    tr.meanPhase(0) = theta.mean();

    for (int k = 0; k < steps; ++k) {
        const Eigen::VectorXd inc = driver.increment(k);
        const Eigen::MatrixXd& area = driver.area(k);
        Eigen::VectorXd next = step(opts.scheme, phases, theta, cfg.dt, inc, area);
        if (opts.withFrequencies) {
            const FrequencySystem freq(cfg, theta);
            varpi = step(opts.scheme, freq, varpi, cfg.dt, inc, area);
            guard(varpi, k);
            tr.varpi->row(k + 1) = varpi.transpose();
        }
        guard(next, k);
        theta = std::move(next);
        tr.theta.row(k + 1) = theta.transpose();
        tr.meanPhase(k + 1) = theta.mean();
    }
    return tr;
}

double empirical_order(const std::vector<double>& errors) {
    const auto n = static_cast<double>(errors.size());
    if (errors.size() < 2) throw Refusal("empirical order needs at least two levels");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t l = 0; l < errors.size(); ++l) {
        if (!(errors[l] > 0.0)) throw Refusal("empirical order needs positive errors");
        const double x = static_cast<double>(l);
        const double y = std::log2(errors[l]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport self_convergence(const RdeSystem& sys, const Eigen::VectorXd& y0, const noise::RoughDriver& finest,
                                   Scheme scheme, int levels) {
    if (levels < 3) throw ParameterError("self_convergence needs at least 3 levels");
    const int finestFactor = 1 << (levels + kReferenceLevels - 1);
    if (finest.steps() % finestFactor != 0) {
        throw ParameterError("finest driver step count must be divisible by 2^(levels+2)");
    }
    const Eigen::VectorXd reference = integrate_system(sys, y0, finest, scheme).bottomRows(1).transpose();
    ConvergenceReport rep;
    for (int l = 0; l < levels; ++l) {
        const noise::RoughDriver coarse = noise::restrict_driver(finest, 1 << (levels + kReferenceLevels - l - 1));
        const Eigen::VectorXd yT = integrate_system(sys, y0, coarse, scheme).bottomRows(1).transpose();
        rep.dts.push_back(coarse.dt());
        rep.errors.push_back((yT - reference).norm());
    }
    rep.order = empirical_order(rep.errors);
    return rep;
}

ConvergenceReport self_convergence(const model::SystemConfig& cfg, const Eigen::VectorXd& theta0, Scheme scheme,
                                   int levels) {
    cfg.validate();
    const noise::RoughDriver finest = noise::sample_driver(cfg.fbm_spec());
    const KuramotoSystem sys(cfg);
    return self_convergence(sys, theta0, finest, scheme, levels);
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    const int n = traj.N();
    out << "t";
    for (int i = 0; i < n; ++i) out << ",theta_" << i;
    if (traj.varpi) {
        for (int i = 0; i < n; ++i) out << ",varpi_" << i;
    }
    out << '\n';
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (int k = 0; k <= traj.steps(); ++k) {
        put(traj.times(k));
        for (int i = 0; i < n; ++i) {
            out << ',';
            put(traj.theta(k, i));
        }
        if (traj.varpi) {
            for (int i = 0; i < n; ++i) {
                out << ',';
                put((*traj.varpi)(k, i));
            }
        }
        out << '\n';
    }
}

}  // namespace rkm::integrator
