#include "rkm/diagnostics.hpp"

#include "rkm/error.hpp"
#include "rkm/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace rkm::diagnostics {

namespace {

double connected_fiedler(const graph::SignedGraph& g, const char* who) {
    if (!g.isNonnegative()) throw Refusal(std::string(who) + " requires a nonnegative coupling graph");
    const auto spec = graph::spectrum(g);
    if (spec.componentCount != 1) {
        throw Refusal(std::string(who) + ": coupling graph is disconnected (lambda_2 = 0 makes the bound vacuous)");
    }
    return spec.fiedler;
}

// Zero-mean vector with sup-norm exactly `radius` (unless the draw is
// degenerate), built from a uniform cube sample.
Eigen::VectorXd sample_centred(int n, double radius, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = u(rng);
    x.array() -= x.mean();
    const double s = x.cwiseAbs().maxCoeff();
    if (s > 0.0) x *= radius / s;
    return x;
}

}  // namespace

LyapunovReport lyapunov_check(const model::SystemConfig& cfgIn, int nSamples, std::uint64_t seed, double tolerance) {
    if (nSamples < 1) throw ParameterError("lyapunov_check needs at least one sample");
    if (!(cfgIn.delta > 0.0 && cfgIn.delta < std::numbers::pi / 2)) {
        throw ParameterError("lyapunov_check needs delta in (0, pi/2)");
    }
    model::SystemConfig cfg = cfgIn;
    cfg.naturalFreqs = Eigen::VectorXd::Zero(cfg.N());
    LyapunovReport rep;
    rep.fiedler = connected_fiedler(cfg.graph, "lyapunov_check");
    rep.c2delta = model::c_two_delta(cfg.delta);
    rep.d = cfg.K * rep.c2delta * rep.fiedler / cfg.N();
    rep.samples = nSamples;
    rep.tolerance = tolerance;
    rep.worstMargin = -std::numeric_limits<double>::infinity();

    Rng rng(derive_seed(seed, seed_purpose::kSampling, 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < nSamples; ++s) {
        const double radius = s % 2 == 0 ? cfg.delta : cfg.delta * unit(rng);
        const Eigen::VectorXd x = sample_centred(cfg.N(), radius, rng);
        const double norm = x.norm();
        if (norm == 0.0) continue;
        const double margin = x.dot(model::kuramoto_drift(x, cfg)) / norm + rep.d * norm;
        rep.worstMargin = std::max(rep.worstMargin, margin);
        if (margin > tolerance) ++rep.violations;
    }
    return rep;
}

DecayFit fit_decay_series(const Eigen::VectorXd& times, const Eigen::VectorXd& values, double tailFraction) {
    if (times.size() != values.size()) throw ParameterError("times and values differ in length");
    if (!(tailFraction > 0.0 && tailFraction <= 1.0)) throw ParameterError("tailFraction must lie in (0, 1]");
    const Eigen::Index n = times.size();
    if (n == 0) throw Refusal("empty series");
    const double t0 = times(0);
    const double tEnd = times(n - 1);
    const double tStart = tEnd - tailFraction * (tEnd - t0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int count = 0;
    DecayFit fit;
    fit.tLo = tStart;
    fit.tHi = tEnd;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (times(k) < tStart - 1e-12 * std::max(1.0, std::abs(tEnd))) continue;
        if (!(values(k) >= kNormFloor) || !std::isfinite(values(k))) continue;
        const double x = times(k);
        const double y = -std::log(values(k));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++count;
    }
    if (count < 10) {
        throw Refusal("decay fit has only " + std::to_string(count) + " usable points (need 10)");
    }
    const double c = count;
    const double sxxc = sxx - sx * sx / c;
    const double sxyc = sxy - sx * sy / c;
    const double syyc = syy - sy * sy / c;
    fit.rate = sxyc / sxxc;
    fit.rSquared = syyc > 0.0 ? (sxyc * sxyc) / (sxxc * syyc) : 1.0;
    fit.points = count;
    return fit;
}

Eigen::VectorXd deviation_norms(const Eigen::MatrixXd& states) {
    Eigen::VectorXd out(states.rows());
    for (Eigen::Index k = 0; k < states.rows(); ++k) {
        out(k) = (states.row(k).array() - states.row(k).mean()).matrix().norm();
    }
    return out;
}

DecayFit fit_decay_rate(const integrator::Trajectory& traj, double tailFraction) {
    return fit_decay_series(traj.times, deviation_norms(traj.theta), tailFraction);
}

RateBoundReport rate_bound(const model::SystemConfig& cfg, double enEstimate, double cp, int cgSamples) {
    if (!(cp > 0.0)) throw ParameterError("C_p must be positive");
    RateBoundReport rep;
    rep.fiedler = connected_fiedler(cfg.graph, "rate_bound");
    rep.c2delta = model::c_two_delta(cfg.delta);
    rep.d = cfg.K * rep.c2delta * rep.fiedler / cfg.N();
    rep.cG = model::estimate_CG(cfg, cgSamples);
    rep.enEstimate = enEstimate;
    rep.cp = cp;
    rep.bound = rep.d - (2.0 + rep.cG) * rep.cG - rep.cG * enEstimate;
    rep.positive = rep.bound > 0.0;
    return rep;
}

double drift_lipschitz(const model::SystemConfig& cfg, int samples, std::uint64_t seed) {
    Rng rng(derive_seed(seed, seed_purpose::kSampling, 2));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto spectral = [&](const Eigen::VectorXd& x) {
        const Eigen::MatrixXd J = model::drift_jacobian(x, cfg);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    };
    double best = spectral(Eigen::VectorXd::Zero(cfg.N()));
    for (int s = 0; s < samples; ++s) {
        const double radius = s % 2 == 0 ? cfg.delta : cfg.delta * unit(rng);
        best = std::max(best, spectral(sample_centred(cfg.N(), radius, rng)));
    }
    return best;
}

BasinReport basin_radius_truncated(const model::SystemConfig& cfg, const noise::RoughDriver& driver, double eps,
                                   int nMax, double lambda, double cp, const roughpath::PVarParams& params,
                                   int cgSamples) {
    if (!(eps > 0.0 && eps < cfg.delta)) throw ParameterError("eps must lie in (0, delta)");
    if (!(lambda > 0.0 && lambda < 1.0)) throw ParameterError("lambda must lie in (0, 1)");
    if (nMax < 1) throw ParameterError("nMax must be >= 1");
    if (!(cp > 0.0)) throw ParameterError("C_p must be positive");
    BasinReport rep;
    rep.cG = model::estimate_CG(cfg, cgSamples);
    if (rep.cG == 0.0) {
        rep.r = eps;
        rep.note = "C_G = 0: no noise, the greedy threshold is infinite and the basin is deterministic";
        return rep;
    }
    const double fiedler = connected_fiedler(cfg.graph, "basin_radius_truncated");
    const double d = cfg.K * model::c_two_delta(cfg.delta) * fiedler / cfg.N();
    rep.lipschitz = drift_lipschitz(cfg);
    rep.eta = d - rep.lipschitz * (2.0 + lambda) * lambda;
    rep.threshold = lambda / (16.0 * cp * rep.cG);

    const int unit = driver.index_of(1.0);
    driver.index_of(static_cast<double>(nMax));  // coverage check
    double cumulative = 0.0;
    rep.r = std::numeric_limits<double>::infinity();
    for (int n = 0; n < nMax; ++n) {
        const int count = roughpath::greedy_times(driver, rep.threshold, n * unit, (n + 1) * unit, params, cp).count;
        rep.counts.push_back(count);
        cumulative += count;
        const double v = eps * std::exp(rep.eta * n - lambda * cumulative);
        rep.values.push_back(v);
        if (v < rep.r) {
            rep.r = v;
            rep.argminN = n;
        }
    }
    return rep;
}

ThetaInfinityReport theta_infinity(const integrator::Trajectory& traj, const noise::RoughDriver& driver,
                                   const model::SystemConfig& cfg) {
    const int steps = traj.steps();
    if (driver.steps() < steps) throw ParameterError("driver shorter than the trajectory");
    if (std::abs(driver.dt() - traj.dt) > 1e-12 * traj.dt) throw ParameterError("driver and trajectory grids differ");
    const noise::RoughDriver d = driver.steps() == steps ? driver : noise::slice_driver(driver, 0, steps);
    const int m = d.m();
    Eigen::MatrixXd Y(steps + 1, m);
    std::vector<Eigen::MatrixXd> Yp;
    Yp.reserve(static_cast<std::size_t>(steps + 1));
    for (int k = 0; k <= steps; ++k) {
        const Eigen::VectorXd theta = traj.theta.row(k).transpose();
        Y.row(k) = model::noise_matrix(theta, cfg).colwise().mean();
        Yp.push_back(model::mean_noise_derivative(theta, cfg));
    }
    ThetaInfinityReport rep;
    rep.theta0 = traj.meanPhase(0);
    rep.integral = roughpath::rough_integral(Y, Yp, d);
    rep.value = rep.theta0 + rep.integral;
    rep.rotation = cfg.naturalFreqs.mean() * steps * traj.dt;
    const int unit = static_cast<int>(std::floor(1.0 / traj.dt + 1e-9));
    if (unit >= 1) {
        for (int k = 0; k + unit <= steps; k += unit) {
            rep.unitIncrements.push_back(roughpath::rough_integral(Y, Yp, d, k, k + unit));
        }
    }
    return rep;
}

double wrap_angle(double x) {
    double y = std::remainder(x, 2.0 * std::numbers::pi);  // [-π, π]
    if (y <= -std::numbers::pi) y += 2.0 * std::numbers::pi;
    return y;
}

SplittingReport splitting_check(const Eigen::VectorXd& terminal, const graph::BalancePartition& part,
                                double tolerance) {
    const Eigen::VectorXd phi = model::switching_transform(terminal, part);
    std::complex<double> z = 0.0;
    for (Eigen::Index i = 0; i < phi.size(); ++i) z += std::polar(1.0, phi(i));
    SplittingReport rep;
    rep.commonPhase = std::arg(z);
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        const double dev = std::abs(wrap_angle(phi(i) - rep.commonPhase));
        rep.maxDeviation = std::max(rep.maxDeviation, dev);
        if (part.side[static_cast<std::size_t>(i)] == 1) {
            rep.side1Deviation = std::max(rep.side1Deviation, dev);
        } else {
            rep.side2Deviation = std::max(rep.side2Deviation, dev);
        }
    }
    rep.verdict = rep.maxDeviation < tolerance;
    return rep;
}

SplittingReport splitting_check(const integrator::Trajectory& traj, const graph::BalancePartition& part,
                                double tolerance) {
    return splitting_check(Eigen::VectorXd(traj.theta.bottomRows(1).transpose()), part, tolerance);
}

namespace {

double delta_sup(const Eigen::MatrixXd& theta) {
    double best = 0.0;
    for (Eigen::Index k = 0; k < theta.rows(); ++k) {
        best = std::max(best, theta.row(k).maxCoeff() - theta.row(k).minCoeff());
    }
    return best;
}

}  // namespace

FrequencyReport frequency_sync_check(const integrator::Trajectory& traj, const model::SystemConfig& cfg,
                                     double tailFraction) {
    if (!traj.varpi) throw ParameterError("frequency_sync_check needs a trajectory with frequencies");
    FrequencyReport rep;
    rep.deltaMax = delta_sup(traj.theta);
    rep.deltaBelowHalfPi = rep.deltaMax < std::numbers::pi / 2.0;
    const Eigen::VectorXd norms = deviation_norms(*traj.varpi);
    const Eigen::RowVectorXd last = traj.varpi->bottomRows(1);
    rep.terminalSpread = (last.array() - last.mean()).abs().maxCoeff();
    if (norms.maxCoeff() < kNormFloor) {
        rep.alreadySynchronized = true;
        rep.verdict = true;
        rep.note = "frequencies identical to floating-point precision throughout";
        return rep;
    }
    if (!rep.deltaBelowHalfPi) {
        rep.note = "phase spread reached pi/2; no rate claim";
    } else {
        const double fiedler = connected_fiedler(cfg.graph, "frequency_sync_check");
        rep.rateBound = cfg.K * std::cos(rep.deltaMax) * fiedler / cfg.N();
    }
    try {
        rep.fit = fit_decay_series(traj.times, norms, tailFraction);
    } catch (const Refusal& e) {
        rep.note = e.what();
    }
    if (rep.fit && rep.deltaBelowHalfPi) {
        rep.rateOk = rep.fit->rate >= 0.9 * rep.rateBound;
        rep.verdict = rep.rateOk && rep.fit->rate > 0.0;
    }
    return rep;
}

DistributionalFrequencies distributional_frequencies(const integrator::Trajectory& traj,
                                                     const std::vector<double>& windows) {
    const int steps = traj.steps();
    const double dt = traj.dt;
    if (steps < 1) throw Refusal("trajectory has no steps");
    DistributionalFrequencies out;
    out.times = traj.times.head(steps);
    out.raw = (traj.theta.bottomRows(steps) - traj.theta.topRows(steps)) / dt;
    for (double w : windows) {
        if (!(w >= dt * (1.0 - 1e-9))) throw Refusal("smoothing window shorter than dt");
        const int span = static_cast<int>(std::lround(w / dt));
        if (span > steps) throw Refusal("smoothing window longer than the run");
        SmoothedFrequencies s;
        s.window = w;
        s.span = span;
        const int rows = steps - span + 1;
        s.times = traj.times.head(rows);
        s.frequencies = (traj.theta.middleRows(span, rows) - traj.theta.topRows(rows)) / (span * dt);
        s.mean = s.frequencies.rowwise().mean();
        out.smoothed.push_back(std::move(s));
    }
    return out;
}

OrderParameter order_parameter(const Eigen::MatrixXd& theta) {
    OrderParameter op;
    op.r.resize(theta.rows());
    op.psi.resize(theta.rows());
    const double n = static_cast<double>(theta.cols());
    for (Eigen::Index k = 0; k < theta.rows(); ++k) {
        std::complex<double> z = 0.0;
        for (Eigen::Index i = 0; i < theta.cols(); ++i) z += std::polar(1.0, theta(k, i));
        z /= n;
        op.r(k) = std::min(1.0, std::abs(z));
        op.psi(k) = std::arg(z);
    }
    return op;
}

OrderParameter order_parameter(const integrator::Trajectory& traj) {
    return order_parameter(traj.theta);
}

SyncReport sync_report(const integrator::Trajectory& traj, const model::SystemConfig& cfg,
                       const noise::RoughDriver* driver, double tailFraction) {
    SyncReport rep;
    try {
        rep.fit = fit_decay_rate(traj, tailFraction);
    } catch (const Refusal& e) {
        rep.fitError = e.what();
    }
    const Eigen::RowVectorXd last = traj.theta.bottomRows(1);
    rep.terminalDeviation = (last.array() - last.mean()).abs().maxCoeff();
    const double omegaBar = cfg.naturalFreqs.mean();
    for (int k = 0; k <= traj.steps(); ++k) {
        rep.conservationResidual = std::max(
            rep.conservationResidual, std::abs(traj.meanPhase(k) - traj.meanPhase(0) - omegaBar * traj.times(k)));
    }
    rep.deltaSup = delta_sup(traj.theta);
    if (driver) rep.thetaInfinity = theta_infinity(traj, *driver, cfg).value;

    // A fit refused because the deviation fell below the floor counts as decay.
    const bool decayed = rep.fit ? rep.fit->rate > 0.0 : deviation_norms(traj.theta.bottomRows(1))(0) < kNormFloor;
    rep.verdicts["synchronized"] = rep.terminalDeviation < kSyncTolerance && decayed;
    rep.verdicts["conserved"] = rep.conservationResidual <= kConservationTolerance;
    rep.verdicts["deltaBelowHalfPi"] = rep.deltaSup < std::numbers::pi / 2.0;
    return rep;
}

}  // namespace rkm::diagnostics
