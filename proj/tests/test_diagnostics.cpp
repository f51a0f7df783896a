#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rkm/diagnostics.hpp"
#include "rkm/error.hpp"
#include "rkm/rng.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

using namespace rkm;
using namespace rkm::diagnostics;

namespace {

constexpr double kPi = std::numbers::pi;

model::SystemConfig base_config(const graph::SignedGraph& g, double sigma, int nTilde, double T, double dt,
                                std::uint64_t seed) {
    model::SystemConfig c = model::make_config(g, 1.0, sigma, nTilde);
    c.fbm.hurst = 0.45;
    c.T = T;
    c.dt = dt;
    c.seed = seed;
    return c;
}

Eigen::VectorXd uniform_start(int n, double lo, double hi, std::uint64_t seed) {
    oracle::Rng rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = u(rng);
    return x;
}

integrator::Trajectory from_rows(const Eigen::MatrixXd& theta, double dt) {
    integrator::Trajectory t;
    t.theta = theta;
    t.dt = dt;
    t.times = Eigen::VectorXd::LinSpaced(theta.rows(), 0.0, dt * (theta.rows() - 1));
    t.meanPhase = theta.rowwise().mean();
    return t;
}

// <θ̂/|θ̂|, f(θ̂)> + d|θ̂| straight from the pairwise sine sum.
double lyapunov_margin(const Eigen::MatrixXd& a, double K, double d, const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    double inner = 0.0;
    for (int i = 0; i < n; ++i) {
        double f = 0.0;
        for (int j = 0; j < n; ++j) f += a(i, j) * std::sin(x(j) - x(i));
        inner += x(i) * K / n * f;
    }
    const double norm = x.norm();
    return inner / norm + d * norm;
}

noise::RoughDriver quiet_driver(int steps, double dt) {
    return noise::RoughDriver(Eigen::MatrixXd::Zero(steps + 1, 1),
                              std::vector<Eigen::MatrixXd>(steps, Eigen::MatrixXd::Zero(1, 1)), dt, 0.5);
}

}  // namespace

TEST_CASE("C_2delta and the small-delta limit") {
    CHECK(model::c_two_delta(kPi / 4) == doctest::Approx(2.0 / kPi));
    CHECK(model::c_two_delta(1e-8) == doctest::Approx(1.0));
    model::SystemConfig c = model::make_config(graph::complete(5), 1.0, 0.0);
    c.delta = 1e-6;
    const LyapunovReport r = lyapunov_check(c, 100);
    CHECK(r.d == doctest::Approx(1.0 * 5 / 5).epsilon(1e-9));
}

TEST_CASE("lyapunov margin on the complete graph") {
    model::SystemConfig c = model::make_config(graph::complete(5), 1.0, 0.0);
    c.delta = kPi / 4;
    const LyapunovReport r = lyapunov_check(c, 10000);
    CHECK(r.samples == 10000);
    CHECK(r.c2delta == doctest::Approx(2.0 / kPi));
    CHECK(r.fiedler == doctest::Approx(5.0));
    CHECK(r.d == doctest::Approx(2.0 / kPi));
    CHECK(r.worstMargin <= 1e-10);
    CHECK(r.violations == 0);
}

TEST_CASE("lyapunov margin on random connected graphs") {
    oracle::Rng rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + trial % 7;
        const graph::SignedGraph g = oracle::random_connected(n, rng, trial % 2 == 1);
        for (double delta : {kPi / 8, kPi / 4, 3 * kPi / 8}) {
            model::SystemConfig c = model::make_config(g, 1.5, 0.0);
            c.delta = delta;
            const LyapunovReport r = lyapunov_check(c, 2000, 1 + trial);
            CHECK(r.worstMargin <= 1e-10);

            // Independent evaluation at states of our own.
            const double fiedler = oracle::jacobi_eigenvalues(oracle::laplacian(g.weights()))[1];
            const double d = 1.5 * std::sin(2 * delta) / (2 * delta) * fiedler / n;
            CHECK(r.d == doctest::Approx(d).epsilon(1e-9));
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            for (int s = 0; s < 200; ++s) {
                Eigen::VectorXd x(n);
                for (int i = 0; i < n; ++i) x(i) = u(rng);
                x.array() -= x.mean();
                if (x.norm() == 0.0) continue;
                x *= delta / x.cwiseAbs().maxCoeff();
                CHECK(lyapunov_margin(g.weights(), 1.5, d, x) <= 1e-10);
            }
        }
    }
}

TEST_CASE("lyapunov check refuses disconnected graphs") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
    w(0, 1) = w(1, 0) = 1.0;
    w(2, 3) = w(3, 2) = 1.0;
    const model::SystemConfig c = model::make_config(graph::SignedGraph(w), 1.0, 0.0);
    CHECK_THROWS_AS(lyapunov_check(c, 100), Refusal);
}

TEST_CASE("fit_decay_series on exact exponentials") {
    const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(201, 0.0, 10.0);
    const DecayFit f = fit_decay_series(t, (-2.0 * t).array().exp().matrix());
    CHECK(std::abs(f.rate - 2.0) <= 1e-6);
    CHECK(f.rSquared == doctest::Approx(1.0));
    CHECK(f.tLo == doctest::Approx(5.0));
    CHECK(f.tHi == doctest::Approx(10.0));

    oracle::Rng rng(3);
    std::uniform_real_distribution<double> rate(0.05, 3.0), amp(0.1, 10.0);
    for (int i = 0; i < 50; ++i) {
        const double mu = rate(rng), a = amp(rng);
        const DecayFit g = fit_decay_series(t, (a * (-mu * t).array().exp()).matrix(), 0.3);
        CHECK(std::abs(g.rate - mu) <= 1e-6 * mu);
    }
}

TEST_CASE("fit_decay_series edge cases") {
    const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(101, 0.0, 10.0);
    const DecayFit flat = fit_decay_series(t, Eigen::VectorXd::Constant(101, 0.3));
    CHECK(flat.rate <= 1e-12);
    const DecayFit grow = fit_decay_series(t, (0.5 * t).array().exp().matrix());
    CHECK(grow.rate == doctest::Approx(-0.5));

    // Values at the floating-point floor are excluded.
    Eigen::VectorXd v = (-1.0 * t).array().exp();
    v.tail(30).setZero();
    const DecayFit cut = fit_decay_series(t, v);
    CHECK(cut.points == 21);
    CHECK(cut.rate == doctest::Approx(1.0));
    v.tail(45).setZero();
    CHECK_THROWS_AS(fit_decay_series(t, v), Refusal);
}

TEST_CASE("fit_decay_rate uses mean-removed norms") {
    Eigen::MatrixXd th(101, 3);
    for (int k = 0; k <= 100; ++k) {
        const double e = std::exp(-0.7 * k * 0.1);
        th.row(k) << 2.0 + e, 2.0 - e, 2.0;
    }
    const integrator::Trajectory t = from_rows(th, 0.1);
    CHECK(deviation_norms(th)(0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(fit_decay_rate(t).rate == doctest::Approx(0.7));
}

TEST_CASE("assembled rate bound") {
    model::SystemConfig c = model::make_config(graph::complete(10), 1.0, 0.0);
    c.delta = kPi / 4;
    const RateBoundReport quiet = rate_bound(c, 5.0);
    CHECK(quiet.cG == 0.0);
    CHECK(quiet.d == doctest::Approx(2.0 / kPi));
    CHECK(quiet.bound == quiet.d);
    CHECK(quiet.positive);

    c.sigma = 0.001;
    const RateBoundReport r = rate_bound(c, 5.0, 2.0, 2000);
    CHECK(r.cG == doctest::Approx(model::estimate_CG(c, 2000)));
    CHECK(r.bound == doctest::Approx(r.d - (2.0 + r.cG) * r.cG - r.cG * 5.0));
    CHECK(r.bound <= r.d);
    CHECK(r.cp == 2.0);

    double previous = quiet.bound;
    for (double s : {0.001, 0.01, 0.05, 0.1, 0.5}) {
        c.sigma = s;
        const RateBoundReport b = rate_bound(c, 5.0, 1.0, 2000);
        CHECK(b.bound < previous);
        previous = b.bound;
    }
    c.sigma = 1.0;
    CHECK_FALSE(rate_bound(c, 5.0, 1.0, 2000).positive);
}

TEST_CASE("basin radius without noise") {
    model::SystemConfig c = model::make_config(graph::complete(4), 1.0, 0.0);
    const BasinReport r = basin_radius_truncated(c, quiet_driver(40, 0.25), 0.1, 10, 0.5);
    CHECK(r.r == 0.1);
    CHECK_FALSE(r.note.empty());
    CHECK_THROWS_AS(basin_radius_truncated(c, quiet_driver(40, 0.25), 2.0, 10, 0.5), ParameterError);
    CHECK_THROWS_AS(basin_radius_truncated(c, quiet_driver(40, 0.25), 0.1, 10, 1.5), ParameterError);
}

TEST_CASE("basin radius against direct evaluation") {
    model::SystemConfig c = model::make_config(graph::complete(4), 1.0, 0.05);
    c.delta = kPi / 4;
    const double eps = 0.2;

    // A driver with large oscillations on [0, 3) and rest afterwards.
    const int perUnit = 16, units = 12;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(perUnit * units + 1, 1);
    for (int k = 1; k <= 3 * perUnit; ++k) w(k, 0) = (k % 2 == 0) ? 0.0 : 3.0;
    std::vector<Eigen::MatrixXd> areas;
    for (int k = 0; k < perUnit * units; ++k) {
        const double inc = w(k + 1, 0) - w(k, 0);
        areas.push_back(Eigen::MatrixXd::Constant(1, 1, 0.5 * inc * inc));
    }
    const noise::RoughDriver drv(w, areas, 1.0 / perUnit, 0.5);

    const double d = model::c_two_delta(c.delta) * 4.0 / 4.0;
    for (double lambda : {0.05, 0.1}) {
        const BasinReport r = basin_radius_truncated(c, drv, eps, units, lambda);
        REQUIRE(r.counts.size() == static_cast<std::size_t>(units));
        REQUIRE(r.values.size() == static_cast<std::size_t>(units));
        CHECK(r.threshold == doctest::Approx(lambda / (16.0 * r.cG)));
        CHECK(r.eta == doctest::Approx(d - r.lipschitz * (2.0 + lambda) * lambda));
        CHECK(r.eta > lambda);
        CHECK(r.counts.front() > 1);
        CHECK(r.counts.back() == 1);

        double cumulative = 0.0, best = 1e300;
        int argmin = -1;
        for (int n = 0; n < units; ++n) {
            const auto count = roughpath::greedy_times(drv, r.threshold, double(n), double(n + 1), {}, 1.0).count;
            CHECK(count == r.counts[n]);
            cumulative += count;
            const double v = eps * std::exp(r.eta * n - lambda * cumulative);
            CHECK(r.values[n] == doctest::Approx(v).epsilon(1e-12));
            if (v < best) {
                best = v;
                argmin = n;
            }
        }
        CHECK(r.r == best);
        CHECK(r.argminN == argmin);
        // After the noisy stretch every count is 1 and the exponent grows.
        CHECK(r.argminN <= 3);
        CHECK(r.r <= eps);
    }
}

TEST_CASE("basin radius is nonincreasing in lambda on a quiet driver") {
    model::SystemConfig c = model::make_config(graph::complete(5), 1.0, 0.05);
    c.delta = kPi / 4;
    const noise::RoughDriver drv = quiet_driver(8 * 20, 1.0 / 8);
    double previous = 1e300;
    std::vector<double> previousValues;
    for (double lambda : {0.02, 0.05, 0.1, 0.2, 0.4}) {
        const BasinReport r = basin_radius_truncated(c, drv, 0.3, 20, lambda);
        for (int k : r.counts) CHECK(k == 1);
        CHECK(r.r <= previous);
        if (!previousValues.empty()) {
            for (std::size_t n = 0; n < r.values.size(); ++n) CHECK(r.values[n] <= previousValues[n]);
        }
        previous = r.r;
        previousValues = r.values;
    }
}

TEST_CASE("theta infinity") {
    model::SystemConfig c = base_config(graph::complete(6), 0.3, 1, 8.0, 1.0 / 256, 2);
    const noise::RoughDriver drv = noise::sample_driver(c.fbm_spec());
    const Eigen::VectorXd x0 = uniform_start(6, 0.0, kPi / 2, 2);

    // Odd powers: the mean noise vanishes identically.
    const integrator::Trajectory odd = integrator::integrate(c, drv, x0);
    const ThetaInfinityReport a = theta_infinity(odd, drv, c);
    CHECK(a.theta0 == doctest::Approx(x0.mean()));
    CHECK(std::abs(a.integral) <= 1e-12);
    CHECK(a.unitIncrements.size() == 8);

    model::SystemConfig quiet = c;
    quiet.sigma = 0.0;
    const integrator::Trajectory still = integrator::integrate(quiet, drv, x0);
    CHECK(theta_infinity(still, drv, quiet).value == x0.mean());

    // Even powers move the mean; the reconstruction tracks the simulated mean.
    model::SystemConfig even = c;
    even.nTilde = 2;
    even.sigma = 0.1;
    const integrator::Trajectory t = integrator::integrate(even, drv, x0);
    const ThetaInfinityReport r = theta_infinity(t, drv, even);
    const double moved = std::abs(t.meanPhase(t.steps()) - t.meanPhase(0));
    CHECK(moved > 1e-4);
    CHECK(std::abs(r.value - t.meanPhase(t.steps())) <= std::max(std::abs(r.unitIncrements.back()), 1e-3 * moved));
    double sum = 0.0;
    for (double inc : r.unitIncrements) sum += inc;
    CHECK(sum == doctest::Approx(r.integral).epsilon(1e-9));
}

TEST_CASE("theta infinity tail increments shrink on synchronized runs") {
    // Median over seeds of |I_{k+1} - I_k| for k past the mixing window.
    model::SystemConfig c = base_config(graph::complete(6), 0.1, 2, 12.0, 1.0 / 256, 0);
    const int seeds = 15;
    std::vector<std::vector<double>> diffs(11);
    for (int s = 0; s < seeds; ++s) {
        c.seed = 40 + s;
        const noise::RoughDriver drv = noise::sample_driver(c.fbm_spec());
        const integrator::Trajectory t = integrator::integrate(c, drv, uniform_start(6, 0.0, kPi / 2, 40 + s));
        const ThetaInfinityReport r = theta_infinity(t, drv, c);
        for (int k = 0; k + 1 < 12; ++k) diffs[k].push_back(std::abs(r.unitIncrements[k + 1] - r.unitIncrements[k]));
    }
    std::vector<double> med;
    for (auto& v : diffs) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        med.push_back(v[v.size() / 2]);
    }
    for (int k = 4; k + 1 < 11; ++k) CHECK(med[k + 1] <= med[k] * 1.0000001);
}

TEST_CASE("wrap_angle") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
    CHECK(wrap_angle(-7.0) == doctest::Approx(-7.0 + 2 * kPi));
}

TEST_CASE("splitting check") {
    const graph::SignedGraph g = graph::twoCommunity(3, 3);
    const graph::BalancePartition part = *graph::balance_partition(g);
    Eigen::VectorXd antipodal(6);
    for (int i = 0; i < 6; ++i) antipodal(i) = part.side[i] == 1 ? 0.4 + kPi : 0.4;
    const SplittingReport s = splitting_check(antipodal, part);
    CHECK(s.verdict);
    CHECK(s.maxDeviation <= 1e-12);

    // Coherent in the switched coordinates.
    const Eigen::VectorXd coherent = model::switching_inverse(Eigen::VectorXd::Constant(6, -1.0), part);
    CHECK(splitting_check(coherent, part).verdict);

    Eigen::VectorXd scattered = antipodal;
    scattered(0) += 0.5;
    const SplittingReport bad = splitting_check(scattered, part);
    CHECK_FALSE(bad.verdict);
    CHECK(std::max(bad.side1Deviation, bad.side2Deviation) == doctest::Approx(bad.maxDeviation));

    oracle::Rng rng(5);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd x(6);
        for (int i = 0; i < 6; ++i) x(i) = u(rng);
        const SplittingReport base = splitting_check(x, part);
        CHECK_FALSE(base.verdict);
        const double shift = 10 * u(rng);
        const SplittingReport moved = splitting_check((x.array() + shift).matrix(), part);
        CHECK(moved.verdict == base.verdict);
        CHECK(moved.maxDeviation == doctest::Approx(base.maxDeviation).epsilon(1e-9));
        const SplittingReport a2 = splitting_check((antipodal.array() + shift).matrix(), part);
        CHECK(a2.verdict);
    }
}

TEST_CASE("frequency synchronization check") {
    model::SystemConfig c = base_config(graph::complete(4), 0.0, 1, 20.0, 1.0 / 128, 3);
    c.naturalFreqs = Eigen::Vector4d::Constant(0.2);
    const noise::RoughDriver drv = noise::sample_driver(c.fbm_spec());
    integrator::IntegrateOptions o;
    o.withFrequencies = true;
    const Eigen::VectorXd x0 = uniform_start(4, -kPi / 8, kPi / 8, 3);

    const integrator::Trajectory same = integrator::integrate(c, drv, x0, o);
    CHECK((same.varpi->array() - 0.2).abs().maxCoeff() == 0.0);
    const FrequencyReport sr = frequency_sync_check(same, c);
    CHECK(sr.alreadySynchronized);
    CHECK(sr.verdict);

    c.naturalFreqs = Eigen::Vector4d(0.3, -0.2, 0.1, -0.25);
    c.sigma = 0.02;
    const integrator::Trajectory t = integrator::integrate(c, drv, x0, o);
    const FrequencyReport r = frequency_sync_check(t, c);
    REQUIRE(r.deltaBelowHalfPi);
    REQUIRE(r.fit.has_value());
    CHECK(r.rateBound == doctest::Approx(std::cos(r.deltaMax) * 4.0 / 4.0));
    CHECK(r.fit->rate >= 0.9 * r.rateBound);
    CHECK(r.verdict);

    // A global phase shift changes nothing.
    integrator::Trajectory shifted = t;
    shifted.theta.array() += 5.0;
    const FrequencyReport rs = frequency_sync_check(shifted, c);
    CHECK(rs.deltaMax == doctest::Approx(r.deltaMax).epsilon(1e-12));
    CHECK(rs.verdict == r.verdict);
    CHECK(rs.fit->rate == r.fit->rate);

    // Spread beyond π/2 withdraws the rate claim.
    integrator::Trajectory wide = t;
    wide.theta(3, 0) += 2.0;
    const FrequencyReport rw = frequency_sync_check(wide, c);
    CHECK_FALSE(rw.deltaBelowHalfPi);
    CHECK(rw.rateBound == 0.0);
    CHECK_FALSE(rw.verdict);

    integrator::Trajectory bare = t;
    bare.varpi.reset();
    CHECK_THROWS_AS(frequency_sync_check(bare, c), ParameterError);
}

TEST_CASE("distributional frequencies") {
    const double dt = 0.01, v = 0.75;
    Eigen::MatrixXd th(401, 2);
    for (int k = 0; k <= 400; ++k) th.row(k) << v * k * dt, -v * k * dt + 1.0;
    const DistributionalFrequencies f = distributional_frequencies(from_rows(th, dt));
    CHECK(f.raw.rows() == 400);
    CHECK((f.raw.col(0).array() - v).abs().maxCoeff() <= 1e-12);
    REQUIRE(f.smoothed.size() == 3);
    CHECK(f.smoothed[0].span == 1);
    CHECK(f.smoothed[1].span == 5);
    CHECK(f.smoothed[2].span == 20);
    for (const auto& s : f.smoothed) {
        CHECK(s.frequencies.rows() == 400 - s.span + 1);
        CHECK((s.frequencies.col(0).array() - v).abs().maxCoeff() <= 1e-12);
        CHECK((s.frequencies.col(1).array() + v).abs().maxCoeff() <= 1e-12);
        CHECK(s.mean.cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK_THROWS_AS(distributional_frequencies(from_rows(th, dt), {0.001}), Refusal);
    CHECK_THROWS_AS(distributional_frequencies(from_rows(th, dt), {10.0}), Refusal);
}

TEST_CASE("smoothed frequencies of simulated runs") {
    model::SystemConfig c = base_config(graph::complete(5), 0.0, 1, 20.0, 1.0 / 128, 1);
    c.naturalFreqs = (Eigen::VectorXd(5) << 0.2, -0.1, 0.05, 0.0, -0.15).finished();
    const noise::RoughDriver drv = noise::sample_driver(c.fbm_spec());
    const Eigen::VectorXd x0 = uniform_start(5, 0.0, 0.5, 1);
    const DistributionalFrequencies det = distributional_frequencies(integrator::integrate(c, drv, x0));
    const auto& s = det.smoothed[2];
    const Eigen::RowVectorXd early = s.frequencies.row(0), late = s.frequencies.bottomRows(1);
    CHECK(late.maxCoeff() - late.minCoeff() < 1e-3 * (early.maxCoeff() - early.minCoeff()));
    CHECK(late.mean() == doctest::Approx(0.0).epsilon(1e-9));

    // Odd power: the average frequency stays at its initial value.
    c.sigma = 0.3;
    const DistributionalFrequencies noisy = distributional_frequencies(integrator::integrate(c, drv, x0));
    for (const auto& sm : noisy.smoothed) CHECK(sm.mean.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("order parameter") {
    Eigen::MatrixXd th(3, 4);
    th.row(0).setConstant(1.3);
    th.row(1) << 0.2, 0.2 + kPi, 0.2, 0.2 + kPi;
    th.row(2) << 0.1, 1.7, -2.2, 3.0;
    const OrderParameter op = order_parameter(th);
    CHECK(op.r(0) == doctest::Approx(1.0));
    CHECK(op.psi(0) == doctest::Approx(1.3));
    CHECK(op.r(1) <= 1e-15);

    oracle::Rng rng(8);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    Eigen::MatrixXd rnd(200, 7);
    for (int k = 0; k < 200; ++k) {
        for (int i = 0; i < 7; ++i) rnd(k, i) = u(rng);
    }
    const OrderParameter rp = order_parameter(rnd);
    for (int k = 0; k < 200; ++k) {
        double re = 0.0, im = 0.0;
        for (int i = 0; i < 7; ++i) {
            re += std::cos(rnd(k, i));
            im += std::sin(rnd(k, i));
        }
        CHECK(std::abs(rp.r(k) - std::hypot(re, im) / 7) <= 1e-14);
        CHECK(std::abs(std::remainder(rp.psi(k) - std::atan2(im, re), 2 * kPi)) <= 1e-12);
        CHECK(rp.r(k) >= 0.0);
        CHECK(rp.r(k) <= 1.0);
    }
}

TEST_CASE("sync report") {
    model::SystemConfig c = base_config(graph::complete(8), 0.05, 1, 20.0, 1.0 / 256, 7);
    const noise::RoughDriver drv = noise::sample_driver(c.fbm_spec());
    const integrator::Trajectory t = integrator::integrate(c, drv, uniform_start(8, 0.0, 0.5, 7));
    const SyncReport r = sync_report(t, c, &drv);
    REQUIRE(r.fit.has_value());
    CHECK(r.fit->tLo >= 0.0);
    CHECK(r.fit->tHi <= 20.0 + 1e-12);
    CHECK(r.verdicts.at("synchronized"));
    CHECK(r.verdicts.at("conserved"));
    CHECK(r.verdicts.at("deltaBelowHalfPi"));
    CHECK(r.conservationResidual <= 1e-8);
    REQUIRE(r.thetaInfinity.has_value());
    CHECK(*r.thetaInfinity == doctest::Approx(t.meanPhase(0)));
    double spread = 0.0;
    for (int k = 0; k <= t.steps(); ++k) spread = std::max(spread, t.theta.row(k).maxCoeff() - t.theta.row(k).minCoeff());
    CHECK(r.deltaSup == spread);

    // Rotating frame: ϖ̄ t is removed before measuring conservation.
    model::SystemConfig rot = c;
    rot.naturalFreqs = Eigen::VectorXd::Constant(8, 0.4);
    const integrator::Trajectory tr = integrator::integrate(rot, drv, uniform_start(8, 0.0, 1.0, 7));
    CHECK(sync_report(tr, rot).verdicts.at("conserved"));

    const integrator::Trajectory frozen = from_rows(Eigen::MatrixXd::Constant(50, 3, 0.2) +
                                                        Eigen::VectorXd::Ones(50) * Eigen::RowVector3d(0, 1, 2),
                                                    0.1);
    model::SystemConfig three = model::make_config(graph::complete(3), 1.0, 0.0);
    const SyncReport fr = sync_report(frozen, three);
    CHECK_FALSE(fr.verdicts.at("synchronized"));
    CHECK_FALSE(fr.verdicts.at("deltaBelowHalfPi"));
}
