#pragma once

// Measurements on simulated trajectories: Lyapunov dissipation, decay-rate
// fits, rate bounds, basin radius, Θ_∞, splitting and frequency locking.

#include "rkm/graph.hpp"
#include "rkm/integrator.hpp"
#include "rkm/model.hpp"
#include "rkm/noise.hpp"
#include "rkm/roughpath.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rkm::diagnostics {

inline constexpr double kNormFloor = 1e-13;
inline constexpr double kSyncTolerance = 1e-2;
inline constexpr double kConservationTolerance = 1e-8;

// ---- Lyapunov ---------------------------------------------------------------

struct LyapunovReport {
    double worstMargin = 0.0;  // max over samples of <∇V, f> + d |θ̂|
    double d = 0.0;
    double c2delta = 0.0;
    double fiedler = 0.0;
    int samples = 0;
    int violations = 0;  // margins above tolerance
    double tolerance = 0.0;
};

/// Samples zero-mean states with sup-norm at most δ (half of them on the
/// boundary) and evaluates <θ̂/|θ̂|, f(θ̂)> + d |θ̂| with the natural
/// frequencies removed. Refuses disconnected or signed coupling graphs.
LyapunovReport lyapunov_check(const model::SystemConfig& cfg, int nSamples, std::uint64_t seed = 1,
                              double tolerance = 1e-10);

// ---- decay fits -------------------------------------------------------------

struct DecayFit {
    double rate = 0.0;  // μ̂: slope of -log|x(t)|
    double rSquared = 0.0;
    double tLo = 0.0;
    double tHi = 0.0;
    int points = 0;
};

/// Least squares of -log(values) against times over the last tailFraction of
/// the series, skipping values below kNormFloor. Refuses fewer than 10 usable
/// points.
DecayFit fit_decay_series(const Eigen::VectorXd& times, const Eigen::VectorXd& values, double tailFraction = 0.5);

/// Per-row Euclidean norm of θ - mean(θ).
Eigen::VectorXd deviation_norms(const Eigen::MatrixXd& states);

DecayFit fit_decay_rate(const integrator::Trajectory& traj, double tailFraction = 0.5);

// ---- rate bound and basin ---------------------------------------------------

struct RateBoundReport {
    double d = 0.0;
    double c2delta = 0.0;
    double fiedler = 0.0;
    double cG = 0.0;
    double enEstimate = 0.0;
    double cp = 1.0;
    double bound = 0.0;  // d - (2 + C_G) C_G - C_G E N
    bool positive = false;
};

/// Assembles the rate bound from d, a sampled C_G and the supplied E N
/// estimate (computed at threshold 1/(16 cp)).
RateBoundReport rate_bound(const model::SystemConfig& cfg, double enEstimate, double cp = 1.0,
                                   int cgSamples = 10000);

/// Max spectral norm of the drift Jacobian over random zero-mean states in
/// I_δ (plus the coherent state).
double drift_lipschitz(const model::SystemConfig& cfg, int samples = 2000, std::uint64_t seed = 7);

struct BasinReport {
    double r = 0.0;
    int argminN = 0;
    double eta = 0.0;  // d - L_f (2 + λ) λ
    double lipschitz = 0.0;
    double cG = 0.0;
    double threshold = 0.0;  // λ / (16 C_p C_G)
    std::vector<int> counts;      // N(threshold, 𝐖, [k, k+1])
    std::vector<double> values;   // candidate r for n = 0..nMax-1
    std::string note;
};

/// eps * min_{0 <= n < nMax} exp(η n - λ sum_{k<=n} N_k) with L_V = α = 1.
/// The driver must cover [0, nMax]. With C_G = 0 returns eps and a note.
BasinReport basin_radius_truncated(const model::SystemConfig& cfg, const noise::RoughDriver& driver, double eps,
                                   int nMax, double lambda, double cp = 1.0,
                                   const roughpath::PVarParams& params = {}, int cgSamples = 10000);

// ---- Θ_∞ --------------------------------------------------------------------

struct ThetaInfinityReport {
    double theta0 = 0.0;
    double integral = 0.0;  // compensated integral over [0, T]
    double value = 0.0;     // theta0 + integral
    double rotation = 0.0;  // mean natural frequency times T, excluded from value
    std::vector<double> unitIncrements;  // integral over [k, k+1]
};

/// Θ(0) + ∫ (1/N) sum_i G_ij(θ) d𝐖^j, with the Gubinelli derivative taken from
/// the analytic noise derivatives.
ThetaInfinityReport theta_infinity(const integrator::Trajectory& traj, const noise::RoughDriver& driver,
                                   const model::SystemConfig& cfg);

// ---- splitting --------------------------------------------------------------

/// Wraps into (-π, π].
double wrap_angle(double x);

struct SplittingReport {
    bool verdict = false;
    double maxDeviation = 0.0;
    double side1Deviation = 0.0;
    double side2Deviation = 0.0;
    double commonPhase = 0.0;  // circular mean of the switched terminal state
};

SplittingReport splitting_check(const Eigen::VectorXd& terminal, const graph::BalancePartition& part,
                                double tolerance = kSyncTolerance);
SplittingReport splitting_check(const integrator::Trajectory& traj, const graph::BalancePartition& part,
                                double tolerance = kSyncTolerance);

// ---- frequency synchronization ----------------------------------------------

struct FrequencyReport {
    double deltaMax = 0.0;  // max over the grid of max_i θ_i - min_i θ_i
    bool deltaBelowHalfPi = false;
    std::optional<DecayFit> fit;
    bool alreadySynchronized = false;  // |ϖ̂| stays below the floor
    double rateBound = 0.0;            // K cos(Δ) λ₂ / N, 0 when Δ >= π/2
    bool rateOk = false;               // fitted rate >= 0.9 rateBound
    bool verdict = false;
    double terminalSpread = 0.0;       // max |ϖ̂_i(T)|
    std::string note;
};

/// Requires a trajectory integrated with frequencies.
FrequencyReport frequency_sync_check(const integrator::Trajectory& traj, const model::SystemConfig& cfg,
                                     double tailFraction = 0.5);

struct SmoothedFrequencies {
    double window = 0.0;
    int span = 0;                 // grid steps per window
    Eigen::VectorXd times;        // left endpoints
    Eigen::MatrixXd frequencies;  // (steps - span + 1) x N
    Eigen::VectorXd mean;         // oscillator average
};

struct DistributionalFrequencies {
    Eigen::VectorXd times;
    Eigen::MatrixXd raw;  // per-step differences, steps x N
    std::vector<SmoothedFrequencies> smoothed;
};

inline const std::vector<double> kDefaultWindows{0.01, 0.05, 0.2};

/// (θ(t + w) - θ(t)) / w for each window w (rounded to the grid). Refuses
/// windows shorter than dt or longer than the run.
DistributionalFrequencies distributional_frequencies(const integrator::Trajectory& traj,
                                                     const std::vector<double>& windows = kDefaultWindows);

// ---- order parameter --------------------------------------------------------

struct OrderParameter {
    Eigen::VectorXd r;
    Eigen::VectorXd psi;
};

OrderParameter order_parameter(const integrator::Trajectory& traj);
OrderParameter order_parameter(const Eigen::MatrixXd& theta);

// ---- aggregate report -------------------------------------------------------

struct SyncReport {
    std::optional<DecayFit> fit;
    std::string fitError;
    double terminalDeviation = 0.0;     // max_i |θ_i(T) - Θ(T)|
    double conservationResidual = 0.0;  // max_t |Θ(t) - Θ(0) - ϖ̄ t|
    std::optional<double> thetaInfinity;
    double deltaSup = 0.0;
    std::map<std::string, bool> verdicts;
};

/// fit, terminal deviation, mean-phase drift in the co-rotating frame, Δ and
/// (when a driver is supplied) Θ_∞. Verdicts: "synchronized" (terminal
/// deviation below kSyncTolerance and positive fitted rate), "conserved"
/// (residual below kConservationTolerance), "deltaBelowHalfPi".
SyncReport sync_report(const integrator::Trajectory& traj, const model::SystemConfig& cfg,
                       const noise::RoughDriver* driver = nullptr, double tailFraction = 0.5);

}  // namespace rkm::diagnostics
