#pragma once

// p-variation seminorms on grid paths, greedy times, and the compensated
// rough integral.

#include "rkm/noise.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rkm::roughpath {

/// Default variation exponent. p = 3 satisfies p H >= 1 for every Hurst index
/// in (1/3, 1/2], so one value serves all supported drivers.
inline constexpr double kDefaultP = 3.0;

struct PVarParams {
    double p = kDefaultP;
    double q() const noexcept { return p / 2.0; }
    /// Throws ParameterError unless p >= 2.
    void validate() const;
};

/// Supremum over grid partitions of [i0, i1] of sum |y_v - y_u|^p, raised to
/// 1/p. Rows of `path` are grid points; increments use the Euclidean norm.
/// O((i1-i0)^2) dynamic programme. Empty interval gives 0.
double p_variation(const Eigen::MatrixXd& path, double p, int i0, int i1);
double p_variation(const Eigen::MatrixXd& path, double p);

/// (|W|_{p-var}^p + |𝕎|_{q-var}^q)^{1/p} on grid indices [i0, i1]; level-2
/// norms are Frobenius.
double rough_pvar(const noise::RoughDriver& d, const PVarParams& params, int i0, int i1);
double rough_pvar(const noise::RoughDriver& d, const PVarParams& params);

/// Incremental rough p-variation from a fixed start index. extend() appends
/// the next grid point in O(len m^2); value() is the seminorm on
/// [start, current].
class RoughPVarScanner {
public:
    RoughPVarScanner(const noise::RoughDriver& d, const PVarParams& params, int start);

    int start() const noexcept { return start_; }
    int current() const noexcept { return start_ + static_cast<int>(bestW_.size()) - 1; }
    void extend();
    double value() const;

private:
    const noise::RoughDriver& d_;
    double p_;
    double q_;
    int start_;
    std::vector<double> bestW_;
    std::vector<double> bestA_;
    std::vector<double> areas_;  // 𝕎_{i, current} for i = start..current, each m*m
};

struct GreedyPartition {
    std::vector<double> taus;
    std::vector<int> indices;
    int count = 0;
    double gamma = 0.0;
    double cp = 1.0;
};

/// Greedy times on [i0, i1]: tau_{k+1} is the first grid point where the rough
/// seminorm on [tau_k, t] reaches gamma, else i1. count is the number of
/// intervals, so a quiet interval yields count = 1. `cp` is recorded only.
GreedyPartition greedy_times(const noise::RoughDriver& d, double gamma, int i0, int i1,
                             const PVarParams& params, double cp = 1.0);
GreedyPartition greedy_times(const noise::RoughDriver& d, double gamma, double a, double b,
                             const PVarParams& params, double cp = 1.0);

struct EnEstimate {
    double mean = 0.0;
    double standardError = 0.0;
    int trials = 0;
    double gamma = 0.0;
    std::vector<int> counts;
};

/// Monte Carlo mean of greedy_times(...).count on [0, 1] over independent
/// drivers (seeds derived from spec.seed). spec must cover [0, 1] on its grid.
/// Refuses trials < 30.
EnEstimate estimate_EN(const noise::FbmSpec& spec, double gamma, const PVarParams& params, int trials);

/// Compensated Riemann sum over fine intervals of [i0, i1]:
///   sum_k  Y_k . W_{k,k+1} + sum_{j,l} Y'_k(j, l) 𝕎_{k,k+1}(l, j).
/// Y has driver.steps()+1 rows and m columns; Yprime has one m x m matrix per
/// grid point, Y'(j, l) being the derivative of Y^j along W^l.
double rough_integral(const Eigen::MatrixXd& Y, const std::vector<Eigen::MatrixXd>& Yprime,
                      const noise::RoughDriver& d, int i0, int i1);
double rough_integral(const Eigen::MatrixXd& Y, const std::vector<Eigen::MatrixXd>& Yprime,
                      const noise::RoughDriver& d);

}  // namespace rkm::roughpath
