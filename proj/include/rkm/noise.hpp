#pragma once

// Fractional Brownian motion sampling and the level-2 geometric lift.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rkm::noise {

struct FbmSpec {
    double hurst = 0.5;
    int m = 1;
    double dt = 1.0 / 512.0;
    int steps = 512;
    std::uint64_t seed = 0;
    bool identicalComponents = false;

    /// Throws ParameterError unless 1/3 < hurst <= 1/2, dt > 0, steps >= 1, m >= 1.
    void validate() const;
};

enum class FbmMethod { automatic, circulant, cholesky };

/// Autocovariance of unit-step fractional Gaussian noise at lag k.
double fgn_autocovariance(double hurst, long k);

/// Unit-step fGn of length n (Davies-Harte, Cholesky fallback when the
/// circulant embedding has negative eigenvalues). Throws NumericalError when
/// neither method succeeds.
Eigen::VectorXd sample_fgn(double hurst, int n, std::uint64_t seed,
                           FbmMethod method = FbmMethod::automatic);

/// (steps+1) x m fBm samples on t_k = k dt, first row zero.
Eigen::MatrixXd sample_fbm(const FbmSpec& spec, FbmMethod method = FbmMethod::automatic);

/// m-dimensional grid path with second-level increments on each fine interval.
class RoughDriver {
public:
    RoughDriver() = default;
    RoughDriver(Eigen::MatrixXd w, std::vector<Eigen::MatrixXd> areas, double dt, double hurst);

    int m() const noexcept { return static_cast<int>(w_.cols()); }
    int steps() const noexcept { return static_cast<int>(w_.rows()) - 1; }
    double dt() const noexcept { return dt_; }
    double hurst() const noexcept { return hurst_; }
    double time(int k) const noexcept { return k * dt_; }
    double horizon() const noexcept { return steps() * dt_; }

    const Eigen::MatrixXd& w() const noexcept { return w_; }
    const std::vector<Eigen::MatrixXd>& areas() const noexcept { return areas_; }

    /// W_{t_k, t_{k+1}}.
    Eigen::VectorXd increment(int k) const { return (w_.row(k + 1) - w_.row(k)).transpose(); }
    /// W_{t_i, t_j}.
    Eigen::VectorXd increment(int i, int j) const { return (w_.row(j) - w_.row(i)).transpose(); }
    /// 𝕎_{t_k, t_{k+1}}.
    const Eigen::MatrixXd& area(int k) const { return areas_[static_cast<std::size_t>(k)]; }
    /// 𝕎_{t_i, t_j} by Chen composition of the fine intervals, O((j-i) m^2).
    Eigen::MatrixXd area(int i, int j) const;

    /// Grid index of time t; throws ParameterError if t is not on the grid
    /// (relative tolerance 1e-9) or outside [0, horizon].
    int index_of(double t) const;

    bool operator==(const RoughDriver& o) const;

private:
    Eigen::MatrixXd w_;
    std::vector<Eigen::MatrixXd> areas_;
    double dt_ = 0.0;
    double hurst_ = 0.0;
};

/// 𝕎_st = 𝕎_su + 𝕎_ut + W_su ⊗ W_ut.
Eigen::MatrixXd chen_compose(const Eigen::MatrixXd& areaSU, const Eigen::MatrixXd& areaUT,
                             const Eigen::VectorXd& wSU, const Eigen::VectorXd& wUT);

/// Piecewise-linear lift: 𝕎 = ½ ΔW ⊗ ΔW on each fine interval.
RoughDriver lift_path(const Eigen::MatrixXd& path, double dt, double hurst = 0.0);

/// sample_fbm followed by lift_path.
RoughDriver sample_driver(const FbmSpec& spec, FbmMethod method = FbmMethod::automatic);

/// Keeps every `factor`-th grid point; coarse areas are Chen aggregates of
/// the fine ones, so the coarse driver is the same rough path seen on a
/// coarser grid.
RoughDriver restrict_driver(const RoughDriver& fine, int factor);

/// Sub-driver on grid indices [i0, i1], rebased so w starts at zero.
RoughDriver slice_driver(const RoughDriver& d, int i0, int i1);

void save_driver(const RoughDriver& d, const std::filesystem::path& file);
RoughDriver load_driver(const std::filesystem::path& file);

struct KolmogorovReport {
    double p = 0.0;
    double q = 0.0;
    std::vector<double> scales;   // |t - s|
    std::vector<double> moments;  // E(|W_st|^p + |𝕎_st|^q)
    double slope = 0.0;
    double intercept = 0.0;
    double threshold = 0.0;  // p H - 0.1
    bool pass = false;
};

/// Monte Carlo moments over dyadic intervals of [0, 1] (spec.dt is replaced by
/// 1/steps). Refuses fewer than 100 samples.
KolmogorovReport kolmogorov_check(const FbmSpec& spec, double p, int nSamples);

}  // namespace rkm::noise
