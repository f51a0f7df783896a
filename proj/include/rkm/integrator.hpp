#pragma once

// Time stepping of rough differential equations dy = f(y) dt + G(y) d𝐖 on the
// grid of a RoughDriver.

#include "rkm/model.hpp"
#include "rkm/noise.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rkm::integrator {

enum class Scheme { davie, heun };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

/// State-space view of an RDE used by the steppers.
class RdeSystem {
public:
    virtual ~RdeSystem() = default;
    virtual int dim() const = 0;
    virtual int m() const = 0;
    virtual Eigen::VectorXd drift(const Eigen::VectorXd& y) const = 0;
    virtual Eigen::MatrixXd diffusion(const Eigen::VectorXd& y) const = 0;
    /// sum_{j,l} (DG_j · G_l)(y) 𝕎(l, j).
    virtual Eigen::VectorXd levy_term(const Eigen::VectorXd& y, const Eigen::MatrixXd& area) const = 0;
};

/// Phase equation of the configured model. With `centred`, the noise is
/// replaced by its column-centred version G̃ (the reduced system); the
/// second-order term is centred accordingly, which is exact for the
/// rotation-invariant sine-polynomial family.
class KuramotoSystem final : public RdeSystem {
public:
    explicit KuramotoSystem(const model::SystemConfig& cfg, bool centred = false);
    int dim() const override { return cfg_.N(); }
    int m() const override { return cfg_.fbm.m; }
    Eigen::VectorXd drift(const Eigen::VectorXd& y) const override;
    Eigen::MatrixXd diffusion(const Eigen::VectorXd& y) const override;
    Eigen::VectorXd levy_term(const Eigen::VectorXd& y, const Eigen::MatrixXd& area) const override;

private:
    const model::SystemConfig& cfg_;
    bool centred_;
};

/// Frequency equation dϖ = h(ϖ; θ) dt + G(ϖ) d𝐖 with the phases frozen at θ.
class FrequencySystem final : public RdeSystem {
public:
    FrequencySystem(const model::SystemConfig& cfg, const Eigen::VectorXd& theta);
    int dim() const override { return cfg_.N(); }
    int m() const override { return cfg_.fbm.m; }
    Eigen::VectorXd drift(const Eigen::VectorXd& y) const override;
    Eigen::MatrixXd diffusion(const Eigen::VectorXd& y) const override;
    Eigen::VectorXd levy_term(const Eigen::VectorXd& y, const Eigen::MatrixXd& area) const override;

private:
    const model::SystemConfig& cfg_;
    const Eigen::VectorXd& theta_;
};

/// dy = a y dt + c y dW, scalar state driven by the first driver component.
/// Its geometric solution is y0 exp(a t + c W_t).
class LinearNoiseSystem final : public RdeSystem {
public:
    LinearNoiseSystem(double a, double c) : a_(a), c_(c) {}
    int dim() const override { return 1; }
    int m() const override { return 1; }
    Eigen::VectorXd drift(const Eigen::VectorXd& y) const override { return a_ * y; }
    Eigen::MatrixXd diffusion(const Eigen::VectorXd& y) const override { return c_ * y; }
    Eigen::VectorXd levy_term(const Eigen::VectorXd& y, const Eigen::MatrixXd& area) const override {
        return c_ * c_ * area(0, 0) * y;
    }

private:
    double a_;
    double c_;
};

/// y + f dt + G ΔW + sum_{j,l} (DG_j G_l) 𝕎(l, j).
Eigen::VectorXd step_davie(const RdeSystem& sys, const Eigen::VectorXd& y, double dt,
                           const Eigen::VectorXd& inc, const Eigen::MatrixXd& area);
/// Predictor-corrector: ỹ = y + f dt + G ΔW, then trapezoidal averages of f and G.
Eigen::VectorXd step_heun(const RdeSystem& sys, const Eigen::VectorXd& y, double dt, const Eigen::VectorXd& inc);
Eigen::VectorXd step(Scheme scheme, const RdeSystem& sys, const Eigen::VectorXd& y, double dt,
                     const Eigen::VectorXd& inc, const Eigen::MatrixXd& area);

/// Phases beyond this magnitude abort integration.
inline constexpr double kBlowUpThreshold = 1e6;

/// Rows are grid points. Throws IntegrationAborted when the state becomes
/// non-finite or exceeds kBlowUpThreshold.
Eigen::MatrixXd integrate_system(const RdeSystem& sys, const Eigen::VectorXd& y0, const noise::RoughDriver& driver,
                                 Scheme scheme);

struct Trajectory {
    Eigen::VectorXd times;
    Eigen::MatrixXd theta;  // (steps+1) x N
    Eigen::VectorXd meanPhase;
    std::optional<Eigen::MatrixXd> varpi;
    Scheme scheme = Scheme::davie;
    double dt = 0.0;

    int steps() const noexcept { return static_cast<int>(theta.rows()) - 1; }
    int N() const noexcept { return static_cast<int>(theta.cols()); }
};

struct IntegrateOptions {
    Scheme scheme = Scheme::davie;
    bool withFrequencies = false;
    /// Integrate the reduced system with column-centred noise G̃.
    bool centredNoise = false;
};

/// Integrates the phase system (and, optionally, the frequency system started
/// at ϖ(0) = cfg.naturalFreqs, stepped with θ_k). The driver grid must match
/// cfg.dt and cover at least cfg.steps() intervals.
Trajectory integrate(const model::SystemConfig& cfg, const noise::RoughDriver& driver,
                     const Eigen::VectorXd& theta0, const IntegrateOptions& opts = {});

struct ConvergenceReport {
    std::vector<double> dts;
    std::vector<double> errors;
    double order = 0.0;
};

/// Number of dyadic refinements between the finest measured level and the
/// reference solution.
inline constexpr int kReferenceLevels = 3;

/// Same noise realised on every level: the reference driver is sampled on the
/// cfg grid, measured levels are its restrictions by 2^(levels+2) down to
/// 2^kReferenceLevels. Errors are terminal-state distances to the reference
/// solution; order is minus the slope of log2(error) against level. Needs
/// levels >= 3.
ConvergenceReport self_convergence(const model::SystemConfig& cfg, const Eigen::VectorXd& theta0, Scheme scheme,
                                   int levels);
ConvergenceReport self_convergence(const RdeSystem& sys, const Eigen::VectorXd& y0,
                                   const noise::RoughDriver& finest, Scheme scheme, int levels);

/// Least-squares slope of log2(errors) against index, negated.
double empirical_order(const std::vector<double>& errors);

/// CSV with header t,theta_0..theta_{N-1}[,varpi_0..], values printed with
/// 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace rkm::integrator
