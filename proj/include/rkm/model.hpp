#pragma once

// Vector fields of the rough Kuramoto system: drift, noise families and
// their derivatives, reductions, the frequency system and signed switching.

#include "rkm/graph.hpp"
#include "rkm/noise.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace rkm::model {

enum class NoiseKind { sinePolynomial, diagonalSine, custom };

std::string to_string(NoiseKind k);
/// Accepts "sinePolynomial", "diagonalSine", "custom"; throws ParameterError otherwise.
NoiseKind noise_kind_from_string(const std::string& s);

struct SystemConfig {
    double K = 1.0;
    graph::SignedGraph graph;       // coupling 𝒜
    graph::SignedGraph noiseGraph;  // noise graph ℬ
    double sigma = 0.0;
    int nTilde = 1;
    Eigen::VectorXd naturalFreqs;
    /// hurst, m and identicalComponents are used; dt, steps and seed are taken
    /// from this config by fbm_spec().
    noise::FbmSpec fbm;
    NoiseKind noiseKind = NoiseKind::sinePolynomial;
    double T = 1.0;
    double dt = 1.0 / 512.0;
    std::uint64_t seed = 0;
    double delta = std::numbers::pi / 4.0;

    int N() const noexcept { return graph.n(); }
    /// round(T / dt); throws ParameterError if T is not a multiple of dt.
    int steps() const;
    noise::FbmSpec fbm_spec() const;
    /// Throws ParameterError on any violated invariant.
    void validate() const;
};

/// N-oscillator config on `g` with ℬ = 𝒜, ϖ = 0 and m = 1.
SystemConfig make_config(const graph::SignedGraph& g, double K, double sigma, int nTilde = 1);

// ---- drift ------------------------------------------------------------------

/// f_i = ϖ_i + (K/N) sum_j a_ij sin(θ_j - θ_i).
Eigen::VectorXd kuramoto_drift(const Eigen::VectorXd& theta, const SystemConfig& cfg);
/// Jacobian of kuramoto_drift.
Eigen::MatrixXd drift_jacobian(const Eigen::VectorXd& theta, const SystemConfig& cfg);

/// h_i = (K/N) sum_j a_ij cos(θ_j - θ_i)(ϖ_j - ϖ_i).
Eigen::VectorXd frequency_drift(const Eigen::VectorXd& varpi, const Eigen::VectorXd& theta,
                                const SystemConfig& cfg);

// ---- noise ------------------------------------------------------------------

/// G_ij = σ sum_k b_ik sin(θ_i - θ_k)^ñ, identical across the m columns.
Eigen::MatrixXd noise_G(const Eigen::VectorXd& theta, const SystemConfig& cfg);

/// σ sin(θ_i) acting diagonally. With m = N the result is diag(σ sin θ); with
/// m = 1 it is the single column σ sin θ. Other m are rejected.
Eigen::MatrixXd noise_G_diagonal(const Eigen::VectorXd& theta, const SystemConfig& cfg);

/// Dispatches on cfg.noiseKind (custom is rejected).
Eigen::MatrixXd noise_matrix(const Eigen::VectorXd& theta, const SystemConfig& cfg);

/// sum_{j,l} (DG_j · G_l)(x) 𝕎(l, j): the second-order term of a rough Taylor
/// step, with analytic derivatives of the configured family.
Eigen::VectorXd noise_levy_term(const Eigen::VectorXd& x, const SystemConfig& cfg, const Eigen::MatrixXd& area);

/// Matrix M(j, l) = mean_i (DG_j · G_l)_i; the Gubinelli derivative of the
/// mean-phase integrand (1/N) sum_i G_ij.
Eigen::MatrixXd mean_noise_derivative(const Eigen::VectorXd& x, const SystemConfig& cfg);

/// Column-centred G: G̃_ij = G_ij - (1/N) sum_k G_kj.
Eigen::MatrixXd tilde_G(const Eigen::MatrixXd& G);

/// Largest absolute entry of the order-r derivative tensor of G at θ
/// (r = 0..3), computed analytically.
double noise_derivative_sup(const Eigen::VectorXd& theta, const SystemConfig& cfg, int order);

/// C_G = max over r = 0..3 and over `samples` random phase vectors of
/// noise_derivative_sup. Deterministic for a given sampleSeed.
double estimate_CG(const SystemConfig& cfg, int samples = 10000, std::uint64_t sampleSeed = 0x5eedc6);

// ---- reductions and switching -----------------------------------------------

struct ReducedState {
    Eigen::VectorXd thetaHat;
    double Theta = 0.0;
};

ReducedState reduce_state(const Eigen::VectorXd& theta);

/// φ_i = θ_i + π on side 1, θ_i on side 2.
Eigen::VectorXd switching_transform(const Eigen::VectorXd& theta, const graph::BalancePartition& part);
/// Inverse of switching_transform.
Eigen::VectorXd switching_inverse(const Eigen::VectorXd& phi, const graph::BalancePartition& part);
/// c_ij = s_i s_j a_ij (nonnegative when the partition balances g).
graph::SignedGraph switched_graph(const graph::SignedGraph& g, const graph::BalancePartition& part);
/// Config in switched coordinates: 𝒜 -> 𝒞 and b_ik -> (s_i s_k)^ñ b_ik, so
/// that drift and sine-polynomial noise are equivariant.
SystemConfig switched_config(const SystemConfig& cfg, const graph::BalancePartition& part);

// ---- hypothesis report ------------------------------------------------------

struct HypothesisReport {
    bool symmetric = false;
    bool nonnegative = false;
    bool connected = false;
    bool A = false;    // symmetric, nonnegative, connected
    bool AI = false;   // symmetric, nonnegative
    bool AII = false;  // connected and balanced
    bool AIII = false; // balanced
    bool B = false;    // identical natural frequencies
    bool HG = false;   // G(0) = 0 and rotation invariant (sinePolynomial family)
    bool HGplus = false;   // column sums of G vanish (ñ odd, symmetric ℬ)
    bool HGIplus = false;  // column sums vanish on every component of 𝒜
    bool HWplus = false;   // identical driver components
    bool HGII = false;     // diagonal noise family
    std::vector<int> components;
    std::optional<graph::BalancePartition> partition;
    double fiedler = 0.0;
    double CG = 0.0;
    double d = 0.0;  // K C_{2δ} λ₂ / N
    std::vector<std::string> warnings;
};

HypothesisReport validate_hypotheses(const SystemConfig& cfg, int cgSamples = 2000);

/// sin(2δ) / (2δ), with the limit 1 at δ = 0.
double c_two_delta(double delta);

}  // namespace rkm::model
