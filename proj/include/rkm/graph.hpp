#pragma once

// Coupling and noise graphs: Laplacian, spectrum, connectivity, Cheeger
// constant and signed-graph balance.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rkm::graph {

/// Weights with magnitude below this are treated as absent edges.
inline constexpr double kEdgeEpsilon = 1e-14;

/// Symmetric weighted graph with zero diagonal. Negative weights mark
/// antagonistic (signed) edges.
class SignedGraph {
public:
    SignedGraph() = default;

    /// Validates symmetry (exact) and zero diagonal; entries below
    /// kEdgeEpsilon in magnitude are zeroed.
    explicit SignedGraph(Eigen::MatrixXd weights);

    /// Builds from a possibly asymmetric matrix by averaging with its transpose.
    static SignedGraph symmetrized(const Eigen::MatrixXd& raw);

    int n() const noexcept { return static_cast<int>(weights_.rows()); }
    const Eigen::MatrixXd& weights() const noexcept { return weights_; }
    double weight(int i, int j) const { return weights_(i, j); }
    bool hasEdge(int i, int j) const { return weights_(i, j) != 0.0; }
    bool isNonnegative() const;
    bool hasNegativeEdge() const { return !isNonnegative(); }

    /// Weighted degree sum_j |w_ij| (absolute values, so it is meaningful on
    /// signed input as well).
    Eigen::VectorXd absDegrees() const;

    bool operator==(const SignedGraph& other) const { return weights_ == other.weights_; }

private:
    Eigen::MatrixXd weights_;
};

struct GraphSpectrum {
    Eigen::VectorXd eigenvalues;  // nondecreasing
    double fiedler = 0.0;
    int componentCount = 0;
    double zeroTolerance = 0.0;
};

/// Per-vertex side label: 1 for the flipped camp, 2 for the reference camp.
struct BalancePartition {
    std::vector<int> side;

    std::vector<int> members(int label) const;
    /// +1 on side 2, -1 on side 1.
    std::vector<int> signs() const;
};

struct CheegerBounds {
    double h = 0.0;
    double maxDegree = 0.0;
    double lower = 0.0;        // h^2 / (2 Delta)
    double fiedler = 0.0;      // lambda_2
    double upper = 0.0;        // 2 h
    double refinedUpperOnH = 0.0;  // sqrt(lambda_2 (2 Delta - lambda_2))
    bool sandwichHolds = false;
    bool refinedHolds = false;
};

Eigen::MatrixXd laplacian(const SignedGraph& g);

/// Throws NumericalError if the symmetric eigensolver does not converge.
GraphSpectrum spectrum(const SignedGraph& g);

/// Component label per vertex, numbered 0.. in order of the lowest vertex.
std::vector<int> connected_components(const SignedGraph& g);
int component_count(const std::vector<int>& labels);

/// Two-colouring where positive edges copy the label and negative edges flip
/// it. Each component's lowest vertex is placed on side 2, so an all-positive
/// graph yields an empty side 1. Returns nullopt on a contradiction.
std::optional<BalancePartition> balance_partition(const SignedGraph& g);

inline constexpr int kDefaultCheegerCap = 20;

/// Exhaustive minimum of |dX|/|X| over 0 < |X| <= n/2 with weighted boundary.
/// Refuses negative weights, n < 2, or n above `cap`.
double cheeger_constant(const SignedGraph& g, int cap = kDefaultCheegerCap);

CheegerBounds cheeger_bounds(const SignedGraph& g, int cap = kDefaultCheegerCap);

// ---- builders ---------------------------------------------------------------

SignedGraph complete(int n, double weight = 1.0);
SignedGraph cycle(int n);
SignedGraph path(int n);
/// Ring lattice: i ~ j when their circular distance is at most k.
SignedGraph kNeighbor(int n, int k);
/// Each pair is +1 with probability p1, -1 with probability q1, else absent.
SignedGraph erdosRenyiSigned(int n, double p1, double q1, std::uint64_t seed);
/// Complete signed graph: +1 inside each block, -1 across. Balanced.
SignedGraph twoCommunity(int n1, int n2);
/// Disjoint union of complete graphs of the given sizes.
SignedGraph cliques(const std::vector<int>& sizes);
SignedGraph empty(int n);

/// Lines "i j w" (0-based, '#' comments). Missing trailing weight defaults to
/// 1. The vertex count is max index + 1 unless `n` is given.
SignedGraph load_edge_list(const std::filesystem::path& file, std::optional<int> n = std::nullopt);
SignedGraph parse_edge_list(const std::string& text, std::optional<int> n = std::nullopt);

/// Family specs such as "complete:10", "cycle:6", "path:5", "kNeighbor:10:2",
/// "erdosRenyiSigned:8:0.5:0.2:7", "twoCommunity:4:4", "cliques:3,4",
/// "empty:4", or "file:<path>".
SignedGraph from_spec(const std::string& spec);

/// Relabels vertices: result(perm[i], perm[j]) = g(i, j).
SignedGraph permuted(const SignedGraph& g, const std::vector<int>& perm);

}  // namespace rkm::graph
