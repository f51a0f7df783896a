#include "rkm/graph.hpp"

#include "rkm/error.hpp"
#include "rkm/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

namespace rkm::graph {

SignedGraph::SignedGraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols()) {
        throw ParameterError("graph weights must be square");
    }
    const auto n = weights_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (weights_(i, i) != 0.0) {
            throw ParameterError("graph weights must have a zero diagonal");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!std::isfinite(weights_(i, j))) {
                throw ParameterError("graph weights must be finite");
            }
            if (weights_(i, j) != weights_(j, i)) {
                throw ParameterError("graph weights must be symmetric");
            }
        }
    }
    weights_ = (weights_.array().abs() < kEdgeEpsilon).select(0.0, weights_);
}

SignedGraph SignedGraph::symmetrized(const Eigen::MatrixXd& raw) {
    if (raw.rows() != raw.cols()) {
        throw ParameterError("graph weights must be square");
    }
    Eigen::MatrixXd w = 0.5 * (raw + raw.transpose());
    w.diagonal().setZero();
    return SignedGraph(std::move(w));
}

bool SignedGraph::isNonnegative() const {
    return (weights_.array() >= 0.0).all();
}

Eigen::VectorXd SignedGraph::absDegrees() const {
    return weights_.cwiseAbs().rowwise().sum();
}

std::vector<int> BalancePartition::members(int label) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < side.size(); ++i) {
        if (side[i] == label) out.push_back(static_cast<int>(i));
    }
    return out;
}

std::vector<int> BalancePartition::signs() const {
    std::vector<int> s(side.size());
    std::transform(side.begin(), side.end(), s.begin(), [](int l) { return l == 1 ? -1 : 1; });
    return s;
}

Eigen::MatrixXd laplacian(const SignedGraph& g) {
    const Eigen::MatrixXd& w = g.weights();
    Eigen::MatrixXd L = -w;
    for (int i = 0; i < g.n(); ++i) {
        double d = 0.0;
        for (int j = 0; j < g.n(); ++j) {
            if (j != i) d += w(i, j);
        }
        L(i, i) = d;
    }
    return L;
}

GraphSpectrum spectrum(const SignedGraph& g) {
    GraphSpectrum out;
    const int n = g.n();
    if (n == 0) return out;
    const Eigen::MatrixXd L = laplacian(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Laplacian eigensolver did not converge");
    }
    out.eigenvalues = solver.eigenvalues();  // ascending
    const double norm = out.eigenvalues.cwiseAbs().maxCoeff();
    out.zeroTolerance = 1e-9 * std::max(1.0, norm);
    out.componentCount = static_cast<int>(
        (out.eigenvalues.array() < out.zeroTolerance).count());
    out.fiedler = out.componentCount < n ? out.eigenvalues(out.componentCount) : 0.0;
    return out;
}

std::vector<int> connected_components(const SignedGraph& g) {
    const int n = g.n();
    std::vector<int> label(n, -1);
    int next = 0;
    std::deque<int> queue;
    for (int root = 0; root < n; ++root) {
        if (label[root] >= 0) continue;
        label[root] = next;
        queue.push_back(root);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v = 0; v < n; ++v) {
                if (label[v] < 0 && g.hasEdge(u, v)) {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        ++next;
    }
    return label;
}

int component_count(const std::vector<int>& labels) {
    if (labels.empty()) return 0;
    return *std::max_element(labels.begin(), labels.end()) + 1;
}

std::optional<BalancePartition> balance_partition(const SignedGraph& g) {
    const int n = g.n();
    BalancePartition part;
    part.side.assign(n, 0);
    std::deque<int> queue;
    for (int root = 0; root < n; ++root) {
        if (part.side[root] != 0) continue;
        part.side[root] = 2;
        queue.push_back(root);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v = 0; v < n; ++v) {
                const double w = g.weight(u, v);
                if (w == 0.0) continue;
                const int want = w > 0.0 ? part.side[u] : 3 - part.side[u];
                if (part.side[v] == 0) {
                    part.side[v] = want;
                    queue.push_back(v);
                } else if (part.side[v] != want) {
                    return std::nullopt;
                }
            }
        }
    }
    return part;
}

double cheeger_constant(const SignedGraph& g, int cap) {
    const int n = g.n();
    if (!g.isNonnegative()) {
        throw ParameterError("cheeger_constant requires nonnegative weights");
    }
    if (n < 2) {
        throw Refusal("cheeger_constant needs at least two vertices");
    }
    if (n > cap || n > 30) {
        throw Refusal("cheeger_constant: n = " + std::to_string(n) + " exceeds the exhaustive-search cap of " +
                      std::to_string(std::min(cap, 30)) +
                      " (minimum-ratio cut is NP-hard in general)");
    }
    const Eigen::MatrixXd& w = g.weights();
    const Eigen::VectorXd deg = w.rowwise().sum();

    // Gray-code walk over all subsets; toward[v] = total weight from v into X.
    Eigen::VectorXd toward = Eigen::VectorXd::Zero(n);
    std::vector<bool> in(n, false);
    double boundary = 0.0;
    int size = 0;
    double best = std::numeric_limits<double>::infinity();
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < total; ++k) {
        const int v = std::countr_zero(k);
        if (!in[v]) {
            boundary += deg(v) - 2.0 * toward(v);
            in[v] = true;
            ++size;
            toward += w.col(v);
        } else {
            boundary -= deg(v) - 2.0 * toward(v);
            in[v] = false;
            --size;
            toward -= w.col(v);
        }
        if (size > 0 && 2 * size <= n) {
            best = std::min(best, boundary / size);
        }
    }
    // Incremental updates accumulate rounding; snap tiny negatives.
    return std::max(best, 0.0);
}

CheegerBounds cheeger_bounds(const SignedGraph& g, int cap) {
    CheegerBounds b;
    b.h = cheeger_constant(g, cap);
    b.maxDegree = g.weights().rowwise().sum().maxCoeff();
    b.fiedler = spectrum(g).fiedler;
    b.lower = b.h * b.h / (2.0 * b.maxDegree);
    b.upper = 2.0 * b.h;
    b.refinedUpperOnH = std::sqrt(std::max(0.0, b.fiedler * (2.0 * b.maxDegree - b.fiedler)));
    constexpr double tol = 1e-9;
    b.sandwichHolds = b.lower <= b.fiedler + tol && b.fiedler <= b.upper + tol;
    b.refinedHolds = b.h <= b.refinedUpperOnH + tol;
    return b;
}

// ---- builders ---------------------------------------------------------------

namespace {

void require_n(int n, int minimum = 1) {
    if (n < minimum) {
        throw ParameterError("graph size must be at least " + std::to_string(minimum));
    }
}

}  // namespace

SignedGraph complete(int n, double weight) {
    require_n(n);
    Eigen::MatrixXd w = Eigen::MatrixXd::Constant(n, n, weight);
    w.diagonal().setZero();
    return SignedGraph(std::move(w));
}

SignedGraph cycle(int n) {
    require_n(n, 3);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        w(i, j) = w(j, i) = 1.0;
    }
    return SignedGraph(std::move(w));
}

SignedGraph path(int n) {
    require_n(n);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) w(i, i + 1) = w(i + 1, i) = 1.0;
    return SignedGraph(std::move(w));
}

SignedGraph kNeighbor(int n, int k) {
    require_n(n);
    if (k < 1) throw ParameterError("kNeighbor: k must be >= 1");
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int d = std::abs(i - j);
            if (i != j && std::min(d, n - d) <= k) w(i, j) = 1.0;
        }
    }
    return SignedGraph(std::move(w));
}

SignedGraph erdosRenyiSigned(int n, double p1, double q1, std::uint64_t seed) {
    require_n(n);
    if (p1 < 0.0 || q1 < 0.0 || p1 + q1 > 1.0) {
        throw ParameterError("erdosRenyiSigned: need p1, q1 >= 0 and p1 + q1 <= 1");
    }
    Rng rng(derive_seed(seed, seed_purpose::kGraph, 0));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double r = u(rng);
            const double v = r < p1 ? 1.0 : (r < p1 + q1 ? -1.0 : 0.0);
            w(i, j) = w(j, i) = v;
        }
    }
    return SignedGraph(std::move(w));
}

SignedGraph twoCommunity(int n1, int n2) {
    require_n(n1);
    require_n(n2);
    const int n = n1 + n2;
    Eigen::MatrixXd w(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            w(i, j) = i == j ? 0.0 : (((i < n1) == (j < n1)) ? 1.0 : -1.0);
        }
    }
    return SignedGraph(std::move(w));
}

SignedGraph cliques(const std::vector<int>& sizes) {
    int n = 0;
    for (int s : sizes) {
        require_n(s);
        n += s;
    }
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    int offset = 0;
    for (int s : sizes) {
        w.block(offset, offset, s, s).setOnes();
        offset += s;
    }
    w.diagonal().setZero();
    return SignedGraph(std::move(w));
}

SignedGraph empty(int n) {
    require_n(n);
    return SignedGraph(Eigen::MatrixXd::Zero(n, n));
}

SignedGraph parse_edge_list(const std::string& text, std::optional<int> n) {
    struct Edge {
        int i, j;
        double w;
    };
    std::vector<Edge> edges;
    int maxIndex = -1;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long long i = 0, j = 0;
        if (!(ls >> i)) continue;  // blank line
        if (!(ls >> j)) {
            throw ParameterError("edge list line " + std::to_string(lineNo) + ": expected 'i j [w]'");
        }
        double w = 1.0;
        if (!(ls >> w)) w = 1.0;
        if (i < 0 || j < 0) {
            throw ParameterError("edge list line " + std::to_string(lineNo) + ": negative vertex index");
        }
        if (i == j) {
            throw ParameterError("edge list line " + std::to_string(lineNo) + ": self loop");
        }
        edges.push_back({static_cast<int>(i), static_cast<int>(j), w});
        maxIndex = std::max({maxIndex, static_cast<int>(i), static_cast<int>(j)});
    }
    const int size = n.value_or(maxIndex + 1);
    if (maxIndex >= size) {
        throw ParameterError("edge list references vertex " + std::to_string(maxIndex) +
                             " but n = " + std::to_string(size));
    }
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(size, size);
    for (const auto& e : edges) {
        w(e.i, e.j) = e.w;
        w(e.j, e.i) = e.w;
    }
    return SignedGraph(std::move(w));
}

SignedGraph load_edge_list(const std::filesystem::path& file, std::optional<int> n) {
    std::ifstream in(file);
    if (!in) throw ParameterError("cannot open edge list " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_edge_list(ss.str(), n);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

int to_int(const std::string& s, const std::string& spec) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParameterError("graph spec '" + spec + "': '" + s + "' is not an integer");
    }
}

double to_double(const std::string& s, const std::string& spec) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParameterError("graph spec '" + spec + "': '" + s + "' is not a number");
    }
}

}  // namespace

SignedGraph from_spec(const std::string& spec) {
    if (spec.rfind("file:", 0) == 0) return load_edge_list(spec.substr(5));
    const auto parts = split(spec, ':');
    if (parts.empty()) throw ParameterError("empty graph spec");
    const std::string& kind = parts[0];
    auto arg = [&](std::size_t k) -> const std::string& {
        if (k >= parts.size()) throw ParameterError("graph spec '" + spec + "' is missing arguments");
        return parts[k];
    };
    if (kind == "complete" || kind == "allToAll") return complete(to_int(arg(1), spec));
    if (kind == "cycle") return cycle(to_int(arg(1), spec));
    if (kind == "path") return path(to_int(arg(1), spec));
    if (kind == "empty") return empty(to_int(arg(1), spec));
    if (kind == "kNeighbor") return kNeighbor(to_int(arg(1), spec), to_int(arg(2), spec));
    if (kind == "twoCommunity") return twoCommunity(to_int(arg(1), spec), to_int(arg(2), spec));
    if (kind == "erdosRenyiSigned") {
        return erdosRenyiSigned(to_int(arg(1), spec), to_double(arg(2), spec), to_double(arg(3), spec),
                                static_cast<std::uint64_t>(to_int(arg(4), spec)));
    }
    if (kind == "cliques") {
        std::vector<int> sizes;
        for (const auto& s : split(arg(1), ',')) sizes.push_back(to_int(s, spec));
        return cliques(sizes);
    }
    throw ParameterError("unknown graph family '" + kind + "'");
}

SignedGraph permuted(const SignedGraph& g, const std::vector<int>& perm) {
    const int n = g.n();
    if (static_cast<int>(perm.size()) != n) throw ParameterError("permutation size mismatch");
    Eigen::MatrixXd w(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) w(perm[i], perm[j]) = g.weight(i, j);
    }
    return SignedGraph(std::move(w));
}

}  // namespace rkm::graph
