#pragma once

// Independent oracles and generators shared by the test binaries.

#include "rkm/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Rng = std::mt19937_64;

/// Cyclic Jacobi rotations; eigenvalues sorted ascending.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, int sweeps = 100) {
    const int n = static_cast<int>(a.rows());
    for (int s = 0; s < sweeps; ++s) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Laplacian rebuilt entry by entry.
inline Eigen::MatrixXd laplacian(const Eigen::MatrixXd& w) {
    const int n = static_cast<int>(w.rows());
    Eigen::MatrixXd L(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) {
                L(i, j) = -w(i, j);
            } else {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += k == i ? 0.0 : w(i, k);
                L(i, j) = s;
            }
        }
    }
    return L;
}

/// Warshall transitive closure; returns the number of reachability classes
/// and whether i, j share a class.
inline std::vector<std::vector<bool>> reachability(const Eigen::MatrixXd& w) {
    const int n = static_cast<int>(w.rows());
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) {
        r[i][i] = true;
        for (int j = 0; j < n; ++j)
            if (w(i, j) != 0.0) r[i][j] = true;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (r[i][k] && r[k][j]) r[i][j] = true;
    return r;
}

inline int reachability_classes(const Eigen::MatrixXd& w) {
    const auto r = reachability(w);
    const int n = static_cast<int>(w.rows());
    int classes = 0;
    for (int i = 0; i < n; ++i) {
        bool first = true;
        for (int j = 0; j < i; ++j)
            if (r[i][j]) first = false;
        if (first) ++classes;
    }
    return classes;
}

/// True when some labelling in {1,2}^n makes every positive edge internal and
/// every negative edge crossing.
inline bool balanced_exhaustive(const Eigen::MatrixXd& w) {
    const int n = static_cast<int>(w.rows());
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            for (int j = i + 1; j < n && ok; ++j) {
                if (w(i, j) == 0.0) continue;
                const bool same = ((mask >> i) & 1u) == ((mask >> j) & 1u);
                ok = w(i, j) > 0 ? same : !same;
            }
        }
        if (ok) return true;
    }
    return false;
}

/// min |dX|/|X| over subsets with 0 < |X| <= n/2, plain bitmask loop.
inline double cheeger_exhaustive(const Eigen::MatrixXd& w) {
    const int n = static_cast<int>(w.rows());
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        int size = 0;
        for (int i = 0; i < n; ++i) size += (mask >> i) & 1u;
        if (2 * size > n) continue;
        double cut = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!((mask >> i) & 1u)) continue;
            for (int j = 0; j < n; ++j)
                if (!((mask >> j) & 1u)) cut += w(i, j);
        }
        best = std::min(best, cut / size);
    }
    return best;
}

/// Random symmetric nonnegative weights on n vertices; each pair present
/// with probability p, weight 1 or uniform in [0.2, 2].
inline Eigen::MatrixXd random_weights(int n, double p, bool weighted, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0), wt(0.2, 2.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (u(rng) < p) w(i, j) = w(j, i) = weighted ? wt(rng) : 1.0;
        }
    }
    return w;
}

/// Random connected nonnegative graph (resamples until connected).
inline rkm::graph::SignedGraph random_connected(int n, Rng& rng, bool weighted = false) {
    std::uniform_real_distribution<double> u(0.3, 0.9);
    for (;;) {
        Eigen::MatrixXd w = random_weights(n, u(rng), weighted, rng);
        if (reachability_classes(w) == 1) return rkm::graph::SignedGraph(w);
    }
}

/// Random signed weights in {-1, 0, +1}.
inline Eigen::MatrixXd random_signed(int n, double p1, double q1, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double r = u(rng);
            const double v = r < p1 ? 1.0 : (r < p1 + q1 ? -1.0 : 0.0);
            w(i, j) = w(j, i) = v;
        }
    }
    return w;
}

/// Maximum partition sum of |x_v - x_u|^p over all subsets of interior points.
inline double pvar_exhaustive(const Eigen::MatrixXd& path, double p) {
    const int n = static_cast<int>(path.rows());
    if (n < 2) return 0.0;
    const int interior = n - 2;
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << interior); ++mask) {
        double s = 0.0;
        int prev = 0;
        for (int k = 1; k < n; ++k) {
            if (k < n - 1 && !((mask >> (k - 1)) & 1u)) continue;
            s += std::pow((path.row(k) - path.row(prev)).norm(), p);
            prev = k;
        }
        best = std::max(best, s);
    }
    return std::pow(best, 1.0 / p);
}

}  // namespace oracle
