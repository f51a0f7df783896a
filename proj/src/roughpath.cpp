#include "rkm/roughpath.hpp"

#include "rkm/error.hpp"
#include "rkm/rng.hpp"

#include <algorithm>
#include <cmath>

namespace rkm::roughpath {

void PVarParams::validate() const {
    if (!(p >= 2.0) || !std::isfinite(p)) throw ParameterError("variation exponent p must be >= 2");
}

double p_variation(const Eigen::MatrixXd& path, double p, int i0, int i1) {
    if (!(p >= 1.0)) throw ParameterError("p must be >= 1");
    if (i0 < 0 || i1 >= path.rows() || i0 > i1) throw ParameterError("p_variation interval out of range");
    if (i0 == i1) return 0.0;
    std::vector<double> best(static_cast<std::size_t>(i1 - i0 + 1), 0.0);
    for (int j = i0 + 1; j <= i1; ++j) {
        double b = 0.0;
        for (int i = i0; i < j; ++i) {
            b = std::max(b, best[i - i0] + std::pow((path.row(j) - path.row(i)).norm(), p));
        }
        best[j - i0] = b;
    }
    return std::pow(best.back(), 1.0 / p);
}

double p_variation(const Eigen::MatrixXd& path, double p) {
    return p_variation(path, p, 0, static_cast<int>(path.rows()) - 1);
}

RoughPVarScanner::RoughPVarScanner(const noise::RoughDriver& d, const PVarParams& params, int start)
    : d_(d), p_(params.p), q_(params.q()), start_(start) {
    params.validate();
    if (start < 0 || start > d.steps()) throw ParameterError("scanner start out of range");
    bestW_.push_back(0.0);
    bestA_.push_back(0.0);
    areas_.assign(static_cast<std::size_t>(d.m() * d.m()), 0.0);
}

void RoughPVarScanner::extend() {
    const int j = current();
    if (j >= d_.steps()) throw ParameterError("scanner reached the end of the driver");
    const int m = d_.m();
    const int mm = m * m;
    const Eigen::MatrixXd& w = d_.w();
    const Eigen::MatrixXd& fine = d_.area(j);
    const int len = j - start_ + 1;  // number of existing start points i = start..j

    // Update 𝕎_{i,j} -> 𝕎_{i,j+1} for every i; 𝕎_{j+1,j+1} = 0 is appended below.
    double bw = 0.0;
    double ba = 0.0;
    for (int r = 0; r < len; ++r) {
        const int i = start_ + r;
        double* a = &areas_[static_cast<std::size_t>(r * mm)];
        double fro2 = 0.0;
        double wn2 = 0.0;
        for (int c = 0; c < m; ++c) {
            const double incC = w(j + 1, c) - w(j, c);
            const double full = w(j + 1, c) - w(i, c);
            wn2 += full * full;
            for (int l = 0; l < m; ++l) {
                // Column-major m x m storage, entry (l, c).
                double& v = a[c * m + l];
                v += fine(l, c) + (w(j, l) - w(i, l)) * incC;
                fro2 += v * v;
            }
        }
        bw = std::max(bw, bestW_[r] + std::pow(wn2, p_ / 2.0));
        ba = std::max(ba, bestA_[r] + std::pow(fro2, q_ / 2.0));
    }
    areas_.resize(areas_.size() + static_cast<std::size_t>(mm), 0.0);
    bestW_.push_back(bw);
    bestA_.push_back(ba);
}

double RoughPVarScanner::value() const {
    return std::pow(bestW_.back() + bestA_.back(), 1.0 / p_);
}

double rough_pvar(const noise::RoughDriver& d, const PVarParams& params, int i0, int i1) {
    if (i0 < 0 || i1 > d.steps() || i0 > i1) throw ParameterError("rough_pvar interval out of range");
    RoughPVarScanner scan(d, params, i0);
    while (scan.current() < i1) scan.extend();
    return scan.value();
}

double rough_pvar(const noise::RoughDriver& d, const PVarParams& params) {
    return rough_pvar(d, params, 0, d.steps());
}

GreedyPartition greedy_times(const noise::RoughDriver& d, double gamma, int i0, int i1,
                             const PVarParams& params, double cp) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("greedy threshold gamma must be positive");
    if (i0 < 0 || i1 > d.steps() || i0 > i1) throw ParameterError("greedy interval out of range");
    params.validate();
    GreedyPartition g;
    g.gamma = gamma;
    g.cp = cp;
    g.indices.push_back(i0);
    int tau = i0;
    while (tau < i1) {
        RoughPVarScanner scan(d, params, tau);
        while (scan.current() < i1) {
            scan.extend();
            if (scan.value() >= gamma) break;
        }
        tau = scan.current();
        g.indices.push_back(tau);
    }
    if (g.indices.size() == 1) g.indices.push_back(i1);
    g.count = static_cast<int>(g.indices.size()) - 1;
    for (int k : g.indices) g.taus.push_back(d.time(k));
    return g;
}

GreedyPartition greedy_times(const noise::RoughDriver& d, double gamma, double a, double b,
                             const PVarParams& params, double cp) {
    return greedy_times(d, gamma, d.index_of(a), d.index_of(b), params, cp);
}

EnEstimate estimate_EN(const noise::FbmSpec& spec, double gamma, const PVarParams& params, int trials) {
    if (trials < 30) throw Refusal("estimate_EN needs at least 30 trials");
    spec.validate();
    EnEstimate est;
    est.trials = trials;
    est.gamma = gamma;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        noise::FbmSpec one = spec;
        one.seed = derive_seed(spec.seed, seed_purpose::kTrial, static_cast<std::uint64_t>(t));
        const noise::RoughDriver d = noise::sample_driver(one);
        const int count = greedy_times(d, gamma, 0, d.index_of(1.0), params).count;
        est.counts.push_back(count);
        sum += count;
        sum2 += static_cast<double>(count) * count;
    }
    est.mean = sum / trials;
    const double var = std::max(0.0, (sum2 - trials * est.mean * est.mean) / (trials - 1));
    est.standardError = std::sqrt(var / trials);
    return est;
}

namespace {

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            c_ += (sum_ - t) + x;
        } else {
            c_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + c_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

}  // namespace

double rough_integral(const Eigen::MatrixXd& Y, const std::vector<Eigen::MatrixXd>& Yprime,
                      const noise::RoughDriver& d, int i0, int i1) {
    const int m = d.m();
    if (Y.rows() != d.steps() + 1 || Y.cols() != m) {
        throw ParameterError("rough_integral: Y must have steps+1 rows and m columns");
    }
    if (static_cast<int>(Yprime.size()) != d.steps() + 1) {
        throw ParameterError("rough_integral: Y' must have one matrix per grid point");
    }
    if (i0 < 0 || i1 > d.steps() || i0 > i1) throw ParameterError("rough_integral interval out of range");
    CompensatedSum acc;
    for (int k = i0; k < i1; ++k) {
        const Eigen::VectorXd inc = d.increment(k);
        const Eigen::MatrixXd& area = d.area(k);
        const Eigen::MatrixXd& yp = Yprime[static_cast<std::size_t>(k)];
        if (yp.rows() != m || yp.cols() != m) throw ParameterError("rough_integral: Y' entries must be m x m");
        for (int j = 0; j < m; ++j) {
            acc.add(Y(k, j) * inc(j));
            for (int l = 0; l < m; ++l) acc.add(yp(j, l) * area(l, j));
        }
    }
    return acc.value();
}

double rough_integral(const Eigen::MatrixXd& Y, const std::vector<Eigen::MatrixXd>& Yprime,
                      const noise::RoughDriver& d) {
    return rough_integral(Y, Yprime, d, 0, d.steps());
}

}  // namespace rkm::roughpath
