#include "rkm/noise.hpp"

#include "rkm/error.hpp"
#include "rkm/rng.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <mutex>

namespace rkm::noise {

void FbmSpec::validate() const {
    if (!(hurst > 1.0 / 3.0 && hurst <= 0.5)) {
        throw ParameterError("hurst must lie in (1/3, 1/2], got " + std::to_string(hurst));
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
    if (steps < 1) throw ParameterError("steps must be >= 1");
    if (m < 1) throw ParameterError("driver dimension m must be >= 1");
}

double fgn_autocovariance(double hurst, long k) {
    const double h2 = 2.0 * hurst;
    const double a = std::abs(static_cast<double>(k));
    return 0.5 * (std::pow(a + 1.0, h2) - 2.0 * std::pow(a, h2) + std::pow(std::abs(a - 1.0), h2));
}

namespace {

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& fftw_planner_mutex() {
    static std::mutex mu;
    return mu;
}

class ComplexFft {
public:
    explicit ComplexFft(int size) : size_(size) {
        in_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size));
        out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size));
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(size, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~ComplexFft() {
        {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(in_);
        fftw_free(out_);
    }
    ComplexFft(const ComplexFft&) = delete;
    ComplexFft& operator=(const ComplexFft&) = delete;

    std::complex<double>* in() { return reinterpret_cast<std::complex<double>*>(in_); }
    const std::complex<double>* out() const { return reinterpret_cast<const std::complex<double>*>(out_); }
    void run() { fftw_execute(plan_); }
    int size() const { return size_; }

private:
    int size_;
    fftw_complex* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

Eigen::VectorXd fgn_cholesky(double hurst, int n, Rng& rng) {
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) cov(i, j) = fgn_autocovariance(hurst, i - j);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("fGn covariance is not positive definite (Cholesky failed)");
    }
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = normal(rng);
    return llt.matrixL() * z;
}

// Returns false when the embedding has materially negative eigenvalues.
bool fgn_circulant(double hurst, int n, Rng& rng, Eigen::VectorXd& out) {
    const int M = 2 * n;
    ComplexFft fft(M);
    auto* c = fft.in();
    for (int k = 0; k <= n; ++k) c[k] = fgn_autocovariance(hurst, k);
    for (int k = n + 1; k < M; ++k) c[k] = c[M - k];
    fft.run();
    std::vector<double> lambda(M);
    double lmax = 0.0;
    for (int k = 0; k < M; ++k) {
        lambda[k] = fft.out()[k].real();
        lmax = std::max(lmax, std::abs(lambda[k]));
    }
    for (double& l : lambda) {
        if (l < -1e-10 * std::max(1.0, lmax)) return false;
        l = std::max(l, 0.0);
    }

    std::normal_distribution<double> normal;
    auto* a = fft.in();
    a[0] = std::sqrt(lambda[0] / M) * normal(rng);
    a[n] = std::sqrt(lambda[n] / M) * normal(rng);
    for (int k = 1; k < n; ++k) {
        const double s = std::sqrt(lambda[k] / (2.0 * M));
        const double u = normal(rng);
        const double v = normal(rng);
        a[k] = std::complex<double>(s * u, s * v);
        a[M - k] = std::conj(a[k]);
    }
    fft.run();
    out.resize(n);
    for (int k = 0; k < n; ++k) out(k) = fft.out()[k].real();
    return true;
}

}  // namespace

Eigen::VectorXd sample_fgn(double hurst, int n, std::uint64_t seed, FbmMethod method) {
    if (n < 1) throw ParameterError("fGn length must be >= 1");
    Rng rng(seed);
    if (method != FbmMethod::cholesky) {
        Eigen::VectorXd out;
        if (fgn_circulant(hurst, n, rng, out)) return out;
        if (method == FbmMethod::circulant) {
            throw NumericalError("circulant embedding has negative eigenvalues");
        }
        rng.seed(seed);
    }
    return fgn_cholesky(hurst, n, rng);
}

Eigen::MatrixXd sample_fbm(const FbmSpec& spec, FbmMethod method) {
    spec.validate();
    const int columns = spec.identicalComponents ? 1 : spec.m;
    const double scale = std::pow(spec.dt, spec.hurst);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(spec.steps + 1, spec.m);
    for (int j = 0; j < columns; ++j) {
        const Eigen::VectorXd inc =
            sample_fgn(spec.hurst, spec.steps, derive_seed(spec.seed, seed_purpose::kDriverColumn, j), method);
        for (int k = 0; k < spec.steps; ++k) w(k + 1, j) = w(k, j) + scale * inc(k);
    }
    for (int j = columns; j < spec.m; ++j) w.col(j) = w.col(0);
    return w;
}

// ---- RoughDriver ------------------------------------------------------------

RoughDriver::RoughDriver(Eigen::MatrixXd w, std::vector<Eigen::MatrixXd> areas, double dt, double hurst)
    : w_(std::move(w)), areas_(std::move(areas)), dt_(dt), hurst_(hurst) {
    if (w_.rows() < 1 || w_.cols() < 1) throw ParameterError("driver path must be non-empty");
    if (static_cast<Eigen::Index>(areas_.size()) != w_.rows() - 1) {
        throw ParameterError("driver needs one area matrix per interval");
    }
    for (const auto& a : areas_) {
        if (a.rows() != w_.cols() || a.cols() != w_.cols()) {
            throw ParameterError("driver area matrices must be m x m");
        }
    }
    if (!(dt_ > 0.0)) throw ParameterError("driver dt must be positive");
}

Eigen::MatrixXd RoughDriver::area(int i, int j) const {
    if (i < 0 || j > steps() || i > j) throw ParameterError("driver interval out of range");
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m(), m());
    for (int k = i; k < j; ++k) {
        // acc holds 𝕎_{i,k}; append [k, k+1].
        acc += areas_[k] + increment(i, k) * increment(k).transpose();
    }
    return acc;
}

int RoughDriver::index_of(double t) const {
    const double x = t / dt_;
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x)) || r < 0 || r > steps()) {
        throw ParameterError("time " + std::to_string(t) + " is not a grid point of the driver");
    }
    return static_cast<int>(r);
}

bool RoughDriver::operator==(const RoughDriver& o) const {
    if (dt_ != o.dt_ || hurst_ != o.hurst_ || w_.rows() != o.w_.rows() || w_.cols() != o.w_.cols()) {
        return false;
    }
    if (w_ != o.w_) return false;
    for (std::size_t k = 0; k < areas_.size(); ++k) {
        if (areas_[k] != o.areas_[k]) return false;
    }
    return true;
}

Eigen::MatrixXd chen_compose(const Eigen::MatrixXd& areaSU, const Eigen::MatrixXd& areaUT,
                             const Eigen::VectorXd& wSU, const Eigen::VectorXd& wUT) {
    return areaSU + areaUT + wSU * wUT.transpose();
}

RoughDriver lift_path(const Eigen::MatrixXd& path, double dt, double hurst) {
    if (path.rows() < 1) throw ParameterError("path must have at least one sample");
    if (!path.row(0).isZero(0.0)) throw ParameterError("path must start at zero");
    std::vector<Eigen::MatrixXd> areas;
    areas.reserve(static_cast<std::size_t>(path.rows() - 1));
    for (Eigen::Index k = 0; k + 1 < path.rows(); ++k) {
        const Eigen::VectorXd d = (path.row(k + 1) - path.row(k)).transpose();
        areas.push_back(0.5 * d * d.transpose());
    }
    return RoughDriver(path, std::move(areas), dt, hurst);
}

RoughDriver sample_driver(const FbmSpec& spec, FbmMethod method) {
    return lift_path(sample_fbm(spec, method), spec.dt, spec.hurst);
}

RoughDriver restrict_driver(const RoughDriver& fine, int factor) {
    if (factor < 1 || fine.steps() % factor != 0) {
        throw ParameterError("restriction factor must divide the step count");
    }
    const int coarseSteps = fine.steps() / factor;
    Eigen::MatrixXd w(coarseSteps + 1, fine.m());
    std::vector<Eigen::MatrixXd> areas;
    areas.reserve(static_cast<std::size_t>(coarseSteps));
    for (int k = 0; k <= coarseSteps; ++k) w.row(k) = fine.w().row(k * factor);
    for (int k = 0; k < coarseSteps; ++k) areas.push_back(fine.area(k * factor, (k + 1) * factor));
    return RoughDriver(std::move(w), std::move(areas), fine.dt() * factor, fine.hurst());
}

RoughDriver slice_driver(const RoughDriver& d, int i0, int i1) {
    if (i0 < 0 || i1 > d.steps() || i0 >= i1) throw ParameterError("slice out of range");
    Eigen::MatrixXd w = d.w().middleRows(i0, i1 - i0 + 1);
    w.rowwise() -= d.w().row(i0);
    std::vector<Eigen::MatrixXd> areas(d.areas().begin() + i0, d.areas().begin() + i1);
    return RoughDriver(std::move(w), std::move(areas), d.dt(), d.hurst());
}

// ---- binary dump --------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'R', 'K', 'M', 'W'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "driver dump assumes a little-endian host");

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParameterError("truncated driver file");
    return v;
}

}  // namespace

void save_driver(const RoughDriver& d, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ParameterError("cannot write driver file " + file.string());
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(d.m()));
    put(out, static_cast<std::uint32_t>(d.steps()));
    put(out, d.dt());
    put(out, d.hurst());
    for (int k = 0; k <= d.steps(); ++k) {
        for (int j = 0; j < d.m(); ++j) put(out, d.w()(k, j));
    }
    for (const auto& a : d.areas()) {
        for (int r = 0; r < d.m(); ++r) {
            for (int c = 0; c < d.m(); ++c) put(out, a(r, c));
        }
    }
    if (!out) throw ParameterError("failed writing driver file " + file.string());
}

RoughDriver load_driver(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ParameterError("cannot open driver file " + file.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw ParameterError("not a driver file (bad magic)");
    if (get<std::uint32_t>(in) != kVersion) throw ParameterError("unsupported driver file version");
    const auto m = static_cast<int>(get<std::uint32_t>(in));
    const auto steps = static_cast<int>(get<std::uint32_t>(in));
    const double dt = get<double>(in);
    const double hurst = get<double>(in);
    Eigen::MatrixXd w(steps + 1, m);
    for (int k = 0; k <= steps; ++k) {
        for (int j = 0; j < m; ++j) w(k, j) = get<double>(in);
    }
    std::vector<Eigen::MatrixXd> areas(static_cast<std::size_t>(steps), Eigen::MatrixXd(m, m));
    for (auto& a : areas) {
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) a(r, c) = get<double>(in);
        }
    }
    return RoughDriver(std::move(w), std::move(areas), dt, hurst);
}

// ---- Kolmogorov moments -------------------------------------------------------

KolmogorovReport kolmogorov_check(const FbmSpec& specIn, double p, int nSamples) {
    if (nSamples < 100) throw Refusal("kolmogorov_check needs at least 100 samples");
    if (!(p >= 1.0)) throw ParameterError("p must be >= 1");
    FbmSpec spec = specIn;
    spec.dt = 1.0 / spec.steps;
    spec.validate();

    KolmogorovReport rep;
    rep.p = p;
    rep.q = p / 2.0;
    for (int span = spec.steps / 2; span >= 1 && spec.steps % span == 0; span /= 2) {
        rep.scales.push_back(span * spec.dt);
    }
    if (rep.scales.size() < 2) throw Refusal("kolmogorov_check needs at least two dyadic scales (steps >= 4)");
    rep.moments.assign(rep.scales.size(), 0.0);

    for (int s = 0; s < nSamples; ++s) {
        FbmSpec one = spec;
        one.seed = derive_seed(spec.seed, seed_purpose::kTrial, static_cast<std::uint64_t>(s));
        const RoughDriver d = sample_driver(one);
        for (std::size_t l = 0; l < rep.scales.size(); ++l) {
            const int span = static_cast<int>(std::lround(rep.scales[l] / spec.dt));
            double acc = 0.0;
            int count = 0;
            for (int i = 0; i + span <= spec.steps; i += span) {
                acc += std::pow(d.increment(i, i + span).norm(), p) + std::pow(d.area(i, i + span).norm(), rep.q);
                ++count;
            }
            rep.moments[l] += acc / count;
        }
    }
    for (double& v : rep.moments) v /= nSamples;

    const auto n = static_cast<double>(rep.scales.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t l = 0; l < rep.scales.size(); ++l) {
        const double x = std::log(rep.scales[l]);
        const double y = std::log(rep.moments[l]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.intercept = (sy - rep.slope * sx) / n;
    rep.threshold = p * spec.hurst - 0.1;
    rep.pass = rep.slope >= rep.threshold;
    return rep;
}

}  // namespace rkm::noise
