#include "mkr/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace mkr {

const char* const kFourierConvention =
    "Fhat(w)=int f(x) exp(-i<w,x>) dx; inverse carries (2pi)^-d";

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

double pow_abs(double v, double expo) {
    v = std::abs(v);
    if (expo == 1.0) return v;
    if (expo == 2.0) return v * v;
    return std::pow(v, expo);
}

// 4-point Lagrange cubic on a uniform grid; x in grid units. The stencil is
// clamped at the ends, where the polynomial still interpolates all 4 nodes.
double cubic_interp(const std::vector<double>& v, double x) {
    const long n = static_cast<long>(v.size());
    long i = static_cast<long>(x);
    i = std::clamp(i, 1L, n - 3);
    const double t = x - static_cast<double>(i);
    const double a = v[i - 1], b = v[i], c = v[i + 1], d = v[i + 2];
    return a * (-t) * (1.0 - t) * (2.0 - t) / 6.0 + b * (t + 1.0) * (1.0 - t) * (2.0 - t) / 2.0 +
           c * (t + 1.0) * t * (2.0 - t) / 2.0 + d * (t + 1.0) * t * (t - 1.0) / 6.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// KernelSpec
// ---------------------------------------------------------------------------

KernelSpec KernelSpec::exponential(double alpha, double gamma, int dim) {
    KernelSpec k;
    k.family = KernelFamily::Exponential;
    k.alpha = alpha;
    k.gamma = gamma;
    k.dim = dim;
    k.validate();
    return k;
}

KernelSpec KernelSpec::bessel(double s, double gamma, int dim) {
    KernelSpec k;
    k.family = KernelFamily::BesselPotential;
    k.s = s;
    k.gamma = gamma;
    k.dim = dim;
    k.validate();
    return k;
}

KernelSpec KernelSpec::transformed(const KernelSpec& base, const Mat& mix) {
    KernelSpec k;
    k.family = KernelFamily::Transformed;
    k.base = std::make_shared<KernelSpec>(base);
    k.mix = mix;
    k.dim = base.dim;
    k.validate();
    return k;
}

void KernelSpec::validate() const {
    if (dim < 1) throw InvalidSpec("dimension must be >= 1");
    switch (family) {
        case KernelFamily::Exponential:
            if (!(alpha > 0.0) || !(alpha <= 2.0)) throw InvalidSpec("alpha must lie in (0, 2]");
            if (!(gamma > 0.0)) throw InvalidSpec("gamma must be positive");
            break;
        case KernelFamily::BesselPotential:
            if (!(s > dim)) throw InvalidSpec("Bessel smoothness s must exceed the dimension d");
            if (!(gamma > 0.0)) throw InvalidSpec("gamma must be positive");
            break;
        case KernelFamily::Transformed: {
            if (!base) throw InvalidSpec("transformed kernel needs a base spec");
            base->validate();
            if (base->dim != dim) throw InvalidSpec("transformed dim must match base dim");
            if (mix.rows() != dim || mix.cols() != dim)
                throw InvalidSpec("mix matrix must be d x d");
            const double scale = std::pow(mix.cwiseAbs().maxCoeff() * dim + 1e-300, dim);
            if (!(std::abs(mix.determinant()) > 1e-12 * scale))
                throw InvalidSpec("mix matrix is numerically singular");
            break;
        }
    }
}

std::string KernelSpec::describe() const {
    char buf[96];
    std::ostringstream os;
    switch (family) {
        case KernelFamily::Exponential:
            std::snprintf(buf, sizeof buf, "exp(alpha=%.17g,gamma=%.17g,d=%d)", alpha, gamma, dim);
            return buf;
        case KernelFamily::BesselPotential:
            std::snprintf(buf, sizeof buf, "bessel(s=%.17g,gamma=%.17g,d=%d)", s, gamma, dim);
            return buf;
        case KernelFamily::Transformed:
            os << "transformed(" << base->describe() << ",A=[";
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    std::snprintf(buf, sizeof buf, "%.17g", mix(i, j));
                    os << buf << ((i == dim - 1 && j == dim - 1) ? "])" : ",");
                }
            return os.str();
    }
    return "?";
}

double KernelSpec::length_scale() const {
    switch (family) {
        case KernelFamily::Exponential:
            return std::pow(1.0 / gamma, 1.0 / alpha);
        case KernelFamily::BesselPotential:
            return 1.0 / gamma;
        case KernelFamily::Transformed: {
            Eigen::JacobiSVD<Mat> svd(mix);
            return base->length_scale() / svd.singularValues().minCoeff();
        }
    }
    return 1.0;
}

double KernelSpec::peak() const {
    switch (family) {
        case KernelFamily::Exponential:
            return 1.0;
        case KernelFamily::BesselPotential: {
            const double nu = 0.5 * (s - dim);
            return std::pow(2.0, -dim) * std::pow(M_PI, -0.5 * dim) * std::tgamma(nu) /
                   std::tgamma(0.5 * s);
        }
        case KernelFamily::Transformed:
            return base->peak();
    }
    return 1.0;
}

double KernelSpec::decay_radius(double eps) const {
    const double logeps = std::log(1.0 / eps);
    switch (family) {
        case KernelFamily::Exponential:
            return std::pow(logeps / gamma, 1.0 / alpha);
        case KernelFamily::BesselPotential: {
            const double nu = 0.5 * (s - dim);
            return (logeps + std::max(nu - 0.5, 0.0) * std::log1p(logeps) + 5.0) / gamma;
        }
        case KernelFamily::Transformed: {
            Eigen::JacobiSVD<Mat> svd(mix);
            return base->decay_radius(eps) / svd.singularValues().minCoeff();
        }
    }
    return 1.0;
}

// ---------------------------------------------------------------------------
// Sampled frequency response of exp(-|x|^alpha), unit gamma, one axis
// ---------------------------------------------------------------------------

struct ExpFreqTable {
    double alpha = 1.0;
    double dw = 0.0;
    double dx = 0.0;         // sampling step of the forward transform
    double omega_max = 0.0;  // asymptote takes over beyond this
    double asym_coeff = 0.0;
    std::vector<double> values;

    double eval(double w) const {
        w = std::abs(w);
        if (w >= omega_max) return asym_coeff * std::pow(w, -(1.0 + alpha));
        return cubic_interp(values, w / dw);
    }
};

namespace {

// Trapezoid-weighted DCT-I of the sampled kernel. The spatial extent covers
// the kernel down to ~1e-19 of its peak; aliasing images land beyond pi/dx.
std::shared_ptr<const ExpFreqTable> build_exp_freq_table(double alpha) {
    auto table = std::make_shared<ExpFreqTable>();
    table->alpha = alpha;
    // zero-padding past the kernel support refines the frequency grid enough
    // for cubic interpolation of the O(1)-curvature response near omega = 0
    const double extent = std::max(128.0, std::pow(44.0, 1.0 / alpha));
    long n_intervals = 1L << 18;
    while (extent / static_cast<double>(n_intervals) > 1.0e-4 && n_intervals < (1L << 23))
        n_intervals <<= 1;
    const double dx = extent / static_cast<double>(n_intervals);

    std::vector<double> in(static_cast<std::size_t>(n_intervals) + 1);
    std::vector<double> out(in.size());
    for (long j = 0; j <= n_intervals; ++j)
        in[static_cast<std::size_t>(j)] = std::exp(-std::pow(static_cast<double>(j) * dx, alpha));

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_r2r_1d(static_cast<int>(in.size()), in.data(), out.data(), FFTW_REDFT00,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }

    table->dx = dx;
    table->dw = M_PI / extent;
    // keep samples up to |w| ~ 2048; the alpha-stable asymptote is accurate
    // to ~1e-6 relative beyond that
    const long keep =
        std::min(n_intervals - 1, static_cast<long>(std::ceil(2048.0 / table->dw)) + 4);
    table->omega_max = static_cast<double>(keep - 3) * table->dw;
    table->asym_coeff = 2.0 * std::tgamma(1.0 + alpha) * std::sin(0.5 * M_PI * alpha);
    table->values.assign(out.begin(), out.begin() + keep);
    for (auto& v : table->values) v *= dx;
    return table;
}

std::shared_ptr<const ExpFreqTable> exp_freq_table(double alpha) {
    static std::mutex m;
    static std::map<double, std::shared_ptr<const ExpFreqTable>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(alpha);
    if (it != cache.end()) return it->second;
    auto t = build_exp_freq_table(alpha);
    cache.emplace(alpha, t);
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Response1D
// ---------------------------------------------------------------------------

double Response1D::operator()(double omega) const {
    const double w = std::abs(omega);
    switch (kind) {
        case Kind::BesselClosed: {
            const double u = w / gamma;
            const double q = 1.0 + u * u;
            double p;
            if (s == 2.0)
                p = 1.0 / q;
            else if (s == 4.0)
                p = 1.0 / (q * q);
            else
                p = std::pow(q, -0.5 * s);
            return norm * p;
        }
        case Kind::ExpClosed1:
            return 2.0 * gamma / (gamma * gamma + w * w);
        case Kind::ExpClosed2:
            return std::sqrt(M_PI / gamma) * std::exp(-w * w / (4.0 * gamma));
        case Kind::ExpSampled: {
            const double scale = std::pow(gamma, -1.0 / alpha);
            return scale * table->eval(scale * w);
        }
    }
    return 0.0;
}

Response1D make_response1d(const KernelSpec& spec, int radial_dim) {
    Response1D r;
    switch (spec.family) {
        case KernelFamily::BesselPotential:
            r.kind = Response1D::Kind::BesselClosed;
            r.gamma = spec.gamma;
            r.s = spec.s;
            r.norm = std::pow(spec.gamma, -radial_dim);
            return r;
        case KernelFamily::Exponential:
            r.gamma = spec.gamma;
            if (spec.alpha == 1.0) {
                r.kind = Response1D::Kind::ExpClosed1;
            } else if (spec.alpha == 2.0) {
                r.kind = Response1D::Kind::ExpClosed2;
            } else {
                r.kind = Response1D::Kind::ExpSampled;
                r.alpha = spec.alpha;
                r.table = exp_freq_table(spec.alpha);
                r.resolution = r.table->dw * std::pow(spec.gamma, 1.0 / spec.alpha);
            }
            return r;
        case KernelFamily::Transformed: {
            if (spec.dim != 1)
                throw InvalidSpec("scalar response of a transformed kernel needs d = 1");
            // rho_A(x) = rho_base(a x) is the base family with rescaled gamma.
            const double a = std::abs(spec.mix(0, 0));
            KernelSpec eff = *spec.base;
            eff.gamma *= (eff.family == KernelFamily::Exponential) ? std::pow(a, eff.alpha) : a;
            return make_response1d(eff, radial_dim);
        }
    }
    throw InvalidSpec("unknown family");
}

// ---------------------------------------------------------------------------
// Folded discrete inverse Fourier transform (d = 1)
// ---------------------------------------------------------------------------

namespace {

struct FoldedDft {
    std::vector<double> values;  // j = 0..n at offsets -R + j * dr
    double est_alias = 0.0;
    double est_trunc = 0.0;
    double peak = 0.0;
    long fft_size = 0;
    long harmonics = 0;
};

// Integrates rho(r) = (1/2pi) int g(w) exp(iwr) dw on the offset grid.
// Sampling step dw = 2pi/period realizes periodization with period
// >= 2 (radius + guard); harmonics are accumulated modulo the transform
// length, which folds the spectral tail instead of dropping it at the output
// Nyquist. The spectral cutoff K is chosen from the response's local decay
// so the dropped tail stays below ~accuracy/4 of the peak (within budget).
FoldedDft folded_inverse_dft(const Response1D& resp, double spec_peak, double guard,
                             double radius, int n, const TableBuildOptions& opt,
                             const std::string& what) {
    const double dr = 2.0 * radius / n;
    long m = static_cast<long>(std::ceil((radius + guard) / radius));
    m = std::max(m, 1L);
    if (static_cast<long>(n) * m > opt.max_fft) m = std::max(1L, opt.max_fft / n);
    const long nfft = static_cast<long>(n) * m;
    const double period = nfft * dr;
    const double dw = 2.0 * M_PI / period;

    auto tail_bound = [&resp](double w) {
        const double g = resp(w);
        if (!(g > 1e-300)) return 0.0;
        const double g2 = resp(1.05 * w);
        if (!(g2 > 1e-300)) return 0.0;
        const double p = std::clamp(std::log(g / g2) / std::log(1.05), 1.05, 1e3);
        return w * g / ((p - 1.0) * M_PI);
    };

    const double tail_target = 0.25 * opt.accuracy * std::max(spec_peak, 1e-300);
    long harmonics = 64;
    while (harmonics < opt.max_harmonics && tail_bound(harmonics * dw) > tail_target)
        harmonics <<= 1;
    harmonics = std::min(harmonics, opt.max_harmonics);

    std::vector<double> acc(static_cast<std::size_t>(nfft), 0.0);
    {
        long idx = 1 % nfft;
        for (long k = 1; k <= harmonics; ++k) {
            acc[static_cast<std::size_t>(idx)] += resp(static_cast<double>(k) * dw);
            if (++idx == nfft) idx = 0;
        }
    }
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(nfft));
    buf[0] = resp(0.0) + 2.0 * acc[0];
    for (long j = 1; j < nfft; ++j)
        buf[static_cast<std::size_t>(j)] = acc[static_cast<std::size_t>(j)] +
                                           acc[static_cast<std::size_t>(nfft - j)];

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(nfft),
                                reinterpret_cast<fftw_complex*>(buf.data()),
                                reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }

    const double scale = 1.0 / period;
    FoldedDft out;
    out.values.resize(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        const long t = (j - n / 2 + nfft) % nfft;
        out.values[static_cast<std::size_t>(j)] = scale * buf[static_cast<std::size_t>(t)].real();
    }
    for (int j = 0; j <= n / 2; ++j) {  // enforce r <-> -r symmetry exactly
        const double v = 0.5 * (out.values[j] + out.values[n - j]);
        out.values[j] = out.values[n - j] = v;
    }
    out.peak = out.values[static_cast<std::size_t>(n) / 2];
    const double denom = std::max(std::abs(out.peak), 1e-300);
    out.est_alias = std::abs(scale * buf[static_cast<std::size_t>(nfft) / 2].real()) / denom;
    out.est_trunc = tail_bound(harmonics * dw) / denom;
    out.fft_size = nfft;
    out.harmonics = harmonics;

    if (out.est_alias > opt.accuracy) {
        char msg[256];
        std::snprintf(msg, sizeof msg,
                      "%s: estimated aliasing error %.3g of peak exceeds %.3g "
                      "(period %.3g, fft size %ld); enlarge the transform budget or radius",
                      what.c_str(), out.est_alias, opt.accuracy, period, nfft);
        throw ResolutionTooCoarse(msg);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gaussian subordination quadrature for Bessel potentials
// ---------------------------------------------------------------------------

double bessel_greens_subordination(double s, int d, double r) {
    // rho(r) = (4pi)^(-d/2)/Gamma(s/2) * int_R exp(h v - e^v - r^2 e^-v / 4) dv
    // with h = (s - d)/2 (substitution t = e^v in the scale-mixture integral).
    const double half = 0.5 * (s - d);
    const double v_lo = std::min(-50.0 / half, -40.0);
    const double v_hi = std::log(50.0 + half) + 5.0;
    const double h = 0.05;
    const double rsq4 = 0.25 * r * r;
    double sum = 0.0;
    const long steps = static_cast<long>((v_hi - v_lo) / h) + 1;
    for (long i = 0; i <= steps; ++i) {
        const double v = v_lo + h * static_cast<double>(i);
        const double ev = std::exp(v);
        const double expo = half * v - ev - rsq4 / ev;
        if (expo > -745.0) sum += std::exp(expo);
    }
    return h * sum * std::pow(4.0 * M_PI, -0.5 * d) / std::tgamma(0.5 * s);
}

// ---------------------------------------------------------------------------
// Kernel
// ---------------------------------------------------------------------------

Kernel::Kernel(const KernelSpec& spec) : spec_(spec) {
    spec_.validate();
    peak_ = spec_.peak();
    switch (spec_.family) {
        case KernelFamily::Exponential:
            break;
        case KernelFamily::BesselPotential: {
            const double twice_nu = spec_.s - spec_.dim;
            const long rounded = std::lround(twice_nu);
            if (std::abs(twice_nu - static_cast<double>(rounded)) < 1e-9 && rounded >= 1 &&
                rounded <= 7 && rounded % 2 == 1) {
                matern_twice_nu_ = static_cast<int>(rounded);
            } else {
                if (spec_.dim > 2)
                    throw InvalidSpec(
                        "table-backed Bessel evaluation supports d <= 2 (s - d odd has closed "
                        "forms in any dimension)");
                needs_table_ = true;
                build_radial_table(
                    std::max(spec_.decay_radius(1e-14), 10.0 * spec_.length_scale()));
            }
            break;
        }
        case KernelFamily::Transformed: {
            base_ = std::make_unique<Kernel>(*spec_.base);
            mix_inv_t_ = spec_.mix.inverse().transpose();
            mix_absdet_ = std::abs(spec_.mix.determinant());
            break;
        }
    }
}

double Kernel::bessel_elementary(double u) const {
    // rho(0) * normalized half-integer Matern profile, u = gamma * |r|
    const double e = std::exp(-u);
    switch (matern_twice_nu_) {
        case 1:
            return peak_ * e;
        case 3:
            return peak_ * (1.0 + u) * e;
        case 5:
            return peak_ * (1.0 + u + u * u / 3.0) * e;
        case 7:
            return peak_ * (1.0 + u + 0.4 * u * u + u * u * u / 15.0) * e;
        default:
            throw std::logic_error("not an elementary Matern order");
    }
}

void Kernel::build_radial_table(double radius) {
    auto table = std::make_shared<RadialTable>();
    table->radius = radius;
    if (spec_.dim == 1) {
        const int n = 1 << 14;
        const Response1D resp = make_response1d(spec_, 1);
        const FoldedDft dft =
            folded_inverse_dft(resp, peak_, spec_.decay_radius(1e-8), radius, n, {},
                               "Bessel evaluation table " + spec_.describe());
        table->dr = 2.0 * radius / n;
        table->values.assign(dft.values.begin() + n / 2, dft.values.end());
    } else {
        const int n = 4096;
        table->dr = radius / n;
        table->values.resize(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i)
            table->values[static_cast<std::size_t>(i)] =
                bessel_greens_subordination(spec_.s, spec_.dim, spec_.gamma * i * table->dr);
    }
    radial_ = std::move(table);
}

double Kernel::interp_radial(double r) const {
    const RadialTable& t = *radial_;
    if (r > t.radius) {
        if (extrapolate_) return 0.0;
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "offset %.6g beyond tabulated radius %.6g for %s (enable extrapolation or "
                      "ensure_radius first)",
                      r, t.radius, spec_.describe().c_str());
        throw TableMissing(msg);
    }
    return cubic_interp(t.values, r / t.dr);
}

double Kernel::at_offset(const Vec& r) const {
    switch (spec_.family) {
        case KernelFamily::Exponential: {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < r.size(); ++i) acc += pow_abs(r[i], spec_.alpha);
            return std::exp(-spec_.gamma * acc);
        }
        case KernelFamily::BesselPotential: {
            const double rad = r.norm();
            return matern_twice_nu_ ? bessel_elementary(spec_.gamma * rad) : interp_radial(rad);
        }
        case KernelFamily::Transformed:
            return base_->at_offset(spec_.mix * r);
    }
    return 0.0;
}

double Kernel::at_axis_offset(double r) const {
    switch (spec_.family) {
        case KernelFamily::Exponential:
            return std::exp(-spec_.gamma * pow_abs(r, spec_.alpha));
        case KernelFamily::BesselPotential: {
            const double rad = std::abs(r);
            return matern_twice_nu_ ? bessel_elementary(spec_.gamma * rad) : interp_radial(rad);
        }
        case KernelFamily::Transformed: {
            Vec v = Vec::Zero(spec_.dim);
            v[0] = r;
            return base_->at_offset(spec_.mix * v);
        }
    }
    return 0.0;
}

double Kernel::operator()(const Vec& x, const Vec& y) const { return at_offset(x - y); }

double Kernel::fourier(const Vec& omega) const {
    switch (spec_.family) {
        case KernelFamily::BesselPotential: {
            const double u = omega.norm() / spec_.gamma;
            const double q = 1.0 + u * u;
            double p;
            if (spec_.s == 2.0)
                p = 1.0 / q;
            else if (spec_.s == 4.0)
                p = 1.0 / (q * q);
            else
                p = std::pow(q, -0.5 * spec_.s);
            return std::pow(spec_.gamma, -spec_.dim) * p;
        }
        case KernelFamily::Exponential: {
            const Response1D& axis = *response1d_ptr();
            double prod = 1.0;
            for (Eigen::Index i = 0; i < omega.size(); ++i) prod *= axis(omega[i]);
            return prod;
        }
        case KernelFamily::Transformed:
            return base_->fourier(mix_inv_t_ * omega) / mix_absdet_;
    }
    return 0.0;
}

const Response1D* Kernel::response1d_ptr() const {
    if (!response_) {
        static std::mutex m;
        std::lock_guard<std::mutex> lock(m);
        if (!response_)
            response_ = std::make_shared<const Response1D>(make_response1d(spec_, spec_.dim));
    }
    return response_.get();
}

bool Kernel::fourier_is_exact() const {
    switch (spec_.family) {
        case KernelFamily::Exponential:
            return spec_.alpha == 1.0 || spec_.alpha == 2.0;
        case KernelFamily::Transformed:
            return base_->fourier_is_exact();
        default:
            return true;
    }
}

double Kernel::fourier_resolution() const {
    if (fourier_is_exact()) return 0.0;
    if (spec_.family == KernelFamily::Transformed) return base_->fourier_resolution();
    return response1d_ptr()->resolution;
}

void Kernel::ensure_radius(double radius) {
    if (spec_.family == KernelFamily::Transformed) {
        Eigen::JacobiSVD<Mat> svd(spec_.mix);
        base_->ensure_radius(radius * svd.singularValues().maxCoeff());
        return;
    }
    if (!needs_table_ || radius <= radial_->radius) return;
    build_radial_table(radius * 1.05);
}

double Kernel::table_radius() const {
    if (spec_.family == KernelFamily::Transformed) {
        Eigen::JacobiSVD<Mat> svd(spec_.mix);
        return base_->table_radius() / svd.singularValues().maxCoeff();
    }
    if (!needs_table_) return std::numeric_limits<double>::infinity();
    return radial_->radius;
}

// ---------------------------------------------------------------------------
// Free operations and engine cache
// ---------------------------------------------------------------------------

std::shared_ptr<const Kernel> kernel_engine(const KernelSpec& spec, double radius_hint) {
    static std::mutex m;
    static std::map<std::string, std::shared_ptr<const Kernel>> cache;
    const std::string key = spec.describe();
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(key);
    if (it != cache.end() && (radius_hint <= 0.0 || it->second->table_radius() >= radius_hint))
        return it->second;
    auto engine = std::make_shared<Kernel>(spec);
    if (radius_hint > 0.0) engine->ensure_radius(radius_hint);
    cache[key] = engine;
    return engine;
}

double eval_kernel(const KernelSpec& spec, const Vec& x, const Vec& y) {
    return (*kernel_engine(spec))(x, y);
}

double fourier_response(const KernelSpec& spec, const Vec& omega) {
    return kernel_engine(spec)->fourier(omega);
}

GreensFunctionTable fourier_greens_table(const KernelSpec& spec, double radius_max, int n_samples,
                                         const TableBuildOptions& options) {
    spec.validate();
    if (spec.dim != 1)
        throw InvalidSpec("fourier_greens_table supports d = 1 specs (higher-d evaluation "
                          "tables are built internally from radial profiles)");
    if (!(radius_max > 0.0)) throw InvalidInput("radius_max must be positive");
    if (n_samples < 64 || (n_samples & (n_samples - 1)) != 0)
        throw InvalidInput("n_samples must be a power of two >= 64");

    const Response1D resp = make_response1d(spec, 1);
    const FoldedDft dft =
        folded_inverse_dft(resp, spec.peak(), spec.decay_radius(1e-8), radius_max, n_samples,
                           options, "fourier_greens_table " + spec.describe());

    GreensFunctionTable table;
    const int n = n_samples;
    table.offsets.resize(n + 1, 1);
    table.values.resize(n + 1);
    table.spacing = 2.0 * radius_max / n;
    for (int j = 0; j <= n; ++j) {
        table.offsets(j, 0) = -radius_max + j * table.spacing;
        table.values[j] = dft.values[static_cast<std::size_t>(j)];
    }
    table.radius_max = radius_max;
    table.est_aliasing = dft.est_alias;
    table.est_truncation = dft.est_trunc;
    table.fft_size = static_cast<int>(dft.fft_size);
    table.harmonics = dft.harmonics;
    return table;
}

}  // namespace mkr
