#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

#include "mkr/errors.hpp"

namespace mkr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class KernelFamily { Exponential, BesselPotential, Transformed };

/// Parameterized shift-invariant kernel family.
///
/// Exponential:     k(x, y) = exp(-gamma * sum_i |x_i - y_i|^alpha), alpha in (0, 2].
///                  alpha = 2 (Gaussian) is constructible but fails the
///                  admissibility check.
/// BesselPotential: k(x, y) = G_s(gamma * (x - y)) with
///                  G_s = F^-1{ (1 + |w|_2^2)^(-s/2) }, s > d.
/// Transformed:     k(x, y) = base(A x, A y) for an invertible d x d matrix A.
struct KernelSpec {
    KernelFamily family = KernelFamily::Exponential;
    int dim = 1;
    double alpha = 1.0;   // exponential exponent
    double gamma = 1.0;   // width parameter (both families)
    double s = 0.0;       // Bessel smoothness
    std::shared_ptr<const KernelSpec> base;  // transformed only
    Mat mix;                                 // transformed only

    static KernelSpec exponential(double alpha, double gamma, int dim = 1);
    static KernelSpec bessel(double s, double gamma, int dim = 1);
    static KernelSpec transformed(const KernelSpec& base, const Mat& mix);

    /// Throws InvalidSpec when a construction invariant is violated.
    void validate() const;

    /// Canonical human-readable form, also used as a cache key.
    std::string describe() const;

    /// Characteristic decay length (radius where the kernel drops to ~exp(-1)).
    double length_scale() const;

    /// rho(0). Exact for every family.
    double peak() const;

    /// Radius beyond which |rho| <= eps * rho(0) (conservative estimate).
    double decay_radius(double eps) const;
};

/// Fixed Fourier convention used throughout:
/// Fhat(w) = int f(x) exp(-i<w,x>) dx, inverse carries (2 pi)^-d.
extern const char* const kFourierConvention;

/// Uniform table of Green's-function values. Immutable after construction and
/// safe to share between threads.
struct GreensFunctionTable {
    Mat offsets;              // one offset per row (d columns)
    Vec values;
    std::string convention = kFourierConvention;
    double spacing = 0.0;
    double radius_max = 0.0;
    double est_aliasing = 0.0;    // periodization error estimate, relative to peak
    double est_truncation = 0.0;  // dropped spectral tail estimate, relative to peak
    int fft_size = 0;             // internal transform length (documents the padding)
    long harmonics = 0;           // number of spectral samples integrated
};

/// Knobs of the discrete inverse-Fourier table builder. The internal
/// integration grid is padded relative to the output grid: the frequency step
/// comes from the periodization guard, and harmonics beyond the output
/// Nyquist are folded modulo the transform length so the spectral tail is
/// still integrated.
struct TableBuildOptions {
    double accuracy = 1e-6;         // aliasing budget relative to the peak
    long max_harmonics = 1L << 26;  // spectral sample budget
    long max_fft = 1L << 22;        // transform-length budget
};

struct ExpFreqTable;  // sampled response of exp(-|x|^alpha), see kernels.cpp

/// Scalar frequency response of a d = 1 spec (or of one axis of a separable
/// exponential kernel). Closed form except for exponential alpha outside
/// {1, 2}, where it interpolates a sampled forward FFT of the kernel;
/// `resolution` is then the spectral grid step (0 when exact).
struct Response1D {
    enum class Kind { BesselClosed, ExpClosed1, ExpClosed2, ExpSampled };

    Kind kind = Kind::ExpClosed1;
    double gamma = 1.0;
    double s = 0.0;      // Bessel only
    double alpha = 0.0;  // sampled exponential only
    double norm = 1.0;   // overall multiplier (gamma^-d for radial Bessel profiles)
    double resolution = 0.0;
    std::shared_ptr<const ExpFreqTable> table;

    double operator()(double omega) const;
    bool exact() const { return kind != Kind::ExpSampled; }
};

/// Scalar response for a d = 1 spec, or the radial profile for Bessel specs
/// in dimension radial_dim (exponential specs always give the per-axis
/// profile of the separable product).
Response1D make_response1d(const KernelSpec& spec, int radial_dim = 1);

/// Evaluation engine for one spec. Closed forms are used where available
/// (all exponential kernels; Bessel potentials with half-integer Matern
/// order); the remaining Bessel cases interpolate a precomputed radial table
/// (cubic, O(1) per evaluation), which restricts them to d <= 2.
///
/// All const members are pure and thread-safe once ensure_radius() has been
/// called with the largest offset that will be queried.
class Kernel {
public:
    explicit Kernel(const KernelSpec& spec);

    const KernelSpec& spec() const { return spec_; }

    double operator()(const Vec& x, const Vec& y) const;
    double at_offset(const Vec& r) const;
    /// Value at offset r * e1 (first axis); the radial value for radial families.
    double at_axis_offset(double r) const;
    double peak() const { return peak_; }

    /// Frequency response at omega.
    double fourier(const Vec& omega) const;
    bool fourier_is_exact() const;
    /// Grid step of the sampled response backing fourier(); 0 when exact.
    double fourier_resolution() const;

    /// Extends the evaluation table to cover offsets up to `radius`.
    /// Not thread-safe; call during setup.
    void ensure_radius(double radius);
    /// Largest offset the engine can evaluate (infinity for closed forms).
    double table_radius() const;

    /// Beyond-table behavior: false (default) throws TableMissing, true
    /// returns 0 (the kernel has decayed below table accuracy there).
    void set_extrapolation(bool on) { extrapolate_ = on; }

    double length_scale() const { return spec_.length_scale(); }

private:
    struct RadialTable {
        double dr = 0.0;
        double radius = 0.0;
        std::vector<double> values;  // on [0, radius], uniform
    };

    double bessel_elementary(double u) const;  // u = gamma * |r|
    void build_radial_table(double radius);
    double interp_radial(double r) const;
    const Response1D* response1d_ptr() const;

    KernelSpec spec_;
    std::unique_ptr<Kernel> base_;  // transformed
    Mat mix_inv_t_;                 // transformed: A^-T
    double mix_absdet_ = 1.0;
    double peak_ = 1.0;
    int matern_twice_nu_ = 0;  // 2*nu when elementary, else 0
    bool needs_table_ = false;
    bool extrapolate_ = false;
    std::shared_ptr<const RadialTable> radial_;
    mutable std::shared_ptr<const Response1D> response_;
};

/// k(x, y); thin wrapper over a process-wide cache of Kernel engines.
double eval_kernel(const KernelSpec& spec, const Vec& x, const Vec& y);

/// Frequency response of the kernel at omega.
double fourier_response(const KernelSpec& spec, const Vec& omega);

/// Shared engine for a spec (cached). The cached engine covers offsets up to
/// max(radius_hint, default decay radius).
std::shared_ptr<const Kernel> kernel_engine(const KernelSpec& spec, double radius_hint = 0.0);

/// Green's function on a symmetric uniform offset grid over [-radius_max,
/// radius_max] (n_samples + 1 points), computed by a padded/folded discrete
/// inverse Fourier transform of the spec's frequency response. d = 1 only;
/// n_samples must be a power of two >= 64. Throws ResolutionTooCoarse when
/// the estimated aliasing error exceeds options.accuracy of the peak.
GreensFunctionTable fourier_greens_table(const KernelSpec& spec, double radius_max,
                                         int n_samples, const TableBuildOptions& options = {});

/// Bessel-potential Green's function at radius r (unit gamma) in dimension d,
/// computed by quadrature of the Gaussian subordination integral. Backs the
/// d = 2 radial evaluation tables.
double bessel_greens_subordination(double s, int d, double r);

}  // namespace mkr
