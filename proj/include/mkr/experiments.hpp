#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mkr/multigrid.hpp"

namespace mkr {

/// Noisy samples of a piecewise-linear target on an interval.
struct SyntheticTask {
    std::vector<std::pair<double, double>> knots;  // (position, value), sorted by position
    double lo = -1.0;
    double hi = 1.0;
    int samples = 40;
    double noise_sigma = 1.0;
    std::uint64_t seed = 1;

    void validate() const;
    double target(double x) const;  // piecewise-linear interpolant
    static SyntheticTask default_task();
};

struct GeneratedTask {
    TrainingSet train;
    Vec grid_x;  // dense evaluation grid (1000 points)
    Vec grid_f;  // noiseless target on the grid
};

/// Sites are uniform draws from the seeded stream (sorted ascending), targets
/// add Gaussian noise from the same stream. Deterministic given the seed.
GeneratedTask generate_task(const SyntheticTask& task);

enum class Method { RkhsRidge, GenLasso, MklRidge, SingleGtv, MultiGtv };

std::string method_name(Method m);

/// One estimator: a kernel family template plus its hyper-parameter grid.
/// Single-kernel methods cross-validate one width out of `widths`; MklRidge
/// and MultiGtv use all widths simultaneously (>= 2 required) and
/// cross-validate lambda only.
struct EstimatorSpec {
    Method method = Method::RkhsRidge;
    double exp_alpha = 2.0;              // exponential family exponent
    std::vector<double> widths;          // gamma grid
    std::vector<double> lambdas;
    SolverConfig solver;
    RefinementConfig refine;
    double mkl_eta = 1e-3;

    void validate() const;
    KernelSpec kernel(double gamma) const { return KernelSpec::exponential(exp_alpha, gamma, 1); }
};

struct ChosenHyper {
    double lambda = 0.0;
    std::vector<double> widths;  // one entry for single-kernel methods
};

/// K-fold cross validation on contiguous blocks (after site sort). Picks the
/// (lambda, width) pair with the least mean validation squared error; ties go
/// to the larger lambda. Throws InsufficientData when a fold would be empty.
ChosenHyper cross_validate(const EstimatorSpec& method, const TrainingSet& train, int folds);

struct MethodReport {
    std::string method;
    bool failed = false;
    std::string error;
    double mse = 0.0;
    int sparsity = 0;
    double lambda = 0.0;
    std::vector<double> widths;
    Vec fitted;      // estimate on the dense grid
    Vec top_coeffs;  // M largest coefficient magnitudes, descending
};

struct ExperimentReport {
    Vec grid_x;
    Vec grid_f;
    std::vector<MethodReport> methods;
};

/// Cross-validates, fits on all data and scores every estimator. Per-method
/// failures are recorded in the report instead of aborting the run.
ExperimentReport run_comparison(const SyntheticTask& task,
                                const std::vector<EstimatorSpec>& methods, int folds);

/// The five estimators compared in the experiment, with default grids:
/// Gaussian RKHS ridge, generalized LASSO (Gaussian, centers at the data),
/// MKL ridge over Gaussian widths, and single/multi-kernel adaptive-center
/// fits with exponential alpha = 1.99 kernels.
std::vector<EstimatorSpec> default_estimators();

/// Writes report.csv, fit_<method>.csv and coeffs_<method>.csv into out_dir
/// (17 significant digits).
void write_report_files(const ExperimentReport& report, const std::string& out_dir);

}  // namespace mkr
