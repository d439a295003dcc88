#pragma once

#include <vector>

#include "mkr/dictionary.hpp"

namespace mkr {

struct SolverConfig {
    enum class StepRule { FixedFromPowerIteration, Backtracking };

    double lambda = 0.1;
    int max_iters = 20000;
    double tol_rel_obj = 1e-10;
    double tol_kkt = 1e-8;
    StepRule step_rule = StepRule::FixedFromPowerIteration;
    double activity_threshold_rel = 1e-6;  // active iff |a_j| > rel * max|a|

    void validate() const;
};

struct SolverResult {
    Vec coeffs;
    std::vector<double> objective_trace;  // per-iteration objective, non-increasing
    double kkt_residual = 0.0;
    std::vector<int> active_cols;         // flat column ids above the activity threshold
    std::vector<ColumnRef> active_set;    // (block, center) ids; block 0 unless remapped
    double activity_threshold = 0.0;      // absolute threshold that produced active_cols
    int iterations = 0;
    bool converged = false;

    double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

/// Minimizes ||G a - y||^2 + lambda a^T G a. Solves (G + lambda I) a = y and
/// falls back to the normal-equation system G (G + lambda I) a = G y through a
/// rank-revealing factorization. Throws SingularSystem when no candidate
/// system reaches residual <= 1e-10 ||y|| (always the case for lambda = 0 with
/// a singular Gram matrix).
Vec solve_ridge(const Mat& gram, const Vec& targets, double lambda);

/// Minimizes ||D a - y||^2 + lambda ||a||_1 with monotone FISTA. The gradient
/// of the smooth part is 2 D^T (D a - y); with step 1/L, L = 2 sigma_max(D)^2
/// (power iteration, 1.01 safety factor) the prox is a soft threshold at
/// lambda / L. NotConverged is reported through converged = false, never
/// thrown. lambda = 0 short-circuits to a least-squares solve.
SolverResult solve_lasso(const Mat& design, const Vec& targets, const SolverConfig& config,
                         const Vec* warm_start = nullptr);

/// Optimality certificate: with g = 2 D^T (D a - y), the max over coordinates
/// of |g_j + lambda sign(a_j)| on the support and max(0, |g_j| - lambda) off
/// it. Zero at exact optima.
double kkt_residual_lasso(const Mat& design, const Vec& targets, double lambda, const Vec& coeffs);

/// Unpenalized least squares restricted to the support columns; zeros
/// elsewhere. Throws RankDeficientSupport when the support columns are not
/// linearly independent.
Vec refit_on_support(const Mat& design, const Vec& targets, const std::vector<int>& support);

struct MklResult {
    Vec mu;            // nonnegative kernel weights
    Vec coeffs;
    double objective = 0.0;
    int inner_iterations = 0;
    bool converged = false;
};

/// Multiple-kernel learning: min over mu >= 0 and a of
/// ||G_mu a - y||^2 + lambda a^T G_mu a + eta ||mu||_2^2, G_mu = sum mu_n G_n.
/// Alternates exact ridge solves in a with projected-gradient updates in mu;
/// the joint problem is not convex, so the best iterate by objective is
/// returned.
MklResult solve_mkl(const std::vector<Mat>& grams, const Vec& targets, double lambda,
                    double mkl_penalty_weight, const SolverConfig& config);

/// Largest squared singular value (power iteration to 1e-6 relative).
double largest_sq_singular_value(const Mat& m);

}  // namespace mkr
