#include "mkr/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mkr {

namespace {

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

void fill_active(SolverResult& res, double rel_threshold) {
    res.active_cols.clear();
    res.active_set.clear();
    const double amax = res.coeffs.size() ? res.coeffs.cwiseAbs().maxCoeff() : 0.0;
    res.activity_threshold = rel_threshold * amax;
    if (amax == 0.0) return;
    for (int j = 0; j < res.coeffs.size(); ++j) {
        if (std::abs(res.coeffs[j]) > res.activity_threshold) {
            res.active_cols.push_back(j);
            res.active_set.push_back(ColumnRef{0, j});
        }
    }
}

}  // namespace

void SolverConfig::validate() const {
    if (lambda < 0.0) throw InvalidConfig("lambda must be >= 0");
    if (max_iters < 1) throw InvalidConfig("max_iters must be >= 1");
    if (!(tol_rel_obj > 0.0) || !(tol_kkt > 0.0))
        throw InvalidConfig("solver tolerances must be positive");
    if (!(activity_threshold_rel > 0.0))
        throw InvalidConfig("activity threshold must be positive");
}

double largest_sq_singular_value(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Vec v(m.cols());
    for (int j = 0; j < v.size(); ++j)
        v[j] = 1.0 + 1e-3 * static_cast<double>(j) / std::max<int>(1, v.size());
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < 500; ++it) {
        Vec w = m.transpose() * (m * v);
        const double next = w.norm();
        if (next == 0.0) return 0.0;
        v = w / next;
        if (std::abs(next - estimate) <= 1e-6 * next) return next;
        estimate = next;
    }
    return estimate;
}

Vec solve_ridge(const Mat& gram, const Vec& targets, double lambda) {
    if (gram.rows() != gram.cols() || gram.rows() != targets.size())
        throw InvalidInput("solve_ridge: inconsistent shapes");
    if (lambda < 0.0) throw InvalidConfig("lambda must be >= 0");
    const int m = static_cast<int>(gram.rows());
    const double ynorm = std::max(targets.norm(), 1e-300);

    const Mat shifted = gram + lambda * Mat::Identity(m, m);
    Vec a = shifted.ldlt().solve(targets);
    if ((shifted * a - targets).norm() <= 1e-10 * ynorm) return a;

    if (lambda == 0.0) {
        // interpolation demands an invertible Gram matrix
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(gram);
        a = cod.solve(targets);
        if ((gram * a - targets).norm() <= 1e-10 * ynorm) return a;
        throw SingularSystem(
            "gram matrix is numerically singular (lambda = 0 needs an invertible Gram matrix)");
    }

    // Rank-revealing fallback on the stationarity system G (G + lambda I) a = G y.
    const Mat normal = gram * shifted;
    const Vec rhs = gram * targets;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(normal);
    a = cod.solve(rhs);
    if ((normal * a - rhs).norm() <= 1e-10 * std::max(rhs.norm(), 1e-300)) return a;
    throw SingularSystem("ridge stationarity system could not be solved to tolerance");
}

double kkt_residual_lasso(const Mat& design, const Vec& targets, double lambda,
                          const Vec& coeffs) {
    const Vec grad = 2.0 * (design.transpose() * (design * coeffs - targets));
    double worst = 0.0;
    for (int j = 0; j < coeffs.size(); ++j) {
        const double r = coeffs[j] != 0.0
                             ? std::abs(grad[j] + lambda * (coeffs[j] > 0.0 ? 1.0 : -1.0))
                             : std::max(0.0, std::abs(grad[j]) - lambda);
        worst = std::max(worst, r);
    }
    return worst;
}

SolverResult solve_lasso(const Mat& design, const Vec& targets, const SolverConfig& config,
                         const Vec* warm_start) {
    config.validate();
    if (design.rows() != targets.size()) throw InvalidInput("solve_lasso: inconsistent shapes");
    if (!design.allFinite()) throw InvalidInput("solve_lasso: design must be finite");
    const int p = static_cast<int>(design.cols());
    const double lambda = config.lambda;

    SolverResult res;
    if (lambda == 0.0) {
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(design);
        res.coeffs = cod.solve(targets);
        res.objective_trace = {(design * res.coeffs - targets).squaredNorm()};
        res.kkt_residual = kkt_residual_lasso(design, targets, 0.0, res.coeffs);
        res.converged = true;
        fill_active(res, config.activity_threshold_rel);
        return res;
    }

    const bool backtracking = config.step_rule == SolverConfig::StepRule::Backtracking;
    double lips;
    if (backtracking) {
        // cheap lower bound; grown on sufficient-decrease violations
        lips = 2.0 * design.colwise().squaredNorm().maxCoeff();
    } else {
        lips = 2.0 * largest_sq_singular_value(design) * 1.01;
    }
    if (!(lips > 0.0)) {
        res.coeffs = Vec::Zero(p);
        res.objective_trace = {targets.squaredNorm()};
        res.converged = true;
        fill_active(res, config.activity_threshold_rel);
        return res;
    }

    auto l1 = [](const Vec& v) { return v.lpNorm<1>(); };
    Vec x = (warm_start && warm_start->size() == p) ? *warm_start : Vec::Zero(p);
    Vec z = x;
    double t = 1.0;
    double fx = (design * x - targets).squaredNorm() + lambda * l1(x);
    res.objective_trace.reserve(std::min(config.max_iters + 1, 1 << 16));
    res.objective_trace.push_back(fx);
    bool kkt_checked = false;

    int iter = 0;
    for (; iter < config.max_iters; ++iter) {
        const Vec rz = design * z - targets;
        const double smooth_z = rz.squaredNorm();
        const Vec grad = 2.0 * (design.transpose() * rz);

        Vec w(p);
        double smooth_w = 0.0;
        for (;;) {
            const double step = 1.0 / lips;
            for (int j = 0; j < p; ++j)
                w[j] = soft_threshold(z[j] - step * grad[j], lambda * step);
            smooth_w = (design * w - targets).squaredNorm();
            if (!backtracking) break;
            const Vec dw = w - z;
            const double bound =
                smooth_z + grad.dot(dw) + 0.5 * lips * dw.squaredNorm() + 1e-12 * smooth_z;
            if (smooth_w <= bound || lips > 1e30) break;
            lips *= 2.0;
        }
        const double fw = smooth_w + lambda * l1(w);

        // monotone step: never accept an iterate worse than the current best
        Vec x_next;
        double fx_next;
        if (fw <= fx) {
            x_next = w;
            fx_next = fw;
        } else {
            x_next = x;
            fx_next = fx;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        z = x_next + (t / t_next) * (w - x_next) + ((t - 1.0) / t_next) * (x_next - x);
        t = t_next;
        x = std::move(x_next);
        const double fx_old = fx;
        fx = fx_next;
        res.objective_trace.push_back(fx);

        const double rel = (fx_old - fx) / std::max(std::abs(fx_old), 1e-300);
        if (rel < config.tol_rel_obj) {
            res.kkt_residual = kkt_residual_lasso(design, targets, lambda, x);
            kkt_checked = true;
            if (res.kkt_residual <= config.tol_kkt) {
                res.converged = true;
                ++iter;
                break;
            }
        } else {
            kkt_checked = false;
        }
    }

    res.coeffs = x;
    res.iterations = iter;
    if (!kkt_checked) res.kkt_residual = kkt_residual_lasso(design, targets, lambda, x);
    fill_active(res, config.activity_threshold_rel);
    return res;
}

Vec refit_on_support(const Mat& design, const Vec& targets, const std::vector<int>& support) {
    Vec out = Vec::Zero(design.cols());
    if (support.empty()) return out;
    Mat sub(design.rows(), static_cast<int>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i)
        sub.col(static_cast<int>(i)) = design.col(support[i]);
    Eigen::ColPivHouseholderQR<Mat> qr(sub);
    if (qr.rank() < static_cast<Eigen::Index>(support.size()))
        throw RankDeficientSupport("support columns are linearly dependent (rank " +
                                   std::to_string(qr.rank()) + " of " +
                                   std::to_string(support.size()) + ")");
    const Vec sol = qr.solve(targets);
    for (std::size_t i = 0; i < support.size(); ++i) out[support[i]] = sol[static_cast<int>(i)];
    return out;
}

MklResult solve_mkl(const std::vector<Mat>& grams, const Vec& targets, double lambda,
                    double mkl_penalty_weight, const SolverConfig& config) {
    config.validate();
    if (grams.empty()) throw InvalidInput("solve_mkl needs at least one Gram matrix");
    const int m = static_cast<int>(targets.size());
    for (const auto& g : grams)
        if (g.rows() != m || g.cols() != m) throw InvalidInput("solve_mkl: Gram shape mismatch");
    const int n = static_cast<int>(grams.size());
    const double eta = mkl_penalty_weight;

    MklResult best;
    best.objective = std::numeric_limits<double>::infinity();
    Vec mu = Vec::Ones(n);
    double prev_obj = std::numeric_limits<double>::infinity();
    int inner_total = 0;
    const int max_outer = std::max(1, config.max_iters / 25);

    for (int outer = 0; outer < max_outer; ++outer) {
        Mat gram_mu = Mat::Zero(m, m);
        for (int i = 0; i < n; ++i) gram_mu += mu[i] * grams[i];
        const Vec a = solve_ridge(gram_mu, targets, lambda);

        const double objective = (gram_mu * a - targets).squaredNorm() +
                                 lambda * a.dot(gram_mu * a) + eta * mu.squaredNorm();
        if (objective < best.objective) {
            best.objective = objective;
            best.mu = mu;
            best.coeffs = a;
        }
        if (outer > 0 && std::abs(prev_obj - objective) <=
                             config.tol_rel_obj * std::max(std::abs(prev_obj), 1.0)) {
            best.converged = true;
            break;
        }
        prev_obj = objective;

        // mu block: projected gradient on a fixed-a quadratic
        Mat atoms(m, n);  // column i = G_i a
        Vec quad(n);      // a^T G_i a
        for (int i = 0; i < n; ++i) {
            atoms.col(i) = grams[i] * a;
            quad[i] = a.dot(atoms.col(i));
        }
        const double lips = 2.0 * largest_sq_singular_value(atoms) * 1.01 + 2.0 * eta;
        for (int inner = 0; inner < 25; ++inner) {
            const Vec resid = atoms * mu - targets;
            const Vec grad = 2.0 * (atoms.transpose() * resid) + lambda * quad + 2.0 * eta * mu;
            mu = (mu - grad / lips).cwiseMax(0.0);
            ++inner_total;
        }
    }
    best.inner_iterations = inner_total;
    return best;
}

}  // namespace mkr
