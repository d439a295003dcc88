// Test-only oracles, independent of the library's solver/transform paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// adaptive Simpson quadrature
// ---------------------------------------------------------------------------

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 24) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

// ---------------------------------------------------------------------------
// Fourier-pair oracles (convention Fhat(w) = int f exp(-iwx) dx)
// ---------------------------------------------------------------------------

// rho(r) = (1/pi) int_0^inf g(w) cos(wr) dw, integrated panel-wise in
// oscillation-sized chunks up to cutoff.
inline double inverse_fourier_1d(const std::function<double(double)>& response, double r,
                                 double cutoff = 4000.0, double tol = 1e-11) {
    const double panel = (std::abs(r) < 0.5) ? 5.0 : M_PI / std::abs(r);
    double acc = 0.0;
    for (double a = 0.0; a < cutoff; a += panel) {
        const double b = std::min(a + panel, cutoff);
        acc += adaptive_simpson([&](double w) { return response(w) * std::cos(w * r); }, a, b,
                                tol * panel / cutoff);
    }
    return acc / M_PI;
}

// ghat(w) = 2 int_0^inf exp(-gamma x^alpha) cos(wx) dx
inline double exp_kernel_response(double alpha, double gamma, double w, double tol = 1e-12) {
    const double extent = std::pow(38.0 / gamma, 1.0 / alpha);
    const double panel = (std::abs(w) < 0.5) ? extent : std::min(extent, M_PI / std::abs(w));
    double acc = 0.0;
    for (double a = 0.0; a < extent; a += panel) {
        const double b = std::min(a + panel, extent);
        acc += adaptive_simpson(
            [&](double x) { return std::exp(-gamma * std::pow(x, alpha)) * std::cos(w * x); }, a,
            b, tol);
    }
    return 2.0 * acc;
}

// ---------------------------------------------------------------------------
// coordinate-descent LASSO: min ||D a - y||^2 + lambda ||a||_1
// ---------------------------------------------------------------------------

struct CdResult {
    Vec coeffs;
    double objective = 0.0;
    int sweeps = 0;
};

inline CdResult cd_lasso(const Mat& design, const Vec& targets, double lambda,
                         int max_sweeps = 200000, double tol = 1e-14) {
    const int p = static_cast<int>(design.cols());
    Vec a = Vec::Zero(p);
    Vec residual = targets;  // y - D a
    Vec col_sq(p);
    for (int j = 0; j < p; ++j) col_sq[j] = design.col(j).squaredNorm();

    auto objective = [&] { return residual.squaredNorm() + lambda * a.lpNorm<1>(); };
    double prev = objective();
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        for (int j = 0; j < p; ++j) {
            if (col_sq[j] == 0.0) continue;
            const double rho = design.col(j).dot(residual) + col_sq[j] * a[j];
            double next = 0.0;
            if (rho > 0.5 * lambda)
                next = (rho - 0.5 * lambda) / col_sq[j];
            else if (rho < -0.5 * lambda)
                next = (rho + 0.5 * lambda) / col_sq[j];
            const double delta = next - a[j];
            if (delta != 0.0) {
                residual -= delta * design.col(j);
                a[j] = next;
            }
        }
        const double obj = objective();
        if (prev - obj <= tol * std::max(std::abs(prev), 1.0)) {
            prev = obj;
            break;
        }
        prev = obj;
    }
    return {a, prev, sweep};
}

// ---------------------------------------------------------------------------
// dense scan + golden-section refinement for the N = 1 MKL objective
// ---------------------------------------------------------------------------

inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         int iters = 200) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return f(0.5 * (a + b));
}

inline double scan_min(const std::function<double(double)>& f, double lo, double hi, int coarse) {
    double best_x = lo, best = f(lo);
    for (int i = 1; i <= coarse; ++i) {
        const double x = lo + (hi - lo) * i / coarse;
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    const double h = (hi - lo) / coarse;
    return std::min(best, golden_min(f, std::max(lo, best_x - h), std::min(hi, best_x + h)));
}

}  // namespace oracles
