#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mkr/rng.hpp"
#include "mkr/solvers.hpp"
#include "oracles.hpp"

using namespace mkr;

namespace {

Mat random_design(Rng& rng, int rows, int cols) {
    Mat d(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) d(i, j) = rng.normal();
    return d;
}

Vec random_vec(Rng& rng, int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

double lasso_objective(const Mat& d, const Vec& y, double lambda, const Vec& a) {
    return (d * a - y).squaredNorm() + lambda * a.lpNorm<1>();
}

}  // namespace

TEST_CASE("solve_ridge basics") {
    Mat eye = Mat::Identity(1, 1);
    Vec y(1);
    y << 2.0;
    CHECK(solve_ridge(eye, y, 1.0)[0] == doctest::Approx(1.0).epsilon(1e-14));

    // lambda = 0 on an invertible Gram interpolates
    Mat gram(2, 2);
    gram << 1.0, std::exp(-1.0), std::exp(-1.0), 1.0;
    Vec y2(2);
    y2 << 1.0, 1.0;
    const Vec interp = solve_ridge(gram, y2, 0.0);
    CHECK((gram * interp - y2).norm() < 1e-12);

    // 2x2 closed-form oracle at lambda = 0.1: a = (G + 0.1 I)^-1 y
    const Mat shifted = gram + 0.1 * Mat::Identity(2, 2);
    const double det = shifted(0, 0) * shifted(1, 1) - shifted(0, 1) * shifted(1, 0);
    Vec expect(2);
    expect << (shifted(1, 1) * y2[0] - shifted(0, 1) * y2[1]) / det,
        (shifted(0, 0) * y2[1] - shifted(1, 0) * y2[0]) / det;
    const Vec got = solve_ridge(gram, y2, 0.1);
    CHECK((got - expect).norm() < 1e-12);

    // ridge interpolation limit: residual -> 0 as lambda -> 0
    const Vec tiny = solve_ridge(gram, y2, 1e-12);
    CHECK((gram * tiny - y2).norm() < 1e-6);

    // singular Gram with lambda = 0 and inconsistent targets
    Mat singular(2, 2);
    singular << 1.0, 1.0, 1.0, 1.0;
    Vec bad(2);
    bad << 1.0, -1.0;
    CHECK_THROWS_AS(solve_ridge(singular, bad, 0.0), SingularSystem);
}

TEST_CASE("solve_lasso analytic examples") {
    SolverConfig cfg;
    cfg.lambda = 1.0;

    // orthonormal design soft-thresholds at lambda / 2
    Mat eye = Mat::Identity(2, 2);
    Vec y(2);
    y << 2.0, 0.1;
    const auto res = solve_lasso(eye, y, cfg);
    CHECK(res.converged);
    CHECK(res.coeffs[0] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(res.coeffs[1] == 0.0);
    CHECK(res.kkt_residual < 1e-8);
    CHECK(res.active_cols.size() == 1);

    // lambda = 0 returns the least-squares solution
    Rng rng(11);
    const Mat d = random_design(rng, 6, 3);
    const Vec t = random_vec(rng, 6);
    SolverConfig ls;
    ls.lambda = 0.0;
    const auto res0 = solve_lasso(d, t, ls);
    const Vec qr = d.colPivHouseholderQr().solve(t);
    CHECK((res0.coeffs - qr).norm() < 1e-10);

    // a threshold >= 2 |y| kills a scalar coefficient
    Mat one = Mat::Identity(1, 1);
    Vec y1(1);
    y1 << 1.0;
    SolverConfig big;
    big.lambda = 2.0;
    CHECK(solve_lasso(one, y1, big).coeffs[0] == 0.0);
    big.lambda = 2.5;
    CHECK(solve_lasso(one, y1, big).coeffs[0] == 0.0);
}

TEST_CASE("kkt_residual_lasso certificate") {
    Mat eye = Mat::Identity(2, 2);
    Vec y(2);
    y << 2.0, 0.1;
    Vec opt(2);
    opt << 1.5, 0.0;
    CHECK(kkt_residual_lasso(eye, y, 1.0, opt) < 1e-10);

    Vec zero = Vec::Zero(2);
    CHECK(kkt_residual_lasso(eye, Vec::Zero(2), 0.7, zero) == 0.0);

    Vec off = opt;
    off[0] += 0.1;  // strict suboptimality on a support coordinate
    CHECK(kkt_residual_lasso(eye, y, 1.0, off) > 0.1);
}

TEST_CASE("oracle equivalence on random instances") {
    Rng rng(42);
    const double lambdas[3] = {0.01, 0.1, 1.0};
    for (int inst = 0; inst < 12; ++inst) {
        const int m = 3 + static_cast<int>(rng.uniform01() * 8);   // <= 10
        const int p = 2 + static_cast<int>(rng.uniform01() * 28);  // <= 30
        const Mat d = random_design(rng, m, p);
        const Vec y = random_vec(rng, m);
        const double lambda = lambdas[inst % 3];

        SolverConfig cfg;
        cfg.lambda = lambda;
        cfg.step_rule = (inst % 2) ? SolverConfig::StepRule::Backtracking
                                   : SolverConfig::StepRule::FixedFromPowerIteration;
        const auto fista = solve_lasso(d, y, cfg);
        const auto cd = oracles::cd_lasso(d, y, lambda);

        const double ours = lasso_objective(d, y, lambda, fista.coeffs);
        CHECK(std::abs(ours - cd.objective) <= 1e-8 * std::max(std::abs(cd.objective), 1e-12));
        CHECK(fista.kkt_residual <= 1e-6);
    }
}

TEST_CASE("objective trace is monotone") {
    Rng rng(7);
    const Mat d = random_design(rng, 10, 25);
    const Vec y = random_vec(rng, 10);
    for (auto rule : {SolverConfig::StepRule::Backtracking,
                      SolverConfig::StepRule::FixedFromPowerIteration}) {
        SolverConfig cfg;
        cfg.lambda = 0.5;
        cfg.step_rule = rule;
        const auto res = solve_lasso(d, y, cfg);
        for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
            CHECK(res.objective_trace[i] <=
                  res.objective_trace[i - 1] + 1e-12 * std::abs(res.objective_trace[i - 1]));
    }
}

TEST_CASE("scaling homogeneity: y -> cy, lambda -> c lambda gives a -> ca") {
    Rng rng(23);
    for (int inst = 0; inst < 6; ++inst) {
        const Mat d = random_design(rng, 8, 14);
        const Vec y = random_vec(rng, 8);
        const double c = 0.5 + 4.0 * rng.uniform01();
        SolverConfig cfg;
        cfg.lambda = 0.3;
        cfg.tol_rel_obj = 1e-13;
        cfg.tol_kkt = 1e-10;
        const auto base = solve_lasso(d, y, cfg);
        SolverConfig scaled = cfg;
        scaled.lambda = c * 0.3;
        const auto other = solve_lasso(d, Vec(c * y), scaled);
        CHECK((other.coeffs - c * base.coeffs).norm() <=
              1e-8 * std::max(1.0, base.coeffs.norm()));
    }
}

TEST_CASE("refit_on_support") {
    Mat eye = Mat::Identity(2, 2);
    Vec y(2);
    y << 2.0, 0.1;
    const Vec full = refit_on_support(eye, y, {0, 1});
    CHECK((full - y).norm() == 0.0);  // exact interpolation on a square support

    const Vec none = refit_on_support(eye, y, {});
    CHECK(none.norm() == 0.0);

    const Vec partial = refit_on_support(eye, y, {0});
    CHECK(partial[0] == 2.0);
    CHECK(partial[1] == 0.0);

    Mat dup(2, 2);
    dup << 1.0, 1.0, 2.0, 2.0;
    CHECK_THROWS_AS(refit_on_support(dup, y, {0, 1}), RankDeficientSupport);
}

TEST_CASE("solve_mkl single-kernel matches a dense scan oracle") {
    Rng rng(31);
    const int m = 8;
    Mat pts = random_design(rng, m, 1);
    Mat gram(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            gram(i, j) = std::exp(-std::abs(pts(i, 0) - pts(j, 0)));
    const Vec y = random_vec(rng, m);
    const double lambda = 0.5, eta = 0.05;  // eta large enough that mu* lands inside [0, 10]

    auto value_at = [&](double mu) {
        const Mat gm = mu * gram;
        const Vec a = solve_ridge(gm, y, lambda);
        return (gm * a - y).squaredNorm() + lambda * a.dot(gm * a) + eta * mu * mu;
    };
    const double oracle = oracles::scan_min(value_at, 0.0, 10.0, 4000);

    SolverConfig cfg;
    cfg.max_iters = 20000;
    cfg.tol_rel_obj = 1e-12;
    const auto res = solve_mkl({gram}, y, lambda, eta, cfg);
    CHECK(res.converged);
    CHECK(res.mu[0] >= 0.0);
    CHECK(std::abs(res.objective - oracle) <= 1e-6 * std::max(std::abs(oracle), 1.0));
}

TEST_CASE("solve_mkl degenerate and symmetric cases") {
    Mat gram = Mat::Identity(4, 4);
    SolverConfig cfg;

    // zero targets: objective eta ||mu||^2 is minimized at mu = 0
    const auto zero = solve_mkl({gram, gram}, Vec::Zero(4), 0.3, 1e-3, cfg);
    CHECK(zero.objective == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(zero.mu.norm() <= 1e-9);

    // two identical grams reduce to one kernel with mu = mu1 + mu2
    Rng rng(13);
    Mat pts = random_design(rng, 6, 1);
    Mat g(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) g(i, j) = std::exp(-std::abs(pts(i, 0) - pts(j, 0)));
    const Vec y = random_vec(rng, 6);
    cfg.tol_rel_obj = 1e-12;
    const auto twin = solve_mkl({g, g}, y, 0.5, 1e-3, cfg);

    // swapping mu components leaves the objective unchanged
    const Mat gm = (twin.mu[0] + twin.mu[1]) * g;
    const double swapped = (gm * twin.coeffs - y).squaredNorm() +
                           0.5 * twin.coeffs.dot(gm * twin.coeffs) +
                           1e-3 * Vec((Vec(2) << twin.mu[1], twin.mu[0]).finished()).squaredNorm();
    CHECK(swapped == doctest::Approx(twin.objective).epsilon(1e-8));

    // objective comparable to the single-kernel problem with the combined weight
    // and the halved penalty advantage: check against the scan oracle in mu_total
    auto value_at = [&](double mu_total) {
        const Mat gmu = mu_total * g;
        const Vec a = solve_ridge(gmu, y, 0.5);
        // two equal weights mu_total/2 give penalty eta * mu_total^2 / 2
        return (gmu * a - y).squaredNorm() + 0.5 * a.dot(gmu * a) +
               1e-3 * 0.5 * mu_total * mu_total;
    };
    const double oracle = oracles::scan_min(value_at, 0.0, 20.0, 4000);
    CHECK(twin.objective <= oracle + 1e-8 * std::max(1.0, std::abs(oracle)) + 1e-6);
}

TEST_CASE("solver config validation") {
    SolverConfig bad;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidConfig);
    bad = SolverConfig{};
    bad.max_iters = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidConfig);
    bad = SolverConfig{};
    bad.tol_kkt = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidConfig);
}
