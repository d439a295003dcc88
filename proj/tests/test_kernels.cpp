#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mkr/admissibility.hpp"
#include "mkr/kernels.hpp"
#include "mkr/rng.hpp"
#include "oracles.hpp"

using namespace mkr;

namespace {

Vec v1(double x) {
    Vec v(1);
    v[0] = x;
    return v;
}

Vec v2(double x, double y) {
    Vec v(2);
    v[0] = x;
    v[1] = y;
    return v;
}

// closed Matern-type form of the Bessel potential via the modified Bessel
// function (used as an oracle only)
double bessel_closed(double s, int d, double r) {
    const double nu = 0.5 * (s - d);
    const double coeff =
        std::pow(2.0, 0.5 * (2.0 - d - s)) / (std::pow(M_PI, 0.5 * d) * std::tgamma(0.5 * s));
    if (r == 0.0)
        return std::pow(2.0, -d) * std::pow(M_PI, -0.5 * d) * std::tgamma(nu) /
               std::tgamma(0.5 * s);
    return coeff * std::pow(r, nu) * std::cyl_bessel_k(nu, r);
}

}  // namespace

TEST_CASE("spec validation") {
    CHECK_NOTHROW(KernelSpec::exponential(2.0, 1.0, 1));  // constructible, inadmissible
    CHECK_THROWS_AS(KernelSpec::exponential(3.0, 1.0, 1), InvalidSpec);
    CHECK_THROWS_AS(KernelSpec::exponential(0.0, 1.0, 1), InvalidSpec);
    CHECK_THROWS_AS(KernelSpec::exponential(1.0, -1.0, 1), InvalidSpec);
    CHECK_THROWS_AS(KernelSpec::bessel(0.5, 1.0, 1), InvalidSpec);
    CHECK_THROWS_AS(KernelSpec::bessel(2.0, 1.0, 2), InvalidSpec);
    Mat singular = Mat::Zero(2, 2);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(KernelSpec::transformed(KernelSpec::bessel(3.0, 1.0, 2), singular),
                    InvalidSpec);
}

TEST_CASE("exponential closed-form evaluation") {
    const auto spec = KernelSpec::exponential(1.0, 1.0, 1);
    CHECK(eval_kernel(spec, v1(0.0), v1(0.0)) == 1.0);
    CHECK(eval_kernel(spec, v1(std::log(2.0)), v1(0.0)) == doctest::Approx(0.5).epsilon(1e-14));

    // l_alpha geometry in d = 2
    const auto spec2 = KernelSpec::exponential(0.7, 2.0, 2);
    const double expect = std::exp(-2.0 * (std::pow(0.3, 0.7) + std::pow(1.1, 0.7)));
    CHECK(eval_kernel(spec2, v2(0.5, -0.6), v2(0.2, 0.5)) ==
          doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("Bessel potential closed forms and tables") {
    // s = 2, d = 1: rho(r) = exp(-gamma |r|)/2
    const auto s2 = KernelSpec::bessel(2.0, 1.0, 1);
    CHECK(eval_kernel(s2, v1(1.0), v1(0.0)) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
    const double quad = oracles::inverse_fourier_1d(
        [](double w) { return 1.0 / (1.0 + w * w); }, 1.0);
    CHECK(eval_kernel(s2, v1(1.0), v1(0.0)) == doctest::Approx(quad).epsilon(1e-6));

    const auto s2g = KernelSpec::bessel(2.0, 2.0, 1);  // width scaling G_s(gamma r)
    CHECK(eval_kernel(s2g, v1(0.5), v1(0.0)) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));

    // s = 4, d = 1 elementary (nu = 3/2)
    const auto s4 = KernelSpec::bessel(4.0, 1.0, 1);
    for (double r : {0.0, 0.3, 1.7, 4.0})
        CHECK(eval_kernel(s4, v1(r), v1(0.0)) == doctest::Approx(bessel_closed(4, 1, r)).epsilon(1e-12));

    // s = 3, d = 1 goes through the DFT-built radial table
    const auto s3 = KernelSpec::bessel(3.0, 1.0, 1);
    for (double r : {0.0, 0.05, 0.61, 2.3, 7.9})
        CHECK(eval_kernel(s3, v1(r), v1(0.0)) ==
              doctest::Approx(bessel_closed(3, 1, r)).epsilon(5e-6));

    // s = 4, d = 2 goes through the subordination-built radial table
    const auto s4d2 = KernelSpec::bessel(4.0, 1.0, 2);
    for (double r : {0.1, 0.9, 3.3})
        CHECK(eval_kernel(s4d2, v2(r, 0.0), v2(0.0, 0.0)) ==
              doctest::Approx(bessel_closed(4, 2, r)).epsilon(1e-7));
}

TEST_CASE("fourier_response examples") {
    CHECK(fourier_response(KernelSpec::bessel(3.0, 1.0, 1), v1(0.0)) == 1.0);
    const auto e1 = KernelSpec::exponential(1.0, 1.0, 1);
    CHECK(fourier_response(e1, v1(0.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fourier_response(e1, v1(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fourier_response(e1, v1(0.0)) ==
          doctest::Approx(oracles::exp_kernel_response(1.0, 1.0, 0.0)).epsilon(1e-9));
    CHECK(fourier_response(e1, v1(1.0)) ==
          doctest::Approx(oracles::exp_kernel_response(1.0, 1.0, 1.0)).epsilon(1e-9));
}

TEST_CASE("sampled exponential response matches quadrature (gamma scaling)") {
    const auto spec = KernelSpec::exponential(1.5, 3.0, 1);
    for (double w : {0.0, 0.7, 2.2, 9.0, 40.0}) {
        const double expect = oracles::exp_kernel_response(1.5, 3.0, w);
        CHECK(fourier_response(spec, v1(w)) == doctest::Approx(expect).epsilon(1e-6));
    }
    auto engine = kernel_engine(spec);
    CHECK_FALSE(engine->fourier_is_exact());
    CHECK(engine->fourier_resolution() > 0.0);

    // separable product in d = 2
    const auto spec2 = KernelSpec::exponential(1.5, 3.0, 2);
    const double expect2 = oracles::exp_kernel_response(1.5, 3.0, 0.7) *
                           oracles::exp_kernel_response(1.5, 3.0, 2.2);
    CHECK(fourier_response(spec2, v2(0.7, 2.2)) == doctest::Approx(expect2).epsilon(1e-6));
}

TEST_CASE("greens table: Bessel s=2 matches exp(-|r|)/2 within 1e-6") {
    const auto table = fourier_greens_table(KernelSpec::bessel(2.0, 1.0, 1), 5.0, 1 << 14);
    double sup = 0.0;
    for (int j = 0; j < table.values.size(); ++j)
        sup = std::max(sup,
                       std::abs(table.values[j] - 0.5 * std::exp(-std::abs(table.offsets(j, 0)))));
    CHECK(sup < 1e-6);
    CHECK(table.est_aliasing < 1e-6);
    CHECK(table.values.allFinite());
}

TEST_CASE("greens table: exponential normalization and symmetry") {
    const auto table = fourier_greens_table(KernelSpec::exponential(1.0, 1.0, 1), 5.0, 1 << 10);
    const int n = static_cast<int>(table.values.size()) - 1;
    CHECK(table.values[n / 2] == doctest::Approx(1.0).epsilon(1e-6));
    // peak at offset zero, exact mirror symmetry
    for (int j = 0; j <= n; ++j) {
        CHECK(table.values[j] <= table.values[n / 2]);
        CHECK(table.values[j] == table.values[n - j]);
    }
}

TEST_CASE("greens table: alpha=1.99 positive, unimodal, matches quadrature") {
    const auto spec = KernelSpec::exponential(1.99, 1.0, 1);
    const auto table = fourier_greens_table(spec, 5.0, 1 << 12);
    const int n = static_cast<int>(table.values.size()) - 1;
    const double peak = table.values[n / 2];
    for (int j = 0; j <= n; ++j) CHECK(table.values[j] > 0.0);
    for (int j = 1; j <= n / 2; ++j) CHECK(table.values[j] >= table.values[j - 1] - 1e-8 * peak);

    // spot-check the table against direct quadrature of the inverse transform
    auto engine = kernel_engine(spec);
    auto response = [&](double w) { return engine->fourier(v1(w)); };
    for (int j : {n / 2, n / 2 + 40, n / 2 + 400, n - 700}) {
        const double expect = oracles::inverse_fourier_1d(response, table.offsets(j, 0), 300.0);
        CHECK(table.values[j] == doctest::Approx(expect).epsilon(2e-6));
    }
}

TEST_CASE("greens table input validation and aliasing gate") {
    const auto spec = KernelSpec::exponential(1.0, 0.1, 1);
    CHECK_THROWS_AS(fourier_greens_table(spec, 5.0, 100), InvalidInput);      // not a power of two
    CHECK_THROWS_AS(fourier_greens_table(spec, 5.0, 32), InvalidInput);       // too small
    CHECK_THROWS_AS(fourier_greens_table(spec, -1.0, 1 << 10), InvalidInput);
    CHECK_THROWS_AS(fourier_greens_table(KernelSpec::bessel(3.0, 1.0, 2), 5.0, 1 << 10),
                    InvalidSpec);  // d = 2 not supported by the table op

    TableBuildOptions tight;
    tight.max_fft = 1 << 10;  // forces a period too short for the wide kernel
    CHECK_THROWS_AS(fourier_greens_table(spec, 5.0, 1 << 10, tight), ResolutionTooCoarse);
}

TEST_CASE("table-missing beyond radius unless extrapolation enabled") {
    Kernel engine(KernelSpec::bessel(2.5, 1.0, 1));
    const double radius = engine.table_radius();
    CHECK(radius < 1e6);
    CHECK_THROWS_AS(engine.at_axis_offset(radius * 2.0), TableMissing);
    engine.set_extrapolation(true);
    CHECK(engine.at_axis_offset(radius * 2.0) == 0.0);
    engine.set_extrapolation(false);
    engine.ensure_radius(radius * 2.0);
    CHECK_NOTHROW(engine.at_axis_offset(radius * 2.0));
}

TEST_CASE("kernel invariants: symmetry, shift invariance, transform identity") {
    Rng rng(17);
    const std::vector<KernelSpec> specs = {
        KernelSpec::exponential(1.0, 1.0, 1),  KernelSpec::exponential(1.99, 2.0, 1),
        KernelSpec::exponential(0.5, 1.0, 2),  KernelSpec::bessel(2.0, 1.0, 1),
        KernelSpec::bessel(3.0, 1.0, 2),
    };
    for (const auto& spec : specs) {
        auto engine = kernel_engine(spec, 30.0);
        for (int rep = 0; rep < 20; ++rep) {
            Vec x(spec.dim), y(spec.dim), t(spec.dim);
            for (int ax = 0; ax < spec.dim; ++ax) {
                x[ax] = rng.uniform(-3, 3);
                y[ax] = rng.uniform(-3, 3);
                t[ax] = rng.uniform(-5, 5);
            }
            CHECK((*engine)(x, y) == (*engine)(y, x));  // exact
            CHECK((*engine)(x + t, y + t) == doctest::Approx((*engine)(x, y)).epsilon(1e-12));
        }
    }

    const auto base = KernelSpec::bessel(3.0, 1.0, 2);
    const auto ident = KernelSpec::transformed(base, Mat::Identity(2, 2));
    for (double r : {0.2, 1.0, 2.7})
        CHECK(eval_kernel(ident, v2(r, -r), v2(0, 0)) == eval_kernel(base, v2(r, -r), v2(0, 0)));
}

TEST_CASE("transformed kernels: scaling and rotation") {
    // d = 1 dilation of an exponential kernel is a gamma rescale
    Mat a11(1, 1);
    a11(0, 0) = 2.0;
    const auto dil = KernelSpec::transformed(KernelSpec::exponential(1.5, 1.0, 1), a11);
    const auto equiv = KernelSpec::exponential(1.5, std::pow(2.0, 1.5), 1);
    for (double r : {0.3, 1.1})
        CHECK(eval_kernel(dil, v1(r), v1(0)) ==
              doctest::Approx(eval_kernel(equiv, v1(r), v1(0))).epsilon(1e-12));
    for (double w : {0.5, 3.0})
        CHECK(fourier_response(dil, v1(w)) ==
              doctest::Approx(fourier_response(equiv, v1(w))).epsilon(1e-9));

    // rotation leaves the (rotation-invariant) Bessel kernel unchanged
    const double c = std::cos(0.7), s = std::sin(0.7);
    Mat rot(2, 2);
    rot << c, -s, s, c;
    const auto base = KernelSpec::bessel(3.0, 1.0, 2);
    const auto turned = KernelSpec::transformed(base, rot);
    for (double r : {0.4, 2.2})
        CHECK(eval_kernel(turned, v2(r, 0.3), v2(0, 0)) ==
              doctest::Approx(eval_kernel(base, v2(r, 0.3), v2(0, 0))).epsilon(1e-12));
    // a rotated admissible kernel stays admissible
    CHECK(check_admissibility(turned).admissible);
}

TEST_CASE("positive-definiteness proxy for admissible specs") {
    const std::vector<KernelSpec> specs = {
        KernelSpec::exponential(0.5, 1.0, 1),  KernelSpec::exponential(1.0, 1.0, 1),
        KernelSpec::exponential(1.5, 1.0, 2),  KernelSpec::exponential(1.99, 4.0, 1),
        KernelSpec::bessel(2.0, 1.0, 1),       KernelSpec::bessel(3.0, 1.0, 2),
        KernelSpec::bessel(2.5, 1.0, 1),
    };
    Rng rng(5);
    for (const auto& spec : specs) {
        auto engine = kernel_engine(spec, 20.0);
        const int n = 20;
        Mat pts(n, spec.dim);
        for (int i = 0; i < n; ++i)
            for (int ax = 0; ax < spec.dim; ++ax) pts(i, ax) = rng.uniform(-3, 3);
        Mat gram(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                gram(i, j) = (*engine)(pts.row(i).transpose(), pts.row(j).transpose());
        Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * gram.trace());
    }
}

TEST_CASE("admissibility sweep") {
    for (double alpha : {0.5, 1.0, 1.5, 1.99}) {
        const auto report = check_admissibility(KernelSpec::exponential(alpha, 1.0, 1));
        CHECK(report.admissible);
        CHECK(report.decays_at_infinity);
        CHECK(report.fourier_nonvanishing);
        CHECK(report.fourier_heavy_tailed);
    }
    const auto gaussian = check_admissibility(KernelSpec::exponential(2.0, 1.0, 1));
    CHECK_FALSE(gaussian.admissible);
    CHECK_FALSE(gaussian.fourier_heavy_tailed);  // rejected via the heavy-tail criterion
    CHECK(gaussian.decays_at_infinity);

    CHECK(check_admissibility(KernelSpec::bessel(3.0, 1.0, 2)).admissible);

    ProbeConfig bad;
    bad.freq_min = -1.0;
    CHECK_THROWS_AS(check_admissibility(KernelSpec::exponential(1.0, 1.0, 1), bad),
                    ProbeRangeInvalid);
}

TEST_CASE("fourier consistency: table of fourier_response matches eval_kernel") {
    for (const auto& spec :
         {KernelSpec::exponential(1.0, 1.0, 1), KernelSpec::bessel(2.0, 1.0, 1)}) {
        const auto table = fourier_greens_table(spec, 5.0, 1 << 12);
        auto engine = kernel_engine(spec, 6.0);
        double sup = 0.0;
        for (int j = 0; j < table.values.size(); ++j)
            sup = std::max(sup,
                           std::abs(table.values[j] - engine->at_axis_offset(table.offsets(j, 0))));
        CHECK(sup < 1e-6);
    }
}

TEST_CASE("greens subordination quadrature matches the closed Matern forms") {
    for (double r : {0.0, 0.2, 1.0, 4.5}) {
        CHECK(bessel_greens_subordination(2.0, 1, r) ==
              doctest::Approx(0.5 * std::exp(-r)).epsilon(1e-12));
        CHECK(bessel_greens_subordination(3.0, 2, r) ==
              doctest::Approx(std::exp(-r) / (2.0 * M_PI)).epsilon(1e-12));
    }
}
