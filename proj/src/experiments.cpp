#include "mkr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>

#include "mkr/parallel.hpp"
#include "mkr/rng.hpp"

namespace mkr {

void SyntheticTask::validate() const {
    if (knots.size() < 2) throw InvalidConfig("task needs at least two knots");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i].first > knots[i - 1].first))
            throw InvalidConfig("knots must be sorted by position");
    if (!(hi > lo)) throw InvalidConfig("task domain is empty");
    if (samples < 1) throw InvalidConfig("task needs at least one sample");
    if (noise_sigma < 0.0) throw InvalidConfig("noise_sigma must be >= 0");
}

double SyntheticTask::target(double x) const {
    if (x <= knots.front().first) return knots.front().second;
    if (x >= knots.back().first) return knots.back().second;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (x <= knots[i].first) {
            const auto& [x0, y0] = knots[i - 1];
            const auto& [x1, y1] = knots[i];
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    return knots.back().second;
}

SyntheticTask SyntheticTask::default_task() {
    SyntheticTask task;
    task.knots = {{-1.0, 0.0}, {-0.6, 4.0}, {-0.25, -1.5}, {0.1, 5.0}, {0.55, 0.5}, {1.0, 3.0}};
    task.noise_sigma = 1.5;
    task.samples = 40;
    task.seed = 1;
    return task;
}

GeneratedTask generate_task(const SyntheticTask& task) {
    task.validate();
    Rng rng(task.seed);
    std::vector<double> sites(static_cast<std::size_t>(task.samples));
    for (auto& x : sites) x = rng.uniform(task.lo, task.hi);
    std::sort(sites.begin(), sites.end());

    GeneratedTask out;
    out.train.sites.resize(task.samples, 1);
    out.train.targets.resize(task.samples);
    for (int m = 0; m < task.samples; ++m) {
        out.train.sites(m, 0) = sites[static_cast<std::size_t>(m)];
        out.train.targets[m] =
            task.target(sites[static_cast<std::size_t>(m)]) + task.noise_sigma * rng.normal();
    }
    out.train.validate();

    const int grid_n = 1000;
    out.grid_x.resize(grid_n);
    out.grid_f.resize(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        out.grid_x[i] = task.lo + (task.hi - task.lo) * i / (grid_n - 1.0);
        out.grid_f[i] = task.target(out.grid_x[i]);
    }
    return out;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::RkhsRidge: return "rkhs_ridge";
        case Method::GenLasso: return "gen_lasso";
        case Method::MklRidge: return "mkl_ridge";
        case Method::SingleGtv: return "single_gtv";
        case Method::MultiGtv: return "multi_gtv";
    }
    return "?";
}

void EstimatorSpec::validate() const {
    if (widths.empty() || lambdas.empty())
        throw InvalidConfig(method_name(method) + ": hyper grid must not be empty");
    for (double g : widths)
        if (!(g > 0.0)) throw InvalidConfig("widths must be positive");
    for (double l : lambdas)
        if (l < 0.0) throw InvalidConfig("lambdas must be >= 0");
    if ((method == Method::MklRidge || method == Method::MultiGtv) && widths.size() < 2)
        throw InvalidConfig(method_name(method) + " needs at least two kernels");
}

namespace {

CenterGrid grid_at_sites(const TrainingSet& train) {
    CenterGrid grid;
    grid.centers = train.sites;
    grid.spacing = 0.0;
    grid.bounds.lo = train.sites.colwise().minCoeff().transpose();
    grid.bounds.hi = train.sites.colwise().maxCoeff().transpose();
    return grid;
}

int count_active(const Vec& coeffs, double rel = 1e-6) {
    const double amax = coeffs.size() ? coeffs.cwiseAbs().maxCoeff() : 0.0;
    if (amax == 0.0) return 0;
    int n = 0;
    for (int i = 0; i < coeffs.size(); ++i)
        if (std::abs(coeffs[i]) > rel * amax) ++n;
    return n;
}

// CV fits run at slightly relaxed tolerances; the final fit uses the spec's
// own config. The KKT tolerance stays at 1e-7: looser values let a refinement
// round stop on a wrong active set, which distorts the validation curve.
SolverConfig relaxed_for_cv(SolverConfig cfg) {
    cfg.tol_rel_obj = std::max(cfg.tol_rel_obj, 1e-9);
    cfg.tol_kkt = std::max(cfg.tol_kkt, 1e-7);
    cfg.max_iters = std::min(cfg.max_iters, 8000);
    return cfg;
}

struct FitOutcome {
    KernelModel model;
    int sparsity = 0;
    bool converged = true;
};

FitOutcome fit_method(const EstimatorSpec& est, const TrainingSet& train, double lambda,
                      const std::vector<double>& widths, const SolverConfig& solver) {
    FitOutcome out;
    switch (est.method) {
        case Method::RkhsRidge: {
            const KernelSpec spec = est.kernel(widths.at(0));
            const Mat gram = assemble_gram(spec, train);
            const Vec a = solve_ridge(gram, train.targets, lambda);
            out.model.terms.push_back({spec, train.sites, a, 1.0});
            out.sparsity = train.size();  // dense expansion at the data sites
            break;
        }
        case Method::GenLasso: {
            const KernelSpec spec = est.kernel(widths.at(0));
            const Dictionary dict = assemble_design({spec}, {grid_at_sites(train)}, train);
            SolverConfig cfg = solver;
            cfg.lambda = lambda;
            const SolverResult res = solve_lasso(dict.design, train.targets, cfg);
            const Vec refit = res.active_cols.empty()
                                  ? Vec::Zero(dict.n_cols())
                                  : refit_on_support(dict.design, train.targets, res.active_cols);
            out.model.terms.push_back({spec, train.sites, refit, 1.0});
            out.sparsity = static_cast<int>(res.active_cols.size());
            out.converged = res.converged;
            break;
        }
        case Method::MklRidge: {
            std::vector<Mat> grams;
            std::vector<KernelSpec> specs;
            for (double g : widths) {
                specs.push_back(est.kernel(g));
                grams.push_back(assemble_gram(specs.back(), train));
            }
            const MklResult res = solve_mkl(grams, train.targets, lambda, est.mkl_eta, solver);
            for (std::size_t n = 0; n < specs.size(); ++n)
                out.model.terms.push_back({specs[n], train.sites, res.coeffs, res.mu[n]});
            out.sparsity = count_active(res.coeffs);
            out.converged = res.converged;
            break;
        }
        case Method::SingleGtv:
        case Method::MultiGtv: {
            std::vector<KernelSpec> specs;
            for (double g : widths) specs.push_back(est.kernel(g));
            const RefinementTrace trace =
                solve_multigrid(specs, train, lambda, est.refine, solver);
            out.model = trace.model(true);
            out.sparsity = trace.n_active();
            out.converged = trace.final.converged || trace.empty_model;
            break;
        }
    }
    return out;
}

std::vector<std::vector<double>> width_candidates(const EstimatorSpec& est) {
    std::vector<std::vector<double>> cands;
    if (est.method == Method::MklRidge || est.method == Method::MultiGtv) {
        cands.push_back(est.widths);  // all widths at once, lambda-only CV
    } else {
        for (double g : est.widths) cands.push_back({g});
    }
    return cands;
}

}  // namespace

ChosenHyper cross_validate(const EstimatorSpec& est, const TrainingSet& train, int folds) {
    est.validate();
    train.validate();
    if (folds < 2) throw InsufficientData("cross validation needs folds >= 2");
    const int m = train.size();
    if (folds > m) throw InsufficientData("a fold would be empty");

    // contiguous blocks after site sort
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        for (int ax = 0; ax < train.dim(); ++ax) {
            if (train.sites(a, ax) != train.sites(b, ax))
                return train.sites(a, ax) < train.sites(b, ax);
        }
        return a < b;
    });

    const auto width_sets = width_candidates(est);
    struct Candidate {
        double lambda;
        const std::vector<double>* widths;
    };
    std::vector<Candidate> candidates;
    for (const auto& w : width_sets)
        for (double l : est.lambdas) candidates.push_back({l, &w});

    const SolverConfig cv_cfg = relaxed_for_cv(est.solver);
    std::vector<double> sse(candidates.size() * static_cast<std::size_t>(folds), 0.0);

    parallel_for(sse.size(), [&](std::size_t idx) {
        const std::size_t c = idx / static_cast<std::size_t>(folds);
        const int fold = static_cast<int>(idx % static_cast<std::size_t>(folds));
        const int begin = fold * m / folds;
        const int end = (fold + 1) * m / folds;

        TrainingSet part;
        part.sites.resize(m - (end - begin), train.dim());
        part.targets.resize(m - (end - begin));
        Mat val_sites(end - begin, train.dim());
        Vec val_targets(end - begin);
        int tp = 0;
        for (int i = 0; i < m; ++i) {
            const int site = order[static_cast<std::size_t>(i)];
            if (i >= begin && i < end) {
                val_sites.row(i - begin) = train.sites.row(site);
                val_targets[i - begin] = train.targets[site];
            } else {
                part.sites.row(tp) = train.sites.row(site);
                part.targets[tp++] = train.targets[site];
            }
        }

        const FitOutcome fit =
            fit_method(est, part, candidates[c].lambda, *candidates[c].widths, cv_cfg);
        const Vec pred = fit.model.predict(val_sites);
        sse[idx] = (pred - val_targets).squaredNorm();
    });

    ChosenHyper best;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        double err = 0.0;
        for (int f = 0; f < folds; ++f) err += sse[c * static_cast<std::size_t>(folds) + f];
        err /= m;
        const bool better =
            err < best_err || (err == best_err && candidates[c].lambda > best.lambda);
        if (better) {
            best_err = err;
            best.lambda = candidates[c].lambda;
            best.widths = *candidates[c].widths;
        }
    }
    return best;
}

ExperimentReport run_comparison(const SyntheticTask& task,
                                const std::vector<EstimatorSpec>& methods, int folds) {
    const GeneratedTask data = generate_task(task);
    ExperimentReport report;
    report.grid_x = data.grid_x;
    report.grid_f = data.grid_f;

    Mat grid_pts(data.grid_x.size(), 1);
    grid_pts.col(0) = data.grid_x;

    for (const auto& est : methods) {
        MethodReport mr;
        mr.method = method_name(est.method);
        try {
            const ChosenHyper hyper = cross_validate(est, data.train, folds);
            const FitOutcome fit = fit_method(est, data.train, hyper.lambda, hyper.widths,
                                              est.solver);
            mr.lambda = hyper.lambda;
            mr.widths = hyper.widths;
            mr.sparsity = fit.sparsity;
            mr.fitted = fit.model.predict(grid_pts);
            mr.mse = (mr.fitted - data.grid_f).squaredNorm() / data.grid_f.size();

            std::vector<double> mags;
            for (const auto& term : fit.model.terms)
                for (int i = 0; i < term.coeffs.size(); ++i)
                    mags.push_back(std::abs(term.weight * term.coeffs[i]));
            std::sort(mags.begin(), mags.end(), std::greater<>());
            mr.top_coeffs = Vec::Zero(task.samples);
            for (int i = 0; i < task.samples && i < static_cast<int>(mags.size()); ++i)
                mr.top_coeffs[i] = mags[static_cast<std::size_t>(i)];
        } catch (const std::exception& e) {
            mr.failed = true;
            mr.error = e.what();
        }
        report.methods.push_back(std::move(mr));
    }
    return report;
}

std::vector<EstimatorSpec> default_estimators() {
    const std::vector<double> gauss_widths = {2.0, 8.0, 32.0, 128.0, 512.0};
    const std::vector<double> exp_widths = {2.0, 8.0, 32.0, 128.0, 512.0};
    const std::vector<double> ridge_lambdas = {1e-4, 1e-3, 1e-2, 0.1, 1.0};
    const std::vector<double> lasso_lambdas = {0.5, 1.5, 5.0, 15.0, 50.0};

    SolverConfig solver;
    solver.max_iters = 20000;
    solver.tol_rel_obj = 1e-10;
    solver.tol_kkt = 1e-8;

    RefinementConfig refine;
    refine.initial_spacing = 0.25;
    refine.min_spacing = 0.02;

    std::vector<EstimatorSpec> methods(5);
    methods[0].method = Method::RkhsRidge;
    methods[0].exp_alpha = 2.0;
    methods[0].widths = gauss_widths;
    methods[0].lambdas = ridge_lambdas;

    methods[1].method = Method::GenLasso;
    methods[1].exp_alpha = 2.0;
    methods[1].widths = gauss_widths;
    methods[1].lambdas = lasso_lambdas;

    methods[2].method = Method::MklRidge;
    methods[2].exp_alpha = 2.0;
    methods[2].widths = gauss_widths;
    methods[2].lambdas = ridge_lambdas;

    methods[3].method = Method::SingleGtv;
    methods[3].exp_alpha = 1.99;
    methods[3].widths = exp_widths;
    methods[3].lambdas = lasso_lambdas;

    methods[4].method = Method::MultiGtv;
    methods[4].exp_alpha = 1.99;
    methods[4].widths = exp_widths;
    methods[4].lambdas = lasso_lambdas;

    for (auto& m : methods) {
        m.solver = solver;
        m.refine = refine;
    }
    return methods;
}

void write_report_files(const ExperimentReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    char buf[256];

    std::ofstream summary(fs::path(out_dir) / "report.csv");
    if (!summary) throw InvalidInput("cannot write report.csv in " + out_dir);
    summary << "method,mse,sparsity,lambda,widths\n";
    for (const auto& m : report.methods) {
        if (m.failed) {
            summary << m.method << ",failed,,,\n";
            continue;
        }
        std::snprintf(buf, sizeof buf, "%s,%.17g,%d,%.17g,", m.method.c_str(), m.mse, m.sparsity,
                      m.lambda);
        summary << buf;
        for (std::size_t i = 0; i < m.widths.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g%s", m.widths[i],
                          i + 1 == m.widths.size() ? "" : ";");
            summary << buf;
        }
        summary << "\n";
    }

    for (const auto& m : report.methods) {
        if (m.failed) continue;
        std::ofstream fit(fs::path(out_dir) / ("fit_" + m.method + ".csv"));
        fit << "x,f_hat,f_true\n";
        for (int i = 0; i < report.grid_x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", report.grid_x[i], m.fitted[i],
                          report.grid_f[i]);
            fit << buf;
        }
        std::ofstream coeffs(fs::path(out_dir) / ("coeffs_" + m.method + ".csv"));
        coeffs << "rank,abs_coeff\n";
        for (int i = 0; i < m.top_coeffs.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%d,%.17g\n", i + 1, m.top_coeffs[i]);
            coeffs << buf;
        }
    }
}

}  // namespace mkr
