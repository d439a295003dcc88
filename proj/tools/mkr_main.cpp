#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mkr/admissibility.hpp"
#include "mkr/config.hpp"

namespace {

using namespace mkr;
namespace fs = std::filesystem;

KernelSpec spec_from_flags(const std::string& family, double alpha, double gamma, double s,
                           int dim) {
    if (family == "exp") return KernelSpec::exponential(alpha, gamma, dim);
    if (family == "bessel") return KernelSpec::bessel(s, gamma, dim);
    throw InvalidSpec("family must be 'exp' or 'bessel'");
}

int run_kernel_table(const KernelSpec& spec, double range, int n, const std::string& out_path) {
    if (!(range > 0)) throw InvalidInput("range must be positive");
    if (n < 2) throw InvalidInput("need at least two samples");
    auto engine = kernel_engine(spec, range * (spec.dim == 1 ? 1.0 : 1.5));

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty() && out_path != "-") {
        file.open(out_path);
        if (!file) throw InvalidInput("cannot write " + out_path);
        out = &file;
    }
    char buf[128];
    if (spec.dim == 1) {
        *out << "r,value\n";
        for (int i = 0; i < n; ++i) {
            const double r = -range + 2.0 * range * i / (n - 1.0);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r, engine->at_axis_offset(r));
            *out << buf;
        }
    } else if (spec.dim == 2) {
        *out << "x1,x2,value\n";
        Vec offset(2);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                offset[0] = -range + 2.0 * range * i / (n - 1.0);
                offset[1] = -range + 2.0 * range * j / (n - 1.0);
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", offset[0], offset[1],
                              engine->at_offset(offset));
                *out << buf;
            }
        }
    } else {
        throw InvalidInput("kernel-table emits d = 1 or d = 2 profiles");
    }
    return 0;
}

int run_check(const KernelSpec& spec, const ProbeConfig& probe) {
    const AdmissibilityReport report = check_admissibility(spec, probe);
    std::cout << spec.describe() << "\n" << report.summary();
    return report.admissible ? 0 : 1;
}

void write_solution_csv(const KernelModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path);
    out << "block,index,center,coefficient\n";
    char buf[160];
    for (std::size_t b = 0; b < model.terms.size(); ++b) {
        const auto& term = model.terms[b];
        for (int l = 0; l < term.coeffs.size(); ++l) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g\n", b, l, term.centers(l, 0),
                          term.weight * term.coeffs[l]);
            out << buf;
        }
    }
}

int run_fit(const std::string& config_path) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    if (cfg.estimators.size() != 1)
        throw InvalidConfig("fit expects exactly one [estimator] section, found " +
                            std::to_string(cfg.estimators.size()));
    const EstimatorSpec& est = cfg.estimators[0];

    TrainingSet train;
    if (!cfg.data_csv.empty()) {
        train = read_training_csv(cfg.data_csv);
        if (train.dim() != 1) throw InvalidInput("fit supports d = 1 data");
    } else {
        train = generate_task(cfg.task).train;
    }
    fs::create_directories(cfg.out_dir);

    // single-point hyper grids fit directly, anything else cross-validates
    const bool multi = est.method == Method::MklRidge || est.method == Method::MultiGtv;
    ChosenHyper hyper;
    if (est.lambdas.size() == 1 && (multi || est.widths.size() == 1)) {
        hyper.lambda = est.lambdas[0];
        hyper.widths = multi ? est.widths : std::vector<double>{est.widths[0]};
    } else {
        hyper = cross_validate(est, train, cfg.folds);
    }

    bool converged = true;
    switch (est.method) {
        case Method::SingleGtv:
        case Method::MultiGtv: {
            std::vector<KernelSpec> specs;
            for (double g : hyper.widths) specs.push_back(est.kernel(g));
            const RefinementTrace trace =
                solve_multigrid(specs, train, hyper.lambda, est.refine, est.solver);
            write_trace_csv(trace, (fs::path(cfg.out_dir) / "trace.csv").string());
            write_solution_csv(trace.model(true),
                               (fs::path(cfg.out_dir) / "solution.csv").string());
            converged = trace.final.converged || trace.empty_model;
            std::printf(
                "objective=%.12g iterations=%d sparsity=%d kkt_residual=%.3g converged=%s%s\n",
                trace.objective(), trace.final.iterations, trace.n_active(),
                trace.final.kkt_residual, converged ? "yes" : "no",
                trace.empty_model ? " (empty model)" : "");
            break;
        }
        case Method::GenLasso: {
            const KernelSpec spec = est.kernel(hyper.widths.at(0));
            CenterGrid grid;
            grid.centers = train.sites;
            grid.bounds.lo = train.sites.colwise().minCoeff().transpose();
            grid.bounds.hi = train.sites.colwise().maxCoeff().transpose();
            const Dictionary dict = assemble_design({spec}, {grid}, train);
            SolverConfig scfg = est.solver;
            scfg.lambda = hyper.lambda;
            const SolverResult res = solve_lasso(dict.design, train.targets, scfg);
            const Vec refit = res.active_cols.empty()
                                  ? Vec::Zero(dict.n_cols())
                                  : refit_on_support(dict.design, train.targets, res.active_cols);
            KernelModel model;
            model.terms.push_back({spec, train.sites, refit, 1.0});
            write_solution_csv(model, (fs::path(cfg.out_dir) / "solution.csv").string());
            converged = res.converged;
            std::printf(
                "objective=%.12g iterations=%d sparsity=%d kkt_residual=%.3g converged=%s\n",
                res.objective(), res.iterations, static_cast<int>(res.active_cols.size()),
                res.kkt_residual, converged ? "yes" : "no");
            break;
        }
        case Method::RkhsRidge: {
            const KernelSpec spec = est.kernel(hyper.widths.at(0));
            const Mat gram = assemble_gram(spec, train);
            const Vec a = solve_ridge(gram, train.targets, hyper.lambda);
            KernelModel model;
            model.terms.push_back({spec, train.sites, a, 1.0});
            write_solution_csv(model, (fs::path(cfg.out_dir) / "solution.csv").string());
            const double objective =
                (gram * a - train.targets).squaredNorm() + hyper.lambda * a.dot(gram * a);
            std::printf("objective=%.12g iterations=0 sparsity=%d kkt_residual=0 converged=yes\n",
                        objective, train.size());
            break;
        }
        case Method::MklRidge: {
            std::vector<KernelSpec> specs;
            std::vector<Mat> grams;
            for (double g : hyper.widths) {
                specs.push_back(est.kernel(g));
                grams.push_back(assemble_gram(specs.back(), train));
            }
            const MklResult res =
                solve_mkl(grams, train.targets, hyper.lambda, est.mkl_eta, est.solver);
            KernelModel model;
            for (std::size_t n = 0; n < specs.size(); ++n)
                model.terms.push_back({specs[n], train.sites, res.coeffs, res.mu[n]});
            write_solution_csv(model, (fs::path(cfg.out_dir) / "solution.csv").string());
            converged = res.converged;
            int active = 0;
            const double amax = res.coeffs.cwiseAbs().maxCoeff();
            for (int i = 0; i < res.coeffs.size(); ++i)
                if (amax > 0 && std::abs(res.coeffs[i]) > 1e-6 * amax) ++active;
            std::printf(
                "objective=%.12g iterations=%d sparsity=%d kkt_residual=0 converged=%s\n",
                res.objective, res.inner_iterations, active, converged ? "yes" : "no");
            break;
        }
    }
    return converged ? 0 : 3;
}

int run_compare(const std::string& config_path, long seed_override,
                const std::string& out_override) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (seed_override >= 0) cfg.task.seed = static_cast<std::uint64_t>(seed_override);
    if (!out_override.empty()) cfg.out_dir = out_override;

    const ExperimentReport report = run_comparison(cfg.task, cfg.estimators, cfg.folds);
    write_report_files(report, cfg.out_dir);

    std::printf("%-12s %-12s %-9s %-10s %s\n", "method", "mse", "sparsity", "lambda", "widths");
    bool any_failed = false;
    for (const auto& m : report.methods) {
        if (m.failed) {
            any_failed = true;
            std::printf("%-12s FAILED: %s\n", m.method.c_str(), m.error.c_str());
            continue;
        }
        std::string widths;
        char buf[32];
        for (std::size_t i = 0; i < m.widths.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%g%s", m.widths[i],
                          i + 1 == m.widths.size() ? "" : ";");
            widths += buf;
        }
        std::printf("%-12s %-12.6g %-9d %-10g %s\n", m.method.c_str(), m.mse, m.sparsity,
                    m.lambda, widths.c_str());
    }
    std::printf("report written to %s\n", cfg.out_dir.c_str());
    return any_failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse multi-kernel regression with adaptive centers"};
    app.require_subcommand(1);

    std::string family = "exp";
    double alpha = 1.0, gamma = 1.0, s = 2.0;
    int dim = 1;
    auto add_spec_flags = [&](CLI::App* cmd) {
        cmd->add_option("--family", family, "kernel family: exp | bessel");
        cmd->add_option("--alpha", alpha, "exponential exponent in (0, 2]");
        cmd->add_option("--gamma", gamma, "width parameter > 0");
        cmd->add_option("--s", s, "Bessel smoothness (> d)");
        cmd->add_option("--dim", dim, "ambient dimension");
    };

    auto* table_cmd = app.add_subcommand("kernel-table", "sample a kernel profile to CSV");
    add_spec_flags(table_cmd);
    double range = 5.0;
    int n_samples = 201;
    std::string out_path = "-";
    table_cmd->add_option("--range", range, "emit offsets in [-range, range]");
    table_cmd->add_option("--n", n_samples, "samples per axis");
    table_cmd->add_option("--out", out_path, "output CSV path ('-' for stdout)");

    auto* check_cmd = app.add_subcommand("check", "numerical admissibility check");
    add_spec_flags(check_cmd);
    ProbeConfig probe;
    check_cmd->add_option("--freq-min", probe.freq_min, "frequency probe lower edge");
    check_cmd->add_option("--freq-max", probe.freq_max, "frequency probe upper edge");
    check_cmd->add_option("--radius-min", probe.radius_min, "radial probe lower edge");
    check_cmd->add_option("--radius-max", probe.radius_max, "radial probe upper edge");
    check_cmd->add_option("--decay-fraction", probe.decay_fraction, "decay test threshold");
    check_cmd->add_option("--slope-cap", probe.slope_cap, "heavy-tail slope cap");

    auto* fit_cmd = app.add_subcommand("fit", "fit one estimator from a config file");
    std::string fit_config;
    fit_cmd->add_option("config", fit_config, "config file")->required();

    auto* compare_cmd = app.add_subcommand("compare", "run the estimator comparison");
    std::string compare_config;
    long seed_override = -1;
    std::string out_override;
    compare_cmd->add_option("config", compare_config, "config file")->required();
    compare_cmd->add_option("--seed", seed_override, "override the task seed");
    compare_cmd->add_option("--out", out_override, "override the output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (table_cmd->parsed())
            return run_kernel_table(spec_from_flags(family, alpha, gamma, s, dim), range,
                                    n_samples, out_path);
        if (check_cmd->parsed()) return run_check(spec_from_flags(family, alpha, gamma, s, dim), probe);
        if (fit_cmd->parsed()) return run_fit(fit_config);
        if (compare_cmd->parsed()) return run_compare(compare_config, seed_override, out_override);
    } catch (const InvalidSpec& e) {
        std::cerr << "invalid kernel spec: " << e.what() << "\n";
        return 2;
    } catch (const InvalidConfig& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const ProbeRangeInvalid& e) {
        std::cerr << "invalid probe range: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
