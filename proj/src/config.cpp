#include "mkr/config.hpp"

#include <fstream>
#include <sstream>

namespace mkr {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(int line, const std::string& where, const std::string& msg) {
    throw InvalidConfig("line " + std::to_string(line) + ": " + where + ": " + msg);
}

double to_double(const ConfigFile::Entry& e, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (trim(e.value.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail(e.line, where + " " + e.key, "expected a number, got '" + e.value + "'");
}

long to_long(const ConfigFile::Entry& e, const std::string& where) {
    try {
        std::size_t used = 0;
        const long v = std::stol(e.value, &used);
        if (trim(e.value.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail(e.line, where + " " + e.key, "expected an integer, got '" + e.value + "'");
}

std::vector<double> to_doubles(const ConfigFile::Entry& e, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string tok;
    while (ss >> tok) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            fail(e.line, where + " " + e.key, "expected numbers, got '" + tok + "'");
        }
    }
    if (out.empty()) fail(e.line, where + " " + e.key, "expected at least one number");
    return out;
}

}  // namespace

ConfigFile ConfigFile::parse_text(const std::string& text) {
    ConfigFile file;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "section header", "missing ']'");
            Section s;
            s.name = trim(line.substr(1, line.size() - 2));
            s.line = line_no;
            if (s.name.empty()) fail(line_no, "section header", "empty section name");
            file.sections.push_back(std::move(s));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "entry", "expected 'key = value'");
        if (file.sections.empty()) fail(line_no, "entry", "key outside any [section]");
        Entry e;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = line_no;
        if (e.key.empty()) fail(line_no, "entry", "empty key");
        file.sections.back().entries.push_back(std::move(e));
    }
    return file;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

const ConfigFile::Section* ConfigFile::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

namespace {

void load_task(const ConfigFile::Section& sec, SyntheticTask& task) {
    const std::string where = "[task]";
    for (const auto& e : sec.entries) {
        if (e.key == "knots") {
            task.knots.clear();
            std::stringstream ss(e.value);
            std::string pair;
            while (std::getline(ss, pair, ',')) {
                pair = trim(pair);
                if (pair.empty()) continue;
                const auto colon = pair.find(':');
                if (colon == std::string::npos)
                    fail(e.line, where + " knots", "expected position:value pairs");
                try {
                    task.knots.emplace_back(std::stod(pair.substr(0, colon)),
                                            std::stod(pair.substr(colon + 1)));
                } catch (const std::exception&) {
                    fail(e.line, where + " knots", "bad number in '" + pair + "'");
                }
            }
            if (task.knots.size() < 2) fail(e.line, where + " knots", "need at least two knots");
        } else if (e.key == "domain") {
            const auto v = to_doubles(e, where);
            if (v.size() != 2 || !(v[1] > v[0]))
                fail(e.line, where + " domain", "expected 'lo hi' with hi > lo");
            task.lo = v[0];
            task.hi = v[1];
        } else if (e.key == "samples") {
            const long v = to_long(e, where);
            if (v < 1) fail(e.line, where + " samples", "must be >= 1");
            task.samples = static_cast<int>(v);
        } else if (e.key == "noise_sigma") {
            task.noise_sigma = to_double(e, where);
            if (task.noise_sigma < 0) fail(e.line, where + " noise_sigma", "must be >= 0");
        } else if (e.key == "seed") {
            task.seed = static_cast<std::uint64_t>(to_long(e, where));
        } else {
            fail(e.line, where + " " + e.key, "unknown key");
        }
    }
}

void load_solver(const ConfigFile::Section& sec, SolverConfig& cfg) {
    const std::string where = "[solver]";
    for (const auto& e : sec.entries) {
        if (e.key == "max_iters") {
            const long v = to_long(e, where);
            if (v < 1) fail(e.line, where + " max_iters", "must be >= 1");
            cfg.max_iters = static_cast<int>(v);
        } else if (e.key == "tol_rel_obj") {
            cfg.tol_rel_obj = to_double(e, where);
            if (!(cfg.tol_rel_obj > 0)) fail(e.line, where + " tol_rel_obj", "must be > 0");
        } else if (e.key == "tol_kkt") {
            cfg.tol_kkt = to_double(e, where);
            if (!(cfg.tol_kkt > 0)) fail(e.line, where + " tol_kkt", "must be > 0");
        } else if (e.key == "step_rule") {
            if (e.value == "fixed")
                cfg.step_rule = SolverConfig::StepRule::FixedFromPowerIteration;
            else if (e.value == "backtracking")
                cfg.step_rule = SolverConfig::StepRule::Backtracking;
            else
                fail(e.line, where + " step_rule", "expected 'fixed' or 'backtracking'");
        } else {
            fail(e.line, where + " " + e.key, "unknown key");
        }
    }
}

void load_refine(const ConfigFile::Section& sec, RefinementConfig& cfg) {
    const std::string where = "[refine]";
    for (const auto& e : sec.entries) {
        if (e.key == "initial_spacing")
            cfg.initial_spacing = to_double(e, where);
        else if (e.key == "min_spacing")
            cfg.min_spacing = to_double(e, where);
        else if (e.key == "refine_factor")
            cfg.refine_factor = static_cast<int>(to_long(e, where));
        else if (e.key == "halo")
            cfg.halo = static_cast<int>(to_long(e, where));
        else if (e.key == "max_rounds")
            cfg.max_rounds = static_cast<int>(to_long(e, where));
        else
            fail(e.line, where + " " + e.key, "unknown key");
    }
    try {
        cfg.validate();
    } catch (const InvalidConfig& err) {
        fail(sec.line, where, err.what());
    }
}

void load_estimator(const ConfigFile::Section& sec, EstimatorSpec& est) {
    const std::string where = "[" + sec.name + "]";
    bool has_method = false;
    for (const auto& e : sec.entries) {
        if (e.key == "method") {
            has_method = true;
            if (e.value == "rkhs_ridge")
                est.method = Method::RkhsRidge;
            else if (e.value == "gen_lasso")
                est.method = Method::GenLasso;
            else if (e.value == "mkl_ridge")
                est.method = Method::MklRidge;
            else if (e.value == "single_gtv")
                est.method = Method::SingleGtv;
            else if (e.value == "multi_gtv")
                est.method = Method::MultiGtv;
            else
                fail(e.line, where + " method",
                     "expected one of rkhs_ridge, gen_lasso, mkl_ridge, single_gtv, multi_gtv");
        } else if (e.key == "alpha") {
            est.exp_alpha = to_double(e, where);
            if (!(est.exp_alpha > 0) || !(est.exp_alpha <= 2))
                fail(e.line, where + " alpha", "alpha must lie in (0, 2]");
        } else if (e.key == "widths") {
            est.widths = to_doubles(e, where);
            for (double w : est.widths)
                if (!(w > 0)) fail(e.line, where + " widths", "widths must be positive");
        } else if (e.key == "lambdas") {
            est.lambdas = to_doubles(e, where);
            for (double l : est.lambdas)
                if (l < 0) fail(e.line, where + " lambdas", "lambdas must be >= 0");
        } else if (e.key == "mkl_eta") {
            est.mkl_eta = to_double(e, where);
            if (!(est.mkl_eta >= 0)) fail(e.line, where + " mkl_eta", "must be >= 0");
        } else {
            fail(e.line, where + " " + e.key, "unknown key");
        }
    }
    if (!has_method) fail(sec.line, where, "estimator needs a 'method' key");
    try {
        est.validate();
    } catch (const InvalidConfig& err) {
        fail(sec.line, where, err.what());
    }
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    const ConfigFile file = ConfigFile::parse_file(path);
    ExperimentConfig cfg;
    SolverConfig solver;
    RefinementConfig refine;
    refine.initial_spacing = 0.25;
    refine.min_spacing = 0.02;

    for (const auto& sec : file.sections) {
        if (sec.name == "task") {
            load_task(sec, cfg.task);
        } else if (sec.name == "data") {
            for (const auto& e : sec.entries) {
                if (e.key == "csv")
                    cfg.data_csv = e.value;
                else
                    fail(e.line, "[data] " + e.key, "unknown key");
            }
        } else if (sec.name == "cv") {
            for (const auto& e : sec.entries) {
                if (e.key == "folds") {
                    const long v = to_long(e, "[cv]");
                    if (v < 2) fail(e.line, "[cv] folds", "must be >= 2");
                    cfg.folds = static_cast<int>(v);
                } else {
                    fail(e.line, "[cv] " + e.key, "unknown key");
                }
            }
        } else if (sec.name == "solver") {
            load_solver(sec, solver);
        } else if (sec.name == "refine") {
            load_refine(sec, refine);
        } else if (sec.name == "output") {
            for (const auto& e : sec.entries) {
                if (e.key == "dir")
                    cfg.out_dir = e.value;
                else
                    fail(e.line, "[output] " + e.key, "unknown key");
            }
        } else if (sec.name.rfind("estimator", 0) == 0) {
            EstimatorSpec est;
            load_estimator(sec, est);
            cfg.estimators.push_back(est);
            const std::string tail = trim(sec.name.substr(std::string("estimator").size()));
            cfg.estimator_names.push_back(tail.empty() ? method_name(est.method) : tail);
        } else {
            fail(sec.line, "[" + sec.name + "]", "unknown section");
        }
    }
    for (auto& est : cfg.estimators) {
        est.solver = solver;
        est.refine = refine;
    }
    if (cfg.estimators.empty())
        throw InvalidConfig(path + ": config defines no [estimator ...] section");
    return cfg;
}

}  // namespace mkr
