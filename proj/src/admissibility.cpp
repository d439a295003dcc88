#include "mkr/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mkr {

namespace {

std::vector<Vec> probe_directions(int dim, int count) {
    std::vector<Vec> dirs;
    if (dim == 1) {
        Vec v(1);
        v[0] = 1.0;
        dirs.push_back(v);
        return dirs;
    }
    if (dim == 2) {
        for (int i = 0; i < count; ++i) {
            const double angle = M_PI * i / count;  // evenness makes [0, pi) enough
            Vec v(2);
            v[0] = std::cos(angle);
            v[1] = std::sin(angle);
            dirs.push_back(v);
        }
        return dirs;
    }
    // d >= 3: axes, diagonals of pairs, and the full diagonal.
    for (int i = 0; i < dim; ++i) dirs.push_back(Vec::Unit(dim, i));
    for (int i = 0; i + 1 < dim; ++i) {
        Vec v = Vec::Zero(dim);
        v[i] = v[i + 1] = 1.0 / std::sqrt(2.0);
        dirs.push_back(v);
    }
    dirs.push_back(Vec::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim))));
    return dirs;
}

struct LineFit {
    double slope = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    LineFit f;
    f.slope = (denom != 0.0) ? (n * sxy - sx * sy) / denom : 0.0;
    return f;
}

}  // namespace

std::string AdmissibilityReport::summary() const {
    std::ostringstream os;
    os << "decays_at_infinity:   " << (decays_at_infinity ? "yes" : "no") << "\n"
       << "fourier_nonvanishing: " << (fourier_nonvanishing ? "yes" : "no") << "\n"
       << "fourier_heavy_tailed: " << (fourier_heavy_tailed ? "yes" : "no") << "\n"
       << "admissible:           " << (admissible ? "yes" : "no") << "\n";
    for (const auto& [name, value] : diagnostics) os << "  " << name << " = " << value << "\n";
    return os.str();
}

AdmissibilityReport check_admissibility(const KernelSpec& spec, const ProbeConfig& probe) {
    spec.validate();
    if (!(probe.radius_max > probe.radius_min) || !(probe.radius_min > 0.0))
        throw ProbeRangeInvalid("need radius_max > radius_min > 0");
    if (!(probe.freq_max > probe.freq_min) || !(probe.freq_min > 0.0))
        throw ProbeRangeInvalid("need freq_max > freq_min > 0");
    if (probe.n_radial < 2 || probe.n_freq < 8) throw ProbeRangeInvalid("too few probe samples");

    auto engine = kernel_engine(spec, probe.radius_max * 1.01);
    const auto dirs = probe_directions(spec.dim, probe.n_directions);
    AdmissibilityReport report;

    // (a) decay on the outer radial shell [0.8 r2, r2]
    const double peak = engine->peak();
    double shell_max = 0.0;
    for (const auto& dir : dirs) {
        for (int i = 0; i < probe.n_radial; ++i) {
            const double r =
                0.8 * probe.radius_max +
                0.2 * probe.radius_max * (probe.n_radial == 1 ? 1.0 : double(i) / (probe.n_radial - 1));
            shell_max = std::max(shell_max, std::abs(engine->at_offset(r * dir)));
        }
    }
    const double decay_ratio = shell_max / std::abs(peak);
    report.decays_at_infinity = decay_ratio < probe.decay_fraction;

    // (b)+(c) frequency probes, log-spaced over [w1, w2]
    const double log_lo = std::log(probe.freq_min);
    const double log_hi = std::log(probe.freq_max);
    double min_response = std::numeric_limits<double>::infinity();
    double worst_slope = 0.0;    // most negative fitted slope over directions
    double worst_growth = 0.0;   // largest |local slope| growth rate
    bool heavy_ok = true;
    bool log_valid = true;
    for (const auto& dir : dirs) {
        std::vector<double> logw(probe.n_freq), logg(probe.n_freq);
        for (int i = 0; i < probe.n_freq; ++i) {
            const double lw = log_lo + (log_hi - log_lo) * i / (probe.n_freq - 1);
            const double g = engine->fourier(std::exp(lw) * dir);
            min_response = std::min(min_response, g);
            logw[i] = lw;
            if (g > 0.0) {
                logg[i] = std::log(g);
            } else {
                log_valid = false;
                logg[i] = -746.0;  // placeholder; the non-vanishing test already fails
            }
        }
        const double slope = fit_line(logw, logg).slope;
        worst_slope = std::min(worst_slope, slope);
        std::vector<double> mid(probe.n_freq - 1), mag(probe.n_freq - 1);
        for (int i = 0; i + 1 < probe.n_freq; ++i) {
            mid[i] = 0.5 * (logw[i] + logw[i + 1]);
            mag[i] = std::abs((logg[i + 1] - logg[i]) / (logw[i + 1] - logw[i]));
        }
        const double growth = fit_line(mid, mag).slope;
        worst_growth = std::max(worst_growth, growth);
        if (slope < -probe.slope_cap || growth > probe.growth_cap) heavy_ok = false;
    }
    report.fourier_nonvanishing = min_response > 0.0;
    report.fourier_heavy_tailed = heavy_ok && log_valid;
    report.admissible =
        report.decays_at_infinity && report.fourier_nonvanishing && report.fourier_heavy_tailed;

    report.diagnostics = {
        {"decay_ratio", decay_ratio},
        {"decay_fraction", probe.decay_fraction},
        {"min_fourier_response", min_response},
        {"fitted_loglog_slope", worst_slope},
        {"slope_cap", probe.slope_cap},
        {"local_slope_growth", worst_growth},
        {"growth_cap", probe.growth_cap},
        {"probe_radius_min", probe.radius_min},
        {"probe_radius_max", probe.radius_max},
        {"probe_freq_min", probe.freq_min},
        {"probe_freq_max", probe.freq_max},
        {"fourier_grid_resolution", engine->fourier_resolution()},
    };
    return report;
}

}  // namespace mkr
