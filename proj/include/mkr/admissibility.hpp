#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mkr/kernels.hpp"

namespace mkr {

/// Probe ranges and thresholds of the numerical admissibility check.
/// The qualitative criteria (decaying kernel; non-vanishing, slowly growing,
/// heavy-tailed frequency response) are quantified here; all thresholds are
/// reported back in the AdmissibilityReport diagnostics.
struct ProbeConfig {
    double radius_min = 1.0;
    double radius_max = 20.0;
    double freq_min = 1.0;
    double freq_max = 64.0;
    int n_radial = 48;      // samples across the outer radial shell
    int n_freq = 48;        // log-spaced frequency samples
    int n_directions = 8;   // probe directions for d >= 2
    double decay_fraction = 0.05;  // decay test: max outer-shell |rho| < fraction * rho(0)
    double slope_cap = 40.0;       // heavy-tail test: fitted log-log slope >= -slope_cap
    double growth_cap = 10.0;      // heavy-tail test: |local slope| growth per log-omega unit
};

struct AdmissibilityReport {
    bool decays_at_infinity = false;
    bool fourier_nonvanishing = false;
    bool fourier_heavy_tailed = false;
    bool admissible = false;
    std::vector<std::pair<std::string, double>> diagnostics;

    std::string summary() const;
};

/// Numerically certifies the three Fourier-domain admissibility criteria:
/// (a) the kernel decays on the outer probe shell, (b) the frequency response
/// stays positive over the probed band, (c) the response is heavy-tailed:
/// its fitted log-log slope is bounded and the local slope magnitude grows
/// sub-linearly in log |omega| (a Gaussian response has local slope growing
/// like omega^2 and is rejected).
AdmissibilityReport check_admissibility(const KernelSpec& spec, const ProbeConfig& probe = {});

}  // namespace mkr
