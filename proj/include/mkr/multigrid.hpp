#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mkr/solvers.hpp"

namespace mkr {

/// Schedule of the adaptive center refinement. max_rounds caps the number of
/// refinement rounds beyond the coarse round 0.
struct RefinementConfig {
    double initial_spacing = 0.4;
    double min_spacing = 0.05;
    int refine_factor = 2;
    int halo = 1;            // neighbor cells kept around each active center
    int max_rounds = 10;
    // Optional early stop when a round improves the objective by less than
    // this relative amount. Disabled by default: a round can plateau exactly
    // (the best lattice node persists across one level) and still improve two
    // levels later, so a positive value trades accuracy for speed.
    double rel_obj_stop = 0.0;
    // Inactive cells with |dual| >= dual_fraction * lambda are refined too;
    // they are the candidates that can activate at a finer spacing.
    double dual_fraction = 0.9;

    void validate() const;
};

struct RoundInfo {
    double spacing = 0.0;  // nominal lattice spacing of the round
    int n_columns = 0;
    double objective = 0.0;
    int n_active = 0;      // support size after threshold + refit
};

struct RefinementTrace {
    std::vector<RoundInfo> rounds;
    SolverResult final;              // LASSO result on the final dictionary
    Vec final_refit;                 // debiased coefficients on the final support
    std::vector<KernelSpec> specs;
    std::vector<CenterGrid> final_grids;
    std::vector<ColumnRef> active;   // (kernel block, center row) of the final support
    bool empty_model = false;        // round 0 fully shrunk; all-zero model

    double objective() const { return rounds.empty() ? 0.0 : rounds.back().objective; }
    int n_active() const { return rounds.empty() ? 0 : rounds.back().n_active; }
    /// Kernel expansion of the fit (debiased refit coefficients by default).
    KernelModel model(bool debiased = true) const;
};

/// Grid-refinement proxy for adaptive center optimization. Round 0 solves the
/// LASSO on a shared coarse lattice over `bounds` (default: data bounding box
/// expanded by 3 kernel widths); each later round keeps, per kernel block,
/// the cells holding nonzero centers plus `halo` neighbor cells, subdivides
/// them by refine_factor and re-solves warm-started (nearest-center coefficient
/// transfer). Nodes carrying a nonzero coefficient survive refinement exactly,
/// so the objective is non-increasing across rounds up to solver tolerance.
RefinementTrace solve_multigrid(const std::vector<KernelSpec>& specs, const TrainingSet& train,
                                double lambda, const RefinementConfig& refine,
                                const SolverConfig& solver,
                                const std::optional<Box>& bounds = std::nullopt);

/// CSV export: round, spacing, columns, objective, active.
void write_trace_csv(const RefinementTrace& trace, const std::string& path);

}  // namespace mkr
