#include "mkr/multigrid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>

namespace mkr {

void RefinementConfig::validate() const {
    if (!(initial_spacing > 0.0) || !(min_spacing > 0.0))
        throw InvalidConfig("refinement spacings must be positive");
    if (!(min_spacing < initial_spacing))
        throw InvalidConfig("min_spacing must be below initial_spacing");
    if (refine_factor < 2) throw InvalidConfig("refine_factor must be >= 2");
    if (halo < 0) throw InvalidConfig("halo must be >= 0");
    if (max_rounds < 0) throw InvalidConfig("max_rounds must be >= 0");
}

namespace {

using NodeId = std::array<long, 2>;  // integer lattice coords (second unused for d = 1)

struct Lattice {
    Box bounds;
    int dim = 1;
    std::array<long, 2> base_counts{1, 1};   // round-0 nodes per axis
    std::array<double, 2> base_steps{0, 0};  // round-0 effective spacing per axis

    double position(int axis, long coord, long scale) const {
        return bounds.lo[axis] + base_steps[axis] * static_cast<double>(coord) /
                                     static_cast<double>(scale);
    }
    long max_coord(int axis, long scale) const { return (base_counts[axis] - 1) * scale; }
};

CenterGrid materialize(const Lattice& lat, const std::set<NodeId>& nodes, long scale,
                       double nominal_spacing) {
    CenterGrid grid;
    grid.spacing = nominal_spacing;
    grid.bounds = lat.bounds;
    grid.centers.resize(static_cast<long>(nodes.size()), lat.dim);
    long row = 0;
    for (const auto& node : nodes) {
        for (int ax = 0; ax < lat.dim; ++ax) grid.centers(row, ax) = lat.position(ax, node[ax], scale);
        ++row;
    }
    return grid;
}

}  // namespace

KernelModel RefinementTrace::model(bool debiased) const {
    KernelModel m;
    const Vec& coeffs = debiased && final_refit.size() ? final_refit : final.coeffs;
    int offset = 0;
    for (std::size_t b = 0; b < specs.size(); ++b) {
        KernelModel::Term term;
        term.spec = specs[b];
        term.centers = final_grids[b].centers;
        term.coeffs = coeffs.segment(offset, final_grids[b].size());
        offset += final_grids[b].size();
        m.terms.push_back(std::move(term));
    }
    return m;
}

RefinementTrace solve_multigrid(const std::vector<KernelSpec>& specs, const TrainingSet& train,
                                double lambda, const RefinementConfig& refine,
                                const SolverConfig& solver, const std::optional<Box>& bounds) {
    refine.validate();
    train.validate();
    if (specs.empty()) throw InvalidInput("solve_multigrid needs at least one kernel");
    const int d = train.dim();
    if (d > 2) throw InvalidInput("multigrid refinement supports d in {1, 2}");

    Lattice lat;
    lat.bounds = bounds ? *bounds : default_center_bounds(train, specs);
    lat.dim = d;
    for (int ax = 0; ax < d; ++ax) {
        const double extent = lat.bounds.hi[ax] - lat.bounds.lo[ax];
        lat.base_counts[ax] =
            static_cast<long>(std::floor(extent / refine.initial_spacing + 1e-9)) + 1;
        lat.base_steps[ax] = lat.base_counts[ax] == 1
                                 ? 0.0
                                 : extent / static_cast<double>(lat.base_counts[ax] - 1);
    }

    const std::size_t n_blocks = specs.size();
    std::vector<std::set<NodeId>> nodes(n_blocks);
    {
        std::set<NodeId> full;
        for (long i = 0; i < lat.base_counts[0]; ++i) {
            if (d == 1) {
                full.insert({i, 0});
            } else {
                for (long j = 0; j < lat.base_counts[1]; ++j) full.insert({i, j});
            }
        }
        for (auto& set : nodes) set = full;
    }

    SolverConfig cfg = solver;
    cfg.lambda = lambda;
    const long factor = refine.refine_factor;

    RefinementTrace trace;
    trace.specs = specs;
    long scale = 1;
    double nominal = refine.initial_spacing;
    Vec warm;
    bool have_warm = false;

    for (int round = 0;; ++round) {
        std::vector<CenterGrid> grids;
        grids.reserve(n_blocks);
        for (const auto& set : nodes) grids.push_back(materialize(lat, set, scale, nominal));
        Dictionary dict = assemble_design(specs, grids, train);

        SolverResult result =
            solve_lasso(dict.design, train.targets, cfg, have_warm ? &warm : nullptr);
        for (auto& ref : result.active_set) ref = dict.column_ref(ref.index);

        Vec refit = Vec::Zero(dict.n_cols());
        if (!result.active_cols.empty())
            refit = refit_on_support(dict.design, train.targets, result.active_cols);

        RoundInfo info;
        info.spacing = nominal;
        info.n_columns = dict.n_cols();
        info.objective = result.objective();
        info.n_active = static_cast<int>(result.active_cols.size());
        trace.rounds.push_back(info);

        trace.final = std::move(result);
        trace.final_refit = std::move(refit);
        trace.final_grids = std::move(grids);
        trace.active = trace.final.active_set;

        if (round == 0 && trace.final.active_cols.empty()) {
            trace.empty_model = true;
            trace.final.coeffs.setZero();
            break;
        }
        if (trace.final.active_cols.empty()) break;

        const double next_spacing = nominal / static_cast<double>(factor);
        if (next_spacing < refine.min_spacing * (1.0 - 1e-12)) break;
        if (round >= refine.max_rounds) break;
        if (round > 0 && refine.rel_obj_stop > 0.0) {
            const double prev = trace.rounds[trace.rounds.size() - 2].objective;
            if (prev - info.objective < refine.rel_obj_stop * std::max(std::abs(prev), 1e-300))
                break;
        }

        // Refine on the union over blocks of (a) cells carrying a nonzero
        // coefficient and (b) cells whose dual variable sits near the
        // activation boundary (such atoms can activate once the lattice
        // resolves their position). Halo cells around each are subdivided by
        // factor, and every node of the current round is kept at its
        // now-coarser resolution, so coverage is never lost and kernels whose
        // width is below the current spacing re-enter the competition later.
        const long next_scale = scale * factor;
        const Vec dual = 2.0 * (dict.design.transpose() *
                                (dict.design * trace.final.coeffs - train.targets));
        std::set<NodeId> shared;
        std::vector<std::vector<std::pair<NodeId, double>>> carried(n_blocks);
        for (std::size_t b = 0; b < n_blocks; ++b)
            for (const auto& node : nodes[b]) shared.insert({node[0] * factor, node[1] * factor});
        for (int col = 0; col < dict.n_cols(); ++col) {
            const double coeff = trace.final.coeffs[col];
            const bool near_boundary =
                lambda > 0.0 && std::abs(dual[col]) >= refine.dual_fraction * lambda;
            if (coeff == 0.0 && !near_boundary) continue;
            const ColumnRef ref = dict.column_ref(col);
            auto it = nodes[ref.block].begin();
            std::advance(it, ref.index);  // sets iterate in grid (lex) order
            const NodeId node = *it;
            if (coeff != 0.0)
                carried[ref.block].push_back({{node[0] * factor, node[1] * factor}, coeff});
            std::array<long, 2> lo{0, 0}, hi{0, 0};
            for (int ax = 0; ax < d; ++ax) {
                lo[ax] = std::max(0L, (node[ax] - refine.halo) * factor);
                hi[ax] = std::min(lat.max_coord(ax, next_scale), (node[ax] + refine.halo) * factor);
            }
            for (long i = lo[0]; i <= hi[0]; ++i) {
                if (d == 1) {
                    shared.insert({i, 0});
                } else {
                    for (long j = lo[1]; j <= hi[1]; ++j) shared.insert({i, j});
                }
            }
        }
        std::vector<std::set<NodeId>> next_nodes(n_blocks, shared);

        // warm start: nonzero coefficients land on their (preserved) nodes
        long total = 0;
        std::vector<long> offsets(n_blocks);
        for (std::size_t b = 0; b < n_blocks; ++b) {
            offsets[b] = total;
            total += static_cast<long>(next_nodes[b].size());
        }
        warm = Vec::Zero(total);
        for (std::size_t b = 0; b < n_blocks; ++b) {
            std::map<NodeId, long> index;
            long row = 0;
            for (const auto& node : next_nodes[b]) index[node] = row++;
            for (const auto& [node, coeff] : carried[b]) {
                auto it = index.find(node);
                if (it != index.end()) {
                    warm[offsets[b] + it->second] += coeff;
                } else {
                    long best = 0, best_dist = std::numeric_limits<long>::max();
                    for (const auto& [cand, idx] : index) {
                        const long di = cand[0] - node[0], dj = cand[1] - node[1];
                        const long dist = di * di + dj * dj;
                        if (dist < best_dist) {
                            best_dist = dist;
                            best = idx;
                        }
                    }
                    warm[offsets[b] + best] += coeff;
                }
            }
        }
        have_warm = true;
        nodes = std::move(next_nodes);
        scale = next_scale;
        nominal = next_spacing;
    }
    return trace;
}

void write_trace_csv(const RefinementTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path);
    out << "round,spacing,columns,objective,active\n";
    char buf[160];
    for (std::size_t r = 0; r < trace.rounds.size(); ++r) {
        const auto& info = trace.rounds[r];
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%d,%.17g,%d\n", r, info.spacing, info.n_columns,
                      info.objective, info.n_active);
        out << buf;
    }
}

}  // namespace mkr
