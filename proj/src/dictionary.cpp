#include "mkr/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mkr/parallel.hpp"
#include "mkr/rng.hpp"

namespace mkr {

void TrainingSet::validate() const {
    if (sites.rows() < 1) throw InvalidInput("training set must contain at least one site");
    if (sites.rows() != targets.size())
        throw InvalidInput("sites and targets disagree on the number of samples");
    if (!sites.allFinite() || !targets.allFinite())
        throw InvalidInput("training data must be finite");
    for (int i = 0; i < sites.rows(); ++i)
        for (int j = i + 1; j < sites.rows(); ++j)
            if ((sites.row(i) - sites.row(j)).norm() == 0.0)
                throw InvalidInput("training sites must be pairwise distinct");
}

TrainingSet read_training_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open training CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("empty training CSV: " + path);
    // header row is required; count its columns
    int n_cols = 1;
    for (char c : line)
        if (c == ',') ++n_cols;
    if (n_cols < 2) throw InvalidInput("training CSV needs d coordinate columns plus a target");

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InvalidInput("line " + std::to_string(line_no) + ": bad number '" + cell +
                                   "' in " + path);
            }
        }
        if (static_cast<int>(row.size()) != n_cols)
            throw InvalidInput("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(n_cols) + " columns in " + path);
        rows.push_back(std::move(row));
    }
    TrainingSet train;
    train.sites.resize(static_cast<int>(rows.size()), n_cols - 1);
    train.targets.resize(static_cast<int>(rows.size()));
    for (int i = 0; i < train.sites.rows(); ++i) {
        for (int j = 0; j < n_cols - 1; ++j) train.sites(i, j) = rows[i][j];
        train.targets[i] = rows[i][n_cols - 1];
    }
    train.validate();
    return train;
}

Box Box::of(double lo, double hi) {
    Box b;
    b.lo = Vec::Constant(1, lo);
    b.hi = Vec::Constant(1, hi);
    return b;
}

Box Box::of(const Vec& lo, const Vec& hi) {
    Box b;
    b.lo = lo;
    b.hi = hi;
    return b;
}

Box default_center_bounds(const TrainingSet& train, const std::vector<KernelSpec>& specs,
                          double margin) {
    double width = 0.0;
    for (const auto& s : specs) width = std::max(width, s.length_scale());
    Box b;
    b.lo = train.sites.colwise().minCoeff().transpose().array() - margin * width;
    b.hi = train.sites.colwise().maxCoeff().transpose().array() + margin * width;
    return b;
}

CenterGrid build_grid(const Box& bounds, double spacing, long max_centers) {
    if (!(spacing > 0.0)) throw InvalidInput("grid spacing must be positive");
    const int d = bounds.dim();
    std::vector<long> counts(d);
    long total = 1;
    for (int ax = 0; ax < d; ++ax) {
        const double extent = bounds.hi[ax] - bounds.lo[ax];
        if (extent < 0.0) throw InvalidInput("empty grid bounds");
        counts[ax] = static_cast<long>(std::floor(extent / spacing + 1e-9)) + 1;
        total *= counts[ax];
        if (total > max_centers)
            throw TooManyCenters("grid would contain more than " + std::to_string(max_centers) +
                                 " centers");
    }
    CenterGrid grid;
    grid.spacing = spacing;
    grid.bounds = bounds;
    grid.centers.resize(total, d);
    // row-major lattice walk = lexicographic order by coordinates
    std::vector<long> idx(d, 0);
    for (long row = 0; row < total; ++row) {
        for (int ax = 0; ax < d; ++ax) {
            const double step =
                counts[ax] == 1 ? 0.0 : (bounds.hi[ax] - bounds.lo[ax]) / (counts[ax] - 1);
            grid.centers(row, ax) = bounds.lo[ax] + idx[ax] * step;
        }
        for (int ax = d - 1; ax >= 0; --ax) {
            if (++idx[ax] < counts[ax]) break;
            idx[ax] = 0;
        }
    }
    return grid;
}

ColumnRef Dictionary::column_ref(int col) const {
    for (int b = n_blocks() - 1; b >= 0; --b) {
        if (col >= blocks[b].col_offset)
            return ColumnRef{b, col - blocks[b].col_offset};
    }
    throw InvalidInput("column id out of range");
}

Vec Dictionary::center_of(int col) const {
    const ColumnRef ref = column_ref(col);
    return blocks[ref.block].grid.centers.row(ref.index).transpose();
}

double Dictionary::audit(const TrainingSet& train, int probes, std::uint64_t seed) const {
    Rng rng(seed);
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        const int m = static_cast<int>(rng.uniform01() * train.size()) % train.size();
        const int j = static_cast<int>(rng.uniform01() * n_cols()) % n_cols();
        const ColumnRef ref = column_ref(j);
        const double expect = eval_kernel(blocks[ref.block].spec, train.sites.row(m).transpose(),
                                          blocks[ref.block].grid.centers.row(ref.index).transpose());
        worst = std::max(worst, std::abs(design(m, j) - expect));
    }
    return worst;
}

namespace {

// largest |x - z| that can occur between two boxes of points
double max_pair_distance(const Mat& a, const Mat& b) {
    if (a.rows() == 0 || b.rows() == 0) return 0.0;
    double acc = 0.0;
    for (int ax = 0; ax < a.cols(); ++ax) {
        const double lo_a = a.col(ax).minCoeff(), hi_a = a.col(ax).maxCoeff();
        const double lo_b = b.col(ax).minCoeff(), hi_b = b.col(ax).maxCoeff();
        const double span = std::max(std::abs(hi_a - lo_b), std::abs(hi_b - lo_a));
        acc += span * span;
    }
    return std::sqrt(acc);
}

}  // namespace

Dictionary assemble_design(const std::vector<KernelSpec>& specs,
                           const std::vector<CenterGrid>& grids, const TrainingSet& train) {
    if (specs.empty() || specs.size() != grids.size())
        throw InvalidInput("assemble_design needs one grid per kernel spec");
    train.validate();

    Dictionary dict;
    int total = 0;
    std::vector<std::shared_ptr<const Kernel>> engines;
    for (std::size_t n = 0; n < specs.size(); ++n) {
        Dictionary::Block blk;
        blk.spec = specs[n];
        blk.grid = grids[n];
        blk.col_offset = total;
        total += grids[n].size();
        dict.blocks.push_back(std::move(blk));
        engines.push_back(
            kernel_engine(specs[n], max_pair_distance(train.sites, grids[n].centers) * 1.01));
    }
    dict.design.resize(train.size(), total);

    const bool d1 = train.dim() == 1;
    parallel_for(static_cast<std::size_t>(train.size()), [&](std::size_t m) {
        for (std::size_t n = 0; n < specs.size(); ++n) {
            const auto& grid = grids[n];
            const auto& k = *engines[n];
            const int off = dict.blocks[n].col_offset;
            if (d1) {
                const double x = train.sites(static_cast<int>(m), 0);
                for (int l = 0; l < grid.size(); ++l)
                    dict.design(static_cast<int>(m), off + l) =
                        k.at_axis_offset(x - grid.centers(l, 0));
            } else {
                const Vec x = train.sites.row(static_cast<int>(m)).transpose();
                for (int l = 0; l < grid.size(); ++l)
                    dict.design(static_cast<int>(m), off + l) =
                        k.at_offset(x - grid.centers.row(l).transpose());
            }
        }
    });
    return dict;
}

Mat assemble_gram(const KernelSpec& spec, const TrainingSet& train) {
    train.validate();
    auto engine = kernel_engine(spec, max_pair_distance(train.sites, train.sites) * 1.01);
    const int m = train.size();
    Mat gram(m, m);
    const double diag = engine->peak();
    for (int i = 0; i < m; ++i) {
        gram(i, i) = diag;
        for (int j = i + 1; j < m; ++j) {
            const double v =
                engine->at_offset((train.sites.row(i) - train.sites.row(j)).transpose());
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }
    return gram;
}

double KernelModel::operator()(const Vec& x) const {
    double acc = 0.0;
    for (const auto& term : terms) {
        if (term.centers.rows() == 0) continue;
        double radius = 0.0;
        for (int l = 0; l < term.centers.rows(); ++l)
            radius = std::max(radius, (x - term.centers.row(l).transpose()).norm());
        auto engine = kernel_engine(term.spec, radius * 1.01);
        double block = 0.0;
        for (int l = 0; l < term.centers.rows(); ++l) {
            if (term.coeffs[l] == 0.0) continue;
            block += term.coeffs[l] * engine->at_offset(x - term.centers.row(l).transpose());
        }
        acc += term.weight * block;
    }
    return acc;
}

Vec KernelModel::predict(const Mat& pts) const {
    Vec out = Vec::Zero(pts.rows());
    for (const auto& term : terms) {
        if (term.centers.rows() == 0) continue;
        double radius = 0.0;
        for (int ax = 0; ax < pts.cols(); ++ax) {
            const double lo_p = pts.col(ax).minCoeff(), hi_p = pts.col(ax).maxCoeff();
            const double lo_c = term.centers.col(ax).minCoeff(),
                         hi_c = term.centers.col(ax).maxCoeff();
            const double span = std::max(std::abs(hi_p - lo_c), std::abs(hi_c - lo_p));
            radius += span * span;
        }
        auto engine = kernel_engine(term.spec, std::sqrt(radius) * 1.01);
        const bool d1 = pts.cols() == 1;
        for (int i = 0; i < pts.rows(); ++i) {
            double block = 0.0;
            for (int l = 0; l < term.centers.rows(); ++l) {
                if (term.coeffs[l] == 0.0) continue;
                block += term.coeffs[l] *
                         (d1 ? engine->at_axis_offset(pts(i, 0) - term.centers(l, 0))
                             : engine->at_offset(pts.row(i).transpose() -
                                                 term.centers.row(l).transpose()));
            }
            out[i] += term.weight * block;
        }
    }
    return out;
}

}  // namespace mkr
