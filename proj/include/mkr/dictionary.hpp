#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mkr/kernels.hpp"

namespace mkr {

/// Data sites x_m (rows) and targets y_m.
struct TrainingSet {
    Mat sites;    // M x d
    Vec targets;  // M

    int size() const { return static_cast<int>(sites.rows()); }
    int dim() const { return static_cast<int>(sites.cols()); }
    /// Throws InvalidInput unless there is at least one row, all entries are
    /// finite and all rows are distinct.
    void validate() const;
};

/// CSV with a header row, d coordinate columns, then one target column.
TrainingSet read_training_csv(const std::string& path);

/// Axis-aligned box.
struct Box {
    Vec lo;
    Vec hi;

    int dim() const { return static_cast<int>(lo.size()); }
    static Box of(double lo, double hi);                    // d = 1
    static Box of(const Vec& lo, const Vec& hi);
};

/// Bounding box of the data expanded by margin * max kernel length scale on
/// every side (atoms just outside the support can still contribute).
Box default_center_bounds(const TrainingSet& train, const std::vector<KernelSpec>& specs,
                          double margin = 3.0);

/// Candidate kernel centers on a uniform lattice.
struct CenterGrid {
    Mat centers;   // rows, lexicographically sorted by coordinates
    double spacing = 0.0;
    Box bounds;

    int size() const { return static_cast<int>(centers.rows()); }
};

/// Uniform lattice over the box including both endpoints per axis;
/// count per axis = floor(extent / spacing) + 1 (the effective spacing is
/// stretched to land exactly on the far endpoint when spacing does not divide
/// the extent). Throws TooManyCenters above max_centers.
CenterGrid build_grid(const Box& bounds, double spacing, long max_centers = 1000000);

/// Flat column id -> (kernel block, center row).
struct ColumnRef {
    int block = 0;
    int index = 0;
};

/// Stacked multi-kernel design matrix: one block of columns per kernel, each
/// column an atom k_n(. , z_{n,l}) sampled at the data sites. Column order is
/// block-major, then grid order.
struct Dictionary {
    struct Block {
        KernelSpec spec;
        CenterGrid grid;
        int col_offset = 0;
    };

    Mat design;                 // M x total columns
    std::vector<Block> blocks;

    int n_cols() const { return static_cast<int>(design.cols()); }
    int n_blocks() const { return static_cast<int>(blocks.size()); }
    ColumnRef column_ref(int col) const;
    int flat_col(int block, int index) const { return blocks[block].col_offset + index; }
    /// Center coordinates of a flat column.
    Vec center_of(int col) const;

    /// Re-evaluates `probes` random entries against eval_kernel; returns the
    /// largest absolute deviation.
    double audit(const TrainingSet& train, int probes = 200, std::uint64_t seed = 99) const;
};

/// Assembles the block design matrix [G_Z]_{m,l} = k_n(x_m, z_{n,l}).
Dictionary assemble_design(const std::vector<KernelSpec>& specs,
                           const std::vector<CenterGrid>& grids, const TrainingSet& train);

/// Gram matrix [G]_{m,n} = k(x_m, x_n); exactly symmetric, diagonal = rho(0).
Mat assemble_gram(const KernelSpec& spec, const TrainingSet& train);

/// Fitted kernel expansion f(x) = sum_n sum_l a_{n,l} k_n(x, z_{n,l}) with an
/// optional per-block multiplier (used by the MKL estimator).
struct KernelModel {
    struct Term {
        KernelSpec spec;
        Mat centers;
        Vec coeffs;
        double weight = 1.0;
    };
    std::vector<Term> terms;

    double operator()(const Vec& x) const;
    /// Evaluation on many points (rows of pts).
    Vec predict(const Mat& pts) const;
};

}  // namespace mkr
