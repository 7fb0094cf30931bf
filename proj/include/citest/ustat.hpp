#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace citest {

/// Paired categorical observations. Categories are 0-based: xs[i] < ell1, ys[i] < ell2.
struct DiscretePairSample {
    std::vector<int> xs;
    std::vector<int> ys;
    std::size_t ell1 = 0;
    std::size_t ell2 = 0;

    std::size_t size() const noexcept { return xs.size(); }
};

/// Throws DimensionError when lengths differ or a category is out of range.
void validate(const DiscretePairSample& data);

/// Joint and marginal occurrence counts of a pair sample.
struct PairCounts {
    std::size_t ell1 = 0;
    std::size_t ell2 = 0;
    std::size_t n = 0;
    std::vector<long> joint;  ///< row-major ell1 x ell2
    std::vector<long> row;    ///< length ell1
    std::vector<long> col;    ///< length ell2

    long operator()(std::size_t x, std::size_t y) const { return joint[x * ell2 + y]; }
};

PairCounts count_pairs(const DiscretePairSample& data);

/// Unbiased U-statistic for ||p_{XY} - p_X p_Y||_2^2 with the order-4 kernel
/// built from phi_ij(xy) = 1(X_i=x, Y_i=y) - 1(X_i=x) 1(Y_j=y).
///
/// Computed in O(n + ell1*ell2) from the joint, row and column counts. Throws
/// InsufficientSampleError when fewer than four observations are given.
double u_statistic(const DiscretePairSample& data);

/// Same estimator evaluated from precomputed counts, with an optional per-cell
/// weight (row-major, ell1*ell2 entries) multiplying each cell's contribution.
double u_statistic_from_counts(const PairCounts& counts, std::span<const double> cell_weights = {});

/// Literal evaluation: average over all 4-subsets of the symmetrised kernel
/// summed over every cell. O(n^4 ell1 ell2); kept for debugging and as the
/// reference the count-based form is checked against.
double u_statistic_naive(const DiscretePairSample& data, std::span<const double> cell_weights = {});

}  // namespace citest
