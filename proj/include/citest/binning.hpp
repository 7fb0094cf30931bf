#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "citest/dataset.hpp"
#include "citest/ustat.hpp"

namespace citest {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const noexcept { return hi - lo; }
};

/// Equal-width partition of the Z support plus, in continuous modes, the
/// coarser X/Y grid. Cells are half-open [lo + i w, lo + (i+1) w) with the
/// last cell on each axis closed at hi. Indices are 0-based; a multivariate
/// cell (i, j) has index i * d + j.
struct BinPlan {
    std::size_t d = 1;
    int d_z = 1;
    std::optional<std::size_t> d_prime;
    std::optional<double> s;
    std::vector<Interval> support{Interval{}};
    /// Scaling plan only: whether d * max(ell1, ell2) <= n.
    std::optional<bool> size_condition_met;

    std::size_t cell_count() const;
};

struct BinnedDataset {
    std::vector<DiscretePairSample> bins;
    std::vector<std::size_t> sigma;
    BinPlan plan;
    /// Observations dropped because z fell outside the support (unbounded mode).
    std::size_t discarded = 0;

    std::size_t total() const;
};

struct SupportEstimate {
    Interval interval;
    double coverage_target = 0.0;  ///< eta
    std::size_t count_threshold = 0;  ///< k
};

BinPlan fixed_discrete_plan(std::size_t n);
BinPlan scaling_discrete_plan(std::size_t n, std::size_t ell1, std::size_t ell2);
BinPlan continuous_plan(std::size_t n, double s);
/// Without s, d = ceil(n^{2/(4+d_z)}) as for discrete X and Y. Throws
/// UnsupportedDimensionError unless d_z is 1 or 2.
BinPlan multivariate_plan(std::size_t n, int d_z, std::optional<double> s = std::nullopt);
/// Bins of width length/d over the estimated interval, with
/// d = min(ceil(len^{4/5} n^{2/5}), ceil(len^{8/15} n^{8/15})).
BinPlan unbounded_plan(std::size_t n, const SupportEstimate& support);

/// Cell index of a point on one axis; throws OutOfSupportError outside [lo, hi].
std::size_t axis_cell(double v, const Interval& support, std::size_t d);
std::size_t assign_bin(std::span<const double> z, const BinPlan& plan);
inline std::size_t assign_bin(double z, const BinPlan& plan) {
    return assign_bin(std::span<const double>(&z, 1), plan);
}
/// 0-based category of v in [0,1] on a grid of d_prime cells.
std::size_t discretize_xy(double v, std::size_t d_prime);

enum class OutsideSupport { error, discard };

/// Groups observations by Z cell. Continuous x/y are first mapped to
/// d_prime categories, which the plan must then provide.
BinnedDataset bin_dataset(const TripleDataset& data, const BinPlan& plan,
                          OutsideSupport outside = OutsideSupport::error);

/// k = ceil(m (1 - eta) + c sqrt(m log m)) clipped to [1, m].
std::size_t support_count_threshold(std::size_t m, double eta, double c_const);
/// Shortest window over consecutive order statistics holding k points.
SupportEstimate estimate_support_with_count(std::span<const double> z_half, std::size_t k);
SupportEstimate estimate_support(std::span<const double> z_half, double eta, double c_const = 1.0);

}  // namespace citest
