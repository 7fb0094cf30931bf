#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "citest/binning.hpp"
#include "citest/rng.hpp"

namespace citest {

/// Statistic evaluated on binned data; must be a pure function of its input.
using StatisticFn = std::function<double(const BinnedDataset&)>;

/// Shuffles the x-values inside every bin with an independent uniform
/// permutation; y-values and bin membership are untouched.
BinnedDataset within_bin_permute(const BinnedDataset& binned, Rng& rng);

/// Share of null statistics strictly above the observed one, or with
/// conservative set, (1 + #{null >= observed}) / (M + 1).
double pvalue_from_null(double observed, std::span<const double> null_stats, bool conservative = false);

struct PermutationResult {
    double p_value = 0.0;
    double observed = 0.0;
    std::vector<double> null_stats;
};

/// Draws one stream seed from rng and runs permutation i on the stream
/// derived from (that seed, i), so the result does not depend on the order in
/// which permutations are evaluated.
PermutationResult permutation_test(const BinnedDataset& binned, const StatisticFn& statistic,
                                   std::size_t permutations, Rng& rng, bool conservative = false);

inline double permutation_pvalue(const BinnedDataset& binned, const StatisticFn& statistic,
                                 std::size_t permutations, Rng& rng, bool conservative = false) {
    return permutation_test(binned, statistic, permutations, rng, conservative).p_value;
}

}  // namespace citest
