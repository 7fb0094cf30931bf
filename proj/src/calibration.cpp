#include "citest/calibration.hpp"

#include "citest/error.hpp"

namespace citest {

BinnedDataset within_bin_permute(const BinnedDataset& binned, Rng& rng) {
    BinnedDataset out = binned;
    for (auto& bin : out.bins) shuffle(std::span<int>(bin.xs), rng);
    return out;
}

double pvalue_from_null(double observed, std::span<const double> null_stats, bool conservative) {
    if (null_stats.empty()) throw ConfigError("permutation p-value needs at least one replicate");
    std::size_t count = 0;
    for (double t : null_stats)
        if (conservative ? t >= observed : t > observed) ++count;
    const auto m = static_cast<double>(null_stats.size());
    if (conservative) return (1.0 + static_cast<double>(count)) / (m + 1.0);
    return static_cast<double>(count) / m;
}

PermutationResult permutation_test(const BinnedDataset& binned, const StatisticFn& statistic,
                                   std::size_t permutations, Rng& rng, bool conservative) {
    if (permutations < 1) throw ConfigError("number of permutations must be at least 1");
    PermutationResult res;
    res.observed = statistic(binned);
    const std::uint64_t base = rng();
    res.null_stats.resize(permutations);
    for (std::size_t i = 0; i < permutations; ++i) {
        Rng stream = derive_stream(base, i);
        res.null_stats[i] = statistic(within_bin_permute(binned, stream));
    }
    res.p_value = pvalue_from_null(res.observed, res.null_stats, conservative);
    return res;
}

}  // namespace citest
