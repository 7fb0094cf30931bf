#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "citest/binning.hpp"
#include "citest/dataset.hpp"
#include "citest/rng.hpp"

namespace citest {

enum class TestMode { fixed_discrete, scaling_discrete, continuous, multivariate, unbounded };

std::string to_string(TestMode mode);
/// Accepts the names produced by to_string, with '-' or '_' separators.
TestMode parse_test_mode(const std::string& name);

enum class Calibration { permutation, fixed_threshold };

struct TestConfig {
    TestMode mode = TestMode::fixed_discrete;
    std::optional<double> s;
    std::optional<double> zeta;
    Calibration calibration = Calibration::permutation;
    std::size_t permutations = 100;
    bool conservative = false;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::optional<double> eta;
    std::optional<double> c_const;
    /// Replace n by N ~ Poisson(n/2) before testing.
    bool poissonize = true;
};

struct BinStatistic {
    std::size_t sigma = 0;
    double omega = 1.0;
    double u = 0.0;  ///< zero for bins below four observations
};

struct StatisticResult {
    double statistic = 0.0;
    std::vector<BinStatistic> per_bin;
};

struct TestReport {
    double statistic = 0.0;
    std::vector<BinStatistic> per_bin;
    std::size_t n_input = 0;
    std::size_t n_effective = 0;
    BinPlan plan;
    bool reject = false;
    std::optional<double> p_value;
    std::optional<double> threshold_used;
    bool poisson_overflow = false;
    std::optional<SupportEstimate> support;
    std::size_t discarded = 0;
    std::uint64_t seed = 0;
    TestConfig config;
};

struct PoissonDraw {
    std::size_t n_effective = 0;
    bool overflow = false;
};

/// N ~ Poisson(n/2); overflow when N > n.
PoissonDraw poissonize(std::size_t n, Rng& rng);

/// T = sum over bins with at least four observations of sigma_m * U_m.
StatisticResult statistic_fixed_discrete(const BinnedDataset& binned);

/// T = sum over bins with at least four observations of sigma_m * omega_m * U_m,
/// with U_m the flattened statistic. The split is deterministic in the order
/// of observations inside a bin, so no random stream is needed.
StatisticResult statistic_scaling_discrete(const BinnedDataset& binned);

/// Threshold tau for fixed-threshold calibration given the plan and n.
double fixed_threshold(const TestConfig& config, const BinPlan& plan, std::size_t n);

/// Full pipeline: Poissonize, bin according to the mode's plan, compute the
/// mode's statistic and decide. The rng is the only source of randomness.
TestReport run_test(const TripleDataset& data, const TestConfig& config, Rng& rng);

/// Same as run_test with the stream derived from config.seed.
TestReport run_test(const TripleDataset& data, const TestConfig& config);

}  // namespace citest
