#include "citest/citests.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "citest/calibration.hpp"
#include "citest/error.hpp"
#include "citest/flatten.hpp"
#include "citest/ustat.hpp"

namespace citest {

std::string to_string(TestMode mode) {
    switch (mode) {
        case TestMode::fixed_discrete: return "fixed_discrete";
        case TestMode::scaling_discrete: return "scaling_discrete";
        case TestMode::continuous: return "continuous";
        case TestMode::multivariate: return "multivariate";
        case TestMode::unbounded: return "unbounded";
    }
    return "unknown";
}

TestMode parse_test_mode(const std::string& name) {
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    for (auto m : {TestMode::fixed_discrete, TestMode::scaling_discrete, TestMode::continuous,
                   TestMode::multivariate, TestMode::unbounded})
        if (key == to_string(m)) return m;
    throw ConfigError("unknown test mode '" + name + "'");
}

PoissonDraw poissonize(std::size_t n, Rng& rng) {
    if (n == 0) throw ConfigError("Poissonization needs n >= 1");
    std::poisson_distribution<long> dist(static_cast<double>(n) / 2.0);
    const long draw = dist(rng);
    PoissonDraw out;
    out.n_effective = static_cast<std::size_t>(draw);
    out.overflow = out.n_effective > n;
    return out;
}

StatisticResult statistic_fixed_discrete(const BinnedDataset& binned) {
    StatisticResult res;
    res.per_bin.reserve(binned.bins.size());
    for (const auto& bin : binned.bins) {
        BinStatistic b;
        b.sigma = bin.size();
        if (b.sigma >= 4) {
            b.u = u_statistic(bin);
            res.statistic += static_cast<double>(b.sigma) * b.u;
        }
        res.per_bin.push_back(b);
    }
    return res;
}

StatisticResult statistic_scaling_discrete(const BinnedDataset& binned) {
    StatisticResult res;
    res.per_bin.reserve(binned.bins.size());
    for (const auto& bin : binned.bins) {
        BinStatistic b;
        b.sigma = bin.size();
        b.omega = omega_weight(b.sigma, bin.ell1, bin.ell2);
        if (b.sigma >= 4) {
            const auto plan = split_dataset(bin);
            b.u = weighted_u_statistic(plan, flattening_weights(plan));
            res.statistic += static_cast<double>(b.sigma) * b.omega * b.u;
        }
        res.per_bin.push_back(b);
    }
    return res;
}

namespace {

bool uses_weighted_statistic(const TestConfig& config, const TripleDataset& data) {
    switch (config.mode) {
        case TestMode::scaling_discrete:
        case TestMode::continuous: return true;
        case TestMode::multivariate: return data.kind == XYKind::continuous;
        default: return false;
    }
}

void check_mode_data(const TestConfig& config, const TripleDataset& data) {
    const bool categorical = data.kind == XYKind::categorical;
    switch (config.mode) {
        case TestMode::fixed_discrete:
        case TestMode::scaling_discrete:
        case TestMode::unbounded:
            if (!categorical) throw ConfigError(to_string(config.mode) + " mode needs categorical X and Y");
            if (data.dz != 1) throw ConfigError(to_string(config.mode) + " mode needs one-dimensional Z");
            break;
        case TestMode::continuous:
            if (categorical) throw ConfigError("continuous mode needs real-valued X and Y");
            if (!config.s) throw ConfigError("continuous mode needs the smoothness s");
            if (data.dz != 1) throw ConfigError("continuous mode needs one-dimensional Z");
            break;
        case TestMode::multivariate:
            if (data.dz > 2) throw UnsupportedDimensionError("multivariate mode supports d_Z <= 2");
            if (!categorical && !config.s) throw ConfigError("multivariate mode with real X and Y needs s");
            break;
    }
    if (config.calibration == Calibration::fixed_threshold && !config.zeta)
        throw ConfigError("fixed-threshold calibration needs zeta");
    if (config.calibration == Calibration::permutation && config.permutations < 1)
        throw ConfigError("permutation calibration needs at least one permutation");
    if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
}

BinPlan plan_for(const TestConfig& config, const TripleDataset& data, std::size_t n) {
    switch (config.mode) {
        case TestMode::fixed_discrete: return fixed_discrete_plan(n);
        case TestMode::scaling_discrete: return scaling_discrete_plan(n, data.ell1, data.ell2);
        case TestMode::continuous: return continuous_plan(n, *config.s);
        case TestMode::multivariate:
            return multivariate_plan(n, data.dz,
                                     data.kind == XYKind::continuous ? config.s : std::nullopt);
        case TestMode::unbounded: break;
    }
    throw ConfigError("unbounded mode plans are built from a support estimate");
}

}  // namespace

double fixed_threshold(const TestConfig& config, const BinPlan& plan, std::size_t n) {
    if (!config.zeta) throw ConfigError("fixed-threshold calibration needs zeta");
    const double zeta = *config.zeta;
    const double d = static_cast<double>(plan.d);
    switch (config.mode) {
        case TestMode::fixed_discrete: return zeta * std::pow(static_cast<double>(n), 0.2);
        case TestMode::scaling_discrete:
        case TestMode::continuous: return std::sqrt(zeta * d);
        case TestMode::multivariate: return zeta * std::pow(d, plan.d_z / 2.0);
        case TestMode::unbounded: return zeta * std::sqrt(d);
    }
    return 0.0;
}

TestReport run_test(const TripleDataset& data, const TestConfig& config, Rng& rng) {
    validate(data);
    check_mode_data(config, data);

    TestReport report;
    report.config = config;
    report.seed = config.seed;
    report.n_input = data.size();
    if (data.size() == 0) throw InsufficientSampleError("test needs at least one observation");

    // Unbounded Z: estimate the support from the second half and test on the first.
    TripleDataset test_part = data;
    std::size_t n = data.size();
    if (config.mode == TestMode::unbounded) {
        if (data.size() < 2) throw InsufficientSampleError("unbounded mode needs at least two observations");
        const std::size_t half = data.size() / 2;
        const auto estimation = data.slice(half, data.size());
        report.support = estimate_support(estimation.z, config.eta.value_or(0.05),
                                          config.c_const.value_or(1.0));
        test_part = data.slice(0, half);
        n = half;
    }

    std::size_t used = n;
    if (config.poissonize) {
        const auto draw = poissonize(n, rng);
        report.poisson_overflow = draw.overflow;
        used = draw.n_effective;
    }
    report.n_effective = used;
    report.plan = config.mode == TestMode::unbounded ? unbounded_plan(n, *report.support)
                                                     : plan_for(config, test_part, n);
    if (report.poisson_overflow) {
        report.reject = false;
        return report;
    }

    const auto binned = bin_dataset(test_part.head(used), report.plan,
                                    config.mode == TestMode::unbounded ? OutsideSupport::discard
                                                                       : OutsideSupport::error);
    report.discarded = binned.discarded;
    const bool weighted = uses_weighted_statistic(config, test_part);
    auto compute = [weighted](const BinnedDataset& b) {
        return weighted ? statistic_scaling_discrete(b) : statistic_fixed_discrete(b);
    };
    auto result = compute(binned);
    report.statistic = result.statistic;
    report.per_bin = std::move(result.per_bin);

    if (config.calibration == Calibration::fixed_threshold) {
        report.threshold_used = fixed_threshold(config, report.plan, n);
        report.reject = report.statistic >= *report.threshold_used;
    } else {
        const StatisticFn fn = [&](const BinnedDataset& b) { return compute(b).statistic; };
        const auto perm = permutation_test(binned, fn, config.permutations, rng, config.conservative);
        report.p_value = perm.p_value;
        report.reject = perm.p_value <= config.alpha;
    }
    return report;
}

TestReport run_test(const TripleDataset& data, const TestConfig& config) {
    Rng rng = derive_stream(config.seed);
    return run_test(data, config, rng);
}

}  // namespace citest
