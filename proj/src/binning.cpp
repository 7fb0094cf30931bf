#include "citest/binning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "citest/error.hpp"

namespace citest {

namespace {

std::size_t ceil_pos(double v) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(v - 1e-12)));
}

void require_n(std::size_t n) {
    if (n == 0) throw ConfigError("sample size must be positive");
}

void require_s(double s) {
    if (!(s > 0.0)) throw ConfigError("smoothness s must be positive");
}

}  // namespace

std::size_t BinPlan::cell_count() const {
    std::size_t c = 1;
    for (int i = 0; i < d_z; ++i) c *= d;
    return c;
}

std::size_t BinnedDataset::total() const {
    return std::accumulate(sigma.begin(), sigma.end(), std::size_t{0});
}

BinPlan fixed_discrete_plan(std::size_t n) {
    require_n(n);
    BinPlan plan;
    plan.d = ceil_pos(std::pow(static_cast<double>(n), 0.4));
    return plan;
}

BinPlan scaling_discrete_plan(std::size_t n, std::size_t ell1, std::size_t ell2) {
    require_n(n);
    if (ell1 == 0 || ell2 == 0) throw ConfigError("support sizes must be positive");
    BinPlan plan;
    plan.d = ceil_pos(std::pow(static_cast<double>(n), 0.4) /
                      std::pow(static_cast<double>(ell1 * ell2), 0.2));
    plan.size_condition_met = plan.d * std::max(ell1, ell2) <= n;
    return plan;
}

BinPlan continuous_plan(std::size_t n, double s) {
    require_n(n);
    require_s(s);
    BinPlan plan;
    plan.d = ceil_pos(std::pow(static_cast<double>(n), 2.0 * s / (5.0 * s + 2.0)));
    plan.d_prime = ceil_pos(std::pow(static_cast<double>(plan.d), 1.0 / s));
    plan.s = s;
    return plan;
}

BinPlan multivariate_plan(std::size_t n, int d_z, std::optional<double> s) {
    require_n(n);
    if (d_z < 1 || d_z > 2)
        throw UnsupportedDimensionError("d_Z must be 1 or 2, got " + std::to_string(d_z));
    BinPlan plan;
    plan.d_z = d_z;
    plan.support.assign(static_cast<std::size_t>(d_z), Interval{});
    const double nn = static_cast<double>(n);
    if (s) {
        require_s(*s);
        plan.d = ceil_pos(std::pow(nn, 2.0 * *s / ((4.0 + d_z) * *s + 2.0)));
        plan.d_prime = ceil_pos(std::pow(static_cast<double>(plan.d), 1.0 / *s));
        plan.s = s;
    } else {
        plan.d = ceil_pos(std::pow(nn, 2.0 / (4.0 + d_z)));
    }
    return plan;
}

BinPlan unbounded_plan(std::size_t n, const SupportEstimate& support) {
    require_n(n);
    const double mu = support.interval.length();
    const double nn = static_cast<double>(n);
    BinPlan plan;
    plan.support = {support.interval};
    if (mu <= 0.0) {
        // degenerate interval: a single cell holding the atom
        plan.d = 1;
        return plan;
    }
    const std::size_t a = ceil_pos(std::pow(mu, 0.8) * std::pow(nn, 0.4));
    const std::size_t b = ceil_pos(std::pow(mu, 8.0 / 15.0) * std::pow(nn, 8.0 / 15.0));
    plan.d = std::min(a, b);
    return plan;
}

std::size_t axis_cell(double v, const Interval& support, std::size_t d) {
    if (!(v >= support.lo && v <= support.hi))
        throw OutOfSupportError("value " + std::to_string(v) + " outside [" +
                                std::to_string(support.lo) + ", " + std::to_string(support.hi) +
                                "]");
    if (d == 0) throw ConfigError("partition needs at least one cell");
    const double len = support.length();
    if (len <= 0.0) return 0;
    const auto i = static_cast<std::size_t>(std::floor((v - support.lo) / len * static_cast<double>(d)));
    return std::min(i, d - 1);
}

std::size_t assign_bin(std::span<const double> z, const BinPlan& plan) {
    if (z.size() != static_cast<std::size_t>(plan.d_z) || plan.support.size() != z.size())
        throw DimensionError("z has " + std::to_string(z.size()) + " coordinates, plan expects " +
                             std::to_string(plan.d_z));
    std::size_t idx = 0;
    for (std::size_t k = 0; k < z.size(); ++k) idx = idx * plan.d + axis_cell(z[k], plan.support[k], plan.d);
    return idx;
}

std::size_t discretize_xy(double v, std::size_t d_prime) {
    return axis_cell(v, Interval{}, d_prime);
}

BinnedDataset bin_dataset(const TripleDataset& data, const BinPlan& plan, OutsideSupport outside) {
    validate(data);
    if (data.dz != plan.d_z)
        throw DimensionError("data has d_Z = " + std::to_string(data.dz) + ", plan has " +
                             std::to_string(plan.d_z));
    const bool continuous = data.kind == XYKind::continuous;
    if (continuous && !plan.d_prime)
        throw ConfigError("continuous X/Y need a plan with a discretization level");
    const std::size_t ell1 = continuous ? *plan.d_prime : data.ell1;
    const std::size_t ell2 = continuous ? *plan.d_prime : data.ell2;

    BinnedDataset out;
    out.plan = plan;
    const std::size_t cells = plan.cell_count();
    out.bins.assign(cells, DiscretePairSample{{}, {}, ell1, ell2});
    out.sigma.assign(cells, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::size_t m;
        try {
            m = assign_bin(data.z_row(i), plan);
        } catch (const OutOfSupportError&) {
            if (outside == OutsideSupport::error) throw;
            ++out.discarded;
            continue;
        }
        const int x = continuous ? static_cast<int>(discretize_xy(data.x[i], ell1)) : static_cast<int>(data.x[i]);
        const int y = continuous ? static_cast<int>(discretize_xy(data.y[i], ell2)) : static_cast<int>(data.y[i]);
        out.bins[m].xs.push_back(x);
        out.bins[m].ys.push_back(y);
        ++out.sigma[m];
    }
    return out;
}

std::size_t support_count_threshold(std::size_t m, double eta, double c_const) {
    if (m == 0) throw InsufficientSampleError("support estimation needs at least one sample");
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
    const double mm = static_cast<double>(m);
    const double raw = std::ceil(mm * (1.0 - eta) + c_const * std::sqrt(mm * std::log(mm)));
    return static_cast<std::size_t>(std::clamp(raw, 1.0, mm));
}

SupportEstimate estimate_support_with_count(std::span<const double> z_half, std::size_t k) {
    if (z_half.empty()) throw InsufficientSampleError("support estimation needs at least one sample");
    if (k < 1 || k > z_half.size()) throw ConfigError("window count must lie in [1, n]");
    std::vector<double> sorted(z_half.begin(), z_half.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t best = 0;
    for (std::size_t i = 1; i + k <= sorted.size(); ++i)
        if (sorted[i + k - 1] - sorted[i] < sorted[best + k - 1] - sorted[best]) best = i;
    SupportEstimate est;
    est.interval = {sorted[best], sorted[best + k - 1]};
    est.count_threshold = k;
    return est;
}

SupportEstimate estimate_support(std::span<const double> z_half, double eta, double c_const) {
    if (z_half.empty()) throw InsufficientSampleError("support estimation needs at least one sample");
    auto est = estimate_support_with_count(z_half, support_count_threshold(z_half.size(), eta, c_const));
    est.coverage_target = eta;
    return est;
}

}  // namespace citest
