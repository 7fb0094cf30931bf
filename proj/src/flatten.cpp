#include "citest/flatten.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "citest/error.hpp"

namespace citest {

namespace {

void check_weights_shape(const DiscreteJointTable& p, const FlatteningWeights& w) {
    if (w.ax.size() != p.ell1() || w.ay.size() != p.ell2())
        throw DimensionError("flattening weights are " + std::to_string(w.ax.size()) + "x" +
                             std::to_string(w.ay.size()) + " but the table is " +
                             std::to_string(p.ell1()) + "x" + std::to_string(p.ell2()));
}

void check_weights_shape(const SplitPlan& plan, const FlatteningWeights& w) {
    if (w.ax.size() != plan.dxy.ell1 || w.ay.size() != plan.dxy.ell2)
        throw DimensionError("flattening weights do not match the support sizes of the split");
}

}  // namespace

std::vector<double> FlatteningWeights::inverse_cell_weights() const {
    std::vector<double> inv;
    inv.reserve(ax.size() * ay.size());
    for (std::size_t x = 0; x < ax.size(); ++x)
        for (std::size_t y = 0; y < ay.size(); ++y) inv.push_back(1.0 / cell_weight(x, y));
    return inv;
}

SplitPlan split_dataset(const DiscretePairSample& data) {
    validate(data);
    const std::size_t sigma = data.size();
    if (sigma < 4)
        throw InsufficientSampleError("split needs at least 4 observations, got " +
                                      std::to_string(sigma));
    SplitPlan plan;
    plan.t = (sigma - 4) / 4;
    plan.t1 = std::min(plan.t, data.ell1);
    plan.t2 = std::min(plan.t, data.ell2);
    const std::size_t kept = 4 + 4 * plan.t;

    plan.dx.assign(data.xs.begin(), data.xs.begin() + static_cast<long>(plan.t1));
    plan.dy.assign(data.ys.begin() + static_cast<long>(plan.t1),
                   data.ys.begin() + static_cast<long>(plan.t1 + plan.t2));
    plan.dxy.ell1 = data.ell1;
    plan.dxy.ell2 = data.ell2;
    const auto from = static_cast<long>(2 * plan.t);
    const auto to = static_cast<long>(kept);
    plan.dxy.xs.assign(data.xs.begin() + from, data.xs.begin() + to);
    plan.dxy.ys.assign(data.ys.begin() + from, data.ys.begin() + to);
    return plan;
}

FlatteningWeights flattening_weights(const SplitPlan& plan) {
    FlatteningWeights w;
    w.ax.assign(plan.dxy.ell1, 0);
    w.ay.assign(plan.dxy.ell2, 0);
    for (int x : plan.dx) {
        if (x < 0 || static_cast<std::size_t>(x) >= w.ax.size())
            throw DimensionError("x category out of range in flattening piece");
        ++w.ax[static_cast<std::size_t>(x)];
    }
    for (int y : plan.dy) {
        if (y < 0 || static_cast<std::size_t>(y) >= w.ay.size())
            throw DimensionError("y category out of range in flattening piece");
        ++w.ay[static_cast<std::size_t>(y)];
    }
    return w;
}

double split_norm_sq(const DiscreteJointTable& p, const FlatteningWeights& w) {
    check_weights_shape(p, w);
    double s = 0.0;
    for (std::size_t x = 0; x < p.ell1(); ++x)
        for (std::size_t y = 0; y < p.ell2(); ++y) s += p(x, y) * p(x, y) / w.cell_weight(x, y);
    return s;
}

double split_distance_sq(const DiscreteJointTable& p, const DiscreteJointTable& q,
                         const FlatteningWeights& w) {
    if (p.ell1() != q.ell1() || p.ell2() != q.ell2()) throw DimensionError("table shapes differ");
    check_weights_shape(p, w);
    double s = 0.0;
    for (std::size_t x = 0; x < p.ell1(); ++x)
        for (std::size_t y = 0; y < p.ell2(); ++y) {
            const double d = p(x, y) - q(x, y);
            s += d * d / w.cell_weight(x, y);
        }
    return s;
}

double weighted_u_statistic(const SplitPlan& plan, const FlatteningWeights& w) {
    check_weights_shape(plan, w);
    const auto inv = w.inverse_cell_weights();
    return u_statistic_from_counts(count_pairs(plan.dxy), inv);
}

double weighted_u_statistic_naive(const SplitPlan& plan, const FlatteningWeights& w) {
    check_weights_shape(plan, w);
    const auto inv = w.inverse_cell_weights();
    return u_statistic_naive(plan.dxy, inv);
}

double omega_weight(std::size_t sigma_m, std::size_t ell1, std::size_t ell2) {
    return std::sqrt(static_cast<double>(std::min(sigma_m, ell1)) *
                     static_cast<double>(std::min(sigma_m, ell2)));
}

}  // namespace citest
