#pragma once

#include <cstddef>
#include <vector>

#include "citest/distributions.hpp"
#include "citest/ustat.hpp"

namespace citest {

/// A pair sample cut into the three disjoint pieces used for flattening.
///
/// With sigma' = 4 + 4t retained observations, dx holds the x-values at
/// indices [0, t1), dy the y-values at [t1, t1 + t2), and dxy the pairs at
/// [2t, sigma'). Indices [t1 + t2, 2t) and the at most three trailing
/// observations past sigma' are not used.
struct SplitPlan {
    std::vector<int> dx;
    std::vector<int> dy;
    DiscretePairSample dxy;
    std::size_t t = 0;
    std::size_t t1 = 0;
    std::size_t t2 = 0;
};

/// Occurrence counts of each category in the held-out x and y pieces.
struct FlatteningWeights {
    std::vector<long> ax;
    std::vector<long> ay;

    /// 1 + a_xy = (1 + a_x)(1 + a'_y).
    double cell_weight(std::size_t x, std::size_t y) const {
        return static_cast<double>((1 + ax[x]) * (1 + ay[y]));
    }
    /// Row-major reciprocals 1 / (1 + a_xy).
    std::vector<double> inverse_cell_weights() const;
};

SplitPlan split_dataset(const DiscretePairSample& data);
FlatteningWeights flattening_weights(const SplitPlan& plan);

/// sum p(x,y)^2 / (1 + a_xy)
double split_norm_sq(const DiscreteJointTable& p, const FlatteningWeights& w);
/// sum (p(x,y) - q(x,y))^2 / (1 + a_xy)
double split_distance_sq(const DiscreteJointTable& p, const DiscreteJointTable& q,
                         const FlatteningWeights& w);

/// U-statistic on dxy with each cell's contribution divided by 1 + a_xy.
/// Conditionally on dx and dy it is unbiased for split_distance_sq(p, p_X p_Y, w).
double weighted_u_statistic(const SplitPlan& plan, const FlatteningWeights& w);
/// Brute-force counterpart of weighted_u_statistic.
double weighted_u_statistic_naive(const SplitPlan& plan, const FlatteningWeights& w);

/// sqrt(min(sigma, ell1) * min(sigma, ell2))
double omega_weight(std::size_t sigma_m, std::size_t ell1, std::size_t ell2);

}  // namespace citest
