#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "citest/distributions.hpp"
#include "citest/rng.hpp"
#include "citest/ustat.hpp"

namespace testutil {

inline citest::DiscreteJointTable random_table(std::size_t ell1, std::size_t ell2, citest::Rng& rng) {
    std::vector<double> w(ell1 * ell2);
    for (double& v : w) v = 0.05 + citest::uniform01(rng);
    return citest::DiscreteJointTable::normalized(ell1, ell2, std::move(w));
}

inline citest::DiscretePairSample draw_pairs(const citest::DiscreteJointTable& p, std::size_t n,
                                             citest::Rng& rng) {
    citest::DiscretePairSample s{{}, {}, p.ell1(), p.ell2()};
    for (std::size_t i = 0; i < n; ++i) {
        const auto cell = citest::sample_categorical(p.probs(), rng);
        s.xs.push_back(static_cast<int>(cell / p.ell2()));
        s.ys.push_back(static_cast<int>(cell % p.ell2()));
    }
    return s;
}

inline citest::DiscretePairSample random_pairs(std::size_t n, std::size_t ell1, std::size_t ell2,
                                               citest::Rng& rng) {
    citest::DiscretePairSample s{{}, {}, ell1, ell2};
    for (std::size_t i = 0; i < n; ++i) {
        s.xs.push_back(static_cast<int>(citest::uniform_index(rng, ell1)));
        s.ys.push_back(static_cast<int>(citest::uniform_index(rng, ell2)));
    }
    return s;
}

struct Moments {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double standard_error() const {
        const double m = mean();
        const double var = (sum_sq / static_cast<double>(n) - m * m) * static_cast<double>(n) /
                           static_cast<double>(n - 1);
        return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    }
};

/// p-value of the chi-square uniformity statistic for counts over k equally
/// likely cells. Small totals enumerate every composition exactly, since the
/// asymptotic law is useless there; four cells with larger totals use the
/// chi-square(3) tail erfc(sqrt(x/2)) + sqrt(2x/pi) exp(-x/2).
inline double exact_uniformity_pvalue(const std::vector<int>& counts) {
    const int k = static_cast<int>(counts.size());
    int n = 0;
    for (int c : counts) n += c;
    if (n == 0) return 1.0;
    auto stat = [&](const std::vector<int>& c) {
        const double e = static_cast<double>(n) / k;
        double s = 0.0;
        for (int v : c) s += (v - e) * (v - e) / e;
        return s;
    };
    const double observed = stat(counts);
    if (k == 4 && n > 60)
        return std::erfc(std::sqrt(observed / 2)) +
               std::sqrt(2 * observed / 3.141592653589793) * std::exp(-observed / 2);
    std::vector<double> log_fact(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 1; i <= n; ++i) log_fact[static_cast<std::size_t>(i)] = log_fact[static_cast<std::size_t>(i) - 1] + std::log(i);
    const double log_cell = -std::log(static_cast<double>(k));
    double p = 0.0;
    std::vector<int> c(static_cast<std::size_t>(k), 0);
    std::function<void(int, int)> rec = [&](int idx, int left) {
        if (idx == k - 1) {
            c[static_cast<std::size_t>(idx)] = left;
            if (stat(c) >= observed - 1e-9) {
                double lp = log_fact[static_cast<std::size_t>(n)] + n * log_cell;
                for (int v : c) lp -= log_fact[static_cast<std::size_t>(v)];
                p += std::exp(lp);
            }
            return;
        }
        for (int v = 0; v <= left; ++v) {
            c[static_cast<std::size_t>(idx)] = v;
            rec(idx + 1, left - v);
        }
    };
    rec(0, n);
    return std::min(1.0, p);
}

}  // namespace testutil
