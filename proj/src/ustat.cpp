#include "citest/ustat.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "citest/error.hpp"

namespace citest {

namespace {

void require_four(std::size_t n) {
    if (n < 4)
        throw InsufficientSampleError("U-statistic needs at least 4 observations, got " +
                                      std::to_string(n));
}

void check_weights(std::span<const double> w, std::size_t cells) {
    if (!w.empty() && w.size() != cells)
        throw DimensionError("expected " + std::to_string(cells) + " cell weights, got " +
                             std::to_string(w.size()));
}

}  // namespace

void validate(const DiscretePairSample& data) {
    if (data.xs.size() != data.ys.size())
        throw DimensionError("xs and ys have different lengths");
    if (data.ell1 == 0 || data.ell2 == 0) throw DimensionError("support sizes must be positive");
    for (std::size_t i = 0; i < data.xs.size(); ++i) {
        if (data.xs[i] < 0 || static_cast<std::size_t>(data.xs[i]) >= data.ell1)
            throw DimensionError("x category out of range at observation " + std::to_string(i));
        if (data.ys[i] < 0 || static_cast<std::size_t>(data.ys[i]) >= data.ell2)
            throw DimensionError("y category out of range at observation " + std::to_string(i));
    }
}

PairCounts count_pairs(const DiscretePairSample& data) {
    validate(data);
    PairCounts c;
    c.ell1 = data.ell1;
    c.ell2 = data.ell2;
    c.n = data.size();
    c.joint.assign(c.ell1 * c.ell2, 0);
    c.row.assign(c.ell1, 0);
    c.col.assign(c.ell2, 0);
    for (std::size_t i = 0; i < c.n; ++i) {
        const auto x = static_cast<std::size_t>(data.xs[i]);
        const auto y = static_cast<std::size_t>(data.ys[i]);
        ++c.joint[x * c.ell2 + y];
        ++c.row[x];
        ++c.col[y];
    }
    return c;
}

// Averaging the symmetrised kernel over 4-subsets equals averaging
// phi_ab(xy) phi_cd(xy) over ordered 4-tuples of distinct indices. Expanding
// phi_ab phi_cd = A_a A_c - A_a B_c C_d - B_a C_b A_c + B_a C_b B_c C_d with
// A = 1(X=x,Y=y), B = 1(X=x), C = 1(Y=y), each distinct-index sum reduces to
// the cell counts J = N_xy, R = N_x, K = N_y by Moebius inversion over the
// coincidence partitions (B*C = A, B*B = B, C*C = C per observation):
//   sum A_a A_c             = (n-2)(n-3) J (J-1)
//   sum A_a B_c C_d (x n-3) = (n-3) (J R K - J K - J R - J^2 + 2J), twice
//   sum B_a C_b B_c C_d     = R^2 K^2 - R K^2 - R^2 K - 4 J R K + R K
//                             + 2 J^2 + 4 J (R + K) - 6 J
double u_statistic_from_counts(const PairCounts& counts, std::span<const double> cell_weights) {
    require_four(counts.n);
    check_weights(cell_weights, counts.ell1 * counts.ell2);
    using real = long double;
    const real n = static_cast<real>(counts.n);
    real acc = 0;
    for (std::size_t x = 0; x < counts.ell1; ++x) {
        const real r = static_cast<real>(counts.row[x]);
        for (std::size_t y = 0; y < counts.ell2; ++y) {
            const real j = static_cast<real>(counts(x, y));
            const real k = static_cast<real>(counts.col[y]);
            const real t1 = (n - 2) * (n - 3) * j * (j - 1);
            const real t2 = (n - 3) * (j * r * k - j * k - j * r - j * j + 2 * j);
            const real t4 = r * r * k * k - r * k * k - r * r * k - 4 * j * r * k + r * k +
                            2 * j * j + 4 * j * (r + k) - 6 * j;
            const real cell = t1 - 2 * t2 + t4;
            const real w = cell_weights.empty() ? real(1) : static_cast<real>(cell_weights[x * counts.ell2 + y]);
            acc += w * cell;
        }
    }
    const real falling = n * (n - 1) * (n - 2) * (n - 3);
    return static_cast<double>(acc / falling);
}

double u_statistic(const DiscretePairSample& data) {
    require_four(data.size());
    return u_statistic_from_counts(count_pairs(data));
}

double u_statistic_naive(const DiscretePairSample& data, std::span<const double> cell_weights) {
    validate(data);
    const std::size_t n = data.size();
    require_four(n);
    check_weights(cell_weights, data.ell1 * data.ell2);

    auto phi = [&](std::size_t a, std::size_t b, std::size_t x, std::size_t y) -> double {
        const bool both = data.xs[a] == static_cast<int>(x) && data.ys[a] == static_cast<int>(y);
        const bool split = data.xs[a] == static_cast<int>(x) && data.ys[b] == static_cast<int>(y);
        return static_cast<double>(both) - static_cast<double>(split);
    };

    double total = 0.0;
    long subsets = 0;
    std::array<std::size_t, 4> idx{};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                for (std::size_t l = k + 1; l < n; ++l) {
                    idx = {i, j, k, l};
                    std::array<int, 4> perm{0, 1, 2, 3};
                    double kernel = 0.0;
                    do {
                        const auto a = idx[perm[0]], b = idx[perm[1]], c = idx[perm[2]],
                                   d = idx[perm[3]];
                        for (std::size_t x = 0; x < data.ell1; ++x)
                            for (std::size_t y = 0; y < data.ell2; ++y) {
                                const double w =
                                    cell_weights.empty() ? 1.0 : cell_weights[x * data.ell2 + y];
                                kernel += w * phi(a, b, x, y) * phi(c, d, x, y);
                            }
                    } while (std::next_permutation(perm.begin(), perm.end()));
                    total += kernel / 24.0;
                    ++subsets;
                }
    return total / static_cast<double>(subsets);
}

}  // namespace citest
