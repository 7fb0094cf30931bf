#include <doctest.h>

#include <cmath>

#include "citest/error.hpp"
#include "citest/flatten.hpp"
#include "test_support.hpp"

using namespace citest;

namespace {

FlatteningWeights weights_from(std::vector<long> ax, std::vector<long> ay) {
    return FlatteningWeights{std::move(ax), std::move(ay)};
}

SplitPlan plan_with(std::vector<int> dx, std::vector<int> dy, DiscretePairSample dxy) {
    SplitPlan p;
    p.t1 = dx.size();
    p.t2 = dy.size();
    p.t = (dxy.size() - 4) / 2;
    p.dx = std::move(dx);
    p.dy = std::move(dy);
    p.dxy = std::move(dxy);
    return p;
}

}  // namespace

TEST_CASE("split sizes") {
    Rng rng = derive_stream(1);
    SUBCASE("four observations") {
        const auto s = testutil::random_pairs(4, 2, 2, rng);
        const auto p = split_dataset(s);
        CHECK(p.t == 0);
        CHECK(p.dx.empty());
        CHECK(p.dy.empty());
        CHECK(p.dxy.xs == s.xs);
        CHECK(p.dxy.ys == s.ys);
    }
    SUBCASE("seven behave as four") {
        const auto s = testutil::random_pairs(7, 2, 2, rng);
        const auto p = split_dataset(s);
        CHECK(p.t == 0);
        CHECK(p.dxy.size() == 4);
        CHECK(std::equal(p.dxy.xs.begin(), p.dxy.xs.end(), s.xs.begin()));
    }
    SUBCASE("twelve with narrow x") {
        const auto s = testutil::random_pairs(12, 2, 5, rng);
        const auto p = split_dataset(s);
        CHECK(p.t == 2);
        CHECK(p.t1 == 2);
        CHECK(p.t2 == 2);
        CHECK(p.dxy.size() == 8);
        CHECK(p.dx == std::vector<int>{s.xs[0], s.xs[1]});
        CHECK(p.dy == std::vector<int>{s.ys[2], s.ys[3]});
        CHECK(p.dxy.xs.front() == s.xs[4]);
        CHECK(p.dxy.ys.back() == s.ys[11]);
    }
    SUBCASE("too small") {
        const auto s = testutil::random_pairs(3, 2, 2, rng);
        CHECK_THROWS_AS(split_dataset(s), InsufficientSampleError);
    }
}

TEST_CASE("split invariants on random sizes") {
    Rng rng = derive_stream(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 4 + uniform_index(rng, 60);
        const std::size_t a = 1 + uniform_index(rng, 6), b = 1 + uniform_index(rng, 6);
        const auto p = split_dataset(testutil::random_pairs(n, a, b, rng));
        CHECK(p.t == (n - 4) / 4);
        CHECK(p.t1 == std::min(p.t, a));
        CHECK(p.t2 == std::min(p.t, b));
        CHECK(p.dxy.size() == 2 * p.t + 4);
        CHECK(p.t1 + p.t2 <= 2 * p.t);
        const auto w = flattening_weights(p);
        long sx = 0, sy = 0;
        for (long v : w.ax) sx += v;
        for (long v : w.ay) sy += v;
        CHECK(sx == static_cast<long>(p.t1));
        CHECK(sy == static_cast<long>(p.t2));
    }
}

TEST_CASE("flattening weight counts") {
    DiscretePairSample dxy{{0, 0, 0, 0}, {0, 0, 0, 0}, 2, 2};
    auto w = flattening_weights(plan_with({0, 0, 1}, {}, dxy));
    CHECK(w.ax == std::vector<long>{2, 1});
    w = flattening_weights(plan_with({}, {}, dxy));
    CHECK(w.ax == std::vector<long>{0, 0});
    CHECK(w.cell_weight(1, 1) == 1.0);
    w = flattening_weights(plan_with({0, 0}, {1}, dxy));
    CHECK(w.cell_weight(0, 1) == 6.0);
}

TEST_CASE("split norm and distance") {
    const auto u = DiscreteJointTable::uniform(2, 2);
    CHECK(split_norm_sq(u, weights_from({0, 0}, {0, 0})) == doctest::Approx(0.25));
    // (1 + a_x)(1 + a_y) = 4 for a_xy = 3
    CHECK(split_norm_sq(u, weights_from({1, 1}, {1, 1})) == doctest::Approx(0.0625));

    const DiscreteJointTable diag(2, 2, {0.5, 0, 0, 0.5});
    const auto prod = product_of_marginals(diag);
    CHECK(split_distance_sq(diag, diag, weights_from({3, 1}, {0, 2})) == 0.0);
    CHECK(split_distance_sq(diag, prod, weights_from({0, 0}, {0, 0})) ==
          doctest::Approx(l2_distance_sq(diag, prod)));
    // a_xy = 1 in every cell would need (1 + a_x)(1 + a_y) = 2; use the cell form directly
    double direct = 0.0;
    for (std::size_t i = 0; i < 4; ++i) direct += std::pow(diag.probs()[i] - prod.probs()[i], 2) / 2.0;
    CHECK(direct == doctest::Approx(0.125));
    CHECK(split_distance_sq(diag, prod, weights_from({1, 1}, {0, 0})) == doctest::Approx(0.125));

    Rng rng = derive_stream(3);
    for (int t = 0; t < 200; ++t) {
        const auto p = testutil::random_table(3, 4, rng);
        const auto q = testutil::random_table(3, 4, rng);
        FlatteningWeights w{{0, 0, 0}, {0, 0, 0, 0}};
        for (auto& v : w.ax) v = static_cast<long>(uniform_index(rng, 4));
        for (auto& v : w.ay) v = static_cast<long>(uniform_index(rng, 4));
        CHECK(split_distance_sq(p, q, w) <= l2_distance_sq(p, q) + 1e-15);
        FlatteningWeights bigger = w;
        for (auto& v : bigger.ax) v = 2 * v + 1;
        CHECK(split_norm_sq(p, bigger) < split_norm_sq(p, w));
    }
}

TEST_CASE("weighted statistic reductions") {
    Rng rng = derive_stream(4);
    for (int t = 0; t < 50; ++t) {
        const auto s = testutil::random_pairs(4 + uniform_index(rng, 8), 3, 3, rng);
        const auto p = plan_with({}, {}, s);
        const auto w = flattening_weights(p);
        CHECK(weighted_u_statistic(p, w) == doctest::Approx(u_statistic_naive(s)).epsilon(1e-13));
    }
    DiscretePairSample same{{1, 1, 1, 1, 1, 1}, {0, 0, 0, 0, 0, 0}, 2, 2};
    const auto p = plan_with({0}, {1}, same);
    CHECK(weighted_u_statistic(p, flattening_weights(p)) == doctest::Approx(0.0));
}

TEST_CASE("weighted fast form agrees with enumeration") {
    Rng rng = derive_stream(5);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 4 + uniform_index(rng, 13);
        const std::size_t a = 1 + uniform_index(rng, 5), b = 1 + uniform_index(rng, 5);
        const auto plan = split_dataset(testutil::random_pairs(n, a, b, rng));
        const auto w = flattening_weights(plan);
        CHECK(std::abs(weighted_u_statistic(plan, w) - weighted_u_statistic_naive(plan, w)) <= 1e-12);
    }
}

TEST_CASE("exhaustive expectation at sigma 4 under the uniform table") {
    const auto w = weights_from({2, 0}, {1, 3});
    const auto u = DiscreteJointTable::uniform(2, 2);
    const double target = split_distance_sq(u, product_of_marginals(u), w);
    CHECK(target == 0.0);
    double total = 0.0;
    for (int code = 0; code < 256; ++code) {
        DiscretePairSample s{{}, {}, 2, 2};
        int c = code;
        for (int i = 0; i < 4; ++i, c /= 4) {
            s.xs.push_back((c % 4) / 2);
            s.ys.push_back((c % 4) % 2);
        }
        total += weighted_u_statistic(plan_with({0, 0}, {1, 1, 1}, s), w);
    }
    CHECK(std::abs(total / 256.0 - target) <= 1e-12);
}

TEST_CASE("weighted statistic is conditionally unbiased") {
    struct Config {
        DiscreteJointTable p;
        std::vector<int> dx, dy;
    };
    Rng setup = derive_stream(6);
    std::vector<Config> configs{
        {DiscreteJointTable(2, 2, {0.5, 0, 0, 0.5}), {0, 1}, {1, 1}},
        {DiscreteJointTable(2, 3, {0.3, 0.05, 0.15, 0.05, 0.25, 0.2}), {1, 1}, {0, 2}},
        {testutil::random_table(3, 3, setup), {2, 0}, {1}},
    };
    for (const auto& cfg : configs) {
        DiscretePairSample dummy{{0, 0, 0, 0}, {0, 0, 0, 0}, cfg.p.ell1(), cfg.p.ell2()};
        const auto w = flattening_weights(plan_with(cfg.dx, cfg.dy, dummy));
        const double target = split_distance_sq(cfg.p, product_of_marginals(cfg.p), w);
        Rng rng = derive_stream(7, cfg.p.ell2());
        testutil::Moments m;
        for (int r = 0; r < 100000; ++r) {
            const auto plan = plan_with(cfg.dx, cfg.dy, testutil::draw_pairs(cfg.p, 8, rng));
            m.add(weighted_u_statistic(plan, w));
        }
        CHECK(std::abs(m.mean() - target) <= 3 * m.standard_error());
    }
}

TEST_CASE("omega weight") {
    CHECK(omega_weight(10, 3, 5) == doctest::Approx(std::sqrt(15.0)));
    CHECK(omega_weight(2, 5, 7) == doctest::Approx(2.0));
    CHECK(omega_weight(0, 4, 4) == 0.0);
}
