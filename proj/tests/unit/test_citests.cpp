#include <doctest.h>

#include <cmath>
#include <random>

#include "citest/citests.hpp"
#include "citest/error.hpp"
#include "citest/generators.hpp"
#include "test_support.hpp"

using namespace citest;

namespace {

TripleDataset from_table(const DiscreteJointTable& p, std::size_t n, Rng& rng) {
    TripleDataset d;
    d.ell1 = p.ell1();
    d.ell2 = p.ell2();
    for (std::size_t i = 0; i < n; ++i) {
        const auto cell = sample_categorical(p.probs(), rng);
        const double z = uniform01(rng);
        d.push_back(static_cast<double>(cell / p.ell2()), static_cast<double>(cell % p.ell2()),
                    std::span<const double>(&z, 1));
    }
    return d;
}

BinnedDataset bins_of(std::vector<DiscretePairSample> samples) {
    BinnedDataset b;
    b.plan.d = samples.size();
    for (auto& s : samples) b.sigma.push_back(s.size());
    b.bins = std::move(samples);
    return b;
}

}  // namespace

TEST_CASE("mode names round trip") {
    for (auto m : {TestMode::fixed_discrete, TestMode::scaling_discrete, TestMode::continuous,
                   TestMode::multivariate, TestMode::unbounded})
        CHECK(parse_test_mode(to_string(m)) == m);
    CHECK(parse_test_mode("scaling-discrete") == TestMode::scaling_discrete);
    CHECK_THROWS_AS(parse_test_mode("bogus"), ConfigError);
}

TEST_CASE("Poissonization") {
    Rng a = derive_stream(30), b = derive_stream(30);
    CHECK(poissonize(1000, a).n_effective == poissonize(1000, b).n_effective);
    testutil::Moments m;
    Rng rng = derive_stream(31);
    for (int i = 0; i < 100000; ++i) m.add(static_cast<double>(poissonize(1000, rng).n_effective));
    CHECK(std::abs(m.mean() - 500.0) <= 3 * m.standard_error());
    CHECK_THROWS_AS(poissonize(0, rng), ConfigError);
}

TEST_CASE("fixed statistic") {
    Rng rng = derive_stream(32);
    CHECK(statistic_fixed_discrete(bins_of({testutil::random_pairs(3, 2, 2, rng),
                                            testutil::random_pairs(0, 2, 2, rng)}))
              .statistic == 0.0);
    CHECK(statistic_fixed_discrete(bins_of({DiscretePairSample{std::vector<int>(9, 1),
                                                               std::vector<int>(9, 0), 2, 2}}))
              .statistic == 0.0);

    const DiscreteJointTable diag(2, 2, {0.5, 0, 0, 0.5});
    BinPlan plan;
    plan.d = 4;
    testutil::Moments m;
    for (int r = 0; r < 50; ++r) {
        const auto binned = bin_dataset(from_table(diag, 400, rng), plan);
        m.add(statistic_fixed_discrete(binned).statistic);
    }
    CHECK(m.mean() > 0.0);
    CHECK(std::abs(m.mean() - 100.0) <= 20.0);
}

TEST_CASE("scaling statistic") {
    Rng rng = derive_stream(33);
    CHECK(statistic_scaling_discrete(bins_of({testutil::random_pairs(3, 2, 2, rng)})).statistic == 0.0);
    CHECK(statistic_scaling_discrete(bins_of({testutil::random_pairs(40, 1, 1, rng)})).statistic == 0.0);

    for (int trial = 0; trial < 50; ++trial) {
        std::vector<DiscretePairSample> bins;
        for (int m = 0; m < 5; ++m) bins.push_back(testutil::random_pairs(4, 3, 5, rng));
        const auto b = bins_of(bins);
        const auto fixed = statistic_fixed_discrete(b);
        const auto scaled = statistic_scaling_discrete(b);
        CHECK(scaled.statistic == doctest::Approx(fixed.statistic * std::sqrt(3.0 * 4.0)).epsilon(1e-12));
    }
}

TEST_CASE("statistics ignore bins below four and category labels") {
    Rng rng = derive_stream(34);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<DiscretePairSample> bins, kept;
        for (int m = 0; m < 8; ++m) {
            bins.push_back(testutil::random_pairs(uniform_index(rng, 12), 3, 4, rng));
            if (bins.back().size() >= 4) kept.push_back(bins.back());
        }
        const auto all = bins_of(bins);
        CHECK(statistic_fixed_discrete(all).statistic == statistic_fixed_discrete(bins_of(kept)).statistic);
        CHECK(statistic_scaling_discrete(all).statistic ==
              statistic_scaling_discrete(bins_of(kept)).statistic);

        auto relabeled = all;
        for (auto& bin : relabeled.bins) {
            for (auto& x : bin.xs) x = 2 - x;
            for (auto& y : bin.ys) y = (y + 1) % 4;
        }
        CHECK(statistic_fixed_discrete(relabeled).statistic ==
              doctest::Approx(statistic_fixed_discrete(all).statistic).epsilon(1e-12));
        CHECK(statistic_scaling_discrete(relabeled).statistic ==
              doctest::Approx(statistic_scaling_discrete(all).statistic).epsilon(1e-12));
    }
}

TEST_CASE("run_test is deterministic and reports consistently") {
    Rng gen = derive_stream(35);
    const auto data = sample_discrete_alt(600, gen);
    TestConfig cfg;
    cfg.mode = TestMode::scaling_discrete;
    cfg.seed = 17;
    const auto a = run_test(data, cfg);
    const auto b = run_test(data, cfg);
    CHECK(a.statistic == b.statistic);
    CHECK(a.p_value == b.p_value);
    CHECK(a.n_effective == b.n_effective);
    REQUIRE(a.p_value.has_value());
    CHECK(*a.p_value >= 0.0);
    CHECK(*a.p_value <= 1.0);
    CHECK(a.reject == (*a.p_value <= cfg.alpha));
    CHECK(a.plan.d == scaling_discrete_plan(600, 2, 3).d);

    cfg.calibration = Calibration::fixed_threshold;
    cfg.zeta = 1.0;
    const auto f = run_test(data, cfg);
    CHECK_FALSE(f.p_value.has_value());
    REQUIRE(f.threshold_used.has_value());
    CHECK(*f.threshold_used == doctest::Approx(std::sqrt(static_cast<double>(f.plan.d))));
    CHECK(f.reject == (f.statistic >= *f.threshold_used));
}

TEST_CASE("Poisson overflow accepts") {
    TripleDataset tiny;
    tiny.ell1 = tiny.ell2 = 2;
    const double z = 0.5;
    tiny.push_back(0, 0, std::span<const double>(&z, 1));
    TestConfig cfg;
    bool saw_overflow = false;
    for (std::uint64_t seed = 0; seed < 200 && !saw_overflow; ++seed) {
        cfg.seed = seed;
        const auto r = run_test(tiny, cfg);
        if (r.poisson_overflow) {
            saw_overflow = true;
            CHECK_FALSE(r.reject);
        }
    }
    CHECK(saw_overflow);
}

TEST_CASE("mode and data mismatches are refused") {
    Rng rng = derive_stream(36);
    const auto cont = sample_continuous_null(100, rng);
    const auto disc = sample_discrete_null(100, rng);
    TestConfig cfg;
    CHECK_THROWS_AS(run_test(cont, cfg), ConfigError);
    cfg.mode = TestMode::continuous;
    CHECK_THROWS_AS(run_test(cont, cfg), ConfigError);  // no s
    cfg.s = 1.0;
    CHECK_THROWS_AS(run_test(disc, cfg), ConfigError);
    CHECK_NOTHROW(run_test(cont, cfg));
    cfg.calibration = Calibration::fixed_threshold;
    CHECK_THROWS_AS(run_test(cont, cfg), ConfigError);  // no zeta

    TripleDataset three;
    three.ell1 = three.ell2 = 2;
    three.dz = 3;
    const double z[3] = {0.1, 0.2, 0.3};
    for (int i = 0; i < 10; ++i) three.push_back(0, 1, std::span<const double>(z, 3));
    TestConfig mv;
    mv.mode = TestMode::multivariate;
    CHECK_THROWS_AS(run_test(three, mv), UnsupportedDimensionError);
}

TEST_CASE("multivariate and unbounded modes run") {
    Rng rng = derive_stream(37);
    TripleDataset two;
    two.ell1 = two.ell2 = 2;
    two.dz = 2;
    for (int i = 0; i < 800; ++i) {
        const double z[2] = {uniform01(rng), uniform01(rng)};
        const int x = static_cast<int>(uniform_index(rng, 2));
        const int y = uniform01(rng) < 0.9 ? x : 1 - x;
        two.push_back(x, y, std::span<const double>(z, 2));
    }
    TestConfig mv;
    mv.mode = TestMode::multivariate;
    mv.seed = 4;
    const auto r = run_test(two, mv);
    CHECK(r.plan.d_z == 2);
    CHECK(r.plan.d == multivariate_plan(800, 2).d);
    CHECK(r.reject);

    TripleDataset wide;
    wide.ell1 = wide.ell2 = 2;
    std::normal_distribution<double> normal(0.0, 3.0);
    for (int i = 0; i < 2000; ++i) {
        const double z = normal(rng);
        const int x = static_cast<int>(uniform_index(rng, 2));
        wide.push_back(x, x, std::span<const double>(&z, 1));
    }
    TestConfig ub;
    ub.mode = TestMode::unbounded;
    const auto u = run_test(wide, ub);
    REQUIRE(u.support.has_value());
    CHECK(u.support->interval.lo < 0.0);
    CHECK(u.support->interval.hi > 0.0);
    CHECK(u.reject);
    CHECK(u.discarded + (u.n_effective - u.discarded) == u.n_effective);
}

TEST_CASE("mean statistic grows with the adversarial perturbation") {
    const std::size_t d = 4;
    const double max_rho = adversarial_discrete_max_rho(2, 2, d);
    Rng signs = derive_stream(38);
    auto spec = AdversarialDiscreteSpec::random(2, 2, 0.0, d, signs);
    double previous = -1e300;
    for (int k = 0; k < 5; ++k) {
        spec.rho = max_rho * k / 4.0;
        testutil::Moments m;
        for (int r = 0; r < 200; ++r) {
            Rng rng = derive_stream(39, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(r));
            const auto data = sample_adversarial_discrete(spec, 1000, rng);
            m.add(statistic_fixed_discrete(bin_dataset(data, fixed_discrete_plan(1000))).statistic);
        }
        CHECK(m.mean() >= previous - 2 * m.standard_error());
        previous = m.mean();
    }
}
