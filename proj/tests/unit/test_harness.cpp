#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "citest/error.hpp"
#include "citest/harness.hpp"
#include "citest/io.hpp"

using namespace citest;

namespace {

std::string table_csv(const SizePowerTable& t) {
    std::ostringstream out;
    write_table_csv(out, t);
    return out.str();
}

ExperimentSpec small_spec() {
    ExperimentSpec spec = preset("fig3", true);
    spec.sizes = {100, 200};
    spec.replications = 12;
    spec.test.permutations = 20;
    spec.seed = 99;
    return spec;
}

}  // namespace

TEST_CASE("generator family names") {
    for (auto f : {GeneratorFamily::discrete_null, GeneratorFamily::discrete_alt, GeneratorFamily::continuous_null,
                   GeneratorFamily::continuous_alt, GeneratorFamily::adversarial_discrete,
                   GeneratorFamily::adversarial_continuous})
        CHECK(parse_generator_family(to_string(f)) == f);
    CHECK(parse_generator_family("adversarial_discrete") == GeneratorFamily::adversarial_discrete);
    CHECK_THROWS_AS(parse_generator_family("gaussian"), ConfigError);
}

TEST_CASE("presets") {
    const auto f3 = preset("fig3", false);
    CHECK(f3.generator.family == GeneratorFamily::discrete_null);
    CHECK(f3.test.mode == TestMode::scaling_discrete);
    CHECK(f3.sizes.size() == 10);
    CHECK(f3.sizes.front() == 100);
    CHECK(f3.sizes.back() == 1000);
    CHECK(f3.replications == 100);
    CHECK(f3.test.permutations == 100);
    const auto f4 = preset("fig4", true);
    CHECK(f4.generator.family == GeneratorFamily::continuous_alt);
    CHECK(f4.test.mode == TestMode::continuous);
    CHECK(f4.test.s.value() == 1.0);
    CHECK_THROWS_AS(preset("fig5", true), ConfigError);
}

TEST_CASE("generation is reproducible") {
    GeneratorSpec g;
    g.family = GeneratorFamily::adversarial_discrete;
    g.rho = 0.005;
    g.d = 8;
    Rng a = derive_stream(1), b = derive_stream(1);
    std::ostringstream sa, sb;
    write_csv(sa, generate(g, 1000, a));
    write_csv(sb, generate(g, 1000, b));
    CHECK(sa.str() == sb.str());
    g.family = GeneratorFamily::continuous_null;
    CHECK(generate(g, 10, a).kind == XYKind::continuous);
}

TEST_CASE("experiment tables do not depend on the thread count") {
    auto spec = small_spec();
    spec.threads = 1;
    const auto one = table_csv(run_experiment(spec));
    spec.threads = 3;
    const auto three = table_csv(run_experiment(spec));
    CHECK(one == three);
    CHECK(one == table_csv(run_experiment(spec)));
    CHECK(one.rfind("n,rejection_rate,se,mean_T,mean_N\n", 0) == 0);

    const auto table = run_experiment(spec);
    REQUIRE(table.rows.size() == 2);
    for (const auto& r : table.rows) {
        CHECK(r.rejection_rate >= 0.0);
        CHECK(r.rejection_rate <= 1.0);
    }
    CHECK(table.rows[1].mean_n == doctest::Approx(200.0).epsilon(0.15));
}

TEST_CASE("experiment validation") {
    auto spec = small_spec();
    spec.replications = 0;
    CHECK_THROWS_AS(run_experiment(spec), ConfigError);
    spec = small_spec();
    spec.sizes = {};
    CHECK_THROWS_AS(run_experiment(spec), ConfigError);
    spec = small_spec();
    spec.test.mode = TestMode::continuous;
    spec.test.s = 1.0;
    CHECK_THROWS_AS(run_experiment(spec), ConfigError);
}

TEST_CASE("worker count") {
    CHECK(worker_count(3) == 3);
    setenv("CITEST_THREADS", "2", 1);
    CHECK(worker_count() == 2);
    unsetenv("CITEST_THREADS");
    CHECK(worker_count() >= 1);
}
