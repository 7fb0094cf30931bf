#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "citest/citests.hpp"
#include "citest/dataset.hpp"
#include "citest/generators.hpp"

namespace citest {

enum class GeneratorFamily {
    discrete_null,
    discrete_alt,
    continuous_null,
    continuous_alt,
    adversarial_discrete,
    adversarial_continuous
};

std::string to_string(GeneratorFamily f);
/// Accepts to_string names with '-' or '_'.
GeneratorFamily parse_generator_family(const std::string& name);

struct GeneratorSpec {
    GeneratorFamily family = GeneratorFamily::discrete_alt;
    // adversarial families only
    std::size_t ell1 = 2;
    std::size_t ell2 = 2;
    double rho = 0.0;
    std::size_t d = 1;
    std::size_t d_prime = 1;
    double s = 1.0;
    /// Seed for the random sign pattern; the same pattern is reused across replications.
    std::uint64_t sign_seed = 0;
};

TripleDataset generate(const GeneratorSpec& spec, std::size_t n, Rng& rng);

struct ExperimentSpec {
    GeneratorSpec generator;
    std::vector<std::size_t> sizes;
    std::size_t replications = 100;
    TestConfig test;
    std::uint64_t seed = 0;
    /// 0 uses CITEST_THREADS or the hardware concurrency.
    std::size_t threads = 0;
    /// Read each size as the expected Poissonized sample size N: 2N
    /// observations are drawn so that N ~ Poisson(N) on average matches it.
    bool sizes_are_effective = false;
};

struct SizePowerRow {
    std::size_t n = 0;
    double rejection_rate = 0.0;
    double se = 0.0;
    double mean_t = 0.0;
    double mean_n = 0.0;
};

struct SizePowerTable {
    std::vector<SizePowerRow> rows;
};

/// Worker count: `requested` when nonzero, else CITEST_THREADS, else the hardware concurrency.
std::size_t worker_count(std::size_t requested = 0);

/// Replication r at size index k draws data and runs the test on the stream
/// derived from (seed, k, r); results are reduced in (k, r) order, so the table
/// does not depend on the number of threads.
SizePowerTable run_experiment(const ExperimentSpec& spec);

/// "fig3": discrete families, scaling test. "fig4": continuous families,
/// continuous test with s = 1. Both use N = 100..1000 as effective sample
/// sizes, R = 100, M = 100.
ExperimentSpec preset(const std::string& name, bool alternative);

void write_table_csv(std::ostream& out, const SizePowerTable& table);
nlohmann::ordered_json to_json(const ExperimentSpec& spec);

}  // namespace citest
