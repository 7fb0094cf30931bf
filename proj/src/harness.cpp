#include "citest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "citest/error.hpp"
#include "citest/io.hpp"

namespace citest {

namespace {

constexpr GeneratorFamily kFamilies[] = {GeneratorFamily::discrete_null,       GeneratorFamily::discrete_alt,
                                         GeneratorFamily::continuous_null,     GeneratorFamily::continuous_alt,
                                         GeneratorFamily::adversarial_discrete, GeneratorFamily::adversarial_continuous};

}  // namespace

std::string to_string(GeneratorFamily f) {
    switch (f) {
        case GeneratorFamily::discrete_null: return "discrete-null";
        case GeneratorFamily::discrete_alt: return "discrete-alt";
        case GeneratorFamily::continuous_null: return "continuous-null";
        case GeneratorFamily::continuous_alt: return "continuous-alt";
        case GeneratorFamily::adversarial_discrete: return "adversarial-discrete";
        case GeneratorFamily::adversarial_continuous: return "adversarial-continuous";
    }
    return "unknown";
}

GeneratorFamily parse_generator_family(const std::string& name) {
    std::string key = name;
    std::replace(key.begin(), key.end(), '_', '-');
    for (auto f : kFamilies)
        if (key == to_string(f)) return f;
    throw ConfigError("unknown generator family '" + name + "'");
}

TripleDataset generate(const GeneratorSpec& spec, std::size_t n, Rng& rng) {
    switch (spec.family) {
        case GeneratorFamily::discrete_null: return sample_discrete_null(n, rng);
        case GeneratorFamily::discrete_alt: return sample_discrete_alt(n, rng);
        case GeneratorFamily::continuous_null: return sample_continuous_null(n, rng);
        case GeneratorFamily::continuous_alt: return sample_continuous_alt(n, rng);
        case GeneratorFamily::adversarial_discrete: {
            Rng signs = derive_stream(spec.sign_seed);
            const auto a = AdversarialDiscreteSpec::random(spec.ell1, spec.ell2, spec.rho, spec.d, signs);
            return sample_adversarial_discrete(a, n, rng);
        }
        case GeneratorFamily::adversarial_continuous: {
            Rng signs = derive_stream(spec.sign_seed);
            const auto a = AdversarialContinuousSpec::random(spec.rho, spec.d, spec.d_prime, spec.s, signs);
            return sample_adversarial_continuous(a, n, rng);
        }
    }
    throw ConfigError("unknown generator family");
}

std::size_t worker_count(std::size_t requested) {
    std::size_t n = requested;
    if (n == 0) {
        if (const char* env = std::getenv("CITEST_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0) n = static_cast<std::size_t>(v);
        }
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

SizePowerTable run_experiment(const ExperimentSpec& spec) {
    if (spec.replications < 1) throw ConfigError("replications must be at least 1");
    if (spec.sizes.empty()) throw ConfigError("experiment needs at least one sample size");
    for (auto n : spec.sizes)
        if (n == 0) throw ConfigError("sample sizes must be positive");

    struct Outcome {
        bool reject = false;
        double statistic = 0.0;
        std::size_t n_effective = 0;
    };
    const std::size_t reps = spec.replications;
    const std::size_t total = spec.sizes.size() * reps;
    std::vector<Outcome> outcomes(total);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t item = next.fetch_add(1);
            if (item >= total) return;
            const std::size_t k = item / reps, r = item % reps;
            try {
                Rng rng = derive_stream(spec.seed, k, r);
                const std::size_t draw = spec.sizes_are_effective && spec.test.poissonize ? 2 * spec.sizes[k]
                                                                                          : spec.sizes[k];
                const auto data = generate(spec.generator, draw, rng);
                TestConfig cfg = spec.test;
                cfg.seed = spec.seed;
                const auto report = run_test(data, cfg, rng);
                outcomes[item] = {report.reject, report.statistic, report.n_effective};
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = total;
                return;
            }
        }
    };
    const std::size_t workers = std::min(worker_count(spec.threads), total);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    SizePowerTable table;
    for (std::size_t k = 0; k < spec.sizes.size(); ++k) {
        SizePowerRow row;
        row.n = spec.sizes[k];
        double rejects = 0.0, t_sum = 0.0, n_sum = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& o = outcomes[k * reps + r];
            rejects += o.reject ? 1.0 : 0.0;
            t_sum += o.statistic;
            n_sum += static_cast<double>(o.n_effective);
        }
        const double R = static_cast<double>(reps);
        row.rejection_rate = rejects / R;
        row.se = std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) / R);
        row.mean_t = t_sum / R;
        row.mean_n = n_sum / R;
        table.rows.push_back(row);
    }
    return table;
}

ExperimentSpec preset(const std::string& name, bool alternative) {
    ExperimentSpec spec;
    for (std::size_t n = 100; n <= 1000; n += 100) spec.sizes.push_back(n);
    spec.replications = 100;
    spec.test.calibration = Calibration::permutation;
    spec.test.permutations = 100;
    spec.test.alpha = 0.05;
    spec.sizes_are_effective = true;
    if (name == "fig3") {
        spec.generator.family = alternative ? GeneratorFamily::discrete_alt : GeneratorFamily::discrete_null;
        spec.test.mode = TestMode::scaling_discrete;
    } else if (name == "fig4") {
        spec.generator.family = alternative ? GeneratorFamily::continuous_alt : GeneratorFamily::continuous_null;
        spec.test.mode = TestMode::continuous;
        spec.test.s = 1.0;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected fig3 or fig4)");
    }
    return spec;
}

void write_table_csv(std::ostream& out, const SizePowerTable& table) {
    out << "n,rejection_rate,se,mean_T,mean_N\n";
    char buf[160];
    for (const auto& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", r.n, r.rejection_rate, r.se, r.mean_t,
                      r.mean_n);
        out << buf;
    }
}

nlohmann::ordered_json to_json(const ExperimentSpec& spec) {
    nlohmann::ordered_json j;
    j["generator"] = {{"family", to_string(spec.generator.family)}};
    const auto fam = spec.generator.family;
    if (fam == GeneratorFamily::adversarial_discrete || fam == GeneratorFamily::adversarial_continuous) {
        auto& g = j["generator"];
        g["rho"] = spec.generator.rho;
        g["d"] = spec.generator.d;
        if (fam == GeneratorFamily::adversarial_discrete) {
            g["ell1"] = spec.generator.ell1;
            g["ell2"] = spec.generator.ell2;
        } else {
            g["d_prime"] = spec.generator.d_prime;
            g["s"] = spec.generator.s;
        }
        g["sign_seed"] = spec.generator.sign_seed;
    }
    j["sizes"] = spec.sizes;
    j["replications"] = spec.replications;
    j["test"] = to_json(spec.test);
    j["seed"] = spec.seed;
    j["sizes_are_effective"] = spec.sizes_are_effective;
    return j;
}

}  // namespace citest
