#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "citest/citests.hpp"
#include "citest/error.hpp"
#include "citest/generators.hpp"
#include "citest/harness.hpp"
#include "citest/io.hpp"
#include "citest/smoothness.hpp"

using namespace citest;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Writes to the named file, or stdout when the name is empty or "-".
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
}

struct TestArgs {
    std::string data;
    std::string mode = "fixed_discrete";
    std::optional<double> s, zeta, eta, c_const;
    std::string calibration = "permutation";
    std::size_t perms = 100;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    bool conservative = false;
    bool no_poissonize = false;
    std::optional<std::size_t> ell1, ell2;
    std::string out;
};

struct SimulateArgs {
    std::string preset;
    std::string hypothesis = "alt";
    std::string generator;
    std::vector<std::size_t> sizes;
    std::optional<std::size_t> reps;
    std::optional<std::string> mode;
    std::optional<double> s, zeta, alpha;
    std::optional<std::size_t> perms;
    std::optional<std::string> calibration;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    bool no_poissonize = false;
    std::optional<bool> effective;
    GeneratorSpec gen;
    std::string out;
    std::string meta;
};

struct GenerateArgs {
    std::string family;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    GeneratorSpec gen;
    std::string out;
};

struct SmoothnessArgs {
    std::string model = "continuous-null";
    std::string cls = "tv";
    std::size_t grid = 256;
    std::string out;
};

struct CoupleArgs {
    std::string data;
    std::size_t m = 10;
    double big_m = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

void add_generator_params(CLI::App* cmd, GeneratorSpec& g) {
    cmd->add_option("--rho", g.rho, "Perturbation size (adversarial families)");
    cmd->add_option("--d", g.d, "Number of Z perturbation bins (adversarial families)");
    cmd->add_option("--ell1", g.ell1, "X categories (adversarial-discrete)");
    cmd->add_option("--ell2", g.ell2, "Y categories (adversarial-discrete)");
    cmd->add_option("--d-prime", g.d_prime, "X/Y perturbation bins (adversarial-continuous)");
    cmd->add_option("--smoothness", g.s, "Smoothness label (adversarial-continuous)");
    cmd->add_option("--sign-seed", g.sign_seed, "Seed for the random sign pattern");
}

TestConfig make_config(const TestArgs& a) {
    TestConfig c;
    c.mode = parse_test_mode(a.mode);
    c.s = a.s;
    c.zeta = a.zeta;
    if (a.calibration == "permutation")
        c.calibration = Calibration::permutation;
    else if (a.calibration == "fixed" || a.calibration == "fixed_threshold")
        c.calibration = Calibration::fixed_threshold;
    else
        throw ConfigError("calibration must be 'permutation' or 'fixed'");
    c.permutations = a.perms;
    c.alpha = a.alpha;
    c.seed = a.seed;
    c.conservative = a.conservative;
    c.eta = a.eta;
    c.c_const = a.c_const;
    c.poissonize = !a.no_poissonize;
    return c;
}

int run_test_cmd(const TestArgs& a) {
    const auto config = make_config(a);
    CsvReadOptions opts;
    const bool real_xy = config.mode == TestMode::continuous ||
                         (config.mode == TestMode::multivariate && config.s.has_value());
    opts.kind = real_xy ? XYKind::continuous : XYKind::categorical;
    opts.ell1 = a.ell1;
    opts.ell2 = a.ell2;
    const auto data = read_csv_file(a.data, opts);
    const auto report = run_test(data, config);
    emit(a.out, to_json(report).dump(2) + "\n");
    return 0;
}

int run_simulate_cmd(SimulateArgs a) {
    ExperimentSpec spec;
    const bool alternative = a.hypothesis == "alt" || a.hypothesis == "alternative";
    if (!alternative && a.hypothesis != "null") throw ConfigError("hypothesis must be 'null' or 'alt'");
    if (!a.preset.empty()) {
        spec = preset(a.preset, alternative);
    } else {
        if (a.generator.empty()) throw ConfigError("simulate needs --preset or --generator");
        spec.sizes = {100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
    }
    if (!a.generator.empty()) {
        a.gen.family = parse_generator_family(a.generator);
        spec.generator = a.gen;
    }
    if (!a.sizes.empty()) spec.sizes = a.sizes;
    if (a.reps) spec.replications = *a.reps;
    if (a.mode) spec.test.mode = parse_test_mode(*a.mode);
    if (a.s) spec.test.s = a.s;
    if (a.zeta) spec.test.zeta = a.zeta;
    if (a.alpha) spec.test.alpha = *a.alpha;
    if (a.perms) spec.test.permutations = *a.perms;
    if (a.calibration) {
        if (*a.calibration == "permutation")
            spec.test.calibration = Calibration::permutation;
        else if (*a.calibration == "fixed" || *a.calibration == "fixed_threshold")
            spec.test.calibration = Calibration::fixed_threshold;
        else
            throw ConfigError("calibration must be 'permutation' or 'fixed'");
    }
    spec.seed = a.seed;
    spec.test.seed = a.seed;
    spec.threads = a.threads;
    if (a.no_poissonize) spec.test.poissonize = false;
    if (a.effective) spec.sizes_are_effective = *a.effective;

    const auto table = run_experiment(spec);
    std::ostringstream csv;
    write_table_csv(csv, table);
    emit(a.out, csv.str());

    nlohmann::ordered_json meta;
    meta["experiment"] = to_json(spec);
    if (!a.preset.empty()) meta["preset"] = a.preset;
    meta["hypothesis"] = alternative ? "alt" : "null";
    std::string meta_path = a.meta;
    if (meta_path.empty() && !a.out.empty() && a.out != "-") meta_path = a.out + ".json";
    if (meta_path.empty())
        std::cerr << meta.dump(2) << "\n";
    else
        emit(meta_path, meta.dump(2) + "\n");
    return 0;
}

int run_generate_cmd(GenerateArgs a) {
    a.gen.family = parse_generator_family(a.family);
    Rng rng = derive_stream(a.seed);
    const auto data = generate(a.gen, a.n, rng);
    std::ostringstream csv;
    write_csv(csv, data);
    emit(a.out, csv.str());
    return 0;
}

int run_smoothness_cmd(const SmoothnessArgs& a) {
    const auto cls = parse_smoothness_class(a.cls);
    const auto family = parse_generator_family(a.model);
    SmoothnessReport report;
    switch (family) {
        case GeneratorFamily::discrete_null: report = empirical_lipschitz(discrete_null_model(), cls, a.grid); break;
        case GeneratorFamily::discrete_alt: report = empirical_lipschitz(discrete_alt_model(), cls, a.grid); break;
        case GeneratorFamily::continuous_null:
            report = empirical_lipschitz(continuous_null_model(), cls, a.grid);
            break;
        case GeneratorFamily::continuous_alt:
            report = empirical_lipschitz(continuous_alt_model(), cls, a.grid);
            break;
        default: throw ConfigError("smoothness supports the discrete and continuous simulation families");
    }
    auto j = to_json(report);
    j["model"] = to_string(family);
    emit(a.out, j.dump(2) + "\n");
    return 0;
}

int run_couple_cmd(const CoupleArgs& a) {
    CsvReadOptions opts;
    opts.kind = XYKind::continuous;
    const auto data = read_csv_file(a.data, opts);
    Rng rng = derive_stream(a.seed);
    const auto coupled = ci_coupling(data, CouplingSpec{a.m, a.big_m}, rng);
    std::ostringstream csv;
    write_csv(csv, coupled);
    emit(a.out, csv.str());
    return 0;
}

// Fills options of `cmd` from a flat key = value file. Keys name the long
// flags without dashes (`perms = 50`, `c-const = 2`); a [section] matching
// the subcommand name is also accepted. Options already given on the command
// line keep their values.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw ConfigError("cannot open config file '" + path + "'");
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_file(path);
    } catch (const CLI::ParseError& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == cmd->get_name()))
            throw ConfigError("config file '" + path + "': unexpected section for '" + item.fullname() + "'");
        std::string flag = item.name;
        std::replace(flag.begin(), flag.end(), '_', '-');
        CLI::Option* opt = cmd->get_option_no_throw("--" + flag);
        if (opt == nullptr || flag == "config")
            throw ConfigError("config file '" + path + "': unknown key '" + item.name + "'");
        if (opt->count() > 0) continue;
        try {
            opt->add_result(item.inputs);
            opt->run_callback();
        } catch (const CLI::ParseError& e) {
            throw ConfigError("config file '" + path + "', key '" + item.name + "': " + e.what());
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Binned U-statistic conditional independence tests"};
    app.require_subcommand(1);
    std::string config_path;

    TestArgs ta;
    auto* test = app.add_subcommand("test", "Run one test on a CSV dataset and print a JSON report");
    test->add_option("--config", config_path, "Flat key = value file; command-line flags take precedence");
    test->add_option("data", ta.data, "CSV file with header x,y,z or x,y,z1,z2")->required();
    test->add_option("--mode", ta.mode, "fixed_discrete, scaling_discrete, continuous, multivariate or unbounded");
    test->add_option("--s", ta.s, "Smoothness of the X/Y density (continuous modes)");
    test->add_option("--calibration", ta.calibration, "permutation or fixed");
    test->add_option("--perms", ta.perms, "Number of within-bin permutations");
    test->add_option("--alpha", ta.alpha, "Level for the permutation p-value");
    test->add_option("--zeta", ta.zeta, "Threshold constant for fixed calibration");
    test->add_option("--seed", ta.seed, "Random seed");
    test->add_option("--eta", ta.eta, "Coverage slack for support estimation (unbounded mode)");
    test->add_option("--c-const", ta.c_const, "Constant C in the support-count formula (unbounded mode)");
    test->add_option("--ell1", ta.ell1, "Number of X categories (default: largest code)");
    test->add_option("--ell2", ta.ell2, "Number of Y categories (default: largest code)");
    test->add_flag("--conservative", ta.conservative, "Use the add-one p-value");
    test->add_flag("--no-poissonize", ta.no_poissonize, "Use all n observations");
    test->add_option("--out", ta.out, "Report path (default stdout)");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Replicated size/power study; writes a CSV table");
    sim->add_option("--config", config_path, "Flat key = value file; command-line flags take precedence");
    sim->add_option("--preset", sa.preset, "fig3 or fig4")->check(CLI::IsMember({"fig3", "fig4"}));
    sim->add_option("--hypothesis", sa.hypothesis, "null or alt (default alt)");
    sim->add_option("--generator", sa.generator, "Generator family, overrides the preset's");
    sim->add_option("--sizes", sa.sizes, "Sample sizes")->delimiter(',');
    sim->add_option("--reps", sa.reps, "Replications per sample size");
    sim->add_option("--mode", sa.mode, "Test mode");
    sim->add_option("--s", sa.s, "Smoothness for continuous modes");
    sim->add_option("--calibration", sa.calibration, "permutation or fixed");
    sim->add_option("--perms", sa.perms, "Permutations per test");
    sim->add_option("--alpha", sa.alpha, "Test level");
    sim->add_option("--zeta", sa.zeta, "Threshold constant for fixed calibration");
    sim->add_option("--seed", sa.seed, "Random seed");
    sim->add_option("--threads", sa.threads, "Worker threads (default CITEST_THREADS or all cores)");
    sim->add_flag("--no-poissonize", sa.no_poissonize, "Use all n observations in every replication");
    sim->add_flag("--effective-sizes,!--raw-sizes", sa.effective,
                  "Treat sizes as expected Poissonized sample sizes (presets default to this)");
    add_generator_params(sim, sa.gen);
    sim->add_option("--out", sa.out, "CSV path (default stdout)");
    sim->add_option("--meta", sa.meta, "Metadata JSON path (default <out>.json)");

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "Write a synthetic CSV dataset");
    gen->add_option("--config", config_path, "Flat key = value file; command-line flags take precedence");
    gen->add_option("--family", ga.family, "discrete-null, discrete-alt, continuous-null, continuous-alt, "
                                           "adversarial-discrete or adversarial-continuous")
        ->required();
    gen->add_option("--n", ga.n, "Number of observations");
    gen->add_option("--seed", ga.seed, "Random seed");
    add_generator_params(gen, ga.gen);
    gen->add_option("--out", ga.out, "CSV path (default stdout)");

    SmoothnessArgs ma;
    auto* smooth = app.add_subcommand("smoothness", "Estimate a Lipschitz constant of a simulation family");
    smooth->add_option("--config", config_path, "Flat key = value file; command-line flags take precedence");
    smooth->add_option("--model", ma.model, "discrete-null, discrete-alt, continuous-null or continuous-alt");
    smooth->add_option("--class", ma.cls, "tv, tv2, chi2 or joint_tv");
    smooth->add_option("--grid", ma.grid, "Number of z grid points");
    smooth->add_option("--out", ma.out, "Report path (default stdout)");

    CoupleArgs ca;
    auto* couple = app.add_subcommand("couple", "Replace a dataset by its conditionally independent coupling");
    couple->add_option("--config", config_path, "Flat key = value file; command-line flags take precedence");
    couple->add_option("data", ca.data, "CSV with real x, y, z in [-M, M]")->required();
    couple->add_option("--m", ca.m, "Cells per axis");
    couple->add_option("--big-m", ca.big_m, "Half-width M of the box");
    couple->add_option("--seed", ca.seed, "Random seed");
    couple->add_option("--out", ca.out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (!config_path.empty())
            for (auto* cmd : app.get_subcommands()) apply_config_file(cmd, config_path);
        if (*test) return run_test_cmd(ta);
        if (*sim) return run_simulate_cmd(sa);
        if (*gen) return run_generate_cmd(ga);
        if (*smooth) return run_smoothness_cmd(ma);
        if (*couple) return run_couple_cmd(ca);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UnsupportedDimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
