#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "citest/binning.hpp"
#include "citest/citests.hpp"
#include "citest/error.hpp"
#include "citest/flatten.hpp"
#include "citest/generators.hpp"
#include "citest/harness.hpp"
#include "citest/io.hpp"
#include "citest/smoothness.hpp"
#include "citest/ustat.hpp"

namespace py = pybind11;
using namespace citest;

namespace {

// JSON documents cross into Python through the json module.
py::object to_python(const nlohmann::ordered_json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

DiscretePairSample pairs(std::vector<int> xs, std::vector<int> ys, std::size_t ell1, std::size_t ell2) {
    return DiscretePairSample{std::move(xs), std::move(ys), ell1, ell2};
}

TripleDataset make_dataset(std::vector<double> x, std::vector<double> y, std::vector<double> z, bool continuous,
                           int dz, std::optional<std::size_t> ell1, std::optional<std::size_t> ell2) {
    TripleDataset d;
    d.kind = continuous ? XYKind::continuous : XYKind::categorical;
    d.dz = dz;
    d.x = std::move(x);
    d.y = std::move(y);
    d.z = std::move(z);
    if (!continuous) {
        double mx = 0, my = 0;
        for (double v : d.x) mx = std::max(mx, v);
        for (double v : d.y) my = std::max(my, v);
        d.ell1 = ell1.value_or(static_cast<std::size_t>(mx) + 1);
        d.ell2 = ell2.value_or(static_cast<std::size_t>(my) + 1);
    }
    return d;
}

py::dict dataset_dict(const TripleDataset& d) {
    py::dict out;
    out["x"] = d.x;
    out["y"] = d.y;
    out["z"] = d.z;
    out["dz"] = d.dz;
    out["continuous"] = d.kind == XYKind::continuous;
    if (d.kind == XYKind::categorical) {
        out["ell1"] = d.ell1;
        out["ell2"] = d.ell2;
    }
    return out;
}

TestConfig make_config(const std::string& mode, std::optional<double> s, std::size_t permutations, double alpha,
                       std::uint64_t seed, std::optional<double> zeta, bool conservative, bool poissonize,
                       std::optional<double> eta, std::optional<double> c_const) {
    TestConfig c;
    c.mode = parse_test_mode(mode);
    c.s = s;
    c.zeta = zeta;
    c.calibration = zeta ? Calibration::fixed_threshold : Calibration::permutation;
    c.permutations = permutations;
    c.alpha = alpha;
    c.seed = seed;
    c.conservative = conservative;
    c.poissonize = poissonize;
    c.eta = eta;
    c.c_const = c_const;
    return c;
}

GeneratorSpec make_generator(const std::string& family, std::size_t ell1, std::size_t ell2, double rho,
                             std::size_t d, std::size_t d_prime, double s, std::uint64_t sign_seed) {
    GeneratorSpec g;
    g.family = parse_generator_family(family);
    g.ell1 = ell1;
    g.ell2 = ell2;
    g.rho = rho;
    g.d = d;
    g.d_prime = d_prime;
    g.s = s;
    g.sign_seed = sign_seed;
    return g;
}

}  // namespace

PYBIND11_MODULE(_citest, m) {
    m.doc() = "Binned U-statistic conditional independence tests";

    auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<InsufficientSampleError>(m, "InsufficientSampleError", base.ptr());
    py::register_exception<OutOfSupportError>(m, "OutOfSupportError", base.ptr());
    py::register_exception<UnsupportedDimensionError>(m, "UnsupportedDimensionError", base.ptr());
    py::register_exception<ConstructionError>(m, "ConstructionError", base.ptr());
    py::register_exception<ToleranceError>(m, "ToleranceError", base.ptr());

    m.def("u_statistic",
          [](std::vector<int> xs, std::vector<int> ys, std::size_t ell1, std::size_t ell2) {
              return u_statistic(pairs(std::move(xs), std::move(ys), ell1, ell2));
          },
          py::arg("xs"), py::arg("ys"), py::arg("ell1"), py::arg("ell2"),
          "Unbiased estimate of the squared L2 gap between the joint and the product of marginals.");
    m.def("u_statistic_naive",
          [](std::vector<int> xs, std::vector<int> ys, std::size_t ell1, std::size_t ell2) {
              return u_statistic_naive(pairs(std::move(xs), std::move(ys), ell1, ell2));
          },
          py::arg("xs"), py::arg("ys"), py::arg("ell1"), py::arg("ell2"));
    m.def("flattened_u_statistic",
          [](std::vector<int> xs, std::vector<int> ys, std::size_t ell1, std::size_t ell2) {
              const auto plan = split_dataset(pairs(std::move(xs), std::move(ys), ell1, ell2));
              return weighted_u_statistic(plan, flattening_weights(plan));
          },
          py::arg("xs"), py::arg("ys"), py::arg("ell1"), py::arg("ell2"),
          "Split the sample, weight cells by held-out counts and return the weighted statistic.");

    m.def("bin_count",
          [](const std::string& mode, std::size_t n, std::size_t ell1, std::size_t ell2, std::optional<double> s,
             int dz) {
              BinPlan plan;
              switch (parse_test_mode(mode)) {
                  case TestMode::fixed_discrete: plan = fixed_discrete_plan(n); break;
                  case TestMode::scaling_discrete: plan = scaling_discrete_plan(n, ell1, ell2); break;
                  case TestMode::continuous:
                      if (!s) throw ConfigError("continuous plans need s");
                      plan = continuous_plan(n, *s);
                      break;
                  case TestMode::multivariate: plan = multivariate_plan(n, dz, s); break;
                  case TestMode::unbounded: throw ConfigError("unbounded plans depend on the data");
              }
              return to_python(to_json(plan));
          },
          py::arg("mode"), py::arg("n"), py::arg("ell1") = 1, py::arg("ell2") = 1, py::arg("s") = py::none(),
          py::arg("dz") = 1);

    m.def("run_test",
          [](std::vector<double> x, std::vector<double> y, std::vector<double> z, const std::string& mode,
             std::optional<double> s, std::size_t permutations, double alpha, std::uint64_t seed,
             std::optional<double> zeta, bool conservative, bool poissonize, int dz,
             std::optional<std::size_t> ell1, std::optional<std::size_t> ell2, std::optional<double> eta,
             std::optional<double> c_const) {
              const auto config =
                  make_config(mode, s, permutations, alpha, seed, zeta, conservative, poissonize, eta, c_const);
              const bool continuous = config.mode == TestMode::continuous ||
                                      (config.mode == TestMode::multivariate && config.s.has_value());
              const auto data =
                  make_dataset(std::move(x), std::move(y), std::move(z), continuous, dz, ell1, ell2);
              TestReport report;
              {
                  py::gil_scoped_release release;
                  report = run_test(data, config);
              }
              return to_python(to_json(report));
          },
          py::arg("x"), py::arg("y"), py::arg("z"), py::arg("mode") = "fixed_discrete", py::arg("s") = py::none(),
          py::arg("permutations") = 100, py::arg("alpha") = 0.05, py::arg("seed") = 0,
          py::arg("zeta") = py::none(), py::arg("conservative") = false, py::arg("poissonize") = true,
          py::arg("dz") = 1, py::arg("ell1") = py::none(), py::arg("ell2") = py::none(), py::arg("eta") = py::none(),
          py::arg("c_const") = py::none(),
          "Run one test. Categorical x and y are 0-based codes. Passing zeta selects the fixed threshold.");

    m.def("generate",
          [](const std::string& family, std::size_t n, std::uint64_t seed, std::size_t ell1, std::size_t ell2,
             double rho, std::size_t d, std::size_t d_prime, double s, std::uint64_t sign_seed) {
              Rng rng = derive_stream(seed);
              return dataset_dict(generate(make_generator(family, ell1, ell2, rho, d, d_prime, s, sign_seed), n, rng));
          },
          py::arg("family"), py::arg("n"), py::arg("seed") = 0, py::arg("ell1") = 2, py::arg("ell2") = 2,
          py::arg("rho") = 0.0, py::arg("d") = 1, py::arg("d_prime") = 1, py::arg("s") = 1.0,
          py::arg("sign_seed") = 0);

    m.def("simulate",
          [](const std::string& preset_name, bool alternative, std::vector<std::size_t> sizes,
             std::optional<std::size_t> replications, std::optional<std::size_t> permutations, std::uint64_t seed,
             std::size_t threads) {
              auto spec = preset(preset_name, alternative);
              if (!sizes.empty()) spec.sizes = sizes;
              if (replications) spec.replications = *replications;
              if (permutations) spec.test.permutations = *permutations;
              spec.seed = seed;
              spec.threads = threads;
              SizePowerTable table;
              {
                  py::gil_scoped_release release;
                  table = run_experiment(spec);
              }
              py::list rows;
              for (const auto& r : table.rows) {
                  py::dict row;
                  row["n"] = r.n;
                  row["rejection_rate"] = r.rejection_rate;
                  row["se"] = r.se;
                  row["mean_T"] = r.mean_t;
                  row["mean_N"] = r.mean_n;
                  rows.append(row);
              }
              return rows;
          },
          py::arg("preset"), py::arg("alternative") = true, py::arg("sizes") = std::vector<std::size_t>{},
          py::arg("replications") = py::none(), py::arg("permutations") = py::none(), py::arg("seed") = 0,
          py::arg("threads") = 0);

    m.def("couple",
          [](std::vector<double> x, std::vector<double> y, std::vector<double> z, std::size_t cells, double big_m,
             std::uint64_t seed) {
              const auto data = make_dataset(std::move(x), std::move(y), std::move(z), true, 1, {}, {});
              Rng rng = derive_stream(seed);
              return dataset_dict(ci_coupling(data, CouplingSpec{cells, big_m}, rng));
          },
          py::arg("x"), py::arg("y"), py::arg("z"), py::arg("m") = 10, py::arg("big_m") = 1.0, py::arg("seed") = 0);

    m.def("smoothness",
          [](const std::string& model, const std::string& cls, std::size_t grid) {
              const auto c = parse_smoothness_class(cls);
              switch (parse_generator_family(model)) {
                  case GeneratorFamily::discrete_null: return to_python(to_json(empirical_lipschitz(discrete_null_model(), c, grid)));
                  case GeneratorFamily::discrete_alt: return to_python(to_json(empirical_lipschitz(discrete_alt_model(), c, grid)));
                  case GeneratorFamily::continuous_null:
                      return to_python(to_json(empirical_lipschitz(continuous_null_model(), c, grid)));
                  case GeneratorFamily::continuous_alt:
                      return to_python(to_json(empirical_lipschitz(continuous_alt_model(), c, grid)));
                  default: throw ConfigError("smoothness supports the discrete and continuous simulation families");
              }
          },
          py::arg("model"), py::arg("cls") = "tv", py::arg("grid") = 256);
}
