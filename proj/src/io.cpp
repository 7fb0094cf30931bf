#include "citest/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "citest/error.hpp"

namespace citest {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_real(const std::string& s, long row, long col) {
    if (s.empty()) throw DataError("empty field", row, col);
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw DataError("not a number: '" + s + "'", row, col);
    }
    if (used != s.size()) throw DataError("not a number: '" + s + "'", row, col);
    if (!std::isfinite(v)) throw DataError("value is not finite", row, col);
    return v;
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TripleDataset read_csv(std::istream& in, const CsvReadOptions& options) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("missing header line");
    const auto header = split_fields(trim(line));
    TripleDataset data;
    data.kind = options.kind;
    if (header == std::vector<std::string>{"x", "y", "z"})
        data.dz = 1;
    else if (header == std::vector<std::string>{"x", "y", "z1", "z2"})
        data.dz = 2;
    else
        throw DataError("header must be x,y,z or x,y,z1,z2", 0);
    const std::size_t width = header.size();

    long row = 0;
    std::size_t max_x = 0, max_y = 0;
    std::vector<double> z(static_cast<std::size_t>(data.dz));
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != width)
            throw DataError("expected " + std::to_string(width) + " fields, found " +
                                std::to_string(fields.size()),
                            row);
        double xv = parse_real(fields[0], row, 1);
        double yv = parse_real(fields[1], row, 2);
        for (int k = 0; k < data.dz; ++k) z[static_cast<std::size_t>(k)] = parse_real(fields[2 + k], row, 3 + k);
        if (data.kind == XYKind::categorical) {
            for (auto [v, col] : {std::pair{xv, 1L}, std::pair{yv, 2L}})
                if (v != std::floor(v) || v < 1) throw DataError("category must be an integer >= 1", row, col);
            xv -= 1;
            yv -= 1;
            max_x = std::max(max_x, static_cast<std::size_t>(xv) + 1);
            max_y = std::max(max_y, static_cast<std::size_t>(yv) + 1);
            if (options.ell1 && xv >= static_cast<double>(*options.ell1))
                throw DataError("x category exceeds declared support", row, 1);
            if (options.ell2 && yv >= static_cast<double>(*options.ell2))
                throw DataError("y category exceeds declared support", row, 2);
        }
        data.push_back(xv, yv, z);
    }
    if (data.kind == XYKind::categorical) {
        data.ell1 = options.ell1.value_or(std::max<std::size_t>(max_x, 1));
        data.ell2 = options.ell2.value_or(std::max<std::size_t>(max_y, 1));
    }
    return data;
}

TripleDataset read_csv_file(const std::string& path, const CsvReadOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_csv(in, options);
}

void write_csv(std::ostream& out, const TripleDataset& data) {
    out << (data.dz == 1 ? "x,y,z\n" : "x,y,z1,z2\n");
    const bool categorical = data.kind == XYKind::categorical;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (categorical)
            out << static_cast<long>(data.x[i]) + 1 << ',' << static_cast<long>(data.y[i]) + 1;
        else
            out << format_real(data.x[i]) << ',' << format_real(data.y[i]);
        for (double v : data.z_row(i)) out << ',' << format_real(v);
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const TripleDataset& data) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_csv(out, data);
}

nlohmann::ordered_json to_json(const BinPlan& plan) {
    nlohmann::ordered_json j;
    j["d"] = plan.d;
    j["d_z"] = plan.d_z;
    j["d_prime"] = plan.d_prime ? nlohmann::ordered_json(*plan.d_prime) : nlohmann::ordered_json();
    j["s"] = plan.s ? nlohmann::ordered_json(*plan.s) : nlohmann::ordered_json();
    auto support = nlohmann::ordered_json::array();
    for (const auto& iv : plan.support) support.push_back({iv.lo, iv.hi});
    j["support"] = support;
    if (plan.size_condition_met) j["size_condition_met"] = *plan.size_condition_met;
    return j;
}

nlohmann::ordered_json to_json(const TestConfig& c) {
    nlohmann::ordered_json j;
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json();
    };
    j["mode"] = to_string(c.mode);
    j["s"] = opt(c.s);
    j["zeta"] = opt(c.zeta);
    j["calibration"] = c.calibration == Calibration::permutation ? "permutation" : "fixed_threshold";
    j["permutations"] = c.permutations;
    j["conservative"] = c.conservative;
    j["alpha"] = c.alpha;
    j["seed"] = c.seed;
    j["eta"] = opt(c.eta);
    j["c_const"] = opt(c.c_const);
    j["poissonize"] = c.poissonize;
    return j;
}

nlohmann::ordered_json to_json(const TestReport& r) {
    nlohmann::ordered_json j;
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value ? nlohmann::ordered_json(*r.p_value) : nlohmann::ordered_json();
    j["decision"] = r.reject ? "reject" : "accept";
    j["d"] = r.plan.d;
    j["d_prime"] = r.plan.d_prime ? nlohmann::ordered_json(*r.plan.d_prime) : nlohmann::ordered_json();
    j["n_input"] = r.n_input;
    j["n_effective"] = r.n_effective;
    j["threshold_used"] = r.threshold_used ? nlohmann::ordered_json(*r.threshold_used) : nlohmann::ordered_json();
    j["poisson_overflow"] = r.poisson_overflow;
    j["plan"] = to_json(r.plan);
    auto bins = nlohmann::ordered_json::array();
    for (const auto& b : r.per_bin) bins.push_back({{"sigma", b.sigma}, {"omega", b.omega}, {"u", b.u}});
    j["per_bin"] = bins;
    if (r.support) {
        j["support_estimate"] = {{"lo", r.support->interval.lo},
                                 {"hi", r.support->interval.hi},
                                 {"coverage_target", r.support->coverage_target},
                                 {"count_threshold", r.support->count_threshold}};
        j["discarded"] = r.discarded;
    }
    j["seed"] = r.seed;
    j["config"] = to_json(r.config);
    return j;
}

nlohmann::ordered_json to_json(const SmoothnessReport& r) {
    nlohmann::ordered_json j;
    j["class_id"] = to_string(r.class_id);
    j["estimate"] = std::isfinite(r.estimate) ? nlohmann::ordered_json(r.estimate) : nlohmann::ordered_json("inf");
    j["grid_size"] = r.grid_size;
    j["pair_strategy"] = to_string(r.strategy);
    return j;
}

}  // namespace citest
