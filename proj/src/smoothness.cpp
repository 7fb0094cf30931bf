#include "citest/smoothness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "citest/error.hpp"

namespace citest {

std::string to_string(SmoothnessClass c) {
    switch (c) {
        case SmoothnessClass::tv: return "tv";
        case SmoothnessClass::tv_squared: return "tv2";
        case SmoothnessClass::chi_squared: return "chi2";
        case SmoothnessClass::joint_tv: return "joint_tv";
    }
    return "unknown";
}

SmoothnessClass parse_smoothness_class(const std::string& name) {
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    for (auto c : {SmoothnessClass::tv, SmoothnessClass::tv_squared, SmoothnessClass::chi_squared,
                   SmoothnessClass::joint_tv})
        if (key == to_string(c)) return c;
    throw ConfigError("unknown smoothness class '" + name + "'");
}

std::string to_string(PairStrategy s) { return s == PairStrategy::adjacent ? "adjacent" : "all_pairs"; }

namespace {

// Conditional law at one z, discretised: cell values times cell weight give masses.
struct Snapshot {
    std::vector<double> px, py, joint;
};

double weighted_l1(const std::vector<double>& a, const std::vector<double>& b, double w) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s * w;
}

double weighted_chi_sq(const std::vector<double>& a, const std::vector<double>& b, double w) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (b[i] > 0.0) {
            const double d = a[i] - b[i];
            s += d * d / b[i];
        } else if (a[i] > 0.0) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return s * w;
}

struct Evaluator {
    SmoothnessClass cls;
    double marginal_cell = 1.0;
    double joint_cell = 1.0;

    double ratio(const Snapshot& a, const Snapshot& b, double dz) const {
        switch (cls) {
            case SmoothnessClass::tv:
                return std::max(weighted_l1(a.px, b.px, marginal_cell), weighted_l1(a.py, b.py, marginal_cell)) / dz;
            case SmoothnessClass::tv_squared: {
                const double l1 =
                    std::max(weighted_l1(a.px, b.px, marginal_cell), weighted_l1(a.py, b.py, marginal_cell));
                return l1 * l1 / dz;
            }
            case SmoothnessClass::chi_squared: {
                const double c = std::max({weighted_chi_sq(a.px, b.px, marginal_cell),
                                           weighted_chi_sq(b.px, a.px, marginal_cell),
                                           weighted_chi_sq(a.py, b.py, marginal_cell),
                                           weighted_chi_sq(b.py, a.py, marginal_cell)});
                return c / std::max(dz, kMinSeparation);
            }
            case SmoothnessClass::joint_tv: return weighted_l1(a.joint, b.joint, joint_cell) / dz;
        }
        return 0.0;
    }
};

bool needs_joint(SmoothnessClass c) { return c == SmoothnessClass::joint_tv; }

// For the L1 classes the triangle inequality makes the largest adjacent ratio
// on an even grid equal the largest ratio over all pairs, so large grids can
// skip the quadratic scan. The squared and chi-square classes grow like
// |z - z'|^2 locally and need every pair.
PairStrategy strategy_for(SmoothnessClass c, std::size_t grid_size) {
    const bool metric = c == SmoothnessClass::tv || c == SmoothnessClass::joint_tv;
    return metric && grid_size > kAllPairsLimit ? PairStrategy::adjacent : PairStrategy::all_pairs;
}

template <typename SnapshotAt>
SmoothnessReport scan(const Evaluator& ev, std::size_t grid_size, SnapshotAt&& snapshot_at) {
    if (grid_size < 2) throw ConfigError("smoothness grid needs at least two points");
    SmoothnessReport rep;
    rep.class_id = ev.cls;
    rep.grid_size = grid_size;
    rep.strategy = strategy_for(ev.cls, grid_size);
    const double step = 1.0 / static_cast<double>(grid_size - 1);
    auto z_of = [&](std::size_t i) { return static_cast<double>(i) * step; };
    if (rep.strategy == PairStrategy::adjacent) {
        Snapshot prev = snapshot_at(z_of(0));
        for (std::size_t i = 1; i < grid_size; ++i) {
            Snapshot cur = snapshot_at(z_of(i));
            rep.estimate = std::max(rep.estimate, ev.ratio(prev, cur, z_of(i) - z_of(i - 1)));
            prev = std::move(cur);
        }
    } else {
        std::vector<Snapshot> snaps;
        snaps.reserve(grid_size);
        for (std::size_t i = 0; i < grid_size; ++i) snaps.push_back(snapshot_at(z_of(i)));
        for (std::size_t i = 0; i < grid_size; ++i)
            for (std::size_t j = i + 1; j < grid_size; ++j)
                rep.estimate = std::max(rep.estimate, ev.ratio(snaps[i], snaps[j], z_of(j) - z_of(i)));
    }
    return rep;
}

void require_univariate(int dz) {
    if (dz != 1) throw UnsupportedDimensionError("smoothness estimation supports d_Z = 1 only");
}


}  // namespace

SmoothnessReport empirical_lipschitz(const ConditionalDiscreteModel& model, SmoothnessClass class_id,
                                     std::size_t grid_size) {
    require_univariate(model.dz);
    if (!model.table_at) throw ConfigError("model has no table_at evaluator");
    Evaluator ev{class_id};
    return scan(ev, grid_size, [&](double z) {
        const auto t = model.table_at(std::span<const double>(&z, 1));
        Snapshot s;
        if (needs_joint(class_id))
            s.joint.assign(t.probs().begin(), t.probs().end());
        else {
            s.px = t.row_marginal();
            s.py = t.column_marginal();
        }
        return s;
    });
}

SmoothnessReport empirical_lipschitz(const ContinuousConditionalModel& model, SmoothnessClass class_id,
                                     std::size_t grid_size, const SmoothnessOptions& options) {
    require_univariate(model.dz);
    if (!model.density_at) throw ConfigError("model has no density_at evaluator");
    const bool adjacent = strategy_for(class_id, grid_size) == PairStrategy::adjacent;
    const std::size_t rm = options.marginal_points ? options.marginal_points : (adjacent ? 1u << 18 : 1u << 14);
    const std::size_t rj = options.joint_points_per_axis ? options.joint_points_per_axis : (adjacent ? 512 : 128);
    const bool closed_marginals = model.x_density_at && model.y_density_at;
    const std::size_t r_marg = closed_marginals ? rm : rj;

    Evaluator ev{class_id, 1.0 / static_cast<double>(r_marg), 1.0 / static_cast<double>(rj * rj)};
    return scan(ev, grid_size, [&](double zv) {
        const std::span<const double> z(&zv, 1);
        Snapshot s;
        if (needs_joint(class_id)) {
            s.joint.resize(rj * rj);
            for (std::size_t i = 0; i < rj; ++i)
                for (std::size_t j = 0; j < rj; ++j)
                    s.joint[i * rj + j] =
                        model.density_at((i + 0.5) / static_cast<double>(rj), (j + 0.5) / static_cast<double>(rj), z);
            return s;
        }
        s.px.resize(r_marg);
        s.py.resize(r_marg);
        if (closed_marginals) {
            for (std::size_t i = 0; i < r_marg; ++i) {
                const double v = (i + 0.5) / static_cast<double>(r_marg);
                s.px[i] = model.x_density_at(v, z);
                s.py[i] = model.y_density_at(v, z);
            }
        } else {
            std::fill(s.px.begin(), s.px.end(), 0.0);
            std::fill(s.py.begin(), s.py.end(), 0.0);
            for (std::size_t i = 0; i < rj; ++i)
                for (std::size_t j = 0; j < rj; ++j) {
                    const double v = model.density_at((i + 0.5) / static_cast<double>(rj),
                                                      (j + 0.5) / static_cast<double>(rj), z) /
                                     static_cast<double>(rj);
                    s.px[i] += v;
                    s.py[j] += v;
                }
        }
        return s;
    });
}

namespace {

std::vector<double> random_simplex(std::size_t k, Rng& rng) {
    std::vector<double> w(k);
    double total = 0.0;
    for (double& v : w) {
        v = -std::log1p(-uniform01(rng)) + 1e-3;
        total += v;
    }
    for (double& v : w) v /= total;
    return w;
}

DiscreteJointTable random_table(std::size_t ell1, std::size_t ell2, bool product, Rng& rng) {
    if (product) {
        const auto px = random_simplex(ell1, rng);
        const auto py = random_simplex(ell2, rng);
        return DiscreteJointTable::product(px, py);
    }
    return DiscreteJointTable::normalized(ell1, ell2, random_simplex(ell1 * ell2, rng));
}

bool leq(double a, double b) { return a <= b + 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

ConditionalPairFamily random_discrete_pair_family(std::size_t max_ell) {
    if (max_ell < 2) throw ConfigError("random family needs at least two categories per axis");
    return [max_ell](Rng& rng) {
        const bool product = (rng() >> 63) != 0;
        const std::size_t ell1 = 2 + uniform_index(rng, max_ell - 1);
        const std::size_t ell2 = 2 + uniform_index(rng, max_ell - 1);
        auto a = random_table(ell1, ell2, product, rng);
        auto b = random_table(ell1, ell2, product, rng);
        return ConditionalPair{std::move(a), std::move(b), product};
    };
}

InclusionReport check_inclusions(const ConditionalPairFamily& family, std::size_t trials, std::uint64_t seed) {
    InclusionReport rep;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng = derive_stream(seed, t);
        const auto pair = family(rng);
        const auto& p = pair.at_z;
        const auto& q = pair.at_z_prime;
        const auto px = p.row_marginal(), qx = q.row_marginal();
        const auto py = p.column_marginal(), qy = q.column_marginal();
        const double l1x = l1_distance(px, qx), l1y = l1_distance(py, qy);
        const double l1j = l1_distance(p.probs(), q.probs());
        const double cx = chi_sq_divergence(px, qx), cy = chi_sq_divergence(py, qy);
        const double cj = chi_sq_divergence(p.probs(), q.probs());

        ++rep.trials;
        if (!leq(l1x * l1x, cx) || !leq(l1y * l1y, cy) || !leq(l1j * l1j, cj)) ++rep.t2_failures;
        if (!leq(l1x, l1j) || !leq(l1y, l1j)) ++rep.marginal_failures;
        if (pair.product) {
            ++rep.product_trials;
            if (!leq(l1j, l1x + l1y)) ++rep.subadditivity_failures;
            const double rhs = cx + cy + cx * cy;
            if (std::abs(cj - rhs) > 1e-9 * std::max(1.0, std::abs(rhs))) ++rep.chi_identity_failures;
        }
    }
    return rep;
}

}  // namespace citest
