#include "citest/distributions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "citest/error.hpp"

namespace citest {

namespace {

void check_same_shape(const DiscreteJointTable& p, const DiscreteJointTable& q) {
    if (p.ell1() != q.ell1() || p.ell2() != q.ell2())
        throw DimensionError("table shapes differ: " + std::to_string(p.ell1()) + "x" +
                             std::to_string(p.ell2()) + " vs " + std::to_string(q.ell1()) + "x" +
                             std::to_string(q.ell2()));
}

void check_same_length(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw DimensionError("vector lengths differ: " + std::to_string(p.size()) + " vs " +
                             std::to_string(q.size()));
}

// Visits the midpoints of an r^dz grid on [0,1]^dz.
template <typename F>
void for_each_grid_point(int dz, int r, F&& f) {
    std::vector<double> z(static_cast<std::size_t>(dz));
    if (dz == 1) {
        for (int i = 0; i < r; ++i) {
            z[0] = (i + 0.5) / r;
            f(std::span<const double>(z));
        }
    } else if (dz == 2) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                z[0] = (i + 0.5) / r;
                z[1] = (j + 0.5) / r;
                f(std::span<const double>(z));
            }
    } else {
        throw UnsupportedDimensionError("quadrature supports d_Z in {1,2}, got " +
                                        std::to_string(dz));
    }
}

double z_weight(const std::function<double(std::span<const double>)>& density,
                std::span<const double> z) {
    return density ? density(z) : 1.0;
}

template <typename Integrand>
QuadratureResult two_level(const QuadratureSpec& spec, Integrand&& integrate_at) {
    if (spec.points_per_axis < 1)
        throw ToleranceError("quadrature needs at least one point per axis");
    QuadratureResult out;
    out.value = integrate_at(spec.points_per_axis);
    if (spec.points_per_axis >= 2)
        out.error_estimate = std::abs(out.value - integrate_at(spec.points_per_axis / 2));
    else
        out.error_estimate = std::numeric_limits<double>::infinity();
    if (!std::isfinite(out.value))
        throw ToleranceError("quadrature produced a non-finite value");
    if (spec.tolerance && out.error_estimate > *spec.tolerance)
        throw ToleranceError("quadrature error estimate " + std::to_string(out.error_estimate) +
                             " exceeds tolerance " + std::to_string(*spec.tolerance));
    return out;
}

}  // namespace

void validate_probability_vector(std::span<const double> v) {
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0.0))
            throw DimensionError("negative or NaN probability at index " + std::to_string(i));
        total += v[i];
    }
    if (std::abs(total - 1.0) > kProbabilitySumTolerance)
        throw DimensionError("probabilities sum to " + std::to_string(total) + ", not 1");
}

DiscreteJointTable::DiscreteJointTable(std::size_t ell1, std::size_t ell2,
                                       std::vector<double> probs)
    : ell1_(ell1), ell2_(ell2), probs_(std::move(probs)) {
    if (ell1_ == 0 || ell2_ == 0) throw DimensionError("support sizes must be positive");
    if (probs_.size() != ell1_ * ell2_)
        throw DimensionError("expected " + std::to_string(ell1_ * ell2_) + " entries, got " +
                             std::to_string(probs_.size()));
    validate_probability_vector(probs_);
}

DiscreteJointTable DiscreteJointTable::normalized(std::size_t ell1, std::size_t ell2,
                                                  std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw DimensionError("weights must be nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw DimensionError("weights have zero total mass");
    for (double& w : weights) w /= total;
    return DiscreteJointTable(ell1, ell2, std::move(weights));
}

DiscreteJointTable DiscreteJointTable::uniform(std::size_t ell1, std::size_t ell2) {
    return DiscreteJointTable(ell1, ell2,
                              std::vector<double>(ell1 * ell2, 1.0 / static_cast<double>(ell1 * ell2)));
}

DiscreteJointTable DiscreteJointTable::product(std::span<const double> px,
                                               std::span<const double> py) {
    std::vector<double> probs;
    probs.reserve(px.size() * py.size());
    for (double a : px)
        for (double b : py) probs.push_back(a * b);
    return DiscreteJointTable(px.size(), py.size(), std::move(probs));
}

std::vector<double> DiscreteJointTable::row_marginal() const {
    std::vector<double> m(ell1_, 0.0);
    for (std::size_t x = 0; x < ell1_; ++x)
        for (std::size_t y = 0; y < ell2_; ++y) m[x] += (*this)(x, y);
    return m;
}

std::vector<double> DiscreteJointTable::column_marginal() const {
    std::vector<double> m(ell2_, 0.0);
    for (std::size_t x = 0; x < ell1_; ++x)
        for (std::size_t y = 0; y < ell2_; ++y) m[y] += (*this)(x, y);
    return m;
}

DiscreteMarginalPair marginals(const DiscreteJointTable& p) {
    return {p.row_marginal(), p.column_marginal()};
}

DiscreteJointTable product_of_marginals(const DiscreteJointTable& p) {
    const auto px = p.row_marginal();
    const auto py = p.column_marginal();
    return DiscreteJointTable::product(px, py);
}

double l1_distance(std::span<const double> p, std::span<const double> q) {
    check_same_length(p, q);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return s;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
    return 0.5 * l1_distance(p, q);
}

double l2_distance_sq(std::span<const double> p, std::span<const double> q) {
    check_same_length(p, q);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - q[i];
        s += d * d;
    }
    return s;
}

double chi_sq_divergence(std::span<const double> p, std::span<const double> q) {
    check_same_length(p, q);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (q[i] > 0.0) {
            const double d = p[i] - q[i];
            s += d * d / q[i];
        } else if (p[i] > 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        // p = q = 0 contributes nothing
    }
    return s;
}

double tv_distance(const DiscreteJointTable& p, const DiscreteJointTable& q) {
    check_same_shape(p, q);
    return tv_distance(p.probs(), q.probs());
}

double l2_distance_sq(const DiscreteJointTable& p, const DiscreteJointTable& q) {
    check_same_shape(p, q);
    return l2_distance_sq(p.probs(), q.probs());
}

double chi_sq_divergence(const DiscreteJointTable& p, const DiscreteJointTable& q) {
    check_same_shape(p, q);
    return chi_sq_divergence(p.probs(), q.probs());
}

QuadratureResult model_ci_distance(const ConditionalDiscreteModel& model,
                                   const QuadratureSpec& spec) {
    if (!model.table_at) throw ConfigError("model has no table_at evaluator");
    return two_level(spec, [&](int r) {
        double acc = 0.0;
        for_each_grid_point(model.dz, r, [&](std::span<const double> z) {
            const auto table = model.table_at(z);
            const auto prod = product_of_marginals(table);
            acc += z_weight(model.pz_density, z) * l1_distance(table.probs(), prod.probs());
        });
        return acc / std::pow(static_cast<double>(r), model.dz);
    });
}

QuadratureResult model_ci_distance(const ContinuousConditionalModel& model,
                                   const QuadratureSpec& spec) {
    if (!model.density_at) throw ConfigError("model has no density_at evaluator");
    return two_level(spec, [&](int r) {
        const auto n = static_cast<std::size_t>(r);
        std::vector<double> grid(n * n), row(n), col(n);
        double acc = 0.0;
        for_each_grid_point(model.dz, r, [&](std::span<const double> z) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const double v = model.density_at((i + 0.5) / r, (j + 0.5) / r, z);
                    grid[i * n + j] = v;
                    total += v;
                }
            if (!(total > 0.0)) return;
            // renormalise on the grid so a factorising density gives exactly zero
            const double scale = static_cast<double>(n * n) / total;
            std::fill(row.begin(), row.end(), 0.0);
            std::fill(col.begin(), col.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    grid[i * n + j] *= scale;
                    row[i] += grid[i * n + j] / r;
                    col[j] += grid[i * n + j] / r;
                }
            double l1 = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) l1 += std::abs(grid[i * n + j] - row[i] * col[j]);
            acc += z_weight(model.pz_density, z) * l1 / static_cast<double>(n * n);
        });
        return acc / std::pow(static_cast<double>(r), model.dz);
    });
}

}  // namespace citest
