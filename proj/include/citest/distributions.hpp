#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "citest/rng.hpp"

namespace citest {

/// Absolute tolerance on the total mass of a probability vector or table.
inline constexpr double kProbabilitySumTolerance = 1e-12;

/// Probability table over [ell1] x [ell2], stored row-major (x major, y minor).
///
/// Construction validates nonnegativity and unit mass to within
/// kProbabilitySumTolerance. Inputs are never rescaled silently; use
/// DiscreteJointTable::normalized to renormalise explicitly.
class DiscreteJointTable {
public:
    DiscreteJointTable(std::size_t ell1, std::size_t ell2, std::vector<double> probs);

    /// Renormalises nonnegative weights to unit mass.
    static DiscreteJointTable normalized(std::size_t ell1, std::size_t ell2,
                                         std::vector<double> weights);
    static DiscreteJointTable uniform(std::size_t ell1, std::size_t ell2);
    /// Outer product of two probability vectors.
    static DiscreteJointTable product(std::span<const double> px, std::span<const double> py);

    std::size_t ell1() const noexcept { return ell1_; }
    std::size_t ell2() const noexcept { return ell2_; }
    std::size_t size() const noexcept { return probs_.size(); }

    double operator()(std::size_t x, std::size_t y) const { return probs_[x * ell2_ + y]; }
    std::span<const double> probs() const noexcept { return probs_; }

    std::vector<double> row_marginal() const;
    std::vector<double> column_marginal() const;

private:
    std::size_t ell1_;
    std::size_t ell2_;
    std::vector<double> probs_;
};

struct DiscreteMarginalPair {
    std::vector<double> px;
    std::vector<double> py;
};

/// Throws DimensionError if v is not a probability vector.
void validate_probability_vector(std::span<const double> v);

DiscreteMarginalPair marginals(const DiscreteJointTable& p);
DiscreteJointTable product_of_marginals(const DiscreteJointTable& p);

/// Half the L1 distance. Shapes must agree.
double tv_distance(const DiscreteJointTable& p, const DiscreteJointTable& q);
double l2_distance_sq(const DiscreteJointTable& p, const DiscreteJointTable& q);
/// Sum over q>0 of (p-q)^2/q; +infinity when p puts mass where q has none.
double chi_sq_divergence(const DiscreteJointTable& p, const DiscreteJointTable& q);

// Same metrics on flat probability vectors (marginal views).
double l1_distance(std::span<const double> p, std::span<const double> q);
double tv_distance(std::span<const double> p, std::span<const double> q);
double l2_distance_sq(std::span<const double> p, std::span<const double> q);
double chi_sq_divergence(std::span<const double> p, std::span<const double> q);

/// Law of (X, Y) given Z for categorical X, Y.
struct ConditionalDiscreteModel {
    int dz = 1;
    std::function<DiscreteJointTable(std::span<const double> z)> table_at;
    /// Fills a length-dz buffer with one draw of Z.
    std::function<void(Rng&, std::span<double>)> pz_sampler;
    /// Density of Z on [0,1]^dz; empty means uniform.
    std::function<double(std::span<const double>)> pz_density;
};

/// Law of (X, Y) given Z for X, Y with a density on [0,1]^2.
struct ContinuousConditionalModel {
    int dz = 1;
    std::function<double(double x, double y, std::span<const double> z)> density_at;
    std::function<void(Rng&, std::span<double>)> pz_sampler;
    std::function<std::pair<double, double>(std::span<const double> z, Rng&)> xy_sampler_given_z;
    std::function<double(std::span<const double>)> pz_density;
    /// Optional closed-form conditional marginal densities. When absent they are
    /// obtained by integrating density_at over the quadrature grid.
    std::function<double(double x, std::span<const double> z)> x_density_at;
    std::function<double(double y, std::span<const double> z)> y_density_at;
};

/// Composite midpoint rule over [0,1] per axis.
struct QuadratureSpec {
    int points_per_axis = 512;
    /// When set, an error estimate above this raises ToleranceError.
    std::optional<double> tolerance;
};

struct QuadratureResult {
    double value = 0.0;
    /// |I(r) - I(r/2)| for the resolution r actually used.
    double error_estimate = 0.0;
};

/// E_Z || p_{X,Y|Z} - p_{X|Z} p_{Y|Z} ||_1.
///
/// This is the CI-proxy distance: it upper-bounds the L1 distance from the
/// model to the set of conditionally independent laws, and is at most six
/// times that distance.
QuadratureResult model_ci_distance(const ConditionalDiscreteModel& model,
                                   const QuadratureSpec& spec = {});
QuadratureResult model_ci_distance(const ContinuousConditionalModel& model,
                                   const QuadratureSpec& spec = {});

}  // namespace citest
