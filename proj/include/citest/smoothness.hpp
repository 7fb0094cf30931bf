#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "citest/distributions.hpp"
#include "citest/rng.hpp"

namespace citest {

/// tv: L1 distance of the conditional marginals; tv_squared: its square;
/// chi_squared: chi-square divergence of the conditional marginals;
/// joint_tv: L1 distance of the joint conditional law of (X, Y).
enum class SmoothnessClass { tv, tv_squared, chi_squared, joint_tv };
enum class PairStrategy { all_pairs, adjacent };

std::string to_string(SmoothnessClass c);
SmoothnessClass parse_smoothness_class(const std::string& name);
std::string to_string(PairStrategy s);

struct SmoothnessReport {
    SmoothnessClass class_id = SmoothnessClass::tv;
    double estimate = 0.0;
    std::size_t grid_size = 0;
    PairStrategy strategy = PairStrategy::all_pairs;
};

/// Pairs of grid points closer than this are treated as this far apart in
/// the chi-square class.
inline constexpr double kMinSeparation = 1e-6;
/// Grids up to this size compare all pairs; larger grids compare adjacent
/// pairs only for the tv and joint_tv classes.
inline constexpr std::size_t kAllPairsLimit = 128;

struct SmoothnessOptions {
    /// Midpoint points for conditional marginal densities; 0 picks 2^18 for
    /// adjacent pairs and 2^14 for all pairs.
    std::size_t marginal_points = 0;
    /// Points per axis for joint densities; 0 picks 512 or 128 likewise.
    std::size_t joint_points_per_axis = 0;
};

/// Largest ratio distance(p_z, p_z') / |z - z'| (distance^2 / |z - z'| for
/// tv_squared) over pairs of the grid z_i = i / (grid_size - 1). A lower
/// bound on the class constant. Only d_Z = 1 is supported.
SmoothnessReport empirical_lipschitz(const ConditionalDiscreteModel& model, SmoothnessClass class_id,
                                     std::size_t grid_size);
SmoothnessReport empirical_lipschitz(const ContinuousConditionalModel& model, SmoothnessClass class_id,
                                     std::size_t grid_size, const SmoothnessOptions& options = {});

/// Conditional laws of (X, Y) at two values of Z.
struct ConditionalPair {
    DiscreteJointTable at_z;
    DiscreteJointTable at_z_prime;
    bool product = false;  ///< both tables factorize
};

using ConditionalPairFamily = std::function<ConditionalPair(Rng&)>;

/// Random tables with 2..max_ell categories per axis; about half the draws
/// are pairs of product tables.
ConditionalPairFamily random_discrete_pair_family(std::size_t max_ell = 5);

struct InclusionReport {
    std::size_t trials = 0;
    std::size_t product_trials = 0;
    std::size_t t2_failures = 0;              ///< ||p - q||_1^2 <= chi2(p, q)
    std::size_t subadditivity_failures = 0;   ///< joint L1 <= sum of marginal L1 (products)
    std::size_t marginal_failures = 0;        ///< marginal L1 <= joint L1
    std::size_t chi_identity_failures = 0;    ///< chi2 of a product from its factors

    bool passed() const {
        return t2_failures + subadditivity_failures + marginal_failures + chi_identity_failures == 0;
    }
};

InclusionReport check_inclusions(const ConditionalPairFamily& family, std::size_t trials, std::uint64_t seed);

}  // namespace citest
