#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "citest/dataset.hpp"
#include "citest/distributions.hpp"
#include "citest/rng.hpp"

namespace citest {

/// Smooth antisymmetric bump h on [0,1] with zero mean and unit L2 norm:
/// h(z) = kappa (beta(2z) - beta(2z - 1)), beta(t) = exp(-1/(t(1-t))) on (0,1).
class BumpFunction {
public:
    BumpFunction();

    double operator()(double z) const;
    double derivative(double z) const;
    /// sqrt(d) h(d z - j) for the j-th (0-based) of d shifted copies.
    double scaled(std::size_t j, std::size_t d, double z) const;

    double kappa() const noexcept { return kappa_; }
    double sup_norm() const noexcept { return sup_; }
    double derivative_sup_norm() const noexcept { return dsup_; }
    double second_derivative_sup_norm() const noexcept { return d2sup_; }
    /// c = integral of |h| over [0,1].
    double abs_integral() const noexcept { return c_; }

private:
    double kappa_ = 1.0;
    double sup_ = 0.0;
    double dsup_ = 0.0;
    double d2sup_ = 0.0;
    double c_ = 0.0;
};

const BumpFunction& default_bump();

/// Matrix of +1/-1 entries, row-major.
struct SignMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<int> v;

    int operator()(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
    static SignMatrix random(std::size_t rows, std::size_t cols, Rng& rng);
};

/// [D, -D; -D, D]: doubles each dimension, every row and column sums to zero.
SignMatrix make_tilde_delta(const SignMatrix& delta);

std::vector<int> random_signs(std::size_t n, Rng& rng);

// Exponential-family tables on {1,2} x {1,2,3} indexed by z.

DiscreteJointTable gen_discrete_null(double z);
DiscreteJointTable gen_discrete_alt(double z);
ConditionalDiscreteModel discrete_null_model();
ConditionalDiscreteModel discrete_alt_model();
/// Z ~ Uniform[0,1], then (X, Y) from the table at Z.
TripleDataset sample_discrete_null(std::size_t n, Rng& rng);
TripleDataset sample_discrete_alt(std::size_t n, Rng& rng);

/// Null: X = (U1 + Z)/2, Y = (U2 + Z)/2. Alternative: X = (U1 + U + Z)/3,
/// Y = (U2 + U + Z)/3 with a shared U. All uniforms independent on [0,1].
TripleDataset sample_continuous_null(std::size_t n, Rng& rng);
TripleDataset sample_continuous_alt(std::size_t n, Rng& rng);
ContinuousConditionalModel continuous_null_model();
ContinuousConditionalModel continuous_alt_model();

/// Table over [ell1] x [ell2] proportional to exp(f_x(z) + g_y(z)) with
/// f_x(z) = a_x sin(b_x z + c_x) and similarly for g; every exponent is
/// L-Lipschitz in z. The table factorizes for every z.
ConditionalDiscreteModel exponential_family_model(std::size_t ell1, std::size_t ell2, double lipschitz,
                                                  Rng& rng);

struct AdversarialDiscreteSpec {
    std::size_t ell1 = 2;
    std::size_t ell2 = 2;
    double rho = 0.0;
    std::size_t d = 1;
    std::vector<int> nu;  ///< length d
    SignMatrix delta;     ///< ell1/2 x ell2/2

    static AdversarialDiscreteSpec random(std::size_t ell1, std::size_t ell2, double rho,
                                          std::size_t d, Rng& rng);
};

/// Throws ConstructionError for odd supports, wrong sign shapes or a
/// perturbation large enough to make the table negative.
void validate(const AdversarialDiscreteSpec& spec);

/// rho * sum_j nu_j sqrt(d) h(d z - j)
double perturbation_profile(double rho, const std::vector<int>& nu, std::size_t d, double z);

/// 1/(ell1 ell2) + tilde_delta(x, y) * eta(z), 0-based x, y.
double adversarial_discrete_density(const AdversarialDiscreteSpec& spec, std::size_t x, std::size_t y,
                                    double z);
DiscreteJointTable adversarial_discrete_table(const AdversarialDiscreteSpec& spec, double z);
ConditionalDiscreteModel adversarial_discrete_model(const AdversarialDiscreteSpec& spec);
TripleDataset sample_adversarial_discrete(const AdversarialDiscreteSpec& spec, std::size_t n, Rng& rng);
/// ell1 ell2 rho sqrt(d) c
double adversarial_discrete_separation(const AdversarialDiscreteSpec& spec);
/// Largest rho keeping the table nonnegative.
double adversarial_discrete_max_rho(std::size_t ell1, std::size_t ell2, std::size_t d);

struct AdversarialContinuousSpec {
    double rho = 0.0;
    std::size_t d = 1;
    std::size_t d_prime = 1;
    std::vector<int> nu;  ///< length d
    SignMatrix delta;     ///< d_prime x d_prime
    double s = 1.0;

    static AdversarialContinuousSpec random(double rho, std::size_t d, std::size_t d_prime, double s,
                                            Rng& rng);
};

void validate(const AdversarialContinuousSpec& spec);
/// 1 + gamma(x, y) eta(z), gamma = rho^2 sum_ij delta_ij h_i(x) h_j(y).
double adversarial_continuous_density(const AdversarialContinuousSpec& spec, double x, double y, double z);
ContinuousConditionalModel adversarial_continuous_model(const AdversarialContinuousSpec& spec);
/// Rejection sampling of (X, Y) against the uniform envelope.
TripleDataset sample_adversarial_continuous(const AdversarialContinuousSpec& spec, std::size_t n, Rng& rng);
/// sqrt(d d'^2) rho^3 c^3
double adversarial_continuous_separation(const AdversarialContinuousSpec& spec);

struct CouplingSpec {
    std::size_t m = 10;
    double big_m = 1.0;
};

/// sqrt(3) * 2M / m
double coupling_displacement_bound(const CouplingSpec& spec);

/// Moves each observation within its cell A_i x B_j x C_k of the m^3 grid on
/// [-M, M]^3: (X, Y) becomes uniform on A_i x B_j and Z uniform on the
/// (i, j)-th of m^2 equal sub-intervals of C_k. The result is conditionally
/// independent given Z. Input x, y, z must all lie in [-M, M]; d_Z = 1.
TripleDataset ci_coupling(const TripleDataset& data, const CouplingSpec& spec, Rng& rng);

}  // namespace citest
