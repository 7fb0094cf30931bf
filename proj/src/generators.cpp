#include "citest/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "citest/binning.hpp"
#include "citest/error.hpp"

namespace citest {

namespace {

// Standard smooth bump on (0,1) and its first two derivatives.
double beta(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(-1.0 / (t * (1.0 - t)));
}

double beta_d1(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = t * (1.0 - t);
    return beta(t) * (1.0 - 2.0 * t) / (u * u);
}

double beta_d2(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = t * (1.0 - t);
    const double du = 1.0 - 2.0 * t;
    const double g1 = du / (u * u);
    const double g2 = (-2.0 * u - 2.0 * du * du) / (u * u * u);
    return beta(t) * (g2 + g1 * g1);
}

void uniform_z(Rng& rng, std::span<double> z) {
    for (double& v : z) v = uniform01(rng);
}

TripleDataset sample_from_tables(std::size_t n, Rng& rng, std::size_t ell1, std::size_t ell2,
                                 DiscreteJointTable (*table)(double)) {
    TripleDataset out;
    out.kind = XYKind::categorical;
    out.ell1 = ell1;
    out.ell2 = ell2;
    out.x.reserve(n);
    out.y.reserve(n);
    out.z.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = uniform01(rng);
        const auto t = table(z);
        const std::size_t cell = sample_categorical(t.probs(), rng);
        out.x.push_back(static_cast<double>(cell / ell2));
        out.y.push_back(static_cast<double>(cell % ell2));
        out.z.push_back(z);
    }
    return out;
}

DiscreteJointTable exp_table(const double (&e)[2][3]) {
    std::vector<double> w;
    w.reserve(6);
    for (const auto& row : e)
        for (double v : row) w.push_back(std::exp(v));
    return DiscreteJointTable::normalized(2, 3, std::move(w));
}

double in_unit(double v) { return (v >= 0.0 && v <= 1.0) ? 1.0 : 0.0; }

// Density of U1 + U on [0, 2].
double triangle(double t) {
    if (t < 0.0 || t > 2.0) return 0.0;
    return t <= 1.0 ? t : 2.0 - t;
}

}  // namespace

BumpFunction::BumpFunction() {
    constexpr int kPoints = 1 << 16;
    double ib = 0.0, ib2 = 0.0, d1 = 0.0, d2 = 0.0;
    for (int i = 0; i < kPoints; ++i) {
        const double t = (i + 0.5) / kPoints;
        const double b = beta(t);
        ib += b;
        ib2 += b * b;
        d1 = std::max(d1, std::abs(beta_d1(t)));
        d2 = std::max(d2, std::abs(beta_d2(t)));
    }
    ib /= kPoints;
    ib2 /= kPoints;
    // each half of h carries half of the beta integrals
    kappa_ = 1.0 / std::sqrt(ib2);
    c_ = kappa_ * ib;
    sup_ = kappa_ * std::exp(-4.0);
    dsup_ = 2.0 * kappa_ * d1;
    d2sup_ = 4.0 * kappa_ * d2;
}

double BumpFunction::operator()(double z) const {
    return kappa_ * (beta(2.0 * z) - beta(2.0 * z - 1.0));
}

double BumpFunction::derivative(double z) const {
    return 2.0 * kappa_ * (beta_d1(2.0 * z) - beta_d1(2.0 * z - 1.0));
}

double BumpFunction::scaled(std::size_t j, std::size_t d, double z) const {
    const double dd = static_cast<double>(d);
    return std::sqrt(dd) * (*this)(dd * z - static_cast<double>(j));
}

const BumpFunction& default_bump() {
    static const BumpFunction bump;
    return bump;
}

SignMatrix SignMatrix::random(std::size_t rows, std::size_t cols, Rng& rng) {
    return SignMatrix{rows, cols, random_signs(rows * cols, rng)};
}

std::vector<int> random_signs(std::size_t n, Rng& rng) {
    std::vector<int> s(n);
    for (int& v : s) v = (rng() >> 63) ? 1 : -1;
    return s;
}

SignMatrix make_tilde_delta(const SignMatrix& delta) {
    if (delta.v.size() != delta.rows * delta.cols) throw DimensionError("sign matrix has wrong size");
    for (int v : delta.v)
        if (v != 1 && v != -1) throw ConstructionError("sign matrix entries must be +1 or -1");
    SignMatrix out{2 * delta.rows, 2 * delta.cols, std::vector<int>(4 * delta.v.size())};
    for (std::size_t i = 0; i < out.rows; ++i)
        for (std::size_t j = 0; j < out.cols; ++j) {
            const bool bottom = i >= delta.rows, right = j >= delta.cols;
            const int sign = bottom == right ? 1 : -1;
            out.v[i * out.cols + j] = sign * delta(i % delta.rows, j % delta.cols);
        }
    return out;
}

DiscreteJointTable gen_discrete_null(double z) {
    const double a[2] = {z, std::cos(z) - 1.0};
    const double b[3] = {std::tanh(z), std::cos(z), std::sin(z)};
    const double e[2][3] = {{a[0] + b[0], a[0] + b[1], a[0] + b[2]},
                            {a[1] + b[0], a[1] + b[1], a[1] + b[2]}};
    return exp_table(e);
}

DiscreteJointTable gen_discrete_alt(double z) {
    const double e[2][3] = {{z, std::tanh(z), std::sin(z)},
                            {std::cos(z), z + 1.0, std::tanh(z) - 1.0}};
    return exp_table(e);
}

ConditionalDiscreteModel discrete_null_model() {
    return {1, [](std::span<const double> z) { return gen_discrete_null(z[0]); }, uniform_z, {}};
}

ConditionalDiscreteModel discrete_alt_model() {
    return {1, [](std::span<const double> z) { return gen_discrete_alt(z[0]); }, uniform_z, {}};
}

TripleDataset sample_discrete_null(std::size_t n, Rng& rng) {
    return sample_from_tables(n, rng, 2, 3, gen_discrete_null);
}

TripleDataset sample_discrete_alt(std::size_t n, Rng& rng) {
    return sample_from_tables(n, rng, 2, 3, gen_discrete_alt);
}

TripleDataset sample_continuous_null(std::size_t n, Rng& rng) {
    TripleDataset out;
    out.kind = XYKind::continuous;
    for (std::size_t i = 0; i < n; ++i) {
        const double u1 = uniform01(rng), u2 = uniform01(rng), z = uniform01(rng);
        out.x.push_back((u1 + z) / 2.0);
        out.y.push_back((u2 + z) / 2.0);
        out.z.push_back(z);
    }
    return out;
}

TripleDataset sample_continuous_alt(std::size_t n, Rng& rng) {
    TripleDataset out;
    out.kind = XYKind::continuous;
    for (std::size_t i = 0; i < n; ++i) {
        const double u1 = uniform01(rng), u2 = uniform01(rng), u = uniform01(rng), z = uniform01(rng);
        out.x.push_back((u1 + u + z) / 3.0);
        out.y.push_back((u2 + u + z) / 3.0);
        out.z.push_back(z);
    }
    return out;
}

ContinuousConditionalModel continuous_null_model() {
    ContinuousConditionalModel m;
    m.dz = 1;
    auto marginal = [](double v, std::span<const double> z) { return 2.0 * in_unit(2.0 * v - z[0]); };
    m.density_at = [marginal](double x, double y, std::span<const double> z) {
        return marginal(x, z) * marginal(y, z);
    };
    m.pz_sampler = uniform_z;
    m.xy_sampler_given_z = [](std::span<const double> z, Rng& rng) {
        return std::make_pair((uniform01(rng) + z[0]) / 2.0, (uniform01(rng) + z[0]) / 2.0);
    };
    m.x_density_at = marginal;
    m.y_density_at = marginal;
    return m;
}

ContinuousConditionalModel continuous_alt_model() {
    ContinuousConditionalModel m;
    m.dz = 1;
    m.density_at = [](double x, double y, std::span<const double> z) {
        const double a = 3.0 * x - z[0], b = 3.0 * y - z[0];
        const double len = std::min({1.0, a, b}) - std::max({0.0, a - 1.0, b - 1.0});
        return 9.0 * std::max(0.0, len);
    };
    m.pz_sampler = uniform_z;
    m.xy_sampler_given_z = [](std::span<const double> z, Rng& rng) {
        const double u = uniform01(rng);
        return std::make_pair((uniform01(rng) + u + z[0]) / 3.0, (uniform01(rng) + u + z[0]) / 3.0);
    };
    auto marginal = [](double v, std::span<const double> z) { return 3.0 * triangle(3.0 * v - z[0]); };
    m.x_density_at = marginal;
    m.y_density_at = marginal;
    return m;
}

ConditionalDiscreteModel exponential_family_model(std::size_t ell1, std::size_t ell2, double lipschitz,
                                                  Rng& rng) {
    if (ell1 == 0 || ell2 == 0) throw DimensionError("support sizes must be positive");
    struct Wave {
        double a, b, c;
        double operator()(double z) const { return a * std::sin(b * z + c); }
    };
    auto draw = [&](std::size_t k) {
        std::vector<Wave> w(k);
        for (auto& v : w) {
            v.b = 0.5 + 2.5 * uniform01(rng);
            const double sign = (rng() >> 63) ? 1.0 : -1.0;
            v.a = sign * lipschitz * (0.2 + 0.8 * uniform01(rng)) / v.b;
            v.c = 2.0 * std::numbers::pi * uniform01(rng);
        }
        return w;
    };
    auto fx = draw(ell1), gy = draw(ell2);
    ConditionalDiscreteModel m;
    m.dz = 1;
    m.table_at = [fx, gy, ell1, ell2](std::span<const double> z) {
        std::vector<double> w;
        w.reserve(ell1 * ell2);
        for (const auto& f : fx)
            for (const auto& g : gy) w.push_back(std::exp(f(z[0]) + g(z[0])));
        return DiscreteJointTable::normalized(ell1, ell2, std::move(w));
    };
    m.pz_sampler = uniform_z;
    return m;
}

AdversarialDiscreteSpec AdversarialDiscreteSpec::random(std::size_t ell1, std::size_t ell2, double rho,
                                                        std::size_t d, Rng& rng) {
    AdversarialDiscreteSpec s;
    s.ell1 = ell1;
    s.ell2 = ell2;
    s.rho = rho;
    s.d = d;
    s.nu = random_signs(d, rng);
    s.delta = SignMatrix::random(ell1 / 2, ell2 / 2, rng);
    return s;
}

double adversarial_discrete_max_rho(std::size_t ell1, std::size_t ell2, std::size_t d) {
    return 1.0 / (static_cast<double>(ell1 * ell2) * std::sqrt(static_cast<double>(d)) *
                  default_bump().sup_norm());
}

void validate(const AdversarialDiscreteSpec& spec) {
    if (spec.ell1 == 0 || spec.ell2 == 0 || spec.ell1 % 2 || spec.ell2 % 2)
        throw ConstructionError("adversarial tables need even, positive support sizes");
    if (spec.d == 0 || spec.nu.size() != spec.d)
        throw ConstructionError("sign vector must have one entry per perturbation bin");
    if (spec.delta.rows != spec.ell1 / 2 || spec.delta.cols != spec.ell2 / 2 ||
        spec.delta.v.size() != spec.delta.rows * spec.delta.cols)
        throw ConstructionError("sign matrix must be ell1/2 x ell2/2");
    if (!(spec.rho >= 0.0)) throw ConstructionError("rho must be nonnegative");
    if (spec.rho > adversarial_discrete_max_rho(spec.ell1, spec.ell2, spec.d) * (1.0 + 1e-12))
        throw ConstructionError("rho " + std::to_string(spec.rho) +
                                " makes the perturbed table negative");
}

double perturbation_profile(double rho, const std::vector<int>& nu, std::size_t d, double z) {
    if (d == 0) return 0.0;
    // only the copy whose support contains z is nonzero
    const auto j = std::min(d - 1, static_cast<std::size_t>(std::max(0.0, z * static_cast<double>(d))));
    return rho * nu[j] * default_bump().scaled(j, d, z);
}

double adversarial_discrete_density(const AdversarialDiscreteSpec& spec, std::size_t x, std::size_t y,
                                    double z) {
    const auto tilde = make_tilde_delta(spec.delta);
    return 1.0 / static_cast<double>(spec.ell1 * spec.ell2) +
           tilde(x, y) * perturbation_profile(spec.rho, spec.nu, spec.d, z);
}

DiscreteJointTable adversarial_discrete_table(const AdversarialDiscreteSpec& spec, double z) {
    validate(spec);
    const auto tilde = make_tilde_delta(spec.delta);
    const double eta = perturbation_profile(spec.rho, spec.nu, spec.d, z);
    const double base = 1.0 / static_cast<double>(spec.ell1 * spec.ell2);
    std::vector<double> p(spec.ell1 * spec.ell2);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::max(0.0, base + tilde.v[i] * eta);
    return DiscreteJointTable(spec.ell1, spec.ell2, std::move(p));
}

ConditionalDiscreteModel adversarial_discrete_model(const AdversarialDiscreteSpec& spec) {
    validate(spec);
    return {1, [spec](std::span<const double> z) { return adversarial_discrete_table(spec, z[0]); },
            uniform_z, {}};
}

TripleDataset sample_adversarial_discrete(const AdversarialDiscreteSpec& spec, std::size_t n, Rng& rng) {
    validate(spec);
    TripleDataset out;
    out.kind = XYKind::categorical;
    out.ell1 = spec.ell1;
    out.ell2 = spec.ell2;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = uniform01(rng);
        const auto t = adversarial_discrete_table(spec, z);
        const std::size_t cell = sample_categorical(t.probs(), rng);
        out.x.push_back(static_cast<double>(cell / spec.ell2));
        out.y.push_back(static_cast<double>(cell % spec.ell2));
        out.z.push_back(z);
    }
    return out;
}

double adversarial_discrete_separation(const AdversarialDiscreteSpec& spec) {
    return static_cast<double>(spec.ell1 * spec.ell2) * spec.rho *
           std::sqrt(static_cast<double>(spec.d)) * default_bump().abs_integral();
}

AdversarialContinuousSpec AdversarialContinuousSpec::random(double rho, std::size_t d, std::size_t d_prime,
                                                            double s, Rng& rng) {
    AdversarialContinuousSpec spec;
    spec.rho = rho;
    spec.d = d;
    spec.d_prime = d_prime;
    spec.s = s;
    spec.nu = random_signs(d, rng);
    spec.delta = SignMatrix::random(d_prime, d_prime, rng);
    return spec;
}

namespace {

double continuous_envelope_excess(const AdversarialContinuousSpec& spec) {
    const double h = default_bump().sup_norm();
    return std::sqrt(static_cast<double>(spec.d_prime * spec.d_prime * spec.d)) * h * h * h * spec.rho *
           spec.rho * spec.rho;
}

double gamma_at(const AdversarialContinuousSpec& spec, double x, double y) {
    const auto& h = default_bump();
    const std::size_t dp = spec.d_prime;
    const auto i = std::min(dp - 1, static_cast<std::size_t>(std::max(0.0, x * static_cast<double>(dp))));
    const auto j = std::min(dp - 1, static_cast<std::size_t>(std::max(0.0, y * static_cast<double>(dp))));
    return spec.rho * spec.rho * spec.delta(i, j) * h.scaled(i, dp, x) * h.scaled(j, dp, y);
}

}  // namespace

void validate(const AdversarialContinuousSpec& spec) {
    if (spec.d == 0 || spec.d_prime == 0) throw ConstructionError("bin counts must be positive");
    if (spec.nu.size() != spec.d) throw ConstructionError("sign vector must have d entries");
    if (spec.delta.rows != spec.d_prime || spec.delta.cols != spec.d_prime ||
        spec.delta.v.size() != spec.d_prime * spec.d_prime)
        throw ConstructionError("sign matrix must be d' x d'");
    if (!(spec.rho >= 0.0)) throw ConstructionError("rho must be nonnegative");
    if (continuous_envelope_excess(spec) > 1.0 + 1e-12)
        throw ConstructionError("rho " + std::to_string(spec.rho) + " makes the density negative");
}

double adversarial_continuous_density(const AdversarialContinuousSpec& spec, double x, double y, double z) {
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) return 0.0;
    return 1.0 + gamma_at(spec, x, y) * perturbation_profile(spec.rho, spec.nu, spec.d, z);
}

ContinuousConditionalModel adversarial_continuous_model(const AdversarialContinuousSpec& spec) {
    validate(spec);
    ContinuousConditionalModel m;
    m.dz = 1;
    m.density_at = [spec](double x, double y, std::span<const double> z) {
        return adversarial_continuous_density(spec, x, y, z[0]);
    };
    m.pz_sampler = uniform_z;
    const double bound = 1.0 + continuous_envelope_excess(spec);
    m.xy_sampler_given_z = [spec, bound](std::span<const double> z, Rng& rng) {
        for (;;) {
            const double x = uniform01(rng), y = uniform01(rng);
            if (uniform01(rng) * bound <= adversarial_continuous_density(spec, x, y, z[0]))
                return std::make_pair(x, y);
        }
    };
    m.x_density_at = [](double v, std::span<const double>) { return in_unit(v); };
    m.y_density_at = m.x_density_at;
    return m;
}

TripleDataset sample_adversarial_continuous(const AdversarialContinuousSpec& spec, std::size_t n, Rng& rng) {
    const auto model = adversarial_continuous_model(spec);
    TripleDataset out;
    out.kind = XYKind::continuous;
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        model.pz_sampler(rng, std::span<double>(&z, 1));
        const auto [x, y] = model.xy_sampler_given_z(std::span<const double>(&z, 1), rng);
        out.x.push_back(x);
        out.y.push_back(y);
        out.z.push_back(z);
    }
    return out;
}

double adversarial_continuous_separation(const AdversarialContinuousSpec& spec) {
    const double c = default_bump().abs_integral();
    return std::sqrt(static_cast<double>(spec.d * spec.d_prime * spec.d_prime)) * spec.rho * spec.rho *
           spec.rho * c * c * c;
}

double coupling_displacement_bound(const CouplingSpec& spec) {
    return std::sqrt(3.0) * 2.0 * spec.big_m / static_cast<double>(spec.m);
}

TripleDataset ci_coupling(const TripleDataset& data, const CouplingSpec& spec, Rng& rng) {
    if (spec.m < 1 || !(spec.big_m > 0.0)) throw ConfigError("coupling needs m >= 1 and M > 0");
    if (data.dz != 1) throw UnsupportedDimensionError("coupling supports one-dimensional Z only");
    if (data.y.size() != data.size() || data.z.size() != data.size())
        throw DimensionError("x, y and z columns have inconsistent lengths");
    const Interval box{-spec.big_m, spec.big_m};
    const std::size_t m = spec.m;
    const double width = box.length() / static_cast<double>(m);
    const double sub = width / static_cast<double>(m * m);

    TripleDataset out;
    out.kind = XYKind::continuous;
    out.dz = 1;
    out.x.reserve(data.size());
    out.y.reserve(data.size());
    out.z.reserve(data.size());
    for (std::size_t r = 0; r < data.size(); ++r) {
        std::size_t i, j, k;
        try {
            i = axis_cell(data.x[r], box, m);
            j = axis_cell(data.y[r], box, m);
            k = axis_cell(data.z[r], box, m);
        } catch (const OutOfSupportError& e) {
            throw DataError(std::string("outside the coupling box: ") + e.what(), static_cast<long>(r) + 1);
        }
        const double z_lo = box.lo + static_cast<double>(k) * width + static_cast<double>(i * m + j) * sub;
        out.x.push_back(box.lo + (static_cast<double>(i) + uniform01(rng)) * width);
        out.y.push_back(box.lo + (static_cast<double>(j) + uniform01(rng)) * width);
        out.z.push_back(z_lo + uniform01(rng) * sub);
    }
    return out;
}

}  // namespace citest
