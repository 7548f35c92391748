#include "bpsim/distribution.hpp"

#include "bpsim/error.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace bpsim {

namespace {

constexpr std::array<std::string_view, 6> kFamilyNames{"fixed",       "uniform",   "normal",
                                                       "exponential", "lognormal", "gamma"};
constexpr int kMaxRedraws = 100;

}  // namespace

std::string_view family_name(DistributionFamily f) { return kFamilyNames[static_cast<std::size_t>(f)]; }

DistributionFamily parse_family(std::string_view name) {
    for (std::size_t i = 0; i < kFamilyNames.size(); ++i)
        if (kFamilyNames[i] == name) return static_cast<DistributionFamily>(i);
    throw ParseError("unknown distribution family '" + std::string(name) + "'");
}

std::size_t family_arity(DistributionFamily f) {
    switch (f) {
        case DistributionFamily::Fixed:
        case DistributionFamily::Exponential:
            return 1;
        default:
            return 2;
    }
}

std::optional<std::string> check_distribution(const DistributionSpec& d) {
    const auto name = std::string(family_name(d.family));
    if (d.params.size() != family_arity(d.family))
        return name + " expects " + std::to_string(family_arity(d.family)) + " parameter(s), got " +
               std::to_string(d.params.size());
    for (double p : d.params)
        if (!std::isfinite(p)) return name + " has a non-finite parameter";
    const auto& p = d.params;
    switch (d.family) {
        case DistributionFamily::Fixed:
            if (p[0] < 0) return "fixed value must be >= 0";
            break;
        case DistributionFamily::Uniform:
            if (p[0] > p[1]) return "uniform requires low <= high";
            if (p[1] < 0) return "uniform upper bound must be >= 0";
            break;
        case DistributionFamily::Normal:
            if (p[1] < 0) return "normal stddev must be >= 0";
            break;
        case DistributionFamily::Exponential:
            if (p[0] <= 0) return "exponential mean must be > 0";
            break;
        case DistributionFamily::LogNormal:
            if (p[1] < 0) return "lognormal sigma must be >= 0";
            break;
        case DistributionFamily::Gamma:
            if (p[0] <= 0 || p[1] <= 0) return "gamma shape and scale must be > 0";
            break;
    }
    return std::nullopt;
}

double DistributionSpec::mean() const {
    const auto& p = params;
    switch (family) {
        case DistributionFamily::Fixed:
        case DistributionFamily::Exponential:
            return p[0];
        case DistributionFamily::Uniform:
            return 0.5 * (p[0] + p[1]);
        case DistributionFamily::Normal:
            return p[0];
        case DistributionFamily::LogNormal:
            return std::exp(p[0] + 0.5 * p[1] * p[1]);
        case DistributionFamily::Gamma:
            return p[0] * p[1];
    }
    return 0.0;
}

double Rng::exponential(double mean) { return -mean * std::log1p(-uniform01()); }

double Rng::standard_normal() {
    // Box-Muller, cosine branch only; two uniforms per draw.
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape, double scale) {
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0, 1.0);
        const double u = uniform01();
        return scale * g * std::pow(1.0 - u, 1.0 / shape);
    }
    // Marsaglia & Tsang.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = standard_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
        if (std::log1p(-u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
}

double sample_raw(const DistributionSpec& d, Rng& rng) {
    const auto& p = d.params;
    switch (d.family) {
        case DistributionFamily::Fixed:
            return p[0];
        case DistributionFamily::Uniform:
            return p[0] + (p[1] - p[0]) * rng.uniform01();
        case DistributionFamily::Normal:
            return p[0] + p[1] * rng.standard_normal();
        case DistributionFamily::Exponential:
            return rng.exponential(p[0]);
        case DistributionFamily::LogNormal:
            return std::exp(p[0] + p[1] * rng.standard_normal());
        case DistributionFamily::Gamma:
            return rng.gamma(p[0], p[1]);
    }
    return 0.0;
}

double sample(const DistributionSpec& d, Rng& rng) {
    if (auto problem = check_distribution(d)) throw ValidationError("invalid distribution: " + *problem);
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        const double x = sample_raw(d, rng);
        if (x >= 0.0) return x;
    }
    return 0.0;
}

double density(const DistributionSpec& d, double x) {
    const auto& p = d.params;
    switch (d.family) {
        case DistributionFamily::Fixed:
            return 0.0;
        case DistributionFamily::Uniform:
            if (p[1] <= p[0]) return 0.0;
            return (x >= p[0] && x <= p[1]) ? 1.0 / (p[1] - p[0]) : 0.0;
        case DistributionFamily::Normal: {
            if (p[1] <= 0) return 0.0;
            const double z = (x - p[0]) / p[1];
            return std::exp(-0.5 * z * z) / (p[1] * std::sqrt(2.0 * std::numbers::pi));
        }
        case DistributionFamily::Exponential:
            return x < 0 ? 0.0 : std::exp(-x / p[0]) / p[0];
        case DistributionFamily::LogNormal: {
            if (x <= 0 || p[1] <= 0) return 0.0;
            const double z = (std::log(x) - p[0]) / p[1];
            return std::exp(-0.5 * z * z) / (x * p[1] * std::sqrt(2.0 * std::numbers::pi));
        }
        case DistributionFamily::Gamma: {
            if (x < 0) return 0.0;
            if (x == 0) return p[0] == 1.0 ? 1.0 / p[1] : (p[0] < 1.0 ? INFINITY : 0.0);
            const double k = p[0];
            const double theta = p[1];
            return std::exp((k - 1.0) * std::log(x) - x / theta - std::lgamma(k) - k * std::log(theta));
        }
    }
    return 0.0;
}

}  // namespace bpsim
