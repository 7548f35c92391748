#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace bpsim {

enum class DistributionFamily { Fixed, Uniform, Normal, Exponential, LogNormal, Gamma };

/// Parameter layout per family:
///   fixed       [value]
///   uniform     [low, high]
///   normal      [mean, stddev]
///   exponential [mean]
///   lognormal   [mu, sigma]   (of the underlying normal)
///   gamma       [shape, scale]
/// Samples used as durations are truncated at zero.
struct DistributionSpec {
    DistributionFamily family = DistributionFamily::Fixed;
    std::vector<double> params{0.0};

    static DistributionSpec fixed(double value) { return {DistributionFamily::Fixed, {value}}; }
    static DistributionSpec uniform(double lo, double hi) { return {DistributionFamily::Uniform, {lo, hi}}; }
    static DistributionSpec normal(double mean, double sd) { return {DistributionFamily::Normal, {mean, sd}}; }
    static DistributionSpec exponential(double mean) { return {DistributionFamily::Exponential, {mean}}; }
    static DistributionSpec lognormal(double mu, double sigma) { return {DistributionFamily::LogNormal, {mu, sigma}}; }
    static DistributionSpec gamma(double shape, double scale) { return {DistributionFamily::Gamma, {shape, scale}}; }

    /// Mean of the untruncated distribution.
    double mean() const;

    friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

std::string_view family_name(DistributionFamily f);
DistributionFamily parse_family(std::string_view name);
std::size_t family_arity(DistributionFamily f);

/// Empty when the spec is usable; otherwise a description of the problem.
std::optional<std::string> check_distribution(const DistributionSpec& d);

/// Single RNG stream of one simulation run. The engine is mt19937_64, whose
/// output sequence is fixed by the C++ standard; every transform on top of
/// it is implemented here so draws are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double exponential(double mean);
    double standard_normal();
    double gamma(double shape, double scale);

private:
    std::mt19937_64 engine_;
};

/// Draws a nonnegative duration in seconds. Negative draws are redrawn up to
/// 100 times and then clamped to 0.
double sample(const DistributionSpec& d, Rng& rng);

/// Untruncated single draw.
double sample_raw(const DistributionSpec& d, Rng& rng);

/// Probability density at x.
double density(const DistributionSpec& d, double x);

}  // namespace bpsim
