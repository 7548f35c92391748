#include "bpsim/fitting.hpp"

#include "bpsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bpsim {

std::optional<DistributionSpec> moment_match(DistributionFamily family, double mean, double variance,
                                             double min_value) {
    const double sd = std::sqrt(variance);
    switch (family) {
        case DistributionFamily::Fixed:
            return DistributionSpec::fixed(std::max(mean, 0.0));
        case DistributionFamily::Uniform: {
            const double half = std::sqrt(3.0) * sd;
            if (mean + half < 0) return std::nullopt;
            return DistributionSpec::uniform(mean - half, mean + half);
        }
        case DistributionFamily::Normal:
            return DistributionSpec::normal(mean, sd);
        case DistributionFamily::Exponential:
            if (mean <= 0) return std::nullopt;
            return DistributionSpec::exponential(mean);
        case DistributionFamily::LogNormal: {
            if (mean <= 0 || min_value <= 0) return std::nullopt;
            const double s2 = std::log1p(variance / (mean * mean));
            return DistributionSpec::lognormal(std::log(mean) - 0.5 * s2, std::sqrt(s2));
        }
        case DistributionFamily::Gamma:
            if (mean <= 0 || variance <= 0 || min_value < 0) return std::nullopt;
            return DistributionSpec::gamma(mean * mean / variance, variance / mean);
    }
    return std::nullopt;
}

FitResult best_fitted_distribution(std::span<const double> samples) {
    if (samples.size() < 2) throw UsageError("distribution fitting needs at least 2 samples");
    const auto n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;
    double variance = 0.0;
    for (double x : samples) variance += (x - mean) * (x - mean);
    variance /= n;
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it;
    const double hi = *hi_it;

    FitResult result;
    if (hi == lo || variance <= 0.0) {
        result.spec = DistributionSpec::fixed(std::max(lo, 0.0));
        result.candidates.emplace_back(DistributionFamily::Fixed, 0.0);
        return result;
    }

    const auto bins = std::min<std::size_t>(50, static_cast<std::size_t>(std::ceil(std::sqrt(n))));
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<double> hist(bins, 0.0);
    for (double x : samples) {
        auto b = static_cast<std::size_t>((x - lo) / width);
        hist[std::min(b, bins - 1)] += 1.0;
    }
    for (auto& h : hist) h /= n * width;
    // Expected residual of the true density against this histogram from
    // counting noise alone: sum over bins of var(count) / (n * width)^2.
    double noise = 0.0;
    for (double h : hist) noise += h / (n * width);

    constexpr DistributionFamily kFamilies[] = {DistributionFamily::Exponential, DistributionFamily::Uniform,
                                                DistributionFamily::Normal, DistributionFamily::LogNormal,
                                                DistributionFamily::Gamma};
    struct Scored {
        DistributionSpec spec;
        double rss;
    };
    std::vector<Scored> scored;
    for (auto family : kFamilies) {
        auto spec = moment_match(family, mean, variance, lo);
        if (!spec) continue;
        double rss = 0.0;
        for (std::size_t i = 0; i < bins; ++i) {
            const double center = lo + (static_cast<double>(i) + 0.5) * width;
            const double diff = density(*spec, center) - hist[i];
            rss += diff * diff;
        }
        if (!std::isfinite(rss)) continue;
        result.candidates.emplace_back(family, rss);
        scored.push_back({*spec, rss});
    }
    if (scored.empty()) {
        result.spec = DistributionSpec::fixed(std::max(mean, 0.0));
        return result;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : scored) best = std::min(best, s.rss);
    // Fewest parameters within the slack, then lowest residual. Differences
    // inside the counting noise are not evidence for the richer family.
    const Scored* chosen = nullptr;
    for (const auto& s : scored) {
        if (s.rss > best * (1.0 + kParsimonySlack) + noise) continue;
        if (!chosen || family_arity(s.spec.family) < family_arity(chosen->spec.family) ||
            (family_arity(s.spec.family) == family_arity(chosen->spec.family) && s.rss < chosen->rss))
            chosen = &s;
    }
    result.spec = chosen->spec;
    result.residual = chosen->rss;
    return result;
}

}  // namespace bpsim
