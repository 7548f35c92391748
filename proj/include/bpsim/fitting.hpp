#pragma once

#include "bpsim/distribution.hpp"

#include <span>
#include <utility>
#include <vector>

namespace bpsim {

struct FitResult {
    DistributionSpec spec;
    double residual = 0.0;  // residual sum of squares of the chosen family
    std::vector<std::pair<DistributionFamily, double>> candidates;  // every family tried
};

/// Relative slack under which a family with fewer parameters is preferred
/// over the lowest-residual one. The histogram's counting noise is added on
/// top of it.
inline constexpr double kParsimonySlack = 0.10;

/// Moment-matches each family to the samples, scores its density against
/// the normalized histogram (min(50, ceil(sqrt N)) bins over [min, max]) by
/// residual sum of squares, and returns the best. Zero variance yields
/// fixed(value). Throws UsageError for fewer than 2 samples.
FitResult best_fitted_distribution(std::span<const double> samples);

/// Moment-matched parameters for one family; nullopt when the family cannot
/// describe the data (e.g. lognormal with non-positive samples).
std::optional<DistributionSpec> moment_match(DistributionFamily family, double mean, double variance,
                                             double min_value);

}  // namespace bpsim
