#pragma once

#include "bpsim/event.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bpsim {

/// Masses over consecutive integer bins starting at `first_bin`; bin i
/// covers [origin + i*width, origin + (i+1)*width).
struct Histogram {
    double origin = 0.0;
    double width = 1.0;
    std::int64_t first_bin = 0;
    std::vector<double> mass;

    double total() const;
    void add(std::int64_t bin, double m = 1.0);
};

enum class Normalization { Normalized, Raw };
enum class RhythmMode { AbsoluteHour, HourOfWeek };

std::string_view normalization_name(Normalization n);
std::string_view rhythm_mode_name(RhythmMode m);
RhythmMode parse_rhythm_mode(std::string_view s);
Normalization parse_normalization(std::string_view s);

/// Transport cost with ground distance |i - j| in bins, via the cumulative
/// difference formula. Normalized mode scales both sides to mass 1; raw
/// mode uses the masses as given (unequal totals leave the surplus in the
/// last cumulative term). Throws UsageError on an empty histogram or
/// mismatched width/origin.
double emd_1d(const Histogram& a, const Histogram& b, Normalization n = Normalization::Normalized);

/// Cycle-time histograms: 100 equal bins over the real log's range, the
/// simulated values binned on the same grid with overflow bins as needed.
double emd_ct(const EventLog& real, const EventLog& simulated, Normalization n = Normalization::Normalized);

/// Histograms of every start and end timestamp by hour.
double emd_wr(const EventLog& real, const EventLog& simulated, RhythmMode mode = RhythmMode::AbsoluteHour,
              Normalization n = Normalization::Normalized);

struct ComparisonRow {
    std::string label;
    double emd_ct = 0.0;
    double emd_wr = 0.0;
    double delta_mean_cycle = 0.0;  // simulated - real, seconds
    double delta_mean_waiting = 0.0;
    double delta_mean_processing = 0.0;
};

struct ComparisonTable {
    Normalization normalization = Normalization::Normalized;
    RhythmMode rhythm = RhythmMode::AbsoluteHour;
    std::vector<ComparisonRow> rows;
};

struct LabelledLog {
    std::string label;
    const EventLog* log = nullptr;
};

/// One row per simulated log, in input order. Throws UsageError when no
/// simulated log is given.
ComparisonTable compare_runs(const EventLog& real, const std::vector<LabelledLog>& simulated,
                             Normalization n = Normalization::Normalized,
                             RhythmMode mode = RhythmMode::AbsoluteHour);

std::string to_csv(const ComparisonTable& table);
nlohmann::json to_json(const ComparisonTable& table);

}  // namespace bpsim
