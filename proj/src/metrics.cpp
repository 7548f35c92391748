#include "bpsim/metrics.hpp"

#include "bpsim/error.hpp"
#include "bpsim/event_log.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bpsim {

double Histogram::total() const {
    double t = 0.0;
    for (double m : mass) t += m;
    return t;
}

void Histogram::add(std::int64_t bin, double m) {
    if (mass.empty()) {
        first_bin = bin;
        mass.push_back(m);
        return;
    }
    if (bin < first_bin) {
        mass.insert(mass.begin(), static_cast<std::size_t>(first_bin - bin), 0.0);
        first_bin = bin;
    }
    const auto i = static_cast<std::size_t>(bin - first_bin);
    if (i >= mass.size()) mass.resize(i + 1, 0.0);
    mass[i] += m;
}

std::string_view normalization_name(Normalization n) {
    return n == Normalization::Normalized ? "normalized" : "raw";
}

std::string_view rhythm_mode_name(RhythmMode m) {
    return m == RhythmMode::AbsoluteHour ? "absolute-hour" : "hour-of-week";
}

RhythmMode parse_rhythm_mode(std::string_view s) {
    if (s == "absolute-hour") return RhythmMode::AbsoluteHour;
    if (s == "hour-of-week") return RhythmMode::HourOfWeek;
    throw UsageError("unknown rhythm mode '" + std::string(s) + "'");
}

Normalization parse_normalization(std::string_view s) {
    if (s == "normalized") return Normalization::Normalized;
    if (s == "raw") return Normalization::Raw;
    throw UsageError("unknown normalization '" + std::string(s) + "'");
}

double emd_1d(const Histogram& a, const Histogram& b, Normalization n) {
    if (a.width != b.width || a.origin != b.origin) throw UsageError("histograms do not share a bin grid");
    const double ta = a.total();
    const double tb = b.total();
    if (!(ta > 0.0) || !(tb > 0.0)) throw UsageError("empty histogram");
    for (const auto* h : {&a, &b})
        for (double m : h->mass)
            if (m < 0.0) throw UsageError("negative histogram mass");

    const double sa = n == Normalization::Normalized ? 1.0 / ta : 1.0;
    const double sb = n == Normalization::Normalized ? 1.0 / tb : 1.0;
    const auto lo = std::min(a.first_bin, b.first_bin);
    const auto hi = std::max(a.first_bin + static_cast<std::int64_t>(a.mass.size()),
                             b.first_bin + static_cast<std::int64_t>(b.mass.size()));
    auto at = [](const Histogram& h, std::int64_t i) {
        const auto k = i - h.first_bin;
        return k >= 0 && k < static_cast<std::int64_t>(h.mass.size()) ? h.mass[static_cast<std::size_t>(k)] : 0.0;
    };
    double cdf = 0.0;
    double cost = 0.0;
    // The last cumulative term is the unmatched surplus; it carries no
    // ground distance and is left out.
    for (auto i = lo; i + 1 < hi; ++i) {
        cdf += at(a, i) * sa - at(b, i) * sb;
        cost += std::abs(cdf);
    }
    return cost;
}

namespace {

std::vector<double> cycle_times(const EventLog& log) {
    std::vector<double> out;
    for (const auto& t : log.traces)
        if (!t.events.empty()) out.push_back(static_cast<double>(t.cycle_time()));
    return out;
}

std::vector<Timestamp> all_stamps(const EventLog& log) {
    std::vector<Timestamp> out;
    for (const auto& t : log.traces)
        for (const auto& e : t.events) {
            out.push_back(e.start);
            out.push_back(e.complete);
        }
    return out;
}

constexpr int kCycleBins = 100;

}  // namespace

double emd_ct(const EventLog& real, const EventLog& simulated, Normalization n) {
    const auto r = cycle_times(real);
    const auto s = cycle_times(simulated);
    if (r.empty() || s.empty()) throw UsageError("empty log");
    const auto [lo_it, hi_it] = std::minmax_element(r.begin(), r.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    double width = (hi - lo) / kCycleBins;
    if (width <= 0.0) width = 1.0;

    auto bin_of = [&](double x) {
        auto b = static_cast<std::int64_t>(std::floor((x - lo) / width));
        // the real maximum closes the last bin
        if (x <= hi && b >= kCycleBins) b = kCycleBins - 1;
        return b;
    };
    Histogram hr{lo, width, 0, {}};
    Histogram hs{lo, width, 0, {}};
    for (double x : r) hr.add(bin_of(x));
    for (double x : s) hs.add(bin_of(x));
    return emd_1d(hr, hs, n);
}

double emd_wr(const EventLog& real, const EventLog& simulated, RhythmMode mode, Normalization n) {
    const auto r = all_stamps(real);
    const auto s = all_stamps(simulated);
    if (r.empty() || s.empty()) throw UsageError("empty log");
    const Timestamp origin = std::min(*std::min_element(r.begin(), r.end()), *std::min_element(s.begin(), s.end()));

    auto bin_of = [&](Timestamp t) -> std::int64_t {
        if (mode == RhythmMode::HourOfWeek) return seconds_of_week(t) / kHour;
        return floor_div(t - origin, kHour);
    };
    const double o = mode == RhythmMode::HourOfWeek ? 0.0 : static_cast<double>(origin);
    Histogram hr{o, static_cast<double>(kHour), 0, {}};
    Histogram hs{o, static_cast<double>(kHour), 0, {}};
    for (auto t : r) hr.add(bin_of(t));
    for (auto t : s) hs.add(bin_of(t));
    return emd_1d(hr, hs, n);
}

ComparisonTable compare_runs(const EventLog& real, const std::vector<LabelledLog>& simulated, Normalization n,
                             RhythmMode mode) {
    if (simulated.empty()) throw UsageError("no simulated log to compare");
    ComparisonTable table;
    table.normalization = n;
    table.rhythm = mode;
    const auto base = compute_kpis(real);
    for (const auto& [label, log] : simulated) {
        if (!log) throw UsageError("null simulated log");
        const auto k = compute_kpis(*log);
        ComparisonRow row;
        row.label = label;
        row.emd_ct = emd_ct(real, *log, n);
        row.emd_wr = emd_wr(real, *log, mode, n);
        row.delta_mean_cycle = k.cycle.mean - base.cycle.mean;
        row.delta_mean_waiting = k.waiting.mean - base.waiting.mean;
        row.delta_mean_processing = k.processing.mean - base.processing.mean;
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string to_csv(const ComparisonTable& table) {
    std::ostringstream out;
    out.precision(17);
    out << "label,emd_ct,emd_wr,delta_mean_cycle,delta_mean_waiting,delta_mean_processing,normalization,rhythm\n";
    for (const auto& r : table.rows) {
        std::string label = r.label;
        if (label.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char c : label) q += c == '"' ? std::string("\"\"") : std::string(1, c);
            label = q + "\"";
        }
        out << label << ',' << r.emd_ct << ',' << r.emd_wr << ',' << r.delta_mean_cycle << ','
            << r.delta_mean_waiting << ',' << r.delta_mean_processing << ',' << normalization_name(table.normalization)
            << ',' << rhythm_mode_name(table.rhythm) << '\n';
    }
    return out.str();
}

nlohmann::json to_json(const ComparisonTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"label", r.label},
                        {"emd_ct", r.emd_ct},
                        {"emd_wr", r.emd_wr},
                        {"delta_mean_cycle", r.delta_mean_cycle},
                        {"delta_mean_waiting", r.delta_mean_waiting},
                        {"delta_mean_processing", r.delta_mean_processing}});
    return {{"normalization", normalization_name(table.normalization)},
            {"rhythm", rhythm_mode_name(table.rhythm)},
            {"rows", rows}};
}

}  // namespace bpsim
