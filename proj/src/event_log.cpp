#include "bpsim/event_log.hpp"

#include "bpsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace bpsim {

namespace {

// Splits one CSV record starting at `pos`; advances pos past the line end.
std::vector<std::string> next_record(std::string_view text, std::size_t& pos) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    while (pos < text.size()) {
        const char c = text[pos++];
        if (quoted) {
            if (c == '"') {
                if (pos < text.size() && text[pos] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
            break;
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted.front();
    const double rank = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (rank - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

const std::vector<const Event*> kNoEvents;

}  // namespace

ReadLogResult read_log(std::string_view csv) {
    ReadLogResult result;
    std::size_t pos = 0;
    // Skip a UTF-8 byte order mark.
    if (csv.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
    if (pos >= csv.size()) throw ParseError("log is empty: header row required");
    auto header = next_record(csv, pos);

    auto column = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    auto required = [&](std::string_view name) {
        auto c = column(name);
        if (!c) throw ParseError("log schema: missing required column '" + std::string(name) + "'");
        return *c;
    };
    const auto c_case = required("case_id");
    const auto c_act = required("activity");
    const auto c_res = required("resource");
    const auto c_start = required("start_time");
    const auto c_end = required("end_time");
    const auto c_enable = column("enable_time");

    std::map<std::string, std::size_t> trace_of;
    std::size_t row = 1;
    while (pos < csv.size()) {
        auto fields = next_record(csv, pos);
        ++row;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() < header.size())
            throw ParseError("log row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(fields.size()));
        auto stamp = [&](std::size_t col, const std::string& name) {
            try {
                return parse_timestamp(fields[col]);
            } catch (const ParseError& e) {
                throw ParseError("log row " + std::to_string(row) + ", column " + name + ": " + e.what());
            }
        };
        Event e;
        e.case_id = fields[c_case];
        e.activity = fields[c_act];
        e.resource = fields[c_res];
        e.start = stamp(c_start, "start_time");
        e.complete = stamp(c_end, "end_time");
        if (c_enable && !fields[*c_enable].empty()) e.enabled = stamp(*c_enable, "enable_time");
        if (e.start > e.complete || (e.enabled && *e.enabled > e.start)) {
            ++result.rejected_rows;
            continue;
        }
        auto [it, inserted] = trace_of.emplace(e.case_id, result.log.traces.size());
        if (inserted) result.log.traces.push_back({e.case_id, {}});
        result.log.traces[it->second].events.push_back(std::move(e));
    }
    for (auto& t : result.log.traces)
        std::stable_sort(t.events.begin(), t.events.end(), [](const Event& a, const Event& b) {
            return a.start != b.start ? a.start < b.start : a.complete < b.complete;
        });
    if (result.rejected_rows > 0)
        result.warnings.push_back(std::to_string(result.rejected_rows) +
                                  " row(s) rejected: timestamps out of order (end before start or enable after start)");
    return result;
}

std::string write_log(const EventLog& log) {
    std::string out = "case_id,activity,resource,enable_time,start_time,end_time\n";
    for (const auto& t : log.traces)
        for (const auto& e : t.events) {
            out += csv_field(e.case_id);
            out += ',';
            out += csv_field(e.activity);
            out += ',';
            out += csv_field(e.resource);
            out += ',';
            if (e.enabled) out += format_timestamp(*e.enabled);
            out += ',';
            out += format_timestamp(e.start);
            out += ',';
            out += format_timestamp(e.complete);
            out += '\n';
        }
    return out;
}

std::size_t LogIndex::count(const std::string& resource, const std::string& activity) const {
    return events_of(resource, activity).size();
}

const std::vector<const Event*>& LogIndex::events_of(const std::string& resource, const std::string& activity) const {
    auto it = by_pair.find({resource, activity});
    return it == by_pair.end() ? kNoEvents : it->second;
}

LogIndex build_index(const EventLog& log) {
    LogIndex idx;
    for (const auto& t : log.traces)
        for (const auto& e : t.events) {
            idx.activities_of[e.resource].insert(e.activity);
            idx.by_resource[e.resource].push_back(&e);
            idx.by_activity[e.activity].push_back(&e);
            idx.by_pair[{e.resource, e.activity}].push_back(&e);
            ++idx.total_events;
        }
    for (const auto& [r, _] : idx.by_resource) idx.resources.push_back(r);
    for (const auto& [a, _] : idx.by_activity) idx.activities.push_back(a);
    return idx;
}

Summary summarize(std::vector<double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    s.min = values.front();
    s.max = values.back();
    s.p50 = percentile(values, 0.50);
    s.p90 = percentile(values, 0.90);
    s.p95 = percentile(values, 0.95);
    return s;
}

void finalize_kpis(KpiReport& report) {
    std::vector<double> cycle, waiting, processing;
    for (const auto& [id, c] : report.cycle_times) cycle.push_back(static_cast<double>(c));
    for (auto w : report.waiting_times) waiting.push_back(static_cast<double>(w));
    for (auto p : report.processing_times) processing.push_back(static_cast<double>(p));
    report.cycle = summarize(std::move(cycle));
    report.waiting = summarize(std::move(waiting));
    report.processing = summarize(std::move(processing));
}

KpiReport compute_kpis(const EventLog& log, const std::map<std::string, WeeklyCalendar>* calendars) {
    if (log.empty()) throw UsageError("cannot compute KPIs of an empty log");
    KpiReport r;
    Timestamp span_begin = log.traces.front().first_start();
    Timestamp span_end = log.traces.front().last_complete();
    std::map<std::string, Seconds> busy;
    for (const auto& t : log.traces) {
        r.cycle_times.emplace_back(t.case_id, t.cycle_time());
        span_begin = std::min(span_begin, t.first_start());
        span_end = std::max(span_end, t.last_complete());
        for (const auto& e : t.events) {
            if (!e.enabled) r.enablement_available = false;
            r.waiting_times.push_back(e.waiting_time());
            r.processing_times.push_back(e.processing_time());
            if (calendars) {
                auto it = calendars->find(e.resource);
                if (it != calendars->end()) busy[e.resource] += in_calendar_duration(it->second, e.start, e.complete);
            }
        }
    }
    if (calendars) {
        for (const auto& [res, cal] : *calendars) {
            auto b = busy.find(res);
            const Seconds busy_s = b == busy.end() ? 0 : b->second;
            const Seconds available = in_calendar_duration(cal, span_begin, span_end);
            const double u = available > 0 ? static_cast<double>(busy_s) / static_cast<double>(available) : 0.0;
            r.utilization[res] = std::clamp(u, 0.0, 1.0);
        }
    }
    finalize_kpis(r);
    return r;
}

nlohmann::json to_json(const Summary& s) {
    return {{"count", s.count}, {"mean", s.mean}, {"min", s.min}, {"max", s.max},
            {"p50", s.p50},     {"p90", s.p90},   {"p95", s.p95}};
}

nlohmann::json to_json(const KpiReport& report) {
    nlohmann::json cycles = nlohmann::json::array();
    for (const auto& [id, c] : report.cycle_times) cycles.push_back({{"case_id", id}, {"cycle_time", c}});
    nlohmann::json util = nlohmann::json::object();
    for (const auto& [res, u] : report.utilization) util[res] = u;
    return {{"cycle_time", to_json(report.cycle)},
            {"waiting_time", to_json(report.waiting)},
            {"processing_time", to_json(report.processing)},
            {"enablement_available", report.enablement_available},
            {"utilization", util},
            {"cases", cycles}};
}

}  // namespace bpsim
