#pragma once

#include "bpsim/time.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bpsim {

/// One executed activity instance.
struct Event {
    std::string case_id;
    std::string activity;
    std::string resource;
    std::optional<Timestamp> enabled;
    Timestamp start = 0;
    Timestamp complete = 0;

    Seconds processing_time() const { return complete - start; }
    Seconds waiting_time() const { return enabled ? start - *enabled : 0; }

    friend bool operator==(const Event&, const Event&) = default;
};

/// Events of one case, sorted by start then completion.
struct Trace {
    std::string case_id;
    std::vector<Event> events;

    Timestamp first_start() const { return events.front().start; }
    Timestamp last_complete() const;
    Seconds cycle_time() const { return last_complete() - first_start(); }

    friend bool operator==(const Trace&, const Trace&) = default;
};

struct EventLog {
    std::vector<Trace> traces;

    std::size_t event_count() const;
    bool empty() const { return traces.empty(); }

    friend bool operator==(const EventLog&, const EventLog&) = default;
};

}  // namespace bpsim
