#include "bpsim/event.hpp"

#include <algorithm>

namespace bpsim {

Timestamp Trace::last_complete() const {
    Timestamp t = events.front().complete;
    for (const auto& e : events) t = std::max(t, e.complete);
    return t;
}

std::size_t EventLog::event_count() const {
    std::size_t n = 0;
    for (const auto& t : traces) n += t.events.size();
    return n;
}

}  // namespace bpsim
