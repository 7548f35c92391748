#include <catch_amalgamated.hpp>

#include "bpsim/error.hpp"
#include "bpsim/event_log.hpp"
#include "bpsim/simulator.hpp"

#include "../support/oracles.hpp"
#include "../support/synthetic.hpp"

#include <algorithm>
#include <map>

using namespace bpsim;
using synthetic::kMonday;

namespace {

SimConfig config(std::size_t cases, Timestamp start = kMonday, std::uint64_t seed = 1) {
    SimConfig c;
    c.cases = cases;
    c.start_at = start;
    c.seed = seed;
    return c;
}

/// start -> join -> A -> split -> (back to join | end)
DifferentiatedSimModel loop_model(double repeat) {
    DifferentiatedSimModel m;
    m.graph = GraphBuilder()
                  .start("s")
                  .exclusive_gateway("join")
                  .task("A", "A")
                  .exclusive_gateway("split")
                  .end("e")
                  .flow("f0", "s", "join")
                  .flow("f1", "join", "A")
                  .flow("f2", "A", "split")
                  .flow("back", "split", "join")
                  .flow("exit", "split", "e")
                  .build();
    m.profiles.push_back(synthetic::profile("r1", WeeklyCalendar::always(), {{"A", DistributionSpec::fixed(10)}}));
    m.bp = {{"back", repeat}, {"exit", 1.0 - repeat}};
    m.arrival = DistributionSpec::fixed(60);
    return m;
}

std::map<std::string, const ResourceProfile*> by_id(const DifferentiatedSimModel& m) {
    std::map<std::string, const ResourceProfile*> out;
    for (const auto& p : m.profiles) out[p.id] = &p;
    return out;
}

}  // namespace

TEST_CASE("arrivals accumulate inside the arrival calendar", "[simulator]") {
    DifferentiatedSimModel m = synthetic::one_task(DistributionSpec::fixed(1));
    m.arrival = DistributionSpec::fixed(3600);
    m.arrival_calendar = synthetic::office(9, 17);
    Rng rng(1);
    const auto a = generate_arrivals(m, config(3, kMonday + 9 * kHour), rng);
    CHECK(a == std::vector<Timestamp>{kMonday + 9 * kHour, kMonday + 10 * kHour, kMonday + 11 * kHour});

    // Friday 16:30 plus one day lands on Saturday and moves to Monday 09:00
    m.arrival = DistributionSpec::fixed(kDay);
    const Timestamp friday = kMonday + 4 * kDay + 16 * kHour + 30 * kMinute;
    const auto b = generate_arrivals(m, config(2, friday), rng);
    CHECK(b[1] == kMonday + kWeek + 9 * kHour);
    CHECK(b[1] == oracle::next_available(m.arrival_calendar, friday + kDay));

    const auto one = generate_arrivals(m, config(1, kMonday), rng);
    CHECK(one == std::vector<Timestamp>{kMonday + 9 * kHour});

    m.arrival_calendar = WeeklyCalendar{};
    CHECK_THROWS_AS(generate_arrivals(m, config(1), rng), ValidationError);
}

TEST_CASE("resource selection prefers the earliest ready", "[simulator]") {
    std::vector<ResourceProfile> profiles{
        synthetic::profile("r2", WeeklyCalendar::always(), {{"A", DistributionSpec::fixed(1)}}),
        synthetic::profile("r1", WeeklyCalendar::always(), {{"A", DistributionSpec::fixed(1)}}),
    };
    DiffResourceQueue q(profiles);
    q.set_ready_at(0, kMonday + 10 * kHour);
    q.set_ready_at(1, kMonday + 11 * kHour);
    CHECK(profiles[q.pop("A")].id == "r2");
    q.set_ready_at(1, kMonday + 10 * kHour);
    CHECK(profiles[q.pop("A")].id == "r1");  // tie goes to the smaller id
    CHECK_THROWS_AS(q.pop("B"), ValidationError);
    CHECK(q.view("A").size() == 2);
}

TEST_CASE("token game steps", "[simulator]") {
    Rng rng(1);
    const auto seq = sequential_graph({"A", "B"});
    TokenGame g(seq, {});
    auto st = g.new_case();
    const auto first = g.start(st, rng);
    REQUIRE(first.size() == 1);
    CHECK(seq.node(first[0]).label == "A");
    const auto next = g.complete(st, first[0], rng);
    REQUIRE(next.size() == 1);
    CHECK(seq.node(next[0]).label == "B");
    CHECK(g.complete(st, next[0], rng).empty());
    CHECK(st.finished());

    const auto par = synthetic::and_graph();
    TokenGame p(par, {});
    auto ps = p.new_case();
    const auto both = p.start(ps, rng);
    REQUIRE(both.size() == 2);
    CHECK(p.complete(ps, both[0], rng).empty());  // join waits for the other branch
    CHECK_FALSE(ps.finished());
    const auto c = p.complete(ps, both[1], rng);
    REQUIRE(c.size() == 1);
    CHECK(par.node(c[0]).label == "C");
}

TEST_CASE("exclusive split frequency follows the probabilities", "[simulator]") {
    const auto graph = synthetic::xor_graph();
    TokenGame g(graph, {{"toA", 0.7}, {"toB", 0.3}});
    Rng rng(2024);
    int a = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        auto st = g.new_case();
        const auto enabled = g.start(st, rng);
        if (graph.node(enabled.at(0)).label == "A") ++a;
    }
    CHECK(std::abs(a / double(n) - 0.7) <= 0.02);
}

TEST_CASE("single event without contention", "[simulator]") {
    const auto m = synthetic::one_task(DistributionSpec::fixed(600));
    const auto r = simulate(m, config(1, kMonday + 5));
    REQUIRE(r.log.traces.size() == 1);
    const auto& e = r.log.traces[0].events.at(0);
    CHECK(e.start == kMonday + 5);
    CHECK(e.complete == kMonday + 605);
    CHECK(e.enabled == kMonday + 5);
}

TEST_CASE("simultaneous cases queue for one resource", "[simulator]") {
    const auto m = synthetic::one_task(DistributionSpec::fixed(600));
    const auto r = simulate(m, config(2));
    REQUIRE(r.log.traces.size() == 2);
    const auto& second = r.log.traces[1].events.at(0);
    CHECK(second.enabled == kMonday);
    CHECK(second.start == *second.enabled + 600);
}

TEST_CASE("saturated single server makespan is n times service", "[simulator]") {
    const auto m = synthetic::one_task(DistributionSpec::fixed(300));
    const std::size_t n = 250;
    const auto r = simulate(m, config(n));
    Timestamp end = 0;
    for (const auto& t : r.log.traces) end = std::max(end, t.last_complete());
    CHECK(end - kMonday == static_cast<Seconds>(n) * 300);
}

TEST_CASE("same seed gives identical logs", "[simulator]") {
    const auto m = synthetic::round_trip_model();
    const auto a = simulate(m, config(200, kMonday, 9));
    const auto b = simulate(m, config(200, kMonday, 9));
    CHECK(write_log(a.log) == write_log(b.log));
    const auto c = simulate(m, config(200, kMonday, 10));
    CHECK(write_log(a.log) != write_log(c.log));
}

TEST_CASE("simulated logs respect calendars and never double-book", "[simulator][property]") {
    const auto m = synthetic::round_trip_model();
    const auto r = simulate(m, config(300, kMonday + 3 * kHour, 77));
    CHECK(r.report.completed + r.report.aborted == 300);
    const auto profiles = by_id(m);
    std::map<std::string, std::vector<std::pair<Timestamp, Timestamp>>> busy;
    for (const auto& t : r.log.traces) {
        for (const auto& e : t.events) {
            const auto& cal = profiles.at(e.resource)->avail;
            CHECK(cal.contains(e.start));
            CHECK(cal.contains(e.complete - 1));  // the last worked second
            CHECK(*e.enabled <= e.start);
            busy[e.resource].emplace_back(e.start, e.complete);
        }
    }
    for (auto& [res, iv] : busy) {
        std::sort(iv.begin(), iv.end());
        for (std::size_t i = 1; i < iv.size(); ++i) CHECK(iv[i - 1].second <= iv[i].first);
    }
}

TEST_CASE("successors are enabled when their predecessor completes", "[simulator]") {
    DifferentiatedSimModel m;
    m.graph = sequential_graph({"A", "B", "C"});
    const auto cal = synthetic::office(9, 17);
    m.profiles = {synthetic::profile("x", cal, {{"A", DistributionSpec::exponential(1800)}}),
                  synthetic::profile("y", cal, {{"B", DistributionSpec::exponential(1800)}}),
                  synthetic::profile("z", synthetic::office(13, 17), {{"C", DistributionSpec::exponential(900)}})};
    m.arrival = DistributionSpec::exponential(2400);
    m.arrival_calendar = cal;
    const auto r = simulate(m, config(100));
    for (const auto& t : r.log.traces) {
        REQUIRE(t.events.size() == 3);
        for (std::size_t i = 1; i < 3; ++i) CHECK(*t.events[i].enabled == t.events[i - 1].complete);
    }
}

TEST_CASE("kpis from the log match the simulator's own statistics", "[simulator]") {
    const auto m = synthetic::round_trip_model();
    const auto r = simulate(m, config(200, kMonday, 5));
    std::map<std::string, WeeklyCalendar> cals;
    for (const auto& p : m.profiles) cals[p.id] = p.avail;
    CHECK(compute_kpis(r.log, &cals) == r.kpis);
}

TEST_CASE("runaway loops abort cases", "[simulator]") {
    auto m = loop_model(1.0);
    auto c = config(3);
    c.max_events_per_case = 50;
    const auto r = simulate(m, c);
    CHECK(r.report.aborted == 3);
    CHECK(r.report.completed == 0);
    CHECK(r.log.traces.empty());
    CHECK(r.report.aborted_cases == std::vector<std::string>{"1", "2", "3"});

    const auto finite = simulate(loop_model(0.5), config(50));
    CHECK(finite.report.completed == 50);
    std::size_t longest = 0;
    for (const auto& t : finite.log.traces) longest = std::max(longest, t.events.size());
    CHECK(longest > 1);
}

TEST_CASE("invalid simulation requests", "[simulator]") {
    const auto m = synthetic::one_task(DistributionSpec::fixed(1));
    CHECK_THROWS_AS(simulate(m, config(0)), UsageError);
    auto broken = m;
    broken.profiles.clear();
    CHECK_THROWS_AS(simulate(broken, config(1)), ValidationError);
}

TEST_CASE("classic models simulate through conversion", "[simulator]") {
    ClassicSimModel c;
    c.graph = sequential_graph({"A", "B"});
    c.pools = {{"team", 2, synthetic::office(9, 17), 0.0}};
    c.alloc = {{"A", "team"}, {"B", "team"}};
    c.pt = {{"A", DistributionSpec::exponential(1200)}, {"B", DistributionSpec::uniform(300, 900)}};
    c.arrival = DistributionSpec::exponential(1800);
    c.arrival_calendar = synthetic::office(9, 17);
    const auto direct = simulate(c, config(100));
    const auto converted = simulate(classic_to_differentiated(c), config(100));
    CHECK(write_log(direct.log) == write_log(converted.log));
    std::set<std::string> used;
    for (const auto& t : direct.log.traces)
        for (const auto& e : t.events) used.insert(e.resource);
    CHECK(used == std::set<std::string>{"team_1", "team_2"});
}
