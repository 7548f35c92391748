// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include "bpsim/discovery.hpp"
#include "bpsim/event_log.hpp"
#include "bpsim/fitting.hpp"
#include "bpsim/metrics.hpp"
#include "bpsim/simulator.hpp"
#include "bpsim/tuning.hpp"

#include "../support/oracles.hpp"
#include "../support/synthetic.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace bpsim;
using synthetic::kMonday;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

SimConfig config(std::size_t cases, Timestamp start, std::uint64_t seed) {
    SimConfig c;
    c.cases = cases;
    c.start_at = start;
    c.seed = seed;
    return c;
}

Timestamp first_start(const EventLog& log) {
    Timestamp t = log.traces.front().first_start();
    for (const auto& tr : log.traces) t = std::min(t, tr.first_start());
    return t;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Shared by criteria 1 and 2: ground truth log, both discovered models and
// five paired re-simulations.
struct RoundTrip {
    std::vector<double> ct_dp, ct_np, wr_dp, wr_np;
    double seconds = 0.0;
};

const RoundTrip& round_trip() {
    static const RoundTrip result = [] {
        const auto begin = std::chrono::steady_clock::now();
        RoundTrip rt;
        const auto truth = synthetic::round_trip_model();
        const auto real = simulate(truth, config(1000, kMonday, 2024)).log;

        auto discover = [&](DiscoveryMode mode) {
            GridSpec grid;
            grid.confidences = {0.1, 0.2, 0.3, 0.4, 0.5};
            grid.supports = {0.7};
            grid.participations = {0.4};
            grid.mode = mode;
            grid.seed = 7;
            return grid_search(real, truth.graph, grid).discovery.model;
        };
        const auto dp = discover(DiscoveryMode::Differentiated);
        const auto np = discover(DiscoveryMode::Undifferentiated);

        const auto cases = real.traces.size();
        const auto start = first_start(real);
        for (std::uint64_t seed = 101; seed <= 105; ++seed) {
            const auto a = simulate(dp, config(cases, start, seed)).log;
            const auto b = simulate(np, config(cases, start, seed)).log;
            rt.ct_dp.push_back(emd_ct(real, a));
            rt.ct_np.push_back(emd_ct(real, b));
            rt.wr_dp.push_back(emd_wr(real, a));
            rt.wr_np.push_back(emd_wr(real, b));
        }
        rt.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
        return rt;
    }();
    return result;
}

double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

Outcome criterion_1() {
    const auto& rt = round_trip();
    int wins = 0;
    for (std::size_t i = 0; i < rt.ct_dp.size(); ++i) wins += rt.ct_dp[i] < rt.ct_np[i] ? 1 : 0;
    const bool pass = wins >= 4 && rt.seconds < 120.0;
    return {pass, fmt("EMD-CT differentiated < baseline in %d/5 runs (means %.2f vs %.2f), %.1f s", wins,
                      mean(rt.ct_dp), mean(rt.ct_np), rt.seconds)};
}

Outcome criterion_2() {
    const auto& rt = round_trip();
    const double dp = mean(rt.wr_dp), np = mean(rt.wr_np);
    return {dp <= np, fmt("mean EMD-WR differentiated %.3f <= baseline %.3f", dp, np)};
}

Outcome criterion_3() {
    std::mt19937_64 gen(2718);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + gen() % 12;
        std::vector<double> a(n), b(n);
        for (auto& x : a) x = u(gen) < 0.3 ? 0.0 : u(gen);
        for (auto& x : b) x = u(gen) < 0.3 ? 0.0 : u(gen);
        a[gen() % n] += 0.25;
        b[gen() % n] += 0.25;
        Histogram ha, hb;
        ha.mass = a;
        hb.mass = b;
        worst = std::max(worst, std::abs(emd_1d(ha, hb) - oracle::transport(a, b)));
    }
    return {worst <= 1e-9, fmt("200 random pairs, max |emd - transport| = %.3g", worst)};
}

Outcome criterion_4() {
    // Three resources, one per known calendar, each serving its own branch.
    DifferentiatedSimModel m;
    m.graph = synthetic::and_graph();
    const WeeklyCalendar mon{{Weekday::Monday, 9 * kHour, 17 * kHour}};
    const auto full = synthetic::office(9, 17);
    const auto part = synthetic::office(9, 13);
    m.profiles = {synthetic::profile("monday", mon, {{"A", DistributionSpec::exponential(900)}}),
                  synthetic::profile("office", full, {{"B", DistributionSpec::exponential(1200)}}),
                  synthetic::profile("part", part, {{"C", DistributionSpec::exponential(600)}})};
    m.arrival = DistributionSpec::exponential(4 * kHour);
    m.arrival_calendar = WeeklyCalendar::always();
    const auto log = simulate(m, config(400, kMonday, 4)).log;
    const std::map<std::string, WeeklyCalendar> truth{{"monday", mon}, {"office", full}, {"part", part}};

    const auto index = build_index(log);
    std::size_t fewest = SIZE_MAX;
    for (const auto& [r, evs] : index.by_resource) fewest = std::min(fewest, evs.size());

    // Independent support count: a candidate is covered when every minute
    // of its granule is inside the calendar.
    auto covered_share = [](const WeeklyCalendar& cal, const std::vector<const Event*>& evs) {
        std::size_t total = 0, covered = 0;
        for (const Event* e : evs)
            for (Timestamp t : {e->start, e->complete}) {
                const Timestamp g = t - t % kHour;
                bool in = true;
                for (Timestamp s = g; s < g + kHour; s += kMinute) in = in && cal.contains(s);
                ++total;
                covered += in ? 1 : 0;
            }
        return static_cast<double>(covered) / static_cast<double>(total);
    };

    bool pass = fewest >= 200;
    std::ostringstream detail;
    detail << "min events/resource " << fewest;
    for (double supp : {0.5, 0.7, 0.9}) {
        DiscoveryParams p;
        p.participation = 0.0;
        p.confidence = 0.1;
        p.support = supp;
        const auto res = discover_resource_profiles(log, m.graph, p);
        for (const auto& [id, cal] : truth) {
            const auto* prof = res.model.find_profile(id);
            if (!prof) {
                pass = false;
                detail << "; " << id << " missing";
                continue;
            }
            std::size_t outside = 0;
            for (const auto& e : prof->avail.entries()) outside += cal.covers(e) ? 0 : 1;
            const double s = covered_share(prof->avail, index.by_resource.at(id));
            if (outside > 0 || s + 1e-12 < supp) {
                pass = false;
                detail << "; supp " << supp << " " << id << ": " << outside << " foreign entries, support " << s;
            }
        }
    }
    detail << "; dSupp 0.5/0.7/0.9: " << (pass ? "no foreign granules, support met" : "violations");
    return {pass, detail.str()};
}

Outcome criterion_5() {
    struct Case {
        DistributionSpec spec;
        const char* name;
    };
    bool pass = true;
    std::ostringstream detail;
    std::uint64_t seed = 50;
    for (const auto& c : {Case{DistributionSpec::fixed(300), "fixed(300)"},
                          Case{DistributionSpec::exponential(600), "exponential(600)"},
                          Case{DistributionSpec::uniform(100, 200), "uniform(100,200)"}}) {
        Rng rng(seed++);
        std::vector<double> xs(10000);
        for (auto& x : xs) x = sample(c.spec, rng);
        const auto fit = best_fitted_distribution(xs).spec;
        const bool ok = fit.family == c.spec.family && std::abs(fit.mean() - c.spec.mean()) <= 0.1 * c.spec.mean();
        pass = pass && ok;
        detail << c.name << " -> " << family_name(fit.family) << " mean " << fit.mean() << (ok ? "" : " (wrong)")
               << "; ";
    }
    return {pass, detail.str()};
}

Outcome criterion_6() {
    std::ostringstream detail;
    bool pass = true;
    auto fail = [&](const std::string& what) {
        pass = false;
        detail << what << "; ";
    };

    const auto m = synthetic::round_trip_model();
    const auto a = simulate(m, config(500, kMonday, 31));
    const auto b = simulate(m, config(500, kMonday, 31));
    if (write_log(a.log) != write_log(b.log)) fail("determinism broken");
    if (a.report.completed + a.report.aborted != 500) fail("conservation broken");

    std::map<std::string, const ResourceProfile*> prof;
    for (const auto& p : m.profiles) prof[p.id] = &p;
    std::map<std::string, std::vector<std::pair<Timestamp, Timestamp>>> busy;
    std::size_t outside = 0;
    for (const auto& t : a.log.traces)
        for (const auto& e : t.events) {
            const auto& cal = prof.at(e.resource)->avail;
            // start inside; the last worked second (end is exclusive) inside
            if (!cal.contains(e.start) || (e.complete > e.start && !cal.contains(e.complete - 1))) ++outside;
            busy[e.resource].emplace_back(e.start, e.complete);
        }
    if (outside) fail(fmt("%zu events outside calendars", outside));
    std::size_t overlaps = 0;
    for (auto& [r, iv] : busy) {
        std::sort(iv.begin(), iv.end());
        for (std::size_t i = 1; i < iv.size(); ++i) overlaps += iv[i - 1].second > iv[i].first ? 1 : 0;
    }
    if (overlaps) fail(fmt("%zu overlapping executions", overlaps));

    const std::size_t n = 400;
    const Seconds s = 450;
    const auto sat = simulate(synthetic::one_task(DistributionSpec::fixed(s)), config(n, kMonday, 1));
    Timestamp end = kMonday;
    for (const auto& t : sat.log.traces) end = std::max(end, t.last_complete());
    if (end - kMonday != static_cast<Seconds>(n) * s) fail("saturation makespan differs from n*s");

    detail << "determinism, conservation, containment, no overlap, makespan " << (end - kMonday) << " s";
    return {pass, detail.str()};
}

Outcome criterion_7() {
    const auto m = synthetic::performance_model();
    std::size_t resources = m.profiles.size();
    const auto begin = std::chrono::steady_clock::now();
    const auto r = simulate(m, config(1000, kMonday, 3));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    const bool pass = secs <= 12.5 && r.report.completed == 1000 && resources == 34;
    return {pass, fmt("1000 cases, 15 activities, %zu resources in %.3f s", resources, secs)};
}

Outcome criterion_8() {
    ClassicSimModel c;
    c.graph = synthetic::xor_graph();
    c.pools = {{"desk", 3, synthetic::office(9, 17), 20.0}, {"lab", 2, synthetic::office(8, 12), 35.0}};
    c.alloc = {{"A", "desk"}, {"B", "lab"}};
    c.pt = {{"A", DistributionSpec::exponential(1500)}, {"B", DistributionSpec::gamma(2.0, 600)}};
    c.bp = {{"toA", 0.65}, {"toB", 0.35}};
    c.arrival = DistributionSpec::exponential(900);
    c.arrival_calendar = synthetic::office(8, 18);

    // The differentiated encoding written out by hand.
    DifferentiatedSimModel d;
    d.graph = c.graph;
    for (int i = 1; i <= 3; ++i) {
        auto p = synthetic::profile("desk_" + std::to_string(i), synthetic::office(9, 17),
                                    {{"A", DistributionSpec::exponential(1500)}});
        p.cost_per_hour = 20.0;
        d.profiles.push_back(p);
    }
    for (int i = 1; i <= 2; ++i) {
        auto p = synthetic::profile("lab_" + std::to_string(i), synthetic::office(8, 12),
                                    {{"B", DistributionSpec::gamma(2.0, 600)}});
        p.cost_per_hour = 35.0;
        d.profiles.push_back(p);
    }
    d.bp = c.bp;
    d.arrival = c.arrival;
    d.arrival_calendar = c.arrival_calendar;

    bool pass = true;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto via = write_log(simulate(classic_to_differentiated(c), config(500, kMonday, seed)).log);
        const auto direct = write_log(simulate(d, config(500, kMonday, seed)).log);
        pass = pass && via == direct && !via.empty();
    }
    return {pass, "converted classic model and hand-written encoding, 3 seeds x 500 cases, byte comparison"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 round-trip EMD-CT ordering", criterion_1},
        {"2 round-trip EMD-WR ordering", criterion_2},
        {"3 EMD matches transport oracle", criterion_3},
        {"4 calendar mining correctness", criterion_4},
        {"5 distribution fit recovery", criterion_5},
        {"6 simulator invariants", criterion_6},
        {"7 performance envelope", criterion_7},
        {"8 conversion equivalence", criterion_8},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
