#include <catch_amalgamated.hpp>

#include "bpsim/error.hpp"
#include "bpsim/metrics.hpp"

#include "../support/oracles.hpp"
#include "../support/synthetic.hpp"

#include <random>

using namespace bpsim;
using Catch::Approx;
using synthetic::kMonday;

namespace {

Histogram hist(std::vector<double> mass, std::int64_t first = 0) {
    Histogram h;
    h.first_bin = first;
    h.mass = std::move(mass);
    return h;
}

/// One single-event trace per cycle time, cases one day apart.
EventLog log_of(const std::vector<Seconds>& cycles, Seconds shift = 0) {
    EventLog log;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const Timestamp s = kMonday + static_cast<Timestamp>(i) * kDay + 9 * kHour + shift;
        log.traces.push_back({std::to_string(i), {{std::to_string(i), "A", "r", s, s, s + cycles[i]}}});
    }
    return log;
}

std::vector<double> random_masses(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::bernoulli_distribution zero(0.3);
    std::vector<double> m(n);
    for (auto& x : m) x = zero(gen) ? 0.0 : u(gen);
    m[gen() % n] += 0.5;  // at least one positive bin
    return m;
}

}  // namespace

TEST_CASE("emd examples", "[metrics]") {
    CHECK(emd_1d(hist({1, 2, 3}), hist({1, 2, 3})) == 0.0);
    CHECK(emd_1d(hist({1}), hist({0, 0, 0, 0, 1})) == 4.0);
    CHECK(emd_1d(hist({0.5, 0.5, 0}), hist({0, 0.5, 0.5})) == Approx(1.0));
    // bins below zero
    CHECK(emd_1d(hist({1}, -3), hist({1}, 2)) == 5.0);
    // scale does not matter when normalized
    CHECK(emd_1d(hist({2, 2}), hist({0, 10})) == Approx(0.5));
    CHECK(emd_1d(hist({2, 2}), hist({0, 4}), Normalization::Raw) == Approx(2.0));
    CHECK_THROWS_AS(emd_1d(hist({0, 0}), hist({1})), UsageError);
    CHECK_THROWS_AS(emd_1d(hist({}), hist({1})), UsageError);
    Histogram wide = hist({1});
    wide.width = 2.0;
    CHECK_THROWS_AS(emd_1d(wide, hist({1})), UsageError);
}

TEST_CASE("emd matches min-cost transport", "[metrics][oracle]") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + gen() % 12;
        const auto a = random_masses(gen, n);
        const auto b = random_masses(gen, n);
        CHECK(std::abs(emd_1d(hist(a), hist(b)) - oracle::transport(a, b)) <= 1e-9);
    }
}

TEST_CASE("emd is a metric on normalized histograms", "[metrics][property]") {
    std::mt19937_64 gen(37);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + gen() % 12;
        const auto a = hist(random_masses(gen, n));
        const auto b = hist(random_masses(gen, n));
        const auto c = hist(random_masses(gen, n));
        const double ab = emd_1d(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab == Approx(emd_1d(b, a)).margin(1e-12));
        CHECK(emd_1d(a, a) == 0.0);
        CHECK(emd_1d(a, c) <= ab + emd_1d(b, c) + 1e-12);
    }
}

TEST_CASE("cycle-time emd", "[metrics]") {
    std::vector<Seconds> cycles;
    for (int i = 0; i <= 100; ++i) cycles.push_back(3600 + 36 * i);  // width 36 s, one value per bin
    const auto real = log_of(cycles);
    CHECK(emd_ct(real, real) == 0.0);

    // shifting every value by one bin width moves all mass one bin
    std::vector<Seconds> shifted = cycles;
    for (auto& c : shifted) c += 36;
    CHECK(emd_ct(real, log_of(shifted)) == Approx(1.0).margin(0.02));

    // values above the real range land in overflow bins
    const auto far = log_of({3600 + 36 * 300});
    CHECK(emd_ct(log_of({3600, 3600 + 3600}), far) > 100.0);

    // a constant real log still bins with a nonzero width
    CHECK(emd_ct(log_of({60, 60}), log_of({60})) == 0.0);
    CHECK(emd_ct(log_of({60, 60}), log_of({62})) == Approx(2.0));
    CHECK_THROWS_AS(emd_ct(EventLog{}, real), UsageError);
}

TEST_CASE("cycle-time emd is symmetric for logs on the same range", "[metrics][property]") {
    std::mt19937_64 gen(41);
    std::uniform_int_distribution<Seconds> c(100, 10000);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Seconds> a{100, 10000}, b{100, 10000};
        for (int i = 0; i < 30; ++i) {
            a.push_back(c(gen));
            b.push_back(c(gen));
        }
        CHECK(emd_ct(log_of(a), log_of(b)) == Approx(emd_ct(log_of(b), log_of(a))).margin(1e-9));
    }
}

TEST_CASE("work-rhythm emd", "[metrics]") {
    const auto real = log_of({600, 1200, 1800, 600, 300});
    CHECK(emd_wr(real, real) == 0.0);
    // every timestamp one hour later: all mass moves one bin
    CHECK(emd_wr(real, log_of({600, 1200, 1800, 600, 300}, kHour)) == Approx(1.0));
    CHECK(emd_wr(real, log_of({600, 1200}, kHour)) ==
          Approx(emd_wr(log_of({600, 1200}, kHour), real)).margin(1e-12));

    // weekday-only real log vs a simulated log with weekend activity
    EventLog weekend;
    for (int d = 0; d < 7; ++d) {
        const Timestamp s = kMonday + d * kDay + 9 * kHour;
        weekend.traces.push_back({std::to_string(d), {{std::to_string(d), "A", "r", s, s, s + 600}}});
    }
    CHECK(emd_wr(real, weekend, RhythmMode::HourOfWeek) > 0.0);
    // the same hour on a later week is the same weekly slot
    CHECK(emd_wr(real, log_of({600, 1200, 1800, 600, 300}, kWeek), RhythmMode::HourOfWeek) == 0.0);
}

TEST_CASE("comparison table rows", "[metrics]") {
    const auto real = log_of({600, 1200, 1800});
    const auto other = log_of({1200, 1800, 2400}, 2 * kHour);
    const auto table = compare_runs(real, {{"same", &real}, {"other", &other}});
    REQUIRE(table.rows.size() == 2);
    const auto& same = table.rows[0];
    CHECK(same.label == "same");
    CHECK(same.emd_ct == 0.0);
    CHECK(same.emd_wr == 0.0);
    CHECK(same.delta_mean_cycle == 0.0);
    const auto& diff = table.rows[1];
    CHECK(diff.emd_ct >= same.emd_ct);
    CHECK(diff.emd_wr >= same.emd_wr);
    CHECK(diff.delta_mean_cycle == Approx(600.0));
    CHECK_THROWS_AS(compare_runs(real, {}), UsageError);

    const auto csv = to_csv(table);
    CHECK(csv.rfind("label,emd_ct,emd_wr,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(to_json(table)["normalization"] == "normalized");
}
