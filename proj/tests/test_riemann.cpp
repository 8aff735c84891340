#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "rearr/riemann.hpp"

using namespace rearr;

namespace {

TermCursor harmonic_positives() {
    return TermCursor::over_stream(positive_stream(std::make_shared<SeriesSource>(alternating_harmonic())), +1.0);
}
TermCursor harmonic_negatives() {
    return TermCursor::over_stream(negative_stream(std::make_shared<SeriesSource>(alternating_harmonic())), -1.0);
}

// independent check of the crossing invariant: replay the emitted ordering
void check_crossings(const GreedyResult& r, double target) {
    double sum = 0.0;
    bool pos_phase = 0.0 <= target;
    for (double v : r.values) {
        sum += v;
        if (pos_phase && sum > target) {
            CHECK(sum - target <= std::fabs(v) + 1e-15);
            pos_phase = false;
        } else if (!pos_phase && sum < target) {
            CHECK(target - sum <= std::fabs(v) + 1e-15);
            pos_phase = true;
        }
    }
    CHECK(sum == doctest::Approx(r.report.achieved).epsilon(1e-15));
}

} // namespace

TEST_CASE("greedy trace: target 0.5, budget 5") {
    auto r = greedy_to_value(harmonic_positives(), harmonic_negatives(), 0.5, 5);
    // equality with the target keeps the current phase: after 1, -1/2 the sum
    // sits exactly on the target and the negative phase continues
    REQUIRE(r.ordering.size() == 5);
    CHECK(r.values[0] == 1.0);
    CHECK(r.values[1] == -0.5);
    CHECK(r.values[2] == -0.25);
    CHECK(r.values[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
    CHECK(r.values[4] == doctest::Approx(-1.0 / 6.0).epsilon(1e-16));
    CHECK(r.ordering == std::vector<std::uint64_t>{1, 2, 4, 3, 6});
}

TEST_CASE("greedy reaches 0.5 within 1e-3 on budget 1e4") {
    auto r = greedy_to_value(harmonic_positives(), harmonic_negatives(), 0.5, 10000);
    CHECK(std::fabs(r.report.achieved - 0.5) <= 1e-3);
    CHECK(r.report.used == 10000);
    CHECK(r.report.crossings >= 1);
    CHECK(std::fabs(r.report.achieved - 0.5) <= 2.0 * r.report.error_bound);
    check_crossings(r, 0.5);
}

TEST_CASE("greedy reaches log 2 within 1e-2 on budget 1e3") {
    auto r = greedy_to_value(harmonic_positives(), harmonic_negatives(), 0.6931471805599453, 1000);
    CHECK(std::fabs(r.report.achieved - 0.6931) <= 1e-2);
}

TEST_CASE("escalating thresholds toward +infinity") {
    auto r = greedy_to_infinity(harmonic_positives(), harmonic_negatives(), +1, 8);
    // clears +1 after 1, 1/3 then takes exactly one negative
    REQUIRE(r.values.size() == 8);
    CHECK(r.values[0] == 1.0);
    CHECK(r.values[1] == doctest::Approx(1.0 / 3.0));
    CHECK(r.values[2] == -0.5);
    CHECK(r.values[3] == doctest::Approx(0.2));
}

TEST_CASE("escalating thresholds toward -infinity") {
    auto r = greedy_to_infinity(harmonic_positives(), harmonic_negatives(), -1, 8);
    // -1/2 -1/4 -1/6 -1/8 already sits strictly below -1, then one positive
    REQUIRE(r.values.size() == 8);
    CHECK(r.values[0] == -0.5);
    CHECK(r.values[1] == -0.25);
    CHECK(r.values[2] == doctest::Approx(-1.0 / 6.0));
    CHECK(r.values[3] == -0.125);
    CHECK(r.values[4] == 1.0);
    CHECK(r.values[5] == doctest::Approx(-0.1));
    CHECK(r.report.last_threshold == -1.0);
}

TEST_CASE("budget 1e4 drives the sum past 3") {
    auto r = greedy_to_infinity(harmonic_positives(), harmonic_negatives(), +1, 10000);
    CHECK(r.report.achieved >= 3.0);
    CHECK(r.report.error_bound >= 3.0);  // last threshold cleared
    CHECK(r.report.used == 10000);
}

TEST_CASE("the emitted ordering is injective and stays inside the input set") {
    auto part = IndexPartition::for_source(std::make_shared<SeriesSource>(alternating_rsqrt()));
    auto r = greedy_to_value(part->positives(2), part->negatives(2), 0.4, 2000);
    std::set<std::uint64_t> seen;
    for (std::uint64_t m : r.ordering) {
        CHECK(seen.insert(m).second);
        CHECK(part->membership(m).value() == 2);
    }
}

TEST_CASE("growing budgets consume growing prefixes of both signs") {
    std::uint64_t prev_pos = 0, prev_neg = 0;
    for (std::uint64_t budget : {100ull, 1000ull, 10000ull}) {
        auto pos = harmonic_positives();
        auto neg = harmonic_negatives();
        auto r = greedy_to_value(std::move(pos), std::move(neg), 0.5, budget);
        std::uint64_t np = 0, nn = 0;
        for (double v : r.values) (v >= 0 ? np : nn)++;
        CHECK(np > prev_pos);
        CHECK(nn > prev_neg);
        prev_pos = np;
        prev_neg = nn;
    }
}

TEST_CASE("starvation is reported, not fatal") {
    auto src = std::make_shared<SeriesSource>(inline_series({1.0, -0.5, 0.25, -0.125}));
    auto r = greedy_to_value(TermCursor::over_stream(positive_stream(src), +1.0),
                             TermCursor::over_stream(negative_stream(src), -1.0), 10.0, 100);
    CHECK(r.report.starved);
    CHECK(r.report.starved_sign == +1);
    CHECK(r.report.used == 2);  // both positives consumed; the phase never switched
}

TEST_CASE("greedy rejects a zero budget") {
    CHECK_THROWS(greedy_to_value(harmonic_positives(), harmonic_negatives(), 0.5, 0));
    CHECK_THROWS(greedy_to_infinity(harmonic_positives(), harmonic_negatives(), +2, 10));
}
