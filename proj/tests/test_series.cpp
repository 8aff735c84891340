#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rearr/compensated.hpp"
#include "rearr/series.hpp"

using namespace rearr;

namespace {

// straight partial-sum oracle, no library machinery
void sign_sums(const SeriesSource& s, std::uint64_t horizon, double& pos, double& neg) {
    pos = 0.0;
    neg = 0.0;
    for (std::uint64_t m = 1; m <= horizon; ++m) {
        double a = s.term(m);
        if (a >= 0) pos += a;
        else neg += a;
    }
}

double partial_sum(const SeriesSource& s, std::uint64_t M) {
    CompensatedSum acc;
    for (std::uint64_t m = 1; m <= M; ++m) acc += s.term(m);
    return acc.value();
}

} // namespace

TEST_CASE("alternating harmonic term formula") {
    auto s = alternating_harmonic();
    CHECK(s.term(1) == 1.0);
    CHECK(s.term(2) == -0.5);
    CHECK(s.term(1000) == -1.0 / 1000.0);
    // deterministic: repeated evaluation is bit-identical
    for (std::uint64_t m : {3ull, 17ull, 999983ull}) CHECK(s.term(m) == s.term(m));
}

TEST_CASE("alternating rsqrt term formula") {
    auto s = alternating_rsqrt();
    CHECK(s.term(1) == 1.0);
    CHECK(s.term(4) == -0.5);
    CHECK(s.term(9) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("witness succeeds on the alternating harmonic series") {
    auto s = alternating_harmonic();
    auto r = witness_convergability(s, 100000, 5.0);
    REQUIRE(r.ok());
    double pos, neg;
    sign_sums(s, 100000, pos, neg);
    CHECK(r.witness->pos_sum == doctest::Approx(pos).epsilon(1e-12));
    CHECK(r.witness->neg_sum == doctest::Approx(neg).epsilon(1e-12));
    // frozen oracle values (direct partial sums over 1e5 terms)
    CHECK(r.witness->pos_sum == doctest::Approx(6.391644).epsilon(1e-5));
    CHECK(r.witness->neg_sum == doctest::Approx(-5.698502).epsilon(1e-5));
    CHECK(r.witness->pos_sum >= 0.0);
    CHECK(r.witness->neg_sum <= 0.0);
    // last decile of the horizon starts at 90001
    CHECK(r.witness->max_tail_term == doctest::Approx(1.0 / 90001.0).epsilon(1e-12));
}

TEST_CASE("witness fails on an absolutely convergent series") {
    auto r = witness_convergability(inverse_square(), 100000, 5.0);
    CHECK(!r.ok());
    bool neg_failed = false;
    for (auto c : r.failed) neg_failed = neg_failed || c == WitnessCondition::NegDivergence;
    CHECK(neg_failed);
}

TEST_CASE("witness fails when the horizon cannot reach the bound") {
    auto r = witness_convergability(alternating_harmonic(), 10, 100.0);
    CHECK(!r.ok());
    bool pos_failed = false;
    for (auto c : r.failed) pos_failed = pos_failed || c == WitnessCondition::PosDivergence;
    CHECK(pos_failed);
}

TEST_CASE("plain partial sums approach log 2 within 1/M") {
    auto s = alternating_harmonic();
    // high-depth oracle: averaging consecutive partial sums kills the O(1/M) term
    double oracle = 0.5 * (partial_sum(s, 10000000) + partial_sum(s, 10000001));
    CHECK(std::fabs(oracle - 0.6931471805599453) < 1e-10);
    for (std::uint64_t M : {100ull, 1000ull, 10000ull}) {
        CHECK(std::fabs(partial_sum(s, M) - oracle) <= 1.0 / static_cast<double>(M));
    }
}

TEST_CASE("witness success is monotone in the horizon on built-in sources") {
    for (auto src : {alternating_harmonic(), alternating_rsqrt()}) {
        double prev_tail = 1e300;
        bool succeeded = false;
        for (std::uint64_t H : {100000ull, 200000ull, 400000ull}) {
            auto r = witness_convergability(src, H, 3.0);
            CHECK(r.scanned.max_tail_term <= prev_tail);
            prev_tail = r.scanned.max_tail_term;
            if (succeeded) CHECK(r.ok());
            succeeded = succeeded || r.ok();
        }
        CHECK(succeeded);
    }
}

TEST_CASE("inline sources are finite") {
    auto s = inline_series({1.0, -0.5, 0.25});
    CHECK(s.term(3) == 0.25);
    CHECK_THROWS(s.term(4));
    auto r = witness_convergability(s, 10, 0.1);
    CHECK(r.scanned.pos_sum == doctest::Approx(1.25));
}

TEST_CASE("witness rejects bad arguments") {
    CHECK_THROWS(witness_convergability(alternating_harmonic(), 0, 1.0));
    CHECK_THROWS(witness_convergability(alternating_harmonic(), 10, 0.0));
}
