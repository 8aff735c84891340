#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "rearr/partition.hpp"

namespace rearr {

// Outcome of one greedy targeting run. For finite targets, error_bound is the
// magnitude of the term appended at the final target crossing; between that
// crossing and budget exhaustion the running sum stays within the bound of the
// target, so |achieved - target| <= 2 * error_bound always holds.
struct ConvergenceReport {
    double achieved = 0.0;
    double error_bound = std::numeric_limits<double>::infinity();
    std::uint64_t crossings = 0;
    std::uint64_t used = 0;
    bool starved = false;
    int starved_sign = 0;  // +1 positives ran out, -1 negatives
    double target = 0.0;
    bool infinite_mode = false;
    double last_threshold = 0.0;  // infinite targets: last threshold cleared
};

struct GreedyResult {
    std::vector<std::uint64_t> ordering;  // original indices in emission order
    std::vector<double> values;           // a_m aligned with ordering
    ConvergenceReport report;
};

// Classic greedy rearrangement toward a finite target: append positive terms
// while sum <= target, negative terms while sum >= target; equality never
// switches the phase. Terms of each sign are consumed in increasing original
// index order.
GreedyResult greedy_to_value(TermCursor positives, TermCursor negatives, double target, std::uint64_t budget);

// Escalating-threshold divergence: push same-sign terms until the running sum
// strictly clears the next threshold (+-1, +-2, ...), then append exactly one
// opposite-sign term so that every term is eventually used.
GreedyResult greedy_to_infinity(TermCursor positives, TermCursor negatives, int sign, std::uint64_t budget);

} // namespace rearr
