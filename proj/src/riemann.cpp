#include "rearr/riemann.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace rearr {

GreedyResult greedy_to_value(TermCursor positives, TermCursor negatives, double target, std::uint64_t budget) {
    if (budget < 1) throw std::invalid_argument("greedy_to_value: budget must be >= 1");
    GreedyResult r;
    r.report.target = target;
    r.ordering.reserve(budget);
    r.values.reserve(budget);

    double sum = 0.0;
    bool pos_phase = (sum <= target);
    while (r.report.used < budget) {
        auto e = pos_phase ? positives.pop() : negatives.pop();
        if (!e) {
            r.report.starved = true;
            r.report.starved_sign = pos_phase ? +1 : -1;
            break;
        }
        sum += e->second;
        r.ordering.push_back(e->first);
        r.values.push_back(e->second);
        ++r.report.used;
        if (pos_phase && sum > target) {
            // crossing bound: the overshoot cannot exceed the appended term
            assert(sum - target <= std::fabs(e->second) * (1 + 1e-12) + 1e-300);
            r.report.error_bound = std::fabs(e->second);
            ++r.report.crossings;
            pos_phase = false;
        } else if (!pos_phase && sum < target) {
            assert(target - sum <= std::fabs(e->second) * (1 + 1e-12) + 1e-300);
            r.report.error_bound = std::fabs(e->second);
            ++r.report.crossings;
            pos_phase = true;
        }
    }
    r.report.achieved = sum;
    return r;
}

GreedyResult greedy_to_infinity(TermCursor positives, TermCursor negatives, int sign, std::uint64_t budget) {
    if (budget < 1) throw std::invalid_argument("greedy_to_infinity: budget must be >= 1");
    if (sign != +1 && sign != -1) throw std::invalid_argument("greedy_to_infinity: sign must be +1 or -1");
    GreedyResult r;
    r.report.infinite_mode = true;
    r.ordering.reserve(budget);
    r.values.reserve(budget);

    double sum = 0.0;
    double threshold = 1.0;
    bool append_opposite = false;
    while (r.report.used < budget) {
        auto e = append_opposite ? (sign > 0 ? negatives.pop() : positives.pop())
                                 : (sign > 0 ? positives.pop() : negatives.pop());
        if (!e) {
            r.report.starved = true;
            r.report.starved_sign = (append_opposite ? -sign : sign);
            break;
        }
        sum += e->second;
        r.ordering.push_back(e->first);
        r.values.push_back(e->second);
        ++r.report.used;
        if (append_opposite) {
            append_opposite = false;
            continue;
        }
        if ((sign > 0 && sum > threshold) || (sign < 0 && sum < -threshold)) {
            r.report.last_threshold = sign * threshold;
            r.report.error_bound = threshold;
            ++r.report.crossings;
            threshold += 1.0;
            append_opposite = true;
        }
    }
    r.report.achieved = sum;
    return r;
}

} // namespace rearr
