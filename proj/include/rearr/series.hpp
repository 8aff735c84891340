#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rearr {

// How the signs of a_m are laid out. Built-in alternating sources put the
// non-negative terms on odd m, which lets the partition machinery map sign
// positions to indices in O(1) instead of scanning.
enum class SignPattern {
    OddPositive,  // a_m >= 0 iff m odd
    AllPositive,  // a_m >= 0 for all m
    Generic,      // no structure; scan
};

struct SeriesSource {
    std::string name;
    std::function<double(std::uint64_t)> term;  // m >= 1 -> a_m
    SignPattern pattern = SignPattern::Generic;
    std::optional<std::uint64_t> length;        // finite inline sources only
};

SeriesSource alternating_harmonic();
// a_m = (-1)^(m+1)/sqrt(m). Slower decay than the harmonic series, which makes
// every index set of the partition carry usable mass at desk-scale budgets;
// the default input for multi-dimensional builds.
SeriesSource alternating_rsqrt();
SeriesSource inverse_square();  // a_m = 1/m^2 (not conditionally convergable)
SeriesSource inline_series(std::vector<double> terms, std::string name = "inline");

SeriesSource source_by_name(const std::string& name);

struct ConvergabilityWitness {
    std::uint64_t horizon = 0;
    double pos_sum = 0.0;
    double neg_sum = 0.0;
    double max_tail_term = 0.0;
};

enum class WitnessCondition { PosDivergence, NegDivergence, TailDecay };

struct WitnessResult {
    std::optional<ConvergabilityWitness> witness;  // set on success
    ConvergabilityWitness scanned;                 // raw sums regardless of outcome
    std::vector<WitnessCondition> failed;
    bool ok() const { return witness.has_value(); }
};

// Finite-horizon proxy for conditional convergability: succeeds iff
// pos_sum >= bound, neg_sum <= -bound and max |a_m| over the last decile of
// the horizon is <= 1/bound. Cannot prove divergence, only witness it.
WitnessResult witness_convergability(const SeriesSource& source, std::uint64_t horizon, double bound);

} // namespace rearr
