#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rearr/builder.hpp"

namespace rearr {

// One theorem check: the truncated iterated prefix sum for (sigma, k) against
// the prescribed target, with the aggregated truncation bound.
struct PrefixCheck {
    Permutation sigma;
    std::uint32_t k = 0;
    double measured = 0.0;
    double target = 0.0;
    double bound = 0.0;
    std::uint64_t terms = 0;
    bool complete = true;  // every slice the region needs is inside the truncation windows
    bool pass = false;
};

struct PrefixSum {
    double value = 0.0;
    double bound = 0.0;
    std::uint64_t terms = 0;
    bool complete = true;
};

// Iterated prefix sum of the rearrangement for summation order sigma,
// truncating the outermost variable at k. The summation region is the
// order-aligned truncated region: along the outermost axis of each
// (sub-)build only completed stages contribute, so every included slice is a
// settled hyperplane; inner axes run to the truncation windows. Innermost
// sums are taken in increasing index order with compensated accumulation.
PrefixSum iterated_prefix_sum(const Assignment& a, const Permutation& sigma, std::uint32_t k);

struct AuditReport {
    bool bijective = true;
    std::string bijective_msg;
    bool region_ok = true;
    std::string region_msg;
    bool slab_source_ok = true;
    std::string slab_source_msg;
    bool ok() const { return bijective && region_ok && slab_source_ok; }
};

AuditReport audit_assignment(const Assignment& a);

// Disjointness/coverage of the partition up to a horizon: every index <= H
// has a unique owner and enumeration is consistent with membership.
bool partition_coverage_audit(const IndexPartition& p, std::uint64_t horizon, std::string* msg = nullptr);

struct VerificationReport {
    std::vector<PrefixCheck> checks;
    AuditReport audit;
    double tolerance = 0.0;
    bool all_pass() const {
        if (!audit.ok()) return false;
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Runs iterated_prefix_sum for every sigma in Sym(n) and every k <= built
// depth, plus the structural audits. A check passes iff
// |measured - target| <= bound + 1e-9 * terms and bound <= tolerance.
VerificationReport verify_theorem(const Assignment& a, double tolerance);

struct ClaimCrossCheck {
    double numeric = 0.0;
    double bookkeeping = 0.0;
    double bound = 0.0;
    std::uint64_t terms = 0;
    bool agree = false;
};

// Re-sums the settled-mass series for (sigma, mu, d, l) numerically over the
// truncated region and compares with the exact bookkeeping value.
ClaimCrossCheck resum_claim_crosscheck(const Assignment& a, const Permutation& sigma, int mu, std::uint32_t d, int l);

} // namespace rearr
