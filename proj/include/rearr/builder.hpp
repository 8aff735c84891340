#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rearr/partition.hpp"
#include "rearr/permutation.hpp"
#include "rearr/riemann.hpp"
#include "rearr/targets.hpp"

namespace rearr {

struct MissingStage : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DepthExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncationBudget {
    std::uint32_t depth = 4;            // stages d = 0..depth at the top level
    std::uint64_t slab_budget = 20000;  // terms consumed per 1-D leaf
    // recursion_depths[q] overrides the stage depth of dim-q sub-builds
    // (q = 2..n-1); unset dims reuse the top depth.
    std::map<int, std::uint32_t> recursion_depths;

    std::uint32_t depth_for_dim(int q) const {
        auto it = recursion_depths.find(q);
        return it == recursion_depths.end() ? depth : it->second;
    }
};

// 1-D slab content: a greedy run over one partition child.
struct LeafRecord {
    double target = 0.0;  // exact bookkeeping residual target
    std::vector<std::uint64_t> ordering;
    std::vector<double> values;
    ConvergenceReport report;

    std::uint64_t size() const { return ordering.size(); }
};

struct BuildNode;

// One stage B_{d,mu} of a build: the multi-index region with axis mu pinned to
// d+1, earlier axes >= d+2, later axes >= d+1, filled from partition child
// q*d + mu.
struct SlabRecord {
    std::uint32_t d = 0;
    std::uint32_t mu = 1;
    std::uint32_t stream_t = 0;

    // Per summation order sigma (sigma(mu) = 1): the hyperplane delta
    // s_{d+1} - s_d, the settled-mass corrections (claims, l = 2..q) and the
    // residual the slab content must reach.
    struct OrderData {
        Permutation sigma;
        double hyperplane_delta = 0.0;
        std::vector<double> claims;
        double residual = 0.0;
    };
    std::vector<OrderData> orders;

    std::unique_ptr<LeafRecord> leaf;  // when node dim == 2
    std::unique_ptr<BuildNode> sub;    // when node dim >= 3

    const OrderData& order_for(const Permutation& sigma) const;

    // subtree aggregates
    double bound_sum = 0.0;
    std::uint64_t used = 0;
    std::uint64_t crossings = 0;
    bool starved = false;
};

// A truncated build of dimension q over some index universe: stages
// (d, mu) for d = 0..depth, mu = 1..q, in that order. Local coordinates are
// 1-based on axes 1..q; parents embed them into their own frames.
struct BuildNode {
    int dim = 2;
    std::uint32_t depth = 0;
    PermTargets targets;
    std::shared_ptr<IndexPartition> partition;
    std::map<std::pair<std::uint32_t, std::uint32_t>, SlabRecord> slabs;

    const SlabRecord& slab(std::uint32_t d, std::uint32_t mu) const;
    SlabRecord& slab(std::uint32_t d, std::uint32_t mu);
};

// A flattened assigned entry: global multi-index -> original series index.
struct AssignmentEntry {
    std::vector<std::uint32_t> j;
    std::uint64_t m = 0;
    double value = 0.0;
    std::uint32_t slab_d = 0;
    std::uint32_t slab_mu = 1;
};

// Finite truncation of the n-dimensional rearrangement, with the recorded
// stage structure needed for exact bookkeeping.
struct Assignment {
    int n = 2;
    TruncationBudget budget;
    std::shared_ptr<const SeriesSource> source;
    std::shared_ptr<IndexPartition> partition;
    std::unique_ptr<BuildNode> root;
    std::string method = "nd";

    const std::vector<AssignmentEntry>& entries() const;
    std::uint64_t entry_count() const { return entries().size(); }
    // drop the cached flat view after mutating the tree (fault-injection tests)
    void invalidate_entries() const { entries_valid_ = false; }

private:
    mutable std::vector<AssignmentEntry> entries_cache_;
    mutable bool entries_valid_ = false;
};

// delta(sigma, nu): lower limit shift for the slab at stage (d, mu). nu is a
// summation-variable index; rejects nu = sigma(mu).
std::uint32_t delta_limit(const Permutation& sigma, int nu, int mu, std::uint32_t d);

// Exact value of the settled-mass series for variable l at stage (d, mu),
// computed from recorded targets and already-assigned entries only.
double claim_series_value(const BuildNode& node, const Permutation& sigma, int mu, std::uint32_t d, int l);
double claim_series_value(const Assignment& a, const Permutation& sigma, int mu, std::uint32_t d, int l);

// Region bookkeeping: axis constraint is either a pinned coordinate or a ray
// [base, inf).
struct AxisRange {
    bool pinned = false;
    std::uint64_t a = 1;
    static AxisRange pin(std::uint64_t v) { return {true, v}; }
    static AxisRange ray(std::uint64_t base) { return {false, base}; }
};
using Region = std::vector<AxisRange>;

double region_value(const BuildNode& node, const Region& region, const Permutation& order);

// Fill stage (d, mu) of the node: compute residual targets, consume partition
// child dim*d + mu (1-D greedy leaf for dim 2, recursive constant-target build
// otherwise), record the slab.
void fill_slab(BuildNode& node, std::uint32_t d, std::uint32_t mu, const TruncationBudget& budget);

// The induced permutation on the q-1 free axes after pinning axis mu.
Permutation induced_order(const Permutation& sigma, int mu);

Assignment build_nd(int n, std::shared_ptr<const SeriesSource> source, std::shared_ptr<IndexPartition> partition,
                    const PermTargets& targets, const TruncationBudget& budget);

// The explicit two-dimensional procedure (alternating rows and columns with
// directly summed corrections). Produces the same structure as build_nd(2).
Assignment build_2d(std::shared_ptr<const SeriesSource> source, std::shared_ptr<IndexPartition> partition,
                    const PermTargets& targets, const TruncationBudget& budget);

// Corollary-style targets: a single extended-real per sigma becomes a constant
// sequence (finite) or a linear-divergent one (+-inf -> slope +-1).
TargetSeq corollary_sequence(double extended_value, bool is_infinite, int inf_sign);

} // namespace rearr
