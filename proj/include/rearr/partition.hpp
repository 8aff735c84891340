#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rearr/series.hpp"

namespace rearr {

// Raised when lazy enumeration would have to scan past the configured step
// budget; the requesting stream effectively cannot supply its terms.
struct EnumerationLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A stream of non-negative values beta(pos) at positions 1,2,3,... where each
// position carries an original series index m. Finite streams return false
// past their end.
class BetaStream {
public:
    virtual ~BetaStream() = default;
    virtual bool at(std::uint64_t pos, std::uint64_t& m, double& beta) = 0;
    // Position of original index m within this stream, if m belongs to it.
    virtual std::optional<std::uint64_t> position_of(std::uint64_t m) = 0;
};

std::shared_ptr<BetaStream> positive_stream(std::shared_ptr<const SeriesSource> src);
std::shared_ptr<BetaStream> negative_stream(std::shared_ptr<const SeriesSource> src);

// Lazy decomposition of one divergent non-negative stream into countably many
// divergent substreams. Triangular sweep: round r visits children 1..r in
// order; a child is seeded with the smallest unassigned position on its first
// visit, and every visit appends consecutive unassigned positions until the
// child's beta sum has grown by at least the gain threshold during the visit.
// Each child is therefore a list of position runs, and the smallest position
// not yet assigned always lands in the next newly seeded child.
class DivergentSplit {
public:
    struct Run {
        std::uint64_t begin = 0, end = 0;  // positions [begin, end)
        std::uint64_t cum = 0;             // child positions before this run
    };

    explicit DivergentSplit(std::shared_ptr<BetaStream> universe, double visit_gain = 1.0,
                            std::uint64_t max_steps = kDefaultMaxSteps);

    // Extend until child t exists and holds >= count positions. Returns false
    // if the universe is exhausted first (finite streams).
    bool ensure_child(std::uint32_t t, std::uint64_t count);
    // Extend until every universe position < pos_end is assigned.
    bool ensure_positions(std::uint64_t pos_end);

    std::uint32_t child_count() const { return static_cast<std::uint32_t>(children_.size()); }
    std::uint64_t child_size(std::uint32_t t) const;
    double child_beta_sum(std::uint32_t t) const;
    const std::vector<Run>& child_runs(std::uint32_t t) const;

    // i-th position (1-based) of child t, as (m, beta); nullopt if the
    // universe cannot supply it.
    std::optional<std::pair<std::uint64_t, double>> element(std::uint32_t t, std::uint64_t i);

    // Owning child of an already-assigned universe position.
    std::uint32_t membership_by_pos(std::uint64_t pos) const;
    // Child position (1-based) of universe position pos within child t, if owned by t.
    std::optional<std::uint64_t> child_position(std::uint32_t t, std::uint64_t pos) const;

    BetaStream& universe() { return *uni_; }
    std::shared_ptr<BetaStream> universe_ptr() const { return uni_; }
    std::uint64_t frontier() const { return frontier_; }
    bool exhausted() const { return exhausted_; }

    static constexpr std::uint64_t kDefaultMaxSteps = 2'000'000'000ULL;

private:
    struct Child {
        std::vector<Run> runs;
        std::uint64_t size = 0;
        double beta_sum = 0.0;
    };
    struct GlobalRun {
        std::uint64_t begin = 0, end = 0;
        std::uint32_t child = 0;
    };

    void advance_one_visit();

    std::shared_ptr<BetaStream> uni_;
    double gain_;
    std::uint64_t max_steps_;
    std::uint64_t steps_ = 0;
    std::vector<Child> children_;
    std::vector<GlobalRun> global_runs_;  // sorted by begin
    std::uint64_t frontier_ = 1;
    std::uint32_t round_ = 0;
    std::uint32_t visit_target_ = 1;  // next child to visit within the round (1-based)
    bool exhausted_ = false;
};

// Cursor over one sign of one partition child (or a whole sign stream):
// yields (m, a_m) with the sign applied, in increasing index order.
class TermCursor {
public:
    TermCursor() = default;
    TermCursor(std::shared_ptr<DivergentSplit> split, std::uint32_t t, double sign)
        : split_(std::move(split)), t_(t), sign_(sign) {}

    static TermCursor over_stream(std::shared_ptr<BetaStream> stream, double sign) {
        TermCursor c;
        c.stream_ = std::move(stream);
        c.sign_ = sign;
        return c;
    }

    std::optional<std::pair<std::uint64_t, double>> pop() {
        if (split_) {
            auto e = split_->element(t_, next_);
            if (!e) return std::nullopt;
            ++next_;
            return std::make_pair(e->first, sign_ * e->second);
        }
        if (stream_) {
            std::uint64_t m;
            double beta;
            if (!stream_->at(next_, m, beta)) return std::nullopt;
            ++next_;
            return std::make_pair(m, sign_ * beta);
        }
        return std::nullopt;
    }
    std::uint64_t consumed() const { return next_ - 1; }

private:
    std::shared_ptr<DivergentSplit> split_;
    std::shared_ptr<BetaStream> stream_;
    std::uint32_t t_ = 0;
    double sign_ = 1.0;
    std::uint64_t next_ = 1;
};

// Disjoint partition of the index universe of a conditionally convergable
// series into sets I_t = P_t (non-negative terms) union N_t (negative terms),
// each sign split independently by the triangular sweep.
class IndexPartition {
public:
    IndexPartition(std::shared_ptr<const SeriesSource> source, std::shared_ptr<BetaStream> pos,
                   std::shared_ptr<BetaStream> neg, double visit_gain = 1.0,
                   std::uint64_t max_steps = DivergentSplit::kDefaultMaxSteps);

    static std::shared_ptr<IndexPartition> for_source(std::shared_ptr<const SeriesSource> source,
                                                      double visit_gain = 1.0,
                                                      std::uint64_t max_steps = DivergentSplit::kDefaultMaxSteps);

    // Lemma-split of the subseries over I_t (signs preserved from this level).
    std::shared_ptr<IndexPartition> sub_partition(std::uint32_t t) const;

    TermCursor positives(std::uint32_t t) const { return TermCursor(pos_split_, t, +1.0); }
    TermCursor negatives(std::uint32_t t) const { return TermCursor(neg_split_, t, -1.0); }

    std::shared_ptr<DivergentSplit> pos_split() const { return pos_split_; }
    std::shared_ptr<DivergentSplit> neg_split() const { return neg_split_; }

    // t with m in I_t; drives the sweeps far enough to classify m. nullopt for
    // indices beyond a finite source.
    std::optional<std::uint32_t> membership(std::uint64_t m) const;

    // i-th smallest element of I_t (1-based) with its term value. Intended for
    // small i; use merged walking for bulk dumps.
    std::optional<std::pair<std::uint64_t, double>> enumerate(std::uint32_t t, std::uint64_t i) const;

    const SeriesSource& source() const { return *source_; }
    std::shared_ptr<const SeriesSource> source_ptr() const { return source_; }
    double visit_gain() const { return visit_gain_; }

private:
    std::shared_ptr<const SeriesSource> source_;
    std::shared_ptr<BetaStream> pos_stream_, neg_stream_;
    std::shared_ptr<DivergentSplit> pos_split_, neg_split_;
    double visit_gain_;
    std::uint64_t max_steps_;
};

} // namespace rearr
