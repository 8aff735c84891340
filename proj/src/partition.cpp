#include "rearr/partition.hpp"

#include <algorithm>
#include <cmath>

namespace rearr {

namespace {

// Sign stream with odd/even index layout: O(1) position <-> index maps.
class ParityStream : public BetaStream {
public:
    ParityStream(std::shared_ptr<const SeriesSource> src, bool positive)
        : src_(std::move(src)), positive_(positive) {}

    bool at(std::uint64_t pos, std::uint64_t& m, double& beta) override {
        m = positive_ ? 2 * pos - 1 : 2 * pos;
        if (src_->length && m > *src_->length) return false;
        double a = src_->term(m);
        beta = positive_ ? a : -a;
        return true;
    }

    std::optional<std::uint64_t> position_of(std::uint64_t m) override {
        if (positive_) {
            if (m % 2 == 0) return std::nullopt;
            return (m + 1) / 2;
        }
        if (m % 2 == 1) return std::nullopt;
        return m / 2;
    }

private:
    std::shared_ptr<const SeriesSource> src_;
    bool positive_;
};

class AllPositiveStream : public BetaStream {
public:
    AllPositiveStream(std::shared_ptr<const SeriesSource> src, bool positive)
        : src_(std::move(src)), positive_(positive) {}

    bool at(std::uint64_t pos, std::uint64_t& m, double& beta) override {
        if (!positive_) return false;  // empty negative side
        m = pos;
        if (src_->length && m > *src_->length) return false;
        beta = src_->term(m);
        return true;
    }

    std::optional<std::uint64_t> position_of(std::uint64_t m) override {
        if (!positive_) return std::nullopt;
        return m;
    }

private:
    std::shared_ptr<const SeriesSource> src_;
    bool positive_;
};

// Generic sign stream: scans the source and memoizes the matching indices.
class ScanStream : public BetaStream {
public:
    ScanStream(std::shared_ptr<const SeriesSource> src, bool positive)
        : src_(std::move(src)), positive_(positive) {}

    bool at(std::uint64_t pos, std::uint64_t& m, double& beta) override {
        if (!extend_to(pos)) return false;
        m = indices_[pos - 1];
        double a = src_->term(m);
        beta = positive_ ? a : -a;
        return true;
    }

    std::optional<std::uint64_t> position_of(std::uint64_t m) override {
        if (src_->length && m > *src_->length) return std::nullopt;
        double a = src_->term(m);
        bool mine = positive_ ? (a >= 0) : (a < 0);
        if (!mine) return std::nullopt;
        while ((indices_.empty() || indices_.back() < m) && scan_next()) {
        }
        auto it = std::lower_bound(indices_.begin(), indices_.end(), m);
        if (it == indices_.end() || *it != m) return std::nullopt;
        return static_cast<std::uint64_t>(it - indices_.begin()) + 1;
    }

private:
    bool extend_to(std::uint64_t pos) {
        while (indices_.size() < pos) {
            if (!scan_next()) return false;
        }
        return true;
    }
    bool scan_next() {
        while (true) {
            std::uint64_t m = next_m_++;
            if (src_->length && m > *src_->length) {
                --next_m_;
                return false;
            }
            if (scanned_ > kScanCap) throw EnumerationLimit("generic sign stream scan cap exceeded");
            ++scanned_;
            double a = src_->term(m);
            bool mine = positive_ ? (a >= 0) : (a < 0);
            if (mine) {
                indices_.push_back(m);
                return true;
            }
        }
    }

    static constexpr std::uint64_t kScanCap = 50'000'000ULL;
    std::shared_ptr<const SeriesSource> src_;
    bool positive_;
    std::vector<std::uint64_t> indices_;
    std::uint64_t next_m_ = 1;
    std::uint64_t scanned_ = 0;
};

// View of one child of a split, reusable as the universe of a deeper split.
class ChildStream : public BetaStream {
public:
    ChildStream(std::shared_ptr<DivergentSplit> split, std::uint32_t t) : split_(std::move(split)), t_(t) {}

    bool at(std::uint64_t pos, std::uint64_t& m, double& beta) override {
        auto e = split_->element(t_, pos);
        if (!e) return false;
        m = e->first;
        beta = e->second;
        return true;
    }

    std::optional<std::uint64_t> position_of(std::uint64_t m) override {
        auto ppos = split_->universe().position_of(m);
        if (!ppos) return std::nullopt;
        if (!split_->ensure_positions(*ppos + 1)) {
            if (*ppos >= split_->frontier()) return std::nullopt;
        }
        return split_->child_position(t_, *ppos);
    }

private:
    std::shared_ptr<DivergentSplit> split_;
    std::uint32_t t_;
};

} // namespace

std::shared_ptr<BetaStream> positive_stream(std::shared_ptr<const SeriesSource> src) {
    switch (src->pattern) {
        case SignPattern::OddPositive: return std::make_shared<ParityStream>(src, true);
        case SignPattern::AllPositive: return std::make_shared<AllPositiveStream>(src, true);
        default: return std::make_shared<ScanStream>(src, true);
    }
}

std::shared_ptr<BetaStream> negative_stream(std::shared_ptr<const SeriesSource> src) {
    switch (src->pattern) {
        case SignPattern::OddPositive: return std::make_shared<ParityStream>(src, false);
        case SignPattern::AllPositive: return std::make_shared<AllPositiveStream>(src, false);
        default: return std::make_shared<ScanStream>(src, false);
    }
}

// ---------------------------------------------------------------------------
// DivergentSplit
// ---------------------------------------------------------------------------

DivergentSplit::DivergentSplit(std::shared_ptr<BetaStream> universe, double visit_gain, std::uint64_t max_steps)
    : uni_(std::move(universe)), gain_(visit_gain), max_steps_(max_steps) {
    if (!(gain_ > 0)) throw std::invalid_argument("DivergentSplit: visit gain must be > 0");
}

void DivergentSplit::advance_one_visit() {
    if (exhausted_) return;
    if (round_ == 0 || visit_target_ > round_) {
        ++round_;
        visit_target_ = 1;
    }
    std::uint32_t t = visit_target_;
    if (t == children_.size() + 1) children_.emplace_back();  // seeded with the smallest unassigned position
    Child& c = children_[t - 1];

    Run run;
    run.begin = frontier_;
    run.cum = c.size;
    double gain = 0.0;
    while (gain < gain_) {
        if (steps_ >= max_steps_)
            throw EnumerationLimit("index partition: enumeration step budget exceeded (stream too thin)");
        std::uint64_t m;
        double beta;
        if (!uni_->at(frontier_, m, beta)) {
            exhausted_ = true;
            break;
        }
        ++steps_;
        gain += beta;
        ++frontier_;
    }
    run.end = frontier_;
    if (run.end > run.begin) {
        c.runs.push_back(run);
        c.size += run.end - run.begin;
        c.beta_sum += gain;
        global_runs_.push_back(GlobalRun{run.begin, run.end, t});
    }
    ++visit_target_;
}

bool DivergentSplit::ensure_child(std::uint32_t t, std::uint64_t count) {
    if (t == 0) throw std::invalid_argument("DivergentSplit: child index is 1-based");
    while (child_count() < t || children_[t - 1].size < count) {
        if (exhausted_) return false;
        advance_one_visit();
    }
    return true;
}

bool DivergentSplit::ensure_positions(std::uint64_t pos_end) {
    while (frontier_ < pos_end) {
        if (exhausted_) return false;
        advance_one_visit();
    }
    return true;
}

std::uint64_t DivergentSplit::child_size(std::uint32_t t) const {
    return t <= children_.size() ? children_[t - 1].size : 0;
}

double DivergentSplit::child_beta_sum(std::uint32_t t) const {
    return t <= children_.size() ? children_[t - 1].beta_sum : 0.0;
}

const std::vector<DivergentSplit::Run>& DivergentSplit::child_runs(std::uint32_t t) const {
    static const std::vector<Run> empty;
    return t <= children_.size() ? children_[t - 1].runs : empty;
}

std::optional<std::pair<std::uint64_t, double>> DivergentSplit::element(std::uint32_t t, std::uint64_t i) {
    if (!ensure_child(t, i)) return std::nullopt;
    const Child& c = children_[t - 1];
    // run with cum < i <= cum + len
    auto it = std::upper_bound(c.runs.begin(), c.runs.end(), i,
                               [](std::uint64_t v, const Run& r) { return v <= r.cum; });
    --it;
    std::uint64_t pos = it->begin + (i - it->cum - 1);
    std::uint64_t m;
    double beta;
    if (!uni_->at(pos, m, beta)) return std::nullopt;
    return std::make_pair(m, beta);
}

std::uint32_t DivergentSplit::membership_by_pos(std::uint64_t pos) const {
    auto it = std::upper_bound(global_runs_.begin(), global_runs_.end(), pos,
                               [](std::uint64_t v, const GlobalRun& r) { return v < r.begin; });
    if (it == global_runs_.begin()) throw std::logic_error("membership_by_pos: position not assigned");
    --it;
    if (pos >= it->end) throw std::logic_error("membership_by_pos: position not assigned");
    return it->child;
}

std::optional<std::uint64_t> DivergentSplit::child_position(std::uint32_t t, std::uint64_t pos) const {
    if (t > children_.size()) return std::nullopt;
    const Child& c = children_[t - 1];
    auto it = std::upper_bound(c.runs.begin(), c.runs.end(), pos,
                               [](std::uint64_t v, const Run& r) { return v < r.begin; });
    if (it == c.runs.begin()) return std::nullopt;
    --it;
    if (pos >= it->end) return std::nullopt;
    return it->cum + (pos - it->begin) + 1;
}

// ---------------------------------------------------------------------------
// IndexPartition
// ---------------------------------------------------------------------------

IndexPartition::IndexPartition(std::shared_ptr<const SeriesSource> source, std::shared_ptr<BetaStream> pos,
                               std::shared_ptr<BetaStream> neg, double visit_gain, std::uint64_t max_steps)
    : source_(std::move(source)),
      pos_stream_(std::move(pos)),
      neg_stream_(std::move(neg)),
      visit_gain_(visit_gain),
      max_steps_(max_steps) {
    pos_split_ = std::make_shared<DivergentSplit>(pos_stream_, visit_gain_, max_steps_);
    neg_split_ = std::make_shared<DivergentSplit>(neg_stream_, visit_gain_, max_steps_);
}

std::shared_ptr<IndexPartition> IndexPartition::for_source(std::shared_ptr<const SeriesSource> source,
                                                           double visit_gain, std::uint64_t max_steps) {
    auto pos = positive_stream(source);
    auto neg = negative_stream(source);
    return std::make_shared<IndexPartition>(source, pos, neg, visit_gain, max_steps);
}

std::shared_ptr<IndexPartition> IndexPartition::sub_partition(std::uint32_t t) const {
    auto pos = std::make_shared<ChildStream>(pos_split_, t);
    auto neg = std::make_shared<ChildStream>(neg_split_, t);
    return std::make_shared<IndexPartition>(source_, pos, neg, visit_gain_, max_steps_);
}

std::optional<std::uint32_t> IndexPartition::membership(std::uint64_t m) const {
    if (source_->length && m > *source_->length) return std::nullopt;
    double a = source_->term(m);
    const auto& stream = (a >= 0) ? pos_stream_ : neg_stream_;
    const auto& split = (a >= 0) ? pos_split_ : neg_split_;
    auto pos = stream->position_of(m);
    if (!pos) return std::nullopt;
    if (!split->ensure_positions(*pos + 1)) {
        if (*pos >= split->frontier()) return std::nullopt;
    }
    return split->membership_by_pos(*pos);
}

std::optional<std::pair<std::uint64_t, double>> IndexPartition::enumerate(std::uint32_t t, std::uint64_t i) const {
    // merge P_t and N_t by increasing m
    std::uint64_t pi = 1, ni = 1;
    auto pe = pos_split_->element(t, pi);
    auto ne = neg_split_->element(t, ni);
    while (true) {
        if (!pe && !ne) return std::nullopt;
        bool take_pos = pe && (!ne || pe->first < ne->first);
        std::uint64_t m = take_pos ? pe->first : ne->first;
        double value = take_pos ? pe->second : -ne->second;
        if (--i == 0) return std::make_pair(m, value);
        if (take_pos)
            pe = pos_split_->element(t, ++pi);
        else
            ne = neg_split_->element(t, ++ni);
    }
}

} // namespace rearr
