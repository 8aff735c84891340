#include "rearr/builder.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <optional>

namespace rearr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct AxisFrame {
    int global_axis = 1;        // 1-based
    std::uint64_t offset = 0;   // local coord c -> global coord c + offset
};

void collect_entries_rec(const BuildNode& node, const std::vector<AxisFrame>& frame,
                         std::vector<std::pair<int, std::uint64_t>>& pins, int top_n,
                         std::optional<std::pair<std::uint32_t, std::uint32_t>> top_slab,
                         std::vector<AssignmentEntry>& out) {
    for (const auto& [key, slab] : node.slabs) {
        const auto [d, mu] = key;
        auto slab_id = top_slab ? *top_slab : key;
        pins.emplace_back(frame[mu - 1].global_axis, frame[mu - 1].offset + d + 1);
        std::vector<AxisFrame> sub_frame;
        sub_frame.reserve(frame.size() - 1);
        for (std::uint32_t i = 1; i <= frame.size(); ++i) {
            if (i == mu) continue;
            std::uint64_t off = (i < mu) ? d + 1 : d;
            sub_frame.push_back(AxisFrame{frame[i - 1].global_axis, frame[i - 1].offset + off});
        }
        if (slab.leaf) {
            const LeafRecord& leaf = *slab.leaf;
            for (std::uint64_t p = 1; p <= leaf.size(); ++p) {
                AssignmentEntry e;
                e.j.assign(top_n, 0);
                for (const auto& [ax, v] : pins) e.j[ax - 1] = static_cast<std::uint32_t>(v);
                e.j[sub_frame[0].global_axis - 1] = static_cast<std::uint32_t>(p + sub_frame[0].offset);
                e.m = leaf.ordering[p - 1];
                e.value = leaf.values[p - 1];
                e.slab_d = slab_id.first;
                e.slab_mu = slab_id.second;
                out.push_back(std::move(e));
            }
        } else if (slab.sub) {
            collect_entries_rec(*slab.sub, sub_frame, pins, top_n, slab_id, out);
        }
        pins.pop_back();
    }
}

} // namespace

const SlabRecord::OrderData& SlabRecord::order_for(const Permutation& sigma) const {
    for (const auto& od : orders)
        if (od.sigma == sigma) return od;
    throw std::out_of_range("SlabRecord: no recorded order for permutation " + sigma.to_string());
}

const SlabRecord& BuildNode::slab(std::uint32_t d, std::uint32_t mu) const {
    auto it = slabs.find({d, mu});
    if (it == slabs.end()) throw MissingStage("stage (" + std::to_string(d) + "," + std::to_string(mu) + ") not built");
    return it->second;
}

SlabRecord& BuildNode::slab(std::uint32_t d, std::uint32_t mu) {
    auto it = slabs.find({d, mu});
    if (it == slabs.end()) throw MissingStage("stage (" + std::to_string(d) + "," + std::to_string(mu) + ") not built");
    return it->second;
}

const std::vector<AssignmentEntry>& Assignment::entries() const {
    if (!entries_valid_) {
        entries_cache_.clear();
        std::vector<AxisFrame> frame(n);
        for (int i = 1; i <= n; ++i) frame[i - 1] = AxisFrame{i, 0};
        std::vector<std::pair<int, std::uint64_t>> pins;
        collect_entries_rec(*root, frame, pins, n, std::nullopt, entries_cache_);
        entries_valid_ = true;
    }
    return entries_cache_;
}

std::uint32_t delta_limit(const Permutation& sigma, int nu, int mu, std::uint32_t d) {
    if (sigma(mu) != 1) throw std::invalid_argument("delta_limit: sigma(mu) must be 1");
    if (nu < 1 || nu > sigma.n) throw std::invalid_argument("delta_limit: nu out of range");
    if (nu == sigma(mu)) throw std::invalid_argument("delta_limit: nu = sigma(mu) is not defined");
    return sigma.inverse_of(nu) < mu ? d + 2 : d + 1;
}

Permutation induced_order(const Permutation& sigma, int drop_axis) {
    // rank-relabelled order on the remaining axes
    Permutation out;
    out.n = sigma.n - 1;
    int l = 0;
    for (int i = 1; i <= sigma.n; ++i) {
        if (i == drop_axis) continue;
        int rank = 0;
        for (int j = 1; j <= sigma.n; ++j) {
            if (j == drop_axis) continue;
            if (sigma(j) <= sigma(i)) ++rank;
        }
        out.img[l++] = static_cast<std::uint8_t>(rank);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact region bookkeeping
// ---------------------------------------------------------------------------

namespace {

double leaf_region_value(const LeafRecord& leaf, const AxisRange& r) {
    if (r.pinned) {
        if (r.a == 0 || r.a > leaf.size())
            throw MissingStage("leaf entry beyond truncation window");
        return leaf.values[r.a - 1];
    }
    if (r.a > leaf.size() + 1)
        throw MissingStage("leaf tail base beyond truncation window");
    double head = 0.0;
    for (std::uint64_t p = 1; p < r.a; ++p) head += leaf.values[p - 1];
    return leaf.target - head;
}

} // namespace

double region_value(const BuildNode& node, const Region& region, const Permutation& order) {
    const int q = node.dim;
    if (static_cast<int>(region.size()) != q) throw std::invalid_argument("region_value: rank mismatch");

    bool has_pin = false;
    std::uint64_t min_pin = ~0ULL;
    for (const auto& r : region)
        if (r.pinned) {
            has_pin = true;
            min_pin = std::min(min_pin, r.a);
        }

    if (!has_pin) {
        int peel = 0;
        for (int i = 1; i <= q; ++i)
            if (region[i - 1].a > 1) {
                peel = i;
                break;
            }
        if (peel == 0) {
            auto lim = node.targets.at(order).limit();
            if (!lim) throw std::logic_error("region_value: full sum of a non-constant-target build");
            return *lim;
        }
        Region r0 = region;
        r0[peel - 1] = AxisRange::ray(1);
        double v = region_value(node, r0, order);
        for (std::uint64_t c = 1; c < region[peel - 1].a; ++c) {
            Region rp = region;
            rp[peel - 1] = AxisRange::pin(c);
            v -= region_value(node, rp, order);
        }
        return v;
    }

    if (min_pin > static_cast<std::uint64_t>(node.depth) + 1)
        throw MissingStage("region pins beyond built depth");

    double total = 0.0;
    for (const auto& [key, slab] : node.slabs) {
        const auto [d, mu] = key;
        // axis mu is pinned to d+1 inside the slab
        const AxisRange& rmu = region[mu - 1];
        if (rmu.pinned ? (rmu.a != d + 1) : (rmu.a > d + 1)) continue;

        Region content;
        content.reserve(q - 1);
        bool ok = true;
        for (int i = 1; i <= q; ++i) {
            if (i == static_cast<int>(mu)) continue;
            std::uint64_t off = (i < static_cast<int>(mu)) ? d + 1 : d;
            const AxisRange& r = region[i - 1];
            if (r.pinned) {
                if (r.a <= off) {
                    ok = false;
                    break;
                }
                content.push_back(AxisRange::pin(r.a - off));
            } else {
                std::uint64_t base = std::max(r.a, off + 1) - off;
                content.push_back(AxisRange::ray(base));
            }
        }
        if (!ok) continue;

        if (slab.leaf) {
            total += leaf_region_value(*slab.leaf, content[0]);
        } else if (slab.sub) {
            total += region_value(*slab.sub, content, induced_order(order, mu));
        }
    }
    return total;
}

double claim_series_value(const BuildNode& node, const Permutation& sigma, int mu, std::uint32_t d, int l) {
    const int q = node.dim;
    if (sigma.n != q) throw std::invalid_argument("claim_series_value: dimension mismatch");
    if (sigma(mu) != 1) throw std::invalid_argument("claim_series_value: sigma(mu) must be 1");
    if (l < 2 || l > q) throw std::invalid_argument("claim_series_value: l out of range");

    // every stage before (d, mu) must be recorded
    for (std::uint32_t dd = 0; dd <= d; ++dd) {
        for (std::uint32_t mm = 1; mm <= static_cast<std::uint32_t>(q); ++mm) {
            if (dd == d && mm >= static_cast<std::uint32_t>(mu)) break;
            if (!node.slabs.count({dd, mm}))
                throw MissingStage("claim at stage (" + std::to_string(d) + "," + std::to_string(mu) +
                                   ") needs stage (" + std::to_string(dd) + "," + std::to_string(mm) + ")");
        }
    }

    int lambda = sigma.inverse_of(l);
    std::uint32_t dl = delta_limit(sigma, l, mu, d);

    double total = 0.0;
    for (std::uint64_t c = 1; c < dl; ++c) {
        Region region(q);
        region[lambda - 1] = AxisRange::pin(c);
        region[mu - 1] = AxisRange::pin(d + 1);
        for (int i = 1; i <= q; ++i) {
            if (i == lambda || i == mu) continue;
            int v = sigma(i);
            if (v < l)
                region[i - 1] = AxisRange::ray(1);
            else
                region[i - 1] = AxisRange::ray(i < mu ? d + 2 : d + 1);
        }
        total += region_value(node, region, sigma);
    }
    return total;
}

double claim_series_value(const Assignment& a, const Permutation& sigma, int mu, std::uint32_t d, int l) {
    return claim_series_value(*a.root, sigma, mu, d, l);
}

// ---------------------------------------------------------------------------
// Stage construction
// ---------------------------------------------------------------------------

namespace {

std::vector<Permutation> perms_with_slot_one(int q, int mu) {
    std::vector<Permutation> out;
    for (const auto& p : Permutation::all(q))
        if (p(mu) == 1) out.push_back(p);
    return out;
}

void aggregate_from_leaf(SlabRecord& rec, const LeafRecord& leaf) {
    rec.used = leaf.report.used;
    rec.crossings = leaf.report.crossings;
    rec.starved = leaf.report.starved;
    if (leaf.report.starved || (leaf.report.crossings == 0 && !leaf.report.infinite_mode))
        rec.bound_sum = kInf;  // target never reached within budget
    else
        rec.bound_sum = leaf.report.error_bound;
}

void aggregate_from_node(SlabRecord& rec, const BuildNode& node) {
    rec.bound_sum = 0.0;
    rec.used = 0;
    rec.crossings = 0;
    rec.starved = false;
    for (const auto& [key, slab] : node.slabs) {
        (void)key;
        rec.bound_sum += slab.bound_sum;
        rec.used += slab.used;
        rec.crossings += slab.crossings;
        rec.starved = rec.starved || slab.starved;
    }
}

void build_stages(BuildNode& node, const TruncationBudget& budget) {
    for (std::uint32_t d = 0; d <= node.depth; ++d)
        for (std::uint32_t mu = 1; mu <= static_cast<std::uint32_t>(node.dim); ++mu) fill_slab(node, d, mu, budget);
}

} // namespace

void fill_slab(BuildNode& node, std::uint32_t d, std::uint32_t mu, const TruncationBudget& budget) {
    const int q = node.dim;
    SlabRecord rec;
    rec.d = d;
    rec.mu = mu;
    rec.stream_t = q * d + mu;

    for (const auto& sigma : perms_with_slot_one(q, mu)) {
        SlabRecord::OrderData od;
        od.sigma = sigma;
        od.hyperplane_delta = node.targets.at(sigma).delta(d + 1);
        double corr = 0.0;
        for (int l = 2; l <= q; ++l) {
            double cv = claim_series_value(node, sigma, mu, d, l);
            od.claims.push_back(cv);
            corr += cv;
        }
        od.residual = od.hyperplane_delta - corr;
        rec.orders.push_back(std::move(od));
    }

    if (q == 2) {
        const double residual = rec.orders[0].residual;
        auto res = greedy_to_value(node.partition->positives(rec.stream_t), node.partition->negatives(rec.stream_t),
                                   residual, budget.slab_budget);
        auto leaf = std::make_unique<LeafRecord>();
        leaf->target = residual;
        leaf->ordering = std::move(res.ordering);
        leaf->values = std::move(res.values);
        leaf->report = res.report;
        aggregate_from_leaf(rec, *leaf);
        rec.leaf = std::move(leaf);
    } else {
        auto sub = std::make_unique<BuildNode>();
        sub->dim = q - 1;
        sub->depth = budget.depth_for_dim(q - 1);
        sub->targets = PermTargets(q - 1);
        for (const auto& od : rec.orders)
            sub->targets.set(induced_order(od.sigma, mu), TargetSeq::constant(od.residual));
        sub->partition = node.partition->sub_partition(rec.stream_t);
        build_stages(*sub, budget);
        aggregate_from_node(rec, *sub);
        rec.sub = std::move(sub);
    }

    node.slabs.emplace(std::make_pair(d, mu), std::move(rec));
}

Assignment build_nd(int n, std::shared_ptr<const SeriesSource> source, std::shared_ptr<IndexPartition> partition,
                    const PermTargets& targets, const TruncationBudget& budget) {
    if (n < 2) throw std::invalid_argument("build_nd: n must be >= 2");
    if (targets.n != n || !targets.complete()) throw std::invalid_argument("build_nd: targets must cover Sym(n)");

    Assignment a;
    a.n = n;
    a.budget = budget;
    a.source = std::move(source);
    a.partition = std::move(partition);
    a.root = std::make_unique<BuildNode>();
    a.root->dim = n;
    a.root->depth = budget.depth;
    a.root->targets = targets;
    a.root->partition = a.partition;
    build_stages(*a.root, budget);
    a.method = "nd";
    return a;
}

Assignment build_2d(std::shared_ptr<const SeriesSource> source, std::shared_ptr<IndexPartition> partition,
                    const PermTargets& targets, const TruncationBudget& budget) {
    if (targets.n != 2 || !targets.complete()) throw std::invalid_argument("build_2d: targets must cover Sym(2)");

    const Permutation row_sigma = Permutation::identity(2);
    const Permutation col_sigma{2, 1};
    const TargetSeq& row_seq = targets.at(row_sigma);
    const TargetSeq& col_seq = targets.at(col_sigma);

    Assignment a;
    a.n = 2;
    a.budget = budget;
    a.source = std::move(source);
    a.partition = std::move(partition);
    a.root = std::make_unique<BuildNode>();
    a.root->dim = 2;
    a.root->depth = budget.depth;
    a.root->targets = targets;
    a.root->partition = a.partition;
    a.method = "2d";

    // leaf value of entry b(r, c): rows hold c - r + 1, columns hold r - c - 1
    auto row_entry = [&](std::uint32_t r, std::uint32_t c) {
        const SlabRecord& s = a.root->slab(r - 1, 1);
        std::uint64_t p = c - r + 1;
        if (p == 0 || p > s.leaf->size()) throw MissingStage("build_2d: row entry beyond window");
        return s.leaf->values[p - 1];
    };
    auto col_entry = [&](std::uint32_t r, std::uint32_t c) {
        const SlabRecord& s = a.root->slab(c - 1, 2);
        std::uint64_t p = r - c;
        if (p == 0 || p > s.leaf->size()) throw MissingStage("build_2d: column entry beyond window");
        return s.leaf->values[p - 1];
    };
    // b(r, c) among already-built slabs
    auto entry_value = [&](std::uint32_t r, std::uint32_t c) { return (c >= r) ? row_entry(r, c) : col_entry(r, c); };

    for (std::uint32_t d = 0; d <= budget.depth; ++d) {
        // row d+1 over I_{2d+1}: sum_{k>=d+1} b(d+1,k) = s_{d+1} - s_d - sum_{k<d+1} b(d+1,k)
        {
            double corr = 0.0;
            for (std::uint32_t c = 1; c <= d; ++c) corr += entry_value(d + 1, c);
            SlabRecord rec;
            rec.d = d;
            rec.mu = 1;
            rec.stream_t = 2 * d + 1;
            SlabRecord::OrderData od;
            od.sigma = row_sigma;
            od.hyperplane_delta = row_seq.delta(d + 1);
            od.claims.push_back(corr);
            od.residual = od.hyperplane_delta - corr;
            rec.orders.push_back(od);
            auto res = greedy_to_value(a.partition->positives(rec.stream_t), a.partition->negatives(rec.stream_t),
                                       od.residual, budget.slab_budget);
            auto leaf = std::make_unique<LeafRecord>();
            leaf->target = od.residual;
            leaf->ordering = std::move(res.ordering);
            leaf->values = std::move(res.values);
            leaf->report = res.report;
            aggregate_from_leaf(rec, *leaf);
            rec.leaf = std::move(leaf);
            a.root->slabs.emplace(std::make_pair(d, 1u), std::move(rec));
        }
        // column d+1 over I_{2d+2}: sum_{j>=d+2} b(j,d+1) = s_{d+1} - s_d - sum_{j<=d+1} b(j,d+1)
        {
            double corr = 0.0;
            for (std::uint32_t r = 1; r <= d + 1; ++r) corr += entry_value(r, d + 1);
            SlabRecord rec;
            rec.d = d;
            rec.mu = 2;
            rec.stream_t = 2 * d + 2;
            SlabRecord::OrderData od;
            od.sigma = col_sigma;
            od.hyperplane_delta = col_seq.delta(d + 1);
            od.claims.push_back(corr);
            od.residual = od.hyperplane_delta - corr;
            rec.orders.push_back(od);
            auto res = greedy_to_value(a.partition->positives(rec.stream_t), a.partition->negatives(rec.stream_t),
                                       od.residual, budget.slab_budget);
            auto leaf = std::make_unique<LeafRecord>();
            leaf->target = od.residual;
            leaf->ordering = std::move(res.ordering);
            leaf->values = std::move(res.values);
            leaf->report = res.report;
            aggregate_from_leaf(rec, *leaf);
            rec.leaf = std::move(leaf);
            a.root->slabs.emplace(std::make_pair(d, 2u), std::move(rec));
        }
    }
    return a;
}

TargetSeq corollary_sequence(double extended_value, bool is_infinite, int inf_sign) {
    if (is_infinite) return TargetSeq::linear(inf_sign > 0 ? 1.0 : -1.0);
    return TargetSeq::constant(extended_value);
}

} // namespace rearr
