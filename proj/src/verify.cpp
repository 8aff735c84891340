#include "rearr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <unordered_set>

#include "rearr/compensated.hpp"

namespace rearr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct AxisFrame {
    int global_axis = 1;
    std::uint64_t offset = 0;
};

double leaf_bound(const LeafRecord& leaf) {
    if (leaf.report.starved) return kInf;
    if (!leaf.report.infinite_mode && leaf.report.crossings == 0) return kInf;
    return leaf.report.error_bound;
}

struct Collector {
    const Permutation* top_sigma = nullptr;
    int top_n = 0;
    std::vector<std::pair<std::vector<std::uint32_t>, double>> keyed;
    std::set<const LeafRecord*> bounded_leaves;
    bool complete = true;

    void emit(const std::vector<std::pair<int, std::uint64_t>>& pins, const AxisFrame& leaf_axis,
              std::uint64_t p, double value) {
        std::vector<std::uint32_t> j(top_n, 0);
        for (const auto& [ax, v] : pins) j[ax - 1] = static_cast<std::uint32_t>(v);
        j[leaf_axis.global_axis - 1] = static_cast<std::uint32_t>(p + leaf_axis.offset);
        std::vector<std::uint32_t> key(top_n);
        for (int v = 1; v <= top_n; ++v) key[v - 1] = j[top_sigma->inverse_of(v) - 1];
        keyed.emplace_back(std::move(key), value);
    }

    double accumulate() {
        std::sort(keyed.begin(), keyed.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        CompensatedSum s;
        for (const auto& [k, v] : keyed) {
            (void)k;
            s += v;
        }
        return s.value();
    }

    double bound() const {
        double b = 0.0;
        for (const auto* leaf : bounded_leaves) b += leaf_bound(*leaf);
        return b;
    }
};

// Order-aligned collection: caps[i] caps local axis i+1 (0 = unbounded).
void aligned_collect(const BuildNode& node, const Permutation& order, const std::vector<std::uint64_t>& caps,
                     const std::vector<AxisFrame>& frame, std::vector<std::pair<int, std::uint64_t>>& pins,
                     Collector& C) {
    const int q = node.dim;
    for (const auto& [key, slab] : node.slabs) {
        const auto [d, mu] = key;
        if (caps[mu - 1] && d + 1 > caps[mu - 1]) continue;

        std::vector<std::uint64_t> sub_caps;
        std::vector<AxisFrame> sub_frame;
        sub_caps.reserve(q - 1);
        sub_frame.reserve(q - 1);
        bool ok = true;
        for (int i = 1; i <= q; ++i) {
            if (i == static_cast<int>(mu)) continue;
            std::uint64_t off = (i < static_cast<int>(mu)) ? d + 1 : d;
            std::uint64_t c = caps[i - 1];
            if (c) {
                if (c <= off) {
                    ok = false;
                    break;
                }
                c -= off;
            }
            sub_caps.push_back(c);
            sub_frame.push_back(AxisFrame{frame[i - 1].global_axis, frame[i - 1].offset + off});
        }
        if (!ok) continue;

        pins.emplace_back(frame[mu - 1].global_axis, frame[mu - 1].offset + d + 1);
        if (slab.leaf) {
            const LeafRecord& leaf = *slab.leaf;
            std::uint64_t maxp = leaf.size();
            bool capped = sub_caps[0] != 0;
            if (capped) {
                if (sub_caps[0] > leaf.size())
                    C.complete = false;  // window too short for the requested slice
                else
                    maxp = sub_caps[0];
            } else {
                C.bounded_leaves.insert(&leaf);
            }
            for (std::uint64_t p = 1; p <= maxp; ++p) C.emit(pins, sub_frame[0], p, leaf.values[p - 1]);
        } else if (slab.sub) {
            Permutation ind = induced_order(order, mu);
            int own_axis = ind.inverse_of(1);
            std::uint64_t own_cap = slab.sub->depth + 1;
            if (sub_caps[own_axis - 1] == 0 || sub_caps[own_axis - 1] > own_cap) sub_caps[own_axis - 1] = own_cap;
            aligned_collect(*slab.sub, ind, sub_caps, sub_frame, pins, C);
        }
        pins.pop_back();
    }
}

// Entries of an exact region (pins and rays), truncated at the windows.
void regional_collect(const BuildNode& node, const Region& region, const std::vector<AxisFrame>& frame,
                      std::vector<std::pair<int, std::uint64_t>>& pins, Collector& C) {
    const int q = node.dim;
    for (const auto& [key, slab] : node.slabs) {
        const auto [d, mu] = key;
        const AxisRange& rmu = region[mu - 1];
        if (rmu.pinned ? (rmu.a != d + 1) : (rmu.a > d + 1)) continue;

        Region content;
        std::vector<AxisFrame> sub_frame;
        content.reserve(q - 1);
        sub_frame.reserve(q - 1);
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
                content.push_back(AxisRange::ray(std::max(r.a, off + 1) - off));
            }
            sub_frame.push_back(AxisFrame{frame[i - 1].global_axis, frame[i - 1].offset + off});
        }
        if (!ok) continue;

        pins.emplace_back(frame[mu - 1].global_axis, frame[mu - 1].offset + d + 1);
        if (slab.leaf) {
            const LeafRecord& leaf = *slab.leaf;
            const AxisRange& r = content[0];
            if (r.pinned) {
                if (r.a == 0 || r.a > leaf.size()) throw MissingStage("claim re-sum: entry beyond window");
                C.emit(pins, sub_frame[0], r.a, leaf.values[r.a - 1]);
            } else {
                if (r.a > leaf.size() + 1) throw MissingStage("claim re-sum: tail base beyond window");
                C.bounded_leaves.insert(&leaf);
                for (std::uint64_t p = r.a; p <= leaf.size(); ++p) C.emit(pins, sub_frame[0], p, leaf.values[p - 1]);
            }
        } else if (slab.sub) {
            regional_collect(*slab.sub, content, sub_frame, pins, C);
        }
        pins.pop_back();
    }
}

std::vector<AxisFrame> top_frame(int n) {
    std::vector<AxisFrame> f(n);
    for (int i = 1; i <= n; ++i) f[i - 1] = AxisFrame{i, 0};
    return f;
}

} // namespace

PrefixSum iterated_prefix_sum(const Assignment& a, const Permutation& sigma, std::uint32_t k) {
    if (sigma.n != a.n) throw std::invalid_argument("iterated_prefix_sum: dimension mismatch");
    if (k > a.root->depth) throw DepthExceeded("prefix depth beyond built depth");
    PrefixSum out;
    if (k == 0) return out;

    Collector C;
    C.top_sigma = &sigma;
    C.top_n = a.n;
    std::vector<std::uint64_t> caps(a.n, 0);
    caps[sigma.inverse_of(1) - 1] = k;
    std::vector<std::pair<int, std::uint64_t>> pins;
    auto frame = top_frame(a.n);
    aligned_collect(*a.root, sigma, caps, frame, pins, C);

    out.terms = C.keyed.size();
    out.value = C.accumulate();
    out.bound = C.bound();
    out.complete = C.complete;
    return out;
}

AuditReport audit_assignment(const Assignment& a) {
    AuditReport rep;
    const auto& es = a.entries();

    // bijectivity on source indices
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(es.size() * 2);
    for (const auto& e : es) {
        if (!seen.insert(e.m).second) {
            rep.bijective = false;
            rep.bijective_msg = "duplicate source index m=" + std::to_string(e.m);
            break;
        }
    }

    // no two entries at the same multi-index, and each entry lies in the slab
    // its coordinates derive: pin value = min coordinate, axis = first argmin
    {
        std::vector<const AssignmentEntry*> sorted;
        sorted.reserve(es.size());
        for (const auto& e : es) sorted.push_back(&e);
        std::sort(sorted.begin(), sorted.end(),
                  [](const AssignmentEntry* x, const AssignmentEntry* y) { return x->j < y->j; });
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            if (sorted[i]->j == sorted[i + 1]->j) {
                rep.region_ok = false;
                rep.region_msg = "two entries share a multi-index";
                break;
            }
        }
        if (rep.region_ok) {
            for (const auto& e : es) {
                std::uint32_t v = e.j[0];
                std::uint32_t mu = 1;
                for (int i = 1; i < a.n; ++i)
                    if (e.j[i] < v) {
                        v = e.j[i];
                        mu = static_cast<std::uint32_t>(i + 1);
                    }
                if (v < 1 || v > a.root->depth + 1 || e.slab_d != v - 1 || e.slab_mu != mu) {
                    rep.region_ok = false;
                    rep.region_msg = "entry outside its slab region";
                    break;
                }
            }
        }
    }

    // slab-source discipline at every level
    {
        std::string msg;
        std::function<bool(const BuildNode&)> walk = [&](const BuildNode& node) -> bool {
            for (const auto& [key, slab] : node.slabs) {
                (void)key;
                if (slab.leaf) {
                    for (std::uint64_t m : slab.leaf->ordering) {
                        auto t = node.partition->membership(m);
                        if (!t || *t != slab.stream_t) {
                            msg = "index " + std::to_string(m) + " not in stream " + std::to_string(slab.stream_t);
                            return false;
                        }
                    }
                } else if (slab.sub) {
                    for (std::uint64_t m : [&] {
                             std::vector<std::uint64_t> all;
                             std::function<void(const BuildNode&)> gather = [&](const BuildNode& nn) {
                                 for (const auto& [k2, s2] : nn.slabs) {
                                     (void)k2;
                                     if (s2.leaf)
                                         all.insert(all.end(), s2.leaf->ordering.begin(), s2.leaf->ordering.end());
                                     else if (s2.sub)
                                         gather(*s2.sub);
                                 }
                             };
                             gather(*slab.sub);
                             return all;
                         }()) {
                        auto t = node.partition->membership(m);
                        if (!t || *t != slab.stream_t) {
                            msg = "index " + std::to_string(m) + " not in stream " + std::to_string(slab.stream_t);
                            return false;
                        }
                    }
                    if (!walk(*slab.sub)) return false;
                }
            }
            return true;
        };
        if (!walk(*a.root)) {
            rep.slab_source_ok = false;
            rep.slab_source_msg = msg;
        }
    }

    return rep;
}

bool partition_coverage_audit(const IndexPartition& p, std::uint64_t horizon, std::string* msg) {
    for (std::uint64_t m = 1; m <= horizon; ++m) {
        auto t = p.membership(m);
        if (!t) {
            if (msg) *msg = "index " + std::to_string(m) + " unassigned";
            return false;
        }
    }
    // enumeration consistency spot check, limited to children the horizon
    // already touched (deeper children may live far beyond it)
    std::uint32_t tmax = std::min(p.pos_split()->child_count(), p.neg_split()->child_count());
    tmax = std::min(tmax, 6u);
    for (std::uint32_t t = 1; t <= tmax; ++t) {
        for (std::uint64_t i = 1; i <= 25; ++i) {
            auto e = p.enumerate(t, i);
            if (!e) break;
            auto back = p.membership(e->first);
            if (!back || *back != t) {
                if (msg) *msg = "enumerate/membership mismatch at t=" + std::to_string(t);
                return false;
            }
        }
    }
    return true;
}

VerificationReport verify_theorem(const Assignment& a, double tolerance) {
    VerificationReport rep;
    rep.tolerance = tolerance;
    for (const auto& sigma : Permutation::all(a.n)) {
        for (std::uint32_t k = 1; k <= a.root->depth; ++k) {
            PrefixCheck c;
            c.sigma = sigma;
            c.k = k;
            auto ps = iterated_prefix_sum(a, sigma, k);
            c.measured = ps.value;
            c.bound = ps.bound;
            c.terms = ps.terms;
            c.complete = ps.complete;
            c.target = a.root->targets.at(sigma).s(k);
            double slack = 1e-9 * static_cast<double>(c.terms);
            c.pass = c.complete && std::fabs(c.measured - c.target) <= c.bound + slack && c.bound <= tolerance;
            rep.checks.push_back(std::move(c));
        }
    }
    rep.audit = audit_assignment(a);
    return rep;
}

ClaimCrossCheck resum_claim_crosscheck(const Assignment& a, const Permutation& sigma, int mu, std::uint32_t d,
                                       int l) {
    const BuildNode& node = *a.root;
    ClaimCrossCheck out;
    out.bookkeeping = claim_series_value(node, sigma, mu, d, l);

    int lambda = sigma.inverse_of(l);
    std::uint32_t dl = delta_limit(sigma, l, mu, d);

    Collector C;
    C.top_sigma = &sigma;
    C.top_n = a.n;
    std::vector<std::pair<int, std::uint64_t>> pins;
    auto frame = top_frame(a.n);
    for (std::uint64_t c = 1; c < dl; ++c) {
        Region region(a.n);
        region[lambda - 1] = AxisRange::pin(c);
        region[mu - 1] = AxisRange::pin(d + 1);
        for (int i = 1; i <= a.n; ++i) {
            if (i == lambda || i == static_cast<int>(mu)) continue;
            int v = sigma(i);
            region[i - 1] = (v < l) ? AxisRange::ray(1) : AxisRange::ray(i < mu ? d + 2 : d + 1);
        }
        regional_collect(node, region, frame, pins, C);
    }

    out.terms = C.keyed.size();
    out.numeric = C.accumulate();
    out.bound = C.bound();
    out.agree = std::fabs(out.numeric - out.bookkeeping) <= out.bound + 1e-9 * static_cast<double>(out.terms);
    return out;
}

} // namespace rearr
