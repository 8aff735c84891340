#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rearr/permutation.hpp"

namespace rearr {

// One target sequence (s_k)_{k>=1} with the s_0 = 0 convention. Generated
// lazily from one of three shapes; Explicit sequences must cover every depth
// they are asked for.
struct TargetSeq {
    enum class Kind { Constant, Linear, Explicit };
    Kind kind = Kind::Constant;
    double value = 0.0;          // Constant: s_k = value; Linear: s_k = value * k
    std::vector<double> values;  // Explicit

    static TargetSeq constant(double v) {
        TargetSeq t;
        t.kind = Kind::Constant;
        t.value = v;
        return t;
    }
    static TargetSeq linear(double slope) {
        TargetSeq t;
        t.kind = Kind::Linear;
        t.value = slope;
        return t;
    }
    static TargetSeq list(std::vector<double> v) {
        TargetSeq t;
        t.kind = Kind::Explicit;
        t.values = std::move(v);
        return t;
    }

    double s(std::uint32_t k) const {
        if (k == 0) return 0.0;
        switch (kind) {
            case Kind::Constant: return value;
            case Kind::Linear: return value * static_cast<double>(k);
            case Kind::Explicit:
                if (k > values.size()) throw std::out_of_range("TargetSeq: explicit list too short");
                return values[k - 1];
        }
        return 0.0;
    }

    double delta(std::uint32_t k) const { return s(k) - s(k - 1); }

    // Limit of s_k for fully-summed (Corollary-style) regions; only constant
    // sequences have one.
    std::optional<double> limit() const {
        if (kind == Kind::Constant) return value;
        return std::nullopt;
    }
};

// sigma -> target sequence for every sigma in Sym(n).
struct PermTargets {
    int n = 0;
    std::map<std::uint32_t, std::pair<Permutation, TargetSeq>> table;

    PermTargets() = default;
    explicit PermTargets(int dim) : n(dim) {}

    void set(const Permutation& p, TargetSeq seq) {
        if (p.n != n) throw std::invalid_argument("PermTargets: dimension mismatch");
        table[p.key()] = {p, std::move(seq)};
    }

    const TargetSeq& at(const Permutation& p) const {
        auto it = table.find(p.key());
        if (it == table.end()) throw std::out_of_range("PermTargets: permutation not covered");
        return it->second.second;
    }

    bool complete() const {
        return table.size() == factorial(n);
    }

    static std::uint64_t factorial(int n) {
        std::uint64_t f = 1;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    }

    static PermTargets constants(int n, const std::map<std::uint32_t, std::pair<Permutation, double>>& vals) {
        PermTargets t(n);
        for (const auto& [key, pv] : vals) {
            (void)key;
            t.set(pv.first, TargetSeq::constant(pv.second));
        }
        return t;
    }
};

} // namespace rearr
