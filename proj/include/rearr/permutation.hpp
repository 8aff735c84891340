#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rearr {

inline constexpr int kMaxDim = 8;

// Element of Sym(n) in one-line image notation: images[i-1] = sigma(i),
// everything 1-based to match the summation-order conventions.
struct Permutation {
    int n = 0;
    std::array<std::uint8_t, kMaxDim> img{};

    Permutation() = default;
    Permutation(std::initializer_list<int> images) {
        n = static_cast<int>(images.size());
        int i = 0;
        for (int v : images) img[i++] = static_cast<std::uint8_t>(v);
        check();
    }
    explicit Permutation(const std::vector<int>& images) {
        n = static_cast<int>(images.size());
        for (int i = 0; i < n; ++i) img[i] = static_cast<std::uint8_t>(images[i]);
        check();
    }

    static Permutation identity(int n) {
        Permutation p;
        p.n = n;
        for (int i = 1; i <= n; ++i) p.img[i - 1] = static_cast<std::uint8_t>(i);
        return p;
    }

    int operator()(int i) const { return img[i - 1]; }

    // slot holding value v, i.e. sigma^{-1}(v)
    int inverse_of(int v) const {
        for (int i = 1; i <= n; ++i)
            if (img[i - 1] == v) return i;
        throw std::logic_error("Permutation::inverse_of: value out of range");
    }

    Permutation inverse() const {
        Permutation p;
        p.n = n;
        for (int i = 1; i <= n; ++i) p.img[img[i - 1] - 1] = static_cast<std::uint8_t>(i);
        return p;
    }

    // this after other
    Permutation compose(const Permutation& other) const {
        Permutation p;
        p.n = n;
        for (int i = 1; i <= n; ++i) p.img[i - 1] = img[other.img[i - 1] - 1];
        return p;
    }

    bool operator==(const Permutation& o) const {
        if (n != o.n) return false;
        for (int i = 0; i < n; ++i)
            if (img[i] != o.img[i]) return false;
        return true;
    }

    std::uint32_t key() const {
        std::uint32_t k = 0;
        for (int i = 0; i < n; ++i) k = (k << 4) | img[i];
        return k;
    }

    bool operator<(const Permutation& o) const { return key() < o.key(); }

    std::string to_string() const {
        std::string s;
        for (int i = 0; i < n; ++i) {
            if (i) s += ' ';
            s += std::to_string(int(img[i]));
        }
        return s;
    }

    static std::optional<Permutation> parse(std::string_view text, int n) {
        std::istringstream in{std::string(text)};
        std::vector<int> v;
        int x;
        while (in >> x) v.push_back(x);
        if (static_cast<int>(v.size()) != n) return std::nullopt;
        std::array<bool, kMaxDim + 1> seen{};
        for (int e : v) {
            if (e < 1 || e > n || seen[e]) return std::nullopt;
            seen[e] = true;
        }
        return Permutation(v);
    }

    static std::vector<Permutation> all(int n) {
        std::vector<int> v(n);
        for (int i = 0; i < n; ++i) v[i] = i + 1;
        std::vector<Permutation> out;
        // plain lexicographic enumeration
        while (true) {
            out.push_back(Permutation(v));
            int i = n - 2;
            while (i >= 0 && v[i] > v[i + 1]) --i;
            if (i < 0) break;
            int j = n - 1;
            while (v[j] < v[i]) --j;
            std::swap(v[i], v[j]);
            for (int a = i + 1, b = n - 1; a < b; ++a, --b) std::swap(v[a], v[b]);
        }
        return out;
    }

private:
    void check() const {
        if (n < 1 || n > kMaxDim) throw std::invalid_argument("Permutation: bad dimension");
        std::array<bool, kMaxDim + 1> seen{};
        for (int i = 0; i < n; ++i) {
            int v = img[i];
            if (v < 1 || v > n || seen[v]) throw std::invalid_argument("Permutation: not a bijection");
            seen[v] = true;
        }
    }
};

} // namespace rearr
